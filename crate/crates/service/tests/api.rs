use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;

use faircrop_core::corpus::{decode_image_bytes, encode_image_bytes, ImageFormat};
use faircrop_core::crop::{crop_pipeline, AspectRatio, CropParams, CropSpec, CropStrategy};
use faircrop_core::{ImageBuffer, Rgb, SaliencyBackend};
use faircrop_service::{router, AppState, Candidates, CropResponse, FocalSource, SaliencyGrid, ServiceConfig};

fn app(limit: usize) -> (Router, AppState) {
    let state = AppState::new(ServiceConfig {
        max_upload_bytes: limit,
        backend: SaliencyBackend::contrast(),
        ..Default::default()
    });
    (router(state.clone()), state)
}

/// Two bright squares on grey, the left one larger.
fn two_peaks() -> ImageBuffer {
    ImageBuffer::from_fn(240, 120, |x, y| {
        let left = (30..62).contains(&x) && (40..72).contains(&y);
        let right = (180..196).contains(&x) && (50..66).contains(&y);
        if left || right {
            Rgb::WHITE
        } else {
            Rgb::gray(60)
        }
    })
    .unwrap()
}

fn png(img: &ImageBuffer) -> Vec<u8> {
    encode_image_bytes(img, ImageFormat::Png).unwrap()
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, body.to_vec())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn upload(app: &Router, bytes: Vec<u8>) -> (StatusCode, Value) {
    let (status, body) = send(app, Request::post("/images").body(Body::from(bytes)).unwrap()).await;
    (status, serde_json::from_slice(&body).unwrap())
}

async fn select(app: &Router, id: &str, body: Value) -> StatusCode {
    let req = Request::post(format!("/images/{id}/selection"))
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app, req).await.0
}

#[tokio::test]
async fn upload_errors() {
    let (app, _) = app(1024);
    let (status, _) = upload(&app, b"definitely not an image".to_vec()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = upload(&app, vec![0u8; 4096]).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    let (status, body) = upload(&app, png(&ImageBuffer::filled(8, 8, Rgb::BLACK).unwrap())).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!((body["width"].as_u64(), body["height"].as_u64()), (Some(8), Some(8)));
}

#[tokio::test]
async fn candidates_and_previews() {
    let (app, _) = app(1 << 20);
    let (_, body) = upload(&app, png(&two_peaks())).await;
    let id = body["image_id"].as_str().unwrap().to_string();

    let (status, body) = get(&app, &format!("/images/{id}/candidates?k=2&ars=1:1,16:9,4:5")).await;
    assert_eq!(status, StatusCode::OK);
    let c: Candidates = serde_json::from_slice(&body).unwrap();
    assert!(!c.symmetric);
    assert_eq!(c.candidates.len(), 2);
    assert!(c.candidates[0].score >= c.candidates[1].score);
    // the first candidate sits on the left square, the second on the right
    assert!(c.candidates[0].point.x < 120 && c.candidates[1].point.x >= 120);
    for cand in &c.candidates {
        assert_eq!(cand.previews.len(), 3);
        for p in &cand.previews {
            assert!(p.rect.contains(cand.point));
            assert!(p.rect.x + p.rect.w <= 240 && p.rect.y + p.rect.h <= 120);
            assert!(p.rect.w == 240 || p.rect.h == 120);
        }
    }

    let (_, body) = get(&app, &format!("/images/{id}/candidates?k=1")).await;
    let one: Candidates = serde_json::from_slice(&body).unwrap();
    assert_eq!(one.candidates.len(), 1);
    assert_eq!(one.candidates[0].point, c.candidates[0].point);

    assert_eq!(get(&app, &format!("/images/{id}/candidates?ars=2:0")).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, &format!("/images/{id}/candidates?k=11")).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, "/images/nope/candidates").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn symmetric_image_has_center_candidate() {
    let (app, _) = app(1 << 20);
    let (_, body) = upload(&app, png(&ImageBuffer::filled(100, 60, Rgb::gray(128)).unwrap())).await;
    let id = body["image_id"].as_str().unwrap();
    let (_, body) = get(&app, &format!("/images/{id}/candidates?k=3")).await;
    let c: Candidates = serde_json::from_slice(&body).unwrap();
    assert!(c.symmetric);
    assert_eq!(c.candidates.len(), 1);
    assert_eq!((c.candidates[0].point.x, c.candidates[0].point.y), (50, 30));
}

#[tokio::test]
async fn selection_drives_crops() {
    let (app, _) = app(1 << 20);
    let (_, body) = upload(&app, png(&two_peaks())).await;
    let id = body["image_id"].as_str().unwrap().to_string();

    assert_eq!(select(&app, &id, json!({"x": 240, "y": 0})).await, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(select(&app, "nope", json!({"x": 1, "y": 1})).await, StatusCode::NOT_FOUND);
    assert_eq!(select(&app, &id, json!({"x": 5, "y": 5})).await, StatusCode::NO_CONTENT);
    // last write wins
    assert_eq!(select(&app, &id, json!({"x": 230, "y": 100})).await, StatusCode::NO_CONTENT);

    for ar in ["1:1", "16:9", "4:5"] {
        let (status, body) = get(&app, &format!("/images/{id}/crop?ar={ar}")).await;
        assert_eq!(status, StatusCode::OK);
        let r: CropResponse = serde_json::from_slice(&body).unwrap();
        assert_eq!(r.source, FocalSource::Selection);
        assert!(r.rect.contains(faircrop_core::Point::new(230, 100)));

        let (status, bytes) = get(&app, &format!("/images/{id}/crop?ar={ar}&format=png")).await;
        assert_eq!(status, StatusCode::OK);
        let cropped = decode_image_bytes(&bytes, std::path::Path::new("resp")).unwrap();
        assert_eq!((cropped.width(), cropped.height()), (r.rect.w, r.rect.h));
        let expected = two_peaks().crop(r.rect.x, r.rect.y, r.rect.w, r.rect.h).unwrap();
        assert_eq!(cropped, expected);
    }
    assert_eq!(get(&app, &format!("/images/{id}/crop?ar=x")).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, &format!("/images/{id}/crop?ar=1:1&format=gif")).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn fallback_matches_engine_argmax() {
    let (app, state) = app(1 << 20);
    let img = two_peaks();
    let (_, body) = upload(&app, png(&img)).await;
    let id = body["image_id"].as_str().unwrap().to_string();
    for ar in ["1:1", "16:9", "4:5"] {
        let (_, body) = get(&app, &format!("/images/{id}/crop?ar={ar}")).await;
        let r: CropResponse = serde_json::from_slice(&body).unwrap();
        assert_eq!(r.source, FocalSource::Argmax);
        let parsed: AspectRatio = ar.parse().unwrap();
        let specs = crop_pipeline(&img, &state.config().backend, &CropStrategy::Argmax, &[parsed], &CropParams::default()).unwrap();
        assert_eq!(specs, vec![CropSpec::Rect(r.rect)]);
    }
}

#[tokio::test]
async fn saliency_grid_and_session_isolation() {
    let (app, state) = app(1 << 20);
    let (_, a) = upload(&app, png(&two_peaks())).await;
    let (_, b) = upload(&app, png(&two_peaks())).await;
    let (a, b) = (a["image_id"].as_str().unwrap().to_string(), b["image_id"].as_str().unwrap().to_string());
    assert_ne!(a, b);

    assert!(!state.sessions().get(&a).unwrap().saliency_computed());
    let (status, body) = get(&app, &format!("/images/{a}/saliency")).await;
    assert_eq!(status, StatusCode::OK);
    let grid: SaliencyGrid = serde_json::from_slice(&body).unwrap();
    assert_eq!((grid.grid_w, grid.grid_h), (30, 15));
    assert_eq!(grid.scores.len(), 450);
    assert_eq!(grid.max_score, grid.scores.iter().cloned().fold(0.0, f32::max));
    assert!(state.sessions().get(&a).unwrap().saliency_computed());
    assert!(!state.sessions().get(&b).unwrap().saliency_computed());

    select(&app, &a, json!({"x": 1, "y": 1})).await;
    let (_, body) = get(&app, &format!("/images/{b}/crop?ar=1:1")).await;
    let r: CropResponse = serde_json::from_slice(&body).unwrap();
    assert_eq!(r.source, FocalSource::Argmax);
}

#[tokio::test]
async fn concurrent_first_requests_share_one_map() {
    let (app, state) = app(1 << 20);
    let (_, body) = upload(&app, png(&two_peaks())).await;
    let id = body["image_id"].as_str().unwrap().to_string();
    let mut handles = Vec::new();
    for _ in 0..8 {
        let app = app.clone();
        let uri = format!("/images/{id}/saliency");
        handles.push(tokio::spawn(async move { get(&app, &uri).await }));
    }
    let mut bodies = Vec::new();
    for h in handles {
        let (status, body) = h.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        bodies.push(body);
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(state.sessions().len(), 1);
}

#[tokio::test]
async fn expired_sessions_disappear() {
    let state = AppState::new(ServiceConfig {
        ttl: std::time::Duration::from_millis(1),
        ..Default::default()
    });
    let id = state.sessions().insert(ImageBuffer::filled(4, 4, Rgb::BLACK).unwrap());
    state.sessions().insert_pinned("keep", ImageBuffer::filled(4, 4, Rgb::BLACK).unwrap());
    tokio::time::sleep(std::time::Duration::from_millis(20)).await;
    assert!(state.sessions().get(&id).is_err());
    assert!(state.sessions().get("keep").is_ok());
    assert_eq!(state.sessions().evict_expired(), 1);
}
