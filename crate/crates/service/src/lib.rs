//! HTTP front end for picking a focal point by hand.
//!
//! ```text
//! POST /images                      raw PNG/JPEG body      -> 201 {image_id, width, height}
//! GET  /images/{id}/candidates?k=3&ars=1:1,16:9            -> top-k points with preview rects
//! POST /images/{id}/selection       {"x": .., "y": ..}     -> 204
//! GET  /images/{id}/crop?ar=16:9&format=json|png           -> rect, or the cropped PNG
//! GET  /images/{id}/saliency                               -> the score grid
//! ```
//!
//! Sessions live in memory and expire after a TTL. Saliency is computed on
//! the first request that needs it, once per image.

mod error;
mod session;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use faircrop_core::corpus::{decode_image_bytes, encode_image_bytes, ImageFormat};
use faircrop_core::crop::{center_crop, crop_around_focal, plan_crops, AspectRatio, CropParams, CropRect, CropSpec, CropStrategy};
use faircrop_core::saliency::{is_horizontally_symmetric, max_salient_point, top_k_salient_points};
use faircrop_core::{Point, SaliencyBackend};

pub use error::ApiError;
pub use session::{Session, SessionStore};

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub max_upload_bytes: usize,
    pub ttl: Duration,
    pub backend: SaliencyBackend,
    pub params: CropParams,
    pub default_k: usize,
    pub max_k: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            max_upload_bytes: 10 * 1024 * 1024,
            ttl: Duration::from_secs(3600),
            backend: SaliencyBackend::default(),
            params: CropParams::default(),
            default_k: 3,
            max_k: 10,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    config: Arc<ServiceConfig>,
    sessions: SessionStore,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            sessions: SessionStore::new(config.ttl),
            config: Arc::new(config),
        }
    }

    pub fn sessions(&self) -> &SessionStore {
        &self.sessions
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }
}

pub fn router(state: AppState) -> Router {
    let limit = state.config.max_upload_bytes;
    Router::new()
        .route("/images", post(upload))
        .route("/images/{id}/candidates", get(candidates))
        .route("/images/{id}/selection", post(select))
        .route("/images/{id}/crop", get(crop))
        .route("/images/{id}/saliency", get(saliency))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

/// Bind `addr` and serve until the process ends. Expired sessions are
/// swept once a minute.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let sweeper = state.sessions.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_expired();
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

#[derive(Serialize, Deserialize)]
pub struct Uploaded {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
}

async fn upload(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Result<(StatusCode, Json<Uploaded>), ApiError> {
    let body = body.map_err(|r| match r.status() {
        StatusCode::PAYLOAD_TOO_LARGE => ApiError::PayloadTooLarge(state.config.max_upload_bytes),
        _ => ApiError::BadRequest(r.body_text()),
    })?;
    let image = tokio::task::spawn_blocking(move || decode_image_bytes(&body, std::path::Path::new("upload")))
        .await
        .map_err(ApiError::internal)??;
    let (width, height) = (image.width(), image.height());
    let image_id = state.sessions.insert(image);
    tracing::debug!(%image_id, width, height, "stored upload");
    Ok((StatusCode::CREATED, Json(Uploaded { image_id, width, height })))
}

fn parse_ars(raw: &str) -> Result<Vec<AspectRatio>, ApiError> {
    let ars = raw
        .split(',')
        .map(|s| s.trim().parse::<AspectRatio>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ApiError::BadRequest(e.to_string()))?;
    if ars.is_empty() {
        return Err(ApiError::BadRequest("no aspect ratios given".into()));
    }
    Ok(ars)
}

#[derive(Deserialize)]
struct CandidateQuery {
    k: Option<usize>,
    ars: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct Preview {
    pub ar: AspectRatio,
    pub rect: CropRect,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct Candidate {
    pub point: Point,
    pub score: f32,
    pub previews: Vec<Preview>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct Candidates {
    pub candidates: Vec<Candidate>,
    pub symmetric: bool,
}

async fn candidates(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<CandidateQuery>,
) -> Result<Json<Candidates>, ApiError> {
    let session = state.sessions.get(&id)?;
    let k = q.k.unwrap_or(state.config.default_k);
    if k == 0 || k > state.config.max_k {
        return Err(ApiError::BadRequest(format!("k must be in 1..={}", state.config.max_k)));
    }
    let ars = parse_ars(q.ars.as_deref().unwrap_or("1:1"))?;
    let map = session.saliency(&state.config).await?;
    let (w, h) = (map.source_w(), map.source_h());
    let params = &state.config.params;

    let symmetric = is_horizontally_symmetric(&map, params.symmetry_tol);
    let candidates = if symmetric {
        let center = Point::new(w / 2, h / 2);
        let (i, j) = map.cell_at(center);
        let previews = ars
            .iter()
            .map(|&ar| Ok(Preview { ar, rect: center_crop(w, h, ar)? }))
            .collect::<Result<_, ApiError>>()?;
        vec![Candidate {
            point: center,
            score: map.score(i, j),
            previews,
        }]
    } else {
        top_k_salient_points(&map, k, params.min_sep_pixels(w, h))
            .into_iter()
            .map(|(point, score)| {
                let previews = ars
                    .iter()
                    .map(|&ar| Ok(Preview { ar, rect: crop_around_focal(w, h, point, ar)? }))
                    .collect::<Result<_, ApiError>>()?;
                Ok(Candidate { point, score, previews })
            })
            .collect::<Result<_, ApiError>>()?
    };
    Ok(Json(Candidates { candidates, symmetric }))
}

#[derive(Serialize, Deserialize)]
pub struct Selection {
    pub x: u32,
    pub y: u32,
}

async fn select(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(sel): Json<Selection>,
) -> Result<StatusCode, ApiError> {
    let session = state.sessions.get(&id)?;
    let (w, h) = session.dims();
    if sel.x >= w || sel.y >= h {
        return Err(ApiError::Unprocessable(format!(
            "point ({}, {}) outside {w}x{h} image",
            sel.x, sel.y
        )));
    }
    session.set_selection(Point::new(sel.x, sel.y));
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
struct CropQuery {
    ar: String,
    format: Option<String>,
}

/// Where the crop's focal point came from.
#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FocalSource {
    Selection,
    Argmax,
    /// Symmetric map, no selection: centre crop.
    Center,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CropResponse {
    pub ar: AspectRatio,
    pub rect: CropRect,
    pub focal: Option<Point>,
    pub source: FocalSource,
}

async fn crop(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<CropQuery>,
) -> Result<Response, ApiError> {
    let session = state.sessions.get(&id)?;
    let ar: AspectRatio = q.ar.parse().map_err(|e: faircrop_core::Error| ApiError::BadRequest(e.to_string()))?;
    let png = match q.format.as_deref() {
        None | Some("json") => false,
        Some("png") => true,
        Some(other) => return Err(ApiError::BadRequest(format!("unknown format {other:?}"))),
    };
    let (w, h) = session.dims();

    let resp = match session.selection() {
        Some(p) => CropResponse {
            ar,
            rect: crop_around_focal(w, h, p, ar)?,
            focal: Some(p),
            source: FocalSource::Selection,
        },
        None => {
            // same path as the CLI's argmax crop
            let map = session.saliency(&state.config).await?;
            let plan = plan_crops(&map, &CropStrategy::Argmax, &[ar], &state.config.params)?;
            let CropSpec::Rect(rect) = plan.specs[0].1 else {
                return Err(ApiError::internal("argmax plan produced padding"));
            };
            CropResponse {
                ar,
                rect,
                focal: plan.focal,
                source: if plan.symmetric {
                    FocalSource::Center
                } else {
                    FocalSource::Argmax
                },
            }
        }
    };
    if !png {
        return Ok(Json(resp).into_response());
    }
    let image = session.image().clone();
    let r = resp.rect;
    let bytes = tokio::task::spawn_blocking(move || {
        encode_image_bytes(&image.crop(r.x, r.y, r.w, r.h)?, ImageFormat::Png)
    })
    .await
    .map_err(ApiError::internal)??;
    Ok(([(header::CONTENT_TYPE, ImageFormat::Png.mime())], bytes).into_response())
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SaliencyGrid {
    pub grid_w: u32,
    pub grid_h: u32,
    pub source_w: u32,
    pub source_h: u32,
    pub max_score: f32,
    pub max_point: Point,
    /// Row-major, `grid_h` rows of `grid_w` scores.
    pub scores: Vec<f32>,
}

async fn saliency(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<SaliencyGrid>, ApiError> {
    let session = state.sessions.get(&id)?;
    let map = session.saliency(&state.config).await?;
    let (max_point, max_score) = max_salient_point(&map);
    Ok(Json(SaliencyGrid {
        grid_w: map.grid_w(),
        grid_h: map.grid_h(),
        source_w: map.source_w(),
        source_h: map.source_h(),
        max_score,
        max_point,
        scores: map.scores().to_vec(),
    }))
}
