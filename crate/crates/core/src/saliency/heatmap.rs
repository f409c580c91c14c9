use super::SaliencyMap;
use crate::error::Result;
use crate::image::{ImageBuffer, Rgb};

/// Blue-cyan-green-yellow-red ramp over `[0, 1]`.
fn ramp(t: f64) -> [f64; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [0.0, 0.0, 255.0],
        [0.0, 255.0, 255.0],
        [0.0, 255.0, 0.0],
        [255.0, 255.0, 0.0],
        [255.0, 0.0, 0.0],
    ];
    let x = t.clamp(0.0, 1.0) * 4.0;
    let k = (x.floor() as usize).min(3);
    let f = x - k as f64;
    std::array::from_fn(|c| STOPS[k][c] * (1.0 - f) + STOPS[k + 1][c] * f)
}

/// False-colour overlay: each pixel takes its cell's score, normalised by
/// the map maximum, blended over the image at `alpha`.
pub fn render_heatmap(image: &ImageBuffer, map: &SaliencyMap, alpha: f64) -> Result<ImageBuffer> {
    let max = map.max_score() as f64;
    let a = alpha.clamp(0.0, 1.0);
    let gw = map.grid_w() as u64;
    let gh = map.grid_h() as u64;
    let (w, h) = (image.width() as u64, image.height() as u64);
    ImageBuffer::from_fn(image.width(), image.height(), |x, y| {
        let i = (x as u64 * gw / w) as u32;
        let j = (y as u64 * gh / h) as u32;
        let t = if max > 0.0 { map.score(i, j) as f64 / max } else { 0.0 };
        let heat = ramp(t);
        let Rgb(px) = image.pixel(x, y);
        Rgb(std::array::from_fn(|c| {
            (px[c] as f64 * (1.0 - a) + heat[c] * a).round() as u8
        }))
    })
}
