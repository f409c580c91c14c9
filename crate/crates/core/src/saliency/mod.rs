//! Saliency maps: computing them, loading them from disk, and reading
//! focal points and salient regions out of them.

mod analysis;
mod contrast;
mod heatmap;
pub mod pfm;
mod regions;
mod resample;
mod spectral;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

pub use analysis::{
    is_horizontally_symmetric, max_salient_point, mean_mirror_difference, top_k_salient_points,
    DEFAULT_MIN_SEP_FRACTION, DEFAULT_SYMMETRY_TOLERANCE,
};
pub use heatmap::render_heatmap;
pub use regions::{segment_salient_regions, SalientRegion, DEFAULT_REGION_THRESHOLD};
pub use resample::resample_bilinear;

pub const DEFAULT_GRID_STEP: u32 = 8;

/// Pixel coordinate in a source image, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Grid of non-negative, finite scores laid uniformly over a source image.
///
/// Cell `(i, j)` (column `i`, row `j`) has its centre at pixel
/// `((i + 0.5) * source_w / grid_w, (j + 0.5) * source_h / grid_h)`, floored.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyMap {
    grid_w: u32,
    grid_h: u32,
    scores: Vec<f32>,
    source_w: u32,
    source_h: u32,
}

impl SaliencyMap {
    pub fn new(
        grid_w: u32,
        grid_h: u32,
        scores: Vec<f32>,
        source_w: u32,
        source_h: u32,
    ) -> Result<Self> {
        if grid_w == 0 || grid_h == 0 {
            return Err(Error::InvalidParameter(format!(
                "saliency grid {grid_w}x{grid_h} is empty"
            )));
        }
        if source_w == 0 || source_h == 0 {
            return Err(Error::InvalidParameter(format!(
                "saliency source {source_w}x{source_h} has zero area"
            )));
        }
        if scores.len() != grid_w as usize * grid_h as usize {
            return Err(Error::InvalidParameter(format!(
                "{} scores for a {grid_w}x{grid_h} grid",
                scores.len()
            )));
        }
        if let Some(bad) = scores.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "saliency score {bad} is negative or not finite"
            )));
        }
        Ok(SaliencyMap {
            grid_w,
            grid_h,
            scores,
            source_w,
            source_h,
        })
    }

    /// A map whose grid coincides with its source: one cell per pixel.
    pub fn from_grid(grid_w: u32, grid_h: u32, scores: Vec<f32>) -> Result<Self> {
        SaliencyMap::new(grid_w, grid_h, scores, grid_w, grid_h)
    }

    pub fn grid_w(&self) -> u32 {
        self.grid_w
    }

    pub fn grid_h(&self) -> u32 {
        self.grid_h
    }

    pub fn source_w(&self) -> u32 {
        self.source_w
    }

    pub fn source_h(&self) -> u32 {
        self.source_h
    }

    /// Row-major scores.
    pub fn scores(&self) -> &[f32] {
        &self.scores
    }

    pub fn score(&self, i: u32, j: u32) -> f32 {
        self.scores[self.index(i, j)]
    }

    pub fn index(&self, i: u32, j: u32) -> usize {
        j as usize * self.grid_w as usize + i as usize
    }

    /// `(i, j)` of a row-major index.
    pub fn cell_of(&self, index: usize) -> (u32, u32) {
        (
            (index % self.grid_w as usize) as u32,
            (index / self.grid_w as usize) as u32,
        )
    }

    /// Centre pixel of cell `(i, j)`.
    pub fn cell_center(&self, i: u32, j: u32) -> Point {
        let x = ((i as f64 + 0.5) * self.source_w as f64 / self.grid_w as f64).floor() as u32;
        let y = ((j as f64 + 0.5) * self.source_h as f64 / self.grid_h as f64).floor() as u32;
        Point::new(x.min(self.source_w - 1), y.min(self.source_h - 1))
    }

    /// Cell containing source pixel `p`.
    pub fn cell_at(&self, p: Point) -> (u32, u32) {
        let i = (p.x as u64 * self.grid_w as u64 / self.source_w as u64) as u32;
        let j = (p.y as u64 * self.grid_h as u64 / self.source_h as u64) as u32;
        (i.min(self.grid_w - 1), j.min(self.grid_h - 1))
    }

    pub fn max_score(&self) -> f32 {
        self.scores.iter().copied().fold(0.0, f32::max)
    }

    pub fn median_score(&self) -> f32 {
        let mut sorted = self.scores.clone();
        sorted.sort_by(f32::total_cmp);
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            ((sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0) as f32
        }
    }

    pub fn total(&self) -> f64 {
        self.scores.iter().map(|&s| s as f64).sum()
    }

    /// Same scores, mirrored left-right.
    pub fn mirrored(&self) -> SaliencyMap {
        let mut scores = Vec::with_capacity(self.scores.len());
        for j in 0..self.grid_h {
            for i in (0..self.grid_w).rev() {
                scores.push(self.score(i, j));
            }
        }
        SaliencyMap {
            scores,
            ..self.clone()
        }
    }

    /// Same scores multiplied by `c`.
    pub fn scaled(&self, c: f32) -> Result<SaliencyMap> {
        SaliencyMap::new(
            self.grid_w,
            self.grid_h,
            self.scores.iter().map(|s| s * c).collect(),
            self.source_w,
            self.source_h,
        )
    }
}

/// Which classical saliency model to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SaliencyBackend {
    /// Spectral-residual saliency on a downscaled grey image.
    SpectralResidual {
        /// Longest side of the internal image, pixels.
        resolution: u32,
        /// Gaussian smoothing sigma in internal pixels.
        sigma: f64,
    },
    /// Variance of luma in a `(2 * window_radius + 1)`-pixel square window
    /// centred on each cell. `None` uses the grid step as the radius.
    LuminanceContrast { window_radius: Option<u32> },
    /// A precomputed map stored as a PFM file, resampled to the grid.
    External { path: PathBuf },
}

impl SaliencyBackend {
    pub fn spectral() -> Self {
        SaliencyBackend::SpectralResidual {
            resolution: spectral::DEFAULT_RESOLUTION,
            sigma: spectral::DEFAULT_SIGMA,
        }
    }

    pub fn contrast() -> Self {
        SaliencyBackend::LuminanceContrast {
            window_radius: None,
        }
    }

    pub fn external(path: impl Into<PathBuf>) -> Self {
        SaliencyBackend::External { path: path.into() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SaliencyBackend::SpectralResidual { .. } => "spectral",
            SaliencyBackend::LuminanceContrast { .. } => "contrast",
            SaliencyBackend::External { .. } => "external",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SaliencyBackend::SpectralResidual { resolution, sigma } => {
                if *resolution == 0 || !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "spectral backend needs positive resolution and sigma, got {resolution} and {sigma}"
                    )));
                }
            }
            SaliencyBackend::LuminanceContrast {
                window_radius: Some(0),
            } => {
                return Err(Error::InvalidParameter(
                    "contrast window radius must be positive".into(),
                ))
            }
            _ => {}
        }
        Ok(())
    }
}

impl Default for SaliencyBackend {
    fn default() -> Self {
        SaliencyBackend::spectral()
    }
}

/// Grid dimensions for an image at the given step: `ceil(w / step)` by `ceil(h / step)`.
pub fn grid_dims(width: u32, height: u32, grid_step: u32) -> (u32, u32) {
    (width.div_ceil(grid_step), height.div_ceil(grid_step))
}

/// Run `backend` over `image` and report one score per `grid_step`-pixel cell.
pub fn compute_saliency(
    image: &ImageBuffer,
    backend: &SaliencyBackend,
    grid_step: u32,
) -> Result<SaliencyMap> {
    if grid_step == 0 {
        return Err(Error::InvalidParameter("grid step must be at least 1".into()));
    }
    backend.validate()?;
    let (gw, gh) = grid_dims(image.width(), image.height(), grid_step);
    let scores = match backend {
        SaliencyBackend::LuminanceContrast { window_radius } => {
            contrast::windowed_variance(image, gw, gh, window_radius.unwrap_or(grid_step))
        }
        SaliencyBackend::SpectralResidual { resolution, sigma } => {
            spectral::spectral_residual(image, *resolution, *sigma, gw, gh)
        }
        SaliencyBackend::External { path } => {
            let stored = pfm::read_pfm_file(path)?;
            let values: Vec<f64> = stored.values.iter().map(|&v| v as f64).collect();
            resample_bilinear(&values, stored.width, stored.height, gw, gh)
                .into_iter()
                .map(|v| v as f32)
                .collect()
        }
    };
    SaliencyMap::new(gw, gh, scores, image.width(), image.height())
}
