use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CropParams, CropStrategy};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, DetRng};
use crate::saliency::{max_salient_point, top_k_salient_points, Point, SaliencyMap};

/// Pick the focal point for `strategy`.
///
/// `PadNoCrop` has no focal point and is rejected. Sampling draws one cell
/// with probability `score / total` from a stream seeded by the strategy's
/// seed; an all-zero map cannot be sampled.
pub fn select_focal(map: &SaliencyMap, strategy: &CropStrategy, params: &CropParams) -> Result<Point> {
    match *strategy {
        CropStrategy::Argmax => Ok(max_salient_point(map).0),
        CropStrategy::Sampling { seed } => sample_cell(map, &mut DetRng::new(seed)),
        CropStrategy::WeightedAverage => {
            let points = cell_centers(map);
            if map.total() > 0.0 {
                let weights: Vec<f64> = map.scores().iter().map(|&s| s as f64).collect();
                Ok(centroid(map, &points, &weights))
            } else {
                // uniform weights in the limit
                Ok(centroid(map, &points, &vec![1.0; points.len()]))
            }
        }
        CropStrategy::TopKAverage { k } => {
            if k == 0 {
                return Err(Error::InvalidParameter("top-k average needs k >= 1".into()));
            }
            let min_sep = params.min_sep_pixels(map.source_w(), map.source_h());
            let top: Vec<Point> = top_k_salient_points(map, k, min_sep)
                .into_iter()
                .map(|(p, _)| p)
                .collect();
            Ok(centroid(map, &top, &vec![1.0; top.len()]))
        }
        CropStrategy::UserFocal { point } => {
            if point.x >= map.source_w() || point.y >= map.source_h() {
                return Err(Error::InvalidParameter(format!(
                    "focal point ({}, {}) outside {}x{} image",
                    point.x,
                    point.y,
                    map.source_w(),
                    map.source_h()
                )));
            }
            Ok(point)
        }
        CropStrategy::PadNoCrop { .. } => Err(Error::NoFocalPoint("pad")),
    }
}

fn cell_centers(map: &SaliencyMap) -> Vec<Point> {
    (0..map.scores().len())
        .map(|idx| {
            let (i, j) = map.cell_of(idx);
            map.cell_center(i, j)
        })
        .collect()
}

/// Weighted mean of `points`, rounded half-up and kept inside the image.
fn centroid(map: &SaliencyMap, points: &[Point], weights: &[f64]) -> Point {
    let total: f64 = weights.iter().sum();
    let (mut sx, mut sy) = (0.0, 0.0);
    for (p, w) in points.iter().zip(weights) {
        sx += p.x as f64 * w;
        sy += p.y as f64 * w;
    }
    let round = |v: f64, limit: u32| ((v / total + 0.5).floor() as u32).min(limit - 1);
    Point::new(round(sx, map.source_w()), round(sy, map.source_h()))
}

fn sample_index(map: &SaliencyMap, rng: &mut DetRng) -> Result<usize> {
    let total = map.total();
    if total <= 0.0 {
        return Err(Error::ZeroSaliency);
    }
    let target = rng.unit_f64() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (idx, &s) in map.scores().iter().enumerate() {
        if s > 0.0 {
            acc += s as f64;
            last_positive = idx;
            if acc > target {
                return Ok(idx);
            }
        }
    }
    // accumulated rounding can leave `acc` a hair under `target`
    Ok(last_positive)
}

fn sample_cell(map: &SaliencyMap, rng: &mut DetRng) -> Result<Point> {
    let idx = sample_index(map, rng)?;
    let (i, j) = map.cell_of(idx);
    Ok(map.cell_center(i, j))
}

/// Per-cell selection frequencies under argmax and under sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExposureTable {
    pub n_trials: usize,
    /// Row-major, one entry per cell, sums to 1.
    pub argmax: Vec<f64>,
    pub sampling: Vec<f64>,
}

/// Run `n_trials` focal selections under each strategy and tabulate how
/// often each cell wins. Trial `t` samples with seed `derive_seed(seed, t)`.
pub fn exposure_experiment(map: &SaliencyMap, n_trials: usize, seed: u64) -> Result<ExposureTable> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("exposure experiment needs at least one trial".into()));
    }
    if map.total() <= 0.0 {
        return Err(Error::ZeroSaliency);
    }
    let n_cells = map.scores().len();

    let (winner, _) = max_salient_point(map);
    let (wi, wj) = map.cell_at(winner);
    let mut argmax = vec![0.0; n_cells];
    argmax[map.index(wi, wj)] = 1.0;

    let picks: Vec<usize> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| sample_index(map, &mut DetRng::new(derive_seed(seed, t))))
        .collect::<Result<_>>()?;
    let mut counts = vec![0usize; n_cells];
    for idx in picks {
        counts[idx] += 1;
    }
    let sampling = counts
        .into_iter()
        .map(|c| c as f64 / n_trials as f64)
        .collect();

    Ok(ExposureTable {
        n_trials,
        argmax,
        sampling,
    })
}
