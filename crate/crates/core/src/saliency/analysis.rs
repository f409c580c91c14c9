use super::{Point, SaliencyMap};

/// Default symmetry tolerance, as a fraction of the map's maximum score.
pub const DEFAULT_SYMMETRY_TOLERANCE: f64 = 0.05;

/// Default separation between top-k points, as a fraction of the image diagonal.
pub const DEFAULT_MIN_SEP_FRACTION: f64 = 0.10;

/// Highest-scoring cell, mapped to its centre pixel.
///
/// Ties go to the first cell in row-major order (smallest row, then smallest
/// column), so an all-zero map yields cell `(0, 0)`.
pub fn max_salient_point(map: &SaliencyMap) -> (Point, f32) {
    let mut best = 0;
    for (k, &s) in map.scores().iter().enumerate() {
        if s > map.scores()[best] {
            best = k;
        }
    }
    let (i, j) = map.cell_of(best);
    (map.cell_center(i, j), map.scores()[best])
}

/// Up to `k` points chosen by greedy non-maximum suppression.
///
/// Each round takes the best remaining cell (row-major tie-break) and then
/// discards every cell whose centre lies closer than `min_sep` pixels to it.
pub fn top_k_salient_points(map: &SaliencyMap, k: usize, min_sep: f64) -> Vec<(Point, f32)> {
    let n = map.scores().len();
    let centers: Vec<Point> = (0..n)
        .map(|idx| {
            let (i, j) = map.cell_of(idx);
            map.cell_center(i, j)
        })
        .collect();

    // stable sort keeps row-major order among equal scores
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| map.scores()[b].total_cmp(&map.scores()[a]));

    let mut picked: Vec<(Point, f32)> = Vec::with_capacity(k);
    for idx in order {
        if picked.len() == k {
            break;
        }
        let p = centers[idx];
        if picked.iter().all(|(q, _)| p.distance(q) >= min_sep) {
            picked.push((p, map.scores()[idx]));
        }
    }
    picked
}

/// Mean absolute difference between each cell and its mirror across the
/// vertical centre line.
pub fn mean_mirror_difference(map: &SaliencyMap) -> f64 {
    let gw = map.grid_w();
    let mut acc = 0.0;
    for j in 0..map.grid_h() {
        for i in 0..gw {
            acc += (map.score(i, j) as f64 - map.score(gw - 1 - i, j) as f64).abs();
        }
    }
    acc / map.scores().len() as f64
}

/// True when the mean mirror difference is at most `tol` times the maximum
/// score. An all-zero map counts as symmetric.
pub fn is_horizontally_symmetric(map: &SaliencyMap, tol: f64) -> bool {
    mean_mirror_difference(map) <= tol * map.max_score() as f64
}
