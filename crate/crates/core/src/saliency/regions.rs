use serde::{Deserialize, Serialize};

use super::{Point, SaliencyMap};

/// Default binarisation threshold, as a fraction of the map's maximum.
pub const DEFAULT_REGION_THRESHOLD: f64 = 0.3;

/// One 8-connected component of above-threshold cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SalientRegion {
    /// `(x, y, w, h)` in grid cells.
    pub bbox: (u32, u32, u32, u32),
    pub peak: Point,
    pub peak_score: f32,
    pub mass: f64,
    pub cell_count: usize,
    /// Row-major indices of member cells.
    #[serde(skip)]
    pub cells: Vec<usize>,
}

/// Threshold the map at `threshold_frac * max` and label 8-connected components.
///
/// Regions come back sorted by descending mass; equal masses keep the order
/// of their first cell in row-major order. An all-zero map has no regions.
pub fn segment_salient_regions(map: &SaliencyMap, threshold_frac: f64) -> Vec<SalientRegion> {
    let max = map.max_score() as f64;
    if max <= 0.0 {
        return Vec::new();
    }
    let cut = threshold_frac * max;
    let w = map.grid_w() as usize;
    let h = map.grid_h() as usize;
    let on: Vec<bool> = map.scores().iter().map(|&s| s as f64 >= cut).collect();

    // first pass: provisional labels from the four already-visited neighbours
    let mut labels = vec![usize::MAX; w * h];
    let mut forest = UnionFind::default();
    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            if !on[idx] {
                continue;
            }
            let mut neighbours = [usize::MAX; 4];
            if x > 0 {
                neighbours[0] = labels[idx - 1];
            }
            if y > 0 {
                neighbours[1] = labels[idx - w];
                if x > 0 {
                    neighbours[2] = labels[idx - w - 1];
                }
                if x + 1 < w {
                    neighbours[3] = labels[idx - w + 1];
                }
            }
            let mut label = usize::MAX;
            for &n in neighbours.iter().filter(|&&n| n != usize::MAX) {
                if label == usize::MAX {
                    label = n;
                } else {
                    forest.union(label, n);
                }
            }
            labels[idx] = if label == usize::MAX {
                forest.make()
            } else {
                label
            };
        }
    }

    // second pass: gather cells per root, in row-major order of first cell
    let mut region_of_root = std::collections::HashMap::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for idx in 0..w * h {
        if labels[idx] == usize::MAX {
            continue;
        }
        let root = forest.find(labels[idx]);
        let r = *region_of_root.entry(root).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[r].push(idx);
    }

    let mut regions: Vec<SalientRegion> = members
        .into_iter()
        .map(|cells| describe(map, cells))
        .collect();
    regions.sort_by(|a, b| b.mass.total_cmp(&a.mass));
    regions
}

fn describe(map: &SaliencyMap, cells: Vec<usize>) -> SalientRegion {
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    let mut mass = 0.0;
    let mut peak_idx = cells[0];
    for &idx in &cells {
        let (i, j) = map.cell_of(idx);
        x0 = x0.min(i);
        y0 = y0.min(j);
        x1 = x1.max(i);
        y1 = y1.max(j);
        let s = map.scores()[idx];
        mass += s as f64;
        if s > map.scores()[peak_idx] {
            peak_idx = idx;
        }
    }
    let (pi, pj) = map.cell_of(peak_idx);
    SalientRegion {
        bbox: (x0, y0, x1 - x0 + 1, y1 - y0 + 1),
        peak: map.cell_center(pi, pj),
        peak_score: map.scores()[peak_idx],
        mass,
        cell_count: cells.len(),
        cells,
    }
}

#[derive(Default)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn make(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}
