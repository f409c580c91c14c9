use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::Ecdf;
use crate::corpus::Corpus;
use crate::error::Result;
use crate::saliency::SaliencyBackend;

/// Per-image maximum and median saliency over one subgroup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupSaliencyStats {
    pub subgroup: String,
    /// Member ids, aligned with `max_scores` and `median_scores`.
    pub image_ids: Vec<String>,
    pub max_scores: Vec<f64>,
    pub median_scores: Vec<f64>,
    pub max_ecdf: Ecdf,
    pub median_ecdf: Ecdf,
}

impl SubgroupSaliencyStats {
    /// Largest ECDF gaps `(max, median)` against another subgroup.
    pub fn gaps(&self, other: &SubgroupSaliencyStats) -> (f64, f64) {
        (
            self.max_ecdf.max_gap(&other.max_ecdf),
            self.median_ecdf.max_gap(&other.median_ecdf),
        )
    }
}

pub fn subgroup_saliency_stats(
    corpus: &Corpus,
    subgroup: &str,
    backend: &SaliencyBackend,
    grid_step: u32,
) -> Result<SubgroupSaliencyStats> {
    let members = corpus.members(subgroup)?;
    let pairs: Vec<(f64, f64)> = members
        .par_iter()
        .map(|id| {
            let map = corpus.saliency(id, backend, grid_step)?;
            Ok((map.max_score() as f64, map.median_score() as f64))
        })
        .collect::<Result<_>>()?;
    let (max_scores, median_scores): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(SubgroupSaliencyStats {
        subgroup: subgroup.to_string(),
        image_ids: members.to_vec(),
        max_ecdf: Ecdf::new(&max_scores),
        median_ecdf: Ecdf::new(&median_scores),
        max_scores,
        median_scores,
    })
}
