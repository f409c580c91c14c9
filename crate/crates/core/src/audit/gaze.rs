use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{sample_uniform, Corpus};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::saliency::{
    max_salient_point, segment_salient_regions, Point, SaliencyBackend, SalientRegion, DEFAULT_GRID_STEP,
    DEFAULT_REGION_THRESHOLD,
};

/// Missing fields in a config file take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GazeAnalysisConfig {
    /// Minimum height / width.
    pub min_hw_ratio: f64,
    pub min_region_count: usize,
    pub region_threshold: f64,
    /// Images drawn per group from those passing the filters.
    pub sample_size: usize,
    pub seed: u64,
    /// Subgroup ids; empty means every declared subgroup.
    pub groups: Vec<String>,
    pub grid_step: u32,
}

impl Default for GazeAnalysisConfig {
    fn default() -> Self {
        GazeAnalysisConfig {
            min_hw_ratio: 1.25,
            min_region_count: 2,
            region_threshold: DEFAULT_REGION_THRESHOLD,
            sample_size: 100,
            seed: 0,
            groups: Vec::new(),
            grid_step: DEFAULT_GRID_STEP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GazeImage {
    pub image_id: String,
    pub focal: Point,
    pub head_box: (u32, u32, u32, u32),
    pub off_head: bool,
    pub regions: Vec<SalientRegion>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GazeGroupReport {
    pub group: String,
    pub members: usize,
    /// Members passing both filters.
    pub eligible: usize,
    pub sampled: usize,
    /// Sampled images that had a head box.
    pub evaluated: usize,
    pub off_head_count: usize,
    pub off_head_ids: Vec<String>,
    pub missing_head_box_ids: Vec<String>,
    pub images: Vec<GazeImage>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GazeReport {
    pub config: GazeAnalysisConfig,
    pub backend: SaliencyBackend,
    pub groups: Vec<GazeGroupReport>,
}

struct Candidate {
    image_id: String,
    focal: Point,
    regions: Vec<SalientRegion>,
}

/// Does the argmax crop land on the head?
///
/// Per group: keep members with `height / width >= min_hw_ratio` and at
/// least `min_region_count` salient regions, then draw up to `sample_size`
/// of them without replacement (seed `derive_seed(seed, group index)`). A
/// sampled image is off-head when its argmax point falls outside the
/// manifest head box. Sampled images without a head box are listed and
/// skipped.
pub fn gaze_analysis(corpus: &Corpus, config: &GazeAnalysisConfig, backend: &SaliencyBackend) -> Result<GazeReport> {
    if config.min_hw_ratio.is_nan() || config.min_hw_ratio <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "min_hw_ratio must be positive, got {}",
            config.min_hw_ratio
        )));
    }
    let groups: Vec<String> = if config.groups.is_empty() {
        corpus.manifest().subgroups.iter().map(|g| g.id.clone()).collect()
    } else {
        config.groups.clone()
    };

    let mut reports = Vec::with_capacity(groups.len());
    for (gi, group) in groups.iter().enumerate() {
        let members = corpus.members(group)?;
        let candidates: Vec<Option<Candidate>> = members
            .par_iter()
            .map(|id| {
                let img = corpus.image(id)?;
                if (img.height() as f64) < config.min_hw_ratio * img.width() as f64 {
                    return Ok(None);
                }
                let map = corpus.saliency(id, backend, config.grid_step)?;
                let regions = segment_salient_regions(&map, config.region_threshold);
                if regions.len() < config.min_region_count {
                    return Ok(None);
                }
                Ok(Some(Candidate {
                    image_id: id.clone(),
                    focal: max_salient_point(&map).0,
                    regions,
                }))
            })
            .collect::<Result<_>>()?;
        let mut eligible: Vec<Option<Candidate>> = candidates.into_iter().filter(Option::is_some).collect();

        let mut report = GazeGroupReport {
            group: group.clone(),
            members: members.len(),
            eligible: eligible.len(),
            sampled: 0,
            evaluated: 0,
            off_head_count: 0,
            off_head_ids: Vec::new(),
            missing_head_box_ids: Vec::new(),
            images: Vec::new(),
        };
        if !eligible.is_empty() {
            // draw positions in the eligible list, labelled by index
            let pool = crate::corpus::Subgroup {
                id: group.clone(),
                attributes: Default::default(),
                members: (0..eligible.len()).map(|i| i.to_string()).collect(),
            };
            let n = config.sample_size.min(eligible.len());
            let picks = sample_uniform(&pool, derive_seed(config.seed, gi as u64), n, false)?;
            report.sampled = picks.len();
            for pick in picks {
                let idx: usize = pick.parse().expect("index labels");
                let cand = eligible[idx].take().expect("drawn without replacement");
                let entry = corpus
                    .manifest()
                    .entry(&cand.image_id)
                    .ok_or_else(|| Error::UnknownImage(cand.image_id.clone()))?;
                let Some(head_box) = entry.head_box else {
                    report.missing_head_box_ids.push(cand.image_id);
                    continue;
                };
                let off_head = !entry.head_contains(cand.focal.x, cand.focal.y).unwrap_or(false);
                report.evaluated += 1;
                if off_head {
                    report.off_head_count += 1;
                    report.off_head_ids.push(cand.image_id.clone());
                }
                report.images.push(GazeImage {
                    image_id: cand.image_id,
                    focal: cand.focal,
                    head_box,
                    off_head,
                    regions: cand.regions,
                });
            }
        }
        reports.push(report);
    }
    Ok(GazeReport {
        config: config.clone(),
        backend: backend.clone(),
        groups: reports,
    })
}
