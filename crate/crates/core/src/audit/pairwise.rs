use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::attach::{run_pairwise_trial_with, Favored, VerticalAlign};
use super::stats::{confidence_interval, demographic_parity_verdict, CiMethod};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::image::{ImageBuffer, Rgb};
use crate::rng::{derive_seed, DetRng};
use crate::saliency::{SaliencyBackend, DEFAULT_GRID_STEP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuditVariant {
    /// Attach one random image from each group side by side.
    Attach,
    /// As `Attach`, after rescaling every image to a fixed height.
    AttachScaled { height: u32 },
    /// Compare per-image maxima over every cross-group pair, no attaching.
    NoAttachExhaustive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairAuditConfig {
    pub group_a: String,
    pub group_b: String,
    pub n_trials: usize,
    pub seed: u64,
    pub variant: AuditVariant,
    pub backend: SaliencyBackend,
    pub grid_step: u32,
    pub epsilon: f64,
    pub ci_level: f64,
    pub ci_method: CiMethod,
    pub align: VerticalAlign,
    pub pad_color: Rgb,
}

impl PairAuditConfig {
    pub fn new(group_a: impl Into<String>, group_b: impl Into<String>) -> Self {
        PairAuditConfig {
            group_a: group_a.into(),
            group_b: group_b.into(),
            n_trials: 10_000,
            seed: 0,
            variant: AuditVariant::Attach,
            backend: SaliencyBackend::default(),
            grid_step: DEFAULT_GRID_STEP,
            epsilon: 0.2,
            ci_level: 0.95,
            ci_method: CiMethod::Normal,
            align: VerticalAlign::Top,
            pad_color: Rgb::BLACK,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub group_a: String,
    pub group_b: String,
    pub variant: AuditVariant,
    /// Trials, or cross-group pairs for the exhaustive variant.
    pub n: usize,
    pub p_favored_a: f64,
    pub ci: (f64, f64),
    pub ci_level: f64,
    pub ci_method: CiMethod,
    pub parity_ratio: f64,
    pub epsilon: f64,
    pub disparate_impact_flag: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial_log: Option<String>,
}

/// One sampled pair in an attach audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub image_a: String,
    pub image_b: String,
    pub a_on_left: bool,
    pub favored_a: bool,
    pub point_x: u32,
    pub point_y: u32,
    pub score: f32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditOutcome {
    pub report: AuditReport,
    /// Empty for the exhaustive variant.
    pub trials: Vec<TrialRecord>,
}

/// Run whichever variant `config` names.
pub fn run_audit(corpus: &Corpus, config: &PairAuditConfig) -> Result<AuditOutcome> {
    match config.variant {
        AuditVariant::NoAttachExhaustive => Ok(AuditOutcome {
            report: audit_pair_no_attach(corpus, config)?,
            trials: Vec::new(),
        }),
        _ => audit_pair(corpus, config),
    }
}

fn build_report(config: &PairAuditConfig, n: usize, p: f64, ci: (f64, f64)) -> Result<AuditReport> {
    let verdict = demographic_parity_verdict(p, config.epsilon)?;
    Ok(AuditReport {
        group_a: config.group_a.clone(),
        group_b: config.group_b.clone(),
        variant: config.variant,
        n,
        p_favored_a: p,
        ci,
        ci_level: config.ci_level,
        ci_method: config.ci_method,
        parity_ratio: verdict.parity_ratio,
        epsilon: config.epsilon,
        disparate_impact_flag: verdict.disparate_impact,
        trial_log: None,
    })
}

/// Sampled attach audit.
///
/// The two groups are put in a canonical order (by id) before sampling, so
/// a trial sees the same composite whichever group is called A: trial `t`
/// seeds a stream with `derive_seed(seed, t)`, draws one member of the
/// first canonical group, one of the second, then a coin for which goes on
/// the left. Swapping A and B therefore maps `p` to exactly `1 - p`, and
/// trials can run in any order or in parallel.
pub fn audit_pair(corpus: &Corpus, config: &PairAuditConfig) -> Result<AuditOutcome> {
    let height = match config.variant {
        AuditVariant::Attach => None,
        AuditVariant::AttachScaled { height } if height > 0 => Some(height),
        AuditVariant::AttachScaled { .. } => {
            return Err(Error::InvalidParameter("scaled height must be positive".into()))
        }
        AuditVariant::NoAttachExhaustive => {
            return Err(Error::InvalidParameter(
                "exhaustive variant does not sample trials; use audit_pair_no_attach".into(),
            ))
        }
    };
    if config.n_trials == 0 {
        return Err(Error::InvalidParameter("audit needs at least one trial".into()));
    }
    if let SaliencyBackend::External { .. } = config.backend {
        return Err(Error::InvalidParameter(
            "stored saliency maps describe single images; attach audits need a computed backend".into(),
        ));
    }
    let members_a = corpus.members(&config.group_a)?;
    let members_b = corpus.members(&config.group_b)?;

    let mut images: HashMap<&str, Arc<ImageBuffer>> = HashMap::new();
    for id in members_a.iter().chain(members_b) {
        images.insert(id, corpus.image(id)?.clone());
    }
    if let Some(h) = height {
        let scaled: Vec<(&str, Arc<ImageBuffer>)> = images
            .par_iter()
            .map(|(id, img)| Ok((*id, Arc::new(img.resize_to_height(h)?))))
            .collect::<Result<_>>()?;
        images = scaled.into_iter().collect();
    }

    let a_first = config.group_a <= config.group_b;
    let (first, second) = if a_first {
        (members_a, members_b)
    } else {
        (members_b, members_a)
    };

    let trials: Vec<TrialRecord> = (0..config.n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = DetRng::new(derive_seed(config.seed, t as u64));
            let id1 = &first[rng.below(first.len())];
            let id2 = &second[rng.below(second.len())];
            let first_on_left = rng.coin();
            let (left, right) = if first_on_left { (id1, id2) } else { (id2, id1) };
            let outcome = run_pairwise_trial_with(
                &images[left.as_str()],
                &images[right.as_str()],
                &config.backend,
                config.grid_step,
                config.pad_color,
                config.align,
            )?;
            let favored_first = (outcome.favored == Favored::A) == first_on_left;
            let (image_a, image_b) = if a_first { (id1, id2) } else { (id2, id1) };
            Ok(TrialRecord {
                trial: t,
                image_a: image_a.clone(),
                image_b: image_b.clone(),
                a_on_left: first_on_left == a_first,
                favored_a: favored_first == a_first,
                point_x: outcome.point.x,
                point_y: outcome.point.y,
                score: outcome.score,
            })
        })
        .collect::<Result<_>>()?;

    let wins = trials.iter().filter(|t| t.favored_a).count();
    let p = wins as f64 / config.n_trials as f64;
    let ci = confidence_interval(p, config.n_trials, config.ci_level, config.ci_method)?;
    Ok(AuditOutcome {
        report: build_report(config, config.n_trials, p, ci)?,
        trials,
    })
}

/// Win and tie counts of `a` over `b` across all `|a| * |b|` pairs.
pub fn pairwise_wins(a: &[f64], b: &[f64]) -> (u64, u64) {
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut wins, mut ties) = (0u64, 0u64);
    for &x in a {
        let below = sorted.partition_point(|&v| v < x);
        let not_above = sorted.partition_point(|&v| v <= x);
        wins += below as u64;
        ties += (not_above - below) as u64;
    }
    (wins, ties)
}

/// Exhaustive comparison of per-image maximum saliency.
///
/// Every image's map is computed once; `p = (wins + ties / 2) / (|A| |B|)`
/// over all cross-group pairs. No sampling, so the interval is `(p, p)`.
pub fn audit_pair_no_attach(corpus: &Corpus, config: &PairAuditConfig) -> Result<AuditReport> {
    let members_a = corpus.members(&config.group_a)?;
    let members_b = corpus.members(&config.group_b)?;
    let maxima = |ids: &[String]| -> Result<Vec<f64>> {
        ids.par_iter()
            .map(|id| Ok(corpus.saliency(id, &config.backend, config.grid_step)?.max_score() as f64))
            .collect()
    };
    let max_a = maxima(members_a)?;
    let max_b = maxima(members_b)?;
    let (wins, ties) = pairwise_wins(&max_a, &max_b);
    let pairs = members_a.len() * members_b.len();
    let p = (wins as f64 + 0.5 * ties as f64) / pairs as f64;
    let mut report = build_report(config, pairs, p, (p, p))?;
    report.variant = AuditVariant::NoAttachExhaustive;
    Ok(report)
}
