use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use faircrop_core::audit::synthetic::{synthetic_corpus, SyntheticGroup, SyntheticParams};
use faircrop_core::audit::{gaze_analysis, run_audit, subgroup_saliency_stats, GazeAnalysisConfig, PairAuditConfig};
use faircrop_core::corpus::{decode_image, encode_image, load_manifest, write_atomic, Corpus, ImageFormat};
use faircrop_core::crop::{apply_crop, plan_crops, plan_padding, AspectRatio, CropParams, CropPlan, CropStrategy};
use faircrop_core::saliency::pfm::{write_pfm_file, FloatGrid};
use faircrop_core::saliency::{compute_saliency, render_heatmap, segment_salient_regions};
use faircrop_service::{AppState, ServiceConfig};

use crate::args::{AuditArgs, Global, GroupSpecs, Statistic};
use crate::Failure;

type CmdResult = Result<Outcome, Failure>;

/// How a successful command ends.
pub enum Outcome {
    Done,
    /// Audit finished and raised the disparate-impact flag.
    Flagged,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Other(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    Ok(write_atomic(path, text.as_bytes())?)
}

/// `text` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Header fields shared by every JSON document we write.
fn header(global: &Global) -> serde_json::Map<String, Value> {
    let mut h = serde_json::Map::new();
    h.insert("tool".into(), json!(concat!("faircrop ", env!("CARGO_PKG_VERSION"))));
    if !global.stable_output {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
        h.insert("generated_unix".into(), json!(now.as_secs()));
    }
    h
}

fn load_corpus(manifest: &Path) -> Result<Corpus, Failure> {
    let m = load_manifest(manifest).map_err(faircrop_core::Error::from)?;
    Ok(Corpus::load(m)?)
}

pub fn saliency(global: &Global, image: &Path, out: &Path, heatmap: Option<&Path>) -> CmdResult {
    let img = decode_image(image)?;
    let map = compute_saliency(&img, &global.backend, global.grid_step)?;
    write_pfm_file(out, &FloatGrid::from_map(&map))?;
    if let Some(path) = heatmap {
        encode_image(&render_heatmap(&img, &map, 0.6)?, path, ImageFormat::Png)?;
    }
    tracing::info!(grid_w = map.grid_w(), grid_h = map.grid_h(), max = map.max_score(), "wrote {}", out.display());
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct CropLogEntry {
    ar: AspectRatio,
    #[serde(flatten)]
    spec: faircrop_core::crop::CropSpec,
    output: PathBuf,
}

pub fn crop(global: &Global, image: &Path, ars: &[AspectRatio], strategy: &CropStrategy, out_dir: &Path) -> CmdResult {
    let img = decode_image(image)?;
    let params = CropParams {
        grid_step: global.grid_step,
        ..Default::default()
    };
    let plan = match strategy {
        CropStrategy::PadNoCrop { pad_color } => {
            if ars.is_empty() {
                return Err(Failure::Usage("no aspect ratios requested".into()));
            }
            plan_padding(img.width(), img.height(), ars, *pad_color)
        }
        _ => plan_crops(&compute_saliency(&img, &global.backend, global.grid_step)?, strategy, ars, &params)?,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| Failure::Io(out_dir.to_path_buf(), e))?;

    let stem = image.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
    let format = ImageFormat::from_extension(image).unwrap_or(ImageFormat::Png);
    let ext = match format {
        ImageFormat::Png => "png",
        ImageFormat::Jpeg => "jpg",
    };
    let mut log = Vec::new();
    for (ar, spec) in &plan.specs {
        let name = format!("{stem}_{}x{}.{ext}", ar.num(), ar.den());
        encode_image(&apply_crop(&img, spec)?, &out_dir.join(&name), format)?;
        log.push(CropLogEntry {
            ar: *ar,
            spec: *spec,
            output: PathBuf::from(name),
        });
    }
    let CropPlan { symmetric, focal, .. } = plan;
    let mut doc = header(global);
    doc.insert("image".into(), json!(image));
    doc.insert("width".into(), json!(img.width()));
    doc.insert("height".into(), json!(img.height()));
    doc.insert("backend".into(), json!(global.backend));
    doc.insert("strategy".into(), json!(strategy));
    doc.insert("symmetric".into(), json!(symmetric));
    doc.insert("focal".into(), json!(focal));
    doc.insert("crops".into(), json!(log));
    write_text(&out_dir.join(format!("{stem}_crops.json")), &to_json(&doc)?)?;
    Ok(Outcome::Done)
}

pub fn audit(global: &Global, args: &AuditArgs) -> CmdResult {
    let corpus = load_corpus(&args.manifest)?;
    let config = PairAuditConfig {
        n_trials: args.trials,
        seed: global.seed(),
        variant: args.variant,
        backend: global.backend.clone(),
        grid_step: global.grid_step,
        epsilon: args.epsilon,
        ci_level: args.ci_level,
        ci_method: args.ci.into(),
        align: args.align.into(),
        ..PairAuditConfig::new(&args.pair[0], &args.pair[1])
    };
    let mut outcome = run_audit(&corpus, &config)?;

    if let Some(path) = &args.trial_log {
        let mut text = String::new();
        for t in &outcome.trials {
            text.push_str(&serde_json::to_string(t).map_err(|e| Failure::Other(e.to_string()))?);
            text.push('\n');
        }
        write_text(path, &text)?;
        outcome.report.trial_log = Some(path.display().to_string());
    }
    let r = &outcome.report;
    if let Some(path) = &args.plot_csv {
        let csv = format!(
            "group_a,group_b,p_favored_a,ci_lo,ci_hi\n{},{},{},{},{}\n",
            r.group_a, r.group_b, r.p_favored_a, r.ci.0, r.ci.1
        );
        write_text(path, &csv)?;
    }

    let mut doc = header(global);
    doc.insert("manifest".into(), json!(args.manifest));
    doc.insert("config".into(), json!(config));
    doc.insert("report".into(), json!(r));
    write_text(&args.report, &to_json(&doc)?)?;
    eprintln!(
        "p_favored_{} = {:.4} [{:.4}, {:.4}], parity ratio {:.4}{}",
        r.group_a,
        r.p_favored_a,
        r.ci.0,
        r.ci.1,
        r.parity_ratio,
        if r.disparate_impact_flag { " -> disparate impact" } else { "" }
    );
    Ok(if r.disparate_impact_flag {
        Outcome::Flagged
    } else {
        Outcome::Done
    })
}

pub fn regions(global: &Global, image: &Path, threshold: f64, out: Option<&Path>) -> CmdResult {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Failure::Usage(format!("threshold {threshold} outside [0, 1]")));
    }
    let img = decode_image(image)?;
    let map = compute_saliency(&img, &global.backend, global.grid_step)?;
    let regions = segment_salient_regions(&map, threshold);
    let doc = json!({
        "image": image,
        "grid_w": map.grid_w(),
        "grid_h": map.grid_h(),
        "threshold": threshold,
        "regions": regions,
    });
    emit(out, &to_json(&doc)?)?;
    Ok(Outcome::Done)
}

pub fn stats(
    global: &Global,
    manifest: &Path,
    subgroup: &str,
    statistic: Statistic,
    against: Option<&str>,
    out: &Path,
) -> CmdResult {
    let corpus = load_corpus(manifest)?;
    let pick = |s: &faircrop_core::audit::SubgroupSaliencyStats| match statistic {
        Statistic::Max => s.max_ecdf.clone(),
        Statistic::Median => s.median_ecdf.clone(),
    };
    let stats = subgroup_saliency_stats(&corpus, subgroup, &global.backend, global.grid_step)?;
    let ecdf = pick(&stats);
    write_text(out, &ecdf.to_csv())?;
    if let Some(other) = against {
        let other_stats = subgroup_saliency_stats(&corpus, other, &global.backend, global.grid_step)?;
        let gap = ecdf.max_gap(&pick(&other_stats));
        print!("{}", to_json(&json!({ "subgroup": subgroup, "against": other, "max_gap": gap }))?);
    }
    Ok(Outcome::Done)
}

pub fn gaze(global: &Global, manifest: &Path, config: Option<&Path>, out: Option<&Path>) -> CmdResult {
    let mut cfg: GazeAnalysisConfig = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => GazeAnalysisConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    cfg.grid_step = global.grid_step;
    let corpus = load_corpus(manifest)?;
    let report = gaze_analysis(&corpus, &cfg, &global.backend)?;
    let mut doc = header(global);
    doc.insert("manifest".into(), json!(manifest));
    doc.insert("gaze".into(), json!(report));
    emit(out, &to_json(&doc)?)?;
    for g in &report.groups {
        eprintln!("{}: {} of {} sampled off head", g.group, g.off_head_count, g.sampled);
    }
    Ok(Outcome::Done)
}

pub fn serve(
    global: &Global,
    addr: std::net::SocketAddr,
    corpus_dir: Option<&Path>,
    max_upload_bytes: usize,
    ttl_secs: u64,
) -> CmdResult {
    let state = AppState::new(ServiceConfig {
        max_upload_bytes,
        ttl: Duration::from_secs(ttl_secs),
        backend: global.backend.clone(),
        params: CropParams {
            grid_step: global.grid_step,
            ..Default::default()
        },
        ..Default::default()
    });
    if let Some(dir) = corpus_dir {
        let entries = std::fs::read_dir(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
        for entry in entries {
            let path = entry.map_err(|e| Failure::Io(dir.to_path_buf(), e))?.path();
            if ImageFormat::from_extension(&path).is_none() {
                continue;
            }
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            state.sessions().insert_pinned(stem, decode_image(&path)?);
        }
        tracing::info!("preloaded {} images", state.sessions().len());
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Other(e.to_string()))?;
    runtime
        .block_on(faircrop_service::serve(addr, state))
        .map_err(|e| Failure::Other(format!("server on {addr}: {e}")))?;
    Ok(Outcome::Done)
}

#[allow(clippy::too_many_arguments)]
pub fn synth(
    global: &Global,
    out_dir: &Path,
    groups: &GroupSpecs,
    background: u8,
    torso_luma: Option<u8>,
    patch_luma: Option<u8>,
    width: u32,
    height: u32,
    noise: u8,
) -> CmdResult {
    let params = SyntheticParams {
        groups: groups
            .0
            .iter()
            .map(|(id, luma, n)| SyntheticGroup::new(id.clone(), *luma, *n))
            .collect(),
        background_luma: background,
        torso_luma,
        patch_luma,
        width,
        height,
        noise,
        seed: global.seed(),
    };
    let corpus = synthetic_corpus(&params)?;
    let manifest = corpus.write_to_dir(out_dir)?;
    eprintln!("wrote {} images and {}", corpus.images.len(), manifest.display());
    Ok(Outcome::Done)
}
