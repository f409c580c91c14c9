use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use faircrop_core::audit::{AuditVariant, CiMethod, VerticalAlign};
use faircrop_core::crop::{AspectRatio, CropStrategy};
use faircrop_core::{Point, Rgb, SaliencyBackend};

#[derive(Parser, Debug)]
#[command(name = "faircrop", version, about = "Saliency cropping and crop-fairness audits")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Master seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// spectral | contrast | external:<map.pfm>
    #[arg(long, global = true, default_value = "spectral", value_parser = parse_backend)]
    pub backend: SaliencyBackend,
    /// Saliency grid cell size in pixels.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub grid_step: u32,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Leave timestamps out of reports so reruns are byte-identical.
    #[arg(long, global = true)]
    pub stable_output: bool,
    /// Log more (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl Global {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a saliency map and write it as PFM.
    Saliency {
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a false-colour overlay PNG.
        #[arg(long)]
        heatmap: Option<PathBuf>,
    },
    /// Crop one image to each aspect ratio.
    Crop {
        image: PathBuf,
        /// Target ratio W:H; repeat for several.
        #[arg(long = "ar", required = true, value_parser = parse_ar)]
        ars: Vec<AspectRatio>,
        /// argmax | sampling | weighted | topk[:K] | user:X,Y | pad[:R,G,B]
        #[arg(long, default_value = "argmax")]
        strategy: String,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Pairwise demographic-parity audit between two subgroups.
    Audit(AuditArgs),
    /// Salient regions of one image as JSON.
    Regions {
        image: PathBuf,
        /// Fraction of the map maximum a cell must reach.
        #[arg(long, default_value_t = 0.3)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ECDF of per-image maximum or median saliency over a subgroup.
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        subgroup: String,
        #[arg(long, value_enum, default_value_t = Statistic::Max)]
        statistic: Statistic,
        /// Also report the largest ECDF gap against this subgroup.
        #[arg(long)]
        against: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check whether argmax crops land on the annotated head.
    Gaze {
        #[arg(long)]
        manifest: PathBuf,
        /// JSON gaze config; missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the crop-selection HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Preload every PNG/JPEG here as a session named after its file stem.
        #[arg(long)]
        corpus_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 10 * 1024 * 1024)]
        max_upload_bytes: usize,
        #[arg(long, default_value_t = 3600)]
        ttl_secs: u64,
    },
    /// Generate a synthetic figure corpus.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        /// id:luma:count, comma separated, e.g. light:225:50,dark:60:50
        #[arg(long, value_parser = parse_group_spec)]
        groups: GroupSpecs,
        #[arg(long, default_value_t = 20)]
        background: u8,
        #[arg(long)]
        torso_luma: Option<u8>,
        #[arg(long)]
        patch_luma: Option<u8>,
        #[arg(long, default_value_t = 96)]
        width: u32,
        #[arg(long, default_value_t = 160)]
        height: u32,
        #[arg(long, default_value_t = 4)]
        noise: u8,
    },
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
    pub pair: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// attach | scaled:<height> | noattach
    #[arg(long, default_value = "attach", value_parser = parse_variant)]
    pub variant: AuditVariant,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.95)]
    pub ci_level: f64,
    #[arg(long, value_enum, default_value_t = CiArg::Normal)]
    pub ci: CiArg,
    #[arg(long, value_enum, default_value_t = AlignArg::Top)]
    pub align: AlignArg,
    #[arg(long)]
    pub report: PathBuf,
    /// Per-trial JSON Lines log.
    #[arg(long)]
    pub trial_log: Option<PathBuf>,
    /// CSV of the favoured probability and its interval, for plotting.
    #[arg(long)]
    pub plot_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Statistic {
    Max,
    Median,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CiArg {
    Normal,
    Wilson,
}

impl From<CiArg> for CiMethod {
    fn from(c: CiArg) -> Self {
        match c {
            CiArg::Normal => CiMethod::Normal,
            CiArg::Wilson => CiMethod::Wilson,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AlignArg {
    Top,
    Center,
    Bottom,
}

impl From<AlignArg> for VerticalAlign {
    fn from(a: AlignArg) -> Self {
        match a {
            AlignArg::Top => VerticalAlign::Top,
            AlignArg::Center => VerticalAlign::Center,
            AlignArg::Bottom => VerticalAlign::Bottom,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroupSpecs(pub Vec<(String, u8, usize)>);

pub fn parse_backend(s: &str) -> Result<SaliencyBackend, String> {
    match s {
        "spectral" => Ok(SaliencyBackend::spectral()),
        "contrast" => Ok(SaliencyBackend::contrast()),
        _ => match s.strip_prefix("external:") {
            Some(path) if !path.is_empty() => Ok(SaliencyBackend::external(path)),
            _ => Err(format!("unknown backend {s:?}; expected spectral, contrast or external:<path>")),
        },
    }
}

pub fn parse_ar(s: &str) -> Result<AspectRatio, String> {
    s.parse().map_err(|e: faircrop_core::Error| e.to_string())
}

pub fn parse_variant(s: &str) -> Result<AuditVariant, String> {
    match s {
        "attach" => Ok(AuditVariant::Attach),
        "noattach" => Ok(AuditVariant::NoAttachExhaustive),
        _ => {
            let h = s
                .strip_prefix("scaled:")
                .and_then(|h| h.parse::<u32>().ok())
                .filter(|&h| h > 0)
                .ok_or_else(|| format!("unknown variant {s:?}; expected attach, scaled:<height> or noattach"))?;
            Ok(AuditVariant::AttachScaled { height: h })
        }
    }
}

fn parse_u32_list<const N: usize>(s: &str) -> Option<[u32; N]> {
    let parts: Vec<u32> = s.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    parts.try_into().ok()
}

/// Strategy flag; `seed` feeds the sampling strategy.
pub fn parse_strategy(s: &str, seed: u64) -> Result<CropStrategy, String> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let bad = || format!("bad strategy {s:?}; expected argmax, sampling, weighted, topk[:K], user:X,Y or pad[:R,G,B]");
    match (name, arg) {
        ("argmax", None) => Ok(CropStrategy::Argmax),
        ("sampling", None) => Ok(CropStrategy::Sampling { seed }),
        ("weighted", None) => Ok(CropStrategy::WeightedAverage),
        ("topk", None) => Ok(CropStrategy::TopKAverage { k: 3 }),
        ("topk", Some(k)) => k
            .parse()
            .ok()
            .filter(|&k: &usize| k > 0)
            .map(|k| CropStrategy::TopKAverage { k })
            .ok_or_else(bad),
        ("user", Some(xy)) => parse_u32_list::<2>(xy)
            .map(|[x, y]| CropStrategy::UserFocal { point: Point::new(x, y) })
            .ok_or_else(bad),
        ("pad", None) => Ok(CropStrategy::PadNoCrop { pad_color: Rgb::BLACK }),
        ("pad", Some(rgb)) => parse_u32_list::<3>(rgb)
            .filter(|c| c.iter().all(|&v| v < 256))
            .map(|[r, g, b]| CropStrategy::PadNoCrop {
                pad_color: Rgb([r as u8, g as u8, b as u8]),
            })
            .ok_or_else(bad),
        _ => Err(bad()),
    }
}

pub fn parse_group_spec(s: &str) -> Result<GroupSpecs, String> {
    s.split(',')
        .map(|g| {
            let parts: Vec<&str> = g.split(':').collect();
            match parts.as_slice() {
                [id, luma, n] if !id.is_empty() => Ok((
                    id.to_string(),
                    luma.parse().map_err(|_| format!("bad luma in {g:?}"))?,
                    n.parse().map_err(|_| format!("bad count in {g:?}"))?,
                )),
                _ => Err(format!("group {g:?} is not id:luma:count")),
            }
        })
        .collect::<Result<_, _>>()
        .map(GroupSpecs)
}
