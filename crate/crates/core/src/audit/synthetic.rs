//! Generated figure corpora: an elliptical head over a torso rectangle on a
//! flat background, with per-group luma and an optional bright patch on the
//! torso (a stand-in for a jersey number).

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{encode_image, write_atomic, Corpus, CorpusManifest, ImageFormat, ManifestEntry, SubgroupDef};
use crate::error::{Error, Result};
use crate::image::{ImageBuffer, Rgb};
use crate::rng::{derive_seed, DetRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticGroup {
    pub id: String,
    pub figure_luma: u8,
    pub n: usize,
    /// Overrides [`SyntheticParams::patch_luma`] for this group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch_luma: Option<u8>,
}

impl SyntheticGroup {
    pub fn new(id: impl Into<String>, figure_luma: u8, n: usize) -> Self {
        SyntheticGroup {
            id: id.into(),
            figure_luma,
            n,
            patch_luma: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub groups: Vec<SyntheticGroup>,
    pub background_luma: u8,
    /// Torso luma; `None` paints the torso in the figure's own luma.
    #[serde(default)]
    pub torso_luma: Option<u8>,
    /// Luma of a patch drawn on the torso; `None` draws no patch.
    #[serde(default)]
    pub patch_luma: Option<u8>,
    pub width: u32,
    pub height: u32,
    /// Per-pixel uniform noise amplitude, in luma levels.
    pub noise: u8,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            groups: Vec::new(),
            background_luma: 20,
            torso_luma: None,
            patch_luma: None,
            width: 96,
            height: 160,
            noise: 4,
            seed: 0,
        }
    }
}

/// Generated images plus the manifest describing them. Image `k` of group
/// `g` has id `"{g}-{k:04}"` and path `"{id}.png"`.
#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub manifest: CorpusManifest,
    pub images: HashMap<String, ImageBuffer>,
}

impl SyntheticCorpus {
    pub fn into_corpus(self) -> Result<Corpus> {
        Corpus::from_parts(self.manifest, self.images)
    }

    /// Write every image as PNG plus `manifest.jsonl` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for entry in &self.manifest.entries {
            encode_image(&self.images[&entry.image_id], &dir.join(&entry.path), ImageFormat::Png)?;
        }
        let path = dir.join("manifest.jsonl");
        write_atomic(&path, self.manifest.to_jsonl().as_bytes())?;
        Ok(path)
    }
}

/// Where each part of one figure went, in pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureLayout {
    pub head_center: (f64, f64),
    pub head_radii: (f64, f64),
    /// Padded bounding box of the head ellipse, `(x, y, w, h)`.
    pub head_box: (u32, u32, u32, u32),
    /// `(x0, y0, x1, y1)`, exclusive upper bounds.
    pub torso: (u32, u32, u32, u32),
    pub patch: Option<(u32, u32, u32, u32)>,
}

/// Margin added around the head ellipse when recording its box.
const HEAD_BOX_MARGIN: f64 = 4.0;

fn jitter(rng: &mut DetRng, spread: f64) -> f64 {
    (rng.unit_f64() * 2.0 - 1.0) * spread
}

fn layout(width: u32, height: u32, with_patch: bool, rng: &mut DetRng) -> FigureLayout {
    let (w, h) = (width as f64, height as f64);
    let rx = w * 0.15 * (1.0 + jitter(rng, 0.1));
    let ry = rx * 1.2;
    let cx = w / 2.0 + jitter(rng, w * 0.1);
    let cy = h * 0.08 + ry + jitter(rng, h * 0.02).abs();

    let bx0 = (cx - rx - HEAD_BOX_MARGIN).floor().max(0.0);
    let by0 = (cy - ry - HEAD_BOX_MARGIN).floor().max(0.0);
    let bx1 = (cx + rx + HEAD_BOX_MARGIN).ceil().min(w);
    let by1 = (cy + ry + HEAD_BOX_MARGIN).ceil().min(h);

    let half = w * 0.275;
    let tx0 = (cx - half).round().max(0.0) as u32;
    let tx1 = ((cx + half).round() as u32).min(width);
    let ty0 = ((cy + ry + h * 0.15).round() as u32).min(height);
    let ty1 = ((h * 0.95).round() as u32).max(ty0);

    let patch = with_patch.then(|| {
        let pw = (w * 0.2).round() as u32;
        let ph = (h * 0.1).round() as u32;
        let px = (tx0 + tx1) / 2 - pw / 2;
        let py = (ty0 + ty1) / 2 - ph / 2;
        (px, py, px + pw, py + ph)
    });

    FigureLayout {
        head_center: (cx, cy),
        head_radii: (rx, ry),
        head_box: (bx0 as u32, by0 as u32, (bx1 - bx0) as u32, (by1 - by0) as u32),
        torso: (tx0, ty0, tx1, ty1),
        patch,
    }
}

/// Paint one figure of `group`; returns the image and where its parts are.
pub fn render_figure(
    params: &SyntheticParams,
    group: &SyntheticGroup,
    seed: u64,
) -> Result<(ImageBuffer, FigureLayout)> {
    let (width, height) = (params.width, params.height);
    let figure_luma = group.figure_luma;
    let patch_luma = group.patch_luma.or(params.patch_luma);
    let noise = params.noise;
    if width < 16 || height < 32 {
        return Err(Error::InvalidParameter(format!(
            "synthetic figures need at least 16x32 pixels, got {width}x{height}"
        )));
    }
    let mut rng = DetRng::new(seed);
    let fig = layout(width, height, patch_luma.is_some(), &mut rng);
    let torso_luma = params.torso_luma.unwrap_or(figure_luma);
    let inside = |x: u32, y: u32, r: (u32, u32, u32, u32)| x >= r.0 && x < r.2 && y >= r.1 && y < r.3;

    let img = ImageBuffer::from_fn(width, height, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let dx = (px - fig.head_center.0) / fig.head_radii.0;
        let dy = (py - fig.head_center.1) / fig.head_radii.1;
        let base = match (fig.patch, patch_luma) {
            (Some(p), Some(l)) if inside(x, y, p) => l,
            _ if dx * dx + dy * dy <= 1.0 => figure_luma,
            _ if inside(x, y, fig.torso) => torso_luma,
            _ => params.background_luma,
        };
        let v = if noise == 0 {
            base as i32
        } else {
            base as i32 + rng.below(2 * noise as usize + 1) as i32 - noise as i32
        };
        Rgb::gray(v.clamp(0, 255) as u8)
    })?;
    Ok((img, fig))
}

/// Generate a figure corpus. Image `k` overall (groups in order) is drawn
/// from seed `derive_seed(params.seed, k)`, so output depends only on params.
pub fn synthetic_corpus(params: &SyntheticParams) -> Result<SyntheticCorpus> {
    let mut entries = Vec::new();
    let mut images = HashMap::new();
    let mut defs = Vec::new();
    let mut k = 0u64;
    for group in &params.groups {
        if group.id.is_empty() {
            return Err(Error::InvalidParameter("group id must not be empty".into()));
        }
        if defs.iter().any(|d: &SubgroupDef| d.id == group.id) {
            return Err(Error::InvalidParameter(format!("duplicate group id {:?}", group.id)));
        }
        let patch = group.patch_luma.or(params.patch_luma);
        for i in 0..group.n {
            let (img, fig) = render_figure(params, group, derive_seed(params.seed, k))?;
            k += 1;
            let id = format!("{}-{i:04}", group.id);
            let mut attributes = BTreeMap::new();
            attributes.insert("group".to_string(), group.id.clone());
            attributes.insert("figure_luma".to_string(), group.figure_luma.to_string());
            attributes.insert("patch".to_string(), patch.is_some().to_string());
            entries.push(ManifestEntry {
                image_id: id.clone(),
                path: PathBuf::from(format!("{id}.png")),
                attributes,
                head_box: Some(fig.head_box),
                saliency_path: None,
                line: 0,
            });
            images.insert(id, img);
        }
        defs.push(SubgroupDef {
            id: group.id.clone(),
            predicate: BTreeMap::from([("group".to_string(), group.id.clone())]),
        });
    }
    Ok(SyntheticCorpus {
        manifest: CorpusManifest::from_parts(entries, defs, PathBuf::from(".")),
        images,
    })
}
