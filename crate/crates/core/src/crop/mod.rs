//! Turning saliency maps into crops.
//!
//! A crop keeps one full dimension of the source and cuts the other down to
//! the target aspect ratio, centred on a focal point and clamped to the
//! image. The focal point comes from a [`CropStrategy`]: plain argmax,
//! sampling in proportion to saliency, averaging, or a user's choice.

mod focal;
mod geometry;
mod pipeline;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Rgb;
use crate::saliency::Point;

pub use focal::{exposure_experiment, select_focal, ExposureTable};
pub use geometry::{center_crop, crop_around_focal, pad_to_aspect};
pub use pipeline::{apply_crop, crop_pipeline, plan_crops, plan_padding, CropParams, CropPlan};

/// Width over height, kept as an integer ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AspectRatio {
    num: u32,
    den: u32,
}

impl AspectRatio {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidParameter(format!(
                "aspect ratio {num}:{den} must have positive terms"
            )));
        }
        Ok(AspectRatio { num, den })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Compare with `w / h` exactly. `Less` means this ratio is narrower.
    pub fn cmp_dims(&self, w: u32, h: u32) -> std::cmp::Ordering {
        (self.num as u64 * h as u64).cmp(&(self.den as u64 * w as u64))
    }
}

impl fmt::Display for AspectRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.num, self.den)
    }
}

impl FromStr for AspectRatio {
    type Err = Error;

    /// Parses `W:H`, e.g. `16:9`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("aspect ratio {s:?} is not W:H"));
        let (w, h) = s.trim().split_once(':').ok_or_else(bad)?;
        let w = w.trim().parse().map_err(|_| bad())?;
        let h = h.trim().parse().map_err(|_| bad())?;
        AspectRatio::new(w, h)
    }
}

impl TryFrom<String> for AspectRatio {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AspectRatio> for String {
    fn from(ar: AspectRatio) -> String {
        ar.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CropRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl CropRect {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x && p.x < self.x + self.w && p.y >= self.y && p.y < self.y + self.h
    }
}

/// Result of cropping for one aspect ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CropSpec {
    Rect(CropRect),
    Padded {
        canvas_w: u32,
        canvas_h: u32,
        image_offset_x: u32,
        image_offset_y: u32,
        pad_color: Rgb,
    },
}

/// How the focal point is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CropStrategy {
    Argmax,
    /// Draw one cell with probability proportional to its score.
    Sampling { seed: u64 },
    /// Score-weighted centroid of all cells.
    WeightedAverage,
    /// Unweighted centroid of the top-k suppressed points.
    TopKAverage { k: usize },
    UserFocal { point: Point },
    /// Skip saliency and pad the whole image to the target ratio.
    PadNoCrop { pad_color: Rgb },
}

impl CropStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            CropStrategy::Argmax => "argmax",
            CropStrategy::Sampling { .. } => "sampling",
            CropStrategy::WeightedAverage => "weighted_average",
            CropStrategy::TopKAverage { .. } => "top_k_average",
            CropStrategy::UserFocal { .. } => "user_focal",
            CropStrategy::PadNoCrop { .. } => "pad",
        }
    }
}
