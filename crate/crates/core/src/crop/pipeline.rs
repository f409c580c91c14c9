use serde::{Deserialize, Serialize};

use super::{center_crop, crop_around_focal, pad_to_aspect, select_focal};
use super::{AspectRatio, CropSpec, CropStrategy};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::saliency::{
    compute_saliency, is_horizontally_symmetric, Point, SaliencyBackend, SaliencyMap,
    DEFAULT_GRID_STEP, DEFAULT_MIN_SEP_FRACTION, DEFAULT_SYMMETRY_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CropParams {
    pub grid_step: u32,
    /// Mean mirror difference allowed, as a fraction of the maximum score.
    pub symmetry_tol: f64,
    /// Top-k separation as a fraction of the image diagonal.
    pub min_sep_fraction: f64,
}

impl Default for CropParams {
    fn default() -> Self {
        CropParams {
            grid_step: DEFAULT_GRID_STEP,
            symmetry_tol: DEFAULT_SYMMETRY_TOLERANCE,
            min_sep_fraction: DEFAULT_MIN_SEP_FRACTION,
        }
    }
}

impl CropParams {
    pub fn min_sep_pixels(&self, width: u32, height: u32) -> f64 {
        self.min_sep_fraction * (width as f64).hypot(height as f64)
    }
}

/// What the pipeline decided for one image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CropPlan {
    /// The map was symmetric enough to centre-crop every ratio.
    pub symmetric: bool,
    /// Focal point shared by every ratio; absent for centre and padded crops.
    pub focal: Option<Point>,
    pub specs: Vec<(AspectRatio, CropSpec)>,
}

/// Decide crops for `ars` from an already computed map.
///
/// A horizontally symmetric map gets centre crops whatever the strategy.
/// Otherwise one focal point is chosen and reused for every ratio.
pub fn plan_crops(
    map: &SaliencyMap,
    strategy: &CropStrategy,
    ars: &[AspectRatio],
    params: &CropParams,
) -> Result<CropPlan> {
    if ars.is_empty() {
        return Err(Error::InvalidParameter("no aspect ratios requested".into()));
    }
    let (w, h) = (map.source_w(), map.source_h());
    if let CropStrategy::PadNoCrop { pad_color } = *strategy {
        return Ok(plan_padding(w, h, ars, pad_color));
    }
    if is_horizontally_symmetric(map, params.symmetry_tol) {
        let specs = ars
            .iter()
            .map(|&ar| Ok((ar, CropSpec::Rect(center_crop(w, h, ar)?))))
            .collect::<Result<_>>()?;
        return Ok(CropPlan {
            symmetric: true,
            focal: None,
            specs,
        });
    }
    let focal = select_focal(map, strategy, params)?;
    let specs = ars
        .iter()
        .map(|&ar| Ok((ar, CropSpec::Rect(crop_around_focal(w, h, focal, ar)?))))
        .collect::<Result<_>>()?;
    Ok(CropPlan {
        symmetric: false,
        focal: Some(focal),
        specs,
    })
}

/// Pad-only plan; needs no saliency.
pub fn plan_padding(w: u32, h: u32, ars: &[AspectRatio], pad_color: crate::image::Rgb) -> CropPlan {
    CropPlan {
        symmetric: false,
        focal: None,
        specs: ars
            .iter()
            .map(|&ar| (ar, pad_to_aspect(w, h, ar, pad_color)))
            .collect(),
    }
}

/// Saliency once, then one crop per aspect ratio. Padding skips saliency.
pub fn crop_pipeline(
    image: &ImageBuffer,
    backend: &SaliencyBackend,
    strategy: &CropStrategy,
    ars: &[AspectRatio],
    params: &CropParams,
) -> Result<Vec<CropSpec>> {
    if ars.is_empty() {
        return Err(Error::InvalidParameter("no aspect ratios requested".into()));
    }
    if let CropStrategy::PadNoCrop { pad_color } = *strategy {
        let plan = plan_padding(image.width(), image.height(), ars, pad_color);
        return Ok(plan.specs.into_iter().map(|(_, s)| s).collect());
    }
    let map = compute_saliency(image, backend, params.grid_step)?;
    let plan = plan_crops(&map, strategy, ars, params)?;
    Ok(plan.specs.into_iter().map(|(_, s)| s).collect())
}

/// Pixels for one spec: the cropped sub-image, or the image pasted onto
/// its padded canvas.
pub fn apply_crop(image: &ImageBuffer, spec: &CropSpec) -> Result<ImageBuffer> {
    match *spec {
        CropSpec::Rect(r) => image.crop(r.x, r.y, r.w, r.h),
        CropSpec::Padded {
            canvas_w,
            canvas_h,
            image_offset_x: ox,
            image_offset_y: oy,
            pad_color,
        } => {
            if ox + image.width() > canvas_w || oy + image.height() > canvas_h {
                return Err(Error::InvalidParameter(format!(
                    "{}x{} image does not fit a {canvas_w}x{canvas_h} canvas at ({ox}, {oy})",
                    image.width(),
                    image.height()
                )));
            }
            ImageBuffer::from_fn(canvas_w, canvas_h, |x, y| {
                let inside = x >= ox && y >= oy && x - ox < image.width() && y - oy < image.height();
                if inside {
                    image.pixel(x - ox, y - oy)
                } else {
                    pad_color
                }
            })
        }
    }
}
