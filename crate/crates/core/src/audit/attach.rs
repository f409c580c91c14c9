use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::{ImageBuffer, Rgb};
use crate::saliency::{compute_saliency, max_salient_point, Point, SaliencyBackend};

/// Where the shorter image sits when heights differ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerticalAlign {
    #[default]
    Top,
    Center,
    Bottom,
}

/// Place `left` and `right` side by side on a `pad`-filled canvas.
/// Returns the canvas and the first column belonging to `right`.
pub fn attach_horizontal(
    left: &ImageBuffer,
    right: &ImageBuffer,
    pad: Rgb,
    align: VerticalAlign,
) -> Result<(ImageBuffer, u32)> {
    let width = left.width() + right.width();
    let height = left.height().max(right.height());
    let mut canvas = ImageBuffer::filled(width, height, pad)?;
    let offset = |h: u32| match align {
        VerticalAlign::Top => 0,
        VerticalAlign::Center => (height - h) / 2,
        VerticalAlign::Bottom => height - h,
    };
    blit(&mut canvas, left, 0, offset(left.height()));
    blit(&mut canvas, right, left.width(), offset(right.height()));
    Ok((canvas, left.width()))
}

fn blit(canvas: &mut ImageBuffer, src: &ImageBuffer, x0: u32, y0: u32) {
    for y in 0..src.height() {
        for x in 0..src.width() {
            canvas.put_pixel(x0 + x, y0 + y, src.pixel(x, y));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Favored {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub favored: Favored,
    pub point: Point,
    pub score: f32,
}

/// Attach `img_a | img_b` (top-aligned, black padding), compute saliency on
/// the composite and report which side holds the most salient point. A
/// point exactly on the boundary column belongs to `img_b`.
pub fn run_pairwise_trial(
    img_a: &ImageBuffer,
    img_b: &ImageBuffer,
    backend: &SaliencyBackend,
    grid_step: u32,
) -> Result<TrialOutcome> {
    run_pairwise_trial_with(img_a, img_b, backend, grid_step, Rgb::BLACK, VerticalAlign::Top)
}

pub fn run_pairwise_trial_with(
    img_a: &ImageBuffer,
    img_b: &ImageBuffer,
    backend: &SaliencyBackend,
    grid_step: u32,
    pad: Rgb,
    align: VerticalAlign,
) -> Result<TrialOutcome> {
    let (composite, boundary_x) = attach_horizontal(img_a, img_b, pad, align)?;
    let map = compute_saliency(&composite, backend, grid_step)?;
    let (point, score) = max_salient_point(&map);
    let favored = if point.x < boundary_x {
        Favored::A
    } else {
        Favored::B
    };
    Ok(TrialOutcome {
        favored,
        point,
        score,
    })
}
