use std::cmp::Ordering;

use super::{AspectRatio, CropRect, CropSpec};
use crate::error::{Error, Result};
use crate::image::Rgb;
use crate::saliency::Point;

/// `round(a / b)` with halves rounded up.
fn div_round(a: u64, b: u64) -> u64 {
    (2 * a + b) / (2 * b)
}

/// Size of the largest `ar`-shaped rectangle that keeps one full dimension.
fn crop_dims(source_w: u32, source_h: u32, ar: AspectRatio) -> Result<(u32, u32)> {
    if source_w == 0 || source_h == 0 {
        return Err(Error::InvalidParameter(format!(
            "source {source_w}x{source_h} has zero area"
        )));
    }
    let (num, den) = (ar.num() as u64, ar.den() as u64);
    let (w, h) = match ar.cmp_dims(source_w, source_h) {
        Ordering::Equal => (source_w as u64, source_h as u64),
        // narrower than the source: keep the height
        Ordering::Less => (div_round(source_h as u64 * num, den), source_h as u64),
        Ordering::Greater => (source_w as u64, div_round(source_w as u64 * den, num)),
    };
    if w == 0 || h == 0 {
        return Err(Error::DegenerateCrop {
            ar: ar.to_string(),
            width: source_w,
            height: source_h,
        });
    }
    Ok((w as u32, h as u32))
}

/// Crop to `ar` along a single dimension, centred on `focal` and clamped to
/// the image. The focal point is always inside the result.
pub fn crop_around_focal(
    source_w: u32,
    source_h: u32,
    focal: Point,
    ar: AspectRatio,
) -> Result<CropRect> {
    let (w, h) = crop_dims(source_w, source_h, ar)?;
    if focal.x >= source_w || focal.y >= source_h {
        return Err(Error::InvalidParameter(format!(
            "focal point ({}, {}) outside {source_w}x{source_h} image",
            focal.x, focal.y
        )));
    }
    let place = |center: u32, len: u32, full: u32| -> u32 {
        (center as i64 - (len / 2) as i64).clamp(0, (full - len) as i64) as u32
    };
    Ok(CropRect {
        x: place(focal.x, w, source_w),
        y: place(focal.y, h, source_h),
        w,
        h,
    })
}

/// Crop to `ar` along a single dimension, centred in the image.
pub fn center_crop(source_w: u32, source_h: u32, ar: AspectRatio) -> Result<CropRect> {
    let (w, h) = crop_dims(source_w, source_h, ar)?;
    Ok(CropRect {
        x: (source_w - w) / 2,
        y: (source_h - h) / 2,
        w,
        h,
    })
}

/// Smallest `ar`-shaped canvas holding the unscaled image, image centred
/// (odd padding puts the extra pixel right or below).
pub fn pad_to_aspect(source_w: u32, source_h: u32, ar: AspectRatio, pad_color: Rgb) -> CropSpec {
    let (num, den) = (ar.num() as u64, ar.den() as u64);
    let (canvas_w, canvas_h) = match ar.cmp_dims(source_w, source_h) {
        Ordering::Equal => (source_w, source_h),
        Ordering::Greater => (div_round(source_h as u64 * num, den) as u32, source_h),
        Ordering::Less => (source_w, div_round(source_w as u64 * den, num) as u32),
    };
    CropSpec::Padded {
        canvas_w,
        canvas_h,
        image_offset_x: (canvas_w - source_w) / 2,
        image_offset_y: (canvas_h - source_h) / 2,
        pad_color,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ar(n: u32, d: u32) -> AspectRatio {
        AspectRatio::new(n, d).unwrap()
    }

    fn rect(x: u32, y: u32, w: u32, h: u32) -> CropRect {
        CropRect { x, y, w, h }
    }

    #[test]
    fn centred_square() {
        let r = crop_around_focal(1000, 500, Point::new(500, 250), ar(1, 1)).unwrap();
        assert_eq!(r, rect(250, 0, 500, 500));
    }

    #[test]
    fn clamped_left() {
        // x = 10 - 250 < 0 -> 0
        let r = crop_around_focal(1000, 500, Point::new(10, 250), ar(1, 1)).unwrap();
        assert_eq!(r, rect(0, 0, 500, 500));
    }

    #[test]
    fn clamped_bottom() {
        // y = 980 - 250 = 730 > 1000 - 500 -> 500
        let r = crop_around_focal(500, 1000, Point::new(250, 980), ar(1, 1)).unwrap();
        assert_eq!(r, rect(0, 500, 500, 500));
    }

    #[test]
    fn matching_ratio_is_full_image() {
        let r = crop_around_focal(1600, 900, Point::new(3, 3), ar(16, 9)).unwrap();
        assert_eq!(r, rect(0, 0, 1600, 900));
    }

    #[test]
    fn rounding_half_up() {
        // 3 * 1/2 = 1.5 -> 2
        let r = center_crop(10, 3, ar(1, 2)).unwrap();
        assert_eq!((r.w, r.h), (2, 3));
    }

    #[test]
    fn degenerate_requests() {
        assert!(matches!(
            crop_around_focal(1, 1000, Point::new(0, 0), ar(1, 5000)),
            Err(Error::DegenerateCrop { .. })
        ));
        assert!(crop_around_focal(10, 10, Point::new(10, 0), ar(1, 1)).is_err());
    }

    #[test]
    fn padding_examples() {
        let pad = |w, h, a| match pad_to_aspect(w, h, a, Rgb::BLACK) {
            CropSpec::Padded {
                canvas_w,
                canvas_h,
                image_offset_x,
                image_offset_y,
                ..
            } => (canvas_w, canvas_h, image_offset_x, image_offset_y),
            CropSpec::Rect(_) => unreachable!(),
        };
        assert_eq!(pad(400, 200, ar(1, 2)), (400, 800, 0, 300));
        assert_eq!(pad(400, 200, ar(2, 1)), (400, 200, 0, 0));
        assert_eq!(pad(300, 100, ar(1, 1)), (300, 300, 0, 100));
        // odd padding: 3 columns, extra one on the right
        assert_eq!(pad(5, 8, ar(1, 1)), (8, 8, 1, 0));
    }

    fn source_ar(w: u32, h: u32) -> f64 {
        w as f64 / h as f64
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn crop_invariants(
            w in 1u32..4000,
            h in 1u32..4000,
            fx in 0.0f64..1.0,
            fy in 0.0f64..1.0,
            num in 1u32..32,
            den in 1u32..32,
        ) {
            let a = ar(num, den);
            let focal = Point::new((fx * w as f64) as u32, (fy * h as f64) as u32);
            match crop_around_focal(w, h, focal, a) {
                Ok(r) => {
                    prop_assert!(r.x + r.w <= w && r.y + r.h <= h && r.w >= 1 && r.h >= 1);
                    prop_assert!(r.contains(focal));
                    prop_assert!(r.w == w || r.h == h);
                    if r.w == w && r.h == h {
                        // only a matching ratio, or rounding within half a pixel, keeps everything
                        prop_assert!((source_ar(w, h) - a.value()).abs() <= 0.5 * a.value().max(1.0) / h as f64);
                    }
                    let err = (r.w as f64 / r.h as f64 - a.value()).abs();
                    let bound = if r.h == h { 0.5 / h as f64 } else { 0.5 * a.value() / r.h as f64 };
                    prop_assert!(err <= bound + 1e-12, "err {} bound {}", err, bound);
                }
                Err(Error::DegenerateCrop { .. }) => {
                    prop_assert!(h as f64 * a.value() < 0.5 || w as f64 / a.value() < 0.5);
                }
                Err(e) => prop_assert!(false, "{}", e),
            }
        }

        #[test]
        fn padding_keeps_every_pixel(
            w in 1u32..4000,
            h in 1u32..4000,
            num in 1u32..32,
            den in 1u32..32,
        ) {
            let a = ar(num, den);
            let CropSpec::Padded { canvas_w, canvas_h, image_offset_x, image_offset_y, .. } =
                pad_to_aspect(w, h, a, Rgb::BLACK) else { unreachable!() };
            prop_assert!(image_offset_x + w <= canvas_w && image_offset_y + h <= canvas_h);
            prop_assert!(canvas_w == w || canvas_h == h);
            let err = (canvas_w as f64 / canvas_h as f64 - a.value()).abs();
            prop_assert!(err <= 0.5 * a.value().max(1.0) / canvas_h as f64 + 1e-12);
        }
    }
}
