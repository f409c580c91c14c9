use crate::image::ImageBuffer;

/// Population variance of luma in a `(2r + 1)`-pixel square window around
/// each cell centre, clipped to the image.
///
/// Luma is kept in integer thousandths and the window sums come from
/// integral images, so the variance numerator `n * sum(x^2) - sum(x)^2` is
/// exact. A flat window scores exactly zero.
pub(super) fn windowed_variance(image: &ImageBuffer, grid_w: u32, grid_h: u32, radius: u32) -> Vec<f32> {
    let w = image.width() as usize;
    let h = image.height() as usize;
    let luma = image.luma_milli();

    let stride = w + 1;
    let mut sum = vec![0u64; stride * (h + 1)];
    let mut sq = vec![0u128; stride * (h + 1)];
    for y in 0..h {
        let mut row_sum = 0u64;
        let mut row_sq = 0u128;
        for x in 0..w {
            let v = luma[y * w + x] as u64;
            row_sum += v;
            row_sq += (v * v) as u128;
            sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row_sum;
            sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + row_sq;
        }
    }

    let r = radius as i64;
    let mut out = Vec::with_capacity(grid_w as usize * grid_h as usize);
    for j in 0..grid_h {
        let cy = ((j as f64 + 0.5) * h as f64 / grid_h as f64).floor() as i64;
        let y0 = (cy - r).max(0) as usize;
        let y1 = ((cy + r) as usize).min(h - 1) + 1;
        for i in 0..grid_w {
            let cx = ((i as f64 + 0.5) * w as f64 / grid_w as f64).floor() as i64;
            let x0 = (cx - r).max(0) as usize;
            let x1 = ((cx + r) as usize).min(w - 1) + 1;

            let n = ((x1 - x0) * (y1 - y0)) as u128;
            let s = (sum[y1 * stride + x1] + sum[y0 * stride + x0]
                - sum[y0 * stride + x1]
                - sum[y1 * stride + x0]) as u128;
            let q = sq[y1 * stride + x1] + sq[y0 * stride + x0]
                - sq[y0 * stride + x1]
                - sq[y1 * stride + x0];
            let numer = n * q - s * s;
            let var = numer as f64 / (n * n) as f64 / 1e6;
            out.push(var as f32);
        }
    }
    out
}
