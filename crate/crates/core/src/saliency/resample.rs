/// Bilinear resampling of a row-major `src_w`x`src_h` grid to `dst_w`x`dst_h`.
///
/// Destination cell centres are mapped onto source coordinates with the
/// half-pixel convention and clamped to the source edge.
pub fn resample_bilinear(src: &[f64], src_w: u32, src_h: u32, dst_w: u32, dst_h: u32) -> Vec<f64> {
    debug_assert_eq!(src.len(), src_w as usize * src_h as usize);
    let sw = src_w as usize;
    let coords = |n_dst: u32, n_src: u32| -> Vec<(usize, usize, f64)> {
        (0..n_dst)
            .map(|d| {
                let s = ((d as f64 + 0.5) * n_src as f64 / n_dst as f64 - 0.5)
                    .clamp(0.0, (n_src - 1) as f64);
                let lo = s.floor() as usize;
                let hi = (lo + 1).min(n_src as usize - 1);
                (lo, hi, s - lo as f64)
            })
            .collect()
    };
    let xs = coords(dst_w, src_w);
    let ys = coords(dst_h, src_h);
    let mut out = Vec::with_capacity(dst_w as usize * dst_h as usize);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let top = src[y0 * sw + x0] * (1.0 - fx) + src[y0 * sw + x1] * fx;
            let bottom = src[y1 * sw + x0] * (1.0 - fx) + src[y1 * sw + x1] * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    out
}
