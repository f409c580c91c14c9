//! Spectral-residual saliency.
//!
//! Grey image, downscaled so its longest side is `resolution` pixels. In the
//! frequency domain the log-amplitude spectrum minus its 3x3 local mean is
//! the "residual"; transforming the residual back with the original phase
//! and squaring the magnitude gives a conspicuity map, which is smoothed
//! and resampled onto the saliency grid.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::resample::resample_bilinear;
use crate::image::ImageBuffer;

pub(super) const DEFAULT_RESOLUTION: u32 = 64;
pub(super) const DEFAULT_SIGMA: f64 = 2.5;

// Floor under the amplitude spectrum so flat regions have a finite log.
const AMPLITUDE_FLOOR: f64 = 1e-12;

pub(super) fn spectral_residual(
    image: &ImageBuffer,
    resolution: u32,
    sigma: f64,
    grid_w: u32,
    grid_h: u32,
) -> Vec<f32> {
    let (w, h) = (image.width(), image.height());
    let scale = resolution as f64 / w.max(h) as f64;
    let iw = ((w as f64 * scale).round() as u32).max(1);
    let ih = ((h as f64 * scale).round() as u32).max(1);
    let grey = resample_bilinear(&image.luma(), w, h, iw, ih);

    let conspicuity = residual_map(&grey, iw as usize, ih as usize);
    let smoothed = gaussian_blur(&conspicuity, iw as usize, ih as usize, sigma);
    resample_bilinear(&smoothed, iw, ih, grid_w, grid_h)
        .into_iter()
        .map(|v| v.max(0.0) as f32)
        .collect()
}

/// Squared magnitude of the inverse transform of `exp(residual + i * phase)`.
fn residual_map(grey: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut spectrum: Vec<Complex64> = grey.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    fft_2d(&mut planner, &mut spectrum, w, h, false);

    let log_amp: Vec<f64> = spectrum
        .iter()
        .map(|c| c.norm().max(AMPLITUDE_FLOOR).ln())
        .collect();
    let local_mean = box_filter_3x3_periodic(&log_amp, w, h);

    for (k, c) in spectrum.iter_mut().enumerate() {
        let residual = log_amp[k] - local_mean[k];
        *c = Complex64::from_polar(residual.exp(), c.arg());
    }
    fft_2d(&mut planner, &mut spectrum, w, h, true);

    let norm = (w * h) as f64;
    spectrum.iter().map(|c| (c / norm).norm_sqr()).collect()
}

fn fft_2d(planner: &mut FftPlanner<f64>, data: &mut [Complex64], w: usize, h: usize, inverse: bool) {
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
    } else {
        (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
    };
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = data[y * w + x];
        }
        col_fft.process(&mut column);
        for y in 0..h {
            data[y * w + x] = column[y];
        }
    }
}

/// 3x3 mean with wrap-around borders; the spectrum is periodic.
fn box_filter_3x3_periodic(src: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in [h - 1, 0, 1] {
                for dx in [w - 1, 0, 1] {
                    acc += src[((y + dy) % h) * w + (x + dx) % w];
                }
            }
            out[y * w + x] = acc / 9.0;
        }
    }
    out
}

/// Separable Gaussian blur, radius `ceil(3 * sigma)`, edge pixels replicated.
fn gaussian_blur(src: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);

    let clamp = |v: i64, n: usize| v.clamp(0, n as i64 - 1) as usize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, weight)| weight * src[y * w + clamp(x as i64 + k as i64 - radius, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, weight)| weight * tmp[clamp(y as i64 + k as i64 - radius, h) * w + x])
                .sum();
        }
    }
    out
}
