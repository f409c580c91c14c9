use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 8-bit RGB colour.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const BLACK: Rgb = Rgb([0, 0, 0]);
    pub const WHITE: Rgb = Rgb([255, 255, 255]);

    pub fn gray(v: u8) -> Rgb {
        Rgb([v, v, v])
    }
}

/// Decoded RGB raster, row-major, three bytes per pixel.
#[derive(Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl std::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "zero-area image {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "raster has {} bytes, expected {expected} for {width}x{height} RGB",
                data.len()
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, color: Rgb) -> Result<Self> {
        let n = width as usize * height as usize;
        let mut data = Vec::with_capacity(n * 3);
        for _ in 0..n {
            data.extend_from_slice(&color.0);
        }
        ImageBuffer::new(width, height, data)
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Rgb) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y).0);
            }
        }
        ImageBuffer::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        Rgb([self.data[i], self.data[i + 1], self.data[i + 2]])
    }

    pub fn put_pixel(&mut self, x: u32, y: u32, color: Rgb) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.data[i..i + 3].copy_from_slice(&color.0);
    }

    /// Luma in thousandths of a grey level, using BT.601 integer weights
    /// (299, 587, 114). Exact, so windowed statistics stay reproducible.
    pub fn luma_milli(&self) -> Vec<u32> {
        self.data
            .chunks_exact(3)
            .map(|p| 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32)
            .collect()
    }

    /// Luma in grey levels `[0, 255]`.
    pub fn luma(&self) -> Vec<f64> {
        self.luma_milli()
            .into_iter()
            .map(|v| v as f64 / 1000.0)
            .collect()
    }

    /// Copy of the `w`x`h` sub-image at `(x, y)`. The rectangle must lie inside.
    pub fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> Result<ImageBuffer> {
        if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop ({x}, {y}, {w}, {h}) outside {}x{} image",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(w as usize * h as usize * 3);
        let stride = self.width as usize * 3;
        for row in y..y + h {
            let start = row as usize * stride + x as usize * 3;
            data.extend_from_slice(&self.data[start..start + w as usize * 3]);
        }
        ImageBuffer::new(w, h, data)
    }

    /// Resize to the given dimensions with bilinear (triangle) filtering.
    pub fn resize(&self, width: u32, height: u32) -> Result<ImageBuffer> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "cannot resize to {width}x{height}"
            )));
        }
        let resized = image::imageops::resize(
            &self.to_rgb_image(),
            width,
            height,
            image::imageops::FilterType::Triangle,
        );
        Ok(ImageBuffer::from(resized))
    }

    /// Resize to `height`, keeping the aspect ratio (width rounded, at least 1).
    pub fn resize_to_height(&self, height: u32) -> Result<ImageBuffer> {
        let width = ((self.width as f64 * height as f64 / self.height as f64).round() as u32).max(1);
        self.resize(width, height)
    }

    pub fn to_rgb_image(&self) -> image::RgbImage {
        image::RgbImage::from_raw(self.width, self.height, self.data.clone())
            .expect("raster length is validated on construction")
    }
}

impl From<image::RgbImage> for ImageBuffer {
    fn from(img: image::RgbImage) -> Self {
        let (width, height) = img.dimensions();
        ImageBuffer {
            width,
            height,
            data: img.into_raw(),
        }
    }
}
