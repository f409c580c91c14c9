//! Portable FloatMap (greyscale `Pf`) reading and writing.
//!
//! Layout: `Pf\n<width> <height>\n<scale>\n` followed by `width * height`
//! 32-bit floats, bottom row first. A negative scale means little-endian.
//! Writing always emits `-1.0` and little-endian data.

use std::path::Path;

use crate::error::{Error, Result};
use crate::saliency::SaliencyMap;

/// Raw float grid as stored on disk, top row first in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatGrid {
    pub width: u32,
    pub height: u32,
    pub values: Vec<f32>,
}

impl FloatGrid {
    pub fn from_map(map: &SaliencyMap) -> Self {
        FloatGrid {
            width: map.grid_w(),
            height: map.grid_h(),
            values: map.scores().to_vec(),
        }
    }

    /// Interpret as a saliency map over a `source_w`x`source_h` image.
    pub fn into_map(self, source_w: u32, source_h: u32) -> Result<SaliencyMap> {
        SaliencyMap::new(self.width, self.height, self.values, source_w, source_h)
    }
}

pub fn encode_pfm(grid: &FloatGrid) -> Vec<u8> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", grid.width, grid.height).into_bytes();
    out.reserve(grid.values.len() * 4);
    let w = grid.width as usize;
    for row in grid.values.chunks_exact(w).rev() {
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_pfm(bytes: &[u8]) -> Result<FloatGrid> {
    let mut pos = 0;
    let mut token = || -> Result<&str> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::FloatMap("truncated header".into()));
        }
        std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| Error::FloatMap("header is not ASCII".into()))
    };

    match token()? {
        "Pf" => {}
        "PF" => return Err(Error::FloatMap("colour PFM is not supported".into())),
        other => return Err(Error::FloatMap(format!("bad magic {other:?}"))),
    }
    let parse_dim = |s: &str| -> Result<u32> {
        s.parse::<u32>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::FloatMap(format!("bad dimension {s:?}")))
    };
    let width = parse_dim(token()?)?;
    let height = parse_dim(token()?)?;
    let scale: f32 = token()?
        .parse()
        .map_err(|_| Error::FloatMap("bad scale".into()))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::FloatMap(format!("bad scale {scale}")));
    }
    let little_endian = scale < 0.0;
    // exactly one whitespace byte separates the header from the data
    let data = bytes
        .get(pos + 1..)
        .ok_or_else(|| Error::FloatMap("missing data".into()))?;
    let n = width as usize * height as usize;
    if data.len() != n * 4 {
        return Err(Error::FloatMap(format!(
            "expected {} data bytes, found {}",
            n * 4,
            data.len()
        )));
    }

    let mut values = vec![0f32; n];
    let w = width as usize;
    for (row_idx, row) in data.chunks_exact(w * 4).enumerate() {
        let y = height as usize - 1 - row_idx;
        for (x, b) in row.chunks_exact(4).enumerate() {
            let b = [b[0], b[1], b[2], b[3]];
            values[y * w + x] = if little_endian {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            };
        }
    }
    Ok(FloatGrid {
        width,
        height,
        values,
    })
}

pub fn read_pfm_file(path: &Path) -> Result<FloatGrid> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pfm(&bytes).map_err(|e| match e {
        Error::FloatMap(msg) => Error::FloatMap(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_pfm_file(path: &Path, grid: &FloatGrid) -> Result<()> {
    std::fs::write(path, encode_pfm(grid)).map_err(|e| Error::io(path, e))
}
