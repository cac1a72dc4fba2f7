//! Netpbm PPM (P3/P6) and PGM (P2/P5) with 8-bit samples.

use crate::error::{Error, Result};
use crate::raster::RgbRaster;

struct Header {
    magic: u8,
    width: usize,
    height: usize,
    maxval: u32,
    /// Offset of the first byte after the header.
    data_start: usize,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            let reason = if start >= self.bytes.len() {
                format!("unexpected end of file while reading {what}")
            } else {
                format!("expected {what}, found byte {:#04x}", self.bytes[start])
            };
            return Err(Error::corrupt(start as u64, reason));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::corrupt(start as u64, format!("{what} out of range")))
    }
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::UnsupportedFormat("not a netpbm file".into()));
    }
    let magic = bytes[1];
    if !matches!(magic, b'2' | b'3' | b'5' | b'6') {
        return Err(Error::UnsupportedFormat(format!(
            "netpbm variant P{} (only P2, P3, P5, P6 are read)",
            char::from(magic)
        )));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::corrupt(None, format!("empty image {width}x{height}")));
    }
    if maxval == 0 {
        return Err(Error::corrupt(maxval_at as u64, "maxval is zero"));
    }
    if maxval > 255 {
        return Err(Error::BitDepthUnsupported(16));
    }
    // Binary rasters start after exactly one whitespace byte.
    let data_start = match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos + 1,
        Some(_) => {
            return Err(Error::corrupt(cur.pos as u64, "missing whitespace after maxval"))
        }
        None => cur.pos,
    };
    Ok(Header {
        magic,
        width,
        height,
        maxval: maxval as u32,
        data_start,
    })
}

fn rescale(v: u64, maxval: u32, offset: usize) -> Result<u8> {
    if v > u64::from(maxval) {
        return Err(Error::corrupt(
            offset as u64,
            format!("sample {v} exceeds maxval {maxval}"),
        ));
    }
    if maxval == 255 {
        Ok(v as u8)
    } else {
        Ok(((v as f64) * 255.0 / f64::from(maxval)).round() as u8)
    }
}

pub(crate) fn decode(bytes: &[u8]) -> Result<RgbRaster> {
    let h = parse_header(bytes)?;
    let channels = if matches!(h.magic, b'3' | b'6') { 3 } else { 1 };
    let count = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::corrupt(None, "dimensions overflow"))?;

    let mut samples = Vec::with_capacity(count);
    if matches!(h.magic, b'5' | b'6') {
        let available = bytes.len().saturating_sub(h.data_start);
        if available < count {
            return Err(Error::corrupt(
                bytes.len() as u64,
                format!("raster truncated: expected {count} bytes, found {available}"),
            ));
        }
        for (i, &b) in bytes[h.data_start..h.data_start + count].iter().enumerate() {
            samples.push(rescale(u64::from(b), h.maxval, h.data_start + i)?);
        }
    } else {
        let mut cur = Cursor {
            bytes,
            pos: h.data_start,
        };
        for _ in 0..count {
            let at = cur.pos;
            let v = cur.number("sample")?;
            samples.push(rescale(v, h.maxval, at)?);
        }
    }

    if channels == 1 {
        RgbRaster::from_luma(h.width, h.height, &samples)
    } else {
        RgbRaster::new(h.width, h.height, samples)
    }
}

/// Binary PGM (P5) with maxval 255.
pub(crate) fn encode_pgm(width: usize, height: usize, luma: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(luma);
    out
}
