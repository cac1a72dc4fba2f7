use std::io::Cursor;

use log::warn;
use png::{BitDepth, ColorType, Decoder, Encoder, Transformations};

use crate::error::{Error, Result};
use crate::raster::RgbRaster;

fn decoding_error(err: png::DecodingError) -> Error {
    match err {
        png::DecodingError::IoError(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            Error::corrupt(None, "PNG stream truncated")
        }
        png::DecodingError::IoError(e) => Error::Io(e),
        png::DecodingError::Format(e) => Error::corrupt(None, e.to_string()),
        png::DecodingError::Parameter(e) => Error::corrupt(None, e.to_string()),
        png::DecodingError::LimitsExceeded => Error::corrupt(None, "PNG exceeds decoder limits"),
    }
}

pub(crate) fn decode(bytes: &[u8]) -> Result<RgbRaster> {
    let mut decoder = Decoder::new(Cursor::new(bytes));
    // Palettes and sub-byte grayscale expand to 8-bit samples; 16-bit stays
    // 16-bit and is rejected below.
    decoder.set_transformations(Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(decoding_error)?;
    if reader.info().bit_depth == BitDepth::Sixteen {
        return Err(Error::BitDepthUnsupported(16));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::corrupt(None, "PNG dimensions overflow"))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(decoding_error)?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    let data = &buf[..frame.buffer_size()];
    let rows = data.chunks_exact(frame.line_size);

    let mut rgb = Vec::with_capacity(width * height * 3);
    match frame.color_type {
        ColorType::Grayscale => {
            for row in rows {
                rgb.extend(row[..width].iter().flat_map(|&v| [v, v, v]));
            }
        }
        ColorType::GrayscaleAlpha => {
            warn!("dropping PNG alpha channel");
            for row in rows {
                rgb.extend(row[..2 * width].chunks_exact(2).flat_map(|p| [p[0], p[0], p[0]]));
            }
        }
        ColorType::Rgb => {
            for row in rows {
                rgb.extend_from_slice(&row[..3 * width]);
            }
        }
        ColorType::Rgba => {
            warn!("dropping PNG alpha channel");
            for row in rows {
                rgb.extend(row[..4 * width].chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]));
            }
        }
        ColorType::Indexed => {
            return Err(Error::UnsupportedFormat("unexpanded indexed PNG".into()));
        }
    }
    RgbRaster::new(width, height, rgb)
}

/// 8-bit grayscale PNG.
pub(crate) fn encode_gray(width: usize, height: usize, luma: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let (w, h) = match (u32::try_from(width), u32::try_from(height)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => return Err(Error::InvalidRaster("raster too large for PNG".into())),
    };
    let mut encoder = Encoder::new(&mut out, w, h);
    encoder.set_color(ColorType::Grayscale);
    encoder.set_depth(BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::Serialize(e.to_string()))?;
    writer
        .write_image_data(luma)
        .map_err(|e| Error::Serialize(e.to_string()))?;
    writer.finish().map_err(|e| Error::Serialize(e.to_string()))?;
    Ok(out)
}
