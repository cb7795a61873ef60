//! Binary PPM (P6, maxval 255) read/write and 8-bit PNG read.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::raster::RasterImage;
use crate::atomic::write_atomic;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("unsupported bit depth: {0}")]
    UnsupportedBitDepth(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Reads a P6 or PNG file, dispatching on the file's magic bytes.
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage, CodecError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| CodecError::Io {
        path: path.to_owned(),
        source,
    })?;
    decode_image(&bytes)
}

pub(crate) fn decode_image(bytes: &[u8]) -> Result<RasterImage, CodecError> {
    if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.first() == Some(&b'P') {
        Err(CodecError::UnsupportedFormat(
            "only binary P6 PPM is supported".to_owned(),
        ))
    } else {
        Err(CodecError::UnsupportedFormat("not a PPM or PNG file".to_owned()))
    }
}

/// Writes the image as P6 (samples rounded half-up to 8 bits), atomically.
pub fn save_image(image: &RasterImage, path: impl AsRef<Path>) -> Result<(), CodecError> {
    let path = path.as_ref();
    write_atomic(path, &encode_ppm(image)).map_err(|source| CodecError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn encode_ppm(image: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.to_rgb8());
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, CodecError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(CodecError::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| CodecError::MalformedHeader(format!("{what} out of range")))
    }
}

pub fn decode_ppm(bytes: &[u8]) -> Result<RasterImage, CodecError> {
    if !bytes.starts_with(b"P6") {
        return Err(CodecError::MalformedHeader("missing P6 magic".to_owned()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(CodecError::MalformedHeader("missing P6 magic".to_owned()));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(CodecError::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(CodecError::MalformedHeader(format!("invalid maxval {maxval}")));
    }
    if maxval != 255 {
        return Err(CodecError::UnsupportedBitDepth(format!("maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(CodecError::MalformedHeader("no whitespace after maxval".to_owned())),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| CodecError::MalformedHeader("dimensions overflow".to_owned()))?;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(CodecError::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    RasterImage::from_rgb8(width, height, &payload[..expected]).map_err(|e| CodecError::MalformedHeader(e.to_string()))
}

/// Decodes an 8-bit PNG to RGB. Alpha is dropped, gray is replicated to all
/// three channels, palette and sub-byte gray are expanded.
pub fn decode_png(bytes: &[u8]) -> Result<RasterImage, CodecError> {
    use png::{BitDepth, ColorType, Transformations};

    let malformed = |e: png::DecodingError| match e {
        png::DecodingError::IoError(ref io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            CodecError::TruncatedPayload {
                expected: 0,
                found: bytes.len(),
            }
        }
        other => CodecError::MalformedHeader(other.to_string()),
    };

    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(malformed)?;
    let (color, depth) = reader.output_color_type();
    if depth != BitDepth::Eight {
        return Err(CodecError::UnsupportedBitDepth(format!("{depth:?}")));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| CodecError::MalformedHeader("image too large".to_owned()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(malformed)?;
    let (width, height) = (info.width as usize, info.height as usize);
    let stride = info.line_size;
    let channels = match color {
        ColorType::Grayscale => 1,
        ColorType::GrayscaleAlpha => 2,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
        ColorType::Indexed => {
            return Err(CodecError::UnsupportedFormat(
                "indexed color was not expanded".to_owned(),
            ))
        }
    };
    let mut rgb = Vec::with_capacity(width * height * 3);
    for row in buf.chunks_exact(stride).take(height) {
        for px in row[..width * channels].chunks_exact(channels) {
            match channels {
                1 | 2 => rgb.extend([px[0]; 3]),
                _ => rgb.extend(&px[..3]),
            }
        }
    }
    RasterImage::from_rgb8(width, height, &rgb).map_err(|e| CodecError::MalformedHeader(e.to_string()))
}
