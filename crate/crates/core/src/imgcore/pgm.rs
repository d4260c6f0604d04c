//! Netpbm graymap (PGM) reading and writing, ASCII `P2` and binary `P5`, maxval 255.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{GrayImage, ImageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    Ascii,
    Binary,
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, ImageError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| ImageError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes)?;
    read_pgm(&bytes)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>, encoding: PgmEncoding) -> Result<(), ImageError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_pgm(img, &mut out, encoding)?;
    out.flush()?;
    Ok(())
}

pub fn write_pgm(img: &GrayImage, out: &mut impl Write, encoding: PgmEncoding) -> Result<(), ImageError> {
    let bytes = img.to_u8();
    match encoding {
        PgmEncoding::Binary => {
            write!(out, "P5\n{} {}\n255\n", img.width(), img.height())?;
            out.write_all(&bytes)?;
        }
        PgmEncoding::Ascii => {
            write!(out, "P2\n{} {}\n255\n", img.width(), img.height())?;
            for row in bytes.chunks(img.width()) {
                let line: Vec<String> = row.iter().map(|b| b.to_string()).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
    }
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
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

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<u32, ImageError> {
        let tok = self
            .token()
            .ok_or_else(|| ImageError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| ImageError::MalformedHeader(format!("invalid {what} {:?}", String::from_utf8_lossy(tok))))
    }
}

/// Decodes a PGM byte stream.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur
        .token()
        .ok_or_else(|| ImageError::MalformedHeader("empty file".into()))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(ImageError::MalformedHeader(format!(
                "bad magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::InvalidDimensions { width, height });
    }
    if maxval != 255 {
        return Err(ImageError::UnsupportedMaxval(maxval));
    }
    let expected = width * height;

    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(ImageError::Truncated { expected, found: 0 });
        }
        let data = &bytes[cur.pos + 1..];
        if data.len() < expected {
            return Err(ImageError::Truncated {
                expected,
                found: data.len(),
            });
        }
        GrayImage::from_u8(width, height, &data[..expected])
    } else {
        let mut pixels = Vec::with_capacity(expected);
        while pixels.len() < expected {
            let Some(tok) = cur.token() else {
                return Err(ImageError::Truncated {
                    expected,
                    found: pixels.len(),
                });
            };
            let v = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse::<u32>().ok())
                .filter(|&v| v <= 255)
                .ok_or_else(|| {
                    ImageError::MalformedHeader(format!("invalid sample {:?}", String::from_utf8_lossy(tok)))
                })?;
            pixels.push(v as f32);
        }
        GrayImage::new(width, height, pixels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_2x2() {
        let img = read_pgm(b"P2\n# comment\n2 2\n255\n0 10\n20 30\n").unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[0.0, 10.0, 20.0, 30.0]);
    }

    #[test]
    fn ascii_and_binary_agree() {
        let a = read_pgm(b"P2 3 1 255 7 128 255").unwrap();
        let b = read_pgm(b"P5\n3 1\n255\n\x07\x80\xff").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            read_pgm(b"P2 1 1 65535 0"),
            Err(ImageError::UnsupportedMaxval(65535))
        ));
        assert!(matches!(read_pgm(b"P6 1 1 255 0"), Err(ImageError::MalformedHeader(_))));
        assert!(matches!(read_pgm(b"P2 x 1 255 0"), Err(ImageError::MalformedHeader(_))));
        assert!(matches!(
            read_pgm(b"P2 2 2 255 0 1 2"),
            Err(ImageError::Truncated { expected: 4, found: 3 })
        ));
        assert!(matches!(
            read_pgm(b"P5 2 2 255\n\x00\x01"),
            Err(ImageError::Truncated { expected: 4, found: 2 })
        ));
        assert!(matches!(
            load_pgm("/nonexistent/nope.pgm"),
            Err(ImageError::Open { .. })
        ));
    }

    #[test]
    fn write_then_read() {
        let img = GrayImage::from_fn(5, 3, |x, y| (x * 50 + y) as f32).unwrap();
        for enc in [PgmEncoding::Ascii, PgmEncoding::Binary] {
            let mut buf = Vec::new();
            write_pgm(&img, &mut buf, enc).unwrap();
            assert_eq!(read_pgm(&buf).unwrap(), img);
        }
    }
}
