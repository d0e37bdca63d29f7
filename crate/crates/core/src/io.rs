//! `FRAME v1` files.
//!
//! Text layout: a header line `FRAME v1 <M> <N> <real|complex>` followed by
//! `M·N` whitespace-separated entries in column-major order. Complex entries
//! are written `a+bi` or `a-bi`. Floats use the shortest representation that
//! round-trips.
//!
//! Binary layout: the same header with a sixth token `binary`, a newline,
//! then little-endian `f64` values in column-major order (complex entries as
//! interleaved real and imaginary parts).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{FrameError, Result};
use crate::frame::{Frame, FrameData, ScalarField};

pub const MAGIC: &str = "FRAME";
pub const VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Encoding {
    #[default]
    Text,
    Binary,
}

struct Header {
    rows: usize,
    cols: usize,
    field: ScalarField,
    encoding: Encoding,
}

fn parse_err(line: usize, message: impl Into<String>) -> FrameError {
    FrameError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str) -> Result<Header> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() < 5 || tokens.len() > 6 {
        return Err(parse_err(
            1,
            format!("expected `{MAGIC} {VERSION} <M> <N> <real|complex> [binary]`"),
        ));
    }
    if tokens[0] != MAGIC {
        return Err(parse_err(1, format!("expected `{MAGIC}`, found `{}`", tokens[0])));
    }
    if tokens[1] != VERSION {
        return Err(parse_err(1, format!("unsupported version `{}`", tokens[1])));
    }
    let dim = |s: &str, what: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(parse_err(1, format!("{what} must be a positive integer, found `{s}`"))),
        }
    };
    let rows = dim(tokens[2], "M")?;
    let cols = dim(tokens[3], "N")?;
    let field = tokens[4]
        .parse::<ScalarField>()
        .map_err(|_| parse_err(1, format!("unknown scalar field `{}`", tokens[4])))?;
    let encoding = match tokens.get(5) {
        None => Encoding::Text,
        Some(&"binary") => Encoding::Binary,
        Some(other) => return Err(parse_err(1, format!("unknown encoding `{other}`"))),
    };
    Ok(Header {
        rows,
        cols,
        field,
        encoding,
    })
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let Some(body) = token.strip_suffix('i') else {
        return token.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    // The split sign is the last `+`/`-` that is neither leading nor part
    // of an exponent.
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().ok()?;
            let im = match &body[i..] {
                "+" => 1.0,
                "-" => -1.0,
                s => s.parse::<f64>().ok()?,
            };
            Some(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => s.parse::<f64>().ok()?,
            };
            Some(Complex64::new(0.0, im))
        }
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses a frame from the raw bytes of a file in either encoding.
pub fn parse_frame(bytes: &[u8]) -> Result<Frame> {
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .unwrap_or(bytes.len());
    let header_line = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| parse_err(1, "header is not valid UTF-8"))?;
    let header = parse_header(header_line.trim_end_matches('\r'))?;
    let body = bytes.get(header_end + 1..).unwrap_or(&[]);
    let data = match header.encoding {
        Encoding::Text => parse_text_body(&header, body)?,
        Encoding::Binary => parse_binary_body(&header, body)?,
    };
    Frame::from_data(header.rows, header.cols, data)
}

fn parse_text_body(h: &Header, body: &[u8]) -> Result<FrameData> {
    let text = std::str::from_utf8(body).map_err(|_| parse_err(2, "body is not valid UTF-8"))?;
    let expected = h.rows * h.cols;
    let mut real = Vec::new();
    let mut complex = Vec::new();
    let mut count = 0usize;
    let mut last_line = 1;
    for (offset, line) in text.lines().enumerate() {
        let lineno = offset + 2;
        last_line = lineno;
        for token in line.split_whitespace() {
            count += 1;
            if count > expected {
                return Err(parse_err(
                    lineno,
                    format!("more than the {expected} entries declared in the header"),
                ));
            }
            match h.field {
                ScalarField::Real => {
                    let v = token
                        .parse::<f64>()
                        .map_err(|_| parse_err(lineno, format!("invalid real entry `{token}`")))?;
                    real.push(v);
                }
                ScalarField::Complex => {
                    let z = parse_complex(token)
                        .ok_or_else(|| parse_err(lineno, format!("invalid complex entry `{token}`")))?;
                    complex.push(z);
                }
            }
        }
    }
    if count < expected {
        return Err(parse_err(
            last_line,
            format!("expected {expected} entries, found {count}"),
        ));
    }
    Ok(match h.field {
        ScalarField::Real => FrameData::Real(real),
        ScalarField::Complex => FrameData::Complex(complex),
    })
}

fn parse_binary_body(h: &Header, body: &[u8]) -> Result<FrameData> {
    let per_entry = match h.field {
        ScalarField::Real => 1,
        ScalarField::Complex => 2,
    };
    let expected = h.rows * h.cols * per_entry * 8;
    if body.len() != expected {
        return Err(parse_err(
            2,
            format!("binary payload has {} bytes, expected {expected}", body.len()),
        ));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(match h.field {
        ScalarField::Real => FrameData::Real(values),
        ScalarField::Complex => FrameData::Complex(
            values
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        ),
    })
}

fn header_line(frame: &Frame, encoding: Encoding) -> String {
    let mut s = format!(
        "{MAGIC} {VERSION} {} {} {}",
        frame.rows(),
        frame.cols(),
        frame.field()
    );
    if encoding == Encoding::Binary {
        s.push_str(" binary");
    }
    s.push('\n');
    s
}

/// Serializes a frame; text output puts one column per line.
pub fn encode_frame(frame: &Frame, encoding: Encoding) -> Vec<u8> {
    let mut out = header_line(frame, encoding);
    let m = frame.rows();
    match encoding {
        Encoding::Text => {
            match frame.data() {
                FrameData::Real(v) => {
                    for col in v.chunks(m) {
                        let line: Vec<String> = col.iter().map(|x| x.to_string()).collect();
                        let _ = writeln!(out, "{}", line.join(" "));
                    }
                }
                FrameData::Complex(v) => {
                    for col in v.chunks(m) {
                        let line: Vec<String> = col.iter().map(|z| format_complex(*z)).collect();
                        let _ = writeln!(out, "{}", line.join(" "));
                    }
                }
            }
            out.into_bytes()
        }
        Encoding::Binary => {
            let mut bytes = out.into_bytes();
            match frame.data() {
                FrameData::Real(v) => {
                    for x in v {
                        bytes.extend_from_slice(&x.to_le_bytes());
                    }
                }
                FrameData::Complex(v) => {
                    for z in v {
                        bytes.extend_from_slice(&z.re.to_le_bytes());
                        bytes.extend_from_slice(&z.im.to_le_bytes());
                    }
                }
            }
            bytes
        }
    }
}

pub fn read_frame(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| FrameError::io(path, e))?;
    parse_frame(&bytes)
}

pub fn write_frame(path: impl AsRef<Path>, frame: &Frame, encoding: Encoding) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_frame(frame, encoding)).map_err(|e| FrameError::io(path, e))
}
