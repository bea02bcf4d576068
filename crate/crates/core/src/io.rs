//! Plain-text sequence files.
//!
//! ```text
//! # zerosum v1 r=1 s=2 n=9
//! -1 -1 -1 2 2 2 -1 -1 -1
//! ```
//!
//! The body may instead be a single line `b:<bits>` (0 => -r, 1 => +s).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::params::Alphabet;
use crate::sequence::SignSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BodyEncoding {
    #[default]
    Values,
    Bits,
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

fn header_field(token: Option<&str>, key: &str) -> Result<u64> {
    let token = match token {
        Some(t) => t,
        None => return parse_err(1, format!("missing {key}=")),
    };
    match token.strip_prefix(key).and_then(|t| t.strip_prefix('=')) {
        Some(v) if !v.is_empty() && v.bytes().all(|b| b.is_ascii_digit()) => v
            .parse()
            .or_else(|_| parse_err(1, format!("{key} out of range"))),
        _ => parse_err(1, format!("expected {key}=<integer>, found {token:?}")),
    }
}

/// Parses a sequence file; blank lines after the header are ignored.
pub fn parse_sequence(text: &str) -> Result<SignSeq> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("#") || tokens.next() != Some("zerosum") || tokens.next() != Some("v1")
    {
        return parse_err(1, "header must start with `# zerosum v1`");
    }
    let r = header_field(tokens.next(), "r")?;
    let s = header_field(tokens.next(), "s")?;
    let n = header_field(tokens.next(), "n")? as usize;
    if let Some(extra) = tokens.next() {
        return parse_err(1, format!("unexpected header token {extra:?}"));
    }
    let alphabet = Alphabet::new(r, s).or_else(|e| parse_err(1, e.to_string()))?;

    let body: Vec<(usize, &str)> = lines
        .enumerate()
        .map(|(i, l)| (i + 2, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    if let [(line, only)] = body.as_slice() {
        if let Some(bits) = only.strip_prefix("b:") {
            if bits.len() != n {
                return parse_err(*line, format!("expected {n} bits, found {}", bits.len()));
            }
            let mut out = Vec::with_capacity(n);
            for (i, c) in bits.chars().enumerate() {
                match c {
                    '0' => out.push(false),
                    '1' => out.push(true),
                    _ => return parse_err(*line, format!("bad bit {c:?} at position {i}")),
                }
            }
            return Ok(SignSeq::from_bits(alphabet, out));
        }
    }

    let mut bits = Vec::with_capacity(n);
    for (line, content) in body {
        for token in content.split_whitespace() {
            let v: i64 = match token.parse() {
                Ok(v) => v,
                Err(_) => return parse_err(line, format!("not an integer: {token:?}")),
            };
            match alphabet.selector(v) {
                Some(b) => bits.push(b),
                None => return parse_err(line, format!("value {v} is not -{r} or {s}")),
            }
        }
    }
    if bits.len() != n {
        return parse_err(
            1,
            format!("header says n={n} but body has {} values", bits.len()),
        );
    }
    Ok(SignSeq::from_bits(alphabet, bits))
}

pub fn format_sequence(seq: &SignSeq, encoding: BodyEncoding) -> String {
    let a = seq.alphabet();
    let mut out = format!("# zerosum v1 r={} s={} n={}\n", a.r(), a.s(), seq.len());
    if seq.is_empty() {
        return out;
    }
    match encoding {
        BodyEncoding::Values => {
            for (i, v) in seq.values().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{v}").unwrap();
            }
        }
        BodyEncoding::Bits => {
            out.push_str("b:");
            out.push_str(&seq.to_bitstring());
        }
    }
    out.push('\n');
    out
}

pub fn read_sequence(path: &std::path::Path) -> Result<SignSeq> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
    parse_sequence(&text)
}

pub fn write_sequence(path: &std::path::Path, seq: &SignSeq, encoding: BodyEncoding) -> Result<()> {
    std::fs::write(path, format_sequence(seq, encoding))
        .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))
}
