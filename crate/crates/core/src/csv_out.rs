//! Plain CSV emission: a header row, 17-significant-digit floats and a
//! trailing `# sha256:` comment over everything above it.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;

pub const CHECKSUM_PREFIX: &str = "# sha256:";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct CsvWriter {
    buf: String,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self { buf }
    }

    /// Starts with a `# ` comment line (used for metadata) before the header.
    pub fn with_comment(comment: &str, header: &[&str]) -> Self {
        let mut w = Self { buf: format!("# {comment}\n") };
        w.buf.push_str(&header.join(","));
        w.buf.push('\n');
        w
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn row_f64(&mut self, fields: &[f64]) {
        let mut first = true;
        for &x in fields {
            if !first {
                self.buf.push(',');
            }
            first = false;
            let _ = write!(self.buf, "{x:.16e}");
        }
        self.buf.push('\n');
    }

    pub fn finish(mut self) -> String {
        let digest = hex_digest(self.buf.as_bytes());
        self.buf.push_str(CHECKSUM_PREFIX);
        self.buf.push_str(&digest);
        self.buf.push('\n');
        self.buf
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in d {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// True when the trailing checksum line matches the payload above it.
pub fn verify_checksum(text: &str) -> bool {
    let trimmed = text.strip_suffix('\n').unwrap_or(text);
    match trimmed.rfind('\n') {
        Some(pos) => {
            let (payload, last) = trimmed.split_at(pos + 1);
            last.strip_prefix(CHECKSUM_PREFIX).is_some_and(|h| h == hex_digest(payload.as_bytes()))
        }
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_round_trip() {
        let mut w = CsvWriter::new(&["a", "b"]);
        w.row_f64(&[1.0, -0.1]);
        let text = w.finish();
        assert!(text.starts_with("a,b\n1.0000000000000000e0,-1.0000000000000001e-1\n"));
        assert!(verify_checksum(&text));
        assert!(!verify_checksum(&text.replace("e0", "e1")));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
