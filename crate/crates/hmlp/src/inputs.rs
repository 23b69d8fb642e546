//! Plain-text inputs: one number per line, `#` starts a comment.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Numbers from `text`, skipping blank lines and comments.
pub fn parse_numbers(text: &str, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body.parse().with_context(|| format!("line {}: {what} {body:?} is not a number", k + 1))?;
        if !v.is_finite() {
            bail!("line {}: {what} must be finite", k + 1);
        }
        out.push(v);
    }
    if out.is_empty() {
        bail!("no {what} values found");
    }
    Ok(out)
}

pub fn read_numbers(path: &Path, what: &str) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_numbers(&text, what).with_context(|| format!("in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks() {
        let v = parse_numbers("# snr list\n0.0\n\n 10.5  # strong\n-3\n", "SNR").unwrap();
        assert_eq!(v, vec![0.0, 10.5, -3.0]);
    }

    #[test]
    fn bad_lines_are_reported() {
        let e = parse_numbers("1\nabc\n", "SNR").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        assert!(parse_numbers("# nothing\n", "SNR").is_err());
        assert!(parse_numbers("inf\n", "SNR").is_err());
    }
}
