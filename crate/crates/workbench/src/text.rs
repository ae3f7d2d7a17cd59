//! Word and endomorphism text formats.
//!
//! Words are whitespace-separated `x<k>` / `x<k>^-1` tokens, with `1` for
//! the empty word. Endomorphism files hold one `x<k> -> <word>` line per
//! generator, optionally followed by a `# inverse` section in the same
//! format. Other lines starting with `#` are comments.

use workbench_core::words::{Endomorphism, FreeWord, Letter};

use crate::error::CliError;

fn parse_token(tok: &str) -> Option<Letter> {
    let (body, inverse) = match tok.strip_suffix("^-1") {
        Some(b) => (b, true),
        None => (tok, false),
    };
    let digits = body.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    Some(Letter::new(digits.parse().ok()?, inverse))
}

/// Parses a word. Without `rank`, the rank is the largest index used (at
/// least 1).
pub fn parse_word(s: &str, rank: Option<usize>) -> Result<FreeWord, CliError> {
    let s = s.trim();
    let letters: Vec<Letter> = if s == "1" {
        Vec::new()
    } else {
        s.split_whitespace()
            .map(|t| parse_token(t).ok_or_else(|| CliError::Parse(format!("bad word token {:?}", t))))
            .collect::<Result<_, _>>()?
    };
    if letters.is_empty() && s != "1" {
        return Err(CliError::Parse("empty word must be written 1".into()));
    }
    let rank = rank.unwrap_or_else(|| letters.iter().map(|l| l.index()).max().unwrap_or(1));
    Ok(FreeWord::reduce(letters, rank)?)
}

fn parse_section<'a>(lines: &[(usize, &'a str)]) -> Result<Vec<(usize, &'a str)>, CliError> {
    let mut out = Vec::new();
    for &(no, line) in lines {
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| CliError::Parse(format!("line {}: expected `x<k> -> <word>`", no)))?;
        let letter = parse_token(lhs.trim())
            .filter(|l| !l.is_inverse())
            .ok_or_else(|| CliError::Parse(format!("line {}: bad generator {:?}", no, lhs.trim())))?;
        out.push((letter.index(), rhs.trim()));
    }
    out.sort_by_key(|(i, _)| *i);
    for (pos, (i, _)) in out.iter().enumerate() {
        if *i != pos + 1 {
            return Err(CliError::Parse(format!("generators must be x1..x{} exactly once", out.len())));
        }
    }
    Ok(out)
}

/// Parses an endomorphism file; the rank is the number of image lines.
pub fn parse_endomorphism(text: &str) -> Result<Endomorphism, CliError> {
    let mut images = Vec::new();
    let mut inverse = Vec::new();
    let mut in_inverse = false;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "# inverse" {
            if in_inverse {
                return Err(CliError::Parse(format!("line {}: second inverse section", no + 1)));
            }
            in_inverse = true;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if in_inverse {
            inverse.push((no + 1, line));
        } else {
            images.push((no + 1, line));
        }
    }
    let images = parse_section(&images)?;
    let rank = images.len();
    if rank == 0 {
        return Err(CliError::Parse("no generator images".into()));
    }
    let words = |sec: Vec<(usize, &str)>| -> Result<Vec<FreeWord>, CliError> {
        sec.into_iter().map(|(_, w)| parse_word(w, Some(rank))).collect()
    };
    let imgs = words(images)?;
    if in_inverse {
        let inv = parse_section(&inverse)?;
        if inv.len() != rank {
            return Err(CliError::Parse(format!("inverse section has {} lines, expected {}", inv.len(), rank)));
        }
        Ok(Endomorphism::with_inverse(rank, imgs, words(inv)?)?)
    } else {
        Ok(Endomorphism::new(rank, imgs)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_round_trip() {
        let w = parse_word("x2^-1 x1 x2", None).unwrap();
        assert_eq!(w.rank(), 2);
        assert_eq!(w.to_string(), "x2^-1 x1 x2");
        assert!(parse_word("1", Some(3)).unwrap().is_empty());
        assert_eq!(parse_word("x1 x2 x2^-1 x1", None).unwrap().to_string(), "x1 x1");
        for bad in ["", "x0", "x", "y1", "x1^2", "x01", "x1 ^-1"] {
            assert!(parse_word(bad, None).is_err(), "{bad:?}");
        }
        assert!(parse_word("x3", Some(2)).is_err());
    }

    #[test]
    fn endomorphism_round_trip() {
        let text = "x1 -> x2^-1 x1 x2\nx2 -> x2\n# inverse\nx1 -> x2 x1 x2^-1\nx2 -> x2\n";
        let e = parse_endomorphism(text).unwrap();
        assert!(e.is_automorphism());
        assert_eq!(e.to_string(), text);
        assert_eq!(parse_endomorphism(&e.to_string()).unwrap(), e);
        let no_inv = parse_endomorphism("# a comment\nx2 -> x1\n\nx1 -> x2 x2").unwrap();
        assert_eq!(no_inv.rank(), 2);
        assert!(!no_inv.is_automorphism());
    }

    #[test]
    fn endomorphism_errors() {
        assert!(parse_endomorphism("x1 -> x1\nx3 -> x1").is_err());
        assert!(parse_endomorphism("x1 -> x1\nx1 -> x1").is_err());
        assert!(parse_endomorphism("x1 = x1").is_err());
        assert!(parse_endomorphism("").is_err());
        // a wrong inverse is rejected by the checked constructor
        assert!(parse_endomorphism("x1 -> x1 x2\nx2 -> x2\n# inverse\nx1 -> x1 x2\nx2 -> x2").is_err());
    }
}
