//! Locale-free literals: complex numbers as `re+imi`, vectors as `re,im;re,im`.

use subprod::num::CVec2;
use subprod::C64;

fn real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a real number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Parse `2+0i`, `-0.5+0.1i`, `1e-3-2i`, `3` or `2i`.
pub fn parse_complex(text: &str) -> Result<C64, String> {
    let s = text.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(real(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other)?,
    };
    Ok(C64::new(re, im))
}

/// Parse `re,im;re,im` into a vector of `E_1`.
pub fn parse_vector(text: &str) -> Result<CVec2, String> {
    let parts: Vec<&str> = text.split(';').collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("`{text}` must have two `re,im` coordinates separated by `;`"));
    };
    let coord = |p: &str| -> Result<C64, String> {
        let (re, im) = p.split_once(',').ok_or_else(|| format!("`{p}` must be `re,im`"))?;
        Ok(C64::new(real(re)?, real(im)?))
    };
    Ok(CVec2::new(coord(a)?, coord(b)?))
}

/// Parse `0,1,2` into root choices.
pub fn parse_list(text: &str) -> Result<Vec<u64>, String> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    text.split(',').map(|p| p.trim().parse().map_err(|_| format!("`{p}` is not a nonnegative integer"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("2+0i").unwrap(), C64::new(2.0, 0.0));
        assert_eq!(parse_complex("-0.5+0.1i").unwrap(), C64::new(-0.5, 0.1));
        assert_eq!(parse_complex("1e-3-2i").unwrap(), C64::new(1e-3, -2.0));
        assert_eq!(parse_complex("2.5e+1+1e-2i").unwrap(), C64::new(25.0, 0.01));
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("0-i").unwrap(), C64::new(0.0, -1.0));
        assert!(parse_complex("2+xi").is_err());
        assert!(parse_complex("nan").is_err());
    }

    #[test]
    fn vector_forms() {
        let v = parse_vector("0,0;1,0").unwrap();
        assert_eq!(v, CVec2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0)));
        assert!(parse_vector("1,0").is_err());
        assert!(parse_vector("1;0").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("1,0,2").unwrap(), vec![1, 0, 2]);
        assert_eq!(parse_list("").unwrap(), Vec::<u64>::new());
        assert!(parse_list("1,-1").is_err());
    }
}
