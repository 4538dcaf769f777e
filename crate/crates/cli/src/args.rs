//! Argument preprocessing: `key=value` words and `Z` range expressions.

/// Turns bare `key=value` words into `--key=value`.
///
/// Keys are lowercased and underscores become hyphens, so `T=1` reads as
/// `--t=1` and `z_lo=5` as `--z-lo=5`. Anything starting with `-` is left
/// alone.
pub fn rewrite(args: impl IntoIterator<Item = String>) -> Vec<String> {
    args.into_iter()
        .map(|a| match a.split_once('=') {
            Some((key, value)) if is_key(key) => {
                format!("--{}={value}", key.to_ascii_lowercase().replace('_', "-"))
            }
            _ => a,
        })
        .collect()
}

fn is_key(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn parse_num(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}

/// `logspace(a,b,n)`, `linspace(a,b,n)`, a comma-separated list, or a single value.
pub fn parse_z_values(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let spaced = |body: &str, log: bool| -> Result<Vec<f64>, String> {
        let parts: Vec<&str> = body.split(',').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected three arguments in {s:?}"));
        };
        let (a, b) = (parse_num(a)?, parse_num(b)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| format!("bad point count in {s:?}"))?;
        if n < 2 {
            return Err(format!("need at least two points in {s:?}"));
        }
        if log && !(a > 0.0 && b > 0.0) {
            return Err(format!("logspace bounds must be positive in {s:?}"));
        }
        let (a, b) = if log { (a.log10(), b.log10()) } else { (a, b) };
        Ok((0..n)
            .map(|i| {
                let x = a + (b - a) * i as f64 / (n - 1) as f64;
                if log {
                    10f64.powf(x)
                } else {
                    x
                }
            })
            .collect())
    };
    let body = |prefix: &str| {
        s.strip_prefix(prefix)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    let values = if let Some(b) = body("logspace") {
        spaced(b, true)?
    } else if let Some(b) = body("linspace") {
        spaced(b, false)?
    } else {
        s.split(',').map(parse_num).collect::<Result<Vec<_>, _>>()?
    };
    if values.iter().any(|&z| !(z > 0.0)) {
        return Err("Z values must be positive".into());
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err("Z values must be strictly increasing".into());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rewrites_key_value_words() {
        let out = rewrite(strings(&["ptwell", "xwell-spectrum", "T=1", "z_lo=5", "--out", "a=b.csv"]));
        assert_eq!(
            out,
            strings(&["ptwell", "xwell-spectrum", "--t=1", "--z-lo=5", "--out", "--a=b.csv"])
        );
        assert_eq!(rewrite(strings(&["Z=logspace(1,2,3)"])), strings(&["--z=logspace(1,2,3)"]));
        assert_eq!(rewrite(strings(&["--z=1", "=3", "1=2"])), strings(&["--z=1", "=3", "1=2"]));
    }

    #[test]
    fn z_ranges() {
        assert_eq!(parse_z_values("2.5").unwrap(), vec![2.5]);
        assert_eq!(parse_z_values("1,2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(parse_z_values("linspace(1,3,3)").unwrap(), vec![1.0, 2.0, 3.0]);
        let l = parse_z_values("logspace(1e-3,1e3,7)").unwrap();
        assert_eq!(l.len(), 7);
        assert!((l[0] - 1e-3).abs() < 1e-18 && (l[6] - 1e3).abs() < 1e-9);
        assert!(parse_z_values("logspace(0,1,3)").is_err());
        assert!(parse_z_values("linspace(1,2)").is_err());
        assert!(parse_z_values("3,2").is_err());
        assert!(parse_z_values("-1").is_err());
        assert!(parse_z_values("abc").is_err());
        assert!(parse_z_values("linspace(1,2,1)").is_err());
    }
}
