//! Angle literals: radians (`1.2`) or rational multiples of π (`3π/4`,
//! `0.4π`, `pi/3`, `-2*pi/5`). Multiples of π are kept exact.

use beamsplit_core::engine::AngleSpec;
use num_integer::Integer;

/// `"0.4"` → (2, 5), `"-3/4"` → (−3, 4).
fn rational(src: &str) -> Option<(i64, i64)> {
    let src = src.trim();
    if let Some((a, b)) = src.split_once('/') {
        let (p, q) = rational(a)?;
        let (r, s) = rational(b)?;
        if r == 0 {
            return None;
        }
        return reduce(p.checked_mul(s)?, q.checked_mul(r)?);
    }
    let (neg, digits) = match src.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, src.strip_prefix('+').unwrap_or(src)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars())).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let part: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let num = whole.checked_mul(den)?.checked_add(part)?;
    reduce(if neg { -num } else { num }, den)
}

fn reduce(p: i64, q: i64) -> Option<(i64, i64)> {
    if q == 0 {
        return None;
    }
    let g = p.gcd(&q).max(1);
    let s = q.signum();
    Some((s * p / g, s * q / g))
}

pub fn parse_angle(src: &str) -> Result<AngleSpec, String> {
    let normalized: String = src.trim().replace("pi", "π").replace("PI", "π").replace('−', "-");
    let bad = || format!("cannot read angle '{src}'; use radians or a multiple of π such as 3π/4");
    let Some((before, after)) = normalized.split_once('π') else {
        return match normalized.parse::<f64>() {
            Ok(t) if t.is_finite() => Ok(AngleSpec::radians(t)),
            _ => Err(bad()),
        };
    };
    let before = before.trim().trim_end_matches('*').trim();
    let (p, q) = match before {
        "" | "+" => (1, 1),
        "-" => (-1, 1),
        c => rational(c).ok_or_else(bad)?,
    };
    let after = after.trim();
    let den = if after.is_empty() {
        1
    } else {
        let d = after.strip_prefix('/').ok_or_else(bad)?.trim();
        let (a, b) = rational(d).ok_or_else(bad)?;
        if b != 1 || a <= 0 {
            return Err(bad());
        }
        a
    };
    let (p, q) = reduce(p, q.checked_mul(den).ok_or_else(bad)?).ok_or_else(bad)?;
    Ok(AngleSpec::rational_pi(p, q as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_multiples_of_pi() {
        assert_eq!(parse_angle("3π/4"), Ok(AngleSpec::rational_pi(3, 4)));
        assert_eq!(parse_angle("0.4π"), Ok(AngleSpec::rational_pi(2, 5)));
        assert_eq!(parse_angle("pi/3"), Ok(AngleSpec::rational_pi(1, 3)));
        assert_eq!(parse_angle("-2*pi/5"), Ok(AngleSpec::rational_pi(-2, 5)));
        assert_eq!(parse_angle("0.75π"), Ok(AngleSpec::rational_pi(3, 4)));
        assert_eq!(parse_angle("π"), Ok(AngleSpec::rational_pi(1, 1)));
        assert_eq!(parse_angle("1.25"), Ok(AngleSpec::radians(1.25)));
        assert!(parse_angle("3π/x").is_err());
        assert!(parse_angle("π/0").is_err());
        assert!(parse_angle("abc").is_err());
    }
}
