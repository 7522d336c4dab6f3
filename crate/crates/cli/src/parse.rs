//! Matrix, complex-token and grid arguments.

use std::fs;

use conewhit::config::{hpd_from_flat, spd_from_flat};
use conewhit::{HermMatrix, HpdMatrix, SpdMatrix, SymMatrix};
use num_complex::Complex64;

use crate::CliError;

/// Comma/whitespace separated tokens of an inline list or an `@file`.
fn tokens(arg: &str) -> Result<Vec<String>, CliError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    let out: Vec<String> = text
        .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect();
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty matrix argument {arg:?}")));
    }
    Ok(out)
}

fn real(tok: &str) -> Result<f64, CliError> {
    tok.parse().map_err(|_| CliError::Usage(format!("not a number: {tok:?}")))
}

/// `re`, `imi`, `re+imi` or `re-imi`.
pub fn complex(tok: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("not a complex number: {tok:?}"));
    let Some(body) = tok.strip_suffix('i') else {
        return Ok(Complex64::new(real(tok)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        s => s.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn real_list(arg: &str) -> Result<Vec<f64>, CliError> {
    tokens(arg)?.iter().map(|t| real(t)).collect()
}

pub fn complex_list(arg: &str) -> Result<Vec<Complex64>, CliError> {
    tokens(arg)?.iter().map(|t| complex(t)).collect()
}

fn side(n: usize) -> Result<usize, CliError> {
    let p = (n as f64).sqrt().round() as usize;
    if p * p != n {
        return Err(CliError::Usage(format!("{n} entries do not form a square matrix")));
    }
    Ok(p)
}

pub fn spd(arg: &str) -> Result<SpdMatrix, CliError> {
    Ok(spd_from_flat(&real_list(arg)?)?)
}

pub fn sym(arg: &str) -> Result<SymMatrix, CliError> {
    let v = real_list(arg)?;
    Ok(SymMatrix::from_row_major(side(v.len())?, &v)?)
}

pub fn hpd(arg: &str) -> Result<HpdMatrix, CliError> {
    let (re, im) = split_parts(&complex_list(arg)?);
    Ok(hpd_from_flat(&re, Some(&im))?)
}

pub fn herm(arg: &str) -> Result<HermMatrix, CliError> {
    let v = complex_list(arg)?;
    Ok(HermMatrix::from_row_major(side(v.len())?, &v)?)
}

pub fn split_parts(v: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (v.iter().map(|z| z.re).collect(), v.iter().map(|z| z.im).collect())
}

/// `lo:hi:step`. Points are rounded to the decimals of the step so that
/// `-3:3:0.1` hits `0.7` and `0` exactly.
pub fn grid(arg: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid must be lo:hi:step, got {arg:?}"));
    let parts: Vec<&str> = arg.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else { return Err(bad()) };
    let (lo, hi, st): (f64, f64, f64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?, step.parse().map_err(|_| bad())?);
    if !(st > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let n = ((hi - lo) / st + 1e-9).floor() as usize + 1;
    if n > 1_000_000 {
        return Err(CliError::Usage(format!("grid has {n} points")));
    }
    let decimals = |s: &str| s.split(['e', 'E']).next().and_then(|m| m.split('.').nth(1)).map_or(0, str::len);
    let dec = decimals(step).max(decimals(parts[0])).min(15);
    Ok((0..n)
        .map(|i| {
            let y = lo + i as f64 * st;
            let r: f64 = format!("{y:.dec$}").parse().expect("formatted float");
            if r == 0.0 {
                0.0
            } else {
                r
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        assert_eq!(complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(complex("-1-0.5i").unwrap(), Complex64::new(-1.0, -0.5));
        assert_eq!(complex("0.3i").unwrap(), Complex64::new(0.0, 0.3));
        assert_eq!(complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(complex("1e-3+2E-2i").unwrap(), Complex64::new(1e-3, 2e-2));
        assert!(complex("1+xi").is_err());
    }

    #[test]
    fn grids() {
        let g = grid("-3:3:0.1").unwrap();
        assert_eq!(g.len(), 61);
        assert!(g.contains(&0.7) && g.contains(&0.0) && g.contains(&-3.0) && g.contains(&3.0));
        assert_eq!(grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(grid("1:0:0.1").is_err());
        assert!(grid("0:1").is_err());
    }

    #[test]
    fn matrices() {
        assert_eq!(spd("2,0.5,0.5,1").unwrap().dim(), 2);
        assert!(spd("1,2,3").is_err());
        assert!(spd("1,2,2,1").is_err());
        let h = hpd("2,0.5+0.5i,0.5-0.5i,1").unwrap();
        assert_eq!(h.dim(), 2);
        assert!(hpd("2,0.5+0.5i,0.5+0.5i,1").is_err());
    }
}
