//! Partitions, zonal polynomials in the C-normalization, generalized
//! Pochhammer symbols and the Gauss hypergeometric function of a symmetric
//! matrix argument.
//!
//! `C_κ` is expanded in monomial symmetric functions, `C_κ = d_κ Σ_λ c_{κλ} m_λ`,
//! with `c_{κκ} = 1` and the remaining coefficients from James' recurrence
//! over partitions dominated by `κ`. The scale factors `d_κ` then follow from
//! `Σ_κ C_κ = (tr X)^k` by a triangular solve.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::eval::{EvalResult, Method};
use crate::spd::SymMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Trailing zeros are dropped; parts must be non-increasing.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!("partition parts must be non-increasing: {parts:?}")));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ k_i (k_i − i)`, `i` counted from one.
    fn rho(&self) -> f64 {
        self.0.iter().enumerate().map(|(i, &k)| k as f64 * (k as f64 - i as f64 - 1.0)).sum()
    }

    /// Dominance order: every prefix sum of `self` is at least that of `other`.
    pub fn dominates(&self, other: &Partition) -> bool {
        let (mut s, mut t) = (0u32, 0u32);
        for i in 0..self.len().max(other.len()) {
            s += self.0.get(i).copied().unwrap_or(0);
            t += other.0.get(i).copied().unwrap_or(0);
            if s < t {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All partitions of `k` into at most `max_parts` parts, reverse-lexicographic.
pub fn partitions(k: usize, max_parts: usize) -> Vec<Partition> {
    fn rec(rem: u32, cap: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for first in (1..=rem.min(cap)).rev() {
            cur.push(first);
            rec(rem - first, first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k as u32, k as u32, max_parts, &mut Vec::new(), &mut out);
    out
}

/// Coefficient table for all `C_κ`, `|κ| = k`, `ℓ(κ) ≤ p`.
#[derive(Debug)]
struct ZonalTable {
    parts: Vec<Partition>,
    scale: Vec<f64>,
    /// `coef[i][j] = c_{κ_i λ_j}`, zero unless `j ≥ i`.
    coef: Vec<Vec<f64>>,
}

impl ZonalTable {
    fn build(k: usize, p: usize) -> Self {
        let parts = partitions(k, p);
        let n = parts.len();
        let index: HashMap<&Partition, usize> = parts.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut coef = vec![vec![0.0; n]; n];
        for (ki, kappa) in parts.iter().enumerate() {
            coef[ki][ki] = 1.0;
            let rk = kappa.rho();
            for li in (ki + 1)..n {
                let lambda = &parts[li];
                if !kappa.dominates(lambda) {
                    continue;
                }
                let l = lambda.parts();
                let mut s = 0.0;
                for i in 0..l.len() {
                    for j in (i + 1)..l.len() {
                        for t in 1..=l[j] {
                            let mut mu = l.to_vec();
                            mu[i] += t;
                            mu[j] -= t;
                            mu.sort_unstable_by(|a, b| b.cmp(a));
                            let mu = Partition::new(mu).expect("sorted");
                            if let Some(&mi) = index.get(&mu) {
                                if mi < li && coef[ki][mi] != 0.0 {
                                    s += ((l[i] + t) as f64 - (l[j] - t) as f64) * coef[ki][mi];
                                }
                            }
                        }
                    }
                }
                coef[ki][li] = s / (rk - lambda.rho());
            }
        }
        // Σ_κ d_κ c_{κλ} = k!/Π λ_i!, most dominant λ first
        let lnk = ln_gamma(k as f64 + 1.0);
        let mut scale = vec![0.0; n];
        for li in 0..n {
            let multinomial = (lnk - parts[li].parts().iter().map(|&x| ln_gamma(x as f64 + 1.0)).sum::<f64>()).exp();
            let acc: f64 = (0..li).map(|ki| scale[ki] * coef[ki][li]).sum();
            scale[li] = multinomial - acc;
        }
        Self { parts, scale, coef }
    }

    /// `C_κ(x)` for every κ in table order.
    fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let m: Vec<f64> = self.parts.iter().map(|l| monomial_symmetric(l, x)).collect();
        (0..self.parts.len())
            .map(|ki| self.scale[ki] * (ki..m.len()).map(|li| self.coef[ki][li] * m[li]).sum::<f64>())
            .collect()
    }
}

type TableCache = Mutex<HashMap<(usize, usize), Arc<ZonalTable>>>;

fn table(k: usize, p: usize) -> Arc<ZonalTable> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("zonal cache poisoned");
    guard.entry((k, p)).or_insert_with(|| Arc::new(ZonalTable::build(k, p))).clone()
}

fn next_permutation(v: &mut [u32]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `m_λ(x)`: sum of `Π x_i^{e_i}` over distinct rearrangements `e` of `λ`
/// padded with zeros to the length of `x`.
pub fn monomial_symmetric(lambda: &Partition, x: &[f64]) -> f64 {
    if lambda.len() > x.len() {
        return 0.0;
    }
    let mut e = lambda.parts().to_vec();
    e.resize(x.len(), 0);
    e.sort_unstable();
    let mut s = 0.0;
    loop {
        s += e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>();
        if !next_permutation(&mut e) {
            break;
        }
    }
    s
}

/// Zonal polynomial `C_κ` at a matrix with the given eigenvalues.
pub fn zonal_c(kappa: &Partition, eigenvalues: &[f64]) -> f64 {
    let p = eigenvalues.len();
    if kappa.len() > p {
        return 0.0;
    }
    if p == 1 {
        return eigenvalues[0].powi(kappa.weight() as i32);
    }
    let t = table(kappa.weight() as usize, p);
    let ki = t.parts.iter().position(|l| l == kappa).expect("partition fits");
    let m: Vec<f64> = t.parts[ki..].iter().map(|l| monomial_symmetric(l, eigenvalues)).collect();
    t.scale[ki] * m.iter().zip(&t.coef[ki][ki..]).map(|(a, b)| a * b).sum::<f64>()
}

/// `(sign, ln|(a)_κ|)` with `(a)_κ = Π_i (a − (i−1)/2)_{k_i}`; sign is zero
/// when a factor vanishes.
pub fn log_gen_pochhammer(a: f64, kappa: &Partition) -> (f64, f64) {
    let mut sign = 1.0;
    let mut log = 0.0;
    for (i, &k) in kappa.parts().iter().enumerate() {
        for j in 0..k {
            let f = a - i as f64 / 2.0 + j as f64;
            if f == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            if f < 0.0 {
                sign = -sign;
            }
            log += f.abs().ln();
        }
    }
    (sign, log)
}

pub fn gen_pochhammer(a: f64, kappa: &Partition) -> f64 {
    kappa
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &k)| (0..k).map(|j| a - i as f64 / 2.0 + j as f64).product::<f64>())
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub max_degree: usize,
    pub tail_tol: f64,
}

impl SeriesParams {
    pub const DEFAULT_MAX_DEGREE: usize = 30;
    pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c, max_degree: Self::DEFAULT_MAX_DEGREE, tail_tol: Self::DEFAULT_TAIL_TOL }
    }

    pub fn with_max_degree(mut self, k: usize) -> Self {
        self.max_degree = k;
        self
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }
}

/// Sums degree blocks until two consecutive blocks fall below the tolerance.
fn sum_series(sp: &SeriesParams, mut degree_term: impl FnMut(usize) -> Result<f64>) -> Result<EvalResult> {
    let mut sum = 0.0;
    let mut tail = f64::INFINITY;
    let mut small = 0;
    for k in 0..=sp.max_degree {
        let t = degree_term(k)?;
        sum += t;
        tail = t.abs();
        if k > 0 && tail <= sp.tail_tol * sum.abs().max(1.0) {
            small += 1;
            if small == 2 {
                return Ok(EvalResult::from_value(sum, tail, Method::Series, k as u64 + 1));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NotConverged { degree: sp.max_degree, tail })
}

fn check_denominator(c: f64, p: usize, k: usize) -> Result<()> {
    for i in 0..p {
        let ci = c - i as f64 / 2.0;
        if ci <= 0.0 && ci.fract() == 0.0 && (-ci) < k as f64 {
            return domain(format!("denominator parameter c = {c} annihilates a Pochhammer symbol"));
        }
    }
    Ok(())
}

/// `₂F₁(a, b; c; X)` by its zonal series, for symmetric `X` with spectral
/// radius below one.
pub fn hyp2f1_matrix(sp: &SeriesParams, x: &SymMatrix) -> Result<EvalResult> {
    hyp2f1_eigen(sp, &x.eigenvalues())
}

/// Same as [`hyp2f1_matrix`] from the eigenvalues of the argument.
pub fn hyp2f1_eigen(sp: &SeriesParams, eig: &[f64]) -> Result<EvalResult> {
    let p = eig.len();
    let radius = eig.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(radius < 1.0) {
        return domain(format!("₂F₁ series needs spectral radius < 1, got {radius}"));
    }
    if sp.max_degree == 0 {
        return Err(Error::Invalid("series needs max_degree ≥ 1".into()));
    }
    check_denominator(sp.c, p, sp.max_degree)?;
    if radius == 0.0 {
        return Ok(EvalResult::from_value(1.0, 0.0, Method::Series, 1));
    }
    sum_series(sp, |k| {
        if k == 0 {
            return Ok(1.0);
        }
        let lnk = ln_gamma(k as f64 + 1.0);
        let zon: Vec<(Partition, f64)> = if p == 1 {
            vec![(Partition(vec![k as u32]), eig[0].powi(k as i32))]
        } else {
            let t = table(k, p);
            t.parts.iter().cloned().zip(t.evaluate(eig)).collect()
        };
        let mut s = 0.0;
        for (kappa, ck) in zon {
            let (sa, la) = log_gen_pochhammer(sp.a, &kappa);
            let (sb, lb) = log_gen_pochhammer(sp.b, &kappa);
            let (sc, lc) = log_gen_pochhammer(sp.c, &kappa);
            if sa * sb == 0.0 || ck == 0.0 {
                continue;
            }
            if sc == 0.0 {
                return domain(format!("(c)_κ vanishes at κ = {kappa}"));
            }
            s += sa * sb * sc * (la + lb - lc - lnk).exp() * ck;
        }
        Ok(s)
    })
}

/// Classical Gauss series `₂F₁(a, b; c; x)`, `|x| < 1`.
pub fn hyp2f1_scalar(a: f64, b: f64, c: f64, x: f64) -> Result<EvalResult> {
    if !(x.abs() < 1.0) {
        return domain(format!("₂F₁ series needs |x| < 1, got {x}"));
    }
    check_denominator(c, 1, usize::MAX)?;
    let sp = SeriesParams::new(a, b, c).with_max_degree(100_000).with_tail_tol(1e-17);
    let mut term = 1.0;
    sum_series(&sp, |k| {
        if k > 0 {
            let j = (k - 1) as f64;
            term *= (a + j) * (b + j) / ((c + j) * (j + 1.0)) * x;
        }
        Ok(term)
    })
}
