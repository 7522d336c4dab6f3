//! Generalized Gauss–Laguerre quadrature with node doubling.
//!
//! Rules for the weight `x^a e^{−x}` come from the Golub–Welsch eigenproblem
//! of the Laguerre Jacobi matrix, solved by implicit QL keeping only the first
//! eigenvector components. Weights are normalized to sum to one, so a rule
//! computes expectations under `Gamma(a+1, 1)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub const START_NODES: usize = 32;
pub const MAX_NODES: usize = 1024;

#[derive(Debug, Clone)]
pub struct LaguerreRule {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Implicit QL on a symmetric tridiagonal matrix (`d` diagonal, `e`
/// subdiagonal with `e[n−1]` unused), rotating only the vector `z`.
fn imtqlx(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        return;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= f64::EPSILON * (d[m].abs() + d[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "implicit QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                if g.abs() <= f.abs() {
                    c = g / f;
                    r = c.hypot(1.0);
                    e[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = s.hypot(1.0);
                    e[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let fz = z[i + 1];
                z[i + 1] = s * z[i] + c * fz;
                z[i] = c * z[i] - s * fz;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

impl LaguerreRule {
    /// `n`-point rule for the weight `x^alpha e^{−x}`, `alpha > −1`.
    pub fn new(n: usize, alpha: f64) -> Self {
        assert!(n >= 1 && alpha > -1.0);
        let mut d: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
        let mut e: Vec<f64> = (0..n).map(|i| ((i as f64 + 1.0) * (i as f64 + 1.0 + alpha)).sqrt()).collect();
        let mut z = vec![0.0; n];
        z[0] = 1.0;
        imtqlx(&mut d, &mut e, &mut z);
        let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { alpha, nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i)`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| if w == 0.0 { 0.0 } else { w * f(x) }).sum()
    }
}

type RuleCache = Mutex<HashMap<(usize, u64), Arc<LaguerreRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached rule; concurrent callers may both build a missing rule, the first
/// insert wins.
pub fn laguerre_rule(n: usize, alpha: f64) -> Arc<LaguerreRule> {
    let key = (n, alpha.to_bits());
    if let Some(r) = cache().lock().expect("rule cache poisoned").get(&key) {
        return r.clone();
    }
    let rule = Arc::new(LaguerreRule::new(n, alpha));
    cache().lock().expect("rule cache poisoned").entry(key).or_insert(rule).clone()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Difference between the last two grids.
    pub abs_err: f64,
    pub nodes: usize,
    pub converged: bool,
}

/// `E[f(S)]` for `S ~ Gamma(shape, 1)`, doubling the node count from
/// [`START_NODES`] until two successive grids agree to `rel_tol`.
pub fn gamma_expectation<F: Fn(f64) -> f64>(shape: f64, f: F, rel_tol: f64) -> QuadResult {
    let alpha = shape - 1.0;
    let mut n = START_NODES;
    let mut prev = laguerre_rule(n, alpha).apply(&f);
    loop {
        let next_n = n * 2;
        let cur = laguerre_rule(next_n, alpha).apply(&f);
        let diff = (cur - prev).abs();
        if diff <= rel_tol * cur.abs() || diff < 1e-300 {
            return QuadResult { value: cur, abs_err: diff, nodes: next_n, converged: true };
        }
        if next_n >= MAX_NODES || !cur.is_finite() {
            return QuadResult { value: cur, abs_err: diff, nodes: next_n, converged: false };
        }
        prev = cur;
        n = next_n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        // E[S^k] = Γ(a+1+k)/Γ(a+1) for S ~ Gamma(a+1)
        for &a in &[0.0, -0.5, 1.7] {
            let r = LaguerreRule::new(12, a);
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for k in 0..10 {
                let want = gamma(a + 1.0 + k as f64) / gamma(a + 1.0);
                let got = r.apply(|x| x.powi(k));
                assert!((got - want).abs() < 1e-11 * want, "a={a} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn classic_two_point_rule() {
        let r = LaguerreRule::new(2, 0.0);
        let s = 2f64.sqrt();
        assert!((r.nodes[0] - (2.0 - s)).abs() < 1e-14);
        assert!((r.nodes[1] - (2.0 + s)).abs() < 1e-14);
        assert!((r.weights[0] - (2.0 + s) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn doubling_converges_on_smooth_integrand() {
        // E[1/(1+S)] with S ~ Exp(1) is e·E1(1)
        let q = gamma_expectation(1.0, |x| 1.0 / (1.0 + x), 1e-12);
        assert!(q.converged);
        let want = std::f64::consts::E * conewhit_oracle::expint_e1(1.0);
        assert!((q.value - want).abs() < 1e-11);
    }

    #[test]
    fn large_rule_is_sane() {
        let r = laguerre_rule(MAX_NODES, 0.3);
        assert_eq!(r.len(), MAX_NODES);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }
}
