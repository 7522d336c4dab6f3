//! Independent reference computations for the conewhit test suites.
//!
//! Nothing here shares code paths with `conewhit-core`: quadrature is
//! double-exponential rather than Gauss-Laguerre, eigenvalues come from a
//! cyclic Jacobi sweep, and special values come from classical series.

use statrs::function::gamma::ln_gamma;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `∫₀^∞ f(x) dx` by the exp-sinh rule `x = exp(t − e^{−t})`.
///
/// Handles algebraic endpoint singularities at 0 and exponential decay at
/// infinity. Step halving stops when successive estimates agree to `rel_tol`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> f64 {
    let node = |t: f64| -> (f64, f64) {
        let e = (-t).exp();
        let x = (t - e).exp();
        (x, x * (1.0 + e))
    };
    let eval = |t: f64| -> f64 {
        let (x, dx) = node(t);
        if x == 0.0 || !x.is_finite() || !dx.is_finite() {
            return 0.0;
        }
        let v = f(x) * dx;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    // t range wide enough that the tails underflow for sane integrands
    let (t_lo, t_hi) = (-6.0_f64, 7.0_f64);
    let mut h = 0.5;
    let mut sum: f64 = {
        let n = ((t_hi - t_lo) / h).round() as i64;
        (0..=n).map(|k| eval(t_lo + k as f64 * h)).sum()
    };
    let mut est = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let n = ((t_hi - t_lo) / h).round() as i64;
        // only odd points are new
        let add: f64 = (0..=n)
            .filter(|k| k % 2 == 1)
            .map(|k| eval(t_lo + k as f64 * h))
            .sum();
        sum += add;
        let next = sum * h;
        if (next - est).abs() <= rel_tol * next.abs().max(1e-300) {
            return next;
        }
        est = next;
    }
    est
}

/// `∫_a^b f(x) dx` by tanh-sinh with step halving.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let pi2 = std::f64::consts::FRAC_PI_2;
    let eval = |t: f64| -> f64 {
        let s = pi2 * t.sinh();
        let u = s.tanh();
        let w = pi2 * t.cosh() / s.cosh().powi(2);
        let x = mid + half * u;
        if x <= a || x >= b || w == 0.0 {
            return 0.0;
        }
        let v = f(x) * w * half;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let t_max = 3.5_f64;
    let mut h = 0.5;
    let mut sum: f64 = {
        let n = (2.0 * t_max / h).round() as i64;
        (0..=n).map(|k| eval(-t_max + k as f64 * h)).sum()
    };
    let mut est = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let n = (2.0 * t_max / h).round() as i64;
        let add: f64 = (0..=n)
            .filter(|k| k % 2 == 1)
            .map(|k| eval(-t_max + k as f64 * h))
            .sum();
        sum += add;
        let next = sum * h;
        if (next - est).abs() <= rel_tol * next.abs().max(1e-300) {
            return next;
        }
        est = next;
    }
    est
}

/// Exponential integral `E₁(x)` for `0 < x ≤ ~5` by its convergent series.
pub fn expint_e1(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// Tricomi `U(a,b,z)` from its Laplace-type integral, by exp-sinh quadrature.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> f64 {
    let lg = ln_gamma(a);
    integrate_half_line(
        |t| ((a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p() - z * t - lg).exp(),
        1e-13,
    )
}

/// Classical Whittaker `W_{κ,m}(z)` through `U`.
pub fn whittaker_w(kappa: f64, m: f64, z: f64) -> f64 {
    let m = if m - kappa + 0.5 > 0.0 { m } else { -m };
    (-z / 2.0).exp() * z.powf(m + 0.5) * tricomi_u(m - kappa + 0.5, 1.0 + 2.0 * m, z)
}

/// Gamma density with shape `alpha` and scale `beta` (`e^{−x/β}` convention).
pub fn gamma_pdf(alpha: f64, beta: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ((alpha - 1.0) * x.ln() - x / beta - alpha * beta.ln() - ln_gamma(alpha)).exp()
}

/// Density of `X₁ − X₂` for independent gammas, by direct convolution.
pub fn gamma_difference_pdf(a1: f64, b1: f64, a2: f64, b2: f64, y: f64) -> f64 {
    if y > 0.0 {
        integrate_half_line(|t| gamma_pdf(a1, b1, y + t) * gamma_pdf(a2, b2, t), 1e-13)
    } else {
        integrate_half_line(|t| gamma_pdf(a1, b1, t) * gamma_pdf(a2, b2, t - y), 1e-13)
    }
}

/// Gauss hypergeometric `₂F₁(a,b;c;x)` by plain term recursion, `|x| < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..100_000 {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && n > 5.0 {
            break;
        }
    }
    sum
}

/// `C_κ(I_p)` from the closed product formula for zonal polynomials at the
/// identity.
pub fn zonal_at_identity(kappa: &[u32], p: usize) -> f64 {
    let k: u32 = kappa.iter().sum();
    let l = kappa.len();
    let mut log_num = (2.0 * k as f64) * 2f64.ln() + ln_gamma(k as f64 + 1.0);
    let mut sign = 1.0;
    let half_p = p as f64 / 2.0;
    for (i, &ki) in kappa.iter().enumerate() {
        for s in 0..ki {
            let f = half_p - i as f64 / 2.0 + s as f64;
            if f == 0.0 {
                return 0.0;
            }
            sign *= f.signum();
            log_num += f.abs().ln();
        }
    }
    for i in 0..l {
        for j in (i + 1)..l {
            let f = 2.0 * kappa[i] as f64 - 2.0 * kappa[j] as f64 - i as f64 + j as f64;
            log_num += f.ln();
        }
    }
    let mut log_den = 0.0;
    for (i, &ki) in kappa.iter().enumerate() {
        log_den += ln_gamma((2 * ki as usize + l - i - 1) as f64 + 1.0);
    }
    sign * (log_num - log_den).exp()
}

/// Eigenvalues of a real symmetric matrix (row-major) by cyclic Jacobi
/// rotations, ascending.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i * n + j] * m[i * n + j];
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Monomial symmetric function `m_λ(x)` by brute-force enumeration of all
/// index assignments.
pub fn monomial_symmetric(lambda: &[u32], x: &[f64]) -> f64 {
    let n = x.len();
    let l = lambda.len();
    if l > n {
        return 0.0;
    }
    // sum over injective maps parts -> variables, divided by multiplicities
    let mut total = 0.0;
    let mut idx = vec![0usize; l];
    fn rec(
        pos: usize,
        lambda: &[u32],
        x: &[f64],
        idx: &mut Vec<usize>,
        used: &mut Vec<bool>,
        total: &mut f64,
    ) {
        if pos == lambda.len() {
            let mut prod = 1.0;
            for (i, &j) in idx.iter().enumerate() {
                prod *= x[j].powi(lambda[i] as i32);
            }
            *total += prod;
            return;
        }
        for j in 0..x.len() {
            if !used[j] {
                used[j] = true;
                idx[pos] = j;
                rec(pos + 1, lambda, x, idx, used, total);
                used[j] = false;
            }
        }
    }
    let mut used = vec![false; n];
    rec(0, lambda, x, &mut idx, &mut used, &mut total);
    let mut mult = 1.0;
    let mut i = 0;
    while i < l {
        let mut j = i;
        while j < l && lambda[j] == lambda[i] {
            j += 1;
        }
        for f in 1..=(j - i) {
            mult *= f as f64;
        }
        i = j;
    }
    total / mult
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_line_quadrature_basic() {
        let v = integrate_half_line(|x| (-x).exp(), 1e-14);
        assert!((v - 1.0).abs() < 1e-12);
        // Γ(0.5) with an endpoint singularity
        let v = integrate_half_line(|x| x.powf(-0.5) * (-x).exp(), 1e-14);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn e1_known_value() {
        assert!((expint_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
    }

    #[test]
    fn u_closed_forms() {
        assert!((tricomi_u(1.0, 2.0, 4.0) - 0.25).abs() < 1e-12);
        assert!((tricomi_u(2.0, 3.0, 2.0) - 0.25).abs() < 1e-12);
        let e1 = std::f64::consts::E * expint_e1(1.0);
        assert!((tricomi_u(1.0, 1.0, 1.0) - e1).abs() < 1e-12);
    }

    #[test]
    fn interval_quadrature() {
        let v = integrate_interval(|x| x.sqrt(), 0.0, 1.0, 1e-14);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zonal_identity_values() {
        assert!((zonal_at_identity(&[2], 2) - 8.0 / 3.0).abs() < 1e-13);
        assert!((zonal_at_identity(&[1, 1], 2) - 4.0 / 3.0).abs() < 1e-13);
        assert!((zonal_at_identity(&[1], 3) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn jacobi_matches_2x2() {
        let ev = jacobi_eigenvalues(&[4.0, 2.0, 2.0, 3.0], 2);
        let disc = (0.25f64 + 4.0).sqrt();
        assert!((ev[0] - (3.5 - disc)).abs() < 1e-12);
        assert!((ev[1] - (3.5 + disc)).abs() < 1e-12);
    }

    #[test]
    fn monomials() {
        let x = [1.0, 2.0, 3.0];
        assert!((monomial_symmetric(&[1], &x) - 6.0).abs() < 1e-14);
        assert!((monomial_symmetric(&[1, 1], &x) - 11.0).abs() < 1e-14);
        assert!((monomial_symmetric(&[2, 1], &x) - (2.0 + 3.0 + 4.0 + 18.0 + 9.0 + 12.0)).abs() < 1e-12);
    }
}
