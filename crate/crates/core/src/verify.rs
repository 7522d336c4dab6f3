//! Numerical verification of the integral identities, one verifier per
//! identity. Each side is computed along its own path and random stream and
//! the sides are compared under
//! `|lhs − rhs| ≤ max(atol, 3·sqrt(err_lhs² + err_rhs²))`.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{hpd_from_flat, spd_from_flat, RunConfig, RunSettings, ScalarReductionGrid};
use crate::error::{domain, Error, Result};
use crate::eval::{EvalResult, LogMoments, Method};
use crate::gamma::{log_gamma_p, log_gamma_p_complex, GammaParams, GammaSampler};
use crate::quadrature::gamma_expectation;
use crate::rng::RandomStream;
use crate::spd::{hermitize, logdet_identity_plus, logdet_pd, trace_product, ConeField, HpdMatrix, PosDef, SpdMatrix};
use crate::whittaker::{classical_whittaker, m_function, mc_log_mean, whittaker_w, whittaker_w_complex, MFunctionParams, WhittakerIndices};
use crate::zonal::{hyp2f1_eigen, SeriesParams};

pub const IDENTITIES: [&str; 6] = ["eq2.2", "thm2.1", "thm2.3", "thm3.1", "thm3.2", "scalar-reduction"];

/// One evaluated side of an identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub label: String,
    pub value: f64,
    pub err: f64,
    pub method: Method,
    pub effort: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Side {
    pub fn new(label: impl Into<String>, r: &EvalResult) -> Self {
        Self { label: label.into(), value: r.value(), err: r.abs_err, method: r.method, effort: r.effort, warnings: r.warnings.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub left: String,
    pub right: String,
    pub abs_diff: f64,
    pub combined_err: f64,
    pub tolerance: f64,
    /// `abs_diff / combined_err`, or `abs_diff / atol` when both sides are exact.
    pub z_or_ratio: f64,
    pub pass: bool,
}

pub fn compare(l: &Side, r: &Side, atol: f64) -> Comparison {
    let abs_diff = (l.value - r.value).abs();
    let combined_err = l.err.hypot(r.err);
    let tolerance = atol.max(3.0 * combined_err);
    let z_or_ratio = if combined_err > 0.0 { abs_diff / combined_err } else { abs_diff / atol };
    Comparison {
        left: l.label.clone(),
        right: r.label.clone(),
        abs_diff,
        combined_err,
        tolerance,
        z_or_ratio,
        pass: abs_diff <= tolerance && abs_diff.is_finite(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity_id: String,
    pub params: Value,
    pub lhs: Side,
    pub rhs: Vec<Side>,
    pub comparisons: Vec<Comparison>,
    /// Fields of the comparison closest to failing.
    pub abs_diff: f64,
    pub combined_err: f64,
    pub z_or_ratio: f64,
    pub pass: bool,
    pub seed: u64,
    pub samples: usize,
    /// Seconds; only recorded on request so that reports stay reproducible.
    pub wall_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Reports of one `verify` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRun {
    pub seed: u64,
    pub samples: usize,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
}

impl VerificationRun {
    pub fn new(cfg: &RunSettings, reports: Vec<VerificationReport>) -> Self {
        Self { seed: cfg.seed, samples: cfg.samples, pass: reports.iter().all(|r| r.pass), reports }
    }
}

struct Draft {
    id: &'static str,
    params: Value,
    lhs: Side,
    rhs: Vec<Side>,
    comparisons: Vec<Comparison>,
    notes: Vec<String>,
}

impl Draft {
    fn finish(self, cfg: &RunSettings, started: Instant) -> VerificationReport {
        let worst = self
            .comparisons
            .iter()
            .max_by(|a, b| (a.abs_diff / a.tolerance).total_cmp(&(b.abs_diff / b.tolerance)))
            .cloned()
            .expect("at least one comparison");
        VerificationReport {
            identity_id: self.id.to_string(),
            params: self.params,
            lhs: self.lhs,
            rhs: self.rhs,
            pass: self.comparisons.iter().all(|c| c.pass),
            comparisons: self.comparisons,
            abs_diff: worst.abs_diff,
            combined_err: worst.combined_err,
            z_or_ratio: worst.z_or_ratio,
            seed: cfg.seed,
            samples: cfg.samples,
            wall_time: cfg.timing.then(|| started.elapsed().as_secs_f64()),
            notes: self.notes,
        }
    }
}

fn root(cfg: &RunSettings, id: &str) -> RandomStream {
    RandomStream::new(cfg.seed, 0).labelled(id)
}

fn flat<T: ConeField>(m: &PosDef<T>) -> Value {
    let p = m.dim();
    let re: Vec<f64> = (0..p * p).map(|k| m.matrix()[(k / p, k % p)].real()).collect();
    let im: Vec<f64> = (0..p * p).map(|k| m.matrix()[(k / p, k % p)].imaginary()).collect();
    if im.iter().all(|&x| x == 0.0) {
        json!(re)
    } else {
        json!({ "re": re, "im": im })
    }
}

/// `E[f(S)]`, `S ~ Gamma(shape, 1)`, as an [`EvalResult`] with warnings.
fn quad(shape: f64, tol: f64, f: impl Fn(f64) -> f64) -> EvalResult {
    let q = gamma_expectation(shape, f, tol);
    let r = EvalResult::from_value(q.value, q.abs_err, Method::Quadrature, q.nodes as u64);
    if q.converged {
        r
    } else {
        r.with_warning(format!("quadrature did not reach tolerance with {} nodes", q.nodes))
    }
}

/// `M(α, (p+1)/2; A) = Γ_p(α) |A|^{−α}`.
pub fn verify_eq_2_2(alpha: f64, a: &SpdMatrix, cfg: &RunSettings) -> Result<VerificationReport> {
    let started = Instant::now();
    let p = a.dim();
    let d = (p as f64 + 1.0) / 2.0;
    let params = MFunctionParams::new(alpha, d, p)?;
    let rng = root(cfg, "eq2.2");
    let lhs = Side::new("M-function", &m_function(&params, a, &cfg.effort(), &rng.labelled("lhs"))?);
    let rhs = Side::new("closed form", &EvalResult::from_log(log_gamma_p(p, alpha)? - alpha * a.logdet(), 1.0, 0.0, Method::ClosedForm, 0));
    let comparisons = vec![compare(&lhs, &rhs, cfg.atol)];
    Ok(Draft { id: "eq2.2", params: json!({ "p": p, "alpha": alpha, "A": flat(a) }), lhs, rhs: vec![rhs], comparisons, notes: vec![] }
        .finish(cfg, started))
}

/// The reparametrized integral representation of `W_{α,β}`.
pub fn verify_thm_2_1(alpha: f64, beta: f64, a: &SpdMatrix, cfg: &RunSettings) -> Result<VerificationReport> {
    let started = Instant::now();
    let p = a.dim();
    let pf = p as f64;
    let q = (pf + 1.0) / 4.0;
    let d = 2.0 * q;
    if !(beta - alpha > (pf - 3.0) / 4.0) {
        return domain(format!("needs β − α > {}, got {}", (pf - 3.0) / 4.0, beta - alpha));
    }
    let mu = beta - alpha + q;
    let nu = alpha + beta + q;
    let rng = root(cfg, "thm2.1");
    let half = a.scale(0.5)?;
    let lg_mu = log_gamma_p(p, mu)?;
    let lhs = if p == 1 {
        let z = a.matrix()[(0, 0)];
        quad(mu, cfg.tol, |s| ((nu - 1.0) * (2.0 * s / z).ln_1p() - s).exp()).scale_log(lg_mu - mu * half.logdet())
    } else {
        let law = GammaParams::new(mu, half.clone())?;
        mc_log_mean(&law, cfg.samples, &rng.labelled("lhs"), cfg.exec, |x, _| {
            (1.0, (nu - d) * logdet_identity_plus(x).expect("PD") - trace_product(a.matrix(), x) / 2.0)
        })
        .scale_log(lg_mu - mu * half.logdet())
    };
    let w = whittaker_w(&WhittakerIndices::new(alpha, beta, p), a, &cfg.effort(), &rng.labelled("rhs"))?;
    let rhs = w.scale_log(-(beta + q) * a.logdet() + lg_mu + a.trace() / 2.0);
    let (lhs, rhs) = (Side::new("integral", &lhs), Side::new("Whittaker form", &rhs));
    let comparisons = vec![compare(&lhs, &rhs, cfg.atol)];
    Ok(Draft {
        id: "thm2.1",
        params: json!({ "p": p, "alpha": alpha, "beta": beta, "A": flat(a) }),
        lhs,
        rhs: vec![rhs],
        comparisons,
        notes: vec![],
    }
    .finish(cfg, started))
}

fn symmetric_eigen(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Laplace-type integral of `W_{α,β}(BZ)` against its two hypergeometric
/// closed forms.
pub fn verify_thm_2_3(
    alpha: f64,
    beta: f64,
    gamma: f64,
    a: &SpdMatrix,
    b: &SpdMatrix,
    max_degree: Option<usize>,
    cfg: &RunSettings,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let p = a.dim();
    if b.dim() != p {
        return Err(Error::DimensionMismatch { expected: p, got: b.dim() });
    }
    let pf = p as f64;
    let q = (pf + 1.0) / 4.0;
    let d = 2.0 * q;
    let bound = (pf - 3.0) / 4.0;
    for (name, v) in [("γ + β", gamma + beta), ("γ − β", gamma - beta), ("β − α", beta - alpha)] {
        if !(v > bound) {
            return domain(format!("needs {name} > {bound}, got {v}"));
        }
    }
    if !(gamma > (pf - 1.0) / 2.0) {
        return domain(format!("left side needs γ > {}, got {gamma}", (pf - 1.0) / 2.0));
    }
    let rng = root(cfg, "thm2.3");
    let idx = WhittakerIndices::new(alpha, beta, p);
    let (mu, nu) = (idx.mu(), idx.nu());
    let lg_gamma = log_gamma_p(p, gamma)?;
    let bh = b.sqrt();
    let mut notes = Vec::new();

    let lhs = if p == 1 {
        let (za, zb) = (a.matrix()[(0, 0)], b.matrix()[(0, 0)]);
        let eff = cfg.effort();
        let inner = RandomStream::new(cfg.seed, 0);
        let r = quad(gamma, cfg.tol, |s| {
            let t = SpdMatrix::diagonal(&[zb * s / za]).expect("positive");
            whittaker_w(&idx, &t, &eff, &inner).map(|w| w.value()).unwrap_or(f64::NAN)
        });
        r.scale_log(lg_gamma - gamma * za.ln())
    } else {
        let law = GammaParams::new(gamma, a.clone())?;
        let inner = GammaSampler::new(&GammaParams::new(mu, PosDef::identity(p))?);
        let e = nu - d;
        let m = cfg.inner;
        mc_log_mean(&law, cfg.samples, &rng.labelled("lhs"), cfg.exec, |z, r| {
            let t = hermitize(bh.matrix() * z * bh.matrix());
            let lt = logdet_pd(&t).expect("PD");
            let mut v = alpha * lt - t.trace() / 2.0;
            if e.abs() > 1e-14 {
                let mut acc = LogMoments::new();
                for _ in 0..m.max(1) {
                    acc.push_log(1.0, e * (logdet_pd(&(&t + inner.sample_matrix(r))).expect("PD") - lt));
                }
                v += acc.finish(Method::McImportance).log_abs;
            }
            (1.0, v)
        })
        .scale_log(lg_gamma - gamma * a.logdet())
    };
    let lhs = Side::new("integral", &lhs);

    let gammas = log_gamma_p(p, gamma + beta + q)? + log_gamma_p(p, gamma - beta + q)? - log_gamma_p(p, gamma - alpha + d)?;
    let k = max_degree.unwrap_or(cfg.max_degree);
    let mut rhs = Vec::new();

    // first closed form, argument I − B^{1/2}(A + B/2)^{−1}B^{1/2}
    let apb = a.add(&b.scale(0.5)?)?;
    let inner_m = bh.matrix() * apb.inverse().matrix() * bh.matrix();
    let x1 = DMatrix::identity(p, p) - hermitize(inner_m);
    let sp1 = SeriesParams::new(q + beta - alpha, q + gamma + beta, d + gamma - alpha).with_max_degree(k).with_tail_tol(cfg.tail_tol);
    let ev_c = symmetric_eigen(&(bh.inverse().matrix() * a.matrix() * bh.inverse().matrix()));
    if !ev_c.iter().all(|&l| l > 0.5) {
        notes.push("2B^{-1/2}AB^{-1/2} > I does not hold; first form evaluated on its series domain".into());
    }
    match hyp2f1_eigen(&sp1, &symmetric_eigen(&x1)) {
        Ok(f) => {
            let pre = -(gamma + beta + q) * apb.logdet() + (beta + q) * b.logdet() + gammas;
            rhs.push(Side::new("first hypergeometric form", &f.scale_log(pre)));
        }
        Err(Error::Domain(m)) => notes.push(format!("first form skipped: {m}")),
        Err(e) => return Err(e),
    }

    // second closed form, argument −C with C = B^{−1/2}AB^{−1/2} − I/2
    let neg_c: Vec<f64> = ev_c.iter().map(|l| 0.5 - l).collect();
    if neg_c.iter().all(|x| x.abs() < 1.0) {
        let sp2 = SeriesParams::new(q + gamma - beta, q + gamma + beta, d + gamma - alpha).with_max_degree(k).with_tail_tol(cfg.tail_tol);
        let f = hyp2f1_eigen(&sp2, &neg_c)?;
        rhs.push(Side::new("second hypergeometric form", &f.scale_log(-gamma * b.logdet() + gammas)));
    } else {
        notes.push("second form skipped: spectral radius of C is not below one".into());
    }
    if rhs.is_empty() {
        return domain("neither hypergeometric form converges for this argument");
    }
    let mut comparisons: Vec<Comparison> = rhs.iter().map(|r| compare(&lhs, r, cfg.atol)).collect();
    if rhs.len() == 2 {
        comparisons.push(compare(&rhs[0], &rhs[1], cfg.atol));
    }
    Ok(Draft {
        id: "thm2.3",
        params: json!({ "p": p, "alpha": alpha, "beta": beta, "gamma": gamma, "A": flat(a), "B": flat(b), "max_degree": k }),
        lhs,
        rhs,
        comparisons,
        notes,
    }
    .finish(cfg, started))
}

/// `∫ |det(I+Z)|^{−α} e^{−tr(AZ)} dZ` over the Hermitian cone.
pub fn verify_thm_3_1(alpha: f64, a: &HpdMatrix, cfg: &RunSettings) -> Result<VerificationReport> {
    let started = Instant::now();
    let p = a.dim();
    let pf = p as f64;
    let rng = root(cfg, "thm3.1");
    let half = a.scale(0.5)?;
    let lg = log_gamma_p_complex(p, pf)?;
    let lhs = if p == 1 {
        let z = a.matrix()[(0, 0)].re;
        quad(1.0, cfg.tol, |s| (-alpha * (2.0 * s / z).ln_1p() - s).exp()).scale_log(lg - half.logdet())
    } else {
        let law = GammaParams::new(pf, half.clone())?;
        mc_log_mean(&law, cfg.samples, &rng.labelled("lhs"), cfg.exec, |x, _| {
            (1.0, -alpha * logdet_identity_plus(x).expect("PD") - trace_product(a.matrix(), x) / 2.0)
        })
        .scale_log(lg - pf * half.logdet())
    };
    let w = whittaker_w_complex(&WhittakerIndices::new(-alpha / 2.0, (pf - alpha) / 2.0, p), a, &cfg.effort(), &rng.labelled("rhs"))?;
    let rhs = w.scale_log((alpha / 2.0 - pf) * a.logdet() + lg + a.trace() / 2.0);
    let (lhs, rhs) = (Side::new("integral", &lhs), Side::new("Whittaker form", &rhs));
    let comparisons = vec![compare(&lhs, &rhs, cfg.atol)];
    Ok(Draft { id: "thm3.1", params: json!({ "p": p, "alpha": alpha, "A": flat(a) }), lhs, rhs: vec![rhs], comparisons, notes: vec![] }
        .finish(cfg, started))
}

/// The shifted-cone integral over `X > U` against its complex Whittaker form.
pub fn verify_thm_3_2(
    alpha: f64,
    q: f64,
    b: &HpdMatrix,
    u: &HpdMatrix,
    m: &HpdMatrix,
    cfg: &RunSettings,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let p = b.dim();
    for x in [u.dim(), m.dim()] {
        if x != p {
            return Err(Error::DimensionMismatch { expected: p, got: x });
        }
    }
    let pf = p as f64;
    if !(2.0 * q > pf - 1.0) {
        return domain(format!("needs 2q > {}, got q = {q}", pf - 1.0));
    }
    let mut notes = vec![format!("enforced bound 2q > p − 1 holds; stated bound q > p/2 {}", if q > pf / 2.0 { "holds" } else { "does not hold" })];
    let rng = root(cfg, "thm3.2");
    let ub = u.add(b)?;
    let lg = log_gamma_p_complex(p, 2.0 * q)?;
    let mu_tr = trace_product(m.matrix(), u.matrix());
    let lhs = if p == 1 {
        let (zm, zub) = (m.matrix()[(0, 0)].re, ub.matrix()[(0, 0)].re);
        let e = 2.0 * alpha - 1.0;
        quad(2.0 * q, cfg.tol, |s| (e * (2.0 * s / zm + zub).ln() - s).exp()).scale_log(lg - 2.0 * q * (zm / 2.0).ln() - mu_tr)
    } else {
        let law = GammaParams::new(2.0 * q, m.clone())?;
        let e = 2.0 * alpha - pf;
        mc_log_mean(&law, cfg.samples, &rng.labelled("lhs"), cfg.exec, |y, _| {
            (1.0, e * logdet_pd(&(y + ub.matrix())).expect("PD"))
        })
        .scale_log(lg - 2.0 * q * m.logdet() - mu_tr)
    };
    let s = ub.sqrt();
    let t = PosDef::from_matrix(hermitize(s.matrix() * m.matrix() * s.matrix()))?;
    let w = whittaker_w_complex(&WhittakerIndices::new(alpha - q, alpha + q - pf / 2.0, p), &t, &cfg.effort(), &rng.labelled("rhs"))?;
    let bu = b.as_hermitian().sub(u.as_hermitian())?;
    let rhs = w.scale_log(lg + (alpha + q - pf) * ub.logdet() - (alpha + q) * m.logdet() + trace_product(bu.matrix(), m.matrix()) / 2.0);
    let (lhs, rhs) = (Side::new("integral", &lhs), Side::new("Whittaker form", &rhs));
    let comparisons = vec![compare(&lhs, &rhs, cfg.atol)];
    if lhs.err == 0.0 && rhs.err == 0.0 {
        notes.push("both sides exact for these parameters".into());
    }
    Ok(Draft {
        id: "thm3.2",
        params: json!({ "p": p, "alpha": alpha, "q": q, "B": flat(b), "U": flat(u), "M": flat(m) }),
        lhs,
        rhs: vec![rhs],
        comparisons,
        notes,
    }
    .finish(cfg, started))
}

/// Matrix engine at `p = 1` against the classical Tricomi form, and the
/// complex engine against the real one.
pub fn verify_scalar_reduction(grid: &ScalarReductionGrid, cfg: &RunSettings) -> Result<VerificationReport> {
    let started = Instant::now();
    let rng = root(cfg, "scalar-reduction");
    let eff = cfg.effort();
    let mut comparisons = Vec::new();
    let mut worst: Option<(f64, Side, Vec<Side>)> = None;
    for &[a, b] in &grid.indices {
        let idx = WhittakerIndices::new(a, b, 1);
        for &z in &grid.z {
            let tag = format!("W[{a},{b}]({z})");
            let engine = Side::new(format!("engine {tag}"), &whittaker_w(&idx, &SpdMatrix::diagonal(&[z])?, &eff, &rng)?);
            let classical = Side::new(format!("classical {tag}"), &classical_whittaker(a, b, z, cfg.tol)?);
            let complex = Side::new(format!("complex {tag}"), &whittaker_w_complex(&idx, &HpdMatrix::diagonal(&[z])?, &eff, &rng)?);
            let c1 = compare(&engine, &classical, cfg.atol);
            let c2 = compare(&complex, &engine, cfg.atol);
            let r = (c1.abs_diff / c1.tolerance).max(c2.abs_diff / c2.tolerance);
            if worst.as_ref().is_none_or(|w| r > w.0) {
                worst = Some((r, engine.clone(), vec![classical.clone(), complex.clone()]));
            }
            comparisons.push(c1);
            comparisons.push(c2);
        }
    }
    let (_, lhs, rhs) = worst.ok_or_else(|| Error::Invalid("empty scalar reduction grid".into()))?;
    Ok(Draft { id: "scalar-reduction", params: json!({ "z": grid.z, "indices": grid.indices }), lhs, rhs, comparisons, notes: vec![] }
        .finish(cfg, started))
}

/// Runs every default case of one identity.
pub fn verify_identity(id: &str, config: &RunConfig) -> Result<Vec<VerificationReport>> {
    let cfg = &config.run;
    match id {
        "eq2.2" => config.eq2_2.iter().map(|c| verify_eq_2_2(c.alpha, &spd_from_flat(&c.a)?, cfg)).collect(),
        "thm2.1" => config.thm2_1.iter().map(|c| verify_thm_2_1(c.alpha, c.beta, &spd_from_flat(&c.a)?, cfg)).collect(),
        "thm2.3" => config
            .thm2_3
            .iter()
            .map(|c| verify_thm_2_3(c.alpha, c.beta, c.gamma, &spd_from_flat(&c.a)?, &spd_from_flat(&c.b)?, c.max_degree, cfg))
            .collect(),
        "thm3.1" => config.thm3_1.iter().map(|c| verify_thm_3_1(c.alpha, &hpd_from_flat(&c.a, c.a_im.as_deref())?, cfg)).collect(),
        "thm3.2" => config
            .thm3_2
            .iter()
            .map(|c| {
                verify_thm_3_2(
                    c.alpha,
                    c.q,
                    &hpd_from_flat(&c.b, c.b_im.as_deref())?,
                    &hpd_from_flat(&c.u, c.u_im.as_deref())?,
                    &hpd_from_flat(&c.m, c.m_im.as_deref())?,
                    cfg,
                )
            })
            .collect(),
        "scalar-reduction" => Ok(vec![verify_scalar_reduction(&config.scalar_reduction, cfg)?]),
        _ => Err(Error::Invalid(format!("unknown identity {id:?}; expected one of {}", IDENTITIES.join(", ")))),
    }
}

/// Every identity over its default cases.
pub fn verify_all(config: &RunConfig) -> Result<VerificationRun> {
    let mut reports = Vec::new();
    for id in IDENTITIES {
        reports.extend(verify_identity(id, config)?);
    }
    Ok(VerificationRun::new(&config.run, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunSettings {
        RunSettings { samples: 20_000, ..RunSettings::default() }
    }

    #[test]
    fn eq_2_2_examples() {
        let cfg = quick();
        let r = verify_eq_2_2(1.0, &SpdMatrix::identity(1), &cfg).unwrap();
        assert!(r.pass && (r.rhs[0].value - 1.0).abs() < 1e-15);
        let r = verify_eq_2_2(1.5, &SpdMatrix::identity(2), &cfg).unwrap();
        assert!(r.pass && (r.rhs[0].value - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!(verify_eq_2_2(0.4, &SpdMatrix::identity(2), &cfg).is_err());
    }

    #[test]
    fn thm_2_1_examples() {
        let cfg = quick();
        let r = verify_thm_2_1(0.0, 0.5, &SpdMatrix::diagonal(&[2.0]).unwrap(), &cfg).unwrap();
        assert!(r.pass);
        assert!((r.lhs.value - 0.5).abs() < 1e-12);
        let r = verify_thm_2_1(-0.25, 1.0, &SpdMatrix::identity(2), &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(verify_thm_2_1(1.0, 0.0, &SpdMatrix::identity(2), &cfg).is_err());
    }

    #[test]
    fn thm_2_3_scalar_cases() {
        let cfg = quick();
        let one = SpdMatrix::identity(1);
        let r = verify_thm_2_3(0.0, 0.5, 1.0, &SpdMatrix::diagonal(&[2.0]).unwrap(), &one, Some(100), &cfg).unwrap();
        assert_eq!(r.rhs.len(), 1);
        assert!(r.pass && (r.lhs.value - 0.4).abs() < 1e-9 && (r.rhs[0].value - 0.4).abs() < 1e-9, "{r:?}");
        let r = verify_thm_2_3(0.0, 0.5, 1.0, &SpdMatrix::diagonal(&[0.6]).unwrap(), &one, None, &cfg).unwrap();
        assert_eq!(r.rhs.len(), 2);
        for s in std::iter::once(&r.lhs).chain(&r.rhs) {
            assert!((s.value - 1.0 / 1.1).abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn thm_2_3_with_non_identity_scale() {
        // closed form 1/3 at B = 2, A = 2 when W has the elementary reduction
        let cfg = quick();
        let r = verify_thm_2_3(0.0, 0.5, 1.0, &SpdMatrix::diagonal(&[2.0]).unwrap(), &SpdMatrix::diagonal(&[2.0]).unwrap(), Some(120), &cfg)
            .unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.lhs.value - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn thm_3_1_examples() {
        let cfg = quick();
        let r = verify_thm_3_1(2.0, &HpdMatrix::identity(1), &cfg).unwrap();
        let want = 1.0 - std::f64::consts::E * conewhit_oracle::expint_e1(1.0);
        assert!(r.pass && (r.lhs.value - want).abs() < 1e-9 && (r.rhs[0].value - want).abs() < 1e-9);
        let r = verify_thm_3_1(0.0, &HpdMatrix::identity(1), &cfg).unwrap();
        assert!((r.rhs[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thm_3_2_bounds() {
        let cfg = quick();
        let one = HpdMatrix::identity(1);
        let r = verify_thm_3_2(0.5, 0.5, &one, &HpdMatrix::diagonal(&[1e-3]).unwrap(), &one, &cfg).unwrap();
        assert!(r.pass && r.notes[0].contains("does not hold"));
        let r4 = verify_thm_3_2(0.5, 0.5, &one, &HpdMatrix::diagonal(&[1e-4]).unwrap(), &one, &cfg).unwrap();
        assert!((r.lhs.value - r4.lhs.value).abs() < 1e-3);
        let two = HpdMatrix::identity(2);
        assert!(verify_thm_3_2(1.0, 0.4, &two, &two, &two, &cfg).is_err());
    }

    #[test]
    fn report_round_trips_through_json() {
        let r = verify_thm_2_1(0.2, 0.9, &SpdMatrix::from_row_major(2, &[1.2, 0.3, 0.3, 0.8]).unwrap(), &quick()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(r.wall_time.is_none());
    }
}
