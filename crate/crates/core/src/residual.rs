//! Growth-decay residuals `Y = X₁ − X₂` of independent gamma variables: the
//! scalar two-branch Whittaker density, the oriented matrix density in the
//! real and complex cases, samplers and orientation probabilities.
//!
//! The scalar model uses scales (`x^{α−1} e^{−x/β}`), the matrix model uses
//! rate matrices (`|X|^{α−d} e^{−tr(BX)}`); at `p = 1` the two agree with
//! `B = 1/β`.
//!
//! The matrix density is the law of `Y` conditional on `Y > 0` or `Y < 0`:
//! `g(Y) = g_j(Y) / (c₁ + c₂)` where `g_j` is the unconditional density on
//! the branch and `c_j` its mass.

use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::eval::{EvalResult, LogMoments, Method};
use crate::gamma::{log_gamma_cone, GammaParams, GammaSampler};
use crate::parallel::{map_chunks, Exec};
use crate::rng::RandomStream;
use crate::spd::{classify_raw, hermitize, logdet_pd, trace_product, ConeField, Definiteness, Hermitian, PosDef};
use crate::whittaker::{classical_whittaker, whittaker_cone, Effort, WhittakerIndices};

/// Quadrature tolerance for the scalar density.
pub const SCALAR_TOL: f64 = 1e-12;

/// Fewest draws of the requested class accepted by the moment check.
pub const MIN_CLASS_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarResidualParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl ScalarResidualParams {
    pub fn new(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        if ![alpha1, alpha2, beta1, beta2].iter().all(|&v| v > 0.0 && v.is_finite()) {
            return domain("scalar residual needs positive finite shapes and scales");
        }
        Ok(Self { alpha1, alpha2, beta1, beta2 })
    }

    pub fn beta0(&self) -> f64 {
        1.0 / self.beta1 + 1.0 / self.beta2
    }

    fn log_c(a_own: f64, a_other: f64, b_own: f64, b_other: f64) -> f64 {
        -(ln_gamma(a_own) + (a_own - a_other) / 2.0 * (b_own.ln() - b_other.ln()) + (a_own + a_other) / 2.0 * (b_own + b_other).ln())
    }

    pub fn log_c1(&self) -> f64 {
        Self::log_c(self.alpha1, self.alpha2, self.beta1, self.beta2)
    }

    pub fn log_c2(&self) -> f64 {
        Self::log_c(self.alpha2, self.alpha1, self.beta2, self.beta1)
    }

    pub fn swapped(&self) -> Self {
        Self { alpha1: self.alpha2, alpha2: self.alpha1, beta1: self.beta2, beta2: self.beta1 }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g1 = Gamma::new(self.alpha1, self.beta1).expect("validated");
        let g2 = Gamma::new(self.alpha2, self.beta2).expect("validated");
        g1.sample(rng) - g2.sample(rng)
    }
}

/// `ln f(w)` on the positive branch, `w > 0`.
fn scalar_branch_log(q: &ScalarResidualParams, w: f64) -> Result<f64> {
    let (a1, a2, b1, b2) = (q.alpha1, q.alpha2, q.beta1, q.beta2);
    let z = q.beta0() * w;
    // W_{κ,m} = W_{κ,−m}: the sign of m is chosen so the Tricomi shape is α₂ > 0
    let wh = classical_whittaker((a1 - a2) / 2.0, (a1 + a2 - 1.0) / 2.0, z, SCALAR_TOL)?;
    Ok(q.log_c1() + ((a1 + a2) / 2.0 - 1.0) * w.ln() - w / 2.0 * (1.0 / b1 - 1.0 / b2) + wh.log_abs)
}

/// Density of `x₁ − x₂` at `y ≠ 0`.
pub fn scalar_residual_density(params: &ScalarResidualParams, y: f64) -> Result<f64> {
    if y > 0.0 {
        Ok(scalar_branch_log(params, y)?.exp())
    } else if y < 0.0 {
        Ok(scalar_branch_log(&params.swapped(), -y)?.exp())
    } else {
        domain("the residual density is not evaluated at y = 0")
    }
}

/// `n` draws of `x₁ − x₂`, in chunk order.
pub fn sample_scalar_residuals(params: &ScalarResidualParams, n: usize, rng: &RandomStream, exec: Exec) -> Vec<f64> {
    map_chunks(n, rng, exec, |r, len| (0..len).map(|_| params.sample(r)).collect::<Vec<_>>()).concat()
}

/// Shapes and rate matrices of the two gamma inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualParams<T: ConeField> {
    pub alpha1: f64,
    pub alpha2: f64,
    pub b1: PosDef<T>,
    pub b2: PosDef<T>,
}

pub type MatrixResidualParams = ResidualParams<f64>;
pub type ComplexResidualParams = ResidualParams<Complex64>;

impl<T: ConeField> ResidualParams<T> {
    pub fn new(alpha1: f64, alpha2: f64, b1: PosDef<T>, b2: PosDef<T>) -> Result<Self> {
        if b1.dim() != b2.dim() {
            return Err(Error::DimensionMismatch { expected: b1.dim(), got: b2.dim() });
        }
        GammaParams::new(alpha1, b1.clone())?;
        GammaParams::new(alpha2, b2.clone())?;
        Ok(Self { alpha1, alpha2, b1, b2 })
    }

    pub fn p(&self) -> usize {
        self.b1.dim()
    }

    pub fn swapped(&self) -> Self {
        Self { alpha1: self.alpha2, alpha2: self.alpha1, b1: self.b2.clone(), b2: self.b1.clone() }
    }

    /// `ln δ`, the log normalizing constant of the joint density.
    pub fn log_delta(&self) -> f64 {
        let p = self.p();
        self.alpha1 * self.b1.logdet() + self.alpha2 * self.b2.logdet()
            - log_gamma_cone::<T>(p, self.alpha1).expect("validated")
            - log_gamma_cone::<T>(p, self.alpha2).expect("validated")
    }

    fn sum(&self) -> PosDef<T> {
        self.b1.add(&self.b2).expect("sum of PD is PD")
    }

    /// Indices of the Whittaker factor of the positive branch.
    pub fn whittaker_indices(&self) -> WhittakerIndices {
        let d = T::dim_shift(self.p());
        WhittakerIndices::new((self.alpha1 - self.alpha2) / 2.0, (self.alpha1 + self.alpha2) / 2.0 - d / 2.0, self.p())
    }

    /// `ln` of the constant in `g₁ = K · e^{tr((B₂−B₁)Y)/2} |Y|^{(α₁+α₂)/2−d} W(T)`.
    fn log_k_whittaker(&self) -> f64 {
        let p = self.p();
        self.alpha1 * self.b1.logdet() + self.alpha2 * self.b2.logdet()
            - log_gamma_cone::<T>(p, self.alpha1).expect("validated")
            - (self.alpha1 + self.alpha2) / 2.0 * self.sum().logdet()
    }
}

/// Precomputed branch constants and branch masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientedDensityParts {
    pub p: usize,
    pub log_k1: f64,
    pub log_k2: f64,
    /// `P(Y > 0)`.
    pub c1: EvalResult,
    /// `P(Y < 0)`.
    pub c2: EvalResult,
}

impl OrientedDensityParts {
    pub fn c(&self) -> f64 {
        self.c1.value() + self.c2.value()
    }

    pub fn c_err(&self) -> f64 {
        self.c1.abs_err.hypot(self.c2.abs_err)
    }
}

/// Nested importance sampler for one branch: `Y ~ MG(min(α_own, d), B_own)`
/// and an unbiased estimate of the unconditional density `g_j(Y)`.
struct Branch<T: ConeField> {
    alpha_own: f64,
    b_own: PosDef<T>,
    s_half: DMatrix<T>,
    log_s: f64,
    log_k: f64,
    e: f64,
    d: f64,
    proposal: GammaSampler<T>,
    log_q_norm: f64,
    q_shape: f64,
    inner: GammaSampler<T>,
}

impl<T: ConeField> Branch<T> {
    fn new(params: &ResidualParams<T>) -> Self {
        let p = params.p();
        let d = T::dim_shift(p);
        let s = params.sum();
        let q_shape = params.alpha1.min(d);
        let q = GammaParams::new(q_shape, params.b1.clone()).expect("shape within range");
        let log_k = params.alpha1 * params.b1.logdet() + params.alpha2 * params.b2.logdet()
            - log_gamma_cone::<T>(p, params.alpha1).expect("validated")
            - params.alpha2 * s.logdet();
        Self {
            alpha_own: params.alpha1,
            b_own: params.b1.clone(),
            s_half: s.sqrt().matrix().clone(),
            log_s: s.logdet(),
            log_k,
            e: params.alpha1 - d,
            d,
            log_q_norm: q.log_normalizer(),
            proposal: GammaSampler::new(&q),
            q_shape,
            inner: GammaSampler::new(&GammaParams::new(params.alpha2, PosDef::identity(p)).expect("validated")),
        }
    }

    /// `ln ĝ(Y)` with `m` inner draws; exact when `α_own = d`.
    fn log_g(&self, y: &DMatrix<T>, ly: f64, m: usize, rng: &mut RandomStream) -> f64 {
        let tr = trace_product(self.b_own.matrix(), y);
        let mut v = self.log_k + (self.alpha_own - self.d) * ly - tr;
        if self.e != 0.0 {
            let t = hermitize(&self.s_half * y * &self.s_half);
            let lt = ly + self.log_s;
            let mut acc = LogMoments::new();
            for _ in 0..m.max(1) {
                let x0 = self.inner.sample_matrix(rng);
                let l = logdet_pd(&(&t + x0)).expect("sum of PD is PD");
                acc.push_log(1.0, self.e * (l - lt));
            }
            v += acc.finish(Method::McImportance).log_abs;
        }
        v
    }

    fn log_q(&self, y: &DMatrix<T>, ly: f64) -> f64 {
        self.log_q_norm + (self.q_shape - self.d) * ly - trace_product(self.b_own.matrix(), y)
    }
}

/// Branch masses `c₁ = P(Y > 0)` and `c₂ = P(Y < 0)`: closed form at
/// `p = 1`, nested importance sampling otherwise.
pub fn compute_normalizers<T: ConeField>(params: &ResidualParams<T>, effort: &Effort, rng: &RandomStream) -> Result<OrientedDensityParts> {
    let p = params.p();
    let (c1, c2) = if p == 1 {
        let (r1, r2) = (params.b1.matrix()[(0, 0)].real(), params.b2.matrix()[(0, 0)].real());
        let c1 = beta_reg(params.alpha2, params.alpha1, r2 / (r1 + r2));
        let c2 = beta_reg(params.alpha1, params.alpha2, r1 / (r1 + r2));
        (EvalResult::closed_form(c1), EvalResult::closed_form(c2))
    } else {
        if effort.samples < 2 {
            return Err(Error::Invalid("Monte Carlo needs at least two samples".into()));
        }
        let mass = |q: &ResidualParams<T>, label: &str| {
            let br = Branch::new(q);
            let root = rng.labelled(label);
            let chunks = map_chunks(effort.samples, &root, effort.exec, |r, len| {
                let mut m = LogMoments::new();
                for _ in 0..len {
                    let y = br.proposal.sample_matrix(r);
                    let ly = logdet_pd(&y).expect("gamma draws are PD");
                    m.push_log(1.0, br.log_g(&y, ly, effort.inner, r) - br.log_q(&y, ly));
                }
                m
            });
            let mut acc = LogMoments::new();
            chunks.iter().for_each(|c| acc.merge(c));
            acc.finish(Method::McImportance)
        };
        (mass(params, "mass-positive"), mass(&params.swapped(), "mass-negative"))
    };
    Ok(OrientedDensityParts { p, log_k1: params.log_k_whittaker(), log_k2: params.swapped().log_k_whittaker(), c1, c2 })
}

fn branch_log_density<T: ConeField>(
    q: &ResidualParams<T>,
    log_k: f64,
    w: &PosDef<T>,
    effort: &Effort,
    rng: &RandomStream,
) -> Result<EvalResult> {
    let d = T::dim_shift(q.p());
    let s = q.sum();
    let t = PosDef::from_matrix(hermitize(s.sqrt().matrix() * w.matrix() * s.sqrt().matrix()))?;
    let wh = whittaker_cone(&q.whittaker_indices(), &t, effort, rng)?;
    let diff = q.b2.as_hermitian().sub(q.b1.as_hermitian())?;
    let lin = trace_product(diff.matrix(), w.matrix()) / 2.0;
    Ok(wh.scale_log(log_k + ((q.alpha1 + q.alpha2) / 2.0 - d) * w.logdet() + lin))
}

/// `ln g(Y)` of the oriented density, with the error of the Whittaker factor
/// carried in `abs_err` of the density value.
pub fn matrix_residual_log_density<T: ConeField>(
    params: &ResidualParams<T>,
    y: &Hermitian<T>,
    parts: &OrientedDensityParts,
    effort: &Effort,
    rng: &RandomStream,
) -> Result<EvalResult> {
    if y.dim() != params.p() {
        return Err(Error::DimensionMismatch { expected: params.p(), got: y.dim() });
    }
    let r = match classify_raw(y.matrix()) {
        Definiteness::Positive => branch_log_density(params, parts.log_k1, &PosDef::new(y.clone())?, effort, rng)?,
        Definiteness::Negative => branch_log_density(&params.swapped(), parts.log_k2, &PosDef::new(y.neg())?, effort, rng)?,
        Definiteness::IndefiniteOrSingular => return Err(Error::Orientation),
    };
    Ok(r.scale_log(-parts.c().ln()))
}

/// Complex Hermitian counterpart of [`matrix_residual_log_density`].
pub fn complex_residual_log_density(
    params: &ComplexResidualParams,
    y: &Hermitian<Complex64>,
    parts: &OrientedDensityParts,
    effort: &Effort,
    rng: &RandomStream,
) -> Result<EvalResult> {
    matrix_residual_log_density(params, y, parts, effort, rng)
}

/// Draws `X₁ − X₂` with both samplers prepared once.
pub struct ResidualSampler<T: ConeField> {
    s1: GammaSampler<T>,
    s2: GammaSampler<T>,
}

impl<T: ConeField> ResidualSampler<T> {
    pub fn new(params: &ResidualParams<T>) -> Self {
        let g1 = GammaParams::new(params.alpha1, params.b1.clone()).expect("validated");
        let g2 = GammaParams::new(params.alpha2, params.b2.clone()).expect("validated");
        Self { s1: GammaSampler::new(&g1), s2: GammaSampler::new(&g2) }
    }

    pub fn sample_matrix<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<T> {
        self.s1.sample_matrix(rng) - self.s2.sample_matrix(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Hermitian<T> {
        Hermitian::from_exact(self.sample_matrix(rng))
    }
}

pub fn residual_sample<T: ConeField, R: Rng + ?Sized>(params: &ResidualParams<T>, rng: &mut R) -> Hermitian<T> {
    ResidualSampler::new(params).sample(rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientationProbabilities {
    pub n: usize,
    pub p_pos: f64,
    pub p_neg: f64,
    pub p_other: f64,
    pub se_pos: f64,
    pub se_neg: f64,
    pub se_other: f64,
}

/// Empirical frequencies of the definiteness classes of `n ≥ 100` residual draws.
pub fn orientation_probability<T: ConeField>(
    params: &ResidualParams<T>,
    n: usize,
    rng: &RandomStream,
    exec: Exec,
) -> Result<OrientationProbabilities> {
    if n < 100 {
        return Err(Error::Invalid(format!("orientation estimate needs n ≥ 100, got {n}")));
    }
    let sampler = ResidualSampler::new(params);
    let counts = map_chunks(n, rng, exec, |r, len| {
        let mut c = [0usize; 3];
        for _ in 0..len {
            match classify_raw(&sampler.sample_matrix(r)) {
                Definiteness::Positive => c[0] += 1,
                Definiteness::Negative => c[1] += 1,
                Definiteness::IndefiniteOrSingular => c[2] += 1,
            }
        }
        c
    });
    let mut c = [0usize; 3];
    for k in &counts {
        (0..3).for_each(|i| c[i] += k[i]);
    }
    let nf = n as f64;
    let f = |k: usize| k as f64 / nf;
    let se = |q: f64| (q * (1.0 - q) / nf).sqrt();
    let (pp, pn, po) = (f(c[0]), f(c[1]), f(c[2]));
    Ok(OrientationProbabilities { n, p_pos: pp, p_neg: pn, p_other: po, se_pos: se(pp), se_neg: se(pn), se_other: se(po) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Unit,
    Trace,
    Logdet,
}

impl FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "trace" => Ok(Self::Trace),
            "logdet" => Ok(Self::Logdet),
            _ => Err(Error::Invalid(format!("unknown functional {s:?}"))),
        }
    }
}

impl Functional {
    /// `f(Y)` given `tr Y` and `ln|det Y|`.
    fn apply(self, trace: f64, log_abs_det: f64) -> f64 {
        match self {
            Self::Unit => 1.0,
            Self::Trace => trace,
            Self::Logdet => log_abs_det,
        }
    }
}

/// Two estimates of `E[f(Y) | orientation]`: filtered simulation and the
/// density-weighted integral under the branch importance law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub functional: Functional,
    pub orientation: Definiteness,
    pub n: usize,
    pub class_count: usize,
    pub empirical: f64,
    pub empirical_se: f64,
    pub weighted: f64,
    pub weighted_se: f64,
    pub z: f64,
    pub prob_empirical: f64,
    pub prob_empirical_se: f64,
    pub prob_weighted: f64,
    pub prob_weighted_se: f64,
}

fn z_score(a: f64, sa: f64, b: f64, sb: f64) -> f64 {
    let s = sa.hypot(sb);
    if s == 0.0 {
        if a == b {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a - b) / s
    }
}

pub fn conditional_moment_check<T: ConeField>(
    params: &ResidualParams<T>,
    functional: Functional,
    orientation: Definiteness,
    n: usize,
    effort: &Effort,
    rng: &RandomStream,
) -> Result<MomentCheck> {
    let (branch_params, sign) = match orientation {
        Definiteness::Positive => (params.clone(), 1.0),
        Definiteness::Negative => (params.swapped(), -1.0),
        Definiteness::IndefiniteOrSingular => return Err(Error::Invalid("orientation must be positive or negative".into())),
    };

    // filtered simulation
    let sampler = ResidualSampler::new(params);
    let sims = map_chunks(n, &rng.labelled("filtered"), effort.exec, |r, len| {
        let (mut k, mut s, mut s2) = (0usize, 0.0, 0.0);
        for _ in 0..len {
            let y = sampler.sample_matrix(r);
            if classify_raw(&y) != orientation {
                continue;
            }
            let w = y * T::from_real(sign);
            let f = functional.apply(sign * diag_trace(&w), logdet_pd(&w).expect("oriented"));
            k += 1;
            s += f;
            s2 += f * f;
        }
        (k, s, s2)
    });
    let (mut k, mut s, mut s2) = (0usize, 0.0, 0.0);
    for c in &sims {
        k += c.0;
        s += c.1;
        s2 += c.2;
    }
    if k < MIN_CLASS_SAMPLES {
        return Err(Error::InsufficientSamples { got: k, need: MIN_CLASS_SAMPLES });
    }
    let kf = k as f64;
    let empirical = s / kf;
    let var = if k > 1 { ((s2 - kf * empirical * empirical) / (kf - 1.0)).max(0.0) } else { 0.0 };
    let empirical_se = if functional == Functional::Unit { 0.0 } else { (var / kf).sqrt() };
    let prob_empirical = kf / n as f64;
    let prob_empirical_se = (prob_empirical * (1.0 - prob_empirical) / n as f64).sqrt();

    // density-weighted integral
    let br = Branch::new(&branch_params);
    let draws = map_chunks(n, &rng.labelled("weighted"), effort.exec, |r, len| {
        (0..len)
            .map(|_| {
                let w = br.proposal.sample_matrix(r);
                let lw = logdet_pd(&w).expect("gamma draws are PD");
                let log_weight = br.log_g(&w, lw, effort.inner, r) - br.log_q(&w, lw);
                (log_weight, functional.apply(sign * diag_trace(&w), lw))
            })
            .collect::<Vec<_>>()
    })
    .concat();
    let shift = draws.iter().fold(f64::NEG_INFINITY, |m, d| m.max(d.0));
    let (mut sw, mut swf, mut sw2) = (0.0, 0.0, 0.0);
    for &(l, f) in &draws {
        let w = (l - shift).exp();
        sw += w;
        swf += w * f;
        sw2 += w * w;
    }
    let weighted = swf / sw;
    let mut num = 0.0;
    for &(l, f) in &draws {
        let w = (l - shift).exp();
        num += (w * (f - weighted)).powi(2);
    }
    let weighted_se = num.sqrt() / sw;
    let nf = draws.len() as f64;
    let mean_w = sw / nf;
    let var_w = ((sw2 - nf * mean_w * mean_w) / (nf - 1.0)).max(0.0);
    let prob_weighted = mean_w * shift.exp();
    let prob_weighted_se = (var_w / nf).sqrt() * shift.exp();

    Ok(MomentCheck {
        functional,
        orientation,
        n,
        class_count: k,
        empirical,
        empirical_se,
        weighted,
        weighted_se,
        z: z_score(empirical, empirical_se, weighted, weighted_se),
        prob_empirical,
        prob_empirical_se,
        prob_weighted,
        prob_weighted_se,
    })
}

fn diag_trace<T: ConeField>(m: &DMatrix<T>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].real()).sum()
}
