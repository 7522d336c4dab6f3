//! The M-function and Whittaker functions of matrix argument, real and
//! complex, with a Monte Carlo engine over the positive definite cone and
//! Gauss–Laguerre quadrature in dimension one.
//!
//! With `d` the exponent shift of the cone ([`ConeField::dim_shift`]):
//!
//! ```text
//! M(α, β; A)  = ∫ |X|^{α−d} |I+X|^{β−d} e^{−tr(AX)} dX
//!             = Γ_p(α) |A|^{−α} E[|I+X|^{β−d}],   X ~ MG(α, A)
//! W_{a,b}(A)  = |A|^a e^{−tr(A)/2} E[|I+X|^{a+b−d/2}],   X ~ MG(b−a+d/2, A)
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::eval::{EvalResult, LogMoments, Method};
use crate::gamma::{log_gamma_cone, GammaParams, GammaSampler};
use crate::parallel::{map_chunks, Exec};
use crate::quadrature::gamma_expectation;
use crate::rng::RandomStream;
use crate::spd::{logdet_identity_plus, ConeField, PosDef};

/// Eigenvalue ratio above which results carry a conditioning warning.
pub const SPREAD_WARNING: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Quadrature for `p = 1`, Monte Carlo otherwise.
    Auto,
    Quadrature,
    MonteCarlo,
}

/// How hard an evaluator may work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effort {
    pub samples: usize,
    /// Relative two-grid agreement required of quadrature.
    pub tol: f64,
    pub engine: Engine,
    pub exec: Exec,
    /// Inner draws per outer draw in nested estimators.
    pub inner: usize,
}

impl Default for Effort {
    fn default() -> Self {
        Self { samples: 200_000, tol: 1e-9, engine: Engine::Auto, exec: Exec::default(), inner: 8 }
    }
}

impl Effort {
    pub fn samples(samples: usize) -> Self {
        Self { samples, ..Self::default() }
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn use_quadrature(&self, p: usize) -> Result<bool> {
        match (self.engine, p) {
            (Engine::MonteCarlo, _) => Ok(false),
            (_, 1) => Ok(true),
            (Engine::Quadrature, _) => domain("quadrature engine only covers p = 1"),
            (Engine::Auto, _) => Ok(false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MFunctionParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: usize,
}

impl MFunctionParams {
    pub fn new(alpha: f64, beta: f64, p: usize) -> Result<Self> {
        let bound = (p as f64 - 1.0) / 2.0;
        if p == 0 || !(alpha > bound) || !beta.is_finite() {
            return domain(format!("M-function needs α > {bound}, got α = {alpha}"));
        }
        Ok(Self { alpha, beta, p })
    }
}

/// Index pair `(a, b)` of `W_{a,b}` and its M-function reparametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerIndices {
    pub a: f64,
    pub b: f64,
    pub p: usize,
}

impl WhittakerIndices {
    pub fn new(a: f64, b: f64, p: usize) -> Self {
        Self { a, b, p }
    }

    /// Inverse of the `(a, b) → (μ, ν)` map of the real case.
    pub fn from_mu_nu(mu: f64, nu: f64, p: usize) -> Self {
        let q = (p as f64 + 1.0) / 4.0;
        Self { a: (nu - mu) / 2.0, b: (mu + nu) / 2.0 - q, p }
    }

    fn half_shift<T: ConeField>(&self) -> f64 {
        T::dim_shift(self.p) / 2.0
    }

    /// `μ = b − a + (p+1)/4`.
    pub fn mu(&self) -> f64 {
        self.b - self.a + self.half_shift::<f64>()
    }

    /// `ν = a + b + (p+1)/4`.
    pub fn nu(&self) -> f64 {
        self.a + self.b + self.half_shift::<f64>()
    }

    /// Gamma shape of the complex representation, `b − a + p/2`.
    pub fn mu_complex(&self) -> f64 {
        self.b - self.a + self.half_shift::<Complex64>()
    }

    pub fn is_admissible(&self) -> bool {
        self.mu() > (self.p as f64 - 1.0) / 2.0
    }

    pub fn is_admissible_complex(&self) -> bool {
        self.mu_complex() > self.p as f64 - 1.0
    }
}

/// Mean and standard error of `sign · exp(log)` pairs produced by `f` on
/// draws from `law`. `f` also receives the chunk stream for nested sampling.
pub(crate) fn mc_log_mean<T, F>(law: &GammaParams<T>, n: usize, rng: &RandomStream, exec: Exec, f: F) -> EvalResult
where
    T: ConeField,
    F: Fn(&DMatrix<T>, &mut RandomStream) -> (f64, f64) + Sync + Send,
{
    let sampler = GammaSampler::new(law);
    let chunks = map_chunks(n, rng, exec, |r, len| {
        let mut m = LogMoments::new();
        for _ in 0..len {
            let x = sampler.sample_matrix(r);
            let (s, l) = f(&x, r);
            m.push_log(s, l);
        }
        m
    });
    let mut acc = LogMoments::new();
    for c in &chunks {
        acc.merge(c);
    }
    acc.finish(Method::McImportance)
}

/// Mean of `f` over `n ≥ 2` draws from `law`, with one standard error.
pub fn mc_cone_expectation<T, F>(f: F, law: &GammaParams<T>, n: usize, rng: &RandomStream) -> EvalResult
where
    T: ConeField,
    F: Fn(&PosDef<T>) -> f64 + Sync + Send,
{
    mc_cone_expectation_with(f, law, n, rng, Exec::default())
}

pub fn mc_cone_expectation_with<T, F>(f: F, law: &GammaParams<T>, n: usize, rng: &RandomStream, exec: Exec) -> EvalResult
where
    T: ConeField,
    F: Fn(&PosDef<T>) -> f64 + Sync + Send,
{
    assert!(n >= 2, "need at least two samples");
    mc_log_mean(law, n, rng, exec, |x, _| {
        let v = f(&PosDef::from_matrix(x.clone()).expect("gamma draws are positive definite"));
        (if v < 0.0 { -1.0 } else { 1.0 }, v.abs().ln())
    })
}

fn spread_warning<T: ConeField>(a: &PosDef<T>) -> Option<String> {
    let s = a.eigen_spread();
    (s > SPREAD_WARNING).then(|| format!("ill-conditioned argument: eigenvalue spread {s:.3e}"))
}

/// `E[|I+X|^{e}]` for `X ~ MG(shape, A)` over field `T`.
fn det_power_expectation<T: ConeField>(
    shape: f64,
    e: f64,
    a: &PosDef<T>,
    effort: &Effort,
    rng: &RandomStream,
) -> Result<EvalResult> {
    let p = a.dim();
    let law = GammaParams::new(shape, a.clone())?;
    let mut r = if effort.use_quadrature(p)? {
        let z = a.matrix()[(0, 0)].real();
        let q = gamma_expectation(shape, |s| ((s / z).ln_1p() * e).exp(), effort.tol);
        let mut r = EvalResult::from_value(q.value, q.abs_err, Method::Quadrature, q.nodes as u64);
        if !q.converged {
            r = r.with_warning(format!("quadrature did not reach tolerance with {} nodes", q.nodes));
        }
        r
    } else {
        if effort.samples < 2 {
            return Err(crate::Error::Invalid("Monte Carlo needs at least two samples".into()));
        }
        mc_log_mean(&law, effort.samples, rng, effort.exec, |x, _| {
            (1.0, e * logdet_identity_plus(x).expect("I + X is positive definite"))
        })
    };
    if let Some(w) = spread_warning(a) {
        r = r.with_warning(w);
    }
    Ok(r)
}

/// `M(α, β; A)` over the cone of field `T`.
pub fn m_function_cone<T: ConeField>(
    alpha: f64,
    beta: f64,
    a: &PosDef<T>,
    effort: &Effort,
    rng: &RandomStream,
) -> Result<EvalResult> {
    let p = a.dim();
    let lg = log_gamma_cone::<T>(p, alpha)?;
    let e = beta - T::dim_shift(p);
    Ok(det_power_expectation(alpha, e, a, effort, rng)?.scale_log(lg - alpha * a.logdet()))
}

/// Real M-function.
pub fn m_function(params: &MFunctionParams, a: &PosDef<f64>, effort: &Effort, rng: &RandomStream) -> Result<EvalResult> {
    if a.dim() != params.p {
        return Err(crate::Error::DimensionMismatch { expected: params.p, got: a.dim() });
    }
    m_function_cone(params.alpha, params.beta, a, effort, rng)
}

pub(crate) fn whittaker_cone<T: ConeField>(idx: &WhittakerIndices, a: &PosDef<T>, effort: &Effort, rng: &RandomStream) -> Result<EvalResult> {
    let p = a.dim();
    if p != idx.p {
        return Err(crate::Error::DimensionMismatch { expected: idx.p, got: p });
    }
    let h = idx.half_shift::<T>();
    let shape = idx.b - idx.a + h;
    let bound = (p as f64 - 1.0) * T::BETA / 2.0;
    if !(shape > bound) {
        return domain(format!(
            "{} Whittaker W_{{{},{}}} needs b − a > {}, integral representation diverges",
            T::NAME,
            idx.a,
            idx.b,
            bound - h
        ));
    }
    let e = idx.a + idx.b - h;
    let prefix = idx.a * a.logdet() - a.trace() / 2.0;
    if e.abs() <= 1e-14 * h.max(1.0) {
        let mut r = EvalResult::from_log(prefix, 1.0, 0.0, Method::ClosedForm, 0);
        if let Some(w) = spread_warning(a) {
            r = r.with_warning(w);
        }
        return Ok(r);
    }
    Ok(det_power_expectation(shape, e, a, effort, rng)?.scale_log(prefix))
}

/// Real Whittaker function of matrix argument `W_{a,b}(A)`.
pub fn whittaker_w(idx: &WhittakerIndices, a: &PosDef<f64>, effort: &Effort, rng: &RandomStream) -> Result<EvalResult> {
    whittaker_cone(idx, a, effort, rng)
}

/// Complex Whittaker function `W̃_{a,b}(A)` on Hermitian positive definite `A`.
pub fn whittaker_w_complex(
    idx: &WhittakerIndices,
    a: &PosDef<Complex64>,
    effort: &Effort,
    rng: &RandomStream,
) -> Result<EvalResult> {
    whittaker_cone(idx, a, effort, rng)
}

/// Tricomi's confluent hypergeometric function `U(a, b, z)` from
/// `U = z^{−a} E[(1 + S/z)^{b−a−1}]`, `S ~ Gamma(a, 1)`.
pub fn tricomi_u(a: f64, b: f64, z: f64, tol: f64) -> Result<EvalResult> {
    if !(a > 0.0) || !(z > 0.0) {
        return domain(format!("U(a, b, z) needs a > 0 and z > 0, got a = {a}, z = {z}"));
    }
    let e = b - a - 1.0;
    let q = gamma_expectation(a, |s| ((s / z).ln_1p() * e).exp(), tol);
    let mut r = EvalResult::from_value(q.value, q.abs_err, Method::Quadrature, q.nodes as u64).scale_log(-a * z.ln());
    if !q.converged {
        r = r.with_warning(format!("quadrature did not reach tolerance with {} nodes", q.nodes));
    }
    Ok(r)
}

/// Classical Whittaker `W_{κ,m}(z) = e^{−z/2} z^{m+1/2} U(m−κ+1/2, 1+2m, z)`.
pub fn classical_whittaker(kappa: f64, m: f64, z: f64, tol: f64) -> Result<EvalResult> {
    Ok(tricomi_u(m - kappa + 0.5, 1.0 + 2.0 * m, z, tol)?.scale_log(-z / 2.0 + (m + 0.5) * z.ln()))
}
