//! Matrix-variate gamma function, gamma densities and exact samplers, in the
//! real symmetric and complex Hermitian cases.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};
use crate::spd::{trace_product, ConeField, PosDef};

const LN_PI: f64 = 1.144_729_885_849_400_2;

/// `ln Γ_p(α)` for the cone over field `T`:
/// `β p(p−1)/4 · ln π + Σ_{j<p} ln Γ(α − jβ/2)`.
pub fn log_gamma_cone<T: ConeField>(p: usize, alpha: f64) -> Result<f64> {
    if p == 0 {
        return domain("dimension must be positive");
    }
    let bound = (p as f64 - 1.0) * T::BETA / 2.0;
    if !(alpha > bound) {
        return domain(format!("{} Γ_{p}(α) needs α > {bound}, got {alpha}", T::NAME));
    }
    let pf = p as f64;
    let mut s = T::BETA * pf * (pf - 1.0) / 4.0 * LN_PI;
    for j in 0..p {
        s += ln_gamma(alpha - j as f64 * T::BETA / 2.0);
    }
    Ok(s)
}

/// Real matrix-variate gamma function, `ln Γ_p(α)`.
pub fn log_gamma_p(p: usize, alpha: f64) -> Result<f64> {
    log_gamma_cone::<f64>(p, alpha)
}

/// Complex matrix-variate gamma function, `ln Γ̃_p(α)`.
pub fn log_gamma_p_complex(p: usize, alpha: f64) -> Result<f64> {
    log_gamma_cone::<Complex64>(p, alpha)
}

/// Shape and scale of a matrix-variate gamma law with density proportional
/// to `|X|^{α−d} e^{−tr(BX)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaParams<T: ConeField> {
    alpha: f64,
    b: PosDef<T>,
}

pub type MatrixGammaParams = GammaParams<f64>;
pub type ComplexGammaParams = GammaParams<Complex64>;

impl<T: ConeField> GammaParams<T> {
    pub fn new(alpha: f64, b: PosDef<T>) -> Result<Self> {
        let p = b.dim();
        let bound = (p as f64 - 1.0) * T::BETA / 2.0;
        if !(alpha > bound) || !alpha.is_finite() {
            return domain(format!("{} matrix gamma needs α > {bound}, got {alpha}", T::NAME));
        }
        Ok(Self { alpha, b })
    }

    pub fn p(&self) -> usize {
        self.b.dim()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> &PosDef<T> {
        &self.b
    }

    /// `E[X] = α B^{−1}`.
    pub fn mean(&self) -> DMatrix<T> {
        self.b.inverse().matrix() * T::from_real(self.alpha)
    }

    /// `α ln|B| − ln Γ_p(α)`.
    pub fn log_normalizer(&self) -> f64 {
        self.alpha * self.b.logdet() - log_gamma_cone::<T>(self.p(), self.alpha).expect("validated")
    }
}

/// Log density of the gamma law at `x`.
pub fn log_density<T: ConeField>(params: &GammaParams<T>, x: &PosDef<T>) -> Result<f64> {
    if x.dim() != params.p() {
        return Err(crate::Error::DimensionMismatch { expected: params.p(), got: x.dim() });
    }
    let d = T::dim_shift(params.p());
    Ok(params.log_normalizer() + (params.alpha - d) * x.logdet() - trace_product(params.b.matrix(), x.matrix()))
}

pub fn log_density_complex(params: &ComplexGammaParams, x: &PosDef<Complex64>) -> Result<f64> {
    log_density(params, x)
}

/// Bartlett sampler with the factorization and chi-square laws precomputed.
///
/// Draws `X = C·L·L*·C*` with `C = chol(B^{−1})`, `|L_ii|² ~ Gamma(α − iβ/2, 1)`
/// and off-diagonal components `N(0, 1/2)`. In the real case this is the
/// usual Wishart(2α, (2B)^{−1}) construction with both factors rescaled by √2.
#[derive(Debug, Clone)]
pub struct GammaSampler<T: ConeField> {
    params: GammaParams<T>,
    chol_cov: DMatrix<T>,
    diag: Vec<Gamma<f64>>,
}

impl<T: ConeField> GammaSampler<T> {
    pub fn new(params: &GammaParams<T>) -> Self {
        let p = params.p();
        let chol_cov = params.b.inverse().cholesky().lower().clone();
        let diag = (0..p)
            .map(|i| Gamma::new(params.alpha - i as f64 * T::BETA / 2.0, 1.0).expect("shape checked at construction"))
            .collect();
        Self { params: params.clone(), chol_cov, diag }
    }

    pub fn params(&self) -> &GammaParams<T> {
        &self.params
    }

    /// One draw as a raw (exactly Hermitian) matrix.
    pub fn sample_matrix<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<T> {
        let p = self.params.p();
        let mut l = DMatrix::<T>::zeros(p, p);
        for i in 0..p {
            l[(i, i)] = T::from_real(self.diag[i].sample(rng).sqrt());
            for j in 0..i {
                l[(i, j)] = T::bartlett_offdiag(rng);
            }
        }
        let a = &self.chol_cov * l;
        &a * a.adjoint()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PosDef<T> {
        PosDef::from_matrix(self.sample_matrix(rng)).expect("Bartlett draws are positive definite")
    }
}

/// One exact draw from the real matrix-variate gamma law.
pub fn sample<R: Rng + ?Sized>(params: &MatrixGammaParams, rng: &mut R) -> PosDef<f64> {
    GammaSampler::new(params).sample(rng)
}

/// One exact draw from the complex matrix-variate gamma law.
pub fn sample_complex<R: Rng + ?Sized>(params: &ComplexGammaParams, rng: &mut R) -> PosDef<Complex64> {
    GammaSampler::new(params).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use crate::spd::{HpdMatrix, SpdMatrix};
    use std::f64::consts::PI;

    #[test]
    fn gamma_p_examples() {
        assert!(log_gamma_p(1, 2.0).unwrap().abs() < 1e-15);
        assert!((log_gamma_p(2, 1.5).unwrap() - (PI / 2.0).ln()).abs() < 1e-14);
        assert!((log_gamma_p(2, 2.5).unwrap() - (3.0 * PI / 4.0).ln()).abs() < 1e-14);
        assert!(log_gamma_p(2, 0.5).is_err());
        assert!(log_gamma_p(3, 1.0).is_err());
    }

    #[test]
    fn gamma_p_complex_examples() {
        assert!((log_gamma_p_complex(1, 3.0).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!((log_gamma_p_complex(2, 2.0).unwrap() - PI.ln()).abs() < 1e-14);
        assert!((log_gamma_p_complex(2, 3.0).unwrap() - (2.0 * PI).ln()).abs() < 1e-14);
        assert!(log_gamma_p_complex(2, 1.0).is_err());
    }

    #[test]
    fn gamma_p_recursion() {
        for p in 2..=6 {
            for &a in &[3.1, 4.0, 7.25, 12.5] {
                let lhs = log_gamma_p(p, a).unwrap();
                let rhs = (p as f64 - 1.0) / 2.0 * PI.ln() + ln_gamma(a) + log_gamma_p(p - 1, a - 0.5).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn density_examples() {
        let p1 = MatrixGammaParams::new(1.0, SpdMatrix::identity(1)).unwrap();
        let x = SpdMatrix::diagonal(&[2.0]).unwrap();
        assert!((log_density(&p1, &x).unwrap() + 2.0).abs() < 1e-15);

        let p2 = MatrixGammaParams::new(1.5, SpdMatrix::identity(2)).unwrap();
        let want = -2.0 - (PI / 2.0).ln();
        assert!((log_density(&p2, &SpdMatrix::identity(2)).unwrap() - want).abs() < 1e-14);

        let c1 = ComplexGammaParams::new(1.0, HpdMatrix::identity(1)).unwrap();
        let xc = HpdMatrix::diagonal(&[2.0]).unwrap();
        assert!((log_density_complex(&c1, &xc).unwrap() + 2.0).abs() < 1e-15);

        let c2 = ComplexGammaParams::new(2.0, HpdMatrix::identity(2)).unwrap();
        let want = -2.0 - PI.ln();
        assert!((log_density_complex(&c2, &HpdMatrix::identity(2)).unwrap() - want).abs() < 1e-14);

        assert!(MatrixGammaParams::new(0.4, SpdMatrix::identity(2)).is_err());
        assert!(ComplexGammaParams::new(1.0, HpdMatrix::identity(2)).is_err());
    }

    #[test]
    fn complex_and_real_agree_at_p1() {
        for &(a, b, x) in &[(0.7, 1.3, 0.4), (2.5, 0.2, 9.0), (1.0, 1.0, 1.0)] {
            let r = MatrixGammaParams::new(a, SpdMatrix::diagonal(&[b]).unwrap()).unwrap();
            let c = ComplexGammaParams::new(a, HpdMatrix::diagonal(&[b]).unwrap()).unwrap();
            let lr = log_density(&r, &SpdMatrix::diagonal(&[x]).unwrap()).unwrap();
            let lc = log_density(&c, &HpdMatrix::diagonal(&[x]).unwrap()).unwrap();
            assert_eq!(lr, lc);
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let params = MatrixGammaParams::new(2.0, SpdMatrix::identity(2)).unwrap();
        let s = GammaSampler::new(&params);
        let a: Vec<_> = {
            let mut rng = RandomStream::new(7, 0);
            (0..5).map(|_| s.sample_matrix(&mut rng)).collect()
        };
        let b: Vec<_> = {
            let mut rng = RandomStream::new(7, 0);
            (0..5).map(|_| s.sample_matrix(&mut rng)).collect()
        };
        assert_eq!(a, b);
        let cp = ComplexGammaParams::new(3.0, HpdMatrix::identity(2)).unwrap();
        let cs = GammaSampler::new(&cp);
        let mut r1 = RandomStream::new(7, 0);
        let mut r2 = RandomStream::new(7, 0);
        assert_eq!(cs.sample_matrix(&mut r1), cs.sample_matrix(&mut r2));
    }
}
