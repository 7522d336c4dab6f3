//! Linear algebra on the cone of symmetric (real) and Hermitian (complex)
//! positive definite matrices.
//!
//! Everything is generic over [`ConeField`], implemented for `f64` and
//! `Complex64`. The `Sym*`/`Spd*` and `Herm*`/`Hpd*` aliases name the two
//! instantiations.

use std::fmt::Debug;

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative asymmetry tolerated before symmetrization.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Scalar field of a matrix cone: the reals or the complex numbers.
pub trait ConeField: ComplexField<RealField = f64> + Copy + Send + Sync + Debug + 'static {
    /// Dyson index: 1 for real symmetric, 2 for complex Hermitian.
    const BETA: f64;
    const NAME: &'static str;

    /// An off-diagonal Bartlett entry: every real component is `N(0, 1/2)`.
    fn bartlett_offdiag<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Exponent shift `(p−1)β/2 + 1`: `(p+1)/2` for reals, `p` for complex.
    fn dim_shift(p: usize) -> f64 {
        (p as f64 - 1.0) * Self::BETA / 2.0 + 1.0
    }
}

impl ConeField for f64 {
    const BETA: f64 = 1.0;
    const NAME: &'static str = "real";

    fn bartlett_offdiag<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.sample(StandardNormal);
        z * std::f64::consts::FRAC_1_SQRT_2
    }
}

impl ConeField for Complex64 {
    const BETA: f64 = 2.0;
    const NAME: &'static str = "complex";

    fn bartlett_offdiag<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// A square matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian<T: ConeField> {
    m: DMatrix<T>,
}

pub type SymMatrix = Hermitian<f64>;
pub type HermMatrix = Hermitian<Complex64>;

impl<T: ConeField> Hermitian<T> {
    /// Validates near-symmetry, then stores `(m + m*)/2`.
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::Invalid("empty matrix".into()));
        }
        if m.iter().any(|x| !x.modulus().is_finite()) {
            return Err(Error::Invalid("non-finite matrix entry".into()));
        }
        let adj = m.adjoint();
        let scale = m.norm();
        let asym = (&m - &adj).norm();
        if asym > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Asymmetric(asym / scale));
        }
        let sym = (m + adj) * T::from_real(0.5);
        Ok(Self { m: sym })
    }

    pub fn from_row_major(p: usize, entries: &[T]) -> Result<Self> {
        if entries.len() != p * p {
            return Err(Error::DimensionMismatch { expected: p * p, got: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(p, p, entries))
    }

    pub fn identity(p: usize) -> Self {
        Self { m: DMatrix::identity(p, p) }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let v: Vec<T> = d.iter().map(|&x| T::from_real(x)).collect();
        Self { m: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v)) }
    }

    /// Wraps a matrix already known to be exactly Hermitian.
    pub(crate) fn from_exact(m: DMatrix<T>) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|x| x.real()).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: &self.m * T::from_real(s) }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: &self.m - &other.m })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.m.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Real part of `tr(self · other)`.
    pub fn trace_product(&self, other: &Self) -> f64 {
        trace_product(&self.m, &other.m)
    }

    pub fn definiteness(&self) -> Definiteness {
        is_pd(self)
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// Lower-triangular `L` with positive real diagonal and `L·L* = A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor<T: ConeField> {
    l: DMatrix<T>,
}

impl<T: ConeField> CholeskyFactor<T> {
    pub fn lower(&self) -> &DMatrix<T> {
        &self.l
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        &self.l * self.l.adjoint()
    }

    /// `ln det A = 2 Σ ln L_ii`.
    pub fn logdet(&self) -> f64 {
        2.0 * self.l.diagonal().iter().map(|x| x.real().ln()).sum::<f64>()
    }
}

/// A Hermitian matrix with a successful Cholesky factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct PosDef<T: ConeField> {
    h: Hermitian<T>,
    chol: CholeskyFactor<T>,
}

pub type SpdMatrix = PosDef<f64>;
pub type HpdMatrix = PosDef<Complex64>;

impl<T: ConeField> PosDef<T> {
    pub fn new(h: Hermitian<T>) -> Result<Self> {
        let l = cholesky_lower(h.matrix()).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { h, chol: CholeskyFactor { l } })
    }

    pub fn from_matrix(m: DMatrix<T>) -> Result<Self> {
        Self::new(Hermitian::new(m)?)
    }

    pub fn from_row_major(p: usize, entries: &[T]) -> Result<Self> {
        Self::new(Hermitian::from_row_major(p, entries)?)
    }

    pub fn identity(p: usize) -> Self {
        Self::new(Hermitian::identity(p)).expect("identity is positive definite")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(Hermitian::diagonal(d))
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        self.h.matrix()
    }

    pub fn as_hermitian(&self) -> &Hermitian<T> {
        &self.h
    }

    pub fn cholesky(&self) -> &CholeskyFactor<T> {
        &self.chol
    }

    pub fn logdet(&self) -> f64 {
        self.chol.logdet()
    }

    pub fn trace(&self) -> f64 {
        self.h.trace()
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        Self::new(self.h.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(self.h.add(&other.h)?)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.h.eigenvalues()
    }

    /// Inverse through the Cholesky factor.
    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let linv = self
            .chol
            .l
            .clone()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .expect("positive diagonal");
        let inv = linv.adjoint() * &linv;
        Self::new(Hermitian::from_exact(hermitize(inv))).expect("inverse of PD is PD")
    }

    /// Principal square root, from the eigendecomposition.
    pub fn sqrt(&self) -> Self {
        let eig = SymmetricEigen::new(self.matrix().clone());
        let d = eig.eigenvalues.map(|l| T::from_real(l.max(0.0).sqrt()));
        let v = &eig.eigenvectors;
        let s = v * DMatrix::from_diagonal(&d) * v.adjoint();
        Self::new(Hermitian::from_exact(hermitize(s))).expect("square root of PD is PD")
    }

    /// Ratio of largest to smallest eigenvalue.
    pub fn eigen_spread(&self) -> f64 {
        let ev = self.eigenvalues();
        ev[ev.len() - 1] / ev[0]
    }
}

pub(crate) fn hermitize<T: ConeField>(m: DMatrix<T>) -> DMatrix<T> {
    let adj = m.adjoint();
    (m + adj) * T::from_real(0.5)
}

/// Cholesky–Banachiewicz; `None` as soon as a pivot is not strictly positive.
pub(crate) fn cholesky_lower<T: ConeField>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let n = a.nrows();
    let mut l = DMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].real();
        for k in 0..j {
            d -= l[(j, k)].modulus_squared();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = T::from_real(djj);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conjugate();
            }
            l[(i, j)] = s * T::from_real(1.0 / djj);
        }
    }
    Some(l)
}

/// `ln det` of a matrix assumed Hermitian; `None` when not PD.
pub(crate) fn logdet_pd<T: ConeField>(a: &DMatrix<T>) -> Option<f64> {
    let n = a.nrows();
    if n == 1 {
        let x = a[(0, 0)].real();
        return if x > 0.0 { Some(x.ln()) } else { None };
    }
    cholesky_lower(a).map(|l| 2.0 * l.diagonal().iter().map(|x| x.real().ln()).sum::<f64>())
}

/// `ln det(I + X)`.
pub(crate) fn logdet_identity_plus<T: ConeField>(x: &DMatrix<T>) -> Option<f64> {
    let n = x.nrows();
    if n == 1 {
        return Some(x[(0, 0)].real().ln_1p());
    }
    let mut m = x.clone();
    for i in 0..n {
        m[(i, i)] += T::one();
    }
    logdet_pd(&m)
}

pub(crate) fn trace_product<T: ConeField>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..n {
            s += (a[(i, k)] * b[(k, i)]).real();
        }
    }
    s
}

pub fn cholesky<T: ConeField>(m: &PosDef<T>) -> CholeskyFactor<T> {
    m.cholesky().clone()
}

pub fn logdet<T: ConeField>(m: &PosDef<T>) -> f64 {
    m.logdet()
}

pub fn sqrt_spd<T: ConeField>(m: &PosDef<T>) -> PosDef<T> {
    m.sqrt()
}

/// `a^{1/2} · x · a^{1/2}`.
pub fn congruence<T: ConeField>(a: &PosDef<T>, x: &Hermitian<T>) -> Result<Hermitian<T>> {
    check_dims(a.dim(), x.dim())?;
    let s = a.sqrt();
    let r = s.matrix() * x.matrix() * s.matrix();
    Ok(Hermitian::from_exact(hermitize(r)))
}

/// Same as [`congruence`] for a PD argument, keeping the PD type.
pub fn congruence_pd<T: ConeField>(a: &PosDef<T>, x: &PosDef<T>) -> Result<PosDef<T>> {
    PosDef::new(congruence(a, x.as_hermitian())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    Positive,
    Negative,
    IndefiniteOrSingular,
}

/// Classifies by attempting Cholesky on `m` and on `−m`.
pub fn is_pd<T: ConeField>(m: &Hermitian<T>) -> Definiteness {
    if cholesky_lower(m.matrix()).is_some() {
        Definiteness::Positive
    } else if cholesky_lower(&(-m.matrix())).is_some() {
        Definiteness::Negative
    } else {
        Definiteness::IndefiniteOrSingular
    }
}

pub(crate) fn classify_raw<T: ConeField>(m: &DMatrix<T>) -> Definiteness {
    if cholesky_lower(m).is_some() {
        Definiteness::Positive
    } else if cholesky_lower(&(-m)).is_some() {
        Definiteness::Negative
    } else {
        Definiteness::IndefiniteOrSingular
    }
}
