#![allow(dead_code)]

use conewhit::{HpdMatrix, PosDef, RandomStream, SpdMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn normal(rng: &mut RandomStream) -> f64 {
    rng.sample(StandardNormal)
}

/// `G Gᵀ/p + εI` with Gaussian `G`; eigenvalues spread over roughly [ε, 4].
pub fn random_spd(p: usize, rng: &mut RandomStream) -> SpdMatrix {
    let g = DMatrix::from_fn(p, p, |_, _| normal(rng));
    let m = &g * g.transpose() / p as f64 + DMatrix::identity(p, p) * 0.2;
    PosDef::from_matrix((&m + m.transpose()) * 0.5).unwrap()
}

pub fn random_hpd(p: usize, rng: &mut RandomStream) -> HpdMatrix {
    let g = DMatrix::from_fn(p, p, |_, _| Complex64::new(normal(rng), normal(rng)));
    let m = &g * g.adjoint() * Complex64::new(0.5 / p as f64, 0.0) + DMatrix::identity(p, p) * Complex64::new(0.2, 0.0);
    PosDef::from_matrix((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

/// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal(p: usize, rng: &mut RandomStream) -> DMatrix<f64> {
    let g = DMatrix::from_fn(p, p, |_, _| normal(rng));
    g.qr().q()
}

pub fn uniform(rng: &mut RandomStream, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
