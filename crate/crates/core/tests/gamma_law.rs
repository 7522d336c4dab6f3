mod common;

use common::{random_hpd, random_spd};
use conewhit::gamma::{log_density, log_gamma_cone, log_gamma_p, GammaParams, GammaSampler};
use conewhit::spd::ConeField;
use conewhit::{HpdMatrix, LogMoments, Method, PosDef, RandomStream, SpdMatrix};
use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

proptest! {
    #[test]
    fn gamma_p_recursion(p in 2usize..7, excess in 0.01f64..20.0) {
        let alpha = (p as f64 - 1.0) / 2.0 + excess;
        let lhs = log_gamma_p(p, alpha).unwrap();
        let rhs = (p as f64 - 1.0) / 2.0 * std::f64::consts::PI.ln() + ln_gamma(alpha) + log_gamma_p(p - 1, alpha - 0.5).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0), "{} {}", lhs, rhs);
    }
}

/// Entrywise sample mean within 3 SE of `α B⁻¹`.
fn check_mean<T: ConeField>(alpha: f64, b: PosDef<T>, n: usize, seed: u64) {
    let params = GammaParams::new(alpha, b).unwrap();
    let sampler = GammaSampler::new(&params);
    let p = params.p();
    let mut rng = RandomStream::new(seed, 0);
    let mut s = vec![0.0; 2 * p * p];
    let mut s2 = vec![0.0; 2 * p * p];
    for _ in 0..n {
        let x = sampler.sample_matrix(&mut rng);
        for k in 0..p * p {
            let z = x[(k / p, k % p)];
            for (j, v) in [z.real(), z.imaginary()].into_iter().enumerate() {
                s[2 * k + j] += v;
                s2[2 * k + j] += v * v;
            }
        }
    }
    let mean = params.mean();
    let nf = n as f64;
    for k in 0..p * p {
        let target = mean[(k / p, k % p)];
        for (j, t) in [target.real(), target.imaginary()].into_iter().enumerate() {
            let m = s[2 * k + j] / nf;
            let se = ((s2[2 * k + j] / nf - m * m) / (nf - 1.0)).sqrt();
            if T::BETA == 1.0 && j == 1 {
                assert_eq!(m, 0.0);
                continue;
            }
            if k / p == k % p && j == 1 {
                assert!(m.abs() < 1e-12);
                continue;
            }
            assert!((m - t).abs() <= 3.0 * se, "{} p={p} entry {k}.{j}: {m} vs {t} (se {se})", T::NAME);
        }
    }
}

#[test]
fn sample_means_real() {
    let mut rng = RandomStream::new(200, 0);
    for p in 1..=3 {
        check_mean(p as f64 + 0.7, random_spd(p, &mut rng), 100_000, 10 + p as u64);
    }
}

#[test]
fn sample_means_complex() {
    let mut rng = RandomStream::new(201, 0);
    for p in 1..=3 {
        check_mean(p as f64 + 0.4, random_hpd(p, &mut rng), 100_000, 20 + p as u64);
    }
}

/// `E_{X ~ law}[exp(f(X))]` with its standard error.
fn mean_exp<T: ConeField>(law: &GammaParams<T>, n: usize, seed: u64, f: impl Fn(&PosDef<T>) -> f64) -> (f64, f64) {
    let sampler = GammaSampler::new(law);
    let mut rng = RandomStream::new(seed, 0);
    let mut acc = LogMoments::new();
    for _ in 0..n {
        acc.push_log(1.0, f(&sampler.sample(&mut rng)));
    }
    let r = acc.finish(Method::McImportance);
    (r.value(), r.abs_err)
}

fn normalizer_ratio<T: ConeField>(a1: f64, b1: PosDef<T>, seed: u64) {
    let p = b1.dim();
    let a2 = a1 + 0.3;
    let b2 = b1.scale(1.3).unwrap();
    let law = GammaParams::new(a1, b1.clone()).unwrap();
    let (m, se) = mean_exp(&law, 100_000, seed, |x| {
        (a2 - a1) * x.logdet() - x.as_hermitian().trace_product(b2.as_hermitian()) + x.as_hermitian().trace_product(b1.as_hermitian())
    });
    let want = (log_gamma_cone::<T>(p, a2).unwrap() - a2 * b2.logdet() - log_gamma_cone::<T>(p, a1).unwrap() + a1 * b1.logdet()).exp();
    assert!((m - want).abs() <= 3.0 * se, "{} p={p}: {m} vs {want} (se {se})", T::NAME);
}

#[test]
fn kernel_ratio_matches_normalizing_constants() {
    let mut rng = RandomStream::new(202, 0);
    for p in 1..=2 {
        normalizer_ratio(p as f64 + 0.5, random_spd(p, &mut rng), 30 + p as u64);
        normalizer_ratio(p as f64 + 0.5, random_hpd(p, &mut rng), 40 + p as u64);
    }
}

fn density_integrates_to_one<T: ConeField>(alpha: f64, b: PosDef<T>, seed: u64) {
    let target = GammaParams::new(alpha, b.clone()).unwrap();
    let proposal = GammaParams::new(alpha, b.scale(0.7).unwrap()).unwrap();
    let (m, se) = mean_exp(&proposal, 100_000, seed, |x| log_density(&target, x).unwrap() - log_density(&proposal, x).unwrap());
    assert!((m - 1.0).abs() <= 3.0 * se && se < 0.01, "{} p={}: {m} (se {se})", T::NAME, b.dim());
}

#[test]
fn density_has_unit_mass() {
    let mut rng = RandomStream::new(203, 0);
    for p in 1..=3 {
        density_integrates_to_one(p as f64 + 0.2, random_spd(p, &mut rng), 50 + p as u64);
        density_integrates_to_one(p as f64 + 0.2, random_hpd(p, &mut rng), 60 + p as u64);
    }
}

#[test]
fn complex_scalar_density_is_the_real_one() {
    for (alpha, b, x) in [(1.0, 1.0, 0.7), (2.5, 0.3, 4.0), (0.6, 7.0, 0.01)] {
        let r = log_density(&GammaParams::new(alpha, SpdMatrix::diagonal(&[b]).unwrap()).unwrap(), &SpdMatrix::diagonal(&[x]).unwrap()).unwrap();
        let c = log_density(
            &GammaParams::new(alpha, HpdMatrix::diagonal(&[b]).unwrap()).unwrap(),
            &PosDef::<Complex64>::diagonal(&[x]).unwrap(),
        )
        .unwrap();
        assert_eq!(r, c);
    }
}
