//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{random_spd, uniform};
use conewhit::config::{RunConfig, RunSettings};
use conewhit::residual::{conditional_moment_check, sample_scalar_residuals, scalar_residual_density, Functional, MatrixResidualParams, ScalarResidualParams};
use conewhit::verify::{verify_all, verify_eq_2_2, verify_scalar_reduction, verify_thm_2_3, verify_thm_3_1, verify_thm_3_2};
use conewhit::whittaker::{whittaker_w, whittaker_w_complex, Effort, WhittakerIndices};
use conewhit::zonal::{hyp2f1_matrix, hyp2f1_scalar, partitions, zonal_c, SeriesParams};
use conewhit::{Definiteness, Exec, HpdMatrix, RandomStream, SpdMatrix, SymMatrix};
use conewhit_oracle::{expint_e1, gamma_difference_pdf, integrate_interval};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn laplace_closed_form() -> Outcome {
    let q = ScalarResidualParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut zero_refused = false;
    for i in 0..61 {
        let y = (i as f64 - 30.0) / 10.0;
        if y == 0.0 {
            zero_refused = matches!(scalar_residual_density(&q, y), Err(conewhit::Error::Domain(_)));
            continue;
        }
        worst = worst.max((scalar_residual_density(&q, y).unwrap() - 0.5 * (-y.abs()).exp()).abs());
    }
    outcome(worst < 1e-9 && zero_refused, format!("max error {worst:.2e} on 60 points, y = 0 refused: {zero_refused}"))
}

fn convolution_oracle() -> Outcome {
    let mut rng = RandomStream::new(1002, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (a1, a2) = (uniform(&mut rng, 0.6, 4.0), uniform(&mut rng, 0.6, 4.0));
        let (b1, b2) = (uniform(&mut rng, 0.5, 3.0), uniform(&mut rng, 0.5, 3.0));
        let q = ScalarResidualParams::new(a1, a2, b1, b2).unwrap();
        for k in 0..10 {
            let y = -4.75 + k as f64;
            worst = worst.max((scalar_residual_density(&q, y).unwrap() - gamma_difference_pdf(a1, b1, a2, b2, y)).abs());
        }
    }
    outcome(worst < 1e-8, format!("max deviation {worst:.2e} over 100 points"))
}

/// Sup distance between a 50-bin histogram density and the bin averages of
/// the exact density, bins on `[−5, 5]·max(β)`.
fn histogram_distance(q: &ScalarResidualParams, seed: u64) -> f64 {
    let n = 1_000_000;
    let ys = sample_scalar_residuals(q, n, &RandomStream::new(seed, 0), Exec::default());
    let half = 5.0 * q.beta1.max(q.beta2);
    let width = 2.0 * half / 50.0;
    let mut counts = [0usize; 50];
    for y in ys {
        let k = ((y + half) / width).floor();
        if (0.0..50.0).contains(&k) {
            counts[k as usize] += 1;
        }
    }
    let f = |y: f64| scalar_residual_density(q, y).unwrap();
    let mut sup: f64 = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let (lo, hi) = (-half + k as f64 * width, -half + (k + 1) as f64 * width);
        let mass = if lo < 0.0 && hi > 0.0 { integrate_interval(f, lo, 0.0, 1e-10) + integrate_interval(f, 0.0, hi, 1e-10) } else { integrate_interval(f, lo, hi, 1e-10) };
        sup = sup.max((c as f64 / (n as f64 * width) - mass / width).abs());
    }
    sup
}

fn empirical_law() -> Outcome {
    let laplace = histogram_distance(&ScalarResidualParams::new(1.0, 1.0, 1.0, 1.0).unwrap(), 1003);
    let skewed = histogram_distance(&ScalarResidualParams::new(2.0, 1.0, 1.0, 1.0).unwrap(), 1004);
    outcome(laplace < 0.01 && skewed < 0.01, format!("sup distance {laplace:.4} (Laplace), {skewed:.4} (α₁=2, α₂=1)"))
}

fn gamma_reduction() -> Outcome {
    let mut rng = RandomStream::new(1005, 0);
    let mut ok = 0;
    let mut worst_rel: f64 = 0.0;
    for p in 1..=3 {
        for k in 0..5 {
            let alpha = (p as f64 - 1.0) / 2.0 + uniform(&mut rng, 0.2, 3.0);
            let a = random_spd(p, &mut rng);
            let cfg = RunSettings { samples: 200_000, seed: 1005 + (10 * p + k) as u64, ..RunSettings::default() };
            let r = verify_eq_2_2(alpha, &a, &cfg).unwrap();
            let rel = r.lhs.err / r.lhs.value;
            worst_rel = worst_rel.max(rel);
            if r.pass && rel < 0.01 {
                ok += 1;
            }
        }
    }
    outcome(ok == 15, format!("{ok}/15 within 3 SE, max SE/value {worst_rel:.2e}"))
}

fn scalar_reduction() -> Outcome {
    let grid = RunConfig::defaults().scalar_reduction;
    let cases = grid.z.len() * grid.indices.len();
    let r = verify_scalar_reduction(&grid, &RunSettings::default()).unwrap();
    let worst = r.comparisons.iter().fold(0.0f64, |m, c| m.max(c.abs_diff));
    let mut oracle_worst: f64 = 0.0;
    let eff = Effort::default();
    let root = RandomStream::new(1006, 0);
    for &[a, b] in &grid.indices {
        for &z in &grid.z {
            let w = whittaker_w(&WhittakerIndices::new(a, b, 1), &SpdMatrix::diagonal(&[z]).unwrap(), &eff, &root).unwrap();
            oracle_worst = oracle_worst.max((w.value() - conewhit_oracle::whittaker_w(a, b, z)).abs());
        }
    }
    outcome(
        cases >= 12 && worst < 1e-8 && oracle_worst < 1e-8,
        format!("{cases} cases, max deviation {worst:.2e} (engine paths), {oracle_worst:.2e} (independent oracle)"),
    )
}

fn hypergeometric_laplace() -> Outcome {
    let cfg = RunSettings { samples: 1_000_000, ..RunSettings::default() };
    let one = SpdMatrix::identity(1);
    let both = verify_thm_2_3(0.0, 0.5, 1.0, &SpdMatrix::diagonal(&[0.6]).unwrap(), &one, None, &cfg).unwrap();
    let mut spread: f64 = 0.0;
    let values: Vec<f64> = std::iter::once(both.lhs.value).chain(both.rhs.iter().map(|s| s.value)).collect();
    for x in &values {
        for y in &values {
            spread = spread.max((x - y).abs());
        }
    }
    let first_only = verify_thm_2_3(0.0, 0.5, 1.0, &SpdMatrix::diagonal(&[2.0]).unwrap(), &one, Some(100), &cfg).unwrap();
    let single = (first_only.lhs.value - first_only.rhs[0].value).abs();
    let p2 = verify_thm_2_3(0.0, 0.75, 2.0, &SpdMatrix::diagonal(&[0.6, 0.6]).unwrap(), &SpdMatrix::identity(2), None, &cfg).unwrap();
    outcome(
        values.len() == 3 && spread < 1e-6 && single < 1e-6 && p2.pass,
        format!("p=1 spread {spread:.1e} (three ways), {single:.1e} (first form only); p=2 z = {:.2}", p2.z_or_ratio),
    )
}

fn zonal_layer() -> Outcome {
    let mut rng = RandomStream::new(1007, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        for p in 1..=3 {
            let a = random_spd(p, &mut rng);
            let x = a.eigenvalues();
            let tr = a.trace();
            for k in 1..=6 {
                let s: f64 = partitions(k, p).iter().map(|kappa| zonal_c(kappa, &x)).sum();
                worst = worst.max((s / tr.powi(k as i32) - 1.0).abs());
            }
        }
    }
    let mut worst_f: f64 = 0.0;
    for _ in 0..50 {
        let (a, b, c) = (uniform(&mut rng, -1.5, 2.5), uniform(&mut rng, -1.5, 2.5), uniform(&mut rng, 0.4, 3.5));
        let x = uniform(&mut rng, -0.7, 0.7);
        let sp = SeriesParams::new(a, b, c).with_max_degree(400).with_tail_tol(1e-17);
        let m = hyp2f1_matrix(&sp, &SymMatrix::from_row_major(1, &[x]).unwrap()).unwrap().value();
        let s = hyp2f1_scalar(a, b, c, x).unwrap().value();
        worst_f = worst_f.max((m - s).abs() / s.abs().max(1.0));
    }
    outcome(worst < 1e-10 && worst_f < 1e-12, format!("normalization rel. error {worst:.1e}, p=1 collapse {worst_f:.1e}"))
}

fn conditional_moments() -> Outcome {
    let eff = Effort::default();
    let sym = MatrixResidualParams::new(2.0, 2.0, SpdMatrix::identity(2), SpdMatrix::identity(2)).unwrap();
    let root = RandomStream::new(1008, 0);
    let unit = conditional_moment_check(&sym, Functional::Unit, Definiteness::Positive, 1_000_000, &eff, &root.labelled("unit")).unwrap();
    let trace = conditional_moment_check(&sym, Functional::Trace, Definiteness::Positive, 1_000_000, &eff, &root.labelled("trace")).unwrap();
    let mass_z = (unit.prob_empirical - unit.prob_weighted) / unit.prob_empirical_se.hypot(unit.prob_weighted_se);
    let lap = MatrixResidualParams::new(1.0, 1.0, SpdMatrix::identity(1), SpdMatrix::identity(1)).unwrap();
    let l = conditional_moment_check(&lap, Functional::Trace, Definiteness::Positive, 1_000_000, &eff, &root.labelled("laplace")).unwrap();
    let exp_mean = (l.empirical - 1.0).abs() <= 3.0 * l.empirical_se && (l.weighted - 1.0).abs() <= 3.0 * l.weighted_se;
    outcome(
        unit.z.abs() < 3.0 && trace.z.abs() < 3.0 && mass_z.abs() < 3.0 && exp_mean,
        format!(
            "p=2 z: unit {:.2} (mass {:.2}), trace {:.2}; p=1 conditional mean {:.4} / {:.4}",
            unit.z, mass_z, trace.z, l.empirical, l.weighted
        ),
    )
}

fn complex_case() -> Outcome {
    let cfg = RunSettings { samples: 1_000_000, ..RunSettings::default() };
    let want = 1.0 - std::f64::consts::E * expint_e1(1.0);
    let t31 = verify_thm_3_1(2.0, &HpdMatrix::identity(1), &cfg).unwrap();
    let near = (t31.lhs.value - want).abs() <= (3.0 * t31.lhs.err).max(1e-9) && (t31.rhs[0].value - want).abs() <= (3.0 * t31.rhs[0].err).max(1e-9);
    let one = HpdMatrix::identity(1);
    let t32a = verify_thm_3_2(1.0, 1.0, &one, &one, &one, &cfg).unwrap();
    let two = HpdMatrix::identity(2);
    let t32b = verify_thm_3_2(2.0, 1.5, &two, &two, &two, &cfg).unwrap();
    let eff = Effort::default();
    let root = RandomStream::new(1009, 0);
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.0, 0.5), (-1.0, 0.5), (0.25, 0.75), (0.6, 0.3)] {
        for z in [0.5, 1.0, 2.0, 5.0] {
            let idx = WhittakerIndices::new(a, b, 1);
            let r = whittaker_w(&idx, &SpdMatrix::diagonal(&[z]).unwrap(), &eff, &root).unwrap();
            let c = whittaker_w_complex(&idx, &HpdMatrix::diagonal(&[z]).unwrap(), &eff, &root).unwrap();
            worst = worst.max((r.value() - c.value()).abs());
        }
    }
    outcome(
        t31.pass && near && t32a.pass && t32b.pass && worst < 1e-8,
        format!(
            "3.1 at p=1: {:.6} vs {want:.6}; 3.2 p=1 {}, p=2 {} (z = {:.2}); complex vs real W {worst:.1e}",
            t31.lhs.value,
            if t32a.pass { "pass" } else { "fail" },
            if t32b.pass { "pass" } else { "fail" },
            t32b.z_or_ratio
        ),
    )
}

fn reproducibility() -> Outcome {
    let run = |exec: Exec| {
        let mut c = RunConfig::defaults();
        c.run.seed = 7;
        c.run.exec = exec;
        serde_json::to_string(&verify_all(&c).unwrap()).unwrap()
    };
    let pooled = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run(Exec::Parallel))
    };
    let a = run(Exec::default());
    let b = run(Exec::default());
    let one = pooled(1);
    let four = pooled(4);
    let seq = run(Exec::Sequential);
    let all_pass = serde_json::from_str::<serde_json::Value>(&a).unwrap()["pass"] == true;
    outcome(
        a == b && a == one && a == four && a == seq && all_pass,
        format!("two runs identical: {}, 1/4 workers and sequential identical: {}, all pass: {all_pass}", a == b, a == one && a == four && a == seq),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Laplace closed form", Duration::from_secs(1), laplace_closed_form),
        ("scalar density vs convolution", Duration::from_secs(30), convolution_oracle),
        ("empirical law of 10⁶ draws", Duration::from_secs(60), empirical_law),
        ("gamma-function reduction of M", Duration::from_secs(120), gamma_reduction),
        ("scalar reduction of W", Duration::from_secs(10), scalar_reduction),
        ("Laplace-type integral of W", Duration::from_secs(300), hypergeometric_laplace),
        ("zonal layer", Duration::from_secs(30), zonal_layer),
        ("conditional moments", Duration::from_secs(180), conditional_moments),
        ("complex case", Duration::from_secs(300), complex_case),
        ("reproducibility", Duration::from_secs(600), reproducibility),
    ];
    let mut failures = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= *budget;
        failures += usize::from(!pass);
        println!(
            "criterion {:>2}: {}  {name}: {} ({:.2} s of {} s)",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
