//! Command handlers.

use conewhit::config::{Eq22Case, RunConfig, Thm21Case, Thm23Case, Thm31Case, Thm32Case};
use conewhit::gamma::{log_gamma_p, log_gamma_p_complex, GammaParams, GammaSampler};
use conewhit::parallel::map_chunks;
use conewhit::residual::{
    compute_normalizers, matrix_residual_log_density, orientation_probability, sample_scalar_residuals, scalar_residual_density,
    ResidualParams, ResidualSampler, ScalarResidualParams,
};
use conewhit::spd::ConeField;
use conewhit::verify::{verify_all, verify_identity, VerificationRun, IDENTITIES};
use conewhit::whittaker::{m_function, whittaker_w, whittaker_w_complex, MFunctionParams, WhittakerIndices};
use conewhit::{EvalResult, Hermitian, PosDef, RandomStream};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::output::{g17, Format, Output, Table};
use crate::parse;
use crate::{CliError, Command, DensityArgs, DensityModel, OrientArgs, ResidualArgs, SampleArgs, SampleModel, VerifyArgs};

pub fn dispatch(cmd: &Command, config: RunConfig) -> Result<Output, CliError> {
    let root = RandomStream::new(config.run.seed, 0);
    match cmd {
        Command::Gammap { p, alpha, complex } => gammap(*p, *alpha, *complex),
        Command::Mfun { alpha, beta, a } => {
            let a = parse::spd(a)?;
            let params = MFunctionParams::new(*alpha, *beta, a.dim())?;
            let r = m_function(&params, &a, &config.run.effort(), &root.labelled("mfun"))?;
            Ok(eval_output(json!({ "alpha": alpha, "beta": beta, "p": a.dim() }), &r))
        }
        Command::Whittaker(w) => {
            let a = parse::spd(&w.matrix)?;
            let r = whittaker_w(&WhittakerIndices::new(w.a, w.b, a.dim()), &a, &config.run.effort(), &root.labelled("whittaker"))?;
            Ok(eval_output(json!({ "a": w.a, "b": w.b, "p": a.dim() }), &r))
        }
        Command::WhittakerComplex(w) => {
            let a = parse::hpd(&w.matrix)?;
            let r = whittaker_w_complex(&WhittakerIndices::new(w.a, w.b, a.dim()), &a, &config.run.effort(), &root.labelled("whittaker"))?;
            Ok(eval_output(json!({ "a": w.a, "b": w.b, "p": a.dim(), "field": "complex" }), &r))
        }
        Command::Density(d) => density(d, &config, &root),
        Command::Sample(s) => sample(s, &config, &root),
        Command::Orient(o) => orient(o, &config, &root),
        Command::Verify(v) => verify(v, config),
    }
}

fn gammap(p: usize, alpha: f64, complex: bool) -> Result<Output, CliError> {
    let lg = if complex { log_gamma_p_complex(p, alpha)? } else { log_gamma_p(p, alpha)? };
    let v = lg.exp();
    let field = if complex { "complex" } else { "real" };
    let mut table = Table::new(&["p", "alpha", "field", "value", "log_value"]);
    table.push(vec![p.to_string(), g17(alpha), field.into(), g17(v), g17(lg)]);
    Ok(Output {
        json: json!({ "p": p, "alpha": alpha, "field": field, "value": v, "log_value": lg }),
        table,
        text: Some(g17(v)),
        default: Format::Json,
        passed: None,
    })
}

fn eval_output(params: Value, r: &EvalResult) -> Output {
    let mut table = Table::new(&["value", "err", "method", "effort"]);
    table.push(vec![g17(r.value()), g17(r.abs_err), r.method.to_string(), r.effort.to_string()]);
    let mut text = format!("{} ± {} ({})", g17(r.value()), g17(r.abs_err), r.method);
    for w in &r.warnings {
        text.push_str(&format!("\nwarning: {w}"));
    }
    Output {
        json: json!({ "params": params, "value": r.value(), "result": r }),
        table,
        text: Some(text),
        default: Format::Json,
        passed: None,
    }
}

fn scalar_params(r: &ResidualArgs) -> Result<ScalarResidualParams, CliError> {
    Ok(ScalarResidualParams::new(r.alpha1, r.alpha2, r.beta1, r.beta2)?)
}

fn complex_rate(arg: &Option<String>, p: usize) -> Result<PosDef<Complex64>, CliError> {
    match arg {
        Some(s) => parse::hpd(s),
        None => Ok(PosDef::identity(p)),
    }
}

fn real_rate(arg: &Option<String>, p: usize) -> Result<PosDef<f64>, CliError> {
    match arg {
        Some(s) => parse::spd(s),
        None => Ok(PosDef::identity(p)),
    }
}

fn real_residual(r: &ResidualArgs) -> Result<ResidualParams<f64>, CliError> {
    Ok(ResidualParams::new(r.alpha1, r.alpha2, real_rate(&r.b1, r.p)?, real_rate(&r.b2, r.p)?)?)
}

fn complex_residual(r: &ResidualArgs) -> Result<ResidualParams<Complex64>, CliError> {
    Ok(ResidualParams::new(r.alpha1, r.alpha2, complex_rate(&r.b1, r.p)?, complex_rate(&r.b2, r.p)?)?)
}

fn density(d: &DensityArgs, config: &RunConfig, root: &RandomStream) -> Result<Output, CliError> {
    let grid = parse::grid(&d.grid)?;
    match d.model {
        DensityModel::Scalar => {
            let params = scalar_params(&d.residual)?;
            let mut table = Table::new(&["y", "density"]);
            let mut points = Vec::new();
            for &y in &grid {
                let f = if y == 0.0 { f64::NAN } else { scalar_residual_density(&params, y)? };
                table.push(vec![g17(y), g17(f)]);
                points.push(json!({ "y": y, "density": f }));
            }
            Ok(Output {
                json: json!({ "model": "scalar", "params": params, "points": points }),
                table,
                text: None,
                default: Format::Csv,
                passed: None,
            })
        }
        DensityModel::Matrix => {
            let params = real_residual(&d.residual)?;
            let dir = match &d.y {
                Some(s) => parse::sym(s)?,
                None => Hermitian::identity(params.p()),
            };
            matrix_density(&params, &dir, &grid, config, root, "matrix")
        }
        DensityModel::Complex => {
            let params = complex_residual(&d.residual)?;
            let dir = match &d.y {
                Some(s) => parse::herm(s)?,
                None => Hermitian::identity(params.p()),
            };
            matrix_density(&params, &dir, &grid, config, root, "complex")
        }
    }
}

fn matrix_density<T: ConeField>(
    params: &ResidualParams<T>,
    dir: &Hermitian<T>,
    grid: &[f64],
    config: &RunConfig,
    root: &RandomStream,
    model: &str,
) -> Result<Output, CliError> {
    let effort = config.run.effort();
    let parts = compute_normalizers(params, &effort, &root.labelled("normalizers"))?;
    let rng = root.labelled("density");
    let mut table = Table::new(&["t", "density", "err"]);
    let mut points = Vec::new();
    for &t in grid {
        let (f, e) = if t == 0.0 {
            (f64::NAN, f64::NAN)
        } else {
            match matrix_residual_log_density(params, &dir.scale(t), &parts, &effort, &rng) {
                Ok(r) => (r.value(), r.abs_err),
                Err(conewhit::Error::Orientation) => (f64::NAN, f64::NAN),
                Err(e) => return Err(e.into()),
            }
        };
        table.push(vec![g17(t), g17(f), g17(e)]);
        points.push(json!({ "t": t, "density": f, "err": e }));
    }
    Ok(Output {
        json: json!({
            "model": model,
            "p": params.p(),
            "alpha1": params.alpha1,
            "alpha2": params.alpha2,
            "normalizers": parts,
            "points": points,
        }),
        table,
        text: None,
        default: Format::Csv,
        passed: None,
    })
}

fn entry_names<T: ConeField>(p: usize) -> Vec<String> {
    let mut h = Vec::new();
    for i in 1..=p {
        for j in 1..=p {
            if T::BETA == 1.0 {
                h.push(format!("x{i}_{j}"));
            } else {
                h.push(format!("x{i}_{j}_re"));
                h.push(format!("x{i}_{j}_im"));
            }
        }
    }
    h
}

fn flatten<T: ConeField>(m: &DMatrix<T>) -> Vec<f64> {
    let p = m.nrows();
    let mut v = Vec::new();
    for i in 0..p {
        for j in 0..p {
            v.push(m[(i, j)].real());
            if T::BETA != 1.0 {
                v.push(m[(i, j)].imaginary());
            }
        }
    }
    v
}

fn rows_output(model: &str, seed: u64, names: Vec<String>, rows: Vec<Vec<f64>>, summary: bool) -> Output {
    if summary {
        let n = rows.len() as f64;
        let mut table = Table::new(&["entry", "mean", "sd"]);
        let mut stats = Vec::new();
        for (k, name) in names.iter().enumerate() {
            let mean = rows.iter().map(|r| r[k]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            table.push(vec![name.clone(), g17(mean), g17(var.sqrt())]);
            stats.push(json!({ "entry": name, "mean": mean, "sd": var.sqrt() }));
        }
        return Output {
            json: json!({ "model": model, "seed": seed, "n": rows.len(), "summary": stats }),
            table,
            text: None,
            default: Format::Csv,
            passed: None,
        };
    }
    let mut table = Table::with_header(names.clone());
    for r in &rows {
        table.push(r.iter().map(|&v| g17(v)).collect());
    }
    Output {
        json: json!({ "model": model, "seed": seed, "n": rows.len(), "columns": names, "rows": rows }),
        table,
        text: None,
        default: Format::Csv,
        passed: None,
    }
}

fn draw<T: ConeField>(n: usize, rng: &RandomStream, config: &RunConfig, f: impl Fn(&mut RandomStream) -> DMatrix<T> + Sync + Send) -> Vec<Vec<f64>> {
    map_chunks(n, rng, config.run.exec, |r, len| (0..len).map(|_| flatten(&f(r))).collect::<Vec<_>>()).concat()
}

fn sample(s: &SampleArgs, config: &RunConfig, root: &RandomStream) -> Result<Output, CliError> {
    let rng = root.labelled("sample");
    let seed = config.run.seed;
    let res = &s.residual;
    match s.model {
        SampleModel::Gamma => {
            let p = res.p;
            if s.complex {
                let b = complex_rate(&s.b, p)?;
                let sampler = GammaSampler::new(&GammaParams::new(s.alpha, b)?);
                let rows = draw(s.n, &rng, config, |r| sampler.sample_matrix(r));
                Ok(rows_output("gamma", seed, entry_names::<Complex64>(sampler.params().p()), rows, s.summary))
            } else {
                let b = real_rate(&s.b, p)?;
                let sampler = GammaSampler::new(&GammaParams::new(s.alpha, b)?);
                let rows = draw(s.n, &rng, config, |r| sampler.sample_matrix(r));
                Ok(rows_output("gamma", seed, entry_names::<f64>(sampler.params().p()), rows, s.summary))
            }
        }
        SampleModel::Residual if s.complex => {
            let params = complex_residual(res)?;
            let sampler = ResidualSampler::new(&params);
            let rows = draw(s.n, &rng, config, |r| sampler.sample_matrix(r));
            Ok(rows_output("residual", seed, entry_names::<Complex64>(params.p()), rows, s.summary))
        }
        SampleModel::Residual if s.matrix || res.b1.is_some() || res.b2.is_some() => {
            let params = real_residual(res)?;
            let sampler = ResidualSampler::new(&params);
            let rows = draw(s.n, &rng, config, |r| sampler.sample_matrix(r));
            Ok(rows_output("residual", seed, entry_names::<f64>(params.p()), rows, s.summary))
        }
        SampleModel::Residual => {
            let params = scalar_params(res)?;
            let ys = sample_scalar_residuals(&params, s.n, &rng, config.run.exec);
            Ok(rows_output("residual", seed, vec!["y".into()], ys.into_iter().map(|y| vec![y]).collect(), s.summary))
        }
    }
}

fn orient(o: &OrientArgs, config: &RunConfig, root: &RandomStream) -> Result<Output, CliError> {
    let rng = root.labelled("orient");
    let pr = if o.complex {
        orientation_probability(&complex_residual(&o.residual)?, o.n, &rng, config.run.exec)?
    } else {
        orientation_probability(&real_residual(&o.residual)?, o.n, &rng, config.run.exec)?
    };
    let mut table = Table::new(&["n", "p_pos", "p_neg", "p_other", "se_pos", "se_neg", "se_other"]);
    table.push(vec![
        pr.n.to_string(),
        g17(pr.p_pos),
        g17(pr.p_neg),
        g17(pr.p_other),
        g17(pr.se_pos),
        g17(pr.se_neg),
        g17(pr.se_other),
    ]);
    Ok(Output {
        json: json!({ "seed": config.run.seed, "field": if o.complex { "complex" } else { "real" }, "orientation": pr }),
        table,
        text: None,
        default: Format::Json,
        passed: None,
    })
}

fn dim_of(len: usize) -> usize {
    (len as f64).sqrt().round() as usize
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("a custom case needs --{name}")))
}

fn need_str<'a>(v: &'a Option<String>, name: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::Usage(format!("a custom case needs --{name}")))
}

fn complex_parts(arg: &str) -> Result<(Vec<f64>, Option<Vec<f64>>), CliError> {
    let (re, im) = parse::split_parts(&parse::complex_list(arg)?);
    let im = if im.iter().all(|&x| x == 0.0) { None } else { Some(im) };
    Ok((re, im))
}

/// Replaces the default cases of `id` with the one described on the command
/// line, or filters them by `--p`.
fn select_cases(v: &VerifyArgs, config: &mut RunConfig) -> Result<(), CliError> {
    let custom = v.alpha.is_some() || v.a.is_some() || v.b.is_some() || v.u.is_some() || v.m.is_some();
    if v.id == "all" || v.id == "scalar-reduction" {
        if custom || v.p.is_some() {
            return Err(CliError::Usage(format!("`verify {}` takes no case parameters", v.id)));
        }
        return Ok(());
    }
    if custom {
        match v.id.as_str() {
            "eq2.2" => config.eq2_2 = vec![Eq22Case { alpha: need(v.alpha, "alpha")?, a: parse::real_list(need_str(&v.a, "A")?)? }],
            "thm2.1" => {
                config.thm2_1 = vec![Thm21Case {
                    alpha: need(v.alpha, "alpha")?,
                    beta: need(v.beta, "beta")?,
                    a: parse::real_list(need_str(&v.a, "A")?)?,
                }]
            }
            "thm2.3" => {
                config.thm2_3 = vec![Thm23Case {
                    alpha: need(v.alpha, "alpha")?,
                    beta: need(v.beta, "beta")?,
                    gamma: need(v.gamma, "gamma")?,
                    a: parse::real_list(need_str(&v.a, "A")?)?,
                    b: parse::real_list(need_str(&v.b, "B")?)?,
                    max_degree: v.max_degree,
                }]
            }
            "thm3.1" => {
                let (a, a_im) = complex_parts(need_str(&v.a, "A")?)?;
                config.thm3_1 = vec![Thm31Case { alpha: need(v.alpha, "alpha")?, a, a_im }]
            }
            "thm3.2" => {
                let (b, b_im) = complex_parts(need_str(&v.b, "B")?)?;
                let (u, u_im) = complex_parts(need_str(&v.u, "U")?)?;
                let (m, m_im) = complex_parts(need_str(&v.m, "M")?)?;
                config.thm3_2 = vec![Thm32Case { alpha: need(v.alpha, "alpha")?, q: need(v.q, "q")?, b, u, m, b_im, u_im, m_im }]
            }
            _ => {}
        }
        if let Some(p) = v.p {
            let given = [&v.a, &v.b].into_iter().flatten().next().map(|s| parse::complex_list(s).map(|l| dim_of(l.len()))).transpose()?;
            if given.is_some_and(|g| g != p) {
                return Err(CliError::Usage(format!("--p {p} does not match the matrix dimension")));
            }
        }
        return Ok(());
    }
    if let Some(p) = v.p {
        let keep = |len: usize| dim_of(len) == p;
        let remaining = match v.id.as_str() {
            "eq2.2" => {
                config.eq2_2.retain(|c| keep(c.a.len()));
                config.eq2_2.len()
            }
            "thm2.1" => {
                config.thm2_1.retain(|c| keep(c.a.len()));
                config.thm2_1.len()
            }
            "thm2.3" => {
                config.thm2_3.retain(|c| keep(c.a.len()));
                config.thm2_3.len()
            }
            "thm3.1" => {
                config.thm3_1.retain(|c| keep(c.a.len()));
                config.thm3_1.len()
            }
            "thm3.2" => {
                config.thm3_2.retain(|c| keep(c.b.len()));
                config.thm3_2.len()
            }
            _ => 1,
        };
        if remaining == 0 {
            return Err(CliError::Usage(format!("no default {} case has p = {p}", v.id)));
        }
    }
    Ok(())
}

fn verify(v: &VerifyArgs, mut config: RunConfig) -> Result<Output, CliError> {
    if v.id != "all" && !IDENTITIES.contains(&v.id.as_str()) {
        return Err(CliError::Usage(format!("unknown identity {:?}; expected all or one of {}", v.id, IDENTITIES.join(", "))));
    }
    select_cases(v, &mut config)?;
    let run = if v.id == "all" { verify_all(&config)? } else { VerificationRun::new(&config.run, verify_identity(&v.id, &config)?) };
    let mut table = Table::new(&["identity_id", "lhs", "lhs_err", "abs_diff", "combined_err", "z_or_ratio", "pass"]);
    for r in &run.reports {
        table.push(vec![
            r.identity_id.clone(),
            g17(r.lhs.value),
            g17(r.lhs.err),
            g17(r.abs_diff),
            g17(r.combined_err),
            g17(r.z_or_ratio),
            r.pass.to_string(),
        ]);
    }
    Ok(Output {
        json: serde_json::to_value(&run).expect("serializable"),
        table,
        text: None,
        default: Format::Json,
        passed: Some(run.pass),
    })
}
