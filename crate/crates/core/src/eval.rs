//! Uniform result type of every evaluator, and the log-space moment
//! accumulator used by the Monte Carlo engines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadrature,
    McImportance,
    ClosedForm,
    Series,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Quadrature => "quadrature",
            Method::McImportance => "mc-importance",
            Method::ClosedForm => "closed-form",
            Method::Series => "series",
        };
        f.write_str(s)
    }
}

/// A value carried as `sign · exp(log_abs)` with an absolute error estimate.
///
/// Quadrature results carry the two-grid difference, MC results one
/// standard error, series results the last-degree contribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub log_abs: f64,
    pub sign: f64,
    pub abs_err: f64,
    pub method: Method,
    pub effort: u64,
    pub warnings: Vec<String>,
}

impl EvalResult {
    pub fn from_value(value: f64, abs_err: f64, method: Method, effort: u64) -> Self {
        Self {
            log_abs: value.abs().ln(),
            sign: if value < 0.0 { -1.0 } else { 1.0 },
            abs_err,
            method,
            effort,
            warnings: Vec::new(),
        }
    }

    pub fn closed_form(value: f64) -> Self {
        Self::from_value(value, 0.0, Method::ClosedForm, 0)
    }

    pub fn from_log(log_abs: f64, sign: f64, abs_err: f64, method: Method, effort: u64) -> Self {
        Self { log_abs, sign, abs_err, method, effort, warnings: Vec::new() }
    }

    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }

    pub fn rel_err(&self) -> f64 {
        self.abs_err / self.log_abs.exp()
    }

    /// Multiplies value and error by `exp(log_factor)`.
    pub fn scale_log(mut self, log_factor: f64) -> Self {
        self.log_abs += log_factor;
        self.abs_err *= log_factor.exp();
        self
    }

    pub fn with_warning(mut self, w: impl Into<String>) -> Self {
        self.warnings.push(w.into());
        self
    }

    pub fn with_warnings(mut self, w: &[String]) -> Self {
        self.warnings.extend_from_slice(w);
        self
    }
}

/// Running mean and second central moment of `sign · exp(log)` values,
/// stored relative to a max-shift so that huge and tiny weights mix safely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMoments {
    n: u64,
    shift: f64,
    mean: f64,
    m2: f64,
}

impl Default for LogMoments {
    fn default() -> Self {
        Self { n: 0, shift: f64::NEG_INFINITY, mean: 0.0, m2: 0.0 }
    }
}

impl LogMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    fn rescale(&mut self, new_shift: f64) {
        if self.n > 0 && new_shift != self.shift {
            let f = (self.shift - new_shift).exp();
            self.mean *= f;
            self.m2 *= f * f;
        }
        self.shift = new_shift;
    }

    pub fn push_log(&mut self, sign: f64, log_abs: f64) {
        if log_abs.is_nan() || sign.is_nan() {
            self.shift = f64::NAN;
        }
        if log_abs > self.shift {
            self.rescale(log_abs);
        }
        let v = if log_abs == f64::NEG_INFINITY { 0.0 } else { sign * (log_abs - self.shift).exp() };
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    pub fn push(&mut self, v: f64) {
        self.push_log(if v < 0.0 { -1.0 } else { 1.0 }, v.abs().ln())
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &LogMoments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let mut o = *other;
        let s = self.shift.max(o.shift);
        self.rescale(s);
        o.rescale(s);
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        self.mean += delta * o.n as f64 / n as f64;
        self.m2 += o.m2 + delta * delta * (self.n as f64 * o.n as f64) / n as f64;
        self.n = n;
    }

    /// Mean with one standard error.
    pub fn finish(&self, method: Method) -> EvalResult {
        let n = self.n.max(1) as f64;
        let var = if self.n > 1 { (self.m2 / (n - 1.0)).max(0.0) } else { 0.0 };
        let se = (var / n).sqrt() * self.shift.exp();
        let sign = if self.mean < 0.0 { -1.0 } else { 1.0 };
        let log_abs = if self.shift.is_nan() { f64::NAN } else { self.shift + self.mean.abs().ln() };
        EvalResult::from_log(log_abs, sign, if self.shift.is_nan() { f64::NAN } else { se }, method, self.n)
    }
}
