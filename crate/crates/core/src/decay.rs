//! Measured decay tables with least-squares model fits.
//!
//! Decay probes across this crate (Weyl-sum sweeps, multiplier error sweeps,
//! empirical norm ratios) all report their measurements through one table
//! type: a parameter column, the raw measured value, a normalized value, and
//! an optional fitted decay model with per-row residuals.  Exponents are
//! always *outputs* of a fit, never inputs.

use serde::Serialize;

/// One measurement row.  A flagged row records why its precondition could not
/// be verified; flagged rows are kept in the table but excluded from fits.
#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub param: f64,
    pub raw: f64,
    pub normalized: f64,
    /// `None` for a usable row, `Some(reason)` for a flagged one.
    pub flag: Option<String>,
}

/// The model class a table was fitted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitModel {
    /// `normalized ≈ C · param^{−exponent}` (fit in log2–log2 coordinates).
    PowerLaw,
    /// `normalized ≈ C · 2^{−exponent·param}` (fit of log2 against param).
    ExponentialInParam,
    /// `normalized ≈ C · (ln param)^{−exponent}` (fit of ln against ln ln).
    LogPowerLaw,
}

/// Result of a least-squares fit on the unflagged rows.
#[derive(Debug, Clone, Serialize)]
pub struct Fit {
    pub model: FitModel,
    /// Decay rate; positive means the normalized column decays.
    pub exponent: f64,
    /// Intercept in the fit coordinates (log2 or ln, per model).
    pub intercept: f64,
    pub r_squared: f64,
    pub rms_residual: f64,
    pub points_used: usize,
}

impl Fit {
    /// Model prediction for the normalized column at `param`.
    pub fn predict(&self, param: f64) -> f64 {
        match self.model {
            FitModel::PowerLaw => {
                (self.intercept - self.exponent * param.log2()).exp2()
            }
            FitModel::ExponentialInParam => {
                (self.intercept - self.exponent * param).exp2()
            }
            FitModel::LogPowerLaw => {
                (self.intercept - self.exponent * param.ln().ln()).exp()
            }
        }
    }
}

/// A decay measurement table.
#[derive(Debug, Clone, Serialize)]
pub struct DecayTable {
    /// Human-readable label of the sweep (appears as a CSV comment).
    pub label: String,
    /// Name of the parameter column (e.g. "R", "j", "N").
    pub param_name: String,
    pub rows: Vec<DecayRow>,
    pub fit: Option<Fit>,
}

/// Ordinary least squares on (x, y); returns (slope, intercept, r², rms).
fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
    }
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let rms = (ss_res / n).sqrt();
    (slope, intercept, r_squared, rms)
}

impl DecayTable {
    pub fn new(label: impl Into<String>, param_name: impl Into<String>) -> Self {
        DecayTable {
            label: label.into(),
            param_name: param_name.into(),
            rows: Vec::new(),
            fit: None,
        }
    }

    pub fn push(&mut self, param: f64, raw: f64, normalized: f64, flag: Option<String>) {
        self.rows.push(DecayRow {
            param,
            raw,
            normalized,
            flag,
        });
    }

    fn fit_points(&self, map_x: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for row in &self.rows {
            if row.flag.is_none() && row.normalized > 0.0 && row.param > 0.0 {
                xs.push(map_x(row.param));
                ys.push(row.normalized.log2());
            }
        }
        (xs, ys)
    }

    /// Fits `normalized ≈ C · param^{−exponent}`; needs ≥ 2 usable rows.
    pub fn fit_power_law(&mut self) -> Option<&Fit> {
        let (xs, ys) = self.fit_points(|p| p.log2());
        if xs.len() < 2 {
            return None;
        }
        let (slope, intercept, r2, rms) = linear_regression(&xs, &ys);
        self.fit = Some(Fit {
            model: FitModel::PowerLaw,
            exponent: -slope,
            intercept,
            r_squared: r2,
            rms_residual: rms,
            points_used: xs.len(),
        });
        self.fit.as_ref()
    }

    /// Fits `normalized ≈ C · 2^{−exponent·param}` (param is already a scale
    /// index such as j); needs ≥ 2 usable rows.
    pub fn fit_exponential_in_param(&mut self) -> Option<&Fit> {
        let (xs, ys) = self.fit_points(|p| p);
        if xs.len() < 2 {
            return None;
        }
        let (slope, intercept, r2, rms) = linear_regression(&xs, &ys);
        self.fit = Some(Fit {
            model: FitModel::ExponentialInParam,
            exponent: -slope,
            intercept,
            r_squared: r2,
            rms_residual: rms,
            points_used: xs.len(),
        });
        self.fit.as_ref()
    }

    /// Fits `normalized ≈ C · (ln param)^{−exponent}`; needs ≥ 2 usable rows
    /// with param > 1.
    pub fn fit_log_power_law(&mut self) -> Option<&Fit> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for row in &self.rows {
            if row.flag.is_none() && row.normalized > 0.0 && row.param > 1.0 {
                xs.push(row.param.ln().ln());
                ys.push(row.normalized.ln());
            }
        }
        if xs.len() < 2 {
            return None;
        }
        let (slope, intercept, r2, rms) = linear_regression(&xs, &ys);
        self.fit = Some(Fit {
            model: FitModel::LogPowerLaw,
            exponent: -slope,
            intercept,
            r_squared: r2,
            rms_residual: rms,
            points_used: xs.len(),
        });
        self.fit.as_ref()
    }

    /// Deterministic CSV rendering.
    ///
    /// Layout: two comment lines (label and fit summary), then the header
    /// `param,raw,normalized,fitted_model,residual`.  For a flagged row the
    /// `fitted_model` cell carries `flagged:<reason>` and the residual is
    /// empty; otherwise `fitted_model` is the model prediction at that row's
    /// parameter and `residual = normalized − prediction` (both empty when no
    /// fit was performed).  Floats are rendered with Rust's shortest
    /// round-trip formatting, which is deterministic.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.label));
        match &self.fit {
            Some(fit) => out.push_str(&format!(
                "# fit: model={:?} exponent={} intercept={} r_squared={} rms_residual={} points={}\n",
                fit.model, fit.exponent, fit.intercept, fit.r_squared, fit.rms_residual,
                fit.points_used
            )),
            None => out.push_str("# fit: none\n"),
        }
        out.push_str("param,raw,normalized,fitted_model,residual\n");
        for row in &self.rows {
            match (&row.flag, &self.fit) {
                (Some(reason), _) => out.push_str(&format!(
                    "{},{},{},flagged:{},\n",
                    row.param, row.raw, row.normalized, reason
                )),
                (None, Some(fit)) => {
                    let pred = fit.predict(row.param);
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        row.param,
                        row.raw,
                        row.normalized,
                        pred,
                        row.normalized - pred
                    ));
                }
                (None, None) => out.push_str(&format!(
                    "{},{},{},,\n",
                    row.param, row.raw, row.normalized
                )),
            }
        }
        out
    }
}
