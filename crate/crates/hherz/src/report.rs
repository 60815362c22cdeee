//! Report types and their JSON / CSV forms.

use std::io::Write;

use hherz_core::spaces::HerzTerm;
use hherz_core::QuadResult;
use serde::{Deserialize, Serialize};

/// A computed number with its error estimate and diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub err_est: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl Quantity {
    pub fn exact(value: f64) -> Self {
        Quantity { value, err_est: 0.0, flags: Vec::new() }
    }

    pub fn from_quad(name: &str, r: &QuadResult) -> Self {
        let mut flags = Vec::new();
        if r.divergent {
            flags.push(format!("{name}: integrand not absolutely integrable near the origin"));
        } else if r.flagged {
            flags.push(format!("{name}: error estimate {:.3e} above tolerance", r.err_est));
        }
        if r.core_tail > 0.0 && r.core_tail.is_finite() && r.core_tail > 1e-3 * r.value.abs() {
            flags.push(format!("{name}: excluded core carries {:.3e}", r.core_tail));
        }
        if let Some(t) = r.outer_tail {
            if t > 1e-3 * r.value.abs() {
                flags.push(format!("{name}: outer tail carries {:.3e}", t));
            }
        }
        Quantity { value: r.value, err_est: r.err_est, flags }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermRow {
    pub k: i32,
    pub factor: f64,
    pub norm: f64,
    pub err_est: f64,
}

impl From<&HerzTerm> for TermRow {
    fn from(t: &HerzTerm) -> Self {
        TermRow { k: t.k, factor: t.factor, norm: t.lq.value, err_est: t.lq.err_est }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Hypotheses {
    pub ok: bool,
    pub case: Option<String>,
    pub violations: Vec<String>,
}

/// How the nested LHS quadrature spent its budget.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NestedBudget {
    pub outer_budget: u64,
    pub inner_budget: u64,
    pub annuli: usize,
    pub inner_evals: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BaselineCheck {
    pub pinned: f64,
    pub rel_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// The entry did not exist and was written by this run.
    pub newly_pinned: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InequalityReport {
    pub scenario: String,
    pub digest: String,
    pub theorem: String,
    pub n: usize,
    pub seed: u64,
    pub budget: u64,
    pub hypotheses: Hypotheses,
    /// Herz norm of `T^b f` with `(α₂, p, q₂)`.
    pub lhs: Quantity,
    pub k_constant: Quantity,
    pub b_cbmo: Quantity,
    /// Herz norm of `f` with `(α₁, p, q₁)`.
    pub f_herz: Quantity,
    /// `k_constant · b_cbmo · f_herz`
    pub rhs: f64,
    /// `lhs / rhs`; absent when the run is degenerate.
    pub ratio: Option<f64>,
    pub degenerate: bool,
    pub nested: NestedBudget,
    pub lhs_terms: Vec<TermRow>,
    pub f_terms: Vec<TermRow>,
    pub cbmo_argmax_radius: f64,
    pub baseline: Option<BaselineCheck>,
    pub pass: bool,
}

impl InequalityReport {
    pub fn flags(&self) -> impl Iterator<Item = &String> {
        [&self.lhs, &self.k_constant, &self.b_cbmo, &self.f_herz].into_iter().flat_map(|q| q.flags.iter())
    }
}

/// One computed-vs-reference line.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: Option<f64>,
    /// Relative error against the reference, or the raw residual for identities.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `|value − reference| / |reference| ≤ tol`.
    pub fn relative(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let residual = if reference == 0.0 { value.abs() } else { (value - reference).abs() / reference.abs() };
        Check { name: name.into(), value, reference: Some(reference), residual, tolerance: tol, pass: residual <= tol }
    }

    /// A residual that must stay at or below `tol`.
    pub fn residual(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check { name: name.into(), value: residual, reference: None, residual, tolerance: tol, pass: residual <= tol }
    }

    /// A boolean property; `value` carries the number that decided it.
    pub fn holds(name: impl Into<String>, value: f64, pass: bool) -> Self {
        Check { name: name.into(), value, reference: None, residual: 0.0, tolerance: 0.0, pass }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(suite: &str, seed: u64, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        CheckReport { suite: suite.to_string(), seed, checks, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Flat table form for sweeps and plotting.
pub trait Tabular {
    fn header() -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

impl Tabular for CheckReport {
    fn header() -> Vec<&'static str> {
        vec!["suite", "check", "value", "reference", "residual", "tolerance", "pass"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    self.suite.clone(),
                    c.name.clone(),
                    num(c.value),
                    c.reference.map(num).unwrap_or_default(),
                    num(c.residual),
                    num(c.tolerance),
                    c.pass.to_string(),
                ]
            })
            .collect()
    }
}

impl Tabular for InequalityReport {
    fn header() -> Vec<&'static str> {
        vec![
            "scenario", "theorem", "seed", "budget", "lhs", "lhs_err", "k_constant", "k_err", "b_cbmo", "b_cbmo_err", "f_herz",
            "f_herz_err", "rhs", "ratio", "degenerate", "baseline", "pass", "flags",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.scenario.clone(),
            self.theorem.clone(),
            self.seed.to_string(),
            self.budget.to_string(),
            num(self.lhs.value),
            num(self.lhs.err_est),
            num(self.k_constant.value),
            num(self.k_constant.err_est),
            num(self.b_cbmo.value),
            num(self.b_cbmo.err_est),
            num(self.f_herz.value),
            num(self.f_herz.err_est),
            num(self.rhs),
            self.ratio.map(num).unwrap_or_default(),
            self.degenerate.to_string(),
            self.baseline.as_ref().map(|b| num(b.pinned)).unwrap_or_default(),
            self.pass.to_string(),
            self.flags().cloned().collect::<Vec<_>>().join("; "),
        ]]
    }
}

/// Writes any number of same-typed reports as one CSV table.
pub fn write_csv<T: Tabular, W: Write>(reports: &[T], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(T::header())?;
    for r in reports {
        for row in r.rows() {
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
