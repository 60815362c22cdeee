//! Scenario documents: one JSON file fully describes an inequality run.

use std::fs;
use std::path::Path;

use hherz_core::graded::{GradedMatrix, MatrixField};
use hherz_core::hausdorff::{Kernel, TheoremCase, TheoremParams};
use hherz_core::quadrature::{Method, QuadSpec};
use hherz_core::spaces::{HerzParams, TestFunction};
use hherz_core::weights::Weight;
use hherz_core::GroupDims;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed scenario {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKindSpec {
    CharShell { r1: f64, r2: f64 },
    PowerDecay { sigma: f64, r0: f64 },
    Zero,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub kind: KernelKindSpec,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    InverseDilation,
    Identity,
    /// `B` as `2n` rows of length `2n`, center scale `a`.
    Constant { b: Vec<Vec<f64>>, a: f64 },
    Diagonal { b: Vec<f64>, a: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKindSpec {
    Constant { c: f64 },
    Power { lambda: f64 },
    CharBall { k: i32 },
    CharAnnulus { k1: i32, k2: i32 },
    LogNorm,
    Bump { k_center: f64, width: f64 },
}

/// `scale · kind + shift`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FunctionSpec {
    #[serde(flatten)]
    pub kind: FunctionKindSpec,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub shift: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Unit,
    Power { beta: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Thm1CaseI,
    Thm1CaseIi,
    Thm2,
}

impl From<Which> for TheoremCase {
    fn from(w: Which) -> Self {
        match w {
            Which::Thm1CaseI => TheoremCase::Thm1CaseI,
            Which::Thm1CaseIi => TheoremCase::Thm1CaseII,
            Which::Thm2 => TheoremCase::Thm2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TheoremSpec {
    pub which: Which,
    pub p: f64,
    pub q: f64,
    pub q1: f64,
    pub q2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    pub weight: WeightSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    TensorGrid,
    StratifiedMonteCarlo,
    Radial1d,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadDto {
    pub method: MethodSpec,
    /// Evaluation budget per integral; for the nested LHS it caps each annulus.
    pub budget: u64,
    pub seed: u64,
    /// Outer nodes per annulus of the LHS; each inner operator integral gets `budget / lhs_outer_budget`.
    pub lhs_outer_budget: u64,
    #[serde(default)]
    pub tail_k: Option<i32>,
    #[serde(default)]
    pub core_k: Option<i32>,
    pub radial_nodes: usize,
    #[serde(default)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct HerzWindow {
    pub k_min: i32,
    pub k_max: i32,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CbmoGrid {
    pub j_min: i32,
    pub j_max: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub kernel: KernelSpec,
    pub matrix_field: FieldSpec,
    pub symbol_b: FunctionSpec,
    pub f: FunctionSpec,
    pub theorem: TheoremSpec,
    pub quad: QuadDto,
    pub herz_window: HerzWindow,
    pub cbmo_grid: CbmoGrid,
}

/// Core objects built from a [`Scenario`].
#[derive(Debug, Clone)]
pub struct Resolved {
    pub dims: GroupDims,
    pub kernel: Kernel,
    pub field: MatrixField,
    pub b: TestFunction,
    pub f: TestFunction,
    pub tp: TheoremParams,
    pub spec: QuadSpec,
    pub lhs_outer: QuadSpec,
    pub lhs_inner: QuadSpec,
    pub f_herz: HerzParams,
    pub lhs_herz: HerzParams,
    pub cbmo_grid: (i32, i32),
}

fn invalid(e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Invalid(e.to_string())
}

impl FunctionSpec {
    pub fn to_core(&self) -> TestFunction {
        let base = match self.kind {
            FunctionKindSpec::Constant { c } => TestFunction::Constant(c),
            FunctionKindSpec::Power { lambda } => TestFunction::Power { lambda },
            FunctionKindSpec::CharBall { k } => TestFunction::CharBall { k },
            FunctionKindSpec::CharAnnulus { k1, k2 } => TestFunction::CharAnnulus { k1, k2 },
            FunctionKindSpec::LogNorm => TestFunction::LogNorm,
            FunctionKindSpec::Bump { k_center, width } => TestFunction::Bump { k_center, width },
        };
        if self.scale == 1.0 && self.shift == 0.0 {
            base
        } else {
            TestFunction::Affine { inner: Box::new(base), scale: self.scale, shift: self.shift }
        }
    }
}

impl WeightSpec {
    pub fn to_core(&self, dims: &GroupDims) -> Result<Weight, ScenarioError> {
        match *self {
            WeightSpec::Unit => Ok(Weight::Unit),
            WeightSpec::Power { beta } => Weight::power(beta, dims).map_err(invalid),
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text).map_err(|e| match e {
            ScenarioError::Parse { source, .. } => ScenarioError::Parse { path: path.display().to_string(), source },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|source| ScenarioError::Parse { path: String::from("<input>"), source })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.quad.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.quad.budget = budget;
        self
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn resolve(&self) -> Result<Resolved, ScenarioError> {
        let dims = GroupDims::new(self.n).map_err(invalid)?;
        let kernel = match self.kernel.kind {
            KernelKindSpec::CharShell { r1, r2 } => Kernel::char_shell(r1, r2).map_err(invalid)?,
            KernelKindSpec::PowerDecay { sigma, r0 } => Kernel::power_decay(sigma, r0).map_err(invalid)?,
            KernelKindSpec::Zero => Kernel::zero(),
        }
        .scaled(self.kernel.scale);
        let field = match &self.matrix_field {
            FieldSpec::InverseDilation => MatrixField::InverseDilation,
            FieldSpec::Identity => MatrixField::Constant(GradedMatrix::identity(self.n).map_err(invalid)?),
            FieldSpec::Constant { b, a } => {
                if b.len() != 2 * self.n {
                    return Err(invalid(format!("matrix_field.b needs {} rows", 2 * self.n)));
                }
                MatrixField::Constant(GradedMatrix::from_rows(b, *a).map_err(invalid)?)
            }
            FieldSpec::Diagonal { b, a } => {
                if b.len() != 2 * self.n {
                    return Err(invalid(format!("matrix_field.b needs {} entries", 2 * self.n)));
                }
                MatrixField::Constant(GradedMatrix::diagonal(b, *a).map_err(invalid)?)
            }
        };
        let th = &self.theorem;
        let weight = th.weight.to_core(&dims)?;
        let tp = TheoremParams {
            which: th.which.into(),
            p: th.p,
            q: th.q,
            q1: th.q1,
            q2: th.q2,
            alpha1: th.alpha1,
            alpha2: th.alpha2,
            delta: th.delta,
            weight: weight.clone(),
            indices: None,
        };
        let qd = &self.quad;
        let method = match qd.method {
            MethodSpec::TensorGrid => Method::TensorGrid,
            MethodSpec::StratifiedMonteCarlo => Method::StratifiedMonteCarlo,
            MethodSpec::Radial1d => Method::Radial1d,
        };
        if qd.budget == 0 || qd.lhs_outer_budget == 0 || qd.radial_nodes == 0 {
            return Err(invalid("quad.budget, quad.lhs_outer_budget and quad.radial_nodes must be positive"));
        }
        if qd.lhs_outer_budget > qd.budget {
            return Err(invalid("quad.lhs_outer_budget cannot exceed quad.budget"));
        }
        let mut spec = QuadSpec::new(method, qd.budget, qd.seed);
        spec.radial_nodes = qd.radial_nodes;
        spec.tail_k = qd.tail_k;
        spec.core_k = qd.core_k;
        spec.rel_tol = qd.rel_tol;
        let lhs_outer = spec.clone().with_budget(qd.lhs_outer_budget);
        let lhs_inner = spec.clone().with_budget(qd.budget / qd.lhs_outer_budget);

        let HerzWindow { k_min, k_max } = self.herz_window;
        // exponents are validated by the hypothesis check, so build the parameter sets directly
        let herz = |alpha, q| HerzParams { alpha, p: th.p, q, weight: weight.clone(), k_min, k_max };
        if k_min >= k_max {
            return Err(invalid("herz_window needs k_min < k_max"));
        }
        if self.cbmo_grid.j_min > self.cbmo_grid.j_max {
            return Err(invalid("cbmo_grid needs j_min <= j_max"));
        }
        Ok(Resolved {
            dims,
            kernel,
            field,
            b: self.symbol_b.to_core(),
            f: self.f.to_core(),
            f_herz: herz(th.alpha1, th.q1),
            lhs_herz: herz(th.alpha2, th.q2),
            tp,
            spec,
            lhs_outer,
            lhs_inner,
            cbmo_grid: (self.cbmo_grid.j_min, self.cbmo_grid.j_max),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"{
        "name": "t",
        "n": 1,
        "kernel": {"kind": "char_shell", "r1": 1, "r2": 2},
        "matrix_field": {"kind": "inverse_dilation"},
        "symbol_b": {"kind": "log_norm"},
        "f": {"kind": "power", "lambda": 2, "scale": 3},
        "theorem": {"which": "thm1_case_i", "p": 2, "q": 4, "q1": 2, "q2": 1.25,
                    "alpha1": -1, "alpha2": -2.2, "weight": {"kind": "unit"}},
        "quad": {"method": "stratified_monte_carlo", "budget": 4096, "seed": 7,
                 "lhs_outer_budget": 256, "radial_nodes": 8},
        "herz_window": {"k_min": -4, "k_max": 4},
        "cbmo_grid": {"j_min": -4, "j_max": 4}
    }"#;

    #[test]
    fn parses_and_resolves() {
        let s = Scenario::parse(WORKED).unwrap();
        assert_eq!(s.kernel.scale, 1.0);
        assert_eq!(s.f.scale, 3.0);
        let r = s.resolve().unwrap();
        assert_eq!(r.lhs_inner.budget, 16);
        assert_eq!(r.tp.which, TheoremCase::Thm1CaseI);
        let x = [2.0, 0.0, 0.0];
        assert!((r.f.eval(&x) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn digest_tracks_content() {
        let s = Scenario::parse(WORKED).unwrap();
        assert_eq!(s.digest(), s.clone().digest());
        assert_ne!(s.digest(), s.clone().with_seed(8).digest());
        assert_eq!(s.digest().len(), 64);
    }

    #[test]
    fn rejects_unknown_fields_and_kinds() {
        let bad = WORKED.replace("\"n\": 1,", "\"n\": 1, \"extra\": 0,");
        assert!(matches!(Scenario::parse(&bad), Err(ScenarioError::Parse { .. })));
        let bad = WORKED.replace("log_norm", "sine");
        assert!(Scenario::parse(&bad).is_err());
        let bad = WORKED.replace("\"r1\": 1", "\"r1\": 3");
        assert!(matches!(Scenario::parse(&bad).unwrap().resolve(), Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn round_trips() {
        let s = Scenario::parse(WORKED).unwrap();
        let back: Scenario = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }
}
