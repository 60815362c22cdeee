//! Matrix Hausdorff operators, their commutators and the bound constants.
//!
//! ```text
//! T_{Φ,A} f(x) = ∫ Φ(y)/|y|_h^Q · f(A(y)x) dy,      T^b f = b·T f − T(b f).
//! ```
//!
//! `A = InverseDilation` gives the classical operator `T_Φ`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use crate::error::{Error, Result};
use crate::graded::{g_from_norms, LocalNorms, MatrixField};
use crate::group::{norm_of, Coords, GroupDims, HPoint};
use crate::quadrature::{integrate_region, QuadResult, QuadSpec, Region};
use crate::spaces::CustomFunction;
use crate::weights::{power_weight_indices, Weight, WeightIndices};

/// Index identities are checked with this absolute slack.
pub const HYPOTHESIS_SLACK: f64 = 1e-12;

#[derive(Clone)]
pub enum KernelKind {
    /// Indicator of `r1 ≤ |y|_h ≤ r2`.
    CharShell { r1: f64, r2: f64 },
    /// `|y|_h^{-σ}` on `|y|_h ≥ r0`.
    PowerDecay { sigma: f64, r0: f64 },
    Zero,
    /// Arbitrary kernel supported in `inner ≤ |y|_h < outer` (`outer = None` is unbounded).
    Custom { f: CustomFunction, inner: f64, outer: Option<f64>, radial: bool },
}

impl fmt::Debug for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::CharShell { r1, r2 } => f.debug_struct("CharShell").field("r1", r1).field("r2", r2).finish(),
            KernelKind::PowerDecay { sigma, r0 } => {
                f.debug_struct("PowerDecay").field("sigma", sigma).field("r0", r0).finish()
            }
            KernelKind::Zero => f.write_str("Zero"),
            KernelKind::Custom { inner, outer, radial, .. } => f
                .debug_struct("Custom")
                .field("inner", inner)
                .field("outer", outer)
                .field("radial", radial)
                .finish(),
        }
    }
}

/// `Φ = scale · kind`.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub kind: KernelKind,
    pub scale: f64,
}

impl Kernel {
    pub fn char_shell(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0) || !(r2 > r1) || !r2.is_finite() {
            return Err(Error::param(alloc::format!("char_shell needs 0 < r1 < r2 < ∞, got [{r1}, {r2}]")));
        }
        Ok(Kernel { kind: KernelKind::CharShell { r1, r2 }, scale: 1.0 })
    }

    /// `σ > 0` keeps `∫|Φ|/|y|^Q` finite at infinity.
    pub fn power_decay(sigma: f64, r0: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() || !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::param(alloc::format!("power_decay needs sigma > 0 and r0 > 0, got ({sigma}, {r0})")));
        }
        Ok(Kernel { kind: KernelKind::PowerDecay { sigma, r0 }, scale: 1.0 })
    }

    pub fn zero() -> Self {
        Kernel { kind: KernelKind::Zero, scale: 1.0 }
    }

    pub fn custom(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        inner: f64,
        outer: Option<f64>,
        radial: bool,
    ) -> Result<Self> {
        if !(inner > 0.0) || outer.is_some_and(|o| !(o > inner) || !o.is_finite()) {
            return Err(Error::param("custom kernel support must be inner > 0 and outer > inner"));
        }
        Ok(Kernel { kind: KernelKind::Custom { f: Arc::new(f), inner, outer, radial }, scale: 1.0 })
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0 || matches!(self.kind, KernelKind::Zero)
    }

    pub fn is_radial(&self) -> bool {
        match &self.kind {
            KernelKind::Custom { radial, .. } => *radial,
            _ => true,
        }
    }

    #[inline]
    pub fn eval(&self, y: &[f64]) -> f64 {
        let r = norm_of(y);
        let v = match &self.kind {
            KernelKind::CharShell { r1, r2 } => {
                if r >= *r1 && r <= *r2 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelKind::PowerDecay { sigma, r0 } => {
                if r >= *r0 {
                    libm::pow(r, -sigma)
                } else {
                    0.0
                }
            }
            KernelKind::Zero => 0.0,
            KernelKind::Custom { f, inner, outer, .. } => {
                if r >= *inner && outer.is_none_or(|o| r < o) {
                    f(y)
                } else {
                    0.0
                }
            }
        };
        self.scale * v
    }

    /// Profile `Φ(r)` for radial built-in kinds.
    pub fn radial_profile(&self, r: f64) -> Option<f64> {
        match &self.kind {
            KernelKind::Custom { .. } => None,
            _ => {
                let mut e = [0.0; 3];
                e[0] = r;
                Some(self.eval(&e))
            }
        }
    }

    /// Radial support `[inner, outer)`; `None` is unbounded.
    pub fn support(&self) -> (f64, Option<f64>) {
        match &self.kind {
            KernelKind::CharShell { r1, r2 } => (*r1, Some(*r2)),
            KernelKind::PowerDecay { r0, .. } => (*r0, None),
            KernelKind::Zero => (1.0, Some(2.0)),
            KernelKind::Custom { inner, outer, .. } => (*inner, *outer),
        }
    }

    /// Integration domain for `y`.
    pub fn region(&self) -> Region {
        match self.support() {
            (inner, Some(outer)) => Region::shell(inner, outer),
            (inner, None) => Region::Exterior { inner },
        }
    }

    /// Decay exponent `σ` of a majorant `C|y|_h^{-σ}` used for tail accounting.
    pub fn decay_majorant(&self) -> Option<f64> {
        match &self.kind {
            KernelKind::PowerDecay { sigma, .. } => Some(*sigma),
            KernelKind::Custom { outer: None, .. } => None,
            _ => Some(f64::INFINITY),
        }
    }

    /// `∫ |Φ(y)|/|y|_h^Q dy`, which must be finite.
    pub fn check_integrable(&self, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult> {
        if self.is_zero() {
            return Ok(QuadResult::exact(0.0));
        }
        let q = dims.q_f64();
        match &self.kind {
            KernelKind::CharShell { r1, r2 } => {
                Ok(QuadResult::exact(libm::fabs(self.scale) * dims.w_q * libm::log(r2 / r1)))
            }
            KernelKind::PowerDecay { sigma, r0 } => {
                Ok(QuadResult::exact(libm::fabs(self.scale) * dims.w_q * libm::pow(*r0, -sigma) / sigma))
            }
            _ => {
                let r = integrate_region(|y| libm::fabs(self.eval(y)) / libm::pow(norm_of(y), q), &self.region(), spec, dims)?;
                if r.divergent {
                    return Err(Error::Divergent(String::from("kernel is not integrable against |y|^-Q")));
                }
                Ok(r)
            }
        }
    }
}

/// Integrates `h(y, A(y)x)` against `Φ(y)/|y|^Q` over the kernel support.
fn integrate_operator<H>(kernel: &Kernel, field: &MatrixField, x: &HPoint, spec: &QuadSpec, dims: &GroupDims, h: H) -> Result<QuadResult>
where
    H: Fn(&[f64]) -> f64,
{
    if x.n() != dims.n {
        return Err(Error::DimensionMismatch { expected: dims.n, found: x.n() });
    }
    if kernel.is_zero() {
        return Ok(QuadResult::exact(0.0));
    }
    let q = dims.q_f64();
    let failure = RefCell::new(None);
    let r = integrate_region(
        |y| {
            let phi = kernel.eval(y);
            if phi == 0.0 {
                return 0.0;
            }
            let mut z: Coords = Coords::from_elem(0.0, y.len());
            if let Err(e) = field.apply_into(y, x.coords(), &mut z) {
                failure.borrow_mut().get_or_insert(e);
                return 0.0;
            }
            phi / libm::pow(norm_of(y), q) * h(&z)
        },
        &kernel.region(),
        spec,
        dims,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// `T_{Φ,A} f(x)`.
pub fn apply_hausdorff<F>(f: F, kernel: &Kernel, field: &MatrixField, x: &HPoint, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64,
{
    integrate_operator(kernel, field, x, spec, dims, f)
}

/// `T^b_{Φ,A} f(x) = ∫ Φ(y)/|y|^Q (b(x) − b(A(y)x)) f(A(y)x) dy`, i.e. `b(x)·Tf(x) − T(bf)(x)` with
/// both integrals on the same nodes.
pub fn apply_commutator<B, F>(
    b: B,
    f: F,
    kernel: &Kernel,
    field: &MatrixField,
    x: &HPoint,
    spec: &QuadSpec,
    dims: &GroupDims,
) -> Result<QuadResult>
where
    B: Fn(&[f64]) -> f64,
    F: Fn(&[f64]) -> f64,
{
    let bx = b(x.coords());
    integrate_operator(kernel, field, x, spec, dims, |z| {
        let fz = f(z);
        if fz == 0.0 {
            return 0.0;
        }
        let d = bx - b(z);
        if d == 0.0 {
            0.0
        } else {
            d * fz
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremCase {
    /// `α₁ < 0`, `1/q₁ + α₁/Q ≥ 0`, general `A₁` weight.
    Thm1CaseI,
    /// `α₁ < 0`, `1/q₁ + α₁/Q < 0`, general `A₁` weight.
    Thm1CaseII,
    /// Power weight `|x|^β`, `1/q₂ = 1/q + 1/q₁`.
    Thm2,
}

impl TheoremCase {
    pub fn name(self) -> &'static str {
        match self {
            TheoremCase::Thm1CaseI => "thm1_case_i",
            TheoremCase::Thm1CaseII => "thm1_case_ii",
            TheoremCase::Thm2 => "thm2",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TheoremParams {
    pub which: TheoremCase,
    /// Outer Herz exponent.
    pub p: f64,
    /// CBMO exponent of `b`.
    pub q: f64,
    pub q1: f64,
    pub q2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Reverse Hölder tuning `1 < δ < r_w` for the first theorem; `None` takes the default.
    pub delta: Option<f64>,
    pub weight: Weight,
    /// Critical indices for a custom weight.
    pub indices: Option<WeightIndices>,
}

impl TheoremParams {
    /// `1/s = 1/q + 1/q₁`.
    pub fn s(&self) -> f64 {
        1.0 / (1.0 / self.q + 1.0 / self.q1)
    }

    pub fn weight_indices(&self, dims: &GroupDims) -> Option<WeightIndices> {
        if self.indices.is_some() {
            return self.indices;
        }
        self.weight.power_exponent().and_then(|beta| power_weight_indices(beta, dims).ok())
    }

    /// `δ`, defaulting to `min(2, (1 + r_w)/2)`.
    pub fn effective_delta(&self, r_w: f64) -> f64 {
        self.delta.unwrap_or_else(|| if r_w.is_finite() { f64::min(2.0, (1.0 + r_w) / 2.0) } else { 2.0 })
    }

    /// Exponent of the weight for the second theorem (`Unit` is `β = 0`).
    pub fn beta(&self) -> f64 {
        self.weight.power_exponent().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub ok: bool,
    /// Case implied by the indices (the second theorem always reports `Thm2`).
    pub case: Option<TheoremCase>,
    pub violations: Vec<String>,
}

fn close(a: f64, b: f64) -> bool {
    libm::fabs(a - b) <= HYPOTHESIS_SLACK
}

/// Checks every index relation of the selected theorem.
pub fn check_hypotheses(tp: &TheoremParams, dims: &GroupDims) -> HypothesisReport {
    use alloc::format;
    let q_dim = dims.q_f64();
    let mut v: Vec<String> = Vec::new();
    let finite_ge1 = |name: &str, x: f64, v: &mut Vec<String>| {
        if !x.is_finite() {
            v.push(format!("{name} must be finite (endpoint exponents are not supported), got {x}"));
        } else if x < 1.0 {
            v.push(format!("{name} >= 1 required, got {x}"));
        }
    };
    finite_ge1("p", tp.p, &mut v);
    finite_ge1("q1", tp.q1, &mut v);
    finite_ge1("q2", tp.q2, &mut v);
    finite_ge1("q", tp.q, &mut v);
    if tp.q.is_finite() && tp.q <= 1.0 {
        v.push(format!("q > 1 required for the CBMO norm, got {}", tp.q));
    }
    if !tp.alpha1.is_finite() || !tp.alpha2.is_finite() {
        v.push(String::from("alpha1 and alpha2 must be finite"));
    }

    let case = match tp.which {
        TheoremCase::Thm1CaseI | TheoremCase::Thm1CaseII => {
            if !(tp.alpha1 < 0.0) {
                v.push(format!("α₁<0 required, got α₁={}", tp.alpha1));
            }
            let lhs = tp.alpha1 / q_dim + 1.0 / tp.q1;
            let rhs = tp.alpha2 / q_dim + 1.0 / tp.q2;
            if !close(lhs, rhs) {
                v.push(format!("α₁/Q+1/q₁ = α₂/Q+1/q₂ required, got {lhs} vs {rhs}"));
            }
            match tp.weight_indices(dims) {
                None => v.push(String::from("weight indices unknown: custom weights must declare q_w and r_w")),
                Some(ix) => {
                    if ix.q_w > 1.0 + HYPOTHESIS_SLACK {
                        v.push(format!("w ∈ A₁ required, weight has critical index q_w={}", ix.q_w));
                    }
                    let r_w = ix.r_w;
                    if !(r_w > 1.0) {
                        v.push(format!("r_w > 1 required, got {r_w}"));
                    } else {
                        let s = tp.s();
                        let bound = if r_w.is_finite() { tp.q2 * r_w / (r_w - 1.0) } else { tp.q2 };
                        if !(s > bound + HYPOTHESIS_SLACK) {
                            v.push(format!("s > q₂r_w/(r_w−1) required, got s={s} and bound {bound}"));
                        }
                        let delta = tp.effective_delta(r_w);
                        if !(delta > 1.0) || !(delta < r_w) {
                            v.push(format!("1<δ<r_w required, got δ={delta}, r_w={r_w}"));
                        }
                    }
                }
            }
            let sign = 1.0 / tp.q1 + tp.alpha1 / q_dim;
            let implied = if sign >= -HYPOTHESIS_SLACK { TheoremCase::Thm1CaseI } else { TheoremCase::Thm1CaseII };
            if implied != tp.which {
                v.push(format!(
                    "case mismatch: 1/q₁+α₁/Q = {sign} selects {} but {} was requested",
                    implied.name(),
                    tp.which.name()
                ));
            }
            Some(implied)
        }
        TheoremCase::Thm2 => {
            if tp.q1 <= 1.0 {
                v.push(format!("q₁ > 1 required, got {}", tp.q1));
            }
            if tp.q2 <= 1.0 {
                v.push(format!("q₂ > 1 required, got {}", tp.q2));
            }
            let lhs = 1.0 / tp.q2;
            let rhs = 1.0 / tp.q + 1.0 / tp.q1;
            if !close(lhs, rhs) {
                v.push(format!("1/q₂ = 1/q+1/q₁ required, got {lhs} vs {rhs}"));
            }
            let lhs = 1.0 / tp.q + tp.alpha2 / q_dim;
            let rhs = tp.alpha1 / q_dim;
            if !close(lhs, rhs) {
                v.push(format!("1/q+α₂/Q = α₁/Q required, got {lhs} vs {rhs}"));
            }
            match tp.weight.power_exponent() {
                None => v.push(String::from("power weight |x|^β required")),
                Some(beta) => {
                    if !(beta > -(dims.n as f64)) {
                        v.push(format!("β > −n required, got β={beta}"));
                    }
                }
            }
            Some(TheoremCase::Thm2)
        }
    };
    HypothesisReport { ok: v.is_empty(), case, violations: v }
}

fn require(tp: &TheoremParams, dims: &GroupDims, allowed: &[TheoremCase]) -> Result<()> {
    let rep = check_hypotheses(tp, dims);
    let mut v = rep.violations;
    if !allowed.contains(&tp.which) {
        v.push(alloc::format!("constant not defined for {}", tp.which.name()));
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Hypotheses(v))
    }
}

/// `log(2/‖A‖)` below the seam, `log(2‖A‖)` above it.
#[inline]
fn seam_log(norm: f64) -> f64 {
    if norm < 1.0 {
        libm::log(2.0 / norm)
    } else {
        libm::log(2.0 * norm)
    }
}

/// Integrates `|Φ(y)|/|y|^Q · g(local norms at y)` over the kernel support.
fn integrate_constant<G>(kernel: &Kernel, field: &MatrixField, spec: &QuadSpec, dims: &GroupDims, g: G) -> Result<QuadResult>
where
    G: Fn(&LocalNorms) -> f64,
{
    if kernel.is_zero() {
        return Ok(QuadResult::exact(0.0));
    }
    let q = dims.q_f64();
    let failure = RefCell::new(None);
    let r = integrate_region(
        |y| {
            let phi = libm::fabs(kernel.eval(y));
            if phi == 0.0 {
                return 0.0;
            }
            match field.local_norms(y) {
                Ok(ln) => phi / libm::pow(norm_of(y), q) * g(&ln),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        &kernel.region(),
        spec,
        dims,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// The two exponents of the first theorem's constants: `−α₁` on the primary region and
/// `Q/q₁ − (α₁ + Q/q₁)(δ−1)/δ` on the other.
fn thm1_exponents(tp: &TheoremParams, dims: &GroupDims) -> (f64, f64) {
    let q_dim = dims.q_f64();
    let r_w = tp.weight_indices(dims).map_or(f64::INFINITY, |ix| ix.r_w);
    let delta = tp.effective_delta(r_w);
    let other = q_dim / tp.q1 - (tp.alpha1 + q_dim / tp.q1) * (delta - 1.0) / delta;
    (-tp.alpha1, other)
}

fn thm1_common(ln: &LocalNorms, tp: &TheoremParams, dims: &GroupDims) -> f64 {
    let q_dim = dims.q_f64();
    (1.0 + libm::pow(ln.det_inv, 1.0 / tp.q) * libm::pow(ln.norm, q_dim / tp.q)) * libm::pow(ln.det_inv, 1.0 / tp.q1)
}

/// First-theorem constant for case (i): `‖A‖ < 1` carries `‖A‖^{−α₁}`.
pub fn k1_constant(kernel: &Kernel, field: &MatrixField, tp: &TheoremParams, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult> {
    require(tp, dims, &[TheoremCase::Thm1CaseI])?;
    let (e_main, e_other) = thm1_exponents(tp, dims);
    integrate_constant(kernel, field, spec, dims, |ln| {
        let e = if ln.norm < 1.0 { e_main } else { e_other };
        thm1_common(ln, tp, dims) * libm::pow(ln.norm, e) * seam_log(ln.norm)
    })
}

/// First-theorem constant for case (ii): `‖A‖ ≥ 1` carries `‖A‖^{−α₁}`.
pub fn k2_constant(kernel: &Kernel, field: &MatrixField, tp: &TheoremParams, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult> {
    require(tp, dims, &[TheoremCase::Thm1CaseII])?;
    let (e_main, e_other) = thm1_exponents(tp, dims);
    integrate_constant(kernel, field, spec, dims, |ln| {
        let e = if ln.norm >= 1.0 { e_main } else { e_other };
        thm1_common(ln, tp, dims) * libm::pow(ln.norm, e) * seam_log(ln.norm)
    })
}

fn theta_from_norms(ln: &LocalNorms, tp: &TheoremParams, dims: &GroupDims) -> f64 {
    let q_dim = dims.q_f64();
    let beta = tp.beta();
    // G(A⁻¹, γ) with ‖A⁻¹‖ = inv_norm and ‖(A⁻¹)⁻¹‖ = norm
    let g_inv = |gamma: f64| g_from_norms(ln.inv_norm, ln.norm, gamma);
    libm::pow(ln.det_inv, 1.0 / tp.q1)
        * seam_log(ln.norm)
        * g_inv(beta / tp.q1)
        * (1.0 + libm::pow(ln.det_inv, 1.0 / tp.q) * g_inv(beta / tp.q) * libm::pow(ln.norm, (q_dim + beta) / tp.q))
}

/// Pointwise `Θ(y)` of the second theorem.
pub fn theta_weight(y: &[f64], kernel: &Kernel, field: &MatrixField, tp: &TheoremParams, dims: &GroupDims) -> Result<f64> {
    let phi = libm::fabs(kernel.eval(y));
    if phi == 0.0 {
        return Ok(0.0);
    }
    let ln = field.local_norms(y)?;
    Ok(phi / libm::pow(norm_of(y), dims.q_f64()) * theta_from_norms(&ln, tp, dims))
}

/// Second-theorem constant: `∫Θ(1 + log₂(‖A⁻¹‖‖A‖))` for `α₁ = 0`, else `∫Θ·G(A⁻¹, α₁(Q+β)/Q)`.
pub fn k3_constant(kernel: &Kernel, field: &MatrixField, tp: &TheoremParams, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult> {
    require(tp, dims, &[TheoremCase::Thm2])?;
    let q_dim = dims.q_f64();
    let gamma = tp.alpha1 * (q_dim + tp.beta()) / q_dim;
    integrate_constant(kernel, field, spec, dims, |ln| {
        let extra = if tp.alpha1 == 0.0 {
            1.0 + libm::log2(ln.inv_norm * ln.norm)
        } else {
            g_from_norms(ln.inv_norm, ln.norm, gamma)
        };
        theta_from_norms(ln, tp, dims) * extra
    })
}

/// The constant that belongs to `tp.which`.
pub fn theorem_constant(kernel: &Kernel, field: &MatrixField, tp: &TheoremParams, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult> {
    match tp.which {
        TheoremCase::Thm1CaseI => k1_constant(kernel, field, tp, spec, dims),
        TheoremCase::Thm1CaseII => k2_constant(kernel, field, tp, spec, dims),
        TheoremCase::Thm2 => k3_constant(kernel, field, tp, spec, dims),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{g_function, GradedMatrix};
    use crate::quadrature::integrate_radial;
    use crate::spaces::TestFunction;
    use core::f64::consts::{LN_2, PI};

    fn d1() -> GroupDims {
        GroupDims::new(1).unwrap()
    }

    fn spec() -> QuadSpec {
        QuadSpec::stratified(4_000, 11)
    }

    fn pt(c: &[f64]) -> HPoint {
        HPoint::new(c).unwrap()
    }

    fn thm1_worked() -> TheoremParams {
        TheoremParams {
            which: TheoremCase::Thm1CaseI,
            p: 2.0,
            q: 4.0,
            q1: 2.0,
            q2: 1.25,
            alpha1: -1.0,
            alpha2: -2.2,
            delta: None,
            weight: Weight::Unit,
            indices: None,
        }
    }

    fn thm2_worked() -> TheoremParams {
        TheoremParams {
            which: TheoremCase::Thm2,
            p: 2.0,
            q: 4.0,
            q1: 2.0,
            q2: 4.0 / 3.0,
            alpha1: 0.0,
            alpha2: -1.0,
            delta: None,
            weight: Weight::Unit,
            indices: None,
        }
    }

    /// Composite Simpson on `[a, b]`, independent of the crate's rules.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for i in 1..m {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn eigenfunction() {
        let d = d1();
        let k = Kernel::char_shell(1.0, 2.0).unwrap();
        let f = TestFunction::Power { lambda: 2.0 };
        for c in [[1.0, 0.0, 0.0], [0.3, -0.7, 2.0], [5.0, 1.0, -9.0]] {
            let x = pt(&c);
            let r = apply_hausdorff(|z| f.eval(z), &k, &MatrixField::InverseDilation, &x, &spec(), &d).unwrap();
            let oracle = 3.0 * PI * PI * x.norm().powi(-2);
            assert!((r.value - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", r.value);
        }
        let x = pt(&[1.0, 2.0, 3.0]);
        let z = apply_hausdorff(|_| 0.0, &k, &MatrixField::InverseDilation, &x, &spec(), &d).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn identity_field_factors() {
        let d = d1();
        let k = Kernel::char_shell(1.0, 2.0).unwrap();
        let id = MatrixField::Constant(GradedMatrix::identity(1).unwrap());
        let f = TestFunction::Bump { k_center: 0.0, width: 3.0 };
        let x = pt(&[0.4, 0.1, -0.3]);
        let r = apply_hausdorff(|z| f.eval(z), &k, &id, &x, &spec(), &d).unwrap();
        let oracle = 2.0 * PI * PI * LN_2 * f.eval(x.coords());
        assert!((r.value - oracle).abs() < 1e-8 * oracle.abs());
    }

    #[test]
    fn commutator_log_symbol() {
        let d = d1();
        let k = Kernel::char_shell(1.0, 2.0).unwrap();
        let f = TestFunction::Power { lambda: 2.0 };
        let b = TestFunction::LogNorm;
        let field = MatrixField::InverseDilation;
        for c in [[1.0, 0.0, 0.0], [0.2, 0.5, -1.5]] {
            let x = pt(&c);
            let r = apply_commutator(|z| b.eval(z), |z| f.eval(z), &k, &field, &x, &spec(), &d).unwrap();
            let oracle = 2.0 * PI * PI * (2.0 * LN_2 - 0.75) * x.norm().powi(-2);
            assert!((r.value - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", r.value);
            assert!((oracle * x.norm().powi(2) / 12.5614 - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn commutator_constant_symbol_and_linearity() {
        let d = d1();
        let k = Kernel::power_decay(5.0, 1.0).unwrap();
        let spec = spec().with_tail(12);
        let field = MatrixField::InverseDilation;
        let f = TestFunction::Power { lambda: 1.0 };
        let g = TestFunction::Bump { k_center: -1.0, width: 2.0 };
        let x = pt(&[0.7, -0.2, 0.9]);
        let c = apply_commutator(|_| 3.5, |z| f.eval(z), &k, &field, &x, &spec, &d).unwrap();
        assert_eq!(c.value, 0.0);
        let b = TestFunction::LogNorm;
        let tb = |h: &dyn Fn(&[f64]) -> f64| apply_commutator(|z| b.eval(z), h, &k, &field, &x, &spec, &d).unwrap().value;
        let a = -1.7;
        let combo = tb(&|z| a * f.eval(z) + g.eval(z));
        let split = a * tb(&|z| f.eval(z)) + tb(&|z| g.eval(z));
        assert!((combo - split).abs() < 1e-10 * combo.abs().max(1.0));
        let shifted = b.clone().shifted(4.0);
        let s = apply_commutator(|z| shifted.eval(z), |z| f.eval(z), &k, &field, &x, &spec, &d).unwrap().value;
        let plain = tb(&|z| f.eval(z));
        assert!((s - plain).abs() < 1e-10 * plain.abs());
    }

    #[test]
    fn k1_worked_value() {
        let d = d1();
        let k = Kernel::char_shell(1.0, 2.0).unwrap();
        let tp = thm1_worked();
        let r = k1_constant(&k, &MatrixField::InverseDilation, &tp, &spec(), &d).unwrap();
        let oracle = 4.0 * PI * PI * (3.0 * LN_2 - 1.0);
        assert!((r.value - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", r.value);
        assert!((oracle / 42.617 - 1.0).abs() < 1e-2);
        let z = k1_constant(&Kernel::zero(), &MatrixField::InverseDilation, &tp, &spec(), &d).unwrap();
        assert_eq!(z.value, 0.0);
        let s = k1_constant(&k.clone().scaled(-3.0), &MatrixField::InverseDilation, &tp, &spec(), &d).unwrap();
        assert!((s.value - 3.0 * r.value).abs() < 1e-12 * s.value);
    }

    #[test]
    fn k1_requires_hypotheses() {
        let d = d1();
        let k = Kernel::char_shell(1.0, 2.0).unwrap();
        let mut tp = thm1_worked();
        tp.alpha1 = 1.0;
        match k1_constant(&k, &MatrixField::InverseDilation, &tp, &spec(), &d) {
            Err(Error::Hypotheses(v)) => assert!(v.iter().any(|s| s.contains("α₁<0 required"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn k2_worked_value() {
        let d = d1();
        let k = Kernel::char_shell(0.25, 0.5).unwrap();
        // s = 8/3 > q₂ = 2 (unit weight), α₂ = Q(α₁/Q + 1/q₁ − 1/q₂) = −2.5
        let tp = TheoremParams { which: TheoremCase::Thm1CaseII, q1: 8.0, q2: 2.0, alpha2: -2.5, ..thm1_worked() };
        assert!(check_hypotheses(&tp, &d).ok, "{:?}", check_hypotheses(&tp, &d));
        let r = k2_constant(&k, &MatrixField::InverseDilation, &tp, &spec(), &d).unwrap();
        let w_q = 2.0 * PI * PI;
        let closed = 2.0 * w_q * (4.0 * 2f64.sqrt() * (1.0 - LN_2) - 8.0 + 12.0 * LN_2);
        let quad = 2.0 * w_q * simpson(|r| r.powf(-1.5) * (2.0 / r).ln(), 0.25, 0.5, 2000);
        assert!((closed - quad).abs() < 1e-9 * closed);
        assert!((closed - 81.07).abs() < 0.01);
        assert!((r.value - closed).abs() < 1e-6 * closed, "{} vs {closed}", r.value);
        let z = k2_constant(&Kernel::zero(), &MatrixField::InverseDilation, &tp, &spec(), &d).unwrap();
        assert_eq!(z.value, 0.0);
        let s = k2_constant(&k.scaled(0.5), &MatrixField::InverseDilation, &tp, &spec(), &d).unwrap();
        assert!((s.value - 0.5 * r.value).abs() < 1e-12 * r.value);
    }

    #[test]
    fn k_constants_match_radial_reduction() {
        let d = d1();
        let k = Kernel::power_decay(3.0, 0.5).unwrap();
        let tp = thm1_worked();
        let spec = spec().with_tail(20);
        let r = k1_constant(&k, &MatrixField::InverseDilation, &tp, &spec, &d).unwrap();
        // ‖A‖ = 1/ρ; the split at ρ = 1 puts ρ ∈ [1/2, 1) in the ‖A‖ ≥ 1 branch with exponent
        // Q/q₁ − (α₁+Q/q₁)/2 = 3/2 applied to ‖A‖ = 1/ρ.
        let inner = integrate_radial(|rho| rho.powi(-3) * rho.powi(-4) * 2.0 * rho.powi(2) * rho.powf(-1.5) * (2.0 / rho).ln(), 0.5, 1.0, &d)
            .unwrap()
            .value;
        let outer = integrate_radial(|rho| rho.powi(-3) * rho.powi(-4) * 2.0 * rho.powi(2) * rho.powi(-1) * (2.0 * rho).ln(), 1.0, 1e6, &d)
            .unwrap()
            .value;
        let oracle = inner + outer;
        assert!((r.value - oracle).abs() < 1e-3 * oracle, "{} vs {oracle}", r.value);
    }

    #[test]
    fn theta_examples() {
        let d = d1();
        let k = Kernel::custom(|_| 1.0, 1e-3, None, true).unwrap();
        let mut tp = thm2_worked();
        tp.q = 2.0;
        tp.q1 = 2.0;
        let y = [2.0, 0.0, 0.0];
        let th = theta_weight(&y, &k, &MatrixField::InverseDilation, &tp, &d).unwrap();
        assert!((th - LN_2).abs() < 1e-12, "{th}");
        let z = theta_weight(&y, &Kernel::zero(), &MatrixField::InverseDilation, &tp, &d).unwrap();
        assert_eq!(z, 0.0);
        // seam continuity
        let at = |r: f64| seam_log(r);
        assert!((at(1.0 - 1e-12) - at(1.0)).abs() < 1e-11);
        assert!((at(1.0) - LN_2).abs() < 1e-15);
        let on = theta_weight(&[1.0, 0.0, 0.0], &k, &MatrixField::InverseDilation, &tp, &d).unwrap();
        let below = theta_weight(&[1.0 + 1e-9, 0.0, 0.0], &k, &MatrixField::InverseDilation, &tp, &d).unwrap();
        assert!((on - below).abs() < 1e-7);
    }

    #[test]
    fn k3_alpha_zero_radial_oracle() {
        let d = d1();
        let k = Kernel::char_shell(1.0, 2.0).unwrap();
        let tp = thm2_worked();
        assert!(check_hypotheses(&tp, &d).ok);
        let r = k3_constant(&k, &MatrixField::InverseDilation, &tp, &spec(), &d).unwrap();
        // Θ(ρ) = ρ^{-Q} ρ^{Q/q₁} log(2ρ) · 2
        let oracle = integrate_radial(|rho| rho.powi(-4) * rho.powi(2) * (2.0 * rho).ln() * 2.0, 1.0, 2.0, &d).unwrap().value;
        assert!((r.value - oracle).abs() < 1e-6 * oracle);
        let z = k3_constant(&Kernel::zero(), &MatrixField::InverseDilation, &tp, &spec(), &d).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn k3_constant_field_separates() {
        let d = d1();
        let k = Kernel::char_shell(1.0, 2.0).unwrap();
        let m = GradedMatrix::diagonal(&[2.0, 0.5], 3.0).unwrap();
        let field = MatrixField::Constant(m.clone());
        let tp = TheoremParams { alpha1: 1.0, alpha2: 0.0, weight: Weight::Power { beta: 0.5 }, ..thm2_worked() };
        assert!(check_hypotheses(&tp, &d).ok, "{:?}", check_hypotheses(&tp, &d));
        let r = k3_constant(&k, &field, &tp, &spec(), &d).unwrap();
        let theta_int = integrate_region(
            |y| theta_weight(y, &k, &field, &tp, &d).unwrap(),
            &Region::shell(1.0, 2.0),
            &QuadSpec::stratified(8_000, 5),
            &d,
        )
        .unwrap()
        .value;
        let g = g_function(&m.inverse(), 1.0 * (4.0 + 0.5) / 4.0);
        assert!((r.value - g * theta_int).abs() < 1e-9 * r.value);
    }

    #[test]
    fn hypothesis_examples() {
        let d = d1();
        let rep = check_hypotheses(&thm1_worked(), &d);
        assert!(rep.ok, "{:?}", rep.violations);
        assert_eq!(rep.case, Some(TheoremCase::Thm1CaseI));
        assert!((thm1_worked().s() - 4.0 / 3.0).abs() < 1e-15);
        let rep = check_hypotheses(&thm2_worked(), &d);
        assert!(rep.ok, "{:?}", rep.violations);
        let mut bad = thm1_worked();
        bad.alpha1 = 1.0;
        let rep = check_hypotheses(&bad, &d);
        assert!(!rep.ok);
        assert!(rep.violations.iter().any(|s| s.contains("α₁<0 required")));
        let mut bad = thm1_worked();
        bad.q2 = 1.5;
        bad.alpha2 = 4.0 * (-0.25 + 0.5 - 1.0 / 1.5);
        let rep = check_hypotheses(&bad, &d);
        assert!(rep.violations.iter().any(|s| s.contains("s > q₂")), "{:?}", rep.violations);
        let mut q1 = thm1_worked();
        q1.q = 1.0;
        assert!(check_hypotheses(&q1, &d).violations.iter().any(|s| s.contains("q > 1")));
        let mut w = thm1_worked();
        w.weight = Weight::Power { beta: 1.0 };
        assert!(check_hypotheses(&w, &d).violations.iter().any(|s| s.contains("A₁")));
        let mut t2 = thm2_worked();
        t2.weight = Weight::Power { beta: -1.0 };
        assert!(check_hypotheses(&t2, &d).violations.iter().any(|s| s.contains("β > −n")));
    }

    #[test]
    fn kernel_integrability() {
        let d = d1();
        let k = Kernel::power_decay(2.0, 1.0).unwrap();
        let r = k.check_integrable(&spec(), &d).unwrap();
        assert!((r.value - d.w_q / 2.0).abs() < 1e-12);
        assert!(Kernel::power_decay(0.0, 1.0).is_err());
        assert!(Kernel::char_shell(2.0, 1.0).is_err());
        let c = Kernel::custom(norm_of, 1.0, Some(2.0), true).unwrap();
        let r = c.check_integrable(&spec(), &d).unwrap();
        assert!((r.value - d.w_q).abs() < 1e-9 * d.w_q);
    }
}
