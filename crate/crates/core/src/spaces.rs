//! Weighted Lebesgue, homogeneous weighted Herz and weighted central BMO norms.
//!
//! The Herz norm is
//!
//! ```text
//! ‖f‖ = ( Σ_k w(B_k)^{αp/Q} ‖f‖^p_{L^q(E_k; w)} )^{1/p},   E_k = B_k \ B_{k-1},
//! ```
//!
//! summed over a finite window `k_min..=k_max`, and the CBMO norm is the sup over origin balls
//! `B = B(0, R)` of `((1/w(B)) ∫_B |b − b_B|^q w)^{1/q}` with the unweighted average `b_B`, taken
//! over a dyadic radius grid.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::group::{norm_of, GroupDims};
use crate::quadrature::{integrate_region, QuadResult, QuadSpec, Region};
use crate::weights::{weight_of_ball, Weight};

pub type CustomFunction = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Catalog of test functions and symbols.
#[derive(Clone)]
pub enum TestFunction {
    Constant(f64),
    /// `|x|_h^{-λ}`
    Power { lambda: f64 },
    /// Indicator of `B_k`.
    CharBall { k: i32 },
    /// Indicator of `{2^{k1} ≤ |x|_h < 2^{k2}}`.
    CharAnnulus { k1: i32, k2: i32 },
    /// `log |x|_h`
    LogNorm,
    /// `(1 − u²)²` for `|u| < 1`, `u = (log₂|x|_h − k_center)/width`; zero elsewhere.
    Bump { k_center: f64, width: f64 },
    /// `scale·inner + shift`
    Affine { inner: Box<TestFunction>, scale: f64, shift: f64 },
    Custom(CustomFunction),
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            TestFunction::Power { lambda } => f.debug_struct("Power").field("lambda", lambda).finish(),
            TestFunction::CharBall { k } => f.debug_struct("CharBall").field("k", k).finish(),
            TestFunction::CharAnnulus { k1, k2 } => f.debug_struct("CharAnnulus").field("k1", k1).field("k2", k2).finish(),
            TestFunction::LogNorm => f.write_str("LogNorm"),
            TestFunction::Bump { k_center, width } => {
                f.debug_struct("Bump").field("k_center", k_center).field("width", width).finish()
            }
            TestFunction::Affine { inner, scale, shift } => {
                f.debug_struct("Affine").field("inner", inner).field("scale", scale).field("shift", shift).finish()
            }
            TestFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl TestFunction {
    pub fn custom(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        TestFunction::Custom(Arc::new(f))
    }

    pub fn scaled(self, c: f64) -> Self {
        self.affine(c, 0.0)
    }

    pub fn shifted(self, c: f64) -> Self {
        self.affine(1.0, c)
    }

    fn affine(self, scale: f64, shift: f64) -> Self {
        match self {
            TestFunction::Affine { inner, scale: s0, shift: t0 } => {
                TestFunction::Affine { inner, scale: s0 * scale, shift: t0 * scale + shift }
            }
            other => TestFunction::Affine { inner: Box::new(other), scale, shift },
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Constant(c) => *c,
            TestFunction::Power { lambda } => libm::pow(norm_of(x), -lambda),
            TestFunction::CharBall { k } => {
                if norm_of(x) < libm::ldexp(1.0, *k) {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::CharAnnulus { k1, k2 } => {
                let r = norm_of(x);
                if r >= libm::ldexp(1.0, *k1) && r < libm::ldexp(1.0, *k2) {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::LogNorm => libm::log(norm_of(x)),
            TestFunction::Bump { k_center, width } => {
                let r = norm_of(x);
                if r == 0.0 {
                    return 0.0;
                }
                let u = (libm::log2(r) - k_center) / width;
                if libm::fabs(u) < 1.0 {
                    let s = 1.0 - u * u;
                    s * s
                } else {
                    0.0
                }
            }
            TestFunction::Affine { inner, scale, shift } => scale * inner.eval(x) + shift,
            TestFunction::Custom(f) => f(x),
        }
    }

    /// Whether the function is unbounded at the origin; such kinds are never evaluated there
    /// because no node set contains the origin.
    pub fn singular_at_origin(&self) -> bool {
        match self {
            TestFunction::Power { lambda } => *lambda > 0.0,
            TestFunction::LogNorm => true,
            TestFunction::Affine { inner, scale, .. } => *scale != 0.0 && inner.singular_at_origin(),
            _ => false,
        }
    }

    /// Identically constant (including a zero scale), so every oscillation vanishes.
    pub fn is_constant(&self) -> bool {
        match self {
            TestFunction::Constant(_) => true,
            TestFunction::Affine { inner, scale, .. } => *scale == 0.0 || inner.is_constant(),
            _ => false,
        }
    }
}

fn check_exponent(name: &str, q: f64, min: f64) -> Result<()> {
    if !(q >= min) || !q.is_finite() {
        return Err(Error::param(alloc::format!("{name} must be a finite exponent >= {min}, got {q}")));
    }
    Ok(())
}

/// `‖f‖_{L^q(region; w)} = (∫ |f|^q w)^{1/q}`.
pub fn lq_norm<F>(f: F, q: f64, region: &Region, w: &Weight, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64,
{
    check_exponent("q", q, 1.0)?;
    let r = integrate_region(|x| libm::pow(libm::fabs(f(x)), q) * w.eval(x), region, spec, dims)?;
    Ok(root(r, q))
}

/// `I ↦ I^{1/q}` with first-order error propagation.
fn root(mut r: QuadResult, q: f64) -> QuadResult {
    let v = r.value.max(0.0);
    let value = libm::pow(v, 1.0 / q);
    let d = if v > 0.0 { value / (q * v) } else { 0.0 };
    r.err_est *= d;
    r.core_tail *= d;
    r.outer_tail = r.outer_tail.map(|t| t * d);
    r.value = value;
    r
}

#[derive(Debug, Clone)]
pub struct HerzParams {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub weight: Weight,
    pub k_min: i32,
    pub k_max: i32,
}

impl HerzParams {
    pub fn new(alpha: f64, p: f64, q: f64, weight: Weight, k_min: i32, k_max: i32) -> Result<Self> {
        check_exponent("p", p, 1.0)?;
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::param(alloc::format!("Herz inner exponent q must be in (1, ∞), got {q}")));
        }
        if k_min >= k_max {
            return Err(Error::param("Herz window needs k_min < k_max"));
        }
        Ok(HerzParams { alpha, p, q, weight, k_min, k_max })
    }
}

/// One annulus of the Herz sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HerzTerm {
    pub k: i32,
    /// `w(B_k)^{αp/Q}`
    pub factor: f64,
    /// `‖f‖_{L^q(E_k; w)}`
    pub lq: QuadResult,
}

impl HerzTerm {
    /// `w(B_k)^{αp/Q} ‖f‖^p_{L^q(E_k;w)}`
    pub fn contribution(&self, p: f64) -> f64 {
        self.factor * libm::pow(self.lq.value, p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HerzNorm {
    pub value: f64,
    pub err_est: f64,
    pub terms: Vec<HerzTerm>,
    /// Share of the `p`-th power sum carried by the `k_min` and `k_max` terms.
    pub lower_edge_fraction: f64,
    pub upper_edge_fraction: f64,
    /// Both edge shares are below 1%.
    pub converged: bool,
}

/// The single annulus term `k`.
pub fn herz_term<F>(f: F, hp: &HerzParams, k: i32, spec: &QuadSpec, dims: &GroupDims) -> Result<HerzTerm>
where
    F: Fn(&[f64]) -> f64,
{
    let wb = weight_of_ball(&hp.weight, libm::ldexp(1.0, k), spec, dims)?;
    let factor = libm::pow(wb, hp.alpha * hp.p / dims.q_f64());
    let lq = lq_norm(f, hp.q, &Region::annulus(k - 1, k), &hp.weight, spec, dims)?;
    Ok(HerzTerm { k, factor, lq })
}

/// Sums precomputed annulus terms (in window order).
pub fn combine_herz(terms: Vec<HerzTerm>, p: f64) -> HerzNorm {
    let contrib: Vec<f64> = terms.iter().map(|t| t.contribution(p)).collect();
    let total = crate::rules::pairwise_sum(&contrib);
    let value = libm::pow(total, 1.0 / p);
    // d(S^{1/p}) = S^{1/p-1}/p · dS, with dS_k = p·c_k·err_k/‖f‖_k
    let mut d_total = 0.0;
    for (t, c) in terms.iter().zip(&contrib) {
        if t.lq.value > 0.0 {
            d_total += p * c * t.lq.err_est / t.lq.value;
        }
    }
    let err_est = if total > 0.0 { value / (p * total) * d_total } else { 0.0 };
    let (lo, hi) = if total > 0.0 {
        (contrib[0] / total, contrib[contrib.len() - 1] / total)
    } else {
        (0.0, 0.0)
    };
    HerzNorm {
        value,
        err_est,
        terms,
        lower_edge_fraction: lo,
        upper_edge_fraction: hi,
        converged: lo <= 0.01 && hi <= 0.01,
    }
}

/// Herz norm over the window `hp.k_min..=hp.k_max`.
pub fn herz_norm<F>(f: F, hp: &HerzParams, spec: &QuadSpec, dims: &GroupDims) -> Result<HerzNorm>
where
    F: Fn(&[f64]) -> f64,
{
    let terms = (hp.k_min..=hp.k_max)
        .map(|k| herz_term(&f, hp, k, spec, dims))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_herz(terms, hp.p))
}

/// Unweighted average over `B(0, radius)`.
pub fn ball_average<F>(f: F, radius: f64, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64,
{
    let r = integrate_region(f, &Region::ball_radius(radius), spec, dims)?;
    let vol = dims.omega_q * libm::pow(radius, dims.q_f64());
    Ok(r.scaled(1.0 / vol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CbmoNorm {
    pub value: f64,
    pub argmax_radius: f64,
    /// `(R, oscillation at R)` for every grid radius.
    pub per_radius: Vec<(f64, f64)>,
    /// The max sits on the first or last grid radius, so the sup may lie outside the grid.
    pub edge_max: bool,
}

/// Weighted CBMO norm over radii `2^j`, `j ∈ [j_min, j_max]`.
pub fn cbmo_norm<F>(b: F, q: f64, w: &Weight, grid: (i32, i32), spec: &QuadSpec, dims: &GroupDims) -> Result<CbmoNorm>
where
    F: Fn(&[f64]) -> f64,
{
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::param(alloc::format!("CBMO exponent q must be in (1, ∞), got {q}")));
    }
    let (j_min, j_max) = grid;
    if j_min > j_max {
        return Err(Error::param("CBMO grid needs j_min <= j_max"));
    }
    let mut per_radius = Vec::new();
    for j in j_min..=j_max {
        let radius = libm::ldexp(1.0, j);
        let avg = ball_average(&b, radius, spec, dims)?.value;
        let osc = integrate_region(
            |x| libm::pow(libm::fabs(b(x) - avg), q) * w.eval(x),
            &Region::ball_radius(radius),
            spec,
            dims,
        )?;
        let wb = weight_of_ball(w, radius, spec, dims)?;
        per_radius.push((radius, libm::pow(osc.value.max(0.0) / wb, 1.0 / q)));
    }
    let (idx, (argmax_radius, value)) = per_radius
        .iter()
        .copied()
        .enumerate()
        .fold((0, (0.0, f64::NEG_INFINITY)), |acc, (i, rv)| if rv.1 > acc.1 .1 { (i, rv) } else { acc });
    let last = per_radius.len() - 1;
    let edge_max = per_radius.len() > 1 && (idx == 0 || idx == last) && value > 0.0 && {
        // ties across the grid (scale invariance) are not an edge effect
        let interior_max = per_radius[1..last.max(1)].iter().map(|p| p.1).fold(0.0f64, f64::max);
        value > interior_max * (1.0 + 1e-6)
    };
    Ok(CbmoNorm { value, argmax_radius, per_radius, edge_max })
}
