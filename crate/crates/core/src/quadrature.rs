//! Integration over `Hⁿ ≅ ℝ²ⁿ⁺¹` with Lebesgue (= Haar) measure.
//!
//! Origin-centered balls, annuli and truncated `Hⁿ` are integrated in homogeneous polar
//! coordinates `y = δ_r σ`, `|σ|_h = 1`, where `dy = r^{Q-1} dr dμ(σ)` and `μ(S) = w_Q`. The radial
//! range is cut at every dyadic radius `2^j`; each dyadic shell gets a Gauss–Legendre rule in
//! `log r`. Angular directions are drawn from `μ/w_Q` by rejection sampling the unit ball in its
//! bounding box `[-1,1]²ⁿ × [-1,1]` and projecting with `δ_{1/|u|}`. For each direction the whole
//! radial sum is one sample, so the reported error is the standard error over directions and a
//! radial integrand carries no Monte-Carlo noise at all.
//!
//! Balls `B(c, R)` with `c ≠ 0` are left translates `c·B(0, R)`; the Jacobian of left translation
//! is one, so they are integrated as `∫_{B(0,R)} g(c·u) du` on the same node set.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{dilate_in_place, mul_into, norm4_of, norm_of, Annulus, Coords, GroupDims, HPoint};
use crate::rules::{adaptive_gk, pairwise_sum, GaussLegendre};

/// Maps a point of the bounding box to the point to integrate at, or `None` outside the region.
type Mask<'a> = dyn Fn(&[f64]) -> Option<Coords> + 'a;

/// Dyadic shells kept below the outer radius when a ball or `Hⁿ` has no explicit `core_k`.
pub const DEFAULT_CORE_DEPTH: i32 = 40;

/// Ratio of consecutive innermost shell contributions at which the excluded core is treated
/// as non-integrable.
const DIVERGENCE_RATIO: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    TensorGrid,
    StratifiedMonteCarlo,
    /// Adaptive 1-D quadrature along the ray through `e₁`; exact only for radial integrands.
    Radial1d,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadSpec {
    pub method: Method,
    /// Maximum number of integrand evaluations.
    pub budget: u64,
    pub seed: u64,
    /// Whole-space integrals are restricted to `|y|_h < 2^{tail_k}`.
    pub tail_k: Option<i32>,
    /// Excluded core `|y|_h < 2^{core_k}` for balls and whole-space integrals.
    pub core_k: Option<i32>,
    /// Gauss–Legendre nodes per dyadic shell.
    pub radial_nodes: usize,
    /// Relative tolerance used only to flag results.
    pub rel_tol: Option<f64>,
}

impl QuadSpec {
    pub fn new(method: Method, budget: u64, seed: u64) -> Self {
        QuadSpec { method, budget, seed, tail_k: None, core_k: None, radial_nodes: 8, rel_tol: None }
    }

    pub fn stratified(budget: u64, seed: u64) -> Self {
        Self::new(Method::StratifiedMonteCarlo, budget, seed)
    }

    pub fn with_tail(mut self, tail_k: i32) -> Self {
        self.tail_k = Some(tail_k);
        self
    }

    pub fn with_core(mut self, core_k: i32) -> Self {
        self.core_k = Some(core_k);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = Some(tol);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// Axis-aligned box `Π [lo_i, hi_i]` in coordinates.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `B(center, radius)`; `None` is the origin.
    Ball { center: Option<HPoint>, radius: f64 },
    /// Origin-centered `{inner ≤ |y|_h < outer}`.
    Shell { inner: f64, outer: f64 },
    /// `{|y|_h ≥ inner}`, truncated at `2^tail_k` with the remainder extrapolated.
    Exterior { inner: f64 },
    /// `Hⁿ`, truncated by `tail_k` (and `core_k` if set).
    WholeSpace,
}

impl Region {
    /// `B_k`.
    pub fn ball(k: i32) -> Self {
        Region::Ball { center: None, radius: libm::ldexp(1.0, k) }
    }

    pub fn ball_at(center: HPoint, radius: f64) -> Self {
        Region::Ball { center: Some(center), radius }
    }

    pub fn ball_radius(radius: f64) -> Self {
        Region::Ball { center: None, radius }
    }

    /// `{2^{k1} ≤ |y|_h < 2^{k2}}`.
    pub fn annulus(k1: i32, k2: i32) -> Self {
        Region::Shell { inner: libm::ldexp(1.0, k1), outer: libm::ldexp(1.0, k2) }
    }

    pub fn shell(inner: f64, outer: f64) -> Self {
        Region::Shell { inner, outer }
    }

    pub fn unit_cube(n: usize) -> Self {
        Region::Box { lo: alloc::vec![0.0; 2 * n + 1], hi: alloc::vec![1.0; 2 * n + 1] }
    }
}

impl From<Annulus> for Region {
    fn from(a: Annulus) -> Self {
        match a.k_inner {
            None => Region::ball(a.k_outer),
            Some(k) => Region::annulus(k, a.k_outer),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Heuristic absolute error: sampling error plus any estimated truncation.
    pub err_est: f64,
    pub n_evals: u64,
    /// Estimated mass of the excluded core around the origin (`∞` when it looks non-integrable).
    pub core_tail: f64,
    /// Estimated mass beyond the outer truncation radius, when one can be given.
    pub outer_tail: Option<f64>,
    /// The innermost shells did not decay: the integral is not absolutely convergent at 0.
    pub divergent: bool,
    /// `err_est` exceeds the requested relative tolerance.
    pub flagged: bool,
}

impl QuadResult {
    pub fn exact(value: f64) -> Self {
        QuadResult {
            value,
            err_est: 0.0,
            n_evals: 0,
            core_tail: 0.0,
            outer_tail: None,
            divergent: false,
            flagged: false,
        }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.value *= c;
        self.err_est *= libm::fabs(c);
        self.core_tail *= libm::fabs(c);
        self.outer_tail = self.outer_tail.map(|t| t * libm::fabs(c));
        self
    }

    fn flag(mut self, spec: &QuadSpec) -> Self {
        if let Some(tol) = spec.rel_tol {
            self.flagged = self.err_est > tol * libm::fabs(self.value) || self.divergent;
        } else {
            self.flagged = self.divergent;
        }
        self
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.err_est == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.err_est / libm::fabs(self.value)
        }
    }
}

/// `∫_region g(y) dy`.
pub fn integrate_region<F>(g: F, region: &Region, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64,
{
    let [r] = integrate_region_multi(|y| [g(y)], region, spec, dims)?;
    Ok(r)
}

/// Integrates `K` components on one shared node set.
pub fn integrate_region_multi<const K: usize, F>(
    g: F,
    region: &Region,
    spec: &QuadSpec,
    dims: &GroupDims,
) -> Result<[QuadResult; K]>
where
    F: Fn(&[f64]) -> [f64; K],
{
    if spec.budget == 0 {
        return Err(Error::BudgetTooSmall { budget: 0, needed: 1 });
    }
    let out = match (region, spec.method) {
        (Region::Box { lo, hi }, Method::TensorGrid) => {
            check_box(lo, hi, dims)?;
            box_tensor(&g, lo, hi, None, spec)?
        }
        (Region::Box { lo, hi }, Method::StratifiedMonteCarlo) => {
            check_box(lo, hi, dims)?;
            box_stratified(&g, lo, hi, spec)?
        }
        (Region::Box { .. }, Method::Radial1d) => {
            return Err(Error::param("radial_1d cannot integrate over a box"));
        }
        _ => {
            let plan = ShellPlan::from_region(region, spec, dims)?;
            match spec.method {
                Method::StratifiedMonteCarlo => plan.polar(&g, spec, dims)?,
                Method::Radial1d => plan.radial(&g, spec, dims)?,
                Method::TensorGrid => plan.tensor(&g, spec, dims)?,
            }
        }
    };
    Ok(out.map(|r| r.flag(spec)))
}

/// `w_Q ∫_{r_lo}^{r_hi} g(r) r^{Q-1} dr`, the polar reduction of a radial integrand.
pub fn integrate_radial<F>(g: F, r_lo: f64, r_hi: f64, dims: &GroupDims) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !(r_lo >= 0.0) || !(r_hi >= r_lo) || !r_hi.is_finite() {
        return Err(Error::param(format!("invalid radial range [{r_lo}, {r_hi}]")));
    }
    let qm1 = dims.q_f64() - 1.0;
    let a = adaptive_gk(|r| g(r) * libm::pow(r, qm1), r_lo, r_hi, 1e-14, 1e-12, 4000)?;
    Ok(QuadResult {
        value: dims.w_q * a.value,
        err_est: dims.w_q * a.err_est,
        n_evals: a.n_evals,
        core_tail: 0.0,
        outer_tail: None,
        divergent: false,
        flagged: false,
    })
}

fn check_box(lo: &[f64], hi: &[f64], dims: &GroupDims) -> Result<()> {
    if lo.len() != dims.coord_len() || hi.len() != dims.coord_len() {
        return Err(Error::DimensionMismatch { expected: dims.n, found: (lo.len().max(1) - 1) / 2 });
    }
    if lo.iter().zip(hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::param("box requires finite lo < hi in every coordinate"));
    }
    Ok(())
}

fn check_value(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteIntegrand { value: v })
    }
}

fn ipow(x: u64, d: u32) -> u64 {
    x.saturating_pow(d)
}

/// Midpoint tensor grid on `[lo, hi]`; `mask` restricts to a sub-region. The error estimate is
/// the Richardson difference against the grid with half as many points per axis.
fn box_tensor<const K: usize, F>(
    g: &F,
    lo: &[f64],
    hi: &[f64],
    mask: Option<&Mask<'_>>,
    spec: &QuadSpec,
) -> Result<[QuadResult; K]>
where
    F: Fn(&[f64]) -> [f64; K],
{
    let d = lo.len() as u32;
    let mut m = 2u64;
    while ipow(m + 2, d) + ipow((m + 2) / 2, d) <= spec.budget {
        m += 2;
    }
    let needed = ipow(2, d) + 1;
    if ipow(m, d) + ipow(m / 2, d) > spec.budget {
        return Err(Error::BudgetTooSmall { budget: spec.budget, needed });
    }
    let fine = grid_sum(g, lo, hi, m, mask)?;
    let coarse = grid_sum(g, lo, hi, m / 2, mask)?;
    let n_evals = ipow(m, d) + ipow(m / 2, d);
    Ok(core::array::from_fn(|k| QuadResult {
        value: fine[k],
        err_est: libm::fabs(fine[k] - coarse[k]) / 3.0,
        n_evals,
        core_tail: 0.0,
        outer_tail: None,
        divergent: false,
        flagged: false,
    }))
}

fn grid_sum<const K: usize, F>(
    g: &F,
    lo: &[f64],
    hi: &[f64],
    m: u64,
    mask: Option<&Mask<'_>>,
) -> Result<[f64; K]>
where
    F: Fn(&[f64]) -> [f64; K],
{
    let d = lo.len();
    let cell: f64 = lo.iter().zip(hi).map(|(a, b)| (b - a) / m as f64).product();
    let total = ipow(m, d as u32);
    let mut parts: [Vec<f64>; K] = core::array::from_fn(|_| Vec::with_capacity(total as usize));
    let mut idx = alloc::vec![0u64; d];
    let mut x: Coords = smallvec::smallvec![0.0; d];
    for _ in 0..total {
        for i in 0..d {
            x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] as f64 + 0.5) / m as f64;
        }
        let point = match mask {
            Some(f) => f(&x),
            None => Some(x.clone()),
        };
        if let Some(p) = point {
            if p.iter().any(|&c| c != 0.0) {
                let v = g(&p);
                for k in 0..K {
                    check_value(v[k])?;
                    parts[k].push(v[k]);
                }
            }
        }
        for i in 0..d {
            idx[i] += 1;
            if idx[i] < m {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(core::array::from_fn(|k| cell * pairwise_sum(&parts[k])))
}

/// Jittered sampling: the box is cut into `s^d` equal strata with two samples each.
fn box_stratified<const K: usize, F>(g: &F, lo: &[f64], hi: &[f64], spec: &QuadSpec) -> Result<[QuadResult; K]>
where
    F: Fn(&[f64]) -> [f64; K],
{
    let d = lo.len() as u32;
    let mut s = 1u64;
    while 2 * ipow(s + 1, d) <= spec.budget {
        s += 1;
    }
    if 2 * ipow(s, d) > spec.budget {
        return Err(Error::BudgetTooSmall { budget: spec.budget, needed: 2 });
    }
    let strata = ipow(s, d);
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let cell = vol / strata as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut est: [Vec<f64>; K] = core::array::from_fn(|_| Vec::with_capacity(strata as usize));
    let mut var: [Vec<f64>; K] = core::array::from_fn(|_| Vec::with_capacity(strata as usize));
    let mut idx = alloc::vec![0u64; d as usize];
    let mut x: Coords = smallvec::smallvec![0.0; d as usize];
    for _ in 0..strata {
        let mut pair = [[0.0; K]; 2];
        for v in pair.iter_mut() {
            for i in 0..d as usize {
                let u: f64 = rng.gen();
                x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] as f64 + u) / s as f64;
            }
            *v = if x.iter().all(|&c| c == 0.0) { [0.0; K] } else { g(&x) };
            for k in 0..K {
                check_value(v[k])?;
            }
        }
        for k in 0..K {
            let (a, b) = (pair[0][k], pair[1][k]);
            est[k].push(cell * 0.5 * (a + b));
            // unbiased per-stratum variance from two draws, divided by the two draws
            var[k].push(cell * cell * (a - b) * (a - b) / 4.0);
        }
        for i in 0..d as usize {
            idx[i] += 1;
            if idx[i] < s {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(core::array::from_fn(|k| QuadResult {
        value: pairwise_sum(&est[k]),
        err_est: libm::sqrt(pairwise_sum(&var[k])),
        n_evals: 2 * strata,
        core_tail: 0.0,
        outer_tail: None,
        divergent: false,
        flagged: false,
    }))
}

/// Radial breakpoints and translation for an origin-centered shell or a translated ball.
struct ShellPlan {
    center: Option<HPoint>,
    breaks: Vec<f64>,
    /// The inner radius is an artificial cutoff rather than part of the region.
    has_core: bool,
    /// The outer radius is a truncation of `Hⁿ`.
    has_tail: bool,
}

impl ShellPlan {
    fn from_region(region: &Region, spec: &QuadSpec, dims: &GroupDims) -> Result<Self> {
        let (center, inner, outer, has_core, has_tail) = match region {
            Region::Ball { center, radius } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::param(format!("ball radius must be positive, got {radius}")));
                }
                if let Some(c) = center {
                    if c.n() != dims.n {
                        return Err(Error::DimensionMismatch { expected: dims.n, found: c.n() });
                    }
                }
                let center = center.clone().filter(|c| !c.is_identity());
                let inner = core_radius(spec, *radius);
                (center, inner, *radius, true, false)
            }
            Region::Shell { inner, outer } => {
                if !(*inner >= 0.0) || !(outer > inner) || !outer.is_finite() {
                    return Err(Error::param(format!("invalid shell [{inner}, {outer})")));
                }
                if *inner == 0.0 {
                    (None, core_radius(spec, *outer), *outer, true, false)
                } else {
                    (None, *inner, *outer, false, false)
                }
            }
            Region::Exterior { inner } => {
                if !(*inner > 0.0) || !inner.is_finite() {
                    return Err(Error::param(format!("exterior region needs a positive inner radius, got {inner}")));
                }
                let tail = spec.tail_k.ok_or(Error::MissingTail)?;
                (None, *inner, libm::ldexp(1.0, tail), false, true)
            }
            Region::WholeSpace => {
                let tail = spec.tail_k.ok_or(Error::MissingTail)?;
                let outer = libm::ldexp(1.0, tail);
                (None, core_radius(spec, outer), outer, true, true)
            }
            Region::Box { .. } => unreachable!("boxes are handled separately"),
        };
        if !(inner < outer) {
            return Err(Error::param(format!("core radius {inner} is not inside outer radius {outer}")));
        }
        let mut breaks = alloc::vec![inner];
        let mut j = libm::floor(libm::log2(inner)) as i32 + 1;
        loop {
            let r = libm::ldexp(1.0, j);
            if r >= outer {
                break;
            }
            if r > inner {
                breaks.push(r);
            }
            j += 1;
        }
        breaks.push(outer);
        Ok(ShellPlan { center, breaks, has_core, has_tail })
    }

    fn shells(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Radial nodes `(r, weight)` with the polar Jacobian `w_Q r^{Q-1} dr` folded in, grouped by shell.
    fn radial_nodes(&self, m: usize, dims: &GroupDims) -> Vec<Vec<(f64, f64)>> {
        let gl = GaussLegendre::new(m);
        let q = dims.q_f64();
        self.breaks
            .windows(2)
            .map(|w| {
                let (la, lb) = (libm::log(w[0]), libm::log(w[1]));
                gl.mapped(la, lb)
                    .map(|(s, wt)| {
                        let r = libm::exp(s);
                        // dr = r ds
                        (r, dims.w_q * wt * libm::pow(r, q))
                    })
                    .collect()
            })
            .collect()
    }

    fn polar<const K: usize, F>(&self, g: &F, spec: &QuadSpec, dims: &GroupDims) -> Result<[QuadResult; K]>
    where
        F: Fn(&[f64]) -> [f64; K],
    {
        let shells = self.shells() as u64;
        let mut m = spec.radial_nodes.max(1) as u64;
        while m > 1 && 2 * shells * m > spec.budget {
            m -= 1;
        }
        let per_dir = shells * m;
        let dirs = spec.budget / per_dir;
        if dirs < 2 {
            return Err(Error::BudgetTooSmall { budget: spec.budget, needed: 2 * per_dir });
        }
        let nodes = self.radial_nodes(m as usize, dims);
        let len = dims.coord_len();
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

        let mut samples: [Vec<f64>; K] = core::array::from_fn(|_| Vec::with_capacity(dirs as usize));
        // per-shell totals summed over directions, for the core/tail extrapolation
        let mut shell_tot = alloc::vec![[0.0f64; K]; nodes.len()];
        let mut sigma: Coords = smallvec::smallvec![0.0; len];
        let mut y: Coords = smallvec::smallvec![0.0; len];
        let mut moved: Coords = smallvec::smallvec![0.0; len];
        let mut shell_acc = alloc::vec![[0.0f64; K]; nodes.len()];

        for _ in 0..dirs {
            sample_direction(&mut rng, &mut sigma);
            for (si, shell) in nodes.iter().enumerate() {
                let mut acc = [0.0; K];
                for &(r, w) in shell {
                    y.copy_from_slice(&sigma);
                    dilate_in_place(r, &mut y);
                    let v = match &self.center {
                        Some(c) => {
                            mul_into(c.coords(), &y, &mut moved);
                            g(&moved)
                        }
                        None => g(&y),
                    };
                    for k in 0..K {
                        check_value(v[k])?;
                        acc[k] += w * v[k];
                    }
                }
                shell_acc[si] = acc;
            }
            for k in 0..K {
                let mut h = 0.0;
                for (si, acc) in shell_acc.iter().enumerate() {
                    h += acc[k];
                    shell_tot[si][k] += acc[k];
                }
                samples[k].push(h);
            }
        }

        let n_evals = dirs * per_dir;
        Ok(core::array::from_fn(|k| {
            let s = &samples[k];
            let mean = pairwise_sum(s) / dirs as f64;
            let dev: Vec<f64> = s.iter().map(|h| (h - mean) * (h - mean)).collect();
            let var = pairwise_sum(&dev) / (dirs as f64 - 1.0);
            let stat = libm::sqrt(var / dirs as f64);
            let totals: Vec<f64> = shell_tot.iter().map(|t| t[k] / dirs as f64).collect();
            let (core_tail, divergent) = if self.has_core { extrapolate(&totals) } else { (0.0, false) };
            let outer_tail = if self.has_tail {
                let rev: Vec<f64> = totals.iter().rev().copied().collect();
                match extrapolate(&rev) {
                    (t, false) => Some(t),
                    _ => None,
                }
            } else {
                None
            };
            let mut err = stat;
            if core_tail.is_finite() {
                err += core_tail;
            }
            if let Some(t) = outer_tail {
                err += t;
            }
            QuadResult { value: mean, err_est: err, n_evals, core_tail, outer_tail, divergent, flagged: false }
        }))
    }

    fn radial<const K: usize, F>(&self, g: &F, spec: &QuadSpec, dims: &GroupDims) -> Result<[QuadResult; K]>
    where
        F: Fn(&[f64]) -> [f64; K],
    {
        let len = dims.coord_len();
        let lo = if self.has_core { 0.0 } else { self.breaks[0] };
        let hi = *self.breaks.last().unwrap();
        let max_panels = ((spec.budget / 15) as usize).max(1);
        let mut out = [QuadResult::exact(0.0); K];
        for k in 0..K {
            let profile = |r: f64| {
                let mut y: Coords = smallvec::smallvec![0.0; len];
                y[0] = r;
                match &self.center {
                    Some(c) => {
                        let mut moved: Coords = smallvec::smallvec![0.0; len];
                        mul_into(c.coords(), &y, &mut moved);
                        g(&moved)[k]
                    }
                    None => g(&y)[k],
                }
            };
            let q = dims.q_f64();
            let a = adaptive_gk(|r| profile(r) * libm::pow(r, q - 1.0), lo, hi, 1e-14, 1e-11, max_panels)?;
            out[k] = QuadResult {
                value: dims.w_q * a.value,
                err_est: dims.w_q * a.err_est,
                n_evals: a.n_evals,
                core_tail: 0.0,
                outer_tail: None,
                divergent: false,
                flagged: false,
            };
        }
        Ok(out)
    }

    /// Tensor grid over the bounding box `[-R, R]²ⁿ × [-R², R²]` with a membership mask.
    fn tensor<const K: usize, F>(&self, g: &F, spec: &QuadSpec, dims: &GroupDims) -> Result<[QuadResult; K]>
    where
        F: Fn(&[f64]) -> [f64; K],
    {
        let len = dims.coord_len();
        let outer = *self.breaks.last().unwrap();
        let inner = if self.has_core { 0.0 } else { self.breaks[0] };
        let mut lo = alloc::vec![-outer; len];
        let mut hi = alloc::vec![outer; len];
        lo[len - 1] = -outer * outer;
        hi[len - 1] = outer * outer;
        let (o4, i4) = (outer * outer * outer * outer, inner * inner * inner * inner);
        let center = self.center.clone();
        let mask = move |u: &[f64]| -> Option<Coords> {
            let r4 = norm4_of(u);
            if r4 >= o4 || r4 < i4 {
                return None;
            }
            match &center {
                Some(c) => {
                    let mut moved: Coords = smallvec::smallvec![0.0; u.len()];
                    mul_into(c.coords(), u, &mut moved);
                    Some(moved)
                }
                None => Some(Coords::from_slice(u)),
            }
        };
        box_tensor(g, &lo, &hi, Some(&mask), spec)
    }
}

fn core_radius(spec: &QuadSpec, outer: f64) -> f64 {
    match spec.core_k {
        Some(k) => libm::ldexp(1.0, k),
        None => {
            let top = libm::ceil(libm::log2(outer)) as i32;
            libm::ldexp(1.0, top - DEFAULT_CORE_DEPTH)
        }
    }
}

/// Geometric extrapolation from the first two entries of `totals` (innermost shells first):
/// with ratio `ρ = |s₀/s₁|`, the excluded remainder is about `|s₀| ρ/(1-ρ)`.
fn extrapolate(totals: &[f64]) -> (f64, bool) {
    if totals.len() < 2 {
        return (0.0, false);
    }
    let (s0, s1) = (libm::fabs(totals[0]), libm::fabs(totals[1]));
    if s0 == 0.0 {
        return (0.0, false);
    }
    if s1 == 0.0 {
        return (f64::INFINITY, true);
    }
    let rho = s0 / s1;
    if rho >= DIVERGENCE_RATIO {
        (f64::INFINITY, true)
    } else {
        (s0 * rho / (1.0 - rho), false)
    }
}

/// Draws `σ` on the unit sphere `|σ|_h = 1` with law `μ/w_Q`.
pub fn sample_direction<R: Rng>(rng: &mut R, sigma: &mut [f64]) {
    loop {
        for c in sigma.iter_mut() {
            *c = 2.0 * rng.gen::<f64>() - 1.0;
        }
        let r4 = norm4_of(sigma);
        if r4 < 1.0 && r4 > 0.0 {
            let r = norm_of(sigma);
            dilate_in_place(1.0 / r, sigma);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn dims1() -> GroupDims {
        GroupDims::new(1).unwrap()
    }

    #[test]
    fn unit_cube_is_exact_on_tensor_grid() {
        let spec = QuadSpec::new(Method::TensorGrid, 20_000, 0);
        let r = integrate_region(|_| 1.0, &Region::unit_cube(1), &spec, &dims1()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.n_evals <= 20_000);
        assert!(r.err_est < 1e-12);
    }

    #[test]
    fn unit_ball_volume_polar() {
        let spec = QuadSpec::stratified(1_000_000, 7);
        let r = integrate_region(|_| 1.0, &Region::ball(0), &spec, &dims1()).unwrap();
        assert!((r.value / (PI * PI / 2.0) - 1.0).abs() < 5e-3);
        assert!(r.n_evals <= 1_000_000);
        assert!(!r.divergent);
    }

    #[test]
    fn inverse_square_on_annulus() {
        // w_Q ∫₁² r^{-2} r³ dr = 2π²·3/2 = 3π²
        let spec = QuadSpec::stratified(100_000, 1);
        let r = integrate_region(|y| norm_of(y).powi(-2), &Region::annulus(0, 1), &spec, &dims1()).unwrap();
        assert!((r.value / (3.0 * PI * PI) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn radial_examples() {
        let d = dims1();
        let r = integrate_radial(|_| 1.0, 0.0, 1.0, &d).unwrap();
        assert!((r.value - PI * PI / 2.0).abs() < 1e-10);
        let r = integrate_radial(|r| r.powi(-2), 1.0, 2.0, &d).unwrap();
        assert!((r.value - 3.0 * PI * PI).abs() < 1e-9);
        // w_Q ∫₁² r log r dr = 2π²(2 log 2 − 3/4)
        let r = integrate_radial(|r| r.powi(-2) * r.ln(), 1.0, 2.0, &d).unwrap();
        assert!((r.value - 2.0 * PI * PI * (2.0 * 2f64.ln() - 0.75)).abs() < 1e-9);
        assert!((r.value / 12.5614 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn radial_divergence_is_an_error() {
        let r = integrate_radial(|r| r.powi(-4), 0.0, 1.0, &dims1());
        assert!(matches!(r, Err(Error::Divergent(_))));
    }

    #[test]
    fn deterministic_for_fixed_spec() {
        let spec = QuadSpec::stratified(20_000, 99);
        let g = |y: &[f64]| (y[0] + 0.3 * y[2]).cos();
        let a = integrate_region(g, &Region::ball(1), &spec, &dims1()).unwrap();
        let b = integrate_region(g, &Region::ball(1), &spec, &dims1()).unwrap();
        assert_eq!(a, b);
        let c = integrate_region(g, &Region::ball(1), &spec.clone().with_seed(100), &dims1()).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn divergent_core_is_flagged() {
        let spec = QuadSpec::stratified(50_000, 3);
        let r = integrate_region(|y| norm_of(y).powi(-4), &Region::ball(0), &spec, &dims1()).unwrap();
        assert!(r.divergent);
        assert!(r.flagged);
        let ok = integrate_region(|y| norm_of(y).powi(-3), &Region::ball(0), &spec, &dims1()).unwrap();
        assert!(!ok.divergent);
        // avg over the unit ball of |x|^{-3} is Q/(Q-3) = 4
        assert!((ok.value / (PI * PI / 2.0) - 4.0).abs() < 1e-8);
    }

    #[test]
    fn whole_space_needs_tail() {
        let spec = QuadSpec::stratified(10_000, 0);
        assert_eq!(integrate_region(|_| 1.0, &Region::WholeSpace, &spec, &dims1()), Err(Error::MissingTail));
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let spec = QuadSpec::stratified(10_000, 0);
        let r = integrate_region(|_| f64::NAN, &Region::ball(0), &spec, &dims1());
        assert!(matches!(r, Err(Error::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn small_budget_is_rejected() {
        let spec = QuadSpec::stratified(10, 0);
        assert!(matches!(
            integrate_region(|_| 1.0, &Region::ball(0), &spec, &dims1()),
            Err(Error::BudgetTooSmall { .. })
        ));
    }

    #[test]
    fn translated_ball_has_same_volume() {
        let spec = QuadSpec::stratified(200_000, 5);
        let c = HPoint::new(&[1.0, -0.5, 2.0]).unwrap();
        let r = integrate_region(|_| 1.0, &Region::ball_at(c, 2.0), &spec, &dims1()).unwrap();
        assert!((r.value / (PI * PI / 2.0 * 16.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tensor_grid_on_ball_is_rough_but_close() {
        let spec = QuadSpec::new(Method::TensorGrid, 300_000, 0);
        let r = integrate_region(|_| 1.0, &Region::ball(0), &spec, &dims1()).unwrap();
        assert!((r.value / (PI * PI / 2.0) - 1.0).abs() < 2e-2);
    }

    #[test]
    fn radial_method_on_ball() {
        let spec = QuadSpec::new(Method::Radial1d, 100_000, 0);
        let r = integrate_region(|y| norm_of(y).powi(2), &Region::ball(0), &spec, &dims1()).unwrap();
        // w_Q/(Q+2) = 2π²/6
        assert!((r.value - PI * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn stratified_box() {
        let spec = QuadSpec::stratified(50_000, 11);
        let region = Region::Box { lo: alloc::vec![0.0, 0.0, 0.0], hi: alloc::vec![1.0, 2.0, 1.0] };
        let r = integrate_region(|y| y[0] * y[1], &region, &spec, &dims1()).unwrap();
        assert!((r.value - 1.0).abs() < 5.0 * r.err_est.max(1e-6));
        assert!(r.err_est < 1e-2);
    }
}
