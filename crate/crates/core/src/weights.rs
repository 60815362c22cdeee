//! Weights on `Hⁿ`, Muckenhoupt `A_p` / reverse Hölder estimators and power-weight closed forms.
//!
//! All estimators work on a finite family of balls. A large ratio on some ball certifies that a
//! weight is not in the class; bounded ratios on a family only suggest membership.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::Cell;
use core::fmt;

use crate::error::{Error, Result};
use crate::group::{mul_into, norm_of, Coords, GroupDims, HPoint};
use crate::quadrature::{integrate_region, integrate_region_multi, QuadResult, QuadSpec, Region};

pub type CustomWeight = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Weight {
    Unit,
    /// `v(x) = |x|_h^β`, locally integrable for `β > −Q`.
    Power { beta: f64 },
    Custom(CustomWeight),
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Unit => f.write_str("Unit"),
            Weight::Power { beta } => f.debug_struct("Power").field("beta", beta).finish(),
            Weight::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Weight {
    pub fn power(beta: f64, dims: &GroupDims) -> Result<Self> {
        if !(beta > -dims.q_f64()) || !beta.is_finite() {
            return Err(Error::param(alloc::format!("power weight needs beta > -Q = {}, got {beta}", -dims.q_f64())));
        }
        Ok(Weight::Power { beta })
    }

    pub fn custom(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Weight::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::Power { beta } => {
                if *beta == 0.0 {
                    1.0
                } else {
                    libm::pow(norm_of(x), *beta)
                }
            }
            Weight::Custom(f) => f(x),
        }
    }

    /// Exponent for weights of power type (`Unit` is `β = 0`).
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            Weight::Unit => Some(0.0),
            Weight::Power { beta } => Some(*beta),
            Weight::Custom(_) => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.power_exponent(), Some(b) if b == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightIndices {
    /// `inf{q > 1 : w ∈ A_q}`, with 1 meaning `w ∈ A_1`.
    pub q_w: f64,
    /// `sup{r > 1 : w ∈ RH_r}`, possibly `∞`.
    pub r_w: f64,
}

/// Critical indices of `|x|_h^β`.
///
/// `q_w = (Q+β)/Q` for `β > 0` and 1 otherwise. For `β < 0`, `w^r` stops being integrable at the
/// origin when `rβ ≤ −Q`, which puts `r_w` at `Q/|β|`; `β ≥ 0` gives `r_w = ∞`.
pub fn power_weight_indices(beta: f64, dims: &GroupDims) -> Result<WeightIndices> {
    let q = dims.q_f64();
    if !(beta > -q) {
        return Err(Error::param(alloc::format!("power weight needs beta > -Q, got {beta}")));
    }
    let q_w = if beta <= 0.0 { 1.0 } else { (q + beta) / q };
    let r_w = if beta >= 0.0 { f64::INFINITY } else { q / -beta };
    Ok(WeightIndices { q_w, r_w })
}

/// `w(E) = ∫_E w`.
pub fn weighted_measure(w: &Weight, region: &Region, spec: &QuadSpec, dims: &GroupDims) -> Result<QuadResult> {
    integrate_region(|x| w.eval(x), region, spec, dims)
}

/// `v(B_k) = ∫_{|x|_h < 2^k} |x|_h^β dx = w_Q 2^{k(Q+β)}/(Q+β)`.
pub fn power_ball_measure(beta: f64, k: i32, dims: &GroupDims) -> Result<f64> {
    let q = dims.q_f64();
    if !(beta > -q) {
        return Err(Error::param(alloc::format!("power ball measure needs beta > -Q, got {beta}")));
    }
    Ok(dims.w_q * libm::exp2(k as f64 * (q + beta)) / (q + beta))
}

/// `w(B(0, R))`, closed form for power-type weights and quadrature otherwise.
pub fn weight_of_ball(w: &Weight, radius: f64, spec: &QuadSpec, dims: &GroupDims) -> Result<f64> {
    match w.power_exponent() {
        Some(beta) => {
            let q = dims.q_f64();
            Ok(dims.w_q * libm::pow(radius, q + beta) / (q + beta))
        }
        None => Ok(weighted_measure(w, &Region::ball_radius(radius), spec, dims)?.value),
    }
}

/// A ball `B(center, radius)` for the ratio estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Option<HPoint>,
    pub radius: f64,
}

impl Ball {
    pub fn origin(radius: f64) -> Self {
        Ball { center: None, radius }
    }

    pub fn at(center: HPoint, radius: f64) -> Self {
        Ball { center: Some(center), radius }
    }

    pub fn region(&self) -> Region {
        Region::Ball { center: self.center.clone(), radius: self.radius }
    }

    pub fn measure(&self, dims: &GroupDims) -> f64 {
        dims.omega_q * libm::pow(self.radius, dims.q_f64())
    }
}

/// A ratio estimate; `value = ∞` when the weight vanishes or an average diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub value: f64,
    /// Propagated relative quadrature error.
    pub rel_err: f64,
    pub divergent: bool,
}

impl RatioEstimate {
    fn infinite(divergent: bool) -> Self {
        RatioEstimate { value: f64::INFINITY, rel_err: 0.0, divergent }
    }
}

/// `A_p` ratio on one ball: `avg(w)·avg(w^{-1/(p-1)})^{p-1}` for `p > 1`, `avg(w)/essinf(w)` for
/// `p = 1`.
pub fn ap_ratio(w: &Weight, p: f64, ball: &Ball, spec: &QuadSpec, dims: &GroupDims) -> Result<RatioEstimate> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param(alloc::format!("A_p needs finite p >= 1, got {p}")));
    }
    let vol = ball.measure(dims);
    let region = ball.region();
    if p == 1.0 {
        // node attaining the minimum; the location is kept only when it fits inline
        let best = Cell::new((f64::INFINITY, [0.0f64; 7], 0usize));
        let n_len = dims.coord_len();
        let avg = integrate_region(
            |y| {
                let v = w.eval(y);
                if v < best.get().0 {
                    let mut buf = [0.0; 7];
                    let len = if n_len <= 7 { n_len } else { 0 };
                    buf[..len].copy_from_slice(&y[..len]);
                    best.set((v, buf, len));
                }
                v
            },
            &region,
            spec,
            dims,
        )?;
        if avg.divergent {
            return Ok(RatioEstimate::infinite(true));
        }
        let (min_v, at, len) = best.get();
        let inf = if len == 0 { min_v } else { refine_min(w, ball, &at[..len], min_v) };
        if inf <= 0.0 {
            return Ok(RatioEstimate::infinite(false));
        }
        return Ok(RatioEstimate { value: avg.value / vol / inf, rel_err: avg.relative_error(), divergent: false });
    }
    let s = 1.0 / (p - 1.0);
    let vanished = Cell::new(false);
    let [a, b] = integrate_region_multi(
        |y| {
            let v = w.eval(y);
            if v <= 0.0 {
                vanished.set(true);
                [v, 0.0]
            } else {
                [v, libm::pow(v, -s)]
            }
        },
        &region,
        spec,
        dims,
    )?;
    if vanished.get() {
        return Ok(RatioEstimate::infinite(false));
    }
    if a.divergent || b.divergent {
        return Ok(RatioEstimate::infinite(true));
    }
    let value = (a.value / vol) * libm::pow(b.value / vol, p - 1.0);
    Ok(RatioEstimate { value, rel_err: a.relative_error() + (p - 1.0) * b.relative_error(), divergent: false })
}

/// Compass search for a smaller weight value near `start`, staying inside the ball.
fn refine_min(w: &Weight, ball: &Ball, start: &[f64], start_val: f64) -> f64 {
    let len = start.len();
    let r = ball.radius;
    let r4 = r * r * r * r;
    // work in ball coordinates u with y = c·u
    let mut u: Coords = Coords::from_slice(start);
    if let Some(c) = &ball.center {
        let ci: Coords = c.coords().iter().map(|x| -x).collect();
        mul_into(&ci, start, &mut u);
    }
    let to_y = |u: &[f64], out: &mut Coords| match &ball.center {
        Some(c) => mul_into(c.coords(), u, out),
        None => out.copy_from_slice(u),
    };
    let mut y: Coords = smallvec::smallvec![0.0; len];
    let mut best = start_val;
    let mut step = r / 8.0;
    let mut evals = 0;
    while step > r * 1e-7 && evals < 2000 {
        let mut improved = false;
        for i in 0..len {
            for sign in [1.0, -1.0] {
                let mut cand = u.clone();
                // the center coordinate carries units of r²
                cand[i] += sign * if i == len - 1 { step * r } else { step };
                if crate::group::norm4_of(&cand) >= r4 {
                    continue;
                }
                to_y(&cand, &mut y);
                let v = w.eval(&y);
                evals += 1;
                if v < best {
                    best = v;
                    u = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Reverse Hölder ratio `(avg w^r)^{1/r} / avg w` on one ball.
pub fn rh_ratio(w: &Weight, r: f64, ball: &Ball, spec: &QuadSpec, dims: &GroupDims) -> Result<RatioEstimate> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::param(alloc::format!("reverse Hölder needs finite r > 1, got {r}")));
    }
    let vol = ball.measure(dims);
    let [pw, plain] = integrate_region_multi(
        |y| {
            let v = w.eval(y);
            [libm::pow(v, r), v]
        },
        &ball.region(),
        spec,
        dims,
    )?;
    if pw.divergent || plain.divergent {
        return Ok(RatioEstimate::infinite(true));
    }
    if plain.value <= 0.0 {
        return Ok(RatioEstimate::infinite(false));
    }
    let value = libm::pow(pw.value / vol, 1.0 / r) / (plain.value / vol);
    Ok(RatioEstimate { value, rel_err: pw.relative_error() / r + plain.relative_error(), divergent: false })
}

/// The default ball family: origin-centered dyadic balls plus balls shifted off the origin.
pub fn default_ball_family(dims: &GroupDims) -> Vec<Ball> {
    let len = dims.coord_len();
    let mut out = Vec::new();
    for j in -2..=2 {
        out.push(Ball::origin(libm::exp2(j as f64)));
    }
    for j in -2..=2 {
        let s = libm::exp2(j as f64);
        let mut c = alloc::vec![0.0; len];
        c[0] = s;
        let center = HPoint::new(&c).expect("finite center");
        // contains the origin
        out.push(Ball::at(center.clone(), 1.5 * s));
        // stays away from the origin
        out.push(Ball::at(center, 0.5 * s));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub ratios: Vec<RatioEstimate>,
    pub max_ratio: f64,
    /// Index of the ball attaining the max.
    pub argmax: usize,
    /// `max_ratio > bound`: the weight is certifiably outside the class (up to quadrature).
    pub exceeds_bound: bool,
}

/// Sup of the `A_p` ratio over a ball family.
pub fn ap_sweep(w: &Weight, p: f64, balls: &[Ball], bound: f64, spec: &QuadSpec, dims: &GroupDims) -> Result<SweepReport> {
    let ratios = balls.iter().map(|b| ap_ratio(w, p, b, spec, dims)).collect::<Result<Vec<_>>>()?;
    Ok(sweep(ratios, bound))
}

/// Sup of the reverse Hölder ratio over a ball family.
pub fn rh_sweep(w: &Weight, r: f64, balls: &[Ball], bound: f64, spec: &QuadSpec, dims: &GroupDims) -> Result<SweepReport> {
    let ratios = balls.iter().map(|b| rh_ratio(w, r, b, spec, dims)).collect::<Result<Vec<_>>>()?;
    Ok(sweep(ratios, bound))
}

fn sweep(ratios: Vec<RatioEstimate>, bound: f64) -> SweepReport {
    let (argmax, max_ratio) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r.value > acc.1 { (i, r.value) } else { acc });
    SweepReport { exceeds_bound: max_ratio > bound, ratios, max_ratio, argmax }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingCheck {
    pub lambda: f64,
    pub ball: Ball,
    /// `w(λB)/w(B)`
    pub ratio: f64,
    /// `λ^{Qp}`
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    /// `min (w(E)/w(B)) / (|E|/|B|)^p` over the full family.
    pub c1: f64,
    /// `max (w(E)/w(B)) / (|E|/|B|)^{(r-1)/r}` over the full family.
    pub c2: f64,
    /// The same constants over the coarse half of the family.
    pub c1_coarse: f64,
    pub c2_coarse: f64,
    pub pairs: usize,
    pub doubling: Vec<DoublingCheck>,
    /// Constants stay within a factor 2 when the family is refined and doubling holds.
    pub holds: bool,
}

/// Checks `C₁(|E|/|B|)^p ≤ w(E)/w(B) ≤ C₂(|E|/|B|)^{(r-1)/r}` for `E ⊂ B` and the doubling bound
/// `w(λB) ≤ λ^{Qp} w(B)`.
///
/// The family uses `B = B(0, 2^m)`, `m ∈ {-1, 0, 1}`, and for `j = 1..=levels` the sub-balls
/// `B(0, 2^{m-j})`, the dyadic annuli `{2^{m-j} ≤ |x| < 2^{m-j+1}}` and the complements
/// `B \ B(0, 2^{m-j})`. A finite family always yields finite constants; the check instead asks
/// that refining the family from `levels/2` to `levels` does not move either constant by more than
/// a factor 2. `r = ∞` uses the limiting exponent 1.
pub fn sandwich_check(
    w: &Weight,
    p: f64,
    r: f64,
    levels: u32,
    spec: &QuadSpec,
    dims: &GroupDims,
) -> Result<SandwichReport> {
    if !(p >= 1.0) || !(r > 1.0) || levels < 2 {
        return Err(Error::param("sandwich check needs p >= 1, r > 1 and at least two levels"));
    }
    let q = dims.q_f64();
    let exp2 = if r.is_infinite() { 1.0 } else { (r - 1.0) / r };
    let coarse_levels = levels / 2;
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    let (mut c1c, mut c2c) = (f64::INFINITY, 0.0f64);
    let mut pairs = 0;
    let wm = |region: Region| -> Result<f64> { Ok(weighted_measure(w, &region, spec, dims)?.value) };
    for m in -1..=1 {
        let big = libm::exp2(m as f64);
        let w_b = wm(Region::ball_radius(big))?;
        for j in 1..=levels {
            let small = libm::exp2((m - j as i32) as f64);
            let frac = libm::pow(small / big, q);
            let sets = [
                (wm(Region::ball_radius(small))?, frac),
                (wm(Region::shell(small, 2.0 * small))?, libm::pow(2.0, q) * frac - frac),
                (wm(Region::shell(small, big))?, 1.0 - frac),
            ];
            for (w_e, e_frac) in sets {
                let ratio = w_e / w_b;
                let lo = ratio / libm::pow(e_frac, p);
                let hi = ratio / libm::pow(e_frac, exp2);
                c1 = c1.min(lo);
                c2 = c2.max(hi);
                if j <= coarse_levels {
                    c1c = c1c.min(lo);
                    c2c = c2c.max(hi);
                }
                pairs += 1;
            }
        }
    }
    let doubling = doubling_checks(w, p, spec, dims)?;
    let stable = c1 > 0.0 && c1.is_finite() && c2.is_finite() && c1 >= 0.5 * c1c && c2 <= 2.0 * c2c;
    let holds = stable && doubling.iter().all(|d| d.holds);
    Ok(SandwichReport { c1, c2, c1_coarse: c1c, c2_coarse: c2c, pairs, doubling, holds })
}

/// `w(λB)/w(B) ≤ λ^{Qp}` for `λ ∈ {2, 4, 8}` on an origin ball and an off-center ball.
pub fn doubling_checks(w: &Weight, p: f64, spec: &QuadSpec, dims: &GroupDims) -> Result<Vec<DoublingCheck>> {
    let q = dims.q_f64();
    let len = dims.coord_len();
    let mut c = alloc::vec![0.0; len];
    c[0] = 1.0;
    c[len - 1] = 0.5;
    let balls = [Ball::origin(1.0), Ball::at(HPoint::new(&c)?, 0.5)];
    let mut out = Vec::new();
    for ball in balls {
        let base = weighted_measure(w, &ball.region(), spec, dims)?.value;
        for lambda in [2.0, 4.0, 8.0] {
            let grown = Ball { center: ball.center.clone(), radius: lambda * ball.radius };
            let ratio = weighted_measure(w, &grown.region(), spec, dims)?.value / base;
            let bound = libm::pow(lambda, q * p);
            out.push(DoublingCheck { lambda, ball: ball.clone(), ratio, bound, holds: ratio <= bound * (1.0 + 1e-9) });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgBoundReport {
    /// `(1/|B|)∫_B |f|`
    pub lhs: f64,
    /// `((1/w(B))∫_B |f|^p w)^{1/p}`
    pub rhs: f64,
    /// Smallest admissible constant `lhs/rhs`.
    pub c_min: f64,
}

/// `(1/|B|)∫_B|f| ≤ C ((1/w(B))∫_B |f|^p w)^{1/p}` on one ball.
pub fn weighted_avg_bound_check<F>(w: &Weight, p: f64, f: F, ball: &Ball, spec: &QuadSpec, dims: &GroupDims) -> Result<AvgBoundReport>
where
    F: Fn(&[f64]) -> f64,
{
    if !(p >= 1.0) {
        return Err(Error::param("weighted average bound needs p >= 1"));
    }
    let [abs_f, fw, wb] = integrate_region_multi(
        |y| {
            let v = libm::fabs(f(y));
            let wy = w.eval(y);
            [v, libm::pow(v, p) * wy, wy]
        },
        &ball.region(),
        spec,
        dims,
    )?;
    let lhs = abs_f.value / ball.measure(dims);
    let rhs = libm::pow(fw.value / wb.value, 1.0 / p);
    let c_min = if rhs == 0.0 {
        if lhs == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        lhs / rhs
    };
    Ok(AvgBoundReport { lhs, rhs, c_min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn d1() -> GroupDims {
        GroupDims::new(1).unwrap()
    }

    fn spec() -> QuadSpec {
        QuadSpec::stratified(40_000, 17)
    }

    #[test]
    fn measure_examples() {
        let d = d1();
        let unit = weighted_measure(&Weight::Unit, &Region::ball(0), &spec(), &d).unwrap();
        assert!((unit.value - PI * PI / 2.0).abs() < 1e-3);
        let pw = weighted_measure(&Weight::Power { beta: 2.0 }, &Region::ball(0), &spec(), &d).unwrap();
        assert!((pw.value / (PI * PI / 3.0) - 1.0).abs() < 1e-2);
        assert!((power_ball_measure(0.0, 0, &d).unwrap() - PI * PI / 2.0).abs() < 1e-9);
        assert!((power_ball_measure(2.0, 1, &d).unwrap() - 210.55).abs() < 1e-2);
        assert!(power_ball_measure(-4.0, 0, &d).is_err());
        let zero = Weight::Power { beta: 0.0 };
        assert_eq!(zero.eval(&[0.3, 0.1, 7.0]), 1.0);
    }

    #[test]
    fn indices() {
        let d = d1();
        assert_eq!(power_weight_indices(0.0, &d).unwrap(), WeightIndices { q_w: 1.0, r_w: f64::INFINITY });
        assert_eq!(power_weight_indices(1.0, &d).unwrap().q_w, 1.25);
        assert_eq!(power_weight_indices(-2.0, &d).unwrap().r_w, 2.0);
        assert!(power_weight_indices(-4.0, &d).is_err());
    }

    #[test]
    fn unit_weight_ratios_are_one() {
        let d = d1();
        for p in [1.0, 1.5, 3.0] {
            let r = ap_ratio(&Weight::Unit, p, &Ball::origin(2.0), &spec(), &d).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
        }
        let r = rh_ratio(&Weight::Unit, 2.5, &Ball::origin(0.5), &spec(), &d).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn a1_ratio_of_inverse_square() {
        let d = d1();
        let w = Weight::Power { beta: -2.0 };
        let r = ap_ratio(&w, 1.0, &Ball::origin(1.0), &spec(), &d).unwrap();
        assert!((r.value - 2.0).abs() < 2e-2, "{r:?}");
    }

    #[test]
    fn rh_examples() {
        let d = d1();
        let w = Weight::Power { beta: -2.0 };
        let r = rh_ratio(&w, 1.5, &Ball::origin(1.0), &spec(), &d).unwrap();
        assert!((r.value - 4f64.powf(2.0 / 3.0) / 2.0).abs() < 1e-3);
        assert!((r.value - 1.2599).abs() < 1e-4);
        let div = rh_ratio(&w, 2.0, &Ball::origin(1.0), &spec(), &d).unwrap();
        assert!(div.divergent && div.value.is_infinite());
    }

    #[test]
    fn vanishing_weight_gives_infinite_ratio() {
        let d = d1();
        let w = Weight::custom(|x| if x[0] > 0.0 { 1.0 } else { 0.0 });
        let r = ap_ratio(&w, 2.0, &Ball::origin(1.0), &spec(), &d).unwrap();
        assert!(r.value.is_infinite());
        let r1 = ap_ratio(&w, 1.0, &Ball::origin(1.0), &spec(), &d).unwrap();
        assert!(r1.value.is_infinite());
    }

    #[test]
    fn positive_power_fails_a1_on_the_family() {
        let d = d1();
        let rep = ap_sweep(&Weight::Power { beta: 1.0 }, 1.0, &default_ball_family(&d), 1e3, &spec(), &d).unwrap();
        assert!(rep.exceeds_bound, "{}", rep.max_ratio);
        let ok = ap_sweep(&Weight::Power { beta: -2.0 }, 1.0, &default_ball_family(&d), 1e3, &spec(), &d).unwrap();
        assert!(!ok.exceeds_bound, "{}", ok.max_ratio);
    }

    #[test]
    fn doubling_example() {
        let d = d1();
        let checks = doubling_checks(&Weight::Power { beta: 2.0 }, 2.0, &spec(), &d).unwrap();
        let first = &checks[0];
        assert_eq!(first.lambda, 2.0);
        assert!((first.ratio - 64.0).abs() < 64.0 * 1e-9);
        assert_eq!(first.bound, 256.0);
        assert!(checks.iter().all(|c| c.holds));
    }

    #[test]
    fn sandwich_detects_reverse_holder_beyond_critical_index() {
        let d = d1();
        let w = Weight::Power { beta: -2.0 };
        let good = sandwich_check(&w, 1.0, 1.5, 8, &spec(), &d).unwrap();
        assert!(good.holds, "{good:?}");
        let bad = sandwich_check(&w, 1.0, 3.0, 8, &spec(), &d).unwrap();
        assert!(!bad.holds);
        let unit = sandwich_check(&Weight::Unit, 1.0, f64::INFINITY, 6, &spec(), &d).unwrap();
        assert!((unit.c1 - 1.0).abs() < 1e-9 && (unit.c2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn avg_bound_examples() {
        let d = d1();
        let b = Ball::origin(1.0);
        let r = weighted_avg_bound_check(&Weight::Unit, 2.0, norm_of, &b, &spec(), &d).unwrap();
        assert!((r.lhs - 0.8).abs() < 1e-9);
        assert!((r.rhs - (2.0f64 / 3.0).sqrt()).abs() < 1e-9);
        assert!((r.c_min - 0.9798).abs() < 1e-4);
        let one = weighted_avg_bound_check(&Weight::Unit, 1.0, norm_of, &b, &spec(), &d).unwrap();
        assert!((one.c_min - 1.0).abs() < 1e-12);
        let c = weighted_avg_bound_check(&Weight::Power { beta: -2.0 }, 2.0, |_| 1.0, &b, &spec(), &d).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-9 && (c.c_min - 1.0).abs() < 1e-9);
    }
}
