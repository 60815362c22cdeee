//! The Heisenberg group `Hⁿ = ℝ²ⁿ × ℝ`.
//!
//! Points are stored as `(x₁, …, x₂ₙ, x₂ₙ₊₁)` with the center coordinate last. The group law is
//!
//! ```text
//! x·y = (x₁+y₁, …, x₂ₙ+y₂ₙ, x₂ₙ₊₁+y₂ₙ₊₁ + 2 Σⱼ (yⱼ xₙ₊ⱼ − xⱼ yₙ₊ⱼ))
//! ```
//!
//! with identity `0` and inverse `−x`. Dilations `δ_r` scale the horizontal coordinates by `r` and
//! the center by `r²`; the homogeneous norm `|x|_h = ((Σ xᵢ²)² + x₂ₙ₊₁²)^{1/4}` is 1-homogeneous
//! under them and Lebesgue measure scales by `r^Q`, `Q = 2n+2`.
//!
//! Hot paths work on plain `&[f64]` slices; [`HPoint`] is the checked owned form.

use core::f64::consts::PI;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rules::adaptive_gk;

/// Inline storage covers `n ≤ 3` without touching the heap.
pub type Coords = SmallVec<[f64; 7]>;

/// Recover `n` from a coordinate count `2n+1`.
pub fn dim_of(len: usize) -> Result<usize> {
    if len >= 3 && len % 2 == 1 {
        Ok((len - 1) / 2)
    } else {
        Err(Error::InvalidLength(len))
    }
}

/// A point of `Hⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    coords: Coords,
}

impl HPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        dim_of(coords.len())?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate);
        }
        Ok(HPoint { coords: Coords::from_slice(coords) })
    }

    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension);
        }
        Ok(HPoint { coords: smallvec::smallvec![0.0; 2 * n + 1] })
    }

    /// `(z, t)` split: horizontal part and center coordinate.
    pub fn from_parts(z: &[f64], t: f64) -> Result<Self> {
        let mut c = Coords::from_slice(z);
        c.push(t);
        Self::new(&c)
    }

    pub(crate) fn from_coords_unchecked(coords: Coords) -> Self {
        HPoint { coords }
    }

    pub fn n(&self) -> usize {
        (self.coords.len() - 1) / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn horizontal(&self) -> &[f64] {
        &self.coords[..self.coords.len() - 1]
    }

    pub fn center(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn mul(&self, other: &HPoint) -> Result<HPoint> {
        group_mul(self, other)
    }

    pub fn inv(&self) -> HPoint {
        group_inv(self)
    }

    pub fn dilate(&self, r: f64) -> Result<HPoint> {
        dilate(r, self)
    }

    pub fn norm(&self) -> f64 {
        hnorm(self)
    }

    pub fn dist(&self, other: &HPoint) -> Result<f64> {
        hdist(self, other)
    }
}

fn same_dim(x: &HPoint, y: &HPoint) -> Result<()> {
    if x.n() == y.n() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: x.n(), found: y.n() })
    }
}

/// Group product `x·y`.
pub fn group_mul(x: &HPoint, y: &HPoint) -> Result<HPoint> {
    same_dim(x, y)?;
    let mut out = Coords::from_slice(x.coords());
    mul_into(x.coords(), y.coords(), &mut out);
    Ok(HPoint::from_coords_unchecked(out))
}

/// Group product on raw slices; `out` must have the same length as the inputs.
pub fn mul_into(x: &[f64], y: &[f64], out: &mut [f64]) {
    let n = (x.len() - 1) / 2;
    let mut twist = 0.0;
    for j in 0..n {
        twist += y[j] * x[n + j] - x[j] * y[n + j];
    }
    for i in 0..2 * n {
        out[i] = x[i] + y[i];
    }
    out[2 * n] = x[2 * n] + y[2 * n] + 2.0 * twist;
}

/// Group inverse, which is plain negation.
pub fn group_inv(x: &HPoint) -> HPoint {
    HPoint::from_coords_unchecked(x.coords.iter().map(|c| -c).collect())
}

/// Dilation `δ_r x`.
pub fn dilate(r: f64, x: &HPoint) -> Result<HPoint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NonPositiveDilation(r));
    }
    let mut c = x.coords.clone();
    dilate_in_place(r, &mut c);
    Ok(HPoint::from_coords_unchecked(c))
}

pub fn dilate_in_place(r: f64, x: &mut [f64]) {
    let last = x.len() - 1;
    for c in &mut x[..last] {
        *c *= r;
    }
    x[last] *= r * r;
}

/// Homogeneous norm `|x|_h`.
pub fn hnorm(x: &HPoint) -> f64 {
    norm_of(x.coords())
}

/// `|x|_h` on a raw coordinate slice.
#[inline]
pub fn norm_of(x: &[f64]) -> f64 {
    let last = x.len() - 1;
    let mut z2 = 0.0;
    for c in &x[..last] {
        z2 += c * c;
    }
    let t = x[last];
    libm::sqrt(libm::sqrt(z2 * z2 + t * t))
}

/// `|x|_h⁴`, which avoids the two square roots in membership tests.
#[inline]
pub fn norm4_of(x: &[f64]) -> f64 {
    let last = x.len() - 1;
    let mut z2 = 0.0;
    for c in &x[..last] {
        z2 += c * c;
    }
    let t = x[last];
    z2 * z2 + t * t
}

/// Left-invariant distance `d(p, q) = |q⁻¹·p|_h`.
pub fn hdist(p: &HPoint, q: &HPoint) -> Result<f64> {
    same_dim(p, q)?;
    let qi = group_inv(q);
    let mut out = Coords::from_slice(p.coords());
    mul_into(qi.coords(), p.coords(), &mut out);
    Ok(norm_of(&out))
}

/// Dimension constants of `Hⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupDims {
    pub n: usize,
    /// Homogeneous dimension `Q = 2n+2`.
    pub q: u32,
    /// Volume of the unit ball `B(0,1)`.
    pub omega_q: f64,
    /// Area of the unit sphere, `w_Q = Q·Ω_Q`.
    pub w_q: f64,
}

impl GroupDims {
    pub fn new(n: usize) -> Result<Self> {
        group_constants(n)
    }

    pub fn coord_len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn q_f64(&self) -> f64 {
        self.q as f64
    }
}

/// Euclidean area of the unit sphere `S^{2n-1} ⊂ ℝ²ⁿ`: `2πⁿ/(n-1)!`.
pub fn euclidean_sphere_area(n: usize) -> f64 {
    let mut fact = 1.0;
    for k in 1..n {
        fact *= k as f64;
    }
    2.0 * libm::pow(PI, n as f64) / fact
}

/// `Q`, `Ω_Q` and `w_Q` for `Hⁿ`.
///
/// `Ω_Q = σ_{2n-1} · 2∫₀¹ r^{2n-1} √(1-r⁴) dr`: slice the unit ball `|z|⁴ + t² < 1` at fixed `|z| = r`.
pub fn group_constants(n: usize) -> Result<GroupDims> {
    if n == 0 {
        return Err(Error::InvalidDimension);
    }
    let p = (2 * n - 1) as i32;
    let radial = adaptive_gk(
        |r| libm::pow(r, p as f64) * libm::sqrt((1.0 - r * r * r * r).max(0.0)),
        0.0,
        1.0,
        1e-15,
        1e-13,
        2000,
    )?;
    let omega_q = euclidean_sphere_area(n) * 2.0 * radial.value;
    let q = (2 * n + 2) as u32;
    Ok(GroupDims { n, q, omega_q, w_q: q as f64 * omega_q })
}

/// `|B(0, 2^k)| = Ω_Q 2^{kQ}`.
pub fn ball_measure(dims: &GroupDims, k: i32) -> f64 {
    dims.omega_q * libm::ldexp(1.0, k * dims.q as i32)
}

/// Origin-centered dyadic annulus `{x : 2^{k_inner} ≤ |x|_h < 2^{k_outer}}`.
///
/// `k_inner = None` is the ball `B_{k_outer}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Annulus {
    pub k_inner: Option<i32>,
    pub k_outer: i32,
}

impl Annulus {
    pub fn new(k_inner: Option<i32>, k_outer: i32) -> Result<Self> {
        if let Some(ki) = k_inner {
            if ki >= k_outer {
                return Err(Error::param("annulus requires k_inner < k_outer"));
            }
        }
        Ok(Annulus { k_inner, k_outer })
    }

    /// `B_k = {|x|_h < 2^k}`.
    pub fn ball(k: i32) -> Self {
        Annulus { k_inner: None, k_outer: k }
    }

    /// `E_k = B_k \ B_{k-1}`.
    pub fn shell(k: i32) -> Self {
        Annulus { k_inner: Some(k - 1), k_outer: k }
    }

    pub fn inner_radius(&self) -> f64 {
        self.k_inner.map_or(0.0, |k| libm::ldexp(1.0, k))
    }

    pub fn outer_radius(&self) -> f64 {
        libm::ldexp(1.0, self.k_outer)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let r = norm_of(x);
        r >= self.inner_radius() && r < self.outer_radius()
    }

    pub fn measure(&self, dims: &GroupDims) -> f64 {
        let outer = ball_measure(dims, self.k_outer);
        match self.k_inner {
            None => outer,
            Some(k) => outer - ball_measure(dims, k),
        }
    }
}
