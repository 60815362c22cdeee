//! Graded matrices `M = B ⊕ a`, acting by `(z, t) ↦ (Bz, a·t)`.
//!
//! For a general `(2n+1)×(2n+1)` matrix the supremum `sup |Mx|_h/|x|_h` is infinite as soon as
//! `M` couples the horizontal block with the center, so only the graded ones are representable.
//! For them
//!
//! ```text
//! |Mx|_h⁴ / |x|_h⁴ = (|Bz|⁴ + a²t²) / (|z|⁴ + t²) ≤ max(σ_max(B)⁴, a²)
//! ```
//!
//! with equality along the top singular direction (`t = 0`) or the center axis (`z = 0`), hence
//! `‖M‖ = max(σ_max(B), √|a|)`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::group::{norm_of, Coords, GroupDims, HPoint};
use crate::linalg;

type Block = SmallVec<[f64; 16]>;

#[derive(Debug, Clone, PartialEq)]
pub struct GradedMatrix {
    n: usize,
    b: Block,
    a: f64,
    sigma_max: f64,
    sigma_min: f64,
    det_b: f64,
}

impl GradedMatrix {
    /// `b` is the `2n × 2n` horizontal block in row-major order.
    pub fn new(n: usize, b: &[f64], a: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension);
        }
        let dim = 2 * n;
        if b.len() != dim * dim {
            return Err(Error::param("horizontal block must be 2n x 2n"));
        }
        if b.iter().any(|x| !x.is_finite()) || !a.is_finite() {
            return Err(Error::param("matrix entries must be finite"));
        }
        let det_b = linalg::determinant(b, dim);
        let sv = linalg::singular_values(b, dim);
        let (sigma_max, sigma_min) = (sv[0], sv[dim - 1]);
        if det_b == 0.0 || a == 0.0 || sigma_min <= sigma_max * 1e-14 {
            return Err(Error::SingularMatrix { det_b, a });
        }
        Ok(GradedMatrix { n, b: Block::from_slice(b), a, sigma_max, sigma_min, det_b })
    }

    /// From rows of the horizontal block.
    pub fn from_rows(rows: &[Vec<f64>], a: f64) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || !dim.is_multiple_of(2) || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::param("horizontal block must be a non-empty 2n x 2n array"));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(dim / 2, &flat, a)
    }

    /// From a full `(2n+1) × (2n+1)` matrix; rejected unless it is block diagonal.
    pub fn from_full(rows: &[Vec<f64>]) -> Result<Self> {
        let len = rows.len();
        let n = crate::group::dim_of(len)?;
        if rows.iter().any(|r| r.len() != len) {
            return Err(Error::param("matrix must be square"));
        }
        let last = len - 1;
        for i in 0..last {
            if rows[i][last] != 0.0 || rows[last][i] != 0.0 {
                return Err(Error::NotGraded);
            }
        }
        let b: Vec<f64> = rows[..last].iter().flat_map(|r| r[..last].iter().copied()).collect();
        Self::new(n, &b, rows[last][last])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::dilation(n, 1.0)
    }

    /// `δ_r` as a graded matrix (`B = rI`, `a = r²`).
    pub fn dilation(n: usize, r: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension);
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NonPositiveDilation(r));
        }
        let dim = 2 * n;
        let mut b: Block = smallvec::smallvec![0.0; dim * dim];
        for i in 0..dim {
            b[i * dim + i] = r;
        }
        Ok(GradedMatrix { n, b, a: r * r, sigma_max: r, sigma_min: r, det_b: libm::pow(r, dim as f64) })
    }

    pub fn diagonal(b_diag: &[f64], a: f64) -> Result<Self> {
        let dim = b_diag.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::param("diagonal must have even length 2n"));
        }
        let mut b = alloc::vec![0.0; dim * dim];
        for (i, d) in b_diag.iter().enumerate() {
            b[i * dim + i] = *d;
        }
        Self::new(dim / 2, &b, a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self) -> &[f64] {
        &self.b
    }

    pub fn center_scale(&self) -> f64 {
        self.a
    }

    /// Determinant of the full matrix, `det B · a`.
    pub fn det(&self) -> f64 {
        self.det_b * self.a
    }

    /// `σ_max(B)/σ_min(B)`.
    pub fn condition_number(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }

    pub fn inverse(&self) -> GradedMatrix {
        let dim = 2 * self.n;
        let b = linalg::inverse(&self.b, dim).expect("graded matrix was checked invertible");
        GradedMatrix {
            n: self.n,
            b: Block::from_vec(b),
            a: 1.0 / self.a,
            sigma_max: 1.0 / self.sigma_min,
            sigma_min: 1.0 / self.sigma_max,
            det_b: 1.0 / self.det_b,
        }
    }

    /// `‖M‖ = sup_{x≠0} |Mx|_h/|x|_h`.
    pub fn heis_norm(&self) -> f64 {
        self.sigma_max.max(libm::sqrt(libm::fabs(self.a)))
    }

    /// `‖M⁻¹‖` without forming the inverse.
    pub fn inv_heis_norm(&self) -> f64 {
        (1.0 / self.sigma_min).max(1.0 / libm::sqrt(libm::fabs(self.a)))
    }

    pub fn apply(&self, x: &HPoint) -> Result<HPoint> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.n() });
        }
        let mut out: Coords = smallvec::smallvec![0.0; x.coords().len()];
        self.apply_into(x.coords(), &mut out);
        HPoint::new(&out)
    }

    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let dim = 2 * self.n;
        linalg::mat_vec(&self.b, dim, &x[..dim], &mut out[..dim]);
        out[dim] = self.a * x[dim];
    }
}

/// `G(M, β)`: `‖M‖^β` for `β > 0` and `‖M⁻¹‖^{-β}` for `β ≤ 0`.
pub fn g_function(m: &GradedMatrix, beta: f64) -> f64 {
    g_from_norms(m.heis_norm(), m.inv_heis_norm(), beta)
}

pub(crate) fn g_from_norms(norm: f64, inv_norm: f64, beta: f64) -> f64 {
    if beta > 0.0 {
        libm::pow(norm, beta)
    } else {
        libm::pow(inv_norm, -beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetBoundsReport {
    /// `‖M‖^{-Q}`
    pub lhs: f64,
    /// `|det M⁻¹|`
    pub mid: f64,
    /// `‖M⁻¹‖^Q`
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `‖M‖^{-Q} ≤ |det M⁻¹| ≤ ‖M⁻¹‖^Q`.
pub fn det_inv_bounds_check(m: &GradedMatrix, dims: &GroupDims) -> DetBoundsReport {
    let q = dims.q_f64();
    let lhs = libm::pow(m.heis_norm(), -q);
    let mid = 1.0 / libm::fabs(m.det());
    let rhs = libm::pow(m.inv_heis_norm(), q);
    let slack = 1e-12;
    let holds = lhs <= mid * (1.0 + slack) && mid <= rhs * (1.0 + slack);
    DetBoundsReport { lhs, mid, rhs, holds }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointBoundReport {
    pub bound: f64,
    /// `max |Mx|_h^β / |x|_h^β` over the sample.
    pub max_ratio: f64,
    pub holds: bool,
    pub checked: usize,
}

/// Checks `|Mx|_h^β ≤ G(M, β)|x|_h^β` on every nonzero sample point (`β > −n`).
pub fn weighted_point_bound_check(m: &GradedMatrix, beta: f64, sample: &[HPoint]) -> Result<PointBoundReport> {
    if !(beta > -(m.n as f64)) {
        return Err(Error::param("weighted point bound needs beta > -n"));
    }
    let bound = g_function(m, beta);
    let mut max_ratio: f64 = 0.0;
    let mut checked = 0;
    let mut out: Coords = smallvec::smallvec![0.0; 2 * m.n + 1];
    for x in sample {
        if x.n() != m.n {
            return Err(Error::DimensionMismatch { expected: m.n, found: x.n() });
        }
        let nx = norm_of(x.coords());
        if nx == 0.0 {
            continue;
        }
        m.apply_into(x.coords(), &mut out);
        let ratio = libm::pow(norm_of(&out) / nx, beta);
        max_ratio = max_ratio.max(ratio);
        checked += 1;
    }
    Ok(PointBoundReport { bound, max_ratio, holds: max_ratio <= bound * (1.0 + 1e-12), checked })
}

/// Sampled lower estimate of `sup |Mx|_h/|x|_h`.
///
/// Homogeneity reduces the sup to the unit sphere, parametrised by a Euclidean unit vector
/// `ω ∈ S^{2n-1}` and an angle `θ ∈ [0, π/2]` with `z = √(cos θ)·ω`, `t = ±sin θ`.
/// Half the samples are uniform in `(ω, θ)`; the rest perturb the best point so far with a
/// shrinking step. Every evaluated point is a genuine sphere point, so the result never exceeds the sup.
pub fn sampled_heis_norm<R: rand::Rng>(m: &GradedMatrix, samples: usize, rng: &mut R) -> f64 {
    let dim = 2 * m.n;
    let mut omega: Coords = smallvec::smallvec![0.0; dim];
    let mut best_omega: Coords = smallvec::smallvec![0.0; dim];
    let mut best_theta = 0.0;
    let mut best_sign = 1.0;
    let mut x: Coords = smallvec::smallvec![0.0; dim + 1];
    let mut out: Coords = smallvec::smallvec![0.0; dim + 1];
    let mut best: f64 = 0.0;
    let explore = samples / 2;
    for i in 0..samples {
        let (theta, sign);
        if i < explore || best == 0.0 {
            random_unit(rng, &mut omega);
            theta = rng.gen::<f64>() * core::f64::consts::FRAC_PI_2;
            sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        } else {
            let frac = (i - explore) as f64 / (samples - explore) as f64;
            let step = 0.3 * libm::pow(1e-4 / 0.3, frac);
            random_unit(rng, &mut omega);
            let mut n2 = 0.0;
            for (o, b) in omega.iter_mut().zip(&best_omega) {
                *o = b + step * *o;
                n2 += *o * *o;
            }
            let inv = 1.0 / libm::sqrt(n2);
            for o in omega.iter_mut() {
                *o *= inv;
            }
            theta = (best_theta + step * (2.0 * rng.gen::<f64>() - 1.0)).clamp(0.0, core::f64::consts::FRAC_PI_2);
            sign = best_sign;
        }
        let r = libm::sqrt(libm::cos(theta));
        for (c, o) in x[..dim].iter_mut().zip(&omega) {
            *c = r * o;
        }
        x[dim] = sign * libm::sin(theta);
        m.apply_into(&x, &mut out);
        let ratio = norm_of(&out) / norm_of(&x);
        if ratio > best {
            best = ratio;
            best_omega.copy_from_slice(&omega);
            best_theta = theta;
            best_sign = sign;
        }
    }
    best
}

fn random_unit<R: rand::Rng>(rng: &mut R, v: &mut [f64]) {
    loop {
        let mut n2 = 0.0;
        for c in v.iter_mut() {
            *c = gaussian(rng);
            n2 += *c * *c;
        }
        if n2 > 1e-24 {
            let inv = 1.0 / libm::sqrt(n2);
            for c in v.iter_mut() {
                *c *= inv;
            }
            return;
        }
    }
}

fn gaussian<R: rand::Rng>(rng: &mut R) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Scalar summary of `A(y)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalNorms {
    /// `‖A(y)‖`
    pub norm: f64,
    /// `‖A(y)⁻¹‖`
    pub inv_norm: f64,
    /// `|det A(y)⁻¹|`
    pub det_inv: f64,
}

pub type CustomField = Arc<dyn Fn(&[f64]) -> Result<GradedMatrix> + Send + Sync>;

/// `y ↦ A(y)`.
#[derive(Clone)]
pub enum MatrixField {
    Constant(GradedMatrix),
    /// `A(y) = δ_{|y|_h^{-1}}`, which turns `T_{Φ,A}` into `T_Φ`.
    InverseDilation,
    Custom(CustomField),
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixField::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            MatrixField::InverseDilation => f.write_str("InverseDilation"),
            MatrixField::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl MatrixField {
    pub fn at(&self, y: &[f64]) -> Result<GradedMatrix> {
        let n = (y.len() - 1) / 2;
        match self {
            MatrixField::Constant(m) => Ok(m.clone()),
            MatrixField::InverseDilation => {
                let r = norm_of(y);
                if r == 0.0 {
                    return Err(Error::SingularMatrix { det_b: 0.0, a: 0.0 });
                }
                GradedMatrix::dilation(n, 1.0 / r)
            }
            MatrixField::Custom(f) => f(y),
        }
    }

    /// Norms and determinant of `A(y)`.
    pub fn local_norms(&self, y: &[f64]) -> Result<LocalNorms> {
        match self {
            MatrixField::InverseDilation => {
                let r = norm_of(y);
                if r == 0.0 {
                    return Err(Error::SingularMatrix { det_b: 0.0, a: 0.0 });
                }
                let q = (y.len() + 1) as f64;
                Ok(LocalNorms { norm: 1.0 / r, inv_norm: r, det_inv: libm::pow(r, q) })
            }
            other => {
                let m = other.at(y)?;
                Ok(LocalNorms { norm: m.heis_norm(), inv_norm: m.inv_heis_norm(), det_inv: 1.0 / libm::fabs(m.det()) })
            }
        }
    }

    /// Writes `A(y)x` into `out`.
    pub fn apply_into(&self, y: &[f64], x: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            MatrixField::Constant(m) => {
                m.apply_into(x, out);
                Ok(())
            }
            MatrixField::InverseDilation => {
                let r = norm_of(y);
                if r == 0.0 {
                    return Err(Error::SingularMatrix { det_b: 0.0, a: 0.0 });
                }
                out.copy_from_slice(x);
                crate::group::dilate_in_place(1.0 / r, out);
                Ok(())
            }
            MatrixField::Custom(f) => {
                f(y)?.apply_into(x, out);
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m23() -> GradedMatrix {
        GradedMatrix::diagonal(&[2.0, 3.0], 16.0).unwrap()
    }

    #[test]
    fn apply_examples() {
        let x = HPoint::new(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(m23().apply(&x).unwrap().coords(), &[2.0, 3.0, 16.0]);
        assert_eq!(GradedMatrix::identity(1).unwrap().apply(&x).unwrap(), x);
        let y = [2.0, 0.0, 0.0];
        let mut out = [0.0; 3];
        MatrixField::InverseDilation.apply_into(&y, &[4.0, 2.0, 8.0], &mut out).unwrap();
        assert_eq!(out, [2.0, 1.0, 2.0]);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(m23().heis_norm(), 4.0);
        assert_eq!(m23().inv_heis_norm(), 0.5);
        assert_eq!(GradedMatrix::identity(2).unwrap().heis_norm(), 1.0);
        let d = GradedMatrix::dilation(1, 3.0).unwrap();
        assert!((d.heis_norm() - 3.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = sampled_heis_norm(&m23(), 100_000, &mut rng);
        assert!((4.0 * (1.0 - 1e-3)..=4.0 * (1.0 + 1e-12)).contains(&s));
    }

    #[test]
    fn det_bounds_example() {
        let d = GroupDims::new(1).unwrap();
        let r = det_inv_bounds_check(&m23(), &d);
        assert!((r.lhs - 4f64.powi(-4)).abs() < 1e-15);
        assert!((r.mid - 1.0 / 96.0).abs() < 1e-15);
        assert!((r.rhs - 0.0625).abs() < 1e-15);
        assert!(r.holds);
        let id = det_inv_bounds_check(&GradedMatrix::identity(1).unwrap(), &d);
        assert_eq!((id.lhs, id.mid, id.rhs, id.holds), (1.0, 1.0, 1.0, true));
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_function(&m23(), 2.0), 16.0);
        assert_eq!(g_function(&m23(), -2.0), 0.25);
        assert_eq!(g_function(&m23(), 0.0), 1.0);
    }

    #[test]
    fn point_bound_examples() {
        let pts: Vec<HPoint> = (1..50)
            .map(|i| {
                let s = i as f64 * 0.37;
                HPoint::new(&[s.sin(), (2.0 * s).cos(), s - 9.0]).unwrap()
            })
            .collect();
        let id = weighted_point_bound_check(&GradedMatrix::identity(1).unwrap(), 0.7, &pts).unwrap();
        assert!((id.max_ratio - 1.0).abs() < 1e-14 && id.holds);
        let d2 = weighted_point_bound_check(&GradedMatrix::dilation(1, 2.0).unwrap(), 1.0, &pts).unwrap();
        assert!((d2.max_ratio - 2.0).abs() < 1e-14 && d2.holds && (d2.bound - 2.0).abs() < 1e-15);
        assert!(weighted_point_bound_check(&m23(), -1.0, &pts).is_err());
    }

    #[test]
    fn rejects_non_graded_and_singular() {
        let full = alloc::vec![
            alloc::vec![1.0, 0.0, 0.5],
            alloc::vec![0.0, 1.0, 0.0],
            alloc::vec![0.0, 0.0, 1.0]
        ];
        assert_eq!(GradedMatrix::from_full(&full), Err(Error::NotGraded));
        let ok = alloc::vec![
            alloc::vec![2.0, 0.0, 0.0],
            alloc::vec![0.0, 3.0, 0.0],
            alloc::vec![0.0, 0.0, 16.0]
        ];
        assert_eq!(GradedMatrix::from_full(&ok).unwrap().heis_norm(), 4.0);
        assert!(matches!(GradedMatrix::new(1, &[1.0, 2.0, 2.0, 4.0], 1.0), Err(Error::SingularMatrix { .. })));
        assert!(matches!(GradedMatrix::diagonal(&[1.0, 1.0], 0.0), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn inverse_round_trip() {
        let m = GradedMatrix::new(1, &[1.0, 2.0, -0.5, 3.0], -4.0).unwrap();
        let mi = m.inverse();
        let x = HPoint::new(&[0.3, -1.1, 2.0]).unwrap();
        let back = mi.apply(&m.apply(&x).unwrap()).unwrap();
        for (a, b) in back.coords().iter().zip(x.coords()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((mi.heis_norm() - m.inv_heis_norm()).abs() < 1e-14);
        assert!(m.heis_norm() * m.inv_heis_norm() >= 1.0);
    }
}
