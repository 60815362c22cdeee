//! Small dense kernels for the horizontal block of a graded matrix (`2n × 2n`, row-major).

use alloc::vec::Vec;

/// Singular values in descending order by one-sided cyclic Jacobi.
pub fn singular_values(a: &[f64], dim: usize) -> Vec<f64> {
    assert_eq!(a.len(), dim * dim);
    let mut m = a.to_vec();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..dim {
            for q in p + 1..dim {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..dim {
                    let (x, y) = (m[i * dim + p], m[i * dim + q]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || libm::fabs(gamma) <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..dim {
                    let (x, y) = (m[i * dim + p], m[i * dim + q]);
                    m[i * dim + p] = c * x - s * y;
                    m[i * dim + q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..dim)
        .map(|j| libm::sqrt((0..dim).map(|i| m[i * dim + j] * m[i * dim + j]).sum::<f64>()))
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    sv
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &[f64], dim: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| libm::fabs(m[i * dim + col]).partial_cmp(&libm::fabs(m[j * dim + col])).unwrap())
            .unwrap();
        if m[pivot * dim + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..dim {
                m.swap(pivot * dim + k, col * dim + k);
            }
            det = -det;
        }
        let d = m[col * dim + col];
        det *= d;
        for row in col + 1..dim {
            let f = m[row * dim + col] / d;
            for k in col..dim {
                m[row * dim + k] -= f * m[col * dim + k];
            }
        }
    }
    det
}

/// Inverse by Gauss–Jordan elimination; `None` when a pivot vanishes.
pub fn inverse(a: &[f64], dim: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = alloc::vec![0.0; dim * dim];
    for i in 0..dim {
        inv[i * dim + i] = 1.0;
    }
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| libm::fabs(m[i * dim + col]).partial_cmp(&libm::fabs(m[j * dim + col])).unwrap())
            .unwrap();
        if m[pivot * dim + col] == 0.0 {
            return None;
        }
        for k in 0..dim {
            m.swap(pivot * dim + k, col * dim + k);
            inv.swap(pivot * dim + k, col * dim + k);
        }
        let d = m[col * dim + col];
        for k in 0..dim {
            m[col * dim + k] /= d;
            inv[col * dim + k] /= d;
        }
        for row in 0..dim {
            if row == col {
                continue;
            }
            let f = m[row * dim + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..dim {
                m[row * dim + k] -= f * m[col * dim + k];
                inv[row * dim + k] -= f * inv[col * dim + k];
            }
        }
    }
    Some(inv)
}

/// `out = A·z`.
#[inline]
pub fn mat_vec(a: &[f64], dim: usize, z: &[f64], out: &mut [f64]) {
    for i in 0..dim {
        let row = &a[i * dim..(i + 1) * dim];
        out[i] = row.iter().zip(z).map(|(x, y)| x * y).sum();
    }
}
