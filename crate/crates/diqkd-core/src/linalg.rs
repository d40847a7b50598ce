//! Eigenvalues of small real symmetric matrices.
//!
//! 2x2 by the closed form, 4x4 by cyclic Jacobi rotations. Self-contained
//! so the spectral oracles carry no external solver dependency.

use crate::math;

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
pub fn sym2_eigenvalues(m: [[f64; 2]; 2]) -> [f64; 2] {
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = math::sqrt((half_tr * half_tr - det).max(0.0));
    [half_tr - disc, half_tr + disc]
}

/// Eigenvalues of a symmetric NxN matrix by cyclic Jacobi sweeps, ascending.
///
/// Rotations annihilate one off-diagonal element at a time; off-diagonal
/// mass decreases monotonically and the sweep count needed for 1e-14
/// convergence at N = 4 is tiny.
pub fn sym_eigenvalues<const N: usize>(mut a: [[f64; N]; N]) -> [f64; N] {
    for _sweep in 0..50 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if math::abs(a[p][q]) < 1e-300 {
                    continue;
                }
                // rotation angle zeroing a[p][q]
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                let apq = a[p][q];
                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for k in 0..N {
                    if k != p && k != q {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[p][k] = a[k][p];
                        a[k][q] = s * akp + c * akq;
                        a[q][k] = a[k][q];
                    }
                }
            }
        }
    }
    let mut vals = [0.0; N];
    for i in 0..N {
        vals[i] = a[i][i];
    }
    vals.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Von Neumann entropy (bits) of a density block given by a symmetric
/// matrix; eigenvalues below 1e-15 contribute zero.
pub fn block_entropy<const N: usize>(m: [[f64; N]; N]) -> f64 {
    let mut h = 0.0;
    for lam in sym_eigenvalues(m) {
        if lam > 1e-15 {
            h += math::entropy_term(lam);
        }
    }
    h
}
