//! Implicit QL with Wilkinson shifts, accumulating a single row of the
//! eigenvector matrix. Row `o` of `Z` in `T = Z diag(λ) Z^T` holds `e_m(o)`
//! for every eigenpair, which is all a spectral measure at `o` needs.

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues (unsorted) and the matching `o`-th eigenvector components.
pub(crate) fn eigen_with_row(
    diag: &[f64],
    offdiag: &[f64],
    o: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[o] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::Accuracy {
                    tol: f64::EPSILON,
                    estimate: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_path_weights() {
        let (d, z) = eigen_with_row(&[0.0, 0.0], &[1.0], 0).unwrap();
        let mut pairs: Vec<_> = d.iter().zip(&z).map(|(l, v)| (*l, v * v)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((pairs[0].0 + 1.0).abs() < 1e-15 && (pairs[0].1 - 0.5).abs() < 1e-15);
        assert!((pairs[1].0 - 1.0).abs() < 1e-15 && (pairs[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn row_norm_is_one() {
        let diag: Vec<f64> = (0..40).map(|i| ((i * 7) % 11) as f64 * 0.3 - 1.0).collect();
        let off: Vec<f64> = (0..39).map(|i| 0.5 + ((i * 3) % 5) as f64 * 0.1).collect();
        for o in [0, 17, 39] {
            let (_, z) = eigen_with_row(&diag, &off, o).unwrap();
            let norm: f64 = z.iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-13);
        }
    }
}
