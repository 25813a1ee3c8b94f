//! Beta-Hermite and beta-Laguerre tridiagonal models and the constant edge
//! and loop weights of their local limits.
//!
//! Index mapping (mathematical index on the left, storage position on the right):
//!
//! * Hermite: `a_j -> diag[j - 1]` for `j = 1..=n`, `b_j -> offdiag[j - 1]` for `j = 1..n`.
//! * Laguerre: `a_j -> diag[j]` for `j = 0..n`, `b_j -> offdiag[j - 1]` for `j = 1..n`.

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::limits::ContinuousLaw;
use crate::sampling::{sample_chi, sample_chi_square, sample_normal, RngStream};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return param_err("tridiagonal matrix must have at least one row");
        }
        if offdiag.len() + 1 != diag.len() {
            return param_err(format!(
                "off-diagonal length {} does not match size {}",
                offdiag.len(),
                diag.len()
            ));
        }
        if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
            return param_err("tridiagonal entries must be finite");
        }
        Ok(Self { diag, offdiag })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.offdiag[i - 1].abs()
                } else {
                    0.0
                };
                let right = if i + 1 < n {
                    self.offdiag[i].abs()
                } else {
                    0.0
                };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry.
    pub fn max_abs_entry(&self) -> f64 {
        self.diag
            .iter()
            .chain(self.offdiag.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matvec(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n(), "vector length must match matrix size");
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * f[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * f[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * f[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Leading principal submatrix of size `k`.
    pub fn leading(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n() {
            return param_err(format!(
                "leading block size {k} out of range 1..={}",
                self.n()
            ));
        }
        Self::new(self.diag[..k].to_vec(), self.offdiag[..k - 1].to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Hermite,
    Laguerre,
}

/// Ensemble parameters. Construct through [`EnsembleParams::hermite`] or
/// [`EnsembleParams::laguerre`] so the invariants are checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnsembleParams {
    Hermite { beta: f64 },
    Laguerre { beta: f64, gamma: f64 },
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        param_err(format!("beta must be finite and positive, got {beta}"))
    }
}

impl EnsembleParams {
    pub fn hermite(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self::Hermite { beta })
    }

    pub fn laguerre(beta: f64, gamma: f64) -> Result<Self> {
        check_beta(beta)?;
        if !gamma.is_finite() {
            return param_err(format!("gamma must be finite, got {gamma}"));
        }
        if gamma < 1.0 {
            return Err(Error::UnsupportedRegime(format!(
                "gamma = {gamma} < 1 needs a different tridiagonal form"
            )));
        }
        Ok(Self::Laguerre { beta, gamma })
    }

    pub fn kind(&self) -> EnsembleKind {
        match self {
            Self::Hermite { .. } => EnsembleKind::Hermite,
            Self::Laguerre { .. } => EnsembleKind::Laguerre,
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Self::Hermite { beta } | Self::Laguerre { beta, .. } => beta,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            Self::Hermite { .. } => None,
            Self::Laguerre { gamma, .. } => Some(gamma),
        }
    }

    /// Smallest matrix size the ensemble is defined for.
    pub fn min_size(&self) -> usize {
        match self {
            Self::Hermite { .. } => 1,
            Self::Laguerre { .. } => 2,
        }
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if n < self.min_size() {
            return param_err(format!(
                "{:?} ensemble needs n >= {}, got {n}",
                self.kind(),
                self.min_size()
            ));
        }
        Ok(())
    }

    /// Draw the diagonal entry at storage position `pos` of an `n x n` matrix.
    pub fn sample_diag_entry(&self, n: usize, pos: usize, stream: &mut RngStream) -> Result<f64> {
        self.check_size(n)?;
        if pos >= n {
            return param_err(format!("diagonal position {pos} out of range for n = {n}"));
        }
        let nf = n as f64;
        match *self {
            Self::Hermite { .. } => Ok(sample_normal(stream, 0.0, 2f64.sqrt())? / nf.sqrt()),
            Self::Laguerre { beta, gamma } => {
                let two_alpha = beta * gamma * (nf - 1.0);
                let dof = if pos == 0 {
                    two_alpha
                } else {
                    two_alpha + beta * (nf - 2.0 * pos as f64)
                };
                Ok(sample_chi_square(stream, dof)? / nf)
            }
        }
    }

    /// Draw the off-diagonal entry at storage position `pos` (coupling rows
    /// `pos` and `pos + 1`) of an `n x n` matrix.
    pub fn sample_offdiag_entry(
        &self,
        n: usize,
        pos: usize,
        stream: &mut RngStream,
    ) -> Result<f64> {
        self.check_size(n)?;
        if pos + 1 >= n {
            return param_err(format!(
                "off-diagonal position {pos} out of range for n = {n}"
            ));
        }
        let nf = n as f64;
        let j = (pos + 1) as f64;
        match *self {
            Self::Hermite { beta } => Ok(sample_chi(stream, beta * j)? / nf.sqrt()),
            Self::Laguerre { beta, gamma } => {
                let two_alpha = beta * gamma * (nf - 1.0);
                let left = sample_chi(stream, two_alpha - beta * (j - 1.0))?;
                let right = sample_chi(stream, beta * (nf - j))?;
                Ok(left * right / nf)
            }
        }
    }

    /// Draw a full `n x n` matrix: all diagonal entries in order, then all
    /// off-diagonal entries in order.
    pub fn sample(&self, n: usize, stream: &mut RngStream) -> Result<TridiagonalMatrix> {
        self.check_size(n)?;
        let diag = (0..n)
            .map(|i| self.sample_diag_entry(n, i, stream))
            .collect::<Result<Vec<_>>>()?;
        let offdiag = (0..n - 1)
            .map(|i| self.sample_offdiag_entry(n, i, stream))
            .collect::<Result<Vec<_>>>()?;
        TridiagonalMatrix::new(diag, offdiag)
    }

    /// The semicircle or Marchenko-Pastur law this ensemble converges to.
    pub fn limit_law(&self) -> ContinuousLaw {
        match *self {
            Self::Hermite { beta } => ContinuousLaw::semicircle(beta),
            Self::Laguerre { beta, gamma } => ContinuousLaw::marchenko_pastur(beta, gamma),
        }
        .expect("ensemble parameters are validated at construction")
    }
}

/// Constant weights of the bi-infinite limit path seen from a root at
/// relative position `u` along the finite path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitWeights {
    pub loop_weight: f64,
    pub edge_weight: f64,
    pub u: f64,
}

pub fn sample_hermite(n: usize, beta: f64, stream: &mut RngStream) -> Result<TridiagonalMatrix> {
    EnsembleParams::hermite(beta)?.sample(n, stream)
}

pub fn sample_laguerre(
    n: usize,
    beta: f64,
    gamma: f64,
    stream: &mut RngStream,
) -> Result<TridiagonalMatrix> {
    EnsembleParams::laguerre(beta, gamma)?.sample(n, stream)
}

pub fn limit_weights(params: &EnsembleParams, u: f64) -> Result<LimitWeights> {
    if !(0.0..=1.0).contains(&u) {
        return param_err(format!("root parameter u must lie in [0, 1], got {u}"));
    }
    Ok(match *params {
        EnsembleParams::Hermite { beta } => LimitWeights {
            loop_weight: 0.0,
            edge_weight: (beta * u).sqrt(),
            u,
        },
        EnsembleParams::Laguerre { beta, gamma } => LimitWeights {
            loop_weight: beta * (gamma + 1.0 - 2.0 * u),
            edge_weight: beta * (gamma - u).sqrt() * (1.0 - u).sqrt(),
            u,
        },
    })
}
