//! Eigenvalues of tridiagonal matrices, the spectral measure at a root and
//! the expected (root-averaged) spectral measure.

mod bisect;
mod ql;

use serde::{Deserialize, Serialize};

use crate::ensembles::TridiagonalMatrix;
use crate::error::{param_err, Result};

/// Relative gap below which neighbouring eigenvalues are merged into one atom.
pub const MERGE_RELATIVE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Finite atomic measure with ascending, distinct locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMeasure {
    atoms: Vec<Atom>,
}

impl PointMeasure {
    /// Sort the atoms and merge any whose locations are within `merge_gap`
    /// of their neighbour; merged masses add up.
    pub fn from_atoms(mut atoms: Vec<Atom>, merge_gap: f64) -> Result<Self> {
        if atoms
            .iter()
            .any(|a| !a.location.is_finite() || !(a.mass >= 0.0) || !a.mass.is_finite())
        {
            return param_err("atoms need finite locations and finite nonnegative masses");
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        let mut group = 0usize;
        let mut last = f64::NAN;
        for a in atoms {
            match merged.last_mut() {
                Some(cur) if a.location - last <= merge_gap => {
                    group += 1;
                    cur.location += (a.location - cur.location) / group as f64;
                    cur.mass += a.mass;
                }
                _ => {
                    group = 1;
                    merged.push(a);
                }
            }
            last = a.location;
        }
        Ok(Self { atoms: merged })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Mass of `(-inf, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.location <= x)
            .map(|a| a.mass)
            .sum()
    }
}

fn merge_gap(t: &TridiagonalMatrix) -> f64 {
    MERGE_RELATIVE_GAP * t.norm_inf()
}

/// All `n` eigenvalues in ascending order, repeated by multiplicity.
pub fn eigenvalues(t: &TridiagonalMatrix) -> Vec<f64> {
    bisect::tridiagonal_eigenvalues(t.diag(), t.offdiag())
}

/// Atoms `(λ_m, |e_m(o)|^2)` for an orthonormal eigenbasis. Atoms with zero
/// mass (eigenvectors vanishing at `o`) are kept.
pub fn spectral_measure_at_root(t: &TridiagonalMatrix, o: usize) -> Result<PointMeasure> {
    if o >= t.n() {
        return param_err(format!("root {o} out of range for n = {}", t.n()));
    }
    let (values, row) = ql::eigen_with_row(t.diag(), t.offdiag(), o)?;
    let atoms = values
        .into_iter()
        .zip(row)
        .map(|(location, z)| Atom {
            location,
            mass: z * z,
        })
        .collect();
    PointMeasure::from_atoms(atoms, merge_gap(t))
}

/// Uniform mass `1/n` on every eigenvalue: the root average of
/// [`spectral_measure_at_root`].
pub fn expected_spectral_measure(t: &TridiagonalMatrix) -> PointMeasure {
    let w = 1.0 / t.n() as f64;
    let atoms = eigenvalues(t)
        .into_iter()
        .map(|location| Atom { location, mass: w })
        .collect();
    PointMeasure::from_atoms(atoms, merge_gap(t))
        .expect("eigenvalues of a finite matrix are finite")
}
