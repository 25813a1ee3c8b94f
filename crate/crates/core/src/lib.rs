//! Beta-Hermite and beta-Laguerre tridiagonal random matrices viewed as
//! weighted rooted path graphs.
//!
//! The crate samples the ensembles, computes spectra and spectral measures at
//! a root, evaluates the semicircle and Marchenko-Pastur limits together with
//! the arcsine-type laws of the local limit paths, and measures how fast the
//! finite matrices approach those limits, both globally (eigenvalue KS
//! distances) and locally (statistics of balls around uniform roots).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod ensembles;
pub mod error;
pub mod graph;
pub mod limits;
pub mod quadrature;
pub mod sampling;
pub mod spectral;

pub use diagnostics::{
    ball_statistics, convergence_sweep, histogram, ks_statistic, ks_statistic_with, ks_two_sample,
    BallStatistics, ConvergenceReport, ConvergenceRow, Histogram,
};
pub use ensembles::{
    limit_weights, sample_hermite, sample_laguerre, EnsembleKind, EnsembleParams, LimitWeights,
    TridiagonalMatrix,
};
pub use error::{Error, Result};
pub use graph::{
    graph_distance, rooted_isomorphic, RootedBall, VertexFunction, WeightedRootedGraph,
};
pub use limits::{
    expected_density_numeric, laguerre_u_max, mode_eigenvalue, ContinuousLaw, LawFamily,
    DEFAULT_QUAD_TOL,
};
pub use sampling::{sample_chi, sample_chi_square, sample_normal, RngStream};
pub use spectral::{
    eigenvalues, expected_spectral_measure, spectral_measure_at_root, Atom, PointMeasure,
};
