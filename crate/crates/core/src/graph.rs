//! Weighted rooted path graphs, their balls, rooted isomorphism and the
//! local (Benjamini-Schramm) distance between rooted graphs.
//!
//! Only two shapes occur: finite paths built from a tridiagonal matrix, and
//! constant-weight bi-infinite paths (the local limits). Vertices are
//! integers; a finite path uses `0..n`, the bi-infinite path uses all of `Z`.
//! Path edges are structural: an edge of weight zero is still an edge.

use std::collections::BTreeMap;

use crate::ensembles::{LimitWeights, TridiagonalMatrix};
use crate::error::{param_err, Error, Result};
use crate::sampling::RngStream;

pub type Vertex = i64;

/// Two path neighbours plus the self-loop.
pub const PATH_DEGREE_BOUND: usize = 3;

#[derive(Debug, Clone, PartialEq)]
enum Topology {
    FinitePath { loops: Vec<f64>, edges: Vec<f64> },
    BiInfinitePath { loop_weight: f64, edge_weight: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRootedGraph {
    topology: Topology,
    root: Vertex,
    weight_bound: f64,
}

impl WeightedRootedGraph {
    /// Finite path whose loops are the diagonal and edges the off-diagonal of
    /// `t`, rooted at vertex 0.
    pub fn from_tridiagonal(t: &TridiagonalMatrix) -> Self {
        Self {
            topology: Topology::FinitePath {
                loops: t.diag().to_vec(),
                edges: t.offdiag().to_vec(),
            },
            root: 0,
            weight_bound: t.max_abs_entry(),
        }
    }

    /// Constant-weight bi-infinite path rooted at vertex 0.
    pub fn bi_infinite(weights: LimitWeights) -> Self {
        Self {
            topology: Topology::BiInfinitePath {
                loop_weight: weights.loop_weight,
                edge_weight: weights.edge_weight,
            },
            root: 0,
            weight_bound: weights.loop_weight.abs().max(weights.edge_weight.abs()),
        }
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.topology, Topology::FinitePath { .. })
    }

    /// Number of vertices, `None` for the bi-infinite path.
    pub fn vertex_count(&self) -> Option<usize> {
        match &self.topology {
            Topology::FinitePath { loops, .. } => Some(loops.len()),
            Topology::BiInfinitePath { .. } => None,
        }
    }

    pub fn degree_bound(&self) -> usize {
        PATH_DEGREE_BOUND
    }

    /// Bound `M_w` on the absolute value of every loop and edge weight.
    pub fn weight_bound(&self) -> f64 {
        self.weight_bound
    }

    pub fn contains(&self, v: Vertex) -> bool {
        match &self.topology {
            Topology::FinitePath { loops, .. } => v >= 0 && (v as usize) < loops.len(),
            Topology::BiInfinitePath { .. } => true,
        }
    }

    pub fn loop_weight(&self, v: Vertex) -> Option<f64> {
        if !self.contains(v) {
            return None;
        }
        Some(match &self.topology {
            Topology::FinitePath { loops, .. } => loops[v as usize],
            Topology::BiInfinitePath { loop_weight, .. } => *loop_weight,
        })
    }

    /// Weight of the edge `{v, v + 1}`, if both ends exist.
    pub fn edge_weight(&self, v: Vertex) -> Option<f64> {
        if !(self.contains(v) && self.contains(v + 1)) {
            return None;
        }
        Some(match &self.topology {
            Topology::FinitePath { edges, .. } => edges[v as usize],
            Topology::BiInfinitePath { edge_weight, .. } => *edge_weight,
        })
    }

    pub fn with_root(&self, root: Vertex) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::UnsupportedRegime(
                "the bi-infinite path is rooted at 0 by construction".into(),
            ));
        }
        if !self.contains(root) {
            return param_err(format!("root {root} is not a vertex"));
        }
        Ok(Self {
            root,
            ..self.clone()
        })
    }

    /// Re-root at a vertex drawn uniformly from a finite graph.
    pub fn choose_root_uniform(&self, stream: &mut RngStream) -> Result<Self> {
        let n = self.vertex_count().ok_or_else(|| {
            Error::UnsupportedRegime("uniform rooting needs a finite graph".into())
        })?;
        self.with_root(stream.uniform_index(n) as Vertex)
    }

    /// Induced subgraph on the vertices within `r` hops of the root.
    pub fn ball(&self, r: usize) -> RootedBall {
        let r = r as Vertex;
        let (lo, hi) = match &self.topology {
            Topology::FinitePath { loops, .. } => (
                (self.root - r).max(0),
                (self.root + r).min(loops.len() as Vertex - 1),
            ),
            Topology::BiInfinitePath { .. } => (self.root - r, self.root + r),
        };
        let loops = (lo..=hi).map(|v| self.loop_weight(v).unwrap()).collect();
        let edges = (lo..hi).map(|v| self.edge_weight(v).unwrap()).collect();
        RootedBall {
            radius: r as usize,
            loops,
            edges,
            root_pos: (self.root - lo) as usize,
        }
    }

    /// `[A f](v)`: loop weight times `f(v)` plus edge-weighted neighbour values.
    pub fn apply_adjacency(&self, f: &VertexFunction, v: Vertex) -> f64 {
        let Some(lw) = self.loop_weight(v) else {
            return 0.0;
        };
        let mut acc = lw * f.get(v);
        if let Some(w) = self.edge_weight(v - 1) {
            acc += w * f.get(v - 1);
        }
        if let Some(w) = self.edge_weight(v) {
            acc += w * f.get(v + 1);
        }
        acc
    }
}

/// A finitely supported real function on vertices; absent keys are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VertexFunction(BTreeMap<Vertex, f64>);

impl VertexFunction {
    pub fn indicator(v: Vertex) -> Self {
        Self(BTreeMap::from([(v, 1.0)]))
    }

    pub fn from_dense(values: &[f64]) -> Self {
        Self(
            values
                .iter()
                .enumerate()
                .map(|(i, &x)| (i as Vertex, x))
                .collect(),
        )
    }

    pub fn set(&mut self, v: Vertex, value: f64) {
        self.0.insert(v, value);
    }

    pub fn get(&self, v: Vertex) -> f64 {
        self.0.get(&v).copied().unwrap_or(0.0)
    }
}

/// Ball of radius `radius` around the root: a path stored left to right with
/// the root at `root_pos`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedBall {
    pub radius: usize,
    pub loops: Vec<f64>,
    pub edges: Vec<f64>,
    pub root_pos: usize,
}

impl RootedBall {
    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    /// Same ball read right to left.
    pub fn reflected(&self) -> RootedBall {
        RootedBall {
            radius: self.radius,
            loops: self.loops.iter().rev().copied().collect(),
            edges: self.edges.iter().rev().copied().collect(),
            root_pos: self.loops.len() - 1 - self.root_pos,
        }
    }

    fn matches(&self, other: &RootedBall, tol: f64) -> bool {
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol);
        self.root_pos == other.root_pos
            && self.loops.len() == other.loops.len()
            && close(&self.loops, &other.loops)
            && close(&self.edges, &other.edges)
    }
}

/// Whether a root-preserving isomorphism maps every weight of `a` to the
/// corresponding weight of `b` within `tol`. A rooted path admits exactly two
/// candidate maps: the identity orientation and the reflection.
pub fn rooted_isomorphic(a: &RootedBall, b: &RootedBall, tol: f64) -> Result<bool> {
    if a.radius != b.radius {
        return param_err(format!("ball radii differ: {} vs {}", a.radius, b.radius));
    }
    if !(tol >= 0.0) {
        return param_err(format!("tolerance must be nonnegative, got {tol}"));
    }
    Ok(a.matches(b, tol) || a.matches(&b.reflected(), tol))
}

/// `2^-k` where `k` is the largest radius `<= r_max` at which the balls are
/// isomorphic. Returns 0 when they agree up to `r_max` (the true distance is
/// then at most `2^-r_max`), and 2 when even the roots' loops disagree.
pub fn graph_distance(
    g1: &WeightedRootedGraph,
    g2: &WeightedRootedGraph,
    r_max: usize,
    tol: f64,
) -> Result<f64> {
    if r_max == 0 {
        return param_err("r_max must be positive");
    }
    for r in 0..=r_max {
        if !rooted_isomorphic(&g1.ball(r), &g2.ball(r), tol)? {
            return Ok(2f64.powi(1 - r as i32));
        }
    }
    Ok(0.0)
}
