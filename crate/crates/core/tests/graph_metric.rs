use betagraph_core::{
    graph_distance, limit_weights, rooted_isomorphic, sample_hermite, EnsembleParams, RngStream,
    RootedBall, TridiagonalMatrix, VertexFunction, WeightedRootedGraph,
};
use proptest::prelude::*;

fn path(loops: Vec<f64>, edges: Vec<f64>, root: i64) -> WeightedRootedGraph {
    let t = TridiagonalMatrix::new(loops, edges).unwrap();
    WeightedRootedGraph::from_tridiagonal(&t)
        .with_root(root)
        .unwrap()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Rooted isomorphism by trying every vertex bijection: weighted adjacency
/// matrices must agree entry by entry, with the root fixed.
fn brute_force_isomorphic(a: &RootedBall, b: &RootedBall) -> bool {
    let k = a.len();
    if k != b.len() {
        return false;
    }
    let adjacency = |ball: &RootedBall| {
        let mut m = vec![vec![None; k]; k];
        for (i, &l) in ball.loops.iter().enumerate() {
            m[i][i] = Some(l);
        }
        for (i, &w) in ball.edges.iter().enumerate() {
            m[i][i + 1] = Some(w);
            m[i + 1][i] = Some(w);
        }
        m
    };
    let (ma, mb) = (adjacency(a), adjacency(b));
    permutations(k).into_iter().any(|p| {
        p[a.root_pos] == b.root_pos && (0..k).all(|i| (0..k).all(|j| ma[i][j] == mb[p[i]][p[j]]))
    })
}

fn weights() -> impl Strategy<Value = f64> {
    // A small value set so that coincidences, and hence isomorphisms, occur.
    prop::sample::select(vec![0.0, 1.0, 2.0])
}

fn rooted_path() -> impl Strategy<Value = WeightedRootedGraph> {
    (1usize..8)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(weights(), n),
                prop::collection::vec(weights(), n - 1),
                0..n as i64,
            )
        })
        .prop_map(|(l, e, r)| path(l, e, r))
}

proptest! {
    #[test]
    fn isomorphism_matches_brute_force(g in rooted_path(), h in rooted_path(), r in 0usize..4) {
        let (a, b) = (g.ball(r), h.ball(r));
        prop_assert_eq!(rooted_isomorphic(&a, &b, 0.0).unwrap(), brute_force_isomorphic(&a, &b));
    }

    #[test]
    fn distance_is_a_symmetric_ultrametric(
        g in rooted_path(), h in rooted_path(), k in rooted_path()
    ) {
        let d = |x: &WeightedRootedGraph, y: &WeightedRootedGraph| graph_distance(x, y, 8, 0.0).unwrap();
        prop_assert_eq!(d(&g, &h), d(&h, &g));
        prop_assert_eq!(d(&g, &g), 0.0);
        prop_assert!(d(&g, &k) <= d(&g, &h).max(d(&h, &k)));
    }

    #[test]
    fn reflection_is_an_isomorphism(g in rooted_path(), r in 0usize..5) {
        let b = g.ball(r);
        prop_assert!(rooted_isomorphic(&b, &b.reflected(), 0.0).unwrap());
    }
}

#[test]
fn first_difference_at_hop_three() {
    let base = vec![1.0; 9];
    let mut other = base.clone();
    other[7] = 5.0;
    let g = path(base, vec![1.0; 8], 4);
    let h = path(other, vec![1.0; 8], 4);
    assert_eq!(graph_distance(&g, &h, 6, 0.0).unwrap(), 0.25);
}

#[test]
fn finite_ball_matches_bi_infinite_limit_in_the_interior() {
    let params = EnsembleParams::hermite(2.0).unwrap();
    let w = limit_weights(&params, 0.5).unwrap();
    let limit = WeightedRootedGraph::bi_infinite(w);
    let n = 11;
    let g = path(vec![0.0; n], vec![w.edge_weight; n - 1], 5);
    assert_eq!(graph_distance(&g, &limit, 5, 0.0).unwrap(), 0.0);
    // At radius 6 the finite path runs out of vertices.
    assert_eq!(graph_distance(&g, &limit, 6, 0.0).unwrap(), 2f64.powi(-5));
}

#[test]
fn adjacency_operator_matches_matvec() {
    let t = sample_hermite(40, 1.0, &mut RngStream::new(31, 0)).unwrap();
    let g = WeightedRootedGraph::from_tridiagonal(&t);
    let f: Vec<f64> = (0..40).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
    let af = t.matvec(&f);
    let vf = VertexFunction::from_dense(&f);
    for v in 0..40 {
        assert!((g.apply_adjacency(&vf, v) - af[v as usize]).abs() <= 1e-14);
    }
    assert_eq!(g.apply_adjacency(&vf, 40), 0.0);
    assert_eq!(g.apply_adjacency(&vf, -1), 0.0);
}

#[test]
fn uniform_root_frequencies() {
    let n = 10;
    let draws = 100_000;
    let g = path(vec![0.0; n], vec![1.0; n - 1], 0);
    let mut s = RngStream::new(32, 0);
    let mut counts = vec![0usize; n];
    for _ in 0..draws {
        counts[g.choose_root_uniform(&mut s).unwrap().root() as usize] += 1;
    }
    let p = 1.0 / n as f64;
    let se = (draws as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - draws as f64 * p).abs() <= 5.0 * se, "{c}");
    }
}

#[test]
fn generated_corpus_is_ultrametric() {
    // 100 paths drawn with few distinct weights, checked over all triples.
    let mut s = RngStream::new(33, 0);
    let corpus: Vec<WeightedRootedGraph> = (0..100)
        .map(|_| {
            let n = 1 + s.uniform_index(9);
            let loops = (0..n).map(|_| s.uniform_index(2) as f64).collect();
            let edges = (0..n - 1)
                .map(|_| 1.0 + s.uniform_index(2) as f64)
                .collect();
            let root = s.uniform_index(n) as i64;
            path(loops, edges, root)
        })
        .collect();
    let d: Vec<Vec<f64>> = corpus
        .iter()
        .map(|g| {
            corpus
                .iter()
                .map(|h| graph_distance(g, h, 10, 0.0).unwrap())
                .collect()
        })
        .collect();
    for i in 0..100 {
        assert_eq!(d[i][i], 0.0);
        for j in 0..100 {
            assert_eq!(d[i][j], d[j][i]);
            for k in 0..100 {
                assert!(d[i][k] <= d[i][j].max(d[j][k]));
            }
        }
    }
}
