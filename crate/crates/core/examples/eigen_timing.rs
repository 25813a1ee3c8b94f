//! Times the eigenvalue solver on a sampled beta-Hermite matrix.
//!
//! `cargo run --release -p betagraph-core --example eigen_timing -- 100000`

use std::time::Instant;

use betagraph_core::{eigenvalues, sample_hermite, RngStream};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    let t = sample_hermite(n, 2.0, &mut RngStream::new(1, 0)).expect("valid parameters");
    let start = Instant::now();
    let ev = eigenvalues(&t);
    let elapsed = start.elapsed();
    let trace: f64 = t.diag().iter().sum();
    let sum: f64 = ev.iter().sum();
    println!(
        "n = {n}: {:.2} s, min {:.6}, max {:.6}, trace gap {:.3e}",
        elapsed.as_secs_f64(),
        ev[0],
        ev[n - 1],
        (sum - trace).abs()
    );
}
