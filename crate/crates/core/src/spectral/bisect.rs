//! All eigenvalues of a symmetric tridiagonal matrix.
//!
//! Each unreduced block is scaled by a power of two so its Gershgorin radius
//! is at most one. Eigenvalues are isolated by multisection on Sturm counts,
//! then each isolating interval is shrunk by safeguarded Newton steps on the
//! characteristic polynomial. Both phases evaluate `LANES` shifts per sweep
//! through a division-free three-term recurrence so the sweeps vectorize.

use rayon::prelude::*;

const LANES: usize = 32;
const RESCALE_EVERY: usize = 8;
const MAX_NEWTON_STEPS: usize = 60;
const REFINE_CHUNK: usize = 2048;

// Exact power-of-two rescaling for the determinant recurrence.
const BIG: f64 = 2.586_880_919_130_689_4e120; // 2^400
const SMALL: f64 = 3.865_659_279_999_539_6e-121; // 2^-400

type Lanes = [f64; LANES];

#[derive(Debug, Clone, Copy)]
struct Interval {
    lo: f64,
    hi: f64,
    count_lo: u32,
    count_hi: u32,
}

struct Block<'a> {
    diag: &'a [f64],
    off2: &'a [f64],
    pivmin: f64,
}

/// Sorted eigenvalues of the matrix with the given diagonal and off-diagonal.
pub(crate) fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    for i in 0..n {
        if i + 1 == n || offdiag[i] == 0.0 {
            block_eigenvalues(&diag[start..=i], &offdiag[start..i], &mut out);
            start = i + 1;
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn gershgorin(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let m = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let r = if i > 0 { offdiag[i - 1].abs() } else { 0.0 }
            + if i + 1 < m { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

fn block_eigenvalues(diag: &[f64], offdiag: &[f64], out: &mut Vec<f64>) {
    let m = diag.len();
    if m == 1 {
        out.push(diag[0]);
        return;
    }
    let (glo, ghi) = gershgorin(diag, offdiag);
    let radius = glo.abs().max(ghi.abs());
    let scale = 2f64.powi(-(radius.log2().ceil() as i32));
    let d: Vec<f64> = diag.iter().map(|v| v * scale).collect();
    let off2: Vec<f64> = offdiag.iter().map(|v| (v * scale) * (v * scale)).collect();
    let max_off2 = off2.iter().fold(0.0f64, |a, &b| a.max(b));
    let block = Block {
        diag: &d,
        off2: &off2,
        pivmin: f64::MIN_POSITIVE * max_off2.max(1.0),
    };

    let norm = (radius * scale).max(f64::MIN_POSITIVE);
    let tol = 4.0 * f64::EPSILON * norm;
    let fudge = 2.0 * f64::EPSILON * norm * m as f64 + 2.0 * block.pivmin;
    let mut lo = glo * scale - fudge;
    let mut hi = ghi * scale + fudge;
    while sturm_count(&block, lo) > 0 {
        lo -= (hi - lo).max(fudge);
    }
    while (sturm_count(&block, hi) as usize) < m {
        hi += (hi - lo).max(fudge);
    }

    let mut found = Vec::new();
    let isolated = isolate(
        &block,
        Interval {
            lo,
            hi,
            count_lo: 0,
            count_hi: m as u32,
        },
        tol,
        &mut found,
    );
    let refined: Vec<f64> = isolated
        .par_chunks(REFINE_CHUNK)
        .flat_map_iter(|chunk| refine(&block, chunk, tol))
        .collect();
    out.extend(found.into_iter().chain(refined).map(|x| x / scale));
}

/// Number of eigenvalues below `x`, from the LDLᵀ pivots with `pivmin`
/// guarding against zero pivots.
fn sturm_count(b: &Block, x: f64) -> u32 {
    let pivmin = b.pivmin;
    let mut q = b.diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    let mut count = (q < 0.0) as u32;
    for (&a, &e2) in b.diag[1..].iter().zip(b.off2) {
        q = (a - x) - e2 / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        count += (q < 0.0) as u32;
    }
    count
}

#[inline(always)]
fn fms<const FMA: bool>(a: f64, b: f64, c: f64) -> f64 {
    // a * b - c
    if FMA {
        a.mul_add(b, -c)
    } else {
        a * b - c
    }
}

#[inline(always)]
fn rescale_factor(m: f64) -> f64 {
    if m > BIG {
        SMALL
    } else if m < SMALL && m > 0.0 {
        BIG
    } else {
        1.0
    }
}

/// Sign changes of the leading principal minors of `T - x` for each lane,
/// and whether any minor was exactly zero (the count is then unreliable).
#[inline(always)]
fn counts_body<const FMA: bool>(b: &Block, xs: &Lanes) -> ([u32; LANES], [bool; LANES]) {
    let mut pp = [1.0f64; LANES];
    let mut p = [0.0f64; LANES];
    let mut count = [0u64; LANES];
    let mut zero = [0u64; LANES];
    for l in 0..LANES {
        p[l] = b.diag[0] - xs[l];
        count[l] = p[l].to_bits() >> 63;
        zero[l] = (p[l] == 0.0) as u64;
    }
    for (ds, es) in b.diag[1..]
        .chunks(RESCALE_EVERY)
        .zip(b.off2.chunks(RESCALE_EVERY))
    {
        for (&a, &e2) in ds.iter().zip(es) {
            for l in 0..LANES {
                let next = fms::<FMA>(a - xs[l], p[l], e2 * pp[l]);
                count[l] = count[l].wrapping_add((next.to_bits() ^ p[l].to_bits()) >> 63);
                zero[l] |= (next == 0.0) as u64;
                pp[l] = p[l];
                p[l] = next;
            }
        }
        for l in 0..LANES {
            let s = rescale_factor(p[l].abs().max(pp[l].abs()));
            p[l] *= s;
            pp[l] *= s;
        }
    }
    (count.map(|c| c as u32), zero.map(|z| z != 0))
}

/// `det(T - x)` and its derivative in `x` for each lane, sharing one
/// positive scale factor.
#[inline(always)]
fn newton_body<const FMA: bool>(b: &Block, xs: &Lanes) -> (Lanes, Lanes) {
    let mut pp = [1.0f64; LANES];
    let mut p = [0.0f64; LANES];
    let mut dpp = [0.0f64; LANES];
    let mut dp = [-1.0f64; LANES];
    for l in 0..LANES {
        p[l] = b.diag[0] - xs[l];
    }
    for (ds, es) in b.diag[1..]
        .chunks(RESCALE_EVERY)
        .zip(b.off2.chunks(RESCALE_EVERY))
    {
        for (&a, &e2) in ds.iter().zip(es) {
            for l in 0..LANES {
                let t = a - xs[l];
                let next = fms::<FMA>(t, p[l], e2 * pp[l]);
                let dnext = fms::<FMA>(t, dp[l], fms::<FMA>(e2, dpp[l], -p[l]));
                pp[l] = p[l];
                p[l] = next;
                dpp[l] = dp[l];
                dp[l] = dnext;
            }
        }
        for l in 0..LANES {
            let m = p[l]
                .abs()
                .max(pp[l].abs())
                .max(dp[l].abs())
                .max(dpp[l].abs());
            let s = rescale_factor(m);
            p[l] *= s;
            pp[l] *= s;
            dp[l] *= s;
            dpp[l] *= s;
        }
    }
    (p, dp)
}

#[cfg(target_arch = "x86_64")]
mod x86 {
    use super::{counts_body, newton_body, Block, Lanes, LANES};

    #[target_feature(enable = "avx512f,avx512vl,avx512dq,fma")]
    pub(super) unsafe fn counts_avx512(b: &Block, xs: &Lanes) -> ([u32; LANES], [bool; LANES]) {
        counts_body::<true>(b, xs)
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn counts_avx2(b: &Block, xs: &Lanes) -> ([u32; LANES], [bool; LANES]) {
        counts_body::<true>(b, xs)
    }

    #[target_feature(enable = "avx512f,avx512vl,avx512dq,fma")]
    pub(super) unsafe fn newton_avx512(b: &Block, xs: &Lanes) -> (Lanes, Lanes) {
        newton_body::<true>(b, xs)
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn newton_avx2(b: &Block, xs: &Lanes) -> (Lanes, Lanes) {
        newton_body::<true>(b, xs)
    }

    pub(super) fn has_avx512() -> bool {
        is_x86_feature_detected!("avx512f")
            && is_x86_feature_detected!("avx512vl")
            && is_x86_feature_detected!("avx512dq")
            && is_x86_feature_detected!("fma")
    }

    pub(super) fn has_avx2() -> bool {
        is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma")
    }
}

/// Eigenvalue counts below each shift, exact even when a minor vanishes.
fn sturm_counts(b: &Block, xs: &Lanes) -> [u32; LANES] {
    #[cfg(target_arch = "x86_64")]
    let (mut count, zero) = if x86::has_avx512() {
        // SAFETY: the required CPU features were detected at runtime.
        unsafe { x86::counts_avx512(b, xs) }
    } else if x86::has_avx2() {
        // SAFETY: as above.
        unsafe { x86::counts_avx2(b, xs) }
    } else {
        counts_body::<false>(b, xs)
    };
    #[cfg(not(target_arch = "x86_64"))]
    let (mut count, zero) = counts_body::<false>(b, xs);
    for l in 0..LANES {
        if zero[l] {
            count[l] = sturm_count(b, xs[l]);
        }
    }
    count
}

fn newton_terms(b: &Block, xs: &Lanes) -> (Lanes, Lanes) {
    #[cfg(target_arch = "x86_64")]
    {
        if x86::has_avx512() {
            // SAFETY: the required CPU features were detected at runtime.
            return unsafe { x86::newton_avx512(b, xs) };
        }
        if x86::has_avx2() {
            // SAFETY: as above.
            return unsafe { x86::newton_avx2(b, xs) };
        }
    }
    newton_body::<false>(b, xs)
}

/// Evaluate counts at many shifts, `LANES` at a time.
fn batched_counts(b: &Block, xs: &[f64]) -> Vec<u32> {
    let mut out = Vec::with_capacity(xs.len());
    for chunk in xs.chunks(LANES) {
        let mut lanes = [chunk[0]; LANES];
        lanes[..chunk.len()].copy_from_slice(chunk);
        out.extend_from_slice(&sturm_counts(b, &lanes)[..chunk.len()]);
    }
    out
}

/// Multisection until every interval holds one eigenvalue. Intervals that
/// shrink below `tol` while still holding several are emitted into `found`
/// with their multiplicity.
fn isolate(b: &Block, start: Interval, tol: f64, found: &mut Vec<f64>) -> Vec<Interval> {
    let mut isolated = Vec::new();
    let mut pending = vec![start];
    while !pending.is_empty() {
        let mut shifts = Vec::new();
        let mut pieces = Vec::with_capacity(pending.len());
        for iv in &pending {
            let k = (iv.count_hi - iv.count_lo) as usize;
            let parts = 3 * k / 2 + 1;
            let w = iv.hi - iv.lo;
            let first = shifts.len();
            for j in 1..parts {
                shifts.push(iv.lo + w * j as f64 / parts as f64);
            }
            pieces.push(first..shifts.len());
        }
        let counts = batched_counts(b, &shifts);
        let mut next = Vec::new();
        for (iv, range) in pending.iter().zip(pieces) {
            let mut lo = iv.lo;
            let mut clo = iv.count_lo;
            let cuts = range
                .map(|i| (shifts[i], counts[i].clamp(iv.count_lo, iv.count_hi)))
                .chain(std::iter::once((iv.hi, iv.count_hi)));
            for (x, c) in cuts {
                let c = c.max(clo);
                let child = Interval {
                    lo,
                    hi: x,
                    count_lo: clo,
                    count_hi: c,
                };
                match c - clo {
                    0 => {}
                    1 => isolated.push(child),
                    k if x - lo <= tol => {
                        found.extend(std::iter::repeat_n(0.5 * (lo + x), k as usize))
                    }
                    _ => next.push(child),
                }
                lo = x;
                clo = c;
            }
        }
        pending = next;
    }
    isolated
}

#[derive(Debug, Clone, Copy)]
struct Newton {
    lo: f64,
    hi: f64,
    x: f64,
    // Newton steps last computed at `lo` and `hi`.
    step_lo: f64,
    step_hi: f64,
    // Sign of the characteristic polynomial just right of `lo`.
    sign_lo: f64,
    // Converged candidate awaiting a probe on the far side of the root.
    candidate: Option<f64>,
    // Bracket width when the last halving check started, and steps since.
    width_ref: f64,
    since_ref: usize,
    steps: usize,
    interval: Interval,
}

enum Update {
    Continue,
    Done(f64),
    Fallback,
}

impl Newton {
    fn new(iv: Interval) -> Self {
        Newton {
            lo: iv.lo,
            hi: iv.hi,
            x: 0.5 * (iv.lo + iv.hi),
            step_lo: f64::NAN,
            step_hi: f64::NAN,
            sign_lo: if iv.count_lo.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            },
            candidate: None,
            width_ref: iv.hi - iv.lo,
            since_ref: 0,
            steps: 0,
            interval: iv,
        }
    }

    fn update(&mut self, p: f64, dp: f64, tol: f64, guard: f64) -> Update {
        self.steps += 1;
        if !p.is_finite() || !dp.is_finite() || self.steps > MAX_NEWTON_STEPS {
            return Update::Fallback;
        }
        if p == 0.0 {
            return Update::Done(self.x);
        }
        let step = if dp != 0.0 { p / dp } else { f64::NAN };
        if p.signum() == self.sign_lo {
            self.lo = self.x;
            self.step_lo = step;
        } else {
            self.hi = self.x;
            self.step_hi = step;
        }
        if let Some(c) = self.candidate.take() {
            if self.hi - self.lo <= 4.0 * tol && c >= self.lo && c <= self.hi {
                return Update::Done(c);
            }
        }
        if self.hi - self.lo <= tol {
            return Update::Done(0.5 * (self.lo + self.hi));
        }
        if step.abs() <= tol {
            let c = (self.x - step).clamp(self.lo, self.hi);
            // Far from the isolating bounds the other roots cannot mask a
            // distant root, so a tiny step already pins it within `2 tol`.
            if self.x - self.interval.lo > guard && self.interval.hi - self.x > guard {
                return Update::Done(c);
            }
            // Otherwise probe just beyond the root so the bracket closes.
            let probe = (c - tol * step.signum()).clamp(self.lo, self.hi);
            if probe == self.lo || probe == self.hi {
                return Update::Done(c);
            }
            self.candidate = Some(c);
            self.x = probe;
            return Update::Continue;
        }

        let mid = 0.5 * (self.lo + self.hi);
        self.since_ref += 1;
        let next = if self.since_ref > 3 && self.hi - self.lo > 0.5 * self.width_ref {
            mid
        } else {
            [
                self.x - step,
                self.lo - self.step_lo,
                self.hi - self.step_hi,
            ]
            .into_iter()
            .find(|g| *g > self.lo && *g < self.hi)
            .unwrap_or(mid)
        };
        if self.hi - self.lo <= 0.5 * self.width_ref || next == mid {
            self.width_ref = self.hi - self.lo;
            self.since_ref = 0;
        }
        self.x = next;
        Update::Continue
    }
}

/// Refine isolating intervals, keeping every lane busy by refilling a slot
/// as soon as its interval converges.
fn refine(b: &Block, intervals: &[Interval], tol: f64) -> Vec<f64> {
    let guard = 2.0 * b.diag.len() as f64 * tol;
    let mut out = Vec::with_capacity(intervals.len());
    let mut queue = intervals.iter();
    let mut slots: [Option<Newton>; LANES] = [None; LANES];
    loop {
        for slot in slots.iter_mut().filter(|s| s.is_none()) {
            match queue.next() {
                Some(iv) => *slot = Some(Newton::new(*iv)),
                None => break,
            }
        }
        let Some(fill) = slots.iter().flatten().next().map(|s| s.x) else {
            break;
        };
        let mut xs = [fill; LANES];
        for (x, s) in xs.iter_mut().zip(&slots) {
            if let Some(s) = s {
                *x = s.x;
            }
        }
        let (p, dp) = newton_terms(b, &xs);
        for l in 0..LANES {
            let Some(state) = slots[l].as_mut() else {
                continue;
            };
            match state.update(p[l], dp[l], tol, guard) {
                Update::Continue => {}
                Update::Done(x) => {
                    out.push(x);
                    slots[l] = None;
                }
                Update::Fallback => {
                    let mut iv = state.interval;
                    iv.lo = iv.lo.max(state.lo);
                    iv.hi = iv.hi.min(state.hi);
                    out.push(bisect_with_counts(b, iv, tol));
                    slots[l] = None;
                }
            }
        }
    }
    out
}

fn bisect_with_counts(b: &Block, mut iv: Interval, tol: f64) -> f64 {
    while iv.hi - iv.lo > tol {
        let mid = 0.5 * (iv.lo + iv.hi);
        if mid <= iv.lo || mid >= iv.hi {
            break;
        }
        if sturm_count(b, mid) > iv.count_lo {
            iv.hi = mid;
        } else {
            iv.lo = mid;
        }
    }
    0.5 * (iv.lo + iv.hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let ev = tridiagonal_eigenvalues(&[0.0, 0.0], &[1.0]);
        assert!(
            (ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15,
            "{ev:?}"
        );
    }

    #[test]
    fn split_blocks_and_multiplicity() {
        let ev = tridiagonal_eigenvalues(&[2.0, 2.0, 2.0], &[0.0, 0.0]);
        assert_eq!(ev, vec![2.0, 2.0, 2.0]);
        let ev = tridiagonal_eigenvalues(&[0.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 1.0]);
        let want = [-1.0, -1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(tridiagonal_eigenvalues(&[0.0; 3], &[0.0; 2]), vec![0.0; 3]);
    }

    #[test]
    fn tiny_and_huge_scales() {
        for s in [1e-200, 1e-20, 1e20, 1e200] {
            let ev = tridiagonal_eigenvalues(&[0.0, 0.0], &[s]);
            assert!((ev[1] / s - 1.0).abs() < 1e-14 && (ev[0] / s + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn vector_counts_match_scalar() {
        let diag: Vec<f64> = (0..200)
            .map(|i| ((i * 37) % 11) as f64 / 11.0 - 0.5)
            .collect();
        let off2: Vec<f64> = (0..199)
            .map(|i| (((i * 13) % 7) as f64 / 14.0).powi(2))
            .collect();
        let b = Block {
            diag: &diag,
            off2: &off2,
            pivmin: f64::MIN_POSITIVE,
        };
        let xs: Vec<f64> = (0..64).map(|i| -2.0 + 4.0 * i as f64 / 63.0).collect();
        let fast = batched_counts(&b, &xs);
        for (x, c) in xs.iter().zip(fast) {
            assert_eq!(c, sturm_count(&b, *x), "x = {x}");
        }
    }

    #[test]
    fn clustered_eigenvalues() {
        // Wilkinson W21+: eigenvalue pairs agree to many digits.
        let diag: Vec<f64> = (0..21i32).map(|i| (10 - i).abs() as f64).collect();
        let ev = tridiagonal_eigenvalues(&diag, &[1.0; 20]);
        assert!(
            (ev[20] - 10.746_194_182_903_393).abs() < 1e-12,
            "{}",
            ev[20]
        );
        assert!(
            (ev[19] - 10.746_194_182_903_322).abs() < 1e-12,
            "{}",
            ev[19]
        );
        let trace: f64 = diag.iter().sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-11);
    }
}
