//! Globally adaptive Gauss-Kronrod (7/15 point) quadrature with an absolute
//! error target, plus a square-root substitution for integrands with
//! inverse-square-root endpoint singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{param_err, Error, Result};

const MAX_INTERVALS: usize = 20_000;

// Kronrod abscissae; odd indices are the 7-point Gauss abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Quadrature {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Quadrature {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Piece {
    a: f64,
    b: f64,
    q: Quadrature,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.q.error == other.q.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q.error.total_cmp(&other.q.error)
    }
}

/// `∫_a^b f` to absolute error `tol`, bisecting the worst interval until the
/// summed Kronrod-minus-Gauss estimates fall below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if !(tol > 0.0) {
        return param_err(format!("quadrature tolerance must be positive, got {tol}"));
    }
    if !(a.is_finite() && b.is_finite()) {
        return param_err("integration limits must be finite");
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
        });
    }
    let first = gauss_kronrod(&f, a, b);
    let mut error = first.error;
    let mut heap = BinaryHeap::from([Piece { a, b, q: first }]);
    while error > tol {
        if heap.len() >= MAX_INTERVALS || !error.is_finite() {
            return Err(Error::Accuracy {
                tol,
                estimate: error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Err(Error::Accuracy {
                tol,
                estimate: error,
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        error += left.error + right.error - worst.q.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            q: left,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            q: right,
        });
    }
    // Re-sum so the running error updates leave no drift.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.q.value, e + p.q.error));
    Ok(Quadrature { value, error })
}

/// `∫_{s0}^{s1} g(s) ds` for `0 <= s0 <= s1`, where `s` measures distance
/// from an endpoint at which `g` may blow up like `s^{-1/2}`. Substituting
/// `s = t^2` turns the integrand into the bounded `2 t g(t^2)`.
pub fn integrate_sqrt_endpoint<G: Fn(f64) -> f64>(
    g: G,
    s0: f64,
    s1: f64,
    tol: f64,
) -> Result<Quadrature> {
    if !(0.0 <= s0 && s0 <= s1) {
        return param_err(format!("need 0 <= s0 <= s1, got [{s0}, {s1}]"));
    }
    integrate(|t| 2.0 * t * g(t * t), s0.sqrt(), s1.sqrt(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory() {
        let q = integrate(|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI, 1e-11).unwrap();
        assert!(q.value.abs() < 1e-11);
        let q = integrate(f64::exp, -1.0, 1.0, 1e-12).unwrap();
        assert!((q.value - (1f64.exp() - (-1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        // ∫_0^1 s^{-1/2} ds = 2 and ∫_0^1 (1 - s)^{-1/2} s^{-1/2} ds = π.
        let q = integrate_sqrt_endpoint(|s| 1.0 / s.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        let half = |s: f64| 1.0 / (s.sqrt() * (1.0 - s).sqrt());
        let left = integrate_sqrt_endpoint(half, 0.0, 0.5, 1e-12).unwrap();
        let right = integrate_sqrt_endpoint(|s| half(1.0 - s), 0.0, 0.5, 1e-12).unwrap();
        assert!((left.value + right.value - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn reversed_and_empty_ranges() {
        let q = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((q.value + 0.5).abs() < 1e-14);
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-12).unwrap().value, 0.0);
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn non_integrable_reports_accuracy_error() {
        let r = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::Accuracy { .. })), "{r:?}");
    }
}
