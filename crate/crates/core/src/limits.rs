//! Limiting spectral laws: the semicircle and Marchenko-Pastur laws, the
//! arcsine-type spectral measures of the constant-weight limit paths at
//! root parameter `u`, and the average over `u` that links the two.
//!
//! Every law here has the form `w(x) * ((x - lo)(hi - x))^{±1/2}` on its
//! support, so densities are evaluated from the two endpoint distances and
//! all integrals use a square-root substitution at both ends.
//!
//! For the Laguerre family, `x` lies in the support of the law at `u` iff
//! `4 c2(u)^2 >= (x - c1(u))^2`. The `u^2` terms cancel, leaving
//! `u <= (L+ - x)(x - L-) / (4 beta x)`; see [`laguerre_u_max`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ensembles::{limit_weights, EnsembleParams};
use crate::error::{param_err, Error, Result};
use crate::quadrature::integrate_sqrt_endpoint;

/// Default absolute tolerance for cdf, moment and expectation quadratures.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LawFamily {
    Semicircle { beta: f64 },
    MarchenkoPastur { beta: f64, gamma: f64 },
    HermiteConditional { u: f64, beta: f64 },
    LaguerreConditional { u: f64, beta: f64, gamma: f64 },
}

/// An absolutely continuous law on a compact interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousLaw {
    family: LawFamily,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy)]
enum Side {
    Lo,
    Hi,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        param_err(format!("beta must be finite and positive, got {beta}"))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() {
        return param_err(format!("gamma must be finite, got {gamma}"));
    }
    if gamma < 1.0 {
        return Err(Error::UnsupportedRegime(format!(
            "gamma = {gamma} < 1 is not supported"
        )));
    }
    Ok(())
}

/// `(L-, L+) = (beta (1 - sqrt(gamma))^2, beta (1 + sqrt(gamma))^2)`.
pub fn marchenko_pastur_edges(beta: f64, gamma: f64) -> (f64, f64) {
    let r = gamma.sqrt();
    (beta * (1.0 - r).powi(2), beta * (1.0 + r).powi(2))
}

impl ContinuousLaw {
    pub fn semicircle(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let r = 2.0 * beta.sqrt();
        Ok(Self {
            family: LawFamily::Semicircle { beta },
            lo: -r,
            hi: r,
        })
    }

    pub fn marchenko_pastur(beta: f64, gamma: f64) -> Result<Self> {
        check_beta(beta)?;
        check_gamma(gamma)?;
        let (lo, hi) = marchenko_pastur_edges(beta, gamma);
        Ok(Self {
            family: LawFamily::MarchenkoPastur { beta, gamma },
            lo,
            hi,
        })
    }

    /// Arcsine law on `[-2 sqrt(beta u), 2 sqrt(beta u)]`; needs `0 < u <= 1`
    /// (at `u = 0` it collapses to a point mass).
    pub fn hermite_conditional(u: f64, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(u > 0.0 && u <= 1.0) {
            return param_err(format!("Hermite conditional law needs 0 < u <= 1, got {u}"));
        }
        let r = 2.0 * (beta * u).sqrt();
        Ok(Self {
            family: LawFamily::HermiteConditional { u, beta },
            lo: -r,
            hi: r,
        })
    }

    /// Arcsine law on `[c1 - 2 c2, c1 + 2 c2]`; needs `0 <= u < 1` (at `u = 1`
    /// the edge weight `c2` vanishes and the law is a point mass).
    pub fn laguerre_conditional(u: f64, beta: f64, gamma: f64) -> Result<Self> {
        check_beta(beta)?;
        check_gamma(gamma)?;
        if !(0.0..1.0).contains(&u) {
            return param_err(format!(
                "Laguerre conditional law needs 0 <= u < 1, got {u}"
            ));
        }
        let c1 = beta * (gamma + 1.0 - 2.0 * u);
        let c2 = beta * (gamma - u).sqrt() * (1.0 - u).sqrt();
        Ok(Self {
            family: LawFamily::LaguerreConditional { u, beta, gamma },
            lo: c1 - 2.0 * c2,
            hi: c1 + 2.0 * c2,
        })
    }

    pub fn family(&self) -> LawFamily {
        self.family
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn singular_at(&self, side: Side) -> bool {
        match self.family {
            LawFamily::Semicircle { .. } => false,
            LawFamily::MarchenkoPastur { .. } => matches!(side, Side::Lo) && self.lo == 0.0,
            LawFamily::HermiteConditional { .. } | LawFamily::LaguerreConditional { .. } => true,
        }
    }

    /// Density from the distances to both endpoints; `x` is whichever
    /// reconstruction is exact.
    fn density_parts(&self, x: f64, d_lo: f64, d_hi: f64) -> f64 {
        let prod = d_lo * d_hi;
        if !(prod > 0.0) {
            return 0.0;
        }
        match self.family {
            LawFamily::Semicircle { beta } => prod.sqrt() / (2.0 * PI * beta),
            LawFamily::MarchenkoPastur { beta, .. } => prod.sqrt() / (2.0 * PI * beta * x),
            LawFamily::HermiteConditional { .. } | LawFamily::LaguerreConditional { .. } => {
                1.0 / (PI * prod.sqrt())
            }
        }
    }

    fn density_from(&self, side: Side, s: f64) -> f64 {
        let width = self.hi - self.lo;
        match side {
            Side::Lo => self.density_parts(self.lo + s, s, width - s),
            Side::Hi => self.density_parts(self.hi - s, width - s, s),
        }
    }

    /// Density at `x`: zero outside the support and at regular endpoints,
    /// [`Error::SingularEndpoint`] at an endpoint where it diverges.
    pub fn density(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return param_err("density evaluated at NaN");
        }
        if x == self.lo && self.singular_at(Side::Lo) || x == self.hi && self.singular_at(Side::Hi)
        {
            return Err(Error::SingularEndpoint(x));
        }
        if x <= self.lo || x >= self.hi {
            return Ok(0.0);
        }
        Ok(self.density_parts(x, x - self.lo, self.hi - x))
    }

    /// `∫_lo^x density`, clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64, quad_tol: f64) -> Result<f64> {
        if x.is_nan() {
            return param_err("cdf evaluated at NaN");
        }
        if x <= self.lo {
            return Ok(0.0);
        }
        if x >= self.hi {
            return Ok(1.0);
        }
        let half = 0.5 * (self.hi - self.lo);
        let from_lo = x - self.lo;
        let value = if from_lo <= half {
            integrate_sqrt_endpoint(|s| self.density_from(Side::Lo, s), 0.0, from_lo, quad_tol)?
                .value
        } else {
            let tol = 0.5 * quad_tol;
            integrate_sqrt_endpoint(|s| self.density_from(Side::Lo, s), 0.0, half, tol)?.value
                + integrate_sqrt_endpoint(
                    |s| self.density_from(Side::Hi, s),
                    self.hi - x,
                    self.hi - self.lo - half,
                    tol,
                )?
                .value
        };
        Ok(value.clamp(0.0, 1.0))
    }

    /// `∫ x^k density`.
    pub fn moment(&self, k: u32, quad_tol: f64) -> Result<f64> {
        let half = 0.5 * (self.hi - self.lo);
        let tol = 0.5 * quad_tol;
        let left = integrate_sqrt_endpoint(
            |s| (self.lo + s).powi(k as i32) * self.density_from(Side::Lo, s),
            0.0,
            half,
            tol,
        )?;
        let right = integrate_sqrt_endpoint(
            |s| (self.hi - s).powi(k as i32) * self.density_from(Side::Hi, s),
            0.0,
            self.hi - self.lo - half,
            tol,
        )?;
        Ok(left.value + right.value)
    }

    /// Smallest `x` with `cdf(x) >= p`, to within `quad_tol` in probability
    /// or `1e-14` relative width in `x`.
    pub fn quantile(&self, p: f64, quad_tol: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return param_err(format!("probability must lie in [0, 1], got {p}"));
        }
        if p == 0.0 {
            return Ok(self.lo);
        }
        if p == 1.0 {
            return Ok(self.hi);
        }
        let (mut a, mut b) = (self.lo, self.hi);
        let mut x = 0.5 * (a + b);
        for _ in 0..200 {
            let err = self.cdf(x, quad_tol)? - p;
            if err.abs() <= quad_tol {
                return Ok(x);
            }
            if err > 0.0 {
                b = x;
            } else {
                a = x;
            }
            if b - a <= 1e-14 * (self.hi - self.lo) {
                break;
            }
            let rho = self.density_parts(x, x - self.lo, self.hi - x);
            let newton = x - err / rho;
            x = if rho > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
        }
        Ok(x)
    }
}

/// Eigenvalue of the Fourier mode `omega` on the limit path at root parameter `u`.
pub fn mode_eigenvalue(params: &EnsembleParams, u: f64, omega: f64) -> Result<f64> {
    if !(omega.abs() <= PI) {
        return param_err(format!("omega must lie in [-pi, pi], got {omega}"));
    }
    let w = limit_weights(params, u)?;
    Ok(w.loop_weight + 2.0 * w.edge_weight * omega.cos())
}

/// Largest `u` in `[0, 1]` for which `x` lies in the support of the Laguerre
/// law at `u`: `(L+ - x)(x - L-) / (4 beta x)`, or 0 when `x` is outside
/// `(L-, L+)`.
pub fn laguerre_u_max(x: f64, beta: f64, gamma: f64) -> f64 {
    let (lm, lp) = marchenko_pastur_edges(beta, gamma);
    if !(x > lm && x < lp) || x <= 0.0 {
        return 0.0;
    }
    ((lp - x) * (x - lm) / (4.0 * beta * x)).clamp(0.0, 1.0)
}

/// Limit density at `x` computed as the average over `u ~ Unif[0, 1]` of the
/// conditional arcsine densities, by quadrature. Zero outside the open support.
pub fn expected_density_numeric(params: &EnsembleParams, x: f64, quad_tol: f64) -> Result<f64> {
    let (lo, hi) = params.limit_law().support();
    if !(x > lo && x < hi) {
        return Ok(0.0);
    }
    match *params {
        EnsembleParams::Hermite { beta } => {
            // Singular where x hits the support edge, at u = x^2 / (4 beta).
            let u_min = x * x / (4.0 * beta);
            let integrand = |s: f64| {
                ContinuousLaw::hermite_conditional(u_min + s, beta)
                    .map(|law| law.density_parts(x, x - law.lo, law.hi - x))
                    .unwrap_or(0.0)
            };
            Ok(integrate_sqrt_endpoint(integrand, 0.0, 1.0 - u_min, quad_tol)?.value)
        }
        EnsembleParams::Laguerre { beta, gamma } => {
            let u_max = laguerre_u_max(x, beta, gamma);
            let integrand = |s: f64| {
                ContinuousLaw::laguerre_conditional(u_max - s, beta, gamma)
                    .map(|law| law.density_parts(x, x - law.lo, law.hi - x))
                    .unwrap_or(0.0)
            };
            Ok(integrate_sqrt_endpoint(integrand, 0.0, u_max, quad_tol)?.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let sc = ContinuousLaw::semicircle(1.0).unwrap();
        assert!((sc.density(0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert_eq!(sc.density(3.0).unwrap(), 0.0);
        assert_eq!(sc.density(2.0).unwrap(), 0.0);

        let mp = ContinuousLaw::marchenko_pastur(1.0, 1.0).unwrap();
        assert_eq!(mp.support(), (0.0, 4.0));
        assert!((mp.density(2.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(matches!(mp.density(0.0), Err(Error::SingularEndpoint(_))));
        assert_eq!(mp.density(4.0).unwrap(), 0.0);

        let mp4 = ContinuousLaw::marchenko_pastur(1.0, 4.0).unwrap();
        assert_eq!(mp4.support(), (1.0, 9.0));
        assert!((mp4.density(5.0).unwrap() - 4.0 / (10.0 * PI)).abs() < 1e-15);
        assert_eq!(mp4.density(1.0).unwrap(), 0.0);

        let hc = ContinuousLaw::hermite_conditional(1.0, 1.0).unwrap();
        assert!((hc.density(0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(matches!(hc.density(2.0), Err(Error::SingularEndpoint(_))));
    }

    #[test]
    fn constructor_preconditions() {
        assert!(ContinuousLaw::semicircle(0.0).is_err());
        assert!(matches!(
            ContinuousLaw::marchenko_pastur(1.0, 0.5),
            Err(Error::UnsupportedRegime(_))
        ));
        assert!(ContinuousLaw::hermite_conditional(0.0, 1.0).is_err());
        assert!(ContinuousLaw::laguerre_conditional(1.0, 1.0, 2.0).is_err());
        assert!(ContinuousLaw::laguerre_conditional(0.0, 1.0, 2.0).is_ok());
    }

    #[test]
    fn mode_eigenvalues() {
        let h = EnsembleParams::hermite(1.0).unwrap();
        assert!((mode_eigenvalue(&h, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        let h3 = EnsembleParams::hermite(3.0).unwrap();
        assert!(mode_eigenvalue(&h3, 0.4, PI / 2.0).unwrap().abs() < 1e-15);
        let l = EnsembleParams::laguerre(1.0, 1.0).unwrap();
        assert!((mode_eigenvalue(&l, 0.0, 0.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(mode_eigenvalue(&l, 0.0, 4.0).is_err());
    }

    #[test]
    fn u_max_values() {
        assert!((laguerre_u_max(2.0, 1.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((laguerre_u_max(3.0, 1.0, 4.0) - 1.0).abs() < 1e-15);
        assert_eq!(laguerre_u_max(4.0, 1.0, 1.0), 0.0);
        assert_eq!(laguerre_u_max(0.0, 1.0, 1.0), 0.0);
        assert_eq!(laguerre_u_max(10.0, 1.0, 4.0), 0.0);
    }

    #[test]
    fn cdf_edges_and_symmetry() {
        for law in [
            ContinuousLaw::semicircle(2.0).unwrap(),
            ContinuousLaw::marchenko_pastur(1.0, 1.0).unwrap(),
            ContinuousLaw::hermite_conditional(0.3, 1.5).unwrap(),
            ContinuousLaw::laguerre_conditional(0.2, 1.0, 2.0).unwrap(),
        ] {
            let (lo, hi) = law.support();
            assert_eq!(law.cdf(lo, 1e-10).unwrap(), 0.0);
            assert!((law.cdf(hi - 1e-300, 1e-10).unwrap() - 1.0).abs() < 1e-8);
            assert_eq!(law.cdf(hi, 1e-10).unwrap(), 1.0);
        }
        let sc = ContinuousLaw::semicircle(3.0).unwrap();
        assert!((sc.cdf(0.0, 1e-12).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn arcsine_cdf_closed_form() {
        // cdf(2 sqrt(beta u) cos θ) = 1 - θ/π.
        let (u, beta) = (0.6, 2.0);
        let law = ContinuousLaw::hermite_conditional(u, beta).unwrap();
        for theta in [PI / 3.0, 0.1, 2.5] {
            let x = 2.0 * (beta * u).sqrt() * theta.cos();
            let c = law.cdf(x, 1e-12).unwrap();
            assert!((c - (1.0 - theta / PI)).abs() < 1e-10, "theta {theta}: {c}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let law = ContinuousLaw::marchenko_pastur(1.0, 2.0).unwrap();
        for p in [0.01, 0.3, 0.5, 0.97] {
            let x = law.quantile(p, 1e-12).unwrap();
            assert!((law.cdf(x, 1e-12).unwrap() - p).abs() < 1e-10);
        }
        assert_eq!(law.quantile(0.0, 1e-12).unwrap(), law.support().0);
    }

    #[test]
    fn expected_density_outside_support_is_zero() {
        let h = EnsembleParams::hermite(1.0).unwrap();
        assert_eq!(expected_density_numeric(&h, 2.0, 1e-10).unwrap(), 0.0);
        assert_eq!(expected_density_numeric(&h, -5.0, 1e-10).unwrap(), 0.0);
        let l = EnsembleParams::laguerre(1.0, 2.0).unwrap();
        assert_eq!(expected_density_numeric(&l, 0.0, 1e-10).unwrap(), 0.0);
    }
}
