//! The compact-spectrum ("perfect security") density
//!
//! ```text
//! pi(x) ∝ ( Omega_d(u) / (j^2 - u^2) )^2,   u = ||x|| / (2 rho),
//! ```
//!
//! where `j` is the first zero of `J_{(d-2)/2}`. The quotient has a removable
//! singularity at `u = j`. Inside a window around it, `Omega_d(u) / (u - j)`
//! is replaced by its Taylor polynomial, using
//! `d/du Omega_nu(u) = -(u/2) Omega_{nu+1}(u)` for the derivatives.

use super::Potential;
use crate::error::{Error, Result};
use crate::special::{first_zero, omega, BesselOrder, MAX_ARGUMENT};

/// Half-width of the window around `u = j` that uses the series expansion.
/// The truncation error of the cubic polynomial is `O(window^4)`; the raw
/// gradient formula cancels catastrophically at `O(eps / (u - j)^2)`.
pub const SINGULARITY_WINDOW: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct PerfectSecurityPotential {
    dim: usize,
    rho: f64,
    order: BesselOrder,
    order1: BesselOrder,
    zero: f64,
    guard: f64,
    // derivatives 1..=4 of Omega at u = j
    taylor: [f64; 4],
}

impl PerfectSecurityPotential {
    pub fn new(dim: usize, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
        }
        let order = BesselOrder::for_dimension(dim)?;
        let order1 = order.next()?;
        let order2 = order1.next()?;
        let order3 = order2.next()?;
        let order4 = order3.next()?;
        let j = first_zero(order)?;
        let (o1, o2, o3, o4) = (omega(order1, j)?, omega(order2, j)?, omega(order3, j)?, omega(order4, j)?);
        let j2 = j * j;
        let taylor = [
            -0.5 * j * o1,
            -0.5 * o1 + 0.25 * j2 * o2,
            0.75 * j * o2 - 0.125 * j2 * j * o3,
            0.75 * o2 - 0.75 * j2 * o3 + j2 * j2 * o4 / 16.0,
        ];
        Ok(PerfectSecurityPotential { dim, rho, order, order1, zero: j, guard: MAX_ARGUMENT, taylor })
    }

    /// Scale chosen so every coordinate has unit variance.
    pub fn unit_variance(dim: usize) -> Result<Self> {
        Self::new(dim, perfect_security_rho_for_unit_variance(dim)?)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// First positive zero `j_{(d-2)/2}`.
    pub fn bessel_zero(&self) -> f64 {
        self.zero
    }

    /// Largest radial argument `u` at which the density is evaluated.
    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn order(&self) -> BesselOrder {
        self.order
    }

    /// Radial argument `u = ||x|| / (2 rho)`.
    pub fn radial_argument(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt() / (2.0 * self.rho)
    }

    /// `log |g(u)|` and `g'(u) / (u g(u))` for the quotient
    /// `g(u) = Omega(u) / (j^2 - u^2)`.
    fn log_quotient(&self, u: f64) -> Result<(f64, f64)> {
        if !(u >= 0.0) || u > self.guard {
            return Err(Error::Domain { what: "radial argument beyond the density guard", value: u });
        }
        let j = self.zero;
        let s = u - j;
        if s.abs() < SINGULARITY_WINDOW {
            // Omega(u) / s = P(s); g(u) = -P(s) / (2j + s)
            let [d1, d2, d3, d4] = self.taylor;
            let p = d1 + s * (d2 / 2.0 + s * (d3 / 6.0 + s * d4 / 24.0));
            let dp = d2 / 2.0 + s * (d3 / 3.0 + s * d4 / 8.0);
            let log_g = p.abs().ln() - (2.0 * j + s).ln();
            let dlog = dp / p - 1.0 / (2.0 * j + s);
            return Ok((log_g, dlog / u));
        }
        let om = omega(self.order, u)?;
        let om1 = omega(self.order1, u)?;
        let den = j * j - u * u;
        let log_g = om.abs().ln() - den.abs().ln();
        // g'/g = Omega'/Omega + 2u/(j^2 - u^2), Omega'/Omega = -(u/2) Omega_{nu+1}/Omega
        let dlog_over_u = -0.5 * om1 / om + 2.0 / den;
        Ok((log_g, dlog_over_u))
    }

    /// `2 log |g(u)|` as a function of the radial argument.
    pub fn log_radial_profile(&self, u: f64) -> Result<f64> {
        Ok(2.0 * self.log_quotient(u)?.0)
    }

    /// Log-density without normalization. Errors beyond the guard.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let (lg, _) = self.log_quotient(self.radial_argument(x))?;
        Ok(2.0 * lg)
    }
}

impl Potential for PerfectSecurityPotential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self.log_quotient(self.radial_argument(x)) {
            Ok((lg, _)) => -2.0 * lg,
            Err(_) => f64::INFINITY,
        }
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.value_and_gradient(x, grad);
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let u = self.radial_argument(x);
        match self.log_quotient(u) {
            Ok((lg, dlog_over_u)) => {
                // grad phi = -2 (g'/g)(u) * x / (4 rho^2 u)
                let scale = -2.0 * dlog_over_u / (4.0 * self.rho * self.rho);
                for (g, xi) in grad.iter_mut().zip(x) {
                    *g = scale * xi;
                }
                -2.0 * lg
            }
            Err(_) => {
                grad.iter_mut().for_each(|g| *g = f64::NAN);
                f64::INFINITY
            }
        }
    }
}

/// `2 [ log|Omega_d(u)| - log|j^2 - u^2| ]`, `u = ||x|| / (2 rho)`.
pub fn perfect_security_log_density(p: &PerfectSecurityPotential, x: &[f64]) -> Result<f64> {
    p.log_density(x)
}

/// `rho = sqrt(d) / (2 j_{(d-2)/2})`, which makes `Var(X_i) = 4 rho^2 j^2 / d = 1`.
pub fn perfect_security_rho_for_unit_variance(d: usize) -> Result<f64> {
    let j = first_zero(BesselOrder::for_dimension(d)?)?;
    Ok((d as f64).sqrt() / (2.0 * j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn density_at_origin_d2() {
        let p = PerfectSecurityPotential::new(2, 0.7).unwrap();
        let j0 = p.bessel_zero();
        let v = perfect_security_log_density(&p, &[0.0, 0.0]).unwrap();
        assert!((v + 4.0 * j0.ln()).abs() < 1e-13);
    }

    #[test]
    fn rho_examples() {
        let r3 = perfect_security_rho_for_unit_variance(3).unwrap();
        assert!((r3 - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-12);
        let r2 = perfect_security_rho_for_unit_variance(2).unwrap();
        assert!((r2 - 2f64.sqrt() / (2.0 * 2.404_825_557_695_773)).abs() < 1e-11);
        assert!(perfect_security_rho_for_unit_variance(1).is_err());
    }

    #[test]
    fn radial_symmetry() {
        let p = PerfectSecurityPotential::unit_variance(3).unwrap();
        let x = [0.3, -0.4, 1.2];
        let a = p.log_density(&x).unwrap();
        let b = p.log_density(&[-0.3, 0.4, -1.2]).unwrap();
        let c = p.log_density(&[1.3, 0.0, 0.0]).unwrap(); // same norm
        assert_eq!(a, b);
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn series_window_matches_raw_formula() {
        for d in [2, 3, 5, 24] {
            let p = PerfectSecurityPotential::unit_variance(d).unwrap();
            let j = p.bessel_zero();
            let r = 2.0 * p.rho();
            for s in [-0.9e-3, -0.3e-4, 0.0, 0.4e-4, 0.9e-3] {
                let u = j + s;
                let mut x = vec![0.0; d];
                x[0] = u * r;
                let series = p.log_density(&x).unwrap();
                assert!(series.is_finite());
                if s != 0.0 {
                    let raw = 2.0 * (omega(p.order, u).unwrap().abs().ln() - (j * j - u * u).abs().ln());
                    assert!((series - raw).abs() < 1e-8, "d={d} s={s}: {series} vs {raw}");
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences_near_singularity() {
        let p = PerfectSecurityPotential::unit_variance(3).unwrap();
        let r = 2.0 * p.rho();
        let j = p.bessel_zero();
        for u in [j - 2e-3, j - 2e-6, j, j + 5e-7, j + 1.5e-3, 0.5 * j, 1e-9, 0.0] {
            let x = [u * r * 0.6, u * r * 0.8, 0.0];
            let mut g = [0.0; 3];
            p.gradient(&x, &mut g);
            let h = 1e-6;
            for i in 0..3 {
                let mut a = x;
                let mut b = x;
                a[i] += h;
                b[i] -= h;
                let fd = (p.value(&a) - p.value(&b)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-5 * (1.0 + g[i].abs()), "u={u} i={i}: {fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn guard_is_enforced() {
        let p = PerfectSecurityPotential::unit_variance(2).unwrap();
        let far = [2.0 * p.rho() * 51.0, 0.0];
        assert!(matches!(p.log_density(&far), Err(Error::Domain { .. })));
        assert_eq!(p.value(&far), f64::INFINITY);
    }
}
