use crate::error::{Error, Result};

/// `delta = (Z/K) exp(-d L / 8)`.
pub fn ergodicity_delta(smoothness: f64, d: usize, z_over_k: f64) -> Result<f64> {
    if !(smoothness > 0.0 && smoothness.is_finite()) || d == 0 || !(z_over_k > 0.0 && z_over_k.is_finite()) {
        return Err(Error::InvalidInput("L, d and Z/K must be positive".into()));
    }
    let delta = z_over_k * (-(d as f64) * smoothness / 8.0).exp();
    if delta > 1.0 {
        return Err(Error::Domain { what: "minorization constant exceeds 1; inputs are inconsistent", value: delta });
    }
    Ok(delta)
}

/// `(1 - delta)^t` for an `L`-smooth potential.
pub fn uniform_ergodicity_bound(smoothness: f64, d: usize, z_over_k: f64, t: u64) -> Result<f64> {
    let delta = ergodicity_delta(smoothness, d, z_over_k)?;
    Ok((1.0 - delta).powf(t as f64).clamp(0.0, 1.0))
}

/// `Z/K` for the isotropic Gaussian: lattice sum over `|z_i| <= W` with
/// `W >= 12 sigma` against `(2 pi sigma^2)^{d/2}`.
pub fn isotropic_gaussian_z_over_k(d: usize, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) || d == 0 {
        return Err(Error::InvalidInput("sigma2 and d must be positive".into()));
    }
    let w = (12.0 * sigma2.sqrt()).ceil().max(10.0) as i64;
    let z1: f64 = (-w..=w).map(|z| (-(z * z) as f64 / (2.0 * sigma2)).exp()).sum();
    let k1 = (2.0 * std::f64::consts::PI * sigma2).sqrt();
    Ok((z1 / k1).powi(d as i32))
}

/// TVD bound when the proposal sampler is itself a chain run for `n` steps
/// with geometric rate `V rho^n`. Returns the bound evaluated at both ends of
/// `C ∈ [1 - 2 V rho^n / delta, 1 + 2 V rho^n / delta]`, as `(min, max)`.
pub fn inexact_alg_bound(v: f64, rho: f64, n: u64, delta: f64, k: u64) -> Result<(f64, f64)> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidInput(format!("V must be nonnegative, got {v}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidInput(format!("rho must lie in (0, 1), got {rho}")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1], got {delta}")));
    }
    let err = v * rho.powf(n as f64) / delta;
    if 2.0 * err >= 1.0 {
        return Err(Error::VacuousBound(format!(
            "2 V rho^n / delta = {} >= 1, so the constant C may vanish and the bound is vacuous",
            2.0 * err
        )));
    }
    let f = |c: f64| (1.0 - c * delta).powf(k as f64) + (1.0 + 1.0 / (c * delta)) * err;
    let a = f(1.0 - 2.0 * err);
    let b = f(1.0 + 2.0 * err);
    Ok((a.min(b), a.max(b)))
}
