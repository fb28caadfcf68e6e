//! Bessel functions of the first kind for the integer and half-integer
//! orders `(d - 2) / 2` used by the compact-spectrum densities, together
//! with `Omega_d(u) = (2/u)^nu J_nu(u)` and the first positive zero `j_nu`.
//!
//! Accuracy target is `1e-10` absolute on `0 <= u <= 50`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest argument accepted by [`bessel_j`].
pub const MAX_ARGUMENT: f64 = 50.0;

/// Largest supported `2 nu`. Densities need `nu <= 12`; the extra room
/// covers the `nu + 1` and `nu + 2` orders used in derivatives.
pub const MAX_TWICE_ORDER: u32 = 32;

/// Crossover between the ascending series and Miller's backward recurrence
/// for integer orders.
const SERIES_CUTOFF: f64 = 12.0;

/// Order of a Bessel function, restricted to non-negative multiples of 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BesselOrder {
    twice: u32,
}

impl BesselOrder {
    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice > MAX_TWICE_ORDER {
            return Err(Error::Domain { what: "Bessel order above supported range", value: f64::from(twice) / 2.0 });
        }
        Ok(BesselOrder { twice })
    }

    /// Accepts `nu` only when `2 nu` is a non-negative integer.
    pub fn new(nu: f64) -> Result<Self> {
        let twice = 2.0 * nu;
        if !(twice >= 0.0) || twice.fract() != 0.0 {
            return Err(Error::Domain { what: "Bessel order must be a non-negative multiple of 1/2", value: nu });
        }
        Self::from_twice(twice as u32)
    }

    /// Order `(d - 2) / 2` attached to dimension `d >= 2`.
    pub fn for_dimension(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain { what: "dimension must be at least 2", value: d as f64 });
        }
        Self::from_twice((d - 2) as u32)
    }

    pub fn nu(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The order `nu + 1`.
    pub fn next(self) -> Result<Self> {
        Self::from_twice(self.twice + 2)
    }
}

/// `Gamma(n / 2)` for a positive integer `n`, by exact recurrence from
/// `Gamma(1) = 1` or `Gamma(1/2) = sqrt(pi)`.
pub fn gamma_half(n: u32) -> f64 {
    assert!(n > 0, "gamma_half(0) is a pole");
    let (mut acc, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = f64::from(n) / 2.0;
    while x < target {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// `sum_k (-u^2/4)^k / (k! Gamma(k + nu + 1))`, i.e. `(2/u)^nu J_nu(u)`.
fn reduced_series(order: BesselOrder, u: f64) -> f64 {
    let nu = order.nu();
    let q = -0.25 * u * u;
    let mut term = 1.0 / gamma_half(order.twice + 2);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 0.5 * u {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

fn series(order: BesselOrder, u: f64) -> f64 {
    let nu = order.nu();
    if order.twice == 0 {
        reduced_series(order, u)
    } else {
        (0.5 * u).powf(nu) * reduced_series(order, u)
    }
}

/// Miller's backward recurrence for integer order `n`, normalized with
/// `J_0 + 2 sum_k J_2k = 1`.
fn miller(n: u32, u: f64) -> f64 {
    let top = f64::from(n).max(u.ceil());
    let mut m = (top + 30.0 + (40.0 * top).sqrt()) as u32;
    m += m % 2;
    let two_over_u = 2.0 / u;
    let (mut jp1, mut j) = (0.0f64, 1e-30f64);
    let mut norm = 0.0;
    let mut result = 0.0;
    for k in (1..=m).rev() {
        // j = J_k, jp1 = J_{k+1} (unnormalized)
        let jm1 = f64::from(k) * two_over_u * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
        // j now holds J_{k-1}
        if k - 1 == n {
            result = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    result / norm
}

/// Half-integer orders via the closed forms of `J_{-1/2}` and `J_{1/2}`
/// followed by upward recurrence. Stable once `u >= nu`.
fn half_integer_upward(order: BesselOrder, u: f64) -> f64 {
    let s = (2.0 / (PI * u)).sqrt();
    let mut jm = s * u.cos(); // J_{-1/2}
    let mut j = s * u.sin(); // J_{1/2}
    let mut nu = 0.5;
    while nu < order.nu() {
        let next = 2.0 * nu / u * j - jm;
        jm = j;
        j = next;
        nu += 1.0;
    }
    j
}

fn check_argument(u: f64) -> Result<()> {
    if !u.is_finite() || u < 0.0 || u > MAX_ARGUMENT {
        return Err(Error::Domain { what: "Bessel argument must lie in [0, 50]", value: u });
    }
    Ok(())
}

/// `J_nu(u)` for `0 <= u <= 50`.
pub fn bessel_j(order: BesselOrder, u: f64) -> Result<f64> {
    check_argument(u)?;
    if u == 0.0 {
        return Ok(if order.twice == 0 { 1.0 } else { 0.0 });
    }
    let v = if order.is_integer() {
        if u <= SERIES_CUTOFF {
            series(order, u)
        } else {
            miller(order.twice / 2, u)
        }
    } else if u < order.nu() {
        series(order, u)
    } else {
        half_integer_upward(order, u)
    };
    Ok(v)
}

/// `Omega_d(u) = (2/u)^((d-2)/2) J_((d-2)/2)(u)`, with its limit
/// `1 / Gamma(d/2)` at the origin.
pub fn omega_d(d: usize, u: f64) -> Result<f64> {
    let order = BesselOrder::for_dimension(d)?;
    omega(order, u)
}

/// [`omega_d`] addressed by Bessel order.
pub fn omega(order: BesselOrder, u: f64) -> Result<f64> {
    check_argument(u)?;
    if u <= SERIES_CUTOFF {
        return Ok(reduced_series(order, u));
    }
    Ok((2.0 / u).powf(order.nu()) * bessel_j(order, u)?)
}

/// First positive zero `j_nu` of `J_nu`.
///
/// `J_nu` is positive on `(0, j_nu)`, so the zero is bracketed by scanning
/// upward from `nu + 1` and then refined by bisection.
pub fn first_zero(order: BesselOrder) -> Result<f64> {
    let nu = order.nu();
    let step = 0.25;
    let mut lo = nu + 1.0;
    let f_lo = bessel_j(order, lo)?;
    if f_lo <= 0.0 {
        return Err(Error::Internal(format!("J_{nu} not positive at nu + 1")));
    }
    let limit = nu + 10.0;
    let mut hi = lo + step;
    while bessel_j(order, hi)? > 0.0 {
        lo = hi;
        hi += step;
        if hi > limit {
            return Err(Error::Internal(format!("failed to bracket first zero of J_{nu}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bessel_j(order, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First zero of `J_nu` after `j_nu`. Used as the edge of the region where
/// the compact-spectrum density is strictly positive.
pub fn second_zero(order: BesselOrder) -> Result<f64> {
    let first = first_zero(order)?;
    let mut lo = first + 0.5;
    let sign = bessel_j(order, lo)?.signum();
    let mut hi = lo + 0.25;
    while bessel_j(order, hi)?.signum() == sign {
        lo = hi;
        hi += 0.25;
        if hi > first + 10.0 {
            return Err(Error::Internal("failed to bracket second zero".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bessel_j(order, mid)?.signum() == sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
