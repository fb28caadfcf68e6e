use crate::densities::{IsotropicGaussianPotential, Potential};
use crate::error::Result;

const GRID: usize = 1000;

/// For the 1-D Gaussian with variance `sigma2`, the infimum over the cell
/// `[m - 1/2, m + 1/2]` of `pi(x) / pibar_pc(x)`, where the piecewise-constant
/// target equals `exp(-phi(m))` on that cell. Evaluated on a grid of step
/// `1e-3` including both endpoints, for `m = 0..=window_max`.
pub fn appendix_a_degeneracy_probe(sigma2: f64, window_max: u32) -> Result<Vec<f64>> {
    let p = IsotropicGaussianPotential::centered(1, sigma2)?;
    Ok((0..=window_max)
        .map(|m| {
            let m = m as f64;
            let phi_m = p.value(&[m]);
            (0..=GRID)
                .map(|k| {
                    let y = -0.5 + k as f64 / GRID as f64;
                    (phi_m - p.value(&[m + y])).exp()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_cell_infimum() {
        let v = appendix_a_degeneracy_probe(0.5, 3).unwrap();
        assert!((v[0] - (-0.25f64).exp()).abs() < 1e-15);
        // e^{-2 m y - y^2} at y = 1/2
        assert!((v[3] - (-3.25f64).exp()).abs() < 1e-12);
    }
}
