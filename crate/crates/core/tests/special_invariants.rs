use lattice_sampler::special::{bessel_j, first_zero, omega, BesselOrder, MAX_TWICE_ORDER};
use proptest::prelude::*;

fn order(twice: u32) -> BesselOrder {
    BesselOrder::from_twice(twice).unwrap()
}

#[test]
fn three_term_recurrence_on_grid() {
    // nu in {1/2, 1, ..., 12}, u in {0.5, 1, ..., 20}
    for twice in 1..=24 {
        let nu = twice as f64 / 2.0;
        for k in 1..=40 {
            let u = 0.5 * k as f64;
            let jm = if twice >= 2 {
                bessel_j(order(twice - 2), u).unwrap()
            } else {
                // J_{-1/2}(u) = sqrt(2 / (pi u)) cos u
                (2.0 / (std::f64::consts::PI * u)).sqrt() * u.cos()
            };
            let jp = bessel_j(order(twice + 2), u).unwrap();
            let j = bessel_j(order(twice), u).unwrap();
            let r = jm + jp - 2.0 * nu / u * j;
            assert!(r.abs() <= 1e-8, "nu={nu} u={u}: residual {r}");
        }
    }
}

#[test]
fn half_order_closed_form() {
    for k in 1..=2000 {
        let u = 0.01 * k as f64;
        let expect = (2.0 / (std::f64::consts::PI * u)).sqrt() * u.sin();
        let got = bessel_j(order(1), u).unwrap();
        assert!((got - expect).abs() <= 1e-10, "u={u}");
    }
}

#[test]
fn first_zero_residuals() {
    for twice in 0..=MAX_TWICE_ORDER {
        let o = order(twice);
        let j = first_zero(o).unwrap();
        assert!(j > o.nu());
        assert!(bessel_j(o, j).unwrap().abs() <= 1e-10, "nu={}", o.nu());
    }
}

proptest! {
    // d/du Omega_nu(u) = -(u/2) Omega_{nu+1}(u)
    #[test]
    fn omega_derivative_identity(twice in 0u32..20, u in 0.1f64..40.0) {
        let o = order(twice);
        let h = 1e-5;
        let fd = (omega(o, u + h).unwrap() - omega(o, u - h).unwrap()) / (2.0 * h);
        let exact = -0.5 * u * omega(o.next().unwrap(), u).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-7 * (1.0 + exact.abs()), "{fd} vs {exact}");
    }
}
