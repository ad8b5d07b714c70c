use gpsd_sysid::kernels::{HyperParams, KernelKind, KernelModel, Shape, TimeDomain};
use gpsd_sysid::psd::Psd1d;
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

fn psd_shape(shape: Shape) -> gpsd_sysid::psd::PsdShape {
    match shape {
        Shape::Laplacian => gpsd_sysid::psd::PsdShape::Laplacian,
        Shape::Cauchy => gpsd_sysid::psd::PsdShape::Cauchy,
        Shape::Gaussian => gpsd_sysid::psd::PsdShape::Gaussian,
    }
}

fn shape_strategy() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::Laplacian),
        Just(Shape::Cauchy),
        Just(Shape::Gaussian),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psd_is_nonnegative_and_even(
        shape in shape_strategy(),
        beta in 0.01f64..5.0,
        omega0 in 0.0f64..6.0,
        scale in 0.01f64..10.0,
        omega in -50.0f64..50.0,
    ) {
        let psd = Psd1d::new(psd_shape(shape), beta, omega0, scale).unwrap();
        let v = psd.eval(omega);
        prop_assert!(v >= 0.0);
        prop_assert!((v - psd.eval(-omega)).abs() <= 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn covariance_at_zero_lag_equals_total_mass(
        shape in shape_strategy(),
        beta in 0.05f64..3.0,
        omega0 in 0.0f64..4.0,
        scale in 0.1f64..5.0,
    ) {
        let psd = Psd1d::new(psd_shape(shape), beta, omega0, scale).unwrap();
        let k0 = psd.cos_transform(0.0, 1e-10).unwrap();
        prop_assert!((k0 - psd.mass()).abs() <= 1e-8 * psd.mass());
    }

    #[test]
    fn folded_density_is_nonnegative_and_periodic(
        shape in shape_strategy(),
        beta in 0.05f64..2.0,
        omega0 in 0.0f64..3.0,
        theta in -10.0f64..10.0,
    ) {
        let psd = Psd1d::new(psd_shape(shape), beta, omega0, 1.0).unwrap();
        let a = psd.fold(theta, 1.0, 4);
        let b = psd.fold(theta + 2.0 * std::f64::consts::PI, 1.0, 4);
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn gram_matrices_are_symmetric_and_nonnegative_definite(
        shape in shape_strategy(),
        beta in 0.05f64..1.5,
        omega0 in 0.0f64..3.0,
        lambda0 in 0.2f64..0.98,
        scale in 0.1f64..5.0,
    ) {
        let hyper = HyperParams {
            beta,
            omega0,
            alpha0: lambda0.ln(),
            gamma: -lambda0.ln(),
            scale,
            ..HyperParams::default()
        };
        for kind in [KernelKind::Ecls(shape), KernelKind::Dc, KernelKind::Tc] {
            let kernel = KernelModel::new(kind, hyper.clone(), TimeDomain::DiscreteTime { sampling_time: 1.0 }).unwrap();
            let indices: Vec<f64> = (1..=12).map(|t| t as f64).collect();
            let gram = kernel.gram(&indices).unwrap();
            prop_assert!((&gram - gram.transpose()).abs().max() <= 1e-12 * gram.abs().max());
            let eig = SymmetricEigen::new(gram.clone());
            let min = eig.eigenvalues.min();
            let max = eig.eigenvalues.max();
            prop_assert!(min >= -1e-10 * max.max(1e-300), "min eig {min}, max {max}");
        }
    }

    #[test]
    fn damped_sinusoid_satisfies_two_tap_recursion(
        rho in 0.05f64..0.99,
        theta in 0.05f64..3.0,
    ) {
        let g = gpsd_sysid::analysis::second_order_impulse(rho, theta, 40).unwrap();
        for t in 2..g.len() {
            let pred = 2.0 * rho * theta.cos() * g[t - 1] - rho * rho * g[t - 2];
            prop_assert!((g[t] - pred).abs() <= 1e-10 * (1.0 + g[t].abs()));
        }
    }
}
