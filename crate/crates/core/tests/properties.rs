//! Property-based checks over randomized energies and EMP coefficients.

use proptest::prelude::*;

use milne::darboux::{transform_first_order, transform_inverse, DarbouxConfig};
use milne::emp::{
    amplitude_phase_wavefunction, emp_from_pair, emp_residual, AmplitudePhaseParams,
    EmpCoefficients,
};
use milne::grid::{Grid, Interval};
use milne::ode::OdeOptions;
use milne::potentials::Potential;
use milne::schrodinger::integrate_pair;
use milne::squarewell;
use std::f64::consts::FRAC_PI_2;

fn well_grid(margin: f64, n: usize) -> Grid {
    Grid::new(Interval::new(-FRAC_PI_2, FRAC_PI_2, margin).unwrap(), n).unwrap()
}

fn square_well(g: &Grid) -> Potential {
    Potential::constant(-1.0, g.interval, "square_well")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// The Wronskian of an integrated pair is constant across the grid.
    #[test]
    fn wronskian_constancy(e in 0.5f64..20.0) {
        let g = well_grid(1e-2, 501);
        let pair = integrate_pair(&square_well(&g), e, &g, &OdeOptions::default()).unwrap();
        prop_assert!(pair.wronskian_deviation() < 1e-9);
    }

    /// from_wronskian always satisfies AB - C^2 = 1/Lambda^2 and the
    /// resulting rho solves the EMP equation.
    #[test]
    fn coefficient_constraint_and_residual(
        a in 0.5f64..2.0,
        c in -0.8f64..0.8,
        k in 2i64..=5,
    ) {
        let g = well_grid(1e-2, 2001);
        let v = square_well(&g);
        let e = (k * k - 1) as f64;
        let pair = integrate_pair(&v, e, &g, &OdeOptions::default()).unwrap();
        // Balance A with k so rho stays well away from zero (psi1 ~ sin(kx)/k).
        let coeff = EmpCoefficients::from_wronskian(a * k as f64, c, pair.lambda);
        prop_assert!(coeff.check(pair.lambda, 1e-10).is_ok());
        let rho = emp_from_pair(&pair, coeff).unwrap();
        prop_assert!(rho.rho.iter().all(|r| *r > 0.0));
        // Threshold covers the finite-difference rho'' reconstruction error;
        // genuine non-solutions sit orders of magnitude higher.
        prop_assert!(emp_residual(&rho, &v) < 1e-5);
    }

    /// transform_inverse undoes transform_first_order on solutions.
    #[test]
    fn round_trip_identity(
        a in 0.5f64..2.0,
        c in -0.5f64..0.5,
        k in 2i64..=5,
    ) {
        let g = well_grid(1e-2, 1001);
        let v = square_well(&g);
        let w = squarewell::superpotential(g.interval);
        let e = (k * k - 1) as f64;
        let cfg = DarbouxConfig::default();
        let pair = integrate_pair(&v, e, &g, &OdeOptions::default()).unwrap();
        let rho = emp_from_pair(&pair, EmpCoefficients::from_wronskian(a, c, pair.lambda)).unwrap();
        let up = transform_first_order(&rho, &w, e, &cfg).unwrap();
        let back = transform_inverse(&up, &w, e, &cfg).unwrap();
        let worst = rho.rho.iter().zip(&back.rho)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        prop_assert!(worst < 1e-8, "round trip error {}", worst);
    }

    /// Every amplitude-phase wavefunction lies in span{psi1, psi2}: the
    /// least-squares fit onto the pair reproduces it pointwise.
    #[test]
    fn amplitude_phase_in_pair_span(
        a in 0.5f64..2.0,
        c in -0.5f64..0.5,
        alpha in 0.2f64..2.0,
        beta in -1.5f64..1.5,
    ) {
        let g = well_grid(1e-2, 2001);
        let v = square_well(&g);
        let e = 3.0;
        let pair = integrate_pair(&v, e, &g, &OdeOptions::default()).unwrap();
        let rho = emp_from_pair(&pair, EmpCoefficients::from_wronskian(a, c, pair.lambda)).unwrap();
        let psi = amplitude_phase_wavefunction(
            &rho,
            &AmplitudePhaseParams { alpha, beta, x0: 0.0 },
        ).unwrap();

        // Normal equations for psi ~ p * psi1 + q * psi2.
        let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..g.n_points {
            let (p1, p2, f) = (pair.psi1[i], pair.psi2[i], psi.psi[i]);
            s11 += p1 * p1;
            s12 += p1 * p2;
            s22 += p2 * p2;
            b1 += p1 * f;
            b2 += p2 * f;
        }
        let det = s11 * s22 - s12 * s12;
        let p = (b1 * s22 - b2 * s12) / det;
        let q = (s11 * b2 - s12 * b1) / det;
        let worst = (0..g.n_points)
            .map(|i| (psi.psi[i] - p * pair.psi1[i] - q * pair.psi2[i]).abs())
            .fold(0.0, f64::max);
        prop_assert!(worst < 1e-8, "fit residual {}", worst);
    }
}
