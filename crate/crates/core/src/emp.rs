//! Ermakov-Milne-Pinney solutions: construction from Schrödinger pairs,
//! direct nonlinear integration, residual verification, and amplitude-phase
//! wavefunctions.
//!
//! Throughout, the EMP equation is normalized with a = 1:
//!
//!   rho'' + (E - V) rho = 1 / rho^3,   rho > 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numeric::{second_derivative_samples, simpson_cumulative};
use crate::ode::{integrate_over_grid, OdeOptions};
use crate::potentials::Potential;
use crate::schrodinger::{SolutionPair, Wavefunction};

/// Relative tolerance on AB - C^2 = 1/Lambda^2.
pub const CONSTRAINT_TOL: f64 = 1e-8;

/// rho values below this during direct integration count as blow-up of the
/// 1/rho^3 wall.
pub const RHO_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl EmpCoefficients {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> f64 {
        self.a * self.b - self.c * self.c
    }

    /// Coefficients satisfying the constraint exactly for a given Wronskian,
    /// with A and C free.
    pub fn from_wronskian(a: f64, c: f64, lambda: f64) -> Self {
        let b = (1.0 / (lambda * lambda) + c * c) / a;
        Self { a, b, c }
    }

    pub fn check(&self, lambda: f64, tol: f64) -> Result<()> {
        let expected = 1.0 / (lambda * lambda);
        let found = self.discriminant();
        if (found - expected).abs() > tol * expected.abs() {
            return Err(Error::ConstraintViolation { found, expected });
        }
        Ok(())
    }
}

/// A sampled positive EMP solution with its derivative. The second
/// derivative is stored only when an analytic expression is available;
/// otherwise residual checks fall back to finite differences.
#[derive(Debug, Clone)]
pub struct EmpSolution {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub rho_prime: Vec<f64>,
    pub rho_double_prime: Option<Vec<f64>>,
    pub energy: f64,
    pub potential_label: String,
    pub coefficients: Option<EmpCoefficients>,
}

impl EmpSolution {
    pub fn rho_at_mid(&self) -> (f64, f64) {
        let mid = self.grid.mid_index();
        (self.rho[mid], self.rho_prime[mid])
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AmplitudePhaseParams {
    pub alpha: f64,
    pub beta: f64,
    pub x0: f64,
}

/// rho = [A psi1^2 + B psi2^2 + 2C psi1 psi2]^{1/2}, with the derivative
/// taken analytically from the pair samples.
pub fn emp_from_pair(pair: &SolutionPair, coeff: EmpCoefficients) -> Result<EmpSolution> {
    emp_from_pair_tol(pair, coeff, CONSTRAINT_TOL)
}

pub fn emp_from_pair_tol(
    pair: &SolutionPair,
    coeff: EmpCoefficients,
    tol: f64,
) -> Result<EmpSolution> {
    coeff.check(pair.lambda, tol)?;
    let n = pair.grid.n_points;
    let mut rho = vec![0.0; n];
    let mut rho_prime = vec![0.0; n];
    for i in 0..n {
        let (p1, p2) = (pair.psi1[i], pair.psi2[i]);
        let (d1, d2) = (pair.psi1_prime[i], pair.psi2_prime[i]);
        let sq = coeff.a * p1 * p1 + coeff.b * p2 * p2 + 2.0 * coeff.c * p1 * p2;
        if sq <= 0.0 {
            // Cannot occur for a valid constraint and independent pair.
            return Err(Error::NonPositiveRho {
                x: pair.grid.point(i),
                value: sq,
            });
        }
        rho[i] = sq.sqrt();
        rho_prime[i] =
            (coeff.a * p1 * d1 + coeff.b * p2 * d2 + coeff.c * (p1 * d2 + d1 * p2)) / rho[i];
    }
    Ok(EmpSolution {
        grid: pair.grid.clone(),
        rho,
        rho_prime,
        rho_double_prime: None,
        energy: pair.energy,
        potential_label: pair.potential_label.clone(),
        coefficients: Some(coeff),
    })
}

/// Max over interior grid points of |rho'' + (E - V) rho - 1/rho^3|.
///
/// Uses the stored analytic second derivative when present, otherwise a
/// fourth-order central difference of the stored rho samples.
pub fn emp_residual(sol: &EmpSolution, v: &Potential) -> f64 {
    let h = sol.grid.spacing();
    let n = sol.grid.n_points;
    let mut worst = 0.0_f64;
    for i in 2..n.saturating_sub(2) {
        let x = sol.grid.point(i);
        let dd = match &sol.rho_double_prime {
            Some(vals) => vals[i],
            None => second_derivative_samples(&sol.rho, i, h),
        };
        let r = dd + (sol.energy - v.eval(x)) * sol.rho[i] - 1.0 / sol.rho[i].powi(3);
        worst = worst.max(r.abs());
    }
    worst
}

/// Direct nonlinear integration of rho'' = -(E - V) rho + 1/rho^3 from the
/// grid midpoint outward.
pub fn integrate_emp(
    v: &Potential,
    energy: f64,
    grid: &Grid,
    rho0: f64,
    rho0_prime: f64,
    opts: &OdeOptions,
) -> Result<EmpSolution> {
    if rho0 <= 0.0 {
        return Err(Error::NonPositiveRho {
            x: grid.midpoint(),
            value: rho0,
        });
    }
    let vf = v.v.clone();
    let rhs = move |x: f64, y: [f64; 2]| {
        [y[1], -(energy - vf(x)) * y[0] + 1.0 / (y[0] * y[0] * y[0])]
    };
    let guard = |x: f64, y: [f64; 2]| {
        if y[0] < RHO_FLOOR {
            Err(Error::BlowUp { x, rho: y[0] })
        } else {
            Ok(())
        }
    };
    let states = integrate_over_grid(&rhs, grid, [rho0, rho0_prime], opts, &guard)?;
    Ok(EmpSolution {
        grid: grid.clone(),
        rho: states.iter().map(|s| s[0]).collect(),
        rho_prime: states.iter().map(|s| s[1]).collect(),
        rho_double_prime: None,
        energy,
        potential_label: v.label.clone(),
        coefficients: None,
    })
}

/// psi = alpha rho sin( int_{x0}^{x} rho^{-2} dx' + beta ), with the phase
/// accumulated by composite Simpson on the stored grid.
pub fn amplitude_phase_wavefunction(
    sol: &EmpSolution,
    params: &AmplitudePhaseParams,
) -> Result<Wavefunction> {
    if !sol.grid.interval.contains(params.x0) {
        return Err(Error::MismatchedInputs(format!(
            "phase anchor x0 = {} outside grid interval",
            params.x0
        )));
    }
    let inv_sq: Vec<f64> = sol.rho.iter().map(|r| 1.0 / (r * r)).collect();
    let cum = simpson_cumulative(&inv_sq, sol.grid.spacing());
    let anchor = cum[sol.grid.nearest_index(params.x0)];

    let n = sol.grid.n_points;
    let mut psi = vec![0.0; n];
    let mut psi_prime = vec![0.0; n];
    for i in 0..n {
        let phase = cum[i] - anchor + params.beta;
        psi[i] = params.alpha * sol.rho[i] * phase.sin();
        psi_prime[i] = params.alpha * (sol.rho_prime[i] * phase.sin() + phase.cos() / sol.rho[i]);
    }
    Ok(Wavefunction {
        grid: sol.grid.clone(),
        psi,
        psi_prime,
        energy: sol.energy,
    })
}
