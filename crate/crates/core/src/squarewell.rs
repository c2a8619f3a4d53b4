//! Closed-form square-well reference: the infinite well of half-width pi/2
//! with V = -1 inside, superpotential W = tan x, partner -1 + 2 sec^2 x,
//! spectrum E_n = n(n+2), and the explicit EMP solutions built on sin kx,
//! cos kx. Used as the oracle throughout the test and acceptance suites.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::emp::EmpSolution;
use crate::error::{Error, Result};
use crate::grid::{Grid, Interval};
use crate::potentials::{Potential, Superpotential};

/// Default interior clearance from the walls at +-pi/2.
pub const DEFAULT_MARGIN: f64 = 1e-4;

#[derive(Debug, Clone, Copy)]
pub struct SquareWellCase {
    pub k: i64,
    pub energy: f64,
    /// gamma = 1/(kE); defined for k >= 2.
    pub gamma: Option<f64>,
}

impl SquareWellCase {
    pub fn new(k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidK(k));
        }
        let kf = k as f64;
        let energy = kf * kf - 1.0;
        let gamma = (k >= 2).then(|| 1.0 / (kf * energy));
        Ok(Self { k, energy, gamma })
    }
}

pub fn well_interval(margin: f64) -> Interval {
    Interval::new(-FRAC_PI_2, FRAC_PI_2, margin).expect("well interval")
}

pub fn well_grid(margin: f64, n_points: usize) -> Grid {
    Grid::new(well_interval(margin), n_points).expect("well grid")
}

/// V = -1 inside the well; the walls live in the domain restriction.
pub fn potential(interval: Interval) -> Potential {
    Potential::constant(-1.0, interval, "square_well")
}

/// The SUSY partner V~ = -1 + 2 sec^2 x.
pub fn partner_potential(interval: Interval) -> Potential {
    Potential::new(
        Arc::new(|x: f64| -1.0 + 2.0 / x.cos().powi(2)),
        interval,
        "square_well~",
    )
}

/// W = tan x.
pub fn superpotential(interval: Interval) -> Superpotential {
    Superpotential::tangent(interval)
}

/// rho^2 = 1/k, the constant EMP solution at E = k^2 - 1.
pub fn oracle_rho(k: i64, grid: &Grid) -> Result<EmpSolution> {
    let case = SquareWellCase::new(k)?;
    let rho0 = (1.0 / case.k as f64).sqrt();
    let n = grid.n_points;
    Ok(EmpSolution {
        grid: grid.clone(),
        rho: vec![rho0; n],
        rho_prime: vec![0.0; n],
        rho_double_prime: Some(vec![0.0; n]),
        energy: case.energy,
        potential_label: "square_well".into(),
        coefficients: None,
    })
}

/// rho~^2 = gamma (k^2 + tan^2 x), the transformed solution on the partner
/// well; requires k >= 2 (gamma is undefined at the zero mode k = 1).
pub fn oracle_rho_tilde(k: i64, grid: &Grid) -> Result<EmpSolution> {
    let case = SquareWellCase::new(k)?;
    let gamma = case.gamma.ok_or(Error::InvalidK(k))?;
    let k2 = (case.k * case.k) as f64;

    let n = grid.n_points;
    let mut rho = vec![0.0; n];
    let mut rho_prime = vec![0.0; n];
    let mut rho_dd = vec![0.0; n];
    for (i, x) in grid.points().enumerate() {
        let t = x.tan();
        let sec2 = 1.0 / x.cos().powi(2);
        let r = (gamma * (k2 + t * t)).sqrt();
        let rp = gamma * t * sec2 / r;
        // (rho^2)''/2 = gamma d/dx (tan sec^2) = gamma (sec^4 + 2 tan^2 sec^2)
        let half_sq_dd = gamma * (sec2 * sec2 + 2.0 * t * t * sec2);
        rho[i] = r;
        rho_prime[i] = rp;
        rho_dd[i] = (half_sq_dd - rp * rp) / r;
    }
    Ok(EmpSolution {
        grid: grid.clone(),
        rho,
        rho_prime,
        rho_double_prime: Some(rho_dd),
        energy: case.energy,
        potential_label: "square_well~".into(),
        coefficients: None,
    })
}

/// Ermakov-Lewis invariant for rho^2 = 1/k and psi with Cauchy data
/// (psi0, psi0') at x = 0: 2I = k psi0^2 + psi0'^2 / k.
pub fn oracle_invariant(k: i64, psi0: f64, psi0_prime: f64) -> Result<f64> {
    let case = SquareWellCase::new(k)?;
    let kf = case.k as f64;
    Ok(0.5 * (kf * psi0 * psi0 + psi0_prime * psi0_prime / kf))
}
