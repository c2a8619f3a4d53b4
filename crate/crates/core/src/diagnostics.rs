//! Ermakov-Lewis invariant and the Milne quantum-number function N(E).

use serde::{Deserialize, Serialize};

use crate::emp::EmpSolution;
use crate::error::{Error, Result};
use crate::numeric::simpson_total;
use crate::schrodinger::Wavefunction;

/// I = (1/2) [ (psi/rho)^2 + (rho psi' - rho' psi)^2 ], evaluated pointwise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InvariantReport {
    /// Midpoint value of the invariant.
    pub value: f64,
    /// max |I(x) - I(mid)| over the grid.
    pub max_deviation: f64,
    /// max_deviation / |I(mid)| (zero when I = 0 everywhere).
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantumNumberSample {
    pub energy: f64,
    pub n_value: f64,
    #[serde(skip)]
    pub integrand: Vec<f64>,
}

pub fn lewis_invariant(psi: &Wavefunction, rho: &EmpSolution) -> Result<InvariantReport> {
    if !psi.grid.same_layout(&rho.grid) {
        return Err(Error::MismatchedInputs(
            "wavefunction and EMP solution live on different grids".into(),
        ));
    }
    if (psi.energy - rho.energy).abs() > 1e-9 * (1.0 + psi.energy.abs()) {
        return Err(Error::MismatchedInputs(format!(
            "energies differ: {} vs {}",
            psi.energy, rho.energy
        )));
    }

    let at = |i: usize| {
        let ratio = psi.psi[i] / rho.rho[i];
        let cross = rho.rho[i] * psi.psi_prime[i] - rho.rho_prime[i] * psi.psi[i];
        0.5 * (ratio * ratio + cross * cross)
    };
    let mid = psi.grid.mid_index();
    let value = at(mid);
    let max_deviation = (0..psi.grid.n_points)
        .map(|i| (at(i) - value).abs())
        .fold(0.0, f64::max);
    let relative_deviation = if value.abs() > 0.0 {
        max_deviation / value.abs()
    } else {
        max_deviation
    };
    Ok(InvariantReport {
        value,
        max_deviation,
        relative_deviation,
    })
}

/// N(E) = (1/pi) Int rho^{-2} dx over the working interior. Regions where
/// rho is infinite (outside hard walls) contribute nothing and are encoded
/// by the domain restriction itself.
pub fn quantum_number(rho: &EmpSolution) -> QuantumNumberSample {
    let integrand: Vec<f64> = rho.rho.iter().map(|r| 1.0 / (r * r)).collect();
    let n_value = simpson_total(&integrand, rho.grid.spacing()) / std::f64::consts::PI;
    QuantumNumberSample {
        energy: rho.energy,
        n_value,
        integrand,
    }
}

/// Round(N_before - N_after), failing when the shift is far from integer.
/// First-order transforms shift by 0 or +-1, second-order ones by up to +-2.
pub fn quantum_number_shift(
    before: &QuantumNumberSample,
    after: &QuantumNumberSample,
) -> Result<i32> {
    let shift = before.n_value - after.n_value;
    let rounded = shift.round();
    if (shift - rounded).abs() > 0.05 {
        return Err(Error::NonIntegerShift(shift));
    }
    Ok(rounded as i32)
}
