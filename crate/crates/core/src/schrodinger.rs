//! Linear Schrödinger machinery: solution pairs, Wronskians, and the
//! first- and second-order intertwining maps on wavefunctions.
//!
//! Units follow hbar = 1, m = 1/2, so the equation reads
//! -psi'' + (V - E) psi = 0.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numeric::first_derivative_samples;
use crate::ode::{integrate_over_grid, no_guard, OdeOptions};
use crate::potentials::{partner_pair_second_order, GeneratingFunction, Potential, Superpotential};

/// Energies at or below this threshold make the 1/sqrt(E) normalization of
/// the first-order map undefined.
pub const ZERO_MODE_TOL: f64 = 1e-10;

/// A sampled solution of the Schrödinger equation at fixed energy.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    pub grid: Grid,
    pub psi: Vec<f64>,
    pub psi_prime: Vec<f64>,
    pub energy: f64,
}

impl Wavefunction {
    /// Max over interior points of |psi'' - (V - E) psi|, with psi'' from a
    /// fourth-order difference of the stored derivative samples.
    pub fn residual(&self, v: &Potential) -> f64 {
        let h = self.grid.spacing();
        let mut worst = 0.0_f64;
        for i in 2..self.grid.n_points.saturating_sub(2) {
            let x = self.grid.point(i);
            let psi_dd = first_derivative_samples(&self.psi_prime, i, h);
            let r = psi_dd - (v.eval(x) - self.energy) * self.psi[i];
            worst = worst.max(r.abs());
        }
        worst
    }
}

/// Two linearly independent solutions at a common energy, with their
/// (constant) Wronskian.
#[derive(Debug, Clone)]
pub struct SolutionPair {
    pub grid: Grid,
    pub psi1: Vec<f64>,
    pub psi1_prime: Vec<f64>,
    pub psi2: Vec<f64>,
    pub psi2_prime: Vec<f64>,
    pub energy: f64,
    pub lambda: f64,
    pub potential_label: String,
}

impl SolutionPair {
    pub fn member(&self, which: usize) -> Wavefunction {
        let (psi, psi_prime) = match which {
            1 => (self.psi1.clone(), self.psi1_prime.clone()),
            2 => (self.psi2.clone(), self.psi2_prime.clone()),
            _ => panic!("member index must be 1 or 2"),
        };
        Wavefunction {
            grid: self.grid.clone(),
            psi,
            psi_prime,
            energy: self.energy,
        }
    }

    /// Pointwise Wronskian at grid index i.
    pub fn wronskian_at(&self, i: usize) -> f64 {
        self.psi1_prime[i] * self.psi2[i] - self.psi1[i] * self.psi2_prime[i]
    }

    /// Max relative deviation of the pointwise Wronskian from the stored
    /// midpoint value.
    pub fn wronskian_deviation(&self) -> f64 {
        let scale = self.lambda.abs();
        (0..self.grid.n_points)
            .map(|i| (self.wronskian_at(i) - self.lambda).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Integrate the pair with initial conditions (psi, psi') = (0, 1) and
/// (1, 0) at the grid midpoint. With this convention Lambda = 1.
pub fn integrate_pair(
    v: &Potential,
    energy: f64,
    grid: &Grid,
    opts: &OdeOptions,
) -> Result<SolutionPair> {
    let vf = v.v.clone();
    let rhs = move |x: f64, y: [f64; 2]| [y[1], (vf(x) - energy) * y[0]];

    let s1 = integrate_over_grid(&rhs, grid, [0.0, 1.0], opts, &no_guard)?;
    let s2 = integrate_over_grid(&rhs, grid, [1.0, 0.0], opts, &no_guard)?;

    let mid = grid.mid_index();
    let lambda = s1[mid][1] * s2[mid][0] - s1[mid][0] * s2[mid][1];

    Ok(SolutionPair {
        grid: grid.clone(),
        psi1: s1.iter().map(|s| s[0]).collect(),
        psi1_prime: s1.iter().map(|s| s[1]).collect(),
        psi2: s2.iter().map(|s| s[0]).collect(),
        psi2_prime: s2.iter().map(|s| s[1]).collect(),
        energy,
        lambda,
        potential_label: v.label.clone(),
    })
}

/// Lambda = psi1' psi2 - psi1 psi2' at the midpoint.
pub fn wronskian(pair: &SolutionPair) -> Result<f64> {
    let lambda = pair.wronskian_at(pair.grid.mid_index());
    if lambda.abs() < 1e-12 {
        return Err(Error::DegeneratePair(lambda.abs()));
    }
    Ok(lambda)
}

/// First-order intertwining map: psi~ = (psi' + W psi) / sqrt(E), with the
/// derivative closed via psi'' = (W^2 - W' - E) psi.
pub fn map_wavefunction_first(psi: &Wavefunction, w: &Superpotential) -> Result<Wavefunction> {
    let e = psi.energy;
    if e <= ZERO_MODE_TOL {
        return Err(Error::ZeroModeEnergy(e));
    }
    let root = e.sqrt();
    let n = psi.grid.n_points;
    let mut out = vec![0.0; n];
    let mut out_prime = vec![0.0; n];
    for i in 0..n {
        let x = psi.grid.point(i);
        let wv = (w.w)(x);
        out[i] = (psi.psi_prime[i] + wv * psi.psi[i]) / root;
        out_prime[i] = ((wv * wv - e) * psi.psi[i] + wv * psi.psi_prime[i]) / root;
    }
    Ok(Wavefunction {
        grid: psi.grid.clone(),
        psi: out,
        psi_prime: out_prime,
        energy: e,
    })
}

/// Second-order intertwining map with supercharge
/// q^- = d^2 + 2f d + 2f' + b, normalized by sqrt(E^2 + d):
///
///   psi~ sqrt(E^2+d) = (2f^2 - f' - E) psi + 2f psi'.
///
/// All second derivatives of psi are eliminated via the Schrödinger
/// equation with the potential generated by `g`.
pub fn map_wavefunction_second(
    psi: &Wavefunction,
    g: &GeneratingFunction,
    floor: f64,
) -> Result<Wavefunction> {
    let e = psi.energy;
    let norm_sq = e * e + g.d;
    if norm_sq <= 0.0 {
        return Err(Error::NormalizationFailure(norm_sq));
    }
    let (v, _, _) = partner_pair_second_order(g, &psi.grid, floor)?;
    let root = norm_sq.sqrt();

    let n = psi.grid.n_points;
    let mut out = vec![0.0; n];
    let mut out_prime = vec![0.0; n];
    for i in 0..n {
        let x = psi.grid.point(i);
        let (fv, fpv, fppv) = ((g.f)(x), (g.f_prime)(x), (g.f_double_prime)(x));
        let p = 2.0 * fv * fv - fpv - e;
        out[i] = (p * psi.psi[i] + 2.0 * fv * psi.psi_prime[i]) / root;
        out_prime[i] = ((4.0 * fv * fpv - fppv + 2.0 * fv * (v.eval(x) - e)) * psi.psi[i]
            + (2.0 * fv * fv + fpv - e) * psi.psi_prime[i])
            / root;
    }
    Ok(Wavefunction {
        grid: psi.grid.clone(),
        psi: out,
        psi_prime: out_prime,
        energy: e,
    })
}

/// Map both members of a pair and recompute the Wronskian.
pub fn map_pair_first(pair: &SolutionPair, w: &Superpotential) -> Result<SolutionPair> {
    let m1 = map_wavefunction_first(&pair.member(1), w)?;
    let m2 = map_wavefunction_first(&pair.member(2), w)?;
    let mid = pair.grid.mid_index();
    let lambda = m1.psi_prime[mid] * m2.psi[mid] - m1.psi[mid] * m2.psi_prime[mid];
    Ok(SolutionPair {
        grid: pair.grid.clone(),
        psi1: m1.psi,
        psi1_prime: m1.psi_prime,
        psi2: m2.psi,
        psi2_prime: m2.psi_prime,
        energy: pair.energy,
        lambda,
        potential_label: format!("{}~", pair.potential_label),
    })
}
