use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An open interval with an interior clearance from possibly singular endpoints.
///
/// Hard walls (infinite potentials) are represented by restricting the
/// interval, never by large finite potential values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub margin: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, margin: f64) -> Result<Self> {
        if !(margin >= 0.0) {
            return Err(Error::InvalidGrid(format!("margin {margin} must be >= 0")));
        }
        if !(lo + margin < hi - margin) {
            return Err(Error::InvalidGrid(format!(
                "interval ({lo}, {hi}) with margin {margin} has empty interior"
            )));
        }
        Ok(Self { lo, hi, margin })
    }

    /// Left edge of the working (margin-trimmed) interior.
    pub fn inner_lo(&self) -> f64 {
        self.lo + self.margin
    }

    /// Right edge of the working interior.
    pub fn inner_hi(&self) -> f64 {
        self.hi - self.margin
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.inner_lo() && x <= self.inner_hi()
    }
}

/// Uniform sampling of the interior of an [`Interval`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub interval: Interval,
    pub n_points: usize,
}

impl Grid {
    pub fn new(interval: Interval, n_points: usize) -> Result<Self> {
        if n_points < 16 {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points}, need at least 16"
            )));
        }
        Ok(Self { interval, n_points })
    }

    pub fn spacing(&self) -> f64 {
        (self.interval.inner_hi() - self.interval.inner_lo()) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.interval.inner_lo() + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Index of the anchor point where initial conditions are imposed.
    pub fn mid_index(&self) -> usize {
        (self.n_points - 1) / 2
    }

    pub fn midpoint(&self) -> f64 {
        self.point(self.mid_index())
    }

    /// Index of the grid point closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.interval.inner_lo()) / self.spacing()).round();
        (i.max(0.0) as usize).min(self.n_points - 1)
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && (self.interval.inner_lo() - other.interval.inner_lo()).abs() < 1e-14
            && (self.interval.inner_hi() - other.interval.inner_hi()).abs() < 1e-14
    }
}
