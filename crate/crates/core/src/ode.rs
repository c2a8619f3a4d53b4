//! Adaptive Dormand-Prince 5(4) integration for two-component systems.
//!
//! Both the linear Schrödinger equation and the nonlinear EMP equation are
//! integrated as first-order systems in (value, derivative), outward from the
//! grid midpoint in both directions so that the basis solutions stay O(1)
//! near the center of symmetric wells.

use crate::error::{Error, Result};
use crate::grid::Grid;

pub type State = [f64; 2];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps_per_segment: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_steps_per_segment: 200_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Embedded 4th-order weights.
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

fn axpy(y: State, h: f64, coeffs: &[(f64, State)]) -> State {
    let mut out = y;
    for &(c, k) in coeffs {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Advance `y` from `x0` to `x1` with adaptive step control.
///
/// `guard` is consulted after every accepted step and may abort the
/// integration (used for the 1/rho^3 blow-up wall of the EMP equation).
pub fn propagate<F, G>(
    f: &F,
    x0: f64,
    y0: State,
    x1: f64,
    opts: &OdeOptions,
    guard: &G,
) -> Result<State>
where
    F: Fn(f64, State) -> State,
    G: Fn(f64, State) -> Result<()>,
{
    if x0 == x1 {
        return Ok(y0);
    }
    let dir = (x1 - x0).signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = x1 - x0;
    let mut k1 = f(x, y);

    for _ in 0..opts.max_steps_per_segment {
        if dir * (x1 - x) <= 0.0 {
            return Ok(y);
        }
        if dir * (x + h - x1) > 0.0 {
            h = x1 - x;
        }
        if h.abs() < 1e-14 * (1.0 + x.abs()) {
            return Err(Error::IntegratorFailure(format!(
                "step size underflow at x = {x}"
            )));
        }

        let k2 = f(x + C2 * h, axpy(y, h, &[(A21, k1)]));
        let k3 = f(x + C3 * h, axpy(y, h, &[(A31, k1), (A32, k2)]));
        let k4 = f(x + C4 * h, axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = f(
            x + C5 * h,
            axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]),
        );
        let k6 = f(
            x + h,
            axpy(
                y,
                h,
                &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
            ),
        );
        let y5 = axpy(y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        let k7 = f(x + h, y5);
        let y4 = axpy(
            y,
            h,
            &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
        );

        let mut err_sq = 0.0;
        for i in 0..2 {
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4[i]) / sc;
            err_sq += e * e;
        }
        let err = (err_sq / 2.0).sqrt();

        if err <= 1.0 {
            x += h;
            y = y5;
            k1 = k7; // FSAL
            guard(x, y)?;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Err(Error::IntegratorFailure(format!(
        "step budget exhausted between {x0} and {x1}"
    )))
}

/// Integrate outward from the grid midpoint and record the state at every
/// grid point. `y_mid` is the state at `grid.midpoint()`.
pub fn integrate_over_grid<F, G>(
    f: &F,
    grid: &Grid,
    y_mid: State,
    opts: &OdeOptions,
    guard: &G,
) -> Result<Vec<State>>
where
    F: Fn(f64, State) -> State,
    G: Fn(f64, State) -> Result<()>,
{
    let mid = grid.mid_index();
    let mut out = vec![[0.0, 0.0]; grid.n_points];
    out[mid] = y_mid;

    let mut y = y_mid;
    for i in mid + 1..grid.n_points {
        y = propagate(f, grid.point(i - 1), y, grid.point(i), opts, guard)?;
        out[i] = y;
    }
    y = y_mid;
    for i in (0..mid).rev() {
        y = propagate(f, grid.point(i + 1), y, grid.point(i), opts, guard)?;
        out[i] = y;
    }
    Ok(out)
}

pub fn no_guard(_x: f64, _y: State) -> Result<()> {
    Ok(())
}
