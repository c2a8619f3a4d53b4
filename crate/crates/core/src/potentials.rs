//! Superpotentials, second-order generating functions, and the partner
//! potential constructions they induce.
//!
//! A superpotential W factorizes a potential in Riccati form V = W^2 - W' and
//! generates its partner V~ = W^2 + W'. A generating function f together with
//! a constant d plays the same role for second-order (irreducible) transforms;
//! for d = -c^2/4 the second-order step splits into two first-order ones.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, Interval};
use crate::numeric::central_diff;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default step for the finite-difference derivative fallback.
pub const FD_STEP: f64 = 1e-5;

/// Default floor below which |f| counts as singular (Eqs. dividing by f).
pub const SINGULARITY_FLOOR: f64 = 1e-8;

#[derive(Clone)]
pub struct Superpotential {
    pub w: RealFn,
    pub w_prime: RealFn,
    pub domain: Interval,
}

impl std::fmt::Debug for Superpotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Superpotential")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct GeneratingFunction {
    pub f: RealFn,
    pub f_prime: RealFn,
    pub f_double_prime: RealFn,
    pub domain: Interval,
    /// Second-order constant; d > 0 is irreducible, d = -c^2/4 reducible.
    pub d: f64,
}

impl std::fmt::Debug for GeneratingFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneratingFunction")
            .field("domain", &self.domain)
            .field("d", &self.d)
            .finish_non_exhaustive()
    }
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Potential")
            .field("domain", &self.domain)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct Potential {
    pub v: RealFn,
    pub domain: Interval,
    pub label: String,
}

impl Potential {
    pub fn new(v: RealFn, domain: Interval, label: impl Into<String>) -> Self {
        Self {
            v,
            domain,
            label: label.into(),
        }
    }

    pub fn constant(value: f64, domain: Interval, label: impl Into<String>) -> Self {
        Self::new(Arc::new(move |_| value), domain, label)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.v)(x)
    }
}

impl Superpotential {
    pub fn new(w: RealFn, w_prime: RealFn, domain: Interval) -> Self {
        Self { w, w_prime, domain }
    }

    /// Build from the value closure alone, deriving w' by fourth-order
    /// central differences with step `fd_step`.
    pub fn from_fn_fd(w: RealFn, domain: Interval, fd_step: f64) -> Self {
        let w2 = w.clone();
        let w_prime: RealFn = Arc::new(move |x| central_diff(w2.as_ref(), x, fd_step));
        Self { w, w_prime, domain }
    }

    /// W = tan x on (-pi/2, pi/2); the square-well superpotential.
    pub fn tangent(domain: Interval) -> Self {
        Self::new(
            Arc::new(f64::tan),
            Arc::new(|x: f64| 1.0 / x.cos().powi(2)),
            domain,
        )
    }

    /// W = a x + b (shifted-oscillator family).
    pub fn linear(a: f64, b: f64, domain: Interval) -> Self {
        Self::new(Arc::new(move |x| a * x + b), Arc::new(move |_| a), domain)
    }

    pub fn constant(w0: f64, domain: Interval) -> Self {
        Self::new(Arc::new(move |_| w0), Arc::new(|_| 0.0), domain)
    }

    /// Max deviation between the stored derivative and a central difference
    /// of the stored value over the grid.
    pub fn derivative_defect(&self, grid: &Grid, fd_step: f64) -> f64 {
        grid.points()
            .skip(2)
            .take(grid.n_points.saturating_sub(4))
            .map(|x| ((self.w_prime)(x) - central_diff(self.w.as_ref(), x, fd_step)).abs())
            .fold(0.0, f64::max)
    }
}

impl GeneratingFunction {
    pub fn new(f: RealFn, f_prime: RealFn, f_double_prime: RealFn, domain: Interval, d: f64) -> Self {
        Self {
            f,
            f_prime,
            f_double_prime,
            domain,
            d,
        }
    }

    pub fn from_fn_fd(f: RealFn, domain: Interval, d: f64, fd_step: f64) -> Self {
        let f1 = f.clone();
        let f_prime: RealFn = Arc::new(move |x| central_diff(f1.as_ref(), x, fd_step));
        let fp = f_prime.clone();
        let f_double_prime: RealFn = Arc::new(move |x| central_diff(fp.as_ref(), x, fd_step));
        Self {
            f,
            f_prime,
            f_double_prime,
            domain,
            d,
        }
    }

    /// The shift constant of a reducible transform, defined when d = -c^2/4.
    /// The sign of c is not determined by d; callers that know it should use
    /// [`GeneratingFunction::reducible`] instead.
    pub fn shift_constant(&self) -> Option<f64> {
        if self.d <= 0.0 {
            Some(2.0 * (-self.d).sqrt())
        } else {
            None
        }
    }

    /// Build a reducible generating function with d = -c^2/4.
    pub fn reducible(
        f: RealFn,
        f_prime: RealFn,
        f_double_prime: RealFn,
        domain: Interval,
        c: f64,
    ) -> Self {
        Self::new(f, f_prime, f_double_prime, domain, -c * c / 4.0)
    }

    /// Fail if |f| drops below `floor` anywhere on the grid.
    pub fn check_nonzero(&self, grid: &Grid, floor: f64) -> Result<()> {
        for x in grid.points() {
            let value = (self.f)(x);
            if value.abs() < floor {
                return Err(Error::SingularGenerator { x, value, floor });
            }
        }
        Ok(())
    }
}

/// V = W^2 - W' and its partner V~ = W^2 + W'.
pub fn partner_pair_first_order(w: &Superpotential) -> (Potential, Potential) {
    let (wf, wp) = (w.w.clone(), w.w_prime.clone());
    let v = Potential::new(
        Arc::new(move |x| wf(x) * wf(x) - wp(x)),
        w.domain,
        "V",
    );
    let (wf, wp) = (w.w.clone(), w.w_prime.clone());
    let v_tilde = Potential::new(
        Arc::new(move |x| wf(x) * wf(x) + wp(x)),
        w.domain,
        "V~",
    );
    (v, v_tilde)
}

/// The second-order potentials and the supercharge coefficient b(x):
///
///   b  = f^2 - f' - f''/(2f) + (f'/(2f))^2 + d/(4 f^2)
///   V  = -2f' + f^2 + f''/(2f) - (f'/(2f))^2 - d/(4 f^2)
///   V~ = +2f' + f^2 + f''/(2f) - (f'/(2f))^2 - d/(4 f^2)
///
/// so that V~ - V = 4 f'. In the reducible case d = -c^2/4 these sit in the
/// symmetric energy convention: V here equals W^2 - W' - c/2 with W from
/// [`reducible_superpotentials`].
pub fn partner_pair_second_order(
    g: &GeneratingFunction,
    grid: &Grid,
    floor: f64,
) -> Result<(Potential, Potential, RealFn)> {
    g.check_nonzero(grid, floor)?;
    let d = g.d;

    let core = {
        let (f, fp, fpp) = (g.f.clone(), g.f_prime.clone(), g.f_double_prime.clone());
        move |x: f64| {
            let (fv, fpv, fppv) = (f(x), fp(x), fpp(x));
            let half = fpv / (2.0 * fv);
            fv * fv + fppv / (2.0 * fv) - half * half - d / (4.0 * fv * fv)
        }
    };

    let v = {
        let core = core.clone();
        let fp = g.f_prime.clone();
        Potential::new(Arc::new(move |x| core(x) - 2.0 * fp(x)), g.domain, "V")
    };
    let v_tilde = {
        let core = core.clone();
        let fp = g.f_prime.clone();
        Potential::new(Arc::new(move |x| core(x) + 2.0 * fp(x)), g.domain, "V~")
    };
    let b: RealFn = {
        let (f, fp, fpp) = (g.f.clone(), g.f_prime.clone(), g.f_double_prime.clone());
        Arc::new(move |x| {
            let (fv, fpv, fppv) = (f(x), fp(x), fpp(x));
            let half = fpv / (2.0 * fv);
            fv * fv - fpv - fppv / (2.0 * fv) + half * half + d / (4.0 * fv * fv)
        })
    };
    Ok((v, v_tilde, b))
}

/// Split a reducible generating function (d = -c^2/4) into the two
/// superpotentials of the chain:
///
///   W  = f - (2f' - c)/(4f),   W~ = f + (2f' - c)/(4f),
///
/// so W + W~ = 2f and W^2 + W' = W~^2 - W~' + c.
pub fn reducible_superpotentials(
    g: &GeneratingFunction,
    c: f64,
    grid: &Grid,
    floor: f64,
) -> Result<(Superpotential, Superpotential)> {
    g.check_nonzero(grid, floor)?;

    let make = |sign: f64| -> Superpotential {
        let (f, fp) = (g.f.clone(), g.f_prime.clone());
        let w: RealFn = Arc::new(move |x| f(x) + sign * (2.0 * fp(x) - c) / (4.0 * f(x)));
        let (f, fp, fpp) = (g.f.clone(), g.f_prime.clone(), g.f_double_prime.clone());
        let w_prime: RealFn = Arc::new(move |x| {
            let (fv, fpv, fppv) = (f(x), fp(x), fpp(x));
            fpv + sign * (2.0 * fppv * fv - (2.0 * fpv - c) * fpv) / (4.0 * fv * fv)
        });
        Superpotential::new(w, w_prime, g.domain)
    };
    Ok((make(-1.0), make(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn grid(lo: f64, hi: f64, margin: f64, n: usize) -> Grid {
        Grid::new(Interval::new(lo, hi, margin).unwrap(), n).unwrap()
    }

    #[test]
    fn tangent_partner_is_poeschl_teller() {
        let g = grid(-FRAC_PI_2, FRAC_PI_2, 1e-3, 101);
        let w = Superpotential::tangent(g.interval);
        let (v, vt) = partner_pair_first_order(&w);
        for x in g.points() {
            assert!((v.eval(x) + 1.0).abs() < 1e-9, "V != -1 at {x}");
            let sec2 = 1.0 / x.cos().powi(2);
            assert!((vt.eval(x) - (-1.0 + 2.0 * sec2)).abs() < 1e-6 * sec2);
        }
    }

    #[test]
    fn zero_superpotential_collapses() {
        let g = grid(-1.0, 1.0, 0.0, 33);
        let w = Superpotential::constant(0.0, g.interval);
        let (v, vt) = partner_pair_first_order(&w);
        for x in g.points() {
            assert_eq!(v.eval(x), 0.0);
            assert_eq!(vt.eval(x), 0.0);
        }
    }

    #[test]
    fn linear_superpotential_gives_oscillator() {
        let g = grid(-1.0, 1.0, 0.0, 33);
        let w = Superpotential::linear(1.0, 0.0, g.interval);
        let (v, vt) = partner_pair_first_order(&w);
        for x in g.points() {
            assert!((v.eval(x) - (x * x - 1.0)).abs() < 1e-14);
            assert!((vt.eval(x) - (x * x + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_generator_second_order() {
        let g = grid(-1.0, 1.0, 0.0, 33);
        let f0 = 1.5;
        let d = 0.7;
        let gen = GeneratingFunction::new(
            Arc::new(move |_| f0),
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
            g.interval,
            d,
        );
        let (v, vt, b) = partner_pair_second_order(&gen, &g, SINGULARITY_FLOOR).unwrap();
        let expect_v = f0 * f0 - d / (4.0 * f0 * f0);
        let expect_b = f0 * f0 + d / (4.0 * f0 * f0);
        for x in g.points() {
            assert!((v.eval(x) - expect_v).abs() < 1e-14);
            assert!((vt.eval(x) - expect_v).abs() < 1e-14);
            assert!((b(x) - expect_b).abs() < 1e-14);
        }
    }

    #[test]
    fn partner_difference_is_4_f_prime() {
        let g = grid(-1.0, 1.0, 0.0, 201);
        let gen = GeneratingFunction::new(
            Arc::new(|x: f64| 1.0 + x * x),
            Arc::new(|x: f64| 2.0 * x),
            Arc::new(|_| 2.0),
            g.interval,
            1.0,
        );
        let (v, vt, _) = partner_pair_second_order(&gen, &g, SINGULARITY_FLOOR).unwrap();
        for x in g.points() {
            assert!((vt.eval(x) - v.eval(x) - 8.0 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_generator_rejected() {
        let g = grid(-1.0, 1.0, 0.0, 33);
        let gen = GeneratingFunction::new(
            Arc::new(|x: f64| x),
            Arc::new(|_| 1.0),
            Arc::new(|_| 0.0),
            g.interval,
            1.0,
        );
        assert!(matches!(
            partner_pair_second_order(&gen, &g, SINGULARITY_FLOOR),
            Err(Error::SingularGenerator { .. })
        ));
    }

    #[test]
    fn reducible_split_constant_f() {
        let g = grid(-1.0, 1.0, 0.0, 33);
        let f0 = 2.0;
        let c = 0.8;
        let gen = GeneratingFunction::reducible(
            Arc::new(move |_| f0),
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
            g.interval,
            c,
        );
        let (w, wt) = reducible_superpotentials(&gen, c, &g, SINGULARITY_FLOOR).unwrap();
        for x in g.points() {
            assert!(((w.w)(x) - (f0 + c / (4.0 * f0))).abs() < 1e-14);
            assert!(((wt.w)(x) - (f0 - c / (4.0 * f0))).abs() < 1e-14);
        }
    }

    #[test]
    fn reducible_sum_and_chain_relation() {
        let g = grid(-1.0, 1.0, 0.0, 401);
        let c = 2.0;
        let gen = GeneratingFunction::reducible(
            Arc::new(|x: f64| 1.0 + x * x),
            Arc::new(|x: f64| 2.0 * x),
            Arc::new(|_| 2.0),
            g.interval,
            c,
        );
        let (w, wt) = reducible_superpotentials(&gen, c, &g, SINGULARITY_FLOOR).unwrap();
        for x in g.points() {
            let sum = (w.w)(x) + (wt.w)(x);
            assert!((sum - 2.0 * (1.0 + x * x)).abs() < 1e-13);
            // W^2 + W' = W~^2 - W~' + c
            let lhs = (w.w)(x).powi(2) + (w.w_prime)(x);
            let rhs = (wt.w)(x).powi(2) - (wt.w_prime)(x) + c;
            assert!((lhs - rhs).abs() < 1e-9, "chain relation broken at {x}");
        }
    }

    #[test]
    fn second_order_matches_shifted_first_order_when_reducible() {
        // With d = -c^2/4, Eq-(30)-style V equals W^2 - W' - c/2.
        let g = grid(-1.0, 1.0, 0.0, 1001);
        let c = 2.0;
        let gen = GeneratingFunction::reducible(
            Arc::new(|x: f64| 1.0 + x * x),
            Arc::new(|x: f64| 2.0 * x),
            Arc::new(|_| 2.0),
            g.interval,
            c,
        );
        let (v2, vt2, _) = partner_pair_second_order(&gen, &g, SINGULARITY_FLOOR).unwrap();
        let (w, wt) = reducible_superpotentials(&gen, c, &g, SINGULARITY_FLOOR).unwrap();
        for x in g.points() {
            let v1 = (w.w)(x).powi(2) - (w.w_prime)(x);
            assert!(
                (v2.eval(x) - (v1 - c / 2.0)).abs() < 1e-9,
                "V mismatch at {x}"
            );
            let vt1 = (wt.w)(x).powi(2) + (wt.w_prime)(x) + c;
            assert!(
                (vt2.eval(x) - (vt1 - c / 2.0)).abs() < 1e-9,
                "V~ mismatch at {x}"
            );
        }
    }

    #[test]
    fn fd_fallback_passes_consistency() {
        let g = grid(-1.0, 1.0, 0.1, 101);
        let w = Superpotential::from_fn_fd(Arc::new(|x: f64| (2.0 * x).sin()), g.interval, FD_STEP);
        assert!(w.derivative_defect(&g, 1e-4) < 1e-8);
    }
}
