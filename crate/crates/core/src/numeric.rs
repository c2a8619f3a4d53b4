//! Quadrature and finite-difference helpers shared across modules.

/// Composite Simpson over uniformly spaced samples. An odd interval count is
/// handled by a trapezoid tail on the last interval.
pub fn simpson_total(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2);
    let pairs = (n - 1) / 2;
    let mut sum = 0.0;
    for p in 0..pairs {
        let i = 2 * p;
        sum += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
    }
    if (n - 1) % 2 == 1 {
        sum += 0.5 * h * (values[n - 2] + values[n - 1]);
    }
    sum
}

/// Cumulative integral at every sample point, anchored at index 0.
///
/// Even indices accumulate composite Simpson pairs; odd indices add a
/// half-step three-point Newton-Cotes correction, keeping O(h^4) accuracy.
pub fn simpson_cumulative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3);
    let mut out = vec![0.0; n];
    for i in (2..n).step_by(2) {
        out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
    }
    for i in (1..n).step_by(2) {
        if i + 1 < n {
            out[i] =
                out[i - 1] + h / 12.0 * (5.0 * values[i - 1] + 8.0 * values[i] - values[i + 1]);
        } else {
            out[i] =
                out[i - 1] + h / 12.0 * (-values[i - 2] + 8.0 * values[i - 1] + 5.0 * values[i]);
        }
    }
    out
}

/// Fourth-order central first derivative of a closure.
pub fn central_diff<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central second derivative of sampled values at index `i`.
/// Requires 2 <= i <= n - 3.
pub fn second_derivative_samples(values: &[f64], i: usize, h: f64) -> f64 {
    (-values[i + 2] + 16.0 * values[i + 1] - 30.0 * values[i] + 16.0 * values[i - 1]
        - values[i - 2])
        / (12.0 * h * h)
}

/// Fourth-order central first derivative of sampled values at index `i`.
pub fn first_derivative_samples(values: &[f64], i: usize, h: f64) -> f64 {
    (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2]) / (12.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_cubic_exactly() {
        // f(x) = x^3 on [0, 1], 101 points -> exact up to roundoff.
        let n = 101;
        let h = 1.0 / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson_total(&vals, h) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn simpson_trapezoid_tail() {
        // Even point count exercises the tail branch.
        let n = 100;
        let h = 1.0 / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let exact = 1.0 - 1.0_f64.cos();
        assert!((simpson_total(&vals, h) - exact).abs() < 1e-7);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let n = 201;
        let h = 2.0 / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| (i as f64 * h).cos()).collect();
        let cum = simpson_cumulative(&vals, h);
        for (i, c) in cum.iter().enumerate() {
            let x = i as f64 * h;
            // The odd-index half-step rule has local error h^4 f'''/24.
            assert!((c - x.sin()).abs() < 1e-8, "bad cumulative at {x}");
        }
    }

    #[test]
    fn central_diff_on_exp() {
        let f = |x: f64| x.exp();
        let d = central_diff(&f, 0.3, 1e-3);
        assert!((d - 0.3_f64.exp()).abs() < 1e-11);
    }

    #[test]
    fn sampled_second_derivative() {
        let n = 101;
        let h = 1.0 / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| (3.0 * i as f64 * h).sin()).collect();
        let i = 50;
        let x = i as f64 * h;
        let d2 = second_derivative_samples(&vals, i, h);
        assert!((d2 + 9.0 * (3.0 * x).sin()).abs() < 1e-6);
    }
}
