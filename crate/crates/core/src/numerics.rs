//! Small numerical utilities: composite Simpson quadrature, uniform grids and
//! log-log slope fitting.

use crate::error::{Result, RingError};
use crate::scalar::Scalar;

/// Composite Simpson rule on `[a, b]` with `panels` subintervals (rounded up to even).
pub fn simpson<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, panels: usize) -> T {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / T::lit(n as f64);
    let mut odd = T::zero();
    let mut even = T::zero();
    for k in 1..n {
        let x = a + h * T::lit(k as f64);
        if k % 2 == 1 {
            odd = odd + f(x);
        } else {
            even = even + f(x);
        }
    }
    h / T::lit(3.0) * (f(a) + f(b) + T::lit(4.0) * odd + T::lit(2.0) * even)
}

/// Panel count for Simpson's rule given a bound on `|f''''|` over an interval of
/// length `width`, so the truncation error stays below `tolerance`.
///
/// Uses `E <= width * h^4 * max|f''''| / 180`.
pub fn simpson_panels<T: Scalar>(width: T, fourth_derivative_bound: T, tolerance: T, cap: usize) -> Result<usize> {
    if fourth_derivative_bound <= T::zero() || width <= T::zero() {
        return Ok(2);
    }
    let h = (T::lit(180.0) * tolerance / (width * fourth_derivative_bound)).powf(T::lit(0.25));
    let needed = (width / h).ceil();
    let needed_f = needed.to_f64_lossy();
    if !(needed_f <= cap as f64) {
        return Err(RingError::TruncationInsufficient { needed: needed_f, cap });
    }
    Ok((needed_f as usize).max(2).next_multiple_of(2))
}

/// `count` evenly spaced values from `start` to `stop` inclusive; `count == 1` yields `[start]`.
pub fn linspace<T: Scalar>(start: T, stop: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / T::lit((count - 1) as f64);
            (0..count).map(|k| if k == count - 1 { stop } else { start + step * T::lit(k as f64) }).collect()
        }
    }
}

/// `count` logarithmically spaced values from `start` to `stop` inclusive (both > 0).
pub fn logspace<T: Scalar>(start: T, stop: T, count: usize) -> Vec<T> {
    linspace(start.ln(), stop.ln(), count).into_iter().map(T::exp).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(RingError::Domain("slope fit needs at least two paired samples".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > T::zero())) {
        return Err(RingError::Domain("slope fit needs strictly positive samples".into()));
    }
    let n = T::lit(xs.len() as f64);
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ly.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (x, y) in lx.iter().zip(&ly) {
        sxy = sxy + (*x - mx) * (*y - my);
        sxx = sxx + (*x - mx) * (*x - mx);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert_abs_diff_eq!(v, 4.0 - 4.0 + 2.0, epsilon = 1e-14);
    }

    #[test]
    fn simpson_panel_count_meets_target() {
        let gamma: f64 = 3.0;
        let panels = simpson_panels(2.0, gamma.powi(5), 1e-9, 10_000_000).unwrap();
        let v = simpson(|z| gamma * (-gamma * z).exp(), 0.0, 2.0, panels);
        assert_abs_diff_eq!(v, 1.0 - (-6.0f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(0.3, 9.0, 1), vec![0.3]);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = logspace(1e-4f64, 1e-2, 9);
        let ys: Vec<f64> = xs.iter().map(|x| 7.0 * x.powi(4)).collect();
        assert_abs_diff_eq!(loglog_slope(&xs, &ys).unwrap(), 4.0, epsilon = 1e-10);
    }
}
