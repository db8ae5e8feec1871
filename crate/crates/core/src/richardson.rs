//! Richardson extrapolation for sequences computed at mesh widths `h, h/2, h/4, ...`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolation {
    /// Best extrapolated value.
    pub value: f64,
    /// Estimated error of `value`.
    pub error: f64,
    /// Order observed from the last three levels (`NaN` with fewer levels).
    pub observed_order: f64,
    /// Finest raw value.
    pub finest: f64,
}

/// Observed convergence order `log2((v0 - v1) / (v1 - v2))` from three successive halvings.
pub fn observed_order(coarse: f64, mid: f64, fine: f64) -> f64 {
    let num = coarse - mid;
    let den = mid - fine;
    if den == 0.0 || num == 0.0 {
        return f64::NAN;
    }
    (num / den).abs().log2()
}

/// One elimination step of an `h^order` error term between consecutive levels.
pub fn eliminate(coarse: f64, fine: f64, order: f64) -> f64 {
    let r = 2f64.powf(order);
    (r * fine - coarse) / (r - 1.0)
}

/// Romberg-style table for errors in even powers `h^2, h^4, ...` and levels ordered
/// coarse to fine.
///
/// With `n` levels, `n - 1` elimination columns are built; the error estimate is the
/// difference between the last two diagonal entries.
pub fn extrapolate_even(levels: &[f64]) -> Extrapolation {
    let n = levels.len();
    assert!(n >= 1, "need at least one level");
    let finest = levels[n - 1];
    if n == 1 {
        return Extrapolation {
            value: finest,
            error: f64::INFINITY,
            observed_order: f64::NAN,
            finest,
        };
    }
    let mut col: Vec<f64> = levels.to_vec();
    let mut diag = vec![finest];
    for k in 1..n {
        let order = 2.0 * k as f64;
        col = col.windows(2).map(|w| eliminate(w[0], w[1], order)).collect();
        diag.push(*col.last().unwrap());
    }
    let value = diag[diag.len() - 1];
    let error = (diag[diag.len() - 1] - diag[diag.len() - 2]).abs();
    let observed_order = if n >= 3 {
        observed_order(levels[n - 3], levels[n - 2], levels[n - 1])
    } else {
        f64::NAN
    };
    Extrapolation {
        value,
        error,
        observed_order,
        finest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_quadratic_error() {
        let f = |h: f64| 3.0 + 0.7 * h * h;
        let levels: Vec<f64> = [0.4, 0.2, 0.1].iter().map(|&h| f(h)).collect();
        let e = extrapolate_even(&levels);
        assert!((e.value - 3.0).abs() < 1e-14);
        assert!((e.observed_order - 2.0).abs() < 1e-12);
    }

    #[test]
    fn removes_quartic_term_too() {
        let f = |h: f64| -1.0 + 0.5 * h * h - 2.0 * h.powi(4) + 0.1 * h.powi(6);
        let levels: Vec<f64> = [0.2, 0.1, 0.05, 0.025].iter().map(|&h| f(h)).collect();
        let e = extrapolate_even(&levels);
        assert!((e.value + 1.0).abs() < 1e-13);
        assert!(e.error < 1e-8);
    }
}
