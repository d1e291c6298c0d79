//! Boys function `F_n(T) = ∫₀¹ t^{2n} exp(-T t²) dt`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Above this argument the asymptotic form is used; below it, the series.
const SWITCH: f64 = 35.0;

pub fn boys(n: usize, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeBoysArgument(t));
    }
    Ok(if t < SWITCH {
        boys_series(n, t)
    } else {
        boys_asymptotic(n, t)
    })
}

/// `e^{-T} Σ_k (2T)^k / ((2n+1)(2n+3)…(2n+2k+1))`, all terms positive.
fn boys_series(n: usize, t: f64) -> f64 {
    let mut denom = 2.0 * n as f64 + 1.0;
    let mut term = 1.0 / denom;
    let mut sum = term;
    for _ in 0..400 {
        denom += 2.0;
        term *= 2.0 * t / denom;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    (-t).exp() * sum
}

/// `(2n-1)!! / 2^{n+1} · sqrt(π / T^{2n+1})`
fn boys_asymptotic(n: usize, t: f64) -> f64 {
    let mut df = 1.0;
    let mut k = 2 * n as i64 - 1;
    while k > 1 {
        df *= k as f64;
        k -= 2;
    }
    df / 2f64.powi(n as i32 + 1) * (PI / t.powi(2 * n as i32 + 1)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson quadrature of the defining integral.
    fn boys_quadrature(n: usize, t: f64) -> f64 {
        let m = 20_000;
        let h = 1.0 / m as f64;
        let f = |x: f64| x.powi(2 * n as i32) * (-t * x * x).exp();
        let mut s = f(0.0) + f(1.0);
        for i in 1..m {
            let x = i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn zero_argument() {
        for n in 0..6 {
            assert!((boys(n, 0.0).unwrap() - 1.0 / (2 * n + 1) as f64).abs() < 1e-15);
        }
    }

    /// `γ(n+½, T) / (2 T^{n+½})` evaluated in 40-digit arithmetic (mpmath).
    const REFERENCE: [(usize, f64, f64); 18] = [
            (0, 1e-8, 0.99999999666666667667),
            (0, 0.1, 0.96764331263559183101),
            (0, 1.0, 0.7468241328124270254),
            (0, 5.0, 0.39571230961051354205),
            (0, 20.0, 0.1981663648299736541),
            (0, 34.9, 0.15001415056438639139),
            (0, 35.1, 0.14958614926258831653),
            (0, 80.0, 0.099083182440150275334),
            (1, 1e-8, 0.33333333133333334048),
            (1, 1.0, 0.1894723458204923519),
            (1, 34.9, 0.0021491998648192792918),
            (1, 35.1, 0.0021308568271023895444),
            (2, 0.1, 0.18625500479262147256),
            (2, 5.0, 0.010995436178434295539),
            (2, 80.0, 0.000011611310442205110391),
            (4, 1.0, 0.049623241133156738143),
            (4, 20.0, 8.1278555493588377072e-6),
            (4, 35.1, 6.467437388601571092e-7),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(n, t, exact) in &REFERENCE {
            let d = (boys(n, t).unwrap() - exact).abs();
            assert!(d < 1e-14, "n = {n}, T = {t}, diff {d:e}");
        }
    }

    #[test]
    fn matches_quadrature() {
        for n in 0..5 {
            for &t in &[0.05, 0.7, 3.0, 12.0, 30.0, 40.0] {
                let q = boys_quadrature(n, t);
                assert!((boys(n, t).unwrap() - q).abs() < 1e-12, "n = {n}, T = {t}");
            }
        }
    }

    #[test]
    fn downward_recursion_holds_across_switch() {
        // F_{n}(T) = (2T F_{n+1}(T) + e^{-T}) / (2n+1)
        for &t in &[34.0, 35.0, 36.0] {
            for n in 0..4 {
                let lhs = boys(n, t).unwrap();
                let rhs = (2.0 * t * boys(n + 1, t).unwrap() + (-t).exp()) / (2 * n + 1) as f64;
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn negative_argument_is_an_error() {
        assert!(boys(0, -1.0).is_err());
    }
}
