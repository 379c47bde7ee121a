//! Small numerical helpers shared across modules.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `exp(2 pi i * turns)`.
///
/// The argument is reduced to the nearest quarter turn before calling
/// `sin_cos`, so quarter turns are exact and two arguments that differ by a
/// multiple of a quarter turn produce results that differ only by an exact
/// rotation (sign flips and swaps).
#[inline]
pub fn cis_turns(turns: f64) -> Complex64 {
    let quarters = (4.0 * turns + 0.5).floor();
    let r = turns - 0.25 * quarters;
    let (s, c) = (TAU * r).sin_cos();
    match (quarters as i64).rem_euclid(4) {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// Natural log of a non-negative magnitude, `-inf` for zero.
#[inline]
pub fn ln_abs(z: Complex64) -> f64 {
    z.norm().ln()
}

/// Least-squares slope, intercept and RMS residual of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Some((slope, intercept, (rss / nf).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(cis_turns(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(cis_turns(0.25), Complex64::new(-0.0, 1.0));
        assert_eq!(cis_turns(0.5).re, -1.0);
        assert_eq!(cis_turns(0.5).im.abs(), 0.0);
        assert_eq!(cis_turns(-0.25).re.abs(), 0.0);
        assert_eq!(cis_turns(-0.25).im, -1.0);
        assert_eq!(cis_turns(7.0).re, 1.0);
    }

    #[test]
    fn matches_libm_elsewhere() {
        for k in -200..200 {
            let t = k as f64 * 0.0137 + 0.003;
            let z = cis_turns(t);
            let (s, c) = (TAU * t).sin_cos();
            assert!((z.re - c).abs() < 1e-12 && (z.im - s).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn quarter_shift_is_an_exact_rotation() {
        let a = cis_turns(0.3125 + 0.0625 * 3.0);
        let b = cis_turns(0.3125 + 0.0625 * 3.0 + 1.25);
        assert_eq!(b.re.to_bits(), (-a.im).to_bits());
        assert_eq!(b.im.to_bits(), a.re.to_bits());
    }

    #[test]
    fn fit_recovers_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let (s, c, r) = linear_fit(&xs, &ys).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (c + 1.0).abs() < 1e-12 && r < 1e-12);
    }
}
