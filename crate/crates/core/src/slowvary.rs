//! Slowly varying factors, comparison functions `c(t) = e^{beta t} L(e^{|t|})`,
//! Potter bounds, the smooth representation `b` and submultiplicativity.
//!
//! Every quantity is computed through `ln c`, so `beta` near 1 and `|t|` in the
//! hundreds never overflow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::{integrate, Grid, IntegrationWeights, QuadratureSpec, SignalError, Window};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlowVaryError {
    #[error("mollifier must be compactly supported with unit integral: {0}")]
    BadMollifier(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// The factor `L` in `c(t) = e^{beta t} L(e^{|t|})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SlowlyVarying {
    Constant { value: f64 },
    /// `1 + ln y` for `y >= 1`, `1` below.
    LogShift,
    /// `1 + ln(1 + ln y)` for `y >= 1`, `1` below.
    LogLog,
    /// `(1 + ln y)^rho` for `y >= 1`, `1` below.
    LogPower { rho: f64 },
    /// `y^rho`; not slowly varying unless `rho = 0`.
    Power { rho: f64 },
}

impl SlowlyVarying {
    pub fn validate(&self) -> Result<(), SlowVaryError> {
        match *self {
            SlowlyVarying::Constant { value } if !(value > 0.0 && value.is_finite()) => {
                Err(SlowVaryError::InvalidParameter(format!("constant factor must be positive, got {value}")))
            }
            SlowlyVarying::LogPower { rho } | SlowlyVarying::Power { rho } if !rho.is_finite() => {
                Err(SlowVaryError::InvalidParameter("rho must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// `ln L(y)` given `u = ln y`.
    #[inline]
    pub fn ln_at_log(&self, u: f64) -> f64 {
        let up = u.max(0.0);
        match *self {
            SlowlyVarying::Constant { value } => value.ln(),
            SlowlyVarying::LogShift => up.ln_1p(),
            SlowlyVarying::LogLog => up.ln_1p().ln_1p(),
            SlowlyVarying::LogPower { rho } => rho * up.ln_1p(),
            SlowlyVarying::Power { rho } => rho * u,
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        self.ln_at_log(y.ln()).exp()
    }

    /// Extra exponential rate `e` with `L(e^{|t+h|}) / L(e^{|t|}) <= e^{e |h|}`.
    pub fn excess_rate(&self) -> f64 {
        match *self {
            SlowlyVarying::Constant { .. } => 0.0,
            SlowlyVarying::LogShift | SlowlyVarying::LogLog => 1.0,
            SlowlyVarying::LogPower { rho } | SlowlyVarying::Power { rho } => rho.abs(),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            SlowlyVarying::Constant { value: 1.0 } => "const".into(),
            SlowlyVarying::Constant { value } => format!("const:value={value}"),
            SlowlyVarying::LogShift => "logshift".into(),
            SlowlyVarying::LogLog => "loglog".into(),
            SlowlyVarying::LogPower { rho } => format!("logpow:rho={rho}"),
            SlowlyVarying::Power { rho } => format!("power:rho={rho}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SlowVariationVerdict {
    SlowlyVarying,
    Fails { a: f64, x: f64, ratio: f64 },
}

impl SlowVariationVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, SlowVariationVerdict::SlowlyVarying)
    }
}

pub const SLOW_VARIATION_TOL: f64 = 0.02;
pub const DEFAULT_X_MAX: f64 = 1e60;
pub const DEFAULT_A_VALUES: [f64; 3] = [0.5, 2.0, 10.0];

/// Checks `|L(a x) / L(x) - 1| < 0.02` at `x = x_max` for each `a`.
pub fn slow_variation_probe(l: &SlowlyVarying, a_values: &[f64], x_max: f64) -> SlowVariationVerdict {
    let u = x_max.ln();
    for &a in a_values {
        let ratio = (l.ln_at_log(u + a.ln()) - l.ln_at_log(u)).exp();
        if !((ratio - 1.0).abs() < SLOW_VARIATION_TOL) {
            return SlowVariationVerdict::Fails { a, x: x_max, ratio };
        }
    }
    SlowVariationVerdict::SlowlyVarying
}

/// `c(t) = e^{beta t} L(e^{|t|})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonFunction {
    pub beta: f64,
    pub l: SlowlyVarying,
    /// Verdict of [`slow_variation_probe`] with the default `a` values and `x_max`.
    pub slowly_varying: bool,
}

impl ComparisonFunction {
    pub fn new(beta: f64, l: SlowlyVarying) -> Result<Self, SlowVaryError> {
        if !beta.is_finite() {
            return Err(SlowVaryError::InvalidParameter("beta must be finite".into()));
        }
        l.validate()?;
        let slowly_varying = slow_variation_probe(&l, &DEFAULT_A_VALUES, DEFAULT_X_MAX).passed();
        Ok(Self { beta, l, slowly_varying })
    }

    pub fn exponential(beta: f64) -> Self {
        Self::new(beta, SlowlyVarying::Constant { value: 1.0 }).expect("finite beta")
    }

    #[inline]
    pub fn ln_c(&self, t: f64) -> f64 {
        self.beta * t + self.l.ln_at_log(t.abs())
    }

    pub fn c(&self, t: f64) -> f64 {
        self.ln_c(t).exp()
    }

    /// `ln c(t) - beta t`, the part the representation smooths.
    #[inline]
    fn reduced(&self, t: f64) -> f64 {
        self.l.ln_at_log(t.abs())
    }

    pub fn describe(&self) -> String {
        format!("c:beta={},L={}", self.beta, self.l.name())
    }
}

/// Outcome of a probe-box search for a two-sided bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PotterVerdict {
    Pass { a_eps: f64, big_a_eps: f64 },
    /// The constant keeps growing with the probe box; `(t, h)` attains the extreme.
    Violation { t: f64, h: f64, log_excess: f64 },
}

impl PotterVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PotterVerdict::Pass { .. })
    }
}

/// Default probe box `|t|, |h| <= 30`, step `0.25`.
pub fn default_potter_probe() -> (Grid, Grid) {
    let g = Grid::span(-30.0, 30.0, 0.25).expect("static grid");
    (g, g)
}

#[derive(Clone, Copy)]
struct Extreme {
    value: f64,
    t: f64,
    h: f64,
}

/// Max of `score(t, h)` over the box and over its inner half, witness kept
/// at the first maximiser in `(t, h)` scan order.
fn box_max(ts: &Grid, hs: &Grid, score: impl Fn(f64, f64) -> f64 + Sync) -> (Extreme, f64) {
    let t_half = 0.5 * ts.start().abs().max(ts.end().abs());
    let h_half = 0.5 * hs.start().abs().max(hs.end().abs());
    let rows: Vec<(Extreme, f64)> = (0..ts.count())
        .into_par_iter()
        .map(|i| {
            let t = ts.node(i);
            let mut best = Extreme { value: f64::NEG_INFINITY, t, h: hs.start() };
            let mut inner = f64::NEG_INFINITY;
            for k in 0..hs.count() {
                let h = hs.node(k);
                let v = score(t, h);
                if v > best.value {
                    best = Extreme { value: v, t, h };
                }
                if t.abs() <= t_half && h.abs() <= h_half && v > inner {
                    inner = v;
                }
            }
            (best, inner)
        })
        .collect();
    let mut best = rows[0].0;
    let mut inner = f64::NEG_INFINITY;
    for (row, row_inner) in rows {
        if row.value > best.value {
            best = row;
        }
        inner = inner.max(row_inner);
    }
    (best, inner)
}

/// Relative slack allowed between the full-box and inner-box constants.
const BOX_SLACK: f64 = 1e-9;

/// Probes `a_eps e^{beta t - eps|t|} <= c(t + h) / c(h) <= A_eps e^{beta t + eps|t|}`.
///
/// On a finite box both constants are always finite; the bound is judged to
/// hold when neither constant grows between the inner half-box and the full
/// box, i.e. the extremes are attained well inside the probe region.
pub fn potter_check(c: &ComparisonFunction, epsilon: f64, ts: &Grid, hs: &Grid) -> PotterVerdict {
    let r = |t: f64, h: f64| c.ln_c(t + h) - c.ln_c(h) - c.beta * t;
    let (upper, upper_inner) = box_max(ts, hs, |t, h| r(t, h) - epsilon * t.abs());
    let (lower, lower_inner) = box_max(ts, hs, |t, h| -(r(t, h) + epsilon * t.abs()));
    let grows = |full: f64, inner: f64| full > inner + BOX_SLACK * (1.0 + inner.abs());
    if grows(upper.value, upper_inner) {
        return PotterVerdict::Violation { t: upper.t, h: upper.h, log_excess: upper.value - upper_inner };
    }
    if grows(lower.value, lower_inner) {
        return PotterVerdict::Violation { t: lower.t, h: lower.h, log_excess: lower.value - lower_inner };
    }
    PotterVerdict::Pass { a_eps: (-lower.value).exp(), big_a_eps: upper.value.exp() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SubmultiplicativeVerdict {
    Pass { a_min: f64 },
    Violation { t: f64, h: f64, a_probe: f64 },
}

impl SubmultiplicativeVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, SubmultiplicativeVerdict::Pass { .. })
    }
}

/// Smallest `A` with `c(t + h) <= A c(t) c(h)` on the probes, or the
/// maximiser when the constant keeps growing with the box.
pub fn submultiplicative_check(c: &ComparisonFunction, ts: &Grid, hs: &Grid) -> SubmultiplicativeVerdict {
    let (best, inner) = box_max(ts, hs, |t, h| c.ln_c(t + h) - c.ln_c(t) - c.ln_c(h));
    if best.value > inner + BOX_SLACK * (1.0 + inner.abs()) {
        SubmultiplicativeVerdict::Violation { t: best.t, h: best.h, a_probe: best.value.exp() }
    } else {
        SubmultiplicativeVerdict::Pass { a_min: best.value.exp() }
    }
}

/// `max_{t in panel} |c(t + h) / (c(h) e^{beta t}) - 1|`.
pub fn translate_ratio_deviation(c: &ComparisonFunction, t_panel: &[f64], h: f64) -> f64 {
    t_panel
        .iter()
        .map(|&t| ((c.ln_c(t + h) - c.ln_c(h) - c.beta * t).exp() - 1.0).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationResult {
    pub grid: Grid,
    pub b: Vec<f64>,
    pub b_prime: Vec<f64>,
    /// `ln c(x) - beta x - b(x)`.
    pub residual: Vec<f64>,
    /// `max |b'|` over the outer 20% of the grid (by `|x|`).
    pub derivative_tail: f64,
    /// `max |residual|` over the same band.
    pub residual_tail: f64,
}

const MOLLIFIER_TOL: f64 = 1e-6;
const OUTER_FRACTION: f64 = 0.2;

/// `b(x) = int (ln c(t + x) - beta (t + x)) phi(t) dt` and its derivative
/// `b'(x) = -int (ln c(t + x) - beta (t + x)) phi'(t) dt`.
pub fn representation(
    c: &ComparisonFunction,
    mollifier: &Window,
    grid: &Grid,
) -> Result<RepresentationResult, SlowVaryError> {
    if mollifier.support().is_none() {
        return Err(SlowVaryError::BadMollifier("not compactly supported".into()));
    }
    if !mollifier.has_derivatives() {
        return Err(SlowVaryError::BadMollifier("no derivative evaluator".into()));
    }
    let spec = QuadratureSpec::default().with_step(1e-3);
    let weights = IntegrationWeights::window_only(mollifier);
    let mass = integrate(|t| mollifier.value(t), 0.0, &weights, &spec)?;
    if (mass.re - 1.0).abs() > MOLLIFIER_TOL || mass.im.abs() > MOLLIFIER_TOL {
        return Err(SlowVaryError::BadMollifier(format!("integral is {mass}")));
    }
    let rows: Vec<(f64, f64, f64)> = grid
        .nodes()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&x| -> Result<(f64, f64, f64), SlowVaryError> {
            let b = integrate(|t| (c.reduced(t + x) * mollifier.value(t).re).into(), 0.0, &weights, &spec)?.re;
            let d = integrate(
                |t| {
                    let (_, d1, _) = mollifier.jet(t).expect("checked above");
                    (-c.reduced(t + x) * d1.re).into()
                },
                0.0,
                &weights,
                &spec,
            )?
            .re;
            Ok((b, d, c.reduced(x) - b))
        })
        .collect::<Result<_, _>>()?;
    let xmax = grid.start().abs().max(grid.end().abs());
    let outer = |x: f64| x.abs() >= (1.0 - OUTER_FRACTION) * xmax;
    let mut derivative_tail: f64 = 0.0;
    let mut residual_tail: f64 = 0.0;
    for (x, &(_, d, r)) in grid.nodes().zip(&rows) {
        if outer(x) {
            derivative_tail = derivative_tail.max(d.abs());
            residual_tail = residual_tail.max(r.abs());
        }
    }
    Ok(RepresentationResult {
        grid: *grid,
        b: rows.iter().map(|r| r.0).collect(),
        b_prime: rows.iter().map(|r| r.1).collect(),
        residual: rows.iter().map(|r| r.2).collect(),
        derivative_tail,
        residual_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slow_variation_examples() {
        let one = SlowlyVarying::Constant { value: 1.0 };
        assert!(slow_variation_probe(&one, &[0.5, 2.0, 10.0], 1e6).passed());
        assert!(slow_variation_probe(&SlowlyVarying::LogShift, &[10.0], DEFAULT_X_MAX).passed());
        match slow_variation_probe(&SlowlyVarying::Power { rho: 0.1 }, &[2.0], 1e6) {
            SlowVariationVerdict::Fails { ratio, .. } => assert!((ratio - 2f64.powf(0.1)).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn log_shift_is_too_slow_to_pass_at_a_million() {
        // (1 + ln 1e7) / (1 + ln 1e6) = 1.155.
        match slow_variation_probe(&SlowlyVarying::LogShift, &[10.0], 1e6) {
            SlowVariationVerdict::Fails { ratio, .. } => assert!((ratio - 1.1555).abs() < 1e-3),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn comparison_values() {
        let c = ComparisonFunction::new(0.3, SlowlyVarying::LogShift).unwrap();
        assert!((c.c(2.0) - (0.6f64).exp() * 3.0).abs() < 1e-12);
        assert!((c.c(-2.0) - (-0.6f64).exp() * 3.0).abs() < 1e-12);
        assert!(c.slowly_varying);
        assert!(!ComparisonFunction::new(0.3, SlowlyVarying::Power { rho: 0.2 }).unwrap().slowly_varying);
        assert!(ComparisonFunction::new(0.3, SlowlyVarying::Constant { value: -1.0 }).is_err());
    }

    #[test]
    fn potter_for_pure_exponential_is_exact() {
        let (ts, hs) = default_potter_probe();
        match potter_check(&ComparisonFunction::exponential(0.5), 0.1, &ts, &hs) {
            PotterVerdict::Pass { a_eps, big_a_eps } => {
                assert!((a_eps - 1.0).abs() < 1e-12 && (big_a_eps - 1.0).abs() < 1e-12);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn submultiplicative_examples() {
        let (ts, hs) = default_potter_probe();
        match submultiplicative_check(&ComparisonFunction::exponential(0.5), &ts, &hs) {
            SubmultiplicativeVerdict::Pass { a_min } => assert!((a_min - 1.0).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
        let c = ComparisonFunction::new(0.3, SlowlyVarying::LogShift).unwrap();
        assert!(submultiplicative_check(&c, &ts, &hs).passed());
        let inv = ComparisonFunction::new(0.3, SlowlyVarying::LogPower { rho: -1.0 }).unwrap();
        assert!(!submultiplicative_check(&inv, &ts, &hs).passed());
    }

    #[test]
    fn representation_of_exponentials() {
        let g = Grid::span(-5.0, 5.0, 0.5).unwrap();
        let r = representation(&ComparisonFunction::exponential(0.5), &Window::compact_bump(), &g).unwrap();
        assert!(r.b.iter().all(|b| b.abs() < 1e-10));
        assert!(r.residual.iter().all(|v| v.abs() < 1e-10));
        let two = ComparisonFunction::new(0.5, SlowlyVarying::Constant { value: 2.0 }).unwrap();
        let r = representation(&two, &Window::compact_bump(), &g).unwrap();
        assert!(r.b.iter().all(|b| (b - 2f64.ln()).abs() < 1e-10));
        assert!(r.residual.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn non_compact_mollifier_rejected() {
        let g = Grid::span(-1.0, 1.0, 0.5).unwrap();
        let r = representation(&ComparisonFunction::exponential(0.5), &Window::gaussian(), &g);
        assert!(matches!(r, Err(SlowVaryError::BadMollifier(_))));
    }
}
