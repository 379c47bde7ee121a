//! Exponentially moderate weights, time-frequency weights of class `M1` and
//! probe-based validation of both.
//!
//! Evaluators return `ln` of the weight so that `e^{x^2}`-type weights can be
//! probed without overflow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

use crate::signal::Grid;
use crate::slowvary::ComparisonFunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("weight {name} is not positive at {point}")]
    NonPositive { name: String, point: String },
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
}

type LnFn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type LnFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `omega(x) > 0` with the claim `omega(x + y) <= A omega(y) e^{a|x|}`.
#[derive(Clone)]
pub struct Weight1D {
    name: String,
    ln_eval: LnFn1,
    pub big_a: f64,
    pub a: f64,
}

impl fmt::Debug for Weight1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight1D").field("name", &self.name).field("A", &self.big_a).field("a", &self.a).finish()
    }
}

impl Weight1D {
    /// From a direct evaluator. Non-positive values surface during validation.
    pub fn from_fn(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static, big_a: f64, a: f64) -> Self {
        Self::from_ln_fn(name, move |x| f(x).ln(), big_a, a)
    }

    /// From `ln omega`.
    pub fn from_ln_fn(
        name: impl Into<String>,
        ln_f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        big_a: f64,
        a: f64,
    ) -> Self {
        Self { name: name.into(), ln_eval: Arc::new(ln_f), big_a, a }
    }

    pub fn one() -> Self {
        Self::from_ln_fn("one", |_| 0.0, 1.0, 0.0)
    }

    /// `e^{r|x|}`.
    pub fn exp(rate: f64) -> Self {
        Self::from_ln_fn(format!("exp{rate}"), move |x| rate * x.abs(), 1.0, rate.abs())
    }

    /// `(1 + |x|)^p`, claimed with `a = 1` and the matching `A = max (1+u)^p e^{-u}`.
    pub fn poly(p: f64) -> Self {
        let big_a = if p > 1.0 { (p.ln() * p + 1.0 - p).exp() } else { 1.0 };
        Self::from_ln_fn(format!("poly{p}"), move |x| p * x.abs().ln_1p(), big_a, if p == 0.0 { 0.0 } else { 1.0 })
    }

    /// `max(1, e^{beta x})`.
    pub fn ramp(beta: f64) -> Self {
        Self::from_ln_fn(format!("ramp{beta}"), move |x| (beta * x).max(0.0), 1.0, beta.abs())
    }

    /// `omega = c` for a comparison function.
    pub fn comparison(c: ComparisonFunction) -> Self {
        Self::from_ln_fn(c.describe(), move |x| c.ln_c(x), 1.0, c.beta.abs() + c.l.excess_rate())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn ln_value(&self, x: f64) -> f64 {
        (self.ln_eval)(x)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.ln_value(x).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightClass {
    M,
    M1,
}

/// `m(x, xi) > 0` with the `M1` claim
/// `m(x1 + x2, xi1 + xi2) <= A m(x1, xi1) e^{a|x2|} (1 + |xi2|)^s`.
#[derive(Clone)]
pub struct TFWeight {
    name: String,
    ln_eval: LnFn2,
    pub class: WeightClass,
    pub big_a: f64,
    pub a: f64,
    pub s: f64,
}

impl fmt::Debug for TFWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TFWeight")
            .field("name", &self.name)
            .field("class", &self.class)
            .field("A", &self.big_a)
            .field("a", &self.a)
            .field("s", &self.s)
            .finish()
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<(), WeightError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(WeightError::InvalidParameter(format!("{name} must be non-negative, got {v}")))
    }
}

impl TFWeight {
    pub fn from_ln_fn(
        name: impl Into<String>,
        ln_f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        class: WeightClass,
        big_a: f64,
        a: f64,
        s: f64,
    ) -> Self {
        Self { name: name.into(), ln_eval: Arc::new(ln_f), class, big_a, a, s }
    }

    pub fn one() -> Self {
        Self::from_ln_fn("one", |_, _| 0.0, WeightClass::M1, 1.0, 0.0, 0.0)
    }

    /// `v_{s,a}(x, xi) = e^{a|x|} (1 + |xi|)^s`.
    pub fn v_sa(s: f64, a: f64) -> Result<Self, WeightError> {
        check_nonneg("s", s)?;
        check_nonneg("a", a)?;
        Ok(Self::from_ln_fn(
            format!("vsa:s={s},a={a}"),
            move |x, xi| a * x.abs() + s * xi.abs().ln_1p(),
            WeightClass::M1,
            1.0,
            a,
            s,
        ))
    }

    /// `omega_s(x, xi) = omega(x) (1 + |xi|)^s`.
    pub fn omega_s(omega: Weight1D, s: f64) -> Result<Self, WeightError> {
        check_nonneg("s", s)?;
        let (big_a, a) = (omega.big_a, omega.a);
        let name = format!("omega_s:s={s},omega={}", omega.name());
        Ok(Self::from_ln_fn(name, move |x, xi| omega.ln_value(x) + s * xi.abs().ln_1p(), WeightClass::M1, big_a, a, s))
    }

    /// `m_eps(x, xi) = e^{beta x + eps|x|} (1 + |xi|)^s`.
    pub fn m_eps(beta: f64, eps: f64, s: f64) -> Result<Self, WeightError> {
        if !(eps > 0.0 && eps.is_finite()) || !beta.is_finite() {
            return Err(WeightError::InvalidParameter(format!("need finite beta and eps > 0, got {beta}, {eps}")));
        }
        check_nonneg("s", s)?;
        Ok(Self::from_ln_fn(
            format!("m_eps:beta={beta},eps={eps},s={s}"),
            move |x, xi| beta * x + eps * x.abs() + s * xi.abs().ln_1p(),
            WeightClass::M1,
            1.0,
            beta.abs() + eps,
            s,
        ))
    }

    /// `c_s(x, xi) = c(x) (1 + |xi|)^s`.
    pub fn c_s(c: ComparisonFunction, s: f64) -> Result<Self, WeightError> {
        check_nonneg("s", s)?;
        let a = c.beta.abs() + c.l.excess_rate();
        Ok(Self::from_ln_fn(
            format!("c_s:beta={},L={},s={s}", c.beta, c.l.name()),
            move |x, xi| c.ln_c(x) + s * xi.abs().ln_1p(),
            WeightClass::M1,
            1.0,
            a,
            s,
        ))
    }

    /// `1 / m` with the same claimed constants.
    pub fn reciprocal(&self) -> Self {
        let inner = self.ln_eval.clone();
        Self::from_ln_fn(format!("1/({})", self.name), move |x, xi| -inner(x, xi), self.class, self.big_a, self.a, self.s)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn ln_value(&self, x: f64, xi: f64) -> f64 {
        (self.ln_eval)(x, xi)
    }

    pub fn value(&self, x: f64, xi: f64) -> f64 {
        self.ln_value(x, xi).exp()
    }

    /// The 1-D weight `x -> m(x, 0)`.
    pub fn time_marginal(&self) -> Weight1D {
        let inner = self.ln_eval.clone();
        Weight1D::from_ln_fn(format!("{}@xi=0", self.name), move |x| inner(x, 0.0), self.big_a, self.a)
    }
}

/// Why a probe set rejected a claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The claimed `A` is exceeded.
    ExceedsClaim,
    /// The required constant keeps growing with the probe box.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WeightVerdict {
    Pass { a_min: f64, probe: String },
    Violation { witness: Vec<f64>, ratio: f64, bound: f64, kind: ViolationKind, probe: String },
}

impl WeightVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, WeightVerdict::Pass { .. })
    }
}

/// Default probe grid `[-20, 20]` step `0.25`.
pub fn default_probe() -> Grid {
    Grid::span(-20.0, 20.0, 0.25).expect("static grid")
}

/// Default 4-D probe for the `M1` check: `[-20, 20]` step `1`.
pub fn default_class_probe() -> Grid {
    Grid::span(-20.0, 20.0, 1.0).expect("static grid")
}

const SLACK: f64 = 1e-9;

fn half(g: &Grid) -> f64 {
    0.5 * g.start().abs().max(g.end().abs())
}

#[derive(Clone)]
struct Scan {
    /// First point (in scan order) with `score > ln A`.
    first_excess: Option<(Vec<f64>, f64)>,
    best: (Vec<f64>, f64),
    inner_best: f64,
}

impl Scan {
    fn merge(mut self, other: Scan) -> Scan {
        if self.first_excess.is_none() {
            self.first_excess = other.first_excess;
        }
        if other.best.1 > self.best.1 {
            self.best = other.best;
        }
        self.inner_best = self.inner_best.max(other.inner_best);
        self
    }

    fn verdict(self, ln_claim: f64, probe: String) -> WeightVerdict {
        if let Some((witness, score)) = self.first_excess {
            return WeightVerdict::Violation {
                witness,
                ratio: score.exp(),
                bound: ln_claim.exp(),
                kind: ViolationKind::ExceedsClaim,
                probe,
            };
        }
        let (witness, best) = self.best;
        if best > self.inner_best + SLACK * (1.0 + self.inner_best.abs()) {
            return WeightVerdict::Violation {
                witness,
                ratio: best.exp(),
                bound: self.inner_best.exp(),
                kind: ViolationKind::Unbounded,
                probe,
            };
        }
        WeightVerdict::Pass { a_min: best.exp(), probe }
    }
}

/// Checks `omega(x + y) <= A omega(y) e^{a|x|}` on `xs x ys`.
///
/// Fails on the first probe pair (x outer, y inner, ascending) that exceeds
/// the claimed `A`, or when the smallest admissible `A` grows between the
/// inner half of the probe box and the full box.
pub fn validate_moderate(w: &Weight1D, xs: &Grid, ys: &Grid) -> Result<WeightVerdict, WeightError> {
    let non_positive = |v: f64| v.is_nan() || v == f64::NEG_INFINITY;
    for p in xs.nodes().chain(ys.nodes()) {
        if non_positive(w.ln_value(p)) {
            return Err(WeightError::NonPositive { name: w.name().into(), point: format!("x = {p}") });
        }
    }
    let ln_claim = w.big_a.ln();
    let (hx, hy) = (half(xs), half(ys));
    let scans: Vec<Result<Scan, WeightError>> = (0..xs.count())
        .into_par_iter()
        .map(|i| {
            let x = xs.node(i);
            let mut scan = Scan { first_excess: None, best: (vec![x, ys.start()], f64::NEG_INFINITY), inner_best: f64::NEG_INFINITY };
            for y in ys.nodes() {
                let top = w.ln_value(x + y);
                if non_positive(top) {
                    return Err(WeightError::NonPositive { name: w.name().into(), point: format!("x = {}", x + y) });
                }
                let score = top - w.ln_value(y) - w.a * x.abs();
                if scan.first_excess.is_none() && score > ln_claim + SLACK {
                    scan.first_excess = Some((vec![x, y], score));
                }
                if score > scan.best.1 {
                    scan.best = (vec![x, y], score);
                }
                if x.abs() <= hx && y.abs() <= hy {
                    scan.inner_best = scan.inner_best.max(score);
                }
            }
            Ok(scan)
        })
        .collect();
    let mut acc: Option<Scan> = None;
    for s in scans {
        let s = s?;
        acc = Some(match acc {
            None => s,
            Some(a) => a.merge(s),
        });
    }
    let probe = format!("x in {}, y in {}", xs.describe(), ys.describe());
    Ok(acc.expect("grids are non-empty").verdict(ln_claim, probe))
}

/// Probe set for [`validate_class_m1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassProbe {
    pub x1: Grid,
    pub x2: Grid,
    pub xi1: Grid,
    pub xi2: Grid,
}

impl Default for ClassProbe {
    fn default() -> Self {
        let g = default_class_probe();
        Self { x1: g, x2: g, xi1: g, xi2: g }
    }
}

impl ClassProbe {
    pub fn uniform(g: Grid) -> Self {
        Self { x1: g, x2: g, xi1: g, xi2: g }
    }

    fn describe(&self) -> String {
        format!(
            "x1 in {}, x2 in {}, xi1 in {}, xi2 in {}",
            self.x1.describe(),
            self.x2.describe(),
            self.xi1.describe(),
            self.xi2.describe()
        )
    }
}

/// Checks `m(x1 + x2, xi1 + xi2) / m(x1, xi1) <= A e^{a|x2|} (1 + |xi2|)^s`
/// with scan order `(x1, x2, xi1, xi2)`, each ascending.
pub fn validate_class_m1(m: &TFWeight, probe: &ClassProbe) -> Result<WeightVerdict, WeightError> {
    let ln_claim = m.big_a.ln();
    let non_positive = |v: f64| v.is_nan() || v == f64::NEG_INFINITY;
    let (h1, h2, k1, k2) = (half(&probe.x1), half(&probe.x2), half(&probe.xi1), half(&probe.xi2));
    let scans: Vec<Result<Scan, WeightError>> = (0..probe.x1.count())
        .into_par_iter()
        .map(|i| {
            let x1 = probe.x1.node(i);
            let mut scan = Scan {
                first_excess: None,
                best: (vec![x1, probe.x2.start(), probe.xi1.start(), probe.xi2.start()], f64::NEG_INFINITY),
                inner_best: f64::NEG_INFINITY,
            };
            for x2 in probe.x2.nodes() {
                for xi1 in probe.xi1.nodes() {
                    let base = m.ln_value(x1, xi1);
                    if non_positive(base) {
                        return Err(WeightError::NonPositive { name: m.name().into(), point: format!("({x1}, {xi1})") });
                    }
                    for xi2 in probe.xi2.nodes() {
                        let top = m.ln_value(x1 + x2, xi1 + xi2);
                        if non_positive(top) {
                            return Err(WeightError::NonPositive {
                                name: m.name().into(),
                                point: format!("({}, {})", x1 + x2, xi1 + xi2),
                            });
                        }
                        let score = top - base - m.a * x2.abs() - m.s * xi2.abs().ln_1p();
                        if scan.first_excess.is_none() && score > ln_claim + SLACK {
                            scan.first_excess = Some((vec![x1, x2, xi1, xi2], score));
                        }
                        if score > scan.best.1 {
                            scan.best = (vec![x1, x2, xi1, xi2], score);
                        }
                        if x1.abs() <= h1 && x2.abs() <= h2 && xi1.abs() <= k1 && xi2.abs() <= k2 {
                            scan.inner_best = scan.inner_best.max(score);
                        }
                    }
                }
            }
            Ok(scan)
        })
        .collect();
    let mut acc: Option<Scan> = None;
    for s in scans {
        let s = s?;
        acc = Some(match acc {
            None => s,
            Some(a) => a.merge(s),
        });
    }
    Ok(acc.expect("grids are non-empty").verdict(ln_claim, probe.describe()))
}
