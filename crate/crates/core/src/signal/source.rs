use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::{Grid, SignalError};

/// Declared bound `|f(t)| <= magnitude * e^{rate |t|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEnvelope {
    pub magnitude: f64,
    pub rate: f64,
}

impl GrowthEnvelope {
    pub fn new(magnitude: f64, rate: f64) -> Result<Self, SignalError> {
        if !(magnitude > 0.0) || !magnitude.is_finite() {
            return Err(SignalError::InvalidEnvelope(format!("magnitude must be positive, got {magnitude}")));
        }
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(SignalError::InvalidEnvelope(format!("rate must be non-negative, got {rate}")));
        }
        Ok(Self { magnitude, rate })
    }

    #[inline]
    pub fn bound(&self, t: f64) -> f64 {
        self.magnitude * (self.rate * t.abs()).exp()
    }
}

/// Registry of closed-form signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Formula {
    /// `amp e^{beta t}` for `t >= 0`, zero before.
    ExpStep { beta: f64, amp: f64 },
    /// `amp e^{beta t} (1 + t)` for `t >= 0`, zero before.
    ExpPoly { beta: f64, amp: f64 },
    /// Two-sided `amp e^{beta t}`.
    Exp { beta: f64, amp: f64 },
    /// `amp e^{-pi t^2}`.
    Gaussian { amp: f64 },
    /// `amp sin(2 pi freq t + phase)`.
    Sinusoid { freq: f64, amp: f64, phase: f64 },
    Constant { value: f64 },
}

impl Formula {
    fn eval(&self, t: f64) -> f64 {
        match *self {
            Formula::ExpStep { beta, amp } => {
                if t >= 0.0 {
                    amp * (beta * t).exp()
                } else {
                    0.0
                }
            }
            Formula::ExpPoly { beta, amp } => {
                if t >= 0.0 {
                    amp * (beta * t).exp() * (1.0 + t)
                } else {
                    0.0
                }
            }
            Formula::Exp { beta, amp } => amp * (beta * t).exp(),
            Formula::Gaussian { amp } => amp * (-PI * t * t).exp(),
            Formula::Sinusoid { freq, amp, phase } => amp * (TAU * freq * t + phase).sin(),
            Formula::Constant { value } => value,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Formula::ExpStep { .. } => "exp_step",
            Formula::ExpPoly { .. } => "exp_poly",
            Formula::Exp { .. } => "exp",
            Formula::Gaussian { .. } => "gaussian",
            Formula::Sinusoid { .. } => "sinusoid",
            Formula::Constant { .. } => "constant",
        }
    }

    fn scaled(&self, lambda: f64) -> Self {
        match *self {
            Formula::ExpStep { beta, amp } => Formula::ExpStep { beta, amp: amp * lambda },
            Formula::ExpPoly { beta, amp } => Formula::ExpPoly { beta, amp: amp * lambda },
            Formula::Exp { beta, amp } => Formula::Exp { beta, amp: amp * lambda },
            Formula::Gaussian { amp } => Formula::Gaussian { amp: amp * lambda },
            Formula::Sinusoid { freq, amp, phase } => Formula::Sinusoid { freq, amp: amp * lambda, phase },
            Formula::Constant { value } => Formula::Constant { value: value * lambda },
        }
    }

    /// Tightest convenient envelope for the formula.
    fn default_envelope(&self) -> GrowthEnvelope {
        let positive = |m: f64| if m > 0.0 { m } else { 1.0 };
        match *self {
            Formula::ExpStep { beta, amp } => GrowthEnvelope { magnitude: positive(amp.abs()), rate: beta.max(0.0) },
            Formula::Exp { beta, amp } => GrowthEnvelope { magnitude: positive(amp.abs()), rate: beta.abs() },
            Formula::ExpPoly { beta, amp } => {
                // (1 + t) e^{-d t} peaks at t = 1/d - 1 when d < 1.
                let rate = beta.max(0.0) + 0.25;
                let d = rate - beta;
                let poly = if d < 1.0 { (d - 1.0).exp() / d } else { 1.0 };
                GrowthEnvelope { magnitude: positive(amp.abs() * poly), rate }
            }
            Formula::Gaussian { amp } | Formula::Sinusoid { amp, .. } => {
                GrowthEnvelope { magnitude: positive(amp.abs()), rate: 0.0 }
            }
            Formula::Constant { value } => GrowthEnvelope { magnitude: positive(value.abs()), rate: 0.0 },
        }
    }
}

/// A registry formula evaluated at `t + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub formula: Formula,
    pub shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SignalKind {
    /// Uniform samples, linearly interpolated inside the span and zero outside it.
    Sampled { grid: Grid, values: Vec<Complex64> },
    /// Weighted Dirac points with strictly increasing locations.
    Atomic { atoms: Vec<Atom> },
    ClosedForm(ClosedForm),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSource {
    kind: SignalKind,
    envelope: GrowthEnvelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EnvelopeVerdict {
    Pass,
    Violation { t: f64, magnitude: f64, bound: f64 },
}

impl EnvelopeVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, EnvelopeVerdict::Pass)
    }
}

const PROBE_LO: f64 = -40.0;
const PROBE_STEP: f64 = 0.01;
const PROBE_COUNT: usize = 8001;
const ENVELOPE_SLACK: f64 = 1e-12;

/// Checks the declared growth bound on every sample, atom, or (for closed
/// forms) on a fixed probe grid over `[-40, 40]` with step `0.01`.
pub fn validate_envelope(source: &SignalSource) -> EnvelopeVerdict {
    let env = source.envelope;
    let check = |t: f64, z: Complex64| {
        let magnitude = z.norm();
        let bound = env.bound(t);
        if magnitude > bound * (1.0 + ENVELOPE_SLACK) {
            Some(EnvelopeVerdict::Violation { t, magnitude, bound })
        } else {
            None
        }
    };
    let found = match &source.kind {
        SignalKind::Sampled { grid, values } => {
            grid.nodes().zip(values.iter()).find_map(|(t, &v)| check(t, v))
        }
        SignalKind::Atomic { atoms } => atoms.iter().find_map(|a| check(a.location, a.weight)),
        SignalKind::ClosedForm(cf) => (0..PROBE_COUNT).find_map(|i| {
            let t = PROBE_LO + i as f64 * PROBE_STEP;
            check(t, Complex64::new(cf.formula.eval(t + cf.shift), 0.0))
        }),
    };
    found.unwrap_or(EnvelopeVerdict::Pass)
}

impl SignalSource {
    /// Builds a source and rejects it if the declared envelope is violated.
    pub fn new(kind: SignalKind, envelope: GrowthEnvelope) -> Result<Self, SignalError> {
        let source = Self::declared(kind, envelope)?;
        match validate_envelope(&source) {
            EnvelopeVerdict::Pass => Ok(source),
            EnvelopeVerdict::Violation { t, magnitude, bound } => {
                Err(SignalError::EnvelopeViolation { t, magnitude, bound })
            }
        }
    }

    /// Structural checks only; the envelope claim is left for
    /// [`validate_envelope`] to judge.
    pub fn declared(kind: SignalKind, envelope: GrowthEnvelope) -> Result<Self, SignalError> {
        GrowthEnvelope::new(envelope.magnitude, envelope.rate)?;
        match &kind {
            SignalKind::Sampled { grid, values } => {
                if values.len() != grid.count() {
                    return Err(SignalError::InvalidParameter(format!(
                        "{} samples for a grid of {} nodes",
                        values.len(),
                        grid.count()
                    )));
                }
                if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(SignalError::InvalidParameter("non-finite sample".into()));
                }
            }
            SignalKind::Atomic { atoms } => {
                if atoms.windows(2).any(|w| !(w[0].location < w[1].location)) {
                    return Err(SignalError::UnsortedAtoms);
                }
            }
            SignalKind::ClosedForm(cf) => {
                if !cf.shift.is_finite() {
                    return Err(SignalError::InvalidParameter("non-finite shift".into()));
                }
            }
        }
        Ok(Self { kind, envelope })
    }

    pub fn closed_form(formula: Formula) -> Self {
        Self { kind: SignalKind::ClosedForm(ClosedForm { formula, shift: 0.0 }), envelope: formula.default_envelope() }
    }

    pub fn exp_step(beta: f64) -> Self {
        Self::closed_form(Formula::ExpStep { beta, amp: 1.0 })
    }

    pub fn exp_poly(beta: f64) -> Self {
        Self::closed_form(Formula::ExpPoly { beta, amp: 1.0 })
    }

    pub fn exp(beta: f64) -> Self {
        Self::closed_form(Formula::Exp { beta, amp: 1.0 })
    }

    pub fn gaussian() -> Self {
        Self::closed_form(Formula::Gaussian { amp: 1.0 })
    }

    pub fn sinusoid(freq: f64) -> Self {
        Self::closed_form(Formula::Sinusoid { freq, amp: 1.0, phase: 0.0 })
    }

    pub fn constant(value: f64) -> Self {
        Self::closed_form(Formula::Constant { value })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Unit point mass at `t0`.
    pub fn delta(t0: f64) -> Self {
        Self::atomic(vec![Atom { location: t0, weight: Complex64::new(1.0, 0.0) }])
            .expect("single atom is sorted")
    }

    /// Unit point masses at the integers `lo..=hi`.
    pub fn dirac_comb(lo: i64, hi: i64) -> Self {
        let atoms = (lo..=hi)
            .map(|k| Atom { location: k as f64, weight: Complex64::new(1.0, 0.0) })
            .collect();
        Self::atomic(atoms).expect("integers are sorted")
    }

    /// Atomic measure with the tightest envelope `M = max |c_k|`, `sigma = 0`.
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self, SignalError> {
        let m = atoms.iter().map(|a| a.weight.norm()).fold(0.0, f64::max);
        let envelope = GrowthEnvelope { magnitude: if m > 0.0 { m } else { 1.0 }, rate: 0.0 };
        Self::declared(SignalKind::Atomic { atoms }, envelope)
    }

    /// Sampled signal with envelope `M = max |v|`, `sigma = 0` (a finite record is bounded).
    pub fn sampled(grid: Grid, values: Vec<Complex64>) -> Result<Self, SignalError> {
        let m = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let envelope = GrowthEnvelope { magnitude: if m > 0.0 { m } else { 1.0 }, rate: 0.0 };
        Self::declared(SignalKind::Sampled { grid, values }, envelope)
    }

    pub fn kind(&self) -> &SignalKind {
        &self.kind
    }

    pub fn envelope(&self) -> GrowthEnvelope {
        self.envelope
    }

    /// Replaces the envelope claim without validating it.
    pub fn with_declared_envelope(mut self, envelope: GrowthEnvelope) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn is_pointwise(&self) -> bool {
        !matches!(self.kind, SignalKind::Atomic { .. })
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.kind {
            SignalKind::Atomic { atoms } => Some(atoms),
            _ => None,
        }
    }

    /// Short fixture name used in reports and file names.
    pub fn name(&self) -> String {
        match &self.kind {
            SignalKind::Sampled { .. } => "sampled".into(),
            SignalKind::Atomic { atoms } => format!("atomic{}", atoms.len()),
            SignalKind::ClosedForm(cf) => cf.formula.name().into(),
        }
    }

    /// `f(t)`. Sampled sources interpolate linearly and reject `t` outside the span.
    pub fn evaluate(&self, t: f64) -> Result<Complex64, SignalError> {
        match &self.kind {
            SignalKind::Atomic { .. } => Err(SignalError::NotPointwise),
            SignalKind::Sampled { grid, .. } if !grid.contains(t) => {
                Err(SignalError::OutOfRange { t, lo: grid.start(), hi: grid.end() })
            }
            _ => Ok(self.value_or_zero(t)),
        }
    }

    /// Pointwise value used by the quadrature engine: sampled records are
    /// zero outside their span and atomic sources contribute nothing.
    #[inline]
    pub(crate) fn value_or_zero(&self, t: f64) -> Complex64 {
        match &self.kind {
            SignalKind::ClosedForm(cf) => Complex64::new(cf.formula.eval(t + cf.shift), 0.0),
            SignalKind::Sampled { grid, values } => interpolate(grid, values, t),
            SignalKind::Atomic { .. } => Complex64::new(0.0, 0.0),
        }
    }

    /// Interval outside which `f` vanishes, when known.
    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.kind {
            SignalKind::ClosedForm(cf) => match cf.formula {
                Formula::ExpStep { .. } | Formula::ExpPoly { .. } => Some((-cf.shift, f64::INFINITY)),
                _ => None,
            },
            SignalKind::Sampled { grid, .. } => Some((grid.start(), grid.end())),
            SignalKind::Atomic { atoms } => match (atoms.first(), atoms.last()) {
                (Some(a), Some(b)) => Some((a.location, b.location)),
                _ => None,
            },
        }
    }

    /// The translate `t -> f(t + h)`.
    pub fn translated(&self, h: f64) -> Self {
        let grow = (self.envelope.rate * h.abs()).exp();
        let envelope = GrowthEnvelope { magnitude: self.envelope.magnitude * grow, rate: self.envelope.rate };
        let kind = match &self.kind {
            SignalKind::Sampled { grid, values } => {
                SignalKind::Sampled { grid: grid.shifted(-h), values: values.clone() }
            }
            SignalKind::Atomic { atoms } => SignalKind::Atomic {
                atoms: atoms.iter().map(|a| Atom { location: a.location - h, weight: a.weight }).collect(),
            },
            SignalKind::ClosedForm(cf) => SignalKind::ClosedForm(ClosedForm { formula: cf.formula, shift: cf.shift + h }),
        };
        Self { kind, envelope }
    }

    /// `lambda * f` for real `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let s = Complex64::new(lambda, 0.0);
        let kind = match &self.kind {
            SignalKind::Sampled { grid, values } => {
                SignalKind::Sampled { grid: *grid, values: values.iter().map(|v| v * s).collect() }
            }
            SignalKind::Atomic { atoms } => SignalKind::Atomic {
                atoms: atoms.iter().map(|a| Atom { location: a.location, weight: a.weight * s }).collect(),
            },
            SignalKind::ClosedForm(cf) => {
                SignalKind::ClosedForm(ClosedForm { formula: cf.formula.scaled(lambda), shift: cf.shift })
            }
        };
        let m = self.envelope.magnitude * lambda.abs();
        let envelope = GrowthEnvelope { magnitude: if m > 0.0 { m } else { 1.0 }, rate: self.envelope.rate };
        Self { kind, envelope }
    }
}

#[inline]
pub(crate) fn interpolate(grid: &Grid, values: &[Complex64], t: f64) -> Complex64 {
    if !grid.contains(t) {
        return Complex64::new(0.0, 0.0);
    }
    let pos = (t - grid.start()) / grid.step();
    let i = (pos.floor() as usize).min(grid.count() - 2);
    let frac = pos - i as f64;
    values[i] * (1.0 - frac) + values[i + 1] * frac
}
