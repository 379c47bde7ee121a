use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use super::source::interpolate;
use super::{Grid, SignalError};

/// Declared bound `|psi(t)| <= magnitude * e^{-rate |t|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEnvelope {
    pub magnitude: f64,
    pub rate: f64,
}

impl DecayEnvelope {
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
        self.magnitude * (-self.rate * t.abs()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowShape {
    /// `e^{-pi t^2}`
    GaussianPi,
    /// `e^{-t^2}`
    Gaussian,
    /// `sech t`
    Sech,
    /// `exp(-1/(1-t^2))` on `(-1, 1)`, normalised to unit integral.
    CompactBump,
}

impl WindowShape {
    pub fn name(&self) -> &'static str {
        match self {
            WindowShape::GaussianPi => "gaussian_pi",
            WindowShape::Gaussian => "gaussian",
            WindowShape::Sech => "sech",
            WindowShape::CompactBump => "compact_bump",
        }
    }

    /// Decay rate picked to keep the truncated domain short at `tau = 1e-12`.
    fn default_rate(&self) -> f64 {
        match self {
            WindowShape::GaussianPi => 6.0 * PI,
            WindowShape::Gaussian => 10.5,
            WindowShape::Sech => 1.0,
            WindowShape::CompactBump => 40.0,
        }
    }

    /// Smallest `M` with `|psi(t)| <= M e^{-k|t|}`, or `None` when no finite
    /// `M` exists for this `k`.
    fn magnitude_for_rate(&self, k: f64) -> Option<f64> {
        match self {
            // max of -pi t^2 + k|t| is k^2 / (4 pi)
            WindowShape::GaussianPi => Some((k * k / (4.0 * PI)).exp()),
            WindowShape::Gaussian => Some((k * k / 4.0).exp()),
            // sech t <= 2 e^{-|t|}
            WindowShape::Sech => (k <= 1.0).then_some(2.0),
            WindowShape::CompactBump => Some(bump_peak() * k.exp()),
        }
    }

    fn peak(&self) -> f64 {
        match self {
            WindowShape::CompactBump => bump_peak(),
            _ => 1.0,
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        match self {
            WindowShape::CompactBump => Some((-1.0, 1.0)),
            _ => None,
        }
    }

    /// `(psi, psi', psi'')` at `t`.
    fn jet(&self, t: f64) -> (f64, f64, f64) {
        match self {
            WindowShape::GaussianPi => {
                let v = (-PI * t * t).exp();
                (v, -TAU * t * v, (4.0 * PI * PI * t * t - TAU) * v)
            }
            WindowShape::Gaussian => {
                let v = (-t * t).exp();
                (v, -2.0 * t * v, (4.0 * t * t - 2.0) * v)
            }
            WindowShape::Sech => {
                let s = 1.0 / t.cosh();
                let th = t.tanh();
                (s, -s * th, s * (th * th - s * s))
            }
            WindowShape::CompactBump => {
                if t.abs() >= 1.0 {
                    return (0.0, 0.0, 0.0);
                }
                let u = 1.0 - t * t;
                let v = (-1.0 / u).exp() / bump_normaliser();
                let g1 = -2.0 * t / (u * u);
                let g2 = -2.0 / (u * u) - 8.0 * t * t / (u * u * u);
                (v, v * g1, v * (g1 * g1 + g2))
            }
        }
    }
}

/// `int_{-1}^{1} exp(-1/(1-t^2)) dt`, by trapezoid (the integrand is flat
/// to all orders at the endpoints, so the rule converges very fast).
fn bump_normaliser() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        let n = 20_000;
        let h = 2.0 / n as f64;
        (1..n)
            .map(|i| {
                let t = -1.0 + i as f64 * h;
                (-1.0 / (1.0 - t * t)).exp()
            })
            .sum::<f64>()
            * h
    })
}

fn bump_peak() -> f64 {
    (-1.0f64).exp() / bump_normaliser()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WindowKind {
    ClosedForm(WindowShape),
    /// Linear interpolation inside the span, zero outside. Derivatives by
    /// central differences when `derivatives` is set.
    Sampled { grid: Grid, values: Vec<Complex64>, derivatives: bool },
}

/// Analysis / synthesis window `psi`, optionally tilted to
/// `e^{2 pi tilt t} psi(t)` and/or complex-conjugated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    kind: WindowKind,
    decay: DecayEnvelope,
    tilt: f64,
    conjugated: bool,
}

const DECAY_SLACK: f64 = 1e-12;

impl Window {
    pub fn closed_form(shape: WindowShape) -> Self {
        let rate = shape.default_rate();
        let magnitude = shape.magnitude_for_rate(rate).expect("default rate is admissible");
        Self { kind: WindowKind::ClosedForm(shape), decay: DecayEnvelope { magnitude, rate }, tilt: 0.0, conjugated: false }
    }

    pub fn gaussian_pi() -> Self {
        Self::closed_form(WindowShape::GaussianPi)
    }

    pub fn gaussian() -> Self {
        Self::closed_form(WindowShape::Gaussian)
    }

    pub fn sech() -> Self {
        Self::closed_form(WindowShape::Sech)
    }

    pub fn compact_bump() -> Self {
        Self::closed_form(WindowShape::CompactBump)
    }

    /// Redeclares the decay rate of a closed-form window, recomputing the
    /// matching magnitude.
    pub fn with_decay_rate(mut self, rate: f64) -> Result<Self, SignalError> {
        let WindowKind::ClosedForm(shape) = self.kind else {
            return Err(SignalError::InvalidParameter("sampled windows take an explicit envelope".into()));
        };
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(SignalError::InvalidEnvelope(format!("rate must be non-negative, got {rate}")));
        }
        let magnitude = shape.magnitude_for_rate(rate).ok_or_else(|| {
            SignalError::InvalidEnvelope(format!("{} admits no envelope with rate {rate}", shape.name()))
        })?;
        self.decay = DecayEnvelope { magnitude, rate };
        Ok(self)
    }

    /// Sampled window with the tightest magnitude for the given decay rate.
    pub fn sampled(grid: Grid, values: Vec<Complex64>, rate: f64) -> Result<Self, SignalError> {
        if values.len() != grid.count() {
            return Err(SignalError::InvalidParameter(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.count()
            )));
        }
        let magnitude = grid
            .nodes()
            .zip(&values)
            .map(|(t, v)| v.norm() * (rate * t.abs()).exp())
            .fold(0.0, f64::max);
        let magnitude = if magnitude > 0.0 { magnitude } else { 1.0 };
        Self::sampled_with_envelope(grid, values, DecayEnvelope::new(magnitude, rate)?)
    }

    pub fn sampled_with_envelope(
        grid: Grid,
        values: Vec<Complex64>,
        decay: DecayEnvelope,
    ) -> Result<Self, SignalError> {
        if values.len() != grid.count() {
            return Err(SignalError::InvalidParameter(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.count()
            )));
        }
        let w = Self { kind: WindowKind::Sampled { grid, values, derivatives: false }, decay, tilt: 0.0, conjugated: false };
        if let Some((t, magnitude, bound)) = w.decay_violation() {
            return Err(SignalError::EnvelopeViolation { t, magnitude, bound });
        }
        Ok(w)
    }

    /// Enables central-difference derivatives on a sampled window.
    pub fn with_finite_differences(mut self) -> Self {
        if let WindowKind::Sampled { derivatives, .. } = &mut self.kind {
            *derivatives = true;
        }
        self
    }

    /// `psi_eta(t) = e^{2 pi eta t} psi(t)`.
    pub fn twisted(&self, eta: f64) -> Self {
        let mut w = self.clone();
        // conj(e^{a t} psi) = e^{a t} conj(psi) for real a, so the order of
        // the two modifiers does not matter.
        w.tilt += eta;
        w
    }

    pub fn conjugate(&self) -> Self {
        let mut w = self.clone();
        w.conjugated = !w.conjugated;
        w
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn name(&self) -> String {
        let base = match &self.kind {
            WindowKind::ClosedForm(shape) => shape.name().to_string(),
            WindowKind::Sampled { .. } => "sampled".to_string(),
        };
        match (self.tilt != 0.0, self.conjugated) {
            (false, false) => base,
            (true, false) => format!("{base}~tilt{}", self.tilt),
            (false, true) => format!("conj({base})"),
            (true, true) => format!("conj({base})~tilt{}", self.tilt),
        }
    }

    /// Declared envelope of the untilted window.
    pub fn decay(&self) -> DecayEnvelope {
        self.decay
    }

    /// Envelope including the tilt: rate `k - 2 pi |tilt|`.
    pub fn effective_decay(&self) -> DecayEnvelope {
        DecayEnvelope { magnitude: self.decay.magnitude, rate: self.decay.rate - TAU * self.tilt.abs() }
    }

    /// `sup |psi|` of the untilted window; the truncation threshold is
    /// measured relative to it.
    pub fn peak(&self) -> f64 {
        match &self.kind {
            WindowKind::ClosedForm(shape) => shape.peak(),
            WindowKind::Sampled { values, .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// Closed interval outside which the window vanishes, if any.
    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.kind {
            WindowKind::ClosedForm(shape) => shape.support(),
            WindowKind::Sampled { grid, .. } => Some((grid.start(), grid.end())),
        }
    }

    pub fn has_derivatives(&self) -> bool {
        match &self.kind {
            WindowKind::ClosedForm(_) => true,
            WindowKind::Sampled { derivatives, .. } => *derivatives,
        }
    }

    #[inline]
    fn base_value(&self, t: f64) -> Complex64 {
        match &self.kind {
            WindowKind::ClosedForm(shape) => Complex64::new(shape.jet(t).0, 0.0),
            WindowKind::Sampled { grid, values, .. } => interpolate(grid, values, t),
        }
    }

    fn base_jet(&self, t: f64) -> Option<(Complex64, Complex64, Complex64)> {
        match &self.kind {
            WindowKind::ClosedForm(shape) => {
                let (a, b, c) = shape.jet(t);
                Some((a.into(), b.into(), c.into()))
            }
            WindowKind::Sampled { grid, values, derivatives } => {
                if !derivatives {
                    return None;
                }
                let h = grid.step();
                let m = interpolate(grid, values, t - h);
                let z = interpolate(grid, values, t);
                let p = interpolate(grid, values, t + h);
                Some((z, (p - m) / (2.0 * h), (p - 2.0 * z + m) / (h * h)))
            }
        }
    }

    fn finish(&self, z: Complex64) -> Complex64 {
        if self.conjugated {
            z.conj()
        } else {
            z
        }
    }

    #[inline]
    pub fn value(&self, t: f64) -> Complex64 {
        let v = self.base_value(t);
        let v = if self.tilt != 0.0 { v * (TAU * self.tilt * t).exp() } else { v };
        self.finish(v)
    }

    /// `(psi, psi', psi'')` at `t`, including tilt and conjugation.
    pub fn jet(&self, t: f64) -> Option<(Complex64, Complex64, Complex64)> {
        let (v, d1, d2) = self.base_jet(t)?;
        if self.tilt == 0.0 {
            return Some((self.finish(v), self.finish(d1), self.finish(d2)));
        }
        let a = TAU * self.tilt;
        let e = (a * t).exp();
        Some((
            self.finish(v * e),
            self.finish((d1 + v * a) * e),
            self.finish((d2 + d1 * (2.0 * a) + v * (a * a)) * e),
        ))
    }

    /// First point (ascending) where the declared decay bound fails, probing
    /// every sample of a sampled window and `[-40, 40]` step `0.01` otherwise.
    pub fn decay_violation(&self) -> Option<(f64, f64, f64)> {
        let env = self.decay;
        let check = |t: f64, m: f64| {
            let b = env.bound(t);
            (m > b * (1.0 + DECAY_SLACK) + f64::MIN_POSITIVE).then_some((t, m, b))
        };
        match &self.kind {
            WindowKind::Sampled { grid, values, .. } => {
                grid.nodes().zip(values).find_map(|(t, v)| check(t, v.norm()))
            }
            WindowKind::ClosedForm(shape) => (0..8001).find_map(|i| {
                let t = -40.0 + i as f64 * 0.01;
                check(t, shape.jet(t).0.abs())
            }),
        }
    }

    /// First probe point where the (untilted) window is not strictly
    /// positive. Compactly supported windows are probed inside their support.
    pub fn positivity_violation(&self) -> Option<f64> {
        let (lo, hi) = match self.support() {
            Some((a, b)) => (a, b),
            None => (-10.0, 10.0),
        };
        let n = 2001;
        let h = (hi - lo) / (n - 1) as f64;
        (1..n - 1).map(|i| lo + i as f64 * h).find(|&t| {
            let v = self.value(t);
            !(v.re > 0.0) || v.im.abs() > 1e-15 * v.re.abs()
        })
    }
}
