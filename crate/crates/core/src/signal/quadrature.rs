use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DecayEnvelope, GrowthEnvelope, SignalError, SignalSource, Window};

/// Composite trapezoid rule on the lattice `j * step`, truncated where the
/// envelope product falls below `truncation_tol` times the window peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub step: f64,
    pub truncation_tol: f64,
    pub max_halfwidth: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { step: 0.01, truncation_tol: 1e-12, max_halfwidth: 60.0 }
    }
}

impl QuadratureSpec {
    pub fn new(step: f64, truncation_tol: f64, max_halfwidth: f64) -> Result<Self, SignalError> {
        let spec = Self { step, truncation_tol, max_halfwidth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.truncation_tol = tol;
        self
    }

    pub fn with_max_halfwidth(mut self, w: f64) -> Self {
        self.max_halfwidth = w;
        self
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.step) || !ok(self.truncation_tol) || !ok(self.max_halfwidth) {
            return Err(SignalError::InvalidParameter(format!(
                "quadrature step, tolerance and half-width must be positive: {self:?}"
            )));
        }
        if self.truncation_tol >= 1.0 {
            return Err(SignalError::InvalidParameter("truncation tolerance must be below 1".into()));
        }
        Ok(())
    }
}

/// Envelope data that decides where an integrand `f(t) w(t - x)` is negligible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationWeights {
    pub signal: GrowthEnvelope,
    pub window: DecayEnvelope,
    /// `sup |w|`; the threshold is relative to it.
    pub window_peak: f64,
    /// Support of `w` relative to the centre.
    pub window_support: Option<(f64, f64)>,
    /// Absolute support of `f`.
    pub signal_support: Option<(f64, f64)>,
}

impl IntegrationWeights {
    pub fn new(signal: &SignalSource, window: &Window) -> Self {
        Self {
            signal: signal.envelope(),
            window: window.effective_decay(),
            window_peak: window.peak(),
            window_support: window.support(),
            signal_support: signal.support(),
        }
    }

    /// Weights for a window against a bounded, unsupported factor.
    pub fn window_only(window: &Window) -> Self {
        Self {
            signal: GrowthEnvelope { magnitude: 1.0, rate: 0.0 },
            window: window.effective_decay(),
            window_peak: window.peak(),
            window_support: window.support(),
            signal_support: None,
        }
    }
}

/// Lattice indices `(lo, hi)` of the first and last node of the truncated
/// domain around `center`, inclusive.
pub fn integration_range(
    center: f64,
    weights: &IntegrationWeights,
    spec: &QuadratureSpec,
) -> Result<(i64, i64), SignalError> {
    spec.validate()?;
    let k = weights.window.rate;
    let sigma = weights.signal.rate;
    let peak = if weights.window_peak > 0.0 { weights.window_peak } else { weights.window.magnitude };
    let c0 = (weights.window.magnitude.ln() - peak.ln() - spec.truncation_tol.ln()).max(0.0);
    let outward = if k > sigma { c0 / (k - sigma) } else { f64::INFINITY };
    let ax = center.abs();
    let inward = {
        let near = c0 / (k + sigma);
        if near <= ax {
            near
        } else if k > sigma {
            (c0 - 2.0 * sigma * ax) / (k - sigma)
        } else {
            f64::INFINITY
        }
    };
    let (left, right) = if center > 0.0 {
        (inward, outward)
    } else if center < 0.0 {
        (outward, inward)
    } else {
        (outward, outward)
    };
    let mut lo = center - left.min(spec.max_halfwidth);
    let mut hi = center + right.min(spec.max_halfwidth);
    if let Some((a, b)) = weights.window_support {
        lo = lo.max(center + a);
        hi = hi.min(center + b);
    }
    if let Some((a, b)) = weights.signal_support {
        lo = lo.max(a);
        hi = hi.min(b);
    }
    if !(hi > lo) {
        return Err(SignalError::EmptyDomain);
    }
    // Snap endpoints that sit on the lattice up to rounding.
    let lo_i = (lo / spec.step - 1e-9).ceil() as i64;
    let hi_i = (hi / spec.step + 1e-9).floor() as i64;
    if hi_i - lo_i < 1 {
        return Err(SignalError::EmptyDomain);
    }
    Ok((lo_i, hi_i))
}

/// Composite trapezoid value of `integrand` over the truncated domain,
/// summed left to right.
pub fn integrate<F>(
    integrand: F,
    center: f64,
    weights: &IntegrationWeights,
    spec: &QuadratureSpec,
) -> Result<Complex64, SignalError>
where
    F: Fn(f64) -> Complex64,
{
    let (lo, hi) = integration_range(center, weights, spec)?;
    Ok(trapezoid_on_lattice(&integrand, lo, hi, spec.step))
}

pub(crate) fn trapezoid_on_lattice<F>(integrand: &F, lo: i64, hi: i64, step: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let mut acc = integrand(lo as f64 * step) * 0.5;
    for j in lo + 1..hi {
        acc += integrand(j as f64 * step);
    }
    acc += integrand(hi as f64 * step) * 0.5;
    acc * step
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex64 {
        move |t| Complex64::new(f(t), 0.0)
    }

    #[test]
    fn gaussian_integral() {
        let w = Window::gaussian_pi();
        let v = integrate(|t| w.value(t), 0.0, &IntegrationWeights::window_only(&w), &QuadratureSpec::default()).unwrap();
        assert!((v.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_integrand() {
        let w = Window::gaussian_pi();
        let v = integrate(|_| Complex64::new(0.0, 0.0), 0.0, &IntegrationWeights::window_only(&w), &QuadratureSpec::default())
            .unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn shifted_gaussian() {
        let w = Window::gaussian();
        let f = SignalSource::exp(0.5);
        let weights = IntegrationWeights::new(&f, &w);
        let v = integrate(real(|t: f64| (-t * t + 0.5 * t).exp()), 0.0, &weights, &QuadratureSpec::default()).unwrap();
        let expect = PI.sqrt() * (1.0f64 / 16.0).exp();
        assert!((v.re - expect).abs() < 1e-8, "{} vs {expect}", v.re);
    }

    #[test]
    fn range_respects_supports() {
        let w = Window::compact_bump();
        let f = SignalSource::exp_step(0.5);
        let weights = IntegrationWeights::new(&f, &w);
        let spec = QuadratureSpec::default();
        assert_eq!(integration_range(0.0, &weights, &spec).unwrap(), (0, 100));
        assert_eq!(integration_range(3.0, &weights, &spec).unwrap(), (200, 400));
        assert_eq!(integration_range(-3.0, &weights, &spec), Err(SignalError::EmptyDomain));
    }

    #[test]
    fn range_is_asymmetric_for_growing_signals() {
        let w = Window::sech();
        let f = SignalSource::exp(0.5);
        let weights = IntegrationWeights::new(&f, &w);
        let spec = QuadratureSpec::default().with_max_halfwidth(1e6);
        let (lo, hi) = integration_range(10.0, &weights, &spec).unwrap();
        let left = 10.0 - lo as f64 * spec.step;
        let right = hi as f64 * spec.step - 10.0;
        assert!(right > left, "outward side should reach further: {left} {right}");
    }

    #[test]
    fn linear_in_integrand() {
        let w = Window::gaussian();
        let weights = IntegrationWeights::window_only(&w);
        let spec = QuadratureSpec::default();
        let g = |t: f64| Complex64::new((-t * t).exp(), t.sin() * (-t * t).exp());
        let h = |t: f64| Complex64::new((-t * t).exp() * t, 0.0);
        let a = Complex64::new(0.3, -1.7);
        let lhs = integrate(|t| g(t) * a + h(t), 0.0, &weights, &spec).unwrap();
        let rhs = integrate(g, 0.0, &weights, &spec).unwrap() * a + integrate(h, 0.0, &weights, &spec).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300));
    }

    #[test]
    fn bad_spec_rejected() {
        assert!(QuadratureSpec::new(0.0, 1e-12, 60.0).is_err());
        assert!(QuadratureSpec::new(0.01, 2.0, 60.0).is_err());
    }
}
