//! Asymptotic constant recovery from windowed transforms.
//!
//! For `c(x) = e^{beta x} L(e^{|x|})` the pipeline estimates
//! `J(xi) = lim_{x -> inf} e^{2 pi i xi x} V_psi f(x, xi) / c(x)`, recovers
//! `C = J(0) / Psi_beta(0)` with `Psi_beta(xi) = int conj(psi(t)) e^{(beta - 2 pi i xi) t} dt`,
//! and cross-checks the hypotheses (boundedness, window integrability, monotonicity).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modulation::{stabilized_bound, ModulationError, StabilizedBound};
use crate::numeric::cis_turns;
use crate::signal::{
    integrate, GrowthEnvelope, Grid, IntegrationWeights, QuadratureSpec, SignalError, SignalKind, SignalSource,
    Window,
};
use crate::slowvary::{ComparisonFunction, SlowlyVarying};
use crate::stft::{forward_points, Source, StftError};
use crate::weights::Weight1D;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TauberianError {
    #[error("ln c({x}) = {ln_c} is outside the representable range")]
    Overflow { x: f64, ln_c: f64 },
    #[error("|Psi_beta(0)| = {0} is too small to divide by")]
    DegenerateWindow(f64),
    #[error("window {0} has no derivative evaluator")]
    MissingDerivatives(String),
    #[error("signal {0} cannot be evaluated pointwise")]
    NotPointwise(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Stft(#[from] StftError),
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Largest `|ln c|` that still exponentiates to a finite, non-zero double.
const LN_RANGE: f64 = 709.0;

/// Stopping rule for a sampled limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRule {
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub m_tail: usize,
}

impl Default for LimitRule {
    fn default() -> Self {
        Self { tol_rel: 0.01, tol_abs: 1e-12, m_tail: 8 }
    }
}

impl LimitRule {
    fn validate(&self) -> Result<(), TauberianError> {
        if self.tol_rel > 0.0 && self.tol_abs >= 0.0 && self.m_tail >= 1 {
            Ok(())
        } else {
            Err(TauberianError::InvalidParameter(format!("bad limit rule {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailWindow {
    pub x_lo: f64,
    pub x_hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: Complex64,
    pub converged: bool,
    /// `max |g - value|` over the tail window.
    pub spread: f64,
    pub tail_window: TailWindow,
}

/// Mean of the last `m_tail` samples and the stabilisation verdict.
pub fn limit_of(xs: &[f64], g: &[Complex64], rule: &LimitRule) -> LimitEstimate {
    assert_eq!(xs.len(), g.len());
    let m = rule.m_tail.min(g.len()).max(1);
    let tail = &g[g.len() - m..];
    let value = tail.iter().sum::<Complex64>() / m as f64;
    let spread = tail.iter().map(|v| (v - value).norm()).fold(0.0, f64::max);
    LimitEstimate {
        value,
        converged: spread <= rule.tol_rel * (value.norm() + rule.tol_abs),
        spread,
        tail_window: TailWindow { x_lo: xs[xs.len() - m], x_hi: xs[xs.len() - 1], count: m },
    }
}

fn ln_c_checked(c: &ComparisonFunction, x: f64) -> Result<f64, TauberianError> {
    let ln_c = c.ln_c(x);
    if ln_c.is_finite() && ln_c.abs() <= LN_RANGE {
        Ok(ln_c)
    } else {
        Err(TauberianError::Overflow { x, ln_c })
    }
}

/// `z / e^{ln_c}` without forming `e^{ln_c}`.
fn divide_by_exp(z: Complex64, ln_c: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    (z / r) * (r.ln() - ln_c).exp()
}

/// `g(x) = e^{2 pi i xi x} V_psi f(x, xi) / c(x)` on a tail grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TailTrace {
    pub xi: f64,
    pub x: Vec<f64>,
    pub g: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedLimit {
    pub xi: f64,
    pub estimate: LimitEstimate,
    #[serde(skip)]
    pub trace: TailTrace,
}

/// Traces for several frequencies at once; one transform pass over the tail grid.
fn tail_traces(
    f: &SignalSource,
    psi: &Window,
    c: &ComparisonFunction,
    xis: &[f64],
    x_tail: &Grid,
    spec: &QuadratureSpec,
) -> Result<Vec<TailTrace>, TauberianError> {
    let xs: Vec<f64> = x_tail.nodes().collect();
    let ln_c: Vec<f64> = xs.iter().map(|&x| ln_c_checked(c, x)).collect::<Result<_, _>>()?;
    let v = forward_points(Source::Signal(f), psi, &xs, xis, 0.0, spec)?;
    Ok(xis
        .iter()
        .enumerate()
        .map(|(j, &xi)| TailTrace {
            xi,
            x: xs.clone(),
            g: (0..xs.len())
                .map(|i| divide_by_exp(cis_turns(xi * xs[i]) * v[i * xis.len() + j], ln_c[i]))
                .collect(),
        })
        .collect())
}

/// Estimates `J(xi)` from the last `m_tail` nodes of `x_tail`.
pub fn windowed_limit(
    f: &SignalSource,
    psi: &Window,
    c: &ComparisonFunction,
    xi: f64,
    x_tail: &Grid,
    rule: &LimitRule,
    spec: &QuadratureSpec,
) -> Result<WindowedLimit, TauberianError> {
    rule.validate()?;
    let trace = tail_traces(f, psi, c, &[xi], x_tail, spec)?.remove(0);
    Ok(WindowedLimit { xi, estimate: limit_of(&trace.x, &trace.g, rule), trace })
}

/// `Psi_beta(xi)` for each `xi`, evaluated as `V_psi(e^{beta t})(0, xi)` on the same lattice as the transforms.
pub fn psi_beta(psi: &Window, beta: f64, xis: &[f64], spec: &QuadratureSpec) -> Result<Vec<Complex64>, TauberianError> {
    Ok(forward_points(Source::Signal(&SignalSource::exp(beta)), psi, &[0.0], xis, 0.0, spec)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JEntry {
    pub xi: f64,
    pub estimate: LimitEstimate,
    pub psi_beta: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantFit {
    pub c_hat: Complex64,
    /// RMS of `|J(xi) - C Psi_beta(xi)|` over converged entries.
    pub c_consistency: f64,
    pub max_psi_beta: f64,
}

pub const DEGENERATE_PSI: f64 = 1e-12;

/// `C = J(0) / Psi_beta(0)` and its residual against the whole table.
pub fn recover_constant(table: &[JEntry]) -> Result<ConstantFit, TauberianError> {
    let zero = table
        .iter()
        .find(|e| e.xi == 0.0)
        .ok_or_else(|| TauberianError::InvalidParameter("the frequency panel must contain 0".into()))?;
    if zero.psi_beta.norm() <= DEGENERATE_PSI {
        return Err(TauberianError::DegenerateWindow(zero.psi_beta.norm()));
    }
    let c_hat = zero.estimate.value / zero.psi_beta;
    let converged: Vec<&JEntry> = table.iter().filter(|e| e.estimate.converged).collect();
    let c_consistency = if converged.is_empty() {
        0.0
    } else {
        let ss: f64 = converged.iter().map(|e| (e.estimate.value - c_hat * e.psi_beta).norm_sqr()).sum();
        (ss / converged.len() as f64).sqrt()
    };
    let max_psi_beta = table.iter().map(|e| e.psi_beta.norm()).fold(0.0, f64::max);
    Ok(ConstantFit { c_hat, c_consistency, max_psi_beta })
}

/// Windowed limits over a frequency panel plus `Psi_beta` on the same panel.
pub fn j_table(
    f: &SignalSource,
    psi: &Window,
    c: &ComparisonFunction,
    xi_panel: &[f64],
    x_tail: &Grid,
    rule: &LimitRule,
    spec: &QuadratureSpec,
) -> Result<(Vec<JEntry>, Vec<TailTrace>), TauberianError> {
    rule.validate()?;
    let traces = tail_traces(f, psi, c, xi_panel, x_tail, spec)?;
    let psis = psi_beta(psi, c.beta, xi_panel, spec)?;
    let entries = traces
        .iter()
        .zip(psis)
        .map(|(t, p)| JEntry { xi: t.xi, estimate: limit_of(&t.x, &t.g, rule), psi_beta: p })
        .collect();
    Ok((entries, traces))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub passed: bool,
    pub s_hat: Option<f64>,
    pub detail: StabilizedBound,
}

/// `sup (1 + |xi|)^{-s} |V_psi f(x, xi)| / c(x) < inf`, judged by stabilisation under grid enlargement.
pub fn tauberian_bound_check(
    f: &SignalSource,
    psi: &Window,
    c: &ComparisonFunction,
    x_grid: &Grid,
    xi_grid: &Grid,
    spec: &QuadratureSpec,
) -> Result<BoundCheck, TauberianError> {
    let detail = stabilized_bound(f, psi, &Weight1D::comparison(*c), x_grid, xi_grid, spec)?;
    Ok(BoundCheck { passed: detail.stable, s_hat: detail.base.as_ref().map(|d| d.s_hat), detail })
}

/// Which exponential factor the window integral carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum WindowWeighting {
    /// `e^{beta t + eps |t|}`.
    Standard { beta: f64, epsilon: f64 },
    /// `L(e^{|t|}) e^{beta t}`.
    Relaxed { beta: f64, l: SlowlyVarying },
}

impl WindowWeighting {
    fn ln_weight(&self, t: f64) -> f64 {
        match self {
            WindowWeighting::Standard { beta, epsilon } => beta * t + epsilon * t.abs(),
            WindowWeighting::Relaxed { beta, l } => beta * t + l.ln_at_log(t.abs()),
        }
    }

    /// Exponential rate the window's decay must beat.
    fn required_rate(&self) -> f64 {
        match self {
            WindowWeighting::Standard { beta, epsilon } => beta.abs() + epsilon,
            WindowWeighting::Relaxed { beta, l } => match l {
                SlowlyVarying::Power { rho } => beta.abs() + rho.abs(),
                _ => beta.abs(),
            },
        }
    }

    /// Growth envelope dominating the weight, for truncation.
    fn envelope(&self) -> GrowthEnvelope {
        match self {
            WindowWeighting::Standard { .. } => GrowthEnvelope { magnitude: 1.0, rate: self.required_rate() },
            WindowWeighting::Relaxed { beta, l } => {
                GrowthEnvelope { magnitude: l.value(1.0).max(1.0), rate: beta.abs() + l.excess_rate() }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCheck {
    pub passed: bool,
    pub weighting: WindowWeighting,
    /// Decay rate versus required rate; `None` for compactly supported windows.
    pub guard: Option<(f64, f64)>,
    pub guard_ok: bool,
    pub positive: bool,
    /// `int (|psi| + |psi'| + |psi''|) weight`, when the guard holds.
    pub integral: Option<f64>,
}

/// Integrability of `(psi + |psi'| + |psi''|)` against the weighting, and positivity of `psi`.
pub fn window_hypotheses_check(
    psi: &Window,
    weighting: WindowWeighting,
    spec: &QuadratureSpec,
) -> Result<WindowCheck, TauberianError> {
    if !psi.has_derivatives() {
        return Err(TauberianError::MissingDerivatives(psi.name()));
    }
    let positive = psi.positivity_violation().is_none();
    let (guard, guard_ok) = match psi.support() {
        Some(_) => (None, true),
        None => {
            let k = psi.effective_decay().rate;
            let need = weighting.required_rate();
            (Some((k, need)), k > need)
        }
    };
    let integral = if guard_ok {
        let weights = IntegrationWeights {
            signal: weighting.envelope(),
            window: psi.effective_decay(),
            window_peak: psi.peak(),
            window_support: psi.support(),
            signal_support: None,
        };
        let v = integrate(
            |t| {
                let (v, d1, d2) = psi.jet(t).expect("checked above");
                Complex64::new((v.norm() + d1.norm() + d2.norm()) * weighting.ln_weight(t).exp(), 0.0)
            },
            0.0,
            &weights,
            spec,
        )?;
        Some(v.re).filter(|v| v.is_finite())
    } else {
        None
    };
    Ok(WindowCheck { passed: guard_ok && positive && integral.is_some(), weighting, guard, guard_ok, positive, integral })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCheck {
    pub passed: bool,
    pub alpha: f64,
    /// First probe node with `e^{alpha t} f(t) <= 0` (or non-real).
    pub non_positive: Option<f64>,
    /// First consecutive pair where `e^{alpha t} f(t)` drops.
    pub decrease: Option<(f64, f64)>,
    pub probe: String,
}

/// Default monotonicity probe: `(0, 40]`, step `0.01`.
pub fn default_monotone_probe() -> Grid {
    Grid::span(0.01, 40.0, 0.01).expect("static grid")
}

const MONOTONE_SLACK: f64 = 1e-12;

/// Checks that `e^{alpha t} f(t)` is positive and non-decreasing on the
/// positive nodes of `probe` (or of the sample grid for sampled signals).
pub fn monotonicity_check(f: &SignalSource, alpha: f64, probe: Option<&Grid>) -> Result<MonotoneCheck, TauberianError> {
    if !f.is_pointwise() {
        return Err(TauberianError::NotPointwise(f.name()));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(TauberianError::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    let grid = match (probe, f.kind()) {
        (Some(g), _) => *g,
        (None, SignalKind::Sampled { grid, .. }) => *grid,
        (None, _) => default_monotone_probe(),
    };
    let ts: Vec<f64> = grid.nodes().filter(|&t| t > 0.0).collect();
    let mut non_positive = None;
    let mut decrease = None;
    let mut prev: Option<(f64, f64)> = None;
    for &t in &ts {
        let v = f.evaluate(t)?;
        let u = (alpha * t).exp() * v.re;
        if non_positive.is_none() && !(u > 0.0 && v.im.abs() <= MONOTONE_SLACK * v.re.abs()) {
            non_positive = Some(t);
        }
        if let Some((tp, up)) = prev {
            if decrease.is_none() && up > u + MONOTONE_SLACK {
                decrease = Some((tp, t));
            }
        }
        prev = Some((t, u));
    }
    Ok(MonotoneCheck {
        passed: !ts.is_empty() && non_positive.is_none() && decrease.is_none(),
        alpha,
        non_positive,
        decrease,
        probe: grid.describe(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateProbe {
    pub test_function: String,
    pub h_grid: Grid,
    /// `<T_{-h} f, phi> / c(h)` per node of `h_grid`.
    pub values: Vec<Complex64>,
    pub limit: LimitEstimate,
    /// `int e^{beta t} phi(t) dt`.
    pub phi_moment: Complex64,
    /// `limit / phi_moment`, when the moment is not degenerate.
    pub c_phi: Option<Complex64>,
}

/// `<T_{-h} f, phi> = int f(t + h) phi(t) dt`, normalised by `c(h)`.
pub fn translate_probe(
    f: &SignalSource,
    phi: &Window,
    c: &ComparisonFunction,
    h_grid: &Grid,
    rule: &LimitRule,
    spec: &QuadratureSpec,
) -> Result<TranslateProbe, TauberianError> {
    rule.validate()?;
    let hs: Vec<f64> = h_grid.nodes().collect();
    let ln_c: Vec<f64> = hs.iter().map(|&h| ln_c_checked(c, h)).collect::<Result<_, _>>()?;
    // int f(u) phi(u - h) du is the transform with window conj(phi) at (h, 0).
    let window = phi.conjugate();
    let raw = forward_points(Source::Signal(f), &window, &hs, &[0.0], 0.0, spec)?;
    let values: Vec<Complex64> = raw.par_iter().zip(ln_c.par_iter()).map(|(&v, &l)| divide_by_exp(v, l)).collect();
    let limit = limit_of(&hs, &values, rule);
    let phi_moment = forward_points(Source::Signal(&SignalSource::exp(c.beta)), &window, &[0.0], &[0.0], 0.0, spec)?[0];
    let c_phi = (phi_moment.norm() > DEGENERATE_PSI).then(|| limit.value / phi_moment);
    Ok(TranslateProbe { test_function: phi.name(), h_grid: *h_grid, values, limit, phi_moment, c_phi })
}

/// Inputs of [`run_pipeline`] beyond `f`, `psi` and `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub xi_panel: Vec<f64>,
    pub x_tail: Grid,
    pub rule: LimitRule,
    pub alpha: f64,
    pub epsilon: f64,
    pub bound_x_grid: Grid,
    pub bound_xi_grid: Grid,
    pub monotone_probe: Option<Grid>,
    pub quadrature: QuadratureSpec,
}

pub const DEFAULT_XI_PANEL: [f64; 7] = [0.0, 0.1, -0.1, 0.3, -0.3, 1.0, -1.0];

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            xi_panel: DEFAULT_XI_PANEL.to_vec(),
            x_tail: Grid::span(10.0, 20.0, 0.5).expect("static grid"),
            rule: LimitRule::default(),
            alpha: 0.0,
            epsilon: 0.1,
            bound_x_grid: Grid::span(-10.0, 20.0, 0.25).expect("static grid"),
            bound_xi_grid: Grid::span(-4.0, 4.0, 0.25).expect("static grid"),
            monotone_probe: None,
            quadrature: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFlags {
    pub taub_bounded: bool,
    pub window_ok: bool,
    pub monotone_ok: bool,
}

impl ConditionFlags {
    pub fn all(&self) -> bool {
        self.taub_bounded && self.window_ok && self.monotone_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub signal: String,
    pub window: String,
    pub c_spec: String,
    pub beta: f64,
    pub l: SlowlyVarying,
    pub j_table: Vec<JEntry>,
    pub c_hat: Complex64,
    pub c_consistency: f64,
    pub max_psi_beta: f64,
    pub condition_flags: ConditionFlags,
    /// Limit of `f(x) / c(x)` over the tail grid.
    pub final_limit: LimitEstimate,
    pub window_checks: Vec<WindowCheck>,
    pub monotone_check: MonotoneCheck,
    pub bound_check: BoundCheck,
    #[serde(skip)]
    pub traces: Vec<TailTrace>,
}

impl AsymptoticReport {
    /// All hypotheses hold and every limit involved stabilised.
    pub fn succeeded(&self) -> bool {
        let j0 = self.j_table.iter().find(|e| e.xi == 0.0).is_some_and(|e| e.estimate.converged);
        self.condition_flags.all() && j0 && self.final_limit.converged
    }
}

/// Runs every check, the frequency panel and the direct `f / c` limit.
pub fn run_pipeline(
    f: &SignalSource,
    psi: &Window,
    c: &ComparisonFunction,
    config: &PipelineConfig,
) -> Result<AsymptoticReport, TauberianError> {
    if !f.is_pointwise() {
        return Err(TauberianError::NotPointwise(f.name()));
    }
    let spec = &config.quadrature;
    let mut window_checks =
        vec![window_hypotheses_check(psi, WindowWeighting::Standard { beta: c.beta, epsilon: config.epsilon }, spec)?];
    if !matches!(c.l, SlowlyVarying::Constant { .. }) {
        window_checks.push(window_hypotheses_check(psi, WindowWeighting::Relaxed { beta: c.beta, l: c.l }, spec)?);
    }
    let monotone_check = monotonicity_check(f, config.alpha, config.monotone_probe.as_ref())?;
    let bound_check = tauberian_bound_check(f, psi, c, &config.bound_x_grid, &config.bound_xi_grid, spec)?;
    let (j_table, traces) = j_table(f, psi, c, &config.xi_panel, &config.x_tail, &config.rule, spec)?;
    let fit = recover_constant(&j_table)?;

    let xs: Vec<f64> = config.x_tail.nodes().collect();
    let ratios: Vec<Complex64> = xs
        .iter()
        .map(|&x| Ok(divide_by_exp(f.evaluate(x)?, ln_c_checked(c, x)?)))
        .collect::<Result<_, TauberianError>>()?;
    let final_limit = limit_of(&xs, &ratios, &config.rule);

    Ok(AsymptoticReport {
        signal: f.name(),
        window: psi.name(),
        c_spec: c.describe(),
        beta: c.beta,
        l: c.l,
        j_table,
        c_hat: fit.c_hat,
        c_consistency: fit.c_consistency,
        max_psi_beta: fit.max_psi_beta,
        condition_flags: ConditionFlags {
            taub_bounded: bound_check.passed,
            window_ok: window_checks.iter().any(|w| w.passed),
            monotone_ok: monotone_check.passed,
        },
        final_limit,
        window_checks,
        monotone_check,
        bound_check,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_of_constant_sequence() {
        let xs: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let g = vec![Complex64::new(2.0, -1.0); 10];
        let e = limit_of(&xs, &g, &LimitRule::default());
        assert!(e.converged);
        assert_eq!(e.spread, 0.0);
        assert_eq!(e.value, Complex64::new(2.0, -1.0));
        assert_eq!(e.tail_window, TailWindow { x_lo: 2.0, x_hi: 9.0, count: 8 });
    }

    #[test]
    fn limit_of_oscillation_does_not_converge() {
        let xs: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let g: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x.sin(), 0.0)).collect();
        assert!(!limit_of(&xs, &g, &LimitRule::default()).converged);
        let zero = vec![Complex64::new(0.0, 0.0); 10];
        assert!(limit_of(&xs, &zero, &LimitRule::default()).converged);
    }

    #[test]
    fn overflow_is_reported() {
        let c = ComparisonFunction::exponential(1.0);
        let tail = Grid::span(700.0, 720.0, 1.0).unwrap();
        let err = windowed_limit(
            &SignalSource::zero(),
            &Window::gaussian(),
            &c,
            0.0,
            &tail,
            &LimitRule::default(),
            &QuadratureSpec::default(),
        );
        assert!(matches!(err, Err(TauberianError::Overflow { .. })));
    }

    #[test]
    fn degenerate_window_rejected() {
        let e = JEntry {
            xi: 0.0,
            estimate: limit_of(&[0.0], &[Complex64::new(1.0, 0.0)], &LimitRule::default()),
            psi_beta: Complex64::new(1e-13, 0.0),
        };
        assert!(matches!(recover_constant(&[e]), Err(TauberianError::DegenerateWindow(_))));
    }

    #[test]
    fn zero_table_gives_zero_constant() {
        let est = limit_of(&[0.0], &[Complex64::new(0.0, 0.0)], &LimitRule::default());
        let table: Vec<JEntry> = DEFAULT_XI_PANEL
            .iter()
            .map(|&xi| JEntry { xi, estimate: est, psi_beta: Complex64::new(1.0 + xi, 0.0) })
            .collect();
        let fit = recover_constant(&table).unwrap();
        assert_eq!(fit.c_hat, Complex64::new(0.0, 0.0));
        assert_eq!(fit.c_consistency, 0.0);
    }
}
