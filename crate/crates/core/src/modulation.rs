//! Weighted mixed norms of time-frequency matrices, modulation-norm
//! estimates and the boundedness / vanishing diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::linear_fit;
use crate::signal::{Grid, QuadratureSpec, SignalSource, Window};
use crate::stft::{forward_stft, StftError, TimeFrequencyMatrix};
use crate::weights::{TFWeight, Weight1D};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModulationError {
    #[error("exponent must lie in [1, inf], got {0}")]
    InvalidExponent(f64),
    #[error("all column maxima are below 1e-300; no exponent can be fitted")]
    DegenerateFit,
    #[error("reference norm {0} is below 1e-300")]
    ZeroNorm(f64),
    #[error(transparent)]
    Stft(#[from] StftError),
}

/// Exponents `p` (in `x`) and `q` (in `xi`), `f64::INFINITY` for the max norm.
#[derive(Debug, Clone)]
pub struct MixedNormSpec {
    pub p: f64,
    pub q: f64,
    pub weight: TFWeight,
}

impl MixedNormSpec {
    pub fn new(p: f64, q: f64, weight: TFWeight) -> Result<Self, ModulationError> {
        for e in [p, q] {
            if !(e >= 1.0) {
                return Err(ModulationError::InvalidExponent(e));
            }
        }
        Ok(Self { p, q, weight })
    }

    pub fn unweighted(p: f64, q: f64) -> Result<Self, ModulationError> {
        Self::new(p, q, TFWeight::one())
    }
}

fn power_sum(terms: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    if p.is_infinite() {
        return terms.map(|(v, _)| v).fold(0.0, f64::max);
    }
    let mut acc = 0.0;
    for (v, w) in terms {
        if v > 0.0 {
            acc += v.powf(p) * w;
        }
    }
    acc.powf(1.0 / p)
}

/// `(int (int |F|^p m^p dx)^{q/p} dxi)^{1/q}` with trapezoid weights; the
/// inner sum runs over `x`, the outer over `xi`, both ascending.
pub fn lpq_norm(matrix: &TimeFrequencyMatrix, spec: &MixedNormSpec) -> Result<f64, ModulationError> {
    MixedNormSpec::new(spec.p, spec.q, spec.weight.clone())?;
    let xg = matrix.x_grid();
    let xig = matrix.xi_grid();
    let columns: Vec<f64> = (0..xig.count())
        .into_par_iter()
        .map(|j| {
            let xi = xig.node(j);
            power_sum(
                (0..xg.count()).map(|i| {
                    let v = matrix.get(i, j).norm();
                    let weighted = if v > 0.0 { (v.ln() + spec.weight.ln_value(xg.node(i), xi)).exp() } else { 0.0 };
                    (weighted, xg.trapezoid_weight(i))
                }),
                spec.p,
            )
        })
        .collect();
    Ok(power_sum(columns.iter().enumerate().map(|(j, &c)| (c, xig.trapezoid_weight(j))), spec.q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationNorm {
    pub norm: f64,
    pub p: f64,
    pub q: f64,
    pub weight: String,
    pub x_grid: Grid,
    pub xi_grid: Grid,
}

/// Grid-truncated estimate of `||f||_{M^{p,q}_m}`.
pub fn modulation_norm(
    f: &SignalSource,
    psi: &Window,
    spec: &MixedNormSpec,
    x_grid: &Grid,
    xi_grid: &Grid,
    quad: &QuadratureSpec,
) -> Result<ModulationNorm, ModulationError> {
    let m = forward_stft(f, psi, x_grid, xi_grid, 0.0, quad)?;
    Ok(ModulationNorm {
        norm: lpq_norm(&m, spec)?,
        p: spec.p,
        q: spec.q,
        weight: spec.weight.name().to_string(),
        x_grid: *x_grid,
        xi_grid: *xi_grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthDiagnostic {
    pub s_hat: f64,
    pub sup_constant: f64,
    /// Filled by [`vanishing_diagnostic`].
    pub decays_to_zero: Option<bool>,
    pub fit_residual: f64,
    pub x_grid: Grid,
    pub xi_grid: Grid,
    pub weight: String,
}

const DEGENERATE: f64 = 1e-300;
/// Column maxima below this fraction of the largest are quadrature noise.
const NOISE_FLOOR: f64 = 1e-13;

/// `ln S(xi_j)` with `S(xi_j) = max_i |V(x_i, xi_j)| / omega(x_i)`.
fn log_column_sup(matrix: &TimeFrequencyMatrix, omega: &Weight1D) -> Vec<f64> {
    let xg = matrix.x_grid();
    let ln_w: Vec<f64> = xg.nodes().map(|x| omega.ln_value(x)).collect();
    (0..matrix.xi_grid().count())
        .map(|j| {
            (0..xg.count())
                .map(|i| matrix.get(i, j).norm().ln() - ln_w[i])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Fits `ln S` against `ln(1 + |xi|)` over `|xi| >= max|xi| / 2`.
pub fn diagnose_matrix(matrix: &TimeFrequencyMatrix, omega: &Weight1D) -> Result<GrowthDiagnostic, ModulationError> {
    let ln_s = log_column_sup(matrix, omega);
    let top = ln_s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(top >= DEGENERATE.ln()) {
        return Err(ModulationError::DegenerateFit);
    }
    let floor = top + NOISE_FLOOR.ln();
    let xig = matrix.xi_grid();
    let xi_max = xig.start().abs().max(xig.end().abs());
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (j, &v) in ln_s.iter().enumerate() {
        let xi = xig.node(j);
        if xi.abs() >= 0.5 * xi_max {
            xs.push(xi.abs().ln_1p());
            ys.push(v.max(floor));
        }
    }
    let (s_hat, fit_residual) = match linear_fit(&xs, &ys) {
        Some((slope, _, rms)) => (slope, rms),
        None => return Err(ModulationError::DegenerateFit),
    };
    let sup_constant = ln_s
        .iter()
        .enumerate()
        .map(|(j, &v)| (v.max(floor) - s_hat * xig.node(j).abs().ln_1p()).exp())
        .fold(0.0, f64::max);
    Ok(GrowthDiagnostic {
        s_hat,
        sup_constant,
        decays_to_zero: None,
        fit_residual,
        x_grid: *matrix.x_grid(),
        xi_grid: *xig,
        weight: omega.name().to_string(),
    })
}

/// Estimates `s` and `sup (1 + |xi|)^{-s} |V_psi f(x, xi)| / omega(x)`.
pub fn bounded_diagnostic(
    f: &SignalSource,
    psi: &Window,
    omega: &Weight1D,
    x_grid: &Grid,
    xi_grid: &Grid,
    quad: &QuadratureSpec,
) -> Result<GrowthDiagnostic, ModulationError> {
    let m = forward_stft(f, psi, x_grid, xi_grid, 0.0, quad)?;
    diagnose_matrix(&m, omega)
}

pub const ENLARGE_FACTOR: f64 = 1.5;
pub const S_HAT_STABILITY: f64 = 0.1;
pub const SUP_GROWTH_LIMIT: f64 = 1.5;

/// The diagnostic on the given grids and on grids enlarged by 50%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizedBound {
    pub base: Option<GrowthDiagnostic>,
    pub enlarged: Option<GrowthDiagnostic>,
    /// True when the transform vanishes on both grids.
    pub identically_zero: bool,
    pub stable: bool,
}

/// "Finite sup" test: `s_hat` moves by less than 0.1 (or stays at or below
/// 0.1 on both grids) and the sup constant grows by at most 50% when both
/// grids are enlarged by 50%.
pub fn stabilized_bound(
    f: &SignalSource,
    psi: &Window,
    omega: &Weight1D,
    x_grid: &Grid,
    xi_grid: &Grid,
    quad: &QuadratureSpec,
) -> Result<StabilizedBound, ModulationError> {
    let run = |xg: &Grid, xig: &Grid| match bounded_diagnostic(f, psi, omega, xg, xig, quad) {
        Ok(d) => Ok(Some(d)),
        Err(ModulationError::DegenerateFit) => Ok(None),
        Err(e) => Err(e),
    };
    let base = run(x_grid, xi_grid)?;
    let enlarged = run(&x_grid.enlarged(ENLARGE_FACTOR), &xi_grid.enlarged(ENLARGE_FACTOR))?;
    let (stable, identically_zero) = match (&base, &enlarged) {
        (None, None) => (true, true),
        (Some(a), Some(b)) => (
            slopes_agree(a.s_hat, b.s_hat) && b.sup_constant <= SUP_GROWTH_LIMIT * a.sup_constant,
            false,
        ),
        _ => (false, false),
    };
    Ok(StabilizedBound { base, enlarged, identically_zero, stable })
}

fn slopes_agree(a: f64, b: f64) -> bool {
    (a - b).abs() < S_HAT_STABILITY || (a <= S_HAT_STABILITY && b <= S_HAT_STABILITY)
}

pub const BOUNDARY_FRACTION: f64 = 0.1;
pub const VANISHING_THRESHOLD: f64 = 0.05;

/// Fills `decays_to_zero`: the max of `(1 + |xi|)^{-s'} |V| / omega` over the
/// boundary band (the outermost 10% of nodes by normalised radius
/// `max(|x| / max|x|, |xi| / max|xi|)`) must be below 5% of its global max.
pub fn vanishing_diagnostic(
    f: &SignalSource,
    psi: &Window,
    omega: &Weight1D,
    x_grid: &Grid,
    xi_grid: &Grid,
    s_prime: f64,
    quad: &QuadratureSpec,
) -> Result<GrowthDiagnostic, ModulationError> {
    let m = forward_stft(f, psi, x_grid, xi_grid, 0.0, quad)?;
    let mut diag = match diagnose_matrix(&m, omega) {
        Ok(d) => d,
        Err(ModulationError::DegenerateFit) => GrowthDiagnostic {
            s_hat: 0.0,
            sup_constant: 0.0,
            decays_to_zero: None,
            fit_residual: 0.0,
            x_grid: *x_grid,
            xi_grid: *xi_grid,
            weight: omega.name().to_string(),
        },
        Err(e) => return Err(e),
    };
    diag.decays_to_zero = Some(decays_on_boundary(&m, omega, s_prime));
    Ok(diag)
}

fn decays_on_boundary(m: &TimeFrequencyMatrix, omega: &Weight1D, s_prime: f64) -> bool {
    let xg = m.x_grid();
    let xig = m.xi_grid();
    let xr = xg.start().abs().max(xg.end().abs());
    let kr = xig.start().abs().max(xig.end().abs());
    let mut radii = Vec::with_capacity(m.values().len());
    let mut vals = Vec::with_capacity(m.values().len());
    for i in 0..xg.count() {
        let x = xg.node(i);
        let lw = omega.ln_value(x);
        for j in 0..xig.count() {
            let xi = xig.node(j);
            let r = (x.abs() / xr).max(xi.abs() / kr);
            let v = m.get(i, j).norm();
            let q = if v > 0.0 { (v.ln() - lw - s_prime * xi.abs().ln_1p()).exp() } else { 0.0 };
            radii.push(r);
            vals.push(q);
        }
    }
    let global = vals.iter().cloned().fold(0.0, f64::max);
    if global == 0.0 {
        return true;
    }
    let mut sorted = radii.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let band_count = ((sorted.len() as f64) * BOUNDARY_FRACTION).ceil() as usize;
    let cutoff = sorted[sorted.len() - band_count.max(1)];
    let boundary = radii.iter().zip(&vals).filter(|(r, _)| **r >= cutoff).map(|(_, v)| *v).fold(0.0, f64::max);
    boundary < VANISHING_THRESHOLD * global
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEquivalence {
    /// `||V_{psi1} f|| / ||V_{psi2} f||` for the requested signal.
    pub ratio: f64,
    pub panel_ratios: Vec<(String, f64)>,
    pub lo: f64,
    pub hi: f64,
    pub band: f64,
    pub equivalent: bool,
}

/// Norm ratios for two windows over `f` and a panel; equivalent when every
/// ratio lies in `[1/band, band]`.
#[allow(clippy::too_many_arguments)]
pub fn window_equivalence(
    f: &SignalSource,
    psi1: &Window,
    psi2: &Window,
    spec: &MixedNormSpec,
    x_grid: &Grid,
    xi_grid: &Grid,
    panel: &[SignalSource],
    band: f64,
    quad: &QuadratureSpec,
) -> Result<WindowEquivalence, ModulationError> {
    let ratio_for = |g: &SignalSource| -> Result<f64, ModulationError> {
        let n1 = modulation_norm(g, psi1, spec, x_grid, xi_grid, quad)?.norm;
        let n2 = modulation_norm(g, psi2, spec, x_grid, xi_grid, quad)?.norm;
        if !(n2 >= DEGENERATE) {
            return Err(ModulationError::ZeroNorm(n2));
        }
        Ok(n1 / n2)
    };
    let ratio = ratio_for(f)?;
    let mut panel_ratios = Vec::with_capacity(panel.len());
    for g in panel {
        panel_ratios.push((g.name(), ratio_for(g)?));
    }
    let all = std::iter::once(ratio).chain(panel_ratios.iter().map(|(_, r)| *r));
    let (lo, hi) = all.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let equivalent = lo >= 1.0 / band && hi <= band;
    Ok(WindowEquivalence { ratio, panel_ratios, lo, hi, band, equivalent })
}
