//! Forward and adjoint STFT, reconstruction and the desingularized pairing.
//!
//! `V_psi f(x, xi) = int f(t) conj(psi(t - x)) e^{-2 pi i xi t} dt`.
//!
//! Complex frequencies `xi + i eta` are handled through the twisted window
//! `psi_eta(t) = e^{2 pi eta t} psi(t)`: a matrix produced at offset `eta`
//! stores `V_{psi_eta} f(x, xi) = e^{-2 pi x eta} V_psi f(x, xi + i eta)`.

mod io;

pub use io::{read_tf_csv, read_tf_csv_from, write_tf_csv, write_tf_csv_to, TfMetadata};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

use crate::numeric::cis_turns;
use crate::signal::{
    integrate, integration_range, Atom, GrowthEnvelope, Grid, IntegrationWeights, QuadratureSpec, SignalError,
    SignalKind, SignalSource, Window,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StftError {
    #[error("window decay rate {rate} does not exceed the required {required} (signal growth + 2 pi |eta|)")]
    DecayDeficit { rate: f64, required: f64 },
    #[error("synthesis and analysis windows are orthogonal: |(gamma, psi)| = {0}")]
    OrthogonalWindows(f64),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Values on the rectangular grid `x_grid x xi_grid`, row-major with `x` outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeFrequencyMatrix {
    x_grid: Grid,
    xi_grid: Grid,
    eta: f64,
    values: Vec<Complex64>,
}

impl TimeFrequencyMatrix {
    pub fn new(x_grid: Grid, xi_grid: Grid, eta: f64, values: Vec<Complex64>) -> Result<Self, StftError> {
        if values.len() != x_grid.count() * xi_grid.count() {
            return Err(StftError::Shape(format!(
                "{} values for a {}x{} grid",
                values.len(),
                x_grid.count(),
                xi_grid.count()
            )));
        }
        if !eta.is_finite() {
            return Err(StftError::Shape("eta must be finite".into()));
        }
        Ok(Self { x_grid, xi_grid, eta, values })
    }

    pub fn zeros(x_grid: Grid, xi_grid: Grid, eta: f64) -> Self {
        let n = x_grid.count() * xi_grid.count();
        Self { x_grid, xi_grid, eta, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn x_grid(&self) -> &Grid {
        &self.x_grid
    }

    pub fn xi_grid(&self) -> &Grid {
        &self.xi_grid
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x_grid.count(), self.xi_grid.count())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Stored entry: `V_{psi_eta} f(x_i, xi_j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.xi_grid.count() + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let n = self.xi_grid.count();
        &self.values[i * n..(i + 1) * n]
    }

    /// `V_psi f(x_i, xi_j + i eta)`, undoing the twist factor.
    pub fn complex_frequency_value(&self, i: usize, j: usize) -> Complex64 {
        self.get(i, j) * (TAU * self.eta * self.x_grid.node(i)).exp()
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= lambda);
        m
    }

    /// `max |V|` over the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Anything that can stand in the signal slot of the transform.
#[derive(Clone, Copy)]
pub(crate) enum Source<'a> {
    Signal(&'a SignalSource),
    /// A test function; its decay envelope bounds it by `M`, so it counts
    /// as a bounded signal.
    Test(&'a Window),
}

impl Source<'_> {
    #[inline]
    fn value(&self, t: f64) -> Complex64 {
        match self {
            Source::Signal(s) => s.value_or_zero(t),
            Source::Test(w) => w.value(t),
        }
    }

    fn growth(&self) -> GrowthEnvelope {
        match self {
            Source::Signal(s) => s.envelope(),
            Source::Test(w) => GrowthEnvelope { magnitude: w.decay().magnitude, rate: 0.0 },
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        match self {
            Source::Signal(s) => s.support(),
            Source::Test(w) => w.support(),
        }
    }

    fn atoms(&self) -> Option<&[Atom]> {
        match self {
            Source::Signal(s) => s.atoms(),
            Source::Test(_) => None,
        }
    }
}

fn check_decay(window: &Window, growth: f64, eta: f64) -> Result<(), StftError> {
    let rate = window.decay().rate;
    let required = growth + TAU * eta.abs();
    if rate > required {
        Ok(())
    } else {
        Err(StftError::DecayDeficit { rate, required })
    }
}

/// Forward STFT at complex frequency `xi + i eta`, stored in twisted form.
pub fn forward_stft(
    f: &SignalSource,
    psi: &Window,
    x_grid: &Grid,
    xi_grid: &Grid,
    eta: f64,
    spec: &QuadratureSpec,
) -> Result<TimeFrequencyMatrix, StftError> {
    let xs: Vec<f64> = x_grid.nodes().collect();
    let xis: Vec<f64> = xi_grid.nodes().collect();
    let values = forward_points(Source::Signal(f), psi, &xs, &xis, eta, spec)?;
    TimeFrequencyMatrix::new(*x_grid, *xi_grid, eta, values)
}

/// Row-major values `V_{psi_eta} f(x, xi)` for arbitrary point lists.
pub(crate) fn forward_points(
    f: Source<'_>,
    psi: &Window,
    xs: &[f64],
    xis: &[f64],
    eta: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Complex64>, StftError> {
    if !eta.is_finite() {
        return Err(SignalError::InvalidParameter("eta must be finite".into()).into());
    }
    check_decay(psi, f.growth().rate, eta)?;
    spec.validate()?;
    let window = psi.twisted(eta);
    let rows: Vec<Vec<Complex64>> = match f.atoms() {
        Some(atoms) => xs.par_iter().map(|&x| atomic_row(atoms, &window, x, xis)).collect(),
        None => {
            let weights = IntegrationWeights {
                signal: f.growth(),
                window: window.effective_decay(),
                window_peak: window.peak(),
                window_support: window.support(),
                signal_support: f.support(),
            };
            xs.par_iter()
                .map(|&x| quadrature_row(f, &window, &weights, x, xis, spec))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(rows.into_iter().flatten().collect())
}

fn atomic_row(atoms: &[Atom], window: &Window, x: f64, xis: &[f64]) -> Vec<Complex64> {
    let pre: Vec<(f64, Complex64)> =
        atoms.iter().map(|a| (a.location, a.weight * window.value(a.location - x).conj())).collect();
    xis.iter()
        .map(|&xi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(t, p) in &pre {
                acc += p * cis_turns(-xi * t);
            }
            acc
        })
        .collect()
}

fn quadrature_row(
    f: Source<'_>,
    window: &Window,
    weights: &IntegrationWeights,
    x: f64,
    xis: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<Complex64>, StftError> {
    let (lo, hi) = match integration_range(x, weights, spec) {
        Ok(r) => r,
        // Supports of f and the shifted window do not meet.
        Err(SignalError::EmptyDomain) => return Ok(vec![Complex64::new(0.0, 0.0); xis.len()]),
        Err(e) => return Err(e.into()),
    };
    let h = spec.step;
    let pre: Vec<(f64, Complex64)> = (lo..=hi)
        .map(|j| {
            let t = j as f64 * h;
            let w = if j == lo || j == hi { 0.5 * h } else { h };
            (t, f.value(t) * window.value(t - x).conj() * w)
        })
        .collect();
    Ok(xis
        .iter()
        .map(|&xi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(t, p) in &pre {
                acc += p * cis_turns(-xi * t);
            }
            acc
        })
        .collect())
}

/// `sum_i sum_j F(x_i, xi_j) psi_{-eta}(t - x_i) e^{2 pi i xi_j t} dx dxi`, i.e.
/// the adjoint at offset `eta` applied to a twisted matrix, with trapezoid
/// weights and `x` outer, `xi` inner.
pub fn adjoint_stft(
    matrix: &TimeFrequencyMatrix,
    psi: &Window,
    t_grid: &Grid,
) -> Result<SignalSource, StftError> {
    let window = psi.twisted(-matrix.eta());
    let xg = matrix.x_grid();
    let xig = matrix.xi_grid();
    let ts: Vec<f64> = t_grid.nodes().collect();
    let values: Vec<Complex64> = ts
        .par_iter()
        .map(|&t| {
            let cis: Vec<Complex64> =
                (0..xig.count()).map(|j| cis_turns(xig.node(j) * t) * xig.trapezoid_weight(j)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..xg.count() {
                let x = xg.node(i);
                let mut inner = Complex64::new(0.0, 0.0);
                for (v, c) in matrix.row(i).iter().zip(&cis) {
                    inner += v * c;
                }
                acc += inner * window.value(t - x) * xg.trapezoid_weight(i);
            }
            acc
        })
        .collect();
    Ok(SignalSource::sampled(*t_grid, values)?)
}

/// `(gamma, psi) = int gamma conj(psi)` with the product's joint envelope.
pub fn window_inner_product(gamma: &Window, psi: &Window, spec: &QuadratureSpec) -> Result<Complex64, StftError> {
    let weights = IntegrationWeights {
        signal: GrowthEnvelope { magnitude: gamma.peak().max(f64::MIN_POSITIVE), rate: 0.0 },
        window: psi.effective_decay(),
        window_peak: psi.peak(),
        window_support: psi.support(),
        signal_support: gamma.support(),
    };
    match integrate(|t| gamma.value(t) * psi.value(t).conj(), 0.0, &weights, spec) {
        Ok(v) => Ok(v),
        Err(SignalError::EmptyDomain) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e.into()),
    }
}

const ORTHOGONAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfGrids {
    pub x: Grid,
    pub xi: Grid,
    pub t: Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub signal: SignalSource,
    pub inner_product: Complex64,
    /// Relative L2 error on the t-grid; `None` when `f` is atomic.
    pub relative_error: Option<f64>,
}

/// `(1 / (gamma, psi)) V*_gamma V_psi f` on `grids.t`.
pub fn reconstruct(
    f: &SignalSource,
    psi: &Window,
    gamma: &Window,
    grids: &TfGrids,
    spec: &QuadratureSpec,
) -> Result<Reconstruction, StftError> {
    let ip = window_inner_product(gamma, psi, spec)?;
    if ip.norm() <= ORTHOGONAL_TOL {
        return Err(StftError::OrthogonalWindows(ip.norm()));
    }
    let v = forward_stft(f, psi, &grids.x, &grids.xi, 0.0, spec)?;
    let raw = adjoint_stft(&v, gamma, &grids.t)?;
    let scale = Complex64::new(1.0, 0.0) / ip;
    let values = match raw.kind() {
        SignalKind::Sampled { values, .. } => values.iter().map(|v| v * scale).collect(),
        _ => unreachable!("the adjoint is sampled"),
    };
    let signal = SignalSource::sampled(grids.t, values)?;
    let relative_error = if f.is_pointwise() {
        let (mut num, mut den) = (0.0, 0.0);
        for (i, t) in grids.t.nodes().enumerate() {
            let w = grids.t.trapezoid_weight(i);
            let r = signal.value_or_zero(t);
            let e = f.value_or_zero(t);
            num += (r - e).norm_sqr() * w;
            den += e.norm_sqr() * w;
        }
        Some(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
    } else {
        None
    };
    Ok(Reconstruction { signal, inner_product: ip, relative_error })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: Complex64,
    pub eta_used: f64,
    /// `|value - int f phi|` when `f` is pointwise.
    pub residual_vs_direct: Option<f64>,
}

/// `<f, phi> = (1/(gamma, psi)) int int V_psi f(x, xi + i eta) V_{conj gamma} phi(x, -xi - i eta) dx dxi`.
///
/// In twisted form the exponential factors of the two transforms cancel.
#[allow(clippy::too_many_arguments)]
pub fn desingularized_pairing(
    f: &SignalSource,
    phi: &Window,
    psi: &Window,
    gamma: &Window,
    eta: f64,
    x_grid: &Grid,
    xi_grid: &Grid,
    spec: &QuadratureSpec,
) -> Result<PairingResult, StftError> {
    let ip = window_inner_product(gamma, psi, spec)?;
    if ip.norm() <= ORTHOGONAL_TOL {
        return Err(StftError::OrthogonalWindows(ip.norm()));
    }
    let xs: Vec<f64> = x_grid.nodes().collect();
    let xis: Vec<f64> = xi_grid.nodes().collect();
    let neg: Vec<f64> = xis.iter().map(|v| -v).collect();
    let a = forward_points(Source::Signal(f), psi, &xs, &xis, eta, spec)?;
    let b = forward_points(Source::Test(phi), &gamma.conjugate(), &xs, &neg, -eta, spec)?;
    let n = xis.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..xs.len() {
        let mut inner = Complex64::new(0.0, 0.0);
        for j in 0..n {
            inner += a[i * n + j] * b[i * n + j] * xi_grid.trapezoid_weight(j);
        }
        acc += inner * x_grid.trapezoid_weight(i);
    }
    let value = acc / ip;
    let residual_vs_direct = if f.is_pointwise() {
        let weights = IntegrationWeights::new(f, phi);
        let direct = match integrate(|t| f.value_or_zero(t) * phi.value(t), 0.0, &weights, spec) {
            Ok(v) => v,
            Err(SignalError::EmptyDomain) => Complex64::new(0.0, 0.0),
            Err(e) => return Err(e.into()),
        };
        Some((value - direct).norm())
    } else {
        None
    };
    Ok(PairingResult { value, eta_used: eta, residual_vs_direct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn gauss_oracle(x: f64, xi: f64) -> Complex64 {
        cis_turns(-0.5 * x * xi) * (FRAC_1_SQRT_2 * (-PI * (x * x + xi * xi) / 2.0).exp())
    }

    #[test]
    fn gaussian_at_origin_is_its_squared_norm() {
        let g = Grid::new(0.0, 1.0, 2).unwrap();
        let m = forward_stft(&SignalSource::gaussian(), &Window::gaussian_pi(), &g, &g, 0.0, &QuadratureSpec::default())
            .unwrap();
        assert!((m.get(0, 0) - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-8);
        assert!((m.get(1, 1) - gauss_oracle(1.0, 1.0)).norm() < 1e-6);
    }

    #[test]
    fn delta_gives_conjugate_window() {
        let psi = Window::gaussian().twisted(0.0);
        let g = Grid::span(-2.0, 2.0, 0.5).unwrap();
        let m = forward_stft(&SignalSource::delta(0.0), &psi, &g, &g, 0.0, &QuadratureSpec::default()).unwrap();
        for i in 0..g.count() {
            for j in 0..g.count() {
                assert_eq!(m.get(i, j), psi.value(-g.node(i)).conj());
            }
        }
    }

    #[test]
    fn decay_guard() {
        let g = Grid::new(0.0, 1.0, 2).unwrap();
        let r = forward_stft(&SignalSource::exp_step(1.5), &Window::sech(), &g, &g, 0.0, &QuadratureSpec::default());
        assert!(matches!(r, Err(StftError::DecayDeficit { .. })));
        let r = forward_stft(&SignalSource::exp_step(0.5), &Window::sech(), &g, &g, 0.1, &QuadratureSpec::default());
        assert!(matches!(r, Err(StftError::DecayDeficit { .. })));
    }

    #[test]
    fn adjoint_of_zero_and_of_a_single_entry() {
        let psi = Window::gaussian_pi();
        let g = Grid::new(-1.0, 1.0, 3).unwrap();
        let t = Grid::span(-2.0, 2.0, 0.25).unwrap();
        let zero = adjoint_stft(&TimeFrequencyMatrix::zeros(g, g, 0.0), &psi, &t).unwrap();
        assert!(t.nodes().all(|s| zero.evaluate(s).unwrap() == Complex64::new(0.0, 0.0)));

        // Interior node: trapezoid weights are dx = dxi = 1.
        let mut m = TimeFrequencyMatrix::zeros(g, g, 0.0);
        m.values_mut()[4] = Complex64::new(1.0, 0.0);
        let out = adjoint_stft(&m, &psi, &t).unwrap();
        for s in t.nodes() {
            let expect = psi.value(s) * cis_turns(0.0 * s);
            assert!((out.evaluate(s).unwrap() - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn orthogonal_windows_rejected() {
        let g = Grid::span(-4.0, 4.0, 0.01).unwrap();
        let odd: Vec<Complex64> = g.nodes().map(|t| Complex64::new(t * (-PI * t * t).exp(), 0.0)).collect();
        let gamma = Window::sampled(g, odd, 1.0).unwrap();
        let grids = TfGrids { x: Grid::span(-1.0, 1.0, 0.5).unwrap(), xi: Grid::span(-1.0, 1.0, 0.5).unwrap(), t: g };
        let r = reconstruct(&SignalSource::gaussian(), &Window::gaussian_pi(), &gamma, &grids, &QuadratureSpec::default());
        assert!(matches!(r, Err(StftError::OrthogonalWindows(_))), "{r:?}");
    }

    #[test]
    fn pairing_of_zero_is_zero() {
        let g = Grid::span(-2.0, 2.0, 0.25).unwrap();
        let w = Window::gaussian_pi();
        let r = desingularized_pairing(&SignalSource::zero(), &w, &w, &w, 0.0, &g, &g, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }
}
