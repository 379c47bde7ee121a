//! Parsers for the `name:key=value,...` strings accepted on the command line.

use std::collections::BTreeMap;
use std::path::Path;

use crate::signal::{read_signal_csv, Formula, Grid, SignalError, SignalSource, Window};
use crate::slowvary::{ComparisonFunction, SlowlyVarying};
use crate::weights::{TFWeight, Weight1D};

/// A spec string that could not be understood; the message names the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError(pub String);

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type Params = BTreeMap<String, String>;

/// Splits `name:k=v,k=v` into the name and its parameters. Values may contain
/// `:` and `=` (e.g. `L=power:rho=0.2`).
fn split(spec: &str) -> Result<(String, Params), SpecError> {
    let spec = spec.trim();
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) if !n.contains('=') => (n.trim(), r),
        None if !spec.contains('=') => (spec, ""),
        _ => ("", spec),
    };
    let mut params = Params::new();
    for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| SpecError(format!("expected key=value, got `{part}`")))?;
        if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(SpecError(format!("duplicate key `{}`", k.trim())));
        }
    }
    Ok((name.to_string(), params))
}

struct Reader {
    what: &'static str,
    name: String,
    params: Params,
}

impl Reader {
    fn new(what: &'static str, spec: &str) -> Result<Self, SpecError> {
        let (name, params) = split(spec)?;
        Ok(Self { what, name, params })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.params.remove(key)
    }

    fn num(&mut self, key: &str) -> Result<Option<f64>, SpecError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| SpecError(format!("{} {}: `{key}={v}` is not a finite number", self.what, self.name))),
        }
    }

    fn req(&mut self, key: &str) -> Result<f64, SpecError> {
        self.num(key)?.ok_or_else(|| SpecError(format!("{} {}: missing `{key}=`", self.what, self.name)))
    }

    fn int(&mut self, key: &str) -> Result<i64, SpecError> {
        let v = self.req(key)?;
        if v.fract() == 0.0 && v.abs() < 1e15 {
            Ok(v as i64)
        } else {
            Err(SpecError(format!("{} {}: `{key}` must be an integer", self.what, self.name)))
        }
    }

    fn finish(self) -> Result<(), SpecError> {
        match self.params.keys().next() {
            None => Ok(()),
            Some(k) => Err(SpecError(format!("{} {}: unknown parameter `{k}`", self.what, self.name))),
        }
    }
}

fn signal_err(e: SignalError) -> SpecError {
    match e {
        SignalError::Csv { row, message } => SpecError(format!("row {row}: {message}")),
        other => SpecError(other.to_string()),
    }
}

/// Built-in signal (`exp_step:beta=0.5`, `dirac_comb:lo=-5,hi=5`, ...) or a CSV path.
///
/// Closed forms accept optional `amp=` (multiplier) and `shift=` (`f(t + shift)`).
pub fn parse_signal(spec: &str) -> Result<SignalSource, SpecError> {
    let trimmed = spec.trim();
    if trimmed.to_ascii_lowercase().ends_with(".csv") || Path::new(trimmed).is_file() {
        return read_signal_csv(trimmed).map_err(|e| SpecError(format!("{trimmed}: {}", signal_err(e))));
    }
    let mut r = Reader::new("signal", trimmed)?;
    let name = r.name.clone();
    let base = match name.as_str() {
        "exp_step" => SignalSource::exp_step(r.req("beta")?),
        "exp_poly" => SignalSource::exp_poly(r.req("beta")?),
        "exp" => SignalSource::exp(r.req("beta")?),
        "gaussian" => SignalSource::gaussian(),
        "sinusoid" => SignalSource::closed_form(Formula::Sinusoid {
            freq: r.num("freq")?.unwrap_or(1.0),
            amp: 1.0,
            phase: r.num("phase")?.unwrap_or(0.0),
        }),
        "constant" => SignalSource::constant(r.num("value")?.unwrap_or(1.0)),
        "zero" => SignalSource::zero(),
        "delta" => SignalSource::delta(r.num("t0")?.unwrap_or(0.0)),
        "dirac_comb" => {
            let (lo, hi) = (r.int("lo")?, r.int("hi")?);
            if lo > hi {
                return Err(SpecError(format!("signal dirac_comb: lo = {lo} exceeds hi = {hi}")));
            }
            SignalSource::dirac_comb(lo, hi)
        }
        other => {
            return Err(SpecError(format!(
                "unknown signal `{other}` (expected exp_step, exp_poly, exp, gaussian, sinusoid, constant, zero, delta, dirac_comb or a .csv path)"
            )))
        }
    };
    let amp = r.num("amp")?;
    let shift = r.num("shift")?;
    r.finish()?;
    let mut s = base;
    if let Some(h) = shift {
        s = s.translated(h);
    }
    if let Some(a) = amp {
        s = s.scaled(a);
    }
    Ok(s)
}

/// `gaussian_pi`, `gaussian`, `sech`, `compact_bump`, each with optional `rate=`.
pub fn parse_window(spec: &str) -> Result<Window, SpecError> {
    let trimmed = spec.trim();
    let mut r = Reader::new("window", trimmed)?;
    let w = match r.name.as_str() {
        "gaussian_pi" => Window::gaussian_pi(),
        "gaussian" => Window::gaussian(),
        "sech" => Window::sech(),
        "compact_bump" => Window::compact_bump(),
        other => {
            return Err(SpecError(format!("unknown window `{other}` (expected gaussian_pi, gaussian, sech or compact_bump)")))
        }
    };
    let rate = r.num("rate")?;
    r.finish()?;
    match rate {
        Some(k) => w.with_decay_rate(k).map_err(signal_err),
        None => Ok(w),
    }
}

/// `const`, `const:value=<r>`, `logshift`, `loglog`, `power:rho=<r>`, `logpow:rho=<r>`.
pub fn parse_slowly_varying(spec: &str) -> Result<SlowlyVarying, SpecError> {
    let trimmed = spec.trim();
    let mut r = Reader::new("L", trimmed)?;
    let l = match r.name.as_str() {
        "const" => SlowlyVarying::Constant { value: r.num("value")?.unwrap_or(1.0) },
        "logshift" => SlowlyVarying::LogShift,
        "loglog" => SlowlyVarying::LogLog,
        "power" => SlowlyVarying::Power { rho: r.req("rho")? },
        "logpow" => SlowlyVarying::LogPower { rho: r.req("rho")? },
        other => {
            return Err(SpecError(format!("unknown L `{other}` (expected const, logshift, loglog, power:rho=, logpow:rho=)")))
        }
    };
    r.finish()?;
    l.validate().map_err(|e| SpecError(e.to_string()))?;
    Ok(l)
}

/// `[c:]beta=<r>,L=<name>`; `L` defaults to `const`.
pub fn parse_comparison(spec: &str) -> Result<ComparisonFunction, SpecError> {
    let mut r = Reader::new("c", spec)?;
    if !(r.name.is_empty() || r.name == "c") {
        return Err(SpecError(format!("comparison function must look like `c:beta=<r>,L=<name>`, got `{spec}`")));
    }
    r.name = "c".into();
    let beta = r.req("beta")?;
    let l = parse_slowly_varying(&r.take("L").unwrap_or_else(|| "const".into()))?;
    r.finish()?;
    ComparisonFunction::new(beta, l).map_err(|e| SpecError(e.to_string()))
}

/// 1-D weight names as printed by [`Weight1D::name`]: `one`, `exp<r>`, `poly<p>`, `ramp<beta>`.
pub fn parse_weight_1d(spec: &str) -> Result<Weight1D, SpecError> {
    let s = spec.trim();
    let num = |rest: &str| -> Result<f64, SpecError> {
        rest.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| SpecError(format!("bad 1-D weight `{s}`")))
    };
    if s == "one" {
        Ok(Weight1D::one())
    } else if let Some(rest) = s.strip_prefix("exp") {
        Ok(Weight1D::exp(num(rest)?))
    } else if let Some(rest) = s.strip_prefix("poly") {
        let p = num(rest)?;
        if p < 0.0 {
            return Err(SpecError(format!("poly weight needs p >= 0, got {p}")));
        }
        Ok(Weight1D::poly(p))
    } else if let Some(rest) = s.strip_prefix("ramp") {
        Ok(Weight1D::ramp(num(rest)?))
    } else {
        Err(SpecError(format!("unknown 1-D weight `{s}` (expected one, exp<r>, poly<p>, ramp<beta>)")))
    }
}

/// `one`, `vsa:s=,a=`, `omega_s:s=,omega=`, `m_eps:beta=,eps=,s=`, `c_s:beta=,L=,s=`.
pub fn parse_weight(spec: &str) -> Result<TFWeight, SpecError> {
    let trimmed = spec.trim();
    let mut r = Reader::new("weight", trimmed)?;
    let werr = |e: crate::weights::WeightError| SpecError(e.to_string());
    let w = match r.name.as_str() {
        "one" => TFWeight::one(),
        "vsa" => TFWeight::v_sa(r.req("s")?, r.req("a")?).map_err(werr)?,
        "omega_s" => {
            let s = r.req("s")?;
            let omega = parse_weight_1d(&r.take("omega").unwrap_or_else(|| "one".into()))?;
            TFWeight::omega_s(omega, s).map_err(werr)?
        }
        "m_eps" => TFWeight::m_eps(r.req("beta")?, r.req("eps")?, r.req("s")?).map_err(werr)?,
        "c_s" => {
            let beta = r.req("beta")?;
            let l = parse_slowly_varying(&r.take("L").unwrap_or_else(|| "const".into()))?;
            let s = r.req("s")?;
            let c = ComparisonFunction::new(beta, l).map_err(|e| SpecError(e.to_string()))?;
            TFWeight::c_s(c, s).map_err(werr)?
        }
        other => {
            return Err(SpecError(format!("unknown weight `{other}` (expected one, vsa, omega_s, m_eps, c_s)")))
        }
    };
    r.finish()?;
    Ok(w)
}

/// `lo:hi:step`.
pub fn parse_grid(spec: &str) -> Result<Grid, SpecError> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    if parts.len() != 3 {
        return Err(SpecError(format!("grid must be lo:hi:step, got `{spec}`")));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse::<f64>().map_err(|_| SpecError(format!("grid `{spec}`: `{p}` is not a number")))?;
    }
    Grid::span(v[0], v[1], v[2]).map_err(|e| SpecError(format!("grid `{spec}`: {e}")))
}

/// Comma-separated list of frequencies.
pub fn parse_list(spec: &str) -> Result<Vec<f64>, SpecError> {
    spec.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| SpecError(format!("`{}` is not a finite number", p.trim())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signals() {
        assert_eq!(parse_signal("exp_step:beta=0.5").unwrap().name(), SignalSource::exp_step(0.5).name());
        assert!(parse_signal("gaussian").is_ok());
        assert!(parse_signal("dirac_comb:lo=-5,hi=5").unwrap().atoms().unwrap().len() == 11);
        let two = parse_signal("exp_step:beta=0.5,amp=2").unwrap();
        assert_eq!(two.evaluate(1.0).unwrap().re, 2.0 * 0.5f64.exp());
        assert!(parse_signal("exp_step").is_err());
        assert!(parse_signal("exp_step:beta=0.5,gamma=1").is_err());
        assert!(parse_signal("wavelet").is_err());
    }

    #[test]
    fn comparison_functions() {
        let c = parse_comparison("beta=0.5,L=const").unwrap();
        assert_eq!(c.beta, 0.5);
        let c = parse_comparison("c:beta=0.3,L=power:rho=0.2").unwrap();
        assert_eq!(c.l, SlowlyVarying::Power { rho: 0.2 });
        assert_eq!(parse_comparison("beta=1").unwrap().l, SlowlyVarying::Constant { value: 1.0 });
        assert!(parse_comparison("beta=0.5,L=bogus").is_err());
        assert!(parse_comparison("L=const").is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(parse_weight("one").unwrap().value(3.0, 4.0), 1.0);
        assert_eq!(parse_weight("vsa:s=2,a=1").unwrap().value(0.0, 0.0), 1.0);
        let w = parse_weight("omega_s:s=2,omega=one").unwrap();
        assert!((w.value(5.0, 1.0) - 4.0).abs() < 1e-12);
        let w = parse_weight("m_eps:beta=0.5,eps=0.1,s=0").unwrap();
        assert!((w.value(2.0, 0.0) - 1.2f64.exp()).abs() < 1e-12);
        assert!(parse_weight("c_s:beta=0.3,L=logshift,s=1").is_ok());
        assert!(parse_weight("omega_s:s=1,omega=ramp0.5").is_ok());
        assert!(parse_weight("vsa:s=-1,a=0").is_err());
    }

    #[test]
    fn grids_and_windows() {
        let g = parse_grid("-6:6:0.05").unwrap();
        assert_eq!(g.count(), 241);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_window("gaussian_pi").is_ok());
        assert!(parse_window("sech:rate=1").is_ok());
        assert!(parse_window("sech:rate=2").is_err());
        assert_eq!(parse_list("0, 0.1,-1").unwrap(), vec![0.0, 0.1, -1.0]);
    }
}
