use num_complex::Complex64;
use serde::Serialize;
use std::path::PathBuf;

use super::plotdata::{emit_tauber_plotdata, io_err, output_base, write_csv, write_file};
use super::specs::{self, SpecError};
use super::{CliError, Command, RunConfig};
use crate::modulation::{
    diagnose_matrix, lpq_norm, stabilized_bound, vanishing_diagnostic, GrowthDiagnostic, MixedNormSpec, ModulationNorm,
    StabilizedBound,
};
use crate::output::{fmt_f64, to_json, to_json_pretty};
use crate::signal::{Grid, QuadratureSpec, SignalKind, SignalSource, Window};
use crate::slowvary::{
    potter_check, representation, slow_variation_probe, submultiplicative_check, PotterVerdict, SlowVariationVerdict,
    SubmultiplicativeVerdict, DEFAULT_A_VALUES, DEFAULT_X_MAX,
};
use crate::stft::{forward_stft, read_tf_csv, reconstruct, write_tf_csv, TfGrids, TfMetadata};
use crate::tauberian::{run_pipeline, LimitRule, PipelineConfig, DEFAULT_XI_PANEL};
use crate::weights::{TFWeight, Weight1D};

/// Files written by a run and whether its mathematical verdict held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub verdict_ok: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.verdict_ok {
            0
        } else {
            1
        }
    }
}

fn spec<T>(flag: &str, r: Result<T, SpecError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Usage { flag: Some(flag.into()), message: e.0 })
}

fn comp(e: impl std::fmt::Display) -> CliError {
    CliError::Computation(e.to_string())
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    base: String,
    files: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn path(&self, suffix: &str) -> PathBuf {
        self.cfg.out.join(format!("{}{suffix}", self.base))
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let path = self.path(".json");
        let mut body = to_json_pretty(value).map_err(comp)?;
        body.push('\n');
        write_file(&path, body.as_bytes())?;
        self.files.push(path);
        Ok(())
    }

    fn signal(&self) -> Result<SignalSource, CliError> {
        spec("--signal", specs::parse_signal(self.cfg.signal.as_deref().expect("validated")))
    }

    fn window(&self) -> Result<Window, CliError> {
        spec("--window", specs::parse_window(&self.cfg.window))
    }

    fn grids(&self) -> Result<(Grid, Grid), CliError> {
        Ok((spec("--xgrid", specs::parse_grid(&self.cfg.xgrid))?, spec("--xigrid", specs::parse_grid(&self.cfg.xigrid))?))
    }

    fn c(&self) -> Result<crate::slowvary::ComparisonFunction, CliError> {
        spec("--c", specs::parse_comparison(self.cfg.c.as_deref().expect("validated")))
    }
}

/// Executes a validated configuration, writing outputs under `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
    let mut ctx = Ctx { cfg, base: output_base(cfg), files: Vec::new() };
    let quad = QuadratureSpec::default();
    let verdict_ok = match cfg.command {
        Command::Stft => stft(&mut ctx, &quad)?,
        Command::Reconstruct => reconstruct_cmd(&mut ctx, &quad)?,
        Command::Modnorm => modnorm(&mut ctx, &quad)?,
        Command::Diagnose => diagnose(&mut ctx, &quad)?,
        Command::Potter => potter(&mut ctx)?,
        Command::Represent => represent(&mut ctx)?,
        Command::Tauber => tauber(&mut ctx, &quad)?,
    };
    let summary = serde_json::json!({
        "command": cfg.command.as_str(),
        "verdict_ok": verdict_ok,
        "files": ctx.files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    println!("{summary}");
    Ok(Outcome { files: ctx.files, verdict_ok })
}

fn stft(ctx: &mut Ctx<'_>, quad: &QuadratureSpec) -> Result<bool, CliError> {
    let f = ctx.signal()?;
    let psi = ctx.window()?;
    let (xg, xig) = ctx.grids()?;
    let m = forward_stft(&f, &psi, &xg, &xig, ctx.cfg.eta, quad).map_err(comp)?;
    let path = ctx.path(".csv");
    write_tf_csv(&m, &path).map_err(comp)?;
    ctx.files.push(path);
    let meta = TfMetadata {
        x_grid: xg,
        xi_grid: xig,
        eta: ctx.cfg.eta,
        window: psi.name(),
        signal: ctx.cfg.signal.clone().unwrap_or_default(),
        quadrature: *quad,
    };
    ctx.json(&meta)?;
    Ok(true)
}

#[derive(Serialize)]
struct ReconstructSummary {
    inner_product: Complex64,
    relative_error: Option<f64>,
    t_grid: Grid,
    x_grid: Grid,
    xi_grid: Grid,
    window: String,
    synthesis_window: String,
}

fn reconstruct_cmd(ctx: &mut Ctx<'_>, quad: &QuadratureSpec) -> Result<bool, CliError> {
    let f = ctx.signal()?;
    let psi = ctx.window()?;
    let gamma = match &ctx.cfg.synthesis_window {
        Some(s) => spec("--synthesis-window", specs::parse_window(s))?,
        None => psi.clone(),
    };
    let (x, xi) = ctx.grids()?;
    let t = match &ctx.cfg.tgrid {
        Some(s) => spec("--tgrid", specs::parse_grid(s))?,
        None => Grid::span(-4.0, 4.0, 0.05).expect("static grid"),
    };
    let r = reconstruct(&f, &psi, &gamma, &TfGrids { x, xi, t }, quad).map_err(comp)?;
    let SignalKind::Sampled { values, .. } = r.signal.kind() else { unreachable!("reconstruction is sampled") };
    let path = ctx.path(".csv");
    write_csv(
        &path,
        &["t", "re", "im"],
        t.nodes().zip(values).map(|(t, v)| vec![fmt_f64(t), fmt_f64(v.re), fmt_f64(v.im)]),
    )?;
    ctx.files.push(path);
    ctx.json(&ReconstructSummary {
        inner_product: r.inner_product,
        relative_error: r.relative_error,
        t_grid: t,
        x_grid: x,
        xi_grid: xi,
        window: psi.name(),
        synthesis_window: gamma.name(),
    })?;
    Ok(true)
}

fn weight(ctx: &Ctx<'_>) -> Result<TFWeight, CliError> {
    match &ctx.cfg.weight {
        Some(w) => spec("--weight", specs::parse_weight(w)),
        None => Ok(TFWeight::one()),
    }
}

fn modnorm(ctx: &mut Ctx<'_>, quad: &QuadratureSpec) -> Result<bool, CliError> {
    let spec_ = MixedNormSpec::new(ctx.cfg.p, ctx.cfg.q, weight(ctx)?).map_err(comp)?;
    let m = match &ctx.cfg.tf {
        Some(path) => read_tf_csv(path, ctx.cfg.eta).map_err(|e| CliError::Usage {
            flag: Some("--tf".into()),
            message: format!("{}: {e}", path.display()),
        })?,
        None => {
            let (xg, xig) = ctx.grids()?;
            forward_stft(&ctx.signal()?, &ctx.window()?, &xg, &xig, ctx.cfg.eta, quad).map_err(comp)?
        }
    };
    let norm = lpq_norm(&m, &spec_).map_err(comp)?;
    ctx.json(&ModulationNorm {
        norm,
        p: ctx.cfg.p,
        q: ctx.cfg.q,
        weight: spec_.weight.name().to_string(),
        x_grid: *m.x_grid(),
        xi_grid: *m.xi_grid(),
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct DiagnoseReport {
    diagnostic: Option<GrowthDiagnostic>,
    stabilized: StabilizedBound,
    weight_spec: String,
    s_prime: f64,
}

fn diagnose(ctx: &mut Ctx<'_>, quad: &QuadratureSpec) -> Result<bool, CliError> {
    let f = ctx.signal()?;
    let psi = ctx.window()?;
    let (xg, xig) = ctx.grids()?;
    let omega: Weight1D = match (&ctx.cfg.c, &ctx.cfg.weight) {
        (Some(_), _) => Weight1D::comparison(ctx.c()?),
        (None, Some(_)) => weight(ctx)?.time_marginal(),
        (None, None) => Weight1D::one(),
    };
    let m = forward_stft(&f, &psi, &xg, &xig, 0.0, quad).map_err(comp)?;
    let path = ctx.path(".csv");
    let (nx, nxi) = m.dims();
    write_csv(
        &path,
        &["x", "xi", "abs"],
        (0..nx).flat_map(|i| {
            let m = &m;
            (0..nxi).map(move |j| vec![fmt_f64(xg.node(i)), fmt_f64(xig.node(j)), fmt_f64(m.get(i, j).norm())])
        }),
    )?;
    ctx.files.push(path);
    let diagnostic = match diagnose_matrix(&m, &omega) {
        Ok(_) => Some(vanishing_diagnostic(&f, &psi, &omega, &xg, &xig, ctx.cfg.s, quad).map_err(comp)?),
        Err(_) => None,
    };
    let stabilized = stabilized_bound(&f, &psi, &omega, &xg, &xig, quad).map_err(comp)?;
    let ok = stabilized.stable;
    ctx.json(&DiagnoseReport { diagnostic, stabilized, weight_spec: omega.name().to_string(), s_prime: ctx.cfg.s })?;
    Ok(ok)
}

#[derive(Serialize)]
struct PotterReport {
    c: String,
    epsilon: f64,
    slow_variation: SlowVariationVerdict,
    potter: PotterVerdict,
    submultiplicative: SubmultiplicativeVerdict,
    t_probe: Grid,
    h_probe: Grid,
}

fn potter(ctx: &mut Ctx<'_>) -> Result<bool, CliError> {
    let c = ctx.c()?;
    let (ts, hs) = ctx.grids()?;
    let potter = potter_check(&c, ctx.cfg.eps, &ts, &hs);
    let ok = potter.passed();
    ctx.json(&PotterReport {
        c: c.describe(),
        epsilon: ctx.cfg.eps,
        slow_variation: slow_variation_probe(&c.l, &DEFAULT_A_VALUES, DEFAULT_X_MAX),
        potter,
        submultiplicative: submultiplicative_check(&c, &ts, &hs),
        t_probe: ts,
        h_probe: hs,
    })?;
    Ok(ok)
}

#[derive(Serialize)]
struct RepresentSummary {
    c: String,
    grid: Grid,
    derivative_tail: f64,
    residual_tail: f64,
}

fn represent(ctx: &mut Ctx<'_>) -> Result<bool, CliError> {
    let c = ctx.c()?;
    let grid = spec("--xgrid", specs::parse_grid(&ctx.cfg.xgrid))?;
    let mollifier = Window::compact_bump();
    let r = representation(&c, &mollifier, &grid).map_err(comp)?;
    let path = ctx.path(".csv");
    write_csv(
        &path,
        &["x", "b", "b_prime", "residual"],
        grid.nodes()
            .enumerate()
            .map(|(i, x)| vec![fmt_f64(x), fmt_f64(r.b[i]), fmt_f64(r.b_prime[i]), fmt_f64(r.residual[i])]),
    )?;
    ctx.files.push(path);
    ctx.json(&RepresentSummary {
        c: c.describe(),
        grid,
        derivative_tail: r.derivative_tail,
        residual_tail: r.residual_tail,
    })?;
    Ok(true)
}

fn tauber(ctx: &mut Ctx<'_>, quad: &QuadratureSpec) -> Result<bool, CliError> {
    let f = ctx.signal()?;
    let psi = ctx.window()?;
    let c = ctx.c()?;
    let (x_tail, bound_xi) = ctx.grids()?;
    let xi_panel = match &ctx.cfg.xi_panel {
        Some(p) => spec("--xi-panel", specs::parse_list(p))?,
        None => DEFAULT_XI_PANEL.to_vec(),
    };
    let bound_x = Grid::span(-10.0, x_tail.end().max(0.0) + 10.0, 0.25).map_err(comp)?;
    let config = PipelineConfig {
        xi_panel,
        x_tail,
        rule: LimitRule { tol_rel: ctx.cfg.tol, ..LimitRule::default() },
        alpha: ctx.cfg.alpha,
        epsilon: ctx.cfg.eps,
        bound_x_grid: bound_x,
        bound_xi_grid: bound_xi,
        monotone_probe: None,
        quadrature: *quad,
    };
    let report = run_pipeline(&f, &psi, &c, &config).map_err(comp)?;
    let ok = report.succeeded();
    let mut plot = emit_tauber_plotdata(&report, &ctx.cfg.out, &ctx.base)?;
    ctx.json(&report)?;
    ctx.files.append(&mut plot);
    let _ = to_json(&ok);
    Ok(ok)
}
