//! Command-line front end: flag/config resolution, dispatch and file output.

mod plotdata;
mod run;
pub mod specs;

pub use plotdata::{emit_tauber_plotdata, output_base};
pub use run::run;

use clap::Parser;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

use specs::SpecError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Stft,
    Reconstruct,
    Modnorm,
    Diagnose,
    Potter,
    Represent,
    Tauber,
}

pub const COMMANDS: [&str; 7] = ["stft", "reconstruct", "modnorm", "diagnose", "potter", "represent", "tauber"];

impl Command {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "stft" => Command::Stft,
            "reconstruct" => Command::Reconstruct,
            "modnorm" => Command::Modnorm,
            "diagnose" => Command::Diagnose,
            "potter" => Command::Potter,
            "represent" => Command::Represent,
            "tauber" => Command::Tauber,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        COMMANDS[*self as usize]
    }
}

/// Everything that can go wrong before or during a run, with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage { flag: Option<String>, message: String },
    Io(String),
    Computation(String),
}

impl CliError {
    fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage { flag: Some(flag.to_string()), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        2
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let v = match self {
            CliError::Usage { flag, message } => {
                serde_json::json!({ "error": "usage", "flag": flag, "message": message })
            }
            CliError::Io(m) => serde_json::json!({ "error": "io", "message": m }),
            CliError::Computation(m) => serde_json::json!({ "error": "computation", "message": m }),
        };
        v.to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { flag: Some(fl), message } => write!(f, "{fl}: {message}"),
            CliError::Usage { flag: None, message } => f.write_str(message),
            CliError::Io(m) | CliError::Computation(m) => f.write_str(m),
        }
    }
}

#[derive(Parser, Debug, Default)]
#[command(name = "taubex", version, about = "Windowed Fourier analysis of exponentially growing signals")]
struct Flags {
    /// One of: stft, reconstruct, modnorm, diagnose, potter, represent, tauber
    command: Option<String>,
    /// Built-in signal (e.g. exp_step:beta=0.5) or a CSV file
    #[arg(long)]
    signal: Option<String>,
    /// Analysis window: gaussian_pi, gaussian, sech, compact_bump (optional :rate=)
    #[arg(long)]
    window: Option<String>,
    /// Synthesis window for reconstruct (defaults to --window)
    #[arg(long)]
    synthesis_window: Option<String>,
    /// Time-frequency weight: one, vsa:..., omega_s:..., m_eps:..., c_s:...
    #[arg(long)]
    weight: Option<String>,
    /// Comparison function: beta=<r>,L=<const|logshift|loglog|power:rho=<r>>
    #[arg(long)]
    c: Option<String>,
    /// x grid lo:hi:step
    #[arg(long, allow_hyphen_values = true)]
    xgrid: Option<String>,
    /// xi grid lo:hi:step
    #[arg(long, allow_hyphen_values = true)]
    xigrid: Option<String>,
    /// t grid lo:hi:step (reconstruct)
    #[arg(long, allow_hyphen_values = true)]
    tgrid: Option<String>,
    /// Frequency panel for tauber, comma separated
    #[arg(long, allow_hyphen_values = true)]
    xi_panel: Option<String>,
    /// TF matrix CSV to use instead of --signal (modnorm)
    #[arg(long)]
    tf: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    /// Inner (x) exponent, 1..inf
    #[arg(long)]
    p: Option<String>,
    /// Outer (xi) exponent, 1..inf
    #[arg(long)]
    q: Option<String>,
    /// Frequency exponent s
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Relative tolerance of the limit detector
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with the same keys as the flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NumOrText {
    Num(f64),
    Text(String),
}

impl NumOrText {
    fn into_text(self) -> String {
        match self {
            NumOrText::Num(v) => v.to_string(),
            NumOrText::Text(s) => s,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    signal: Option<String>,
    window: Option<String>,
    synthesis_window: Option<String>,
    weight: Option<String>,
    c: Option<String>,
    xgrid: Option<String>,
    xigrid: Option<String>,
    tgrid: Option<String>,
    xi_panel: Option<String>,
    tf: Option<PathBuf>,
    eta: Option<f64>,
    p: Option<NumOrText>,
    q: Option<NumOrText>,
    s: Option<f64>,
    alpha: Option<f64>,
    eps: Option<f64>,
    tol: Option<f64>,
    out: Option<PathBuf>,
}

/// Fully resolved run configuration. Spec strings are kept verbatim (they
/// were validated during resolution); `out` does not take part in the hash.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub signal: Option<String>,
    pub tf: Option<PathBuf>,
    pub window: String,
    pub synthesis_window: Option<String>,
    pub weight: Option<String>,
    pub c: Option<String>,
    pub xgrid: String,
    pub xigrid: String,
    pub tgrid: Option<String>,
    pub xi_panel: Option<String>,
    pub eta: f64,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub alpha: f64,
    pub eps: f64,
    pub tol: f64,
    #[serde(skip)]
    pub out: PathBuf,
}

fn default_grids(cmd: Command) -> (&'static str, &'static str) {
    match cmd {
        Command::Stft | Command::Modnorm => ("-6:6:0.1", "-6:6:0.1"),
        Command::Reconstruct => ("-6:6:0.1", "-6:6:0.1"),
        Command::Diagnose => ("-8:8:0.25", "-6:6:0.25"),
        Command::Potter => ("-30:30:0.25", "-30:30:0.25"),
        Command::Represent => ("-50:50:0.5", "-1:1:1"),
        Command::Tauber => ("10:20:0.5", "-4:4:0.25"),
    }
}

fn exponent(flag: &str, v: &str) -> Result<f64, CliError> {
    let x = match v.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => f64::INFINITY,
        other => other.parse::<f64>().map_err(|_| CliError::usage(flag, format!("`{v}` is not a number or `inf`")))?,
    };
    if x >= 1.0 {
        Ok(x)
    } else {
        Err(CliError::usage(flag, format!("exponent must lie in [1, inf], got {v}")))
    }
}

fn check<T>(flag: &str, r: Result<T, SpecError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::usage(flag, e.0))
}

fn positive(flag: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(flag, format!("must be positive, got {v}")))
    }
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage("--config", format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::usage("--config", format!("{}: {}", path.display(), e.message())))
}

/// Parses `argv` (including the program name), merges an optional TOML file
/// (flags win over the file, the file over defaults) and validates every spec.
///
/// `Ok(None)` means clap already printed help or version text.
pub fn parse_config<I, T>(argv: I) -> Result<Option<RunConfig>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let flags = match Flags::try_parse_from(argv) {
        Ok(f) => f,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    Ok(None)
                }
                _ => Err(CliError::Usage { flag: None, message: e.to_string().trim().to_string() }),
            };
        }
    };
    let listing = COMMANDS.join(", ");
    let command = match flags.command.as_deref() {
        None => return Err(CliError::Usage { flag: None, message: format!("no command given; expected one of: {listing}") }),
        Some(c) => Command::parse(c).ok_or_else(|| CliError::Usage {
            flag: None,
            message: format!("unknown command `{c}`; expected one of: {listing}"),
        })?,
    };
    let file = match &flags.config {
        Some(p) => read_file_config(p)?,
        None => FileConfig::default(),
    };
    let (xg, xig) = default_grids(command);
    let signal = flags.signal.or(file.signal);
    let tf = flags.tf.or(file.tf);
    let cfg = RunConfig {
        command,
        signal,
        tf,
        window: flags.window.or(file.window).unwrap_or_else(|| "gaussian_pi".into()),
        synthesis_window: flags.synthesis_window.or(file.synthesis_window),
        weight: flags.weight.or(file.weight),
        c: flags.c.or(file.c),
        xgrid: flags.xgrid.or(file.xgrid).unwrap_or_else(|| xg.into()),
        xigrid: flags.xigrid.or(file.xigrid).unwrap_or_else(|| xig.into()),
        tgrid: flags.tgrid.or(file.tgrid),
        xi_panel: flags.xi_panel.or(file.xi_panel),
        eta: flags.eta.or(file.eta).unwrap_or(0.0),
        p: exponent("--p", &flags.p.or(file.p.map(NumOrText::into_text)).unwrap_or_else(|| "2".into()))?,
        q: exponent("--q", &flags.q.or(file.q.map(NumOrText::into_text)).unwrap_or_else(|| "2".into()))?,
        s: flags.s.or(file.s).unwrap_or(0.0),
        alpha: flags.alpha.or(file.alpha).unwrap_or(0.0),
        eps: flags.eps.or(file.eps).unwrap_or(0.1),
        tol: flags.tol.or(file.tol).unwrap_or(0.01),
        out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
    };
    validate(&cfg)?;
    Ok(Some(cfg))
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    check("--window", specs::parse_window(&cfg.window))?;
    if let Some(w) = &cfg.synthesis_window {
        check("--synthesis-window", specs::parse_window(w))?;
    }
    if let Some(w) = &cfg.weight {
        check("--weight", specs::parse_weight(w))?;
    }
    if let Some(c) = &cfg.c {
        check("--c", specs::parse_comparison(c))?;
    }
    check("--xgrid", specs::parse_grid(&cfg.xgrid))?;
    check("--xigrid", specs::parse_grid(&cfg.xigrid))?;
    if let Some(t) = &cfg.tgrid {
        check("--tgrid", specs::parse_grid(t))?;
    }
    if let Some(p) = &cfg.xi_panel {
        check("--xi-panel", specs::parse_list(p))?;
    }
    if !cfg.eta.is_finite() {
        return Err(CliError::usage("--eta", "must be finite"));
    }
    if !(cfg.alpha >= 0.0 && cfg.alpha.is_finite()) {
        return Err(CliError::usage("--alpha", format!("must be >= 0, got {}", cfg.alpha)));
    }
    if !(cfg.s.is_finite()) {
        return Err(CliError::usage("--s", "must be finite"));
    }
    positive("--eps", cfg.eps)?;
    positive("--tol", cfg.tol)?;

    let needs_signal = matches!(cfg.command, Command::Stft | Command::Reconstruct | Command::Diagnose | Command::Tauber);
    match (&cfg.signal, &cfg.tf) {
        (Some(_), Some(_)) => return Err(CliError::usage("--tf", "give either --signal or --tf, not both")),
        (None, Some(_)) if cfg.command != Command::Modnorm => {
            return Err(CliError::usage("--tf", format!("only modnorm reads a TF matrix, not {}", cfg.command.as_str())))
        }
        (None, None) if needs_signal || cfg.command == Command::Modnorm => {
            return Err(CliError::usage("--signal", format!("{} needs a signal", cfg.command.as_str())))
        }
        _ => {}
    }
    if let Some(s) = &cfg.signal {
        check("--signal", specs::parse_signal(s))?;
    }
    if matches!(cfg.command, Command::Potter | Command::Represent | Command::Tauber) && cfg.c.is_none() {
        return Err(CliError::usage("--c", format!("{} needs a comparison function", cfg.command.as_str())));
    }
    if cfg.command == Command::Diagnose && cfg.weight.is_some() && cfg.c.is_some() {
        return Err(CliError::usage("--weight", "give either --weight or --c for diagnose, not both"));
    }
    Ok(())
}

/// Entry point used by the binary: returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(argv).and_then(|cfg| match cfg {
        None => Ok(0),
        Some(cfg) => run(&cfg).map(|o| o.exit_code()),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
