//! Command-line front end: configuration files, subcommands and CSV output.
//!
//! Configuration is plain `key = value` text with `#` comments. Keys are the
//! model parameters (`omega_L`, `eta_LM`, `lambda_x`, `kappa_R`, `T_M`, ...)
//! plus run options; command-line flags override the file. Units are never
//! converted: frequencies and temperatures are in Δ, slopes in κ, currents
//! in κΔ².

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analysis::{local_model_currents, uniform_grid, Transistor};
use crate::error::{Error, Result};
use crate::model::{parity_operator, Canonical, SpinRingParams};
use crate::qop::{Axis, Site};
use crate::robustness::{
    self, base_axis, log_grid, Integration, PerturbationSpec, SpreadReading, DEFAULT_QUADRATURE_ORDER,
    DEFAULT_SIGMA_RATIO, DEFAULT_TM_EVAL,
};

/// `lo:hi:n`, `n` points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn parse(key: &str, text: &str) -> Result<Self> {
        let bad = || Error::Validation {
            key: key.into(),
            msg: format!("expected lo:hi:n, got `{text}`"),
        };
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [lo, hi, n] = parts[..] else {
            return Err(bad());
        };
        let spec = Self {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            n: n.parse().map_err(|_| bad())?,
        };
        if !spec.lo.is_finite() || !spec.hi.is_finite() || spec.n == 0 || (spec.n > 1 && spec.hi <= spec.lo) {
            return Err(bad());
        }
        Ok(spec)
    }

    pub fn linear(&self) -> Vec<f64> {
        uniform_grid(self.lo, self.hi, self.n)
    }

    pub fn logarithmic(&self) -> Vec<f64> {
        log_grid(self.lo, self.hi, self.n)
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", fmt_num(self.lo), fmt_num(self.hi), self.n)
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SpinRingParams,
    /// Control-temperature grid for `sweep` and `local-model`.
    pub grid: GridSpec,
    pub fd_step: Option<f64>,
    /// Perturbation axis sets for `robustness`; empty means every set.
    pub axes: Vec<Vec<Axis>>,
    /// Log-spaced mean couplings for `robustness`; zero is always prepended.
    pub means: GridSpec,
    pub sigma_ratio: f64,
    pub sigma_reading: SpreadReading,
    pub quad_order: usize,
    pub mc_samples: Option<usize>,
    pub mc_seed: u64,
    pub tm_eval: f64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: Canonical::XAxis.params(),
            grid: GridSpec {
                lo: 0.0,
                hi: 10.0,
                n: 500,
            },
            fd_step: None,
            axes: Vec::new(),
            means: GridSpec {
                lo: 1e-6,
                hi: 1e-1,
                n: 11,
            },
            sigma_ratio: DEFAULT_SIGMA_RATIO,
            sigma_reading: SpreadReading::StdDev,
            quad_order: DEFAULT_QUADRATURE_ORDER,
            mc_samples: None,
            mc_seed: 0,
            tm_eval: DEFAULT_TM_EVAL,
            threads: None,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |key: &str, msg: &str| {
            Err(Error::Validation {
                key: key.into(),
                msg: msg.into(),
            })
        };
        if self.grid.lo < 0.0 || self.grid.hi > self.params.temp[0] {
            return bad("grid", "must lie within [0, T_L]");
        }
        if let Some(h) = self.fd_step {
            if !(h > 0.0 && h.is_finite()) {
                return bad("fd_step", "must be > 0");
            }
        }
        if self.means.lo.is_nan() || self.means.lo <= 0.0 {
            return bad("means", "log-spaced grid needs lo > 0");
        }
        if !(self.sigma_ratio >= 0.0 && self.sigma_ratio.is_finite()) {
            return bad("sigma_ratio", "must be >= 0");
        }
        if self.quad_order == 0 {
            return bad("quad_order", "must be >= 1");
        }
        if self.mc_samples == Some(0) {
            return bad("mc_samples", "must be >= 1");
        }
        if !(self.tm_eval >= 0.0 && self.tm_eval.is_finite()) {
            return bad("tm_eval", "must be >= 0");
        }
        if self.threads == Some(0) {
            return bad("threads", "must be >= 1");
        }
        Ok(())
    }

    /// Perturbation axis sets, defaulting to every one- and two-axis set
    /// that avoids the base axis.
    pub fn axis_sets(&self) -> Result<Vec<Vec<Axis>>> {
        if !self.axes.is_empty() {
            return Ok(self.axes.clone());
        }
        let base = base_axis(&self.params)?;
        let free: Vec<Axis> = Axis::ALL.into_iter().filter(|&a| a != base).collect();
        Ok(vec![vec![free[0]], vec![free[1]], free])
    }

    /// `# key = value` lines for every resolved setting.
    pub fn header(&self, command: &str) -> String {
        let p = &self.params;
        let mut out = format!("# spinring {command}\n");
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "# {k} = {v}");
        };
        for site in Site::ALL {
            line(&format!("omega_{site}"), fmt_num(p.omega[site.index()]));
        }
        line("eta_LM", fmt_num(p.eta_lm));
        line("eta_MR", fmt_num(p.eta_mr));
        line("eta_LR", fmt_num(p.eta_lr));
        for axis in Axis::ALL {
            line(&format!("lambda_{}", axis.label()), fmt_num(p.lambda[axis.index()]));
        }
        for site in Site::ALL {
            line(&format!("kappa_{site}"), fmt_num(p.kappa[site.index()]));
        }
        for site in Site::ALL {
            line(&format!("T_{site}"), fmt_num(p.temp[site.index()]));
        }
        line("grid", self.grid.to_string());
        line("fd_step", self.fd_step.map_or("auto".into(), fmt_num));
        line(
            "axes",
            self.axis_sets()
                .map(|sets| format_axis_sets(&sets))
                .unwrap_or_else(|_| "none".into()),
        );
        line("means", self.means.to_string());
        line("sigma_ratio", fmt_num(self.sigma_ratio));
        line(
            "sigma_reading",
            match self.sigma_reading {
                SpreadReading::StdDev => "std".into(),
                SpreadReading::Variance => "variance".into(),
            },
        );
        line("quad_order", self.quad_order.to_string());
        line("mc_samples", self.mc_samples.map_or("off".into(), |n| n.to_string()));
        line("mc_seed", self.mc_seed.to_string());
        line("tm_eval", fmt_num(self.tm_eval));
        out
    }

    fn integration(&self) -> Integration {
        match self.mc_samples {
            Some(samples) => Integration::MonteCarlo {
                samples,
                seed: self.mc_seed,
            },
            None => Integration::GaussHermite(self.quad_order),
        }
    }
}

fn format_axis_sets(sets: &[Vec<Axis>]) -> String {
    sets.iter()
        .map(|set| set.iter().map(|a| a.label()).collect::<String>())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses `y,z,yz` into axis sets.
pub fn parse_axis_sets(key: &str, text: &str) -> Result<Vec<Vec<Axis>>> {
    let bad = |msg: String| Error::Validation {
        key: key.into(),
        msg,
    };
    text.split(',')
        .map(str::trim)
        .map(|set| {
            if set.is_empty() {
                return Err(bad("empty axis set".into()));
            }
            set.chars()
                .map(|c| match c {
                    'x' => Ok(Axis::X),
                    'y' => Ok(Axis::Y),
                    'z' => Ok(Axis::Z),
                    other => Err(bad(format!("unknown axis `{other}`"))),
                })
                .collect()
        })
        .collect()
}

/// Parses configuration text on top of the canonical x-axis defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
        seen.push(key.to_string());
        apply_key(&mut cfg, key, value, line)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_key(cfg: &mut RunConfig, key: &str, value: &str, line: usize) -> Result<()> {
    let number = || -> Result<f64> {
        value.parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("`{key}` expects a number, got `{value}`"),
        })
    };
    let count = || -> Result<usize> {
        value.parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("`{key}` expects a non-negative integer, got `{value}`"),
        })
    };
    let p = &mut cfg.params;
    match key {
        "omega_L" => p.omega[0] = number()?,
        "omega_M" => p.omega[1] = number()?,
        "omega_R" => p.omega[2] = number()?,
        "eta_LM" => p.eta_lm = number()?,
        "eta_MR" => p.eta_mr = number()?,
        "eta_LR" => p.eta_lr = number()?,
        "lambda_x" => p.lambda[0] = number()?,
        "lambda_y" => p.lambda[1] = number()?,
        "lambda_z" => p.lambda[2] = number()?,
        "kappa_L" => p.kappa[0] = number()?,
        "kappa_M" => p.kappa[1] = number()?,
        "kappa_R" => p.kappa[2] = number()?,
        "T_L" => p.temp[0] = number()?,
        "T_M" => p.temp[1] = number()?,
        "T_R" => p.temp[2] = number()?,
        "grid" => cfg.grid = GridSpec::parse(key, value)?,
        "fd_step" => cfg.fd_step = if value == "auto" { None } else { Some(number()?) },
        "axes" => cfg.axes = parse_axis_sets(key, value)?,
        "means" => cfg.means = GridSpec::parse(key, value)?,
        "sigma_ratio" => cfg.sigma_ratio = number()?,
        "sigma_reading" => {
            cfg.sigma_reading = match value {
                "std" => SpreadReading::StdDev,
                "variance" => SpreadReading::Variance,
                _ => {
                    return Err(Error::Validation {
                        key: key.into(),
                        msg: "expected `std` or `variance`".into(),
                    })
                }
            }
        }
        "quad_order" => cfg.quad_order = count()?,
        "mc_samples" => cfg.mc_samples = if value == "off" { None } else { Some(count()?) },
        "mc_seed" => {
            cfg.mc_seed = value.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("`{key}` expects an integer seed"),
            })?
        }
        "tm_eval" => cfg.tm_eval = number()?,
        "threads" => cfg.threads = Some(count()?),
        "out" => cfg.out = Some(PathBuf::from(value)),
        _ => {
            return Err(Error::Parse {
                line,
                msg: format!("unknown key `{key}`"),
            })
        }
    }
    Ok(())
}

/// 12 significant digits in scientific notation with a signed two-digit
/// exponent, e.g. `-2.90345678901e-03`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), fmt_num)
}

#[derive(Debug, Parser)]
#[command(name = "spinring", version, about = "Heat currents and transistor figures of merit of a three-qubit ring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Control-temperature grid `lo:hi:n`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Perturbation axis sets, e.g. `y,z,yz`.
    #[arg(long, global = true)]
    pub axes: Option<String>,
    /// Gauss–Hermite nodes per perturbed axis.
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    /// Finite-difference step in T_M.
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    /// Worker threads for sweeps and quadrature.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Dressed energies, parities and the positive-frequency transition table.
    Spectrum,
    /// Steady state at one control temperature.
    Steady {
        /// Control temperature; defaults to the configured T_M.
        #[arg(long)]
        tm: Option<f64>,
    },
    /// Currents, amplification, resistances and local temperatures over T_M.
    Sweep,
    /// Exact currents against the local-temperature model over T_M.
    LocalModel,
    /// Minimum and zero crossing of J_M.
    Landmarks,
    /// ζ against the mean spurious coupling for each axis set.
    Robustness {
        /// Log-spaced mean couplings `lo:hi:n`; zero is always included.
        #[arg(long)]
        means: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Steady { .. } => "steady",
            Command::Sweep => "sweep",
            Command::LocalModel => "local-model",
            Command::Landmarks => "landmarks",
            Command::Robustness { .. } => "robustness",
        }
    }
}

/// Reads the config file (if any) and applies flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Validation {
                key: "config".into(),
                msg: format!("{}: {e}", path.display()),
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(g) = &cli.grid {
        cfg.grid = GridSpec::parse("grid", g)?;
    }
    if let Some(a) = &cli.axes {
        cfg.axes = parse_axis_sets("axes", a)?;
    }
    if let Some(q) = cli.quad_order {
        cfg.quad_order = q;
    }
    if cli.fd_step.is_some() {
        cfg.fd_step = cli.fd_step;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if let Command::Robustness { means: Some(m) } = &cli.command {
        cfg.means = GridSpec::parse("means", m)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one subcommand and returns its full text output.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<String> {
    let mut out = cfg.header(command.name());
    let body = match command {
        Command::Spectrum => spectrum(cfg)?,
        Command::Steady { tm } => steady(cfg, tm.unwrap_or(cfg.params.temp[1]))?,
        Command::Sweep => sweep(cfg)?,
        Command::LocalModel => local_model(cfg)?,
        Command::Landmarks => landmarks(cfg)?,
        Command::Robustness { .. } => robustness(cfg)?,
    };
    out.push_str(&body);
    Ok(out)
}

fn spectrum(cfg: &RunConfig) -> Result<String> {
    let t = Transistor::new(&cfg.params)?;
    let spec = t.system().spectrum();
    let parity = spec.to_eigenbasis(&parity_operator());
    let n = spec.dim();
    let mut out = String::from("level,energy,parity\n");
    for (label, k) in (0..n).rev().enumerate() {
        let sign = if parity[(k, k)].re >= 0.0 { "+1" } else { "-1" };
        let _ = writeln!(out, "{},{},{}", label + 1, fmt_num(spec.eigenvalues[k]), sign);
    }
    out.push_str("# positive-frequency transitions through sigma^x_p, levels numbered from the highest\n");
    out.push_str("from,to_via_L,to_via_M,to_via_R\n");
    for (label, row) in t.system().transition_table().iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .map(|to| to.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        let _ = writeln!(out, "{},{}", label + 1, cells.join(","));
    }
    Ok(out)
}

fn steady(cfg: &RunConfig, tm: f64) -> Result<String> {
    let p = cfg.params.with_tm(tm);
    p.validate()?;
    let t = Transistor::new(&p)?;
    let report = t.report_at(tm)?;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("T_M", fmt_num(tm));
    for site in Site::ALL {
        kv(&format!("J_{site}"), fmt_num(report.current(site)));
    }
    kv("J_sum", fmt_num(report.currents.iter().sum()));
    for site in Site::ALL {
        let t_loc = crate::analysis::local_temperature(&report.rho, &p, site).ok();
        kv(&format!("Tloc_{site}"), fmt_opt(t_loc));
    }
    kv("residual", fmt_num(report.residual));
    kv("nullspace_dim", report.nullspace_dim.to_string());
    kv("positivity_floor", fmt_num(report.positivity_floor));
    kv("trace", fmt_num(report.rho.trace().re));
    Ok(out)
}

fn sweep(cfg: &RunConfig) -> Result<String> {
    let t = Transistor::new(&cfg.params)?;
    let result = t.sweep(&cfg.grid.linear(), cfg.fd_step)?;
    let mut out = String::from("T_M,J_L,J_M,J_R,alpha_L,alpha_R,chi_L,chi_R,Tloc_L,Tloc_M,Tloc_R\n");
    let mut failures = String::new();
    for p in &result.points {
        let alpha = p.alpha.map_or([None; 2], |a| a.map(Some));
        let chi = p.chi.map_or([None; 2], |c| c.map(Some));
        let cells: Vec<String> = [p.tm]
            .iter()
            .chain(&p.currents)
            .map(|&x| fmt_num(x))
            .chain(alpha.iter().chain(&chi).chain(&p.t_loc).map(|&x| fmt_opt(x)))
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
        if let Some(e) = &p.error {
            let _ = writeln!(failures, "# failed T_M = {}: {e}", fmt_num(p.tm));
        }
    }
    if result.is_degenerate() {
        out.push_str("# single-point grid: derivatives unavailable\n");
    }
    out.push_str(&failures);
    Ok(out)
}

fn local_model(cfg: &RunConfig) -> Result<String> {
    let t = Transistor::new(&cfg.params)?;
    let result = t.sweep(&cfg.grid.linear(), cfg.fd_step)?;
    let mut out = String::from("T_M,J_L,J_M,J_R,J_L_local,J_M_local,J_R_local\n");
    for p in &result.points {
        let local = match p.t_loc {
            [Some(l), Some(m), Some(r)] => local_model_currents(&cfg.params.with_tm(p.tm), [l, m, r]),
            _ => [f64::NAN; 3],
        };
        let cells: Vec<String> = [p.tm].iter().chain(&p.currents).chain(&local).map(|&x| fmt_num(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    Ok(out)
}

fn landmarks(cfg: &RunConfig) -> Result<String> {
    let t = Transistor::new(&cfg.params)?;
    let result = t.sweep(&cfg.grid.linear(), cfg.fd_step)?;
    let lm = t.find_landmarks(&result)?;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("tm_jm_min", fmt_num(lm.tm_jm_min));
    kv("jm_min", fmt_num(lm.jm_min));
    kv("tm_jm_zero", fmt_num(lm.tm_jm_zero));
    kv("alpha_L_at_zero", fmt_num(lm.alpha_at_zero));
    for site in Site::ALL {
        kv(&format!("J_{site}_at_zero"), fmt_num(lm.currents_at_zero[site.index()]));
    }
    Ok(out)
}

fn robustness(cfg: &RunConfig) -> Result<String> {
    let (alpha_unp, _) = robustness::unperturbed_alpha(&cfg.params, cfg.tm_eval, cfg.fd_step)?;
    let mut means = vec![0.0];
    means.extend(cfg.means.logarithmic());
    let mut out = format!("# alpha_L_unperturbed = {}\n", fmt_num(alpha_unp));
    out.push_str("axes,mean,zeta,alpha_bar_L,alpha_bar_R,lost_weight\n");
    for axes in cfg.axis_sets()? {
        let mut template = PerturbationSpec::new(&cfg.params, &axes, 0.0)
            .with_integration(cfg.integration())
            .with_reading(cfg.sigma_reading)
            .with_tm_eval(cfg.tm_eval);
        template.fd_step = cfg.fd_step;
        template.validate()?;
        let label = format_axis_sets(std::slice::from_ref(&axes));
        for (mean, z) in robustness::zeta_curve(&template, &means, cfg.sigma_ratio)? {
            match z {
                Ok(z) => {
                    let _ = writeln!(
                        out,
                        "{label},{},{},{},{},{}",
                        fmt_num(mean),
                        fmt_num(z.zeta),
                        fmt_num(z.averaged.alpha_l),
                        fmt_num(z.averaged.alpha_r),
                        fmt_num(z.averaged.lost_weight)
                    );
                }
                Err(e) => {
                    let _ = writeln!(out, "{label},{},nan,nan,nan,nan", fmt_num(mean));
                    let _ = writeln!(out, "# failed mean = {}: {e}", fmt_num(mean));
                }
            }
        }
    }
    Ok(out)
}

/// Machine-readable one-line error report.
pub fn error_line(e: &Error) -> String {
    format!("error code={} message=\"{}\"", e.code(), e.to_string().replace('"', "'"))
}

/// Process exit status for an error: 2 for bad input, 1 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Validation { .. } => 2,
        _ => 1,
    }
}

/// Entry point shared by the binary: parse flags, run, write output.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    if let Some(n) = cfg.threads {
        // ignore the error raised when a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = execute(&cli.command, &cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Validation {
            key: "out".into(),
            msg: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_canonical_x_axis() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.params, Canonical::XAxis.params());
        assert_eq!(cfg.grid.n, 500);
    }

    #[test]
    fn negative_kappa_is_rejected() {
        let err = parse_config("kappa_R = -1").unwrap_err();
        assert_eq!(
            err,
            Error::Validation {
                key: "kappa_R".into(),
                msg: "must be > 0".into()
            }
        );
    }

    #[test]
    fn z_axis_by_keys() {
        let cfg = parse_config("# longitudinal\nlambda_z = 1\nlambda_x = 0   # off\n").unwrap();
        assert_eq!(cfg.params, Canonical::ZAxis.params());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(parse_config("\n\nbogus = 1"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_config("T_M 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("T_M = warm"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("T_M = 1\nT_M = 2"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn run_options_parse() {
        let cfg = parse_config("grid = 0:5:11\naxes = y, yz\nquad_order = 5\nsigma_reading = variance").unwrap();
        assert_eq!(cfg.grid.linear().len(), 11);
        assert_eq!(cfg.axes, vec![vec![Axis::Y], vec![Axis::Y, Axis::Z]]);
        assert_eq!(cfg.quad_order, 5);
        assert_eq!(cfg.sigma_reading, SpreadReading::Variance);
        assert!(parse_config("grid = 0:20:5").is_err());
    }

    #[test]
    fn default_axis_sets_skip_base() {
        let cfg = parse_config("lambda_x = 0\nlambda_z = 1").unwrap();
        assert_eq!(
            cfg.axis_sets().unwrap(),
            vec![vec![Axis::X], vec![Axis::Y], vec![Axis::X, Axis::Y]]
        );
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(-2.9035e-3), "-2.90350000000e-03");
        assert_eq!(fmt_num(0.0), "0.00000000000e+00");
        assert_eq!(fmt_num(1234.5), "1.23450000000e+03");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn header_echoes_parameters() {
        let h = RunConfig::default().header("sweep");
        assert!(h.contains("# kappa_R = 1.00000000000e+02"));
        assert!(h.lines().all(|l| l.starts_with('#')));
    }

    #[test]
    fn header_parses_back_to_the_same_config() {
        let cfg = parse_config("T_M = 0.3\nmc_samples = 50\naxes = x,yz\n").unwrap();
        let header = cfg.header("sweep");
        let body: String = header.lines().skip(1).map(|l| format!("{}\n", &l[2..])).collect();
        assert_eq!(parse_config(&body).unwrap().header("sweep"), header);
        let default = RunConfig::default().header("sweep");
        let body: String = default.lines().skip(1).map(|l| format!("{}\n", &l[2..])).collect();
        assert_eq!(parse_config(&body).unwrap().header("sweep"), default);
    }

    #[test]
    fn error_line_is_single_line() {
        let line = error_line(&Error::Validation {
            key: "kappa_R".into(),
            msg: "must be > 0".into(),
        });
        assert!(line.starts_with("error code=validation"));
        assert!(!line.contains('\n'));
    }
}
