//! `expchaos`: orbits, witnesses and renders for the complex exponential map.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 no witness found,
//! 3 a report failed verification.

mod args;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use expchaos::dynamics::{iterate_with, ClassifyParams, ComplexPoint};
use expchaos::hyperbolic::HyperbolicDomain;
use expchaos::inverse::rho_for_target;
use expchaos::render::{render_density_map_with, render_escape_map_with, GridSpec, Palette, RenderParams, Threading};
use expchaos::witness::{
    find_escaping_point, find_periodic, sensitivity_witness_for, transitivity_witness, verify, Disc, SearchConfig,
    WitnessError, WitnessReport,
};

use args::{parse_complex, Config};

/// Above this `ρ` the f^{-2} construction barely fits in double range.
const RHO_WARNING: f64 = 650.0;

#[derive(Parser)]
#[command(name = "expchaos", version, about = "Chaotic dynamics of the complex exponential map")]
struct Cli {
    /// File of `key = value` lines supplying defaults for flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate e^z and dump the orbit as CSV or JSON.
    Orbit(OrbitArgs),
    /// Print the classification of an orbit.
    Classify(OrbitArgs),
    /// Find a point of a disc whose orbit lands on the positive real axis.
    EscapePoint(SearchArgs),
    /// Find a point of a disc that hits a target exactly.
    Transitivity(TransitivityArgs),
    /// Find a repelling periodic point in a disc.
    Periodic(SearchArgs),
    /// Find two points of a disc whose orbits separate.
    Sensitivity(SensitivityArgs),
    /// Replay a witness report.
    Verify { report: PathBuf },
    /// Render an escape-time map as PPM.
    RenderEscape(EscapeRenderArgs),
    /// Render a hyperbolic density map as PPM.
    RenderDensity(DensityRenderArgs),
}

fn complex(s: &str) -> Result<ComplexPoint, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct OrbitArgs {
    /// Starting point, e.g. `0.3+1.3i`.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    z: Option<ComplexPoint>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    period_scan: Option<usize>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    center: Option<ComplexPoint>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_star: Option<f64>,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Where to write the JSON report; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransitivityArgs {
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    target: Option<ComplexPoint>,
    #[arg(long)]
    n_min: Option<usize>,
}

#[derive(Args)]
struct SensitivityArgs {
    #[command(flatten)]
    search: SearchArgs,
    /// Target with `Re ≤ 0` for the contracting orbit; default `-1`.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    target: Option<ComplexPoint>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    re_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    re_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im_max: Option<f64>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// `par` (row-parallel) or `seq`; the bytes are identical.
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EscapeRenderArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    /// `grayscale` or `classification`.
    #[arg(long)]
    palette: Option<String>,
}

#[derive(Args)]
struct DensityRenderArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// unit-disc, right-half-plane, strip-pi, slit-plane-pos or slit-plane-neg.
    #[arg(long)]
    domain: Option<String>,
}

/// Search came back empty; maps to exit code 2.
#[derive(Debug)]
struct NotFound(WitnessError);

impl std::fmt::Display for NotFound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for NotFound {}

#[derive(Debug)]
struct VerifyFailed;

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("report failed verification")
    }
}

impl std::error::Error for VerifyFailed {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<NotFound>().is_some() {
                ExitCode::from(2)
            } else if e.downcast_ref::<VerifyFailed>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Orbit(a) => orbit(&config, a, false),
        Command::Classify(a) => orbit(&config, a, true),
        Command::EscapePoint(a) => {
            config.check_keys(SEARCH_KEYS)?;
            let (disc, cfg) = search_setup(&config, &a)?;
            let w = find_escaping_point(&disc, &cfg).map_err(witness_error)?;
            let l = &w.landing;
            eprintln!(
                "z = {} lands at height {} after {} steps{}",
                show(l.point),
                num(l.height()),
                l.stage,
                if w.on_target { "" } else { " (target height not reachable; own height kept)" }
            );
            emit_report(&WitnessReport::escaping(&disc, &cfg, w), a.out.as_deref())
        }
        Command::Transitivity(a) => {
            config.check_keys(&[SEARCH_KEYS, &["target", "n-min"]].concat())?;
            let (disc, cfg) = search_setup(&config, &a.search)?;
            let v = config.pick_complex(a.target, "target")?.ok_or_else(|| anyhow!("--target is required"))?;
            let n_min = config.pick(a.n_min, "n-min", 0)?;
            if let Ok(rho) = rho_for_target(v) {
                if rho > RHO_WARNING {
                    eprintln!("warning: ρ = {rho:.1} for this target; the construction barely fits double range");
                }
            }
            let w = transitivity_witness(&disc, v, n_min, &cfg).map_err(witness_error)?;
            eprintln!("z = {} reaches {} after n = {} steps ({:?})", show(w.point), show(w.target), w.n, w.method);
            emit_report(&WitnessReport::transitivity(&disc, &cfg, w), a.search.out.as_deref())
        }
        Command::Periodic(a) => {
            config.check_keys(SEARCH_KEYS)?;
            let (disc, cfg) = search_setup(&config, &a)?;
            let w = find_periodic(&disc, &cfg).map_err(witness_error)?;
            let r = &w.result;
            eprintln!(
                "p = {} period {} (minimal {}), |multiplier| = {:.6e}, residual = {:.3e}",
                show(r.point),
                r.period,
                r.minimal_period,
                r.multiplier_modulus,
                r.residual
            );
            emit_report(&WitnessReport::periodic(&disc, &cfg, w), a.out.as_deref())
        }
        Command::Sensitivity(a) => {
            config.check_keys(&[SEARCH_KEYS, &["target"]].concat())?;
            let (disc, cfg) = search_setup(&config, &a.search)?;
            let v = config.pick_complex(a.target, "target")?.unwrap_or(ComplexPoint::new(-1.0, 0.0));
            let w = sensitivity_witness_for(&disc, v, &cfg).map_err(witness_error)?;
            eprintln!(
                "z = {}, w = {}, n = {}: |f^n(z)| = {:.6}, separation ≥ {:.6}",
                show(w.z),
                show(w.w),
                w.n,
                w.fz_modulus,
                w.separation_lower_bound
            );
            emit_report(&WitnessReport::sensitivity(&disc, &cfg, w), a.search.out.as_deref())
        }
        Command::Verify { report } => {
            let text = std::fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let parsed = WitnessReport::from_json(&text).context("parsing report")?;
            let outcome = verify(&parsed);
            for c in &outcome.checks {
                println!(
                    "{} {}: {:.3e} (bound {:.3e})",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.value,
                    c.bound
                );
            }
            if outcome.passed() {
                println!("{} report verified", outcome.kind);
                Ok(())
            } else {
                Err(VerifyFailed.into())
            }
        }
        Command::RenderEscape(a) => {
            config.check_keys(&[GRID_KEYS, &["max-steps", "threshold", "palette"]].concat())?;
            let (grid, threading, out) = grid_setup(&config, &a.grid, (-3.0, 3.0, -3.0, 3.0))?;
            let defaults = RenderParams::default();
            let palette = match config.pick(a.palette, "palette", "grayscale".to_string())?.as_str() {
                "grayscale" => Palette::Grayscale,
                "classification" => Palette::Classification,
                p => bail!("unknown palette {p:?}"),
            };
            let params = RenderParams {
                max_steps: config.pick(a.max_steps, "max-steps", defaults.max_steps)?,
                escape_re_threshold: config.pick(a.threshold, "threshold", defaults.escape_re_threshold)?,
                palette,
            };
            let bytes = render_escape_map_with(&grid, &params, threading)?;
            write_out(&out, &bytes)
        }
        Command::RenderDensity(a) => {
            config.check_keys(&[GRID_KEYS, &["domain"]].concat())?;
            let (grid, threading, out) = grid_setup(&config, &a.grid, (-1.0, 1.0, -1.0, 1.0))?;
            let domain = match config.pick(a.domain, "domain", "unit-disc".to_string())?.as_str() {
                "unit-disc" => HyperbolicDomain::UnitDisc,
                "right-half-plane" => HyperbolicDomain::RightHalfPlane,
                "strip-pi" => HyperbolicDomain::StripPi,
                "slit-plane-pos" => HyperbolicDomain::SlitPlanePos,
                "slit-plane-neg" => HyperbolicDomain::SlitPlaneNeg,
                d => bail!("unknown domain {d:?}"),
            };
            let bytes = render_density_map_with(domain, &grid, threading)?;
            write_out(&out, &bytes)
        }
    }
}

const SEARCH_KEYS: &[&str] = &["center", "radius", "seed", "t-star", "m-max", "samples"];
const GRID_KEYS: &[&str] = &["re-min", "re-max", "im-min", "im-max", "width", "height", "threads"];

fn num(x: f64) -> String {
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn show(z: ComplexPoint) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", num(z.re), num(z.im.abs()))
}

fn witness_error(e: WitnessError) -> anyhow::Error {
    match e {
        WitnessError::NotFound { .. } => NotFound(e).into(),
        other => anyhow!(other),
    }
}

fn orbit(config: &Config, a: OrbitArgs, classify_only: bool) -> Result<()> {
    config.check_keys(&["z", "steps", "threshold", "period-scan", "format"])?;
    let z = config.pick_complex(a.z, "z")?.ok_or_else(|| anyhow!("--z is required"))?;
    let defaults = ClassifyParams::default();
    let params = ClassifyParams {
        escape_re_threshold: config.pick(a.threshold, "threshold", defaults.escape_re_threshold)?,
        period_scan_limit: config.pick(a.period_scan, "period-scan", defaults.period_scan_limit)?.max(1),
        ..defaults
    };
    let steps = config.pick(a.steps, "steps", 40)?;
    let record = iterate_with(z, steps, &params);
    if classify_only {
        let text = serde_json::to_string(&record.classification)?;
        return write_text(a.out.as_deref(), &format!("{text}\n"));
    }
    let text = match config.pick(a.format, "format", "csv".to_string())?.as_str() {
        "csv" => record.to_csv(),
        "json" => record.to_json() + "\n",
        f => bail!("unknown format {f:?}"),
    };
    write_text(a.out.as_deref(), &text)
}

fn search_setup(config: &Config, a: &SearchArgs) -> Result<(Disc, SearchConfig)> {
    let center = config.pick_complex(a.center, "center")?.ok_or_else(|| anyhow!("--center is required"))?;
    let radius = config.pick_opt(a.radius, "radius")?.ok_or_else(|| anyhow!("--radius is required"))?;
    let d = SearchConfig::default();
    let cfg = SearchConfig {
        seed: config.pick(a.seed, "seed", d.seed)?,
        t_star: config.pick(a.t_star, "t-star", d.t_star)?,
        m_max: config.pick(a.m_max, "m-max", d.m_max)?,
        samples: config.pick(a.samples, "samples", d.samples)?,
        ..d
    };
    Ok((Disc::new(center, radius)?, cfg))
}

fn grid_setup(config: &Config, a: &GridArgs, default: (f64, f64, f64, f64)) -> Result<(GridSpec, Threading, PathBuf)> {
    let grid = GridSpec::new(
        (config.pick(a.re_min, "re-min", default.0)?, config.pick(a.re_max, "re-max", default.1)?),
        (config.pick(a.im_min, "im-min", default.2)?, config.pick(a.im_max, "im-max", default.3)?),
        config.pick(a.width, "width", 64)?,
        config.pick(a.height, "height", 64)?,
    )?;
    let threading = match config.pick(a.threads.clone(), "threads", "par".to_string())?.as_str() {
        "par" => Threading::RowParallel,
        "seq" => Threading::Sequential,
        t => bail!("unknown threading {t:?}; use par or seq"),
    };
    let out = a.out.clone().ok_or_else(|| anyhow!("--out is required for images"))?;
    Ok((grid, threading, out))
}

fn emit_report(report: &WitnessReport, out: Option<&Path>) -> Result<()> {
    write_text(out, &(report.to_json() + "\n"))
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_out(path, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}
