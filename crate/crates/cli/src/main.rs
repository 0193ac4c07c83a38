//! Batch front-end over the channel-statistics library: parameter sweeps
//! written as CSV, a Monte Carlo driver, and cross-oracle validation.

mod grid;
mod validate;

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use rayprod_core::asymptotics::{
    capacity_stats, capacity_variance, mean_capacity_per_antenna, variance_cubic_roots,
    variance_numeric_contour, ContourShape, ContourSpec, Snr,
};
use rayprod_core::freecombinatorics::{
    free_cumulants, moments_from_cubic_series, moments_from_cumulants,
};
use rayprod_core::montecarlo::{normality_diagnostics, run_simulation, write_samples};
use rayprod_core::outage::{
    finite_snr_dmt, multiplexing_rate, outage_capacity, outage_probability, ChannelGeometry,
};
use rayprod_core::spectra::AspectRatios;

use grid::parse_grid;

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Parser)]
#[command(
    name = "rayprod",
    about = "Outage statistics of Rayleigh product MIMO channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Asymptotic mean capacity over an SNR grid (requires R = T)
    Asymptotic(AsymptoticArgs),
    /// Asymptotic capacity variance: closed form or contour integral
    Variance(VarianceArgs),
    /// Outage probability at target rates, or outage capacity at target
    /// outage probabilities
    Outage(OutageArgs),
    /// Finite-SNR diversity-multiplexing tradeoff over a gain grid
    Dmt(DmtArgs),
    /// Monte Carlo capacity simulation with summary statistics
    Simulate(SimulateArgs),
    /// Free cumulants and moments from the enumeration and series routes
    Moments(MomentsArgs),
    /// Cross-oracle validation suites; nonzero exit if any check fails
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON file mirroring the flags; explicit flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write CSV to this path instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report capacities in bits instead of nats
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct AsymptoticArgs {
    #[arg(long = "R")]
    r: Option<usize>,
    #[arg(long = "S")]
    s: Option<usize>,
    #[arg(long = "T")]
    t: Option<usize>,
    /// SNR grid in dB, `value` or `start:step:stop`
    #[arg(long = "snr-db")]
    snr_db: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VarianceArgs {
    /// Ratio T/S; the closed form assumes rho = 1/zeta
    #[arg(long)]
    zeta: Option<f64>,
    /// Ratio S/R, only meaningful with --contour
    #[arg(long)]
    rho: Option<f64>,
    /// Evaluate the double contour integral instead of the closed form
    /// (the only route for R != T)
    #[arg(long)]
    contour: bool,
    /// Quadrature nodes per contour
    #[arg(long)]
    nodes: Option<usize>,
    /// Contour shape: ellipse or rectangle
    #[arg(long)]
    shape: Option<String>,
    #[arg(long = "snr-db")]
    snr_db: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct OutageArgs {
    #[arg(long = "R")]
    r: Option<usize>,
    #[arg(long = "S")]
    s: Option<usize>,
    #[arg(long = "T")]
    t: Option<usize>,
    #[arg(long = "snr-db")]
    snr_db: Option<String>,
    /// Rate grid (in the selected capacity unit); emits outage probability
    #[arg(long)]
    rate: Option<String>,
    /// Outage-probability grid in (0,1); emits outage capacity
    #[arg(long = "p-out")]
    p_out: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DmtArgs {
    #[arg(long = "R")]
    r: Option<usize>,
    #[arg(long = "S")]
    s: Option<usize>,
    #[arg(long = "T")]
    t: Option<usize>,
    #[arg(long = "snr-db")]
    snr_db: Option<String>,
    /// Multiplexing-gain grid on [0, min(R,S,T)]
    #[arg(long = "m-grid")]
    m_grid: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long = "R")]
    r: Option<usize>,
    #[arg(long = "S")]
    s: Option<usize>,
    #[arg(long = "T")]
    t: Option<usize>,
    #[arg(long = "snr-db")]
    snr_db: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dump raw capacity samples to this file (single-point SNR grid only)
    #[arg(long)]
    dump: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    /// First-order orders 1..=n-max (enumeration caps at 8)
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Second-order orders with m + n <= m-max
    #[arg(long = "m-max")]
    m_max: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Monte Carlo samples per geometry
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Flat JSON mirror of the flags.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "R")]
    r: Option<usize>,
    #[serde(rename = "S")]
    s: Option<usize>,
    #[serde(rename = "T")]
    t: Option<usize>,
    rho: Option<f64>,
    zeta: Option<f64>,
    snr_db: Option<String>,
    rate: Option<String>,
    p_out: Option<String>,
    m_grid: Option<String>,
    samples: Option<usize>,
    seed: Option<u64>,
    nodes: Option<usize>,
    shape: Option<String>,
    contour: Option<bool>,
    n_max: Option<usize>,
    m_max: Option<usize>,
    dump: Option<String>,
    bits: Option<bool>,
    output: Option<String>,
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))
                .map_err(io_failure)?;
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", p.display()))
        }
    }
}

/// Marker wrapped around errors that must exit with code 2.
#[derive(Debug)]
struct IoFailure(anyhow::Error);

impl std::fmt::Display for IoFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for IoFailure {}

fn io_failure(e: anyhow::Error) -> anyhow::Error {
    anyhow!(IoFailure(e))
}

fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

struct Units {
    bits: bool,
}

impl Units {
    fn label(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }

    /// Capacity-like quantity, nats -> selected unit.
    fn cap(&self, nats: f64) -> f64 {
        if self.bits {
            nats / LN2
        } else {
            nats
        }
    }

    /// Squared-capacity quantity (variances).
    fn cap_sq(&self, nats_sq: f64) -> f64 {
        if self.bits {
            nats_sq / (LN2 * LN2)
        } else {
            nats_sq
        }
    }

    /// Rate input in the selected unit -> nats.
    fn to_nats(&self, v: f64) -> f64 {
        if self.bits {
            v * LN2
        } else {
            v
        }
    }
}

struct CsvOut {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvOut {
    fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, output: &Option<PathBuf>) -> Result<()> {
        let mut text = self.header.join(",");
        text.push('\n');
        for row in &self.rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        match output {
            None => {
                print!("{text}");
                std::io::stdout().flush().context("stdout").map_err(io_failure)
            }
            Some(p) => std::fs::write(p, text)
                .with_context(|| format!("cannot write {}", p.display()))
                .map_err(io_failure),
        }
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("missing required parameter {flag} (flag or config file)"))
}

fn geometry_of(r: Option<usize>, s: Option<usize>, t: Option<usize>) -> Result<ChannelGeometry> {
    Ok(ChannelGeometry::new(
        require(r, "--R")?,
        require(s, "--S")?,
        require(t, "--T")?,
    )?)
}

fn snr_grid(spec: &Option<String>) -> Result<Vec<(f64, Snr)>> {
    let spec = require(spec.as_ref(), "--snr-db")?;
    parse_grid(spec)?
        .into_iter()
        .map(|db| Ok((db, Snr::from_db(db)?)))
        .collect()
}

fn run_asymptotic(args: AsymptoticArgs) -> Result<()> {
    let cfg = load_config(&args.common.config)?;
    let units = Units {
        bits: args.common.bits || cfg.bits.unwrap_or(false),
    };
    let geometry = geometry_of(args.r.or(cfg.r), args.s.or(cfg.s), args.t.or(cfg.t))?;
    if geometry.receive() != geometry.transmit() {
        bail!(
            "asymptotic mean capacity requires R = T, got R={} T={}",
            geometry.receive(),
            geometry.transmit()
        );
    }
    let ratios = geometry.ratios()?;
    let mut csv = CsvOut::new(vec![
        "snr_db",
        "gamma",
        "g",
        "mu_per_antenna",
        "mu_total",
        "units",
    ]);
    for (db, snr) in snr_grid(&args.snr_db.or(cfg.snr_db))? {
        let sol = mean_capacity_per_antenna(ratios.rho(), snr)?;
        csv.push(vec![
            format_number(db),
            format_number(snr.linear()),
            format_number(sol.g),
            format_number(units.cap(sol.mu_per_antenna)),
            format_number(units.cap(geometry.receive() as f64 * sol.mu_per_antenna)),
            units.label().into(),
        ]);
    }
    csv.write(&args.common.output.or(cfg.output.map(PathBuf::from)))
}

fn parse_shape(spec: Option<&str>) -> Result<ContourShape> {
    match spec.unwrap_or("ellipse") {
        "ellipse" => Ok(ContourShape::Ellipse),
        "rectangle" => Ok(ContourShape::Rectangle),
        other => bail!("unknown contour shape {other:?}; use ellipse or rectangle"),
    }
}

fn run_variance(args: VarianceArgs) -> Result<()> {
    let cfg = load_config(&args.common.config)?;
    let units = Units {
        bits: args.common.bits || cfg.bits.unwrap_or(false),
    };
    let contour = args.contour || cfg.contour.unwrap_or(false);
    let zeta = require(args.zeta.or(cfg.zeta), "--zeta")?;
    let rho = args.rho.or(cfg.rho).unwrap_or(1.0 / zeta);
    if !contour && (rho * zeta - 1.0).abs() > 1e-12 {
        bail!(
            "closed-form variance requires R = T (rho * zeta = 1); got rho={rho}, zeta={zeta}. \
             Pass --contour for general ratios"
        );
    }
    let mut csv = CsvOut::new(vec![
        "snr_db", "gamma", "rho", "zeta", "method", "omega_r", "sigma_sq", "units",
    ]);
    for (db, snr) in snr_grid(&args.snr_db.or(cfg.snr_db))? {
        let (method, omega_r, sigma_sq) = if contour {
            let ratios = AspectRatios::new(rho, zeta)?;
            let mut spec = ContourSpec::auto(&ratios, snr)?;
            if let Some(n) = args.nodes.or(cfg.nodes) {
                spec.nodes = n;
            }
            spec.shape = parse_shape(args.shape.as_deref().or(cfg.shape.as_deref()))?;
            let v = variance_numeric_contour(&ratios, snr, &spec)?;
            ("contour", String::new(), v)
        } else {
            let roots = variance_cubic_roots(zeta, snr)?;
            let v = capacity_variance(zeta, snr)?;
            ("closed_form", format_number(roots.omega_r), v)
        };
        csv.push(vec![
            format_number(db),
            format_number(snr.linear()),
            format_number(rho),
            format_number(zeta),
            method.into(),
            omega_r,
            format_number(units.cap_sq(sigma_sq)),
            units.label().into(),
        ]);
    }
    csv.write(&args.common.output.or(cfg.output.map(PathBuf::from)))
}

fn run_outage(args: OutageArgs) -> Result<()> {
    let cfg = load_config(&args.common.config)?;
    let units = Units {
        bits: args.common.bits || cfg.bits.unwrap_or(false),
    };
    let geometry = geometry_of(args.r.or(cfg.r), args.s.or(cfg.s), args.t.or(cfg.t))?;
    let rate_spec = args.rate.or(cfg.rate);
    let p_spec = args.p_out.or(cfg.p_out);
    let snrs = snr_grid(&args.snr_db.or(cfg.snr_db))?;
    match (rate_spec, p_spec) {
        (Some(rates), None) => {
            let rates = parse_grid(&rates)?;
            let mut csv = CsvOut::new(vec!["snr_db", "gamma", "rate", "p_out", "units"]);
            for (db, snr) in &snrs {
                let stats = capacity_stats(&geometry, *snr)?;
                for &rate in &rates {
                    let p = outage_probability(units.to_nats(rate), &stats)?;
                    csv.push(vec![
                        format_number(*db),
                        format_number(snr.linear()),
                        format_number(rate),
                        format_number(p),
                        units.label().into(),
                    ]);
                }
            }
            csv.write(&args.common.output.or(cfg.output.map(PathBuf::from)))
        }
        (None, Some(ps)) => {
            let ps = parse_grid(&ps)?;
            let mut csv = CsvOut::new(vec![
                "snr_db",
                "gamma",
                "p_out",
                "outage_capacity",
                "units",
            ]);
            for (db, snr) in &snrs {
                let stats = capacity_stats(&geometry, *snr)?;
                for &p in &ps {
                    let cap = outage_capacity(p, &stats)?;
                    csv.push(vec![
                        format_number(*db),
                        format_number(snr.linear()),
                        format_number(p),
                        format_number(units.cap(cap)),
                        units.label().into(),
                    ]);
                }
            }
            csv.write(&args.common.output.or(cfg.output.map(PathBuf::from)))
        }
        _ => bail!("outage needs exactly one of --rate or --p-out"),
    }
}

fn run_dmt(args: DmtArgs) -> Result<()> {
    let cfg = load_config(&args.common.config)?;
    let units = Units {
        bits: args.common.bits || cfg.bits.unwrap_or(false),
    };
    let geometry = geometry_of(args.r.or(cfg.r), args.s.or(cfg.s), args.t.or(cfg.t))?;
    let m_grid = parse_grid(&require(args.m_grid.or(cfg.m_grid), "--m-grid")?)?;
    let mut csv = CsvOut::new(vec![
        "snr_db", "gamma", "m", "rate", "k_value", "d", "units",
    ]);
    for (db, snr) in snr_grid(&args.snr_db.or(cfg.snr_db))? {
        let stats = capacity_stats(&geometry, snr)?;
        for &m in &m_grid {
            let point = finite_snr_dmt(m, &geometry, snr)?;
            let rate = multiplexing_rate(m, &geometry, &stats)?;
            csv.push(vec![
                format_number(db),
                format_number(snr.linear()),
                format_number(m),
                format_number(units.cap(rate)),
                format_number(point.k_value),
                format_number(point.d),
                units.label().into(),
            ]);
        }
    }
    csv.write(&args.common.output.or(cfg.output.map(PathBuf::from)))
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let cfg = load_config(&args.common.config)?;
    let units = Units {
        bits: args.common.bits || cfg.bits.unwrap_or(false),
    };
    let geometry = geometry_of(args.r.or(cfg.r), args.s.or(cfg.s), args.t.or(cfg.t))?;
    let samples = require(args.samples.or(cfg.samples), "--samples")?;
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let dump = args.dump.or(cfg.dump.map(PathBuf::from));
    let snrs = snr_grid(&args.snr_db.or(cfg.snr_db))?;
    if dump.is_some() && snrs.len() != 1 {
        bail!("--dump needs a single-point SNR grid, got {} points", snrs.len());
    }
    let mut csv = CsvOut::new(vec![
        "snr_db",
        "gamma",
        "R",
        "S",
        "T",
        "samples",
        "seed",
        "mean",
        "variance",
        "skewness",
        "excess_kurtosis",
        "ks_statistic",
        "units",
    ]);
    for (db, snr) in &snrs {
        let set = run_simulation(&geometry, *snr, samples, seed)?;
        let ks = if set.samples.len() >= 1000 {
            format_number(normality_diagnostics(&set)?.ks_statistic)
        } else {
            String::new()
        };
        if let Some(path) = &dump {
            let mut file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))
                .map_err(io_failure)?;
            write_samples(&set, &mut file)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(io_failure)?;
        }
        csv.push(vec![
            format_number(*db),
            format_number(snr.linear()),
            geometry.receive().to_string(),
            geometry.scatterers().to_string(),
            geometry.transmit().to_string(),
            samples.to_string(),
            seed.to_string(),
            format_number(units.cap(set.mean)),
            format_number(units.cap_sq(set.variance)),
            format_number(set.skewness),
            format_number(set.excess_kurtosis),
            ks,
            units.label().into(),
        ]);
    }
    csv.write(&args.common.output.or(cfg.output.map(PathBuf::from)))
}

fn run_moments(args: MomentsArgs) -> Result<()> {
    let cfg = load_config(&args.common.config)?;
    let rho = require(args.rho.or(cfg.rho), "--rho")?;
    let zeta = require(args.zeta.or(cfg.zeta), "--zeta")?;
    let n_max = args.n_max.or(cfg.n_max).unwrap_or(6);
    let m_max = args.m_max.or(cfg.m_max).unwrap_or(6);
    let cums = free_cumulants(rho, zeta, n_max, m_max)?;
    let moments = moments_from_cumulants(&cums)?;
    let series = moments_from_cubic_series(rho, zeta, n_max)?;
    let mut csv = CsvOut::new(vec!["kind", "m", "n", "value"]);
    for n in 1..=n_max {
        csv.push(vec![
            "kappa".into(),
            "0".into(),
            n.to_string(),
            format_number(*cums.first_order(n)),
        ]);
    }
    for n in 0..=n_max {
        csv.push(vec![
            "alpha".into(),
            "0".into(),
            n.to_string(),
            format_number(*moments.first_order(n)),
        ]);
        csv.push(vec![
            "alpha_series".into(),
            "0".into(),
            n.to_string(),
            format_number(*series.first_order(n)),
        ]);
    }
    for (&(m, n), v) in &cums.second {
        csv.push(vec![
            "kappa2".into(),
            m.to_string(),
            n.to_string(),
            format_number(*v),
        ]);
    }
    csv.write(&args.common.output.or(cfg.output.map(PathBuf::from)))
}

fn run_validate(args: ValidateArgs) -> Result<()> {
    let cfg = load_config(&args.common.config)?;
    let samples = args.samples.or(cfg.samples).unwrap_or(100_000);
    let seed = args.seed.or(cfg.seed).unwrap_or(1);
    let rows = validate::run_all(samples, seed)?;
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut any_failed = false;
    for r in &rows {
        println!(
            "{:<width$}  metric {:>12.5e}  tol {:>9.1e}  {}",
            r.name,
            r.metric,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" },
        );
        any_failed |= !r.pass;
    }
    if let Some(path) = &args.common.output.or(cfg.output.map(PathBuf::from)) {
        let mut csv = CsvOut::new(vec!["check", "metric", "tolerance", "pass"]);
        for r in &rows {
            csv.push(vec![
                r.name.clone(),
                format_number(r.metric),
                format_number(r.tolerance),
                r.pass.to_string(),
            ]);
        }
        csv.write(&Some(path.clone()))?;
    }
    if any_failed {
        bail!("validation failed");
    }
    println!("all checks passed");
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("RAYPROD_THREADS") {
        let n: usize = raw
            .parse()
            .with_context(|| format!("RAYPROD_THREADS must be a positive integer, got {raw:?}"))?;
        if n == 0 {
            bail!("RAYPROD_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("rayon thread pool")?;
    }
    Ok(())
}

fn run() -> Result<()> {
    configure_threads()?;
    let cli = Cli::parse();
    match cli.command {
        Command::Asymptotic(a) => run_asymptotic(a),
        Command::Variance(a) => run_variance(a),
        Command::Outage(a) => run_outage(a),
        Command::Dmt(a) => run_dmt(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Moments(a) => run_moments(a),
        Command::Validate(a) => run_validate(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.downcast_ref::<IoFailure>().is_some()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
