use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use rigidperc::channels::{
    count_disjoint_channels, count_strong_dual_channels, strong_link_percentage, ChannelReport, RectangleSpec,
};
use rigidperc::clusters::{threshold_scan, weak_clusters, ScanRow};
use rigidperc::distance::{chemical_distance, passage_time, path_csv, Beta, PathResult};
use rigidperc::estimators::{
    continuity_sweep, doubling_grid, estimate_lambda, estimate_phi, Estimate, EstimatorOptions, Sweep,
};
use rigidperc::rng::trial_seed;
use rigidperc::spin::{energy, ground_state, interface_vs_lambda, rigidity_probe, InterfaceComparison, SpinField};
use rigidperc::{BondConfig, DualPoint, Error, Orientation, Vertex, Window};

#[derive(Parser)]
#[command(name = "rigidperc", version, about = "Percolation experiments for weak/rigid random media")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for multi-trial runs (results do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one bond configuration.
    Sample(WindowArgs),
    /// Weak clusters of one configuration.
    Clusters(WindowArgs),
    /// Left-right weak crossing frequency.
    Crossing(CrossingArgs),
    /// Crossing frequency and largest-cluster share over a grid of p.
    Scan(ScanArgs),
    /// Chemical distance between bond midpoints, or passage time between
    /// vertices when --beta is given.
    Distance(DistanceArgs),
    /// Time constant of the chemical distance.
    Lambda(LambdaArgs),
    /// Surface tension of the weighted model.
    Phi(PhiArgs),
    /// Weighted surface tension along a grid of strong-bond weights.
    Sweep(SweepArgs),
    /// Disjoint weak channels in a rectangle.
    Channels(ChannelArgs),
    /// Disjoint strong channels on the shifted lattice.
    Strongchannels(ChannelArgs),
    /// Fewest strong links on a channel of bounded length.
    Percentage(PercentageArgs),
    /// Energy of a spin field read from a file.
    Energy(EnergyArgs),
    /// Minimal-energy spin field under a frozen boundary.
    Groundstate(GroundStateArgs),
    /// Fraction of windows whose mixed boundary forces infinite energy.
    Rigidity(ProbeArgs),
    /// Ground-state interface density against the chemical time constant.
    Interface(ProbeArgs),
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    origin_x: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    origin_y: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl WindowArgs {
    fn config(&self) -> rigidperc::Result<BondConfig> {
        let w = Window::with_origin(self.width, self.height, self.origin_x, self.origin_y)?;
        BondConfig::sample(w, self.p, self.seed)
    }
}

#[derive(Args)]
struct CrossingArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ScanArgs {
    /// Comma-separated, ascending.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    window: WindowArgs,
    /// Start point `x,y` (bond midpoint, or vertex with --beta).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    from: (f64, f64),
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    to: (f64, f64),
    /// Strong-bond weight (`inf` for impassable).
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args)]
struct LambdaArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    tau: (f64, f64),
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also report the 2m-versus-m extrapolation.
    #[arg(long)]
    extrapolate: bool,
    /// Skip the doubled-margin check.
    #[arg(long)]
    no_margin_check: bool,
}

impl LambdaArgs {
    fn options(&self) -> EstimatorOptions {
        EstimatorOptions { extrapolate: self.extrapolate, margin_check: !self.no_margin_check }
    }
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    nu: (f64, f64),
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    nu: (f64, f64),
    #[arg(long, default_value_t = 100)]
    m: usize,
    /// Explicit comma-separated weights; defaults to 1, 2, 4, ..., --beta-max.
    #[arg(long, value_delimiter = ',')]
    betas: Vec<f64>,
    #[arg(long, default_value_t = 1024.0)]
    beta_max: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RectArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Short-side direction; the long side runs along its perpendicular.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0,1")]
    nu: (f64, f64),
    /// Rectangle anchor in units of N.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0,0")]
    x0: (f64, f64),
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RectArgs {
    fn rect(&self) -> rigidperc::Result<RectangleSpec> {
        check_p(self.p)?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        RectangleSpec::new(self.x0, self.nu, self.delta, self.n)
    }

    fn configs(&self, rect: &RectangleSpec) -> rigidperc::Result<Vec<BondConfig>> {
        let w = rect.fitting_window();
        (0..self.trials).into_par_iter().map(|t| BondConfig::sample(w, self.p, trial_seed(self.seed, t))).collect()
    }
}

#[derive(Args)]
struct ChannelArgs {
    #[command(flatten)]
    rect: RectArgs,
}

#[derive(Args)]
struct PercentageArgs {
    #[command(flatten)]
    rect: RectArgs,
    /// Maximal channel length in bonds.
    #[arg(long)]
    budget: usize,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    p: f64,
    /// Spin grid of `+`/`-` characters, row 0 at the top.
    #[arg(long)]
    field: PathBuf,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    origin_x: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    origin_y: i64,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Boundary {
    /// frozen ring, -1 on the lower half and +1 on the upper half
    Halves,
    /// top row +1, bottom row -1
    TopBottom,
    /// frozen ring with random signs
    Random,
}

#[derive(Args)]
struct GroundStateArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Boundary::Halves)]
    bc: Boundary,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed of the random boundary ring.
    #[arg(long, default_value_t = 0)]
    bc_seed: u64,
    /// Also write the spin grid to this file.
    #[arg(long)]
    grid: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(format!("`{s}` has a non-finite coordinate"));
    }
    Ok((a, b))
}

fn check_p(p: f64) -> rigidperc::Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

/// Rendered result plus a one-line summary.
struct Report {
    body: String,
    summary: String,
}

fn json_body(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values always serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn csv_body(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let fmt = cli.format;
    match &cli.command {
        Command::Sample(a) => {
            let cfg = a.config()?;
            let w = *cfg.window();
            let bonds: Vec<(String, i64, i64, bool)> = w
                .bonds()
                .map(|b| {
                    let (i, j) = w.bond_base(b);
                    let v = w.to_global(i, j);
                    let o = match b.orientation {
                        Orientation::Horizontal => "h",
                        Orientation::Vertical => "v",
                    };
                    (o.to_string(), v.x, v.y, cfg.is_strong(b))
                })
                .collect();
            let body = match fmt {
                Format::Csv => csv_body(
                    "orientation,x,y,strong",
                    bonds.iter().map(|(o, x, y, s)| format!("{o},{x},{y},{}", u8::from(*s))),
                ),
                Format::Json => json_body(json!({
                    "width": w.width(), "height": w.height(), "origin": w.origin(),
                    "p": cfg.p(), "seed": cfg.seed(),
                    "bonds": bonds.iter().map(|(o, x, y, s)| json!({"orientation": o, "x": x, "y": y, "strong": s})).collect::<Vec<_>>(),
                })),
            };
            let summary = format!("{} of {} bonds strong", cfg.strong_count(), w.bond_count());
            Ok(Report { body, summary })
        }
        Command::Clusters(a) => {
            let cfg = a.config()?;
            let labels = weak_clusters(&cfg);
            let rows: Vec<Value> = labels
                .sizes
                .iter()
                .enumerate()
                .map(|(id, size)| {
                    json!({
                        "id": id, "size": size,
                        "largest": labels.largest_id == Some(id),
                        "left_right": labels.left_right_crossing_id == Some(id),
                        "bottom_top": labels.bottom_top_crossing_id == Some(id),
                        "spanning": labels.spanning_id == Some(id),
                    })
                })
                .collect();
            let body = match fmt {
                Format::Csv => csv_body(
                    "id,size,largest,left_right,bottom_top,spanning",
                    rows.iter().map(|r| {
                        format!("{},{},{},{},{},{}", r["id"], r["size"], r["largest"], r["left_right"], r["bottom_top"], r["spanning"])
                    }),
                ),
                Format::Json => json_body(json!({ "clusters": rows })),
            };
            let summary = format!(
                "{} clusters, largest {} bonds, spanning {}",
                labels.count(),
                labels.largest_size(),
                labels.spanning_id.is_some()
            );
            Ok(Report { body, summary })
        }
        Command::Crossing(a) => {
            let w = Window::new(a.width, a.height)?;
            let rows = threshold_scan(w, &[a.p], a.trials, a.seed)?;
            let summary = format!("crossing frequency {}", rows[0].crossing_freq);
            Ok(Report { body: scan_body(fmt, &rows), summary })
        }
        Command::Scan(a) => {
            let w = Window::new(a.width, a.height)?;
            let rows = threshold_scan(w, &a.p, a.trials, a.seed)?;
            let summary = format!("{} rows", rows.len());
            Ok(Report { body: scan_body(fmt, &rows), summary })
        }
        Command::Distance(a) => distance(fmt, a),
        Command::Lambda(a) => {
            let e = estimate_lambda(a.p, a.tau, a.m, a.trials, a.seed, &a.options())?;
            let summary = format!("mean {} (se {}, {} discarded)", e.mean, e.std_error, e.discarded);
            Ok(Report { body: estimate_body(fmt, &e), summary })
        }
        Command::Phi(a) => {
            let e = estimate_phi(a.p, a.beta, a.nu, a.m, a.trials, a.seed, &EstimatorOptions::plain())?;
            let summary = format!("mean {} (se {})", e.mean, e.std_error);
            Ok(Report { body: estimate_body(fmt, &e), summary })
        }
        Command::Sweep(a) => {
            let grid = if a.betas.is_empty() { doubling_grid(a.beta_max) } else { a.betas.clone() };
            let s = continuity_sweep(a.p, a.nu, a.m, &grid, a.trials, a.seed, &EstimatorOptions::plain())?;
            Ok(Report { summary: sweep_summary(&s), body: sweep_body(fmt, &s) })
        }
        Command::Channels(a) => channels(fmt, &a.rect, false),
        Command::Strongchannels(a) => channels(fmt, &a.rect, true),
        Command::Percentage(a) => {
            let rect = a.rect.rect()?;
            let cfgs = a.rect.configs(&rect)?;
            let values: Vec<(u64, Option<u64>)> = cfgs
                .par_iter()
                .map(|cfg| Ok((cfg.seed(), strong_link_percentage(cfg, &rect, a.budget)?)))
                .collect::<rigidperc::Result<_>>()?;
            let body = match fmt {
                Format::Csv => csv_body(
                    "p,N,delta,nu_x,nu_y,budget,seed,strong_links",
                    values.iter().map(|(seed, v)| {
                        format!("{},{},{},{},{},{},{seed},{}", a.rect.p, rect.n, rect.delta, rect.nu.0, rect.nu.1, a.budget, opt(*v))
                    }),
                ),
                Format::Json => json_body(json!({
                    "rectangle": to_value(&rect), "p": a.rect.p, "budget": a.budget,
                    "trials": values.iter().map(|(seed, v)| json!({"seed": seed, "strong_links": v})).collect::<Vec<_>>(),
                })),
            };
            let positive = values.iter().filter(|(_, v)| v.is_some_and(|v| v > 0)).count();
            let absent = values.iter().filter(|(_, v)| v.is_none()).count();
            let summary = format!("{positive} of {} trials need strong links, {absent} without a channel", values.len());
            Ok(Report { body, summary })
        }
        Command::Energy(a) => {
            check_p(a.p)?;
            let text = fs::read_to_string(&a.field).map_err(|e| Failure::Invalid(format!("{}: {e}", a.field.display())))?;
            let parsed = SpinField::from_text(&text, a.eps)?;
            let w = Window::with_origin(parsed.window().width(), parsed.window().height(), a.origin_x, a.origin_y)?;
            let field = SpinField::from_fn(w, a.eps, |i, j| (parsed.get(i, j), false));
            let cfg = BondConfig::sample(w, a.p, a.seed)?;
            let e = energy(&cfg, &field)?;
            Ok(Report { body: energy_body(fmt, &e, None), summary: energy_summary(&e) })
        }
        Command::Groundstate(a) => {
            check_p(a.p)?;
            if a.n < 2 {
                return Err(Failure::Invalid(format!("n must be at least 2, got {}", a.n)));
            }
            if !(a.eps > 0.0 && a.eps.is_finite()) {
                return Err(Failure::Invalid(format!("eps must be positive, got {}", a.eps)));
            }
            let w = Window::new(a.n, a.n)?;
            let bc = match a.bc {
                Boundary::Halves => SpinField::halves(w, a.eps),
                Boundary::TopBottom => SpinField::top_bottom(w, a.eps),
                Boundary::Random => SpinField::random_ring(w, a.eps, a.bc_seed),
            };
            let cfg = BondConfig::sample(w, a.p, a.seed)?;
            let (u, e) = ground_state(&cfg, &bc)?;
            if let Some(path) = &a.grid {
                fs::write(path, u.to_text()).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            }
            Ok(Report { body: energy_body(fmt, &e, Some(&u)), summary: energy_summary(&e) })
        }
        Command::Rigidity(a) => {
            let r = rigidity_probe(a.p, a.n, a.trials, a.seed)?;
            let body = match fmt {
                Format::Csv => csv_body(
                    "p,N,trials,infinite,fraction",
                    [format!("{},{},{},{},{}", r.p, r.n, r.trials, r.infinite, r.fraction)],
                ),
                Format::Json => json_body(to_value(&r)),
            };
            let summary = format!("infinite fraction {} ({} of {})", r.fraction, r.infinite, r.trials);
            Ok(Report { body, summary })
        }
        Command::Interface(a) => {
            let c = interface_vs_lambda(a.p, a.n, a.trials, a.seed)?;
            let body = match fmt {
                Format::Csv => csv_body(InterfaceComparison::CSV_HEADER, [c.to_csv()]),
                Format::Json => json_body(to_value(&c)),
            };
            let summary = format!(
                "density {} vs lambda {}, difference {} (tolerance {})",
                c.density_mean, c.lambda.mean, c.difference, c.tolerance
            );
            Ok(Report { body, summary })
        }
    }
}

fn scan_body(fmt: Format, rows: &[ScanRow]) -> String {
    match fmt {
        Format::Csv => csv_body(ScanRow::CSV_HEADER, rows.iter().map(ScanRow::to_csv)),
        Format::Json => json_body(to_value(&rows)),
    }
}

fn estimate_body(fmt: Format, e: &Estimate) -> String {
    match fmt {
        Format::Csv => csv_body(Estimate::CSV_HEADER, [e.to_csv()]),
        Format::Json => json_body(to_value(e)),
    }
}

fn sweep_body(fmt: Format, s: &Sweep) -> String {
    match fmt {
        Format::Csv => s.to_csv(),
        Format::Json => json_body(to_value(s)),
    }
}

fn sweep_summary(s: &Sweep) -> String {
    let first = &s.rows[0];
    let last = s.rows.last().expect("non-empty grid");
    let lambda = s.lambda.as_ref().map_or("none (all trials discarded)".to_string(), |l| l.mean.to_string());
    format!(
        "phi({}) = {}, phi({}) = {}, lambda {lambda}",
        first.beta, first.estimate.mean, last.beta, last.estimate.mean
    )
}

fn distance(fmt: Format, a: &DistanceArgs) -> Result<Report, Failure> {
    let cfg = a.window.config()?;
    match a.beta {
        None => {
            let point = |(x, y): (f64, f64)| {
                DualPoint::from_coords(x, y).ok_or_else(|| Failure::Invalid(format!("({x}, {y}) is not a half-integer point")))
            };
            let r = chemical_distance(&cfg, point(a.from)?, point(a.to)?)?;
            let body = match (&r, fmt) {
                (PathResult::Finite { path, .. }, Format::Csv) => path_csv(&cfg, path),
                (PathResult::Unreachable, Format::Csv) => "x2,y2\n".to_string(),
                (_, Format::Json) => {
                    let w = cfg.window();
                    let path: Vec<Value> = r
                        .path()
                        .unwrap_or_default()
                        .iter()
                        .map(|&b| to_value(&w.dual_midpoint(b).expect("path bonds lie in the window")))
                        .collect();
                    json_body(json!({ "value": r.value(), "path": path }))
                }
            };
            let summary = match r.value() {
                Some(v) => format!("chemical distance {v}"),
                None => "chemical distance unreachable".to_string(),
            };
            Ok(Report { body, summary })
        }
        Some(beta) => {
            let vertex = |(x, y): (f64, f64)| {
                if x.fract() == 0.0 && y.fract() == 0.0 {
                    Ok(Vertex::new(x as i64, y as i64))
                } else {
                    Err(Failure::Invalid(format!("({x}, {y}) is not a lattice vertex")))
                }
            };
            let r = passage_time(&cfg, Beta::new(beta)?, vertex(a.from)?, vertex(a.to)?)?;
            let body = match fmt {
                Format::Csv => csv_body(
                    "x,y",
                    r.path().unwrap_or_default().iter().map(|v| format!("{},{}", v.x, v.y)),
                ),
                Format::Json => json_body(json!({ "value": r.value(), "path": to_value(&r.path().unwrap_or_default()) })),
            };
            let summary = match r.value() {
                Some(v) => format!("passage time {v}"),
                None => "passage time unreachable".to_string(),
            };
            Ok(Report { body, summary })
        }
    }
}

fn channels(fmt: Format, a: &RectArgs, strong: bool) -> Result<Report, Failure> {
    let rect = a.rect()?;
    let cfgs = a.configs(&rect)?;
    let reports: Vec<ChannelReport> = cfgs
        .par_iter()
        .map(|cfg| if strong { count_strong_dual_channels(cfg, &rect) } else { count_disjoint_channels(cfg, &rect) })
        .collect::<rigidperc::Result<_>>()?;
    let body = match fmt {
        Format::Csv => csv_body(ChannelReport::CSV_HEADER, cfgs.iter().zip(&reports).map(|(c, r)| r.to_csv(c, &rect))),
        Format::Json => json_body(json!({
            "rectangle": to_value(&rect),
            "p": a.p,
            "trials": cfgs.iter().zip(&reports).map(|(c, r)| {
                let mut v = to_value(r);
                v["seed"] = json!(c.seed());
                v
            }).collect::<Vec<_>>(),
        })),
    };
    let mean = reports.iter().map(|r| r.normalized).sum::<f64>() / reports.len() as f64;
    let summary = format!("mean normalized count {mean} over {} trials", reports.len());
    Ok(Report { body, summary })
}

fn energy_body(fmt: Format, e: &rigidperc::spin::EnergyValue, field: Option<&SpinField>) -> String {
    match fmt {
        Format::Csv => csv_body(
            "finite,value,broken_weak,broken_strong",
            [format!("{},{},{},{}", e.is_finite(), opt(e.value()), e.broken_weak, e.broken_strong)],
        ),
        Format::Json => {
            let mut v = json!({ "energy": to_value(e) });
            if let Some(u) = field {
                v["field"] = json!(u.to_text().lines().collect::<Vec<_>>());
            }
            json_body(v)
        }
    }
}

fn energy_summary(e: &rigidperc::spin::EnergyValue) -> String {
    match e.value() {
        Some(v) => format!("energy {v}"),
        None => format!("energy infinite ({} broken strong bonds)", e.broken_strong),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == Some(0) {
        eprintln!("error: --jobs must be positive");
        return ExitCode::from(2);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let report = match pool.install(|| run(&cli)) {
        Ok(r) => r,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &report.body) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(3);
            }
            println!("{}", report.summary);
        }
        None => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.body.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(3);
            }
            eprintln!("{}", report.summary);
        }
    }
    ExitCode::SUCCESS
}
