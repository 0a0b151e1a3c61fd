//! Command-line surface: every experiment as a subcommand emitting one table.
//!
//! Exit codes: 0 success, 1 verification (or other runtime) failure, 2 usage
//! or invalid input, 3 capacity guard, 4 eigensolver non-convergence.

pub mod table;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{
    chi_ratio, chi_ratio_transfer, contiguous_lambdas, eh_couplings_contiguous, eh_couplings_noncontiguous,
    heisenberg_gs_overlap, noncontiguous_lambdas, noncontiguous_lambdas_half_infinite, ChiReport, CouplingFit,
};
use crate::ed::{
    degeneracy_profile, ent_gap_with, ent_levels, fidelity_with, physical_gap_with, physical_levels, LanczosConfig,
};
use crate::error::{Error, Result};
use crate::fit::{fit_gap, fit_sop, fit_sop_fixed_asymptote, FitResult, SopFitOptions};
use crate::mps::BlockLength;
use crate::sop::{sop_asymptotic, sop_bbh, sop_transfer_aklt};
use crate::spin_ops::{Boundary, THETA_AKLT};
use table::{Format, Table, Value};

#[derive(Debug, Parser)]
#[command(name = "haldane", version, about = "AKLT entanglement spectra and BBH bulk-edge numerics")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "HALDANE_THREADS")]
    pub threads: Option<usize>,
    /// Eigensolver residual tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form AKLT entanglement spectra.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Entanglement-Hamiltonian couplings.
    Couplings(CouplingsArgs),
    /// χ₁/χ₂ of the dominant two-block eigenvector.
    ChiRatio {
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ChiRoute::Auto)]
        method: ChiRoute,
    },
    /// Squared overlap with the four-site Heisenberg ground state.
    GsOverlap {
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<usize>,
    },
    /// Physical and entanglement gaps of the BBH chain.
    Gaps {
        #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
        theta: f64,
        /// Open-chain lengths for the physical gap.
        #[arg(long, value_delimiter = ',', default_value = "6,8,10,12")]
        sizes: Vec<usize>,
        /// Block lengths `l` for the entanglement gap (ring of `2l` sites).
        #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
        ent_lengths: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        which: Which,
    },
    /// Lowest physical or entanglement levels with their degeneracy profile.
    Levels {
        #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
        theta: f64,
        /// Open-chain length (phy) or ring length `2l` (ent).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 15)]
        k: usize,
        #[arg(long, value_enum)]
        which: LevelKind,
        /// Relative tolerance of the degeneracy grouping.
        #[arg(long, default_value_t = 1e-4)]
        rel_tol: f64,
    },
    /// Overlap of the open-chain and entanglement ground states.
    Fidelity {
        /// `A:B:STEP`, endpoints included.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, conflicts_with = "theta")]
        theta_range: Option<ThetaRange>,
        #[arg(long, value_parser = parse_theta, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Vec<f64>,
        #[arg(long)]
        l: usize,
    },
    /// String order parameter.
    Sop(SopArgs),
    /// Exponential fits of tables produced by `gaps` or `sop`.
    #[command(subcommand)]
    Fit(FitCmd),
    /// Analytic identity suite; exits 1 if any identity fails.
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum SpectrumCmd {
    Contiguous {
        #[arg(long)]
        l: usize,
        /// Ring size or `inf`.
        #[arg(long, value_parser = parse_length)]
        n: BlockLength,
        #[arg(long)]
        normalized: bool,
    },
    Noncontiguous {
        #[arg(long)]
        la: usize,
        #[arg(long)]
        lb: usize,
        /// Two `A` blocks inside an infinite chain (always normalized).
        #[arg(long)]
        half_infinite: bool,
        #[arg(long)]
        normalized: bool,
    },
}

#[derive(Debug, Args)]
pub struct CouplingsArgs {
    #[arg(long, value_enum)]
    mode: CouplingMode,
    /// Block length(s) for the contiguous mode.
    #[arg(long, value_delimiter = ',')]
    l: Vec<usize>,
    /// Ring size or `inf` for the contiguous mode.
    #[arg(long, value_parser = parse_length, default_value = "inf")]
    n: BlockLength,
    #[arg(long)]
    la: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    lb: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SopArgs {
    #[arg(long, value_enum)]
    mode: SopMode,
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true, default_value = "aklt")]
    theta: f64,
    /// System size(s); `inf` is accepted by the asymptotic mode.
    #[arg(long, value_delimiter = ',', value_parser = parse_length, required = true)]
    n: Vec<BlockLength>,
    /// String length for the transfer mode (default `N − 2`).
    #[arg(long)]
    l: Option<usize>,
    /// Divide the transfer value by `Tr E^N`.
    #[arg(long)]
    normalized: bool,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    boundary: BoundaryArg,
}

#[derive(Debug, Subcommand)]
pub enum FitCmd {
    /// `Δ(N) = a₀ e^{−N/ξ}` per gap kind, on the `size` and `gap` columns.
    Gap {
        #[arg(long)]
        input: PathBuf,
        /// Restrict to one kind (`phy` or `ent`).
        #[arg(long)]
        kind: Option<String>,
    },
    /// `O(N) = O_∞ + A e^{−N/ξ}` on the `n_sites` and `value` columns.
    Sop {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long)]
        allow_mixed_parity: bool,
        /// Keep `O_∞` fixed and fit only `A` and `ξ`.
        #[arg(long, allow_hyphen_values = true)]
        fixed_asymptote: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChiRoute {
    /// Explicit ring when it fits (`4l ≤ 12`), transfer matrices otherwise.
    Auto,
    BruteForce,
    Transfer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Phy,
    Ent,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelKind {
    Phy,
    Ent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingMode {
    Contiguous,
    Noncontiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SopMode {
    Ed,
    Transfer,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Open,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

/// A number, or `aklt` for `arctan(1/3)`.
fn parse_theta(s: &str) -> std::result::Result<f64, String> {
    if s.eq_ignore_ascii_case("aklt") {
        return Ok(THETA_AKLT);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number or `aklt`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_length(s: &str) -> std::result::Result<BlockLength, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(BlockLength::Infinite);
    }
    s.parse()
        .map(BlockLength::Finite)
        .map_err(|_| format!("`{s}` is not a length or `inf`"))
}

/// Grid parsed from `A:B:STEP`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRange(pub Vec<f64>);

/// `A:B:STEP` → `A, A+STEP, …` up to `B` (inclusive within STEP·1e-9).
fn parse_range(s: &str) -> std::result::Result<ThetaRange, String> {
    let parts: Vec<_> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(format!("`{s}` is not of the form A:B:STEP"));
    };
    let (a, b, step) = (parse_theta(a)?, parse_theta(b)?, parse_theta(step)?);
    if !(step > 0.0) || b < a {
        return Err("range needs STEP > 0 and B ≥ A".into());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(format!("range has {count} points"));
    }
    Ok(ThetaRange((0..count).map(|i| a + i as f64 * step).collect()))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => 3,
        Error::NoConvergence { .. } => 4,
        Error::InvalidArgument(_) | Error::Degenerate { .. } | Error::Table(_) => 2,
        _ => 1,
    }
}

/// Result of one command: its table and whether it counts as a success.
pub struct Outcome {
    pub table: Table,
    pub ok: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, ok: true }
    }
}

fn solver_config(cli: &Cli) -> Result<LanczosConfig> {
    match cli.tol {
        Some(t) if !(t > 0.0) => Err(Error::invalid(format!("tolerance must be positive, got {t}"))),
        Some(t) => Ok(LanczosConfig::with_tol(t)),
        None => Ok(LanczosConfig::default()),
    }
}

fn fmt_list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Run the parsed command. The thread pool must already be configured.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = solver_config(cli)?;
    let mut meta = vec![
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("threads".to_string(), rayon::current_num_threads().to_string()),
        ("tol".to_string(), format!("{:e}", cfg.tol)),
    ];
    let (name, mut outcome) = dispatch(&cli.command, &cfg)?;
    meta.insert(0, ("command".to_string(), name));
    meta.append(&mut outcome.table.meta);
    outcome.table.meta = meta;
    Ok(outcome)
}

fn dispatch(cmd: &Command, cfg: &LanczosConfig) -> Result<(String, Outcome)> {
    Ok(match cmd {
        Command::Spectrum(s) => spectrum(s)?,
        Command::Couplings(a) => ("couplings".into(), couplings(a)?.into()),
        Command::ChiRatio { l, method } => ("chi-ratio".into(), chi(l, *method)?.into()),
        Command::GsOverlap { l } => ("gs-overlap".into(), gs_overlap(l)?.into()),
        Command::Gaps {
            theta,
            sizes,
            ent_lengths,
            which,
        } => ("gaps".into(), gaps(*theta, sizes, ent_lengths, *which, cfg)?.into()),
        Command::Levels {
            theta,
            n,
            k,
            which,
            rel_tol,
        } => ("levels".into(), levels(*theta, *n, *k, *which, *rel_tol, cfg)?.into()),
        Command::Fidelity { theta_range, theta, l } => {
            let thetas = match theta_range {
                Some(r) => r.0.clone(),
                None if theta.is_empty() => return Err(Error::invalid("give --theta-range or --theta")),
                None => theta.clone(),
            };
            ("fidelity".into(), fidelity(&thetas, *l, cfg)?.into())
        }
        Command::Sop(a) => ("sop".into(), sop(a, cfg)?.into()),
        Command::Fit(f) => fit(f)?,
        Command::Verify => {
            let (table, ok) = verify::run()?;
            ("verify".into(), Outcome { table, ok })
        }
    })
}

fn spectrum(cmd: &SpectrumCmd) -> Result<(String, Outcome)> {
    let mut t = Table::new(["index", "lambda", "ent_energy", "multiplicity"]);
    match *cmd {
        SpectrumCmd::Contiguous { l, n, normalized } => {
            let s = contiguous_lambdas(l, n, normalized)?;
            t.meta("l", l).meta("n", n).meta("normalized", normalized);
            t.meta("sum", format!("{:.16e}", s.sum()));
            for (i, &x) in s.lambdas.iter().enumerate() {
                let mult = if i == 0 { 1usize } else { 3 };
                t.push(vec![i.into(), x.into(), (-x.ln()).into(), mult.into()]);
            }
            Ok(("spectrum-contiguous".into(), t.into()))
        }
        SpectrumCmd::Noncontiguous {
            la,
            lb,
            half_infinite,
            normalized,
        } => {
            let s = if half_infinite {
                noncontiguous_lambdas_half_infinite(la, lb)?
            } else {
                noncontiguous_lambdas(la, lb, normalized)?
            };
            t.meta("la", la)
                .meta("lb", if half_infinite { BlockLength::Infinite } else { s.lb })
                .meta("half_infinite", half_infinite)
                .meta("normalized", s.normalized)
                .meta("sum", format!("{:.16e}", s.sum()));
            for &(start, len) in &s.classes {
                for i in start..start + len {
                    let x = s.lambdas[i];
                    t.push(vec![(i + 1).into(), x.into(), (-x.ln()).into(), len.into()]);
                }
            }
            Ok(("spectrum-noncontiguous".into(), t.into()))
        }
    }
}

fn coupling_row(la: usize, lb: Value, n: Value, f: &CouplingFit) -> Vec<Value> {
    vec![
        la.into(),
        lb,
        n,
        f.eps0.into(),
        f.j1.into(),
        f.j2.into(),
        f.residual.into(),
        if f.degenerate { "true" } else { "false" }.into(),
    ]
}

fn couplings(a: &CouplingsArgs) -> Result<Table> {
    let mut t = Table::new(["la", "lb", "n", "eps0", "j1", "j2", "residual", "degenerate"]);
    match a.mode {
        CouplingMode::Contiguous => {
            if a.l.is_empty() {
                return Err(Error::invalid("contiguous couplings need --l"));
            }
            t.meta("mode", "contiguous").meta("l", fmt_list(&a.l)).meta("n", a.n);
            for &l in &a.l {
                let f = eh_couplings_contiguous(l, a.n)?;
                t.push(coupling_row(l, Value::Missing, a.n.to_string().into(), &f));
            }
        }
        CouplingMode::Noncontiguous => {
            let (Some(la), false) = (a.la, a.lb.is_empty()) else {
                return Err(Error::invalid("noncontiguous couplings need --la and --lb"));
            };
            t.meta("mode", "noncontiguous").meta("la", la).meta("lb", fmt_list(&a.lb));
            for &lb in &a.lb {
                let f = eh_couplings_noncontiguous(la, lb)?;
                t.push(coupling_row(la, lb.into(), (2 * (la + lb)).into(), &f));
            }
        }
    }
    Ok(t)
}

/// Rows for degenerate block lengths carry only the multiplicity.
fn chi(ls: &[usize], method: ChiRoute) -> Result<Table> {
    let mut t = Table::new([
        "l",
        "method",
        "chi1",
        "chi2",
        "ratio",
        "raw_ratio",
        "norm",
        "top_multiplicity",
    ]);
    t.meta("l", fmt_list(ls)).meta("method", format!("{method:?}").to_lowercase());
    for &l in ls {
        let brute = match method {
            ChiRoute::Auto => 4 * l <= 12,
            ChiRoute::BruteForce => true,
            ChiRoute::Transfer => false,
        };
        let r: Result<ChiReport> = if brute { chi_ratio(l) } else { chi_ratio_transfer(l) };
        let route: Value = if brute { "brute_force" } else { "transfer" }.into();
        match r {
            Ok(r) => t.push(vec![
                l.into(),
                route,
                r.chi1.into(),
                r.chi2.into(),
                r.ratio.into(),
                r.raw_ratio.into(),
                r.norm.into(),
                1usize.into(),
            ]),
            Err(Error::Degenerate { multiplicity, .. }) => {
                let mut row = vec![l.into(), route];
                row.extend(std::iter::repeat_n(Value::Missing, 5));
                row.push(multiplicity.into());
                t.push(row);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(t)
}

fn gs_overlap(ls: &[usize]) -> Result<Table> {
    let mut t = Table::new(["l", "overlap", "top_multiplicity"]);
    t.meta("l", fmt_list(ls));
    for &l in ls {
        match heisenberg_gs_overlap(l) {
            Ok(x) => t.push(vec![l.into(), x.into(), 1usize.into()]),
            Err(Error::Degenerate { multiplicity, .. }) => {
                t.push(vec![l.into(), Value::Missing, multiplicity.into()])
            }
            Err(e) => return Err(e),
        }
    }
    Ok(t)
}

fn gaps(theta: f64, sizes: &[usize], ent: &[usize], which: Which, cfg: &LanczosConfig) -> Result<Table> {
    let mut t = Table::new(["kind", "theta", "size", "n_sites", "gap"]);
    t.meta("theta", theta).meta("which", format!("{which:?}").to_lowercase());
    if which != Which::Ent {
        t.meta("sizes", fmt_list(sizes));
        for &n in sizes {
            let g = physical_gap_with(theta, n, cfg)?;
            t.push(vec!["phy".into(), theta.into(), n.into(), n.into(), g.gap.into()]);
        }
    }
    if which != Which::Phy {
        t.meta("ent_lengths", fmt_list(ent));
        for &l in ent {
            let g = ent_gap_with(theta, l, cfg)?;
            t.push(vec!["ent".into(), theta.into(), l.into(), (2 * l).into(), g.gap.into()]);
        }
    }
    Ok(t)
}

fn levels(theta: f64, n: usize, k: usize, which: LevelKind, rel_tol: f64, cfg: &LanczosConfig) -> Result<Table> {
    let values = match which {
        LevelKind::Phy => physical_levels(theta, n, k, cfg)?,
        LevelKind::Ent => {
            if n % 2 != 0 {
                return Err(Error::invalid(format!("entanglement levels need an even ring, got {n}")));
            }
            ent_levels(theta, n / 2, k, cfg)?
        }
    };
    let profile = degeneracy_profile(&values, rel_tol);
    let mut t = Table::new(["index", "level", "excitation", "group"]);
    t.meta("theta", theta)
        .meta("n", n)
        .meta("k", k)
        .meta("which", format!("{which:?}").to_lowercase())
        .meta("rel_tol", rel_tol)
        .meta("profile", fmt_list(&profile));
    let mut group = 0usize;
    let mut left = profile.first().copied().unwrap_or(0);
    for (i, &e) in values.iter().enumerate() {
        if left == 0 {
            group += 1;
            left = profile[group];
        }
        left -= 1;
        t.push(vec![i.into(), e.into(), (e - values[0]).into(), group.into()]);
    }
    Ok(t)
}

fn fidelity(thetas: &[f64], l: usize, cfg: &LanczosConfig) -> Result<Table> {
    let mut t = Table::new(["theta", "l", "fidelity", "gs_degeneracy", "rdm_top_multiplicity"]);
    t.meta("l", l).meta("points", thetas.len());
    for &th in thetas {
        let f = fidelity_with(th, l, cfg)?;
        t.push(vec![
            th.into(),
            l.into(),
            f.value.into(),
            f.gs_degeneracy_used.into(),
            f.rdm_top_multiplicity.into(),
        ]);
    }
    Ok(t)
}

fn finite(n: BlockLength, what: &str) -> Result<usize> {
    match n {
        BlockLength::Finite(n) => Ok(n),
        BlockLength::Infinite => Err(Error::invalid(format!("{what} needs finite sizes"))),
    }
}

fn sop(a: &SopArgs, cfg: &LanczosConfig) -> Result<Table> {
    let mut t = Table::new(["theta", "n_sites", "string_length", "value", "normalized"]);
    let mode = format!("{:?}", a.mode).to_lowercase();
    t.meta("mode", &mode).meta("n", fmt_list(&a.n));
    let flag = |b: bool| Value::from(if b { "true" } else { "false" });
    match a.mode {
        SopMode::Asymptotic => {
            for &n in &a.n {
                let l = match n {
                    BlockLength::Finite(n) => Value::from(n.saturating_sub(2)),
                    BlockLength::Infinite => Value::Missing,
                };
                let size = match n {
                    BlockLength::Finite(n) => Value::from(n),
                    BlockLength::Infinite => "inf".into(),
                };
                t.push(vec![THETA_AKLT.into(), size, l, sop_asymptotic(n)?.into(), flag(false)]);
            }
        }
        SopMode::Transfer => {
            t.meta("normalized", a.normalized);
            for &n in &a.n {
                let n = finite(n, "the transfer mode")?;
                let l = a.l.unwrap_or(n.saturating_sub(2));
                let p = sop_transfer_aklt(l, n, a.normalized)?;
                t.push(vec![THETA_AKLT.into(), n.into(), l.into(), p.value.into(), flag(a.normalized)]);
            }
        }
        SopMode::Ed => {
            let boundary = Boundary::from(a.boundary);
            t.meta("theta", a.theta).meta("boundary", boundary);
            for &n in &a.n {
                let n = finite(n, "the ed mode")?;
                let p = sop_bbh(a.theta, n, boundary, cfg)?;
                t.push(vec![
                    a.theta.into(),
                    n.into(),
                    p.string_length.into(),
                    p.value.into(),
                    flag(true),
                ]);
            }
        }
    }
    Ok(t)
}

fn fit_row(label: Value, f: &FitResult) -> Vec<Value> {
    vec![
        label,
        f.asymptote.into(),
        f.amplitude.into(),
        f.xi.into(),
        f.rms_residual.into(),
        f.points_used.into(),
        f.loo_spread.into(),
    ]
}

const FIT_COLUMNS: [&str; 7] = ["kind", "asymptote", "amplitude", "xi", "rms_residual", "points", "loo_spread"];

fn fit(cmd: &FitCmd) -> Result<(String, Outcome)> {
    match cmd {
        FitCmd::Gap { input, kind } => {
            let data = Table::read(input)?;
            let sizes = data.column_f64("size")?;
            let gaps = data.column_f64("gap")?;
            let kinds: Vec<String> = if data.has_column("kind") {
                data.column("kind")?
                    .into_iter()
                    .map(|v| match v {
                        Value::Text(s) => s.clone(),
                        other => format!("{other:?}"),
                    })
                    .collect()
            } else {
                vec!["gap".into(); sizes.len()]
            };
            let mut order: Vec<&str> = Vec::new();
            for k in &kinds {
                if !order.contains(&k.as_str()) && kind.as_deref().is_none_or(|want| want == k) {
                    order.push(k);
                }
            }
            if order.is_empty() {
                return Err(Error::Table("no rows to fit".into()));
            }
            let mut t = Table::new(FIT_COLUMNS);
            t.meta("model", "gap").meta("input", input.display());
            for k in order {
                let pts: Vec<(f64, f64)> = (0..sizes.len())
                    .filter(|&i| kinds[i] == k)
                    .map(|i| (sizes[i], gaps[i]))
                    .collect();
                t.push(fit_row(k.into(), &fit_gap(&pts)?));
            }
            Ok(("fit-gap".into(), t.into()))
        }
        FitCmd::Sop {
            input,
            theta,
            allow_mixed_parity,
            fixed_asymptote,
        } => {
            let data = Table::read(input)?;
            let n = data.column_f64("n_sites")?;
            let o = data.column_f64("value")?;
            let pts: Vec<(f64, f64)> = n.into_iter().zip(o).collect();
            let theta = match theta {
                Some(t) => *t,
                None if data.has_column("theta") => data.column_f64("theta")?.first().copied().unwrap_or(f64::NAN),
                None => f64::NAN,
            };
            let f = match fixed_asymptote {
                Some(o_inf) => fit_sop_fixed_asymptote(&pts, *o_inf)?,
                None => fit_sop(
                    &pts,
                    theta,
                    SopFitOptions {
                        allow_mixed_parity: *allow_mixed_parity,
                    },
                )?,
            };
            let mut t = Table::new(FIT_COLUMNS);
            t.meta("model", "sop").meta("input", input.display()).meta("theta", theta);
            t.push(fit_row("sop".into(), &f));
            Ok(("fit-sop".into(), t.into()))
        }
    }
}

/// Parse, run and write; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        // the global pool can only be set once per process
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|f| {
                let mut w = std::io::BufWriter::new(f);
                outcome.table.write(cli.format, &mut w)?;
                w.flush().map_err(Error::from)
            }),
        None => {
            let mut out = std::io::stdout().lock();
            outcome.table.write(cli.format, &mut out)
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    if outcome.ok {
        0
    } else {
        1
    }
}
