//! Batch front end: every computation in the library behind one binary,
//! writing CSV/JSON tables plus a JSON metadata sidecar per run.

mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use output::{Cell, Format, Table};
use qlim_core::boxes::SliceKind;
use qlim_core::dicke::{
    mc_equivalence_scan, ppt_all, pptds_volume_mc, sds_fit, sds_volume_closed,
    sds_volume_closed_f64, DickeDiagonalState, SdsFit,
};
use qlim_core::driven::omega_sweep;
use qlim_core::qbounds::{trace_boundary, Criterion, SolverConfig};
use qlim_core::radiance::{
    certify_separability_over_time, log_spaced, standardrad_evolve, superrad_evolve, RadianceModel,
    RadianceParams,
};
use qlim_core::tsirelson::{
    lhvm_max, nosig_max, table_bound, tsirelson_bound, BoundClass, BoundOptions, TableFamily,
    TsirelsonFunctional,
};

#[derive(Parser)]
#[command(
    name = "qlim",
    version,
    about = "Quantum correlation bounds and symmetric-state separability, as batch jobs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output path; stdout when omitted. File output also writes
    /// <out>.meta.json with the run configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed for every stochastic solver in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Grid size: sweep points per axis (meaning depends on subcommand).
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Solver tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Worker threads; defaults to the core count. Outputs do not depend
    /// on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SliceArg {
    Gamma,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Superrad,
    Standardrad,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and numeric bounds for the tabulated functional
    /// families swept over the weight x.
    BoundsTable {
        /// Comma-separated families among qb1, qb2, qb3.
        #[arg(long, default_value = "qb1,qb2,qb3")]
        families: String,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        x_max: f64,
        /// JSON file with a custom functional as a map like
        /// {"A0": 1.0, "A0B1": -1.0}; replaces the family sweep.
        #[arg(long)]
        functional: Option<PathBuf>,
    },
    /// Maximal-xi boundary curves along one slice for the chosen criteria.
    Slice {
        #[arg(long, value_enum)]
        kind: SliceArg,
        /// Comma-separated among uffink, npa1, lo2, qb3, npa1ab.
        #[arg(long, default_value = "uffink,npa1,lo2,qb3,npa1ab")]
        criteria: String,
    },
    /// Separability certification of a state file or of a radiating model
    /// over time.
    Sepfit {
        /// JSON state file {"N": .., "chi": [..]}.
        #[arg(long, conflicts_with_all = ["model", "n"])]
        state: Option<PathBuf>,
        #[arg(long, value_enum, requires = "n")]
        model: Option<ModelArg>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Time points for model certification.
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Closed-form and Monte Carlo state-space volumes, with an optional
    /// PPT-vs-fit equivalence scan.
    Volumes {
        #[arg(long)]
        n: usize,
        /// PPT states to push through the separability fit (0 = skip).
        #[arg(long, default_value_t = 0)]
        scan_samples: u64,
    },
    /// Population trajectories of both radiating models on one time grid.
    Radiance {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Add the rescaled-time column y = 1 - exp(-Gamma t).
        #[arg(long)]
        rescaled_time: bool,
    },
    /// Steady-state spin squeezing and reduced-state negativity over a
    /// drive-ratio sweep, or a single steady-state dump at --omega.
    Driven {
        #[arg(long)]
        n: usize,
        /// Solve one drive ratio and dump the steady state's element
        /// array (upper triangle) as JSON instead of sweeping.
        #[arg(long)]
        omega: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// 1 for solver non-convergence, 2 for usage and input problems.
fn classify(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qlim_core::Error>() {
        Some(qlim_core::Error::NonConvergence { .. })
        | Some(qlim_core::Error::SingularSystem { .. }) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(tol) = cli.tol {
        if tol.is_nan() || tol <= 0.0 {
            bail!("--tol must be positive, got {tol}");
        }
    }
    if let Some(workers) = cli.workers {
        if workers == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("initializing worker pool")?;
    }
    match &cli.command {
        Command::BoundsTable {
            families,
            x_min,
            x_max,
            functional,
        } => cmd_bounds_table(&cli, families, *x_min, *x_max, functional.as_deref()),
        Command::Slice { kind, criteria } => cmd_slice(&cli, *kind, criteria),
        Command::Sepfit {
            state,
            model,
            n,
            gamma,
            points,
        } => cmd_sepfit(&cli, state.as_deref(), *model, *n, *gamma, *points),
        Command::Volumes { n, scan_samples } => cmd_volumes(&cli, *n, *scan_samples),
        Command::Radiance {
            n,
            gamma,
            rescaled_time,
        } => cmd_radiance(&cli, *n, *gamma, *rescaled_time),
        Command::Driven { n, omega } => cmd_driven(&cli, *n, *omega),
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn parse_functional_file(path: &std::path::Path) -> Result<TsirelsonFunctional> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map: BTreeMap<String, f64> = serde_json::from_str(&text)
        .context("functional file must be a JSON map of coefficients")?;
    let mut parties = 2usize;
    let mut terms: Vec<(Vec<(u8, u8)>, f64)> = Vec::new();
    for (key, coeff) in map {
        let mut ops = Vec::new();
        let mut chars = key.chars().peekable();
        while let Some(c) = chars.next() {
            let party = match c {
                'A' => 0u8,
                'B' => 1,
                'C' => 2,
                'D' => 3,
                other => bail!("bad operator letter '{other}' in key '{key}'"),
            };
            let setting = match chars.next() {
                Some('0') => 0u8,
                Some('1') => 1,
                _ => bail!("operator '{c}' in key '{key}' needs a setting digit 0 or 1"),
            };
            parties = parties.max(party as usize + 1);
            ops.push((party, setting));
        }
        if ops.is_empty() {
            bail!("empty key in functional file");
        }
        terms.push((ops, coeff));
    }
    let mut f = TsirelsonFunctional::new(parties)?;
    for (ops, coeff) in terms {
        f = f.with_term(&ops, coeff)?;
    }
    Ok(f)
}

fn cmd_bounds_table(
    cli: &Cli,
    families: &str,
    x_min: f64,
    x_max: f64,
    functional: Option<&std::path::Path>,
) -> Result<()> {
    let opts = BoundOptions {
        tol: cli.tol.unwrap_or(1e-7),
        ..BoundOptions::default()
    };
    let mut table = Table::new(vec![
        "family",
        "x",
        "lhvm",
        "quantum_numeric",
        "quantum_closed",
        "nosig",
    ]);

    if let Some(path) = functional {
        let f = parse_functional_file(path)?;
        let quantum = tsirelson_bound(&f, &opts)?;
        let lhvm = lhvm_max(&f)?;
        let nosig = if f.parties() == 2 {
            nosig_max(&f)?
        } else {
            f64::NAN
        };
        table.push(vec![
            Cell::Str("custom".into()),
            Cell::Float(f64::NAN),
            Cell::Float(lhvm),
            Cell::Float(quantum),
            Cell::Float(f64::NAN),
            Cell::Float(nosig),
        ]);
    } else {
        let fams: Vec<TableFamily> = families
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|name| match name.trim().to_ascii_lowercase().as_str() {
                "qb1" => Ok(TableFamily::Qb1),
                "qb2" => Ok(TableFamily::Qb2),
                "qb3" => Ok(TableFamily::Qb3),
                other => Err(anyhow!("unknown family '{other}' (expected qb1|qb2|qb3)")),
            })
            .collect::<Result<_>>()?;
        let count = cli.grid.unwrap_or(17);
        let xs = linspace(x_min, x_max, count);

        // Sweep rows, plus the fixed CHSH row when the sweep is nonempty.
        let mut jobs: Vec<(String, TableFamily, f64)> = Vec::new();
        if !xs.is_empty() {
            jobs.push(("TB".to_string(), TableFamily::Qb1, -1.0));
        }
        for fam in &fams {
            let name = match fam {
                TableFamily::Qb1 => "QB1",
                TableFamily::Qb2 => "QB2",
                TableFamily::Qb3 => "QB3",
            };
            for &x in &xs {
                jobs.push((name.to_string(), *fam, x));
            }
        }
        let rows: Vec<Vec<Cell>> = jobs
            .par_iter()
            .map(|(name, fam, x)| -> Result<Vec<Cell>> {
                let f = fam.functional(*x);
                let quantum = tsirelson_bound(&f, &opts)?;
                Ok(vec![
                    Cell::Str(name.clone()),
                    Cell::Float(*x),
                    Cell::Float(table_bound(*fam, BoundClass::Lhvm, *x)?),
                    Cell::Float(quantum),
                    Cell::Float(table_bound(*fam, BoundClass::Quantum, *x)?),
                    Cell::Float(table_bound(*fam, BoundClass::NoSig, *x)?),
                ])
            })
            .collect::<Result<_>>()?;
        table.rows = rows;
    }

    table.emit(
        cli.out.as_deref(),
        cli.format,
        "bounds-table",
        json!({
            "families": families,
            "x_min": x_min,
            "x_max": x_max,
            "grid": cli.grid.unwrap_or(17),
            "tol": cli.tol.unwrap_or(1e-7),
            "functional": functional.map(|p| p.display().to_string()),
        }),
        cli.seed,
    )
}

fn cmd_slice(cli: &Cli, kind: SliceArg, criteria: &str) -> Result<()> {
    let slice = match kind {
        SliceArg::Gamma => SliceKind::GammaSlice,
        SliceArg::Beta => SliceKind::BetaSlice,
    };
    let parsed: Vec<Criterion> = criteria
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse::<Criterion>().map_err(anyhow::Error::from))
        .collect::<Result<_>>()?;
    let grid = cli.grid.unwrap_or(41);
    let params = linspace(0.0, 1.0, grid);
    let cfg = SolverConfig {
        seed: cli.seed,
        xi_tol: cli.tol.unwrap_or(1e-4),
    };
    let curve = trace_boundary(slice, &parsed, &params, &cfg)?;

    let mut table = Table::new(vec!["param", "criterion", "xi_max", "converged"]);
    for p in &curve.points {
        table.push(vec![
            Cell::Float(p.param),
            Cell::Str(p.criterion.to_string()),
            Cell::Float(p.xi_max),
            Cell::Bool(p.converged),
        ]);
    }

    // Region where the semidefinite certificate is provably looser than
    // the best closed-form criterion, detectable on the beta slice.
    let mut red_region = json!(null);
    if slice == SliceKind::BetaSlice {
        let have_both = parsed.contains(&Criterion::Npa1ab) && parsed.contains(&Criterion::Qb3);
        if have_both {
            let mut best: Option<(f64, f64)> = None;
            for p in curve.points_for(Criterion::Npa1ab) {
                if !(0.25..0.5).contains(&p.param) || !p.converged {
                    continue;
                }
                let qb3 = curve
                    .points_for(Criterion::Qb3)
                    .find(|q| q.param == p.param)
                    .map(|q| q.xi_max);
                if let Some(qb3) = qb3 {
                    let gap = p.xi_max - qb3;
                    if best.is_none_or(|(_, g)| gap > g) {
                        best = Some((p.param, gap));
                    }
                }
            }
            match best {
                Some((beta, gap)) if gap > 5e-4 => {
                    println!(
                        "red-region: detected at beta = {} (npa1ab exceeds qb3 by {})",
                        output::fmt_float(beta),
                        output::fmt_float(gap)
                    );
                    red_region = json!({"detected": true, "beta": beta, "gap": gap});
                }
                Some((beta, gap)) => {
                    println!(
                        "red-region: not detected (best gap {} at beta = {})",
                        output::fmt_float(gap),
                        output::fmt_float(beta)
                    );
                    red_region = json!({"detected": false, "beta": beta, "gap": gap});
                }
                None => {
                    println!("red-region: no converged samples in beta range [0.25, 0.5)");
                }
            }
        } else {
            println!("red-region: requires both npa1ab and qb3 in --criteria");
        }
    }

    table.emit(
        cli.out.as_deref(),
        cli.format,
        "slice",
        json!({
            "kind": format!("{kind:?}").to_lowercase(),
            "criteria": parsed.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "grid": grid,
            "xi_tol": cfg.xi_tol,
            "red_region": red_region,
        }),
        cli.seed,
    )
}

fn push_fit_rows(table: &mut Table, t: f64, fit: &SdsFit) {
    match fit {
        SdsFit::Separable(d) => {
            for (j, (x, y)) in d.nodes.iter().enumerate() {
                table.push(vec![
                    Cell::Float(t),
                    Cell::Int(j as i64 + 1),
                    Cell::Float(*x),
                    Cell::Float(*y),
                    Cell::Float(d.residual),
                    Cell::Bool(true),
                ]);
            }
        }
        SdsFit::Infeasible(cert) => {
            table.push(vec![
                Cell::Float(t),
                Cell::Int(0),
                Cell::Float(f64::NAN),
                Cell::Float(f64::NAN),
                Cell::Float(cert.best_residual),
                Cell::Bool(false),
            ]);
        }
    }
}

fn cmd_sepfit(
    cli: &Cli,
    state: Option<&std::path::Path>,
    model: Option<ModelArg>,
    n: Option<usize>,
    gamma: f64,
    points: usize,
) -> Result<()> {
    let mut table = Table::new(vec!["t", "j", "x_j", "y_j", "residual", "certified"]);
    let config;
    match (state, model) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let s: DickeDiagonalState = serde_json::from_str(&text)
                .context("state file must be {\"N\": .., \"chi\": [..]}")?;
            s.validate()?;
            let ppt = ppt_all(&s);
            let fit = sds_fit(&s)?;
            match &fit {
                SdsFit::Separable(d) => {
                    println!("separable: residual = {}", output::fmt_float(d.residual));
                }
                SdsFit::Infeasible(cert) => {
                    if ppt {
                        println!(
                            "infeasible: no decomposition found (best residual {})",
                            output::fmt_float(cert.best_residual)
                        );
                    } else {
                        println!("infeasible: PPT violated");
                    }
                }
            }
            push_fit_rows(&mut table, 0.0, &fit);
            config = json!({"state": path.display().to_string()});
        }
        (None, Some(model)) => {
            let n = n.ok_or_else(|| anyhow!("--model requires --n"))?;
            let (radiance_model, horizon) = match model {
                ModelArg::Superrad => (RadianceModel::Superradiance, 10.0),
                ModelArg::Standardrad => (RadianceModel::Standardradiance, 100.0),
            };
            if points < 2 {
                bail!("--points must be at least 2");
            }
            let grid = log_spaced(1e-3 / gamma, horizon / gamma, points);
            let params = RadianceParams::new(n, gamma, grid)?;
            let certs = certify_separability_over_time(&params, radiance_model)?;
            let certified = certs.iter().filter(|c| c.fit.is_separable()).count();
            println!("certified {certified}/{} time points", certs.len());
            for c in &certs {
                push_fit_rows(&mut table, c.t, &c.fit);
            }
            config = json!({
                "model": format!("{model:?}").to_lowercase(),
                "n": n,
                "gamma": gamma,
                "points": points,
            });
        }
        (None, None) => bail!("provide --state FILE or --model with --n"),
    }
    table.emit(cli.out.as_deref(), cli.format, "sepfit", config, cli.seed)
}

fn cmd_volumes(cli: &Cli, n: usize, scan_samples: u64) -> Result<()> {
    let samples = cli.samples.unwrap_or(1_000_000);
    let mut table = Table::new(vec!["N", "method", "estimate", "stderr", "samples", "seed"]);
    if n <= 12 {
        let exact = sds_volume_closed(n)?;
        let estimate = sds_volume_closed_f64(n)?;
        println!(
            "closed-form volume: {exact} = {}",
            output::fmt_float(estimate)
        );
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Str("closed".into()),
            Cell::Float(estimate),
            Cell::Float(0.0),
            Cell::Int(0),
            Cell::Int(cli.seed as i64),
        ]);
    }
    let (mc, stderr) = pptds_volume_mc(n, samples, cli.seed)?;
    table.push(vec![
        Cell::Int(n as i64),
        Cell::Str("mc_ppt".into()),
        Cell::Float(mc),
        Cell::Float(stderr),
        Cell::Int(samples as i64),
        Cell::Int(cli.seed as i64),
    ]);
    if scan_samples > 0 {
        let failures = mc_equivalence_scan(n, scan_samples, cli.seed)?;
        println!("equivalence scan: {failures} fit failures over {scan_samples} PPT states");
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Str("fit_scan_failures".into()),
            Cell::Float(failures as f64),
            Cell::Float(0.0),
            Cell::Int(scan_samples as i64),
            Cell::Int(cli.seed as i64),
        ]);
    }
    table.emit(
        cli.out.as_deref(),
        cli.format,
        "volumes",
        json!({"n": n, "samples": samples, "scan_samples": scan_samples}),
        cli.seed,
    )
}

fn cmd_radiance(cli: &Cli, n: usize, gamma: f64, rescaled_time: bool) -> Result<()> {
    let points = cli.grid.unwrap_or(60);
    if points < 2 {
        bail!("--grid must be at least 2");
    }
    let grid = log_spaced(1e-3 / gamma, 10.0 / gamma, points);
    let params = RadianceParams::new(n, gamma, grid)?;
    let sup = superrad_evolve(&params)?;
    let ind = standardrad_evolve(&params)?;
    let mut columns = vec!["t", "n1", "chi_superrad", "chi_standardrad"];
    if rescaled_time {
        columns.push("y");
    }
    let mut table = Table::new(columns);
    for (i, &t) in params.t_grid.iter().enumerate() {
        for n1 in 0..=n {
            let mut row = vec![
                Cell::Float(t),
                Cell::Int(n1 as i64),
                Cell::Float(sup.states[i].chi[n1]),
                Cell::Float(ind.states[i].chi[n1]),
            ];
            if rescaled_time {
                row.push(Cell::Float(1.0 - (-gamma * t).exp()));
            }
            table.push(row);
        }
    }
    table.emit(
        cli.out.as_deref(),
        cli.format,
        "radiance",
        json!({"n": n, "gamma": gamma, "points": points, "rescaled_time": rescaled_time}),
        cli.seed,
    )
}

fn cmd_driven(cli: &Cli, n: usize, omega: Option<f64>) -> Result<()> {
    if let Some(omega) = omega {
        return dump_steady_state(cli, n, omega);
    }
    let points = cli.grid.unwrap_or(48);
    if points < 2 {
        bail!("--grid must be at least 2");
    }
    let grid = log_spaced(1e-2 * n as f64, 1e2 * n as f64, points);
    let sweep = omega_sweep(n, &grid)?;
    let mut table = Table::new(vec!["N", "Omega", "xi2", "negativity", "converged"]);
    for row in &sweep.rows {
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Float(row.omega),
            Cell::Float(row.xi2),
            Cell::Float(row.negativity),
            Cell::Bool(row.converged),
        ]);
    }
    match sweep.window_upper_edge {
        Some(edge) => println!(
            "squeezing window: xi2 < 1 up to Omega = {} (Omega/N = {})",
            output::fmt_float(edge),
            output::fmt_float(edge / n as f64)
        ),
        None => println!("squeezing window: no xi2 = 1 crossing on this grid"),
    }
    if let Some((omega, xi2)) = sweep.best {
        println!(
            "strongest squeezing: xi2 = {} at Omega = {}",
            output::fmt_float(xi2),
            output::fmt_float(omega)
        );
    }
    table.emit(
        cli.out.as_deref(),
        cli.format,
        "driven",
        json!({"n": n, "points": points, "window_upper_edge": sweep.window_upper_edge, "best": sweep.best}),
        cli.seed,
    )
}

/// JSON dump of one steady state: upper-triangle entries of the element
/// array with their indices, plus the squeezing diagnostic.
fn dump_steady_state(cli: &Cli, n: usize, omega: f64) -> Result<()> {
    let spec = qlim_core::driven::DriveSpec::new(n, omega)?;
    let steady = qlim_core::driven::steady_state(&spec)?;
    let mut entries = Vec::new();
    for na in 0..=n {
        for nb in na..=n {
            entries.push(json!({"na": na, "nb": nb, "x": steady.get(na, nb)}));
        }
    }
    let xi2 = if n >= 2 {
        Some(qlim_core::driven::spin_squeezing(&steady)?)
    } else {
        None
    };
    let doc = json!({
        "N": n,
        "Omega": omega,
        "xi2": xi2,
        "x_upper": entries,
    });
    let body = serde_json::to_string_pretty(&doc)? + "\n";
    match cli.out.as_deref() {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{body}"),
    }
    Ok(())
}
