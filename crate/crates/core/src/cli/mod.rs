//! Command-line front end. Every subcommand writes one JSON report (to
//! `--out` or stdout) carrying a `provenance` block with the resolved
//! configuration, so identical invocations give byte-identical reports.

mod selftest;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{
    counterexample_game, graph_separation, gr_hc_report, no_fixed_point_gap, sample_g_p, Wedge,
};
use crate::error::{Error, Result};
use crate::games::{
    nash_search_with, polynomial_like_check, refine_intersection, ArgminMode, Game, RefineOptions, SearchMethod,
};
use crate::homology::{homology, homology_all, ChainComplex, ComplexJson};
use crate::multifunction::GridMultifunction;
use crate::selection::{homological_selection_test, selection_report, Verdict, DEFAULT_EPS_STEPS};

#[derive(Debug, Parser, Serialize)]
#[command(name = "homsel", version, about = "Homological selection, configuration lifts and grid equilibria")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Also write a CSV summary, where the command has one.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,

    /// Worker threads for grid scans (falls back to HOMSEL_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Exit with status 2 when a verdict is FAILS or a lift is obstructed.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Integral homology of a chain complex given as JSON.
    Homology {
        #[arg(long)]
        complex: PathBuf,
        /// A single degree; all degrees when omitted.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Homological selection test of a sampled multifunction.
    SelectionTest {
        #[arg(long)]
        multifunction: PathBuf,
        /// ε as multiples of the grid step.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EPS_STEPS.to_vec())]
        eps_steps: Vec<usize>,
        /// An explicit ε, overriding the ladder.
        #[arg(long, conflicts_with = "eps_steps")]
        eps: Option<f64>,
    },
    /// Search for a configuration-valued lift of given total weight.
    Lift {
        #[arg(long)]
        multifunction: PathBuf,
        #[arg(long)]
        weight: u64,
        /// Strand matching tolerance; defaults to the larger of modulus and step.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Approximate equilibria on strategy grids.
    #[command(subcommand)]
    Nash(NashCommand),
    /// Reproductions of the worked examples.
    #[command(subcommand)]
    Repro(ReproCommand),
    /// Randomized property suites against independent oracles.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per suite.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NashCommand {
    /// Grid profiles whose regrets are all within the tolerance.
    Solve {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Intersections of fattened best-response graphs along a ladder.
    Refine {
        #[command(flatten)]
        game: GameArg,
        /// Rungs `eps:resolution`, comma separated, e.g. `0.1:16,0.05:32`.
        #[arg(long, value_delimiter = ',', required = true)]
        ladder: Vec<String>,
        /// Use discrete local minima as best responses.
        #[arg(long)]
        local: bool,
        #[arg(long, default_value_t = 1e-9)]
        argmin_tol: f64,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct GameArg {
    /// A game JSON file, or a builtin name such as `matching_pennies`.
    #[arg(long)]
    pub game: String,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Auto,
    Exhaustive,
    BranchAndBound,
}

impl From<MethodArg> for SearchMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => SearchMethod::Auto,
            MethodArg::Exhaustive => SearchMethod::Exhaustive,
            MethodArg::BranchAndBound => SearchMethod::BranchAndBound,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReproCommand {
    /// Cell complex of the graph of h_C and its homology.
    GrHc,
    /// Measured regret gap of the game without equilibria.
    NoNashGame {
        #[arg(long, value_delimiter = ',', default_values_t = vec![32, 64, 128])]
        resolution: Vec<usize>,
        /// Tolerance of the search measuring the minimal maximal regret.
        #[arg(long, default_value_t = 2e-3)]
        tol: f64,
    },
    /// Infeasibility certificate for weighted lifts of h_C.
    LiftObstruction {
        #[arg(long, value_delimiter = ',', default_values_t = vec![32, 64])]
        resolution: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        weight: u64,
    },
}

/// What a finished command hands back besides its report.
struct Output {
    report: Value,
    csv: Option<String>,
    /// A FAILS verdict or an obstruction.
    negative: bool,
}

impl Output {
    fn new(report: impl Serialize) -> Result<Output> {
        Ok(Output { report: serde_json::to_value(report)?, csv: None, negative: false })
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema { path: path.display().to_string(), msg: format!("cannot read: {e}") })?;
    let mut de = serde_json::Deserializer::from_str(&text);
    T::deserialize(&mut de).map_err(|e| Error::Schema { path: format!("{}:{}:{}", path.display(), e.line(), e.column()), msg: e.to_string() })
}

fn load_game(arg: &str) -> Result<Game> {
    let path = Path::new(arg);
    if path.exists() {
        Game::parse(&std::fs::read_to_string(path)?)
    } else {
        Game::parse(arg)
    }
}

fn check_resolution(r: usize) -> Result<()> {
    if r == 0 || !r.is_power_of_two() {
        return Err(Error::InvalidGrid(format!("resolution {r} is not a positive power of two")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveEpsilon(tol));
    }
    Ok(())
}

fn parse_ladder(rungs: &[String]) -> Result<Vec<(f64, usize)>> {
    rungs
        .iter()
        .map(|s| {
            let bad = || Error::Schema { path: "ladder".into(), msg: format!("rung '{s}' is not eps:resolution") };
            let (e, r) = s.split_once(':').ok_or_else(bad)?;
            let eps: f64 = e.trim().parse().map_err(|_| bad())?;
            let res: usize = r.trim().parse().map_err(|_| bad())?;
            check_tol(eps)?;
            check_resolution(res)?;
            Ok((eps, res))
        })
        .collect()
}

fn run_homology(complex: &Path, degree: Option<usize>) -> Result<Output> {
    let j: ComplexJson = read_json(complex)?;
    let c = ChainComplex::from_json(&j)?;
    match degree {
        Some(q) => Output::new(homology(&c, q)?),
        None => Output::new(json!({ "groups": homology_all(&c), "euler_characteristic": c.euler_characteristic() })),
    }
}

fn run_selection(path: &Path, eps_steps: &[usize], eps: Option<f64>) -> Result<Output> {
    let f: GridMultifunction = read_json(path)?;
    let (report, verdict, rows) = match eps {
        Some(e) => {
            let rung = homological_selection_test(&f, e)?;
            let v = rung.verdict;
            let rows = vec![(e, v, rung.induced.clone())];
            (serde_json::to_value(rung)?, Some(v), rows)
        }
        None => {
            if eps_steps.contains(&0) {
                return Err(Error::EpsilonTooSmall { eps: 0.0, step: f.step() });
            }
            let rep = selection_report(&f, eps_steps)?;
            let rows = rep.rungs.iter().map(|r| (r.eps, r.verdict, r.induced.clone())).collect();
            let v = rep.verdict();
            (serde_json::to_value(rep)?, v, rows)
        }
    };
    let mut csv = String::from("eps,verdict,induced\n");
    for (e, v, induced) in rows {
        let images: Vec<String> = induced.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(csv, "{e},{v:?},{}", images.join(" "));
    }
    Ok(Output { report, csv: Some(csv), negative: verdict == Some(Verdict::Fails) })
}

fn run_lift(path: &Path, weight: u64, tol: Option<f64>) -> Result<Output> {
    if let Some(t) = tol {
        check_tol(t)?;
    }
    let f: GridMultifunction = read_json(path)?;
    let rep = polynomial_like_check(&f, weight, tol)?;
    let negative = rep.outcome.is_obstructed();
    Ok(Output { negative, ..Output::new(rep)? })
}

fn run_nash(cmd: &NashCommand) -> Result<Output> {
    match cmd {
        NashCommand::Solve { game, resolution, tol, method } => {
            check_resolution(*resolution)?;
            check_tol(*tol)?;
            let g = load_game(&game.game)?;
            let rep = nash_search_with(&g, *resolution, *tol, (*method).into())?;
            let audited = rep.certificates.iter().map(|c| c.audit(&g)).collect::<Result<Vec<bool>>>()?;
            let mut csv = String::from("point,max_regret\n");
            for c in &rep.certificates {
                let p: Vec<String> = c.point.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(csv, "{},{}", p.join(" "), c.max_regret());
            }
            let mut out = Output::new(json!({ "search": rep, "audited": audited }))?;
            out.csv = Some(csv);
            Ok(out)
        }
        NashCommand::Refine { game, ladder, local, argmin_tol } => {
            check_tol(*argmin_tol)?;
            let g = load_game(&game.game)?;
            let ladder = parse_ladder(ladder)?;
            let opts = RefineOptions { argmin_tol: *argmin_tol, mode: if *local { ArgminMode::Local } else { ArgminMode::Global } };
            Output::new(refine_intersection(&g, &ladder, &opts)?)
        }
    }
}

#[derive(Serialize)]
struct GapRung {
    resolution: usize,
    min_max_regret: f64,
    min_max_regret_lower: f64,
    best_profile: Vec<f64>,
    certificates_at_half_gap: usize,
}

fn run_repro(cmd: &ReproCommand) -> Result<Output> {
    match cmd {
        ReproCommand::GrHc => {
            let rep = gr_hc_report()?;
            let mut v = json!({
                "complex": rep.complex,
                "alpha_generates": rep.alpha_generates,
                "loops_homologous": rep.loops_homologous,
            });
            for (q, h) in rep.homology.iter().enumerate() {
                v[format!("H{q}")] = serde_json::to_value(h)?;
            }
            Output::new(v)
        }
        ReproCommand::NoNashGame { resolution, tol } => {
            check_tol(*tol)?;
            for &r in resolution {
                check_resolution(r)?;
            }
            let game = counterexample_game()?;
            let mut measured = Vec::new();
            for &r in resolution {
                measured.push(nash_search_with(&game, r, *tol, SearchMethod::BranchAndBound)?);
            }
            let delta = measured.iter().map(|m| m.min_max_regret).fold(f64::INFINITY, f64::min);
            let mut rungs = Vec::new();
            for m in &measured {
                let empty = nash_search_with(&game, m.resolution, delta / 2.0, SearchMethod::BranchAndBound)?;
                rungs.push(GapRung {
                    resolution: m.resolution,
                    min_max_regret: m.min_max_regret,
                    min_max_regret_lower: m.min_max_regret_lower,
                    best_profile: m.best_profile.clone(),
                    certificates_at_half_gap: empty.certificates.len(),
                });
            }
            let relative_changes: Vec<f64> = rungs
                .windows(2)
                .map(|w| (w[1].min_max_regret - w[0].min_max_regret).abs() / w[0].min_max_regret.max(w[1].min_max_regret))
                .collect();
            let stable = delta > 0.0 && relative_changes.iter().all(|&c| c <= 0.10);
            let certificates_found = rungs.iter().any(|r| r.certificates_at_half_gap > 0);
            let finest = resolution.iter().copied().max().unwrap_or(32);
            let (separation, at) = graph_separation(2 * finest);
            let mut csv = String::from("resolution,min_max_regret,certificates_at_half_gap\n");
            for r in &rungs {
                let _ = writeln!(csv, "{},{},{}", r.resolution, r.min_max_regret, r.certificates_at_half_gap);
            }
            Ok(Output {
                report: json!({
                    "delta": delta,
                    "rungs": rungs,
                    "relative_changes": relative_changes,
                    "stable": stable,
                    "circle_gap": no_fixed_point_gap(finest),
                    "graph_separation": { "distance": separation, "at": at },
                }),
                csv: Some(csv),
                negative: !stable || certificates_found,
            })
        }
        ReproCommand::LiftObstruction { resolution, weight } => {
            let mut reports = Vec::new();
            let mut negative = false;
            for &r in resolution {
                check_resolution(r)?;
                let hc = polynomial_like_check(&Wedge::default().sample_h_c(r)?, *weight, None)?;
                let gp = polynomial_like_check(&sample_g_p(r, 1)?, *weight, None)?;
                negative |= hc.outcome.is_obstructed();
                reports.push(json!({ "resolution": r, "h_c": hc, "g_p": gp }));
            }
            Ok(Output { negative, ..Output::new(reports)? })
        }
    }
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var("HOMSEL_THREADS") {
            Ok(s) => Some(s.trim().parse().map_err(|_| Error::Schema { path: "HOMSEL_THREADS".into(), msg: format!("'{s}' is not a count") })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn provenance(cli: &Cli) -> Result<Value> {
    Ok(json!({
        "tool": "homsel",
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(&cli.command)?,
    }))
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: &Cli) -> Result<i32> {
    configure_threads(cli.threads)?;
    let out = match &cli.command {
        Command::Homology { complex, degree } => run_homology(complex, *degree)?,
        Command::SelectionTest { multifunction, eps_steps, eps } => run_selection(multifunction, eps_steps, *eps)?,
        Command::Lift { multifunction, weight, tol } => run_lift(multifunction, *weight, *tol)?,
        Command::Nash(cmd) => run_nash(cmd)?,
        Command::Repro(cmd) => run_repro(cmd)?,
        Command::Selftest { seed, cases } => {
            let rep = selftest::run(*seed, *cases);
            let negative = !rep.passed;
            Output { negative, ..Output::new(rep)? }
        }
    };
    let mut report = match out.report {
        Value::Object(map) => Value::Object(map),
        other => json!({ "result": other }),
    };
    report["provenance"] = provenance(cli)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if let (Some(p), Some(csv)) = (&cli.csv, &out.csv) {
        std::fs::write(p, csv)?;
    }
    let selftest_failed = matches!(cli.command, Command::Selftest { .. }) && out.negative;
    Ok(if selftest_failed {
        1
    } else if cli.strict && out.negative {
        2
    } else {
        0
    })
}

/// Entry point for the binary: parses arguments, runs, reports errors.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
