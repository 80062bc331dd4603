mod error;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use error::CliError;
use unigame_core::ensemble::EnsembleDoc;
use unigame_core::game::{BuiltinModel, ModelConfig};
use unigame_core::reduction::fmt_num;
use unigame_core::solvers::{
    check_source, green_apply, minimize_potential, solve_linear_poisson, solve_nonlinear_poisson, spectral_radius,
    verify_nash, write_trace_csv, SpectralTarget,
};
use unigame_core::{
    check_mtp, load_graph, partition_classes, thermo_run, uniform_root_ensemble, write_thermo_csv, ActionRule,
    BoxConstraint, ClassPartition, ClassRadius, FamilySpec, Graph, Profile, RootedEnsemble, SolveOptions, Source,
};

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "unigame", version, about = "Potential games on graphs and their limits")]
struct Cli {
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance; each command documents its default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (all cores if omitted).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition vertices into rooted-isomorphism classes.
    Classes {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "exact")]
        radius: Option<usize>,
        /// Compare whole components (the default).
        #[arg(long)]
        exact: bool,
    },
    /// Potential of an action rule under a graph's uniform root or an ensemble.
    Potential {
        #[arg(long, required_unless_present = "ensemble", conflicts_with = "ensemble")]
        graph: Option<PathBuf>,
        #[arg(long)]
        ensemble: Option<PathBuf>,
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Minimize the potential, then verify the result is a Nash equilibrium.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, value_enum)]
        partition: Option<PartitionArg>,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-8)]
        grad_tol: f64,
        /// Write the descent trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the Nash report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Best-response gaps of a profile (tolerance defaults to 1e-6).
    VerifyNash {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Solve the Poisson equation of an LQ or power model (tolerance 1e-10).
    Poisson {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
    },
    /// Partial Green series of a radial source on a regular tree.
    Green {
        #[arg(long)]
        degree: usize,
        /// Poisson source by distance from the root; divided by the degree.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "xi", required_unless_present = "xi")]
        eta: Option<Vec<f64>>,
        /// Walk source by distance from the root.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Option<Vec<f64>>,
        #[arg(long)]
        terms: usize,
        /// Tree depth (defaults to the smallest admissible one).
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Return-probability estimates of the walk's spectral radius.
    Rho {
        #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
        tree: Option<usize>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long)]
        n_max: usize,
    },
    /// Potentials along a graph family against the limit graph.
    Thermo {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Record wall-clock times (makes the output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Check the mass-transport principle (tolerance 1e-12).
    MtpCheck {
        #[arg(long, required_unless_present = "ensemble", conflicts_with = "ensemble")]
        graph: Option<PathBuf>,
        #[arg(long)]
        ensemble: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Transport::Random)]
        transport: Transport,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(clap::Args)]
struct Bounds {
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
}

impl Bounds {
    fn constraint(&self) -> Result<BoxConstraint> {
        Ok(BoxConstraint::interval(
            1,
            self.lo.unwrap_or(f64::NEG_INFINITY),
            self.hi.unwrap_or(f64::INFINITY),
        )?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionArg {
    Exact,
    Discrete,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transport {
    /// One unit along every edge.
    Adjacency,
    /// One unit from each vertex to each neighbour of smaller degree.
    DegreeGap,
    /// Random tables keyed by both degrees and the distance.
    Random,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn read_graph(path: &Path) -> Result<Graph> {
    Ok(load_graph(&read(path)?)?)
}

fn read_model(path: &Path) -> Result<BuiltinModel> {
    Ok(ModelConfig::from_json(&read(path)?)?.build()?)
}

fn read_rule(path: &Path) -> Result<ActionRule> {
    Ok(ActionRule::from_json(&read(path)?)?)
}

fn read_ensemble(path: &Path) -> Result<RootedEnsemble> {
    let doc: EnsembleDoc = serde_json::from_str(&read(path)?)?;
    Ok(doc.load(path.parent().unwrap_or(Path::new(".")))?)
}

fn uniform(g: &Graph) -> Result<RootedEnsemble> {
    let (e, warning) = uniform_root_ensemble(g)?;
    if let Some(w) = warning {
        log::warn!("graph has {} components; roots see only their own component", w.components);
    }
    Ok(e)
}

fn positive(tol: Option<f64>, default: f64) -> Result<f64> {
    let t = tol.unwrap_or(default);
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(CliError::Usage(format!("tolerance must be positive, got {t}")))
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut out = output(&cli.out)?;
    match &cli.cmd {
        Command::Classes { graph, radius, .. } => {
            let g = read_graph(graph)?;
            let r = radius.map_or(ClassRadius::Exact, ClassRadius::Fixed);
            let p = partition_classes(&g, r)?;
            let codes: Vec<String> = p.codes().iter().map(|c| c.to_hex()).collect();
            write_json(
                &mut out,
                &json!({
                    "class_count": p.class_count(),
                    "sizes": p.sizes(),
                    "codes": codes,
                    "radius_used": p.radius_used(),
                    "exact": p.is_exact(),
                    "class_of": p.classes(),
                }),
            )?;
        }
        Command::Potential {
            graph,
            ensemble,
            rule,
            model,
        } => {
            let e = match (graph, ensemble) {
                (Some(g), _) => uniform(&read_graph(g)?)?,
                (None, Some(e)) => read_ensemble(e)?,
                (None, None) => unreachable!("clap requires one input"),
            };
            let (phi, unseen) = unigame_core::game::potential_detailed(&e, &read_rule(rule)?, &read_model(model)?)?;
            if unseen > 0 {
                log::warn!("{unseen} rule lookups fell back to the default");
            }
            write_json(&mut out, &json!({ "phi": fmt_num(phi).parse::<f64>().unwrap_or(phi), "unseen": unseen }))?;
        }
        Command::Solve {
            graph,
            model,
            bounds,
            partition,
            max_iters,
            grad_tol,
            trace,
            report,
        } => {
            let g = read_graph(graph)?;
            let m = read_model(model)?;
            let k = bounds.constraint()?;
            if k.is_unbounded() {
                // Without bounds the potential is bounded below only for balanced sources.
                check_source(&g, &m.source_values(&g)?, positive(cli.tol, 1e-8)?)?;
            }
            let per_vertex = matches!(m.source(), Source::PerVertex(_));
            let part = match partition.unwrap_or(if per_vertex { PartitionArg::Discrete } else { PartitionArg::Exact }) {
                PartitionArg::Discrete => ClassPartition::discrete(g.n()),
                PartitionArg::Exact => partition_classes(&g, ClassRadius::Exact)?,
            };
            let opts = SolveOptions {
                max_iters: *max_iters,
                grad_tol: *grad_tol,
                seed: cli.seed,
                ..Default::default()
            };
            let res = minimize_potential(&g, &part, &m, &k, &opts)?;
            if let Some(p) = trace {
                write_trace_csv(&res.trace, BufWriter::new(File::create(p)?))?;
            }
            if !res.converged {
                let last = res.trace.last().map_or(f64::NAN, |r| r.grad_norm);
                return Err(unigame_core::Error::NoConvergence {
                    iters: *max_iters,
                    residual: last,
                }
                .into());
            }
            res.profile.write_csv(&mut out)?;
            let nash = verify_nash(&g, &res.profile, &m, &k, positive(cli.tol, 10.0 * grad_tol)?)?;
            if let Some(p) = report {
                write_json(&mut BufWriter::new(File::create(p)?), &nash)?;
            }
            eprintln!(
                "classes {} iterations {} max gap {} ({})",
                part.class_count(),
                res.trace.len() - 1,
                fmt_num(nash.max_gap),
                if nash.pass { "pass" } else { "fail" }
            );
            if !nash.pass {
                out.flush()?;
                return Err(CliError::Verification(format!(
                    "vertex {} can gain {} by deviating",
                    nash.argmax,
                    fmt_num(nash.max_gap)
                )));
            }
        }
        Command::VerifyNash {
            graph,
            model,
            profile,
            bounds,
        } => {
            let g = read_graph(graph)?;
            let prof = Profile::read_csv(read(profile)?.as_bytes())?;
            let report = verify_nash(&g, &prof, &read_model(model)?, &bounds.constraint()?, positive(cli.tol, 1e-6)?)?;
            write_json(&mut out, &report)?;
            if !report.pass {
                out.flush()?;
                return Err(CliError::Verification(format!(
                    "vertex {} can gain {} by deviating",
                    report.argmax,
                    fmt_num(report.max_gap)
                )));
            }
        }
        Command::Poisson { graph, model, max_iters } => {
            let g = read_graph(graph)?;
            let m = read_model(model)?;
            let tol = positive(cli.tol, 1e-10)?;
            let x = match &m {
                BuiltinModel::Lq(_) => solve_linear_poisson(&g, &m.source_values(&g)?, tol)?,
                BuiltinModel::W(w) => {
                    let opts = SolveOptions {
                        max_iters: *max_iters,
                        seed: cli.seed,
                        ..Default::default()
                    };
                    solve_nonlinear_poisson(&g, w, tol, &opts)?
                }
            };
            x.write_csv(&mut out)?;
        }
        Command::Green {
            degree,
            eta,
            xi,
            terms,
            radius,
        } => {
            let xi: Vec<f64> = match (eta, xi) {
                (Some(e), _) => e.iter().map(|v| v / *degree as f64).collect(),
                (None, Some(x)) => x.clone(),
                (None, None) => unreachable!("clap requires one source"),
            };
            let support = xi.iter().rposition(|&x| x != 0.0).unwrap_or(0);
            let s = green_apply(*degree, &xi, radius.unwrap_or(terms + support + 1), *terms)?;
            write_json(&mut out, &s)?;
        }
        Command::Rho {
            tree,
            graph,
            root,
            n_max,
        } => {
            let g;
            let target = match (tree, graph) {
                (Some(d), _) => SpectralTarget::RegularTree(*d),
                (None, Some(p)) => {
                    g = read_graph(p)?;
                    SpectralTarget::Graph { graph: &g, root: *root }
                }
                (None, None) => unreachable!("clap requires one target"),
            };
            let rho = spectral_radius(target, *n_max)?;
            if rho.windows(2).any(|w| w[1] < w[0] - 1e-12) {
                log::warn!("estimates are not monotone; results are unreliable");
            }
            writeln!(out, "n,rho")?;
            for (i, r) in rho.iter().enumerate() {
                writeln!(out, "{},{}", i + 1, fmt_num(*r))?;
            }
        }
        Command::Thermo {
            family,
            rule,
            model,
            timing,
        } => {
            let spec = FamilySpec::from_json(&read(family)?)?;
            let rows = thermo_run(&spec, &read_rule(rule)?, &read_model(model)?, *timing)?;
            for r in rows.iter().filter(|r| r.unseen > 0) {
                log::warn!("n = {}: {} vertices use the rule's default", r.n, r.unseen);
            }
            write_thermo_csv(&rows, &mut out)?;
        }
        Command::MtpCheck {
            graph,
            ensemble,
            transport,
            trials,
        } => {
            let e = match (graph, ensemble) {
                (Some(g), _) => uniform(&read_graph(g)?)?,
                (None, Some(e)) => read_ensemble(e)?,
                (None, None) => unreachable!("clap requires one input"),
            };
            let tol = positive(cli.tol, 1e-12)?;
            let mut reports = Vec::new();
            match transport {
                Transport::Adjacency => {
                    reports.push(check_mtp(&e, |g, o, v| f64::from(u8::from(g.has_edge(o, v))))?);
                }
                Transport::DegreeGap => {
                    reports.push(check_mtp(&e, |g, o, v| {
                        f64::from(u8::from(g.has_edge(o, v) && g.degree(o) > g.degree(v)))
                    })?);
                }
                Transport::Random => {
                    let bound = e
                        .atoms()
                        .map(|a| a.iter().map(|x| x.graph.degree_bound()).max().unwrap_or(0))
                        .unwrap_or(0)
                        + 1;
                    const DIST: usize = 16;
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    for _ in 0..*trials {
                        let table: Vec<f64> = (0..bound * bound * DIST).map(|_| rng.gen_range(0.0..1.0)).collect();
                        reports.push(check_mtp(&e, |g, o, v| {
                            let d = g.distances_from(o)[v].min(DIST - 1);
                            table[(g.degree(o) * bound + g.degree(v)) * DIST + d]
                        })?);
                    }
                }
            }
            let worst = reports.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
            let pass = worst <= tol;
            write_json(
                &mut out,
                &json!({ "trials": reports.len(), "max_abs_diff": worst, "tol": tol, "pass": pass, "reports": reports }),
            )?;
            if !pass {
                out.flush()?;
                return Err(CliError::Verification(format!("transport imbalance {worst:e}")));
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
