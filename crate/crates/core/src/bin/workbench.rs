use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use floer_workbench::ainfty_core::{
    verify_ainfty, verify_functor, verify_homotopy, AInftyCategory, AInftyFunctor, AInftyHomotopy, CategorySpec,
    FunctorSpec, HomotopySpec, ResidualReport,
};
use floer_workbench::chord_spectra::{
    action_gap, enumerate_cords_t3, enumerate_loops_t2, hamiltonian_vector_field, lipschitz_constant,
    product_cylinder_xh, Chart, CylindricalMetricModel, FlatTorusLattice, ProductCylinder,
};
use floer_workbench::maslov_grading::{rs_index, LagrangianFrame, SampledFramePath};
use floer_workbench::moduli_trees::{boundary_facets_l, boundary_facets_n, enumerate_strata, enumerate_trees, Space};
use floer_workbench::sign_engine::{verify_identity, Identity};
use floer_workbench::slit_domains::{
    build_slit_map, glue_slit_domains, gluing_residual, invert_slit_params, verify_beta_conditions, Weights,
    DEFAULT_TOL,
};
use floer_workbench::workbench::{run_suite, SuiteConfig, CONFIG_ENV};
use nalgebra::DMatrix;
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "workbench", version, about = "Verification workbench for Floer-theoretic constructions")]
struct Cli {
    /// Print the JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the tolerance of the command.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Largest arity checked.
    #[arg(long, global = true)]
    kmax: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Slit maps and the one-form beta.
    #[command(subcommand)]
    Beta(BetaCmd),
    /// Ribbon trees, strata and facets.
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Sign identities.
    #[command(subcommand)]
    Signs(SignsCmd),
    /// A-infinity relations on JSON input.
    #[command(subcommand)]
    Ainfty(AinftyCmd),
    /// Chord spectra, metric comparison and Hamiltonian fields.
    #[command(subcommand)]
    Chords(ChordsCmd),
    /// Maslov indices.
    #[command(subcommand)]
    Grading(GradingCmd),
    /// Run the configured verification suite.
    Suite {
        /// Suite configuration; defaults to the file named by WORKBENCH_CONFIG.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct DomainArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    punctures: Vec<f64>,
}

#[derive(Subcommand, Debug)]
enum BetaCmd {
    Build(DomainArgs),
    Verify {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    Invert {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        slits: Vec<f64>,
    },
    Glue {
        #[arg(long, value_delimiter = ',', required = true)]
        u_weights: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        u_punctures: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        v_weights: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        v_punctures: Vec<f64>,
        /// Input of v receiving u (1-based).
        #[arg(long)]
        index: usize,
        #[arg(long)]
        length: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpaceArg {
    M,
    N,
    L,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::M => Space::M,
            SpaceArg::N => Space::N,
            SpaceArg::L => Space::L,
        }
    }
}

#[derive(Subcommand, Debug)]
enum TreesCmd {
    Enumerate {
        #[arg(long)]
        k: usize,
        /// List strata of this space instead of bare trees.
        #[arg(long, value_enum)]
        space: Option<SpaceArg>,
    },
    Facets {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SignsCmd {
    Verify {
        /// m, f or fprime.
        #[arg(long)]
        identity: String,
        /// Largest arity d.
        #[arg(long, alias = "dmax", default_value_t = 5)]
        arity_max: usize,
        /// Degrees range over 0..=N.
        #[arg(long, default_value_t = 3, conflicts_with = "degrees")]
        deg_max: i64,
        /// Explicit degree list, overriding --deg-max.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        degrees: Option<Vec<i64>>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    M,
    F,
    H,
}

#[derive(Subcommand, Debug)]
enum AinftyCmd {
    Verify {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    T3,
    T2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChartArg {
    A,
    R,
}

#[derive(Subcommand, Debug)]
enum ChordsCmd {
    Spectrum {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, allow_negative_numbers = true)]
        cutoff: f64,
        /// Vertical period of the T3 model.
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        /// Row-major Gram matrix of the T2 model.
        #[arg(long, value_delimiter = ',', default_value = "1,0,0,1", allow_negative_numbers = true)]
        gram: Vec<f64>,
    },
    Lipschitz {
        /// Gram matrix entries, row-major.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        g1: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        g2: Vec<f64>,
    },
    Xh {
        #[arg(long, value_enum)]
        chart: ChartArg,
        /// (q1, q2, q3, p1, p2, p3).
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        point: Vec<f64>,
        /// Use the cylindrical adjustment at this depth instead of the product cylinder.
        #[arg(long)]
        depth: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        window: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
}

#[derive(Subcommand, Debug)]
enum GradingCmd {
    Rs {
        /// JSON path: {"times": [...], "frames": [[row, ...], ...]}.
        #[arg(long)]
        path: PathBuf,
        /// JSON frame: [row, ...].
        #[arg(long = "ref")]
        reference: PathBuf,
    },
}

struct Report {
    pass: bool,
    body: Value,
    summary: String,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn square(values: &[f64]) -> anyhow::Result<DMatrix<f64>> {
    let n = (values.len() as f64).sqrt().round() as usize;
    if n * n != values.len() || n == 0 {
        bail!("expected a square matrix in row-major order, got {} entries", values.len());
    }
    Ok(DMatrix::from_row_slice(n, n, values))
}

fn residual_summary(r: &ResidualReport) -> String {
    format!(
        "{:?} relation: {} tuples, {} failures, max residual {}",
        r.relation,
        r.tuples_checked,
        r.failures.len(),
        r.max_abs()
    )
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let k_max = cli.kmax.unwrap_or(3);
    match &cli.command {
        Command::Beta(cmd) => match cmd {
            BetaCmd::Build(d) => {
                let spec = build_slit_map(&Weights::new(d.weights.clone())?, &d.punctures)?;
                let summary = format!("critical points {:?}\nslit tips {:?}", spec.critical_points(), spec.slit_params());
                Ok(Report { pass: true, body: serde_json::to_value(&spec)?, summary })
            }
            BetaCmd::Verify { domain, grid } => {
                let spec = build_slit_map(&Weights::new(domain.weights.clone())?, &domain.punctures)?;
                let rep = verify_beta_conditions(&spec, *grid, cli.tol.unwrap_or(DEFAULT_TOL));
                let summary = format!(
                    "|dβ| {:.3e}  |d(β∘j)| {:.3e}  boundary {:.3e}  ends {:?}",
                    rep.max_d_beta,
                    rep.max_d_beta_j,
                    rep.max_boundary_tangential,
                    rep.end_deviations.iter().map(|e| e.deviation).collect::<Vec<_>>()
                );
                Ok(Report { pass: rep.pass, body: serde_json::to_value(&rep)?, summary })
            }
            BetaCmd::Invert { weights, slits } => {
                let w = Weights::new(weights.clone())?;
                let spec = invert_slit_params(&w, slits)?;
                let err = spec.slit_params().iter().zip(slits).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let pass = err <= cli.tol.unwrap_or(1e-8);
                let summary = format!("punctures {:?} (slit residual {err:.3e})", spec.punctures());
                Ok(Report { pass, body: json!({ "domain": spec, "slit_residual": err }), summary })
            }
            BetaCmd::Glue { u_weights, u_punctures, v_weights, v_punctures, index, length } => {
                let u = build_slit_map(&Weights::new(u_weights.clone())?, u_punctures)?;
                let v = build_slit_map(&Weights::new(v_weights.clone())?, v_punctures)?;
                let glued = glue_slit_domains(&u, &v, *index, *length)?;
                let residual = if u.k() > 1 { gluing_residual(&glued, &u, &v, *index)? } else { 0.0 };
                let summary = format!("glued punctures {:?}, residual {residual:.3e}", glued.punctures());
                Ok(Report { pass: true, body: json!({ "domain": glued, "gluing_residual": residual }), summary })
            }
        },
        Command::Trees(cmd) => match cmd {
            TreesCmd::Enumerate { k, space: None } => {
                let trees = enumerate_trees(*k)?;
                let summary = trees.iter().map(|t| t.encode()).collect::<Vec<_>>().join("\n");
                Ok(Report { pass: true, body: json!({ "k": k, "count": trees.len(), "trees": trees }), summary })
            }
            TreesCmd::Enumerate { k, space: Some(s) } => {
                let strata = enumerate_strata((*s).into(), *k)?;
                let summary = strata.iter().map(|s| format!("{}  dim {}", s.label(), s.dimension)).collect::<Vec<_>>().join("\n");
                Ok(Report { pass: true, body: json!({ "k": k, "count": strata.len(), "strata": strata }), summary })
            }
            TreesCmd::Facets { space, k } => {
                let facets = match space {
                    SpaceArg::N => boundary_facets_n(*k)?,
                    SpaceArg::L => boundary_facets_l(*k)?,
                    SpaceArg::M => bail!("facets are listed for N and L"),
                };
                let pass = facets.iter().all(|f| f.codimension() == 1);
                let summary = facets.iter().map(|f| format!("{:?}  {}", f.facet_type, f.term)).collect::<Vec<_>>().join("\n");
                Ok(Report { pass, body: json!({ "k": k, "count": facets.len(), "facets": facets }), summary })
            }
        },
        Command::Signs(SignsCmd::Verify { identity, arity_max, deg_max, degrees }) => {
            let which: Identity = identity.parse()?;
            let degrees = degrees.clone().unwrap_or_else(|| (0..=*deg_max).collect());
            let outcome = verify_identity(which, &degrees, *arity_max);
            let summary = format!("{outcome:?}");
            Ok(Report { pass: outcome.passed(), body: serde_json::to_value(&outcome)?, summary })
        }
        Command::Ainfty(AinftyCmd::Verify { kind, input }) => {
            let doc: Value = read_json(input)?;
            let category = |key: &str| -> anyhow::Result<AInftyCategory> {
                let spec: CategorySpec = serde_json::from_value(doc.get(key).cloned().unwrap_or(Value::Null))
                    .with_context(|| format!("field {key:?}"))?;
                Ok(AInftyCategory::from_spec(&spec)?)
            };
            let report = match kind {
                Kind::M => {
                    let spec: CategorySpec = serde_json::from_value(doc.clone())?;
                    verify_ainfty(&AInftyCategory::from_spec(&spec)?, k_max)?
                }
                Kind::F | Kind::H => {
                    let src = category("source")?;
                    let dst = if doc.get("target").is_some() { category("target")? } else { src.clone() };
                    let functor = |key: &str| -> anyhow::Result<AInftyFunctor> {
                        let spec: FunctorSpec = serde_json::from_value(doc.get(key).cloned().unwrap_or(Value::Null))
                            .with_context(|| format!("field {key:?}"))?;
                        Ok(AInftyFunctor::from_spec(&spec, &src, &dst)?)
                    };
                    if let Kind::F = kind {
                        verify_functor(&functor("functor")?, &src, &dst, k_max)?
                    } else {
                        let (f, g) = (functor("f")?, functor("g")?);
                        let spec: HomotopySpec =
                            serde_json::from_value(doc.get("homotopy").cloned().unwrap_or(Value::Null))
                                .context("field \"homotopy\"")?;
                        let h = AInftyHomotopy::from_spec(&spec, &f, &g, &src, &dst)?;
                        verify_homotopy(&h, &f, &g, &src, &dst, k_max)?
                    }
                }
            };
            Ok(Report { pass: report.pass, summary: residual_summary(&report), body: serde_json::to_value(&report)? })
        }
        Command::Chords(cmd) => match cmd {
            ChordsCmd::Spectrum { model, cutoff, h, gram } => {
                let spectrum = match model {
                    Model::T3 => enumerate_cords_t3(*h, *cutoff)?,
                    Model::T2 => {
                        let g = square(gram)?;
                        let rows: Vec<Vec<f64>> = g.row_iter().map(|r| r.iter().copied().collect()).collect();
                        enumerate_loops_t2(&FlatTorusLattice::new(&rows)?, *cutoff)?
                    }
                };
                let gap = action_gap(&spectrum).ok();
                let mut summary: Vec<String> =
                    spectrum.classes.iter().map(|c| format!("{:?}  action {}", c.datum, c.action)).collect();
                summary.push(match gap {
                    Some(g) => format!("gap {g}"),
                    None => "gap undefined".into(),
                });
                Ok(Report { pass: true, body: json!({ "spectrum": spectrum, "gap": gap }), summary: summary.join("\n") })
            }
            ChordsCmd::Lipschitz { g1, g2 } => {
                let c = lipschitz_constant(&square(g1)?, &square(g2)?)?;
                Ok(Report { pass: true, body: json!({ "lipschitz": c }), summary: format!("C = {c}") })
            }
            ChordsCmd::Xh { chart, point, depth, window, scale } => {
                let pt: [f64; 6] = point.as_slice().try_into().context("a phase point has six coordinates")?;
                let chart = match chart {
                    ChartArg::A => Chart::A,
                    ChartArg::R => Chart::R,
                };
                let (x, closed) = match depth {
                    Some(d) => {
                        let m = CylindricalMetricModel::new(*d, *window, *scale)?;
                        (hamiltonian_vector_field(&m, chart, pt)?, None)
                    }
                    None => (hamiltonian_vector_field(&ProductCylinder, chart, pt)?, Some(product_cylinder_xh(chart, pt)?)),
                };
                let err = closed.map(|c| c.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
                let pass = err.is_none_or(|e| e <= cli.tol.unwrap_or(1e-10));
                let summary = format!("X_H = {x:?}{}", err.map(|e| format!("  (closed form error {e:.3e})")).unwrap_or_default());
                Ok(Report { pass, body: json!({ "xh": x, "closed_form": closed, "error": err }), summary })
            }
        },
        Command::Grading(GradingCmd::Rs { path, reference }) => {
            let p: SampledFramePath = read_json(path)?;
            let r: LagrangianFrame = read_json(reference)?;
            let idx = rs_index(&p, &r)?;
            let summary = format!("index {} ({} crossings)", idx.index, idx.crossings.len());
            Ok(Report { pass: true, body: serde_json::to_value(&idx)?, summary })
        }
        Command::Suite { config } => {
            let path = config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
            let mut cfg = match path {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    SuiteConfig::from_json(&text)?
                }
                None => SuiteConfig::default(),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(k) = cli.kmax {
                cfg.k_max = k;
            }
            let report = run_suite(&cfg, std::env::args().collect());
            let summary = report
                .checks
                .iter()
                .map(|c| format!("{:<11} {:?}  {:.0} ms", c.name.as_str(), c.status, c.elapsed_ms))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report { pass: report.pass, body: serde_json::to_value(&report)?, summary })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&report.body).expect("report serializes");
    if let Some(out) = &cli.out {
        if let Err(e) = std::fs::write(out, &text) {
            eprintln!("error: writing {}: {e}", out.display());
            return ExitCode::from(2);
        }
    }
    if cli.json {
        println!("{text}");
    } else {
        println!("{}", report.summary);
        println!("{}", if report.pass { "PASS" } else { "FAIL" });
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
