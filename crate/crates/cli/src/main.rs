use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use mixang::exchange::{
    build, export_dot, export_json, rotation_quotient, BuildOptions, PolygonFlips, TorusFlips,
};
use mixang::qp::{ginzburg, mures_check, mutate, restrict, Qp, Vertex};
use mixang::quotient::quotient_graph;
use mixang::seeds::{apply_step, duality_check, init_seed, parse_script, Seed};
use mixang::surface::{collapse, enumerate_dissections, rank, validate_wdms, CollapseDatum, Wdms};
use mixang::torus::{flip, invariant, normal_form, Bubble, TorusFlip, TorusState};

#[derive(Parser)]
#[command(
    name = "mixang",
    version,
    about = "Quivers with potential, mixed-angulations and their exchange graphs"
)]
struct Cli {
    /// Worker threads for graph builds.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on quivers with potential.
    #[command(subcommand)]
    Qp(QpCommand),
    /// Weighted decorated marked surfaces.
    #[command(subcommand)]
    Surface(SurfaceCommand),
    /// Exchange graphs.
    #[command(subcommand)]
    Eg(EgCommand),
    /// Heart and silting seeds.
    #[command(subcommand)]
    Seed(SeedCommand),
    /// Quotient hearts.
    #[command(subcommand)]
    Quotient(QuotientCommand),
}

#[derive(Subcommand)]
enum QpCommand {
    /// Mutate at a vertex.
    Mutate {
        #[arg(long)]
        qp: String,
        #[arg(long)]
        vertex: Vertex,
    },
    /// Full sub-QP on a vertex subset.
    Restrict {
        #[arg(long)]
        qp: String,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<Vertex>,
    },
    /// Ginzburg graded quiver and differential.
    Ginzburg {
        #[arg(long)]
        qp: String,
    },
    /// Compare restricting after mutating with mutating after restricting.
    Mures {
        #[arg(long)]
        qp: String,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<Vertex>,
        #[arg(long)]
        vertex: Vertex,
    },
}

#[derive(Subcommand)]
enum SurfaceCommand {
    /// Check the compatibility equation.
    Validate {
        #[arg(long)]
        wdms: String,
    },
    /// Number of arcs in a triangulation.
    Rank {
        #[arg(long)]
        wdms: String,
    },
    /// Collapse subsurfaces to weighted decorations.
    Collapse {
        #[arg(long)]
        wdms: String,
        #[arg(long)]
        datum: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum EgCommand {
    /// Flip graph of dissections of an m-gon with the given cell weights.
    Polygon {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<usize>,
        /// Identify dissections related by rotation.
        #[arg(long)]
        quotient_rotation: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Flip matrices of the torus with one boundary component.
    Torus(TorusArgs),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["walk", "invariant", "bfs_depth"])))]
struct TorusArgs {
    /// Rows h and v as h1,h2,v1,v2.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    start: Vec<i64>,
    #[arg(long, default_value = "BL")]
    bubble: String,
    /// Random walk length.
    #[arg(long, requires = "seed")]
    walk: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    invariant: bool,
    #[arg(long)]
    bfs_depth: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum SeedCommand {
    /// Apply a tilt script to the initial seed of a QP.
    Walk {
        #[arg(long)]
        qp: String,
        /// Steps such as "1+,2-".
        #[arg(long, allow_hyphen_values = true)]
        script: String,
        /// Check G^T C = 1 after every step.
        #[arg(long)]
        check_duality: bool,
    },
}

#[derive(Subcommand)]
enum QuotientCommand {
    /// Quotient-heart graph of a polygon system.
    Graph {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<usize>,
        /// Print only the comparison with the flip graph.
        #[arg(long)]
        report: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, e: impl ToString) -> Self {
        Failure {
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<String, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::new("io", e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{path}: {e}")))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Failure> {
    serde_json::from_str(&read_input(path)?)
        .map_err(|e| Failure::new("parse", format!("{path}: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn run_qp(cmd: QpCommand) -> CliResult {
    let qp_err = |e| Failure::new("qp", e);
    match cmd {
        QpCommand::Mutate { qp, vertex } => {
            let qp: Qp = read_json(&qp)?;
            Ok(to_json(&mutate(&qp, vertex).map_err(qp_err)?))
        }
        QpCommand::Restrict { qp, keep } => {
            let qp: Qp = read_json(&qp)?;
            Ok(to_json(
                &restrict(&qp, &keep.into_iter().collect()).map_err(qp_err)?,
            ))
        }
        QpCommand::Ginzburg { qp } => {
            let qp: Qp = read_json(&qp)?;
            let g = ginzburg(&qp);
            let differential: serde_json::Map<String, Value> = g
                .differential
                .iter()
                .map(|(gen, d)| {
                    let terms: Vec<Value> = d
                        .iter()
                        .map(|(path, coef)| json!({"coef": coef, "path": path}))
                        .collect();
                    (gen.to_string(), Value::Array(terms))
                })
                .collect();
            Ok(to_json(
                &json!({"arrows": g.arrows, "differential": differential}),
            ))
        }
        QpCommand::Mures { qp, keep, vertex } => {
            let qp: Qp = read_json(&qp)?;
            let keep: BTreeSet<Vertex> = keep.into_iter().collect();
            Ok(to_json(&mures_check(&qp, &keep, vertex).map_err(qp_err)?))
        }
    }
}

fn run_surface(cmd: SurfaceCommand) -> CliResult {
    let surface_err = |e| Failure::new("surface", e);
    match cmd {
        SurfaceCommand::Validate { wdms } => {
            let s: Wdms = read_json(&wdms)?;
            validate_wdms(&s).map_err(surface_err)?;
            Ok(to_json(&json!({"valid": true, "rank": rank(&s)})))
        }
        SurfaceCommand::Rank { wdms } => {
            let s: Wdms = read_json(&wdms)?;
            validate_wdms(&s).map_err(surface_err)?;
            Ok(rank(&s).to_string())
        }
        SurfaceCommand::Collapse { wdms, datum } => {
            let s: Wdms = read_json(&wdms)?;
            let d: CollapseDatum = read_json(&datum)?;
            Ok(to_json(&collapse(&s, &d).map_err(surface_err)?))
        }
    }
}

fn run_eg(cmd: EgCommand, jobs: usize) -> CliResult {
    let opts = BuildOptions {
        jobs,
        ..BuildOptions::default()
    };
    match cmd {
        EgCommand::Polygon {
            m,
            weights,
            quotient_rotation,
            format,
        } => {
            let start = enumerate_dissections(m, &weights)
                .map_err(|e| Failure::new("surface", e))?
                .into_iter()
                .next()
                .ok_or_else(|| Failure::new("surface", "no dissection has these weights"))?;
            let mut g = build(&PolygonFlips::forward(), start, opts)
                .map_err(|e| Failure::new("exchange", e))?;
            if quotient_rotation {
                g = rotation_quotient(&g).graph;
            }
            Ok(match format {
                Format::Json => export_json(&g),
                Format::Dot => export_dot(&g, |d| {
                    format!(
                        "{:?}",
                        d.diagonal_list()
                            .iter()
                            .map(|c| c.ends())
                            .collect::<Vec<_>>()
                    )
                }),
            })
        }
        EgCommand::Torus(args) => run_torus(args, opts),
    }
}

fn run_torus(args: TorusArgs, opts: BuildOptions) -> CliResult {
    let torus_err = |e| Failure::new("torus", e);
    let bubble: Bubble = args.bubble.parse().map_err(torus_err)?;
    let [h1, h2, v1, v2] = args.start[..] else {
        return Err(Failure::new("usage", "--start takes four integers"));
    };
    let start = normal_form(&TorusState::new([h1, h2], [v1, v2], bubble)).map_err(torus_err)?;
    if args.invariant {
        let (a, b) = invariant(&start);
        return Ok(format!("{a},{b}"));
    }
    if let Some(steps) = args.walk {
        let seed = args.seed.expect("clap requires --seed with --walk");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inv = invariant(&start);
        let mut cur = start.clone();
        let mut violations = 0usize;
        let mut flips = Vec::with_capacity(steps);
        for _ in 0..steps {
            let f = TorusFlip::ALL[rng.gen_range(0..TorusFlip::ALL.len())];
            cur = flip(&cur, f).map_err(torus_err)?;
            flips.push(f.name());
            if invariant(&cur) != inv {
                violations += 1;
            }
        }
        return Ok(to_json(&json!({
            "start": start,
            "invariant": [inv.0, inv.1],
            "seed": seed,
            "flips": flips,
            "end": cur,
            "violations": violations,
        })));
    }
    let depth = args.bfs_depth.expect("clap requires one mode");
    let g = build(
        &TorusFlips,
        start,
        BuildOptions {
            max_depth: Some(depth),
            ..opts
        },
    )
    .map_err(|e| Failure::new("exchange", e))?;
    Ok(match args.format {
        Format::Json => export_json(&g),
        Format::Dot => export_dot(&g, |s| s.to_string()),
    })
}

fn run_seed(cmd: SeedCommand) -> CliResult {
    let SeedCommand::Walk {
        qp,
        script,
        check_duality,
    } = cmd;
    let seed_err = |e| Failure::new("seed", e);
    let qp: Qp = read_json(&qp)?;
    let steps = parse_script(&script).map_err(seed_err)?;
    let mut s: Seed = init_seed(qp);
    for (i, &step) in steps.iter().enumerate() {
        s = apply_step(&s, step).map_err(seed_err)?;
        if check_duality && !duality_check(&s) {
            return Err(Failure::new(
                "seed",
                format!(
                    "G^T C differs from the identity after step {} ({step})",
                    i + 1
                ),
            ));
        }
    }
    Ok(to_json(&s))
}

fn run_quotient(cmd: QuotientCommand, jobs: usize) -> CliResult {
    let QuotientCommand::Graph {
        m,
        weights,
        report,
        format,
    } = cmd;
    let opts = BuildOptions {
        jobs,
        ..BuildOptions::default()
    };
    let g = quotient_graph(m, &weights, opts).map_err(|e| Failure::new("quotient", e))?;
    if report {
        return Ok(to_json(&g.report));
    }
    Ok(match format {
        Format::Json => export_json(&g.quotient),
        Format::Dot => export_dot(&g.quotient, |s| {
            format!("{:?}", s.arcs.iter().map(|c| c.ends()).collect::<Vec<_>>())
        }),
    })
}

fn run(cli: Cli) -> CliResult {
    if cli.jobs == 0 {
        return Err(Failure::new("usage", "--jobs must be at least 1"));
    }
    match cli.command {
        Command::Qp(c) => run_qp(c),
        Command::Surface(c) => run_surface(c),
        Command::Eg(c) => run_eg(c, cli.jobs),
        Command::Seed(c) => run_seed(c),
        Command::Quotient(c) => run_quotient(c, cli.jobs),
    }
}

fn report_failure(f: &Failure) {
    eprintln!(
        "{}",
        json!({"error": {"kind": f.kind, "message": f.message}})
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_failure(&Failure::new("usage", e.to_string().trim_end()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(out) => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(io::stdout().lock(), "{}", out.trim_end());
            ExitCode::SUCCESS
        }
        Err(f) => {
            report_failure(&f);
            ExitCode::from(if f.kind == "usage" { 2 } else { 1 })
        }
    }
}
