//! Batch front-end: ingest spaces and point clouds, build relaxed
//! filtrations, emit diagrams and plots, and run comparison and stability
//! audits.
//!
//! Exit codes: 0 on success, 2 on usage or input errors, 3 when a
//! numerical certification fails (audit and certified-compare paths).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use thickening::io;
use thickening::{
    bottleneck, build_classical_complex, build_complex, compute_diagram, edge_death_scale,
    euclidean_metric, gh_upper_bound, sample_sphere, single_linkage_h0, wasserstein, zn_diagram,
    BuildKind, ClassicalKind, Embedding, Fidelity, FilteredComplex, FiniteMetricSpace, Measure,
    PValue, PersistenceDiagram, SampleMode,
};

mod util;
use util::{fail, read_input, write_output, AppError};

#[derive(Parser)]
#[command(
    name = "thickening",
    about = "Persistent homology of relaxed p-Vietoris-Rips and p-Cech metric thickenings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a filtration from a space or cloud and emit its persistence diagram.
    Diagram(DiagramArgs),
    /// Bottleneck-compare the diagrams of two inputs, optionally certifying
    /// the Gromov-Hausdorff stability bound from a correspondence file.
    Compare(CompareArgs),
    /// Emit independent ground-truth diagrams.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Sample a sphere, compute its 2-Cech diagram, and certify the
    /// dominant interval against the sqrt(2) endpoint.
    AuditSphere(AuditSphereArgs),
    /// Exact q-Wasserstein distance between two measure files, with the
    /// optimal plan as JSON.
    Transport(TransportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Vr,
    Cech,
    AmbientCech,
    /// Classical Vietoris-Rips complex (same as --kind vr --p inf).
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
struct DiagramArgs {
    /// Distance-matrix CSV.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Point-cloud CSV (one point per row); distances are Euclidean.
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// Ambient distance-matrix CSV for --kind ambient-cech; the --space
    /// matrix must match its first rows.
    #[arg(long)]
    ambient: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cech")]
    kind: KindArg,
    /// Exponent in [1, inf]; pass "inf" for the classical complexes.
    #[arg(long, default_value = "2")]
    p: String,
    /// Largest simplex dimension to include; defaults to min(2, n - 1).
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
    /// Output path; stdout when omitted. Files are written atomically.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the filtered complex as JSON lines ({"simplex": [...],
    /// "value": ...} per simplex) to this path.
    #[arg(long)]
    emit_complex: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Distance-matrix CSV; pass twice to compare two spaces.
    #[arg(long)]
    space: Vec<PathBuf>,
    /// Point-cloud CSV; may replace either space input.
    #[arg(long)]
    cloud: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "cech")]
    kind: KindArg,
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long)]
    max_dim: Option<usize>,
    /// Homology degree compared.
    #[arg(long)]
    degree: usize,
    /// Correspondence CSV (columns phi, psi); enables the certified check
    /// bottleneck <= 2 * gh_upper_bound.
    #[arg(long)]
    corr: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Closed-form diagram of n + 1 points at mutual distance one.
    Zn(ZnArgs),
    /// Degree-zero diagram from single-linkage merge heights.
    SingleLinkage(SingleLinkageArgs),
}

#[derive(Args)]
struct ZnArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SingleLinkageArgs {
    #[arg(long)]
    space: PathBuf,
    /// Merge-height scale: a number, or "auto" to derive the edge-death
    /// factor for the given p by direct optimization.
    #[arg(long, default_value = "auto")]
    scale: String,
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AuditSphereArgs {
    /// Sphere dimension (1 = circle; the certified path).
    #[arg(long, default_value_t = 1)]
    n_dim: usize,
    /// Sample count.
    #[arg(long)]
    count: usize,
    /// Exponent; certification requires 2.
    #[arg(long, default_value = "2")]
    p: String,
    /// Homology degree audited; defaults to the sphere dimension.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    max_dim: Option<usize>,
    /// grid (deterministic lattice) or uniform (seeded).
    #[arg(long, default_value = "grid")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TransportArgs {
    /// Distance-matrix CSV of the common ground space.
    #[arg(long)]
    space: PathBuf,
    /// Measure file (CSV row of weights or {"weights": [...]}) for the source.
    #[arg(long)]
    alpha: PathBuf,
    /// Measure file for the target.
    #[arg(long)]
    beta: PathBuf,
    /// Wasserstein exponent in [1, inf].
    #[arg(long, default_value = "2")]
    q: String,
    /// Also emit the optimal plan as JSON to this path (or stdout with "-").
    #[arg(long)]
    plan: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("THICKENING_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Diagram(args) => cmd_diagram(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Oracle(OracleCommand::Zn(args)) => cmd_oracle_zn(args),
        Command::Oracle(OracleCommand::SingleLinkage(args)) => cmd_oracle_single_linkage(args),
        Command::AuditSphere(args) => cmd_audit_sphere(args),
        Command::Transport(args) => cmd_transport(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn parse_p(text: &str) -> Result<PValue, AppError> {
    PValue::parse(text).map_err(|e| fail(2, e.to_string()))
}

fn load_space(
    space: Option<&Path>,
    cloud: Option<&Path>,
) -> Result<Arc<FiniteMetricSpace>, AppError> {
    match (space, cloud) {
        (Some(path), None) => {
            let text = read_input(path)?;
            io::parse_distance_matrix(&text).map_err(|e| fail(2, e.to_string()))
        }
        (None, Some(path)) => {
            let text = read_input(path)?;
            let pc = io::parse_point_cloud(&text).map_err(|e| fail(2, e.to_string()))?;
            euclidean_metric(&pc).map_err(|e| fail(2, e.to_string()))
        }
        _ => Err(fail(2, "exactly one of --space or --cloud is required")),
    }
}

fn default_max_dim(n: usize) -> usize {
    2.min(n.saturating_sub(1))
}

fn build_for_cli(
    space: &Arc<FiniteMetricSpace>,
    kind: KindArg,
    p: PValue,
    max_dim: usize,
    ambient: Option<&Path>,
) -> Result<FilteredComplex, AppError> {
    let fc = match kind {
        KindArg::Vr => build_complex(space, p, &BuildKind::VietorisRips, max_dim),
        KindArg::Cech => build_complex(space, p, &BuildKind::Cech, max_dim),
        KindArg::AmbientCech => {
            let path = ambient
                .ok_or_else(|| fail(2, "--kind ambient-cech requires --ambient"))?;
            let text = read_input(path)?;
            let ambient_space =
                io::parse_distance_matrix(&text).map_err(|e| fail(2, e.to_string()))?;
            let emb = Embedding::prefix(space.clone(), ambient_space)
                .map_err(|e| fail(2, e.to_string()))?;
            build_complex(space, p, &BuildKind::AmbientCech(emb), max_dim)
        }
        KindArg::Classical => build_classical_complex(space, ClassicalKind::VrInf, max_dim),
    }
    .map_err(|e| fail(2, e.to_string()))?;
    if fc.fidelity() == Fidelity::Conjectural {
        eprintln!(
            "note: skeleton filtration for vr at finite p; homotopy-type \
             faithfulness is conjectural beyond degree 0 and the \
             uniform-distance family"
        );
    }
    Ok(fc)
}

fn emit_diagram(
    diagram: &PersistenceDiagram,
    out: OutFormat,
    output: Option<&Path>,
) -> Result<(), AppError> {
    let content = match out {
        OutFormat::Json => io::diagram_to_json(diagram),
        OutFormat::Csv => io::diagram_to_csv(diagram),
        OutFormat::Svg => io::diagram_to_svg(diagram),
    };
    write_output(output, &content)
}

fn cmd_diagram(args: DiagramArgs) -> Result<(), AppError> {
    let space = load_space(args.space.as_deref(), args.cloud.as_deref())?;
    let p = parse_p(&args.p)?;
    let max_dim = args.max_dim.unwrap_or_else(|| default_max_dim(space.len()));
    let fc = build_for_cli(&space, args.kind, p, max_dim, args.ambient.as_deref())?;
    if let Some(path) = &args.emit_complex {
        write_output(Some(path), &io::complex_to_jsonl(&fc))?;
    }
    let diagram = compute_diagram(&fc).map_err(|e| fail(2, e.to_string()))?;
    emit_diagram(&diagram, args.out, args.output.as_deref())
}

fn cmd_compare(args: CompareArgs) -> Result<(), AppError> {
    let mut inputs: Vec<Arc<FiniteMetricSpace>> = Vec::new();
    for path in &args.space {
        inputs.push(load_space(Some(path), None)?);
    }
    for path in &args.cloud {
        inputs.push(load_space(None, Some(path))?);
    }
    if inputs.len() != 2 {
        return Err(fail(2, "compare needs exactly two inputs (--space/--cloud twice)"));
    }
    let p = parse_p(&args.p)?;
    let (a, b) = (&inputs[0], &inputs[1]);
    let needed = args.degree + 1;
    let max_dim = args
        .max_dim
        .unwrap_or_else(|| needed.min(a.len() - 1).min(b.len() - 1));

    let mut diagrams = Vec::new();
    for space in [a, b] {
        let fc = build_for_cli(space, args.kind, p, max_dim.min(space.len() - 1), None)?;
        diagrams.push(compute_diagram(&fc).map_err(|e| fail(2, e.to_string()))?);
    }
    let (value, matching) = bottleneck(&diagrams[0], &diagrams[1], args.degree);
    println!("bottleneck degree={} value={}", args.degree, io::fmt_sig(value));
    println!(
        "matching: {} pairs, {} + {} unmatched",
        matching.pairs.len(),
        matching.unmatched_left.len(),
        matching.unmatched_right.len()
    );

    if let Some(corr_path) = &args.corr {
        let text = read_input(corr_path)?;
        let corr = io::parse_correspondence(&text).map_err(|e| fail(2, e.to_string()))?;
        let gh = gh_upper_bound(a, b, &corr).map_err(|e| fail(2, e.to_string()))?;
        let bound = 2.0 * gh;
        println!("gh_upper_bound={}", io::fmt_sig(gh));
        println!("stability bound 2*gh={}", io::fmt_sig(bound));
        if value <= bound + 1e-9 {
            println!("certified: bottleneck <= 2*gh_upper_bound PASS");
        } else {
            println!("certified: bottleneck <= 2*gh_upper_bound FAIL");
            return Err(fail(
                3,
                format!(
                    "certification failed: bottleneck {} exceeds bound {}",
                    io::fmt_sig(value),
                    io::fmt_sig(bound)
                ),
            ));
        }
    }
    Ok(())
}

fn cmd_oracle_zn(args: ZnArgs) -> Result<(), AppError> {
    if args.n < 1 {
        return Err(fail(2, "oracle zn requires --n >= 1"));
    }
    let p = parse_p(&args.p)?;
    let closed = zn_diagram(args.n, p);
    emit_diagram(&closed.diagram, args.out, args.output.as_deref())
}

fn cmd_oracle_single_linkage(args: SingleLinkageArgs) -> Result<(), AppError> {
    let space = load_space(Some(&args.space), None)?;
    let p = parse_p(&args.p)?;
    let scale = if args.scale == "auto" {
        let s = edge_death_scale(p);
        eprintln!("derived edge-death scale for p={}: {}", p, io::fmt_sig(s));
        s
    } else {
        let s: f64 = args
            .scale
            .parse()
            .map_err(|_| fail(2, "scale must be a number or \"auto\""))?;
        if s <= 0.0 {
            return Err(fail(2, "scale must be positive"));
        }
        s
    };
    let diagram = single_linkage_h0(&space, scale);
    emit_diagram(&diagram, args.out, args.output.as_deref())
}

fn cmd_audit_sphere(args: AuditSphereArgs) -> Result<(), AppError> {
    let p = parse_p(&args.p)?;
    let degree = args.degree.unwrap_or(args.n_dim);
    let max_dim = args.max_dim.unwrap_or(degree + 1);
    let mode = match args.mode.as_str() {
        "grid" => SampleMode::Grid,
        "uniform" => SampleMode::SeededUniform,
        other => return Err(fail(2, format!("unknown mode {other:?}"))),
    };
    if args.count < args.n_dim + 2 {
        return Err(fail(2, "count must be at least n_dim + 2"));
    }

    let cloud = sample_sphere(args.n_dim, args.count, mode, args.seed);
    let space = euclidean_metric(&cloud).map_err(|e| fail(2, e.to_string()))?;
    let fc =
        build_complex(&space, p, &BuildKind::Cech, max_dim).map_err(|e| fail(2, e.to_string()))?;
    let diagram = compute_diagram(&fc).map_err(|e| fail(2, e.to_string()))?;

    let sqrt2 = 2.0f64.sqrt();
    println!(
        "audit-sphere n_dim={} count={} p={} degree={} max_dim={}",
        args.n_dim, args.count, p, degree, max_dim
    );

    // The Hausdorff distance to the continuum is known in closed form only
    // for the circle lattice; without it there is nothing to certify
    // against.
    let hausdorff = match (args.n_dim, mode) {
        (1, SampleMode::Grid) => {
            Some(2.0 * (std::f64::consts::PI / (2.0 * args.count as f64)).sin())
        }
        _ => None,
    };

    let intervals = diagram.intervals(degree);
    if degree == 0 {
        let infinite = intervals.iter().filter(|iv| iv.is_infinite()).count();
        let max_finite = intervals
            .iter()
            .filter(|iv| !iv.is_infinite())
            .map(|iv| iv.death)
            .fold(0.0f64, f64::max);
        println!("infinite classes: {infinite}");
        println!("largest finite death: {}", io::fmt_sig(max_finite));
        if let Some(dh) = hausdorff {
            let slack = 2.0 * dh;
            println!("stability slack 2*d_H: {}", io::fmt_sig(slack));
            if infinite == 1 && max_finite <= slack + 1e-6 {
                println!("certified: single component beyond slack-size deaths PASS");
                return Ok(());
            }
            return Err(fail(3, "certification failed: component structure exceeds slack"));
        }
        return Err(fail(3, "not certifiable: Hausdorff distance to continuum unknown"));
    }

    let dominant = intervals
        .iter()
        .filter(|iv| !iv.is_infinite())
        .max_by(|x, y| x.length().partial_cmp(&y.length()).unwrap());
    let Some(dominant) = dominant else {
        return Err(fail(3, format!("no finite interval in degree {degree}")));
    };
    println!(
        "dominant interval: birth={} death={} length={}",
        io::fmt_sig(dominant.birth),
        io::fmt_sig(dominant.death),
        io::fmt_sig(dominant.length())
    );
    println!("target death sqrt(2) = {}", io::fmt_sig(sqrt2));
    println!(
        "gap |death - sqrt(2)| = {}",
        io::fmt_sig((dominant.death - sqrt2).abs())
    );

    let Some(dh) = hausdorff else {
        println!("certified: no (Hausdorff distance to continuum unknown for this mode)");
        return Err(fail(3, "not certifiable: use --n-dim 1 --mode grid"));
    };
    let slack = 2.0 * dh;
    println!("hausdorff to continuum d_H = {}", io::fmt_sig(dh));
    println!("stability slack 2*d_H = {}", io::fmt_sig(slack));

    if p != PValue::Finite(2.0) {
        println!("certified: no (certified path requires p = 2)");
        return Err(fail(3, "not certifiable: sqrt(2) endpoint holds for p = 2"));
    }
    // A slack at sqrt(2)/2 or more makes the birth and death windows
    // overlap, so the certificate would be vacuous.
    if slack >= sqrt2 / 2.0 {
        println!("certified: no (slack too large to certify; refine the sample)");
        return Err(fail(
            3,
            format!("not certifiable: slack {} >= sqrt(2)/2", io::fmt_sig(slack)),
        ));
    }
    let death_ok = (dominant.death - sqrt2).abs() <= slack + 1e-6;
    let birth_ok = dominant.birth <= slack + 1e-6;
    if death_ok && birth_ok {
        println!("certified: PASS (birth and death within stability slack)");
        Ok(())
    } else {
        println!("certified: FAIL");
        Err(fail(3, "certification failed: interval outside stability slack"))
    }
}

fn cmd_transport(args: TransportArgs) -> Result<(), AppError> {
    let space = load_space(Some(&args.space), None)?;
    let q = parse_p(&args.q)?;
    let mut measures = Vec::new();
    for path in [&args.alpha, &args.beta] {
        let text = read_input(path)?;
        let weights = io::parse_weights(&text).map_err(|e| fail(2, e.to_string()))?;
        measures.push(Measure::new(space.clone(), weights).map_err(|e| fail(2, e.to_string()))?);
    }
    let (value, plan) =
        wasserstein(&measures[0], &measures[1], q).map_err(|e| fail(2, e.to_string()))?;
    println!("wasserstein q={} value={}", q, io::fmt_sig(value));
    if let Some(path) = &args.plan {
        let json = io::plan_to_json(&plan);
        if path.as_os_str() == "-" {
            print!("{json}");
        } else {
            write_output(Some(path), &json)?;
        }
    }
    Ok(())
}
