//! `qmqc`: quartet consistency experiments from the command line.

mod bench;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use qmqc::encoder::{encode, Encoding, ModelVariant, VarMap};
use qmqc::model::qrt::{parse_qrt, write_qrt, QrtFile};
use qmqc::model::TaxonSet;
use qmqc::oracle::mqc_oracle;
use qmqc::pb::opb::{emit_opb, emit_solution, parse_opb, parse_solution, Solution, SolutionStatus};
use qmqc::pipeline::reconstruct;
use qmqc::solver::{solve, SolveStatus, SolverConfig};
use qmqc::tree::newick::{emit_unrooted, parse_unrooted};
use qmqc::tree::{alter_quartets, derive_all, random_tree, tree_satisfied_count, GenSpec};
use qmqc::{solve_mqc, QuartetSet};

#[derive(Parser)]
#[command(name = "qmqc", version, about = "Exact maximum quartet consistency")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a complete quartet set from a random tree, with alterations.
    Gen(GenArgs),
    /// Reconstruct an optimal tree from a quartet file.
    Run(RunArgs),
    /// Write the PB instance (.opb) and its variable map (.map).
    Encode(EncodeArgs),
    /// Solve an .opb file and write a solver log.
    Solve(SolveArgs),
    /// Turn a variable map and a solver log into a tree.
    Decode(DecodeArgs),
    /// Count the quartets a tree satisfies.
    Check(CheckArgs),
    /// Exhaustive optimum over all trees (at most 9 taxa).
    Oracle(OracleArgs),
    /// Run a grid of generated instances and write a CSV summary.
    Bench(bench::BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    taxa: usize,
    #[arg(long, env = "QMQC_SEED", default_value_t = 1)]
    seed: u64,
    /// Percentage of topologies to alter.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=100))]
    alter: u32,
    #[arg(long)]
    out: PathBuf,
    /// Also write the source tree.
    #[arg(long)]
    tree: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, value_parser = parse_encoding)]
    model: Encoding,
    /// Fix detected sibling pairs.
    #[arg(long)]
    siblings: bool,
}

impl ModelArgs {
    fn variant(&self) -> ModelVariant {
        ModelVariant::new(self.model, self.siblings)
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Give up after this many seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            time_limit: self.time_limit.map(Duration::from_secs_f64),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    opb: PathBuf,
    #[arg(long)]
    map: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    sol: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Also write the witness tree.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_encoding(s: &str) -> Result<Encoding, String> {
    s.parse()
        .map_err(|e: qmqc::encoder::EncodeError| e.to_string())
}

/// An error with the exit code it maps to.
pub struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    /// Bad input: unreadable or malformed files, impossible requests.
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }

    /// Broken invariant or failed output.
    pub fn internal(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 3,
            error: error.into(),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => bench::run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)
}

pub fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::internal)
}

fn read_quartets(path: &Path) -> CliResult<QrtFile> {
    parse_qrt(&read(path)?)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::input)
}

/// Generated instance: the source tree, the altered set, and the header
/// comments recording how it was made.
pub fn generate(
    n: usize,
    seed: u64,
    alter: u32,
) -> CliResult<(qmqc::UnrootedPhylogeny, QuartetSet, Vec<String>)> {
    let spec = GenSpec::new(n, seed, alter).map_err(Failure::input)?;
    let tree = random_tree(&spec).map_err(Failure::internal)?;
    let taxa = TaxonSet::numbered(n);
    let perfect = derive_all(&tree, &taxa).map_err(Failure::internal)?;
    let (q, originals) = alter_quartets(&perfect, &spec).map_err(Failure::internal)?;
    let mut comments = vec![
        format!("taxa={n}"),
        format!("seed={seed}"),
        format!("alter={alter}"),
        format!("altered={}", originals.len()),
    ];
    for orig in &originals {
        let now = q.topology_of(orig.taxa()).expect("complete set");
        comments.push(format!(
            "altered: {} was {}",
            now.display(&taxa),
            orig.display(&taxa)
        ));
    }
    Ok((tree, q, comments))
}

fn cmd_gen(a: GenArgs) -> CliResult<()> {
    let (tree, q, comments) = generate(a.taxa, a.seed, a.alter)?;
    write(&a.out, &write_qrt(&q, &comments))?;
    if let Some(path) = &a.tree {
        write(path, &format!("{}\n", emit_unrooted(&tree, q.taxa())))?;
    }
    Ok(())
}

fn cmd_run(a: RunArgs) -> CliResult<()> {
    let file = read_quartets(&a.input)?;
    let q = &file.quartets;
    let variant = a.model.variant();
    let sol = solve_mqc(q, variant, &a.solver.config()).map_err(Failure::internal)?;
    let newick = emit_unrooted(sol.tree(), q.taxa());
    write(&a.out, &format!("{newick}\n"))?;
    let rep = report::RunReport::new(q, &sol, newick, &a.input, &file.comments);
    if let Some(path) = &a.report {
        let json = serde_json::to_string_pretty(&rep).map_err(Failure::internal)?;
        write(path, &format!("{json}\n"))?;
    }
    println!(
        "{variant}: satisfied {}/{} (errors {}), recount {}",
        rep.satisfied, rep.quartets, rep.quartet_errors, rep.recount
    );
    Ok(())
}

fn cmd_encode(a: EncodeArgs) -> CliResult<()> {
    let file = read_quartets(&a.input)?;
    let (inst, map) = encode(&file.quartets, a.model.variant()).map_err(Failure::input)?;
    write(&a.opb, &emit_opb(&inst))?;
    write(&a.map, &map.to_text())?;
    println!(
        "{} variables, {} constraints",
        inst.num_vars(),
        inst.num_constraints()
    );
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> CliResult<()> {
    let inst = parse_opb(&read(&a.input)?)
        .with_context(|| format!("in {}", a.input.display()))
        .map_err(Failure::input)?;
    let r = solve(&inst, &a.solver.config());
    let status = match (r.status, &r.assignment) {
        (SolveStatus::Optimal, _) => SolutionStatus::Optimum,
        (SolveStatus::Unsatisfiable, _) => SolutionStatus::Unsatisfiable,
        (SolveStatus::Timeout, Some(_)) => SolutionStatus::Satisfiable,
        (SolveStatus::Timeout, None) => SolutionStatus::Unknown,
    };
    let sol = Solution::new(status, r.objective, r.assignment.as_deref());
    write(&a.out, &emit_solution(&sol))?;
    println!("{:?} objective {:?}", r.status, r.objective);
    Ok(())
}

fn cmd_decode(a: DecodeArgs) -> CliResult<()> {
    let map = VarMap::parse(&read(&a.map)?)
        .with_context(|| format!("in {}", a.map.display()))
        .map_err(Failure::input)?;
    let sol = parse_solution(&read(&a.sol)?)
        .with_context(|| format!("in {}", a.sol.display()))
        .map_err(Failure::input)?;
    if sol.status != SolutionStatus::Optimum {
        return Err(Failure::internal(anyhow!(
            "solver log reports {:?}, not an optimum",
            sol.status
        )));
    }
    let assignment = sol.to_assignment(map.num_vars()).map_err(Failure::input)?;
    let rec = reconstruct(&map, &assignment).map_err(Failure::input)?;
    let newick = emit_unrooted(&rec.tree, map.taxa());
    write(&a.out, &format!("{newick}\n"))?;
    println!("satisfied {}/{}", rec.satisfied(), rec.flags.len());
    Ok(())
}

fn cmd_check(a: CheckArgs) -> CliResult<()> {
    let file = read_quartets(&a.input)?;
    let q = &file.quartets;
    let (tree, _) = parse_unrooted(&read(&a.tree)?, Some(q.taxa()))
        .with_context(|| format!("in {}", a.tree.display()))
        .map_err(Failure::input)?;
    let satisfied = tree_satisfied_count(&tree, q);
    println!("satisfied {satisfied}");
    println!("errors {}", q.len() - satisfied);
    println!("total {}", q.len());
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> CliResult<()> {
    let file = read_quartets(&a.input)?;
    let q = &file.quartets;
    let r = mqc_oracle(q).map_err(Failure::input)?;
    let newick = emit_unrooted(&r.witness, q.taxa());
    if let Some(path) = &a.out {
        write(path, &format!("{newick}\n"))?;
    }
    println!("optimum {}", r.optimum);
    println!("errors {}", q.len() - r.optimum);
    println!("trees {}", r.trees_examined);
    println!("witness {newick}");
    Ok(())
}
