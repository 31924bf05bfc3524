//! Grid runs with a CSV summary.

use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use rayon::prelude::*;

use qmqc::encoder::{Encoding, ModelVariant};
use qmqc::solve_mqc;
use qmqc::solver::SolverConfig;

use crate::{generate, parse_encoding, write, CliResult, Failure};

#[derive(Args)]
pub struct BenchArgs {
    /// Taxon counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [5usize, 6, 7])]
    taxa: Vec<usize>,
    /// Alteration percentages, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 10, 30])]
    alter: Vec<u32>,
    /// Seeds 1..=N per cell.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_encoding, default_values = ["basic", "fst", "scd"])]
    models: Vec<Encoding>,
    /// Also run every model with sibling fixing.
    #[arg(long)]
    siblings: bool,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Leave out the wall-clock column so the CSV is reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: PathBuf,
}

struct Row {
    key: (usize, u32, u64, usize, bool),
    fields: Vec<String>,
}

pub fn run(a: BenchArgs) -> CliResult<()> {
    if let Some(&p) = a.alter.iter().find(|&&p| p > 100) {
        return Err(Failure::input(anyhow!("alteration {p} exceeds 100")));
    }
    let sib_flags: &[bool] = if a.siblings { &[false, true] } else { &[false] };
    let mut cells = Vec::new();
    for &n in &a.taxa {
        for &p in &a.alter {
            for seed in 1..=a.seeds {
                for (mi, &m) in a.models.iter().enumerate() {
                    for &s in sib_flags {
                        cells.push((n, p, seed, mi, ModelVariant::new(m, s)));
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(Failure::internal)?;
    let no_timing = a.no_timing;
    let mut rows: Vec<Row> = pool.install(|| {
        cells
            .into_par_iter()
            .map(|(n, p, seed, mi, v)| -> CliResult<Row> {
                let (_, q, _) = generate(n, seed, p)?;
                let sol = solve_mqc(&q, v, &SolverConfig::default()).map_err(Failure::internal)?;
                let st = &sol.result.stats;
                let mut fields = vec![
                    n.to_string(),
                    p.to_string(),
                    seed.to_string(),
                    v.encoding.to_string(),
                    u8::from(v.siblings).to_string(),
                    sol.num_vars.to_string(),
                    sol.num_constraints.to_string(),
                    sol.satisfied().to_string(),
                    (q.len() - sol.satisfied()).to_string(),
                    st.decisions.to_string(),
                    st.conflicts.to_string(),
                ];
                if !no_timing {
                    fields.push(format!("{:.3}", st.elapsed.as_secs_f64() * 1e3));
                }
                Ok(Row {
                    key: (n, p, seed, mi, v.siblings),
                    fields,
                })
            })
            .collect::<CliResult<Vec<Row>>>()
    })?;
    rows.sort_by_key(|r| r.key);
    let mut header = vec![
        "taxa",
        "alter",
        "seed",
        "model",
        "siblings",
        "num_vars",
        "num_constraints",
        "satisfied",
        "quartet_errors",
        "decisions",
        "conflicts",
    ];
    if !a.no_timing {
        header.push("elapsed_ms");
    }
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(&header).map_err(Failure::internal)?;
    for r in &rows {
        out.write_record(&r.fields).map_err(Failure::internal)?;
    }
    let bytes = out
        .into_inner()
        .map_err(|e| Failure::internal(anyhow!("{e}")))?;
    let csv = String::from_utf8(bytes).map_err(Failure::internal)?;
    write(&a.out, &csv)?;
    println!("{} runs written to {}", rows.len(), a.out.display());
    Ok(())
}
