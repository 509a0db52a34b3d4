//! Corpus benchmarking: expands a JSON corpus description into seeded
//! instances, solves each with the matching solver, re-verifies every
//! certificate, and writes one CSV row per instance. Rows are ordered by
//! corpus index regardless of worker scheduling.

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Deserialize;

use freevertex::colorer;
use freevertex::gen;
use freevertex::oracle;
use freevertex::solver;

use crate::{CliError, CliResult};

/// One corpus line. `seed_start..=seed_end` expands into one instance
/// per seed; `prop-family` uses `s_start..=s_end` instead.
#[derive(Debug, Clone, Deserialize)]
pub struct CorpusItem {
    pub generator: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub seed_start: Option<u64>,
    #[serde(default)]
    pub seed_end: Option<u64>,
    #[serde(default)]
    pub s_start: Option<usize>,
    #[serde(default)]
    pub s_end: Option<usize>,
}

#[derive(Clone)]
struct WorkItem {
    generator: String,
    params: String,
    seed: u64,
}

struct Row {
    index: usize,
    generator: String,
    params: String,
    seed: u64,
    size: usize,
    constraints: usize,
    solve_ms: f64,
    depth: usize,
    cases: String,
    verified: bool,
    error: Option<String>,
}

impl Row {
    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{},{},{},{}",
            self.index,
            self.generator,
            self.params,
            self.seed,
            self.size,
            self.constraints,
            self.solve_ms,
            self.depth,
            self.cases,
            self.verified,
            self.error.as_deref().unwrap_or("")
        )
    }
}

const HEADER: &str =
    "index,generator,params,seed,size,constraints,solve_ms,depth,cases,verified,error";

fn expand(items: &[CorpusItem]) -> CliResult<Vec<WorkItem>> {
    let mut out = Vec::new();
    for item in items {
        match item.generator.as_str() {
            "prop-family" => {
                let lo = item.s_start.unwrap_or(1);
                let hi = item.s_end.unwrap_or(lo);
                for s in lo..=hi {
                    out.push(WorkItem {
                        generator: item.generator.clone(),
                        params: format!("s={s}"),
                        seed: s as u64,
                    });
                }
            }
            "random-nae" | "random-lemma" | "random-regular" => {
                let lo = item.seed_start.unwrap_or(0);
                let hi = item.seed_end.unwrap_or(lo);
                let params = match item.generator.as_str() {
                    "random-nae" => format!(
                        "n={};m={}",
                        item.n
                            .ok_or_else(|| CliError::new(2, "random-nae needs n"))?,
                        item.m
                            .ok_or_else(|| CliError::new(2, "random-nae needs m"))?
                    ),
                    "random-lemma" => format!(
                        "n={}",
                        item.n
                            .ok_or_else(|| CliError::new(2, "random-lemma needs n"))?
                    ),
                    _ => format!(
                        "n={};k={}",
                        item.n
                            .ok_or_else(|| CliError::new(2, "random-regular needs n"))?,
                        item.k.unwrap_or(4)
                    ),
                };
                for seed in lo..=hi {
                    out.push(WorkItem {
                        generator: item.generator.clone(),
                        params: params.clone(),
                        seed,
                    });
                }
            }
            other => {
                return Err(CliError::new(
                    2,
                    format!("unknown corpus generator {other:?}"),
                ));
            }
        }
    }
    Ok(out)
}

fn param(params: &str, key: &str) -> usize {
    params
        .split(';')
        .find_map(|p| p.strip_prefix(&format!("{key}=")))
        .and_then(|v| v.parse().ok())
        .expect("expanded params carry their keys")
}

fn run_item(index: usize, item: &WorkItem) -> Row {
    let mut row = Row {
        index,
        generator: item.generator.clone(),
        params: item.params.clone(),
        seed: item.seed,
        size: 0,
        constraints: 0,
        solve_ms: 0.0,
        depth: 0,
        cases: String::new(),
        verified: false,
        error: None,
    };
    let histogram_string = |cases: &std::collections::BTreeMap<solver::CaseLabel, usize>| {
        cases
            .iter()
            .map(|(c, n)| format!("{c}:{n}"))
            .collect::<Vec<_>>()
            .join("|")
    };
    match item.generator.as_str() {
        "prop-family" | "random-nae" => {
            let instance = if item.generator == "prop-family" {
                gen::proposition_family(param(&item.params, "s"))
            } else {
                gen::random_nae_instance(
                    param(&item.params, "n"),
                    param(&item.params, "m"),
                    item.seed,
                )
            };
            let instance = match instance {
                Ok(i) => i,
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            };
            row.size = instance.var_count();
            row.constraints = instance.clause_count();
            let start = Instant::now();
            match solver::solve_free(&instance) {
                Ok(out) => {
                    row.solve_ms = start.elapsed().as_secs_f64() * 1000.0;
                    row.depth = out.trace.max_depth;
                    row.cases = histogram_string(&out.trace.case_histogram());
                    row.verified = oracle::verify_nae_certificate(&instance, &out.certificate).ok;
                }
                Err(e) => {
                    row.solve_ms = start.elapsed().as_secs_f64() * 1000.0;
                    row.error = Some(e.to_string());
                }
            }
        }
        "random-lemma" => {
            let h = match gen::random_lemma_instance(param(&item.params, "n"), item.seed) {
                Ok(h) => h,
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            };
            row.size = h.vertex_count();
            row.constraints = h.edge_count();
            let start = Instant::now();
            match colorer::lemma_two_free(&h) {
                Ok(out) => {
                    row.solve_ms = start.elapsed().as_secs_f64() * 1000.0;
                    row.depth = out.solver_trace.max_depth;
                    row.cases = histogram_string(&out.solver_trace.case_histogram());
                    row.verified = oracle::verify_coloring_certificate(&h, &out.primary).ok
                        && oracle::verify_coloring_certificate(&h, &out.alternate).ok;
                }
                Err(e) => {
                    row.solve_ms = start.elapsed().as_secs_f64() * 1000.0;
                    row.error = Some(e.to_string());
                }
            }
        }
        "random-regular" => {
            let h = match gen::random_regular_uniform(
                param(&item.params, "n"),
                param(&item.params, "k"),
                item.seed,
            ) {
                Ok(h) => h,
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            };
            row.size = h.vertex_count();
            row.constraints = h.edge_count();
            let start = Instant::now();
            match colorer::solve_free_vertex_detailed(&h) {
                Ok((cert, stats)) => {
                    row.solve_ms = start.elapsed().as_secs_f64() * 1000.0;
                    row.depth = stats.nae_max_depth;
                    row.cases = histogram_string(&stats.nae_cases);
                    row.verified = oracle::verify_coloring_certificate(&h, &cert).ok;
                }
                Err(e) => {
                    row.solve_ms = start.elapsed().as_secs_f64() * 1000.0;
                    row.error = Some(e.to_string());
                }
            }
        }
        _ => unreachable!("expand() validates generators"),
    }
    row
}

pub fn cmd_bench(corpus: PathBuf, out: Option<PathBuf>, jobs: usize) -> CliResult<()> {
    let text = fs::read_to_string(&corpus)
        .map_err(|e| CliError::new(2, format!("cannot read {}: {e}", corpus.display())))?;
    let items: Vec<CorpusItem> =
        serde_json::from_str(&text).map_err(|e| CliError::new(2, format!("corpus: {e}")))?;
    let work = expand(&items)?;

    let slots: Mutex<Vec<Option<Row>>> = Mutex::new((0..work.len()).map(|_| None).collect());
    let cursor = AtomicUsize::new(0);
    let any_unverified = AtomicBool::new(false);
    let workers = jobs.max(1).min(work.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = cursor.fetch_add(1, Ordering::Relaxed);
                if index >= work.len() {
                    break;
                }
                let row = run_item(index, &work[index]);
                if !row.verified {
                    any_unverified.store(true, Ordering::Relaxed);
                }
                slots.lock().expect("no poisoned workers")[index] = Some(row);
            });
        }
    });

    let rows = slots.into_inner().expect("workers finished");
    let mut csv = String::from(HEADER);
    csv.push('\n');
    let mut verified = 0usize;
    let mut total_ms = 0.0;
    for row in rows.iter().map(|r| r.as_ref().expect("all slots filled")) {
        csv.push_str(&row.to_csv());
        csv.push('\n');
        if row.verified {
            verified += 1;
        }
        total_ms += row.solve_ms;
    }
    let summary = format!(
        "items={} verified={verified} total_solve_ms={total_ms:.1}",
        work.len()
    );
    match out {
        Some(path) => {
            fs::write(&path, csv.as_bytes())
                .map_err(|e| CliError::new(2, format!("cannot write {}: {e}", path.display())))?;
            println!("{summary}");
        }
        None => {
            print!("{csv}");
            eprintln!("{summary}");
        }
    }
    if !work.is_empty() && any_unverified.load(Ordering::Relaxed) {
        return Err(CliError::new(6, "corpus contained unverified solves"));
    }
    Ok(())
}
