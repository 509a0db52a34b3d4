//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines; every criterion has zero failure tolerance.

use std::collections::BTreeSet;

use freevertex::colorer::{self, build_star_maps, derive_pair};
use freevertex::convert::instance_from_hypergraph;
use freevertex::gen;
use freevertex::hypergraph::{Color, Hypergraph, PartialColoring, VertexId};
use freevertex::io::CertificateFile;
use freevertex::nae::NaeInstance;
use freevertex::oracle;
use freevertex::solver;

const LIMIT: usize = oracle::DEFAULT_EXHAUSTIVE_LIMIT;

fn report(criterion: usize, description: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("[PASS] criterion {criterion}: {description}");
    } else {
        println!("[FAIL] criterion {criterion}: {description}");
        for f in failures.iter().take(10) {
            println!("       {f}");
        }
        panic!(
            "criterion {criterion} failed with {} violations",
            failures.len()
        );
    }
}

/// Seeded corpus of valid solver inputs with n <= 12 and m < n.
fn nae_corpus(count: usize) -> Vec<(u64, NaeInstance)> {
    (0..count as u64)
        .map(|seed| {
            let n = 4 + (seed as usize * 7 % 9);
            let low = n.div_ceil(2);
            let m = low + (seed as usize * 13 % (n - low));
            (
                seed,
                gen::random_nae_instance(n, m, seed).expect("generator within budget"),
            )
        })
        .collect()
}

#[test]
fn criterion_1_solver_soundness_on_random_corpus() {
    let mut failures = Vec::new();
    for (seed, instance) in nae_corpus(1000) {
        match solver::solve_free(&instance) {
            Ok(out) => {
                let verdict = oracle::verify_nae_certificate(&instance, &out.certificate);
                if !verdict.ok {
                    failures.push(format!("seed {seed}: certificate rejected"));
                    continue;
                }
                let free = out.certificate.free_var.expect("free variable designated");
                let oracle_free = oracle::free_variables(&instance, LIMIT)
                    .unwrap()
                    .free_variables;
                if !oracle_free.contains(&free) {
                    failures.push(format!("seed {seed}: {free} not free per oracle"));
                }
            }
            Err(e) => failures.push(format!("seed {seed}: solver error {e}")),
        }
    }
    report(
        1,
        "solve_free sound and oracle-confirmed on 1000 random instances",
        &failures,
    );
}

#[test]
fn criterion_2_extremal_family_has_exactly_one_free_variable() {
    let mut failures = Vec::new();
    for s in 1..=4usize {
        let instance = gen::proposition_family(s).unwrap();
        let expected = vec![gen::proposition_family_free_var(s)];
        let got = oracle::free_variables(&instance, LIMIT)
            .unwrap()
            .free_variables;
        if got != expected {
            failures.push(format!(
                "s={s}: free variables {got:?}, expected {expected:?}"
            ));
        }
    }
    report(
        2,
        "the extremal family frees exactly the last block head",
        &failures,
    );
}

#[test]
fn criterion_3_fano_plane_is_not_colorable() {
    let mut failures = Vec::new();
    let fano = gen::fano();
    if colorer::two_color(&fano) != Err(colorer::ColorerError::NotTwoColorable) {
        failures.push("two_color(fano) did not return NotTwoColorable".into());
    }
    let instance = instance_from_hypergraph(&fano, true).unwrap();
    if oracle::is_nae_satisfiable(&instance, LIMIT).unwrap() {
        failures.push("fano instance reported nae-satisfiable".into());
    }
    report(3, "the 7-point plane has no proper 2-coloring", &failures);
}

#[test]
fn criterion_4_tightness_pair() {
    let mut failures = Vec::new();
    let cases = [
        ("fano-complement", gen::complement(&gen::fano())),
        ("complete(5,4)", gen::complete_uniform(5, 4).unwrap()),
    ];
    for (name, h) in &cases {
        match colorer::solve_free_vertex(h) {
            Ok(cert) => {
                if !oracle::verify_coloring_certificate(h, &cert).ok {
                    failures.push(format!("{name}: certificate rejected"));
                }
            }
            Err(e) => failures.push(format!("{name}: solve failed: {e}")),
        }
        let singles = oracle::free_sets(h, 1, LIMIT).unwrap();
        let expected: Vec<Vec<VertexId>> = (0..h.vertex_count()).map(|v| vec![v]).collect();
        if singles != expected {
            failures.push(format!("{name}: singleton free sets {singles:?}"));
        }
        let pairs = oracle::free_sets(h, 2, LIMIT).unwrap();
        if !pairs.is_empty() {
            failures.push(format!("{name}: unexpected free pair {pairs:?}"));
        }
    }
    report(
        4,
        "tightness pair solves, all singletons free, no free pair",
        &failures,
    );
}

#[test]
fn criterion_5_free_vertex_at_scale() {
    let mut failures = Vec::new();
    let sizes = [12usize, 16, 20, 28, 40];
    let mut count = 0;
    for (idx, &n) in sizes.iter().enumerate() {
        for seed in 0..20u64 {
            let seed = seed + 1000 * idx as u64;
            let h = match gen::random_regular_uniform(n, 4, seed) {
                Ok(h) => h,
                Err(e) => {
                    failures.push(format!("n={n} seed {seed}: generation failed: {e}"));
                    continue;
                }
            };
            count += 1;
            match colorer::solve_free_vertex(&h) {
                Ok(cert) => {
                    if !oracle::verify_coloring_certificate(&h, &cert).ok {
                        failures.push(format!("n={n} seed {seed}: certificate rejected"));
                    }
                }
                Err(e) => failures.push(format!("n={n} seed {seed}: solve failed: {e}")),
            }
        }
    }
    if count < 100 {
        failures.push(format!("only {count} instances generated"));
    }
    report(
        5,
        "verified free-vertex certificates on 100 random 4-regular inputs",
        &failures,
    );
}

#[test]
fn criterion_6_two_free_vertices_on_sparse_inputs() {
    let mut failures = Vec::new();
    for seed in 0..500u64 {
        let n = 4 + (seed as usize % 11); // 4..=14
        let h = match gen::random_lemma_instance(n, seed) {
            Ok(h) => h,
            Err(e) => {
                failures.push(format!("seed {seed}: generation failed: {e}"));
                continue;
            }
        };
        match colorer::lemma_two_free(&h) {
            Ok(out) => {
                let v = out.primary.free_vertex.expect("primary free vertex");
                let u = out.alternate_vertex;
                if v == u {
                    failures.push(format!("seed {seed}: free vertices coincide"));
                    continue;
                }
                if !oracle::verify_coloring_certificate(&h, &out.primary).ok
                    || !oracle::verify_coloring_certificate(&h, &out.alternate).ok
                {
                    failures.push(format!("seed {seed}: certificate rejected"));
                    continue;
                }
                let singles: BTreeSet<VertexId> = oracle::free_sets(&h, 1, LIMIT)
                    .unwrap()
                    .into_iter()
                    .map(|s| s[0])
                    .collect();
                if !singles.contains(&v) || !singles.contains(&u) {
                    failures.push(format!("seed {seed}: {v} or {u} not free per oracle"));
                }
            }
            Err(e) => failures.push(format!("seed {seed}: lemma failed: {e}")),
        }
    }
    report(
        6,
        "two distinct oracle-confirmed free vertices on 500 sparse inputs",
        &failures,
    );
}

#[test]
fn criterion_7_derived_pair_accounting() {
    let mut failures = Vec::new();
    // Crossed-ring instances carry all-fixed colorings by construction;
    // enumerate every total coloring up to 16 vertices and check each
    // all-fixed one.
    for m in [4usize, 6, 7, 8] {
        let ring = |offset: usize| -> Vec<Vec<VertexId>> {
            (0..m)
                .map(|r| vec![offset + r, offset + (r + 1) % m, offset + (r + 2) % m])
                .collect()
        };
        let mut edges = Vec::new();
        for (r, base) in ring(0).iter().enumerate() {
            let mut e = base.clone();
            e.push(m + r);
            edges.push(e);
        }
        for (r, base) in ring(m).iter().enumerate() {
            let mut e = base.clone();
            e.push(r);
            edges.push(e);
        }
        let h = Hypergraph::new(2 * m, edges).unwrap();
        let n = h.vertex_count();
        let mut all_fixed = 0usize;
        for mask in 0..1u64 << n {
            let c = PartialColoring::from_colors(
                (0..n)
                    .map(|v| {
                        Some(if mask >> v & 1 == 0 {
                            Color::One
                        } else {
                            Color::Two
                        })
                    })
                    .collect(),
            );
            if !h.all_edges_bichromatic(&c) {
                continue;
            }
            if oracle::fixed_vertices(&h, &c, &[]).unwrap().len() != n {
                continue;
            }
            all_fixed += 1;
            let maps = build_star_maps(&h, &c);
            match derive_pair(&h, &c, &maps) {
                Ok(pair) => {
                    let ok = pair.h1.is_regular(3)
                        && pair.h1.is_uniform(3)
                        && pair.h2.is_regular(3)
                        && pair.h2.is_uniform(3)
                        && pair.v1.len() == pair.v2.len()
                        && pair.h1.edge_count() == pair.v2.len()
                        && pair.h2.edge_count() == pair.v1.len();
                    if !ok {
                        failures.push(format!("m={m} mask {mask}: accounting violated"));
                    }
                }
                Err(e) => failures.push(format!("m={m} mask {mask}: derive_pair failed: {e}")),
            }
        }
        if all_fixed == 0 {
            failures.push(format!("m={m}: no all-fixed coloring found"));
        }
    }
    report(
        7,
        "derived pairs are 3-regular 3-uniform with equal classes",
        &failures,
    );
}

#[test]
fn criterion_8_determinism_and_termination() {
    let mut failures = Vec::new();
    for (seed, instance) in nae_corpus(200) {
        let a = solver::solve_free(&instance).unwrap();
        let b = solver::solve_free(&instance).unwrap();
        let cert_a = CertificateFile::from_nae(&a.certificate).to_json();
        let cert_b = CertificateFile::from_nae(&b.certificate).to_json();
        if cert_a != cert_b || a.trace.dump() != b.trace.dump() {
            failures.push(format!(
                "seed {seed}: non-deterministic certificate or trace"
            ));
        }
        if a.trace.max_depth > instance.clause_count() {
            failures.push(format!(
                "seed {seed}: depth {} exceeds clause count {}",
                a.trace.max_depth,
                instance.clause_count()
            ));
        }
    }
    for seed in 0..40u64 {
        let n = [12usize, 16, 20][seed as usize % 3];
        let h = gen::random_regular_uniform(n, 4, seed).unwrap();
        let a = colorer::solve_free_vertex(&h).unwrap();
        let b = colorer::solve_free_vertex(&h).unwrap();
        if CertificateFile::from_coloring(&a).to_json()
            != CertificateFile::from_coloring(&b).to_json()
        {
            failures.push(format!(
                "hypergraph seed {seed}: non-deterministic certificate"
            ));
        }
    }
    report(
        8,
        "byte-identical reruns and depth bounded by clause count",
        &failures,
    );
}
