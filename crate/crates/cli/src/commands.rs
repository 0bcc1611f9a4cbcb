use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use htcsem::census::{exhaustive_census, random_census, CensusOptions, CensusSummary, MAX_EXHAUSTIVE_VERTICES};
use htcsem::constraints::{evaluate_constraints, expected_generator_count, model_ideal_generators, ConstraintSet};
use htcsem::graph::parse_graph;
use htcsem::identify::{edge_count_bound, verdict};
use htcsem::io::{matrix_rows, matrix_to_csv, parse_covariance};
use htcsem::model::{sample_model_instance, CovMatrix};
use htcsem::recovery::recover_params;
use htcsem::{htc_identify, quasi_linear_vertices, Certificate, MixedGraph};
use serde_json::json;

use crate::report::{sha256_hex, Failure, Inputs, Output, EXIT_PROPERTY_FAILURE, EXIT_RESOURCE_CAP};

fn load_graph(inputs: &mut Inputs, path: &Path) -> Result<MixedGraph, Failure> {
    Ok(parse_graph(&inputs.read(path)?)?)
}

fn load_sigma(inputs: &mut Inputs, path: &Path, g: &MixedGraph) -> Result<CovMatrix, Failure> {
    let cov = parse_covariance(&inputs.read(path)?)?;
    if cov.n() != g.n() {
        return Err(Failure::new(
            crate::report::EXIT_PARSE,
            format!("covariance matrix is {0}x{0}, graph has {1} vertices", cov.n(), g.n()),
        ));
    }
    Ok(cov)
}

fn certify(g: &MixedGraph) -> Result<Certificate, Failure> {
    htc_identify(g).ok_or_else(Failure::not_identifiable)
}

fn set_text(s: &[usize]) -> String {
    let items: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn identify(inputs: &mut Inputs, graph: &Path) -> Result<Output, Failure> {
    let g = load_graph(inputs, graph)?;
    let cert = htc_identify(&g);
    let v = verdict(&g, cert.as_ref());
    let bound = edge_count_bound(&g);
    let quasi: Vec<usize> = quasi_linear_vertices(&g).into_iter().collect();
    let subset_cycles = cert.as_ref().map(Certificate::has_subset_cycles);

    let mut text = format!("verdict: {v}\n");
    if let Some(c) = &cert {
        let order: Vec<String> = c.order.iter().map(usize::to_string).collect();
        writeln!(text, "order: {}", order.join(" ")).unwrap();
        for v in g.vertices() {
            writeln!(text, "S_{v} = {}", set_text(c.set(v))).unwrap();
        }
        writeln!(text, "subset cycles: {}", if c.has_subset_cycles() { "yes" } else { "no" }).unwrap();
    }
    writeln!(text, "edge count bound: {}", if bound { "satisfied" } else { "exceeded" }).unwrap();
    writeln!(text, "quasi-linear vertices: {}", set_text(&quasi)).unwrap();

    let results = json!({
        "verdict": v,
        "certificate": cert,
        "subset_cycles": subset_cycles,
        "edge_count_bound": bound,
        "quasi_linear_vertices": quasi,
    });
    Ok(Output::new(results, text))
}

fn key(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

pub fn recover(inputs: &mut Inputs, graph: &Path, sigma: &Path) -> Result<Output, Failure> {
    let g = load_graph(inputs, graph)?;
    let cov = load_sigma(inputs, sigma, &g)?;
    let cert = certify(&g)?;
    let p = recover_params(&g, &cert, &cov)?;

    let lambda: BTreeMap<String, f64> = g.directed().iter().map(|&(i, j)| (key(i, j), p.lambda[(i - 1, j - 1)])).collect();
    let mut omega = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    let mut max_residual = 0.0f64;
    for i in 1..=g.n() {
        for j in i..=g.n() {
            let x = p.omega[(i - 1, j - 1)];
            if i == j || g.has_bidirected(i, j) {
                omega.insert(key(i, j), x);
            } else {
                residuals.insert(key(i, j), x);
                max_residual = max_residual.max(x.abs());
            }
        }
    }
    let results = json!({
        "certificate": cert,
        "lambda": lambda,
        "omega": omega,
        "residuals": { "off_support": residuals, "max_abs": max_residual },
    });
    let lambda_csv = matrix_to_csv(&p.lambda);
    let omega_csv = matrix_to_csv(&p.omega);
    let text = format!(
        "lambda:\n{lambda_csv}omega:\n{omega_csv}max off-support omega residual: {max_residual:e}\n"
    );
    Ok(Output::new(results, text).with_file("lambda.csv", lambda_csv).with_file("omega.csv", omega_csv))
}

pub fn simulate(inputs: &mut Inputs, graph: &Path, seed: u64) -> Result<Output, Failure> {
    let g = load_graph(inputs, graph)?;
    let (params, cov) = sample_model_instance(&g, seed);
    let csv = matrix_to_csv(&cov.sigma);
    let params_json = json!({
        "seed": seed,
        "lambda": matrix_rows(&params.lambda),
        "omega": matrix_rows(&params.omega),
    });
    let results = json!({
        "sigma": matrix_rows(&cov.sigma),
        "lambda": matrix_rows(&params.lambda),
        "omega": matrix_rows(&params.omega),
    });
    let params_text = serde_json::to_string_pretty(&params_json).expect("serializable") + "\n";
    Ok(Output::new(results, csv.clone()).with_file("sigma.csv", csv).with_file("params.json", params_text))
}

fn generators(g: &MixedGraph, max_terms: usize) -> Result<ConstraintSet, Failure> {
    let cert = certify(g)?;
    Ok(model_ideal_generators(g, &cert, max_terms)?)
}

pub fn constraints(inputs: &mut Inputs, graph: &Path, max_terms: usize) -> Result<Output, Failure> {
    let g = load_graph(inputs, graph)?;
    let cs = generators(&g, max_terms)?;
    let expected = expected_generator_count(&g);
    let matches = cs.len() as isize == expected;
    let mut text = String::new();
    for (f, (i, j)) in cs.generators.iter().zip(&cs.pairs) {
        writeln!(text, "[{i},{j}] {f}").unwrap();
    }
    writeln!(text, "{} generators (expected {expected}): {}", cs.len(), if matches { "ok" } else { "MISMATCH" }).unwrap();
    let results = json!({
        "count": cs.len(),
        "expected_count": expected,
        "count_matches": matches,
        "generators": cs.to_json(),
    });
    Ok(Output::new(results, text))
}

pub fn verify(inputs: &mut Inputs, graph: &Path, sigma: &Path, max_terms: usize, threshold: f64) -> Result<Output, Failure> {
    let g = load_graph(inputs, graph)?;
    let cov = load_sigma(inputs, sigma, &g)?;
    let cs = generators(&g, max_terms)?;
    let residuals = evaluate_constraints(&cs, &cov)?;
    let mut rows = Vec::new();
    let mut text = String::new();
    for (k, (&r, &(i, j))) in residuals.iter().zip(&cs.pairs).enumerate() {
        let verdict = if r <= threshold { "satisfied" } else { "violated" };
        writeln!(text, "{k:>3}  [{i},{j}]  {r:.3e}  {verdict}").unwrap();
        rows.push(json!({ "generator_index": k, "pair": [i, j], "residual": r, "verdict": verdict }));
    }
    let violated = residuals.iter().filter(|&&r| r > threshold).count();
    writeln!(text, "{violated} of {} generators violated at threshold {threshold:e}", residuals.len()).unwrap();
    let results = json!({ "threshold": threshold, "violated": violated, "generators": rows });
    Ok(Output::new(results, text))
}

pub struct CensusArgs {
    pub vertices: usize,
    pub samples: Option<usize>,
    pub jobs: usize,
    pub max_terms: usize,
    pub seed: u64,
}

fn summary_text(s: &CensusSummary) -> String {
    let mut text = format!(
        "graphs: {}\nhtc-identifiable: {} ({} with subset cycles)\nquasi-linear-only: {}\nnot-identifiable-by-htc: {}\n",
        s.graphs, s.htc_identifiable, s.with_subset_cycles, s.quasi_linear_only, s.not_identifiable
    );
    writeln!(text, "generators checked: {} (skipped at cap: {})", s.generators_checked, s.symbolic_skipped).unwrap();
    writeln!(text, "max round-trip error: lambda {:.1e}, omega {:.1e}", s.max_lambda_error, s.max_omega_error).unwrap();
    let checks = [
        ("htc/linear disagreement", &s.htc_linear_disagree),
        ("linear but not quasi-linear", &s.linear_not_quasi),
        ("invalid certificate", &s.invalid_certificate),
        ("certified above edge bound", &s.edge_bound_certified),
        ("generator count mismatch", &s.generator_count),
        ("generator failure", &s.generator_failure),
        ("recovery failure", &s.recovery_failure),
    ];
    for (name, v) in checks {
        writeln!(text, "{name}: {}", v.count).unwrap();
        for ex in &v.examples {
            writeln!(text, "  example:\n    {}", ex.trim_end().replace('\n', "\n    ")).unwrap();
        }
    }
    text
}

pub fn census(args: &CensusArgs) -> Result<Output, Failure> {
    if args.samples.is_none() && args.vertices > MAX_EXHAUSTIVE_VERTICES {
        return Err(Failure::new(
            EXIT_RESOURCE_CAP,
            format!("exhaustive census is limited to {MAX_EXHAUSTIVE_VERTICES} vertices; pass --samples for random mode"),
        ));
    }
    let opts = CensusOptions { max_terms: args.max_terms, seed: args.seed, ..CensusOptions::default() };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| Failure::new(EXIT_PROPERTY_FAILURE, format!("thread pool: {e}")))?;
    let summary = pool.install(|| match args.samples {
        Some(m) => random_census(args.vertices, m, &opts),
        None => exhaustive_census(args.vertices, &opts),
    });
    let summary_json = serde_json::to_value(&summary).expect("serializable");
    let hash = sha256_hex(serde_json::to_string(&summary_json).expect("serializable").as_bytes());
    let violations = summary.violation_count();
    let mode = if args.samples.is_some() { "random" } else { "exhaustive" };
    let mut text = format!("{mode} census on {} vertices\n", args.vertices);
    text.push_str(&summary_text(&summary));
    writeln!(text, "violations: {violations}\nsummary hash: {hash}").unwrap();
    let results = json!({
        "mode": mode,
        "vertices": args.vertices,
        "samples": args.samples,
        "summary": summary_json,
        "violations": violations,
        "summary_sha256": hash,
    });
    let mut out = Output::new(results, text);
    if violations > 0 {
        out.exit = EXIT_PROPERTY_FAILURE;
    }
    Ok(out)
}
