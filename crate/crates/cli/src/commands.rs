use serde::Serialize;
use serde_json::json;

use qergo::cover_green::{continuation_solve, identity_residuals};
use qergo::diagnostics::{
    histogram, integrate_deconvolved, kesten_mckay_cdf, kesten_mckay_density, kesten_mckay_expectation, ks_distance,
    phi_histogram, population_density, EmpiricalMeasure, PopulationConfig, TestFunction,
};
use qergo::ensembles::{
    bst_profile, expander_gap, random_degree_bounded, random_regular, sample_potential, stream_rng, BaseDistribution,
    EnsembleConfig, Stream,
};
use qergo::ergodicity::{identity_suite, quasi_eigen_residual, NbQuasiEigenvectors, SuiteSamples, ZetaPolicy};
use qergo::experiments::{median, run_instance, trend_verdict};
use qergo::graph::{count_nb_paths, enumerate_nb_paths, Graph, NbPath};
use qergo::spectral::DEFAULT_RESIDUAL_TOL;
use qergo::{eigensystem, Potential};

use crate::config::{ErgodicityConfig, RunConfig};
use crate::error::{CliError, Result};
use crate::output::Run;

pub fn gen(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let c = &cfg.gen;
    let ens = EnsembleConfig {
        n: c.n,
        degree: c.degree,
        disorder: c.disorder,
        base: c.base.clone(),
        seed: cfg.seed,
    };
    let g = random_regular(&ens)?;
    let w = sample_potential::<f64>(&g, &ens);
    run.stage("sample");
    let gap = expander_gap::<f64>(&g)?;
    let profile = bst_profile(&g, c.profile_radius);
    run.stage("diagnostics");
    run.write_text("graph.txt", &g.to_text())?;
    let rows: Vec<(usize, f64)> = w.values.iter().copied().enumerate().collect();
    run.write_csv("potential.csv", &["vertex", "value"], &rows)?;
    run.manifest.seeds = vec![cfg.seed];
    run.manifest.summary = json!({
        "n": g.n(),
        "edges": g.num_edges(),
        "graph_hash": format!("{:016x}", g.content_hash()),
        "potential_hash": format!("{:016x}", w.content_hash()),
        "potential_bound": w.bound,
        "expander_gap": gap,
        "tree_like_fraction": profile,
    });
    run.manifest
        .notes
        .push("Hoelder continuity of the single-site law is assumed, not checked".into());
    Ok(())
}

#[derive(Serialize)]
struct ResidualRow {
    instance: usize,
    n: usize,
    stage: &'static str,
    lambda: Option<f64>,
    eta: f64,
    relation: String,
    residual: f64,
}

fn identity_instance(cfg: &RunConfig, i: usize) -> Result<(Graph, Potential<f64>)> {
    let c = &cfg.identities;
    let n = if c.instances <= 1 {
        c.n_min
    } else {
        c.n_min + (c.n_max - c.n_min) * i / (c.instances - 1)
    };
    let seed = cfg.seed.wrapping_add(i as u64);
    let g = random_degree_bounded(n, c.min_degree, c.max_degree, seed)?;
    let mut rng = stream_rng(seed, Stream::Potential, 0);
    let w = Potential::from_values(
        (0..n)
            .map(|_| c.amplitude * BaseDistribution::Uniform.sample(&mut rng))
            .collect(),
    );
    Ok((g, w))
}

fn path_sample(g: &Graph, max_k: usize, per_k: usize) -> Result<Vec<NbPath>> {
    let mut out = Vec::new();
    for k in 1..=max_k {
        let stride = (count_nb_paths(g, k) as usize / per_k.max(1)).max(1);
        out.extend(enumerate_nb_paths(g, k)?.step_by(stride));
    }
    Ok(out)
}

pub fn identities(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let c = &cfg.identities;
    if c.instances == 0 || c.n_min > c.n_max || !(c.tol > 0.0) || !(c.zeta_tol > 0.0) {
        return Err(CliError::Config(format!("invalid identities section {c:?}")));
    }
    let mut rows = Vec::new();
    let policy = ZetaPolicy::exact(c.zeta_tol);
    let mut worst = [0.0f64; 3];
    for i in 0..c.instances {
        let (g, w) = identity_instance(cfg, i)?;
        let n = g.n();
        let sample = path_sample(&g, c.max_path_length, c.paths_per_length)?;
        for &lambda in &c.lambdas {
            for &eta in &c.etas {
                let zf = continuation_solve(&g, &w, lambda, eta, c.zeta_tol)?;
                for (name, r) in identity_residuals(&zf, &sample).named() {
                    worst[0] = worst[0].max(r);
                    rows.push(ResidualRow {
                        instance: i,
                        n,
                        stage: "field",
                        lambda: Some(lambda),
                        eta,
                        relation: name.to_string(),
                        residual: r,
                    });
                }
            }
        }
        let es = eigensystem(&g, &w, DEFAULT_RESIDUAL_TOL)?;
        for &eta in &c.quasi_etas {
            let r = policy.for_each_gamma(&g, &w, &es.values, eta, |j, zf| {
                let v = NbQuasiEigenvectors::from_field(j, es.values[j], es.vector(j), zf);
                let (a, b) = quasi_eigen_residual(&v, zf);
                let s = 1.0 + v.sup_norm_f();
                Ok((a / s, b / s))
            })?;
            let fwd = r.iter().fold(0.0f64, |m, p| m.max(p.0));
            let bwd = r.iter().fold(0.0f64, |m, p| m.max(p.1));
            worst[1] = worst[1].max(fwd).max(bwd);
            for (name, v) in [("quasi_forward", fwd), ("quasi_reflected", bwd)] {
                rows.push(ResidualRow {
                    instance: i,
                    n,
                    stage: "quasi",
                    lambda: None,
                    eta,
                    relation: name.to_string(),
                    residual: v,
                });
            }
        }
        if i < c.suite_instances {
            let samples = SuiteSamples {
                eigenpairs: c.suite_eigenpairs,
                operands: c.suite_operands,
                seed: cfg.seed.wrapping_add(i as u64),
                ..SuiteSamples::default()
            };
            let s = identity_suite(&g, &w, &es, &policy, c.suite_eta, &samples)?;
            for (name, r) in s.named() {
                worst[2] = worst[2].max(r);
                rows.push(ResidualRow {
                    instance: i,
                    n,
                    stage: "suite",
                    lambda: None,
                    eta: c.suite_eta,
                    relation: name,
                    residual: r,
                });
            }
        }
        run.stage(&format!("instance {i}"));
    }
    run.write_csv(
        "residuals.csv",
        &["instance", "n", "stage", "lambda", "eta", "relation", "residual"],
        &rows,
    )?;
    run.manifest.seeds = (0..c.instances as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    run.manifest.tolerances = json!({ "residual": c.tol, "zeta": c.zeta_tol });
    run.manifest.summary = json!({
        "max_field_residual": worst[0],
        "max_quasi_residual": worst[1],
        "max_suite_residual": worst[2],
    });
    run.at_most("field identities", worst[0], c.tol);
    run.at_most("quasi-eigenvector equations (scaled)", worst[1], c.tol);
    if c.suite_instances > 0 {
        run.at_most("operator suite", worst[2], c.tol);
    }
    Ok(())
}

#[derive(Serialize)]
struct InstanceRow {
    n: usize,
    seed: u64,
    variance: f64,
    eigenvalues_in_interval: usize,
    average_min: f64,
    average_mean: f64,
    average_max: f64,
    expander_gap: f64,
    gap_flagged: bool,
}

#[derive(Serialize)]
struct TermRow {
    n: usize,
    seed: u64,
    j: usize,
    lambda: f64,
    term: f64,
    average: f64,
    multiplicity: usize,
    centered: bool,
}

pub fn ergodicity(cfg: &RunConfig, section: &ErgodicityConfig, run: &mut Run) -> Result<()> {
    let p = section.protocol(cfg.seed);
    p.validate()?;
    let mut summary = Vec::new();
    let mut terms = Vec::new();
    let mut medians = Vec::new();
    let mut min_avg = f64::INFINITY;
    let mut min_var = f64::INFINITY;
    for &n in &p.sizes {
        let mut vars = Vec::new();
        for &s in &p.seeds {
            let r = run_instance(&p, n, s)?;
            vars.push(r.variance);
            min_avg = min_avg.min(r.average_min);
            min_var = min_var.min(r.variance);
            for i in 0..r.indices.len() {
                terms.push(TermRow {
                    n,
                    seed: s,
                    j: r.indices[i],
                    lambda: r.lambdas[i],
                    term: r.terms[i],
                    average: r.averages[i],
                    multiplicity: r.multiplicities[i],
                    centered: true,
                });
            }
            summary.push(InstanceRow {
                n,
                seed: s,
                variance: r.variance,
                eigenvalues_in_interval: r.eigenvalues_in_interval,
                average_min: r.average_min,
                average_mean: r.average_mean,
                average_max: r.average_max,
                expander_gap: r.expander_gap,
                gap_flagged: r.gap_flagged,
            });
        }
        medians.push((n, median(&vars)));
        run.stage(&format!("N = {n}"));
        // flushed after every size so partial ladders survive a failure
        write_ergodicity(run, &summary, &terms, &medians)?;
    }
    let m: Vec<f64> = medians.iter().map(|x| x.1).collect();
    let verdict = trend_verdict(&m, section.max_ratio, section.allowed_inversions);
    run.manifest.seeds = p.seeds.clone();
    run.manifest.tolerances = json!({
        "zeta": p.zeta_tol,
        "max_ratio": section.max_ratio,
        "allowed_inversions": section.allowed_inversions,
        "min_average": section.min_average,
    });
    run.manifest.summary = json!({ "trend": verdict, "min_average": min_avg, "min_variance": min_var });
    run.manifest
        .notes
        .push("variance terms refer to the eigenbasis returned by the solver inside degenerate eigenspaces".into());
    if m.len() >= 2 {
        run.at_most("last/first median variance", verdict.ratio, section.max_ratio);
        run.at_most("median inversions", verdict.inversions as f64, section.allowed_inversions as f64);
    }
    run.at_least("min <1_L>", min_avg, section.min_average);
    Ok(())
}

fn write_ergodicity(run: &mut Run, summary: &[InstanceRow], terms: &[TermRow], medians: &[(usize, f64)]) -> Result<()> {
    run.manifest.files.clear();
    run.write_csv(
        "variance.csv",
        &[
            "n",
            "seed",
            "variance",
            "eigenvalues_in_interval",
            "average_min",
            "average_mean",
            "average_max",
            "expander_gap",
            "gap_flagged",
        ],
        summary,
    )?;
    run.write_csv(
        "terms.csv",
        &["n", "seed", "j", "lambda", "term", "average", "multiplicity", "centered"],
        terms,
    )?;
    run.write_csv("medians.csv", &["n", "median_variance"], medians)
}

#[derive(Serialize)]
struct ComparisonRow {
    function: &'static str,
    center: Option<f64>,
    width: Option<f64>,
    finite: f64,
    tree: f64,
    stderr: f64,
    difference: f64,
    bound: f64,
}

pub fn bs_check(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let c = &cfg.bs_check;
    if c.degree < 3 || !(c.width > 0.0) || c.density_range.0 >= c.density_range.1 {
        return Err(CliError::Config(format!("invalid bs_check section {c:?}")));
    }
    let q = c.degree - 1;
    let ens = EnsembleConfig::regular(c.n, c.degree, cfg.seed).with_disorder(c.disorder, c.base.clone());
    let g = random_regular(&ens)?;
    let w = sample_potential::<f64>(&g, &ens);
    let es = eigensystem(&g, &w, DEFAULT_RESIDUAL_TOL)?;
    run.stage("eigensolve");
    let em = EmpiricalMeasure::from_eigenvalues(&es, 0.0);
    run.write_csv("histogram.csv", &["value", "weight"], &histogram(&em.points, c.bins))?;

    let mut rows = vec![ComparisonRow {
        function: "constant",
        center: None,
        width: None,
        finite: em.expectation(|_| 1.0),
        tree: 1.0,
        stderr: 0.0,
        difference: 0.0,
        bound: c.tolerance,
    }];
    rows[0].difference = (rows[0].finite - rows[0].tree).abs();
    let gaussians: Vec<TestFunction> = c
        .centers
        .iter()
        .map(|&center| TestFunction::Gaussian { center, width: c.width })
        .collect();
    let (lo, hi) = c.density_range;
    let mut summary = json!({});
    if c.disorder == 0.0 {
        let ks = ks_distance(&em, |x| kesten_mckay_cdf(q, x));
        summary["ks_distance"] = json!(ks);
        run.at_most("KS distance to Kesten-McKay", ks, c.ks_bound);
        let steps = ((hi - lo) / c.grid_step).ceil() as usize;
        let dens: Vec<(f64, f64, f64)> = (0..=steps)
            .map(|i| {
                let x = lo + i as f64 * c.grid_step;
                (x, kesten_mckay_density(q, x), 0.0)
            })
            .collect();
        run.write_csv("density.csv", &["lambda", "density", "stderr"], &dens)?;
        for f in &gaussians {
            rows.push(comparison(f, em.expectation(|x| f.eval(x)), kesten_mckay_expectation(q, |x| f.eval(x)), 0.0, c.tolerance));
        }
    } else {
        let pop = PopulationConfig {
            pool: c.pool,
            shards: c.shards,
            grid_step: c.grid_step,
            ..PopulationConfig::new(q, c.disorder, c.base.clone(), cfg.seed)
        };
        let dens = population_density(&pop, lo, hi)?;
        let curve: Vec<(f64, f64, f64)> = (0..dens.grid.len())
            .map(|i| (dens.grid[i], dens.mean[i], dens.stderr[i]))
            .collect();
        run.write_csv("density.csv", &["lambda", "density", "stderr"], &curve)?;
        summary["population_eta"] = json!(dens.eta);
        for f in &gaussians {
            let (tree, se) = integrate_deconvolved(f, &dens)?;
            rows.push(comparison(f, em.expectation(|x| f.eval(x)), tree, se, c.tolerance));
        }
    }
    run.stage("tree side");
    for r in &rows {
        let name = match r.center {
            Some(x) => format!("smoothed indicator at {x:+}"),
            None => "constant test function".to_string(),
        };
        run.at_most(&name, r.difference, r.bound);
    }
    run.write_csv(
        "comparison.csv",
        &["function", "center", "width", "finite", "tree", "stderr", "difference", "bound"],
        &rows,
    )?;

    let zf = continuation_solve(&g, &w, c.phi_lambda, c.phi_eta, 1e-12)?;
    let mut phis = Vec::new();
    for &k in &c.phi_lengths {
        let h = phi_histogram(&zf, k, |x| x)?;
        run.write_csv(&format!("phi_k{k}.csv"), &["value", "weight"], &histogram(&h.samples, c.bins))?;
        phis.push(json!({ "k": k, "mean": h.value, "paths": h.samples.len() }));
    }
    run.stage("phi histograms");
    summary["phi"] = json!(phis);
    run.manifest.seeds = vec![cfg.seed];
    run.manifest.tolerances = json!({ "ks": c.ks_bound, "comparison": c.tolerance, "width": c.width });
    run.manifest.summary = summary;
    Ok(())
}

fn comparison(f: &TestFunction, finite: f64, tree: f64, se: f64, tol: f64) -> ComparisonRow {
    let (center, width) = match *f {
        TestFunction::Gaussian { center, width } => (Some(center), Some(width)),
        _ => (None, None),
    };
    ComparisonRow {
        function: "gaussian",
        center,
        width,
        finite,
        tree,
        stderr: se,
        difference: (finite - tree).abs(),
        bound: tol.max(3.0 * se),
    }
}
