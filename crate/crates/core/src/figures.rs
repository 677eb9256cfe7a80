//! Data tables behind the published figures.
//!
//! Figures 1-5 use a Barabási-Albert network (`k = 3`), figures 6-10 a
//! Watts-Strogatz network (`k = 3`, `p = 0.1`), both at the requested size:
//!
//! | figure  | content                                    | tables                                      |
//! |---------|--------------------------------------------|---------------------------------------------|
//! | 1, 6    | pure Case A diffusion                      | `figNN.csv`                                 |
//! | 2, 7    | Case A + logistic, s = 1                   | `figNN_concentration.csv`, `figNN_difference.csv` |
//! | 3, 8    | Case A + Gierer-Meinhardt, s = 1           | `figNN_<rates>_u.csv`, `figNN_<rates>_v.csv` |
//! | 4, 9    | Case B (rescaled) + Gierer-Meinhardt, s = 1 | as above                                   |
//! | 5, 10   | dispersion relations                       | `figNN_CaseA[_<rates>].csv`, `figNN_CaseB[_<rates>].csv` |
//!
//! Gierer-Meinhardt tables come in two rate assignments: `stated_rates`
//! (`alpha_u = 1`, `alpha_v = 1/256`) and `exchanged_rates`
//! (`alpha_u = 1/256`, `alpha_v = 1`). Only the second admits a Turing
//! window for these kinetics. Pattern tables are sorted by degree and then
//! concentration. `summary.json` collects the scalar results.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analysis::{dispersion_relation, linear_pattern_predictor, log_grid, DispersionOptions};
use crate::dynamics::{
    integrate, perturbed_initial_state, uniform_initial_state, IntegratorConfig, ReactionDiffusion, Termination,
};
use crate::error::{Error, Result};
use crate::experiment::{degree_order, fmt};
use crate::kinetics::{gierer_meinhardt, logistic, GmParams, NoReaction, ReactionModel};
use crate::laplacian::{build_case_a, build_case_b, case_b_rescaled_rates, LaplacianMatrix};
use crate::network::{generate_ba, generate_ws, Network};

/// Sweep range for the dispersion figures. Sparse small-world graphs have a
/// small spectral gap, which pushes the upper end of their window past `1e2`.
const DISPERSION_RANGE: (f64, f64) = (1e-4, 1e4);
const DISPERSION_POINTS: usize = 300;

#[derive(Debug, Clone)]
pub struct FigureOptions {
    pub size: usize,
    pub out_dir: PathBuf,
    pub network_seed: u64,
    pub initial_seed: u64,
    /// Relative perturbation of the reaction steady state.
    pub amplitude: f64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { size: 50, out_dir: PathBuf::from("figures"), network_seed: 1, initial_seed: 1, amplitude: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Topology {
    Ba,
    Ws,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rates {
    Stated,
    Exchanged,
}

impl Rates {
    fn label(self) -> &'static str {
        match self {
            Rates::Stated => "stated_rates",
            Rates::Exchanged => "exchanged_rates",
        }
    }

    /// `(alpha_u, alpha_v)` before any Case B rescaling.
    fn base(self) -> (f64, f64) {
        match self {
            Rates::Stated => (1.0, 1.0 / 256.0),
            Rates::Exchanged => (1.0 / 256.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Case {
    A,
    B,
}

impl Case {
    fn label(self) -> &'static str {
        match self {
            Case::A => "CaseA",
            Case::B => "CaseB",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Diffusion,
    Logistic,
    Gm(Case, Rates),
    Dispersion(Case, Rates),
}

struct Table {
    name: String,
    contents: String,
}

struct Product {
    tables: Vec<Table>,
    summary: (String, Value),
}

fn gm_rates(network: &Network, case: Case, rates: Rates) -> Result<Vec<f64>> {
    let (u, v) = rates.base();
    Ok(match case {
        Case::A => vec![u, v],
        Case::B => {
            let (u, v) = case_b_rescaled_rates(network, u, v)?;
            vec![u, v]
        }
    })
}

fn laplacian(network: &Network, case: Case) -> Result<LaplacianMatrix> {
    match case {
        Case::A => build_case_a(network, 1.0),
        Case::B => build_case_b(network, 1.0),
    }
}

fn column_table(network: &Network, header: &str, values: &[f64], extra: Option<f64>) -> String {
    let mut out = format!("vertex,degree,{header}");
    if extra.is_some() {
        out.push_str(",steady_state");
    }
    out.push('\n');
    for j in degree_order(network, values) {
        let _ = write!(out, "{j},{},{}", network.degree(j), fmt(values[j]));
        if let Some(x) = extra {
            let _ = write!(out, ",{}", fmt(x));
        }
        out.push('\n');
    }
    out
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn run_job(fig: usize, job: Job, network: &Network, options: &FigureOptions) -> Result<Product> {
    let n = network.vertex_count();
    let name = |suffix: &str| format!("fig{fig:02}{suffix}.csv");
    let config = IntegratorConfig::default();
    match job {
        Job::Diffusion => {
            let l = build_case_a(network, 1.0)?;
            let model = NoReaction::new(1);
            let system = ReactionDiffusion::new(&l, &[1.0], &model, 1.0)?;
            let traj = integrate(&system, &uniform_initial_state(1, n, options.initial_seed), &config)?;
            let x = &traj.final_state.values;
            Ok(Product {
                tables: vec![Table { name: name(""), contents: column_table(network, "concentration", x, None) }],
                summary: (
                    format!("fig{fig:02}"),
                    json!({ "termination": traj.termination, "t_final": traj.final_state.t, "mean": mean(x) }),
                ),
            })
        }
        Job::Logistic => {
            let l = build_case_a(network, 1.0)?;
            let model = logistic(1.0)?;
            let system = ReactionDiffusion::new(&l, &[1.0], &model, 1.0)?;
            let init = perturbed_initial_state(&model, network, options.amplitude, options.initial_seed)?;
            let traj = integrate(&system, &init, &config)?;
            let x = &traj.final_state.values;
            let predicted = linear_pattern_predictor(&l, &model, &[1.0], 1.0)?.pattern;
            let diff: Vec<f64> = predicted.iter().zip(x).map(|(p, s)| p - s).collect();
            // The difference panel follows the concentration panel's ordering.
            let mut difference = String::from("vertex,degree,difference\n");
            for j in degree_order(network, x) {
                let _ = writeln!(difference, "{j},{},{}", network.degree(j), fmt(diff[j]));
            }
            Ok(Product {
                tables: vec![
                    Table { name: name("_concentration"), contents: column_table(network, "concentration", x, Some(1.0)) },
                    Table { name: name("_difference"), contents: difference },
                ],
                summary: (
                    format!("fig{fig:02}"),
                    json!({
                        "termination": traj.termination,
                        "mean": mean(x),
                        "max_abs_difference": diff.iter().fold(0.0_f64, |m, d| m.max(d.abs())),
                    }),
                ),
            })
        }
        Job::Gm(case, rates) => {
            let l = laplacian(network, case)?;
            let model = gierer_meinhardt(GmParams::standard())?;
            let r = gm_rates(network, case, rates)?;
            let system = ReactionDiffusion::new(&l, &r, &model, 1.0)?;
            let init = perturbed_initial_state(&model, network, options.amplitude, options.initial_seed)?;
            let traj = integrate(&system, &init, &config)?;
            let x = &traj.final_state.values;
            let star = model.steady_state();
            let (u, v) = x.split_at(n);
            let label = rates.label();
            Ok(Product {
                tables: vec![
                    Table { name: name(&format!("_{label}_u")), contents: column_table(network, "concentration", u, Some(star[0])) },
                    Table { name: name(&format!("_{label}_v")), contents: column_table(network, "concentration", v, Some(star[1])) },
                ],
                summary: (
                    format!("fig{fig:02}_{label}"),
                    json!({
                        "rates": r,
                        "termination": traj.termination,
                        "t_final": traj.final_state.t,
                        "mean_u_over_steady": mean(u) / star[0],
                        "mean_v_over_steady": mean(v) / star[1],
                    }),
                ),
            })
        }
        Job::Dispersion(case, rates) => {
            let l = laplacian(network, case)?;
            let model = gierer_meinhardt(GmParams::standard())?;
            let r = gm_rates(network, case, rates)?;
            let curve = dispersion_relation(&l, &model, &r, &log_grid(DISPERSION_RANGE.0, DISPERSION_RANGE.1, DISPERSION_POINTS), &DispersionOptions::default())?;
            let suffix = match rates {
                Rates::Stated => format!("_{}", case.label()),
                Rates::Exchanged => format!("_{}_{}", case.label(), rates.label()),
            };
            let window = curve.turing_window();
            Ok(Product {
                tables: vec![Table { name: name(&suffix), contents: curve.to_csv() }],
                summary: (
                    format!("fig{fig:02}{suffix}"),
                    json!({
                        "rates": r,
                        "turing_window": window,
                        "window_log_width": window.map(|_| curve.window_log_width()),
                        "max_growth": curve.max_growth(),
                        "crossings": curve.crossings,
                    }),
                ),
            })
        }
    }
}

fn jobs() -> Vec<(usize, Topology, Job)> {
    let mut out = Vec::new();
    for (offset, topo) in [(0, Topology::Ba), (5, Topology::Ws)] {
        out.push((offset + 1, topo, Job::Diffusion));
        out.push((offset + 2, topo, Job::Logistic));
        for rates in [Rates::Stated, Rates::Exchanged] {
            out.push((offset + 3, topo, Job::Gm(Case::A, rates)));
            out.push((offset + 4, topo, Job::Gm(Case::B, rates)));
            out.push((offset + 5, topo, Job::Dispersion(Case::A, rates)));
            out.push((offset + 5, topo, Job::Dispersion(Case::B, rates)));
        }
    }
    out
}

/// Writes every figure table under `options.out_dir` and returns a
/// human-readable report. Any failing table aborts the batch with a summary
/// of all failures.
pub fn reproduce(options: &FigureOptions) -> Result<String> {
    let ba = generate_ba(options.size, 3, options.network_seed)?;
    let ws = generate_ws(options.size, 3, 0.1, options.network_seed)?;
    let results: Vec<(usize, Job, Result<Product>)> = jobs()
        .into_par_iter()
        .map(|(fig, topo, job)| {
            let net = if topo == Topology::Ba { &ba } else { &ws };
            (fig, job, run_job(fig, job, net, options))
        })
        .collect();

    let failures: Vec<String> = results
        .iter()
        .filter_map(|(fig, job, r)| r.as_ref().err().map(|e| format!("fig{fig:02} {job:?}: {e}")))
        .collect();
    if !failures.is_empty() {
        return Err(Error::InvalidParameters(format!("figure batch failed:\n  {}", failures.join("\n  "))));
    }

    fs::create_dir_all(&options.out_dir)?;
    let mut summary = serde_json::Map::new();
    summary.insert("size".into(), json!(options.size));
    summary.insert("network_seed".into(), json!(options.network_seed));
    summary.insert("initial_seed".into(), json!(options.initial_seed));
    let mut report = String::new();
    let mut unsteady = Vec::new();
    for (_, _, product) in results {
        let product = product.expect("failures handled");
        for table in &product.tables {
            fs::write(options.out_dir.join(&table.name), &table.contents)?;
            let _ = writeln!(report, "{}", options.out_dir.join(&table.name).display());
        }
        if product.summary.1.get("termination") == Some(&json!(Termination::Horizon)) {
            unsteady.push(product.summary.0.clone());
        }
        summary.insert(product.summary.0, product.summary.1);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(summary)).expect("json serializes");
    text.push('\n');
    fs::write(options.out_dir.join("summary.json"), text)?;
    let _ = writeln!(report, "{}", options.out_dir.join("summary.json").display());
    for name in unsteady {
        let _ = writeln!(report, "warning: {name} reached the time horizon before a steady state");
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn job_list_covers_ten_figures() {
        let figs: std::collections::BTreeSet<usize> = jobs().iter().map(|j| j.0).collect();
        assert_eq!(figs, (1..=10).collect());
        assert_eq!(jobs().len(), 2 * (2 + 4 * 2));
    }

    #[test]
    fn rate_assignments() {
        assert_eq!(Rates::Stated.base(), (1.0, 1.0 / 256.0));
        assert_eq!(Rates::Exchanged.base(), (1.0 / 256.0, 1.0));
        let net = Network::complete(4).unwrap();
        // Case B rescaling divides by the mean degree, 3.
        let r = gm_rates(&net, Case::B, Rates::Stated).unwrap();
        assert!((r[0] - 1.0 / 3.0).abs() < 1e-15 && (r[1] - 1.0 / 768.0).abs() < 1e-15);
    }
}
