//! Runs a validated [`ExperimentConfig`] and writes its artifacts.
//!
//! Every run writes `network.txt` and `manifest.json` into the output
//! directory. Depending on the kind it adds:
//!
//! | kind            | files                                             |
//! |-----------------|---------------------------------------------------|
//! | `diffuse`       | `pattern.csv`, `summary.json`                     |
//! | `react-diffuse` | `pattern.csv`, `summary.json`                     |
//! | `dispersion`    | `dispersion.csv`, `dispersion.json`, `stability.json` |
//! | `predict`       | `pattern.csv`, `prediction.csv`, `summary.json`   |
//! | `classify`      | `pattern.csv`, `classification.json`              |
//!
//! Integrating kinds also write `trajectory.csv` when a snapshot interval
//! is configured. Floating-point values carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    classify_pattern, degree_class_bimodality, dispersion_relation, linear_pattern_predictor, log_grid,
    stability_report, zero_mode,
};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::dynamics::{
    integrate, perturbed_initial_state, uniform_initial_state, ReactionDiffusion, SystemState, Trajectory,
};
use crate::error::{Error, Result};
use crate::kinetics::ReactionModel;
use crate::network::{write_edge_list, Network};

/// Lossless decimal form of a double.
pub fn fmt(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn species_label(species: usize, count: usize) -> String {
    match (count, species) {
        (1, 0) => "u".into(),
        (2, 0) => "u".into(),
        (2, 1) => "v".into(),
        _ => format!("x{species}"),
    }
}

/// Vertices of one species ordered by degree, then value, then index.
pub fn degree_order(network: &Network, values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..network.vertex_count()).collect();
    order.sort_by(|&a, &b| {
        network.degree(a).cmp(&network.degree(b)).then(values[a].total_cmp(&values[b])).then(a.cmp(&b))
    });
    order
}

/// `vertex,degree,species,value`, species-major, each block sorted by
/// degree and then value.
pub fn pattern_csv(network: &Network, values: &[f64]) -> String {
    let n = network.vertex_count();
    let m = values.len() / n;
    let mut out = String::from("vertex,degree,species,value\n");
    for (a, block) in values.chunks(n).enumerate() {
        for j in degree_order(network, block) {
            let _ = writeln!(out, "{j},{},{},{}", network.degree(j), species_label(a, m), fmt(block[j]));
        }
    }
    out
}

/// `vertex,degree,species,predicted,simulated,difference` with
/// `difference = predicted - simulated`.
pub fn prediction_csv(network: &Network, predicted: &[f64], simulated: &[f64]) -> String {
    let n = network.vertex_count();
    let m = simulated.len() / n;
    let mut out = String::from("vertex,degree,species,predicted,simulated,difference\n");
    for a in 0..m {
        let span = a * n..(a + 1) * n;
        let (p, s) = (&predicted[span.clone()], &simulated[span]);
        for j in degree_order(network, s) {
            let _ = writeln!(
                out,
                "{j},{},{},{},{},{}",
                network.degree(j),
                species_label(a, m),
                fmt(p[j]),
                fmt(s[j]),
                fmt(p[j] - s[j])
            );
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub kind: ExperimentKind,
    pub output_dir: PathBuf,
    pub files: Vec<String>,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s
}

fn means(values: &[f64], n: usize) -> Vec<f64> {
    values.chunks(n).map(|c| c.iter().sum::<f64>() / n as f64).collect()
}

fn initial_state(config: &ExperimentConfig, model: &dyn ReactionModel, network: &Network) -> Result<SystemState> {
    let i = &config.initial;
    if i.distribution == "uniform" {
        Ok(uniform_initial_state(model.species_count(), network.vertex_count(), i.seed))
    } else {
        perturbed_initial_state(model, network, i.amplitude, i.seed)
    }
}

fn trajectory_json(traj: &Trajectory, system: &ReactionDiffusion<'_>, n: usize) -> serde_json::Value {
    json!({
        "termination": traj.termination,
        "t_final": traj.final_state.t,
        "residual": traj.final_residual,
        "accepted_steps": traj.accepted_steps,
        "rejected_steps": traj.rejected_steps,
        "s": system.s(),
        "mean": means(&traj.final_state.values, n),
        "reaction_steady_state": system.model().steady_state(),
    })
}

/// Executes `config`, writing artifacts under `config.output_dir`.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let kind = config.experiment_kind();
    let network = config.network()?;
    network.require_positive_degrees()?;
    let model = config.model()?;
    let (laplacian, rates) = config.transport(&network)?;
    let n = network.vertex_count();
    let s = config.s;

    let mut out = Outputs::new(&config.output_dir)?;
    out.write("network.txt", &write_edge_list(&network))?;

    let integrated = |out: &mut Outputs| -> Result<(Trajectory, ReactionDiffusion<'_>)> {
        let system = ReactionDiffusion::new(&laplacian, &rates, model.as_ref(), s)?;
        let init = initial_state(config, model.as_ref(), &network)?;
        let traj = integrate(&system, &init, &config.integrator_config()?)?;
        if config.integrator.snapshot_interval.is_some() {
            out.write("trajectory.csv", &traj.snapshots_csv(n))?;
        }
        out.write("pattern.csv", &pattern_csv(&network, &traj.final_state.values))?;
        Ok((traj, system))
    };

    match kind {
        ExperimentKind::Diffuse | ExperimentKind::ReactDiffuse => {
            let (traj, system) = integrated(&mut out)?;
            let mut summary = trajectory_json(&traj, &system, n);
            if kind == ExperimentKind::Diffuse && network.is_connected() {
                // Distance to the mass-matched zero mode, per species.
                let z = zero_mode(&laplacian)?;
                let errors: Vec<f64> = traj
                    .final_state
                    .values
                    .chunks(n)
                    .map(|x| {
                        let mass: f64 = x.iter().sum();
                        let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                        x.iter().zip(&z).fold(0.0_f64, |m, (a, b)| m.max((a - mass * b).abs())) / scale
                    })
                    .collect();
                summary["zero_mode_relative_error"] = json!(errors);
            }
            out.write("summary.json", &json_text(&summary))?;
        }
        ExperimentKind::Dispersion => {
            let grid = log_grid(config.dispersion.s_min, config.dispersion.s_max, config.dispersion.points);
            let curve = dispersion_relation(&laplacian, model.as_ref(), &rates, &grid, &config.dispersion_options()?)?;
            out.write("dispersion.csv", &curve.to_csv())?;
            let window = curve.turing_window();
            let doc = json!({
                "reaction_stable": curve.reaction_stable,
                "turing_window": window,
                "window_log_width": window.map(|_| curve.window_log_width()),
                "max_growth": curve.max_growth(),
                "crossings": curve.crossings,
                "rates": rates,
            });
            out.write("dispersion.json", &json_text(&doc))?;
            let mut report = stability_report(&laplacian, model.as_ref(), &rates, s, true)?.to_json();
            report.push('\n');
            out.write("stability.json", &report)?;
        }
        ExperimentKind::Predict => {
            let prediction = linear_pattern_predictor(&laplacian, model.as_ref(), &rates, s)?;
            let (traj, system) = integrated(&mut out)?;
            let sim = &traj.final_state.values;
            out.write("prediction.csv", &prediction_csv(&network, &prediction.pattern, sim))?;
            let mut summary = trajectory_json(&traj, &system, n);
            let worst = prediction.pattern.iter().zip(sim).fold(0.0_f64, |m, (p, x)| m.max((p - x).abs()));
            summary["max_abs_prediction_error"] = json!(worst);
            summary["condition"] = json!(prediction.condition);
            out.write("summary.json", &json_text(&summary))?;
        }
        ExperimentKind::Classify => {
            let (traj, _) = integrated(&mut out)?;
            let x = &traj.final_state.values;
            let classification =
                classify_pattern(x, &laplacian, model.as_ref(), &rates, s, &config.classifier_options())?;
            let kmin = network.min_degree();
            let bimodality: Vec<_> = x
                .chunks(n)
                .map(|block| degree_class_bimodality(block, &network, kmin).ok())
                .collect();
            let doc = json!({
                "classification": classification,
                "min_degree": kmin,
                "min_degree_class_split": bimodality,
                "mean": means(x, n),
                "reaction_steady_state": model.steady_state(),
            });
            out.write("classification.json", &json_text(&doc))?;
        }
    }

    let manifest = json!({
        "program": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "kind": kind,
        "seeds": {
            "network": config.network.seed,
            "initial": config.initial.seed,
        },
        "outputs": out.files,
        "config": config.to_toml(),
    });
    out.write("manifest.json", &json_text(&manifest))?;
    Ok(RunSummary { kind, output_dir: out.dir, files: out.files })
}

/// Loads, validates and runs the config at `path`.
pub fn run_file(path: impl AsRef<Path>) -> Result<RunSummary> {
    run(&ExperimentConfig::load(path)?)
}

/// Whether an error stems from the configuration rather than the computation.
pub fn is_config_error(err: &Error) -> bool {
    matches!(err, Error::Config { .. })
}
