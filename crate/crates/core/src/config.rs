//! Experiment configuration files.
//!
//! A config is a TOML document:
//!
//! ```toml
//! kind = "react-diffuse"   # diffuse | react-diffuse | dispersion | predict | classify
//! output_dir = "out"       # relative to the config file
//! s = 1.0
//!
//! [network]
//! generator = "ba"         # ba | ws | ring | complete | star | path
//! vertices = 500
//! k = 3
//! seed = 1
//! # edge_list = "net.txt"  # instead of a generator
//!
//! [laplacian]
//! variant = "case-a"       # case-a | case-b
//! alpha_u = 1.0
//! alpha_v = 0.00390625
//! rescale = false          # case-b: multiply rates by J / sum(k)
//!
//! [kinetics]
//! name = "gierer-meinhardt"   # logistic | gierer-meinhardt | linear | none
//!
//! [integrator]
//! method = "rk45"
//! t_max = 1e5
//!
//! [initial]
//! distribution = "perturbed"  # perturbed | uniform
//! amplitude = 0.01
//! seed = 2
//! ```
//!
//! Every section is optional and unknown keys are rejected. Validation
//! errors name the offending field as `section.key`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{ClassifierOptions, DispersionOptions, SweepStrategy};
use crate::dynamics::{IntegratorConfig, Method};
use crate::error::{Error, Result};
use crate::kinetics::{gierer_meinhardt, linear_decay, logistic, GmParams, NoReaction, ReactionModel};
use crate::laplacian::{build_case_a, build_case_b, case_b_rescaled_rates, LaplacianMatrix};
use crate::network::{generate, load_edge_list, GeneratorConfig, Network, Variant};

fn config_error<T>(field: &str, message: impl Into<String>) -> Result<T> {
    Err(Error::Config { field: field.to_string(), message: message.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Diffuse,
    ReactDiffuse,
    Dispersion,
    Predict,
    Classify,
}

impl ExperimentKind {
    pub const NAMES: [&'static str; 5] = ["diffuse", "react-diffuse", "dispersion", "predict", "classify"];

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "diffuse" => Self::Diffuse,
            "react-diffuse" => Self::ReactDiffuse,
            "dispersion" => Self::Dispersion,
            "predict" => Self::Predict,
            "classify" => Self::Classify,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_list: Option<PathBuf>,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self { generator: Some("ba".into()), vertices: Some(50), k: Some(3), p: None, seed: Some(1), edge_list: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplacianSection {
    #[serde(default = "LaplacianSection::default_variant")]
    pub variant: String,
    #[serde(default = "one")]
    pub alpha_u: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_v: Option<f64>,
    #[serde(default)]
    pub rescale: bool,
}

fn one() -> f64 {
    1.0
}

impl LaplacianSection {
    fn default_variant() -> String {
        "case-a".into()
    }
}

impl Default for LaplacianSection {
    fn default() -> Self {
        Self { variant: Self::default_variant(), alpha_u: 1.0, alpha_v: None, rescale: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticsSection {
    #[serde(default = "KineticsSection::default_name")]
    pub name: String,
    /// Logistic growth rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Linear kinetics `f = a - b u`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_d: Option<f64>,
    /// Species count for `none`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species: Option<usize>,
}

impl KineticsSection {
    pub const NAMES: [&'static str; 4] = ["logistic", "gierer-meinhardt", "linear", "none"];

    fn default_name() -> String {
        "none".into()
    }
}

impl Default for KineticsSection {
    fn default() -> Self {
        Self {
            name: Self::default_name(),
            r: None,
            a: None,
            b: None,
            c: None,
            rho: None,
            rho0: None,
            mu: None,
            nu: None,
            c_d: None,
            species: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default = "IntegratorSection::default_method")]
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_initial: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    #[serde(default = "IntegratorSection::default_t_max")]
    pub t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_tol: Option<f64>,
    #[serde(default = "yes")]
    pub stop_at_steady: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_interval: Option<f64>,
    #[serde(default = "IntegratorSection::default_max_steps")]
    pub max_steps: usize,
}

fn yes() -> bool {
    true
}

impl IntegratorSection {
    fn default_method() -> String {
        "rk45".into()
    }

    fn default_t_max() -> f64 {
        IntegratorConfig::default().t_max
    }

    fn default_max_steps() -> usize {
        IntegratorConfig::default().max_steps
    }
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            method: Self::default_method(),
            dt: None,
            rtol: None,
            atol: None,
            dt_initial: None,
            dt_min: None,
            dt_max: None,
            t_max: Self::default_t_max(),
            steady_tol: None,
            stop_at_steady: true,
            snapshot_interval: None,
            max_steps: Self::default_max_steps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default = "InitialSection::default_distribution")]
    pub distribution: String,
    #[serde(default = "InitialSection::default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
}

impl InitialSection {
    fn default_distribution() -> String {
        "perturbed".into()
    }

    fn default_amplitude() -> f64 {
        0.01
    }
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { distribution: Self::default_distribution(), amplitude: 0.01, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    #[serde(default = "DispersionSection::default_min")]
    pub s_min: f64,
    #[serde(default = "DispersionSection::default_max")]
    pub s_max: f64,
    #[serde(default = "DispersionSection::default_points")]
    pub points: usize,
    #[serde(default = "DispersionSection::default_strategy")]
    pub strategy: String,
}

impl DispersionSection {
    fn default_min() -> f64 {
        1e-4
    }

    fn default_max() -> f64 {
        1e2
    }

    fn default_points() -> usize {
        200
    }

    fn default_strategy() -> String {
        "auto".into()
    }
}

impl Default for DispersionSection {
    fn default() -> Self {
        Self { s_min: 1e-4, s_max: 1e2, points: 200, strategy: Self::default_strategy() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSection {
    #[serde(default = "ClassifierSection::default_homogeneous")]
    pub homogeneous_tol: f64,
    #[serde(default = "ClassifierSection::default_deviation")]
    pub predictor_deviation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_tol: Option<f64>,
}

impl ClassifierSection {
    fn default_homogeneous() -> f64 {
        ClassifierOptions::default().homogeneous_tol
    }

    fn default_deviation() -> f64 {
        ClassifierOptions::default().predictor_deviation
    }
}

impl Default for ClassifierSection {
    fn default() -> Self {
        Self { homogeneous_tol: Self::default_homogeneous(), predictor_deviation: Self::default_deviation(), steady_tol: None }
    }
}

/// A full experiment description as read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: String,
    #[serde(default = "ExperimentConfig::default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "one")]
    pub s: f64,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub laplacian: LaplacianSection,
    #[serde(default)]
    pub kinetics: KineticsSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub dispersion: DispersionSection,
    #[serde(default)]
    pub classifier: ClassifierSection,
}

impl ExperimentConfig {
    fn default_output() -> PathBuf {
        PathBuf::from("output")
    }

    /// Parses and validates. Relative paths are resolved against `base`.
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let mut config: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = e.message().split('`').nth(1).filter(|_| e.message().contains("missing field"));
            Error::Config { field: field.unwrap_or("<document>").to_string(), message: e.to_string().trim().to_string() }
        })?;
        if config.output_dir.is_relative() {
            config.output_dir = base.join(&config.output_dir);
        }
        if let Some(path) = &config.network.edge_list {
            if path.is_relative() {
                config.network.edge_list = Some(base.join(path));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { field: "<file>".into(), message: format!("{}: {e}", path.display()) })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, &base)
    }

    /// TOML with every default made explicit; loading it reproduces `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.normalized()).expect("config serializes")
    }

    /// Fills in the defaults that depend on other fields.
    pub fn normalized(&self) -> Self {
        let mut c = self.clone();
        match c.kinetics.name.as_str() {
            "logistic" => {
                c.kinetics.r.get_or_insert(1.0);
            }
            "linear" => {
                c.kinetics.a.get_or_insert(1.0);
                c.kinetics.b.get_or_insert(1.0);
            }
            "gierer-meinhardt" => {
                let gm = GmParams::standard();
                c.kinetics.c.get_or_insert(gm.c);
                c.kinetics.rho.get_or_insert(gm.rho);
                c.kinetics.rho0.get_or_insert(gm.rho0);
                c.kinetics.mu.get_or_insert(gm.mu);
                c.kinetics.nu.get_or_insert(gm.nu);
                c.kinetics.c_d.get_or_insert(gm.c_d);
            }
            _ => {
                c.kinetics.species.get_or_insert(1);
            }
        }
        if c.species_count() == 2 {
            c.laplacian.alpha_v.get_or_insert(c.laplacian.alpha_u / 256.0);
        }
        match Method::default() {
            Method::Rk45 { rtol, atol, dt_initial, dt_min, dt_max } if c.integrator.method == "rk45" => {
                c.integrator.rtol.get_or_insert(rtol);
                c.integrator.atol.get_or_insert(atol);
                c.integrator.dt_initial.get_or_insert(dt_initial);
                c.integrator.dt_min.get_or_insert(dt_min);
                c.integrator.dt_max.get_or_insert(dt_max);
            }
            _ => {
                c.integrator.dt.get_or_insert(0.01);
            }
        }
        if c.network.edge_list.is_none() && c.network.generator.as_deref() == Some("ws") {
            c.network.p.get_or_insert(0.1);
        }
        c
    }

    pub fn experiment_kind(&self) -> ExperimentKind {
        ExperimentKind::parse(&self.kind).expect("validated")
    }

    pub fn species_count(&self) -> usize {
        match self.kinetics.name.as_str() {
            "gierer-meinhardt" => 2,
            "none" => self.kinetics.species.unwrap_or(1),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = match ExperimentKind::parse(&self.kind) {
            Some(k) => k,
            None => return config_error("kind", format!("unknown kind {:?}, expected one of {:?}", self.kind, ExperimentKind::NAMES)),
        };
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return config_error("s", format!("must be finite and >= 0, got {}", self.s));
        }
        self.validate_network()?;
        self.validate_laplacian()?;
        self.validate_kinetics()?;
        if kind == ExperimentKind::Diffuse && self.kinetics.name != "none" {
            return config_error("kinetics.name", "diffuse experiments take kinetics \"none\"");
        }
        self.integrator_config().map_err(|e| match e {
            Error::InvalidParameters(m) => Error::Config { field: "integrator".into(), message: m },
            other => other,
        })?;
        match self.initial.distribution.as_str() {
            "perturbed" | "uniform" => {}
            other => return config_error("initial.distribution", format!("unknown distribution {other:?}, expected \"perturbed\" or \"uniform\"")),
        }
        if !(0.0..=0.1).contains(&self.initial.amplitude) {
            return config_error("initial.amplitude", format!("must lie in [0, 0.1], got {}", self.initial.amplitude));
        }
        let d = &self.dispersion;
        if !(d.s_min > 0.0 && d.s_min < d.s_max && d.s_max.is_finite()) {
            return config_error("dispersion.s_min", format!("need 0 < s_min < s_max < inf, got [{}, {}]", d.s_min, d.s_max));
        }
        if d.points < 2 {
            return config_error("dispersion.points", format!("need at least 2 points, got {}", d.points));
        }
        self.sweep_strategy()?;
        let c = &self.classifier;
        if !(c.homogeneous_tol > 0.0) {
            return config_error("classifier.homogeneous_tol", "must be positive");
        }
        if !(c.predictor_deviation > 0.0) {
            return config_error("classifier.predictor_deviation", "must be positive");
        }
        if let Some(t) = c.steady_tol {
            if !(t > 0.0) {
                return config_error("classifier.steady_tol", "must be positive");
            }
        }
        Ok(())
    }

    fn validate_network(&self) -> Result<()> {
        let n = &self.network;
        if let Some(path) = &n.edge_list {
            if n.generator.is_some() {
                return config_error("network.edge_list", "give either a generator or an edge list, not both");
            }
            if !path.is_file() {
                return config_error("network.edge_list", format!("file {} does not exist", path.display()));
            }
            return Ok(());
        }
        let Some(name) = &n.generator else {
            return config_error("network.generator", "missing: give a generator or an edge list");
        };
        let variant = match parse_variant(name) {
            Some(v) => v,
            None => {
                return config_error(
                    "network.generator",
                    format!("unknown generator {name:?}, expected one of ba, ws, ring, complete, star, path"),
                )
            }
        };
        let Some(vertices) = n.vertices else { return config_error("network.vertices", "missing") };
        let k = n.k.unwrap_or(0);
        match variant {
            Variant::Ba if k == 0 || vertices <= k => {
                return config_error("network.k", format!("need 1 <= k < vertices, got k = {k}, vertices = {vertices}"))
            }
            Variant::Ws => {
                if k == 0 || vertices <= k {
                    return config_error("network.k", format!("need 1 <= k < vertices, got k = {k}, vertices = {vertices}"));
                }
                let p = n.p.unwrap_or(0.1);
                if !(0.0..=1.0).contains(&p) {
                    return config_error("network.p", format!("must lie in [0, 1], got {p}"));
                }
            }
            Variant::Ring if vertices < 3 => return config_error("network.vertices", "a ring needs at least 3 vertices"),
            _ if vertices < 2 => return config_error("network.vertices", "need at least 2 vertices"),
            _ => {}
        }
        Ok(())
    }

    fn validate_laplacian(&self) -> Result<()> {
        let l = &self.laplacian;
        if l.variant != "case-a" && l.variant != "case-b" {
            return config_error("laplacian.variant", format!("unknown variant {:?}, expected \"case-a\" or \"case-b\"", l.variant));
        }
        if !(l.alpha_u > 0.0 && l.alpha_u.is_finite()) {
            return config_error("laplacian.alpha_u", format!("must be positive, got {}", l.alpha_u));
        }
        if let Some(av) = l.alpha_v {
            if !(av > 0.0 && av.is_finite()) {
                return config_error("laplacian.alpha_v", format!("must be positive, got {av}"));
            }
        }
        if l.rescale && l.variant != "case-b" {
            return config_error("laplacian.rescale", "rescaling applies to case-b only");
        }
        Ok(())
    }

    fn validate_kinetics(&self) -> Result<()> {
        let k = &self.kinetics;
        if !KineticsSection::NAMES.contains(&k.name.as_str()) {
            return config_error("kinetics.name", format!("unknown kinetics {:?}, expected one of {:?}", k.name, KineticsSection::NAMES));
        }
        let allowed: &[&str] = match k.name.as_str() {
            "logistic" => &["r"],
            "linear" => &["a", "b"],
            "gierer-meinhardt" => &["c", "rho", "rho0", "mu", "nu", "c_d"],
            _ => &["species"],
        };
        let given = [
            ("r", k.r.is_some()),
            ("a", k.a.is_some()),
            ("b", k.b.is_some()),
            ("c", k.c.is_some()),
            ("rho", k.rho.is_some()),
            ("rho0", k.rho0.is_some()),
            ("mu", k.mu.is_some()),
            ("nu", k.nu.is_some()),
            ("c_d", k.c_d.is_some()),
            ("species", k.species.is_some()),
        ];
        for (key, present) in given {
            if present && !allowed.contains(&key) {
                return config_error(&format!("kinetics.{key}"), format!("not a parameter of {:?}", k.name));
            }
        }
        if k.species == Some(0) {
            return config_error("kinetics.species", "must be at least 1");
        }
        self.model().map_err(|e| match e {
            Error::InvalidParameters(m) => {
                let key = m.split_whitespace().next().unwrap_or("").to_string();
                Error::Config { field: format!("kinetics.{key}"), message: m }
            }
            other => other,
        })?;
        Ok(())
    }

    pub fn sweep_strategy(&self) -> Result<SweepStrategy> {
        match self.dispersion.strategy.as_str() {
            "auto" => Ok(SweepStrategy::Auto),
            "full" => Ok(SweepStrategy::Full),
            "modal" => Ok(SweepStrategy::Modal),
            other => config_error("dispersion.strategy", format!("unknown strategy {other:?}, expected auto, full or modal")),
        }
    }

    pub fn dispersion_options(&self) -> Result<DispersionOptions> {
        Ok(DispersionOptions { strategy: self.sweep_strategy()?, ..Default::default() })
    }

    pub fn classifier_options(&self) -> ClassifierOptions {
        ClassifierOptions {
            homogeneous_tol: self.classifier.homogeneous_tol,
            predictor_deviation: self.classifier.predictor_deviation,
            steady_tol: self.classifier.steady_tol,
        }
    }

    pub fn integrator_config(&self) -> Result<IntegratorConfig> {
        let c = self.normalized();
        let i = &c.integrator;
        let method = match i.method.as_str() {
            "rk45" => Method::Rk45 {
                rtol: i.rtol.unwrap_or_default(),
                atol: i.atol.unwrap_or_default(),
                dt_initial: i.dt_initial.unwrap_or_default(),
                dt_min: i.dt_min.unwrap_or_default(),
                dt_max: i.dt_max.unwrap_or_default(),
            },
            "rk4" => Method::Rk4 { dt: i.dt.unwrap_or_default() },
            other => return config_error("integrator.method", format!("unknown method {other:?}, expected \"rk45\" or \"rk4\"")),
        };
        let config = IntegratorConfig {
            method,
            t_max: i.t_max,
            steady_tol: i.steady_tol,
            stop_at_steady: i.stop_at_steady,
            snapshot_interval: i.snapshot_interval,
            max_steps: i.max_steps,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn network(&self) -> Result<Network> {
        let n = &self.network;
        if let Some(path) = &n.edge_list {
            return load_edge_list(path);
        }
        let generator = GeneratorConfig {
            variant: n.generator.as_deref().and_then(parse_variant).expect("validated"),
            vertices: n.vertices.expect("validated"),
            k: n.k.unwrap_or(0),
            p: n.p.unwrap_or(0.1),
            seed: n.seed.unwrap_or(0),
        };
        generate(&generator)
    }

    pub fn model(&self) -> Result<Box<dyn ReactionModel>> {
        let k = &self.kinetics;
        Ok(match k.name.as_str() {
            "logistic" => Box::new(logistic(k.r.unwrap_or(1.0))?),
            "linear" => Box::new(linear_decay(k.a.unwrap_or(1.0), k.b.unwrap_or(1.0))?),
            "gierer-meinhardt" => {
                let d = GmParams::standard();
                Box::new(gierer_meinhardt(GmParams {
                    c: k.c.unwrap_or(d.c),
                    rho: k.rho.unwrap_or(d.rho),
                    rho0: k.rho0.unwrap_or(d.rho0),
                    mu: k.mu.unwrap_or(d.mu),
                    nu: k.nu.unwrap_or(d.nu),
                    c_d: k.c_d.unwrap_or(d.c_d),
                })?)
            }
            _ => Box::new(NoReaction::new(k.species.unwrap_or(1))),
        })
    }

    /// Unit-rate Laplacian and the per-species rates that multiply it.
    pub fn transport(&self, network: &Network) -> Result<(LaplacianMatrix, Vec<f64>)> {
        let l = &self.laplacian;
        let m = self.species_count();
        let alpha_v = l.alpha_v.unwrap_or(l.alpha_u / 256.0);
        let (laplacian, mut rates) = if l.variant == "case-b" {
            let rates = if l.rescale {
                let (u, v) = case_b_rescaled_rates(network, l.alpha_u, alpha_v)?;
                vec![u, v]
            } else {
                vec![l.alpha_u, alpha_v]
            };
            (build_case_b(network, 1.0)?, rates)
        } else {
            (build_case_a(network, 1.0)?, vec![l.alpha_u, alpha_v])
        };
        // Species beyond the second share the activator's rate.
        rates.resize(m.max(2), rates[0]);
        rates.truncate(m);
        Ok((laplacian, rates))
    }
}

fn parse_variant(name: &str) -> Option<Variant> {
    Some(match name {
        "ba" => Variant::Ba,
        "ws" => Variant::Ws,
        "ring" => Variant::Ring,
        "complete" => Variant::Complete,
        "star" => Variant::Star,
        "path" => Variant::Path,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_toml_str(text, Path::new("/tmp"))
    }

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse("kind = \"diffuse\"").unwrap();
        assert_eq!(c.experiment_kind(), ExperimentKind::Diffuse);
        assert_eq!(c.output_dir, PathBuf::from("/tmp/output"));
        assert_eq!(c.network().unwrap().vertex_count(), 50);
        assert_eq!(c.model().unwrap().name(), "none");
    }

    #[test]
    fn invalid_kinetics_name_names_the_field() {
        let err = parse("kind = \"react-diffuse\"\n[kinetics]\nname = \"brusselator\"\n").unwrap_err();
        assert_eq!(field_of(err), "kinetics.name");
    }

    #[test]
    fn field_paths_for_bad_values() {
        let cases = [
            ("kind = \"sweep\"", "kind"),
            ("kind = \"diffuse\"\n[network]\ngenerator = \"er\"\nvertices = 10", "network.generator"),
            ("kind = \"diffuse\"\n[network]\ngenerator = \"ws\"\nvertices = 10\nk = 2\np = 2.0", "network.p"),
            ("kind = \"diffuse\"\n[laplacian]\nvariant = \"case-c\"", "laplacian.variant"),
            ("kind = \"react-diffuse\"\n[kinetics]\nname = \"logistic\"\nr = -1.0", "kinetics.r"),
            ("kind = \"react-diffuse\"\n[kinetics]\nname = \"logistic\"\nmu = 1.0", "kinetics.mu"),
            ("kind = \"react-diffuse\"\n[kinetics]\nname = \"logistic\"\n[initial]\namplitude = 0.5", "initial.amplitude"),
            ("kind = \"diffuse\"\n[network]\nedge_list = \"does-not-exist.txt\"", "network.edge_list"),
            ("kind = \"dispersion\"\n[dispersion]\nstrategy = \"fast\"", "dispersion.strategy"),
            ("kind = \"diffuse\"\n[kinetics]\nname = \"logistic\"", "kinetics.name"),
        ];
        for (text, field) in cases {
            assert_eq!(field_of(parse(text).unwrap_err()), field, "{text}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(parse("kind = \"diffuse\"\n[network]\nvertexes = 10"), Err(Error::Config { .. })));
        assert_eq!(field_of(parse("s = 1.0").unwrap_err()), "kind");
    }

    #[test]
    fn normalized_round_trip() {
        let c = parse(
            "kind = \"dispersion\"\n[network]\ngenerator = \"ws\"\nvertices = 30\nk = 3\nseed = 4\n\
             [laplacian]\nvariant = \"case-b\"\nrescale = true\n[kinetics]\nname = \"gierer-meinhardt\"\n",
        )
        .unwrap();
        let text = c.to_toml();
        let again = parse(&text).unwrap();
        assert_eq!(again, c.normalized());
        assert_eq!(again.to_toml(), text);
        let (_, rates) = c.transport(&c.network().unwrap()).unwrap();
        assert_eq!(rates.len(), 2);
        assert!((rates[0] / rates[1] - 256.0).abs() < 1e-12);
    }
}
