//! Run configuration: strict TOML schema, validation and conversion into
//! experiment specs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use noisy_qng::experiments::{
    AnsatzSpec, AppendixSpec, HeisenbergRingSpec, LandscapeSpec, LocateSpec, OmegaSource, QfiErrorSpec,
    ScalabilitySpec, SweepSpec, DEFAULT_THETA_COEFFICIENT, DEFAULT_TWO_QUBIT_FACTOR, MAX_SWEEP_ERROR,
};
use noisy_qng::metric::InversionScheme;
use noisy_qng::optim::{MetricSource, RuleConfig, UpdateRule, DEFAULT_STEP_SIZE};

/// Default perturbation radius around `θ_opt` for random starts.
pub const DEFAULT_INIT_RADIUS: f64 = 0.5;
pub const DEFAULT_OUTPUT_DIR: &str = "output";
const MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Optimize,
    Landscape,
    Sweep,
    QfiError,
    AppendixCheck,
    Scalability,
}

impl Experiment {
    pub fn label(self) -> &'static str {
        match self {
            Experiment::Optimize => "optimize",
            Experiment::Landscape => "landscape",
            Experiment::Sweep => "sweep",
            Experiment::QfiError => "qfi-error",
            Experiment::AppendixCheck => "appendix-check",
            Experiment::Scalability => "scalability",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub master_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub system: Option<SystemConfig>,
    pub optimizer: Option<OptimizerConfig>,
    pub sweep: Option<SweepConfig>,
    pub locate: Option<LocateConfig>,
    pub landscape: Option<LandscapeConfig>,
    pub qfi_error: Option<QfiErrorConfig>,
    pub appendix: Option<AppendixConfig>,
    pub scalability: Option<ScalabilitySpec>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n_qubits: Option<usize>,
    pub layers: Option<usize>,
    /// Single-qubit error for `optimize` and `landscape`.
    pub p_error: Option<f64>,
    pub hamiltonian: Option<HamiltonianConfig>,
    pub two_qubit_error_factor: Option<f64>,
    pub theta_noise_coefficient: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    #[serde(rename = "J")]
    pub coupling: Option<f64>,
    pub omega_seed: Option<u64>,
    pub omega_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub rule: Option<String>,
    pub step_size: Option<f64>,
    pub steps: Option<usize>,
    pub init_radius: Option<f64>,
    pub inversion: Option<InversionScheme>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub p_error: Option<Vec<f64>>,
    pub repetitions: Option<usize>,
    pub init_radius: Option<f64>,
    pub rules: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocateConfig {
    pub starts: Option<usize>,
    pub steps: Option<usize>,
    pub step_size: Option<f64>,
    pub start_radius: Option<f64>,
    pub metric: Option<MetricSource>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeConfig {
    pub grid: Option<usize>,
    pub locate_grid: Option<usize>,
    pub starts: Option<usize>,
    pub start_radius: Option<f64>,
    pub rules: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiErrorConfig {
    pub n_qubits: Option<Vec<usize>>,
    pub p_error: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixConfig {
    pub trials: Option<usize>,
    pub max_qubits: Option<usize>,
    pub epsilon_min: Option<f64>,
    pub epsilon_max: Option<f64>,
    pub scan_epsilon: Option<f64>,
    pub generators: Option<usize>,
    pub kappa_scale: Option<f64>,
}

/// Allowed keys per table, used to report every unknown key at once.
const SCHEMA: &[(&str, &[&str])] = &[
    (
        "",
        &[
            "experiment",
            "master_seed",
            "output_dir",
            "system",
            "optimizer",
            "sweep",
            "locate",
            "landscape",
            "qfi_error",
            "appendix",
            "scalability",
        ],
    ),
    (
        "system",
        &["n_qubits", "layers", "p_error", "hamiltonian", "two_qubit_error_factor", "theta_noise_coefficient"],
    ),
    ("system.hamiltonian", &["J", "omega_seed", "omega_list"]),
    ("optimizer", &["rule", "step_size", "steps", "init_radius", "inversion"]),
    ("optimizer.inversion", &["scheme", "cutoff", "lambda"]),
    ("sweep", &["p_error", "repetitions", "init_radius", "rules"]),
    ("locate", &["starts", "steps", "step_size", "start_radius", "metric"]),
    ("landscape", &["grid", "locate_grid", "starts", "start_radius", "rules"]),
    ("qfi_error", &["n_qubits", "p_error", "samples", "radius"]),
    (
        "appendix",
        &["trials", "max_qubits", "epsilon_min", "epsilon_max", "scan_epsilon", "generators", "kappa_scale"],
    ),
    ("scalability", &["p_error", "measurement_overhead", "gates_per_qubit", "log_depth_coefficient"]),
];

/// Removes keys outside the schema from `table`, recording each one.
fn strip_unknown(table: &mut toml::Table, path: &str, out: &mut Vec<String>) {
    let Some((_, allowed)) = SCHEMA.iter().find(|(p, _)| *p == path) else {
        return;
    };
    table.retain(|key, value| {
        let full = if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
        if !allowed.contains(&key) {
            out.push(format!("unknown key `{full}`"));
            return false;
        }
        if let toml::Value::Table(t) = value {
            strip_unknown(t, &full, out);
        }
        true
    });
}

/// Parsed config plus violations found so far. Unknown keys are reported
/// and dropped so the remaining checks can still run.
pub struct Parsed {
    pub config: Option<RunConfig>,
    pub violations: Vec<String>,
}

pub fn parse(text: &str) -> Parsed {
    let mut table: toml::Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            let e: toml::de::Error = e;
            return Parsed {
                config: None,
                violations: vec![format!("TOML syntax: {}", e.message())],
            };
        }
    };
    let mut violations = Vec::new();
    strip_unknown(&mut table, "", &mut violations);
    let config = match RunConfig::deserialize(toml::Value::Table(table)) {
        Ok(c) => Some(c),
        Err(e) => {
            violations.push(e.message().to_string());
            None
        }
    };
    Parsed { config, violations }
}

/// Optimisation of one noisy benchmark problem from a perturbed start.
#[derive(Debug, Clone)]
pub struct OptimizePlan {
    pub ansatz: AnsatzSpec,
    pub hamiltonian: HeisenbergRingSpec,
    pub rule: RuleConfig,
    pub steps: usize,
    pub init_radius: f64,
    pub locate: LocateSpec,
    pub master_seed: u64,
}

#[derive(Debug, Clone)]
pub enum Plan {
    Optimize(OptimizePlan),
    Landscape(LandscapeSpec),
    Sweep(SweepSpec),
    QfiError(QfiErrorSpec),
    AppendixCheck(AppendixSpec),
    Scalability(ScalabilitySpec),
}

/// Collects violations while reading fields.
struct Checker {
    violations: Vec<String>,
}

impl Checker {
    fn fail(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    fn require<T: Clone>(&mut self, v: &Option<T>, name: &str) -> Option<T> {
        if v.is_none() {
            self.fail(format!("missing required key `{name}`"));
        }
        v.clone()
    }

    fn p_error(&mut self, p: f64, name: &str) {
        if !(0.0..=MAX_SWEEP_ERROR).contains(&p) {
            self.fail(format!("{name} = {p} violates p_error ∈ [0, {MAX_SWEEP_ERROR}]"));
        }
    }

    fn positive(&mut self, v: f64, name: &str) {
        if !(v > 0.0 && v.is_finite()) {
            self.fail(format!("{name} = {v} must be positive and finite"));
        }
    }

    fn non_negative(&mut self, v: f64, name: &str) {
        if !(v >= 0.0 && v.is_finite()) {
            self.fail(format!("{name} = {v} must be non-negative and finite"));
        }
    }

    fn at_least(&mut self, v: usize, min: usize, name: &str) {
        if v < min {
            self.fail(format!("{name} = {v} must be at least {min}"));
        }
    }

    fn core<T>(&mut self, r: noisy_qng::Result<T>) {
        if let Err(e) = r {
            self.fail(e.to_string());
        }
    }

    fn rule(&mut self, label: &str, name: &str) -> Option<UpdateRule> {
        let r = UpdateRule::from_label(label);
        if r.is_none() {
            let known: Vec<&str> = noisy_qng::optim::ALL_RULES.iter().map(|r| r.label()).collect();
            self.fail(format!("{name} = {label:?} is not one of {}", known.join(", ")));
        }
        r
    }

    fn rules(&mut self, labels: &Option<Vec<String>>, name: &str, default: &[UpdateRule]) -> Vec<UpdateRule> {
        match labels {
            None => default.to_vec(),
            Some(ls) => {
                if ls.is_empty() {
                    self.fail(format!("{name} must not be empty"));
                }
                ls.iter().filter_map(|l| self.rule(l, name)).collect()
            }
        }
    }
}

const SWEEP_RULES: [UpdateRule; 3] = [
    UpdateRule::NaturalGradient(MetricSource::QfiExact),
    UpdateRule::ImagTimeMixed,
    UpdateRule::GradientDescent,
];

struct System {
    n_qubits: usize,
    layers: usize,
    factor: f64,
    c: f64,
    ring: Option<HeisenbergRingSpec>,
}

fn system(ck: &mut Checker, cfg: &RunConfig, need_ring: bool) -> System {
    let sys = cfg.system.clone().unwrap_or_default();
    if cfg.system.is_none() {
        ck.fail("missing required table [system]");
    }
    let n_qubits = ck.require(&sys.n_qubits, "system.n_qubits").unwrap_or(2);
    if !(2..=MAX_QUBITS).contains(&n_qubits) {
        ck.fail(format!("system.n_qubits = {n_qubits} violates n_qubits ∈ [2, {MAX_QUBITS}]"));
    }
    let layers = sys.layers.unwrap_or(1);
    ck.at_least(layers, 1, "system.layers");
    let factor = sys.two_qubit_error_factor.unwrap_or(DEFAULT_TWO_QUBIT_FACTOR);
    ck.non_negative(factor, "system.two_qubit_error_factor");
    let c = sys.theta_noise_coefficient.unwrap_or(DEFAULT_THETA_COEFFICIENT);
    ck.non_negative(c, "system.theta_noise_coefficient");
    let ring = if need_ring {
        let h = sys.hamiltonian.clone().unwrap_or_default();
        if sys.hamiltonian.is_none() {
            ck.fail("missing required table [system.hamiltonian]");
        }
        let omega = match (&h.omega_seed, &h.omega_list) {
            (Some(s), None) => Some(OmegaSource::Seed(*s)),
            (None, Some(l)) => {
                if l.len() != n_qubits {
                    ck.fail(format!("system.hamiltonian.omega_list has {} entries, expected {n_qubits}", l.len()));
                }
                if let Some(w) = l.iter().find(|w| !(w.abs() <= 1.0)) {
                    ck.fail(format!("system.hamiltonian.omega_list entry {w} violates |ω| ≤ 1"));
                }
                Some(OmegaSource::List(l.clone()))
            }
            (Some(_), Some(_)) => {
                ck.fail("system.hamiltonian: give exactly one of omega_seed and omega_list");
                None
            }
            (None, None) => {
                ck.fail("system.hamiltonian: one of omega_seed or omega_list is required");
                None
            }
        };
        let coupling = h.coupling.unwrap_or(1.0);
        if !coupling.is_finite() {
            ck.fail("system.hamiltonian.J must be finite");
        }
        omega.map(|omega| HeisenbergRingSpec {
            n_qubits,
            coupling,
            omega,
        })
    } else {
        None
    };
    System {
        n_qubits,
        layers,
        factor,
        c,
        ring,
    }
}

fn check_two_qubit(ck: &mut Checker, p: f64, factor: f64) {
    if (0.0..=MAX_SWEEP_ERROR).contains(&p) && p * factor > 1.0 {
        ck.fail(format!("two-qubit error p_error × factor = {} exceeds 1", p * factor));
    }
}

fn locate(ck: &mut Checker, cfg: &RunConfig, inversion: InversionScheme) -> LocateSpec {
    let d = LocateSpec::default();
    let l = cfg.locate.clone().unwrap_or_default();
    let spec = LocateSpec {
        starts: l.starts.unwrap_or(d.starts),
        steps: l.steps.unwrap_or(d.steps),
        step_size: l.step_size.unwrap_or(d.step_size),
        start_radius: l.start_radius.unwrap_or(d.start_radius),
        inversion,
        metric: l.metric.unwrap_or(d.metric),
    };
    ck.at_least(spec.starts, 1, "locate.starts");
    ck.positive(spec.step_size, "locate.step_size");
    ck.non_negative(spec.start_radius, "locate.start_radius");
    spec
}

/// Optimiser settings shared by the optimisation experiments.
struct Optimizer {
    rule: Option<UpdateRule>,
    step_size: f64,
    steps: usize,
    init_radius: f64,
    inversion: InversionScheme,
}

fn optimizer(ck: &mut Checker, cfg: &RunConfig, need_rule: bool) -> Optimizer {
    let o = cfg.optimizer.clone().unwrap_or_default();
    let rule = if need_rule {
        ck.require(&o.rule, "optimizer.rule").and_then(|l| ck.rule(&l, "optimizer.rule"))
    } else {
        o.rule.as_deref().and_then(|l| ck.rule(l, "optimizer.rule"))
    };
    let step_size = o.step_size.unwrap_or(DEFAULT_STEP_SIZE);
    ck.positive(step_size, "optimizer.step_size");
    let inversion = o.inversion.unwrap_or_default();
    ck.core(inversion.validate());
    let init_radius = o.init_radius.unwrap_or(DEFAULT_INIT_RADIUS);
    ck.non_negative(init_radius, "optimizer.init_radius");
    Optimizer {
        rule,
        step_size,
        steps: o.steps.unwrap_or(30),
        init_radius,
        inversion,
    }
}

/// Validates the whole configuration and converts it into a runnable plan.
/// Every violation found is returned, not just the first.
pub fn plan(cfg: &RunConfig) -> Result<Plan, Vec<String>> {
    let mut ck = Checker { violations: Vec::new() };
    let experiment = ck.require(&cfg.experiment, "experiment");
    let seed = ck.require(&cfg.master_seed, "master_seed").unwrap_or(0);
    let plan = match experiment {
        None => None,
        Some(Experiment::Optimize) => {
            let sys = system(&mut ck, cfg, true);
            let opt = optimizer(&mut ck, cfg, true);
            let p = cfg.system.as_ref().and_then(|s| s.p_error).unwrap_or(0.0);
            ck.p_error(p, "system.p_error");
            check_two_qubit(&mut ck, p, sys.factor);
            let locate = locate(&mut ck, cfg, opt.inversion);
            match (sys.ring, opt.rule) {
                (Some(ring), Some(rule)) => Some(Plan::Optimize(OptimizePlan {
                    ansatz: AnsatzSpec {
                        n_qubits: sys.n_qubits,
                        layers: sys.layers,
                        p_error: p,
                        two_qubit_factor: sys.factor,
                        theta_coefficient: sys.c,
                    },
                    hamiltonian: ring,
                    rule: RuleConfig::new(rule, opt.step_size).with_inversion(opt.inversion),
                    steps: opt.steps,
                    init_radius: opt.init_radius,
                    locate,
                    master_seed: seed,
                })),
                _ => None,
            }
        }
        Some(Experiment::Landscape) => {
            let d = LandscapeSpec::default();
            let l = cfg.landscape.clone().unwrap_or_default();
            let sys = cfg.system.clone().unwrap_or_default();
            let opt = optimizer(&mut ck, cfg, false);
            let p = sys.p_error.unwrap_or(d.p_error);
            ck.p_error(p, "system.p_error");
            let factor = sys.two_qubit_error_factor.unwrap_or(d.two_qubit_factor);
            ck.non_negative(factor, "system.two_qubit_error_factor");
            check_two_qubit(&mut ck, p, factor);
            let c = sys.theta_noise_coefficient.unwrap_or(d.theta_coefficient);
            ck.non_negative(c, "system.theta_noise_coefficient");
            if sys.n_qubits.is_some_and(|n| n != 2) {
                ck.fail("system.n_qubits must be 2 for the landscape experiment");
            }
            let spec = LandscapeSpec {
                p_error: p,
                two_qubit_factor: factor,
                theta_coefficient: c,
                grid: l.grid.unwrap_or(d.grid),
                locate_grid: l.locate_grid.unwrap_or(d.locate_grid),
                locate: locate(&mut ck, cfg, opt.inversion),
                starts: l.starts.unwrap_or(d.starts),
                start_radius: l.start_radius.unwrap_or(d.start_radius),
                steps: cfg.optimizer.as_ref().and_then(|o| o.steps).unwrap_or(d.steps),
                step_size: opt.step_size,
                rules: ck.rules(&l.rules, "landscape.rules", &d.rules),
                inversion: opt.inversion,
                master_seed: seed,
            };
            ck.at_least(spec.grid, 2, "landscape.grid");
            ck.at_least(spec.locate_grid, 1, "landscape.locate_grid");
            ck.non_negative(spec.start_radius, "landscape.start_radius");
            Some(Plan::Landscape(spec))
        }
        Some(Experiment::Sweep) => {
            let sys = system(&mut ck, cfg, true);
            let opt = optimizer(&mut ck, cfg, false);
            let s = cfg.sweep.clone().unwrap_or_default();
            if cfg.sweep.is_none() {
                ck.fail("missing required table [sweep]");
            }
            let grid = ck.require(&s.p_error, "sweep.p_error").unwrap_or_default();
            if s.p_error.is_some() && grid.is_empty() {
                ck.fail("sweep.p_error must not be empty");
            }
            for &p in &grid {
                ck.p_error(p, "sweep.p_error");
                check_two_qubit(&mut ck, p, sys.factor);
            }
            let repetitions = s.repetitions.unwrap_or(25);
            ck.at_least(repetitions, 1, "sweep.repetitions");
            let init_radius = s.init_radius.unwrap_or(opt.init_radius);
            ck.non_negative(init_radius, "sweep.init_radius");
            let rules = ck.rules(&s.rules, "sweep.rules", &SWEEP_RULES);
            let locate = locate(&mut ck, cfg, opt.inversion);
            sys.ring.map(|ring| {
                Plan::Sweep(SweepSpec {
                    n_qubits: sys.n_qubits,
                    layers: sys.layers,
                    two_qubit_factor: sys.factor,
                    theta_coefficient: sys.c,
                    hamiltonian: ring,
                    p_errors: grid,
                    repetitions,
                    steps: opt.steps,
                    step_size: opt.step_size,
                    init_radius,
                    rules,
                    inversion: opt.inversion,
                    locate,
                    master_seed: seed,
                })
            })
        }
        Some(Experiment::QfiError) => {
            let sys = system(&mut ck, cfg, true);
            let q = cfg.qfi_error.clone().unwrap_or_default();
            if cfg.qfi_error.is_none() {
                ck.fail("missing required table [qfi_error]");
            }
            let ns = q.n_qubits.clone().unwrap_or_else(|| vec![sys.n_qubits]);
            for &n in &ns {
                if !(2..=MAX_QUBITS).contains(&n) {
                    ck.fail(format!("qfi_error.n_qubits entry {n} violates n_qubits ∈ [2, {MAX_QUBITS}]"));
                }
            }
            let grid = ck.require(&q.p_error, "qfi_error.p_error").unwrap_or_default();
            for &p in &grid {
                ck.p_error(p, "qfi_error.p_error");
                check_two_qubit(&mut ck, p, sys.factor);
            }
            let samples = q.samples.unwrap_or(5);
            ck.at_least(samples, 1, "qfi_error.samples");
            let radius = q.radius.unwrap_or(0.1);
            ck.non_negative(radius, "qfi_error.radius");
            let omega_seed = match sys.ring.as_ref().map(|r| &r.omega) {
                Some(OmegaSource::Seed(s)) => Some(*s),
                Some(OmegaSource::List(_)) => {
                    ck.fail("qfi_error needs system.hamiltonian.omega_seed (sizes vary)");
                    None
                }
                None => None,
            };
            let opt = optimizer(&mut ck, cfg, false);
            let locate = locate(&mut ck, cfg, opt.inversion);
            omega_seed.map(|omega_seed| {
                Plan::QfiError(QfiErrorSpec {
                    n_qubits: ns,
                    p_errors: grid,
                    layers: sys.layers,
                    two_qubit_factor: sys.factor,
                    theta_coefficient: sys.c,
                    omega_seed,
                    samples,
                    radius,
                    locate,
                    master_seed: seed,
                })
            })
        }
        Some(Experiment::AppendixCheck) => {
            let d = AppendixSpec::default();
            let a = cfg.appendix.clone().unwrap_or_default();
            let spec = AppendixSpec {
                trials: a.trials.unwrap_or(d.trials),
                max_qubits: a.max_qubits.unwrap_or(d.max_qubits),
                epsilon_min: a.epsilon_min.unwrap_or(d.epsilon_min),
                epsilon_max: a.epsilon_max.unwrap_or(d.epsilon_max),
                scan_epsilon: a.scan_epsilon.unwrap_or(d.scan_epsilon),
                generators: a.generators.unwrap_or(d.generators),
                kappa_scale: a.kappa_scale.unwrap_or(d.kappa_scale),
                master_seed: seed,
            };
            ck.core(spec.validate());
            Some(Plan::AppendixCheck(spec))
        }
        Some(Experiment::Scalability) => match &cfg.scalability {
            None => {
                ck.fail("missing required table [scalability]");
                None
            }
            Some(s) => {
                ck.core(s.validate());
                Some(Plan::Scalability(s.clone()))
            }
        },
    };
    match plan {
        Some(p) if ck.violations.is_empty() => Ok(p),
        _ => {
            if ck.violations.is_empty() {
                ck.fail("configuration is incomplete");
            }
            Err(ck.violations)
        }
    }
}

/// Output directory: command-line flag, then config, then the default.
pub fn output_dir(cfg: &RunConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}
