//! Experiment configuration: TOML file, command-line overrides, grid
//! enumeration, and the seed lineage of every sample.

use crate::RunArgs;
use qrc_core::qcore::channel::DephasingAxis;
use qrc_core::reservoir::Phases;
use qrc_core::{NoiseSpec, ReservoirConfig, Topology};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Capacity,
    Narma,
    Timer,
    Mg,
    Esn,
    Validate,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExperimentKind::Capacity => "capacity",
            ExperimentKind::Narma => "narma",
            ExperimentKind::Timer => "timer",
            ExperimentKind::Mg => "mg",
            ExperimentKind::Esn => "esn",
            ExperimentKind::Validate => "validate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyChoice {
    FullyConnected,
    Chain,
}

impl From<TopologyChoice> for Topology {
    fn from(t: TopologyChoice) -> Topology {
        match t {
            TopologyChoice::FullyConnected => Topology::FullyConnected,
            TopologyChoice::Chain => Topology::OneDNearestNeighbour,
        }
    }
}

impl fmt::Display for TopologyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyChoice::FullyConnected => "fully_connected",
            TopologyChoice::Chain => "chain",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisChoice {
    Z,
    X,
}

impl From<AxisChoice> for DephasingAxis {
    fn from(a: AxisChoice) -> DephasingAxis {
        match a {
            AxisChoice::Z => DephasingAxis::Z,
            AxisChoice::X => DephasingAxis::X,
        }
    }
}

impl fmt::Display for AxisChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisChoice::Z => "z",
            AxisChoice::X => "x",
        })
    }
}

/// Parameter axes swept by the quantum experiments. Cells are the cartesian
/// product, virtual_nodes varying fastest.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub tau: Vec<f64>,
    pub virtual_nodes: Vec<usize>,
    pub n_qubits: Vec<usize>,
    pub j_coupling: Vec<f64>,
    pub h_field: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma: Vec<f64>,
    pub topology: Vec<TopologyChoice>,
    pub dephasing_axis: Vec<AxisChoice>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            tau: vec![1.0],
            virtual_nodes: vec![10],
            n_qubits: vec![5],
            j_coupling: vec![1.0],
            h_field: vec![0.5],
            gamma: vec![0.0],
            sigma: vec![0.0],
            topology: vec![TopologyChoice::FullyConnected],
            dephasing_axis: vec![AxisChoice::Z],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseConfig {
    pub washout: usize,
    pub train: usize,
    pub eval: usize,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        PhaseConfig {
            washout: 1000,
            train: 3000,
            eval: 1000,
        }
    }
}

impl PhaseConfig {
    pub fn phases(&self) -> Phases {
        Phases {
            washout: self.washout,
            train: self.train,
            eval: self.eval,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacityOptions {
    /// Largest probed delay of the memory and parity curves.
    pub tau_b_max: usize,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions {
            tau_b_max: qrc_core::tasks::TAU_B_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NarmaInputChoice {
    Sine,
    Random,
}

impl From<NarmaInputChoice> for qrc_core::tasks::NarmaInput {
    fn from(c: NarmaInputChoice) -> Self {
        match c {
            NarmaInputChoice::Sine => qrc_core::tasks::NarmaInput::Sine,
            NarmaInputChoice::Random => qrc_core::tasks::NarmaInput::UniformRandom,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NarmaOptions {
    pub input: NarmaInputChoice,
}

impl Default for NarmaOptions {
    fn default() -> Self {
        NarmaOptions {
            input: NarmaInputChoice::Sine,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimerOptions {
    /// Delays summed into the capacity, 0..=tau_max.
    pub tau_max: usize,
    pub train_trials: usize,
    pub eval_trials: usize,
}

impl Default for TimerOptions {
    fn default() -> Self {
        TimerOptions {
            tau_max: qrc_core::tasks::TIMER_TOTAL - qrc_core::tasks::TIMER_CUE - 1,
            train_trials: 5,
            eval_trials: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MgOptions {
    pub tau_mg: f64,
    /// Uniform +-amplitude added to the training-phase signals.
    pub train_noise: f64,
    /// Reservoir washout rows taken from the front of the teacher phase.
    pub washout_rows: usize,
    /// Perturbation of the first fed-back input for the twin trajectory.
    pub perturbation: f64,
}

impl Default for MgOptions {
    fn default() -> Self {
        MgOptions {
            tau_mg: 17.0,
            train_noise: 1e-5,
            washout_rows: 1000,
            perturbation: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EsnOptions {
    pub n_nodes: usize,
    /// Spectral radius grid; empty selects 0.05, 0.15, ..., 1.95.
    pub radius: Vec<f64>,
    pub cases: Vec<EsnCaseChoice>,
}

impl Default for EsnOptions {
    fn default() -> Self {
        EsnOptions {
            n_nodes: 50,
            radius: Vec::new(),
            cases: vec![EsnCaseChoice::CaseI, EsnCaseChoice::CaseII],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EsnCaseChoice {
    CaseI,
    CaseII,
}

impl From<EsnCaseChoice> for qrc_core::esn::InputCase {
    fn from(c: EsnCaseChoice) -> Self {
        match c {
            EsnCaseChoice::CaseI => qrc_core::esn::InputCase::CaseI,
            EsnCaseChoice::CaseII => qrc_core::esn::InputCase::CaseII,
        }
    }
}

impl fmt::Display for EsnCaseChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EsnCaseChoice::CaseI => "case_i",
            EsnCaseChoice::CaseII => "case_ii",
        })
    }
}

/// On-disk form: every field optional with defaults, `experiment` checked
/// against the subcommand when present.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    experiment: Option<ExperimentKind>,
    seed: Option<u64>,
    samples: Option<usize>,
    out_dir: Option<String>,
    threads: Option<usize>,
    dump_signals: Option<bool>,
    grid: Option<Grid>,
    phases: Option<PhaseConfig>,
    capacity: Option<CapacityOptions>,
    narma: Option<NarmaOptions>,
    timer: Option<TimerOptions>,
    mg: Option<MgOptions>,
    esn: Option<EsnOptions>,
}

/// Fully resolved configuration driving one experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub samples: usize,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub threads: Option<usize>,
    pub dump_signals: bool,
    pub grid: Grid,
    pub phases: PhaseConfig,
    pub capacity: CapacityOptions,
    pub narma: NarmaOptions,
    pub timer: TimerOptions,
    pub mg: MgOptions,
    pub esn: EsnOptions,
}

pub const DEFAULT_SEED: u64 = 42;
/// Reservoir draws per cell when unspecified.
pub const DEFAULT_SAMPLES: usize = 20;
/// Network draws per radius when unspecified (ESN sweeps average harder).
pub const DEFAULT_ESN_SAMPLES: usize = 100;

impl ExperimentConfig {
    /// Load the optional TOML file, apply command-line overrides, fill
    /// defaults, and validate.
    pub fn resolve(kind: ExperimentKind, args: &RunArgs) -> Result<Self, String> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => FileConfig::default(),
        };
        if let Some(declared) = file.experiment {
            if declared != kind {
                return Err(format!(
                    "config file declares experiment \"{declared}\" but the subcommand is \"{kind}\""
                ));
            }
        }
        let default_samples = match kind {
            ExperimentKind::Esn => DEFAULT_ESN_SAMPLES,
            _ => DEFAULT_SAMPLES,
        };
        let out_dir = args
            .out
            .clone()
            .or_else(|| file.out_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(format!("results/{kind}")));
        let config = ExperimentConfig {
            experiment: kind,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            samples: args.samples.or(file.samples).unwrap_or(default_samples),
            out_dir,
            threads: args.threads.or(file.threads),
            dump_signals: args.dump_signals || file.dump_signals.unwrap_or(false),
            grid: file.grid.unwrap_or_default(),
            phases: file.phases.unwrap_or_default(),
            capacity: file.capacity.unwrap_or_default(),
            narma: file.narma.unwrap_or_default(),
            timer: file.timer.unwrap_or_default(),
            mg: file.mg.unwrap_or_default(),
            esn: file.esn.unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.samples == 0 {
            return Err("samples must be at least 1".into());
        }
        let g = &self.grid;
        let axes: [(&str, bool); 9] = [
            ("grid.tau", g.tau.is_empty()),
            ("grid.virtual_nodes", g.virtual_nodes.is_empty()),
            ("grid.n_qubits", g.n_qubits.is_empty()),
            ("grid.j_coupling", g.j_coupling.is_empty()),
            ("grid.h_field", g.h_field.is_empty()),
            ("grid.gamma", g.gamma.is_empty()),
            ("grid.sigma", g.sigma.is_empty()),
            ("grid.topology", g.topology.is_empty()),
            ("grid.dephasing_axis", g.dephasing_axis.is_empty()),
        ];
        for (name, empty) in axes {
            if empty {
                return Err(format!("{name} must not be empty"));
            }
        }
        for &tau in &g.tau {
            if !(tau > 0.0) || !tau.is_finite() {
                return Err(format!("grid.tau entries must be positive, got {tau}"));
            }
        }
        for &v in &g.virtual_nodes {
            if v == 0 {
                return Err("grid.virtual_nodes entries must be at least 1".into());
            }
        }
        for &n in &g.n_qubits {
            if n == 0 || n > qrc_core::qcore::hamiltonian::MAX_QUBITS {
                return Err(format!(
                    "grid.n_qubits entries must lie in 1..={}, got {n}",
                    qrc_core::qcore::hamiltonian::MAX_QUBITS
                ));
            }
        }
        for &x in g.j_coupling.iter().chain(&g.gamma).chain(&g.sigma) {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(format!("coupling, gamma and sigma grids must be nonnegative, got {x}"));
            }
        }
        if self.phases.train == 0 || self.phases.eval == 0 {
            return Err("phases.train and phases.eval must be nonzero".into());
        }
        match self.experiment {
            ExperimentKind::Timer => {
                let t = &self.timer;
                if t.train_trials == 0 || t.eval_trials == 0 {
                    return Err("timer trials must be nonzero".into());
                }
                let window = qrc_core::tasks::TIMER_TOTAL - qrc_core::tasks::TIMER_CUE;
                if t.tau_max >= window {
                    return Err(format!("timer.tau_max must be below {window}"));
                }
            }
            ExperimentKind::Mg => {
                let m = &self.mg;
                if !(m.tau_mg > 0.0) {
                    return Err("mg.tau_mg must be positive".into());
                }
                if !(m.train_noise >= 0.0) || !(m.perturbation > 0.0) {
                    return Err("mg.train_noise must be nonnegative and mg.perturbation positive".into());
                }
                if m.washout_rows >= qrc_core::tasks::MG_TRAIN_STEPS {
                    return Err(format!(
                        "mg.washout_rows must leave training rows below {}",
                        qrc_core::tasks::MG_TRAIN_STEPS
                    ));
                }
            }
            ExperimentKind::Esn => {
                if self.esn.n_nodes == 0 {
                    return Err("esn.n_nodes must be at least 1".into());
                }
                if self.esn.cases.is_empty() {
                    return Err("esn.cases must not be empty".into());
                }
                for &r in &self.esn.radius {
                    if !(r > 0.0) || !r.is_finite() {
                        return Err(format!("esn.radius entries must be positive, got {r}"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn radius_grid(&self) -> Vec<f64> {
        if self.esn.radius.is_empty() {
            qrc_core::esn::default_radius_grid()
        } else {
            self.esn.radius.clone()
        }
    }
}

/// One grid cell. `index` orders the outputs; `physical_index` excludes the
/// virtual_nodes axis and keys the seed lineage, so cells differing only in V
/// share their Hamiltonian draws, input streams and trial states.
#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub index: usize,
    pub physical_index: usize,
    #[serde(flatten)]
    pub params: CellParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellParams {
    pub tau: f64,
    pub virtual_nodes: usize,
    pub n_qubits: usize,
    pub j_coupling: f64,
    pub h_field: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub topology: TopologyChoice,
    pub dephasing_axis: AxisChoice,
}

impl CellParams {
    /// Reservoir description for one sample seed. The dephasing interval is
    /// the virtual-node substep.
    pub fn reservoir_config(&self, phases: Phases, seed: u64) -> ReservoirConfig {
        ReservoirConfig {
            n_qubits: self.n_qubits,
            tau: self.tau,
            virtual_nodes: self.virtual_nodes,
            j_coupling: self.j_coupling,
            h_field: self.h_field,
            topology: self.topology.into(),
            noise: NoiseSpec {
                dephasing_rate: self.gamma,
                dephasing_axis: self.dephasing_axis.into(),
                dephasing_dt: self.tau / self.virtual_nodes as f64,
                observation_sigma: self.sigma,
            },
            washout_steps: phases.washout,
            train_steps: phases.train,
            eval_steps: phases.eval,
            seed,
        }
    }

    /// CSV field values, matching [`cell_csv_header`].
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.tau.to_string(),
            self.virtual_nodes.to_string(),
            self.n_qubits.to_string(),
            self.j_coupling.to_string(),
            self.h_field.to_string(),
            self.gamma.to_string(),
            self.sigma.to_string(),
            self.topology.to_string(),
            self.dephasing_axis.to_string(),
        ]
    }
}

pub fn cell_csv_header() -> Vec<String> {
    [
        "tau",
        "virtual_nodes",
        "n_qubits",
        "j_coupling",
        "h_field",
        "gamma",
        "sigma",
        "topology",
        "dephasing_axis",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Cartesian product of the grid axes, virtual_nodes innermost.
pub fn enumerate_cells(grid: &Grid) -> Vec<Cell> {
    let mut cells = Vec::new();
    let mut physical_index = 0usize;
    for &tau in &grid.tau {
        for &n_qubits in &grid.n_qubits {
            for &j_coupling in &grid.j_coupling {
                for &h_field in &grid.h_field {
                    for &gamma in &grid.gamma {
                        for &sigma in &grid.sigma {
                            for &topology in &grid.topology {
                                for &dephasing_axis in &grid.dephasing_axis {
                                    for &virtual_nodes in &grid.virtual_nodes {
                                        cells.push(Cell {
                                            index: cells.len(),
                                            physical_index,
                                            params: CellParams {
                                                tau,
                                                virtual_nodes,
                                                n_qubits,
                                                j_coupling,
                                                h_field,
                                                gamma,
                                                sigma,
                                                topology,
                                                dephasing_axis,
                                            },
                                        });
                                    }
                                    physical_index += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    cells
}

/// Documented derivation of every per-sample random stream.
pub const SEED_LINEAGE: &str = "sample_seed = fold(master_seed; SAMPLE, physical_cell_index, \
sample_index); physical_cell_index excludes the virtual_nodes axis so V sweeps share systems; \
per-purpose streams fork from sample_seed by fixed tags (hamiltonian, input, observation, \
train_noise, initial_state, esn, perturbation)";

/// Seed of one (cell, sample) unit.
pub fn sample_seed(master: u64, physical_index: usize, sample: usize) -> u64 {
    qrc_core::seed::child_seed(
        master,
        &[
            qrc_core::seed::tags::SAMPLE,
            physical_index as u64,
            sample as u64,
        ],
    )
}
