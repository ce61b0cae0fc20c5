//! Driving a spin system with an input sequence and sampling time-multiplexed
//! signals into a design matrix.
//!
//! Each input step injects s_k into qubit 1, evolves for a period tau, and
//! samples the rescaled signals x'_i = (<Z_i> + 1)/2 at the V subdivision
//! times kτ + v(τ/V), v = 1..V. Column 0 of the assembled matrix is a
//! constant bias; column 1 + (n-1) + (v-1)N holds qubit n at substep v.
//!
//! For noiseless dynamics the per-step work is one full-period conjugation:
//! the observables are advanced into each virtual node's frame once at
//! construction (Z_i^{(v)} = U_sub^dag^v Z_i U_sub^v), so sampling reduces to
//! trace inner products against the freshly injected state. With dephasing on,
//! the state itself must visit every substep and the channel is applied after
//! each one.

use crate::error::CoreError;
use crate::linalg::{self, ConjScratch};
use crate::qcore::channel::{dephase_in_place, NoiseSpec};
use crate::qcore::density::DensityMatrix;
use crate::qcore::hamiltonian::{build_hamiltonian, Hamiltonian, Topology, MAX_QUBITS};
use crate::qcore::pauli;
use crate::qcore::propagator::{propagator, Propagator};
use crate::seed::{self, tags};
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Row counts of the washout / training / evaluation phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phases {
    pub washout: usize,
    pub train: usize,
    pub eval: usize,
}

impl Phases {
    pub fn total(&self) -> usize {
        self.washout + self.train + self.eval
    }

    /// Row range of the training phase.
    pub fn train_range(&self) -> core::ops::Range<usize> {
        self.washout..self.washout + self.train
    }

    /// Row range of the evaluation phase.
    pub fn eval_range(&self) -> core::ops::Range<usize> {
        self.washout + self.train..self.total()
    }
}

/// Static description of a reservoir: system size, couplings, timing,
/// noise, and phase lengths. `seed` feeds every random draw tied to the
/// reservoir (coupling disorder, observation noise).
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirConfig {
    pub n_qubits: usize,
    /// Input period tau (times the energy scale; dimensionless).
    pub tau: f64,
    /// Virtual nodes per period.
    pub virtual_nodes: usize,
    /// Coupling disorder scale J.
    pub j_coupling: f64,
    /// Transverse-field strength h.
    pub h_field: f64,
    pub topology: Topology,
    pub noise: NoiseSpec,
    pub washout_steps: usize,
    pub train_steps: usize,
    pub eval_steps: usize,
    pub seed: u64,
}

impl ReservoirConfig {
    /// Conventional disordered system: J = 1, h = 0.5, fully connected,
    /// noiseless, phases 1000/3000/1000.
    pub fn new(n_qubits: usize, tau: f64, virtual_nodes: usize, seed: u64) -> Self {
        ReservoirConfig {
            n_qubits,
            tau,
            virtual_nodes,
            j_coupling: 1.0,
            h_field: 0.5,
            topology: Topology::FullyConnected,
            noise: NoiseSpec::none(),
            washout_steps: 1000,
            train_steps: 3000,
            eval_steps: 1000,
            seed,
        }
    }

    pub fn phases(&self) -> Phases {
        Phases {
            washout: self.washout_steps,
            train: self.train_steps,
            eval: self.eval_steps,
        }
    }

    /// Substep duration tau / V.
    pub fn substep(&self) -> f64 {
        self.tau / self.virtual_nodes as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(CoreError::TooFewQubits { min: 1, actual: 0 });
        }
        if self.n_qubits > MAX_QUBITS {
            return Err(CoreError::TooManyQubits {
                n_qubits: self.n_qubits,
                max: MAX_QUBITS,
            });
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(CoreError::Domain {
                what: "input period tau",
                value: self.tau,
            });
        }
        if self.virtual_nodes == 0 {
            return Err(CoreError::Parameter("virtual_nodes must be at least 1"));
        }
        self.noise.validate()
    }
}

/// State threaded through a run: the density matrix plus the input counter.
#[derive(Debug, Clone)]
pub struct ReservoirState {
    rho: DensityMatrix,
    step_index: usize,
}

impl ReservoirState {
    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }
}

/// Maximally mixed initial state; results never depend on it once washed out.
pub fn init_state(config: &ReservoirConfig) -> Result<ReservoirState> {
    Ok(ReservoirState {
        rho: DensityMatrix::maximally_mixed(config.n_qubits)?,
        step_index: 0,
    })
}

/// Design matrix of sampled signals: one row per input step, column 0 the
/// constant bias, then N*V signal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    n_qubits: usize,
    virtual_nodes: usize,
    data: DMatrix<f64>,
    phases: Phases,
}

impl SignalMatrix {
    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn virtual_nodes(&self) -> usize {
        self.virtual_nodes
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn phases(&self) -> Phases {
        self.phases
    }

    /// Column of qubit `n` (1-based) at substep `v` (1-based).
    pub fn col_index(&self, n: usize, v: usize) -> usize {
        debug_assert!(n >= 1 && n <= self.n_qubits);
        debug_assert!(v >= 1 && v <= self.virtual_nodes);
        1 + (n - 1) + (v - 1) * self.n_qubits
    }

    /// Owned copy of a row range.
    pub fn block(&self, range: core::ops::Range<usize>) -> DMatrix<f64> {
        self.data.rows(range.start, range.len()).into_owned()
    }

    /// Training-phase rows.
    pub fn train_block(&self) -> DMatrix<f64> {
        self.block(self.phases.train_range())
    }

    /// Evaluation-phase rows.
    pub fn eval_block(&self) -> DMatrix<f64> {
        self.block(self.phases.eval_range())
    }

    /// Restrict to a coarser virtual-node grid: keep substeps at multiples of
    /// V / new_v. For noiseless dynamics this equals a direct run at new_v.
    pub fn subsample_virtual_nodes(&self, new_v: usize) -> Result<SignalMatrix> {
        if new_v == 0 || self.virtual_nodes % new_v != 0 {
            return Err(CoreError::Parameter(
                "new virtual-node count must divide the original",
            ));
        }
        let stride = self.virtual_nodes / new_v;
        let n = self.n_qubits;
        let mut data = DMatrix::zeros(self.rows(), 1 + n * new_v);
        for r in 0..self.rows() {
            data[(r, 0)] = self.data[(r, 0)];
            for w in 1..=new_v {
                let v = w * stride;
                for q in 1..=n {
                    data[(r, 1 + (q - 1) + (w - 1) * n)] = self.data[(r, self.col_index(q, v))];
                }
            }
        }
        Ok(SignalMatrix {
            n_qubits: n,
            virtual_nodes: new_v,
            data,
            phases: self.phases,
        })
    }
}

/// Reusable per-run buffers.
pub(crate) struct StepScratch {
    conj: ConjScratch,
    inject_tmp: DMatrix<Complex64>,
    zbuf: Vec<f64>,
}

impl StepScratch {
    pub fn new(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        StepScratch {
            conj: ConjScratch::new(d),
            inject_tmp: DMatrix::zeros(d / 2, d / 2),
            zbuf: vec![0.0; n_qubits],
        }
    }
}

/// A reservoir ready to run: Hamiltonian, propagators, and (when noiseless)
/// the frame-advanced observables. Immutable once built.
pub struct ReservoirSystem {
    config: ReservoirConfig,
    hamiltonian: Hamiltonian,
    u_step: Propagator,
    u_sub: Propagator,
    /// (v-1)*N + (i-1) -> split Z_i^{(v)}; present only for gamma = 0.
    heisenberg: Option<Vec<(Vec<f64>, Vec<f64>)>>,
}

/// Cache ceiling for the frame-advanced observables (bytes).
const HEISENBERG_BUDGET: usize = 512 << 20;

impl ReservoirSystem {
    /// Draw the Hamiltonian from the config seed and prepare propagators.
    pub fn new(config: ReservoirConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = seed::rng(config.seed, &[tags::HAMILTONIAN]);
        let hamiltonian = build_hamiltonian(
            config.n_qubits,
            config.j_coupling,
            config.h_field,
            config.topology,
            &mut rng,
        )?;
        Self::with_hamiltonian(config, hamiltonian)
    }

    /// Use an explicit Hamiltonian (sweeps that manage their own draws).
    pub fn with_hamiltonian(config: ReservoirConfig, hamiltonian: Hamiltonian) -> Result<Self> {
        config.validate()?;
        if hamiltonian.n_qubits() != config.n_qubits {
            return Err(CoreError::DimensionMismatch {
                expected: config.n_qubits,
                actual: hamiltonian.n_qubits(),
            });
        }
        let u_step = propagator(&hamiltonian, config.tau)?;
        let u_sub = u_step.at(config.substep())?;
        let n = config.n_qubits;
        let v_count = config.virtual_nodes;
        let d = 1usize << n;
        let heisenberg = if config.noise.dephasing_rate == 0.0
            && n * v_count * 2 * d * d * core::mem::size_of::<f64>() <= HEISENBERG_BUDGET
        {
            let mut frames = Vec::with_capacity(n * v_count);
            let mut current: Vec<(Vec<f64>, Vec<f64>)> = (1..=n)
                .map(|i| {
                    let z = pauli::z_op(n, i).expect("index in range");
                    linalg::split_hermitian(&z)
                })
                .collect();
            for _v in 1..=v_count {
                for item in current.iter_mut() {
                    let (zr, zi) = linalg::conjugate_adjoint(u_sub.split(), &item.0, &item.1);
                    *item = (zr, zi);
                    frames.push(item.clone());
                }
            }
            Some(frames)
        } else {
            None
        };
        Ok(ReservoirSystem {
            config,
            hamiltonian,
            u_step,
            u_sub,
            heisenberg,
        })
    }

    pub fn config(&self) -> &ReservoirConfig {
        &self.config
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    /// Full-period propagator.
    pub fn period_propagator(&self) -> &Propagator {
        &self.u_step
    }

    /// Substep propagator (duration tau / V).
    pub fn substep_propagator(&self) -> &Propagator {
        &self.u_sub
    }

    pub fn initial_state(&self) -> Result<ReservoirState> {
        init_state(&self.config)
    }

    /// Random pure product initial state (independent trial starts).
    pub fn random_initial_state(&self, rng: &mut ChaCha8Rng) -> Result<ReservoirState> {
        Ok(ReservoirState {
            rho: DensityMatrix::random_product_state(self.config.n_qubits, rng)?,
            step_index: 0,
        })
    }

    /// Number of signal columns excluding the bias.
    pub fn n_signals(&self) -> usize {
        self.config.n_qubits * self.config.virtual_nodes
    }

    /// Advance one input step, writing the N*V signals (virtual node v, qubit
    /// n at index (v-1)N + n-1). Observation noise is added to the recorded
    /// signals only, never to the state.
    pub(crate) fn step_into(
        &self,
        state: &mut ReservoirState,
        s: f64,
        signals: &mut [f64],
        scratch: &mut StepScratch,
        noise: Option<(&Normal<f64>, &mut ChaCha8Rng)>,
    ) -> Result<()> {
        debug_assert_eq!(signals.len(), self.n_signals());
        let n = self.config.n_qubits;
        let v_count = self.config.virtual_nodes;
        state.rho.inject_in_place(s, &mut scratch.inject_tmp)?;
        if let Some(frames) = &self.heisenberg {
            for (slot, (zr, zi)) in signals.iter_mut().zip(frames.iter()) {
                let x = linalg::trace_product_hermitian(state.rho.matrix(), zr, zi);
                *slot = (x + 1.0) / 2.0;
            }
            self.u_step.evolve_in_place(&mut state.rho, &mut scratch.conj);
        } else {
            let spec = &self.config.noise;
            for v in 0..v_count {
                self.u_sub.evolve_in_place(&mut state.rho, &mut scratch.conj);
                dephase_in_place(
                    &mut state.rho,
                    spec.dephasing_rate,
                    spec.dephasing_dt,
                    spec.dephasing_axis,
                );
                state.rho.expect_z_all(&mut scratch.zbuf);
                for (i, z) in scratch.zbuf.iter().enumerate() {
                    signals[v * n + i] = (z + 1.0) / 2.0;
                }
            }
        }
        if let Some((dist, rng)) = noise {
            for slot in signals.iter_mut() {
                *slot += dist.sample(rng);
            }
        }
        state.step_index += 1;
        Ok(())
    }

    /// One input step; returns the V*N signals. Convenience wrapper over the
    /// buffered path; sweeps use [`ReservoirSystem::run`] instead.
    pub fn step(
        &self,
        state: &mut ReservoirState,
        s: f64,
        obs_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Vec<f64>> {
        let mut signals = vec![0.0; self.n_signals()];
        let mut scratch = StepScratch::new(self.config.n_qubits);
        let sigma = self.config.noise.observation_sigma;
        match (sigma > 0.0, obs_rng) {
            (true, Some(rng)) => {
                let dist = Normal::new(0.0, sigma).map_err(|_| CoreError::Domain {
                    what: "observation sigma",
                    value: sigma,
                })?;
                self.step_into(state, s, &mut signals, &mut scratch, Some((&dist, rng)))?;
            }
            _ => self.step_into(state, s, &mut signals, &mut scratch, None)?,
        }
        Ok(signals)
    }

    /// Drive the full input sequence from the maximally mixed state.
    /// Observation noise draws come from the config seed.
    pub fn run(&self, inputs: &[f64]) -> Result<SignalMatrix> {
        let mut rng = seed::rng(self.config.seed, &[tags::OBSERVATION]);
        let state = self.initial_state()?;
        let (matrix, _) = self.run_from(state, inputs, &mut rng)?;
        Ok(matrix)
    }

    /// Drive the input sequence from an explicit state, returning the signal
    /// matrix and the final state (for trial repetition and closed-loop
    /// continuation). Requires enough inputs to cover the configured phases.
    pub fn run_from(
        &self,
        mut state: ReservoirState,
        inputs: &[f64],
        obs_rng: &mut ChaCha8Rng,
    ) -> Result<(SignalMatrix, ReservoirState)> {
        let phases = self.config.phases();
        if inputs.len() < phases.total() {
            return Err(CoreError::LengthMismatch {
                what: "input sequence",
                expected: phases.total(),
                actual: inputs.len(),
            });
        }
        let n_sig = self.n_signals();
        let mut data = DMatrix::zeros(inputs.len(), 1 + n_sig);
        let mut scratch = StepScratch::new(self.config.n_qubits);
        let mut signals = vec![0.0; n_sig];
        let sigma = self.config.noise.observation_sigma;
        let dist = if sigma > 0.0 {
            Some(Normal::new(0.0, sigma).map_err(|_| CoreError::Domain {
                what: "observation sigma",
                value: sigma,
            })?)
        } else {
            None
        };
        for (row, &s) in inputs.iter().enumerate() {
            let noise = match dist.as_ref() {
                Some(d) => Some((d, &mut *obs_rng)),
                None => None,
            };
            self.step_into(&mut state, s, &mut signals, &mut scratch, noise)?;
            data[(row, 0)] = 1.0;
            for (c, &x) in signals.iter().enumerate() {
                data[(row, 1 + c)] = x;
            }
        }
        Ok((
            SignalMatrix {
                n_qubits: self.config.n_qubits,
                virtual_nodes: self.config.virtual_nodes,
                data,
                phases,
            },
            state,
        ))
    }
}
