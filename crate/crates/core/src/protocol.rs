//! State-vector simulation of the clean protocol and its bounded-error variant.
//!
//! Bob's register starts in `sum_y sqrt(b_y) |y>`, with an answer qubit `|0>`
//! and a copy qubit `(|0> - |1>)/sqrt 2`. Computing `f` into the answer,
//! copying it with a CNOT and uncomputing kicks the phase `(-1)^f(x,y)` back
//! onto `|y>`, leaving the signal state `psi_x`. A protocol with error
//! `epsilon` instead leaves
//! `sum_y sqrt(b_y) |y> ((-1)^f cos t_xy |0> + e^{i p_xy} sin t_xy |1>)`
//! with `cos t_xy >= 1 - 2 epsilon`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::boolfn::BooleanFunction;
use crate::bounds::{fannes_penalty, FannesVariant};
use crate::matrix::SquareMatrix;
use crate::rng;
use crate::spectral::{hermitian_eigenvalues, von_neumann_entropy, SimplexVector};
use crate::{Error, Result};

/// Largest `n` for full register simulation and density matrices.
pub const MAX_SIMULATED_N: usize = 6;
const NORM_TOL: f64 = 1e-10;
const FIDELITY_SLACK: f64 = 1e-12;
const TRACE_DISTANCE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Register {
    pub name: &'static str,
    pub width: usize,
}

/// Normalized amplitudes; register order is most significant first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureState {
    pub amplitudes: Vec<Complex64>,
    pub registers: Vec<Register>,
}

impl PureState {
    fn new(amplitudes: Vec<Complex64>, registers: Vec<Register>) -> Result<Self> {
        let state = PureState {
            amplitudes,
            registers,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Simulation(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn qubits(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: other.amplitudes.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(u, v)| u.conj() * v)
            .sum())
    }

    /// Same ray with the first nonzero amplitude real and non-negative.
    pub fn canonical(&self) -> PureState {
        let mut out = self.clone();
        if let Some(first) = self.amplitudes.iter().find(|c| c.norm() > NORM_TOL) {
            let phase = first.conj() / first.norm();
            out.amplitudes.iter_mut().for_each(|c| *c *= phase);
        }
        out
    }

    /// l2 distance between the canonical representatives of two rays.
    pub fn ray_distance(&self, other: &PureState) -> Result<f64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: other.amplitudes.len(),
            });
        }
        let (u, v) = (self.canonical(), other.canonical());
        Ok(u.amplitudes
            .iter()
            .zip(&v.amplitudes)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `self (x) |0>` on an extra answer qubit.
    pub fn with_answer_qubit(&self) -> PureState {
        let mut amplitudes = Vec::with_capacity(2 * self.amplitudes.len());
        for &c in &self.amplitudes {
            amplitudes.push(c);
            amplitudes.push(Complex64::new(0.0, 0.0));
        }
        let mut registers = self.registers.clone();
        registers.push(Register {
            name: "answer",
            width: 1,
        });
        PureState {
            amplitudes,
            registers,
        }
    }

    /// `|self><self|`.
    pub fn projector(&self) -> SquareMatrix<Complex64> {
        let dim = self.amplitudes.len();
        let mut p = SquareMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                p[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        p
    }
}

fn check_simulable(f: &BooleanFunction) -> Result<()> {
    if f.n() > MAX_SIMULATED_N {
        Err(Error::InvalidParameter(format!(
            "n = {} exceeds the simulation limit {MAX_SIMULATED_N}",
            f.n()
        )))
    } else {
        Ok(())
    }
}

fn check_input(f: &BooleanFunction, x: usize, b: &SimplexVector) -> Result<()> {
    if x >= f.dim() {
        return Err(Error::IndexOutOfRange {
            index: x,
            dim: f.dim(),
        });
    }
    if b.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: b.len(),
        });
    }
    Ok(())
}

/// `psi_x = sum_y (-1)^f(x,y) sqrt(b_y) |y>`.
pub fn clean_state(f: &BooleanFunction, x: usize, b: &SimplexVector) -> Result<PureState> {
    check_input(f, x, b)?;
    let amplitudes = b
        .weights()
        .iter()
        .enumerate()
        .map(|(y, w)| {
            let sign = if f.value(x, y) == 1 { -1.0 } else { 1.0 };
            Complex64::new(sign * w.sqrt(), 0.0)
        })
        .collect();
    PureState::new(
        amplitudes,
        vec![Register {
            name: "y",
            width: f.n(),
        }],
    )
}

// Full register index: y (n bits) | answer (1 bit) | copy (1 bit).
const ANSWER: usize = 0b10;
const COPY: usize = 0b01;

/// `|y>|c> -> |y>|c xor f(x, y)>` on the answer qubit.
fn apply_oracle(f: &BooleanFunction, x: usize, state: &mut [Complex64]) {
    for y in 0..f.dim() {
        if f.value(x, y) == 1 {
            let base = y << 2;
            for copy in [0, COPY] {
                state.swap(base | copy, base | ANSWER | copy);
            }
        }
    }
}

fn apply_cnot_answer_to_copy(state: &mut [Complex64]) {
    for base in (0..state.len()).step_by(4) {
        state.swap(base | ANSWER, base | ANSWER | COPY);
    }
}

/// Runs compute, copy and uncompute on the explicit registers and returns
/// Bob's `y` register. Fails if the answer qubit does not return to `|0>` or
/// the copy qubit does not stay `(|0> - |1>)/sqrt 2`.
pub fn simulate_clean_protocol(
    f: &BooleanFunction,
    x: usize,
    b: &SimplexVector,
) -> Result<PureState> {
    check_simulable(f)?;
    check_input(f, x, b)?;
    let dim = f.dim();
    let mut state = vec![Complex64::new(0.0, 0.0); dim * 4];
    for (y, w) in b.weights().iter().enumerate() {
        let amp = w.sqrt() * FRAC_1_SQRT_2;
        state[y << 2] = Complex64::new(amp, 0.0);
        state[(y << 2) | COPY] = Complex64::new(-amp, 0.0);
    }

    apply_oracle(f, x, &mut state);
    apply_cnot_answer_to_copy(&mut state);
    apply_oracle(f, x, &mut state);

    let mut residual = 0.0;
    let mut amplitudes = Vec::with_capacity(dim);
    for y in 0..dim {
        let base = y << 2;
        let (a0, a1) = (state[base], state[base | COPY]);
        residual += state[base | ANSWER].norm_sqr() + state[base | ANSWER | COPY].norm_sqr();
        // <-| projection and the orthogonal <+| leftover.
        amplitudes.push((a0 - a1) * FRAC_1_SQRT_2);
        residual += ((a0 + a1) * FRAC_1_SQRT_2).norm_sqr();
    }
    if residual.sqrt() > NORM_TOL {
        return Err(Error::Simulation(format!(
            "work registers not restored (residual {:e})",
            residual.sqrt()
        )));
    }
    PureState::new(
        amplitudes,
        vec![Register {
            name: "y",
            width: f.n(),
        }],
    )
}

/// Per-pair angles of a bounded-error answer qubit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisyAnswerModel {
    pub epsilon: f64,
    /// Row-major `2^n x 2^n`, radians in `[0, pi/2]`.
    pub theta: Vec<f64>,
    /// Row-major `2^n x 2^n`, radians in `[0, 2 pi)`.
    pub phi: Vec<f64>,
    pub seed: u64,
}

impl NoisyAnswerModel {
    /// `cos theta` uniform on `[1 - 2 epsilon, 1]`, `phi` uniform on `[0, 2 pi)`.
    pub fn sample(n: usize, epsilon: f64, seed: u64) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in [0, 1/2), got {epsilon}"
            )));
        }
        let len = 1usize << (2 * n);
        let mut rng = rng::stream(seed);
        let mut theta = Vec::with_capacity(len);
        let mut phi = Vec::with_capacity(len);
        for _ in 0..len {
            let u: f64 = rng.random();
            theta.push((1.0 - 2.0 * epsilon * u).acos());
            phi.push(2.0 * PI * rng.random::<f64>());
        }
        let model = NoisyAnswerModel {
            epsilon,
            theta,
            phi,
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in [0, 1/2), got {}",
                self.epsilon
            )));
        }
        if self.theta.len() != self.phi.len() {
            return Err(Error::DimensionMismatch {
                expected: self.theta.len(),
                got: self.phi.len(),
            });
        }
        let floor = 1.0 - 2.0 * self.epsilon;
        for (i, (&t, &p)) in self.theta.iter().zip(&self.phi).enumerate() {
            if !(0.0..=PI / 2.0).contains(&t) || t.cos() < floor - 1e-15 {
                return Err(Error::InvalidParameter(format!(
                    "theta[{i}] = {t} violates cos theta >= {floor}"
                )));
            }
            if !(0.0..2.0 * PI).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "phi[{i}] = {p} outside [0, 2 pi)"
                )));
            }
        }
        Ok(())
    }
}

/// One `psi^eps_x` per input `x`, on the `y` register plus the answer qubit.
pub fn sample_noisy_states(
    f: &BooleanFunction,
    b: &SimplexVector,
    model: &NoisyAnswerModel,
) -> Result<Vec<PureState>> {
    model.validate()?;
    let dim = f.dim();
    if model.theta.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            got: model.theta.len(),
        });
    }
    if b.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: b.len(),
        });
    }
    (0..dim)
        .map(|x| {
            let mut amplitudes = Vec::with_capacity(2 * dim);
            for (y, w) in b.weights().iter().enumerate() {
                let (t, p) = (model.theta[x * dim + y], model.phi[x * dim + y]);
                let sign = if f.value(x, y) == 1 { -1.0 } else { 1.0 };
                let amp = w.sqrt();
                amplitudes.push(Complex64::new(sign * amp * t.cos(), 0.0));
                amplitudes.push(Complex64::from_polar(amp * t.sin(), p));
            }
            PureState::new(
                amplitudes,
                vec![
                    Register {
                        name: "y",
                        width: f.n(),
                    },
                    Register {
                        name: "answer",
                        width: 1,
                    },
                ],
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityCheck {
    pub fidelity_sq: f64,
    pub pass: bool,
}

/// `|(<clean| <0|) |noisy>|^2` against the floor `(1 - 2 epsilon)^2`.
pub fn state_fidelity_check(
    clean: &PureState,
    noisy: &PureState,
    epsilon: f64,
) -> Result<FidelityCheck> {
    let padded = if clean.amplitudes.len() * 2 == noisy.amplitudes.len() {
        clean.with_answer_qubit()
    } else {
        clean.clone()
    };
    let fidelity_sq = padded.inner(noisy)?.norm_sqr();
    let floor = (1.0 - 2.0 * epsilon).powi(2);
    Ok(FidelityCheck {
        fidelity_sq,
        pass: fidelity_sq >= floor - FIDELITY_SLACK,
    })
}

/// `sum_x a_x |psi_x><psi_x|`.
pub fn ensemble_density_matrix(
    states: &[PureState],
    a: &SimplexVector,
) -> Result<SquareMatrix<Complex64>> {
    if states.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: states.len(),
        });
    }
    let dim = states.first().map_or(0, |s| s.amplitudes.len());
    let mut rho = SquareMatrix::<Complex64>::zeros(dim);
    for (state, &w) in states.iter().zip(a.weights()) {
        if w == 0.0 {
            continue;
        }
        let amps = &state.amplitudes;
        for i in 0..dim {
            let ui = amps[i] * w;
            for j in 0..dim {
                rho[(i, j)] += ui * amps[j].conj();
            }
        }
    }
    Ok(rho)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    /// `S(rho')`, bits.
    pub s_clean: f64,
    /// `S(rho^eps)`, bits.
    pub s_noisy: f64,
    pub trace_distance: f64,
    pub min_fidelity_sq: f64,
    pub fidelity_floor: f64,
    pub trace_distance_ceiling: f64,
    pub fidelity_pass: bool,
    pub trace_distance_pass: bool,
    /// `s_noisy >= s_clean - conservative penalty`.
    pub fannes_conservative_pass: bool,
    /// Same with the log-eta0 penalty; a failure is a finding, not an error.
    pub fannes_paper_pass: bool,
}

/// Builds `rho' = sum_x a_x |psi_x,0><psi_x,0|` and `rho^eps` and compares them.
pub fn ensemble_trace_distance(
    f: &BooleanFunction,
    a: &SimplexVector,
    b: &SimplexVector,
    model: &NoisyAnswerModel,
) -> Result<EnsembleReport> {
    check_simulable(f)?;
    if a.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: a.len(),
        });
    }
    let noisy = sample_noisy_states(f, b, model)?;
    let clean = (0..f.dim())
        .map(|x| clean_state(f, x, b).map(|s| s.with_answer_qubit()))
        .collect::<Result<Vec<_>>>()?;

    let mut min_fidelity_sq = f64::INFINITY;
    for (c, e) in clean.iter().zip(&noisy) {
        min_fidelity_sq =
            min_fidelity_sq.min(state_fidelity_check(c, e, model.epsilon)?.fidelity_sq);
    }

    let rho_clean = ensemble_density_matrix(&clean, a)?;
    let rho_noisy = ensemble_density_matrix(&noisy, a)?;
    let trace_distance: f64 = hermitian_eigenvalues(&rho_clean.sub(&rho_noisy))?
        .iter()
        .map(|v| v.abs())
        .sum();
    let s_clean = von_neumann_entropy(&rho_clean)?;
    let s_noisy = von_neumann_entropy(&rho_noisy)?;

    let epsilon = model.epsilon;
    let fidelity_floor = (1.0 - 2.0 * epsilon).powi(2);
    let trace_distance_ceiling = 4.0 * epsilon.sqrt();
    let n = f.n();
    Ok(EnsembleReport {
        s_clean,
        s_noisy,
        trace_distance,
        min_fidelity_sq: min_fidelity_sq.min(1.0),
        fidelity_floor,
        trace_distance_ceiling,
        fidelity_pass: min_fidelity_sq >= fidelity_floor - FIDELITY_SLACK,
        trace_distance_pass: trace_distance <= trace_distance_ceiling + TRACE_DISTANCE_SLACK,
        fannes_conservative_pass: s_noisy
            >= s_clean - fannes_penalty(n, epsilon, FannesVariant::Conservative) - 1e-9,
        fannes_paper_pass: s_noisy
            >= s_clean - fannes_penalty(n, epsilon, FannesVariant::Paper) - 1e-9,
    })
}
