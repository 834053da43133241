//! Measurement backends for the magic register.
//!
//! [`StateVector`] keeps the dense state of the register and performs
//! non-destructive Pauli measurements; [`DummyBackend`] replaces every
//! measurement with a coin toss and keeps no state.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::PauliOperator;

/// Largest register the dense backend accepts.
pub const MAX_QUBITS: usize = 26;

const CLAMP_TOL: f64 = 1e-12;
const CORRUPT_TOL: f64 = 1e-9;
/// Born probabilities closer than this to 0 or 1 count as deterministic in
/// `measure_random`.
pub const RANDOM_TOL: f64 = 1e-9;
const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("{qubits} qubits exceed the dense backend limit of {max}; use the dummy backend")]
    Capacity { qubits: usize, max: usize },
    #[error("operator width {0} does not match register size {1}")]
    WidthMismatch(usize, usize),
    #[error("observable must be Hermitian")]
    NotHermitian,
    #[error("cannot measure the identity")]
    Identity,
    #[error("outcome of an independent operator is deterministic (p0 = {0})")]
    Deterministic(f64),
    #[error("probability {0} outside [0, 1]: state is corrupted")]
    Numerical(f64),
}

/// Oracle answering Pauli measurements on the quantum register.
pub trait Backend: Send {
    fn num_qubits(&self) -> usize;

    /// Measures `p`, which the caller guarantees commutes with and is
    /// independent of every operator measured so far. Independence does not
    /// make the outcome random: projecting `|A>|A>` onto `ZZ = -1` fixes `XX`.
    fn measure(&mut self, p: &PauliOperator, rng: &mut dyn RngCore) -> Result<bool, BackendError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    StateVector,
    Dummy,
}

impl BackendKind {
    /// Fresh backend for a register of `q` magic qubits.
    pub fn create(self, q: usize) -> Result<Box<dyn Backend>, BackendError> {
        Ok(match self {
            BackendKind::StateVector => Box::new(StateVector::init_magic(q)?),
            BackendKind::Dummy => Box::new(DummyBackend::new(q)),
        })
    }

    pub fn check_capacity(self, q: usize) -> Result<(), BackendError> {
        match self {
            BackendKind::StateVector if q > MAX_QUBITS => Err(BackendError::Capacity {
                qubits: q,
                max: MAX_QUBITS,
            }),
            _ => Ok(()),
        }
    }
}

/// Dense amplitudes; bit j of an index is qubit j.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(q: usize) -> Result<Self, BackendError> {
        BackendKind::StateVector.check_capacity(q)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << q];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits: q, amps })
    }

    /// `|A>^{⊗t}` with `|A> = (|0> + e^{iπ/4}|1>)/√2`.
    pub fn init_magic(t: usize) -> Result<Self, BackendError> {
        BackendKind::StateVector.check_capacity(t)?;
        let scale = FRAC_1_SQRT_2.powi(t as i32);
        let amps = (0..1usize << t)
            .map(|b| Complex64::from_polar(scale, FRAC_PI_4 * b.count_ones() as f64))
            .collect();
        Ok(StateVector { num_qubits: t, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self, p: &PauliOperator) -> Result<(u64, u64, Complex64), BackendError> {
        if p.width() != self.num_qubits {
            return Err(BackendError::WidthMismatch(p.width(), self.num_qubits));
        }
        if !p.is_hermitian() {
            return Err(BackendError::NotHermitian);
        }
        let x = p.x_words().first().copied().unwrap_or(0);
        let z = p.z_words().first().copied().unwrap_or(0);
        let phase = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][p.phase() as usize];
        Ok((x, z, phase))
    }

    /// `<ψ|P|ψ>`; real for Hermitian `P`.
    pub fn expectation(&self, p: &PauliOperator) -> Result<f64, BackendError> {
        let (x, z, phase) = self.check(p)?;
        // P|b> = i^phase (-1)^{z·b} |b ⊕ x>
        let term = |b: usize| {
            let sign = if (z & b as u64).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            self.amps[b ^ x as usize].conj() * self.amps[b] * sign
        };
        let sum: Complex64 = if self.amps.len() >= PAR_THRESHOLD {
            (0..self.amps.len()).into_par_iter().map(term).sum()
        } else {
            (0..self.amps.len()).map(term).sum()
        };
        Ok((phase * sum).re)
    }

    /// Probability of outcome 0, clamped to [0, 1].
    pub fn probability_zero(&self, p: &PauliOperator) -> Result<f64, BackendError> {
        if p.is_identity() {
            return Err(BackendError::Identity);
        }
        let p0 = (1.0 + self.expectation(p)?) / 2.0;
        if !(-CORRUPT_TOL..=1.0 + CORRUPT_TOL).contains(&p0) {
            return Err(BackendError::Numerical(p0));
        }
        Ok(if p0 < CLAMP_TOL {
            0.0
        } else if p0 > 1.0 - CLAMP_TOL {
            1.0
        } else {
            p0.clamp(0.0, 1.0)
        })
    }

    /// Replaces the state by `(I + (-1)^outcome P)|ψ>/2`, normalized.
    pub fn project(&mut self, p: &PauliOperator, outcome: bool) -> Result<(), BackendError> {
        let (x, z, phase) = self.check(p)?;
        let sign = if outcome { -1.0 } else { 1.0 };
        let src = &self.amps;
        let new_amp = |b: usize| {
            // (P ψ)[b] = i^phase (-1)^{z·(b⊕x)} ψ[b⊕x]
            let from = b ^ x as usize;
            let s = if (z & from as u64).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            (src[b] + phase * src[from] * (s * sign)) * 0.5
        };
        let mut next: Vec<Complex64> = if src.len() >= PAR_THRESHOLD {
            (0..src.len()).into_par_iter().map(new_amp).collect()
        } else {
            (0..src.len()).map(new_amp).collect()
        };
        let norm = next.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < CORRUPT_TOL {
            return Err(BackendError::Numerical(norm * norm));
        }
        for a in &mut next {
            *a /= norm;
        }
        self.amps = next;
        Ok(())
    }

    /// Like `measure_pauli`, but rejects operators whose outcome is already
    /// determined by the state.
    pub fn measure_random(
        &mut self,
        p: &PauliOperator,
        rng: &mut dyn RngCore,
    ) -> Result<bool, BackendError> {
        let p0 = self.probability_zero(p)?;
        if !(RANDOM_TOL..=1.0 - RANDOM_TOL).contains(&p0) {
            return Err(BackendError::Deterministic(p0));
        }
        let outcome = rng.random::<f64>() >= p0;
        self.project(p, outcome)?;
        Ok(outcome)
    }

    /// Born-rule measurement of `p` followed by projection.
    pub fn measure_pauli(
        &mut self,
        p: &PauliOperator,
        rng: &mut dyn RngCore,
    ) -> Result<bool, BackendError> {
        let p0 = self.probability_zero(p)?;
        let outcome = rng.random::<f64>() >= p0;
        self.project(p, outcome)?;
        Ok(outcome)
    }
}

impl Backend for StateVector {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn measure(&mut self, p: &PauliOperator, rng: &mut dyn RngCore) -> Result<bool, BackendError> {
        self.measure_pauli(p, rng)
    }
}

/// Fair coin, independent of `p`.
pub fn dummy_measure(_p: &PauliOperator, rng: &mut dyn RngCore) -> bool {
    rng.random::<bool>()
}

/// Stateless backend that answers every measurement with a coin toss. It
/// preserves the structure of compiled shots but not output statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DummyBackend {
    num_qubits: usize,
}

impl DummyBackend {
    pub fn new(num_qubits: usize) -> Self {
        DummyBackend { num_qubits }
    }
}

impl Backend for DummyBackend {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn measure(&mut self, p: &PauliOperator, rng: &mut dyn RngCore) -> Result<bool, BackendError> {
        if p.width() != self.num_qubits {
            return Err(BackendError::WidthMismatch(p.width(), self.num_qubits));
        }
        Ok(dummy_measure(p, rng))
    }
}
