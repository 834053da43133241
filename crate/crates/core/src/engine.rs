//! Shot-by-shot Pauli-based computation.
//!
//! Measurements of a gadgetized circuit are processed in temporal order.
//! Each measured Z is pulled back through the preceding Clifford gates and
//! through the reflections inserted so far, which turns it into a Pauli
//! measurement on the input state `|0>^n ⊗ |A>^t`. That operator either
//! anticommutes with a known stabilizer (uniform outcome, a reflection is
//! recorded), lies in the group of known stabilizers (outcome determined), or
//! is independent, in which case it is reduced to the magic register and
//! handed to the backend.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{CondKind, GateKind, Instruction};
use crate::gadgetize::GadgetizedCircuit;
use crate::pauli::{
    conjugate_by_reflection_in_place, BasisTracker, Classification, CliffordGate, Pauli,
    PauliError, PauliOperator, Reflection, RowOrigin,
};
use crate::statevector::{Backend, BackendError, BackendKind};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("unsupported instruction in engine input: {0}")]
    Unsupported(String),
    #[error("{k} virtual qubits requested but the circuit has only {t} magic qubits")]
    TooManyVirtual { k: usize, t: usize },
    #[error("backend register has {got} qubits, expected {expected}")]
    RegisterSize { got: usize, expected: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// A signed single-qubit stabilizer generator standing in for a magic qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerGenerator {
    pub pauli: Pauli,
    pub negative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    CoinToss,
    Determined,
    QuantumMeasured,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    /// The measured Z pulled back to the input state.
    pub pauli: PauliOperator,
    pub resolution: Resolution,
    pub outcome: bool,
}

/// JSON form of a trace entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub pauli: String,
    pub resolution: Resolution,
    pub outcome: u8,
}

impl From<&TraceEntry> for TraceRecord {
    fn from(e: &TraceEntry) -> Self {
        TraceRecord {
            pauli: e.pauli.to_string(),
            resolution: e.resolution,
            outcome: e.outcome as u8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ShotStats {
    pub num_quantum_measurements: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotResult {
    pub output_bits: Vec<bool>,
    pub trace: Vec<TraceEntry>,
    /// Operators sent to the backend, on the quantum register, in order.
    pub quantum_paulis: Vec<PauliOperator>,
    pub quantum_outcomes: Vec<bool>,
    pub stats: ShotStats,
}

impl ShotResult {
    pub fn trace_records(&self) -> Vec<TraceRecord> {
        self.trace.iter().map(TraceRecord::from).collect()
    }

    pub fn output_string(&self) -> String {
        bits_to_string(&self.output_bits)
    }
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Order in which recorded reflections are applied to a pulled-back
/// operator. Only `OldestFirst` is correct; the other order exists so tests
/// can show the distribution check detects it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ReflectionOrder {
    OldestFirst,
    #[cfg_attr(not(test), allow(dead_code))]
    NewestFirst,
}

/// Per-shot compilation state.
#[derive(Debug, Clone)]
pub struct PBCShotState {
    pub basis: BasisTracker,
    pub reflections: Vec<Reflection>,
    pub quantum_basis: Vec<(PauliOperator, bool)>,
    pub cbit_values: Vec<bool>,
    n_main: usize,
    num_virtual: usize,
    t: usize,
}

impl PBCShotState {
    /// Basis seeded with `Z` on every main qubit and the override
    /// generators on the first magic qubits, all with outcome 0.
    pub fn new(
        gc: &GadgetizedCircuit,
        overrides: &[StabilizerGenerator],
    ) -> Result<Self, EngineError> {
        let (n, t, k) = (gc.n_main, gc.t, overrides.len());
        if k > t {
            return Err(EngineError::TooManyVirtual { k, t });
        }
        let width = n + t;
        let mut basis = BasisTracker::new(width);
        for q in 0..n {
            basis.insert(PauliOperator::z(width, q)?, false, RowOrigin::Dummy)?;
        }
        for (j, g) in overrides.iter().enumerate() {
            let mut op = PauliOperator::single(width, n + j, g.pauli)?;
            if g.negative {
                op.negate();
            }
            basis.insert(op, false, RowOrigin::Dummy)?;
        }
        Ok(PBCShotState {
            basis,
            reflections: Vec::new(),
            quantum_basis: Vec::new(),
            cbit_values: vec![false; gc.circuit.num_cbits()],
            n_main: n,
            num_virtual: k,
            t,
        })
    }

    fn quantum_start(&self) -> usize {
        self.n_main + self.num_virtual
    }

    fn quantum_len(&self) -> usize {
        self.t - self.num_virtual
    }

    /// Multiplies an independent operator by the dummy generators on every
    /// classical qubit it touches, leaving an equivalent operator supported
    /// on the quantum register only.
    fn reduce_to_register(&self, p: &PauliOperator) -> Result<PauliOperator, EngineError> {
        let mut w = p.clone();
        for q in 0..self.quantum_start() {
            let local = w.get(q);
            if local == Pauli::I {
                continue;
            }
            let (row, _, _) = self.basis.row(q);
            if row.get(q) != local {
                return Err(EngineError::Invariant(format!(
                    "independent operator {p} carries {local:?} on stabilized qubit {q}"
                )));
            }
            w.mul_assign_unchecked(row);
        }
        if !w.is_trivial_outside(self.quantum_start(), self.quantum_len()) || !w.is_hermitian() {
            return Err(EngineError::Invariant(format!(
                "operator {p} does not reduce to the quantum register"
            )));
        }
        Ok(w)
    }
}

fn pull_back(
    insts: &[Instruction],
    fired: &[bool],
    p: &mut PauliOperator,
) -> Result<(), EngineError> {
    for (j, inst) in insts.iter().enumerate().rev() {
        let g = match *inst {
            Instruction::Gate { kind, qubit } => match kind {
                GateKind::H => CliffordGate::H(qubit),
                GateKind::S => CliffordGate::S(qubit),
                GateKind::X => CliffordGate::X(qubit),
                GateKind::T => {
                    return Err(EngineError::Unsupported(format!("t q{qubit} (gadgetize first)")))
                }
            },
            Instruction::Cnot { control, target } => CliffordGate::Cnot(control, target),
            Instruction::CondGate { kind, qubit, .. } => {
                if !fired[j] {
                    continue;
                }
                match kind {
                    CondKind::S => CliffordGate::S(qubit),
                    CondKind::X => CliffordGate::X(qubit),
                    CondKind::Z => CliffordGate::Z(qubit),
                }
            }
            Instruction::Measure { .. } => continue,
            Instruction::Reset { qubit } => {
                return Err(EngineError::Unsupported(format!("reset q{qubit}")))
            }
        };
        p.conjugate_unchecked(g);
    }
    Ok(())
}

/// Runs one shot. `overrides` replaces the first `overrides.len()` magic
/// qubits by stabilizer states; the backend then holds the remaining
/// `t - overrides.len()` qubits.
pub fn run_shot(
    gc: &GadgetizedCircuit,
    overrides: &[StabilizerGenerator],
    backend: &mut dyn Backend,
    rng: &mut dyn RngCore,
) -> Result<ShotResult, EngineError> {
    run_shot_ordered(gc, overrides, backend, rng, ReflectionOrder::OldestFirst)
}

pub(crate) fn run_shot_ordered(
    gc: &GadgetizedCircuit,
    overrides: &[StabilizerGenerator],
    backend: &mut dyn Backend,
    rng: &mut dyn RngCore,
    order: ReflectionOrder,
) -> Result<ShotResult, EngineError> {
    let start = Instant::now();
    let mut st = PBCShotState::new(gc, overrides)?;
    if backend.num_qubits() != st.quantum_len() {
        return Err(EngineError::RegisterSize {
            got: backend.num_qubits(),
            expected: st.quantum_len(),
        });
    }
    let width = gc.n_main + gc.t;
    let insts = gc.circuit.instructions();
    for (q, s) in gc.circuit.inputs().iter().enumerate() {
        let magic = q >= gc.n_main;
        if (*s == crate::circuit::InputState::Magic) != magic {
            return Err(EngineError::Unsupported(format!(
                "input of q{q} does not match the |0>^n|A>^t layout"
            )));
        }
    }
    let mut fired = vec![false; insts.len()];
    let mut trace = Vec::new();
    let mut quantum_paulis = Vec::new();
    let mut quantum_outcomes = Vec::new();

    for (idx, inst) in insts.iter().enumerate() {
        let (qubit, cbit) = match inst {
            Instruction::CondGate { condition, .. } => {
                fired[idx] = condition.evaluate(&st.cbit_values);
                continue;
            }
            Instruction::Measure { qubit, cbit } => (*qubit, *cbit),
            _ => continue,
        };
        let mut p = PauliOperator::z(width, qubit)?;
        pull_back(&insts[..idx], &fired, &mut p)?;
        match order {
            ReflectionOrder::OldestFirst => {
                for v in &st.reflections {
                    conjugate_by_reflection_in_place(&mut p, v);
                }
            }
            ReflectionOrder::NewestFirst => {
                for v in st.reflections.iter().rev() {
                    conjugate_by_reflection_in_place(&mut p, v);
                }
            }
        }

        let (resolution, outcome) = match st.basis.classify(&p)? {
            Classification::Anticommuting { first_row } => {
                let s = rng.random::<bool>();
                let (q_op, lambda, _) = st.basis.row(first_row);
                let v = Reflection::new(first_row, q_op.clone(), p.clone(), lambda, s)?;
                st.reflections.push(v);
                (Resolution::CoinToss, s)
            }
            Classification::Dependent { rows, sign_bit } => {
                (Resolution::Determined, st.basis.implied_outcome(&rows, sign_bit))
            }
            Classification::Independent => {
                let w = st.reduce_to_register(&p)?;
                let local = w.slice(st.quantum_start(), st.quantum_len());
                let outcome = backend.measure(&local, rng)?;
                st.basis.insert(w, outcome, RowOrigin::Quantum)?;
                st.quantum_basis.push((local.clone(), outcome));
                quantum_paulis.push(local);
                quantum_outcomes.push(outcome);
                if quantum_paulis.len() > st.quantum_len() {
                    return Err(EngineError::Invariant(
                        "more quantum measurements than magic qubits".into(),
                    ));
                }
                (Resolution::QuantumMeasured, outcome)
            }
        };
        st.cbit_values[cbit] = outcome;
        trace.push(TraceEntry {
            pauli: p,
            resolution,
            outcome,
        });
    }

    Ok(ShotResult {
        output_bits: gc.output_cbits.iter().map(|&c| st.cbit_values[c]).collect(),
        trace,
        stats: ShotStats {
            num_quantum_measurements: quantum_paulis.len(),
            wall_time: start.elapsed(),
        },
        quantum_paulis,
        quantum_outcomes,
    })
}

/// RNG for shot `index` of a run seeded with `seed`.
pub fn shot_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct SampleResult {
    pub results: Vec<ShotResult>,
    /// Output bit strings (first output bit leftmost) and their counts.
    pub histogram: BTreeMap<String, usize>,
}

/// Runs `shots` independent shots in parallel. Shot `i` uses
/// `shot_rng(seed, i)` and a fresh backend, so results do not depend on
/// scheduling.
pub fn sample(
    gc: &GadgetizedCircuit,
    shots: usize,
    backend: BackendKind,
    seed: u64,
) -> Result<SampleResult, EngineError> {
    backend.check_capacity(gc.t)?;
    let results = (0..shots)
        .into_par_iter()
        .map(|i| {
            let mut rng = shot_rng(seed, i as u64);
            let mut b = backend.create(gc.t)?;
            run_shot(gc, &[], b.as_mut(), &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut histogram = BTreeMap::new();
    for r in &results {
        *histogram.entry(r.output_string()).or_insert(0) += 1;
    }
    Ok(SampleResult { results, histogram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse, Circuit};
    use crate::gadgetize::gadgetize;
    use crate::reference::dense::{born_distribution, tvd};
    use crate::statevector::StateVector;

    fn empirical(gc: &GadgetizedCircuit, shots: usize, seed: u64, order: ReflectionOrder) -> BTreeMap<Vec<bool>, f64> {
        let mut out = BTreeMap::new();
        for i in 0..shots {
            let mut rng = shot_rng(seed, i as u64);
            let mut sv = StateVector::init_magic(gc.t).unwrap();
            let r = run_shot_ordered(gc, &[], &mut sv, &mut rng, order).unwrap();
            *out.entry(r.output_bits).or_insert(0.0) += 1.0 / shots as f64;
        }
        out
    }

    #[test]
    fn hadamard_coin() {
        let gc = gadgetize(&parse("qubits 1\nh q0\nmeasure q0 -> c0").unwrap()).unwrap();
        let res = sample(&gc, 4000, BackendKind::StateVector, 1).unwrap();
        assert_eq!(res.results[0].trace[0].pauli.to_string(), "+X");
        assert_eq!(res.results[0].trace[0].resolution, Resolution::CoinToss);
        let ones = res.histogram.get("1").copied().unwrap_or(0) as f64 / 4000.0;
        assert!((ones - 0.5).abs() < 0.04);
    }

    #[test]
    fn diagonal_t_is_deterministic() {
        let gc = gadgetize(&parse("qubits 1\nt q0\nmeasure q0 -> c0").unwrap()).unwrap();
        let res = sample(&gc, 200, BackendKind::StateVector, 9).unwrap();
        assert_eq!(res.histogram.len(), 1);
        assert_eq!(res.histogram["0"], 200);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let c = parse("qubits 2\nh q0\nt q0\ncx q0 q1\nh q1\nt q1\nh q1\nmeasure q0 -> c0\nmeasure q1 -> c1").unwrap();
        let gc = gadgetize(&c).unwrap();
        let a = sample(&gc, 64, BackendKind::StateVector, 5).unwrap();
        let b = sample(&gc, 64, BackendKind::StateVector, 5).unwrap();
        let strip = |r: &SampleResult| {
            r.results.iter().map(|s| (s.output_bits.clone(), s.trace.clone())).collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.histogram, b.histogram);
    }

    /// Circuit where a measured operator anticommutes with an earlier coin
    /// toss and later ones see two reflections; the reflection order matters.
    fn reflection_heavy() -> Circuit {
        parse(
            "qubits 2
h q0
t q0
h q0
t q0
cx q0 q1
h q1
t q1
h q0
s q0
t q0
h q0
t q0
h q1
measure q0 -> c0
measure q1 -> c1",
        )
        .unwrap()
    }

    #[test]
    fn reflections_apply_oldest_first() {
        let c = reflection_heavy();
        let gc = gadgetize(&c).unwrap();
        let exact = born_distribution(&c);
        let good = empirical(&gc, 20_000, 11, ReflectionOrder::OldestFirst);
        assert!(tvd(&exact, &good) < 0.03, "oldest-first tvd {}", tvd(&exact, &good));
    }

    #[test]
    fn newest_first_order_is_detectably_wrong() {
        // Search a few random circuits for one where the reversed order
        // produces a visibly different distribution.
        let mut worst: f64 = 0.0;
        for seed in 0..30u64 {
            let c = crate::bench::random_clifford_t(3, 3, 30, seed);
            let gc = gadgetize(&c).unwrap();
            let exact = born_distribution(&c);
            let mut shots_ok = true;
            let mut out = BTreeMap::new();
            for i in 0..4000 {
                let mut rng = shot_rng(seed, i);
                let mut sv = StateVector::init_magic(gc.t).unwrap();
                match run_shot_ordered(&gc, &[], &mut sv, &mut rng, ReflectionOrder::NewestFirst) {
                    Ok(r) => *out.entry(r.output_bits).or_insert(0.0) += 1.0 / 4000.0,
                    Err(_) => {
                        shots_ok = false;
                        break;
                    }
                }
            }
            if !shots_ok {
                worst = 1.0;
                break;
            }
            worst = worst.max(tvd(&exact, &out));
        }
        assert!(worst > 0.1, "reversed order never detected (max tvd {worst})");
    }

    #[test]
    fn dummy_backend_respects_structure() {
        let c = crate::bench::random_clifford_t(4, 5, 60, 3);
        let gc = gadgetize(&c).unwrap();
        let res = sample(&gc, 50, BackendKind::Dummy, 2).unwrap();
        for r in &res.results {
            assert!(r.stats.num_quantum_measurements <= gc.t);
            for (i, a) in r.quantum_paulis.iter().enumerate() {
                assert!(a.is_hermitian());
                for b in &r.quantum_paulis[..i] {
                    assert!(a.commutes(b).unwrap());
                }
            }
            let mut basis = BasisTracker::new(gc.t);
            for p in &r.quantum_paulis {
                basis.insert(p.clone(), false, RowOrigin::Quantum).unwrap();
            }
        }
    }

    #[test]
    fn rejects_ungadgetized_input() {
        let c = parse("qubits 1\nt q0\nmeasure q0 -> c0").unwrap();
        let gc = GadgetizedCircuit {
            circuit: c,
            n_main: 1,
            t: 0,
            aux_measure_cbits: vec![],
            output_cbits: vec![0],
        };
        let mut sv = StateVector::init_magic(0).unwrap();
        let mut rng = shot_rng(0, 0);
        assert!(matches!(
            run_shot(&gc, &[], &mut sv, &mut rng),
            Err(EngineError::Unsupported(_))
        ));
    }

    #[test]
    fn trace_json_shape() {
        let gc = gadgetize(&parse("qubits 1\nh q0\nt q0\nh q0\nmeasure q0 -> c0").unwrap()).unwrap();
        let mut sv = StateVector::init_magic(1).unwrap();
        let mut rng = shot_rng(3, 0);
        let r = run_shot(&gc, &[], &mut sv, &mut rng).unwrap();
        let json = serde_json::to_value(r.trace_records()).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 2);
        assert!(json[0]["pauli"].as_str().unwrap().starts_with(['+', '-']));
        assert!(json[0]["resolution"].is_string());
    }
}
