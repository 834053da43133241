//! Emission of adaptive Clifford circuits that measure a recorded sequence
//! of commuting Pauli operators on the t-qubit magic register.
//!
//! Main qubits are `0..t` with magic inputs; auxiliary qubits follow. Each
//! Pauli's outcome is the parity of some measured cbits XOR a sign flip that
//! is tracked classically, so negative operators need no extra gates.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, CondKind, Condition, InputState, Instruction};
use crate::pauli::{CliffordGate, Pauli, PauliError, PauliOperator};

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("Pauli {0} is the identity")]
    Identity(usize),
    #[error("Pauli {index} has width {got}, expected {expected}")]
    Width {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("Pauli {0} is not Hermitian")]
    NotHermitian(usize),
    #[error("Paulis {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhzPrep {
    #[default]
    Tree,
    ConstDepth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitScheme {
    AuxQubit,
    CnotCascade { elide_uncompute: bool },
    GhzFanout { prep: GhzPrep },
}

/// How to read the outcome of one Pauli from the classical register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub pauli: String,
    /// Outcome is the XOR of these cbits...
    pub cbits: Vec<usize>,
    /// ...and of this bit.
    pub flip: bool,
}

impl OutcomeRecord {
    pub fn outcome(&self, cbits: &[bool]) -> bool {
        self.cbits.iter().fold(self.flip, |acc, &c| acc ^ cbits[c])
    }
}

#[derive(Debug, Clone)]
pub struct Emission {
    pub scheme: EmitScheme,
    pub circuit: Circuit,
    pub outcomes: Vec<OutcomeRecord>,
    /// Instruction range belonging to each Pauli.
    pub segments: Vec<Range<usize>>,
    /// Uncompute blocks left out of the circuit when elision is on. The
    /// register ends in `F|ψ>` where `F^†` is these blocks applied newest
    /// first.
    pub frame: Vec<Vec<Instruction>>,
}

/// Sidecar describing how to post-process an emitted circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub scheme: EmitScheme,
    pub t: usize,
    pub outcomes: Vec<OutcomeRecord>,
    pub frame: Vec<String>,
}

impl Emission {
    pub fn outcome_bits(&self, cbits: &[bool]) -> Vec<bool> {
        self.outcomes.iter().map(|r| r.outcome(cbits)).collect()
    }

    pub fn sidecar(&self, t: usize) -> Sidecar {
        Sidecar {
            scheme: self.scheme,
            t,
            outcomes: self.outcomes.clone(),
            frame: self
                .frame
                .iter()
                .map(|block| {
                    let mut c = Circuit::new(t, 0);
                    for inst in block {
                        // Blocks only touch main qubits and hold no measurements.
                        let _ = c.push(inst.clone());
                    }
                    crate::circuit::serialize(&c)
                })
                .collect(),
        }
    }
}

/// Upper bounds for the auxiliary-qubit scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceBounds {
    pub n_hs_ub: usize,
    pub n_cnot_ub: usize,
    pub depth_ub: usize,
}

pub fn resource_bounds(t: usize) -> ResourceBounds {
    ResourceBounds {
        n_hs_ub: 4 * t * t,
        n_cnot_ub: t * t,
        depth_ub: (t * (t + 5)).saturating_sub(1),
    }
}

fn validate(paulis: &[PauliOperator], t: usize) -> Result<(), EmitError> {
    for (i, p) in paulis.iter().enumerate() {
        if p.width() != t {
            return Err(EmitError::Width {
                index: i,
                got: p.width(),
                expected: t,
            });
        }
        if p.is_identity() {
            return Err(EmitError::Identity(i));
        }
        if !p.is_hermitian() {
            return Err(EmitError::NotHermitian(i));
        }
        for (j, q) in paulis[..i].iter().enumerate() {
            if !p.commutes(q)? {
                return Err(EmitError::NotCommuting(j, i));
            }
        }
    }
    Ok(())
}

fn clifford_of(inst: &Instruction) -> CliffordGate {
    inst.clifford().expect("emitted blocks hold only Clifford gates")
}

/// Pulls `∏ Z_q` over `measured` back through `gates` and returns the result
/// restricted to the first `t` qubits, after checking that on the remaining
/// qubits it is a pure X-type or Z-type stabilizer of the auxiliary state.
fn measured_operator(
    width: usize,
    t: usize,
    gates: &[Instruction],
    measured: &[usize],
) -> PauliOperator {
    let mut q = PauliOperator::identity(width);
    for &m in measured {
        q.mul_assign_unchecked(&PauliOperator::z(width, m).expect("measured qubit in range"));
    }
    for g in gates.iter().rev() {
        q.conjugate_unchecked(clifford_of(g));
    }
    debug_assert!((t..width).all(|a| q.get(a) != Pauli::Y));
    q.slice(0, t)
}

/// Sign of the implemented observable relative to `p`.
fn flip_for(implemented: &PauliOperator, p: &PauliOperator) -> bool {
    debug_assert_eq!(implemented.unsigned(), p.unsigned());
    implemented.is_negative() != p.is_negative()
}

/// Controlled-σ from `control` onto `target`, with σ in {X, Y, Z}.
fn controlled(sigma: Pauli, control: usize, target: usize) -> Vec<Instruction> {
    let cx = Instruction::cx(control, target);
    match sigma {
        Pauli::X => vec![cx],
        Pauli::Z => vec![Instruction::h(target), cx, Instruction::h(target)],
        // CY = S · CX · S^3 (S^3 applied first)
        Pauli::Y => vec![
            Instruction::s(target),
            Instruction::s(target),
            Instruction::s(target),
            cx,
            Instruction::s(target),
        ],
        Pauli::I => vec![],
    }
}

/// Support sorted so that qubits needing longer basis changes come last,
/// letting those changes overlap with earlier controlled gates.
fn chain_order(p: &PauliOperator) -> Vec<usize> {
    let mut s = p.support();
    s.sort_by_key(|&q| match p.get(q) {
        Pauli::X => 0,
        Pauli::Z => 1,
        _ => 2,
    });
    s
}

pub fn emit(paulis: &[PauliOperator], t: usize, scheme: EmitScheme) -> Result<Emission, EmitError> {
    validate(paulis, t)?;
    match scheme {
        EmitScheme::AuxQubit => emit_aux(paulis, t),
        EmitScheme::CnotCascade { elide_uncompute } => emit_cascade(paulis, t, elide_uncompute),
        EmitScheme::GhzFanout { prep } => emit_ghz(paulis, t, prep),
    }
}

fn magic_circuit(t: usize, extra: usize, cbits: usize) -> Result<Circuit, EmitError> {
    let mut c = Circuit::new(t + extra, cbits);
    for q in 0..t {
        c.set_input(q, InputState::Magic)?;
    }
    Ok(c)
}

fn emit_aux(paulis: &[PauliOperator], t: usize) -> Result<Emission, EmitError> {
    let aux = t;
    let width = t + 1;
    let mut c = magic_circuit(t, 1, paulis.len())?;
    let mut outcomes = Vec::new();
    let mut segments = Vec::new();
    for (i, p) in paulis.iter().enumerate() {
        let start = c.len();
        let mut gates = vec![Instruction::h(aux)];
        for q in chain_order(p) {
            gates.extend(controlled(p.get(q), aux, q));
        }
        gates.push(Instruction::h(aux));
        let implemented = measured_operator(width, t, &gates, &[aux]);
        c.extend(gates)?;
        c.push(Instruction::measure(aux, i))?;
        if i + 1 < paulis.len() {
            c.push(Instruction::cond(CondKind::X, aux, Condition::on(i)))?;
        }
        outcomes.push(OutcomeRecord {
            pauli: p.to_string(),
            cbits: vec![i],
            flip: flip_for(&implemented, p),
        });
        segments.push(start..c.len());
    }
    Ok(Emission {
        scheme: EmitScheme::AuxQubit,
        circuit: c,
        outcomes,
        segments,
        frame: Vec::new(),
    })
}

/// CNOT tree folding the parity of `nodes` into the last node, as pairs of
/// adjacent survivors in each round.
fn parity_tree(nodes: &[usize]) -> Vec<Instruction> {
    let mut level = nodes.to_vec();
    let mut out = Vec::new();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            if let [a, b] = *pair {
                out.push(Instruction::cx(a, b));
                next.push(b);
            } else {
                next.push(pair[0]);
            }
        }
        level = next;
    }
    out
}

fn emit_cascade(paulis: &[PauliOperator], t: usize, elide: bool) -> Result<Emission, EmitError> {
    let mut c = magic_circuit(t, 0, paulis.len())?;
    let mut outcomes = Vec::new();
    let mut segments = Vec::new();
    let mut frame: Vec<Vec<Instruction>> = Vec::new();
    for (i, original) in paulis.iter().enumerate() {
        // With elision the register carries every earlier forward block, so
        // the operator to measure is F P F^†.
        let mut p = original.clone();
        for block in &frame {
            for g in block.iter().rev() {
                p.conjugate_unchecked(clifford_of(g));
            }
        }
        let start = c.len();
        let support = p.support();
        let mut basis = Vec::new();
        let mut unbasis = Vec::new();
        for &q in &support {
            match p.get(q) {
                Pauli::X => {
                    basis.push(Instruction::h(q));
                    unbasis.push(Instruction::h(q));
                }
                Pauli::Y => {
                    // C = H S^†
                    basis.extend([Instruction::s(q), Instruction::s(q), Instruction::s(q)]);
                    basis.push(Instruction::h(q));
                    unbasis.push(Instruction::h(q));
                    unbasis.push(Instruction::s(q));
                }
                _ => {}
            }
        }
        let tree = parity_tree(&support);
        let target = *support.last().expect("non-identity Pauli");
        let mut forward = basis;
        forward.extend(tree.iter().cloned());
        let implemented = measured_operator(t, t, &forward, &[target]);
        c.extend(forward)?;
        c.push(Instruction::measure(target, i))?;
        let mut mirror: Vec<Instruction> = tree.into_iter().rev().collect();
        mirror.extend(unbasis);
        if elide {
            frame.push(mirror);
        } else {
            c.extend(mirror)?;
        }
        outcomes.push(OutcomeRecord {
            pauli: original.to_string(),
            cbits: vec![i],
            flip: flip_for(&implemented, &p),
        });
        segments.push(start..c.len());
    }
    Ok(Emission {
        scheme: EmitScheme::CnotCascade {
            elide_uncompute: elide,
        },
        circuit: c,
        outcomes,
        segments,
        frame,
    })
}

/// GHZ preparation on `aux` by a doubling CNOT fan-out.
fn ghz_tree(aux: &[usize]) -> Vec<Instruction> {
    let mut out = vec![Instruction::h(aux[0])];
    let mut have = 1;
    while have < aux.len() {
        for i in 0..have.min(aux.len() - have) {
            out.push(Instruction::cx(aux[i], aux[i + have]));
        }
        have *= 2;
    }
    out
}

/// Constant-depth GHZ preparation: `|+>` on every data qubit, neighbour
/// parities copied to helpers and measured, then X corrections from the
/// prefix parities.
fn ghz_const_depth(aux: &[usize], helpers: &[usize], cbits: &[usize]) -> Vec<Instruction> {
    let mut out: Vec<Instruction> = aux.iter().map(|&a| Instruction::h(a)).collect();
    for (i, &h) in helpers.iter().enumerate() {
        out.push(Instruction::cx(aux[i], h));
    }
    for (i, &h) in helpers.iter().enumerate() {
        out.push(Instruction::cx(aux[i + 1], h));
    }
    for (&h, &cb) in helpers.iter().zip(cbits) {
        out.push(Instruction::measure(h, cb));
    }
    for j in 1..aux.len() {
        out.push(Instruction::cond(
            CondKind::X,
            aux[j],
            Condition::parity(cbits[..j].to_vec()),
        ));
    }
    out
}

fn emit_ghz(paulis: &[PauliOperator], t: usize, prep: GhzPrep) -> Result<Emission, EmitError> {
    let helpers_n = match prep {
        GhzPrep::Tree => 0,
        GhzPrep::ConstDepth => t.saturating_sub(1),
    };
    let width = 2 * t + helpers_n;
    // Per Pauli: one cbit per aux qubit and per helper.
    let per = t + helpers_n;
    let mut c = magic_circuit(t, t + helpers_n, per * paulis.len())?;
    let mut outcomes = Vec::new();
    let mut segments = Vec::new();
    for (i, p) in paulis.iter().enumerate() {
        let start = c.len();
        let support = chain_order(p);
        let w = support.len();
        let aux: Vec<usize> = (0..w).map(|j| t + j).collect();
        let base = i * per;
        let aux_cbits: Vec<usize> = (0..w).map(|j| base + j).collect();
        let helpers: Vec<usize> = match prep {
            GhzPrep::Tree => Vec::new(),
            GhzPrep::ConstDepth => (0..w - 1).map(|j| 2 * t + j).collect(),
        };
        let helper_cbits: Vec<usize> = (0..helpers.len()).map(|j| base + t + j).collect();
        match prep {
            GhzPrep::Tree => c.extend(ghz_tree(&aux))?,
            GhzPrep::ConstDepth => c.extend(ghz_const_depth(&aux, &helpers, &helper_cbits))?,
        }
        let mut gates = Vec::new();
        for (j, &q) in support.iter().enumerate() {
            gates.extend(controlled(p.get(q), aux[j], q));
        }
        gates.extend(aux.iter().map(|&a| Instruction::h(a)));
        let implemented = measured_operator(width, t, &gates, &aux);
        c.extend(gates)?;
        for (&a, &cb) in aux.iter().zip(&aux_cbits) {
            c.push(Instruction::measure(a, cb))?;
        }
        if i + 1 < paulis.len() {
            for (&a, &cb) in aux.iter().zip(&aux_cbits) {
                c.push(Instruction::cond(CondKind::X, a, Condition::on(cb)))?;
            }
            for (&h, &cb) in helpers.iter().zip(&helper_cbits) {
                c.push(Instruction::cond(CondKind::X, h, Condition::on(cb)))?;
            }
        }
        outcomes.push(OutcomeRecord {
            pauli: p.to_string(),
            cbits: aux_cbits,
            flip: flip_for(&implemented, p),
        });
        segments.push(start..c.len());
    }
    Ok(Emission {
        scheme: EmitScheme::GhzFanout { prep },
        circuit: c,
        outcomes,
        segments,
        frame: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn bounds_formula() {
        let b = resource_bounds(14);
        assert_eq!((b.n_hs_ub, b.n_cnot_ub, b.depth_ub), (784, 196, 265));
        let b = resource_bounds(1);
        assert_eq!((b.n_hs_ub, b.n_cnot_ub, b.depth_ub), (4, 1, 5));
        let b = resource_bounds(42);
        assert_eq!((b.n_hs_ub, b.n_cnot_ub, b.depth_ub), (7056, 1764, 1973));
    }

    #[test]
    fn aux_zz_layout() {
        let e = emit(&[p("ZZ")], 2, EmitScheme::AuxQubit).unwrap();
        assert_eq!(
            e.circuit.instructions(),
            &[
                Instruction::h(2),
                Instruction::h(0),
                Instruction::cx(2, 0),
                Instruction::h(0),
                Instruction::h(1),
                Instruction::cx(2, 1),
                Instruction::h(1),
                Instruction::h(2),
                Instruction::measure(2, 0),
            ]
        );
        assert!(!e.outcomes[0].flip);
        let e = emit(&[p("-ZZ")], 2, EmitScheme::AuxQubit).unwrap();
        assert!(e.outcomes[0].flip);
    }

    #[test]
    fn cascade_single_x() {
        let e = emit(&[p("X")], 1, EmitScheme::CnotCascade { elide_uncompute: false }).unwrap();
        assert_eq!(
            e.circuit.instructions(),
            &[Instruction::h(0), Instruction::measure(0, 0), Instruction::h(0)]
        );
    }

    #[test]
    fn cascade_targets_highest_support_qubit() {
        let e = emit(&[p("ZIZZ")], 4, EmitScheme::CnotCascade { elide_uncompute: false }).unwrap();
        let measured: Vec<_> = e
            .circuit
            .instructions()
            .iter()
            .filter_map(|i| match i {
                Instruction::Measure { qubit, .. } => Some(*qubit),
                _ => None,
            })
            .collect();
        assert_eq!(measured, vec![3]);
        // No CNOT touches the trivial qubit.
        assert!(e.circuit.instructions().iter().all(|i| !i.qubits().contains(1)));
    }

    #[test]
    fn cascade_depth_per_pauli() {
        for s in ["XXXXXXXX", "ZZZZZIZZ", "YZXYZXYI", "IIIIIIIY", "XYXYXYXY"] {
            let op = p(s);
            let w = op.weight();
            let log = (w as f64).log2().ceil() as usize;
            let e = emit(&[op.clone()], 8, EmitScheme::CnotCascade { elide_uncompute: false }).unwrap();
            let has_y = op.support().iter().any(|&q| op.get(q) == Pauli::Y);
            let extra = if has_y { 7 } else { 5 };
            assert!(e.circuit.metrics().depth <= 2 * log + extra, "{s}");
        }
    }

    #[test]
    fn ghz_tree_depth() {
        for w in 1..=9usize {
            let aux: Vec<usize> = (0..w).collect();
            let mut c = Circuit::new(w, 0);
            c.extend(ghz_tree(&aux)).unwrap();
            let log = (w as f64).log2().ceil() as usize;
            assert_eq!(c.metrics().depth, log + 1, "w={w}");
        }
    }

    #[test]
    fn ghz_const_depth_is_constant() {
        for w in [2usize, 5, 9] {
            let aux: Vec<usize> = (0..w).collect();
            let helpers: Vec<usize> = (w..2 * w - 1).collect();
            let cbits: Vec<usize> = (0..w - 1).collect();
            let mut c = Circuit::new(2 * w - 1, w);
            c.extend(ghz_const_depth(&aux, &helpers, &cbits)).unwrap();
            assert_eq!(c.metrics().depth, 5);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(emit(&[p("II")], 2, EmitScheme::AuxQubit), Err(EmitError::Identity(0))));
        assert!(matches!(
            emit(&[p("XI"), p("ZI")], 2, EmitScheme::AuxQubit),
            Err(EmitError::NotCommuting(0, 1))
        ));
        assert!(matches!(emit(&[p("X")], 2, EmitScheme::AuxQubit), Err(EmitError::Width { .. })));
    }

    #[test]
    fn sidecar_serializes() {
        let e = emit(&[p("XY"), p("-YX")], 2, EmitScheme::CnotCascade { elide_uncompute: true }).unwrap();
        let json = serde_json::to_string(&e.sidecar(2)).unwrap();
        assert!(json.contains("\"flip\""));
        assert_eq!(e.frame.len(), 2);
        assert!(e.frame.iter().flatten().all(|i| !matches!(i, Instruction::Gate { kind: GateKind::T, .. })));
    }
}
