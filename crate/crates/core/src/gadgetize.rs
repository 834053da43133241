//! T-gadget rewriting: each T becomes a CNOT onto a fresh magic qubit, a
//! measurement of that qubit, and an S correction on the data qubit.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitError, CondKind, Condition, GateKind, InputState, Instruction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetizedCircuit {
    pub circuit: Circuit,
    pub n_main: usize,
    pub t: usize,
    /// Cbits of the gadget measurements, in T order.
    pub aux_measure_cbits: Vec<usize>,
    /// Cbits of the original measurements, in program order.
    pub output_cbits: Vec<usize>,
}

/// Compact description used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetSummary {
    pub n: usize,
    pub t: usize,
    pub m: usize,
}

impl GadgetizedCircuit {
    pub fn summary(&self) -> GadgetSummary {
        GadgetSummary {
            n: self.n_main,
            t: self.t,
            m: self.output_cbits.len(),
        }
    }

    /// Index of the first magic qubit.
    pub fn magic_start(&self) -> usize {
        self.n_main
    }
}

/// Rewrites a unitary Clifford+T circuit for input `|0>^n |A>^t`.
///
/// The j-th T on qubit q becomes `cx q, aux_j; measure aux_j -> c[m+j];
/// if (c[m+j]) s q`, where `aux_j = n + j` and `m` is the original cbit count.
pub fn gadgetize(c: &Circuit) -> Result<GadgetizedCircuit, CircuitError> {
    c.check_unitary()?;
    let n = c.num_qubits();
    let m = c.num_cbits();
    let t = c.t_count();
    let mut out = Circuit::new(n + t, m + t);
    for j in 0..t {
        out.set_input(n + j, InputState::Magic)?;
    }
    let mut aux_measure_cbits = Vec::with_capacity(t);
    let mut output_cbits = Vec::new();
    for inst in c.instructions() {
        match *inst {
            Instruction::Gate {
                kind: GateKind::T,
                qubit,
            } => {
                let j = aux_measure_cbits.len();
                let (aux, cbit) = (n + j, m + j);
                out.push(Instruction::cx(qubit, aux))?;
                out.push(Instruction::measure(aux, cbit))?;
                out.push(Instruction::cond(CondKind::S, qubit, Condition::on(cbit)))?;
                aux_measure_cbits.push(cbit);
            }
            Instruction::Measure { cbit, .. } => {
                output_cbits.push(cbit);
                out.push(inst.clone())?;
            }
            _ => out.push(inst.clone())?,
        }
    }
    Ok(GadgetizedCircuit {
        circuit: out,
        n_main: n,
        t,
        aux_measure_cbits,
        output_cbits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse;
    use crate::reference::dense::{born_distribution, tvd};
    use crate::reference::sim::distribution;
    use std::collections::BTreeMap;

    #[test]
    fn clifford_circuit_is_unchanged() {
        let c = parse("qubits 2\nh q0\ncx q0 q1\nmeasure q0 -> c0\nmeasure q1 -> c1").unwrap();
        let g = gadgetize(&c).unwrap();
        assert_eq!(g.t, 0);
        assert_eq!(g.circuit.instructions(), c.instructions());
        assert_eq!(g.output_cbits, vec![0, 1]);
    }

    #[test]
    fn single_gadget_layout() {
        let c = parse("qubits 1\nh q0\nt q0\nmeasure q0 -> c0").unwrap();
        let g = gadgetize(&c).unwrap();
        assert_eq!(g.circuit.num_qubits(), 2);
        assert_eq!(g.circuit.inputs()[1], InputState::Magic);
        assert_eq!(
            g.circuit.instructions(),
            &[
                Instruction::h(0),
                Instruction::cx(0, 1),
                Instruction::measure(1, 1),
                Instruction::cond(CondKind::S, 0, Condition::on(1)),
                Instruction::measure(0, 0),
            ]
        );
        assert_eq!(g.aux_measure_cbits, vec![1]);
        assert_eq!(g.circuit.metrics().count_cnot, 1);
    }

    #[test]
    fn gadget_distribution_matches_original() {
        for text in [
            "qubits 1\nh q0\nt q0\nh q0\nmeasure q0 -> c0",
            "qubits 2\nh q0\nt q0\ncx q0 q1\nt q1\nh q1\nt q1\nh q0\nmeasure q0 -> c0\nmeasure q1 -> c1",
        ] {
            let c = parse(text).unwrap();
            let g = gadgetize(&c).unwrap();
            let exact = born_distribution(&c);
            let outs = g.output_cbits.clone();
            let got: BTreeMap<Vec<bool>, f64> =
                distribution(&g.circuit, |b| outs.iter().map(|&i| b.cbits[i]).collect());
            assert!(tvd(&exact, &got) < 1e-9, "{text}");
        }
    }

    #[test]
    fn rejects_adaptive_input() {
        let c = parse("qubits 1\nmeasure q0 -> c0\nt q0").unwrap();
        assert!(gadgetize(&c).is_err());
    }
}
