//! Commutation-aware cancellation of H·H, X·X and CNOT·CNOT pairs and
//! folding of diagonal phase gates into a single Z-power per run.

use super::{Circuit, CircuitError, GateKind, Instruction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    H(usize),
    X(usize),
    Cx(usize, usize),
    /// `T^k` with `k` taken mod 8.
    Phase(usize, u8),
}

impl Op {
    fn touches(self, q: usize) -> bool {
        match self {
            Op::H(a) | Op::X(a) | Op::Phase(a, _) => a == q,
            Op::Cx(c, t) => c == q || t == q,
        }
    }

    fn disjoint(self, other: Op) -> bool {
        match other {
            Op::H(a) | Op::X(a) | Op::Phase(a, _) => !self.touches(a),
            Op::Cx(c, t) => !self.touches(c) && !self.touches(t),
        }
    }
}

fn commute(a: Op, b: Op) -> bool {
    if a.disjoint(b) {
        return true;
    }
    match (a, b) {
        (Op::Phase(..), Op::Phase(..)) => true,
        (Op::Phase(q, _), Op::Cx(c, t)) | (Op::Cx(c, t), Op::Phase(q, _)) => q == c && q != t,
        (Op::X(q), Op::Cx(c, t)) | (Op::Cx(c, t), Op::X(q)) => q == t && q != c,
        (Op::Cx(c1, t1), Op::Cx(c2, t2)) => c1 != t2 && t1 != c2,
        (Op::X(_), Op::X(_)) => true,
        _ => false,
    }
}

/// Product of `earlier` then `later` when it is a single op or nothing.
fn fuse(earlier: Op, later: Op) -> Option<Option<Op>> {
    match (earlier, later) {
        (Op::H(a), Op::H(b)) | (Op::X(a), Op::X(b)) if a == b => Some(None),
        (Op::Cx(c1, t1), Op::Cx(c2, t2)) if c1 == c2 && t1 == t2 => Some(None),
        (Op::Phase(a, k1), Op::Phase(b, k2)) if a == b => {
            let k = (k1 + k2) % 8;
            Some((k != 0).then_some(Op::Phase(a, k)))
        }
        _ => None,
    }
}

fn pass(ops: &[Op]) -> Vec<Op> {
    let mut out: Vec<Option<Op>> = Vec::with_capacity(ops.len());
    'next: for &op in ops {
        for j in (0..out.len()).rev() {
            let Some(prev) = out[j] else { continue };
            if let Some(fused) = fuse(prev, op) {
                out[j] = fused;
                continue 'next;
            }
            if !commute(prev, op) {
                break;
            }
        }
        out.push(Some(op));
    }
    out.into_iter().flatten().collect()
}

/// Removes disposable gate sequences from a unitary Clifford+T circuit.
///
/// The result has the same unitary up to global phase, never more T gates,
/// and is a fixpoint of this function. Trailing measurements are kept.
pub fn peephole_simplify(c: &Circuit) -> Result<Circuit, CircuitError> {
    c.check_unitary()?;
    let end = c.unitary_prefix_len();
    let mut ops: Vec<Op> = c.instructions()[..end]
        .iter()
        .map(|inst| match *inst {
            Instruction::Gate { kind, qubit } => match kind {
                GateKind::H => Op::H(qubit),
                GateKind::X => Op::X(qubit),
                GateKind::S => Op::Phase(qubit, 2),
                GateKind::T => Op::Phase(qubit, 1),
            },
            Instruction::Cnot { control, target } => Op::Cx(control, target),
            _ => unreachable!("checked unitary prefix"),
        })
        .collect();
    loop {
        let next = pass(&ops);
        if next == ops {
            break;
        }
        ops = next;
    }
    let mut out = Circuit::new(c.num_qubits(), c.num_cbits());
    for op in ops {
        match op {
            Op::H(q) => out.push(Instruction::h(q))?,
            Op::X(q) => out.push(Instruction::x(q))?,
            Op::Cx(a, b) => out.push(Instruction::cx(a, b))?,
            Op::Phase(q, k) => {
                for _ in 0..k / 2 {
                    out.push(Instruction::s(q))?;
                }
                if k % 2 == 1 {
                    out.push(Instruction::t(q))?;
                }
            }
        }
    }
    out.extend(c.instructions()[end..].iter().cloned())?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse;
    use crate::reference::dense::circuit_unitary;
    use proptest::prelude::*;

    fn simplify(text: &str) -> Circuit {
        peephole_simplify(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn cancels_pairs() {
        assert!(simplify("qubits 1\nh q0\nh q0").is_empty());
        assert!(simplify("qubits 2\ncx q0 q1\ncx q0 q1").is_empty());
        assert!(simplify("qubits 1\ns q0\ns q0\ns q0\ns q0").is_empty());
        assert!(simplify("qubits 1\nt q0\ns q0\ns q0\ns q0\nt q0").is_empty());
    }

    #[test]
    fn cancels_through_commuting_gates() {
        // T on the control commutes through the CNOT; the CNOTs then meet.
        let c = simplify("qubits 2\ncx q0 q1\nt q0\ncx q0 q1\nt q0");
        assert_eq!(c.instructions(), &[Instruction::s(0)]);
        // X on the target commutes through the CNOT.
        assert!(simplify("qubits 2\nx q1\ncx q0 q1\nx q1\ncx q0 q1").is_empty());
        // H blocks everything on its qubit.
        assert_eq!(simplify("qubits 1\nt q0\nh q0\nt q0").t_count(), 2);
    }

    #[test]
    fn keeps_trailing_measurements_and_rejects_adaptive_input() {
        let c = simplify("qubits 1\nh q0\nh q0\nmeasure q0 -> c0");
        assert_eq!(c.instructions(), &[Instruction::measure(0, 0)]);
        let adaptive = parse("qubits 1\nmeasure q0 -> c0\nh q0").unwrap();
        assert!(peephole_simplify(&adaptive).is_err());
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Instruction> {
        prop_oneof![
            (0..n).prop_map(Instruction::h),
            (0..n).prop_map(Instruction::s),
            (0..n).prop_map(Instruction::t),
            (0..n).prop_map(Instruction::x),
            (0..n, 1..n).prop_map(move |(c, d)| Instruction::cx(c, (c + d) % n)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn preserves_unitary(gates in prop::collection::vec(arb_gate(3), 30)) {
            let mut c = Circuit::new(3, 3);
            c.extend(gates).unwrap();
            let s = peephole_simplify(&c).unwrap();
            prop_assert!(circuit_unitary(&s).equal_up_to_phase(&circuit_unitary(&c), 1e-9));
            prop_assert!(s.t_count() <= c.t_count());
            prop_assert_eq!(peephole_simplify(&s).unwrap(), s);
        }
    }
}
