//! Exact branch-enumerating simulation of adaptive circuits.
//!
//! Every measurement or reset splits a branch in two; branches carry their
//! probability, a normalized state and the classical register. Callers can
//! merge branches that agree on a key, which keeps enumeration tractable for
//! circuits with many auxiliary measurements.

use std::collections::BTreeMap;

use super::dense::{apply_1q, apply_cx, cond_2x2, gate_2x2, input_state, x, C};
use crate::circuit::{Circuit, Instruction};

const DROP: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct Branch {
    pub prob: f64,
    pub state: Vec<C>,
    pub cbits: Vec<bool>,
}

pub fn initial(c: &Circuit) -> Vec<Branch> {
    vec![Branch {
        prob: 1.0,
        state: input_state(c),
        cbits: vec![false; c.num_cbits()],
    }]
}

fn split(b: Branch, q: usize) -> Vec<(bool, Branch)> {
    let bit = 1usize << q;
    let mut weight = [0.0f64; 2];
    for (i, a) in b.state.iter().enumerate() {
        weight[(i & bit != 0) as usize] += a.norm_sqr();
    }
    let total = weight[0] + weight[1];
    let mut out = Vec::with_capacity(2);
    for outcome in [false, true] {
        let w = weight[outcome as usize];
        let p = w / total;
        if p < DROP {
            continue;
        }
        let norm = w.sqrt();
        let state = b
            .state
            .iter()
            .enumerate()
            .map(|(i, a)| if (i & bit != 0) == outcome { a / norm } else { C::new(0.0, 0.0) })
            .collect();
        out.push((
            outcome,
            Branch {
                prob: b.prob * p,
                state,
                cbits: b.cbits.clone(),
            },
        ));
    }
    out
}

/// Runs `insts` on every branch.
pub fn run(insts: &[Instruction], mut branches: Vec<Branch>) -> Vec<Branch> {
    for inst in insts {
        match inst {
            Instruction::Gate { kind, qubit } => {
                for b in &mut branches {
                    apply_1q(&mut b.state, *qubit, gate_2x2(*kind));
                }
            }
            Instruction::Cnot { control, target } => {
                for b in &mut branches {
                    apply_cx(&mut b.state, *control, *target);
                }
            }
            Instruction::CondGate {
                kind,
                qubit,
                condition,
            } => {
                for b in &mut branches {
                    if condition.evaluate(&b.cbits) {
                        apply_1q(&mut b.state, *qubit, cond_2x2(*kind));
                    }
                }
            }
            Instruction::Measure { qubit, cbit } => {
                branches = branches
                    .into_iter()
                    .flat_map(|b| split(b, *qubit))
                    .map(|(outcome, mut b)| {
                        b.cbits[*cbit] = outcome;
                        b
                    })
                    .collect();
            }
            Instruction::Reset { qubit } => {
                branches = branches
                    .into_iter()
                    .flat_map(|b| split(b, *qubit))
                    .map(|(outcome, mut b)| {
                        if outcome {
                            apply_1q(&mut b.state, *qubit, x());
                        }
                        b
                    })
                    .collect();
            }
        }
    }
    branches
}

/// Merges branches with equal keys. Merged states must agree up to a global
/// phase (fidelity within `tol` of one); otherwise the key does not determine
/// the state and an error describing the mismatch is returned.
pub fn merge<K: Ord + Clone>(
    branches: Vec<Branch>,
    key: impl Fn(&Branch) -> K,
    tol: f64,
) -> Result<Vec<(K, Branch)>, String> {
    let mut groups: BTreeMap<K, Branch> = BTreeMap::new();
    for b in branches {
        let k = key(&b);
        match groups.get_mut(&k) {
            None => {
                groups.insert(k, b);
            }
            Some(rep) => {
                let f = super::dense::fidelity(&rep.state, &b.state);
                if (1.0 - f).abs() > tol {
                    return Err(format!("branches with equal key differ (fidelity {f})"));
                }
                rep.prob += b.prob;
            }
        }
    }
    Ok(groups.into_iter().collect())
}

/// Probability of each value of `key` after running the whole circuit.
pub fn distribution<K: Ord>(c: &Circuit, key: impl Fn(&Branch) -> K) -> BTreeMap<K, f64> {
    let mut out = BTreeMap::new();
    for b in run(c.instructions(), initial(c)) {
        *out.entry(key(&b)).or_insert(0.0) += b.prob;
    }
    out
}
