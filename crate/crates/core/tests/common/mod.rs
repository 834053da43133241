//! Dense oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64 as C;
use pbc::emit::Emission;
use pbc::pauli::{Pauli, PauliOperator};
use pbc::reference::dense::{apply_instruction, fidelity, pauli_matrix};
use pbc::reference::sim::{initial, merge, run, Branch};
use rand::{Rng, RngCore};

pub fn magic_state(t: usize) -> Vec<C> {
    let a = [
        C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        C::from_polar(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_PI_4),
    ];
    (0..1usize << t)
        .map(|b| (0..t).map(|q| a[b >> q & 1]).product())
        .collect()
}

pub fn random_pauli(width: usize, rng: &mut dyn RngCore) -> PauliOperator {
    loop {
        let ps: Vec<Pauli> = (0..width)
            .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)])
            .collect();
        let p = PauliOperator::from_paulis(&ps, rng.random::<bool>());
        if !p.is_identity() {
            return p;
        }
    }
}

/// `len` random Hermitian Paulis, each commuting with all earlier ones.
pub fn random_commuting_sequence(t: usize, len: usize, rng: &mut dyn RngCore) -> Vec<PauliOperator> {
    let mut out: Vec<PauliOperator> = Vec::new();
    while out.len() < len {
        let p = random_pauli(t, rng);
        if out.iter().all(|q| q.commutes(&p).unwrap()) {
            out.push(p);
        }
    }
    out
}

pub type Joint = BTreeMap<Vec<bool>, (f64, Vec<C>)>;

/// Joint outcome distribution and post-measurement states of measuring
/// `paulis` in order on `|A>^t`, from dense projectors.
pub fn projector_joint(paulis: &[PauliOperator], t: usize) -> Joint {
    let mut branches: Vec<(Vec<bool>, f64, Vec<C>)> = vec![(Vec::new(), 1.0, magic_state(t))];
    for p in paulis {
        let m = pauli_matrix(p);
        let mut next = Vec::new();
        for (key, prob, psi) in branches {
            let pm = m.apply(&psi);
            for outcome in [false, true] {
                let s = if outcome { -1.0 } else { 1.0 };
                let proj: Vec<C> = psi.iter().zip(&pm).map(|(a, b)| (a + b * s) * 0.5).collect();
                let q: f64 = proj.iter().map(|a| a.norm_sqr()).sum();
                if q < 1e-14 {
                    continue;
                }
                let mut k = key.clone();
                k.push(outcome);
                next.push((k, prob * q, proj.iter().map(|a| a / q.sqrt()).collect()));
            }
        }
        branches = next;
    }
    branches.into_iter().map(|(k, p, s)| (k, (p, s))).collect()
}

/// Restriction of `state` to the low `t` qubits, assuming the rest is in a
/// computational basis state.
pub fn main_register(state: &[C], t: usize) -> Vec<C> {
    let mask = (1usize << t) - 1;
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    for (i, a) in state.iter().enumerate() {
        *weights.entry(i & !mask).or_insert(0.0) += a.norm_sqr();
    }
    let (&high, &w) = weights
        .iter()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    assert!((w - 1.0).abs() < 1e-9, "auxiliary qubits are entangled with the register");
    (0..=mask).map(|m| state[high | m]).collect()
}

/// Joint outcome distribution of an emitted circuit by exact branch
/// simulation, merging branches with equal Pauli outcomes after each
/// segment. Frame blocks left out by elision are undone at the end.
pub fn emitted_joint(e: &Emission, t: usize) -> Result<Joint, String> {
    let insts = e.circuit.instructions();
    let mut branches: Vec<Branch> = initial(&e.circuit);
    let n = e.segments.len();
    for (i, seg) in e.segments.iter().enumerate() {
        branches = run(&insts[seg.clone()], branches);
        if i + 1 < n {
            let recs = &e.outcomes[..=i];
            branches = merge(branches, |b| recs.iter().map(|r| r.outcome(&b.cbits)).collect::<Vec<_>>(), 1e-9)?
                .into_iter()
                .map(|(_, b)| b)
                .collect();
        }
    }
    let mut out: Joint = BTreeMap::new();
    for mut b in branches {
        for block in e.frame.iter().rev() {
            for g in block {
                apply_instruction(&mut b.state, g);
            }
        }
        let key = e.outcome_bits(&b.cbits);
        let main = main_register(&b.state, t);
        match out.get_mut(&key) {
            None => {
                out.insert(key, (b.prob, main));
            }
            Some((p, s)) => {
                let f = fidelity(s, &main);
                if (1.0 - f).abs() > 1e-9 {
                    return Err(format!("final states for {key:?} differ (fidelity {f})"));
                }
                *p += b.prob;
            }
        }
    }
    Ok(out)
}

/// Largest probability deviation and smallest state fidelity between two
/// joint distributions.
pub fn compare_joint(a: &Joint, b: &Joint) -> (f64, f64) {
    let mut dev: f64 = 0.0;
    let mut fid: f64 = 1.0;
    let keys: std::collections::BTreeSet<&Vec<bool>> = a.keys().chain(b.keys()).collect();
    for k in keys {
        match (a.get(k), b.get(k)) {
            (Some((p, s)), Some((q, r))) => {
                dev = dev.max((p - q).abs());
                fid = fid.min(fidelity(s, r));
            }
            (Some((p, _)), None) | (None, Some((p, _))) => dev = dev.max(*p),
            (None, None) => unreachable!(),
        }
    }
    (dev, fid)
}

/// Empirical distribution of output strings.
pub fn empirical<K: Ord + Clone>(samples: impl IntoIterator<Item = K>) -> BTreeMap<K, f64> {
    let mut counts: BTreeMap<K, usize> = BTreeMap::new();
    let mut n = 0usize;
    for s in samples {
        *counts.entry(s).or_insert(0) += 1;
        n += 1;
    }
    counts.into_iter().map(|(k, c)| (k, c as f64 / n as f64)).collect()
}

/// The gadgetized circuit with its first `gens.len()` magic qubits prepared
/// in the stabilizer states of `gens` instead of `|A>`.
pub fn with_stabilizer_inputs(
    gc: &pbc::GadgetizedCircuit,
    gens: &[pbc::engine::StabilizerGenerator],
) -> pbc::Circuit {
    use pbc::circuit::InputState;
    use pbc::Instruction;
    let src = &gc.circuit;
    let mut c = pbc::Circuit::new(src.num_qubits(), src.num_cbits());
    for q in gc.n_main + gens.len()..src.num_qubits() {
        c.set_input(q, InputState::Magic).unwrap();
    }
    for (j, g) in gens.iter().enumerate() {
        let q = gc.n_main + j;
        let prep = match (g.pauli, g.negative) {
            (Pauli::X, false) => vec![Instruction::h(q)],
            (Pauli::X, true) => vec![Instruction::x(q), Instruction::h(q)],
            (Pauli::Y, false) => vec![Instruction::h(q), Instruction::s(q)],
            (Pauli::Y, true) => vec![Instruction::x(q), Instruction::h(q), Instruction::s(q)],
            (Pauli::Z, false) => vec![],
            (Pauli::Z, true) => vec![Instruction::x(q)],
            (Pauli::I, _) => panic!("identity generator"),
        };
        c.extend(prep).unwrap();
    }
    c.extend(src.instructions().iter().cloned()).unwrap();
    c
}

/// Exact probability that output bit `output` is 1.
pub fn output_one_probability(c: &pbc::Circuit, cbit: usize) -> f64 {
    pbc::reference::sim::distribution(c, |b| b.cbits[cbit])
        .get(&true)
        .copied()
        .unwrap_or(0.0)
}

/// Exact expectation of the importance-sampling estimator for `k = 1`:
/// every term weighted by its sampling probability and every outcome by
/// its exact probability.
pub fn exact_eta_expectation(gc: &pbc::GadgetizedCircuit, output: usize) -> f64 {
    let d = pbc::hybrid::single_qubit_terms();
    let mut e = 0.0;
    for term in &d.terms {
        let pi = term.coefficient.abs() / d.l1_norm;
        let c = with_stabilizer_inputs(gc, &term.generators);
        let p1 = output_one_probability(&c, gc.output_cbits[output]);
        let negative = term.coefficient < 0.0;
        e += pi * (1.0 - p1) * pbc::hybrid::eta(negative, false, d.l1_norm);
        e += pi * p1 * pbc::hybrid::eta(negative, true, d.l1_norm);
    }
    e
}
