mod common;

use common::{exact_eta_expectation, output_one_probability, with_stabilizer_inputs};
use pbc::bench::random_clifford_t;
use pbc::circuit::parse;
use pbc::engine::{run_shot, shot_rng};
use pbc::hybrid::{estimate, single_qubit_terms};
use pbc::reference::dense::born_distribution;
use pbc::{gadgetize, BackendKind, StateVector};

fn p_one(c: &pbc::Circuit, output: usize) -> f64 {
    born_distribution(c)
        .iter()
        .filter(|(k, _)| k[output])
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn estimator_is_exactly_unbiased() {
    for seed in 0..6 {
        let c = random_clifford_t(3, 3, 24, seed);
        let gc = gadgetize(&c).unwrap();
        for out in 0..3 {
            let e = exact_eta_expectation(&gc, out);
            assert!((e - p_one(&c, out)).abs() < 1e-10, "seed {seed} output {out}");
        }
    }
}

#[test]
fn deterministic_zero_circuit() {
    let c = parse("qubits 1\nt q0\nmeasure q0 -> c0").unwrap();
    let gc = gadgetize(&c).unwrap();
    assert!(exact_eta_expectation(&gc, 0).abs() < 1e-12);
    let est = estimate(&gc, 0, 1, 0.1, 0.01, BackendKind::StateVector, 3, false).unwrap();
    assert_eq!(est.n, 530);
    assert!(est.p_hat.abs() <= 0.1);
}

#[test]
fn engine_with_overrides_matches_stabilizer_inputs() {
    let c = random_clifford_t(3, 3, 30, 4);
    let gc = gadgetize(&c).unwrap();
    for term in single_qubit_terms().terms {
        let exact = output_one_probability(&with_stabilizer_inputs(&gc, &term.generators), gc.output_cbits[0]);
        let shots = 20_000;
        let mut ones = 0;
        for i in 0..shots {
            let mut rng = shot_rng(9, i);
            let mut sv = StateVector::init_magic(gc.t - 1).unwrap();
            let r = run_shot(&gc, &term.generators, &mut sv, &mut rng).unwrap();
            ones += r.output_bits[0] as usize;
            assert!(r.stats.num_quantum_measurements <= gc.t - 1);
        }
        let p = ones as f64 / shots as f64;
        assert!((p - exact).abs() < 0.02, "{:?}: {p} vs {exact}", term.generators);
    }
}

#[test]
fn random_circuit_estimate_within_epsilon() {
    let c = random_clifford_t(4, 3, 40, 21);
    let gc = gadgetize(&c).unwrap();
    for out in 0..4 {
        let est = estimate(&gc, out, 1, 0.1, 0.01, BackendKind::StateVector, 5 + out as u64, false).unwrap();
        assert!((est.p_hat - p_one(&c, out)).abs() <= 0.1, "output {out}");
    }
}

#[test]
fn too_many_virtual_qubits() {
    let c = random_clifford_t(2, 2, 10, 1);
    let gc = gadgetize(&c).unwrap();
    assert!(estimate(&gc, 0, 3, 0.1, 0.01, BackendKind::StateVector, 0, false).is_err());
}
