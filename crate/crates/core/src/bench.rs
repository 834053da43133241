//! Benchmark circuit families: hidden-shift circuits, grid random circuits
//! and plain random Clifford+T circuits, plus the advantage-boundary bound.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{peephole_simplify, Circuit, CircuitError, Instruction};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("hidden-shift circuits need an even number of qubits, got {0}")]
    OddQubits(usize),
    #[error("a CCZ needs 3 distinct qubits but the oracle acts on {0}")]
    TooFewForCcz(usize),
    #[error("hidden string has {got} bits, expected {expected}")]
    HiddenLength { got: usize, expected: usize },
    #[error("grid {cols}x{rows} does not match {n} qubits")]
    Grid { cols: usize, rows: usize, n: usize },
    #[error("no circuit with T-count {target} after {retries} tries; achieved counts {achieved:?}")]
    RetriesExhausted {
        target: usize,
        retries: usize,
        achieved: BTreeMap<usize, usize>,
    },
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HscSpec {
    pub n: usize,
    pub n_ccz: usize,
    /// Gates per {Z, CZ} segment.
    pub n_zcz: usize,
    pub seed: u64,
    /// Drawn from the seed when absent.
    pub hidden: Option<Vec<bool>>,
}

impl HscSpec {
    pub fn new(n: usize, n_ccz: usize, seed: u64) -> Self {
        HscSpec {
            n,
            n_ccz,
            n_zcz: 10,
            seed,
            hidden: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Hsc {
    pub circuit: Circuit,
    pub hidden_string: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RqcSpec {
    pub cols: usize,
    pub rows: usize,
    pub cycles: usize,
    pub t_target: usize,
    pub seed: u64,
    pub max_retries: usize,
}

/// Sidecar written next to a generated circuit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchSidecar {
    pub spec: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden_string: Option<String>,
    pub achieved_t_count: usize,
}

/// Lower bound on the T-count above which sampling by PBC beats the direct
/// circuit for a grid circuit with `cycles` entangling layers.
pub fn boundary_lower_bound(cycles: usize) -> f64 {
    -2.5 + ((4 * cycles + 37) as f64).sqrt() / 2.0
}

fn z(q: usize) -> [Instruction; 2] {
    [Instruction::s(q), Instruction::s(q)]
}

fn cz(a: usize, b: usize) -> [Instruction; 3] {
    [Instruction::h(b), Instruction::cx(a, b), Instruction::h(b)]
}

fn tdg(q: usize) -> [Instruction; 4] {
    [Instruction::s(q), Instruction::s(q), Instruction::s(q), Instruction::t(q)]
}

/// CCZ as a phase polynomial: T on a, b, c and a^b^c, T^† on the pairwise
/// parities. Seven T gates and six CNOTs.
pub fn ccz(a: usize, b: usize, c: usize) -> Vec<Instruction> {
    let mut out = vec![Instruction::t(a), Instruction::t(b), Instruction::t(c)];
    out.push(Instruction::cx(b, c));
    out.extend(tdg(c));
    out.push(Instruction::cx(a, c));
    out.push(Instruction::t(c));
    out.push(Instruction::cx(b, c));
    out.extend(tdg(c));
    out.push(Instruction::cx(a, b));
    out.extend(tdg(b));
    out.push(Instruction::cx(a, b));
    out.push(Instruction::cx(a, c));
    out
}

enum OracleGate {
    Z(usize),
    Cz(usize, usize),
    Ccz(usize, usize, usize),
}

fn random_segment(rng: &mut ChaCha8Rng, width: usize, len: usize, out: &mut Vec<OracleGate>) {
    for _ in 0..len {
        if width >= 2 && rng.random::<bool>() {
            let pick: Vec<usize> = rand::seq::index::sample(rng, width, 2).into_vec();
            out.push(OracleGate::Cz(pick[0], pick[1]));
        } else {
            out.push(OracleGate::Z(rng.random_range(0..width)));
        }
    }
}

fn expand(gates: &[OracleGate], offset: usize, out: &mut Vec<Instruction>) {
    for g in gates {
        match *g {
            OracleGate::Z(q) => out.extend(z(q + offset)),
            OracleGate::Cz(a, b) => out.extend(cz(a + offset, b + offset)),
            OracleGate::Ccz(a, b, c) => out.extend(ccz(a + offset, b + offset, c + offset)),
        }
    }
}

/// Hidden-shift circuit `H O_f' H O_f H` followed by measurement of every
/// qubit. The output is the hidden string on every shot.
pub fn gen_hsc(spec: &HscSpec) -> Result<Hsc, BenchError> {
    let n = spec.n;
    if n % 2 == 1 || n == 0 {
        return Err(BenchError::OddQubits(n));
    }
    let half = n / 2;
    if spec.n_ccz > 0 && half < 3 {
        return Err(BenchError::TooFewForCcz(half));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let hidden = match &spec.hidden {
        Some(s) if s.len() != n => {
            return Err(BenchError::HiddenLength {
                got: s.len(),
                expected: n,
            })
        }
        Some(s) => s.clone(),
        None => (0..n).map(|_| rng.random::<bool>()).collect(),
    };

    let mut og = Vec::new();
    random_segment(&mut rng, half, spec.n_zcz, &mut og);
    for _ in 0..spec.n_ccz {
        let q: Vec<usize> = rand::seq::index::sample(&mut rng, half, 3).into_vec();
        og.push(OracleGate::Ccz(q[0], q[1], q[2]));
        random_segment(&mut rng, half, spec.n_zcz, &mut og);
    }

    let mut insts = Vec::new();
    let h_all = |insts: &mut Vec<Instruction>| insts.extend((0..n).map(Instruction::h));
    let cz_layer = |insts: &mut Vec<Instruction>| {
        for i in 0..half {
            insts.extend(cz(i, i + half));
        }
    };
    h_all(&mut insts);
    // O_f: O_g on the first half, then the CZ layer.
    expand(&og, 0, &mut insts);
    cz_layer(&mut insts);
    h_all(&mut insts);
    // O_f': Z(s), O_g on the second half, then the CZ layer.
    for (q, &bit) in hidden.iter().enumerate() {
        if bit {
            insts.extend(z(q));
        }
    }
    expand(&og, half, &mut insts);
    cz_layer(&mut insts);
    h_all(&mut insts);
    insts.extend((0..n).map(|q| Instruction::measure(q, q)));

    let mut circuit = Circuit::new(n, n);
    circuit.extend(insts)?;
    Ok(Hsc {
        circuit,
        hidden_string: hidden,
    })
}

/// Disjoint neighbour pairs of pattern `index` (mod 8) on a `cols x rows`
/// grid with qubit `r * cols + c`. Patterns 0..4 are horizontal, 4..8
/// vertical; bit 0 picks the offset and bit 1 staggers it by row (column).
pub fn grid_pattern(cols: usize, rows: usize, index: usize) -> Vec<(usize, usize)> {
    let index = index % 8;
    let offset = index & 1;
    let stagger = (index >> 1) & 1;
    let mut pairs = Vec::new();
    if index < 4 {
        for r in 0..rows {
            for c in 0..cols.saturating_sub(1) {
                if c % 2 == (offset + stagger * r) % 2 {
                    pairs.push((r * cols + c, r * cols + c + 1));
                }
            }
        }
    } else {
        for c in 0..cols {
            for r in 0..rows.saturating_sub(1) {
                if r % 2 == (offset + stagger * c) % 2 {
                    pairs.push((r * cols + c, (r + 1) * cols + c));
                }
            }
        }
    }
    pairs
}

fn rqc_attempt(spec: &RqcSpec, p_t: f64, rng: &mut ChaCha8Rng) -> Result<Circuit, BenchError> {
    let n = spec.cols * spec.rows;
    let mut c = Circuit::new(n, n);
    c.extend((0..n).map(Instruction::h))?;
    for cycle in 0..spec.cycles {
        let pairs = grid_pattern(spec.cols, spec.rows, cycle);
        let mut busy = vec![false; n];
        for &(a, b) in &pairs {
            busy[a] = true;
            busy[b] = true;
            c.extend(cz(a, b))?;
        }
        for q in (0..n).filter(|&q| !busy[q]) {
            let u: f64 = rng.random();
            let g = if u < p_t {
                Instruction::t(q)
            } else if u < p_t + (1.0 - p_t) / 2.0 {
                Instruction::s(q)
            } else {
                Instruction::h(q)
            };
            c.push(g)?;
        }
    }
    c.extend((0..n).map(|q| Instruction::measure(q, q)))?;
    Ok(peephole_simplify(&c)?)
}

/// Grid random circuit post-selected on its T-count after simplification.
pub fn gen_rqc(spec: &RqcSpec) -> Result<Circuit, BenchError> {
    let n = spec.cols * spec.rows;
    if n == 0 {
        return Err(BenchError::Grid {
            cols: spec.cols,
            rows: spec.rows,
            n,
        });
    }
    let slots: usize = (0..spec.cycles)
        .map(|i| n - 2 * grid_pattern(spec.cols, spec.rows, i).len())
        .sum();
    if spec.t_target > slots {
        return Err(BenchError::Invalid(format!(
            "T-count {} exceeds the {} single-qubit slots",
            spec.t_target, slots
        )));
    }
    let p_t = if slots == 0 {
        0.0
    } else {
        spec.t_target as f64 / slots as f64
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut achieved = BTreeMap::new();
    for _ in 0..spec.max_retries.max(1) {
        let c = rqc_attempt(spec, p_t, &mut rng)?;
        if c.t_count() == spec.t_target {
            return Ok(c);
        }
        *achieved.entry(c.t_count()).or_insert(0) += 1;
    }
    Err(BenchError::RetriesExhausted {
        target: spec.t_target,
        retries: spec.max_retries.max(1),
        achieved,
    })
}

/// Random unitary Clifford+T circuit with `gates` gates of which exactly `t`
/// are T, followed by measurement of every qubit.
pub fn random_clifford_t(n: usize, t: usize, gates: usize, seed: u64) -> Circuit {
    assert!(n >= 1 && gates >= t, "need at least one qubit and t <= gates");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_t = vec![false; gates];
    is_t[..t].iter_mut().for_each(|b| *b = true);
    is_t.shuffle(&mut rng);
    let mut c = Circuit::new(n, n);
    for &tee in &is_t {
        let q = rng.random_range(0..n);
        let inst = if tee {
            Instruction::t(q)
        } else {
            match rng.random_range(0..if n > 1 { 4 } else { 3 }) {
                0 => Instruction::h(q),
                1 => Instruction::s(q),
                2 => Instruction::x(q),
                _ => Instruction::cx(q, (q + rng.random_range(1..n)) % n),
            }
        };
        c.push(inst).expect("qubits in range");
    }
    c.extend((0..n).map(|q| Instruction::measure(q, q)))
        .expect("qubits in range");
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::dense::{born_distribution, circuit_unitary, Matrix};
    use num_complex::Complex64;

    #[test]
    fn ccz_block_is_ccz() {
        let mut c = Circuit::new(3, 0);
        c.extend(ccz(0, 1, 2)).unwrap();
        assert_eq!(c.t_count(), 7);
        assert_eq!(c.metrics().count_cnot, 6);
        let mut d = vec![Complex64::new(1.0, 0.0); 8];
        d[7] = Complex64::new(-1.0, 0.0);
        let u = circuit_unitary(&c);
        assert!(u.sub(&Matrix::diagonal(&d)).max_abs() < 1e-12);
    }

    #[test]
    fn boundary_values() {
        assert!((boundary_lower_bound(22) - 3.0902).abs() < 1e-4);
        assert!((boundary_lower_bound(0) - 0.5414).abs() < 1e-4);
        assert!((boundary_lower_bound(40) - 4.5178).abs() < 1e-4);
    }

    #[test]
    fn hsc_is_deterministic_on_the_hidden_string() {
        for (n, n_ccz, seed) in [(6, 1, 1), (6, 0, 2), (8, 1, 3), (6, 2, 4)] {
            let hsc = gen_hsc(&HscSpec::new(n, n_ccz, seed)).unwrap();
            assert_eq!(hsc.circuit.t_count(), 14 * n_ccz);
            let dist = born_distribution(&hsc.circuit);
            let p = dist.get(&hsc.hidden_string).copied().unwrap_or(0.0);
            assert!((p - 1.0).abs() < 1e-9, "n={n} seed={seed} p={p}");
        }
    }

    #[test]
    fn hsc_rejects_bad_specs() {
        assert!(matches!(gen_hsc(&HscSpec::new(5, 0, 0)), Err(BenchError::OddQubits(5))));
        assert!(matches!(gen_hsc(&HscSpec::new(4, 1, 0)), Err(BenchError::TooFewForCcz(2))));
        let mut s = HscSpec::new(6, 1, 0);
        s.hidden = Some(vec![true; 3]);
        assert!(gen_hsc(&s).is_err());
    }

    #[test]
    fn hsc_uses_supplied_string() {
        let mut s = HscSpec::new(6, 1, 9);
        s.hidden = Some(vec![true, false, true, true, false, false]);
        let hsc = gen_hsc(&s).unwrap();
        assert_eq!(hsc.hidden_string, s.hidden.unwrap());
    }

    #[test]
    fn patterns_are_disjoint_neighbour_pairs() {
        let (cols, rows) = (5, 5);
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..8 {
            let pairs = grid_pattern(cols, rows, i);
            let mut used = vec![false; cols * rows];
            for &(a, b) in &pairs {
                assert!(!used[a] && !used[b]);
                used[a] = true;
                used[b] = true;
                let (ra, ca, rb, cb) = (a / cols, a % cols, b / cols, b % cols);
                assert_eq!(ra.abs_diff(rb) + ca.abs_diff(cb), 1);
            }
            seen.insert(pairs);
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn rqc_hits_target_and_is_reproducible() {
        let spec = RqcSpec {
            cols: 2,
            rows: 2,
            cycles: 8,
            t_target: 3,
            seed: 5,
            max_retries: 1000,
        };
        let c = gen_rqc(&spec).unwrap();
        assert_eq!(c.t_count(), 3);
        assert_eq!(gen_rqc(&spec).unwrap(), c);
        let big = RqcSpec {
            cols: 5,
            rows: 5,
            cycles: 40,
            t_target: 13,
            seed: 1,
            max_retries: 1000,
        };
        let c = gen_rqc(&big).unwrap();
        assert_eq!(c.t_count(), 13);
        assert!(c.metrics().depth >= big.cycles + 2);
    }

    #[test]
    fn random_clifford_t_shape() {
        let c = random_clifford_t(4, 5, 40, 1);
        assert_eq!(c.t_count(), 5);
        assert_eq!(c.len(), 44);
        assert!(c.check_unitary().is_ok());
    }
}
