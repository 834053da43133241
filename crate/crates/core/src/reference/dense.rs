//! Dense matrices and state vectors. Qubit 0 is the least significant bit of
//! a basis index.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::circuit::{Circuit, CondKind, GateKind, Instruction};
use crate::pauli::{Pauli, PauliOperator};

pub type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            m.data[r * dim..(r + 1) * dim].copy_from_slice(row);
        }
        m
    }

    pub fn diagonal(entries: &[C]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = *e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C) {
        self.data[r * self.dim + c] = v;
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: C) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    /// `self ⊗ other`, with `other` on the low-order qubits.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Matrix::zeros(n);
        for r1 in 0..a {
            for c1 in 0..a {
                let x = self.data[r1 * a + c1];
                if x == ZERO {
                    continue;
                }
                for r2 in 0..b {
                    for c2 in 0..b {
                        out.data[(r1 * b + r2) * n + c1 * b + c2] = x * other.data[r2 * b + c2];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        let n = self.dim;
        (0..n)
            .map(|r| (0..n).map(|c| self.data[r * n + c] * v[c]).sum())
            .collect()
    }

    /// True when `self = e^{iθ} other` for some θ, entrywise within `tol`.
    pub fn equal_up_to_phase(&self, other: &Matrix, tol: f64) -> bool {
        let Some((idx, _)) = other
            .data
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        else {
            return true;
        };
        if other.data[idx].norm() < tol {
            return self.max_abs() < tol;
        }
        let phase = self.data[idx] / other.data[idx];
        if (phase.norm() - 1.0).abs() > tol {
            return false;
        }
        self.sub(&other.scale(phase)).max_abs() < tol
    }
}

pub fn single_qubit(p: Pauli) -> Matrix {
    let i = C::new(0.0, 1.0);
    match p {
        Pauli::I => Matrix::identity(2),
        Pauli::X => Matrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
        Pauli::Y => Matrix::from_rows(&[vec![ZERO, -i], vec![i, ZERO]]),
        Pauli::Z => Matrix::diagonal(&[ONE, -ONE]),
    }
}

/// Dense matrix of `i^phase ∏ X^x Z^z`, built per qubit from 2×2 products.
pub fn pauli_matrix(p: &PauliOperator) -> Matrix {
    let mut m = Matrix::identity(1);
    for q in (0..p.width()).rev() {
        let mut local = Matrix::identity(2);
        if p.x_bit(q) {
            local = local.mul(&single_qubit(Pauli::X));
        }
        if p.z_bit(q) {
            local = local.mul(&single_qubit(Pauli::Z));
        }
        m = m.kron(&local);
    }
    m.scale(C::new(0.0, 1.0).powu(p.phase() as u32))
}

pub fn h() -> [[C; 2]; 2] {
    let a = C::new(FRAC_1_SQRT_2, 0.0);
    [[a, a], [a, -a]]
}

pub fn s() -> [[C; 2]; 2] {
    [[ONE, ZERO], [ZERO, C::new(0.0, 1.0)]]
}

pub fn t() -> [[C; 2]; 2] {
    [[ONE, ZERO], [ZERO, C::from_polar(1.0, FRAC_PI_4)]]
}

pub fn x() -> [[C; 2]; 2] {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn z() -> [[C; 2]; 2] {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn gate_2x2(kind: GateKind) -> [[C; 2]; 2] {
    match kind {
        GateKind::H => h(),
        GateKind::S => s(),
        GateKind::T => t(),
        GateKind::X => x(),
    }
}

pub fn cond_2x2(kind: CondKind) -> [[C; 2]; 2] {
    match kind {
        CondKind::S => s(),
        CondKind::X => x(),
        CondKind::Z => z(),
    }
}

pub fn apply_1q(state: &mut [C], q: usize, m: [[C; 2]; 2]) {
    let bit = 1usize << q;
    for i in 0..state.len() {
        if i & bit == 0 {
            let (a, b) = (state[i], state[i | bit]);
            state[i] = m[0][0] * a + m[0][1] * b;
            state[i | bit] = m[1][0] * a + m[1][1] * b;
        }
    }
}

pub fn apply_cx(state: &mut [C], control: usize, target: usize) {
    let (cb, tb) = (1usize << control, 1usize << target);
    for i in 0..state.len() {
        if i & cb != 0 && i & tb == 0 {
            state.swap(i, i | tb);
        }
    }
}

/// Applies a unitary instruction; panics on measurement-type instructions.
pub fn apply_instruction(state: &mut [C], inst: &Instruction) {
    match inst {
        Instruction::Gate { kind, qubit } => apply_1q(state, *qubit, gate_2x2(*kind)),
        Instruction::Cnot { control, target } => apply_cx(state, *control, *target),
        other => panic!("not a unitary instruction: {other:?}"),
    }
}

fn embed_1q(n: usize, q: usize, m: [[C; 2]; 2]) -> Matrix {
    let local = Matrix::from_rows(&[vec![m[0][0], m[0][1]], vec![m[1][0], m[1][1]]]);
    let id = Matrix::identity(2);
    let mut out = Matrix::identity(1);
    for j in (0..n).rev() {
        out = out.kron(if j == q { &local } else { &id });
    }
    out
}

/// Full unitary of the gates before any trailing measurements.
pub fn circuit_unitary(c: &Circuit) -> Matrix {
    let n = c.num_qubits();
    let dim = 1usize << n;
    let mut u = Matrix::identity(dim);
    for inst in c.instructions() {
        let g = match inst {
            Instruction::Gate { kind, qubit } => embed_1q(n, *qubit, gate_2x2(*kind)),
            Instruction::Cnot { control, target } => {
                let mut m = Matrix::zeros(dim);
                for b in 0..dim {
                    let out = if b >> control & 1 == 1 { b ^ (1 << target) } else { b };
                    m.set(out, b, ONE);
                }
                m
            }
            Instruction::Measure { .. } => continue,
            other => panic!("not a unitary instruction: {other:?}"),
        };
        u = g.mul(&u);
    }
    u
}

pub fn zero_state(n: usize) -> Vec<C> {
    let mut v = vec![ZERO; 1 << n];
    v[0] = ONE;
    v
}

/// Initial state described by the circuit's input labels.
pub fn input_state(c: &Circuit) -> Vec<C> {
    let mut v = zero_state(c.num_qubits());
    for (q, s) in c.inputs().iter().enumerate() {
        if *s == crate::circuit::InputState::Magic {
            apply_1q(&mut v, q, h());
            apply_1q(&mut v, q, t());
        }
    }
    v
}

/// Exact output distribution of a unitary circuit with trailing
/// measurements. Keys list the measured bits in measurement order.
pub fn born_distribution(c: &Circuit) -> BTreeMap<Vec<bool>, f64> {
    let mut state = input_state(c);
    let mut measured = Vec::new();
    for inst in c.instructions() {
        match inst {
            Instruction::Measure { qubit, .. } => measured.push(*qubit),
            other => {
                assert!(measured.is_empty(), "gate after measurement");
                apply_instruction(&mut state, other);
            }
        }
    }
    let mut out = BTreeMap::new();
    for (b, a) in state.iter().enumerate() {
        let p = a.norm_sqr();
        if p < 1e-15 {
            continue;
        }
        let key: Vec<bool> = measured.iter().map(|q| b >> q & 1 == 1).collect();
        *out.entry(key).or_insert(0.0) += p;
    }
    out
}

/// Total variation distance between two distributions.
pub fn tvd<K: Ord + Clone>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
        / 2.0
}

/// `|<a|b>|^2` for normalized vectors.
pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm_sqr()
}
