//! Signed Pauli operators over GF(2) with exact i-power phases, Clifford
//! conjugation rules, and an incremental basis of commuting operators.
//!
//! An operator is stored as `i^phase * prod_j X_j^{x_j} Z_j^{z_j}` where, on
//! each qubit, the X factor stands to the left of the Z factor. With this
//! convention `Y = i X Z`, so a bare `Y` has `x = z = 1` and `phase = 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("reflection operators must anticommute")]
    NotAnticommuting,
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("dependent operator resolved to an imaginary sign (internal invariant violated)")]
    ImaginaryPhase,
    #[error("operator is not independent of the basis")]
    NotIndependent,
    #[error("operator does not commute with row {0} of the basis")]
    DoesNotCommute(usize),
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
}

/// Single-qubit Pauli label, used for construction and display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Clifford generators a Pauli can be pushed through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    width: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

#[inline]
fn words(width: usize) -> usize {
    width.div_ceil(WORD)
}

#[inline]
fn parity(words: impl Iterator<Item = u64>) -> bool {
    words.fold(0u64, |acc, w| acc ^ w).count_ones() & 1 == 1
}

impl PauliOperator {
    pub fn identity(width: usize) -> Self {
        PauliOperator {
            width,
            x: vec![0; words(width)],
            z: vec![0; words(width)],
            phase: 0,
        }
    }

    /// Hermitian operator `sign * P_q` for a single-qubit Pauli `P` on qubit `q`.
    pub fn single(width: usize, qubit: usize, p: Pauli) -> Result<Self, PauliError> {
        let mut op = Self::identity(width);
        op.check_qubit(qubit)?;
        op.set(qubit, p);
        Ok(op)
    }

    pub fn z(width: usize, qubit: usize) -> Result<Self, PauliError> {
        Self::single(width, qubit, Pauli::Z)
    }

    /// Builds the Hermitian operator `(-1)^negative * prod_j paulis[j]`.
    pub fn from_paulis(paulis: &[Pauli], negative: bool) -> Self {
        let mut op = Self::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            op.set(q, p);
        }
        if negative {
            op.negate();
        }
        op
    }

    /// Raw constructor from bits and phase exponent.
    pub fn from_bits(x_bits: &[bool], z_bits: &[bool], phase: u8) -> Result<Self, PauliError> {
        if x_bits.len() != z_bits.len() {
            return Err(PauliError::WidthMismatch(x_bits.len(), z_bits.len()));
        }
        let mut op = Self::identity(x_bits.len());
        for q in 0..x_bits.len() {
            op.set_bits(q, x_bits[q], z_bits[q]);
        }
        op.phase = phase & 3;
        Ok(op)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / WORD] >> (q % WORD) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / WORD] >> (q % WORD) & 1 == 1
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Pauli letter acting on qubit `q`, ignoring the overall phase.
    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / WORD, q % WORD);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((z as u64) << b);
    }

    /// Replaces the factor on qubit `q` by the Hermitian letter `p`, keeping
    /// the operator's sign (the `i` carried by a `Y` is adjusted for).
    pub fn set(&mut self, q: usize, p: Pauli) {
        let old_y = (self.x_bit(q) && self.z_bit(q)) as u8;
        let (x, z) = p.bits();
        self.set_bits(q, x, z);
        let new_y = (x && z) as u8;
        self.phase = (self.phase + 4 - old_y + new_y) & 3;
    }

    fn check_qubit(&self, q: usize) -> Result<(), PauliError> {
        if q >= self.width {
            Err(PauliError::QubitOutOfRange {
                qubit: q,
                width: self.width,
            })
        } else {
            Ok(())
        }
    }

    fn check_width(&self, other: &Self) -> Result<(), PauliError> {
        if self.width != other.width {
            Err(PauliError::WidthMismatch(self.width, other.width))
        } else {
            Ok(())
        }
    }

    fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones())
            .sum()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits on which the operator acts non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.width)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + self.y_count()) % 2 == 0
    }

    /// For a Hermitian operator, true when it equals `-prod_j sigma_j`.
    pub fn is_negative(&self) -> bool {
        (self.phase as u32 + 4 - self.y_count() % 4) % 4 == 2
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.negate();
        p
    }

    /// Same letters with a `+` sign.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = (self.y_count() % 4) as u8;
        p
    }

    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_width(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        let it = self
            .x
            .iter()
            .zip(&other.z)
            .map(|(a, b)| a & b)
            .chain(self.z.iter().zip(&other.x).map(|(a, b)| a & b));
        !parity(it)
    }

    /// Exact operator product `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_width(other)?;
        Ok(self.multiply_unchecked(other))
    }

    pub(crate) fn multiply_unchecked(&self, other: &Self) -> Self {
        // Z^{z1} X^{x2} = (-1)^{z1 x2} X^{x2} Z^{z1} on every qubit.
        let swaps: u32 = self
            .z
            .iter()
            .zip(&other.x)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        PauliOperator {
            width: self.width,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            phase: ((self.phase as u32 + other.phase as u32 + 2 * (swaps & 1)) & 3) as u8,
        }
    }

    pub(crate) fn mul_assign_unchecked(&mut self, other: &Self) {
        let swaps: u32 = self
            .z
            .iter()
            .zip(&other.x)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * (swaps & 1)) & 3) as u8;
    }

    /// Replaces `self` by `g^dagger self g`.
    pub fn conjugate_by_gate(&mut self, g: CliffordGate) -> Result<(), PauliError> {
        match g {
            CliffordGate::H(q) | CliffordGate::S(q) | CliffordGate::X(q) | CliffordGate::Z(q) => {
                self.check_qubit(q)?
            }
            CliffordGate::Cnot(c, t) => {
                self.check_qubit(c)?;
                self.check_qubit(t)?;
                if c == t {
                    return Err(PauliError::QubitOutOfRange {
                        qubit: t,
                        width: self.width,
                    });
                }
            }
        }
        self.conjugate_unchecked(g);
        Ok(())
    }

    #[inline]
    pub(crate) fn conjugate_unchecked(&mut self, g: CliffordGate) {
        match g {
            CliffordGate::H(q) => {
                // X^x Z^z -> Z^x X^z = (-1)^{xz} X^z Z^x
                let (x, z) = (self.x_bit(q), self.z_bit(q));
                if x && z {
                    self.phase = (self.phase + 2) & 3;
                }
                self.set_bits(q, z, x);
            }
            CliffordGate::S(q) => {
                // S^dag X S = -i X Z, S^dag Z S = Z
                if self.x_bit(q) {
                    let z = self.z_bit(q);
                    self.set_bits(q, true, !z);
                    self.phase = (self.phase + 3) & 3;
                }
            }
            CliffordGate::X(q) => {
                if self.z_bit(q) {
                    self.phase = (self.phase + 2) & 3;
                }
            }
            CliffordGate::Z(q) => {
                if self.x_bit(q) {
                    self.phase = (self.phase + 2) & 3;
                }
            }
            CliffordGate::Cnot(c, t) => {
                // X_c -> X_c X_t, Z_t -> Z_c Z_t; no sign in this normal form.
                let (xc, zt) = (self.x_bit(c), self.z_bit(t));
                if xc {
                    let (w, b) = (t / WORD, t % WORD);
                    self.x[w] ^= 1 << b;
                }
                if zt {
                    let (w, b) = (c / WORD, c % WORD);
                    self.z[w] ^= 1 << b;
                }
            }
        }
    }

    /// Operator restricted to qubits `start..start + len`, with the phase kept.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let mut out = Self::identity(len);
        for q in 0..len {
            out.set_bits(q, self.x_bit(start + q), self.z_bit(start + q));
        }
        out.phase = self.phase;
        out
    }

    /// True when every qubit outside `start..start+len` carries the identity.
    pub fn is_trivial_outside(&self, start: usize, len: usize) -> bool {
        (0..self.width)
            .filter(|q| *q < start || *q >= start + len)
            .all(|q| !self.x_bit(q) && !self.z_bit(q))
    }

    /// Concatenated (x|z) vector used for GF(2) elimination.
    pub(crate) fn symplectic(&self) -> Vec<u64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.z);
        v
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_hermitian() {
            let extra = (self.phase as u32 + 4 - self.y_count() % 4) % 4;
            let prefix = ["+", "+i", "-", "-i"][extra as usize];
            write!(f, "{prefix}")?;
        } else {
            write!(f, "{}", if self.is_negative() { "-" } else { "+" })?;
        }
        for q in 0..self.width {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Parses `[+|-|−]` followed by letters over `IXYZ`, qubit 0 leftmost.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (negative, body) = if let Some(rest) = s.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('\u{2212}') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (false, rest)
        } else {
            (false, s)
        };
        let paulis = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(PauliError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if paulis.is_empty() {
            return Err(PauliError::Parse(s.to_string()));
        }
        Ok(Self::from_paulis(&paulis, negative))
    }
}

/// The reflection `V = ((-1)^lambda Q + (-1)^s P) / sqrt(2)` inserted when a
/// measured operator `P` anticommutes with a previously fixed operator `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reflection {
    pub q_index: usize,
    pub q_op: PauliOperator,
    pub p_op: PauliOperator,
    pub lambda_bit: bool,
    pub s_bit: bool,
}

impl Reflection {
    pub fn new(
        q_index: usize,
        q_op: PauliOperator,
        p_op: PauliOperator,
        lambda_bit: bool,
        s_bit: bool,
    ) -> Result<Self, PauliError> {
        if q_op.commutes(&p_op)? {
            return Err(PauliError::NotAnticommuting);
        }
        if !q_op.is_hermitian() || !p_op.is_hermitian() {
            return Err(PauliError::NotHermitian);
        }
        Ok(Reflection {
            q_index,
            q_op,
            p_op,
            lambda_bit,
            s_bit,
        })
    }
}

/// Computes `V^dagger w V` for the reflection `v`.
pub fn conjugate_by_reflection(
    w: &PauliOperator,
    v: &Reflection,
) -> Result<PauliOperator, PauliError> {
    w.check_width(&v.q_op)?;
    w.check_width(&v.p_op)?;
    if v.q_op.commutes_unchecked(&v.p_op) {
        return Err(PauliError::NotAnticommuting);
    }
    let mut out = w.clone();
    conjugate_by_reflection_in_place(&mut out, v);
    Ok(out)
}

pub(crate) fn conjugate_by_reflection_in_place(w: &mut PauliOperator, v: &Reflection) {
    let with_q = w.commutes_unchecked(&v.q_op);
    let with_p = w.commutes_unchecked(&v.p_op);
    let ab_negative = v.lambda_bit ^ v.s_bit;
    match (with_q, with_p) {
        (true, true) => {}
        (false, false) => w.negate(),
        (false, true) => {
            w.mul_assign_unchecked(&v.p_op);
            w.mul_assign_unchecked(&v.q_op);
            if ab_negative {
                w.negate();
            }
        }
        (true, false) => {
            w.mul_assign_unchecked(&v.q_op);
            w.mul_assign_unchecked(&v.p_op);
            if ab_negative {
                w.negate();
            }
        }
    }
}

/// Where a basis row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowOrigin {
    Dummy,
    Classical,
    Quantum,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// Lowest-index row that anticommutes with the operator.
    Anticommuting { first_row: usize },
    /// `prod_{j in rows} row_j = (-1)^sign_bit * p`.
    Dependent { rows: Vec<usize>, sign_bit: bool },
    Independent,
}

#[derive(Debug, Clone)]
struct ReducedRow {
    pivot: usize,
    vec: Vec<u64>,
    combo: Vec<u64>,
}

/// Pairwise commuting, GF(2)-independent set of operators with outcomes.
#[derive(Debug, Clone)]
pub struct BasisTracker {
    width: usize,
    rows: Vec<PauliOperator>,
    outcomes: Vec<bool>,
    origins: Vec<RowOrigin>,
    reduced: Vec<ReducedRow>,
}

fn first_set_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
}

fn test_bit(v: &[u64], i: usize) -> bool {
    v[i / WORD] >> (i % WORD) & 1 == 1
}

fn flip_bit(v: &mut [u64], i: usize) {
    v[i / WORD] ^= 1 << (i % WORD);
}

impl BasisTracker {
    pub fn new(width: usize) -> Self {
        BasisTracker {
            width,
            rows: Vec::new(),
            outcomes: Vec::new(),
            origins: Vec::new(),
            reduced: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[PauliOperator] {
        &self.rows
    }

    pub fn outcomes(&self) -> &[bool] {
        &self.outcomes
    }

    pub fn origins(&self) -> &[RowOrigin] {
        &self.origins
    }

    pub fn row(&self, i: usize) -> (&PauliOperator, bool, RowOrigin) {
        (&self.rows[i], self.outcomes[i], self.origins[i])
    }

    /// GF(2) rank of the stored rows; equals `len()` by construction.
    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    fn reduce(&self, p: &PauliOperator) -> (Vec<u64>, Vec<u64>) {
        let mut v = p.symplectic();
        let mut combo = vec![0u64; self.rows.len().div_ceil(WORD).max(1)];
        for r in &self.reduced {
            if test_bit(&v, r.pivot) {
                for (a, b) in v.iter_mut().zip(&r.vec) {
                    *a ^= b;
                }
                for (a, b) in combo.iter_mut().zip(&r.combo) {
                    *a ^= b;
                }
            }
        }
        (v, combo)
    }

    pub fn classify(&self, p: &PauliOperator) -> Result<Classification, PauliError> {
        if p.width != self.width {
            return Err(PauliError::WidthMismatch(p.width, self.width));
        }
        if !p.is_hermitian() {
            return Err(PauliError::NotHermitian);
        }
        if let Some(i) = self.rows.iter().position(|r| !r.commutes_unchecked(p)) {
            return Ok(Classification::Anticommuting { first_row: i });
        }
        let (v, combo) = self.reduce(p);
        if v.iter().any(|&w| w != 0) {
            return Ok(Classification::Independent);
        }
        let rows: Vec<usize> = (0..self.rows.len()).filter(|&i| test_bit(&combo, i)).collect();
        let mut prod = PauliOperator::identity(self.width);
        for &i in &rows {
            prod.mul_assign_unchecked(&self.rows[i]);
        }
        match (p.phase + 4 - prod.phase) & 3 {
            0 => Ok(Classification::Dependent {
                rows,
                sign_bit: false,
            }),
            2 => Ok(Classification::Dependent {
                rows,
                sign_bit: true,
            }),
            _ => Err(PauliError::ImaginaryPhase),
        }
    }

    /// Outcome implied for a dependent operator.
    pub fn implied_outcome(&self, rows: &[usize], sign_bit: bool) -> bool {
        rows.iter().fold(sign_bit, |acc, &i| acc ^ self.outcomes[i])
    }

    /// Appends a row; it must be Hermitian, commute with all rows, and be
    /// independent of them.
    pub fn insert(
        &mut self,
        p: PauliOperator,
        outcome: bool,
        origin: RowOrigin,
    ) -> Result<usize, PauliError> {
        if p.width != self.width {
            return Err(PauliError::WidthMismatch(p.width, self.width));
        }
        if !p.is_hermitian() {
            return Err(PauliError::NotHermitian);
        }
        if let Some(i) = self.rows.iter().position(|r| !r.commutes_unchecked(&p)) {
            return Err(PauliError::DoesNotCommute(i));
        }
        let (v, mut combo) = self.reduce(&p);
        let pivot = first_set_bit(&v).ok_or(PauliError::NotIndependent)?;
        let index = self.rows.len();
        if combo.len() * WORD <= index {
            combo.push(0);
        }
        flip_bit(&mut combo, index);
        for r in &mut self.reduced {
            if r.combo.len() < combo.len() {
                r.combo.resize(combo.len(), 0);
            }
        }
        self.reduced.push(ReducedRow {
            pivot,
            vec: v,
            combo,
        });
        self.rows.push(p);
        self.outcomes.push(outcome);
        self.origins.push(origin);
        Ok(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::dense::{pauli_matrix, Matrix};
    use num_complex::Complex64;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("Z").commutes(&p("X")).unwrap());
        assert!(p("ZZ").commutes(&p("XX")).unwrap());
        assert!(!p("YI").commutes(&p("ZX")).unwrap());
        assert!(p("Z").commutes(&p("ZZ")).is_err());
    }

    #[test]
    fn commutation_matches_matrices() {
        let a = pauli_matrix(&p("YI"));
        let b = pauli_matrix(&p("ZX"));
        let comm = a.mul(&b).sub(&b.mul(&a));
        assert!(comm.max_abs() > 1.0);
    }

    #[test]
    fn product_examples() {
        let xz = p("X").multiply(&p("Z")).unwrap();
        // XZ = -iY
        assert_eq!(xz.phase(), 0);
        assert!(xz.x_bit(0) && xz.z_bit(0));
        assert!(!xz.is_hermitian());
        let dense = pauli_matrix(&p("X")).mul(&pauli_matrix(&p("Z")));
        assert!(pauli_matrix(&xz).sub(&dense).max_abs() < 1e-12);
        let zz = p("Z").multiply(&p("Z")).unwrap();
        assert!(zz.is_identity());
        assert_eq!(zz.phase(), 0);
    }

    #[test]
    fn y_letter_convention() {
        let y = p("Y");
        assert_eq!(y.phase(), 1);
        let m = pauli_matrix(&y);
        let expect = Matrix::from_rows(&[
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        ]);
        assert!(m.sub(&expect).max_abs() < 1e-12);
    }

    #[test]
    fn gate_conjugation_examples() {
        let mut z = p("Z");
        z.conjugate_by_gate(CliffordGate::H(0)).unwrap();
        assert_eq!(z, p("X"));

        let mut x = p("X");
        x.conjugate_by_gate(CliffordGate::S(0)).unwrap();
        assert_eq!(x, p("-Y"));
        let mut y = p("Y");
        y.conjugate_by_gate(CliffordGate::S(0)).unwrap();
        assert_eq!(y, p("X"));

        let mut xi = p("XI");
        xi.conjugate_by_gate(CliffordGate::Cnot(0, 1)).unwrap();
        assert_eq!(xi, p("XX"));
        let mut iz = p("IZ");
        iz.conjugate_by_gate(CliffordGate::Cnot(0, 1)).unwrap();
        assert_eq!(iz, p("ZZ"));

        assert!(p("ZZ").conjugate_by_gate(CliffordGate::H(2)).is_err());
        assert!(p("ZZ").conjugate_by_gate(CliffordGate::Cnot(1, 1)).is_err());
    }

    #[test]
    fn reflection_examples() {
        let v = Reflection::new(0, p("Z"), p("X"), false, false).unwrap();
        assert_eq!(conjugate_by_reflection(&p("Z"), &v).unwrap(), p("X"));
        assert_eq!(conjugate_by_reflection(&p("Y"), &v).unwrap(), p("-Y"));
        assert!(Reflection::new(0, p("Z"), p("Z"), false, false).is_err());
    }

    #[test]
    fn classify_examples() {
        let mut b = BasisTracker::new(2);
        b.insert(p("ZI"), false, RowOrigin::Dummy).unwrap();
        b.insert(p("IZ"), true, RowOrigin::Dummy).unwrap();
        assert_eq!(
            b.classify(&p("ZZ")).unwrap(),
            Classification::Dependent {
                rows: vec![0, 1],
                sign_bit: false
            }
        );
        assert_eq!(
            b.classify(&p("-ZZ")).unwrap(),
            Classification::Dependent {
                rows: vec![0, 1],
                sign_bit: true
            }
        );
        assert!(b.implied_outcome(&[0, 1], false));

        let mut b = BasisTracker::new(2);
        b.insert(p("ZI"), false, RowOrigin::Dummy).unwrap();
        assert_eq!(
            b.classify(&p("XI")).unwrap(),
            Classification::Anticommuting { first_row: 0 }
        );

        let mut b = BasisTracker::new(2);
        b.insert(p("ZZ"), false, RowOrigin::Dummy).unwrap();
        assert_eq!(b.classify(&p("XX")).unwrap(), Classification::Independent);
    }

    #[test]
    fn anticommuting_tie_break_is_lowest_index() {
        let mut b = BasisTracker::new(2);
        b.insert(p("ZI"), false, RowOrigin::Dummy).unwrap();
        b.insert(p("IZ"), false, RowOrigin::Dummy).unwrap();
        assert_eq!(
            b.classify(&p("XX")).unwrap(),
            Classification::Anticommuting { first_row: 0 }
        );
    }

    #[test]
    fn insert_rejects_bad_rows() {
        let mut b = BasisTracker::new(2);
        b.insert(p("ZI"), false, RowOrigin::Dummy).unwrap();
        assert_eq!(
            b.insert(p("XI"), false, RowOrigin::Quantum),
            Err(PauliError::DoesNotCommute(0))
        );
        assert_eq!(
            b.insert(p("-ZI"), false, RowOrigin::Quantum),
            Err(PauliError::NotIndependent)
        );
        let non_hermitian = PauliOperator::from_bits(&[true, false], &[false, false], 1).unwrap();
        assert_eq!(
            b.insert(non_hermitian, false, RowOrigin::Quantum),
            Err(PauliError::NotHermitian)
        );
    }

    #[test]
    fn text_form() {
        assert_eq!(p("−XIZY").to_string(), "-XIZY");
        assert_eq!(p("XIZY").to_string(), "+XIZY");
        assert!("XQ".parse::<PauliOperator>().is_err());
        assert!("".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn wide_operators_cross_word_boundaries() {
        let mut a = PauliOperator::identity(130);
        a.set(3, Pauli::X);
        a.set(70, Pauli::Y);
        a.set(129, Pauli::Z);
        let mut b = PauliOperator::identity(130);
        b.set(70, Pauli::Z);
        assert!(!a.commutes(&b).unwrap());
        b.set(129, Pauli::X);
        assert!(a.commutes(&b).unwrap());
        a.conjugate_by_gate(CliffordGate::Cnot(3, 129)).unwrap();
        assert_eq!(a.get(129), Pauli::Y);
        assert_eq!(a.weight(), 3);
    }
}
