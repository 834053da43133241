//! Gate-level IR for adaptive Clifford(+T) circuits.

mod peephole;
mod text;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use peephole::peephole_simplify;
pub use text::{parse, serialize};

use crate::pauli::CliffordGate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("qubit q{0} out of range (circuit has {1} qubits)")]
    QubitOutOfRange(usize, usize),
    #[error("cbit c{0} out of range (circuit has {1} cbits)")]
    CbitOutOfRange(usize, usize),
    #[error("condition reads c{0} before any measurement writes it")]
    UnwrittenCbit(usize),
    #[error("two-qubit gate needs distinct qubits (q{0})")]
    RepeatedQubit(usize),
    #[error("circuit is not unitary Clifford+T: {0}")]
    NotUnitary(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    S,
    T,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CondKind {
    S,
    X,
    Z,
}

/// Parity of a set of cbits XORed with a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Condition {
    pub cbits: Vec<usize>,
    pub invert: bool,
}

impl Condition {
    pub fn on(cbit: usize) -> Self {
        Condition {
            cbits: vec![cbit],
            invert: false,
        }
    }

    pub fn parity(cbits: Vec<usize>) -> Self {
        Condition {
            cbits,
            invert: false,
        }
    }

    pub fn evaluate(&self, values: &[bool]) -> bool {
        self.cbits.iter().fold(self.invert, |acc, &c| acc ^ values[c])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instruction {
    Gate {
        kind: GateKind,
        qubit: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Measure {
        qubit: usize,
        cbit: usize,
    },
    CondGate {
        kind: CondKind,
        qubit: usize,
        condition: Condition,
    },
    Reset {
        qubit: usize,
    },
}

impl Instruction {
    pub fn h(qubit: usize) -> Self {
        Instruction::Gate {
            kind: GateKind::H,
            qubit,
        }
    }

    pub fn s(qubit: usize) -> Self {
        Instruction::Gate {
            kind: GateKind::S,
            qubit,
        }
    }

    pub fn t(qubit: usize) -> Self {
        Instruction::Gate {
            kind: GateKind::T,
            qubit,
        }
    }

    pub fn x(qubit: usize) -> Self {
        Instruction::Gate {
            kind: GateKind::X,
            qubit,
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Instruction::Cnot { control, target }
    }

    pub fn measure(qubit: usize, cbit: usize) -> Self {
        Instruction::Measure { qubit, cbit }
    }

    pub fn cond(kind: CondKind, qubit: usize, condition: Condition) -> Self {
        Instruction::CondGate {
            kind,
            qubit,
            condition,
        }
    }

    pub fn qubits(&self) -> Qubits {
        match *self {
            Instruction::Gate { qubit, .. }
            | Instruction::Measure { qubit, .. }
            | Instruction::CondGate { qubit, .. }
            | Instruction::Reset { qubit } => Qubits::One(qubit),
            Instruction::Cnot { control, target } => Qubits::Two(control, target),
        }
    }

    /// Clifford action of an unconditional gate, `None` for T and non-gates.
    pub fn clifford(&self) -> Option<CliffordGate> {
        match *self {
            Instruction::Gate { kind, qubit } => match kind {
                GateKind::H => Some(CliffordGate::H(qubit)),
                GateKind::S => Some(CliffordGate::S(qubit)),
                GateKind::X => Some(CliffordGate::X(qubit)),
                GateKind::T => None,
            },
            Instruction::Cnot { control, target } => Some(CliffordGate::Cnot(control, target)),
            _ => None,
        }
    }
}

/// The one or two qubits an instruction touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubits {
    One(usize),
    Two(usize, usize),
}

impl Qubits {
    pub fn contains(&self, q: usize) -> bool {
        match *self {
            Qubits::One(a) => a == q,
            Qubits::Two(a, b) => a == q || b == q,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Qubits::One(a) => (a, None),
            Qubits::Two(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum InputState {
    #[default]
    Zero,
    Magic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    num_cbits: usize,
    instructions: Vec<Instruction>,
    inputs: Vec<InputState>,
    written: BTreeSet<usize>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_cbits: usize) -> Self {
        Circuit {
            num_qubits,
            num_cbits,
            instructions: Vec::new(),
            inputs: vec![InputState::Zero; num_qubits],
            written: BTreeSet::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_cbits(&self) -> usize {
        self.num_cbits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn inputs(&self) -> &[InputState] {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn set_input(&mut self, qubit: usize, state: InputState) -> Result<(), CircuitError> {
        self.check_qubit(qubit)?;
        self.inputs[qubit] = state;
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<(), CircuitError> {
        if q >= self.num_qubits {
            Err(CircuitError::QubitOutOfRange(q, self.num_qubits))
        } else {
            Ok(())
        }
    }

    fn check_cbit(&self, c: usize) -> Result<(), CircuitError> {
        if c >= self.num_cbits {
            Err(CircuitError::CbitOutOfRange(c, self.num_cbits))
        } else {
            Ok(())
        }
    }

    pub fn push(&mut self, inst: Instruction) -> Result<(), CircuitError> {
        match &inst {
            Instruction::Gate { qubit, .. } | Instruction::Reset { qubit } => {
                self.check_qubit(*qubit)?
            }
            Instruction::Cnot { control, target } => {
                self.check_qubit(*control)?;
                self.check_qubit(*target)?;
                if control == target {
                    return Err(CircuitError::RepeatedQubit(*control));
                }
            }
            Instruction::Measure { qubit, cbit } => {
                self.check_qubit(*qubit)?;
                self.check_cbit(*cbit)?;
                self.written.insert(*cbit);
            }
            Instruction::CondGate {
                qubit, condition, ..
            } => {
                self.check_qubit(*qubit)?;
                for &c in &condition.cbits {
                    self.check_cbit(c)?;
                    if !self.written.contains(&c) {
                        return Err(CircuitError::UnwrittenCbit(c));
                    }
                }
            }
        }
        self.instructions.push(inst);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Instruction>>(
        &mut self,
        insts: I,
    ) -> Result<(), CircuitError> {
        for inst in insts {
            self.push(inst)?;
        }
        Ok(())
    }

    pub fn t_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| {
                matches!(
                    i,
                    Instruction::Gate {
                        kind: GateKind::T,
                        ..
                    }
                )
            })
            .count()
    }

    /// Instruction index where trailing measurements begin.
    fn unitary_prefix_len(&self) -> usize {
        let mut end = self.instructions.len();
        while end > 0 && matches!(self.instructions[end - 1], Instruction::Measure { .. }) {
            end -= 1;
        }
        end
    }

    /// Checks that the circuit is Clifford+T with only trailing measurements
    /// and all-zero inputs.
    pub fn check_unitary(&self) -> Result<(), CircuitError> {
        if let Some(q) = self.inputs.iter().position(|s| *s != InputState::Zero) {
            return Err(CircuitError::NotUnitary(format!(
                "qubit q{q} has a non-|0> input"
            )));
        }
        let end = self.unitary_prefix_len();
        for (i, inst) in self.instructions[..end].iter().enumerate() {
            match inst {
                Instruction::Gate { .. } | Instruction::Cnot { .. } => {}
                Instruction::Measure { .. } => {
                    return Err(CircuitError::NotUnitary(format!(
                        "mid-circuit measurement at instruction {i}"
                    )))
                }
                Instruction::CondGate { .. } => {
                    return Err(CircuitError::NotUnitary(format!(
                        "classically controlled gate at instruction {i}"
                    )))
                }
                Instruction::Reset { .. } => {
                    return Err(CircuitError::NotUnitary(format!("reset at instruction {i}")))
                }
            }
        }
        Ok(())
    }

    pub fn metrics(&self) -> Metrics {
        metrics(self)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub depth: usize,
    /// Unconditional single-qubit gates (H, S, T, X).
    pub count_1q: usize,
    pub count_cnot: usize,
    pub count_t: usize,
    pub count_measure: usize,
    pub count_cond: usize,
    pub count_reset: usize,
}

/// The compact JSON metrics record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub t: usize,
    pub depth: usize,
    pub count_1q: usize,
    pub count_cnot: usize,
}

impl MetricsReport {
    pub fn of(c: &Circuit) -> Self {
        let m = c.metrics();
        MetricsReport {
            n: c.num_qubits(),
            t: m.count_t,
            depth: m.depth,
            count_1q: m.count_1q,
            count_cnot: m.count_cnot,
        }
    }
}

/// Gate counts and ASAP layer depth.
///
/// Every instruction occupies each of its qubits for one layer. A
/// conditional gate is additionally placed after the measurements that
/// produced the cbits it reads.
pub fn metrics(c: &Circuit) -> Metrics {
    let mut qubit_layer = vec![0usize; c.num_qubits];
    let mut cbit_layer = vec![0usize; c.num_cbits];
    let mut m = Metrics::default();
    for inst in &c.instructions {
        let mut layer = inst.qubits().iter().map(|q| qubit_layer[q]).max().unwrap_or(0);
        match inst {
            Instruction::Gate { kind, .. } => {
                m.count_1q += 1;
                if *kind == GateKind::T {
                    m.count_t += 1;
                }
            }
            Instruction::Cnot { .. } => m.count_cnot += 1,
            Instruction::Measure { .. } => m.count_measure += 1,
            Instruction::CondGate { condition, .. } => {
                m.count_cond += 1;
                for &cb in &condition.cbits {
                    layer = layer.max(cbit_layer[cb]);
                }
            }
            Instruction::Reset { .. } => m.count_reset += 1,
        }
        let layer = layer + 1;
        for q in inst.qubits().iter() {
            qubit_layer[q] = layer;
        }
        if let Instruction::Measure { cbit, .. } = inst {
            cbit_layer[*cbit] = layer;
        }
        m.depth = m.depth.max(layer);
    }
    m
}
