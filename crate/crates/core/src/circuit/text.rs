//! Line-oriented text form of a [`Circuit`].
//!
//! ```text
//! qubits 3          # header, required first
//! cbits 2           # optional, defaults to the qubit count
//! input q2 magic
//! h q0
//! cx q0 q2
//! measure q2 -> c0
//! if (c0 ^ 1) s q0
//! reset q2
//! ```

use std::fmt::Write as _;

use super::{
    Circuit, CircuitError, CondKind, Condition, GateKind, InputState, Instruction,
};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    LParen,
    RParen,
    Caret,
    Arrow,
}

struct Token<'a> {
    tok: Tok<'a>,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(line_no: usize, line: &str) -> Result<Vec<Token<'_>>, CircuitError> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let column = i + 1;
        match c {
            b' ' | b'\t' | b'\r' => i += 1,
            b'(' => {
                out.push(Token { tok: Tok::LParen, column });
                i += 1;
            }
            b')' => {
                out.push(Token { tok: Tok::RParen, column });
                i += 1;
            }
            b'^' => {
                out.push(Token { tok: Tok::Caret, column });
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push(Token { tok: Tok::Arrow, column });
                i += 2;
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Word(&line[start..i]),
                    column,
                });
            }
            _ => {
                return Err(syntax(
                    line_no,
                    column,
                    format!("unexpected character {:?}", line[i..].chars().next().unwrap()),
                ))
            }
        }
    }
    Ok(out)
}

struct Cursor<'a, 'b> {
    toks: &'b [Token<'a>],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl<'a> Cursor<'a, '_> {
    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    fn next(&mut self, what: &str) -> Result<&Tok<'a>, CircuitError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(&t.tok)
            }
            None => Err(syntax(self.line, self.end_column, format!("expected {what}"))),
        }
    }

    fn expect(&mut self, want: Tok<'static>, what: &str) -> Result<(), CircuitError> {
        let col = self.column();
        if *self.next(what)? == want {
            Ok(())
        } else {
            Err(syntax(self.line, col, format!("expected {what}")))
        }
    }

    fn indexed(&mut self, prefix: char, what: &str) -> Result<usize, CircuitError> {
        let col = self.column();
        match self.next(what)? {
            Tok::Word(w) if w.starts_with(prefix) => w[1..]
                .parse()
                .map_err(|_| syntax(self.line, col, format!("expected {what}"))),
            _ => Err(syntax(self.line, col, format!("expected {what}"))),
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, CircuitError> {
        let col = self.column();
        match self.next(what)? {
            Tok::Word(w) => w
                .parse()
                .map_err(|_| syntax(self.line, col, format!("expected {what}"))),
            _ => Err(syntax(self.line, col, format!("expected {what}"))),
        }
    }

    fn finish(&self) -> Result<(), CircuitError> {
        if self.pos < self.toks.len() {
            Err(syntax(self.line, self.column(), "unexpected trailing tokens"))
        } else {
            Ok(())
        }
    }
}

fn parse_condition(cur: &mut Cursor<'_, '_>) -> Result<Condition, CircuitError> {
    cur.expect(Tok::LParen, "'('")?;
    let mut cond = Condition::default();
    loop {
        let col = cur.column();
        match cur.next("cbit or constant")? {
            Tok::Word("0") => {}
            Tok::Word("1") => cond.invert ^= true,
            Tok::Word(w) if w.starts_with('c') => {
                let c = w[1..]
                    .parse()
                    .map_err(|_| syntax(cur.line, col, "expected cbit"))?;
                cond.cbits.push(c);
            }
            _ => return Err(syntax(cur.line, col, "expected cbit or constant")),
        }
        let col = cur.column();
        match cur.next("'^' or ')'")? {
            Tok::Caret => continue,
            Tok::RParen => break,
            _ => return Err(syntax(cur.line, col, "expected '^' or ')'")),
        }
    }
    Ok(cond)
}

/// Parses the text form; see the module docs for the grammar.
pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
    let mut circuit: Option<Circuit> = None;
    let mut cbits_allowed = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = lex(line_no, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: line_no,
            end_column: line.trim_end().len() + 1,
        };
        let head_col = cur.column();
        let head = match cur.next("keyword")? {
            Tok::Word(w) => *w,
            Tok::LParen | Tok::RParen | Tok::Caret | Tok::Arrow => {
                return Err(syntax(line_no, head_col, "expected keyword"))
            }
        };

        let Some(c) = circuit.as_mut() else {
            if head != "qubits" {
                return Err(syntax(line_no, head_col, "expected 'qubits <n>' header"));
            }
            let n = cur.number("qubit count")?;
            cur.finish()?;
            circuit = Some(Circuit::new(n, n));
            cbits_allowed = true;
            continue;
        };

        if head == "cbits" {
            if !cbits_allowed {
                return Err(syntax(
                    line_no,
                    head_col,
                    "'cbits' must directly follow the 'qubits' header",
                ));
            }
            let m = cur.number("cbit count")?;
            cur.finish()?;
            *c = Circuit::new(c.num_qubits(), m);
            cbits_allowed = false;
            continue;
        }
        cbits_allowed = false;

        let inst = match head {
            "h" | "s" | "t" | "x" => {
                let q = cur.indexed('q', "qubit")?;
                let kind = match head {
                    "h" => GateKind::H,
                    "s" => GateKind::S,
                    "t" => GateKind::T,
                    _ => GateKind::X,
                };
                Instruction::Gate { kind, qubit: q }
            }
            "cx" => {
                let control = cur.indexed('q', "control qubit")?;
                let target = cur.indexed('q', "target qubit")?;
                Instruction::Cnot { control, target }
            }
            "measure" => {
                let qubit = cur.indexed('q', "qubit")?;
                cur.expect(Tok::Arrow, "'->'")?;
                let cbit = cur.indexed('c', "cbit")?;
                Instruction::Measure { qubit, cbit }
            }
            "if" => {
                let condition = parse_condition(&mut cur)?;
                let col = cur.column();
                let kind = match cur.next("gate")? {
                    Tok::Word("s") => CondKind::S,
                    Tok::Word("x") => CondKind::X,
                    Tok::Word("z") => CondKind::Z,
                    _ => return Err(syntax(line_no, col, "expected s, x or z")),
                };
                let qubit = cur.indexed('q', "qubit")?;
                Instruction::CondGate {
                    kind,
                    qubit,
                    condition,
                }
            }
            "reset" => Instruction::Reset {
                qubit: cur.indexed('q', "qubit")?,
            },
            "input" => {
                let q = cur.indexed('q', "qubit")?;
                let col = cur.column();
                let state = match cur.next("input state")? {
                    Tok::Word("magic") => InputState::Magic,
                    Tok::Word("zero") => InputState::Zero,
                    _ => return Err(syntax(line_no, col, "expected 'magic' or 'zero'")),
                };
                cur.finish()?;
                c.set_input(q, state)?;
                continue;
            }
            other => {
                return Err(syntax(
                    line_no,
                    head_col,
                    format!("unknown instruction {other:?}"),
                ))
            }
        };
        cur.finish()?;
        c.push(inst)?;
    }
    circuit.ok_or_else(|| syntax(1, 1, "missing 'qubits <n>' header"))
}

fn write_instruction(out: &mut String, inst: &Instruction) {
    let _ = match inst {
        Instruction::Gate { kind, qubit } => {
            let name = match kind {
                GateKind::H => "h",
                GateKind::S => "s",
                GateKind::T => "t",
                GateKind::X => "x",
            };
            writeln!(out, "{name} q{qubit}")
        }
        Instruction::Cnot { control, target } => writeln!(out, "cx q{control} q{target}"),
        Instruction::Measure { qubit, cbit } => writeln!(out, "measure q{qubit} -> c{cbit}"),
        Instruction::CondGate {
            kind,
            qubit,
            condition,
        } => {
            let mut terms: Vec<String> = condition.cbits.iter().map(|c| format!("c{c}")).collect();
            if condition.invert || terms.is_empty() {
                terms.push(if condition.invert { "1" } else { "0" }.to_string());
            }
            let name = match kind {
                CondKind::S => "s",
                CondKind::X => "x",
                CondKind::Z => "z",
            };
            writeln!(out, "if ({}) {name} q{qubit}", terms.join(" ^ "))
        }
        Instruction::Reset { qubit } => writeln!(out, "reset q{qubit}"),
    };
}

/// Normalized text form: header, cbit count, magic inputs, instructions.
pub fn serialize(c: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", c.num_qubits());
    let _ = writeln!(out, "cbits {}", c.num_cbits());
    for (q, s) in c.inputs().iter().enumerate() {
        if *s == InputState::Magic {
            let _ = writeln!(out, "input q{q} magic");
        }
    }
    for inst in c.instructions() {
        write_instruction(&mut out, inst);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let c = parse("qubits 1\nh q0\nt q0\nmeasure q0 -> c0").unwrap();
        assert_eq!(c.num_qubits(), 1);
        assert_eq!(c.num_cbits(), 1);
        assert_eq!(c.t_count(), 1);

        let c = parse("qubits 2\ncx q0 q1").unwrap();
        assert_eq!(c.instructions(), &[Instruction::cx(0, 1)]);
    }

    #[test]
    fn arity_violation_is_a_syntax_error() {
        match parse("qubits 2\ncx q0") {
            Err(CircuitError::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            parse("h q0"),
            Err(CircuitError::Syntax { line: 1, .. })
        ));
        assert_eq!(
            parse("qubits 1\nh q3").unwrap_err(),
            CircuitError::QubitOutOfRange(3, 1)
        );
        assert_eq!(
            parse("qubits 2\nif (c1) s q0").unwrap_err(),
            CircuitError::UnwrittenCbit(1)
        );
        assert!(matches!(
            parse("qubits 2\nh q0 q1"),
            Err(CircuitError::Syntax { line: 2, column: 6, .. })
        ));
        assert!(matches!(
            parse("qubits 2\nh q0\ncbits 3"),
            Err(CircuitError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse("qubits 2\nfoo q0"),
            Err(CircuitError::Syntax { line: 2, column: 1, .. })
        ));
        assert!(matches!(parse("# nothing\n"), Err(CircuitError::Syntax { .. })));
    }

    #[test]
    fn conditions_and_comments() {
        let text = "# header\nqubits 3 # three\ncbits 2\ninput q2 magic\nmeasure q0 -> c0\nmeasure q1 -> c1\nif (c0 ^ c1 ^ 1) z q2\nreset q2\n";
        let c = parse(text).unwrap();
        assert_eq!(c.inputs()[2], InputState::Magic);
        assert_eq!(
            c.instructions()[2],
            Instruction::cond(
                CondKind::Z,
                2,
                Condition {
                    cbits: vec![0, 1],
                    invert: true
                }
            )
        );
        let normalized = serialize(&c);
        assert_eq!(parse(&normalized).unwrap(), c);
        assert_eq!(serialize(&parse(&normalized).unwrap()), normalized);
    }

    fn arb_instruction(n: usize) -> impl Strategy<Value = Instruction> {
        prop_oneof![
            (0..4u8, 0..n).prop_map(|(k, q)| Instruction::Gate {
                kind: [GateKind::H, GateKind::S, GateKind::T, GateKind::X][k as usize],
                qubit: q
            }),
            (0..n, 1..n).prop_map(move |(c, d)| Instruction::cx(c, (c + d) % n)),
            (0..n).prop_map(|q| Instruction::Reset { qubit: q }),
            (0..n).prop_map(move |q| Instruction::measure(q, q)),
        ]
    }

    proptest! {
        #[test]
        fn serialize_parse_roundtrip(insts in prop::collection::vec(arb_instruction(4), 0..40)) {
            let mut c = Circuit::new(4, 4);
            for inst in insts {
                c.push(inst).unwrap();
            }
            if c.instructions().iter().any(|i| matches!(i, Instruction::Measure { .. })) {
                let cb = c.instructions().iter().find_map(|i| match i {
                    Instruction::Measure { cbit, .. } => Some(*cbit),
                    _ => None,
                }).unwrap();
                c.push(Instruction::cond(CondKind::X, 0, Condition { cbits: vec![cb], invert: true })).unwrap();
            }
            let text = serialize(&c);
            let back = parse(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(serialize(&back), text);
        }
    }
}
