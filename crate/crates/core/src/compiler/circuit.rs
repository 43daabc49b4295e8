use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gates::{cnot_matrix, nand_matrix};
use crate::linalg::{expm_hermitian, kron, ComplexMatrix};
use crate::spin::SpinAxis;

/// One logical operation. Qubits are 0-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogicalGate {
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Nand(usize, usize),
    Cnot {
        control: usize,
        target: usize,
    },
    /// Idle time in natural units around a layer of X π pulses.
    Echo(f64),
}

impl LogicalGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            LogicalGate::Rx(q, _) | LogicalGate::Ry(q, _) | LogicalGate::Rz(q, _) => vec![q],
            LogicalGate::Nand(a, b) => vec![a, b],
            LogicalGate::Cnot { control, target } => vec![control, target],
            LogicalGate::Echo(_) => Vec::new(),
        }
    }
}

impl fmt::Display for LogicalGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LogicalGate::Rx(q, t) => write!(f, "rx q{q} {t}"),
            LogicalGate::Ry(q, t) => write!(f, "ry q{q} {t}"),
            LogicalGate::Rz(q, t) => write!(f, "rz q{q} {t}"),
            LogicalGate::Nand(a, b) => write!(f, "nand q{a} q{b}"),
            LogicalGate::Cnot { control, target } => write!(f, "cnot q{control} q{target}"),
            LogicalGate::Echo(t) => write!(f, "echo {t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalCircuit {
    pub n_logical: usize,
    pub gates: Vec<LogicalGate>,
}

impl LogicalCircuit {
    pub fn new(n_logical: usize, gates: Vec<LogicalGate>) -> Result<Self> {
        for gate in &gates {
            check_gate(gate, n_logical).map_err(Error::Lowering)?;
        }
        Ok(Self { n_logical, gates })
    }

    /// Ideal action on the logical product space, qubit 0 most significant.
    /// Echo contributes its X π layer.
    pub fn ideal_unitary(&self) -> Result<ComplexMatrix> {
        let n = self.n_logical;
        let mut u = ComplexMatrix::identity(1 << n);
        for gate in &self.gates {
            let g = match *gate {
                LogicalGate::Rx(q, t) => single(n, q, SpinAxis::X, t)?,
                LogicalGate::Ry(q, t) => single(n, q, SpinAxis::Y, t)?,
                LogicalGate::Rz(q, t) => single(n, q, SpinAxis::Z, t)?,
                LogicalGate::Nand(a, b) => two_qubit(n, a, b, &nand_matrix()),
                LogicalGate::Cnot { control, target } => two_qubit(n, control, target, &cnot_matrix()),
                LogicalGate::Echo(_) => {
                    let mut layer = ComplexMatrix::identity(1 << n);
                    for q in 0..n {
                        layer = &single(n, q, SpinAxis::X, PI)? * &layer;
                    }
                    layer
                }
            };
            u = &g * &u;
        }
        Ok(u)
    }
}

fn check_gate(gate: &LogicalGate, n: usize) -> std::result::Result<(), String> {
    for q in gate.qubits() {
        if q >= n {
            return Err(format!("qubit index q{q} out of range for {n} qubit(s)"));
        }
    }
    match *gate {
        LogicalGate::Nand(a, b) | LogicalGate::Cnot { control: a, target: b } if a == b => {
            Err(format!("two-qubit gate needs distinct qubits, got q{a} twice"))
        }
        LogicalGate::Rx(_, t) | LogicalGate::Ry(_, t) | LogicalGate::Rz(_, t) if !t.is_finite() => {
            Err("angle must be finite".into())
        }
        LogicalGate::Echo(t) if !(t.is_finite() && t >= 0.0) => Err(format!("echo time must be non-negative, got {t}")),
        _ => Ok(()),
    }
}

fn single(n: usize, q: usize, axis: SpinAxis, theta: f64) -> Result<ComplexMatrix> {
    let r = expm_hermitian(&axis.half_pauli(), theta)?;
    let left = ComplexMatrix::identity(1 << q);
    let right = ComplexMatrix::identity(1 << (n - q - 1));
    Ok(kron(&kron(&left, &r), &right))
}

/// Embeds a 4×4 gate (first index more significant) on qubits `a`, `b`.
fn two_qubit(n: usize, a: usize, b: usize, g: &ComplexMatrix) -> ComplexMatrix {
    let bit = |k: usize, q: usize| (k >> (n - 1 - q)) & 1;
    ComplexMatrix::from_fn(1 << n, |row, col| {
        let others_equal = (0..n).filter(|&q| q != a && q != b).all(|q| bit(row, q) == bit(col, q));
        if !others_equal {
            return Default::default();
        }
        g.get(2 * bit(row, a) + bit(row, b), 2 * bit(col, a) + bit(col, b))
    })
}

/// Parses `pi`, `-pi/2`, `0.25pi`, `3pi/4`, `2*pi` or a plain decimal.
pub fn parse_angle(text: &str) -> std::result::Result<f64, String> {
    let bad = || format!("malformed angle {text:?}");
    let s = text.trim();
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    };
    let head = s[..pos].trim_end_matches('*');
    let tail = &s[pos + 2..];
    let k = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let m = match tail {
        "" => 1.0,
        t => {
            let d = t.strip_prefix('/').ok_or_else(bad)?;
            let d = d.parse::<f64>().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            d
        }
    };
    let v = k * PI / m;
    v.is_finite().then_some(v).ok_or_else(bad)
}

fn parse_qubit(token: &str) -> std::result::Result<usize, String> {
    token
        .strip_prefix('q')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| format!("expected a qubit like q0, got {token:?}"))
}

/// Parses the line-oriented circuit language.
pub fn parse_circuit(text: &str) -> Result<LogicalCircuit> {
    let mut n_logical: Option<usize> = None;
    let mut gates = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let mnemonic = tokens[0].to_ascii_lowercase();
        let args = &tokens[1..];
        let arity = |k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(err(format!("{mnemonic} takes {k} argument(s), got {}", args.len())))
            }
        };
        if mnemonic == "qubits" {
            arity(1)?;
            if n_logical.is_some() {
                return Err(err("duplicate qubits header".into()));
            }
            let n: usize = args[0]
                .parse()
                .map_err(|_| err(format!("invalid qubit count {:?}", args[0])))?;
            if n == 0 {
                return Err(err("qubit count must be positive".into()));
            }
            n_logical = Some(n);
            continue;
        }
        let n = n_logical.ok_or_else(|| err("gate before the `qubits N` header".into()))?;
        let gate = match mnemonic.as_str() {
            "rx" | "ry" | "rz" => {
                arity(2)?;
                let q = parse_qubit(args[0]).map_err(err)?;
                let t = parse_angle(args[1]).map_err(err)?;
                match mnemonic.as_str() {
                    "rx" => LogicalGate::Rx(q, t),
                    "ry" => LogicalGate::Ry(q, t),
                    _ => LogicalGate::Rz(q, t),
                }
            }
            "nand" | "cnot" => {
                arity(2)?;
                let a = parse_qubit(args[0]).map_err(err)?;
                let b = parse_qubit(args[1]).map_err(err)?;
                if mnemonic == "nand" {
                    LogicalGate::Nand(a, b)
                } else {
                    LogicalGate::Cnot { control: a, target: b }
                }
            }
            "echo" => {
                arity(1)?;
                let t: f64 = args[0]
                    .parse()
                    .map_err(|_| err(format!("invalid echo time {:?}", args[0])))?;
                LogicalGate::Echo(t)
            }
            other => return Err(err(format!("unknown mnemonic {other:?}"))),
        };
        check_gate(&gate, n).map_err(err)?;
        gates.push(gate);
    }
    let n_logical = n_logical.ok_or(Error::Parse {
        line: last_line.max(1),
        message: "missing `qubits N` header".into(),
    })?;
    Ok(LogicalCircuit { n_logical, gates })
}

impl FromStr for LogicalCircuit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}
