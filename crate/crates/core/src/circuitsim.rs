//! Statevector simulation of `{X, Z, H, CNOT, T}` circuits.
//!
//! Wire `i` is bit `i` of the basis index (little-endian), so the last wire
//! is the most significant bit and is the one read out as the decision bit.
//! Global phases are never tracked as observable.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::protocol::InstanceLabel;

/// Largest register the simulator accepts (4096 amplitudes).
pub const MAX_QUBITS: usize = 12;

/// Tolerance on norm drift, invariance checks, and round-trip distances.
pub const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    T(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn wires(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::X(q) | Gate::Z(q) | Gate::H(q) | Gate::T(q) => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::T(_))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::H(q) => write!(f, "H {q}"),
            Gate::T(q) => write!(f, "T {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

/// A validated circuit acting on `n_qubits` wires initialised to `|0>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(invalid("n_qubits", "need at least one wire"));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitLimit {
                n: n_qubits,
                limit: MAX_QUBITS,
            });
        }
        for (i, g) in gates.iter().enumerate() {
            let (a, b) = g.wires();
            if a >= n_qubits || b.is_some_and(|b| b >= n_qubits) {
                return Err(invalid(
                    "gates",
                    format!("gate {i} ({g}) addresses a wire >= {n_qubits}"),
                ));
            }
            if b == Some(a) {
                return Err(invalid(
                    "gates",
                    format!("gate {i} ({g}) has equal control and target"),
                ));
            }
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn last_wire(&self) -> usize {
        self.n_qubits - 1
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    /// Uniformly random gates from `{X, Z, H, CNOT}`; CNOT needs two wires.
    pub fn random_clifford<R: Rng + ?Sized>(
        n_qubits: usize,
        depth: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let kinds = if n_qubits > 1 { 4 } else { 3 };
        let gates = (0..depth)
            .map(|_| {
                let q = rng.random_range(0..n_qubits);
                match rng.random_range(0..kinds) {
                    0 => Gate::X(q),
                    1 => Gate::Z(q),
                    2 => Gate::H(q),
                    _ => {
                        let t = (q + rng.random_range(1..n_qubits)) % n_qubits;
                        Gate::Cnot {
                            control: q,
                            target: t,
                        }
                    }
                }
            })
            .collect();
        Self::new(n_qubits, gates)
    }

    /// Parses the line format `<TAG> <wire>` / `CNOT <control> <target>`.
    ///
    /// Wires are zero-indexed; `#` starts a comment. An optional
    /// `QUBITS <n>` line fixes the register size, which otherwise is one
    /// more than the largest wire mentioned.
    pub fn parse(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        let mut declared: Option<(usize, usize)> = None;
        let mut max_wire = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::CircuitParse {
                line: line_no,
                message,
            };
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap_or_default().to_ascii_uppercase();
            let args: Vec<usize> = parts
                .map(|p| {
                    p.parse::<usize>()
                        .map_err(|_| err(format!("`{p}` is not a wire index")))
                })
                .collect::<Result<_>>()?;
            let arity = if tag == "CNOT" { 2 } else { 1 };
            if args.len() != arity {
                return Err(err(format!(
                    "`{tag}` takes {arity} argument(s), got {}",
                    args.len()
                )));
            }
            let gate = match tag.as_str() {
                "QUBITS" => {
                    if declared.is_some() {
                        return Err(err("register size declared twice".into()));
                    }
                    declared = Some((args[0], line_no));
                    continue;
                }
                "X" => Gate::X(args[0]),
                "Z" => Gate::Z(args[0]),
                "H" => Gate::H(args[0]),
                "T" => Gate::T(args[0]),
                "CNOT" => {
                    if args[0] == args[1] {
                        return Err(err("CNOT control equals target".into()));
                    }
                    Gate::Cnot {
                        control: args[0],
                        target: args[1],
                    }
                }
                other => return Err(err(format!("unknown gate `{other}`"))),
            };
            let (a, b) = gate.wires();
            let top = b.map_or(a, |b| a.max(b));
            if let Some((n, _)) = declared {
                if top >= n {
                    return Err(err(format!("wire {top} outside a {n}-qubit register")));
                }
            }
            max_wire = max_wire.max(top);
            gates.push(gate);
        }
        let n = match declared {
            Some((n, line)) => {
                if n == 0 || n > MAX_QUBITS {
                    return Err(Error::CircuitParse {
                        line,
                        message: format!("register size must lie in [1, {MAX_QUBITS}]"),
                    });
                }
                n
            }
            None => max_wire + 1,
        };
        Self::new(n, gates)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("QUBITS {}\n", self.n_qubits);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// `2^n` amplitudes, index bit `i` = wire `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitLimit {
                n: n_qubits,
                limit: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply(&mut self, gate: Gate) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match gate {
            Gate::X(q) => self.x(q),
            Gate::Z(q) => self.z(q),
            Gate::H(q) => {
                let m = 1 << q;
                for i in (0..self.amps.len()).filter(|i| i & m == 0) {
                    let (a, b) = (self.amps[i], self.amps[i | m]);
                    self.amps[i] = (a + b) * s;
                    self.amps[i | m] = (a - b) * s;
                }
            }
            Gate::T(q) => {
                let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
                let m = 1 << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= phase;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1 << control, 1 << target);
                for i in (0..self.amps.len()).filter(|i| i & c != 0 && i & t == 0) {
                    self.amps.swap(i, i | t);
                }
            }
        }
    }

    fn x(&mut self, q: usize) {
        let m = 1 << q;
        for i in (0..self.amps.len()).filter(|i| i & m == 0) {
            self.amps.swap(i, i | m);
        }
    }

    fn z(&mut self, q: usize) {
        let m = 1 << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
    }

    /// Applies `P` up to global phase (`Y` acts as `XZ`).
    pub fn apply_pauli(&mut self, p: &PauliString) {
        assert_eq!(
            p.len(),
            self.n_qubits,
            "Pauli string length must match the register"
        );
        for (q, tag) in p.tags().iter().enumerate() {
            match tag {
                Pauli::I => {}
                Pauli::X => self.x(q),
                Pauli::Z => self.z(q),
                Pauli::Y => {
                    self.z(q);
                    self.x(q);
                }
            }
        }
    }

    /// Full computational-basis distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// Probability that `wire` reads 0.
    pub fn prob_zero(&self, wire: usize) -> f64 {
        let m = 1 << wire;
        let p: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        p.clamp(0.0, 1.0)
    }
}

/// Total-variation distance between two distributions on the same support.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn simulate(circuit: &Circuit) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.n_qubits)?;
    for &g in &circuit.gates {
        state.apply(g);
    }
    Ok(state)
}

/// Probability that the last wire of `U|0...0>` reads 0.
pub fn acceptance_probability(circuit: &Circuit) -> Result<f64> {
    Ok(simulate(circuit)?.prob_zero(circuit.last_wire()))
}

pub fn classify_instance(circuit: &Circuit, q: f64) -> Result<InstanceLabel> {
    if !(0.0..0.5).contains(&q) {
        return Err(invalid("q", format!("must lie in [0, 1/2), got {q}")));
    }
    Ok(InstanceLabel::classify(acceptance_probability(circuit)?, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Whether this factor flips computational-basis outcomes.
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(tags: Vec<Pauli>) -> Self {
        Self(tags)
    }

    pub fn identity(len: usize) -> Self {
        Self(vec![Pauli::I; len])
    }

    /// Identity except `p` on `wire`.
    pub fn single(len: usize, wire: usize, p: Pauli) -> Self {
        let mut s = Self::identity(len);
        s.0[wire] = p;
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tags(&self) -> &[Pauli] {
        &self.0
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Letters in wire order, e.g. `"IXZ"` puts `Z` on wire 2.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(invalid("pauli", format!("unknown factor `{other}`"))),
            })
            .collect::<Result<_>>()
            .map(Self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliClass {
    Benign,
    NonBenign,
}

/// Benign iff every measured wire carries `I` or `Z`.
pub fn classify_pauli(p: &PauliString, measured_wires: &[usize]) -> Result<PauliClass> {
    if let Some(&w) = measured_wires.iter().find(|&&w| w >= p.len()) {
        return Err(invalid(
            "measured_wires",
            format!("wire {w} outside a length-{} string", p.len()),
        ));
    }
    Ok(if measured_wires.iter().any(|&w| p.0[w].flips()) {
        PauliClass::NonBenign
    } else {
        PauliClass::Benign
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceCheck {
    pub invariant: bool,
    pub distance: f64,
}

/// Compares the last-wire distribution with and without `p` applied before
/// measurement. Factors on other wires are permitted since they are traced out.
pub fn benign_invariance_check(circuit: &Circuit, p: &PauliString) -> Result<InvarianceCheck> {
    if p.len() != circuit.n_qubits {
        return Err(invalid(
            "pauli",
            format!("length {} != {} qubits", p.len(), circuit.n_qubits),
        ));
    }
    let last = circuit.last_wire();
    if classify_pauli(p, &[last])? == PauliClass::NonBenign {
        return Err(Error::Precondition(
            "Pauli acts on the measured wire with X or Y; invariance does not apply".into(),
        ));
    }
    let honest = simulate(circuit)?;
    let mut attacked = honest.clone();
    attacked.apply_pauli(p);
    let (p0, p1) = (honest.prob_zero(last), attacked.prob_zero(last));
    let distance = tv_distance(&[p0, 1.0 - p0], &[p1, 1.0 - p1]);
    Ok(InvarianceCheck {
        invariant: distance <= TOLERANCE,
        distance,
    })
}

/// Per-wire one-time-pad key: the wire is encrypted by `X^a Z^b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliKeys {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
}

impl PauliKeys {
    pub fn zero(n: usize) -> Self {
        Self {
            a: vec![false; n],
            b: vec![false; n],
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            a: (0..n).map(|_| rng.random()).collect(),
            b: (0..n).map(|_| rng.random()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    fn as_pauli(&self) -> PauliString {
        PauliString(
            self.a
                .iter()
                .zip(&self.b)
                .map(|(&a, &b)| match (a, b) {
                    (false, false) => Pauli::I,
                    (true, false) => Pauli::X,
                    (false, true) => Pauli::Z,
                    (true, true) => Pauli::Y,
                })
                .collect(),
        )
    }

    /// Key after conjugating the pad through `gate`; `T` has no Pauli update.
    pub fn update(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::X(_) | Gate::Z(_) => {}
            Gate::H(q) => std::mem::swap(&mut self.a[q], &mut self.b[q]),
            Gate::Cnot { control, target } => {
                self.a[target] ^= self.a[control];
                self.b[control] ^= self.b[target];
            }
            Gate::T(_) => {
                return Err(Error::Precondition(
                    "T gates need a correction gadget; the pad cannot be tracked through them"
                        .into(),
                ))
            }
        }
        Ok(())
    }
}

/// Runs `circuit` on the padded `|0...0>`, tracks the key, decrypts, and
/// returns the total-variation distance to the unencrypted output.
pub fn qotp_roundtrip(circuit: &Circuit, keys: &PauliKeys) -> Result<f64> {
    if !circuit.is_clifford() {
        return Err(Error::Precondition(
            "circuit contains T; the pad round trip needs Clifford gates".into(),
        ));
    }
    if keys.len() != circuit.n_qubits {
        return Err(invalid(
            "keys",
            format!("length {} != {} qubits", keys.len(), circuit.n_qubits),
        ));
    }
    let plain = simulate(circuit)?;
    let mut state = StateVector::zero(circuit.n_qubits)?;
    state.apply_pauli(&keys.as_pauli());
    let mut key = keys.clone();
    for &g in &circuit.gates {
        state.apply(g);
        key.update(g)?;
    }
    state.apply_pauli(&key.as_pauli());
    Ok(tv_distance(&plain.probabilities(), &state.probabilities()))
}
