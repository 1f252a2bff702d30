//! Circuit representation, text format, benchmark generators, ASAP stage
//! scheduling, and priority scoring.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    H,
    X,
    Rz,
    Cz,
    Cp,
}

impl GateKind {
    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::Cz | GateKind::Cp)
    }

    pub fn has_angle(self) -> bool {
        matches!(self, GateKind::Rz | GateKind::Cp)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Rz => "rz",
            GateKind::Cz => "cz",
            GateKind::Cp => "cp",
        }
    }
}

/// A gate on one or two qubits; `angle` is present exactly for Rz and Cp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub a: u32,
    pub b: Option<u32>,
    pub angle: Option<f64>,
}

impl Gate {
    pub fn h(q: u32) -> Self {
        Gate { kind: GateKind::H, a: q, b: None, angle: None }
    }

    pub fn x(q: u32) -> Self {
        Gate { kind: GateKind::X, a: q, b: None, angle: None }
    }

    pub fn rz(q: u32, angle: f64) -> Self {
        Gate { kind: GateKind::Rz, a: q, b: None, angle: Some(angle) }
    }

    pub fn cz(a: u32, b: u32) -> Self {
        assert_ne!(a, b, "two-qubit gate needs distinct qubits");
        Gate { kind: GateKind::Cz, a, b: Some(b), angle: None }
    }

    pub fn cp(a: u32, b: u32, angle: f64) -> Self {
        assert_ne!(a, b, "two-qubit gate needs distinct qubits");
        Gate { kind: GateKind::Cp, a, b: Some(b), angle: Some(angle) }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.b.is_some()
    }

    pub fn qubits(&self) -> impl Iterator<Item = u32> {
        std::iter::once(self.a).chain(self.b)
    }

    /// Qubit pair normalized as (low, high); None for single-qubit gates.
    pub fn pair(&self) -> Option<(u32, u32)> {
        self.b.map(|b| (self.a.min(b), self.a.max(b)))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.angle, self.b) {
            (None, None) => write!(f, "{} {}", self.kind.name(), self.a),
            (Some(t), None) => write!(f, "{}({}) {}", self.kind.name(), t, self.a),
            (None, Some(b)) => write!(f, "{} {} {}", self.kind.name(), self.a, b),
            (Some(t), Some(b)) => write!(f, "{}({}) {} {}", self.kind.name(), self.a, b),
        }
    }
}

/// A logical circuit: qubit count and ordered gate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: u32,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: u32) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn validate(&self) -> Result<()> {
        for (i, gate) in self.gates.iter().enumerate() {
            for q in gate.qubits() {
                if q >= self.n {
                    return Err(Error::Circuit(format!(
                        "gate {i} ({gate}) references qubit {q} >= n={}",
                        self.n
                    )));
                }
            }
            if gate.angle.is_some() != gate.kind.has_angle() {
                return Err(Error::Circuit(format!(
                    "gate {i} ({gate}) has inconsistent angle presence"
                )));
            }
            if let Some(b) = gate.b {
                if b == gate.a {
                    return Err(Error::Circuit(format!("gate {i} repeats qubit {b}")));
                }
            }
        }
        Ok(())
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Circuit text form; parse_circuit round-trips it.
    pub fn to_text(&self) -> String {
        let mut out = format!("qreg {};\n", self.n);
        for gate in &self.gates {
            out.push_str(&format!("{gate};\n"));
        }
        out
    }

    /// SHA-256 of the text form, hex-encoded.
    pub fn hash_hex(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_text().as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

/// One ASAP layer of simultaneously executable gates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub index: u32,
    pub gates: Vec<Gate>,
}

impl Stage {
    /// Normalized (low, high) entangling pairs in this stage, sorted.
    pub fn cz_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs: Vec<(u32, u32)> = self.gates.iter().filter_map(|g| g.pair()).collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn has_two_qubit(&self) -> bool {
        self.gates.iter().any(|g| g.is_two_qubit())
    }
}

/// Accumulated qubit priority scores; qubits never seen score 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PriorityTable {
    scores: BTreeMap<u32, f64>,
}

impl PriorityTable {
    pub fn score(&self, q: u32) -> f64 {
        self.scores.get(&q).copied().unwrap_or(0.0)
    }

    /// Qubits 0..n ordered by descending score, ascending index on ties.
    pub fn ranked(&self, n: u32) -> Vec<u32> {
        let mut qs: Vec<u32> = (0..n).collect();
        qs.sort_by(|&a, &b| {
            self.score(b)
                .partial_cmp(&self.score(a))
                .unwrap()
                .then(a.cmp(&b))
        });
        qs
    }
}

/// Place every gate at the earliest stage after all of its qubit
/// predecessors. Gates with no predecessor land at stage 0.
pub fn asap_schedule(c: &Circuit) -> Vec<Stage> {
    let mut last: BTreeMap<u32, i64> = BTreeMap::new();
    let mut stages: Vec<Stage> = Vec::new();
    for gate in &c.gates {
        let s = gate
            .qubits()
            .map(|q| last.get(&q).copied().unwrap_or(-1))
            .max()
            .unwrap()
            + 1;
        let s = s as usize;
        while stages.len() <= s {
            stages.push(Stage { index: stages.len() as u32, gates: Vec::new() });
        }
        for q in gate.qubits() {
            last.insert(q, s as i64);
        }
        stages[s].gates.push(gate.clone());
    }
    stages
}

/// Per-qubit score: each gate at stage p adds 1/(p+1) to its qubits.
pub fn priority_scores(stages: &[Stage]) -> PriorityTable {
    let mut table = PriorityTable::default();
    for stage in stages {
        let weight = 1.0 / (stage.index as f64 + 1.0);
        for gate in &stage.gates {
            for q in gate.qubits() {
                *table.scores.entry(q).or_insert(0.0) += weight;
            }
        }
    }
    table
}

/// Benchmark circuit families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchFamily {
    Qft,
    Ising,
    Bv,
    Cat,
    Adder,
}

impl BenchFamily {
    pub const ALL: [BenchFamily; 5] = [
        BenchFamily::Qft,
        BenchFamily::Ising,
        BenchFamily::Bv,
        BenchFamily::Cat,
        BenchFamily::Adder,
    ];

    pub fn min_qubits(self) -> u32 {
        match self {
            BenchFamily::Adder => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for BenchFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BenchFamily::Qft => "qft",
            BenchFamily::Ising => "ising",
            BenchFamily::Bv => "bv",
            BenchFamily::Cat => "cat",
            BenchFamily::Adder => "adder",
        };
        f.write_str(name)
    }
}

impl FromStr for BenchFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qft" => Ok(BenchFamily::Qft),
            "ising" => Ok(BenchFamily::Ising),
            "bv" => Ok(BenchFamily::Bv),
            "cat" => Ok(BenchFamily::Cat),
            "adder" => Ok(BenchFamily::Adder),
            _ => Err(Error::Invalid(format!("unknown benchmark family `{s}`"))),
        }
    }
}

fn push_cnot(c: &mut Circuit, control: u32, target: u32) {
    c.push(Gate::h(target));
    c.push(Gate::cz(control, target));
    c.push(Gate::h(target));
}

fn push_ccz(c: &mut Circuit, a: u32, b: u32, t: u32) {
    c.push(Gate::cp(b, t, PI / 2.0));
    push_cnot(c, a, b);
    c.push(Gate::cp(b, t, -PI / 2.0));
    push_cnot(c, a, b);
    c.push(Gate::cp(a, t, PI / 2.0));
}

fn push_toffoli(c: &mut Circuit, a: u32, b: u32, t: u32) {
    c.push(Gate::h(t));
    push_ccz(c, a, b, t);
    c.push(Gate::h(t));
}

/// Deterministic benchmark circuit for (family, n, seed).
pub fn gen_benchmark(family: BenchFamily, n: u32, seed: u64) -> Result<Circuit> {
    if n < family.min_qubits() {
        return Err(Error::Circuit(format!(
            "{family} needs at least {} qubits, got {n}",
            family.min_qubits()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    match family {
        BenchFamily::Qft => {
            for i in 0..n {
                c.push(Gate::h(i));
                for j in i + 1..n {
                    let angle = PI / f64::powi(2.0, (j - i) as i32);
                    c.push(Gate::cp(j, i, angle));
                }
            }
        }
        BenchFamily::Ising => {
            for q in 0..n {
                c.push(Gate::rz(q, rng.gen_range(0.0..std::f64::consts::TAU)));
            }
            for i in 0..n - 1 {
                c.push(Gate::cz(i, i + 1));
            }
            for q in 0..n {
                c.push(Gate::rz(q, rng.gen_range(0.0..std::f64::consts::TAU)));
            }
        }
        BenchFamily::Bv => {
            let target = n - 1;
            let mut bits: Vec<bool> = (0..n - 1).map(|_| rng.gen_bool(0.5)).collect();
            if bits.iter().all(|&b| !b) {
                bits[0] = true;
            }
            c.push(Gate::x(target));
            for q in 0..n {
                c.push(Gate::h(q));
            }
            for (i, &bit) in bits.iter().enumerate() {
                if bit {
                    push_cnot(&mut c, i as u32, target);
                }
            }
            for q in 0..n - 1 {
                c.push(Gate::h(q));
            }
        }
        BenchFamily::Cat => {
            c.push(Gate::h(0));
            for i in 0..n - 1 {
                push_cnot(&mut c, i, i + 1);
            }
        }
        BenchFamily::Adder => {
            // Ripple-carry a + b -> b over registers interleaved as
            // c0, a0, b0, a1, b1, ..., with the final carry on 2k+1.
            let k = (n - 2) / 2;
            let carry_in = 0u32;
            let a = |i: u32| 2 * i + 1;
            let b = |i: u32| 2 * i + 2;
            let carry_out = 2 * k + 1;
            let mut prev = carry_in;
            for i in 0..k {
                c.push(Gate::h(a(i)));
                c.push(Gate::cz(a(i), b(i)));
                c.push(Gate::h(a(i)));
                // CNOT(a, b) then CNOT(a, prev) then Toffoli(prev, b, a)
                push_cnot(&mut c, a(i), b(i));
                push_cnot(&mut c, a(i), prev);
                push_toffoli(&mut c, prev, b(i), a(i));
                prev = a(i);
            }
            push_cnot(&mut c, prev, carry_out);
            for i in (0..k).rev() {
                let carry = if i == 0 { carry_in } else { a(i - 1) };
                push_toffoli(&mut c, carry, b(i), a(i));
                push_cnot(&mut c, a(i), carry);
                push_cnot(&mut c, carry, b(i));
            }
        }
    }
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    Semi,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Token,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find("//") {
            Some(i) => &raw[..i],
            None => raw,
        };
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let col = i + 1;
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = match ch {
                '(' => {
                    i += 1;
                    Token::LParen
                }
                ')' => {
                    i += 1;
                    Token::RParen
                }
                ';' => {
                    i += 1;
                    Token::Semi
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                    {
                        i += 1;
                    }
                    Token::Ident(chars[start..i].iter().collect())
                }
                c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                    let start = i;
                    i += 1;
                    while i < chars.len()
                        && (chars[i].is_ascii_digit()
                            || chars[i] == '.'
                            || chars[i] == 'e'
                            || chars[i] == 'E'
                            || ((chars[i] == '-' || chars[i] == '+')
                                && matches!(chars[i - 1], 'e' | 'E')))
                    {
                        i += 1;
                    }
                    Token::Number(chars[start..i].iter().collect())
                }
                other => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push(Spanned { tok, line: lineno + 1, col });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, col) = self
            .toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1));
        Err(Error::Parse { line, col, message: message.into() })
    }

    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let s = self.toks.get(self.pos).cloned();
        if s.is_some() {
            self.pos += 1;
        }
        s
    }

    fn expect_semi(&mut self) -> Result<()> {
        match self.next() {
            Some(Spanned { tok: Token::Semi, .. }) => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected `;`")
            }
        }
    }

    fn uint(&mut self, what: &str) -> Result<u32> {
        match self.next() {
            Some(Spanned { tok: Token::Number(s), line, col }) => {
                s.parse::<u32>().map_err(|_| Error::Parse {
                    line,
                    col,
                    message: format!("expected {what}, got `{s}`"),
                })
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err(format!("expected {what}"))
            }
        }
    }

    fn float(&mut self) -> Result<f64> {
        match self.next() {
            Some(Spanned { tok: Token::Number(s), line, col }) => {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    col,
                    message: format!("expected number, got `{s}`"),
                })
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected number")
            }
        }
    }

    fn qubit(&mut self, n: u32) -> Result<u32> {
        let at = self.pos;
        let q = self.uint("qubit index")?;
        if q >= n {
            let s = &self.toks[at];
            return Err(Error::Parse {
                line: s.line,
                col: s.col,
                message: format!("qubit index {q} out of range (qreg {n})"),
            });
        }
        Ok(q)
    }
}

/// Parse the circuit text grammar:
/// `qreg <n>;` then `h <q>; x <q>; rz(<f>) <q>; cz <a> <b>; cp(<f>) <a> <b>;`
/// with `//` comments.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };

    match p.next() {
        Some(Spanned { tok: Token::Ident(name), .. }) if name == "qreg" => {}
        _ => {
            p.pos = 0;
            return p.err("expected `qreg <n>;` header");
        }
    }
    let n = p.uint("qubit count")?;
    p.expect_semi()?;
    let mut c = Circuit::new(n);

    while let Some(s) = p.peek() {
        let (name, line, col) = match &s.tok {
            Token::Ident(name) => (name.clone(), s.line, s.col),
            _ => return p.err("expected gate name"),
        };
        p.next();
        match name.as_str() {
            "h" | "x" => {
                let q = p.qubit(n)?;
                c.push(if name == "h" { Gate::h(q) } else { Gate::x(q) });
            }
            "rz" | "cp" => {
                match p.next() {
                    Some(Spanned { tok: Token::LParen, .. }) => {}
                    _ => {
                        p.pos = p.pos.saturating_sub(1);
                        return p.err("expected `(`");
                    }
                }
                let angle = p.float()?;
                match p.next() {
                    Some(Spanned { tok: Token::RParen, .. }) => {}
                    _ => {
                        p.pos = p.pos.saturating_sub(1);
                        return p.err("expected `)`");
                    }
                }
                if name == "rz" {
                    let q = p.qubit(n)?;
                    c.push(Gate::rz(q, angle));
                } else {
                    let a = p.qubit(n)?;
                    let b = p.qubit(n)?;
                    if a == b {
                        return Err(Error::Parse {
                            line,
                            col,
                            message: format!("cp repeats qubit {a}"),
                        });
                    }
                    c.push(Gate::cp(a, b, angle));
                }
            }
            "cz" => {
                let a = p.qubit(n)?;
                let b = p.qubit(n)?;
                if a == b {
                    return Err(Error::Parse {
                        line,
                        col,
                        message: format!("cz repeats qubit {a}"),
                    });
                }
                c.push(Gate::cz(a, b));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    col,
                    message: format!("unsupported gate `{other}`"),
                })
            }
        }
        p.expect_semi()?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qft_gate_counts() {
        let c = gen_benchmark(BenchFamily::Qft, 10, 0).unwrap();
        let h = c.gates.iter().filter(|g| g.kind == GateKind::H).count();
        let cp = c.gates.iter().filter(|g| g.kind == GateKind::Cp).count();
        assert_eq!(h, 10);
        assert_eq!(cp, 45);
    }

    #[test]
    fn ising_nearest_neighbor_chain() {
        let c = gen_benchmark(BenchFamily::Ising, 5, 0).unwrap();
        let pairs: Vec<(u32, u32)> = c.gates.iter().filter_map(|g| g.pair()).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(c.gates.iter().any(|g| g.kind == GateKind::Rz));
    }

    #[test]
    fn cat_is_h_plus_chain() {
        let c = gen_benchmark(BenchFamily::Cat, 3, 0).unwrap();
        let links: Vec<(u32, u32)> = c.gates.iter().filter_map(|g| g.pair()).collect();
        assert_eq!(links, vec![(0, 1), (1, 2)]);
        assert_eq!(c.gates[0], Gate::h(0));
    }

    #[test]
    fn bv_has_entanglers_and_target() {
        let c = gen_benchmark(BenchFamily::Bv, 8, 3).unwrap();
        let pairs: Vec<(u32, u32)> = c.gates.iter().filter_map(|g| g.pair()).collect();
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|&(_, b)| b == 7));
    }

    #[test]
    fn adder_uses_supported_kinds_only() {
        for n in [4, 5, 10] {
            let c = gen_benchmark(BenchFamily::Adder, n, 0).unwrap();
            assert!(!c.gates.is_empty());
            c.validate().unwrap();
        }
        assert!(gen_benchmark(BenchFamily::Adder, 3, 0).is_err());
    }

    #[test]
    fn generators_deterministic() {
        for family in BenchFamily::ALL {
            let a = gen_benchmark(family, 9, 42).unwrap();
            let b = gen_benchmark(family, 9, 42).unwrap();
            assert_eq!(a, b);
        }
        let a = gen_benchmark(BenchFamily::Ising, 9, 1).unwrap();
        let b = gen_benchmark(BenchFamily::Ising, 9, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn parse_basic() {
        let c = parse_circuit("qreg 2; h 0; cz 0 1;").unwrap();
        assert_eq!(c.n, 2);
        assert_eq!(c.gates, vec![Gate::h(0), Gate::cz(0, 1)]);
    }

    #[test]
    fn parse_angle() {
        let c = parse_circuit("qreg 2; cp(1.5707963) 0 1;").unwrap();
        assert_eq!(c.gates.len(), 1);
        let angle = c.gates[0].angle.unwrap();
        assert!((angle - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn parse_out_of_range() {
        let err = parse_circuit("qreg 1; cz 0 1;").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("out of range"), "{msg}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_circuit("qreg 2;\nfoo 0;").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_circuit("h 0;").is_err());
        assert!(parse_circuit("qreg 2; h 0").is_err());
        assert!(parse_circuit("qreg 2; rz 0;").is_err());
        assert!(parse_circuit("qreg 2; cz 0 0;").is_err());
        assert!(parse_circuit("qreg 2; cz 0 1; $").is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for family in BenchFamily::ALL {
            let n = rng.gen_range(4..12);
            let c = gen_benchmark(family, n, 5).unwrap();
            let back = parse_circuit(&c.to_text()).unwrap();
            assert_eq!(c.n, back.n);
            assert_eq!(c.gates.len(), back.gates.len());
            for (x, y) in c.gates.iter().zip(&back.gates) {
                assert_eq!(x.kind, y.kind);
                assert_eq!(x.a, y.a);
                assert_eq!(x.b, y.b);
                if let (Some(p), Some(q)) = (x.angle, y.angle) {
                    assert!((p - q).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn asap_chain_and_parallel() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(0));
        c.push(Gate::cz(0, 1));
        c.push(Gate::h(1));
        let stages = asap_schedule(&c);
        assert_eq!(stages.len(), 3);
        for s in &stages {
            assert_eq!(s.gates.len(), 1);
        }

        let mut c = Circuit::new(4);
        c.push(Gate::cz(0, 1));
        c.push(Gate::cz(2, 3));
        let stages = asap_schedule(&c);
        assert_eq!(stages.len(), 1);
        assert_eq!(stages[0].gates.len(), 2);
    }

    #[test]
    fn asap_preserves_per_qubit_order_and_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(2..10u32);
            let mut c = Circuit::new(n);
            for _ in 0..rng.gen_range(1..60) {
                if rng.gen_bool(0.5) {
                    c.push(Gate::h(rng.gen_range(0..n)));
                } else {
                    let a = rng.gen_range(0..n);
                    let mut b = rng.gen_range(0..n);
                    if b == a {
                        b = (b + 1) % n;
                    }
                    c.push(Gate::cz(a, b));
                }
            }
            let stages = asap_schedule(&c);
            let total: usize = stages.iter().map(|s| s.gates.len()).sum();
            assert_eq!(total, c.gates.len());
            for (i, s) in stages.iter().enumerate() {
                assert_eq!(s.index as usize, i);
                let mut seen = std::collections::BTreeSet::new();
                for g in &s.gates {
                    for q in g.qubits() {
                        assert!(seen.insert(q), "qubit {q} twice in stage {i}");
                    }
                }
            }
            // per-qubit order preserved
            for q in 0..n {
                let orig: Vec<&Gate> =
                    c.gates.iter().filter(|g| g.qubits().any(|x| x == q)).collect();
                let staged: Vec<&Gate> = stages
                    .iter()
                    .flat_map(|s| s.gates.iter())
                    .filter(|g| g.qubits().any(|x| x == q))
                    .collect();
                assert_eq!(orig.len(), staged.len());
                for (a, b) in orig.iter().zip(&staged) {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn priority_examples() {
        let mut c = Circuit::new(3);
        c.push(Gate::h(0)); // stage 0
        c.push(Gate::cz(0, 1)); // stage 1
        let stages = asap_schedule(&c);
        let pri = priority_scores(&stages);
        assert!((pri.score(0) - 1.5).abs() < 1e-12);
        assert!((pri.score(1) - 0.5).abs() < 1e-12);
        assert_eq!(pri.score(2), 0.0);

        let mut c = Circuit::new(2);
        c.push(Gate::h(0));
        c.push(Gate::h(0));
        c.push(Gate::h(0));
        c.push(Gate::cz(0, 1)); // qubit 1 only at stage 3
        let pri = priority_scores(&asap_schedule(&c));
        assert!((pri.score(1) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn priority_permutation_equivariant() {
        let mut c = Circuit::new(4);
        c.push(Gate::h(0));
        c.push(Gate::cz(0, 2));
        c.push(Gate::cz(1, 3));
        c.push(Gate::h(2));
        let pri = priority_scores(&asap_schedule(&c));

        // relabel q0<->q1, q2<->q3
        let relabel = |q: u32| match q {
            0 => 1,
            1 => 0,
            2 => 3,
            3 => 2,
            other => other,
        };
        let mut c2 = Circuit::new(4);
        for g in &c.gates {
            let mut g2 = g.clone();
            g2.a = relabel(g2.a);
            g2.b = g2.b.map(relabel);
            c2.push(g2);
        }
        let pri2 = priority_scores(&asap_schedule(&c2));
        for q in 0..4 {
            assert!((pri.score(q) - pri2.score(relabel(q))).abs() < 1e-12);
        }
    }

    #[test]
    fn ranked_tie_break() {
        let mut c = Circuit::new(2);
        c.push(Gate::cz(0, 1));
        let pri = priority_scores(&asap_schedule(&c));
        assert_eq!(pri.ranked(2), vec![0, 1]);
    }
}
