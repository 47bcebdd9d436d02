//! Ket expressions such as `(|00> + i|11>)/sqrt(2)`, amplitude lists such as
//! `[0.5, 0.5, 0.5, 0.5]`, and named states such as `ghz` or `bell(pi/2)`.
//!
//! ```text
//! expr    := ['+'|'-'] product (('+'|'-') product)*
//! product := unary (('*'|'/')? unary)*        juxtaposition multiplies
//! unary   := '-' unary | atom
//! atom    := number | ket | '(' expr ')' | '[' expr (',' expr)* ']'
//!          | 'i' | 'pi' | func '(' expr ')' | name ['(' expr (',' expr)* ')']
//! ket     := '|' ('0'|'1'|'+'|'-')+ '>'
//! ```
//!
//! Products of kets are tensor products. The final value must be a ket and is
//! normalized.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write;

use num_complex::Complex64;

use super::named::{is_named_state, named_state};
use crate::error::{Error, ParseError, Result};
use crate::state::{make_state, StateVector};

/// Largest register an expression may build.
const MAX_QUBITS: usize = 10;

const FUNCTIONS: [&str; 4] = ["sqrt", "exp", "cos", "sin"];

/// Parsed state together with the text it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub source: String,
    pub state: StateVector,
}

impl StateSpec {
    pub fn parse(source: &str) -> Result<Self> {
        Ok(StateSpec {
            source: source.to_string(),
            state: parse_state_spec(source)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Ket(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Ket(b) => format!("ket |{b}>"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self,
            Tok::Num(_) | Tok::Ident(_) | Tok::Ket(_) | Tok::LParen | Tok::LBracket
        )
    }
}

fn lex(src: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let ch = src[i..].chars().next().expect("in bounds");
        let start = i;
        if ch.is_whitespace() {
            i += ch.len_utf8();
            continue;
        }
        let simple = match ch {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
            continue;
        }
        if ch == '|' {
            i += 1;
            let body = i;
            while i < src.len() && matches!(bytes[i], b'0' | b'1' | b'+' | b'-') {
                i += 1;
            }
            let bits = &src[body..i];
            let close = src[i..].chars().next();
            if bits.is_empty() {
                return Err(ParseError::at(src, i, "empty ket").expecting(["0", "1", "+", "-"]));
            }
            match close {
                Some('>') => i += 1,
                Some('\u{27e9}') => i += '\u{27e9}'.len_utf8(),
                _ => return Err(ParseError::at(src, i, "unterminated ket").expecting(["0", "1", "+", "-", ">"])),
            }
            out.push((Tok::Ket(bits.to_string()), start));
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            while i < src.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < src.len() && matches!(bytes[i], b'e' | b'E') {
                let mut j = i + 1;
                if j < src.len() && matches!(bytes[j], b'+' | b'-') {
                    j += 1;
                }
                if j < src.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < src.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let value = text
                .parse::<f64>()
                .map_err(|_| ParseError::at(src, start, format!("malformed number `{text}`")))?;
            out.push((Tok::Num(value), start));
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let word_end = |from: usize| {
                let mut k = from;
                while k < src.len() && (bytes[k].is_ascii_alphanumeric() || bytes[k] == b'_') {
                    k += 1;
                }
                k
            };
            i = word_end(i);
            // hyphenated names such as `w-gsd`
            while i + 1 < src.len() && bytes[i] == b'-' && bytes[i + 1].is_ascii_alphabetic() {
                let j = word_end(i + 1);
                if is_named_state(&src[start..j]) {
                    i = j;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(src[start..i].to_ascii_lowercase()), start));
            continue;
        }
        return Err(ParseError::at(src, start, format!("unexpected character `{ch}`")));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(Complex64),
    Ket(usize, Vec<Complex64>),
}

fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn ket_value(bits: &str) -> Value {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let amps = bits.chars().fold(vec![one], |acc, b| {
        let f = match b {
            '0' => [one, zero],
            '1' => [zero, one],
            '+' => [h, h],
            _ => [h, -h],
        };
        kron(&acc, &f)
    });
    Value::Ket(bits.len(), amps)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(Error::Parse(
                ParseError::at(self.src, self.offset(), format!("found {}", self.peek().describe())).expecting([what]),
            ))
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let negate = match self.peek() {
            Tok::Plus => {
                self.bump();
                false
            }
            Tok::Minus => {
                self.bump();
                true
            }
            _ => false,
        };
        let mut acc = self.product()?;
        if negate {
            acc = scale(acc, Complex64::new(-1.0, 0.0));
        }
        loop {
            let at = self.offset();
            let sign = match self.peek() {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = scale(self.product()?, Complex64::new(sign, 0.0));
            acc = add(acc, rhs).map_err(|m| Error::Parse(ParseError::at(self.src, at, m)))?;
        }
    }

    fn product(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            let at = self.offset();
            let divide = match self.peek() {
                Tok::Star => {
                    self.bump();
                    false
                }
                Tok::Slash => {
                    self.bump();
                    true
                }
                t if t.starts_atom() => false,
                _ => return Ok(acc),
            };
            let rhs = self.unary()?;
            acc = if divide { div(acc, rhs) } else { mul(acc, rhs) }
                .map_err(|m| Error::Parse(ParseError::at(self.src, at, m)))?;
        }
    }

    fn unary(&mut self) -> Result<Value> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(scale(self.unary()?, Complex64::new(-1.0, 0.0)));
        }
        self.atom()
    }

    fn scalar_arg(&mut self) -> Result<Complex64> {
        let at = self.offset();
        match self.expr()? {
            Value::Scalar(z) => Ok(z),
            Value::Ket(..) => Err(Error::Parse(ParseError::at(self.src, at, "expected a scalar argument"))),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Complex64>> {
        self.expect(Tok::LParen, "(")?;
        let mut args = vec![self.scalar_arg()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.scalar_arg()?);
        }
        self.expect(Tok::RParen, ")")?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Value> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(x) => Ok(Value::Scalar(Complex64::new(x, 0.0))),
            Tok::Ket(bits) => Ok(ket_value(&bits)),
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(v)
            }
            Tok::LBracket => {
                let mut amps = vec![self.scalar_arg()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    amps.push(self.scalar_arg()?);
                }
                self.expect(Tok::RBracket, "]")?;
                let n = amps.len().trailing_zeros() as usize;
                if amps.len() < 2 || !amps.len().is_power_of_two() || n > MAX_QUBITS {
                    return Err(Error::Parse(ParseError::at(
                        self.src,
                        at,
                        format!("amplitude list of length {} is not 2^n", amps.len()),
                    )));
                }
                Ok(Value::Ket(n, amps))
            }
            Tok::Ident(name) => self.identifier(&name, at),
            other => Err(Error::Parse(
                ParseError::at(self.src, at, format!("found {}", other.describe()))
                    .expecting(["number", "ket", "(", "[", "name"]),
            )),
        }
    }

    fn identifier(&mut self, name: &str, at: usize) -> Result<Value> {
        match name {
            "i" => return Ok(Value::Scalar(Complex64::new(0.0, 1.0))),
            "pi" => return Ok(Value::Scalar(Complex64::new(PI, 0.0))),
            _ => {}
        }
        if FUNCTIONS.contains(&name) {
            let args = self.arguments()?;
            let [x] = args[..] else {
                return Err(Error::Parse(ParseError::at(
                    self.src,
                    at,
                    format!("`{name}` takes one argument"),
                )));
            };
            let y = match name {
                "sqrt" => x.sqrt(),
                "exp" => x.exp(),
                "cos" => x.cos(),
                _ => x.sin(),
            };
            return Ok(Value::Scalar(y));
        }
        if !is_named_state(name) {
            return Err(Error::UnknownName(name.to_string()));
        }
        let args = if *self.peek() == Tok::LParen {
            let args_at = self.offset();
            let args = self.arguments()?;
            args.iter()
                .map(|z| {
                    if z.im.abs() <= 1e-12 {
                        Ok(z.re)
                    } else {
                        Err(Error::Parse(ParseError::at(
                            self.src,
                            args_at,
                            "state parameters must be real",
                        )))
                    }
                })
                .collect::<Result<Vec<f64>>>()?
        } else {
            Vec::new()
        };
        let s = named_state(name, &args).map_err(|e| match e {
            Error::Parse(p) => Error::Parse(ParseError::at(self.src, at, p.message)),
            other => other,
        })?;
        Ok(Value::Ket(s.num_qubits(), s.into_amplitudes()))
    }
}

fn scale(v: Value, z: Complex64) -> Value {
    match v {
        Value::Scalar(x) => Value::Scalar(x * z),
        Value::Ket(n, a) => Value::Ket(n, a.into_iter().map(|x| x * z).collect()),
    }
}

fn add(a: Value, b: Value) -> std::result::Result<Value, String> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
        (Value::Ket(n, x), Value::Ket(m, y)) if n == m => {
            Ok(Value::Ket(n, x.iter().zip(&y).map(|(p, q)| p + q).collect()))
        }
        (Value::Ket(n, _), Value::Ket(m, _)) => Err(format!("cannot add {n}-qubit and {m}-qubit kets")),
        _ => Err("cannot add a scalar and a ket".into()),
    }
}

fn mul(a: Value, b: Value) -> std::result::Result<Value, String> {
    match (a, b) {
        (Value::Scalar(x), v) | (v, Value::Scalar(x)) => Ok(scale(v, x)),
        (Value::Ket(n, x), Value::Ket(m, y)) => {
            if n + m > MAX_QUBITS {
                return Err(format!("tensor product exceeds {MAX_QUBITS} qubits"));
            }
            Ok(Value::Ket(n + m, kron(&x, &y)))
        }
    }
}

fn div(a: Value, b: Value) -> std::result::Result<Value, String> {
    match b {
        Value::Scalar(z) if z.norm() > 0.0 => Ok(scale(a, z.inv())),
        Value::Scalar(_) => Err("division by zero".into()),
        Value::Ket(..) => Err("cannot divide by a ket".into()),
    }
}

fn evaluate(src: &str) -> Result<Value> {
    let mut p = Parser {
        src,
        toks: lex(src)?,
        pos: 0,
    };
    if *p.peek() == Tok::End {
        return Err(Error::Parse(
            ParseError::at(src, 0, "empty expression").expecting(["number", "ket", "(", "[", "name"]),
        ));
    }
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(Error::Parse(
            ParseError::at(src, p.offset(), format!("found {}", p.peek().describe())).expecting([
                "+",
                "-",
                "*",
                "/",
                "end of input",
            ]),
        ));
    }
    Ok(v)
}

/// Parse and normalize a state expression.
pub fn parse_state_spec(text: &str) -> Result<StateVector> {
    match evaluate(text)? {
        Value::Ket(n, amps) => make_state(&amps, n),
        Value::Scalar(_) => Err(Error::Parse(
            ParseError::at(text, 0, "expression is a scalar, not a state").expecting(["ket"]),
        )),
    }
}

/// Evaluate a scalar expression such as `pi/4` or `exp(i*pi/3)`.
pub fn parse_scalar(text: &str) -> Result<Complex64> {
    match evaluate(text)? {
        Value::Scalar(z) => Ok(z),
        Value::Ket(..) => Err(Error::Parse(ParseError::at(
            text,
            0,
            "expected a scalar, found a state",
        ))),
    }
}

/// Write a state as a sum of basis kets with round-trip precision. The
/// output parses back to the same amplitudes.
pub fn format_state(state: &StateVector) -> String {
    let n = state.num_qubits();
    let mut out = String::new();
    for (k, a) in state.amplitudes().iter().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        if !out.is_empty() {
            out.push_str(" + ");
        }
        let _ = write!(out, "({:.16e}{:+.16e}i)|{:0width$b}>", a.re, a.im, k, width = n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::haar_state;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn amps(text: &str) -> Vec<Complex64> {
        parse_state_spec(text).unwrap().into_amplitudes()
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bell_with_phase() {
        let h = FRAC_1_SQRT_2;
        let want = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, h)];
        assert!(close(&amps("(|00> + i|11>)/sqrt(2)"), &want, 1e-15));
        assert!(close(&amps("|00> + i |11>"), &want, 1e-15));
        assert!(close(&amps("bell(pi/2)"), &want, 1e-15));
    }

    #[test]
    fn amplitude_list_and_tensor() {
        let want = [c(0.5, 0.0); 4];
        assert!(close(&amps("[0.5, 0.5, 0.5, 0.5]"), &want, 1e-15));
        assert!(close(&amps("|+>|+>"), &want, 1e-15));
        assert!(close(&amps("|++>"), &want, 1e-15));
        assert!(close(&amps("plus plus"), &want, 1e-15));
        assert!(close(
            &amps("[1, 0, 0, 0]"),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            0.0
        ));
    }

    #[test]
    fn named_and_hyphenated() {
        let g = amps("ghz");
        assert!((g[0].re - FRAC_1_SQRT_2).abs() < 1e-15 && (g[7].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let w = amps("w-gsd");
        let r = 1.0 / 3f64.sqrt();
        assert!(close(&w, &amps("(|000> + |101> + |110>)/sqrt(3)"), 1e-15));
        assert!((w[5].re - r).abs() < 1e-15);
        assert!(close(&amps("W"), &amps("|001> + |010> + |100>"), 1e-15));
    }

    #[test]
    fn arithmetic() {
        assert!((parse_scalar("1/2 + 3*i").unwrap() - c(0.5, 3.0)).norm() < 1e-15);
        assert!((parse_scalar("exp(i*pi)").unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((parse_scalar("-2.5e-1").unwrap() - c(-0.25, 0.0)).norm() < 1e-15);
        assert!((parse_scalar("2 * -pi").unwrap() - c(-2.0 * PI, 0.0)).norm() < 1e-15);
        let s = amps("-|0> + 2|1>");
        assert!(s[0].re < 0.0 && s[1].re > 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_state_spec("nonsense"), Err(Error::UnknownName(n)) if n == "nonsense"));
        assert!(matches!(parse_state_spec("|0> - |0>"), Err(Error::ZeroVector)));
        match parse_state_spec("|00> + |1>") {
            Err(Error::Parse(p)) => assert_eq!(p.position, 5),
            other => panic!("{other:?}"),
        }
        match parse_state_spec("(|0> + |1>") {
            Err(Error::Parse(p)) => {
                assert_eq!(p.position, 10);
                assert_eq!(p.expected, vec![")".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        match parse_state_spec("|02>") {
            Err(Error::Parse(p)) => assert_eq!(p.position, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_state_spec("2 + 3"), Err(Error::Parse(_))));
        assert!(matches!(parse_state_spec(""), Err(Error::Parse(_))));
        assert!(matches!(parse_state_spec("[1, 0, 0]"), Err(Error::Parse(_))));
        assert!(matches!(parse_state_spec("|0> / |1>"), Err(Error::Parse(_))));
        assert!(matches!(parse_state_spec("|0> $"), Err(Error::Parse(p)) if p.position == 4));
        assert!(matches!(parse_state_spec("bell(i)"), Err(Error::Parse(_))));
    }

    #[test]
    fn unicode_ket_close() {
        assert!(close(&amps("|01\u{27e9}"), &amps("|01>"), 0.0));
    }

    #[test]
    fn state_spec_keeps_source() {
        let s = StateSpec::parse("ghz").unwrap();
        assert_eq!(s.source, "ghz");
        assert_eq!(s.state.num_qubits(), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn pretty_print_round_trip(seed in any::<u64>(), n in 1usize..=3) {
            let s = haar_state(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let text = format_state(&s);
            let back = parse_state_spec(&text).unwrap();
            prop_assert!(close(back.amplitudes(), s.amplitudes(), 1e-12));
        }

        #[test]
        fn parser_never_panics(text in "[|01+\\-<>() \\[\\],.*/ia-z0-9]{0,24}") {
            let _ = parse_state_spec(&text);
        }
    }
}
