//! Text syntax for base rings and group ring elements.
//!
//! Elements print as signed sums of terms in descending lexicographic order of
//! exponent, e.g. `3*t1^2*t2^-1 + 1`; coefficients with several terms are
//! parenthesized. The printed form parses back to the same element and prints
//! identically.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Signed;

use super::element::default_name;
use super::{BaseRing, GroupRingElement, RingError, Scalar};

struct ScalarText {
    negative: bool,
    body: String,
    /// The body is a sum and needs parentheses inside a product.
    compound: bool,
}

fn render_scalar(base: &BaseRing, s: &Scalar) -> ScalarText {
    match (base, s) {
        (BaseRing::Integers, Scalar::Int(n)) => ScalarText {
            negative: n.is_negative(),
            body: n.abs().to_string(),
            compound: false,
        },
        (BaseRing::IntegersMod(_) | BaseRing::PrimeField(_), Scalar::Int(n)) => ScalarText {
            negative: false,
            body: n.to_string(),
            compound: false,
        },
        (BaseRing::UnivariateQuotient { base: inner, var, .. }, Scalar::Poly(c)) => {
            let pieces: Vec<ScalarText> = c
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, x)| !inner.is_zero(x))
                .map(|(k, x)| {
                    let t = render_scalar(inner, x);
                    if k == 0 {
                        return t;
                    }
                    let power = if k == 1 { var.clone() } else { format!("{var}^{k}") };
                    let body = if t.body == "1" && !t.compound {
                        power
                    } else if t.compound {
                        format!("({})*{power}", t.body)
                    } else {
                        format!("{}*{power}", t.body)
                    };
                    ScalarText {
                        negative: t.negative,
                        body,
                        compound: false,
                    }
                })
                .collect();
            match pieces.len() {
                0 => ScalarText {
                    negative: false,
                    body: "0".into(),
                    compound: false,
                },
                1 => pieces.into_iter().next().expect("one piece"),
                _ => ScalarText {
                    negative: false,
                    body: join_signed(pieces.into_iter().map(|p| (p.negative, p.body))),
                    compound: true,
                },
            }
        }
        _ => panic!("scalar does not belong to {base}"),
    }
}

fn join_signed(parts: impl Iterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (i, (neg, body)) in parts.enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

pub fn format_scalar(base: &BaseRing, s: &Scalar) -> String {
    let t = render_scalar(base, s);
    if t.negative {
        format!("-{}", t.body)
    } else {
        t.body
    }
}

pub(crate) fn render_element(x: &GroupRingElement, names: &dyn Fn(usize) -> String) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let n = x.num_terms();
    let parts = x.terms().rev().map(|(e, c)| {
        let t = render_scalar(x.base(), c);
        let monomial: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, &k)| {
                if k == 1 {
                    names(i)
                } else {
                    format!("{}^{k}", names(i))
                }
            })
            .collect();
        let monomial = monomial.join("*");
        let body = if monomial.is_empty() {
            if t.compound && n > 1 {
                format!("({})", t.body)
            } else {
                t.body
            }
        } else if t.body == "1" && !t.compound {
            monomial
        } else if t.compound {
            format!("({})*{monomial}", t.body)
        } else {
            format!("{}*{monomial}", t.body)
        };
        (t.negative, body)
    });
    join_signed(parts)
}

/// Polynomial in `var` over `base`, constant term first.
pub(crate) fn render_univariate(base: &BaseRing, var: &str, coeffs: &[Scalar]) -> String {
    let x = GroupRingElement::from_terms(
        base,
        1,
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (vec![k as i64], c.clone())),
    );
    x.render(&|_| var.to_string())
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, RingError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Token::Num(digits.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()[]/".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(RingError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    base: &'a BaseRing,
    rank: usize,
    env: &'a HashMap<String, GroupRingElement>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RingError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(RingError::Parse(format!(
                "expected '{c}' at token {}",
                self.pos
            )))
        }
    }

    fn expr(&mut self) -> Result<GroupRingElement, RingError> {
        let negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<GroupRingElement, RingError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<GroupRingElement, RingError> {
        let a = self.atom()?;
        if !self.eat('^') {
            return Ok(a);
        }
        let paren = self.eat('(');
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let k = match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                i64::try_from(n).map_err(|_| RingError::Parse("exponent too large".into()))?
            }
            _ => return Err(RingError::Parse("expected an integer exponent".into())),
        };
        if paren {
            self.expect(')')?;
        }
        a.pow_signed(if negative { -k } else { k })
    }

    fn atom(&mut self) -> Result<GroupRingElement, RingError> {
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(GroupRingElement::from_int(self.base, self.rank, n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                self.env
                    .get(&name)
                    .cloned()
                    .ok_or_else(|| RingError::Parse(format!("unknown symbol {name}")))
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let x = self.expr()?;
                self.expect(')')?;
                Ok(x)
            }
            other => Err(RingError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses with generators named `t1..tr`.
pub fn parse_element(base: &BaseRing, rank: usize, s: &str) -> Result<GroupRingElement, RingError> {
    let names: Vec<String> = (0..rank).map(default_name).collect();
    parse_element_with(base, &names, s)
}

/// Parses with generator `i` named `names[i]`; quotient variables of the
/// base ring are recognized by their own names.
pub fn parse_element_with(
    base: &BaseRing,
    names: &[String],
    s: &str,
) -> Result<GroupRingElement, RingError> {
    let rank = names.len();
    let mut env = HashMap::new();
    for v in base.variables() {
        let g = base.named_generator(&v).expect("declared variable");
        env.insert(v, GroupRingElement::constant(base, rank, g));
    }
    for (i, n) in names.iter().enumerate() {
        if env.contains_key(n) {
            return Err(RingError::Parse(format!("name {n} is already a base variable")));
        }
        env.insert(n.clone(), GroupRingElement::variable(base, rank, i));
    }
    parse_in_env(base, rank, &env, s)
}

pub(crate) fn parse_in_env(
    base: &BaseRing,
    rank: usize,
    env: &HashMap<String, GroupRingElement>,
    s: &str,
) -> Result<GroupRingElement, RingError> {
    let tokens = tokenize(s)?;
    if tokens.is_empty() {
        return Err(RingError::Parse("empty expression".into()));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        base,
        rank,
        env,
    };
    let x = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(RingError::Parse(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    Ok(x)
}

/// Parses `Z`, `Z/m`, `Fp` followed by any number of `[var]/(poly)` quotients.
pub fn parse_base_ring(s: &str) -> Result<BaseRing, RingError> {
    let s = s.trim();
    let (head, mut rest) = match s.find('[') {
        Some(i) => (s[..i].trim(), &s[i..]),
        None => (s, ""),
    };
    let mut ring = if head == "Z" {
        BaseRing::Integers
    } else if let Some(m) = head.strip_prefix("Z/") {
        BaseRing::integers_mod(parse_nat(m)?)?
    } else if let Some(p) = head.strip_prefix('F') {
        BaseRing::prime_field(parse_nat(p)?)?
    } else {
        return Err(RingError::Parse(format!("unknown base ring {head:?}")));
    };
    while !rest.is_empty() {
        let close = rest
            .find(']')
            .ok_or_else(|| RingError::Parse("missing ']'".into()))?;
        let var = rest[1..close].trim();
        let after = rest[close + 1..].trim_start();
        let after = after
            .strip_prefix('/')
            .ok_or_else(|| RingError::Parse("expected '/' after variable".into()))?
            .trim_start();
        if !after.starts_with('(') {
            return Err(RingError::Parse("expected '(' before the modulus".into()));
        }
        let end = matching_paren(after)?;
        let poly = &after[1..end];
        let f = parse_element_with(&ring, &[var.to_string()], poly)?;
        let mut coeffs = Vec::new();
        for (e, c) in f.terms() {
            if e[0] < 0 {
                return Err(RingError::Parse("modulus has a negative power".into()));
            }
            let k = e[0] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, ring.zero());
            }
            coeffs[k] = c.clone();
        }
        ring = BaseRing::quotient(ring, var, coeffs)?;
        rest = after[end + 1..].trim_start();
    }
    Ok(ring)
}

fn parse_nat(s: &str) -> Result<BigInt, RingError> {
    let s = s.trim();
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
        return Err(RingError::Parse(format!("expected a natural number, got {s:?}")));
    }
    Ok(s.parse().expect("digits"))
}

fn matching_paren(s: &str) -> Result<usize, RingError> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
            _ => {}
        }
    }
    Err(RingError::Parse("unbalanced parentheses".into()))
}

/// Three-line document: `base: …`, `rank: …`, then the element.
pub fn format_document(x: &GroupRingElement) -> String {
    format!("base: {}\nrank: {}\n{}\n", x.base(), x.rank(), x)
}

pub fn parse_document(s: &str) -> Result<GroupRingElement, RingError> {
    let mut lines = s.lines();
    let base = lines
        .next()
        .and_then(|l| l.strip_prefix("base:"))
        .ok_or_else(|| RingError::Parse("missing 'base:' header".into()))?;
    let base = parse_base_ring(base)?;
    let rank = lines
        .next()
        .and_then(|l| l.strip_prefix("rank:"))
        .ok_or_else(|| RingError::Parse("missing 'rank:' header".into()))?;
    let rank: usize = rank
        .trim()
        .parse()
        .map_err(|_| RingError::Parse(format!("bad rank {rank:?}")))?;
    let body: Vec<&str> = lines.collect();
    parse_element(&base, rank, &body.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_rings_round_trip() {
        for s in ["Z", "Z/6", "F7", "Z[a]/(a^2)", "F3[i]/(i^2 + 1)", "Z[a]/(a^2)[b]/(b^3 - a*b - 1)"] {
            let r = parse_base_ring(s).unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!(parse_base_ring("Q").is_err());
        assert!(parse_base_ring("F6").is_err());
        assert!(parse_base_ring("Z[a]/(2*a + 1)").is_err());
    }

    #[test]
    fn documents_round_trip() {
        let doc = "base: Z\nrank: 2\n3*t1^2*t2^-1 + 1\n";
        let x = parse_document(doc).unwrap();
        assert_eq!(format_document(&x), doc);
        let doc = "base: Z[a]/(a^2)\nrank: 1\n(2*a - 1)*t1 + (-a + 3)\n";
        let x = parse_document(doc).unwrap();
        assert_eq!(format_document(&x), doc);
    }

    #[test]
    fn printing_normalizes() {
        let x = parse_element(&BaseRing::Integers, 2, "1 + t2^-1*3*t1^2 - 0*t1").unwrap();
        assert_eq!(x.to_string(), "3*t1^2*t2^-1 + 1");
        let f5 = BaseRing::prime_field(5).unwrap();
        assert_eq!(parse_element(&f5, 1, "-t1 - 1").unwrap().to_string(), "4*t1 + 4");
        assert_eq!(parse_element(&f5, 1, "(t1)^(-2)").unwrap().to_string(), "t1^-2");
    }

    #[test]
    fn parse_errors() {
        let z = BaseRing::Integers;
        assert!(parse_element(&z, 1, "t2").is_err());
        assert!(parse_element(&z, 1, "t1 +").is_err());
        assert!(parse_element(&z, 1, "(t1 + 1)^-1").is_err());
        assert!(parse_element(&z, 1, "").is_err());
    }
}
