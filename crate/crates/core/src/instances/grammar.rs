//! Text grammar for annotation literals.
//!
//! Each instance prints its elements in a canonical form and parses a
//! slightly wider surface syntax (decimals for fractions, `0`/`1` for
//! booleans). `print` then `parse` is the identity on canonical elements,
//! and `parse` then `print` is the identity on canonical text.
//!
//! Literal forms by instance:
//!
//! ```text
//! bool       true, false
//! nat, trop  3        (trop also: inf)
//! int        -3
//! rplus/fuzz 1/2, 0.8, 3
//! tvl        0, 1/2, 1
//! security   1s, C, S, T, 0s
//! sprime     {}, {C,S}
//! natpoly    2*x*y + z^2 + 1
//! boolpoly   x*y + z^2 + 1
//! posbool    x&y | z, true, false
//! boolexpr   x&!y | !x&y, true, false
//! why        {}, {{x,y},{z}}, {{}}
//! trio       2*{x,y} + {z}, 0
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::value::{
    self, CredSet, Monomial, SecurityLevel, Trop, Value, VarSet,
};
use super::{Kind, Semiring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len()
            && (self.text[self.pos].is_ascii_alphanumeric() || self.text[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an identifier"));
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn digits(&mut self) -> Result<BigUint, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a number"));
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse()
            .unwrap())
    }

    /// Nonnegative rational: `p`, `p/q`, or a decimal like `0.8`.
    fn fraction(&mut self) -> Result<BigRational, ParseError> {
        let int_part = self.digits()?;
        if self.pos < self.text.len() && self.text[self.pos] == b'.' {
            self.pos += 1;
            let start = self.pos;
            let frac_part = self.digits()?;
            let places = (self.pos - start) as u32;
            let den = BigUint::from(10u32).pow(places);
            let num = int_part * &den + frac_part;
            return Ok(BigRational::new(num.into(), den.into()));
        }
        if self.pos < self.text.len() && self.text[self.pos] == b'/' {
            self.pos += 1;
            let den = self.digits()?;
            if den.is_zero() {
                return Err(self.error("zero denominator"));
            }
            return Ok(BigRational::new(int_part.into(), den.into()));
        }
        Ok(BigRational::from(BigInt::from(int_part)))
    }
}

pub fn parse(sr: &Semiring, text: &str) -> Result<Value, ParseError> {
    let mut c = Cursor::new(text);
    let raw = parse_value(sr.kind(), &mut c)?;
    c.finish()?;
    sr.canonicalize(raw).map_err(|e| ParseError {
        column: 1,
        message: e.to_string(),
    })
}

fn parse_value(kind: &Kind, c: &mut Cursor) -> Result<Value, ParseError> {
    match kind {
        Kind::Bool => {
            if c.eat(b'1') {
                Ok(Value::Bool(true))
            } else if c.eat(b'0') {
                Ok(Value::Bool(false))
            } else {
                match c.ident()?.as_str() {
                    "true" => Ok(Value::Bool(true)),
                    "false" => Ok(Value::Bool(false)),
                    other => Err(c.error(format!("`{other}` is not a boolean"))),
                }
            }
        }
        Kind::Nat { .. } | Kind::Table(_) => Ok(Value::Nat(c.digits()?)),
        Kind::Integer => {
            let neg = c.eat(b'-');
            let mag = BigInt::from(c.digits()?);
            Ok(Value::Int(if neg { -mag } else { mag }))
        }
        Kind::NonnegRational | Kind::Fuzz | Kind::FuzzGrid { .. } | Kind::Tvl => {
            Ok(Value::Frac(c.fraction()?))
        }
        Kind::Tropical { .. } => {
            if c.peek().is_some_and(|b| b.is_ascii_digit()) {
                Ok(Value::Trop(Trop::Fin(
                    c.digits()?
                        .try_into()
                        .map_err(|_| c.error("tropical value too large"))?,
                )))
            } else {
                match c.ident()?.as_str() {
                    "inf" => Ok(Value::Trop(Trop::Inf)),
                    other => Err(c.error(format!("`{other}` is not a tropical value"))),
                }
            }
        }
        Kind::Security => {
            let tok = if c.peek() == Some(b'1') || c.peek() == Some(b'0') {
                let d = if c.eat(b'1') { '1' } else {
                    c.eat(b'0');
                    '0'
                };
                format!("{d}{}", c.ident()?)
            } else {
                c.ident()?
            };
            SecurityLevel::from_token(&tok)
                .map(Value::Sec)
                .ok_or_else(|| c.error(format!("`{tok}` is not a security level")))
        }
        Kind::CredSets => {
            c.expect(b'{')?;
            let mut set = CredSet::EMPTY;
            if !c.eat(b'}') {
                loop {
                    let tok = if c.peek() == Some(b'1') {
                        c.eat(b'1');
                        format!("1{}", c.ident()?)
                    } else {
                        c.ident()?
                    };
                    match SecurityLevel::from_token(&tok) {
                        Some(l) if l != SecurityLevel::Never => {
                            set = set.union(CredSet::singleton(l))
                        }
                        _ => return Err(c.error(format!("`{tok}` is not a credential"))),
                    }
                    if c.eat(b'}') {
                        break;
                    }
                    c.expect(b',')?;
                }
            }
            Ok(Value::Creds(set))
        }
        Kind::NatPoly { .. } => {
            let mut poly: BTreeMap<Monomial, BigUint> = BTreeMap::new();
            loop {
                let (coeff, m) = parse_term(c, true)?;
                *poly.entry(m).or_insert_with(BigUint::zero) += coeff;
                if !c.eat(b'+') {
                    break;
                }
            }
            Ok(Value::Poly(value::canonical_poly(poly)))
        }
        Kind::BoolPoly { .. } => {
            let mut set = BTreeSet::new();
            let mut saw_zero = false;
            loop {
                let (coeff, m) = parse_term(c, false)?;
                if coeff.is_zero() {
                    saw_zero = true;
                } else {
                    set.insert(m);
                }
                if !c.eat(b'+') {
                    break;
                }
            }
            let _ = saw_zero;
            Ok(Value::Monomials(value::canonical_monomials(set)))
        }
        Kind::PosBool { .. } => {
            if let Some(b) = c.peek() {
                if b == b't' || b == b'f' || b == b'1' || b == b'0' {
                    let save = c.pos;
                    let word = if b.is_ascii_digit() {
                        c.pos += 1;
                        String::from(b as char)
                    } else {
                        c.ident()?
                    };
                    if c.at_end() {
                        return match word.as_str() {
                            "true" | "1" => Ok(Value::Clauses(BTreeSet::from([VarSet::new()]))),
                            "false" | "0" => Ok(Value::Clauses(BTreeSet::new())),
                            _ => Ok(Value::Clauses(value::canonical_clauses(BTreeSet::from([
                                VarSet::from([word]),
                            ])))),
                        };
                    }
                    c.pos = save;
                }
            }
            let mut clauses = BTreeSet::new();
            loop {
                let mut clause = VarSet::new();
                loop {
                    clause.insert(c.ident()?);
                    if !c.eat(b'&') {
                        break;
                    }
                }
                clauses.insert(clause);
                if !c.eat(b'|') {
                    break;
                }
            }
            Ok(Value::Clauses(value::canonical_clauses(clauses)))
        }
        Kind::BoolExpr { vars } => {
            let n = vars.len();
            if let Some(b) = c.peek() {
                if b == b't' || b == b'f' {
                    let save = c.pos;
                    let word = c.ident()?;
                    if c.at_end() {
                        return match word.as_str() {
                            "true" => Ok(Value::Rows((0..1u32 << n).collect())),
                            "false" => Ok(Value::Rows(BTreeSet::new())),
                            _ => {
                                c.pos = save;
                                parse_boolexpr_dnf(vars, c)
                            }
                        };
                    }
                    c.pos = save;
                }
            }
            parse_boolexpr_dnf(vars, c)
        }
        Kind::Why { .. } => {
            c.expect(b'{')?;
            let mut fam = BTreeSet::new();
            if !c.eat(b'}') {
                loop {
                    fam.insert(parse_varset(c)?);
                    if c.eat(b'}') {
                        break;
                    }
                    c.expect(b',')?;
                }
            }
            Ok(Value::Witnesses(fam))
        }
        Kind::Trio { .. } => {
            if c.peek() == Some(b'0') {
                let save = c.pos;
                c.pos += 1;
                if c.at_end() {
                    return Ok(Value::Trio(BTreeMap::new()));
                }
                c.pos = save;
            }
            let mut bag: BTreeMap<VarSet, BigUint> = BTreeMap::new();
            loop {
                let coeff = if c.peek().is_some_and(|b| b.is_ascii_digit()) {
                    let n = c.digits()?;
                    c.expect(b'*')?;
                    n
                } else {
                    BigUint::one()
                };
                let w = parse_varset(c)?;
                *bag.entry(w).or_insert_with(BigUint::zero) += coeff;
                if !c.eat(b'+') {
                    break;
                }
            }
            Ok(Value::Trio(value::canonical_trio(bag)))
        }
    }
}

/// One polynomial term: `3`, `x`, `2*x*y`, `z^2`. Returns the coefficient
/// and monomial; for `with_coeff = false` a nonunit coefficient is rejected.
fn parse_term(c: &mut Cursor, with_coeff: bool) -> Result<(BigUint, Monomial), ParseError> {
    let mut coeff = BigUint::one();
    let mut m = Monomial::new();
    if c.peek().is_some_and(|b| b.is_ascii_digit()) {
        coeff = c.digits()?;
        if !with_coeff && coeff > BigUint::one() {
            return Err(c.error("coefficients are not allowed here"));
        }
        if !c.eat(b'*') {
            return Ok((coeff, m));
        }
    }
    loop {
        let var = c.ident()?;
        let exp = if c.eat(b'^') {
            let e = c.digits()?;
            u32::try_from(e).map_err(|_| c.error("exponent too large"))?
        } else {
            1
        };
        *m.entry(var).or_insert(0) += exp;
        if !c.eat(b'*') {
            break;
        }
    }
    Ok((coeff, m))
}

fn parse_varset(c: &mut Cursor) -> Result<VarSet, ParseError> {
    c.expect(b'{')?;
    let mut set = VarSet::new();
    if !c.eat(b'}') {
        loop {
            set.insert(c.ident()?);
            if c.eat(b'}') {
                break;
            }
            c.expect(b',')?;
        }
    }
    Ok(set)
}

/// DNF over possibly negated variables; unmentioned variables are free.
fn parse_boolexpr_dnf(vars: &[String], c: &mut Cursor) -> Result<Value, ParseError> {
    let n = vars.len();
    let var_index = |c: &Cursor, name: &str| -> Result<usize, ParseError> {
        vars.iter()
            .position(|v| v == name)
            .ok_or_else(|| c.error(format!("unknown variable `{name}`")))
    };
    let mut rows: BTreeSet<u32> = BTreeSet::new();
    loop {
        // conjunct: positive mask and negative mask
        let mut pos = 0u32;
        let mut neg = 0u32;
        loop {
            let negated = c.eat(b'!');
            let name = c.ident()?;
            let i = var_index(c, &name)?;
            if negated {
                neg |= 1 << i;
            } else {
                pos |= 1 << i;
            }
            if !c.eat(b'&') {
                break;
            }
        }
        for row in 0..1u32 << n {
            if row & pos == pos && row & neg == 0 {
                rows.insert(row);
            }
        }
        if !c.eat(b'|') {
            break;
        }
    }
    Ok(Value::Rows(rows))
}

pub fn print(sr: &Semiring, v: &Value) -> String {
    let mut out = String::new();
    write_value(sr.kind(), v, &mut out).expect("formatting cannot fail");
    out
}

fn write_value(kind: &Kind, v: &Value, out: &mut String) -> fmt::Result {
    use fmt::Write;
    match (kind, v) {
        (Kind::Bool, Value::Bool(b)) => write!(out, "{}", if *b { "true" } else { "false" }),
        (Kind::Nat { .. } | Kind::Table(_), Value::Nat(n)) => write!(out, "{n}"),
        (Kind::Integer, Value::Int(z)) => write!(out, "{z}"),
        (
            Kind::NonnegRational | Kind::Fuzz | Kind::FuzzGrid { .. } | Kind::Tvl,
            Value::Frac(q),
        ) => {
            if q.is_integer() {
                write!(out, "{}", q.numer())
            } else {
                write!(out, "{}/{}", q.numer(), q.denom())
            }
        }
        (Kind::Tropical { .. }, Value::Trop(t)) => write!(out, "{t}"),
        (Kind::Security, Value::Sec(l)) => write!(out, "{}", l.token()),
        (Kind::CredSets, Value::Creds(s)) => {
            write!(out, "{{")?;
            for (i, l) in s.levels().enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                write!(out, "{}", l.token())?;
            }
            write!(out, "}}")
        }
        (Kind::NatPoly { .. }, Value::Poly(p)) => {
            if p.is_empty() {
                return write!(out, "0");
            }
            let mut terms: Vec<(&Monomial, &BigUint)> = p.iter().collect();
            terms.sort_by(|(ma, _), (mb, _)| {
                value::monomial_degree(mb)
                    .cmp(&value::monomial_degree(ma))
                    .then_with(|| ma.cmp(mb))
            });
            for (i, (m, coeff)) in terms.iter().enumerate() {
                if i > 0 {
                    write!(out, " + ")?;
                }
                if m.is_empty() {
                    write!(out, "{coeff}")?;
                } else {
                    if !coeff.is_one() {
                        write!(out, "{coeff}*")?;
                    }
                    write_monomial(m, out)?;
                }
            }
            Ok(())
        }
        (Kind::BoolPoly { .. }, Value::Monomials(set)) => {
            if set.is_empty() {
                return write!(out, "0");
            }
            let mut terms: Vec<&Monomial> = set.iter().collect();
            terms.sort_by(|ma, mb| {
                value::monomial_degree(mb)
                    .cmp(&value::monomial_degree(ma))
                    .then_with(|| ma.cmp(mb))
            });
            for (i, m) in terms.iter().enumerate() {
                if i > 0 {
                    write!(out, " + ")?;
                }
                if m.is_empty() {
                    write!(out, "1")?;
                } else {
                    write_monomial(m, out)?;
                }
            }
            Ok(())
        }
        (Kind::PosBool { .. }, Value::Clauses(clauses)) => {
            if clauses.is_empty() {
                return write!(out, "false");
            }
            if clauses.contains(&VarSet::new()) {
                return write!(out, "true");
            }
            let mut sorted: Vec<&VarSet> = clauses.iter().collect();
            sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            for (i, clause) in sorted.iter().enumerate() {
                if i > 0 {
                    write!(out, " | ")?;
                }
                for (j, var) in clause.iter().enumerate() {
                    if j > 0 {
                        write!(out, "&")?;
                    }
                    write!(out, "{var}")?;
                }
            }
            Ok(())
        }
        (Kind::BoolExpr { vars }, Value::Rows(rows)) => {
            let all = 1u32 << vars.len();
            if rows.is_empty() {
                return write!(out, "false");
            }
            if rows.len() as u32 == all {
                return write!(out, "true");
            }
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    write!(out, " | ")?;
                }
                for (j, var) in vars.iter().enumerate() {
                    if j > 0 {
                        write!(out, "&")?;
                    }
                    if row & (1 << j) == 0 {
                        write!(out, "!")?;
                    }
                    write!(out, "{var}")?;
                }
            }
            Ok(())
        }
        (Kind::Why { .. }, Value::Witnesses(fam)) => {
            write!(out, "{{")?;
            for (i, w) in fam.iter().enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                write_varset(w, out)?;
            }
            write!(out, "}}")
        }
        (Kind::Trio { .. }, Value::Trio(bag)) => {
            if bag.is_empty() {
                return write!(out, "0");
            }
            for (i, (w, coeff)) in bag.iter().enumerate() {
                if i > 0 {
                    write!(out, " + ")?;
                }
                if !coeff.is_one() {
                    write!(out, "{coeff}*")?;
                }
                write_varset(w, out)?;
            }
            Ok(())
        }
        _ => panic!("value has the wrong shape for this instance"),
    }
}

fn write_monomial(m: &Monomial, out: &mut String) -> fmt::Result {
    use fmt::Write;
    for (i, (var, exp)) in m.iter().enumerate() {
        if i > 0 {
            write!(out, "*")?;
        }
        write!(out, "{var}")?;
        if *exp > 1 {
            write!(out, "^{exp}")?;
        }
    }
    Ok(())
}

fn write_varset(w: &VarSet, out: &mut String) -> fmt::Result {
    use fmt::Write;
    write!(out, "{{")?;
    for (i, var) in w.iter().enumerate() {
        if i > 0 {
            write!(out, ",")?;
        }
        write!(out, "{var}")?;
    }
    write!(out, "}}")
}
