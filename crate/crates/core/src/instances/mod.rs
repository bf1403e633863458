//! The catalog of built-in annotation semirings.
//!
//! An instance bundles a carrier, the semiring operations, optional monus and
//! negation, an optional closed-form natural-order predicate, a seeded
//! sampler, and a text grammar for its elements. Instances are immutable
//! after construction and shared via `Arc`.
//!
//! Construction through [`make_instance`] runs the registration gate: the
//! semiring laws A1..A8 are checked exhaustively on finite carriers and on
//! 1000 seeded samples otherwise, and a registered monus must satisfy the
//! Galois property (`a - b <= c` iff `a <= b + c`). A structure that fails
//! the gate is rejected with the offending witness.

pub mod grammar;
pub mod value;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{self, GateFailure};
use crate::rng::Rng;

pub use grammar::ParseError;
pub use value::{CredSet, Monomial, SecurityLevel, Trop, Value, VarSet};

/// Which built-in semiring an instance is, with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Two-valued booleans with or/and.
    Bool,
    /// Natural numbers; with `bound` k, addition and multiplication saturate
    /// at k and the carrier is the finite chain {0..k}.
    Nat { bound: Option<u64> },
    /// Nonnegative rationals with ordinary arithmetic.
    NonnegRational,
    /// Arbitrary-precision integers. A ring: negation is total, monus absent.
    Integer,
    /// min/plus over naturals with infinity; with `bound` k the finite
    /// carrier {0..k} with plus saturating at k, plus infinity.
    Tropical { bound: Option<u64> },
    /// Rationals in [0,1] with max/min.
    Fuzz,
    /// Finite max/min chain {0, 1/d, ..., 1}, an exhaustively checkable
    /// stand-in for fuzz.
    FuzzGrid { denom: u64 },
    /// Three-valued chain {0, 1/2, 1} with max/min.
    Tvl,
    /// The five clearance levels with chain-min as addition and chain-max as
    /// multiplication.
    Security,
    /// Sets of credential levels with union/intersection and set-difference
    /// monus.
    CredSets,
    /// Multivariate polynomials with natural coefficients.
    NatPoly { vars: Vec<String> },
    /// Sets of monomials (polynomials with idempotent coefficients).
    BoolPoly { vars: Vec<String> },
    /// Positive boolean formulas as minimal DNF antichains: the free
    /// distributive lattice over `vars` with bottom and top.
    PosBool { vars: Vec<String> },
    /// Boolean functions over a fixed variable list, as truth tables.
    BoolExpr { vars: Vec<String> },
    /// Families of witness variable sets; union and pairwise union.
    Why { vars: Vec<String> },
    /// Witness sets with multiplicities.
    Trio { vars: Vec<String> },
    /// An explicit finite structure given by operation tables. Used by the
    /// enumeration lab and tests; elements are 0..order.
    Table(TableStructure),
}

/// Operation tables over the carrier {0, .., order-1} with 0 the additive
/// and 1 the multiplicative identity. Tables are row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableStructure {
    pub order: usize,
    pub add: Vec<usize>,
    pub mul: Vec<usize>,
    pub monus: Option<Vec<usize>>,
}

impl TableStructure {
    pub fn add_of(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b]
    }
    pub fn mul_of(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }
}

/// Parameters for [`make_instance`]: a variable list for the polynomial-like
/// instances and a bound for the saturating/truncated/grid variants.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub vars: Vec<String>,
    pub bound: Option<u64>,
}

impl Params {
    pub fn with_vars(names: &[&str]) -> Params {
        Params {
            vars: names.iter().map(|s| s.to_string()).collect(),
            bound: None,
        }
    }

    pub fn with_bound(bound: u64) -> Params {
        Params {
            vars: Vec::new(),
            bound: Some(bound),
        }
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("unknown instance `{0}`")]
    Unknown(String),
    #[error("instance `{0}` requires a nonempty variable list")]
    MissingVars(&'static str),
    #[error("{0}")]
    BadParam(String),
    #[error("registration gate failed: {0}")]
    Gate(#[from] GateFailure),
}

/// A raw value that does not belong to the instance's carrier.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct MalformedValue(pub String);

/// The names accepted by [`make_instance`].
pub const BUILTIN_NAMES: [&str; 15] = [
    "bool", "nat", "rplus", "int", "trop", "fuzz", "tvl", "security", "sprime", "natpoly",
    "boolpoly", "posbool", "boolexpr", "why", "trio",
];

/// One registered annotation structure.
///
/// Equality of annotations is structural equality of canonical [`Value`]s;
/// every operation returns canonical values.
#[derive(Debug)]
pub struct Semiring {
    name: String,
    base_name: String,
    kind: Kind,
    zero: Value,
    one: Value,
    elements: Option<Vec<Value>>,
}

impl PartialEq for Semiring {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}
impl Eq for Semiring {}

/// Build a built-in instance and run the registration gate on it.
///
/// Bounded variants are selected by `params.bound`: `nat` with bound k
/// becomes the saturating chain `nat<=k`, `trop` the truncated `trop<=k`,
/// and `fuzz` the exhaustively checkable grid `fuzz-grid(k)` is available
/// under the name `fuzz-grid`.
pub fn make_instance(name: &str, params: Params) -> Result<Arc<Semiring>, InstanceError> {
    let need_vars = |tag: &'static str| -> Result<Vec<String>, InstanceError> {
        if params.vars.is_empty() {
            Err(InstanceError::MissingVars(tag))
        } else {
            let mut seen = BTreeSet::new();
            for v in &params.vars {
                if v.is_empty() || !seen.insert(v.clone()) {
                    return Err(InstanceError::BadParam(format!(
                        "variable list for `{tag}` must be nonempty and distinct"
                    )));
                }
            }
            Ok(params.vars.clone())
        }
    };
    let kind = match name {
        "bool" => Kind::Bool,
        "nat" => Kind::Nat {
            bound: params.bound,
        },
        "rplus" => Kind::NonnegRational,
        "int" => Kind::Integer,
        "trop" => Kind::Tropical {
            bound: params.bound,
        },
        "fuzz" => Kind::Fuzz,
        "fuzz-grid" => Kind::FuzzGrid {
            denom: params.bound.unwrap_or(4).max(1),
        },
        "tvl" => Kind::Tvl,
        "security" => Kind::Security,
        "sprime" => Kind::CredSets,
        "natpoly" => Kind::NatPoly {
            vars: need_vars("natpoly")?,
        },
        "boolpoly" => Kind::BoolPoly {
            vars: need_vars("boolpoly")?,
        },
        "posbool" => Kind::PosBool {
            vars: need_vars("posbool")?,
        },
        "boolexpr" => Kind::BoolExpr {
            vars: need_vars("boolexpr")?,
        },
        "why" => Kind::Why {
            vars: need_vars("why")?,
        },
        "trio" => Kind::Trio {
            vars: need_vars("trio")?,
        },
        other => return Err(InstanceError::Unknown(other.to_string())),
    };
    if let Kind::PosBool { vars } = &kind {
        if vars.len() > 4 {
            return Err(InstanceError::BadParam(
                "posbool supports at most 4 variables (the carrier grows doubly \
                 exponentially)"
                    .into(),
            ));
        }
    }
    let sr = Semiring::build(kind);
    algebra::registration_gate(&sr, crate::DEFAULT_SEED)?;
    Ok(Arc::new(sr))
}

/// Wrap explicit operation tables as an instance without running the gate.
/// The enumeration lab gates these itself; tests use this to build known
/// non-semirings and non-m-semirings.
pub fn from_tables(name: &str, tables: TableStructure) -> Result<Arc<Semiring>, InstanceError> {
    let n = tables.order;
    if n < 1 || tables.add.len() != n * n || tables.mul.len() != n * n {
        return Err(InstanceError::BadParam("malformed operation tables".into()));
    }
    if let Some(m) = &tables.monus {
        if m.len() != n * n {
            return Err(InstanceError::BadParam("malformed monus table".into()));
        }
    }
    if tables
        .add
        .iter()
        .chain(&tables.mul)
        .chain(tables.monus.iter().flatten())
        .any(|&v| v >= n)
    {
        return Err(InstanceError::BadParam("table entry out of range".into()));
    }
    let mut sr = Semiring::build(Kind::Table(tables));
    sr.name = name.to_string();
    sr.base_name = name.to_string();
    Ok(Arc::new(sr))
}

impl Semiring {
    fn build(kind: Kind) -> Semiring {
        let name = decorated_name(&kind);
        let base_name = base_name(&kind).to_string();
        let zero = zero_of(&kind);
        let one = one_of(&kind);
        let elements = enumerate_carrier(&kind);
        Semiring {
            name,
            base_name,
            kind,
            zero,
            one,
            elements,
        }
    }

    /// Full display name, including parameters (`nat<=7`, `posbool[x,y,z]`).
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Catalog name without parameters (`nat`, `posbool`).
    pub fn base_name(&self) -> &str {
        &self.base_name
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn zero(&self) -> Value {
        self.zero.clone()
    }

    pub fn one(&self) -> Value {
        self.one.clone()
    }

    pub fn is_zero(&self, v: &Value) -> bool {
        *v == self.zero
    }

    /// The carrier as an explicit list, if finite. The list order is the
    /// canonical carrier order used for exhaustive scans and witness
    /// tie-breaking.
    pub fn elements(&self) -> Option<&[Value]> {
        self.elements.as_deref()
    }

    pub fn is_finite(&self) -> bool {
        self.elements.is_some()
    }

    pub fn add(&self, a: &Value, b: &Value) -> Value {
        ops_add(&self.kind, a, b)
    }

    pub fn mul(&self, a: &Value, b: &Value) -> Value {
        ops_mul(&self.kind, a, b)
    }

    pub fn has_monus(&self) -> bool {
        match &self.kind {
            Kind::Integer => false,
            Kind::Table(t) => t.monus.is_some(),
            _ => true,
        }
    }

    /// The registered monus, if any. All built-ins except `int` carry the
    /// closed form of their least-solution difference.
    pub fn monus(&self, a: &Value, b: &Value) -> Option<Value> {
        ops_monus(&self.kind, a, b)
    }

    pub fn has_negate(&self) -> bool {
        matches!(self.kind, Kind::Integer)
    }

    /// Additive inverse, for ring instances.
    pub fn negate(&self, a: &Value) -> Option<Value> {
        match &self.kind {
            Kind::Integer => match a {
                Value::Int(z) => Some(Value::Int(-z)),
                _ => panic!("annotation does not belong to `int`"),
            },
            _ => None,
        }
    }

    /// Closed-form natural-order predicate, where one is registered.
    ///
    /// Instances without one (notably `int`, which is not naturally ordered)
    /// return `None`, and order-dependent checks report themselves
    /// inapplicable rather than guessing.
    pub fn closed_leq(&self, a: &Value, b: &Value) -> Option<bool> {
        ops_closed_leq(&self.kind, a, b)
    }

    /// Whether the natural order is decidable for this instance, either by
    /// exhaustive search over a finite carrier or by a closed form.
    pub fn order_decidable(&self) -> bool {
        self.is_finite() || self.closed_leq(&self.zero, &self.zero).is_some()
    }

    /// Draw one carrier element. Finite carriers sample uniformly from the
    /// element list; countable ones use a kind-specific generator whose
    /// magnitude scales with `size`.
    pub fn sample(&self, rng: &mut Rng, size: u32) -> Value {
        if let Some(els) = &self.elements {
            return els[rng.below(els.len() as u64) as usize].clone();
        }
        sample_countable(&self.kind, rng, size)
    }

    /// Parse an annotation literal in this instance's grammar.
    pub fn parse(&self, text: &str) -> Result<Value, ParseError> {
        grammar::parse(self, text)
    }

    /// Canonical text of an element; `parse` of this text returns the same
    /// element.
    pub fn print(&self, v: &Value) -> String {
        grammar::print(self, v)
    }

    /// Validate carrier membership and put a raw value in canonical form.
    /// Idempotent.
    pub fn canonicalize(&self, raw: Value) -> Result<Value, MalformedValue> {
        canonicalize(&self.kind, raw)
    }

    pub fn vars(&self) -> &[String] {
        match &self.kind {
            Kind::NatPoly { vars }
            | Kind::BoolPoly { vars }
            | Kind::PosBool { vars }
            | Kind::BoolExpr { vars }
            | Kind::Why { vars }
            | Kind::Trio { vars } => vars,
            _ => &[],
        }
    }
}

fn base_name(kind: &Kind) -> &'static str {
    match kind {
        Kind::Bool => "bool",
        Kind::Nat { .. } => "nat",
        Kind::NonnegRational => "rplus",
        Kind::Integer => "int",
        Kind::Tropical { .. } => "trop",
        Kind::Fuzz => "fuzz",
        Kind::FuzzGrid { .. } => "fuzz-grid",
        Kind::Tvl => "tvl",
        Kind::Security => "security",
        Kind::CredSets => "sprime",
        Kind::NatPoly { .. } => "natpoly",
        Kind::BoolPoly { .. } => "boolpoly",
        Kind::PosBool { .. } => "posbool",
        Kind::BoolExpr { .. } => "boolexpr",
        Kind::Why { .. } => "why",
        Kind::Trio { .. } => "trio",
        Kind::Table(_) => "table",
    }
}

fn decorated_name(kind: &Kind) -> String {
    let base = base_name(kind);
    match kind {
        Kind::Nat { bound: Some(k) } | Kind::Tropical { bound: Some(k) } => format!("{base}<={k}"),
        Kind::FuzzGrid { denom } => format!("{base}({denom})"),
        Kind::NatPoly { vars }
        | Kind::BoolPoly { vars }
        | Kind::PosBool { vars }
        | Kind::BoolExpr { vars }
        | Kind::Why { vars }
        | Kind::Trio { vars } => format!("{base}[{}]", vars.join(",")),
        Kind::Table(t) => format!("table({})", t.order),
        _ => base.to_string(),
    }
}

fn zero_of(kind: &Kind) -> Value {
    match kind {
        Kind::Bool => Value::Bool(false),
        Kind::Nat { .. } => Value::Nat(BigUint::zero()),
        Kind::NonnegRational | Kind::Fuzz | Kind::FuzzGrid { .. } | Kind::Tvl => {
            Value::Frac(BigRational::zero())
        }
        Kind::Integer => Value::Int(BigInt::zero()),
        Kind::Tropical { .. } => Value::Trop(Trop::Inf),
        Kind::Security => Value::Sec(SecurityLevel::Never),
        Kind::CredSets => Value::Creds(CredSet::EMPTY),
        Kind::NatPoly { .. } => Value::Poly(BTreeMap::new()),
        Kind::BoolPoly { .. } => Value::Monomials(BTreeSet::new()),
        Kind::PosBool { .. } => Value::Clauses(BTreeSet::new()),
        Kind::BoolExpr { .. } => Value::Rows(BTreeSet::new()),
        Kind::Why { .. } => Value::Witnesses(BTreeSet::new()),
        Kind::Trio { .. } => Value::Trio(BTreeMap::new()),
        Kind::Table(_) => Value::Nat(BigUint::zero()),
    }
}

fn one_of(kind: &Kind) -> Value {
    match kind {
        Kind::Bool => Value::Bool(true),
        Kind::Nat { .. } => Value::Nat(BigUint::one()),
        Kind::NonnegRational | Kind::Fuzz | Kind::FuzzGrid { .. } | Kind::Tvl => {
            Value::Frac(BigRational::one())
        }
        Kind::Integer => Value::Int(BigInt::one()),
        Kind::Tropical { .. } => Value::Trop(Trop::Fin(0)),
        Kind::Security => Value::Sec(SecurityLevel::Public),
        Kind::CredSets => Value::Creds(CredSet::FULL),
        Kind::NatPoly { .. } => Value::Poly(BTreeMap::from([(Monomial::new(), BigUint::one())])),
        Kind::BoolPoly { .. } => Value::Monomials(BTreeSet::from([Monomial::new()])),
        Kind::PosBool { .. } => Value::Clauses(BTreeSet::from([VarSet::new()])),
        Kind::BoolExpr { vars } => Value::Rows((0..1u32 << vars.len()).collect()),
        Kind::Why { .. } => Value::Witnesses(BTreeSet::from([VarSet::new()])),
        Kind::Trio { .. } => Value::Trio(BTreeMap::from([(VarSet::new(), BigUint::one())])),
        Kind::Table(_) => Value::Nat(BigUint::one()),
    }
}

fn enumerate_carrier(kind: &Kind) -> Option<Vec<Value>> {
    match kind {
        Kind::Bool => Some(vec![Value::Bool(false), Value::Bool(true)]),
        Kind::Nat { bound: Some(k) } => Some((0..=*k).map(Value::nat).collect()),
        Kind::Tropical { bound: Some(k) } => Some(
            (0..=*k)
                .map(|n| Value::Trop(Trop::Fin(n)))
                .chain([Value::Trop(Trop::Inf)])
                .collect(),
        ),
        Kind::FuzzGrid { denom } => Some(
            (0..=*denom)
                .map(|i| {
                    Value::Frac(BigRational::new(
                        BigInt::from(i),
                        BigInt::from(*denom),
                    ))
                })
                .collect(),
        ),
        Kind::Tvl => Some(vec![
            Value::frac(0, 1),
            Value::frac(1, 2),
            Value::frac(1, 1),
        ]),
        Kind::Security => Some(SecurityLevel::ALL.iter().map(|l| Value::Sec(*l)).collect()),
        Kind::CredSets => Some(
            (0..16u8)
                .map(|m| Value::Creds(CredSet::from_mask(m)))
                .collect(),
        ),
        Kind::PosBool { vars } if vars.len() <= 4 => Some(enumerate_antichains(vars)),
        Kind::BoolExpr { vars } if vars.len() <= 2 => {
            let rows = 1u32 << vars.len();
            Some(
                (0..1u64 << rows)
                    .map(|mask| {
                        Value::Rows((0..rows).filter(|r| mask & (1 << r) != 0).collect())
                    })
                    .collect(),
            )
        }
        Kind::Table(t) => Some((0..t.order as u64).map(Value::nat).collect()),
        _ => None,
    }
}

/// All antichains of nonempty subsets of `vars`, plus the constant-true
/// antichain `{{}}`. This is the full PosBool carrier, in canonical order.
fn enumerate_antichains(vars: &[String]) -> Vec<Value> {
    let n = vars.len();
    let subsets: Vec<u32> = (1..1u32 << n).collect();
    let mut out = Vec::new();
    for family_mask in 0..1u64 << subsets.len() {
        let family: Vec<u32> = subsets
            .iter()
            .enumerate()
            .filter(|(i, _)| family_mask & (1 << i) != 0)
            .map(|(_, s)| *s)
            .collect();
        let antichain = family
            .iter()
            .all(|a| family.iter().all(|b| a == b || (a & b != *a && a & b != *b)));
        if antichain {
            let clauses: BTreeSet<VarSet> = family
                .iter()
                .map(|mask| {
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| vars[i].clone())
                        .collect()
                })
                .collect();
            out.push(Value::Clauses(clauses));
        }
    }
    out.push(Value::Clauses(BTreeSet::from([VarSet::new()])));
    out.sort();
    out
}

fn nat_ref(v: &Value) -> &BigUint {
    match v {
        Value::Nat(n) => n,
        _ => panic!("annotation is not a natural number"),
    }
}

fn frac_ref(v: &Value) -> &BigRational {
    match v {
        Value::Frac(q) => q,
        _ => panic!("annotation is not a rational"),
    }
}

fn table_idx(v: &Value) -> usize {
    nat_ref(v).to_usize().expect("table element out of range")
}

fn ops_add(kind: &Kind, a: &Value, b: &Value) -> Value {
    match kind {
        Kind::Bool => match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => Value::Bool(*x || *y),
            _ => panic!("annotation is not a boolean"),
        },
        Kind::Nat { bound } => {
            let s = nat_ref(a) + nat_ref(b);
            Value::Nat(clamp_nat(s, *bound))
        }
        Kind::NonnegRational => Value::Frac(frac_ref(a) + frac_ref(b)),
        Kind::Integer => match (a, b) {
            (Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            _ => panic!("annotation is not an integer"),
        },
        Kind::Tropical { .. } => match (a, b) {
            (Value::Trop(x), Value::Trop(y)) => Value::Trop(*x.min(y)),
            _ => panic!("annotation is not tropical"),
        },
        Kind::Fuzz | Kind::FuzzGrid { .. } | Kind::Tvl => {
            Value::Frac(frac_ref(a).max(frac_ref(b)).clone())
        }
        Kind::Security => match (a, b) {
            (Value::Sec(x), Value::Sec(y)) => Value::Sec(*x.min(y)),
            _ => panic!("annotation is not a security level"),
        },
        Kind::CredSets => match (a, b) {
            (Value::Creds(x), Value::Creds(y)) => Value::Creds(x.union(*y)),
            _ => panic!("annotation is not a credential set"),
        },
        Kind::NatPoly { .. } => match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => {
                let mut out = x.clone();
                for (m, c) in y {
                    *out.entry(m.clone()).or_insert_with(BigUint::zero) += c;
                }
                Value::Poly(value::canonical_poly(out))
            }
            _ => panic!("annotation is not a polynomial"),
        },
        Kind::BoolPoly { .. } => match (a, b) {
            (Value::Monomials(x), Value::Monomials(y)) => {
                Value::Monomials(x.union(y).cloned().collect())
            }
            _ => panic!("annotation is not a monomial set"),
        },
        Kind::PosBool { .. } => match (a, b) {
            (Value::Clauses(x), Value::Clauses(y)) => {
                Value::Clauses(value::canonical_clauses(x.union(y).cloned().collect()))
            }
            _ => panic!("annotation is not a positive boolean formula"),
        },
        Kind::BoolExpr { .. } => match (a, b) {
            (Value::Rows(x), Value::Rows(y)) => Value::Rows(x.union(y).copied().collect()),
            _ => panic!("annotation is not a truth table"),
        },
        Kind::Why { .. } => match (a, b) {
            (Value::Witnesses(x), Value::Witnesses(y)) => {
                Value::Witnesses(x.union(y).cloned().collect())
            }
            _ => panic!("annotation is not a witness family"),
        },
        Kind::Trio { .. } => match (a, b) {
            (Value::Trio(x), Value::Trio(y)) => {
                let mut out = x.clone();
                for (w, c) in y {
                    *out.entry(w.clone()).or_insert_with(BigUint::zero) += c;
                }
                Value::Trio(value::canonical_trio(out))
            }
            _ => panic!("annotation is not a trio bag"),
        },
        Kind::Table(t) => Value::nat(t.add_of(table_idx(a), table_idx(b)) as u64),
    }
}

fn ops_mul(kind: &Kind, a: &Value, b: &Value) -> Value {
    match kind {
        Kind::Bool => match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => Value::Bool(*x && *y),
            _ => panic!("annotation is not a boolean"),
        },
        Kind::Nat { bound } => {
            let p = nat_ref(a) * nat_ref(b);
            Value::Nat(clamp_nat(p, *bound))
        }
        Kind::NonnegRational => Value::Frac(frac_ref(a) * frac_ref(b)),
        Kind::Integer => match (a, b) {
            (Value::Int(x), Value::Int(y)) => Value::Int(x * y),
            _ => panic!("annotation is not an integer"),
        },
        Kind::Tropical { bound } => match (a, b) {
            (Value::Trop(x), Value::Trop(y)) => Value::Trop(match (x, y) {
                (Trop::Inf, _) | (_, Trop::Inf) => Trop::Inf,
                (Trop::Fin(m), Trop::Fin(n)) => {
                    let s = m.saturating_add(*n);
                    // The bounded variant is the quotient collapsing every
                    // value above the bound to infinity; saturating at the
                    // bound instead would break distributivity over monus.
                    match bound {
                        Some(k) if s > *k => Trop::Inf,
                        _ => Trop::Fin(s),
                    }
                }
            }),
            _ => panic!("annotation is not tropical"),
        },
        Kind::Fuzz | Kind::FuzzGrid { .. } | Kind::Tvl => {
            Value::Frac(frac_ref(a).min(frac_ref(b)).clone())
        }
        Kind::Security => match (a, b) {
            (Value::Sec(x), Value::Sec(y)) => Value::Sec(*x.max(y)),
            _ => panic!("annotation is not a security level"),
        },
        Kind::CredSets => match (a, b) {
            (Value::Creds(x), Value::Creds(y)) => Value::Creds(x.intersect(*y)),
            _ => panic!("annotation is not a credential set"),
        },
        Kind::NatPoly { .. } => match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => {
                let mut out: BTreeMap<Monomial, BigUint> = BTreeMap::new();
                for (ma, ca) in x {
                    for (mb, cb) in y {
                        let m = value::monomial_mul(ma, mb);
                        *out.entry(m).or_insert_with(BigUint::zero) += ca * cb;
                    }
                }
                Value::Poly(value::canonical_poly(out))
            }
            _ => panic!("annotation is not a polynomial"),
        },
        Kind::BoolPoly { .. } => match (a, b) {
            (Value::Monomials(x), Value::Monomials(y)) => {
                let mut out = BTreeSet::new();
                for ma in x {
                    for mb in y {
                        out.insert(value::monomial_mul(ma, mb));
                    }
                }
                Value::Monomials(out)
            }
            _ => panic!("annotation is not a monomial set"),
        },
        Kind::PosBool { .. } => match (a, b) {
            (Value::Clauses(x), Value::Clauses(y)) => {
                let mut out = BTreeSet::new();
                for ca in x {
                    for cb in y {
                        out.insert(ca.union(cb).cloned().collect());
                    }
                }
                Value::Clauses(value::canonical_clauses(out))
            }
            _ => panic!("annotation is not a positive boolean formula"),
        },
        Kind::BoolExpr { .. } => match (a, b) {
            (Value::Rows(x), Value::Rows(y)) => {
                Value::Rows(x.intersection(y).copied().collect())
            }
            _ => panic!("annotation is not a truth table"),
        },
        Kind::Why { .. } => match (a, b) {
            (Value::Witnesses(x), Value::Witnesses(y)) => {
                let mut out = BTreeSet::new();
                for wa in x {
                    for wb in y {
                        out.insert(wa.union(wb).cloned().collect());
                    }
                }
                Value::Witnesses(out)
            }
            _ => panic!("annotation is not a witness family"),
        },
        Kind::Trio { .. } => match (a, b) {
            (Value::Trio(x), Value::Trio(y)) => {
                let mut out: BTreeMap<VarSet, BigUint> = BTreeMap::new();
                for (wa, ca) in x {
                    for (wb, cb) in y {
                        let w: VarSet = wa.union(wb).cloned().collect();
                        *out.entry(w).or_insert_with(BigUint::zero) += ca * cb;
                    }
                }
                Value::Trio(value::canonical_trio(out))
            }
            _ => panic!("annotation is not a trio bag"),
        },
        Kind::Table(t) => Value::nat(t.mul_of(table_idx(a), table_idx(b)) as u64),
    }
}

fn clamp_nat(v: BigUint, bound: Option<u64>) -> BigUint {
    match bound {
        Some(k) => {
            let k = BigUint::from(k);
            if v > k {
                k
            } else {
                v
            }
        }
        None => v,
    }
}

/// Closed-form monus for the chain lattices (max/min or min/max): keep `a`
/// when it lies strictly below `b` in the lattice order induced by addition,
/// otherwise the additive identity.
///
/// For the complete distributive lattices this is the least solution
/// `inf { c | a <= b + c }`; [`lattice_monus`] below handles the non-chain
/// lattice PosBool by monotone closure.
fn chain_monus(kind: &Kind, a: &Value, b: &Value) -> Value {
    let leq = ops_closed_leq(kind, a, b).expect("chain order is closed-form");
    if leq {
        zero_of(kind)
    } else {
        a.clone()
    }
}

/// Monus for the distributive-lattice instances (security, tvl, fuzz,
/// fuzz-grid, posbool): the least `c` with `a <= b + c` in the lattice
/// order.
///
/// Chains use the closed form directly. PosBool computes the minimal
/// monotone function dominating `a AND NOT b` by closing `a(w) AND NOT b(w)`
/// upward over all valuations and re-canonicalizing to a minimal antichain.
pub fn lattice_monus(sr: &Semiring, a: &Value, b: &Value) -> Value {
    match sr.kind() {
        Kind::Security | Kind::Tvl | Kind::Fuzz | Kind::FuzzGrid { .. } => {
            chain_monus(sr.kind(), a, b)
        }
        Kind::PosBool { vars } => posbool_monus(vars, a, b),
        _ => panic!("lattice_monus is only defined for the lattice instances"),
    }
}

fn posbool_monus(vars: &[String], a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Clauses(x), Value::Clauses(y)) => {
            let n = vars.len();
            let mut sat = BTreeSet::new();
            for v in 0..1u32 << n {
                let hit = (0..1u32 << n).any(|w| {
                    w & v == w
                        && value::clauses_eval(x, vars, w)
                        && !value::clauses_eval(y, vars, w)
                });
                if hit {
                    sat.insert(v);
                }
            }
            Value::Clauses(value::clauses_from_monotone_table(vars, &sat))
        }
        _ => panic!("annotation is not a positive boolean formula"),
    }
}

/// Monus for the pointwise families: truncated subtraction per coefficient
/// (nat, rplus, natpoly, trio), set difference (boolpoly, why, sprime),
/// `a AND NOT b` (bool, boolexpr), and the tropical rule (`a` when `a` is
/// numerically below `b`, else infinity).
pub fn pointwise_monus(sr: &Semiring, a: &Value, b: &Value) -> Value {
    pointwise_monus_kind(sr.kind(), a, b)
}

fn pointwise_monus_kind(kind: &Kind, a: &Value, b: &Value) -> Value {
    match kind {
        Kind::Bool => match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => Value::Bool(*x && !*y),
            _ => panic!("annotation is not a boolean"),
        },
        Kind::Nat { .. } => {
            let (x, y) = (nat_ref(a), nat_ref(b));
            Value::Nat(if x > y { x - y } else { BigUint::zero() })
        }
        Kind::NonnegRational => {
            let (x, y) = (frac_ref(a), frac_ref(b));
            Value::Frac(if x > y {
                x - y
            } else {
                BigRational::zero()
            })
        }
        Kind::Tropical { .. } => match (a, b) {
            (Value::Trop(x), Value::Trop(y)) => {
                Value::Trop(if x < y { *x } else { Trop::Inf })
            }
            _ => panic!("annotation is not tropical"),
        },
        Kind::CredSets => match (a, b) {
            (Value::Creds(x), Value::Creds(y)) => Value::Creds(x.difference(*y)),
            _ => panic!("annotation is not a credential set"),
        },
        Kind::NatPoly { .. } => match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => {
                let mut out = BTreeMap::new();
                for (m, c) in x {
                    let rest = y.get(m).cloned().unwrap_or_else(BigUint::zero);
                    if *c > rest {
                        out.insert(m.clone(), c - rest);
                    }
                }
                Value::Poly(out)
            }
            _ => panic!("annotation is not a polynomial"),
        },
        Kind::BoolPoly { .. } => match (a, b) {
            (Value::Monomials(x), Value::Monomials(y)) => {
                Value::Monomials(x.difference(y).cloned().collect())
            }
            _ => panic!("annotation is not a monomial set"),
        },
        Kind::BoolExpr { .. } => match (a, b) {
            (Value::Rows(x), Value::Rows(y)) => Value::Rows(x.difference(y).copied().collect()),
            _ => panic!("annotation is not a truth table"),
        },
        Kind::Why { .. } => match (a, b) {
            (Value::Witnesses(x), Value::Witnesses(y)) => {
                Value::Witnesses(x.difference(y).cloned().collect())
            }
            _ => panic!("annotation is not a witness family"),
        },
        Kind::Trio { .. } => match (a, b) {
            (Value::Trio(x), Value::Trio(y)) => {
                let mut out = BTreeMap::new();
                for (w, c) in x {
                    let rest = y.get(w).cloned().unwrap_or_else(BigUint::zero);
                    if *c > rest {
                        out.insert(w.clone(), c - rest);
                    }
                }
                Value::Trio(out)
            }
            _ => panic!("annotation is not a trio bag"),
        },
        _ => panic!("pointwise_monus is not defined for this instance"),
    }
}

fn ops_monus(kind: &Kind, a: &Value, b: &Value) -> Option<Value> {
    match kind {
        Kind::Integer => None,
        Kind::Security | Kind::Tvl | Kind::Fuzz | Kind::FuzzGrid { .. } => {
            Some(chain_monus(kind, a, b))
        }
        Kind::PosBool { vars } => Some(posbool_monus(vars, a, b)),
        Kind::Table(t) => {
            let tab = t.monus.as_ref()?;
            Some(Value::nat(
                tab[table_idx(a) * t.order + table_idx(b)] as u64,
            ))
        }
        _ => Some(pointwise_monus_kind(kind, a, b)),
    }
}

fn ops_closed_leq(kind: &Kind, a: &Value, b: &Value) -> Option<bool> {
    match kind {
        Kind::Bool => match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => Some(!*x || *y),
            _ => panic!("annotation is not a boolean"),
        },
        Kind::Nat { .. } => Some(nat_ref(a) <= nat_ref(b)),
        Kind::NonnegRational | Kind::Fuzz | Kind::FuzzGrid { .. } | Kind::Tvl => {
            Some(frac_ref(a) <= frac_ref(b))
        }
        Kind::Integer => None,
        Kind::Tropical { .. } => match (a, b) {
            (Value::Trop(x), Value::Trop(y)) => Some(y <= x),
            _ => panic!("annotation is not tropical"),
        },
        Kind::Security => match (a, b) {
            (Value::Sec(x), Value::Sec(y)) => Some(y <= x),
            _ => panic!("annotation is not a security level"),
        },
        Kind::CredSets => match (a, b) {
            (Value::Creds(x), Value::Creds(y)) => Some(x.is_subset(*y)),
            _ => panic!("annotation is not a credential set"),
        },
        Kind::NatPoly { .. } => match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => Some(x.iter().all(|(m, c)| {
                y.get(m).is_some_and(|d| c <= d)
            })),
            _ => panic!("annotation is not a polynomial"),
        },
        Kind::BoolPoly { .. } => match (a, b) {
            (Value::Monomials(x), Value::Monomials(y)) => Some(x.is_subset(y)),
            _ => panic!("annotation is not a monomial set"),
        },
        Kind::PosBool { .. } => {
            let join = ops_add(kind, a, b);
            Some(join == *b)
        }
        Kind::BoolExpr { .. } => match (a, b) {
            (Value::Rows(x), Value::Rows(y)) => Some(x.is_subset(y)),
            _ => panic!("annotation is not a truth table"),
        },
        Kind::Why { .. } => match (a, b) {
            (Value::Witnesses(x), Value::Witnesses(y)) => Some(x.is_subset(y)),
            _ => panic!("annotation is not a witness family"),
        },
        Kind::Trio { .. } => match (a, b) {
            (Value::Trio(x), Value::Trio(y)) => Some(x.iter().all(|(w, c)| {
                y.get(w).is_some_and(|d| c <= d)
            })),
            _ => panic!("annotation is not a trio bag"),
        },
        Kind::Table(_) => None,
    }
}

fn sample_countable(kind: &Kind, rng: &mut Rng, size: u32) -> Value {
    let size = size.max(1) as u64;
    match kind {
        Kind::Nat { .. } => Value::nat(rng.below(size + 1)),
        Kind::NonnegRational => {
            let den = 1 + rng.below(size);
            let num = rng.below(size + 1);
            Value::Frac(BigRational::new(BigInt::from(num), BigInt::from(den)))
        }
        Kind::Integer => {
            let n = rng.below(2 * size + 1) as i64 - size as i64;
            Value::int(n)
        }
        Kind::Tropical { .. } => {
            if rng.below(8) == 0 {
                Value::Trop(Trop::Inf)
            } else {
                Value::Trop(Trop::Fin(rng.below(size + 1)))
            }
        }
        Kind::Fuzz => {
            let den = 1 + rng.below(size);
            let num = rng.below(den + 1);
            Value::Frac(BigRational::new(BigInt::from(num), BigInt::from(den)))
        }
        Kind::NatPoly { vars } => {
            let terms = rng.below(3);
            let mut poly: BTreeMap<Monomial, BigUint> = BTreeMap::new();
            for _ in 0..terms {
                let m = sample_monomial(vars, rng);
                let coeff = BigUint::from(1 + rng.below(size.min(6)));
                *poly.entry(m).or_insert_with(BigUint::zero) += coeff;
            }
            Value::Poly(value::canonical_poly(poly))
        }
        Kind::BoolPoly { vars } => {
            let terms = rng.below(3);
            let mut set = BTreeSet::new();
            for _ in 0..terms {
                set.insert(sample_monomial(vars, rng));
            }
            Value::Monomials(set)
        }
        Kind::PosBool { vars } => {
            let clauses = rng.below(3);
            let mut set = BTreeSet::new();
            for _ in 0..clauses {
                set.insert(sample_varset(vars, rng));
            }
            Value::Clauses(value::canonical_clauses(set))
        }
        Kind::BoolExpr { vars } => {
            let rows = 1u32 << vars.len();
            let mask = rng.next_u64();
            Value::Rows((0..rows).filter(|r| mask & (1 << (r % 64)) != 0).collect())
        }
        Kind::Why { vars } => {
            let count = rng.below(3);
            let mut fam = BTreeSet::new();
            for _ in 0..count {
                fam.insert(sample_varset(vars, rng));
            }
            Value::Witnesses(fam)
        }
        Kind::Trio { vars } => {
            let count = rng.below(3);
            let mut bag: BTreeMap<VarSet, BigUint> = BTreeMap::new();
            for _ in 0..count {
                let w = sample_varset(vars, rng);
                *bag.entry(w).or_insert_with(BigUint::zero) += BigUint::from(1 + rng.below(3));
            }
            Value::Trio(value::canonical_trio(bag))
        }
        _ => unreachable!("finite carriers sample from the element list"),
    }
}

fn sample_monomial(vars: &[String], rng: &mut Rng) -> Monomial {
    let mut m = Monomial::new();
    for v in vars {
        let e = rng.below(3) as u32;
        if e > 0 {
            m.insert(v.clone(), e);
        }
    }
    m
}

fn sample_varset(vars: &[String], rng: &mut Rng) -> VarSet {
    let mask = rng.next_u64();
    vars.iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << (i % 64)) != 0)
        .map(|(_, v)| v.clone())
        .collect()
}

fn canonicalize(kind: &Kind, raw: Value) -> Result<Value, MalformedValue> {
    let fail = |msg: &str| Err(MalformedValue(msg.to_string()));
    match (kind, raw) {
        (Kind::Bool, v @ Value::Bool(_)) => Ok(v),
        (Kind::Nat { bound }, Value::Nat(n)) => {
            if let Some(k) = bound {
                if n > BigUint::from(*k) {
                    return fail("natural exceeds the instance bound");
                }
            }
            Ok(Value::Nat(n))
        }
        (Kind::NonnegRational, Value::Frac(q)) => {
            if q < BigRational::zero() {
                return fail("rational must be nonnegative");
            }
            Ok(Value::Frac(q))
        }
        (Kind::Integer, v @ Value::Int(_)) => Ok(v),
        (Kind::Tropical { bound }, Value::Trop(t)) => {
            if let (Some(k), Trop::Fin(n)) = (bound, t) {
                if n > *k {
                    return fail("tropical value exceeds the instance bound");
                }
            }
            Ok(Value::Trop(t))
        }
        (Kind::Fuzz, Value::Frac(q)) => {
            if q < BigRational::zero() || q > BigRational::one() {
                return fail("fuzzy value must lie in [0, 1]");
            }
            Ok(Value::Frac(q))
        }
        (Kind::FuzzGrid { denom }, Value::Frac(q)) => {
            let scaled = &q * BigRational::from(BigInt::from(*denom));
            if q < BigRational::zero() || q > BigRational::one() || !scaled.is_integer() {
                return fail("value must be a grid fraction in [0, 1]");
            }
            Ok(Value::Frac(q))
        }
        (Kind::Tvl, Value::Frac(q)) => {
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            if q != BigRational::zero() && q != half && q != BigRational::one() {
                return fail("three-valued logic admits only 0, 1/2, 1");
            }
            Ok(Value::Frac(q))
        }
        (Kind::Security, v @ Value::Sec(_)) => Ok(v),
        (Kind::CredSets, v @ Value::Creds(_)) => Ok(v),
        (Kind::NatPoly { vars }, Value::Poly(p)) => {
            let p = value::canonical_poly(p);
            if p.keys().flat_map(|m| m.keys()).any(|v| !vars.contains(v)) {
                return fail("polynomial uses a variable outside the instance");
            }
            Ok(Value::Poly(p))
        }
        (Kind::BoolPoly { vars }, Value::Monomials(s)) => {
            let s = value::canonical_monomials(s);
            if s.iter().flat_map(|m| m.keys()).any(|v| !vars.contains(v)) {
                return fail("monomial uses a variable outside the instance");
            }
            Ok(Value::Monomials(s))
        }
        (Kind::PosBool { vars }, Value::Clauses(c)) => {
            let c = value::canonical_clauses(c);
            if c.iter().flatten().any(|v| !vars.contains(v)) {
                return fail("clause uses a variable outside the instance");
            }
            Ok(Value::Clauses(c))
        }
        (Kind::BoolExpr { vars }, Value::Rows(r)) => {
            let max = 1u32 << vars.len();
            if r.iter().any(|row| *row >= max) {
                return fail("truth-table row out of range for the variable list");
            }
            Ok(Value::Rows(r))
        }
        (Kind::Why { vars }, Value::Witnesses(w)) => {
            if w.iter().flatten().any(|v| !vars.contains(v)) {
                return fail("witness uses a variable outside the instance");
            }
            Ok(Value::Witnesses(w))
        }
        (Kind::Trio { vars }, Value::Trio(t)) => {
            let t = value::canonical_trio(t);
            if t.keys().flatten().any(|v| !vars.contains(v)) {
                return fail("witness uses a variable outside the instance");
            }
            Ok(Value::Trio(t))
        }
        (Kind::Table(t), Value::Nat(n)) => {
            if n >= BigUint::from(t.order) {
                return fail("element out of carrier range");
            }
            Ok(Value::Nat(n))
        }
        _ => fail("value has the wrong shape for this instance"),
    }
}

/// Map a clearance level to the set of credentials allowed to see it: all
/// levels at or above it in the chain, with `Never` mapping to the empty
/// set.
///
/// This is a semiring homomorphism from `security` into `sprime`:
/// min maps to union, max to intersection, and the identities correspond.
pub fn embed_security(level: SecurityLevel) -> CredSet {
    let mut out = CredSet::EMPTY;
    for l in SecurityLevel::CREDENTIALS {
        if l >= level {
            out = out.union(CredSet::singleton(l));
        }
    }
    out
}
