//! Canonical annotation values.
//!
//! Every element of every built-in semiring is stored in a canonical form, so
//! structural equality coincides with semantic equality. The smart
//! constructors here (`canonical_poly`, `canonical_clauses`, ...) establish
//! that form; the arithmetic in [`super`] preserves it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

/// A set of variable names (a why-provenance witness, a clause, a Trio key).
pub type VarSet = BTreeSet<String>;

/// A monomial: variable name to positive exponent. Empty map = constant 1.
pub type Monomial = BTreeMap<String, u32>;

/// Security clearance levels, least restrictive first.
///
/// The chain order is `Public < Confidential < Secret < TopSecret < Never`,
/// where `Public` is the multiplicative identity and `Never` the additive one
/// (addition is chain-min, multiplication chain-max).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SecurityLevel {
    Public,
    Confidential,
    Secret,
    TopSecret,
    Never,
}

impl SecurityLevel {
    pub const ALL: [SecurityLevel; 5] = [
        SecurityLevel::Public,
        SecurityLevel::Confidential,
        SecurityLevel::Secret,
        SecurityLevel::TopSecret,
        SecurityLevel::Never,
    ];

    /// The four credential levels (everything except `Never`).
    pub const CREDENTIALS: [SecurityLevel; 4] = [
        SecurityLevel::Public,
        SecurityLevel::Confidential,
        SecurityLevel::Secret,
        SecurityLevel::TopSecret,
    ];

    pub fn token(self) -> &'static str {
        match self {
            SecurityLevel::Public => "1s",
            SecurityLevel::Confidential => "C",
            SecurityLevel::Secret => "S",
            SecurityLevel::TopSecret => "T",
            SecurityLevel::Never => "0s",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|l| l.token() == s)
    }
}

/// A subset of the four credential levels, as a 4-bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CredSet(u8);

impl CredSet {
    pub const EMPTY: CredSet = CredSet(0);
    pub const FULL: CredSet = CredSet(0b1111);

    pub fn singleton(level: SecurityLevel) -> Self {
        debug_assert!(level != SecurityLevel::Never);
        CredSet(1 << level as u8)
    }

    pub fn from_mask(mask: u8) -> Self {
        CredSet(mask & 0b1111)
    }

    pub fn contains(self, level: SecurityLevel) -> bool {
        level != SecurityLevel::Never && self.0 & (1 << level as u8) != 0
    }

    pub fn union(self, other: Self) -> Self {
        CredSet(self.0 | other.0)
    }

    pub fn intersect(self, other: Self) -> Self {
        CredSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        CredSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn levels(self) -> impl Iterator<Item = SecurityLevel> {
        SecurityLevel::CREDENTIALS
            .into_iter()
            .filter(move |l| self.contains(*l))
    }
}

/// Tropical value: a natural number or infinity (the additive identity).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trop {
    Fin(u64),
    Inf,
}

impl fmt::Display for Trop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trop::Fin(n) => write!(f, "{n}"),
            Trop::Inf => write!(f, "inf"),
        }
    }
}

/// One annotation value, in the canonical form of its owning instance.
///
/// The variant used by each instance:
///
/// | variant      | instances                         |
/// |--------------|-----------------------------------|
/// | `Bool`       | bool                              |
/// | `Nat`        | nat, nat<=k, finite-table carriers|
/// | `Int`        | int                               |
/// | `Frac`       | rplus, fuzz, fuzz-grid, tvl       |
/// | `Trop`       | trop, trop<=k                     |
/// | `Sec`        | security                          |
/// | `Creds`      | sprime                            |
/// | `Poly`       | natpoly                           |
/// | `Monomials`  | boolpoly                          |
/// | `Clauses`    | posbool                           |
/// | `Rows`       | boolexpr                          |
/// | `Witnesses`  | why                               |
/// | `Trio`       | trio                              |
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Nat(BigUint),
    Int(BigInt),
    Frac(BigRational),
    Trop(Trop),
    Sec(SecurityLevel),
    Creds(CredSet),
    Poly(BTreeMap<Monomial, BigUint>),
    Monomials(BTreeSet<Monomial>),
    Clauses(BTreeSet<VarSet>),
    Rows(BTreeSet<u32>),
    Witnesses(BTreeSet<VarSet>),
    Trio(BTreeMap<VarSet, BigUint>),
}

impl Value {
    pub fn nat(n: u64) -> Value {
        Value::Nat(BigUint::from(n))
    }

    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }

    pub fn frac(num: i64, den: i64) -> Value {
        Value::Frac(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

/// Drop zero coefficients and zero exponents.
pub fn canonical_poly(raw: BTreeMap<Monomial, BigUint>) -> BTreeMap<Monomial, BigUint> {
    use num_traits::Zero;
    raw.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| (m.into_iter().filter(|(_, e)| *e > 0).collect(), c))
        .fold(BTreeMap::new(), |mut acc, (m, c)| {
            use num_traits::Zero as _;
            let entry = acc.entry(m).or_insert_with(BigUint::zero);
            *entry += c;
            acc
        })
}

pub fn canonical_monomials(raw: BTreeSet<Monomial>) -> BTreeSet<Monomial> {
    raw.into_iter()
        .map(|m| m.into_iter().filter(|(_, e)| *e > 0).collect())
        .collect()
}

/// Reduce a clause family to its minimal antichain under inclusion.
///
/// A clause that contains another clause is absorbed. An empty clause makes
/// the whole formula true, represented as the antichain `{{}}`.
pub fn canonical_clauses(raw: BTreeSet<VarSet>) -> BTreeSet<VarSet> {
    if raw.iter().any(|c| c.is_empty()) {
        return BTreeSet::from([VarSet::new()]);
    }
    let mut keep = BTreeSet::new();
    for c in &raw {
        if !raw.iter().any(|d| d != c && d.is_subset(c)) {
            keep.insert(c.clone());
        }
    }
    keep
}

/// Drop zero coefficients from a Trio bag.
pub fn canonical_trio(raw: BTreeMap<VarSet, BigUint>) -> BTreeMap<VarSet, BigUint> {
    use num_traits::Zero;
    raw.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// True iff the DNF given by `clauses` is satisfied by the valuation that
/// makes exactly the variables with bits set in `valuation` true.
///
/// Variable positions are taken from `vars`, which must list every variable
/// that may occur in a clause.
pub fn clauses_eval(clauses: &BTreeSet<VarSet>, vars: &[String], valuation: u32) -> bool {
    clauses.iter().any(|clause| {
        clause.iter().all(|v| {
            let i = vars.iter().position(|w| w == v).expect("unknown variable");
            valuation & (1 << i) != 0
        })
    })
}

/// The minimal antichain of a monotone boolean function given as a truth
/// table over `vars` (bit `i` of a row = variable `vars[i]`).
///
/// Clauses are the minimal satisfying valuations. The input must be monotone
/// (upward closed); the output is canonical.
pub fn clauses_from_monotone_table(vars: &[String], sat: &BTreeSet<u32>) -> BTreeSet<VarSet> {
    let mut clauses = BTreeSet::new();
    for &row in sat {
        let minimal = (0..vars.len() as u32)
            .all(|i| row & (1 << i) == 0 || !sat.contains(&(row & !(1 << i))));
        if minimal {
            let clause: VarSet = (0..vars.len())
                .filter(|i| row & (1 << i) != 0)
                .map(|i| vars[i].clone())
                .collect();
            clauses.insert(clause);
        }
    }
    canonical_clauses(clauses)
}

pub fn monomial_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (v, e) in b {
        *out.entry(v.clone()).or_insert(0) += e;
    }
    out
}

/// Total degree, used by the graded-lexicographic print order.
pub fn monomial_degree(m: &Monomial) -> u64 {
    m.values().map(|e| *e as u64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(names: &[&str]) -> VarSet {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn absorption_reduces_to_antichain() {
        // x | (x & y) | z  ->  x | z
        let raw = BTreeSet::from([vs(&["x"]), vs(&["x", "y"]), vs(&["z"])]);
        let canon = canonical_clauses(raw);
        assert_eq!(canon, BTreeSet::from([vs(&["x"]), vs(&["z"])]));
    }

    #[test]
    fn empty_clause_is_true() {
        let raw = BTreeSet::from([vs(&[]), vs(&["x"])]);
        assert_eq!(canonical_clauses(raw), BTreeSet::from([vs(&[])]));
    }

    #[test]
    fn poly_drops_zero_coefficients() {
        use num_traits::Zero;
        let mut raw = BTreeMap::new();
        raw.insert(Monomial::from([("x".to_string(), 1)]), BigUint::zero());
        raw.insert(Monomial::from([("y".to_string(), 2)]), BigUint::from(2u32));
        let canon = canonical_poly(raw);
        assert_eq!(canon.len(), 1);
        assert!(canon.contains_key(&Monomial::from([("y".to_string(), 2)])));
    }

    #[test]
    fn monotone_table_round_trip() {
        let vars = vec!["x".to_string(), "y".to_string()];
        // x | y: rows 01, 10, 11
        let sat = BTreeSet::from([0b01, 0b10, 0b11]);
        let clauses = clauses_from_monotone_table(&vars, &sat);
        assert_eq!(clauses, BTreeSet::from([vs(&["x"]), vs(&["y"])]));
        for row in 0..4u32 {
            assert_eq!(clauses_eval(&clauses, &vars, row), sat.contains(&row));
        }
    }

    #[test]
    fn credset_ops() {
        let s = CredSet::singleton(SecurityLevel::Secret);
        let t = CredSet::singleton(SecurityLevel::TopSecret);
        assert_eq!(s.union(t).levels().count(), 2);
        assert_eq!(s.union(t).difference(t), s);
        assert!(s.is_subset(CredSet::FULL));
        assert!(!CredSet::FULL.is_subset(s));
    }
}
