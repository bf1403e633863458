//! The law schemas A1..A13 and their relation-level twins I1..I13.
//!
//! Each law is stored once, as an equation over a tiny term language. The
//! same tree is evaluated three ways: over annotation values (axiom checks),
//! over index tables (finite-structure enumeration), and over whole
//! relations (identity checks in the lab, where `+` is union, `*` is natural
//! join, `0` the empty relation and `1` the zero-column unit relation). That
//! single source is what ties axiom An to identity In structurally.

use super::DiffSemantics;
use crate::instances::{Semiring, Value};

/// A term over at most three variables, the two constants, and the three
/// binary operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(u8),
    Zero,
    One,
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Diff(Box<Term>, Box<Term>),
}

impl Term {
    pub fn uses_diff(&self) -> bool {
        match self {
            Term::Var(_) | Term::Zero | Term::One => false,
            Term::Add(l, r) | Term::Mul(l, r) => l.uses_diff() || r.uses_diff(),
            Term::Diff(_, _) => true,
        }
    }
}

fn v(i: u8) -> Term {
    Term::Var(i)
}
fn add(l: Term, r: Term) -> Term {
    Term::Add(Box::new(l), Box::new(r))
}
fn mul(l: Term, r: Term) -> Term {
    Term::Mul(Box::new(l), Box::new(r))
}
fn diff(l: Term, r: Term) -> Term {
    Term::Diff(Box::new(l), Box::new(r))
}

/// One law: `lhs = rhs` universally quantified over `arity` variables.
#[derive(Clone, Debug)]
pub struct Equation {
    pub arity: u8,
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn uses_diff(&self) -> bool {
        self.lhs.uses_diff() || self.rhs.uses_diff()
    }
}

/// The thirteen semiring laws.
///
/// A1..A8 axiomatize commutative semirings (associativity, identities,
/// commutativity, distributivity, annihilation). A9..A12 characterize the
/// monus, and A13 is distributivity of multiplication over difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    A13,
}

impl AxiomId {
    pub const ALL: [AxiomId; 13] = [
        AxiomId::A1,
        AxiomId::A2,
        AxiomId::A3,
        AxiomId::A4,
        AxiomId::A5,
        AxiomId::A6,
        AxiomId::A7,
        AxiomId::A8,
        AxiomId::A9,
        AxiomId::A10,
        AxiomId::A11,
        AxiomId::A12,
        AxiomId::A13,
    ];

    /// A1..A8, the positive-semiring laws.
    pub const POSITIVE: [AxiomId; 8] = [
        AxiomId::A1,
        AxiomId::A2,
        AxiomId::A3,
        AxiomId::A4,
        AxiomId::A5,
        AxiomId::A6,
        AxiomId::A7,
        AxiomId::A8,
    ];

    /// A9..A12, the laws that pin down the monus.
    pub const MONUS: [AxiomId; 4] = [AxiomId::A9, AxiomId::A10, AxiomId::A11, AxiomId::A12];

    pub fn label(self) -> &'static str {
        match self {
            AxiomId::A1 => "A1",
            AxiomId::A2 => "A2",
            AxiomId::A3 => "A3",
            AxiomId::A4 => "A4",
            AxiomId::A5 => "A5",
            AxiomId::A6 => "A6",
            AxiomId::A7 => "A7",
            AxiomId::A8 => "A8",
            AxiomId::A9 => "A9",
            AxiomId::A10 => "A10",
            AxiomId::A11 => "A11",
            AxiomId::A12 => "A12",
            AxiomId::A13 => "A13",
        }
    }

    pub fn from_label(s: &str) -> Option<AxiomId> {
        Self::ALL.iter().copied().find(|a| a.label() == s)
    }

    pub fn uses_diff(self) -> bool {
        self >= AxiomId::A9
    }

    pub fn equation(self) -> Equation {
        match self {
            // a + (b + c) = (a + b) + c
            AxiomId::A1 => Equation {
                arity: 3,
                lhs: add(v(0), add(v(1), v(2))),
                rhs: add(add(v(0), v(1)), v(2)),
            },
            // a + 0 = a
            AxiomId::A2 => Equation {
                arity: 1,
                lhs: add(v(0), Term::Zero),
                rhs: v(0),
            },
            // a + b = b + a
            AxiomId::A3 => Equation {
                arity: 2,
                lhs: add(v(0), v(1)),
                rhs: add(v(1), v(0)),
            },
            // a * (b * c) = (a * b) * c
            AxiomId::A4 => Equation {
                arity: 3,
                lhs: mul(v(0), mul(v(1), v(2))),
                rhs: mul(mul(v(0), v(1)), v(2)),
            },
            // a * 1 = a
            AxiomId::A5 => Equation {
                arity: 1,
                lhs: mul(v(0), Term::One),
                rhs: v(0),
            },
            // a * b = b * a
            AxiomId::A6 => Equation {
                arity: 2,
                lhs: mul(v(0), v(1)),
                rhs: mul(v(1), v(0)),
            },
            // a * (b + c) = a * b + a * c
            AxiomId::A7 => Equation {
                arity: 3,
                lhs: mul(v(0), add(v(1), v(2))),
                rhs: add(mul(v(0), v(1)), mul(v(0), v(2))),
            },
            // a * 0 = 0
            AxiomId::A8 => Equation {
                arity: 1,
                lhs: mul(v(0), Term::Zero),
                rhs: Term::Zero,
            },
            // a - a = 0
            AxiomId::A9 => Equation {
                arity: 1,
                lhs: diff(v(0), v(0)),
                rhs: Term::Zero,
            },
            // 0 - a = 0
            AxiomId::A10 => Equation {
                arity: 1,
                lhs: diff(Term::Zero, v(0)),
                rhs: Term::Zero,
            },
            // a + (b - a) = b + (a - b)
            AxiomId::A11 => Equation {
                arity: 2,
                lhs: add(v(0), diff(v(1), v(0))),
                rhs: add(v(1), diff(v(0), v(1))),
            },
            // a - (b + c) = (a - b) - c
            AxiomId::A12 => Equation {
                arity: 3,
                lhs: diff(v(0), add(v(1), v(2))),
                rhs: diff(diff(v(0), v(1)), v(2)),
            },
            // a * (b - c) = a * b - a * c
            AxiomId::A13 => Equation {
                arity: 3,
                lhs: mul(v(0), diff(v(1), v(2))),
                rhs: diff(mul(v(0), v(1)), mul(v(0), v(2))),
            },
        }
    }
}

impl std::fmt::Display for AxiomId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Relation-level identities. I1..I13 are the relational readings of
/// A1..A13; EXT1 and EXT2 are the extra selection/projection laws
/// (`select(P, R - S) = select(P, R) - select(P, S)` and
/// `project(V, R u S) = project(V, R) u project(V, S)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityId {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
    I8,
    I9,
    I10,
    I11,
    I12,
    I13,
    Ext1,
    Ext2,
}

impl IdentityId {
    pub const ALL: [IdentityId; 15] = [
        IdentityId::I1,
        IdentityId::I2,
        IdentityId::I3,
        IdentityId::I4,
        IdentityId::I5,
        IdentityId::I6,
        IdentityId::I7,
        IdentityId::I8,
        IdentityId::I9,
        IdentityId::I10,
        IdentityId::I11,
        IdentityId::I12,
        IdentityId::I13,
        IdentityId::Ext1,
        IdentityId::Ext2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            IdentityId::I1 => "I1",
            IdentityId::I2 => "I2",
            IdentityId::I3 => "I3",
            IdentityId::I4 => "I4",
            IdentityId::I5 => "I5",
            IdentityId::I6 => "I6",
            IdentityId::I7 => "I7",
            IdentityId::I8 => "I8",
            IdentityId::I9 => "I9",
            IdentityId::I10 => "I10",
            IdentityId::I11 => "I11",
            IdentityId::I12 => "I12",
            IdentityId::I13 => "I13",
            IdentityId::Ext1 => "EXT1",
            IdentityId::Ext2 => "EXT2",
        }
    }

    pub fn from_label(s: &str) -> Option<IdentityId> {
        Self::ALL.iter().copied().find(|i| i.label() == s)
    }

    /// The axiom this identity is the relational reading of. The two extra
    /// identities have no single paired axiom.
    pub fn paired_axiom(self) -> Option<AxiomId> {
        match self {
            IdentityId::Ext1 | IdentityId::Ext2 => None,
            other => {
                let idx = IdentityId::ALL.iter().position(|i| *i == other).unwrap();
                Some(AxiomId::ALL[idx])
            }
        }
    }

    pub fn uses_diff(self) -> bool {
        self.paired_axiom().map_or(self == IdentityId::Ext1, |a| a.uses_diff())
    }
}

impl std::fmt::Display for IdentityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Evaluate a term over annotation values.
///
/// Difference support must be checked up front (`Equation::uses_diff`
/// against the instance); an unsupported difference panics here.
pub fn eval_term(term: &Term, sr: &Semiring, sem: DiffSemantics, env: &[Value]) -> Value {
    match term {
        Term::Var(i) => env[*i as usize].clone(),
        Term::Zero => sr.zero(),
        Term::One => sr.one(),
        Term::Add(l, r) => sr.add(&eval_term(l, sr, sem, env), &eval_term(r, sr, sem, env)),
        Term::Mul(l, r) => sr.mul(&eval_term(l, sr, sem, env), &eval_term(r, sr, sem, env)),
        Term::Diff(l, r) => {
            let a = eval_term(l, sr, sem, env);
            let b = eval_term(r, sr, sem, env);
            super::scalar_diff(sr, sem, &a, &b)
                .expect("difference support must be checked before evaluation")
        }
    }
}

/// Evaluate a term over index tables (used by the finite-structure
/// enumeration). `diff` may be absent only for terms that do not use it.
pub fn eval_term_idx(
    term: &Term,
    n: usize,
    add_tab: &[usize],
    mul_tab: &[usize],
    diff_tab: Option<&[usize]>,
    env: &[usize],
) -> usize {
    match term {
        Term::Var(i) => env[*i as usize],
        Term::Zero => 0,
        Term::One => 1,
        Term::Add(l, r) => {
            let a = eval_term_idx(l, n, add_tab, mul_tab, diff_tab, env);
            let b = eval_term_idx(r, n, add_tab, mul_tab, diff_tab, env);
            add_tab[a * n + b]
        }
        Term::Mul(l, r) => {
            let a = eval_term_idx(l, n, add_tab, mul_tab, diff_tab, env);
            let b = eval_term_idx(r, n, add_tab, mul_tab, diff_tab, env);
            mul_tab[a * n + b]
        }
        Term::Diff(l, r) => {
            let a = eval_term_idx(l, n, add_tab, mul_tab, diff_tab, env);
            let b = eval_term_idx(r, n, add_tab, mul_tab, diff_tab, env);
            diff_tab.expect("difference table required")[a * n + b]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arities_match_the_schema_shapes() {
        use AxiomId::*;
        for ax in AxiomId::ALL {
            let eq = ax.equation();
            let expected = match ax {
                A1 | A4 | A7 | A12 | A13 => 3,
                A3 | A6 | A11 => 2,
                A2 | A5 | A8 | A9 | A10 => 1,
            };
            assert_eq!(eq.arity, expected, "{ax}");
            assert_eq!(eq.uses_diff(), ax.uses_diff(), "{ax}");
        }
    }

    #[test]
    fn identity_axiom_pairing_is_positional() {
        assert_eq!(IdentityId::I1.paired_axiom(), Some(AxiomId::A1));
        assert_eq!(IdentityId::I13.paired_axiom(), Some(AxiomId::A13));
        assert_eq!(IdentityId::Ext1.paired_axiom(), None);
        for (i, id) in IdentityId::ALL[..13].iter().enumerate() {
            assert_eq!(id.paired_axiom(), Some(AxiomId::ALL[i]));
        }
    }
}
