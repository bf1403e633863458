//! Generic machinery over annotation semirings: the natural order, monus
//! derivation, and law checking.
//!
//! Everything here works against any [`Semiring`], finite or countable.
//! Exhaustive checks scan the whole carrier in its canonical order and
//! report the lexicographically first witness; sampled checks evaluate a
//! fixed number of seeded trials, where trial `i` draws from the substream
//! `(seed, i)` so the verdict is independent of thread scheduling.

pub mod equation;

use std::sync::Arc;

use thiserror::Error;

use crate::instances::{Semiring, Value};
use crate::krel::KRelation;
use crate::par;
use crate::rng::Rng;

pub use equation::{eval_term, eval_term_idx, AxiomId, Equation, IdentityId, Term};

/// How the relational `-` (and the scalar `-` behind it) is interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffSemantics {
    /// The instance's monus: the least `c` with `a <= b + c`.
    Monus,
    /// True ring subtraction `a + (-b)`; requires negation.
    RingSubtract,
    /// Keep `a` when `b` is zero, else zero; the subtrahend acts as a
    /// boolean condition.
    Conditioned,
}

impl DiffSemantics {
    pub fn label(self) -> &'static str {
        match self {
            DiffSemantics::Monus => "monus",
            DiffSemantics::RingSubtract => "ring",
            DiffSemantics::Conditioned => "cond",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "monus" => Some(DiffSemantics::Monus),
            "ring" => Some(DiffSemantics::RingSubtract),
            "cond" => Some(DiffSemantics::Conditioned),
            _ => None,
        }
    }

    /// Whether `sr` supports this difference.
    pub fn supported_by(self, sr: &Semiring) -> bool {
        match self {
            DiffSemantics::Monus => sr.has_monus(),
            DiffSemantics::RingSubtract => sr.has_negate(),
            DiffSemantics::Conditioned => true,
        }
    }
}

/// Scalar difference under the chosen semantics.
pub fn scalar_diff(
    sr: &Semiring,
    sem: DiffSemantics,
    a: &Value,
    b: &Value,
) -> Result<Value, Inapplicable> {
    match sem {
        DiffSemantics::Monus => sr.monus(a, b).ok_or_else(|| {
            Inapplicable(format!("instance {} has no monus", sr.name()))
        }),
        DiffSemantics::RingSubtract => {
            let neg = sr.negate(b).ok_or_else(|| {
                Inapplicable(format!("instance {} has no negation", sr.name()))
            })?;
            Ok(sr.add(a, &neg))
        }
        DiffSemantics::Conditioned => Ok(if sr.is_zero(b) { a.clone() } else { sr.zero() }),
    }
}

/// A check that cannot run on this instance (missing operation, infinite
/// carrier for an exhaustive scan, undecidable order).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct Inapplicable(pub String);

/// How to quantify over the carrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStrategy {
    /// Every assignment from a finite carrier, in carrier order.
    Exhaustive,
    /// `trials` seeded assignments; `size` scales sampled magnitudes.
    Sampled { trials: u32, seed: u64, size: u32 },
}

impl CheckStrategy {
    pub fn sampled(trials: u32, seed: u64) -> Self {
        CheckStrategy::Sampled {
            trials,
            seed,
            size: 32,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CheckStrategy::Exhaustive => "exhaustive".to_string(),
            CheckStrategy::Sampled { trials, seed, size } => {
                format!("sampled(trials={trials},seed={seed:#x},size={size})")
            }
        }
    }
}

/// A failing assignment together with both evaluated sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarWitness {
    pub env: Vec<Value>,
    pub lhs: Value,
    pub rhs: Value,
}

/// A failing database together with both evaluated sides.
#[derive(Clone, Debug)]
pub struct RelationalWitness {
    pub db: Vec<KRelation>,
    pub lhs: KRelation,
    pub rhs: KRelation,
}

#[derive(Clone, Debug)]
pub enum Witness {
    Scalar(ScalarWitness),
    Relational(RelationalWitness),
}

/// Verdict of one check. Sampled verdicts are evidence, not proof, and are
/// labeled as such.
#[derive(Clone, Debug)]
pub enum Verdict {
    HoldsExhaustive,
    HoldsSampled { trials: u32 },
    Fails { witness: Witness },
    Inapplicable { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::HoldsExhaustive | Verdict::HoldsSampled { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn scalar_witness(&self) -> Option<&ScalarWitness> {
        match self {
            Verdict::Fails {
                witness: Witness::Scalar(w),
            } => Some(w),
            _ => None,
        }
    }

    pub fn relational_witness(&self) -> Option<&RelationalWitness> {
        match self {
            Verdict::Fails {
                witness: Witness::Relational(w),
            } => Some(w),
            _ => None,
        }
    }
}

/// What a report is about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subject {
    Axiom(AxiomId),
    Identity(IdentityId),
    Galois,
}

impl Subject {
    pub fn label(&self) -> String {
        match self {
            Subject::Axiom(a) => a.label().to_string(),
            Subject::Identity(i) => i.label().to_string(),
            Subject::Galois => "galois".to_string(),
        }
    }
}

/// Outcome of one check on one instance.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub subject: Subject,
    pub instance: Arc<Semiring>,
    pub semantics: DiffSemantics,
    pub strategy: CheckStrategy,
    pub verdict: Verdict,
}

/// Decide `a <= b` in the natural order (`exists c, a + c = b`).
///
/// Finite carriers search exhaustively; countable ones use the instance's
/// registered closed form. `None` means the order is undecidable here and
/// callers should report the check inapplicable rather than guess.
pub fn natural_leq(sr: &Semiring, a: &Value, b: &Value) -> Option<bool> {
    if let Some(elems) = sr.elements() {
        return Some(elems.iter().any(|c| sr.add(a, c) == *b));
    }
    sr.closed_leq(a, b)
}

/// Whether the natural order is antisymmetric on a finite carrier.
///
/// Reflexivity and transitivity hold in any commutative monoid, so
/// antisymmetry is the only condition checked. Countable carriers are not
/// decided here.
pub fn is_naturally_ordered(sr: &Semiring) -> Option<bool> {
    let elems = sr.elements()?;
    for a in elems {
        for b in elems {
            if a != b
                && natural_leq(sr, a, b).unwrap()
                && natural_leq(sr, b, a).unwrap()
            {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// The monus table derived from first principles on a finite carrier.
#[derive(Clone, Debug)]
pub struct DerivedMonus {
    pub elems: Vec<Value>,
    /// Row-major: `table[i * n + j] = elems[i] - elems[j]`.
    pub table: Vec<Value>,
}

impl DerivedMonus {
    pub fn lookup(&self, a: &Value, b: &Value) -> &Value {
        let n = self.elems.len();
        let i = self.elems.iter().position(|e| e == a).expect("not in carrier");
        let j = self.elems.iter().position(|e| e == b).expect("not in carrier");
        &self.table[i * n + j]
    }
}

#[derive(Debug, Error)]
pub enum DeriveError {
    #[error("monus derivation requires a finite carrier")]
    NotFinite,
    #[error("the natural order is not antisymmetric, no monus exists")]
    NotNaturallyOrdered,
    /// Some pair has minimal solutions but no unique least one; a set of
    /// mutually incomparable minimal candidates is not a monus.
    #[error("no least solution for the pair ({a:?}, {b:?}); minimal candidates: {minimals:?}")]
    NoLeast {
        a: Value,
        b: Value,
        minimals: Vec<Value>,
    },
}

/// Derive the monus on a finite, naturally ordered carrier: for each pair
/// `(a, b)` the unique least `c` with `a <= b + c`. A pair whose solution
/// set has no least element makes the derivation fail; the error carries the
/// incomparable minimal candidates rather than picking one arbitrarily.
#[allow(clippy::result_large_err)]
pub fn derive_monus(sr: &Semiring) -> Result<DerivedMonus, DeriveError> {
    let elems = sr.elements().ok_or(DeriveError::NotFinite)?;
    if is_naturally_ordered(sr) != Some(true) {
        return Err(DeriveError::NotNaturallyOrdered);
    }
    let n = elems.len();
    let leq = |x: &Value, y: &Value| natural_leq(sr, x, y).unwrap();
    let mut table = Vec::with_capacity(n * n);
    for a in elems {
        for b in elems {
            let sols: Vec<&Value> = elems
                .iter()
                .filter(|c| leq(a, &sr.add(b, c)))
                .collect();
            let least = sols
                .iter()
                .find(|m| sols.iter().all(|c| leq(m, c)))
                .copied();
            match least {
                Some(m) => table.push(m.clone()),
                None => {
                    let minimals: Vec<Value> = sols
                        .iter()
                        .filter(|m| !sols.iter().any(|c| *c != **m && leq(c, m)))
                        .map(|m| (*m).clone())
                        .collect();
                    return Err(DeriveError::NoLeast {
                        a: a.clone(),
                        b: b.clone(),
                        minimals,
                    });
                }
            }
        }
    }
    Ok(DerivedMonus {
        elems: elems.to_vec(),
        table,
    })
}

/// Check one law under the instance's monus.
pub fn check_axiom(sr: &Arc<Semiring>, ax: AxiomId, strat: CheckStrategy) -> CheckReport {
    check_axiom_with(sr, ax, DiffSemantics::Monus, strat)
}

/// Check one law with an explicit difference semantics.
pub fn check_axiom_with(
    sr: &Arc<Semiring>,
    ax: AxiomId,
    sem: DiffSemantics,
    strat: CheckStrategy,
) -> CheckReport {
    let verdict = equation_verdict(sr, &ax.equation(), sem, strat);
    CheckReport {
        subject: Subject::Axiom(ax),
        instance: sr.clone(),
        semantics: sem,
        strategy: strat,
        verdict,
    }
}

/// Evaluate an equation under a strategy. Shared by the public axiom checks
/// and the registration gate.
pub(crate) fn equation_verdict(
    sr: &Semiring,
    eq: &Equation,
    sem: DiffSemantics,
    strat: CheckStrategy,
) -> Verdict {
    if eq.uses_diff() && !sem.supported_by(sr) {
        return Verdict::Inapplicable {
            reason: format!(
                "difference semantics `{}` is unsupported by {}",
                sem.label(),
                sr.name()
            ),
        };
    }
    let arity = eq.arity as usize;
    match strat {
        CheckStrategy::Exhaustive => {
            let Some(elems) = sr.elements() else {
                return Verdict::Inapplicable {
                    reason: "exhaustive checking requires a finite carrier".to_string(),
                };
            };
            let n = elems.len() as u64;
            let total = n.pow(arity as u32);
            let failure = par::find_map_first(total, |idx| {
                let mut env = Vec::with_capacity(arity);
                let mut rest = idx;
                for k in (0..arity).rev() {
                    let digit = rest / n.pow(k as u32);
                    rest %= n.pow(k as u32);
                    env.push(elems[digit as usize].clone());
                }
                evaluate_failure(sr, eq, sem, env)
            });
            match failure {
                Some(w) => Verdict::Fails {
                    witness: Witness::Scalar(w),
                },
                None => Verdict::HoldsExhaustive,
            }
        }
        CheckStrategy::Sampled { trials, seed, size } => {
            let failure = par::find_map_first(trials as u64, |i| {
                let mut rng = Rng::substream(seed, i);
                let env: Vec<Value> = (0..arity).map(|_| sr.sample(&mut rng, size)).collect();
                evaluate_failure(sr, eq, sem, env)
            });
            match failure {
                Some(w) => Verdict::Fails {
                    witness: Witness::Scalar(w),
                },
                None => Verdict::HoldsSampled { trials },
            }
        }
    }
}

fn evaluate_failure(
    sr: &Semiring,
    eq: &Equation,
    sem: DiffSemantics,
    env: Vec<Value>,
) -> Option<ScalarWitness> {
    let lhs = eval_term(&eq.lhs, sr, sem, &env);
    let rhs = eval_term(&eq.rhs, sr, sem, &env);
    if lhs == rhs {
        None
    } else {
        Some(ScalarWitness { env, lhs, rhs })
    }
}

/// Check the Galois property of the monus: `a - b <= c` iff `a <= b + c`,
/// over all triples or a seeded sample.
pub fn check_galois(sr: &Arc<Semiring>, strat: CheckStrategy) -> CheckReport {
    let mk = |verdict| CheckReport {
        subject: Subject::Galois,
        instance: sr.clone(),
        semantics: DiffSemantics::Monus,
        strategy: strat,
        verdict,
    };
    if !sr.has_monus() {
        return mk(Verdict::Inapplicable {
            reason: format!("instance {} has no monus", sr.name()),
        });
    }
    if !sr.order_decidable() {
        return mk(Verdict::Inapplicable {
            reason: format!("natural order is undecidable for {}", sr.name()),
        });
    }
    let galois_failure = |env: Vec<Value>| -> Option<ScalarWitness> {
        let (a, b, c) = (&env[0], &env[1], &env[2]);
        let m = sr.monus(a, b).expect("monus checked above");
        let lhs = natural_leq(sr, &m, c).expect("order checked above");
        let rhs = natural_leq(sr, a, &sr.add(b, c)).expect("order checked above");
        if lhs == rhs {
            None
        } else {
            Some(ScalarWitness {
                env,
                lhs: Value::Bool(lhs),
                rhs: Value::Bool(rhs),
            })
        }
    };
    let failure = match strat {
        CheckStrategy::Exhaustive => {
            let Some(elems) = sr.elements() else {
                return mk(Verdict::Inapplicable {
                    reason: "exhaustive checking requires a finite carrier".to_string(),
                });
            };
            let n = elems.len() as u64;
            par::find_map_first(n * n * n, |idx| {
                let env = vec![
                    elems[(idx / (n * n)) as usize].clone(),
                    elems[(idx / n % n) as usize].clone(),
                    elems[(idx % n) as usize].clone(),
                ];
                galois_failure(env)
            })
        }
        CheckStrategy::Sampled { trials, seed, size } => {
            par::find_map_first(trials as u64, |i| {
                let mut rng = Rng::substream(seed, i);
                let env: Vec<Value> = (0..3).map(|_| sr.sample(&mut rng, size)).collect();
                galois_failure(env)
            })
        }
    };
    mk(match failure {
        Some(w) => Verdict::Fails {
            witness: Witness::Scalar(w),
        },
        None => match strat {
            CheckStrategy::Exhaustive => Verdict::HoldsExhaustive,
            CheckStrategy::Sampled { trials, .. } => Verdict::HoldsSampled { trials },
        },
    })
}

/// Result of enumerating every binary operation table on a small carrier
/// and testing it against A9..A12.
#[derive(Clone, Debug)]
pub struct MonusUniquenessReport {
    pub instance: String,
    pub order: usize,
    /// Number of candidate tables examined.
    pub candidates: u64,
    /// Tables satisfying A9..A12, as row-major index tables.
    pub passing: Vec<Vec<usize>>,
    /// The monus derived from the natural order, as an index table.
    pub derived: Vec<usize>,
    /// True iff exactly one table passes and it is the derived monus.
    pub unique_and_derived: bool,
}

/// Enumerate all binary operations on the carrier and verify that exactly
/// the derived monus satisfies A9..A12.
///
/// The table space is `n^(n^2)`, so the full scan is restricted to order at
/// most 3. Order 4 runs behind `allow_order4`, where the scan fixes the
/// cells forced directly by A9 (`a - a = 0`) and A10 (`0 - a = 0`) and
/// enumerates the remaining nine cells; tables violating those two laws
/// cannot pass, so the passing set is unchanged.
pub fn check_monus_uniqueness(
    sr: &Semiring,
    allow_order4: bool,
) -> Result<MonusUniquenessReport, Inapplicable> {
    let elems = sr
        .elements()
        .ok_or_else(|| Inapplicable("uniqueness scan requires a finite carrier".into()))?;
    let n = elems.len();
    if n > 4 || (n == 4 && !allow_order4) {
        return Err(Inapplicable(format!(
            "carrier order {n} exceeds the uniqueness scan bound"
        )));
    }
    let derived = derive_monus(sr).map_err(|e| Inapplicable(e.to_string()))?;
    let index_of = |v: &Value| elems.iter().position(|e| e == v).unwrap();
    let derived_idx: Vec<usize> = derived.table.iter().map(index_of).collect();
    let add_idx: Vec<usize> = elems
        .iter()
        .flat_map(|a| elems.iter().map(move |b| (a, b)))
        .map(|(a, b)| index_of(&sr.add(a, b)))
        .collect();
    let mul_idx: Vec<usize> = elems
        .iter()
        .flat_map(|a| elems.iter().map(move |b| (a, b)))
        .map(|(a, b)| index_of(&sr.mul(a, b)))
        .collect();

    // Cells enumerated: all n^2 for n <= 3; for n = 4 only those not forced
    // by A9/A10.
    let free_cells: Vec<usize> = if n <= 3 {
        (0..n * n).collect()
    } else {
        (0..n * n)
            .filter(|idx| {
                let (i, j) = (idx / n, idx % n);
                i != j && i != 0
            })
            .collect()
    };
    let total = (n as u64).pow(free_cells.len() as u32);
    let found = par::map_collect(total, |code| {
        let mut table = vec![0usize; n * n];
        let mut rest = code;
        for &cell in &free_cells {
            table[cell] = (rest % n as u64) as usize;
            rest /= n as u64;
        }
        if monus_axioms_hold(n, &add_idx, &mul_idx, &table) {
            Some(table)
        } else {
            None
        }
    });
    let passing: Vec<Vec<usize>> = found.into_iter().flatten().collect();
    let unique_and_derived = passing.len() == 1 && passing[0] == derived_idx;
    Ok(MonusUniquenessReport {
        instance: sr.name().to_string(),
        order: n,
        candidates: total,
        passing,
        derived: derived_idx,
        unique_and_derived,
    })
}

/// A9..A12 over index tables, via the shared law schemas.
pub fn monus_axioms_hold(n: usize, add: &[usize], mul: &[usize], diff: &[usize]) -> bool {
    AxiomId::MONUS.iter().all(|ax| {
        let eq = ax.equation();
        let arity = eq.arity as usize;
        let total = (n as u64).pow(arity as u32);
        (0..total).all(|idx| {
            let mut env = [0usize; 3];
            let mut rest = idx;
            for slot in env.iter_mut().take(arity).rev() {
                *slot = (rest % n as u64) as usize;
                rest /= n as u64;
            }
            let l = eval_term_idx(&eq.lhs, n, add, mul, Some(diff), &env[..arity]);
            let r = eval_term_idx(&eq.rhs, n, add, mul, Some(diff), &env[..arity]);
            l == r
        })
    })
}

/// Why an instance was rejected at registration.
#[derive(Debug, Error)]
pub enum GateFailure {
    #[error("{instance}: {axiom} fails at {witness}")]
    Axiom {
        instance: String,
        axiom: AxiomId,
        witness: String,
    },
    #[error("{instance}: monus violates the Galois property at {witness}")]
    Galois { instance: String, witness: String },
    #[error("{instance}: monus({a}, {b}) = {m} does not satisfy a <= b + m")]
    MonusNotSolution {
        instance: String,
        a: String,
        b: String,
        m: String,
    },
    #[error(
        "{instance}: closed-form monus({a}, {b}) = {closed} but the derived table gives {derived}"
    )]
    MonusMismatch {
        instance: String,
        a: String,
        b: String,
        closed: String,
        derived: String,
    },
    #[error("{instance}: finite carrier with monus is not naturally ordered")]
    NotNaturallyOrdered { instance: String },
    #[error("{instance}: {reason}")]
    Other { instance: String, reason: String },
}

const GATE_TRIALS: u32 = 1000;

/// The registration gate.
///
/// A1..A8 must hold (exhaustively on finite carriers, on 1000 seeded samples
/// otherwise). A registered monus must satisfy the Galois property and
/// produce solutions of `a <= b + c`; on small finite carriers it must agree
/// everywhere with the monus derived from the natural order.
pub fn registration_gate(sr: &Semiring, seed: u64) -> Result<(), GateFailure> {
    let strat = if sr.is_finite() {
        CheckStrategy::Exhaustive
    } else {
        CheckStrategy::sampled(GATE_TRIALS, seed)
    };
    let print_env = |env: &[Value]| {
        env.iter()
            .map(|v| sr.print(v))
            .collect::<Vec<_>>()
            .join(", ")
    };
    for ax in AxiomId::POSITIVE {
        let verdict = equation_verdict(sr, &ax.equation(), DiffSemantics::Monus, strat);
        if let Some(w) = verdict.scalar_witness() {
            return Err(GateFailure::Axiom {
                instance: sr.name().to_string(),
                axiom: ax,
                witness: format!(
                    "({}): {} vs {}",
                    print_env(&w.env),
                    sr.print(&w.lhs),
                    sr.print(&w.rhs)
                ),
            });
        }
        if let Verdict::Inapplicable { reason } = &verdict {
            return Err(GateFailure::Other {
                instance: sr.name().to_string(),
                reason: reason.clone(),
            });
        }
    }
    if sr.has_monus() && sr.order_decidable() {
        let galois = galois_verdict_plain(sr, strat, seed);
        if let Some(w) = galois.scalar_witness() {
            return Err(GateFailure::Galois {
                instance: sr.name().to_string(),
                witness: format!("({})", print_env(&w.env)),
            });
        }
        // Every monus value must itself solve a <= b + c.
        let pairs: Vec<(Value, Value)> = match sr.elements() {
            Some(elems) if elems.len() <= 32 => elems
                .iter()
                .flat_map(|a| elems.iter().map(move |b| (a.clone(), b.clone())))
                .collect(),
            _ => (0..GATE_TRIALS as u64)
                .map(|i| {
                    let mut rng = Rng::substream(seed ^ 0x50f7, i);
                    (sr.sample(&mut rng, 32), sr.sample(&mut rng, 32))
                })
                .collect(),
        };
        for (a, b) in pairs {
            let m = sr.monus(&a, &b).expect("monus present");
            if natural_leq(sr, &a, &sr.add(&b, &m)) != Some(true) {
                return Err(GateFailure::MonusNotSolution {
                    instance: sr.name().to_string(),
                    a: sr.print(&a),
                    b: sr.print(&b),
                    m: sr.print(&m),
                });
            }
        }
    }
    if sr.has_monus() {
        if let Some(elems) = sr.elements() {
            if elems.len() <= 16 {
                if is_naturally_ordered(sr) != Some(true) {
                    return Err(GateFailure::NotNaturallyOrdered {
                        instance: sr.name().to_string(),
                    });
                }
                let derived = derive_monus(sr).map_err(|e| GateFailure::Other {
                    instance: sr.name().to_string(),
                    reason: e.to_string(),
                })?;
                for a in elems {
                    for b in elems {
                        let closed = sr.monus(a, b).expect("monus present");
                        let tabled = derived.lookup(a, b);
                        if closed != *tabled {
                            return Err(GateFailure::MonusMismatch {
                                instance: sr.name().to_string(),
                                a: sr.print(a),
                                b: sr.print(b),
                                closed: sr.print(&closed),
                                derived: sr.print(tabled),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}


/// Galois check without the `Arc` wrapper, for use inside the gate.
fn galois_verdict_plain(sr: &Semiring, strat: CheckStrategy, seed: u64) -> Verdict {
    let galois_failure = |env: Vec<Value>| -> Option<ScalarWitness> {
        let (a, b, c) = (&env[0], &env[1], &env[2]);
        let m = sr.monus(a, b).expect("monus present");
        let lhs = natural_leq(sr, &m, c).expect("order decidable");
        let rhs = natural_leq(sr, a, &sr.add(b, c)).expect("order decidable");
        if lhs == rhs {
            None
        } else {
            Some(ScalarWitness {
                env,
                lhs: Value::Bool(lhs),
                rhs: Value::Bool(rhs),
            })
        }
    };
    let failure = match (strat, sr.elements()) {
        (CheckStrategy::Exhaustive, Some(elems)) => {
            let n = elems.len() as u64;
            par::find_map_first(n * n * n, |idx| {
                let env = vec![
                    elems[(idx / (n * n)) as usize].clone(),
                    elems[(idx / n % n) as usize].clone(),
                    elems[(idx % n) as usize].clone(),
                ];
                galois_failure(env)
            })
        }
        _ => par::find_map_first(GATE_TRIALS as u64, |i| {
            let mut rng = Rng::substream(seed ^ 0x6a10, i);
            let env: Vec<Value> = (0..3).map(|_| sr.sample(&mut rng, 32)).collect();
            galois_failure(env)
        }),
    };
    match failure {
        Some(w) => Verdict::Fails {
            witness: Witness::Scalar(w),
        },
        None => Verdict::HoldsExhaustive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{from_tables, make_instance, Params, SecurityLevel, TableStructure, Trop};
    use crate::DEFAULT_SEED;

    fn security() -> Arc<Semiring> {
        make_instance("security", Params::default()).unwrap()
    }

    /// The two-element group with xor as addition and conjunction as
    /// multiplication: a semiring whose natural order is not antisymmetric.
    fn xor_and() -> Arc<Semiring> {
        from_tables(
            "xor-and",
            TableStructure {
                order: 2,
                add: vec![0, 1, 1, 0],
                mul: vec![0, 0, 0, 1],
                monus: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn natural_leq_examples() {
        let nat = make_instance("nat", Params::default()).unwrap();
        assert_eq!(natural_leq(&nat, &Value::nat(2), &Value::nat(5)), Some(true));
        assert_eq!(natural_leq(&nat, &Value::nat(5), &Value::nat(2)), Some(false));

        // on the security chain, addition is min, so T <= C naturally
        use SecurityLevel::*;
        let sec = security();
        assert_eq!(
            natural_leq(&sec, &Value::Sec(TopSecret), &Value::Sec(Confidential)),
            Some(true)
        );
        assert_eq!(
            natural_leq(&sec, &Value::Sec(Confidential), &Value::Sec(TopSecret)),
            Some(false)
        );

        // reflexivity across instances (zero witnesses a <= a)
        for name in ["bool", "nat", "security", "sprime", "trop"] {
            let sr = make_instance(name, Params::default()).unwrap();
            let mut rng = Rng::new(3);
            for _ in 0..50 {
                let a = sr.sample(&mut rng, 8);
                assert_eq!(natural_leq(&sr, &a, &a), Some(true), "{name}");
            }
        }
    }

    #[test]
    fn natural_order_is_a_preorder_on_samples() {
        for name in ["nat", "rplus", "trop", "fuzz", "security", "sprime", "posbool"] {
            let params = if name == "posbool" {
                Params::with_vars(&["x", "y"])
            } else {
                Params::default()
            };
            let sr = make_instance(name, params).unwrap();
            let mut rng = Rng::new(11);
            for _ in 0..200 {
                let (a, b, c) = (
                    sr.sample(&mut rng, 8),
                    sr.sample(&mut rng, 8),
                    sr.sample(&mut rng, 8),
                );
                if natural_leq(&sr, &a, &b) == Some(true)
                    && natural_leq(&sr, &b, &c) == Some(true)
                {
                    assert_eq!(natural_leq(&sr, &a, &c), Some(true), "{name} transitivity");
                }
            }
        }
    }

    #[test]
    fn naturally_ordered_examples() {
        let nat3 = make_instance("nat", Params::with_bound(3)).unwrap();
        assert_eq!(is_naturally_ordered(&nat3), Some(true));
        let b = make_instance("bool", Params::default()).unwrap();
        assert_eq!(is_naturally_ordered(&b), Some(true));
        // xor: 0 <= 1 and 1 <= 0 but 0 != 1
        assert_eq!(is_naturally_ordered(&xor_and()), Some(false));
        // countable carriers are not decided
        let nat = make_instance("nat", Params::default()).unwrap();
        assert_eq!(is_naturally_ordered(&nat), None);
    }

    #[test]
    fn derive_monus_examples() {
        let nat3 = make_instance("nat", Params::with_bound(3)).unwrap();
        let dm = derive_monus(&nat3).unwrap();
        assert_eq!(*dm.lookup(&Value::nat(3), &Value::nat(1)), Value::nat(2));
        assert_eq!(*dm.lookup(&Value::nat(1), &Value::nat(3)), Value::nat(0));

        use SecurityLevel::*;
        let dm = derive_monus(&security()).unwrap();
        assert_eq!(
            *dm.lookup(&Value::Sec(Secret), &Value::Sec(TopSecret)),
            Value::Sec(Secret)
        );
        assert_eq!(
            *dm.lookup(&Value::Sec(TopSecret), &Value::Sec(Secret)),
            Value::Sec(Never)
        );

        assert!(matches!(
            derive_monus(&xor_and()),
            Err(DeriveError::NotNaturallyOrdered)
        ));
    }

    #[test]
    fn derived_monus_matches_closed_forms_on_bounded_variants() {
        let nat7 = make_instance("nat", Params::with_bound(7)).unwrap();
        let dm = derive_monus(&nat7).unwrap();
        for a in nat7.elements().unwrap() {
            for b in nat7.elements().unwrap() {
                assert_eq!(*dm.lookup(a, b), nat7.monus(a, b).unwrap());
            }
        }
        let trop7 = make_instance("trop", Params::with_bound(7)).unwrap();
        let dm = derive_monus(&trop7).unwrap();
        let fin = |n| Value::Trop(Trop::Fin(n));
        assert_eq!(*dm.lookup(&fin(5), &fin(3)), Value::Trop(Trop::Inf));
        assert_eq!(*dm.lookup(&fin(3), &fin(5)), fin(3));
        for a in trop7.elements().unwrap() {
            for b in trop7.elements().unwrap() {
                assert_eq!(*dm.lookup(a, b), trop7.monus(a, b).unwrap());
            }
        }
    }

    #[test]
    fn check_axiom_examples() {
        // the first A13 witness on the security chain in carrier order
        let report = check_axiom(&security(), AxiomId::A13, CheckStrategy::Exhaustive);
        let w = report.verdict.scalar_witness().expect("A13 fails");
        use SecurityLevel::*;
        assert_eq!(
            w.env,
            vec![
                Value::Sec(Confidential),
                Value::Sec(Public),
                Value::Sec(Confidential)
            ]
        );
        assert_eq!(w.lhs, Value::Sec(Confidential));
        assert_eq!(w.rhs, Value::Sec(Never));

        let b = make_instance("bool", Params::default()).unwrap();
        let report = check_axiom(&b, AxiomId::A13, CheckStrategy::Exhaustive);
        assert!(matches!(report.verdict, Verdict::HoldsExhaustive));

        let nat = make_instance("nat", Params::default()).unwrap();
        let report = check_axiom(
            &nat,
            AxiomId::A11,
            CheckStrategy::Sampled {
                trials: 1000,
                seed: DEFAULT_SEED,
                size: 32,
            },
        );
        assert!(matches!(
            report.verdict,
            Verdict::HoldsSampled { trials: 1000 }
        ));

        // exhaustive checks need a finite carrier
        let report = check_axiom(&nat, AxiomId::A1, CheckStrategy::Exhaustive);
        assert!(matches!(report.verdict, Verdict::Inapplicable { .. }));
    }

    #[test]
    fn check_galois_examples() {
        for (name, bound) in [("nat", Some(7)), ("security", None), ("bool", None)] {
            let params = match bound {
                Some(k) => Params::with_bound(k),
                None => Params::default(),
            };
            let sr = make_instance(name, params).unwrap();
            let report = check_galois(&sr, CheckStrategy::Exhaustive);
            assert!(
                matches!(report.verdict, Verdict::HoldsExhaustive),
                "{name}: {:?}",
                report.verdict
            );
        }
        // no monus, no Galois property to check
        let int = make_instance("int", Params::default()).unwrap();
        let report = check_galois(&int, CheckStrategy::Exhaustive);
        assert!(matches!(report.verdict, Verdict::Inapplicable { .. }));
    }

    #[test]
    fn monus_uniqueness_on_bool() {
        let b = make_instance("bool", Params::default()).unwrap();
        let report = check_monus_uniqueness(&b, false).unwrap();
        assert_eq!(report.candidates, 16);
        assert_eq!(report.passing.len(), 1);
        assert!(report.unique_and_derived);
        // and the unique table is a AND NOT b
        assert_eq!(report.passing[0], vec![0, 0, 1, 0]);
    }

    #[test]
    fn gate_rejects_a_broken_structure() {
        // 1+(1+2) != (1+1)+2 under this table
        let broken = from_tables(
            "broken",
            TableStructure {
                order: 3,
                add: vec![0, 1, 2, 1, 2, 1, 2, 1, 0],
                mul: vec![0, 0, 0, 0, 1, 2, 0, 2, 0],
                monus: None,
            },
        )
        .unwrap();
        let err = registration_gate(&broken, DEFAULT_SEED).unwrap_err();
        assert!(matches!(err, GateFailure::Axiom { axiom: AxiomId::A1, .. }));
    }

    #[test]
    fn galois_and_monus_axioms_fail_together_on_a_wrong_monus() {
        // The max/min chain 0 < 2 < 1 (so that 0 and 1 are the identities)
        // with `a - b = a` unconditionally: not the least-solution monus, so
        // A9..A12 and the Galois property must both refute it.
        let chain = from_tables(
            "chain-bad-monus",
            TableStructure {
                order: 3,
                add: vec![0, 1, 2, 1, 1, 1, 2, 1, 2],
                mul: vec![0, 0, 0, 0, 1, 2, 0, 2, 2],
                monus: Some(vec![0, 0, 0, 1, 1, 1, 2, 2, 2]),
            },
        )
        .unwrap();
        let monus_ok = AxiomId::MONUS
            .iter()
            .all(|ax| check_axiom(&chain, *ax, CheckStrategy::Exhaustive).verdict.holds());
        assert!(!monus_ok, "the identity function is not a monus");
        let galois = check_galois(&chain, CheckStrategy::Exhaustive);
        assert!(galois.verdict.fails(), "Galois must refute it too");

        // with the derived monus instead, both sides accept
        let derived = derive_monus(&chain).unwrap();
        let idx = |v: &Value| {
            chain
                .elements()
                .unwrap()
                .iter()
                .position(|e| e == v)
                .unwrap()
        };
        let fixed = from_tables(
            "chain-derived-monus",
            TableStructure {
                order: 3,
                add: vec![0, 1, 2, 1, 1, 1, 2, 1, 2],
                mul: vec![0, 0, 0, 0, 1, 2, 0, 2, 2],
                monus: Some(derived.table.iter().map(idx).collect()),
            },
        )
        .unwrap();
        assert!(AxiomId::MONUS
            .iter()
            .all(|ax| check_axiom(&fixed, *ax, CheckStrategy::Exhaustive).verdict.holds()));
        assert!(check_galois(&fixed, CheckStrategy::Exhaustive).verdict.holds());
    }

    #[test]
    fn equation_checks_are_deterministic_under_parallelism() {
        let sec = security();
        let a = check_axiom(&sec, AxiomId::A13, CheckStrategy::Exhaustive);
        let b = check_axiom(&sec, AxiomId::A13, CheckStrategy::Exhaustive);
        assert_eq!(
            a.verdict.scalar_witness().map(|w| w.env.clone()),
            b.verdict.scalar_witness().map(|w| w.env.clone())
        );
        let fuzz = make_instance("fuzz", Params::default()).unwrap();
        let strat = CheckStrategy::sampled(5000, DEFAULT_SEED);
        let a = check_axiom(&fuzz, AxiomId::A13, strat);
        let b = check_axiom(&fuzz, AxiomId::A13, strat);
        assert_eq!(
            a.verdict.scalar_witness().map(|w| w.env.clone()),
            b.verdict.scalar_witness().map(|w| w.env.clone())
        );
    }
}
