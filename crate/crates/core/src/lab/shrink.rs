//! Greedy, deterministic witness shrinking.
//!
//! A shrink step proposes strictly simpler candidates (fewer tuples, smaller
//! domain values, simpler annotations) and keeps the first one on which the
//! subject equation still fails, so the final witness re-verifies by
//! construction. Candidate order is fixed, which makes shrinking a pure
//! function of its input.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::algebra::{
    equation::eval_term, DiffSemantics, Equation, RelationalWitness, ScalarWitness,
};
use crate::instances::{Semiring, Trop, Value};
use crate::krel::{DomVal, KRelation};

const MAX_STEPS: usize = 2000;

/// Simpler candidates for one value, most aggressive first.
///
/// Finite carriers shrink toward earlier elements in carrier order.
/// Countable ones shrink by magnitude, term count, or set size.
pub fn shrink_candidates(sr: &Semiring, v: &Value) -> Vec<Value> {
    if let Some(elems) = sr.elements() {
        let pos = elems.iter().position(|e| e == v).unwrap_or(0);
        return elems[..pos].to_vec();
    }
    let mut out = Vec::new();
    match v {
        Value::Bool(true) => out.push(Value::Bool(false)),
        Value::Bool(false) => {}
        Value::Nat(n) => {
            if !n.is_zero() {
                out.push(Value::Nat(BigUint::zero()));
                if !n.is_one() {
                    out.push(Value::Nat(BigUint::one()));
                    out.push(Value::Nat(n / 2u8));
                    out.push(Value::Nat(n - 1u8));
                }
            }
        }
        Value::Int(z) => {
            if !z.is_zero() {
                out.push(Value::int(0));
                out.push(Value::Int(z / 2));
                let step = if z.sign() == num_bigint::Sign::Minus {
                    z + 1
                } else {
                    z - 1
                };
                out.push(Value::Int(step));
            }
        }
        Value::Frac(q) => {
            if !q.is_zero() {
                // fixed simple targets; halving the value would inflate the
                // denominator without making the witness any more readable
                out.push(Value::frac(0, 1));
                if !q.is_one() {
                    out.push(Value::frac(1, 1));
                }
                out.push(Value::frac(1, 2));
                let floor = q.floor();
                if !floor.is_zero() && floor != *q {
                    out.push(Value::Frac(floor));
                }
            }
        }
        Value::Trop(Trop::Fin(n)) => {
            out.push(Value::Trop(Trop::Inf));
            if *n > 0 {
                out.push(Value::Trop(Trop::Fin(0)));
                out.push(Value::Trop(Trop::Fin(n / 2)));
                out.push(Value::Trop(Trop::Fin(n - 1)));
            }
        }
        Value::Trop(Trop::Inf) => {}
        Value::Poly(p) => {
            if !p.is_empty() {
                out.push(Value::Poly(BTreeMap::new()));
                for m in p.keys() {
                    let mut smaller = p.clone();
                    smaller.remove(m);
                    out.push(Value::Poly(smaller));
                }
                for (m, c) in p {
                    if !c.is_one() {
                        let mut smaller = p.clone();
                        smaller.insert(m.clone(), BigUint::one());
                        out.push(Value::Poly(smaller));
                    }
                }
            }
        }
        Value::Monomials(s) => {
            if !s.is_empty() {
                out.push(Value::Monomials(BTreeSet::new()));
                for m in s {
                    let mut smaller = s.clone();
                    smaller.remove(m);
                    out.push(Value::Monomials(smaller));
                }
            }
        }
        Value::Clauses(cs) => {
            if !cs.is_empty() {
                out.push(Value::Clauses(BTreeSet::new()));
                for c in cs {
                    let mut smaller = cs.clone();
                    smaller.remove(c);
                    out.push(Value::Clauses(smaller));
                }
            }
        }
        Value::Rows(rows) => {
            if !rows.is_empty() {
                out.push(Value::Rows(BTreeSet::new()));
                for r in rows {
                    let mut smaller = rows.clone();
                    smaller.remove(r);
                    out.push(Value::Rows(smaller));
                }
            }
        }
        Value::Witnesses(ws) => {
            if !ws.is_empty() {
                out.push(Value::Witnesses(BTreeSet::new()));
                for w in ws {
                    let mut smaller = ws.clone();
                    smaller.remove(w);
                    out.push(Value::Witnesses(smaller));
                }
            }
        }
        Value::Trio(bag) if !bag.is_empty() => {
            out.push(Value::Trio(BTreeMap::new()));
            for w in bag.keys() {
                let mut smaller = bag.clone();
                smaller.remove(w);
                out.push(Value::Trio(smaller));
            }
            for (w, c) in bag {
                if !c.is_one() {
                    let mut smaller = bag.clone();
                    smaller.insert(w.clone(), BigUint::one());
                    out.push(Value::Trio(smaller));
                }
            }
        }
        _ => {}
    }
    // only canonical carrier members, and never the value itself
    out.retain(|c| c != v && sr.canonicalize(c.clone()).is_ok_and(|k| k == *c));
    out
}

/// Shrink a failing scalar assignment while the equation keeps failing.
pub fn shrink_scalar(
    sr: &Semiring,
    eq: &Equation,
    sem: DiffSemantics,
    witness: ScalarWitness,
) -> ScalarWitness {
    let mut env = witness.env;
    let mut steps = 0;
    'outer: loop {
        if steps >= MAX_STEPS {
            break;
        }
        for i in 0..env.len() {
            for cand in shrink_candidates(sr, &env[i]) {
                steps += 1;
                let mut trial = env.clone();
                trial[i] = cand;
                let lhs = eval_term(&eq.lhs, sr, sem, &trial);
                let rhs = eval_term(&eq.rhs, sr, sem, &trial);
                if lhs != rhs {
                    env = trial;
                    continue 'outer;
                }
                if steps >= MAX_STEPS {
                    break 'outer;
                }
            }
        }
        break;
    }
    let lhs = eval_term(&eq.lhs, sr, sem, &env);
    let rhs = eval_term(&eq.rhs, sr, sem, &env);
    ScalarWitness { env, lhs, rhs }
}

/// Re-evaluation hook for relational shrinking: returns both sides while
/// the candidate database still fails the subject equation.
pub type StillFails<'a> = &'a dyn Fn(&[KRelation]) -> Option<(KRelation, KRelation)>;

/// Shrink a failing database while `still_fails` returns the two sides.
///
/// Reductions tried per round, in order: drop a tuple, zero a domain value,
/// simplify an annotation. Rebuilding through `from_rows` keeps relations
/// normalized when tuples collide after a domain-value change.
pub fn shrink_relational(
    sr: &Arc<Semiring>,
    still_fails: StillFails,
    db: Vec<KRelation>,
) -> RelationalWitness {
    let mut db = db;
    let mut steps = 0;
    'outer: loop {
        if steps >= MAX_STEPS {
            break;
        }
        for rel_idx in 0..db.len() {
            let rel = &db[rel_idx];
            let rows: Vec<_> = rel.rows().clone().into_iter().collect();
            // drop one tuple
            for drop_idx in 0..rows.len() {
                steps += 1;
                let remaining = rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop_idx)
                    .map(|(_, rv)| rv.clone());
                let cand = KRelation::from_rows(
                    sr.clone(),
                    rel.schema().clone(),
                    remaining,
                )
                .expect("shrunk rows stay valid");
                let mut trial = db.clone();
                trial[rel_idx] = cand;
                if still_fails(&trial).is_some() {
                    db = trial;
                    continue 'outer;
                }
                if steps >= MAX_STEPS {
                    break 'outer;
                }
            }
            // zero one domain value
            for (tuple, _) in &rows {
                for (attr, dv) in tuple {
                    if let DomVal::Int(n) = dv {
                        if *n == 0 {
                            continue;
                        }
                        steps += 1;
                        let rewritten = rows.iter().map(|(t, v)| {
                            let mut t = t.clone();
                            if t == *tuple {
                                t.insert(attr.clone(), DomVal::Int(0));
                            }
                            (t, v.clone())
                        });
                        let cand = KRelation::from_rows(
                            sr.clone(),
                            rel.schema().clone(),
                            rewritten,
                        )
                        .expect("shrunk rows stay valid");
                        let mut trial = db.clone();
                        trial[rel_idx] = cand;
                        if still_fails(&trial).is_some() {
                            db = trial;
                            continue 'outer;
                        }
                        if steps >= MAX_STEPS {
                            break 'outer;
                        }
                    }
                }
            }
            // simplify one annotation
            for (tuple, annot) in &rows {
                for cand_annot in shrink_candidates(sr, annot) {
                    steps += 1;
                    let rewritten = rows.iter().map(|(t, v)| {
                        if t == tuple {
                            (t.clone(), cand_annot.clone())
                        } else {
                            (t.clone(), v.clone())
                        }
                    });
                    let cand = KRelation::from_rows(
                        sr.clone(),
                        rel.schema().clone(),
                        rewritten,
                    )
                    .expect("shrunk rows stay valid");
                    let mut trial = db.clone();
                    trial[rel_idx] = cand;
                    if still_fails(&trial).is_some() {
                        db = trial;
                        continue 'outer;
                    }
                    if steps >= MAX_STEPS {
                        break 'outer;
                    }
                }
            }
        }
        break;
    }
    let (lhs, rhs) = still_fails(&db).expect("shrinking preserves failure");
    RelationalWitness { db, lhs, rhs }
}
