//! The experiment layer: identity checking over generated relations, law
//! suites per instance, the A13 classification table, lattice
//! counterexample search, finite-structure enumeration, and witness
//! shrinking.

pub mod enumerate;
pub mod expect;
pub mod report;
pub mod shrink;
pub mod table3;

use std::sync::Arc;

use crate::algebra::{
    check_axiom_with, equation::eval_term, natural_leq, CheckReport, CheckStrategy,
    DiffSemantics, Equation, RelationalWitness, Subject, Term, Verdict, Witness,
};
use crate::instances::{Semiring, Value};
use crate::krel::{Atom, Database, DomVal, KRelation, Predicate, QueryExpr, Schema, Tuple};
use crate::par;
use crate::rng::Rng;

pub use crate::algebra::{AxiomId, IdentityId};
pub use enumerate::{enumerate_finite_semirings, EnumerationReport, StructureInfo};
pub use table3::{classify_builtins, ClassificationReport, ClassificationRow};

/// Deterministic generator of small random relations.
#[derive(Clone, Debug)]
pub struct RelationGenerator {
    pub seed: u64,
    /// Upper bound on tuples per relation.
    pub max_tuples: u32,
    /// Domain values are integers in `0..domain`.
    pub domain: u32,
    /// Number of attributes in the shared schema.
    pub width: u32,
    /// Magnitude parameter passed to the annotation sampler.
    pub annot_size: u32,
}

impl Default for RelationGenerator {
    fn default() -> Self {
        RelationGenerator {
            seed: crate::DEFAULT_SEED,
            max_tuples: 4,
            domain: 3,
            width: 2,
            annot_size: 8,
        }
    }
}

const ATTR_POOL: [&str; 4] = ["a", "b", "c", "d"];

impl RelationGenerator {
    pub fn with_seed(seed: u64) -> Self {
        RelationGenerator {
            seed,
            ..Default::default()
        }
    }

    pub fn schema(&self) -> Schema {
        Schema::from_names(&ATTR_POOL[..self.width.clamp(1, 4) as usize])
    }

    pub fn gen_tuple(&self, rng: &mut Rng) -> Tuple {
        self.schema()
            .attrs()
            .iter()
            .map(|a| (a.clone(), DomVal::Int(rng.below(self.domain.max(1) as u64) as i64)))
            .collect()
    }

    /// One normalized relation over the shared schema.
    pub fn gen_relation(&self, sr: &Arc<Semiring>, rng: &mut Rng) -> KRelation {
        let count = rng.below(self.max_tuples as u64 + 1);
        let rows = (0..count)
            .map(|_| (self.gen_tuple(rng), sr.sample(rng, self.annot_size)))
            .collect::<Vec<_>>();
        KRelation::from_rows(sr.clone(), self.schema(), rows).expect("generated tuples are valid")
    }
}

/// Evaluate a law term over relations: `+` is union, `*` natural join, `0`
/// the empty relation over the shared schema, `1` the zero-column unit.
pub fn eval_rel_term(
    term: &Term,
    sr: &Arc<Semiring>,
    sem: DiffSemantics,
    schema: &Schema,
    db: &[KRelation],
) -> KRelation {
    match term {
        Term::Var(i) => db[*i as usize].clone(),
        Term::Zero => KRelation::empty(sr.clone(), schema.clone()),
        Term::One => KRelation::unit(sr.clone()),
        Term::Add(l, r) => eval_rel_term(l, sr, sem, schema, db)
            .union(&eval_rel_term(r, sr, sem, schema, db))
            .expect("generated relations share a schema"),
        Term::Mul(l, r) => eval_rel_term(l, sr, sem, schema, db)
            .join(&eval_rel_term(r, sr, sem, schema, db))
            .expect("join is total on matching instances"),
        Term::Diff(l, r) => eval_rel_term(l, sr, sem, schema, db)
            .diff(sem, &eval_rel_term(r, sr, sem, schema, db))
            .expect("difference support checked before evaluation"),
    }
}

/// The two sides of an identity on a concrete database. I1..I13 interpret
/// the paired law schema; EXT1 selects with a generated predicate and EXT2
/// projects onto a prefix of the schema.
fn identity_sides(
    sr: &Arc<Semiring>,
    id: IdentityId,
    sem: DiffSemantics,
    schema: &Schema,
    db: &[KRelation],
    pred: &Predicate,
) -> (KRelation, KRelation) {
    match id {
        IdentityId::Ext1 => {
            let diff = db[0].diff(sem, &db[1]).expect("support checked");
            let lhs = diff.select(pred).expect("predicate validated");
            let rhs = db[0]
                .select(pred)
                .expect("predicate validated")
                .diff(sem, &db[1].select(pred).expect("predicate validated"))
                .expect("support checked");
            (lhs, rhs)
        }
        IdentityId::Ext2 => {
            let attrs = &schema.attrs()[..1];
            let union = db[0].union(&db[1]).expect("schemas match");
            let lhs = union.project(attrs).expect("attrs in schema");
            let rhs = db[0]
                .project(attrs)
                .expect("attrs in schema")
                .union(&db[1].project(attrs).expect("attrs in schema"))
                .expect("schemas match");
            (lhs, rhs)
        }
        other => {
            let eq = other
                .paired_axiom()
                .expect("I1..I13 pair with axioms")
                .equation();
            (
                eval_rel_term(&eq.lhs, sr, sem, schema, db),
                eval_rel_term(&eq.rhs, sr, sem, schema, db),
            )
        }
    }
}

fn identity_arity(id: IdentityId) -> usize {
    match id {
        IdentityId::Ext1 | IdentityId::Ext2 => 2,
        other => other
            .paired_axiom()
            .expect("I1..I13 pair with axioms")
            .equation()
            .arity as usize,
    }
}

/// Check one relational identity on `trials` generated databases.
///
/// The verdict is deterministic in `(instance, identity, semantics,
/// generator seed)`; a failure reports the first failing trial's database,
/// shrunk while it keeps failing.
pub fn check_identity(
    sr: &Arc<Semiring>,
    id: IdentityId,
    sem: DiffSemantics,
    gen: &RelationGenerator,
    trials: u32,
) -> CheckReport {
    let strategy = CheckStrategy::Sampled {
        trials,
        seed: gen.seed,
        size: gen.annot_size,
    };
    let mk = |verdict| CheckReport {
        subject: Subject::Identity(id),
        instance: sr.clone(),
        semantics: sem,
        strategy,
        verdict,
    };
    if id.uses_diff() && !sem.supported_by(sr) {
        return mk(Verdict::Inapplicable {
            reason: format!(
                "difference semantics `{}` is unsupported by {}",
                sem.label(),
                sr.name()
            ),
        });
    }
    let schema = gen.schema();
    let arity = identity_arity(id);
    let failure = par::find_map_first(trials as u64, |trial| {
        let mut rng = Rng::substream(gen.seed, trial);
        let db: Vec<KRelation> = (0..arity).map(|_| gen.gen_relation(sr, &mut rng)).collect();
        let pred = gen_predicate(gen, &schema, &mut rng);
        let (lhs, rhs) = identity_sides(sr, id, sem, &schema, &db, &pred);
        if lhs == rhs {
            None
        } else {
            Some((db, pred))
        }
    });
    match failure {
        None => mk(Verdict::HoldsSampled { trials }),
        Some((db, pred)) => {
            let schema2 = schema.clone();
            let sr2 = sr.clone();
            let still_fails = move |cand: &[KRelation]| {
                let (lhs, rhs) = identity_sides(&sr2, id, sem, &schema2, cand, &pred);
                if lhs == rhs {
                    None
                } else {
                    Some((lhs, rhs))
                }
            };
            let witness = shrink::shrink_relational(sr, &still_fails, db);
            mk(Verdict::Fails {
                witness: Witness::Relational(witness),
            })
        }
    }
}

fn gen_predicate(gen: &RelationGenerator, schema: &Schema, rng: &mut Rng) -> Predicate {
    let attrs = schema.attrs();
    let atom = if rng.bool() || attrs.len() < 2 {
        Atom::ConstEq(
            attrs[0].clone(),
            DomVal::Int(rng.below(gen.domain.max(1) as u64) as i64),
        )
    } else {
        Atom::AttrEq(attrs[0].clone(), attrs[attrs.len() - 1].clone())
    };
    Predicate::new(vec![atom])
}

/// Check one law, shrinking a sampled failure witness; exhaustive witnesses
/// are already the lexicographically first in carrier order.
pub fn check_axiom_shrunk(
    sr: &Arc<Semiring>,
    ax: AxiomId,
    sem: DiffSemantics,
    strat: CheckStrategy,
) -> CheckReport {
    let mut report = check_axiom_with(sr, ax, sem, strat);
    if let (
        CheckStrategy::Sampled { .. },
        Verdict::Fails {
            witness: Witness::Scalar(w),
        },
    ) = (strat, &report.verdict)
    {
        let shrunk = shrink::shrink_scalar(sr, &ax.equation(), sem, w.clone());
        report.verdict = Verdict::Fails {
            witness: Witness::Scalar(shrunk),
        };
    }
    report
}

/// Run A1..A13 under one difference semantics.
pub fn run_axiom_suite(
    sr: &Arc<Semiring>,
    sem: DiffSemantics,
    strat: CheckStrategy,
) -> Vec<CheckReport> {
    AxiomId::ALL
        .iter()
        .map(|ax| check_axiom_shrunk(sr, *ax, sem, strat))
        .collect()
}

/// Run I1..I13 plus the selection/projection identities.
pub fn run_identity_suite(
    sr: &Arc<Semiring>,
    sem: DiffSemantics,
    gen: &RelationGenerator,
    trials: u32,
) -> Vec<CheckReport> {
    IdentityId::ALL
        .iter()
        .map(|id| check_identity(sr, *id, sem, gen, trials))
        .collect()
}

/// Lift a scalar assignment to single-tuple relations: one shared tuple over
/// a one-attribute schema, relation `i` annotated with `env[i]`. A zero
/// annotation lifts to the empty relation.
pub fn lift_witness(sr: &Arc<Semiring>, env: &[Value]) -> Vec<KRelation> {
    let schema = Schema::from_names(&["a"]);
    let tuple: Tuple = [("a".to_string(), DomVal::Int(0))].into_iter().collect();
    env.iter()
        .map(|v| {
            KRelation::from_rows(
                sr.clone(),
                schema.clone(),
                [(tuple.clone(), v.clone())],
            )
            .expect("lifted tuple is valid")
        })
        .collect()
}

/// Realize a failing law assignment as a relational identity violation.
///
/// Returns the evaluated sides on the lifted single-tuple database when they
/// disagree. This is the checkable direction of the correspondence between
/// law An and identity In.
pub fn lifted_identity_violation(
    sr: &Arc<Semiring>,
    id: IdentityId,
    sem: DiffSemantics,
    env: &[Value],
) -> Option<RelationalWitness> {
    let db = lift_witness(sr, env);
    let schema = Schema::from_names(&["a"]);
    let pred = Predicate::new(vec![Atom::ConstEq("a".into(), DomVal::Int(0))]);
    let (lhs, rhs) = identity_sides(sr, id, sem, &schema, &db, &pred);
    if lhs == rhs {
        None
    } else {
        Some(RelationalWitness { db, lhs, rhs })
    }
}

/// The two sides of I1..I13 as query trees over base names `R`, `S`, `T`
/// (`ZERO` and `ONE` for the constants), for end-to-end evaluation through
/// the query engine.
pub fn identity_to_queries(id: IdentityId) -> Option<(QueryExpr, QueryExpr)> {
    let ax = id.paired_axiom()?;
    let eq = ax.equation();
    fn to_query(term: &Term) -> QueryExpr {
        match term {
            Term::Var(0) => QueryExpr::Base("R".into()),
            Term::Var(1) => QueryExpr::Base("S".into()),
            Term::Var(_) => QueryExpr::Base("T".into()),
            Term::Zero => QueryExpr::Base("ZERO".into()),
            Term::One => QueryExpr::Base("ONE".into()),
            Term::Add(l, r) => QueryExpr::Union(Box::new(to_query(l)), Box::new(to_query(r))),
            Term::Mul(l, r) => QueryExpr::Join(Box::new(to_query(l)), Box::new(to_query(r))),
            Term::Diff(l, r) => QueryExpr::Diff(Box::new(to_query(l)), Box::new(to_query(r))),
        }
    }
    Some((to_query(&eq.lhs), to_query(&eq.rhs)))
}

/// Bind a lifted witness database to the base names used by
/// [`identity_to_queries`].
pub fn witness_database(sr: &Arc<Semiring>, env: &[Value]) -> Database {
    let rels = lift_witness(sr, env);
    let mut db = Database::new();
    for (name, rel) in ["R", "S", "T"].iter().zip(rels) {
        db.insert(*name, rel);
    }
    let schema = Schema::from_names(&["a"]);
    db.insert("ZERO", KRelation::empty(sr.clone(), schema));
    db.insert("ONE", KRelation::unit(sr.clone()));
    db
}

/// A pair `a > b` (in the natural order) with `(a - b) * b` nonzero, the
/// seed of an A13 violation in a distributive lattice: instantiating
/// `(b, a, b)` gives `b * (a - b)` nonzero while `b * a - b * b` is zero.
#[derive(Clone, Debug)]
pub struct LatticeA13Witness {
    pub a: Value,
    pub b: Value,
    /// `(a - b) * b`, the nonzero side.
    pub residue: Value,
    /// The A13 assignment `(a, b, c) = (b, a, b)` realizing the violation.
    pub a13_env: Vec<Value>,
}

/// Search a finite lattice instance for the first pair `a > b` with
/// `(a - b) * b != 0`, scanning `(b, a)` pairs in carrier order.
pub fn find_lattice_a13_witness(sr: &Arc<Semiring>) -> Option<LatticeA13Witness> {
    let elems = sr.elements()?;
    for b in elems {
        for a in elems {
            let strictly_above = a != b && natural_leq(sr, b, a) == Some(true);
            if !strictly_above {
                continue;
            }
            let Some(m) = sr.monus(a, b) else { continue };
            let residue = sr.mul(&m, b);
            if !sr.is_zero(&residue) {
                let env = vec![b.clone(), a.clone(), b.clone()];
                return Some(LatticeA13Witness {
                    a: a.clone(),
                    b: b.clone(),
                    residue,
                    a13_env: env,
                });
            }
        }
    }
    None
}

/// Convenience wrapper: evaluate one equation on an explicit assignment.
pub fn equation_disagrees(
    sr: &Arc<Semiring>,
    eq: &Equation,
    sem: DiffSemantics,
    env: &[Value],
) -> Option<(Value, Value)> {
    let lhs = eval_term(&eq.lhs, sr, sem, env);
    let rhs = eval_term(&eq.rhs, sr, sem, env);
    if lhs == rhs {
        None
    } else {
        Some((lhs, rhs))
    }
}
