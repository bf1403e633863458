//! Naive reference evaluators for the oracle-equivalence criterion.
//!
//! The bag oracle represents a relation as a multiset of tuples (a plain
//! vector) and the set oracle as a set of tuples; both implement the seven
//! operators from first principles, with difference as truncated multiset
//! difference and set difference respectively. Neither touches the
//! annotation machinery under test.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use krelab::algebra::DiffSemantics;
use krelab::instances::{make_instance, Params, Semiring, Value};
use krelab::krel::{
    eval_query, schema_of, Atom, Database, DomVal, KRelation, Predicate, QueryExpr, Schema, Tuple,
};
use krelab::{Rng, DEFAULT_SEED};

type BagRel = (BTreeSet<String>, Vec<Tuple>);

fn atom_holds(atom: &Atom, t: &Tuple) -> bool {
    match atom {
        Atom::AttrEq(l, r) => t[l] == t[r],
        Atom::ConstEq(l, c) => t[l] == *c,
    }
}

fn pred_holds(pred: &Predicate, t: &Tuple) -> bool {
    pred.atoms.iter().all(|a| atom_holds(a, t))
}

fn eval_bag(db: &BTreeMap<String, BagRel>, q: &QueryExpr) -> BagRel {
    match q {
        QueryExpr::Base(name) => db[name].clone(),
        QueryExpr::Union(l, r) => {
            let (ls, mut lt) = eval_bag(db, l);
            let (_, mut rt) = eval_bag(db, r);
            lt.append(&mut rt);
            (ls, lt)
        }
        QueryExpr::Join(l, r) => {
            let (ls, lt) = eval_bag(db, l);
            let (rs, rt) = eval_bag(db, r);
            let shared: Vec<&String> = ls.intersection(&rs).collect();
            let mut out = Vec::new();
            for t1 in &lt {
                for t2 in &rt {
                    if shared.iter().all(|a| t1[*a] == t2[*a]) {
                        let mut merged = t1.clone();
                        for (k, v) in t2 {
                            merged.insert(k.clone(), v.clone());
                        }
                        out.push(merged);
                    }
                }
            }
            (ls.union(&rs).cloned().collect(), out)
        }
        QueryExpr::Project(attrs, child) => {
            let (_, ct) = eval_bag(db, child);
            let narrowed = ct
                .iter()
                .map(|t| {
                    attrs
                        .iter()
                        .map(|a| (a.clone(), t[a].clone()))
                        .collect::<Tuple>()
                })
                .collect();
            (attrs.iter().cloned().collect(), narrowed)
        }
        QueryExpr::Select(pred, child) => {
            let (cs, ct) = eval_bag(db, child);
            (cs, ct.into_iter().filter(|t| pred_holds(pred, t)).collect())
        }
        QueryExpr::Rename(map, child) => {
            let (cs, ct) = eval_bag(db, child);
            let rename = |name: &str| -> String {
                map.iter()
                    .find(|(old, _)| old == name)
                    .map(|(_, new)| new.clone())
                    .unwrap_or_else(|| name.to_string())
            };
            let schema = cs.iter().map(|a| rename(a)).collect();
            let tuples = ct
                .into_iter()
                .map(|t| t.into_iter().map(|(k, v)| (rename(&k), v)).collect())
                .collect();
            (schema, tuples)
        }
        QueryExpr::Diff(l, r) => {
            let (ls, lt) = eval_bag(db, l);
            let (_, rt) = eval_bag(db, r);
            let mut counts: BTreeMap<Tuple, i64> = BTreeMap::new();
            for t in &lt {
                *counts.entry(t.clone()).or_insert(0) += 1;
            }
            for t in &rt {
                *counts.entry(t.clone()).or_insert(0) -= 1;
            }
            let mut out = Vec::new();
            for (t, c) in counts {
                for _ in 0..c.max(0) {
                    out.push(t.clone());
                }
            }
            (ls, out)
        }
    }
}

type SetRel = (BTreeSet<String>, BTreeSet<Tuple>);

fn eval_set(db: &BTreeMap<String, SetRel>, q: &QueryExpr) -> SetRel {
    match q {
        QueryExpr::Base(name) => db[name].clone(),
        QueryExpr::Union(l, r) => {
            let (ls, lt) = eval_set(db, l);
            let (_, rt) = eval_set(db, r);
            (ls, lt.union(&rt).cloned().collect())
        }
        QueryExpr::Join(l, r) => {
            let (ls, lt) = eval_set(db, l);
            let (rs, rt) = eval_set(db, r);
            let shared: Vec<&String> = ls.intersection(&rs).collect();
            let mut out = BTreeSet::new();
            for t1 in &lt {
                for t2 in &rt {
                    if shared.iter().all(|a| t1[*a] == t2[*a]) {
                        let mut merged = t1.clone();
                        for (k, v) in t2 {
                            merged.insert(k.clone(), v.clone());
                        }
                        out.insert(merged);
                    }
                }
            }
            (ls.union(&rs).cloned().collect(), out)
        }
        QueryExpr::Project(attrs, child) => {
            let (_, ct) = eval_set(db, child);
            let narrowed = ct
                .iter()
                .map(|t| {
                    attrs
                        .iter()
                        .map(|a| (a.clone(), t[a].clone()))
                        .collect::<Tuple>()
                })
                .collect();
            (attrs.iter().cloned().collect(), narrowed)
        }
        QueryExpr::Select(pred, child) => {
            let (cs, ct) = eval_set(db, child);
            (cs, ct.into_iter().filter(|t| pred_holds(pred, t)).collect())
        }
        QueryExpr::Rename(map, child) => {
            let (cs, ct) = eval_set(db, child);
            let rename = |name: &str| -> String {
                map.iter()
                    .find(|(old, _)| old == name)
                    .map(|(_, new)| new.clone())
                    .unwrap_or_else(|| name.to_string())
            };
            let schema = cs.iter().map(|a| rename(a)).collect();
            let tuples = ct
                .into_iter()
                .map(|t| t.into_iter().map(|(k, v)| (rename(&k), v)).collect())
                .collect();
            (schema, tuples)
        }
        QueryExpr::Diff(l, r) => {
            let (ls, lt) = eval_set(db, l);
            let (_, rt) = eval_set(db, r);
            (ls, lt.difference(&rt).cloned().collect())
        }
    }
}

fn int_tuple(attrs: &[&str], rng: &mut Rng, domain: u64) -> Tuple {
    attrs
        .iter()
        .map(|a| (a.to_string(), DomVal::Int(rng.below(domain) as i64)))
        .collect()
}

struct Case {
    nat_db: Database,
    bool_db: Database,
    bag_db: BTreeMap<String, BagRel>,
    set_db: BTreeMap<String, SetRel>,
}

fn gen_case(nat: &Arc<Semiring>, boolean: &Arc<Semiring>, rng: &mut Rng) -> Case {
    let specs: [(&str, &[&str]); 3] = [("R", &["a", "b"]), ("S", &["a", "b"]), ("T", &["b", "c"])];
    let mut nat_db = Database::new();
    let mut bool_db = Database::new();
    let mut bag_db = BTreeMap::new();
    let mut set_db = BTreeMap::new();
    for (name, attrs) in specs {
        let count = rng.below(5);
        let mut bag = Vec::new();
        let mut rows = Vec::new();
        for _ in 0..count {
            let t = int_tuple(attrs, rng, 3);
            let mult = 1 + rng.below(3);
            for _ in 0..mult {
                bag.push(t.clone());
            }
            rows.push((t, Value::nat(mult)));
        }
        let schema = Schema::from_names(attrs);
        let set: BTreeSet<Tuple> = bag.iter().cloned().collect();
        nat_db.insert(
            name,
            KRelation::from_rows(nat.clone(), schema.clone(), rows.clone()).unwrap(),
        );
        bool_db.insert(
            name,
            KRelation::from_rows(
                boolean.clone(),
                schema,
                set.iter().cloned().map(|t| (t, Value::Bool(true))),
            )
            .unwrap(),
        );
        let attr_set: BTreeSet<String> = attrs.iter().map(|s| s.to_string()).collect();
        bag_db.insert(name.to_string(), (attr_set.clone(), bag));
        set_db.insert(name.to_string(), (attr_set, set));
    }
    Case {
        nat_db,
        bool_db,
        bag_db,
        set_db,
    }
}

fn gen_query(rng: &mut Rng, depth: u32) -> QueryExpr {
    let base = |rng: &mut Rng| {
        let name = ["R", "S", "T"][rng.below(3) as usize];
        QueryExpr::Base(name.to_string())
    };
    if depth == 0 {
        return base(rng);
    }
    match rng.below(9) {
        0 | 1 => QueryExpr::Union(
            Box::new(gen_query(rng, depth - 1)),
            Box::new(gen_query(rng, depth - 1)),
        ),
        2 | 3 => QueryExpr::Diff(
            Box::new(gen_query(rng, depth - 1)),
            Box::new(gen_query(rng, depth - 1)),
        ),
        4 => QueryExpr::Join(
            Box::new(gen_query(rng, depth - 1)),
            Box::new(gen_query(rng, depth - 1)),
        ),
        5 => {
            let pool = [
                vec!["a"],
                vec!["b"],
                vec!["a", "b"],
                vec!["b", "c"],
                vec!["c"],
            ];
            let attrs = pool[rng.below(pool.len() as u64) as usize]
                .iter()
                .map(|s| s.to_string())
                .collect();
            QueryExpr::Project(attrs, Box::new(gen_query(rng, depth - 1)))
        }
        6 => {
            let attr = ["a", "b", "c"][rng.below(3) as usize].to_string();
            let atom = if rng.bool() {
                Atom::ConstEq(attr, DomVal::Int(rng.below(3) as i64))
            } else {
                Atom::AttrEq(attr, ["a", "b"][rng.below(2) as usize].to_string())
            };
            QueryExpr::Select(Predicate::new(vec![atom]), Box::new(gen_query(rng, depth - 1)))
        }
        7 => {
            let maps: [&[(&str, &str)]; 4] = [
                &[("a", "d")],
                &[("b", "d")],
                &[("a", "b"), ("b", "a")],
                &[("c", "a")],
            ];
            let map = maps[rng.below(maps.len() as u64) as usize]
                .iter()
                .map(|(o, n)| (o.to_string(), n.to_string()))
                .collect();
            QueryExpr::Rename(map, Box::new(gen_query(rng, depth - 1)))
        }
        _ => base(rng),
    }
}

fn count_ops(q: &QueryExpr, seen: &mut [u32; 7]) {
    match q {
        QueryExpr::Base(_) => seen[0] += 1,
        QueryExpr::Union(l, r) => {
            seen[1] += 1;
            count_ops(l, seen);
            count_ops(r, seen);
        }
        QueryExpr::Join(l, r) => {
            seen[2] += 1;
            count_ops(l, seen);
            count_ops(r, seen);
        }
        QueryExpr::Project(_, c) => {
            seen[3] += 1;
            count_ops(c, seen);
        }
        QueryExpr::Select(_, c) => {
            seen[4] += 1;
            count_ops(c, seen);
        }
        QueryExpr::Rename(_, c) => {
            seen[5] += 1;
            count_ops(c, seen);
        }
        QueryExpr::Diff(l, r) => {
            seen[6] += 1;
            count_ops(l, seen);
            count_ops(r, seen);
        }
    }
}

fn bag_matches(rel: &KRelation, bag: &[Tuple]) -> bool {
    let mut counts: BTreeMap<&Tuple, u64> = BTreeMap::new();
    for t in bag {
        *counts.entry(t).or_insert(0) += 1;
    }
    if counts.len() != rel.len() {
        return false;
    }
    counts
        .iter()
        .all(|(t, c)| rel.rows().get(*t) == Some(&Value::nat(*c)))
}

fn set_matches(rel: &KRelation, set: &BTreeSet<Tuple>) -> bool {
    rel.len() == set.len() && set.iter().all(|t| rel.rows().get(t) == Some(&Value::Bool(true)))
}

/// Run `cases` seeded random databases and queries against both oracles.
/// Returns the number of mismatches, asserting along the way that the query
/// pool exercised every operator.
pub fn run_equivalence(cases: u32) -> u32 {
    let nat = make_instance("nat", Params::default()).unwrap();
    let boolean = make_instance("bool", Params::default()).unwrap();
    let mut mismatches = 0;
    let mut coverage = [0u32; 7];
    for i in 0..cases {
        let mut rng = Rng::substream(DEFAULT_SEED ^ 0x08ac1e, i as u64);
        let case = gen_case(&nat, &boolean, &mut rng);
        // rejection-sample a well-typed query
        let query = (0..100)
            .find_map(|_| {
                let depth = 2 + rng.below(2) as u32;
                let q = gen_query(&mut rng, depth);
                schema_of(&case.nat_db, &q).ok().map(|_| q)
            })
            .unwrap_or_else(|| QueryExpr::Base("R".into()));
        count_ops(&query, &mut coverage);

        let engine_nat = eval_query(&case.nat_db, &query, DiffSemantics::Monus).unwrap();
        let (_, bag) = eval_bag(&case.bag_db, &query);
        if !bag_matches(&engine_nat, &bag) {
            mismatches += 1;
        }
        let engine_bool = eval_query(&case.bool_db, &query, DiffSemantics::Monus).unwrap();
        let (_, set) = eval_set(&case.set_db, &query);
        if !set_matches(&engine_bool, &set) {
            mismatches += 1;
        }
    }
    assert!(
        coverage.iter().all(|c| *c > 0),
        "query pool must cover all seven operators, saw {coverage:?}"
    );
    mismatches
}
