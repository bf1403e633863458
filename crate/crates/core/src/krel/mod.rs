//! Annotated relations and the query algebra over them.
//!
//! A [`KRelation`] maps tuples over a named-attribute schema to nonzero
//! annotations from one instance. The operators interpret the algebra over
//! those annotations: union adds, natural join multiplies, projection sums
//! collapsing tuples, selection multiplies by zero or one, and difference
//! applies the configured [`DiffSemantics`] per tuple.
//!
//! Results are always normalized: a zero annotation is never stored, so the
//! support of a relation is exactly its key set. Under the ring-subtraction
//! semantics negative annotations are legal nonzero values and are kept.

pub mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{scalar_diff, DiffSemantics};
use crate::instances::{Semiring, Value};

/// A domain value: integers and strings, compared by type then value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DomVal {
    Int(i64),
    Str(String),
}

impl fmt::Display for DomVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomVal::Int(n) => write!(f, "{n}"),
            DomVal::Str(s) => write!(f, "{s}"),
        }
    }
}

/// A tuple: attribute name to domain value, keyed exactly by the schema.
pub type Tuple = BTreeMap<String, DomVal>;

/// An ordered set of distinct attribute names.
///
/// The order is display order only; schema compatibility and tuple identity
/// are set-based. The empty schema is reserved for the join-unit relation
/// (one zero-column tuple annotated 1); user-facing relations always have at
/// least one attribute.
#[derive(Clone, Debug, Eq)]
pub struct Schema(Vec<String>);

impl PartialEq for Schema {
    fn eq(&self, other: &Self) -> bool {
        self.attr_set() == other.attr_set()
    }
}

impl Schema {
    pub fn new(attrs: Vec<String>) -> Result<Schema, KrelError> {
        if attrs.is_empty() {
            return Err(KrelError::BadSchema("schema must be nonempty".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &attrs {
            if a.is_empty() {
                return Err(KrelError::BadSchema("empty attribute name".into()));
            }
            if !seen.insert(a.clone()) {
                return Err(KrelError::BadSchema(format!("duplicate attribute `{a}`")));
            }
        }
        Ok(Schema(attrs))
    }

    pub fn from_names(names: &[&str]) -> Schema {
        Schema::new(names.iter().map(|s| s.to_string()).collect()).expect("valid names")
    }

    /// The zero-column schema of the join-unit relation.
    pub fn empty() -> Schema {
        Schema(Vec::new())
    }

    pub fn attrs(&self) -> &[String] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|a| a == name)
    }

    fn attr_set(&self) -> BTreeSet<&str> {
        self.0.iter().map(|s| s.as_str()).collect()
    }

    /// Attributes of both schemas: self's order, then the others new to it.
    pub fn union(&self, other: &Schema) -> Schema {
        let mut attrs = self.0.clone();
        for a in &other.0 {
            if !self.contains(a) {
                attrs.push(a.clone());
            }
        }
        Schema(attrs)
    }

    pub fn shared(&self, other: &Schema) -> Vec<String> {
        self.0
            .iter()
            .filter(|a| other.contains(a))
            .cloned()
            .collect()
    }

    pub fn display(&self) -> String {
        self.0.join(",")
    }
}

#[derive(Debug, Error)]
pub enum KrelError {
    #[error("invalid schema: {0}")]
    BadSchema(String),
    #[error("schemas differ: [{left}] vs [{right}]")]
    SchemaMismatch { left: String, right: String },
    #[error("relations belong to different instances ({left} vs {right})")]
    InstanceMismatch { left: String, right: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("rename collision on `{0}`")]
    RenameCollision(String),
    #[error("tuple does not match schema [{0}]")]
    MalformedTuple(String),
    #[error("difference semantics `{sem}` is unsupported by instance {instance}")]
    UnsupportedDiff { sem: &'static str, instance: String },
    #[error("comparison of `{attr}` mixes integer and string values")]
    TypeMismatch { attr: String },
    #[error("unbound base relation `{0}`")]
    UnboundRelation(String),
    #[error("in {node}: {source}")]
    At {
        node: String,
        #[source]
        source: Box<KrelError>,
    },
}

/// A finite map from tuples to nonzero annotations of one instance.
#[derive(Clone, Debug)]
pub struct KRelation {
    schema: Schema,
    rows: BTreeMap<Tuple, Value>,
    semiring: Arc<Semiring>,
}

impl PartialEq for KRelation {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema
            && self.semiring == other.semiring
            && self.rows == other.rows
    }
}
impl Eq for KRelation {}

impl KRelation {
    pub fn empty(semiring: Arc<Semiring>, schema: Schema) -> KRelation {
        KRelation {
            schema,
            rows: BTreeMap::new(),
            semiring,
        }
    }

    /// The join unit: one zero-column tuple annotated with 1.
    pub fn unit(semiring: Arc<Semiring>) -> KRelation {
        let one = semiring.one();
        KRelation {
            schema: Schema::empty(),
            rows: BTreeMap::from([(Tuple::new(), one)]),
            semiring,
        }
    }

    /// Build a relation, validating tuples against the schema, summing
    /// duplicate tuples, and dropping zero annotations.
    pub fn from_rows(
        semiring: Arc<Semiring>,
        schema: Schema,
        rows: impl IntoIterator<Item = (Tuple, Value)>,
    ) -> Result<KRelation, KrelError> {
        let mut rel = KRelation::empty(semiring, schema);
        for (t, v) in rows {
            if t.len() != rel.schema.attrs().len()
                || !t.keys().all(|k| rel.schema.contains(k))
            {
                return Err(KrelError::MalformedTuple(rel.schema.display()));
            }
            rel.insert_add(t, v);
        }
        Ok(rel)
    }

    fn insert_add(&mut self, t: Tuple, v: Value) {
        let sum = match self.rows.remove(&t) {
            Some(old) => self.semiring.add(&old, &v),
            None => v,
        };
        if !self.semiring.is_zero(&sum) {
            self.rows.insert(t, sum);
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn semiring(&self) -> &Arc<Semiring> {
        &self.semiring
    }

    pub fn rows(&self) -> &BTreeMap<Tuple, Value> {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// The annotation of `t`, which is zero for tuples outside the support.
    pub fn annotation(&self, t: &Tuple) -> Value {
        self.rows.get(t).cloned().unwrap_or_else(|| self.semiring.zero())
    }

    fn check_same_instance(&self, other: &KRelation) -> Result<(), KrelError> {
        if self.semiring != other.semiring {
            return Err(KrelError::InstanceMismatch {
                left: self.semiring.name().to_string(),
                right: other.semiring.name().to_string(),
            });
        }
        Ok(())
    }

    fn check_same_schema(&self, other: &KRelation) -> Result<(), KrelError> {
        if self.schema != other.schema {
            return Err(KrelError::SchemaMismatch {
                left: self.schema.display(),
                right: other.schema.display(),
            });
        }
        Ok(())
    }

    /// Union: per-tuple sum of annotations.
    pub fn union(&self, other: &KRelation) -> Result<KRelation, KrelError> {
        self.check_same_instance(other)?;
        self.check_same_schema(other)?;
        let mut out = KRelation::empty(self.semiring.clone(), self.schema.clone());
        for (t, v) in &self.rows {
            out.insert_add(t.clone(), v.clone());
        }
        for (t, v) in &other.rows {
            out.insert_add(t.clone(), v.clone());
        }
        Ok(out)
    }

    /// Natural join: merged tuples that agree on the shared attributes,
    /// annotated with the product.
    pub fn join(&self, other: &KRelation) -> Result<KRelation, KrelError> {
        self.check_same_instance(other)?;
        let shared = self.schema.shared(&other.schema);
        let key_of = |t: &Tuple| -> Vec<DomVal> {
            shared.iter().map(|a| t[a].clone()).collect()
        };
        let mut grouped: BTreeMap<Vec<DomVal>, Vec<(&Tuple, &Value)>> = BTreeMap::new();
        for (t, v) in &other.rows {
            grouped.entry(key_of(t)).or_default().push((t, v));
        }
        let schema = self.schema.union(&other.schema);
        let mut out = KRelation::empty(self.semiring.clone(), schema);
        for (t1, v1) in &self.rows {
            let Some(matches) = grouped.get(&key_of(t1)) else {
                continue;
            };
            for (t2, v2) in matches {
                let mut merged = t1.clone();
                for (k, v) in t2.iter() {
                    merged.insert(k.clone(), v.clone());
                }
                out.insert_add(merged, self.semiring.mul(v1, v2));
            }
        }
        Ok(out)
    }

    /// Projection: annotations of collapsing tuples are summed.
    pub fn project(&self, attrs: &[String]) -> Result<KRelation, KrelError> {
        for a in attrs {
            if !self.schema.contains(a) {
                return Err(KrelError::UnknownAttribute(a.clone()));
            }
        }
        let schema = if attrs.is_empty() {
            Schema::empty()
        } else {
            Schema::new(attrs.to_vec())?
        };
        let mut out = KRelation::empty(self.semiring.clone(), schema);
        for (t, v) in &self.rows {
            let narrowed: Tuple = attrs
                .iter()
                .map(|a| (a.clone(), t[a].clone()))
                .collect();
            out.insert_add(narrowed, v.clone());
        }
        Ok(out)
    }

    /// Selection: rows failing the predicate are dropped (multiplied by
    /// zero), passing rows keep their annotation (multiplied by one).
    pub fn select(&self, pred: &Predicate) -> Result<KRelation, KrelError> {
        pred.validate(&self.schema)?;
        let mut out = KRelation::empty(self.semiring.clone(), self.schema.clone());
        for (t, v) in &self.rows {
            if pred.eval(t)? {
                out.insert_add(t.clone(), v.clone());
            }
        }
        Ok(out)
    }

    /// Rename attributes; annotations are untouched.
    pub fn rename(&self, map: &[(String, String)]) -> Result<KRelation, KrelError> {
        let mut sources = BTreeSet::new();
        for (old, _) in map {
            if !self.schema.contains(old) {
                return Err(KrelError::UnknownAttribute(old.clone()));
            }
            if !sources.insert(old.clone()) {
                return Err(KrelError::RenameCollision(old.clone()));
            }
        }
        let rename_of = |name: &str| -> String {
            map.iter()
                .find(|(old, _)| old == name)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| name.to_string())
        };
        let new_attrs: Vec<String> =
            self.schema.attrs().iter().map(|a| rename_of(a)).collect();
        let mut seen = BTreeSet::new();
        for a in &new_attrs {
            if !seen.insert(a.clone()) {
                return Err(KrelError::RenameCollision(a.clone()));
            }
        }
        let schema = if new_attrs.is_empty() {
            Schema::empty()
        } else {
            Schema::new(new_attrs)?
        };
        let mut out = KRelation::empty(self.semiring.clone(), schema);
        for (t, v) in &self.rows {
            let renamed: Tuple = t
                .iter()
                .map(|(k, val)| (rename_of(k), val.clone()))
                .collect();
            out.insert_add(renamed, v.clone());
        }
        Ok(out)
    }

    /// Difference under the chosen semantics, per tuple over the union of
    /// both supports.
    pub fn diff(&self, sem: DiffSemantics, other: &KRelation) -> Result<KRelation, KrelError> {
        self.check_same_instance(other)?;
        self.check_same_schema(other)?;
        if !sem.supported_by(&self.semiring) {
            return Err(KrelError::UnsupportedDiff {
                sem: sem.label(),
                instance: self.semiring.name().to_string(),
            });
        }
        let mut out = KRelation::empty(self.semiring.clone(), self.schema.clone());
        let tuples: BTreeSet<&Tuple> = self.rows.keys().chain(other.rows.keys()).collect();
        for t in tuples {
            let a = self.annotation(t);
            let b = other.annotation(t);
            let d = scalar_diff(&self.semiring, sem, &a, &b)
                .expect("support checked above");
            if !self.semiring.is_zero(&d) {
                out.rows.insert(t.clone(), d);
            }
        }
        Ok(out)
    }
}

/// A conjunction of atomic comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub atoms: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    /// `attr = attr`
    AttrEq(String, String),
    /// `attr = constant`
    ConstEq(String, DomVal),
}

impl Predicate {
    pub fn new(atoms: Vec<Atom>) -> Predicate {
        Predicate { atoms }
    }

    fn validate(&self, schema: &Schema) -> Result<(), KrelError> {
        for atom in &self.atoms {
            let (Atom::AttrEq(l, _) | Atom::ConstEq(l, _)) = atom;
            if !schema.contains(l) {
                return Err(KrelError::UnknownAttribute(l.clone()));
            }
            if let Atom::AttrEq(_, r) = atom {
                if !schema.contains(r) {
                    return Err(KrelError::UnknownAttribute(r.clone()));
                }
            }
        }
        Ok(())
    }

    fn eval(&self, t: &Tuple) -> Result<bool, KrelError> {
        for atom in &self.atoms {
            let (attr, left, right) = match atom {
                Atom::AttrEq(l, r) => (l, &t[l], &t[r]),
                Atom::ConstEq(l, c) => (l, &t[l], c),
            };
            match (left, right) {
                (DomVal::Int(_), DomVal::Str(_)) | (DomVal::Str(_), DomVal::Int(_)) => {
                    return Err(KrelError::TypeMismatch { attr: attr.clone() })
                }
                _ => {
                    if left != right {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Abstract syntax of queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryExpr {
    Base(String),
    Union(Box<QueryExpr>, Box<QueryExpr>),
    Join(Box<QueryExpr>, Box<QueryExpr>),
    Project(Vec<String>, Box<QueryExpr>),
    Select(Predicate, Box<QueryExpr>),
    Rename(Vec<(String, String)>, Box<QueryExpr>),
    Diff(Box<QueryExpr>, Box<QueryExpr>),
}

impl QueryExpr {
    fn node_label(&self) -> String {
        match self {
            QueryExpr::Base(n) => format!("base `{n}`"),
            QueryExpr::Union(_, _) => "UNION".to_string(),
            QueryExpr::Join(_, _) => "JOIN".to_string(),
            QueryExpr::Project(attrs, _) => format!("PROJECT[{}]", attrs.join(",")),
            QueryExpr::Select(_, _) => "SELECT".to_string(),
            QueryExpr::Rename(_, _) => "RENAME".to_string(),
            QueryExpr::Diff(_, _) => "difference".to_string(),
        }
    }
}

/// Named base relations, all over one instance.
#[derive(Clone, Debug, Default)]
pub struct Database {
    rels: BTreeMap<String, KRelation>,
}

impl Database {
    pub fn new() -> Database {
        Database::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, rel: KRelation) {
        self.rels.insert(name.into(), rel);
    }

    pub fn get(&self, name: &str) -> Option<&KRelation> {
        self.rels.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.rels.keys()
    }
}

/// Infer the schema of a query against the database, failing on the
/// offending node for unbound names, schema mismatches, and malformed
/// projections or renamings.
pub fn schema_of(db: &Database, q: &QueryExpr) -> Result<Schema, KrelError> {
    let at = |node: &QueryExpr, e: KrelError| KrelError::At {
        node: node.node_label(),
        source: Box::new(e),
    };
    match q {
        QueryExpr::Base(name) => db
            .get(name)
            .map(|r| r.schema().clone())
            .ok_or_else(|| KrelError::UnboundRelation(name.clone())),
        QueryExpr::Union(l, r) | QueryExpr::Diff(l, r) => {
            let ls = schema_of(db, l)?;
            let rs = schema_of(db, r)?;
            if ls != rs {
                return Err(at(
                    q,
                    KrelError::SchemaMismatch {
                        left: ls.display(),
                        right: rs.display(),
                    },
                ));
            }
            Ok(ls)
        }
        QueryExpr::Join(l, r) => {
            let ls = schema_of(db, l)?;
            let rs = schema_of(db, r)?;
            Ok(ls.union(&rs))
        }
        QueryExpr::Project(attrs, child) => {
            let cs = schema_of(db, child)?;
            for a in attrs {
                if !cs.contains(a) {
                    return Err(at(q, KrelError::UnknownAttribute(a.clone())));
                }
            }
            if attrs.is_empty() {
                Ok(Schema::empty())
            } else {
                Schema::new(attrs.clone()).map_err(|e| at(q, e))
            }
        }
        QueryExpr::Select(pred, child) => {
            let cs = schema_of(db, child)?;
            pred.validate(&cs).map_err(|e| at(q, e))?;
            Ok(cs)
        }
        QueryExpr::Rename(map, child) => {
            let cs = schema_of(db, child)?;
            let rename_of = |name: &str| -> String {
                map.iter()
                    .find(|(old, _)| old == name)
                    .map(|(_, new)| new.clone())
                    .unwrap_or_else(|| name.to_string())
            };
            for (old, _) in map {
                if !cs.contains(old) {
                    return Err(at(q, KrelError::UnknownAttribute(old.clone())));
                }
            }
            let new_attrs: Vec<String> = cs.attrs().iter().map(|a| rename_of(a)).collect();
            Schema::new(new_attrs).map_err(|e| at(q, e))
        }
    }
}

/// Bottom-up evaluation of a query under the chosen difference semantics.
/// Deterministic; the result is normalized.
pub fn eval_query(
    db: &Database,
    q: &QueryExpr,
    sem: DiffSemantics,
) -> Result<KRelation, KrelError> {
    let at = |node: &QueryExpr, e: KrelError| KrelError::At {
        node: node.node_label(),
        source: Box::new(e),
    };
    match q {
        QueryExpr::Base(name) => db
            .get(name)
            .cloned()
            .ok_or_else(|| KrelError::UnboundRelation(name.clone())),
        QueryExpr::Union(l, r) => {
            let lv = eval_query(db, l, sem)?;
            let rv = eval_query(db, r, sem)?;
            lv.union(&rv).map_err(|e| at(q, e))
        }
        QueryExpr::Join(l, r) => {
            let lv = eval_query(db, l, sem)?;
            let rv = eval_query(db, r, sem)?;
            lv.join(&rv).map_err(|e| at(q, e))
        }
        QueryExpr::Project(attrs, child) => {
            let cv = eval_query(db, child, sem)?;
            cv.project(attrs).map_err(|e| at(q, e))
        }
        QueryExpr::Select(pred, child) => {
            let cv = eval_query(db, child, sem)?;
            cv.select(pred).map_err(|e| at(q, e))
        }
        QueryExpr::Rename(map, child) => {
            let cv = eval_query(db, child, sem)?;
            cv.rename(map).map_err(|e| at(q, e))
        }
        QueryExpr::Diff(l, r) => {
            let lv = eval_query(db, l, sem)?;
            let rv = eval_query(db, r, sem)?;
            lv.diff(sem, &rv).map_err(|e| at(q, e))
        }
    }
}
