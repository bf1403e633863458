//! The A13 classification of the built-in instances.
//!
//! Each m-semiring instance is checked for A13 (multiplication distributing
//! over monus) and the computed verdict is compared against a stored claimed
//! classification. The claimed column is data, not an assertion: rows whose
//! claim rests on constructions this engine had to pin down concretely (the
//! polynomial and witness-family instances) are marked adjudicated, and a
//! disagreement there is reported prominently rather than suppressed or
//! treated as a build failure.

use std::sync::Arc;

use crate::algebra::{
    check_axiom, AxiomId, CheckStrategy, DiffSemantics, ScalarWitness, Verdict, Witness,
};
use crate::instances::{make_instance, Params, Semiring};
use crate::lab::equation_disagrees;

/// Claimed A13 status per catalog instance: `(name, claimed_holds,
/// adjudicated)`. Adjudicated rows carry a stored candidate assignment that
/// the oracle evaluates directly; the oracle's verdict is the output either
/// way.
pub const A13_CLAIMS: [(&str, bool, bool); 14] = [
    ("bool", true, false),
    ("nat", true, false),
    ("rplus", true, false),
    ("trop", true, false),
    ("fuzz", false, false),
    ("tvl", false, false),
    ("security", false, false),
    ("sprime", true, false),
    ("natpoly", true, true),
    ("boolpoly", true, true),
    ("posbool", false, false),
    ("boolexpr", true, false),
    ("why", true, true),
    ("trio", true, true),
];

/// The stored candidate assignment `(a, b, c)` for an adjudicated row, in
/// the instance's literal grammar.
pub fn candidate_triple(name: &str) -> Option<[&'static str; 3]> {
    match name {
        "natpoly" | "boolpoly" => Some(["x + 1", "x", "1"]),
        "why" => Some(["{{x},{}}", "{{x}}", "{{}}"]),
        "trio" => Some(["{x} + {}", "{x}", "{}"]),
        _ => None,
    }
}

pub fn claim_for(name: &str) -> Option<(bool, bool)> {
    A13_CLAIMS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, holds, adj)| (*holds, *adj))
}

#[derive(Clone, Debug)]
pub struct ClassificationRow {
    /// Catalog name of the instance the row is about.
    pub name: String,
    /// The instance the check actually ran on (the finite grid proxy for
    /// fuzz, the parameterized instances elsewhere).
    pub instance: Arc<Semiring>,
    /// Human-readable description of how the verdict was obtained.
    pub strategy: String,
    pub verdict: Verdict,
    pub claimed_holds: bool,
    pub adjudicated: bool,
}

impl ClassificationRow {
    /// Whether the computed verdict matches the claimed column.
    pub fn agrees(&self) -> Option<bool> {
        match &self.verdict {
            Verdict::HoldsExhaustive | Verdict::HoldsSampled { .. } => Some(self.claimed_holds),
            Verdict::Fails { .. } => Some(!self.claimed_holds),
            Verdict::Inapplicable { .. } => None,
        }
    }

    pub fn record_line(&self) -> String {
        let agree = match self.agrees() {
            Some(true) => "yes",
            Some(false) => "no",
            None => "n/a",
        };
        format!(
            "table3 instance={} claimed={} verdict={} strategy=\"{}\" agree={} adjudicated={}",
            self.name,
            if self.claimed_holds { "holds" } else { "fails" },
            verdict_word(&self.verdict),
            self.strategy,
            agree,
            if self.adjudicated { "yes" } else { "no" },
        )
    }
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::HoldsExhaustive => "holds-exhaustive",
        Verdict::HoldsSampled { .. } => "holds-sampled",
        Verdict::Fails { .. } => "fails",
        Verdict::Inapplicable { .. } => "inapplicable",
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub seed: u64,
    pub rows: Vec<ClassificationRow>,
}

impl ClassificationReport {
    pub fn row(&self, name: &str) -> Option<&ClassificationRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn disagreements(&self) -> Vec<&ClassificationRow> {
        self.rows
            .iter()
            .filter(|r| r.agrees() == Some(false))
            .collect()
    }

    /// Two-column summary plus one verdict line per instance.
    pub fn render(&self) -> String {
        let mut holds = Vec::new();
        let mut fails = Vec::new();
        for r in &self.rows {
            match &r.verdict {
                Verdict::Fails { .. } => fails.push(r.name.as_str()),
                Verdict::HoldsExhaustive | Verdict::HoldsSampled { .. } => {
                    holds.push(r.name.as_str())
                }
                Verdict::Inapplicable { .. } => {}
            }
        }
        let mut out = String::new();
        out.push_str(&format!(
            "A13 classification of the built-in m-semirings (seed {:#x})\n\n",
            self.seed
        ));
        out.push_str(&format!("  satisfies A13:  {}\n", holds.join(" ")));
        out.push_str(&format!("  violates A13:   {}\n\n", fails.join(" ")));
        for r in &self.rows {
            let agree = match r.agrees() {
                Some(true) => "agrees with claim".to_string(),
                Some(false) => format!(
                    "DISAGREES with claim ({}){}",
                    if r.claimed_holds { "holds" } else { "fails" },
                    if r.adjudicated { ", adjudicated" } else { "" }
                ),
                None => "no verdict".to_string(),
            };
            out.push_str(&format!(
                "  {:<9} {:<17} via {:<34} {}\n",
                r.name,
                verdict_word(&r.verdict),
                r.strategy,
                agree
            ));
            if let Verdict::Fails {
                witness: Witness::Scalar(w),
            } = &r.verdict
            {
                out.push_str(&format!(
                    "  {:<9}   witness a={}, b={}, c={}: {} vs {}\n",
                    "",
                    r.instance.print(&w.env[0]),
                    r.instance.print(&w.env[1]),
                    r.instance.print(&w.env[2]),
                    r.instance.print(&w.lhs),
                    r.instance.print(&w.rhs),
                ));
            }
        }
        let disagreements = self.disagreements();
        if disagreements.is_empty() {
            out.push_str("\nall verdicts agree with the claimed classification\n");
        } else {
            out.push_str(&format!(
                "\n{} disagreement(s) with the claimed classification: {}\n",
                disagreements.len(),
                disagreements
                    .iter()
                    .map(|r| r.name.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
        }
        out
    }
}

const SAMPLED_TRIALS: u32 = 10_000;

fn default_instance(name: &str) -> Arc<Semiring> {
    let params = match name {
        "natpoly" | "boolpoly" | "posbool" | "why" | "trio" => {
            Params::with_vars(&["x", "y", "z"])
        }
        "boolexpr" => Params::with_vars(&["x", "y"]),
        _ => Params::default(),
    };
    make_instance(name, params).expect("built-in instances pass the gate")
}

/// Classify every built-in m-semiring for A13.
///
/// Finite instances are checked exhaustively; fuzz is checked exhaustively
/// on its finite grid; the countable instances run 10^4 seeded samples. The
/// adjudicated rows first evaluate their stored candidate assignment, which
/// decides the verdict deterministically when it disagrees.
pub fn classify_builtins(seed: u64) -> ClassificationReport {
    let rows = A13_CLAIMS
        .iter()
        .map(|(name, claimed_holds, adjudicated)| {
            let (instance, strategy, verdict) = classify_one(name, seed);
            ClassificationRow {
                name: name.to_string(),
                instance,
                strategy,
                verdict,
                claimed_holds: *claimed_holds,
                adjudicated: *adjudicated,
            }
        })
        .collect();
    ClassificationReport { seed, rows }
}

fn classify_one(name: &str, seed: u64) -> (Arc<Semiring>, String, Verdict) {
    if let Some(triple) = candidate_triple(name) {
        let sr = default_instance(name);
        let env: Vec<_> = triple
            .iter()
            .map(|t| sr.parse(t).expect("stored candidate parses"))
            .collect();
        let eq = AxiomId::A13.equation();
        if let Some((lhs, rhs)) = equation_disagrees(&sr, &eq, DiffSemantics::Monus, &env) {
            let strategy = format!("stored candidate (a={}, b={}, c={})", triple[0], triple[1], triple[2]);
            let verdict = Verdict::Fails {
                witness: Witness::Scalar(ScalarWitness { env, lhs, rhs }),
            };
            return (sr, strategy, verdict);
        }
        // candidate passed; fall through to sampling for the verdict
        let report = check_axiom(&sr, AxiomId::A13, CheckStrategy::sampled(SAMPLED_TRIALS, seed));
        return (
            sr,
            format!("stored candidate passed + sampled({SAMPLED_TRIALS})"),
            report.verdict,
        );
    }
    match name {
        "bool" | "tvl" | "security" | "sprime" => {
            let sr = default_instance(name);
            let report = check_axiom(&sr, AxiomId::A13, CheckStrategy::Exhaustive);
            (sr, "exhaustive".to_string(), report.verdict)
        }
        "fuzz" => {
            let grid = make_instance("fuzz-grid", Params::with_bound(4))
                .expect("grid registers");
            let report = check_axiom(&grid, AxiomId::A13, CheckStrategy::Exhaustive);
            (
                grid,
                "exhaustive on the finite grid fuzz-grid(4)".to_string(),
                report.verdict,
            )
        }
        _ => {
            let sr = default_instance(name);
            let report = check_axiom(&sr, AxiomId::A13, CheckStrategy::sampled(SAMPLED_TRIALS, seed));
            (sr, format!("sampled({SAMPLED_TRIALS})"), report.verdict)
        }
    }
}
