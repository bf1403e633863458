//! Report serialization: stable one-line records for scripting and a
//! human-readable rendering.

use crate::algebra::{CheckReport, Verdict, Witness};
use crate::krel::io::render_tuple;
use crate::krel::KRelation;

/// Variable names used when printing witnesses (arity is at most 3).
const VAR_NAMES: [&str; 3] = ["a", "b", "c"];

/// Inline text of a relation: `{(a=0) : 2; (a=1) : 3}`.
pub fn render_relation_inline(rel: &KRelation) -> String {
    let rows: Vec<String> = rel
        .rows()
        .iter()
        .map(|(t, v)| format!("{} : {}", render_tuple(rel.schema(), t), rel.semiring().print(v)))
        .collect();
    format!("{{{}}}", rows.join("; "))
}

pub fn verdict_label(v: &Verdict) -> String {
    match v {
        Verdict::HoldsExhaustive => "holds-exhaustive".to_string(),
        Verdict::HoldsSampled { trials } => format!("holds-sampled({trials})"),
        Verdict::Fails { .. } => "fails".to_string(),
        Verdict::Inapplicable { reason } => format!("inapplicable({reason})"),
    }
}

/// One line per check, with a stable field order:
/// `check subject=.. instance=.. semantics=.. strategy=.. verdict=.. [witness..]`.
pub fn record_line(r: &CheckReport) -> String {
    let mut line = format!(
        "check subject={} instance={} semantics={} strategy={} verdict={}",
        r.subject.label(),
        r.instance.name(),
        r.semantics.label(),
        r.strategy.label(),
        verdict_label(&r.verdict),
    );
    if let Verdict::Fails { witness } = &r.verdict {
        match witness {
            Witness::Scalar(w) => {
                let binds: Vec<String> = w
                    .env
                    .iter()
                    .enumerate()
                    .map(|(i, v)| format!("{}={}", VAR_NAMES[i], r.instance.print(v)))
                    .collect();
                line.push_str(&format!(
                    " witness=\"{}\" lhs=\"{}\" rhs=\"{}\"",
                    binds.join(", "),
                    r.instance.print(&w.lhs),
                    r.instance.print(&w.rhs),
                ));
            }
            Witness::Relational(w) => {
                let names = ["R", "S", "T"];
                let binds: Vec<String> = w
                    .db
                    .iter()
                    .enumerate()
                    .map(|(i, rel)| format!("{}={}", names[i], render_relation_inline(rel)))
                    .collect();
                line.push_str(&format!(
                    " witness=\"{}\" lhs=\"{}\" rhs=\"{}\"",
                    binds.join("; "),
                    render_relation_inline(&w.lhs),
                    render_relation_inline(&w.rhs),
                ));
            }
        }
    }
    line
}

/// Multi-line human rendering of one report.
pub fn render_human(r: &CheckReport) -> String {
    let mut out = format!(
        "{} on {} [{} difference, {}]: {}\n",
        r.subject.label(),
        r.instance.name(),
        r.semantics.label(),
        r.strategy.label(),
        verdict_label(&r.verdict),
    );
    if let Verdict::Fails { witness } = &r.verdict {
        match witness {
            Witness::Scalar(w) => {
                for (i, v) in w.env.iter().enumerate() {
                    out.push_str(&format!("  {} = {}\n", VAR_NAMES[i], r.instance.print(v)));
                }
                out.push_str(&format!(
                    "  left side  = {}\n  right side = {}\n",
                    r.instance.print(&w.lhs),
                    r.instance.print(&w.rhs)
                ));
            }
            Witness::Relational(w) => {
                let names = ["R", "S", "T"];
                for (i, rel) in w.db.iter().enumerate() {
                    out.push_str(&format!(
                        "  {} = {}\n",
                        names[i],
                        render_relation_inline(rel)
                    ));
                }
                out.push_str(&format!(
                    "  left side  = {}\n  right side = {}\n",
                    render_relation_inline(&w.lhs),
                    render_relation_inline(&w.rhs)
                ));
            }
        }
    }
    out
}
