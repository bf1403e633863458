//! Expected verdicts, for distinguishing an unsurprising failure (A13 on the
//! security chain is supposed to fail) from a genuinely unexpected one.
//!
//! Expectations mirror the claimed classification plus the structural facts
//! about the alternative difference semantics. Rows under adjudication are
//! `Reported`: whatever the oracle computes is the answer, and no verdict on
//! them is "unexpected".

use crate::algebra::{AxiomId, CheckReport, DiffSemantics, IdentityId, Subject, Verdict};
use crate::instances::Semiring;
use crate::lab::table3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    MustHold,
    MustFail,
    /// Observed status is recorded, never unexpected.
    Reported,
}

/// Whether the instance has at most one nonzero element (the boolean
/// degeneracy, where conditioned difference coincides with the monus).
fn at_most_one_nonzero(sr: &Semiring) -> bool {
    sr.elements().is_some_and(|e| e.len() <= 2)
}

/// Zero-sum-freeness: `a + b = 0` only for `a = b = 0`. Finite carriers are
/// scanned; countable built-ins are zero-sum-free exactly when they lack
/// negation.
fn zero_sum_free(sr: &Semiring) -> bool {
    match sr.elements() {
        Some(elems) => {
            let zero = sr.zero();
            elems.iter().all(|a| {
                elems
                    .iter()
                    .all(|b| sr.add(a, b) != zero || (*a == zero && *b == zero))
            })
        }
        None => !sr.has_negate(),
    }
}

pub fn expected_axiom(sr: &Semiring, ax: AxiomId, sem: DiffSemantics) -> Expectation {
    if !ax.uses_diff() {
        return Expectation::MustHold;
    }
    match sem {
        DiffSemantics::Monus => match ax {
            AxiomId::A13 => match table3::claim_for(sr.base_name()) {
                Some((_, true)) => Expectation::Reported,
                Some((true, false)) => Expectation::MustHold,
                Some((false, false)) => Expectation::MustFail,
                _ => Expectation::Reported,
            },
            _ => Expectation::MustHold,
        },
        DiffSemantics::RingSubtract => match ax {
            AxiomId::A10 | AxiomId::A11 => Expectation::MustFail,
            _ => Expectation::MustHold,
        },
        DiffSemantics::Conditioned => match ax {
            AxiomId::A9 | AxiomId::A10 => Expectation::MustHold,
            AxiomId::A11 => {
                if at_most_one_nonzero(sr) {
                    Expectation::MustHold
                } else {
                    Expectation::MustFail
                }
            }
            AxiomId::A12 => {
                if zero_sum_free(sr) {
                    Expectation::MustHold
                } else {
                    Expectation::Reported
                }
            }
            _ => Expectation::Reported,
        },
    }
}

pub fn expected_identity(sr: &Semiring, id: IdentityId, sem: DiffSemantics) -> Expectation {
    match id.paired_axiom() {
        Some(ax) => expected_axiom(sr, ax, sem),
        None => match id {
            IdentityId::Ext2 => Expectation::MustHold,
            _ => Expectation::Reported,
        },
    }
}

/// Whether a report's verdict is consistent with its expectation. An
/// inapplicable check is never unexpected.
pub fn verdict_expected(report: &CheckReport) -> bool {
    let expectation = match &report.subject {
        Subject::Axiom(ax) => expected_axiom(&report.instance, *ax, report.semantics),
        Subject::Identity(id) => expected_identity(&report.instance, *id, report.semantics),
        Subject::Galois => Expectation::MustHold,
    };
    match (&report.verdict, expectation) {
        (Verdict::Inapplicable { .. }, _) => true,
        (_, Expectation::Reported) => true,
        (v, Expectation::MustHold) => v.holds(),
        (v, Expectation::MustFail) => v.fails(),
    }
}
