//! Labeled verification checks attached to constructed certificates.
//!
//! Operations that return certificate data record what they verified as a
//! list of [`Check`]s.  A check keeps the underlying operands where
//! possible, so callers (in particular the CLI's self test) can recompute
//! the verdict pointwise, by direct evaluation over all assignments,
//! independently of the canonical engine's handle comparisons.

use crate::store::{CanonicalFn, TermStore};
use crate::term::{Assignment, TermError};

/// What a check asserted, with enough data to recompute it.
#[derive(Clone, Debug)]
pub enum CheckKind {
    /// `lhs ≤ rhs` pointwise; operands share a context.
    Leq(CanonicalFn, CanonicalFn),
    /// `lhs = rhs` pointwise; operands share a context.
    EqualFn(CanonicalFn, CanonicalFn),
    /// Two counts that must agree.
    EqualCount(u128, u128),
    /// An opaque boolean established by the operation itself.
    Flag(bool),
}

/// One verified assertion inside a certificate.
#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub ok: bool,
    pub kind: CheckKind,
}

impl Check {
    pub fn leq(
        store: &mut TermStore,
        label: impl Into<String>,
        lhs: &CanonicalFn,
        rhs: &CanonicalFn,
    ) -> Result<Check, TermError> {
        let ok = store.leq(lhs, rhs)?;
        Ok(Check {
            label: label.into(),
            ok,
            kind: CheckKind::Leq(lhs.clone(), rhs.clone()),
        })
    }

    pub fn equal_fn(
        store: &mut TermStore,
        label: impl Into<String>,
        lhs: &CanonicalFn,
        rhs: &CanonicalFn,
    ) -> Result<Check, TermError> {
        let ok = store.equal(lhs, rhs)?;
        Ok(Check {
            label: label.into(),
            ok,
            kind: CheckKind::EqualFn(lhs.clone(), rhs.clone()),
        })
    }

    pub fn equal_count(label: impl Into<String>, lhs: u128, rhs: u128) -> Check {
        Check {
            label: label.into(),
            ok: lhs == rhs,
            kind: CheckKind::EqualCount(lhs, rhs),
        }
    }

    pub fn flag(label: impl Into<String>, ok: bool) -> Check {
        Check { label: label.into(), ok, kind: CheckKind::Flag(ok) }
    }

    /// Recomputes the verdict by brute-force evaluation where the check
    /// carries operands, or replays the stored flag otherwise.  Returns the
    /// independently recomputed verdict.
    pub fn recompute(&self, store: &mut TermStore) -> Result<bool, TermError> {
        match &self.kind {
            CheckKind::Leq(a, b) => {
                let merged = a.ctx().union_ordered(b.ctx())?;
                let wa = store.widen(a, &merged)?;
                let wb = store.widen(b, &merged)?;
                for asg in Assignment::all(&merged) {
                    if store.evaluate(&wa, &asg)? && !store.evaluate(&wb, &asg)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            CheckKind::EqualFn(a, b) => {
                let merged = a.ctx().union_ordered(b.ctx())?;
                let wa = store.widen(a, &merged)?;
                let wb = store.widen(b, &merged)?;
                for asg in Assignment::all(&merged) {
                    if store.evaluate(&wa, &asg)? != store.evaluate(&wb, &asg)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            CheckKind::EqualCount(a, b) => Ok(a == b),
            CheckKind::Flag(ok) => Ok(*ok),
        }
    }
}

/// True when every check in the slice passed.
pub fn all_ok(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.ok)
}
