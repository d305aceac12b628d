//! Generator contexts, assignments, and term syntax for free Boolean
//! algebras on finitely many named generators.
//!
//! A [`GeneratorContext`] is a finite *ordered* list of distinct generator
//! names.  The order is significant: it fixes the variable order of the
//! canonical decision diagrams built in [`crate::store`], and it fixes the
//! enumeration order of assignments and atoms everywhere else.
//!
//! A [`Term`] is a finitary Boolean expression over named generators with
//! n-ary meets and joins; the empty meet denotes top and the empty join
//! denotes bottom.  Implication and bi-implication are provided as sugar
//! and desugar on construction, so the tree only ever contains the six
//! primitive forms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Errors raised by context bookkeeping, term manipulation, and the
/// canonical-function store.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    /// A context was given the same generator name twice.
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    /// A term or operation referred to a generator absent from the context.
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    /// Two canonical functions from different stores were combined.
    #[error("operands belong to different stores")]
    StoreMismatch,
    /// Two contexts order a pair of shared generators inconsistently, so no
    /// common widening exists.
    #[error("contexts order generators `{0}` and `{1}` inconsistently")]
    ContextMismatch(String, String),
    /// An n-ary meet or join exceeded the store's arity cap.
    #[error("connective arity {arity} exceeds cap {cap}")]
    ArityCapExceeded { arity: usize, cap: usize },
}

/// A finite ordered list of distinct generator names.
///
/// Contexts are cheap to clone (the name list is shared) and compare by
/// name sequence.  All orderings derived from a context — decision-diagram
/// variable order, assignment enumeration, atom listings — follow the
/// generator order given at construction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorContext {
    names: Arc<[String]>,
}

impl GeneratorContext {
    /// Builds a context from a list of names, rejecting duplicates.
    pub fn new<I, S>(names: I) -> Result<Self, TermError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(TermError::DuplicateGenerator(n.clone()));
            }
        }
        Ok(GeneratorContext { names: names.into() })
    }

    /// The empty context.
    pub fn empty() -> Self {
        GeneratorContext { names: Vec::new().into() }
    }

    /// The context with generators named `"0"`, `"1"`, …, `"n-1"`.
    pub fn numbered(n: usize) -> Self {
        GeneratorContext {
            names: (0..n).map(|i| i.to_string()).collect::<Vec<_>>().into(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Position of `name` in the context, if present.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    /// True when `self` occurs inside `other` as a subsequence, i.e. `other`
    /// contains every generator of `self` in the same relative order.
    pub fn embeds_in(&self, other: &GeneratorContext) -> bool {
        let mut j = 0;
        for n in self.names.iter() {
            match other.names[j..].iter().position(|m| m == n) {
                Some(k) => j += k + 1,
                None => return false,
            }
        }
        true
    }

    /// Merges two contexts into a common widening that preserves the
    /// relative order of both.  Fails when the contexts order some pair of
    /// shared generators inconsistently.
    pub fn union_ordered(&self, other: &GeneratorContext) -> Result<Self, TermError> {
        if self == other || other.embeds_in(self) {
            return Ok(self.clone());
        }
        if self.embeds_in(other) {
            return Ok(other.clone());
        }
        let common_a: Vec<&String> =
            self.names.iter().filter(|n| other.contains(n)).collect();
        let common_b: Vec<&String> =
            other.names.iter().filter(|n| self.contains(n)).collect();
        if let Some(k) = (0..common_a.len()).find(|&k| common_a[k] != common_b[k]) {
            return Err(TermError::ContextMismatch(
                common_a[k].clone(),
                common_b[k].clone(),
            ));
        }
        let (a, b) = (&self.names, &other.names);
        let mut out: Vec<String> = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if i < a.len() && !other.contains(&a[i]) {
                out.push(a[i].clone());
                i += 1;
            } else if j < b.len() && !self.contains(&b[j]) {
                out.push(b[j].clone());
                j += 1;
            } else {
                // Both cursors sit on the same shared generator.
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
        Ok(GeneratorContext { names: out.into() })
    }

    /// Concatenates two contexts with disjoint name sets.
    pub fn concat(&self, other: &GeneratorContext) -> Result<Self, TermError> {
        let mut names: Vec<String> = self.names.to_vec();
        for n in other.names.iter() {
            if self.contains(n) {
                return Err(TermError::DuplicateGenerator(n.clone()));
            }
            names.push(n.clone());
        }
        Ok(GeneratorContext { names: names.into() })
    }

    /// The subcontext of generators not present in `other`, in order.
    pub fn difference(&self, other: &GeneratorContext) -> Self {
        GeneratorContext {
            names: self
                .names
                .iter()
                .filter(|n| !other.contains(n))
                .cloned()
                .collect::<Vec<_>>()
                .into(),
        }
    }

    /// The subcontext of generators also present in `other`, in order.
    pub fn intersection(&self, other: &GeneratorContext) -> Self {
        GeneratorContext {
            names: self
                .names
                .iter()
                .filter(|n| other.contains(n))
                .cloned()
                .collect::<Vec<_>>()
                .into(),
        }
    }

    /// Appends `suffix` to every generator name.
    pub fn with_suffix(&self, suffix: &str) -> Self {
        GeneratorContext {
            names: self
                .names
                .iter()
                .map(|n| format!("{n}{suffix}"))
                .collect::<Vec<_>>()
                .into(),
        }
    }

    /// The context of primed copies `x'` of every generator.
    pub fn primed(&self) -> Self {
        self.with_suffix("'")
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.names.iter()
    }
}

impl fmt::Debug for GeneratorContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.names.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for GeneratorContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A total two-valued assignment to the generators of a context.
///
/// Assignments order their bits by the context's generator order and compare
/// lexicographically in that order (earlier generators are more significant).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    ctx: GeneratorContext,
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(ctx: GeneratorContext, bits: Vec<bool>) -> Self {
        assert_eq!(ctx.len(), bits.len(), "assignment arity mismatch");
        Assignment { ctx, bits }
    }

    /// The assignment over `ctx` whose bits spell `index` in binary, with the
    /// first generator as the most significant bit.  `index` ranges over
    /// `0..2^ctx.len()`, matching lexicographic enumeration order.
    pub fn from_index(ctx: GeneratorContext, index: usize) -> Self {
        let n = ctx.len();
        let bits = (0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect();
        Assignment { ctx, bits }
    }

    /// Inverse of [`Assignment::from_index`].
    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn ctx(&self) -> &GeneratorContext {
        &self.ctx
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.ctx.position(name).map(|i| self.bits[i])
    }

    /// Restriction of the assignment to a subcontext (by name).
    pub fn restrict(&self, sub: &GeneratorContext) -> Result<Assignment, TermError> {
        let bits = sub
            .iter()
            .map(|n| {
                self.get(n)
                    .ok_or_else(|| TermError::UnknownGenerator(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Assignment { ctx: sub.clone(), bits })
    }

    /// All `2^n` assignments over `ctx` in lexicographic order.
    pub fn all(ctx: &GeneratorContext) -> Vec<Assignment> {
        assert!(ctx.len() < usize::BITS as usize, "context too large to enumerate");
        (0..1usize << ctx.len())
            .map(|i| Assignment::from_index(ctx.clone(), i))
            .collect()
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.ctx.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}:{}", u8::from(self.bits[i]))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A Boolean term over named generators.
///
/// `Meet` and `Join` are finitary; `Meet(vec![])` denotes top and
/// `Join(vec![])` denotes bottom.  Terms are plain syntax: two terms that
/// denote the same function are distinct values until evaluated into a
/// store.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Gen(String),
    Top,
    Bot,
    Not(Box<Term>),
    Meet(Vec<Term>),
    Join(Vec<Term>),
}

impl Term {
    pub fn gen(name: impl Into<String>) -> Term {
        Term::Gen(name.into())
    }

    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn meet(ts: Vec<Term>) -> Term {
        Term::Meet(ts)
    }

    pub fn join(ts: Vec<Term>) -> Term {
        Term::Join(ts)
    }

    /// Implication sugar: `imp(a, b)` desugars to `¬a ∨ b`.
    pub fn imp(a: Term, b: Term) -> Term {
        Term::Join(vec![Term::not(a), b])
    }

    /// Bi-implication sugar: `iff(a, b)` desugars to `(a → b) ∧ (b → a)`.
    pub fn iff(a: Term, b: Term) -> Term {
        Term::Meet(vec![Term::imp(a.clone(), b.clone()), Term::imp(b, a)])
    }

    /// Generator names occurring in the term, in order of first occurrence.
    pub fn generators(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_generators(&mut out);
        out
    }

    fn collect_generators(&self, out: &mut Vec<String>) {
        match self {
            Term::Gen(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Term::Top | Term::Bot => {}
            Term::Not(t) => t.collect_generators(out),
            Term::Meet(ts) | Term::Join(ts) => {
                for t in ts {
                    t.collect_generators(out);
                }
            }
        }
    }

    /// Renames generators through `map`, which must cover every generator
    /// occurring in the term.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Result<Term, TermError> {
        Ok(match self {
            Term::Gen(n) => map
                .get(n)
                .ok_or_else(|| TermError::UnknownGenerator(n.clone()))?
                .clone(),
            Term::Top => Term::Top,
            Term::Bot => Term::Bot,
            Term::Not(t) => Term::not(t.substitute(map)?),
            Term::Meet(ts) => Term::Meet(
                ts.iter().map(|t| t.substitute(map)).collect::<Result<_, _>>()?,
            ),
            Term::Join(ts) => Term::Join(
                ts.iter().map(|t| t.substitute(map)).collect::<Result<_, _>>()?,
            ),
        })
    }

    /// Direct truth-table evaluation under an assignment, without any store.
    ///
    /// This is the reference semantics that the canonical engine is measured
    /// against in the test suites.
    pub fn eval_assignment(&self, asg: &Assignment) -> Result<bool, TermError> {
        Ok(match self {
            Term::Gen(n) => asg
                .get(n)
                .ok_or_else(|| TermError::UnknownGenerator(n.clone()))?,
            Term::Top => true,
            Term::Bot => false,
            Term::Not(t) => !t.eval_assignment(asg)?,
            Term::Meet(ts) => {
                let mut acc = true;
                for t in ts {
                    acc &= t.eval_assignment(asg)?;
                }
                acc
            }
            Term::Join(ts) => {
                let mut acc = false;
                for t in ts {
                    acc |= t.eval_assignment(asg)?;
                }
                acc
            }
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Gen(n) => write!(f, "(gen {n})"),
            Term::Top => write!(f, "top"),
            Term::Bot => write!(f, "bot"),
            Term::Not(t) => write!(f, "(not {t})"),
            Term::Meet(ts) => {
                write!(f, "(and")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            Term::Join(ts) => {
                write!(f, "(or")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_rejects_duplicates() {
        let err = GeneratorContext::new(["x", "y", "x"]).unwrap_err();
        assert_eq!(err, TermError::DuplicateGenerator("x".into()));
    }

    #[test]
    fn context_order_is_preserved() {
        let ctx = GeneratorContext::new(["b", "a", "c"]).unwrap();
        assert_eq!(ctx.names(), ["b", "a", "c"]);
        assert_eq!(ctx.position("a"), Some(1));
        assert!(!ctx.contains("d"));
    }

    #[test]
    fn union_ordered_merges_compatible_contexts() {
        let a = GeneratorContext::new(["x", "y"]).unwrap();
        let b = GeneratorContext::new(["y", "z"]).unwrap();
        let u = a.union_ordered(&b).unwrap();
        assert_eq!(u.names(), ["x", "y", "z"]);
    }

    #[test]
    fn union_ordered_rejects_conflicting_orders() {
        let a = GeneratorContext::new(["x", "y"]).unwrap();
        let b = GeneratorContext::new(["y", "x"]).unwrap();
        assert!(matches!(
            a.union_ordered(&b),
            Err(TermError::ContextMismatch(_, _))
        ));
    }

    #[test]
    fn union_ordered_prefers_left_names_first() {
        let a = GeneratorContext::new(["a", "m", "b"]).unwrap();
        let b = GeneratorContext::new(["c", "m", "d"]).unwrap();
        let u = a.union_ordered(&b).unwrap();
        assert_eq!(u.names(), ["a", "c", "m", "b", "d"]);
    }

    #[test]
    fn embeds_in_checks_subsequence() {
        let sub = GeneratorContext::new(["x", "z"]).unwrap();
        let sup = GeneratorContext::new(["x", "y", "z"]).unwrap();
        assert!(sub.embeds_in(&sup));
        assert!(!sup.embeds_in(&sub));
        let rev = GeneratorContext::new(["z", "x"]).unwrap();
        assert!(!rev.embeds_in(&sup));
    }

    #[test]
    fn assignment_roundtrips_through_index() {
        let ctx = GeneratorContext::new(["x", "y", "z"]).unwrap();
        for i in 0..8 {
            let a = Assignment::from_index(ctx.clone(), i);
            assert_eq!(a.index(), i);
        }
        // First generator is the most significant bit.
        let a = Assignment::from_index(ctx, 4);
        assert_eq!(a.bits(), [true, false, false]);
    }

    #[test]
    fn assignment_enumeration_is_lexicographic() {
        let ctx = GeneratorContext::new(["x", "y"]).unwrap();
        let all = Assignment::all(&ctx);
        let shown: Vec<String> = all.iter().map(|a| a.to_string()).collect();
        assert_eq!(shown, ["{x:0,y:0}", "{x:0,y:1}", "{x:1,y:0}", "{x:1,y:1}"]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn sugar_desugars_to_primitive_forms() {
        let x = Term::gen("x");
        let y = Term::gen("y");
        let imp = Term::imp(x.clone(), y.clone());
        assert_eq!(imp, Term::Join(vec![Term::not(x.clone()), y.clone()]));
        let iff = Term::iff(x.clone(), y.clone());
        let asg = |bx: bool, by: bool| {
            Assignment::new(
                GeneratorContext::new(["x", "y"]).unwrap(),
                vec![bx, by],
            )
        };
        for (bx, by) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(iff.eval_assignment(&asg(bx, by)).unwrap(), bx == by);
        }
    }

    #[test]
    fn empty_meet_and_join_are_the_constants() {
        let ctx = GeneratorContext::empty();
        let asg = Assignment::new(ctx, vec![]);
        assert!(Term::Meet(vec![]).eval_assignment(&asg).unwrap());
        assert!(!Term::Join(vec![]).eval_assignment(&asg).unwrap());
    }

    #[test]
    fn substitution_misses_are_reported() {
        let t = Term::meet(vec![Term::gen("x"), Term::gen("y")]);
        let mut map = BTreeMap::new();
        map.insert("x".to_string(), Term::gen("u"));
        assert_eq!(
            t.substitute(&map).unwrap_err(),
            TermError::UnknownGenerator("y".into())
        );
    }

    #[test]
    fn display_round_trips_structure() {
        let t = Term::join(vec![
            Term::meet(vec![Term::gen("x"), Term::not(Term::gen("y"))]),
            Term::Bot,
        ]);
        assert_eq!(t.to_string(), "(or (and (gen x) (not (gen y))) bot)");
        assert_eq!(Term::Meet(vec![]).to_string(), "(and)");
    }
}
