//! Relational languages, almost-quantifier-free formulas, finite models,
//! and a decision procedure for the theory of a two-element object.
//!
//! Formulas carry their free-variable context explicitly and allow only
//! negation, finite meets/joins, equality, relation atoms, and existential
//! quantification.  Interpretation in a finite model follows the guarded
//! semantics: an existential is interpretable only when the projection of
//! the body's interpretation is injective, and the violating pair of
//! tuples is reported otherwise.
//!
//! The fixed theory `T2` has one unary symbol `RT` and four axioms saying
//! that `RT` carves the carrier into two one-point blocks.  Over `T2`,
//! every almost-quantifier-free formula translates into the free algebra
//! on its context ([`t2_translate`]): relation atoms become generators,
//! equalities become biconditionals of generators, and a provably-unique
//! existential is eliminated by synthesizing the retraction that defines
//! the bound variables explicitly.  [`reify`] is a section of the
//! translation, giving quantifier-and-equality elimination ([`t2_qe`]) and
//! a sound, complete provability test ([`t2_proves`]) that produces a
//! two-element countermodel on failure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::check::{all_ok, Check};
use crate::interpolation::{
    check_star, synthesize_retraction, InterpolationError, RetractionProblem, StarOutcome,
};
use crate::store::{CanonicalFn, TermStore};
use crate::term::{Assignment, GeneratorContext, TermError};

/// The relation symbol of the two-element theory.
pub const T2_SYMBOL: &str = "RT";

#[derive(Debug, Clone, Error)]
pub enum LogicError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Interpolation(#[from] InterpolationError),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("relation symbol {0} is not in the language")]
    SymbolMissing(String),
    #[error("symbol {symbol} expects {expected} arguments, got {got}")]
    ArityMismatch { symbol: String, expected: usize, got: usize },
    #[error("relation symbol {0} declared twice")]
    DuplicateSymbol(String),
    #[error("contexts disagree: {0}")]
    ContextMismatch(String),
    #[error("bound contexts overlap at {0}")]
    ContextOverlap(String),
    /// An existential failed its uniqueness check; the two assignments
    /// satisfy the body and agree outside the bound variables.
    #[error("existential is not provably unique: {left} and {right} both satisfy the body")]
    NotAqf { subformula: Formula, left: Assignment, right: Assignment },
    /// A formula was asked for its interpretation where none exists; the
    /// two body tuples collapse under the existential projection.
    #[error("formula is not interpretable: tuples {left:?} and {right:?} collapse under projection")]
    NotInterpretable { left: Vec<usize>, right: Vec<usize> },
    #[error("invalid model data: {0}")]
    BadModel(String),
    #[error("internal verification failed: {0}")]
    Internal(String),
}

// ---------------------------------------------------------------------
// Languages
// ---------------------------------------------------------------------

/// A relational language: each symbol has a finite arity context naming
/// its argument positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    symbols: BTreeMap<String, GeneratorContext>,
}

impl Language {
    pub fn new() -> Language {
        Language { symbols: BTreeMap::new() }
    }

    pub fn with_symbol(
        mut self,
        name: impl Into<String>,
        arity: GeneratorContext,
    ) -> Result<Language, LogicError> {
        let name = name.into();
        if self.symbols.contains_key(&name) {
            return Err(LogicError::DuplicateSymbol(name));
        }
        self.symbols.insert(name, arity);
        Ok(self)
    }

    pub fn arity(&self, name: &str) -> Option<&GeneratorContext> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&String, &GeneratorContext)> {
        self.symbols.iter()
    }
}

impl Default for Language {
    fn default() -> Self {
        Language::new()
    }
}

/// The language of [`t2_theory`]: one unary relation symbol.
pub fn t2_language() -> Language {
    Language::new()
        .with_symbol(T2_SYMBOL, GeneratorContext::numbered(1))
        .expect("fresh language")
}

// ---------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------

/// The node shapes of a formula.  Empty meets and joins serve as the
/// constants: `BigMeet([])` is truth, `BigJoin([])` is falsity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FormulaKind {
    Rel { symbol: String, args: Vec<String> },
    Eq(String, String),
    Not(Formula),
    BigMeet(Vec<Formula>),
    BigJoin(Vec<Formula>),
    /// Existential quantification.  The body lives over the union of the
    /// bound context and the node's own context; the two may overlap, in
    /// which case the overlapping names are rebound.
    Exists { bound: GeneratorContext, body: Formula },
}

/// A formula together with its explicit free-variable context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    ctx: GeneratorContext,
    kind: Arc<FormulaKind>,
}

impl Formula {
    pub fn ctx(&self) -> &GeneratorContext {
        &self.ctx
    }

    pub fn kind(&self) -> &FormulaKind {
        &self.kind
    }

    fn mk(ctx: GeneratorContext, kind: FormulaKind) -> Formula {
        Formula { ctx, kind: Arc::new(kind) }
    }

    pub fn rel(
        ctx: &GeneratorContext,
        symbol: impl Into<String>,
        args: &[&str],
    ) -> Result<Formula, LogicError> {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        for a in &args {
            if !ctx.contains(a) {
                return Err(LogicError::UnknownVariable(a.clone()));
            }
        }
        Ok(Formula::mk(ctx.clone(), FormulaKind::Rel { symbol: symbol.into(), args }))
    }

    pub fn eq(ctx: &GeneratorContext, x: &str, y: &str) -> Result<Formula, LogicError> {
        for v in [x, y] {
            if !ctx.contains(v) {
                return Err(LogicError::UnknownVariable(v.to_string()));
            }
        }
        Ok(Formula::mk(ctx.clone(), FormulaKind::Eq(x.to_string(), y.to_string())))
    }

    pub fn not(f: Formula) -> Formula {
        let ctx = f.ctx.clone();
        Formula::mk(ctx, FormulaKind::Not(f))
    }

    fn shared_ctx(
        ctx: &GeneratorContext,
        items: &[Formula],
    ) -> Result<(), LogicError> {
        for f in items {
            if &f.ctx != ctx {
                return Err(LogicError::ContextMismatch(format!(
                    "subformula context {:?} differs from {:?}",
                    f.ctx.names(),
                    ctx.names()
                )));
            }
        }
        Ok(())
    }

    pub fn big_meet(
        ctx: &GeneratorContext,
        items: Vec<Formula>,
    ) -> Result<Formula, LogicError> {
        Self::shared_ctx(ctx, &items)?;
        Ok(Formula::mk(ctx.clone(), FormulaKind::BigMeet(items)))
    }

    pub fn big_join(
        ctx: &GeneratorContext,
        items: Vec<Formula>,
    ) -> Result<Formula, LogicError> {
        Self::shared_ctx(ctx, &items)?;
        Ok(Formula::mk(ctx.clone(), FormulaKind::BigJoin(items)))
    }

    pub fn top(ctx: &GeneratorContext) -> Formula {
        Formula::mk(ctx.clone(), FormulaKind::BigMeet(Vec::new()))
    }

    pub fn bot(ctx: &GeneratorContext) -> Formula {
        Formula::mk(ctx.clone(), FormulaKind::BigJoin(Vec::new()))
    }

    pub fn implies(a: Formula, b: Formula) -> Result<Formula, LogicError> {
        let ctx = a.ctx.clone();
        Formula::big_join(&ctx, vec![Formula::not(a), b])
    }

    pub fn iff(a: Formula, b: Formula) -> Result<Formula, LogicError> {
        let ctx = a.ctx.clone();
        let fwd = Formula::implies(a.clone(), b.clone())?;
        let bwd = Formula::implies(b, a)?;
        Formula::big_meet(&ctx, vec![fwd, bwd])
    }

    /// Existential quantification with an explicit outer context.  The
    /// body's context must equal `bound ∪ outer` as a set of names.
    pub fn exists(
        bound: &GeneratorContext,
        outer: &GeneratorContext,
        body: Formula,
    ) -> Result<Formula, LogicError> {
        let mut names: BTreeSet<&String> = bound.iter().collect();
        names.extend(outer.iter());
        let body_names: BTreeSet<&String> = body.ctx.iter().collect();
        if names != body_names {
            return Err(LogicError::ContextMismatch(format!(
                "existential body context {:?} must equal bound ∪ outer {:?}",
                body.ctx.names(),
                names
            )));
        }
        Ok(Formula::mk(
            outer.clone(),
            FormulaKind::Exists { bound: bound.clone(), body },
        ))
    }

    /// Existential quantification where the outer context is the body's
    /// context minus the bound names (the usual reading).
    pub fn exists_dropping(
        bound: &GeneratorContext,
        body: Formula,
    ) -> Result<Formula, LogicError> {
        let outer = body.ctx.difference(bound);
        Formula::exists(bound, &outer, body)
    }

    /// True when the formula contains no quantifier and no equality.
    pub fn is_qef(&self) -> bool {
        match self.kind() {
            FormulaKind::Rel { .. } => true,
            FormulaKind::Eq(_, _) => false,
            FormulaKind::Not(f) => f.is_qef(),
            FormulaKind::BigMeet(fs) | FormulaKind::BigJoin(fs) => {
                fs.iter().all(Formula::is_qef)
            }
            FormulaKind::Exists { .. } => false,
        }
    }

    /// Reads the formula in a larger (or reordered) context.
    pub fn weaken(&self, to: &GeneratorContext) -> Result<Formula, LogicError> {
        self.substitute(&BTreeMap::new(), to)
    }

    /// Variable substitution: free occurrences are renamed through `map`
    /// (missing names pass through unchanged) and the result lives over
    /// `to`.  Bound variables that would capture an incoming name are
    /// renamed fresh first.
    pub fn substitute(
        &self,
        map: &BTreeMap<String, String>,
        to: &GeneratorContext,
    ) -> Result<Formula, LogicError> {
        let image = |n: &String| -> Result<String, LogicError> {
            let m = map.get(n).unwrap_or(n);
            if to.contains(m) {
                Ok(m.clone())
            } else {
                Err(LogicError::UnknownVariable(m.clone()))
            }
        };
        let kind = match self.kind() {
            FormulaKind::Rel { symbol, args } => {
                let args = args.iter().map(image).collect::<Result<Vec<_>, _>>()?;
                FormulaKind::Rel { symbol: symbol.clone(), args }
            }
            FormulaKind::Eq(x, y) => FormulaKind::Eq(image(x)?, image(y)?),
            FormulaKind::Not(f) => FormulaKind::Not(f.substitute(map, to)?),
            FormulaKind::BigMeet(fs) => FormulaKind::BigMeet(
                fs.iter().map(|f| f.substitute(map, to)).collect::<Result<_, _>>()?,
            ),
            FormulaKind::BigJoin(fs) => FormulaKind::BigJoin(
                fs.iter().map(|f| f.substitute(map, to)).collect::<Result<_, _>>()?,
            ),
            FormulaKind::Exists { bound, body } => {
                // Rename bound names that collide with the target context.
                let mut taken: BTreeSet<String> = to.iter().cloned().collect();
                taken.extend(body.ctx.iter().cloned());
                let mut inner_map = map.clone();
                let mut new_bound = Vec::with_capacity(bound.len());
                for y in bound.iter() {
                    if to.contains(y) {
                        let mut k = 0usize;
                        let fresh = loop {
                            let cand = format!("{y}#b{k}");
                            if !taken.contains(&cand) {
                                break cand;
                            }
                            k += 1;
                        };
                        taken.insert(fresh.clone());
                        inner_map.insert(y.clone(), fresh.clone());
                        new_bound.push(fresh);
                    } else {
                        inner_map.remove(y);
                        new_bound.push(y.clone());
                    }
                }
                let new_bound = GeneratorContext::new(new_bound)?;
                let inner_ctx = new_bound.concat(&to.difference(&new_bound))?;
                let new_body = body.substitute(&inner_map, &inner_ctx)?;
                return Formula::exists(&new_bound, to, new_body);
            }
        };
        Ok(Formula::mk(to.clone(), kind))
    }
}

fn write_ctx(f: &mut fmt::Formatter<'_>, ctx: &GeneratorContext) -> fmt::Result {
    write!(f, "(")?;
    for (i, n) in ctx.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{n}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            FormulaKind::Rel { symbol, args } => {
                write!(f, "(rel {symbol}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            FormulaKind::Eq(x, y) => write!(f, "(= {x} {y})"),
            FormulaKind::Not(g) => write!(f, "(not {g})"),
            FormulaKind::BigMeet(fs) => {
                write!(f, "(and")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            FormulaKind::BigJoin(fs) => {
                write!(f, "(or")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            FormulaKind::Exists { bound, body } => {
                write!(f, "(exists ")?;
                write_ctx(f, bound)?;
                write!(f, " {body})")
            }
        }
    }
}

/// A universally quantified implication between two formulas over one
/// shared context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub ctx: GeneratorContext,
    pub antecedent: Formula,
    pub consequent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Formula, consequent: Formula) -> Result<Sequent, LogicError> {
        if antecedent.ctx != consequent.ctx {
            return Err(LogicError::ContextMismatch(
                "sequent sides live in different contexts".into(),
            ));
        }
        Ok(Sequent { ctx: antecedent.ctx.clone(), antecedent, consequent })
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(seq ")?;
        write_ctx(f, &self.ctx)?;
        write!(f, " {} {})", self.antecedent, self.consequent)
    }
}

/// A theory: a language plus axioms listed in dependency order (each
/// axiom's existentials are justified by its predecessors).
#[derive(Clone, Debug)]
pub struct Theory {
    pub language: Language,
    pub axioms: Vec<Sequent>,
}

/// The theory of a two-element object: `RT` holds of exactly one element
/// and fails of exactly one element.
pub fn t2_theory() -> Theory {
    let xy = GeneratorContext::new(["x", "y"]).expect("distinct");
    let x1 = GeneratorContext::new(["x"]).expect("distinct");
    let empty = GeneratorContext::empty();
    let rtx = Formula::rel(&xy, T2_SYMBOL, &["x"]).unwrap();
    let rty = Formula::rel(&xy, T2_SYMBOL, &["y"]).unwrap();
    let both = Formula::big_meet(&xy, vec![rtx.clone(), rty.clone()]).unwrap();
    let neither = Formula::big_meet(
        &xy,
        vec![Formula::not(rtx), Formula::not(rty)],
    )
    .unwrap();
    let equal = Formula::eq(&xy, "x", "y").unwrap();
    let rt1 = Formula::rel(&x1, T2_SYMBOL, &["x"]).unwrap();
    let some_true = Formula::exists(&x1, &empty, rt1.clone()).unwrap();
    let some_false = Formula::exists(&x1, &empty, Formula::not(rt1)).unwrap();
    let axioms = vec![
        Sequent::new(both, equal.clone()).unwrap(),
        Sequent::new(neither, equal).unwrap(),
        Sequent::new(Formula::top(&empty), some_true).unwrap(),
        Sequent::new(Formula::top(&empty), some_false).unwrap(),
    ];
    Theory { language: t2_language(), axioms }
}

// ---------------------------------------------------------------------
// Finite models
// ---------------------------------------------------------------------

/// A finite structure: carrier `{0, …, n-1}` plus one tuple set per
/// relation symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinModel {
    language: Language,
    carrier: usize,
    interp: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

impl FinModel {
    pub fn new(
        language: Language,
        carrier: usize,
        interp: BTreeMap<String, BTreeSet<Vec<usize>>>,
    ) -> Result<FinModel, LogicError> {
        let mut filled = BTreeMap::new();
        for (name, arity) in language.symbols() {
            let tuples = interp.get(name).cloned().unwrap_or_default();
            for t in &tuples {
                if t.len() != arity.len() {
                    return Err(LogicError::BadModel(format!(
                        "tuple {t:?} has wrong length for {name}"
                    )));
                }
                if t.iter().any(|&v| v >= carrier) {
                    return Err(LogicError::BadModel(format!(
                        "tuple {t:?} escapes the carrier of size {carrier}"
                    )));
                }
            }
            filled.insert(name.clone(), tuples);
        }
        for name in interp.keys() {
            if language.arity(name).is_none() {
                return Err(LogicError::SymbolMissing(name.clone()));
            }
        }
        Ok(FinModel { language, carrier, interp: filled })
    }

    /// The two-element structure with `RT` holding at the given points.
    pub fn two_element(rt_points: &[usize]) -> FinModel {
        let mut interp = BTreeMap::new();
        interp.insert(
            T2_SYMBOL.to_string(),
            rt_points.iter().map(|&p| vec![p]).collect(),
        );
        FinModel::new(t2_language(), 2, interp).expect("valid two-element structure")
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn relation(&self, name: &str) -> Option<&BTreeSet<Vec<usize>>> {
        self.interp.get(name)
    }
}

impl fmt::Display for FinModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "carrier {}", self.carrier)?;
        for (name, tuples) in &self.interp {
            write!(f, "; {name} = {{")?;
            for (i, t) in tuples.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                if t.len() == 1 {
                    write!(f, "{}", t[0])?;
                } else {
                    write!(f, "{t:?}")?;
                }
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// A subset of the tuples over a context with entries below the carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleSet {
    pub ctx: GeneratorContext,
    pub carrier: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

fn all_tuples(carrier: usize, len: usize) -> Vec<Vec<usize>> {
    assert!(
        (carrier.max(1)).checked_pow(len as u32).is_some_and(|n| n <= 1 << 20),
        "tuple space too large to enumerate"
    );
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * carrier);
        for t in &out {
            for v in 0..carrier {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

impl TupleSet {
    pub fn full(ctx: &GeneratorContext, carrier: usize) -> TupleSet {
        TupleSet {
            ctx: ctx.clone(),
            carrier,
            tuples: all_tuples(carrier, ctx.len()).into_iter().collect(),
        }
    }

    pub fn empty(ctx: &GeneratorContext, carrier: usize) -> TupleSet {
        TupleSet { ctx: ctx.clone(), carrier, tuples: BTreeSet::new() }
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    pub fn is_full(&self) -> bool {
        self.tuples.len() == self.carrier.pow(self.ctx.len() as u32)
    }
}

/// Either the interpretation of a formula, or the reason the guarded
/// existential clause refused to produce one.
#[derive(Clone, Debug)]
pub enum Interpreted {
    Set(TupleSet),
    NotInterpretable { left: Vec<usize>, right: Vec<usize> },
}

enum InterpStop {
    Hard(LogicError),
    Not { left: Vec<usize>, right: Vec<usize> },
}

impl From<TermError> for InterpStop {
    fn from(e: TermError) -> Self {
        InterpStop::Hard(e.into())
    }
}

fn interp(m: &FinModel, phi: &Formula) -> Result<TupleSet, InterpStop> {
    let ctx = phi.ctx();
    let n = m.carrier;
    match phi.kind() {
        FormulaKind::Rel { symbol, args } => {
            let arity = m
                .language
                .arity(symbol)
                .ok_or_else(|| InterpStop::Hard(LogicError::SymbolMissing(symbol.clone())))?;
            if args.len() != arity.len() {
                return Err(InterpStop::Hard(LogicError::ArityMismatch {
                    symbol: symbol.clone(),
                    expected: arity.len(),
                    got: args.len(),
                }));
            }
            let table = m.interp.get(symbol).expect("validated in FinModel::new");
            let positions: Vec<usize> = args
                .iter()
                .map(|a| {
                    ctx.position(a).ok_or_else(|| {
                        InterpStop::Hard(LogicError::UnknownVariable(a.clone()))
                    })
                })
                .collect::<Result<_, _>>()?;
            let mut out = TupleSet::empty(ctx, n);
            for t in all_tuples(n, ctx.len()) {
                let projected: Vec<usize> = positions.iter().map(|&i| t[i]).collect();
                if table.contains(&projected) {
                    out.tuples.insert(t);
                }
            }
            Ok(out)
        }
        FormulaKind::Eq(x, y) => {
            let ix = ctx
                .position(x)
                .ok_or_else(|| InterpStop::Hard(LogicError::UnknownVariable(x.clone())))?;
            let iy = ctx
                .position(y)
                .ok_or_else(|| InterpStop::Hard(LogicError::UnknownVariable(y.clone())))?;
            let mut out = TupleSet::empty(ctx, n);
            for t in all_tuples(n, ctx.len()) {
                if t[ix] == t[iy] {
                    out.tuples.insert(t);
                }
            }
            Ok(out)
        }
        FormulaKind::Not(f) => {
            let inner = interp(m, f)?;
            let mut out = TupleSet::empty(ctx, n);
            for t in all_tuples(n, ctx.len()) {
                if !inner.tuples.contains(&t) {
                    out.tuples.insert(t);
                }
            }
            Ok(out)
        }
        FormulaKind::BigMeet(fs) => {
            let mut out = TupleSet::full(ctx, n);
            for f in fs {
                let s = interp(m, f)?;
                out.tuples = out.tuples.intersection(&s.tuples).cloned().collect();
            }
            Ok(out)
        }
        FormulaKind::BigJoin(fs) => {
            let mut out = TupleSet::empty(ctx, n);
            for f in fs {
                let s = interp(m, f)?;
                out.tuples = out.tuples.union(&s.tuples).cloned().collect();
            }
            Ok(out)
        }
        FormulaKind::Exists { bound, body } => {
            let s = interp(m, body)?;
            let kept = body.ctx().difference(bound);
            let kept_in_body: Vec<usize> = kept
                .iter()
                .map(|k| body.ctx().position(k).expect("kept name is in body"))
                .collect();
            // The projection must be injective on the body's tuples.
            let mut seen: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
            for t in &s.tuples {
                let shadow: Vec<usize> = kept_in_body.iter().map(|&i| t[i]).collect();
                if let Some(prev) = seen.get(&shadow) {
                    return Err(InterpStop::Not { left: prev.clone(), right: t.clone() });
                }
                seen.insert(shadow, t.clone());
            }
            let kept_in_outer: Vec<usize> = kept
                .iter()
                .map(|k| ctx.position(k).expect("kept name is in the outer context"))
                .collect();
            let mut out = TupleSet::empty(ctx, n);
            for t in all_tuples(n, ctx.len()) {
                let shadow: Vec<usize> = kept_in_outer.iter().map(|&i| t[i]).collect();
                if seen.contains_key(&shadow) {
                    out.tuples.insert(t);
                }
            }
            Ok(out)
        }
    }
}

/// Interprets a formula in a finite model under the guarded semantics.
pub fn interpret(m: &FinModel, phi: &Formula) -> Result<Interpreted, LogicError> {
    match interp(m, phi) {
        Ok(s) => Ok(Interpreted::Set(s)),
        Err(InterpStop::Not { left, right }) => Ok(Interpreted::NotInterpretable { left, right }),
        Err(InterpStop::Hard(e)) => Err(e),
    }
}

/// Whether the model satisfies the sequent.  Both sides must be
/// interpretable; otherwise [`LogicError::NotInterpretable`] is raised.
pub fn satisfies(m: &FinModel, s: &Sequent) -> Result<bool, LogicError> {
    let ante = match interpret(m, &s.antecedent)? {
        Interpreted::Set(s) => s,
        Interpreted::NotInterpretable { left, right } => {
            return Err(LogicError::NotInterpretable { left, right });
        }
    };
    let cons = match interpret(m, &s.consequent)? {
        Interpreted::Set(s) => s,
        Interpreted::NotInterpretable { left, right } => {
            return Err(LogicError::NotInterpretable { left, right });
        }
    };
    Ok(ante.is_subset(&cons))
}

/// Whether the structure models the theory: every axiom, taken in order,
/// must be interpretable and satisfied.  An uninterpretable axiom counts
/// as failure (some earlier axiom already failed).
pub fn is_model(m: &FinModel, theory: &Theory) -> Result<bool, LogicError> {
    for ax in &theory.axioms {
        match satisfies(m, ax) {
            Ok(true) => {}
            Ok(false) => return Ok(false),
            Err(LogicError::NotInterpretable { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------
// Translation into the free algebra and back
// ---------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum ExistsMode {
    /// Eliminate via the synthesized retraction; fail if not unique.
    Retraction,
    /// Interpret as plain projection, regardless of uniqueness.
    Projection,
}

fn translate_with(
    store: &mut TermStore,
    phi: &Formula,
    mode: ExistsMode,
) -> Result<CanonicalFn, LogicError> {
    let ctx = phi.ctx();
    match phi.kind() {
        FormulaKind::Rel { symbol, args } => {
            if symbol != T2_SYMBOL {
                return Err(LogicError::SymbolMissing(symbol.clone()));
            }
            if args.len() != 1 {
                return Err(LogicError::ArityMismatch {
                    symbol: symbol.clone(),
                    expected: 1,
                    got: args.len(),
                });
            }
            Ok(store.generator(ctx, &args[0])?)
        }
        FormulaKind::Eq(x, y) => {
            let gx = store.generator(ctx, x)?;
            let gy = store.generator(ctx, y)?;
            Ok(store.iff(&gx, &gy)?)
        }
        FormulaKind::Not(f) => {
            let v = translate_with(store, f, mode)?;
            Ok(store.not(&v)?)
        }
        FormulaKind::BigMeet(fs) => {
            let vs: Vec<CanonicalFn> = fs
                .iter()
                .map(|f| translate_with(store, f, mode))
                .collect::<Result<_, _>>()?;
            Ok(store.big_meet(ctx, &vs)?)
        }
        FormulaKind::BigJoin(fs) => {
            let vs: Vec<CanonicalFn> = fs
                .iter()
                .map(|f| translate_with(store, f, mode))
                .collect::<Result<_, _>>()?;
            Ok(store.big_join(ctx, &vs)?)
        }
        FormulaKind::Exists { bound, body } => {
            let b = translate_with(store, body, mode)?;
            let kept = body.ctx().difference(bound);
            let shadow = match mode {
                ExistsMode::Projection => {
                    let p = store.project_exists(&b, bound)?;
                    store.restrict_context(&p, &kept)?
                }
                ExistsMode::Retraction => {
                    let rp = RetractionProblem::new(store, body.ctx(), &kept, &b)?;
                    match check_star(store, &rp)? {
                        StarOutcome::Violated { left, right } => {
                            return Err(LogicError::NotAqf {
                                subformula: phi.clone(),
                                left,
                                right,
                            });
                        }
                        StarOutcome::Holds => {}
                    }
                    let syn = synthesize_retraction(store, &rp)?;
                    let b_elem = syn.h.source().element_from_fn(store, &b)?;
                    let image = syn.h.apply(store, &b_elem)?;
                    image.value().clone()
                }
            };
            Ok(store.widen(&shadow, ctx)?)
        }
    }
}

/// Translates an almost-quantifier-free formula into the free algebra on
/// its context.  Relation atoms become generators, equalities become
/// biconditionals, and provably-unique existentials are eliminated via
/// retraction synthesis; a failed uniqueness check reports the offending
/// subformula with a concrete witness pair.
pub fn t2_translate(store: &mut TermStore, phi: &Formula) -> Result<CanonicalFn, LogicError> {
    translate_with(store, phi, ExistsMode::Retraction)
}

/// Translation variant that reads every existential as a plain
/// projection.  Used as an independent oracle: the two routes agree
/// exactly on almost-quantifier-free formulas.
pub fn t2_translate_projective(
    store: &mut TermStore,
    phi: &Formula,
) -> Result<CanonicalFn, LogicError> {
    translate_with(store, phi, ExistsMode::Projection)
}

/// Checks that a formula is almost quantifier-free over the two-element
/// theory, i.e. that every existential passes its uniqueness check.
pub fn t2_aqf_check(store: &mut TermStore, phi: &Formula) -> Result<(), LogicError> {
    t2_translate(store, phi).map(|_| ())
}

/// Decides provable uniqueness of `(∃ bound) body` semantically: the
/// translated body must determine the bound generators from the rest.
pub fn t2_uniqueness_check(
    store: &mut TermStore,
    body: &Formula,
    bound: &GeneratorContext,
) -> Result<StarOutcome, LogicError> {
    let b = t2_translate(store, body)?;
    let kept = body.ctx().difference(bound);
    let rp = RetractionProblem::new(store, body.ctx(), &kept, &b)?;
    Ok(check_star(store, &rp)?)
}

/// The deterministic section of [`t2_translate`]: constants map to the
/// empty meet/join, and any other function is rendered as its complete
/// disjunctive normal form over the context's minterms, in lexicographic
/// order, with one-element meets and joins unwrapped.
pub fn reify(store: &mut TermStore, a: &CanonicalFn) -> Result<Formula, LogicError> {
    let ctx = a.ctx();
    if a.is_true() {
        return Ok(Formula::top(ctx));
    }
    if a.is_false() {
        return Ok(Formula::bot(ctx));
    }
    let mut minterms = Vec::new();
    for atom in store.atoms(a)? {
        let mut literals = Vec::with_capacity(ctx.len());
        for n in ctx.iter() {
            let lit = Formula::rel(ctx, T2_SYMBOL, &[n])?;
            literals.push(if atom.get(n).expect("atom covers its context") {
                lit
            } else {
                Formula::not(lit)
            });
        }
        minterms.push(if literals.len() == 1 {
            literals.pop().expect("just checked")
        } else {
            Formula::big_meet(ctx, literals)?
        });
    }
    if minterms.len() == 1 {
        Ok(minterms.pop().expect("just checked"))
    } else {
        Formula::big_join(ctx, minterms)
    }
}

/// A quantifier-and-equality elimination result with its certificate.
#[derive(Clone, Debug)]
pub struct QeCertificate {
    pub input: Formula,
    pub output: Formula,
    pub checks: Vec<Check>,
}

/// Eliminates quantifiers and equalities from an almost-quantifier-free
/// formula.  The output is certified two ways: by handle equality of the
/// translations (with the input's existentials independently read as
/// projections), and by satisfaction agreement in both two-element models.
pub fn t2_qe(store: &mut TermStore, phi: &Formula) -> Result<QeCertificate, LogicError> {
    let via_retraction = t2_translate(store, phi)?;
    let via_projection = t2_translate_projective(store, phi)?;
    let output = reify(store, &via_retraction)?;
    let back = t2_translate(store, &output)?;

    let mut checks = vec![
        Check::flag("output is quantifier- and equality-free", output.is_qef()),
        Check::equal_fn(store, "translation of output = translation of input", &back, &via_retraction)?,
        Check::equal_fn(
            store,
            "projection route agrees with retraction route",
            &via_projection,
            &via_retraction,
        )?,
    ];
    let mut agree = true;
    for rt_point in 0..2 {
        let m = FinModel::two_element(&[rt_point]);
        let a = interpret(&m, phi)?;
        let b = interpret(&m, &output)?;
        match (a, b) {
            (Interpreted::Set(sa), Interpreted::Set(sb)) => {
                if sa != sb {
                    agree = false;
                }
            }
            _ => agree = false,
        }
    }
    checks.push(Check::flag("input and output agree in both two-element models", agree));
    if !all_ok(&checks) {
        return Err(LogicError::Internal("elimination certificate failed".into()));
    }
    Ok(QeCertificate { input: phi.clone(), output, checks })
}

/// A refutation: a two-element model and a point of it violating the
/// sequent, re-verified by direct interpretation.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub model: FinModel,
    /// The violating tuple over the sequent's context.
    pub point: Vec<usize>,
    /// The same point as an assignment of the translated generators.
    pub assignment: Assignment,
}

/// Outcome of the provability decision.
#[derive(Clone, Debug)]
pub enum ProofOutcome {
    Provable,
    Refuted(Countermodel),
}

impl ProofOutcome {
    pub fn is_provable(&self) -> bool {
        matches!(self, ProofOutcome::Provable)
    }
}

/// Decides provability of an almost-quantifier-free sequent over the
/// two-element theory by comparing the translations.  On failure the
/// violating atom is turned into a concrete countermodel with carrier
/// `{0,1}` and `RT = {1}`, and re-verified by interpretation.
pub fn t2_proves(store: &mut TermStore, s: &Sequent) -> Result<ProofOutcome, LogicError> {
    let ante = t2_translate(store, &s.antecedent)?;
    let cons = t2_translate(store, &s.consequent)?;
    if store.leq(&ante, &cons)? {
        return Ok(ProofOutcome::Provable);
    }
    let gap = {
        let nc = store.not(&cons)?;
        store.meet(&ante, &nc)?
    };
    let assignment = store
        .atoms(&gap)?
        .into_iter()
        .next()
        .ok_or_else(|| LogicError::Internal("order failure without witness".into()))?;
    let model = FinModel::two_element(&[1]);
    let point: Vec<usize> = s
        .ctx
        .iter()
        .map(|n| usize::from(assignment.get(n).expect("atom covers the context")))
        .collect();
    // Re-verify inside the model rather than trusting the translation.
    let in_ante = match interpret(&model, &s.antecedent)? {
        Interpreted::Set(t) => t.tuples.contains(&point),
        _ => false,
    };
    let in_cons = match interpret(&model, &s.consequent)? {
        Interpreted::Set(t) => t.tuples.contains(&point),
        _ => true,
    };
    if !in_ante || in_cons {
        return Err(LogicError::Internal(
            "countermodel failed independent re-verification".into(),
        ));
    }
    Ok(ProofOutcome::Refuted(Countermodel { model, point, assignment }))
}

/// Verifies an instance of the choice schema: pairwise-disjoint bound
/// contexts `bounds[i]`, bodies over `bounds[i] ∪ shared`, and the sequent
/// `⋀ᵢ (∃Yᵢ) φᵢ  ⇒  (∃ ⋃ᵢYᵢ) ⋀ᵢ φᵢ` over `shared`.  The instance is
/// checked semantically in the free algebra over the full context and by
/// interpretation in small structures; it must always come back true.
pub fn ac_instance_check(
    store: &mut TermStore,
    bounds: &[GeneratorContext],
    bodies: &[Formula],
    shared: &GeneratorContext,
) -> Result<bool, LogicError> {
    if bounds.len() != bodies.len() {
        return Err(LogicError::ContextMismatch(
            "one bound context per body is required".into(),
        ));
    }
    let mut seen: BTreeSet<&String> = shared.iter().collect();
    for y in bounds {
        for n in y.iter() {
            if !seen.insert(n) {
                return Err(LogicError::ContextOverlap(n.clone()));
            }
        }
    }
    for (y, f) in bounds.iter().zip(bodies) {
        let expect: BTreeSet<&String> = y.iter().chain(shared.iter()).collect();
        let actual: BTreeSet<&String> = f.ctx().iter().collect();
        if expect != actual {
            return Err(LogicError::ContextMismatch(format!(
                "body context {:?} must be the bound context plus the shared one",
                f.ctx().names()
            )));
        }
    }

    // Semantic route, over the full context with existentials as
    // projections.
    let mut full = GeneratorContext::empty();
    for y in bounds {
        full = full.concat(y)?;
    }
    let all_bounds = full.clone();
    full = full.concat(shared)?;
    let mut lifted = Vec::new();
    for f in bodies {
        let v = t2_translate_projective(store, f)?;
        lifted.push(store.widen(&v, &full)?);
    }
    let mut lhs_parts = Vec::new();
    for (v, y) in lifted.iter().zip(bounds) {
        lhs_parts.push(store.project_exists(v, y)?);
    }
    let lhs = store.big_meet(&full, &lhs_parts)?;
    let conj = store.big_meet(&full, &lifted)?;
    let rhs = store.project_exists(&conj, &all_bounds)?;
    if !store.leq(&lhs, &rhs)? {
        return Ok(false);
    }

    // Formula route, interpreted in small structures whenever both sides
    // are interpretable.
    let mut lhs_conjuncts = Vec::new();
    for (y, f) in bounds.iter().zip(bodies) {
        lhs_conjuncts.push(Formula::exists(y, shared, f.clone())?);
    }
    let lhs_f = Formula::big_meet(shared, lhs_conjuncts)?;
    let mut body_conj = Vec::new();
    for f in bodies {
        body_conj.push(f.weaken(&full)?);
    }
    let rhs_f = Formula::exists(&all_bounds, shared, Formula::big_meet(&full, body_conj)?)?;
    for carrier in 1..=3usize {
        for mask in 0..(1u32 << carrier) {
            let points: Vec<usize> =
                (0..carrier).filter(|&p| mask & (1 << p) != 0).collect();
            let mut interp_map = BTreeMap::new();
            interp_map.insert(
                T2_SYMBOL.to_string(),
                points.iter().map(|&p| vec![p]).collect(),
            );
            let m = FinModel::new(t2_language(), carrier, interp_map)?;
            let a = interpret(&m, &lhs_f)?;
            let b = interpret(&m, &rhs_f)?;
            if let (Interpreted::Set(sa), Interpreted::Set(sb)) = (a, b) {
                if !sa.is_subset(&sb) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
