//! Elaboration: from parsed forms to library values.
//!
//! The surface language has seven kinds of value.  Classes, presentations,
//! homomorphisms, formulas, sequents, objects, and morphisms are written
//!
//! ```text
//! TERM    ::= top | bot | NAME | (gen g) | (not TERM) | (and TERM…)
//!           | (or TERM…) | (implies TERM TERM) | (iff TERM TERM)
//! FORMULA ::= top | bot | NAME | (rel SYM g…) | (= g g) | (not FORMULA)
//!           | (and FORMULA…) | (or FORMULA…) | (implies FORMULA FORMULA)
//!           | (iff FORMULA FORMULA) | (exists (g…) FORMULA)
//! PRES    ::= (pres (g…) TERM)
//! HOM     ::= (hom PRES PRES (TERM…))      one image term per source generator
//! SEQ     ::= (seq (g…) FORMULA FORMULA)
//! OBJ     ::= (obj (g…) TERM)
//! MOR     ::= (mor OBJ OBJ TERM)           graph over source ++ primed target
//! ```
//!
//! Generator contexts are inferred for bare terms and formulas — the
//! generators in order of first occurrence, with named references
//! contributing their full context — and explicit everywhere a value is
//! presented over a declared context.  Declared generator names must not
//! use the shapes the library reserves for derived contexts: a leading
//! `@`, a trailing `'`, or an interior `#`.
//!
//! Errors are split by blame.  `Parse` and `Elab` mean the input itself is
//! bad (exit 2); `Precondition` means a well-formed request whose
//! mathematical hypothesis fails, and carries the library's witness
//! (exit 3); `Internal` means a verification the tool owes unconditionally
//! did not hold (exit 3).  Plain false answers — a failed entailment, a
//! refuted sequent, a mismatched expectation — are not errors: they flow
//! through reports and exit 1.

use std::collections::BTreeMap;
use std::fmt;

use kbool::algebra::{AlgebraError, Element, Hom, Presentation};
use kbool::logic::{t2_language, Formula, LogicError, Sequent};
use kbool::store::{CanonicalFn, TermStore};
use kbool::syncat::{mk_morphism, SynError, SynMorphism, SynObject};
use kbool::term::{GeneratorContext, Term};

use crate::sexp::{ParseError, Sexp};

// ---------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------

/// A failure of the command language, split by blame.
#[derive(Clone, Debug)]
pub enum CliError {
    /// The input could not be read at all.
    Parse(ParseError),
    /// The input was read but violates the language.
    Elab { line: usize, column: usize, msg: String },
    /// A well-formed request whose mathematical precondition fails; the
    /// message carries the library's witness.
    Precondition { msg: String },
    /// A verification the tool owes unconditionally did not hold.
    Internal { msg: String },
    /// The request never reached the language: a missing file, a bad
    /// environment variable.
    Io { msg: String },
}

impl CliError {
    pub fn at(form: &Sexp, msg: impl Into<String>) -> CliError {
        CliError::Elab { line: form.line(), column: form.column(), msg: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Elab { .. } | CliError::Io { .. } => 2,
            CliError::Precondition { .. } | CliError::Internal { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "parse error at {e}"),
            CliError::Elab { line, column, msg } => write!(f, "error at {line}:{column}: {msg}"),
            CliError::Precondition { msg } => write!(f, "precondition failed: {msg}"),
            CliError::Internal { msg } => write!(f, "internal error: {msg}"),
            CliError::Io { msg } => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> CliError {
        CliError::Parse(e)
    }
}

/// Wraps a library error that can only mean a tool bug at this call site.
pub fn internal(e: impl fmt::Display) -> CliError {
    CliError::Internal { msg: e.to_string() }
}

/// Classifies an algebra error met while building a value: failed
/// well-definedness is a precondition with a witness, the rest blame the
/// input.
fn algebra_err(form: &Sexp, e: AlgebraError) -> CliError {
    match e {
        AlgebraError::NotWellDefined { .. } => CliError::Precondition { msg: e.to_string() },
        other => CliError::at(form, other.to_string()),
    }
}

/// Classifies a syntactic-category error met while building a morphism:
/// failed functionality or totality is a precondition with a witness, the
/// rest blame the input.
fn syn_err(form: &Sexp, e: SynError) -> CliError {
    match e {
        SynError::NotFunctional { .. } | SynError::NotTotal { .. } => {
            CliError::Precondition { msg: e.to_string() }
        }
        other => CliError::at(form, other.to_string()),
    }
}

// ---------------------------------------------------------------------
// Values and the environment
// ---------------------------------------------------------------------

/// A named value of the surface language.
#[derive(Clone, Debug)]
pub enum Value {
    Class(CanonicalFn),
    Pres(Presentation),
    Hom(Hom),
    Formula(Formula),
    Sequent(Sequent),
    Object(SynObject),
    Morphism(SynMorphism),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Class(_) => "class",
            Value::Pres(_) => "presentation",
            Value::Hom(_) => "hom",
            Value::Formula(_) => "formula",
            Value::Sequent(_) => "sequent",
            Value::Object(_) => "object",
            Value::Morphism(_) => "morphism",
        }
    }
}

/// Heads and literals of the language; they are not usable as names.
const KEYWORDS: &[&str] = &[
    "top", "bot", "gen", "not", "and", "or", "implies", "iff", "rel", "=", "exists", "pres",
    "hom", "seq", "obj", "mor", "def", "expect", "canon", "leq", "prove", "qe", "interp",
    "retract", "product", "pushout", "decompose", "dual", "syn-hom-count", "syn-compose",
    "syn-check-equivalence", "true", "false", "provable", "refuted",
];

/// The definitions in scope while a file runs.
#[derive(Default)]
pub struct Env {
    names: BTreeMap<String, Value>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.names.get(name)
    }

    /// Binds a fresh name.  Names must start with an ASCII letter, must
    /// not be keywords, and must not already be bound.
    pub fn define(&mut self, at: &Sexp, name: &str, value: Value) -> Result<(), CliError> {
        if !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            return Err(CliError::at(at, format!("name `{name}` must start with a letter")));
        }
        if KEYWORDS.contains(&name) {
            return Err(CliError::at(at, format!("`{name}` is a keyword and cannot be defined")));
        }
        if self.names.contains_key(name) {
            return Err(CliError::at(at, format!("`{name}` is already defined")));
        }
        self.names.insert(name.to_string(), value);
        Ok(())
    }
}

// ---------------------------------------------------------------------
// Shape helpers
// ---------------------------------------------------------------------

fn expect_list<'a>(form: &'a Sexp, what: &str) -> Result<&'a [Sexp], CliError> {
    form.list().ok_or_else(|| CliError::at(form, format!("expected {what}")))
}

fn expect_atom<'a>(form: &'a Sexp, what: &str) -> Result<&'a str, CliError> {
    form.atom().ok_or_else(|| CliError::at(form, format!("expected {what}")))
}

fn expect_len(form: &Sexp, items: &[Sexp], n: usize, usage: &str) -> Result<(), CliError> {
    if items.len() != n {
        return Err(CliError::at(form, format!("usage: {usage}")));
    }
    Ok(())
}

fn push_name(names: &mut Vec<String>, name: &str) {
    if !names.iter().any(|n| n == name) {
        names.push(name.to_string());
    }
}

/// Validates a user-declared generator name against the shapes the
/// library reserves for derived contexts.
fn check_generator_name(at: &Sexp, name: &str) -> Result<(), CliError> {
    if name.starts_with('@') || name.ends_with('\'') || name.contains('#') {
        return Err(CliError::at(
            at,
            format!("generator name `{name}` uses a reserved shape (leading `@`, trailing `'`, or `#`)"),
        ));
    }
    Ok(())
}

/// Elaborates a declared context: a list of distinct, unreserved names.
pub fn elab_ctx_list(form: &Sexp) -> Result<GeneratorContext, CliError> {
    let items = expect_list(form, "a context list `(g…)`")?;
    let mut names = Vec::with_capacity(items.len());
    for item in items {
        let name = expect_atom(item, "a generator name")?;
        check_generator_name(item, name)?;
        names.push(name.to_string());
    }
    GeneratorContext::new(names).map_err(|e| CliError::at(form, e.to_string()))
}

// ---------------------------------------------------------------------
// Terms and classes
// ---------------------------------------------------------------------

/// Collects the generators of a term in order of first occurrence; named
/// references contribute their full context.
fn collect_class_ctx(env: &Env, form: &Sexp, names: &mut Vec<String>) -> Result<(), CliError> {
    match form.atom() {
        Some("top") | Some("bot") => Ok(()),
        Some(name) => match env.get(name) {
            Some(Value::Class(f)) => {
                for n in f.ctx().iter() {
                    push_name(names, n);
                }
                Ok(())
            }
            Some(v) => Err(CliError::at(form, format!("`{name}` is a {}, expected a class", v.kind()))),
            None => Err(CliError::at(form, format!("unknown name `{name}`"))),
        },
        None => {
            let items = form.list().expect("not an atom");
            match form.head() {
                Some("gen") => {
                    expect_len(form, items, 2, "(gen g)")?;
                    let name = expect_atom(&items[1], "a generator name")?;
                    check_generator_name(&items[1], name)?;
                    push_name(names, name);
                    Ok(())
                }
                Some("not") | Some("and") | Some("or") | Some("implies") | Some("iff") => {
                    for item in &items[1..] {
                        collect_class_ctx(env, item, names)?;
                    }
                    Ok(())
                }
                _ => Err(CliError::at(form, "expected a term")),
            }
        }
    }
}

/// Elaborates a term.  Named references are spliced in as the canonical
/// term of their class, so the result depends only on what the referenced
/// names denote.
fn elab_term(store: &TermStore, env: &Env, form: &Sexp) -> Result<Term, CliError> {
    match form.atom() {
        Some("top") => Ok(Term::Top),
        Some("bot") => Ok(Term::Bot),
        Some(name) => match env.get(name) {
            Some(Value::Class(f)) => store.to_canonical_term(f).map_err(internal),
            Some(v) => Err(CliError::at(form, format!("`{name}` is a {}, expected a class", v.kind()))),
            None => Err(CliError::at(form, format!("unknown name `{name}`"))),
        },
        None => {
            let items = form.list().expect("not an atom");
            let args = |env: &Env| -> Result<Vec<Term>, CliError> {
                items[1..].iter().map(|i| elab_term(store, env, i)).collect()
            };
            match form.head() {
                Some("gen") => {
                    expect_len(form, items, 2, "(gen g)")?;
                    Ok(Term::Gen(expect_atom(&items[1], "a generator name")?.to_string()))
                }
                Some("not") => {
                    expect_len(form, items, 2, "(not TERM)")?;
                    Ok(Term::Not(Box::new(elab_term(store, env, &items[1])?)))
                }
                Some("and") => Ok(Term::Meet(args(env)?)),
                Some("or") => Ok(Term::Join(args(env)?)),
                Some("implies") => {
                    expect_len(form, items, 3, "(implies TERM TERM)")?;
                    let mut a = args(env)?;
                    let b = a.pop().expect("two args");
                    Ok(Term::imp(a.pop().expect("two args"), b))
                }
                Some("iff") => {
                    expect_len(form, items, 3, "(iff TERM TERM)")?;
                    let mut a = args(env)?;
                    let b = a.pop().expect("two args");
                    Ok(Term::iff(a.pop().expect("two args"), b))
                }
                _ => Err(CliError::at(form, "expected a term")),
            }
        }
    }
}

/// Elaborates a term over its inferred context into a canonical class.
pub fn elab_class(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CanonicalFn, CliError> {
    let mut names = Vec::new();
    collect_class_ctx(env, form, &mut names)?;
    let ctx = GeneratorContext::new(names).map_err(|e| CliError::at(form, e.to_string()))?;
    elab_class_at(store, env, form, &ctx)
}

/// Elaborates a term over a declared context into a canonical class.
pub fn elab_class_at(
    store: &mut TermStore,
    env: &Env,
    form: &Sexp,
    ctx: &GeneratorContext,
) -> Result<CanonicalFn, CliError> {
    let term = elab_term(store, env, form)?;
    store.eval(&term, ctx).map_err(|e| CliError::at(form, e.to_string()))
}

/// Elaborates the joint context of several terms, then each term over it.
pub fn elab_classes_jointly(
    store: &mut TermStore,
    env: &Env,
    forms: &[&Sexp],
) -> Result<Vec<CanonicalFn>, CliError> {
    let mut names = Vec::new();
    for form in forms {
        collect_class_ctx(env, form, &mut names)?;
    }
    let ctx = GeneratorContext::new(names)
        .map_err(|e| CliError::at(forms[0], e.to_string()))?;
    forms.iter().map(|form| elab_class_at(store, env, form, &ctx)).collect()
}

// ---------------------------------------------------------------------
// Formulas and sequents
// ---------------------------------------------------------------------

/// Collects the free variables of a formula in order of first occurrence.
fn collect_formula_free(env: &Env, form: &Sexp, free: &mut Vec<String>) -> Result<(), CliError> {
    match form.atom() {
        Some("top") | Some("bot") => Ok(()),
        Some(name) => match env.get(name) {
            Some(Value::Formula(f)) => {
                for n in f.ctx().iter() {
                    push_name(free, n);
                }
                Ok(())
            }
            Some(v) => Err(CliError::at(form, format!("`{name}` is a {}, expected a formula", v.kind()))),
            None => Err(CliError::at(form, format!("unknown name `{name}`"))),
        },
        None => {
            let items = form.list().expect("not an atom");
            match form.head() {
                Some("rel") => {
                    if items.len() < 2 {
                        return Err(CliError::at(form, "usage: (rel SYM g…)"));
                    }
                    for arg in &items[2..] {
                        let name = expect_atom(arg, "a variable")?;
                        check_generator_name(arg, name)?;
                        push_name(free, name);
                    }
                    Ok(())
                }
                Some("=") => {
                    expect_len(form, items, 3, "(= g g)")?;
                    for arg in &items[1..3] {
                        let name = expect_atom(arg, "a variable")?;
                        check_generator_name(arg, name)?;
                        push_name(free, name);
                    }
                    Ok(())
                }
                Some("not") | Some("and") | Some("or") | Some("implies") | Some("iff") => {
                    for item in &items[1..] {
                        collect_formula_free(env, item, free)?;
                    }
                    Ok(())
                }
                Some("exists") => {
                    expect_len(form, items, 3, "(exists (g…) FORMULA)")?;
                    let bound = elab_ctx_list(&items[1])?;
                    let mut body = Vec::new();
                    collect_formula_free(env, &items[2], &mut body)?;
                    for n in body {
                        if !bound.contains(&n) {
                            push_name(free, &n);
                        }
                    }
                    Ok(())
                }
                _ => Err(CliError::at(form, "expected a formula")),
            }
        }
    }
}

/// Validates a relation symbol against the fixed language.
fn check_symbol(form: &Sexp, symbol: &str, args: usize) -> Result<(), CliError> {
    match t2_language().arity(symbol) {
        None => Err(CliError::at(form, format!("unknown relation symbol `{symbol}`"))),
        Some(arity) if arity.len() != args => Err(CliError::at(
            form,
            format!("symbol `{symbol}` expects {} arguments, got {args}", arity.len()),
        )),
        Some(_) => Ok(()),
    }
}

/// Elaborates a formula over a fixed context of free variables.
pub fn elab_formula_at(
    env: &Env,
    form: &Sexp,
    ctx: &GeneratorContext,
) -> Result<Formula, CliError> {
    let logic = |e: LogicError| CliError::at(form, e.to_string());
    match form.atom() {
        Some("top") => Ok(Formula::top(ctx)),
        Some("bot") => Ok(Formula::bot(ctx)),
        Some(name) => match env.get(name) {
            Some(Value::Formula(f)) => f.weaken(ctx).map_err(logic),
            Some(v) => Err(CliError::at(form, format!("`{name}` is a {}, expected a formula", v.kind()))),
            None => Err(CliError::at(form, format!("unknown name `{name}`"))),
        },
        None => {
            let items = form.list().expect("not an atom");
            let parts = |env: &Env| -> Result<Vec<Formula>, CliError> {
                items[1..].iter().map(|i| elab_formula_at(env, i, ctx)).collect()
            };
            match form.head() {
                Some("rel") => {
                    if items.len() < 2 {
                        return Err(CliError::at(form, "usage: (rel SYM g…)"));
                    }
                    let symbol = expect_atom(&items[1], "a relation symbol")?;
                    check_symbol(form, symbol, items.len() - 2)?;
                    let args: Vec<&str> =
                        items[2..].iter().map(|a| a.atom().expect("collected")).collect();
                    Formula::rel(ctx, symbol, &args).map_err(logic)
                }
                Some("=") => {
                    expect_len(form, items, 3, "(= g g)")?;
                    let x = expect_atom(&items[1], "a variable")?;
                    let y = expect_atom(&items[2], "a variable")?;
                    Formula::eq(ctx, x, y).map_err(logic)
                }
                Some("not") => {
                    expect_len(form, items, 2, "(not FORMULA)")?;
                    Ok(Formula::not(elab_formula_at(env, &items[1], ctx)?))
                }
                Some("and") => Formula::big_meet(ctx, parts(env)?).map_err(logic),
                Some("or") => Formula::big_join(ctx, parts(env)?).map_err(logic),
                Some("implies") => {
                    expect_len(form, items, 3, "(implies FORMULA FORMULA)")?;
                    let mut ps = parts(env)?;
                    let b = ps.pop().expect("two parts");
                    Formula::implies(ps.pop().expect("two parts"), b).map_err(logic)
                }
                Some("iff") => {
                    expect_len(form, items, 3, "(iff FORMULA FORMULA)")?;
                    let mut ps = parts(env)?;
                    let b = ps.pop().expect("two parts");
                    Formula::iff(ps.pop().expect("two parts"), b).map_err(logic)
                }
                Some("exists") => {
                    expect_len(form, items, 3, "(exists (g…) FORMULA)")?;
                    let bound = elab_ctx_list(&items[1])?;
                    for n in bound.iter() {
                        if ctx.contains(n) {
                            return Err(CliError::at(
                                &items[1],
                                format!("bound variable `{n}` shadows a free variable"),
                            ));
                        }
                    }
                    let body_ctx =
                        bound.concat(ctx).map_err(|e| CliError::at(form, e.to_string()))?;
                    let body = elab_formula_at(env, &items[2], &body_ctx)?;
                    Formula::exists(&bound, ctx, body).map_err(logic)
                }
                _ => Err(CliError::at(form, "expected a formula")),
            }
        }
    }
}

/// Elaborates a formula over its inferred free-variable context.
pub fn elab_formula(env: &Env, form: &Sexp) -> Result<Formula, CliError> {
    let mut free = Vec::new();
    collect_formula_free(env, form, &mut free)?;
    let ctx = GeneratorContext::new(free).map_err(|e| CliError::at(form, e.to_string()))?;
    elab_formula_at(env, form, &ctx)
}

/// Elaborates `(seq (g…) FORMULA FORMULA)`.
pub fn elab_sequent(env: &Env, form: &Sexp) -> Result<Sequent, CliError> {
    let items = expect_list(form, "(seq (g…) FORMULA FORMULA)")?;
    expect_len(form, items, 4, "(seq (g…) FORMULA FORMULA)")?;
    let ctx = elab_ctx_list(&items[1])?;
    let antecedent = elab_formula_at(env, &items[2], &ctx)?;
    let consequent = elab_formula_at(env, &items[3], &ctx)?;
    Sequent::new(antecedent, consequent).map_err(|e| CliError::at(form, e.to_string()))
}

// ---------------------------------------------------------------------
// Presentations, homomorphisms, objects, morphisms
// ---------------------------------------------------------------------

/// Elaborates `(pres (g…) TERM)`.
pub fn elab_pres(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<Presentation, CliError> {
    let items = expect_list(form, "(pres (g…) TERM)")?;
    expect_len(form, items, 3, "(pres (g…) TERM)")?;
    let ctx = elab_ctx_list(&items[1])?;
    let relator = elab_term(store, env, &items[2])?;
    Presentation::new(store, &ctx, &relator).map_err(|e| algebra_err(&items[2], e))
}

/// Elaborates `(hom PRES PRES (TERM…))`: one image term, over the target
/// context, per source generator.
pub fn elab_hom(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<Hom, CliError> {
    let items = expect_list(form, "(hom PRES PRES (TERM…))")?;
    expect_len(form, items, 4, "(hom PRES PRES (TERM…))")?;
    let source = pres_operand(store, env, &items[1])?;
    let target = pres_operand(store, env, &items[2])?;
    let image_forms = expect_list(&items[3], "an image list `(TERM…)`")?;
    if image_forms.len() != source.ctx().len() {
        return Err(CliError::at(
            &items[3],
            format!(
                "expected {} image terms for the source generators, got {}",
                source.ctx().len(),
                image_forms.len()
            ),
        ));
    }
    let mut images: Vec<Element> = Vec::with_capacity(image_forms.len());
    for image in image_forms {
        let value = elab_class_at(store, env, image, target.ctx())?;
        images.push(target.element_from_fn(store, &value).map_err(|e| algebra_err(image, e))?);
    }
    Hom::new(store, &source, &target, images).map_err(|e| algebra_err(form, e))
}

/// Elaborates `(obj (g…) TERM)`.
pub fn elab_object(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<SynObject, CliError> {
    let items = expect_list(form, "(obj (g…) TERM)")?;
    expect_len(form, items, 3, "(obj (g…) TERM)")?;
    let ctx = elab_ctx_list(&items[1])?;
    let alpha = elab_class_at(store, env, &items[2], &ctx)?;
    SynObject::new(store, &ctx, &alpha).map_err(|e| syn_err(form, e))
}

/// Elaborates `(mor OBJ OBJ TERM)`: the graph term lives over the source
/// context followed by the primed target context, so primed generator
/// references such as `(gen y')` are in scope.
pub fn elab_morphism(
    store: &mut TermStore,
    env: &Env,
    form: &Sexp,
) -> Result<SynMorphism, CliError> {
    let items = expect_list(form, "(mor OBJ OBJ TERM)")?;
    expect_len(form, items, 4, "(mor OBJ OBJ TERM)")?;
    let source = obj_operand(store, env, &items[1])?;
    let target = obj_operand(store, env, &items[2])?;
    let gctx = source
        .ctx()
        .concat(&target.ctx().primed())
        .map_err(|e| CliError::at(form, e.to_string()))?;
    let graph = elab_class_at(store, env, &items[3], &gctx)?;
    mk_morphism(store, &source, &target, &graph).map_err(|e| syn_err(form, e))
}

// ---------------------------------------------------------------------
// Operands: a name in scope or an inline constructor
// ---------------------------------------------------------------------

macro_rules! operand {
    ($fn_name:ident, $variant:ident, $ty:ty, $head:literal, $elab:path, $what:literal) => {
        pub fn $fn_name(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<$ty, CliError> {
            if let Some(name) = form.atom() {
                return match env.get(name) {
                    Some(Value::$variant(v)) => Ok(v.clone()),
                    Some(v) => Err(CliError::at(
                        form,
                        format!("`{name}` is a {}, expected {}", v.kind(), $what),
                    )),
                    None => Err(CliError::at(form, format!("unknown name `{name}`"))),
                };
            }
            if form.head() == Some($head) {
                return $elab(store, env, form);
            }
            Err(CliError::at(form, format!("expected {}", $what)))
        }
    };
}

operand!(pres_operand, Pres, Presentation, "pres", elab_pres, "a presentation");
operand!(hom_operand, Hom, Hom, "hom", elab_hom, "a hom");
operand!(obj_operand, Object, SynObject, "obj", elab_object, "an object");
operand!(mor_operand, Morphism, SynMorphism, "mor", elab_morphism, "a morphism");

/// A sequent operand: a name in scope or an inline `(seq …)`.
pub fn seq_operand(env: &Env, form: &Sexp) -> Result<Sequent, CliError> {
    if let Some(name) = form.atom() {
        return match env.get(name) {
            Some(Value::Sequent(s)) => Ok(s.clone()),
            Some(v) => {
                Err(CliError::at(form, format!("`{name}` is a {}, expected a sequent", v.kind())))
            }
            None => Err(CliError::at(form, format!("unknown name `{name}`"))),
        };
    }
    if form.head() == Some("seq") {
        return elab_sequent(env, form);
    }
    Err(CliError::at(form, "expected a sequent"))
}

// ---------------------------------------------------------------------
// Definitions
// ---------------------------------------------------------------------

/// Scans for evidence that an expression is a formula rather than a term:
/// a `rel`, `=`, or `exists` head anywhere, or a reference to a defined
/// formula.
fn formula_evidence(env: &Env, form: &Sexp) -> bool {
    match form.atom() {
        Some(name) => matches!(env.get(name), Some(Value::Formula(_))),
        None => match form.head() {
            Some("rel") | Some("=") | Some("exists") => true,
            _ => form
                .list()
                .map(|items| items.iter().skip(1).any(|i| formula_evidence(env, i)))
                .unwrap_or(false),
        },
    }
}

/// Elaborates the right-hand side of a `def`.  Constructor heads pick the
/// kind; anything else is a formula when it shows formula evidence and a
/// class otherwise.
pub fn elab_value(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<Value, CliError> {
    if let Some(name) = form.atom() {
        if name != "top" && name != "bot" {
            return match env.get(name) {
                Some(v) => Ok(v.clone()),
                None => Err(CliError::at(form, format!("unknown name `{name}`"))),
            };
        }
    }
    match form.head() {
        Some("pres") => Ok(Value::Pres(elab_pres(store, env, form)?)),
        Some("hom") => Ok(Value::Hom(elab_hom(store, env, form)?)),
        Some("seq") => Ok(Value::Sequent(elab_sequent(env, form)?)),
        Some("obj") => Ok(Value::Object(elab_object(store, env, form)?)),
        Some("mor") => Ok(Value::Morphism(elab_morphism(store, env, form)?)),
        _ if formula_evidence(env, form) => Ok(Value::Formula(elab_formula(env, form)?)),
        _ => Ok(Value::Class(elab_class(store, env, form)?)),
    }
}

// ---------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------
