//! Command execution.
//!
//! A file is a sequence of statements and commands.  `(def NAME EXPR)`
//! binds a value; `(expect VALUE CMD)` runs a command and compares its
//! principal result against the printed `VALUE`.  Every other head is a
//! command verb.  Execution produces a report per form: the echoed input,
//! the principal result as a canonical string, free-form detail lines,
//! the verification checks the library returned, and a verdict.
//!
//! Reports separate the three ways a run can be unhappy.  A command whose
//! answer is simply *no* — a failed entailment, a refuted sequent, a
//! mismatched expectation — returns a report with `ok = false`.  A
//! command whose mathematical precondition fails raises
//! `CliError::Precondition` with the library's witness.  A command that
//! cannot even be read raises `CliError::Elab` with a position.
//!
//! Reports only carry checks that passed: the library errors out when
//! its own certificates fail, and the one report that can legitimately
//! carry failures (`syn-check-equivalence`) flips its verdict instead.

use kbool::algebra::Presentation;
use kbool::check::{all_ok, Check};
use kbool::colimits::{partition_decompose, product, pushout, ColimitError};
use kbool::interpolation::{
    check_star, interpolate, synthesize_retraction, InterpolationError, InterpolationProblem,
    RetractionProblem, StarOutcome,
};
use kbool::logic::{t2_proves, t2_qe, LogicError, ProofOutcome};
use kbool::store::{CanonicalFn, TermStore};
use kbool::syncat::{
    check_equivalence_sample, compose, dual_map, hom_count, hom_set, stone_dual, SynError,
};
use kbool::term::Assignment;

use crate::elab::{
    elab_class, elab_class_at, elab_classes_jointly, elab_ctx_list, elab_formula, elab_value,
    hom_operand, internal, mor_operand, obj_operand, pres_operand, seq_operand, CliError, Env,
};
use crate::sexp::Sexp;

// ---------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------

/// What one executed form reported.
#[derive(Debug)]
pub struct CommandReport {
    /// The input form, printed canonically.
    pub echo: String,
    /// The head that was executed.
    pub verb: String,
    /// The principal result, as a canonical string.
    pub result: String,
    /// Free-form detail lines: counterexamples, point lists, sizes.
    pub detail: Vec<String>,
    /// The verification checks backing the result.
    pub checks: Vec<Check>,
    /// Whether the command succeeded in the yes/no sense.
    pub ok: bool,
}

impl CommandReport {
    fn new(form: &Sexp, verb: &str, result: impl Into<String>) -> CommandReport {
        CommandReport {
            echo: form.to_string(),
            verb: verb.to_string(),
            result: result.into(),
            detail: Vec::new(),
            checks: Vec::new(),
            ok: true,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "echo": self.echo,
            "verb": self.verb,
            "result": self.result,
            "detail": self.detail,
            "checks": self.checks.iter().map(|c| {
                serde_json::json!({ "label": c.label, "ok": c.ok })
            }).collect::<Vec<_>>(),
            "ok": self.ok,
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{}\n  => {}", self.echo, self.result);
        for line in &self.detail {
            out.push_str("\n  ");
            out.push_str(line);
        }
        if !self.checks.is_empty() {
            let passed = self.checks.iter().filter(|c| c.ok).count();
            out.push_str(&format!("\n  checks: {passed}/{} ok", self.checks.len()));
            for c in self.checks.iter().filter(|c| !c.ok) {
                out.push_str(&format!("\n  check FAIL: {}", c.label));
            }
        }
        if !self.ok {
            out.push_str("\n  FAILED");
        }
        out
    }
}

// ---------------------------------------------------------------------
// Error classification
// ---------------------------------------------------------------------

fn precondition(e: impl std::fmt::Display) -> CliError {
    CliError::Precondition { msg: e.to_string() }
}

fn logic_err(e: LogicError) -> CliError {
    match e {
        LogicError::NotAqf { .. }
        | LogicError::ContextOverlap(_)
        | LogicError::NotInterpretable { .. } => precondition(e),
        other => internal(other),
    }
}

fn interp_err(e: InterpolationError) -> CliError {
    match e {
        InterpolationError::HypothesisFails { .. }
        | InterpolationError::StarViolated { .. }
        | InterpolationError::NotFreeLegs(_) => precondition(e),
        other => internal(other),
    }
}

fn colimit_err(e: ColimitError) -> CliError {
    match e {
        ColimitError::NotAPartition { .. } | ColimitError::DoesNotCommute => precondition(e),
        other => internal(other),
    }
}

fn syn_internal(e: SynError) -> CliError {
    internal(e)
}

// ---------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------

fn render_fn(store: &TermStore, f: &CanonicalFn) -> Result<String, CliError> {
    Ok(store.to_canonical_term(f).map_err(internal)?.to_string())
}

fn render_pres(store: &TermStore, p: &Presentation) -> Result<String, CliError> {
    Ok(format!("(pres ({}) {})", p.ctx().names().join(" "), render_fn(store, p.relator())?))
}

fn render_assignment(a: &Assignment) -> String {
    let pairs: Vec<String> = a
        .ctx()
        .iter()
        .enumerate()
        .map(|(i, n)| format!("({n} {})", u8::from(a.bit(i))))
        .collect();
    format!("({})", pairs.join(" "))
}

fn render_point(names: &[String], values: &[usize]) -> String {
    let pairs: Vec<String> =
        names.iter().zip(values).map(|(n, v)| format!("({n} {v})")).collect();
    format!("({})", pairs.join(" "))
}

// ---------------------------------------------------------------------
// Shape helpers
// ---------------------------------------------------------------------

fn args<'a>(form: &'a Sexp, usage: &str) -> Result<&'a [Sexp], CliError> {
    match form.list() {
        Some(items) if !items.is_empty() => Ok(&items[1..]),
        _ => Err(CliError::at(form, format!("usage: {usage}"))),
    }
}

fn exact<'a>(form: &'a Sexp, n: usize, usage: &str) -> Result<&'a [Sexp], CliError> {
    let a = args(form, usage)?;
    if a.len() != n {
        return Err(CliError::at(form, format!("usage: {usage}")));
    }
    Ok(a)
}

fn parse_number<T: std::str::FromStr>(form: &Sexp, what: &str) -> Result<T, CliError> {
    form.atom()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| CliError::at(form, format!("expected {what}")))
}

// ---------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------

/// Executes one form against the store and environment.
pub fn execute(
    store: &mut TermStore,
    env: &mut Env,
    form: &Sexp,
) -> Result<CommandReport, CliError> {
    let head = form
        .head()
        .ok_or_else(|| CliError::at(form, "expected a command form `(verb …)`"))?;
    match head {
        "def" => cmd_def(store, env, form),
        "expect" => cmd_expect(store, env, form),
        "canon" => cmd_canon(store, env, form),
        "leq" => cmd_leq(store, env, form),
        "prove" => cmd_prove(store, env, form),
        "qe" => cmd_qe(store, env, form),
        "interp" => cmd_interp(store, env, form),
        "retract" => cmd_retract(store, env, form),
        "product" => cmd_product(store, env, form),
        "pushout" => cmd_pushout(store, env, form),
        "decompose" => cmd_decompose(store, env, form),
        "dual" => cmd_dual(store, env, form),
        "syn-hom-count" => cmd_syn_hom_count(store, env, form),
        "syn-compose" => cmd_syn_compose(store, env, form),
        "syn-check-equivalence" => cmd_syn_check_equivalence(store, form),
        other => Err(CliError::at(form, format!("unknown command `{other}`"))),
    }
}

/// Executes a whole file's worth of forms, stopping at the first error.
pub fn run_forms(
    store: &mut TermStore,
    env: &mut Env,
    forms: &[Sexp],
) -> Result<Vec<CommandReport>, CliError> {
    forms.iter().map(|form| execute(store, env, form)).collect()
}

// ---------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------

fn cmd_def(store: &mut TermStore, env: &mut Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 2, "(def NAME EXPR)")?;
    let name = a[0]
        .atom()
        .ok_or_else(|| CliError::at(&a[0], "expected a name"))?;
    let value = elab_value(store, env, &a[1])?;
    let kind = value.kind();
    env.define(&a[0], name, value)?;
    Ok(CommandReport::new(form, "def", format!("{name} : {kind}")))
}

fn cmd_expect(
    store: &mut TermStore,
    env: &mut Env,
    form: &Sexp,
) -> Result<CommandReport, CliError> {
    let a = exact(form, 2, "(expect VALUE CMD)")?;
    let expected = a[0].to_string();
    let inner = execute(store, env, &a[1])?;
    let matched = inner.result == expected;
    let mut detail = Vec::new();
    if !matched {
        detail.push(format!("expected {expected}"));
    }
    detail.extend(inner.detail);
    Ok(CommandReport {
        echo: form.to_string(),
        verb: "expect".to_string(),
        result: inner.result,
        detail,
        checks: inner.checks,
        ok: matched,
    })
}

// ---------------------------------------------------------------------
// Classes
// ---------------------------------------------------------------------

fn cmd_canon(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 1, "(canon TERM)")?;
    let f = elab_class(store, env, &a[0])?;
    let term = store.to_canonical_term(&f).map_err(internal)?;
    let back = store.eval(&term, f.ctx()).map_err(internal)?;
    let checks =
        vec![Check::equal_fn(store, "canonical term evaluates back to the class", &back, &f)
            .map_err(internal)?];
    let mut report = CommandReport::new(form, "canon", term.to_string());
    report.ok = all_ok(&checks);
    report.checks = checks;
    Ok(report)
}

fn cmd_leq(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 2, "(leq TERM TERM)")?;
    let fs = elab_classes_jointly(store, env, &[&a[0], &a[1]])?;
    let (lhs, rhs) = (&fs[0], &fs[1]);
    let holds = store.leq(lhs, rhs).map_err(internal)?;
    let mut report = CommandReport::new(form, "leq", if holds { "true" } else { "false" });
    if holds {
        report.checks =
            vec![Check::leq(store, "entailment holds at every point", lhs, rhs)
                .map_err(internal)?];
        report.ok = all_ok(&report.checks);
    } else {
        let gap = {
            let nr = store.not(rhs).map_err(internal)?;
            store.meet(lhs, &nr).map_err(internal)?
        };
        let witness = store
            .atoms(&gap)
            .map_err(internal)?
            .into_iter()
            .next()
            .ok_or_else(|| internal("failed entailment with empty gap"))?;
        report.detail.push(format!("counterexample {}", render_assignment(&witness)));
        report.ok = false;
    }
    Ok(report)
}

// ---------------------------------------------------------------------
// Logic
// ---------------------------------------------------------------------

fn cmd_prove(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 1, "(prove SEQ)")?;
    let s = seq_operand(env, &a[0])?;
    match t2_proves(store, &s).map_err(logic_err)? {
        ProofOutcome::Provable => Ok(CommandReport::new(form, "prove", "provable")),
        ProofOutcome::Refuted(cm) => {
            let mut report = CommandReport::new(form, "prove", "refuted");
            report.ok = false;
            report.detail.push("countermodel: carrier {0, 1}, RT = {1}".to_string());
            report.detail.push(format!(
                "violating point {}",
                render_point(s.ctx.names(), &cm.point)
            ));
            Ok(report)
        }
    }
}

fn cmd_qe(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 1, "(qe FORMULA)")?;
    let phi = elab_formula(env, &a[0])?;
    let cert = t2_qe(store, &phi).map_err(logic_err)?;
    let mut report = CommandReport::new(form, "qe", cert.output.to_string());
    report.ok = all_ok(&cert.checks);
    report.checks = cert.checks;
    Ok(report)
}

// ---------------------------------------------------------------------
// Interpolation and retraction
// ---------------------------------------------------------------------

fn cmd_interp(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 4, "(interp HOM HOM TERM TERM)")?;
    let f = hom_operand(store, env, &a[0])?;
    let g = hom_operand(store, env, &a[1])?;
    if f.source() != g.source() {
        return Err(CliError::at(form, "the two homs must share their source"));
    }
    let b_fn = elab_class_at(store, env, &a[2], f.target().ctx())?;
    let b = f.target().element_from_fn(store, &b_fn).map_err(internal)?;
    let c_fn = elab_class_at(store, env, &a[3], g.target().ctx())?;
    let c = g.target().element_from_fn(store, &c_fn).map_err(internal)?;
    let po = pushout(store, &f, &g).map_err(colimit_err)?;
    let mut checks = po.checks.clone();
    let problem = InterpolationProblem::new(po, b, c).map_err(interp_err)?;
    let cert = interpolate(store, &problem).map_err(interp_err)?;
    let mut report = CommandReport::new(form, "interp", render_fn(store, cert.a.value())?);
    checks.extend(cert.checks);
    report.ok = all_ok(&checks);
    report.checks = checks;
    Ok(report)
}

fn cmd_retract(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 3, "(retract (g…) (g…) TERM)")?;
    let x = elab_ctx_list(&a[0])?;
    let z = elab_ctx_list(&a[1])?;
    for n in z.iter() {
        if !x.contains(n) {
            return Err(CliError::at(
                &a[1],
                format!("kept generator `{n}` is not in the full context"),
            ));
        }
    }
    let b = elab_class_at(store, env, &a[2], &x)?;
    let rp = RetractionProblem::new(store, &x, &z, &b).map_err(interp_err)?;
    if let StarOutcome::Violated { left, right } = check_star(store, &rp).map_err(interp_err)? {
        return Err(precondition(format!(
            "the constraint does not determine the dependent generators: {left} and {right} \
             both satisfy it and agree on the kept generators"
        )));
    }
    let syn = synthesize_retraction(store, &rp).map_err(interp_err)?;
    let mut images = Vec::new();
    for y in rp.dependent().iter() {
        let idx = x.position(y).expect("dependent generators come from the context");
        let img = &syn.h.gen_images()[idx];
        images.push(format!("({y} {})", render_fn(store, img.value())?));
    }
    let mut report = CommandReport::new(form, "retract", format!("({})", images.join(" ")));
    report.ok = all_ok(&syn.checks);
    report.checks = syn.checks;
    Ok(report)
}

// ---------------------------------------------------------------------
// Colimits
// ---------------------------------------------------------------------

fn cmd_product(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = args(form, "(product PRES…)")?;
    if a.is_empty() {
        return Err(CliError::at(form, "usage: (product PRES…)"));
    }
    let factors: Vec<Presentation> =
        a.iter().map(|p| pres_operand(store, env, p)).collect::<Result<_, _>>()?;
    let data = product(store, &factors).map_err(colimit_err)?;
    let mut report = CommandReport::new(form, "product", render_pres(store, &data.result)?);
    report.detail.push(format!("atoms: {}", data.result.atom_count(store).map_err(internal)?));
    report.ok = all_ok(&data.checks);
    report.checks = data.checks;
    Ok(report)
}

fn cmd_pushout(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 2, "(pushout HOM HOM)")?;
    let f = hom_operand(store, env, &a[0])?;
    let g = hom_operand(store, env, &a[1])?;
    if f.source() != g.source() {
        return Err(CliError::at(form, "the two homs must share their source"));
    }
    let data = pushout(store, &f, &g).map_err(colimit_err)?;
    let mut report = CommandReport::new(form, "pushout", render_pres(store, &data.result)?);
    report.detail.push(format!("atoms: {}", data.result.atom_count(store).map_err(internal)?));
    report.ok = all_ok(&data.checks);
    report.checks = data.checks;
    Ok(report)
}

fn cmd_decompose(
    store: &mut TermStore,
    env: &Env,
    form: &Sexp,
) -> Result<CommandReport, CliError> {
    let a = args(form, "(decompose PRES TERM…)")?;
    if a.len() < 2 {
        return Err(CliError::at(form, "usage: (decompose PRES TERM…)"));
    }
    let p = pres_operand(store, env, &a[0])?;
    let mut cells = Vec::with_capacity(a.len() - 1);
    for cell in &a[1..] {
        let value = elab_class_at(store, env, cell, p.ctx())?;
        cells.push(p.element_from_fn(store, &value).map_err(internal)?);
    }
    let data = partition_decompose(store, &p, &cells).map_err(colimit_err)?;
    let mut components = Vec::new();
    for c in &data.components {
        components.push(render_pres(store, &c.quotient)?);
    }
    let mut report =
        CommandReport::new(form, "decompose", format!("(components {})", components.join(" ")));
    report.detail.push(format!("cells: {}", data.cells.len()));
    report.ok = all_ok(&data.checks);
    report.checks = data.checks;
    Ok(report)
}

fn cmd_dual(store: &mut TermStore, env: &Env, form: &Sexp) -> Result<CommandReport, CliError> {
    let a = exact(form, 1, "(dual PRES-OR-HOM)")?;
    let is_hom = match a[0].atom() {
        Some(name) => matches!(env.get(name), Some(crate::elab::Value::Hom(_))),
        None => a[0].head() == Some("hom"),
    };
    if is_hom {
        let h = hom_operand(store, env, &a[0])?;
        let d = dual_map(store, &h).map_err(syn_internal)?;
        let indices: Vec<String> = d.map.iter().map(|i| i.to_string()).collect();
        let mut report = CommandReport::new(form, "dual", format!("(map {})", indices.join(" ")));
        report.detail.push(format!(
            "from {} points to {} points",
            d.source.points.len(),
            d.target.points.len()
        ));
        Ok(report)
    } else {
        let p = pres_operand(store, env, &a[0])?;
        let d = stone_dual(store, &p).map_err(syn_internal)?;
        let mut report = CommandReport::new(form, "dual", d.points.len().to_string());
        for pt in &d.points {
            report.detail.push(format!("point {}", render_assignment(pt)));
        }
        Ok(report)
    }
}

// ---------------------------------------------------------------------
// The syntactic category
// ---------------------------------------------------------------------

fn cmd_syn_hom_count(
    store: &mut TermStore,
    env: &Env,
    form: &Sexp,
) -> Result<CommandReport, CliError> {
    let a = exact(form, 2, "(syn-hom-count OBJ OBJ)")?;
    let src = obj_operand(store, env, &a[0])?;
    let tgt = obj_operand(store, env, &a[1])?;
    let n = hom_count(store, &src, &tgt).map_err(syn_internal)?;
    let mut report = CommandReport::new(form, "syn-hom-count", n.to_string());
    if n <= 1024 {
        let hs = hom_set(store, &src, &tgt).map_err(syn_internal)?;
        report.checks = vec![Check::equal_count(
            "enumerated morphisms match the counting formula",
            n,
            hs.len() as u128,
        )];
        report.ok = all_ok(&report.checks);
    }
    Ok(report)
}

fn cmd_syn_compose(
    store: &mut TermStore,
    env: &Env,
    form: &Sexp,
) -> Result<CommandReport, CliError> {
    let a = exact(form, 2, "(syn-compose MOR MOR)")?;
    let f = mor_operand(store, env, &a[0])?;
    let g = mor_operand(store, env, &a[1])?;
    let composite = match compose(store, &g, &f) {
        Ok(c) => c,
        Err(SynError::CompositionMismatch) => {
            return Err(CliError::at(form, "morphisms are not composable: the first must land in the second's source"));
        }
        Err(e) => return Err(syn_internal(e)),
    };
    let gctx = composite.graph().ctx().clone();
    let alpha = store.widen(composite.source().alpha(), &gctx).map_err(internal)?;
    let primed_target = composite.target().ctx().primed();
    let projected = store.project_exists(composite.graph(), &primed_target).map_err(internal)?;
    let checks = vec![
        Check::leq(store, "composite graph lies under the source class", composite.graph(), &alpha)
            .map_err(internal)?,
        Check::equal_fn(store, "composite graph projects onto the source class", &projected, &alpha)
            .map_err(internal)?,
    ];
    let mut report = CommandReport::new(form, "syn-compose", render_fn(store, composite.graph())?);
    report.ok = all_ok(&checks);
    report.checks = checks;
    Ok(report)
}

fn cmd_syn_check_equivalence(
    store: &mut TermStore,
    form: &Sexp,
) -> Result<CommandReport, CliError> {
    let a = args(form, "(syn-check-equivalence MAX-CTX [SEED])")?;
    if a.is_empty() || a.len() > 2 {
        return Err(CliError::at(form, "usage: (syn-check-equivalence MAX-CTX [SEED])"));
    }
    let max_ctx: usize = parse_number(&a[0], "a context bound between 0 and 3")?;
    if max_ctx > 3 {
        return Err(CliError::at(&a[0], "the context bound must be at most 3"));
    }
    let seed: u64 = match a.get(1) {
        Some(s) => parse_number(s, "a numeric seed")?,
        None => 2024,
    };
    let rep = check_equivalence_sample(store, max_ctx, seed).map_err(syn_internal)?;
    let mut report = CommandReport::new(
        form,
        "syn-check-equivalence",
        format!("(objects {} hom-sets {})", rep.objects_checked, rep.hom_sets_checked),
    );
    report.ok = all_ok(&rep.checks);
    report.checks = rep.checks;
    Ok(report)
}
