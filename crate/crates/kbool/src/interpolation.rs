//! Interpolation across pushout squares and retraction synthesis.
//!
//! Given a pushout of `f : A → B` and `g : A → C` and elements `b`, `c`
//! whose corner images satisfy `g′(b) ≤ f′(c)`, there is an element `a` of
//! the apex with `b ≤ f(a)` and `g(a) ≤ c`.  [`interpolate`] returns the
//! least such `a` together with both verified inequalities; for legs that
//! embed free algebras, [`interpolation_interval`] computes the exact
//! interval of valid interpolants by quantifier projection.
//!
//! [`synthesize_retraction`] is the definability counterpart: when a
//! constraint `b` over generators `X` determines the generators outside a
//! sub-context `Z` from those inside it (condition checked by
//! [`check_star`]), it produces a homomorphic retraction `h : K(X) → K(Z)`
//! extracting an explicit definition for each dependent generator, with a
//! certificate for the per-generator bounds and the exact reconstruction
//! identity.

use std::collections::HashMap;

use thiserror::Error;

use crate::algebra::{AlgebraError, Element, Hom, Presentation};
use crate::check::{all_ok, Check};
use crate::colimits::PushoutData;
use crate::store::{CanonicalFn, TermStore};
use crate::term::{Assignment, GeneratorContext, TermError};

#[derive(Debug, Clone, Error)]
pub enum InterpolationError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    /// The corner images fail to be ordered: the witness atom satisfies the
    /// image of `b` but not the image of `c`.
    #[error("no interpolant exists; corner atom {witness} satisfies the image of b but not of c")]
    HypothesisFails { witness: Assignment },
    /// The interval characterization only applies to legs that embed free
    /// algebras generator-to-generator.
    #[error("interval characterization requires free embedding legs: {0}")]
    NotFreeLegs(String),
    /// The constraint fails to determine the dependent generators: the two
    /// assignments both satisfy it and agree on the kept generators but
    /// differ elsewhere.
    #[error("constraint does not determine the dependent generators; {left} and {right} both satisfy it")]
    StarViolated { left: Assignment, right: Assignment },
    #[error("internal verification failed: {0}")]
    Internal(String),
}

/// An interpolation instance: a pushout square plus one element of each
/// target algebra.
#[derive(Clone, Debug)]
pub struct InterpolationProblem {
    pub pushout: PushoutData,
    pub b: Element,
    pub c: Element,
}

impl InterpolationProblem {
    pub fn new(
        pushout: PushoutData,
        b: Element,
        c: Element,
    ) -> Result<Self, InterpolationError> {
        if b.owner() != pushout.left.target() || c.owner() != pushout.right.target() {
            return Err(InterpolationError::Algebra(AlgebraError::OwnerMismatch));
        }
        Ok(InterpolationProblem { pushout, b, c })
    }
}

/// A verified interpolant: `b ≤ f(a)` and `g(a) ≤ c`, both recorded.
#[derive(Clone, Debug)]
pub struct InterpolationCertificate {
    pub a: Element,
    pub checks: Vec<Check>,
}

/// Checks the ordering hypothesis in the pushout corner; returns the
/// violating atom on failure.
fn corner_hypothesis(
    store: &mut TermStore,
    p: &InterpolationProblem,
) -> Result<(), InterpolationError> {
    let b_corner = p.pushout.from_left.apply(store, &p.b)?;
    let c_corner = p.pushout.from_right.apply(store, &p.c)?;
    if store.leq(b_corner.value(), c_corner.value())? {
        return Ok(());
    }
    let excess = {
        let nc = store.not(c_corner.value())?;
        store.meet(b_corner.value(), &nc)?
    };
    let witness = store
        .atoms(&excess)?
        .into_iter()
        .next()
        .ok_or_else(|| InterpolationError::Internal("non-ordered pair with empty excess".into()))?;
    Err(InterpolationError::HypothesisFails { witness })
}

/// Returns the least interpolant: the join of the dual images of the atoms
/// below `b`, verified on both sides before returning.
pub fn interpolate(
    store: &mut TermStore,
    p: &InterpolationProblem,
) -> Result<InterpolationCertificate, InterpolationError> {
    corner_hypothesis(store, p)?;
    let f = &p.pushout.left;
    let g = &p.pushout.right;
    let apex = f.source().clone();

    // Least a with b ≤ f(a): every atom below b must keep its dual point
    // inside a, and that condition is also sufficient.
    let mut parts = Vec::new();
    for beta in p.b.atoms(store)? {
        let alpha = f.dual_atom(store, &beta)?;
        parts.push(store.minterm(&alpha));
    }
    let value = store.big_join(apex.ctx(), &parts)?;
    let a = apex.element_from_fn(store, &value)?;

    let fa = f.apply(store, &a)?;
    let ga = g.apply(store, &a)?;
    let checks = vec![
        Check::leq(store, "b ≤ f(a)", p.b.value(), fa.value())?,
        Check::leq(store, "g(a) ≤ c", ga.value(), p.c.value())?,
    ];
    if !all_ok(&checks) {
        return Err(InterpolationError::Internal(
            "interpolant failed re-verification".into(),
        ));
    }
    Ok(InterpolationCertificate { a, checks })
}

/// The exact interval of valid interpolants for free embedding legs.
#[derive(Clone, Debug)]
pub struct InterpolationInterval {
    pub lo: Element,
    pub hi: Element,
    pub checks: Vec<Check>,
}

/// Asserts that a leg embeds a free algebra generator-to-generator and
/// returns the target-side names of the apex generators, in apex order.
fn free_embedding_names(
    store: &mut TermStore,
    leg: &Hom,
    which: &str,
) -> Result<Vec<String>, InterpolationError> {
    if !leg.source().relator().is_true() || !leg.target().relator().is_true() {
        return Err(InterpolationError::NotFreeLegs(format!(
            "{which} leg involves a proper relator"
        )));
    }
    let mut names = Vec::with_capacity(leg.source().ctx().len());
    for (x, img) in leg.source().ctx().iter().zip(leg.gen_images()) {
        let support = store.support(img.value())?;
        let name = match support.as_slice() {
            [n] => n.clone(),
            _ => {
                return Err(InterpolationError::NotFreeLegs(format!(
                    "{which} leg sends {x} to a non-generator"
                )));
            }
        };
        let gen = store.generator(leg.target().ctx(), &name)?;
        if &gen != img.value() {
            return Err(InterpolationError::NotFreeLegs(format!(
                "{which} leg sends {x} to a non-generator"
            )));
        }
        if names.contains(&name) {
            return Err(InterpolationError::NotFreeLegs(format!(
                "{which} leg repeats the image generator {name}"
            )));
        }
        names.push(name);
    }
    Ok(names)
}

/// Pulls a target-side function back along a free embedding leg by
/// renaming image generators home and projecting out the rest; `forall`
/// selects the universal projection.
fn project_along(
    store: &mut TermStore,
    leg: &Hom,
    image_names: &[String],
    value: &CanonicalFn,
    forall: bool,
) -> Result<CanonicalFn, InterpolationError> {
    let apex_ctx = leg.source().ctx();
    let mut rename = HashMap::new();
    for (x, n) in apex_ctx.iter().zip(image_names) {
        rename.insert(n.clone(), x.clone());
    }
    // Non-image generators move out of the way of apex names.
    let mut spares = Vec::new();
    for n in leg.target().ctx().iter() {
        if !image_names.contains(n) {
            let fresh = format!("{n}#e");
            spares.push(fresh.clone());
            rename.insert(n.clone(), fresh);
        }
    }
    let renamed_ctx = GeneratorContext::new(
        leg.target()
            .ctx()
            .iter()
            .map(|n| rename.get(n).cloned().unwrap_or_else(|| n.clone())),
    )?;
    let moved = store.transport(value, &renamed_ctx, &rename)?;
    let spare_ctx = GeneratorContext::new(spares)?;
    let projected = if forall {
        store.project_forall(&moved, &spare_ctx)?
    } else {
        store.project_exists(&moved, &spare_ctx)?
    };
    Ok(store.restrict_context(&projected, apex_ctx)?)
}

/// Computes the endpoints `[lo, hi]` such that `a` interpolates the
/// problem exactly when `lo ≤ a ≤ hi`.  Requires both legs to embed free
/// algebras generator-to-generator.
pub fn interpolation_interval(
    store: &mut TermStore,
    p: &InterpolationProblem,
) -> Result<InterpolationInterval, InterpolationError> {
    let f = &p.pushout.left;
    let g = &p.pushout.right;
    let f_names = free_embedding_names(store, f, "left")?;
    let g_names = free_embedding_names(store, g, "right")?;
    corner_hypothesis(store, p)?;
    let apex = f.source().clone();

    let lo_fn = project_along(store, f, &f_names, p.b.value(), false)?;
    let hi_fn = project_along(store, g, &g_names, p.c.value(), true)?;
    let lo = apex.element_from_fn(store, &lo_fn)?;
    let hi = apex.element_from_fn(store, &hi_fn)?;

    let f_lo = f.apply(store, &lo)?;
    let g_lo = g.apply(store, &lo)?;
    let f_hi = f.apply(store, &hi)?;
    let g_hi = g.apply(store, &hi)?;
    let checks = vec![
        Check::leq(store, "lo ≤ hi", lo.value(), hi.value())?,
        Check::leq(store, "b ≤ f(lo)", p.b.value(), f_lo.value())?,
        Check::leq(store, "g(lo) ≤ c", g_lo.value(), p.c.value())?,
        Check::leq(store, "b ≤ f(hi)", p.b.value(), f_hi.value())?,
        Check::leq(store, "g(hi) ≤ c", g_hi.value(), p.c.value())?,
    ];
    if !all_ok(&checks) {
        return Err(InterpolationError::Internal(
            "interval endpoints failed re-verification".into(),
        ));
    }
    Ok(InterpolationInterval { lo, hi, checks })
}

/// A definability instance: a constraint `b` over generators `X`, of which
/// the sub-context `Z` is to be kept.
#[derive(Clone, Debug)]
pub struct RetractionProblem {
    x: GeneratorContext,
    z: GeneratorContext,
    b: CanonicalFn,
}

impl RetractionProblem {
    /// Builds a problem; `z`'s names must all occur in `x` (they are
    /// reordered to `x`'s order), and `b`'s context must be `x` or a
    /// sub-context of it.
    pub fn new(
        store: &mut TermStore,
        x: &GeneratorContext,
        z: &GeneratorContext,
        b: &CanonicalFn,
    ) -> Result<Self, InterpolationError> {
        for n in z.iter() {
            if !x.contains(n) {
                return Err(InterpolationError::Term(TermError::UnknownGenerator(n.clone())));
            }
        }
        let z = x.intersection(z);
        let b = store.widen(b, x)?;
        Ok(RetractionProblem { x: x.clone(), z, b })
    }

    pub fn kept(&self) -> &GeneratorContext {
        &self.z
    }

    pub fn dependent(&self) -> GeneratorContext {
        self.x.difference(&self.z)
    }

    pub fn constraint(&self) -> &CanonicalFn {
        &self.b
    }
}

/// Outcome of the determinacy check: either the constraint pins down the
/// dependent generators, or two satisfying assignments witness otherwise.
#[derive(Clone, Debug)]
pub enum StarOutcome {
    Holds,
    Violated { left: Assignment, right: Assignment },
}

impl StarOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, StarOutcome::Holds)
    }
}

/// Decides whether `b` determines the generators outside `Z`: any two
/// satisfying assignments that agree on `Z` must agree everywhere.  The
/// check duplicates the dependent generators with primed copies and asks
/// whether both copies of `b` force the copies to coincide.
pub fn check_star(
    store: &mut TermStore,
    rp: &RetractionProblem,
) -> Result<StarOutcome, InterpolationError> {
    let dep = rp.dependent();
    let ext = rp.x.concat(&dep.primed())?;
    let left_copy = store.widen(&rp.b, &ext)?;
    let rename: HashMap<String, String> =
        dep.iter().map(|y| (y.clone(), format!("{y}'"))).collect();
    let right_copy = store.transport(&rp.b, &ext, &rename)?;
    let both = store.meet(&left_copy, &right_copy)?;

    let mut agreements = Vec::new();
    for y in dep.iter() {
        let orig = store.generator(&ext, y)?;
        let copy = store.generator(&ext, &format!("{y}'"))?;
        agreements.push(store.iff(&orig, &copy)?);
    }
    let agree = store.big_meet(&ext, &agreements)?;
    if store.leq(&both, &agree)? {
        return Ok(StarOutcome::Holds);
    }
    let disagree = store.not(&agree)?;
    let bad = store.meet(&both, &disagree)?;
    let w = store
        .atoms(&bad)?
        .into_iter()
        .next()
        .ok_or_else(|| InterpolationError::Internal("violation without witness".into()))?;
    let left_bits = rp.x.iter().map(|n| w.get(n).unwrap()).collect();
    let right_bits = rp
        .x
        .iter()
        .map(|n| {
            if rp.z.contains(n) {
                w.get(n).unwrap()
            } else {
                w.get(&format!("{n}'")).unwrap()
            }
        })
        .collect();
    Ok(StarOutcome::Violated {
        left: Assignment::new(rp.x.clone(), left_bits),
        right: Assignment::new(rp.x.clone(), right_bits),
    })
}

/// A synthesized retraction with its verification trail.
#[derive(Clone, Debug)]
pub struct SynthesizedRetraction {
    /// The retraction `h : K(X) → K(Z)`; kept generators map to themselves.
    pub h: Hom,
    /// The inclusion `K(Z) → K(X)` that `h` retracts.
    pub inclusion: Hom,
    pub checks: Vec<Check>,
}

/// Synthesizes the least retraction compatible with `b`: each dependent
/// generator `y` receives the existential projection of `b ∧ y` onto `Z`.
/// The certificate verifies, per dependent generator, the sandwich
/// `b ∧ y ≤ i(h(y)) ≤ b → y`; that `h` retracts the inclusion; and the
/// exact reconstruction `b = i(h(b)) ∧ ⋀_y (i(h(y)) ↔ y)`.
pub fn synthesize_retraction(
    store: &mut TermStore,
    rp: &RetractionProblem,
) -> Result<SynthesizedRetraction, InterpolationError> {
    if let StarOutcome::Violated { left, right } = check_star(store, rp)? {
        return Err(InterpolationError::StarViolated { left, right });
    }
    let kx = Presentation::free(store, &rp.x);
    let kz = Presentation::free(store, &rp.z);
    let dep = rp.dependent();

    let mut images = Vec::with_capacity(rp.x.len());
    for n in rp.x.iter() {
        let value = if rp.z.contains(n) {
            store.generator(&rp.z, n)?
        } else {
            let y = store.generator(&rp.x, n)?;
            let by = store.meet(&rp.b, &y)?;
            let shadow = store.project_exists(&by, &dep)?;
            store.restrict_context(&shadow, &rp.z)?
        };
        images.push(kz.element_from_fn(store, &value)?);
    }
    let h = Hom::new(store, &kx, &kz, images)?;

    let mut incl_images = Vec::with_capacity(rp.z.len());
    for n in rp.z.iter() {
        let g = store.generator(&rp.x, n)?;
        incl_images.push(kx.element_from_fn(store, &g)?);
    }
    let inclusion = Hom::new(store, &kz, &kx, incl_images)?;

    let mut checks = Vec::new();
    // Per-generator sandwich for the dependent generators.
    let mut reconstruction = Vec::new();
    for n in dep.iter() {
        let y = store.generator(&rp.x, n)?;
        let hy = {
            let pos = rp.x.position(n).expect("dependent generator is in x");
            h.gen_images()[pos].clone()
        };
        let lifted = store.widen(hy.value(), &rp.x)?;
        let lower = store.meet(&rp.b, &y)?;
        let upper = store.implies(&rp.b, &y)?;
        checks.push(Check::leq(store, format!("b ∧ {n} ≤ i(h({n}))"), &lower, &lifted)?);
        checks.push(Check::leq(store, format!("i(h({n})) ≤ b → {n}"), &lifted, &upper)?);
        reconstruction.push(store.iff(&lifted, &y)?);
    }
    // h retracts the inclusion.
    let around = h.compose(store, &inclusion)?;
    let id_kz = Hom::identity(store, &kz)?;
    checks.push(Check::flag("h ∘ i is the identity on the kept algebra", around == id_kz));
    // Exact reconstruction of b from its image and the definitions.
    let b_elem = kx.element_from_fn(store, &rp.b)?;
    let hb = h.apply(store, &b_elem)?;
    let hb_lifted = store.widen(hb.value(), &rp.x)?;
    reconstruction.insert(0, hb_lifted);
    let rhs = store.big_meet(&rp.x, &reconstruction)?;
    checks.push(Check::equal_fn(
        store,
        "b = i(h(b)) ∧ ⋀ (i(h(y)) ↔ y)",
        &rp.b,
        &rhs,
    )?);

    if !all_ok(&checks) {
        return Err(InterpolationError::Internal(
            "retraction certificate failed verification".into(),
        ));
    }
    Ok(SynthesizedRetraction { h, inclusion, checks })
}
