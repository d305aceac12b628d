//! The syntactic category of the two-element theory, its limits and
//! colimits, and the contravariant functor into finitely presented
//! algebras, together with finite Stone duality and a sampled
//! verification that the functor is an equivalence.
//!
//! Objects pair a context with a canonical quantifier-and-equality-free
//! class over it; morphisms are stored as canonical graphs over the
//! disjoint union of the source context and the target context with every
//! target name suffixed `'`.  Functionality of a graph is decided by the
//! determinacy check (the graph must pin down the primed generators from
//! the unprimed ones) and totality by an explicit projection inequality,
//! so morphism equality is plain handle equality of graphs.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{enumerate_homs, hom_from_dual_map, AlgebraError, Hom, Presentation};
use crate::check::{all_ok, Check};
use crate::interpolation::{
    check_star, synthesize_retraction, InterpolationError, RetractionProblem, StarOutcome,
};
use crate::store::{CanonicalFn, TermStore};
use crate::term::{Assignment, GeneratorContext, TermError};

#[derive(Debug, Clone, Error)]
pub enum SynError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Interpolation(#[from] InterpolationError),
    #[error("generator name {0} is reserved (object names must not end with ')")]
    ReservedName(String),
    /// The graph relates one source point to two target points.
    #[error("graph is not functional: {left} and {right} relate the same source point")]
    NotFunctional { left: Assignment, right: Assignment },
    /// The graph misses the witnessed source point entirely.
    #[error("graph is not total: no image for {witness}")]
    NotTotal { witness: Assignment },
    #[error("morphisms are not composable: target and source objects differ")]
    CompositionMismatch,
    #[error("objects do not match: {0}")]
    ObjectMismatch(String),
    #[error("the data does not commute: {0}")]
    DoesNotCommute(String),
    #[error("internal verification failed: {0}")]
    Internal(String),
}

// ---------------------------------------------------------------------
// Objects
// ---------------------------------------------------------------------

/// An object: a context together with a canonical class over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynObject {
    ctx: GeneratorContext,
    alpha: CanonicalFn,
}

impl SynObject {
    /// Builds an object.  Names ending in `'` are reserved for the primed
    /// copies used by graphs and must not occur in object contexts.
    pub fn new(
        store: &mut TermStore,
        ctx: &GeneratorContext,
        alpha: &CanonicalFn,
    ) -> Result<SynObject, SynError> {
        for n in ctx.iter() {
            if n.ends_with('\'') {
                return Err(SynError::ReservedName(n.clone()));
            }
        }
        let alpha = store.widen(alpha, ctx)?;
        Ok(SynObject { ctx: ctx.clone(), alpha })
    }

    /// The terminal object: empty context, no constraint.
    pub fn terminal(store: &TermStore) -> SynObject {
        let ctx = GeneratorContext::empty();
        let alpha = store.top(&ctx);
        SynObject { ctx, alpha }
    }

    /// The generic two-point object: one generator, no constraint.  Its
    /// points are classified by the relation symbol.
    pub fn generic(store: &TermStore) -> SynObject {
        let ctx = GeneratorContext::numbered(1);
        let alpha = store.top(&ctx);
        SynObject { ctx, alpha }
    }

    pub fn ctx(&self) -> &GeneratorContext {
        &self.ctx
    }

    pub fn alpha(&self) -> &CanonicalFn {
        &self.alpha
    }

    /// The points of the object: the satisfying assignments of its class.
    pub fn points(&self, store: &TermStore) -> Result<Vec<Assignment>, SynError> {
        Ok(store.atoms(&self.alpha)?)
    }
}

fn graph_ctx(source: &SynObject, target: &SynObject) -> Result<GeneratorContext, SynError> {
    Ok(source.ctx.concat(&target.ctx.primed())?)
}

/// Renames `f`'s generators by appending a suffix, into `target`.
fn lift_suffixed(
    store: &mut TermStore,
    f: &CanonicalFn,
    suffix: &str,
    target: &GeneratorContext,
) -> Result<CanonicalFn, SynError> {
    let rename: HashMap<String, String> =
        f.ctx().iter().map(|n| (n.clone(), format!("{n}{suffix}"))).collect();
    Ok(store.transport(f, target, &rename)?)
}

// ---------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------

/// A morphism: a canonical functional, total graph over the source
/// context joined with the primed target context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynMorphism {
    source: SynObject,
    target: SynObject,
    graph: CanonicalFn,
}

impl SynMorphism {
    pub fn source(&self) -> &SynObject {
        &self.source
    }

    pub fn target(&self) -> &SynObject {
        &self.target
    }

    pub fn graph(&self) -> &CanonicalFn {
        &self.graph
    }
}

/// Builds a morphism from a graph, normalizing it into the classes (the
/// stored graph is `graph ∧ α ∧ β'`) and verifying functionality and
/// totality.  Functionality demands the graph determine the primed
/// generators from the unprimed ones; totality demands `α` entail the
/// projection of the graph.
pub fn mk_morphism(
    store: &mut TermStore,
    source: &SynObject,
    target: &SynObject,
    graph: &CanonicalFn,
) -> Result<SynMorphism, SynError> {
    let gctx = graph_ctx(source, target)?;
    let g = store.widen(graph, &gctx)?;
    let a = store.widen(&source.alpha, &gctx)?;
    let b = lift_suffixed(store, &target.alpha, "'", &gctx)?;
    let graph = {
        let ab = store.meet(&a, &b)?;
        store.meet(&g, &ab)?
    };

    let rp = RetractionProblem::new(store, &gctx, &source.ctx, &graph)?;
    if let StarOutcome::Violated { left, right } = check_star(store, &rp)? {
        return Err(SynError::NotFunctional { left, right });
    }

    let image = store.project_exists(&graph, &target.ctx.primed())?;
    if !store.leq(&a, &image)? {
        let missed = {
            let ni = store.not(&image)?;
            store.meet(&a, &ni)?
        };
        let atom = store
            .atoms(&missed)?
            .into_iter()
            .next()
            .ok_or_else(|| SynError::Internal("totality failure without witness".into()))?;
        let bits = source.ctx.iter().map(|n| atom.get(n).expect("graph context")).collect();
        return Err(SynError::NotTotal {
            witness: Assignment::new(source.ctx.clone(), bits),
        });
    }

    Ok(SynMorphism { source: source.clone(), target: target.clone(), graph })
}

/// The identity morphism: `α ∧ ⋀ₓ (x ↔ x')`.
pub fn identity(store: &mut TermStore, o: &SynObject) -> Result<SynMorphism, SynError> {
    let gctx = graph_ctx(o, o)?;
    let mut parts = Vec::with_capacity(o.ctx.len());
    for n in o.ctx.iter() {
        let x = store.generator(&gctx, n)?;
        let x1 = store.generator(&gctx, &format!("{n}'"))?;
        parts.push(store.iff(&x, &x1)?);
    }
    let diag = store.big_meet(&gctx, &parts)?;
    mk_morphism(store, o, o, &diag)
}

/// Composition `g ∘ f`: conjoin the graphs over a three-block context
/// (middle names doubled-primed) and project the middle away.  The
/// projection is exact because `f`'s functionality makes the middle
/// point unique.
pub fn compose(
    store: &mut TermStore,
    g: &SynMorphism,
    f: &SynMorphism,
) -> Result<SynMorphism, SynError> {
    if f.target != g.source {
        return Err(SynError::CompositionMismatch);
    }
    let mid = &f.target.ctx;
    let mid2: GeneratorContext = mid.primed().primed();
    let big = f.source.ctx.concat(&mid2)?.concat(&g.target.ctx.primed())?;

    let f_rename: HashMap<String, String> =
        mid.iter().map(|n| (format!("{n}'"), format!("{n}''"))).collect();
    let fg = store.transport(&f.graph, &big, &f_rename)?;
    let g_rename: HashMap<String, String> =
        mid.iter().map(|n| (n.clone(), format!("{n}''"))).collect();
    let gg = store.transport(&g.graph, &big, &g_rename)?;

    let both = store.meet(&fg, &gg)?;
    let projected = store.project_exists(&both, &mid2)?;
    let gctx = graph_ctx(&f.source, &g.target)?;
    let graph = store.restrict_context(&projected, &gctx)?;
    mk_morphism(store, &f.source, &g.target, &graph)
}

/// Monomorphy, decided on the transposed graph: rebuild the graph with
/// the target unprimed and the source primed, and ask whether it
/// determines the source point from the target point.
pub fn is_mono(store: &mut TermStore, f: &SynMorphism) -> Result<bool, SynError> {
    let tctx = f.target.ctx.concat(&f.source.ctx.primed())?;
    let mut rename: HashMap<String, String> = f
        .target
        .ctx
        .iter()
        .map(|n| (format!("{n}'"), n.clone()))
        .collect();
    for n in f.source.ctx.iter() {
        rename.insert(n.clone(), format!("{n}'"));
    }
    let transposed = store.transport(&f.graph, &tctx, &rename)?;
    let rp = RetractionProblem::new(store, &tctx, &f.target.ctx, &transposed)?;
    Ok(check_star(store, &rp)?.holds())
}

/// The subobject lattice of an object: the down-set of its class, i.e.
/// all joins of subsets of its points, in subset-mask order.
pub fn subobjects(store: &mut TermStore, o: &SynObject) -> Result<Vec<CanonicalFn>, SynError> {
    let atoms = o.points(store)?;
    assert!(atoms.len() <= 12, "subobject lattice too large to enumerate");
    let minterms: Vec<CanonicalFn> = atoms.iter().map(|a| store.minterm(a)).collect();
    let mut out = Vec::with_capacity(1 << atoms.len());
    for mask in 0..(1u32 << atoms.len()) {
        let chosen: Vec<CanonicalFn> = minterms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, m)| m.clone())
            .collect();
        out.push(store.big_join(&o.ctx, &chosen)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Limits and colimits
// ---------------------------------------------------------------------

/// A finite product with its projections.
#[derive(Clone, Debug)]
pub struct SynProduct {
    pub object: SynObject,
    pub factors: Vec<SynObject>,
    pub projections: Vec<SynMorphism>,
}

/// The product of finitely many objects: concatenate the contexts (each
/// factor's names suffixed `#k`) and conjoin the lifted classes.  The
/// empty product is the terminal object.
pub fn product(store: &mut TermStore, factors: &[SynObject]) -> Result<SynProduct, SynError> {
    let mut ctx = GeneratorContext::empty();
    for (k, f) in factors.iter().enumerate() {
        let renamed = GeneratorContext::new(f.ctx.iter().map(|n| format!("{n}#{k}")))?;
        ctx = ctx.concat(&renamed)?;
    }
    let mut parts = Vec::with_capacity(factors.len());
    for (k, f) in factors.iter().enumerate() {
        parts.push(lift_suffixed(store, &f.alpha, &format!("#{k}"), &ctx)?);
    }
    let alpha = store.big_meet(&ctx, &parts)?;
    let object = SynObject::new(store, &ctx, &alpha)?;

    let mut projections = Vec::with_capacity(factors.len());
    for (k, f) in factors.iter().enumerate() {
        let gctx = graph_ctx(&object, f)?;
        let mut diag = Vec::with_capacity(f.ctx.len());
        for n in f.ctx.iter() {
            let here = store.generator(&gctx, &format!("{n}#{k}"))?;
            let there = store.generator(&gctx, &format!("{n}'"))?;
            diag.push(store.iff(&here, &there)?);
        }
        let graph = store.big_meet(&gctx, &diag)?;
        projections.push(mk_morphism(store, &object, f, &graph)?);
    }
    Ok(SynProduct { object, factors: factors.to_vec(), projections })
}

impl SynProduct {
    /// The unique morphism into the product whose composites with the
    /// projections are the given legs.
    pub fn mediate_cone(
        &self,
        store: &mut TermStore,
        legs: &[SynMorphism],
    ) -> Result<SynMorphism, SynError> {
        if legs.len() != self.factors.len() {
            return Err(SynError::ObjectMismatch("one leg per factor is required".into()));
        }
        let apex = match legs.first() {
            Some(l) => l.source.clone(),
            None => SynObject::terminal(store),
        };
        for (k, l) in legs.iter().enumerate() {
            if l.source != apex {
                return Err(SynError::ObjectMismatch("legs have different sources".into()));
            }
            if l.target != self.factors[k] {
                return Err(SynError::ObjectMismatch(format!(
                    "leg {k} does not land in factor {k}"
                )));
            }
        }
        let gctx = graph_ctx(&apex, &self.object)?;
        let mut parts = Vec::with_capacity(legs.len());
        for (k, l) in legs.iter().enumerate() {
            // Source names stay; the leg's primed target names pick up #k.
            let rename: HashMap<String, String> = l
                .target
                .ctx
                .iter()
                .map(|n| (format!("{n}'"), format!("{n}#{k}'")))
                .collect();
            parts.push(store.transport(&l.graph, &gctx, &rename)?);
        }
        let graph = store.big_meet(&gctx, &parts)?;
        mk_morphism(store, &apex, &self.object, &graph)
    }
}

/// A binary coproduct with its injections.
#[derive(Clone, Debug)]
pub struct SynCoproduct {
    pub object: SynObject,
    pub left: SynObject,
    pub right: SynObject,
    pub injections: (SynMorphism, SynMorphism),
}

const COPRODUCT_TAG: &str = "@c";

/// The binary coproduct: a tag generator selects the summand, the
/// selected summand's class holds with its names suffixed `#0`/`#1`, and
/// the other summand's generators are pinned false.  Point counts add.
pub fn coproduct(
    store: &mut TermStore,
    left: &SynObject,
    right: &SynObject,
) -> Result<SynCoproduct, SynError> {
    let tag_ctx = GeneratorContext::new([COPRODUCT_TAG])?;
    let left_ctx = GeneratorContext::new(left.ctx.iter().map(|n| format!("{n}#0")))?;
    let right_ctx = GeneratorContext::new(right.ctx.iter().map(|n| format!("{n}#1")))?;
    let ctx = tag_ctx.concat(&left_ctx)?.concat(&right_ctx)?;

    let tag = store.generator(&ctx, COPRODUCT_TAG)?;
    let no_tag = store.not(&tag)?;
    let a0 = lift_suffixed(store, &left.alpha, "#0", &ctx)?;
    let b1 = lift_suffixed(store, &right.alpha, "#1", &ctx)?;
    let pin = |store: &mut TermStore, block: &GeneratorContext| -> Result<CanonicalFn, SynError> {
        let mut offs = Vec::with_capacity(block.len());
        for n in block.iter() {
            let g = store.generator(&ctx, n)?;
            offs.push(store.not(&g)?);
        }
        Ok(store.big_meet(&ctx, &offs)?)
    };
    let right_off = pin(store, &right_ctx)?;
    let left_off = pin(store, &left_ctx)?;
    let left_part = store.big_meet(&ctx, &[no_tag, a0, right_off])?;
    let right_part = store.big_meet(&ctx, &[tag, b1, left_off])?;
    let alpha = store.join(&left_part, &right_part)?;
    let object = SynObject::new(store, &ctx, &alpha)?;

    let mut inject = |summand: &SynObject,
                      suffix: &str,
                      tag_on: bool|
     -> Result<SynMorphism, SynError> {
        let gctx = graph_ctx(summand, &object)?;
        let t = store.generator(&gctx, &format!("{COPRODUCT_TAG}'"))?;
        let mut parts = vec![if tag_on { t } else { store.not(&t)? }];
        for n in summand.ctx.iter() {
            let x = store.generator(&gctx, n)?;
            let x_img = store.generator(&gctx, &format!("{n}{suffix}'"))?;
            parts.push(store.iff(&x, &x_img)?);
        }
        let other = if tag_on { &left_ctx } else { &right_ctx };
        for n in other.iter() {
            let g = store.generator(&gctx, &format!("{n}'"))?;
            parts.push(store.not(&g)?);
        }
        let graph = store.big_meet(&gctx, &parts)?;
        mk_morphism(store, summand, &object, &graph)
    };
    let inl = inject(left, "#0", false)?;
    let inr = inject(right, "#1", true)?;
    Ok(SynCoproduct {
        object,
        left: left.clone(),
        right: right.clone(),
        injections: (inl, inr),
    })
}

impl SynCoproduct {
    /// The unique morphism out of the coproduct whose composites with the
    /// injections are `u` and `v`.
    pub fn mediate_cocone(
        &self,
        store: &mut TermStore,
        u: &SynMorphism,
        v: &SynMorphism,
    ) -> Result<SynMorphism, SynError> {
        if u.source != self.left || v.source != self.right {
            return Err(SynError::ObjectMismatch(
                "cocone legs must start at the summands".into(),
            ));
        }
        if u.target != v.target {
            return Err(SynError::ObjectMismatch("cocone legs have different targets".into()));
        }
        let gctx = graph_ctx(&self.object, &u.target)?;
        let tag = store.generator(&gctx, COPRODUCT_TAG)?;
        let no_tag = store.not(&tag)?;
        let u_rename: HashMap<String, String> =
            self.left.ctx.iter().map(|n| (n.clone(), format!("{n}#0"))).collect();
        let ug = store.transport(&u.graph, &gctx, &u_rename)?;
        let v_rename: HashMap<String, String> =
            self.right.ctx.iter().map(|n| (n.clone(), format!("{n}#1"))).collect();
        let vg = store.transport(&v.graph, &gctx, &v_rename)?;
        let left_part = store.meet(&no_tag, &ug)?;
        let right_part = store.meet(&tag, &vg)?;
        let graph = store.join(&left_part, &right_part)?;
        mk_morphism(store, &self.object, &u.target, &graph)
    }
}

/// An equalizer with its inclusion.
#[derive(Clone, Debug)]
pub struct SynEqualizer {
    pub object: SynObject,
    pub inclusion: SynMorphism,
}

/// The equalizer of a parallel pair: the source context with class the
/// projection of the conjoined graphs.
pub fn equalizer(
    store: &mut TermStore,
    f: &SynMorphism,
    g: &SynMorphism,
) -> Result<SynEqualizer, SynError> {
    if f.source != g.source || f.target != g.target {
        return Err(SynError::ObjectMismatch("equalizer needs a parallel pair".into()));
    }
    let both = store.meet(&f.graph, &g.graph)?;
    let projected = store.project_exists(&both, &f.target.ctx.primed())?;
    let alpha = store.restrict_context(&projected, &f.source.ctx)?;
    let object = SynObject::new(store, &f.source.ctx, &alpha)?;

    let gctx = graph_ctx(&object, &f.source)?;
    let mut diag = Vec::with_capacity(object.ctx.len());
    for n in object.ctx.iter() {
        let x = store.generator(&gctx, n)?;
        let x1 = store.generator(&gctx, &format!("{n}'"))?;
        diag.push(store.iff(&x, &x1)?);
    }
    let graph = store.big_meet(&gctx, &diag)?;
    let inclusion = mk_morphism(store, &object, &f.source, &graph)?;
    Ok(SynEqualizer { object, inclusion })
}

impl SynEqualizer {
    /// Factors a fork through the equalizer: `h` must equalize the pair
    /// the equalizer was built from (checked by the caller composing), and
    /// land inside the equalizer's class.
    pub fn mediate_fork(
        &self,
        store: &mut TermStore,
        h: &SynMorphism,
    ) -> Result<SynMorphism, SynError> {
        if h.target != self.inclusion.target {
            return Err(SynError::ObjectMismatch("fork must land in the ambient object".into()));
        }
        let gctx = graph_ctx(&h.source, &self.object)?;
        let graph = store.widen(&h.graph, &gctx)?;
        match mk_morphism(store, &h.source, &self.object, &graph) {
            Ok(m) => Ok(m),
            Err(SynError::NotTotal { witness }) => Err(SynError::DoesNotCommute(format!(
                "the fork does not factor: no image inside the equalizer for {witness}"
            ))),
            Err(e) => Err(e),
        }
    }
}

// ---------------------------------------------------------------------
// The functor into finitely presented algebras
// ---------------------------------------------------------------------

/// The object part of the contravariant functor: present the algebra by
/// the object's own context and class.
pub fn f2_object(o: &SynObject) -> Presentation {
    Presentation::from_relator(o.alpha.clone())
}

/// The morphism part (direction-reversed): each target generator is sent
/// to the unique source element its primed copy is forced to by the
/// graph, extracted from the synthesized retraction of the graph onto the
/// source block.
pub fn f2_morphism(store: &mut TermStore, f: &SynMorphism) -> Result<Hom, SynError> {
    let gctx = graph_ctx(&f.source, &f.target)?;
    let rp = RetractionProblem::new(store, &gctx, &f.source.ctx, &f.graph)?;
    let syn = synthesize_retraction(store, &rp)?;
    if !all_ok(&syn.checks) {
        return Err(SynError::Internal("retraction certificate failed".into()));
    }
    let source_alg = f2_object(&f.target);
    let target_alg = f2_object(&f.source);
    let mut images = Vec::with_capacity(f.target.ctx.len());
    for n in f.target.ctx.iter() {
        let idx = gctx
            .position(&format!("{n}'"))
            .ok_or_else(|| SynError::Internal("primed name missing from graph context".into()))?;
        let value = syn.h.gen_images()[idx].value().clone();
        images.push(target_alg.element_from_fn(store, &value)?);
    }
    Ok(Hom::new(store, &source_alg, &target_alg, images)?)
}

// ---------------------------------------------------------------------
// Finite Stone duality
// ---------------------------------------------------------------------

/// The finite dual of a presented algebra: its atoms, as assignments, in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinDual {
    pub ctx: GeneratorContext,
    pub points: Vec<Assignment>,
}

pub fn stone_dual(store: &TermStore, a: &Presentation) -> Result<FinDual, SynError> {
    Ok(FinDual { ctx: a.ctx().clone(), points: a.atoms(store)? })
}

/// The function dual to a homomorphism: it runs contravariantly, from the
/// dual of the hom's target to the dual of its source; `map[i]` is the
/// index of the image of the `i`-th point.
#[derive(Clone, Debug)]
pub struct DualFunction {
    pub source: FinDual,
    pub target: FinDual,
    pub map: Vec<usize>,
}

pub fn dual_map(store: &TermStore, h: &Hom) -> Result<DualFunction, SynError> {
    let source = stone_dual(store, h.target())?;
    let target = stone_dual(store, h.source())?;
    let mut map = Vec::with_capacity(source.points.len());
    for p in &source.points {
        let image = h.dual_atom(store, p)?;
        let idx = target
            .points
            .iter()
            .position(|q| *q == image)
            .ok_or_else(|| SynError::Internal("dual image is not an atom".into()))?;
        map.push(idx);
    }
    Ok(DualFunction { source, target, map })
}

/// The algebra of subsets of an `n`-point set, presented over the
/// smallest numbered context that fits: the relator keeps the first `n`
/// assignments in lexicographic order.
pub fn powerset_algebra(store: &mut TermStore, n: usize) -> Result<Presentation, SynError> {
    let mut bits = 0usize;
    while (1usize << bits) < n.max(1) {
        bits += 1;
    }
    let ctx = GeneratorContext::numbered(bits);
    let top = store.top(&ctx);
    let all = store.atoms(&top)?;
    let minterms: Vec<CanonicalFn> = all[..n].iter().map(|a| store.minterm(a)).collect();
    let relator = store.big_join(&ctx, &minterms)?;
    Ok(Presentation::from_relator(relator))
}

/// The comparison isomorphism from the powerset algebra of `a`'s dual
/// onto `a`, built from the identity pairing of points and verified.
pub fn double_dual_iso(store: &mut TermStore, a: &Presentation) -> Result<Hom, SynError> {
    let n = a.atoms(store)?.len();
    let b = powerset_algebra(store, n)?;
    let identity_map: Vec<usize> = (0..n).collect();
    let h = hom_from_dual_map(store, &b, a, &identity_map)?;
    if !h.is_isomorphism(store)? {
        return Err(SynError::Internal("double-dual comparison is not invertible".into()));
    }
    Ok(h)
}

// ---------------------------------------------------------------------
// Hom-sets
// ---------------------------------------------------------------------

/// The number of morphisms between two objects: functions from the
/// source's points to the target's points.
pub fn hom_count(store: &TermStore, a: &SynObject, b: &SynObject) -> Result<u128, SynError> {
    let na = store.atoms(&a.alpha)?.len() as u32;
    let nb = store.atoms(&b.alpha)?.len() as u128;
    Ok(nb.pow(na))
}

/// Enumerates the hom-set by running over all functions from the source's
/// points to the target's points and converting each to a graph; every
/// returned morphism is re-verified by `mk_morphism`.
pub fn hom_set(
    store: &mut TermStore,
    a: &SynObject,
    b: &SynObject,
) -> Result<Vec<SynMorphism>, SynError> {
    let src = a.points(store)?;
    let tgt = b.points(store)?;
    let gctx = graph_ctx(a, b)?;
    if src.is_empty() {
        let empty = store.bot(&gctx);
        return Ok(vec![mk_morphism(store, a, b, &empty)?]);
    }
    if tgt.is_empty() {
        return Ok(Vec::new());
    }
    let total = (tgt.len() as u128).pow(src.len() as u32);
    assert!(total <= 100_000, "hom set too large to enumerate");

    let src_minterms: Vec<CanonicalFn> = {
        let raw: Vec<CanonicalFn> = src.iter().map(|p| store.minterm(p)).collect();
        raw.iter().map(|m| store.widen(m, &gctx)).collect::<Result<_, _>>()?
    };
    let tgt_minterms: Vec<CanonicalFn> = {
        let raw: Vec<CanonicalFn> = tgt.iter().map(|p| store.minterm(p)).collect();
        raw.iter()
            .map(|m| lift_suffixed(store, m, "'", &gctx))
            .collect::<Result<_, _>>()?
    };

    let mut out = Vec::with_capacity(total as usize);
    let mut map = vec![0usize; src.len()];
    loop {
        let mut parts = Vec::with_capacity(src.len());
        for (i, &j) in map.iter().enumerate() {
            parts.push(store.meet(&src_minterms[i], &tgt_minterms[j])?);
        }
        let graph = store.big_join(&gctx, &parts)?;
        out.push(mk_morphism(store, a, b, &graph)?);
        let mut k = 0;
        while k < map.len() {
            map[k] += 1;
            if map[k] < tgt.len() {
                break;
            }
            map[k] = 0;
            k += 1;
        }
        if k == map.len() {
            break;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Equivalence and universal-model reports
// ---------------------------------------------------------------------

/// Findings of the sampled equivalence verification.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub max_ctx: usize,
    pub objects_checked: usize,
    pub hom_sets_checked: usize,
    pub checks: Vec<Check>,
}

impl EquivalenceReport {
    pub fn all_ok(&self) -> bool {
        all_ok(&self.checks)
    }
}

/// Samples objects with contexts of at most `max_ctx` generators and
/// verifies, on every sampled pair, that the functor is bijective on
/// hom-sets (counts match the point-function count and the enumerated
/// algebra homs, and distinct morphisms stay distinct), an
/// order-isomorphism on subobject lattices, reflects isomorphisms, and is
/// essentially surjective.
pub fn check_equivalence_sample(
    store: &mut TermStore,
    max_ctx: usize,
    seed: u64,
) -> Result<EquivalenceReport, SynError> {
    assert!(max_ctx <= 3, "sampled verification is sized for small contexts");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // Object pool: exhaustive classes at ≤ 2 generators, sampled at 3.
    let mut pool = Vec::new();
    for n in 0..=max_ctx {
        let ctx = GeneratorContext::numbered(n);
        let rows = 1usize << n;
        if n <= 2 {
            for mask in 0..(1u32 << rows) {
                let bits: Vec<bool> = (0..rows).map(|r| mask & (1 << r) != 0).collect();
                let alpha = store.from_truth_table(&ctx, &bits)?;
                pool.push(SynObject::new(store, &ctx, &alpha)?);
            }
        } else {
            for _ in 0..8 {
                let bits: Vec<bool> = (0..rows).map(|_| rng.gen()).collect();
                let alpha = store.from_truth_table(&ctx, &bits)?;
                pool.push(SynObject::new(store, &ctx, &alpha)?);
            }
        }
    }

    // (c) Essential surjectivity: every presentation of bounded size is
    // hit by the functor, on the nose.
    let mut surjective = true;
    for o in &pool {
        let p = f2_object(o);
        if p.ctx() != &o.ctx || p.relator() != &o.alpha {
            surjective = false;
        }
    }
    checks.push(Check::flag(
        "every sampled presentation is the image of an object",
        surjective,
    ));

    // (b) Subobject lattices match elementwise.
    for o in pool.iter().filter(|o| o.ctx.len() <= 2) {
        let subs = subobjects(store, o)?;
        let p = f2_object(o);
        let elems = p.elements(store)?;
        let sub_set: HashSet<&CanonicalFn> = subs.iter().collect();
        let elem_values: Vec<&CanonicalFn> = elems.iter().map(|e| e.value()).collect();
        let same = sub_set.len() == subs.len()
            && elems.len() == subs.len()
            && elem_values.iter().all(|v| sub_set.contains(v));
        checks.push(Check::flag(
            format!("subobjects of a {}-generator object match the algebra's elements", o.ctx.len()),
            same,
        ));
    }

    // (a) Bijective on hom-sets, over sampled pairs kept small enough to
    // enumerate, plus isomorphism reflection.
    let mut hom_sets_checked = 0usize;
    let limit = 1024u128;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for _ in 0..60 {
        let i = rng.gen_range(0..pool.len());
        let j = rng.gen_range(0..pool.len());
        pairs.push((i, j));
    }
    for (i, j) in pairs {
        let a = pool[i].clone();
        let b = pool[j].clone();
        let expected = hom_count(store, &a, &b)?;
        if expected > limit || hom_count(store, &b, &a)? > limit {
            continue;
        }
        hom_sets_checked += 1;
        let homs = hom_set(store, &a, &b)?;
        checks.push(Check::equal_count(
            "enumerated morphisms match the point-function count",
            homs.len() as u128,
            expected,
        ));
        let distinct: HashSet<&CanonicalFn> = homs.iter().map(|m| &m.graph).collect();
        checks.push(Check::equal_count(
            "morphism graphs are pairwise distinct",
            distinct.len() as u128,
            homs.len() as u128,
        ));

        let pa = f2_object(&a);
        let pb = f2_object(&b);
        let alg = enumerate_homs(store, &pb, &pa)?;
        checks.push(Check::equal_count(
            "algebra homs in the reverse direction match",
            alg.len() as u128,
            homs.len() as u128,
        ));
        let mut images = HashSet::new();
        let mut reflected = true;
        for m in &homs {
            let h = f2_morphism(store, m)?;
            let key: Vec<CanonicalFn> =
                h.gen_images().iter().map(|e| e.value().clone()).collect();
            images.insert(key);
            if h.is_isomorphism(store)? {
                // The functor must reflect isomorphisms: find a two-sided
                // inverse among the enumerated morphisms.
                let back = hom_set(store, &b, &a)?;
                let id_a = identity(store, &a)?;
                let id_b = identity(store, &b)?;
                let mut invertible = false;
                for g in &back {
                    if compose(store, g, m)? == id_a && compose(store, m, g)? == id_b {
                        invertible = true;
                        break;
                    }
                }
                reflected &= invertible;
            }
        }
        checks.push(Check::equal_count(
            "the functor is injective on the hom-set",
            images.len() as u128,
            homs.len() as u128,
        ));
        checks.push(Check::flag("the functor reflects isomorphisms", reflected));
    }

    Ok(EquivalenceReport {
        max_ctx,
        objects_checked: pool.len(),
        hom_sets_checked,
        checks,
    })
}

/// Findings of the universal-model verification.
#[derive(Clone, Debug)]
pub struct UniversalModelReport {
    /// The generic object carrying the relation.
    pub object: SynObject,
    /// The relation, as a subobject of the generic object.
    pub relation: CanonicalFn,
    /// The algebra the functor assigns to the generic object.
    pub algebra: Presentation,
    pub checks: Vec<Check>,
}

impl UniversalModelReport {
    pub fn all_ok(&self) -> bool {
        all_ok(&self.checks)
    }
}

/// Verifies that the generic object, with the relation read as the
/// generator subobject, satisfies all four axioms under the subobject
/// semantics, and that the functor sends it to the free one-generator
/// algebra with the relation landing on the generator.
pub fn universal_model_check(store: &mut TermStore) -> Result<UniversalModelReport, SynError> {
    let h = SynObject::generic(store);
    let name = h.ctx.names()[0].clone();
    let relation = store.generator(&h.ctx, &name)?;
    let mut checks = Vec::new();

    // The two equality axioms, read on the square of the generic object.
    let square = product(store, &[h.clone(), h.clone()])?;
    let sq_ctx = square.object.ctx.clone();
    let g0 = store.generator(&sq_ctx, &format!("{name}#0"))?;
    let g1 = store.generator(&sq_ctx, &format!("{name}#1"))?;
    let equal = store.iff(&g0, &g1)?;
    let both = store.meet(&g0, &g1)?;
    checks.push(Check::leq(store, "relation twice forces the diagonal", &both, &equal)?);
    let neither = {
        let n0 = store.not(&g0)?;
        let n1 = store.not(&g1)?;
        store.meet(&n0, &n1)?
    };
    checks.push(Check::leq(
        store,
        "complement twice forces the diagonal",
        &neither,
        &equal,
    )?);

    // The two witness axioms: projecting the relation (or its complement)
    // to the terminal object is everything.
    let empty = GeneratorContext::empty();
    let proj = store.project_exists(&relation, &h.ctx)?;
    let collapsed = store.restrict_context(&proj, &empty)?;
    checks.push(Check::flag("the relation has a point", collapsed.is_true()));
    let co_relation = store.not(&relation)?;
    let proj = store.project_exists(&co_relation, &h.ctx)?;
    let collapsed = store.restrict_context(&proj, &empty)?;
    checks.push(Check::flag("the complement has a point", collapsed.is_true()));

    // The functor's value on the generic object and the relation.
    let algebra = f2_object(&h);
    checks.push(Check::flag(
        "the image algebra is free on one generator",
        algebra.relator().is_true() && algebra.ctx().len() == 1,
    ));
    checks.push(Check::equal_count(
        "the image algebra has four elements",
        algebra.element_count(store)?,
        4,
    ));
    let pushed = algebra.element_from_fn(store, &relation)?;
    let generator = store.generator(algebra.ctx(), &name)?;
    checks.push(Check::equal_fn(
        store,
        "the relation lands on the generator",
        pushed.value(),
        &generator,
    )?);

    // Functor identity law at the generic object.
    let id_syn = identity(store, &h)?;
    let f2_id = f2_morphism(store, &id_syn)?;
    let id_hom = Hom::identity(store, &algebra)?;
    checks.push(Check::flag(
        "the functor preserves the identity at the generic object",
        f2_id == id_hom,
    ));

    if !all_ok(&checks) {
        return Err(SynError::Internal("universal-model verification failed".into()));
    }
    Ok(UniversalModelReport { object: h, relation, algebra, checks })
}
