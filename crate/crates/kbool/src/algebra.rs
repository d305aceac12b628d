//! Finitely presented Boolean algebras, their elements, and homomorphisms.
//!
//! A [`Presentation`] is a generator context together with one relator: the
//! algebra presented is the quotient of the free algebra by the congruence
//! forcing the relator to the top.  Concretely we identify that quotient
//! with the principal ideal below the relator: an [`Element`] stores the
//! canonical function `relator ∧ t` for any representing term `t`, so
//! element equality is handle equality and never needs the congruence.
//!
//! A [`Hom`] between presented algebras is determined by the images of the
//! source generators.  Construction checks well-definedness — the target
//! relator must lie below the free image of the source relator — and
//! reports a witnessing atom when the check fails.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::check::Check;
use crate::store::{CanonicalFn, TermStore};
use crate::term::{Assignment, GeneratorContext, Term, TermError};

/// Errors from presentation and homomorphism manipulation.
#[derive(Debug, Clone, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Term(#[from] TermError),
    /// Generator images do not induce a homomorphism on the quotients; the
    /// assignment is an atom of the target where the lifted source relator
    /// fails.
    #[error("generator images are not well defined on the quotient; failing target atom {witness}")]
    NotWellDefined { witness: Assignment },
    /// An element was used with an algebra other than its owner.
    #[error("element does not belong to the expected algebra")]
    OwnerMismatch,
    /// Hom composition or application with mismatched endpoints.
    #[error("homomorphism endpoints do not match")]
    EndpointMismatch,
    /// `represent_on_generators` needs a surjection.
    #[error("homomorphism is not surjective")]
    NotSurjective,
    /// `represent_on_generators` needs a free source.
    #[error("homomorphism source is not free")]
    SourceNotFree,
    /// A mathematically guaranteed verification failed, indicating a bug.
    #[error("internal verification failed: {0}")]
    Internal(String),
}

/// A finitely presented Boolean algebra: a context and a relator over it.
///
/// Two presentations are equal when their contexts and relator handles are,
/// which by canonicity means they present literally the same quotient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presentation {
    ctx: GeneratorContext,
    relator: CanonicalFn,
}

impl Presentation {
    /// Presents the quotient of the free algebra on `ctx` by `relator`.
    pub fn new(
        store: &mut TermStore,
        ctx: &GeneratorContext,
        relator: &Term,
    ) -> Result<Presentation, AlgebraError> {
        let relator = store.eval(relator, ctx)?;
        Ok(Presentation { ctx: ctx.clone(), relator })
    }

    /// Presents the quotient by an already-canonical relator.
    pub fn from_relator(relator: CanonicalFn) -> Presentation {
        Presentation { ctx: relator.ctx().clone(), relator }
    }

    /// The free algebra on `ctx` (relator top).
    pub fn free(store: &TermStore, ctx: &GeneratorContext) -> Presentation {
        Presentation { ctx: ctx.clone(), relator: store.top(ctx) }
    }

    pub fn ctx(&self) -> &GeneratorContext {
        &self.ctx
    }

    pub fn relator(&self) -> &CanonicalFn {
        &self.relator
    }

    /// The one-element algebra has relator bottom.
    pub fn is_trivial(&self) -> bool {
        self.relator.is_false()
    }

    /// Atoms of the presented algebra: satisfying assignments of the
    /// relator, in lexicographic order.
    pub fn atoms(&self, store: &TermStore) -> Result<Vec<Assignment>, AlgebraError> {
        Ok(store.atoms(&self.relator)?)
    }

    pub fn atom_count(&self, store: &TermStore) -> Result<u128, AlgebraError> {
        Ok(store.count_atoms(&self.relator)?)
    }

    /// Cardinality of the presented algebra, `2^atom_count`.
    pub fn element_count(&self, store: &TermStore) -> Result<u128, AlgebraError> {
        let k = self.atom_count(store)?;
        assert!(k < 128, "algebra too large to count");
        Ok(1u128 << k)
    }

    /// The element represented by a term.
    pub fn element(&self, store: &mut TermStore, t: &Term) -> Result<Element, AlgebraError> {
        let v = store.eval(t, &self.ctx)?;
        self.element_from_fn(store, &v)
    }

    /// The element represented by a canonical function over this context.
    pub fn element_from_fn(
        &self,
        store: &mut TermStore,
        v: &CanonicalFn,
    ) -> Result<Element, AlgebraError> {
        let value = store.meet(&self.relator, v)?;
        Ok(Element { owner: self.clone(), value })
    }

    pub fn top_element(&self) -> Element {
        Element { owner: self.clone(), value: self.relator.clone() }
    }

    pub fn bot_element(&self, store: &TermStore) -> Element {
        Element { owner: self.clone(), value: store.bot(&self.ctx) }
    }

    /// Every element of the algebra, enumerated as joins of atom subsets in
    /// subset-mask order (atoms ordered lexicographically).  Only sensible
    /// for small algebras; asserts at most 16 atoms.
    pub fn elements(&self, store: &mut TermStore) -> Result<Vec<Element>, AlgebraError> {
        let atoms = self.atoms(store)?;
        assert!(atoms.len() <= 16, "algebra too large to enumerate");
        let minterms: Vec<CanonicalFn> = atoms.iter().map(|a| store.minterm(a)).collect();
        let mut out = Vec::with_capacity(1 << atoms.len());
        for mask in 0..(1usize << atoms.len()) {
            let subset: Vec<CanonicalFn> = minterms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, m)| m.clone())
                .collect();
            let value = store.big_join(&self.ctx, &subset)?;
            out.push(Element { owner: self.clone(), value });
        }
        Ok(out)
    }
}

/// An element of a presented algebra, stored as the canonical function
/// `relator ∧ t` for any representing term `t`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Element {
    owner: Presentation,
    value: CanonicalFn,
}

impl Element {
    pub fn owner(&self) -> &Presentation {
        &self.owner
    }

    pub fn value(&self) -> &CanonicalFn {
        &self.value
    }

    pub fn is_bot(&self) -> bool {
        self.value.is_false()
    }

    pub fn is_top(&self) -> bool {
        self.value == self.owner.relator
    }

    fn expect_owner(&self, owner: &Presentation) -> Result<(), AlgebraError> {
        if &self.owner != owner {
            return Err(AlgebraError::OwnerMismatch);
        }
        Ok(())
    }

    /// Meet inside the owning algebra.
    pub fn meet(&self, store: &mut TermStore, other: &Element) -> Result<Element, AlgebraError> {
        other.expect_owner(&self.owner)?;
        let value = store.meet(&self.value, &other.value)?;
        Ok(Element { owner: self.owner.clone(), value })
    }

    /// Join inside the owning algebra.
    pub fn join(&self, store: &mut TermStore, other: &Element) -> Result<Element, AlgebraError> {
        other.expect_owner(&self.owner)?;
        let value = store.join(&self.value, &other.value)?;
        Ok(Element { owner: self.owner.clone(), value })
    }

    /// Complement inside the owning algebra: `relator ∧ ¬value`.
    pub fn complement(&self, store: &mut TermStore) -> Result<Element, AlgebraError> {
        let n = store.not(&self.value)?;
        let value = store.meet(&self.owner.relator, &n)?;
        Ok(Element { owner: self.owner.clone(), value })
    }

    pub fn leq(&self, store: &mut TermStore, other: &Element) -> Result<bool, AlgebraError> {
        other.expect_owner(&self.owner)?;
        Ok(store.leq(&self.value, &other.value)?)
    }

    /// Atoms of the owning algebra lying below this element.
    pub fn atoms(&self, store: &TermStore) -> Result<Vec<Assignment>, AlgebraError> {
        Ok(store.atoms(&self.value)?)
    }
}

/// A homomorphism between presented algebras, determined by the images of
/// the source generators (in source-context order).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Hom {
    source: Presentation,
    target: Presentation,
    gen_images: Vec<Element>,
}

impl Hom {
    /// Builds a homomorphism from generator images, checking that they are
    /// well defined on the quotient: the target relator must lie below the
    /// free image of the source relator.
    pub fn new(
        store: &mut TermStore,
        source: &Presentation,
        target: &Presentation,
        gen_images: Vec<Element>,
    ) -> Result<Hom, AlgebraError> {
        if gen_images.len() != source.ctx.len() {
            return Err(AlgebraError::Term(TermError::UnknownGenerator(format!(
                "expected {} generator images, got {}",
                source.ctx.len(),
                gen_images.len()
            ))));
        }
        for img in &gen_images {
            img.expect_owner(target)?;
        }
        let hom = Hom { source: source.clone(), target: target.clone(), gen_images };
        let lifted = hom.free_image(store, &source.relator)?;
        if !store.leq(&target.relator, &lifted)? {
            let not_lifted = store.not(&lifted)?;
            let gap = store.meet(&target.relator, &not_lifted)?;
            let witness = store.atoms(&gap)?.into_iter().next().expect("nonempty gap");
            return Err(AlgebraError::NotWellDefined { witness });
        }
        Ok(hom)
    }

    /// Builds a homomorphism by a name-keyed image map.
    pub fn from_map(
        store: &mut TermStore,
        source: &Presentation,
        target: &Presentation,
        images: &BTreeMap<String, Element>,
    ) -> Result<Hom, AlgebraError> {
        let mut ordered = Vec::with_capacity(source.ctx.len());
        for n in source.ctx.iter() {
            let img = images
                .get(n)
                .ok_or_else(|| AlgebraError::Term(TermError::UnknownGenerator(n.clone())))?;
            ordered.push(img.clone());
        }
        Hom::new(store, source, target, ordered)
    }

    /// The identity homomorphism.
    pub fn identity(store: &mut TermStore, a: &Presentation) -> Result<Hom, AlgebraError> {
        let mut images = Vec::with_capacity(a.ctx.len());
        for n in a.ctx.iter() {
            let g = store.generator(&a.ctx, n)?;
            images.push(a.element_from_fn(store, &g)?);
        }
        Hom::new(store, a, a, images)
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn gen_images(&self) -> &[Element] {
        &self.gen_images
    }

    /// The free extension applied to a function over the source context,
    /// without meeting the target relator.
    pub fn free_image(
        &self,
        store: &mut TermStore,
        f: &CanonicalFn,
    ) -> Result<CanonicalFn, AlgebraError> {
        let ctx = self.source.ctx.clone();
        let images: Vec<(String, CanonicalFn)> = ctx
            .iter()
            .cloned()
            .zip(self.gen_images.iter().map(|e| e.value.clone()))
            .collect();
        let lookup = move |n: &str| {
            images
                .iter()
                .find(|(name, _)| name == n)
                .map(|(_, v)| v.clone())
        };
        Ok(store.compose_map(f, &self.target.ctx, &lookup)?)
    }

    /// Applies the homomorphism to an element of the source.
    pub fn apply(&self, store: &mut TermStore, e: &Element) -> Result<Element, AlgebraError> {
        e.expect_owner(&self.source)?;
        let img = self.free_image(store, &e.value)?;
        self.target.element_from_fn(store, &img)
    }

    /// Composition `self ∘ first` (apply `first`, then `self`).
    pub fn compose(&self, store: &mut TermStore, first: &Hom) -> Result<Hom, AlgebraError> {
        if first.target != self.source {
            return Err(AlgebraError::EndpointMismatch);
        }
        let mut images = Vec::with_capacity(first.gen_images.len());
        for img in &first.gen_images {
            images.push(self.apply(store, img)?);
        }
        // Well-definedness is inherited from the factors.
        let hom = Hom {
            source: first.source.clone(),
            target: self.target.clone(),
            gen_images: images,
        };
        debug_assert!({
            let lifted = hom.free_image(store, &hom.source.relator)?;
            store.leq(&hom.target.relator, &lifted)?
        });
        Ok(hom)
    }

    /// The point of the source dual that a target atom maps to: evaluate
    /// every generator image at the atom.
    pub fn dual_atom(&self, store: &TermStore, atom: &Assignment) -> Result<Assignment, AlgebraError> {
        let bits = self
            .gen_images
            .iter()
            .map(|img| store.evaluate(&img.value, atom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Assignment::new(self.source.ctx.clone(), bits))
    }

    /// Surjectivity, decided by counting distinguishable target atoms: the
    /// image subalgebra has `2^c` elements where `c` is the number of
    /// classes of target atoms separated by the generator images, and the
    /// hom is onto exactly when every class is a singleton.
    pub fn is_surjective(&self, store: &mut TermStore) -> Result<bool, AlgebraError> {
        let atoms = self.target.atoms(store)?;
        let mut signatures = HashSet::new();
        for a in &atoms {
            signatures.insert(self.dual_atom(store, a)?);
        }
        Ok(signatures.len() == atoms.len())
    }

    /// Injectivity, decided on the atoms of the source: an algebra hom is
    /// one-to-one exactly when no source atom is killed, i.e. when the dual
    /// map covers every source atom.
    pub fn is_injective(&self, store: &mut TermStore) -> Result<bool, AlgebraError> {
        let covered: HashSet<Assignment> = {
            let atoms = self.target.atoms(store)?;
            atoms
                .iter()
                .map(|a| self.dual_atom(store, a))
                .collect::<Result<_, _>>()?
        };
        let source_atoms = self.source.atoms(store)?;
        Ok(source_atoms.iter().all(|a| covered.contains(a)))
    }

    pub fn is_isomorphism(&self, store: &mut TermStore) -> Result<bool, AlgebraError> {
        Ok(self.is_surjective(store)? && self.is_injective(store)?)
    }
}

/// A quotient of `a` by an element, packaged as a subobject of `a` in the
/// dual sense: the quotient presentation together with the projection hom.
#[derive(Clone, Debug)]
pub struct Subobject {
    pub of: Presentation,
    pub quotient: Presentation,
    pub map: Hom,
}

/// Quotients `a` by an element: the result is presented over the same
/// context with relator the element's value, and the projection sends each
/// generator to its class.
pub fn quotient(
    store: &mut TermStore,
    a: &Presentation,
    e: &Element,
) -> Result<Subobject, AlgebraError> {
    e.expect_owner(a)?;
    let q = Presentation { ctx: a.ctx.clone(), relator: e.value.clone() };
    let mut images = Vec::with_capacity(a.ctx.len());
    for n in a.ctx.iter() {
        let g = store.generator(&a.ctx, n)?;
        images.push(q.element_from_fn(store, &g)?);
    }
    let map = Hom::new(store, a, &q, images)?;
    Ok(Subobject { of: a.clone(), quotient: q, map })
}

/// One direction of the order isomorphism between elements and
/// quotients-as-subobjects.
pub fn element_to_subobject(
    store: &mut TermStore,
    e: &Element,
) -> Result<Subobject, AlgebraError> {
    quotient(store, e.owner(), e)
}

/// The other direction: a subobject's element is the relator of its
/// quotient presentation, read inside the ambient algebra.
pub fn subobject_to_element(s: &Subobject) -> Element {
    Element { owner: s.of.clone(), value: s.quotient.relator.clone() }
}

/// Subobject order: `s1 ≤ s2` when the projection onto `s1.quotient`
/// factors through the projection onto `s2.quotient`.  The factoring is
/// constructed (not just predicted): it exists exactly when the candidate
/// generator-image map is well defined.
pub fn subobject_leq(
    store: &mut TermStore,
    s1: &Subobject,
    s2: &Subobject,
) -> Result<bool, AlgebraError> {
    if s1.of != s2.of {
        return Err(AlgebraError::EndpointMismatch);
    }
    let mut images = Vec::with_capacity(s2.quotient.ctx().len());
    for n in s2.quotient.ctx().iter() {
        let g = store.generator(s2.quotient.ctx(), n)?;
        images.push(s1.quotient.element_from_fn(store, &g)?);
    }
    match Hom::new(store, &s2.quotient, &s1.quotient, images) {
        Ok(factor) => {
            // Sanity: factor ∘ (proj onto s2) = proj onto s1.
            let composed = factor.compose(store, &s2.map)?;
            debug_assert_eq!(composed, s1.map);
            Ok(true)
        }
        Err(AlgebraError::NotWellDefined { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Builds the homomorphism dual to a function between atom sets: `map[i]`
/// is the index (into `source`'s atom list) that the `i`-th target atom is
/// sent to.  Every hom between finite algebras arises this way, so the
/// construction always passes the well-definedness check.
pub fn hom_from_dual_map(
    store: &mut TermStore,
    source: &Presentation,
    target: &Presentation,
    map: &[usize],
) -> Result<Hom, AlgebraError> {
    let src_atoms = source.atoms(store)?;
    let tgt_atoms = target.atoms(store)?;
    assert_eq!(map.len(), tgt_atoms.len(), "dual map arity mismatch");
    let mut images = Vec::with_capacity(source.ctx().len());
    for i in 0..source.ctx().len() {
        let selected: Vec<CanonicalFn> = tgt_atoms
            .iter()
            .enumerate()
            .filter(|(t, _)| src_atoms[map[*t]].bit(i))
            .map(|(_, beta)| store.minterm(beta))
            .collect();
        let value = store.big_join(target.ctx(), &selected)?;
        images.push(target.element_from_fn(store, &value)?);
    }
    Hom::new(store, source, target, images)
}

/// Enumerates every homomorphism `source → target` by running over all
/// functions from the target's atoms to the source's atoms.  Intended for
/// small algebras; asserts the count stays modest.
pub fn enumerate_homs(
    store: &mut TermStore,
    source: &Presentation,
    target: &Presentation,
) -> Result<Vec<Hom>, AlgebraError> {
    let src_count = source.atoms(store)?.len();
    let tgt_count = target.atoms(store)?.len();
    if src_count == 0 {
        // Trivial source maps only into the trivial algebra.
        return if tgt_count == 0 {
            Ok(vec![hom_from_dual_map(store, source, target, &[])?])
        } else {
            Ok(vec![])
        };
    }
    let total = (src_count as u128).pow(tgt_count as u32);
    assert!(total <= 100_000, "hom set too large to enumerate");
    let mut out = Vec::with_capacity(total as usize);
    let mut map = vec![0usize; tgt_count];
    loop {
        out.push(hom_from_dual_map(store, source, target, &map)?);
        // Odometer over functions.
        let mut k = 0;
        while k < tgt_count {
            map[k] += 1;
            if map[k] < src_count {
                break;
            }
            map[k] = 0;
            k += 1;
        }
        if k == tgt_count {
            break;
        }
    }
    Ok(out)
}

/// A re-presentation of the target of a surjection from a free algebra:
/// the standard-form presentation over the free source's context, plus the
/// verified isomorphism onto the original target.
#[derive(Clone, Debug)]
pub struct Representation {
    pub presentation: Presentation,
    pub iso: Hom,
    pub checks: Vec<Check>,
}

/// Presents the target of `onto` on the generators of its free source: the
/// relator is the join of the source minterms with nonzero image, and the
/// original generator images induce an isomorphism from the new
/// presentation, verified on atoms.
pub fn represent_on_generators(
    store: &mut TermStore,
    onto: &Hom,
) -> Result<Representation, AlgebraError> {
    if !onto.source().relator().is_true() {
        return Err(AlgebraError::SourceNotFree);
    }
    if !onto.is_surjective(store)? {
        return Err(AlgebraError::NotSurjective);
    }
    let x = onto.source().ctx().clone();
    let mut kept = Vec::new();
    for asg in Assignment::all(&x) {
        let m = store.minterm(&asg);
        let img = onto.free_image(store, &m)?;
        let img = store.meet(onto.target().relator(), &img)?;
        if !img.is_false() {
            kept.push(store.minterm(&asg));
        }
    }
    let relator = store.big_join(&x, &kept)?;
    let presentation = Presentation { ctx: x, relator };
    let iso = Hom::new(store, &presentation, onto.target(), onto.gen_images().to_vec())?;
    let checks = vec![
        Check::flag("iso is surjective", iso.is_surjective(store)?),
        Check::flag("iso is injective", iso.is_injective(store)?),
        Check::equal_count(
            "atom counts agree",
            presentation.atom_count(store)?,
            onto.target().atom_count(store)?,
        ),
    ];
    if !crate::check::all_ok(&checks) {
        return Err(AlgebraError::Internal(
            "re-presentation did not yield an isomorphism".into(),
        ));
    }
    Ok(Representation { presentation, iso, checks })
}
