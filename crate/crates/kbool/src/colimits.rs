//! Finite products, partition decompositions, pushouts, and the stability
//! certificates that connect them.
//!
//! The product of presented algebras is presented over a context of fresh
//! tag generators `@i0, @i1, …` followed by the factor contexts renamed
//! apart with `#k` suffixes.  The relator says: the tags are pairwise
//! disjoint, cover everything, dominate their factor's generators, and each
//! tag implies its factor's relator.  Quotienting by the k-th tag recovers
//! the k-th factor, which is how the projections are built and verified.
//!
//! Pushouts are presented over the disjoint union of the two target
//! contexts: both relators are imposed, plus agreement of the two lifted
//! images of every apex generator.

use thiserror::Error;

use crate::algebra::{quotient, AlgebraError, Element, Hom, Presentation, Subobject};
use crate::check::{all_ok, Check};
use crate::store::{CanonicalFn, TermStore};
use crate::term::{Assignment, GeneratorContext, TermError};
use std::collections::HashMap;

#[derive(Debug, Clone, Error)]
pub enum ColimitError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    /// The given cells fail to partition the algebra; the witness atom is
    /// either covered twice or not covered at all.
    #[error("cells do not partition the algebra; witness atom {witness} is {fault}")]
    NotAPartition { witness: Assignment, fault: PartitionFault },
    #[error("factor index {index} out of range for {len} factors")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("disjointness requires two distinct factor indices")]
    EqualIndices,
    /// Mediation was asked for maps that do not commute with the legs.
    #[error("the given maps do not form a commuting cocone/cone")]
    DoesNotCommute,
    #[error("internal verification failed: {0}")]
    Internal(String),
}

/// How a partition candidate failed at the witness atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionFault {
    Uncovered,
    CoveredTwice,
}

impl std::fmt::Display for PartitionFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PartitionFault::Uncovered => write!(f, "uncovered"),
            PartitionFault::CoveredTwice => write!(f, "covered twice"),
        }
    }
}

/// A finite product of presented algebras with its projections.
#[derive(Clone, Debug)]
pub struct ProductData {
    pub factors: Vec<Presentation>,
    pub result: Presentation,
    /// The tag generators' classes in the result, one per factor.
    pub tags: Vec<Element>,
    pub projections: Vec<Hom>,
    pub checks: Vec<Check>,
}

fn tag_name(k: usize) -> String {
    format!("@i{k}")
}

fn factor_suffix(k: usize) -> String {
    format!("#{k}")
}

/// Renames a function over a factor context into the product context.
fn lift_into(
    store: &mut TermStore,
    f: &CanonicalFn,
    suffix: &str,
    target: &GeneratorContext,
) -> Result<CanonicalFn, ColimitError> {
    let rename: HashMap<String, String> = f
        .ctx()
        .iter()
        .map(|n| (n.clone(), format!("{n}{suffix}")))
        .collect();
    Ok(store.transport(f, target, &rename)?)
}

/// Builds the product of the given factors.
///
/// The empty product is the one-element algebra (empty context, relator
/// bottom — the empty join of tags).  Projections are verified to realize
/// each factor as the quotient of the result by its tag.
pub fn product(
    store: &mut TermStore,
    factors: &[Presentation],
) -> Result<ProductData, ColimitError> {
    let n = factors.len();
    // Assemble the context: tags first, then the renamed factor contexts.
    let mut ctx = GeneratorContext::new((0..n).map(tag_name)).expect("distinct tags");
    for (k, a) in factors.iter().enumerate() {
        ctx = ctx.concat(&a.ctx().with_suffix(&factor_suffix(k)))?;
    }

    let tag_fns: Vec<CanonicalFn> = (0..n)
        .map(|k| store.generator(&ctx, &tag_name(k)))
        .collect::<Result<_, _>>()?;

    // Tags are pairwise disjoint and jointly exhaustive.
    let mut relator = store.top(&ctx);
    for i in 0..n {
        for j in (i + 1)..n {
            let both = store.meet(&tag_fns[i], &tag_fns[j])?;
            let apart = store.not(&both)?;
            relator = store.meet(&relator, &apart)?;
        }
    }
    let cover = store.big_join(&ctx, &tag_fns)?;
    relator = store.meet(&relator, &cover)?;
    // Factor generators live under their tag, and each tag imposes its
    // factor's relator.
    for (k, a) in factors.iter().enumerate() {
        for x in a.ctx().iter() {
            let g = store.generator(&ctx, &format!("{x}{}", factor_suffix(k)))?;
            let dominates = store.implies(&g, &tag_fns[k])?;
            relator = store.meet(&relator, &dominates)?;
        }
        let lifted = lift_into(store, a.relator(), &factor_suffix(k), &ctx)?;
        let imposes = store.implies(&tag_fns[k], &lifted)?;
        relator = store.meet(&relator, &imposes)?;
    }

    let result = Presentation::from_relator(relator);
    let tags: Vec<Element> = tag_fns
        .iter()
        .map(|t| result.element_from_fn(store, t))
        .collect::<Result<_, _>>()?;

    // Projections: kill every other tag and every other factor's
    // generators; send this factor's renamed generators home.
    let mut projections = Vec::with_capacity(n);
    let mut checks = Vec::new();
    for (k, a) in factors.iter().enumerate() {
        let mut images = Vec::with_capacity(ctx.len());
        for j in 0..n {
            images.push(if j == k { a.top_element() } else { a.bot_element(store) });
        }
        for (j, b) in factors.iter().enumerate() {
            for x in b.ctx().iter() {
                if j == k {
                    let g = store.generator(a.ctx(), x)?;
                    images.push(a.element_from_fn(store, &g)?);
                } else {
                    images.push(a.bot_element(store));
                }
            }
        }
        let proj = Hom::new(store, &result, a, images)?;
        checks.push(Check::flag(
            format!("projection {k} is surjective"),
            proj.is_surjective(store)?,
        ));
        // The projection factors through result/tag_k as an isomorphism.
        let sub = quotient(store, &result, &tags[k])?;
        let factored = Hom::new(store, &sub.quotient, a, proj.gen_images().to_vec())?;
        checks.push(Check::flag(
            format!("result/tag {k} is isomorphic to factor {k}"),
            factored.is_isomorphism(store)?,
        ));
        projections.push(proj);
    }

    let total: u128 = {
        let mut sum = 0u128;
        for a in factors {
            sum += a.atom_count(store)?;
        }
        sum
    };
    checks.push(Check::equal_count(
        "atom count is the sum of factor atom counts",
        result.atom_count(store)?,
        total,
    ));

    if !all_ok(&checks) {
        return Err(ColimitError::Internal("product verification failed".into()));
    }
    Ok(ProductData { factors: factors.to_vec(), result, tags, projections, checks })
}

impl ProductData {
    /// The element of the product whose `k`-th coordinate is `e` and whose
    /// other coordinates are bottom.
    pub fn delta(
        &self,
        store: &mut TermStore,
        k: usize,
        e: &Element,
    ) -> Result<Element, ColimitError> {
        if k >= self.factors.len() {
            return Err(ColimitError::IndexOutOfRange { index: k, len: self.factors.len() });
        }
        if e.owner() != &self.factors[k] {
            return Err(ColimitError::Algebra(AlgebraError::OwnerMismatch));
        }
        let lifted = lift_into(store, e.value(), &factor_suffix(k), self.result.ctx())?;
        let tagged = store.meet(self.tags[k].value(), &lifted)?;
        Ok(self.result.element_from_fn(store, &tagged)?)
    }

    /// The tuple of coordinates of an element of the product.
    pub fn coordinates(
        &self,
        store: &mut TermStore,
        e: &Element,
    ) -> Result<Vec<Element>, ColimitError> {
        self.projections
            .iter()
            .map(|p| p.apply(store, e).map_err(Into::into))
            .collect()
    }

    /// The element with the given coordinates: the join of tagged lifts.
    pub fn tuple(
        &self,
        store: &mut TermStore,
        coords: &[Element],
    ) -> Result<Element, ColimitError> {
        if coords.len() != self.factors.len() {
            return Err(ColimitError::IndexOutOfRange {
                index: coords.len(),
                len: self.factors.len(),
            });
        }
        let mut parts = Vec::with_capacity(coords.len());
        for (k, e) in coords.iter().enumerate() {
            parts.push(self.delta(store, k, e)?.value().clone());
        }
        let value = store.big_join(self.result.ctx(), &parts)?;
        Ok(self.result.element_from_fn(store, &value)?)
    }

    /// Mediates a cone: given `cone[k]: B → factors[k]`, builds the unique
    /// map `B → result` commuting with the projections, and verifies the
    /// commutation.
    pub fn mediate_cone(
        &self,
        store: &mut TermStore,
        cone: &[Hom],
    ) -> Result<Hom, ColimitError> {
        if cone.len() != self.factors.len() {
            return Err(ColimitError::IndexOutOfRange {
                index: cone.len(),
                len: self.factors.len(),
            });
        }
        let b = match cone.first() {
            Some(h) => h.source().clone(),
            None => {
                // Empty product: the unique map into the trivial algebra.
                return Err(ColimitError::Internal(
                    "mediating an empty cone requires an explicit source".into(),
                ));
            }
        };
        for (k, h) in cone.iter().enumerate() {
            if h.source() != &b || h.target() != &self.factors[k] {
                return Err(ColimitError::DoesNotCommute);
            }
        }
        let mut images = Vec::with_capacity(b.ctx().len());
        for x in b.ctx().iter() {
            let g = store.generator(b.ctx(), x)?;
            let xb = b.element_from_fn(store, &g)?;
            let coords: Vec<Element> = cone
                .iter()
                .map(|h| h.apply(store, &xb))
                .collect::<Result<_, _>>()?;
            images.push(self.tuple(store, &coords)?);
        }
        let m = Hom::new(store, &b, &self.result, images)?;
        for (k, h) in cone.iter().enumerate() {
            let back = self.projections[k].compose(store, &m)?;
            if &back != h {
                return Err(ColimitError::Internal(format!(
                    "mediating map fails to commute with projection {k}"
                )));
            }
        }
        Ok(m)
    }
}

/// A verified direct-sum decomposition of an algebra along a partition.
#[derive(Clone, Debug)]
pub struct PartitionDecomposition {
    pub cells: Vec<Element>,
    /// Quotient of the ambient algebra by each cell.
    pub components: Vec<Subobject>,
    /// Product of the quotients.
    pub product: ProductData,
    /// The canonical isomorphism from the ambient algebra onto the product,
    /// sending `a` to the tuple of its cell restrictions.
    pub iso: Hom,
    pub checks: Vec<Check>,
}

/// Decomposes `a` along pairwise-disjoint, jointly-exhaustive cells.
pub fn partition_decompose(
    store: &mut TermStore,
    a: &Presentation,
    cells: &[Element],
) -> Result<PartitionDecomposition, ColimitError> {
    for c in cells {
        if c.owner() != a {
            return Err(ColimitError::Algebra(AlgebraError::OwnerMismatch));
        }
    }
    // Pairwise disjoint…
    for i in 0..cells.len() {
        for j in (i + 1)..cells.len() {
            let overlap = store.meet(cells[i].value(), cells[j].value())?;
            if let Some(w) = store.atoms(&overlap)?.into_iter().next() {
                return Err(ColimitError::NotAPartition {
                    witness: w,
                    fault: PartitionFault::CoveredTwice,
                });
            }
        }
    }
    // …and jointly exhaustive.
    let values: Vec<CanonicalFn> = cells.iter().map(|c| c.value().clone()).collect();
    let cover = store.big_join(a.ctx(), &values)?;
    let missing = {
        let nc = store.not(&cover)?;
        store.meet(a.relator(), &nc)?
    };
    if let Some(w) = store.atoms(&missing)?.into_iter().next() {
        return Err(ColimitError::NotAPartition { witness: w, fault: PartitionFault::Uncovered });
    }

    let components: Vec<Subobject> = cells
        .iter()
        .map(|c| quotient(store, a, c))
        .collect::<Result<_, _>>()?;
    let quotient_presentations: Vec<Presentation> =
        components.iter().map(|s| s.quotient.clone()).collect();
    let prod = product(store, &quotient_presentations)?;

    // The canonical map a ↦ (c_k ∧ a)_k, on generators.
    let mut images = Vec::with_capacity(a.ctx().len());
    for x in a.ctx().iter() {
        let g = store.generator(a.ctx(), x)?;
        let coords: Vec<Element> = components
            .iter()
            .map(|s| s.quotient.element_from_fn(store, &g))
            .collect::<Result<_, _>>()?;
        images.push(prod.tuple(store, &coords)?);
    }
    let iso = Hom::new(store, a, &prod.result, images)?;
    let checks = vec![
        Check::flag("decomposition map is surjective", iso.is_surjective(store)?),
        Check::flag("decomposition map is injective", iso.is_injective(store)?),
        Check::equal_count(
            "cell atoms add up",
            a.atom_count(store)?,
            prod.result.atom_count(store)?,
        ),
    ];
    if !all_ok(&checks) {
        return Err(ColimitError::Internal("partition decomposition failed to verify".into()));
    }
    Ok(PartitionDecomposition { cells: cells.to_vec(), components, product: prod, iso, checks })
}

/// A pushout square: two homs out of a common apex, completed by a
/// presented corner with verified injections.
#[derive(Clone, Debug)]
pub struct PushoutData {
    pub apex: Presentation,
    /// Leg `f : apex → left target`.
    pub left: Hom,
    /// Leg `g : apex → right target`.
    pub right: Hom,
    pub result: Presentation,
    /// Injection of the left target into the result.
    pub from_left: Hom,
    /// Injection of the right target into the result.
    pub from_right: Hom,
    pub checks: Vec<Check>,
}

/// Builds the pushout of `left: A → B` and `right: A → C` over the disjoint
/// union of the two target contexts (`#0` for B, `#1` for C), imposing both
/// relators and agreement of the lifted images of every apex generator.
pub fn pushout(store: &mut TermStore, left: &Hom, right: &Hom) -> Result<PushoutData, ColimitError> {
    if left.source() != right.source() {
        return Err(ColimitError::DoesNotCommute);
    }
    let apex = left.source().clone();
    let b = left.target().clone();
    let c = right.target().clone();
    let ctx = b
        .ctx()
        .with_suffix(&factor_suffix(0))
        .concat(&c.ctx().with_suffix(&factor_suffix(1)))?;

    let mut relator = lift_into(store, b.relator(), &factor_suffix(0), &ctx)?;
    let c_rel = lift_into(store, c.relator(), &factor_suffix(1), &ctx)?;
    relator = store.meet(&relator, &c_rel)?;
    for (i, _x) in apex.ctx().iter().enumerate() {
        let fb = lift_into(store, left.gen_images()[i].value(), &factor_suffix(0), &ctx)?;
        let gc = lift_into(store, right.gen_images()[i].value(), &factor_suffix(1), &ctx)?;
        let agree = store.iff(&fb, &gc)?;
        relator = store.meet(&relator, &agree)?;
    }
    let result = Presentation::from_relator(relator);

    let mut b_images = Vec::with_capacity(b.ctx().len());
    for x in b.ctx().iter() {
        let g = store.generator(&ctx, &format!("{x}{}", factor_suffix(0)))?;
        b_images.push(result.element_from_fn(store, &g)?);
    }
    let from_left = Hom::new(store, &b, &result, b_images)?;
    let mut c_images = Vec::with_capacity(c.ctx().len());
    for x in c.ctx().iter() {
        let g = store.generator(&ctx, &format!("{x}{}", factor_suffix(1)))?;
        c_images.push(result.element_from_fn(store, &g)?);
    }
    let from_right = Hom::new(store, &c, &result, c_images)?;

    let around_left = from_left.compose(store, left)?;
    let around_right = from_right.compose(store, right)?;
    let checks = vec![Check::flag(
        "pushout square commutes",
        around_left == around_right,
    )];
    if !all_ok(&checks) {
        return Err(ColimitError::Internal("pushout square failed to commute".into()));
    }
    Ok(PushoutData { apex, left: left.clone(), right: right.clone(), result, from_left, from_right, checks })
}

impl PushoutData {
    /// Mediates a cocone: given `u: B → D` and `v: C → D` with
    /// `u ∘ left = v ∘ right`, builds the unique `result → D` through which
    /// both injections factor.
    pub fn mediate_cocone(
        &self,
        store: &mut TermStore,
        u: &Hom,
        v: &Hom,
    ) -> Result<Hom, ColimitError> {
        if u.source() != self.left.target()
            || v.source() != self.right.target()
            || u.target() != v.target()
        {
            return Err(ColimitError::DoesNotCommute);
        }
        let ul = u.compose(store, &self.left)?;
        let vr = v.compose(store, &self.right)?;
        if ul != vr {
            return Err(ColimitError::DoesNotCommute);
        }
        let mut images = Vec::new();
        images.extend(u.gen_images().iter().cloned());
        images.extend(v.gen_images().iter().cloned());
        let m = Hom::new(store, &self.result, u.target(), images)?;
        let back_left = m.compose(store, &self.from_left)?;
        let back_right = m.compose(store, &self.from_right)?;
        if &back_left != u || &back_right != v {
            return Err(ColimitError::Internal(
                "mediating map fails to factor the cocone".into(),
            ));
        }
        Ok(m)
    }
}

/// A certificate that two distinct factors of a product are disjoint: the
/// pushout of their projections is the one-element algebra, witnessed by an
/// element that one projection sends to bottom and the other to top.
#[derive(Clone, Debug)]
pub struct DisjointnessCertificate {
    pub witness: Element,
    pub pushout: PushoutData,
    pub checks: Vec<Check>,
}

pub fn check_disjointness(
    store: &mut TermStore,
    p: &ProductData,
    i: usize,
    j: usize,
) -> Result<DisjointnessCertificate, ColimitError> {
    let n = p.factors.len();
    if i >= n {
        return Err(ColimitError::IndexOutOfRange { index: i, len: n });
    }
    if j >= n {
        return Err(ColimitError::IndexOutOfRange { index: j, len: n });
    }
    if i == j {
        return Err(ColimitError::EqualIndices);
    }
    let po = pushout(store, &p.projections[i], &p.projections[j])?;
    // Witness: j-th coordinate top, all others (in particular the i-th)
    // bottom — the class of the j-th tag.
    let witness = p.tags[j].clone();
    let at_i = p.projections[i].apply(store, &witness)?;
    let at_j = p.projections[j].apply(store, &witness)?;
    let bot_i = p.factors[i].bot_element(store);
    let mut checks = vec![
        Check::equal_fn(store, "witness vanishes under projection i", at_i.value(), bot_i.value())?,
        Check::equal_fn(
            store,
            "witness is top under projection j",
            at_j.value(),
            p.factors[j].relator(),
        )?,
        Check::flag("pushout of the projections is trivial", po.result.is_trivial()),
    ];
    let all = all_ok(&checks);
    checks.push(Check::flag("factors are disjoint", all));
    if !all {
        return Err(ColimitError::Internal("disjointness certificate failed".into()));
    }
    Ok(DisjointnessCertificate { witness, pushout: po, checks })
}

/// One component of a pullback-stability certificate: the pushout of the
/// k-th projection with `f`, shown isomorphic to the corresponding cell
/// quotient of `f`'s target by an explicit inverse pair.
#[derive(Clone, Debug)]
pub struct StabilityComponent {
    pub pushout: PushoutData,
    /// The cell quotient `B/c_k` included into the pushout corner.
    pub section: Hom,
    /// The inverse map from the pushout corner onto `B/c_k`.
    pub inverse: Hom,
}

/// A certificate that pulling a product decomposition back along any map
/// out of the product decomposes the target: the images of the tags
/// partition it, and each pushout corner is isomorphic to the matching cell
/// quotient.
#[derive(Clone, Debug)]
pub struct StabilityWitness {
    pub cells: Vec<Element>,
    pub components: Vec<StabilityComponent>,
    pub decomposition: PartitionDecomposition,
    pub checks: Vec<Check>,
}

pub fn pullback_stability_witness(
    store: &mut TermStore,
    p: &ProductData,
    f: &Hom,
) -> Result<StabilityWitness, ColimitError> {
    if f.source() != &p.result {
        return Err(ColimitError::DoesNotCommute);
    }
    let b = f.target().clone();
    // Cells: images of the tags.
    let cells: Vec<Element> = p
        .tags
        .iter()
        .map(|t| f.apply(store, t))
        .collect::<Result<_, _>>()?;
    let decomposition = partition_decompose(store, &b, &cells)?;

    let mut components = Vec::with_capacity(p.factors.len());
    let mut checks = Vec::new();
    for k in 0..p.factors.len() {
        let po = pushout(store, &p.projections[k], f)?;
        let cell_quotient = &decomposition.components[k].quotient;
        // The injection B → corner restricted to B/c_k.
        let section = Hom::new(
            store,
            cell_quotient,
            &po.result,
            po.from_right.gen_images().to_vec(),
        )?;
        // Inverse: factor generators go to the cell restriction of the
        // image of their delta; B's generators restrict to the cell.
        let mut images = Vec::new();
        for x in p.factors[k].ctx().iter() {
            let g = store.generator(p.factors[k].ctx(), x)?;
            let xe = p.factors[k].element_from_fn(store, &g)?;
            let dx = p.delta(store, k, &xe)?;
            let fx = f.apply(store, &dx)?;
            images.push(cell_quotient.element_from_fn(store, fx.value())?);
        }
        for y in b.ctx().iter() {
            let g = store.generator(b.ctx(), y)?;
            images.push(cell_quotient.element_from_fn(store, &g)?);
        }
        let inverse = Hom::new(store, &po.result, cell_quotient, images)?;

        let id_cell = Hom::identity(store, cell_quotient)?;
        let id_corner = Hom::identity(store, &po.result)?;
        let around_cell = inverse.compose(store, &section)?;
        let around_corner = section.compose(store, &inverse)?;
        checks.push(Check::flag(
            format!("component {k}: inverse ∘ section is the identity"),
            around_cell == id_cell,
        ));
        checks.push(Check::flag(
            format!("component {k}: section ∘ inverse is the identity"),
            around_corner == id_corner,
        ));
        components.push(StabilityComponent { pushout: po, section, inverse });
    }
    if !all_ok(&checks) {
        return Err(ColimitError::Internal("pullback stability failed to verify".into()));
    }
    Ok(StabilityWitness { cells, components, decomposition, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn ctx(names: &[&str]) -> GeneratorContext {
        GeneratorContext::new(names.iter().copied()).unwrap()
    }

    /// The two-element algebra presented with an empty context.
    fn two(store: &TermStore) -> Presentation {
        Presentation::free(store, &GeneratorContext::empty())
    }

    #[test]
    fn product_of_two_copies_of_two_is_k1() {
        let mut st = TermStore::new();
        let t = two(&st);
        let p = product(&mut st, &[t.clone(), t]).unwrap();
        // Four elements, two atoms — the free algebra on one generator.
        assert_eq!(p.result.atom_count(&mut st).unwrap(), 2);
        assert_eq!(p.result.element_count(&mut st).unwrap(), 4);
        let k1 = Presentation::free(&st, &GeneratorContext::numbered(1));
        assert_eq!(k1.element_count(&mut st).unwrap(), 4);
    }

    #[test]
    fn empty_product_is_trivial() {
        let mut st = TermStore::new();
        let p = product(&mut st, &[]).unwrap();
        assert!(p.result.is_trivial());
        assert_eq!(p.result.element_count(&mut st).unwrap(), 1);
    }

    #[test]
    fn product_atom_count_is_additive() {
        let mut st = TermStore::new();
        let a = Presentation::free(&st, &ctx(&["x"]));
        let b = Presentation::free(&st, &ctx(&["y", "z"]));
        let c = Presentation::new(&mut st, &ctx(&["w"]), &Term::gen("w")).unwrap();
        let p = product(&mut st, &[a, b, c]).unwrap();
        assert_eq!(p.result.atom_count(&mut st).unwrap(), 2 + 4 + 1);
    }

    #[test]
    fn coordinates_and_tuples_are_inverse() {
        let mut st = TermStore::new();
        let a = Presentation::free(&st, &ctx(&["x"]));
        let b = Presentation::free(&st, &ctx(&["y"]));
        let p = product(&mut st, &[a.clone(), b.clone()]).unwrap();
        let ea = a.element(&mut st, &Term::gen("x")).unwrap();
        let eb = b.element(&mut st, &Term::not(Term::gen("y"))).unwrap();
        let t = p.tuple(&mut st, &[ea.clone(), eb.clone()]).unwrap();
        let coords = p.coordinates(&mut st, &t).unwrap();
        assert_eq!(coords, vec![ea, eb]);
        // Round trip the other way over every element of the product.
        for e in p.result.elements(&mut st).unwrap() {
            let cs = p.coordinates(&mut st, &e).unwrap();
            let back = p.tuple(&mut st, &cs).unwrap();
            assert_eq!(back, e);
        }
    }

    #[test]
    fn mediation_commutes_with_projections() {
        let mut st = TermStore::new();
        let a = Presentation::free(&st, &ctx(&["x"]));
        let b = Presentation::free(&st, &ctx(&["y"]));
        let p = product(&mut st, &[a.clone(), b.clone()]).unwrap();
        // Cone legs src → a (s ↦ x) and src → b (s ↦ ¬y).
        let src = Presentation::free(&st, &ctx(&["s"]));
        let img_a = a.element(&mut st, &Term::gen("x")).unwrap();
        let leg_a = Hom::new(&mut st, &src, &a, vec![img_a]).unwrap();
        let img_b = b.element(&mut st, &Term::not(Term::gen("y"))).unwrap();
        let leg_b = Hom::new(&mut st, &src, &b, vec![img_b]).unwrap();
        let m = p.mediate_cone(&mut st, &[leg_a.clone(), leg_b.clone()]).unwrap();
        assert_eq!(p.projections[0].compose(&mut st, &m).unwrap(), leg_a);
        assert_eq!(p.projections[1].compose(&mut st, &m).unwrap(), leg_b);
        // Legs aimed at the wrong factors are rejected.
        assert!(p.mediate_cone(&mut st, &[leg_b, leg_a]).is_err());
    }

    #[test]
    fn partition_decomposition_round_trips() {
        let mut st = TermStore::new();
        let a = Presentation::free(&st, &ctx(&["x", "y"]));
        let c1 = a.element(&mut st, &Term::gen("x")).unwrap();
        let c2 = c1.complement(&mut st).unwrap();
        let d = partition_decompose(&mut st, &a, &[c1, c2]).unwrap();
        assert!(d.iso.is_isomorphism(&mut st).unwrap());
        // Components have 2 atoms each.
        for s in &d.components {
            assert_eq!(s.quotient.atom_count(&mut st).unwrap(), 2);
        }
    }

    #[test]
    fn bad_partitions_are_rejected_with_witnesses() {
        let mut st = TermStore::new();
        let a = Presentation::free(&st, &ctx(&["x", "y"]));
        let c1 = a.element(&mut st, &Term::gen("x")).unwrap();
        let c2 = a.element(&mut st, &Term::gen("y")).unwrap();
        // Overlap at x∧y.
        match partition_decompose(&mut st, &a, &[c1.clone(), c2]).unwrap_err() {
            ColimitError::NotAPartition { witness, fault } => {
                assert_eq!(fault, PartitionFault::CoveredTwice);
                assert_eq!(witness.get("x"), Some(true));
                assert_eq!(witness.get("y"), Some(true));
            }
            other => panic!("expected NotAPartition, got {other:?}"),
        }
        // Gap at ¬x.
        match partition_decompose(&mut st, &a, &[c1]).unwrap_err() {
            ColimitError::NotAPartition { witness, fault } => {
                assert_eq!(fault, PartitionFault::Uncovered);
                assert_eq!(witness.get("x"), Some(false));
            }
            other => panic!("expected NotAPartition, got {other:?}"),
        }
    }

    #[test]
    fn pushout_identifies_images() {
        let mut st = TermStore::new();
        // Apex K({z}); legs include z into K({z,y}) and K({z,w}).
        let apex = Presentation::free(&st, &ctx(&["z"]));
        let b = Presentation::free(&st, &ctx(&["z", "y"]));
        let c = Presentation::free(&st, &ctx(&["z", "w"]));
        let zb = b.element(&mut st, &Term::gen("z")).unwrap();
        let zc = c.element(&mut st, &Term::gen("z")).unwrap();
        let f = Hom::new(&mut st, &apex, &b, vec![zb]).unwrap();
        let g = Hom::new(&mut st, &apex, &c, vec![zc]).unwrap();
        let po = pushout(&mut st, &f, &g).unwrap();
        // The two lifted copies of z agree in the corner.
        let za = apex.element(&mut st, &Term::gen("z")).unwrap();
        let via_b = {
            let in_b = f.apply(&mut st, &za).unwrap();
            po.from_left.apply(&mut st, &in_b).unwrap()
        };
        let via_c = {
            let in_c = g.apply(&mut st, &za).unwrap();
            po.from_right.apply(&mut st, &in_c).unwrap()
        };
        assert_eq!(via_b, via_c);
        // 8 atoms: z-fiber pairs (y,w) glued over z ∈ {0,1}: 2·(2·2) = 8.
        assert_eq!(po.result.atom_count(&mut st).unwrap(), 8);
    }

    #[test]
    fn pushout_of_complementary_quotients_is_trivial() {
        let mut st = TermStore::new();
        // K(1) quotiented by 0 and by ¬0: gluing along both kills everything.
        let k1 = Presentation::free(&st, &GeneratorContext::numbered(1));
        let e = k1.element(&mut st, &Term::gen("0")).unwrap();
        let ne = e.complement(&mut st).unwrap();
        let q1 = quotient(&mut st, &k1, &e).unwrap();
        let q2 = quotient(&mut st, &k1, &ne).unwrap();
        let po = pushout(&mut st, &q1.map, &q2.map).unwrap();
        assert!(po.result.is_trivial());
    }

    #[test]
    fn cocone_mediation_factors_both_injections() {
        let mut st = TermStore::new();
        let apex = Presentation::free(&st, &GeneratorContext::empty());
        let b = Presentation::free(&st, &ctx(&["x"]));
        let c = Presentation::free(&st, &ctx(&["y"]));
        let f = Hom::new(&mut st, &apex, &b, vec![]).unwrap();
        let g = Hom::new(&mut st, &apex, &c, vec![]).unwrap();
        let po = pushout(&mut st, &f, &g).unwrap();
        // Cocone into K({x,y}).
        let d = Presentation::free(&st, &ctx(&["x", "y"]));
        let ux = d.element(&mut st, &Term::gen("x")).unwrap();
        let u = Hom::new(&mut st, &b, &d, vec![ux]).unwrap();
        let vy = d.element(&mut st, &Term::gen("y")).unwrap();
        let v = Hom::new(&mut st, &c, &d, vec![vy]).unwrap();
        let m = po.mediate_cocone(&mut st, &u, &v).unwrap();
        assert!(m.is_isomorphism(&mut st).unwrap());
    }

    #[test]
    fn disjointness_certificates_hold_for_all_pairs() {
        let mut st = TermStore::new();
        let a = Presentation::free(&st, &ctx(&["x"]));
        let b = two(&st);
        let c = Presentation::new(&mut st, &ctx(&["w"]), &Term::gen("w")).unwrap();
        let p = product(&mut st, &[a, b, c]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert!(matches!(
                        check_disjointness(&mut st, &p, i, j),
                        Err(ColimitError::EqualIndices)
                    ));
                } else {
                    let cert = check_disjointness(&mut st, &p, i, j).unwrap();
                    assert!(all_ok(&cert.checks));
                }
            }
        }
        assert!(matches!(
            check_disjointness(&mut st, &p, 0, 3),
            Err(ColimitError::IndexOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn pullback_stability_along_a_projection() {
        let mut st = TermStore::new();
        let a = Presentation::free(&st, &ctx(&["x"]));
        let b = two(&st);
        let p = product(&mut st, &[a.clone(), b]).unwrap();
        // f := first projection.
        let f = p.projections[0].clone();
        let w = pullback_stability_witness(&mut st, &p, &f).unwrap();
        assert!(all_ok(&w.checks));
        // The cells partition the target into the image of tag 0 (top) and
        // of tag 1 (bottom).
        assert!(w.cells[0].is_top());
        assert!(w.cells[1].is_bot());
    }

    #[test]
    fn disjoint_subobjects_decompose_their_join() {
        // For disjoint a, b the interval below a∨b decomposes as the product
        // of the intervals below a and below b.
        let mut st = TermStore::new();
        let alg = Presentation::free(&st, &ctx(&["x", "y"]));
        let a = alg
            .element(&mut st, &Term::meet(vec![Term::gen("x"), Term::gen("y")]))
            .unwrap();
        let b = alg
            .element(
                &mut st,
                &Term::meet(vec![Term::not(Term::gen("x")), Term::not(Term::gen("y"))]),
            )
            .unwrap();
        let overlap = a.meet(&mut st, &b).unwrap();
        assert!(overlap.is_bot());
        let join = a.join(&mut st, &b).unwrap();
        let sub = quotient(&mut st, &alg, &join).unwrap();
        let a_in_join = sub.quotient.element_from_fn(&mut st, a.value()).unwrap();
        let b_in_join = sub.quotient.element_from_fn(&mut st, b.value()).unwrap();
        let d = partition_decompose(&mut st, &sub.quotient, &[a_in_join, b_in_join]).unwrap();
        assert!(all_ok(&d.checks));
        assert_eq!(d.components[0].quotient.relator(), a.value());
        assert_eq!(d.components[1].quotient.relator(), b.value());
    }
}
