//! End-to-end acceptance checks.  Each test verifies one shipped
//! guarantee at full scale, against independent oracles where the claim
//! is semantic, and prints a single `criterion N: PASS` line.  Every
//! comparison is exact; there are no tolerances anywhere in this file.

use std::collections::{HashMap, HashSet};

use kbool::algebra::{
    element_to_subobject, hom_from_dual_map, subobject_leq, subobject_to_element, Hom,
    Presentation,
};
use kbool::check::all_ok;
use kbool::colimits::{check_disjointness, product, pullback_stability_witness, pushout};
use kbool::interpolation::{
    check_star, interpolate, synthesize_retraction, InterpolationError, InterpolationProblem,
    RetractionProblem,
};
use kbool::logic::{
    ac_instance_check, interpret, is_model, reify, satisfies, t2_proves, t2_qe, t2_theory,
    t2_translate, FinModel, Formula, Interpreted, ProofOutcome, Sequent, T2_SYMBOL,
};
use kbool::store::{CanonicalFn, TermStore};
use kbool::syncat::{
    check_equivalence_sample, compose, double_dual_iso, f2_object, hom_count, hom_set, identity,
    powerset_algebra, stone_dual, universal_model_check, SynMorphism, SynObject,
};
use kbool::term::{Assignment, GeneratorContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn named_ctx(prefix: &str, n: usize) -> GeneratorContext {
    GeneratorContext::new((0..n).map(|i| format!("{prefix}{i}"))).expect("distinct names")
}

/// A uniformly random function over `ctx`, interned from a truth table.
fn random_fn(store: &mut TermStore, ctx: &GeneratorContext, rng: &mut ChaCha8Rng) -> CanonicalFn {
    let rows: Vec<bool> = (0..1usize << ctx.len()).map(|_| rng.gen()).collect();
    store.from_truth_table(ctx, &rows).expect("row count matches the context")
}

/// A random finitely presented algebra on at most `max_gens` generators
/// named from `prefix`; with `nontrivial` the relator is never false.
fn random_presentation(
    store: &mut TermStore,
    prefix: &str,
    max_gens: usize,
    nontrivial: bool,
    rng: &mut ChaCha8Rng,
) -> Presentation {
    loop {
        let ctx = named_ctx(prefix, rng.gen_range(0..=max_gens));
        let relator = random_fn(store, &ctx, rng);
        if nontrivial && relator.is_false() {
            continue;
        }
        return Presentation::from_relator(relator);
    }
}

/// The inclusion of one free algebra into another whose context extends
/// the first one: generators go to the generators of the same name.
fn inclusion(store: &mut TermStore, sub: &Presentation, sup: &Presentation) -> Hom {
    let images = sub
        .ctx()
        .iter()
        .map(|n| {
            let g = store.generator(sup.ctx(), n).expect("shared generator");
            sup.element_from_fn(store, &g).expect("element over the wider context")
        })
        .collect();
    Hom::new(store, sub, sup, images).expect("generator inclusion is well defined")
}

// -------------------------------------------------------------------------
// Criterion 1: cardinality of the free algebras.
// -------------------------------------------------------------------------

#[test]
fn criterion_01_free_algebra_cardinalities() {
    let mut st = TermStore::new();
    for n in 0usize..=3 {
        let ctx = GeneratorContext::numbered(n);
        let rows = 1usize << n;
        let tables = 1u64 << rows;
        let mut handles: HashSet<CanonicalFn> = HashSet::new();
        for bits in 0..tables {
            let table: Vec<bool> = (0..rows).map(|i| bits >> i & 1 == 1).collect();
            handles.insert(st.from_truth_table(&ctx, &table).unwrap());
        }
        // Distinct tables intern to distinct handles, and nothing else
        // exists: the handle count *is* the algebra's cardinality.
        assert_eq!(handles.len() as u64, tables, "n = {n}");
        let free = Presentation::free(&st, &ctx);
        assert_eq!(free.element_count(&st).unwrap(), u128::from(tables), "n = {n}");
    }

    let ctx = GeneratorContext::numbered(1);
    let g = st.generator(&ctx, "0").unwrap();
    let not_g = st.not(&g).unwrap();
    let expected = [st.bot(&ctx), g, not_g, st.top(&ctx)];
    let elements = Presentation::free(&st, &ctx).elements(&mut st).unwrap();
    assert_eq!(elements.len(), 4);
    for want in &expected {
        assert_eq!(elements.iter().filter(|e| e.value() == want).count(), 1);
    }
    println!(
        "criterion 1: PASS — 2^(2^n) distinct functions interned for n ≤ 3; \
         the one-generator algebra is exactly bottom, g, not g, top"
    );
}

// -------------------------------------------------------------------------
// Criterion 2: interpolation across pushouts of free algebras.
// -------------------------------------------------------------------------

#[test]
fn criterion_02_interpolation_soundness() {
    let mut st = TermStore::new();
    let mut rng = rng(0x02);
    let mut feasible = 0usize;
    let mut infeasible = 0usize;
    while feasible < 500 || infeasible < 200 {
        let zctx = named_ctx("z", rng.gen_range(0..=3));
        let bctx = zctx.concat(&named_ctx("u", rng.gen_range(0..=3))).unwrap();
        let wctx = named_ctx("w", rng.gen_range(0..=3));
        let cctx = zctx.concat(&wctx).unwrap();
        let joint = bctx.concat(&wctx).unwrap();

        let apex = Presentation::free(&st, &zctx);
        let left = Presentation::free(&st, &bctx);
        let right = Presentation::free(&st, &cctx);
        let f = inclusion(&mut st, &apex, &left);
        let g = inclusion(&mut st, &apex, &right);

        // Half the draws are built around a known solution so feasible
        // instances appear at every context size; the rest are uniform.
        let (b_fn, c_fn) = if rng.gen_bool(0.5) {
            let a0 = random_fn(&mut st, &zctx, &mut rng);
            let wb = st.widen(&a0, &bctx).unwrap();
            let wc = st.widen(&a0, &cctx).unwrap();
            let eb = random_fn(&mut st, &bctx, &mut rng);
            let ec = random_fn(&mut st, &cctx, &mut rng);
            (st.meet(&wb, &eb).unwrap(), st.join(&wc, &ec).unwrap())
        } else {
            (
                random_fn(&mut st, &bctx, &mut rng),
                random_fn(&mut st, &cctx, &mut rng),
            )
        };

        // Feasibility oracle: rebuild both constraints as syntax and ask,
        // point by point over the joint context, whether b entails c.
        let tb = st.to_canonical_term(&b_fn).unwrap();
        let tc = st.to_canonical_term(&c_fn).unwrap();
        let feasible_by_oracle = Assignment::all(&joint)
            .iter()
            .all(|p| !tb.eval_assignment(p).unwrap() || tc.eval_assignment(p).unwrap());

        let b = left.element_from_fn(&mut st, &b_fn).unwrap();
        let c = right.element_from_fn(&mut st, &c_fn).unwrap();
        let po = pushout(&mut st, &f, &g).unwrap();
        let problem = InterpolationProblem::new(po, b, c).unwrap();
        match interpolate(&mut st, &problem) {
            Ok(cert) => {
                assert!(feasible_by_oracle, "engine interpolated an infeasible instance");
                assert!(all_ok(&cert.checks));
                // The sandwich b ≤ f(a) and g(a) ≤ c, re-checked pointwise
                // on rebuilt syntax over each leg's own context.
                let fa = f.apply(&mut st, &cert.a).unwrap();
                let ga = g.apply(&mut st, &cert.a).unwrap();
                let tfa = st.to_canonical_term(fa.value()).unwrap();
                let tga = st.to_canonical_term(ga.value()).unwrap();
                for p in Assignment::all(&bctx) {
                    assert!(!tb.eval_assignment(&p).unwrap() || tfa.eval_assignment(&p).unwrap());
                }
                for p in Assignment::all(&cctx) {
                    assert!(!tga.eval_assignment(&p).unwrap() || tc.eval_assignment(&p).unwrap());
                }
                if feasible < 500 {
                    feasible += 1;
                }
            }
            Err(InterpolationError::HypothesisFails { witness }) => {
                assert!(!feasible_by_oracle, "engine rejected a feasible instance");
                // The witness must genuinely separate the two corners.
                let bc = problem.pushout.from_left.apply(&mut st, &problem.b).unwrap();
                let cc = problem.pushout.from_right.apply(&mut st, &problem.c).unwrap();
                let tbc = st.to_canonical_term(bc.value()).unwrap();
                let tcc = st.to_canonical_term(cc.value()).unwrap();
                assert!(tbc.eval_assignment(&witness).unwrap());
                assert!(!tcc.eval_assignment(&witness).unwrap());
                if infeasible < 200 {
                    infeasible += 1;
                }
            }
            Err(e) => panic!("unexpected interpolation failure: {e}"),
        }
    }
    println!(
        "criterion 2: PASS — 500 feasible pushout instances interpolated with the sandwich \
         re-checked pointwise; 200 infeasible ones rejected with a genuine violating atom"
    );
}

// -------------------------------------------------------------------------
// Criterion 3: retraction synthesis for definitional constraints.
// -------------------------------------------------------------------------

#[test]
fn criterion_03_retraction_synthesis() {
    let mut st = TermStore::new();
    let mut rng = rng(0x03);
    for round in 0..300 {
        let zctx = named_ctx("z", rng.gen_range(0..=3));
        let yctx = named_ctx("y", rng.gen_range(0..=3));
        let xctx = zctx.concat(&yctx).unwrap();

        // b := (and over y of  y <-> u_y(Z))  and  beta(Z), with uniformly
        // random tables for every u_y and for beta.
        let mut parts = Vec::new();
        for yname in yctx.iter() {
            let u = random_fn(&mut st, &zctx, &mut rng);
            let wide = st.widen(&u, &xctx).unwrap();
            let gy = st.generator(&xctx, yname).unwrap();
            parts.push(st.iff(&gy, &wide).unwrap());
        }
        let beta = random_fn(&mut st, &zctx, &mut rng);
        parts.push(st.widen(&beta, &xctx).unwrap());
        let b = st.big_meet(&xctx, &parts).unwrap();

        let rp = RetractionProblem::new(&mut st, &xctx, &zctx, &b).unwrap();
        assert!(
            check_star(&mut st, &rp).unwrap().holds(),
            "round {round}: definitional constraint must determine its dependents"
        );
        let syn = synthesize_retraction(&mut st, &rp).unwrap();
        assert!(all_ok(&syn.checks), "round {round}");
        for c in &syn.checks {
            assert!(c.recompute(&mut st).unwrap(), "round {round}: {}", c.label);
        }
        let composed = syn.h.compose(&mut st, &syn.inclusion).unwrap();
        let ident = Hom::identity(&mut st, syn.inclusion.source()).unwrap();
        assert_eq!(composed, ident, "round {round}: h after the inclusion must be the identity");
    }
    println!(
        "criterion 3: PASS — 300 retractions synthesized from definitional constraints; \
         determinacy, the per-generator sandwich, exact reconstruction, and h∘i = id all hold"
    );
}

// -------------------------------------------------------------------------
// Criterion 4: products, coproducts, disjointness, and stability.
// -------------------------------------------------------------------------

#[test]
fn criterion_04_products_coproducts_and_stability() {
    let mut st = TermStore::new();
    let mut rng = rng(0x04);

    // The binary product of two copies of the two-element algebra is the
    // four-element algebra on one generator.
    let two = Presentation::free(&st, &GeneratorContext::empty());
    let p = product(&mut st, &[two.clone(), two.clone()]).unwrap();
    assert!(all_ok(&p.checks));
    assert_eq!(p.result.atoms(&st).unwrap().len(), 2);
    let k1 = Presentation::free(&st, &GeneratorContext::numbered(1));
    let cmp = hom_from_dual_map(&mut st, &p.result, &k1, &[0, 1]).unwrap();
    assert!(cmp.is_isomorphism(&mut st).unwrap());

    // Atom counts are additive over products and multiplicative over
    // coproducts (folded as pushouts under the initial algebra).
    let init = Presentation::free(&st, &GeneratorContext::empty());
    for round in 0..60 {
        let k = rng.gen_range(1..=3);
        let factors: Vec<Presentation> = (0..k)
            .map(|_| random_presentation(&mut st, "g", 2, false, &mut rng))
            .collect();
        let data = product(&mut st, &factors).unwrap();
        assert!(all_ok(&data.checks), "round {round}");
        let sum: usize = factors.iter().map(|f| f.atoms(&st).unwrap().len()).sum();
        assert_eq!(data.result.atoms(&st).unwrap().len(), sum, "round {round}");

        for i in 0..k {
            for j in i + 1..k {
                let cert = check_disjointness(&mut st, &data, i, j).unwrap();
                assert!(all_ok(&cert.checks), "round {round}: tags {i},{j}");
            }
        }

        let mut co = factors[0].clone();
        for fct in &factors[1..] {
            let l = Hom::new(&mut st, &init, &co, vec![]).unwrap();
            let r = Hom::new(&mut st, &init, fct, vec![]).unwrap();
            let po = pushout(&mut st, &l, &r).unwrap();
            assert!(all_ok(&po.checks), "round {round}");
            co = po.result;
        }
        let prod: usize = factors.iter().map(|f| f.atoms(&st).unwrap().len()).product();
        assert_eq!(co.atoms(&st).unwrap().len(), prod, "round {round}");
    }

    // Pulling the canonical decomposition of a product back along a random
    // map yields a decomposition of the source, with both inverse
    // identities checked element by element.
    for round in 0..100 {
        let a = random_presentation(&mut st, "p", 2, true, &mut rng);
        let b = random_presentation(&mut st, "q", 2, true, &mut rng);
        let data = product(&mut st, &[a, b]).unwrap();
        let m = data.result.atoms(&st).unwrap().len();
        let tgt = random_presentation(&mut st, "t", 2, true, &mut rng);
        let tn = tgt.atoms(&st).unwrap().len();
        let map: Vec<usize> = (0..tn).map(|_| rng.gen_range(0..m)).collect();
        let h = hom_from_dual_map(&mut st, &data.result, &tgt, &map).unwrap();
        let w = pullback_stability_witness(&mut st, &data, &h).unwrap();
        assert!(all_ok(&w.checks), "round {round}");
        for c in &w.checks {
            assert!(c.recompute(&mut st).unwrap(), "round {round}: {}", c.label);
        }
    }
    println!(
        "criterion 4: PASS — product(2, 2) is the one-generator algebra; atom counts additive \
         over 60 random products and multiplicative over their coproducts; disjointness \
         certified; stability identities re-verified on 100 random maps"
    );
}

// -------------------------------------------------------------------------
// Criterion 5: elements as subobjects, order and naturality.
// -------------------------------------------------------------------------

#[test]
fn criterion_05_subobject_order_isomorphism_and_naturality() {
    let mut st = TermStore::new();
    let mut rng = rng(0x05);

    // Order isomorphism, exhaustively: for every algebra on at most three
    // generators and every pair of elements, the algebra order and the
    // subobject order agree, and the element round-trips.
    let mut pairs = 0usize;
    for n in 0usize..=3 {
        let ctx = GeneratorContext::numbered(n);
        let rows = 1usize << n;
        for bits in 0..(1u64 << rows) {
            let table: Vec<bool> = (0..rows).map(|i| bits >> i & 1 == 1).collect();
            let relator = st.from_truth_table(&ctx, &table).unwrap();
            let a = Presentation::from_relator(relator);
            let elements = a.elements(&mut st).unwrap();
            let subs: Vec<_> = elements
                .iter()
                .map(|e| element_to_subobject(&mut st, e).unwrap())
                .collect();
            for (e1, s1) in elements.iter().zip(&subs) {
                assert_eq!(&subobject_to_element(s1), e1);
                for (e2, s2) in elements.iter().zip(&subs) {
                    let by_order = st.leq(e1.value(), e2.value()).unwrap();
                    let by_subobject = subobject_leq(&mut st, s1, s2).unwrap();
                    assert_eq!(by_order, by_subobject);
                    pairs += 1;
                }
            }
        }
    }

    // Naturality, elementwise: pulling the subobject named by h(e) back
    // along the dual of h recovers the subobject named by e.
    for round in 0..50 {
        let a = random_presentation(&mut st, "x", 3, true, &mut rng);
        let b = random_presentation(&mut st, "y", 3, false, &mut rng);
        let an = a.atoms(&st).unwrap().len();
        let bn = b.atoms(&st).unwrap().len();
        let map: Vec<usize> = (0..bn).map(|_| rng.gen_range(0..an)).collect();
        let h = hom_from_dual_map(&mut st, &a, &b, &map).unwrap();
        let batoms = b.atoms(&st).unwrap();
        for e in a.elements(&mut st).unwrap() {
            let he = h.apply(&mut st, &e).unwrap();
            for q in &batoms {
                let in_image = st.evaluate(he.value(), q).unwrap();
                let p = h.dual_atom(&st, q).unwrap();
                let in_source = st.evaluate(e.value(), &p).unwrap();
                assert_eq!(in_image, in_source, "round {round}");
            }
        }
    }
    println!(
        "criterion 5: PASS — order isomorphism checked on {pairs} element pairs across every \
         algebra with ≤ 3 generators; naturality squares hold elementwise for 50 random maps"
    );
}

// -------------------------------------------------------------------------
// Criterion 6: quantifier elimination and the decision procedure.
// -------------------------------------------------------------------------

/// A random quantifier-free formula over `ctx`.
fn random_qef(ctx: &GeneratorContext, rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let vars = ctx.names();
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 if !vars.is_empty() => {
                let v = vars[rng.gen_range(0..vars.len())].as_str();
                Formula::rel(ctx, T2_SYMBOL, &[v]).unwrap()
            }
            1 => Formula::top(ctx),
            _ => Formula::bot(ctx),
        };
    }
    match rng.gen_range(0..8) {
        0 | 1 if !vars.is_empty() => {
            let v = vars[rng.gen_range(0..vars.len())].as_str();
            Formula::rel(ctx, T2_SYMBOL, &[v]).unwrap()
        }
        2 if !vars.is_empty() => {
            let x = vars[rng.gen_range(0..vars.len())].as_str();
            let y = vars[rng.gen_range(0..vars.len())].as_str();
            Formula::eq(ctx, x, y).unwrap()
        }
        3 => Formula::not(random_qef(ctx, rng, depth - 1)),
        4 => Formula::big_meet(
            ctx,
            vec![random_qef(ctx, rng, depth - 1), random_qef(ctx, rng, depth - 1)],
        )
        .unwrap(),
        5 => Formula::big_join(
            ctx,
            vec![random_qef(ctx, rng, depth - 1), random_qef(ctx, rng, depth - 1)],
        )
        .unwrap(),
        6 => Formula::implies(random_qef(ctx, rng, depth - 1), random_qef(ctx, rng, depth - 1))
            .unwrap(),
        _ => Formula::iff(random_qef(ctx, rng, depth - 1), random_qef(ctx, rng, depth - 1))
            .unwrap(),
    }
}

/// A random formula whose existentials are definitional — each bound
/// variable is fixed by a biconditional against the outer variables — so
/// every quantifier is provably unique.
fn random_aqf(
    ctx: &GeneratorContext,
    rng: &mut ChaCha8Rng,
    depth: usize,
    fresh: &mut usize,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.4) {
        return random_qef(ctx, rng, 3);
    }
    let name = format!("q{}", *fresh);
    *fresh += 1;
    let bound = GeneratorContext::new([name.clone()]).unwrap();
    let inner = bound.concat(ctx).unwrap();
    let definition = Formula::iff(
        Formula::rel(&inner, T2_SYMBOL, &[name.as_str()]).unwrap(),
        random_qef(ctx, rng, 2).weaken(&inner).unwrap(),
    )
    .unwrap();
    let rest = random_aqf(&inner, rng, depth - 1, fresh);
    let body = Formula::big_meet(&inner, vec![definition, rest]).unwrap();
    Formula::exists(&bound, ctx, body).unwrap()
}

#[test]
fn criterion_06_elimination_and_decision() {
    let mut st = TermStore::new();
    let mut rng = rng(0x06);
    let theory = t2_theory();
    let models = [FinModel::two_element(&[0]), FinModel::two_element(&[1])];
    for m in &models {
        assert!(is_model(m, &theory).unwrap());
    }

    // Elimination: quantifier-free output that the two-point models of the
    // theory cannot tell apart from the input.
    for round in 0..200 {
        let ctx = named_ctx("v", rng.gen_range(0..=4));
        let mut fresh = 0usize;
        let phi = random_aqf(&ctx, &mut rng, 2, &mut fresh);
        let cert = t2_qe(&mut st, &phi).unwrap();
        assert!(cert.output.is_qef(), "round {round}");
        assert!(all_ok(&cert.checks), "round {round}");
        for c in &cert.checks {
            assert!(c.recompute(&mut st).unwrap(), "round {round}: {}", c.label);
        }
        for m in &models {
            let before = match interpret(m, &phi).unwrap() {
                Interpreted::Set(s) => s,
                other => panic!("input should interpret in a model of the theory: {other:?}"),
            };
            let after = match interpret(m, &cert.output).unwrap() {
                Interpreted::Set(s) => s,
                other => panic!("output should interpret everywhere: {other:?}"),
            };
            assert_eq!(before, after, "round {round}");
        }
    }

    // Decision: the axioms themselves...
    assert_eq!(theory.axioms.len(), 4);
    for ax in &theory.axioms {
        assert!(t2_proves(&mut st, ax).unwrap().is_provable());
    }

    // ...then random sequents, classified independently by satisfaction in
    // the two binary models, with every refutation's countermodel replayed.
    let mut provable = 0usize;
    let mut refuted = 0usize;
    while provable < 100 || refuted < 100 {
        let ctx = named_ctx("v", rng.gen_range(1..=3));
        let mut fresh = 0usize;
        let ante = if rng.gen_bool(0.25) {
            random_aqf(&ctx, &mut rng, 1, &mut fresh)
        } else {
            random_qef(&ctx, &mut rng, 3)
        };
        let cons = if rng.gen_bool(0.25) {
            random_aqf(&ctx, &mut rng, 1, &mut fresh)
        } else {
            random_qef(&ctx, &mut rng, 3)
        };
        let s = Sequent::new(ante, cons).unwrap();
        let holds_in_models = models
            .iter()
            .all(|m| satisfies(m, &s).unwrap());
        match t2_proves(&mut st, &s).unwrap() {
            ProofOutcome::Provable => {
                assert!(holds_in_models, "proved a sequent some binary model rejects");
                if provable < 100 {
                    provable += 1;
                }
            }
            ProofOutcome::Refuted(cm) => {
                assert!(!holds_in_models, "refuted a sequent every binary model accepts");
                assert!(is_model(&cm.model, &theory).unwrap());
                let in_ante = match interpret(&cm.model, &s.antecedent).unwrap() {
                    Interpreted::Set(t) => t,
                    other => panic!("antecedent should interpret: {other:?}"),
                };
                let in_cons = match interpret(&cm.model, &s.consequent).unwrap() {
                    Interpreted::Set(t) => t,
                    other => panic!("consequent should interpret: {other:?}"),
                };
                assert!(in_ante.tuples.contains(&cm.point));
                assert!(!in_cons.tuples.contains(&cm.point));
                if refuted < 100 {
                    refuted += 1;
                }
            }
        }
    }

    // Reification and translation are mutually inverse: on elements up to
    // handle equality, on canonical formulas up to structural equality.
    for round in 0..200 {
        let ctx = named_ctx("m", rng.gen_range(0..=4));
        let a = random_fn(&mut st, &ctx, &mut rng);
        let phi = reify(&mut st, &a).unwrap();
        assert!(phi.is_qef(), "round {round}");
        let back = t2_translate(&mut st, &phi).unwrap();
        assert_eq!(back, a, "round {round}: translate after reify must fix elements");
        let again = reify(&mut st, &back).unwrap();
        assert_eq!(again, phi, "round {round}: reify after translate must fix formulas");
    }
    println!(
        "criterion 6: PASS — 200 eliminations agree with both binary models; 4 axioms plus \
         100 provable and 100 refuted sequents decided with replayed countermodels; \
         reify/translate are mutually inverse on 200 random elements"
    );
}

// -------------------------------------------------------------------------
// Criterion 7: the syntactic category and its comparison functor.
// -------------------------------------------------------------------------

#[test]
fn criterion_07_syntactic_category_equivalence() {
    let mut st = TermStore::new();
    let mut rng = rng(0x07);

    // Every object on at most two generators, with every constraint.
    let mut pool: Vec<SynObject> = Vec::new();
    for n in 0usize..=2 {
        let ctx = GeneratorContext::numbered(n);
        let rows = 1usize << n;
        for bits in 0..(1u64 << rows) {
            let table: Vec<bool> = (0..rows).map(|i| bits >> i & 1 == 1).collect();
            let alpha = st.from_truth_table(&ctx, &table).unwrap();
            pool.push(SynObject::new(&mut st, &ctx, &alpha).unwrap());
        }
    }
    assert_eq!(pool.len(), 22);
    let points: Vec<usize> = pool.iter().map(|o| o.points(&st).unwrap().len()).collect();

    // Hom-set sizes: counted, enumerated, and pairwise distinct.
    let mut sets: HashMap<(usize, usize), Vec<SynMorphism>> = HashMap::new();
    for (i, a) in pool.iter().enumerate() {
        for (j, b) in pool.iter().enumerate() {
            let n = hom_count(&st, a, b).unwrap();
            let hs = hom_set(&mut st, a, b).unwrap();
            assert_eq!(hs.len() as u128, n);
            let expected = if points[i] == 0 {
                1
            } else {
                (points[j] as u128).pow(points[i] as u32)
            };
            assert_eq!(n, expected, "objects {i} -> {j}");
            let distinct: HashSet<CanonicalFn> = hs.iter().map(|m| m.graph().clone()).collect();
            assert_eq!(distinct.len(), hs.len());
            sets.insert((i, j), hs);
        }
    }
    let h = SynObject::generic(&st);
    let ctx2 = GeneratorContext::numbered(2);
    let top2 = st.top(&ctx2);
    let h2 = SynObject::new(&mut st, &ctx2, &top2).unwrap();
    assert_eq!(hom_count(&st, &h, &h).unwrap(), 4);
    assert_eq!(hom_count(&st, &h2, &h).unwrap(), 16);

    // Category laws on random composable triples drawn from the pool.
    let inhabited: Vec<usize> = (0..pool.len()).filter(|&i| points[i] > 0).collect();
    for round in 0..200 {
        let ai = inhabited[rng.gen_range(0..inhabited.len())];
        let bi = inhabited[rng.gen_range(0..inhabited.len())];
        let ci = inhabited[rng.gen_range(0..inhabited.len())];
        let di = inhabited[rng.gen_range(0..inhabited.len())];
        let pick = |set: &Vec<SynMorphism>, rng: &mut ChaCha8Rng| {
            set[rng.gen_range(0..set.len())].clone()
        };
        let f = pick(&sets[&(ai, bi)], &mut rng);
        let g = pick(&sets[&(bi, ci)], &mut rng);
        let k = pick(&sets[&(ci, di)], &mut rng);
        let gf = compose(&mut st, &g, &f).unwrap();
        let kg = compose(&mut st, &k, &g).unwrap();
        let left = compose(&mut st, &kg, &f).unwrap();
        let right = compose(&mut st, &k, &gf).unwrap();
        assert_eq!(left.graph(), right.graph(), "round {round}: associativity");
        let ia = identity(&mut st, &pool[ai]).unwrap();
        let ib = identity(&mut st, &pool[bi]).unwrap();
        assert_eq!(compose(&mut st, &f, &ia).unwrap().graph(), f.graph(), "round {round}");
        assert_eq!(compose(&mut st, &ib, &f).unwrap().graph(), f.graph(), "round {round}");
    }

    // The comparison functor sends the generic object to the free algebra
    // on one generator, with the distinguished relation on the generator.
    let fh = f2_object(&h);
    assert_eq!(fh, Presentation::free(&st, &GeneratorContext::numbered(1)));
    assert!(fh.relator().is_true());
    let universal = universal_model_check(&mut st).unwrap();
    assert!(all_ok(&universal.checks));

    // Essential surjectivity on the nose for every presentation on at
    // most two generators, then a sampled functorial equivalence sweep.
    for n in 0usize..=2 {
        let ctx = GeneratorContext::numbered(n);
        let rows = 1usize << n;
        for bits in 0..(1u64 << rows) {
            let table: Vec<bool> = (0..rows).map(|i| bits >> i & 1 == 1).collect();
            let relator = st.from_truth_table(&ctx, &table).unwrap();
            let o = SynObject::new(&mut st, &ctx, &relator).unwrap();
            assert_eq!(f2_object(&o), Presentation::from_relator(relator));
        }
    }
    let report = check_equivalence_sample(&mut st, 2, 0x07).unwrap();
    assert!(report.all_ok());
    println!(
        "criterion 7: PASS — all 484 hom-set sizes over ≤ 2 generators match the point-set \
         count (4 and 16 pinned); category laws on 200 random triples; the generic object maps \
         to the free one-generator algebra; every small presentation is hit on the nose \
         ({} objects, {} hom-sets re-checked functorially)",
        report.objects_checked, report.hom_sets_checked
    );
}

// -------------------------------------------------------------------------
// Criterion 8: finite duality in both directions.
// -------------------------------------------------------------------------

#[test]
fn criterion_08_finite_duality_round_trips() {
    let mut st = TermStore::new();

    // Points of the powerset algebra: exactly one per set element.
    for n in 0usize..=8 {
        let b = powerset_algebra(&mut st, n).unwrap();
        let d = stone_dual(&st, &b).unwrap();
        assert_eq!(d.points.len(), n, "n = {n}");
        let distinct: HashSet<usize> = d.points.iter().map(|p| p.index()).collect();
        assert_eq!(distinct.len(), n, "n = {n}");
        for p in &d.points {
            assert!(st.evaluate(b.relator(), p).unwrap(), "points satisfy the relator");
        }
    }

    // The comparison map from the powerset of an algebra's point set back
    // to the algebra is an isomorphism, for every small presentation.
    let mut algebras = 0usize;
    for n in 0usize..=3 {
        let ctx = GeneratorContext::numbered(n);
        let rows = 1usize << n;
        for bits in 0..(1u64 << rows) {
            let table: Vec<bool> = (0..rows).map(|i| bits >> i & 1 == 1).collect();
            let relator = st.from_truth_table(&ctx, &table).unwrap();
            let a = Presentation::from_relator(relator);
            let iso = double_dual_iso(&mut st, &a).unwrap();
            assert_eq!(iso.target(), &a);
            assert!(iso.is_isomorphism(&mut st).unwrap());
            algebras += 1;
        }
    }
    println!(
        "criterion 8: PASS — dual of the powerset algebra has exactly n points for n ≤ 8; \
         the double-dual comparison is an isomorphism for all {algebras} algebras with \
         ≤ 3 generators"
    );
}

// -------------------------------------------------------------------------
// Criterion 9: choice instances with definitionally unique existentials.
// -------------------------------------------------------------------------

#[test]
fn criterion_09_choice_instances() {
    let mut st = TermStore::new();
    let mut rng = rng(0x09);
    for round in 0..100 {
        let shared = named_ctx("s", rng.gen_range(0..=2));
        let k = rng.gen_range(1..=3);
        let mut bounds = Vec::new();
        let mut bodies = Vec::new();
        for i in 0..k {
            let size = rng.gen_range(1..=2);
            let bound =
                GeneratorContext::new((0..size).map(|j| format!("e{i}n{j}"))).unwrap();
            let inner = bound.concat(&shared).unwrap();
            let mut parts = Vec::new();
            for y in bound.iter() {
                let psi = random_qef(&shared, &mut rng, 2).weaken(&inner).unwrap();
                let atom = Formula::rel(&inner, T2_SYMBOL, &[y.as_str()]).unwrap();
                parts.push(Formula::iff(atom, psi).unwrap());
            }
            parts.push(random_qef(&shared, &mut rng, 2).weaken(&inner).unwrap());
            bodies.push(Formula::big_meet(&inner, parts).unwrap());
            bounds.push(bound);
        }
        assert!(
            ac_instance_check(&mut st, &bounds, &bodies, &shared).unwrap(),
            "round {round}"
        );
    }
    println!(
        "criterion 9: PASS — 100 random instances with disjoint bound blocks and \
         definitionally unique existentials all validate"
    );
}
