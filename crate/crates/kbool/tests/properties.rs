//! Randomized structural invariants of the interning engine, checked
//! against plain syntactic evaluation.  Every property compares the
//! diagram-backed answer with one computed by structural recursion on
//! terms, so a shared defect would have to appear in two unrelated
//! evaluators at once.

use kbool::store::TermStore;
use kbool::term::{Assignment, GeneratorContext, Term};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["w", "x", "y", "z"];

fn full_ctx() -> GeneratorContext {
    GeneratorContext::new(NAMES).unwrap()
}

/// Random terms over the given generator names.
fn arb_term_over(names: &'static [&'static str]) -> impl Strategy<Value = Term> {
    let leaf = if names.is_empty() {
        prop_oneof![Just(Term::Top), Just(Term::Bot)].boxed()
    } else {
        prop_oneof![
            (0usize..names.len()).prop_map(move |i| Term::gen(names[i])),
            Just(Term::Top),
            Just(Term::Bot),
        ]
        .boxed()
    };
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::not),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Term::meet),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Term::join),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::imp(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::iff(a, b)),
        ]
    })
}

fn arb_term() -> impl Strategy<Value = Term> {
    arb_term_over(&NAMES)
}

/// An assignment over `ctx` combining `outer` with `inner` wherever
/// `inner` covers a name.
fn overridden(outer: &Assignment, inner: &Assignment, ctx: &GeneratorContext) -> Assignment {
    let bits = ctx
        .iter()
        .map(|n| inner.get(n).or_else(|| outer.get(n)).unwrap())
        .collect();
    Assignment::new(ctx.clone(), bits)
}

proptest! {
    /// Two terms intern to the same handle exactly when they take the
    /// same value at every point.
    #[test]
    fn interning_identifies_exactly_the_semantically_equal_terms(
        a in arb_term(),
        b in arb_term(),
    ) {
        let ctx = full_ctx();
        let mut st = TermStore::new();
        let fa = st.eval(&a, &ctx).unwrap();
        let fb = st.eval(&b, &ctx).unwrap();
        let same_semantics = Assignment::all(&ctx).iter().all(|p| {
            a.eval_assignment(p).unwrap() == b.eval_assignment(p).unwrap()
        });
        prop_assert_eq!(fa == fb, same_semantics);
    }

    /// Reading the canonical term back into the store is the identity.
    #[test]
    fn canonical_terms_round_trip_through_evaluation(a in arb_term()) {
        let ctx = full_ctx();
        let mut st = TermStore::new();
        let f = st.eval(&a, &ctx).unwrap();
        let t = st.to_canonical_term(&f).unwrap();
        let g = st.eval(&t, &ctx).unwrap();
        prop_assert_eq!(f, g);
    }

    /// Pointwise evaluation through the store agrees with structural
    /// recursion on the original syntax.
    #[test]
    fn diagram_evaluation_matches_syntactic_evaluation(a in arb_term()) {
        let ctx = full_ctx();
        let mut st = TermStore::new();
        let f = st.eval(&a, &ctx).unwrap();
        for p in Assignment::all(&ctx) {
            prop_assert_eq!(
                st.evaluate(&f, &p).unwrap(),
                a.eval_assignment(&p).unwrap()
            );
        }
    }

    /// Order queries agree with pointwise implication.
    #[test]
    fn order_queries_agree_with_pointwise_implication(
        a in arb_term(),
        b in arb_term(),
    ) {
        let ctx = full_ctx();
        let mut st = TermStore::new();
        let fa = st.eval(&a, &ctx).unwrap();
        let fb = st.eval(&b, &ctx).unwrap();
        let implied = Assignment::all(&ctx).iter().all(|p| {
            !a.eval_assignment(p).unwrap() || b.eval_assignment(p).unwrap()
        });
        prop_assert_eq!(st.leq(&fa, &fb).unwrap(), implied);
    }

    /// Existential projection is the pointwise disjunction over every
    /// setting of the projected block.
    #[test]
    fn existential_projection_is_a_pointwise_disjunction(
        a in arb_term(),
        k in 0usize..=4,
    ) {
        let ctx = full_ctx();
        let mut st = TermStore::new();
        let f = st.eval(&a, &ctx).unwrap();
        let bound = GeneratorContext::new(NAMES[..k].iter().copied()).unwrap();
        let projected = st.project_exists(&f, &bound).unwrap();
        for outer in Assignment::all(&ctx) {
            let expected = Assignment::all(&bound).iter().any(|inner| {
                let combined = overridden(&outer, inner, &ctx);
                a.eval_assignment(&combined).unwrap()
            });
            prop_assert_eq!(st.evaluate(&projected, &outer).unwrap(), expected);
        }
    }

    /// Widening to a larger context never changes values.
    #[test]
    fn widening_preserves_pointwise_values(a in arb_term_over(&NAMES[..2])) {
        let ctx = full_ctx();
        let narrow = GeneratorContext::new(NAMES[..2].iter().copied()).unwrap();
        let mut st = TermStore::new();
        let f = st.eval(&a, &narrow).unwrap();
        let widened = st.widen(&f, &ctx).unwrap();
        for p in Assignment::all(&ctx) {
            prop_assert_eq!(
                st.evaluate(&widened, &p).unwrap(),
                a.eval_assignment(&p).unwrap()
            );
        }
    }
}
