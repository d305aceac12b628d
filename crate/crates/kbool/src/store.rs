//! Canonical Boolean functions backed by hash-consed reduced ordered
//! binary decision diagrams.
//!
//! A [`TermStore`] owns an append-only table of decision nodes.  Nodes are
//! deduplicated on creation and the `lo == hi` redundancy is collapsed, so
//! every Boolean function over a fixed generator context has exactly one
//! root handle in the store.  Handle equality is therefore *the* equality
//! test on functions; no structural comparison ever happens after
//! construction.
//!
//! A [`CanonicalFn`] pairs a root handle with the [`GeneratorContext`] it is
//! read against: node levels index into that context, and the diagram's
//! variable order is the context's generator order.  Binary operations align
//! operands first, silently widening both sides into a common context when
//! the two contexts merge order-consistently.
//!
//! Negation is computed structurally (there are no complement edges), and a
//! store-global cache memoizes the binary connectives.  Quantifier
//! projection, generator substitution, and context transport use per-call
//! memo tables because their results depend on more than the operand pair.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::term::{Assignment, GeneratorContext, Term, TermError};

/// Default cap on the width of n-ary meets and joins.
pub const DEFAULT_ARITY_CAP: usize = 4096;

const FALSE: u32 = 0;
const TRUE: u32 = 1;
/// Level assigned to the two terminal nodes; larger than any real level.
const TERMINAL_LEVEL: u32 = u32::MAX;

static NEXT_STORE_ID: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Node {
    level: u32,
    lo: u32,
    hi: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum BinOp {
    And,
    Or,
    Xor,
}

/// A canonical Boolean function: a root handle in some store together with
/// the generator context its node levels refer to.
///
/// Equality compares store identity, context, and root handle.  Two
/// functions over the *same* context are equal exactly when they denote the
/// same Boolean function; use [`TermStore::equal`] to compare functions
/// whose contexts first need widening.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalFn {
    store_id: u64,
    ctx: GeneratorContext,
    root: u32,
}

impl CanonicalFn {
    pub fn ctx(&self) -> &GeneratorContext {
        &self.ctx
    }

    /// True when the function is constantly false.
    pub fn is_false(&self) -> bool {
        self.root == FALSE
    }

    /// True when the function is constantly true.
    pub fn is_true(&self) -> bool {
        self.root == TRUE
    }
}

/// An append-only store of decision-diagram nodes with hash consing.
///
/// Handles issued by a store stay valid for the store's whole lifetime.
/// Functions from different stores never mix; every operation checks and
/// reports [`TermError::StoreMismatch`] instead of touching foreign handles.
pub struct TermStore {
    id: u64,
    nodes: Vec<Node>,
    dedup: HashMap<Node, u32>,
    op_cache: HashMap<(BinOp, u32, u32), u32>,
    not_cache: HashMap<u32, u32>,
    arity_cap: usize,
}

impl Default for TermStore {
    fn default() -> Self {
        Self::new()
    }
}

impl TermStore {
    pub fn new() -> Self {
        Self::with_arity_cap(DEFAULT_ARITY_CAP)
    }

    /// Creates a store with a custom cap on n-ary connective width.
    pub fn with_arity_cap(arity_cap: usize) -> Self {
        let terminal = |_which: u32| Node {
            level: TERMINAL_LEVEL,
            lo: 0,
            hi: 0,
        };
        let mut nodes = Vec::with_capacity(2);
        nodes.push(Node { lo: FALSE, hi: FALSE, ..terminal(FALSE) });
        nodes.push(Node { lo: TRUE, hi: TRUE, ..terminal(TRUE) });
        TermStore {
            id: NEXT_STORE_ID.fetch_add(1, Ordering::Relaxed),
            nodes,
            dedup: HashMap::new(),
            op_cache: HashMap::new(),
            not_cache: HashMap::new(),
            arity_cap,
        }
    }

    pub fn arity_cap(&self) -> usize {
        self.arity_cap
    }

    /// Number of live nodes, terminals included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn check_owned(&self, f: &CanonicalFn) -> Result<(), TermError> {
        if f.store_id != self.id {
            return Err(TermError::StoreMismatch);
        }
        Ok(())
    }

    fn wrap(&self, ctx: &GeneratorContext, root: u32) -> CanonicalFn {
        CanonicalFn { store_id: self.id, ctx: ctx.clone(), root }
    }

    fn mk(&mut self, level: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let node = Node { level, lo, hi };
        if let Some(&h) = self.dedup.get(&node) {
            return h;
        }
        let h = self.nodes.len() as u32;
        self.nodes.push(node);
        self.dedup.insert(node, h);
        h
    }

    fn level(&self, n: u32) -> u32 {
        self.nodes[n as usize].level
    }

    // ------------------------------------------------------------------
    // Constants, generators, evaluation of terms
    // ------------------------------------------------------------------

    /// The constantly-true function over `ctx`.
    pub fn top(&self, ctx: &GeneratorContext) -> CanonicalFn {
        self.wrap(ctx, TRUE)
    }

    /// The constantly-false function over `ctx`.
    pub fn bot(&self, ctx: &GeneratorContext) -> CanonicalFn {
        self.wrap(ctx, FALSE)
    }

    /// The projection function of a named generator in `ctx`.
    pub fn generator(
        &mut self,
        ctx: &GeneratorContext,
        name: &str,
    ) -> Result<CanonicalFn, TermError> {
        let level = ctx
            .position(name)
            .ok_or_else(|| TermError::UnknownGenerator(name.to_string()))?;
        let root = self.mk(level as u32, FALSE, TRUE);
        Ok(self.wrap(ctx, root))
    }

    /// Evaluates a term to its canonical function over `ctx`.
    ///
    /// Evaluation is the free extension of the generator map: it commutes
    /// with all connectives, so syntactically different terms denoting the
    /// same function reach the same handle.
    pub fn eval(&mut self, term: &Term, ctx: &GeneratorContext) -> Result<CanonicalFn, TermError> {
        let root = self.eval_root(term, ctx)?;
        Ok(self.wrap(ctx, root))
    }

    fn eval_root(&mut self, term: &Term, ctx: &GeneratorContext) -> Result<u32, TermError> {
        Ok(match term {
            Term::Gen(n) => {
                let level = ctx
                    .position(n)
                    .ok_or_else(|| TermError::UnknownGenerator(n.clone()))?;
                self.mk(level as u32, FALSE, TRUE)
            }
            Term::Top => TRUE,
            Term::Bot => FALSE,
            Term::Not(t) => {
                let r = self.eval_root(t, ctx)?;
                self.apply_not(r)
            }
            Term::Meet(ts) => {
                self.check_arity(ts.len())?;
                let mut acc = TRUE;
                for t in ts {
                    let r = self.eval_root(t, ctx)?;
                    acc = self.apply_bin(BinOp::And, acc, r);
                }
                acc
            }
            Term::Join(ts) => {
                self.check_arity(ts.len())?;
                let mut acc = FALSE;
                for t in ts {
                    let r = self.eval_root(t, ctx)?;
                    acc = self.apply_bin(BinOp::Or, acc, r);
                }
                acc
            }
        })
    }

    fn check_arity(&self, arity: usize) -> Result<(), TermError> {
        if arity > self.arity_cap {
            return Err(TermError::ArityCapExceeded { arity, cap: self.arity_cap });
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Core apply recursion
    // ------------------------------------------------------------------

    fn apply_not(&mut self, a: u32) -> u32 {
        match a {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&a) {
            return r;
        }
        let Node { level, lo, hi } = self.nodes[a as usize];
        let nlo = self.apply_not(lo);
        let nhi = self.apply_not(hi);
        let r = self.mk(level, nlo, nhi);
        self.not_cache.insert(a, r);
        r
    }

    fn apply_bin(&mut self, op: BinOp, a: u32, b: u32) -> u32 {
        // Terminal cases.
        match op {
            BinOp::And => {
                if a == FALSE || b == FALSE {
                    return FALSE;
                }
                if a == TRUE {
                    return b;
                }
                if b == TRUE {
                    return a;
                }
                if a == b {
                    return a;
                }
            }
            BinOp::Or => {
                if a == TRUE || b == TRUE {
                    return TRUE;
                }
                if a == FALSE {
                    return b;
                }
                if b == FALSE {
                    return a;
                }
                if a == b {
                    return a;
                }
            }
            BinOp::Xor => {
                if a == b {
                    return FALSE;
                }
                if a == FALSE {
                    return b;
                }
                if b == FALSE {
                    return a;
                }
                if a == TRUE {
                    return self.apply_not(b);
                }
                if b == TRUE {
                    return self.apply_not(a);
                }
            }
        }
        // All three connectives are commutative; normalize the key.
        let key = if a <= b { (op, a, b) } else { (op, b, a) };
        if let Some(&r) = self.op_cache.get(&key) {
            return r;
        }
        let (la, lb) = (self.level(a), self.level(b));
        let level = la.min(lb);
        let (alo, ahi) = if la == level {
            let n = self.nodes[a as usize];
            (n.lo, n.hi)
        } else {
            (a, a)
        };
        let (blo, bhi) = if lb == level {
            let n = self.nodes[b as usize];
            (n.lo, n.hi)
        } else {
            (b, b)
        };
        let lo = self.apply_bin(op, alo, blo);
        let hi = self.apply_bin(op, ahi, bhi);
        let r = self.mk(level, lo, hi);
        self.op_cache.insert(key, r);
        r
    }

    // ------------------------------------------------------------------
    // Context alignment
    // ------------------------------------------------------------------

    /// Re-reads `f` against a wider (or reordered) context containing every
    /// generator of `f`'s context.
    pub fn widen(
        &mut self,
        f: &CanonicalFn,
        to: &GeneratorContext,
    ) -> Result<CanonicalFn, TermError> {
        self.check_owned(f)?;
        if &f.ctx == to {
            return Ok(f.clone());
        }
        let mut map = Vec::with_capacity(f.ctx.len());
        for n in f.ctx.iter() {
            map.push(
                to.position(n)
                    .ok_or_else(|| TermError::UnknownGenerator(n.clone()))? as u32,
            );
        }
        if map.windows(2).all(|w| w[0] < w[1]) {
            let mut memo = HashMap::new();
            let root = self.remap_levels(f.root, &map, &mut memo);
            Ok(self.wrap(to, root))
        } else {
            // The target lists shared generators in a different relative
            // order; fall back to substitution, which handles any order.
            let images: Vec<u32> = map.iter().map(|&l| self.mk(l, FALSE, TRUE)).collect();
            let mut memo = HashMap::new();
            let root = self.compose_root(f.root, &images, &mut memo);
            Ok(self.wrap(to, root))
        }
    }

    fn remap_levels(&mut self, n: u32, map: &[u32], memo: &mut HashMap<u32, u32>) -> u32 {
        if n == FALSE || n == TRUE {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let Node { level, lo, hi } = self.nodes[n as usize];
        let rlo = self.remap_levels(lo, map, memo);
        let rhi = self.remap_levels(hi, map, memo);
        let r = self.mk(map[level as usize], rlo, rhi);
        memo.insert(n, r);
        r
    }

    fn align(
        &mut self,
        a: &CanonicalFn,
        b: &CanonicalFn,
    ) -> Result<(GeneratorContext, u32, u32), TermError> {
        self.check_owned(a)?;
        self.check_owned(b)?;
        if a.ctx == b.ctx {
            return Ok((a.ctx.clone(), a.root, b.root));
        }
        let merged = a.ctx.union_ordered(&b.ctx)?;
        let wa = self.widen(a, &merged)?;
        let wb = self.widen(b, &merged)?;
        Ok((merged, wa.root, wb.root))
    }

    // ------------------------------------------------------------------
    // Boolean operations
    // ------------------------------------------------------------------

    pub fn meet(&mut self, a: &CanonicalFn, b: &CanonicalFn) -> Result<CanonicalFn, TermError> {
        let (ctx, ra, rb) = self.align(a, b)?;
        let r = self.apply_bin(BinOp::And, ra, rb);
        Ok(self.wrap(&ctx, r))
    }

    pub fn join(&mut self, a: &CanonicalFn, b: &CanonicalFn) -> Result<CanonicalFn, TermError> {
        let (ctx, ra, rb) = self.align(a, b)?;
        let r = self.apply_bin(BinOp::Or, ra, rb);
        Ok(self.wrap(&ctx, r))
    }

    pub fn not(&mut self, a: &CanonicalFn) -> Result<CanonicalFn, TermError> {
        self.check_owned(a)?;
        let r = self.apply_not(a.root);
        Ok(self.wrap(&a.ctx, r))
    }

    pub fn implies(&mut self, a: &CanonicalFn, b: &CanonicalFn) -> Result<CanonicalFn, TermError> {
        let (ctx, ra, rb) = self.align(a, b)?;
        let na = self.apply_not(ra);
        let r = self.apply_bin(BinOp::Or, na, rb);
        Ok(self.wrap(&ctx, r))
    }

    pub fn iff(&mut self, a: &CanonicalFn, b: &CanonicalFn) -> Result<CanonicalFn, TermError> {
        let (ctx, ra, rb) = self.align(a, b)?;
        let x = self.apply_bin(BinOp::Xor, ra, rb);
        let r = self.apply_not(x);
        Ok(self.wrap(&ctx, r))
    }

    /// Finitary meet.  The empty meet is `top` over `ctx`; operands are
    /// widened into `ctx`, which must contain all their generators.
    pub fn big_meet(
        &mut self,
        ctx: &GeneratorContext,
        items: &[CanonicalFn],
    ) -> Result<CanonicalFn, TermError> {
        self.check_arity(items.len())?;
        let mut acc = TRUE;
        for f in items {
            let w = self.widen(f, ctx)?;
            acc = self.apply_bin(BinOp::And, acc, w.root);
        }
        Ok(self.wrap(ctx, acc))
    }

    /// Finitary join.  The empty join is `bot` over `ctx`.
    pub fn big_join(
        &mut self,
        ctx: &GeneratorContext,
        items: &[CanonicalFn],
    ) -> Result<CanonicalFn, TermError> {
        self.check_arity(items.len())?;
        let mut acc = FALSE;
        for f in items {
            let w = self.widen(f, ctx)?;
            acc = self.apply_bin(BinOp::Or, acc, w.root);
        }
        Ok(self.wrap(ctx, acc))
    }

    /// Order test `a ≤ b`, decided by handle identity of `a ∧ b` with `a`.
    pub fn leq(&mut self, a: &CanonicalFn, b: &CanonicalFn) -> Result<bool, TermError> {
        let (_, ra, rb) = self.align(a, b)?;
        Ok(self.apply_bin(BinOp::And, ra, rb) == ra)
    }

    /// Equality test after context alignment; pure handle comparison.
    pub fn equal(&mut self, a: &CanonicalFn, b: &CanonicalFn) -> Result<bool, TermError> {
        let (_, ra, rb) = self.align(a, b)?;
        Ok(ra == rb)
    }

    // ------------------------------------------------------------------
    // Quantifier projection
    // ------------------------------------------------------------------

    /// Existential projection: the least function over the remaining
    /// generators that lies above `f`.  The projected generators stay in the
    /// context; the result simply no longer depends on them.
    pub fn project_exists(
        &mut self,
        f: &CanonicalFn,
        vars: &GeneratorContext,
    ) -> Result<CanonicalFn, TermError> {
        self.project(f, vars, BinOp::Or)
    }

    /// Universal projection: the greatest function over the remaining
    /// generators that lies below `f`.
    pub fn project_forall(
        &mut self,
        f: &CanonicalFn,
        vars: &GeneratorContext,
    ) -> Result<CanonicalFn, TermError> {
        self.project(f, vars, BinOp::And)
    }

    fn project(
        &mut self,
        f: &CanonicalFn,
        vars: &GeneratorContext,
        op: BinOp,
    ) -> Result<CanonicalFn, TermError> {
        self.check_owned(f)?;
        let mut mask = vec![false; f.ctx.len()];
        for v in vars.iter() {
            let i = f
                .ctx
                .position(v)
                .ok_or_else(|| TermError::UnknownGenerator(v.clone()))?;
            mask[i] = true;
        }
        let mut memo = HashMap::new();
        let root = self.project_root(f.root, &mask, op, &mut memo);
        Ok(self.wrap(&f.ctx, root))
    }

    fn project_root(
        &mut self,
        n: u32,
        mask: &[bool],
        op: BinOp,
        memo: &mut HashMap<u32, u32>,
    ) -> u32 {
        if n == FALSE || n == TRUE {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let Node { level, lo, hi } = self.nodes[n as usize];
        let plo = self.project_root(lo, mask, op, memo);
        let phi = self.project_root(hi, mask, op, memo);
        let r = if mask[level as usize] {
            self.apply_bin(op, plo, phi)
        } else {
            self.mk(level, plo, phi)
        };
        memo.insert(n, r);
        r
    }

    // ------------------------------------------------------------------
    // Substitution and transport
    // ------------------------------------------------------------------

    /// Free extension: replaces every generator of `f`'s context by its
    /// image under `images`, producing a function over `target`.  Every
    /// image must already live over `target` (or widen into it).
    pub fn compose_map(
        &mut self,
        f: &CanonicalFn,
        target: &GeneratorContext,
        images: &dyn Fn(&str) -> Option<CanonicalFn>,
    ) -> Result<CanonicalFn, TermError> {
        self.check_owned(f)?;
        let mut subst = Vec::with_capacity(f.ctx.len());
        for n in f.ctx.iter() {
            let img = images(n).ok_or_else(|| TermError::UnknownGenerator(n.clone()))?;
            let img = self.widen(&img, target)?;
            subst.push(img.root);
        }
        let mut memo = HashMap::new();
        let root = self.compose_root(f.root, &subst, &mut memo);
        Ok(self.wrap(target, root))
    }

    fn compose_root(&mut self, n: u32, subst: &[u32], memo: &mut HashMap<u32, u32>) -> u32 {
        if n == FALSE || n == TRUE {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let Node { level, lo, hi } = self.nodes[n as usize];
        let rlo = self.compose_root(lo, subst, memo);
        let rhi = self.compose_root(hi, subst, memo);
        let g = subst[level as usize];
        // if g then rhi else rlo
        let ng = self.apply_not(g);
        let t = self.apply_bin(BinOp::And, g, rhi);
        let e = self.apply_bin(BinOp::And, ng, rlo);
        let r = self.apply_bin(BinOp::Or, t, e);
        memo.insert(n, r);
        r
    }

    /// Transports `f` into `target` by renaming generators: names in the
    /// map are replaced, all others must appear verbatim in `target`.
    pub fn transport(
        &mut self,
        f: &CanonicalFn,
        target: &GeneratorContext,
        rename: &HashMap<String, String>,
    ) -> Result<CanonicalFn, TermError> {
        self.check_owned(f)?;
        let mut subst = Vec::with_capacity(f.ctx.len());
        for n in f.ctx.iter() {
            let name = rename.get(n).map(String::as_str).unwrap_or(n);
            let level = target
                .position(name)
                .ok_or_else(|| TermError::UnknownGenerator(name.to_string()))?;
            subst.push(self.mk(level as u32, FALSE, TRUE));
        }
        let mut memo = HashMap::new();
        let root = self.compose_root(f.root, &subst, &mut memo);
        Ok(self.wrap(target, root))
    }

    /// Re-reads `f` against a subcontext it does not actually depend on.
    /// Fails with [`TermError::ContextMismatch`] if `f` depends on a dropped
    /// generator, and with [`TermError::UnknownGenerator`] if `sub` is not a
    /// subcontext.
    pub fn restrict_context(
        &mut self,
        f: &CanonicalFn,
        sub: &GeneratorContext,
    ) -> Result<CanonicalFn, TermError> {
        self.check_owned(f)?;
        let mut map = vec![u32::MAX; f.ctx.len()];
        for (j, n) in sub.iter().enumerate() {
            let i = f
                .ctx
                .position(n)
                .ok_or_else(|| TermError::UnknownGenerator(n.clone()))?;
            map[i] = j as u32;
        }
        for name in self.support(f)? {
            let i = f.ctx.position(&name).unwrap();
            if map[i] == u32::MAX {
                return Err(TermError::ContextMismatch(name.clone(), name));
            }
        }
        // Support positions map order-preservingly whenever `sub` embeds in
        // `f.ctx`; otherwise go through substitution.
        let kept: Vec<u32> = map.iter().copied().filter(|&l| l != u32::MAX).collect();
        if kept.windows(2).all(|w| w[0] < w[1]) {
            let mut memo = HashMap::new();
            let root = self.remap_levels(f.root, &map, &mut memo);
            Ok(self.wrap(sub, root))
        } else {
            let images: Vec<u32> = map
                .iter()
                .map(|&l| if l == u32::MAX { FALSE } else { self.mk(l, FALSE, TRUE) })
                .collect();
            let mut memo = HashMap::new();
            let root = self.compose_root(f.root, &images, &mut memo);
            Ok(self.wrap(sub, root))
        }
    }

    /// Generator names `f` actually depends on, in context order.
    pub fn support(&self, f: &CanonicalFn) -> Result<Vec<String>, TermError> {
        self.check_owned(f)?;
        let mut seen = vec![false; f.ctx.len()];
        let mut visited = std::collections::HashSet::new();
        let mut stack = vec![f.root];
        while let Some(n) = stack.pop() {
            if n == FALSE || n == TRUE || !visited.insert(n) {
                continue;
            }
            let Node { level, lo, hi } = self.nodes[n as usize];
            seen[level as usize] = true;
            stack.push(lo);
            stack.push(hi);
        }
        Ok(f.ctx
            .iter()
            .enumerate()
            .filter(|(i, _)| seen[*i])
            .map(|(_, n)| n.clone())
            .collect())
    }

    // ------------------------------------------------------------------
    // Assignments, atoms, truth tables
    // ------------------------------------------------------------------

    /// Evaluates `f` at a total assignment over its context.
    pub fn evaluate(&self, f: &CanonicalFn, asg: &Assignment) -> Result<bool, TermError> {
        self.check_owned(f)?;
        let mut bits = Vec::with_capacity(f.ctx.len());
        for n in f.ctx.iter() {
            bits.push(
                asg.get(n)
                    .ok_or_else(|| TermError::UnknownGenerator(n.clone()))?,
            );
        }
        let mut n = f.root;
        while n != FALSE && n != TRUE {
            let Node { level, lo, hi } = self.nodes[n as usize];
            n = if bits[level as usize] { hi } else { lo };
        }
        Ok(n == TRUE)
    }

    /// The conjunction of literals selecting exactly the given assignment.
    pub fn minterm(&mut self, asg: &Assignment) -> CanonicalFn {
        let mut root = TRUE;
        for i in (0..asg.ctx().len()).rev() {
            root = if asg.bit(i) {
                self.mk(i as u32, FALSE, root)
            } else {
                self.mk(i as u32, root, FALSE)
            };
        }
        self.wrap(asg.ctx(), root)
    }

    /// Builds the function over `ctx` with the given truth table.  `rows`
    /// has length `2^ctx.len()` and is indexed by assignment rank (first
    /// generator most significant), matching [`Assignment::from_index`].
    pub fn from_truth_table(
        &mut self,
        ctx: &GeneratorContext,
        rows: &[bool],
    ) -> Result<CanonicalFn, TermError> {
        assert_eq!(
            rows.len(),
            1usize << ctx.len(),
            "truth table size must be 2^context size"
        );
        let root = self.tt_root(ctx.len(), 0, rows);
        Ok(self.wrap(ctx, root))
    }

    fn tt_root(&mut self, n: usize, level: usize, rows: &[bool]) -> u32 {
        if level == n {
            return if rows[0] { TRUE } else { FALSE };
        }
        let half = rows.len() / 2;
        let lo = self.tt_root(n, level + 1, &rows[..half]);
        let hi = self.tt_root(n, level + 1, &rows[half..]);
        self.mk(level as u32, lo, hi)
    }

    /// All satisfying assignments of `f`, in lexicographic order of its
    /// context.  These are the atoms below `f` in the free algebra.
    pub fn atoms(&self, f: &CanonicalFn) -> Result<Vec<Assignment>, TermError> {
        self.check_owned(f)?;
        let n = f.ctx.len();
        let mut out = Vec::new();
        let mut bits = vec![false; n];
        self.atoms_rec(f.root, 0, n, &f.ctx, &mut bits, &mut out);
        Ok(out)
    }

    fn atoms_rec(
        &self,
        node: u32,
        pos: usize,
        n: usize,
        ctx: &GeneratorContext,
        bits: &mut Vec<bool>,
        out: &mut Vec<Assignment>,
    ) {
        if node == FALSE {
            return;
        }
        if pos == n {
            debug_assert_eq!(node, TRUE);
            out.push(Assignment::new(ctx.clone(), bits.clone()));
            return;
        }
        let level = self.level(node);
        if level as usize > pos {
            for b in [false, true] {
                bits[pos] = b;
                self.atoms_rec(node, pos + 1, n, ctx, bits, out);
            }
        } else {
            let Node { lo, hi, .. } = self.nodes[node as usize];
            bits[pos] = false;
            self.atoms_rec(lo, pos + 1, n, ctx, bits, out);
            bits[pos] = true;
            self.atoms_rec(hi, pos + 1, n, ctx, bits, out);
        }
    }

    /// Number of satisfying assignments of `f` over its context.
    pub fn count_atoms(&self, f: &CanonicalFn) -> Result<u128, TermError> {
        self.check_owned(f)?;
        assert!(f.ctx.len() < 128, "context too large for exact atom counts");
        let mut memo = HashMap::new();
        Ok(self.count_rec(f.root, 0, f.ctx.len(), &mut memo))
    }

    fn count_rec(
        &self,
        node: u32,
        pos: usize,
        n: usize,
        memo: &mut HashMap<(u32, usize), u128>,
    ) -> u128 {
        if node == FALSE {
            return 0;
        }
        if pos == n {
            return 1;
        }
        if let Some(&c) = memo.get(&(node, pos)) {
            return c;
        }
        let level = self.level(node);
        let c = if level as usize > pos {
            2 * self.count_rec(node, pos + 1, n, memo)
        } else {
            let Node { lo, hi, .. } = self.nodes[node as usize];
            self.count_rec(lo, pos + 1, n, memo) + self.count_rec(hi, pos + 1, n, memo)
        };
        memo.insert((node, pos), c);
        c
    }

    /// Renders `f` as a canonical term: `top`, `bot`, or the complete
    /// disjunctive normal form over its satisfying assignments, with
    /// single-literal meets and single-minterm joins unwrapped.
    pub fn to_canonical_term(&self, f: &CanonicalFn) -> Result<Term, TermError> {
        if f.is_true() {
            return Ok(Term::Top);
        }
        if f.is_false() {
            return Ok(Term::Bot);
        }
        let atoms = self.atoms(f)?;
        let mut minterms = Vec::with_capacity(atoms.len());
        for a in &atoms {
            let mut lits = Vec::with_capacity(a.ctx().len());
            for (i, n) in a.ctx().iter().enumerate() {
                lits.push(if a.bit(i) {
                    Term::gen(n.clone())
                } else {
                    Term::not(Term::gen(n.clone()))
                });
            }
            minterms.push(if lits.len() == 1 {
                lits.pop().unwrap()
            } else {
                Term::Meet(lits)
            });
        }
        Ok(if minterms.len() == 1 {
            minterms.pop().unwrap()
        } else {
            Term::Join(minterms)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(names: &[&str]) -> GeneratorContext {
        GeneratorContext::new(names.iter().copied()).unwrap()
    }

    fn parseable(src: &str) -> Term {
        // Tiny helper building terms without the DSL: only used in tests
        // here; full parsing is exercised in the CLI crate.
        match src {
            "x" => Term::gen("x"),
            "y" => Term::gen("y"),
            _ => panic!("unknown test term"),
        }
    }

    #[test]
    fn evaluation_is_canonical_for_equivalent_terms() {
        let mut st = TermStore::new();
        let c = ctx(&["x", "y"]);
        let x = parseable("x");
        let y = parseable("y");
        // x ∨ (x ∧ y) == x (absorption), via distinct syntax trees.
        let lhs = Term::join(vec![x.clone(), Term::meet(vec![x.clone(), y.clone()])]);
        let a = st.eval(&lhs, &c).unwrap();
        let b = st.eval(&x, &c).unwrap();
        assert_eq!(a, b);
        // De Morgan.
        let lhs = Term::not(Term::meet(vec![x.clone(), y.clone()]));
        let rhs = Term::join(vec![Term::not(x.clone()), Term::not(y.clone())]);
        assert_eq!(st.eval(&lhs, &c).unwrap(), st.eval(&rhs, &c).unwrap());
    }

    #[test]
    fn double_negation_reaches_the_same_handle() {
        let mut st = TermStore::new();
        let c = ctx(&["x"]);
        let x = st.generator(&c, "x").unwrap();
        let nn = {
            let n = st.not(&x).unwrap();
            st.not(&n).unwrap()
        };
        assert_eq!(x, nn);
    }

    #[test]
    fn free_algebra_sizes_match_truth_table_counts() {
        // |K(n)| = 2^(2^n): interning every truth table yields exactly that
        // many distinct handles.
        for n in 0..=3usize {
            let mut st = TermStore::new();
            let c = GeneratorContext::numbered(n);
            let mut handles = std::collections::HashSet::new();
            for bits in 0..(1u32 << (1 << n)) {
                let rows: Vec<bool> =
                    (0..(1 << n)).map(|i| (bits >> i) & 1 == 1).collect();
                let f = st.from_truth_table(&c, &rows).unwrap();
                handles.insert(f);
            }
            assert_eq!(handles.len(), 1usize << (1 << n));
        }
    }

    #[test]
    fn leq_matches_pointwise_order() {
        let mut st = TermStore::new();
        let c = ctx(&["x", "y", "z"]);
        // Exhaustive over a sample of function pairs via truth tables.
        for fa in 0..32u32 {
            for fb in 0..32u32 {
                let rows_a: Vec<bool> = (0..8).map(|i| (fa >> (i % 5)) & 1 == 1).collect();
                let rows_b: Vec<bool> = (0..8).map(|i| (fb >> (i % 5)) & 1 == 1).collect();
                let a = st.from_truth_table(&c, &rows_a).unwrap();
                let b = st.from_truth_table(&c, &rows_b).unwrap();
                let pointwise = rows_a.iter().zip(&rows_b).all(|(&x, &y)| !x || y);
                assert_eq!(st.leq(&a, &b).unwrap(), pointwise);
            }
        }
    }

    #[test]
    fn widening_preserves_semantics() {
        let mut st = TermStore::new();
        let small = ctx(&["x", "z"]);
        let big = ctx(&["x", "y", "z"]);
        let t = Term::join(vec![Term::gen("x"), Term::not(Term::gen("z"))]);
        let f = st.eval(&t, &small).unwrap();
        let w = st.widen(&f, &big).unwrap();
        for asg in Assignment::all(&big) {
            assert_eq!(
                st.evaluate(&w, &asg).unwrap(),
                t.eval_assignment(&asg).unwrap()
            );
        }
    }

    #[test]
    fn binary_ops_align_mergeable_contexts() {
        let mut st = TermStore::new();
        let cx = ctx(&["x"]);
        let cy = ctx(&["y"]);
        let x = st.generator(&cx, "x").unwrap();
        let y = st.generator(&cy, "y").unwrap();
        let m = st.meet(&x, &y).unwrap();
        assert_eq!(m.ctx().names(), ["x", "y"]);
        let swapped = st.eval(&Term::gen("y"), &ctx(&["y", "x"])).unwrap();
        assert!(matches!(
            st.meet(&m, &swapped),
            Err(TermError::ContextMismatch(_, _))
        ));
    }

    #[test]
    fn store_mismatch_is_detected() {
        let mut st1 = TermStore::new();
        let mut st2 = TermStore::new();
        let c = ctx(&["x"]);
        let a = st1.generator(&c, "x").unwrap();
        let b = st2.generator(&c, "x").unwrap();
        assert_eq!(st1.meet(&a, &b).unwrap_err(), TermError::StoreMismatch);
    }

    #[test]
    fn projection_agrees_with_shannon_expansion() {
        let mut st = TermStore::new();
        let c = ctx(&["x", "y"]);
        let t = Term::iff(Term::gen("x"), Term::gen("y"));
        let f = st.eval(&t, &c).unwrap();
        let ex = st.project_exists(&f, &ctx(&["y"])).unwrap();
        assert!(ex.is_true()); // ∃y. x↔y
        let fa = st.project_forall(&f, &ctx(&["y"])).unwrap();
        assert!(fa.is_false()); // ∀y. x↔y
        // ∃-projection example: ∃y. (x∧y) = x
        let f = st.eval(&Term::meet(vec![Term::gen("x"), Term::gen("y")]), &c).unwrap();
        let ex = st.project_exists(&f, &ctx(&["y"])).unwrap();
        let x = st.generator(&c, "x").unwrap();
        assert_eq!(ex, x);
    }

    #[test]
    fn projection_result_is_independent_of_projected_vars() {
        let mut st = TermStore::new();
        let c = ctx(&["x", "y", "z"]);
        let t = Term::join(vec![
            Term::meet(vec![Term::gen("x"), Term::gen("y")]),
            Term::gen("z"),
        ]);
        let f = st.eval(&t, &c).unwrap();
        let p = st.project_exists(&f, &ctx(&["y"])).unwrap();
        assert_eq!(st.support(&p).unwrap(), vec!["x".to_string(), "z".to_string()]);
        let p = st.project_exists(&f, &ctx(&["y", "z"])).unwrap();
        assert!(p.is_true());
        assert!(st.support(&p).unwrap().is_empty());
    }

    #[test]
    fn atoms_enumerate_in_lexicographic_order() {
        let mut st = TermStore::new();
        let c = ctx(&["x", "y"]);
        let f = st.eval(&Term::iff(Term::gen("x"), Term::gen("y")), &c).unwrap();
        let atoms = st.atoms(&f).unwrap();
        let shown: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
        assert_eq!(shown, ["{x:0,y:0}", "{x:1,y:1}"]);
        assert_eq!(st.count_atoms(&f).unwrap(), 2);
    }

    #[test]
    fn minterms_are_atoms() {
        let mut st = TermStore::new();
        let c = ctx(&["x", "y", "z"]);
        for asg in Assignment::all(&c) {
            let m = st.minterm(&asg);
            assert_eq!(st.count_atoms(&m).unwrap(), 1);
            assert!(st.evaluate(&m, &asg).unwrap());
        }
    }

    #[test]
    fn compose_map_is_the_free_extension() {
        let mut st = TermStore::new();
        let src = ctx(&["x", "y"]);
        let tgt = ctx(&["u", "v"]);
        let f = st.eval(&Term::iff(Term::gen("x"), Term::gen("y")), &src).unwrap();
        let u = st.generator(&tgt, "u").unwrap();
        let uv = st
            .eval(&Term::meet(vec![Term::gen("u"), Term::gen("v")]), &tgt)
            .unwrap();
        let images = move |n: &str| match n {
            "x" => Some(u.clone()),
            "y" => Some(uv.clone()),
            _ => None,
        };
        let composed = st.compose_map(&f, &tgt, &images).unwrap();
        // x↔y with x:=u, y:=u∧v is u → v … check pointwise.
        for asg in Assignment::all(&tgt) {
            let (bu, bv) = (asg.bit(0), asg.bit(1));
            let expect = bu == (bu && bv);
            assert_eq!(st.evaluate(&composed, &asg).unwrap(), expect);
        }
    }

    #[test]
    fn transport_renames_generators() {
        let mut st = TermStore::new();
        let src = ctx(&["x", "y"]);
        let tgt = ctx(&["y", "x'"]);
        let f = st
            .eval(&Term::meet(vec![Term::gen("x"), Term::not(Term::gen("y"))]), &src)
            .unwrap();
        let mut ren = HashMap::new();
        ren.insert("x".to_string(), "x'".to_string());
        let g = st.transport(&f, &tgt, &ren).unwrap();
        for asg in Assignment::all(&tgt) {
            let expect = asg.get("x'").unwrap() && !asg.get("y").unwrap();
            assert_eq!(st.evaluate(&g, &asg).unwrap(), expect);
        }
    }

    #[test]
    fn restrict_context_requires_independence() {
        let mut st = TermStore::new();
        let c = ctx(&["x", "y"]);
        let f = st.eval(&Term::gen("x"), &c).unwrap();
        let r = st.restrict_context(&f, &ctx(&["x"])).unwrap();
        assert_eq!(r.ctx().names(), ["x"]);
        let err = st.restrict_context(&f, &ctx(&["y"])).unwrap_err();
        assert!(matches!(err, TermError::ContextMismatch(_, _)));
    }

    #[test]
    fn truth_tables_round_trip() {
        let mut st = TermStore::new();
        let c = ctx(&["x", "y"]);
        for bits in 0..16u32 {
            let rows: Vec<bool> = (0..4).map(|i| (bits >> (3 - i)) & 1 == 1).collect();
            let f = st.from_truth_table(&c, &rows).unwrap();
            for (i, asg) in Assignment::all(&c).into_iter().enumerate() {
                assert_eq!(st.evaluate(&f, &asg).unwrap(), rows[i]);
            }
        }
    }

    #[test]
    fn arity_cap_is_enforced() {
        let mut st = TermStore::with_arity_cap(3);
        let c = ctx(&["x"]);
        let wide = Term::Meet(vec![Term::Top, Term::Top, Term::Top, Term::Top]);
        assert_eq!(
            st.eval(&wide, &c).unwrap_err(),
            TermError::ArityCapExceeded { arity: 4, cap: 3 }
        );
        let ok = Term::Meet(vec![Term::Top, Term::Top, Term::Top]);
        assert!(st.eval(&ok, &c).is_ok());
    }

    #[test]
    fn canonical_term_rendering() {
        let mut st = TermStore::new();
        let c = ctx(&["0"]);
        let zero = st.generator(&c, "0").unwrap();
        assert_eq!(st.to_canonical_term(&zero).unwrap().to_string(), "(gen 0)");
        let nz = st.not(&zero).unwrap();
        assert_eq!(st.to_canonical_term(&nz).unwrap().to_string(), "(not (gen 0))");
        assert_eq!(st.to_canonical_term(&st.top(&c)).unwrap(), Term::Top);
        assert_eq!(st.to_canonical_term(&st.bot(&c)).unwrap(), Term::Bot);
        let c2 = ctx(&["x", "y"]);
        let f = st.eval(&Term::iff(Term::gen("x"), Term::gen("y")), &c2).unwrap();
        assert_eq!(
            st.to_canonical_term(&f).unwrap().to_string(),
            "(or (and (not (gen x)) (not (gen y))) (and (gen x) (gen y)))"
        );
    }
}
