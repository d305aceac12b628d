//! Finitely presented Boolean algebras with canonical decision-diagram
//! elements.
//!
//! The crate is organized around a single canonical-function engine
//! ([`store::TermStore`]) that renders Boolean terms over finite generator
//! contexts as hash-consed reduced ordered decision diagrams.  On top of it:
//!
//! - [`algebra`] — algebras presented by one relator, elements as canonical
//!   functions below the relator, homomorphisms by generator images.
//! - [`colimits`] — finite products, partition decompositions, pushouts,
//!   disjointness and pullback-stability certificates.
//! - [`interpolation`] — interpolants across pushout squares, determinacy
//!   checking, and retraction synthesis from determinacy witnesses.
//! - [`logic`] — a small relational logic with explicit contexts, finite
//!   models, the one-predicate theory of a distinguished singleton,
//!   quantifier elimination, and a provability decision procedure.
//! - [`syncat`] — the syntactic category of that theory: objects are
//!   contexts with a constraint, morphisms are functional total graphs;
//!   plus finite Stone duality.
//!
//! All certificate-producing operations attach [`check::Check`] records so
//! their verdicts can be recomputed pointwise by callers.

pub mod algebra;
pub mod check;
pub mod colimits;
pub mod interpolation;
pub mod logic;
pub mod store;
pub mod syncat;
pub mod term;

pub use check::{all_ok, Check, CheckKind};
pub use store::{CanonicalFn, TermStore, DEFAULT_ARITY_CAP};
pub use term::{Assignment, GeneratorContext, Term, TermError};
