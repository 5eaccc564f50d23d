//! A workbench for labelled transition systems built on lazy relations.
//!
//! The layering, bottom up:
//!
//! * [`rel`] — image-based relations and the syntax-independent operators
//!   (union, sequencing, synchronised parallel composition, filtering,
//!   relabelling through an isomorphism);
//! * [`lts`] — transition systems as a relation plus label classification
//!   and synchronisation hooks, processes as a system with a chosen state,
//!   the asynchronous FIFO-buffer transformation, and weak moves/barbs;
//! * [`explore`] / [`dot`] — bounded breadth-first diagrams and their DOT
//!   rendering;
//! * [`ccs`] — a CCS front-end (parser, canonical printing, semantics)
//!   whose transition relation is assembled from the generic operators;
//! * [`behrel`] — coinductive compliance relations (build/check with
//!   counterexamples), concrete predicates, and (bi)simulation.
//!
//! Everything is evaluated lazily: composing or transforming a system
//! costs nothing until a state's transitions are requested, so
//! infinite-state systems are first-class citizens.

pub mod behrel;
pub mod ccs;
pub mod dot;
pub mod explore;
pub mod lts;
pub mod rel;

pub use lts::{AsyncState, Depth, LabelKind, Lts, LtsError, Proc, DEFAULT_BUDGET};
pub use rel::{Cardinality, Rel, TransRel, Value};
