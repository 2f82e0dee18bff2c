//! Petri nets with input/output boundaries.
//!
//! The crate is organized bottom-up:
//!
//! * [`multiset`] - finite multisets over a fixed carrier set, the commutative
//!   monoid that markings and transition arities live in.
//! * [`petri`] - Petri nets, net morphisms, and their colimits (disjoint
//!   unions and gluing along shared places).
//! * [`open`] - nets with input/output boundaries, composition by gluing,
//!   tensoring, morphisms between open nets, and the canonical coherence
//!   isomorphisms that composition satisfies only up to.
//! * [`cmc`] - the token-flow semantics: firing processes, their sequential
//!   and parallel composition, and equivalence up to reordering of
//!   independent firings.
//! * [`reach`] - reachability queries under explicit exploration caps, the
//!   input/output reachability relation of an open net, and the checks
//!   relating relation-level composition to net-level composition.
//! * [`io`] - a line-oriented text format for documents of named open nets
//!   and markings, plus Graphviz export.
//! * [`gen`] - seeded random generators used by the law suites.
//! * [`laws`] - executable law suites over generated instances, reported
//!   instead of silently trusted.
//!
//! All values are immutable; every operation returns fresh values. Maps are
//! stored in ordered containers so that equal inputs always produce
//! byte-identical output.

pub mod cmc;
pub mod gen;
pub mod io;
pub mod laws;
pub mod multiset;
pub mod open;
pub mod petri;
pub mod reach;

pub use multiset::{Carrier, Multiset};
pub use open::{OpenNetMorphism, OpenPetriNet};
pub use petri::{PetriMorphism, PetriNet};
pub use reach::{BoundedRelation, ExplorationCaps};
