//! Embeddings of rational-time systems into Arveson systems: the continuity
//! probe, the embeddability verdict and explicit Fock-space representations.
//! Every Fock-space inner product is evaluated in closed form.

pub mod fock;
pub mod probe;
pub mod represent;
pub mod segment;
pub mod verdict;

pub use fock::{ExpVectorCombo, FockElement, FockVector01, ProductElement};
pub use probe::{extended_probe_type1, liebscher_probe, probe_closed_form_type3, Modulus, ProbePoint, ProbeTable, UnitSymbol, UnitWord};
pub use represent::{build_representation, fock_amplitude, verify_representation, Representation};
pub use segment::{ExpSegment, ExpTerm, Piece, Point};
pub use verdict::{decide_embeddable, Construction, Obstruction, Verdict};
