//! Higher-order intuitionistic S4 modal logic interpreted in finite
//! presheaf toposes.

pub mod bundled;
pub mod corpus;
pub mod fincat;
pub mod forcing;
pub mod formats;
pub mod frame;
pub mod omega;
pub mod presheaf;
pub mod semantics;
pub mod suites;
pub mod syntax;

pub use fincat::{discrete_of, ArrowId, CategoryError, CategorySpec, FiniteCategory, Limits, ObjId};
pub use presheaf::{
    compose_nat, count_nats, enumerate_nats, eval_map, exponential, identity_nat, nat_equal, pair, product,
    terminal, transpose, untranspose, yoneda, Element, Exponential, NatTransform, Presheaf, PresheafError, Product,
};
pub use omega::{classify, delta, omega, omega_heyting, omega_star, subobject_of, ArrowSets, Mask, OmegaError, Subpresheaf};
pub use frame::{
    box_of, canonical_i, diag_delta, exists_i, forall_i, tau_of, validate_frame, FrameError, FrameKind, FrameMaps,
    FrameTables, InternalFrame,
};
pub use syntax::{
    parse_context, parse_sequent, parse_term, parse_theory, parse_type, substitute, Context, ParseError, Sequent, Term,
    Theory, Type, TypeError,
};
pub use semantics::{ConstantDef, Model, SemanticsError, Table, TheoryReport, Verdict, Witness};
pub use forcing::{forces_clauses, forces_direct, forces_traced, ForcingError, KripkeFrame, Trace};
pub use suites::{CheckItem, CheckReport, SuiteError};
