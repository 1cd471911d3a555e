//! Exact arithmetic for half-integral weight scalar modular forms with
//! epsilon-conditions, vector-valued modular forms for Weil representations
//! of transitive discriminant forms, the isomorphism between the two, and
//! Borcherds product lifts with Weyl vectors and divisor data.

pub mod arith;
pub mod borcherds;
pub mod discriminant;
pub mod error;
pub mod linalg;
pub mod module;
pub mod pool;
pub mod series;
pub mod spaces;
pub mod vvmf;
pub mod weil;

pub use discriminant::{lattice_form, DiscriminantForm, EpsilonData, JordanComponent};
pub use error::{Error, Result};
pub use series::FracQSeries;
pub use spaces::{
    build_weak_basis, duality_check, eisenstein_g, eisenstein_g_epsilon, existence, hurwitz,
    seed_forms, EpsilonSpaceSpec, ReducedBasis, SpaceKind,
};
