//! The extended equivariant Cartan complex and its cohomology.

pub mod cohomology;
pub mod complex;
pub mod element;

pub use cohomology::{
    annihilator, cohomology, equivariant_b_transform, module_action, stable_cohomology, torsion_analysis,
    twisted_cohomology, ClassInfo, CohomologyResult, ModuleAction, TorsionEntry, TorsionOutcome, TwistedCohomology,
};
pub use complex::{cartan_differential, CartanComplex};
pub use element::EquivariantElement;
