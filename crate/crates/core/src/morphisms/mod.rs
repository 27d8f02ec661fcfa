//! Extended morphisms, exact sequences, and Thom/localization checks.

pub mod morphism;
pub mod sequence;
pub mod thom;

pub use morphism::{
    change_splitting, compose, equivariance_check, splitting_change_equivalence, EquivarianceReport, ExtendedMorphism,
};
pub use sequence::{
    cech_circle_sequence, cone, cone_sequence, long_exact_sequence, pair_complex, ChainComplex, Homology,
    LongExactReport, PairReport, ShortExactSequence,
};
pub use thom::{localization_check, thom_check, LocalizationReport, ThomData, ThomReport};
