//! Dirichlet characters: the dual group mod N, Gauss sums and character
//! families.

mod family;
mod gauss;
mod group;
mod quadratic;
mod spectrum;

pub use family::{
    closed_form_primitive_sum, count_primitive, enumerate_family, normalized_character_sum,
    FamilySelector, Parity,
};
pub use gauss::{
    gauss_sum, imprimitive_gauss_sum, twisted_quadratic_gauss_sum, GaussKernel, TwistedGaussSum,
};
pub use group::{
    primitive_root_mod_prime, CharacterGroup, CharacterIndex, Component, ComponentKind,
    BRUTE_FORCE_BOUND,
};
pub use quadratic::{fundamental_discriminants, is_fundamental_discriminant, ResidueTable};
pub use spectrum::GroupSpectrum;
