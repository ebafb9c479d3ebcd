//! Sign systems, semiotic morphisms and life-cycle semiosis.
pub mod dsl;
pub mod morphism;
pub mod semiosis;
pub mod sign_algebra;
pub mod sim;
