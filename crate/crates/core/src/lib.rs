//! Decision procedures for the forall-exists fragments of the simple theory
//! of types whose existential types are all equal or strictly decreasing,
//! and for their stratified counterparts in New Foundations.
//!
//! The pipeline is: [`formula`] parsing and prenexing, [`stratification`]
//! inference and fragment classification, evaluation in finitely generated
//! power-set models ([`model`]), the colour abstraction of those models
//! ([`colouring`]), and the abstract decision engine ([`engine`]).
//! [`cli`] ties them together and emits certificates.

pub mod cli;
pub mod colouring;
pub mod engine;
pub mod formula;
pub mod model;
pub mod stratification;
