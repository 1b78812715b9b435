//! A workbench for spiking neural P systems.
//!
//! * [`unary`] – unary regular expressions and their eventually periodic
//!   denotations (rule guards).
//! * [`engine`] – discrete-time simulator with standard, extended and
//!   exhaustive rule application, delays and closed neurons.
//! * [`dsl`] – text format for systems, counter machines and Turing machines.
//! * [`cm`] – counter machine interpreter.
//! * [`snp2cm`] – compiles standard systems into counter machines that track
//!   rule applicability with chain-plus-cycle automata.
//! * [`turing`] – single-tape Turing machines and their base-`z` encoding.
//! * [`universal`] – the 10-neuron universal system and its 6-neuron input
//!   encoder, with an oracle-driven verifier.
//!
//! The `examples/` directory of this crate has one runnable program per
//! capability; `snpw` is a thin command-line front end.

pub mod cm;
pub mod dsl;
pub mod engine;
pub mod snp2cm;
pub mod turing;
pub mod unary;
pub mod universal;

pub use num_bigint::BigUint;
