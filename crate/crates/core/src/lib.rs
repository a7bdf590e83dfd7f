//! Core library for unit- and integration-testing multi-subroutine quantum
//! programs on a dense state-vector simulator.
//!
//! The crate is `no_std` + `alloc`: everything here is pure computation over
//! seeded randomness. File formats, the CLI, and the experiment scheduler
//! live in the companion `qtest-cli` crate.
//!
//! Module map:
//!
//! * [`simcore`] — dense state vectors, gates, controlled application,
//!   measurement with collapse, exact Born distributions.
//! * [`qir`] — the quantum-program IR (subroutines, classical control flow,
//!   within-apply), its interpreter, variant generation (inverse /
//!   controlled / power), and the canonical `qir/1` text form.
//! * [`stateprep`] — input-state generators (classical, complementary and
//!   two-value superpositions, Pauli products, sampled mixed states) and the
//!   SCAQ coverage check.
//! * [`checkers`] — transform-based, statistical, identity, equivalence,
//!   variant-relation, and unitarity checking.
//! * [`testkit`] — IO marks, IO-type classification, partition combination
//!   (ACoC / ECC), executable test cases, and the suite runner.
//! * [`mutator`] — single-edit GM/SM/CM/MM mutant generation and the
//!   single-shot trigger protocol.
//! * [`benchsuite`] — the benchmark subroutine corpus with specification
//!   oracles and default test suites.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod benchsuite;
pub mod checkers;
pub mod mutator;
pub mod qir;
pub mod rng;
mod sexpr;
pub mod simcore;
pub mod stateprep;
pub mod testkit;
