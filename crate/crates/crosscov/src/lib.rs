//! Cross-coverage testing of functionally equivalent programs.
//!
//! Given a group of programs that implement the same function, tests
//! generated to cover one member can be executed against another — cross
//! tests. This crate bundles everything needed to study that end to end on
//! a deterministic mini-language corpus:
//!
//! - [`minilang`]: grammar, AST, parser and static checker,
//! - [`interp`]: coverage-instrumented fuel-bounded interpreter,
//! - [`trace`]: independent reference tracer (oracle for the interpreter),
//! - [`coverage`]: coverage algebra (merge, metrics, improvement, gain),
//! - [`testkit`]: test suites, verdicts and the equivalence probe,
//! - [`generate`]: the common random suite T0 and the per-program
//!   coverage-guided suites Ti,
//! - [`augment`]: cumulative cross-coverage suite augmentation and the
//!   size-matched random baseline,
//! - [`mutate`]: missing-functionality fault injection and validity checks,
//! - [`corpus`]: group manifests and corpus loading,
//! - [`experiment`]: the two study pipelines and their JSON/CSV reports.
//!
//! All randomness flows from one master seed through documented generators
//! ([`prng`]), so identical configurations produce byte-identical reports.

pub mod augment;
pub mod corpus;
pub mod coverage;
pub mod experiment;
pub mod generate;
pub mod interp;
pub mod minilang;
pub mod mutate;
pub mod prng;
pub mod testkit;
pub mod trace;
