//! Library side of the `finsch` command: ring descriptions, verification
//! suites and report formatting.

pub mod commands;
pub mod ring_spec;
pub mod suite;

pub use ring_spec::{parse_ring_spec, RingSpec, SpecError};
pub use suite::{run_suite, Suite, SuiteReport, VerificationReport};
