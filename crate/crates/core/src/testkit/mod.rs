//! The unit-test model: IO marks and IO-type classification,
//! equivalence-class partitions, combination coverage, executable test
//! cases, the case runner, and suite files.

mod combine;
mod iomark;
mod runner;
mod suitefile;

pub use combine::{combine, CombineCriterion, CombineError, Partition};
pub use iomark::{
    classify_io_type, format_io_mark, parse_io_mark, Endian, IoMark, IoType, MarkError,
    MarkedVar,
};
pub use runner::{
    render_csv, render_json, run_case, suite_report, Binder, CaseBinding,
    ClassicalExpectation, QuantumCheck, SuiteSummary, TestCase,
};
pub use suitefile::{format_suite, parse_suite, SuiteDoc, SuiteError};
