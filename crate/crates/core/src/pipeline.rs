//! The whole run: model search, mocks, concrete objects, comparisons and
//! diagnosis.

use thiserror::Error;

use crate::fixtures::FixtureError;
use crate::harness::{self, FailureLog, ImplementationAdapter, Mode};
use crate::localizer::{diagnose_with, CountPolicy, Diagnosis};
use crate::mapping::{MappingError, MethodTable};
use crate::mock::{self, MockError};
use crate::model::{self, ModelError, Scope, SearchOptions, Structure, TermDerivation};
use crate::spec::{SpecError, ValidatedModule};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse: {0}")]
    Parse(SpecError),
    #[error("validate: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Validate(Vec<SpecError>),
    #[error("mapping: {0}")]
    Mapping(#[from] MappingError),
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("mock: {0}")]
    Mock(#[from] MockError),
    #[error("implementation: {0}")]
    Fixture(#[from] FixtureError),
}

impl PipelineError {
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Parse(_) => "parse",
            PipelineError::Validate(_) => "validate",
            PipelineError::Mapping(_) => "mapping",
            PipelineError::Model(_) => "model",
            PipelineError::Mock(_) => "mock",
            PipelineError::Fixture(_) => "implementation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub scope: Scope,
    pub mode: Mode,
    pub search: SearchOptions,
    pub policy: CountPolicy,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub structure: Structure,
    pub terms: TermDerivation,
    pub log: FailureLog,
    pub diagnosis: Diagnosis,
}

pub fn run(
    m: &ValidatedModule,
    methods: &MethodTable,
    adapter: &mut dyn ImplementationAdapter,
    opts: &RunOptions,
) -> Result<RunOutcome, PipelineError> {
    let structure = model::find_structure(m, &opts.scope, &opts.search)?;
    let terms = model::derive_construction_terms(m, &structure);
    let world = mock::build_abstract_objects(m, &structure, methods);
    let mat = harness::materialize_concretes(m, methods, &world, &terms, adapter, opts.mode);
    let world = mock::fill_expected_concrete(m, &world, &mat.handles())?;
    let log = harness::run_comparisons(m, methods, &world, &mat, adapter, opts.mode);
    let diagnosis = diagnose_with(&log, m, opts.policy);
    Ok(RunOutcome {
        structure,
        terms,
        log,
        diagnosis,
    })
}

/// 0 no evidence, 1 guilty, 2 evidence but no verdict.
pub fn exit_code(log: &FailureLog, d: &Diagnosis) -> i32 {
    match (d.verdict.guilty(), log.is_clean()) {
        (Some(_), _) => 1,
        (None, true) => 0,
        (None, false) => 2,
    }
}

pub const EXIT_NO_MODEL: i32 = 3;
pub const EXIT_USAGE: i32 = 4;
