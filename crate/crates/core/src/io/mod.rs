//! Integral files, run configuration and the stage driver.

mod config;
mod integrals;
mod pipeline;
mod report;

pub use config::{
    AuxiliaryConfig, EvolutionConfig, InputConfig, OutputConfig, PartitionConfig, RunConfig,
};
pub use integrals::{
    load_integrals, parse_fcidump, parse_tensor_text, write_tensor_text, FcidumpHeader,
    IntegralFormat, Integrals, SpatialIntegrals,
};
pub use pipeline::{
    run_pipeline, AuxiliaryReport, LocalityBundle, Pipeline, Provenance, ResultBundle, RunOptions,
    SectorPhases, SpectraTable, SpectrumRow, Stage, StageFailure, TrotterPoint, VerifyReport,
    DENSE_STAGE_CAP,
};
pub use report::{emit_report, ReportFormat};
