//! Case definitions, configuration files, run orchestration and reports.

mod case;
mod config;
mod reference;
mod run;

pub use case::{
    face_name, lobed_permeability, preset, Anchor, CaseBundle, CaseKind, CaseSpec, FaceCondition,
    FaceSet, FACES, PRESETS,
};
pub use config::{parse_case_config, parse_case_text};
pub use reference::{
    evaluation_grid, fdm_case, predicted_fields, reference_fields, reference_kind, FdmRun, NamedField,
    ReferenceKind, REFERENCE_REFINEMENT,
};
pub use run::{
    benchmark, compare_activations, evaluate_model, export_field, export_report, field_stem,
    inference_points, report_text, run_case, write_artifacts, ActivationComparison, BenchmarkReport,
    FieldArtifact, RunArtifacts, TimingRow,
};
