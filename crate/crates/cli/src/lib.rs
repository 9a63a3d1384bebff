//! Driver for the `ymblow` command: run configurations, run directories and
//! the acceptance checks behind `ymblow verify`.

pub mod commands;
pub mod config;
pub mod criteria;
pub mod run;

use ymblow::Error as CoreError;

/// How a command failed; decides the exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Bad arguments or configuration (exit code 2).
    #[error("{message}")]
    Usage { reason: &'static str, message: String },
    /// A numerical run or a check did not succeed (exit code 1).
    #[error("{message}")]
    Scientific { reason: &'static str, message: String },
}

impl Failure {
    pub fn usage(reason: &'static str, message: impl Into<String>) -> Self {
        Self::Usage { reason, message: message.into() }
    }

    pub fn scientific(reason: &'static str, message: impl Into<String>) -> Self {
        Self::Scientific { reason, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage { .. } => 2,
            Self::Scientific { .. } => 1,
        }
    }

    pub fn reason(&self) -> &'static str {
        match self {
            Self::Usage { reason, .. } | Self::Scientific { reason, .. } => reason,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let reason = core_reason(&e);
        match e {
            CoreError::Dimension(_)
            | CoreError::Config(_)
            | CoreError::NormSpec(_)
            | CoreError::Hypothesis(_)
            | CoreError::Grid(_)
            | CoreError::Cfl { .. } => Self::usage(reason, e.to_string()),
            _ => Self::scientific(reason, e.to_string()),
        }
    }
}

fn core_reason(e: &CoreError) -> &'static str {
    match e {
        CoreError::Dimension(_) => "dimension",
        CoreError::PastBlowup { .. } => "past_blowup",
        CoreError::Grid(_) => "grid",
        CoreError::GridMismatch => "grid_mismatch",
        CoreError::DerivativeOrder(_) => "derivative_order",
        CoreError::QuadratureTail { .. } => "quadrature_tail",
        CoreError::NormSpec(_) => "norm_spec",
        CoreError::Cfl { .. } => "cfl",
        CoreError::OutOfRange { .. } => "out_of_range",
        CoreError::DegenerateFit(_) => "degenerate_fit",
        CoreError::NoSignChange { .. } => "no_sign_change",
        CoreError::ProbeIndeterminate(_) => "probe_indeterminate",
        CoreError::ResonantIndex { .. } => "resonant_index",
        CoreError::Integrator(_) => "integrator",
        CoreError::PhaseTracking(_) => "phase_tracking",
        CoreError::Hypothesis(_) => "hypothesis",
        CoreError::Config(_) => "config",
    }
}

/// Maps any error to its exit code and reason tag.
pub fn classify(e: &anyhow::Error) -> (i32, &'static str) {
    if let Some(f) = e.downcast_ref::<Failure>() {
        return (f.exit_code(), f.reason());
    }
    if let Some(c) = e.downcast_ref::<CoreError>() {
        let f = Failure::from(c.clone());
        return (f.exit_code(), f.reason());
    }
    if e.downcast_ref::<serde_json::Error>().is_some() {
        return (2, "config");
    }
    (1, "io")
}
