use std::path::PathBuf;

use thiserror::Error;

use super::{ConfigError, CovariateError, ManifestError};
use crate::imaging::{CodecError, RegisterError};
use crate::som::{GridFormatError, SomError};
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Covariates(#[from] CovariateError),
    #[error("image {index}: {source}")]
    Load {
        index: usize,
        #[source]
        source: CodecError,
    },
    #[error(transparent)]
    Register(RegisterError),
    #[error(transparent)]
    Som(#[from] SomError),
    #[error(transparent)]
    Grid(#[from] GridFormatError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Manifest(_) => "manifest",
            PipelineError::Config(_) => "config",
            PipelineError::Covariates(_) => "covariates",
            PipelineError::Load { .. } => "load",
            PipelineError::Register(_) => "register",
            PipelineError::Som(_) | PipelineError::Grid(_) => "som",
            PipelineError::Stats(_) => "stats",
            PipelineError::Io { .. } => "output",
        }
    }

    /// Index of the failing image, when the failure concerns one.
    pub fn image_index(&self) -> Option<usize> {
        match self {
            PipelineError::Load { index, .. } => Some(*index),
            PipelineError::Register(RegisterError::Frame { index, .. })
            | PipelineError::Register(RegisterError::DimensionMismatch { index, .. }) => Some(*index),
            _ => None,
        }
    }

    /// 2 for numerical non-convergence, 1 for everything caused by inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Register(e) if e.is_non_convergence() => 2,
            _ => 1,
        }
    }

    /// One-line `key=value` diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        let index = self.image_index().map_or_else(|| "-".to_owned(), |i| i.to_string());
        let message = self.to_string().replace(['\n', '\r'], " ").replace('"', "'");
        format!(
            "error stage={} index={} exit={} message=\"{}\"",
            self.stage(),
            index,
            self.exit_code(),
            message
        )
    }
}

impl From<RegisterError> for PipelineError {
    fn from(e: RegisterError) -> Self {
        PipelineError::Register(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::RegistrationTransform;

    #[test]
    fn non_convergence_maps_to_exit_two() {
        let e = PipelineError::from(RegisterError::Frame {
            index: 3,
            source: Box::new(RegisterError::NonConvergence {
                best: RegistrationTransform::translation(0.5, 0.25),
                residual: 1.5,
                iterations: 50,
            }),
        });
        assert_eq!(e.exit_code(), 2);
        assert_eq!(e.image_index(), Some(3));
        let line = e.diagnostic();
        assert!(
            line.starts_with("error stage=register index=3 exit=2 message=\""),
            "{line}"
        );
        assert!(!line.contains('\n'));
    }

    #[test]
    fn input_errors_exit_one() {
        let e = PipelineError::Stats(StatsError::LengthMismatch(3, 4));
        assert_eq!(e.exit_code(), 1);
        assert_eq!(
            e.diagnostic(),
            "error stage=stats index=- exit=1 message=\"series lengths differ: 3 vs 4\""
        );
    }
}
