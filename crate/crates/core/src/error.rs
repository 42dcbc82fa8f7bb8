use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A tabulated quantity was requested outside the table.
    #[error("{name} = {value} outside table range [{min}, {max}]")]
    Range {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Malformed input data (tables, CSV files, parameter sets).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A numerical procedure failed to converge or produced a non-finite value.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The attenuation formula hits log(0) where the scintillation index equals one.
    #[error("singular attenuation: scintillation index is exactly 1 at Rytov variance {sigma_r2}")]
    SingularAttenuation { sigma_r2: f64 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::SingularAttenuation { .. }
        )
    }
}
