use crate::error::{Error, Result};
use crate::model::Scenario;

/// Environment variable overriding [`Limits::enumeration_cap`].
pub const CAP_ENV: &str = "BELLFORGE_CAP";

/// Size guards for the exhaustive engines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest total number of settings `sum m_p` for vertex enumeration.
    pub enumeration_cap: usize,
    /// Largest correlation-space dimension for facet enumeration.
    pub facet_dimension_cap: usize,
    /// Largest reduced vertex count for facet enumeration.
    pub facet_vertex_cap: usize,
    /// Largest `sum m_p` for canonical-form backtracking.
    pub canonical_cap: usize,
    /// Largest number of qubits for dense Bell operators.
    pub dense_party_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_cap: 26,
            facet_dimension_cap: 8,
            facet_vertex_cap: 64,
            canonical_cap: 20,
            dense_party_cap: 12,
        }
    }
}

impl Limits {
    /// Defaults, with the enumeration cap taken from `BELLFORGE_CAP` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(v) = std::env::var(CAP_ENV) {
            limits.enumeration_cap = v.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{} must be an integer, got `{}`", CAP_ENV, v))
            })?;
            // Vertices are packed into 64-bit words.
            limits.enumeration_cap = limits.enumeration_cap.min(63);
        }
        Ok(limits)
    }

    pub(crate) fn check_enumeration(&self, scenario: &Scenario, what: &str) -> Result<()> {
        let required = scenario.total_settings();
        if required > self.enumeration_cap || required > 63 {
            return Err(Error::Refused {
                what: format!("{} over scenario {}", what, scenario),
                required,
                cap: self.enumeration_cap,
            });
        }
        Ok(())
    }
}
