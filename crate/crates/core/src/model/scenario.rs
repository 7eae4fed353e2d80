use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of settings a single party may have. Vertices keep one
/// outcome bit per setting in a `u64`.
pub const MAX_SETTINGS_PER_PARTY: usize = 64;

/// Measurement scenario: the number of dichotomic settings of each party.
///
/// Identifies the full-correlation polytope, e.g. `[2, 2, 2]` for three
/// parties with two settings each.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Scenario {
    settings: Vec<usize>,
}

impl Scenario {
    pub fn new(settings: Vec<usize>) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::InvalidScenario("at least one party is required".into()));
        }
        if let Some(p) = settings.iter().position(|&m| m == 0) {
            return Err(Error::InvalidScenario(format!(
                "party {} has no settings",
                p + 1
            )));
        }
        if let Some(p) = settings.iter().position(|&m| m > MAX_SETTINGS_PER_PARTY) {
            return Err(Error::InvalidScenario(format!(
                "party {} has {} settings, at most {} are supported",
                p + 1,
                settings[p],
                MAX_SETTINGS_PER_PARTY
            )));
        }
        Ok(Scenario { settings })
    }

    /// `n` parties with `m` settings each.
    pub fn uniform(parties: usize, settings: usize) -> Result<Self> {
        Scenario::new(vec![settings; parties])
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    pub fn settings(&self, party: usize) -> usize {
        self.settings[party]
    }

    pub fn settings_per_party(&self) -> &[usize] {
        &self.settings
    }

    /// Sum of the settings of all parties (number of outcome bits of a vertex).
    pub fn total_settings(&self) -> usize {
        self.settings.iter().sum()
    }

    /// Number of coordinates of the correlation space, `prod m_p`.
    pub fn dimension(&self) -> usize {
        self.settings.iter().product()
    }

    /// Number of deterministic strategies, `2^(sum m_p - 1)` when one of each
    /// inversion pair is kept, `2^(sum m_p)` otherwise. `None` on overflow.
    pub fn vertex_count(&self, reduced: bool) -> Option<u128> {
        let bits = self.total_settings() - usize::from(reduced);
        1u128.checked_shl(bits as u32).filter(|_| bits < 128)
    }

    /// Bit offset of each party's first setting in a packed vertex.
    pub fn offsets(&self) -> Vec<usize> {
        self.settings
            .iter()
            .scan(0, |acc, &m| {
                let o = *acc;
                *acc += m;
                Some(o)
            })
            .collect()
    }

    pub fn is_valid_tuple(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.parties() && tuple.iter().zip(&self.settings).all(|(&i, &m)| i < m)
    }

    /// Mixed-radix index of a (0-based) setting tuple; the first party is the
    /// most significant digit.
    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.settings)
            .fold(0, |acc, (&i, &m)| acc * m + i)
    }

    pub fn tuple_at(&self, mut index: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.parties()];
        for (slot, &m) in tuple.iter_mut().zip(&self.settings).rev() {
            *slot = index % m;
            index /= m;
        }
        tuple
    }

    /// All setting tuples in mixed-radix order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.dimension()).map(move |i| self.tuple_at(i))
    }

    /// Scenario with one party removed, `None` if it is the only one.
    pub fn without_party(&self, party: usize) -> Option<Scenario> {
        if self.parties() < 2 || party >= self.parties() {
            return None;
        }
        let mut settings = self.settings.clone();
        settings.remove(party);
        Some(Scenario { settings })
    }

    /// Scenario with a party of `settings` settings inserted at `position`.
    pub fn with_party(&self, position: usize, settings: usize) -> Result<Scenario> {
        let mut s = self.settings.clone();
        if position > s.len() {
            return Err(Error::InvalidArgument(format!(
                "party position {} out of range",
                position + 1
            )));
        }
        s.insert(position, settings);
        Scenario::new(s)
    }

    pub(crate) fn check_same(&self, other: &Scenario) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ScenarioMismatch {
                expected: self.settings.clone(),
                found: other.settings.clone(),
            })
        }
    }
}

impl TryFrom<Vec<usize>> for Scenario {
    type Error = Error;

    fn try_from(settings: Vec<usize>) -> Result<Self> {
        Scenario::new(settings)
    }
}

impl From<Scenario> for Vec<usize> {
    fn from(s: Scenario) -> Self {
        s.settings
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.settings.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let settings = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidScenario(format!("`{}` is not a setting count", p)))
            })
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(settings)
    }
}
