use super::scenario::Scenario;
use crate::error::{Error, Result};

/// A deterministic local strategy: one ±1 outcome for every setting of every
/// party. Stored as one bitmask per party, a set bit meaning outcome −1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    masks: Vec<u64>,
    settings: Vec<usize>,
}

impl Vertex {
    pub fn from_outcomes(outcomes: &[Vec<i8>]) -> Result<Self> {
        let mut masks = Vec::with_capacity(outcomes.len());
        let mut settings = Vec::with_capacity(outcomes.len());
        for (p, row) in outcomes.iter().enumerate() {
            if row.is_empty() || row.len() > super::scenario::MAX_SETTINGS_PER_PARTY {
                return Err(Error::InvalidArgument(format!(
                    "party {} has {} outcomes",
                    p + 1,
                    row.len()
                )));
            }
            let mut mask = 0u64;
            for (i, &o) in row.iter().enumerate() {
                match o {
                    1 => {}
                    -1 => mask |= 1 << i,
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "outcome {} of party {} is {}, expected ±1",
                            i + 1,
                            p + 1,
                            o
                        )))
                    }
                }
            }
            masks.push(mask);
            settings.push(row.len());
        }
        if masks.is_empty() {
            return Err(Error::InvalidArgument("vertex without parties".into()));
        }
        Ok(Vertex { masks, settings })
    }

    /// Unpacks a vertex from its packed bit representation (see
    /// [`Scenario::offsets`]).
    pub fn from_bits(scenario: &Scenario, bits: u64) -> Self {
        let masks = scenario
            .offsets()
            .iter()
            .zip(scenario.settings_per_party())
            .map(|(&o, &m)| (bits >> o) & low_mask(m))
            .collect();
        Vertex {
            masks,
            settings: scenario.settings_per_party().to_vec(),
        }
    }

    pub fn to_bits(&self) -> u64 {
        let mut bits = 0;
        let mut offset = 0;
        for (&mask, &m) in self.masks.iter().zip(&self.settings) {
            bits |= mask << offset;
            offset += m;
        }
        bits
    }

    pub fn parties(&self) -> usize {
        self.masks.len()
    }

    pub fn belongs_to(&self, scenario: &Scenario) -> bool {
        self.settings == scenario.settings_per_party()
    }

    pub fn outcome(&self, party: usize, setting: usize) -> i8 {
        if self.masks[party] >> setting & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn outcomes(&self) -> Vec<Vec<i8>> {
        (0..self.parties())
            .map(|p| (0..self.settings[p]).map(|i| self.outcome(p, i)).collect())
            .collect()
    }

    /// Product of the outcomes selected by a 0-based setting tuple.
    pub fn correlation(&self, tuple: &[usize]) -> i8 {
        let parity = tuple
            .iter()
            .zip(&self.masks)
            .fold(0u64, |acc, (&i, &mask)| acc ^ (mask >> i & 1));
        if parity == 0 {
            1
        } else {
            -1
        }
    }

    /// The vertex with every outcome of one party flipped.
    pub fn flip_party(&self, party: usize) -> Vertex {
        let mut v = self.clone();
        v.masks[party] ^= low_mask(self.settings[party]);
        v
    }

    /// The vertex with a single outcome flipped.
    pub fn flip_outcome(&self, party: usize, setting: usize) -> Vertex {
        let mut v = self.clone();
        v.masks[party] ^= 1 << setting;
        v
    }
}

pub(crate) fn low_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}
