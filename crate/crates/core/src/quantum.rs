//! Quantum values of full-correlation inequalities on qubits with equatorial
//! observables `A(φ) = cos φ X + sin φ Y`.

use std::f64::consts::TAU;

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::{rational, FullCorrelationInequality, Scenario};
use crate::polytope;

/// Measurement angles, `angles[p][i]` for setting `i` of party `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleSettings {
    pub angles: Vec<Vec<f64>>,
}

impl AngleSettings {
    pub fn new(angles: Vec<Vec<f64>>) -> Self {
        AngleSettings { angles }
    }

    pub fn zeros(scenario: &Scenario) -> Self {
        AngleSettings {
            angles: scenario.settings_per_party().iter().map(|&m| vec![0.0; m]).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Self {
        AngleSettings {
            angles: scenario
                .settings_per_party()
                .iter()
                .map(|&m| (0..m).map(|_| rng.random::<f64>() * TAU).collect())
                .collect(),
        }
    }

    pub fn check(&self, scenario: &Scenario) -> Result<()> {
        let shape: Vec<usize> = self.angles.iter().map(Vec::len).collect();
        if shape != scenario.settings_per_party() {
            return Err(Error::ScenarioMismatch {
                expected: scenario.settings_per_party().to_vec(),
                found: shape,
            });
        }
        Ok(())
    }

    /// Angles reduced to `[0, 2π)`.
    pub fn wrapped(&self) -> Self {
        AngleSettings {
            angles: self
                .angles
                .iter()
                .map(|a| a.iter().map(|x| x.rem_euclid(TAU)).collect())
                .collect(),
        }
    }
}

fn float_terms(ineq: &FullCorrelationInequality) -> Vec<(&[usize], f64)> {
    ineq.terms()
        .iter()
        .map(|(t, c)| (t.as_slice(), rational::to_f64(c)))
        .collect()
}

/// `<GHZ_n| B |GHZ_n>` in closed form: `sum_t alpha_t cos(sum_p phi_{p,t_p})`.
pub fn ghz_value(ineq: &FullCorrelationInequality, s: &AngleSettings) -> Result<f64> {
    s.check(ineq.scenario())?;
    Ok(float_terms(ineq)
        .iter()
        .map(|(t, c)| c * phase_sum(t, s).cos())
        .sum())
}

fn phase_sum(t: &[usize], s: &AngleSettings) -> f64 {
    t.iter().enumerate().map(|(p, &i)| s.angles[p][i]).sum()
}

fn check_dense(scenario: &Scenario, limits: &Limits) -> Result<()> {
    let n = scenario.parties();
    if n > limits.dense_party_cap {
        return Err(Error::Refused {
            what: format!("dense Bell operator on {} qubits", n),
            required: n,
            cap: limits.dense_party_cap,
        });
    }
    Ok(())
}

/// Dense Bell operator `sum_t alpha_t ⊗_p A(phi_{p,t_p})`, party 0 on the
/// most significant qubit.
pub fn bell_operator(
    ineq: &FullCorrelationInequality,
    s: &AngleSettings,
    limits: &Limits,
) -> Result<DMatrix<Complex<f64>>> {
    let scenario = ineq.scenario();
    s.check(scenario)?;
    check_dense(scenario, limits)?;
    let n = scenario.parties();
    let dim = 1usize << n;
    let full = dim - 1;
    let mut b = DMatrix::from_element(dim, dim, Complex::new(0.0, 0.0));
    // Every product of equatorial observables maps |x> to a phase times |~x>;
    // <~x| A(phi) |x> picks e^{i phi} for a 0 bit and e^{-i phi} for a 1 bit.
    for (t, c) in float_terms(ineq) {
        for x in 0..dim {
            let mut phase = 0.0;
            for (p, &i) in t.iter().enumerate() {
                let bit = x >> (n - 1 - p) & 1;
                let phi = s.angles[p][i];
                phase += if bit == 0 { phi } else { -phi };
            }
            b[(x ^ full, x)] += Complex::from_polar(c, phase);
        }
    }
    Ok(b)
}

/// GHZ expectation computed from the dense operator.
pub fn ghz_value_via_operator(
    ineq: &FullCorrelationInequality,
    s: &AngleSettings,
    limits: &Limits,
) -> Result<f64> {
    let b = bell_operator(ineq, s, limits)?;
    let last = b.nrows() - 1;
    Ok(0.5 * (b[(0, 0)] + b[(0, last)] + b[(last, 0)] + b[(last, last)]).re)
}

/// Largest eigenvalue of the Bell operator at fixed settings.
pub fn max_eigenvalue_bound(
    ineq: &FullCorrelationInequality,
    s: &AngleSettings,
    limits: &Limits,
) -> Result<f64> {
    let b = bell_operator(ineq, s, limits)?;
    Ok(b.symmetric_eigenvalues().max())
}

/// Visibility below which the noisy state no longer violates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalVisibility {
    pub value: f64,
    /// False when the quantum value does not exceed the local bound.
    pub violation: bool,
}

/// `(lr - noise) / (q - noise)` for the mixture with white noise, where
/// `noise` is the expectation of the Bell operator in the maximally mixed
/// state.
pub fn visibility(lr_bound: f64, quantum_value: f64, noise: f64) -> Result<CriticalVisibility> {
    if quantum_value <= noise || !quantum_value.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "critical visibility undefined: quantum value {} does not exceed noise value {}",
            quantum_value, noise
        )));
    }
    Ok(CriticalVisibility {
        value: (lr_bound - noise) / (quantum_value - noise),
        violation: quantum_value > lr_bound,
    })
}

/// Critical visibility for equatorial settings, whose noise value is 0.
pub fn critical_visibility(
    ineq: &FullCorrelationInequality,
    quantum_value: f64,
    limits: &Limits,
) -> Result<CriticalVisibility> {
    let lr = rational::to_f64(&polytope::lr_bound(ineq, limits)?);
    visibility(lr, quantum_value, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            restarts: 32,
            seed: 0,
            max_sweeps: 10_000,
        }
    }
}

/// Sweep stops once it improves the objective by less than this.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Ascent {
    pub settings: AngleSettings,
    pub value: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective after each sweep.
    pub trace: Vec<f64>,
}

/// Cyclic coordinate ascent on the GHZ objective. Each angle is set to its
/// exact maximizer `atan2(B, A)` given the others.
pub fn coordinate_ascent(
    ineq: &FullCorrelationInequality,
    initial: &AngleSettings,
    max_sweeps: usize,
) -> Result<Ascent> {
    initial.check(ineq.scenario())?;
    let terms = float_terms(ineq);
    let mut s = initial.clone();
    // terms touching each (party, setting)
    let mut touching: Vec<Vec<Vec<usize>>> = s.angles.iter().map(|a| vec![Vec::new(); a.len()]).collect();
    for (k, (t, _)) in terms.iter().enumerate() {
        for (p, &i) in t.iter().enumerate() {
            touching[p][i].push(k);
        }
    }
    let objective = |s: &AngleSettings| -> f64 {
        terms.iter().map(|(t, c)| c * phase_sum(t, s).cos()).sum()
    };
    let mut value = objective(&s);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        for p in 0..s.angles.len() {
            for i in 0..s.angles[p].len() {
                let (mut a, mut b) = (0.0, 0.0);
                for &k in &touching[p][i] {
                    let (t, c) = terms[k];
                    let rest = phase_sum(t, &s) - s.angles[p][i];
                    a += c * rest.cos();
                    b -= c * rest.sin();
                }
                if a != 0.0 || b != 0.0 {
                    s.angles[p][i] = b.atan2(a);
                }
            }
        }
        let next = objective(&s);
        debug_assert!(next >= value - 1e-9, "ascent decreased: {} -> {}", value, next);
        trace.push(next);
        let gain = next - value;
        value = next;
        if gain < TOLERANCE {
            converged = true;
            break;
        }
    }
    Ok(Ascent {
        settings: s.wrapped(),
        value,
        sweeps,
        converged,
        trace,
    })
}

/// Best GHZ violation found by multi-start coordinate ascent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumReport {
    pub quantum_value: f64,
    pub lr_bound: String,
    pub algebraic_bound: String,
    pub violation_factor: f64,
    pub critical_visibility: f64,
    pub violation: bool,
    pub max_eigenvalue: Option<f64>,
    pub settings: AngleSettings,
    pub state_tag: String,
    pub seed: u64,
    pub restarts: usize,
    pub best_restart: usize,
    pub sweeps: usize,
    pub converged: bool,
    pub global_optimum_certified: bool,
}

pub fn maximize_ghz_violation(
    ineq: &FullCorrelationInequality,
    options: &OptimizeOptions,
    limits: &Limits,
) -> Result<QuantumReport> {
    let scenario = ineq.scenario();
    let lr = polytope::lr_bound(ineq, limits)?;
    let restarts = options.restarts.max(1);
    let runs: Vec<Ascent> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(r as u64);
            let start = AngleSettings::random(scenario, &mut rng);
            coordinate_ascent(ineq, &start, options.max_sweeps)
        })
        .collect::<Result<_>>()?;
    let (best_restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|acc, cur| if cur.1.value > acc.1.value { cur } else { acc })
        .expect("at least one restart");
    let lr_f = rational::to_f64(&lr);
    let quantum_value = best.value;
    let max_eigenvalue = if scenario.parties() <= limits.dense_party_cap {
        Some(max_eigenvalue_bound(ineq, &best.settings, limits)?)
    } else {
        None
    };
    let (critical, violation) = match visibility(lr_f, quantum_value, 0.0) {
        Ok(v) => (v.value, v.violation),
        Err(_) => (f64::INFINITY, false),
    };
    Ok(QuantumReport {
        quantum_value,
        lr_bound: rational::format(&lr),
        algebraic_bound: rational::format(&ineq.algebraic_bound()),
        violation_factor: if lr_f > 0.0 { quantum_value / lr_f } else { f64::INFINITY },
        critical_visibility: critical,
        violation,
        max_eigenvalue,
        settings: best.settings,
        state_tag: format!("GHZ_{}", scenario.parties()),
        seed: options.seed,
        restarts,
        best_restart,
        sweeps: best.sweeps,
        converged: best.converged,
        global_optimum_certified: false,
    })
}
