//! Time evolution of collective-cascade (superradiant) and independently
//! radiating populations, fluorescence rates, and per-time separability
//! certification.
//!
//! Both models are cascades over excitation number with level-dependent
//! rates: the collective cascade de-excites level n1 at rate
//! Gamma (n0+1) n1, the independent one at Gamma n1. The collective
//! generator has degenerate rates for some N (N = 3 gives 3, 4, 3), so the
//! primary path is a dense matrix exponential rather than a mode
//! expansion; an adaptive Runge-Kutta integration of the same rate
//! equation serves as the oracle in the test suites.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dicke::{sds_fit, sds_populations, DickeDiagonalState, SdsFit};
use crate::{Error, Result};

/// Which cascade model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadianceModel {
    Superradiance,
    Standardradiance,
}

/// Qubit count, decay rate, and output time stamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadianceParams {
    pub n: usize,
    pub gamma: f64,
    pub t_grid: Vec<f64>,
}

impl RadianceParams {
    pub fn new(n: usize, gamma: f64, t_grid: Vec<f64>) -> Result<Self> {
        let p = Self { n, gamma, t_grid };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::OutOfRange {
                what: "qubit count N",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        if self.gamma.is_nan() || self.gamma <= 0.0 {
            return Err(Error::OutOfRange {
                what: "decay rate Gamma",
                value: self.gamma,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if self.t_grid.is_empty() || self.t_grid[0] < 0.0 {
            return Err(Error::Invalid("time grid must start at t >= 0".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Populations at each requested time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DickeDiagonalState>,
}

/// Default output grid: 60 log-spaced points over [1e-3, 10]/Gamma for the
/// collective cascade and [1e-3, 100]/Gamma for independent decay.
pub fn default_time_grid(model: RadianceModel, gamma: f64) -> Vec<f64> {
    let (lo, hi) = match model {
        RadianceModel::Superradiance => (1e-3, 10.0),
        RadianceModel::Standardradiance => (1e-3, 100.0),
    };
    log_spaced(lo / gamma, hi / gamma, 60)
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Cascade generator in units of Gamma: d chi[n1]/dt =
/// -rate(n1) chi[n1] + rate(n1+1) chi[n1+1].
pub fn cascade_generator(n: usize, rate: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n + 1, n + 1);
    for n1 in 0..=n {
        l[(n1, n1)] = -rate(n1);
        if n1 < n {
            l[(n1, n1 + 1)] = rate(n1 + 1);
        }
    }
    l
}

/// Collective de-excitation rate of level n1 (units of Gamma).
pub fn superradiance_rate(n: usize, n1: usize) -> f64 {
    let n0 = n - n1;
    ((n0 + 1) * n1) as f64
}

/// Matrix exponential by scaling and squaring with a Pade approximant
/// (what the linear algebra backend provides).
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().exp()
}

fn evolve_with_rate(
    p: &RadianceParams,
    rate: impl Fn(usize) -> f64,
) -> Result<PopulationTrajectory> {
    p.validate()?;
    let n = p.n;
    let l = cascade_generator(n, rate);
    let mut chi0 = DMatrix::zeros(n + 1, 1);
    chi0[(n, 0)] = 1.0;
    let mut states = Vec::with_capacity(p.t_grid.len());
    for &t in &p.t_grid {
        let propagator = expm(&(l.clone() * (p.gamma * t)));
        let chi = &propagator * &chi0;
        let values: Vec<f64> = (0..=n).map(|i| chi[(i, 0)]).collect();
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid(format!(
                "propagator lost normalization at t = {t}: sum = {sum}"
            )));
        }
        states.push(DickeDiagonalState::new(n, values)?);
    }
    Ok(PopulationTrajectory {
        times: p.t_grid.clone(),
        states,
    })
}

/// Collective-cascade populations from the maximally excited initial
/// state, by dense matrix exponential per time stamp.
pub fn superrad_evolve(p: &RadianceParams) -> Result<PopulationTrajectory> {
    let n = p.n;
    evolve_with_rate(p, |n1| superradiance_rate(n, n1))
}

/// Independent-decay populations in closed form: equivalent to the
/// separable reference state at y = 1 - exp(-Gamma t).
pub fn standardrad_populations(n: usize, gamma: f64, t: f64) -> Result<DickeDiagonalState> {
    if t < 0.0 {
        return Err(Error::OutOfRange {
            what: "time t",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    sds_populations(1.0 - (-gamma * t).exp(), n)
}

/// Independent-decay trajectory over the same grid shape as
/// [`superrad_evolve`], evaluated from the closed form.
pub fn standardrad_evolve(p: &RadianceParams) -> Result<PopulationTrajectory> {
    p.validate()?;
    let states = p
        .t_grid
        .iter()
        .map(|&t| standardrad_populations(p.n, p.gamma, t))
        .collect::<Result<_>>()?;
    Ok(PopulationTrajectory {
        times: p.t_grid.clone(),
        states,
    })
}

/// Rate-equation trajectory of the independent model (matrix exponential
/// with rates n1); used to cross-check the closed form.
pub fn standardrad_evolve_rate_equation(p: &RadianceParams) -> Result<PopulationTrajectory> {
    evolve_with_rate(p, |n1| n1 as f64)
}

/// Per-particle fluorescence rate at each trajectory time.
///
/// Collective cascade: Gamma sum_n1 (n0+1) n1 chi_n1 / N evaluated on the
/// trajectory states. Independent decay: exactly Gamma exp(-Gamma t).
pub fn fluorescence_pdf(traj: &PopulationTrajectory, model: RadianceModel, gamma: f64) -> Vec<f64> {
    match model {
        RadianceModel::Superradiance => traj
            .states
            .iter()
            .map(|s| superrad_emission_rate(s) * gamma)
            .collect(),
        RadianceModel::Standardradiance => traj
            .times
            .iter()
            .map(|&t| gamma * (-gamma * t).exp())
            .collect(),
    }
}

/// Instantaneous per-particle emission rate of a population vector, in
/// units of Gamma.
pub fn superrad_emission_rate(s: &DickeDiagonalState) -> f64 {
    let n = s.n;
    (0..=n)
        .map(|n1| superradiance_rate(n, n1) * s.chi[n1])
        .sum::<f64>()
        / n as f64
}

/// Separability certificate at one trajectory time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeCertificate {
    pub t: f64,
    pub fit: SdsFit,
}

/// Run the separability fit at every time stamp of the chosen model.
/// Per-time infeasibility lands in the certificate, not in the error
/// channel.
pub fn certify_separability_over_time(
    p: &RadianceParams,
    model: RadianceModel,
) -> Result<Vec<TimeCertificate>> {
    if p.n > 8 {
        return Err(Error::OutOfRange {
            what: "qubit count N",
            value: p.n as f64,
            lo: 1.0,
            hi: 8.0,
        });
    }
    let traj = match model {
        RadianceModel::Superradiance => superrad_evolve(p)?,
        RadianceModel::Standardradiance => standardrad_evolve(p)?,
    };
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| {
            Ok(TimeCertificate {
                t,
                fit: sds_fit(s)?,
            })
        })
        .collect()
}
