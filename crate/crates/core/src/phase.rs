//! Correction phases for the final global step and the sure-success planner.
//!
//! The remainder amplitude after the modified final step vanishes iff
//!
//! ```text
//! e^{i(phi - theta)} (1 - e^{2i theta}) x + (1 - e^{2i theta}) y + 2z = 0
//! ```
//!
//! with `x = a sin(gamma) sin(theta_l) cos(gamma)`,
//! `y = b sin(gamma) cos(gamma) cos(theta_l) + c cos²(gamma)` and `z = -c/2`,
//! where `(a, b, c)` is the state just before the final step. Eliminating
//! `phi` gives `sin²(theta) = z² / (x² - y² - 2yz)`, which has a solution only
//! when `x² >= (y + z)²`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{Counts, IdealCounts, SearchGeometry, MAX_GLOBAL_OFFSET};
use crate::subspace::{self, closed_form_intermediate, SubspaceState};

/// Largest phase-condition residual accepted as a solution.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// `|z|` below this takes the `theta = 0` short-circuit.
pub const ZERO_Z: f64 = 1e-13;

/// Slack allowed on `x² >= (y + z)²`.
pub const INEQUALITY_SLACK: f64 = 1e-12;

/// Smallest usable `x² - y² - 2yz` when `z != 0`.
pub const MIN_DENOMINATOR: f64 = 1e-13;

/// Largest imaginary part tolerated in a pre-final state.
pub const MAX_IMAGINARY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAuxiliaries {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("pre-final state has imaginary component {imaginary:e} (expected a real state)")]
pub struct ComplexStateError {
    pub imaginary: f64,
}

/// `(x, y, z)` for the state reached just before the final step.
pub fn auxiliaries(
    g: &SearchGeometry,
    state: &SubspaceState,
) -> Result<PhaseAuxiliaries, ComplexStateError> {
    let imaginary = state
        .components()
        .iter()
        .map(|c| c.im.abs())
        .fold(0.0, f64::max);
    if imaginary >= MAX_IMAGINARY {
        return Err(ComplexStateError { imaginary });
    }
    let (a, b, c) = (state.sol.re, state.block.re, state.rem.re);
    let (sin_gamma, cos_gamma) = g.gamma().sin_cos();
    let (sin_l, cos_l) = g.theta_local().sin_cos();
    Ok(PhaseAuxiliaries {
        x: a * sin_gamma * sin_l * cos_gamma,
        y: b * sin_gamma * cos_gamma * cos_l + c * cos_gamma * cos_gamma,
        z: -c / 2.0,
    })
}

impl PhaseAuxiliaries {
    /// `x² - y² - 2yz`.
    pub fn denominator(&self) -> f64 {
        self.x * self.x - self.y * self.y - 2.0 * self.y * self.z
    }

    /// `x² - (y + z)²`; non-negative iff the phase condition is solvable.
    pub fn margin(&self) -> f64 {
        self.x * self.x - (self.y + self.z).powi(2)
    }

    /// Modulus of the phase-condition left-hand side at `(theta, phi)`.
    pub fn residual(&self, theta: f64, phi: f64) -> f64 {
        let w = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * theta);
        let lhs = Complex64::from_polar(1.0, phi - theta) * w * self.x + w * self.y + 2.0 * self.z;
        lhs.norm()
    }
}

pub fn feasible(aux: &PhaseAuxiliaries) -> bool {
    if aux.z.abs() < ZERO_Z {
        return true;
    }
    aux.margin() >= -INEQUALITY_SLACK && aux.denominator() > MIN_DENOMINATOR
}

/// Phases for the final step. `theta` in `[0, pi)`, `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSolution {
    pub theta: f64,
    pub phi: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Infeasibility {
    #[error("x^2 < (y+z)^2: no real theta")]
    Inequality,
    #[error("x = 0 with z != 0")]
    ZeroX,
    #[error("residual above tolerance on both theta branches")]
    Residual,
    #[error("pre-final state is not real")]
    ComplexState,
}

pub fn solve_phases(aux: &PhaseAuxiliaries) -> Result<PhaseSolution, Infeasibility> {
    if aux.z.abs() < ZERO_Z {
        return Ok(PhaseSolution {
            theta: 0.0,
            phi: 0.0,
            residual: aux.residual(0.0, 0.0),
        });
    }
    if !feasible(aux) {
        return Err(Infeasibility::Inequality);
    }
    if aux.x == 0.0 {
        return Err(Infeasibility::ZeroX);
    }

    // Tangent instances evaluate a few ulps above 1.
    let sin_sq = (aux.z * aux.z / aux.denominator()).clamp(0.0, 1.0);
    let sin_theta = sin_sq.sqrt();
    let cos_abs = (1.0 - sin_sq).sqrt();
    for cos_theta in [cos_abs, -cos_abs] {
        let theta = sin_theta.atan2(cos_theta);
        let ratio = aux.y / aux.x;
        let sin_phi = -ratio * sin_theta - aux.z / (aux.x * sin_theta);
        let cos_phi = -ratio * cos_theta;
        let phi = sin_phi.atan2(cos_phi).rem_euclid(TAU);
        let residual = aux.residual(theta, phi);
        if residual < RESIDUAL_TOLERANCE {
            return Ok(PhaseSolution {
                theta,
                phi: if phi >= TAU { 0.0 } else { phi },
                residual,
            });
        }
    }
    Err(Infeasibility::Residual)
}

/// Phases of the unmodified Grover step.
pub const STANDARD_THETA: f64 = FRAC_PI_2;
pub const STANDARD_PHI: f64 = 3.0 * FRAC_PI_2;

/// A complete sure-success schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationPlan {
    pub counts: Counts,
    pub offset: u64,
    pub phases: PhaseSolution,
}

impl IterationPlan {
    /// Oracle calls, counting the final modified step.
    pub fn oracle_queries(&self) -> u64 {
        self.counts.global + self.counts.local + 1
    }

    pub fn run(&self, g: &SearchGeometry) -> SubspaceState {
        subspace::run_counts(g, self.counts, self.phases.theta, self.phases.phi)
    }
}

/// One planner attempt that did not produce phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectedCandidate {
    pub counts: Counts,
    pub offset: u64,
    pub aux: Option<PhaseAuxiliaries>,
    pub reason: Infeasibility,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct PlanFailure {
    pub attempts: Vec<RejectedCandidate>,
}

impl fmt::Display for PlanFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no sure-success phases for any candidate:")?;
        for a in &self.attempts {
            write!(
                f,
                " [offset {} (j_l={}, j_g={}): {}]",
                a.offset, a.counts.local, a.counts.global, a.reason
            )?;
        }
        Ok(())
    }
}

/// Tries `floor(j_g) + 0, 1, 2` global iterations with `floor(j_l)` local
/// ones and returns the first candidate whose phase condition solves.
pub fn plan_sure_success(g: &SearchGeometry) -> Result<IterationPlan, PlanFailure> {
    plan_from_ideal(g, &g.ideal_counts())
}

pub fn plan_from_ideal(
    g: &SearchGeometry,
    ideal: &IdealCounts,
) -> Result<IterationPlan, PlanFailure> {
    let mut attempts = Vec::with_capacity(MAX_GLOBAL_OFFSET as usize + 1);
    for (offset, counts) in (0..).zip(ideal.candidates()) {
        let state = closed_form_intermediate(g, counts.global, counts.local);
        let aux = match auxiliaries(g, &state) {
            Ok(aux) => aux,
            Err(_) => {
                attempts.push(RejectedCandidate {
                    counts,
                    offset,
                    aux: None,
                    reason: Infeasibility::ComplexState,
                });
                continue;
            }
        };
        match solve_phases(&aux) {
            Ok(phases) => {
                return Ok(IterationPlan {
                    counts,
                    offset,
                    phases,
                })
            }
            Err(reason) => attempts.push(RejectedCandidate {
                counts,
                offset,
                aux: Some(aux),
                reason,
            }),
        }
    }
    Err(PlanFailure { attempts })
}

/// The plain nearest-integer schedule and its chance of ending in the
/// target block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrkBaseline {
    pub counts: Counts,
    pub success_probability: f64,
}

pub fn plan_grk_baseline(g: &SearchGeometry) -> GrkBaseline {
    let counts = g.ideal_counts().rounded();
    let sequence = subspace::global_operator(g, 1)
        * subspace::local_operator(g, counts.local)
        * subspace::global_operator(g, counts.global);
    let state = sequence * subspace::initial_state(g);
    GrkBaseline {
        counts,
        success_probability: (1.0 - state.rem_probability()).clamp(0.0, 1.0),
    }
}
