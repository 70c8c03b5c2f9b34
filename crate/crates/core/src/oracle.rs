//! Dense N-dimensional state-vector simulation, independent of the subspace
//! algebra.
//!
//! Sign conventions:
//! * global step: `-(1 - 2|init><init|)(1 - 2|sol><sol|)`, i.e. flip the
//!   solution then invert every amplitude about the global mean;
//! * local step: `-(1 - 2 sum_i |B_i><B_i|)(1 - 2|sol><sol|)`, i.e. flip the
//!   solution then invert each block about its own mean;
//! * final step: `-[1 - (1 - e^{2i theta})|init><init|][1 - (1 - e^{i(phi - theta)})|sol><sol|]`.
//!
//! With these signs the projections onto the subspace basis reproduce the
//! 3x3 matrices entrywise. All projectors are applied as rank-one updates.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::SearchGeometry;
use crate::phase::IterationPlan;
use crate::subspace::{self, SubspaceState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("solution index {index} out of range for N = {size}")]
pub struct IndexOutOfRange {
    pub index: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    amplitudes: Vec<Complex64>,
    geometry: SearchGeometry,
    solution_index: usize,
}

impl FullState {
    /// Uniform superposition over all `N` items.
    pub fn initial(g: &SearchGeometry, solution_index: usize) -> Result<Self, IndexOutOfRange> {
        let size = g.size();
        if solution_index >= size {
            return Err(IndexOutOfRange {
                index: solution_index,
                size,
            });
        }
        let amp = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
        Ok(Self {
            amplitudes: vec![amp; size],
            geometry: *g,
            solution_index,
        })
    }

    /// Wraps explicit amplitudes; the caller is responsible for their norm.
    pub fn from_amplitudes(
        g: &SearchGeometry,
        solution_index: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, IndexOutOfRange> {
        let size = g.size();
        if solution_index >= size || amplitudes.len() != size {
            return Err(IndexOutOfRange {
                index: solution_index,
                size,
            });
        }
        Ok(Self {
            amplitudes,
            geometry: *g,
            solution_index,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn geometry(&self) -> &SearchGeometry {
        &self.geometry
    }

    pub fn solution_index(&self) -> usize {
        self.solution_index
    }

    pub fn target_block(&self) -> usize {
        self.solution_index / self.geometry.block_size()
    }

    fn target_range(&self) -> std::ops::Range<usize> {
        let b = self.geometry.block_size();
        let start = self.target_block() * b;
        start..start + b
    }

    fn sum_outside_target(&self, f: impl Fn(&Complex64) -> Complex64 + Copy) -> Complex64 {
        let range = self.target_range();
        pairwise_sum(&self.amplitudes[..range.start], f)
            + pairwise_sum(&self.amplitudes[range.end..], f)
    }

    pub fn norm_sqr(&self) -> f64 {
        pairwise_sum(&self.amplitudes, probability).re
    }

    fn mean(&self) -> Complex64 {
        pairwise_sum(&self.amplitudes, amplitude) / self.amplitudes.len() as f64
    }

    /// One global Grover iteration.
    pub fn global_step(mut self) -> Self {
        self.amplitudes[self.solution_index] = -self.amplitudes[self.solution_index];
        let twice_mean = 2.0 * self.mean();
        for a in &mut self.amplitudes {
            *a = twice_mean - *a;
        }
        self
    }

    /// One local Grover iteration: every block is inverted about its own mean.
    pub fn local_step(mut self) -> Self {
        self.amplitudes[self.solution_index] = -self.amplitudes[self.solution_index];
        let b = self.geometry.block_size();
        for block in self.amplitudes.chunks_exact_mut(b) {
            let twice_mean = 2.0 * pairwise_sum(block, amplitude) / b as f64;
            for a in block {
                *a = twice_mean - *a;
            }
        }
        self
    }

    /// The phase-modified final global iteration.
    pub fn final_step(mut self, theta: f64, phi: f64) -> Self {
        let idx = self.solution_index;
        self.amplitudes[idx] *= Complex64::from_polar(1.0, phi - theta);
        let w = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * theta);
        let shift = w * self.mean();
        for a in &mut self.amplitudes {
            *a = shift - *a;
        }
        self
    }

    /// Overlaps with the solution state, the rest of the target block and the
    /// remainder.
    pub fn project(&self) -> SubspaceState {
        let range = self.target_range();
        let b = self.geometry.block_size();
        let n = self.geometry.size();
        let sol = self.amplitudes[self.solution_index];
        let block_sum = pairwise_sum(&self.amplitudes[range.clone()], amplitude) - sol;
        let rem_sum = self.sum_outside_target(amplitude);
        SubspaceState::new(
            sol,
            block_sum / ((b - 1) as f64).sqrt(),
            rem_sum / ((n - b) as f64).sqrt(),
        )
    }

    /// Norm of the component orthogonal to the three-dimensional subspace.
    pub fn leakage(&self) -> f64 {
        self.leakage_from(&self.project())
    }

    fn leakage_from(&self, p: &SubspaceState) -> f64 {
        let range = self.target_range();
        let b = self.geometry.block_size();
        let n = self.geometry.size();
        let block_amp = p.block / ((b - 1) as f64).sqrt();
        let rem_amp = p.rem / ((n - b) as f64).sqrt();
        let mut sum = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let expected = if i == self.solution_index {
                p.sol
            } else if range.contains(&i) {
                block_amp
            } else {
                rem_amp
            };
            sum += (a - expected).norm_sqr();
        }
        sum.sqrt()
    }

    /// `(inside, outside)` probability of the target block.
    pub fn block_probabilities(&self) -> (f64, f64) {
        let range = self.target_range();
        let inside = pairwise_sum(&self.amplitudes[range], probability);
        let outside = self.sum_outside_target(probability);
        (inside.re, outside.re)
    }
}

/// Pairwise summation of `f` over `values`. Uniform amplitudes make the
/// rounding errors of a plain running sum correlate, which shows up as a
/// steady norm drift across steps.
fn pairwise_sum<T>(values: &[T], f: impl Fn(&T) -> Complex64 + Copy) -> Complex64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        values.iter().map(f).sum()
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo, f) + pairwise_sum(hi, f)
    }
}

fn amplitude(a: &Complex64) -> Complex64 {
    *a
}

fn probability(a: &Complex64) -> Complex64 {
    a.norm_sqr().into()
}

/// Outcome of simulating a plan at full dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certification {
    pub solution_index: usize,
    pub prob_inside: f64,
    pub prob_outside: f64,
    /// Final projection vs. the subspace engine's `run` result.
    pub final_deviation: f64,
    /// Worst per-component projection error along the whole trajectory.
    pub trajectory_deviation: f64,
    /// Worst out-of-subspace norm along the whole trajectory.
    pub max_leakage: f64,
    pub max_norm_defect: f64,
}

/// Runs `plan` on the dense state and compares each step against the
/// subspace engine.
pub fn certify_plan(
    g: &SearchGeometry,
    plan: &IterationPlan,
    solution_index: usize,
) -> Result<Certification, IndexOutOfRange> {
    let (theta, phi) = (plan.phases.theta, plan.phases.phi);
    let reference = subspace::trajectory(g, plan.counts, theta, phi);
    let mut expected = reference.iter();

    let mut state = FullState::initial(g, solution_index)?;
    let mut trajectory_deviation: f64 = 0.0;
    let mut max_leakage: f64 = 0.0;
    let mut max_norm_defect: f64 = 0.0;
    let mut check = |s: &FullState, expect: &SubspaceState| {
        let p = s.project();
        trajectory_deviation = trajectory_deviation.max(p.max_deviation(expect));
        max_leakage = max_leakage.max(s.leakage_from(&p));
        max_norm_defect = max_norm_defect.max((s.norm_sqr() - 1.0).abs());
    };

    check(
        &state,
        expected
            .next()
            .expect("trajectory starts at the initial state"),
    );
    for _ in 0..plan.counts.global {
        state = state.global_step();
        check(&state, expected.next().expect("one entry per global step"));
    }
    for _ in 0..plan.counts.local {
        state = state.local_step();
        check(&state, expected.next().expect("one entry per local step"));
    }
    state = state.final_step(theta, phi);
    check(&state, expected.next().expect("final entry"));

    let (prob_inside, prob_outside) = state.block_probabilities();
    Ok(Certification {
        solution_index,
        prob_inside,
        prob_outside,
        final_deviation: state.project().max_deviation(&plan.run(g)),
        trajectory_deviation,
        max_leakage,
        max_norm_defect,
    })
}
