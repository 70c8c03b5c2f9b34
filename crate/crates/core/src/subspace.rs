//! Three-dimensional invariant subspace of the partial search.
//!
//! Basis, in order:
//! 1. the solution state,
//! 2. the normalized uniform state over the rest of the target block,
//! 3. the normalized uniform state over everything outside the target block.
//!
//! States are column vectors and operators act from the left, so a sequence
//! written `final * local^j_l * global^j_g` applies `global^j_g` first.

use std::ops::Mul;

use num_complex::Complex64;

use crate::geometry::{Counts, SearchGeometry};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Amplitudes over the three basis states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceState {
    pub sol: Complex64,
    pub block: Complex64,
    pub rem: Complex64,
}

impl SubspaceState {
    pub fn new(sol: Complex64, block: Complex64, rem: Complex64) -> Self {
        Self { sol, block, rem }
    }

    pub fn real(sol: f64, block: f64, rem: f64) -> Self {
        Self::new(sol.into(), block.into(), rem.into())
    }

    pub fn components(&self) -> [Complex64; 3] {
        [self.sol, self.block, self.rem]
    }

    fn from_components([sol, block, rem]: [Complex64; 3]) -> Self {
        Self { sol, block, rem }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components().iter().map(|c| c.norm_sqr()).sum()
    }

    /// Probability of landing outside the target block.
    pub fn rem_probability(&self) -> f64 {
        self.rem.norm_sqr()
    }

    /// Largest per-component modulus of `self - other`.
    pub fn max_deviation(&self, other: &SubspaceState) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A 3x3 complex matrix acting on [`SubspaceState`]s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceOperator {
    entries: [[Complex64; 3]; 3],
}

impl SubspaceOperator {
    pub fn new(entries: [[Complex64; 3]; 3]) -> Self {
        Self { entries }
    }

    pub fn from_real(entries: [[f64; 3]; 3]) -> Self {
        Self::new(entries.map(|row| row.map(Complex64::from)))
    }

    pub fn identity() -> Self {
        let mut entries = [[ZERO; 3]; 3];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[[Complex64; 3]; 3] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut entries = [[ZERO; 3]; 3];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.entries[j][i].conj();
            }
        }
        Self { entries }
    }

    pub fn apply(&self, state: &SubspaceState) -> SubspaceState {
        let v = state.components();
        SubspaceState::from_components(
            self.entries
                .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum()),
        )
    }

    /// `self^n` by repeated multiplication.
    pub fn pow(&self, n: u64) -> Self {
        (0..n).fold(Self::identity(), |acc, _| *self * acc)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &SubspaceOperator) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self
            .entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
        {
            worst = worst.max((a - b).norm());
        }
        worst
    }

    /// Entrywise distance of `U^dagger U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_deviation(&Self::identity())
    }
}

impl Mul for SubspaceOperator {
    type Output = SubspaceOperator;

    fn mul(self, rhs: SubspaceOperator) -> SubspaceOperator {
        let mut entries = [[ZERO; 3]; 3];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|k| self.entries[i][k] * rhs.entries[k][j]).sum();
            }
        }
        SubspaceOperator { entries }
    }
}

impl Mul<SubspaceState> for SubspaceOperator {
    type Output = SubspaceState;

    fn mul(self, rhs: SubspaceState) -> SubspaceState {
        self.apply(&rhs)
    }
}

/// The uniform superposition over all `N` items.
pub fn initial_state(g: &SearchGeometry) -> SubspaceState {
    let (sg, cg) = g.gamma().sin_cos();
    let (sl, cl) = g.theta_local().sin_cos();
    SubspaceState::real(sg * sl, sg * cl, cg)
}

/// The uniform superposition over the target block.
pub fn target_state(g: &SearchGeometry) -> SubspaceState {
    let (sl, cl) = g.theta_local().sin_cos();
    SubspaceState::real(sl, cl, 0.0)
}

/// Symmetric involution mapping the uniform state to
/// `(sin theta_g, cos theta_g, 0)`.
pub fn basis_change(g: &SearchGeometry) -> SubspaceOperator {
    let cos_global = g.theta_global().cos();
    let (sg, cg) = g.gamma().sin_cos();
    let u = g.theta_local().cos() * sg / cos_global;
    let v = cg / cos_global;
    SubspaceOperator::from_real([[1.0, 0.0, 0.0], [0.0, u, v], [0.0, v, -u]])
}

/// Rotation by `2 j theta_g` in the first two coordinates with `(-1)^j` in the
/// third, i.e. `j` global iterations in the rotated basis.
pub fn global_rotation(g: &SearchGeometry, iterations: u64) -> SubspaceOperator {
    let (s, c) = (2.0 * iterations as f64 * g.theta_global()).sin_cos();
    let parity = if iterations.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    SubspaceOperator::from_real([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, parity]])
}

/// `j` global Grover iterations.
pub fn global_operator(g: &SearchGeometry, iterations: u64) -> SubspaceOperator {
    let t = basis_change(g);
    t * global_rotation(g, iterations) * t
}

/// `j` local Grover iterations. The remainder coordinate is untouched.
pub fn local_operator(g: &SearchGeometry, iterations: u64) -> SubspaceOperator {
    let (s, c) = (2.0 * iterations as f64 * g.theta_local()).sin_cos();
    SubspaceOperator::from_real([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// Closed-form state after `j_g` global then `j_l` local iterations.
pub fn closed_form_intermediate(g: &SearchGeometry, global: u64, local: u64) -> SubspaceState {
    let (sin_g, cos_g) = g.theta_global().sin_cos();
    let (sin_gamma, cos_gamma) = g.gamma().sin_cos();
    let cos_l = g.theta_local().cos();
    let (s_g, c_g) = (2.0 * global as f64 * g.theta_global()).sin_cos();
    let (s_l, c_l) = (2.0 * local as f64 * g.theta_local()).sin_cos();
    let m = cos_l * cos_l * sin_gamma * sin_gamma + cos_gamma * cos_gamma;

    let grown = cos_g * (s_g * m + c_g * cos_g * sin_g);
    let shrunk = c_g * m - s_g * cos_g * sin_g;
    let scale = 1.0 / (cos_g * cos_g);

    SubspaceState::real(
        scale * (c_l * grown + s_l * cos_l * sin_gamma * shrunk),
        scale * (-s_l * grown + c_l * cos_l * sin_gamma * shrunk),
        scale * cos_gamma * shrunk,
    )
}

/// The final global iteration carrying the two correction phases:
/// `-[1 - (1 - e^{2i theta})|init><init|] [1 - (1 - e^{i(phi - theta)})|sol><sol|]`
/// written out in the subspace basis.
pub fn final_operator(g: &SearchGeometry, theta: f64, phi: f64) -> SubspaceOperator {
    let (sin_gamma, cos_gamma) = g.gamma().sin_cos();
    let (sin_l, cos_l) = g.theta_local().sin_cos();
    let oracle = Complex64::from_polar(1.0, phi - theta);
    let w = ONE - Complex64::from_polar(1.0, 2.0 * theta);
    let sg2 = sin_gamma * sin_gamma;

    SubspaceOperator::new([
        [
            -oracle * (ONE - w * sg2 * sin_l * sin_l),
            w * sg2 * sin_l * cos_l,
            w * cos_gamma * sin_gamma * sin_l,
        ],
        [
            oracle * w * sg2 * sin_l * cos_l,
            w * sg2 * cos_l * cos_l - ONE,
            w * cos_gamma * sin_gamma * cos_l,
        ],
        [
            oracle * w * sin_gamma * sin_l * cos_gamma,
            w * sin_gamma * cos_gamma * cos_l,
            w * cos_gamma * cos_gamma - ONE,
        ],
    ])
}

/// Evolves the uniform state through `global^j_g`, `local^j_l`, then the
/// phase-modified final step.
pub fn run_counts(g: &SearchGeometry, counts: Counts, theta: f64, phi: f64) -> SubspaceState {
    let sequence = final_operator(g, theta, phi)
        * local_operator(g, counts.local)
        * global_operator(g, counts.global);
    sequence * initial_state(g)
}

/// Every intermediate state, one per single iteration: the initial state,
/// then after each global step, each local step, and the final step.
pub fn trajectory(g: &SearchGeometry, counts: Counts, theta: f64, phi: f64) -> Vec<SubspaceState> {
    let global = global_operator(g, 1);
    let local = local_operator(g, 1);
    let last = final_operator(g, theta, phi);
    let steps = std::iter::repeat_n(global, counts.global as usize)
        .chain(std::iter::repeat_n(local, counts.local as usize))
        .chain(std::iter::once(last));

    let mut state = initial_state(g);
    let mut out = Vec::with_capacity(counts.global as usize + counts.local as usize + 2);
    out.push(state);
    for op in steps {
        state = op * state;
        out.push(state);
    }
    out
}
