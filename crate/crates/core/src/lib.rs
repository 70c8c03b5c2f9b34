//! Sure-success quantum partial search.
//!
//! A database of `N = K * b` items is split into `K` blocks. Global Grover
//! iterations, then local (blockwise) ones, then one final global iteration
//! carrying two correction phases `(theta, phi)` put all amplitude inside the
//! block that holds the solution.
//!
//! * [`geometry`]: the partition, its angles and the ideal iteration counts.
//! * [`subspace`]: the 3-dimensional invariant subspace, by matrices and in
//!   closed form.
//! * [`phase`]: the phase condition, its solver and the planner.
//! * [`oracle`]: a dense N-dimensional simulator used to certify plans.
//! * [`sweep`] and [`report`]: the parameter sweep and its CSV/JSON output.

pub mod geometry;
pub mod oracle;
pub mod phase;
pub mod report;
pub mod subspace;
pub mod sweep;

pub use geometry::{Counts, GeometryError, IdealCounts, SearchGeometry};
pub use oracle::{certify_plan, Certification, FullState};
pub use phase::{
    plan_grk_baseline, plan_sure_success, solve_phases, GrkBaseline, Infeasibility, IterationPlan,
    PhaseAuxiliaries, PhaseSolution, PlanFailure,
};
pub use report::{Status, SweepRecord};
pub use subspace::{SubspaceOperator, SubspaceState};
