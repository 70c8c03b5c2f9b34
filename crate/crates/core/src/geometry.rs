//! Search-space partition and the ideal iteration counts.
//!
//! A database of `N = K * b` items is split into `K` blocks of `b` items each.
//! Three angles describe the instance:
//!
//! * `sin²(theta_global) = 1/N`
//! * `sin²(theta_local) = 1/b`
//! * `sin²(gamma) = 1/K`
//!
//! The ideal (real-valued) counts solve
//! `cos(2 j_l theta_local) = (K-2)/(2(K-1))` and
//! `tan(2 j_g theta_global) = (K-2)/sqrt(3K-4)` on the principal branches.

use thiserror::Error;

/// Distance below which an ideal count is treated as the integer it rounds to
/// before flooring. Counts that are integral in exact arithmetic can land a
/// few ulps low in `f64` (e.g. `j_l = 1` for `K = 2, b = 2`).
pub const INTEGER_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("number of blocks K must be at least 2, got {0}")]
    TooFewBlocks(usize),
    #[error("block size b must be at least 2, got {0}")]
    BlockTooSmall(usize),
    #[error("database size K*b overflows: K={0}, b={1}")]
    Overflow(usize, usize),
}

/// One partial-search instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGeometry {
    blocks: usize,
    block_size: usize,
    size: usize,
    theta_global: f64,
    theta_local: f64,
    gamma: f64,
}

impl SearchGeometry {
    pub fn new(blocks: usize, block_size: usize) -> Result<Self, GeometryError> {
        if blocks < 2 {
            return Err(GeometryError::TooFewBlocks(blocks));
        }
        if block_size < 2 {
            return Err(GeometryError::BlockTooSmall(block_size));
        }
        let size = blocks
            .checked_mul(block_size)
            .ok_or(GeometryError::Overflow(blocks, block_size))?;
        Ok(Self {
            blocks,
            block_size,
            size,
            theta_global: inverse_sqrt_angle(size),
            theta_local: inverse_sqrt_angle(block_size),
            gamma: inverse_sqrt_angle(blocks),
        })
    }

    /// Number of blocks `K`.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Block size `b`.
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Database size `N = K * b`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn theta_global(&self) -> f64 {
        self.theta_global
    }

    pub fn theta_local(&self) -> f64 {
        self.theta_local
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Ideal real-valued local and global iteration counts.
    pub fn ideal_counts(&self) -> IdealCounts {
        let k = self.blocks as f64;
        let local_cos = (k - 2.0) / (2.0 * (k - 1.0));
        let global_tan = (k - 2.0) / (3.0 * k - 4.0).sqrt();
        IdealCounts {
            local: local_cos.acos() / (2.0 * self.theta_local),
            global: global_tan.atan() / (2.0 * self.theta_global),
        }
    }
}

/// The angle in `(0, pi/2]` whose squared sine is `1/n`.
fn inverse_sqrt_angle(n: usize) -> f64 {
    (1.0 / n as f64).sqrt().asin()
}

/// Real-valued iteration counts that would make the plain sequence exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealCounts {
    pub local: f64,
    pub global: f64,
}

/// Integer local/global iteration counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Counts {
    pub local: u64,
    pub global: u64,
}

/// Number of extra global iterations the planner may add on top of the floor.
pub const MAX_GLOBAL_OFFSET: u64 = 2;

impl IdealCounts {
    /// Floor of the local count and floor-plus-{0,1,2} of the global count,
    /// in offset order.
    pub fn candidates(&self) -> [Counts; 3] {
        let local = snapped_floor(self.local);
        let global = snapped_floor(self.global);
        [0, 1, MAX_GLOBAL_OFFSET].map(|offset| Counts {
            local,
            global: global + offset,
        })
    }

    /// Nearest-integer counts, ties away from zero.
    pub fn rounded(&self) -> Counts {
        Counts {
            local: self.local.max(0.0).round() as u64,
            global: self.global.max(0.0).round() as u64,
        }
    }
}

/// `floor(x)`, except that values within [`INTEGER_SNAP`] of an integer
/// floor to that integer.
pub fn snapped_floor(x: f64) -> u64 {
    let x = x.max(0.0);
    let nearest = x.round();
    if (x - nearest).abs() <= INTEGER_SNAP {
        nearest as u64
    } else {
        x.floor() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn four_by_four_angles() {
        let g = SearchGeometry::new(4, 4).unwrap();
        assert_eq!(g.size(), 16);
        assert!((g.gamma() - FRAC_PI_6).abs() < 1e-15);
        assert!((g.theta_local() - FRAC_PI_6).abs() < 1e-15);
        assert!((g.theta_global() - 0.25f64.asin()).abs() < 1e-15);
        assert!((g.theta_global() - 0.2526803).abs() < 1e-7);
    }

    #[test]
    fn two_by_two_angles() {
        let g = SearchGeometry::new(2, 2).unwrap();
        assert_eq!(g.size(), 4);
        assert!((g.gamma() - FRAC_PI_4).abs() < 1e-15);
        assert!((g.theta_local() - FRAC_PI_4).abs() < 1e-15);
        assert!((g.theta_global() - FRAC_PI_6).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_partitions() {
        assert_eq!(
            SearchGeometry::new(1, 8),
            Err(GeometryError::TooFewBlocks(1))
        );
        assert_eq!(
            SearchGeometry::new(0, 8),
            Err(GeometryError::TooFewBlocks(0))
        );
        assert_eq!(
            SearchGeometry::new(8, 1),
            Err(GeometryError::BlockTooSmall(1))
        );
        assert!(matches!(
            SearchGeometry::new(usize::MAX, 2),
            Err(GeometryError::Overflow(..))
        ));
    }

    #[test]
    fn ideal_counts_two_blocks() {
        for b in [2, 3, 7, 100] {
            let g = SearchGeometry::new(2, b).unwrap();
            let ideal = g.ideal_counts();
            assert!((ideal.local - (PI / 2.0) / (2.0 * g.theta_local())).abs() < 1e-14);
            assert_eq!(ideal.global, 0.0);
        }
    }

    #[test]
    fn ideal_counts_four_by_four() {
        // arccos(1/3) / (pi/3) and arctan(1/sqrt 2) / (2 asin(1/4)).
        let ideal = SearchGeometry::new(4, 4).unwrap().ideal_counts();
        let local = (1.0f64 / 3.0).acos() / (PI / 3.0);
        let global = (0.5f64.sqrt()).atan() / (2.0 * 0.25f64.asin());
        assert!((ideal.local - local).abs() < 1e-14);
        assert!((ideal.global - global).abs() < 1e-14);
        assert!((ideal.local - 1.17548).abs() < 1e-5);
        assert!((ideal.global - 1.21790).abs() < 1e-5);
    }

    #[test]
    fn large_k_local_angle_tends_to_pi_over_three() {
        let g = SearchGeometry::new(1_000_000, 2).unwrap();
        let ideal = g.ideal_counts();
        assert!((2.0 * ideal.local * g.theta_local() - PI / 3.0).abs() < 1e-5);
    }

    #[test]
    fn candidate_counts() {
        let c = |local, global| IdealCounts { local, global }.candidates();
        let pairs = |cs: [Counts; 3]| cs.map(|c| (c.local, c.global));
        assert_eq!(pairs(c(1.175, 1.218)), [(1, 1), (1, 2), (1, 3)]);
        assert_eq!(pairs(c(0.9, 0.0)), [(0, 0), (0, 1), (0, 2)]);
        assert_eq!(pairs(c(3.0, 2.0)), [(3, 2), (3, 3), (3, 4)]);
    }

    #[test]
    fn integral_counts_survive_rounding_noise() {
        let ideal = SearchGeometry::new(2, 2).unwrap().ideal_counts();
        assert!(ideal.local < 1.0, "f64 evaluation lands below 1");
        assert_eq!(
            ideal.candidates()[0],
            Counts {
                local: 1,
                global: 0
            }
        );
        assert_eq!(snapped_floor(1.0 - 1e-12), 1);
        assert_eq!(snapped_floor(1.0 - 1e-6), 0);
        assert_eq!(snapped_floor(2.5), 2);
    }

    #[test]
    fn rounding_ties_away_from_zero() {
        let r = IdealCounts {
            local: 1.5,
            global: 2.4999,
        }
        .rounded();
        assert_eq!((r.local, r.global), (2, 2));
    }

    #[test]
    fn formula_arguments_stay_in_principal_domains() {
        for k in 2..=1000u32 {
            let k = k as f64;
            let cos_arg = (k - 2.0) / (2.0 * (k - 1.0));
            let tan_arg = (k - 2.0) / (3.0 * k - 4.0).sqrt();
            assert!((0.0..0.5).contains(&cos_arg));
            assert!(tan_arg >= 0.0);
        }
    }

    proptest! {
        #[test]
        fn geometry_invariants(k in 2usize..2000, b in 2usize..2000) {
            let g = SearchGeometry::new(k, b).unwrap();
            prop_assert_eq!(g.size(), k * b);
            prop_assert!((g.theta_global().sin().powi(2) - 1.0 / (k * b) as f64).abs() < 1e-14);
            prop_assert!((g.theta_local().sin().powi(2) - 1.0 / b as f64).abs() < 1e-14);
            prop_assert!((g.gamma().sin().powi(2) - 1.0 / k as f64).abs() < 1e-14);
            for angle in [g.theta_global(), g.theta_local(), g.gamma()] {
                prop_assert!(angle > 0.0 && angle < std::f64::consts::FRAC_PI_2);
            }
            let again = SearchGeometry::new(k, b).unwrap();
            prop_assert_eq!(g.theta_global().to_bits(), again.theta_global().to_bits());
            prop_assert_eq!(g.theta_local().to_bits(), again.theta_local().to_bits());
            prop_assert_eq!(g.gamma().to_bits(), again.gamma().to_bits());
        }

        #[test]
        fn ideal_counts_solve_their_equations(k in 2usize..2000, b in 2usize..2000) {
            let g = SearchGeometry::new(k, b).unwrap();
            let ideal = g.ideal_counts();
            let kf = k as f64;
            prop_assert!(ideal.local >= 0.0 && ideal.global >= 0.0);
            let lhs = (2.0 * ideal.local * g.theta_local()).cos();
            prop_assert!((lhs - (kf - 2.0) / (2.0 * (kf - 1.0))).abs() < 1e-12);
            let lhs = (2.0 * ideal.global * g.theta_global()).tan();
            prop_assert!((lhs - (kf - 2.0) / (3.0 * kf - 4.0).sqrt()).abs() < 1e-12);
        }
    }
}
