//! Dense linear algebra and a small simplex solver.

mod linear;
mod matrix;
mod simplex;

pub use linear::{solve_linear_system, LinearSolution};
pub use matrix::DenseMatrix;
pub use simplex::{solve_lp, LpProblem, LpSolution, LpStatus, Sense, FEASIBILITY_TOL};

use crate::error::{Error, Result};
use crate::space::{full_mask, subset_sum, PartialInfo, WeightVector};

/// Largest `n` accepted by [`optimal_inclass_bound`] (`2^n − 1` variables).
pub const INCLASS_MAX_EVENTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSense {
    Lower,
    Upper,
}

/// Optimal bound over every space sharing `α` and `γ(c)`.
///
/// Optimizes `Σ_B p_B` over `p ≥ 0` subject to, for each `i`,
/// `Σ_{B∋i} p_B = α_i` and `Σ_{B∋i} (Σ_{k∈B} c_k) p_B = γ_i(c)`.
pub fn optimal_inclass_bound(
    info: &PartialInfo,
    w: &WeightVector,
    sense: BoundSense,
) -> Result<f64> {
    let n = info.n();
    if n > INCLASS_MAX_EVENTS {
        return Err(Error::TooManyEvents {
            n,
            max: INCLASS_MAX_EVENTS,
        });
    }
    w.require_valid()?;
    w.require_len(n)?;
    let c = w.c();
    let vars = full_mask(n) as usize;
    let mut a = DenseMatrix::zeros(2 * n, vars);
    for col in 0..vars {
        let mask = col as u64 + 1;
        let s = subset_sum(c, mask);
        for i in crate::space::bits(mask) {
            a.set(i, col, 1.0);
            a.set(n + i, col, s);
        }
    }
    let mut rhs = info.alpha().to_vec();
    rhs.extend((0..n).map(|i| info.gamma(c, i)));
    let lp_sense = match sense {
        BoundSense::Lower => Sense::Min,
        BoundSense::Upper => Sense::Max,
    };
    let problem = LpProblem::new(vec![1.0; vars], a, rhs, lp_sense)?;
    let sol = solve_lp(&problem)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        LpStatus::Infeasible => Err(Error::InconsistentInfo(
            "no probability space has this partial information".into(),
        )),
        LpStatus::Unbounded => Err(Error::Numerical("in-class LP reported unbounded".into())),
    }
}
