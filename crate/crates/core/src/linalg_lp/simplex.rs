use serde::{Deserialize, Serialize};

use super::linear::invert;
use super::DenseMatrix;
use crate::error::{Error, Result};

/// Feasibility tolerance shared by both phases.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 64;
const MAX_ITERATIONS: usize = 1_000_000;
const BLAND_AFTER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

/// `optimize objective·x  s.t.  eq_matrix·x = eq_rhs,  x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    eq_matrix: DenseMatrix,
    eq_rhs: Vec<f64>,
    sense: Sense,
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        eq_matrix: DenseMatrix,
        eq_rhs: Vec<f64>,
        sense: Sense,
    ) -> Result<Self> {
        if objective.len() != eq_matrix.cols() {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} coefficients for {} variables",
                objective.len(),
                eq_matrix.cols()
            )));
        }
        if eq_rhs.len() != eq_matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} entries for {} constraints",
                eq_rhs.len(),
                eq_matrix.rows()
            )));
        }
        if objective.iter().chain(&eq_rhs).any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite LP coefficient".into()));
        }
        Ok(Self {
            objective,
            eq_matrix,
            eq_rhs,
            sense,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.eq_rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn eq_matrix(&self) -> &DenseMatrix {
        &self.eq_matrix
    }

    pub fn eq_rhs(&self) -> &[f64] {
        &self.eq_rhs
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; NaN unless `Optimal`.
    pub value: f64,
    /// Basic feasible solution; empty unless `Optimal`.
    pub primal: Vec<f64>,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        Self {
            status,
            value: f64::NAN,
            primal: Vec::new(),
        }
    }
}

/// Two-phase revised simplex, Dantzig pricing with a Bland fallback.
///
/// Artificial variables occupy indices `n..n+m`; once they leave the basis
/// they never re-enter. Artificials stuck at zero on redundant rows stay
/// basic through phase two.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    let mut t = Tableau::new(problem);

    if t.run(Phase::One)? == Outcome::Unbounded {
        return Err(Error::Numerical("phase one reported unbounded".into()));
    }
    let infeasibility: f64 = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter(|(&j, _)| j >= t.n)
        .map(|(_, &v)| v)
        .sum();
    let scale = t.b.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if infeasibility > FEASIBILITY_TOL * scale {
        return Ok(LpSolution::without_point(LpStatus::Infeasible));
    }
    t.drive_out_artificials();

    if t.run(Phase::Two)? == Outcome::Unbounded {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }

    let mut primal = vec![0.0; t.n];
    for (&j, &v) in t.basis.iter().zip(&t.xb) {
        if j < t.n {
            primal[j] = v.max(0.0);
        }
    }
    let value = problem
        .objective
        .iter()
        .zip(&primal)
        .map(|(c, x)| c * x)
        .sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        primal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau<'a> {
    a: &'a DenseMatrix,
    /// Minimization costs for the structural variables.
    cost: Vec<f64>,
    /// Row signs making the right-hand side nonnegative.
    sign: Vec<f64>,
    b: Vec<f64>,
    n: usize,
    m: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<Vec<f64>>,
    xb: Vec<f64>,
    pivots_since_refactor: usize,
}

impl<'a> Tableau<'a> {
    fn new(p: &'a LpProblem) -> Self {
        let n = p.num_vars();
        let m = p.num_constraints();
        let cost = match p.sense {
            Sense::Min => p.objective.clone(),
            Sense::Max => p.objective.iter().map(|c| -c).collect(),
        };
        let sign: Vec<f64> = p
            .eq_rhs
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let b: Vec<f64> = p.eq_rhs.iter().map(|v| v.abs()).collect();
        let mut is_basic = vec![false; n + m];
        for flag in is_basic.iter_mut().skip(n) {
            *flag = true;
        }
        let binv = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            a: &p.eq_matrix,
            cost,
            sign,
            xb: b.clone(),
            b,
            n,
            m,
            basis: (n..n + m).collect(),
            is_basic,
            binv,
            pivots_since_refactor: 0,
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.n {
            (0..self.m).map(|r| self.sign[r] * self.a.get(r, j)).collect()
        } else {
            let mut e = vec![0.0; self.m];
            e[j - self.n] = 1.0;
            e
        }
    }

    fn phase_cost(&self, phase: Phase, j: usize) -> f64 {
        match (phase, j < self.n) {
            (Phase::One, true) => 0.0,
            (Phase::One, false) => 1.0,
            (Phase::Two, true) => self.cost[j],
            (Phase::Two, false) => 0.0,
        }
    }

    fn run(&mut self, phase: Phase) -> Result<Outcome> {
        let dual_tol = match phase {
            Phase::One => 1e-10,
            Phase::Two => 1e-10 * self.cost.iter().fold(1.0_f64, |m, c| m.max(c.abs())),
        };
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_ITERATIONS {
            // y = c_Bᵀ B⁻¹, folded with the row signs so that reduced costs
            // read straight from the original matrix
            let cb: Vec<f64> = self.basis.iter().map(|&j| self.phase_cost(phase, j)).collect();
            let ys: Vec<f64> = (0..self.m)
                .map(|k| {
                    self.sign[k] * (0..self.m).map(|r| cb[r] * self.binv[r][k]).sum::<f64>()
                })
                .collect();

            // Dantzig pricing; Bland's rule after a run of degenerate pivots
            let mut entering: Option<(usize, f64)> = None;
            for j in (0..self.n).filter(|&j| !self.is_basic[j]) {
                let dot: f64 = (0..self.m).map(|r| ys[r] * self.a.get(r, j)).sum();
                let d = self.phase_cost(phase, j) - dot;
                if d < -dual_tol && entering.is_none_or(|(_, best)| d < best) {
                    entering = Some((j, d));
                    if degenerate_run >= BLAND_AFTER {
                        break;
                    }
                }
            }
            let Some((j, _)) = entering else {
                self.refactor();
                return Ok(Outcome::Optimal);
            };

            let col = self.column(j);
            let u = self.ftran(&col);
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                if u[r] <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.xb[r].max(0.0) / u[r];
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        if ratio < bv - 1e-12
                            || (ratio <= bv + 1e-12 && self.basis[r] < self.basis[br])
                        {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
            let Some((r, step)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, j, &u);
        }
        Err(Error::Numerical(format!(
            "simplex did not terminate within {MAX_ITERATIONS} iterations"
        )))
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        self.binv
            .iter()
            .map(|row| row.iter().zip(col).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[f64]) {
        let p = u[r];
        for v in self.binv[r].iter_mut() {
            *v /= p;
        }
        self.xb[r] /= p;
        let pivot_row = self.binv[r].clone();
        let xr = self.xb[r];
        for k in 0..self.m {
            if k == r || u[k] == 0.0 {
                continue;
            }
            let f = u[k];
            for (v, pr) in self.binv[k].iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.xb[k] -= f * xr;
            if self.xb[k] < 0.0 && self.xb[k] > -1e-12 {
                self.xb[k] = 0.0;
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;

        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    fn refactor(&mut self) {
        self.pivots_since_refactor = 0;
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&j| self.column(j)).collect();
        let bmat: Vec<Vec<f64>> = (0..self.m)
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect();
        if let Some(inv) = invert(&bmat) {
            self.binv = inv;
            self.xb = self.ftran(&self.b.clone());
            for v in self.xb.iter_mut() {
                if *v < 0.0 && *v > -1e-12 {
                    *v = 0.0;
                }
            }
        }
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.n {
                continue;
            }
            let candidate = (0..self.n).find(|&j| {
                if self.is_basic[j] {
                    return false;
                }
                let col = self.column(j);
                let v: f64 = self.binv[r].iter().zip(&col).map(|(a, b)| a * b).sum();
                v.abs() > 1e-9
            });
            if let Some(j) = candidate {
                self.xb[r] = 0.0;
                let u = self.ftran(&self.column(j));
                self.pivot(r, j, &u);
            }
        }
    }
}
