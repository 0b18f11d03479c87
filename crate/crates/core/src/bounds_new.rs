//! The weighted lower-bound classes `lnew3(c)` and `lnew4(c)` and the upper
//! bounds `unew4(c)`, `unew5(c)`.
//!
//! For event `i`, `ℓ_i(c)` minimizes `Σ_{B∋i} c_i p_B / s_B` subject to
//! `Σ p_B = α_i` and `Σ (s_B/c_i) p_B = γ_i(c)/c_i`, where `s_B = Σ_{k∈B} c_k`.
//! Its value is the lower convex envelope of `r ↦ 1/r` over the attainable
//! ratios `r_B = s_B/c_i`, evaluated at `b = γ_i(c)/(c_i α_i)` and scaled by
//! `α_i`; the envelope is a chord between two ratios `b1`, `b2`.

use serde::{Deserialize, Serialize};

use crate::bounds_classic::BoundValue;
use crate::error::{Error, Result};
use crate::space::{full_mask, subset_sum, PartialInfo, WeightVector};
use crate::subset_opt::{
    select_dp, select_exhaustive, select_fptas, Direction, SelectionQuery, SubsetSelection,
};

/// Relative tolerance for pulling a target ratio back into the attainable range.
const RANGE_TOL: f64 = 1e-9;

/// How the subset selections are solved for all-positive weights. Mixed
/// signs always use enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    /// Quantized dynamic program. The selected sums are widened by the
    /// worst-case quantization error so the result stays a lower bound.
    Dp { resolution: f64 },
    /// Trimmed-list approximation with the guaranteed lower correction.
    Fptas { epsilon: f64 },
}

impl Mode {
    fn describe(self) -> String {
        match self {
            Mode::Exact => "exact".into(),
            Mode::Dp { resolution } => format!("dp(resolution={resolution:e})"),
            Mode::Fptas { epsilon } => format!("fptas(epsilon={epsilon:e})"),
        }
    }
}

/// Which branch of the envelope produced `ℓ_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventCase {
    /// `α_i` (or the residual mass) is zero.
    Zero,
    /// `b ≥ 0` with some negative ratio: chord from the largest negative
    /// ratio to the largest ratio.
    NonnegativeMixed,
    /// All ratios positive: the tightest bracket around `b`.
    Bracket,
    /// `b` below the largest negative ratio: chord from the smallest ratio.
    NegativeBelow,
    /// `b < 0` at or above the largest negative ratio.
    NegativeAbove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerEventSolution {
    pub i: usize,
    /// Target ratio, after clamping into the attainable range.
    pub b: f64,
    pub b1: f64,
    pub b2: f64,
    pub selections: Vec<SubsetSelection>,
    pub ell: f64,
    pub case: EventCase,
}

impl PerEventSolution {
    fn zero(i: usize) -> Self {
        Self {
            i,
            b: f64::NAN,
            b1: f64::NAN,
            b2: f64::NAN,
            selections: Vec::new(),
            ell: 0.0,
            case: EventCase::Zero,
        }
    }
}

/// `mass · (1/b1 + 1/b2 − b/(b1 b2))`.
pub fn chord(mass: f64, b: f64, b1: f64, b2: f64) -> f64 {
    mass * (1.0 / b1 + 1.0 / b2 - b / (b1 * b2))
}

fn check_index(info: &PartialInfo, i: usize) -> Result<()> {
    if i < info.n() {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "event index {i} out of range for {} events",
            info.n()
        )))
    }
}

fn select(q: &SelectionQuery<'_>, mode: Mode) -> Result<SubsetSelection> {
    match mode {
        Mode::Exact => select_exhaustive(q),
        Mode::Dp { resolution } => select_dp(q, resolution),
        Mode::Fptas { epsilon } => select_fptas(q, epsilon),
    }
}

/// Brackets the target sum `t ∈ [c_i, max]` for positive weights and
/// returns the two selections with the sums to use in the chord. In the
/// inexact modes the sums are moved toward `t`, which can only lower the
/// chord value.
fn positive_bracket(
    c: &[f64],
    i: usize,
    t: f64,
    mode: Mode,
    exclude_full: bool,
) -> Result<(SubsetSelection, SubsetSelection, f64, f64)> {
    let query = |d| {
        let q = SelectionQuery::new(c, i, d)?;
        Ok::<_, Error>(if exclude_full { q.excluding_full_set() } else { q })
    };
    let sel1 = select(&query(Direction::MaxBelow(t))?, mode)?;
    let sel2 = select(&query(Direction::MinAbove(t))?, mode)?;
    let (s1, s2) = match mode {
        Mode::Exact => (sel1.weight_sum, sel2.weight_sum),
        Mode::Dp { resolution } => {
            let slack = c.len() as f64 * resolution;
            (
                (sel1.weight_sum + slack).min(t),
                (sel2.weight_sum - slack).max(t),
            )
        }
        Mode::Fptas { epsilon } => (
            (sel1.weight_sum / (1.0 - epsilon)).min(t),
            (sel2.weight_sum / (1.0 + epsilon)).max(t),
        ),
    };
    Ok((sel1, sel2, s1, s2))
}

/// Pulls `v` into `[lo, hi]` when it lies outside by at most `tol`.
fn clamp_within(v: f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    if v < lo - tol || v > hi + tol {
        None
    } else {
        Some(v.clamp(lo, hi))
    }
}

/// `ℓ_i(c)`.
pub fn ell_i(info: &PartialInfo, w: &WeightVector, i: usize, mode: Mode) -> Result<PerEventSolution> {
    w.require_len(info.n())?;
    w.require_valid()?;
    check_index(info, i)?;
    let c = w.c();
    let (a, ci, g) = (info.alpha()[i], c[i], info.gamma(c, i));
    if a.abs() < 1e-15 {
        let scale: f64 = c.iter().map(|v| v.abs()).sum();
        if g.abs() <= 1e-12 * scale.max(1.0) {
            return Ok(PerEventSolution::zero(i));
        }
        return Err(Error::InconsistentInfo(format!(
            "event {i} has zero mass but gamma_{i}(c) = {g}"
        )));
    }
    if w.is_all_positive() {
        let total = w.sum();
        let t = clamp_within(g / a, ci, total, RANGE_TOL * total).ok_or_else(|| {
            Error::InconsistentInfo(format!(
                "gamma_{i}(c)/alpha_{i} = {} lies outside [{ci}, {total}]",
                g / a
            ))
        })?;
        let (sel1, sel2, s1, s2) = positive_bracket(c, i, t, mode, false)?;
        return Ok(PerEventSolution {
            i,
            b: t / ci,
            b1: s1 / ci,
            b2: s2 / ci,
            selections: vec![sel1, sel2],
            ell: chord(a, t, s1, s2) * ci,
            case: EventCase::Bracket,
        });
    }
    mixed_ell_i(c, i, a, g / (ci * a))
}

/// Enumeration path for weights with negative entries. Ratios are
/// `s_B / c_i`, so a negative `c_i` swaps the roles of the sum extremes.
fn mixed_ell_i(c: &[f64], i: usize, a: f64, b: f64) -> Result<PerEventSolution> {
    let ci = c[i];
    let flip = ci < 0.0;
    let pick = |d| -> Result<(SubsetSelection, f64)> {
        let s = select_exhaustive(&SelectionQuery::new(c, i, d)?)?;
        Ok((s, s.weight_sum / ci))
    };
    let (max_sel, rmax) = pick(if flip { Direction::MinAll } else { Direction::MaxAll })?;
    let (min_sel, rmin) = pick(if flip { Direction::MaxAll } else { Direction::MinAll })?;
    let tol = RANGE_TOL * (1.0 + rmax.abs().max(rmin.abs()));
    let b = clamp_within(b, rmin, rmax, tol).ok_or_else(|| {
        Error::InconsistentInfo(format!(
            "ratio b = {b} for event {i} lies outside [{rmin}, {rmax}]"
        ))
    })?;

    let (case, sel1, sel2, b1, b2) = if rmin > 0.0 {
        let (d1, d2) = if flip {
            (Direction::MinAbove(b * ci), Direction::MaxBelow(b * ci))
        } else {
            (Direction::MaxBelow(b * ci), Direction::MinAbove(b * ci))
        };
        let (s1, b1) = pick(d1)?;
        let (s2, b2) = pick(d2)?;
        (EventCase::Bracket, s1, s2, b1, b2)
    } else {
        let (neg_sel, r_neg) = pick(if flip {
            Direction::MinPositive
        } else {
            Direction::MaxNegative
        })?;
        if b >= r_neg {
            if b >= 0.0 {
                (EventCase::NonnegativeMixed, neg_sel, max_sel, r_neg, rmax)
            } else {
                (EventCase::NegativeAbove, max_sel, neg_sel, rmax, r_neg)
            }
        } else {
            (EventCase::NegativeBelow, neg_sel, min_sel, r_neg, rmin)
        }
    };
    Ok(PerEventSolution {
        i,
        b,
        b1,
        b2,
        selections: vec![sel1, sel2],
        ell: chord(a, b, b1, b2),
        case,
    })
}

/// All per-event solutions of `lnew3`.
pub fn lnew3_terms(info: &PartialInfo, w: &WeightVector, mode: Mode) -> Result<Vec<PerEventSolution>> {
    (0..info.n()).map(|i| ell_i(info, w, i, mode)).collect()
}

/// `lnew3(c) = Σ_i ℓ_i(c)`. In inexact modes this is a guaranteed lower
/// approximation of the exact value.
pub fn lnew3(info: &PartialInfo, w: &WeightVector, mode: Mode) -> Result<BoundValue> {
    let value = lnew3_terms(info, w, mode)?.iter().map(|s| s.ell).sum();
    Ok(BoundValue::lower("lnew3", value, Some(w)).with_note(mode.describe()))
}

/// Lower bound on the full-intersection mass and the upper end of the
/// window of admissible values for it, both from the global `min c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub value: f64,
    pub upper_limit: f64,
}

/// `δ̃ = max_i [(γ_i − (Σc − min c) α_i) / min c]⁺` with the window end
/// `min_i (γ_i − (min c) α_i) / (Σc − min c)`.
pub fn delta_tilde(info: &PartialInfo, w: &WeightVector) -> Result<Delta> {
    w.require_len(info.n())?;
    w.require_positive()?;
    let c = w.c();
    let (m, total) = (w.min(), w.sum());
    let alpha = info.alpha();
    if info.n() == 1 {
        return Ok(Delta {
            value: alpha[0],
            upper_limit: alpha[0],
        });
    }
    let mut value = 0.0f64;
    let mut upper = f64::INFINITY;
    for i in 0..info.n() {
        let g = info.gamma(c, i);
        value = value.max((g - (total - m) * alpha[i]) / m);
        upper = upper.min((g - m * alpha[i]) / (total - m));
    }
    if value > upper + 1e-9 {
        return Err(Error::InconsistentInfo(format!(
            "full-intersection window is empty: {value} > {upper}"
        )));
    }
    Ok(Delta {
        value,
        upper_limit: upper,
    })
}

/// Largest proper-subset sum containing `i`: `Σc − min_{k≠i} c_k`, summed
/// the same way the subset solvers sum it.
fn max_proper_sum(c: &[f64], i: usize) -> f64 {
    let lightest = (0..c.len())
        .filter(|&k| k != i)
        .min_by(|&a, &b| c[a].total_cmp(&c[b]))
        .expect("at least two events");
    subset_sum(c, full_mask(c.len()) & !(1u64 << lightest))
}

/// The exact range of full-intersection masses `x` for which every
/// per-event problem over proper subsets is feasible. Event `i` needs
/// `c_i ≤ (γ_i − Σc·x)/(α_i − x) ≤ Σc − min_{k≠i} c_k`, which is tighter
/// than the global-`min c` window of [`delta_tilde`] whenever `i` is the
/// unique lightest event.
pub fn feasibility_window(info: &PartialInfo, w: &WeightVector) -> Result<(f64, f64)> {
    w.require_len(info.n())?;
    w.require_positive()?;
    let c = w.c();
    let alpha = info.alpha();
    let total = w.sum();
    if info.n() == 1 {
        return Ok((alpha[0], alpha[0]));
    }
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for i in 0..info.n() {
        let g = info.gamma(c, i);
        let top = max_proper_sum(c, i);
        lo = lo.max((g - top * alpha[i]) / (total - top));
        hi = hi.min((g - c[i] * alpha[i]) / (total - c[i]));
    }
    if lo > hi + 1e-9 {
        return Err(Error::InconsistentInfo(format!(
            "full-intersection window is empty: [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi.max(lo)))
}

/// `ℓ′_i(c, x)`: the per-event problem with the full-intersection mass
/// fixed at `x` and selections restricted to proper subsets.
pub fn ell_i_prime(
    info: &PartialInfo,
    w: &WeightVector,
    i: usize,
    x: f64,
    mode: Mode,
) -> Result<PerEventSolution> {
    w.require_len(info.n())?;
    w.require_positive()?;
    check_index(info, i)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InfeasibleX { i, x });
    }
    let c = w.c();
    let total = w.sum();
    let ci = c[i];
    let mass = info.alpha()[i] - x;
    let num = info.gamma(c, i) - total * x;
    let tol = 1e-9 * total;
    if mass <= 1e-12 {
        if mass < -1e-12 {
            return Err(Error::InfeasibleX { i, x });
        }
        if num.abs() <= tol {
            return Ok(PerEventSolution::zero(i));
        }
        return Err(Error::InconsistentInfo(format!(
            "event {i} has no residual mass at x = {x} but weighted residual {num}"
        )));
    }
    if info.n() == 1 {
        return Err(Error::InfeasibleX { i, x });
    }
    let top = max_proper_sum(c, i);
    if num - ci * mass < -tol || top * mass - num < -tol {
        return Err(Error::InfeasibleX { i, x });
    }
    let t = (num / mass).clamp(ci, top.max(ci));
    let (sel1, sel2, s1, s2) = positive_bracket(c, i, t, mode, true)?;
    Ok(PerEventSolution {
        i,
        b: t / ci,
        b1: s1 / ci,
        b2: s2 / ci,
        selections: vec![sel1, sel2],
        ell: chord(mass, t, s1, s2) * ci,
        case: EventCase::Bracket,
    })
}

/// `x + Σ_i ℓ′_i(c, x)`.
pub fn lnew4_objective(info: &PartialInfo, w: &WeightVector, x: f64, mode: Mode) -> Result<f64> {
    let mut value = x;
    for i in 0..info.n() {
        value += ell_i_prime(info, w, i, x, mode)?.ell;
    }
    Ok(value)
}

/// `lnew4(c)`: the objective is non-decreasing in `x`, so it is evaluated at
/// the left end of [`feasibility_window`].
pub fn lnew4(info: &PartialInfo, w: &WeightVector, mode: Mode) -> Result<BoundValue> {
    let (x, _) = feasibility_window(info, w)?;
    let value = lnew4_objective(info, w, x, mode)?;
    Ok(BoundValue::lower("lnew4", value, Some(w))
        .with_note(mode.describe())
        .with_note(format!("x={x:e}")))
}

/// `(1/min c + 1/Σc)·Σ c_i α_i − cᵀΣc / (min c · Σc)`.
pub fn unew4(info: &PartialInfo, w: &WeightVector) -> Result<BoundValue> {
    w.require_len(info.n())?;
    w.require_positive()?;
    let c = w.c();
    let (m, total) = (w.min(), w.sum());
    let value =
        (1.0 / m + 1.0 / total) * info.weighted_alpha(c) - info.quadratic(c) / (m * total);
    Ok(BoundValue::upper("unew4", value, Some(w)))
}

/// The `unew4` construction with the full-intersection mass split off and
/// maximized over its window.
pub fn unew5(info: &PartialInfo, w: &WeightVector) -> Result<BoundValue> {
    w.require_len(info.n())?;
    w.require_positive()?;
    if info.n() < 2 {
        return Err(Error::DegenerateWeights(
            "unew5 needs at least two events".into(),
        ));
    }
    let c = w.c();
    let (m, total) = (w.min(), w.sum());
    let rest = total - m;
    let x_max = (0..info.n())
        .map(|i| (info.gamma(c, i) - m * info.alpha()[i]) / rest)
        .fold(f64::INFINITY, f64::min);
    let value = x_max + (1.0 / m + 1.0 / rest) * info.weighted_alpha(c)
        - info.quadratic(c) / (m * rest);
    Ok(BoundValue::upper("unew5", value, Some(w)))
}
