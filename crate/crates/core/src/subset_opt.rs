//! Constrained subset selection over the subsets `B` that contain a fixed
//! index `i`: maximize or minimize `Σ_{k∈B} c_k`, optionally against a
//! threshold and optionally excluding the full index set.
//!
//! Three solvers share one query type: exhaustive enumeration (any signs),
//! an exact list dynamic program over quantized weights, and a trimming
//! FPTAS. The latter two require all-positive weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{check_atom_cap, full_mask, subset_sum, MAX_EVENTS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Direction {
    /// Largest sum `≤ t`.
    MaxBelow(f64),
    /// Smallest sum `≥ t`.
    MinAbove(f64),
    MaxAll,
    MinAll,
    /// Largest sum `< 0`.
    MaxNegative,
    /// Smallest sum `> 0`.
    MinPositive,
}

impl Direction {
    fn accepts(self, s: f64) -> bool {
        match self {
            Direction::MaxBelow(t) => s <= t,
            Direction::MinAbove(t) => s >= t,
            Direction::MaxAll | Direction::MinAll => true,
            Direction::MaxNegative => s < 0.0,
            Direction::MinPositive => s > 0.0,
        }
    }

    fn maximizes(self) -> bool {
        matches!(
            self,
            Direction::MaxBelow(_) | Direction::MaxAll | Direction::MaxNegative
        )
    }
}

/// Search over `{B : i ∈ B}` (minus the full set when requested).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionQuery<'a> {
    c: &'a [f64],
    i: usize,
    direction: Direction,
    exclude_full_set: bool,
}

impl<'a> SelectionQuery<'a> {
    pub fn new(c: &'a [f64], i: usize, direction: Direction) -> Result<Self> {
        if c.is_empty() || c.len() > MAX_EVENTS {
            return Err(Error::Argument(format!(
                "selection needs 1..={MAX_EVENTS} weights, got {}",
                c.len()
            )));
        }
        if i >= c.len() {
            return Err(Error::Argument(format!(
                "mandatory index {i} out of range for {} weights",
                c.len()
            )));
        }
        if let Direction::MaxBelow(t) | Direction::MinAbove(t) = direction {
            if !t.is_finite() {
                return Err(Error::Argument("selection threshold must be finite".into()));
            }
        }
        Ok(Self {
            c,
            i,
            direction,
            exclude_full_set: false,
        })
    }

    /// Restricts the search to proper subsets.
    pub fn excluding_full_set(mut self) -> Self {
        self.exclude_full_set = true;
        self
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    fn full(&self) -> u64 {
        full_mask(self.n())
    }

    fn others(&self) -> Vec<usize> {
        (0..self.n()).filter(|&k| k != self.i).collect()
    }

    fn require_positive(&self) -> Result<()> {
        if self.c.iter().all(|&v| v > 0.0) {
            Ok(())
        } else {
            Err(Error::Argument(
                "this solver requires all-positive weights".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetSelection {
    pub mask: u64,
    /// `Σ_{k∈B} c_k`, summed in increasing index order.
    pub weight_sum: f64,
    pub exact: bool,
    /// FPTAS accuracy parameter.
    pub epsilon: Option<f64>,
    /// Quantization step of the dynamic program.
    pub resolution: Option<f64>,
}

impl SubsetSelection {
    pub fn contains(&self, k: usize) -> bool {
        self.mask >> k & 1 == 1
    }
}

/// Exact optimum by enumerating all `2^(n−1)` subsets containing `i`.
/// Ties go to the smallest mask.
pub fn select_exhaustive(q: &SelectionQuery<'_>) -> Result<SubsetSelection> {
    check_atom_cap(q.n())?;
    let bit_i = 1u64 << q.i;
    let rest = q.full() & !bit_i;
    let full = q.full();
    let maximize = q.direction.maximizes();
    let mut best: Option<(u64, f64)> = None;

    // submasks of `rest` in increasing order, so strict improvement keeps
    // the smallest mask on ties
    let mut sub = 0u64;
    loop {
        let mask = sub | bit_i;
        if !(q.exclude_full_set && mask == full) {
            let s = subset_sum(q.c, mask);
            if q.direction.accepts(s) {
                let improves = match best {
                    None => true,
                    Some((_, b)) => {
                        if maximize {
                            s > b
                        } else {
                            s < b
                        }
                    }
                };
                if improves {
                    best = Some((mask, s));
                }
            }
        }
        if sub == rest {
            break;
        }
        sub = (sub.wrapping_sub(rest)) & rest;
    }

    best.map(|(mask, weight_sum)| SubsetSelection {
        mask,
        weight_sum,
        exact: true,
        epsilon: None,
        resolution: None,
    })
    .ok_or(Error::NoFeasibleSubset)
}

/// Exact list dynamic program on weights quantized to multiples of
/// `resolution`, for all-positive weights and threshold directions.
///
/// States are distinct quantized partial sums, so the work is
/// `O(n · min(2^n, Σc / resolution))`. `MinAbove(t)` is solved through the
/// complement: maximize `Σ_{k∈B'} c_k ≤ Σc − t` over `B' ∌ i` and return
/// the complement of `B'`. Candidates are ranked on their unquantized sums.
pub fn select_dp(q: &SelectionQuery<'_>, resolution: f64) -> Result<SubsetSelection> {
    q.require_positive()?;
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::Argument("resolution must be positive".into()));
    }
    let (t, complement) = match q.direction {
        Direction::MaxBelow(t) => (t, false),
        Direction::MinAbove(t) => (t, true),
        other => {
            return Err(Error::Argument(format!(
                "dynamic program supports threshold directions only, got {other:?}"
            )))
        }
    };
    let others = q.others();
    let mut quantized = Vec::with_capacity(others.len());
    for &k in &others {
        let units = q.c[k] / resolution;
        if units >= 2f64.powi(52) {
            return Err(Error::Argument(format!(
                "weight {} is too large for resolution {resolution}",
                q.c[k]
            )));
        }
        let units = units.round() as u64;
        if units == 0 {
            return Err(Error::ResolutionTooCoarse(resolution));
        }
        quantized.push(units);
    }

    let total: f64 = subset_sum(q.c, q.full());
    let budget = if complement { total - t } else { t - q.c[q.i] };
    let slack = others.len() as f64;
    let cap_units = budget / resolution + slack;
    if cap_units < 0.0 {
        return Err(Error::NoFeasibleSubset);
    }
    let cap = cap_units.floor() as u64;

    let mut list: Vec<Entry> = vec![Entry { units: 0, real: 0.0, mask: 0 }];
    for (&k, &units) in others.iter().zip(&quantized) {
        let shifted: Vec<Entry> = list
            .iter()
            .map(|e| Entry {
                units: e.units + units,
                real: e.real + q.c[k],
                mask: e.mask | 1u64 << k,
            })
            .filter(|e| e.units <= cap)
            .collect();
        list = merge_dedup(&list, &shifted);
    }

    let bit_i = 1u64 << q.i;
    let full = q.full();
    let mut best: Option<(u64, f64)> = None;
    let mut near_miss = false;
    for &Entry { mask: m, .. } in &list {
        let mask = if complement { full & !m } else { m | bit_i };
        if q.exclude_full_set && mask == full {
            continue;
        }
        let s = subset_sum(q.c, mask);
        if !q.direction.accepts(s) {
            if (s - t).abs() <= slack * resolution {
                near_miss = true;
            }
            continue;
        }
        let improves = match best {
            None => true,
            Some((bm, bs)) => {
                let better = if complement { s < bs } else { s > bs };
                better || (s == bs && mask < bm)
            }
        };
        if improves {
            best = Some((mask, s));
        }
    }
    match best {
        Some((mask, weight_sum)) => Ok(SubsetSelection {
            mask,
            weight_sum,
            exact: true,
            epsilon: None,
            resolution: Some(resolution),
        }),
        None if near_miss => Err(Error::ResolutionTooCoarse(resolution)),
        None => Err(Error::NoFeasibleSubset),
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    units: u64,
    real: f64,
    mask: u64,
}

impl Entry {
    fn precedes(&self, other: &Entry) -> bool {
        (self.real, self.mask) < (other.real, other.mask)
    }
}

/// Merges two lists sorted by quantized sum. Within a quantized sum the
/// entry with the smallest real sum is kept (then the smallest mask), so the
/// optimum of either threshold direction is lost by at most the total
/// rounding error and never crosses to the infeasible side.
fn merge_dedup(a: &[Entry], b: &[Entry]) -> Vec<Entry> {
    let mut out: Vec<Entry> = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        let next = if y >= b.len() || (x < a.len() && a[x].units <= b[y].units) {
            x += 1;
            a[x - 1]
        } else {
            y += 1;
            b[y - 1]
        };
        match out.last_mut() {
            Some(last) if last.units == next.units => {
                if next.precedes(last) {
                    *last = next;
                }
            }
            _ => out.push(next),
        }
    }
    out
}

/// Trimmed-list approximation for all-positive weights.
///
/// For `MaxBelow` the result satisfies `(1−ε)·OPT ≤ sum ≤ OPT`; for
/// `MinAbove`, `OPT ≤ sum ≤ (1+ε)·OPT`. Each list is trimmed with
/// `δ = ε / 2m` over the `m` optional items, keeping the lower
/// representative of each cluster when maximizing and the upper one when
/// minimizing, so representatives stay on the feasible side.
pub fn select_fptas(q: &SelectionQuery<'_>, epsilon: f64) -> Result<SubsetSelection> {
    q.require_positive()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Argument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let bit_i = 1u64 << q.i;
    let full = q.full();
    let others = q.others();
    let ci = q.c[q.i];
    let total = subset_sum(q.c, full);
    // absorbs rounding in the incremental sums
    let slack = |t: f64| 1e-12 * (t.abs() + total);

    let mask = match q.direction {
        Direction::MaxBelow(t) => {
            if q.exclude_full_set && total <= t {
                if others.is_empty() {
                    return Err(Error::NoFeasibleSubset);
                }
                // every proper subset fits; drop the lightest optional item,
                // the highest index among ties for the smallest mask
                let drop = others
                    .iter()
                    .copied()
                    .min_by(|&a, &b| q.c[a].total_cmp(&q.c[b]).then(b.cmp(&a)))
                    .expect("nonempty");
                full & !(1u64 << drop)
            } else {
                let (_, m) = fptas_max_below(q.c, &others, t - ci + slack(t), epsilon)
                    .ok_or(Error::NoFeasibleSubset)?;
                m | bit_i
            }
        }
        Direction::MinAbove(t) => {
            let budget = t - ci - slack(t);
            if budget <= 0.0 && !(q.exclude_full_set && others.is_empty()) {
                bit_i
            } else {
                let found = fptas_min_above(q.c, &others, budget, epsilon).map(|(_, m)| m | bit_i);
                match found {
                    Some(m) if q.exclude_full_set && m == full => {
                        // re-solve with each optional item forced out
                        others
                            .iter()
                            .filter_map(|&j| {
                                let items: Vec<usize> =
                                    others.iter().copied().filter(|&k| k != j).collect();
                                fptas_min_above(q.c, &items, budget, epsilon)
                                    .map(|(_, m)| m | bit_i)
                            })
                            .min_by(|&a, &b| {
                                subset_sum(q.c, a)
                                    .total_cmp(&subset_sum(q.c, b))
                                    .then(a.cmp(&b))
                            })
                            .ok_or(Error::NoFeasibleSubset)?
                    }
                    Some(m) => m,
                    None => return Err(Error::NoFeasibleSubset),
                }
            }
        }
        other => {
            return Err(Error::Argument(format!(
                "FPTAS supports threshold directions only, got {other:?}"
            )))
        }
    };
    Ok(SubsetSelection {
        mask,
        weight_sum: subset_sum(q.c, mask),
        exact: false,
        epsilon: Some(epsilon),
        resolution: None,
    })
}

fn merged_with(list: &[(f64, u64)], c: &[f64], k: usize) -> Vec<(f64, u64)> {
    let shifted: Vec<(f64, u64)> = list.iter().map(|&(s, m)| (s + c[k], m | 1u64 << k)).collect();
    let mut out = Vec::with_capacity(list.len() * 2);
    let (mut x, mut y) = (0, 0);
    while x < list.len() || y < shifted.len() {
        let take_left = y >= shifted.len()
            || (x < list.len()
                && (list[x].0 < shifted[y].0
                    || (list[x].0 == shifted[y].0 && list[x].1 <= shifted[y].1)));
        if take_left {
            out.push(list[x]);
            x += 1;
        } else {
            out.push(shifted[y]);
            y += 1;
        }
    }
    out
}

fn fptas_max_below(c: &[f64], items: &[usize], budget: f64, epsilon: f64) -> Option<(f64, u64)> {
    if budget < 0.0 {
        return None;
    }
    let delta = epsilon / (2.0 * items.len().max(1) as f64);
    let mut list = vec![(0.0, 0u64)];
    for &k in items {
        let merged = merged_with(&list, c, k);
        list.clear();
        for e in merged.into_iter().filter(|e| e.0 <= budget) {
            match list.last() {
                Some(&(last, _)) if e.0 <= last * (1.0 + delta) => {}
                _ => list.push(e),
            }
        }
    }
    list.last().copied()
}

fn fptas_min_above(c: &[f64], items: &[usize], budget: f64, epsilon: f64) -> Option<(f64, u64)> {
    let delta = epsilon / (2.0 * items.len().max(1) as f64);
    let mut list = vec![(0.0, 0u64)];
    for &k in items {
        let merged = merged_with(&list, c, k);
        let mut kept: Vec<(f64, u64)> = Vec::with_capacity(merged.len());
        for e in merged.into_iter().rev() {
            match kept.last() {
                Some(&(last, _)) if e.0 * (1.0 + delta) >= last => {}
                _ => kept.push(e),
            }
        }
        kept.reverse();
        list = kept;
    }
    list.into_iter().find(|e| e.0 >= budget)
}
