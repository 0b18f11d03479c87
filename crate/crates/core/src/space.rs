//! Finite probability spaces at atom granularity.
//!
//! The atom `ω_B` holds the outcomes lying in exactly the events indexed by
//! `B`. Atoms are addressed by bitmask, bit `i` set when event `i` (0-based)
//! contains the atom, so `|B|` is a popcount. The complement atom `ω_∅`
//! is never stored; it carries `1 − Σ p_B`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg_lp::DenseMatrix;

/// Default cap on `n` for atom-level representations.
pub const DEFAULT_ATOM_CAP: usize = 24;

/// Hard limit imposed by 64-bit masks.
pub const MAX_EVENTS: usize = 63;

/// Tolerance for the partial-information invariants.
pub const INFO_TOL: f64 = 1e-12;

/// Subset sums within this distance of zero violate the nonzero-sum condition.
pub const ZERO_SUM_TOL: f64 = 1e-12;

/// Cap on `n` for atom-level work. `UB_MAX_N` overrides the default; values
/// above 24 can exhaust memory.
pub fn atom_event_cap() -> usize {
    std::env::var("UB_MAX_N")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(DEFAULT_ATOM_CAP, |v| v.clamp(1, MAX_EVENTS))
}

pub(crate) fn check_atom_cap(n: usize) -> Result<()> {
    let max = atom_event_cap();
    if n > max {
        Err(Error::TooManyEvents { n, max })
    } else {
        Ok(())
    }
}

#[inline]
pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the indices of set bits in increasing order.
pub fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// `Σ_{k∈B} c_k`, summed in increasing index order.
#[inline]
pub fn subset_sum(c: &[f64], mask: u64) -> f64 {
    bits(mask).map(|k| c[k]).sum()
}

/// Full atom-level distribution over the nonempty subsets of `{0..n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSpace {
    n: usize,
    /// Nonzero atoms sorted by mask.
    atoms: Vec<(u64, f64)>,
}

impl EventSpace {
    pub fn new(n: usize, atoms: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("an event space needs at least one event".into()));
        }
        check_atom_cap(n)?;
        let full = full_mask(n);
        let mut list: Vec<(u64, f64)> = Vec::new();
        for (mask, p) in atoms {
            if mask == 0 || mask > full {
                return Err(Error::Argument(format!(
                    "atom mask {mask} is not a nonempty subset of {n} events"
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Argument(format!(
                    "atom {mask} has invalid probability {p}"
                )));
            }
            list.push((mask, p));
        }
        list.sort_by_key(|&(m, _)| m);
        if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Argument(format!("atom {} listed twice", w[0].0)));
        }
        list.retain(|&(_, p)| p > 0.0);
        let total: f64 = list.iter().map(|&(_, p)| p).sum();
        if total > 1.0 + INFO_TOL {
            return Err(Error::Argument(format!(
                "atom probabilities sum to {total} > 1"
            )));
        }
        Ok(Self { n, atoms: list })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nonzero atoms `(mask, p_B)` in increasing mask order.
    pub fn atoms(&self) -> &[(u64, f64)] {
        &self.atoms
    }

    pub fn prob(&self, mask: u64) -> f64 {
        self.atoms
            .binary_search_by_key(&mask, |&(m, _)| m)
            .map_or(0.0, |idx| self.atoms[idx].1)
    }

    /// Mass of the complement atom `ω_∅`.
    pub fn complement_prob(&self) -> f64 {
        (1.0 - exact_union(self)).max(0.0)
    }
}

/// `P(∪ A_i) = Σ_B p_B`.
pub fn exact_union(space: &EventSpace) -> f64 {
    space.atoms.iter().map(|&(_, p)| p).sum()
}

/// Event probabilities and the symmetric matrix of pairwise intersections.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialInfo {
    alpha: Vec<f64>,
    pairwise: DenseMatrix,
}

impl PartialInfo {
    /// Validates and wraps `α` and the pairwise matrix. Error messages name
    /// the offending entry.
    pub fn new(alpha: Vec<f64>, pairwise: DenseMatrix) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::InvalidInfo("no events".into()));
        }
        if n > MAX_EVENTS {
            return Err(Error::TooManyEvents { n, max: MAX_EVENTS });
        }
        if pairwise.rows() != n || pairwise.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "pairwise matrix is {}x{} for {n} events",
                pairwise.rows(),
                pairwise.cols()
            )));
        }
        for (i, &a) in alpha.iter().enumerate() {
            if !a.is_finite() || a < -INFO_TOL || a > 1.0 + INFO_TOL {
                return Err(Error::InvalidInfo(format!(
                    "alpha[{i}] = {a} is not a probability"
                )));
            }
        }
        for i in 0..n {
            if (pairwise.get(i, i) - alpha[i]).abs() > INFO_TOL {
                return Err(Error::InvalidInfo(format!(
                    "diagonal entry ({i},{i}) = {} differs from alpha[{i}] = {}",
                    pairwise.get(i, i),
                    alpha[i]
                )));
            }
            for j in (i + 1)..n {
                let (pij, pji) = (pairwise.get(i, j), pairwise.get(j, i));
                if (pij - pji).abs() > INFO_TOL {
                    return Err(Error::InvalidInfo(format!(
                        "pairwise matrix is not symmetric at ({i},{j}): {pij} vs {pji}"
                    )));
                }
                if pij < -INFO_TOL || pij > alpha[i].min(alpha[j]) + INFO_TOL {
                    return Err(Error::InvalidInfo(format!(
                        "pairwise ({i},{j}) = {pij} is outside [0, min(alpha[{i}], alpha[{j}])]"
                    )));
                }
            }
        }
        Ok(Self { alpha, pairwise })
    }

    pub fn from_rows(alpha: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(alpha, DenseMatrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn pairwise(&self) -> &DenseMatrix {
        &self.pairwise
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.pairwise.get(i, j)
    }

    /// `γ_i(c) = Σ_k c_k P(A_i ∩ A_k)`, including `k = i`.
    pub fn gamma(&self, c: &[f64], i: usize) -> f64 {
        self.pairwise.row(i).iter().zip(c).map(|(p, ck)| ck * p).sum()
    }

    /// `Σ_i c_i α_i`.
    pub fn weighted_alpha(&self, c: &[f64]) -> f64 {
        self.alpha.iter().zip(c).map(|(a, ck)| a * ck).sum()
    }

    /// `Σ_i Σ_k c_i c_k P(A_i ∩ A_k)`.
    pub fn quadratic(&self, c: &[f64]) -> f64 {
        self.pairwise.quadratic_form(c)
    }

    /// Largest absolute entrywise difference to another instance.
    pub fn max_abs_diff(&self, other: &PartialInfo) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        let a = self
            .alpha
            .iter()
            .zip(&other.alpha)
            .map(|(x, y)| (x - y).abs());
        let p = self
            .pairwise
            .as_slice()
            .iter()
            .zip(other.pairwise.as_slice())
            .map(|(x, y)| (x - y).abs());
        a.chain(p).fold(0.0, f64::max)
    }
}

/// `γ_i(c)` as a free function.
pub fn gamma(info: &PartialInfo, w: &WeightVector, i: usize) -> f64 {
    info.gamma(w.c(), i)
}

/// `α_i = Σ_{B∋i} p_B` and `P(A_i ∩ A_j) = Σ_{B⊇{i,j}} p_B`.
pub fn derive_partial_info(space: &EventSpace) -> PartialInfo {
    let n = space.n;
    let mut m = DenseMatrix::zeros(n, n);
    let mut members = Vec::with_capacity(n);
    for &(mask, p) in &space.atoms {
        members.clear();
        members.extend(bits(mask));
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a..] {
                m.set(i, j, m.get(i, j) + p);
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            m.set(j, i, m.get(i, j));
        }
    }
    let alpha = (0..n).map(|i| m.get(i, i)).collect();
    PartialInfo::new(alpha, m).expect("atom sums satisfy the partial-information invariants")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightClass {
    AllPositive,
    MixedSignValid,
    Invalid,
}

/// A weight vector `c` with its nonzero-subset-sum classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    c: Vec<f64>,
    class: WeightClass,
}

impl WeightVector {
    /// Classifies `c`. Vectors that are neither all-positive nor all-negative
    /// are checked by enumerating every subset sum, so their length is
    /// bounded by the atom cap.
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Argument("empty weight vector".into()));
        }
        if c.len() > MAX_EVENTS {
            return Err(Error::TooManyEvents {
                n: c.len(),
                max: MAX_EVENTS,
            });
        }
        if let Some(i) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("weight c[{i}] is not finite")));
        }
        let class = if c.iter().all(|&v| v > 0.0) {
            WeightClass::AllPositive
        } else if c.iter().all(|&v| v < -ZERO_SUM_TOL) {
            WeightClass::MixedSignValid
        } else if c.iter().any(|v| v.abs() <= ZERO_SUM_TOL) {
            WeightClass::Invalid
        } else {
            check_atom_cap(c.len())?;
            if has_zero_subset_sum(&c) {
                WeightClass::Invalid
            } else {
                WeightClass::MixedSignValid
            }
        };
        Ok(Self { c, class })
    }

    pub fn ones(n: usize) -> Self {
        Self::scaled_ones(n, 1.0)
    }

    /// `κ·1` for `κ > 0`.
    pub fn scaled_ones(n: usize, kappa: f64) -> Self {
        assert!(kappa > 0.0 && kappa.is_finite());
        Self {
            c: vec![kappa; n],
            class: WeightClass::AllPositive,
        }
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn classification(&self) -> WeightClass {
        self.class
    }

    pub fn is_valid(&self) -> bool {
        self.class != WeightClass::Invalid
    }

    pub fn is_all_positive(&self) -> bool {
        self.class == WeightClass::AllPositive
    }

    pub fn require_valid(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidWeights(
                "some nonempty subset of the weights sums to zero".into(),
            ))
        }
    }

    pub fn require_positive(&self) -> Result<()> {
        if self.is_all_positive() {
            Ok(())
        } else {
            Err(Error::InvalidWeights("weights must be all positive".into()))
        }
    }

    pub(crate) fn require_len(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{} weights for {n} events",
                self.len()
            )))
        }
    }

    pub fn min(&self) -> f64 {
        self.c.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.c.iter().sum()
    }
}

fn has_zero_subset_sum(c: &[f64]) -> bool {
    let n = c.len();
    let mut sums = vec![0.0_f64; 1usize << n];
    for mask in 1..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + c[low];
        if sums[mask].abs() <= ZERO_SUM_TOL {
            return true;
        }
    }
    false
}

/// `Σ_i Σ_{B∋i} c_i p_B / Σ_{k∈B} c_k`, which equals the union probability
/// for every valid `c`.
pub fn weighted_identity(space: &EventSpace, w: &WeightVector) -> Result<f64> {
    w.require_valid()?;
    w.require_len(space.n)?;
    let c = w.c();
    let denoms: Vec<f64> = space
        .atoms
        .iter()
        .map(|&(mask, _)| subset_sum(c, mask))
        .collect();
    let mut total = 0.0;
    for (i, &ci) in c.iter().enumerate() {
        for (&(mask, p), &s) in space.atoms.iter().zip(&denoms) {
            if mask >> i & 1 == 1 {
                total += ci * p / s;
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceModel {
    /// Flat Dirichlet over all `2^n` atoms, the complement included.
    Dirichlet,
    /// Mass on `k` uniformly chosen nonempty atoms plus the complement.
    Sparse(usize),
}

/// Deterministic random space for fixed `(n, seed, model)`.
pub fn generate_random_space(n: usize, seed: u64, model: SpaceModel) -> Result<EventSpace> {
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    check_atom_cap(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atom_count = full_mask(n) as usize;
    match model {
        SpaceModel::Dirichlet => {
            let draws: Vec<f64> = (0..=atom_count).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = draws.iter().sum();
            // draws[0] is the complement atom
            let atoms = (1..=atom_count).map(|m| (m as u64, draws[m] / total));
            EventSpace::new(n, atoms)
        }
        SpaceModel::Sparse(k) => {
            if k == 0 || k > atom_count {
                return Err(Error::Argument(format!(
                    "sparse model needs 1 ≤ k ≤ {atom_count}, got {k}"
                )));
            }
            let mut masks: Vec<u64> = sample(&mut rng, atom_count, k)
                .into_iter()
                .map(|idx| idx as u64 + 1)
                .collect();
            masks.sort_unstable();
            let draws: Vec<f64> = (0..=k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = draws.iter().sum();
            EventSpace::new(n, masks.into_iter().zip(draws.iter().map(|d| d / total)))
        }
    }
}
