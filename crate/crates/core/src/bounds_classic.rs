//! Closed-form bounds built from `α` and the pairwise matrix: de Caen,
//! the weighted ratio family, the two Cauchy–Schwarz forms, Gallot–Kounias,
//! and the KAT / YAT-II special cases of the new bound classes.

use serde::{Deserialize, Serialize};

use crate::bounds_new::{lnew3, lnew4, Mode};
use crate::error::{Error, Result};
use crate::linalg_lp::solve_linear_system;
use crate::space::{PartialInfo, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub name: String,
    pub value: f64,
    pub kind: BoundKind,
    pub weights_used: Option<WeightVector>,
    pub notes: Vec<String>,
}

impl BoundValue {
    pub(crate) fn lower(name: &str, value: f64, w: Option<&WeightVector>) -> Self {
        Self {
            name: name.to_string(),
            value,
            kind: BoundKind::Lower,
            weights_used: w.cloned(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn upper(name: &str, value: f64, w: Option<&WeightVector>) -> Self {
        Self {
            kind: BoundKind::Upper,
            ..Self::lower(name, value, w)
        }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{name} evaluated to {v}")))
    }
}

/// `Σ_i α_i² / Σ_j P(A_i ∩ A_j)`.
pub fn dc_bound(info: &PartialInfo) -> BoundValue {
    let ones = vec![1.0; info.n()];
    let value = info
        .alpha()
        .iter()
        .enumerate()
        .filter(|&(_, &a)| a > 0.0)
        .map(|(i, &a)| a * a / info.gamma(&ones, i))
        .sum();
    BoundValue::lower("dc", value, None)
}

/// `(Σ_i |c_i| α_i)² / Σ_i Σ_j c_i² P(A_i ∩ A_j)`.
pub fn ratio_bound(info: &PartialInfo, w: &WeightVector) -> Result<BoundValue> {
    w.require_len(info.n())?;
    let c = w.c();
    let ones = vec![1.0; info.n()];
    let num: f64 = info.alpha().iter().zip(c).map(|(a, ci)| ci.abs() * a).sum();
    let den: f64 = (0..info.n()).map(|i| c[i] * c[i] * info.gamma(&ones, i)).sum();
    if den <= 0.0 {
        return Err(Error::DegenerateWeights(
            "ratio bound denominator is not positive".into(),
        ));
    }
    Ok(BoundValue::lower("ratio", finite("ratio", num * num / den)?, Some(w)))
}

/// `Σ_i c_i α_i² / γ_i(c)` for positive `c`.
pub fn cs_percomponent_bound(info: &PartialInfo, w: &WeightVector) -> Result<BoundValue> {
    w.require_len(info.n())?;
    w.require_positive()?;
    let c = w.c();
    let mut value = 0.0;
    for (i, &a) in info.alpha().iter().enumerate() {
        if a <= 0.0 {
            continue;
        }
        let g = info.gamma(c, i);
        if g <= 0.0 {
            return Err(Error::DegenerateWeights(format!(
                "gamma_{i}(c) = {g} is not positive"
            )));
        }
        value += c[i] * a * a / g;
    }
    Ok(BoundValue::lower("cs_percomponent", value, Some(w)))
}

/// `(cᵀα)² / cᵀΣc` for positive `c`.
pub fn cs_aggregate_bound(info: &PartialInfo, w: &WeightVector) -> Result<BoundValue> {
    w.require_len(info.n())?;
    w.require_positive()?;
    let c = w.c();
    let q = info.quadratic(c);
    if q <= 0.0 {
        return Err(Error::DegenerateWeights(
            "quadratic form cᵀΣc is not positive".into(),
        ));
    }
    let num = info.weighted_alpha(c);
    Ok(BoundValue::lower("cs_aggregate", num * num / q, Some(w)))
}

/// Gallot–Kounias: solves `Σc̃ = α` (least squares when `Σ` is singular)
/// and reports `(αᵀc̃)² / c̃ᵀΣc̃`, which is a valid bound for any `c̃`.
pub fn gk_bound(info: &PartialInfo) -> Result<(BoundValue, WeightVector)> {
    let sol = solve_linear_system(info.pairwise(), info.alpha())?;
    let ct = sol.x;
    let q = info.quadratic(&ct);
    if q <= 0.0 {
        return Err(Error::DegenerateWeights(
            "GK weights give a nonpositive quadratic form".into(),
        ));
    }
    let num = info.weighted_alpha(&ct);
    let value = finite("gk", num * num / q)?;
    let w = WeightVector::new(ct)?;
    let negatives = w.c().iter().filter(|&&v| v < 0.0).count();
    let mut bound = BoundValue::lower("gk", value, Some(&w))
        .with_note(format!("residual={:e}", sol.residual))
        .with_note(format!("rank={}", sol.rank));
    if sol.used_normal_equations {
        bound = bound.with_note("least-squares solve");
    }
    if negatives > 0 {
        bound = bound.with_note(format!("c~ has {negatives} nonpositive entries"));
    }
    Ok((bound, w))
}

/// Per-event KAT terms `α_i(1/⌊b_i⌋ + 1/⌈b_i⌉ − b_i/(⌊b_i⌋⌈b_i⌉))` with
/// `b_i = γ_i(1)/α_i`.
pub fn kat_closed_form(info: &PartialInfo) -> Vec<f64> {
    let n = info.n() as f64;
    let ones = vec![1.0; info.n()];
    info.alpha()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if a <= 0.0 {
                return 0.0;
            }
            let b = (info.gamma(&ones, i) / a).clamp(1.0, n);
            let (lo, hi) = (b.floor(), b.ceil());
            a * (1.0 / lo + 1.0 / hi - b / (lo * hi))
        })
        .collect()
}

/// KAT, computed as `lnew3(1)`.
pub fn kat_bound(info: &PartialInfo) -> Result<BoundValue> {
    let mut b = lnew3(info, &WeightVector::ones(info.n()), Mode::Exact)?;
    b.name = "kat".into();
    b.weights_used = None;
    Ok(b)
}

/// YAT-II, computed as `lnew4(1)`.
pub fn yat2_bound(info: &PartialInfo) -> Result<BoundValue> {
    let mut b = lnew4(info, &WeightVector::ones(info.n()), Mode::Exact)?;
    b.name = "yat2".into();
    b.weights_used = None;
    Ok(b)
}
