//! Weight-vector strategies and the comparison harness: GK weights, clipped
//! GK weights, a `κ·1` line search around a base vector, and seeded random
//! search over positive weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds_classic::{dc_bound, gk_bound, kat_bound, yat2_bound, BoundKind, BoundValue};
use crate::bounds_new::{lnew3, lnew4, unew4, unew5, Mode};
use crate::error::{Error, Result};
use crate::linalg_lp::{optimal_inclass_bound, BoundSense};
use crate::space::{derive_partial_info, exact_union, EventSpace, PartialInfo, WeightVector};

/// Largest `n` for which [`compare_all`] includes the in-class LP bounds.
pub const COMPARE_INCLASS_MAX_EVENTS: usize = 12;

/// Slack used for validity and ordering flags.
pub const FLAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundFamily {
    Lnew3,
    Lnew4,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    GkExact,
    GkClipped { eps: f64 },
    KappaLine { lo: f64, hi: f64, step: f64 },
    RandomPositive { trials: usize, seed: u64 },
}

impl Strategy {
    /// Short label used in bound names, e.g. `lnew3[gk+]`.
    pub fn label(&self) -> &'static str {
        match self {
            Strategy::GkExact => "gk",
            Strategy::GkClipped { .. } => "gk+",
            Strategy::KappaLine { .. } => "kappa",
            Strategy::RandomPositive { .. } => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub family: BoundFamily,
}

impl SearchConfig {
    pub fn new(strategy: Strategy, family: BoundFamily) -> Result<Self> {
        match strategy {
            Strategy::GkClipped { eps } if !(eps > 0.0 && eps.is_finite()) => {
                return Err(Error::Argument(format!("clip epsilon must be positive, got {eps}")))
            }
            Strategy::KappaLine { lo, hi, step } => check_grid(lo, hi, step)?,
            Strategy::RandomPositive { trials: 0, .. } => {
                return Err(Error::Argument("trials must be at least 1".into()))
            }
            _ => {}
        }
        Ok(Self { strategy, family })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub id: String,
    /// `None` when the point was skipped.
    pub value: Option<f64>,
    pub note: Option<String>,
}

/// Statistics over the random trials, comparing `lnew4` with `lnew3` at the
/// same weights. Every trial is counted; trials where either bound fails are
/// counted in `failed` and excluded from both statistics. The mean ratio
/// additionally excludes trials with `lnew3 ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomStats {
    pub trials: usize,
    pub failed: usize,
    pub lnew4_gt_lnew3: usize,
    pub lnew4_gt_lnew3_percent: f64,
    pub ratio_count: usize,
    pub mean_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// `-∞` when every point was skipped.
    pub best_value: f64,
    pub best_weights: Option<WeightVector>,
    pub trace: Vec<TraceEntry>,
    pub evaluations: usize,
    pub stats: Option<RandomStats>,
}

impl SearchResult {
    fn empty() -> Self {
        Self {
            best_value: f64::NEG_INFINITY,
            best_weights: None,
            trace: Vec::new(),
            evaluations: 0,
            stats: None,
        }
    }

    /// Folds trace points in order, keeping the first maximizer.
    fn offer(&mut self, value: f64, w: &WeightVector) {
        self.evaluations += 1;
        if value > self.best_value {
            self.best_value = value;
            self.best_weights = Some(w.clone());
        }
    }
}

/// `c̃⁺ = max(c̃, eps)` componentwise.
pub fn gk_clipped(info: &PartialInfo, eps: f64) -> Result<WeightVector> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Argument(format!("clip epsilon must be positive, got {eps}")));
    }
    let (_, ct) = gk_bound(info)?;
    WeightVector::new(ct.c().iter().map(|&v| v.max(eps)).collect())
}

fn check_grid(lo: f64, hi: f64, step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Argument(format!("grid step must be positive, got {step}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Argument(format!("grid bounds {lo}:{hi} are not ordered")));
    }
    Ok(())
}

/// `lo, lo + step, …` up to `hi` inclusive, tolerating rounding in the
/// point count.
pub fn kappa_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    check_grid(lo, hi, step)?;
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

/// Maximizes `lnew3(base + κ·1)` over the grid. Points whose weights
/// violate the nonzero subset-sum condition are skipped.
pub fn kappa_line_search(
    info: &PartialInfo,
    base: &WeightVector,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<SearchResult> {
    let grid = kappa_grid(lo, hi, step)?;
    let evaluated: Vec<Result<(WeightVector, Option<f64>)>> = grid
        .par_iter()
        .map(|&kappa| {
            let w = WeightVector::new(base.c().iter().map(|v| v + kappa).collect())?;
            if !w.is_valid() {
                return Ok((w, None));
            }
            let v = lnew3(info, &w, Mode::Exact)?.value;
            Ok((w, Some(v)))
        })
        .collect();

    let mut result = SearchResult::empty();
    for (kappa, item) in grid.iter().zip(evaluated) {
        let (w, value) = item?;
        if let Some(v) = value {
            result.offer(v, &w);
        }
        result.trace.push(TraceEntry {
            id: format!("kappa={kappa}"),
            value,
            note: value.is_none().then(|| "skipped: zero subset sum".to_string()),
        });
    }
    Ok(result)
}

/// Weights for trial `trial`: i.i.d. uniform on `(0, 1]`, from a generator
/// that depends only on `(seed, trial)`.
pub fn random_weights(n: usize, seed: u64, trial: u64) -> WeightVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let c = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    WeightVector::new(c).expect("positive weights are valid")
}

/// Best value of `family` over `trials` random positive weight vectors.
/// With [`BoundFamily::Both`] a trial scores `max(lnew3, lnew4)` and
/// [`RandomStats`] are reported.
pub fn random_search(
    info: &PartialInfo,
    trials: usize,
    seed: u64,
    family: BoundFamily,
) -> Result<SearchResult> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let n = info.n();
    let evaluated: Vec<(WeightVector, Result<(Option<f64>, Option<f64>)>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let w = random_weights(n, seed, t);
            let r = (|| {
                let l3 = match family {
                    BoundFamily::Lnew4 => None,
                    _ => Some(lnew3(info, &w, Mode::Exact)?.value),
                };
                let l4 = match family {
                    BoundFamily::Lnew3 => None,
                    _ => Some(lnew4(info, &w, Mode::Exact)?.value),
                };
                Ok((l3, l4))
            })();
            (w, r)
        })
        .collect();

    let mut result = SearchResult::empty();
    let mut stats = RandomStats {
        trials,
        failed: 0,
        lnew4_gt_lnew3: 0,
        lnew4_gt_lnew3_percent: 0.0,
        ratio_count: 0,
        mean_ratio: None,
    };
    let mut ratio_sum = 0.0;
    let mut first_error = None;
    for (t, (w, r)) in evaluated.into_iter().enumerate() {
        let id = format!("trial={t}");
        match r {
            Ok((l3, l4)) => {
                let value = match (l3, l4) {
                    (Some(a), Some(b)) => {
                        if b > a + 1e-12 {
                            stats.lnew4_gt_lnew3 += 1;
                        }
                        if a > 0.0 {
                            ratio_sum += b / a;
                            stats.ratio_count += 1;
                        }
                        a.max(b)
                    }
                    (Some(v), None) | (None, Some(v)) => v,
                    (None, None) => unreachable!("some family is evaluated"),
                };
                result.offer(value, &w);
                result.trace.push(TraceEntry {
                    id,
                    value: Some(value),
                    note: None,
                });
            }
            Err(e) => {
                if !e.is_inconsistency() && first_error.is_none() {
                    first_error = Some(e.clone());
                }
                stats.failed += 1;
                result.trace.push(TraceEntry {
                    id,
                    value: None,
                    note: Some(e.to_string()),
                });
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    if result.evaluations == 0 {
        return Err(Error::InconsistentInfo(
            "every random trial failed on these inputs".into(),
        ));
    }
    if family == BoundFamily::Both {
        let counted = trials - stats.failed;
        stats.lnew4_gt_lnew3_percent = 100.0 * stats.lnew4_gt_lnew3 as f64 / counted as f64;
        stats.mean_ratio = (stats.ratio_count > 0).then(|| ratio_sum / stats.ratio_count as f64);
        result.stats = Some(stats);
    }
    Ok(result)
}

/// Evaluates `family` at a single weight vector.
fn family_value(info: &PartialInfo, w: &WeightVector, family: BoundFamily) -> Result<f64> {
    let l3 = || lnew3(info, w, Mode::Exact).map(|b| b.value);
    let l4 = || lnew4(info, w, Mode::Exact).map(|b| b.value);
    match family {
        BoundFamily::Lnew3 => l3(),
        BoundFamily::Lnew4 => l4(),
        BoundFamily::Both if w.is_all_positive() => Ok(l3()?.max(l4()?)),
        BoundFamily::Both => l3(),
    }
}

/// Runs one strategy.
pub fn search(info: &PartialInfo, config: &SearchConfig) -> Result<SearchResult> {
    match config.strategy {
        Strategy::GkExact | Strategy::GkClipped { .. } => {
            let w = match config.strategy {
                Strategy::GkClipped { eps } => gk_clipped(info, eps)?,
                _ => gk_bound(info)?.1,
            };
            let mut result = SearchResult::empty();
            let value = if w.is_valid() {
                Some(family_value(info, &w, config.family)?)
            } else {
                None
            };
            if let Some(v) = value {
                result.offer(v, &w);
            }
            result.trace.push(TraceEntry {
                id: config.strategy.label().into(),
                value,
                note: value.is_none().then(|| "skipped: zero subset sum".to_string()),
            });
            Ok(result)
        }
        Strategy::KappaLine { lo, hi, step } => {
            let (_, base) = gk_bound(info)?;
            kappa_line_search(info, &base, lo, hi, step)
        }
        Strategy::RandomPositive { trials, seed } => random_search(info, trials, seed, config.family),
    }
}

/// One row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    /// Bound identifier, with the weight source in brackets where it varies.
    pub name: String,
    pub value: f64,
    pub kind: BoundKind,
    pub weights: Option<Vec<f64>>,
    /// Whether the value is on the correct side of the exact union.
    pub valid: Option<bool>,
    pub notes: Vec<String>,
}

impl ReportEntry {
    pub fn from_bound(name: impl Into<String>, b: &BoundValue) -> Self {
        Self {
            name: name.into(),
            value: b.value,
            kind: b.kind,
            weights: b.weights_used.as_ref().map(|w| w.c().to_vec()),
            valid: None,
            notes: b.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub strategy: Strategy,
    pub family: BoundFamily,
    pub evaluations: usize,
    pub skipped: usize,
    pub best_value: Option<f64>,
    pub best_weights: Option<Vec<f64>>,
    pub stats: Option<RandomStats>,
}

impl SearchSummary {
    fn new(config: &SearchConfig, r: &SearchResult) -> Self {
        Self {
            strategy: config.strategy,
            family: config.family,
            evaluations: r.evaluations,
            skipped: r.trace.iter().filter(|t| t.value.is_none()).count(),
            best_value: r.best_value.is_finite().then_some(r.best_value),
            best_weights: r.best_weights.as_ref().map(|w| w.c().to_vec()),
            stats: r.stats.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingFlag {
    pub relation: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub exact_union: Option<f64>,
    pub entries: Vec<ReportEntry>,
    pub searches: Vec<SearchSummary>,
    pub ordering: Vec<OrderingFlag>,
}

impl BoundReport {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn entry(&self, name: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn push(&mut self, entry: ReportEntry) {
        self.entries.push(entry);
    }

    /// Marks each entry as valid or not against the exact union.
    pub fn annotate(&mut self, union: f64) {
        self.exact_union = Some(union);
        for e in &mut self.entries {
            e.valid = Some(match e.kind {
                BoundKind::Lower => e.value <= union + FLAG_TOL,
                BoundKind::Upper => e.value >= union - FLAG_TOL,
            });
        }
    }

    fn flag(&mut self, lhs: &str, op: &str, rhs: &str) {
        let (Some(a), Some(b)) = (self.entry(lhs), self.entry(rhs)) else {
            return;
        };
        let holds = match op {
            ">=" => a.value >= b.value - FLAG_TOL,
            _ => a.value <= b.value + FLAG_TOL,
        };
        self.ordering.push(OrderingFlag {
            relation: format!("{lhs} {op} {rhs}"),
            holds,
        });
    }
}

/// Evaluates the bounds applicable to `w` under the names
/// `lnew3[label]`, `lnew4[label]`, `unew4[label]`, `unew5[label]`.
fn weighted_entries(
    report: &mut BoundReport,
    info: &PartialInfo,
    w: &WeightVector,
    label: &str,
) -> Result<()> {
    if w.is_valid() {
        report.push(ReportEntry::from_bound(
            format!("lnew3[{label}]"),
            &lnew3(info, w, Mode::Exact)?,
        ));
    }
    if w.is_all_positive() {
        report.push(ReportEntry::from_bound(
            format!("lnew4[{label}]"),
            &lnew4(info, w, Mode::Exact)?,
        ));
        report.push(ReportEntry::from_bound(format!("unew4[{label}]"), &unew4(info, w)?));
        if info.n() >= 2 {
            report.push(ReportEntry::from_bound(format!("unew5[{label}]"), &unew5(info, w)?));
        }
    }
    report.flag(&format!("lnew4[{label}]"), ">=", &format!("lnew3[{label}]"));
    report.flag(&format!("unew5[{label}]"), "<=", &format!("unew4[{label}]"));
    Ok(())
}

/// Runs every bound and every configured strategy on `info`. With an
/// oracle space the report carries the exact union and validity flags.
pub fn compare_all(
    info: &PartialInfo,
    configs: &[SearchConfig],
    oracle: Option<&EventSpace>,
) -> Result<BoundReport> {
    if let Some(space) = oracle {
        let derived = derive_partial_info(space);
        if derived.max_abs_diff(info) > 1e-9 {
            return Err(Error::Argument(
                "oracle space does not match the partial information".into(),
            ));
        }
    }
    let n = info.n();
    let mut report = BoundReport::new(n);
    report.push(ReportEntry::from_bound("dc", &dc_bound(info)));
    match gk_bound(info) {
        Ok((b, _)) => report.push(ReportEntry::from_bound("gk", &b)),
        Err(Error::DegenerateWeights(_)) => {}
        Err(e) => return Err(e),
    }
    report.push(ReportEntry::from_bound("kat", &kat_bound(info)?));
    report.push(ReportEntry::from_bound("yat2", &yat2_bound(info)?));
    let ones = WeightVector::ones(n);
    weighted_entries(&mut report, info, &ones, "ones")?;
    if n <= COMPARE_INCLASS_MAX_EVENTS {
        for (name, sense, kind) in [
            ("opt_lower[ones]", BoundSense::Lower, BoundKind::Lower),
            ("opt_upper[ones]", BoundSense::Upper, BoundKind::Upper),
        ] {
            let value = optimal_inclass_bound(info, &ones, sense)?;
            report.push(ReportEntry {
                name: name.into(),
                value,
                kind,
                weights: Some(ones.c().to_vec()),
                valid: None,
                notes: vec!["linear program".into()],
            });
        }
    }

    for config in configs {
        let result = search(info, config)?;
        if let Some(w) = &result.best_weights {
            weighted_entries(&mut report, info, w, config.strategy.label())?;
        }
        report.searches.push(SearchSummary::new(config, &result));
    }
    if let Some(space) = oracle {
        report.annotate(exact_union(space));
    }
    Ok(report)
}
