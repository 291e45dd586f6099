//! Objective vectors and the stochastic lexicographic ranking rule.
//!
//! Performance always comes first. With probability `p` a ranking event
//! also looks at the secondary objectives (flow metric, then connection
//! cost, or their ratio), breaking performance ties with them. Otherwise
//! the population is ordered by performance alone.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::MetricsReport;

/// Information-flow measure used as a secondary objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowMetric {
    LocalEfficiency,
    GlobalEfficiency,
    DegreeCentrality,
    EigenvectorCentrality,
    Entropy,
}

impl FlowMetric {
    pub const ALL: [FlowMetric; 5] = [
        FlowMetric::LocalEfficiency,
        FlowMetric::GlobalEfficiency,
        FlowMetric::DegreeCentrality,
        FlowMetric::EigenvectorCentrality,
        FlowMetric::Entropy,
    ];

    pub fn value(self, m: &MetricsReport) -> f64 {
        match self {
            FlowMetric::LocalEfficiency => m.local_efficiency,
            FlowMetric::GlobalEfficiency => m.global_efficiency,
            FlowMetric::DegreeCentrality => m.degree_centrality,
            FlowMetric::EigenvectorCentrality => m.eigenvector_centrality,
            FlowMetric::Entropy => m.entropy,
        }
    }

    fn short(self) -> &'static str {
        match self {
            FlowMetric::LocalEfficiency => "le",
            FlowMetric::GlobalEfficiency => "ge",
            FlowMetric::DegreeCentrality => "dc",
            FlowMetric::EigenvectorCentrality => "ec",
            FlowMetric::Entropy => "ent",
        }
    }
}

/// One of the eleven fitness configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureVariant {
    /// `[performance]`
    PerfOnly,
    /// `[performance +, metric +, cost -]`
    MetricThenCost(FlowMetric),
    /// `[performance +, metric / cost +]`
    MetricOverCost(FlowMetric),
}

impl MeasureVariant {
    pub fn all() -> Vec<MeasureVariant> {
        let mut v = vec![MeasureVariant::PerfOnly];
        for m in FlowMetric::ALL {
            v.push(MeasureVariant::MetricThenCost(m));
            v.push(MeasureVariant::MetricOverCost(m));
        }
        v
    }

    pub fn name(self) -> String {
        match self {
            MeasureVariant::PerfOnly => "perf".to_string(),
            MeasureVariant::MetricThenCost(m) => format!("{}_cost", m.short()),
            MeasureVariant::MetricOverCost(m) => format!("{}_ratio", m.short()),
        }
    }
}

impl fmt::Display for MeasureVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown measure `{0}` (expected perf, le_cost, le_ratio, ge_cost, ge_ratio, dc_cost, dc_ratio, ec_cost, ec_ratio, ent_cost or ent_ratio)")]
pub struct UnknownMeasure(pub String);

impl FromStr for MeasureVariant {
    type Err = UnknownMeasure;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeasureVariant::all()
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| UnknownMeasure(s.to_string()))
    }
}

impl Serialize for MeasureVariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for MeasureVariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub value: f64,
    pub direction: Direction,
}

impl Objective {
    pub fn max(value: f64) -> Self {
        Objective { value, direction: Direction::Maximize }
    }

    pub fn min(value: f64) -> Self {
        Objective { value, direction: Direction::Minimize }
    }

    /// Value oriented so that larger is always better.
    fn score(&self) -> f64 {
        match self.direction {
            Direction::Maximize => self.value,
            Direction::Minimize => -self.value,
        }
    }
}

/// Ordered objectives; slot 0 is always performance (maximize).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub slots: Vec<Objective>,
}

impl ObjectiveVector {
    pub fn new(slots: Vec<Objective>) -> Self {
        debug_assert!(!slots.is_empty() && slots.len() <= 3);
        debug_assert_eq!(slots[0].direction, Direction::Maximize);
        ObjectiveVector { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    fn same_shape(&self, other: &ObjectiveVector) -> bool {
        self.slots.len() == other.slots.len()
            && self
                .slots
                .iter()
                .zip(&other.slots)
                .all(|(a, b)| a.direction == b.direction)
    }
}

/// Packs performance and metrics into the variant's objective vector.
/// A ratio with zero cost is defined as 0.
pub fn objective_vector(performance: f64, metrics: &MetricsReport, variant: MeasureVariant) -> ObjectiveVector {
    let perf = Objective::max(performance);
    match variant {
        MeasureVariant::PerfOnly => ObjectiveVector::new(vec![perf]),
        MeasureVariant::MetricThenCost(m) => ObjectiveVector::new(vec![
            perf,
            Objective::max(m.value(metrics)),
            Objective::min(metrics.connections_cost as f64),
        ]),
        MeasureVariant::MetricOverCost(m) => {
            let cost = metrics.connections_cost as f64;
            let ratio = if cost == 0.0 { 0.0 } else { m.value(metrics) / cost };
            ObjectiveVector::new(vec![perf, Objective::max(ratio)])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Probability that a ranking event consults the secondary objectives.
    pub p: f64,
    /// Values closer than this count as equal.
    pub tie_epsilon: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { p: 0.15, tie_epsilon: 1e-9 }
    }
}

impl SelectionConfig {
    pub fn check(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(format!("pressure p must lie in [0, 1], got {}", self.p));
        }
        if !(self.tie_epsilon > 0.0) {
            return Err(format!("tie_epsilon must be positive, got {}", self.tie_epsilon));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("objective vectors differ in length or direction")]
pub struct ShapeMismatch;

/// Pareto dominance: `a` is no worse than `b` in every slot (within
/// `tie_epsilon`) and strictly better in at least one.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector, tie_epsilon: f64) -> Result<bool, ShapeMismatch> {
    if !a.same_shape(b) {
        return Err(ShapeMismatch);
    }
    let mut strictly_better = false;
    for (x, y) in a.slots.iter().zip(&b.slots) {
        let (sx, sy) = (x.score(), y.score());
        if (sx - sy).abs() <= tie_epsilon {
            continue;
        }
        if sx < sy {
            return Ok(false);
        }
        strictly_better = true;
    }
    Ok(strictly_better)
}

/// Which branch a ranking event took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankBranch {
    PerformanceOnly,
    AllObjectives,
}

/// Orders `objs` best first, returning indices into `objs`.
///
/// Draws one `r ~ U[0, 1)`. If `r < p` the vectors are sorted
/// lexicographically over all slots, otherwise by slot 0 alone. Equality
/// within `tie_epsilon` falls through to the next slot considered; residual
/// ties keep input order.
pub fn rank_population<R: Rng + ?Sized>(
    objs: &[ObjectiveVector],
    cfg: &SelectionConfig,
    rng: &mut R,
) -> Result<(Vec<usize>, RankBranch), ShapeMismatch> {
    if let Some(first) = objs.first() {
        if objs.iter().any(|o| !first.same_shape(o)) {
            return Err(ShapeMismatch);
        }
    }
    let r: f64 = rng.gen();
    let (depth, branch) = if r < cfg.p {
        (objs.first().map_or(1, ObjectiveVector::len), RankBranch::AllObjectives)
    } else {
        (1, RankBranch::PerformanceOnly)
    };
    Ok((lexicographic_order(objs, depth, cfg.tie_epsilon), branch))
}

/// Deterministic lexicographic ordering over the first `depth` slots.
pub fn lexicographic_order(objs: &[ObjectiveVector], depth: usize, tie_epsilon: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..objs.len()).collect();
    sort_level(objs, &mut idx, 0, depth, tie_epsilon);
    idx
}

/// Sorts `idx` by slot `level`, then recursively refines each run of
/// values within `tie_epsilon` of the run's leader by the next slot.
fn sort_level(objs: &[ObjectiveVector], idx: &mut [usize], level: usize, depth: usize, eps: f64) {
    if level >= depth {
        idx.sort_unstable();
        return;
    }
    let key = |i: usize| objs[i].slots[level].score();
    idx.sort_by(|&a, &b| match key(b).total_cmp(&key(a)) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    let mut start = 0;
    while start < idx.len() {
        let lead = key(idx[start]);
        let mut end = start + 1;
        while end < idx.len() && (lead - key(idx[end])).abs() <= eps {
            end += 1;
        }
        if end - start > 1 {
            sort_level(objs, &mut idx[start..end], level + 1, depth, eps);
        }
        start = end;
    }
}
