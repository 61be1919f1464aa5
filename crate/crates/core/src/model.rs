//! Populations, risk assignments, and the statistics derived from them.
//!
//! A population is split into two groups. People are described by a feature
//! vector; everyone sharing a feature vector has the same probability `p` of
//! belonging to the positive class, regardless of group. A risk assignment
//! routes each feature vector's mass into scored bins.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num::traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// One of the two groups. Displayed and parsed as `1` and `2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    One,
    Two,
}

impl Group {
    pub const ALL: [Group; 2] = [Group::One, Group::Two];

    pub fn index(self) -> usize {
        match self {
            Group::One => 0,
            Group::Two => 1,
        }
    }

    pub fn from_number(n: u32) -> Option<Group> {
        match n {
            1 => Some(Group::One),
            2 => Some(Group::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u32 {
        self.index() as u32 + 1
    }

    pub fn other(self) -> Group {
        match self {
            Group::One => Group::Two,
            Group::Two => Group::One,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Pair of values indexed by [`Group`].
pub type PerGroup<T> = [T; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<S = Rational> {
    pub id: String,
    /// Fraction of people with this feature vector in the positive class.
    pub p: S,
    /// Mass of people with this feature vector in each group.
    pub counts: PerGroup<S>,
}

impl<S: Scalar> FeatureVector<S> {
    pub fn new(id: impl Into<String>, p: S, group1: S, group2: S) -> Self {
        FeatureVector {
            id: id.into(),
            p,
            counts: [group1, group2],
        }
    }

    pub fn count(&self, group: Group) -> &S {
        &self.counts[group.index()]
    }

    pub fn total_mass(&self) -> S {
        self.counts[0].clone() + self.counts[1].clone()
    }
}

/// A two-group population.
///
/// Constructed through [`Instance::new`], which enforces the invariants, or
/// [`Instance::unchecked`] when the caller wants to inspect a possibly broken
/// instance with [`validate_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S = Rational> {
    features: Vec<FeatureVector<S>>,
}

impl<S: Scalar> Instance<S> {
    pub fn new(features: Vec<FeatureVector<S>>) -> Result<Self> {
        let inst = Instance { features };
        let report = validate_instance(&inst);
        if report.ok() {
            Ok(inst)
        } else {
            Err(Error::InvalidInstance(report.violations))
        }
    }

    pub fn unchecked(features: Vec<FeatureVector<S>>) -> Self {
        Instance { features }
    }

    pub fn features(&self) -> &[FeatureVector<S>] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature_index(&self, id: &str) -> Option<usize> {
        self.features.iter().position(|f| f.id == id)
    }

    /// Group sizes `N_t`.
    pub fn populations(&self) -> PerGroup<S> {
        Group::ALL.map(|g| {
            self.features
                .iter()
                .fold(S::zero(), |acc, f| acc + f.count(g).clone())
        })
    }

    /// Positive-class masses `mu_t`.
    pub fn positive_masses(&self) -> PerGroup<S> {
        Group::ALL.map(|g| {
            self.features
                .iter()
                .fold(S::zero(), |acc, f| acc + f.count(g).clone() * f.p.clone())
        })
    }

    /// True when every feature vector carrying mass has `p` in `{0, 1}`.
    pub fn is_perfect_prediction(&self, tol: f64) -> bool {
        self.features.iter().all(|f| {
            !f.total_mass().is_positive_beyond(tol)
                || f.p.is_near_zero(tol)
                || f.p.near(&S::one(), tol)
        })
    }

    pub fn has_equal_base_rates(&self, tol: f64) -> bool {
        let [r1, r2] = self.base_rates();
        r1.near(&r2, tol)
    }

    /// Base rates `rho_t = mu_t / N_t`. Requires both groups non-empty.
    pub fn base_rates(&self) -> PerGroup<S> {
        let n = self.populations();
        let mu = self.positive_masses();
        [mu[0].clone() / n[0].clone(), mu[1].clone() / n[1].clone()]
    }

    /// Swaps the roles of the two groups.
    pub fn mirrored(&self) -> Self {
        Instance {
            features: self
                .features
                .iter()
                .map(|f| FeatureVector {
                    id: f.id.clone(),
                    p: f.p.clone(),
                    counts: [f.counts[1].clone(), f.counts[0].clone()],
                })
                .collect(),
        }
    }

    pub fn to_float(&self) -> Instance<f64> {
        Instance {
            features: self
                .features
                .iter()
                .map(|f| FeatureVector {
                    id: f.id.clone(),
                    p: f.p.to_f64(),
                    counts: [f.counts[0].to_f64(), f.counts[1].to_f64()],
                })
                .collect(),
        }
    }
}

/// Outcome of [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every instance invariant, collecting all violations instead of
/// stopping at the first.
pub fn validate_instance<S: Scalar>(inst: &Instance<S>) -> ValidationReport {
    let mut violations = Vec::new();
    if inst.features.is_empty() {
        violations.push("features: instance has no feature vectors".to_string());
    }
    let mut seen = HashSet::new();
    for (i, f) in inst.features.iter().enumerate() {
        if !seen.insert(f.id.as_str()) {
            violations.push(format!("features[{i}].id: duplicate feature id {:?}", f.id));
        }
        if f.p < S::zero() || f.p > S::one() {
            violations.push(format!(
                "features[{i}].p: p out of range [0,1] for {:?} (p = {})",
                f.id, f.p
            ));
        }
        for g in Group::ALL {
            if *f.count(g) < S::zero() {
                violations.push(format!(
                    "features[{i}].counts.{g}: negative count for {:?} ({})",
                    f.id,
                    f.count(g)
                ));
            }
        }
    }
    let populations = inst.populations();
    for g in Group::ALL {
        if populations[g.index()] <= S::zero() {
            violations.push(format!(
                "group {g}: empty group (total mass is not positive)"
            ));
        }
    }
    ValidationReport { violations }
}

fn require_valid<S: Scalar>(inst: &Instance<S>) -> Result<()> {
    let report = validate_instance(inst);
    if report.ok() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(report.violations))
    }
}

/// Per-group population, positive-class mass, and base rate.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats<S = Rational> {
    pub population: PerGroup<S>,
    pub positive: PerGroup<S>,
    pub base_rate: PerGroup<S>,
}

pub fn derived_stats<S: Scalar>(inst: &Instance<S>) -> Result<GroupStats<S>> {
    require_valid(inst)?;
    let population = inst.populations();
    let positive = inst.positive_masses();
    let base_rate = [
        positive[0].clone() / population[0].clone(),
        positive[1].clone() / population[1].clone(),
    ];
    Ok(GroupStats {
        population,
        positive,
        base_rate,
    })
}

/// Bins with scores, plus a row-stochastic allocation matrix whose rows follow
/// the feature order of the instance the assignment was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskAssignment<S = Rational> {
    scores: Vec<S>,
    allocation: Vec<Vec<S>>,
}

impl<S: Scalar> RiskAssignment<S> {
    /// Builds an assignment, requiring scores and entries in `[0, 1]` and rows
    /// that sum to one (exactly for rationals).
    pub fn new(scores: Vec<S>, allocation: Vec<Vec<S>>) -> Result<Self> {
        Self::with_tolerance(scores, allocation, S::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(scores: Vec<S>, allocation: Vec<Vec<S>>, tol: f64) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::InvalidAssignment("assignment has no bins".into()));
        }
        for (b, v) in scores.iter().enumerate() {
            if *v < S::zero() || *v > S::one() {
                return Err(Error::InvalidAssignment(format!(
                    "bin {b}: score {v} outside [0,1]"
                )));
            }
        }
        for (r, row) in allocation.iter().enumerate() {
            if row.len() != scores.len() {
                return Err(Error::InvalidAssignment(format!(
                    "row {r}: has {} entries for {} bins",
                    row.len(),
                    scores.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| **x < S::zero() || **x > S::one()) {
                return Err(Error::InvalidAssignment(format!(
                    "row {r}: fraction {x} outside [0,1]"
                )));
            }
            let sum = row.iter().fold(S::zero(), |acc, x| acc + x.clone());
            if !sum.near(&S::one(), tol) {
                return Err(Error::InvalidAssignment(format!(
                    "row {r}: fractions sum to {sum}, not 1"
                )));
            }
        }
        Ok(RiskAssignment { scores, allocation })
    }

    pub fn scores(&self) -> &[S] {
        &self.scores
    }

    pub fn allocation(&self) -> &[Vec<S>] {
        &self.allocation
    }

    pub fn bin_count(&self) -> usize {
        self.scores.len()
    }

    pub fn row_count(&self) -> usize {
        self.allocation.len()
    }

    /// Errors unless the allocation has one row per feature of `inst`.
    pub fn check_shape(&self, inst: &Instance<S>) -> Result<()> {
        if self.allocation.len() != inst.len() {
            return Err(Error::ShapeMismatch(format!(
                "assignment has {} rows but instance has {} feature vectors",
                self.allocation.len(),
                inst.len()
            )));
        }
        Ok(())
    }

    /// Total mass (both groups) landing in each bin.
    pub fn bin_masses(&self, inst: &Instance<S>) -> Vec<S> {
        let mut masses = vec![S::zero(); self.scores.len()];
        for (f, row) in inst.features().iter().zip(&self.allocation) {
            let total = f.total_mass();
            for (m, x) in masses.iter_mut().zip(row) {
                *m = m.clone() + total.clone() * x.clone();
            }
        }
        masses
    }

    /// Drops bins that receive no mass and merges bins with equal scores.
    /// Fairness statistics are unchanged. Rows of zero-mass feature vectors are
    /// routed to the first surviving bin.
    pub fn normalized(&self, inst: &Instance<S>, tol: f64) -> RiskAssignment<S> {
        let masses = self.bin_masses(inst);
        let mut target: Vec<Option<usize>> = vec![None; self.scores.len()];
        let mut scores: Vec<S> = Vec::new();
        for (b, m) in masses.iter().enumerate() {
            if !m.is_positive_beyond(tol) {
                continue;
            }
            let v = &self.scores[b];
            let slot = match scores.iter().position(|s| s.near(v, tol)) {
                Some(i) => i,
                None => {
                    scores.push(v.clone());
                    scores.len() - 1
                }
            };
            target[b] = Some(slot);
        }
        if scores.is_empty() {
            return self.clone();
        }
        let allocation = inst
            .features()
            .iter()
            .zip(&self.allocation)
            .map(|(f, row)| {
                let mut out = vec![S::zero(); scores.len()];
                if !f.total_mass().is_positive_beyond(tol) {
                    out[0] = S::one();
                    return out;
                }
                let mut stray = S::zero();
                for (b, x) in row.iter().enumerate() {
                    match target[b] {
                        Some(slot) => out[slot] = out[slot].clone() + x.clone(),
                        None => stray = stray + x.clone(),
                    }
                }
                // A positive-mass feature cannot have mass in an empty bin,
                // so stray is zero here.
                debug_assert!(stray.is_near_zero(tol));
                out
            })
            .collect();
        RiskAssignment { scores, allocation }
    }

    /// Number of bins receiving positive mass.
    pub fn nonempty_bins(&self, inst: &Instance<S>, tol: f64) -> usize {
        self.bin_masses(inst)
            .iter()
            .filter(|m| m.is_positive_beyond(tol))
            .count()
    }

    /// Non-trivial means more than one bin with positive mass once zero-mass
    /// bins are pruned and equal scores merged.
    pub fn is_nontrivial(&self, inst: &Instance<S>, tol: f64) -> bool {
        self.normalized(inst, tol).nonempty_bins(inst, tol) > 1
    }

    pub fn to_float(&self) -> RiskAssignment<f64> {
        RiskAssignment {
            scores: self.scores.iter().map(Scalar::to_f64).collect(),
            allocation: self
                .allocation
                .iter()
                .map(|row| row.iter().map(Scalar::to_f64).collect())
                .collect(),
        }
    }
}

impl<S: Scalar> RiskAssignment<S> {
    /// Builds an assignment whose bin scores are the pooled positive fraction
    /// of the mass routed into each bin. Empty bins get score zero.
    pub fn with_pooled_scores(inst: &Instance<S>, allocation: Vec<Vec<S>>) -> Result<Self> {
        let bins = allocation.first().map_or(0, Vec::len);
        let mut mass = vec![S::zero(); bins];
        let mut positive = vec![S::zero(); bins];
        for (f, row) in inst.features().iter().zip(&allocation) {
            let total = f.total_mass();
            for (b, x) in row.iter().enumerate().take(bins) {
                let m = total.clone() * x.clone();
                positive[b] = positive[b].clone() + m.clone() * f.p.clone();
                mass[b] = mass[b].clone() + m;
            }
        }
        let scores = mass
            .iter()
            .zip(&positive)
            .map(|(m, g)| {
                if m.is_zero() {
                    S::zero()
                } else {
                    // guards the float backend against rounding past one
                    let q = g.clone() / m.clone();
                    if q > S::one() {
                        S::one()
                    } else {
                        q
                    }
                }
            })
            .collect();
        RiskAssignment::new(scores, allocation)
    }
}

/// One ingested observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub feature_id: String,
    pub group: Group,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RecordTable {
    pub rows: Vec<Record>,
}

impl RecordTable {
    pub fn new(rows: Vec<Record>) -> Self {
        RecordTable { rows }
    }
}

/// How far each group's empirical positive rate strays from the pooled rate
/// used as `p` for a feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDivergence {
    pub id: String,
    pub pooled: Rational,
    /// `None` when the group has no rows for this feature.
    pub group_rate: PerGroup<Option<Rational>>,
    pub deviation: PerGroup<Option<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DivergenceReport {
    pub features: Vec<FeatureDivergence>,
}

impl DivergenceReport {
    pub fn max_deviation(&self) -> Rational {
        self.features
            .iter()
            .flat_map(|f| f.deviation.iter().flatten())
            .fold(
                Rational::zero(),
                |acc, d| if *d > acc { d.clone() } else { acc },
            )
    }
}

/// Builds an instance from raw labelled rows. Counts are row counts; `p` is
/// the positive fraction pooled over both groups. Feature vectors are ordered
/// by id.
pub fn ingest_records(table: &RecordTable) -> Result<(Instance, DivergenceReport)> {
    if table.rows.is_empty() {
        return Err(Error::InvalidRecords("record table is empty".into()));
    }
    // [group][positive?] row counts per feature
    let mut tallies: BTreeMap<&str, [[u64; 2]; 2]> = BTreeMap::new();
    for row in &table.rows {
        let t = tallies.entry(row.feature_id.as_str()).or_default();
        t[row.group.index()][usize::from(row.positive)] += 1;
    }
    let mut features = Vec::with_capacity(tallies.len());
    let mut divergence = Vec::with_capacity(tallies.len());
    for (id, t) in tallies {
        let rows = |g: usize| t[g][0] + t[g][1];
        let total = rows(0) + rows(1);
        let pooled = Rational::new((t[0][1] + t[1][1]).into(), total.into());
        let group_rate =
            [0, 1].map(|g| (rows(g) > 0).then(|| Rational::new(t[g][1].into(), rows(g).into())));
        let deviation = group_rate.clone().map(|r| r.map(|r| num::abs(r - &pooled)));
        features.push(FeatureVector::new(
            id,
            pooled.clone(),
            Rational::from_integer(rows(0).into()),
            Rational::from_integer(rows(1).into()),
        ));
        divergence.push(FeatureDivergence {
            id: id.to_string(),
            pooled,
            group_rate,
            deviation,
        });
    }
    let inst = Instance::new(features).map_err(|e| match e {
        Error::InvalidInstance(v) => Error::InvalidRecords(v.join("; ")),
        other => other,
    })?;
    Ok((
        inst,
        DivergenceReport {
            features: divergence,
        },
    ))
}

/// Splits every feature vector into one per group that carries its mass, so
/// the two groups have disjoint feature supports. Ids get a `#1` / `#2`
/// suffix; feature vectors without mass in a group are not emitted for it.
pub fn split_by_group<S: Scalar>(inst: &Instance<S>) -> Result<Instance<S>> {
    require_valid(inst)?;
    let mut features = Vec::new();
    for f in inst.features() {
        for g in Group::ALL {
            let c = f.count(g);
            if *c > S::zero() {
                let mut counts = [S::zero(), S::zero()];
                counts[g.index()] = c.clone();
                features.push(FeatureVector {
                    id: format!("{}#{}", f.id, g),
                    p: f.p.clone(),
                    counts,
                });
            }
        }
    }
    Instance::new(features)
}

/// Sum of a slice of scalars.
#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{integer, ratio};

    fn ex1() -> Instance {
        Instance::new(vec![
            FeatureVector::new("s1", ratio(1, 2), integer(2), integer(0)),
            FeatureVector::new("s2", ratio(1, 4), integer(0), integer(4)),
        ])
        .unwrap()
    }

    fn exq() -> Instance {
        Instance::new(vec![
            FeatureVector::new("s1", ratio(1, 4), integer(1), integer(1)),
            FeatureVector::new("s2", ratio(3, 4), integer(1), integer(1)),
        ])
        .unwrap()
    }

    #[test]
    fn validation_flags_out_of_range_p() {
        let inst = Instance::unchecked(vec![FeatureVector::new(
            "a",
            ratio(3, 2),
            integer(1),
            integer(1),
        )]);
        let report = validate_instance(&inst);
        assert!(!report.ok());
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("p out of range")));
    }

    #[test]
    fn validation_flags_empty_group() {
        let inst = Instance::unchecked(vec![FeatureVector::new(
            "a",
            ratio(1, 2),
            integer(3),
            integer(0),
        )]);
        let report = validate_instance(&inst);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("empty group"));
        assert!(report.violations[0].contains("group 2"));
    }

    #[test]
    fn validation_flags_duplicates_and_negative_counts() {
        let inst = Instance::unchecked(vec![
            FeatureVector::new("a", ratio(1, 2), integer(1), integer(1)),
            FeatureVector::new("a", ratio(1, 2), integer(-1), integer(1)),
        ]);
        let report = validate_instance(&inst);
        assert!(report.violations.iter().any(|v| v.contains("duplicate")));
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("negative count")));
        assert!(Instance::new(inst.features().to_vec()).is_err());
    }

    #[test]
    fn ex1_is_valid() {
        assert!(validate_instance(&ex1()).ok());
    }

    #[test]
    fn ex1_stats() {
        let s = derived_stats(&ex1()).unwrap();
        assert_eq!(s.population, [integer(2), integer(4)]);
        assert_eq!(s.positive, [integer(1), integer(1)]);
        assert_eq!(s.base_rate, [ratio(1, 2), ratio(1, 4)]);
    }

    #[test]
    fn zero_rates_give_zero_stats() {
        let inst = Instance::new(vec![
            FeatureVector::new("a", integer(0), integer(2), integer(3)),
            FeatureVector::new("b", integer(0), integer(1), integer(0)),
        ])
        .unwrap();
        let s = derived_stats(&inst).unwrap();
        assert_eq!(s.positive, [integer(0), integer(0)]);
        assert_eq!(s.base_rate, [integer(0), integer(0)]);
    }

    #[test]
    fn exq_has_equal_base_rates() {
        let s = derived_stats(&exq()).unwrap();
        assert_eq!(s.base_rate, [ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn derived_stats_rejects_invalid() {
        let inst = Instance::unchecked(vec![FeatureVector::new(
            "a",
            ratio(1, 2),
            integer(1),
            integer(0),
        )]);
        assert!(matches!(
            derived_stats(&inst),
            Err(Error::InvalidInstance(_))
        ));
    }

    fn record(id: &str, g: u32, positive: bool) -> Record {
        Record {
            feature_id: id.into(),
            group: Group::from_number(g).unwrap(),
            positive,
        }
    }

    #[test]
    fn ingest_counts_and_pools() {
        let table = RecordTable::new(vec![
            record("a", 1, true),
            record("a", 1, false),
            record("a", 2, true),
        ]);
        let (inst, div) = ingest_records(&table).unwrap();
        let a = &inst.features()[0];
        assert_eq!(a.counts, [integer(2), integer(1)]);
        assert_eq!(a.p, ratio(2, 3));
        let d = &div.features[0];
        assert_eq!(d.group_rate, [Some(ratio(1, 2)), Some(integer(1))]);
        assert_eq!(d.deviation, [Some(ratio(1, 6)), Some(ratio(1, 3))]);
        assert_eq!(div.max_deviation(), ratio(1, 3));
    }

    #[test]
    fn ingest_all_negative_feature() {
        let table = RecordTable::new(vec![
            record("b", 1, false),
            record("b", 2, false),
            record("b", 2, false),
        ]);
        let (inst, _) = ingest_records(&table).unwrap();
        assert_eq!(inst.features()[0].p, integer(0));
    }

    #[test]
    fn ingest_symmetric_feature_has_no_divergence() {
        let table = RecordTable::new(vec![record("c", 1, true), record("c", 2, true)]);
        let (inst, div) = ingest_records(&table).unwrap();
        assert_eq!(inst.features()[0].p, integer(1));
        assert_eq!(div.max_deviation(), integer(0));
    }

    #[test]
    fn ingest_rejects_empty_and_one_sided_tables() {
        assert!(ingest_records(&RecordTable::default()).is_err());
        let table = RecordTable::new(vec![record("a", 1, true)]);
        assert!(matches!(
            ingest_records(&table),
            Err(Error::InvalidRecords(_))
        ));
    }

    #[test]
    fn split_exq_into_four() {
        let split = split_by_group(&exq()).unwrap();
        assert_eq!(split.len(), 4);
        assert_eq!(split.base_rates(), [ratio(1, 2), ratio(1, 2)]);
        for f in split.features() {
            assert!(f.counts[0].is_zero() || f.counts[1].is_zero());
        }
    }

    #[test]
    fn split_of_disjoint_instance_only_renames() {
        let split = split_by_group(&ex1()).unwrap();
        let ids: Vec<_> = split.features().iter().map(|f| f.id.as_str()).collect();
        assert_eq!(ids, ["s1#1", "s2#2"]);
        for (a, b) in split.features().iter().zip(ex1().features()) {
            assert_eq!((&a.p, &a.counts), (&b.p, &b.counts));
        }
    }

    #[test]
    fn split_drops_empty_side() {
        let inst = Instance::new(vec![
            FeatureVector::new("s", ratio(1, 3), integer(5), integer(0)),
            FeatureVector::new("t", ratio(1, 3), integer(0), integer(1)),
        ])
        .unwrap();
        let split = split_by_group(&inst).unwrap();
        assert_eq!(split.features()[0].id, "s#1");
        assert_eq!(split.len(), 2);
    }

    #[test]
    fn assignment_rows_must_sum_to_one() {
        let r = RiskAssignment::new(
            vec![ratio(1, 2), ratio(1, 4)],
            vec![vec![ratio(1, 2), ratio(1, 3)]],
        );
        assert!(matches!(r, Err(Error::InvalidAssignment(_))));
        assert!(RiskAssignment::<Rational>::new(vec![], vec![]).is_err());
        assert!(RiskAssignment::new(vec![ratio(3, 2)], vec![vec![integer(1)]]).is_err());
    }

    #[test]
    fn normalization_prunes_and_merges() {
        let inst = exq();
        let asg = RiskAssignment::new(
            vec![ratio(1, 2), integer(1), ratio(1, 2)],
            vec![
                vec![ratio(1, 2), integer(0), ratio(1, 2)],
                vec![integer(1), integer(0), integer(0)],
            ],
        )
        .unwrap();
        let n = asg.normalized(&inst, 0.0);
        assert_eq!(n.scores(), &[ratio(1, 2)]);
        assert_eq!(n.allocation(), &[vec![integer(1)], vec![integer(1)]]);
        assert!(!asg.is_nontrivial(&inst, 0.0));
    }
}
