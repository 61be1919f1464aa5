//! Reduction from Subset Sum to the non-trivial integral fair-assignment
//! problem under equal base rates.
//!
//! For weights `w_1..w_m` and target `T` the reduced instance has `2m + 2`
//! feature vectors. Group 2 holds the first `2m`, each with mass `1/(2m)`;
//! pair `i` sits at `i/(m+1) -/+ e_i` with `e_i = sqrt(w_hat_i / 2)` and
//! `w_hat_i = w_i / (T m^4)`. Group 1 holds the last two, each with mass
//! `1/2`, at `(1 -/+ sqrt(2 gamma - 1)) / 2`, which pins group 1's
//! positive-class average to `gamma`. A partition `Q` of the group-2 feature
//! vectors is fair exactly when
//!
//! ```text
//! sum_{q in Q} 1/|q| sum_{i<j in q} (p_i - p_j)^2 = 1/m^4
//! ```
//!
//! which pairing `2i-1` with `2i` for the items of a solution achieves.
//!
//! The positive rates are irrational, so they are kept as exact [`Surd`]s and
//! the equation above is decided symbolically. A float copy of the instance
//! feeds the generic solver.

use std::collections::BTreeSet;

use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::integral::{enumerate_partitions, Partition};
use crate::model::{FeatureVector, Instance};
use crate::scalar::{integer, ratio, Rational};
use crate::surd::Surd;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    pub weights: Vec<u64>,
    pub target: u64,
}

impl SubsetSumInstance {
    pub fn new(weights: Vec<u64>, target: u64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(
                "subset sum needs at least one weight".into(),
            ));
        }
        if weights.contains(&0) || target == 0 {
            return Err(Error::InvalidArgument(
                "weights and target must be positive".into(),
            ));
        }
        Ok(SubsetSumInstance { weights, target })
    }

    /// Every subset (as sorted 0-based indices) summing to the target, by
    /// exhaustive enumeration. Only meant for small `m`.
    pub fn solutions(&self) -> Vec<Vec<usize>> {
        let m = self.weights.len();
        assert!(m < 32, "exhaustive subset enumeration limited to 31 items");
        (0u64..1 << m)
            .filter(|mask| {
                let sum: u64 = (0..m)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| self.weights[i])
                    .sum();
                sum == self.target
            })
            .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedInstance {
    pub source: SubsetSumInstance,
    /// Original indices of items with `w_i > T`, removed before reducing.
    pub dropped: Vec<usize>,
    /// Original index of each kept item.
    pub kept: Vec<usize>,
    /// Number of kept items.
    pub m: usize,
    pub w_hat: Vec<Rational>,
    pub gamma: Rational,
    /// Exact positive rates of the `2m + 2` feature vectors.
    pub p_exact: Vec<Surd>,
    pub p_approx: Vec<f64>,
    pub group1_mass: Vec<Rational>,
    pub group2_mass: Vec<Rational>,
    /// Float copy used by the generic solver.
    pub instance: Instance<f64>,
}

impl ReducedInstance {
    pub fn kept_weights(&self) -> Vec<u64> {
        self.kept.iter().map(|&i| self.source.weights[i]).collect()
    }

    /// `1 / m^4`.
    pub fn target_value(&self) -> Rational {
        let m = integer(self.m as i64);
        Rational::one() / (&m * &m * &m * &m)
    }

    pub fn feature_count(&self) -> usize {
        2 * self.m + 2
    }

    /// Exact base rates of the two groups.
    pub fn base_rates(&self) -> [Surd; 2] {
        let rate = |mass: &[Rational]| {
            let total: Rational = mass.iter().sum();
            let positive = mass
                .iter()
                .zip(&self.p_exact)
                .fold(Surd::zero(), |acc, (a, p)| &acc + &p.scale(a));
            positive.scale(&(Rational::one() / total))
        };
        [rate(&self.group1_mass), rate(&self.group2_mass)]
    }
}

pub fn reduce_subset_sum(ss: &SubsetSumInstance) -> Result<ReducedInstance> {
    let target = ss.target;
    let (kept, dropped): (Vec<usize>, Vec<usize>) =
        (0..ss.weights.len()).partition(|&i| ss.weights[i] <= target);
    if kept.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "every weight exceeds the target {target}"
        )));
    }
    let m = kept.len();
    let mi = integer(m as i64);
    let m4 = &mi * &mi * &mi * &mi;
    let t = integer(target as i64);
    let w_hat: Vec<Rational> = kept
        .iter()
        .map(|&i| integer(ss.weights[i] as i64) / (&t * &m4))
        .collect();

    let mut p_exact = Vec::with_capacity(2 * m + 2);
    for (i, w) in w_hat.iter().enumerate() {
        let centre = Surd::from_rational(ratio(i as i64 + 1, m as i64 + 1));
        let e = Surd::sqrt(&(w / integer(2)));
        p_exact.push(&centre - &e);
        p_exact.push(&centre + &e);
    }
    // sum p^2 over the pairs is rational: 2 c_i^2 + 2 e_i^2
    let sum_sq: Rational = w_hat
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let c = ratio(i as i64 + 1, m as i64 + 1);
            integer(2) * &c * &c + w
        })
        .sum();
    let gamma = sum_sq / &mi - Rational::one() / (&m4 * &mi);
    let disc = integer(2) * &gamma - Rational::one();
    if disc.is_negative() {
        return Err(Error::ReductionInfeasible {
            gamma: crate::scalar::format_rational(&gamma),
            two_gamma_minus_one: crate::scalar::format_rational(&disc),
        });
    }
    let root = Surd::sqrt(&disc);
    let half = ratio(1, 2);
    let half_s = Surd::from_rational(half.clone());
    p_exact.push(&half_s - &root.scale(&half));
    p_exact.push(&half_s + &root.scale(&half));

    let p_approx: Vec<f64> = p_exact.iter().map(Surd::to_f64).collect();
    let group1_mass: Vec<Rational> = (0..2 * m + 2)
        .map(|i| {
            if i >= 2 * m {
                half.clone()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let group2_mass: Vec<Rational> = (0..2 * m + 2)
        .map(|i| {
            if i < 2 * m {
                ratio(1, 2 * m as i64)
            } else {
                Rational::zero()
            }
        })
        .collect();
    let features = (0..2 * m + 2)
        .map(|i| {
            FeatureVector::new(
                format!("s{}", i + 1),
                p_approx[i].clamp(0.0, 1.0),
                crate::scalar::rational_to_f64(&group1_mass[i]),
                crate::scalar::rational_to_f64(&group2_mass[i]),
            )
        })
        .collect();
    let instance = Instance::new(features)?;
    Ok(ReducedInstance {
        source: ss.clone(),
        dropped,
        kept,
        m,
        w_hat,
        gamma,
        p_exact,
        p_approx,
        group1_mass,
        group2_mass,
        instance,
    })
}

/// Restricts `q` to the `2m` group-2 feature vectors. Accepts a partition of
/// exactly those, or of all `2m + 2` where the last two are singletons.
fn group2_blocks<'a>(ri: &ReducedInstance, q: &'a Partition) -> Result<Vec<&'a Vec<usize>>> {
    let n = 2 * ri.m;
    match q.item_count() {
        c if c == n => Ok(q.blocks().iter().collect()),
        c if c == n + 2 => {
            let mut blocks = Vec::with_capacity(q.blocks().len());
            for b in q.blocks() {
                if b.iter().any(|&i| i >= n) {
                    if b.len() != 1 {
                        return Err(Error::InvalidPartition(format!(
                            "feature vectors {} and {} must be singletons",
                            n + 1,
                            n + 2
                        )));
                    }
                } else {
                    blocks.push(b);
                }
            }
            Ok(blocks)
        }
        c => Err(Error::InvalidPartition(format!(
            "partition covers {c} items; expected {n} or {}",
            n + 2
        ))),
    }
}

/// Squared differences of all group-2 positive rates, computed once per
/// instance. `table[i][j]` for `i < j`.
#[derive(Debug, Clone)]
pub struct PairTable {
    sq: Vec<Vec<Surd>>,
}

impl PairTable {
    pub fn new(ri: &ReducedInstance) -> Self {
        let n = 2 * ri.m;
        let sq = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if j <= i {
                            Surd::zero()
                        } else {
                            let d = &ri.p_exact[i] - &ri.p_exact[j];
                            &d * &d
                        }
                    })
                    .collect()
            })
            .collect();
        PairTable { sq }
    }

    fn get(&self, i: usize, j: usize) -> &Surd {
        if i < j {
            &self.sq[i][j]
        } else {
            &self.sq[j][i]
        }
    }
}

/// Exact left-hand side `sum_q 1/|q| sum_{i<j in q} (p_i - p_j)^2`.
pub fn reduction_lhs(ri: &ReducedInstance, q: &Partition) -> Result<Surd> {
    let table = PairTable::new(ri);
    reduction_lhs_with(ri, &table, q)
}

pub fn reduction_lhs_with(ri: &ReducedInstance, table: &PairTable, q: &Partition) -> Result<Surd> {
    let blocks = group2_blocks(ri, q)?;
    let mut lhs = Surd::zero();
    for block in blocks {
        if block.len() < 2 {
            continue;
        }
        let mut inner = Surd::zero();
        for (a, &i) in block.iter().enumerate() {
            for &j in &block[a + 1..] {
                inner = &inner + table.get(i, j);
            }
        }
        lhs = &lhs + &inner.scale(&ratio(1, block.len() as i64));
    }
    Ok(lhs)
}

/// Decides the reduction equation exactly.
pub fn check_reduction_equation(ri: &ReducedInstance, q: &Partition) -> Result<bool> {
    let lhs = reduction_lhs(ri, q)?;
    Ok(lhs.as_rational() == Some(ri.target_value()))
}

/// Interval route: `Some(false)` when a `bits`-bit enclosure of the left-hand
/// side excludes the target, `Some(true)` when the enclosure collapses onto
/// it, `None` when undecided at this precision.
pub fn certify_by_interval(ri: &ReducedInstance, q: &Partition, bits: u32) -> Result<Option<bool>> {
    let lhs = reduction_lhs(ri, q)?;
    let (lo, hi) = lhs.enclosure(bits);
    let target = ri.target_value();
    Ok(if target < lo || target > hi {
        Some(false)
    } else if lo == hi {
        Some(true)
    } else {
        None
    })
}

/// Items whose pair block appears in `q`, as sorted 0-based indices into the
/// kept items. Every group-2 block must be a singleton or a pair `{2i, 2i+1}`.
pub fn decode_partition(ri: &ReducedInstance, q: &Partition) -> Result<Vec<usize>> {
    let mut items = BTreeSet::new();
    for block in group2_blocks(ri, q)? {
        match block.as_slice() {
            [_] => {}
            [a, b] if a % 2 == 0 && *b == a + 1 => {
                items.insert(a / 2);
            }
            _ => {
                return Err(Error::InvalidPartition(format!(
                    "block {block:?} is neither a singleton nor an item pair"
                )))
            }
        }
    }
    Ok(items.into_iter().collect())
}

/// Pairs `{2i, 2i+1}` for each `i` in `subset`, singletons for everything
/// else, over all `2m + 2` feature vectors.
pub fn encode_solution(ri: &ReducedInstance, subset: &[usize]) -> Result<Partition> {
    if let Some(&bad) = subset.iter().find(|&&i| i >= ri.m) {
        return Err(Error::InvalidArgument(format!(
            "item {bad} out of range for m = {}",
            ri.m
        )));
    }
    let chosen: BTreeSet<usize> = subset.iter().copied().collect();
    let mut blocks = Vec::new();
    for i in 0..ri.m {
        if chosen.contains(&i) {
            blocks.push(vec![2 * i, 2 * i + 1]);
        } else {
            blocks.push(vec![2 * i]);
            blocks.push(vec![2 * i + 1]);
        }
    }
    blocks.push(vec![2 * ri.m]);
    blocks.push(vec![2 * ri.m + 1]);
    Partition::new(blocks)
}

/// Both sides of `sum z_i^2 - (sum z_i)^2 / k = (1/k) sum_{i<j} (z_i - z_j)^2`.
pub fn sum_of_squares_identity(z: &[Rational]) -> Result<(Rational, Rational)> {
    if z.is_empty() {
        return Err(Error::InvalidArgument("need at least one value".into()));
    }
    let k = integer(z.len() as i64);
    let sum: Rational = z.iter().sum();
    let sum_sq: Rational = z.iter().map(|x| x * x).sum();
    let lhs = sum_sq - &sum * &sum / &k;
    let mut pairs = Rational::zero();
    for (a, x) in z.iter().enumerate() {
        for y in &z[a + 1..] {
            let d = x - y;
            pairs += &d * &d;
        }
    }
    Ok((lhs, pairs / k))
}

/// Outcome of checking every partition of the group-2 feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionSearch {
    /// Partitions satisfying the equation, in canonical order.
    pub passing: Vec<Partition>,
    pub explored: usize,
    pub exhausted: bool,
}

/// Exhaustively checks all partitions of the `2m` group-2 feature vectors.
pub fn search_reduction(ri: &ReducedInstance, cap: Option<usize>) -> Result<ReductionSearch> {
    use rayon::prelude::*;

    let table = PairTable::new(ri);
    let target = ri.target_value();
    let n = 2 * ri.m;
    let mut iter = enumerate_partitions(n, cap.map(|c| c + 1))?;
    let limit = cap.unwrap_or(usize::MAX);
    let parts: Vec<Partition> = iter.by_ref().take(limit).collect();
    let exhausted = iter.next().is_none();
    let explored = parts.len();
    let passing: Vec<Partition> = parts
        .into_par_iter()
        .filter(|q| {
            reduction_lhs_with(ri, &table, q)
                .map(|lhs| lhs.as_rational().as_ref() == Some(&target))
                .unwrap_or(false)
        })
        .collect();
    Ok(ReductionSearch {
        passing,
        explored,
        exhausted,
    })
}
