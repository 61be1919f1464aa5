//! Exhaustive search over integral assignments.
//!
//! An integral assignment sends every feature vector wholly to one bin, so it
//! is a set partition of the feature vectors; each block becomes a bin scored
//! with the block's pooled positive fraction. Partitions are enumerated as
//! restricted growth strings in lexicographic order, which is also the
//! canonical tie-breaking order of the solver.

use std::fmt;

use rayon::prelude::*;

use crate::audit::is_fair_unchecked;
use crate::construct::{loss_unchecked, LossReport};
use crate::error::{Error, Result};
use crate::model::{validate_instance, Instance, RiskAssignment};
use crate::scalar::Scalar;

/// Largest item count enumerated without an explicit cap.
pub const DEFAULT_MAX_ITEMS: usize = 12;

/// Candidates audited per parallel batch.
const BATCH: usize = 2048;

/// A set partition of `0..k`, blocks sorted internally and ordered by their
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Canonicalizes and checks that `blocks` are non-empty, disjoint, and
    /// cover `0..k` for some `k`.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let k: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; k];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= k || seen[i] {
                    return Err(Error::InvalidPartition(format!(
                        "item {i} repeated or outside 0..{k}"
                    )));
                }
                seen[i] = true;
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { blocks })
    }

    /// Builds the partition described by a restricted growth string.
    pub fn from_labels(labels: &[usize]) -> Self {
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &l) in labels.iter().enumerate() {
            blocks[l].push(i);
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition { blocks }
    }

    pub fn singletons(k: usize) -> Self {
        Partition {
            blocks: (0..k).map(|i| vec![i]).collect(),
        }
    }

    pub fn whole(k: usize) -> Self {
        Partition {
            blocks: vec![(0..k).collect()],
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn item_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block index of every item; the canonical restricted growth string.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.item_count()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                labels[i] = b;
            }
        }
        labels
    }

    pub fn block_of(&self, item: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&item))
    }
}

impl fmt::Display for Partition {
    /// 1-based blocks, e.g. `{1,2}{3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in &self.blocks {
            write!(f, "{{")?;
            for (j, i) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// Restricted-growth-string enumeration of all set partitions of `k` items.
#[derive(Debug, Clone)]
pub struct Partitions {
    labels: Vec<usize>,
    /// `maxima[i]` = max of `labels[..i]`, or `None` before the first item.
    maxima: Vec<usize>,
    remaining: Option<usize>,
    done: bool,
}

impl Partitions {
    fn new(k: usize, cap: Option<usize>) -> Self {
        Partitions {
            labels: vec![0; k],
            maxima: vec![0; k],
            remaining: cap,
            done: k == 0,
        }
    }

    fn advance(&mut self) -> bool {
        let k = self.labels.len();
        for i in (1..k).rev() {
            if self.labels[i] <= self.maxima[i] {
                self.labels[i] += 1;
                for j in i + 1..k {
                    self.labels[j] = 0;
                    self.maxima[j] = self.maxima[j - 1].max(self.labels[j - 1]);
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        if let Some(r) = self.remaining.as_mut() {
            if *r == 0 {
                self.done = true;
                return None;
            }
            *r -= 1;
        }
        let out = Partition::from_labels(&self.labels);
        if !self.advance() {
            self.done = true;
        }
        Some(out)
    }
}

/// All set partitions of `k >= 1` items in canonical order, at most `cap` of
/// them. Without a cap, `k` may not exceed [`DEFAULT_MAX_ITEMS`].
pub fn enumerate_partitions(k: usize, cap: Option<usize>) -> Result<Partitions> {
    if k == 0 {
        return Err(Error::InvalidArgument("cannot partition zero items".into()));
    }
    if k > DEFAULT_MAX_ITEMS && cap.is_none() {
        return Err(Error::InvalidArgument(format!(
            "{k} items exceed the uncapped maximum of {DEFAULT_MAX_ITEMS}"
        )));
    }
    Ok(Partitions::new(k, cap))
}

/// Bell numbers by the Bell triangle; independent of the enumerator.
pub fn bell_number(k: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..k {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// One bin per block scored with the block's pooled positive fraction.
///
/// Blocks without mass get no bin; their feature vectors (which carry no
/// mass) are routed to the first bin.
pub fn assignment_from_partition<S: Scalar>(
    inst: &Instance<S>,
    partition: &Partition,
) -> Result<RiskAssignment<S>> {
    if partition.item_count() != inst.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} items, instance has {} feature vectors",
            partition.item_count(),
            inst.len()
        )));
    }
    Ok(assignment_from_partition_unchecked(
        inst,
        partition,
        S::DEFAULT_TOLERANCE,
    ))
}

pub(crate) fn assignment_from_partition_unchecked<S: Scalar>(
    inst: &Instance<S>,
    partition: &Partition,
    tol: f64,
) -> RiskAssignment<S> {
    let features = inst.features();
    let mut scores = Vec::with_capacity(partition.blocks().len());
    let mut bin_of = vec![None; inst.len()];
    for block in partition.blocks() {
        let (mass, positive) = block.iter().fold((S::zero(), S::zero()), |(m, g), &i| {
            let total = features[i].total_mass();
            (m + total.clone(), g + total * features[i].p.clone())
        });
        if !mass.is_positive_beyond(tol) {
            continue;
        }
        for &i in block {
            bin_of[i] = Some(scores.len());
        }
        scores.push(positive / mass);
    }
    let bins = scores.len().max(1);
    if scores.is_empty() {
        scores.push(S::zero());
    }
    let allocation = bin_of
        .iter()
        .map(|b| {
            let mut row = vec![S::zero(); bins];
            row[b.unwrap_or(0)] = S::one();
            row
        })
        .collect();
    RiskAssignment::with_tolerance(scores, allocation, tol)
        .expect("partition assignments are integral and scored in [0,1]")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// First fair non-trivial partition in canonical order.
    AnyFair,
    /// Fair non-trivial partition of least total loss.
    MinLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Found,
    None,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<S> {
    pub partition: Partition,
    pub assignment: RiskAssignment<S>,
    pub loss: LossReport<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<S> {
    pub status: SolveStatus,
    /// For `BudgetExceeded`, the best solution seen before the cap, if any.
    pub best: Option<Solution<S>>,
    pub explored: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub objective: Objective,
    /// Maximum number of partitions to audit.
    pub cap: Option<usize>,
    pub tolerance: f64,
}

impl SolveOptions {
    pub fn new<S: Scalar>(objective: Objective) -> Self {
        SolveOptions {
            objective,
            cap: None,
            tolerance: S::DEFAULT_TOLERANCE,
        }
    }

    pub fn with_cap(mut self, cap: Option<usize>) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// Audits every integral assignment of `inst` and returns a fair non-trivial
/// one according to `opts.objective`. Ties go to the partition that comes
/// first in canonical order. The result does not depend on thread count.
pub fn solve_integral<S: Scalar>(inst: &Instance<S>, opts: SolveOptions) -> Result<SolveResult<S>> {
    let report = validate_instance(inst);
    if !report.ok() {
        return Err(Error::InvalidInstance(report.violations));
    }
    let tol = opts.tolerance;
    // One extra partition tells us whether the cap cut the search short.
    let mut parts = enumerate_partitions(inst.len(), opts.cap.map(|c| c + 1))?;
    let limit = opts.cap.unwrap_or(usize::MAX);
    let mut explored = 0usize;
    let mut best: Option<Solution<S>> = None;
    loop {
        let take = BATCH.min(limit - explored);
        let batch: Vec<Partition> = parts.by_ref().take(take).collect();
        if batch.is_empty() {
            break;
        }
        explored += batch.len();
        let hits: Vec<Option<Solution<S>>> = batch
            .into_par_iter()
            .map(|q| {
                let asg = assignment_from_partition_unchecked(inst, &q, tol);
                if asg.nonempty_bins(inst, tol) < 2 || !is_fair_unchecked(inst, &asg, tol) {
                    return None;
                }
                if !asg.is_nontrivial(inst, tol) {
                    return None;
                }
                let loss = loss_unchecked(inst, &asg);
                Some(Solution {
                    partition: q,
                    assignment: asg,
                    loss,
                })
            })
            .collect();
        for hit in hits.into_iter().flatten() {
            match opts.objective {
                Objective::AnyFair => {
                    return Ok(SolveResult {
                        status: SolveStatus::Found,
                        best: Some(hit),
                        explored,
                    });
                }
                Objective::MinLoss => {
                    let better = best.as_ref().is_none_or(|b| {
                        hit.loss.total < b.loss.total && !hit.loss.total.near(&b.loss.total, tol)
                    });
                    if better {
                        best = Some(hit);
                    }
                }
            }
        }
        if explored >= limit {
            break;
        }
    }
    let exhausted = parts.next().is_none();
    let status = if !exhausted {
        SolveStatus::BudgetExceeded
    } else if best.is_some() {
        SolveStatus::Found
    } else {
        SolveStatus::None
    };
    Ok(SolveResult {
        status,
        best,
        explored,
    })
}
