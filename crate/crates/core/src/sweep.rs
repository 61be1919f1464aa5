//! Empirical certification of the impossibility results on one instance.
//!
//! The exact search looks for an assignment satisfying all three conditions
//! on an instance that has neither equal base rates nor perfect prediction;
//! any such assignment would contradict the exact characterization. The
//! approximate search looks for an eps-fair assignment for which neither
//! consequence predicate holds.

use rayon::prelude::*;

use num::traits::{One, Zero};
use rand::Rng;

use crate::audit::{audit_approx_unchecked, f_epsilon, is_fair_unchecked, Consequence, Slack};
use crate::construct::{identity_assignment, trivial_assignment};
use crate::error::{Error, Result};
use crate::integral::{assignment_from_partition_unchecked, enumerate_partitions, Partition};
use crate::model::{validate_instance, FeatureVector, Instance, RiskAssignment};
use crate::sample::{
    candidate_rng, equal_base_rate_instance, equal_p_classes, random_instance, search_candidate,
    search_candidate_in,
};
use crate::scalar::{integer, ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepBudget {
    /// Partitions enumerated for the integral part.
    pub integral_cap: usize,
    /// Seeded fractional candidates.
    pub fractional_samples: usize,
}

impl Default for SweepBudget {
    fn default() -> Self {
        SweepBudget {
            integral_cap: 250_000,
            fractional_samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    Integral(Partition),
    /// Index of the seeded fractional sample.
    Fractional(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub candidate: Candidate,
    pub assignment: RiskAssignment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub seed: u64,
    pub epsilon: Rational,
    pub equal_base_rates: bool,
    pub perfect_prediction: bool,
    pub integral_explored: usize,
    /// The integral enumeration stopped at the cap before finishing.
    pub budget_exhausted: bool,
    pub fractional_explored: usize,
    /// Assignments satisfying all three exact conditions.
    pub exact_fair_found: usize,
    /// First exactly fair assignment, when the instance permits one.
    pub fair_example: Option<Witness>,
    /// An exactly fair assignment on an instance where none should exist.
    pub exact_counterexample: Option<Witness>,
    pub approx_fair_found: usize,
    /// An eps-fair assignment with both consequence predicates false.
    pub approx_counterexample: Option<Witness>,
}

impl SweepReport {
    pub fn counterexamples(&self) -> usize {
        usize::from(self.exact_counterexample.is_some())
            + usize::from(self.approx_counterexample.is_some())
    }
}

struct Verdict {
    exact_fair: bool,
    approx_fair: bool,
    approx_violation: bool,
}

/// Float pre-check. Entries have small numerators and denominators, so
/// rounding error stays many orders below `SCREEN_TOLERANCE`: a candidate
/// rejected here fails the exact checks as well.
const SCREEN_TOLERANCE: f64 = 1e-7;

fn may_pass(
    inst: &Instance<f64>,
    asg: &RiskAssignment<f64>,
    eps: &Rational,
    slack: &Slack,
) -> bool {
    is_fair_unchecked(inst, asg, SCREEN_TOLERANCE)
        || audit_approx_unchecked(inst, asg, eps, slack.clone(), SCREEN_TOLERANCE).fair
}

fn judge(inst: &Instance, asg: &RiskAssignment, eps: &Rational, slack: &Slack) -> Verdict {
    let exact_fair = is_fair_unchecked(inst, asg, 0.0);
    let approx = audit_approx_unchecked(inst, asg, eps, slack.clone(), 0.0);
    Verdict {
        exact_fair,
        approx_fair: approx.fair,
        approx_violation: approx.fair && !approx.consequence.any(),
    }
}

/// Audits every integral assignment (up to `budget.integral_cap` partitions)
/// and `budget.fractional_samples` seeded fractional assignments with pooled
/// scores. The report depends only on the inputs, not on scheduling.
pub fn theorem_sweep(
    inst: &Instance,
    budget: SweepBudget,
    eps: &Rational,
    seed: u64,
) -> Result<SweepReport> {
    let report = validate_instance(inst);
    if !report.ok() {
        return Err(Error::InvalidInstance(report.violations));
    }
    let slack = f_epsilon(eps)?;
    let equal_base_rates = inst.has_equal_base_rates(0.0);
    let perfect_prediction = inst.is_perfect_prediction(0.0);
    let exact_escape = equal_base_rates || perfect_prediction;

    let mut parts = enumerate_partitions(inst.len(), Some(budget.integral_cap.saturating_add(1)))?;
    let partitions: Vec<Partition> = parts.by_ref().take(budget.integral_cap).collect();
    let budget_exhausted = parts.next().is_some();
    let integral_explored = partitions.len();

    let float_inst = inst.to_float();
    let classes = equal_p_classes(inst);
    let integral: Vec<Option<(Candidate, RiskAssignment, Verdict)>> = partitions
        .into_par_iter()
        .map(|q| {
            let screen = assignment_from_partition_unchecked(&float_inst, &q, 0.0);
            if !may_pass(&float_inst, &screen, eps, &slack) {
                return None;
            }
            let asg = assignment_from_partition_unchecked(inst, &q, 0.0);
            let v = judge(inst, &asg, eps, &slack);
            Some((Candidate::Integral(q), asg, v))
        })
        .collect();
    let fractional_explored = budget.fractional_samples;
    let fractional: Vec<Option<(Candidate, RiskAssignment, Verdict)>> = (0..fractional_explored
        as u64)
        .into_par_iter()
        .map(|i| {
            let screen = search_candidate_in(&mut candidate_rng(seed, i), &float_inst, &classes);
            if !may_pass(&float_inst, &screen, eps, &slack) {
                return None;
            }
            let asg = search_candidate_in(&mut candidate_rng(seed, i), inst, &classes);
            let v = judge(inst, &asg, eps, &slack);
            Some((Candidate::Fractional(i), asg, v))
        })
        .collect();

    let mut out = SweepReport {
        seed,
        epsilon: eps.clone(),
        equal_base_rates,
        perfect_prediction,
        integral_explored,
        budget_exhausted,
        fractional_explored,
        exact_fair_found: 0,
        fair_example: None,
        exact_counterexample: None,
        approx_fair_found: 0,
        approx_counterexample: None,
    };
    for (candidate, assignment, v) in integral.into_iter().chain(fractional).flatten() {
        if v.exact_fair {
            out.exact_fair_found += 1;
            let witness = || Witness {
                candidate: candidate.clone(),
                assignment: assignment.clone(),
            };
            if out.fair_example.is_none() {
                out.fair_example = Some(witness());
            }
            if !exact_escape && out.exact_counterexample.is_none() {
                out.exact_counterexample = Some(witness());
            }
        }
        if v.approx_fair {
            out.approx_fair_found += 1;
        }
        if v.approx_violation && out.approx_counterexample.is_none() {
            out.approx_counterexample = Some(Witness {
                candidate,
                assignment,
            });
        }
    }
    Ok(out)
}

/// Seeded candidate for the approximate search. Three families, chosen at
/// random: instances with nearly equal base rates scored by a (possibly
/// rescaled) single bin, nearly perfect instances whose negative classes are
/// proportional across groups, and unstructured random pairs. Candidates are
/// not guaranteed to pass the approximate audit; callers filter.
pub fn approx_candidate(rng: &mut impl Rng, eps: &Rational) -> (Instance, RiskAssignment) {
    match rng.gen_range(0..5) {
        0 | 1 => near_equal_rates_case(rng, eps),
        2 | 3 => near_perfect_case(rng, eps),
        _ => {
            let k = rng.gen_range(1..=4);
            let inst = random_instance(rng, k, 6, 5);
            let asg = search_candidate(rng, &inst);
            (inst, asg)
        }
    }
}

fn small_step(rng: &mut impl Rng, eps: &Rational, reach: i64) -> Rational {
    // multiples of eps/8 in [-reach eps, reach eps]
    eps * ratio(rng.gen_range(-8 * reach..=8 * reach), 8)
}

fn near_equal_rates_case(rng: &mut impl Rng, eps: &Rational) -> (Instance, RiskAssignment) {
    let shared = rng.gen_range(0..=3);
    let base = equal_base_rate_instance(rng, shared, 8, 5);
    let t = rng.gen_range(0..2);
    let eta = small_step(rng, eps, 2);
    let features = base
        .features()
        .iter()
        .map(|f| {
            let mut f = f.clone();
            if f.id == format!("bal{}", t + 1) {
                // p + eta p (1 - p) stays inside [0, 1] for |eta| <= 1
                f.p = &f.p + &eta * &f.p * (Rational::one() - &f.p);
            }
            f
        })
        .collect();
    let inst = Instance::new(features).expect("perturbed instance is valid");
    let trivial = trivial_assignment(&inst).expect("trivial assignment exists");
    if rng.gen_bool(0.5) {
        return (inst, trivial);
    }
    let scale = Rational::one() + small_step(rng, eps, 1);
    let score = (&trivial.scores()[0] * scale).min(Rational::one());
    let asg = RiskAssignment::new(vec![score], trivial.allocation().to_vec())
        .expect("rescaled score in range");
    (inst, asg)
}

fn near_perfect_case(rng: &mut impl Rng, eps: &Rational) -> (Instance, RiskAssignment) {
    let delta = eps * ratio(rng.gen_range(1..=16), 8);
    let kappa = ratio(rng.gen_range(1..=4), rng.gen_range(1..=4));
    let draw = |rng: &mut dyn rand::RngCore| integer(rng.gen_range(1..=6));
    let (a, c, d) = (draw(rng), draw(rng), draw(rng));
    let (b1, b2) = (draw(rng), draw(rng));
    let inst = Instance::new(vec![
        FeatureVector::new("zero", Rational::zero(), a.clone(), &a * &kappa),
        FeatureVector::new("one", Rational::one(), b1, b2),
        FeatureVector::new("low", delta.clone(), c.clone(), &c * &kappa),
        FeatureVector::new("high", Rational::one() - &delta, d.clone(), &d * &kappa),
    ])
    .expect("near-perfect instance is valid");
    let asg = if rng.gen_bool(0.5) {
        identity_assignment(&inst).expect("identity assignment exists")
    } else {
        let (o, z) = (Rational::one(), Rational::zero());
        let allocation = vec![
            vec![o.clone(), z.clone()],
            vec![z.clone(), o.clone()],
            vec![o.clone(), z.clone()],
            vec![z, o],
        ];
        RiskAssignment::with_pooled_scores(&inst, allocation)
            .expect("two-bin assignment is well formed")
    };
    (inst, asg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxWitness {
    pub index: u64,
    pub instance: Instance,
    pub assignment: RiskAssignment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSweep {
    pub epsilon: Rational,
    pub slack: Slack,
    pub attempts: usize,
    pub passing: usize,
    pub approx_perfect: usize,
    pub approx_equal_rates: usize,
    /// First passing case with both consequence predicates false.
    pub counterexample: Option<ApproxWitness>,
}

/// Draws seeded candidates from [`approx_candidate`] until `target` of them
/// pass the eps-approximate audit or `max_attempts` candidates are spent, and
/// classifies every passing one. Candidates are consumed in index order, so
/// the result does not depend on thread count.
pub fn approx_sweep(
    eps: &Rational,
    target: usize,
    max_attempts: usize,
    seed: u64,
) -> Result<ApproxSweep> {
    const CHUNK: usize = 1024;
    let slack = f_epsilon(eps)?;
    let mut out = ApproxSweep {
        epsilon: eps.clone(),
        slack: slack.clone(),
        attempts: 0,
        passing: 0,
        approx_perfect: 0,
        approx_equal_rates: 0,
        counterexample: None,
    };
    while out.passing < target && out.attempts < max_attempts {
        let start = out.attempts;
        let end = (start + CHUNK).min(max_attempts);
        let results: Vec<Option<(Consequence, Option<ApproxWitness>)>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let index = i as u64;
                let mut rng = candidate_rng(seed, index);
                let (inst, asg) = approx_candidate(&mut rng, eps);
                let report = audit_approx_unchecked(&inst, &asg, eps, slack.clone(), 0.0);
                report.fair.then(|| {
                    let witness = (!report.consequence.any()).then(|| ApproxWitness {
                        index,
                        instance: inst,
                        assignment: asg,
                    });
                    (report.consequence, witness)
                })
            })
            .collect();
        for r in results {
            out.attempts += 1;
            if let Some((c, witness)) = r {
                out.passing += 1;
                out.approx_perfect += usize::from(c.approx_perfect);
                out.approx_equal_rates += usize::from(c.approx_equal_rates);
                if out.counterexample.is_none() {
                    out.counterexample = witness;
                }
                if out.passing == target {
                    break;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn ex1_admits_no_fair_assignment() {
        let budget = SweepBudget {
            integral_cap: 1000,
            fractional_samples: 10_000,
        };
        let r = theorem_sweep(&ex1(), budget, &ratio(1, 100), 11).unwrap();
        assert_eq!(r.integral_explored, 2);
        assert!(!r.budget_exhausted);
        assert_eq!(r.fractional_explored, 10_000);
        assert_eq!(r.exact_fair_found, 0);
        assert!(r.exact_counterexample.is_none());
        assert!(r.approx_counterexample.is_none());
    }

    #[test]
    fn exq_one_bin_is_fair_without_contradiction() {
        let budget = SweepBudget {
            integral_cap: 1000,
            fractional_samples: 200,
        };
        let r = theorem_sweep(&exq(), budget, &ratio(1, 100), 3).unwrap();
        assert!(r.equal_base_rates);
        assert!(r.exact_fair_found >= 2);
        assert_eq!(
            r.fair_example.as_ref().unwrap().candidate,
            Candidate::Integral(Partition::whole(2))
        );
        assert_eq!(r.counterexamples(), 0);
    }

    #[test]
    fn sweep_is_deterministic() {
        let budget = SweepBudget {
            integral_cap: 10,
            fractional_samples: 300,
        };
        let a = theorem_sweep(&ex1(), budget, &ratio(1, 10), 5).unwrap();
        let b = theorem_sweep(&ex1(), budget, &ratio(1, 10), 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn approx_sweep_finds_passing_cases() {
        for eps in [ratio(1, 10_000), ratio(1, 100)] {
            let r = approx_sweep(&eps, 300, 5_000, 9).unwrap();
            assert_eq!(r.passing, 300, "eps {eps}: {} attempts", r.attempts);
            assert!(r.approx_perfect > 0 && r.approx_equal_rates > 0);
            assert!(r.counterexample.is_none());
            assert_eq!(r, approx_sweep(&eps, 300, 5_000, 9).unwrap());
        }
    }

    #[test]
    fn float_screen_drops_no_passing_candidate() {
        let eps = ratio(1, 10);
        let slack = f_epsilon(&eps).unwrap();
        for seed in 0..6 {
            let inst = random_instance(&mut candidate_rng(900 + seed, 0), 3, 4, 4);
            let report = theorem_sweep(
                &inst,
                SweepBudget {
                    integral_cap: 100,
                    fractional_samples: 300,
                },
                &eps,
                seed,
            )
            .unwrap();
            let mut exact = 0;
            let mut approx = 0;
            for q in enumerate_partitions(inst.len(), None).unwrap() {
                let v = judge(
                    &inst,
                    &assignment_from_partition_unchecked(&inst, &q, 0.0),
                    &eps,
                    &slack,
                );
                exact += usize::from(v.exact_fair);
                approx += usize::from(v.approx_fair);
            }
            for i in 0..300 {
                let v = judge(
                    &inst,
                    &search_candidate(&mut candidate_rng(seed, i), &inst),
                    &eps,
                    &slack,
                );
                exact += usize::from(v.exact_fair);
                approx += usize::from(v.approx_fair);
            }
            assert_eq!(report.exact_fair_found, exact);
            assert_eq!(report.approx_fair_found, approx);
        }
    }
}
