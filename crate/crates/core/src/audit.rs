//! Exact and approximate auditing of the three fairness conditions.
//!
//! Notation follows the usual matrix form: for group `t` with count vector
//! `n_t`, positive-rate diagonal `P`, allocation `X` and scores `v`,
//!
//! * assigned mass per bin `m_t = n_t^T X`,
//! * positive mass per bin `g_t = n_t^T P X`,
//! * score-weighted mass per bin `s_t = n_t^T X V`.
//!
//! Calibration within groups asks `g_t = s_t` in every bin. Balance for the
//! positive class asks the positive-class average scores `gamma_t` to agree;
//! balance for the negative class asks the same of `beta_t`.

use num::traits::{One, Signed};

use crate::error::{Error, Result};
use crate::model::{validate_instance, Group, Instance, PerGroup, RiskAssignment};
use crate::scalar::{ratio, sqrt_enclosure, Rational, Scalar};

/// Per-bin, per-group masses of an assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct BinStats<S = Rational> {
    /// `m_tb`: mass of group `t` in bin `b`.
    pub assigned: PerGroup<Vec<S>>,
    /// `g_tb`: positive-class mass of group `t` in bin `b`.
    pub positive: PerGroup<Vec<S>>,
    /// `s_tb = v_b * m_tb`.
    pub score_weighted: PerGroup<Vec<S>>,
}

impl<S: Scalar> BinStats<S> {
    pub fn bin_count(&self) -> usize {
        self.assigned[0].len()
    }

    /// `n_t^T P X v`: total score received by the positive class of `group`.
    pub fn positive_score(&self, group: Group, scores: &[S]) -> S {
        self.positive[group.index()]
            .iter()
            .zip(scores)
            .fold(S::zero(), |acc, (g, v)| acc + g.clone() * v.clone())
    }

    /// `n_t^T X v`: total score received by `group`.
    pub fn total_score(&self, group: Group) -> S {
        self.score_weighted[group.index()]
            .iter()
            .fold(S::zero(), |acc, s| acc + s.clone())
    }
}

pub fn bin_statistics<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
) -> Result<BinStats<S>> {
    require_valid(inst)?;
    asg.check_shape(inst)?;
    Ok(bin_statistics_unchecked(inst, asg))
}

pub(crate) fn bin_statistics_unchecked<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
) -> BinStats<S> {
    let bins = asg.bin_count();
    let mut assigned = [vec![S::zero(); bins], vec![S::zero(); bins]];
    let mut positive = [vec![S::zero(); bins], vec![S::zero(); bins]];
    for (f, row) in inst.features().iter().zip(asg.allocation()) {
        for t in 0..2 {
            let n = &f.counts[t];
            if n.is_zero() {
                continue;
            }
            let np = n.clone() * f.p.clone();
            for (b, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                assigned[t][b] = assigned[t][b].clone() + n.clone() * x.clone();
                positive[t][b] = positive[t][b].clone() + np.clone() * x.clone();
            }
        }
    }
    let score_weighted = [0, 1].map(|t| {
        assigned[t]
            .iter()
            .zip(asg.scores())
            .map(|(m, v)| m.clone() * v.clone())
            .collect()
    });
    BinStats {
        assigned,
        positive,
        score_weighted,
    }
}

fn require_valid<S: Scalar>(inst: &Instance<S>) -> Result<()> {
    let report = validate_instance(inst);
    if report.ok() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(report.violations))
    }
}

/// Result of a balance check between the two groups' class averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Balance {
    pub ok: bool,
    /// Some group has an empty class, so the average is undefined and the
    /// condition holds vacuously.
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport<S = Rational> {
    pub calibration_ok: bool,
    /// `g_tb - v_b m_tb` for each group and bin.
    pub calibration_residuals: PerGroup<Vec<S>>,
    /// Positive-class average score; `None` when the group has no positive mass.
    pub gamma: PerGroup<Option<S>>,
    /// Negative-class average score; `None` when the group has no negative mass.
    pub beta: PerGroup<Option<S>>,
    pub balance_positive: Balance,
    pub balance_negative: Balance,
    /// `n_t^T X v`, the total score handed to each group.
    pub estimated_positive: PerGroup<S>,
    /// Difference of the groups' average scores.
    pub parity_gap: S,
    pub fair: bool,
}

/// Class averages and group totals shared by the exact and approximate audits.
#[derive(Debug, Clone)]
pub(crate) struct ClassAverages<S> {
    pub gamma: PerGroup<Option<S>>,
    pub beta: PerGroup<Option<S>>,
    pub estimated_positive: PerGroup<S>,
    pub population: PerGroup<S>,
}

pub(crate) fn class_averages<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
    stats: &BinStats<S>,
    tol: f64,
) -> ClassAverages<S> {
    let population = inst.populations();
    let mu = inst.positive_masses();
    let mut gamma = [None, None];
    let mut beta = [None, None];
    let mut estimated_positive = [S::zero(), S::zero()];
    for g in Group::ALL {
        let t = g.index();
        let pos_score = stats.positive_score(g, asg.scores());
        let total_score = stats.total_score(g);
        let negatives = population[t].clone() - mu[t].clone();
        if mu[t].is_positive_beyond(tol) {
            gamma[t] = Some(pos_score.clone() / mu[t].clone());
        }
        if negatives.is_positive_beyond(tol) {
            beta[t] = Some((total_score.clone() - pos_score) / negatives);
        }
        estimated_positive[t] = total_score;
    }
    ClassAverages {
        gamma,
        beta,
        estimated_positive,
        population,
    }
}

fn exact_balance<S: Scalar>(avg: &PerGroup<Option<S>>, tol: f64) -> Balance {
    match avg {
        [Some(a), Some(b)] => Balance {
            ok: a.near(b, tol),
            vacuous: false,
        },
        _ => Balance {
            ok: true,
            vacuous: true,
        },
    }
}

/// Exact audit (rationals) or tolerance-`S::DEFAULT_TOLERANCE` audit (floats).
pub fn audit_exact<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
) -> Result<AuditReport<S>> {
    audit_with_tolerance(inst, asg, S::DEFAULT_TOLERANCE)
}

pub fn audit_with_tolerance<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
    tol: f64,
) -> Result<AuditReport<S>> {
    require_valid(inst)?;
    asg.check_shape(inst)?;
    Ok(audit_unchecked(inst, asg, tol))
}

pub(crate) fn audit_unchecked<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
    tol: f64,
) -> AuditReport<S> {
    let stats = bin_statistics_unchecked(inst, asg);
    let calibration_residuals = [0, 1].map(|t| {
        stats.positive[t]
            .iter()
            .zip(&stats.score_weighted[t])
            .map(|(g, s)| g.clone() - s.clone())
            .collect::<Vec<S>>()
    });
    let calibration_ok = calibration_residuals
        .iter()
        .flatten()
        .all(|r| r.is_near_zero(tol));
    let avg = class_averages(inst, asg, &stats, tol);
    let balance_positive = exact_balance(&avg.gamma, tol);
    let balance_negative = exact_balance(&avg.beta, tol);
    let parity_gap = avg.estimated_positive[0].clone() / avg.population[0].clone()
        - avg.estimated_positive[1].clone() / avg.population[1].clone();
    AuditReport {
        fair: calibration_ok && balance_positive.ok && balance_negative.ok,
        calibration_ok,
        calibration_residuals,
        gamma: avg.gamma,
        beta: avg.beta,
        balance_positive,
        balance_negative,
        estimated_positive: avg.estimated_positive,
        parity_gap,
    }
}

/// Cheap fairness test for search loops: stops at the first failed condition.
pub(crate) fn is_fair_unchecked<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
    tol: f64,
) -> bool {
    let stats = bin_statistics_unchecked(inst, asg);
    let calibrated = (0..2).all(|t| {
        stats.positive[t]
            .iter()
            .zip(&stats.score_weighted[t])
            .all(|(g, s)| g.near(s, tol))
    });
    if !calibrated {
        return false;
    }
    let avg = class_averages(inst, asg, &stats, tol);
    exact_balance(&avg.gamma, tol).ok && exact_balance(&avg.beta, tol).ok
}

/// Difference between the groups' average scores, `n_1^T X v / N_1 - n_2^T X v / N_2`.
pub fn statistical_parity_gap<S: Scalar>(inst: &Instance<S>, asg: &RiskAssignment<S>) -> Result<S> {
    require_valid(inst)?;
    asg.check_shape(inst)?;
    let stats = bin_statistics_unchecked(inst, asg);
    let n = inst.populations();
    Ok(stats.total_score(Group::One) / n[0].clone() - stats.total_score(Group::Two) / n[1].clone())
}

/// Enclosure of `f(eps) = sqrt(eps) * max(1, 3 sqrt(eps) + 3/4)`.
///
/// `lower == upper` when `sqrt(eps)` is rational. Otherwise the square root is
/// bracketed to 128 bits and `[lower, upper]` contains the true value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slack {
    pub lower: Rational,
    pub upper: Rational,
}

impl Slack {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn to_f64(&self) -> f64 {
        crate::scalar::rational_to_f64(&self.upper)
    }
}

pub const SLACK_PRECISION_BITS: u32 = 128;

pub fn f_epsilon(eps: &Rational) -> Result<Slack> {
    if eps.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be >= 0, got {eps}"
        )));
    }
    let (lo, hi) = sqrt_enclosure(eps, SLACK_PRECISION_BITS);
    let f = |s: &Rational| {
        let arm = Rational::from_integer(3.into()) * s + ratio(3, 4);
        let m = if arm > Rational::one() {
            arm
        } else {
            Rational::one()
        };
        s * m
    };
    Ok(Slack {
        lower: f(&lo),
        upper: f(&hi),
    })
}

/// Which escape from the impossibility result an assignment exhibits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Consequence {
    /// `gamma_t >= 1 - f(eps)` for both groups.
    pub approx_perfect: bool,
    /// `|rho_1 - rho_2| <= f(eps)`.
    pub approx_equal_rates: bool,
    pub slack: Slack,
}

impl Consequence {
    pub fn any(&self) -> bool {
        self.approx_perfect || self.approx_equal_rates
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxAuditReport<S = Rational> {
    pub epsilon: Rational,
    pub calibration_ok: bool,
    /// `(group, bin)` pairs violating the per-bin calibration band.
    pub calibration_violations: Vec<(Group, usize)>,
    pub gamma: PerGroup<Option<S>>,
    pub beta: PerGroup<Option<S>>,
    pub balance_positive: Balance,
    pub balance_negative: Balance,
    pub fair: bool,
    pub consequence: Consequence,
}

/// `(1-eps) b <= a <= (1+eps) b` and the same with `a`, `b` swapped.
fn within_ratio<S: Scalar>(a: &S, b: &S, lo: &S, hi: &S, tol: f64) -> bool {
    let one_way = |x: &S, y: &S| {
        (lo.clone() * y.clone()).at_most(x, tol) && x.at_most(&(hi.clone() * y.clone()), tol)
    };
    one_way(a, b) && one_way(b, a)
}

fn approx_balance<S: Scalar>(avg: &PerGroup<Option<S>>, lo: &S, hi: &S, tol: f64) -> Balance {
    match avg {
        [Some(a), Some(b)] => Balance {
            ok: within_ratio(a, b, lo, hi, tol),
            vacuous: false,
        },
        _ => Balance {
            ok: true,
            vacuous: true,
        },
    }
}

/// Audits the eps-relaxed conditions: per-bin calibration within a
/// `[1-eps, 1+eps]` band, and class averages within a factor band of each
/// other in both directions.
pub fn audit_approx<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
    eps: &Rational,
) -> Result<ApproxAuditReport<S>> {
    audit_approx_with_tolerance(inst, asg, eps, S::DEFAULT_TOLERANCE)
}

pub fn audit_approx_with_tolerance<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
    eps: &Rational,
    tol: f64,
) -> Result<ApproxAuditReport<S>> {
    require_valid(inst)?;
    asg.check_shape(inst)?;
    let slack = f_epsilon(eps)?;
    Ok(audit_approx_unchecked(inst, asg, eps, slack, tol))
}

pub(crate) fn audit_approx_unchecked<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
    eps: &Rational,
    slack: Slack,
    tol: f64,
) -> ApproxAuditReport<S> {
    let lo = S::from_rational(&(Rational::one() - eps));
    let hi = S::from_rational(&(Rational::one() + eps));
    let stats = bin_statistics_unchecked(inst, asg);
    let mut calibration_violations = Vec::new();
    for g in Group::ALL {
        let t = g.index();
        for (b, (pos, s)) in stats.positive[t]
            .iter()
            .zip(&stats.score_weighted[t])
            .enumerate()
        {
            let inside = (lo.clone() * s.clone()).at_most(pos, tol)
                && pos.at_most(&(hi.clone() * s.clone()), tol);
            if !inside {
                calibration_violations.push((g, b));
            }
        }
    }
    let avg = class_averages(inst, asg, &stats, tol);
    let balance_positive = approx_balance(&avg.gamma, &lo, &hi, tol);
    let balance_negative = approx_balance(&avg.beta, &lo, &hi, tol);
    let consequence = consequence_from(inst, &avg.gamma, slack, tol);
    let calibration_ok = calibration_violations.is_empty();
    ApproxAuditReport {
        epsilon: eps.clone(),
        fair: calibration_ok && balance_positive.ok && balance_negative.ok,
        calibration_ok,
        calibration_violations,
        gamma: avg.gamma,
        beta: avg.beta,
        balance_positive,
        balance_negative,
        consequence,
    }
}

fn consequence_from<S: Scalar>(
    inst: &Instance<S>,
    gamma: &PerGroup<Option<S>>,
    slack: Slack,
    tol: f64,
) -> Consequence {
    // The upper end of the slack enclosure: both predicates are monotone in f.
    let f = S::from_rational(&slack.upper);
    let floor = S::one() - f.clone();
    let approx_perfect = gamma
        .iter()
        .all(|g| g.as_ref().is_none_or(|g| floor.at_most(g, tol)));
    let [r1, r2] = inst.base_rates();
    let gap = if r1 >= r2 { r1 - r2 } else { r2 - r1 };
    Consequence {
        approx_perfect,
        approx_equal_rates: gap.at_most(&f, tol),
        slack,
    }
}

pub fn classify_consequence<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
    eps: &Rational,
) -> Result<Consequence> {
    require_valid(inst)?;
    asg.check_shape(inst)?;
    let slack = f_epsilon(eps)?;
    let tol = S::DEFAULT_TOLERANCE;
    let stats = bin_statistics_unchecked(inst, asg);
    let avg = class_averages(inst, asg, &stats, tol);
    Ok(consequence_from(inst, &avg.gamma, slack, tol))
}

/// Convenience: `gamma_t` of an audit as a pair, failing on an empty positive class.
pub fn require_gamma<S: Scalar>(report: &AuditReport<S>) -> Result<PerGroup<S>> {
    match &report.gamma {
        [Some(a), Some(b)] => Ok([a.clone(), b.clone()]),
        [None, _] => Err(Error::DegenerateGroup {
            group: 1,
            what: "no positive-class mass",
        }),
        _ => Err(Error::DegenerateGroup {
            group: 2,
            what: "no positive-class mass",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FeatureVector;
    use crate::scalar::integer;
    use num::traits::Zero;

    fn ex1() -> Instance {
        Instance::new(vec![
            FeatureVector::new("s1", ratio(1, 2), integer(2), integer(0)),
            FeatureVector::new("s2", ratio(1, 4), integer(0), integer(4)),
        ])
        .unwrap()
    }

    fn ex1_identity() -> RiskAssignment {
        RiskAssignment::new(
            vec![ratio(1, 2), ratio(1, 4)],
            vec![vec![integer(1), integer(0)], vec![integer(0), integer(1)]],
        )
        .unwrap()
    }

    fn exq() -> Instance {
        Instance::new(vec![
            FeatureVector::new("s1", ratio(1, 4), integer(1), integer(1)),
            FeatureVector::new("s2", ratio(3, 4), integer(1), integer(1)),
        ])
        .unwrap()
    }

    fn one_bin(inst: &Instance, v: Rational) -> RiskAssignment {
        RiskAssignment::new(vec![v], vec![vec![integer(1)]; inst.len()]).unwrap()
    }

    #[test]
    fn ex1_identity_bin_stats() {
        let s = bin_statistics(&ex1(), &ex1_identity()).unwrap();
        assert_eq!(s.assigned[0][0], integer(2));
        assert_eq!(s.positive[0][0], integer(1));
        assert_eq!(s.score_weighted[0][0], integer(1));
        assert_eq!(s.assigned[1][0], integer(0));
    }

    #[test]
    fn half_split_halves_bin_masses() {
        let inst = exq();
        let asg = RiskAssignment::new(
            vec![ratio(1, 4), ratio(1, 4), ratio(3, 4)],
            vec![
                vec![ratio(1, 2), ratio(1, 2), integer(0)],
                vec![integer(0), integer(0), integer(1)],
            ],
        )
        .unwrap();
        let s = bin_statistics(&inst, &asg).unwrap();
        for t in 0..2 {
            assert_eq!(s.assigned[t][0], ratio(1, 2));
            assert_eq!(s.assigned[t][1], ratio(1, 2));
            assert_eq!(s.positive[t][0], ratio(1, 8));
            assert_eq!(s.positive[t][1], ratio(1, 8));
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let asg = RiskAssignment::new(vec![ratio(1, 2)], vec![vec![integer(1)]]).unwrap();
        assert!(matches!(
            bin_statistics(&ex1(), &asg),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn equal_base_rates_single_bin_is_fair() {
        let r = audit_exact(&exq(), &one_bin(&exq(), ratio(1, 2))).unwrap();
        assert!(r.calibration_ok && r.balance_positive.ok && r.balance_negative.ok && r.fair);
    }

    #[test]
    fn perfect_prediction_is_fair() {
        let inst = Instance::new(vec![
            FeatureVector::new("neg", integer(0), integer(3), integer(1)),
            FeatureVector::new("pos", integer(1), integer(1), integer(5)),
        ])
        .unwrap();
        let asg = RiskAssignment::new(
            vec![integer(0), integer(1)],
            vec![vec![integer(1), integer(0)], vec![integer(0), integer(1)]],
        )
        .unwrap();
        let r = audit_exact(&inst, &asg).unwrap();
        assert!(r.fair);
        assert_eq!(r.gamma, [Some(integer(1)), Some(integer(1))]);
        assert_eq!(r.beta, [Some(integer(0)), Some(integer(0))]);
    }

    #[test]
    fn ex1_identity_is_calibrated_but_unbalanced() {
        let r = audit_exact(&ex1(), &ex1_identity()).unwrap();
        assert!(r.calibration_ok);
        assert_eq!(r.gamma, [Some(ratio(1, 2)), Some(ratio(1, 4))]);
        assert_eq!(r.beta, [Some(ratio(1, 2)), Some(ratio(1, 4))]);
        assert!(!r.balance_positive.ok && !r.balance_negative.ok && !r.fair);
        assert_eq!(r.estimated_positive, [integer(1), integer(1)]);
    }

    #[test]
    fn degenerate_class_is_vacuous() {
        let inst = Instance::new(vec![
            FeatureVector::new("a", integer(0), integer(2), integer(0)),
            FeatureVector::new("b", ratio(1, 2), integer(0), integer(2)),
        ])
        .unwrap();
        let asg = RiskAssignment::new(
            vec![integer(0), ratio(1, 2)],
            vec![vec![integer(1), integer(0)], vec![integer(0), integer(1)]],
        )
        .unwrap();
        let r = audit_exact(&inst, &asg).unwrap();
        assert_eq!(r.gamma[0], None);
        assert!(r.balance_positive.vacuous && r.balance_positive.ok);
        assert!(!r.balance_negative.vacuous);
        assert!(!r.balance_negative.ok);
    }

    #[test]
    fn parity_gap_examples() {
        assert_eq!(
            statistical_parity_gap(&ex1(), &ex1_identity()).unwrap(),
            ratio(1, 4)
        );
        assert_eq!(
            statistical_parity_gap(&exq(), &one_bin(&exq(), ratio(1, 2))).unwrap(),
            integer(0)
        );
        // a different calibrated assignment on EX1: split s1 across two bins
        let asg = RiskAssignment::new(
            vec![ratio(1, 2), ratio(1, 2), ratio(1, 4)],
            vec![
                vec![ratio(1, 3), ratio(2, 3), integer(0)],
                vec![integer(0), integer(0), integer(1)],
            ],
        )
        .unwrap();
        assert!(audit_exact(&ex1(), &asg).unwrap().calibration_ok);
        assert_eq!(statistical_parity_gap(&ex1(), &asg).unwrap(), ratio(1, 4));
    }

    #[test]
    fn slack_values() {
        let f0 = f_epsilon(&integer(0)).unwrap();
        assert!(f0.is_exact() && f0.upper.is_zero());
        let f = f_epsilon(&ratio(1, 144)).unwrap();
        assert!(f.is_exact());
        assert_eq!(f.upper, ratio(1, 12));
        assert_eq!(f_epsilon(&ratio(1, 64)).unwrap().upper, ratio(9, 64));
        assert_eq!(f_epsilon(&ratio(1, 100)).unwrap().upper, ratio(21, 200));
        assert!(f_epsilon(&ratio(-1, 2)).is_err());
    }

    #[test]
    fn slack_enclosure_for_irrational_root() {
        let f = f_epsilon(&ratio(1, 1000)).unwrap();
        assert!(!f.is_exact());
        assert!(f.lower < f.upper);
        let expected = 0.001f64.sqrt() * (3.0 * 0.001f64.sqrt() + 0.75).max(1.0);
        assert!((f.to_f64() - expected).abs() < 1e-15);
        let width = &f.upper - &f.lower;
        assert!(width < Rational::new(1.into(), num::BigInt::from(1) << 120usize));
    }

    #[test]
    fn approx_audit_examples() {
        let r = audit_approx(&ex1(), &ex1_identity(), &ratio(3, 2)).unwrap();
        assert!(r.fair);
        let r = audit_approx(&ex1(), &ex1_identity(), &ratio(1, 2)).unwrap();
        assert!(r.calibration_ok);
        assert!(!r.balance_positive.ok);
        assert!(!r.fair);
        let fair = one_bin(&exq(), ratio(1, 2));
        for eps in [integer(0), ratio(1, 1000), ratio(1, 2)] {
            assert!(audit_approx(&exq(), &fair, &eps).unwrap().fair);
        }
    }

    #[test]
    fn approx_zero_against_positive_average_fails() {
        let inst = Instance::new(vec![
            FeatureVector::new("a", ratio(1, 2), integer(1), integer(0)),
            FeatureVector::new("b", ratio(1, 2), integer(0), integer(1)),
        ])
        .unwrap();
        let asg = RiskAssignment::new(
            vec![integer(0), integer(1)],
            vec![vec![integer(1), integer(0)], vec![integer(0), integer(1)]],
        )
        .unwrap();
        let r = audit_approx(&inst, &asg, &ratio(99, 100)).unwrap();
        assert_eq!(r.gamma[0], Some(integer(0)));
        assert!(!r.balance_positive.ok);
    }

    #[test]
    fn consequence_examples() {
        let c = classify_consequence(&ex1(), &ex1_identity(), &ratio(1, 100)).unwrap();
        assert!(!c.approx_equal_rates);
        assert!(!c.approx_perfect);
        let c = classify_consequence(&exq(), &one_bin(&exq(), ratio(1, 2)), &ratio(1, 10)).unwrap();
        assert!(c.approx_equal_rates);
    }

    #[test]
    fn float_backend_audits_with_tolerance() {
        let inst = ex1().to_float();
        let asg = ex1_identity().to_float();
        let r = audit_exact(&inst, &asg).unwrap();
        assert!(r.calibration_ok);
        assert!((r.gamma[0].unwrap() - 0.5).abs() < 1e-12);
        assert!(!r.fair);
    }
}
