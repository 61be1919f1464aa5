//! Loss accounting, canonical assignments, and the convex-combination
//! construction of calibrated assignments with a prescribed fairness
//! difference.

use crate::audit::{audit_unchecked, bin_statistics_unchecked, require_gamma};
use crate::error::{Error, Result};
use crate::model::{validate_instance, Group, Instance, PerGroup, RiskAssignment};
use crate::scalar::Scalar;

fn require_valid<S: Scalar>(inst: &Instance<S>) -> Result<()> {
    let report = validate_instance(inst);
    if report.ok() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(report.violations))
    }
}

/// Expected misclassification loss per group: a person scored `v` loses `v`
/// if negative and `1 - v` if positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport<S> {
    pub per_group: PerGroup<S>,
    pub total: S,
}

/// `l_t = 2 (mu_t - n_t^T P X v)`.
pub fn loss<S: Scalar>(inst: &Instance<S>, asg: &RiskAssignment<S>) -> Result<LossReport<S>> {
    require_valid(inst)?;
    asg.check_shape(inst)?;
    Ok(loss_unchecked(inst, asg))
}

pub(crate) fn loss_unchecked<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
) -> LossReport<S> {
    let stats = bin_statistics_unchecked(inst, asg);
    let mu = inst.positive_masses();
    let two = S::one() + S::one();
    let per_group = Group::ALL
        .map(|g| two.clone() * (mu[g.index()].clone() - stats.positive_score(g, asg.scores())));
    let total = per_group[0].clone() + per_group[1].clone();
    LossReport { per_group, total }
}

/// One bin per feature vector, scored with its own positive rate. Calibrated
/// and loss-minimal among calibrated assignments.
pub fn identity_assignment<S: Scalar>(inst: &Instance<S>) -> Result<RiskAssignment<S>> {
    require_valid(inst)?;
    let k = inst.len();
    let scores = inst.features().iter().map(|f| f.p.clone()).collect();
    let allocation = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { S::one() } else { S::zero() })
                .collect()
        })
        .collect();
    RiskAssignment::new(scores, allocation)
}

/// Everyone in a single bin scored with the pooled base rate.
pub fn trivial_assignment<S: Scalar>(inst: &Instance<S>) -> Result<RiskAssignment<S>> {
    require_valid(inst)?;
    let n = inst.populations();
    let mu = inst.positive_masses();
    let score = (mu[0].clone() + mu[1].clone()) / (n[0].clone() + n[1].clone());
    RiskAssignment::new(vec![score], vec![vec![S::one()]; inst.len()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Favors {
    GroupOne,
    GroupTwo,
    /// Zero difference: weakly favors both groups.
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessDifference<S> {
    /// `gamma_1 - gamma_2`.
    pub d: S,
    pub favors: Favors,
}

impl<S: Scalar> FairnessDifference<S> {
    fn from_difference(d: S, tol: f64) -> Self {
        let favors = if d.is_near_zero(tol) {
            Favors::Both
        } else if d > S::zero() {
            Favors::GroupOne
        } else {
            Favors::GroupTwo
        };
        FairnessDifference { d, favors }
    }

    pub fn weakly_favors(&self, group: Group) -> bool {
        matches!(
            (self.favors, group),
            (Favors::Both, _) | (Favors::GroupOne, Group::One) | (Favors::GroupTwo, Group::Two)
        )
    }
}

pub fn fairness_difference<S: Scalar>(
    inst: &Instance<S>,
    asg: &RiskAssignment<S>,
) -> Result<FairnessDifference<S>> {
    require_valid(inst)?;
    asg.check_shape(inst)?;
    let tol = S::DEFAULT_TOLERANCE;
    let report = audit_unchecked(inst, asg, tol);
    let [g1, g2] = require_gamma(&report)?;
    Ok(FairnessDifference::from_difference(g1 - g2, tol))
}

/// Places `asg1` scaled by `lambda` beside `asg2` scaled by `1 - lambda`.
///
/// The bins of the result are the bins of `asg1` followed by those of `asg2`;
/// bins that end up with no mass are kept. Both inputs must be calibrated on
/// `inst`. The result is calibrated and its fairness difference is
/// `lambda d1 + (1 - lambda) d2`.
pub fn interpolate<S: Scalar>(
    inst: &Instance<S>,
    asg1: &RiskAssignment<S>,
    asg2: &RiskAssignment<S>,
    lambda: &S,
) -> Result<RiskAssignment<S>> {
    require_valid(inst)?;
    asg1.check_shape(inst)?;
    asg2.check_shape(inst)?;
    if *lambda < S::zero() || *lambda > S::one() {
        return Err(Error::InvalidArgument(format!(
            "lambda {lambda} outside [0,1]"
        )));
    }
    let tol = S::DEFAULT_TOLERANCE;
    for asg in [asg1, asg2] {
        if !audit_unchecked(inst, asg, tol).calibration_ok {
            return Err(Error::NotCalibrated);
        }
    }
    let rest = S::one() - lambda.clone();
    let scores = asg1.scores().iter().chain(asg2.scores()).cloned().collect();
    let allocation = asg1
        .allocation()
        .iter()
        .zip(asg2.allocation())
        .map(|(r1, r2)| {
            r1.iter()
                .map(|x| lambda.clone() * x.clone())
                .chain(r2.iter().map(|x| rest.clone() * x.clone()))
                .collect()
        })
        .collect();
    RiskAssignment::with_tolerance(scores, allocation, tol)
}

/// Weight `lambda` with `lambda d1 + (1 - lambda) d2 = d3`.
pub fn target_lambda<S: Scalar>(d1: &S, d2: &S, d3: &S) -> Result<S> {
    let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
    if d3 < lo || d3 > hi {
        return Err(Error::InvalidArgument(format!(
            "target difference {d3} outside [{lo}, {hi}]"
        )));
    }
    if d1 == d2 {
        // d3 is pinned to the common value; any weight works.
        return Ok(S::one());
    }
    Ok((d2.clone() - d3.clone()) / (d2.clone() - d1.clone()))
}

/// Searches `candidates` for a pair of calibrated, non-trivial assignments
/// weakly favoring opposite groups and interpolates them to a zero fairness
/// difference. A candidate whose difference is already zero is returned as is.
///
/// Requires equal base rates. Trivial candidates are skipped.
pub fn find_fair_nontrivial<S: Scalar>(
    inst: &Instance<S>,
    candidates: &[RiskAssignment<S>],
) -> Result<Option<RiskAssignment<S>>> {
    require_valid(inst)?;
    let tol = S::DEFAULT_TOLERANCE;
    if !inst.has_equal_base_rates(tol) {
        let [r1, r2] = inst.base_rates();
        return Err(Error::UnequalBaseRates(r1.to_string(), r2.to_string()));
    }
    let mut scored = Vec::new();
    for asg in candidates {
        asg.check_shape(inst)?;
        let report = audit_unchecked(inst, asg, tol);
        if !report.calibration_ok {
            return Err(Error::NotCalibrated);
        }
        if !asg.is_nontrivial(inst, tol) {
            continue;
        }
        let [g1, g2] = require_gamma(&report)?;
        scored.push((asg, g1 - g2));
    }
    if let Some((asg, _)) = scored.iter().find(|(_, d)| d.is_near_zero(tol)) {
        return Ok(Some((*asg).clone()));
    }
    let up = scored.iter().find(|(_, d)| *d > S::zero());
    let down = scored.iter().find(|(_, d)| *d < S::zero());
    match (up, down) {
        (Some((a1, d1)), Some((a2, d2))) => {
            let lambda = target_lambda(d1, d2, &S::zero())?;
            interpolate(inst, a1, a2, &lambda).map(Some)
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::audit_exact;
    use crate::model::FeatureVector;
    use crate::scalar::{integer, ratio, Rational};
    use num::traits::Zero;

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

    /// Equal base rates, disjoint supports.
    fn exi() -> Instance {
        Instance::new(vec![
            FeatureVector::new("s1", ratio(1, 4), integer(1), integer(0)),
            FeatureVector::new("s2", ratio(3, 4), integer(1), integer(0)),
            FeatureVector::new("s3", ratio(1, 2), integer(0), integer(2)),
        ])
        .unwrap()
    }

    #[test]
    fn ex1_losses() {
        let inst = ex1();
        let l = loss(&inst, &identity_assignment(&inst).unwrap()).unwrap();
        assert_eq!(l.per_group, [integer(1), ratio(3, 2)]);
        assert_eq!(l.total, ratio(5, 2));
        let one_bin = RiskAssignment::new(vec![ratio(1, 3)], vec![vec![integer(1)]; 2]).unwrap();
        let l = loss(&inst, &one_bin).unwrap();
        assert_eq!(l.per_group, [ratio(4, 3), ratio(4, 3)]);
        assert_eq!(l.total, ratio(8, 3));
    }

    #[test]
    fn perfect_prediction_has_zero_loss() {
        let inst = Instance::new(vec![
            FeatureVector::new("a", integer(0), integer(1), integer(2)),
            FeatureVector::new("b", integer(1), integer(3), integer(1)),
        ])
        .unwrap();
        let l = loss(&inst, &identity_assignment(&inst).unwrap()).unwrap();
        assert_eq!(l.per_group, [integer(0), integer(0)]);
    }

    #[test]
    fn identity_shapes() {
        let a = identity_assignment(&ex1()).unwrap();
        assert_eq!(a.scores(), &[ratio(1, 2), ratio(1, 4)]);
        assert_eq!(a.allocation()[0], vec![integer(1), integer(0)]);
        let single = Instance::new(vec![FeatureVector::new(
            "x",
            ratio(1, 3),
            integer(1),
            integer(1),
        )])
        .unwrap();
        assert_eq!(identity_assignment(&single).unwrap().bin_count(), 1);
        assert!(
            audit_exact(&exq(), &identity_assignment(&exq()).unwrap())
                .unwrap()
                .fair
        );
    }

    #[test]
    fn trivial_examples() {
        let t = trivial_assignment(&exq()).unwrap();
        assert_eq!(t.scores(), &[ratio(1, 2)]);
        assert!(audit_exact(&exq(), &t).unwrap().fair);
        let t = trivial_assignment(&ex1()).unwrap();
        assert_eq!(t.scores(), &[ratio(1, 3)]);
        assert!(!audit_exact(&ex1(), &t).unwrap().calibration_ok);
        let zero = Instance::new(vec![FeatureVector::new(
            "z",
            integer(0),
            integer(1),
            integer(2),
        )])
        .unwrap();
        let t = trivial_assignment(&zero).unwrap();
        assert_eq!(t.scores(), &[integer(0)]);
        assert_eq!(loss(&zero, &t).unwrap().total, integer(0));
    }

    #[test]
    fn exi_differences() {
        let inst = exi();
        let id = identity_assignment(&inst).unwrap();
        let d = fairness_difference(&inst, &id).unwrap();
        assert_eq!(d.d, ratio(1, 8));
        assert_eq!(d.favors, Favors::GroupOne);
        let d = fairness_difference(&inst, &trivial_assignment(&inst).unwrap()).unwrap();
        assert_eq!(d.d, integer(0));
        assert!(d.weakly_favors(Group::One) && d.weakly_favors(Group::Two));
        let mirror = inst.mirrored();
        let d = fairness_difference(&mirror, &identity_assignment(&mirror).unwrap()).unwrap();
        assert_eq!(d.d, ratio(-1, 8));
    }

    #[test]
    fn difference_rejects_empty_positive_class() {
        let inst = Instance::new(vec![
            FeatureVector::new("a", integer(0), integer(1), integer(0)),
            FeatureVector::new("b", ratio(1, 2), integer(0), integer(1)),
        ])
        .unwrap();
        let r = fairness_difference(&inst, &identity_assignment(&inst).unwrap());
        assert!(matches!(r, Err(Error::DegenerateGroup { group: 1, .. })));
    }

    #[test]
    fn interpolation_examples() {
        let inst = exi();
        let id = identity_assignment(&inst).unwrap();
        let triv = trivial_assignment(&inst).unwrap();
        let mid = interpolate(&inst, &id, &triv, &ratio(1, 2)).unwrap();
        assert_eq!(mid.bin_count(), 4);
        assert!(audit_exact(&inst, &mid).unwrap().calibration_ok);
        assert_eq!(fairness_difference(&inst, &mid).unwrap().d, ratio(1, 16));

        let end = interpolate(&inst, &id, &triv, &integer(1)).unwrap();
        let a = audit_exact(&inst, &end).unwrap();
        let b = audit_exact(&inst, &id).unwrap();
        assert_eq!((a.gamma, a.beta, a.fair), (b.gamma, b.beta, b.fair));

        let same = interpolate(&inst, &id, &id, &ratio(1, 3)).unwrap();
        assert_eq!(fairness_difference(&inst, &same).unwrap().d, ratio(1, 8));
    }

    #[test]
    fn interpolation_rejects_uncalibrated() {
        let inst = ex1();
        let triv = trivial_assignment(&inst).unwrap();
        let id = identity_assignment(&inst).unwrap();
        assert_eq!(
            interpolate(&inst, &id, &triv, &ratio(1, 2)),
            Err(Error::NotCalibrated)
        );
        assert!(interpolate(&inst, &id, &id, &ratio(3, 2)).is_err());
    }

    #[test]
    fn lambda_examples() {
        let (d1, d2) = (ratio(1, 8), integer(0));
        assert_eq!(target_lambda(&d1, &d2, &ratio(1, 16)).unwrap(), ratio(1, 2));
        assert_eq!(target_lambda(&d1, &d2, &ratio(1, 8)).unwrap(), integer(1));
        assert!(target_lambda(&d1, &d2, &ratio(1, 4)).is_err());
        assert!(target_lambda(&d1, &d1, &integer(0)).is_err());
    }

    #[test]
    fn find_fair_examples() {
        let inst = exq();
        let id = identity_assignment(&inst).unwrap();
        assert_eq!(
            find_fair_nontrivial(&inst, &[id.clone()]).unwrap(),
            Some(id)
        );

        let inst = exi();
        let id = identity_assignment(&inst).unwrap();
        assert_eq!(find_fair_nontrivial(&inst, &[id]).unwrap(), None);

        assert!(matches!(
            find_fair_nontrivial(&ex1(), &[]),
            Err(Error::UnequalBaseRates(..))
        ));
    }

    #[test]
    fn find_fair_interpolates_opposite_candidates() {
        let inst = exi();
        let mirror = inst.mirrored();
        // Combine EXI with its mirror so each group has both supports.
        let mut features = inst.features().to_vec();
        for f in mirror.features() {
            let mut f = f.clone();
            f.id = format!("{}'", f.id);
            features.push(f);
        }
        let both = Instance::new(features).unwrap();
        // identity on the first half, pooled bins on the mirrored half: favors group 1
        let fav1 = RiskAssignment::new(
            vec![ratio(1, 4), ratio(3, 4), ratio(1, 2), ratio(1, 2)],
            vec![
                vec![integer(1), integer(0), integer(0), integer(0)],
                vec![integer(0), integer(1), integer(0), integer(0)],
                vec![integer(0), integer(0), integer(1), integer(0)],
                vec![integer(0), integer(0), integer(0), integer(1)],
                vec![integer(0), integer(0), integer(0), integer(1)],
                vec![integer(0), integer(0), integer(1), integer(0)],
            ],
        )
        .unwrap();
        let fav2 = RiskAssignment::new(
            vec![ratio(1, 2), ratio(1, 4), ratio(3, 4), ratio(1, 2)],
            vec![
                vec![integer(1), integer(0), integer(0), integer(0)],
                vec![integer(1), integer(0), integer(0), integer(0)],
                vec![integer(0), integer(0), integer(0), integer(1)],
                vec![integer(0), integer(1), integer(0), integer(0)],
                vec![integer(0), integer(0), integer(1), integer(0)],
                vec![integer(0), integer(0), integer(0), integer(1)],
            ],
        )
        .unwrap();
        let d1 = fairness_difference(&both, &fav1).unwrap().d;
        let d2 = fairness_difference(&both, &fav2).unwrap().d;
        assert!(d1 > Rational::zero() && d2 < Rational::zero());
        let fair = find_fair_nontrivial(&both, &[fav1, fav2]).unwrap().unwrap();
        let report = audit_exact(&both, &fair).unwrap();
        assert!(report.fair);
        assert!(fair.is_nontrivial(&both, 0.0));
    }

    #[test]
    fn loss_identity_matches_gamma_form() {
        let inst = exi();
        for asg in [
            identity_assignment(&inst).unwrap(),
            trivial_assignment(&inst).unwrap(),
        ] {
            let l = loss(&inst, &asg).unwrap();
            let r = audit_exact(&inst, &asg).unwrap();
            let mu = inst.positive_masses();
            for t in 0..2 {
                let g = r.gamma[t].clone().unwrap();
                assert_eq!(l.per_group[t], integer(2) * &mu[t] * (integer(1) - g));
            }
        }
    }
}
