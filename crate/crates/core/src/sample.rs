//! Seeded generators of instances and assignments with small rational
//! entries. Everything here is deterministic given the RNG state.

use num::traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{FeatureVector, Instance, RiskAssignment};
use crate::scalar::{integer, ratio, Rational, Scalar};

/// RNG for candidate `index` of a run seeded with `seed`. Independent streams
/// let candidates be generated in any order.
pub fn candidate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_p(rng: &mut impl Rng, denom: i64) -> Rational {
    ratio(rng.gen_range(0..=denom), denom)
}

fn random_count(rng: &mut impl Rng, max: i64) -> Rational {
    integer(rng.gen_range(1..=max))
}

/// Random instance with `k` feature vectors. Each feature vector is present in
/// group 1, group 2, or both; both groups are guaranteed non-empty.
pub fn random_instance(rng: &mut impl Rng, k: usize, p_denom: i64, max_count: i64) -> Instance {
    assert!(k >= 1);
    loop {
        let features: Vec<_> = (0..k)
            .map(|i| {
                let (c1, c2) = match rng.gen_range(0..4) {
                    0 => (random_count(rng, max_count), Rational::zero()),
                    1 => (Rational::zero(), random_count(rng, max_count)),
                    _ => (random_count(rng, max_count), random_count(rng, max_count)),
                };
                FeatureVector::new(format!("f{}", i + 1), random_p(rng, p_denom), c1, c2)
            })
            .collect();
        if let Ok(inst) = Instance::new(features) {
            return inst;
        }
    }
}

/// Instance whose positive rates are all 0 or 1.
pub fn perfect_prediction_instance(rng: &mut impl Rng, k: usize, max_count: i64) -> Instance {
    loop {
        let features: Vec<_> = (0..k)
            .map(|i| {
                let p = integer(rng.gen_range(0..=1));
                let c1 = integer(rng.gen_range(0..=max_count));
                let c2 = integer(rng.gen_range(0..=max_count));
                FeatureVector::new(format!("f{}", i + 1), p, c1, c2)
            })
            .collect();
        if let Ok(inst) = Instance::new(features) {
            return inst;
        }
    }
}

/// Bin scored 0 for `p = 0` and bin scored 1 for `p = 1`.
pub fn two_bin_assignment(inst: &Instance) -> RiskAssignment {
    let allocation = inst
        .features()
        .iter()
        .map(|f| {
            if f.p.is_zero() {
                vec![Rational::one(), Rational::zero()]
            } else {
                vec![Rational::zero(), Rational::one()]
            }
        })
        .collect();
    RiskAssignment::new(vec![Rational::zero(), Rational::one()], allocation)
        .expect("two-bin assignment is well formed")
}

/// Instance with equal base rates: shared feature vectors with random masses,
/// plus one balancing feature vector per group that pulls its base rate to a
/// common target.
pub fn equal_base_rate_instance(
    rng: &mut impl Rng,
    shared: usize,
    p_denom: i64,
    max_count: i64,
) -> Instance {
    let target = ratio(rng.gen_range(1..=3), 4);
    let mut features: Vec<FeatureVector> = (0..shared)
        .map(|i| {
            FeatureVector::new(
                format!("f{}", i + 1),
                random_p(rng, p_denom),
                integer(rng.gen_range(0..=max_count)),
                integer(rng.gen_range(0..=max_count)),
            )
        })
        .collect();
    for (t, name) in [(0usize, "bal1"), (1, "bal2")] {
        let n: Rational = features.iter().map(|f| f.counts[t].clone()).sum();
        let mu: Rational = features.iter().map(|f| &f.counts[t] * &f.p).sum();
        // balancing mass 4(N + 1) keeps the balancing rate inside [0, 1]
        let mass = integer(4) * (&n + Rational::one());
        let p = (&target * (&n + &mass) - mu) / &mass;
        let mut counts = [Rational::zero(), Rational::zero()];
        counts[t] = mass;
        features.push(FeatureVector {
            id: name.to_string(),
            p,
            counts,
        });
    }
    Instance::new(features).expect("balanced instance is valid")
}

/// Instance built from clusters; inside a cluster group 2's masses are a fixed
/// multiple of group 1's, so any bin drawing only on one cluster is
/// calibrated within groups when scored with its pooled rate.
pub fn clustered_instance(
    rng: &mut impl Rng,
    clusters: usize,
    per_cluster: usize,
    p_denom: i64,
) -> (Instance, Vec<usize>) {
    let mut features = Vec::new();
    let mut cluster_of = Vec::new();
    for c in 0..clusters {
        let factor = ratio(rng.gen_range(1..=4), rng.gen_range(1..=4));
        for _ in 0..per_cluster {
            let n1 = integer(rng.gen_range(1..=6));
            let n2 = &n1 * &factor;
            features.push(FeatureVector::new(
                format!("f{}", features.len() + 1),
                random_p(rng, p_denom),
                n1,
                n2,
            ));
            cluster_of.push(c);
        }
    }
    (
        Instance::new(features).expect("clustered instance is valid"),
        cluster_of,
    )
}

/// Random row of `bins` fractions with denominators built from small integer
/// weights. `spread` bounds how many bins receive mass.
pub fn random_row<S: Scalar>(rng: &mut impl Rng, bins: usize, spread: usize) -> Vec<S> {
    let mut chosen: Vec<usize> = (0..bins).collect();
    chosen.shuffle(rng);
    chosen.truncate(rng.gen_range(1..=spread.clamp(1, bins)));
    let weights: Vec<i64> = chosen.iter().map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = weights.iter().sum();
    let mut row = vec![S::zero(); bins];
    for (b, w) in chosen.into_iter().zip(weights) {
        row[b] = S::from_ratio(w, total);
    }
    row
}

/// Random fractional assignment with pooled bin scores.
pub fn random_pooled_assignment<S: Scalar>(
    rng: &mut impl Rng,
    inst: &Instance<S>,
    max_bins: usize,
) -> RiskAssignment<S> {
    let bins = rng.gen_range(1..=max_bins.max(1));
    let spread = rng.gen_range(1..=bins);
    let allocation = (0..inst.len())
        .map(|_| random_row(rng, bins, spread))
        .collect();
    RiskAssignment::with_pooled_scores(inst, allocation).expect("pooled assignment is well formed")
}

/// Calibrated by construction: bins are private to a class of feature
/// vectors (same `class_of` value) within which pooling keeps both groups'
/// positive fractions equal. Use equal-`p` classes, or clusters from
/// [`clustered_instance`].
pub fn random_calibrated_assignment<S: Scalar>(
    rng: &mut impl Rng,
    inst: &Instance<S>,
    class_of: &[usize],
) -> RiskAssignment<S> {
    let classes = class_of.iter().copied().max().map_or(0, |m| m + 1);
    let per_class: Vec<usize> = (0..classes).map(|_| rng.gen_range(1..=3)).collect();
    let offsets: Vec<usize> = per_class
        .iter()
        .scan(0, |acc, n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect();
    let bins: usize = per_class.iter().sum();
    let allocation = class_of
        .iter()
        .map(|&c| {
            let local = random_row(rng, per_class[c], per_class[c]);
            let mut row = vec![S::zero(); bins];
            for (j, x) in local.into_iter().enumerate() {
                row[offsets[c] + j] = x;
            }
            row
        })
        .collect();
    RiskAssignment::with_pooled_scores(inst, allocation)
        .expect("calibrated assignment is well formed")
}

/// Class index per feature vector grouping equal positive rates.
pub fn equal_p_classes(inst: &Instance) -> Vec<usize> {
    let mut seen: Vec<&Rational> = Vec::new();
    inst.features()
        .iter()
        .map(|f| match seen.iter().position(|p| **p == f.p) {
            Some(i) => i,
            None => {
                seen.push(&f.p);
                seen.len() - 1
            }
        })
        .collect()
}

/// Fractional candidate for exhaustive-style searches: a dense or sparse
/// random pooled assignment, or one calibrated by construction over equal-`p`
/// classes.
pub fn search_candidate(rng: &mut impl Rng, inst: &Instance) -> RiskAssignment {
    search_candidate_in(rng, inst, &equal_p_classes(inst))
}

/// [`search_candidate`] over any backend, with the equal-`p` classes supplied
/// by the caller. Consumes the same random draws for every backend.
pub fn search_candidate_in<S: Scalar>(
    rng: &mut impl Rng,
    inst: &Instance<S>,
    classes: &[usize],
) -> RiskAssignment<S> {
    let k = inst.len();
    match rng.gen_range(0..3) {
        0 => random_pooled_assignment(rng, inst, k + 1),
        1 => {
            let bins = rng.gen_range(1..=k + 1);
            let allocation = (0..k).map(|_| random_row(rng, bins, 2)).collect();
            RiskAssignment::with_pooled_scores(inst, allocation)
                .expect("pooled assignment is well formed")
        }
        _ => random_calibrated_assignment(rng, inst, classes),
    }
}
