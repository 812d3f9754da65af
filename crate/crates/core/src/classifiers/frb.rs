//! Evolving fuzzy-rule classifier.
//!
//! Each rule is a prototype vector labelled with a class. Samples arrive as
//! a stream; a sample's potential is a Cauchy function of its mean cosine
//! distance to the earlier samples of its class. A sample becomes a new
//! prototype when its potential strictly exceeds the potential of every
//! existing prototype of its class, otherwise it reinforces the nearest
//! one. Rule firing is `1 - cosine distance`, floored at zero.
//!
//! Mean distances are kept per class through the accumulator identity
//! `sum_i d(x, x_i) = (k - 1) - x_hat . B`, where `B` is the sum of the
//! unit-normalised earlier samples, so each update costs O(n) rather than
//! O(k n).

use serde::{Deserialize, Serialize};

use super::{TaskDistribution, TrainingSample};
use crate::encoder::FeatureVector;
use crate::error::{Error, Result};

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `1 - cos(x, y)`. A zero operand has distance 1 to everything.
pub fn cosine_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(cos_dist_unchecked(x, y))
}

fn cos_dist_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 {
        return 1.0;
    }
    1.0 - dot(x, y) / (nx * ny)
}

/// Potentials closer than this count as equal when deciding on a new rule.
const POTENTIAL_TIE: f64 = 1e-12;

fn cauchy(distance_sum: f64, others: usize) -> f64 {
    if others == 0 {
        1.0
    } else {
        1.0 / (1.0 + distance_sum.max(0.0) / others as f64)
    }
}

/// Potential of `x` given the samples seen before it, by direct summation.
pub fn potential(x: &[f64], previous: &[Vec<f64>]) -> Result<f64> {
    let mut sum = 0.0;
    for p in previous {
        sum += cosine_distance(x, p)?;
    }
    Ok(cauchy(sum, previous.len()))
}

fn unit(x: &[f64]) -> Vec<f64> {
    let n = norm(x);
    if n == 0.0 {
        vec![0.0; x.len()]
    } else {
        x.iter().map(|v| v / n).collect()
    }
}

/// Running sum of unit-normalised samples of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAccumulator {
    pub unit_sum: Vec<f64>,
    pub count: usize,
}

impl ClassAccumulator {
    pub fn new(dimension: usize) -> Self {
        ClassAccumulator {
            unit_sum: vec![0.0; dimension],
            count: 0,
        }
    }

    /// Sum of cosine distances from `x` to every accumulated sample.
    pub fn distance_sum(&self, x: &[f64]) -> f64 {
        self.count as f64 - dot(&unit(x), &self.unit_sum)
    }

    /// Potential of `x` against the accumulated samples.
    pub fn potential(&self, x: &[f64]) -> f64 {
        cauchy(self.distance_sum(x), self.count)
    }

    pub fn add(&mut self, x: &[f64]) {
        for (b, u) in self.unit_sum.iter_mut().zip(unit(x)) {
            *b += u;
        }
        self.count += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prototype {
    pub class: usize,
    pub vector: Vec<f64>,
    pub potential: f64,
    pub support: usize,
    /// Sum of distances to every other sample of the class seen so far.
    distance_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrbModel {
    dimension: usize,
    prototypes: Vec<Prototype>,
    classes: Vec<ClassAccumulator>,
}

impl FrbModel {
    pub fn new(dimension: usize, num_classes: usize) -> Self {
        FrbModel {
            dimension,
            prototypes: Vec::new(),
            classes: vec![ClassAccumulator::new(dimension); num_classes],
        }
    }

    /// Learns from `samples` in the given order.
    pub fn train(samples: &[TrainingSample], num_classes: usize) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::Training("no training samples".into()))?;
        let mut model = FrbModel::new(first.features.len(), num_classes);
        for s in samples {
            model.learn(&s.features.to_f64(), s.label)?;
        }
        Ok(model)
    }

    /// One step of the evolving update.
    pub fn learn(&mut self, x: &[f64], class: usize) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::LengthMismatch(x.len(), self.dimension));
        }
        if class >= self.classes.len() {
            return Err(Error::invalid(format!("class {class} out of range")));
        }
        let acc = &self.classes[class];
        let earlier = acc.count;
        if earlier == 0 {
            self.prototypes.push(Prototype {
                class,
                vector: x.to_vec(),
                potential: 1.0,
                support: 1,
                distance_sum: 0.0,
            });
            self.classes[class].add(x);
            return Ok(());
        }

        let own_sum = acc.distance_sum(x).max(0.0);
        let own_potential = cauchy(own_sum, earlier);

        let mut beats_all = true;
        let mut nearest: Option<(f64, usize)> = None;
        for (i, p) in self.prototypes.iter_mut().enumerate() {
            if p.class != class {
                continue;
            }
            let d = cos_dist_unchecked(&p.vector, x).max(0.0);
            p.distance_sum += d;
            p.potential = cauchy(p.distance_sum, earlier);
            // The two potentials come from different summation orders, so
            // ties are only recognised up to rounding.
            if own_potential <= p.potential + POTENTIAL_TIE {
                beats_all = false;
            }
            if nearest.is_none_or(|(best, _)| d < best) {
                nearest = Some((d, i));
            }
        }

        if beats_all {
            self.prototypes.push(Prototype {
                class,
                vector: x.to_vec(),
                potential: own_potential,
                support: 1,
                distance_sum: own_sum,
            });
        } else if let Some((_, i)) = nearest {
            self.prototypes[i].support += 1;
        }
        self.classes[class].add(x);
        Ok(())
    }

    pub fn prototypes(&self) -> &[Prototype] {
        &self.prototypes
    }

    pub fn class_accumulator(&self, class: usize) -> &ClassAccumulator {
        &self.classes[class]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Per class, the strongest firing among its rules. If no rule fires,
    /// falls back to the share of training samples per class.
    pub fn predict(&self, features: &FeatureVector) -> Result<TaskDistribution> {
        self.predict_dense(&features.to_f64())
    }

    pub fn predict_dense(&self, x: &[f64]) -> Result<TaskDistribution> {
        if x.len() != self.dimension {
            return Err(Error::LengthMismatch(x.len(), self.dimension));
        }
        let mut scores = vec![0.0f64; self.classes.len()];
        for p in &self.prototypes {
            let firing = (1.0 - cos_dist_unchecked(x, &p.vector)).max(0.0);
            if firing > scores[p.class] {
                scores[p.class] = firing;
            }
        }
        if scores.iter().all(|&s| s == 0.0) {
            let total: usize = self.classes.iter().map(|c| c.count).sum();
            if total > 0 {
                for (s, c) in scores.iter_mut().zip(&self.classes) {
                    *s = c.count as f64 / total as f64;
                }
            }
        }
        Ok(TaskDistribution::new(scores))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(bits: Vec<u8>, label: usize) -> TrainingSample {
        TrainingSample {
            features: FeatureVector { bits },
            symbolic: vec![],
            label,
        }
    }

    #[test]
    fn cosine_fixed_points() {
        assert!(cosine_distance(&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0]).unwrap().abs() < 1e-15);
        assert_eq!(cosine_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        let d = cosine_distance(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((d - (1.0 - 2f64.sqrt() / 2.0)).abs() < 1e-12);
        assert!((d - 0.29289).abs() < 1e-5);
        assert_eq!(cosine_distance(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(cosine_distance(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn potential_values() {
        let x = vec![1.0, 0.0];
        assert_eq!(potential(&x, &[]).unwrap(), 1.0);
        assert_eq!(potential(&x, &[vec![0.0, 1.0]]).unwrap(), 0.5);
        // Two earlier samples at distance 0.5 each: cos = 0.5 at 60 degrees.
        let a = vec![0.5, 3f64.sqrt() / 2.0];
        let p = potential(&x, &[a.clone(), a]).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn one_sample_per_class() {
        let s = vec![sample(vec![1, 0, 1], 0), sample(vec![0, 1, 1], 1)];
        let m = FrbModel::train(&s, 2).unwrap();
        assert_eq!(m.prototypes().len(), 2);
        for x in &s {
            assert_eq!(m.predict(&x.features).unwrap().argmax(), x.label);
        }
    }

    #[test]
    fn duplicates_do_not_create_rules() {
        let s: Vec<_> = (0..10).map(|_| sample(vec![1, 0, 1, 1], 0)).collect();
        let m = FrbModel::train(&s, 2).unwrap();
        assert_eq!(m.prototypes().len(), 1);
        assert_eq!(m.prototypes()[0].support, 10);
        assert_eq!(m.prototypes()[0].potential, 1.0);
    }

    #[test]
    fn repeated_vectors_never_duplicate_a_rule() {
        let patterns: Vec<Vec<u8>> = (0..4)
            .map(|p| (0..40).map(|i| u8::from((i * 7 + p * 3) % 5 < 2)).collect())
            .collect();
        let mut rng = crate::rng::SeededRng::new(12);
        let s: Vec<_> = (0..400).map(|_| sample(patterns[rng.below(4)].clone(), 0)).collect();
        let m = FrbModel::train(&s, 1).unwrap();
        let protos = m.prototypes();
        for (i, a) in protos.iter().enumerate() {
            assert!(protos[i + 1..].iter().all(|b| b.vector != a.vector));
        }
    }

    #[test]
    fn central_sample_becomes_prototype() {
        // An outlier first, then samples clustered around a centre.
        let s = vec![
            sample(vec![0, 0, 0, 1], 0),
            sample(vec![1, 1, 0, 0], 0),
            sample(vec![1, 1, 0, 0], 0),
        ];
        let m = FrbModel::train(&s, 1).unwrap();
        assert_eq!(m.prototypes().len(), 2);
        // Prototype potentials stay in (0, 1].
        for p in m.prototypes() {
            assert!(p.potential > 0.0 && p.potential <= 1.0);
        }
    }

    #[test]
    fn prototype_wins_its_class() {
        let s = vec![
            sample(vec![1, 1, 0, 0], 0),
            sample(vec![0, 0, 1, 1], 1),
        ];
        let m = FrbModel::train(&s, 2).unwrap();
        let d = m.predict(&FeatureVector { bits: vec![1, 1, 0, 0] }).unwrap();
        assert_eq!(d.argmax(), 0);
        assert_eq!(d.scores[1], 0.0);
    }

    #[test]
    fn no_firing_falls_back_to_priors() {
        let s = vec![sample(vec![1, 0, 0], 0), sample(vec![1, 0, 0], 1), sample(vec![1, 0, 0], 1)];
        let m = FrbModel::train(&s, 2).unwrap();
        let d = m.predict(&FeatureVector { bits: vec![0, 0, 1] }).unwrap();
        assert_eq!(d.argmax(), 1);
    }

    #[test]
    fn deterministic_training() {
        let s: Vec<_> = (0..30u8)
            .map(|i| sample(vec![i % 2, (i / 2) % 2, (i / 3) % 2, 1], (i % 3) as usize))
            .collect();
        assert_eq!(FrbModel::train(&s, 3).unwrap(), FrbModel::train(&s, 3).unwrap());
    }

    proptest! {
        #[test]
        fn cosine_is_symmetric_and_bounded(
            x in prop::collection::vec(0.0f64..5.0, 6),
            y in prop::collection::vec(0.0f64..5.0, 6),
        ) {
            let a = cosine_distance(&x, &y).unwrap();
            let b = cosine_distance(&y, &x).unwrap();
            prop_assert!((a - b).abs() < 1e-15);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
            if x.iter().any(|&v| v > 0.0) {
                prop_assert!(cosine_distance(&x, &x).unwrap().abs() < 1e-12);
            }
        }

        #[test]
        fn accumulator_matches_direct_sum(stream in prop::collection::vec(prop::collection::vec(0u8..2, 8), 1..60)) {
            let mut acc = ClassAccumulator::new(8);
            let mut seen: Vec<Vec<f64>> = Vec::new();
            for bits in stream {
                let x: Vec<f64> = bits.iter().map(|&b| f64::from(b)).collect();
                let direct = potential(&x, &seen).unwrap();
                prop_assert!((acc.potential(&x) - direct).abs() <= 1e-9);
                acc.add(&x);
                seen.push(x);
            }
        }
    }
}
