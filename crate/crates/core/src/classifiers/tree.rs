//! Multiway decision tree over categorical attributes, grown top-down by
//! information gain.

use serde::{Deserialize, Serialize};

use super::{classes_seen, TaskDistribution, TrainingSample};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// Nodes with fewer samples become leaves.
    pub min_leaf: usize,
    /// Additive smoothing of leaf class counts.
    pub laplace: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: 2,
            laplace: 1.0,
        }
    }
}

/// Shannon entropy in bits of a class histogram.
pub fn entropy(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid("entropy of an empty histogram"));
    }
    let n = total as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}

/// Entropy reduction from splitting `rows` on `attribute`.
///
/// `rows[i]` holds the attribute values of sample `i` and `labels[i]` its
/// class. Returns 0 for an empty sample set.
pub fn information_gain(rows: &[&[u8]], labels: &[usize], attribute: usize, num_classes: usize) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let mut parent = vec![0usize; num_classes];
    let mut by_value: Vec<Vec<usize>> = Vec::new();
    for (row, &label) in rows.iter().zip(labels) {
        let v = row[attribute] as usize;
        if by_value.len() <= v {
            by_value.resize_with(v + 1, || vec![0; num_classes]);
        }
        by_value[v][label] += 1;
        parent[label] += 1;
    }
    gain_from_counts(&parent, &by_value)
}

fn gain_from_counts(parent: &[usize], by_value: &[Vec<usize>]) -> f64 {
    let n: usize = parent.iter().sum();
    let h = entropy(parent).unwrap_or(0.0);
    let remainder: f64 = by_value
        .iter()
        .filter_map(|counts| {
            let m: usize = counts.iter().sum();
            (m > 0).then(|| m as f64 / n as f64 * entropy(counts).unwrap_or(0.0))
        })
        .sum();
    h - remainder
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        counts: Vec<usize>,
    },
    Split {
        attribute: usize,
        counts: Vec<usize>,
        /// Node index per attribute value; `None` falls back to this node's counts.
        children: Vec<Option<usize>>,
    },
}

impl Node {
    #[cfg(test)]
    fn counts(&self) -> &[usize] {
        match self {
            Node::Leaf { counts } | Node::Split { counts, .. } => counts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    nodes: Vec<Node>,
    arities: Vec<usize>,
    seen: Vec<bool>,
    laplace: f64,
}

struct Builder<'a> {
    samples: &'a [TrainingSample],
    arities: &'a [usize],
    num_classes: usize,
    min_leaf: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn histogram(&self, idx: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &i in idx {
            counts[self.samples[i].label] += 1;
        }
        counts
    }

    /// Best (gain, attribute) among unused attributes that take more than
    /// one value on `idx`; ties keep the lowest attribute index.
    fn best_split(&self, idx: &[usize], used: &[bool], parent: &[usize]) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (a, &arity) in self.arities.iter().enumerate() {
            if used[a] {
                continue;
            }
            let mut by_value = vec![vec![0usize; self.num_classes]; arity];
            for &i in idx {
                let s = &self.samples[i];
                by_value[s.symbolic[a] as usize][s.label] += 1;
            }
            let nonempty = by_value.iter().filter(|c| c.iter().any(|&x| x > 0)).count();
            if nonempty < 2 {
                continue;
            }
            let gain = gain_from_counts(parent, &by_value);
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, a));
            }
        }
        best.map(|(_, a)| a)
    }

    fn grow(&mut self, idx: Vec<usize>, used: &mut Vec<bool>) -> usize {
        let counts = self.histogram(&idx);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let split = if pure || idx.len() < self.min_leaf {
            None
        } else {
            self.best_split(&idx, used, &counts)
        };
        let id = self.nodes.len();
        let Some(attribute) = split else {
            self.nodes.push(Node::Leaf { counts });
            return id;
        };
        self.nodes.push(Node::Leaf { counts: Vec::new() });
        let arity = self.arities[attribute];
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); arity];
        for i in idx {
            parts[self.samples[i].symbolic[attribute] as usize].push(i);
        }
        used[attribute] = true;
        let children = parts
            .into_iter()
            .map(|part| (!part.is_empty()).then(|| self.grow(part, used)))
            .collect();
        used[attribute] = false;
        self.nodes[id] = Node::Split {
            attribute,
            counts,
            children,
        };
        id
    }
}

impl TreeModel {
    /// Grows a tree on `samples`. `arities[a]` is the number of values of
    /// symbolic attribute `a`.
    pub fn train(
        samples: &[TrainingSample],
        arities: &[usize],
        num_classes: usize,
        params: &TreeParams,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Training("no training samples".into()));
        }
        for s in samples {
            if s.symbolic.len() != arities.len() {
                return Err(Error::LengthMismatch(s.symbolic.len(), arities.len()));
            }
            if s.symbolic.iter().zip(arities).any(|(&v, &a)| v as usize >= a) {
                return Err(Error::invalid("attribute value exceeds its arity"));
            }
        }
        let mut b = Builder {
            samples,
            arities,
            num_classes,
            min_leaf: params.min_leaf.max(1),
            nodes: Vec::new(),
        };
        let mut used = vec![false; arities.len()];
        b.grow((0..samples.len()).collect(), &mut used);
        Ok(TreeModel {
            nodes: b.nodes,
            arities: arities.to_vec(),
            seen: classes_seen(samples, num_classes),
            laplace: params.laplace,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.seen.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.arities.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Smoothed class frequencies; classes absent from training score 0.
    fn smoothed(&self, counts: &[usize]) -> TaskDistribution {
        let seen = self.seen.iter().filter(|&&s| s).count() as f64;
        let n: usize = counts.iter().sum();
        let denom = n as f64 + self.laplace * seen;
        let scores = counts
            .iter()
            .zip(&self.seen)
            .map(|(&c, &s)| if s { (c as f64 + self.laplace) / denom } else { 0.0 })
            .collect();
        TaskDistribution::new(scores)
    }

    pub fn predict(&self, symbolic: &[u8]) -> Result<TaskDistribution> {
        if symbolic.len() != self.arities.len() {
            return Err(Error::LengthMismatch(symbolic.len(), self.arities.len()));
        }
        let mut node = &self.nodes[0];
        loop {
            match node {
                Node::Leaf { counts } => return Ok(self.smoothed(counts)),
                Node::Split {
                    attribute,
                    children,
                    counts,
                } => match children.get(symbolic[*attribute] as usize).copied().flatten() {
                    Some(child) => node = &self.nodes[child],
                    None => return Ok(self.smoothed(counts)),
                },
            }
        }
    }

    /// Leaf distribution for raw counts; exposed for tests of the smoothing rule.
    pub fn leaf_distribution(&self, counts: &[usize]) -> TaskDistribution {
        self.smoothed(counts)
    }

    #[cfg(test)]
    fn max_depth_attribute_repeats(&self) -> bool {
        fn walk(t: &TreeModel, id: usize, path: &mut Vec<usize>) -> bool {
            match &t.nodes[id] {
                Node::Leaf { .. } => false,
                Node::Split {
                    attribute,
                    children,
                    ..
                } => {
                    if path.contains(attribute) {
                        return true;
                    }
                    path.push(*attribute);
                    let r = children.iter().flatten().any(|&c| walk(t, c, path));
                    path.pop();
                    r
                }
            }
        }
        walk(self, 0, &mut Vec::new())
    }

    #[cfg(test)]
    fn root_counts(&self) -> &[usize] {
        self.nodes[0].counts()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::FeatureVector;
    use proptest::prelude::*;

    fn sample(symbolic: Vec<u8>, label: usize) -> TrainingSample {
        TrainingSample {
            features: FeatureVector { bits: vec![] },
            symbolic,
            label,
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[4, 4]).unwrap(), 1.0);
        assert_eq!(entropy(&[8, 0]).unwrap(), 0.0);
        // -(9/14)log2(9/14) - (5/14)log2(5/14)
        assert!((entropy(&[9, 5]).unwrap() - 0.940_286).abs() < 1e-5);
        assert!(entropy(&[0, 0]).is_err());
    }

    #[test]
    fn gain_of_perfect_and_constant_attributes() {
        let rows: Vec<Vec<u8>> = vec![vec![0, 1], vec![0, 1], vec![1, 1], vec![1, 1]];
        let refs: Vec<&[u8]> = rows.iter().map(Vec::as_slice).collect();
        let labels = [0, 0, 1, 1];
        assert!((information_gain(&refs, &labels, 0, 2) - 1.0).abs() < 1e-12);
        assert_eq!(information_gain(&refs, &labels, 1, 2), 0.0);
    }

    #[test]
    fn single_class_is_a_leaf() {
        let s: Vec<_> = (0..5).map(|i| sample(vec![i % 3, 1], 1)).collect();
        let t = TreeModel::train(&s, &[3, 3], 2, &TreeParams::default()).unwrap();
        assert_eq!(t.num_nodes(), 1);
    }

    #[test]
    fn laplace_leaf() {
        let s = vec![sample(vec![0], 0), sample(vec![1], 1)];
        let t = TreeModel::train(&s, &[2], 2, &TreeParams::default()).unwrap();
        let d = t.leaf_distribution(&[3, 1]);
        assert!((d.scores[0] - 4.0 / 6.0).abs() < 1e-15);
        assert!((d.scores[1] - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn xor_is_learned_to_purity() {
        let s = vec![
            sample(vec![0, 0], 0),
            sample(vec![0, 1], 1),
            sample(vec![1, 0], 1),
            sample(vec![1, 1], 0),
        ];
        let p = TreeParams { min_leaf: 1, ..Default::default() };
        let t = TreeModel::train(&s, &[2, 2], 2, &p).unwrap();
        for x in &s {
            assert_eq!(t.predict(&x.symbolic).unwrap().argmax(), x.label);
        }
    }

    #[test]
    fn unseen_value_uses_parent_distribution() {
        let s = vec![sample(vec![0], 0), sample(vec![0], 0), sample(vec![1], 1)];
        let t = TreeModel::train(&s, &[3], 2, &TreeParams { min_leaf: 1, ..Default::default() }).unwrap();
        let d = t.predict(&[2]).unwrap();
        assert_eq!(d, t.leaf_distribution(t.root_counts()));
        assert_eq!(d.argmax(), 0);
    }

    #[test]
    fn unseen_class_scores_zero() {
        let s = vec![sample(vec![0], 0), sample(vec![1], 2)];
        let t = TreeModel::train(&s, &[2], 3, &TreeParams::default()).unwrap();
        let d = t.predict(&[0]).unwrap();
        assert_eq!(d.scores[1], 0.0);
        assert!(d.scores[0] > 0.0 && d.scores[2] > 0.0);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let s = vec![sample(vec![0, 1], 0)];
        let t = TreeModel::train(&s, &[2, 2], 2, &TreeParams::default()).unwrap();
        assert!(t.predict(&[0]).is_err());
    }

    fn arb_dataset() -> impl Strategy<Value = Vec<(Vec<u8>, usize)>> {
        prop::collection::vec((prop::collection::vec(0u8..3, 4), 0usize..3), 1..40)
    }

    proptest! {
        #[test]
        fn gain_is_bounded(data in arb_dataset(), attr in 0usize..4) {
            let rows: Vec<&[u8]> = data.iter().map(|(r, _)| r.as_slice()).collect();
            let labels: Vec<usize> = data.iter().map(|(_, l)| *l).collect();
            let mut counts = vec![0; 3];
            for &l in &labels { counts[l] += 1; }
            let h = entropy(&counts).unwrap();
            prop_assert!(h >= 0.0 && h <= 3f64.log2() + 1e-12);
            let g = information_gain(&rows, &labels, attr, 3);
            prop_assert!(g >= -1e-12 && g <= h + 1e-12);
        }

        #[test]
        fn consistent_data_is_recovered(data in arb_dataset()) {
            // Make labels a function of the attribute values.
            let data: Vec<(Vec<u8>, usize)> = data
                .into_iter()
                .map(|(r, _)| { let l = (r[0] as usize + 2 * r[2] as usize + r[3] as usize) % 3; (r, l) })
                .collect();
            let s: Vec<_> = data.iter().map(|(r, l)| sample(r.clone(), *l)).collect();
            let p = TreeParams { min_leaf: 1, ..Default::default() };
            let t = TreeModel::train(&s, &[3; 4], 3, &p).unwrap();
            prop_assert!(!t.max_depth_attribute_repeats());
            for x in &s {
                prop_assert_eq!(t.predict(&x.symbolic).unwrap().argmax(), x.label);
            }
            prop_assert_eq!(&t, &TreeModel::train(&s, &[3; 4], 3, &p).unwrap());
        }
    }
}
