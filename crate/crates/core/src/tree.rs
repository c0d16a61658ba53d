//! Entropy, information gain, and a plain ID3 decision tree used as the
//! comparison baseline.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{Category, Dataset, Example, Value, CLASS_COUNT};
use crate::error::{Error, Result};

/// Gains this close to zero are treated as zero when deciding whether a
/// split is worth making, so floating-point residue never drives a split.
pub const GAIN_EPSILON: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        label: Category,
    },
    Node {
        attr: usize,
        children: BTreeMap<Value, TreeNode>,
        /// Branch value whose subtree handles unseen values at prediction
        /// time (the majority-weight branch).
        default: Value,
    },
}

impl TreeNode {
    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Node { children, .. } => {
                1 + children.values().map(TreeNode::node_count).sum::<usize>()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Node { children, .. } => {
                1 + children.values().map(TreeNode::depth).max().unwrap_or(0)
            }
        }
    }
}

fn entropy_of_weights(weights: &[u64; CLASS_COUNT]) -> Result<f64> {
    let total: u64 = weights.iter().sum();
    if total == 0 {
        return Err(Error::UndefinedEntropy);
    }
    let total = total as f64;
    let mut h = 0.0;
    for &w in weights {
        if w > 0 {
            let p = w as f64 / total;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// Class entropy of the dataset in bits, weights counting as multiplicity.
pub fn entropy(d: &Dataset) -> Result<f64> {
    entropy_of_weights(&d.class_weights())
}

fn subset_class_weights(d: &Dataset, idxs: &[usize]) -> [u64; CLASS_COUNT] {
    let mut out = [0u64; CLASS_COUNT];
    for &i in idxs {
        let e = &d.examples[i];
        out[e.label.category.index()] += e.weight;
    }
    out
}

/// Partition of a subset by one attribute's values, with per-class
/// weights. BTreeMap keeps the float summation order deterministic.
fn partition(
    d: &Dataset,
    idxs: &[usize],
    attr: usize,
) -> Result<BTreeMap<Value, (Vec<usize>, [u64; CLASS_COUNT])>> {
    let mut groups: BTreeMap<Value, (Vec<usize>, [u64; CLASS_COUNT])> = BTreeMap::new();
    for &i in idxs {
        let e = &d.examples[i];
        let v = e.values[attr];
        if matches!(v, Value::Num(_) | Value::Missing) {
            return Err(Error::NotDiscrete {
                attribute: d.schema[attr].name.clone(),
            });
        }
        let slot = groups.entry(v).or_insert_with(|| (Vec::new(), [0; CLASS_COUNT]));
        slot.0.push(i);
        slot.1[e.label.category.index()] += e.weight;
    }
    Ok(groups)
}

fn info_gain_subset(d: &Dataset, idxs: &[usize], attr: usize) -> Result<f64> {
    let class_weights = subset_class_weights(d, idxs);
    let base = entropy_of_weights(&class_weights)?;
    let total: u64 = class_weights.iter().sum();
    let groups = partition(d, idxs, attr)?;
    let mut remainder = 0.0;
    for (_, (_, weights)) in &groups {
        let group_total: u64 = weights.iter().sum();
        let h = entropy_of_weights(weights)?;
        remainder += group_total as f64 / total as f64 * h;
    }
    Ok(base - remainder)
}

/// Information gain of partitioning the dataset by one attribute's values.
pub fn info_gain(d: &Dataset, attr: usize) -> Result<f64> {
    if attr >= d.arity() {
        return Err(Error::AttributeIndex {
            index: attr,
            arity: d.arity(),
        });
    }
    let idxs: Vec<usize> = (0..d.len()).collect();
    info_gain_subset(d, &idxs, attr)
}

fn majority_label(weights: &[u64; CLASS_COUNT]) -> Category {
    let mut best = Category::Normal;
    let mut best_w = 0u64;
    for c in Category::ALL {
        let w = weights[c.index()];
        if w > best_w {
            best_w = w;
            best = c;
        }
    }
    best
}

struct Id3Builder<'a> {
    d: &'a Dataset,
    max_depth: Option<u32>,
    min_examples: u64,
}

impl Id3Builder<'_> {
    fn build(&self, idxs: Vec<usize>, used: &mut Vec<bool>, depth: u32) -> Result<TreeNode> {
        let class_weights = subset_class_weights(self.d, &idxs);
        let label = majority_label(&class_weights);
        let total: u64 = class_weights.iter().sum();
        let pure = class_weights.iter().filter(|&&w| w > 0).count() <= 1;

        let depth_reached = self.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_reached || total < self.min_examples {
            return Ok(TreeNode::Leaf { label });
        }

        // Best unused attribute by gain; ties fall to the lowest index
        // because only a strictly greater gain replaces the incumbent.
        let mut best: Option<(usize, f64)> = None;
        for attr in 0..self.d.arity() {
            if used[attr] {
                continue;
            }
            let gain = info_gain_subset(self.d, &idxs, attr)?;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((attr, gain));
            }
        }
        let Some((attr, gain)) = best else {
            return Ok(TreeNode::Leaf { label }); // attributes exhausted
        };
        if gain <= GAIN_EPSILON {
            return Ok(TreeNode::Leaf { label });
        }

        let groups = partition(self.d, &idxs, attr)?;
        let default = groups
            .iter()
            .max_by_key(|(v, (_, w))| (w.iter().sum::<u64>(), std::cmp::Reverse(**v)))
            .map(|(v, _)| *v)
            .expect("non-empty partition");
        used[attr] = true;
        let mut children = BTreeMap::new();
        for (value, (group_idxs, _)) in groups {
            children.insert(value, self.build(group_idxs, used, depth + 1)?);
        }
        used[attr] = false;
        Ok(TreeNode::Node {
            attr,
            children,
            default,
        })
    }
}

/// Grows an ID3 tree over a fully discrete dataset. A node becomes a leaf
/// when it is pure, attributes are exhausted along its path, `max_depth`
/// is reached, its weight drops under `min_examples`, or no remaining
/// attribute has positive gain. Leaf labels are the majority class.
pub fn train_id3(d: &Dataset, max_depth: Option<u32>, min_examples: u64) -> Result<TreeNode> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let builder = Id3Builder {
        d,
        max_depth,
        min_examples,
    };
    let mut used = vec![false; d.arity()];
    builder.build((0..d.len()).collect(), &mut used, 0)
}

/// Descends by the example's attribute values; branch values never seen in
/// training follow the default child.
pub fn classify_tree(t: &TreeNode, e: &Example) -> Category {
    match t {
        TreeNode::Leaf { label } => *label,
        TreeNode::Node {
            attr,
            children,
            default,
        } => {
            let child = children
                .get(&e.values[*attr])
                .unwrap_or_else(|| &children[default]);
            classify_tree(child, e)
        }
    }
}
