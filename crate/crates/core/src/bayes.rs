//! Naive Bayes probability estimation and posterior classification over
//! fully discrete datasets. Priors and conditionals are add-alpha
//! smoothed; the 41-factor products are accumulated in log space.

use std::collections::{BTreeMap, HashMap};

use crate::data::{Category, Dataset, Example, Value};
use crate::error::{Error, Result};

/// Conditional table for one attribute: P(value | class) per observed
/// value, plus the smoothed floor an unseen value receives.
#[derive(Clone, Debug)]
pub struct NBAttr {
    pub attr: usize,
    pub table: HashMap<Value, Vec<f64>>,
    pub universe: usize,
    pub floor: Vec<f64>,
}

/// Trained prior and conditional probabilities. `classes` lists the
/// categories observed in training, in declaration order; all probability
/// vectors are parallel to it.
#[derive(Clone, Debug)]
pub struct NBModel {
    pub alpha: f64,
    pub classes: Vec<Category>,
    pub class_weights: Vec<u64>,
    pub priors: Vec<f64>,
    pub attrs: Vec<NBAttr>,
    pub total_weight: u64,
}

/// Normalized posterior over the model's classes. When every class scores
/// exactly zero (possible only with alpha = 0) the posterior is flagged
/// ambiguous and falls back to the normalized priors.
#[derive(Clone, Debug)]
pub struct Posterior {
    pub classes: Vec<Category>,
    pub probs: Vec<f64>,
    pub ambiguous: bool,
}

impl Posterior {
    pub fn prob_of(&self, c: Category) -> f64 {
        self.classes
            .iter()
            .position(|&x| x == c)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }
}

/// Trains on every attribute of the schema.
pub fn train_nb(d: &Dataset, alpha: f64) -> Result<NBModel> {
    let all: Vec<usize> = (0..d.arity()).collect();
    let idxs: Vec<usize> = (0..d.len()).collect();
    train_nb_subset(d, &idxs, &all, alpha)
}

/// Trains on the given example subset using only the listed attributes
/// (the hybrid learner excludes attributes already split on).
pub fn train_nb_subset(
    d: &Dataset,
    examples: &[usize],
    active_attrs: &[usize],
    alpha: f64,
) -> Result<NBModel> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut class_weights_all = [0u64; crate::data::CLASS_COUNT];
    for &i in examples {
        let e = &d.examples[i];
        class_weights_all[e.label.category.index()] += e.weight;
    }
    let classes: Vec<Category> = Category::ALL
        .into_iter()
        .filter(|c| class_weights_all[c.index()] > 0)
        .collect();
    let class_weights: Vec<u64> = classes
        .iter()
        .map(|c| class_weights_all[c.index()])
        .collect();
    let total_weight: u64 = class_weights.iter().sum();
    let k = classes.len() as f64;
    let priors: Vec<f64> = class_weights
        .iter()
        .map(|&w| (w as f64 + alpha) / (total_weight as f64 + alpha * k))
        .collect();

    let mut attrs = Vec::with_capacity(active_attrs.len());
    for &a in active_attrs {
        let mut counts: BTreeMap<Value, Vec<u64>> = BTreeMap::new();
        for &i in examples {
            let e = &d.examples[i];
            let v = e.values[a];
            if matches!(v, Value::Num(_) | Value::Missing) {
                return Err(Error::NotDiscrete {
                    attribute: d.schema[a].name.clone(),
                });
            }
            let row = counts.entry(v).or_insert_with(|| vec![0; classes.len()]);
            let ci = classes
                .iter()
                .position(|&c| c == e.label.category)
                .expect("label category observed");
            row[ci] += e.weight;
        }
        let universe = counts.len();
        let denom: Vec<f64> = class_weights
            .iter()
            .map(|&w| w as f64 + alpha * universe as f64)
            .collect();
        let table: HashMap<Value, Vec<f64>> = counts
            .into_iter()
            .map(|(v, row)| {
                let probs = row
                    .iter()
                    .zip(&denom)
                    .map(|(&c, &dn)| (c as f64 + alpha) / dn)
                    .collect();
                (v, probs)
            })
            .collect();
        let floor: Vec<f64> = denom.iter().map(|&dn| alpha / dn).collect();
        attrs.push(NBAttr {
            attr: a,
            table,
            universe,
            floor,
        });
    }

    Ok(NBModel {
        alpha,
        classes,
        class_weights,
        priors,
        attrs,
        total_weight,
    })
}

/// Unnormalized log score per class: ln P(C) + sum of ln P(value | C).
/// Unseen attribute values contribute the smoothed floor (exact zero, and
/// so -inf, when alpha = 0).
fn log_scores(m: &NBModel, e: &Example) -> Vec<f64> {
    let mut scores: Vec<f64> = m.priors.iter().map(|p| p.ln()).collect();
    for attr in &m.attrs {
        let probs = attr.table.get(&e.values[attr.attr]);
        for (ci, score) in scores.iter_mut().enumerate() {
            let p = match probs {
                Some(row) => row[ci],
                None => attr.floor[ci],
            };
            *score += p.ln();
        }
    }
    scores
}

/// Normalized posterior for one example.
pub fn posterior_scores(m: &NBModel, e: &Example) -> Posterior {
    let scores = log_scores(m, e);
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Posterior {
            classes: m.classes.clone(),
            probs: m.priors.clone(),
            ambiguous: true,
        };
    }
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Posterior {
        classes: m.classes.clone(),
        probs: exps.iter().map(|x| x / sum).collect(),
        ambiguous: false,
    }
}

/// Highest-posterior class; exact ties (and the all-zero case) fall back
/// to the earlier category in declaration order (for the all-zero case,
/// to the prior argmax first).
pub fn classify_nb(m: &NBModel, e: &Example) -> Category {
    let scores = log_scores(m, e);
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &s) in scores.iter().enumerate() {
        if s > best_score {
            best_score = s;
            best = i;
        }
    }
    if best_score == f64::NEG_INFINITY {
        // All classes scored zero: decide on priors alone.
        let mut best_prior = f64::NEG_INFINITY;
        for (i, &p) in m.priors.iter().enumerate() {
            if p > best_prior {
                best_prior = p;
                best = i;
            }
        }
    }
    m.classes[best]
}
