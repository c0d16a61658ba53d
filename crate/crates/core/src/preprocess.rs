//! Training-data cleanup and supervised discretization: duplicate
//! merging, contradiction resolution, missing-value imputation, and
//! boundary-midpoint interval construction for continuous attributes.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::data::{Category, ClassLabel, Dataset, Example, Value, CLASS_COUNT};
use crate::error::{Error, Result};
use crate::schema::AttrKind;

/// Merges examples identical in every attribute value and label into one
/// example whose weight is the group size. First-occurrence order is kept.
pub fn deduplicate(d: Dataset) -> Dataset {
    let mut out: Vec<Example> = Vec::with_capacity(d.examples.len());
    let mut seen: HashMap<(Vec<Value>, Category), usize> = HashMap::new();
    for e in d.examples {
        let weight = e.weight;
        let key = (e.values, e.label.category);
        match seen.entry(key) {
            std::collections::hash_map::Entry::Occupied(slot) => {
                out[*slot.get()].weight += weight;
            }
            std::collections::hash_map::Entry::Vacant(slot) => {
                let values = slot.key().0.clone();
                slot.insert(out.len());
                out.push(Example {
                    values,
                    label: e.label,
                    weight,
                });
            }
        }
    }
    Dataset::new(d.schema, d.symbols, out)
}

/// Rewrites every group of examples that share attribute values but carry
/// different labels into a single example holding the majority label (by
/// weight, ties broken by category order). Returns the dataset and the
/// number of groups that were resolved. Expects deduplicated input.
pub fn resolve_contradictions(d: Dataset) -> (Dataset, usize) {
    struct Group {
        values: Vec<Value>,
        // Per category: accumulated weight and the first label seen.
        weights: [u64; CLASS_COUNT],
        labels: [Option<ClassLabel>; CLASS_COUNT],
        members: usize,
    }

    let mut groups: Vec<Group> = Vec::with_capacity(d.examples.len());
    let mut index: HashMap<Vec<Value>, usize> = HashMap::new();
    for e in d.examples {
        let slot = match index.entry(e.values) {
            std::collections::hash_map::Entry::Occupied(slot) => *slot.get(),
            std::collections::hash_map::Entry::Vacant(slot) => {
                let values = slot.key().clone();
                slot.insert(groups.len());
                groups.push(Group {
                    values,
                    weights: [0; CLASS_COUNT],
                    labels: Default::default(),
                    members: 0,
                });
                groups.len() - 1
            }
        };
        let g = &mut groups[slot];
        let ci = e.label.category.index();
        g.weights[ci] += e.weight;
        if g.labels[ci].is_none() {
            g.labels[ci] = Some(e.label);
        }
        g.members += 1;
    }

    let mut resolved = 0;
    let mut out = Vec::with_capacity(groups.len());
    for g in groups {
        if g.members > 1 {
            resolved += 1;
        }
        // Majority weight; equal weights fall back to category order, which
        // is the iteration order here.
        let mut winner = Category::Normal;
        let mut best = 0u64;
        for c in Category::ALL {
            if g.weights[c.index()] > best {
                best = g.weights[c.index()];
                winner = c;
            }
        }
        let total: u64 = g.weights.iter().sum();
        let label = g.labels[winner.index()]
            .clone()
            .expect("winner category has a recorded label");
        out.push(Example {
            values: g.values,
            label,
            weight: total,
        });
    }
    (Dataset::new(d.schema, d.symbols, out), resolved)
}

/// Weighted mode over discrete values; ties broken by value order.
fn weighted_mode(counts: &BTreeMap<Value, u64>) -> Option<Value> {
    let mut best: Option<(Value, u64)> = None;
    for (&v, &w) in counts {
        match best {
            Some((_, bw)) if w <= bw => {}
            _ => best = Some((v, w)),
        }
    }
    best.map(|(v, _)| v)
}

/// Weighted lower median: the smallest value whose cumulative weight
/// reaches half the total (rounded up).
fn weighted_median(values: &BTreeMap<Value, u64>) -> Option<Value> {
    let total: u64 = values.values().sum();
    if total == 0 {
        return None;
    }
    let threshold = total.div_ceil(2);
    let mut cum = 0;
    for (&v, &w) in values {
        cum += w;
        if cum >= threshold {
            return Some(v);
        }
    }
    None
}

/// Replaces every missing marker. Discrete slots take the most frequent
/// value among examples of the same class (global mode when the class has
/// no observation); continuous slots take the same-class median (global
/// median fallback). Errors when an attribute has no observed values at
/// all.
pub fn impute_missing(d: Dataset) -> Result<Dataset> {
    let arity = d.arity();
    // counts[attr][class] and counts[attr][CLASS_COUNT] = global.
    let mut counts: Vec<Vec<BTreeMap<Value, u64>>> =
        vec![vec![BTreeMap::new(); CLASS_COUNT + 1]; arity];
    let mut any_missing = false;
    for e in &d.examples {
        let ci = e.label.category.index();
        for (a, v) in e.values.iter().enumerate() {
            if v.is_missing() {
                any_missing = true;
                continue;
            }
            *counts[a][ci].entry(*v).or_insert(0) += e.weight;
            *counts[a][CLASS_COUNT].entry(*v).or_insert(0) += e.weight;
        }
    }
    if !any_missing {
        return Ok(d);
    }

    let pick = |attr: usize, class: usize| -> Option<Value> {
        match d.schema[attr].kind {
            AttrKind::Discrete => weighted_mode(&counts[attr][class]),
            AttrKind::Continuous => weighted_median(&counts[attr][class]),
        }
    };

    let mut examples = d.examples;
    for e in &mut examples {
        let ci = e.label.category.index();
        for a in 0..arity {
            if !e.values[a].is_missing() {
                continue;
            }
            let fill = pick(a, ci).or_else(|| pick(a, CLASS_COUNT));
            match fill {
                Some(v) => e.values[a] = v,
                None => {
                    return Err(Error::Unimputable {
                        attribute: d.schema[a].name.clone(),
                    })
                }
            }
        }
    }
    Ok(Dataset::new(d.schema, d.symbols, examples))
}

/// Interval borders for one continuous attribute. `k` borders define
/// `k + 1` intervals covering the whole line; interval `i` is
/// `(borders[i-1], borders[i]]` with open-ended extremes, so a value maps
/// to the count of borders strictly below it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttrPlan {
    pub attr: usize,
    pub borders: Vec<f64>,
}

impl AttrPlan {
    pub fn interval_of(&self, value: f64) -> u32 {
        self.borders.partition_point(|b| *b < value) as u32
    }

    pub fn interval_count(&self) -> usize {
        self.borders.len() + 1
    }

    /// Human-readable interval label, e.g. `(-inf, 5]` or `(5, +inf)`.
    pub fn interval_label(&self, i: usize) -> String {
        let lo = if i == 0 {
            "-inf".to_string()
        } else {
            self.borders[i - 1].to_string()
        };
        let hi = if i == self.borders.len() {
            "+inf)".to_string()
        } else {
            format!("{}]", self.borders[i])
        };
        format!("({lo}, {hi}")
    }
}

/// Borders for every continuous attribute plus the support floor they
/// were built with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationPlan {
    pub min_interval_support: f64,
    pub attrs: Vec<AttrPlan>,
}

impl DiscretizationPlan {
    /// Builds per-attribute plans for all continuous attributes of `d`.
    pub fn build(d: &Dataset, min_interval_support: f64) -> Result<Self> {
        let mut attrs = Vec::new();
        for a in &d.schema {
            if a.kind == AttrKind::Continuous {
                attrs.push(build_discretization(d, a.index, min_interval_support)?);
            }
        }
        Ok(Self {
            min_interval_support,
            attrs,
        })
    }

    pub fn for_attr(&self, attr: usize) -> Option<&AttrPlan> {
        self.attrs.iter().find(|p| p.attr == attr)
    }
}

/// Builds interval borders for one continuous attribute: a border at the
/// midpoint of every adjacent pair of distinct observed values whose class
/// sets differ, then greedy merging of intervals whose training weight
/// falls below `min_interval_support x total weight` (merged into the
/// lower neighbour; the first interval merges upward).
pub fn build_discretization(
    d: &Dataset,
    attr: usize,
    min_interval_support: f64,
) -> Result<AttrPlan> {
    let schema = d
        .schema
        .get(attr)
        .ok_or(Error::AttributeIndex {
            index: attr,
            arity: d.arity(),
        })?;
    if schema.kind != AttrKind::Continuous {
        return Err(Error::NotContinuous {
            attribute: schema.name.clone(),
        });
    }
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(0.0..=1.0).contains(&min_interval_support) {
        return Err(Error::InvalidParameter(format!(
            "min_interval_support must be in [0, 1], got {min_interval_support}"
        )));
    }

    // Distinct observed values with per-class weights, in numeric order.
    let mut groups: BTreeMap<u64, (f64, [u64; CLASS_COUNT])> = BTreeMap::new();
    for e in &d.examples {
        if let Value::Num(x) = e.values[attr] {
            // total_cmp order == ordered bit pattern for non-negative and
            // negative floats alike after sign flip.
            let key = ordered_bits(x);
            let entry = groups.entry(key).or_insert((x, [0; CLASS_COUNT]));
            entry.1[e.label.category.index()] += e.weight;
        }
    }

    let values: Vec<(f64, [u64; CLASS_COUNT])> = groups.into_values().collect();
    let mut borders = Vec::new();
    for pair in values.windows(2) {
        let (lo, lo_classes) = (&pair[0].0, class_set(&pair[0].1));
        let (hi, hi_classes) = (&pair[1].0, class_set(&pair[1].1));
        if lo_classes != hi_classes {
            borders.push((lo + hi) / 2.0);
        }
    }

    // Interval supports, then merge deficient intervals.
    let plan = AttrPlan { attr, borders };
    let mut supports = vec![0u64; plan.interval_count()];
    for (x, classes) in &values {
        supports[plan.interval_of(*x) as usize] += classes.iter().sum::<u64>();
    }
    let mut borders = plan.borders;
    let floor = min_interval_support * d.total_weight() as f64;
    loop {
        if borders.is_empty() {
            break;
        }
        let deficient = supports.iter().position(|&s| (s as f64) < floor);
        match deficient {
            None => break,
            Some(0) => {
                // No lower neighbour: merge into the interval above.
                borders.remove(0);
                let s = supports.remove(0);
                supports[0] += s;
            }
            Some(i) => {
                borders.remove(i - 1);
                let s = supports.remove(i);
                supports[i - 1] += s;
            }
        }
    }
    Ok(AttrPlan { attr, borders })
}

fn class_set(weights: &[u64; CLASS_COUNT]) -> [bool; CLASS_COUNT] {
    let mut set = [false; CLASS_COUNT];
    for (i, &w) in weights.iter().enumerate() {
        set[i] = w > 0;
    }
    set
}

/// Monotone key for f64 ordering (sign-flipped IEEE bits).
fn ordered_bits(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 0 {
        bits | (1 << 63)
    } else {
        !bits
    }
}

/// Replaces every raw continuous value with its interval index and stamps
/// the borders into the schema. Values outside the training range land in
/// the open-ended extreme intervals.
pub fn apply_discretization(d: Dataset, plan: &DiscretizationPlan) -> Dataset {
    let mut schema = d.schema;
    for p in &plan.attrs {
        schema[p.attr].borders = p.borders.clone();
    }
    let mut examples = d.examples;
    for e in &mut examples {
        for p in &plan.attrs {
            if let Value::Num(x) = e.values[p.attr] {
                e.values[p.attr] = Value::Interval(p.interval_of(x));
            }
        }
    }
    Dataset::new(schema, d.symbols, examples)
}

/// The trained per-attribute transformation applied to prediction-time
/// records: global fill values for missing slots (class is unknown at
/// prediction time) and the interval borders.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Preprocessor {
    pub plan: DiscretizationPlan,
    /// Per attribute: global mode (discrete) or median (continuous).
    pub fills: Vec<Value>,
}

impl Preprocessor {
    /// Imputes and discretizes one raw example in place.
    pub fn transform_example(&self, e: &mut Example) {
        for (a, v) in e.values.iter_mut().enumerate() {
            if v.is_missing() {
                *v = self.fills[a];
            }
        }
        for p in &self.plan.attrs {
            if let Value::Num(x) = e.values[p.attr] {
                e.values[p.attr] = Value::Interval(p.interval_of(x));
            }
        }
    }
}

// Serde for `Value` is only needed for the fill table; raw `Num` fills and
// discrete `Sym` fills both appear there.
impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStructVariant;
        match self {
            Value::Sym(id) => {
                let mut v = s.serialize_struct_variant("Value", 0, "sym", 1)?;
                v.serialize_field("id", id)?;
                v.end()
            }
            Value::Interval(i) => {
                let mut v = s.serialize_struct_variant("Value", 1, "interval", 1)?;
                v.serialize_field("index", i)?;
                v.end()
            }
            Value::Num(x) => {
                let mut v = s.serialize_struct_variant("Value", 2, "num", 1)?;
                v.serialize_field("value", x)?;
                v.end()
            }
            Value::Missing => s.serialize_unit_variant("Value", 3, "missing"),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(rename_all = "lowercase")]
        enum Repr {
            Sym { id: u32 },
            Interval { index: u32 },
            Num { value: f64 },
            Missing,
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Sym { id } => Value::Sym(id),
            Repr::Interval { index } => Value::Interval(index),
            Repr::Num { value } => Value::Num(value),
            Repr::Missing => Value::Missing,
        })
    }
}

/// Counters reported by the combined pipeline.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PreprocessStats {
    pub rows_in: usize,
    pub rows_after_dedup: usize,
    pub contradiction_groups: usize,
    pub total_weight: u64,
}

/// The full training-side pipeline: dedup, contradiction resolution,
/// imputation, discretization. Returns the discrete dataset, the
/// prediction-time transformer and counters for reporting.
pub fn preprocess(
    d: Dataset,
    min_interval_support: f64,
) -> Result<(Dataset, Preprocessor, PreprocessStats)> {
    let rows_in = d.len();
    let d = deduplicate(d);
    let rows_after_dedup = d.len();
    let (d, contradiction_groups) = resolve_contradictions(d);
    let d = impute_missing(d)?;

    // Global fills for prediction-time imputation, from the cleaned data.
    let arity = d.arity();
    let mut counts: Vec<BTreeMap<Value, u64>> = vec![BTreeMap::new(); arity];
    for e in &d.examples {
        for (a, v) in e.values.iter().enumerate() {
            *counts[a].entry(*v).or_insert(0) += e.weight;
        }
    }
    let mut fills = Vec::with_capacity(arity);
    for (a, attr) in d.schema.iter().enumerate() {
        let fill = match attr.kind {
            AttrKind::Discrete => weighted_mode(&counts[a]),
            AttrKind::Continuous => weighted_median(&counts[a]),
        };
        fills.push(fill.ok_or_else(|| Error::Unimputable {
            attribute: attr.name.clone(),
        })?);
    }

    let plan = DiscretizationPlan::build(&d, min_interval_support)?;
    let total_weight = d.total_weight();
    let d = apply_discretization(d, &plan);
    Ok((
        d,
        Preprocessor { plan, fills },
        PreprocessStats {
            rows_in,
            rows_after_dedup,
            contradiction_groups,
            total_weight,
        },
    ))
}
