//! Small dataset builders shared by unit tests.

use crate::data::{Category, ClassLabel, Dataset, Example, SymbolTable, Value};
use crate::schema::{AttrKind, AttributeSchema};

/// Builds a dataset from a compact notation. `kinds` holds one char per
/// attribute: `d` discrete, `c` continuous. Each row is a comma-separated
/// cell list (`?` = missing) plus a category; the raw label is the
/// category name.
pub fn ds(kinds: &str, rows: &[(&str, Category)]) -> Dataset {
    ds_weighted(
        kinds,
        &rows.iter().map(|&(r, c)| (r, c, 1)).collect::<Vec<_>>(),
    )
}

pub fn ds_weighted(kinds: &str, rows: &[(&str, Category, u64)]) -> Dataset {
    let schema: Vec<AttributeSchema> = kinds
        .chars()
        .enumerate()
        .map(|(i, k)| {
            let kind = match k {
                'd' => AttrKind::Discrete,
                'c' => AttrKind::Continuous,
                other => panic!("unknown kind char {other:?}"),
            };
            AttributeSchema::new(&format!("a{i}"), kind, i)
        })
        .collect();
    let mut symbols = SymbolTable::new();
    let examples = rows
        .iter()
        .map(|(row, cat, weight)| {
            let values: Vec<Value> = row
                .split(',')
                .zip(&schema)
                .map(|(cell, attr)| {
                    let cell = cell.trim();
                    if cell == "?" {
                        Value::Missing
                    } else {
                        match attr.kind {
                            AttrKind::Discrete => Value::Sym(symbols.intern(cell)),
                            AttrKind::Continuous => Value::Num(cell.parse().unwrap()),
                        }
                    }
                })
                .collect();
            assert_eq!(values.len(), schema.len(), "row {row:?} arity mismatch");
            Example {
                values,
                label: ClassLabel::new(*cat, &cat.name().to_lowercase()),
                weight: *weight,
            }
        })
        .collect();
    Dataset::new(schema, symbols, examples)
}

/// The tiny two-attribute weather set used across the probability tests:
/// (outlook, windy) with labels play/stay mapped onto Normal/Probe.
pub fn weather4() -> Dataset {
    ds(
        "dd",
        &[
            ("sun,y", Category::Normal),  // play
            ("sun,n", Category::Normal),  // play
            ("rain,y", Category::Probe),  // stay
            ("rain,n", Category::Normal), // play
        ],
    )
}
