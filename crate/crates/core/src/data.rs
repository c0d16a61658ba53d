//! Flow-record datasets: class categories, attribute values, examples and
//! the record parser for KDD99-format files (42 comma-separated fields,
//! label last with a trailing dot).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::BufRead;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{AttrKind, AttributeSchema, LabelMap};

/// The five connection categories. Declaration order is the fixed
/// tie-break order used everywhere a deterministic choice between equally
/// scored classes is needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Normal,
    Probe,
    Dos,
    U2r,
    R2l,
}

pub const CLASS_COUNT: usize = 5;

impl Category {
    pub const ALL: [Category; CLASS_COUNT] = [
        Category::Normal,
        Category::Probe,
        Category::Dos,
        Category::U2r,
        Category::R2l,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Normal => "Normal",
            Category::Probe => "Probe",
            Category::Dos => "DoS",
            Category::U2r => "U2R",
            Category::R2l => "R2L",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A class label: the learning category plus the raw attack name it came
/// from (dot-stripped, lowercase).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub category: Category,
    pub raw: Arc<str>,
}

impl ClassLabel {
    pub fn new(category: Category, raw: &str) -> Self {
        Self {
            category,
            raw: Arc::from(raw),
        }
    }
}

/// One attribute slot. Discrete attributes hold interned symbols,
/// continuous ones hold finite reals until discretization replaces them
/// with interval indices. `Missing` is only legal before imputation.
#[derive(Clone, Copy, Debug)]
pub enum Value {
    Sym(u32),
    Interval(u32),
    Num(f64),
    Missing,
}

impl Value {
    fn rank(&self) -> u8 {
        match self {
            Value::Sym(_) => 0,
            Value::Interval(_) => 1,
            Value::Num(_) => 2,
            Value::Missing => 3,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Sym(a), Value::Sym(b)) => a == b,
            (Value::Interval(a), Value::Interval(b)) => a == b,
            (Value::Num(a), Value::Num(b)) => a.to_bits() == b.to_bits(),
            (Value::Missing, Value::Missing) => true,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Sym(a) | Value::Interval(a) => a.hash(state),
            Value::Num(x) => x.to_bits().hash(state),
            Value::Missing => {}
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Sym(a), Value::Sym(b)) => a.cmp(b),
            (Value::Interval(a), Value::Interval(b)) => a.cmp(b),
            (Value::Num(a), Value::Num(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Interning table for discrete attribute text. Ids are assigned in first
/// appearance order, so they are deterministic for a given input.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymbolTable {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names(names: Vec<String>) -> Self {
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Self { names, index }
    }

    pub fn intern(&mut self, text: &str) -> u32 {
        if let Some(&id) = self.index.get(text) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(text.to_string());
        self.index.insert(text.to_string(), id);
        id
    }

    pub fn lookup(&self, text: &str) -> Option<u32> {
        self.index.get(text).copied()
    }

    pub fn resolve(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// One flow record: attribute values (length = schema arity), a label and
/// a multiplicity weight (> 1 after duplicate merging).
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub values: Vec<Value>,
    pub label: ClassLabel,
    pub weight: u64,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub schema: Vec<AttributeSchema>,
    pub symbols: SymbolTable,
    pub examples: Vec<Example>,
}

impl Dataset {
    pub fn new(schema: Vec<AttributeSchema>, symbols: SymbolTable, examples: Vec<Example>) -> Self {
        Self {
            schema,
            symbols,
            examples,
        }
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.examples.iter().map(|e| e.weight).sum()
    }

    /// Per-category example weight, indexed by `Category::index`.
    pub fn class_weights(&self) -> [u64; CLASS_COUNT] {
        let mut out = [0u64; CLASS_COUNT];
        for e in &self.examples {
            out[e.label.category.index()] += e.weight;
        }
        out
    }

    /// True when no slot holds a raw continuous value or a missing marker,
    /// i.e. the dataset is ready for probability counting.
    pub fn is_fully_discrete(&self) -> bool {
        self.examples
            .iter()
            .all(|e| e.values.iter().all(|v| !matches!(v, Value::Num(_) | Value::Missing)))
    }
}

/// Markers accepted as "value not recorded" in either kind of slot.
fn is_missing_marker(field: &str) -> bool {
    field.is_empty() || field == "?"
}

/// Parses one comma-separated record of `arity + 1` fields (attributes
/// then label). The label's trailing dot is stripped and it is lowercased
/// before the category lookup; the stripped text is kept as the raw label.
pub fn parse_record(
    line: &str,
    schema: &[AttributeSchema],
    labels: &LabelMap,
    symbols: &mut SymbolTable,
) -> Result<Example> {
    let fields: Vec<&str> = line.split(',').collect();
    let expected = schema.len() + 1;
    if fields.len() != expected {
        return Err(Error::FieldCount {
            expected,
            got: fields.len(),
        });
    }
    let mut values = Vec::with_capacity(schema.len());
    for (attr, field) in schema.iter().zip(&fields) {
        let field = field.trim();
        if is_missing_marker(field) {
            values.push(Value::Missing);
            continue;
        }
        match attr.kind {
            AttrKind::Discrete => values.push(Value::Sym(symbols.intern(field))),
            AttrKind::Continuous => {
                let parsed: f64 = field.parse().map_err(|_| Error::BadNumber {
                    attribute: attr.name.clone(),
                    text: field.to_string(),
                })?;
                if !parsed.is_finite() {
                    return Err(Error::BadNumber {
                        attribute: attr.name.clone(),
                        text: field.to_string(),
                    });
                }
                values.push(Value::Num(parsed));
            }
        }
    }
    let raw_label = fields[schema.len()]
        .trim()
        .trim_end_matches('.')
        .to_lowercase();
    let category = labels.map(&raw_label)?;
    Ok(Example {
        values,
        label: ClassLabel::new(category, &raw_label),
        weight: 1,
    })
}

/// Renders an example back into the comma-separated record format.
/// `parse_record(format_record(e)) == e` for any well-formed example.
pub fn format_record(e: &Example, schema: &[AttributeSchema], symbols: &SymbolTable) -> String {
    let mut out = String::new();
    for (attr, value) in schema.iter().zip(&e.values) {
        match value {
            Value::Sym(id) => out.push_str(symbols.resolve(*id)),
            Value::Num(x) => out.push_str(&x.to_string()),
            Value::Interval(i) => out.push_str(&format!("bin{i}")),
            Value::Missing => out.push('?'),
        }
        let _ = attr;
        out.push(',');
    }
    out.push_str(&e.label.raw);
    out.push('.');
    out
}

/// Reads a whole record stream. Blank lines are skipped; parse and label
/// errors are reported with their 1-based line number. The caller supplies
/// the symbol table so that prediction-time data can be interned against a
/// trained model's table.
pub fn load_dataset(
    reader: impl BufRead,
    schema: &[AttributeSchema],
    labels: &LabelMap,
    mut symbols: SymbolTable,
) -> Result<Dataset> {
    let mut examples = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let example = parse_record(&line, schema, labels, &mut symbols)
            .map_err(|e| e.at_row(lineno + 1))?;
        examples.push(example);
    }
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset::new(schema.to_vec(), symbols, examples))
}

/// Opens a record file, transparently decompressing when the gzip magic
/// bytes are present.
pub fn open_records(path: &std::path::Path) -> Result<Box<dyn BufRead>> {
    use std::io::Read;
    let mut file = std::fs::File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    let file = {
        use std::io::Seek;
        let mut f = file;
        f.seek(std::io::SeekFrom::Start(0))?;
        f
    };
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(std::io::BufReader::new(flate2::read::GzDecoder::new(file))))
    } else {
        Ok(Box::new(std::io::BufReader::new(file)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{kdd99_schema, LabelMap};

    fn kdd_line(label: &str) -> String {
        // 41 attribute fields in schema order, then the label.
        let mut fields = vec![
            "0".to_string(),
            "tcp".to_string(),
            "http".to_string(),
            "SF".to_string(),
            "181".to_string(),
            "5450".to_string(),
            "0".to_string(),
        ];
        for _ in 7..41 {
            fields.push("0".to_string());
        }
        fields.push(label.to_string());
        fields.join(",")
    }

    #[test]
    fn parses_a_normal_record() {
        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        let mut symbols = SymbolTable::new();
        let e = parse_record(&kdd_line("normal."), &schema, &labels, &mut symbols).unwrap();
        assert_eq!(e.values.len(), 41);
        assert_eq!(e.label.category, Category::Normal);
        assert_eq!(&*e.label.raw, "normal");
        assert_eq!(e.weight, 1);
        assert_eq!(e.values[1], Value::Sym(symbols.lookup("tcp").unwrap()));
        assert_eq!(e.values[4], Value::Num(181.0));
    }

    #[test]
    fn wrong_field_count_is_a_format_error() {
        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        let mut symbols = SymbolTable::new();
        let line = kdd_line("normal.");
        let short = line.rsplitn(3, ',').nth(2).unwrap(); // drop two fields
        match parse_record(short, &schema, &labels, &mut symbols) {
            Err(Error::FieldCount { expected: 42, got: 40 }) => {}
            other => panic!("expected FieldCount, got {other:?}"),
        }
    }

    #[test]
    fn bad_number_names_the_attribute() {
        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        let mut symbols = SymbolTable::new();
        let mut fields: Vec<String> = kdd_line("normal.").split(',').map(String::from).collect();
        fields[24] = "0.5x".to_string(); // serror_rate
        match parse_record(&fields.join(","), &schema, &labels, &mut symbols) {
            Err(Error::BadNumber { attribute, text }) => {
                assert_eq!(attribute, "serror_rate");
                assert_eq!(text, "0.5x");
            }
            other => panic!("expected BadNumber, got {other:?}"),
        }
    }

    #[test]
    fn missing_markers_parse_as_missing() {
        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        let mut symbols = SymbolTable::new();
        let mut fields: Vec<String> = kdd_line("neptune.").split(',').map(String::from).collect();
        fields[0] = "?".to_string();
        fields[2] = String::new();
        let e = parse_record(&fields.join(","), &schema, &labels, &mut symbols).unwrap();
        assert!(e.values[0].is_missing());
        assert!(e.values[2].is_missing());
        assert_eq!(e.label.category, Category::Dos);
    }

    #[test]
    fn load_reports_row_numbers_and_preserves_order() {
        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        let text = format!("{}\n{}\n", kdd_line("normal."), kdd_line("ipsweep."));
        let d = load_dataset(text.as_bytes(), &schema, &labels, SymbolTable::new()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.examples[0].label.category, Category::Normal);
        assert_eq!(d.examples[1].label.category, Category::Probe);

        let bad = format!("{}\nnot,enough,fields\n", kdd_line("normal."));
        match load_dataset(bad.as_bytes(), &schema, &labels, SymbolTable::new()) {
            Err(Error::AtRow { row: 2, .. }) => {}
            other => panic!("expected AtRow {{ row: 2 }}, got {other:?}"),
        }
    }

    #[test]
    fn empty_source_is_an_error() {
        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        match load_dataset("\n\n".as_bytes(), &schema, &labels, SymbolTable::new()) {
            Err(Error::EmptyDataset) => {}
            other => panic!("expected EmptyDataset, got {other:?}"),
        }
    }

    #[test]
    fn record_roundtrip_is_identity() {
        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        let mut symbols = SymbolTable::new();
        let original =
            parse_record(&kdd_line("teardrop."), &schema, &labels, &mut symbols).unwrap();
        let line = format_record(&original, &schema, &symbols);
        let reparsed = parse_record(&line, &schema, &labels, &mut symbols).unwrap();
        assert_eq!(original, reparsed);
    }

    #[test]
    fn gzip_files_are_detected_by_magic_bytes() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        use std::io::Write;

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.gz");
        let mut enc = GzEncoder::new(std::fs::File::create(&path).unwrap(), Compression::fast());
        writeln!(enc, "{}", kdd_line("smurf.")).unwrap();
        enc.finish().unwrap();

        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        let reader = open_records(&path).unwrap();
        let d = load_dataset(reader, &schema, &labels, SymbolTable::new()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.examples[0].label.category, Category::Dos);
    }

    #[test]
    fn class_weights_use_declared_order() {
        let schema = kdd99_schema();
        let labels = LabelMap::kdd99();
        let text = format!(
            "{}\n{}\n{}\n",
            kdd_line("normal."),
            kdd_line("neptune."),
            kdd_line("neptune.")
        );
        let d = load_dataset(text.as_bytes(), &schema, &labels, SymbolTable::new()).unwrap();
        assert_eq!(d.class_weights(), [1, 0, 2, 0, 0]);
    }
}
