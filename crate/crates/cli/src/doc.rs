//! JSON documents (schema version "1") and CSV record input.
//!
//! Rationals are written as `"a/b"` strings. On input, a rational may be a
//! string holding `a/b`, an integer, or a decimal literal, or a bare JSON
//! number; decimals are converted exactly.

use std::collections::BTreeMap;

use fairrisk_core::model::{Group, Record, RecordTable};
use fairrisk_core::reduction::{reduce_subset_sum, ReducedInstance, SubsetSumInstance};
use fairrisk_core::scalar::{format_rational, parse_rational};
use fairrisk_core::{FeatureVector, Instance, Rational, RiskAssignment};
use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::Value;

pub const VERSION: &str = "1";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DocError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

impl DocError {
    fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        DocError::Field {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        // serde_json appends " at line L column C"; the position is kept separately
        let text = e.to_string();
        let message = match text.rfind(" at line ") {
            Some(i) => text[..i].to_string(),
            None => text,
        };
        DocError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

pub type Metadata = BTreeMap<String, Value>;

/// An instance together with the free-form metadata of its document.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDocument {
    pub instance: Instance,
    pub metadata: Option<Metadata>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceIn<'a> {
    version: String,
    kind: String,
    #[serde(borrow)]
    features: Vec<FeatureIn<'a>>,
    #[serde(default)]
    metadata: Option<Metadata>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureIn<'a> {
    id: String,
    #[serde(borrow)]
    p: &'a RawValue,
    #[serde(borrow)]
    counts: CountsIn<'a>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsIn<'a> {
    #[serde(borrow, rename = "1")]
    one: &'a RawValue,
    #[serde(borrow, rename = "2")]
    two: &'a RawValue,
}

#[derive(Serialize)]
struct InstanceOut<'a> {
    version: &'static str,
    kind: &'static str,
    features: Vec<FeatureOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<&'a Metadata>,
}

#[derive(Serialize)]
struct FeatureOut {
    id: String,
    p: String,
    counts: CountsOut,
}

#[derive(Serialize)]
struct CountsOut {
    #[serde(rename = "1")]
    one: String,
    #[serde(rename = "2")]
    two: String,
}

/// Reads a rational from a JSON string or number literal.
fn rational(raw: &RawValue, path: &str) -> Result<Rational, DocError> {
    let text = raw.get().trim();
    let literal = if text.starts_with('"') {
        serde_json::from_str::<String>(text).map_err(|e| DocError::field(path, e.to_string()))?
    } else {
        text.to_string()
    };
    parse_rational(&literal).map_err(|e| DocError::field(path, e))
}

fn check_header(version: &str, kind: &str, expected: &str) -> Result<(), DocError> {
    if version != VERSION {
        return Err(DocError::field(
            "version",
            format!("unsupported version {version:?}, expected \"{VERSION}\""),
        ));
    }
    if kind != expected {
        return Err(DocError::field(
            "kind",
            format!("expected \"{expected}\", found {kind:?}"),
        ));
    }
    Ok(())
}

/// The `kind` field of any versioned document.
pub fn document_kind(text: &str) -> Result<String, DocError> {
    #[derive(Deserialize)]
    struct Kind {
        kind: String,
    }
    Ok(serde_json::from_str::<Kind>(text)?.kind)
}

pub fn parse_instance(text: &str) -> Result<InstanceDocument, DocError> {
    let doc: InstanceIn = serde_json::from_str(text)?;
    check_header(&doc.version, &doc.kind, "instance")?;
    let mut features = Vec::with_capacity(doc.features.len());
    for (i, f) in doc.features.iter().enumerate() {
        let at = |field: &str| format!("features[{i}].{field}");
        features.push(FeatureVector::new(
            f.id.clone(),
            rational(f.p, &at("p"))?,
            rational(f.counts.one, &at("counts.1"))?,
            rational(f.counts.two, &at("counts.2"))?,
        ));
    }
    let instance =
        Instance::new(features).map_err(|e| DocError::field("features", e.to_string()))?;
    Ok(InstanceDocument {
        instance,
        metadata: doc.metadata,
    })
}

pub fn serialize_instance(doc: &InstanceDocument) -> String {
    let out = InstanceOut {
        version: VERSION,
        kind: "instance",
        features: doc
            .instance
            .features()
            .iter()
            .map(|f| FeatureOut {
                id: f.id.clone(),
                p: format_rational(&f.p),
                counts: CountsOut {
                    one: format_rational(&f.counts[0]),
                    two: format_rational(&f.counts[1]),
                },
            })
            .collect(),
        metadata: doc.metadata.as_ref(),
    };
    to_pretty(&out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentIn<'a> {
    version: String,
    kind: String,
    #[serde(borrow)]
    bins: Vec<BinIn<'a>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BinIn<'a> {
    #[serde(borrow)]
    score: &'a RawValue,
    #[serde(borrow)]
    allocation: BTreeMap<String, &'a RawValue>,
}

#[derive(Serialize)]
struct AssignmentOut {
    version: &'static str,
    kind: &'static str,
    bins: Vec<BinOut>,
}

#[derive(Serialize)]
struct BinOut {
    score: String,
    allocation: BTreeMap<String, String>,
}

/// Parses an assignment document against `inst`: allocation keys are feature
/// ids, and omitted entries are zero. Every feature's fractions must sum to 1.
pub fn parse_assignment(text: &str, inst: &Instance) -> Result<RiskAssignment, DocError> {
    let doc: AssignmentIn = serde_json::from_str(text)?;
    check_header(&doc.version, &doc.kind, "assignment")?;
    if doc.bins.is_empty() {
        return Err(DocError::field("bins", "at least one bin is required"));
    }
    let mut scores = Vec::with_capacity(doc.bins.len());
    let mut allocation = vec![vec![Rational::zero(); doc.bins.len()]; inst.len()];
    for (b, bin) in doc.bins.iter().enumerate() {
        scores.push(rational(bin.score, &format!("bins[{b}].score"))?);
        for (id, raw) in &bin.allocation {
            let path = format!("bins[{b}].allocation.{id}");
            let row = inst
                .feature_index(id)
                .ok_or_else(|| DocError::field(&path, "unknown feature id"))?;
            allocation[row][b] = rational(raw, &path)?;
        }
    }
    for (f, row) in inst.features().iter().zip(&allocation) {
        let total: Rational = row.iter().sum();
        if !total.is_one() {
            return Err(DocError::field(
                format!("feature {}", f.id),
                format!("allocation sums to {}, expected 1", format_rational(&total)),
            ));
        }
    }
    RiskAssignment::new(scores, allocation).map_err(|e| DocError::field("bins", e.to_string()))
}

pub fn serialize_assignment(asg: &RiskAssignment, inst: &Instance) -> String {
    let bins = asg
        .scores()
        .iter()
        .enumerate()
        .map(|(b, score)| BinOut {
            score: format_rational(score),
            allocation: inst
                .features()
                .iter()
                .zip(asg.allocation())
                .filter(|(_, row)| !row[b].is_zero())
                .map(|(f, row)| (f.id.clone(), format_rational(&row[b])))
                .collect(),
        })
        .collect();
    to_pretty(&AssignmentOut {
        version: VERSION,
        kind: "assignment",
        bins,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceDoc {
    weights: Vec<u64>,
    target: u64,
}

#[derive(Serialize)]
struct ReducedOut {
    version: &'static str,
    kind: &'static str,
    source: SourceDoc,
    dropped: Vec<usize>,
    m: usize,
    w_hat: Vec<String>,
    gamma: String,
    target_value: String,
    features: Vec<ReducedFeatureOut>,
}

#[derive(Serialize)]
struct ReducedFeatureOut {
    id: String,
    p: String,
    p_approx: Box<RawValue>,
    counts: CountsOut,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReducedIn {
    version: String,
    kind: String,
    source: SourceDoc,
    dropped: Vec<usize>,
    m: usize,
    w_hat: Vec<String>,
    gamma: String,
    target_value: String,
    features: Vec<ReducedFeatureIn>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReducedFeatureIn {
    id: String,
    p: String,
    #[allow(dead_code)]
    p_approx: f64,
    counts: BTreeMap<String, String>,
}

/// `x` with 17 significant digits, as a JSON number.
fn float17(x: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{x:.16e}")).expect("formatted float is a JSON number")
}

pub fn serialize_reduced(ri: &ReducedInstance) -> String {
    let features = ri
        .instance
        .features()
        .iter()
        .enumerate()
        .map(|(i, f)| ReducedFeatureOut {
            id: f.id.clone(),
            p: ri.p_exact[i].to_string(),
            p_approx: float17(ri.p_approx[i]),
            counts: CountsOut {
                one: format_rational(&ri.group1_mass[i]),
                two: format_rational(&ri.group2_mass[i]),
            },
        })
        .collect();
    to_pretty(&ReducedOut {
        version: VERSION,
        kind: "reduced-instance",
        source: SourceDoc {
            weights: ri.source.weights.clone(),
            target: ri.source.target,
        },
        dropped: ri.dropped.iter().map(|i| i + 1).collect(),
        m: ri.m,
        w_hat: ri.w_hat.iter().map(format_rational).collect(),
        gamma: format_rational(&ri.gamma),
        target_value: format_rational(&ri.target_value()),
        features,
    })
}

/// Rebuilds the reduction from the document's source data and checks that
/// every symbolic field agrees with it. Float fields are informational.
pub fn parse_reduced(text: &str) -> Result<ReducedInstance, DocError> {
    let doc: ReducedIn = serde_json::from_str(text)?;
    check_header(&doc.version, &doc.kind, "reduced-instance")?;
    let ss = SubsetSumInstance::new(doc.source.weights, doc.source.target)
        .map_err(|e| DocError::field("source", e.to_string()))?;
    let ri = reduce_subset_sum(&ss).map_err(|e| DocError::field("source", e.to_string()))?;
    let expect = |path: &str, found: String, wanted: String| {
        if found == wanted {
            Ok(())
        } else {
            Err(DocError::field(
                path,
                format!("{found:?} does not match the source, expected {wanted:?}"),
            ))
        }
    };
    let dropped: Vec<usize> = ri.dropped.iter().map(|i| i + 1).collect();
    expect(
        "dropped",
        format!("{:?}", doc.dropped),
        format!("{dropped:?}"),
    )?;
    expect("m", doc.m.to_string(), ri.m.to_string())?;
    expect(
        "w_hat",
        doc.w_hat.join(","),
        ri.w_hat
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(","),
    )?;
    expect("gamma", doc.gamma, format_rational(&ri.gamma))?;
    expect(
        "target_value",
        doc.target_value,
        format_rational(&ri.target_value()),
    )?;
    if doc.features.len() != ri.feature_count() {
        return Err(DocError::field(
            "features",
            format!(
                "{} entries, expected {}",
                doc.features.len(),
                ri.feature_count()
            ),
        ));
    }
    for (i, f) in doc.features.iter().enumerate() {
        let at = |field: &str| format!("features[{i}].{field}");
        expect(
            &at("id"),
            f.id.clone(),
            ri.instance.features()[i].id.clone(),
        )?;
        expect(&at("p"), f.p.clone(), ri.p_exact[i].to_string())?;
        let counts = [&ri.group1_mass[i], &ri.group2_mass[i]];
        for (g, c) in ["1", "2"].iter().zip(counts) {
            let found = f.counts.get(*g).cloned().unwrap_or_default();
            expect(&at(&format!("counts.{g}")), found, format_rational(c))?;
        }
    }
    Ok(ri)
}

/// Reads `feature_id,group,outcome` rows. Groups are `1`/`2`, outcomes `0`/`1`.
pub fn parse_records(text: &str) -> Result<RecordTable, DocError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| DocError::field("line 1", e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != ["feature_id", "group", "outcome"] {
        return Err(DocError::field(
            "line 1",
            "header must be feature_id,group,outcome",
        ));
    }
    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DocError::field(format!("line {line}"), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let at = format!("line {line}");
        let feature_id = record[0].to_string();
        if feature_id.is_empty() {
            return Err(DocError::field(at, "empty feature_id"));
        }
        let group = match &record[1] {
            "1" => Group::One,
            "2" => Group::Two,
            other => {
                return Err(DocError::field(
                    at,
                    format!("group must be 1 or 2, found {other:?}"),
                ))
            }
        };
        let positive = match &record[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(DocError::field(
                    at,
                    format!("outcome must be 0 or 1, found {other:?}"),
                ))
            }
        };
        rows.push(Record {
            feature_id,
            group,
            positive,
        });
    }
    Ok(RecordTable::new(rows))
}

fn to_pretty(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairrisk_core::scalar::ratio;

    const EX1: &str = r#"{
  "version": "1",
  "kind": "instance",
  "features": [
    {"id": "s1", "p": "1/2", "counts": {"1": "2", "2": "0"}},
    {"id": "s2", "p": 0.25, "counts": {"1": "0", "2": "4"}}
  ]
}"#;

    #[test]
    fn decimals_parse_exactly() {
        let doc = parse_instance(EX1).unwrap();
        assert_eq!(doc.instance.features()[1].p, ratio(1, 4));
        let text = serialize_instance(&doc);
        assert!(text.contains("\"p\": \"1/4\""));
        assert_eq!(parse_instance(&text).unwrap(), doc);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_instance("{\n  \"version\": \"1\",\n  \"kind\": ]\n}").unwrap_err();
        assert!(matches!(err, DocError::Syntax { line: 3, .. }), "{err}");
        let err = parse_instance(&EX1.replace("\"1/2\"", "\"1/0\"")).unwrap_err();
        assert!(
            matches!(&err, DocError::Field { path, .. } if path == "features[0].p"),
            "{err}"
        );
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = parse_instance(&EX1.replace("\"s2\"", "\"s1\"")).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn short_row_names_feature() {
        let inst = parse_instance(EX1).unwrap().instance;
        let text = r#"{"version": "1", "kind": "assignment", "bins": [
            {"score": "1/2", "allocation": {"s1": "1", "s2": "0.9"}}]}"#;
        let err = parse_assignment(text, &inst).unwrap_err();
        assert_eq!(
            err,
            DocError::Field {
                path: "feature s2".into(),
                message: "allocation sums to 9/10, expected 1".into()
            }
        );
    }

    #[test]
    fn reduced_document_round_trip() {
        let ri = reduce_subset_sum(&SubsetSumInstance::new(vec![1, 2], 3).unwrap()).unwrap();
        let text = serialize_reduced(&ri);
        assert!(text.contains("\"gamma\": \"5/9\""));
        assert!(text.contains("\"p\": \"1/3\""));
        assert!(text.contains("3.3333333333333331e-1"));
        assert_eq!(parse_reduced(&text).unwrap(), ri);
        let err = parse_reduced(&text.replace("5/9", "1/2")).unwrap_err();
        assert!(matches!(&err, DocError::Field { path, .. } if path == "gamma"));
    }

    #[test]
    fn csv_rows() {
        let table = parse_records("feature_id,group,outcome\na,1,1\nb,2,0\n").unwrap();
        assert_eq!(table.rows.len(), 2);
        let err = parse_records("feature_id,group,outcome\na,3,1\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2"), "{err}");
        assert!(parse_records("id,group,outcome\n").is_err());
    }
}
