//! Ordered report trees rendered as indented text or JSON.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use fairrisk_core::scalar::format_rational;
use fairrisk_core::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Null,
    Bool(bool),
    Int(i128),
    Str(String),
    List(Vec<Node>),
    Map(Vec<(String, Node)>),
}

impl Node {
    pub fn map() -> Node {
        Node::Map(Vec::new())
    }

    /// Appends `key: value` to a map node.
    pub fn with(mut self, key: &str, value: impl Into<Node>) -> Node {
        match &mut self {
            Node::Map(entries) => entries.push((key.to_string(), value.into())),
            _ => panic!("with() on a non-map node"),
        }
        self
    }

    pub fn list<T: Into<Node>>(items: impl IntoIterator<Item = T>) -> Node {
        Node::List(items.into_iter().map(Into::into).collect())
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Node::List(_) | Node::Map(_))
    }

    fn scalar_text(&self) -> String {
        match self {
            Node::Null => "none".into(),
            Node::Bool(b) => b.to_string(),
            Node::Int(i) => i.to_string(),
            Node::Str(s) => s.clone(),
            _ => unreachable!(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Node::Map(entries) => write_entries(&mut out, entries, 0),
            other if other.is_scalar() => {
                out.push_str(&other.scalar_text());
                out.push('\n');
            }
            other => write_entries(&mut out, &[("items".into(), other.clone())], 0),
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

fn write_entries(out: &mut String, entries: &[(String, Node)], depth: usize) {
    let pad = "  ".repeat(depth);
    for (key, value) in entries {
        match value {
            Node::Map(inner) if inner.is_empty() => out.push_str(&format!("{pad}{key}: {{}}\n")),
            Node::Map(inner) => {
                out.push_str(&format!("{pad}{key}:\n"));
                write_entries(out, inner, depth + 1);
            }
            Node::List(items) if items.iter().all(Node::is_scalar) => {
                let parts: Vec<String> = items.iter().map(Node::scalar_text).collect();
                out.push_str(&format!("{pad}{key}: [{}]\n", parts.join(", ")));
            }
            Node::List(items) => {
                out.push_str(&format!("{pad}{key}:\n"));
                for item in items {
                    match item {
                        Node::Map(inner) => {
                            out.push_str(&format!("{pad}  -\n"));
                            write_entries(out, inner, depth + 2);
                        }
                        Node::List(inner) if inner.iter().all(Node::is_scalar) => {
                            let parts: Vec<String> = inner.iter().map(Node::scalar_text).collect();
                            out.push_str(&format!("{pad}  - [{}]\n", parts.join(", ")));
                        }
                        Node::List(_) => {
                            out.push_str(&format!("{pad}  -\n"));
                            write_entries(out, &[("items".into(), item.clone())], depth + 2);
                        }
                        scalar => out.push_str(&format!("{pad}  - {}\n", scalar.scalar_text())),
                    }
                }
            }
            scalar => out.push_str(&format!("{pad}{key}: {}\n", scalar.scalar_text())),
        }
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Node::Null => serializer.serialize_none(),
            Node::Bool(b) => serializer.serialize_bool(*b),
            Node::Int(i) => serializer.serialize_i128(*i),
            Node::Str(s) => serializer.serialize_str(s),
            Node::List(items) => {
                let mut seq = serializer.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            Node::Map(entries) => {
                let mut map = serializer.serialize_map(Some(entries.len()))?;
                for (k, v) in entries {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

impl From<bool> for Node {
    fn from(b: bool) -> Self {
        Node::Bool(b)
    }
}

impl From<usize> for Node {
    fn from(n: usize) -> Self {
        Node::Int(n as i128)
    }
}

impl From<u64> for Node {
    fn from(n: u64) -> Self {
        Node::Int(n as i128)
    }
}

impl From<u128> for Node {
    fn from(n: u128) -> Self {
        Node::Int(n as i128)
    }
}

impl From<&str> for Node {
    fn from(s: &str) -> Self {
        Node::Str(s.to_string())
    }
}

impl From<String> for Node {
    fn from(s: String) -> Self {
        Node::Str(s)
    }
}

impl From<&Rational> for Node {
    fn from(r: &Rational) -> Self {
        Node::Str(format_rational(r))
    }
}

impl From<Rational> for Node {
    fn from(r: Rational) -> Self {
        Node::from(&r)
    }
}

impl<T: Into<Node>> From<Option<T>> for Node {
    fn from(v: Option<T>) -> Self {
        v.map_or(Node::Null, Into::into)
    }
}

impl<T: Into<Node>> From<Vec<T>> for Node {
    fn from(v: Vec<T>) -> Self {
        Node::list(v)
    }
}

impl<T: Into<Node>, const N: usize> From<[T; N]> for Node {
    fn from(v: [T; N]) -> Self {
        Node::list(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairrisk_core::scalar::ratio;

    fn sample() -> Node {
        Node::map()
            .with("fair", false)
            .with("gamma", [Some(ratio(1, 2)), None])
            .with(
                "balance",
                Node::map().with("ok", true).with("vacuous", false),
            )
            .with("bins", vec![Node::map().with("score", ratio(1, 3))])
    }

    #[test]
    fn text_layout() {
        assert_eq!(
            sample().to_text(),
            "fair: false\ngamma: [1/2, none]\nbalance:\n  ok: true\n  vacuous: false\nbins:\n  -\n    score: 1/3\n"
        );
    }

    #[test]
    fn json_keeps_insertion_order() {
        let json = sample().to_json();
        let fair = json.find("\"fair\"").unwrap();
        let gamma = json.find("\"gamma\"").unwrap();
        assert!(fair < gamma);
        assert!(json.contains("null"));
    }
}
