use super::{AtomicUnit, Attribute, Value};

/// Partial bijection between names of two vocabularies (types and attribute names),
/// e.g. Puppet `exec`/`unless` against Chef `execute`/`not_if`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameMap {
    pairs: Vec<(String, String)>,
}

impl NameMap {
    pub fn identity() -> Self {
        NameMap::default()
    }

    /// Returns `None` when the pairs are not a partial bijection.
    pub fn new<I, A, B>(pairs: I) -> Option<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut map = NameMap::default();
        for (a, b) in pairs {
            let (a, b) = (a.into(), b.into());
            let clash = map
                .pairs
                .iter()
                .any(|(l, r)| l == &a || r == &b || l == &b || r == &a);
            if clash {
                return None;
            }
            map.pairs.push((a, b));
        }
        Some(map)
    }

    /// Name on the left side of the map for either side's spelling.
    pub fn canonical<'a>(&'a self, name: &'a str) -> &'a str {
        self.pairs
            .iter()
            .find(|(_, r)| r == name)
            .map(|(l, _)| l.as_str())
            .unwrap_or(name)
    }
}

/// Totally ordered projection of a value for multiset comparison.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(u64),
    Str(String),
    List(Vec<CanonicalValue>),
}

fn normalize_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn canonical_value(value: &Value) -> CanonicalValue {
    match value {
        Value::Null => CanonicalValue::Null,
        Value::Bool(b) => CanonicalValue::Bool(*b),
        Value::Int(i) => CanonicalValue::Int(*i),
        Value::Float(f) => CanonicalValue::Float(f.to_bits()),
        Value::Str(s) => CanonicalValue::Str(normalize_ws(&s.text)),
        Value::List(items) => CanonicalValue::List(items.iter().map(canonical_value).collect()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalAttribute {
    name: String,
    value: CanonicalValue,
    nested: Vec<CanonicalAttribute>,
}

fn canonical_attribute(attr: &Attribute, map: &NameMap) -> CanonicalAttribute {
    CanonicalAttribute {
        name: map.canonical(&attr.name).to_string(),
        value: canonical_value(&attr.value),
        nested: canonical_attributes(&attr.nested, map),
    }
}

fn canonical_attributes(attrs: &[Attribute], map: &NameMap) -> Vec<CanonicalAttribute> {
    let mut out: Vec<_> = attrs.iter().map(|a| canonical_attribute(a, map)).collect();
    out.sort();
    out
}

/// Key such that two units are equivalent iff their keys are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalUnit {
    unit_type: String,
    name: Option<String>,
    attributes: Vec<CanonicalAttribute>,
}

pub fn canonical_key(unit: &AtomicUnit, ignore_name: bool, map: &NameMap) -> CanonicalUnit {
    CanonicalUnit {
        unit_type: map.canonical(&unit.unit_type).to_string(),
        name: (!ignore_name).then(|| normalize_ws(&unit.name)),
        attributes: canonical_attributes(&unit.attributes, map),
    }
}

/// Structural equivalence of two atomic units: same (mapped) type, same multiset of
/// (mapped name, whitespace-normalized value) attributes, and same name unless ignored.
pub fn atomic_unit_equivalent(
    a: &AtomicUnit,
    b: &AtomicUnit,
    ignore_name: bool,
    name_map: &NameMap,
) -> bool {
    canonical_key(a, ignore_name, name_map) == canonical_key(b, ignore_name, name_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::StringStyle;
    use crate::source::SourceSpan;

    fn unit(name: &str, ty: &str, attrs: &[(&str, &str)]) -> AtomicUnit {
        let span = SourceSpan::location("t", 1);
        let mut au = AtomicUnit::new(name, ty, span.clone());
        for (k, v) in attrs {
            au.attributes.push(Attribute::new(
                *k,
                Value::string(*v, StringStyle::SingleQuoted),
                span.clone(),
            ));
        }
        au
    }

    #[test]
    fn reflexive() {
        let a = unit("x", "package", &[("ensure", "present")]);
        assert!(atomic_unit_equivalent(&a, &a, false, &NameMap::identity()));
    }

    #[test]
    fn differing_value_breaks_equivalence() {
        let a = unit("x", "package", &[("ensure", "present"), ("name", "git")]);
        let b = unit("x", "package", &[("ensure", "absent"), ("name", "git")]);
        assert!(!atomic_unit_equivalent(&a, &b, false, &NameMap::identity()));
    }

    #[test]
    fn mapped_names_and_whitespace() {
        let a = unit("n", "exec", &[("unless", "a  b"), ("user", "root")]);
        let b = unit("n", "execute", &[("user", "root"), ("not_if", " a b")]);
        let map = NameMap::new([("exec", "execute"), ("unless", "not_if")]).unwrap();
        assert!(atomic_unit_equivalent(&a, &b, false, &map));
        assert!(!atomic_unit_equivalent(&a, &b, false, &NameMap::identity()));
    }

    #[test]
    fn ignore_name() {
        let a = unit("one", "exec", &[("command", "ls")]);
        let b = unit("two", "exec", &[("command", "ls")]);
        assert!(!atomic_unit_equivalent(&a, &b, false, &NameMap::identity()));
        assert!(atomic_unit_equivalent(&a, &b, true, &NameMap::identity()));
    }

    #[test]
    fn rejects_non_bijective_maps() {
        assert!(NameMap::new([("a", "b"), ("a", "c")]).is_none());
        assert!(NameMap::new([("a", "b"), ("b", "c")]).is_none());
    }
}
