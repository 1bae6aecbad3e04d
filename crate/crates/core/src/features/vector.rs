use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::util::fingerprint;

/// Sparse, namespaced feature values bound to a schema.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector<T> {
    pub schema: String,
    entries: BTreeMap<String, T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(schema: impl Into<String>) -> Self {
        FeatureVector {
            schema: schema.into(),
            entries: BTreeMap::new(),
        }
    }

    /// Stores `value` under `name`; zeros are not stored.
    pub fn set(&mut self, name: impl Into<String>, value: T) {
        let name = name.into();
        if value == T::zero() {
            self.entries.remove(&name);
        } else {
            self.entries.insert(name, value);
        }
    }

    pub fn set_f64(&mut self, name: impl Into<String>, value: f64) {
        self.set(name, T::lit(value));
    }

    pub fn get(&self, name: &str) -> T {
        self.entries.get(name).copied().unwrap_or_else(T::zero)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> + '_ {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.keys().map(String::as_str)
    }

    pub fn sum(&self) -> T {
        self.entries.values().copied().sum()
    }

    pub fn l2_norm(&self) -> T {
        self.entries.values().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().map(|(k, v)| v * large.get(k)).sum()
    }

    pub fn scale(&mut self, factor: T) {
        for v in self.entries.values_mut() {
            *v *= factor;
        }
        self.entries.retain(|_, v| *v != T::zero());
    }

    /// Namespaced union; a name present in both is a contract violation.
    pub fn extend(&mut self, other: &FeatureVector<T>) -> Result<()> {
        for (k, v) in other.iter() {
            if self.entries.insert(k.to_string(), v).is_some() {
                return Err(Error::Contract(format!("feature name collision on {k:?}")));
            }
        }
        Ok(())
    }

    pub fn cast<U: Scalar>(&self) -> FeatureVector<U> {
        let mut out = FeatureVector::new(self.schema.clone());
        for (k, v) in self.iter() {
            out.set(k, U::lit(v.as_f64()));
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.entries.values().all(|v| v.is_finite())
    }
}

/// Divides every entry by the vector's sum; a zero-sum vector is returned
/// unchanged.
pub fn normalize_unit_sum<T: Scalar>(v: &FeatureVector<T>) -> FeatureVector<T> {
    let s = v.sum();
    let mut out = v.clone();
    if s != T::zero() {
        out.scale(T::one() / s);
    }
    out
}

/// Schema id of an EasyAdapt-augmented space.
pub fn easyadapt_schema(base: &str, domains: &[String]) -> String {
    format!("ea[{}]{}", domains.join(","), base)
}

/// Feature augmentation: a shared `gen:` copy of every entry plus a copy in
/// the block of `domain`.
pub fn easyadapt<T: Scalar>(v: &FeatureVector<T>, domain: &str, domains: &[String]) -> Result<FeatureVector<T>> {
    if !domains.iter().any(|d| d == domain) {
        return Err(Error::Data(format!("domain {domain:?} not among {domains:?}")));
    }
    let mut out = FeatureVector::new(easyadapt_schema(&v.schema, domains));
    for (k, x) in v.iter() {
        out.set(format!("gen:{k}"), x);
        out.set(format!("dom{domain}:{k}"), x);
    }
    Ok(out)
}

/// Ordered list of every feature name a featurizer can emit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureSchema {
    pub id: String,
    pub names: Vec<String>,
}

impl FeatureSchema {
    pub fn new(names: Vec<String>, tag: &str) -> Self {
        let id = format!("{tag}-{}", fingerprint(names.join("\n").as_bytes()));
        FeatureSchema { id, names }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn easyadapt(&self, domains: &[String]) -> FeatureSchema {
        let mut names: Vec<String> = self.names.iter().map(|n| format!("gen:{n}")).collect();
        for d in domains {
            names.extend(self.names.iter().map(|n| format!("dom{d}:{n}")));
        }
        FeatureSchema {
            id: easyadapt_schema(&self.id, domains),
            names,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# schema {}\n", self.id);
        for n in &self.names {
            s.push_str(n);
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let id = lines
            .next()
            .and_then(|l| l.strip_prefix("# schema "))
            .ok_or_else(|| Error::Format {
                line: 1,
                message: "expected `# schema <id>` header".into(),
            })?;
        Ok(FeatureSchema {
            id: id.trim().to_string(),
            names: lines.filter(|l| !l.is_empty()).map(str::to_string).collect(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Sparse text export: `doc_id<TAB>feature=value …` per document.
pub fn matrix_to_text<T: Scalar>(ids: &[&str], rows: &[FeatureVector<T>]) -> String {
    let mut out = String::new();
    for (id, v) in ids.iter().zip(rows) {
        out.push_str(id);
        out.push('\t');
        let mut first = true;
        for (k, x) in v.iter() {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{k}={x}");
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`matrix_to_text`].
pub fn parse_matrix<T: Scalar>(text: &str, schema: &str) -> Result<Vec<(String, FeatureVector<T>)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Format { line: i + 1, message };
        let (id, rest) = line.split_once('\t').ok_or_else(|| err("missing tab after doc id".into()))?;
        let mut v = FeatureVector::new(schema);
        for item in rest.split(' ').filter(|s| !s.is_empty()) {
            let (k, x) = item.rsplit_once('=').ok_or_else(|| err(format!("bad entry {item:?}")))?;
            let x: T = x.parse().map_err(|_| err(format!("bad value in {item:?}")))?;
            v.set(k, x);
        }
        rows.push((id.to_string(), v));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(pairs: &[(&str, f64)]) -> FeatureVector<f64> {
        let mut v = FeatureVector::new("t");
        for &(k, x) in pairs {
            v.set(k, x);
        }
        v
    }

    #[test]
    fn zeros_not_stored() {
        let v = fv(&[("a", 0.0), ("b", 1.0)]);
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn unit_sum() {
        assert_eq!(normalize_unit_sum(&fv(&[("a", 2.0), ("b", 2.0)])), fv(&[("a", 0.5), ("b", 0.5)]));
        assert_eq!(normalize_unit_sum(&fv(&[])), fv(&[]));
        assert_eq!(normalize_unit_sum(&fv(&[("a", 3.0)])), fv(&[("a", 1.0)]));
    }

    #[test]
    fn easyadapt_blocks() {
        let doms = vec!["A".to_string(), "B".to_string()];
        let out = easyadapt(&fv(&[("f", 3.0)]), "A", &doms).unwrap();
        assert_eq!(out.get("gen:f"), 3.0);
        assert_eq!(out.get("domA:f"), 3.0);
        assert_eq!(out.len(), 2);
        assert!(easyadapt(&fv(&[("f", 3.0)]), "C", &doms).is_err());
        let schema = FeatureSchema::new(vec!["f".into(), "g".into()], "x");
        assert_eq!(schema.easyadapt(&doms).dim(), 3 * 2);
    }

    #[test]
    fn collision_detected() {
        let mut a = fv(&[("x", 1.0)]);
        assert!(a.extend(&fv(&[("x", 2.0)])).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let rows = vec![fv(&[("bow:a", 0.1), ("cmp:x=y", 1e-300)]), fv(&[])];
        let text = matrix_to_text(&["d1", "d2"], &rows);
        let back: Vec<_> = parse_matrix::<f64>(&text, "t").unwrap();
        assert_eq!(back[0].1, rows[0]);
        assert_eq!(back[1].1, rows[1]);
    }
}
