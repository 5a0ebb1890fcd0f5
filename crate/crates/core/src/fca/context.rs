use std::collections::HashSet;

use super::bitset::{AttributeSet, BitSet, ObjectSet};
use crate::error::{Error, Result};

/// A binary formal context: named objects, named attributes, and the
/// incidence relation between them.
///
/// Rows (per object) and columns (per attribute) are both kept bit-packed
/// so that either derivation is a run of word-wise intersections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<AttributeSet>,
    columns: Vec<ObjectSet>,
}

fn check_distinct(labels: &[String], kind: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(Error::invalid(format!("duplicate {kind} label {label:?}")));
        }
    }
    Ok(())
}

impl FormalContext {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: &[Vec<bool>],
    ) -> Result<Self> {
        if incidence.len() != objects.len() {
            return Err(Error::invalid(format!(
                "incidence has {} rows for {} objects",
                incidence.len(),
                objects.len()
            )));
        }
        let m = attributes.len();
        let mut rows = Vec::with_capacity(objects.len());
        for (g, row) in incidence.iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(format!(
                    "incidence row {g} has {} cells for {m} attributes",
                    row.len()
                )));
            }
            let mut set = BitSet::empty(m);
            for (j, &cell) in row.iter().enumerate() {
                if cell {
                    set.insert(j);
                }
            }
            rows.push(set);
        }
        Self::from_rows(objects, attributes, rows)
    }

    /// Builds a context from bit-packed rows, one per object.
    pub fn from_rows(
        objects: Vec<String>,
        attributes: Vec<String>,
        rows: Vec<AttributeSet>,
    ) -> Result<Self> {
        check_distinct(&objects, "object")?;
        check_distinct(&attributes, "attribute")?;
        if rows.len() != objects.len() {
            return Err(Error::invalid(format!(
                "{} rows for {} objects",
                rows.len(),
                objects.len()
            )));
        }
        let m = attributes.len();
        if let Some(bad) = rows.iter().position(|r| r.universe() != m) {
            return Err(Error::invalid(format!(
                "row {bad} spans {} attributes, expected {m}",
                rows[bad].universe()
            )));
        }
        let mut columns = vec![BitSet::empty(objects.len()); m];
        for (g, row) in rows.iter().enumerate() {
            for j in row {
                columns[j].insert(g);
            }
        }
        Ok(FormalContext {
            objects,
            attributes,
            rows,
            columns,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn row(&self, object: usize) -> &AttributeSet {
        &self.rows[object]
    }

    pub fn incident(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].contains(attribute)
    }

    pub fn attribute_index(&self, label: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == label)
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    /// Resolves attribute labels to a set. Unknown labels are an error.
    pub fn attribute_set<'a, I>(&self, labels: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut set = AttributeSet::empty(self.num_attributes());
        for label in labels {
            let j = self
                .attribute_index(label)
                .ok_or_else(|| Error::invalid(format!("unknown attribute {label:?}")))?;
            set.insert(j);
        }
        Ok(set)
    }

    pub fn object_set<'a, I>(&self, labels: I) -> Result<ObjectSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut set = ObjectSet::empty(self.num_objects());
        for label in labels {
            let g = self
                .object_index(label)
                .ok_or_else(|| Error::invalid(format!("unknown object {label:?}")))?;
            set.insert(g);
        }
        Ok(set)
    }

    pub fn attribute_labels<'a>(&'a self, set: &'a AttributeSet) -> impl Iterator<Item = &'a str> {
        set.iter().map(move |j| self.attributes[j].as_str())
    }

    fn check_attrs(&self, attrs: &AttributeSet) -> Result<()> {
        if attrs.universe() != self.num_attributes() {
            return Err(Error::invalid(format!(
                "attribute set spans {} attributes, context has {}",
                attrs.universe(),
                self.num_attributes()
            )));
        }
        Ok(())
    }

    /// Attributes shared by every object in `objs`; all attributes for the
    /// empty set.
    pub fn derive_attributes(&self, objs: &ObjectSet) -> Result<AttributeSet> {
        if objs.universe() != self.num_objects() {
            return Err(Error::invalid(format!(
                "object set spans {} objects, context has {}",
                objs.universe(),
                self.num_objects()
            )));
        }
        Ok(self.intent(objs))
    }

    /// Objects having every attribute in `attrs`; all objects for the empty
    /// set.
    pub fn derive_objects(&self, attrs: &AttributeSet) -> Result<ObjectSet> {
        self.check_attrs(attrs)?;
        Ok(self.extent(attrs))
    }

    pub fn closure(&self, attrs: &AttributeSet) -> Result<AttributeSet> {
        self.check_attrs(attrs)?;
        Ok(self.close(attrs))
    }

    /// Number of objects whose row contains `attrs`.
    pub fn support(&self, attrs: &AttributeSet) -> Result<usize> {
        self.check_attrs(attrs)?;
        Ok(self.support_of(attrs))
    }

    pub(crate) fn intent(&self, objs: &ObjectSet) -> AttributeSet {
        let mut out = AttributeSet::full(self.num_attributes());
        for g in objs {
            out.intersect_with(&self.rows[g]);
        }
        out
    }

    pub(crate) fn extent(&self, attrs: &AttributeSet) -> ObjectSet {
        let mut out = ObjectSet::full(self.num_objects());
        for j in attrs {
            out.intersect_with(&self.columns[j]);
        }
        out
    }

    pub(crate) fn close(&self, attrs: &AttributeSet) -> AttributeSet {
        self.intent(&self.extent(attrs))
    }

    pub(crate) fn support_of(&self, attrs: &AttributeSet) -> usize {
        self.rows.iter().filter(|r| attrs.is_subset(r)).count()
    }
}
