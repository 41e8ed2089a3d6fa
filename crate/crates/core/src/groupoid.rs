//! Finite principal groupoids, i.e. equivalence relations on a finite unit set.
//!
//! Arrows are `(range, source)` pairs of unit indices and are never stored:
//! membership follows from the partition into classes.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub range: usize,
    pub source: usize,
}

impl Arrow {
    pub fn new(range: usize, source: usize) -> Self {
        Self { range, source }
    }

    pub fn unit(i: usize) -> Self {
        Self { range: i, source: i }
    }

    pub fn is_unit(&self) -> bool {
        self.range == self.source
    }

    pub fn inverse(&self) -> Self {
        Self {
            range: self.source,
            source: self.range,
        }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}<-{})", self.range, self.source)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    units: Vec<String>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl FiniteGroupoid {
    /// The pair groupoid: every unit related to every other.
    pub fn pair<S: AsRef<str>>(units: &[S]) -> Result<Self> {
        let all: Vec<&str> = units.iter().map(AsRef::as_ref).collect();
        Self::partition(units, &[all])
    }

    /// The groupoid of the equivalence relation whose classes are given by id.
    pub fn partition<S: AsRef<str>, T: AsRef<str>>(units: &[S], classes: &[Vec<T>]) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::Invalid("groupoid needs at least one unit".into()));
        }
        let units: Vec<String> = units.iter().map(|u| u.as_ref().to_owned()).collect();
        let mut index = HashMap::with_capacity(units.len());
        for (i, u) in units.iter().enumerate() {
            if index.insert(u.as_str(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate unit id `{u}`")));
            }
        }
        let mut class_of = vec![usize::MAX; units.len()];
        let mut out_classes = Vec::with_capacity(classes.len());
        for (c, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::Invalid(format!("class {c} is empty")));
            }
            let mut members = Vec::with_capacity(class.len());
            for id in class {
                let id = id.as_ref();
                let &i = index.get(id).ok_or_else(|| Error::UnknownUnit(id.to_owned()))?;
                if class_of[i] != usize::MAX {
                    return Err(Error::Invalid(format!("unit `{id}` appears in more than one class")));
                }
                class_of[i] = c;
                members.push(i);
            }
            members.sort_unstable();
            out_classes.push(members);
        }
        if let Some(i) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::Invalid(format!("unit `{}` is not in any class", units[i])));
        }
        Ok(Self {
            units,
            class_of,
            classes: out_classes,
        })
    }

    /// Every unit in its own class: only identity arrows.
    pub fn discrete<S: AsRef<str>>(units: &[S]) -> Result<Self> {
        let classes: Vec<Vec<&str>> = units.iter().map(|u| vec![u.as_ref()]).collect();
        Self::partition(units, &classes)
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn unit_id(&self, i: usize) -> &str {
        &self.units[i]
    }

    pub fn unit_index(&self, id: &str) -> Option<usize> {
        self.units.iter().position(|u| u == id)
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// Units related to `i`, including `i`, ascending.
    pub fn class_members(&self, i: usize) -> &[usize] {
        &self.classes[self.class_of[i]]
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.class_of[i] == self.class_of[j]
    }

    pub fn contains(&self, arrow: Arrow) -> bool {
        arrow.range < self.len() && arrow.source < self.len() && self.related(arrow.range, arrow.source)
    }

    /// All arrows, ordered by range then source.
    pub fn arrows(&self) -> impl Iterator<Item = Arrow> + '_ {
        (0..self.len()).flat_map(move |r| {
            self.class_members(r)
                .iter()
                .map(move |&s| Arrow::new(r, s))
        })
    }

    pub fn arrow_count(&self) -> usize {
        self.classes.iter().map(|c| c.len() * c.len()).sum()
    }

    fn check(&self, g: Arrow) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::NotAnArrow(self.describe(g)))
        }
    }

    /// `g1 ∘ g2`, defined when `source(g1) = range(g2)`.
    pub fn compose(&self, g1: Arrow, g2: Arrow) -> Result<Arrow> {
        self.check(g1)?;
        self.check(g2)?;
        if g1.source != g2.range {
            return Err(Error::NotComposable(self.describe(g1), self.describe(g2)));
        }
        Ok(Arrow::new(g1.range, g2.source))
    }

    pub fn inverse(&self, g: Arrow) -> Result<Arrow> {
        self.check(g)?;
        Ok(g.inverse())
    }

    /// Human-readable arrow using unit ids.
    pub fn describe(&self, g: Arrow) -> String {
        let name = |i: usize| self.units.get(i).map_or_else(|| format!("#{i}"), Clone::clone);
        format!("({}, {})", name(g.range), name(g.source))
    }
}
