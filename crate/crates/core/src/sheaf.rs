//! The object space `B`, tangent and cotangent fields, and the sheaf of
//! per-object field choices over members of `B`.
//!
//! `B` is discrete, so a member is just a set of units (stored as a bitmask)
//! and a section over a member is a choice of stalk element for each unit in
//! it. Restriction forgets choices; gluing merges families that agree on
//! overlaps.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bundle::FellBundle;
use crate::error::{Error, Result};
use crate::groupoid::{Arrow, FiniteGroupoid};
use crate::matrix::ComplexMatrix;
use crate::representation::GeometryConfig;

/// Largest unit count a [`Member`] bitmask can hold.
pub const MAX_UNITS: usize = 64;

/// A union of objects `A_{i,j,...}` of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Member(u64);

impl Member {
    pub const EMPTY: Member = Member(0);

    pub fn from_units<I: IntoIterator<Item = usize>>(units: I) -> Self {
        Member(units.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn singleton(i: usize) -> Self {
        Member(1 << i)
    }

    pub fn full(k: usize) -> Self {
        if k >= MAX_UNITS {
            Member(u64::MAX)
        } else {
            Member((1u64 << k) - 1)
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn union(self, other: Self) -> Self {
        Member(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Member(self.0 & other.0)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn units(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_UNITS).filter(move |&i| bits & (1 << i) != 0)
    }

    /// All sub-members, including the empty one and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Member> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(Member(cur))
        })
    }
}

impl fmt::Display for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.units().map(|i| (i + 1).to_string()).collect();
        write!(f, "A_{{{}}}", ids.join(","))
    }
}

/// The discrete space of objects of a bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObjectSpace {
    units: usize,
}

impl ObjectSpace {
    pub fn new(units: usize) -> Result<Self> {
        if units > MAX_UNITS {
            return Err(Error::Invalid(format!("object space limited to {MAX_UNITS} units")));
        }
        Ok(Self { units })
    }

    pub fn of(groupoid: &FiniteGroupoid) -> Result<Self> {
        Self::new(groupoid.len())
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn whole(&self) -> Member {
        Member::full(self.units)
    }

    pub fn members(&self) -> impl Iterator<Item = Member> {
        self.whole().subsets()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// One morphism with domain (source) at each object.
    Tangent,
    /// One morphism with range at each object.
    Cotangent,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Tangent => "tangent",
            Direction::Cotangent => "cotangent",
        }
    }

    pub fn dual(self) -> Self {
        match self {
            Direction::Tangent => Direction::Cotangent,
            Direction::Cotangent => Direction::Tangent,
        }
    }

    /// The arrow a pattern assigns to unit `i` when it points at `target`.
    pub fn arrow(self, i: usize, target: usize) -> Arrow {
        match self {
            Direction::Cotangent => Arrow::new(i, target),
            Direction::Tangent => Arrow::new(target, i),
        }
    }
}

/// The support of a (co)tangent field: unit `i` is joined to `map[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub direction: Direction,
    pub map: Vec<usize>,
}

impl Pattern {
    pub fn new(groupoid: &FiniteGroupoid, direction: Direction, map: Vec<usize>) -> Result<Self> {
        if map.len() != groupoid.len() {
            return Err(Error::Invalid(format!(
                "pattern covers {} units, groupoid has {}",
                map.len(),
                groupoid.len()
            )));
        }
        for (i, &t) in map.iter().enumerate() {
            if t >= groupoid.len() || !groupoid.related(i, t) {
                return Err(Error::NotAnArrow(groupoid.describe(direction.arrow(i, t))));
            }
        }
        Ok(Self { direction, map })
    }

    pub fn identity(direction: Direction, k: usize) -> Self {
        Self {
            direction,
            map: (0..k).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// The arrow carrying the fiber at unit `i`.
    pub fn arrow(&self, i: usize) -> Arrow {
        self.direction.arrow(i, self.map[i])
    }

    /// Block positions `(row, col)` of the field's matrix, indexed by unit.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.map.len()).map(|i| {
            let a = self.arrow(i);
            (a.range, a.source)
        })
    }

    pub fn is_involution(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &t)| self.map[t] == i)
    }

    /// The same map read in the other direction; arrows are reversed.
    pub fn dual(&self) -> Self {
        Self {
            direction: self.direction.dual(),
            map: self.map.clone(),
        }
    }

    pub fn to_id_map(&self, groupoid: &FiniteGroupoid) -> BTreeMap<String, String> {
        self.map
            .iter()
            .enumerate()
            .map(|(i, &t)| (groupoid.unit_id(i).to_owned(), groupoid.unit_id(t).to_owned()))
            .collect()
    }

    pub fn from_id_map(
        groupoid: &FiniteGroupoid,
        direction: Direction,
        ids: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut map = vec![usize::MAX; groupoid.len()];
        for (from, to) in ids {
            let i = groupoid.unit_index(from).ok_or_else(|| Error::UnknownUnit(from.clone()))?;
            let t = groupoid.unit_index(to).ok_or_else(|| Error::UnknownUnit(to.clone()))?;
            map[i] = t;
        }
        if let Some(i) = map.iter().position(|&t| t == usize::MAX) {
            return Err(Error::spec("pattern", format!("no target for unit `{}`", groupoid.unit_id(i))));
        }
        Self::new(groupoid, direction, map)
    }

    pub fn describe(&self, groupoid: &FiniteGroupoid) -> String {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .map(|(i, &t)| format!("{}->{}", groupoid.unit_id(i), groupoid.unit_id(t)))
            .collect();
        parts.join(" ")
    }
}

/// Necessary conditions on a pattern whose field is nonzero on every block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternFilter {
    /// `p(p(i)) = i`, required by self-adjointness.
    Involution,
    /// `chirality(i) != chirality(p(i))`, required by anticommuting with `chi`.
    ChiralityFlip,
    /// `p(conj(i)) = conj(p(i))`, required by `J`-reality.
    ConjugationEquivariant,
    /// `sector(i) = sector(p(i))`, required by S0-reality.
    SectorPreserving,
}

impl PatternFilter {
    /// Whether the partial assignment `map[..=upto]` can still satisfy the filter.
    fn admits_partial(self, config: &GeometryConfig, map: &[usize], upto: usize) -> bool {
        let assigned = |u: usize| u <= upto;
        match self {
            PatternFilter::Involution => (0..=upto)
                .all(|u| !assigned(map[u]) || map[map[u]] == u),
            PatternFilter::ChiralityFlip => {
                config.chirality[upto] != config.chirality[map[upto]]
            }
            PatternFilter::SectorPreserving => config.sector[upto] == config.sector[map[upto]],
            PatternFilter::ConjugationEquivariant => (0..=upto).all(|u| {
                let cu = config.conjugation[u];
                !assigned(cu) || map[cu] == config.conjugation[map[u]]
            }),
        }
    }

    pub fn admits(self, config: &GeometryConfig, pattern: &Pattern) -> bool {
        let last = pattern.len().saturating_sub(1);
        match self {
            PatternFilter::ChiralityFlip | PatternFilter::SectorPreserving => {
                (0..pattern.len()).all(|u| self.admits_partial(config, &pattern.map, u))
            }
            _ => pattern.is_empty() || self.admits_partial(config, &pattern.map, last),
        }
    }
}

fn backtrack(
    groupoid: &FiniteGroupoid,
    direction: Direction,
    accept: &dyn Fn(&[usize], usize) -> bool,
) -> Vec<Pattern> {
    let k = groupoid.len();
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut map = vec![0usize; k];
    let mut choice = vec![0usize; k];
    let mut depth = 0usize;
    loop {
        let options = groupoid.class_members(depth);
        if choice[depth] < options.len() {
            map[depth] = options[choice[depth]];
            choice[depth] += 1;
            if accept(&map, depth) {
                if depth + 1 == k {
                    out.push(Pattern {
                        direction,
                        map: map.clone(),
                    });
                } else {
                    depth += 1;
                    choice[depth] = 0;
                }
            }
        } else if depth == 0 {
            break;
        } else {
            depth -= 1;
        }
    }
    out
}

/// Every pattern of the groupoid, in lexicographic order of the target map.
pub fn all_patterns(groupoid: &FiniteGroupoid, direction: Direction) -> Vec<Pattern> {
    backtrack(groupoid, direction, &|_, _| true)
}

/// Patterns passing every filter, in lexicographic order. Filters are applied
/// during the search so pruned branches are never expanded.
pub fn enumerate_patterns(config: &GeometryConfig, direction: Direction, filters: &[PatternFilter]) -> Vec<Pattern> {
    backtrack(config.bundle.groupoid(), direction, &|map, upto| {
        filters.iter().all(|f| f.admits_partial(config, map, upto))
    })
}

/// A tangent or cotangent field: one fiber element per unit along a pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphismField {
    pub pattern: Pattern,
    pub blocks: Vec<ComplexMatrix>,
}

impl MorphismField {
    pub fn new(bundle: &FellBundle, pattern: Pattern, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != pattern.len() || pattern.len() != bundle.groupoid().len() {
            return Err(Error::Dimension("one block per unit is required".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            bundle.element(pattern.arrow(i), b.clone())?;
        }
        Ok(Self { pattern, blocks })
    }

    pub fn zero(bundle: &FellBundle, pattern: Pattern) -> Self {
        let blocks = (0..pattern.len())
            .map(|i| bundle.zero_element(pattern.arrow(i)).value)
            .collect();
        Self { pattern, blocks }
    }

    pub fn direction(&self) -> Direction {
        self.pattern.direction
    }

    /// The block matrix of the field.
    pub fn as_matrix(&self, bundle: &FellBundle) -> ComplexMatrix {
        let bs = bundle.block_structure();
        let m = bs.total();
        let mut out = ComplexMatrix::zeros(m, m);
        for (i, (r, c)) in self.pattern.blocks().enumerate() {
            bs.set_block(&mut out, r, c, &self.blocks[i]);
        }
        out
    }

    /// Reads a field off a block matrix with at most one nonzero block per
    /// block-row (cotangent) or block-column (tangent). Rows without a
    /// nonzero block are assigned the unit arrow.
    pub fn from_matrix(bundle: &FellBundle, m: &ComplexMatrix, direction: Direction, tol: f64) -> Result<Self> {
        let bs = bundle.block_structure();
        let k = bs.len();
        if m.shape() != (bs.total(), bs.total()) {
            return Err(Error::Dimension("matrix does not match the bundle".into()));
        }
        let mut map = Vec::with_capacity(k);
        let mut blocks = Vec::with_capacity(k);
        for i in 0..k {
            let block_at = |t: usize| match direction {
                Direction::Cotangent => bs.get_block(m, i, t),
                Direction::Tangent => bs.get_block(m, t, i),
            };
            let nonzero: Vec<usize> = (0..k).filter(|&t| !block_at(t).is_zero(tol)).collect();
            let target = match nonzero.as_slice() {
                [] => i,
                [t] => *t,
                _ => return Err(Error::NotAField(direction.name())),
            };
            map.push(target);
            blocks.push(block_at(target));
        }
        let pattern = Pattern::new(bundle.groupoid(), direction, map)?;
        Self::new(bundle, pattern, blocks)
    }

    /// The adjoint field: arrows reversed, fibers adjointed, direction flipped.
    pub fn adjoint(&self) -> Self {
        Self {
            pattern: self.pattern.dual(),
            blocks: self.blocks.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// Product of two fields of the same direction: patterns compose and
    /// fibers multiply, matching the matrix product of the two fields.
    pub fn multiply(bundle: &FellBundle, f: &Self, g: &Self) -> Result<Self> {
        if f.direction() != g.direction() {
            return Err(Error::Invalid("cannot multiply fields of different directions".into()));
        }
        let k = f.pattern.len();
        let mut map = Vec::with_capacity(k);
        let mut blocks = Vec::with_capacity(k);
        match f.direction() {
            Direction::Cotangent => {
                for i in 0..k {
                    let mid = f.pattern.map[i];
                    map.push(g.pattern.map[mid]);
                    blocks.push(f.blocks[i].try_mul(&g.blocks[mid])?);
                }
            }
            Direction::Tangent => {
                for i in 0..k {
                    let mid = g.pattern.map[i];
                    map.push(f.pattern.map[mid]);
                    blocks.push(f.blocks[mid].try_mul(&g.blocks[i])?);
                }
            }
        }
        let pattern = Pattern::new(bundle.groupoid(), f.direction(), map)?;
        Self::new(bundle, pattern, blocks)
    }
}

/// One admissible choice in the (co)tangent space at a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StalkEntry {
    pub arrow: Arrow,
    pub shape: (usize, usize),
}

/// Arrows ranged (cotangent) or sourced (tangent) at `unit`, with fiber shapes.
pub fn stalk(bundle: &FellBundle, unit: usize, direction: Direction) -> Vec<StalkEntry> {
    bundle
        .groupoid()
        .class_members(unit)
        .iter()
        .map(|&t| {
            let arrow = direction.arrow(unit, t);
            StalkEntry {
                arrow,
                shape: bundle.fiber_shape(arrow),
            }
        })
        .collect()
}

/// A section over a member: one stalk choice for each unit of the member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SheafSection<T> {
    pub domain: Member,
    pub values: BTreeMap<usize, T>,
}

/// A sheaf on the discrete object space with finite stalks.
#[derive(Debug, Clone)]
pub struct DiscreteSheaf<T> {
    stalks: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SheafAxiomReport {
    pub normalization: bool,
    pub gluing: bool,
    pub members_checked: usize,
    pub covers_checked: usize,
    pub families_checked: usize,
}

impl SheafAxiomReport {
    pub fn pass(&self) -> bool {
        self.normalization && self.gluing
    }
}

impl<T: Clone + Eq + std::hash::Hash> DiscreteSheaf<T> {
    pub fn new(stalks: Vec<Vec<T>>) -> Result<Self> {
        ObjectSpace::new(stalks.len())?;
        Ok(Self { stalks })
    }

    /// The same alphabet at every unit.
    pub fn constant(units: usize, alphabet: Vec<T>) -> Result<Self> {
        Self::new(vec![alphabet; units])
    }

    pub fn space(&self) -> ObjectSpace {
        ObjectSpace { units: self.stalks.len() }
    }

    pub fn stalk(&self, i: usize) -> &[T] {
        &self.stalks[i]
    }

    /// All sections over `domain`: the product of its stalks.
    pub fn sections_over(&self, domain: Member) -> Vec<SheafSection<T>> {
        let units: Vec<usize> = domain.units().collect();
        let mut out = vec![SheafSection {
            domain,
            values: BTreeMap::new(),
        }];
        for &u in &units {
            let mut next = Vec::with_capacity(out.len() * self.stalks[u].len());
            for s in &out {
                for v in &self.stalks[u] {
                    let mut t = s.clone();
                    t.values.insert(u, v.clone());
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }

    pub fn restrict(&self, section: &SheafSection<T>, to: Member) -> Result<SheafSection<T>> {
        if !to.is_subset_of(section.domain) {
            return Err(Error::NotASubset(to.to_string(), section.domain.to_string()));
        }
        Ok(SheafSection {
            domain: to,
            values: section
                .values
                .iter()
                .filter(|(u, _)| to.contains(**u))
                .map(|(u, v)| (*u, v.clone()))
                .collect(),
        })
    }

    /// Glues a family agreeing on overlaps; `None` when two members disagree.
    pub fn glue(&self, family: &[SheafSection<T>]) -> Option<SheafSection<T>> {
        let mut domain = Member::EMPTY;
        let mut values = BTreeMap::new();
        for s in family {
            domain = domain.union(s.domain);
            for (u, v) in &s.values {
                match values.get(u) {
                    Some(existing) if existing != v => return None,
                    Some(_) => {}
                    None => {
                        values.insert(*u, v.clone());
                    }
                }
            }
        }
        Some(SheafSection { domain, values })
    }

    fn check_cover(&self, u: Member, cover: &[Member], report: &mut SheafAxiomReport) -> bool {
        report.covers_checked += 1;
        // Every section over U is determined by its restrictions (uniqueness) ...
        let mut by_restriction: HashMap<Vec<SheafSection<T>>, usize> = HashMap::new();
        for s in self.sections_over(u) {
            let key: Vec<_> = cover.iter().map(|&v| self.restrict(&s, v).expect("cover inside U")).collect();
            *by_restriction.entry(key).or_default() += 1;
        }
        if by_restriction.values().any(|&n| n != 1) {
            return false;
        }
        // ... and every compatible family glues to a section restricting back to it.
        let mut families: Vec<Vec<SheafSection<T>>> = vec![Vec::new()];
        for &v in cover {
            let sections = self.sections_over(v);
            families = families
                .into_iter()
                .flat_map(|f| {
                    sections.iter().map(move |s| {
                        let mut g = f.clone();
                        g.push(s.clone());
                        g
                    })
                })
                .collect();
        }
        let mut compatible = 0usize;
        for family in &families {
            report.families_checked += 1;
            let agree = family.iter().enumerate().all(|(a, sa)| {
                family[a + 1..].iter().all(|sb| {
                    let overlap = sa.domain.intersection(sb.domain);
                    self.restrict(sa, overlap).ok() == self.restrict(sb, overlap).ok()
                })
            });
            match (agree, self.glue(family)) {
                (true, Some(glued)) => {
                    if glued.domain != u || !by_restriction.contains_key(family) {
                        return false;
                    }
                    if !family.iter().all(|s| self.restrict(&glued, s.domain).ok().as_ref() == Some(s)) {
                        return false;
                    }
                    compatible += 1;
                }
                (false, None) => {}
                _ => return false,
            }
        }
        compatible == by_restriction.len()
    }

    /// Normalization (one section over the empty member) and gluing for every
    /// member, over covers by two sub-members and by its singletons.
    pub fn check_axioms(&self) -> SheafAxiomReport {
        let mut report = SheafAxiomReport {
            normalization: self.sections_over(Member::EMPTY).len() == 1,
            gluing: true,
            members_checked: 0,
            covers_checked: 0,
            families_checked: 0,
        };
        for u in self.space().members() {
            report.members_checked += 1;
            let singletons: Vec<Member> = u.units().map(Member::singleton).collect();
            if !self.check_cover(u, &singletons, &mut report) {
                report.gluing = false;
            }
            for v1 in u.subsets() {
                for v2 in u.subsets() {
                    if v1 > v2 || v1.union(v2) != u {
                        continue;
                    }
                    if !self.check_cover(u, &[v1, v2], &mut report) {
                        report.gluing = false;
                    }
                }
            }
        }
        report
    }
}

/// The sheaf whose stalk at each unit is the set of arrows a field of the
/// given direction may choose there.
pub fn arrow_sheaf(bundle: &FellBundle, direction: Direction) -> Result<DiscreteSheaf<StalkEntry>> {
    let stalks = (0..bundle.groupoid().len())
        .map(|i| stalk(bundle, i, direction))
        .collect();
    DiscreteSheaf::new(stalks)
}
