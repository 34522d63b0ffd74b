//! Point sets: storage, the text file format, and seeded sampling.
//!
//! File format: the first non-comment line is `<structure-literal> <d>`; every
//! following non-empty line holds `d` whitespace-separated integer
//! representatives in `[0, q)`. `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Deref;

use crate::algebra::{Element, Structure};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::rng::SplitMix64;

/// A point of `S^d`. Ordering is lexicographic in the coordinates, which is
/// the order of the big-endian base-`q` packing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<Element>);

impl Point {
    pub fn from_reprs(reprs: &[u32]) -> Self {
        Point(reprs.iter().map(|&r| Element(r)).collect())
    }

    pub fn zero(d: usize) -> Self {
        Point(vec![Element(0); d])
    }

    pub fn reprs(&self) -> Vec<u32> {
        self.0.iter().map(|e| e.0).collect()
    }
}

impl Deref for Point {
    type Target = [Element];

    fn deref(&self) -> &[Element] {
        &self.0
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A duplicate-free set of points, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    structure: Structure,
    dim: usize,
    points: Vec<Point>,
}

/// Result of parsing a point-set file.
#[derive(Debug, Clone)]
pub struct ParsedPointSet {
    pub set: PointSet,
    /// Number of rows dropped because they repeated an earlier point.
    pub duplicates: usize,
}

impl PointSet {
    pub fn empty(structure: Structure, dim: usize) -> Self {
        PointSet { structure, dim, points: Vec::new() }
    }

    /// Builds a set, silently dropping duplicates.
    pub fn new(structure: Structure, dim: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        Ok(Self::new_counting_duplicates(structure, dim, points)?.0)
    }

    fn new_counting_duplicates(
        structure: Structure,
        dim: usize,
        points: impl IntoIterator<Item = Point>,
    ) -> Result<(Self, usize)> {
        if dim == 0 {
            return Err(Error::Precondition("dimension must be at least 1".into()));
        }
        let mut pts: Vec<Point> = Vec::new();
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if let Some(bad) = p.iter().find(|c| !structure.contains(**c)) {
                return Err(Error::ElementOutOfRange { repr: bad.0 as u64, q: structure.q() as u64 });
            }
            pts.push(p);
        }
        let before = pts.len();
        pts.sort_unstable();
        pts.dedup();
        let dups = before - pts.len();
        Ok((PointSet { structure, dim, points: pts }, dups))
    }

    pub fn from_reprs(structure: Structure, dim: usize, rows: &[&[u32]]) -> Result<Self> {
        Self::new(structure, dim, rows.iter().map(|r| Point::from_reprs(r)))
    }

    /// All of `S^d`.
    pub fn full_space(structure: Structure, dim: usize, limits: &Limits) -> Result<Self> {
        let size = space_size(&structure, dim, limits)?;
        let points = (0..size).map(|i| point_from_index(&structure, dim, i)).collect();
        Ok(PointSet { structure, dim, points })
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// Checks that `other` lives in the same ambient space.
    pub fn check_compatible(&self, other: &PointSet) -> Result<()> {
        if self.structure != other.structure {
            return Err(Error::StructureMismatch(self.structure.literal(), other.structure.literal()));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if let Some(bad) = x.iter().find(|c| !self.structure.contains(**c)) {
            return Err(Error::ElementOutOfRange { repr: bad.0 as u64, q: self.structure.q() as u64 });
        }
        Ok(())
    }

    /// `cE = { c x : x in E }`.
    pub fn scaled(&self, c: Element) -> PointSet {
        let s = &self.structure;
        let pts = self.points.iter().map(|p| Point(p.iter().map(|&a| s.mul(c, a)).collect()));
        PointSet::new(s.clone(), self.dim, pts).expect("scaling preserves validity")
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.check_compatible(other)?;
        PointSet::new(self.structure.clone(), self.dim, self.points.iter().chain(other.iter()).cloned())
    }

    pub fn parse(text: &str) -> Result<ParsedPointSet> {
        let mut header: Option<(Structure, usize)> = None;
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let line_no = lineno + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            match &header {
                None => {
                    let mut parts = line.split_whitespace();
                    let lit = parts.next().ok_or_else(|| err("missing structure".into()))?;
                    let d = parts.next().ok_or_else(|| err("missing dimension".into()))?;
                    if parts.next().is_some() {
                        return Err(err("trailing tokens in header".into()));
                    }
                    let s: Structure = lit.parse().map_err(|e: Error| err(e.to_string()))?;
                    let d: usize = d.parse().map_err(|_| err(format!("bad dimension {d:?}")))?;
                    if d == 0 {
                        return Err(err("dimension must be at least 1".into()));
                    }
                    header = Some((s, d));
                }
                Some((s, d)) => {
                    let coords = line
                        .split_whitespace()
                        .map(|t| {
                            let v: u64 = t.parse().map_err(|_| err(format!("bad coordinate {t:?}")))?;
                            s.element(v).map_err(|e| err(e.to_string()))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if coords.len() != *d {
                        return Err(err(format!("expected {d} coordinates, found {}", coords.len())));
                    }
                    rows.push(Point(coords));
                }
            }
        }
        let (s, d) = header.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
        let (set, duplicates) = Self::new_counting_duplicates(s, d, rows)?;
        Ok(ParsedPointSet { set, duplicates })
    }

    /// Canonical text form: header, then rows in sorted order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.structure.literal(), self.dim);
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

fn space_size(structure: &Structure, dim: usize, limits: &Limits) -> Result<u64> {
    let size = (structure.q() as u64)
        .checked_pow(dim as u32)
        .ok_or(Error::SpaceTooLarge { size: u64::MAX, bound: limits.max_space })?;
    if size > limits.max_space {
        return Err(Error::SpaceTooLarge { size, bound: limits.max_space });
    }
    Ok(size)
}

/// Decodes a big-endian base-`q` index into a point.
pub fn point_from_index(structure: &Structure, dim: usize, mut index: u64) -> Point {
    let q = structure.q() as u64;
    let mut coords = vec![Element(0); dim];
    for c in coords.iter_mut().rev() {
        *c = Element((index % q) as u32);
        index /= q;
    }
    Point(coords)
}

pub fn index_of_point(structure: &Structure, p: &Point) -> u64 {
    let q = structure.q() as u64;
    p.iter().fold(0, |acc, c| acc * q + c.0 as u64)
}

/// Iterates over every point of `S^d`, in canonical order.
pub fn space_points(structure: &Structure, dim: usize, limits: &Limits) -> Result<impl Iterator<Item = Point>> {
    let size = space_size(structure, dim, limits)?;
    let s = structure.clone();
    Ok((0..size).map(move |i| point_from_index(&s, dim, i)))
}

/// Uniform `n`-subset of `S^d` drawn without replacement.
///
/// Runs a partial Fisher-Yates shuffle on the index range `[0, q^d)` driven
/// by [`SplitMix64`]: for `i = 0..n`, draw `j` uniformly from `[i, q^d)` and
/// swap positions `i` and `j`. The first `n` positions are the sample.
pub fn sample_uniform(structure: &Structure, dim: usize, n: u64, seed: u64, limits: &Limits) -> Result<PointSet> {
    let size = (structure.q() as u64).saturating_pow(dim as u32);
    if n > size {
        return Err(Error::SampleTooLarge { n, size });
    }
    let size = space_size(structure, dim, limits)?;
    let mut rng = SplitMix64::new(seed);
    let mut displaced: HashMap<u64, u64> = HashMap::new();
    let mut chosen = Vec::with_capacity(n as usize);
    for i in 0..n {
        let j = i + rng.below(size - i);
        let vj = *displaced.get(&j).unwrap_or(&j);
        let vi = *displaced.get(&i).unwrap_or(&i);
        displaced.insert(j, vi);
        chosen.push(vj);
    }
    chosen.sort_unstable();
    let points = chosen.into_iter().map(|i| point_from_index(structure, dim, i)).collect();
    Ok(PointSet { structure: structure.clone(), dim, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z9() -> Structure {
        Structure::integer_ring(3, 2).unwrap()
    }

    #[test]
    fn parse_erratum_pair() {
        let parsed = PointSet::parse("Z:3^2 2\n3 2\n3 4\n").unwrap();
        assert_eq!(parsed.set.structure(), &z9());
        assert_eq!(parsed.set.dim(), 2);
        assert_eq!(parsed.set.len(), 2);
        assert_eq!(parsed.duplicates, 0);
    }

    #[test]
    fn parse_empty_body() {
        let parsed = PointSet::parse("# nothing here\nFp:3 2\n\n").unwrap();
        assert!(parsed.set.is_empty());
    }

    #[test]
    fn parse_duplicates_flagged() {
        let parsed = PointSet::parse("Fp:3 2\n1 1\n1 1 # again\n0 2\n").unwrap();
        assert_eq!(parsed.set.len(), 2);
        assert_eq!(parsed.duplicates, 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(PointSet::parse(""), Err(Error::Parse { .. })));
        assert!(matches!(PointSet::parse("Fp:3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(PointSet::parse("Q:3 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(PointSet::parse("Fp:3 2\n1 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(PointSet::parse("Fp:3 2\n1 1\n1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(PointSet::parse("Fp:3 2\n1 x\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn canonical_text() {
        let parsed = PointSet::parse("Z:3^2 2 # header\n3 4\n3 2\n3 4\n").unwrap();
        assert_eq!(parsed.set.to_text(), "Z:3^2 2\n3 2\n3 4\n");
    }

    #[test]
    fn full_space_and_indexing() {
        let s = Structure::prime_field(3).unwrap();
        let full = PointSet::full_space(s.clone(), 2, &Limits::default()).unwrap();
        assert_eq!(full.len(), 9);
        for (i, p) in full.iter().enumerate() {
            assert_eq!(index_of_point(&s, p), i as u64);
        }
    }

    #[test]
    fn sampling_edges() {
        let s = Structure::prime_field(3).unwrap();
        let l = Limits::default();
        for seed in [0, 1, 99] {
            let all = sample_uniform(&s, 2, 9, seed, &l).unwrap();
            assert_eq!(all, PointSet::full_space(s.clone(), 2, &l).unwrap());
            assert!(sample_uniform(&s, 2, 0, seed, &l).unwrap().is_empty());
        }
        assert_eq!(
            sample_uniform(&s, 2, 10, 0, &l).unwrap_err(),
            Error::SampleTooLarge { n: 10, size: 9 }
        );
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = Structure::prime_field(3).unwrap();
        let a = sample_uniform(&s, 2, 4, 1, &Limits::default()).unwrap();
        let b = sample_uniform(&s, 2, 4, 1, &Limits::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn single_point_sampling_is_uniform() {
        let s = Structure::prime_field(3).unwrap();
        let mut hits = [0u32; 9];
        for seed in 0..2000 {
            let e = sample_uniform(&s, 2, 1, seed, &Limits::default()).unwrap();
            hits[index_of_point(&s, &e.points()[0]) as usize] += 1;
        }
        for h in hits {
            let freq = h as f64 / 2000.0;
            assert!((freq - 1.0 / 9.0).abs() <= 0.03, "{hits:?}");
        }
    }

    #[test]
    fn scaling_by_unit_is_bijective() {
        let e = PointSet::from_reprs(z9(), 2, &[&[1, 2], &[3, 4], &[0, 5]]).unwrap();
        let scaled = e.scaled(Element(2));
        assert_eq!(scaled.len(), 3);
        assert!(scaled.contains(&Point::from_reprs(&[2, 4])));
        assert!(scaled.contains(&Point::from_reprs(&[6, 8])));
    }

    proptest! {
        #[test]
        fn sample_has_exact_size(n in 0u64..=81, seed in any::<u64>()) {
            let e = sample_uniform(&z9(), 2, n, seed, &Limits::default()).unwrap();
            prop_assert_eq!(e.len() as u64, n);
        }

        #[test]
        fn text_round_trip(rows in proptest::collection::vec((0u32..9, 0u32..9, 0u32..9), 0..30)) {
            let mut text = String::from("Z:3^2 3\n");
            for (a, b, c) in &rows {
                text.push_str(&format!("{a} {b}  {c}\n"));
            }
            let once = PointSet::parse(&text).unwrap().set;
            let canonical = once.to_text();
            let twice = PointSet::parse(&canonical).unwrap();
            prop_assert_eq!(twice.duplicates, 0);
            prop_assert_eq!(twice.set.to_text(), canonical);
            prop_assert_eq!(twice.set, once);
        }
    }
}
