//! Structured point sets with many chains, and lines `L_alpha(v)` in the plane.

use serde::Serialize;

use crate::algebra::{Element, Structure, StructureKind};
use crate::error::{Error, Result};
use crate::pointsets::{Point, PointSet};

/// The two coordinate axes of `S^d`: `{(x, 0, ...)} u {(0, y, 0, ...)}`.
///
/// The origin lies on both axes, so `|E| = 2q - 1`. Every pair with one
/// point on each axis has dot product zero.
pub fn axes_set(s: &Structure, d: usize) -> Result<PointSet> {
    if d < 2 {
        return Err(Error::Precondition(format!("axes need d >= 2, got {d}")));
    }
    let mut pts = Vec::with_capacity(2 * s.q() as usize);
    for a in s.elements() {
        let mut x = vec![Element(0); d];
        x[0] = a;
        pts.push(Point(x));
        let mut y = vec![Element(0); d];
        y[1] = a;
        pts.push(Point(y));
    }
    PointSet::new(s.clone(), d, pts)
}

/// `{(x, 0, alpha)} u {(0, y, 1)}` in `S^3`; every cross pair has dot
/// product `alpha`.
///
/// For `alpha = 1` the point `(0, 0, 1)` lies in both families and
/// `|E| = 2q - 1`; otherwise `|E| = 2q`.
pub fn shifted_lines_set(s: &Structure, alpha: Element) -> Result<PointSet> {
    if !s.is_field() {
        return Err(Error::Precondition("shifted lines are built over fields".into()));
    }
    if !s.contains(alpha) {
        return Err(Error::ElementOutOfRange { repr: alpha.0 as u64, q: s.q() as u64 });
    }
    let mut pts = Vec::with_capacity(2 * s.q() as usize);
    for a in s.elements() {
        pts.push(Point(vec![a, Element(0), alpha]));
        pts.push(Point(vec![Element(0), a, Element(1)]));
    }
    PointSet::new(s.clone(), 3, pts)
}

/// Three families in `(Z/p^l)^2` whose cross pairs realize a fixed 2-chain type.
#[derive(Debug, Clone)]
pub struct ErratumFamily {
    pub set: PointSet,
    /// `{(a p, alpha)}`.
    pub x: Vec<Point>,
    /// `{(b p^{l-1}, 1)}`.
    pub y: Vec<Point>,
    /// `{(c p, beta)}`.
    pub z: Vec<Point>,
    pub alpha: Element,
    pub beta: Element,
}

/// Builds `X u Y u Z` in `(Z/p^l)^2`. Every `(x, y, z)` in `X x Y x Z` is a
/// 2-chain of type `(alpha, beta)` because `p * p^{l-1} = 0`.
pub fn erratum_family_set(p: u64, l: u32, alpha: Element, beta: Element) -> Result<ErratumFamily> {
    if l < 2 {
        return Err(Error::Precondition(format!("need l >= 2, got {l}")));
    }
    let s = Structure::new(StructureKind::IntegerRing, p, l)?;
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !s.contains(v) {
            return Err(Error::ElementOutOfRange { repr: v.0 as u64, q: s.q() as u64 });
        }
        if !s.is_unit(v) {
            return Err(Error::Precondition(format!("{name} = {v} is not a unit")));
        }
        if v == s.one() {
            return Err(Error::Precondition(format!("{name} must differ from 1")));
        }
    }
    if alpha == beta {
        return Err(Error::Precondition("alpha and beta must be distinct".into()));
    }
    let p32 = s.p();
    let top = s.q() / p32;
    let x: Vec<Point> = (0..p32).map(|a| Point(vec![Element(a * p32), alpha])).collect();
    let y: Vec<Point> = (0..p32).map(|b| Point(vec![Element(b * top), Element(1)])).collect();
    let z: Vec<Point> = (0..p32).map(|c| Point(vec![Element(c * p32), beta])).collect();
    let set = PointSet::new(s, 2, x.iter().chain(&y).chain(&z).cloned())?;
    Ok(ErratumFamily { set, x, y, z, alpha, beta })
}

/// `L_alpha(v) = { y in S^2 : v . y = alpha }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSet {
    pub v: Point,
    pub alpha: Element,
    /// Sorted.
    pub points: Vec<Point>,
}

impl LineSet {
    pub fn contains(&self, y: &Point) -> bool {
        self.points.binary_search(y).is_ok()
    }

    pub fn intersection(&self, other: &LineSet) -> Vec<Point> {
        self.points.iter().filter(|y| other.contains(y)).cloned().collect()
    }
}

pub fn line_points(s: &Structure, v: &Point, alpha: Element) -> Result<LineSet> {
    if v.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: v.len() });
    }
    if !s.contains(alpha) || v.iter().any(|c| !s.contains(*c)) {
        return Err(Error::Precondition("line parameters out of range".into()));
    }
    let mut points = Vec::new();
    if s.is_unit(v[0]) {
        // y_0 = v_0^{-1} (alpha - v_1 y_1)
        let inv = s.inv(v[0])?;
        for y1 in s.elements() {
            let y0 = s.mul(inv, s.sub(alpha, s.mul(v[1], y1)));
            points.push(Point(vec![y0, y1]));
        }
    } else if s.is_unit(v[1]) {
        let inv = s.inv(v[1])?;
        for y0 in s.elements() {
            let y1 = s.mul(inv, s.sub(alpha, s.mul(v[0], y0)));
            points.push(Point(vec![y0, y1]));
        }
    } else {
        for y0 in s.elements() {
            for y1 in s.elements() {
                let y = Point(vec![y0, y1]);
                if s.dot_unchecked(v, &y) == alpha {
                    points.push(y);
                }
            }
        }
    }
    points.sort_unstable();
    Ok(LineSet { v: v.clone(), alpha, points })
}

/// Listed points of `L_2((3,2))` in `Z_9^2`.
pub const ERRATUM_LINE_V: [[u32; 2]; 9] =
    [[0, 1], [1, 4], [2, 7], [3, 1], [4, 4], [5, 7], [6, 1], [7, 4], [8, 7]];
/// Listed points of `L_4((3,4))` in `Z_9^2`.
pub const ERRATUM_LINE_W: [[u32; 2]; 9] =
    [[0, 1], [1, 7], [2, 4], [3, 1], [4, 7], [5, 4], [6, 1], [7, 7], [8, 4]];
/// Their listed intersection.
pub const ERRATUM_INTERSECTION: [[u32; 2]; 3] = [[0, 1], [3, 1], [6, 1]];

#[derive(Debug, Clone, Serialize)]
pub struct ErratumReport {
    pub structure: String,
    pub v: Vec<u32>,
    pub alpha: u32,
    pub w: Vec<u32>,
    pub beta: u32,
    pub line_v: Vec<Vec<u32>>,
    pub line_w: Vec<Vec<u32>>,
    pub intersection: Vec<Vec<u32>>,
    pub line_v_matches_listing: bool,
    pub line_w_matches_listing: bool,
    pub intersection_matches_listing: bool,
    pub intersection_size: usize,
    pub lines_differ: bool,
    pub pass: bool,
}

fn listing(rows: &[[u32; 2]]) -> Vec<Point> {
    let mut v: Vec<Point> = rows.iter().map(|r| Point::from_reprs(r)).collect();
    v.sort_unstable();
    v
}

/// Two distinct lines in `Z_9^2` sharing three points.
pub fn erratum_counterexample() -> ErratumReport {
    let s = Structure::integer_ring(3, 2).expect("Z_9");
    let v = Point::from_reprs(&[3, 2]);
    let w = Point::from_reprs(&[3, 4]);
    let lv = line_points(&s, &v, Element(2)).expect("valid line");
    let lw = line_points(&s, &w, Element(4)).expect("valid line");
    let inter = lv.intersection(&lw);
    let line_v_matches_listing = lv.points == listing(&ERRATUM_LINE_V);
    let line_w_matches_listing = lw.points == listing(&ERRATUM_LINE_W);
    let intersection_matches_listing = inter == listing(&ERRATUM_INTERSECTION);
    let lines_differ = lv.points != lw.points;
    let pass = line_v_matches_listing
        && line_w_matches_listing
        && intersection_matches_listing
        && inter.len() == 3
        && lines_differ;
    let rows = |pts: &[Point]| pts.iter().map(|p| p.reprs()).collect::<Vec<_>>();
    ErratumReport {
        structure: s.literal(),
        v: v.reprs(),
        alpha: 2,
        w: w.reprs(),
        beta: 4,
        line_v: rows(&lv.points),
        line_w: rows(&lw.points),
        intersection: rows(&inter),
        line_v_matches_listing,
        line_w_matches_listing,
        intersection_matches_listing,
        intersection_size: inter.len(),
        lines_differ,
        pass,
    }
}

/// Largest intersection of two distinct lines `L_a(v) != L_b(w)` over all
/// `v, w != 0` and all `a, b`. At most 1 over a field.
pub fn max_distinct_line_intersection(s: &Structure) -> Result<usize> {
    let q = s.q() as usize;
    if q * q > 1 << 16 {
        return Err(Error::Precondition("plane too large for exhaustive line comparison".into()));
    }
    let words = (q * q).div_ceil(64);
    let mut lines: Vec<Vec<u64>> = Vec::new();
    for v0 in s.elements() {
        for v1 in s.elements() {
            if v0.0 == 0 && v1.0 == 0 {
                continue;
            }
            let v = Point(vec![v0, v1]);
            for alpha in s.elements() {
                let line = line_points(s, &v, alpha)?;
                let mut bits = vec![0u64; words];
                for y in &line.points {
                    let idx = y[0].0 as usize * q + y[1].0 as usize;
                    bits[idx / 64] |= 1 << (idx % 64);
                }
                lines.push(bits);
            }
        }
    }
    lines.sort_unstable();
    lines.dedup();
    let mut best = 0;
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            let shared: u32 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum();
            best = best.max(shared as usize);
        }
    }
    Ok(best)
}
