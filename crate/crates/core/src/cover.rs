//! Combinatorial model of the superpotential fiber as a branched cover of
//! the punctured plane, and of the vanishing cycles as sheet-labeled double
//! lifts of arcs between branch points.
//!
//! All geometry is integer bookkeeping: the base plane is `n = a+b+c`
//! angular sectors at two radial levels, sheets are labeled by `Z/(b+c)`,
//! the monodromy of a full counterclockwise turn around the origin is
//! `q -> q - a`, and the monodromy around branch point `m` (approached by
//! rotating counterclockwise from the base ray and moving radially outward)
//! is the transposition `(m, m+b)`.  Branch point `m` is the common endpoint
//! of the arcs `delta_m` and `delta_{m+a}`; the lift of `delta_j` runs on
//! the two sheets `{j, j+b}`.  Crossing data then reproduces the intersection
//! table of the vanishing cycles exactly: endpoint intersections at index
//! offsets `a` and `b+c`, interior ones at offsets `b`, `c`, `a+c`, `a+b`.
//!
//! Winding bookkeeping: carrying a sheet label across one full turn shifts
//! it by `+a`, which is what makes the transposition at branch `m + n`
//! agree with the conjugate of the one at branch `m` by the origin
//! monodromy; `build_cover` verifies that compatibility.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::gcd_all;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("weights must be positive with gcd 1, got {0:?}")]
    BadWeights(Vec<u32>),
    #[error("branch consistency fails at index {0}")]
    Inconsistent(usize),
    #[error("malformed path: radial move at angular position {position} does not match gate {gate}")]
    MalformedPath { position: i64, gate: usize },
    #[error("malformed path: radial move while already at that level")]
    LevelMismatch,
    #[error("malformed path: rotation or gate change while on the outer level")]
    OuterMove,
}

/// Branched covering datum for plane weights `(a, b, c)`, normalized so that
/// `a >= b >= c`; the original order is retained for reports.
#[derive(Clone, Debug, Serialize)]
pub struct BranchedCover {
    pub original_weights: [u32; 3],
    /// Normalized weights, descending.
    pub a: u32,
    pub b: u32,
    pub c: u32,
    /// Number of branch points and vanishing cycles.
    pub n: u32,
    /// Degree of the covering.
    pub sheets: u32,
}

/// One move of an arc path in the two-level sector model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PathMove {
    /// Rotate by one sector, `+1` counterclockwise.
    Rotate(i8),
    /// Move from the inner to the outer level through the gate next to
    /// branch point `m`; the angular position must match `m` modulo `n`.
    RadialOut(usize),
    /// Move back from the outer to the inner level at gate `m`.
    RadialIn(usize),
}

/// Word of elementary moves starting on the inner level at angular
/// position 0.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ArcPath {
    pub moves: Vec<PathMove>,
}

impl ArcPath {
    pub fn full_turns(count: i64, n: u32) -> Self {
        let step = if count >= 0 { 1i8 } else { -1 };
        ArcPath {
            moves: std::iter::repeat_n(PathMove::Rotate(step), (count.unsigned_abs() as usize) * n as usize)
                .collect(),
        }
    }

    /// Rotate counterclockwise to gate `m`, pass around the branch point and
    /// return: the loop realizing the branch monodromy.
    pub fn around_branch(m: usize) -> Self {
        let mut moves = vec![PathMove::Rotate(1); m];
        moves.push(PathMove::RadialOut(m));
        moves.push(PathMove::RadialIn(m));
        moves.extend(vec![PathMove::Rotate(-1); m]);
        ArcPath { moves }
    }
}

/// The two strands of a lifted vanishing cycle.
#[derive(Clone, Debug, Serialize)]
pub struct LiftedCycle {
    pub index: u32,
    /// Sheet labels carried by the two strands along the arc, in the local
    /// chart of the arc.
    pub strands: [u32; 2],
    /// Branch indices of the two endpoints: `j` and `j + b + c (mod n)`.
    pub endpoints: [u32; 2],
    /// Strand labels at each endpoint in that endpoint's canonical chart;
    /// the far endpoint picks up the winding shift by `-a` when the arc
    /// wraps past the base ray.
    pub endpoint_sheets: [[u32; 2]; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeneratorType {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IntersectionKind {
    Endpoint,
    Interior,
}

/// One intersection point of the cycles `L_i` and `L_j` with its canonical
/// generator name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionPoint {
    pub i: u32,
    pub j: u32,
    pub kind: IntersectionKind,
    pub gen_type: GeneratorType,
    pub barred: bool,
    /// Subscript of the canonical name, e.g. `x_3` has `index = 3`.
    pub index: u32,
    /// Common sheet label, or the lower label of the merged pair at a
    /// branch point.
    pub sheet: u32,
}

impl IntersectionPoint {
    pub fn name(&self) -> String {
        let letter = match self.gen_type {
            GeneratorType::X => "x",
            GeneratorType::Y => "y",
            GeneratorType::Z => "z",
        };
        if self.barred {
            format!("{letter}bar{}", self.index)
        } else {
            format!("{letter}{}", self.index)
        }
    }
}

impl BranchedCover {
    fn modn(&self, v: i64) -> u32 {
        v.rem_euclid(self.n as i64) as u32
    }

    fn mods(&self, v: i64) -> u32 {
        v.rem_euclid(self.sheets as i64) as u32
    }

    /// Monodromy of one full counterclockwise turn around the origin.
    pub fn origin_monodromy(&self, sheet: u32) -> u32 {
        self.mods(sheet as i64 - self.a as i64)
    }

    /// Transposition attached to branch point `m`, as the pair it swaps.
    pub fn branch_transposition(&self, m: i64) -> (u32, u32) {
        (self.mods(m), self.mods(m + self.b as i64))
    }

    fn apply_transposition(&self, pair: (u32, u32), sheet: u32) -> u32 {
        if sheet == pair.0 {
            pair.1
        } else if sheet == pair.1 {
            pair.0
        } else {
            sheet
        }
    }

    /// Transport a sheet label along a path based at the inner level,
    /// angular position 0.  Rotations (inner level only) keep the running
    /// label; passing out and back through the same gate `m` winds around
    /// the branch point and applies its transposition in the chart of the
    /// current winding; the result is expressed in the canonical
    /// (zero-winding) chart of the final position.
    pub fn transport(&self, path: &ArcPath, start_sheet: u32) -> Result<u32, CoverError> {
        let mut position: i64 = 0;
        let mut outer = false;
        let mut sheet = start_sheet % self.sheets;
        for mv in &path.moves {
            match mv {
                PathMove::Rotate(d) => {
                    if outer {
                        return Err(CoverError::OuterMove);
                    }
                    position += *d as i64;
                }
                PathMove::RadialOut(m) => {
                    if outer {
                        return Err(CoverError::LevelMismatch);
                    }
                    if self.modn(position) != self.modn(*m as i64) {
                        return Err(CoverError::MalformedPath {
                            position,
                            gate: *m,
                        });
                    }
                    outer = true;
                }
                PathMove::RadialIn(m) => {
                    if !outer {
                        return Err(CoverError::LevelMismatch);
                    }
                    if self.modn(position) != self.modn(*m as i64) {
                        return Err(CoverError::MalformedPath {
                            position,
                            gate: *m,
                        });
                    }
                    outer = false;
                    // Out and back through one gate: the strand passes
                    // around the branch point.  In the chart of the current
                    // winding the transposition pair is shifted by
                    // `winding * a`.
                    let winding = (position - self.modn(position) as i64) / self.n as i64;
                    let pair = self.branch_transposition(
                        self.modn(position) as i64 + winding * self.a as i64,
                    );
                    sheet = self.apply_transposition(pair, sheet);
                }
            }
        }
        // Express the final label in the canonical chart of the endpoint.
        let winding = (position - self.modn(position) as i64) / self.n as i64;
        Ok(self.mods(sheet as i64 - winding * self.a as i64))
    }

    /// Lift of the arc `delta_j` with its strand labels and endpoints.
    pub fn lift_cycle(&self, j: u32) -> LiftedCycle {
        let pair = self.branch_transposition(j as i64);
        let far = j + self.b + self.c;
        let wrap = (far / self.n) as i64;
        let far_sheets = [
            self.mods(pair.0 as i64 - wrap * self.a as i64),
            self.mods(pair.1 as i64 - wrap * self.a as i64),
        ];
        LiftedCycle {
            index: j,
            strands: [pair.0, pair.1],
            endpoints: [j % self.n, far % self.n],
            endpoint_sheets: [[pair.0, pair.1], far_sheets],
        }
    }

    /// Intersection points of `L_i` and `L_j` for `i < j`, with canonical
    /// names.  Offsets `a` and `b+c` give endpoint intersections; offsets
    /// `b`, `c` (short interior crossing) and `a+c`, `a+b` (long crossing)
    /// give interior ones, detected by the meeting of the strand sheet
    /// pairs.
    pub fn intersections(&self, i: u32, j: u32) -> Vec<IntersectionPoint> {
        assert!(i < j && j < self.n);
        let (a, b, c) = (self.a, self.b, self.c);
        let d = j - i;
        let mut out = Vec::new();
        if d == a {
            out.push(IntersectionPoint {
                i,
                j,
                kind: IntersectionKind::Endpoint,
                gen_type: GeneratorType::X,
                barred: false,
                index: i,
                sheet: self.mods(i as i64),
            });
        }
        if d == b + c {
            out.push(IntersectionPoint {
                i,
                j,
                kind: IntersectionKind::Endpoint,
                gen_type: GeneratorType::X,
                barred: true,
                index: i,
                sheet: self.mods(i as i64),
            });
        }
        // Short crossing: the sheet pairs are {i, i+b} and {j, j+b} in a
        // common chart; each common sheet is one intersection point.  The
        // sheet i+b = j is the y-type meeting (offset b), the sheet i = j+b
        // the z-type meeting (offset c); both occur when b = c.
        if d < b + c {
            let li = self.lift_cycle(i);
            let lj = self.lift_cycle(j);
            for &s in &li.strands {
                if !lj.strands.contains(&s) {
                    continue;
                }
                if s == self.mods(i as i64 + b as i64) && s == self.mods(j as i64) {
                    debug_assert_eq!(d, b);
                    out.push(IntersectionPoint {
                        i,
                        j,
                        kind: IntersectionKind::Interior,
                        gen_type: GeneratorType::Y,
                        barred: false,
                        index: i,
                        sheet: s,
                    });
                }
                if s == self.mods(i as i64) && s == self.mods(j as i64 + b as i64) {
                    debug_assert_eq!(d, c);
                    out.push(IntersectionPoint {
                        i,
                        j,
                        kind: IntersectionKind::Interior,
                        gen_type: GeneratorType::Z,
                        barred: false,
                        index: i,
                        sheet: s,
                    });
                }
            }
        }
        // Long crossing: the far strand pair is carried across one winding,
        // shifting by -a to {j-a, j-a+b}.  The sheet i+b = j-a is the
        // barred-z meeting (offset a+b), the sheet i = j-a+b the barred-y
        // meeting (offset a+c).
        if d > a {
            let li = self.lift_cycle(i);
            let far: [u32; 2] = [
                self.mods(j as i64 - a as i64),
                self.mods(j as i64 - a as i64 + b as i64),
            ];
            for &s in &li.strands {
                if !far.contains(&s) {
                    continue;
                }
                if s == self.mods(i as i64 + b as i64) && s == far[0] {
                    debug_assert_eq!(d, a + b);
                    out.push(IntersectionPoint {
                        i,
                        j,
                        kind: IntersectionKind::Interior,
                        gen_type: GeneratorType::Z,
                        barred: true,
                        index: i,
                        sheet: s,
                    });
                }
                if s == self.mods(i as i64) && s == far[1] {
                    debug_assert_eq!(d, a + c);
                    out.push(IntersectionPoint {
                        i,
                        j,
                        kind: IntersectionKind::Interior,
                        gen_type: GeneratorType::Y,
                        barred: true,
                        index: i,
                        sheet: s,
                    });
                }
            }
        }
        out
    }

    /// The full intersection table over all ordered pairs.
    pub fn intersection_table(&self) -> IntersectionTable {
        let mut points = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                points.extend(self.intersections(i, j));
            }
        }
        let count = |t: GeneratorType, barred: bool| {
            points
                .iter()
                .filter(|p| p.gen_type == t && p.barred == barred)
                .count() as u32
        };
        IntersectionTable {
            totals: TypeTotals {
                x: count(GeneratorType::X, false),
                xbar: count(GeneratorType::X, true),
                y: count(GeneratorType::Y, false),
                ybar: count(GeneratorType::Y, true),
                z: count(GeneratorType::Z, false),
                zbar: count(GeneratorType::Z, true),
            },
            total_rank: points.len() as u32,
            points,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeTotals {
    pub x: u32,
    pub xbar: u32,
    pub y: u32,
    pub ybar: u32,
    pub z: u32,
    pub zbar: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionTable {
    pub points: Vec<IntersectionPoint>,
    pub totals: TypeTotals,
    pub total_rank: u32,
}

/// Render the arcs between branch points as a static diagram: branch
/// points on a circle, each arc dipping toward the origin.
pub fn arc_diagram_svg(cover: &BranchedCover) -> String {
    let size = 420.0;
    let center = size / 2.0;
    let radius = size * 0.4;
    let n = cover.n;
    let angle = |m: f64| -2.0 * std::f64::consts::PI * m / n as f64;
    let point = |m: f64, r: f64| {
        let a = angle(m);
        (center + r * a.cos(), center - r * a.sin())
    };
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    svg.push_str(&format!(
        "  <circle cx=\"{center}\" cy=\"{center}\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    for j in 0..n {
        let from = point(j as f64, radius);
        let to = point((j + cover.b + cover.c) as f64, radius);
        // Control point toward the origin at the midpoint angle.
        let mid = point(j as f64 + (cover.b + cover.c) as f64 / 2.0, radius * 0.25);
        svg.push_str(&format!(
            "  <path d=\"M {:.2} {:.2} Q {:.2} {:.2} {:.2} {:.2}\" fill=\"none\" stroke=\"hsl({},70%,45%)\"/>\n",
            from.0,
            from.1,
            mid.0,
            mid.1,
            to.0,
            to.1,
            (j * 360 / n) as i32,
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">d{}</text>\n",
            point(j as f64 + (cover.b + cover.c) as f64 / 2.0, radius * 0.55).0,
            point(j as f64 + (cover.b + cover.c) as f64 / 2.0, radius * 0.55).1,
            j,
        ));
    }
    for m in 0..n {
        let p = point(m as f64, radius);
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"black\"/>\n  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>\n",
            p.0,
            p.1,
            point(m as f64, radius * 1.08).0,
            point(m as f64, radius * 1.08).1,
            m,
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Build the covering datum for the given plane weights; weights are
/// normalized descending and validated, and the winding compatibility of
/// the branch transpositions with the origin monodromy is checked.
pub fn build_cover(weights: [u32; 3]) -> Result<BranchedCover, CoverError> {
    if weights.contains(&0) || gcd_all(&weights) != 1 {
        return Err(CoverError::BadWeights(weights.to_vec()));
    }
    let mut sorted = weights;
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    let [a, b, c] = sorted;
    let cover = BranchedCover {
        original_weights: weights,
        a,
        b,
        c,
        n: a + b + c,
        sheets: b + c,
    };
    // Approaching branch m with one extra full turn must give the conjugate
    // of its transposition by the origin monodromy.
    for m in 0..cover.n as i64 {
        let shifted = cover.branch_transposition(m + cover.n as i64);
        let base = cover.branch_transposition(m);
        let conj = (
            cover.mods(base.0 as i64 + cover.a as i64),
            cover.mods(base.1 as i64 + cover.a as i64),
        );
        let same = shifted == conj || (shifted.0 == conj.1 && shifted.1 == conj.0);
        if !same {
            return Err(CoverError::Inconsistent(m as usize));
        }
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coprime_triples(max_sum: u32) -> Vec<[u32; 3]> {
        let mut out = Vec::new();
        for a in 1..max_sum {
            for b in 1..=a {
                for c in 1..=b {
                    if a + b + c <= max_sum && gcd_all(&[a, b, c]) == 1 {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn build_and_consistency() {
        let cover = build_cover([1, 1, 1]).unwrap();
        assert_eq!(cover.sheets, 2);
        assert_eq!(cover.branch_transposition(0), (0, 1));
        let cover = build_cover([4, 2, 1]).unwrap();
        assert_eq!(cover.sheets, 3);
        assert_eq!(cover.origin_monodromy(0), 2);
        for w in coprime_triples(12) {
            build_cover(w).unwrap();
        }
        assert!(build_cover([2, 2, 2]).is_err());
    }

    #[test]
    fn transport_rules() {
        let cover = build_cover([4, 2, 1]).unwrap();
        // Full turn: q -> q - a.
        for q in 0..3 {
            let path = ArcPath::full_turns(1, cover.n);
            assert_eq!(
                cover.transport(&path, q).unwrap(),
                cover.origin_monodromy(q)
            );
        }
        // Empty path: identity.
        assert_eq!(cover.transport(&ArcPath::default(), 1).unwrap(), 1);
        // Out-and-back around branch m: the transposition (m, m+b).
        for m in 0..cover.n as usize {
            let path = ArcPath::around_branch(m);
            let pair = cover.branch_transposition(m as i64);
            assert_eq!(cover.transport(&path, pair.0).unwrap(), pair.1);
            assert_eq!(cover.transport(&path, pair.1).unwrap(), pair.0);
        }
        // Malformed: radial move at the wrong gate, rotation while outer.
        let bad = ArcPath {
            moves: vec![PathMove::Rotate(1), PathMove::RadialOut(0)],
        };
        assert!(cover.transport(&bad, 0).is_err());
        let outer_rotate = ArcPath {
            moves: vec![PathMove::RadialOut(0), PathMove::Rotate(1)],
        };
        assert!(matches!(
            cover.transport(&outer_rotate, 0),
            Err(CoverError::OuterMove)
        ));
        // Winding: a full turn followed by the branch-m loop equals the
        // conjugate of the transposition by the origin monodromy.
        for m in 0..cover.n as usize {
            let mut moves = vec![PathMove::Rotate(1); cover.n as usize];
            moves.extend(ArcPath::around_branch(m).moves);
            moves.extend(vec![PathMove::Rotate(-1); cover.n as usize]);
            let wound = ArcPath { moves };
            for q in 0..cover.sheets {
                let direct = {
                    let before = cover.origin_monodromy(q);
                    let pair = cover.branch_transposition(m as i64);
                    let swapped = cover.apply_transposition(pair, before);
                    cover.mods(swapped as i64 + cover.a as i64)
                };
                assert_eq!(
                    cover.transport(&wound, q).unwrap(),
                    direct,
                    "branch {m}, sheet {q}"
                );
            }
        }
    }

    #[test]
    fn lifted_cycles_match_transpositions() {
        for w in coprime_triples(12) {
            let cover = build_cover(w).unwrap();
            for j in 0..cover.n {
                let lift = cover.lift_cycle(j);
                // Strand labels at both endpoints form the branch pair, in
                // the canonical chart of each endpoint.
                for (&m, sheets) in lift.endpoints.iter().zip(&lift.endpoint_sheets) {
                    let pair = cover.branch_transposition(m as i64);
                    let mut strands = *sheets;
                    strands.sort_unstable();
                    let mut expect = [pair.0, pair.1];
                    expect.sort_unstable();
                    assert_eq!(strands, expect, "weights {w:?}, cycle {j}");
                }
            }
            // Every branch point bounds exactly the two arcs delta_m and
            // delta_{m+a}.
            for m in 0..cover.n {
                let incident: Vec<u32> = (0..cover.n)
                    .filter(|&j| cover.lift_cycle(j).endpoints.contains(&m))
                    .collect();
                let mut expect = vec![m, (m + cover.a) % cover.n];
                expect.sort_unstable();
                let mut got = incident;
                got.sort_unstable();
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn plane_intersection_counts() {
        // Full projective plane: three generators in every pair.
        let cover = build_cover([1, 1, 1]).unwrap();
        assert_eq!(cover.intersections(0, 1).len(), 3);
        assert_eq!(cover.intersection_table().total_rank, 9);
        // Offset equal to a gives the unbarred endpoint generators.
        let cover = build_cover([4, 2, 1]).unwrap();
        let pts = cover.intersections(0, 4);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].name(), "x0");
        assert_eq!(pts[0].kind, IntersectionKind::Endpoint);
        assert_eq!(cover.intersection_table().total_rank, 21);
        // Offsets outside {a, b, c, a+b, a+c, b+c} are empty: for (5, 3, 1)
        // that excludes offsets 2 and 7.
        let cover = build_cover([5, 3, 1]).unwrap();
        for d in 1..cover.n {
            let expect_empty = ![5u32, 3, 1, 8, 6, 4].contains(&d);
            assert_eq!(
                cover.intersections(0, d).is_empty(),
                expect_empty,
                "offset {d}"
            );
        }
    }

    #[test]
    fn totals_match_the_closed_form() {
        for w in coprime_triples(12) {
            let cover = build_cover(w).unwrap();
            let table = cover.intersection_table();
            let (a, b, c) = (cover.a, cover.b, cover.c);
            assert_eq!(table.total_rank, 3 * (a + b + c), "weights {w:?}");
            assert_eq!(
                table.totals,
                TypeTotals {
                    x: b + c,
                    xbar: a,
                    y: a + c,
                    ybar: b,
                    z: a + b,
                    zbar: c,
                },
                "weights {w:?}"
            );
        }
    }
}
