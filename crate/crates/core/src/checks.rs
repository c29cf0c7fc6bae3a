//! The acceptance battery: one runner per numbered criterion, each
//! reporting pass/fail with details and its elapsed time.  The integration
//! test suite asserts these runners; the command-line front end exposes
//! them through `report-all --criterion N`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::{gcd_all, DeformationMatrix, GradedSkewAlgebra};
use crate::bside::{exceptional_category, koszul_dual_category, CollectionSpec};
use crate::cover::{build_cover, GeneratorType};
use crate::dgcat::{quadratic_dual, DirectedCategory, GenRef};
use crate::fukaya::{
    blowup_table, grading_assign, hms_verify, line_category, line_matches_dual, plane_category,
    polygon_enumerate, product_category, subset_count, AreaWeights, TriangleFamily,
};
use crate::koszul::{cohomology_dim, koszul_build};
use crate::mutation::{
    corner_vanishing_check, dual_collection, hom_profile, mutate_collection_left,
    mutate_collection_right, ProjComplex, RationalAlgebra,
};
use crate::numlab::{
    hirzebruch_degeneration, hirzebruch_isotopy, hirzebruch_limits, line_vanishing_pair,
    track_monodromy, LoopSpec, TrackConfig,
};
use crate::rng::SplitMix64;
use crate::scalar::UnitScalar;

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub details: Vec<String>,
    /// Wall time; not serialized, so written reports stay byte-for-byte
    /// reproducible.
    #[serde(skip)]
    pub elapsed_ms: u128,
    pub budget_ms: Option<u128>,
}

impl CheckReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} {:<28} {}{}",
            self.id,
            self.name,
            if self.pass { "pass" } else { "FAIL" },
            if self.details.is_empty() {
                String::new()
            } else {
                format!("  [{}]", self.details.join("; "))
            }
        )
    }
}

struct Runner {
    pass: bool,
    details: Vec<String>,
}

impl Runner {
    fn new() -> Self {
        Runner {
            pass: true,
            details: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, context: impl FnOnce() -> String) {
        if !ok {
            self.pass = false;
            self.details.push(context());
        }
    }

    fn finish(self, id: u32, name: &str, started: Instant, budget_ms: Option<u128>) -> CheckReport {
        let elapsed = started.elapsed().as_millis();
        let mut pass = self.pass;
        let mut details = self.details;
        if let Some(budget) = budget_ms {
            if elapsed > budget {
                pass = false;
                details.push(format!("elapsed {elapsed} ms over budget {budget} ms"));
            }
        }
        details.truncate(8);
        CheckReport {
            id,
            name: name.to_string(),
            pass,
            details,
            elapsed_ms: elapsed,
            budget_ms,
        }
    }
}

/// Normalized coprime weight triples with bounded sum.
pub fn coprime_triples(max_sum: u32) -> Vec<[u32; 3]> {
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

pub fn coprime_pairs(max_sum: u32) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for a in 1..max_sum {
        for b in 1..=a {
            if a + b <= max_sum && gcd_all(&[a, b]) == 1 {
                out.push([a, b]);
            }
        }
    }
    out
}

fn theta_formal(size: usize) -> DeformationMatrix {
    let mut t = DeformationMatrix::identity(size);
    for i in 0..size {
        for j in 0..size {
            if i != j {
                t.set(i, j, UnitScalar::param(&format!("t{i}{j}")));
            }
        }
    }
    t
}

fn random_rational_theta(rng: &mut SplitMix64, size: usize) -> DeformationMatrix {
    let mut t = DeformationMatrix::identity(size);
    for i in 0..size {
        for j in 0..size {
            if i != j {
                t.set(
                    i,
                    j,
                    UnitScalar::from_ratio(rng.nonzero(20), rng.range_i64(1, 20)),
                );
            }
        }
    }
    t
}

/// Criterion 1: graded dimensions equal an independent partition-counting
/// oracle for every coprime triple with sum at most 12 and degrees up to 30.
pub fn criterion_01() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for w in coprime_triples(12) {
        let alg =
            GradedSkewAlgebra::polynomial(w.to_vec(), theta_formal(3)).expect("valid weights");
        // Oracle: generating-function convolution for the number of
        // weighted-degree-k exponent vectors.
        let kmax = 30usize;
        let mut counts = vec![0u64; kmax + 1];
        counts[0] = 1;
        for &a in &w {
            let mut next = vec![0u64; kmax + 1];
            for k in 0..=kmax {
                let mut e = 0usize;
                while e * a as usize <= k {
                    next[k] += counts[k - e * a as usize];
                    e += 1;
                }
            }
            counts = next;
        }
        for k in 0..=kmax {
            r.require(alg.graded_dim(k as i64) == counts[k] as usize, || {
                format!("weights {w:?} degree {k}")
            });
        }
    }
    r.finish(1, "hilbert dimensions", started, Some(5_000))
}

/// Criterion 2: the Koszul complex squares to zero symbolically and
/// resolves the ground field through internal degree 10.
pub fn criterion_02() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for w in [[1u32, 1, 1], [1, 1, 2], [1, 2, 3], [2, 3, 5]] {
        let alg = GradedSkewAlgebra::polynomial(w.to_vec(), theta_formal(3)).expect("weights");
        match koszul_build(&alg) {
            Ok(complex) => {
                r.require(complex.check_contraction_compatible().is_ok(), || {
                    format!("contraction incompatible for {w:?}")
                });
                let report = complex.homology_check(10);
                r.require(report.pass, || {
                    format!("homology failure {:?} for {w:?}", report.failures.first())
                });
            }
            Err(e) => r.require(false, || format!("build failed for {w:?}: {e}")),
        }
    }
    r.finish(2, "koszul resolution", started, Some(30_000))
}

/// Criterion 3: the cohomology table equals the two-row closed form and
/// satisfies the duality symmetry, for p up to n and twists |k| <= 2l.
pub fn criterion_03() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for w in [[1u32, 1, 1], [1, 1, 2], [1, 2, 3], [2, 3, 5]] {
        let alg = GradedSkewAlgebra::polynomial(w.to_vec(), theta_formal(3)).expect("weights");
        let n = 2usize;
        let l = alg.gorenstein_parameter() as i64;
        for k in (-2 * l)..=(2 * l) {
            for p in 0..=n {
                let computed = cohomology_dim(&alg, p, k);
                let expected = if p == 0 && k >= 0 {
                    alg.graded_dim(k)
                } else if p == n && k <= -l {
                    alg.graded_dim(-k - l)
                } else {
                    0
                };
                r.require(computed == expected, || format!("{w:?} p={p} k={k}"));
            }
            // Duality symmetry between the two nonzero rows.
            r.require(
                cohomology_dim(&alg, 0, k) == cohomology_dim(&alg, n, -k - l),
                || format!("duality at {w:?} k={k}"),
            );
        }
    }
    r.finish(3, "cohomology table", started, None)
}

/// Criterion 4: intersection tables have total rank 3(a+b+c) with exactly
/// the canonical generator ranges.
pub fn criterion_04() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for w in coprime_triples(12) {
        let cover = build_cover(w).expect("coprime");
        let table = cover.intersection_table();
        let (a, b, c) = (cover.a, cover.b, cover.c);
        r.require(table.total_rank == 3 * (a + b + c), || {
            format!("total rank {} for {w:?}", table.total_rank)
        });
        let mut expected: Vec<String> = Vec::new();
        let ranges: [(GeneratorType, bool, u32); 6] = [
            (GeneratorType::X, false, b + c),
            (GeneratorType::X, true, a),
            (GeneratorType::Y, false, a + c),
            (GeneratorType::Y, true, b),
            (GeneratorType::Z, false, a + b),
            (GeneratorType::Z, true, c),
        ];
        for (t, barred, count) in ranges {
            for i in 0..count {
                let letter = match t {
                    GeneratorType::X => "x",
                    GeneratorType::Y => "y",
                    GeneratorType::Z => "z",
                };
                expected.push(if barred {
                    format!("{letter}bar{i}")
                } else {
                    format!("{letter}{i}")
                });
            }
        }
        expected.sort();
        let mut got: Vec<String> = table.points.iter().map(|p| p.name()).collect();
        got.sort();
        r.require(got == expected, || format!("generator ranges for {w:?}"));
    }
    r.finish(4, "intersection ranks", started, None)
}

/// Criterion 5: unbarred generators have degree 1 and barred degree 2 on
/// the planes; every line generator has degree 1.
pub fn criterion_05() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for w in coprime_triples(12) {
        let cover = build_cover(w).expect("coprime");
        match grading_assign(&cover) {
            Ok(degrees) => {
                for (name, d) in degrees {
                    let expected = if name.contains("bar") { 2 } else { 1 };
                    r.require(d == expected, || format!("{w:?} {name} degree {d}"));
                }
            }
            Err(e) => r.require(false, || format!("{w:?}: {e}")),
        }
    }
    for [a, b] in coprime_pairs(12) {
        let cat = line_category(a, b).expect("coprime");
        for g in cat.gen_refs() {
            r.require(cat.generator(g).degree == 1, || {
                format!("line ({a},{b}) generator degree")
            });
        }
    }
    r.finish(5, "gradings", started, None)
}

/// Criterion 6: exactly 2(a+b+c) triangles and no admissible ascending
/// walks with 4..=8 corners.
pub fn criterion_06() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for w in coprime_triples(12) {
        let cover = build_cover(w).expect("coprime");
        match polygon_enumerate(&cover, 8) {
            Ok(report) => {
                r.require(report.triangles.len() == 2 * cover.n as usize, || {
                    format!("{w:?}: {} triangles", report.triangles.len())
                });
                r.require(report.higher_products_vanish, || {
                    format!("{w:?}: ascending higher walk found")
                });
                let plain = report
                    .triangles
                    .iter()
                    .filter(|t| t.family == TriangleFamily::Plain)
                    .count();
                r.require(plain == cover.n as usize, || {
                    format!("{w:?}: {} plain triangles", plain)
                });
            }
            Err(e) => r.require(false, || format!("{w:?}: {e}")),
        }
    }
    r.finish(6, "disc enumeration", started, None)
}

/// Criterion 7: symmetric weights give the exact anticommutation table and
/// the sign-only invariant.
pub fn criterion_07() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for w in coprime_triples(12) {
        let cover = build_cover(w).expect("coprime");
        let plane = match plane_category(&cover, &AreaWeights::symmetric(cover.n as usize)) {
            Ok(p) => p,
            Err(e) => {
                r.require(false, || format!("{w:?}: {e}"));
                continue;
            }
        };
        let expected = if cover.n.is_multiple_of(2) {
            UnitScalar::one()
        } else {
            UnitScalar::minus_one()
        };
        r.require(plane.invariant == expected, || {
            format!("{w:?}: invariant {}", plane.invariant)
        });
        // Every plain coefficient is +1 and every primed one -1, which is
        // exactly the anticommutation table.
        for t in &plane.triangles {
            let p = plane
                .category
                .find(
                    t.corners[0].i as usize,
                    t.corners[0].j as usize,
                    &t.corners[0].name(),
                )
                .expect("corner generator");
            let q = plane
                .category
                .find(
                    t.corners[1].i as usize,
                    t.corners[1].j as usize,
                    &t.corners[1].name(),
                )
                .expect("corner generator");
            let coeff = plane.category.m2(p, q).terms()[0].0.clone();
            let want = match t.family {
                TriangleFamily::Plain => UnitScalar::one(),
                TriangleFamily::Primed => UnitScalar::minus_one(),
            };
            r.require(coeff == want, || {
                format!("{w:?}: coefficient {coeff} on {:?}", t.family)
            });
        }
    }
    r.finish(7, "anticommutation signs", started, None)
}

/// Criterion 8: the mirror match passes with fully formal deformation
/// parameters on every triple, and a deliberately perturbed structure
/// constant fails with a lattice certificate.
pub fn criterion_08() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for w in coprime_triples(12) {
        let n = (w[0] + w[1] + w[2]) as usize;
        match hms_verify(w, &AreaWeights::formal(n), false) {
            Ok(report) => r.require(report.pass, || {
                format!("{w:?}: {:?}", report.obstruction.map(|o| o.coordinate))
            }),
            Err(e) => r.require(false, || format!("{w:?}: {e}")),
        }
    }
    match hms_verify([4, 2, 1], &AreaWeights::formal(7), true) {
        Ok(report) => {
            r.require(!report.pass, || "perturbed table matched".to_string());
            r.require(report.obstruction.is_some(), || {
                "no certificate on perturbed table".to_string()
            });
        }
        Err(e) => r.require(false, || format!("perturbed run: {e}")),
    }
    r.finish(8, "mirror match", started, Some(60_000))
}

/// Criterion 9: the line category matches the exterior side for 20 random
/// deformation matrices on every coprime pair.
pub fn criterion_09() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    let mut rng = SplitMix64::new(0x11ce);
    for [a, b] in coprime_pairs(12) {
        for _ in 0..20 {
            let theta = random_rational_theta(&mut rng, 2);
            match line_matches_dual(a, b, &theta) {
                Ok(ok) => r.require(ok, || format!("pair ({a},{b})")),
                Err(e) => r.require(false, || format!("pair ({a},{b}): {e}")),
            }
        }
    }
    r.finish(9, "line mirror match", started, None)
}

/// Criterion 10: numerical monodromy equals the combinatorial permutations
/// with residuals below 1e-9, and the line tracker finds the pair {0, b}.
pub fn criterion_10() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    let config = TrackConfig::default();
    for (a, b, c) in [(1u32, 1, 1), (4, 2, 1), (1, 2, 3)] {
        let m = (b + c) as usize;
        match track_monodromy(a, b, c, LoopSpec::Origin, &config) {
            Ok(result) => {
                for q in 0..m {
                    r.require(
                        result.permutation[q] == (q + m - (a as usize % m)) % m,
                        || format!("origin loop ({a},{b},{c})"),
                    );
                }
                r.require(result.max_residual < 1e-9, || {
                    format!("origin residual {:e}", result.max_residual)
                });
            }
            Err(e) => r.require(false, || format!("origin ({a},{b},{c}): {e}")),
        }
        for branch in 0..(a + b + c) {
            match track_monodromy(a, b, c, LoopSpec::Branch(branch), &config) {
                Ok(result) => {
                    let mut expected: Vec<usize> = (0..m).collect();
                    expected.swap(branch as usize % m, (branch + b) as usize % m);
                    r.require(result.permutation == expected, || {
                        format!("branch {branch} of ({a},{b},{c})")
                    });
                    r.require(result.max_residual < 1e-9, || {
                        format!("branch residual {:e}", result.max_residual)
                    });
                }
                Err(e) => r.require(false, || format!("branch {branch} ({a},{b},{c}): {e}")),
            }
        }
    }
    for (a, b) in [(4u32, 3u32), (1, 1), (2, 5), (3, 2), (5, 1)] {
        match line_vanishing_pair(a, b, &config) {
            Ok(pair) => r.require(pair == (0, b as usize), || {
                format!("line pair ({a},{b}) gave {pair:?}")
            }),
            Err(e) => r.require(false, || format!("line pair ({a},{b}): {e}")),
        }
    }
    r.finish(10, "numerical monodromy", started, Some(60_000))
}

/// Criterion 11: dual collections have the simple-module profiles, the
/// braid relation holds on three-term collections, and right mutation
/// inverts left mutation at the profile level.
pub fn criterion_11() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for weights in [vec![1u32, 1, 1], vec![1, 1, 2]] {
        let cat = exceptional_category(&CollectionSpec::full(
            weights.clone(),
            DeformationMatrix::identity(3),
        ))
        .expect("weights");
        let alg = RationalAlgebra::from_category(&cat, &BTreeMap::new()).expect("rational");
        let projectives: Vec<ProjComplex> = (0..alg.objects)
            .map(|i| ProjComplex::projective(alg.clone(), i).expect("label"))
            .collect();
        match dual_collection(&projectives) {
            Ok(dual) => {
                let l = alg.objects;
                for (k, obj) in dual.iter().enumerate() {
                    let i = l - 1 - k;
                    let profile = hom_profile(&obj.shift(i as i32)).expect("profile");
                    let expected: BTreeMap<(usize, i32), usize> = BTreeMap::from([((i, 0), 1)]);
                    r.require(profile == expected, || {
                        format!("{weights:?}: dual object {i} profile")
                    });
                }
            }
            Err(e) => r.require(false, || format!("{weights:?} dual: {e}")),
        }
        let triple = [
            projectives[0].clone(),
            projectives[1].clone(),
            projectives[2].clone(),
        ];
        let braid = (|| -> Result<bool, crate::mutation::MutationError> {
            let lhs = mutate_collection_left(
                &mutate_collection_left(&mutate_collection_left(&triple, 0)?, 1)?,
                0,
            )?;
            let rhs = mutate_collection_left(
                &mutate_collection_left(&mutate_collection_left(&triple, 1)?, 0)?,
                1,
            )?;
            for (x, y) in lhs.iter().zip(&rhs) {
                if hom_profile(x)? != hom_profile(y)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        r.require(matches!(braid, Ok(true)), || format!("{weights:?}: braid"));
        let round = (|| -> Result<bool, crate::mutation::MutationError> {
            let pair = [projectives[0].clone(), projectives[1].clone()];
            let back = mutate_collection_right(&mutate_collection_left(&pair, 0)?, 0)?;
            for (x, y) in pair.iter().zip(&back) {
                if hom_profile(x)? != hom_profile(y)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        r.require(matches!(round, Ok(true)), || {
            format!("{weights:?}: right-left round trip")
        });
    }
    r.finish(11, "mutations", started, None)
}

/// Criterion 12: corner vanishing for (n,k) in {(4,3),(5,3),(5,4)}; for
/// n=3 the four bounded limits at parameter 1e-8 land within 1e-6 of +-2
/// and the single escapee passes 1e3; annulus bounds hold on a 100-point
/// grid for n in 3..=8.
pub fn criterion_12() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    for (n, k) in [(4u32, 3u32), (5, 3), (5, 4)] {
        let cat = exceptional_category(&CollectionSpec::full(
            vec![1, 1, n],
            DeformationMatrix::identity(3),
        ))
        .expect("weights");
        let alg = RationalAlgebra::from_category(&cat, &BTreeMap::new()).expect("rational");
        match corner_vanishing_check(&alg, n, k) {
            Ok(report) => r.require(report.pass, || {
                format!("corner ({n},{k}): {:?}", report.checked)
            }),
            Err(e) => r.require(false, || format!("corner ({n},{k}): {e}")),
        }
    }
    let config = TrackConfig::default();
    match hirzebruch_limits(3, 1e-8, &config) {
        Ok(limits) => {
            r.require(limits.len() == 4, || format!("{} bounded limits", limits.len()));
            for w in &limits {
                let dev = (w - 2.0).norm().min((w + 2.0).norm());
                r.require(dev < 1e-6, || format!("limit deviates {dev:e}"));
            }
        }
        Err(e) => r.require(false, || format!("limits: {e}")),
    }
    match hirzebruch_degeneration(3, 1e-8, 1e-3, 1e3, &config) {
        Ok(report) => {
            r.require(report.escaped.len() == 1, || {
                format!("{} escapees", report.escaped.len())
            });
            r.require(report.bounded.len() == 4, || {
                format!("{} bounded", report.bounded.len())
            });
        }
        Err(e) => r.require(false, || format!("degeneration: {e}")),
    }
    for n in 3..=8 {
        match hirzebruch_isotopy(n, 100, &config) {
            Ok(ok) => r.require(ok, || format!("isotopy bounds n={n}")),
            Err(e) => r.require(false, || format!("isotopy n={n}: {e}")),
        }
    }
    r.finish(12, "hirzebruch family", started, None)
}

/// Criterion 13: the doubled-line product reproduces the dimension table
/// and relation pattern, and the blow-up table is associative with the
/// stated dimensions.
pub fn criterion_13() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    let line = line_category(1, 1).expect("line");
    match product_category(&line, &line) {
        Ok(prod) => {
            r.require(prod.hom_dim(1, 2) == 0, || "middle hom nonzero".to_string());
            r.require(prod.hom_dim(0, 3) == 4, || {
                format!("top hom dim {}", prod.hom_dim(0, 3))
            });
            r.require(prod.check_associativity().is_ok(), || {
                "product not associative".to_string()
            });
            // The four squares commute: composing through either
            // intermediate object agrees.
            for (first, second) in [("x0", "x0"), ("x0", "y0"), ("y0", "x0"), ("y0", "y0")] {
                let s = prod.find(0, 1, &format!("id(x){second}")).expect("gen");
                let up = prod.find(1, 3, &format!("{first}(x)id")).expect("gen");
                let u = prod.find(0, 2, &format!("{first}(x)id")).expect("gen");
                let sp = prod.find(2, 3, &format!("id(x){second}")).expect("gen");
                let via_top = prod.m2(s, up);
                let via_bottom = prod.m2(u, sp);
                r.require(!via_top.is_zero() && via_top.equals(&via_bottom), || {
                    format!("relation pattern at ({first},{second})")
                });
            }
        }
        Err(e) => r.require(false, || format!("product build: {e}")),
    }
    match blowup_table(&UnitScalar::param("alpha"), &UnitScalar::param("alphap")) {
        Ok(cat) => {
            r.require(cat.hom_dim(0, 3) == 1, || "blow-up dim(L0,L3)".to_string());
            r.require(cat.hom_dim(1, 3) == 2, || "blow-up dim(L1,L3)".to_string());
            r.require(cat.hom_dim(2, 3) == 1, || "blow-up dim(L2,L3)".to_string());
            r.require(cat.check_associativity().is_ok(), || {
                "blow-up table not associative".to_string()
            });
        }
        Err(e) => r.require(false, || format!("blow-up table: {e}")),
    }
    r.finish(13, "products and blow-up", started, None)
}

/// Criterion 14: the quadratic dual of the cyclic composition table equals
/// the three-relation span for ten random parameter specializations, with
/// the annihilator route as the oracle.
pub fn criterion_14() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    let mut rng = SplitMix64::new(0x5eed);
    let names = ["x", "y", "z"];
    for _ in 0..10 {
        let (pa, pb, pc) = (
            rng.nonzero(12),
            rng.nonzero(12),
            rng.nonzero(12),
        );
        let mut cat = DirectedCategory::new(vec!["l0".into(), "l1".into(), "l2".into()]);
        let v0: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(0, 1, n, 1).expect("gen"))
            .collect();
        let v1: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(1, 2, n, 1).expect("gen"))
            .collect();
        let wbar: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(0, 2, &format!("{n}bar"), 2).expect("gen"))
            .collect();
        let table: [(usize, usize, usize, i64); 9] = [
            (0, 1, 2, pa),
            (0, 2, 1, pb),
            (0, 0, 0, pc),
            (1, 2, 0, pa),
            (1, 0, 2, pb),
            (1, 1, 1, pc),
            (2, 0, 1, pa),
            (2, 1, 0, pb),
            (2, 2, 2, pc),
        ];
        for (p, q, t, v) in table {
            cat.set_m2_term(v0[p], v1[q], UnitScalar::from_integer(v), wbar[t])
                .expect("entry");
        }
        let rels = match quadratic_dual(&cat, &BTreeMap::new()) {
            Ok(rels) => rels,
            Err(e) => {
                r.require(false, || format!("dual failed for ({pa},{pb},{pc}): {e}"));
                continue;
            }
        };
        r.require(rels.len() == 3, || {
            format!("({pa},{pb},{pc}): {} relations", rels.len())
        });
        let rat = |v: i64| BigRational::from_integer(v.into());
        let mut expected = vec![vec![rat(0); 9]; 3];
        // f1 = c x⊗x + b y⊗z + a z⊗y and cyclic partners.
        let fill = [
            [(0usize, 0usize, pc), (1, 2, pb), (2, 1, pa)],
            [(0, 2, pa), (1, 1, pc), (2, 0, pb)],
            [(0, 1, pb), (1, 0, pa), (2, 2, pc)],
        ];
        for (row, triple) in fill.iter().enumerate() {
            for &(u, v, coeff) in triple {
                expected[row][u * 3 + v] = rat(coeff);
            }
        }
        r.require(crate::linalg::same_span(rels, expected), || {
            format!("span mismatch for ({pa},{pb},{pc})")
        });
    }
    // Koszul-duality sanity: the undeformed exterior-side table dualizes to
    // the commutator relations of the symmetric algebra.
    let dual = koszul_dual_category(&[1, 1, 1], &DeformationMatrix::identity(3)).expect("plane");
    let renamed = dual.category.rename_generators(|_, _, name| {
        match name {
            "y0" => "x",
            "y1" => "y",
            "y2" => "z",
            "y1*y2" => "xbar",
            "y0*y2" => "ybar",
            "y0*y1" => "zbar",
            other => other,
        }
        .to_string()
    });
    match quadratic_dual(&renamed, &BTreeMap::new()) {
        Ok(rels) => {
            let rat = |v: i64| BigRational::from_integer(v.into());
            let commutator = |u: usize, v: usize| {
                let mut row = vec![rat(0); 9];
                row[u * 3 + v] = rat(1);
                row[v * 3 + u] = rat(-1);
                row
            };
            let expected = vec![commutator(1, 2), commutator(0, 2), commutator(0, 1)];
            r.require(crate::linalg::same_span(rels, expected), || {
                "exterior dual is not the symmetric algebra".to_string()
            });
        }
        Err(e) => r.require(false, || format!("exterior dual: {e}")),
    }
    r.finish(14, "quadratic dual", started, None)
}

/// Criterion 15: subset counts match the stated four-weight values and
/// their dimension-two specialization reproduces the intersection totals.
pub fn criterion_15() -> CheckReport {
    let started = Instant::now();
    let mut r = Runner::new();
    r.require(subset_count(&[1, 1, 1, 1], 1) == 4, || {
        "count at offset 1".to_string()
    });
    r.require(subset_count(&[1, 1, 1, 1], 2) == 6, || {
        "count at offset 2".to_string()
    });
    for w in coprime_triples(12) {
        let cover = build_cover(w).expect("coprime");
        let n = cover.n;
        let total: usize = (1..n)
            .map(|d| (n - d) as usize * subset_count(&[cover.a, cover.b, cover.c], d))
            .sum();
        r.require(
            total as u32 == cover.intersection_table().total_rank,
            || format!("{w:?} totals"),
        );
    }
    r.finish(15, "subset counts", started, None)
}

/// All criteria in order.
pub fn run_criterion(id: u32) -> Option<CheckReport> {
    Some(match id {
        1 => criterion_01(),
        2 => criterion_02(),
        3 => criterion_03(),
        4 => criterion_04(),
        5 => criterion_05(),
        6 => criterion_06(),
        7 => criterion_07(),
        8 => criterion_08(),
        9 => criterion_09(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        13 => criterion_13(),
        14 => criterion_14(),
        15 => criterion_15(),
        _ => return None,
    })
}

pub const CRITERIA: std::ops::RangeInclusive<u32> = 1..=15;
