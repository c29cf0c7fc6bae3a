//! Finite directed categories with unit structure constants.
//!
//! Objects are linearly ordered; morphism spaces exist only from lower to
//! higher index (plus formal identities on the diagonal).  The composition
//! table `m2` maps a pair of composable generators to a formal combination
//! of generators of the target space.  Differentials and higher products
//! are recorded as certificates (`m1_zero`, `higher_mk_zero`) established by
//! whoever builds the category.
//!
//! Two categories with the same skeleton are compared up to a *gauge*: a
//! rescaling of every generator by a unit.  Matching gauges is an integer
//! linear problem on exponent vectors, solved prime by prime and parameter
//! by parameter through one Smith reduction, plus a GF(2) system for signs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::intlin::{smith_normal_form, IntMatrix};
use crate::linalg::{row_space_basis, RatMatrix};
use crate::scalar::{UnitCombination, UnitScalar};

/// A generator of `Hom(source, target)`, identified by position in the
/// generator list of that pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GenRef {
    pub source: usize,
    pub target: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
}

#[derive(Debug, Error)]
pub enum CategoryError {
    #[error("hom space from {from} to {to} violates directedness")]
    NotDirected { from: usize, to: usize },
    #[error("m2 entry ({p:?}, {q:?}) is not composable")]
    NotComposable { p: GenRef, q: GenRef },
    #[error("m2 entry ({p:?}, {q:?}) -> {r:?} violates degree additivity")]
    DegreeMismatch { p: GenRef, q: GenRef, r: GenRef },
    #[error("associativity fails on the triple ({p:?}, {q:?}, {r:?})")]
    NotAssociative { p: GenRef, q: GenRef, r: GenRef },
    #[error("gauge transform missing a scale for {0:?}")]
    MissingScale(GenRef),
    #[error("categories have different skeletons: {0}")]
    SkeletonMismatch(String),
    #[error("structure constant for ({p:?}, {q:?}) is not a single term")]
    NotSingleTerm { p: GenRef, q: GenRef },
    #[error("quadratic dual requires {0}")]
    QuadraticShape(String),
    #[error("m2 image does not span the target hom space (rank {rank} < dim {dim})")]
    QuadraticNotSurjective { rank: usize, dim: usize },
    #[error("structure constants contain formal parameters; supply an assignment")]
    UnassignedParameter,
}

/// Finite directed category with unit-coefficient composition table.
#[derive(Clone, Debug)]
pub struct DirectedCategory {
    pub objects: Vec<String>,
    /// Generators of `Hom(i, j)` for `i < j`.  Pairs with no entry have
    /// zero hom space.
    homs: BTreeMap<(usize, usize), Vec<Generator>>,
    /// Composition of two generators; missing key means zero.
    m2: BTreeMap<(GenRef, GenRef), UnitCombination<GenRef>>,
    pub m1_zero: bool,
    pub higher_mk_zero: bool,
}

#[derive(Serialize)]
struct GeneratorRepr<'a> {
    name: &'a str,
    source: usize,
    target: usize,
    degree: i32,
}

#[derive(Serialize)]
struct M2TermRepr<'a> {
    coefficient: &'a UnitScalar,
    r: GenRef,
}

#[derive(Serialize)]
struct M2Repr<'a> {
    p: GenRef,
    q: GenRef,
    terms: Vec<M2TermRepr<'a>>,
}

#[derive(Serialize)]
struct CategoryRepr<'a> {
    objects: &'a [String],
    generators: Vec<GeneratorRepr<'a>>,
    m2: Vec<M2Repr<'a>>,
    m1_zero: bool,
    higher_mk_zero: bool,
}

impl Serialize for DirectedCategory {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let generators = self
            .homs
            .iter()
            .flat_map(|(&(source, target), list)| {
                list.iter().map(move |g| GeneratorRepr {
                    name: &g.name,
                    source,
                    target,
                    degree: g.degree,
                })
            })
            .collect();
        let m2 = self
            .m2
            .iter()
            .map(|(&(p, q), value)| M2Repr {
                p,
                q,
                terms: value
                    .terms()
                    .iter()
                    .map(|(c, r)| M2TermRepr {
                        coefficient: c,
                        r: *r,
                    })
                    .collect(),
            })
            .collect();
        CategoryRepr {
            objects: &self.objects,
            generators,
            m2,
            m1_zero: self.m1_zero,
            higher_mk_zero: self.higher_mk_zero,
        }
        .serialize(serializer)
    }
}

impl DirectedCategory {
    pub fn new(objects: Vec<String>) -> Self {
        DirectedCategory {
            objects,
            homs: BTreeMap::new(),
            m2: BTreeMap::new(),
            m1_zero: true,
            higher_mk_zero: true,
        }
    }

    pub fn add_generator(
        &mut self,
        source: usize,
        target: usize,
        name: &str,
        degree: i32,
    ) -> Result<GenRef, CategoryError> {
        if source >= target || target >= self.objects.len() {
            return Err(CategoryError::NotDirected {
                from: source,
                to: target,
            });
        }
        let list = self.homs.entry((source, target)).or_default();
        list.push(Generator {
            name: name.to_string(),
            degree,
        });
        Ok(GenRef {
            source,
            target,
            index: list.len() - 1,
        })
    }

    pub fn generator(&self, g: GenRef) -> &Generator {
        &self.homs[&(g.source, g.target)][g.index]
    }

    pub fn hom(&self, source: usize, target: usize) -> &[Generator] {
        self.homs
            .get(&(source, target))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn hom_dim(&self, source: usize, target: usize) -> usize {
        self.hom(source, target).len()
    }

    pub fn gen_refs(&self) -> Vec<GenRef> {
        let mut out = Vec::new();
        for (&(s, t), list) in &self.homs {
            for index in 0..list.len() {
                out.push(GenRef {
                    source: s,
                    target: t,
                    index,
                });
            }
        }
        out
    }

    /// Find a generator by hom pair and name.
    pub fn find(&self, source: usize, target: usize, name: &str) -> Option<GenRef> {
        let list = self.homs.get(&(source, target))?;
        let index = list.iter().position(|g| g.name == name)?;
        Some(GenRef {
            source,
            target,
            index,
        })
    }

    pub fn set_m2(
        &mut self,
        p: GenRef,
        q: GenRef,
        value: UnitCombination<GenRef>,
    ) -> Result<(), CategoryError> {
        if p.target != q.source {
            return Err(CategoryError::NotComposable { p, q });
        }
        let expected = self.generator(p).degree + self.generator(q).degree;
        for (_, r) in value.terms() {
            if r.source != p.source || r.target != q.target {
                return Err(CategoryError::NotComposable { p, q });
            }
            if self.generator(*r).degree != expected {
                return Err(CategoryError::DegreeMismatch { p, q, r: *r });
            }
        }
        if value.is_zero() {
            self.m2.remove(&(p, q));
        } else {
            self.m2.insert((p, q), value);
        }
        Ok(())
    }

    pub fn set_m2_term(
        &mut self,
        p: GenRef,
        q: GenRef,
        coeff: UnitScalar,
        r: GenRef,
    ) -> Result<(), CategoryError> {
        self.set_m2(p, q, UnitCombination::term(coeff, r))
    }

    /// Composition of two generators; zero when absent from the table.
    pub fn m2(&self, p: GenRef, q: GenRef) -> UnitCombination<GenRef> {
        self.m2.get(&(p, q)).cloned().unwrap_or_default()
    }

    /// Bilinear extension of composition to combinations.
    pub fn m2_comb(
        &self,
        a: &UnitCombination<GenRef>,
        b: &UnitCombination<GenRef>,
    ) -> UnitCombination<GenRef> {
        let mut out = UnitCombination::zero();
        for (ca, p) in a.terms() {
            for (cb, q) in b.terms() {
                out.add(&self.m2(*p, *q).scale(&ca.mul(cb)));
            }
        }
        out
    }

    pub fn m2_entries(&self) -> impl Iterator<Item = (&(GenRef, GenRef), &UnitCombination<GenRef>)> {
        self.m2.iter()
    }

    /// Strict associativity of `m2` over every composable triple.  The
    /// flags `m1_zero` and `higher_mk_zero` certify that this is the full
    /// structure; identity laws hold formally because identities are not
    /// stored.
    pub fn check_associativity(&self) -> Result<(), CategoryError> {
        let gens = self.gen_refs();
        for p in &gens {
            for q in &gens {
                if q.source != p.target {
                    continue;
                }
                for r in &gens {
                    if r.source != q.target {
                        continue;
                    }
                    let left = self.m2_comb(&self.m2(*p, *q), &UnitCombination::term(UnitScalar::one(), *r));
                    let right = self.m2_comb(&UnitCombination::term(UnitScalar::one(), *p), &self.m2(*q, *r));
                    if !left.equals(&right) {
                        return Err(CategoryError::NotAssociative {
                            p: *p,
                            q: *q,
                            r: *r,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Rename generators via `map: (source, target, old_name) -> new_name`.
    pub fn rename_generators<F: Fn(usize, usize, &str) -> String>(&self, map: F) -> DirectedCategory {
        let mut out = self.clone();
        for (&(s, t), list) in out.homs.iter_mut() {
            for g in list.iter_mut() {
                g.name = map(s, t, &g.name);
            }
        }
        out
    }

    /// Reorder every hom basis by generator name, remapping the composition
    /// table.  Categories built through different pipelines agree on
    /// `GenRef` indices after this normalization.
    pub fn normalize_generator_order(&self) -> DirectedCategory {
        let mut perm: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut homs = BTreeMap::new();
        for (&key, list) in &self.homs {
            let mut order: Vec<usize> = (0..list.len()).collect();
            order.sort_by(|&x, &y| list[x].name.cmp(&list[y].name));
            // old index -> new index
            let mut inverse = vec![0; list.len()];
            for (new, &old) in order.iter().enumerate() {
                inverse[old] = new;
            }
            homs.insert(key, order.iter().map(|&old| list[old].clone()).collect());
            perm.insert(key, inverse);
        }
        let remap = |g: GenRef| GenRef {
            source: g.source,
            target: g.target,
            index: perm[&(g.source, g.target)][g.index],
        };
        let mut m2 = BTreeMap::new();
        for (&(p, q), value) in &self.m2 {
            let mut new_value = UnitCombination::zero();
            for (c, r) in value.terms() {
                new_value.push(c.clone(), remap(*r));
            }
            m2.insert((remap(p), remap(q)), new_value);
        }
        DirectedCategory {
            objects: self.objects.clone(),
            homs,
            m2,
            m1_zero: self.m1_zero,
            higher_mk_zero: self.higher_mk_zero,
        }
    }

    /// Full subcategory on a strictly increasing list of object indices.
    pub fn full_subcategory(&self, objects: &[usize]) -> DirectedCategory {
        let position: BTreeMap<usize, usize> =
            objects.iter().enumerate().map(|(p, &o)| (o, p)).collect();
        let mut out = DirectedCategory::new(
            objects.iter().map(|&o| self.objects[o].clone()).collect(),
        );
        for (&(s, t), list) in &self.homs {
            if let (Some(&sp), Some(&tp)) = (position.get(&s), position.get(&t)) {
                out.homs.insert((sp, tp), list.clone());
            }
        }
        for (&(p, q), value) in &self.m2 {
            let keep = [p.source, p.target, q.target]
                .iter()
                .all(|o| position.contains_key(o));
            if !keep {
                continue;
            }
            let remap = |g: GenRef| GenRef {
                source: position[&g.source],
                target: position[&g.target],
                index: g.index,
            };
            let mut new_value = UnitCombination::zero();
            for (c, r) in value.terms() {
                new_value.push(c.clone(), remap(*r));
            }
            out.m2.insert((remap(p), remap(q)), new_value);
        }
        out
    }

    /// Same objects, hom dimensions, generator names and degrees.
    pub fn same_skeleton(&self, other: &DirectedCategory) -> Result<(), CategoryError> {
        if self.objects.len() != other.objects.len() {
            return Err(CategoryError::SkeletonMismatch(format!(
                "object counts {} vs {}",
                self.objects.len(),
                other.objects.len()
            )));
        }
        let keys: Vec<_> = self.homs.keys().chain(other.homs.keys()).copied().collect();
        for (s, t) in keys {
            let a = self.hom(s, t);
            let b = other.hom(s, t);
            if a != b {
                return Err(CategoryError::SkeletonMismatch(format!(
                    "hom({s},{t}) generators differ: {a:?} vs {b:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Diagonal rescaling of the generators.
#[derive(Clone, Debug)]
pub struct GaugeTransform {
    pub scale: BTreeMap<GenRef, UnitScalar>,
}

impl Serialize for GaugeTransform {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            generator: GenRef,
            scale: &'a UnitScalar,
        }
        self.scale
            .iter()
            .map(|(g, c)| Entry {
                generator: *g,
                scale: c,
            })
            .collect::<Vec<_>>()
            .serialize(serializer)
    }
}

impl GaugeTransform {
    pub fn identity(cat: &DirectedCategory) -> Self {
        GaugeTransform {
            scale: cat
                .gen_refs()
                .into_iter()
                .map(|g| (g, UnitScalar::one()))
                .collect(),
        }
    }

    pub fn inverse(&self) -> GaugeTransform {
        GaugeTransform {
            scale: self.scale.iter().map(|(g, c)| (*g, c.inv())).collect(),
        }
    }

    pub fn compose(&self, other: &GaugeTransform) -> GaugeTransform {
        let mut scale = self.scale.clone();
        for (g, c) in &other.scale {
            let entry = scale.entry(*g).or_insert_with(UnitScalar::one);
            *entry = entry.mul(c);
        }
        GaugeTransform { scale }
    }
}

/// Rescale generators: the structure constant of `(p, q) -> r` becomes
/// `c * g(p) g(q) / g(r)`.
pub fn apply_gauge(
    cat: &DirectedCategory,
    gauge: &GaugeTransform,
) -> Result<DirectedCategory, CategoryError> {
    for g in cat.gen_refs() {
        if !gauge.scale.contains_key(&g) {
            return Err(CategoryError::MissingScale(g));
        }
    }
    let mut out = cat.clone();
    let entries: Vec<_> = cat.m2.iter().map(|(k, v)| (*k, v.clone())).collect();
    for ((p, q), value) in entries {
        let factor = gauge.scale[&p].mul(&gauge.scale[&q]);
        let mut new_value = UnitCombination::zero();
        for (c, r) in value.terms() {
            new_value.push(c.mul(&factor).mul(&gauge.scale[r].inv()), *r);
        }
        out.m2.insert((p, q), new_value);
    }
    Ok(out)
}

/// Certificate that no gauge carries one table to the other: an integer
/// functional on the equation lattice under which the two tables disagree.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeObstruction {
    /// Which coordinate of the unit group is obstructed: a prime, a named
    /// parameter, or the sign.
    pub coordinate: String,
    /// The product `prod_e (c2(e)/c1(e))^{y_e}` over the m2 entries `e`,
    /// which any gauge leaves invariant but which differs from 1.
    pub invariant_mismatch: UnitScalar,
    /// The functional `y` as (entry, weight) pairs over the m2 table.
    pub functional: Vec<((GenRef, GenRef), i64)>,
    pub modulus: String,
}

#[derive(Debug)]
pub enum GaugeMatch {
    Found(GaugeTransform),
    NoSolution(GaugeObstruction),
}

/// Solve for a gauge `g` with `apply_gauge(c1, g) == c2`.
///
/// Both categories must have the same skeleton, the same set of nonzero
/// `m2` entries, and single-term structure constants.
pub fn gauge_match(
    c1: &DirectedCategory,
    c2: &DirectedCategory,
) -> Result<GaugeMatch, CategoryError> {
    c1.same_skeleton(c2)?;
    let gens = c1.gen_refs();
    let gen_index: BTreeMap<GenRef, usize> = gens.iter().enumerate().map(|(i, g)| (*g, i)).collect();

    // Collect matched single-term entries and their required ratios.
    let mut equations: Vec<((GenRef, GenRef), GenRef, UnitScalar)> = Vec::new();
    let keys: Vec<(GenRef, GenRef)> = c1
        .m2
        .keys()
        .chain(c2.m2.keys())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    for key in keys {
        let v1 = c1.m2(key.0, key.1);
        let v2 = c2.m2(key.0, key.1);
        if v1.is_zero() != v2.is_zero() {
            return Ok(GaugeMatch::NoSolution(GaugeObstruction {
                coordinate: "support".to_string(),
                invariant_mismatch: UnitScalar::one(),
                functional: vec![(key, 1)],
                modulus: "0".to_string(),
            }));
        }
        if v1.is_zero() {
            continue;
        }
        let single = |v: &UnitCombination<GenRef>| -> Result<(UnitScalar, GenRef), CategoryError> {
            match v.terms() {
                [(c, r)] => Ok((c.clone(), *r)),
                _ => Err(CategoryError::NotSingleTerm { p: key.0, q: key.1 }),
            }
        };
        let (coeff1, r1) = single(&v1)?;
        let (coeff2, r2) = single(&v2)?;
        if r1 != r2 {
            return Ok(GaugeMatch::NoSolution(GaugeObstruction {
                coordinate: "support".to_string(),
                invariant_mismatch: UnitScalar::one(),
                functional: vec![(key, 1)],
                modulus: "0".to_string(),
            }));
        }
        equations.push((key, r1, coeff2.div(&coeff1)));
    }

    // Exponent matrix: row per equation, column per generator; the equation
    // for entry ((p, q) -> r, ratio) is x_p + x_q - x_r = log(ratio).
    let mut a = IntMatrix::zeros(equations.len(), gens.len());
    for (row, ((p, q), r, _)) in equations.iter().enumerate() {
        a[(row, gen_index[p])] += BigInt::from(1);
        a[(row, gen_index[q])] += BigInt::from(1);
        a[(row, gen_index[r])] -= BigInt::from(1);
    }
    let snf = smith_normal_form(&a);

    // Coordinates of the unit group that occur anywhere.
    let mut primes: Vec<u64> = Vec::new();
    let mut params: Vec<String> = Vec::new();
    for (_, _, ratio) in &equations {
        for (p, _) in ratio.primes() {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
        for (t, _) in ratio.params() {
            let t = t.to_string();
            if !params.contains(&t) {
                params.push(t);
            }
        }
    }
    primes.sort_unstable();
    params.sort();

    let mut scales: Vec<UnitScalar> = vec![UnitScalar::one(); gens.len()];

    for &p in &primes {
        let b: Vec<BigInt> = equations
            .iter()
            .map(|(_, _, ratio)| BigInt::from(ratio.prime_exponent(p)))
            .collect();
        match snf.solve(&b) {
            Ok(x) => {
                for (i, e) in x.iter().enumerate() {
                    let exp: i64 = e.try_into().expect("small exponent");
                    scales[i] = scales[i].mul(&UnitScalar::from_integer(p as i64).pow(exp));
                }
            }
            Err(cert) => {
                return Ok(GaugeMatch::NoSolution(obstruction(
                    format!("prime {p}"),
                    &equations,
                    &cert.functional,
                    &cert.modulus,
                )));
            }
        }
    }
    for t in &params {
        let b: Vec<BigInt> = equations
            .iter()
            .map(|(_, _, ratio)| BigInt::from(ratio.param_exponent(t)))
            .collect();
        match snf.solve(&b) {
            Ok(x) => {
                for (i, e) in x.iter().enumerate() {
                    let exp: i64 = e.try_into().expect("small exponent");
                    scales[i] = scales[i].mul(&UnitScalar::param(t).pow(exp));
                }
            }
            Err(cert) => {
                return Ok(GaugeMatch::NoSolution(obstruction(
                    format!("parameter {t}"),
                    &equations,
                    &cert.functional,
                    &cert.modulus,
                )));
            }
        }
    }
    // Sign system over GF(2).
    let a2: Vec<Vec<bool>> = (0..equations.len())
        .map(|row| {
            (0..gens.len())
                .map(|col| (&a[(row, col)] % BigInt::from(2)) != BigInt::zero())
                .collect()
        })
        .collect();
    let b2: Vec<bool> = equations
        .iter()
        .map(|(_, _, ratio)| ratio.is_negative())
        .collect();
    match crate::intlin::solve_gf2(&a2, &b2) {
        Ok(x) => {
            for (i, &neg) in x.iter().enumerate() {
                if neg {
                    scales[i] = scales[i].neg();
                }
            }
        }
        Err(rows) => {
            let functional: Vec<BigInt> = (0..equations.len())
                .map(|i| BigInt::from(rows.contains(&i) as i64))
                .collect();
            return Ok(GaugeMatch::NoSolution(obstruction(
                "sign".to_string(),
                &equations,
                &functional,
                &BigInt::from(2),
            )));
        }
    }

    let gauge = GaugeTransform {
        scale: gens.iter().enumerate().map(|(i, g)| (*g, scales[i].clone())).collect(),
    };
    // The solver works coordinatewise; confirm the assembled gauge.
    let transported = apply_gauge(c1, &gauge)?;
    debug_assert!(categories_equal(&transported, c2));
    if !categories_equal(&transported, c2) {
        return Err(CategoryError::SkeletonMismatch(
            "gauge verification failed".to_string(),
        ));
    }
    Ok(GaugeMatch::Found(gauge))
}

fn obstruction(
    coordinate: String,
    equations: &[((GenRef, GenRef), GenRef, UnitScalar)],
    functional: &[BigInt],
    modulus: &BigInt,
) -> GaugeObstruction {
    let mut mismatch = UnitScalar::one();
    let mut pairs = Vec::new();
    for (i, (key, _, ratio)) in equations.iter().enumerate() {
        let w: i64 = (&functional[i]).try_into().unwrap_or(0);
        if w != 0 {
            mismatch = mismatch.mul(&ratio.pow(w));
            pairs.push((*key, w));
        }
    }
    GaugeObstruction {
        coordinate,
        invariant_mismatch: mismatch,
        functional: pairs,
        modulus: modulus.to_string(),
    }
}

/// Structure-constant tables agree exactly.
pub fn categories_equal(a: &DirectedCategory, b: &DirectedCategory) -> bool {
    if a.same_skeleton(b).is_err() {
        return false;
    }
    let keys: std::collections::BTreeSet<(GenRef, GenRef)> =
        a.m2.keys().chain(b.m2.keys()).copied().collect();
    keys.iter().all(|k| a.m2(k.0, k.1).equals(&b.m2(k.0, k.1)))
}

/// Basis of the quadratic relation space dual to a three-object composition
/// table.
///
/// `Hom(0,1)` and `Hom(1,2)` must carry the same generator names, giving a
/// common space `V`; the table defines the multiplication `V ⊗ V -> W` with
/// `W = Hom(0,2)`.  The relations of the quadratic dual algebra are the
/// annihilator of the kernel of that multiplication inside `(V ⊗ V)^*`,
/// identified with `V^* ⊗ V^*` by pairing the first factor against the
/// second.  Rows are returned in reduced echelon form over the basis
/// `{v_i ⊗ v_j}` in row-major order.
pub fn quadratic_dual(
    cat: &DirectedCategory,
    assignment: &BTreeMap<String, BigRational>,
) -> Result<Vec<Vec<BigRational>>, CategoryError> {
    if cat.objects.len() != 3 {
        return Err(CategoryError::QuadraticShape(
            "exactly three objects".to_string(),
        ));
    }
    let v1 = cat.hom(0, 1);
    let v2 = cat.hom(1, 2);
    let w = cat.hom(0, 2);
    if v1.iter().map(|g| &g.name).collect::<Vec<_>>()
        != v2.iter().map(|g| &g.name).collect::<Vec<_>>()
    {
        return Err(CategoryError::QuadraticShape(
            "Hom(0,1) and Hom(1,2) identified by generator names".to_string(),
        ));
    }
    let dim = v1.len();
    // Multiplication matrix mu: rows = W basis, cols = V⊗V in row-major
    // (p, q) order.
    let mut mu = RatMatrix::zeros(w.len(), dim * dim);
    for pi in 0..dim {
        for qi in 0..dim {
            let p = GenRef {
                source: 0,
                target: 1,
                index: pi,
            };
            let q = GenRef {
                source: 1,
                target: 2,
                index: qi,
            };
            for (c, r) in cat.m2(p, q).terms() {
                let value = c
                    .eval(assignment)
                    .ok_or(CategoryError::UnassignedParameter)?;
                mu[(r.index, pi * dim + qi)] += value;
            }
        }
    }
    if mu.rank() != w.len() {
        return Err(CategoryError::QuadraticNotSurjective {
            rank: mu.rank(),
            dim: w.len(),
        });
    }
    // Kernel of mu inside V⊗V, then its annihilator under the flipped
    // pairing <u* ⊗ v*, s ⊗ t> = u*(t) v*(s).
    let kernel = mu.kernel();
    let mut constraint = RatMatrix::zeros(kernel.len(), dim * dim);
    for (row, k) in kernel.iter().enumerate() {
        for u in 0..dim {
            for v in 0..dim {
                // Coefficient of relation coordinate (u, v) pairs with
                // kernel coordinate (v, u).
                constraint[(row, u * dim + v)] = k[v * dim + u].clone();
            }
        }
    }
    Ok(row_space_basis(constraint.kernel()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn two_step() -> (DirectedCategory, GenRef, GenRef, GenRef) {
        let mut cat = DirectedCategory::new(vec!["a".into(), "b".into(), "c".into()]);
        let p = cat.add_generator(0, 1, "p", 0).unwrap();
        let q = cat.add_generator(1, 2, "q", 0).unwrap();
        let r = cat.add_generator(0, 2, "r", 0).unwrap();
        cat.set_m2_term(p, q, UnitScalar::from_integer(2), r).unwrap();
        (cat, p, q, r)
    }

    #[test]
    fn associativity_catches_corruption() {
        let mut cat = DirectedCategory::new((0..4).map(|i| format!("v{i}")).collect());
        let p = cat.add_generator(0, 1, "p", 0).unwrap();
        let q = cat.add_generator(1, 2, "q", 0).unwrap();
        let r = cat.add_generator(2, 3, "r", 0).unwrap();
        let pq = cat.add_generator(0, 2, "pq", 0).unwrap();
        let qr = cat.add_generator(1, 3, "qr", 0).unwrap();
        let pqr = cat.add_generator(0, 3, "pqr", 0).unwrap();
        cat.set_m2_term(p, q, UnitScalar::one(), pq).unwrap();
        cat.set_m2_term(q, r, UnitScalar::one(), qr).unwrap();
        cat.set_m2_term(pq, r, UnitScalar::one(), pqr).unwrap();
        cat.set_m2_term(p, qr, UnitScalar::one(), pqr).unwrap();
        cat.check_associativity().unwrap();
        // Double one coefficient: the triple fails.
        cat.set_m2_term(pq, r, UnitScalar::from_integer(2), pqr).unwrap();
        assert!(matches!(
            cat.check_associativity(),
            Err(CategoryError::NotAssociative { .. })
        ));
    }

    #[test]
    fn vacuous_associativity() {
        let mut cat = DirectedCategory::new(vec!["a".into(), "b".into(), "c".into()]);
        cat.add_generator(0, 1, "p", 1).unwrap();
        cat.add_generator(1, 2, "q", 1).unwrap();
        // No triple is composable over three objects with two hom steps.
        cat.check_associativity().unwrap();
    }

    #[test]
    fn gauge_round_trip() {
        let (cat, p, q, r) = two_step();
        let mut rng = SplitMix64::new(11);
        for _ in 0..100 {
            let mut gauge = GaugeTransform::identity(&cat);
            for g in [p, q, r] {
                let num = rng.nonzero(30);
                let den = rng.range_i64(1, 30);
                let mut c = UnitScalar::from_ratio(num, den);
                if rng.below(2) == 0 {
                    c = c.mul(&UnitScalar::param("t").pow(rng.range_i64(-2, 2)));
                }
                gauge.scale.insert(g, c);
            }
            let moved = apply_gauge(&cat, &gauge).unwrap();
            match gauge_match(&cat, &moved).unwrap() {
                GaugeMatch::Found(found) => {
                    let back = apply_gauge(&cat, &found).unwrap();
                    assert!(categories_equal(&back, &moved));
                }
                GaugeMatch::NoSolution(obs) => panic!("round trip failed: {obs:?}"),
            }
        }
        // Identity gauge fixes the category.
        let id = GaugeTransform::identity(&cat);
        assert!(categories_equal(&apply_gauge(&cat, &id).unwrap(), &cat));
        // g then g^{-1} is the identity action.
        let mut gauge = GaugeTransform::identity(&cat);
        gauge.scale.insert(p, UnitScalar::from_integer(-7));
        let there = apply_gauge(&cat, &gauge).unwrap();
        let back = apply_gauge(&there, &gauge.inverse()).unwrap();
        assert!(categories_equal(&back, &cat));
    }

    #[test]
    fn unsolvable_yields_certificate() {
        // A lone composition p·q = c r admits any rescaling, so build a
        // square of compositions whose cross-ratio is gauge invariant.
        let mut c1 = DirectedCategory::new(vec!["a".into(), "b".into(), "c".into()]);
        let p1 = c1.add_generator(0, 1, "p1", 0).unwrap();
        let p2 = c1.add_generator(0, 1, "p2", 0).unwrap();
        let q1 = c1.add_generator(1, 2, "q1", 0).unwrap();
        let q2 = c1.add_generator(1, 2, "q2", 0).unwrap();
        let r = c1.add_generator(0, 2, "r", 0).unwrap();
        for (p, q) in [(p1, q1), (p1, q2), (p2, q1), (p2, q2)] {
            c1.set_m2_term(p, q, UnitScalar::one(), r).unwrap();
        }
        let mut c2 = c1.clone();
        // Change a single coefficient: the cross ratio
        // (p1q1)(p2q2)/((p1q2)(p2q1)) becomes 2, which no gauge fixes.
        c2.set_m2_term(p1, q1, UnitScalar::from_integer(2), r).unwrap();
        match gauge_match(&c1, &c2).unwrap() {
            GaugeMatch::NoSolution(obs) => {
                assert_eq!(obs.coordinate, "prime 2");
                assert!(!obs.invariant_mismatch.is_one());
            }
            GaugeMatch::Found(_) => panic!("expected obstruction"),
        }
    }

    #[test]
    fn sign_obstruction_yields_certificate() {
        // Cross-ratio -1: the exponent systems are all solvable but the
        // parity system is not.
        let mut c1 = DirectedCategory::new(vec!["a".into(), "b".into(), "c".into()]);
        let p1 = c1.add_generator(0, 1, "p1", 0).unwrap();
        let p2 = c1.add_generator(0, 1, "p2", 0).unwrap();
        let q1 = c1.add_generator(1, 2, "q1", 0).unwrap();
        let q2 = c1.add_generator(1, 2, "q2", 0).unwrap();
        let r = c1.add_generator(0, 2, "r", 0).unwrap();
        for (p, q) in [(p1, q1), (p1, q2), (p2, q1), (p2, q2)] {
            c1.set_m2_term(p, q, UnitScalar::one(), r).unwrap();
        }
        let mut c2 = c1.clone();
        c2.set_m2_term(p1, q1, UnitScalar::minus_one(), r).unwrap();
        match gauge_match(&c1, &c2).unwrap() {
            GaugeMatch::NoSolution(obs) => {
                assert_eq!(obs.coordinate, "sign");
                assert_eq!(obs.invariant_mismatch, UnitScalar::minus_one());
            }
            GaugeMatch::Found(_) => panic!("expected a sign obstruction"),
        }
    }

    #[test]
    fn quadratic_dual_requires_surjective_multiplication() {
        let mut cat = DirectedCategory::new(vec!["l0".into(), "l1".into(), "l2".into()]);
        let names = ["x", "y", "z"];
        let v0: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(0, 1, n, 1).unwrap())
            .collect();
        let v1: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(1, 2, n, 1).unwrap())
            .collect();
        let wbar: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(0, 2, &format!("{n}bar"), 2).unwrap())
            .collect();
        // A single nonzero product cannot span the three-dimensional target.
        cat.set_m2_term(v0[0], v1[0], UnitScalar::one(), wbar[0]).unwrap();
        assert!(matches!(
            quadratic_dual(&cat, &BTreeMap::new()),
            Err(CategoryError::QuadraticNotSurjective { rank: 1, dim: 3 })
        ));
    }

    #[test]
    fn quadratic_dual_of_parameter_table() {
        // Three-object table with constants (a, b, c) = (3, 5, 7):
        // relations must be spanned by c x^2 + b yz + a zy and its cyclic
        // partners.
        let (a, b, c) = (3i64, 5i64, 7i64);
        let names = ["x", "y", "z"];
        let mut cat = DirectedCategory::new(vec!["l0".into(), "l1".into(), "l2".into()]);
        let v0: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(0, 1, n, 1).unwrap())
            .collect();
        let v1: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(1, 2, n, 1).unwrap())
            .collect();
        let wbar: Vec<GenRef> = names
            .iter()
            .map(|n| cat.add_generator(0, 2, &format!("{n}bar"), 2).unwrap())
            .collect();
        let coeff = |v: i64| UnitScalar::from_integer(v);
        // m2(x0,y1)=a zbar, m2(x0,z1)=b ybar, m2(x0,x1)=c xbar, and cyclic.
        let table: [(usize, usize, usize, i64); 9] = [
            (0, 1, 2, a),
            (0, 2, 1, b),
            (0, 0, 0, c),
            (1, 2, 0, a),
            (1, 0, 2, b),
            (1, 1, 1, c),
            (2, 0, 1, a),
            (2, 1, 0, b),
            (2, 2, 2, c),
        ];
        for (p, q, r, v) in table {
            cat.set_m2_term(v0[p], v1[q], coeff(v), wbar[r]).unwrap();
        }
        let rels = quadratic_dual(&cat, &BTreeMap::new()).unwrap();
        assert_eq!(rels.len(), 3);
        let rat = |v: i64| BigRational::from_integer(v.into());
        // f1 = c x⊗x + b y⊗z + a z⊗y  (coordinates row-major over x,y,z).
        let f1 = vec![
            rat(c),
            rat(0),
            rat(0),
            rat(0),
            rat(0),
            rat(b),
            rat(0),
            rat(a),
            rat(0),
        ];
        let f2 = vec![
            rat(0),
            rat(0),
            rat(a),
            rat(0),
            rat(c),
            rat(0),
            rat(b),
            rat(0),
            rat(0),
        ];
        let f3 = vec![
            rat(0),
            rat(b),
            rat(0),
            rat(a),
            rat(0),
            rat(0),
            rat(0),
            rat(0),
            rat(c),
        ];
        assert!(crate::linalg::same_span(rels, vec![f1, f2, f3]));
    }
}
