//! Directed categories of the B-side: the endomorphism category of the
//! standard exceptional collection of twisting sheaves, its Koszul-dual
//! exterior category, the single unit invariant that classifies plane
//! deformation matrices, and the Hirzebruch corner algebra.
//!
//! Conventions.  `exceptional_category` (the collection side) has objects
//! `v_0..v_{l-1}` and `Hom(v_i, v_j)` the degree `j-i` piece of the skew
//! polynomial algebra, all generators in cohomological degree 0.  The
//! exterior side has hom spaces from *higher* to *lower* internal index, so
//! `koszul_dual_category` emits the objects in reversed order to satisfy the
//! container's directedness; the stored `object_reversal` records the map
//! back to internal indices.  In both categories `m2(p, q)` composes `p`
//! first, i.e. it is the product `q·p` in the underlying algebra.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    gcd_all, AlgebraError, AlgebraKind, DeformationMatrix, GradedSkewAlgebra, Monomial,
    ScaledMonomial,
};
use crate::dgcat::{CategoryError, DirectedCategory, GenRef};
use crate::scalar::UnitScalar;

#[derive(Debug, Error)]
pub enum BsideError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("window indices must be strictly increasing")]
    BadWindow,
    #[error("the unit invariant is defined for three weights, got {0}")]
    NotPlane(usize),
    #[error("realizing an invariant needs coprime weights, got gcd {0}")]
    NotCoprime(u32),
    #[error("corner algebra needs n >= 2, got {0}")]
    CornerTooSmall(u32),
}

/// Weights, deformation matrix and the ordered window of twists to include.
#[derive(Clone, Debug, Serialize)]
pub struct CollectionSpec {
    pub weights: Vec<u32>,
    pub theta: DeformationMatrix,
    pub window: Vec<u32>,
}

impl CollectionSpec {
    /// Full window `0..l-1` for the Gorenstein parameter `l`.
    pub fn full(weights: Vec<u32>, theta: DeformationMatrix) -> Self {
        let l: u32 = weights.iter().sum();
        CollectionSpec {
            weights,
            theta,
            window: (0..l).collect(),
        }
    }

    pub fn windowed(weights: Vec<u32>, theta: DeformationMatrix, window: Vec<u32>) -> Self {
        CollectionSpec {
            weights,
            theta,
            window,
        }
    }
}

/// The degree-0 directed category of the exceptional collection
/// `O(w_0), .., O(w_{k-1})` over the window: `Hom(i, j)` has the monomial
/// basis of the algebra in internal degree `w_j - w_i` and composition is
/// skew multiplication.
pub fn exceptional_category(spec: &CollectionSpec) -> Result<DirectedCategory, BsideError> {
    if spec.window.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BsideError::BadWindow);
    }
    let algebra = GradedSkewAlgebra::polynomial(spec.weights.clone(), spec.theta.clone())?;
    let objects: Vec<String> = spec.window.iter().map(|w| format!("v{w}")).collect();
    let mut cat = DirectedCategory::new(objects);
    let k = spec.window.len();
    let mut basis: Vec<Vec<Vec<Monomial>>> = vec![vec![Vec::new(); k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let degree = (spec.window[j] - spec.window[i]) as i64;
            for m in algebra.graded_basis(degree) {
                cat.add_generator(i, j, &m.name(AlgebraKind::Polynomial), 0)?;
                basis[i][j].push(m);
            }
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            for l in (j + 1)..k {
                for (pi, pm) in basis[i][j].iter().enumerate() {
                    for (qi, qm) in basis[j][l].iter().enumerate() {
                        // Composite p then q is the product q·p.
                        let product = algebra
                            .multiply(
                                &ScaledMonomial {
                                    coeff: UnitScalar::one(),
                                    monomial: qm.clone(),
                                },
                                &ScaledMonomial {
                                    coeff: UnitScalar::one(),
                                    monomial: pm.clone(),
                                },
                            )
                            .expect("polynomial products never vanish");
                        let ri = basis[i][l]
                            .iter()
                            .position(|m| *m == product.monomial)
                            .expect("product stays in the window basis");
                        let p = GenRef {
                            source: i,
                            target: j,
                            index: pi,
                        };
                        let q = GenRef {
                            source: j,
                            target: l,
                            index: qi,
                        };
                        let r = GenRef {
                            source: i,
                            target: l,
                            index: ri,
                        };
                        cat.set_m2_term(p, q, product.coeff, r)?;
                    }
                }
            }
        }
    }
    cat.check_associativity()?;
    Ok(cat)
}

/// Koszul-dual exterior category together with the object reversal map.
#[derive(Clone, Debug, Serialize)]
pub struct DualCategory {
    pub category: DirectedCategory,
    /// `object_reversal[p]` is the internal index of the object at position
    /// `p`; positions ascend while internal indices descend.
    pub object_reversal: Vec<usize>,
}

/// Exterior-side category: position `p` holds the object of internal index
/// `l-1-p`; `Hom(p, p')` has the monomial basis of the skew exterior algebra
/// in internal degree `p - p'`, generators in cohomological degree equal to
/// their exterior word length.
pub fn koszul_dual_category(
    weights: &[u32],
    theta: &DeformationMatrix,
) -> Result<DualCategory, BsideError> {
    let algebra = GradedSkewAlgebra::exterior(weights.to_vec(), theta.clone())?;
    let l = algebra.gorenstein_parameter() as usize;
    let object_reversal: Vec<usize> = (0..l).rev().collect();
    let objects: Vec<String> = object_reversal.iter().map(|w| format!("w{w}")).collect();
    let mut cat = DirectedCategory::new(objects);
    let mut basis: Vec<Vec<Vec<Monomial>>> = vec![vec![Vec::new(); l]; l];
    for p in 0..l {
        for q in (p + 1)..l {
            let offset = (q - p) as i64;
            for m in algebra.graded_basis(-offset) {
                let degree: u32 = m.exponents.iter().sum();
                cat.add_generator(p, q, &m.name(AlgebraKind::Exterior), degree as i32)?;
                basis[p][q].push(m);
            }
        }
    }
    for p in 0..l {
        for q in (p + 1)..l {
            for r in (q + 1)..l {
                for (pi, pm) in basis[p][q].iter().enumerate() {
                    for (qi, qm) in basis[q][r].iter().enumerate() {
                        let Some(product) = algebra.multiply(
                            &ScaledMonomial {
                                coeff: UnitScalar::one(),
                                monomial: qm.clone(),
                            },
                            &ScaledMonomial {
                                coeff: UnitScalar::one(),
                                monomial: pm.clone(),
                            },
                        ) else {
                            continue;
                        };
                        let ri = basis[p][r]
                            .iter()
                            .position(|m| *m == product.monomial)
                            .expect("product stays in the graded basis");
                        cat.set_m2_term(
                            GenRef {
                                source: p,
                                target: q,
                                index: pi,
                            },
                            GenRef {
                                source: q,
                                target: r,
                                index: qi,
                            },
                            product.coeff,
                            GenRef {
                                source: p,
                                target: r,
                                index: ri,
                            },
                        )?;
                    }
                }
            }
        }
    }
    cat.check_associativity()?;
    Ok(DualCategory {
        category: cat,
        object_reversal,
    })
}

/// The single unit invariant of a 3x3 deformation matrix with weights
/// `(a, b, c)`: the product of antisymmetrized ratios
/// `r_01^c · r_12^a · r_20^b`.
pub fn q_invariant(theta: &DeformationMatrix, weights: &[u32]) -> Result<UnitScalar, BsideError> {
    if weights.len() != 3 || theta.size() != 3 {
        return Err(BsideError::NotPlane(weights.len()));
    }
    let (a, b, c) = (weights[0] as i64, weights[1] as i64, weights[2] as i64);
    Ok(theta
        .ratio(0, 1)
        .pow(c)
        .mul(&theta.ratio(1, 2).pow(a))
        .mul(&theta.ratio(2, 0).pow(b)))
}

/// Construct a deformation matrix whose invariant equals `target`, by
/// solving `c·u + a·v + b·w = 1` with the extended Euclidean algorithm and
/// setting the three independent ratios to powers of the target.
pub fn realize_q(weights: &[u32], target: &UnitScalar) -> Result<DeformationMatrix, BsideError> {
    if weights.len() != 3 {
        return Err(BsideError::NotPlane(weights.len()));
    }
    let g = gcd_all(weights);
    if g != 1 {
        return Err(BsideError::NotCoprime(g));
    }
    let (a, b, c) = (weights[0] as i64, weights[1] as i64, weights[2] as i64);
    // gcd(c, a) = g1 = u0 c + v0 a ; gcd(g1, b) = 1 = s g1 + w b.
    let (g1, u0, v0) = ext_gcd(c, a);
    let (_one, s, we) = ext_gcd(g1, b);
    let mut solution = (s * u0, s * v0, we);
    // Prefer the smallest solution in (|u|+|v|+|w|, descending u, v) order;
    // the Euclidean one serves as a search bound and fallback.
    let euclid_size = solution.0.abs() + solution.1.abs() + solution.2.abs();
    'search: for total in 1..=euclid_size {
        for u in (-total..=total).rev() {
            for v in (-(total - u.abs())..=(total - u.abs())).rev() {
                let rest = 1 - c * u - a * v;
                if rest % b == 0 {
                    let w = rest / b;
                    if u.abs() + v.abs() + w.abs() <= total {
                        solution = (u, v, w);
                        break 'search;
                    }
                }
            }
        }
    }
    let (u, v, w) = solution;
    debug_assert_eq!(c * u + a * v + b * w, 1);
    let mut theta = DeformationMatrix::identity(3);
    theta.set(0, 1, target.pow(u));
    theta.set(1, 2, target.pow(v));
    theta.set(2, 0, target.pow(w));
    debug_assert_eq!(&q_invariant(&theta, weights)?, target);
    Ok(theta)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Corner algebra of the Hirzebruch surface of index `n`: the idempotent
/// piece of the collection on weights `(1, 1, n)` cut to the window
/// `{0, 1, n, n+1}`.
pub fn hirzebruch_category(
    n: u32,
    theta: &DeformationMatrix,
) -> Result<DirectedCategory, BsideError> {
    if n < 2 {
        return Err(BsideError::CornerTooSmall(n));
    }
    let spec = CollectionSpec::windowed(vec![1, 1, n], theta.clone(), vec![0, 1, n, n + 1]);
    exceptional_category(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::{apply_gauge, categories_equal, gauge_match, GaugeMatch, GaugeTransform};
    use crate::rng::SplitMix64;

    fn theta_formal(size: usize, tag: &str) -> DeformationMatrix {
        let mut t = DeformationMatrix::identity(size);
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    t.set(i, j, UnitScalar::param(&format!("{tag}{i}{j}")));
                }
            }
        }
        t
    }

    #[test]
    fn collection_dimensions() {
        let spec = CollectionSpec::full(vec![1, 1, 1], theta_formal(3, "t"));
        let cat = exceptional_category(&spec).unwrap();
        assert_eq!(cat.objects.len(), 3);
        assert_eq!(cat.hom_dim(0, 1), 3);
        assert_eq!(cat.hom_dim(0, 2), 6);
        // Dimensions do not depend on the deformation.
        let flat = exceptional_category(&CollectionSpec::full(
            vec![1, 1, 1],
            DeformationMatrix::identity(3),
        ))
        .unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(cat.hom_dim(i, j), flat.hom_dim(i, j));
            }
        }
    }

    #[test]
    fn dual_category_counts() {
        let dual = koszul_dual_category(&[1, 1, 1], &theta_formal(3, "t")).unwrap();
        let cat = &dual.category;
        assert_eq!(cat.objects.len(), 3);
        let total: usize = (0..3)
            .flat_map(|p| ((p + 1)..3).map(move |q| (p, q)))
            .map(|(p, q)| cat.hom_dim(p, q))
            .sum();
        assert_eq!(total, 9);
        // Line case: a+b generators, all of degree 1.
        let line = koszul_dual_category(&[3, 4], &theta_formal(2, "t")).unwrap();
        let mut count = 0;
        for p in 0..7 {
            for q in (p + 1)..7 {
                for g in line.category.hom(p, q) {
                    assert_eq!(g.degree, 1);
                    count += 1;
                }
            }
        }
        assert_eq!(count, 7);
        // Degree-1 generators at offsets a_i, degree-2 at offsets a_i + a_j.
        let d123 = koszul_dual_category(&[1, 2, 3], &theta_formal(3, "u")).unwrap();
        for p in 0..6 {
            for q in (p + 1)..6 {
                for g in d123.category.hom(p, q) {
                    let offset = q - p;
                    match g.degree {
                        1 => assert!([1, 2, 3].contains(&offset)),
                        2 => assert!([3, 4, 5].contains(&offset)),
                        3 => assert_eq!(offset, 6),
                        d => panic!("unexpected degree {d}"),
                    }
                }
            }
        }
    }

    #[test]
    fn q_invariant_values() {
        let id = DeformationMatrix::identity(3);
        assert!(q_invariant(&id, &[1, 1, 1]).unwrap().is_one());
        let mut t = DeformationMatrix::identity(3);
        t.set(0, 1, UnitScalar::param("t"));
        assert_eq!(
            q_invariant(&t, &[1, 1, 1]).unwrap(),
            UnitScalar::param("t")
        );
    }

    #[test]
    fn rescaling_preserves_q_and_the_category() {
        // theta'_ij = theta_ij * m_i^{a_j} leaves q fixed and the categories
        // gauge-equivalent via scaling Hom(v_i, v_j) by m_i^{w_j - w_i}.
        let weights = [2u32, 1, 1];
        let theta = theta_formal(3, "t");
        let mut theta2 = theta.clone();
        let scales = ["m0", "m1", "m2"];
        for i in 0..3 {
            for j in 0..3 {
                let factor = UnitScalar::param(scales[i]).pow(weights[j] as i64);
                theta2.set(i, j, theta.entry(i, j).mul(&factor));
            }
        }
        assert_eq!(
            q_invariant(&theta, &weights).unwrap(),
            q_invariant(&theta2, &weights).unwrap()
        );
        let c1 = exceptional_category(&CollectionSpec::full(weights.to_vec(), theta)).unwrap();
        let c2 = exceptional_category(&CollectionSpec::full(weights.to_vec(), theta2)).unwrap();
        match gauge_match(&c1, &c2).unwrap() {
            GaugeMatch::Found(g) => {
                let moved = apply_gauge(&c1, &g).unwrap();
                assert!(categories_equal(&moved, &c2));
            }
            GaugeMatch::NoSolution(obs) => panic!("expected equivalence, got {obs:?}"),
        }
    }

    #[test]
    fn realize_q_round_trip() {
        let t = UnitScalar::param("t");
        for weights in [[1u32, 1, 1], [4, 2, 1], [2, 3, 5], [1, 2, 3]] {
            let theta = realize_q(&weights, &t).unwrap();
            assert_eq!(q_invariant(&theta, &weights).unwrap(), t);
        }
        assert_eq!(
            realize_q(&[1, 1, 1], &UnitScalar::one())
                .unwrap()
                .antisymmetrized(),
            DeformationMatrix::identity(3).antisymmetrized()
        );
        // (1,1,1): the Euclidean solution puts the whole target on one ratio.
        let theta = realize_q(&[1, 1, 1], &t).unwrap();
        assert_eq!(theta.ratio(0, 1), t);
    }

    #[test]
    fn corner_algebra_dimensions() {
        for n in [2u32, 3, 5] {
            let cat = hirzebruch_category(n, &DeformationMatrix::identity(3)).unwrap();
            assert_eq!(cat.hom_dim(0, 1), 2);
            assert_eq!(cat.hom_dim(0, 2), (n + 2) as usize);
            assert_eq!(cat.hom_dim(1, 2), n as usize);
            assert_eq!(cat.hom_dim(2, 3), 2);
            // The computed top corner is n+4: one more than the naive
            // symmetric-power count; reported as computed.
            assert_eq!(cat.hom_dim(0, 3), (n + 4) as usize);
            // Same tables as cutting the full collection to the window.
            let full = exceptional_category(&CollectionSpec::full(
                vec![1, 1, n],
                DeformationMatrix::identity(3),
            ))
            .unwrap();
            assert_eq!(cat.hom_dim(0, 3), full.hom_dim(0, (n + 1) as usize));
        }
    }

    #[test]
    fn corner_algebra_is_the_window_subcategory() {
        for n in [2u32, 4, 5] {
            let theta = theta_formal(3, "t");
            let corner = hirzebruch_category(n, &theta).unwrap();
            let full = exceptional_category(&CollectionSpec::full(vec![1, 1, n], theta)).unwrap();
            let window =
                full.full_subcategory(&[0, 1, n as usize, (n + 1) as usize]);
            assert!(categories_equal(&corner, &window), "n = {n}");
        }
    }

    #[test]
    fn plane_dual_categories_match_iff_q_agrees() {
        let mut rng = SplitMix64::new(0x2b);
        let weights = [2u32, 1, 1];
        for _ in 0..6 {
            let mut theta1 = DeformationMatrix::identity(3);
            let mut theta2 = DeformationMatrix::identity(3);
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        theta1.set(i, j, UnitScalar::from_ratio(rng.nonzero(9), rng.range_i64(1, 9)));
                        theta2.set(i, j, UnitScalar::from_ratio(rng.nonzero(9), rng.range_i64(1, 9)));
                    }
                }
            }
            let q1 = q_invariant(&theta1, &weights).unwrap();
            let q2 = q_invariant(&theta2, &weights).unwrap();
            let c1 = koszul_dual_category(&weights, &theta1).unwrap().category;
            let c2 = koszul_dual_category(&weights, &theta2).unwrap().category;
            let matched = matches!(gauge_match(&c1, &c2).unwrap(), GaugeMatch::Found(_));
            assert_eq!(matched, q1 == q2, "q1={q1} q2={q2}");
            // Force equality of the invariant by adjusting the ratio whose
            // exponent in q is 1 (the third weight); the tables must then
            // match.
            let fix = q1.div(&q2);
            let mut theta4 = theta2.clone();
            theta4.set(0, 1, theta2.entry(0, 1).mul(&fix));
            assert_eq!(q_invariant(&theta4, &weights).unwrap(), q1);
            let c4 = koszul_dual_category(&weights, &theta4).unwrap().category;
            assert!(matches!(
                gauge_match(&c1, &c4).unwrap(),
                GaugeMatch::Found(_)
            ));
        }
    }

    #[test]
    fn random_gauges_recovered_on_built_categories() {
        let spec = CollectionSpec::full(vec![1, 1, 2], theta_formal(3, "t"));
        let cat = exceptional_category(&spec).unwrap();
        let mut rng = SplitMix64::new(23);
        for _ in 0..10 {
            let mut gauge = GaugeTransform::identity(&cat);
            for g in cat.gen_refs() {
                gauge
                    .scale
                    .insert(g, UnitScalar::from_ratio(rng.nonzero(9), rng.range_i64(1, 9)));
            }
            let moved = apply_gauge(&cat, &gauge).unwrap();
            match gauge_match(&cat, &moved).unwrap() {
                GaugeMatch::Found(found) => {
                    assert!(categories_equal(&apply_gauge(&cat, &found).unwrap(), &moved));
                }
                GaugeMatch::NoSolution(obs) => panic!("round trip failed: {obs:?}"),
            }
        }
    }
}
