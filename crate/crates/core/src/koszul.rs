//! The Koszul resolution of the ground field over a skew polynomial algebra,
//! its contraction action by the skew exterior algebra, and the sheaf
//! cohomology table it controls.
//!
//! The complex has one free summand per subset `I` of the generators, with
//! internal shift `-sum_{i in I} a_i`.  The differential removes one index
//! `i_s` at a time with coefficient `(-1)^s (prod_{i in I} t_{i,i_s}) x_{i_s}`,
//! and the exterior generator `y_j` contracts `I` to `I \ {j}` with the
//! transposed coefficient `(-1)^s prod_{i in I} t_{i_s,i}`.  Both identities
//! `d∘d = 0` and `d∘y_j = -y_j∘d` are checked symbolically in the matrix
//! entries, not for specialized values.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraKind, GradedSkewAlgebra, Monomial};
use crate::linalg::RatMatrix;
use crate::scalar::{UnitCombination, UnitScalar};

#[derive(Debug, Error)]
pub enum KoszulError {
    #[error("complex must be built from a polynomial-kind algebra")]
    NotPolynomial,
    #[error("differential does not square to zero on subset {subset:b}")]
    SquareNotZero { subset: u32 },
    #[error("contraction does not graded-commute with the differential (j={j}, subset {subset:b})")]
    ContractionIncompatible { j: usize, subset: u32 },
}

/// One component of the differential: the summand indexed by `from` maps
/// into the summand indexed by `to = from \ {removed}` with coefficient
/// `coeff * x_removed`.
#[derive(Clone, Debug, Serialize)]
pub struct KoszulEntry {
    pub from: u32,
    pub to: u32,
    pub removed: usize,
    pub coeff: UnitScalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct KoszulComplex {
    pub algebra: GradedSkewAlgebra,
    /// `terms[k]` lists the subsets of size `k` in ascending bitmask order.
    pub terms: Vec<Vec<u32>>,
    /// `entries[k]` is the differential from size-`k` summands to size-`k-1`
    /// summands (`entries[0]` is empty).
    pub entries: Vec<Vec<KoszulEntry>>,
}

fn subset_members(subset: u32) -> Vec<usize> {
    (0..32).filter(|&i| subset & (1 << i) != 0).collect()
}

fn subset_weight(subset: u32, weights: &[u32]) -> i64 {
    subset_members(subset)
        .iter()
        .map(|&i| weights[i] as i64)
        .sum()
}

/// Build the Koszul complex and verify `d∘d = 0` symbolically.
pub fn koszul_build(algebra: &GradedSkewAlgebra) -> Result<KoszulComplex, KoszulError> {
    if algebra.kind != AlgebraKind::Polynomial {
        return Err(KoszulError::NotPolynomial);
    }
    let n1 = algebra.generators();
    let mut terms: Vec<Vec<u32>> = vec![Vec::new(); n1 + 1];
    for subset in 0u32..(1 << n1) {
        terms[subset.count_ones() as usize].push(subset);
    }
    let mut entries: Vec<Vec<KoszulEntry>> = vec![Vec::new(); n1 + 1];
    for k in 1..=n1 {
        for &subset in &terms[k] {
            for (s, &removed) in subset_members(subset).iter().enumerate() {
                let mut coeff = if s % 2 == 0 {
                    UnitScalar::one()
                } else {
                    UnitScalar::minus_one()
                };
                for &i in &subset_members(subset) {
                    coeff = coeff.mul(algebra.theta.entry(i, removed));
                }
                entries[k].push(KoszulEntry {
                    from: subset,
                    to: subset & !(1 << removed),
                    removed,
                    coeff,
                });
            }
        }
    }
    let complex = KoszulComplex {
        algebra: algebra.clone(),
        terms,
        entries,
    };
    complex.check_square_zero()?;
    Ok(complex)
}

impl KoszulComplex {
    /// Internal shift of the summand indexed by `subset`.
    pub fn shift(&self, subset: u32) -> i64 {
        -subset_weight(subset, &self.algebra.weights)
    }

    /// Ranks of the terms, from subsets of size 0 up to n+1.
    pub fn term_ranks(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.len()).collect()
    }

    fn entries_from(&self, subset: u32) -> Vec<&KoszulEntry> {
        let k = subset.count_ones() as usize;
        self.entries[k].iter().filter(|e| e.from == subset).collect()
    }

    /// `d∘d = 0`, symbolically in the deformation matrix.
    pub fn check_square_zero(&self) -> Result<(), KoszulError> {
        for k in 2..self.terms.len() {
            for &subset in &self.terms[k] {
                let mut sum: UnitCombination<(u32, Monomial)> = UnitCombination::zero();
                for first in self.entries_from(subset) {
                    for second in self.entries_from(first.to) {
                        // Right-module coefficients compose as
                        // (c' x_{j}) * (c x_{i}); normalize the word j,i.
                        let nf = self
                            .algebra
                            .normalize_word(&[second.removed, first.removed])
                            .expect("polynomial words never vanish");
                        let coeff = second.coeff.mul(&first.coeff).mul(&nf.coeff);
                        sum.push(coeff, (second.to, nf.monomial));
                    }
                }
                if !sum.is_zero() {
                    return Err(KoszulError::SquareNotZero { subset });
                }
            }
        }
        Ok(())
    }

    /// Contraction by the exterior generator `y_j` on the summand `subset`:
    /// the image summand and its unit coefficient, or `None` when `j` is not
    /// a member.
    pub fn lambda_action(&self, j: usize, subset: u32) -> Option<(u32, UnitScalar)> {
        let members = subset_members(subset);
        let s = members.iter().position(|&i| i == j)?;
        let mut coeff = if s % 2 == 0 {
            UnitScalar::one()
        } else {
            UnitScalar::minus_one()
        };
        for &i in &members {
            coeff = coeff.mul(self.algebra.theta.entry(j, i));
        }
        Some((subset & !(1 << j), coeff))
    }

    /// The contraction anticommutes with the differential:
    /// `d(y_j . e_I) + y_j . d(e_I) = 0` for every `j` and `I`, symbolically.
    pub fn check_contraction_compatible(&self) -> Result<(), KoszulError> {
        let n1 = self.algebra.generators();
        for k in 1..self.terms.len() {
            for &subset in &self.terms[k] {
                for j in 0..n1 {
                    let mut sum: UnitCombination<(u32, Monomial)> = UnitCombination::zero();
                    if let Some((mid, lam)) = self.lambda_action(j, subset) {
                        for e in self.entries_from(mid) {
                            let gen = Monomial::generator(n1, e.removed);
                            sum.push(lam.mul(&e.coeff), (e.to, gen));
                        }
                    }
                    for e in self.entries_from(subset) {
                        if let Some((to, lam)) = self.lambda_action(j, e.to) {
                            let gen = Monomial::generator(n1, e.removed);
                            sum.push(lam.mul(&e.coeff), (to, gen));
                        }
                    }
                    if !sum.is_zero() {
                        return Err(KoszulError::ContractionIncompatible { j, subset });
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of the graded piece of `d` from size-`k` summands to size-`k-1`
    /// summands in internal degree `degree`, over the rationals, after
    /// specializing formal parameters via `assignment`.
    fn graded_matrix(
        &self,
        k: usize,
        degree: i64,
        assignment: &BTreeMap<String, BigRational>,
    ) -> (RatMatrix, usize, usize) {
        let basis_of = |subsets: &[u32]| -> Vec<(u32, Monomial)> {
            let mut basis = Vec::new();
            for &subset in subsets {
                let internal = degree + self.shift(subset);
                for m in self.algebra.graded_basis(internal) {
                    basis.push((subset, m));
                }
            }
            basis
        };
        let source = basis_of(&self.terms[k]);
        let target = basis_of(&self.terms[k - 1]);
        let index: BTreeMap<&(u32, Monomial), usize> =
            target.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut mat = RatMatrix::zeros(target.len(), source.len());
        for (col, (subset, m)) in source.iter().enumerate() {
            for e in self.entries_from(*subset) {
                // e_I * m maps to e_{I\i_s} * (coeff x_{i_s}) * m.
                let mut word = vec![e.removed];
                word.extend(m.word());
                let nf = self
                    .algebra
                    .normalize_word(&word)
                    .expect("polynomial words never vanish");
                let coeff = e.coeff.mul(&nf.coeff);
                let value = coeff
                    .eval(assignment)
                    .expect("specialization covers all parameters");
                let row = index[&(e.to, nf.monomial)];
                mat[(row, col)] += value;
            }
        }
        (mat, source.len(), target.len())
    }

    /// Check that in every internal degree up to `degree_bound` the complex
    /// is exact except for a single one-dimensional class in internal degree
    /// zero at the augmentation end.  Formal parameters in the deformation
    /// matrix are specialized to distinct fresh primes.
    pub fn homology_check(&self, degree_bound: i64) -> KoszulHomologyReport {
        let assignment = fresh_prime_assignment(&self.algebra);
        let mut failures = Vec::new();
        let top = self.terms.len() - 1;
        for degree in 0..=degree_bound {
            // dims[k] and rank of d_k per homological position.
            let mut dims = vec![0usize; top + 1];
            for (k, subsets) in self.terms.iter().enumerate() {
                dims[k] = subsets
                    .iter()
                    .map(|&s| self.algebra.graded_dim(degree + self.shift(s)))
                    .sum();
            }
            let mut ranks = vec![0usize; top + 2];
            for k in 1..=top {
                let (mat, _, _) = self.graded_matrix(k, degree, &assignment);
                ranks[k] = mat.rank();
            }
            for k in 0..=top {
                let homology = dims[k] - ranks[k] - ranks[k + 1];
                let expected = if k == 0 && degree == 0 { 1 } else { 0 };
                if homology != expected {
                    failures.push(HomologyFailure {
                        position: k,
                        degree,
                        dim: homology,
                        expected,
                    });
                }
            }
        }
        KoszulHomologyReport {
            degree_bound,
            pass: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyFailure {
    pub position: usize,
    pub degree: i64,
    pub dim: usize,
    pub expected: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct KoszulHomologyReport {
    pub degree_bound: i64,
    pub pass: bool,
    pub failures: Vec<HomologyFailure>,
}

/// Assign distinct primes, fresh for the primes already present in the
/// deformation matrix, to every formal parameter.
fn fresh_prime_assignment(algebra: &GradedSkewAlgebra) -> BTreeMap<String, BigRational> {
    let mut used: Vec<u64> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let size = algebra.theta.size();
    for i in 0..size {
        for j in 0..size {
            let e = algebra.theta.entry(i, j);
            used.extend(e.primes().map(|(p, _)| p));
            for (t, _) in e.params() {
                if !names.contains(&t.to_string()) {
                    names.push(t.to_string());
                }
            }
        }
    }
    names.sort();
    let mut assignment = BTreeMap::new();
    let mut candidate = 2u64;
    for name in names {
        while used.contains(&candidate) || !is_prime(candidate) {
            candidate += 1;
        }
        assignment.insert(name, BigRational::from_integer(candidate.into()));
        candidate += 1;
    }
    assignment
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Sheaf cohomology dimension `dim H^p(O(k))` on the weighted projective
/// space with the given weights: the degree-`k` piece of the algebra for
/// `p = 0`, the dual top piece for `p = n`, zero otherwise.
pub fn cohomology_dim(algebra: &GradedSkewAlgebra, p: usize, k: i64) -> usize {
    let n = algebra.generators() - 1;
    let l = algebra.gorenstein_parameter() as i64;
    if p == 0 && k >= 0 {
        algebra.graded_dim(k)
    } else if p == n && k <= -l {
        algebra.graded_dim(-k - l)
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DeformationMatrix;
    use crate::scalar::UnitScalar;

    fn theta_generic(size: usize) -> DeformationMatrix {
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

    fn poly(weights: Vec<u32>) -> GradedSkewAlgebra {
        let size = weights.len();
        GradedSkewAlgebra::polynomial(weights, theta_generic(size)).unwrap()
    }

    #[test]
    fn builds_with_binomial_ranks_and_square_zero() {
        let k = koszul_build(&poly(vec![1, 1, 1])).unwrap();
        assert_eq!(k.term_ranks(), vec![1, 3, 3, 1]);
        // Rightmost shift is minus the Gorenstein parameter.
        assert_eq!(k.shift(0b111), -3);
        let k2 = koszul_build(&poly(vec![1, 1, 2])).unwrap();
        assert_eq!(k2.shift(0b111), -4);
    }

    #[test]
    fn contraction_rules() {
        let k = koszul_build(&poly(vec![1, 1, 1])).unwrap();
        // j not a member: zero.
        assert!(k.lambda_action(2, 0b011).is_none());
        // Singleton {j}: coefficient is the diagonal entry t_jj (here 1),
        // with positive sign.
        let (to, coeff) = k.lambda_action(1, 0b010).unwrap();
        assert_eq!(to, 0);
        assert_eq!(coeff, k.algebra.theta.entry(1, 1).clone());
        assert!(coeff.is_one());
        k.check_contraction_compatible().unwrap();
        let k2 = koszul_build(&poly(vec![1, 2, 3])).unwrap();
        k2.check_contraction_compatible().unwrap();
    }

    #[test]
    fn corrupted_differential_is_rejected() {
        let mut k = koszul_build(&poly(vec![1, 1, 2])).unwrap();
        k.entries[2][0].coeff = k.entries[2][0].coeff.mul(&UnitScalar::from_integer(3));
        assert!(matches!(
            k.check_square_zero(),
            Err(KoszulError::SquareNotZero { .. })
        ));
    }

    #[test]
    fn resolution_of_the_ground_field() {
        let report = koszul_build(&poly(vec![1, 1, 1])).unwrap().homology_check(6);
        assert!(report.pass, "failures: {:?}", report.failures);
        let report = koszul_build(&poly(vec![1, 2, 3])).unwrap().homology_check(8);
        assert!(report.pass, "failures: {:?}", report.failures);
    }

    #[test]
    fn cohomology_table() {
        let s = poly(vec![1, 1, 1]);
        // H^2(O(-3)) is one-dimensional; H^1 always vanishes; negative
        // twists have no sections.
        assert_eq!(cohomology_dim(&s, 2, -3), 1);
        assert_eq!(cohomology_dim(&s, 1, 5), 0);
        assert_eq!(cohomology_dim(&s, 1, -5), 0);
        assert_eq!(cohomology_dim(&s, 0, -1), 0);
        assert_eq!(cohomology_dim(&s, 0, 2), 6);
    }
}
