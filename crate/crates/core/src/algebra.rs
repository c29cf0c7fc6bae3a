//! Skew graded polynomial and exterior algebras with unit coefficients.
//!
//! `S(a_0,..,a_n)` is the polynomial algebra on generators `x_i` of weight
//! `a_i` with relations `t_ij x_i x_j = t_ji x_j x_i`, where `t` is an
//! invertible deformation matrix.  The exterior variant has relations
//! `t_ij y_i y_j + t_ji y_j y_i = 0` and `y_i^2 = 0`, with generators in
//! cohomological degree 1 and internal degree `-a_i`.  Every word has a
//! unique normal form `c * x_{i_1}...x_{i_k}` with ascending indices,
//! obtained by bubble-sorting adjacent transpositions; only the ratios
//! `t_ij / t_ji` ever enter a normal form.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::UnitScalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("deformation matrix must be {expected}x{expected}, got {got}x{got}")]
    MatrixSize { expected: usize, got: usize },
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("weights {0:?} have gcd {1} != 1")]
    WeightsNotCoprime(Vec<u32>, u32),
    #[error("generator index {0} out of range (n+1 = {1})")]
    GeneratorOutOfRange(usize, usize),
}

/// Square matrix of unit scalars deforming the commutation relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeformationMatrix {
    entries: Vec<Vec<UnitScalar>>,
}

impl DeformationMatrix {
    pub fn identity(size: usize) -> Self {
        assert!(size >= 2);
        DeformationMatrix {
            entries: vec![vec![UnitScalar::one(); size]; size],
        }
    }

    pub fn new(entries: Vec<Vec<UnitScalar>>) -> Result<Self, AlgebraError> {
        let size = entries.len();
        if size < 2 || entries.iter().any(|row| row.len() != size) {
            return Err(AlgebraError::MatrixSize {
                expected: size.max(2),
                got: entries.iter().map(|r| r.len()).max().unwrap_or(0),
            });
        }
        Ok(DeformationMatrix { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &UnitScalar {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: UnitScalar) {
        self.entries[i][j] = value;
    }

    /// The antisymmetrized ratio `t_ij / t_ji`; the algebra depends on the
    /// matrix only through these.
    pub fn ratio(&self, i: usize, j: usize) -> UnitScalar {
        self.entries[i][j].div(&self.entries[j][i])
    }

    /// Matrix of all ratios `t_ij / t_ji`.
    pub fn antisymmetrized(&self) -> DeformationMatrix {
        let size = self.size();
        let mut entries = vec![vec![UnitScalar::one(); size]; size];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.ratio(i, j);
            }
        }
        DeformationMatrix { entries }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AlgebraKind {
    Polynomial,
    Exterior,
}

/// Skew polynomial algebra `S(a_0..a_n)` or skew exterior algebra on the
/// same weights.
#[derive(Clone, Debug, Serialize)]
pub struct GradedSkewAlgebra {
    pub weights: Vec<u32>,
    pub theta: DeformationMatrix,
    pub kind: AlgebraKind,
}

/// Monomial as an exponent vector over the generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn unit(width: usize) -> Self {
        Monomial {
            exponents: vec![0; width],
        }
    }

    pub fn generator(width: usize, index: usize) -> Self {
        let mut m = Monomial::unit(width);
        m.exponents[index] = 1;
        m
    }

    pub fn from_subset(width: usize, subset: u32) -> Self {
        let mut m = Monomial::unit(width);
        for i in 0..width {
            if subset & (1 << i) != 0 {
                m.exponents[i] = 1;
            }
        }
        m
    }

    pub fn total_degree(&self, weights: &[u32]) -> i64 {
        self.exponents
            .iter()
            .zip(weights)
            .map(|(&e, &a)| e as i64 * a as i64)
            .sum()
    }

    pub fn is_unit(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Word of generator indices in ascending order.
    pub fn word(&self) -> Vec<usize> {
        let mut w = Vec::new();
        for (i, &e) in self.exponents.iter().enumerate() {
            for _ in 0..e {
                w.push(i);
            }
        }
        w
    }

    pub fn name(&self, kind: AlgebraKind) -> String {
        if self.is_unit() {
            return "1".to_string();
        }
        let letter = match kind {
            AlgebraKind::Polynomial => 'x',
            AlgebraKind::Exterior => 'y',
        };
        let mut parts = Vec::new();
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 1 {
                parts.push(format!("{letter}{i}"));
            } else if e > 1 {
                parts.push(format!("{letter}{i}^{e}"));
            }
        }
        parts.join("*")
    }
}

/// Monomial with a unit coefficient, the general nonzero normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledMonomial {
    pub coeff: UnitScalar,
    pub monomial: Monomial,
}

impl GradedSkewAlgebra {
    pub fn polynomial(weights: Vec<u32>, theta: DeformationMatrix) -> Result<Self, AlgebraError> {
        Self::new(weights, theta, AlgebraKind::Polynomial)
    }

    pub fn exterior(weights: Vec<u32>, theta: DeformationMatrix) -> Result<Self, AlgebraError> {
        Self::new(weights, theta, AlgebraKind::Exterior)
    }

    fn new(
        weights: Vec<u32>,
        theta: DeformationMatrix,
        kind: AlgebraKind,
    ) -> Result<Self, AlgebraError> {
        if weights.contains(&0) {
            return Err(AlgebraError::NonPositiveWeight);
        }
        if theta.size() != weights.len() {
            return Err(AlgebraError::MatrixSize {
                expected: weights.len(),
                got: theta.size(),
            });
        }
        Ok(GradedSkewAlgebra {
            weights,
            theta,
            kind,
        })
    }

    /// Number of generators.
    pub fn generators(&self) -> usize {
        self.weights.len()
    }

    /// The Gorenstein parameter: the sum of the weights.
    pub fn gorenstein_parameter(&self) -> u32 {
        self.weights.iter().sum()
    }

    /// Validate gcd of the weights is 1, required by the line/plane pipelines.
    pub fn require_coprime(&self) -> Result<(), AlgebraError> {
        let g = self.weights.iter().fold(0u32, |acc, &a| gcd(acc, a));
        if g != 1 {
            return Err(AlgebraError::WeightsNotCoprime(self.weights.clone(), g));
        }
        Ok(())
    }

    /// Normal form of a word of generator indices: `Some((c, m))` with the
    /// indices of `m` ascending, or `None` when the word is zero (a repeated
    /// generator in the exterior algebra).
    pub fn normalize_word(&self, word: &[usize]) -> Option<ScaledMonomial> {
        for &i in word {
            assert!(i < self.generators(), "generator index out of range");
        }
        let mut w = word.to_vec();
        let mut coeff = UnitScalar::one();
        // Bubble sort; each adjacent swap x_j x_i -> x_i x_j (j > i)
        // contributes the unit t_ij / t_ji, with an extra sign for the
        // exterior algebra.
        loop {
            let mut swapped = false;
            for k in 0..w.len().saturating_sub(1) {
                let (lo, hi) = (w[k + 1], w[k]);
                if hi > lo {
                    coeff = coeff.mul(&self.theta.ratio(lo, hi));
                    if self.kind == AlgebraKind::Exterior {
                        coeff = coeff.neg();
                    }
                    w.swap(k, k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        if self.kind == AlgebraKind::Exterior {
            for k in 0..w.len().saturating_sub(1) {
                if w[k] == w[k + 1] {
                    return None;
                }
            }
        }
        let mut exponents = vec![0u32; self.generators()];
        for &i in &w {
            exponents[i] += 1;
        }
        Some(ScaledMonomial {
            coeff,
            monomial: Monomial { exponents },
        })
    }

    /// Product of two scaled monomials in normal form.
    pub fn multiply(&self, a: &ScaledMonomial, b: &ScaledMonomial) -> Option<ScaledMonomial> {
        let mut word = a.monomial.word();
        word.extend(b.monomial.word());
        let normal = self.normalize_word(&word)?;
        Some(ScaledMonomial {
            coeff: a.coeff.mul(&b.coeff).mul(&normal.coeff),
            monomial: normal.monomial,
        })
    }

    /// Dimension of the graded piece in internal degree `k`.  Polynomial
    /// generators have internal degree `+a_i`, exterior generators `-a_i`.
    pub fn graded_dim(&self, k: i64) -> usize {
        self.graded_basis(k).len()
    }

    /// Monomial basis of the graded piece in internal degree `k`, in
    /// ascending exponent order.
    pub fn graded_basis(&self, k: i64) -> Vec<Monomial> {
        match self.kind {
            AlgebraKind::Polynomial => {
                if k < 0 {
                    return Vec::new();
                }
                let mut out = Vec::new();
                let mut exps = vec![0u32; self.generators()];
                self.enumerate_poly(k, 0, &mut exps, &mut out);
                out.sort();
                out
            }
            AlgebraKind::Exterior => {
                if k > 0 {
                    return Vec::new();
                }
                let target = (-k) as u64;
                let n1 = self.generators();
                let mut out = Vec::new();
                for subset in 0u32..(1 << n1) {
                    let weight: u64 = (0..n1)
                        .filter(|&i| subset & (1 << i) != 0)
                        .map(|i| self.weights[i] as u64)
                        .sum();
                    if weight == target {
                        out.push(Monomial::from_subset(n1, subset));
                    }
                }
                out.sort();
                out
            }
        }
    }

    fn enumerate_poly(&self, remaining: i64, index: usize, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if index == self.generators() {
            if remaining == 0 {
                out.push(Monomial {
                    exponents: exps.clone(),
                });
            }
            return;
        }
        let a = self.weights[index] as i64;
        let max = remaining / a;
        for e in 0..=max {
            exps[index] = e as u32;
            self.enumerate_poly(remaining - e * a, index + 1, exps, out);
        }
        exps[index] = 0;
    }

    /// Specialize every formal parameter appearing in the deformation matrix
    /// to an exact rational; entries with no parameters are unchanged.
    pub fn specialize(
        &self,
        assignment: &BTreeMap<String, BigRational>,
    ) -> Option<GradedSkewAlgebra> {
        let size = self.theta.size();
        let mut entries = vec![vec![UnitScalar::one(); size]; size];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let value = self.theta.entry(i, j).eval(assignment)?;
                *e = UnitScalar::from_big_rational(&value);
            }
        }
        Some(GradedSkewAlgebra {
            weights: self.weights.clone(),
            theta: DeformationMatrix { entries },
            kind: self.kind,
        })
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// gcd(a, b, c, ...) over a slice.
pub fn gcd_all(values: &[u32]) -> u32 {
    values.iter().fold(0, |acc, &v| gcd(acc, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

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

    #[test]
    fn normalize_transposition() {
        let alg =
            GradedSkewAlgebra::polynomial(vec![1, 1, 1], theta_generic(3)).unwrap();
        // x1 * x0 = (t01/t10) x0 x1
        let nf = alg.normalize_word(&[1, 0]).unwrap();
        assert_eq!(nf.coeff, alg.theta.ratio(0, 1));
        assert_eq!(nf.monomial.word(), vec![0, 1]);
        // Empty word is the unit.
        let one = alg.normalize_word(&[]).unwrap();
        assert!(one.coeff.is_one());
        assert!(one.monomial.is_unit());
    }

    #[test]
    fn exterior_square_is_zero() {
        let alg = GradedSkewAlgebra::exterior(vec![1, 2], theta_generic(2)).unwrap();
        assert!(alg.normalize_word(&[0, 0]).is_none());
        assert!(alg.normalize_word(&[1, 0, 1]).is_none());
        let nf = alg.normalize_word(&[1, 0]).unwrap();
        assert_eq!(nf.coeff, alg.theta.ratio(0, 1).neg());
    }

    #[test]
    fn graded_dims() {
        let s111 = GradedSkewAlgebra::polynomial(vec![1, 1, 1], DeformationMatrix::identity(3))
            .unwrap();
        assert_eq!(s111.graded_dim(1), 3);
        assert_eq!(s111.graded_dim(0), 1);
        assert_eq!(s111.graded_dim(-1), 0);
        let s123 = GradedSkewAlgebra::polynomial(vec![1, 2, 3], DeformationMatrix::identity(3))
            .unwrap();
        // Degree 3: (3,0,0), (1,1,0), (0,0,1).
        assert_eq!(s123.graded_dim(3), 3);
        let ext = GradedSkewAlgebra::exterior(vec![1, 2, 3], DeformationMatrix::identity(3))
            .unwrap();
        let total: usize = (-7..=0).map(|k| ext.graded_dim(k)).sum();
        assert_eq!(total, 8);
        assert_eq!(ext.graded_dim(-3), 2); // {x2}, {x0,x1}
    }

    #[test]
    fn only_ratios_matter() {
        // Two matrices with the same antisymmetrization give identical
        // normal forms.
        let mut t1 = DeformationMatrix::identity(3);
        t1.set(0, 1, UnitScalar::from_integer(6));
        t1.set(1, 0, UnitScalar::from_integer(3));
        let mut t2 = DeformationMatrix::identity(3);
        t2.set(0, 1, UnitScalar::from_integer(2));
        assert_eq!(t1.antisymmetrized(), t2.antisymmetrized());
        let a1 = GradedSkewAlgebra::polynomial(vec![1, 1, 2], t1).unwrap();
        let a2 = GradedSkewAlgebra::polynomial(vec![1, 1, 2], t2).unwrap();
        for word in [vec![1usize, 0], vec![2, 1, 0], vec![1, 2, 0, 1]] {
            assert_eq!(a1.normalize_word(&word), a2.normalize_word(&word));
        }
    }

    proptest! {
        #[test]
        fn normalization_is_associative(word in proptest::collection::vec(0usize..3, 0..8), cut in 0usize..8) {
            let alg = GradedSkewAlgebra::polynomial(vec![1, 2, 3], theta_generic(3)).unwrap();
            let cut = cut.min(word.len());
            let (w1, w2) = word.split_at(cut);
            let full = alg.normalize_word(&word).unwrap();
            let left = alg.normalize_word(w1).unwrap();
            let right = alg.normalize_word(w2).unwrap();
            let product = alg.multiply(&left, &right).unwrap();
            prop_assert_eq!(full, product);
        }

        #[test]
        fn graded_dim_independent_of_theta(k in 0i64..20) {
            let flat = GradedSkewAlgebra::polynomial(vec![1, 2, 3], DeformationMatrix::identity(3)).unwrap();
            let skew = GradedSkewAlgebra::polynomial(vec![1, 2, 3], theta_generic(3)).unwrap();
            prop_assert_eq!(flat.graded_dim(k), skew.graded_dim(k));
        }
    }
}
