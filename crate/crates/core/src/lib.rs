//! Workbench for homological mirror symmetry of weighted projective lines and
//! planes and their noncommutative deformations.
//!
//! The B-side lives in [`algebra`], [`koszul`] and [`bside`]: skew graded
//! polynomial and exterior algebras with unit coefficients, the Koszul
//! resolution of the ground field, and the finite directed categories of the
//! standard exceptional collection and its dual.  The A-side lives in
//! [`cover`] and [`fukaya`]: a combinatorial branched-cover model of the
//! superpotential fiber, its lifted vanishing cycles, exact intersection
//! tables, gradings, triangle enumeration by left-turn walks, and the
//! resulting directed category with its deformation invariant.  The two sides
//! are compared up to rescaling of generators by the integer gauge solver in
//! [`dgcat`].  [`mutation`] implements complexes of projectives, mapping
//! cones and mutations of exceptional collections.  [`numlab`] cross-checks
//! the combinatorics against floating-point root tracking.

pub mod algebra;
pub mod bside;
pub mod checks;
pub mod cover;
pub mod dgcat;
pub mod fukaya;
pub mod intlin;
pub mod koszul;
pub mod linalg;
pub mod mutation;
pub mod numlab;
pub mod rng;
pub mod scalar;
