//! Exact-arithmetic laboratory for tree-forcing combinatorics.
//!
//! Everything here computes with exact integers and rationals: norm
//! comparisons are integer power inequalities, measures are `BigRational`
//! values, and approximate quantities (base-2 logarithms, square roots)
//! are certified enclosures rather than floats.
//!
//! Module map:
//! - [`rational`]: canonical `p/q` parsing, formatting, and serde adapters
//! - [`log2`]: certified dyadic enclosures of base-2 logarithms
//! - [`params`]: the recursive parameter tower and its identities
//! - [`creature`]: finite branching spaces, norms, conditions, refinements
//! - [`randomtree`]: clopen binary-tree conditions and their measures
//! - [`fam`]: finite measure assignments and approximate supports
//! - [`famlimit`]: interval limits of condition families
//! - [`probtree`]: probability trees, binomial bounds, step kernels
//! - [`deltasys`]: labeled supports, delta-system extraction, guardrails
//! - [`cichon`]: rank assignments for the diagram of ten and its arrows
//! - [`suites`]: seeded verification suites shared by tests and the CLI

pub mod cichon;
pub mod creature;
pub mod deltasys;
pub mod fam;
pub mod famlimit;
pub mod log2;
pub mod params;
pub mod probtree;
pub mod randomtree;
pub mod rational;
pub mod suites;






