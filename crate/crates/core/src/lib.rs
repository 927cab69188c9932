//! Fully subtractive expansions, connecting thickness and dual-substitution
//! patterns of arithmetical discrete planes, in exact arithmetic.

pub mod exactnum;
pub mod fsalgo;
pub mod linalg;
pub mod planes;
pub mod stepped;
pub mod covering;
pub mod generation;
pub mod decision;
pub mod suites;
