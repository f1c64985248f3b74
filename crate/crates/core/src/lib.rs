//! Numerical toolkit for one-parameter semigroups of holomorphic self-maps of
//! the unit disk, generated by `du/dt + f(u) = 0`.

// `!(x < y)` is used on purpose so that NaN fails domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod cli;
pub mod commute;
pub mod expr;
pub mod flow;
pub mod koenigs;

pub use num_complex::Complex64;
