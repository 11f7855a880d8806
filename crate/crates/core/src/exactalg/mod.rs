//! Exact rational, polynomial and integer-lattice arithmetic.

pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod rational;

pub use matrix::{hermite_rows, int_kernel, int_solve, IntMatrix};
pub use poly::{poly_inverse_mod, IntPolynomial, RatPolynomial};
pub use ratfunc::RationalFunction;
pub use rational::{int, parse_rational, rat, Rational};
