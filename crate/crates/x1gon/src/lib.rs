//! Exact arithmetic on the modular curves X1(N).
//!
//! The crate is organised as a pipeline:
//!
//! * [`exactalg`] — exact field/polynomial/matrix arithmetic: rationals,
//!   prime fields, iterated extension towers, univariate and sparse
//!   multivariate polynomials, factorization, resultants and Smith normal
//!   form.
//! * [`modeq`] — the Tate normal form of an elliptic curve with a marked
//!   point, the defining polynomials `F_N(b,c)` of X1(N), the optimized
//!   plane models in `(x, y)` coordinates and the modular units `f_k`.
//! * [`puiseux`] — places of a plane curve above a point: branch expansions
//!   computed by iterated blowups with exact coefficient towers, and
//!   valuations of rational functions at those places.
//! * [`cusps`] — the cusps of X1(N): orbits, canonical labels, the table of
//!   cuspidal divisors of the modular units, diamond operators, and the
//!   expression of a cuspidal divisor as a product of units.
//! * [`lattice`] — exact lattice reduction (LLL), short-vector enumeration,
//!   and the randomized search for low-degree modular units; cuspidal class
//!   group invariants.
//! * [`gonality`] — upper and lower bounds for the gonality of X1(N):
//!   index formulas, analytic lower bounds, point counts over finite
//!   fields, degree censuses and the lower-bound proof planner.
//! * [`cli`] — configuration, caching and the command line driver used by
//!   the `x1gon` binary.

pub mod cli;
pub mod cusps;
pub mod exactalg;
pub mod gonality;
pub mod lattice;
pub mod modeq;
pub mod puiseux;
