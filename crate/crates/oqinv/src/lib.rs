//! Exact regular-isotopy invariants of oriented knots, links and tangles.
//!
//! The library computes invariants valued in the ring of integer Laurent
//! polynomials in `q` from matrix solutions of the Yang-Baxter equation
//! equipped with a pair of commuting background matrices.  Three independent
//! evaluation engines are provided and cross-validated:
//!
//! * [`evaluator`] - a tensor-network (transfer matrix) contraction of Morse
//!   diagrams against the orientation-specific cup/cap/crossing matrices;
//! * [`statesum`] - a combinatorial expansion of crossings into constrained
//!   flat states, summed over admissible labellings;
//! * [`beads`] - a normal form for one-component diagrams as a curl count
//!   plus a word of crossing signifiers, evaluated by a trace formula.

pub mod laurent;
pub mod diagram;
pub mod oqa;
pub mod homfly;
pub mod evaluator;
pub mod statesum;
pub mod beads;
pub mod cli;
