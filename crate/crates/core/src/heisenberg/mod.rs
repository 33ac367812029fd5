//! The rank-one Heisenberg VOA: round-bracket states, the square-bracket
//! operators `h[-2]`, `h[-3]`, characters by pair partitions, and the
//! pre-images `v_{n,m}` of Serre's sequence under the character map.

pub mod bracket;
pub mod character;
pub mod preimage;
pub mod sigma;
pub mod state;

pub use bracket::{
    alpha_closed_form, alpha_state, apply_bracket, beta_state, BracketKind, BracketOp,
};
pub use character::{
    alpha_square, beta_square, character_mt, character_of, pair_partitions, PairPartition,
    SquareBracketCombination,
};
pub use preimage::{
    cauchy_report, certify_cell, overconvergence_certificate, steps_strictly_increasing, v_sigma,
    v_square, v_state, CauchyRow, CertificateCell,
};
pub use sigma::SigmaPoly;
pub use state::{state_axpy, state_mul, state_val2, HeisenbergState, Monomial, StateTermJson};
