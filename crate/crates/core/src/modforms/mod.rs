//! Level-one and Γ₀(p) forms as q-series, the Ramanujan–Serre derivative,
//! and exact polynomial algebra in the Eisenstein generators.

pub mod poly;
pub mod series;

pub use poly::{
    dim_modular, eval_poly, monomials_of_weight, sym_serre, sym_theta, to_eisenstein_basis, Basis,
    Exponents, ModularPoly, ModularPolyJson,
};
pub use series::{
    delta, e2, e4, e6, e_star, eisenstein, eisenstein_memo_entries, eta_quotient, g_over_e,
    lambda_hauptmodul, script_e4, seed_eisenstein, serre_derivative, serre_derivative_iter,
    EisensteinVariant, HAUPTMODUL_PRIMES,
};
