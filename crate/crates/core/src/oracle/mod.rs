//! Exact-arithmetic reference implementations certifying the p-adic
//! engine: cyclotomic rationals, Bernoulli machinery over Q, exact cone
//! series derivatives, and the commutation test for the variable-merging
//! operator. Everything here is exact rationals; none of the modular
//! code paths of the main engine are shared.

mod bernoulli;
mod cone_series;
mod exact;
mod omega;

pub use bernoulli::{bernoulli_number, bernoulli_polynomial, classical_l_value, hurwitz_partial_zeta};
pub use cone_series::{
    exact_b_recurrence, exact_b_value, exact_cone_series_value, exact_twisted_partial_zeta_q,
    ExactAux,
};
pub use exact::{reduce_rational_mod, ExactCyc, ExactCycRing};
pub use omega::{
    delta_multi, delta_one, omega, omega_commutation_check, omega_monomial_divisible, MultiPoly,
};
