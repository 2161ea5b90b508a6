//! Locally harmonic Maass forms of positive non-square discriminant.
//!
//! For an integer `k > 1` and a non-square discriminant `D > 0`, the crate
//! evaluates the weight `2k` cusp form `f_{k,D}` (a sum of
//! `Q(tau,1)^{-k}` over integral binary quadratic forms of discriminant
//! `D`) and its weight `2-2k` locally harmonic companion `F_{1-k,D}`, whose
//! wall-crossing discontinuities live on the geodesics
//! `S_Q : a|tau|^2 + bx + c = 0`. On top of the two evaluators sit the wall
//! geometry (component signatures, local polynomials, the constants of the
//! cusp component, jump predictions), Fourier coefficients and Eichler
//! integrals, period polynomials with the rationality congruence, Hecke
//! operators, and a check harness that verifies each of these numerical
//! identities against declared error budgets.
//!
//! Everything is plain `f64`; every truncated quantity carries an explicit
//! tail estimate. All public entry points are pure functions (a
//! lock-protected residue-list cache is the only shared state), safe for
//! concurrent use.

pub mod core;
pub mod hecke;
pub mod modeval;
pub mod periods;
pub mod qforms;
pub mod special;
pub mod verify;
pub mod walls;

pub use crate::core::{
    cocycle, fundamental_factor, kronecker, moebius, pell_fundamental, poly_mod_reduce, sigma,
    CPoly, Discriminant, Error, EvalParams, Mat2, PellSolution, Point, Result,
};
pub use crate::modeval::{
    eichler_holo, eichler_nonholo, eichler_nonholo_series, eval_f_maass, eval_f_maass_class,
    eval_fkd, eval_fkda, fourier_coeffs, params_for, CoeffSeries, Evaluation,
};
pub use crate::qforms::{
    equivalent, forms_a_neg_c_pos, forms_truncated, interior_forms, matrix_aq, narrow_class_reps,
    reduce_cycle, ComponentSignature, NarrowClass, QForm,
};
pub use crate::special::{beta_complete, dirichlet_l, phi, psi, upper_incomplete_gamma, zagier_zeta_check, zeta};
