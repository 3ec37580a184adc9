//! Power series in pi = [eps] - 1 over Q_p with the Frobenius and gamma
//! substitutions, nabla operators, and the rank-two Wach-module family.

pub mod nabla;
pub mod series;
pub mod wach;

pub use nabla::{
    nabla_relations_verify, nabla_twist_factors, pi_bracket, t_bracket, t_monomial, NablaKind, NablaOperator,
    Normalization, PiBracket, PiContext, TBracket, TContext,
};
pub use series::{binomial_shift, gamma_sub, padic_balanced, phi_sub, ps_arith, q_element, ArithOp, PiSeries};
pub use wach::{
    expected_filtration_step, matrix_to_text, reduction_report, vector_to_text, wach_build, wach_filtration,
    wach_homlie_actions, wach_reduce, ActionRow, ActionTable, FilStep, FiltrationRow, GammaRoute, PhiGammaModule,
    SeriesMatrix, WachFamilySpec, WachModule,
};
