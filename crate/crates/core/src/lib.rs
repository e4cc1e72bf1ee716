//! Uniform finite generation of compact matrix Lie groups.
//!
//! Given Lie-algebra generators `X_1..X_m`, this crate
//!
//! * tests whether they generate the algebra ([`algebra`]),
//! * completes them to a basis using only adjoint conjugations, tracking the
//!   conjugation words and the worst-case word-length ledger ([`completion`]),
//! * inverts the coordinates-of-the-second-kind chart near the identity and
//!   rewrites the result over the original generators ([`chart`]),
//! * covers the whole group with a finite ε-net of words and synthesizes any
//!   element as a word of uniformly bounded length ([`net`]),
//! * converts words into nonnegative-time words using the recurrence of
//!   one-parameter subgroups ([`lift`]).
//!
//! Every word in the crate is checked by [`word::replay`].

pub mod algebra;
pub mod chart;
pub mod cli;
pub mod completion;
pub mod demos;
pub mod error;
pub mod io;
pub mod lift;
pub mod matrix;
pub mod net;
pub mod word;

pub use algebra::{bracket, bracket_closure, in_span, is_generating, AlgebraBasis, ClosureConfig, GeneratorSet};
pub use chart::{chart_forward, chart_jacobian, chart_solve, substitute_conjugations, ChartCoordinates, SolverConfig};
pub use completion::{
    complete_basis, exp_factor_count, expand_word, rk_schedule, CompletedBasis, CompletionConfig, ConjugationWord,
    RkSchedule,
};
pub use error::{Error, Result};
pub use lift::{lift_word_nonneg, nonneg_synthesize, reverse_time_approx, NonnegWord, RecurrenceConfig, ReverseApprox};
pub use matrix::{
    adjoint_conjugate, expm, frobenius_inner, gram_rank, group_distance, logm_principal, AlgebraElement, GroupElement,
    GroupKind, Matrix, Structure, Tolerances,
};
pub use net::{build_net, haar_random, synthesize, CoverNet, NetConfig, SynthesisResult};
pub use word::{replay, GeneratorWord, Letter};
