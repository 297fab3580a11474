//! Approximate Nash equilibria of N-player general-sum normal-form games.
//!
//! The main solver, [`solve_nashd_gd`], runs gradient descent on NashD, the
//! sum over players of best-response gain, with strategies parameterized by
//! softmax. Fictitious play and regret matching are provided as baselines,
//! along with seeded game generators, Gambit `.nfg` interchange and a
//! benchmark harness that writes CSV tables.
//!
//! ```
//! use nashd_core::{fixtures, solve_nashd_gd, GdConfig};
//!
//! let trace = solve_nashd_gd(&fixtures::matching_pennies(), &GdConfig::default()).unwrap();
//! assert!(trace.epsilon() <= 0.01);
//! ```

pub mod baselines;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod game;
pub mod generators;
pub mod nfg;
pub mod rng;
pub mod solver;
mod tensor;

pub use baselines::{solve_fictitious_play, solve_regret_matching, PlayConfig, PlayRecord, PlayTrace};
pub use error::GameError;
pub use experiment::{Algorithm, BenchPlan, BenchRecord, RunSettings, SummaryRow};
pub use game::{
    deviation_payoffs, epsilon, expected_utility, normalize, pure_payoff, NormalFormGame, PureProfile,
    StrategyProfile,
};
pub use generators::{GameClass, GameSpec};
pub use nfg::{parse_nfg, serialize_nfg, NfgDocument, NfgError};
pub use solver::{
    lipschitz_bound, nashd, nashd_subgradient, softmax, solve_nashd_gd, zero_sum_extend, GdConfig, IterRecord,
    LogitProfile, ReportMode, SolveTrace,
};
