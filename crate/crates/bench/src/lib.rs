//! Fixed workloads shared by the criterion benches.

use nashd_core::generators::random_game;
use nashd_core::rng::seeded;
use nashd_core::{LogitProfile, NormalFormGame, StrategyProfile};

/// Sizes timed by the benches, as (players, actions).
pub const SIZES: [(usize, usize); 4] = [(2, 10), (3, 10), (4, 6), (5, 4)];

pub fn game(players: usize, actions: usize) -> NormalFormGame {
    random_game(players, actions, 17).expect("bench sizes fit")
}

/// A fully mixed profile drawn through softmax of normal logits.
pub fn interior_profile(game: &NormalFormGame) -> StrategyProfile {
    LogitProfile::random(game, &mut seeded(23)).to_profile()
}

pub fn label(players: usize, actions: usize) -> String {
    format!("{players}p{actions}a")
}
