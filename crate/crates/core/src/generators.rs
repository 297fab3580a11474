//! Seeded generators for the benchmark game classes.
//!
//! All randomness comes from [`crate::rng::seeded`]. Draws happen in a fixed
//! order documented on each constructor, so a `(class, players, actions,
//! seed)` tuple names one game on every platform.
//!
//! The closed forms:
//!
//! * `random`: every payoff i.i.d. Uniform[0, 1), drawn player by player and
//!   within a player in internal layout order.
//! * `prisoners_dilemma_n`: two actions (0 = cooperate, 1 = defect). With `k`
//!   other players cooperating, `u_i = k / (n - 1) - 0.4 * [i cooperates]`,
//!   then normalized. Defection is strictly dominant.
//! * `majority_voting`: private values `v_i(j) ~ Uniform[0, 1)` drawn player
//!   by player; the alternative with the most votes wins (lowest index on
//!   ties) and `u_i = v_i(winner)`.
//! * `congestion`: actions are facilities with linear cost `a_j * load`,
//!   `a_j ~ 0.1 + 0.9 * Uniform[0, 1)`. `u_i = 1 - cost / c_max` where
//!   `c_max = n * max_j a_j`, clamped to `[0, 1]`.
//! * `coordination`: `u_i = 1` when every player picks the same action,
//!   else 0.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{GameError, Result};
use crate::game::{self, NormalFormGame, MAX_PAYOFF_ENTRIES};
use crate::rng;

const PD_BENEFIT: f64 = 1.0;
const PD_COST: f64 = 0.4;
pub const PD_MAX_PLAYERS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameClass {
    Random,
    PrisonersDilemmaN,
    MajorityVoting,
    Congestion,
    Coordination,
}

impl GameClass {
    pub const ALL: [GameClass; 5] = [
        GameClass::Random,
        GameClass::PrisonersDilemmaN,
        GameClass::MajorityVoting,
        GameClass::Congestion,
        GameClass::Coordination,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GameClass::Random => "random",
            GameClass::PrisonersDilemmaN => "prisoners_dilemma_n",
            GameClass::MajorityVoting => "majority_voting",
            GameClass::Congestion => "congestion",
            GameClass::Coordination => "coordination",
        }
    }

    /// Whether generated instances depend on the seed.
    pub fn is_seeded(self) -> bool {
        matches!(
            self,
            GameClass::Random | GameClass::MajorityVoting | GameClass::Congestion
        )
    }
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GameClass {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        GameClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                GameError::Range(format!(
                    "unknown game class {s:?}; expected one of random, prisoners_dilemma_n, \
                     majority_voting, congestion, coordination"
                ))
            })
    }
}

/// A fully specified generated game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameSpec {
    pub class: GameClass,
    pub num_players: usize,
    pub actions_per_player: usize,
    pub seed: u64,
}

impl GameSpec {
    pub fn new(class: GameClass, num_players: usize, actions_per_player: usize, seed: u64) -> Self {
        let actions_per_player = match class {
            GameClass::PrisonersDilemmaN => 2,
            _ => actions_per_player,
        };
        Self {
            class,
            num_players,
            actions_per_player,
            seed,
        }
    }

    pub fn build(&self) -> Result<NormalFormGame> {
        let (n, m, seed) = (self.num_players, self.actions_per_player, self.seed);
        match self.class {
            GameClass::Random => random_game(n, m, seed),
            GameClass::PrisonersDilemmaN => prisoners_dilemma_n(n),
            GameClass::MajorityVoting => majority_voting(n, m, seed),
            GameClass::Congestion => congestion_game(n, m, seed),
            GameClass::Coordination => coordination_game(n, m),
        }
    }
}

fn check_capacity(n: usize, m: usize) -> Result<()> {
    let entries = (m as u128)
        .checked_pow(n as u32)
        .map(|p| p.saturating_mul(n as u128))
        .unwrap_or(u128::MAX);
    if entries > MAX_PAYOFF_ENTRIES {
        return Err(GameError::Capacity {
            entries,
            limit: MAX_PAYOFF_ENTRIES,
        });
    }
    Ok(())
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(GameError::Range(msg()))
    }
}

/// Uniform[0, 1) payoffs for `n` players with `m` actions each.
pub fn random_game(n: usize, m: usize, seed: u64) -> Result<NormalFormGame> {
    require(n >= 1 && m >= 2, || format!("random game needs n >= 1 and m >= 2, got n={n} m={m}"))?;
    check_capacity(n, m)?;
    let size = m.pow(n as u32);
    let mut rng = rng::seeded(seed);
    let payoffs = (0..n)
        .map(|_| (0..size).map(|_| rng.random::<f64>()).collect())
        .collect();
    NormalFormGame::new(format!("random_n{n}_m{m}_s{seed}"), vec![m; n], payoffs)
}

/// Generalized N-player prisoner's dilemma, normalized to `[0, 1]`.
pub fn prisoners_dilemma_n(n: usize) -> Result<NormalFormGame> {
    require((2..=PD_MAX_PLAYERS).contains(&n), || {
        format!("prisoners_dilemma_n needs 2 <= n <= {PD_MAX_PLAYERS}, got {n}")
    })?;
    let raw = NormalFormGame::from_fn(format!("prisoners_dilemma_n{n}"), vec![2; n], |i, a| {
        let others_cooperating = a
            .iter()
            .enumerate()
            .filter(|&(j, &aj)| j != i && aj == 0)
            .count();
        let own_cost = if a[i] == 0 { PD_COST } else { 0.0 };
        PD_BENEFIT * others_cooperating as f64 / (n - 1) as f64 - own_cost
    })?;
    Ok(game::normalize(&raw))
}

/// Plurality winner; ties go to the lowest alternative.
pub fn majority_winner(votes: &[usize], alternatives: usize) -> usize {
    let mut tally = vec![0usize; alternatives];
    for &v in votes {
        tally[v] += 1;
    }
    let mut winner = 0;
    for (j, &c) in tally.iter().enumerate() {
        if c > tally[winner] {
            winner = j;
        }
    }
    winner
}

/// Private values `v[i][j]` used by [`majority_voting`].
pub fn majority_values(n: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng::seeded(seed);
    (0..n)
        .map(|_| (0..m).map(|_| rng.random::<f64>()).collect())
        .collect()
}

pub fn majority_voting(n: usize, m: usize, seed: u64) -> Result<NormalFormGame> {
    require(n >= 3 && m >= 2, || format!("majority_voting needs n >= 3 and m >= 2, got n={n} m={m}"))?;
    check_capacity(n, m)?;
    let values = majority_values(n, m, seed);
    NormalFormGame::from_fn(format!("majority_voting_n{n}_m{m}_s{seed}"), vec![m; n], |i, a| {
        values[i][majority_winner(a, m)]
    })
}

/// Per-facility cost slopes used by [`congestion_game`].
pub fn congestion_coefficients(f: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng::seeded(seed);
    (0..f).map(|_| 0.1 + 0.9 * rng.random::<f64>()).collect()
}

/// Largest possible cost, `n * max_j a_j`; payoffs are `1 - cost / c_max`.
pub fn congestion_cost_scale(n: usize, coefficients: &[f64]) -> f64 {
    n as f64 * coefficients.iter().copied().fold(0.0, f64::max)
}

pub fn congestion_game(n: usize, f: usize, seed: u64) -> Result<NormalFormGame> {
    require(n >= 2 && f >= 2, || format!("congestion needs n >= 2 and f >= 2, got n={n} f={f}"))?;
    check_capacity(n, f)?;
    let coefficients = congestion_coefficients(f, seed);
    let scale = congestion_cost_scale(n, &coefficients);
    NormalFormGame::from_fn(format!("congestion_n{n}_f{f}_s{seed}"), vec![f; n], |i, a| {
        let facility = a[i];
        let load = a.iter().filter(|&&x| x == facility).count();
        (1.0 - coefficients[facility] * load as f64 / scale).clamp(0.0, 1.0)
    })
}

pub fn coordination_game(n: usize, m: usize) -> Result<NormalFormGame> {
    require(n >= 2 && m >= 2, || format!("coordination needs n >= 2 and m >= 2, got n={n} m={m}"))?;
    check_capacity(n, m)?;
    NormalFormGame::from_fn(format!("coordination_n{n}_m{m}"), vec![m; n], |_, a| {
        if a.iter().all(|&x| x == a[0]) {
            1.0
        } else {
            0.0
        }
    })
}
