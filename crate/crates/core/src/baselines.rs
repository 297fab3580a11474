//! Fictitious play and regret matching for N-player games.
//!
//! Both solvers normalize the game to `[0, 1]` first and report the
//! exploitability of their canonical output: the empirical action
//! frequencies for fictitious play and the time-averaged strategy for regret
//! matching.

use std::time::Instant;

use crate::error::{GameError, Result};
use crate::game::{self, NormalFormGame, StrategyProfile};
use crate::tensor;

pub const DEFAULT_SAMPLE_EVERY: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlayConfig {
    pub rounds: usize,
    /// Unused by the deterministic update rules; kept so every solver takes
    /// a seed.
    pub seed: u64,
    /// Record the output profile's exploitability every this many rounds.
    pub sample_every: usize,
}

impl PlayConfig {
    pub fn new(rounds: usize, seed: u64) -> Self {
        Self {
            rounds,
            seed,
            sample_every: DEFAULT_SAMPLE_EVERY,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(GameError::Range("rounds must be at least 1".into()));
        }
        if self.sample_every == 0 {
            return Err(GameError::Range("sample_every must be at least 1".into()));
        }
        Ok(())
    }

    fn samples(&self, round: usize) -> bool {
        round % self.sample_every == 0 || round == self.rounds
    }
}

/// Quality of the output profile after `round` rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayRecord {
    pub round: usize,
    pub nashd: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone)]
pub struct PlayTrace {
    pub records: Vec<PlayRecord>,
    pub profile: StrategyProfile,
    pub epsilon: f64,
    pub rounds: usize,
    pub wall_ms: f64,
}

fn record(game: &NormalFormGame, round: usize, sigma: &StrategyProfile) -> PlayRecord {
    let regrets = game::regrets_unchecked(game, sigma);
    PlayRecord {
        round,
        nashd: game::clamp_residue(regrets.iter().sum()),
        epsilon: regrets.into_iter().fold(0.0, f64::max),
    }
}

fn frequencies(counts: &[Vec<f64>], total: f64) -> StrategyProfile {
    StrategyProfile::from_simplex(
        counts
            .iter()
            .map(|c| c.iter().map(|x| x / total).collect())
            .collect(),
    )
}

pub fn solve_fictitious_play(game: &NormalFormGame, rounds: usize, seed: u64) -> Result<PlayTrace> {
    fictitious_play(game, &PlayConfig::new(rounds, seed))
}

/// Simultaneous fictitious play against the product of opponents' empirical
/// marginals.
///
/// Everyone opens with action 0; that opening seeds the beliefs. Each of the
/// `rounds` rounds then has every player best respond (lowest index on ties)
/// to the current beliefs, after which all plays are added to the counts.
/// The output is the empirical frequency of the best-response plays.
pub fn fictitious_play(game: &NormalFormGame, config: &PlayConfig) -> Result<PlayTrace> {
    config.validate()?;
    let start = Instant::now();
    let game = game::normalize(game);
    let counts_init: Vec<Vec<f64>> = game
        .action_counts()
        .iter()
        .map(|&m| game::one_hot(m, 0))
        .collect();
    let mut belief_counts = counts_init;
    let mut played: Vec<Vec<f64>> = game.action_counts().iter().map(|&m| vec![0.0; m]).collect();
    let mut records = Vec::new();

    for round in 1..=config.rounds {
        let beliefs = frequencies(&belief_counts, round as f64);
        let responses: Vec<usize> = (0..game.num_players())
            .map(|i| tensor::argmax(&game::deviation_payoffs_unchecked(&game, i, &beliefs)))
            .collect();
        for (i, &a) in responses.iter().enumerate() {
            belief_counts[i][a] += 1.0;
            played[i][a] += 1.0;
        }
        if config.samples(round) {
            records.push(record(&game, round, &frequencies(&played, round as f64)));
        }
    }

    let profile = frequencies(&played, config.rounds as f64);
    let epsilon = records.last().expect("final round is sampled").epsilon;
    Ok(PlayTrace {
        records,
        profile,
        epsilon,
        rounds: config.rounds,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn solve_regret_matching(game: &NormalFormGame, rounds: usize, seed: u64) -> Result<PlayTrace> {
    regret_matching(game, &PlayConfig::new(rounds, seed))
}

/// Positive part of the cumulative regrets, normalized; uniform when no
/// regret is positive.
pub fn regret_matching_strategy(cumulative: &[f64]) -> Vec<f64> {
    let positive: f64 = cumulative.iter().map(|r| r.max(0.0)).sum();
    if positive > 0.0 {
        cumulative.iter().map(|r| r.max(0.0) / positive).collect()
    } else {
        vec![1.0 / cumulative.len() as f64; cumulative.len()]
    }
}

/// Full-feedback regret matching.
///
/// Round `t` plays `sigma_t`, adds the expected regrets
/// `u_i(a, sigma_{t,-i}) - u_i(sigma_t)` to each player's cumulative regret,
/// and sets `sigma_{t+1}` by [`regret_matching_strategy`]. The output is the
/// mean of `sigma_0 .. sigma_{rounds-1}`.
pub fn regret_matching(game: &NormalFormGame, config: &PlayConfig) -> Result<PlayTrace> {
    config.validate()?;
    let start = Instant::now();
    let game = game::normalize(game);
    let n = game.num_players();
    let mut cumulative: Vec<Vec<f64>> = game.action_counts().iter().map(|&m| vec![0.0; m]).collect();
    let mut strategy_sum = cumulative.clone();
    let mut sigma = StrategyProfile::uniform(&game);
    let mut records = Vec::new();

    for round in 1..=config.rounds {
        for (acc, s) in strategy_sum.iter_mut().zip(sigma.strategies()) {
            acc.iter_mut().zip(s).for_each(|(a, p)| *a += p);
        }
        for i in 0..n {
            let dev = game::deviation_payoffs_unchecked(&game, i, &sigma);
            let value = tensor::dot(&dev, sigma.strategy(i));
            for (c, d) in cumulative[i].iter_mut().zip(&dev) {
                *c += d - value;
            }
        }
        sigma = StrategyProfile::from_simplex(cumulative.iter().map(|c| regret_matching_strategy(c)).collect());
        if config.samples(round) {
            records.push(record(&game, round, &frequencies(&strategy_sum, round as f64)));
        }
    }

    let profile = frequencies(&strategy_sum, config.rounds as f64);
    let epsilon = records.last().expect("final round is sampled").epsilon;
    Ok(PlayTrace {
        records,
        profile,
        epsilon,
        rounds: config.rounds,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
