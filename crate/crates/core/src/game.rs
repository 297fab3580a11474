//! Normal-form games, strategy profiles and the exploitability metric.
//!
//! Payoffs are stored as one flat tensor per player. The first player's
//! action index is the slowest-varying axis, so the offset of a pure profile
//! `a` is `sum_i a[i] * stride[i]` with `stride[i] = prod_{j > i} |A_j|`.
//! The `.nfg` file order is different (first player fastest); see
//! [`crate::nfg`].

use crate::error::{GameError, Result};
use crate::tensor;

/// Largest number of payoff entries (summed over players) a dense game may
/// hold.
pub const MAX_PAYOFF_ENTRIES: u128 = 100_000_000;

/// Tolerance on the sum of a probability vector before it is rejected.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Negative residues of regret-type quantities above this are clamped to 0.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// A discrete N-player game in normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormGame {
    name: String,
    action_counts: Vec<usize>,
    strides: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl NormalFormGame {
    /// Builds a game from per-player payoff tensors in internal layout.
    pub fn new(
        name: impl Into<String>,
        action_counts: Vec<usize>,
        payoffs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let size = checked_profile_count(&action_counts)?;
        if payoffs.len() != action_counts.len() {
            return Err(GameError::Shape(format!(
                "{} payoff tensors for {} players",
                payoffs.len(),
                action_counts.len()
            )));
        }
        for (player, tensor) in payoffs.iter().enumerate() {
            if tensor.len() != size {
                return Err(GameError::Shape(format!(
                    "player {player} tensor has {} entries, expected {size}",
                    tensor.len()
                )));
            }
            if let Some(bad) = tensor.iter().position(|v| !v.is_finite()) {
                return Err(GameError::NonFinite(format!(
                    "player {player} payoff at offset {bad} is {}",
                    tensor[bad]
                )));
            }
        }
        let strides = tensor::strides(&action_counts);
        Ok(Self {
            name: name.into(),
            action_counts,
            strides,
            payoffs,
        })
    }

    /// Builds a game by evaluating `payoff(player, profile)` at every pure
    /// profile.
    pub fn from_fn(
        name: impl Into<String>,
        action_counts: Vec<usize>,
        mut payoff: impl FnMut(usize, &[usize]) -> f64,
    ) -> Result<Self> {
        let size = checked_profile_count(&action_counts)?;
        let n = action_counts.len();
        let mut payoffs = vec![Vec::with_capacity(size); n];
        for profile in PureProfileIter::new(&action_counts) {
            for (player, tensor) in payoffs.iter_mut().enumerate() {
                tensor.push(payoff(player, &profile));
            }
        }
        Self::new(name, action_counts, payoffs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    /// Number of pure profiles, `prod_i |A_i|`.
    pub fn size(&self) -> usize {
        self.payoffs[0].len()
    }

    /// Player `i`'s flat payoff tensor.
    pub fn payoff_tensor(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    pub fn payoff_tensors(&self) -> &[Vec<f64>] {
        &self.payoffs
    }

    /// Offset of a pure profile in the flat tensors.
    pub fn offset(&self, profile: &PureProfile) -> Result<usize> {
        self.check_pure(profile)?;
        Ok(self.offset_unchecked(profile.actions()))
    }

    pub(crate) fn offset_unchecked(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    /// Largest absolute payoff over all players and profiles.
    pub fn max_abs_payoff(&self) -> f64 {
        self.payoffs
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return Err(GameError::Range(format!(
                "player {player} in a {}-player game",
                self.num_players()
            )));
        }
        Ok(())
    }

    fn check_pure(&self, profile: &PureProfile) -> Result<()> {
        let actions = profile.actions();
        if actions.len() != self.num_players() {
            return Err(GameError::Shape(format!(
                "pure profile has {} actions for {} players",
                actions.len(),
                self.num_players()
            )));
        }
        for (player, (&a, &m)) in actions.iter().zip(&self.action_counts).enumerate() {
            if a >= m {
                return Err(GameError::Range(format!(
                    "player {player} action {a} but only {m} actions"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn check_profile(&self, sigma: &StrategyProfile) -> Result<()> {
        if sigma.num_players() != self.num_players() {
            return Err(GameError::Shape(format!(
                "profile has {} players, game has {}",
                sigma.num_players(),
                self.num_players()
            )));
        }
        for (player, (s, &m)) in sigma.strategies().iter().zip(&self.action_counts).enumerate() {
            if s.len() != m {
                return Err(GameError::Shape(format!(
                    "player {player} strategy has {} entries, game has {m} actions",
                    s.len()
                )));
            }
        }
        Ok(())
    }
}

fn checked_profile_count(action_counts: &[usize]) -> Result<usize> {
    if action_counts.is_empty() {
        return Err(GameError::Range("a game needs at least one player".into()));
    }
    if let Some(p) = action_counts.iter().position(|&m| m == 0) {
        return Err(GameError::Range(format!("player {p} has no actions")));
    }
    let mut size: u128 = 1;
    for &m in action_counts {
        size = size.saturating_mul(m as u128);
    }
    let entries = size.saturating_mul(action_counts.len() as u128);
    if entries > MAX_PAYOFF_ENTRIES {
        return Err(GameError::Capacity {
            entries,
            limit: MAX_PAYOFF_ENTRIES,
        });
    }
    Ok(size as usize)
}

/// One action per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PureProfile(Vec<usize>);

impl PureProfile {
    pub fn new(actions: Vec<usize>) -> Self {
        Self(actions)
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for PureProfile {
    fn from(actions: Vec<usize>) -> Self {
        Self(actions)
    }
}

/// Iterates all pure profiles in internal layout order (last player fastest).
#[derive(Debug, Clone)]
pub struct PureProfileIter {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl PureProfileIter {
    pub fn new(action_counts: &[usize]) -> Self {
        let next = if action_counts.iter().all(|&m| m > 0) {
            Some(vec![0; action_counts.len()])
        } else {
            None
        };
        Self {
            dims: action_counts.to_vec(),
            next,
        }
    }
}

impl Iterator for PureProfileIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for axis in (0..succ.len()).rev() {
            succ[axis] += 1;
            if succ[axis] < self.dims[axis] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[axis] = 0;
        }
        Some(current)
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    strategies: Vec<Vec<f64>>,
}

impl StrategyProfile {
    /// Validates each vector and rescales it to sum to exactly one.
    ///
    /// Entries must be finite and nonnegative (negative noise down to
    /// `-SIMPLEX_TOLERANCE` is clamped), and each vector must sum to one
    /// within `SIMPLEX_TOLERANCE`.
    pub fn new(strategies: Vec<Vec<f64>>) -> Result<Self> {
        let mut strategies = strategies;
        for (player, s) in strategies.iter_mut().enumerate() {
            if s.is_empty() {
                return Err(GameError::Shape(format!("player {player} strategy is empty")));
            }
            for p in s.iter_mut() {
                if !p.is_finite() {
                    return Err(GameError::NonFinite(format!("player {player} probability {p}")));
                }
                if *p < -SIMPLEX_TOLERANCE {
                    return Err(GameError::InvalidStrategy(format!(
                        "player {player} has negative probability {p}"
                    )));
                }
                *p = p.max(0.0);
            }
            let sum: f64 = s.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
                return Err(GameError::InvalidStrategy(format!(
                    "player {player} probabilities sum to {sum}"
                )));
            }
            s.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self { strategies })
    }

    /// Caller guarantees every vector is already a simplex element.
    pub(crate) fn from_simplex(strategies: Vec<Vec<f64>>) -> Self {
        Self { strategies }
    }

    pub fn uniform(game: &NormalFormGame) -> Self {
        Self::from_simplex(
            game.action_counts()
                .iter()
                .map(|&m| vec![1.0 / m as f64; m])
                .collect(),
        )
    }

    pub fn pure(game: &NormalFormGame, profile: &PureProfile) -> Result<Self> {
        game.check_pure(profile)?;
        Ok(Self::from_simplex(
            profile
                .actions()
                .iter()
                .zip(game.action_counts())
                .map(|(&a, &m)| one_hot(m, a))
                .collect(),
        ))
    }

    /// Reads a profile written as one line of whitespace-separated
    /// probabilities per player. Blank lines and lines starting with `#` are
    /// skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut strategies = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        GameError::InvalidStrategy(format!("line {}: {tok:?} is not a number", lineno + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            strategies.push(row);
        }
        if strategies.is_empty() {
            return Err(GameError::InvalidStrategy("profile file has no strategies".into()));
        }
        Self::new(strategies)
    }

    /// Checks that the profile fits `game`.
    pub fn check_against(&self, game: &NormalFormGame) -> Result<()> {
        game.check_profile(self)
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategies(&self) -> &[Vec<f64>] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &[f64] {
        &self.strategies[player]
    }

    pub fn into_inner(self) -> Vec<Vec<f64>> {
        self.strategies
    }

    /// Returns a copy with player `i`'s strategy replaced.
    pub fn with_strategy(&self, player: usize, strategy: Vec<f64>) -> Result<Self> {
        let mut strategies = self.strategies.clone();
        *strategies
            .get_mut(player)
            .ok_or_else(|| GameError::Range(format!("player {player}")))? = strategy;
        Self::new(strategies)
    }

    pub(crate) fn weights(&self) -> Vec<&[f64]> {
        self.strategies.iter().map(Vec::as_slice).collect()
    }

    /// Largest total-variation distance between corresponding strategies.
    pub fn max_total_variation(&self, other: &StrategyProfile) -> f64 {
        self.strategies
            .iter()
            .zip(&other.strategies)
            .map(|(a, b)| 0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn one_hot(len: usize, index: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[index] = 1.0;
    v
}

/// The stored payoff `u_i(a)`.
pub fn pure_payoff(game: &NormalFormGame, player: usize, profile: &PureProfile) -> Result<f64> {
    game.check_player(player)?;
    let offset = game.offset(profile)?;
    Ok(game.payoffs[player][offset])
}

/// Expected utility `u_i(sigma)` of player `i` under a mixed profile.
pub fn expected_utility(game: &NormalFormGame, player: usize, sigma: &StrategyProfile) -> Result<f64> {
    game.check_player(player)?;
    game.check_profile(sigma)?;
    Ok(tensor::contract_except(&game.payoffs[player], game.action_counts(), &sigma.weights(), None)[0])
}

/// The vector `(u_i(k, sigma_{-i}))_k` of payoffs to each pure deviation of
/// player `i`. Does not read `sigma_i`.
pub fn deviation_payoffs(
    game: &NormalFormGame,
    player: usize,
    sigma: &StrategyProfile,
) -> Result<Vec<f64>> {
    game.check_player(player)?;
    game.check_profile(sigma)?;
    Ok(deviation_payoffs_unchecked(game, player, sigma))
}

pub(crate) fn deviation_payoffs_unchecked(
    game: &NormalFormGame,
    player: usize,
    sigma: &StrategyProfile,
) -> Vec<f64> {
    tensor::contract_except(
        &game.payoffs[player],
        game.action_counts(),
        &sigma.weights(),
        Some(player),
    )
}

/// Per-player regret `max_k u_i(k, sigma_{-i}) - u_i(sigma)`, clamped at 0.
pub fn regrets(game: &NormalFormGame, sigma: &StrategyProfile) -> Result<Vec<f64>> {
    game.check_profile(sigma)?;
    Ok(regrets_unchecked(game, sigma))
}

pub(crate) fn regrets_unchecked(game: &NormalFormGame, sigma: &StrategyProfile) -> Vec<f64> {
    (0..game.num_players())
        .map(|i| {
            let dev = deviation_payoffs_unchecked(game, i, sigma);
            regret_from_deviations(&dev, sigma.strategy(i))
        })
        .collect()
}

pub(crate) fn regret_from_deviations(dev: &[f64], strategy: &[f64]) -> f64 {
    clamp_residue(tensor::max(dev) - tensor::dot(dev, strategy))
}

pub(crate) fn clamp_residue(x: f64) -> f64 {
    if x < 0.0 && x > -CLAMP_TOLERANCE {
        0.0
    } else {
        x
    }
}

/// Exploitability: the largest gain any single player can get by deviating.
pub fn epsilon(game: &NormalFormGame, sigma: &StrategyProfile) -> Result<f64> {
    Ok(regrets(game, sigma)?.into_iter().fold(0.0, f64::max))
}

/// Maps each player's payoffs affinely onto `[0, 1]`. A constant tensor maps
/// to all zeros.
pub fn normalize(game: &NormalFormGame) -> NormalFormGame {
    let payoffs = game
        .payoffs
        .iter()
        .map(|tensor| {
            let lo = tensor.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = tensor.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let range = hi - lo;
            if range > 0.0 {
                tensor.iter().map(|u| ((u - lo) / range).clamp(0.0, 1.0)).collect()
            } else {
                vec![0.0; tensor.len()]
            }
        })
        .collect();
    NormalFormGame {
        name: game.name.clone(),
        action_counts: game.action_counts.clone(),
        strides: game.strides.clone(),
        payoffs,
    }
}
