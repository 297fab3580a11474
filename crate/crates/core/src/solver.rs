//! NashD distance, its subgradient through the softmax map, and the
//! gradient-descent equilibrium solver.
//!
//! For a profile `sigma` of an N-player game, NashD is the sum of the
//! best-response values of the zero-sum extension (the original game plus a
//! single-action player whose payoff is minus the sum of everyone else's).
//! The extra player's max term is `-sum_i u_i(sigma)`, so
//!
//! ```text
//! NashD(sigma) = sum_i [ max_k u_i(k, sigma_{-i}) - u_i(sigma) ]
//! ```
//!
//! which is the sum of per-player regrets. It is nonnegative and vanishes
//! exactly at Nash equilibria. The solver never materializes the extra
//! player; it folds it into the value and the gradient analytically.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GameError, Result};
use crate::game::{self, NormalFormGame, StrategyProfile};
use crate::rng;
use crate::tensor;

/// Appends a single-action player whose payoff at every pure profile is
/// minus the sum of all other players' payoffs.
pub fn zero_sum_extend(game: &NormalFormGame) -> NormalFormGame {
    let size = game.size();
    let mut total = vec![0.0; size];
    for t in game.payoff_tensors() {
        for (acc, u) in total.iter_mut().zip(t) {
            *acc -= u;
        }
    }
    let mut counts = game.action_counts().to_vec();
    counts.push(1);
    let mut payoffs = game.payoff_tensors().to_vec();
    payoffs.push(total);
    NormalFormGame::new(format!("{}+zero_sum", game.name()), counts, payoffs)
        .expect("extension of a valid game is valid")
}

/// NashD of `sigma`, a profile of the original (unextended) game.
pub fn nashd(game: &NormalFormGame, sigma: &StrategyProfile) -> Result<f64> {
    let regrets = game::regrets(game, sigma)?;
    Ok(game::clamp_residue(regrets.iter().sum()))
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let shift = tensor::max(logits);
    let mut out: Vec<f64> = logits.iter().map(|z| (z - shift).exp()).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= sum);
    out
}

/// Unconstrained per-player parameters; the strategy is their softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitProfile {
    logits: Vec<Vec<f64>>,
}

impl LogitProfile {
    pub fn new(logits: Vec<Vec<f64>>) -> Result<Self> {
        for (player, z) in logits.iter().enumerate() {
            if z.is_empty() {
                return Err(GameError::Shape(format!("player {player} has no logits")));
            }
            if z.iter().any(|v| !v.is_finite()) {
                return Err(GameError::NonFinite(format!("player {player} logits")));
            }
        }
        Ok(Self { logits })
    }

    /// I.i.d. standard normal logits, drawn player by player.
    pub fn random(game: &NormalFormGame, rng: &mut impl Rng) -> Self {
        let logits = game
            .action_counts()
            .iter()
            .map(|&m| (0..m).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        Self { logits }
    }

    pub fn logits(&self) -> &[Vec<f64>] {
        &self.logits
    }

    pub fn block(&self, player: usize) -> &[f64] {
        &self.logits[player]
    }

    pub fn to_profile(&self) -> StrategyProfile {
        StrategyProfile::from_simplex(self.logits.iter().map(|z| softmax(z)).collect())
    }

    fn check_shape(&self, game: &NormalFormGame) -> Result<()> {
        let counts: Vec<usize> = self.logits.iter().map(Vec::len).collect();
        if counts != game.action_counts() {
            return Err(GameError::Shape(format!(
                "logit shape {counts:?} does not match action counts {:?}",
                game.action_counts()
            )));
        }
        Ok(())
    }
}

/// Value, exploitability and (optionally) subgradient of NashD at one point.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub nashd: f64,
    pub epsilon: f64,
    /// Subgradient with respect to the strategy probabilities.
    pub sigma_gradient: Vec<Vec<f64>>,
}

/// Caches the summed payoff tensor that the fictitious player contributes.
pub(crate) struct NashdEvaluator<'g> {
    game: &'g NormalFormGame,
    total: Vec<f64>,
}

impl<'g> NashdEvaluator<'g> {
    pub fn new(game: &'g NormalFormGame) -> Self {
        let mut total = vec![0.0; game.size()];
        for t in game.payoff_tensors() {
            for (acc, u) in total.iter_mut().zip(t) {
                *acc += u;
            }
        }
        Self { game, total }
    }

    pub fn evaluate(&self, sigma: &StrategyProfile, with_gradient: bool) -> Evaluation {
        let game = self.game;
        let n = game.num_players();
        let dims = game.action_counts();
        let weights = sigma.weights();

        let mut nashd = 0.0;
        let mut epsilon = 0.0_f64;
        let mut best_actions = Vec::with_capacity(n);
        for i in 0..n {
            let dev = game::deviation_payoffs_unchecked(game, i, sigma);
            let regret = tensor::max(&dev) - tensor::dot(&dev, sigma.strategy(i));
            nashd += regret;
            epsilon = epsilon.max(game::clamp_residue(regret));
            best_actions.push(tensor::argmax(&dev));
        }
        let nashd = game::clamp_residue(nashd);

        if !with_gradient {
            return Evaluation {
                nashd,
                epsilon,
                sigma_gradient: Vec::new(),
            };
        }

        // Fictitious player: d/d sigma_jk of -sum_i u_i(sigma).
        let mut grad: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                tensor::contract_except(&self.total, dims, &weights, Some(j))
                    .into_iter()
                    .map(|v| -v)
                    .collect()
            })
            .collect();

        // Best-response terms: d/d sigma_jk of u_i(l*, sigma_{-i}) for j != i.
        for (i, &best) in best_actions.iter().enumerate() {
            if n == 1 {
                break;
            }
            let slice = tensor::slice_axis(game.payoff_tensor(i), dims, i, best);
            let sub_dims: Vec<usize> = dims.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &m)| m).collect();
            let sub_weights: Vec<&[f64]> =
                weights.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &w)| w).collect();
            for (axis, j) in (0..n).filter(|&p| p != i).enumerate() {
                let partial = tensor::contract_except(&slice, &sub_dims, &sub_weights, Some(axis));
                for (g, p) in grad[j].iter_mut().zip(partial) {
                    *g += p;
                }
            }
        }

        Evaluation {
            nashd,
            epsilon,
            sigma_gradient: grad,
        }
    }
}

/// Chain rule through softmax: `dz_m = sigma_m * (g_m - <sigma, g>)`.
fn softmax_backward(sigma: &[f64], grad: &[f64]) -> Vec<f64> {
    let mean = tensor::dot(sigma, grad);
    sigma.iter().zip(grad).map(|(s, g)| s * (g - mean)).collect()
}

/// Subgradient of NashD with respect to the probabilities at `sigma`.
///
/// Each best-response max term is differentiated through its maximizer,
/// choosing the lowest action index on ties.
pub fn nashd_sigma_subgradient(game: &NormalFormGame, sigma: &StrategyProfile) -> Result<Vec<Vec<f64>>> {
    game.check_profile(sigma)?;
    Ok(NashdEvaluator::new(game).evaluate(sigma, true).sigma_gradient)
}

/// Subgradient of `NashD(softmax(z))` with respect to the logits.
pub fn nashd_subgradient(game: &NormalFormGame, z: &LogitProfile) -> Result<LogitProfile> {
    z.check_shape(game)?;
    let sigma = z.to_profile();
    let eval = NashdEvaluator::new(game).evaluate(&sigma, true);
    Ok(logit_gradient(&sigma, &eval.sigma_gradient))
}

fn logit_gradient(sigma: &StrategyProfile, sigma_gradient: &[Vec<f64>]) -> LogitProfile {
    LogitProfile {
        logits: sigma
            .strategies()
            .iter()
            .zip(sigma_gradient)
            .map(|(s, g)| softmax_backward(s, g))
            .collect(),
    }
}

/// Lipschitz constant bound `2 * U * N * sum_i |A_i|` of the NashD gradient,
/// with `U` the largest absolute payoff. Computed on the game as given, so
/// the fictitious player adds nothing.
pub fn lipschitz_bound(game: &NormalFormGame) -> f64 {
    let actions: usize = game.action_counts().iter().sum();
    2.0 * game.max_abs_payoff() * game.num_players() as f64 * actions as f64
}

/// Which profile a solve reports as its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportMode {
    /// The profile after the last update.
    #[default]
    Final,
    /// The visited profile with the smallest exploitability.
    Best,
}

/// Hyperparameters of [`solve_nashd_gd`]. The default is 1000 iterations,
/// learning rate 0.5 decayed by 0.8 every 100 iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct GdConfig {
    pub max_iters: usize,
    pub initial_lr: f64,
    pub decay_factor: f64,
    pub decay_every: usize,
    pub seed: u64,
    /// Stop as soon as an iterate's exploitability is at or below this.
    pub early_stop_eps: Option<f64>,
    pub report: ReportMode,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            initial_lr: 0.5,
            decay_factor: 0.8,
            decay_every: 100,
            seed: 0,
            early_stop_eps: None,
            report: ReportMode::Final,
        }
    }
}

impl GdConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(GameError::Range("max_iters must be at least 1".into()));
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return Err(GameError::Range(format!("initial_lr {} must be positive", self.initial_lr)));
        }
        if !(self.decay_factor > 0.0 && self.decay_factor <= 1.0) {
            return Err(GameError::Range(format!("decay_factor {} must be in (0, 1]", self.decay_factor)));
        }
        if self.decay_every == 0 {
            return Err(GameError::Range("decay_every must be at least 1".into()));
        }
        if let Some(eps) = self.early_stop_eps {
            if !(eps >= 0.0) {
                return Err(GameError::Range(format!("early_stop_eps {eps} must be nonnegative")));
            }
        }
        Ok(())
    }

    /// Learning rate used for the update after iterate `t`.
    pub fn learning_rate(&self, t: usize) -> f64 {
        self.initial_lr * self.decay_factor.powi((t / self.decay_every) as i32)
    }
}

/// NashD and exploitability of one iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub iteration: usize,
    pub nashd: f64,
    pub epsilon: f64,
}

/// Output of [`solve_nashd_gd`]. All values refer to the normalized game.
#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub records: Vec<IterRecord>,
    pub final_profile: StrategyProfile,
    pub final_nashd: f64,
    pub final_epsilon: f64,
    pub best_profile: StrategyProfile,
    pub best_epsilon: f64,
    pub report: ReportMode,
    pub wall_ms: f64,
}

impl SolveTrace {
    pub fn profile(&self) -> &StrategyProfile {
        match self.report {
            ReportMode::Final => &self.final_profile,
            ReportMode::Best => &self.best_profile,
        }
    }

    pub fn epsilon(&self) -> f64 {
        match self.report {
            ReportMode::Final => self.final_epsilon,
            ReportMode::Best => self.best_epsilon,
        }
    }

    /// Number of gradient iterates evaluated.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn initial_nashd(&self) -> f64 {
        self.records[0].nashd
    }
}

/// Gradient descent on NashD over softmax-parameterized strategies.
///
/// The game is normalized to `[0, 1]` first. Logits start i.i.d. standard
/// normal from `config.seed`. Iterate `t` is `softmax(z_t)`; its NashD and
/// exploitability are recorded, then `z_{t+1} = z_t - lr_t * grad`. The final
/// profile is `softmax(z_T)`, or the iterate that met `early_stop_eps`.
pub fn solve_nashd_gd(game: &NormalFormGame, config: &GdConfig) -> Result<SolveTrace> {
    config.validate()?;
    let start = Instant::now();
    let game = game::normalize(game);
    let evaluator = NashdEvaluator::new(&game);
    let mut rng = rng::seeded(config.seed);
    let mut z = LogitProfile::random(&game, &mut rng);

    let mut records = Vec::with_capacity(config.max_iters);
    let mut best: Option<(f64, StrategyProfile)> = None;
    let mut stopped: Option<(StrategyProfile, Evaluation)> = None;

    for t in 0..config.max_iters {
        let sigma = z.to_profile();
        let eval = evaluator.evaluate(&sigma, true);
        records.push(IterRecord {
            iteration: t,
            nashd: eval.nashd,
            epsilon: eval.epsilon,
        });
        if best.as_ref().is_none_or(|(e, _)| eval.epsilon < *e) {
            best = Some((eval.epsilon, sigma.clone()));
        }
        if config.early_stop_eps.is_some_and(|thr| eval.epsilon <= thr) {
            stopped = Some((sigma, eval));
            break;
        }
        let lr = config.learning_rate(t);
        let grad = logit_gradient(&sigma, &eval.sigma_gradient);
        for (zi, gi) in z.logits.iter_mut().zip(&grad.logits) {
            for (a, g) in zi.iter_mut().zip(gi) {
                *a -= lr * g;
            }
        }
    }

    let (final_profile, final_eval) = match stopped {
        Some(pair) => pair,
        None => {
            let sigma = z.to_profile();
            let eval = evaluator.evaluate(&sigma, false);
            (sigma, eval)
        }
    };
    let (mut best_epsilon, mut best_profile) = best.expect("at least one iteration");
    if final_eval.epsilon < best_epsilon {
        best_epsilon = final_eval.epsilon;
        best_profile = final_profile.clone();
    }

    Ok(SolveTrace {
        records,
        final_profile,
        final_nashd: final_eval.nashd,
        final_epsilon: final_eval.epsilon,
        best_profile,
        best_epsilon,
        report: config.report,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
