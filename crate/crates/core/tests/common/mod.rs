//! Brute-force oracles. These enumerate pure profiles directly and share no
//! code path with the tensor contractions in the library.

#![allow(dead_code)]

use nashd_core::game::PureProfileIter;
use nashd_core::{pure_payoff, NormalFormGame, PureProfile};
use rand::Rng;

/// Probability of pure profile `a` under `sigma`, skipping `skip`.
fn weight(sigma: &[Vec<f64>], a: &[usize], skip: Option<usize>) -> f64 {
    a.iter()
        .enumerate()
        .filter(|&(p, _)| Some(p) != skip)
        .map(|(p, &k)| sigma[p][k])
        .product()
}

fn payoff(game: &NormalFormGame, i: usize, a: &[usize]) -> f64 {
    pure_payoff(game, i, &PureProfile::new(a.to_vec())).unwrap()
}

pub fn brute_utility(game: &NormalFormGame, i: usize, sigma: &[Vec<f64>]) -> f64 {
    PureProfileIter::new(game.action_counts())
        .map(|a| weight(sigma, &a, None) * payoff(game, i, &a))
        .sum()
}

pub fn brute_deviations(game: &NormalFormGame, i: usize, sigma: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; game.action_counts()[i]];
    for a in PureProfileIter::new(game.action_counts()) {
        out[a[i]] += weight(sigma, &a, Some(i)) * payoff(game, i, &a);
    }
    out
}

pub fn brute_regrets(game: &NormalFormGame, sigma: &[Vec<f64>]) -> Vec<f64> {
    (0..game.num_players())
        .map(|i| {
            let dev = brute_deviations(game, i, sigma);
            dev.iter().copied().fold(f64::NEG_INFINITY, f64::max) - brute_utility(game, i, sigma)
        })
        .collect()
}

pub fn brute_nashd(game: &NormalFormGame, sigma: &[Vec<f64>]) -> f64 {
    brute_regrets(game, sigma).iter().sum()
}

pub fn brute_softmax(z: &[f64]) -> Vec<f64> {
    let e: Vec<f64> = z.iter().map(|v| v.exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// Gap between the best and second-best pure deviation, minimized over
/// players.
pub fn min_argmax_margin(game: &NormalFormGame, sigma: &[Vec<f64>]) -> f64 {
    (0..game.num_players())
        .map(|i| {
            let mut dev = brute_deviations(game, i, sigma);
            dev.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if dev.len() > 1 {
                dev[0] - dev[1]
            } else {
                f64::INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Central finite differences of `NashD(softmax(z))`.
pub fn finite_difference_gradient(game: &NormalFormGame, z: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    let f = |z: &[Vec<f64>]| {
        let sigma: Vec<Vec<f64>> = z.iter().map(|b| brute_softmax(b)).collect();
        brute_nashd(game, &sigma)
    };
    z.iter()
        .enumerate()
        .map(|(p, block)| {
            (0..block.len())
                .map(|k| {
                    let mut plus = z.to_vec();
                    let mut minus = z.to_vec();
                    plus[p][k] += h;
                    minus[p][k] -= h;
                    (f(&plus) - f(&minus)) / (2.0 * h)
                })
                .collect()
        })
        .collect()
}

pub fn random_simplex(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}
