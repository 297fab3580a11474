//! Small games with known equilibria, used by tests, benches and the CLI.

use crate::game::NormalFormGame;

/// Matching pennies with payoffs in `[0, 1]`: player 0 wins on a match.
/// Unique equilibrium is uniform play.
pub fn matching_pennies() -> NormalFormGame {
    NormalFormGame::new(
        "matching_pennies",
        vec![2, 2],
        vec![vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]],
    )
    .expect("static game is valid")
}

/// Two-player prisoner's dilemma (action 0 = cooperate, 1 = defect) with
/// `u(C,C) = (2/3, 2/3)`, `u(C,D) = (0, 1)`, `u(D,C) = (1, 0)`,
/// `u(D,D) = (1/3, 1/3)`.
pub fn prisoners_dilemma() -> NormalFormGame {
    NormalFormGame::new(
        "prisoners_dilemma",
        vec![2, 2],
        vec![
            vec![2.0 / 3.0, 0.0, 1.0, 1.0 / 3.0],
            vec![2.0 / 3.0, 1.0, 0.0, 1.0 / 3.0],
        ],
    )
    .expect("static game is valid")
}

/// One player choosing between payoffs 0 and 1.
pub fn single_player_argmax() -> NormalFormGame {
    NormalFormGame::new("single_player", vec![2], vec![vec![0.0, 1.0]]).expect("static game is valid")
}

/// Every payoff is zero.
pub fn constant_zero(action_counts: Vec<usize>) -> NormalFormGame {
    let size: usize = action_counts.iter().product();
    let n = action_counts.len();
    NormalFormGame::new("constant_zero", action_counts, vec![vec![0.0; size]; n])
        .expect("caller passes a valid shape")
}
