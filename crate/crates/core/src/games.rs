//! Symmetric zero-sum games: normal-form matrix games and an iterated
//! rock-paper-scissors Markov game with joint-action observations.

use rand::{Rng as _, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::policy::{MixedStrategy, TabularPolicy};
use crate::Matrix;

pub const RPS_ACTIONS: usize = 3;
pub const ACTION_NAMES: [&str; RPS_ACTIONS] = ["rock", "paper", "scissors"];
const ACTION_LETTERS: [char; RPS_ACTIONS] = ['R', 'P', 'S'];

/// Reward to the player choosing `a` against `b` in rock-paper-scissors.
pub fn rps_reward(a: usize, b: usize) -> f64 {
    match (a + RPS_ACTIONS - b) % RPS_ACTIONS {
        0 => 0.0,
        1 => 1.0,
        _ => -1.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    name: String,
    payoff: Matrix,
}

impl MatrixGame {
    /// Validates that `payoff` is square, finite and exactly antisymmetric.
    pub fn new(name: impl Into<String>, payoff: Matrix) -> Result<Self> {
        if payoff.nrows() == 0 || payoff.nrows() != payoff.ncols() {
            return invalid(format!("payoff must be square and nonempty, got {}x{}", payoff.nrows(), payoff.ncols()));
        }
        if payoff.iter().any(|v| !v.is_finite()) {
            return invalid("payoff entries must be finite");
        }
        let n = payoff.nrows();
        for a in 0..n {
            for b in 0..n {
                if payoff[(a, b)] != -payoff[(b, a)] {
                    return invalid(format!("payoff is not antisymmetric at ({a}, {b})"));
                }
            }
        }
        Ok(Self { name: name.into(), payoff })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn payoff(&self) -> &Matrix {
        &self.payoff
    }

    pub fn num_actions(&self) -> usize {
        self.payoff.nrows()
    }
}

/// Rock-paper-scissors with action order (rock, paper, scissors).
pub fn rps_game() -> MatrixGame {
    let payoff = Matrix::from_fn(RPS_ACTIONS, RPS_ACTIONS, rps_reward);
    MatrixGame::new("rps", payoff).expect("rps is antisymmetric")
}

/// Antisymmetric game with strict-upper-triangle entries i.i.d. uniform on `[-1, 1]`.
pub fn random_zero_sum_game(n_actions: usize, seed: u64) -> Result<MatrixGame> {
    if n_actions == 0 {
        return invalid("random game needs at least one action");
    }
    let mut rng = crate::Rng::seed_from_u64(seed);
    let mut payoff = Matrix::zeros(n_actions, n_actions);
    for a in 0..n_actions {
        for b in a + 1..n_actions {
            let v = rng.gen_range(-1.0..=1.0);
            payoff[(a, b)] = v;
            payoff[(b, a)] = -v;
        }
    }
    MatrixGame::new(format!("random-{n_actions}-{seed}"), payoff)
}

/// Bilinear expected payoff `rowᵀ · U · col`.
pub fn game_payoff(game: &MatrixGame, row: &MixedStrategy, col: &MixedStrategy) -> Result<f64> {
    bilinear(game.payoff(), row.probs(), col.probs())
}

pub(crate) fn bilinear(u: &Matrix, row: &[f64], col: &[f64]) -> Result<f64> {
    if row.len() != u.nrows() || col.len() != u.ncols() {
        return invalid(format!(
            "strategy lengths ({}, {}) do not match {}x{} payoff",
            row.len(),
            col.len(),
            u.nrows(),
            u.ncols()
        ));
    }
    let mut total = 0.0;
    for (a, p) in row.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let inner: f64 = col.iter().enumerate().map(|(b, q)| u[(a, b)] * q).sum();
        total += p * inner;
    }
    Ok(total)
}

/// What a player sees before acting: nothing on the first round, then the
/// previous joint action as (own action, opponent action).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Observation(u8);

pub const NUM_OBSERVATIONS: usize = 1 + RPS_ACTIONS * RPS_ACTIONS;

impl Observation {
    pub const NONE: Observation = Observation(0);

    pub fn joint(own: usize, opponent: usize) -> Self {
        assert!(own < RPS_ACTIONS && opponent < RPS_ACTIONS);
        Observation((1 + own * RPS_ACTIONS + opponent) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < NUM_OBSERVATIONS);
        Observation(i as u8)
    }

    pub fn all() -> impl Iterator<Item = Observation> + Clone {
        (0..NUM_OBSERVATIONS).map(Observation::from_index)
    }

    /// `none`, or two letters such as `RP` (own rock, opponent paper).
    pub fn name(self) -> String {
        match self.0 {
            0 => "none".to_string(),
            k => {
                let k = k as usize - 1;
                let mut s = String::with_capacity(2);
                s.push(ACTION_LETTERS[k / RPS_ACTIONS]);
                s.push(ACTION_LETTERS[k % RPS_ACTIONS]);
                s
            }
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        if name == "none" {
            return Ok(Self::NONE);
        }
        let letters: Vec<char> = name.chars().collect();
        let find = |c: char| ACTION_LETTERS.iter().position(|l| *l == c);
        match letters.as_slice() {
            [a, b] => match (find(*a), find(*b)) {
                (Some(a), Some(b)) => Ok(Self::joint(a, b)),
                _ => invalid(format!("unknown observation {name:?}")),
            },
            _ => invalid(format!("unknown observation {name:?}")),
        }
    }
}

/// Iterated rock-paper-scissors over a fixed number of rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovGame {
    rounds: usize,
    discount: f64,
}

impl MarkovGame {
    pub fn new(rounds: usize, discount: f64) -> Result<Self> {
        if rounds == 0 {
            return invalid("episodes need at least one round");
        }
        if !(discount > 0.0 && discount <= 1.0) {
            return invalid(format!("discount must lie in (0, 1], got {discount}"));
        }
        Ok(Self { rounds, discount })
    }

    pub fn iterated_rps(rounds: usize) -> Result<Self> {
        Self::new(rounds, 1.0)
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub observation: Observation,
    pub action: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    /// Undiscounted sum of player A's rewards.
    pub return_a: f64,
    pub trajectory_a: Vec<Step>,
    pub trajectory_b: Vec<Step>,
}

impl EpisodeResult {
    pub fn return_b(&self) -> f64 {
        -self.return_a
    }
}

/// Simulates one episode of simultaneous moves.
pub fn play_episode(env: &MarkovGame, policy_a: &TabularPolicy, policy_b: &TabularPolicy, rng: &mut crate::Rng) -> EpisodeResult {
    play_episode_exploring(env, policy_a, 0.0, policy_b, 0.0, rng)
}

/// As [`play_episode`], with each player acting uniformly at random with the
/// given exploration probability.
pub fn play_episode_exploring(
    env: &MarkovGame,
    policy_a: &TabularPolicy,
    explore_a: f64,
    policy_b: &TabularPolicy,
    explore_b: f64,
    rng: &mut crate::Rng,
) -> EpisodeResult {
    let mut obs_a = Observation::NONE;
    let mut obs_b = Observation::NONE;
    let mut trajectory_a = Vec::with_capacity(env.rounds);
    let mut trajectory_b = Vec::with_capacity(env.rounds);
    let mut return_a = 0.0;
    for _ in 0..env.rounds {
        let a = policy_a.act(obs_a, explore_a, rng);
        let b = policy_b.act(obs_b, explore_b, rng);
        let r = rps_reward(a, b);
        trajectory_a.push(Step { observation: obs_a, action: a, reward: r });
        trajectory_b.push(Step { observation: obs_b, action: b, reward: -r });
        return_a += r;
        obs_a = Observation::joint(a, b);
        obs_b = Observation::joint(b, a);
    }
    EpisodeResult { return_a, trajectory_a, trajectory_b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> crate::Rng {
        crate::Rng::seed_from_u64(seed)
    }

    #[test]
    fn rps_matches_canonical_matrix() {
        let g = rps_game();
        let expected = Matrix::from_row_slice(3, 3, &[0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0]);
        assert_eq!(g.payoff(), &expected);
        assert_eq!(g.payoff()[(0, 0)], 0.0);
        assert_eq!(g.payoff()[(1, 0)], 1.0);
    }

    #[test]
    fn random_game_contract() {
        assert_eq!(random_zero_sum_game(1, 42).unwrap().payoff(), &Matrix::zeros(1, 1));
        assert_eq!(random_zero_sum_game(3, 9).unwrap(), random_zero_sum_game(3, 9).unwrap());
        let u = random_zero_sum_game(4, 5).unwrap().payoff().clone();
        assert_eq!(&u + u.transpose(), Matrix::zeros(4, 4));
        assert!(u.iter().all(|v| v.abs() <= 1.0));
        assert!(random_zero_sum_game(0, 1).is_err());
    }

    #[test]
    fn rejects_non_antisymmetric() {
        let u = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(MatrixGame::new("bad", u).is_err());
        assert!(MatrixGame::new("empty", Matrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn payoff_examples() {
        let g = rps_game();
        let rock = MixedStrategy::pure(3, 0);
        let scissors = MixedStrategy::pure(3, 2);
        let uniform = MixedStrategy::uniform(3);
        assert_eq!(game_payoff(&g, &rock, &scissors).unwrap(), 1.0);
        assert_eq!(game_payoff(&g, &uniform, &uniform).unwrap(), 0.0);
        let mix = MixedStrategy::new(vec![2.0 / 3.0, 0.0, 1.0 / 3.0]).unwrap();
        assert!((game_payoff(&g, &rock, &mix).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(game_payoff(&g, &MixedStrategy::uniform(2), &rock).is_err());
    }

    #[test]
    fn episode_examples() {
        let env = MarkovGame::iterated_rps(5).unwrap();
        let rock = TabularPolicy::pure(0);
        let paper = TabularPolicy::pure(1);
        assert_eq!(play_episode(&env, &rock, &rock, &mut rng(1)).return_a, 0.0);
        let r = play_episode(&env, &paper, &rock, &mut rng(1));
        assert_eq!(r.return_a, 5.0);
        assert_eq!(r.trajectory_a.len(), 5);
        assert_eq!(r.trajectory_a[0].observation, Observation::NONE);
        assert_eq!(r.trajectory_b[0].observation, Observation::NONE);
        assert_eq!(r.trajectory_a[1].observation, Observation::joint(1, 0));
        assert_eq!(r.trajectory_b[1].observation, Observation::joint(0, 1));
    }

    #[test]
    fn episodes_are_seed_deterministic() {
        let env = MarkovGame::iterated_rps(7).unwrap();
        let mut r = rng(5);
        let a = TabularPolicy::random(&mut r);
        let b = TabularPolicy::random(&mut r);
        assert_eq!(play_episode(&env, &a, &b, &mut rng(77)), play_episode(&env, &a, &b, &mut rng(77)));
    }

    #[test]
    fn observation_names_round_trip() {
        for o in Observation::all() {
            assert_eq!(Observation::parse(&o.name()).unwrap(), o);
        }
        assert_eq!(Observation::joint(0, 1).name(), "RP");
        assert!(Observation::parse("XY").is_err());
    }

    #[test]
    fn invalid_markov_parameters() {
        assert!(MarkovGame::new(0, 1.0).is_err());
        assert!(MarkovGame::new(3, 0.0).is_err());
        assert!(MarkovGame::new(3, 1.5).is_err());
    }
}
