//! Classic cart-pole with a heavier gravity constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::phenotype::Phenotype;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartPoleParams {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    pub half_pole_length: f64,
    pub force_magnitude: f64,
    pub dt: f64,
    /// Radians.
    pub angle_limit: f64,
    pub position_limit: f64,
    pub episode_seconds: f64,
}

impl Default for CartPoleParams {
    fn default() -> Self {
        CartPoleParams {
            gravity: 26.0,
            cart_mass: 1.0,
            pole_mass: 0.1,
            half_pole_length: 0.5,
            force_magnitude: 10.0,
            dt: 0.02,
            angle_limit: 12.0_f64.to_radians(),
            position_limit: 2.4,
            episode_seconds: 60.0,
        }
    }
}

impl CartPoleParams {
    pub fn max_steps(&self) -> usize {
        (self.episode_seconds / self.dt).round() as usize
    }

    pub fn check(&self) -> Result<(), String> {
        let all = [
            self.gravity,
            self.cart_mass,
            self.pole_mass,
            self.half_pole_length,
            self.force_magnitude,
            self.dt,
            self.angle_limit,
            self.position_limit,
            self.episode_seconds,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err("cart-pole parameters must all be positive".into());
        }
        let steps = self.episode_seconds / self.dt;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err("dt must divide the episode length".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

impl CartPoleState {
    pub fn mirrored(self) -> Self {
        CartPoleState { x: -self.x, x_dot: -self.x_dot, theta: -self.theta, theta_dot: -self.theta_dot }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Left,
    Right,
}

impl Action {
    pub fn flipped(self) -> Self {
        match self {
            Action::Left => Action::Right,
            Action::Right => Action::Left,
        }
    }
}

/// Accelerations `(x_ddot, theta_ddot)` under horizontal force `force`.
pub fn accelerations(s: &CartPoleState, force: f64, p: &CartPoleParams) -> (f64, f64) {
    let total = p.cart_mass + p.pole_mass;
    let pml = p.pole_mass * p.half_pole_length;
    let (sin, cos) = s.theta.sin_cos();
    let temp = (force + pml * s.theta_dot * s.theta_dot * sin) / total;
    let theta_acc = (p.gravity * sin - cos * temp)
        / (p.half_pole_length * (4.0 / 3.0 - p.pole_mass * cos * cos / total));
    let x_acc = temp - pml * theta_acc * cos / total;
    (x_acc, theta_acc)
}

/// One semi-implicit Euler step under an arbitrary force: velocities
/// first, then positions from the updated velocities.
pub fn step_with_force(s: &CartPoleState, force: f64, p: &CartPoleParams) -> (CartPoleState, bool) {
    let (x_acc, theta_acc) = accelerations(s, force, p);
    let x_dot = s.x_dot + p.dt * x_acc;
    let theta_dot = s.theta_dot + p.dt * theta_acc;
    let next = CartPoleState { x: s.x + p.dt * x_dot, x_dot, theta: s.theta + p.dt * theta_dot, theta_dot };
    let terminal = next.x.abs() > p.position_limit || next.theta.abs() > p.angle_limit;
    (next, terminal)
}

pub fn cartpole_step(s: &CartPoleState, action: Action, p: &CartPoleParams) -> (CartPoleState, bool) {
    let force = match action {
        Action::Right => p.force_magnitude,
        Action::Left => -p.force_magnitude,
    };
    step_with_force(s, force, p)
}

/// Start state for an episode seed: each component uniform in
/// [-0.05, 0.05].
pub fn initial_state(seed: u64) -> CartPoleState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = || rng.gen_range(-0.05..=0.05);
    CartPoleState { x: u(), x_dot: u(), theta: u(), theta_dot: u() }
}

/// Network inputs: each state variable divided by a fixed range.
pub fn observe(s: &CartPoleState, p: &CartPoleParams) -> [f64; 4] {
    [s.x / p.position_limit, s.x_dot / 3.0, s.theta / p.angle_limit, s.theta_dot / 3.0]
}

/// Steps survived from `start` under `policy`, capped at the episode
/// length.
pub fn run_episode(
    start: CartPoleState,
    p: &CartPoleParams,
    mut policy: impl FnMut(&CartPoleState) -> Action,
) -> usize {
    let max = p.max_steps();
    let mut s = start;
    for step in 0..max {
        let (next, done) = cartpole_step(&s, policy(&s), p);
        if done {
            return step;
        }
        s = next;
    }
    max
}

/// Mean normalized survival time over `seeds`. The action is right when
/// the single output is at least 0.5.
pub fn cartpole_fitness(net: &Phenotype, p: &CartPoleParams, seeds: &[u64]) -> Result<f64, EnvError> {
    if net.input_count() != 4 || net.output_count() != 1 {
        return Err(EnvError::ArityMismatch {
            expected: (4, 1),
            got: (net.input_count(), net.output_count()),
        });
    }
    if seeds.is_empty() {
        return Ok(0.0);
    }
    let max = p.max_steps() as f64;
    let mut scratch = Vec::new();
    let mut total = 0.0;
    for &seed in seeds {
        let survived = run_episode(initial_state(seed), p, |s| {
            net.activate_into(&observe(s, p), &mut scratch)
                .expect("arity checked above");
            if net.output(&scratch, 0) >= 0.5 {
                Action::Right
            } else {
                Action::Left
            }
        });
        total += survived as f64 / max;
    }
    Ok(total / seeds.len() as f64)
}
