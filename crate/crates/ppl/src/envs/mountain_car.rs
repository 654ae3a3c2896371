//! Under-powered car in a valley; reference velocity/position update.

pub mod consts {
    pub const MIN_POSITION: f64 = -1.2;
    pub const MAX_POSITION: f64 = 0.6;
    pub const MAX_SPEED: f64 = 0.07;
    pub const GOAL_POSITION: f64 = 0.5;
    pub const GOAL_VELOCITY: f64 = 0.0;
    pub const FORCE: f64 = 0.001;
    pub const GRAVITY: f64 = 0.0025;
    pub const RESET_LOW: f64 = -0.6;
    pub const RESET_HIGH: f64 = -0.4;
}

use consts::*;

/// One physics update. State layout: [position, velocity]; actions are
/// push-left / no-push / push-right.
pub fn step(state: &mut [f64; 2], action: usize) {
    let (position, velocity) = (state[0], state[1]);
    let mut v = velocity + (action as f64 - 1.0) * FORCE + (3.0 * position).cos() * (-GRAVITY);
    v = v.clamp(-MAX_SPEED, MAX_SPEED);
    let mut p = position + v;
    p = p.clamp(MIN_POSITION, MAX_POSITION);
    if p == MIN_POSITION && v < 0.0 {
        v = 0.0;
    }
    state[0] = p;
    state[1] = v;
}

pub fn terminated(state: &[f64; 2]) -> bool {
    state[0] >= GOAL_POSITION && state[1] >= GOAL_VELOCITY
}
