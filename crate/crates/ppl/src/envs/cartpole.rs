//! Cart-pole swing balance, matching the long-stable public reference
//! dynamics: force on the cart, pole angular acceleration from the coupled
//! equations of motion, explicit Euler integration with the position updated
//! from the pre-update velocity.

/// Reference constants. The dynamics oracle in the acceptance suite reads
/// this table too, so the equations are checked against one constant source.
pub mod consts {
    pub const GRAVITY: f64 = 9.8;
    pub const MASS_CART: f64 = 1.0;
    pub const MASS_POLE: f64 = 0.1;
    pub const TOTAL_MASS: f64 = MASS_CART + MASS_POLE;
    /// Half the pole length.
    pub const LENGTH: f64 = 0.5;
    pub const POLE_MASS_LENGTH: f64 = MASS_POLE * LENGTH;
    pub const FORCE_MAG: f64 = 10.0;
    /// Integration step, seconds.
    pub const TAU: f64 = 0.02;
    /// 12 degrees.
    pub const THETA_THRESHOLD: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
    pub const X_THRESHOLD: f64 = 2.4;
    pub const RESET_BOUND: f64 = 0.05;
}

use consts::*;

/// One physics update. State layout: [x, x_dot, theta, theta_dot].
pub fn step(state: &mut [f64; 4], action: usize) {
    let force = if action == 1 { FORCE_MAG } else { -FORCE_MAG };
    let (x, x_dot, theta, theta_dot) = (state[0], state[1], state[2], state[3]);
    let cos_t = theta.cos();
    let sin_t = theta.sin();
    let temp = (force + POLE_MASS_LENGTH * theta_dot * theta_dot * sin_t) / TOTAL_MASS;
    let theta_acc = (GRAVITY * sin_t - cos_t * temp)
        / (LENGTH * (4.0 / 3.0 - MASS_POLE * cos_t * cos_t / TOTAL_MASS));
    let x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS;

    state[0] = x + TAU * x_dot;
    state[1] = x_dot + TAU * x_acc;
    state[2] = theta + TAU * theta_dot;
    state[3] = theta_dot + TAU * theta_acc;
}

pub fn terminated(state: &[f64; 4]) -> bool {
    state[0] < -X_THRESHOLD
        || state[0] > X_THRESHOLD
        || state[2] < -THETA_THRESHOLD
        || state[2] > THETA_THRESHOLD
}
