//! Two-link underactuated pendulum with the book-standard equations of
//! motion, integrated by one classic Runge-Kutta step per environment step.

pub mod consts {
    pub const DT: f64 = 0.2;
    pub const LINK_LENGTH_1: f64 = 1.0;
    pub const LINK_MASS_1: f64 = 1.0;
    pub const LINK_MASS_2: f64 = 1.0;
    pub const LINK_COM_POS_1: f64 = 0.5;
    pub const LINK_COM_POS_2: f64 = 0.5;
    pub const LINK_MOI: f64 = 1.0;
    pub const GRAVITY: f64 = 9.8;
    pub const MAX_VEL_1: f64 = 4.0 * std::f64::consts::PI;
    pub const MAX_VEL_2: f64 = 9.0 * std::f64::consts::PI;
    pub const AVAIL_TORQUE: [f64; 3] = [-1.0, 0.0, 1.0];
    pub const RESET_BOUND: f64 = 0.1;
}

use consts::*;
use std::f64::consts::PI;

/// Angular accelerations for the augmented state [th1, th2, w1, w2, torque].
fn dsdt(s: &[f64; 5]) -> [f64; 5] {
    let (m1, m2) = (LINK_MASS_1, LINK_MASS_2);
    let l1 = LINK_LENGTH_1;
    let (lc1, lc2) = (LINK_COM_POS_1, LINK_COM_POS_2);
    let (i1, i2) = (LINK_MOI, LINK_MOI);
    let g = GRAVITY;
    let (theta1, theta2, dtheta1, dtheta2, a) = (s[0], s[1], s[2], s[3], s[4]);

    let d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos()) + i1 + i2;
    let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + i2;
    let phi2 = m2 * lc2 * g * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * theta2.sin()
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * theta2.sin()
        + (m1 * lc1 + m2 * l1) * g * (theta1 - PI / 2.0).cos()
        + phi2;
    let ddtheta2 = (a + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * theta2.sin() - phi2)
        / (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
    let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    [dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0]
}

fn rk4_step(y0: &[f64; 5], dt: f64) -> [f64; 5] {
    let add = |y: &[f64; 5], k: &[f64; 5], c: f64| -> [f64; 5] {
        let mut out = *y;
        for i in 0..5 {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = dsdt(y0);
    let k2 = dsdt(&add(y0, &k1, dt / 2.0));
    let k3 = dsdt(&add(y0, &k2, dt / 2.0));
    let k4 = dsdt(&add(y0, &k3, dt));
    let mut out = *y0;
    for i in 0..5 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn wrap(mut x: f64, lo: f64, hi: f64) -> f64 {
    let diff = hi - lo;
    while x > hi {
        x -= diff;
    }
    while x < lo {
        x += diff;
    }
    x
}

/// One physics update. State layout: [theta1, theta2, omega1, omega2].
pub fn step(state: &mut [f64; 4], action: usize) {
    let aug = [state[0], state[1], state[2], state[3], AVAIL_TORQUE[action]];
    let ns = rk4_step(&aug, DT);
    state[0] = wrap(ns[0], -PI, PI);
    state[1] = wrap(ns[1], -PI, PI);
    state[2] = ns[2].clamp(-MAX_VEL_1, MAX_VEL_1);
    state[3] = ns[3].clamp(-MAX_VEL_2, MAX_VEL_2);
}

pub fn terminated(state: &[f64; 4]) -> bool {
    -state[0].cos() - (state[1] + state[0]).cos() > 1.0
}

/// Trig-embedded observation [cos t1, sin t1, cos t2, sin t2, w1, w2].
pub fn observe(state: &[f64; 4]) -> Vec<f64> {
    vec![
        state[0].cos(),
        state[0].sin(),
        state[1].cos(),
        state[1].sin(),
        state[2],
        state[3],
    ]
}
