//! Pure, stateless calculus over per-action expected-free-energy values.
//!
//! Everything here works on a finite action set: an [`EfeVector`] holds one
//! EFE value per action, a [`PolicyDistribution`] a probability per action.
//! All quantities use natural logs; argmin/argmax ties break toward the
//! lowest action index everywhere.

use crate::error::{Error, Result};
use crate::numkit::logsumexp;

/// Per-action EFE values; length is the action count, at least 2.
#[derive(Debug, Clone, PartialEq)]
pub struct EfeVector(Vec<f64>);

impl EfeVector {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        if g.len() < 2 {
            return Err(Error::InvalidArg(format!(
                "EFE vector needs at least 2 actions, got {}",
                g.len()
            )));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArg("EFE vector entries must be finite".into()));
        }
        Ok(EfeVector(g))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.0.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Index of the minimum, lowest index on ties.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.0.iter().enumerate().skip(1) {
            if v < self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Distribution over actions: non-negative, sums to 1 within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDistribution(Vec<f64>);

impl PolicyDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidArg("policy needs at least 2 actions".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArg("policy entries must be finite and >= 0".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArg(format!(
                "policy must sum to 1 within 1e-12, got {sum}"
            )));
        }
        Ok(PolicyDistribution(probs))
    }

    pub fn uniform(n: usize) -> Self {
        PolicyDistribution(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn check_same_len(q: &PolicyDistribution, g: &EfeVector) -> Result<()> {
    if q.len() != g.len() {
        return Err(Error::shape("policy vs efe vector", g.len(), q.len()));
    }
    Ok(())
}

/// Softmax-optimal policy at temperature `gamma`: probs proportional to
/// exp(-gamma * g), computed through shifted exponentials.
pub fn softmax_policy(g: &EfeVector, gamma: f64) -> Result<PolicyDistribution> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArg(format!("temperature must be > 0, got {gamma}")));
    }
    let scaled: Vec<f64> = g.values().iter().map(|&x| -gamma * x).collect();
    let m = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scaled.iter().map(|&x| (x - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(PolicyDistribution(exps.into_iter().map(|e| e / sum).collect()))
}

/// One-step substituted EFE of a first-action distribution q against
/// per-action values g: sum_a q(a) * (ln q(a) + g(a)), with 0 ln 0 = 0.
pub fn one_step_efe(q: &PolicyDistribution, g: &EfeVector) -> Result<f64> {
    check_same_len(q, g)?;
    let mut acc = 0.0;
    for (&p, &gv) in q.probs().iter().zip(g.values()) {
        if p > 0.0 {
            acc += p * (p.ln() + gv);
        }
    }
    Ok(acc)
}

/// The three terms of the temperature decomposition. Their sum reconstructs
/// `one_step_efe(q, g)` for any temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureDecomposition {
    /// (1/gamma - 1) * H(q)
    pub entropy_term: f64,
    /// (1/gamma) * KL(q || softmax_policy(g, gamma))
    pub kl_term: f64,
    /// -(1/gamma) * logsumexp(-gamma * g)
    pub lse_term: f64,
}

impl TemperatureDecomposition {
    pub fn total(&self) -> f64 {
        self.entropy_term + self.kl_term + self.lse_term
    }
}

pub fn efe_temperature_decomposition(
    q: &PolicyDistribution,
    g: &EfeVector,
    gamma: f64,
) -> Result<TemperatureDecomposition> {
    check_same_len(q, g)?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidArg(format!("temperature must be > 0, got {gamma}")));
    }
    let q_star = softmax_policy(g, gamma)?;
    let scaled: Vec<f64> = g.values().iter().map(|&x| -gamma * x).collect();
    Ok(TemperatureDecomposition {
        entropy_term: (1.0 / gamma - 1.0) * entropy(q),
        kl_term: kl(q, &q_star)? / gamma,
        lse_term: -logsumexp(&scaled) / gamma,
    })
}

/// Certified bracket for -log sum_a exp(-gamma g_a): the value always lies in
/// [gamma * min(g) - ln |A|, gamma * min(g)].
pub fn lse_min_bracket(g: &EfeVector, gamma: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArg(format!("temperature must be > 0, got {gamma}")));
    }
    let upper = gamma * g.min();
    Ok((upper - (g.len() as f64).ln(), upper))
}

/// Natural-log entropy with 0 ln 0 = 0.
pub fn entropy(q: &PolicyDistribution) -> f64 {
    -q.probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// KL(q || p). A zero in p where q has mass is an absolute-continuity
/// violation and surfaces as an error rather than infinity.
pub fn kl(q: &PolicyDistribution, p: &PolicyDistribution) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::shape("kl", p.len(), q.len()));
    }
    let mut acc = 0.0;
    for (&qa, &pa) in q.probs().iter().zip(p.probs()) {
        if qa > 0.0 {
            if pa == 0.0 {
                return Err(Error::InvalidArg(
                    "kl: q has mass where p is zero (absolute continuity violated)".into(),
                ));
            }
            acc += qa * (qa.ln() - pa.ln());
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Prng;
    use proptest::prelude::*;

    fn random_efe(rng: &mut Prng, n: usize) -> EfeVector {
        EfeVector::new((0..n).map(|_| rng.uniform_in(-5.0, 5.0)).collect()).unwrap()
    }

    fn random_policy(rng: &mut Prng, n: usize) -> PolicyDistribution {
        let raw: Vec<f64> = (0..n).map(|_| rng.uniform_in(1e-3, 1.0)).collect();
        let sum: f64 = raw.iter().sum();
        PolicyDistribution::new(raw.into_iter().map(|x| x / sum).collect()).unwrap()
    }

    #[test]
    fn softmax_constant_is_uniform() {
        let g = EfeVector::new(vec![1.7; 4]).unwrap();
        for gamma in [0.1, 1.0, 33.0] {
            let q = softmax_policy(&g, gamma).unwrap();
            for &p in q.probs() {
                assert!((p - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn softmax_hand_value() {
        // g = [0, ln 3], gamma = 1: probs proportional to [1, 1/3] -> [0.75, 0.25]
        let g = EfeVector::new(vec![0.0, 3f64.ln()]).unwrap();
        let q = softmax_policy(&g, 1.0).unwrap();
        assert!((q.probs()[0] - 0.75).abs() < 1e-12);
        assert!((q.probs()[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn softmax_sharp_limit() {
        let g = EfeVector::new(vec![0.0, 1.0]).unwrap();
        let q = softmax_policy(&g, 100.0).unwrap();
        assert!(q.probs()[0] > 1.0 - 1e-40);
    }

    #[test]
    fn softmax_rejects_bad_temperature() {
        let g = EfeVector::new(vec![0.0, 1.0]).unwrap();
        assert!(softmax_policy(&g, 0.0).is_err());
        assert!(softmax_policy(&g, -1.0).is_err());
    }

    #[test]
    fn one_step_efe_at_optimum_is_negative_lse() {
        let mut rng = Prng::new(31);
        for _ in 0..200 {
            let g = random_efe(&mut rng, 2 + rng.usize_below(6));
            let q = softmax_policy(&g, 1.0).unwrap();
            let neg: Vec<f64> = g.values().iter().map(|&x| -x).collect();
            let expected = -crate::numkit::logsumexp(&neg);
            assert!((one_step_efe(&q, &g).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn one_step_efe_uniform_two_actions_zero_g() {
        let g = EfeVector::new(vec![0.0, 0.0]).unwrap();
        let q = PolicyDistribution::uniform(2);
        assert!((one_step_efe(&q, &g).unwrap() + std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn one_step_efe_kl_identity() {
        // one_step_efe(q, g) = KL(q || q*) - logsumexp(-g), checked against
        // direct summation of both sides.
        let mut rng = Prng::new(77);
        for _ in 0..300 {
            let g = random_efe(&mut rng, 5);
            let q = random_policy(&mut rng, 5);
            let q_star = softmax_policy(&g, 1.0).unwrap();
            let neg: Vec<f64> = g.values().iter().map(|&x| -x).collect();
            let rhs = kl(&q, &q_star).unwrap() - crate::numkit::logsumexp(&neg);
            assert!((one_step_efe(&q, &g).unwrap() - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn decomposition_gamma_one_has_zero_entropy_coefficient() {
        let mut rng = Prng::new(5);
        let g = random_efe(&mut rng, 4);
        let q = random_policy(&mut rng, 4);
        let d = efe_temperature_decomposition(&q, &g, 1.0).unwrap();
        assert_eq!(d.entropy_term, 0.0);
        assert!((d.total() - one_step_efe(&q, &g).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn decomposition_kl_vanishes_at_optimum() {
        let mut rng = Prng::new(6);
        let g = random_efe(&mut rng, 3);
        let gamma = 2.5;
        let q_star = softmax_policy(&g, gamma).unwrap();
        let d = efe_temperature_decomposition(&q_star, &g, gamma).unwrap();
        assert!(d.kl_term.abs() < 1e-12);
    }

    #[test]
    fn decomposition_reconstructs_random_case() {
        let mut rng = Prng::new(7);
        for _ in 0..200 {
            let n = 2 + rng.usize_below(7);
            let g = random_efe(&mut rng, n);
            let q = random_policy(&mut rng, n);
            let d = efe_temperature_decomposition(&q, &g, 2.5).unwrap();
            assert!((d.total() - one_step_efe(&q, &g).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn bracket_constant_vector_hits_lower_bound() {
        let (c, n, gamma) = (0.9, 4usize, 1.3);
        let g = EfeVector::new(vec![c; n]).unwrap();
        let (lo, hi) = lse_min_bracket(&g, gamma).unwrap();
        let scaled: Vec<f64> = g.values().iter().map(|&x| -gamma * x).collect();
        let val = -crate::numkit::logsumexp(&scaled);
        assert!((val - (gamma * c - (n as f64).ln())).abs() < 1e-12);
        assert!((val - lo).abs() < 1e-12);
        assert!(val <= hi + 1e-12);
    }

    #[test]
    fn bracket_sharp_minimum_touches_upper() {
        let g = EfeVector::new(vec![0.0, 5.0, 7.0]).unwrap();
        let gamma = 50.0;
        let scaled: Vec<f64> = g.values().iter().map(|&x| -gamma * x).collect();
        let val = -crate::numkit::logsumexp(&scaled);
        assert!((val - gamma * g.min()).abs() < 1e-15);
    }

    #[test]
    fn bracket_contains_value() {
        let mut rng = Prng::new(8);
        for _ in 0..500 {
            let n = 2 + rng.usize_below(7);
            let g = random_efe(&mut rng, n);
            for gamma in [0.1, 1.0, 2.5, 10.0] {
                let (lo, hi) = lse_min_bracket(&g, gamma).unwrap();
                let scaled: Vec<f64> = g.values().iter().map(|&x| -gamma * x).collect();
                let val = -crate::numkit::logsumexp(&scaled);
                assert!(val >= lo - 1e-12 && val <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn entropy_uniform_is_log_n() {
        for n in 2..8 {
            let q = PolicyDistribution::uniform(n);
            assert!((entropy(&q) - (n as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn kl_self_is_zero() {
        let q = PolicyDistribution::new(vec![0.3, 0.2, 0.5]).unwrap();
        assert!(kl(&q, &q).unwrap().abs() < 1e-15);
    }

    #[test]
    fn kl_hand_value() {
        let q = PolicyDistribution::new(vec![0.75, 0.25]).unwrap();
        let p = PolicyDistribution::uniform(2);
        // 0.75 ln 1.5 + 0.25 ln 0.5 = 0.130812...
        let expected = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        let got = kl(&q, &p).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.13081).abs() < 1e-5);
    }

    #[test]
    fn kl_absolute_continuity_violation_is_error() {
        let q = PolicyDistribution::new(vec![0.5, 0.5]).unwrap();
        let p = PolicyDistribution::new(vec![1.0, 0.0]).unwrap();
        assert!(kl(&q, &p).is_err());
    }

    #[test]
    fn minimizer_property() {
        // q* attains the minimum against random challengers, equality only at q*.
        let mut rng = Prng::new(9);
        for _ in 0..200 {
            let n = 2 + rng.usize_below(7);
            let g = random_efe(&mut rng, n);
            let q_star = softmax_policy(&g, 1.0).unwrap();
            let best = one_step_efe(&q_star, &g).unwrap();
            for _ in 0..50 {
                let q = random_policy(&mut rng, n);
                let val = one_step_efe(&q, &g).unwrap();
                assert!(val >= best - 1e-9);
                let linf = q
                    .probs()
                    .iter()
                    .zip(q_star.probs())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if (val - best).abs() <= 1e-9 {
                    assert!(linf < 1e-3, "near-minimal EFE from a policy far from q*");
                }
            }
        }
    }

    #[test]
    fn expectation_identity_with_entropy() {
        // E_phi[g_a] - one_step_efe(phi, g) = H(phi), exactly.
        let mut rng = Prng::new(10);
        for _ in 0..300 {
            let n = 2 + rng.usize_below(7);
            let g = random_efe(&mut rng, n);
            let phi = random_policy(&mut rng, n);
            let expect_g: f64 = phi.probs().iter().zip(g.values()).map(|(p, v)| p * v).sum();
            let lhs = expect_g - one_step_efe(&phi, &g).unwrap();
            assert!((lhs - entropy(&phi)).abs() < 1e-12);
        }
    }

    #[test]
    fn temperature_limits() {
        let mut rng = Prng::new(11);
        for _ in 0..100 {
            let n = 2 + rng.usize_below(7);
            let g = random_efe(&mut rng, n);
            let range = g.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max) - g.min();
            // gamma -> 0: convergence to uniform
            for gamma in [1e-1, 1e-2, 1e-3] {
                let q = softmax_policy(&g, gamma).unwrap();
                let linf = q
                    .probs()
                    .iter()
                    .map(|&p| (p - 1.0 / n as f64).abs())
                    .fold(0.0, f64::max);
                assert!(linf < 3.0 * gamma * range + 1e-15);
            }
            // gamma -> inf: argmin action takes all mass and the optimal
            // one-step EFE approaches min(g)
            let gamma = 1e4;
            let q = softmax_policy(&g, gamma).unwrap();
            let q_eval = one_step_efe(&q, &g).unwrap();
            if range > 1e-2 {
                assert!(q.probs()[g.argmin()] > 0.999);
                assert!((q_eval - g.min()).abs() < 1e-2);
            }
        }
    }

    proptest! {
        #[test]
        fn softmax_shift_invariance(shift in -10.0f64..10.0, seed in 0u64..1000) {
            let mut rng = Prng::new(seed);
            let n = 2 + rng.usize_below(6);
            let g = random_efe(&mut rng, n);
            let shifted = EfeVector::new(g.values().iter().map(|&x| x + shift).collect()).unwrap();
            let a = softmax_policy(&g, 1.0).unwrap();
            let b = softmax_policy(&shifted, 1.0).unwrap();
            for (x, y) in a.probs().iter().zip(b.probs()) {
                prop_assert!((x - y).abs() < 1e-14);
            }
        }

        #[test]
        fn softmax_is_valid_distribution(seed in 0u64..1000, gamma in 0.01f64..50.0) {
            let mut rng = Prng::new(seed);
            let n = 2 + rng.usize_below(6);
            let g = random_efe(&mut rng, n);
            let q = softmax_policy(&g, gamma).unwrap();
            let sum: f64 = q.probs().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(q.probs().iter().all(|&p| p >= 0.0));
        }
    }
}
