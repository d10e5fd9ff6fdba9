//! Domain types and pointwise formulas of the signalling game.
//!
//! A large population is either susceptible or infected. Every agent receives
//! a noisy signal about its own state: the "susceptible" signal `S̄` or the
//! "infected" signal `Ī`. The signal fidelities are
//!
//! * `mu_s = P[S̄ | S]`, chosen by the sender,
//! * `mu_i = P[Ī | I]`, equal to one under the truthful-infected-signal regime.
//!
//! Recipients of each signal decide whether to protect. `z_sbar` and `z_ibar`
//! are the unprotected fractions among recipients of `S̄` and `Ī`.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

/// Epidemic and economic constants plus the infected-signal fidelity.
///
/// Construction goes through [`ModelParams::new`] (or deserialization), both
/// of which reject parameter sets violating the structural invariants.
/// Whether the analytic assumptions hold is reported separately by
/// [`validate_assumptions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelParams", into = "RawModelParams")]
pub struct ModelParams {
    /// Protection effectiveness: infection risk multiplier of a protected susceptible.
    pub alpha: f64,
    /// Recovery rate.
    pub gamma: f64,
    /// Transmission rate of a protected infected agent.
    pub beta_p: f64,
    /// Transmission rate of an unprotected infected agent.
    pub beta_u: f64,
    /// Cost of protection.
    pub c_p: f64,
    /// Cost borne by an infected agent that stays unprotected.
    pub c_u: f64,
    /// Loss of a susceptible agent upon infection.
    pub loss: f64,
    /// Fidelity of the infected signal, `P[Ī | I]`.
    pub mu_i: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModelParams {
    alpha: f64,
    gamma: f64,
    beta_p: f64,
    beta_u: f64,
    c_p: f64,
    c_u: f64,
    loss: f64,
    #[serde(default = "one")]
    mu_i: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawModelParams> for ModelParams {
    type Error = Error;

    fn try_from(r: RawModelParams) -> Result<Self> {
        let p = ModelParams {
            alpha: r.alpha,
            gamma: r.gamma,
            beta_p: r.beta_p,
            beta_u: r.beta_u,
            c_p: r.c_p,
            c_u: r.c_u,
            loss: r.loss,
            mu_i: r.mu_i,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<ModelParams> for RawModelParams {
    fn from(p: ModelParams) -> Self {
        RawModelParams {
            alpha: p.alpha,
            gamma: p.gamma,
            beta_p: p.beta_p,
            beta_u: p.beta_u,
            c_p: p.c_p,
            c_u: p.c_u,
            loss: p.loss,
            mu_i: p.mu_i,
        }
    }
}

fn open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in (0, 1)",
        })
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

impl ModelParams {
    /// Builds a validated parameter set with a truthful infected signal (`mu_i = 1`).
    pub fn new(
        alpha: f64,
        gamma: f64,
        (beta_p, beta_u): (f64, f64),
        (c_p, c_u): (f64, f64),
        loss: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            alpha,
            gamma,
            beta_p,
            beta_u,
            c_p,
            c_u,
            loss,
            mu_i: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Returns a copy with a different infected-signal fidelity.
    pub fn with_mu_i(self, mu_i: f64) -> Result<Self> {
        let p = ModelParams { mu_i, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        open_unit("alpha", self.alpha)?;
        open_unit("gamma", self.gamma)?;
        open_unit("beta_p", self.beta_p)?;
        open_unit("beta_u", self.beta_u)?;
        if self.beta_p >= self.beta_u {
            return Err(Error::InvalidParameter {
                name: "beta_p",
                value: self.beta_p,
                reason: "must be strictly below beta_u",
            });
        }
        positive("c_p", self.c_p)?;
        positive("c_u", self.c_u)?;
        positive("loss", self.loss)?;
        check_unit("mu_i", self.mu_i)
    }

    /// Parameters satisfying both analytic assumptions.
    pub fn static_sweep_satisfying() -> Self {
        ModelParams {
            alpha: 0.45,
            gamma: 0.2,
            beta_p: 0.5,
            beta_u: 0.65,
            c_p: 25.0,
            c_u: 32.0,
            loss: 80.0,
            mu_i: 1.0,
        }
    }

    /// Parameters violating the protection-cost assumption.
    pub fn static_sweep_violating() -> Self {
        ModelParams {
            beta_p: 0.7,
            beta_u: 0.9,
            c_p: 19.0,
            c_u: 20.0,
            ..Self::static_sweep_satisfying()
        }
    }

    /// Parameters of the dynamic-signalling experiments.
    pub fn dynamic_signalling() -> Self {
        ModelParams {
            c_p: 20.0,
            c_u: 25.0,
            ..Self::static_sweep_satisfying()
        }
    }

    /// `(1 - alpha) L (beta_u - gamma)`, the threshold in the protection-cost assumption.
    pub fn protection_cost_threshold(&self) -> f64 {
        (1.0 - self.alpha) * self.loss * (self.beta_u - self.gamma)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::static_sweep_satisfying()
    }
}

/// Infected proportion and the two unprotected fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationState {
    pub y: f64,
    pub z_sbar: f64,
    pub z_ibar: f64,
}

impl PopulationState {
    pub fn new(y: f64, z_sbar: f64, z_ibar: f64) -> Result<Self> {
        check_unit("y", y)?;
        check_unit("z_sbar", z_sbar)?;
        check_unit("z_ibar", z_ibar)?;
        Ok(PopulationState { y, z_sbar, z_ibar })
    }

    pub(crate) fn from_array(a: [f64; 3]) -> Self {
        PopulationState {
            y: a[0],
            z_sbar: a[1],
            z_ibar: a[2],
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.y, self.z_sbar, self.z_ibar]
    }

    /// Infinity-norm distance to another state.
    pub fn distance_inf(&self, other: &PopulationState) -> f64 {
        (self.y - other.y)
            .abs()
            .max((self.z_sbar - other.z_sbar).abs())
            .max((self.z_ibar - other.z_ibar).abs())
    }
}

impl Default for PopulationState {
    /// `(0.01, 0.5, 0.5)`, the initial condition used throughout the experiments.
    fn default() -> Self {
        PopulationState {
            y: 0.01,
            z_sbar: 0.5,
            z_ibar: 0.5,
        }
    }
}

/// Signal received by an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signal {
    /// `S̄`: "you are susceptible".
    Susceptible,
    /// `Ī`: "you are infected".
    Infected,
}

impl Signal {
    /// `(P[x | I], P[x | S])`.
    fn likelihoods(self, mu_s: f64, mu_i: f64) -> (f64, f64) {
        match self {
            Signal::Susceptible => (1.0 - mu_i, mu_s),
            Signal::Infected => (mu_i, 1.0 - mu_s),
        }
    }
}

/// Flags for the two analytic assumptions, each a pure predicate of the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `mu_i = 1`.
    pub a1_truthful: bool,
    /// `c_p < c_u`.
    pub a1_costs: bool,
    /// `gamma < alpha * beta_p`.
    pub a1_recovery: bool,
    /// `c_p > (1 - alpha) L (beta_u - gamma)`.
    pub a2_protection_cost: bool,
}

impl AssumptionReport {
    pub fn well_posed(&self) -> bool {
        self.a1_truthful && self.a1_costs && self.a1_recovery
    }

    pub fn protection_cost_high(&self) -> bool {
        self.a2_protection_cost
    }
}

pub fn validate_assumptions(p: &ModelParams) -> AssumptionReport {
    AssumptionReport {
        a1_truthful: p.mu_i == 1.0,
        a1_costs: p.c_p < p.c_u,
        a1_recovery: p.gamma < p.alpha * p.beta_p,
        a2_protection_cost: p.c_p > p.protection_cost_threshold(),
    }
}

/// Mean transmission rate of an infected agent, the first factor of the effective rate.
#[inline]
pub(crate) fn infector_rate(z_sbar: f64, z_ibar: f64, p: &ModelParams) -> f64 {
    p.beta_p + (p.beta_u - p.beta_p) * (z_ibar * p.mu_i + z_sbar * (1.0 - p.mu_i))
}

/// Mean susceptibility of a susceptible agent, the second factor of the effective rate.
#[inline]
pub(crate) fn susceptibility(z_sbar: f64, z_ibar: f64, mu_s: f64, p: &ModelParams) -> f64 {
    p.alpha + (1.0 - p.alpha) * (z_sbar * mu_s + z_ibar * (1.0 - mu_s))
}

#[inline]
pub(crate) fn beta_eff_unchecked(z_sbar: f64, z_ibar: f64, mu_s: f64, p: &ModelParams) -> f64 {
    infector_rate(z_sbar, z_ibar, p) * susceptibility(z_sbar, z_ibar, mu_s, p)
}

/// Effective infection rate `beta_eff(z_sbar, z_ibar; mu_s)`, bounded by
/// `[alpha * beta_p, beta_u]`.
pub fn beta_eff(s: &PopulationState, mu_s: f64, p: &ModelParams) -> Result<f64> {
    check_unit("mu_s", mu_s)?;
    Ok(beta_eff_unchecked(s.z_sbar, s.z_ibar, mu_s, p))
}

/// Posterior probability of being infected after receiving `signal` with prior `y`.
///
/// When the signal is impossible under both states (zero denominator) the
/// prior is returned.
pub fn posterior_infected(y: f64, signal: Signal, mu_s: f64, mu_i: f64) -> Result<f64> {
    check_unit("y", y)?;
    check_unit("mu_s", mu_s)?;
    check_unit("mu_i", mu_i)?;
    let (l_inf, l_sus) = signal.likelihoods(mu_s, mu_i);
    let num = l_inf * y;
    let den = num + l_sus * (1.0 - y);
    if den == 0.0 {
        Ok(y)
    } else {
        Ok(num / den)
    }
}

/// `P[S | x]` as used in the utility difference. A signal that one state can
/// never produce identifies the other state exactly, independent of the prior.
#[inline]
fn posterior_susceptible_for_utility(y: f64, signal: Signal, mu_s: f64, mu_i: f64) -> f64 {
    let (l_inf, l_sus) = signal.likelihoods(mu_s, mu_i);
    if l_inf == 0.0 {
        return 1.0;
    }
    if l_sus == 0.0 {
        return 0.0;
    }
    let num = l_sus * (1.0 - y);
    let den = num + l_inf * y;
    if den == 0.0 {
        1.0 - y
    } else {
        num / den
    }
}

#[inline]
pub(crate) fn delta_u_unchecked(
    s: &PopulationState,
    signal: Signal,
    mu_s: f64,
    p: &ModelParams,
) -> f64 {
    let pi_s = posterior_susceptible_for_utility(s.y, signal, mu_s, p.mu_i);
    let exposure = (1.0 - p.alpha) * p.loss * infector_rate(s.z_sbar, s.z_ibar, p) * s.y;
    pi_s * (exposure - p.c_u) + p.c_u - p.c_p
}

/// Expected-utility gain of protecting over staying unprotected, for an agent
/// holding `signal`. Positive means protection is strictly preferred.
///
/// With `mu_i = 1` this is exactly
/// `ΔU[S̄] = (1-α) L [β_P + (β_U-β_P) z_Ī] y - C_P` and
/// `ΔU[Ī] = π[S|Ī] ((1-α) L [β_P + (β_U-β_P) z_Ī] y - C_U) + C_U - C_P`.
/// For `mu_i < 1` the same expected-utility construction is applied with the
/// general posterior and infector rate.
pub fn delta_u(s: &PopulationState, signal: Signal, mu_s: f64, p: &ModelParams) -> Result<f64> {
    check_unit("y", s.y)?;
    check_unit("z_sbar", s.z_sbar)?;
    check_unit("z_ibar", s.z_ibar)?;
    check_unit("mu_s", mu_s)?;
    Ok(delta_u_unchecked(s, signal, mu_s, p))
}

/// Endemic infected proportion `1 - gamma / beta_eff`.
pub fn y_ee(z_sbar: f64, z_ibar: f64, mu_s: f64, p: &ModelParams) -> Result<f64> {
    check_unit("z_sbar", z_sbar)?;
    check_unit("z_ibar", z_ibar)?;
    check_unit("mu_s", mu_s)?;
    let b = beta_eff_unchecked(z_sbar, z_ibar, mu_s, p);
    if b <= p.gamma {
        return Err(Error::NoEndemicEquilibrium {
            beta_eff: b,
            gamma: p.gamma,
        });
    }
    Ok(1.0 - p.gamma / b)
}

fn truthful(p: &ModelParams) -> ModelParams {
    ModelParams { mu_i: 1.0, ..*p }
}

/// `h(z_ibar, mu_s)`: utility gain of protection for an `S̄` recipient at the
/// endemic level reached with `z_sbar = 1`. Evaluated with a truthful
/// infected signal regardless of `p.mu_i`.
pub fn h_fn(z_ibar: f64, mu_s: f64, p: &ModelParams) -> Result<f64> {
    let p = truthful(p);
    let y = y_ee(1.0, z_ibar, mu_s, &p)?;
    Ok((1.0 - p.alpha) * p.loss * (p.beta_p + (p.beta_u - p.beta_p) * z_ibar) * y - p.c_p)
}

/// `g(z_ibar, mu_s) = y (C_U - C_P) + (1 - mu_s)(1 - y) h`, with `y = y_EE(1, z_ibar; mu_s)`.
///
/// `g` is `ΔU[Ī]` scaled by the positive probability of receiving `Ī`, so its
/// sign is the sign of the `Ī` recipients' preference for protection.
pub fn g_fn(z_ibar: f64, mu_s: f64, p: &ModelParams) -> Result<f64> {
    let tp = truthful(p);
    let y = y_ee(1.0, z_ibar, mu_s, &tp)?;
    let h = h_fn(z_ibar, mu_s, &tp)?;
    Ok(y * (p.c_u - p.c_p) - (1.0 - mu_s) * (1.0 - y) * (-h))
}

/// `1 / (1 + e^x)`, evaluated without overflow for any finite `x`.
#[inline]
pub fn logistic_complement(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sat() -> ModelParams {
        ModelParams::static_sweep_satisfying()
    }

    #[test]
    fn assumption_flags_for_reference_sets() {
        let r = validate_assumptions(&sat());
        assert!(r.a1_truthful && r.a1_costs && r.a1_recovery && r.a2_protection_cost);
        assert_abs_diff_eq!(sat().protection_cost_threshold(), 19.8, epsilon = 1e-12);

        let r = validate_assumptions(&ModelParams::static_sweep_violating());
        assert!(r.a1_truthful && r.a1_costs && r.a1_recovery);
        assert!(!r.a2_protection_cost);
    }

    #[test]
    fn recovery_flag_is_strict() {
        let mut p = sat();
        p.gamma = p.alpha * p.beta_p;
        assert!(!validate_assumptions(&p).a1_recovery);
    }

    #[test]
    fn construction_rejects_bad_rates() {
        assert!(ModelParams::new(0.45, 0.2, (0.7, 0.6), (25.0, 32.0), 80.0).is_err());
        assert!(ModelParams::new(1.0, 0.2, (0.5, 0.6), (25.0, 32.0), 80.0).is_err());
        assert!(ModelParams::new(0.45, 0.2, (0.5, 0.6), (-1.0, 32.0), 80.0).is_err());
        assert!(sat().with_mu_i(1.2).is_err());
        assert!(ModelParams::new(0.45, 0.2, (0.5, 0.65), (25.0, 32.0), 80.0).is_ok());
    }

    #[test]
    fn deserialization_validates_and_rejects_unknown_keys() {
        let ok =
            r#"{"alpha":0.45,"gamma":0.2,"beta_p":0.5,"beta_u":0.65,"c_p":25,"c_u":32,"loss":80}"#;
        let p: ModelParams = serde_json::from_str(ok).unwrap();
        assert_eq!(p, sat());
        let bad =
            r#"{"alpha":0.45,"gamma":0.2,"beta_p":0.9,"beta_u":0.65,"c_p":25,"c_u":32,"loss":80}"#;
        assert!(serde_json::from_str::<ModelParams>(bad).is_err());
        let extra = r#"{"alpha":0.45,"gamma":0.2,"beta_p":0.5,"beta_u":0.65,"c_p":25,"c_u":32,"loss":80,"x":1}"#;
        assert!(serde_json::from_str::<ModelParams>(extra).is_err());
    }

    #[test]
    fn beta_eff_corners() {
        let p = sat();
        let lo = PopulationState::new(0.3, 0.0, 0.0).unwrap();
        let hi = PopulationState::new(0.3, 1.0, 1.0).unwrap();
        for mu in [0.0, 0.3, 1.0] {
            assert_abs_diff_eq!(beta_eff(&lo, mu, &p).unwrap(), 0.225, epsilon = 1e-15);
            assert_abs_diff_eq!(beta_eff(&hi, mu, &p).unwrap(), p.beta_u, epsilon = 1e-15);
        }
        let mid = PopulationState::new(0.3, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            beta_eff(&mid, 0.566, &p).unwrap(),
            0.5 * (0.45 + 0.55 * 0.566),
            epsilon = 1e-15
        );
        assert!(beta_eff(&mid, 1.5, &p).is_err());
    }

    #[test]
    fn posterior_examples() {
        assert_eq!(
            posterior_infected(0.0, Signal::Infected, 0.5, 1.0).unwrap(),
            0.0
        );
        assert_eq!(
            posterior_infected(0.3, Signal::Infected, 1.0, 1.0).unwrap(),
            1.0
        );
        // Bayes: 0.5 / (0.5 + 0.5 * 0.5)
        assert_abs_diff_eq!(
            posterior_infected(0.5, Signal::Infected, 0.5, 1.0).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        // Impossible event keeps the prior.
        assert_eq!(
            posterior_infected(1.0, Signal::Infected, 0.5, 0.0).unwrap(),
            1.0
        );
        assert!(posterior_infected(0.5, Signal::Infected, -0.1, 1.0).is_err());
    }

    #[test]
    fn delta_u_examples() {
        let p = sat();
        let s0 = PopulationState::new(0.0, 0.4, 0.7).unwrap();
        assert_eq!(delta_u(&s0, Signal::Susceptible, 0.5, &p).unwrap(), -p.c_p);
        assert_abs_diff_eq!(
            delta_u(&s0, Signal::Infected, 0.5, &p).unwrap(),
            -p.c_p,
            epsilon = 1e-12
        );

        let s = PopulationState::new(0.4, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            delta_u(&s, Signal::Susceptible, 0.566, &p).unwrap(),
            0.55 * 80.0 * 0.5 * 0.4 - 25.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            delta_u(&s, Signal::Susceptible, 0.566, &p).unwrap(),
            -16.2,
            epsilon = 1e-12
        );

        // A perfect signal makes Ī recipients certain they are infected.
        for y in [0.1, 0.5, 0.9] {
            let s = PopulationState::new(y, 0.3, 0.6).unwrap();
            assert_abs_diff_eq!(
                delta_u(&s, Signal::Infected, 1.0, &p).unwrap(),
                p.c_u - p.c_p,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn delta_u_matches_two_signal_formulas_when_truthful() {
        let p = sat();
        let s = PopulationState::new(0.37, 0.8, 0.25).unwrap();
        let mu = 0.41;
        let exposure =
            (1.0 - p.alpha) * p.loss * (p.beta_p + (p.beta_u - p.beta_p) * s.z_ibar) * s.y;
        let pi_s = (1.0 - mu) * (1.0 - s.y) / (s.y + (1.0 - mu) * (1.0 - s.y));
        assert_abs_diff_eq!(
            delta_u(&s, Signal::Susceptible, mu, &p).unwrap(),
            exposure - p.c_p,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            delta_u(&s, Signal::Infected, mu, &p).unwrap(),
            pi_s * (exposure - p.c_u) + p.c_u - p.c_p,
            epsilon = 1e-12
        );
    }

    #[test]
    fn y_ee_examples() {
        let p = sat();
        assert_abs_diff_eq!(
            y_ee(1.0, 1.0, 0.3, &p).unwrap(),
            1.0 - 0.2 / 0.65,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(y_ee(1.0, 1.0, 0.3, &p).unwrap(), 0.6923, epsilon = 1e-4);
        assert_abs_diff_eq!(
            y_ee(0.0, 0.0, 0.3, &p).unwrap(),
            1.0 - 0.2 / 0.225,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(y_ee(0.0, 0.0, 0.3, &p).unwrap(), 0.1111, epsilon = 1e-4);

        let mut q = p;
        q.gamma = q.alpha * q.beta_p;
        assert!(matches!(
            y_ee(0.0, 0.0, 0.3, &q),
            Err(Error::NoEndemicEquilibrium { .. })
        ));
    }

    #[test]
    fn g_at_perfect_signal_is_positive() {
        let p = sat();
        for z in [0.0, 0.25, 0.5, 1.0] {
            let g = g_fn(z, 1.0, &p).unwrap();
            let y = y_ee(1.0, z, 1.0, &p).unwrap();
            assert_abs_diff_eq!(g, y * (p.c_u - p.c_p), epsilon = 1e-12);
            assert!(g > 0.0);
        }
    }

    #[test]
    fn g_is_scaled_delta_u_of_infected_signal() {
        let p = sat();
        for &(z, mu) in &[(0.1, 0.2), (0.6, 0.5), (0.9, 0.05)] {
            let y = y_ee(1.0, z, mu, &p).unwrap();
            let s = PopulationState::new(y, 1.0, z).unwrap();
            let du = delta_u(&s, Signal::Infected, mu, &p).unwrap();
            let d = y + (1.0 - mu) * (1.0 - y);
            assert_abs_diff_eq!(g_fn(z, mu, &p).unwrap(), d * du, epsilon = 1e-10);
            let hs = delta_u(&s, Signal::Susceptible, mu, &p).unwrap();
            assert_abs_diff_eq!(h_fn(z, mu, &p).unwrap(), hs, epsilon = 1e-10);
        }
    }

    #[test]
    fn logistic_complement_is_overflow_safe() {
        assert_eq!(logistic_complement(0.0), 0.5);
        assert_eq!(logistic_complement(1e4), 0.0);
        assert_eq!(logistic_complement(-1e4), 1.0);
        assert_abs_diff_eq!(
            logistic_complement(2.0) + logistic_complement(-2.0),
            1.0,
            epsilon = 1e-15
        );
    }
}
