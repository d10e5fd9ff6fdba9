//! Stationary Nash equilibria under a static signal and the optimal static signal.
//!
//! With a truthful infected signal the equilibrium falls into one of five
//! mutually exclusive regimes, selected by the signal thresholds
//! `mu_s_min` / `mu_s_max` and the indifference level `y_int`:
//!
//! | case | `(y*, z*_S̄, z*_Ī)` |
//! |------|----------------------|
//! | 1 | `(y_p, 0, 0)` |
//! | 2 | `(y_int, z†_S̄, 0)` |
//! | 3 | `(y_EE(1, 0; mu_s), 1, 0)` |
//! | 4 | `(y_EE(1, z†_Ī; mu_s), 1, z†_Ī)` with `g(z†_Ī, mu_s) = 0` |
//! | 5 | `(1 - gamma / beta_u, 1, 1)` |
//!
//! Every result is checked against the mixed complementarity conditions
//! before it is returned.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::model::{
    delta_u_unchecked, g_fn, validate_assumptions, y_ee, ModelParams, PopulationState, Signal,
};
use crate::roots::Bisection;

/// Residual bound on `ΔU` at an interior strategy, and slack on corner signs.
pub const INDIFFERENCE_TOL: f64 = 1e-6;
/// Bound on `|y* - y_EE(z*)|`.
pub const FIXED_POINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Below this signal nobody protects. May be negative.
    pub mu_s_min: f64,
    /// Signal at which the interior root `z†_Ī` reaches zero; in `[0, 1)`.
    pub mu_s_max: f64,
    /// Endemic level when everyone protects, `1 - gamma / (alpha beta_p)`.
    pub y_star_p: f64,
    /// Level at which `S̄` recipients are indifferent, `C_P / (L (1 - alpha) beta_p)`.
    pub y_star_int: f64,
}

/// The five equilibrium regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SneCase {
    /// Everyone protects.
    #[serde(rename = "Case1")]
    AllProtect,
    /// `S̄` recipients mix, `Ī` recipients protect.
    #[serde(rename = "Case2")]
    SusceptibleSignalMixes,
    /// Only `Ī` recipients protect.
    #[serde(rename = "Case3")]
    InfectedSignalProtects,
    /// `S̄` recipients stay unprotected, `Ī` recipients mix.
    #[serde(rename = "Case4")]
    InfectedSignalMixes,
    /// Nobody protects.
    #[serde(rename = "Case5")]
    NoneProtect,
}

impl SneCase {
    pub fn number(self) -> u8 {
        match self {
            SneCase::AllProtect => 1,
            SneCase::SusceptibleSignalMixes => 2,
            SneCase::InfectedSignalProtects => 3,
            SneCase::InfectedSignalMixes => 4,
            SneCase::NoneProtect => 5,
        }
    }
}

impl std::fmt::Display for SneCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Case{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SneResult {
    pub y_star: f64,
    pub z_sbar_star: f64,
    pub z_ibar_star: f64,
    pub case_id: SneCase,
    pub mu_s: f64,
}

impl SneResult {
    pub fn state(&self) -> PopulationState {
        PopulationState {
            y: self.y_star,
            z_sbar: self.z_sbar_star,
            z_ibar: self.z_ibar_star,
        }
    }
}

/// Residuals of the equilibrium conditions at a candidate triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplementarityReport {
    pub delta_u_sbar: f64,
    pub delta_u_ibar: f64,
    /// `|y* - y_EE(z*_S̄, z*_Ī; mu_s)|`.
    pub fixed_point_residual: f64,
    pub sbar_ok: bool,
    pub ibar_ok: bool,
}

impl ComplementarityReport {
    pub fn holds(&self) -> bool {
        self.sbar_ok && self.ibar_ok && self.fixed_point_residual < FIXED_POINT_TOL
    }
}

fn strategy_ok(z: f64, du: f64) -> bool {
    if z <= 0.0 {
        du >= -INDIFFERENCE_TOL
    } else if z >= 1.0 {
        du <= INDIFFERENCE_TOL
    } else {
        du.abs() < INDIFFERENCE_TOL
    }
}

/// Checks the fixed-point and mixed complementarity conditions:
/// `ΔU > 0 ⟹ z = 0`, `ΔU < 0 ⟹ z = 1`, and `|ΔU| < 1e-6` at interior `z`.
pub fn complementarity(sne: &SneResult, p: &ModelParams) -> Result<ComplementarityReport> {
    let s = sne.state();
    let y_fp = y_ee(s.z_sbar, s.z_ibar, sne.mu_s, p)?;
    let du_s = delta_u_unchecked(&s, Signal::Susceptible, sne.mu_s, p);
    let du_i = delta_u_unchecked(&s, Signal::Infected, sne.mu_s, p);
    Ok(ComplementarityReport {
        delta_u_sbar: du_s,
        delta_u_ibar: du_i,
        fixed_point_residual: (sne.y_star - y_fp).abs(),
        sbar_ok: strategy_ok(s.z_sbar, du_s),
        ibar_ok: strategy_ok(s.z_ibar, du_i),
    })
}

fn require_well_posed(p: &ModelParams) -> Result<()> {
    let r = validate_assumptions(p);
    if !r.a1_truthful {
        return Err(Error::AssumptionViolated("mu_i = 1"));
    }
    if !r.a1_costs {
        return Err(Error::AssumptionViolated("c_p < c_u"));
    }
    if !r.a1_recovery {
        return Err(Error::AssumptionViolated("gamma < alpha * beta_p"));
    }
    Ok(())
}

/// Closed-form `mu_s_min`.
pub fn mu_s_min(p: &ModelParams) -> f64 {
    1.0 - (p.beta_u - p.gamma) * (p.c_u - p.c_p)
        / (p.gamma * (p.c_p - p.protection_cost_threshold()))
}

pub fn thresholds(p: &ModelParams) -> Result<Thresholds> {
    require_well_posed(p)?;
    let bisect = Bisection::default();
    let g00 = g_fn(0.0, 0.0, p)?;
    let mu_s_max = if g00 >= 0.0 {
        0.0
    } else {
        bisect.solve(|m| g_fn(0.0, m, p), 0.0, 1.0)?
    };
    Ok(Thresholds {
        mu_s_min: mu_s_min(p),
        mu_s_max,
        y_star_p: 1.0 - p.gamma / (p.alpha * p.beta_p),
        y_star_int: p.c_p / (p.loss * (1.0 - p.alpha) * p.beta_p),
    })
}

/// Interior root `z†_Ī` of `g(·, mu_s)` on `[0, 1]`.
pub fn z_dagger_ibar(mu_s: f64, p: &ModelParams) -> Result<f64> {
    check_unit("mu_s", mu_s)?;
    Bisection::default().solve(|z| g_fn(z, mu_s, p), 0.0, 1.0)
}

/// Mixed strategy of `S̄` recipients in case 2.
pub fn z_dagger_sbar(mu_s: f64, th: &Thresholds, p: &ModelParams) -> f64 {
    let yi = th.y_star_int;
    (p.gamma - p.alpha * p.beta_p * (1.0 - yi)) / (p.beta_p * (1.0 - p.alpha) * (1.0 - yi) * mu_s)
}

/// Parameters bundled with their precomputed thresholds, for repeated classification.
#[derive(Debug, Clone, Copy)]
pub struct Equilibria {
    pub params: ModelParams,
    pub thresholds: Thresholds,
}

impl Equilibria {
    pub fn new(p: &ModelParams) -> Result<Self> {
        Ok(Equilibria {
            params: *p,
            thresholds: thresholds(p)?,
        })
    }

    /// Selects the regime for `mu_s` (cases tested in the order 5, 4, 3, 2, 1)
    /// and returns its equilibrium, verified against complementarity.
    pub fn classify(&self, mu_s: f64) -> Result<SneResult> {
        check_unit("mu_s", mu_s)?;
        let p = &self.params;
        let th = &self.thresholds;
        let threshold = p.protection_cost_threshold();
        let a2 = p.c_p > threshold;
        // 1 - gamma / (beta_p (alpha + (1 - alpha) mu_s)): endemic level with only Ī protecting.
        let y_only_ibar = 1.0 - p.gamma / (p.beta_p * (p.alpha + (1.0 - p.alpha) * mu_s));

        let (case_id, y_star, z_sbar_star, z_ibar_star) = if a2 && mu_s <= th.mu_s_min {
            (SneCase::NoneProtect, 1.0 - p.gamma / p.beta_u, 1.0, 1.0)
        } else if mu_s < th.mu_s_max && ((a2 && mu_s > th.mu_s_min) || threshold > p.c_p) {
            let z = z_dagger_ibar(mu_s, p)?;
            (SneCase::InfectedSignalMixes, y_ee(1.0, z, mu_s, p)?, 1.0, z)
        } else if mu_s >= th.mu_s_max && y_only_ibar <= th.y_star_int {
            (
                SneCase::InfectedSignalProtects,
                y_ee(1.0, 0.0, mu_s, p)?,
                1.0,
                0.0,
            )
        } else if th.y_star_p <= th.y_star_int && th.y_star_int < y_only_ibar && mu_s > 0.0 {
            let z = z_dagger_sbar(mu_s, th, p).clamp(0.0, 1.0);
            (SneCase::SusceptibleSignalMixes, th.y_star_int, z, 0.0)
        } else if th.y_star_p >= th.y_star_int {
            (SneCase::AllProtect, th.y_star_p, 0.0, 0.0)
        } else {
            return Err(Error::NoCaseMatched { mu_s });
        };

        let sne = SneResult {
            y_star,
            z_sbar_star,
            z_ibar_star,
            case_id,
            mu_s,
        };
        let report = complementarity(&sne, p)?;
        if !report.holds() {
            return Err(Error::Complementarity {
                mu_s,
                detail: format!("{case_id}: {report:?}"),
            });
        }
        Ok(sne)
    }

    /// Residual of the implicit closed form for the interior root at `mu_s`:
    ///
    /// `z† = C_P w / (L (w - γ)(1 - α)(β_U - β_P)) - (C_U - C_P) / L_eq - β_P / (β_U - β_P)`
    ///
    /// where `w = β_eff(1, z†; mu_s)` and
    /// `L_eq = (1 - α) L (β_U - β_P)(1 - mu_s)(1 - y_EE(1, z†; mu_s))`.
    /// Returns `(z†, |z† - rhs|)`.
    pub fn interior_root_identity(&self, mu_s: f64) -> Result<(f64, f64)> {
        let p = &self.params;
        let z = z_dagger_ibar(mu_s, p)?;
        let dbeta = p.beta_u - p.beta_p;
        let w = (p.beta_p + dbeta * z) * (p.alpha + (1.0 - p.alpha) * (z + (1.0 - z) * mu_s));
        let y = 1.0 - p.gamma / w;
        let l_eq = (1.0 - p.alpha) * p.loss * dbeta * (1.0 - mu_s) * (1.0 - y);
        let rhs = p.c_p * w / (p.loss * (w - p.gamma) * (1.0 - p.alpha) * dbeta)
            - (p.c_u - p.c_p) / l_eq
            - p.beta_p / dbeta;
        Ok((z, (z - rhs).abs()))
    }
}

pub fn classify_sne(mu_s: f64, p: &ModelParams) -> Result<SneResult> {
    Equilibria::new(p)?.classify(mu_s)
}

/// How the optimal static signal was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaticMethod {
    /// `mu_s_max`, optimal whenever the protection-cost assumption holds.
    Threshold,
    /// Brute-force minimum over the fallback grid.
    GridSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticOptimum {
    pub mu_s: f64,
    pub sne: SneResult,
    pub method: StaticMethod,
}

pub const FALLBACK_GRID_START: f64 = 0.005;
pub const FALLBACK_GRID_END: f64 = 0.995;
pub const FALLBACK_GRID_STEP: f64 = 0.005;

/// `n` points `start + i * step`, computed by index to avoid drift.
pub fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    if end < start {
        return Vec::new();
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| start + i as f64 * step).collect()
}

/// Signal minimizing the equilibrium infected proportion.
///
/// Returns `mu_s_max` when the protection-cost assumption holds. Otherwise
/// searches `[0.005, 0.995]` in steps of `0.005` and reports the smallest
/// `y*` (first index on ties).
pub fn optimal_static_signal(p: &ModelParams) -> Result<StaticOptimum> {
    let eq = Equilibria::new(p)?;
    if validate_assumptions(p).protection_cost_high() {
        let mu = eq.thresholds.mu_s_max;
        return Ok(StaticOptimum {
            mu_s: mu,
            sne: eq.classify(mu)?,
            method: StaticMethod::Threshold,
        });
    }
    let mut best: Option<SneResult> = None;
    for mu in grid(FALLBACK_GRID_START, FALLBACK_GRID_END, FALLBACK_GRID_STEP) {
        let sne = eq.classify(mu)?;
        if best.is_none_or(|b| sne.y_star < b.y_star) {
            best = Some(sne);
        }
    }
    let sne = best.expect("fallback grid is non-empty");
    Ok(StaticOptimum {
        mu_s: sne.mu_s,
        sne,
        method: StaticMethod::GridSearch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCheck {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub holds: bool,
    /// First consecutive pair `(mu_a, mu_b)` breaking the expected order.
    pub first_violation: Option<(f64, f64)>,
}

fn check_monotone(mus: &[f64], ys: &[f64], decreasing: bool) -> MonotoneCheck {
    let first_violation = mus
        .windows(2)
        .zip(ys.windows(2))
        .find(|(_, y)| {
            if decreasing {
                y[1] >= y[0]
            } else {
                y[1] <= y[0]
            }
        })
        .map(|(m, _)| (m[0], m[1]));
    MonotoneCheck {
        lo: mus.first().copied().unwrap_or(f64::NAN),
        hi: mus.last().copied().unwrap_or(f64::NAN),
        points: mus.len(),
        holds: first_violation.is_none(),
        first_violation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCertificate {
    /// `y_EE(1, z†_Ī(mu_s); mu_s)` strictly decreasing on `(max(0, mu_s_min), mu_s_max)`.
    pub decreasing_below_max: MonotoneCheck,
    /// `y_EE(1, 0; mu_s)` strictly increasing on `[mu_s_max, 1]`.
    pub increasing_above_max: MonotoneCheck,
}

impl MonotonicityCertificate {
    pub fn holds(&self) -> bool {
        self.decreasing_below_max.holds && self.increasing_above_max.holds
    }
}

/// Numerically certifies that the equilibrium infected level decreases in
/// the signal up to `mu_s_max` and increases after it, on `grid_n` samples
/// per side.
pub fn monotonicity_certificate(p: &ModelParams, grid_n: usize) -> Result<MonotonicityCertificate> {
    if !validate_assumptions(p).protection_cost_high() {
        return Err(Error::AssumptionViolated(
            "c_p > (1 - alpha) L (beta_u - gamma) is required for the monotonicity certificate",
        ));
    }
    let eq = Equilibria::new(p)?;
    let th = eq.thresholds;
    if th.mu_s_max <= 0.0 {
        return Err(Error::AssumptionViolated("mu_s_max > 0"));
    }
    let n = grid_n.max(2);
    let lo = th.mu_s_min.max(0.0);
    let width = th.mu_s_max - lo;
    let below: Vec<f64> = (1..=n)
        .map(|i| lo + width * i as f64 / (n + 1) as f64)
        .collect();
    let y_below = below
        .iter()
        .map(|&m| z_dagger_ibar(m, p).and_then(|z| y_ee(1.0, z, m, p)))
        .collect::<Result<Vec<_>>>()?;
    let above: Vec<f64> = (0..n)
        .map(|i| th.mu_s_max + (1.0 - th.mu_s_max) * i as f64 / (n - 1) as f64)
        .collect();
    let y_above = above
        .iter()
        .map(|&m| y_ee(1.0, 0.0, m, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotonicityCertificate {
        decreasing_below_max: check_monotone(&below, &y_below, true),
        increasing_above_max: check_monotone(&above, &y_above, false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::h_fn;
    use approx::assert_abs_diff_eq;

    fn sat() -> ModelParams {
        ModelParams::static_sweep_satisfying()
    }

    #[test]
    fn reported_thresholds() {
        let th = thresholds(&sat()).unwrap();
        assert_abs_diff_eq!(th.mu_s_min, -2.028, epsilon = 1e-3);
        assert_abs_diff_eq!(th.mu_s_max, 0.566, epsilon = 2e-3);
        assert!(g_fn(0.0, th.mu_s_max, &sat()).unwrap().abs() < 1e-10);

        let th = thresholds(&ModelParams::static_sweep_violating()).unwrap();
        assert_abs_diff_eq!(th.mu_s_max, 0.349, epsilon = 2e-3);

        let th = thresholds(&ModelParams::dynamic_signalling()).unwrap();
        assert_abs_diff_eq!(th.mu_s_max, 0.548, epsilon = 2e-3);
    }

    #[test]
    fn thresholds_closed_forms() {
        let p = sat();
        let th = thresholds(&p).unwrap();
        // (0.45 * 7) / (0.2 * (25 - 19.8))
        assert_abs_diff_eq!(th.mu_s_min, 1.0 - 3.15 / 1.04, epsilon = 1e-12);
        assert_abs_diff_eq!(th.y_star_p, 1.0 - 0.2 / 0.225, epsilon = 1e-15);
        assert_abs_diff_eq!(th.y_star_int, 25.0 / 22.0, epsilon = 1e-15);
    }

    #[test]
    fn thresholds_require_well_posed() {
        let p = sat().with_mu_i(0.9).unwrap();
        assert!(matches!(thresholds(&p), Err(Error::AssumptionViolated(_))));
        let mut q = sat();
        q.c_u = 20.0;
        assert!(matches!(thresholds(&q), Err(Error::AssumptionViolated(_))));
    }

    #[test]
    fn mu_s_max_zero_when_g_starts_nonnegative() {
        // A tiny protection cost makes Ī recipients protect even with an uninformative signal.
        let p = ModelParams::new(0.45, 0.2, (0.5, 0.65), (1.0, 32.0), 80.0).unwrap();
        assert!(g_fn(0.0, 0.0, &p).unwrap() >= 0.0);
        assert_eq!(thresholds(&p).unwrap().mu_s_max, 0.0);
    }

    #[test]
    fn classify_examples() {
        let p = sat();
        let eq = Equilibria::new(&p).unwrap();
        let s = eq.classify(0.3).unwrap();
        assert_eq!(s.case_id, SneCase::InfectedSignalMixes);
        assert_eq!(s.z_sbar_star, 1.0);
        assert!(s.z_ibar_star > 0.0 && s.z_ibar_star < 1.0);

        let s = eq.classify(0.8).unwrap();
        assert_eq!(s.case_id, SneCase::InfectedSignalProtects);
        assert_eq!((s.z_sbar_star, s.z_ibar_star), (1.0, 0.0));
        assert_abs_diff_eq!(s.y_star, y_ee(1.0, 0.0, 0.8, &p).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn violating_set_reaches_case2() {
        let p = ModelParams::static_sweep_violating();
        let eq = Equilibria::new(&p).unwrap();
        let s = eq.classify(0.9).unwrap();
        assert_eq!(s.case_id, SneCase::SusceptibleSignalMixes);
        assert_abs_diff_eq!(s.y_star, eq.thresholds.y_star_int, epsilon = 1e-15);
        assert!(s.z_sbar_star > 0.0 && s.z_sbar_star < 1.0);
    }

    #[test]
    fn all_protect_case() {
        // Cheap protection and a large loss push the indifference level below y_p.
        let p = ModelParams::new(0.45, 0.1, (0.5, 0.65), (1.0, 2.0), 80.0).unwrap();
        let eq = Equilibria::new(&p).unwrap();
        assert!(eq.thresholds.y_star_p > eq.thresholds.y_star_int);
        let s = eq.classify(0.9).unwrap();
        assert_eq!(s.case_id, SneCase::AllProtect);
    }

    #[test]
    fn none_protect_case() {
        // mu_s_min > 0 requires c_p only slightly above the assumption threshold.
        let p = ModelParams::new(0.45, 0.2, (0.5, 0.65), (25.0, 26.0), 80.0).unwrap();
        let eq = Equilibria::new(&p).unwrap();
        assert!(eq.thresholds.mu_s_min > 0.0, "{:?}", eq.thresholds);
        let s = eq.classify(eq.thresholds.mu_s_min * 0.5).unwrap();
        assert_eq!(s.case_id, SneCase::NoneProtect);
        assert_abs_diff_eq!(s.y_star, 1.0 - 0.2 / 0.65, epsilon = 1e-15);
    }

    #[test]
    fn interior_root_vanishes_at_threshold() {
        let p = sat();
        let th = thresholds(&p).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
            let z = z_dagger_ibar(th.mu_s_max - eps, &p).unwrap();
            assert!(z > 0.0 && z < prev);
            prev = z;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn continuity_at_threshold() {
        let p = ModelParams::dynamic_signalling();
        let th = thresholds(&p).unwrap();
        let z = z_dagger_ibar(th.mu_s_max - 1e-4, &p).unwrap();
        let left = y_ee(1.0, z, th.mu_s_max - 1e-4, &p).unwrap();
        let at = y_ee(1.0, 0.0, th.mu_s_max, &p).unwrap();
        assert!((left - at).abs() < 1e-3);
    }

    #[test]
    fn implicit_identity_at_interior_roots() {
        let eq = Equilibria::new(&sat()).unwrap();
        for mu in [0.05, 0.2, 0.35, 0.5, 0.56] {
            let (z, r) = eq.interior_root_identity(mu).unwrap();
            assert!(z > 0.0 && z < 1.0);
            assert!(r < 1e-6, "mu = {mu}: residual {r}");
        }
    }

    #[test]
    fn h_negative_where_g_nonpositive() {
        let mut checked = 0;
        for cp in [20.0, 22.0, 25.0, 28.0] {
            for cu in [cp + 1.0, cp + 5.0, cp + 12.0] {
                let p = ModelParams::new(0.45, 0.2, (0.5, 0.65), (cp, cu), 80.0).unwrap();
                for i in 0..=50 {
                    let mu = i as f64 / 50.0;
                    if g_fn(0.0, mu, &p).unwrap() <= 0.0 && mu < 1.0 {
                        assert!(h_fn(0.0, mu, &p).unwrap() < 0.0);
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn static_optimum_threshold_and_fallback() {
        let o = optimal_static_signal(&ModelParams::dynamic_signalling()).unwrap();
        assert_eq!(o.method, StaticMethod::Threshold);
        assert_abs_diff_eq!(o.mu_s, 0.548, epsilon = 2e-3);

        let p = ModelParams::static_sweep_violating();
        let o = optimal_static_signal(&p).unwrap();
        assert_eq!(o.method, StaticMethod::GridSearch);
        assert_abs_diff_eq!(o.mu_s, FALLBACK_GRID_START, epsilon = 1e-12);
        assert!((o.mu_s - thresholds(&p).unwrap().mu_s_max).abs() > 0.3);
    }

    #[test]
    fn static_optimum_matches_grid_argmin() {
        for p in [sat(), ModelParams::dynamic_signalling()] {
            let eq = Equilibria::new(&p).unwrap();
            let (mut best_mu, mut best_y) = (f64::NAN, f64::INFINITY);
            for mu in grid(FALLBACK_GRID_START, FALLBACK_GRID_END, FALLBACK_GRID_STEP) {
                let y = eq.classify(mu).unwrap().y_star;
                if y < best_y {
                    best_y = y;
                    best_mu = mu;
                }
            }
            let o = optimal_static_signal(&p).unwrap();
            assert!((o.mu_s - best_mu).abs() <= FALLBACK_GRID_STEP + 1e-12);
            assert!(o.sne.y_star <= best_y + 1e-12);
        }
    }

    #[test]
    fn certificate_on_satisfying_set() {
        let c = monotonicity_certificate(&sat(), 100).unwrap();
        assert!(c.holds(), "{c:?}");
        assert_abs_diff_eq!(c.increasing_above_max.hi, 1.0, epsilon = 1e-12);

        let c = monotonicity_certificate(&sat(), 2).unwrap();
        assert_eq!(c.decreasing_below_max.points, 2);
        assert!(c.holds());

        assert!(monotonicity_certificate(&ModelParams::static_sweep_violating(), 10).is_err());
    }

    #[test]
    fn grid_is_index_based() {
        let g = grid(0.01, 0.96, 0.005);
        assert_eq!(g.len(), 191);
        assert_abs_diff_eq!(*g.last().unwrap(), 0.96, epsilon = 1e-12);
        assert_eq!(grid(0.3, 0.3, 0.005), vec![0.3]);
    }
}
