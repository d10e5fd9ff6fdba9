//! Finite-horizon optimal signal: minimize `∫₀ᵀ J dt` over piecewise-constant
//! `μ_S(t) ∈ [0, 1]` subject to the coupled epidemic and learning dynamics.
//!
//! The control is held constant on `N` equal intervals and every objective
//! evaluation integrates the full horizon (single shooting). Gradients are
//! central finite differences, one perturbation pair per interval; the
//! perturbed runs restart from the stored state at the start of the
//! perturbed interval, which reproduces a full pass bit for bit. The program
//! is solved by projected gradient descent with Armijo backtracking from
//! several starting schedules.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::equilibrium::optimal_static_signal;
use crate::error::{check_unit, Error, Result};
use crate::model::{ModelParams, PopulationState};
use crate::par::Exec;
use crate::simulate::{
    integral_of_y, integrate, project, rk4_step, steps_for, ControlSchedule, IntegratorOptions,
    Method, SmithConfig, StageCost, Trajectory,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iter: usize,
    /// Stop when the projected-gradient norm drops below this.
    pub grad_tol: f64,
    /// Stop when an accepted step lowers the objective by less than this.
    pub obj_tol: f64,
    /// Finite-difference perturbation per control interval.
    pub fd_delta: f64,
    pub armijo_c1: f64,
    pub backtrack: f64,
    /// Constant schedules used as additional starting points.
    pub restarts: Vec<f64>,
    pub scaling: StepScaling,
    pub exec: Exec,
}

/// How the trial step is scaled per control interval before backtracking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepScaling {
    /// One Barzilai–Borwein step length shared by every interval.
    Uniform,
    /// A secant step length per interval, `s_k / (∇f⁺_k - ∇f_k)`. Early
    /// intervals of the horizon are far stiffer than late ones, so a shared
    /// length stalls the late ones.
    #[default]
    Diagonal,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iter: 500,
            grad_tol: 1e-5,
            obj_tol: 1e-9,
            fd_delta: 1e-5,
            armijo_c1: 1e-4,
            backtrack: 0.5,
            restarts: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            scaling: StepScaling::default(),
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcpSpec {
    pub params: ModelParams,
    pub smith: SmithConfig,
    pub horizon_t: f64,
    pub n_intervals: usize,
    pub stage_cost: StageCost,
    pub init_state: PopulationState,
    pub init_guess: ControlSchedule,
    /// Target RK4 step. At `1e-2` the objective agrees with a `1e-3` pass to
    /// within a few `1e-9` on the default setup, at a tenth of the cost.
    pub step: f64,
    pub solver: SolverOptions,
}

impl OcpSpec {
    /// `T = 23`, `N = 46`, plain cost, initial guess `μ_S ≡ 0.5`.
    pub fn new(params: ModelParams) -> Self {
        let horizon_t = 23.0;
        let n_intervals = 46;
        OcpSpec {
            params,
            smith: SmithConfig::default(),
            horizon_t,
            n_intervals,
            stage_cost: StageCost::PlainY,
            init_state: PopulationState::default(),
            init_guess: ControlSchedule::constant(horizon_t, n_intervals, 0.5)
                .expect("constant schedule is valid"),
            step: 1e-2,
            solver: SolverOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        SmithConfig::new(self.smith.sigma)?;
        PopulationState::new(
            self.init_state.y,
            self.init_state.z_sbar,
            self.init_state.z_ibar,
        )?;
        if self.n_intervals < 2 {
            return Err(Error::InvalidParameter {
                name: "n_intervals",
                value: self.n_intervals as f64,
                reason: "at least two control intervals are required",
            });
        }
        if self.stage_cost.weight() < 0.0 {
            return Err(Error::InvalidParameter {
                name: "weight",
                value: self.stage_cost.weight(),
                reason: "must be non-negative",
            });
        }
        if self.step.is_nan() || self.step <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "step",
                value: self.step,
                reason: "must be positive",
            });
        }
        self.check_dims(self.init_guess.values())?;
        if (self.init_guess.horizon() - self.horizon_t).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "init_guess.horizon",
                value: self.init_guess.horizon(),
                reason: "must equal horizon_t",
            });
        }
        Ok(())
    }

    fn check_dims(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n_intervals {
            return Err(Error::Dimension {
                expected: self.n_intervals,
                got: u.len(),
            });
        }
        for &v in u {
            check_unit("mu_s", v)?;
        }
        Ok(())
    }

    pub fn schedule(&self, u: Vec<f64>) -> Result<ControlSchedule> {
        self.check_dims(&u)?;
        ControlSchedule::new(self.horizon_t, u)
    }

    pub fn integrator_options(&self) -> IntegratorOptions {
        IntegratorOptions {
            method: Method::Rk4 { step: self.step },
            stage_cost: self.stage_cost,
        }
    }

    /// Full trajectory under `u`.
    pub fn simulate(&self, u: &ControlSchedule) -> Result<Trajectory> {
        integrate(
            &self.init_state,
            u,
            &self.params,
            &self.smith,
            &self.integrator_options(),
        )
    }

    fn shooter(&self) -> Shooter<'_> {
        let len = self.horizon_t / self.n_intervals as f64;
        let steps = steps_for(len, self.step);
        Shooter {
            spec: self,
            steps,
            h: len / steps as f64,
            len,
        }
    }
}

/// Allocation-free forward pass used inside the optimizer.
struct Shooter<'a> {
    spec: &'a OcpSpec,
    steps: usize,
    h: f64,
    len: f64,
}

impl Shooter<'_> {
    fn interval(&self, k: usize, x: &mut [f64; 3], mu: f64, acc: &mut f64) -> Result<()> {
        let p = &self.spec.params;
        let smith = &self.spec.smith;
        let t0 = k as f64 * self.len;
        for j in 0..self.steps {
            let (mut next, dy, _) = rk4_step(x, mu, self.h, p, smith);
            project(&mut next, t0 + (j + 1) as f64 * self.h)?;
            *x = next;
            *acc += dy;
        }
        Ok(())
    }

    /// `∫ y` from the start of interval `k0` (state `x0`) to the horizon, with
    /// `override_k0` applied on interval `k0` in place of `u[k0]`.
    fn suffix(&self, k0: usize, x0: [f64; 3], u: &[f64], override_k0: f64) -> Result<f64> {
        let mut x = x0;
        let mut acc = 0.0;
        for (k, &mu) in u.iter().enumerate().skip(k0) {
            let mu = if k == k0 { override_k0 } else { mu };
            self.interval(k, &mut x, mu, &mut acc)?;
        }
        Ok(acc)
    }

    /// State at the start of every interval, and the total `∫ y`.
    fn checkpoints(&self, u: &[f64]) -> Result<(Vec<[f64; 3]>, f64)> {
        let mut x = self.spec.init_state.to_array();
        let mut marks = Vec::with_capacity(u.len());
        let mut acc = 0.0;
        for (k, &mu) in u.iter().enumerate() {
            marks.push(x);
            self.interval(k, &mut x, mu, &mut acc)?;
        }
        Ok((marks, acc))
    }

    fn penalty(&self, u: &[f64]) -> f64 {
        u.iter()
            .map(|&m| self.spec.stage_cost.penalty(m, self.len))
            .sum()
    }

    fn objective(&self, u: &[f64]) -> Result<f64> {
        let x0 = self.spec.init_state.to_array();
        Ok(self.suffix(0, x0, u, u[0])? + self.penalty(u))
    }

    fn gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        let (marks, _) = self.checkpoints(u)?;
        let delta = self.spec.solver.fd_delta;
        let c = self.spec.stage_cost;
        self.spec
            .solver
            .exec
            .map(u.len(), |k| {
                let lo = (u[k] - delta).max(0.0);
                let hi = (u[k] + delta).min(1.0);
                let f_hi = self.suffix(k, marks[k], u, hi)?;
                let f_lo = self.suffix(k, marks[k], u, lo)?;
                let pen = c.penalty(hi, self.len) - c.penalty(lo, self.len);
                Ok((f_hi - f_lo + pen) / (hi - lo))
            })
            .into_iter()
            .collect()
    }
}

/// `∫₀ᵀ` stage cost under the schedule `u`.
pub fn objective(spec: &OcpSpec, u: &ControlSchedule) -> Result<f64> {
    spec.check_dims(u.values())?;
    spec.shooter().objective(u.values())
}

/// Finite-difference sensitivity of the objective to each interval's signal.
///
/// Central differences with `fd_delta`; near the bounds the perturbation is
/// clipped to `[0, 1]` and the difference becomes one-sided.
pub fn gradient(spec: &OcpSpec, u: &ControlSchedule) -> Result<Vec<f64>> {
    spec.check_dims(u.values())?;
    spec.shooter().gradient(u.values())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FirstOrder,
    ObjectiveStall,
    LineSearchFailed,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcpSolution {
    pub control: ControlSchedule,
    pub trajectory: Trajectory,
    pub objective: f64,
    pub iterations: usize,
    /// `‖u - P(u - ∇f)‖₂` at exit.
    pub first_order_residual: f64,
    pub termination: Termination,
    /// Index into the list of starting schedules that produced this solution.
    pub start: usize,
    /// Objective value of the accepted iterates, starting with the initial one.
    pub history: Vec<f64>,
}

impl OcpSolution {
    pub fn converged(&self) -> bool {
        matches!(
            self.termination,
            Termination::FirstOrder | Termination::ObjectiveStall
        )
    }

    /// Writes `k,t_start,t_end,mu_s`.
    pub fn write_control_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["k", "t_start", "t_end", "mu_s"])?;
        for (k, &mu) in self.control.values().iter().enumerate() {
            let (a, b) = self.control.interval(k);
            wtr.write_record(&[k.to_string(), a.to_string(), b.to_string(), mu.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn summary(&self, static_baseline_objective: Option<f64>) -> SolutionSummary {
        SolutionSummary {
            objective: self.objective,
            y_integral: integral_of_y(&self.trajectory),
            iterations: self.iterations,
            residual: self.first_order_residual,
            termination: self.termination,
            converged: self.converged(),
            static_baseline_objective,
        }
    }
}

/// JSON-facing summary of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub objective: f64,
    pub y_integral: f64,
    pub iterations: usize,
    pub residual: f64,
    pub termination: Termination,
    pub converged: bool,
    pub static_baseline_objective: Option<f64>,
}

fn project_box(u: &[f64]) -> Vec<f64> {
    u.iter().map(|v| v.clamp(0.0, 1.0)).collect()
}

fn projected_gradient_norm(u: &[f64], g: &[f64]) -> f64 {
    u.iter()
        .zip(g)
        .map(|(&x, &d)| {
            let r = x - (x - d).clamp(0.0, 1.0);
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Descent {
    u: Vec<f64>,
    f: f64,
    iterations: usize,
    residual: f64,
    termination: Termination,
    history: Vec<f64>,
}

const SCALE_MIN: f64 = 1e-5;
const SCALE_MAX: f64 = 1e2;

/// Projected gradient descent from `u0`. The trial point is
/// `P(u - t·D∇f)` with `D` a positive diagonal (see [`StepScaling`]) and `t`
/// halved from 1 until `f(u⁺) ≤ f(u) + c₁ ∇fᵀ(u⁺ - u)`. Projection onto the
/// box is coordinate-wise clipping in any diagonal metric, so every accepted
/// point is feasible and the objective never increases.
fn descend(sh: &Shooter<'_>, u0: &[f64]) -> Result<Descent> {
    let opts = &sh.spec.solver;
    let n = u0.len();
    let mut u = project_box(u0);
    let mut f = sh.objective(&u)?;
    let mut g = sh.gradient(&u)?;
    let mut history = vec![f];
    let gmax = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let first = if gmax > 0.0 {
        (0.1 / gmax).clamp(SCALE_MIN, SCALE_MAX)
    } else {
        1.0
    };
    let mut scale = vec![first; n];
    let mut iterations = 0;
    let termination = loop {
        if projected_gradient_norm(&u, &g) < opts.grad_tol {
            break Termination::FirstOrder;
        }
        if iterations >= opts.max_iter {
            break Termination::IterationCap;
        }
        iterations += 1;

        let mut t = 1.0;
        let accepted = loop {
            let cand: Vec<f64> = (0..n)
                .map(|k| (u[k] - t * scale[k] * g[k]).clamp(0.0, 1.0))
                .collect();
            let step: Vec<f64> = cand.iter().zip(&u).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &step);
            if decrease < 0.0 {
                let fc = sh.objective(&cand)?;
                if fc <= f + opts.armijo_c1 * decrease {
                    break Some((cand, fc, step));
                }
            }
            t *= opts.backtrack;
            if t < 1e-14 {
                break None;
            }
        };
        let Some((cand, fc, step)) = accepted else {
            break Termination::LineSearchFailed;
        };
        let gc = sh.gradient(&cand)?;
        let change: Vec<f64> = gc.iter().zip(&g).map(|(a, b)| a - b).collect();
        match opts.scaling {
            StepScaling::Uniform => {
                let sy = dot(&step, &change);
                let next = if sy > 0.0 {
                    dot(&step, &step) / sy
                } else {
                    2.0 * t * scale[0]
                };
                scale.fill(next.clamp(SCALE_MIN, SCALE_MAX));
            }
            StepScaling::Diagonal => {
                for k in 0..n {
                    let sy = step[k] * change[k];
                    scale[k] = if sy > 0.0 {
                        (step[k] / change[k]).clamp(SCALE_MIN, SCALE_MAX)
                    } else {
                        (2.0 * scale[k]).min(SCALE_MAX)
                    };
                }
            }
        }
        let df = f - fc;
        u = cand;
        f = fc;
        g = gc;
        history.push(f);
        if df < opts.obj_tol {
            break Termination::ObjectiveStall;
        }
    };
    Ok(Descent {
        residual: projected_gradient_norm(&u, &g),
        u,
        f,
        iterations,
        termination,
        history,
    })
}

/// The starting schedules: the configured initial guess followed by each constant restart.
pub fn starting_points(spec: &OcpSpec) -> Vec<Vec<f64>> {
    let mut starts = vec![spec.init_guess.values().to_vec()];
    for &c in &spec.solver.restarts {
        let v = vec![c.clamp(0.0, 1.0); spec.n_intervals];
        if !starts.contains(&v) {
            starts.push(v);
        }
    }
    starts
}

/// Solves from every starting point and returns the lowest objective found.
/// Hitting the iteration cap is reported through [`OcpSolution::termination`],
/// not as an error.
pub fn solve(spec: &OcpSpec) -> Result<OcpSolution> {
    spec.validate()?;
    let sh = spec.shooter();
    let starts = starting_points(spec);
    let runs = spec
        .solver
        .exec
        .map(starts.len(), |i| descend(&sh, &starts[i]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (start, best) = runs
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1.f.total_cmp(&b.1.f))
        .expect("at least one start");
    let control = spec.schedule(best.u)?;
    let trajectory = spec.simulate(&control)?;
    Ok(OcpSolution {
        objective: best.f,
        control,
        trajectory,
        iterations: best.iterations,
        first_order_residual: best.residual,
        termination: best.termination,
        start,
        history: best.history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticDynamicReport {
    pub static_mu: f64,
    pub static_objective: f64,
    pub dynamic_objective: f64,
    pub static_y_integral: f64,
    pub dynamic_y_integral: f64,
    /// Fraction of sample times with `y_dyn(t) ≤ y_static(t) + 1e-6`.
    pub dominance_fraction: f64,
    pub static_trajectory: Trajectory,
    pub dynamic: OcpSolution,
}

impl StaticDynamicReport {
    /// Fraction of sample times with `y_dyn(t) ≤ y_static(t) + tol`.
    pub fn dominance_with(&self, tol: f64) -> f64 {
        dominance(&self.static_trajectory, &self.dynamic.trajectory, tol)
    }
}

fn dominance(stat: &Trajectory, dynamic: &Trajectory, tol: f64) -> f64 {
    let n = stat.times.len().min(dynamic.times.len());
    if n == 0 {
        return 0.0;
    }
    let hits = (0..n)
        .filter(|&i| dynamic.states[i].y <= stat.states[i].y + tol)
        .count();
    hits as f64 / n as f64
}

/// Runs the optimal static signal and the optimal dynamic schedule on the same
/// horizon and grid and compares their costs pointwise.
pub fn compare_static_dynamic(spec: &OcpSpec) -> Result<StaticDynamicReport> {
    let stat = optimal_static_signal(&spec.params)?;
    let static_schedule = ControlSchedule::constant(spec.horizon_t, spec.n_intervals, stat.mu_s)?;
    let static_trajectory = spec.simulate(&static_schedule)?;
    let dynamic = solve(spec)?;
    Ok(StaticDynamicReport {
        static_mu: stat.mu_s,
        static_objective: static_trajectory.total_cost(),
        dynamic_objective: dynamic.objective,
        static_y_integral: integral_of_y(&static_trajectory),
        dynamic_y_integral: integral_of_y(&dynamic.trajectory),
        dominance_fraction: dominance(&static_trajectory, &dynamic.trajectory, 1e-6),
        static_trajectory,
        dynamic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_spec() -> OcpSpec {
        let mut s = OcpSpec::new(ModelParams::dynamic_signalling());
        s.horizon_t = 4.0;
        s.n_intervals = 8;
        s.step = 1e-2;
        s.init_guess = ControlSchedule::constant(4.0, 8, 0.5).unwrap();
        // Large enough prevalence that both groups respond to the signal.
        s.init_state = PopulationState::new(0.4, 0.5, 0.5).unwrap();
        s
    }

    #[test]
    fn disease_free_objective_and_gradient_vanish() {
        let mut s = small_spec();
        s.init_state = PopulationState::new(0.0, 0.5, 0.5).unwrap();
        let u = ControlSchedule::new(4.0, (0..8).map(|k| k as f64 / 8.0).collect()).unwrap();
        assert_eq!(objective(&s, &u).unwrap(), 0.0);
        assert!(gradient(&s, &u).unwrap().iter().all(|&g| g == 0.0));

        let sol = solve(&s).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert_eq!(sol.first_order_residual, 0.0);
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.termination, Termination::FirstOrder);
    }

    #[test]
    fn modified_cost_equals_plain_at_full_fidelity() {
        let mut s = small_spec();
        let u = ControlSchedule::constant(4.0, 8, 1.0).unwrap();
        let plain = objective(&s, &u).unwrap();
        s.stage_cost = StageCost::ModifiedY { weight: 0.8 };
        assert_eq!(objective(&s, &u).unwrap(), plain);
    }

    #[test]
    fn shooter_matches_recorded_trajectory() {
        let s = small_spec();
        let u = ControlSchedule::new(4.0, vec![0.1, 0.9, 0.4, 0.6, 0.0, 1.0, 0.5, 0.3]).unwrap();
        let tr = s.simulate(&u).unwrap();
        assert_eq!(objective(&s, &u).unwrap(), tr.total_cost());
    }

    #[test]
    fn gradient_matches_parabola_slope() {
        // Fit a parabola through five samples of one coordinate and compare its slope.
        let s = small_spec();
        let base: Vec<f64> = vec![0.3, 0.5, 0.7, 0.4, 0.6, 0.5, 0.45, 0.55];
        let k = 3;
        let g = gradient(&s, &s.schedule(base.clone()).unwrap()).unwrap();
        let hs = [-2e-4, -1e-4, 0.0, 1e-4, 2e-4];
        let fs: Vec<f64> = hs
            .iter()
            .map(|&d| {
                let mut v = base.clone();
                v[k] += d;
                objective(&s, &s.schedule(v).unwrap()).unwrap()
            })
            .collect();
        // Least-squares slope of a quadratic on symmetric nodes: Σ h f / Σ h².
        let num: f64 = hs.iter().zip(&fs).map(|(h, f)| h * f).sum();
        let den: f64 = hs.iter().map(|h| h * h).sum();
        let slope = num / den;
        assert!(
            ((g[k] - slope) / slope).abs() < 1e-4,
            "{} vs {}",
            g[k],
            slope
        );
    }

    #[test]
    fn one_sided_difference_at_bounds() {
        let s = small_spec();
        let u = s
            .schedule(vec![0.0, 1.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5])
            .unwrap();
        let g = gradient(&s, &u).unwrap();
        let f0 = objective(&s, &u).unwrap();
        let mut v = u.values().to_vec();
        v[0] = 1e-5;
        let fwd = (objective(&s, &s.schedule(v).unwrap()).unwrap() - f0) / 1e-5;
        assert_abs_diff_eq!(g[0], fwd, epsilon = 1e-9);
    }

    #[test]
    fn directional_derivative_matches_gradient() {
        let s = small_spec();
        let u: Vec<f64> = vec![0.3, 0.5, 0.7, 0.4, 0.6, 0.5, 0.45, 0.55];
        let dir: Vec<f64> = vec![0.3, -0.2, 0.5, 0.1, -0.4, 0.2, 0.0, -0.1];
        let g = gradient(&s, &s.schedule(u.clone()).unwrap()).unwrap();
        let eps = 1e-5;
        let shift = |a: f64| {
            s.schedule(u.iter().zip(&dir).map(|(x, d)| x + a * d).collect())
                .unwrap()
        };
        let fd = (objective(&s, &shift(eps)).unwrap() - objective(&s, &shift(-eps)).unwrap())
            / (2.0 * eps);
        let ip = dot(&g, &dir);
        assert!(((fd - ip) / ip).abs() < 1e-3, "{fd} vs {ip}");
    }

    #[test]
    fn descent_is_monotone_and_feasible() {
        let mut s = small_spec();
        s.solver.restarts = vec![0.0, 1.0];
        let sol = solve(&s).unwrap();
        assert!(sol.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(sol.control.values().iter().all(|v| (0.0..=1.0).contains(v)));
        let again = objective(&s, &sol.control).unwrap();
        assert!((again - sol.objective).abs() < 1e-8);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut s = small_spec();
        s.solver.max_iter = 5;
        s.solver.restarts = vec![0.25];
        s.solver.exec = Exec::Sequential;
        let a = solve(&s).unwrap();
        s.solver.exec = Exec::Parallel;
        let b = solve(&s).unwrap();
        assert_eq!(a.control, b.control);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    #[test]
    fn spec_validation() {
        let mut s = small_spec();
        s.n_intervals = 1;
        assert!(s.validate().is_err());
        let mut s = small_spec();
        s.stage_cost = StageCost::ModifiedY { weight: -1.0 };
        assert!(s.validate().is_err());
        let s = small_spec();
        assert!(matches!(
            objective(&s, &ControlSchedule::constant(4.0, 3, 0.5).unwrap()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn control_csv_columns() {
        let mut s = small_spec();
        s.solver.max_iter = 1;
        s.solver.restarts.clear();
        let sol = solve(&s).unwrap();
        let mut buf = Vec::new();
        sol.write_control_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("k,t_start,t_end,mu_s"));
        assert_eq!(lines.count(), 8);
        assert!(text.contains("\n7,3.5,4,"));
    }
}
