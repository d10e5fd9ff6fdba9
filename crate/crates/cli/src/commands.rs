use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use persuade_sis::equilibrium::{classify_sne, complementarity, optimal_static_signal, thresholds};
use persuade_sis::model::validate_assumptions;
use persuade_sis::optimal_control::{compare_static_dynamic, objective, solve};
use persuade_sis::simulate::{
    integral_of_y, integrate, ControlSchedule, IntegratorOptions, Method, StageCost,
};
use persuade_sis::sweep::{grid_mui, static_sweep};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct Summary {
    pub experiment: &'static str,
    pub params_hash: String,
    pub outputs: Vec<String>,
    pub metrics: Map<String, Value>,
    pub warnings: Vec<String>,
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    out: &'a Path,
    outputs: Vec<String>,
    metrics: Map<String, Value>,
    warnings: Vec<String>,
}

impl Run<'_> {
    fn metric(&mut self, key: &str, value: impl Into<Value>) {
        self.metrics.insert(key.to_string(), value.into());
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        fs::create_dir_all(self.out)?;
        let path: PathBuf = self.out.join(name);
        let f =
            File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.outputs.push(path.display().to_string());
        Ok(BufWriter::new(f))
    }

    fn json_file(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

pub fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<Summary, CliError> {
    cfg.model.validate()?;
    let mut run = Run {
        cfg,
        out,
        outputs: Vec::new(),
        metrics: Map::new(),
        warnings: Vec::new(),
    };
    match cfg.experiment {
        Experiment::Check => check(&mut run)?,
        Experiment::Sne => sne(&mut run)?,
        Experiment::StaticSweep => sweep(&mut run)?,
        Experiment::Simulate => simulate(&mut run)?,
        Experiment::Optimize => optimize(&mut run)?,
        Experiment::Compare => compare(&mut run)?,
        Experiment::GridMui => grid(&mut run)?,
    }
    Ok(Summary {
        experiment: cfg.experiment.name(),
        params_hash: cfg.hash()?,
        outputs: run.outputs,
        metrics: run.metrics,
        warnings: run.warnings,
    })
}

fn check(run: &mut Run<'_>) -> Result<(), CliError> {
    let p = &run.cfg.model;
    let report = validate_assumptions(p);
    run.metric("well_posed", report.well_posed());
    run.metric("protection_cost_high", report.protection_cost_high());
    run.metric("truthful_infected_signal", report.a1_truthful);
    run.metric("infected_cost_exceeds_protection", report.a1_costs);
    run.metric("protection_cannot_eradicate", report.a1_recovery);
    if !report.well_posed() {
        run.warnings
            .push("well-posedness fails: thresholds and equilibria are undefined".into());
        return Ok(());
    }
    let th = thresholds(p)?;
    run.metric("mu_s_min", th.mu_s_min);
    run.metric("mu_s_max", th.mu_s_max);
    run.metric("y_star_p", th.y_star_p);
    run.metric("y_star_int", th.y_star_int);
    let best = optimal_static_signal(p)?;
    run.metric("optimal_static_mu_s", best.mu_s);
    run.metric("optimal_static_y_star", best.sne.y_star);
    if !report.protection_cost_high() {
        run.warnings.push(
            "protection-cost assumption fails: optimal static signal found by grid search".into(),
        );
    }
    Ok(())
}

fn sne(run: &mut Run<'_>) -> Result<(), CliError> {
    let p = &run.cfg.model;
    let mu = match run.cfg.sne.mu_s {
        Some(m) => m,
        None => thresholds(p)?.mu_s_max,
    };
    let sne = classify_sne(mu, p)?;
    let rep = complementarity(&sne, p)?;
    run.metric("mu_s", sne.mu_s);
    run.metric("case_id", sne.case_id.number());
    run.metric("y_star", sne.y_star);
    run.metric("z_sbar_star", sne.z_sbar_star);
    run.metric("z_ibar_star", sne.z_ibar_star);
    run.metric("fixed_point_residual", rep.fixed_point_residual);
    Ok(())
}

fn sweep(run: &mut Run<'_>) -> Result<(), CliError> {
    let s = run.cfg.sweep;
    let table = static_sweep(&run.cfg.model, (s.mu_min, s.mu_max), s.step, run.cfg.exec)?;
    let mut w = run.file("static_sweep.csv")?;
    table.write_csv(&mut w)?;
    w.flush()?;
    run.metric("cells", table.cells.len());
    run.metric("failures", table.failures());
    if let Some(best) = table.argmin_cell() {
        run.metric("argmin_mu_s", best.mu_s);
        run.metric("min_y_star", best.y_star);
    }
    if table.failures() > 0 {
        run.warnings
            .push(format!("{} sweep cells failed", table.failures()));
    }
    Ok(())
}

fn simulate(run: &mut Run<'_>) -> Result<(), CliError> {
    let o = run.cfg.simulate.clone();
    let p = &run.cfg.model;
    let schedule = match &o.schedule {
        Some(values) => ControlSchedule::new(o.horizon, values.clone())?,
        None => {
            let mu = match o.mu_s {
                Some(m) => m,
                None => optimal_static_signal(p)?.mu_s,
            };
            ControlSchedule::constant(o.horizon, o.n_intervals, mu)?
        }
    };
    let opts = IntegratorOptions {
        method: Method::Rk4 { step: o.step },
        stage_cost: stage_cost(o.weight),
    };
    let tr = integrate(
        &run.cfg.initial_state()?,
        &schedule,
        p,
        &run.cfg.smith()?,
        &opts,
    )?;
    let mut w = run.file("trajectory.csv")?;
    tr.write_csv(&mut w, o.thin.max(1))?;
    w.flush()?;
    let end = tr.final_state();
    run.metric("mu_s_mean", schedule.mean());
    run.metric("final_y", end.y);
    run.metric("final_z_sbar", end.z_sbar);
    run.metric("final_z_ibar", end.z_ibar);
    run.metric("y_integral", integral_of_y(&tr));
    run.metric("total_cost", tr.total_cost());
    run.metric("max_clamp", tr.max_clamp);
    Ok(())
}

fn stage_cost(weight: f64) -> StageCost {
    if weight == 0.0 {
        StageCost::PlainY
    } else {
        StageCost::ModifiedY { weight }
    }
}

fn optimize(run: &mut Run<'_>) -> Result<(), CliError> {
    let spec = run.cfg.ocp_spec()?;
    let sol = solve(&spec)?;
    let baseline = optimal_static_signal(&spec.params)
        .and_then(|s| ControlSchedule::constant(spec.horizon_t, spec.n_intervals, s.mu_s))
        .and_then(|u| objective(&spec, &u))
        .ok();
    let mut w = run.file("control.csv")?;
    sol.write_control_csv(&mut w)?;
    w.flush()?;
    let mut w = run.file("trajectory.csv")?;
    sol.trajectory
        .write_csv(&mut w, run.cfg.optimize.thin.max(1))?;
    w.flush()?;
    let summary = sol.summary(baseline);
    run.json_file("optimize.json", &summary)?;
    run.metric("objective", sol.objective);
    run.metric("y_integral", summary.y_integral);
    run.metric("iterations", sol.iterations);
    run.metric("residual", sol.first_order_residual);
    run.metric("mean_control", sol.control.mean());
    run.metric("converged", sol.converged());
    if let Some(b) = baseline {
        run.metric("static_baseline_objective", b);
    }
    if !sol.converged() {
        run.warnings.push(format!(
            "optimizer stopped without converging ({:?})",
            sol.termination
        ));
    }
    Ok(())
}

fn compare(run: &mut Run<'_>) -> Result<(), CliError> {
    let spec = run.cfg.ocp_spec()?;
    let rep = compare_static_dynamic(&spec)?;
    let thin = run.cfg.optimize.thin.max(1);
    let mut w = run.file("control.csv")?;
    rep.dynamic.write_control_csv(&mut w)?;
    w.flush()?;
    let mut w = run.file("dynamic_trajectory.csv")?;
    rep.dynamic.trajectory.write_csv(&mut w, thin)?;
    w.flush()?;
    let mut w = run.file("static_trajectory.csv")?;
    rep.static_trajectory.write_csv(&mut w, thin)?;
    w.flush()?;
    let summary = json!({
        "static_mu_s": rep.static_mu,
        "static_objective": rep.static_objective,
        "dynamic_objective": rep.dynamic_objective,
        "static_y_integral": rep.static_y_integral,
        "dynamic_y_integral": rep.dynamic_y_integral,
        "dominance_fraction": rep.dominance_fraction,
        "dynamic": rep.dynamic.summary(Some(rep.static_objective)),
    });
    run.json_file("compare.json", &summary)?;
    run.metric("static_mu_s", rep.static_mu);
    run.metric("static_objective", rep.static_objective);
    run.metric("dynamic_objective", rep.dynamic_objective);
    run.metric("dominance_fraction", rep.dominance_fraction);
    run.metric("converged", rep.dynamic.converged());
    if !rep.dynamic.converged() {
        run.warnings.push(format!(
            "optimizer stopped without converging ({:?})",
            rep.dynamic.termination
        ));
    }
    Ok(())
}

fn grid(run: &mut Run<'_>) -> Result<(), CliError> {
    let opts = run.cfg.grid_options()?;
    let rep = grid_mui(&run.cfg.model, &opts)?;
    let mut w = run.file("grid_matrix.csv")?;
    rep.write_matrix_csv(&mut w)?;
    w.flush()?;
    let mut w = run.file("grid_summary.csv")?;
    rep.write_summary_csv(&mut w)?;
    w.flush()?;
    let sym = rep.symmetry(1e-3);
    run.metric("axis_len", rep.axis.len());
    run.metric("non_converged", rep.non_converged());
    run.metric("symmetry_fraction", sym.fraction());
    run.metric("symmetry_max_deviation", sym.max_deviation);
    if let Some(last) = rep.summary.last() {
        run.metric("mu_s_opt_at_mu_i_1", last.mu_s_opt);
        run.metric("min_y_at_mu_i_1", last.min_y);
    }
    if rep.non_converged() > 0 {
        run.warnings.push(format!(
            "{} grid cells did not reach stationarity",
            rep.non_converged()
        ));
    }
    Ok(())
}
