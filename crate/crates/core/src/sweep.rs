//! Batch experiments: equilibrium sweeps over the susceptible-signal fidelity
//! and the two-fidelity relaxation grid.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{grid, Equilibria, SneResult};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PopulationState};
use crate::par::Exec;
use crate::simulate::{relax_to_stationary, RelaxOptions, SmithConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub mu_s: f64,
    pub sne: Option<SneResult>,
    pub error: Option<String>,
}

/// Equilibria along a `μ_S` axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub cells: Vec<SweepCell>,
    /// Index of the smallest `y*` (first on ties); `None` if every cell failed.
    pub argmin: Option<usize>,
}

impl SweepTable {
    pub fn mu_s(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.mu_s).collect()
    }

    /// `y*` per cell, `NaN` where the cell failed.
    pub fn y_star(&self) -> Vec<f64> {
        self.cells
            .iter()
            .map(|c| c.sne.map_or(f64::NAN, |s| s.y_star))
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.sne.is_none()).count()
    }

    pub fn argmin_cell(&self) -> Option<&SneResult> {
        self.argmin.and_then(|i| self.cells[i].sne.as_ref())
    }

    /// Writes `mu_s,y_star,z_sbar_star,z_ibar_star,case_id,is_argmin,error`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "mu_s",
            "y_star",
            "z_sbar_star",
            "z_ibar_star",
            "case_id",
            "is_argmin",
            "error",
        ])?;
        for (i, c) in self.cells.iter().enumerate() {
            let flag = u8::from(self.argmin == Some(i)).to_string();
            let row = match (&c.sne, &c.error) {
                (Some(s), _) => [
                    c.mu_s.to_string(),
                    s.y_star.to_string(),
                    s.z_sbar_star.to_string(),
                    s.z_ibar_star.to_string(),
                    s.case_id.number().to_string(),
                    flag,
                    String::new(),
                ],
                (None, e) => [
                    c.mu_s.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    flag,
                    e.clone().unwrap_or_default(),
                ],
            };
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn check_axis(lo: f64, hi: f64, step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
            reason: "must be positive",
        });
    }
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || hi < lo {
        return Err(Error::InvalidParameter {
            name: "mu_range",
            value: hi - lo,
            reason: "need 0 <= lo <= hi <= 1",
        });
    }
    Ok(())
}

/// Equilibrium at each `μ_S = lo + k·step ≤ hi`. Cells that fail to classify
/// are recorded with their error rather than aborting the sweep.
pub fn static_sweep(
    p: &ModelParams,
    mu_range: (f64, f64),
    step: f64,
    exec: Exec,
) -> Result<SweepTable> {
    let (lo, hi) = mu_range;
    check_axis(lo, hi, step)?;
    let eq = Equilibria::new(p)?;
    let axis = grid(lo, hi, step);
    let cells = exec.map(axis.len(), |i| {
        let mu_s = axis[i];
        match eq.classify(mu_s) {
            Ok(sne) => SweepCell {
                mu_s,
                sne: Some(sne),
                error: None,
            },
            Err(e) => SweepCell {
                mu_s,
                sne: None,
                error: Some(e.to_string()),
            },
        }
    });
    let argmin = argmin_by(cells.iter().map(|c| c.sne.map(|s| s.y_star)));
    Ok(SweepTable { cells, argmin })
}

fn argmin_by(values: impl Iterator<Item = Option<f64>>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if let Some(v) = v {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub step: f64,
    /// First axis value; the axis runs `start, start + step, …` and always ends at 1.
    pub start: f64,
    pub smith: SmithConfig,
    pub init_state: PopulationState,
    pub relax: RelaxOptions,
    pub exec: Exec,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            step: 0.005,
            start: 0.01,
            smith: SmithConfig::default(),
            init_state: PopulationState::default(),
            relax: RelaxOptions::default(),
            exec: Exec::default(),
        }
    }
}

impl GridOptions {
    /// Step 0.02 instead of 0.005.
    pub fn coarse() -> Self {
        GridOptions {
            step: 0.02,
            ..Self::default()
        }
    }

    /// `start, start + step, …` up to 1, with 1 appended when the step misses it.
    pub fn axis(&self) -> Vec<f64> {
        let mut axis = grid(self.start, 1.0, self.step);
        if axis.last().is_none_or(|&v| v < 1.0 - 1e-9) {
            axis.push(1.0);
        }
        axis
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowSummary {
    pub mu_i: f64,
    pub mu_s_opt: f64,
    pub min_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryStats {
    /// Cells whose mirror `(1 - μ_S, 1 - μ_I)` also lies on the grid.
    pub valid: usize,
    pub within: usize,
    pub max_deviation: f64,
}

impl SymmetryStats {
    pub fn fraction(&self) -> f64 {
        if self.valid == 0 {
            0.0
        } else {
            self.within as f64 / self.valid as f64
        }
    }
}

/// Stationary infected proportion over a `(μ_I, μ_S)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub axis: Vec<f64>,
    /// `y[i][j]` at `μ_I = axis[i]`, `μ_S = axis[j]`.
    pub y: Vec<Vec<f64>>,
    pub converged: Vec<Vec<bool>>,
    pub summary: Vec<RowSummary>,
}

impl GridReport {
    pub fn non_converged(&self) -> usize {
        self.converged.iter().flatten().filter(|&&c| !c).count()
    }

    pub fn row(&self, mu_i: f64) -> Option<usize> {
        self.axis.iter().position(|&v| (v - mu_i).abs() < 1e-9)
    }

    pub fn symmetry(&self, tol: f64) -> SymmetryStats {
        let mirror: Vec<Option<usize>> = self.axis.iter().map(|&v| self.row(1.0 - v)).collect();
        let mut stats = SymmetryStats {
            valid: 0,
            within: 0,
            max_deviation: 0.0,
        };
        for (i, mi) in mirror.iter().enumerate() {
            for (j, mj) in mirror.iter().enumerate() {
                if let (Some(mi), Some(mj)) = (mi, mj) {
                    let dev = (self.y[i][j] - self.y[*mi][*mj]).abs();
                    stats.valid += 1;
                    stats.within += usize::from(dev < tol);
                    stats.max_deviation = stats.max_deviation.max(dev);
                }
            }
        }
        stats
    }

    /// Writes the matrix: header `mu_i` then one column per `μ_S`.
    pub fn write_matrix_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["mu_i".to_string()];
        header.extend(self.axis.iter().map(|v| v.to_string()));
        wtr.write_record(&header)?;
        for (mu_i, row) in self.axis.iter().zip(&self.y) {
            let mut rec = vec![mu_i.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Writes `mu_i,mu_s_opt,min_y`.
    pub fn write_summary_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["mu_i", "mu_s_opt", "min_y"])?;
        for r in &self.summary {
            wtr.write_record(&[
                r.mu_i.to_string(),
                r.mu_s_opt.to_string(),
                r.min_y.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Relaxes the dynamics to stationarity at every `(μ_I, μ_S)` cell and, per
/// `μ_I`, reports the `μ_S` with the smallest stationary infected proportion.
pub fn grid_mui(p: &ModelParams, opts: &GridOptions) -> Result<GridReport> {
    check_axis(opts.start, 1.0, opts.step)?;
    p.validate()?;
    let axis = opts.axis();
    let n = axis.len();
    let rows: Vec<ModelParams> = axis
        .iter()
        .map(|&mu_i| p.with_mu_i(mu_i))
        .collect::<Result<_>>()?;
    let flat = opts
        .exec
        .map(n * n, |idx| {
            let (i, j) = (idx / n, idx % n);
            relax_to_stationary(
                &opts.init_state,
                axis[j],
                &rows[i],
                &opts.smith,
                &opts.relax,
            )
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut y = vec![vec![0.0; n]; n];
    let mut converged = vec![vec![false; n]; n];
    for (idx, st) in flat.iter().enumerate() {
        y[idx / n][idx % n] = st.state.y;
        converged[idx / n][idx % n] = st.converged;
    }
    let summary = axis
        .iter()
        .zip(&y)
        .map(|(&mu_i, row)| {
            let j = argmin_by(row.iter().map(|&v| Some(v))).expect("row is non-empty");
            RowSummary {
                mu_i,
                mu_s_opt: axis[j],
                min_y: row[j],
            }
        })
        .collect();
    Ok(GridReport {
        axis,
        y,
        converged,
        summary,
    })
}
