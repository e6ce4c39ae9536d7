//! Size/power experiment harness: replicate generation with derived seed
//! streams, parallel test execution, rejection-rate aggregation and table
//! emission.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dgp::{simulate, DgpModel, DgpSpec};
use crate::error::{Result, SciError};
use crate::rng::CounterRng;
use crate::testing::{
    jp_spectral_test, ks_two_sample, sci_two_sample_test, JpTestConfig, SciTestConfig, TestMethod,
};

/// DGP model plus coefficient, instantiated per replication with a derived
/// seed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DgpTemplate {
    pub model: DgpModel,
    pub theta: f64,
}

impl DgpTemplate {
    pub fn new(model: DgpModel, theta: f64) -> Self {
        Self { model, theta }
    }

    fn instantiate(&self, n: usize, seed: u64) -> DgpSpec {
        DgpSpec::new(self.model, self.theta, n, seed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentPlan {
    pub dgp_x: DgpTemplate,
    pub dgp_y: DgpTemplate,
    pub test: TestMethod,
    pub d: usize,
    /// Series length per sample.
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    pub root_seed: u64,
    /// Randomization replicates for the JP test.
    pub jp_reps: usize,
    /// HAC bandwidth override for the SCI test; `None` means `ln N`.
    pub bandwidth: Option<f64>,
}

impl ExperimentPlan {
    pub fn new(dgp_x: DgpTemplate, dgp_y: DgpTemplate, test: TestMethod, n: usize) -> Self {
        Self {
            dgp_x,
            dgp_y,
            test,
            d: 3,
            n,
            reps: 1000,
            alpha: 0.05,
            root_seed: 0,
            jp_reps: 199,
            bandwidth: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(SciError::InvalidInput("reps must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) && self.alpha != 1.0 {
            return Err(SciError::InvalidInput(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        self.dgp_x.instantiate(self.n, 0).validate()?;
        self.dgp_y.instantiate(self.n, 0).validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub rejection_rate: f64,
    /// `sqrt(r (1 - r) / reps)`.
    pub mc_std_error: f64,
    pub rejections: usize,
    pub reps: usize,
    /// Replications that hit the degenerate-variance branch with differing
    /// SCI values; these are counted through the test's defined outcome
    /// (p = 0), never silently dropped.
    pub degenerate_events: usize,
    pub wall_time_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_rep_p: Option<Vec<f64>>,
}

// Seed streams: replication r uses streams 2r (X) and 2r+1 (Y) of the
// root; the JP randomization uses the high-bit stream space.
fn series_seed(root: u64, rep: usize, which: usize) -> u64 {
    CounterRng::derive(root, 2 * rep as u64 + which as u64).key()
}

fn jp_seed(root: u64, rep: usize) -> u64 {
    CounterRng::derive(root, (1u64 << 63) | rep as u64).key()
}

/// Run one size/power cell. Deterministic for a fixed plan, independent of
/// the parallelism degree.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    run_experiment_opts(plan, false)
}

pub fn run_experiment_opts(plan: &ExperimentPlan, keep_p: bool) -> Result<ExperimentResult> {
    plan.validate()?;
    let start = Instant::now();
    let outcomes: Vec<Result<(f64, bool)>> = (0..plan.reps)
        .into_par_iter()
        .map(|rep| {
            let x = simulate(&plan.dgp_x.instantiate(plan.n, series_seed(plan.root_seed, rep, 0)))?;
            let y = simulate(&plan.dgp_y.instantiate(plan.n, series_seed(plan.root_seed, rep, 1)))?;
            let result = match plan.test {
                TestMethod::Sci => {
                    let cfg = SciTestConfig {
                        bandwidth: plan.bandwidth,
                        ..Default::default()
                    };
                    sci_two_sample_test(&x, &y, plan.d, &cfg)?
                }
                TestMethod::Ks => ks_two_sample(&x, &y)?,
                TestMethod::Jp => {
                    let cfg = JpTestConfig {
                        reps: plan.jp_reps,
                        seed: jp_seed(plan.root_seed, rep),
                        ..Default::default()
                    };
                    jp_spectral_test(&x, &y, &cfg)?
                }
            };
            let degenerate = result.diagnostics.degenerate_warning.unwrap_or(false);
            Ok((result.p_value, degenerate))
        })
        .collect();

    let mut rejections = 0usize;
    let mut degenerate_events = 0usize;
    let mut per_rep_p = Vec::new();
    for outcome in outcomes {
        let (p, degenerate) = outcome?;
        if p <= plan.alpha {
            rejections += 1;
        }
        if degenerate {
            degenerate_events += 1;
        }
        if keep_p {
            per_rep_p.push(p);
        }
    }
    let rate = rejections as f64 / plan.reps as f64;
    Ok(ExperimentResult {
        rejection_rate: rate,
        mc_std_error: (rate * (1.0 - rate) / plan.reps as f64).sqrt(),
        rejections,
        reps: plan.reps,
        degenerate_events,
        wall_time_secs: start.elapsed().as_secs_f64(),
        per_rep_p: if keep_p { Some(per_rep_p) } else { None },
    })
}

/// One cell of a result table.
#[derive(Debug, Clone, Serialize)]
pub enum TableCell {
    Value(ExperimentResult),
    /// Printed as "--" (e.g. the lower triangle of the power grid).
    Omitted,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultTable {
    pub title: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// `cells[row][col]`; `None` marks a cell the caller failed to fill.
    pub cells: Vec<Vec<Option<TableCell>>>,
}

impl ResultTable {
    pub fn new(title: &str, row_labels: Vec<String>, col_labels: Vec<String>) -> Self {
        let cells = vec![vec![None; col_labels.len()]; row_labels.len()];
        Self {
            title: title.to_string(),
            row_labels,
            col_labels,
            cells,
        }
    }

    pub fn set(&mut self, row: usize, col: usize, cell: TableCell) {
        self.cells[row][col] = Some(cell);
    }

    fn check_complete(&self) -> Result<()> {
        let mut missing = Vec::new();
        for (i, row) in self.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if cell.is_none() {
                    missing.push(format!("({}, {})", self.row_labels[i], self.col_labels[j]));
                }
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(SciError::InvalidInput(format!(
                "incomplete grid, missing cells: {}",
                missing.join(", ")
            )))
        }
    }

    /// Tab-separated rendering: one rate column and one standard-error
    /// column per table column, values to 3 decimals.
    pub fn to_tsv(&self) -> Result<String> {
        self.check_complete()?;
        let mut out = String::new();
        out.push_str("cell");
        for label in &self.col_labels {
            out.push_str(&format!("\t{label}\t{label}_se"));
        }
        out.push('\n');
        for (i, row) in self.cells.iter().enumerate() {
            out.push_str(&self.row_labels[i]);
            for cell in row {
                match cell.as_ref().unwrap() {
                    TableCell::Value(r) => {
                        out.push_str(&format!(
                            "\t{:.3}\t{:.3}",
                            r.rejection_rate, r.mc_std_error
                        ));
                    }
                    TableCell::Omitted => out.push_str("\t--\t--"),
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> Result<String> {
        self.check_complete()?;
        let width = self
            .row_labels
            .iter()
            .map(|l| l.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = format!("{}\n", self.title);
        out.push_str(&format!("{:width$}", "", width = width + 2));
        for label in &self.col_labels {
            out.push_str(&format!("{label:>16}"));
        }
        out.push('\n');
        for (i, row) in self.cells.iter().enumerate() {
            out.push_str(&format!(
                "{:width$}",
                self.row_labels[i],
                width = width + 2
            ));
            for cell in row {
                match cell.as_ref().unwrap() {
                    TableCell::Value(r) => out.push_str(&format!(
                        "{:>16}",
                        format!("{:.3} ({:.3})", r.rejection_rate, r.mc_std_error)
                    )),
                    TableCell::Omitted => out.push_str(&format!("{:>16}", "--")),
                }
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Seed manifest accompanying every table, enough to re-run bit-for-bit.
#[derive(Debug, Clone, Serialize)]
pub struct SeedManifest {
    pub root_seed: u64,
    pub rng: &'static str,
    pub derivation: &'static str,
}

impl SeedManifest {
    pub fn new(root_seed: u64) -> Self {
        Self {
            root_seed,
            rng: "splitmix64-counter",
            derivation: "replication r draws series X from stream 2r and series Y from stream 2r+1 of the root seed; JP randomization uses stream 2^63 | r",
        }
    }
}
