//! Runs the selected checks for every requested order.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use frakgeo_core::frac::FractionalOrder;
use frakgeo_core::pipeline::CanonicalGeometry;

use crate::checks::{CheckContext, CheckRegistry};
use crate::config::Job;
use crate::report::{AlphaRun, AxisReport, CheckRecord, VerificationReport};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<FractionalOrder>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, mut job: Job) -> Job {
        if let Some(a) = self.alpha {
            job.alphas = vec![a];
        }
        if let Some(s) = self.seed {
            job.seed = s;
        }
        job
    }
}

pub fn lattice_report(job: &Job) -> Vec<AxisReport> {
    let chart = job.lattice.chart();
    job.lattice
        .axes()
        .iter()
        .enumerate()
        .map(|(axis, g)| AxisReport {
            axis: chart.label(axis),
            terminal: g.start(),
            upper_bound: g.end(),
            points: g.points(),
        })
        .collect()
}

pub fn run_job(job: &Job, registry: &CheckRegistry) -> VerificationReport {
    let mut report = VerificationReport::new(job.seed, lattice_report(job));
    for &alpha in &job.alphas {
        let run = run_alpha(job, registry, alpha, &mut report);
        report.runs.push(run);
    }
    report.tally();
    report.timing.generated_at_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    report
}

fn run_alpha(
    job: &Job,
    registry: &CheckRegistry,
    alpha: FractionalOrder,
    report: &mut VerificationReport,
) -> AlphaRun {
    let lag = job.lagrangian(alpha);
    let capable = lag.is_symbolic_capable().unwrap_or(false);
    let a = alpha.value();
    let started = Instant::now();
    let built = CanonicalGeometry::build(&lag, &job.lattice, job.tolerances.regularity);
    report
        .timing
        .wall_time_s
        .insert(format!("{a}/build"), started.elapsed().as_secs_f64());

    let geometry = match built {
        Ok(g) => g,
        Err(e) => {
            let checks = job
                .checks
                .iter()
                .filter(|name| job.finsler || name.as_str() != "finsler")
                .map(|name| {
                    let detail = if name == "hessian" {
                        e.to_string()
                    } else {
                        "blocked by hessian".to_string()
                    };
                    CheckRecord::failed(name.as_str(), a, job.tolerances.symbolic, detail)
                })
                .collect();
            return AlphaRun {
                alpha: a,
                det_g_min: None,
                symbolic_capable: capable,
                checks,
            };
        }
    };

    let ctx = CheckContext::new(job, &geometry, capable);
    let mut checks = Vec::new();
    for name in &job.checks {
        let Some(check) = registry.get(name) else {
            continue;
        };
        let started = Instant::now();
        match check.run(&ctx) {
            Ok(records) => checks.extend(records),
            Err(e) => checks.push(CheckRecord::failed(
                name.as_str(),
                a,
                job.tolerances.symbolic,
                e.to_string(),
            )),
        }
        report
            .timing
            .wall_time_s
            .insert(format!("{a}/{name}"), started.elapsed().as_secs_f64());
    }
    AlphaRun {
        alpha: a,
        det_g_min: Some(geometry.metric.det_min()),
        symbolic_capable: capable,
        checks,
    }
}
