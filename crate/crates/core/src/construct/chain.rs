//! Chains of periodic approximants converging to a limit-periodic sequence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intervals::box_dim_ratios_log;
use crate::jacobi::PeriodicJacobi;

use super::gordon::gordon_check;
use super::pipeline::{PlanOptions, ThinDiagnostics, ThinPlan};
use super::Mode;

pub const DEFAULT_PERIOD_CAP: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct ChainStage {
    pub index: usize,
    pub jacobi: PeriodicJacobi<f64>,
    pub period: usize,
    pub eps_n: f64,
    pub mu_n: f64,
    /// `exp(-sqrt(p_n))`.
    pub target: f64,
    pub meets_target: bool,
    pub distance_to_previous: f64,
    pub thin: ThinDiagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproximantChain {
    pub eps: f64,
    pub mode: Mode,
    pub period_cap: usize,
    pub requested_stages: usize,
    pub stages: Vec<ChainStage>,
    pub partial: bool,
    pub stop_reason: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GordonCertificate {
    /// Stage whose period is used as `p`.
    pub n: usize,
    pub p: usize,
    pub k: u32,
    /// Stage whose sequence is tested.
    pub tested_stage: usize,
    pub passed: bool,
}

/// `eps_n = min(eps_{n-1}/2, mu_{n-1}/8, n^{-p_{n-1}}/2)`.
pub fn next_eps(n: usize, prev_eps: f64, prev_mu: f64, prev_period: usize) -> f64 {
    let gordon = 0.5 * (-(prev_period as f64) * (n as f64).ln()).exp();
    (prev_eps / 2.0).min(prev_mu / 8.0).min(gordon)
}

impl ApproximantChain {
    /// Per-stage covering data: `p_n` intervals of length `2 mu_n`.
    pub fn covers(&self) -> Vec<(usize, f64)> {
        self.stages
            .iter()
            .map(|s| (s.period, 2.0 * s.mu_n))
            .collect()
    }

    /// Scales used for the dimension estimate, `(p_n, 2 exp(-sqrt(p_n)))`.
    /// Valid covers for every stage that meets its measure target.
    pub fn box_dim_covers(&self) -> Vec<(usize, f64)> {
        self.stages
            .iter()
            .map(|s| (s.period, 2.0 * s.target))
            .collect()
    }

    /// Ratios `log p_n / (sqrt(p_n) - log 2)`.
    pub fn box_dim_ratios(&self) -> Result<Vec<f64>> {
        let covers: Vec<(usize, f64)> = self
            .stages
            .iter()
            .map(|s| (s.period, (s.period as f64).sqrt() - 2f64.ln()))
            .collect();
        box_dim_ratios_log(&covers)
    }

    /// Same ratios computed from the measured covers `(p_n, 2 mu_n)`.
    pub fn measured_box_dim_ratios(&self) -> Result<Vec<f64>> {
        let covers: Vec<(usize, f64)> = self
            .stages
            .iter()
            .map(|s| (s.period, -(2.0 * s.mu_n).ln()))
            .collect();
        box_dim_ratios_log(&covers)
    }

    pub fn box_dim_estimate(&self) -> Result<f64> {
        Ok(self
            .box_dim_ratios()?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// Gordon checks of stage `n + 1` at `p = p_n` with `k = n` and the
    /// stronger `k = n + 1`, then of the last stage at its own period.
    pub fn gordon_certificates(&self) -> Result<Vec<GordonCertificate>> {
        let mut out = Vec::new();
        for w in self.stages.windows(2) {
            let (prev, next) = (&w[0], &w[1]);
            for k in [prev.index as u32, next.index as u32] {
                out.push(GordonCertificate {
                    n: prev.index,
                    p: prev.period,
                    k,
                    tested_stage: next.index,
                    passed: gordon_check(next.jacobi.a(), prev.period, k)?
                        && gordon_check(next.jacobi.b(), prev.period, k)?,
                });
            }
        }
        if let Some(last) = self.stages.last() {
            let k = last.index as u32;
            out.push(GordonCertificate {
                n: last.index,
                p: last.period,
                k,
                tested_stage: last.index,
                passed: gordon_check(last.jacobi.a(), last.period, k)?
                    && gordon_check(last.jacobi.b(), last.period, k)?,
            });
        }
        Ok(out)
    }
}

/// Builds up to `stages` approximants. Stage `n` runs the thin construction
/// on stage `n - 1` with budget `eps_n` and the smallest tried `N` whose
/// measure is at most `exp(-sqrt(p_n))`. Stops early, flagged partial, when
/// no `N` under the cap reaches the target or a stage cannot be prepared.
pub fn build_limit_periodic(
    j: &PeriodicJacobi<f64>,
    eps: f64,
    stages: usize,
    mode: Mode,
    period_cap: usize,
) -> Result<ApproximantChain> {
    if stages == 0 {
        return Err(Error::Domain("a chain needs at least one stage".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let mut chain = ApproximantChain {
        eps,
        mode,
        period_cap,
        requested_stages: stages,
        stages: Vec::new(),
        partial: false,
        stop_reason: None,
    };
    let mut cur = j.clone();
    let mut eps_n = eps / 4.0;
    for n in 1..=stages {
        if let Some(prev) = chain.stages.last() {
            eps_n = next_eps(n, prev.eps_n, prev.mu_n, prev.period);
        }
        let opts = PlanOptions {
            period_cap,
            ..PlanOptions::default()
        };
        let plan = match ThinPlan::prepare_with(&cur, eps_n, mode, opts) {
            Ok(plan) => plan,
            Err(e) => {
                chain.partial = true;
                chain.stop_reason = Some(format!("stage {n}: {e}"));
                break;
            }
        };
        let mut best: Option<super::pipeline::ThinResult> = None;
        let mut hit = false;
        for nt in tilde_schedule() {
            let big_n = plan.n_for_tilde(nt);
            if big_n * cur.period() > period_cap {
                break;
            }
            let res = plan.assemble(big_n)?;
            let p_n = res.a_tilde.period();
            let ok = res.diagnostics.measured_leb <= (-(p_n as f64).sqrt()).exp();
            let better = best.as_ref().map_or(true, |b| {
                res.diagnostics.measured_leb < b.diagnostics.measured_leb
            });
            if ok || better {
                best = Some(res);
            }
            if ok {
                hit = true;
                break;
            }
        }
        let Some(res) = best else {
            chain.partial = true;
            chain.stop_reason = Some(format!(
                "stage {n}: smallest admissible period {} exceeds the cap {period_cap}",
                plan.min_n() * cur.period()
            ));
            break;
        };
        let p_n = res.a_tilde.period();
        let mu = res.diagnostics.measured_leb;
        let stage = ChainStage {
            index: n,
            distance_to_previous: cur.sup_distance(&res.a_tilde),
            period: p_n,
            eps_n,
            mu_n: mu,
            target: (-(p_n as f64).sqrt()).exp(),
            meets_target: hit,
            jacobi: res.a_tilde.clone(),
            thin: res.diagnostics,
        };
        chain.stages.push(stage);
        if !hit {
            chain.partial = true;
            chain.stop_reason = Some(format!(
                "stage {n}: no N under the period cap reaches mu_n <= exp(-sqrt(p_n)); best mu_n = {mu:e} at p_n = {p_n}"
            ));
            break;
        }
        cur = res.a_tilde;
    }
    Ok(chain)
}

/// `N~ = 1, 2, 3, 4, 6, 8, 12, ...`
fn tilde_schedule() -> impl Iterator<Item = usize> {
    (0..40u32).flat_map(|k| {
        let base = 1usize << k;
        if k == 0 {
            vec![1]
        } else {
            vec![base, base + base / 2]
        }
    })
}
