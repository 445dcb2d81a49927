//! End-to-end thin-spectrum construction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::PeriodicJacobi;
use crate::spectrum::{band_structure, BandStructure};

use super::assemble::{assemble_sequence, min_admissible_n, predicted_bound};
use super::eta::{compute_eta, Eta, DEFAULT_GRID};
use super::family::{
    greedy_scaling_family, greedy_shift_family, scaling_family, shift_family, FamilyKind,
    ScalingFamily,
};
use super::gaps::{open_all_gaps_spread, GapMethod, GapOpening};
use super::zero::{ensure_zero_excluded, ZeroExclusion};
use super::Mode;

/// Candidate values of `N'` (repetitions of the doubled period).
pub const N_PRIME_SCHEDULE: [usize; 12] = [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64];

#[derive(Debug, Clone, Copy)]
pub struct PlanOptions {
    pub eta_grid: usize,
    /// Skip `N'` for which even the smallest admissible period would exceed this.
    pub period_cap: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            eta_grid: DEFAULT_GRID,
            period_cap: 4096,
        }
    }
}

/// Everything that does not depend on `N`.
#[derive(Debug, Clone)]
pub struct ThinPlan {
    pub mode: Mode,
    pub eps: f64,
    pub base: PeriodicJacobi<f64>,
    pub zero: Option<ZeroExclusion>,
    pub gaps: GapOpening,
    pub family: ScalingFamily,
    pub eta: Eta,
    pub n_prime: usize,
    pub leb_base_perturbed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThinDiagnostics {
    pub mode: Mode,
    pub eps: f64,
    pub n: usize,
    pub period: usize,
    pub n_prime: usize,
    pub n_tilde: usize,
    pub ell: usize,
    pub min_n: usize,
    pub eta: f64,
    pub eta_energy: f64,
    pub family_kind: FamilyKind,
    pub family_parameters: Vec<f64>,
    pub lambda: Option<f64>,
    pub k: Option<usize>,
    pub s_offsets: Vec<usize>,
    pub zero_exclusion_delta: f64,
    pub gap_method: GapMethod,
    pub gap_distance: f64,
    /// `Leb(sigma)` of the gap-opened base sequence.
    pub leb_base_perturbed: f64,
    pub measured_leb: f64,
    pub predicted_bound: f64,
    /// `|a - a~|_inf` (including the diagonal).
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThinResult {
    pub a_tilde: PeriodicJacobi<f64>,
    pub diagnostics: ThinDiagnostics,
    #[serde(skip)]
    pub bands: BandStructure<f64>,
}

impl ThinPlan {
    pub fn prepare(j: &PeriodicJacobi<f64>, eps: f64, mode: Mode) -> Result<Self> {
        Self::prepare_with(j, eps, mode, PlanOptions::default())
    }

    pub fn prepare_with(
        j: &PeriodicJacobi<f64>,
        eps: f64,
        mode: Mode,
        opts: PlanOptions,
    ) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        let p = j.period();
        let (zero, start) = match mode {
            Mode::OffDiagonal => {
                if !j.is_off_diagonal() {
                    return Err(Error::Precondition(
                        "off-diagonal mode needs a vanishing diagonal".into(),
                    ));
                }
                let z =
                    ensure_zero_excluded(j.a(), eps).map_err(|e| e.at_stage("zero exclusion"))?;
                let start = PeriodicJacobi::off_diagonal(z.a.clone())?;
                (Some(z), start)
            }
            Mode::Diagonal => (None, j.repeated(2)),
        };
        let mut last_err = None;
        for &np in N_PRIME_SCHEDULE.iter() {
            if min_admissible_n(2, np) * p > opts.period_cap {
                break;
            }
            let rep = start.repeated(np);
            // Cell-constant profiles only pay off for diagonal perturbations.
            let block = match mode {
                Mode::OffDiagonal => 1,
                Mode::Diagonal => p,
            };
            let gaps = match open_all_gaps_spread(&rep, eps / 3.0, mode == Mode::Diagonal, block) {
                Ok(g) => g,
                Err(e) => {
                    last_err = Some(e.at_stage("gap opening"));
                    continue;
                }
            };
            let family = match pick_family(&gaps.jacobi, eps, mode) {
                Ok(f) => f,
                Err(e) => {
                    last_err = Some(e.at_stage("family"));
                    continue;
                }
            };
            if min_admissible_n(family.ell(), np) * p > opts.period_cap {
                last_err = Some(
                    Error::Precondition(format!(
                        "family of {} members at N' = {np} exceeds the period cap {}",
                        family.ell(),
                        opts.period_cap
                    ))
                    .at_stage("family"),
                );
                continue;
            }
            let eta = compute_eta(&family.members, opts.eta_grid).map_err(|e| e.at_stage("eta"))?;
            let leb = band_structure(&gaps.jacobi)?.measure;
            return Ok(Self {
                mode,
                eps,
                base: j.clone(),
                zero,
                gaps,
                family,
                eta,
                n_prime: np,
                leb_base_perturbed: leb,
            });
        }
        Err(Error::RetryExhausted(format!(
            "no N' in the schedule yields a family within eps/3 (last failure: {})",
            last_err.map_or_else(|| "period cap".to_string(), |e| e.to_string())
        )))
    }

    pub fn ell(&self) -> usize {
        self.family.ell()
    }

    pub fn min_n(&self) -> usize {
        min_admissible_n(self.ell(), self.n_prime)
    }

    /// Smallest `N` for each `N~`: `2 l N' (N~ + 1)`.
    pub fn n_for_tilde(&self, n_tilde: usize) -> usize {
        2 * self.ell() * self.n_prime * (n_tilde + 1)
    }

    pub fn assemble(&self, n: usize) -> Result<ThinResult> {
        let asm = assemble_sequence(&self.base, &self.family, n).map_err(|e| match e {
            Error::TooSmallN { .. } => e,
            other => other.at_stage("assembly"),
        })?;
        let bands = band_structure(&asm.jacobi).map_err(|e| e.at_stage("assembly"))?;
        let distance = self.base.sup_distance(&asm.jacobi);
        if !(distance < self.eps) {
            return Err(Error::Consistency(format!(
                "assembled sequence is {distance} away from the input, eps = {}",
                self.eps
            )));
        }
        let period = asm.jacobi.period();
        let diagnostics = ThinDiagnostics {
            mode: self.mode,
            eps: self.eps,
            n,
            period,
            n_prime: self.n_prime,
            n_tilde: asm.n_tilde,
            ell: self.ell(),
            min_n: self.min_n(),
            eta: self.eta.eta,
            eta_energy: self.eta.energy,
            family_kind: self.family.kind,
            family_parameters: self.family.parameters.clone(),
            lambda: self.family.lambda,
            k: self.family.k,
            s_offsets: asm.s_offsets,
            zero_exclusion_delta: self.zero.as_ref().map_or(0.0, |z| z.delta),
            gap_method: self.gaps.method,
            gap_distance: self.gaps.distance,
            leb_base_perturbed: self.leb_base_perturbed,
            measured_leb: bands.measure,
            predicted_bound: predicted_bound(period, self.eta.eta, self.ell()),
            distance,
        };
        Ok(ThinResult {
            a_tilde: asm.jacobi,
            diagnostics,
            bands,
        })
    }
}

fn pick_family(j: &PeriodicJacobi<f64>, eps: f64, mode: Mode) -> Result<ScalingFamily> {
    let (uniform, greedy) = match mode {
        Mode::Diagonal => (shift_family(j, eps), greedy_shift_family(j, eps)),
        Mode::OffDiagonal => (scaling_family(j, eps), greedy_scaling_family(j, eps)),
    };
    match (uniform, greedy) {
        (Ok(u), Ok(g)) => Ok(if u.ell() <= g.ell() { u } else { g }),
        (Ok(u), Err(_)) => Ok(u),
        (Err(_), Ok(g)) => Ok(g),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Runs the whole construction for one `N`.
pub fn thin_spectrum(
    j: &PeriodicJacobi<f64>,
    eps: f64,
    n: usize,
    mode: Mode,
) -> Result<ThinResult> {
    ThinPlan::prepare(j, eps, mode)?.assemble(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_operator_small_run() {
        let j = PeriodicJacobi::constant(1.0, 1).unwrap();
        let plan = ThinPlan::prepare(&j, 0.5, Mode::OffDiagonal).unwrap();
        let n = plan.min_n();
        let r = plan.assemble(n).unwrap();
        assert_eq!(r.a_tilde.period(), n);
        assert!(r.diagnostics.distance < 0.5);
        assert!(r.diagnostics.measured_leb < 4.0);
        assert!(plan.assemble(n - 1).is_err());
    }

    #[test]
    fn off_diagonal_mode_rejects_diagonal() {
        let j = PeriodicJacobi::new(vec![1.0], vec![0.5]).unwrap();
        assert!(matches!(
            ThinPlan::prepare(&j, 0.5, Mode::OffDiagonal),
            Err(Error::Precondition(_))
        ));
    }
}
