//! Opening every spectral gap by small perturbations.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::PeriodicJacobi;
use crate::spectrum::{band_structure, lambda0_of};

pub const MAX_ATTEMPTS: usize = 32;

/// How the gaps were opened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    AlreadyOpen,
    SingleSite,
    /// A perturbation spread over the whole period.
    Spread,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapOpening {
    pub jacobi: PeriodicJacobi<f64>,
    pub method: GapMethod,
    pub attempts: usize,
    /// Sup-distance to the input coefficients.
    pub distance: f64,
}

fn status(j: &PeriodicJacobi<f64>) -> Result<(bool, bool)> {
    let bs = band_structure(j)?;
    Ok((bs.all_gaps_open(), lambda0_of(&bs) > 0.0))
}

fn check_budget(budget: f64) -> Result<()> {
    if budget > 0.0 && budget.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "budget must be positive, got {budget}"
        )))
    }
}

/// Opens all closed gaps of `J_a` by multiplying off-diagonal entries,
/// starting with the last one, by `1 + delta` with shrinking `delta`. Sites
/// are visited cyclically from the end of the period. Zero stays outside the
/// spectrum if it was outside on input.
pub fn open_all_gaps(a: &[f64], budget: f64) -> Result<GapOpening> {
    check_budget(budget)?;
    let input = PeriodicJacobi::off_diagonal(a.to_vec())?;
    let (open, zero_out) = status(&input)?;
    if open {
        return Ok(GapOpening {
            jacobi: input,
            method: GapMethod::AlreadyOpen,
            attempts: 0,
            distance: 0.0,
        });
    }
    let p = a.len();
    let amax = a.iter().cloned().fold(0.0, f64::max);
    // Cumulative perturbation stays below 0.9 * budget.
    let mut step = 0.45 * budget / amax;
    let mut cur = a.to_vec();
    for attempt in 1..=MAX_ATTEMPTS {
        let site = p - 1 - (attempt - 1) % p;
        cur[site] *= 1.0 + step;
        let j = PeriodicJacobi::off_diagonal(cur.clone())?;
        let (open, z) = status(&j)?;
        if open && (z || !zero_out) {
            let distance = sup_distance(a, &cur);
            return Ok(GapOpening {
                jacobi: j,
                method: GapMethod::SingleSite,
                attempts: attempt,
                distance,
            });
        }
        step /= 2.0;
    }
    Err(Error::RetryExhausted(format!(
        "gaps still closed after {MAX_ATTEMPTS} single-site perturbations"
    )))
}

/// Multisine `sum_{m=1}^{P/2} cos(2 pi m n / P - pi m (m - 1) / (P/2))`
/// rescaled to `[0, 1]`. Every nonzero frequency carries the same weight,
/// and the quadratic phases keep the peak low, so all gaps of a nearly free
/// period open by comparable amounts.
pub fn multisine(period: usize) -> Vec<f64> {
    let half = period / 2;
    if half == 0 {
        return vec![0.0; period];
    }
    let p = period as f64;
    let k = half as f64;
    let raw: Vec<f64> = (0..period)
        .map(|n| {
            (1..=half)
                .map(|m| {
                    let m = m as f64;
                    (2.0 * PI * m * n as f64 / p - PI * m * (m - 1.0) / k).cos()
                })
                .sum()
        })
        .collect();
    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return vec![0.0; period];
    }
    raw.iter().map(|&x| (x - lo) / (hi - lo)).collect()
}

/// [`multisine`] over `period / block` cells, held constant on each cell.
/// A narrow band of a `block`-periodic operator only sees cell averages of a
/// perturbation, so this keeps the cell spectrum flat for every band.
pub fn block_multisine(period: usize, block: usize) -> Vec<f64> {
    if block == 0 || period % block != 0 {
        return multisine(period);
    }
    let cells = multisine(period / block);
    (0..period).map(|n| cells[n / block]).collect()
}

/// Chirp profile `u_n = (1 + cos(pi n^2 / P)) / 2`, a deterministic sequence
/// spread over `[0, 1]` without short periods.
pub fn chirp(period: usize) -> Vec<f64> {
    let p = period as f64;
    (0..period)
        .map(|n| {
            let n = n as f64;
            (1.0 + (PI * n * n / p).cos()) / 2.0
        })
        .collect()
}

/// Weyl profile `u_n = frac(n phi)` with the golden ratio `phi`. Unlike the
/// chirp, `u_{n+q} - u_n` never vanishes, so it also splits bands of
/// sequences that are already `q`-periodic with `q | P`.
pub fn golden(period: usize) -> Vec<f64> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    (0..period).map(|n| (n as f64 * phi).fract()).collect()
}

/// Opens all gaps with a perturbation spread over the whole period.
///
/// Off-diagonal mode: `a_n (1 - amp u_n)`; diagonal mode: `b_n + amp u_n`.
/// Each amplitude tries [`block_multisine`] (when `block > 1`), [`multisine`],
/// [`chirp`] and [`golden`] in turn; the amplitude shrinks when all fail.
/// `block` is the period the input repeats, if known. Gap sizes come out comparable to
/// the perturbation, which is what the scaling families need. Falls back to
/// [`open_all_gaps`] in off-diagonal mode.
pub fn open_all_gaps_spread(
    j: &PeriodicJacobi<f64>,
    budget: f64,
    diagonal: bool,
    block: usize,
) -> Result<GapOpening> {
    check_budget(budget)?;
    let (_, zero_out) = status(j)?;
    let p = j.period();
    let mut profiles = Vec::with_capacity(4);
    if block > 1 && block < p && p % block == 0 {
        profiles.push(block_multisine(p, block));
    }
    profiles.extend([multisine(p), chirp(p), golden(p)]);
    let amax = j.sup_a();
    let mut amp = if diagonal {
        0.9 * budget
    } else {
        0.9 * budget / amax
    };
    for attempt in 1..=MAX_ATTEMPTS {
        for u in &profiles {
            let cand = if diagonal {
                PeriodicJacobi::new(
                    j.a().to_vec(),
                    j.b().iter().zip(u).map(|(&b, &w)| b + amp * w).collect(),
                )?
            } else {
                PeriodicJacobi::new(
                    j.a()
                        .iter()
                        .zip(u)
                        .map(|(&a, &w)| a * (1.0 - amp * w))
                        .collect(),
                    j.b().to_vec(),
                )?
            };
            let (open, z) = status(&cand)?;
            if open && (z || !zero_out || diagonal) {
                let distance = j.sup_distance(&cand);
                return Ok(GapOpening {
                    jacobi: cand,
                    method: GapMethod::Spread,
                    attempts: attempt,
                    distance,
                });
            }
        }
        amp /= 2.0;
    }
    if diagonal || !j.is_off_diagonal() {
        return Err(Error::RetryExhausted(format!(
            "gaps still closed after {MAX_ATTEMPTS} spread amplitudes"
        )));
    }
    open_all_gaps(j.a(), budget)
}

fn sup_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimer_with_closed_gap() {
        let g = open_all_gaps(&[1.0, 1.0], 0.1).unwrap();
        assert_eq!(g.method, GapMethod::SingleSite);
        let a = g.jacobi.a();
        assert_eq!(a[0], 1.0);
        let d = a[1] - 1.0;
        assert!(d > 0.0 && d <= 0.1);
        let bs = band_structure(&g.jacobi).unwrap();
        assert!(bs.all_gaps_open());
        assert!((bs.bands[0].1 + d).abs() < 1e-12 && (bs.bands[1].0 - d).abs() < 1e-12);
    }

    #[test]
    fn nothing_to_open() {
        let g = open_all_gaps(&[1.0, 2.0], 0.1).unwrap();
        assert_eq!(g.method, GapMethod::AlreadyOpen);
        assert_eq!(g.jacobi.a(), &[1.0, 2.0]);
    }

    #[test]
    fn free_operator_as_period_four() {
        let g = open_all_gaps(&[1.0; 4], 0.05).unwrap();
        let bs = band_structure(&g.jacobi).unwrap();
        assert_eq!(bs.open_gap_count(), 3);
        assert!(bs.gaps.iter().all(|x| x.length() > 0.0));
        assert!(g.distance < 0.05);
    }

    #[test]
    fn chirp_opens_long_periods() {
        let j = PeriodicJacobi::constant(1.0, 48).unwrap();
        let g = open_all_gaps_spread(&j, 0.1, false, 1).unwrap();
        assert!(band_structure(&g.jacobi).unwrap().all_gaps_open());
        assert!(g.distance < 0.1);
        let g = open_all_gaps_spread(&j, 0.1, true, 1).unwrap();
        assert!(band_structure(&g.jacobi).unwrap().all_gaps_open());
        assert!(g.distance < 0.1);
        assert_eq!(g.jacobi.a(), j.a());
    }

    #[test]
    fn rejects_bad_budget() {
        assert!(open_all_gaps(&[1.0], 0.0).is_err());
    }
}
