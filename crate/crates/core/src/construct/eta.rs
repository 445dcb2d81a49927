//! The minimax Lyapunov exponent `eta = min_E max_k L(E, a^{(k)})`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::PeriodicJacobi;
use crate::spectrum::lyapunov;

pub const DEFAULT_GRID: usize = 10_000;
const ETA_FLOOR: f64 = 1e-12;
const GOLDEN_STEPS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eta {
    pub eta: f64,
    /// Energy achieving the minimum.
    pub energy: f64,
    /// Minimum over the grid alone, before refinement.
    pub grid_eta: f64,
    pub radius: f64,
    pub grid_points: usize,
}

/// `max_k L(E, a^{(k)})`.
pub fn max_lyapunov(members: &[PeriodicJacobi<f64>], e: f64) -> f64 {
    members.iter().map(|m| lyapunov(m, e)).fold(0.0, f64::max)
}

/// Radius `2 max_k |a^{(k)}|_inf + 1` (plus `|b|_inf`) of the energy window;
/// outside it every member has positive exponent.
pub fn energy_radius(members: &[PeriodicJacobi<f64>]) -> f64 {
    members
        .iter()
        .map(|m| 2.0 * m.sup_a() + m.b().iter().fold(0.0f64, |x, y| x.max(y.abs())))
        .fold(0.0, f64::max)
        + 1.0
}

/// Grid minimum over `grid` uniform points of `[-R, R]`, refined by a golden
/// section search on the two cells around it.
pub fn compute_eta(members: &[PeriodicJacobi<f64>], grid: usize) -> Result<Eta> {
    if members.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    if grid < 3 {
        return Err(Error::Domain(format!(
            "grid needs at least 3 points, got {grid}"
        )));
    }
    let r = energy_radius(members);
    let step = 2.0 * r / (grid - 1) as f64;
    let at = |i: usize| -r + step * i as f64;
    let values = grid_values(members, grid, &at);
    let (imin, &vmin) = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("grid is nonempty");
    let (mut lo, mut hi) = (at(imin.saturating_sub(1)), at((imin + 1).min(grid - 1)));
    let f = |e: f64| max_lyapunov(members, e);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let (mut eta, mut energy) = (vmin, at(imin));
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < eta {
            eta = v;
            energy = x;
        }
    }
    if eta <= ETA_FLOOR {
        return Err(Error::DegenerateFamily { eta, energy });
    }
    Ok(Eta {
        eta,
        energy,
        grid_eta: vmin,
        radius: r,
        grid_points: grid,
    })
}

fn grid_values(
    members: &[PeriodicJacobi<f64>],
    grid: usize,
    at: &(dyn Fn(usize) -> f64 + Sync),
) -> Vec<f64> {
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(16);
    if threads <= 1 || grid < 256 {
        return (0..grid).map(|i| max_lyapunov(members, at(i))).collect();
    }
    let chunk = grid.div_ceil(threads);
    let mut out = vec![0.0; grid];
    std::thread::scope(|s| {
        for (c, slot) in out.chunks_mut(chunk).enumerate() {
            s.spawn(move || {
                for (k, v) in slot.iter_mut().enumerate() {
                    *v = max_lyapunov(members, at(c * chunk + k));
                }
            });
        }
    });
    out
}

/// Smallest value of `max_k L(E, a^{(k)})` over a uniform grid on `[-R, R]`.
pub fn grid_min_max_lyapunov(members: &[PeriodicJacobi<f64>], grid: usize) -> f64 {
    let r = energy_radius(members);
    let step = 2.0 * r / (grid.max(2) - 1) as f64;
    grid_values(members, grid, &|i| -r + step * i as f64)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}
