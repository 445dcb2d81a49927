//! Block concatenation of family members into one long period.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::PeriodicJacobi;

use super::family::ScalingFamily;

/// Layout of an assembled period.
#[derive(Debug, Clone, Serialize)]
pub struct Assembly {
    #[serde(skip)]
    pub jacobi: PeriodicJacobi<f64>,
    pub n: usize,
    pub n_tilde: usize,
    /// `s_j = j (N~ + 1) (2 N' p)` for `j = 1..=l`.
    pub s_offsets: Vec<usize>,
}

/// Smallest `N` with `N~ >= 1`, i.e. `4 l N'`.
pub fn min_admissible_n(ell: usize, n_prime: usize) -> usize {
    4 * ell * n_prime
}

/// Largest `N~` with `2 l (N~ + 1) N' <= N`, if at least 1.
pub fn n_tilde(n: usize, ell: usize, n_prime: usize) -> Option<usize> {
    (n / (2 * ell * n_prime)).checked_sub(1).filter(|&t| t >= 1)
}

/// Places member `j` on positions `(s_{j-1}, s_j]` and the base sequence on
/// `(s_l, N p]`.
pub fn assemble_sequence(
    base: &PeriodicJacobi<f64>,
    family: &ScalingFamily,
    n: usize,
) -> Result<Assembly> {
    let p = base.period();
    let big_p = family.base_period;
    if big_p % (2 * p) != 0 {
        return Err(Error::Domain(format!(
            "family period {big_p} is not a multiple of 2p = {}",
            2 * p
        )));
    }
    let n_prime = big_p / (2 * p);
    let ell = family.ell();
    let nt = n_tilde(n, ell, n_prime).ok_or(Error::TooSmallN {
        n,
        min: min_admissible_n(ell, n_prime),
    })?;
    let block = (nt + 1) * big_p;
    let s_offsets: Vec<usize> = (1..=ell).map(|j| j * block).collect();
    let total = n * p;
    let mut a = Vec::with_capacity(total);
    let mut b = Vec::with_capacity(total);
    for idx in 1..=total as i64 {
        let slot = (idx as usize - 1) / block;
        let src = family.members.get(slot).unwrap_or(base);
        a.push(src.a_at(idx));
        b.push(src.b_at(idx));
    }
    Ok(Assembly {
        jacobi: PeriodicJacobi::new(a, b)?,
        n,
        n_tilde: nt,
        s_offsets,
    })
}

/// `p~ exp(-p~ eta / (4 l))`.
pub fn predicted_bound(period: usize, eta: f64, ell: usize) -> f64 {
    let pt = period as f64;
    pt * (-pt * eta / (4.0 * ell as f64)).exp()
}
