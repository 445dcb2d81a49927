//! Gordon-type closeness of three consecutive period windows.

use crate::error::{Error, Result};

/// Checks `max_{1<=n<=p} |a_n - a_{n +/- p}| < k^{-p}` on a window holding
/// `a_{1-p}, ..., a_{2p}` (length at least `3p`). The comparison is done in
/// log scale so it stays strict when `k^{-p}` underflows.
pub fn gordon_check_window(window: &[f64], p: usize, k: u32) -> Result<bool> {
    if p == 0 || k == 0 {
        return Err(Error::Domain("p and k must be positive".into()));
    }
    if window.len() < 3 * p {
        return Err(Error::Domain(format!(
            "window of length {} does not cover indices 1-p..=2p for p = {p}",
            window.len()
        )));
    }
    // window[i] holds a_{i + 1 - p}
    let at = |n: i64| window[(n - 1 + p as i64) as usize];
    let mut worst = 0.0f64;
    for n in 1..=p as i64 {
        let d = (at(n) - at(n + p as i64))
            .abs()
            .max((at(n) - at(n - p as i64)).abs());
        if d.is_nan() {
            return Err(Error::Domain("window contains NaN".into()));
        }
        worst = worst.max(d);
    }
    if worst == 0.0 {
        return Ok(true);
    }
    Ok(worst.ln() < -(p as f64) * f64::from(k).ln())
}

/// [`gordon_check_window`] for a periodic sequence given by one period.
pub fn gordon_check(period_seq: &[f64], p: usize, k: u32) -> Result<bool> {
    if period_seq.is_empty() {
        return Err(Error::Domain("empty sequence".into()));
    }
    let q = period_seq.len() as i64;
    let window: Vec<f64> = (1 - p as i64..=2 * p as i64)
        .map(|n| period_seq[(n - 1).rem_euclid(q) as usize])
        .collect();
    gordon_check_window(&window, p, k)
}
