//! Excluding 0 from the spectrum by a small perturbation of a doubled period.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::PeriodicJacobi;
use crate::spectrum::lambda0;

const MAX_HALVINGS: usize = 60;
/// Relative distance from 0 to the spectrum that counts as excluded.
const MIN_MARGIN: f64 = 1e-9;

/// A doubled period with `0` outside its spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroExclusion {
    /// Period `2p`.
    pub a: Vec<f64>,
    /// Relative factor `delta` applied as `a_{2p} (1 - delta)`; 0 if unchanged.
    pub delta: f64,
    pub lambda0: f64,
}

/// Returns `a'` of period `2p` with `|a - a'| < eps/3`, `|a'| <= |a|` and
/// `lambda_0(a') > 0`.
pub fn ensure_zero_excluded(a: &[f64], eps: f64) -> Result<ZeroExclusion> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let doubled = [a, a].concat();
    let l0 = lambda0(&PeriodicJacobi::off_diagonal(doubled.clone())?)?;
    if l0 > 0.0 {
        return Ok(ZeroExclusion {
            a: doubled,
            delta: 0.0,
            lambda0: l0,
        });
    }
    let last = *doubled.last().expect("nonempty period");
    // Start close to the eps/3 budget: a larger delta leaves a wider margin
    // around 0 for the later perturbations.
    let mut delta = (eps / 3.0 * 15.0 / 16.0 / last).min(0.5);
    for _ in 0..MAX_HALVINGS {
        let mut cand = doubled.clone();
        *cand.last_mut().expect("nonempty period") = last * (1.0 - delta);
        let l0 = lambda0(&PeriodicJacobi::off_diagonal(cand.clone())?)?;
        if l0 > MIN_MARGIN * last {
            return Ok(ZeroExclusion {
                a: cand,
                delta,
                lambda0: l0,
            });
        }
        delta /= 2.0;
    }
    Err(Error::RetryExhausted(format!(
        "no admissible zero-excluding perturbation after {MAX_HALVINGS} halvings"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{band_structure, zero_in_spectrum_offdiag};

    fn sup(x: &[f64], y: &[f64]) -> f64 {
        let l = x.len().max(y.len());
        (0..l)
            .map(|i| (x[i % x.len()] - y[i % y.len()]).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn free_operator() {
        let z = ensure_zero_excluded(&[1.0], 0.6).unwrap();
        assert_eq!(z.a.len(), 2);
        assert_eq!(z.a[0], 1.0);
        let d = 1.0 - z.a[1];
        assert!(d > 0.0 && d <= 0.2);
        assert!((z.lambda0 - d).abs() < 1e-12);
        let bs = band_structure(&PeriodicJacobi::off_diagonal(z.a).unwrap()).unwrap();
        assert!((bs.bands[0].0 + 2.0 - d).abs() < 1e-12);
        assert!((bs.bands[1].0 - d).abs() < 1e-12);
    }

    #[test]
    fn already_excluded() {
        let z = ensure_zero_excluded(&[1.0, 2.0], 0.1).unwrap();
        assert_eq!(z.a, vec![1.0, 2.0, 1.0, 2.0]);
        assert_eq!(z.delta, 0.0);
    }

    #[test]
    fn odd_period() {
        let a = [1.0, 2.0, 3.0];
        let z = ensure_zero_excluded(&a, 0.3).unwrap();
        assert_eq!(z.a.len(), 6);
        assert!(!zero_in_spectrum_offdiag(&z.a));
        assert!(z.lambda0 > 0.0);
        assert!(sup(&a, &z.a) < 0.1);
        assert!(z.a.iter().cloned().fold(0.0, f64::max) <= 3.0);
    }

    #[test]
    fn rejects_bad_eps() {
        assert!(ensure_zero_excluded(&[1.0], 0.0).is_err());
        assert!(ensure_zero_excluded(&[1.0], f64::NAN).is_err());
    }
}
