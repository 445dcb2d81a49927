//! Band structure of periodic Jacobi matrices.

use serde::{Deserialize, Serialize};

use crate::eigen::periodic_eigenvalues;
use crate::error::Result;
use crate::intervals::IntervalUnion;
use crate::jacobi::PeriodicJacobi;
use crate::scalar::Real;
use crate::sl2core::{unchecked_step, Mat2};

/// Relative edge separation below which a gap counts as closed.
pub const CLOSED_GAP_TOL: f64 = 1e-9;
/// Threshold on `|Phi(E) -/+ I|` confirming a closed gap algebraically.
pub const CLOSED_GAP_RESIDUAL: f64 = 1e-6;
/// Distance within which 0 is declared to lie in the spectrum.
pub const ZERO_TOL: f64 = 1e-9;

const RENORM_AT: f64 = 1e64;

/// Monodromy from base 0 written as `exp(log_scale) * matrix`, with the
/// matrix kept of moderate size so long periods do not overflow.
pub fn scaled_monodromy<T: Real>(j: &PeriodicJacobi<T>, energy: T) -> (Mat2<T>, T) {
    let big = T::lit(RENORM_AT).min(T::max_value().sqrt().sqrt());
    let mut m = Mat2::identity();
    let mut log_scale = T::zero();
    for (&a, &b) in j.a().iter().zip(j.b()) {
        m = unchecked_step(a, b, energy) * m;
        let size = m
            .m11
            .abs()
            .max(m.m12.abs())
            .max(m.m21.abs())
            .max(m.m22.abs());
        if size > big {
            m = m.scale(size.recip());
            log_scale = log_scale + size.ln();
        }
    }
    (m, log_scale)
}

/// `D(E) = Tr Phi(E)`. Overflows to infinity far outside the spectrum of a
/// long period.
pub fn discriminant<T: Real>(j: &PeriodicJacobi<T>, energy: T) -> T {
    let (m, s) = scaled_monodromy(j, energy);
    m.trace() * s.exp()
}

/// `L(E) = (1/p) log spr Phi(E)`; zero on the spectrum.
pub fn lyapunov<T: Real>(j: &PeriodicJacobi<T>, energy: T) -> T {
    let (m, s) = scaled_monodromy(j, energy);
    let tr = m.trace().abs();
    let two = T::lit(2.0);
    let d = tr * s.exp();
    if d <= two {
        return T::zero();
    }
    let p = T::count(j.period());
    // log spr = log|D| - log 2 + log(1 + sqrt(1 - 4/D^2))
    let inv = two / d;
    let log_spr = tr.ln() + s - two.ln() + (T::one() + (T::one() - inv * inv).sqrt()).ln();
    (log_spr / p).max(T::zero())
}

/// A spectral gap between consecutive bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Gap<T> {
    Open {
        interval: (T, T),
    },
    Closed {
        at: T,
        /// `|Phi(at) -/+ I|` in the max-entry norm.
        monodromy_residual: T,
    },
}

impl<T: Real> Gap<T> {
    pub fn is_open(&self) -> bool {
        matches!(self, Gap::Open { .. })
    }

    pub fn length(&self) -> T {
        match *self {
            Gap::Open { interval } => interval.1 - interval.0,
            Gap::Closed { .. } => T::zero(),
        }
    }
}

/// Bands, gaps and edges of a periodic Jacobi matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure<T> {
    pub period: usize,
    /// The `p` bands `[E_j^-, E_j^+]` in increasing order.
    pub bands: Vec<(T, T)>,
    /// The `p - 1` gaps between consecutive bands.
    pub gaps: Vec<Gap<T>>,
    /// All `2p` edges sorted.
    #[serde(skip)]
    pub edges: Vec<T>,
    pub measure: T,
}

impl<T: Real> BandStructure<T> {
    /// The spectrum as a canonical union (closed gaps merge neighbours).
    pub fn spectrum(&self) -> IntervalUnion<T> {
        IntervalUnion::new(self.bands.clone()).expect("band edges are finite and ordered")
    }

    pub fn open_gap_count(&self) -> usize {
        self.gaps.iter().filter(|g| g.is_open()).count()
    }

    pub fn closed_gap_count(&self) -> usize {
        self.gaps.len() - self.open_gap_count()
    }

    pub fn all_gaps_open(&self) -> bool {
        self.closed_gap_count() == 0
    }

    pub fn max_band_length(&self) -> T {
        self.bands
            .iter()
            .map(|&(l, h)| h - l)
            .fold(T::zero(), T::max)
    }

    pub fn min_open_gap_length(&self) -> Option<T> {
        self.gaps
            .iter()
            .filter(|g| g.is_open())
            .map(Gap::length)
            .reduce(T::min)
    }

    /// Index of the band containing `e`, if any.
    pub fn band_index(&self, e: T) -> Option<usize> {
        let i = self.bands.partition_point(|b| b.1 < e);
        (i < self.bands.len() && self.bands[i].0 <= e).then_some(i)
    }
}

/// Edges are eigenvalues of the periodic and antiperiodic truncations; they
/// are paired into bands left to right.
pub fn band_structure<T: Real>(j: &PeriodicJacobi<T>) -> Result<BandStructure<T>> {
    let p = j.period();
    let mut edges = periodic_eigenvalues(j.a(), j.b(), T::one())?;
    edges.extend(periodic_eigenvalues(j.a(), j.b(), -T::one())?);
    edges.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));

    let bands: Vec<(T, T)> = (0..p).map(|k| (edges[2 * k], edges[2 * k + 1])).collect();
    let mut gaps = Vec::with_capacity(p.saturating_sub(1));
    let tol = T::tol(CLOSED_GAP_TOL);
    let two = T::lit(2.0);
    for k in 0..p.saturating_sub(1) {
        let (l, r) = (bands[k].1, bands[k + 1].0);
        // Closed needs both near-coincident edges and Phi = +/-I there;
        // crossed edges count as closed regardless.
        let closed = if r - l < tol * (T::one() + l.abs().max(r.abs())) {
            let at = (l + r) / two;
            let (m, s) = scaled_monodromy(j, at);
            let phi = m.scale(s.exp());
            let sign = phi.trace().signum();
            let residual = phi.max_abs_diff(&Mat2::identity().scale(sign));
            (residual < T::tol(CLOSED_GAP_RESIDUAL) || r <= l).then_some(Gap::Closed {
                at,
                monodromy_residual: residual,
            })
        } else {
            None
        };
        gaps.push(closed.unwrap_or(Gap::Open { interval: (l, r) }));
    }
    // Tangent bands may cross by roundoff; pin them to the shared point.
    let mut bands = bands;
    for (k, g) in gaps.iter().enumerate() {
        if let Gap::Closed { at, .. } = *g {
            bands[k].1 = at;
            bands[k + 1].0 = at;
        }
    }
    let measure = bands.iter().map(|&(l, h)| h - l).sum();
    Ok(BandStructure {
        period: p,
        bands,
        gaps,
        edges,
        measure,
    })
}

/// `lambda_0 = min{|E| : E in sigma(J)}`, snapped to 0 within [`ZERO_TOL`].
pub fn lambda0<T: Real>(j: &PeriodicJacobi<T>) -> Result<T> {
    Ok(lambda0_of(&band_structure(j)?))
}

pub fn lambda0_of<T: Real>(bs: &BandStructure<T>) -> T {
    let d = bs
        .bands
        .iter()
        .map(|&(l, h)| {
            if l <= T::zero() && T::zero() <= h {
                T::zero()
            } else {
                l.abs().min(h.abs())
            }
        })
        .fold(T::infinity(), T::min);
    if d <= T::tol(ZERO_TOL) {
        T::zero()
    } else {
        d
    }
}

/// Whether `0` lies in the spectrum of the off-diagonal matrix `J_a`: true
/// for odd periods, and for even periods exactly when the products of the
/// odd-indexed and even-indexed entries agree.
pub fn zero_in_spectrum_offdiag<T: Real>(a: &[T]) -> bool {
    let p = a.len();
    if p % 2 == 1 {
        return true;
    }
    let (mut odd, mut even) = (T::zero(), T::zero());
    for (i, &x) in a.iter().enumerate() {
        // a[i] is a_{i+1}
        if i % 2 == 0 {
            odd = odd + x.ln();
        } else {
            even = even + x.ln();
        }
    }
    (odd - even).abs() <= T::tol(1e-12)
}

/// `J_{lambda a, lambda b} = lambda J`.
pub fn rescale<T: Real>(j: &PeriodicJacobi<T>, lambda: T) -> Result<PeriodicJacobi<T>> {
    j.scaled(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn offdiag(a: &[f64]) -> PeriodicJacobi<f64> {
        PeriodicJacobi::off_diagonal(a.to_vec()).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        assert_relative_eq!(discriminant(&offdiag(&[1.0]), 0.3), 0.3);
        assert_relative_eq!(discriminant(&offdiag(&[1.0, 2.0]), 0.0), -2.5);
        for c in [0.1, 1.0, 7.5] {
            assert_relative_eq!(discriminant(&offdiag(&[c, c]), 0.0), -2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn free_bands() {
        let bs = band_structure(&offdiag(&[1.0])).unwrap();
        assert_eq!(bs.bands, vec![(-2.0, 2.0)]);
        assert!(bs.gaps.is_empty());
        assert_eq!(bs.measure, 4.0);
    }

    #[test]
    fn dimer_bands() {
        let bs = band_structure(&offdiag(&[1.0, 2.0])).unwrap();
        assert_eq!(bs.bands, vec![(-3.0, -1.0), (1.0, 3.0)]);
        assert_eq!(
            bs.gaps,
            vec![Gap::Open {
                interval: (-1.0, 1.0)
            }]
        );
        assert_relative_eq!(bs.measure, 4.0);
    }

    #[test]
    fn closed_gap_detected() {
        let bs = band_structure(&offdiag(&[1.0, 1.0])).unwrap();
        assert_eq!(bs.bands.len(), 2);
        match bs.gaps[0] {
            Gap::Closed {
                at,
                monodromy_residual,
            } => {
                assert!(at.abs() < 1e-12);
                assert!(monodromy_residual < CLOSED_GAP_RESIDUAL);
            }
            g => panic!("expected closed gap, got {g:?}"),
        }
        assert_eq!(bs.spectrum().components().len(), 1);
        let bs = band_structure(&offdiag(&[1.0; 6])).unwrap();
        assert_eq!(bs.closed_gap_count(), 5);
    }

    #[test]
    fn lyapunov_examples() {
        assert_eq!(lyapunov(&offdiag(&[1.0]), 1.0), 0.0);
        assert_relative_eq!(
            lyapunov(&offdiag(&[1.0]), 3.0),
            ((3.0 + 5f64.sqrt()) / 2.0).ln(),
            epsilon = 1e-14
        );
        assert_relative_eq!(
            lyapunov(&offdiag(&[1.0, 2.0]), 0.0),
            0.5 * 2f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn lyapunov_survives_long_periods() {
        let j = offdiag(&[1.0, 2.0]).repeated(2048);
        let l = lyapunov(&j, 0.0);
        assert!(l.is_finite());
        assert_relative_eq!(l, 0.5 * 2f64.ln(), epsilon = 1e-10);
        assert!(discriminant(&j, 0.0).is_infinite());
    }

    #[test]
    fn lambda0_examples() {
        assert_relative_eq!(lambda0(&offdiag(&[1.0, 2.0])).unwrap(), 1.0);
        assert_eq!(lambda0(&offdiag(&[0.3, 2.0, 1.1])).unwrap(), 0.0);
        assert_eq!(lambda0(&offdiag(&[1.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn parity_examples() {
        assert!(zero_in_spectrum_offdiag(&[1.0, 2.0, 3.0]));
        assert!(!zero_in_spectrum_offdiag(&[1.0, 2.0]));
        assert!(zero_in_spectrum_offdiag(&[1.0, 2.0, 2.0, 1.0]));
    }

    #[test]
    fn rescale_examples() {
        let j = rescale(&offdiag(&[1.0, 2.0]), 2.0).unwrap();
        assert_eq!(
            band_structure(&j).unwrap().bands,
            vec![(-6.0, -2.0), (2.0, 6.0)]
        );
        let j = rescale(&offdiag(&[1.0]), 3.0).unwrap();
        assert_eq!(band_structure(&j).unwrap().bands, vec![(-6.0, 6.0)]);
        assert!(rescale(&offdiag(&[1.0]), 0.0).is_err());
        assert!(rescale(&offdiag(&[1.0]), -1.0).is_err());
    }

    #[test]
    fn diagonal_shift_moves_bands() {
        let j = PeriodicJacobi::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(
            band_structure(&j).unwrap().bands,
            vec![(-2.5, -0.5), (1.5, 3.5)]
        );
    }
}
