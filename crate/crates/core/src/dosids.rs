//! Integrated density of states and the rotation-angle derivative of
//! periodic Jacobi matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::PeriodicJacobi;
use crate::scalar::Real;
use crate::sl2core::{elliptic_fixed_point, unchecked_step, ComplexPoint};
use crate::spectrum::{band_structure, discriminant, scaled_monodromy, BandStructure};

/// Cached band data for evaluating the IDS `k(E)`.
#[derive(Debug, Clone)]
pub struct IdsProfile<T> {
    jacobi: PeriodicJacobi<T>,
    bands: BandStructure<T>,
    /// Per band: true when `D = +2` at the left edge, so `theta` runs from 0 to pi.
    rising: Vec<bool>,
}

impl<T: Real> IdsProfile<T> {
    pub fn new(jacobi: PeriodicJacobi<T>) -> Result<Self> {
        let bands = band_structure(&jacobi)?;
        let rising = bands
            .bands
            .iter()
            .map(|&(l, _)| discriminant(&jacobi, l) > T::zero())
            .collect();
        Ok(Self {
            jacobi,
            bands,
            rising,
        })
    }

    pub fn jacobi(&self) -> &PeriodicJacobi<T> {
        &self.jacobi
    }

    pub fn bands(&self) -> &BandStructure<T> {
        &self.bands
    }

    /// `k(E)`: `j/p` on the `j`-th gap, interpolated by `theta(E)/(p pi)`
    /// inside bands.
    pub fn ids(&self, energy: T) -> T {
        let b = &self.bands.bands;
        let p = T::count(b.len());
        let below = b.partition_point(|band| band.1 < energy);
        if below == b.len() {
            return T::one();
        }
        let (lo, _) = b[below];
        if energy < lo {
            return T::count(below) / p;
        }
        let half = discriminant(&self.jacobi, energy) / T::lit(2.0);
        let theta = half.max(-T::one()).min(T::one()).acos();
        let frac = if self.rising[below] {
            theta / T::PI()
        } else {
            T::one() - theta / T::PI()
        };
        let frac = frac.max(T::zero()).min(T::one());
        (T::count(below) + frac) / p
    }
}

/// Free-function form of [`IdsProfile::ids`].
pub fn ids<T: Real>(profile: &IdsProfile<T>, energy: T) -> T {
    profile.ids(energy)
}

/// Fixed points `z_1, ..., z_p` of the monodromies `Phi_0, ..., Phi_{p-1}`,
/// linked by `z_{j+1} = T(j) z_j`.
pub fn fixed_points<T: Real>(j: &PeriodicJacobi<T>, energy: T) -> Result<Vec<ComplexPoint<T>>> {
    let (m, s) = scaled_monodromy(j, energy);
    let d = m.trace() * s.exp();
    if !(d.abs() < T::lit(2.0)) {
        return Err(Error::NotInBandInterior {
            energy: energy.as_f64(),
            discriminant: d.as_f64(),
        });
    }
    let mut z = elliptic_fixed_point(&m)?;
    let mut out = Vec::with_capacity(j.period());
    out.push(z);
    for (&a, &b) in j.a().iter().zip(j.b()).take(j.period() - 1) {
        z = unchecked_step(a, b, energy).mobius(z);
        out.push(z);
    }
    Ok(out)
}

/// `|d theta / dE| = (1/2) sum_j |z_j|^2 / Im z_j`.
pub fn dtheta_de<T: Real>(j: &PeriodicJacobi<T>, energy: T) -> Result<T> {
    let zs = fixed_points(j, energy)?;
    Ok(zs.iter().map(|z| z.norm_sq() / z.im).sum::<T>() / T::lit(2.0))
}

/// `sum_j (1 + |z_j|^2) / Im z_j`, the total squared Hilbert-Schmidt norm of
/// the rotation conjugacies along one period.
pub fn hs_sum<T: Real>(j: &PeriodicJacobi<T>, energy: T) -> Result<T> {
    let zs = fixed_points(j, energy)?;
    Ok(zs.iter().map(|z| (T::one() + z.norm_sq()) / z.im).sum())
}

/// Comparison of `dk/dE` against the Hilbert-Schmidt lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdsBound<T> {
    pub lhs: T,
    pub rhs: T,
    pub ok: bool,
    pub equality_case: bool,
}

/// `dk/dE = |d theta/dE| / (p pi)` against
/// `(C/p) sum_j |M_j|_2^2` with `C = 1 / (2 (1 + |a|_inf^2) pi)`.
pub fn check_ids_bound<T: Real>(j: &PeriodicJacobi<T>, energy: T) -> Result<IdsBound<T>> {
    let zs = fixed_points(j, energy)?;
    let p = T::count(j.period());
    let two = T::lit(2.0);
    let dtheta = zs.iter().map(|z| z.norm_sq() / z.im).sum::<T>() / two;
    let hs: T = zs.iter().map(|z| (T::one() + z.norm_sq()) / z.im).sum();
    let a_max = j.sup_a();
    let c = (two * (T::one() + a_max * a_max) * T::PI()).recip();
    let lhs = dtheta / (p * T::PI());
    let rhs = c * hs / p;
    let constant_b = j.b().iter().all(|&x| x == j.b()[0]);
    Ok(IdsBound {
        lhs,
        rhs,
        ok: lhs >= rhs - T::tol(1e-9),
        equality_case: j.is_constant_a() && constant_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn free() -> PeriodicJacobi<f64> {
        PeriodicJacobi::off_diagonal(vec![1.0]).unwrap()
    }

    #[test]
    fn free_ids_closed_form() {
        let prof = IdsProfile::new(free()).unwrap();
        assert_relative_eq!(prof.ids(0.0), 0.5, epsilon = 1e-15);
        for e in [-1.9, -0.7, 0.3, 1.2] {
            assert_relative_eq!(prof.ids(e), (-e / 2.0).acos() / PI, epsilon = 1e-14);
        }
        assert_eq!(prof.ids(-2.5), 0.0);
        assert_eq!(prof.ids(2.5), 1.0);
    }

    #[test]
    fn dimer_ids_on_gap() {
        let prof = IdsProfile::new(PeriodicJacobi::off_diagonal(vec![1.0, 2.0]).unwrap()).unwrap();
        assert_relative_eq!(prof.ids(-1.0), 0.5, epsilon = 1e-12);
        assert_eq!(prof.ids(0.0), 0.5);
        assert_eq!(prof.ids(-5.0), 0.0);
        assert_relative_eq!(prof.ids(3.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dtheta_examples() {
        assert_relative_eq!(dtheta_de(&free(), 0.0).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(
            dtheta_de(&free(), 1.0).unwrap(),
            1.0 / 3f64.sqrt(),
            epsilon = 1e-14
        );
        let j = PeriodicJacobi::off_diagonal(vec![1.0, 2.0]).unwrap();
        let h = 1e-6;
        let theta = |e: f64| (discriminant(&j, e) / 2.0).acos();
        let fd = ((theta(2.0 + h) - theta(2.0 - h)) / (2.0 * h)).abs();
        let an = dtheta_de(&j, 2.0).unwrap();
        assert!(((an - fd) / fd).abs() < 1e-6, "{an} vs {fd}");
    }

    #[test]
    fn dtheta_outside_band_is_an_error() {
        assert!(matches!(
            dtheta_de(&free(), 2.0),
            Err(Error::NotInBandInterior { .. })
        ));
        assert!(hs_sum(&free(), 3.0).is_err());
    }

    #[test]
    fn hs_sum_examples() {
        assert_relative_eq!(hs_sum(&free(), 0.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(
            hs_sum(&free(), 1.0).unwrap(),
            4.0 / 3f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn bound_examples() {
        let r = check_ids_bound(&free(), 0.0).unwrap();
        assert_relative_eq!(r.lhs, 1.0 / (2.0 * PI), epsilon = 1e-14);
        assert_relative_eq!(r.rhs, 1.0 / (2.0 * PI), epsilon = 1e-14);
        assert!(r.ok && r.equality_case);
        let r = check_ids_bound(&free(), 1.0).unwrap();
        assert_relative_eq!(r.lhs, 1.0 / (PI * 3f64.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(r.lhs, r.rhs, epsilon = 1e-12);
        let j = PeriodicJacobi::off_diagonal(vec![1.0, 2.0]).unwrap();
        let r = check_ids_bound(&j, 2.0).unwrap();
        assert!(r.ok && !r.equality_case);
        assert!(r.lhs > r.rhs);
    }

    #[test]
    fn fixed_points_are_fixed() {
        let j = PeriodicJacobi::new(vec![0.5, 1.5, 1.0], vec![0.2, -0.4, 0.0]).unwrap();
        let bs = band_structure(&j).unwrap();
        let (l, h) = bs.bands[1];
        let e = 0.5 * (l + h);
        let zs = fixed_points(&j, e).unwrap();
        for (base, z) in zs.iter().enumerate() {
            let phi = crate::sl2core::monodromy(&j, e, base).unwrap();
            assert!(phi.mobius(*z).dist(z) < 1e-10);
            assert!(z.im > 0.0);
        }
    }
}
