//! Finite unions of disjoint closed intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default absolute tolerance below which neighbouring components merge.
pub const MERGE_TOL: f64 = 1e-12;

/// Canonical finite union of closed intervals: sorted, pairwise disjoint,
/// separated by gaps wider than the merge tolerance. Degenerate intervals
/// (points) are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct IntervalUnion<T> {
    components: Vec<(T, T)>,
}

impl<T: Real> Default for IntervalUnion<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Real> IntervalUnion<T> {
    pub fn empty() -> Self {
        Self {
            components: Vec::new(),
        }
    }

    pub fn interval(lo: T, hi: T) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn point(x: T) -> Self {
        Self {
            components: vec![(x, x)],
        }
    }

    /// Canonicalizes arbitrary closed intervals with the default tolerance.
    pub fn new(components: Vec<(T, T)>) -> Result<Self> {
        Self::with_tolerance(components, T::lit(MERGE_TOL))
    }

    /// Canonicalizes, merging components whose separation is at most `tol`.
    pub fn with_tolerance(mut components: Vec<(T, T)>, tol: T) -> Result<Self> {
        for &(lo, hi) in &components {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Domain(format!(
                    "interval [{lo}, {hi}] is not finite"
                )));
            }
            if lo > hi {
                return Err(Error::Domain(format!("interval [{lo}, {hi}] has lo > hi")));
            }
        }
        components.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite endpoints"));
        let mut out: Vec<(T, T)> = Vec::with_capacity(components.len());
        for (lo, hi) in components {
            match out.last_mut() {
                Some(last) if lo - last.1 <= tol => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        Ok(Self { components: out })
    }

    pub fn components(&self) -> &[(T, T)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn min(&self) -> Option<T> {
        self.components.first().map(|c| c.0)
    }

    pub fn max(&self) -> Option<T> {
        self.components.last().map(|c| c.1)
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> T {
        self.components.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    /// Distance from `x` to the set; infinite for the empty set.
    pub fn distance_to(&self, x: T) -> T {
        let i = self.components.partition_point(|c| c.1 < x);
        let mut d = T::infinity();
        if let Some(&(lo, _)) = self.components.get(i) {
            d = d.min((lo - x).max(T::zero()));
        }
        if i > 0 {
            d = d.min(x - self.components[i - 1].1);
        }
        d
    }

    pub fn contains(&self, x: T) -> bool {
        self.distance_to(x) == T::zero()
    }

    /// Intersection of two unions.
    pub fn intersection(&self, other: &Self) -> Self {
        let (x, y) = (&self.components, &other.components);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < x.len() && j < y.len() {
            let lo = x[i].0.max(y[j].0);
            let hi = x[i].1.min(y[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if x[i].1 < y[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { components: out }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.components.clone();
        all.extend_from_slice(&other.components);
        Self::new(all).expect("components of canonical unions are valid")
    }

    /// Image under `x -> lambda x` for `lambda > 0`.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::Domain(format!(
                "scale factor must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            components: self
                .components
                .iter()
                .map(|&(lo, hi)| (lo * lambda, hi * lambda))
                .collect(),
        })
    }

    pub fn translated(&self, t: T) -> Self {
        Self::new(
            self.components
                .iter()
                .map(|&(lo, hi)| (lo + t, hi + t))
                .collect(),
        )
        .expect("translation keeps endpoints finite")
    }

    /// Closed `eps`-neighborhood.
    pub fn epsilon_neighborhood(&self, eps: T) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::Domain(format!(
                "neighborhood radius must be positive, got {eps}"
            )));
        }
        Self::new(
            self.components
                .iter()
                .map(|&(lo, hi)| (lo - eps, hi + eps))
                .collect(),
        )
    }

    /// `sup_{x in self} dist(x, other)`.
    fn directed_distance(&self, other: &Self) -> T {
        let mut best = T::zero();
        for &(lo, hi) in &self.components {
            best = best.max(other.distance_to(lo)).max(other.distance_to(hi));
        }
        // Interior maxima sit at midpoints of the other set's gaps.
        let two = T::lit(2.0);
        for w in other.components.windows(2) {
            let mid = (w[0].1 + w[1].0) / two;
            if self.contains(mid) {
                best = best.max(mid - w[0].1);
            }
        }
        best
    }

    /// Number of grid boxes `[k eps, (k + 1) eps)` meeting the set.
    pub fn cover_count(&self, eps: T) -> Result<usize> {
        if !(eps > T::zero()) {
            return Err(Error::Domain(format!(
                "box size must be positive, got {eps}"
            )));
        }
        if self.is_empty() {
            return Err(Error::Domain("cannot cover the empty set".into()));
        }
        let mut count: u128 = 0;
        let mut last: Option<i128> = None;
        for &(lo, hi) in &self.components {
            let k_lo = box_index(lo, eps)?;
            let k_hi = box_index(hi, eps)?;
            let start = match last {
                Some(l) if l >= k_lo => l + 1,
                _ => k_lo,
            };
            if k_hi >= start {
                count += (k_hi - start + 1) as u128;
            }
            last = Some(last.map_or(k_hi, |l| l.max(k_hi)));
        }
        usize::try_from(count).map_err(|_| Error::Domain("cover count overflows".into()))
    }
}

fn box_index<T: Real>(x: T, eps: T) -> Result<i128> {
    (x / eps)
        .floor()
        .to_i128()
        .ok_or_else(|| Error::Domain(format!("box index of {x} at scale {eps} is out of range")))
}

/// Hausdorff distance between two nonempty unions.
pub fn hausdorff_distance<T: Real>(x: &IntervalUnion<T>, y: &IntervalUnion<T>) -> Result<T> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Domain(
            "Hausdorff distance needs nonempty sets".into(),
        ));
    }
    Ok(x.directed_distance(y).max(y.directed_distance(x)))
}

/// Minkowski sum `{x + y}`.
pub fn minkowski_sum<T: Real>(x: &IntervalUnion<T>, y: &IntervalUnion<T>) -> IntervalUnion<T> {
    let mut parts = Vec::with_capacity(x.len() * y.len());
    for &(a, b) in x.components() {
        for &(c, d) in y.components() {
            parts.push((a + c, b + d));
        }
    }
    IntervalUnion::new(parts).expect("sums of finite endpoints are finite")
}

/// Measure of a set (free-function form).
pub fn measure<T: Real>(x: &IntervalUnion<T>) -> T {
    x.measure()
}

/// Ratios `log N_n / log(1 / eps_n)` for a sequence of covers.
pub fn box_dim_ratios<T: Real>(covers: &[(usize, T)]) -> Result<Vec<T>> {
    if covers.len() < 2 {
        return Err(Error::Domain(format!(
            "box-dimension estimate needs at least 2 scales, got {}",
            covers.len()
        )));
    }
    covers
        .iter()
        .map(|&(n, eps)| {
            if !(eps > T::zero() && eps < T::one()) {
                return Err(Error::Domain(format!("cover scale {eps} outside (0, 1)")));
            }
            if n == 0 {
                return Err(Error::Domain("cover count must be positive".into()));
            }
            Ok(T::count(n).ln() / (-eps.ln()))
        })
        .collect()
}

/// Same ratios with scales given as `log(1 / eps_n)`, for covers too fine
/// to represent directly.
pub fn box_dim_ratios_log<T: Real>(covers: &[(usize, T)]) -> Result<Vec<T>> {
    if covers.len() < 2 {
        return Err(Error::Domain(format!(
            "box-dimension estimate needs at least 2 scales, got {}",
            covers.len()
        )));
    }
    covers
        .iter()
        .map(|&(n, log_inv)| {
            if !(log_inv > T::zero()) {
                return Err(Error::Domain(format!(
                    "log(1/eps) = {log_inv} must be positive"
                )));
            }
            if n == 0 {
                return Err(Error::Domain("cover count must be positive".into()));
            }
            Ok(T::count(n).ln() / log_inv)
        })
        .collect()
}

/// Lower box-counting estimate `min_n log N_n / log(1 / eps_n)`.
pub fn box_dim_estimate<T: Real>(covers: &[(usize, T)]) -> Result<T> {
    Ok(box_dim_ratios(covers)?
        .into_iter()
        .fold(T::infinity(), T::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(parts: &[(f64, f64)]) -> IntervalUnion<f64> {
        IntervalUnion::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn canonical_form_merges_touching_components() {
        let x = u(&[(1.0, 3.0), (-3.0, -1.0), (0.0, 0.0), (3.0, 4.0)]);
        assert_eq!(x.components(), &[(-3.0, -1.0), (0.0, 0.0), (1.0, 4.0)]);
        assert!(IntervalUnion::new(vec![(1.0, 0.0)]).is_err());
        assert!(IntervalUnion::new(vec![(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn measures() {
        assert_eq!(u(&[(-2.0, 2.0)]).measure(), 4.0);
        assert_eq!(u(&[(-3.0, -1.0), (1.0, 3.0)]).measure(), 4.0);
        assert_eq!(IntervalUnion::<f64>::empty().measure(), 0.0);
    }

    #[test]
    fn hausdorff_examples() {
        let h = |x: &[(f64, f64)], y: &[(f64, f64)]| hausdorff_distance(&u(x), &u(y)).unwrap();
        assert_eq!(h(&[(0.0, 1.0)], &[(0.0, 1.0)]), 0.0);
        assert_eq!(h(&[(-2.0, 2.0)], &[(-1.0, 1.0)]), 1.0);
        assert_eq!(h(&[(0.0, 1.0), (3.0, 4.0)], &[(0.0, 1.0)]), 3.0);
        // gap midpoint of the second set is the farthest point of the first
        assert_eq!(h(&[(0.0, 10.0)], &[(0.0, 1.0), (9.0, 10.0)]), 4.0);
        assert!(hausdorff_distance(&u(&[(0.0, 1.0)]), &IntervalUnion::empty()).is_err());
    }

    #[test]
    fn minkowski_examples() {
        let x = u(&[(-3.0, -1.0), (1.0, 3.0)]);
        assert_eq!(minkowski_sum(&x, &x).components(), &[(-6.0, 6.0)]);
        let f = u(&[(-2.0, 2.0)]);
        assert_eq!(minkowski_sum(&f, &f).components(), &[(-4.0, 4.0)]);
        assert_eq!(minkowski_sum(&x, &IntervalUnion::point(0.0)), x);
    }

    #[test]
    fn neighborhoods() {
        let n = u(&[(0.0, 1.0)]).epsilon_neighborhood(0.5).unwrap();
        assert_eq!(n.components(), &[(-0.5, 1.5)]);
        let n = u(&[(0.0, 1.0), (1.5, 2.0)])
            .epsilon_neighborhood(0.3)
            .unwrap();
        assert_eq!(n.components(), &[(-0.3, 2.3)]);
        let x = u(&[(0.0, 1.0), (5.0, 6.0), (10.0, 10.0)]);
        let n = x.epsilon_neighborhood(0.25).unwrap();
        assert!((n.measure() - x.measure() - 2.0 * 3.0 * 0.25).abs() < 1e-12);
        assert!(x.epsilon_neighborhood(0.0).is_err());
    }

    #[test]
    fn cover_counts() {
        let c = u(&[(0.0, 1.0)]).cover_count(0.1).unwrap();
        assert!((10..=11).contains(&c));
        assert_eq!(IntervalUnion::point(0.37).cover_count(1e-3).unwrap(), 1);
        let c = u(&[(-3.0, -1.0), (1.0, 3.0)]).cover_count(0.5).unwrap();
        assert!((8..=10).contains(&c), "{c}");
        // components sharing a box are not double counted
        assert_eq!(u(&[(0.0, 0.1), (0.2, 0.3)]).cover_count(1.0).unwrap(), 1);
        assert!(IntervalUnion::<f64>::empty().cover_count(0.1).is_err());
    }

    #[test]
    fn box_dimension_examples() {
        let d = box_dim_estimate(&[
            (10_000, 2.0 * (-100f64).exp()),
            (20_000, 2.0 * (-200f64).exp()),
        ])
        .unwrap();
        let first = 10_000f64.ln() / (100.0 - 2f64.ln());
        assert!((first - 0.09274).abs() < 1e-5);
        assert!(d <= first);
        let line = box_dim_ratios::<f64>(&[(10, 0.1), (1000, 0.001)]).unwrap();
        assert!(line.iter().all(|r| (r - 1.0).abs() < 1e-12));
        assert!(box_dim_estimate(&[(10, 0.1)]).is_err());
        assert!(box_dim_estimate(&[(10, 0.1), (10, 1.5)]).is_err());
    }

    #[test]
    fn box_ratios_decrease_for_chain_like_covers() {
        // eps_n = 2 exp(-sqrt(p_n)) underflows at p = 10^6, so pass log(1/eps).
        let covers: Vec<(usize, f64)> = [100usize, 10_000, 1_000_000]
            .iter()
            .map(|&p| (p, (p as f64).sqrt() - 2f64.ln()))
            .collect();
        let r = box_dim_ratios_log(&covers).unwrap();
        assert!(r[0] > r[1] && r[1] > r[2]);
    }
}
