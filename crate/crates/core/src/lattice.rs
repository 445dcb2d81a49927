//! Separable weighted Laplacians on `Z^d`.

use serde::{Deserialize, Serialize};

use crate::eigen::dense_symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::intervals::{minkowski_sum, IntervalUnion};
use crate::scalar::Real;

/// Edge weights `w(n, n + e_j) = a_{n_j}` built from one periodic sequence,
/// indexed from 0 along every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SeparableWeights<T> {
    base: Vec<T>,
    dim: usize,
}

impl<T: Real> SeparableWeights<T> {
    pub fn new(base: Vec<T>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("lattice dimension must be at least 1".into()));
        }
        if base.is_empty() {
            return Err(Error::Domain("weight sequence is empty".into()));
        }
        if let Some((i, x)) = base
            .iter()
            .enumerate()
            .find(|(_, x)| !(x.is_finite() && **x > T::zero()))
        {
            return Err(Error::Domain(format!("weight a_{i} = {x} is not positive")));
        }
        Ok(Self { base, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> usize {
        self.base.len()
    }

    fn a(&self, k: i64) -> T {
        self.base[k.rem_euclid(self.base.len() as i64) as usize]
    }

    /// `M = max(|a|_inf, |1/a|_inf)`, so that `1/M <= w <= M`.
    pub fn bound(&self) -> T {
        self.base
            .iter()
            .fold(T::zero(), |m, &x| m.max(x).max(x.recip()))
    }

    /// Weight of the edge between neighbouring lattice points.
    pub fn weight(&self, n: &[i64], m: &[i64]) -> Result<T> {
        if n.len() != self.dim || m.len() != self.dim {
            return Err(Error::Domain(format!(
                "lattice points must have {} coordinates",
                self.dim
            )));
        }
        let mut axis = None;
        for (j, (&x, &y)) in n.iter().zip(m).enumerate() {
            match (x - y).abs() {
                0 => {}
                1 if axis.is_none() => axis = Some(j),
                _ => {
                    return Err(Error::Domain(format!(
                        "points {n:?} and {m:?} are not nearest neighbours"
                    )))
                }
            }
        }
        let j = axis.ok_or_else(|| Error::Domain("a point is not its own neighbour".into()))?;
        Ok(self.a(n[j].min(m[j])))
    }
}

/// Free-function form of [`SeparableWeights::weight`].
pub fn weight_lookup<T: Real>(w: &SeparableWeights<T>, n: &[i64], m: &[i64]) -> Result<T> {
    w.weight(n, m)
}

/// `sigma(L_w)`: the `d`-fold Minkowski sum of the one-dimensional spectrum.
pub fn laplacian_spectrum<T: Real>(
    w: &SeparableWeights<T>,
    spectrum_1d: &IntervalUnion<T>,
) -> Result<IntervalUnion<T>> {
    dfold_sum(spectrum_1d, w.dim)
}

/// `X + X + ... + X` (`d` terms).
pub fn dfold_sum<T: Real>(x: &IntervalUnion<T>, d: usize) -> Result<IntervalUnion<T>> {
    if d == 0 {
        return Err(Error::Domain("lattice dimension must be at least 1".into()));
    }
    if x.is_empty() {
        return Err(Error::Domain("one-dimensional spectrum is empty".into()));
    }
    let mut acc = x.clone();
    for _ in 1..d {
        acc = minkowski_sum(&acc, x);
    }
    Ok(acc)
}

/// Nonzero entries `(row, col, value)` of `L_w` on the discrete torus of side
/// `side` (a multiple of the period), sites numbered lexicographically.
pub fn torus_entries<T: Real>(
    w: &SeparableWeights<T>,
    side: usize,
) -> Result<Vec<(usize, usize, T)>> {
    if side < 3 || side % w.period() != 0 {
        return Err(Error::Domain(format!(
            "torus side {side} must be at least 3 and a multiple of the period {}",
            w.period()
        )));
    }
    let sites = side
        .checked_pow(w.dim as u32)
        .ok_or_else(|| Error::Domain("torus too large".into()))?;
    let mut out = Vec::with_capacity(2 * w.dim * sites);
    let mut coord = vec![0usize; w.dim];
    for site in 0..sites {
        let mut r = site;
        for c in coord.iter_mut().rev() {
            *c = r % side;
            r /= side;
        }
        let mut stride = 1;
        for j in (0..w.dim).rev() {
            let x = coord[j];
            let up = if x + 1 == side {
                site - x * stride
            } else {
                site + stride
            };
            let v = w.a(x as i64);
            out.push((site, up, v));
            out.push((up, site, v));
            stride *= side;
        }
    }
    out.sort_by_key(|&(r, c, _)| (r, c));
    Ok(out)
}

/// Eigenvalues of `L_w` on the torus of side `side`.
pub fn torus_eigenvalues<T: Real>(w: &SeparableWeights<T>, side: usize) -> Result<Vec<T>> {
    let entries = torus_entries(w, side)?;
    let n = side.pow(w.dim as u32);
    let mut dense = vec![T::zero(); n * n];
    for (r, c, v) in entries {
        dense[r * n + c] = dense[r * n + c] + v;
    }
    dense_symmetric_eigenvalues(n, &dense)
}
