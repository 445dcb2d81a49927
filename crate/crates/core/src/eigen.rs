//! Symmetric eigenvalue solvers.
//!
//! The periodic and antiperiodic truncations of a Jacobi matrix are
//! tridiagonal plus two corner entries. Interleaving the indices from both
//! ends (`0, p-1, 1, p-2, ...`) turns them into pentadiagonal matrices, which
//! Givens bulge chasing reduces to tridiagonal form in `O(p^2)`. Eigenvalues
//! of the tridiagonal matrix come from implicit QL with Wilkinson shifts.
//! A cyclic Jacobi rotation solver handles small dense matrices.

use crate::error::{Error, Result};
use crate::scalar::Real;

const QL_MAX_SWEEPS: usize = 60;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (`off.len() + 1 == diag.len()`).
pub fn tridiagonal_eigenvalues<T: Real>(diag: &[T], off: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::Domain(format!(
            "tridiagonal matrix of order {n} needs {} off-diagonal entries, got {}",
            n - 1,
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(T::zero());
    implicit_ql(&mut d, &mut e)?;
    sort(&mut d);
    Ok(d)
}

/// Eigenvalues (ascending) of the `p x p` truncation of `J_{a,b}` whose corner
/// entries are `sign * a_p`. `sign = 1` yields the roots of `D - 2`, `sign = -1`
/// the roots of `D + 2`.
pub fn periodic_eigenvalues<T: Real>(a: &[T], b: &[T], sign: T) -> Result<Vec<T>> {
    let p = a.len();
    assert_eq!(p, b.len(), "coefficient lengths differ");
    match p {
        0 => Ok(Vec::new()),
        1 => Ok(vec![b[0] + T::lit(2.0) * sign * a[0]]),
        2 => {
            let off = a[0] + sign * a[1];
            let mean = (b[0] + b[1]) / T::lit(2.0);
            let half = (b[0] - b[1]) / T::lit(2.0);
            let r = half.hypot(off);
            Ok(vec![mean - r, mean + r])
        }
        _ => {
            let mut band = fold_ring(a, b, sign);
            let (mut d, mut e) = band.tridiagonalize();
            implicit_ql(&mut d, &mut e).map_err(|err| match err {
                Error::NoConvergence { iterations, .. } => Error::NoConvergence {
                    period: p,
                    iterations,
                },
                other => other,
            })?;
            sort(&mut d);
            Ok(d)
        }
    }
}

/// Eigenvalues (ascending) of a dense symmetric matrix stored row-major, by
/// the cyclic Jacobi rotation method.
pub fn dense_symmetric_eigenvalues<T: Real>(n: usize, entries: &[T]) -> Result<Vec<T>> {
    if entries.len() != n * n {
        return Err(Error::Domain(format!(
            "expected {} entries for order {n}, got {}",
            n * n,
            entries.len()
        )));
    }
    let mut m = entries.to_vec();
    let at = |i: usize, j: usize| i * n + j;
    for i in 0..n {
        for j in 0..i {
            let tol = T::tol(1e-12) * (T::one() + m[at(i, j)].abs());
            if (m[at(i, j)] - m[at(j, i)]).abs() > tol {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let total = |m: &[T]| m.iter().map(|&x| x * x).sum::<T>();
    let scale = total(&m).sqrt();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..i {
                off = off + m[at(i, j)] * m[at(i, j)];
            }
        }
        if off.sqrt() <= T::epsilon() * scale * T::count(n) || off == T::zero() {
            let mut d: Vec<T> = (0..n).map(|i| m[at(i, i)]).collect();
            sort(&mut d);
            return Ok(d);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[at(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[at(q, q)] - m[at(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[at(k, p)];
                    let mkq = m[at(k, q)];
                    m[at(k, p)] = c * mkp - s * mkq;
                    m[at(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[at(p, k)];
                    let mqk = m[at(q, k)];
                    m[at(p, k)] = c * mpk - s * mqk;
                    m[at(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    Err(Error::NoConvergence {
        period: n,
        iterations: JACOBI_MAX_SWEEPS,
    })
}

fn sort<T: Real>(v: &mut [T]) {
    v.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
}

/// Symmetric matrix with lower bandwidth at most 3, stored by diagonals:
/// `w[k][i] = A[i + k][i]`.
struct Band<T> {
    n: usize,
    w: [Vec<T>; 4],
}

impl<T: Real> Band<T> {
    fn new(n: usize) -> Self {
        Self {
            n,
            w: std::array::from_fn(|_| vec![T::zero(); n]),
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> T {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > 3 {
            T::zero()
        } else {
            self.w[k][lo]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: T) {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k <= 3 {
            self.w[k][lo] = v;
        }
    }

    /// Similarity by the rotation acting on rows and columns `i, i + 1`,
    /// touching columns `lo..hi` outside the rotated pair.
    fn rotate(&mut self, i: usize, c: T, s: T, lo: usize, hi: usize) {
        let j1 = i + 1;
        for r in lo..hi.min(self.n) {
            if r == i || r == j1 {
                continue;
            }
            let x = self.get(i, r);
            let y = self.get(j1, r);
            self.set(i, r, c * x + s * y);
            self.set(j1, r, c * y - s * x);
        }
        let a = self.get(i, i);
        let b = self.get(i, j1);
        let d = self.get(j1, j1);
        let two = T::lit(2.0);
        self.set(i, i, c * c * a + two * c * s * b + s * s * d);
        self.set(j1, j1, s * s * a - two * c * s * b + c * c * d);
        self.set(i, j1, c * s * (d - a) + (c * c - s * s) * b);
    }

    /// Rotation in plane `(t - 1, t)` that zeroes `A[t][col]`.
    fn annihilate(&mut self, t: usize, col: usize) -> bool {
        let y = self.get(t, col);
        if y == T::zero() {
            return false;
        }
        let x = self.get(t - 1, col);
        let h = x.hypot(y);
        let (c, s) = (x / h, y / h);
        self.rotate(t - 1, c, s, t.saturating_sub(3), t + 3);
        self.set(t, col, T::zero());
        true
    }

    /// Reduces a pentadiagonal matrix to tridiagonal form; returns the
    /// diagonal and the off-diagonal padded with a trailing zero.
    fn tridiagonalize(&mut self) -> (Vec<T>, Vec<T>) {
        let n = self.n;
        for k in 0..n.saturating_sub(2) {
            let mut t = k + 2;
            let mut col = k;
            loop {
                if !self.annihilate(t, col) {
                    break;
                }
                // The rotation in plane (t-1, t) spills into A[t+2][t-1].
                if t + 2 >= n {
                    break;
                }
                col = t - 1;
                t += 2;
                if self.get(t, col) == T::zero() {
                    break;
                }
            }
        }
        let d = self.w[0].clone();
        let mut e = self.w[1].clone();
        e[n - 1] = T::zero();
        (d, e)
    }
}

/// Interleaves the ring `0, p-1, 1, p-2, ...` so that periodic couplings fall
/// within bandwidth two.
fn fold_ring<T: Real>(a: &[T], b: &[T], sign: T) -> Band<T> {
    let p = a.len();
    let mut pos = vec![0usize; p];
    for (new, slot) in (0..p).map(|new| (new, fold_index(new, p))) {
        pos[slot] = new;
    }
    let mut band = Band::new(p);
    for k in 0..p {
        band.set(pos[k], pos[k], b[k]);
    }
    for k in 0..p - 1 {
        band.set(pos[k], pos[k + 1], a[k]);
    }
    band.set(pos[p - 1], pos[0], sign * a[p - 1]);
    band
}

#[inline]
fn fold_index(new: usize, p: usize) -> usize {
    if new % 2 == 0 {
        new / 2
    } else {
        p - 1 - new / 2
    }
}

/// Implicit QL on a symmetric tridiagonal matrix; `e[i] = A[i][i+1]` with
/// `e[n-1] = 0`. Eigenvalues overwrite `d` in no particular order.
fn implicit_ql<T: Real>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    period: n,
                    iterations: iter,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_ring(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
        let p = a.len();
        let mut m = vec![0.0; p * p];
        for k in 0..p {
            m[k * p + k] += b[k];
            let j = (k + 1) % p;
            let w = if k == p - 1 { sign * a[k] } else { a[k] };
            m[k * p + j] += w;
            m[j * p + k] += w;
        }
        m
    }

    fn max_diff(x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), y.len());
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn free_dirichlet_chain() {
        let n = 30;
        let ev = tridiagonal_eigenvalues(&vec![0.0; n], &vec![1.0; n - 1]).unwrap();
        let mut exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
            .collect();
        exact.sort_by(f64::total_cmp);
        assert!(max_diff(&ev, &exact) < 1e-13);
    }

    #[test]
    fn free_ring_periodic_and_antiperiodic() {
        let p = 17;
        let a = vec![1.0; p];
        let b = vec![0.0; p];
        for (sign, shift) in [(1.0, 0.0), (-1.0, 0.5)] {
            let ev = periodic_eigenvalues(&a, &b, sign).unwrap();
            let mut exact: Vec<f64> = (0..p)
                .map(|k| 2.0 * (2.0 * std::f64::consts::PI * (k as f64 + shift) / p as f64).cos())
                .collect();
            exact.sort_by(f64::total_cmp);
            assert!(max_diff(&ev, &exact) < 1e-13, "sign {sign}");
        }
    }

    #[test]
    fn small_periods_closed_form() {
        assert_eq!(
            periodic_eigenvalues(&[1.5], &[0.25], 1.0).unwrap(),
            vec![3.25]
        );
        assert_eq!(
            periodic_eigenvalues(&[1.5], &[0.25], -1.0).unwrap(),
            vec![-2.75]
        );
        let ev = periodic_eigenvalues(&[1.0, 2.0], &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(ev, vec![-3.0, 3.0]);
        let ev = periodic_eigenvalues(&[1.0, 2.0], &[0.0, 0.0], -1.0).unwrap();
        assert_eq!(ev, vec![-1.0, 1.0]);
    }

    #[test]
    fn banded_reduction_matches_dense_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in 3..40 {
            let a: Vec<f64> = (0..p).map(|_| rng.gen_range(0.2..3.0)).collect();
            let b: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
            for sign in [1.0, -1.0] {
                let fast = periodic_eigenvalues(&a, &b, sign).unwrap();
                let slow = dense_symmetric_eigenvalues(p, &dense_ring(&a, &b, sign)).unwrap();
                assert!(max_diff(&fast, &slow) < 1e-11, "p = {p}");
            }
        }
    }

    #[test]
    fn repeated_eigenvalues_are_resolved() {
        let a = vec![1.0f64; 64];
        let b = vec![0.0; 64];
        let ev = periodic_eigenvalues(&a, &b, 1.0).unwrap();
        // 2 cos(2 pi k / 64) has multiplicity two except at k = 0, 32.
        assert!((ev[0] + 2.0).abs() < 1e-13);
        assert!((ev[63] - 2.0).abs() < 1e-13);
        assert!((ev[1] - ev[2]).abs() < 1e-12);
    }

    #[test]
    fn single_precision_ring() {
        let a = vec![1.0f32; 9];
        let b = vec![0.0f32; 9];
        let ev = periodic_eigenvalues(&a, &b, 1.0).unwrap();
        assert!((ev[8] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn dense_rejects_asymmetric_input() {
        assert!(dense_symmetric_eigenvalues(2, &[0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(dense_symmetric_eigenvalues(2, &[0.0, 1.0, 2.0]).is_err());
    }
}
