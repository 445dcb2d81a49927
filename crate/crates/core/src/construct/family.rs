//! Finite families of perturbations whose spectra have empty intersection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intervals::IntervalUnion;
use crate::jacobi::PeriodicJacobi;
use crate::spectrum::{band_structure, lambda0_of, BandStructure};

/// Upper limit on family sizes.
pub const MAX_MEMBERS: usize = 4097;
const GREEDY_MAX_MEMBERS: usize = 64;
const GREEDY_GRID: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `Lambda^{k/K} a''` for `k = -K..=K`.
    Uniform,
    /// Scale factors picked one at a time to shrink the running intersection.
    Greedy,
    /// Diagonal shifts `b + k h`.
    Shift,
    /// Diagonal shifts picked one at a time to shrink the running intersection.
    GreedyShift,
}

/// Family members sharing one base period, with empty spectral intersection.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFamily {
    pub kind: FamilyKind,
    pub members: Vec<PeriodicJacobi<f64>>,
    /// Scale factors (scaling kinds) or diagonal shifts.
    pub parameters: Vec<f64>,
    /// `Lambda` for the uniform kind.
    pub lambda: Option<f64>,
    /// `K` for the uniform kind.
    pub k: Option<usize>,
    pub base_period: usize,
    /// Largest sup-distance of a member from the base sequence.
    pub max_distance: f64,
    #[serde(skip)]
    pub spectra: Vec<IntervalUnion<f64>>,
}

impl ScalingFamily {
    pub fn ell(&self) -> usize {
        self.members.len()
    }

    /// Intersection of all member spectra.
    pub fn intersection(&self) -> IntervalUnion<f64> {
        intersect_all(&self.spectra)
    }
}

pub fn intersect_all(spectra: &[IntervalUnion<f64>]) -> IntervalUnion<f64> {
    let mut it = spectra.iter();
    let Some(first) = it.next() else {
        return IntervalUnion::empty();
    };
    it.fold(first.clone(), |acc, s| acc.intersection(s))
}

fn require_thin_ready(j: &PeriodicJacobi<f64>) -> Result<BandStructure<f64>> {
    let bs = band_structure(j)?;
    if lambda0_of(&bs) == 0.0 {
        return Err(Error::Precondition(
            "0 lies in the spectrum of the base sequence".into(),
        ));
    }
    if !bs.all_gaps_open() {
        return Err(Error::Precondition(format!(
            "{} gaps of the base sequence are closed",
            bs.closed_gap_count()
        )));
    }
    Ok(bs)
}

fn scaled_members(
    base: &PeriodicJacobi<f64>,
    spectrum: &IntervalUnion<f64>,
    factors: &[f64],
) -> Result<(Vec<PeriodicJacobi<f64>>, Vec<IntervalUnion<f64>>, f64)> {
    let mut members = Vec::with_capacity(factors.len());
    let mut spectra = Vec::with_capacity(factors.len());
    let mut dist = 0.0f64;
    for &c in factors {
        let m = base.scaled(c)?;
        dist = dist.max(base.sup_distance(&m));
        members.push(m);
        spectra.push(spectrum.scaled(c)?);
    }
    Ok((members, spectra, dist))
}

/// The uniform family `a^{(k)} = Lambda^{k/K} a''`, `|k| <= K`, where
/// `Lambda = max E_n^+ / E_n^-` over the positive bands and `K` is minimal
/// with `Lambda^{1/K} < min E_{n+1}^- / E_n^+`.
pub fn scaling_family(a2: &PeriodicJacobi<f64>, eps: f64) -> Result<ScalingFamily> {
    if !a2.is_off_diagonal() {
        return Err(Error::Precondition("scaling families need b = 0".into()));
    }
    let bs = require_thin_ready(a2)?;
    let pos: Vec<(f64, f64)> = bs.bands.iter().cloned().filter(|b| b.0 > 0.0).collect();
    let lambda = pos.iter().map(|&(l, h)| h / l).fold(1.0, f64::max);
    let k = if pos.len() < 2 {
        1
    } else {
        let ratio = pos
            .windows(2)
            .map(|w| w[1].0 / w[0].1)
            .fold(f64::INFINITY, f64::min);
        (lambda.ln() / ratio.ln()).floor() as usize + 1
    };
    if 2 * k + 1 > MAX_MEMBERS {
        return Err(Error::Precondition(format!(
            "uniform family needs K = {k}, more than {MAX_MEMBERS} members"
        )));
    }
    let factors: Vec<f64> = (-(k as i64)..=k as i64)
        .map(|i| lambda.powf(i as f64 / k as f64))
        .collect();
    let spectrum = bs.spectrum();
    let (members, spectra, max_distance) = scaled_members(a2, &spectrum, &factors)?;
    if !(max_distance < eps / 3.0) {
        return Err(Error::Precondition(format!(
            "Lambda = {lambda} moves coefficients by {max_distance}, beyond eps/3 = {}",
            eps / 3.0
        )));
    }
    let fam = ScalingFamily {
        kind: FamilyKind::Uniform,
        members,
        parameters: factors,
        lambda: Some(lambda),
        k: Some(k),
        base_period: a2.period(),
        max_distance,
        spectra,
    };
    if !fam.intersection().is_empty() {
        return Err(Error::Consistency(format!(
            "uniform family with Lambda = {lambda}, K = {k} has nonempty spectral intersection"
        )));
    }
    Ok(fam)
}

/// Scale factors from a log-spaced grid in `[1 - r, 1 + r]`, `r` just under
/// `eps / (3 |a''|_inf)`, added greedily to empty the running intersection
/// as fast as possible.
pub fn greedy_scaling_family(a2: &PeriodicJacobi<f64>, eps: f64) -> Result<ScalingFamily> {
    if !a2.is_off_diagonal() {
        return Err(Error::Precondition("scaling families need b = 0".into()));
    }
    let bs = require_thin_ready(a2)?;
    let spectrum = bs.spectrum();
    let r = (eps / 3.0 / a2.sup_a() * 0.999).min(0.5);
    let (lo, hi) = ((1.0 - r).ln(), (1.0 + r).ln());
    let grid: Vec<f64> = (0..GREEDY_GRID)
        .map(|i| (lo + (hi - lo) * i as f64 / (GREEDY_GRID - 1) as f64).exp())
        .collect();
    let mut factors = vec![1.0];
    let mut inter = spectrum.clone();
    while !inter.is_empty() {
        if factors.len() >= GREEDY_MAX_MEMBERS {
            return Err(Error::Precondition(format!(
                "greedy family did not close within {GREEDY_MAX_MEMBERS} members"
            )));
        }
        let mut best: Option<((bool, f64, usize), f64, IntervalUnion<f64>)> = None;
        for &c in &grid {
            let cut = inter.intersection(&spectrum.scaled(c)?);
            let score = (!cut.is_empty(), cut.measure(), cut.len());
            if best.as_ref().map_or(true, |b| lex_less(score, b.0)) {
                best = Some((score, c, cut));
            }
        }
        let (score, c, cut) = best.expect("grid is nonempty");
        if score.0 && score.1 >= inter.measure() && score.2 >= inter.len() {
            return Err(Error::Precondition(
                "scaling within the eps/3 budget cannot shrink the intersection".into(),
            ));
        }
        factors.push(c);
        inter = cut;
    }
    let (members, spectra, max_distance) = scaled_members(a2, &spectrum, &factors)?;
    Ok(ScalingFamily {
        kind: FamilyKind::Greedy,
        members,
        parameters: factors,
        lambda: None,
        k: None,
        base_period: a2.period(),
        max_distance,
        spectra,
    })
}

fn lex_less(x: (bool, f64, usize), y: (bool, f64, usize)) -> bool {
    (x.0, x.1, x.2)
        .partial_cmp(&(y.0, y.1, y.2))
        .map_or(false, |o| o.is_lt())
}

/// Diagonal shifts `b + k h`, `k = 0..l`, with
/// `h = min(smallest gap, largest band) / 2` and `l = floor(max band / h) + 2`.
pub fn shift_family(j: &PeriodicJacobi<f64>, eps: f64) -> Result<ScalingFamily> {
    let bs = band_structure(j)?;
    if !bs.all_gaps_open() {
        return Err(Error::Precondition(format!(
            "{} gaps are closed",
            bs.closed_gap_count()
        )));
    }
    let max_band = bs.max_band_length();
    let h = bs.min_open_gap_length().unwrap_or(max_band).min(max_band) / 2.0;
    if !(h > 0.0) {
        return Err(Error::Precondition("degenerate band structure".into()));
    }
    let spectrum = bs.spectrum();
    // Start from ceil(w / h) + 1 members and add one while the intersection
    // stays nonempty (the top edge of the widest band needs a shift > w).
    let mut ell = (max_band / h).ceil() as usize + 1;
    loop {
        if ell > MAX_MEMBERS {
            return Err(Error::Precondition(format!(
                "shift family needs {ell} members, more than {MAX_MEMBERS}"
            )));
        }
        let max_shift = (ell - 1) as f64 * h;
        if !(max_shift < eps / 3.0) {
            return Err(Error::Precondition(format!(
                "shift family spans {max_shift}, beyond eps/3 = {}",
                eps / 3.0
            )));
        }
        let shifts: Vec<f64> = (0..ell).map(|k| k as f64 * h).collect();
        let spectra: Vec<_> = shifts.iter().map(|&t| spectrum.translated(t)).collect();
        if intersect_all(&spectra).is_empty() {
            let members: Vec<_> = shifts.iter().map(|&t| j.shifted(t)).collect();
            let max_distance = members
                .iter()
                .map(|m| j.sup_distance(m))
                .fold(0.0, f64::max);
            return Ok(ScalingFamily {
                kind: FamilyKind::Shift,
                members,
                parameters: shifts,
                lambda: None,
                k: None,
                base_period: j.period(),
                max_distance,
                spectra,
            });
        }
        ell += 1;
    }
}

/// Shift offsets in `(0, t_max)` where an endpoint of `inter` meets an
/// endpoint of `spectrum + t`, reduced to midpoints of consecutive values
/// (the overlap measure is linear between them). Empty when too many.
fn shift_breakpoints(inter: &IntervalUnion<f64>, spectrum: &IntervalUnion<f64>, t_max: f64) -> Vec<f64> {
    const MAX_BREAKPOINTS: usize = 50_000;
    let ends = |u: &IntervalUnion<f64>| -> Vec<f64> {
        u.components().iter().flat_map(|&(l, h)| [l, h]).collect()
    };
    let s_ends = ends(spectrum);
    let mut raw = Vec::new();
    for x in ends(inter) {
        let from = s_ends.partition_point(|&y| y <= x - t_max);
        let to = s_ends.partition_point(|&y| y < x);
        if raw.len() + (to - from) > MAX_BREAKPOINTS {
            return Vec::new();
        }
        raw.extend(s_ends[from..to].iter().map(|&y| x - y));
    }
    raw.push(0.0);
    raw.push(t_max);
    raw.sort_by(|a, b| a.partial_cmp(b).expect("finite offsets"));
    raw.dedup();
    raw.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Diagonal shifts in `[0, eps/3)` added greedily, each chosen from a grid
/// and the overlap breakpoints to minimize what is left of the intersection.
pub fn greedy_shift_family(j: &PeriodicJacobi<f64>, eps: f64) -> Result<ScalingFamily> {
    let bs = band_structure(j)?;
    if !bs.all_gaps_open() {
        return Err(Error::Precondition(format!(
            "{} gaps are closed",
            bs.closed_gap_count()
        )));
    }
    let spectrum = bs.spectrum();
    let t_max = eps / 3.0 * 0.999;
    let grid: Vec<f64> = (1..GREEDY_GRID)
        .map(|i| t_max * i as f64 / (GREEDY_GRID - 1) as f64)
        .collect();
    let mut shifts = vec![0.0];
    let mut inter = spectrum.clone();
    while !inter.is_empty() {
        if shifts.len() >= GREEDY_MAX_MEMBERS {
            return Err(Error::Precondition(format!(
                "greedy shift family did not close within {GREEDY_MAX_MEMBERS} members"
            )));
        }
        let mut best: Option<((bool, f64, usize), f64, IntervalUnion<f64>)> = None;
        let extra = shift_breakpoints(&inter, &spectrum, t_max);
        for &t in grid.iter().chain(&extra) {
            let cut = inter.intersection(&spectrum.translated(t));
            let score = (!cut.is_empty(), cut.measure(), cut.len());
            if best.as_ref().map_or(true, |b| lex_less(score, b.0)) {
                best = Some((score, t, cut));
            }
        }
        let (score, t, cut) = best.expect("grid is nonempty");
        if score.0 && score.1 >= inter.measure() && score.2 >= inter.len() {
            return Err(Error::Precondition(
                "shifts within the eps/3 budget cannot shrink the intersection".into(),
            ));
        }
        shifts.push(t);
        inter = cut;
    }
    let members: Vec<_> = shifts.iter().map(|&t| j.shifted(t)).collect();
    let spectra = shifts.iter().map(|&t| spectrum.translated(t)).collect();
    let max_distance = members
        .iter()
        .map(|m| j.sup_distance(m))
        .fold(0.0, f64::max);
    Ok(ScalingFamily {
        kind: FamilyKind::GreedyShift,
        members,
        parameters: shifts,
        lambda: None,
        k: None,
        base_period: j.period(),
        max_distance,
        spectra,
    })
}
