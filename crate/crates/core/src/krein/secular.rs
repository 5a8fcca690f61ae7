use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::determinant::{check_compatible, secular_matrix};
use crate::channels::ExtensionBC;
use crate::error::{Error, Result};
use crate::linalg::{det, CMatrix};
use crate::models::{SpectralModel, SpectrumEntry, SpectrumList};
use crate::numerics::roots::brent;

const EDGE_FRACTIONS: [f64; 4] = [1e-9, 1e-7, 1e-5, 1e-3];
const INTERIOR_SAMPLES: usize = 24;
const LOWER_SCAN_RATIO: f64 = 1.25;
const LOWER_SCAN_LIMIT: f64 = 1e8;
const LEVEL_TOL: f64 = 1e-12;
const ORDER_TOL: f64 = 0.2;
const PROXIMITY: f64 = 1e-10;

/// A zero (`order > 0`) or pole (`order < 0`) of `D` on the real axis;
/// `ξ` jumps by `order` there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularPoint {
    pub value: f64,
    pub order: i64,
}

/// The part of both spectra that sees the boundary condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoupledSpectrum {
    pub laplacian: SpectrumList,
    pub friedrichs: SpectrumList,
    pub singular_points: Vec<SingularPoint>,
    pub coupled_channels: Vec<usize>,
    pub max: f64,
}

impl CoupledSpectrum {
    /// `ξ(t) = N_L(t) − N_F(t)`.
    pub fn shift_at(&self, t: f64) -> i64 {
        self.singular_points
            .iter()
            .filter(|p| p.value <= t)
            .map(|p| p.order)
            .sum()
    }
}

/// Eigenvalues of `Δ_L` below a cutoff, split by whether `Q` touches them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecularSpectrum {
    pub laplacian: SpectrumList,
    pub coupled: CoupledSpectrum,
    pub uncoupled: SpectrumList,
}

/// Channels whose `P`, `Q` and `S` entries interact, plus the sub-pair.
struct Block {
    channels: Vec<usize>,
    coupled: Vec<usize>,
    p: CMatrix,
    q: CMatrix,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

fn blocks(bc: &ExtensionBC, s_probe: &CMatrix) -> Vec<Block> {
    let n = bc.n();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j
                && (bc.p[(i, j)].norm() > 0.0
                    || bc.q[(i, j)].norm() > 0.0
                    || s_probe[(i, j)].norm() > 0.0)
            {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut out: Vec<Block> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => out[k].channels.push(i),
            None => {
                roots.push(r);
                out.push(Block {
                    channels: vec![i],
                    coupled: Vec::new(),
                    p: CMatrix::zeros(0, 0),
                    q: CMatrix::zeros(0, 0),
                });
            }
        }
    }
    for b in &mut out {
        let ch = &b.channels;
        b.p = CMatrix::from_fn(ch.len(), ch.len(), |i, j| bc.p[(ch[i], ch[j])]);
        b.q = CMatrix::from_fn(ch.len(), ch.len(), |i, j| bc.q[(ch[i], ch[j])]);
        b.coupled = ch
            .iter()
            .enumerate()
            .filter(|&(j, _)| b.q.column(j).iter().any(|z| z.norm() > 0.0))
            .map(|(_, &c)| c)
            .collect();
    }
    out.retain(|b| !b.coupled.is_empty());
    out
}

struct BlockSolver<'a> {
    model: &'a dyn SpectralModel,
    block: &'a Block,
    phase: Complex64,
}

impl BlockSolver<'_> {
    fn d(&self, lambda: f64) -> Result<Complex64> {
        let s = self.model.s_matrix(lambda)?;
        let ch = &self.block.channels;
        let sb = CMatrix::from_fn(ch.len(), ch.len(), |i, j| s[(ch[i], ch[j])]);
        let bc = ExtensionBC {
            p: self.block.p.clone(),
            q: self.block.q.clone(),
        };
        Ok(det(&secular_matrix(&bc, &sb)))
    }

    /// `D` rotated to the real axis.
    fn f(&self, lambda: f64) -> Result<f64> {
        Ok((self.d(lambda)? * self.phase.conj()).re)
    }

    fn roots_between(&self, samples: &[f64]) -> Result<Vec<f64>> {
        let values: Vec<f64> = samples.iter().map(|&x| self.f(x)).collect::<Result<_>>()?;
        let mut roots = Vec::new();
        for i in 0..samples.len() - 1 {
            let (a, b) = (samples[i], samples[i + 1]);
            let (fa, fb) = (values[i], values[i + 1]);
            if fa == 0.0 {
                roots.push(a);
            } else if fa * fb < 0.0 {
                let mut err = None;
                let r = brent(
                    |x| match self.f(x) {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            f64::NAN
                        }
                    },
                    a,
                    b,
                    1e-14 * (1.0 + a.abs().max(b.abs())),
                    200,
                );
                if let Some(e) = err {
                    return Err(e);
                }
                roots.push(r?);
            }
        }
        if values.last() == Some(&0.0) {
            roots.push(*samples.last().expect("nonempty"));
        }
        Ok(roots)
    }

    /// Net order of `D` at a Friedrichs level, from the slope of `ln|D|`.
    fn order_at(&self, x: f64, gap: f64) -> Result<i64> {
        let (d1, d2) = (1e-4 * gap, 1e-5 * gap);
        let slope = |a: f64, b: f64| -> Result<f64> {
            let (fa, fb) = (self.d(a)?.norm(), self.d(b)?.norm());
            Ok((fa.ln() - fb.ln()) / 10f64.ln())
        };
        let right = slope(x + d1, x + d2)?;
        let left = slope(x - d1, x - d2)?;
        let avg = 0.5 * (left + right);
        let order = avg.round();
        if (avg - order).abs() > ORDER_TOL || !avg.is_finite() {
            return Err(Error::convergence(
                "secular_spectrum",
                format!("non-integer order {avg} of D at the Friedrichs level {x}"),
            ));
        }
        Ok(order as i64)
    }
}

fn interval_samples(a: f64, b: f64, include_b: bool) -> Vec<f64> {
    let g = b - a;
    // stay clear of the rounding neighbourhood of the poles
    let floor = 1e-11 * (1.0 + a.abs().max(b.abs()));
    let offset = |f: f64| (f * g).max(floor).min(0.25 * g);
    let mut s: Vec<f64> = EDGE_FRACTIONS.iter().map(|&f| a + offset(f)).collect();
    s.extend((1..=INTERIOR_SAMPLES).map(|i| a + g * i as f64 / (INTERIOR_SAMPLES + 1) as f64));
    if include_b {
        s.push(b);
    } else {
        s.extend(EDGE_FRACTIONS.iter().rev().map(|&f| b - offset(f)));
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

fn lower_samples(b: f64, include_b: bool) -> Vec<f64> {
    let g = b.abs().max(1.0);
    let mut s: Vec<f64> = Vec::new();
    let mut d = 0.1 * g;
    while b - d > -LOWER_SCAN_LIMIT * g {
        s.push(b - d);
        d *= LOWER_SCAN_RATIO;
    }
    s.reverse();
    if include_b {
        s.push(b);
    } else {
        s.extend(
            [3e-2, 1e-2, 3e-3, 1e-3, 1e-5, 1e-7, 1e-9]
                .iter()
                .map(|f| b - f * g),
        );
    }
    s
}

struct BlockResult {
    roots: Vec<f64>,
    levels: Vec<(f64, usize, i64)>,
    friedrichs: SpectrumList,
    sector: i64,
}

fn solve_block(model: &dyn SpectralModel, block: &Block, max: f64) -> Result<BlockResult> {
    let friedrichs = model.coupled_friedrichs_eigenvalues(&block.coupled, max)?;
    let levels: Vec<(f64, usize)> = friedrichs.distinct(LEVEL_TOL);
    let sector = model.channel_set().channel(block.coupled[0]).id.k;

    // a regular point fixes the constant phase of D on the real axis
    let probe_at = levels.first().map_or(max, |l| l.0.min(max)) - 1.0;
    let mut solver = BlockSolver {
        model,
        block,
        phase: Complex64::new(1.0, 0.0),
    };
    let dp = solver.d(probe_at)?;
    if dp.norm() > 0.0 {
        solver.phase = dp / dp.norm();
    }

    let mut intervals: Vec<Vec<f64>> = Vec::new();
    match levels.first() {
        Some(&(l, _)) => intervals.push(lower_samples(l, false)),
        None => intervals.push(lower_samples(max, true)),
    }
    for (i, &(a, _)) in levels.iter().enumerate() {
        match levels.get(i + 1) {
            Some(&(b, _)) => intervals.push(interval_samples(a, b, false)),
            None if max > a * (1.0 + 1e-14) + 1e-300 => {
                intervals.push(interval_samples(a, max, true))
            }
            None => {}
        }
    }
    let limit = block.coupled.len();
    let roots: Vec<Vec<f64>> = intervals
        .par_iter()
        .map(|s| {
            let r = solver.roots_between(s)?;
            if r.len() > limit {
                return Err(Error::RootCountAnomaly {
                    interval: format!("[{}, {}]", s[0], s[s.len() - 1]),
                    expected: limit,
                    found: r.len(),
                });
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let orders: Vec<i64> = (0..levels.len())
        .into_par_iter()
        .map(|i| {
            let x = levels[i].0;
            let left = if i > 0 {
                x - levels[i - 1].0
            } else {
                f64::INFINITY
            };
            let right = levels.get(i + 1).map_or(f64::INFINITY, |l| l.0 - x);
            let mut gap = left.min(right);
            if !gap.is_finite() {
                gap = x.abs().max(1.0);
            }
            solver.order_at(x, gap)
        })
        .collect::<Result<_>>()?;
    let mut out_levels = Vec::new();
    for (&(x, m), &o) in levels.iter().zip(&orders) {
        if (m as i64) + o < 0 {
            return Err(Error::RootCountAnomaly {
                interval: format!("Friedrichs level {x}"),
                expected: m,
                found: 0,
            });
        }
        out_levels.push((x, m, o));
    }
    Ok(BlockResult {
        roots: roots.into_iter().flatten().filter(|&r| r <= max).collect(),
        levels: out_levels,
        friedrichs,
        sector,
    })
}

/// Eigenvalues of `Δ_L` up to `max` on the channels that `Q` touches.
///
/// Roots of `D` are bracketed between consecutive Friedrichs levels and on
/// `(−∞, λ_min)`; at a level of multiplicity `m` the multiplicity of `Δ_L`
/// is `m` plus the order of `D` there.
pub fn secular_coupled(
    bc: &ExtensionBC,
    model: &dyn SpectralModel,
    max: f64,
) -> Result<CoupledSpectrum> {
    check_compatible(bc, model)?;
    if max >= 0.0 && !model.capabilities().supports_positive_lambda {
        return Err(Error::Unsupported(format!(
            "secular spectrum up to {max} needs S(λ) for λ ≥ 0"
        )));
    }
    let probe = model.s_matrix(-1.0)?;
    let blocks = blocks(bc, &probe);
    let results: Vec<BlockResult> = blocks
        .iter()
        .map(|b| solve_block(model, b, max))
        .collect::<Result<_>>()?;

    let mut lap = Vec::new();
    let mut fr = SpectrumList::new(Vec::new(), max)?;
    let mut points = Vec::new();
    let mut coupled_channels = Vec::new();
    for (b, r) in blocks.iter().zip(results) {
        coupled_channels.extend_from_slice(&b.coupled);
        for &x in &r.roots {
            lap.push(SpectrumEntry {
                value: x,
                multiplicity: 1,
                sector: r.sector,
            });
            points.push(SingularPoint { value: x, order: 1 });
        }
        for &(x, m, o) in &r.levels {
            let ml = (m as i64 + o) as usize;
            if ml > 0 {
                let sector = r
                    .friedrichs
                    .entries()
                    .iter()
                    .find(|e| (e.value - x).abs() <= LEVEL_TOL * (1.0 + x.abs()))
                    .map_or(r.sector, |e| e.sector);
                lap.push(SpectrumEntry {
                    value: x,
                    multiplicity: ml,
                    sector,
                });
            }
            if o != 0 {
                points.push(SingularPoint { value: x, order: o });
            }
        }
        fr = fr.merged(&r.friedrichs);
    }
    points.sort_by(|a, b| a.value.total_cmp(&b.value));
    coupled_channels.sort_unstable();
    Ok(CoupledSpectrum {
        laplacian: SpectrumList::new(lap, max)?,
        friedrichs: fr,
        singular_points: points,
        coupled_channels,
        max,
    })
}

/// Full `Δ_L` spectrum up to `max`: secular roots on coupled channels and
/// the Friedrichs eigenvalues of all other channels verbatim.
pub fn secular_spectrum(
    bc: &ExtensionBC,
    model: &dyn SpectralModel,
    max: f64,
) -> Result<SecularSpectrum> {
    let coupled = secular_coupled(bc, model, max)?;
    let full = model.friedrichs_eigenvalues(max)?;
    let mut remaining: Vec<SpectrumEntry> = full.entries().to_vec();
    for c in coupled.friedrichs.entries() {
        let mut left = c.multiplicity;
        for e in remaining.iter_mut() {
            if left == 0 {
                break;
            }
            if e.sector == c.sector && (e.value - c.value).abs() <= 1e-9 * (1.0 + c.value.abs()) {
                let take = left.min(e.multiplicity);
                e.multiplicity -= take;
                left -= take;
            }
        }
    }
    remaining.retain(|e| e.multiplicity > 0);
    let uncoupled = SpectrumList::new(remaining, max)?;
    Ok(SecularSpectrum {
        laplacian: uncoupled.merged(&coupled.laplacian),
        coupled,
        uncoupled,
    })
}

/// Spectral shift `ξ(t) = N_L(t) − N_F(t)` at points off both spectra.
pub fn spectral_shift_sweep(
    bc: &ExtensionBC,
    model: &dyn SpectralModel,
    ts: &[f64],
) -> Result<Vec<f64>> {
    check_compatible(bc, model)?;
    if ts.is_empty() {
        return Ok(Vec::new());
    }
    let top = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cs = secular_coupled(bc, model, top)?;
    let reference = cs
        .singular_points
        .first()
        .map_or(0.0, |p| p.value)
        .min(ts.iter().cloned().fold(f64::INFINITY, f64::min));
    let reference = reference - reference.abs().max(1.0);
    let d_ref = super::determinant::d_raw(bc, model, reference)?;
    ts.par_iter()
        .map(|&t| {
            let d = super::determinant::d_raw(bc, model, t)?;
            if d.norm() < PROXIMITY || d.norm() > 1.0 / PROXIMITY {
                return Err(Error::NearEigenvalue(t));
            }
            let xi = cs.shift_at(t);
            let parity: i64 = cs
                .singular_points
                .iter()
                .filter(|p| p.value > reference && p.value <= t)
                .map(|p| p.order)
                .sum();
            let same_sign = (d * d_ref.conj()).re > 0.0;
            if same_sign != (parity % 2 == 0) {
                return Err(Error::convergence(
                    "spectral_shift",
                    format!("sign of D({t}) disagrees with the located zeros and poles"),
                ));
            }
            Ok(xi as f64)
        })
        .collect()
}

pub fn spectral_shift(bc: &ExtensionBC, model: &dyn SpectralModel, t: f64) -> Result<f64> {
    Ok(spectral_shift_sweep(bc, model, &[t])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{friedrichs_bc, rotation_bc_on, ChannelId};
    use crate::models::{TorusLattice, TorusModel, TruncatedCone};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn half() -> (TruncatedCone, ExtensionBC) {
        let m = TruncatedCone::new(4.0 * PI, 1.0).unwrap();
        let bc = rotation_bc_on(
            m.channel_set(),
            &[(ChannelId { point: 0, k: 1 }, FRAC_PI_2)],
        )
        .unwrap();
        (m, bc)
    }

    #[test]
    fn half_channel_roots() {
        let (m, bc) = half();
        let max = (20.5 * PI).powi(2);
        let cs = secular_coupled(&bc, &m, max).unwrap();
        let roots = cs.laplacian.expanded();
        assert_eq!(roots.len(), 20);
        for (i, r) in roots.iter().enumerate() {
            let exact = ((i as f64 + 0.5) * PI).powi(2);
            assert!((r - exact).abs() < 1e-10, "{r} vs {exact}");
        }
        assert_eq!(cs.friedrichs.len(), 20);
    }

    #[test]
    fn friedrichs_bc_keeps_spectrum() {
        let m = TruncatedCone::new(3.0 * PI, 1.5).unwrap();
        let bc = friedrichs_bc(m.channel_set());
        let s = secular_spectrum(&bc, &m, 60.0).unwrap();
        assert_eq!(s.laplacian, m.friedrichs_eigenvalues(60.0).unwrap());
    }

    #[test]
    fn full_spectrum_replaces_one_sector() {
        let (m, bc) = half();
        let s = secular_spectrum(&bc, &m, 40.0).unwrap();
        let f = m.friedrichs_eigenvalues(40.0).unwrap();
        assert_eq!(s.laplacian.total_multiplicity(), f.total_multiplicity());
        assert_eq!(s.laplacian.counting(PI * PI / 4.0 + 1e-9), 1);
    }

    #[test]
    fn shift_steps() {
        let (m, bc) = half();
        let ts = [1.0, 3.0, 9.0, 10.0, 20.0, 23.0];
        let xi = spectral_shift_sweep(&bc, &m, &ts).unwrap();
        assert_eq!(xi, vec![0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn torus_roots_interlace() {
        let m = TorusModel::new(TorusLattice::unit_square());
        let bc = rotation_bc_on(
            m.channel_set(),
            &[(ChannelId { point: 0, k: 0 }, FRAC_PI_2)],
        )
        .unwrap();
        let cs = secular_coupled(&bc, &m, 400.0).unwrap();
        let levels = cs.friedrichs.distinct(1e-12);
        let roots: Vec<f64> = cs
            .laplacian
            .entries()
            .iter()
            .filter(|e| e.multiplicity == 1 && !levels.iter().any(|l| l.0 == e.value))
            .map(|e| e.value)
            .collect();
        assert!(roots[0] < 0.0);
        for w in levels.windows(2) {
            assert_eq!(
                roots.iter().filter(|&&r| r > w[0].0 && r < w[1].0).count(),
                1
            );
        }
        for p in &cs.singular_points {
            assert!(p.order == 1 || p.order == -1);
        }
    }
}
