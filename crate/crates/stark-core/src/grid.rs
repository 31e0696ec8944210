//! Periodic-grid wavefunctions with spectral momentum operators.
//!
//! States live on a uniform grid covering `[-L, L)^n` with periodic
//! boundary conditions; momentum operators act by multiplication on the
//! discrete Fourier side. The momentum lattice spacing is `pi / L` and the
//! Nyquist radius `pi / spacing`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{CoreError, Result};
use crate::par;

/// Fraction of the box half-width treated as the trusted interior; mass
/// beyond it counts as boundary contamination.
pub const INTERIOR_FRACTION: f64 = 0.8;

/// Maximum tolerated boundary-mass fraction before results are rejected.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-6;

/// Zero-based grid axis. The electric field points along `Axis(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axis(pub usize);

/// Geometry of the periodic computational box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub points_per_axis: usize,
    pub box_half_width: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points_per_axis: usize, box_half_width: f64) -> Result<Self> {
        if dim < 2 {
            return Err(CoreError::RejectedInput(format!(
                "dimension must be at least 2, got {dim}"
            )));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(CoreError::RejectedInput(format!(
                "points_per_axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        if !(box_half_width > 0.0) {
            return Err(CoreError::RejectedInput(
                "box_half_width must be positive".into(),
            ));
        }
        Ok(GridSpec {
            dim,
            points_per_axis,
            box_half_width,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.box_half_width / self.points_per_axis as f64
    }

    /// Largest representable momentum, `pi / spacing`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    pub fn n_points(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Volume element `spacing^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Row-major stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.dim - 1 - axis) as u32)
    }

    /// Position coordinate of index `i` along any axis: `-L + i*h`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.box_half_width + i as f64 * self.spacing()
    }

    /// Momentum-lattice coordinate of FFT index `i` along any axis.
    #[inline]
    pub fn freq(&self, i: usize) -> f64 {
        let n = self.points_per_axis;
        let m = if i < n / 2 {
            i as isize
        } else {
            i as isize - n as isize
        };
        m as f64 * std::f64::consts::PI / self.box_half_width
    }

    /// Axis index of `flat` along `axis` (row-major).
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.stride(axis)) % self.points_per_axis
    }

    /// Position vector of a flat index.
    #[inline]
    pub fn position(&self, flat: usize, out: &mut [f64]) {
        for a in 0..self.dim {
            out[a] = self.coord(self.axis_index(flat, a));
        }
    }

    /// Momentum vector of a flat index (FFT ordering).
    #[inline]
    pub fn momentum(&self, flat: usize, out: &mut [f64]) {
        for a in 0..self.dim {
            out[a] = self.freq(self.axis_index(flat, a));
        }
    }
}

/// Momentum-support tag: the state's Fourier mass outside `|xi| < eta`
/// is negligible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumCutoff {
    pub eta: f64,
}

impl MomentumCutoff {
    /// Fraction of momentum-space mass outside `|xi| < eta`.
    pub fn outside_mass_fraction(&self, psi: &WaveFunction) -> f64 {
        let grid = psi.grid;
        let hat = psi.momentum_amplitudes();
        let eta2 = self.eta * self.eta;
        let total = par::norm_sq(&hat);
        let outside = par::sum_indexed_f64(hat.len(), |i| {
            let mut k = [0.0; 4];
            grid.momentum(i, &mut k[..grid.dim]);
            let k2: f64 = k[..grid.dim].iter().map(|v| v * v).sum();
            if k2 >= eta2 {
                hat[i].norm_sqr()
            } else {
                0.0
            }
        });
        outside / total
    }
}

/// Complex amplitude field on a periodic grid. Values are immutable after
/// construction; operations return new states.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub grid: GridSpec,
    amps: Vec<Complex64>,
    /// Momentum-support radius, when known from construction.
    pub cutoff: Option<f64>,
    norm_cache: Option<f64>,
}

thread_local! {
    static FFT_CACHE: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan_fft(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    FFT_CACHE.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((len, forward))
            .or_insert_with(|| {
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    })
}

/// Unnormalized DFT along one axis, in place.
pub fn fft_axis(grid: &GridSpec, data: &mut [Complex64], axis: usize, forward: bool) {
    let n = grid.points_per_axis;
    let fft = plan_fft(n, forward);
    let stride = grid.stride(axis);
    if stride == 1 {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for row in data.chunks_exact_mut(n) {
            fft.process_with_scratch(row, &mut scratch);
        }
    } else {
        let mut line = vec![Complex64::default(); n];
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let n_lines = data.len() / n;
        for l in 0..n_lines {
            // Lines along `axis` start at indices that skip the axis stride block.
            let block = l / stride;
            let offset = l % stride;
            let base = block * stride * n + offset;
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[base + k * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (k, slot) in line.iter().enumerate() {
                data[base + k * stride] = *slot;
            }
        }
    }
}

/// Forward DFT over all axes (unnormalized).
pub fn to_momentum(grid: &GridSpec, data: &mut [Complex64]) {
    for a in 0..grid.dim {
        fft_axis(grid, data, a, true);
    }
}

/// Inverse DFT over all axes, normalized by `1/N^dim`.
pub fn to_position(grid: &GridSpec, data: &mut [Complex64]) {
    for a in 0..grid.dim {
        fft_axis(grid, data, a, false);
    }
    let scale = 1.0 / grid.n_points() as f64;
    par::for_each_chunk_mut(data, |_, chunk| {
        for z in chunk {
            *z *= scale;
        }
    });
}

impl WaveFunction {
    pub fn from_amplitudes(grid: GridSpec, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.n_points() {
            return Err(CoreError::RejectedInput(format!(
                "amplitude buffer length {} does not match grid ({} points)",
                amps.len(),
                grid.n_points()
            )));
        }
        Ok(WaveFunction {
            grid,
            amps,
            cutoff: None,
            norm_cache: None,
        })
    }

    /// Build a state by evaluating `f` at every grid point.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let mut amps = vec![Complex64::default(); grid.n_points()];
        par::for_each_chunk_mut(&mut amps, |offset, chunk| {
            let mut x = [0.0; 4];
            for (i, z) in chunk.iter_mut().enumerate() {
                grid.position(offset + i, &mut x[..grid.dim]);
                *z = f(&x[..grid.dim]);
            }
        });
        WaveFunction {
            grid,
            amps,
            cutoff: None,
            norm_cache: None,
        }
    }

    /// Normalized Gaussian packet `~ exp(-|x-c|^2/(2 w^2)) exp(i k0.x)` with
    /// a momentum-support tag.
    pub fn gaussian(grid: GridSpec, center: &[f64], width: f64, k0: &[f64]) -> Result<Self> {
        if center.len() != grid.dim || k0.len() != grid.dim {
            return Err(CoreError::RejectedInput(
                "center/momentum dimension mismatch".into(),
            ));
        }
        if !(width > 0.0) {
            return Err(CoreError::RejectedInput("width must be positive".into()));
        }
        let inv2w2 = 1.0 / (2.0 * width * width);
        let psi = Self::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for a in 0..grid.dim {
                let d = x[a] - center[a];
                r2 += d * d;
                phase += k0[a] * x[a];
            }
            Complex64::from_polar((-r2 * inv2w2).exp(), phase)
        });
        let mut psi = psi.normalized();
        let k0_norm = k0.iter().map(|v| v * v).sum::<f64>().sqrt();
        psi.cutoff = Some(k0_norm + 4.8 / width);
        Ok(psi)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Raw (unnormalized) DFT of the amplitudes.
    pub fn momentum_amplitudes(&self) -> Vec<Complex64> {
        let mut hat = self.amps.clone();
        to_momentum(&self.grid, &mut hat);
        hat
    }

    /// Trapezoidal L2 norm, `sqrt(sum |psi|^2 h^n)`.
    pub fn norm(&self) -> f64 {
        if let Some(n) = self.norm_cache {
            return n;
        }
        (par::norm_sq(&self.amps) * self.grid.cell_volume()).sqrt()
    }

    pub fn normalized(&self) -> WaveFunction {
        let n = self.norm();
        let inv = 1.0 / n;
        let mut amps = self.amps.clone();
        par::for_each_chunk_mut(&mut amps, |_, chunk| {
            for z in chunk {
                *z *= inv;
            }
        });
        WaveFunction {
            grid: self.grid,
            amps,
            cutoff: self.cutoff,
            norm_cache: Some(1.0),
        }
    }

    /// Mass fraction at points with any `|x_a| >= INTERIOR_FRACTION * L`.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let grid = self.grid;
        let edge = INTERIOR_FRACTION * grid.box_half_width;
        let total = par::norm_sq(&self.amps);
        let outside = par::sum_indexed_f64(self.amps.len(), |i| {
            let mut near = false;
            for a in 0..grid.dim {
                if grid.coord(grid.axis_index(i, a)).abs() >= edge {
                    near = true;
                    break;
                }
            }
            if near {
                self.amps[i].norm_sqr()
            } else {
                0.0
            }
        });
        outside / total
    }

    /// Mean position `<x>` component-wise.
    pub fn position_centroid(&self) -> Vec<f64> {
        let grid = self.grid;
        let total = par::norm_sq(&self.amps);
        (0..grid.dim)
            .map(|a| {
                par::sum_indexed_f64(self.amps.len(), |i| {
                    grid.coord(grid.axis_index(i, a)) * self.amps[i].norm_sqr()
                }) / total
            })
            .collect()
    }

    /// Mean momentum `<p>` component-wise.
    pub fn momentum_centroid(&self) -> Vec<f64> {
        let grid = self.grid;
        let hat = self.momentum_amplitudes();
        let total = par::norm_sq(&hat);
        (0..grid.dim)
            .map(|a| {
                par::sum_indexed_f64(hat.len(), |i| {
                    grid.freq(grid.axis_index(i, a)) * hat[i].norm_sqr()
                }) / total
            })
            .collect()
    }
}

/// Scalar product `sum conj(a) b h^n`, conjugate-linear in the first slot.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(CoreError::GridMismatch);
    }
    Ok(par::dot_conj(a.amplitudes(), b.amplitudes()) * a.grid.cell_volume())
}

/// Spectral application of the momentum operator along one axis.
pub fn apply_momentum(psi: &WaveFunction, axis: Axis) -> Result<WaveFunction> {
    let grid = psi.grid;
    if axis.0 >= grid.dim {
        return Err(CoreError::AxisOutOfRange {
            axis: axis.0,
            dim: grid.dim,
        });
    }
    let mut data = psi.amplitudes().to_vec();
    fft_axis(&grid, &mut data, axis.0, true);
    let stride = grid.stride(axis.0);
    let n = grid.points_per_axis;
    par::for_each_chunk_mut(&mut data, |offset, chunk| {
        for (i, z) in chunk.iter_mut().enumerate() {
            let idx = ((offset + i) / stride) % n;
            *z *= grid.freq(idx);
        }
    });
    fft_axis(&grid, &mut data, axis.0, false);
    let scale = 1.0 / n as f64;
    par::for_each_chunk_mut(&mut data, |_, chunk| {
        for z in chunk {
            *z *= scale;
        }
    });
    Ok(WaveFunction {
        grid,
        amps: data,
        cutoff: psi.cutoff,
        norm_cache: None,
    })
}

/// Pointwise boost `exp(i v.x) psi`; translates the momentum support by `v`.
pub fn boost(psi: &WaveFunction, v: &[f64]) -> Result<WaveFunction> {
    let grid = psi.grid;
    if v.len() != grid.dim {
        return Err(CoreError::RejectedInput(
            "boost velocity dimension mismatch".into(),
        ));
    }
    let speed = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if let Some(eta) = psi.cutoff {
        let requested = speed + eta;
        if requested >= grid.nyquist() {
            return Err(CoreError::AliasingRisk {
                requested,
                nyquist: grid.nyquist(),
            });
        }
    }
    let mut amps = psi.amplitudes().to_vec();
    par::for_each_chunk_mut(&mut amps, |offset, chunk| {
        let mut x = [0.0; 4];
        for (i, z) in chunk.iter_mut().enumerate() {
            grid.position(offset + i, &mut x[..grid.dim]);
            let phase: f64 = (0..grid.dim).map(|a| v[a] * x[a]).sum();
            *z *= Complex64::from_polar(1.0, phase);
        }
    });
    Ok(WaveFunction {
        grid,
        amps,
        cutoff: psi.cutoff.map(|eta| eta + speed),
        norm_cache: psi.norm_cache,
    })
}

/// Weighted norm `||<x>^k psi||` with `<x> = sqrt(1+|x|^2)`, `k <= 2`.
pub fn weighted_norm(psi: &WaveFunction, k: u32) -> Result<f64> {
    if k > 2 {
        return Err(CoreError::RejectedInput(format!(
            "moment order must be 0, 1 or 2, got {k}"
        )));
    }
    let frac = psi.boundary_mass_fraction();
    if frac > BOUNDARY_MASS_LIMIT {
        return Err(CoreError::BoundaryContamination {
            fraction: frac,
            limit: BOUNDARY_MASS_LIMIT,
        });
    }
    let grid = psi.grid;
    let amps = psi.amplitudes();
    let sum = par::sum_indexed_f64(amps.len(), |i| {
        let mut x = [0.0; 4];
        grid.position(i, &mut x[..grid.dim]);
        let r2: f64 = x[..grid.dim].iter().map(|c| c * c).sum();
        (1.0 + r2).powi(k as i32) * amps[i].norm_sqr()
    });
    Ok((sum * grid.cell_volume()).sqrt())
}

/// Exact periodic translation by `shift` (spectral phase `exp(-i shift.xi)`).
pub fn translate(psi: &WaveFunction, shift: &[f64]) -> Result<WaveFunction> {
    let grid = psi.grid;
    if shift.len() != grid.dim {
        return Err(CoreError::RejectedInput(
            "translation dimension mismatch".into(),
        ));
    }
    let mut hat = psi.momentum_amplitudes();
    par::for_each_chunk_mut(&mut hat, |offset, chunk| {
        let mut k = [0.0; 4];
        for (i, z) in chunk.iter_mut().enumerate() {
            grid.momentum(offset + i, &mut k[..grid.dim]);
            let phase: f64 = (0..grid.dim).map(|a| -shift[a] * k[a]).sum();
            *z *= Complex64::from_polar(1.0, phase);
        }
    });
    to_position(&grid, &mut hat);
    Ok(WaveFunction {
        grid,
        amps: hat,
        cutoff: psi.cutoff,
        norm_cache: psi.norm_cache,
    })
}

/// Multiply the momentum-space amplitudes by `f(xi)`.
pub fn apply_momentum_envelope<F>(psi: &WaveFunction, f: F) -> WaveFunction
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let grid = psi.grid;
    let mut hat = psi.momentum_amplitudes();
    par::for_each_chunk_mut(&mut hat, |offset, chunk| {
        let mut k = [0.0; 4];
        for (i, z) in chunk.iter_mut().enumerate() {
            grid.momentum(offset + i, &mut k[..grid.dim]);
            *z *= f(&k[..grid.dim]);
        }
    });
    to_position(&grid, &mut hat);
    WaveFunction {
        grid,
        amps: hat,
        cutoff: psi.cutoff,
        norm_cache: None,
    }
}

/// Multiply pointwise by the indicator of the ball `|x - center| <= radius`.
pub fn apply_ball_indicator(psi: &WaveFunction, center: &[f64], radius: f64) -> WaveFunction {
    let grid = psi.grid;
    let mut amps = psi.amplitudes().to_vec();
    let r2 = radius * radius;
    par::for_each_chunk_mut(&mut amps, |offset, chunk| {
        let mut x = [0.0; 4];
        for (i, z) in chunk.iter_mut().enumerate() {
            grid.position(offset + i, &mut x[..grid.dim]);
            let d2: f64 = (0..grid.dim).map(|a| (x[a] - center[a]).powi(2)).sum();
            if d2 > r2 {
                *z = Complex64::default();
            }
        }
    });
    WaveFunction {
        grid,
        amps,
        cutoff: None,
        norm_cache: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid2d() -> GridSpec {
        GridSpec::new(2, 128, 10.0).unwrap()
    }

    fn unit_gaussian(grid: GridSpec) -> WaveFunction {
        WaveFunction::gaussian(grid, &[0.0, 0.0], 1.0, &[0.0, 0.0]).unwrap()
    }

    #[test]
    fn grid_spec_rejects_bad_input() {
        assert!(GridSpec::new(1, 64, 10.0).is_err());
        assert!(GridSpec::new(2, 100, 10.0).is_err());
        assert!(GridSpec::new(2, 4, 10.0).is_err());
        assert!(GridSpec::new(2, 64, 0.0).is_err());
    }

    #[test]
    fn normalized_gaussian_has_unit_norm() {
        let psi = unit_gaussian(grid2d());
        assert!((psi.norm() - 1.0).abs() <= 1e-12);
        let ip = inner_product(&psi, &psi).unwrap();
        assert!((ip.re - 1.0).abs() <= 1e-12);
        assert!(ip.im.abs() <= 1e-12);
    }

    #[test]
    fn inner_product_is_linear_in_second_slot() {
        let psi = unit_gaussian(grid2d());
        let mut amps = psi.amplitudes().to_vec();
        for z in &mut amps {
            *z *= Complex64::i();
        }
        let ipsi = WaveFunction::from_amplitudes(psi.grid, amps).unwrap();
        let ip = inner_product(&psi, &ipsi).unwrap();
        assert!((ip - Complex64::i()).norm() <= 1e-12);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let grid = grid2d();
        let a = WaveFunction::gaussian(grid, &[0.5, -0.3], 0.8, &[1.0, 0.0]).unwrap();
        let b = WaveFunction::gaussian(grid, &[-0.2, 0.4], 1.2, &[0.0, 2.0]).unwrap();
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() <= 1e-12);
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let a = unit_gaussian(grid2d());
        let b = unit_gaussian(GridSpec::new(2, 64, 10.0).unwrap());
        assert!(matches!(
            inner_product(&a, &b),
            Err(CoreError::GridMismatch)
        ));
    }

    // Analytic overlap of two unit-width Gaussians offset by b: exp(-|b|^2/4).
    // Cross-checked against a direct quadrature oracle on the same grid.
    #[test]
    fn gaussian_overlap_matches_analytic_and_quadrature() {
        let grid = grid2d();
        let g0 = unit_gaussian(grid);
        let gb = WaveFunction::gaussian(grid, &[2.0, 0.0], 1.0, &[0.0, 0.0]).unwrap();
        let ip = inner_product(&g0, &gb).unwrap();
        let expected = (-1.0f64).exp();
        assert_relative_eq!(ip.re, expected, epsilon = 1e-12);
        assert!(ip.im.abs() < 1e-13);

        // independent quadrature oracle: midpoint rule over the same box
        let h = grid.spacing();
        let norm = 1.0 / std::f64::consts::PI.sqrt();
        let mut acc = 0.0;
        for i in 0..grid.points_per_axis {
            for j in 0..grid.points_per_axis {
                let x = grid.coord(i);
                let y = grid.coord(j);
                let a = norm * (-(x * x + y * y) / 2.0).exp();
                let b = norm * (-(((x - 2.0) * (x - 2.0)) + y * y) / 2.0).exp();
                acc += a * b * h * h;
            }
        }
        assert_relative_eq!(ip.re, acc, epsilon = 1e-10);
    }

    #[test]
    fn fft_round_trip_is_identity() {
        let grid = grid2d();
        let psi = WaveFunction::gaussian(grid, &[1.0, -2.0], 0.7, &[2.0, -1.0]).unwrap();
        let mut data = psi.amplitudes().to_vec();
        to_momentum(&grid, &mut data);
        to_position(&grid, &mut data);
        let err: f64 = data
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err / psi.norm() <= 1e-12);
    }

    #[test]
    fn parseval_holds() {
        let grid = grid2d();
        let psi = WaveFunction::gaussian(grid, &[0.3, 0.1], 0.9, &[1.5, 0.5]).unwrap();
        let hat = psi.momentum_amplitudes();
        let weight = grid.cell_volume() / grid.n_points() as f64;
        let mom_norm = (par::norm_sq(&hat) * weight).sqrt();
        assert_relative_eq!(mom_norm, psi.norm(), epsilon = 1e-12);
    }

    #[test]
    fn momentum_cutoff_tag_is_respected() {
        let grid = grid2d();
        let psi = WaveFunction::gaussian(grid, &[0.0, 0.0], 0.8, &[2.0, 0.0]).unwrap();
        let cut = MomentumCutoff {
            eta: psi.cutoff.unwrap(),
        };
        assert!(cut.outside_mass_fraction(&psi) <= 1e-10);
    }

    #[test]
    fn apply_momentum_shifts_mean_momentum_by_boost() {
        let grid = grid2d();
        let psi = WaveFunction::gaussian(grid, &[0.0, 0.0], 1.0, &[2.0, 0.0]).unwrap();
        let mean = psi.momentum_centroid();
        assert_relative_eq!(mean[0], 2.0, epsilon = 1e-8);
        assert!(mean[1].abs() <= 1e-8);
    }

    #[test]
    fn symmetric_gaussian_has_zero_mean_momentum() {
        let psi = unit_gaussian(grid2d());
        for axis in [Axis(0), Axis(1)] {
            let p = apply_momentum(&psi, axis).unwrap();
            let ip = inner_product(&psi, &p).unwrap();
            assert!(ip.norm() <= 1e-10);
        }
    }

    // ||p_1 g||^2 = 1/2 for the unit-width normalized Gaussian.
    #[test]
    fn momentum_second_moment_matches_analytic() {
        let psi = unit_gaussian(grid2d());
        let p1 = apply_momentum(&psi, Axis(0)).unwrap();
        let val = inner_product(&p1, &p1).unwrap().re;
        assert_relative_eq!(val, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn apply_momentum_is_self_adjoint() {
        let grid = grid2d();
        let a = WaveFunction::gaussian(grid, &[0.4, 0.0], 0.9, &[1.0, -0.5]).unwrap();
        let b = WaveFunction::gaussian(grid, &[-0.6, 0.8], 1.1, &[0.0, 1.0]).unwrap();
        let pa = apply_momentum(&a, Axis(0)).unwrap();
        let pb = apply_momentum(&b, Axis(0)).unwrap();
        let lhs = inner_product(&pa, &b).unwrap();
        let rhs = inner_product(&a, &pb).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10);
    }

    #[test]
    fn apply_momentum_rejects_bad_axis() {
        let psi = unit_gaussian(grid2d());
        assert!(matches!(
            apply_momentum(&psi, Axis(2)),
            Err(CoreError::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn boost_zero_is_identity_and_round_trips() {
        let psi = unit_gaussian(grid2d());
        let same = boost(&psi, &[0.0, 0.0]).unwrap();
        let diff: f64 = same
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-14);

        let fwd = boost(&psi, &[3.0, -1.0]).unwrap();
        let back = boost(&fwd, &[-3.0, 1.0]).unwrap();
        let diff: f64 = back
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-12);
        assert!((fwd.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn boost_translates_momentum_centroid() {
        let psi = unit_gaussian(grid2d());
        let boosted = boost(&psi, &[3.0, 0.0]).unwrap();
        let mean = boosted.momentum_centroid();
        assert_relative_eq!(mean[0], 3.0, epsilon = 1e-8);
        assert!(mean[1].abs() <= 1e-8);
    }

    #[test]
    fn boost_rejects_aliasing() {
        let psi = unit_gaussian(grid2d());
        let nyq = psi.grid.nyquist();
        assert!(matches!(
            boost(&psi, &[nyq, 0.0]),
            Err(CoreError::AliasingRisk { .. })
        ));
    }

    #[test]
    fn momentum_commutes_with_boost_up_to_shift() {
        // p_j (e^{ivx} psi) = e^{ivx} (p_j + v_j) psi
        let grid = grid2d();
        let psi = WaveFunction::gaussian(grid, &[0.2, -0.1], 0.9, &[0.5, 0.3]).unwrap();
        let v = [2.0, -1.0];
        let lhs = apply_momentum(&boost(&psi, &v).unwrap(), Axis(0)).unwrap();
        let p_psi = apply_momentum(&psi, Axis(0)).unwrap();
        let mut amps = p_psi.amplitudes().to_vec();
        for (i, z) in amps.iter_mut().enumerate() {
            *z += v[0] * psi.amplitudes()[i];
        }
        let shifted = WaveFunction::from_amplitudes(grid, amps).unwrap();
        let rhs = boost(&shifted, &v).unwrap();
        let diff: f64 = lhs
            .amplitudes()
            .iter()
            .zip(rhs.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff * grid.cell_volume().sqrt() <= 1e-10);
    }

    #[test]
    fn weighted_norm_k0_is_plain_norm() {
        let psi = unit_gaussian(grid2d());
        assert_relative_eq!(weighted_norm(&psi, 0).unwrap(), psi.norm(), epsilon = 1e-14);
    }

    // ||<x> g||^2 = 1 + <|x|^2> = 2 for the 2-D unit Gaussian.
    #[test]
    fn weighted_norm_k1_matches_analytic() {
        let psi = unit_gaussian(grid2d());
        assert_relative_eq!(
            weighted_norm(&psi, 1).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 1e-6
        );
    }

    #[test]
    fn weighted_norm_k2_grows_with_translation() {
        let grid = grid2d();
        let mut prev = 0.0;
        for shift in [0.0, 1.0, 2.0, 3.0] {
            let psi = WaveFunction::gaussian(grid, &[shift, 0.0], 0.8, &[0.0, 0.0]).unwrap();
            let val = weighted_norm(&psi, 2).unwrap();
            assert!(val > prev);
            prev = val;
        }
    }

    #[test]
    fn weighted_norm_rejects_boundary_contamination() {
        let grid = grid2d();
        let psi = WaveFunction::gaussian(grid, &[9.0, 0.0], 1.0, &[0.0, 0.0]).unwrap();
        assert!(matches!(
            weighted_norm(&psi, 1),
            Err(CoreError::BoundaryContamination { .. })
        ));
    }

    #[test]
    fn translate_moves_centroid() {
        let grid = grid2d();
        let psi = unit_gaussian(grid);
        let moved = translate(&psi, &[1.5, -0.75]).unwrap();
        let c = moved.position_centroid();
        assert_relative_eq!(c[0], 1.5, epsilon = 1e-8);
        assert_relative_eq!(c[1], -0.75, epsilon = 1e-8);
        assert!((moved.norm() - 1.0).abs() <= 1e-12);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        // Parseval and FFT round-trip as grid-wide properties over random packets.
        #[test]
        fn parseval_for_random_packets(
            cx in -2.0f64..2.0, cy in -2.0f64..2.0,
            w in 0.5f64..1.5,
            kx in -2.0f64..2.0, ky in -2.0f64..2.0,
        ) {
            let grid = GridSpec::new(2, 64, 10.0).unwrap();
            let psi = WaveFunction::gaussian(grid, &[cx, cy], w, &[kx, ky]).unwrap();
            let hat = psi.momentum_amplitudes();
            let weight = grid.cell_volume() / grid.n_points() as f64;
            let mom_norm = (crate::par::norm_sq(&hat) * weight).sqrt();
            prop_assert!((mom_norm - psi.norm()).abs() <= 1e-12 * psi.norm());

            let mut data = psi.amplitudes().to_vec();
            to_momentum(&grid, &mut data);
            to_position(&grid, &mut data);
            let err: f64 = data.iter().zip(psi.amplitudes())
                .map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-12 * psi.norm() / grid.cell_volume().sqrt());
        }
    }
}
