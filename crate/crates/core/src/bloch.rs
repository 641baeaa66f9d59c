//! Bloch states: coefficients of the well and barrier solutions, density and
//! region probabilities.
//!
//! In the canonical cell the state is `Psi = c1 f1 + c2 f2` in the well and
//! `Psi = cbar1 g1 + cbar2 g2` in the barrier, with `Psi(z + 2 pi) =
//! e^{i 2 pi P} Psi(z)` and unit norm over one period.

use num_complex::Complex;
use rayon::prelude::*;

use crate::basis::{barrier_pair, effective_kinetic, well_pair, Mode, SolutionPair};
use crate::dispersion::{g_quad, Band, GQuad};
use crate::error::{BlochError, Result};
use crate::potential::PotentialSpec;
use crate::quad::{integrate_adaptive, GaussLegendre};
use crate::real::Real;

/// Distance of `e^{i 2 pi P}` from `±1` below which the coefficient ratios are
/// taken from their closed-form edge limits.
pub const EDGE_SWITCH: f64 = 1e-6;
/// Absolute tolerance of the region integrals, relative to the norm.
pub const QUAD_TOL: f64 = 1e-12;
/// Fraction of the band width kept clear of each edge in energy scans.
pub const EDGE_INSET: f64 = 1e-4;
/// Smallest per-step decrease counted as a strict decrease of the barrier
/// probability.
pub const MONOTONE_TOL: f64 = 1e-8;

/// Which coefficient is held real and positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeCoefficient {
    /// `c1`, the amplitude of the even well solution.
    Even,
    /// `c2`, the amplitude of the odd well solution.
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateResiduals<T> {
    /// `|integral of |Psi|^2 - 1|` plus the quadrature error estimate.
    pub norm: T,
    /// Mismatch of `Psi` and `Psi'` across the well/barrier junction, relative.
    pub continuity: T,
    /// Mismatch of `Psi(z + 2 pi) = lambda Psi(z)` and its derivative, relative.
    pub bloch: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState<T> {
    pub spec: PotentialSpec<T>,
    pub mode: Mode,
    pub band_n: usize,
    pub energy: T,
    /// Quasimomentum in `[0, 1/2]`.
    pub quasimomentum: T,
    pub free: FreeCoefficient,
    pub c1: Complex<T>,
    pub c2: Complex<T>,
    pub cbar1: Complex<T>,
    pub cbar2: Complex<T>,
    pub well_prob: T,
    pub barrier_prob: T,
    pub residuals: StateResiduals<T>,
}

/// `e^{i 2 pi P}` from the junction matrix. The sine is built from the
/// products that vanish at the two kinds of edge, which keeps it accurate
/// where `cos 2 pi P` is close to `±1`.
pub fn bloch_phase<T: Real>(q: &GQuad<T>) -> Complex<T> {
    let two = T::lit(2.0);
    let cos = q.rhs_plus().max(-T::one()).min(T::one());
    let prod = -(q.g11 * q.g22) * (q.g12 * q.g21);
    let sin = two * prod.max(T::zero()).sqrt();
    let norm = (cos * cos + sin * sin).sqrt();
    Complex::new(cos / norm, sin / norm)
}

fn choose_free<T: Real>(band: &Band<T>, q: &GQuad<T>) -> FreeCoefficient {
    if band.follows_parity_rule() {
        return if band.is_even() {
            FreeCoefficient::Even
        } else {
            FreeCoefficient::Odd
        };
    }
    // edges out of the usual order: use whichever set has the larger denominators
    let even = q.g21.abs().min(q.g22.abs());
    let odd = q.g11.abs().min(q.g12.abs());
    if even >= odd {
        FreeCoefficient::Even
    } else {
        FreeCoefficient::Odd
    }
}

/// Unnormalised `(c1, c2, cbar1, cbar2)` with the free coefficient set to one.
pub fn raw_coefficients<T: Real>(q: &GQuad<T>, lambda: Complex<T>, free: FreeCoefficient) -> Result<[Complex<T>; 4]> {
    let one = Complex::new(T::one(), T::zero());
    let two = T::lit(2.0);
    let i = Complex::new(T::zero(), T::one());
    let sin = lambda.im;
    let scale = T::one().max(q.g11.abs().max(q.g12.abs()).max(q.g21.abs()).max(q.g22.abs()));
    let tiny = T::tol(1e-14) * scale;
    let guard = |g: T| {
        if g.abs() <= tiny {
            Err(BlochError::EdgeDegeneracy(q.energy.as_f64()))
        } else {
            Ok(g)
        }
    };
    let switch = T::lit(EDGE_SWITCH);
    match free {
        FreeCoefficient::Even => {
            let (g21, g22) = (guard(q.g21)?, guard(q.g22)?);
            let c2 = if (lambda - one).norm() > switch {
                (lambda + one) * q.g11 / ((lambda - one) * g21)
            } else {
                i * sin / (two * g21 * g22)
            };
            Ok([one, c2, (lambda + one) / (two * g21), (lambda - one) / (two * g22)])
        }
        FreeCoefficient::Odd => {
            let (g11, g12) = (guard(q.g11)?, guard(q.g12)?);
            let c1 = if (lambda + one).norm() > switch {
                (lambda - one) * q.g21 / ((lambda + one) * g11)
            } else {
                i * sin / (two * g11 * g12)
            };
            Ok([c1, one, (lambda - one) / (two * g11), (lambda + one) / (two * g12)])
        }
    }
}

fn combine<T: Real>(a: Complex<T>, b: Complex<T>, p: &SolutionPair<T>) -> (Complex<T>, Complex<T>) {
    (a * p.f1 + b * p.f2, a * p.df1 + b * p.df2)
}

/// Maps `z` into the canonical cell `[left, left + 2 pi)`.
fn into_cell<T: Real>(spec: &PotentialSpec<T>, z: T) -> T {
    let (left, _, _) = spec.cell_bounds();
    let two_pi = T::lit(2.0) * T::PI();
    let r = (z - left) % two_pi;
    let r = if r < T::zero() { r + two_pi } else { r };
    left + r
}

impl<T: Real> BlochState<T> {
    /// `(Psi, Psi')` from the well expansion at any `z` (extended analytically).
    pub fn psi_well(&self, z: T) -> Result<(Complex<T>, Complex<T>)> {
        let (wc, _) = self.spec.centers();
        let p = well_pair(&self.spec, self.mode, self.energy, z - wc)?;
        Ok(combine(self.c1, self.c2, &p))
    }

    /// `(Psi, Psi')` from the barrier expansion at any `z`.
    pub fn psi_barrier(&self, z: T) -> Result<(Complex<T>, Complex<T>)> {
        let (_, bc) = self.spec.centers();
        let p = barrier_pair(&self.spec, self.mode, self.energy, z - bc)?;
        Ok(combine(self.cbar1, self.cbar2, &p))
    }

    /// `(Psi, Psi')` at a point of the canonical cell.
    pub fn psi_in_cell(&self, z: T) -> Result<(Complex<T>, Complex<T>)> {
        let (_, junction, _) = self.spec.cell_bounds();
        if z < junction {
            self.psi_well(z)
        } else {
            self.psi_barrier(z)
        }
    }

    /// `|Psi(z)|^2`, which is periodic, at any `z`.
    pub fn density_at(&self, z: T) -> Result<T> {
        Ok(self.psi_in_cell(into_cell(&self.spec, z))?.0.norm_sqr())
    }

    /// `e^{i 2 pi P}`.
    pub fn lambda(&self) -> Complex<T> {
        let th = T::lit(2.0) * T::PI() * self.quasimomentum;
        Complex::new(th.cos(), th.sin())
    }

    /// Same state with every coefficient multiplied by `e^{i phi}`.
    pub fn with_phase(&self, phi: T) -> Self {
        let u = Complex::new(phi.cos(), phi.sin());
        Self {
            c1: self.c1 * u,
            c2: self.c2 * u,
            cbar1: self.cbar1 * u,
            cbar2: self.cbar2 * u,
            ..*self
        }
    }

    /// The time-reversed partner at quasimomentum `-P`.
    pub fn conjugate(&self) -> Self {
        Self {
            quasimomentum: -self.quasimomentum,
            c1: self.c1.conj(),
            c2: self.c2.conj(),
            cbar1: self.cbar1.conj(),
            cbar2: self.cbar2.conj(),
            ..*self
        }
    }

    /// Largest relative residual of `Psi'' + (E - U) Psi = 0` over `per_region`
    /// interior points of each region, with `Psi''` from a Richardson-extrapolated
    /// central difference of `Psi'`.
    pub fn ode_residual(&self, per_region: usize) -> Result<T> {
        let (left, junction, right) = self.spec.cell_bounds();
        let h = T::lit(1e-3);
        let mut worst = T::zero();
        let mut scale = T::zero();
        let mut rows = Vec::new();
        for (a, b, well) in [(left, junction, true), (junction, right, false)] {
            for k in 0..per_region {
                let t = (T::from_usize(k).unwrap() + T::lit(0.5)) / T::from_usize(per_region).unwrap();
                let z = a + (b - a) * t;
                let eval = |x: T| {
                    if well {
                        self.psi_well(x)
                    } else {
                        self.psi_barrier(x)
                    }
                };
                let d = |step: T| -> Result<Complex<T>> {
                    Ok((eval(z + step)?.1 - eval(z - step)?.1) / (T::lit(2.0) * step))
                };
                let (d1, d2) = (d(h)?, d(h * T::lit(0.5))?);
                let second = (d2 * T::lit(4.0) - d1) / T::lit(3.0);
                let q = effective_kinetic(&self.spec, self.mode, self.energy, z);
                let psi = eval(z)?.0;
                rows.push((second + psi * q).norm());
                scale = scale.max(second.norm()).max((psi * q).norm());
            }
        }
        for r in rows {
            worst = worst.max(r);
        }
        Ok(worst / scale.max(T::min_positive_value()))
    }
}

fn relative_mismatch<T: Real>(a: (Complex<T>, Complex<T>), b: (Complex<T>, Complex<T>)) -> T {
    let scale = a.0.norm().max(a.1.norm()).max(b.0.norm()).max(b.1.norm());
    let d = (a.0 - b.0).norm().max((a.1 - b.1).norm());
    if scale > T::zero() {
        d / scale
    } else {
        d
    }
}

/// Builds the normalised Bloch state of `band` at energy `e`.
pub fn assemble_state<T: Real>(e: T, band: &Band<T>, spec: &PotentialSpec<T>, mode: Mode) -> Result<BlochState<T>> {
    let slack = T::tol(1e-9) * T::one().max(e.abs());
    if e < band.e_left - slack || e > band.e_right + slack {
        return Err(BlochError::Domain(format!(
            "E={} outside band {} [{}, {}]",
            e.as_f64(),
            band.n,
            band.e_left.as_f64(),
            band.e_right.as_f64()
        )));
    }
    let q = g_quad(e, spec, mode)?;
    let r = q.rhs_plus();
    if r.abs() > T::one() + T::tol(1e-6) * T::one().max(r.abs()) {
        return Err(BlochError::Domain(format!(
            "E={} lies in a gap (rhs={})",
            e.as_f64(),
            r.as_f64()
        )));
    }
    let lambda = bloch_phase(&q);
    let free = choose_free(band, &q);
    let [c1, c2, cbar1, cbar2] = raw_coefficients(&q, lambda, free)?;
    let mut st = BlochState {
        spec: *spec,
        mode,
        band_n: band.n,
        energy: e,
        quasimomentum: lambda.im.atan2(lambda.re) / (T::lit(2.0) * T::PI()),
        free,
        c1,
        c2,
        cbar1,
        cbar2,
        well_prob: T::zero(),
        barrier_prob: T::zero(),
        residuals: StateResiduals::default(),
    };

    let (left, junction, right) = spec.cell_bounds();
    let rule = GaussLegendre::<T>::new(10);
    let mut dens_w = |z: T| Ok(st.psi_well(z)?.0.norm_sqr());
    let rough_w = rule.apply(&mut dens_w, left, junction)?;
    let mut dens_b = |z: T| Ok(st.psi_barrier(z)?.0.norm_sqr());
    let rough_b = rule.apply(&mut dens_b, junction, right)?;
    let tol = T::tol(QUAD_TOL) * (rough_w + rough_b);
    let iw = integrate_adaptive(|z| Ok(st.psi_well(z)?.0.norm_sqr()), left, junction, tol)?;
    let ib = integrate_adaptive(|z| Ok(st.psi_barrier(z)?.0.norm_sqr()), junction, right, tol)?;
    let total = iw.value + ib.value;
    if !(total > T::zero()) || !total.is_finite() {
        return Err(BlochError::NonFinite(format!("norm of the state at E={}", e.as_f64())));
    }
    let s = T::one() / total.sqrt();
    st.c1 = st.c1 * s;
    st.c2 = st.c2 * s;
    st.cbar1 = st.cbar1 * s;
    st.cbar2 = st.cbar2 * s;
    st.well_prob = iw.value / total;
    st.barrier_prob = ib.value / total;

    let cont = relative_mismatch(st.psi_well(junction)?, st.psi_barrier(junction)?);
    let start = st.psi_well(left)?;
    let end = st.psi_barrier(right)?;
    let bloch = relative_mismatch((start.0 * lambda, start.1 * lambda), end);
    st.residuals = StateResiduals {
        norm: (st.well_prob + st.barrier_prob - T::one()).abs() + (iw.error + ib.error) / total,
        continuity: cont,
        bloch,
    };
    Ok(st)
}

/// `|Psi|^2` on a grid of points (any `z`; the density is periodic).
pub fn evaluate_density<T: Real>(state: &BlochState<T>, z_grid: &[T]) -> Result<Vec<T>> {
    z_grid.iter().map(|&z| state.density_at(z)).collect()
}

/// Probability of finding the particle in the barrier region of one cell,
/// recomputed by quadrature.
pub fn barrier_probability<T: Real>(state: &BlochState<T>) -> Result<T> {
    let (_, junction, right) = state.spec.cell_bounds();
    Ok(integrate_adaptive(
        |z| Ok(state.psi_barrier(z)?.0.norm_sqr()),
        junction,
        right,
        T::tol(1e-10),
    )?
    .value)
}

/// Probability of finding the particle in the well region of one cell.
pub fn well_probability<T: Real>(state: &BlochState<T>) -> Result<T> {
    let (left, junction, _) = state.spec.cell_bounds();
    Ok(integrate_adaptive(|z| Ok(state.psi_well(z)?.0.norm_sqr()), left, junction, T::tol(1e-10))?.value)
}

/// `n` energies across a band, inset from each edge by `EDGE_INSET` of its width.
pub fn band_energies<T: Real>(band: &Band<T>, n: usize) -> Vec<T> {
    let inset = band.width() * T::lit(EDGE_INSET);
    let (a, b) = (band.e_left + inset, band.e_right - inset);
    match n {
        0 => Vec::new(),
        1 => vec![(a + b) * T::lit(0.5)],
        _ => (0..n)
            .map(|k| a + (b - a) * T::from_usize(k).unwrap() / T::from_usize(n - 1).unwrap())
            .collect(),
    }
}

/// `n` points spanning the canonical cell, both ends included.
pub fn cell_grid<T: Real>(spec: &PotentialSpec<T>, n: usize) -> Vec<T> {
    let (left, _, right) = spec.cell_bounds();
    match n {
        0 => Vec::new(),
        1 => vec![left],
        _ => (0..n)
            .map(|k| left + (right - left) * T::from_usize(k).unwrap() / T::from_usize(n - 1).unwrap())
            .collect(),
    }
}

/// Densities and barrier probabilities across one band.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySurface<T> {
    pub band: Band<T>,
    pub energies: Vec<T>,
    pub z_grid: Vec<T>,
    /// `density[i][j]` at `energies[i]`, `z_grid[j]`.
    pub density: Vec<Vec<T>>,
    pub barrier_prob: Vec<T>,
}

impl<T: Real> DensitySurface<T> {
    pub fn anomaly_ratio(&self) -> T {
        anomaly_ratio(&self.barrier_prob)
    }

    pub fn barrier_prob_decreasing(&self) -> bool {
        strictly_decreasing(&self.barrier_prob)
    }
}

/// Barrier probability at the bottom of the band over that at the top.
pub fn anomaly_ratio<T: Real>(barrier_prob: &[T]) -> T {
    match (barrier_prob.first(), barrier_prob.last()) {
        (Some(&a), Some(&b)) => a / b,
        _ => T::nan(),
    }
}

/// Every step lowers the value by more than `MONOTONE_TOL`.
pub fn strictly_decreasing<T: Real>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] - w[1] > T::lit(MONOTONE_TOL))
}

/// Assembled states at `n_energies` energies across `band`, in order.
pub fn band_states<T: Real>(
    spec: &PotentialSpec<T>,
    band: &Band<T>,
    n_energies: usize,
    mode: Mode,
) -> Result<Vec<BlochState<T>>> {
    band_energies(band, n_energies)
        .into_par_iter()
        .map(|e| assemble_state(e, band, spec, mode))
        .collect()
}

/// Density surface of `band` on an `n_energies` by `n_z` grid.
pub fn anomaly_scan<T: Real>(
    spec: &PotentialSpec<T>,
    band: &Band<T>,
    n_energies: usize,
    n_z: usize,
    mode: Mode,
) -> Result<DensitySurface<T>> {
    let z_grid = cell_grid(spec, n_z);
    let states = band_states(spec, band, n_energies, mode)?;
    let density = states
        .par_iter()
        .map(|s| evaluate_density(s, &z_grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensitySurface {
        band: *band,
        energies: states.iter().map(|s| s.energy).collect(),
        z_grid,
        density,
        barrier_prob: states.iter().map(|s| s.barrier_prob).collect(),
    })
}
