//! Pairs of independent Schrödinger solutions in the well and barrier
//! regions, with their z-derivatives.
//!
//! Every pair is normalised at the centre of its region,
//! `f1(0) = 1, f1'(0) = 0, f2(0) = 0, f2'(0) = 1`, so `f1` is even, `f2` is odd
//! and the Wronskian `f1 f2' - f1' f2` is identically one.
//!
//! Two evaluation modes exist. [`Mode::Exact`] uses confluent hypergeometric
//! functions of the true parabolic arcs. [`Mode::NearTop`] freezes the barrier
//! solutions at `E = V`, where they reduce to Bessel functions of order
//! `±1/4`, and replaces the well solutions by plane waves.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{BlochError, Result};
use crate::potential::{PotentialKind, PotentialSpec};
use crate::real::Real;
use crate::specfun::{bessel_j, gamma_fn, kummer_m_with_derivative};

/// Largest `|E - V| / sqrt(chi)` for which the frozen barrier solutions are
/// considered accurate.
pub const NEAR_TOP_DETUNING_LIMIT: f64 = 0.15;

/// Below this `|z2|` the near-top barrier pair is replaced by its limit.
const NEAR_TOP_ORIGIN_SWITCH: f64 = 1e-6;
/// Below this energy the plane-wave well pair uses `f2 = z1`.
const FREE_ENERGY_SWITCH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    NearTop,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::NearTop => write!(f, "neartop"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = BlochError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "neartop" | "near-top" | "near_top" => Ok(Mode::NearTop),
            other => Err(BlochError::Domain(format!("unknown mode {other:?}"))),
        }
    }
}

/// Values and derivatives of two independent solutions at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolutionPair<T> {
    pub f1: T,
    pub df1: T,
    pub f2: T,
    pub df2: T,
}

impl<T: Real> SolutionPair<T> {
    pub fn wronskian(&self) -> T {
        self.f1 * self.df2 - self.df1 * self.f2
    }

    /// The pair at the mirrored point `-z`, using the parity of each solution.
    pub fn mirrored(&self) -> Self {
        Self {
            f1: self.f1,
            df1: -self.df1,
            f2: -self.f2,
            df2: self.df2,
        }
    }

    fn center() -> Self {
        Self {
            f1: T::one(),
            df1: T::zero(),
            f2: T::zero(),
            df2: T::one(),
        }
    }
}

/// `alpha = (1 - E / sqrt(chi)) / 4`.
pub fn alpha_of<T: Real>(e: T, chi: T) -> Result<T> {
    if !(chi > T::zero()) {
        return Err(BlochError::Domain(format!(
            "chi must be positive, got {}",
            chi.as_f64()
        )));
    }
    Ok((T::one() - e / chi.sqrt()) * T::lit(0.25))
}

/// `beta = (1 - i (E - V) / sqrt(chi)) / 4`.
pub fn beta_of<T: Real>(e: T, v: T, chi: T) -> Result<Complex<T>> {
    if !(chi > T::zero()) {
        return Err(BlochError::Domain(format!(
            "chi must be positive, got {}",
            chi.as_f64()
        )));
    }
    let q = T::lit(0.25);
    Ok(Complex::new(q, -(e - v) / chi.sqrt() * q))
}

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Well-region pair from the parabolic-cylinder form of the solutions,
/// `f1 = e^{-x/2} M(alpha, 1/2; x)` and `f2 = z1 e^{-x/2} M(alpha + 1/2, 3/2; x)`
/// with `x = sqrt(chi) z1^2`.
pub fn well_pair_exact<T: Real>(e: T, chi: T, z1: T) -> Result<SolutionPair<T>> {
    let alpha = alpha_of(e, chi)?;
    let s = chi.sqrt();
    let x = s * z1 * z1;
    let damp = (-x * T::lit(0.5)).exp();
    let half = T::lit(0.5);
    let (m1, dm1) = kummer_m_with_derivative(re(alpha), re(half), re(x))?;
    let (m2, dm2) = kummer_m_with_derivative(re(alpha + half), re(T::lit(1.5)), re(x))?;
    let (m1, dm1, m2, dm2) = (m1.re, dm1.re, m2.re, dm2.re);
    let two_sz = T::lit(2.0) * s * z1;
    let sz = s * z1;
    let inner2 = damp * (-sz * m2 + two_sz * dm2);
    Ok(SolutionPair {
        f1: damp * m1,
        df1: damp * (-sz * m1 + two_sz * dm1),
        f2: z1 * damp * m2,
        df2: damp * m2 + z1 * inner2,
    })
}

/// Barrier-region pair in complex form together with the largest imaginary
/// part found among the four entries.
pub fn barrier_pair_exact_with_residue<T: Real>(e: T, v: T, chi: T, z2: T) -> Result<(SolutionPair<T>, T)> {
    let beta = beta_of(e, v, chi)?;
    let s = chi.sqrt();
    let sz2 = s * z2 * z2;
    let x = Complex::new(T::zero(), -sz2);
    let phase = Complex::new(T::zero(), sz2 * T::lit(0.5)).exp();
    let half = T::lit(0.5);
    let (m1, dm1) = kummer_m_with_derivative(beta, re(half), x)?;
    let (m2, dm2) = kummer_m_with_derivative(beta + half, re(T::lit(1.5)), x)?;
    // d(phase)/dz = i s z2 phase, dx/dz = -2 i s z2
    let i_sz = Complex::new(T::zero(), s * z2);
    let two_i_sz = i_sz * T::lit(2.0);
    let f1 = phase * m1;
    let df1 = phase * (i_sz * m1 - two_i_sz * dm1);
    let f2 = phase * m2 * z2;
    let df2 = phase * m2 + phase * (i_sz * m2 - two_i_sz * dm2) * z2;
    let residue = f1.im.abs().max(df1.im.abs()).max(f2.im.abs()).max(df2.im.abs());
    Ok((
        SolutionPair {
            f1: f1.re,
            df1: df1.re,
            f2: f2.re,
            df2: df2.re,
        },
        residue,
    ))
}

/// Barrier-region pair `f1 = e^{i x/2} M(beta, 1/2; -i x)`,
/// `f2 = z2 e^{i x/2} M(beta + 1/2, 3/2; -i x)` with `x = sqrt(chi) z2^2`.
///
/// The combination is real for real `E`; an imaginary residue above `1e-8`
/// means the kernel misbehaved and is reported as [`BlochError::Reality`].
pub fn barrier_pair_exact<T: Real>(e: T, v: T, chi: T, z2: T) -> Result<SolutionPair<T>> {
    let (pair, residue) = barrier_pair_exact_with_residue(e, v, chi, z2)?;
    if residue > T::tol(1e-8) {
        return Err(BlochError::Reality {
            residue: residue.as_f64(),
            z2: z2.as_f64(),
        });
    }
    Ok(pair)
}

/// Barrier pair at `E = V`, written with Bessel functions of order `±1/4`.
pub fn barrier_pair_neartop<T: Real>(chi: T, z2: T) -> Result<SolutionPair<T>> {
    if !(chi > T::zero()) {
        return Err(BlochError::Domain(format!(
            "chi must be positive, got {}",
            chi.as_f64()
        )));
    }
    if z2.abs() < T::lit(NEAR_TOP_ORIGIN_SWITCH) {
        let mut p = SolutionPair::center();
        p.f2 = z2;
        return Ok(p);
    }
    let s = chi.sqrt();
    let q = T::lit(0.25);
    let x = s * z2 * z2 * T::lit(0.5);
    let two_q = T::lit(2.0).powf(q);
    let g34 = gamma_fn(T::lit(0.75))?;
    let g54 = gamma_fn(T::lit(1.25))?;
    let jm14 = bessel_j(-q, x)?;
    let j34 = bessel_j(T::lit(0.75), x)?;
    let j14 = bessel_j(q, x)?;
    let j54 = bessel_j(T::lit(1.25), x)?;
    let xq = x.powf(q);
    let half_x_q = (x * T::lit(0.5)).powf(q);
    // d/dx [x^{-nu} J_nu(x)] = -x^{-nu} J_{nu+1}(x)
    Ok(SolutionPair {
        f1: g34 * half_x_q * jm14,
        df1: -g34 / two_q * xq * j34 * s * z2,
        f2: g54 * z2 / half_x_q * j14,
        df2: g54 * (j14 / half_x_q - two_q / xq * j54 * s * z2 * z2),
    })
}

/// Solutions of `psi'' + k2 psi = 0` (a flat segment with `k2 = E - U`).
pub fn flat_pair<T: Real>(k2: T, z: T) -> SolutionPair<T> {
    if k2 > T::zero() {
        let k = k2.sqrt();
        let (s, c) = (k * z).sin_cos();
        SolutionPair {
            f1: c,
            df1: -k * s,
            f2: s / k,
            df2: c,
        }
    } else if k2 < T::zero() {
        let kappa = (-k2).sqrt();
        let (s, c) = ((kappa * z).sinh(), (kappa * z).cosh());
        SolutionPair {
            f1: c,
            df1: kappa * s,
            f2: s / kappa,
            df2: c,
        }
    } else {
        SolutionPair {
            f1: T::one(),
            df1: T::zero(),
            f2: z,
            df2: T::one(),
        }
    }
}

/// Plane-wave well pair `cos(sqrt(E) z1)`, `sin(sqrt(E) z1) / sqrt(E)`.
pub fn well_pair_neartop<T: Real>(e: T, z1: T) -> Result<SolutionPair<T>> {
    if e < T::zero() {
        return Err(BlochError::Domain(format!(
            "near-top well pair needs E >= 0, got {}",
            e.as_f64()
        )));
    }
    let mut p = flat_pair(e, z1);
    if e < T::lit(FREE_ENERGY_SWITCH) {
        p.f2 = z1;
    }
    Ok(p)
}

/// Well pair for any supported potential and mode, at local coordinate
/// `z1` measured from the well centre.
pub fn well_pair<T: Real>(spec: &PotentialSpec<T>, mode: Mode, e: T, z1: T) -> Result<SolutionPair<T>> {
    match (spec.kind, mode) {
        (PotentialKind::KronigPenney, Mode::Exact) => Ok(flat_pair(e, z1)),
        (PotentialKind::KronigPenney, Mode::NearTop) => Err(BlochError::Unsupported(
            "near-top mode is defined only for the biparabolic potential".into(),
        )),
        (PotentialKind::Biparabolic, Mode::NearTop) => well_pair_neartop(e, z1),
        (PotentialKind::Biparabolic, Mode::Exact) => {
            if spec.chi == T::zero() {
                Ok(flat_pair(e, z1))
            } else {
                well_pair_exact(e, spec.chi, z1)
            }
        }
    }
}

/// Barrier pair for any supported potential and mode, at local coordinate
/// `z2` measured from the barrier centre.
pub fn barrier_pair<T: Real>(spec: &PotentialSpec<T>, mode: Mode, e: T, z2: T) -> Result<SolutionPair<T>> {
    match (spec.kind, mode) {
        (PotentialKind::KronigPenney, Mode::Exact) => Ok(flat_pair(e - spec.v, z2)),
        (PotentialKind::KronigPenney, Mode::NearTop) => Err(BlochError::Unsupported(
            "near-top mode is defined only for the biparabolic potential".into(),
        )),
        (PotentialKind::Biparabolic, _) if spec.chi == T::zero() => Ok(flat_pair(e - spec.v, z2)),
        (PotentialKind::Biparabolic, Mode::NearTop) => barrier_pair_neartop(spec.chi, z2),
        (PotentialKind::Biparabolic, Mode::Exact) => barrier_pair_exact(e, spec.v, spec.chi, z2),
    }
}

/// `E - U(z)` seen by the solutions of the given mode, on either region.
/// Near-top mode sees a flat well and a barrier frozen at `E = V`.
pub fn effective_kinetic<T: Real>(spec: &PotentialSpec<T>, mode: Mode, e: T, z: T) -> T {
    match mode {
        Mode::Exact => e - spec.eval(z),
        Mode::NearTop => {
            let two_pi = T::lit(2.0) * T::PI();
            let r = (z + T::PI()) % two_pi;
            let r = if r < T::zero() { r + two_pi } else { r };
            // distance to the nearest barrier centre
            let d = (r - T::PI()).abs();
            if d <= T::FRAC_PI_2() {
                spec.chi * d * d
            } else {
                e
            }
        }
    }
}

/// How far a state sits from the regime the near-top formulas assume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearTopValidity<T> {
    /// `|E - V| / sqrt(chi)`.
    pub detuning: T,
    pub barrier_ok: bool,
    /// Plane-wave well solutions need a deep potential, `chi >= 1`.
    pub well_ok: bool,
}

pub fn near_top_validity<T: Real>(spec: &PotentialSpec<T>, e: T) -> NearTopValidity<T> {
    let s = spec.chi.sqrt();
    let detuning = if s > T::zero() {
        (e - spec.v).abs() / s
    } else {
        T::infinity()
    };
    NearTopValidity {
        detuning,
        barrier_ok: detuning < T::lit(NEAR_TOP_DETUNING_LIMIT),
        well_ok: spec.chi >= T::one(),
    }
}
