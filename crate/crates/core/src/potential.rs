//! Periodic potentials on the scaled coordinate `z` (period `2 pi`).
//!
//! Cells are indexed by `m`, each covering `[(m - 1/2) pi, (m + 1/2) pi]`.
//! Even `m` are barrier-type cells centred on a potential maximum, odd `m`
//! are well-type cells centred on a minimum.

use serde::{Deserialize, Serialize};

use crate::error::{BlochError, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Biparabolic,
    KronigPenney,
}

/// Default barrier share of the period for the rectangular comparison
/// potential: a barrier of width `pi` and a well of width `pi`.
pub const DEFAULT_BARRIER_FRACTION: f64 = 0.5;

/// A periodic potential of height `v` (in recoil units) and its derived
/// constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec<T> {
    pub kind: PotentialKind,
    pub v: T,
    /// Curvature `2V / pi^2` of the parabolic arcs. Zero for Kronig-Penney.
    pub chi: T,
    /// Fraction of the period covered by the flat barrier (Kronig-Penney only).
    pub barrier_fraction: T,
}

impl<T: Real> PotentialSpec<T> {
    pub fn biparabolic(v: T) -> Result<Self> {
        make_biparabolic(v)
    }

    pub fn kronig_penney(v: T, barrier_fraction: T) -> Result<Self> {
        if !(v >= T::zero()) || !v.is_finite() {
            return Err(BlochError::Domain(format!(
                "potential height must be >= 0, got {}",
                v.as_f64()
            )));
        }
        if !(barrier_fraction > T::zero() && barrier_fraction < T::one()) {
            return Err(BlochError::Domain(format!(
                "barrier fraction must lie in (0, 1), got {}",
                barrier_fraction.as_f64()
            )));
        }
        Ok(Self {
            kind: PotentialKind::KronigPenney,
            v,
            chi: T::zero(),
            barrier_fraction,
        })
    }

    /// Half-width of the well region around its centre.
    pub fn well_half_width(&self) -> T {
        match self.kind {
            PotentialKind::Biparabolic => T::FRAC_PI_2(),
            PotentialKind::KronigPenney => T::PI() * (T::one() - self.barrier_fraction),
        }
    }

    /// Half-width of the barrier region around its centre.
    pub fn barrier_half_width(&self) -> T {
        match self.kind {
            PotentialKind::Biparabolic => T::FRAC_PI_2(),
            PotentialKind::KronigPenney => T::PI() * self.barrier_fraction,
        }
    }

    /// Well centre and barrier centre of the canonical cell.
    pub fn centers(&self) -> (T, T) {
        let two_pi = T::lit(2.0) * T::PI();
        (two_pi - self.barrier_half_width() - self.well_half_width(), two_pi)
    }

    /// Left end, well/barrier junction and right end of the canonical period.
    pub fn cell_bounds(&self) -> (T, T, T) {
        let two_pi = T::lit(2.0) * T::PI();
        let junction = two_pi - self.barrier_half_width();
        let left = junction - T::lit(2.0) * self.well_half_width();
        (left, junction, two_pi + self.barrier_half_width())
    }

    pub fn eval(&self, z: T) -> T {
        eval_potential(self, z)
    }
}

/// Biparabolic potential of height `v`, with `chi = 2V / pi^2`.
pub fn make_biparabolic<T: Real>(v: T) -> Result<PotentialSpec<T>> {
    if !(v >= T::zero()) || !v.is_finite() {
        return Err(BlochError::Domain(format!(
            "potential height must be >= 0, got {}",
            v.as_f64()
        )));
    }
    Ok(PotentialSpec {
        kind: PotentialKind::Biparabolic,
        v,
        chi: T::lit(2.0) * v / (T::PI() * T::PI()),
        barrier_fraction: T::lit(DEFAULT_BARRIER_FRACTION),
    })
}

/// Reduces `z` into `[-pi, pi)`, the period centred on a barrier maximum.
fn reduce_centered<T: Real>(z: T) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let r = (z + T::PI()) % two_pi;
    let r = if r < T::zero() { r + two_pi } else { r };
    r - T::PI()
}

/// Potential energy at any `z`.
pub fn eval_potential<T: Real>(spec: &PotentialSpec<T>, z: T) -> T {
    // |d| is the distance to the nearest barrier centre, in [0, pi].
    let d = reduce_centered(z).abs();
    match spec.kind {
        PotentialKind::Biparabolic => {
            if d <= T::FRAC_PI_2() {
                spec.v - spec.chi * d * d
            } else {
                let w = T::PI() - d;
                spec.chi * w * w
            }
        }
        PotentialKind::KronigPenney => {
            if d < spec.barrier_half_width() {
                spec.v
            } else {
                T::zero()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    WellI,
    BarrierII,
}

/// Region of a point in the canonical cell `[pi/2, 5pi/2)`. Junction points
/// belong to the region on their right.
pub fn region_of<T: Real>(z: T) -> RegionTag {
    if z < T::lit(1.5) * T::PI() {
        RegionTag::WellI
    } else {
        RegionTag::BarrierII
    }
}

#[derive(Serialize, Deserialize)]
struct PotentialJson {
    kind: PotentialKind,
    #[serde(rename = "V")]
    v: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    barrier_fraction: Option<f64>,
}

impl<T: Real> Serialize for PotentialSpec<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = PotentialJson {
            kind: self.kind,
            v: self.v.as_f64(),
            barrier_fraction: match self.kind {
                PotentialKind::Biparabolic => None,
                PotentialKind::KronigPenney => Some(self.barrier_fraction.as_f64()),
            },
        };
        j.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for PotentialSpec<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PotentialJson::deserialize(d)?;
        let spec = match j.kind {
            PotentialKind::Biparabolic => make_biparabolic(T::lit(j.v)),
            PotentialKind::KronigPenney => PotentialSpec::kronig_penney(
                T::lit(j.v),
                T::lit(j.barrier_fraction.unwrap_or(DEFAULT_BARRIER_FRACTION)),
            ),
        };
        spec.map_err(serde::de::Error::custom)
    }
}
