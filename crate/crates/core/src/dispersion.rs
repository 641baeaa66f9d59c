//! Dispersion relation and band structure.
//!
//! With the well pair `f` evaluated at its right end and the barrier pair `g`
//! at its right end, the junction matrix is
//! `G_ij = f_i g_j' + f_i' g_j`. It satisfies `G12 G21 - G11 G22 = 1`, and the
//! half-trace of the monodromy takes the two equivalent forms
//! `cos 2 pi P = 1 + 2 G11 G22 = -1 + 2 G12 G21`.
//!
//! Band edges with `P = 0` are zeros of `G11` or `G22`; edges with `P = 1/2`
//! are zeros of `G12` or `G21`. Band `n` (counted from zero) runs from a zero
//! of `G11` to a zero of `G12` when `n` is even, and from a zero of `G21` to a
//! zero of `G22` when `n` is odd. This ordering holds for lattices deep
//! enough that every band descends from a well level of definite parity; for
//! very shallow lattices some gaps open with their edges in reversed order,
//! so the band finder records the element that actually vanished and
//! [`check_parity_rule`] reports any band that departs from it.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::basis::{barrier_pair, well_pair, Mode};
use crate::error::{BlochError, Result};
use crate::potential::{PotentialKind, PotentialSpec};
use crate::real::Real;
use crate::specfun::bessel_j;

/// Largest disagreement tolerated between the two forms of the dispersion.
pub const DUAL_FORM_TOL: f64 = 1e-6;
/// Width of the final bracket around each band edge.
pub const EDGE_TOL: f64 = 1e-10;
/// Same-kind edges closer than this are ordered by the parity rule.
pub const DEGENERATE_EDGE_GAP: f64 = 1e-9;
/// Slack above `V` still accepted for the top edge of a sub-barrier band,
/// relative to `max(V, 1)`.
pub const SUB_BARRIER_SLACK: f64 = 1e-3;

const MAX_RESCANS: usize = 6;

/// How the barrier derivative enters the junction matrix. Only
/// [`JunctionSign::Standard`] is physical; the other exists so the self-check
/// can prove it notices a sign error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JunctionSign {
    #[default]
    Standard,
    Flipped,
}

/// The junction matrix at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GQuad<T> {
    pub energy: T,
    pub g11: T,
    pub g12: T,
    pub g21: T,
    pub g22: T,
}

impl<T: Real> GQuad<T> {
    /// `1 + 2 G11 G22`.
    pub fn rhs_plus(&self) -> T {
        T::one() + T::lit(2.0) * self.g11 * self.g22
    }

    /// `-1 + 2 G12 G21`.
    pub fn rhs_minus(&self) -> T {
        -T::one() + T::lit(2.0) * self.g12 * self.g21
    }

    /// `G12 G21 - G11 G22 - 1`, relative to the size of the products.
    pub fn determinant_gap(&self) -> T {
        let scale = T::one().max((self.g12 * self.g21).abs() + (self.g11 * self.g22).abs());
        (self.g12 * self.g21 - self.g11 * self.g22 - T::one()).abs() / scale
    }

    pub fn get(&self, c: EdgeCondition) -> T {
        match c {
            EdgeCondition::G11 => self.g11,
            EdgeCondition::G12 => self.g12,
            EdgeCondition::G21 => self.g21,
            EdgeCondition::G22 => self.g22,
        }
    }
}

pub fn g_quad<T: Real>(e: T, spec: &PotentialSpec<T>, mode: Mode) -> Result<GQuad<T>> {
    g_quad_with(e, spec, mode, JunctionSign::Standard)
}

pub fn g_quad_with<T: Real>(e: T, spec: &PotentialSpec<T>, mode: Mode, sign: JunctionSign) -> Result<GQuad<T>> {
    let f = well_pair(spec, mode, e, spec.well_half_width())?;
    let g = barrier_pair(spec, mode, e, spec.barrier_half_width())?;
    let s = match sign {
        JunctionSign::Standard => T::one(),
        JunctionSign::Flipped => -T::one(),
    };
    let q = GQuad {
        energy: e,
        g11: f.f1 * g.df1 * s + f.df1 * g.f1,
        g12: f.f1 * g.df2 * s + f.df1 * g.f2,
        g21: f.f2 * g.df1 * s + f.df2 * g.f1,
        g22: f.f2 * g.df2 * s + f.df2 * g.f2,
    };
    for v in [q.g11, q.g12, q.g21, q.g22] {
        if !v.is_finite() {
            return Err(BlochError::NonFinite(format!("junction matrix at E={}", e.as_f64())));
        }
    }
    Ok(q)
}

/// Half-trace from the junction matrix, after checking that both forms agree.
pub fn rhs_from_quad<T: Real>(q: &GQuad<T>) -> Result<T> {
    let p = q.rhs_plus();
    let m = q.rhs_minus();
    let scale = T::one().max(p.abs());
    let gap = (p - m).abs() / scale;
    if !(gap <= T::tol(DUAL_FORM_TOL)) {
        return Err(BlochError::Inconsistency {
            energy: q.energy.as_f64(),
            gap: gap.as_f64(),
        });
    }
    Ok(p)
}

/// Right-hand side of `cos 2 pi P = rhs(E)`.
pub fn rhs_dispersion<T: Real>(e: T, spec: &PotentialSpec<T>, mode: Mode) -> Result<T> {
    match (spec.kind, mode) {
        (PotentialKind::Biparabolic, Mode::NearTop) => rhs_near_top(e, spec.chi),
        _ => rhs_from_quad(&g_quad(e, spec, mode)?),
    }
}

/// Near-top dispersion written out in Bessel functions of argument
/// `u = pi^2 sqrt(chi) / 8`.
pub fn rhs_near_top<T: Real>(e: T, chi: T) -> Result<T> {
    if !(chi > T::zero()) {
        return Err(BlochError::Domain("near-top dispersion needs chi > 0".into()));
    }
    if e < T::zero() {
        return Err(BlochError::Domain(format!(
            "near-top dispersion needs E >= 0, got {}",
            e.as_f64()
        )));
    }
    let pi = T::PI();
    let u = pi * pi * chi.sqrt() / T::lit(8.0);
    let jm14 = bessel_j(T::lit(-0.25), u)?;
    let jm34 = bessel_j(T::lit(-0.75), u)?;
    let j14 = bessel_j(T::lit(0.25), u)?;
    let j34 = bessel_j(T::lit(0.75), u)?;
    let k = e.sqrt();
    let (s, c) = (pi * k).sin_cos();
    let sinc = if pi * k < T::lit(1e-8) { T::one() } else { s / (pi * k) };
    let pref = (pi / T::lit(4.0)) / T::FRAC_PI_4().sin();
    let two = T::lit(2.0);
    Ok(pref
        * (two * u * (jm14 * jm34 - j14 * j34) * c
            - jm14 * j14 * (pi / two) * k * s
            - T::lit(4.0) * u * u * jm34 * j34 * two * sinc))
}

/// Which junction-matrix element vanishes at a band edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum EdgeCondition {
    G11,
    G12,
    G21,
    G22,
}

impl EdgeCondition {
    pub const ALL: [EdgeCondition; 4] = [Self::G11, Self::G12, Self::G21, Self::G22];

    /// Whether the edge sits at `P = 0` (`cos 2 pi P = +1`).
    pub fn is_zone_center(self) -> bool {
        matches!(self, Self::G11 | Self::G22)
    }

    pub fn expected_left(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Self::G11
        } else {
            Self::G21
        }
    }

    pub fn expected_right(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Self::G12
        } else {
            Self::G22
        }
    }
}

impl std::fmt::Display for EdgeCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// An allowed band. `n` counts bands from the bottom of the spectrum, including
/// any band that starts below the scanned range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band<T> {
    pub n: usize,
    pub e_left: T,
    pub e_right: T,
    pub left_cond: EdgeCondition,
    pub right_cond: EdgeCondition,
}

impl<T: Real> Band<T> {
    pub fn width(&self) -> T {
        self.e_right - self.e_left
    }

    pub fn contains(&self, e: T) -> bool {
        e >= self.e_left && e <= self.e_right
    }

    /// Even bands carry the even well solution with a free real amplitude.
    pub fn is_even(&self) -> bool {
        self.n.is_multiple_of(2)
    }

    /// Whether the edges are the elements the parity rule assigns to band `n`.
    pub fn follows_parity_rule(&self) -> bool {
        self.left_cond == EdgeCondition::expected_left(self.n)
            && self.right_cond == EdgeCondition::expected_right(self.n)
    }
}

#[derive(Serialize)]
struct BandJson {
    n: usize,
    e_left: f64,
    e_right: f64,
    left_cond: EdgeCondition,
    right_cond: EdgeCondition,
}

impl<T: Real> Serialize for Band<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BandJson {
            n: self.n,
            e_left: self.e_left.as_f64(),
            e_right: self.e_right.as_f64(),
            left_cond: self.left_cond,
            right_cond: self.right_cond,
        }
        .serialize(s)
    }
}

/// Energy range and grid step of a band scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions<T> {
    pub e_max: T,
    pub de: T,
}

impl<T: Real> ScanOptions<T> {
    /// Scans to `1.25 V + 1` with step `1e-3 max(V, 1)`.
    pub fn default_for(spec: &PotentialSpec<T>) -> Self {
        Self {
            e_max: T::lit(1.25) * spec.v + T::one(),
            de: default_step(spec.v),
        }
    }
}

pub fn default_step<T: Real>(v: T) -> T {
    T::lit(1e-3) * v.max(T::one())
}

#[derive(Debug, Clone, Copy)]
struct Edge<T> {
    e: T,
    cond: EdgeCondition,
}

/// Bisects a sign change of one junction element down to `EDGE_TOL`.
fn refine<T: Real>(
    spec: &PotentialSpec<T>,
    mode: Mode,
    cond: EdgeCondition,
    mut lo: T,
    mut hi: T,
    mut f_lo: T,
) -> Result<T> {
    let tol = T::tol(EDGE_TOL);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = g_quad(mid, spec, mode)?.get(cond);
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if (f_mid > T::zero()) == (f_lo > T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

fn scan_edges<T: Real>(spec: &PotentialSpec<T>, mode: Mode, e0: T, e_max: T, de: T) -> Result<(Vec<Edge<T>>, T)> {
    let steps = ((e_max - e0) / de).ceil().to_usize().unwrap_or(0).max(1);
    let grid: Vec<T> = (0..=steps)
        .map(|i| (e0 + de * T::from_usize(i).unwrap()).min(e_max))
        .collect();
    let quads: Vec<GQuad<T>> = grid
        .par_iter()
        .map(|&e| g_quad(e, spec, mode))
        .collect::<Result<Vec<_>>>()?;
    let rhs0 = rhs_from_quad(&quads[0])?;
    let mut brackets = Vec::new();
    for w in quads.windows(2) {
        for cond in EdgeCondition::ALL {
            let (a, b) = (w[0].get(cond), w[1].get(cond));
            if a == T::zero() && w[0].energy > e0 {
                continue;
            }
            if b == T::zero() || (a > T::zero()) != (b > T::zero()) {
                brackets.push((cond, w[0].energy, w[1].energy, a));
            }
        }
    }
    let mut edges: Vec<Edge<T>> = brackets
        .par_iter()
        .map(|&(cond, lo, hi, f_lo)| {
            let e = if f_lo == T::zero() {
                lo
            } else {
                refine(spec, mode, cond, lo, hi, f_lo)?
            };
            Ok(Edge { e, cond })
        })
        .collect::<Result<Vec<_>>>()?;
    edges.sort_by(|a, b| a.e.partial_cmp(&b.e).unwrap());
    Ok((edges, rhs0))
}

/// Result of pairing edges into bands, or a description of why the pattern
/// broke.
fn assemble<T: Real>(mut edges: Vec<Edge<T>>, starts_in_band: bool) -> std::result::Result<Vec<Band<T>>, String> {
    let gap = T::lit(DEGENERATE_EDGE_GAP);
    let mut bands = Vec::new();
    let mut n = 0usize;
    let mut i = 0usize;
    if starts_in_band {
        if edges.is_empty() {
            return Ok(bands);
        }
        // the band containing the scan start is cut off and only counted
        n = 1;
        i = 1;
    }
    while i + 1 < edges.len() {
        let (l, r) = (edges[i], edges[i + 1]);
        if l.cond.is_zone_center() == r.cond.is_zone_center() {
            return Err(format!("band {n} at E={} has edges of the same kind", l.e.as_f64()));
        }
        bands.push(Band {
            n,
            e_left: l.e,
            e_right: r.e,
            left_cond: l.cond,
            right_cond: r.cond,
        });
        // gap between band n and band n + 1
        if i + 2 < edges.len() {
            let next = edges[i + 2];
            if next.cond.is_zone_center() != r.cond.is_zone_center() {
                return Err(format!("gap above E={} has edges of different kinds", r.e.as_f64()));
            }
            if next.e - r.e < gap
                && r.cond != EdgeCondition::expected_right(n)
                && next.cond == EdgeCondition::expected_right(n)
            {
                edges.swap(i + 1, i + 2);
                bands.last_mut().unwrap().right_cond = next.cond;
            }
        }
        n += 1;
        i += 2;
    }
    // a single leftover edge is the bottom of a band cut off by the scan limit
    Ok(bands)
}

/// Fails on the first band whose edges break the parity rule.
pub fn check_parity_rule<T: Real>(bands: &[Band<T>]) -> Result<()> {
    for b in bands {
        if !b.follows_parity_rule() {
            return Err(BlochError::Scan(format!(
                "band {} [{}, {}] bounded by {}/{}, expected {}/{}",
                b.n,
                b.e_left.as_f64(),
                b.e_right.as_f64(),
                b.left_cond,
                b.right_cond,
                EdgeCondition::expected_left(b.n),
                EdgeCondition::expected_right(b.n)
            )));
        }
    }
    Ok(())
}

/// All bands that lie entirely inside `[0, e_max]`, in ascending order.
/// Errors if the edges cannot be paired into alternating bands and gaps even
/// after refining the grid.
pub fn find_bands<T: Real>(spec: &PotentialSpec<T>, mode: Mode, e_max: T, de: T) -> Result<Vec<Band<T>>> {
    if !(de > T::zero()) || !(e_max > T::zero()) {
        return Err(BlochError::Domain("scan range and step must be positive".into()));
    }
    let mut step = de;
    let mut last_err = String::new();
    for _ in 0..=MAX_RESCANS {
        // E = 0 lies below the spectrum whenever V > 0
        let e0 = T::zero();
        let (edges, rhs0) = scan_edges(spec, mode, e0, e_max, step)?;
        match assemble(edges, rhs0.abs() <= T::one()) {
            Ok(bands) => return Ok(bands),
            Err(msg) => {
                last_err = msg;
                step = step * T::lit(0.5);
            }
        }
    }
    Err(BlochError::Scan(last_err))
}

/// [`find_bands`] with the default range and step.
pub fn find_bands_default<T: Real>(spec: &PotentialSpec<T>, mode: Mode) -> Result<Vec<Band<T>>> {
    let o = ScanOptions::default_for(spec);
    find_bands(spec, mode, o.e_max, o.de)
}

/// Quasimomentum `P` in `[0, 1/2]` of an energy inside `band`.
pub fn quasimomentum_of<T: Real>(e: T, band: &Band<T>, spec: &PotentialSpec<T>, mode: Mode) -> Result<T> {
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
    let r = rhs_dispersion(e, spec, mode)?;
    cos_to_quasimomentum(r, e)
}

pub(crate) fn cos_to_quasimomentum<T: Real>(r: T, e: T) -> Result<T> {
    if r.abs() > T::one() + T::tol(1e-6) {
        return Err(BlochError::Domain(format!(
            "E={} lies in a gap (rhs={})",
            e.as_f64(),
            r.as_f64()
        )));
    }
    let r = r.max(-T::one()).min(T::one());
    Ok(r.acos() / (T::lit(2.0) * T::PI()))
}

/// Highest band starting below `V` whose top does not rise above it.
pub fn top_sub_barrier_band<T: Real>(bands: &[Band<T>], v: T) -> Option<Band<T>> {
    let limit = v + T::lit(SUB_BARRIER_SLACK) * v.max(T::one());
    bands.iter().rev().find(|b| b.e_left < v && b.e_right <= limit).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{kp_trace_analytic, monodromy_of};
    use crate::potential::make_biparabolic;

    #[test]
    fn junction_determinant() {
        for v in [1.4494f64, 18.65] {
            let spec = make_biparabolic(v).unwrap();
            for mode in [Mode::Exact, Mode::NearTop] {
                for e in [0.05, 0.4, 0.8 * v, v, 1.2 * v] {
                    let q = g_quad(e, &spec, mode).unwrap();
                    assert!(q.determinant_gap() < 1e-10, "v={v} mode={mode} e={e}");
                }
            }
        }
    }

    #[test]
    fn flipped_sign_breaks_the_identity() {
        let spec = make_biparabolic(1.4494f64).unwrap();
        let q = g_quad_with(0.7, &spec, Mode::Exact, JunctionSign::Flipped).unwrap();
        assert!(q.determinant_gap() > 1e-3);
        assert!(rhs_from_quad(&q).is_err());
    }

    #[test]
    fn matches_integrated_monodromy() {
        for v in [1.4494f64, 18.65] {
            let spec = make_biparabolic(v).unwrap();
            for e in [0.3, 0.51, 1.3, 0.97 * v, 1.1 * v] {
                let r = rhs_dispersion(e, &spec, Mode::Exact).unwrap();
                let m = monodromy_of(&spec, e).unwrap();
                let scale = 1.0f64.max(r.abs());
                assert!((r - m.half_trace()).abs() / scale < 1e-9, "v={v} e={e}");
            }
        }
    }

    #[test]
    fn near_top_closed_form_matches_junction_matrix() {
        for v in [1.4494f64, 18.65] {
            let spec = make_biparabolic(v).unwrap();
            for e in [0.0, 1e-9, 0.3, 1.0, v, 1.3 * v] {
                let a = rhs_near_top(e, spec.chi).unwrap();
                let b = rhs_from_quad(&g_quad(e, &spec, Mode::NearTop).unwrap()).unwrap();
                assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "v={v} e={e} {a} {b}");
            }
        }
    }

    #[test]
    fn kronig_penney_trace() {
        let spec = PotentialSpec::kronig_penney(1.668f64, 0.5).unwrap();
        for e in [0.1, 0.43, 1.5, 1.668, 2.5] {
            let r = rhs_dispersion(e, &spec, Mode::Exact).unwrap();
            assert!((r - kp_trace_analytic(e, 1.668, 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn free_limit() {
        let spec = make_biparabolic(0.0f64).unwrap();
        for e in [0.1, 0.25, 0.7, 2.0] {
            let r = rhs_dispersion(e, &spec, Mode::Exact).unwrap();
            assert!((r - (2.0 * std::f64::consts::PI * e.sqrt()).cos()).abs() < 1e-12);
        }
        // at vanishing height the gaps close at k = 1/2, 1, 3/2
        let spec = make_biparabolic(1e-6f64).unwrap();
        let bands = find_bands(&spec, Mode::Exact, 2.4, 1e-3).unwrap();
        assert!(bands.len() >= 3);
        for w in bands.windows(2) {
            assert!(w[1].e_left - w[0].e_right < 1e-3);
        }
        for w in bands.windows(2) {
            let g = w[1].e_left - w[0].e_right;
            assert!(
                (0.0..1e-5).contains(&g),
                "gap {g:e} between bands {} and {}",
                w[0].n,
                w[1].n
            );
        }
        for (b, k) in bands.iter().zip([0.5f64, 1.0, 1.5]) {
            assert!((b.e_right - k * k).abs() < 1e-5);
        }
    }

    #[test]
    fn shallow_lattice_reverses_the_third_gap() {
        let spec = make_biparabolic(1e-6f64).unwrap();
        let bands = find_bands(&spec, Mode::Exact, 2.4, 1e-3).unwrap();
        assert!(bands[0].follows_parity_rule() && bands[1].follows_parity_rule());
        let b2 = bands[2];
        assert_eq!((b2.left_cond, b2.right_cond), (EdgeCondition::G11, EdgeCondition::G21));
        assert!(check_parity_rule(&bands).is_err());
        // the reversal is real: G21 changes sign below the zero of G12
        let at = |e: f64| g_quad(e, &spec, Mode::Exact).unwrap();
        let e = b2.e_right + 5e-9;
        assert!(at(e).g21 > 0.0 && at(e).g12 < 0.0);
    }

    #[test]
    fn edges_satisfy_parity_and_dispersion() {
        let spec = make_biparabolic(18.65f64).unwrap();
        let bands = find_bands_default(&spec, Mode::Exact).unwrap();
        assert!(bands.len() >= 6);
        check_parity_rule(&bands).unwrap();
        let flips = |e: f64, c: EdgeCondition| {
            let lo = g_quad(e - 1e-9, &spec, Mode::Exact).unwrap().get(c);
            let hi = g_quad(e + 1e-9, &spec, Mode::Exact).unwrap().get(c);
            (lo > 0.0) != (hi > 0.0)
        };
        for b in &bands {
            assert!(flips(b.e_left, b.left_cond) && flips(b.e_right, b.right_cond), "{b:?}");
            // the outer dispersion magnitude reaches one at each edge
            let slope = |e: f64| {
                (rhs_dispersion(e + 1e-9, &spec, Mode::Exact).unwrap()
                    - rhs_dispersion(e - 1e-9, &spec, Mode::Exact).unwrap())
                .abs()
            };
            let rl = rhs_dispersion(b.e_left, &spec, Mode::Exact).unwrap();
            let rr = rhs_dispersion(b.e_right, &spec, Mode::Exact).unwrap();
            let want = |c: EdgeCondition| if c.is_zone_center() { 1.0 } else { -1.0 };
            assert!((rl - want(b.left_cond)).abs() <= slope(b.e_left) + 1e-9, "{b:?} {rl}");
            assert!((rr - want(b.right_cond)).abs() <= slope(b.e_right) + 1e-9, "{b:?} {rr}");
            let mid = 0.5 * (b.e_left + b.e_right);
            let p = quasimomentum_of(mid, b, &spec, Mode::Exact).unwrap();
            assert!(p > 0.0 && p < 0.5);
        }
    }

    #[test]
    fn near_top_bands_of_the_shallow_lattice() {
        let spec = make_biparabolic(1.4494f64).unwrap();
        let bands = find_bands_default(&spec, Mode::NearTop).unwrap();
        let top = top_sub_barrier_band(&bands, spec.v).unwrap();
        assert_eq!(top.n, 1);
        assert_eq!(
            (top.left_cond, top.right_cond),
            (EdgeCondition::G21, EdgeCondition::G22)
        );
        assert!((top.e_left - 0.3938).abs() < 1e-3);
        assert!((top.e_right - 1.4494).abs() < 1e-3);
    }

    #[test]
    fn band_json_shape() {
        let b = Band {
            n: 1,
            e_left: 0.5f64,
            e_right: 0.75,
            left_cond: EdgeCondition::G21,
            right_cond: EdgeCondition::G22,
        };
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(
            s,
            r#"{"n":1,"e_left":0.5,"e_right":0.75,"left_cond":"G21","right_cond":"G22"}"#
        );
    }
}
