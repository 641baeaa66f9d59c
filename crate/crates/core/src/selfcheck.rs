//! Built-in invariant suite run by `blochlab selfcheck`.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{barrier_pair, well_pair, Mode};
use crate::bloch::{band_states, BlochState};
use crate::dispersion::{find_bands_default, g_quad_with, rhs_dispersion, Band, JunctionSign};
use crate::error::{BlochError, Result};
use crate::oracle::monodromy_of;
use crate::potential::{make_biparabolic, PotentialSpec};
use crate::specfun::{kummer_m, verify_bessel_hypergeometric_identity};
use num_complex::Complex;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelfcheckOptions {
    /// Fewer potentials and energies.
    pub quick: bool,
    /// Evaluates the junction matrix with the barrier derivative sign flipped.
    pub inject_sign_error: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryResult {
    pub name: &'static str,
    pub samples: usize,
    pub worst: f64,
    pub threshold: f64,
    pub passed: bool,
    /// First error raised while sampling, if any.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfcheckReport {
    pub categories: Vec<CategoryResult>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.categories.iter().all(|c| c.passed)
    }
}

impl std::fmt::Display for SelfcheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.categories {
            write!(
                f,
                "{:<5} {:<28} worst {:>10.3e}  threshold {:.0e}  samples {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.worst,
                c.threshold,
                c.samples
            )?;
            if let Some(e) = &c.error {
                write!(f, "  error: {e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn category(name: &'static str, threshold: f64, samples: Vec<Result<f64>>) -> CategoryResult {
    let mut worst = 0.0f64;
    let mut error = None;
    for s in &samples {
        match s {
            Ok(x) if x.is_nan() => worst = f64::NAN,
            Ok(x) => worst = worst.max(*x),
            Err(e) if error.is_none() => error = Some(e.to_string()),
            Err(_) => {}
        }
    }
    CategoryResult {
        name,
        samples: samples.len(),
        worst,
        threshold,
        passed: error.is_none() && worst <= threshold,
        error,
    }
}

/// Evenly spaced interior points of `(a, b)`.
fn interior(a: f64, b: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| a + (b - a) * k as f64 / (n + 1) as f64).collect()
}

struct Case {
    spec: PotentialSpec<f64>,
    mode: Mode,
    bands: Vec<Band<f64>>,
}

fn cases(quick: bool) -> Result<Vec<Case>> {
    let mut specs = vec![
        (make_biparabolic(1.4494)?, Mode::Exact),
        (make_biparabolic(1.4494)?, Mode::NearTop),
    ];
    if !quick {
        specs.push((make_biparabolic(18.65)?, Mode::Exact));
        specs.push((make_biparabolic(18.65)?, Mode::NearTop));
        specs.push((PotentialSpec::kronig_penney(1.668, 0.5)?, Mode::Exact));
    }
    specs
        .into_par_iter()
        .map(|(spec, mode)| {
            let bands = find_bands_default(&spec, mode)?;
            // the three highest bands that start below the barrier top
            let below: Vec<Band<f64>> = bands.iter().filter(|b| b.e_left < spec.v).copied().collect();
            let keep = below.len().saturating_sub(3);
            Ok(Case {
                spec,
                mode,
                bands: below[keep..].to_vec(),
            })
        })
        .collect()
}

fn specfun_samples(quick: bool) -> Vec<Result<f64>> {
    let n = if quick { 10 } else { 50 };
    let mut out = Vec::new();
    for nu in [-0.75, -0.25, 0.25, 0.75, 1.25] {
        for x in interior(0.0, 5.0, n) {
            out.push(verify_bessel_hypergeometric_identity(nu, x));
        }
    }
    // Kummer's transformation M(a, b, x) = e^x M(b - a, b, -x)
    for x in interior(-4.0, 4.0, n) {
        let a = Complex::new(0.25, -0.7);
        let b = Complex::new(0.5, 0.0);
        let z = Complex::new(0.0, x);
        out.push((|| {
            let lhs = kummer_m(a, b, z)?.value;
            let rhs = z.exp() * kummer_m(b - a, b, -z)?.value;
            Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
        })());
    }
    out
}

fn wronskian_samples(cases: &[Case]) -> Vec<Result<f64>> {
    let mut out = Vec::new();
    for c in cases {
        for b in &c.bands {
            for e in interior(b.e_left, b.e_right, 4) {
                for z in interior(0.0, std::f64::consts::FRAC_PI_2, 4) {
                    out.push(well_pair(&c.spec, c.mode, e, z).map(|p| (p.wronskian() - 1.0).abs()));
                    out.push(barrier_pair(&c.spec, c.mode, e, z).map(|p| (p.wronskian() - 1.0).abs()));
                }
            }
        }
    }
    out
}

fn dual_form_samples(cases: &[Case], sign: JunctionSign, n: usize) -> Vec<Result<f64>> {
    let mut out = Vec::new();
    for c in cases {
        for b in &c.bands {
            for e in interior(b.e_left, b.e_right, n) {
                out.push(g_quad_with(e, &c.spec, c.mode, sign).map(|q| q.determinant_gap()));
            }
        }
    }
    out
}

fn monodromy_samples(cases: &[Case], n: usize) -> Vec<Result<f64>> {
    cases
        .iter()
        .filter(|c| c.mode == Mode::Exact)
        .flat_map(|c| c.bands.iter().map(move |b| (c, b)))
        .flat_map(|(c, b)| interior(b.e_left, b.e_right, n).into_iter().map(move |e| (c, e)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, e)| {
            let r = rhs_dispersion(e, &c.spec, c.mode)?;
            let m = monodromy_of(&c.spec, e)?;
            Ok((r - m.half_trace()).abs())
        })
        .collect()
}

fn states(cases: &[Case], n: usize) -> Vec<Result<BlochState<f64>>> {
    let mut out = Vec::new();
    for c in cases {
        for b in &c.bands {
            match band_states(&c.spec, b, n, c.mode) {
                Ok(v) => out.extend(v.into_iter().map(Ok)),
                Err(e) => out.push(Err(e)),
            }
        }
    }
    out
}

pub fn run_selfcheck(opts: SelfcheckOptions) -> SelfcheckReport {
    let sign = if opts.inject_sign_error {
        JunctionSign::Flipped
    } else {
        JunctionSign::Standard
    };
    let mut categories = vec![category("specfun identities", 1e-12, specfun_samples(opts.quick))];
    let cases = match cases(opts.quick) {
        Ok(c) => c,
        Err(e) => {
            categories.push(category("band scan", 0.0, vec![Err(e)]));
            return SelfcheckReport { categories };
        }
    };
    let n = if opts.quick { 8 } else { 50 };
    categories.push(category("wronskians", 1e-9, wronskian_samples(&cases)));
    categories.push(category(
        "dual-form dispersion",
        1e-8,
        dual_form_samples(&cases, sign, n),
    ));
    categories.push(category("monodromy equivalence", 1e-6, monodromy_samples(&cases, n)));
    let st = states(&cases, if opts.quick { 4 } else { 10 });
    let integrity = |f: fn(&BlochState<f64>) -> Result<f64>| -> Vec<Result<f64>> {
        st.iter()
            .map(|s| s.as_ref().map_err(BlochError::clone).and_then(f))
            .collect()
    };
    categories.push(category("normalization", 1e-8, integrity(|s| Ok(s.residuals.norm))));
    categories.push(category(
        "continuity and translation",
        1e-8,
        integrity(|s| Ok(s.residuals.continuity.max(s.residuals.bloch))),
    ));
    categories.push(category("ode residual", 1e-6, integrity(|s| s.ode_residual(64))));
    SelfcheckReport { categories }
}
