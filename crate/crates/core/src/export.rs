//! Text output: CSV tables with 12 significant digits and JSON documents.

use std::io::{self, Write};

use crate::bloch::DensitySurface;
use crate::dispersion::Band;
use crate::real::Real;

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// exponent notation outside `[1e-4, 1e12)`.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `E,z,density`, one row per sample, energies ascending then `z` ascending.
pub fn write_surface_csv<T: Real, W: Write>(s: &DensitySurface<T>, mut w: W) -> io::Result<()> {
    writeln!(w, "E,z,density")?;
    for (e, row) in s.energies.iter().zip(&s.density) {
        let e = fmt_g12(e.as_f64());
        for (z, d) in s.z_grid.iter().zip(row) {
            writeln!(w, "{e},{},{}", fmt_g12(z.as_f64()), fmt_g12(d.as_f64()))?;
        }
    }
    Ok(())
}

/// `E,barrier_prob`, one row per energy.
pub fn write_barrier_csv<T: Real, W: Write>(s: &DensitySurface<T>, mut w: W) -> io::Result<()> {
    writeln!(w, "E,barrier_prob")?;
    for (e, p) in s.energies.iter().zip(&s.barrier_prob) {
        writeln!(w, "{},{}", fmt_g12(e.as_f64()), fmt_g12(p.as_f64()))?;
    }
    Ok(())
}

pub fn write_bands_csv<T: Real, W: Write>(bands: &[Band<T>], mut w: W) -> io::Result<()> {
    writeln!(w, "n,e_left,e_right,left_cond,right_cond")?;
    for b in bands {
        writeln!(
            w,
            "{},{},{},{},{}",
            b.n,
            fmt_g12(b.e_left.as_f64()),
            fmt_g12(b.e_right.as_f64()),
            b.left_cond,
            b.right_cond
        )?;
    }
    Ok(())
}

pub fn bands_json<T: Real>(bands: &[Band<T>]) -> String {
    serde_json::to_string_pretty(bands).expect("bands serialise")
}

/// Path of the companion barrier-probability table for a surface written to
/// `path`: `surface.csv` becomes `surface_barrier.csv`.
pub fn companion_path(path: &std::path::Path) -> std::path::PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path.extension().map(|s| s.to_string_lossy().into_owned());
    let name = match ext {
        Some(ext) => format!("{stem}_barrier.{ext}"),
        None => format!("{stem}_barrier"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::EdgeCondition;
    use proptest::prelude::*;

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (13.64, "13.64"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0 * 1e-5, "6.66666666667e-06"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (-0.0001, "-0.0001"),
            (0.99999999999999, "1"),
            (9.9999999999999e-5, "0.0001"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g12(x), want, "x={x:e}");
        }
    }

    proptest! {
        #[test]
        fn g12_keeps_twelve_digits(x in -1e15f64..1e15) {
            let back: f64 = fmt_g12(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-12 * x.abs() + 1e-300);
        }
    }

    #[test]
    fn bands_table() {
        let b = vec![Band {
            n: 3,
            e_left: 13.6377f64,
            e_right: 18.6505,
            left_cond: EdgeCondition::G21,
            right_cond: EdgeCondition::G22,
        }];
        let mut out = Vec::new();
        write_bands_csv(&b, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "n,e_left,e_right,left_cond,right_cond\n3,13.6377,18.6505,G21,G22\n"
        );
        let v: serde_json::Value = serde_json::from_str(&bands_json(&b)).unwrap();
        assert_eq!(v[0]["left_cond"], "G21");
    }

    #[test]
    fn companion_names() {
        use std::path::Path;
        assert_eq!(companion_path(Path::new("out/s.csv")), Path::new("out/s_barrier.csv"));
        assert_eq!(companion_path(Path::new("s")), Path::new("s_barrier"));
    }
}
