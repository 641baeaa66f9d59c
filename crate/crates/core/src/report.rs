//! Per-band summaries of how the barrier probability changes across a band.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::Mode;
use crate::bloch::{anomaly_ratio, band_states, strictly_decreasing};
use crate::dispersion::Band;
use crate::error::Result;
use crate::potential::PotentialSpec;
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyEntry {
    pub n: usize,
    pub e_left: f64,
    pub e_right: f64,
    /// Barrier probability at the lowest sampled energy.
    #[serde(rename = "pbar_min_E")]
    pub pbar_min_e: f64,
    /// Barrier probability at the highest sampled energy.
    #[serde(rename = "pbar_max_E")]
    pub pbar_max_e: f64,
    pub anomaly_ratio: f64,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyReport {
    pub potential: PotentialSpec<f64>,
    pub mode: Mode,
    pub bands: Vec<AnomalyEntry>,
}

pub fn anomaly_entry<T: Real>(
    spec: &PotentialSpec<T>,
    band: &Band<T>,
    n_energies: usize,
    mode: Mode,
) -> Result<AnomalyEntry> {
    let states = band_states(spec, band, n_energies, mode)?;
    let p: Vec<T> = states.iter().map(|s| s.barrier_prob).collect();
    Ok(AnomalyEntry {
        n: band.n,
        e_left: band.e_left.as_f64(),
        e_right: band.e_right.as_f64(),
        pbar_min_e: p.first().map_or(f64::NAN, |x| x.as_f64()),
        pbar_max_e: p.last().map_or(f64::NAN, |x| x.as_f64()),
        anomaly_ratio: anomaly_ratio(&p).as_f64(),
        monotone: strictly_decreasing(&p),
    })
}

/// One entry per band, in band order.
pub fn anomaly_report(
    spec: &PotentialSpec<f64>,
    bands: &[Band<f64>],
    n_energies: usize,
    mode: Mode,
) -> Result<AnomalyReport> {
    let entries = bands
        .par_iter()
        .map(|b| anomaly_entry(spec, b, n_energies, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnomalyReport {
        potential: *spec,
        mode,
        bands: entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{find_bands_default, top_sub_barrier_band};
    use crate::potential::make_biparabolic;

    #[test]
    fn report_fields() {
        let spec = make_biparabolic(1.4494).unwrap();
        let bands = find_bands_default(&spec, Mode::NearTop).unwrap();
        let top = top_sub_barrier_band(&bands, spec.v).unwrap();
        let r = anomaly_report(&spec, &[top], 6, Mode::NearTop).unwrap();
        assert_eq!(r.bands.len(), 1);
        let e = &r.bands[0];
        assert!(e.monotone && e.anomaly_ratio > 1.0);
        assert!((e.anomaly_ratio - e.pbar_min_e / e.pbar_max_e).abs() < 1e-12);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert!(v["bands"][0]["pbar_min_E"].is_number());
        assert_eq!(v["mode"], "neartop");
        assert_eq!(v["potential"]["V"], 1.4494);
    }
}
