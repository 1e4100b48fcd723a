//! `sbpsat dispersion`: normal-incidence sweeps and angle scans.

use std::f64::consts::PI;

use sbpsat_core::dispersion::{self as disp, angle_scan, normal_sweep, scan_csv, sweep_csv, vacuum_dt_max};
use sbpsat_core::GridSpec;

#[derive(Clone, Debug, PartialEq)]
pub enum DispersionMode {
    /// `k0 h / 2 pi` values at normal incidence.
    Sweep(Vec<f64>),
    /// `n_theta x n_phi` directions over `[0, 90]` degrees at one `k0 h / 2 pi`.
    Scan { thetas: usize, phis: usize, ratio: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionOptions {
    pub cells: usize,
    pub h: f64,
    pub dt_factor: f64,
    pub cap: usize,
    pub mode: DispersionMode,
}

impl Default for DispersionOptions {
    fn default() -> Self {
        DispersionOptions {
            cells: disp::DEFAULT_CELLS,
            h: 0.01,
            dt_factor: 0.99,
            cap: disp::DEFAULT_DIMENSION_CAP,
            mode: DispersionMode::Sweep(vec![0.025, 0.05, 0.075, 0.1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionOutput {
    pub csv: String,
    pub rows: usize,
    /// Largest `|lambda| - 1` over every analysed point.
    pub max_growth: f64,
    pub warnings: Vec<String>,
}

/// Evenly spaced angles over `[0, pi/2]`.
pub fn angles(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| 0.5 * PI * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn run_dispersion(opts: &DispersionOptions) -> anyhow::Result<DispersionOutput> {
    let mut warnings = Vec::new();
    if opts.dt_factor >= 1.0 {
        warnings
            .push(format!("dt factor {} is at or above the CFL limit; stability is not guaranteed", opts.dt_factor));
    }
    let grid = GridSpec::cubic(opts.cells, opts.h)?;
    let (csv, rows, max_growth) = match &opts.mode {
        DispersionMode::Sweep(ratios) => {
            let pts = normal_sweep(opts.cells, opts.h, opts.dt_factor, ratios, opts.cap)
                .map_err(|e| cap_hint(e, opts.cells))?;
            let g = pts.iter().map(|p| p.result.max_growth).fold(f64::MIN, f64::max);
            (sweep_csv(&pts), pts.len(), g)
        }
        DispersionMode::Scan { thetas, phis, ratio } => {
            let k0 = 2.0 * PI * ratio / opts.h;
            let dt = opts.dt_factor * vacuum_dt_max(&grid);
            let pts = angle_scan(&angles(*thetas), &angles(*phis), k0, grid, dt, opts.cap)
                .map_err(|e| cap_hint(e, opts.cells))?;
            let g = pts.iter().map(|p| p.result.max_growth).fold(f64::MIN, f64::max);
            (scan_csv(&pts), pts.len(), g)
        }
    };
    if max_growth > 1e-9 {
        warnings.push(format!("unstable: max |lambda| - 1 = {max_growth:e}"));
    }
    Ok(DispersionOutput { csv, rows, max_growth, warnings })
}

fn cap_hint(e: sbpsat_core::Error, cells: usize) -> anyhow::Error {
    match e {
        sbpsat_core::Error::DimensionCap { dim, cap } => anyhow::anyhow!(
            "amplification matrix dimension {dim} exceeds the cap {cap}; use fewer cells than {cells} (4 cells gives 990)"
        ),
        other => other.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_grid() {
        let a = angles(4);
        assert_eq!(a.len(), 4);
        assert_eq!(a[0], 0.0);
        assert!((a[3] - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn cap_error_suggests_fewer_cells() {
        let opts =
            DispersionOptions { cells: 8, mode: DispersionMode::Sweep(vec![0.05]), ..DispersionOptions::default() };
        let err = run_dispersion(&opts).unwrap_err().to_string();
        assert!(err.contains("fewer cells"), "{err}");
    }
}
