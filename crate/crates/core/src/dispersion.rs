//! Numerical dispersion from the eigenvalues of the one-step map of a small
//! Bloch-periodic vacuum cell.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{FieldSet, GridSpec};
use crate::material::{c0, MaterialGrid};
use crate::solver::{cfl_max_dt, SatConfig, Solver};

pub const DEFAULT_DIMENSION_CAP: usize = 5000;
/// Cells per axis of the periodic cell. 4^3 gives 990 unknowns; 8^3 would
/// give 5130 and exceed the default cap.
pub const DEFAULT_CELLS: usize = 4;
/// Candidates with `||lambda| - 1|` above this are discarded before the
/// nearest-wavenumber selection.
pub const CANDIDATE_FILTER: f64 = 0.5;

/// Bloch phase per axis, `alpha_i = k_i * L_i` with `L_i` the domain size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicPhase {
    pub alpha: [f64; 3],
}

impl PeriodicPhase {
    pub fn from_wavevector(grid: &GridSpec, k: [f64; 3]) -> Self {
        let l = grid.extent();
        PeriodicPhase { alpha: [k[0] * l[0], k[1] * l[1], k[2] * l[2]] }
    }
}

/// `(kx, ky, kz) = k0 (sin t cos p, sin t sin p, cos t)`.
pub fn wavevector(k0: f64, theta: f64, phi: f64) -> [f64; 3] {
    [k0 * theta.sin() * phi.cos(), k0 * theta.sin() * phi.sin(), k0 * theta.cos()]
}

/// Dense one-step map over `U = [Ex, Ey, Ez, Hx, Hy, Hz]`.
#[derive(Clone, Debug)]
pub struct AmplificationMatrix {
    pub matrix: DMatrix<Complex64>,
    pub dt: f64,
    pub grid: GridSpec,
    pub phase: PeriodicPhase,
}

/// Probe the time-marching map column by column: column `j` is one full
/// leapfrog step applied to the unit vector `e_j`.
pub fn build_amplification(grid: GridSpec, dt: f64, phase: PeriodicPhase, cap: usize) -> Result<AmplificationMatrix> {
    let dim = grid.sbp_node_count();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let sat = SatConfig::periodic(phase.alpha)?;
    let mut solver = Solver::<Complex64>::new(MaterialGrid::vacuum(grid), sat, dt)?;
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut unit = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        unit[j] = Complex64::new(1.0, 0.0);
        *solver.fields_mut() = FieldSet::from_slice(grid, &unit)?;
        unit[j] = Complex64::new(0.0, 0.0);
        solver.step();
        for (i, v) in solver.fields().to_vec().into_iter().enumerate() {
            matrix[(i, j)] = v;
        }
    }
    Ok(AmplificationMatrix { matrix, dt, grid, phase })
}

impl AmplificationMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// All eigenvalues (dense non-symmetric complex solve).
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let m = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| {
            let v = self.matrix[(i, j)];
            faer::c64::new(v.re, v.im)
        });
        let ev = m.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))?;
        Ok(ev.into_iter().map(|v| Complex64::new(v.re, v.im)).collect())
    }
}

/// Largest `|lambda| - 1` over a spectrum.
pub fn max_growth(eigs: &[Complex64]) -> f64 {
    eigs.iter().map(|l| l.norm() - 1.0).fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WavenumberSelection {
    /// `ln(lambda) / (j c dt)` for every eigenvalue passing the filter.
    pub candidates: Vec<Complex64>,
    pub selected: Complex64,
    pub selected_eigenvalue: Complex64,
}

/// Principal-branch numerical wavenumbers and the one nearest `k0`.
pub fn numerical_wavenumbers(eigs: &[Complex64], dt: f64, k0: f64) -> Result<WavenumberSelection> {
    let jc = Complex64::new(0.0, c0() * dt);
    let mut best: Option<(f64, Complex64, Complex64)> = None;
    let mut candidates = Vec::new();
    for &l in eigs {
        if !l.is_finite() || (l.norm() - 1.0).abs() > CANDIDATE_FILTER {
            continue;
        }
        let k = l.ln() / jc;
        candidates.push(k);
        let d = (k - k0).norm();
        if best.is_none_or(|(bd, _, _)| d < bd) {
            best = Some((d, k, l));
        }
    }
    let (_, selected, selected_eigenvalue) =
        best.ok_or_else(|| Error::Eigen("no eigenvalue near the unit circle".into()))?;
    Ok(WavenumberSelection { candidates, selected, selected_eigenvalue })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorMetrics {
    pub dispersion: f64,
    pub dissipation: f64,
    pub global: f64,
}

/// `|e^{-j k0 L} - e^{-j Re(k) L}|`, `|1 - e^{-j Im(k) L}|` and
/// `|e^{-j k0 L} - e^{-j k L}|` with `L = wavelength`.
pub fn error_metrics(k0: f64, k: Complex64, wavelength: f64) -> ErrorMetrics {
    let j = Complex64::new(0.0, 1.0);
    let exact = (-j * k0 * wavelength).exp();
    ErrorMetrics {
        dispersion: (exact - (-j * k.re * wavelength).exp()).norm(),
        dissipation: (Complex64::new(1.0, 0.0) - (-j * k.im * wavelength).exp()).norm(),
        global: (exact - (-j * k * wavelength).exp()).norm(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionResult {
    pub k0: f64,
    pub k_tilde: Complex64,
    pub wavelength: f64,
    pub errors: ErrorMetrics,
    /// Largest `|lambda| - 1` over the full spectrum.
    pub max_growth: f64,
}

/// Full analysis for one propagation direction.
pub fn analyze(grid: GridSpec, dt: f64, k0: f64, theta: f64, phi: f64, cap: usize) -> Result<DispersionResult> {
    let phase = PeriodicPhase::from_wavevector(&grid, wavevector(k0, theta, phi));
    let amp = build_amplification(grid, dt, phase, cap)?;
    let eigs = amp.eigenvalues()?;
    let sel = numerical_wavenumbers(&eigs, dt, k0)?;
    let wavelength = 2.0 * PI / k0;
    Ok(DispersionResult {
        k0,
        k_tilde: sel.selected,
        wavelength,
        errors: error_metrics(k0, sel.selected, wavelength),
        max_growth: max_growth(&eigs),
    })
}

/// Vacuum CFL limit of a grid.
pub fn vacuum_dt_max(grid: &GridSpec) -> f64 {
    cfl_max_dt(grid, &MaterialGrid::vacuum(*grid))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    /// `k0 h / 2 pi`.
    pub ratio: f64,
    pub result: DispersionResult,
}

/// Normal-incidence (z) sweep over `k0 h / 2 pi` on a cubic cell.
pub fn normal_sweep(cells: usize, h: f64, dt_factor: f64, ratios: &[f64], cap: usize) -> Result<Vec<SweepPoint>> {
    let grid = GridSpec::cubic(cells, h)?;
    let dt = dt_factor * vacuum_dt_max(&grid);
    ratios
        .iter()
        .map(|&ratio| {
            let k0 = 2.0 * PI * ratio / h;
            Ok(SweepPoint { ratio, result: analyze(grid, dt, k0, 0.0, 0.0, cap)? })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub theta: f64,
    pub phi: f64,
    pub result: DispersionResult,
}

/// Errors over a grid of directions, row-major in `(theta, phi)`.
pub fn angle_scan(
    thetas: &[f64],
    phis: &[f64],
    k0: f64,
    grid: GridSpec,
    dt: f64,
    cap: usize,
) -> Result<Vec<ScanPoint>> {
    let mut out = Vec::with_capacity(thetas.len() * phis.len());
    for &theta in thetas {
        for &phi in phis {
            out.push(ScanPoint { theta, phi, result: analyze(grid, dt, k0, theta, phi, cap)? });
        }
    }
    Ok(out)
}

pub fn scan_csv(points: &[ScanPoint]) -> String {
    let mut s = String::from("theta_deg,phi_deg,dispersion,dissipation,global,max_growth\n");
    for p in points {
        let e = &p.result.errors;
        let _ = writeln!(
            s,
            "{},{},{:e},{:e},{:e},{:e}",
            p.theta.to_degrees(),
            p.phi.to_degrees(),
            e.dispersion,
            e.dissipation,
            e.global,
            p.result.max_growth
        );
    }
    s
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("k0h_over_2pi,k_real,k_imag,dispersion,dissipation,global,max_growth\n");
    for p in points {
        let r = &p.result;
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e},{:e},{:e},{:e}",
            p.ratio,
            r.k_tilde.re,
            r.k_tilde.im,
            r.errors.dispersion,
            r.errors.dissipation,
            r.errors.global,
            r.max_growth
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembled::AssembledOperator;

    #[test]
    fn exact_wavenumber_gives_zero_error() {
        let k0 = 3.0;
        let e = error_metrics(k0, Complex64::new(k0, 0.0), 2.0 * PI / k0);
        assert!(e.dispersion < 1e-14 && e.dissipation == 0.0 && e.global < 1e-14);
        let e = error_metrics(k0, Complex64::new(k0, 0.01), 2.0 * PI / k0);
        assert!(e.dispersion < 1e-14);
        let l = 2.0 * PI / k0;
        let expect = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -0.01 * l).exp()).norm();
        assert!((e.dissipation - expect).abs() < 1e-15);
    }

    #[test]
    fn wavenumber_from_eigenvalue() {
        let (k0, dt) = (10.0, 1e-11);
        let w = k0 * c0() * dt;
        // forward mode exp(+j w dt) is the one selected
        let eigs = [Complex64::from_polar(1.0, w), Complex64::from_polar(1.0, -w), Complex64::new(0.0, 0.0)];
        let s = numerical_wavenumbers(&eigs, dt, k0).unwrap();
        assert_eq!(s.candidates.len(), 2);
        assert!((s.selected - k0).norm() < 1e-9);
        // the backward mode gives -k0, which the periodic error metrics
        // cannot tell apart from k0
        let s = numerical_wavenumbers(&eigs[1..], dt, k0).unwrap();
        assert!((s.selected + k0).norm() < 1e-9);
        let e = error_metrics(k0, s.selected, 2.0 * PI / k0);
        assert!(e.global < 1e-9);
        // a decaying eigenvalue has a nonzero imaginary part
        let s = numerical_wavenumbers(&[Complex64::from_polar(0.99, w)], dt, k0).unwrap();
        assert!(s.selected.im > 0.0);
        assert!(error_metrics(k0, s.selected, 2.0 * PI / k0).dissipation > 0.0);
        assert!(numerical_wavenumbers(&[Complex64::new(0.0, 0.0)], dt, k0).is_err());
    }

    #[test]
    fn probed_matrix_matches_assembled() {
        let grid = GridSpec::cubic(4, 0.01).unwrap();
        let dt = 0.5 * vacuum_dt_max(&grid);
        let phase = PeriodicPhase { alpha: [0.0, 0.3, PI / 4.0] };
        let amp = build_amplification(grid, dt, phase, DEFAULT_DIMENSION_CAP).unwrap();
        assert_eq!(amp.dim(), 990);
        let oracle = AssembledOperator::new(grid, &SatConfig::periodic(phase.alpha).unwrap()).unwrap();
        let dense = oracle.one_step_matrix(&MaterialGrid::vacuum(grid), dt).unwrap();
        let scale = dense.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        let diff = (&amp.matrix - &dense).iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        assert!(diff / scale < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let grid = GridSpec::cubic(8, 0.01).unwrap();
        assert_eq!(grid.sbp_node_count(), 5130);
        let err = build_amplification(grid, 1e-12, PeriodicPhase { alpha: [0.0; 3] }, DEFAULT_DIMENSION_CAP);
        assert!(matches!(err, Err(Error::DimensionCap { dim: 5130, cap: 5000 })));
    }

    #[test]
    fn zero_phase_spectrum() {
        let grid = GridSpec::cubic(4, 0.01).unwrap();
        let dt = 0.5 * vacuum_dt_max(&grid);
        let amp = build_amplification(grid, dt, PeriodicPhase { alpha: [0.0; 3] }, DEFAULT_DIMENSION_CAP).unwrap();
        // real matrix: spectrum closed under conjugation
        assert!(amp.matrix.iter().all(|v| v.im == 0.0));
        let eigs = amp.eigenvalues().unwrap();
        assert!(eigs.iter().any(|l| (l - 1.0).norm() < 1e-8));
        assert!(max_growth(&eigs) < 1e-9);
        let mut unmatched = 0;
        for l in &eigs {
            if !eigs.iter().any(|m| (m - l.conj()).norm() < 1e-6) {
                unmatched += 1;
            }
        }
        assert_eq!(unmatched, 0);
    }

    #[test]
    fn unstable_step_grows() {
        let grid = GridSpec::cubic(4, 0.01).unwrap();
        let dt = 1.5 * vacuum_dt_max(&grid);
        let amp = build_amplification(grid, dt, PeriodicPhase { alpha: [0.0, 0.0, PI / 4.0] }, DEFAULT_DIMENSION_CAP)
            .unwrap();
        assert!(max_growth(&amp.eigenvalues().unwrap()) > 1e-3);
    }
}
