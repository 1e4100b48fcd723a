//! Energy, spectra, plane power, S-parameters and point SAR.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{Component, FieldSet};
use crate::material::MaterialGrid;
use crate::scalar::FieldScalar;
use crate::solver::{node_weights, Solver};

/// Discrete energy split into the six component terms (Ex..Hz).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyReport {
    pub terms: [f64; 6],
    pub total: f64,
}

/// Cached `eps * w` and `mu * w` node weights for repeated energy
/// evaluation.
#[derive(Clone, Debug)]
pub struct EnergyMeter {
    weights: [Vec<f64>; 6],
}

impl EnergyMeter {
    pub fn new(materials: &MaterialGrid) -> Result<Self> {
        let grid = materials.grid;
        let ops = grid.operators()?;
        let mut weights: [Vec<f64>; 6] = Default::default();
        for c in Component::ALL {
            let lay = grid.layout(c);
            let w = node_weights(&ops, &lay);
            let mut out = Vec::with_capacity(w.len());
            let mut n = 0;
            for k in 0..lay.dims[2] {
                for j in 0..lay.dims[1] {
                    for i in 0..lay.dims[0] {
                        let m = materials.sample(c, [i, j, k])?;
                        out.push(w[n] * if c.is_electric() { m.eps } else { m.mu });
                        n += 1;
                    }
                }
            }
            weights[c.index()] = out;
        }
        Ok(EnergyMeter { weights })
    }

    pub fn weights(&self, c: Component) -> &[f64] {
        &self.weights[c.index()]
    }

    /// `1/2 sum w |u|^2` with every component taken at the same time level.
    pub fn collocated<T: FieldScalar>(&self, fields: &FieldSet<T>) -> EnergyReport {
        let mut r = EnergyReport::default();
        for c in Component::ALL {
            let w = &self.weights[c.index()];
            r.terms[c.index()] = 0.5 * fields.get(c).data.iter().zip(w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>();
        }
        r.total = r.terms.iter().sum();
        r
    }

    /// Leapfrog energy `1/2 sum eps w |E^n|^2 + 1/2 sum mu w Re(H^{n-1/2} . H^{n+1/2})`,
    /// which the lossless scheme conserves exactly.
    pub fn staggered<T: FieldScalar>(&self, solver: &Solver<T>) -> EnergyReport {
        let mut r = self.collocated_e(solver.fields());
        let next = solver.peek_next_h();
        for (a, c) in Component::H.iter().enumerate() {
            let w = &self.weights[c.index()];
            let old = &solver.fields().get(*c).data;
            r.terms[c.index()] =
                0.5 * old.iter().zip(&next[a].data).zip(w).map(|((o, n), w)| w * o.dot_re(*n)).sum::<f64>();
        }
        r.total = r.terms.iter().sum();
        r
    }

    fn collocated_e<T: FieldScalar>(&self, fields: &FieldSet<T>) -> EnergyReport {
        let mut r = EnergyReport::default();
        for c in Component::E {
            let w = &self.weights[c.index()];
            r.terms[c.index()] = 0.5 * fields.get(c).data.iter().zip(w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>();
        }
        r
    }
}

/// Staggered energy of the current solver state.
pub fn discrete_energy<T: FieldScalar>(solver: &Solver<T>) -> Result<EnergyReport> {
    Ok(EnergyMeter::new(solver.materials())?.staggered(solver))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    None,
    Hann,
}

impl Window {
    pub fn parse(s: &str) -> Option<Window> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "rect" => Some(Window::None),
            "hann" => Some(Window::Hann),
            _ => None,
        }
    }
}

/// Relative threshold for peak detection (fraction of the largest bin).
pub const PEAK_THRESHOLD: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumOptions {
    pub window: Window,
    /// Subtract the record mean before transforming (removes static fields
    /// left behind by a unipolar source).
    pub remove_mean: bool,
    /// Zero-pad to at least this many samples.
    pub pad_to: Option<usize>,
    pub threshold: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { window: Window::None, remove_mean: false, pad_to: None, threshold: PEAK_THRESHOLD }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    pub magnitude: f64,
    pub bin: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    /// Bin frequencies in Hz; bins above `n/2` are negative frequencies.
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    /// Peaks among the non-negative bins, strongest first.
    pub peaks: Vec<Peak>,
    pub bin_spacing: f64,
}

impl SpectrumResult {
    pub fn dominant(&self) -> Option<Peak> {
        self.peaks.first().copied()
    }

    /// Lowest-frequency detected peak.
    pub fn lowest(&self) -> Option<Peak> {
        self.peaks.iter().copied().min_by(|a, b| a.frequency.total_cmp(&b.frequency))
    }
}

/// DFT of a probe record sampled every `stride` steps of `dt`.
pub fn spectrum(record: &[Complex64], dt: f64, stride: usize, window: Window) -> Result<SpectrumResult> {
    spectrum_with(record, dt, stride, &SpectrumOptions { window, ..SpectrumOptions::default() })
}

pub fn spectrum_with(record: &[Complex64], dt: f64, stride: usize, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    if record.len() < 2 {
        return Err(Error::EmptyRecord);
    }
    let n0 = record.len();
    let mean = if opts.remove_mean { record.iter().sum::<Complex64>() / n0 as f64 } else { Complex64::new(0.0, 0.0) };
    let n = opts.pad_to.map_or(n0, |p| p.max(n0));
    let mut buf: Vec<Complex64> = record
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = match opts.window {
                Window::None => 1.0,
                Window::Hann => 0.5 - 0.5 * (2.0 * PI * i as f64 / (n0 - 1) as f64).cos(),
            };
            (v - mean) * w
        })
        .collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * dt * stride as f64);
    let frequencies = (0..n).map(|k| if k <= n / 2 { k as f64 * df } else { (k as f64 - n as f64) * df }).collect();
    let mags: Vec<f64> = buf[..=n / 2].iter().map(|v| v.norm()).collect();
    let peaks = find_peaks(&mags, df, opts.threshold);
    Ok(SpectrumResult { frequencies, amplitudes: buf, peaks, bin_spacing: df })
}

/// Local maxima above `threshold * max`, refined by a parabola through the
/// peak bin and its neighbours. Sorted by magnitude, largest first.
pub fn find_peaks(mags: &[f64], df: f64, threshold: f64) -> Vec<Peak> {
    let max = mags.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    for k in 0..mags.len() {
        let left = if k > 0 { mags[k - 1] } else { f64::NEG_INFINITY };
        let right = if k + 1 < mags.len() { mags[k + 1] } else { f64::NEG_INFINITY };
        if mags[k] < threshold * max || mags[k] <= left || mags[k] < right {
            continue;
        }
        let (mut offset, mut mag) = (0.0, mags[k]);
        if k > 0 && k + 1 < mags.len() {
            let denom = left - 2.0 * mags[k] + right;
            if denom < 0.0 {
                offset = 0.5 * (left - right) / denom;
                mag = mags[k] - 0.25 * (left - right) * offset;
            }
        }
        peaks.push(Peak { frequency: (k as f64 + offset) * df, magnitude: mag, bin: k });
    }
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    peaks
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSpectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<Complex64>,
}

/// `P(f) = sum_i F(E_i) conj(F(H_i)) dS_i` over co-located node records
/// (one time series per node).
pub fn plane_power(e: &[Vec<Complex64>], h: &[Vec<Complex64>], areas: &[f64], dt: f64) -> Result<PowerSpectrum> {
    if e.len() != h.len() || e.len() != areas.len() {
        return Err(Error::Dimension { expected: e.len(), actual: h.len().max(areas.len()) });
    }
    let n = e.first().map_or(0, |s| s.len());
    if n == 0 {
        return Err(Error::EmptyRecord);
    }
    if e.iter().chain(h).any(|s| s.len() != n) {
        return Err(Error::Config("plane records have mismatched lengths".into()));
    }
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut power = vec![Complex64::new(0.0, 0.0); n];
    for ((es, hs), ds) in e.iter().zip(h).zip(areas) {
        let mut fe = es.clone();
        let mut fh = hs.clone();
        fft.process(&mut fe);
        fft.process(&mut fh);
        for (p, (a, b)) in power.iter_mut().zip(fe.iter().zip(&fh)) {
            *p += a * b.conj() * *ds;
        }
    }
    let df = 1.0 / (n as f64 * dt);
    let frequencies = (0..n).map(|k| if k <= n / 2 { k as f64 * df } else { (k as f64 - n as f64) * df }).collect();
    Ok(PowerSpectrum { frequencies, power })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SParameters {
    pub s11: Vec<f64>,
    pub s21: Vec<f64>,
    /// False where the incident power fell below the floor; the ratios there
    /// are NaN.
    pub valid: Vec<bool>,
}

/// `S11 = |P_r / P_i|`, `S21 = |P_t / P_i|` (power-ratio magnitudes). Bins
/// with `|P_i| <= floor * max |P_i|` are masked.
pub fn s_parameters(p_inc: &[Complex64], p_ref: &[Complex64], p_tr: &[Complex64], floor: f64) -> Result<SParameters> {
    if p_ref.len() != p_inc.len() || p_tr.len() != p_inc.len() {
        return Err(Error::Dimension { expected: p_inc.len(), actual: p_ref.len().max(p_tr.len()) });
    }
    let max = p_inc.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let mut out = SParameters {
        s11: Vec::with_capacity(p_inc.len()),
        s21: Vec::with_capacity(p_inc.len()),
        valid: Vec::with_capacity(p_inc.len()),
    };
    for ((pi, pr), pt) in p_inc.iter().zip(p_ref).zip(p_tr) {
        let ok = pi.norm() > floor * max && pi.norm() > 0.0;
        out.valid.push(ok);
        out.s11.push(if ok { (pr / pi).norm() } else { f64::NAN });
        out.s21.push(if ok { (pt / pi).norm() } else { f64::NAN });
    }
    Ok(out)
}

pub fn db10(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn db20(x: f64) -> f64 {
    20.0 * x.log10()
}

/// Per-cell point SAR, `sigma |E|^2_max / (2 rho)`, with `|E|^2_max` the
/// run maximum of the cell-centre field.
pub fn point_sar(emax_sq: &[f64], materials: &MaterialGrid) -> Result<Vec<f64>> {
    let cells = materials.cells();
    if emax_sq.len() != cells.len() {
        return Err(Error::Dimension { expected: cells.len(), actual: emax_sq.len() });
    }
    cells
        .iter()
        .zip(emax_sq)
        .enumerate()
        .map(|(n, (m, e2))| {
            if m.sigma == 0.0 {
                Ok(0.0)
            } else if m.rho <= 0.0 {
                Err(Error::Config(format!("cell {n}: conductivity {} with zero density", m.sigma)))
            } else {
                Ok(m.sigma * e2 / (2.0 * m.rho))
            }
        })
        .collect()
}

/// Squared magnitude of the cell-centre E field of every cell, each
/// component averaged over the nodes surrounding the centre.
pub fn cell_center_e_sq<T: FieldScalar>(fields: &FieldSet<T>) -> Vec<f64> {
    let grid = fields.grid;
    let [nx, ny, nz] = grid.cells;
    let mut out = vec![0.0; nx * ny * nz];
    for c in Component::E {
        let f = fields.get(c);
        let a = c.direction().index();
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let cell = [i, j, k];
                    let mut acc = T::zero();
                    for corner in 0..4 {
                        let mut idx = [0; 3];
                        let mut bit = 0;
                        for ax in 0..3 {
                            if ax == a {
                                idx[ax] = cell[ax] + 1;
                            } else {
                                idx[ax] = cell[ax] + ((corner >> bit) & 1);
                                bit += 1;
                            }
                        }
                        acc += f.get(idx[0], idx[1], idx[2]);
                    }
                    out[i + nx * (j + ny * k)] += (acc * 0.25).norm_sqr();
                }
            }
        }
    }
    out
}

pub fn energy_csv(samples: &[(u64, f64, EnergyReport)]) -> String {
    let mut s = String::from("step,time,total,ex,ey,ez,hx,hy,hz\n");
    for (step, t, r) in samples {
        let _ = write!(s, "{step},{t:e},{:e}", r.total);
        for v in r.terms {
            let _ = write!(s, ",{v:e}");
        }
        s.push('\n');
    }
    s
}

pub fn spectrum_csv(sp: &SpectrumResult) -> String {
    let mut s = String::from("f,re,im,mag\n");
    let half = sp.amplitudes.len() / 2;
    for (f, a) in sp.frequencies.iter().zip(&sp.amplitudes).take(half + 1) {
        let _ = writeln!(s, "{f:e},{:e},{:e},{:e}", a.re, a.im, a.norm());
    }
    s
}

pub fn s_parameters_csv(freqs: &[f64], sp: &SParameters) -> String {
    let mut s = String::from("f,S11,S21,S11_dB10,S21_dB10,S11_dB20,S21_dB20\n");
    for (n, f) in freqs.iter().enumerate() {
        if !sp.valid[n] {
            continue;
        }
        let (a, b) = (sp.s11[n], sp.s21[n]);
        let _ = writeln!(s, "{f:e},{a:e},{b:e},{:e},{:e},{:e},{:e}", db10(a), db10(b), db20(a), db20(b));
    }
    s
}

pub fn sar_csv(materials: &MaterialGrid, sar: &[f64]) -> String {
    cell_csv(materials.grid.cells, sar, "sar")
}

/// `i,j,k,<column>` rows for per-cell values, x fastest.
pub fn cell_csv(cells: [usize; 3], values: &[f64], column: &str) -> String {
    let [nx, ny, _] = cells;
    let mut s = format!("i,j,k,{column}\n");
    for (n, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{v:e}", n % nx, (n / nx) % ny, n / (nx * ny));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembled::{to_vector, AssembledOperator};
    use crate::grid::GridSpec;
    use crate::material::{CellMaterial, EPS0};
    use crate::solver::SatConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tone(f: f64, dt: f64, n: usize) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new((2.0 * PI * f * i as f64 * dt).sin(), 0.0)).collect()
    }

    #[test]
    fn energy_of_single_node() {
        let g = GridSpec::cubic(8, 1.0).unwrap();
        let s = Solver::<f64>::new(MaterialGrid::vacuum(g), SatConfig::pec(), 1e-10).unwrap();
        assert_eq!(discrete_energy(&s).unwrap().total, 0.0);
        let mut s = s;
        // interior node: Minus and Plus weights are both h = 1
        s.fields_mut().get_mut(Component::Ex).set(4, 4, 4, 1.0);
        let r = discrete_energy(&s).unwrap();
        assert_eq!(r.terms[0], 0.5 * EPS0);
        assert_eq!(r.total, r.terms[0]);
    }

    #[test]
    fn collocated_energy_matches_dense_form() {
        let g = GridSpec::cubic(4, 0.1).unwrap();
        let mut mats = MaterialGrid::vacuum(g);
        mats.set_cell([1, 1, 1], CellMaterial { eps_r: 3.0, mu_r: 2.0, ..CellMaterial::VACUUM }).unwrap();
        let meter = EnergyMeter::new(&mats).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut fs = FieldSet::<f64>::zeros(g);
        for f in fs.fields.iter_mut() {
            f.data.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        }
        let dense = AssembledOperator::new(g, &SatConfig::pec()).unwrap();
        let m = dense.energy_weights(&mats).unwrap();
        let u = to_vector(&fs);
        let q: f64 = 0.5 * u.iter().zip(&m).map(|(v, w)| w * v.norm_sqr()).sum::<f64>();
        let r = meter.collocated(&fs);
        assert!((r.total - q).abs() <= 1e-13 * q);
        assert!(r.terms.iter().all(|t| *t >= 0.0));
    }

    #[test]
    fn staggered_energy_is_conserved() {
        let g = GridSpec::cubic(5, 0.1).unwrap();
        for sat in [SatConfig::pec(), SatConfig::pmc(), SatConfig::periodic([0.0; 3]).unwrap()] {
            let mats = MaterialGrid::vacuum(g);
            let dt = 0.9 * crate::solver::cfl_max_dt(&g, &mats);
            let mut s = Solver::<f64>::new(mats, sat, dt).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for f in s.fields_mut().fields.iter_mut() {
                f.data.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
            }
            let meter = EnergyMeter::new(s.materials()).unwrap();
            let e0 = meter.staggered(&s).total;
            s.advance(200);
            let e1 = meter.staggered(&s).total;
            assert!(((e1 - e0) / e0).abs() < 1e-11, "{e0} {e1}");
        }
    }

    #[test]
    fn single_tone_peak() {
        let dt = 1e-3;
        let n = 1000;
        // bin 50 -> 50 Hz
        let sp = spectrum(&tone(50.0, dt, n), dt, 1, Window::None).unwrap();
        assert_eq!(sp.peaks.len(), 1);
        assert!((sp.dominant().unwrap().frequency - 50.0).abs() < 1e-9);
        assert!((sp.bin_spacing - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_tones_and_interpolation() {
        let dt = 1e-3;
        let n = 2000;
        let rec: Vec<Complex64> = tone(40.3, dt, n).iter().zip(tone(120.0, dt, n)).map(|(a, b)| a + b * 0.5).collect();
        let sp = spectrum(&rec, dt, 1, Window::Hann).unwrap();
        assert_eq!(sp.peaks.len(), 2);
        assert!((sp.peaks[0].frequency - 40.3).abs() < 0.05);
        assert!((sp.peaks[1].frequency - 120.0).abs() < 0.05);
    }

    #[test]
    fn stride_sets_bin_spacing() {
        let sp = spectrum(&tone(5.0, 1e-3, 100), 1e-3, 4, Window::None).unwrap();
        assert!((sp.bin_spacing - 1.0 / (100.0 * 4e-3)).abs() < 1e-12);
    }

    #[test]
    fn parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rec: Vec<Complex64> = (0..257).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
        let sp = spectrum(&rec, 1.0, 1, Window::None).unwrap();
        let t: f64 = rec.iter().map(|v| v.norm_sqr()).sum();
        let f: f64 = sp.amplitudes.iter().map(|v| v.norm_sqr()).sum::<f64>() / rec.len() as f64;
        assert!((t - f).abs() <= 1e-10 * t);
    }

    #[test]
    fn empty_record() {
        assert_eq!(spectrum(&[], 1.0, 1, Window::None), Err(Error::EmptyRecord));
    }

    #[test]
    fn plane_power_cases() {
        let (dt, n) = (1e-3, 100);
        let e = vec![tone(10.0, dt, n)];
        let zero = vec![vec![Complex64::new(0.0, 0.0); n]];
        let p = plane_power(&e, &zero, &[1.0], dt).unwrap();
        assert!(p.power.iter().all(|v| v.norm() == 0.0));

        // E = eta H over area A: |P| = eta |F(H)|^2 A at the tone bin
        let eta = 376.73;
        let area = 0.25;
        let h = tone(10.0, dt, n);
        let e: Vec<Complex64> = h.iter().map(|v| v * eta).collect();
        let p = plane_power(std::slice::from_ref(&e), std::slice::from_ref(&h), &[area], dt).unwrap();
        let fh = (n as f64) / 2.0; // 10 Hz sits in bin 1
        assert!((p.power[1].norm() - eta * fh * fh * area).abs() < 1e-6 * eta * fh * fh * area);
        assert!(p.power[1].re > 0.0);
        let back: Vec<Complex64> = h.iter().map(|v| -v).collect();
        let q = plane_power(&[e], &[back], &[area], dt).unwrap();
        assert!((q.power[1].re + p.power[1].re).abs() < 1e-9 * p.power[1].re);
        assert!(plane_power(&[tone(1.0, dt, 10)], &[tone(1.0, dt, 11)], &[1.0], dt).is_err());
    }

    #[test]
    fn s_parameter_identities() {
        let pi = vec![Complex64::new(2.0, 1.0), Complex64::new(0.0, 0.0)];
        let zero = vec![Complex64::new(0.0, 0.0); 2];
        let s = s_parameters(&pi, &zero, &pi, 1e-6).unwrap();
        assert_eq!((s.s21[0], s.s11[0]), (1.0, 0.0));
        assert!(!s.valid[1] && s.s11[1].is_nan());
        let s = s_parameters(&pi, &pi, &zero, 1e-6).unwrap();
        assert_eq!(s.s11[0], 1.0);
        let half: Vec<Complex64> = pi.iter().map(|p| p * 0.5).collect();
        let s = s_parameters(&pi, &half, &half, 1e-6).unwrap();
        assert!((s.s11[0] - 0.5).abs() < 1e-15 && (s.s21[0] - 0.5).abs() < 1e-15);
        assert!((db10(0.5) + 3.0103).abs() < 1e-4 && (db20(0.5) + 6.0206).abs() < 1e-4);
    }

    #[test]
    fn sar_cases() {
        let g = GridSpec::cubic(4, 0.1).unwrap();
        let mut m = MaterialGrid::vacuum(g);
        m.set_cell([0, 0, 0], CellMaterial { sigma: 2.0, rho: 1000.0, ..CellMaterial::VACUUM }).unwrap();
        let mut e2 = vec![1.0; 64];
        let sar = point_sar(&e2, &m).unwrap();
        assert!((sar[0] - 1e-3).abs() < 1e-15);
        assert_eq!(sar[1], 0.0);
        e2[0] = 4.0;
        assert!((point_sar(&e2, &m).unwrap()[0] - 4e-3).abs() < 1e-15);
        m.set_cell([1, 0, 0], CellMaterial { sigma: 1.0, rho: 0.0, ..CellMaterial::VACUUM }).unwrap();
        assert!(matches!(point_sar(&e2, &m), Err(Error::Config(_))));
    }

    #[test]
    fn cell_center_field() {
        let g = GridSpec::cubic(4, 0.1).unwrap();
        let mut fs = FieldSet::<f64>::zeros(g);
        fs.get_mut(Component::Ez).fill(2.0);
        let e2 = cell_center_e_sq(&fs);
        assert!(e2.iter().all(|v| (*v - 4.0).abs() < 1e-15));
        for f in fs.fields.iter_mut() {
            f.data.iter_mut().for_each(|v| *v = -*v);
        }
        assert_eq!(cell_center_e_sq(&fs), e2);
    }
}
