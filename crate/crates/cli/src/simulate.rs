//! `sbpsat simulate`: run a scenario and write its outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbpsat_core::diagnostics::{self, Peak, SpectrumOptions};
use sbpsat_core::io::{field_csv, vtk_structured_points, write_text};
use sbpsat_core::run::{run, RunObserver, RunPlan};
use sbpsat_core::{Component, FieldScalar, FieldSet, MaterialGrid, Solver};

use crate::scenario::{to_text, Scenario, SnapshotFormat};

#[derive(Clone, Debug, Default)]
pub struct SimulateOptions {
    pub output: PathBuf,
    /// Overrides the scenario step count.
    pub steps: Option<u64>,
    /// Overrides the scenario progress interval.
    pub progress: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct SimulationSummary {
    pub dt: f64,
    pub steps_run: u64,
    pub diverged_at: Option<u64>,
    /// Detected spectrum peaks per point probe (only with `spectrum = true`).
    pub peaks: Vec<(String, Vec<Peak>)>,
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

impl SimulationSummary {
    pub fn complete(&self) -> bool {
        self.diverged_at.is_none()
    }
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        write_text(&path, contents)?;
        self.files.push(PathBuf::from(name));
        Ok(())
    }
}

struct Observer<'a, 'b> {
    writer: &'a mut Writer<'b>,
    components: Vec<Component>,
    format: SnapshotFormat,
    progress: u64,
}

impl<T: FieldScalar> RunObserver<T> for Observer<'_, '_> {
    fn snapshot(&mut self, step: u64, fields: &FieldSet<T>) -> sbpsat_core::Result<()> {
        for &c in &self.components {
            let stem = format!("snapshot_{}_{step:08}", c.name());
            let io = |e: anyhow::Error| sbpsat_core::Error::Io { path: stem.clone(), message: e.to_string() };
            if matches!(self.format, SnapshotFormat::Vtk | SnapshotFormat::Both) {
                self.writer.write(&format!("{stem}.vtk"), &vtk_structured_points(fields, c, step)).map_err(io)?;
            }
            if matches!(self.format, SnapshotFormat::Csv | SnapshotFormat::Both) {
                self.writer.write(&format!("{stem}.csv"), &field_csv(fields, c)).map_err(io)?;
            }
        }
        Ok(())
    }

    fn progress(&mut self, step: u64, total: u64) {
        if self.progress > 0 && (step.is_multiple_of(self.progress) || step == total) {
            eprintln!("step {step}/{total}");
        }
    }
}

/// Rough upper bound of the solver's heap use in bytes.
pub fn memory_estimate(sc: &Scenario, steps: u64) -> u64 {
    let g = &sc.grid;
    let nodes = g.sbp_node_count() as u64;
    let scalar = if sc.needs_complex() { 16 } else { 8 };
    // fields, coefficient arrays (ca and cb on E, cb on H), per-cell materials
    let mut total = nodes * scalar + nodes * 8 * 3 / 2 + g.cell_count() as u64 * 32;
    for p in &sc.probes {
        let samples = steps / p.stride as u64 + 1;
        total += match &p.kind {
            sbpsat_core::ProbeKind::PointField { .. } => samples * 24,
            sbpsat_core::ProbeKind::PlaneFlux { extent, .. } => {
                let n = (extent[0].len() + 1) * (extent[1].len() + 1) * 2;
                samples * n as u64 * 32
            }
        };
    }
    total
}

pub fn simulate(sc: &Scenario, opts: &SimulateOptions) -> anyhow::Result<SimulationSummary> {
    let materials = sc.material_grid()?;
    if sc.needs_complex() {
        simulate_with::<Complex64>(sc, materials, opts)
    } else {
        simulate_with::<f64>(sc, materials, opts)
    }
}

fn simulate_with<T: FieldScalar>(
    sc: &Scenario,
    materials: MaterialGrid,
    opts: &SimulateOptions,
) -> anyhow::Result<SimulationSummary> {
    let start = Instant::now();
    let steps = opts.steps.unwrap_or(sc.steps);
    let dt = sc.dt(&materials);
    let mut solver = Solver::<T>::new(materials, sc.sat_config()?, dt)?;
    for s in &sc.sources {
        solver.add_source(s.clone())?;
    }
    if let Some(a) = sc.random_init {
        let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
        for f in solver.fields_mut().fields.iter_mut() {
            for v in f.data.iter_mut() {
                let re = a * rng.random_range(-1.0..1.0);
                let im = if T::IS_COMPLEX { a * rng.random_range(-1.0..1.0) } else { 0.0 };
                *v = T::from_complex(Complex64::new(re, im));
            }
        }
    }
    std::fs::create_dir_all(&opts.output).with_context(|| format!("creating {}", opts.output.display()))?;
    let mut writer = Writer { dir: &opts.output, files: Vec::new() };
    let plan = RunPlan {
        steps,
        probes: sc.probes.clone(),
        energy_stride: sc.output.energy_stride,
        snapshot_steps: sc.output.snapshot_steps.clone(),
        track_peak_field: sc.output.sar,
        finite_check_stride: sc.output.finite_check,
    };
    let components = if sc.output.snapshot_components.is_empty() {
        Component::ALL.to_vec()
    } else {
        sc.output.snapshot_components.clone()
    };
    let mut observer = Observer {
        writer: &mut writer,
        components,
        format: sc.output.snapshot_format,
        progress: opts.progress.unwrap_or(sc.output.progress),
    };
    let art = run(&mut solver, &plan, &mut observer)?;

    let mut peaks = Vec::new();
    for rec in &art.probes {
        let mut s = String::from(if T::IS_COMPLEX { "time,re,im\n" } else { "time,value\n" });
        for (t, v) in rec.times.iter().zip(&rec.values) {
            if T::IS_COMPLEX {
                let _ = writeln!(s, "{t:e},{:e},{:e}", v.re, v.im);
            } else {
                let _ = writeln!(s, "{t:e},{:e}", v.re);
            }
        }
        writer.write(&format!("probe_{}.csv", rec.name), &s)?;
        if sc.output.spectrum && rec.values.len() >= 2 {
            let sp = diagnostics::spectrum_with(
                &rec.values,
                dt,
                rec.stride,
                &SpectrumOptions {
                    window: sc.output.window,
                    remove_mean: sc.output.remove_mean,
                    pad_to: sc.output.pad_to,
                    ..SpectrumOptions::default()
                },
            )?;
            writer.write(&format!("spectrum_{}.csv", rec.name), &diagnostics::spectrum_csv(&sp))?;
            let mut p = String::from("frequency,magnitude\n");
            for pk in &sp.peaks {
                let _ = writeln!(p, "{:e},{:e}", pk.frequency, pk.magnitude);
            }
            writer.write(&format!("peaks_{}.csv", rec.name), &p)?;
            peaks.push((rec.name.clone(), sp.peaks));
        }
    }
    for rec in &art.planes {
        if rec.times.is_empty() {
            continue;
        }
        let p = diagnostics::plane_power(&rec.e, &rec.h, &rec.areas, dt * rec.stride as f64)?;
        let mut s = String::from("f,re,im\n");
        let half = p.power.len() / 2;
        for (f, v) in p.frequencies.iter().zip(&p.power).take(half + 1) {
            let _ = writeln!(s, "{f:e},{:e},{:e}", v.re, v.im);
        }
        writer.write(&format!("power_{}.csv", rec.name), &s)?;
    }
    if !art.energy.is_empty() {
        let rows: Vec<_> = art.energy.iter().map(|e| (e.step, e.time, e.report)).collect();
        writer.write("energy.csv", &diagnostics::energy_csv(&rows))?;
    }
    if let Some(peak) = &art.peak_e_sq {
        let sar = diagnostics::point_sar(peak, solver.materials())?;
        writer.write("peak_e_sq.csv", &diagnostics::cell_csv(sc.grid.cells, peak, "e_sq_max"))?;
        writer.write("sar.csv", &diagnostics::sar_csv(solver.materials(), &sar))?;
    }

    let manifest_name = "manifest.scn";
    let mut resolved = sc.clone();
    resolved.steps = steps;
    let mut m = to_text(&resolved, dt);
    let mut files: Vec<String> = writer.files.iter().map(|p| p.display().to_string()).collect();
    files.push(manifest_name.into());
    let _ = writeln!(m, "\n[manifest]\nversion = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "wall_time_s = {:.3}", start.elapsed().as_secs_f64());
    let _ = writeln!(m, "memory_estimate_bytes = {}", memory_estimate(sc, steps));
    let _ = writeln!(m, "steps_run = {}", art.steps_run);
    let _ = writeln!(m, "complete = {}", art.diverged_at.is_none());
    if let Some(s) = art.diverged_at {
        let _ = writeln!(m, "diverged_at = {s}");
    }
    let _ = writeln!(m, "files = {}", files.join(" "));
    writer.write(manifest_name, &m)?;

    Ok(SimulationSummary {
        dt,
        steps_run: art.steps_run,
        diverged_at: art.diverged_at,
        peaks,
        files: writer.files.clone(),
        manifest: opts.output.join(manifest_name),
    })
}
