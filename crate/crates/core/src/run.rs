//! Time-stepping driver with probes, energy trace, snapshots and SAR tracking.

use num_complex::Complex64;

use crate::diagnostics::{cell_center_e_sq, EnergyMeter, EnergyReport};
use crate::error::{Error, Result};
use crate::grid::{Axis, Component, FieldSet};
use crate::sbp::NodeGridKind;
use crate::scalar::FieldScalar;
use crate::solver::Solver;
use crate::source::{ProbeKind, ProbeSpec};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunPlan {
    pub steps: u64,
    pub probes: Vec<ProbeSpec>,
    /// Record the staggered energy every this many steps.
    pub energy_stride: Option<u64>,
    /// Step counts at which the observer receives a snapshot; 0 means the
    /// initial state.
    pub snapshot_steps: Vec<u64>,
    /// Track the running maximum of the cell-centre `|E|^2`.
    pub track_peak_field: bool,
    /// Check for non-finite values every this many steps (0 disables).
    pub finite_check_stride: u64,
}

/// Callbacks invoked while a run progresses.
pub trait RunObserver<T> {
    fn snapshot(&mut self, _step: u64, _fields: &FieldSet<T>) -> Result<()> {
        Ok(())
    }

    fn progress(&mut self, _step: u64, _total: u64) {}
}

impl<T> RunObserver<T> for () {}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRecord {
    pub name: String,
    pub component: Component,
    pub stride: usize,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Tangential field histories on a plane. Both tangential pairs are stored
/// in one list; the area weights of the `(E_c, H_b)` pair carry a minus sign
/// so that `sum F(E) conj(F(H)) dS` is the flux along the plane normal.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneRecord {
    pub name: String,
    pub axis: Axis,
    pub stride: usize,
    pub times: Vec<f64>,
    pub areas: Vec<f64>,
    pub e: Vec<Vec<Complex64>>,
    pub h: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergySample {
    pub step: u64,
    pub time: f64,
    pub report: EnergyReport,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunArtifacts {
    pub probes: Vec<ProbeRecord>,
    pub planes: Vec<PlaneRecord>,
    pub energy: Vec<EnergySample>,
    pub peak_e_sq: Option<Vec<f64>>,
    pub steps_run: u64,
    /// First checked step at which a non-finite value appeared.
    pub diverged_at: Option<u64>,
}

struct PlaneTap {
    /// Per recorded node: E flat index, and up to two H flat indices with weights.
    pairs: [(Component, Component); 2],
    nodes: [Vec<(usize, [(usize, f64); 2])>; 2],
}

impl PlaneTap {
    fn new<T: FieldScalar>(
        solver: &Solver<T>,
        axis: Axis,
        index: usize,
        extent: &[std::ops::Range<usize>; 2],
    ) -> (Self, Vec<f64>) {
        let grid = *solver.grid();
        let ops = solver.operators();
        let a = axis.index();
        let (b, c) = axis.cyclic();
        let pairs =
            [(Component::electric(b), Component::magnetic(c)), (Component::electric(c), Component::magnetic(b))];
        let n_a = grid.cells[a];
        let h_interp: [(usize, f64); 2] = if index == 0 {
            [(0, 1.0), (0, 0.0)]
        } else if index == n_a {
            [(n_a + 1, 1.0), (0, 0.0)]
        } else {
            [(index, 0.5), (index + 1, 0.5)]
        };
        let mut nodes: [Vec<_>; 2] = Default::default();
        let mut areas = Vec::new();
        for (p, (ec, hc)) in pairs.iter().enumerate() {
            let el = grid.layout(*ec);
            let hl = grid.layout(*hc);
            let mut w_axes: Vec<Vec<f64>> = Vec::new();
            let mut ranges = Vec::new();
            for (t, r) in [b, c].into_iter().zip(extent) {
                let kind = el.axis_kinds[t.index()];
                let h = grid.spacing[t.index()];
                let n = grid.cells[t.index()];
                let full = r.start == 0 && r.end == n + 1;
                let (x0, x1) = (r.start as f64 * h, (r.end - 1) as f64 * h);
                let count = kind.node_count(n);
                let norm = ops[t.index()].norm(kind);
                let w: Vec<f64> = (0..count)
                    .map(|m| {
                        if full {
                            return norm[m];
                        }
                        let x = kind.coordinate(m, n, h);
                        match kind {
                            NodeGridKind::Plus => {
                                let tol = 1e-9 * h;
                                if x < x0 - tol || x > x1 + tol {
                                    0.0
                                } else if (x - x0).abs() < tol || (x - x1).abs() < tol {
                                    0.5 * h
                                } else {
                                    h
                                }
                            }
                            NodeGridKind::Minus => {
                                if x > x0 && x < x1 && m > 0 && m < count - 1 {
                                    h
                                } else {
                                    0.0
                                }
                            }
                        }
                    })
                    .collect();
                ranges.push((0..count).filter(|m| w[*m] > 0.0).collect::<Vec<_>>());
                w_axes.push(w);
            }
            let sign = if p == 0 { 1.0 } else { -1.0 };
            for &mb in &ranges[0] {
                for &mc in &ranges[1] {
                    let mut node = [0; 3];
                    node[b.index()] = mb;
                    node[c.index()] = mc;
                    node[a] = index;
                    let e_idx = el.index(node[0], node[1], node[2]);
                    let hidx = h_interp.map(|(m, w)| {
                        let mut hn = node;
                        hn[a] = m;
                        (hl.index(hn[0], hn[1], hn[2]), w)
                    });
                    nodes[p].push((e_idx, hidx));
                    areas.push(sign * w_axes[0][mb] * w_axes[1][mc]);
                }
            }
        }
        (PlaneTap { pairs, nodes }, areas)
    }

    fn gather_h<T: FieldScalar>(&self, fields: &FieldSet<T>, out: &mut Vec<Complex64>) {
        out.clear();
        for (p, (_, hc)) in self.pairs.iter().enumerate() {
            let h = &fields.get(*hc).data;
            for (_, hs) in &self.nodes[p] {
                out.push(hs.iter().map(|(i, w)| h[*i].to_complex() * *w).sum());
            }
        }
    }

    fn gather_e<T: FieldScalar>(&self, fields: &FieldSet<T>, out: &mut Vec<Complex64>) {
        out.clear();
        for (p, (ec, _)) in self.pairs.iter().enumerate() {
            let e = &fields.get(*ec).data;
            out.extend(self.nodes[p].iter().map(|(i, _)| e[*i].to_complex()));
        }
    }
}

/// Advance `solver` by `plan.steps` steps, collecting the requested outputs.
///
/// Point probes sample after each step whose count is a multiple of the
/// stride (E at integer times, H at the half step before). Plane probes
/// sample E at integer level `n` and the time average of `H^{n-1/2}` and
/// `H^{n+1/2}`, interpolated onto the plane.
pub fn run<T: FieldScalar>(
    solver: &mut Solver<T>,
    plan: &RunPlan,
    observer: &mut dyn RunObserver<T>,
) -> Result<RunArtifacts> {
    let grid = *solver.grid();
    let dt = solver.dt();
    let mut points = Vec::new();
    let mut planes = Vec::new();
    let mut art = RunArtifacts::default();
    for p in &plan.probes {
        p.validate(&grid)?;
        match &p.kind {
            ProbeKind::PointField { component, node } => {
                let idx = grid.layout(*component).index(node[0], node[1], node[2]);
                points.push((*component, idx, p.stride as u64));
                art.probes.push(ProbeRecord {
                    name: p.name.clone(),
                    component: *component,
                    stride: p.stride,
                    times: Vec::new(),
                    values: Vec::new(),
                });
            }
            ProbeKind::PlaneFlux { axis, index, extent } => {
                let (tap, areas) = PlaneTap::new(solver, *axis, *index, extent);
                let n = areas.len();
                planes.push((tap, p.stride as u64));
                art.planes.push(PlaneRecord {
                    name: p.name.clone(),
                    axis: *axis,
                    stride: p.stride,
                    times: Vec::new(),
                    areas,
                    e: vec![Vec::new(); n],
                    h: vec![Vec::new(); n],
                });
            }
        }
    }
    if plan.energy_stride == Some(0) {
        return Err(Error::Config("energy stride must be >= 1".into()));
    }
    let meter = match plan.energy_stride {
        Some(_) => Some(EnergyMeter::new(solver.materials())?),
        None => None,
    };
    if plan.track_peak_field {
        art.peak_e_sq = Some(vec![0.0; grid.cell_count()]);
    }
    let start = solver.step_count();
    if plan.snapshot_steps.contains(&0) {
        observer.snapshot(0, solver.fields())?;
    }
    let mut hbuf = Vec::new();
    let mut ebuf = Vec::new();
    for s in 1..=plan.steps {
        let level = start + s - 1;
        let due: Vec<usize> =
            planes.iter().enumerate().filter(|(_, (_, st))| level.is_multiple_of(*st)).map(|(i, _)| i).collect();
        let mut pre: Vec<Vec<Complex64>> = Vec::new();
        for &i in &due {
            planes[i].0.gather_h(solver.fields(), &mut hbuf);
            pre.push(hbuf.clone());
        }
        solver.update_h();
        for (n, &i) in due.iter().enumerate() {
            let rec = &mut art.planes[i];
            planes[i].0.gather_h(solver.fields(), &mut hbuf);
            planes[i].0.gather_e(solver.fields(), &mut ebuf);
            rec.times.push(level as f64 * dt);
            for (m, (a, b)) in pre[n].iter().zip(&hbuf).enumerate() {
                rec.h[m].push((a + b) * 0.5);
                rec.e[m].push(ebuf[m]);
            }
        }
        solver.update_e();
        solver.advance_counter();
        let step = solver.step_count();
        for ((c, idx, stride), rec) in points.iter().zip(art.probes.iter_mut()) {
            if s % stride == 0 {
                let t = if c.is_electric() { step as f64 } else { step as f64 - 0.5 } * dt;
                rec.times.push(t);
                rec.values.push(solver.fields().get(*c).data[*idx].to_complex());
            }
        }
        if let (Some(meter), Some(stride)) = (&meter, plan.energy_stride) {
            if s % stride == 0 {
                art.energy.push(EnergySample { step, time: step as f64 * dt, report: meter.staggered(solver) });
            }
        }
        if let Some(peak) = art.peak_e_sq.as_mut() {
            for (p, v) in peak.iter_mut().zip(cell_center_e_sq(solver.fields())) {
                *p = p.max(v);
            }
        }
        if plan.snapshot_steps.contains(&s) {
            observer.snapshot(s, solver.fields())?;
        }
        art.steps_run = s;
        observer.progress(s, plan.steps);
        if plan.finite_check_stride > 0 && s % plan.finite_check_stride == 0 && !solver.is_finite() {
            art.diverged_at = Some(s);
            break;
        }
    }
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::plane_power;
    use crate::grid::GridSpec;
    use crate::material::MaterialGrid;
    use crate::solver::{cfl_max_dt, BoundaryKind, SatConfig};
    use crate::source::{SourceSpec, Waveform};

    fn cavity(n: usize) -> Solver<f64> {
        let g = GridSpec::cubic(n, 0.04).unwrap();
        let m = MaterialGrid::vacuum(g);
        let dt = 0.99 * cfl_max_dt(&g, &m);
        let mut s = Solver::new(m, SatConfig::pec(), dt).unwrap();
        let tw = 10.0 * dt;
        s.add_source(SourceSpec::point(
            Waveform::Gaussian { tw, t0: 4.0 * tw },
            Component::Ez,
            [n / 2, n / 2, n / 2 + 1],
            1.0,
        ))
        .unwrap();
        s
    }

    struct Snaps(Vec<u64>);

    impl RunObserver<f64> for Snaps {
        fn snapshot(&mut self, step: u64, _fields: &FieldSet<f64>) -> Result<()> {
            self.0.push(step);
            Ok(())
        }
    }

    #[test]
    fn zero_steps() {
        let mut s = cavity(6);
        let plan = RunPlan {
            probes: vec![ProbeSpec::point("p", Component::Ez, [1, 1, 1], 1)],
            energy_stride: Some(1),
            snapshot_steps: vec![0, 5],
            ..RunPlan::default()
        };
        let mut snaps = Snaps(Vec::new());
        let art = run(&mut s, &plan, &mut snaps).unwrap();
        assert!(art.probes[0].values.is_empty() && art.energy.is_empty());
        assert_eq!(snaps.0, vec![0]);
        assert_eq!(art.steps_run, 0);
    }

    #[test]
    fn probe_strides_and_times() {
        let mut s = cavity(6);
        let plan = RunPlan {
            steps: 10,
            probes: vec![
                ProbeSpec::point("e", Component::Ez, [3, 3, 4], 1),
                ProbeSpec::point("h", Component::Hx, [3, 3, 3], 3),
            ],
            snapshot_steps: vec![4, 10],
            ..RunPlan::default()
        };
        let mut snaps = Snaps(Vec::new());
        let art = run(&mut s, &plan, &mut snaps).unwrap();
        let dt = s.dt();
        assert_eq!(art.probes[0].values.len(), 10);
        assert_eq!(art.probes[1].values.len(), 3);
        assert!((art.probes[1].times[0] - 2.5 * dt).abs() < 1e-25);
        assert_eq!(snaps.0, vec![4, 10]);
        // matches direct stepping
        let mut t = cavity(6);
        t.advance(10);
        assert_eq!(art.probes[0].values[9].re, t.fields().get(Component::Ez).get(3, 3, 4));
    }

    #[test]
    fn energy_trace_is_flat_after_source() {
        let mut s = cavity(8);
        let plan = RunPlan { steps: 400, energy_stride: Some(10), ..RunPlan::default() };
        let art = run(&mut s, &plan, &mut ()).unwrap();
        let late: Vec<f64> = art.energy.iter().filter(|e| e.step >= 200).map(|e| e.report.total).collect();
        let (lo, hi) = late.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(lo > 0.0 && (hi - lo) / hi < 1e-11);
    }

    #[test]
    fn divergence_is_reported() {
        let g = GridSpec::cubic(5, 0.04).unwrap();
        let m = MaterialGrid::vacuum(g);
        let dt = 3.0 * cfl_max_dt(&g, &m);
        let mut s = Solver::<f64>::new(m, SatConfig::uniform(BoundaryKind::Pec), dt).unwrap();
        s.fields_mut().get_mut(Component::Ez).set(2, 2, 3, 1.0);
        let plan = RunPlan { steps: 5000, finite_check_stride: 10, ..RunPlan::default() };
        let art = run(&mut s, &plan, &mut ()).unwrap();
        assert!(art.diverged_at.is_some() && art.steps_run < 5000);
    }

    #[test]
    fn plane_flux_sign_and_zero() {
        let n = 10;
        let mut s = cavity(n);
        let full = [0..n + 1, 0..n + 1];
        let plan = RunPlan {
            steps: 30,
            probes: vec![
                ProbeSpec {
                    name: "up".into(),
                    kind: ProbeKind::PlaneFlux { axis: Axis::Z, index: 8, extent: full.clone() },
                    stride: 1,
                },
                ProbeSpec {
                    name: "wall".into(),
                    kind: ProbeKind::PlaneFlux { axis: Axis::Z, index: n, extent: full },
                    stride: 1,
                },
            ],
            track_peak_field: true,
            ..RunPlan::default()
        };
        let art = run(&mut s, &plan, &mut ()).unwrap();
        let dt = s.dt();
        let up = &art.planes[0];
        assert_eq!(up.e[0].len(), 30);
        // time-domain energy through the plane above the source is outgoing
        let flux: f64 = (0..30)
            .map(|t| up.e.iter().zip(&up.h).zip(&up.areas).map(|((e, h), a)| e[t].re * h[t].re * a).sum::<f64>())
            .sum();
        assert!(flux > 0.0);
        // tangential E vanishes on a PEC wall up to the weak boundary error
        let wall = &art.planes[1];
        let p = plane_power(&wall.e, &wall.h, &wall.areas, dt).unwrap();
        let q = plane_power(&up.e, &up.h, &up.areas, dt).unwrap();
        let pw: f64 = p.power.iter().map(|v| v.norm()).sum();
        let pu: f64 = q.power.iter().map(|v| v.norm()).sum();
        assert!(pw < 0.1 * pu, "{pw} {pu}");
        assert!(art.peak_e_sq.unwrap().iter().any(|v| *v > 0.0));
    }
}
