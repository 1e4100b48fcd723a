//! Conventional Yee-grid FDTD with PEC walls, used as a reference for
//! storage and runtime comparisons.
//!
//! Component arrays use the Yee dimensions: a field sits on cell edges
//! (E) or faces (H) only, with no extra boundary nodes. Yee Minus index `m`
//! corresponds to SBP Minus index `m + 1`.

use crate::error::{Error, Result};
use crate::grid::{Axis, Component, Field3, GridSpec};
use crate::kernel::{apply_curl, CurlTerm, LineOperator};
use crate::material::MaterialGrid;
use crate::sbp::{NodeGridKind, StencilRow};
use crate::source::Waveform;

fn yee_rows(n: usize, h: f64, dest: NodeGridKind) -> Vec<StencilRow> {
    let inv = 1.0 / h;
    let row = |start, len| StencilRow { start, len, coef: [-inv, inv, 0.0] };
    match dest {
        NodeGridKind::Plus => (0..=n).map(|i| if i == 0 || i == n { row(0, 0) } else { row(i - 1, 2) }).collect(),
        NodeGridKind::Minus => (0..n).map(|m| row(m, 2)).collect(),
    }
}

struct PointSource {
    waveform: Waveform,
    amplitude: f64,
    component: usize,
    index: usize,
}

pub struct YeeSolver {
    grid: GridSpec,
    dt: f64,
    step: u64,
    fields: [Field3<f64>; 6],
    line_ops: [[LineOperator; 2]; 3],
    e_ca: [Vec<f64>; 3],
    e_cb: [Vec<f64>; 3],
    h_cb: [Vec<f64>; 3],
    sources: Vec<PointSource>,
}

impl YeeSolver {
    pub fn new(materials: &MaterialGrid, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("time step {dt} must be positive")));
        }
        let grid = materials.grid;
        let line_ops = std::array::from_fn(|a| {
            let (n, h) = (grid.cells[a], grid.spacing[a]);
            [
                LineOperator::new(yee_rows(n, h, NodeGridKind::Plus), h),
                LineOperator::new(yee_rows(n, h, NodeGridKind::Minus), h),
            ]
        });
        let mut e_ca: [Vec<f64>; 3] = Default::default();
        let mut e_cb: [Vec<f64>; 3] = Default::default();
        let mut h_cb: [Vec<f64>; 3] = Default::default();
        for c in Component::ALL {
            let dims = grid.yee_dims(c);
            let kinds = c.axis_kinds();
            let len = dims.iter().product();
            let (mut ca, mut cb) = (Vec::with_capacity(len), Vec::with_capacity(len));
            for k in 0..dims[2] {
                for j in 0..dims[1] {
                    for i in 0..dims[0] {
                        let idx = [i, j, k];
                        let mut node = idx;
                        let mut wall = false;
                        for a in 0..3 {
                            match kinds[a] {
                                NodeGridKind::Minus => node[a] += 1,
                                NodeGridKind::Plus => wall |= idx[a] == 0 || idx[a] == dims[a] - 1,
                            }
                        }
                        let m = materials.sample(c, node)?;
                        if c.is_electric() {
                            let loss = m.sigma * dt / (2.0 * m.eps);
                            if wall {
                                ca.push(0.0);
                                cb.push(0.0);
                            } else {
                                ca.push((1.0 - loss) / (1.0 + loss));
                                cb.push(dt / m.eps / (1.0 + loss));
                            }
                        } else {
                            cb.push(dt / m.mu);
                        }
                    }
                }
            }
            let a = c.direction().index();
            if c.is_electric() {
                e_ca[a] = ca;
                e_cb[a] = cb;
            } else {
                h_cb[a] = cb;
            }
        }
        Ok(YeeSolver {
            grid,
            dt,
            step: 0,
            fields: std::array::from_fn(|n| Field3::zeros(grid.yee_dims(Component::ALL[n]))),
            line_ops,
            e_ca,
            e_cb,
            h_cb,
            sources: Vec::new(),
        })
    }

    /// Soft current source on the Yee node `node` of an E component.
    pub fn add_point_source(
        &mut self,
        waveform: Waveform,
        component: Component,
        node: [usize; 3],
        amplitude: f64,
    ) -> Result<()> {
        waveform.validate()?;
        if !component.is_electric() {
            return Err(Error::Config("sources drive E components only".into()));
        }
        let f = &self.fields[component.index()];
        if (0..3).any(|a| node[a] >= f.dims[a]) {
            return Err(Error::OutOfRange(format!("Yee node {node:?} outside {component}")));
        }
        self.sources.push(PointSource {
            waveform,
            amplitude,
            component: component.index(),
            index: f.index(node[0], node[1], node[2]),
        });
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn field(&self, c: Component) -> &Field3<f64> {
        &self.fields[c.index()]
    }

    /// Field values stored, summed over the six components.
    pub fn storage_len(&self) -> usize {
        self.fields.iter().map(|f| f.data.len()).sum()
    }

    pub fn step(&mut self) {
        let (e, h) = self.fields.split_at_mut(3);
        let (plus, minus) = (0, 1);
        for axis in Axis::ALL {
            let (b, c) = axis.cyclic();
            let a = axis.index();
            let term = CurlTerm {
                src_c: &e[c.index()],
                op_b: &self.line_ops[b.index()][minus],
                axis_b: b,
                src_b: &e[b.index()],
                op_c: &self.line_ops[c.index()][minus],
                axis_c: c,
                sign: -1.0,
                x_penalty: None,
            };
            apply_curl(&mut h[a], &term, None, &self.h_cb[a]);
        }
        for axis in Axis::ALL {
            let (b, c) = axis.cyclic();
            let a = axis.index();
            let term = CurlTerm {
                src_c: &h[c.index()],
                op_b: &self.line_ops[b.index()][plus],
                axis_b: b,
                src_b: &h[b.index()],
                op_c: &self.line_ops[c.index()][plus],
                axis_c: c,
                sign: 1.0,
                x_penalty: None,
            };
            apply_curl(&mut e[a], &term, Some(&self.e_ca[a]), &self.e_cb[a]);
        }
        let t = (self.step as f64 + 0.5) * self.dt;
        for s in &self.sources {
            let v = s.amplitude * s.waveform.value(t);
            e[s.component].data[s.index] += v * self.e_cb[s.component][s.index];
        }
        self.step += 1;
    }

    pub fn advance(&mut self, n: u64) {
        for _ in 0..n {
            self.step();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{spectrum_with, SpectrumOptions, Window};
    use crate::material::c0;
    use crate::solver::cfl_max_dt;
    use num_complex::Complex64;

    #[test]
    fn storage_difference_matches_closed_form() {
        let g = GridSpec::new([6, 7, 8], [0.1; 3]).unwrap();
        let y = YeeSolver::new(&MaterialGrid::vacuum(g), 1e-12).unwrap();
        for c in Component::ALL {
            let sbp = g.layout(c).len();
            assert_eq!(sbp - y.field(c).data.len(), g.closed_form_overhead(c), "{c}");
        }
        assert_eq!(y.storage_len(), g.yee_node_count());
    }

    #[test]
    fn rejects_bad_sources() {
        let g = GridSpec::cubic(4, 0.1).unwrap();
        let mut y = YeeSolver::new(&MaterialGrid::vacuum(g), 1e-12).unwrap();
        let w = Waveform::Gaussian { tw: 1e-10, t0: 1e-10 };
        assert!(y.add_point_source(w, Component::Hz, [1, 1, 1], 1.0).is_err());
        assert!(y.add_point_source(w, Component::Ez, [1, 1, 4], 1.0).is_err());
    }

    #[test]
    fn cavity_mode_and_walls() {
        let n = 10;
        let h = 0.1;
        let g = GridSpec::cubic(n, h).unwrap();
        let m = MaterialGrid::vacuum(g);
        let dt = 0.99 * cfl_max_dt(&g, &m);
        let mut y = YeeSolver::new(&m, dt).unwrap();
        let tw = 4e-9;
        y.add_point_source(Waveform::Gaussian { tw, t0: tw }, Component::Ez, [5, 5, 5], 1.0).unwrap();
        let mut rec = Vec::new();
        for _ in 0..8000 {
            y.step();
            rec.push(Complex64::new(y.field(Component::Ez).get(3, 3, 4), 0.0));
        }
        let ez = y.field(Component::Ez);
        assert!((0..=n).all(|j| (0..n).all(|k| ez.get(0, j, k) == 0.0 && ez.get(n, j, k) == 0.0)));
        let sp = spectrum_with(
            &rec,
            dt,
            1,
            &SpectrumOptions { window: Window::Hann, remove_mean: true, ..SpectrumOptions::default() },
        )
        .unwrap();
        let f = sp.lowest().unwrap().frequency;
        let exact = c0() / 2.0 * (2.0f64).sqrt() / (n as f64 * h);
        assert!((f / exact - 1.0).abs() < 0.01, "{f} {exact}");
    }
}
