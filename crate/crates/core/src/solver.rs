//! Leapfrog time stepping with matrix-free curl updates and SAT boundary
//! corrections.
//!
//! State: `E` at step `n` and `H` at step `n - 1/2`. One [`Solver::step`]
//! runs [`Solver::update_h`] (PEC and periodic `sigma` penalties, using
//! `E^n`) and then [`Solver::update_e`] (PMC and periodic `chi` penalties,
//! using `H^{n+1/2}`, plus soft sources at `t = (n + 1/2) dt`).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Axis, Component, ComponentLayout, Face, Field3, FieldSet, GridSpec};
use crate::kernel::{apply_curl, CurlTerm, EndPenalty, LineOperator, LinePenalty};
use crate::material::MaterialGrid;
use crate::sbp::{NodeGridKind, SbpOperatorPair, StencilRow};
use crate::scalar::FieldScalar;
use crate::source::SourceSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Pec,
    Pmc,
    Periodic,
}

impl BoundaryKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pec" => Some(BoundaryKind::Pec),
            "pmc" => Some(BoundaryKind::Pmc),
            "periodic" | "pbc" => Some(BoundaryKind::Periodic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::Pec => "pec",
            BoundaryKind::Pmc => "pmc",
            BoundaryKind::Periodic => "periodic",
        }
    }
}

/// The two tangential (E, H) pairs on a face normal to `a` with cyclic
/// successors `(b, c)`: pair 0 is `(E_b, H_c)`, pair 1 is `(E_c, H_b)`.
pub fn sat_pair(face: Face, pair: usize) -> (Component, Component) {
    let (b, c) = face.axis().cyclic();
    if pair == 0 {
        (Component::electric(b), Component::magnetic(c))
    } else {
        (Component::electric(c), Component::magnetic(b))
    }
}

/// The SBP curl leaves `-s (E_b H_c - E_c H_b)` on each face with outward
/// sign `s`; a penalty with this coefficient cancels its pair's share.
pub fn neutral_coefficient(face: Face, pair: usize) -> f64 {
    let s = face.normal_sign();
    if pair == 0 {
        s
    } else {
        -s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Sigma,
    Chi,
}

/// Boundary type per face (indexed by [`Face::index`]), the twelve `sigma`
/// (H-equation) and twelve `chi` (E-equation) penalties indexed by
/// `2 * face + pair`, and Bloch phases per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SatConfig {
    pub boundary: [BoundaryKind; 6],
    pub sigma: [f64; 12],
    pub chi: [f64; 12],
    pub phases: [f64; 3],
}

impl SatConfig {
    pub fn slot(face: Face, pair: usize) -> usize {
        2 * face.index() + pair
    }

    /// Default coefficients for a boundary assignment: PEC faces penalise
    /// through `sigma`, PMC faces through `chi`, periodic faces split the
    /// penalty evenly between both.
    pub fn new(boundary: [BoundaryKind; 6], phases: [f64; 3]) -> Result<Self> {
        let mut sigma = [0.0; 12];
        let mut chi = [0.0; 12];
        for face in Face::ALL {
            for pair in 0..2 {
                let s = Self::slot(face, pair);
                let c = neutral_coefficient(face, pair);
                match boundary[face.index()] {
                    BoundaryKind::Pec => sigma[s] = c,
                    BoundaryKind::Pmc => chi[s] = c,
                    BoundaryKind::Periodic => {
                        sigma[s] = 0.5 * c;
                        chi[s] = 0.5 * c;
                    }
                }
            }
        }
        let cfg = SatConfig { boundary, sigma, chi, phases };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn uniform(kind: BoundaryKind) -> Self {
        SatConfig::new([kind; 6], [0.0; 3]).expect("uniform boundaries are valid")
    }

    pub fn pec() -> Self {
        Self::uniform(BoundaryKind::Pec)
    }

    pub fn pmc() -> Self {
        Self::uniform(BoundaryKind::Pmc)
    }

    pub fn periodic(phases: [f64; 3]) -> Result<Self> {
        SatConfig::new([BoundaryKind::Periodic; 6], phases)
    }

    pub fn face_kind(&self, face: Face) -> BoundaryKind {
        self.boundary[face.index()]
    }

    pub fn coefficient(&self, which: Coefficient, slot: usize) -> f64 {
        match which {
            Coefficient::Sigma => self.sigma[slot],
            Coefficient::Chi => self.chi[slot],
        }
    }

    pub fn set_coefficient(&mut self, which: Coefficient, slot: usize, v: f64) {
        match which {
            Coefficient::Sigma => self.sigma[slot] = v,
            Coefficient::Chi => self.chi[slot] = v,
        }
    }

    pub fn has_phase(&self) -> bool {
        Axis::ALL
            .iter()
            .any(|a| self.face_kind(Face::new(*a, false)) == BoundaryKind::Periodic && self.phases[a.index()] != 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for axis in Axis::ALL {
            let lo = self.face_kind(Face::new(axis, false));
            let hi = self.face_kind(Face::new(axis, true));
            if (lo == BoundaryKind::Periodic) != (hi == BoundaryKind::Periodic) {
                return Err(Error::Boundary(format!(
                    "periodic boundary on {} requires both {} faces periodic",
                    axis.name(),
                    axis.name()
                )));
            }
            if !self.phases[axis.index()].is_finite() {
                return Err(Error::Boundary(format!("non-finite phase on {}", axis.name())));
            }
        }
        if self.sigma.iter().chain(&self.chi).any(|v| !v.is_finite()) {
            return Err(Error::Boundary("non-finite penalty coefficient".into()));
        }
        Ok(())
    }

    /// Largest bracket of the semi-discrete energy rate. Zero means the
    /// penalties exactly cancel the boundary terms left by the curl.
    ///
    /// Non-periodic faces need `sigma + chi = c` per pair. Periodic axes
    /// need the same on both faces plus `sigma_hi + chi_lo = 0` and
    /// `sigma_lo + chi_hi = 0` for the cross terms.
    pub fn neutrality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for face in Face::ALL {
            for pair in 0..2 {
                let s = Self::slot(face, pair);
                let own = self.sigma[s] + self.chi[s] - neutral_coefficient(face, pair);
                worst = worst.max(own.abs());
                if self.face_kind(face) == BoundaryKind::Periodic {
                    let o = Self::slot(face.opposite(), pair);
                    worst = worst.max((self.sigma[s] + self.chi[o]).abs());
                }
            }
        }
        worst
    }

    /// Bloch factor multiplying the opposite-face value in the penalty on
    /// `face`: `exp(-j alpha)` on high faces, `exp(+j alpha)` on low faces.
    pub fn bloch_factor(&self, face: Face) -> Complex64 {
        let alpha = self.phases[face.axis().index()];
        Complex64::from_polar(1.0, -face.normal_sign() * alpha)
    }
}

/// Which spatial operators drive the update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    /// SBP closures and SAT penalties.
    Sbp,
    /// Two-point differences on every row and no boundary penalties. Same
    /// arrays and loops; used as the plain-FDTD cost reference.
    Plain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationState<T> {
    /// `E` at step `n`, `H` at step `n - 1/2`.
    pub fields: FieldSet<T>,
    pub step: u64,
    pub dt: f64,
}

impl<T> SimulationState<T> {
    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }
}

/// `dt_max = 1 / (c_max sqrt(hx^-2 + hy^-2 + hz^-2))`.
pub fn cfl_max_dt(grid: &GridSpec, materials: &MaterialGrid) -> f64 {
    cfl_max_dt_with_speed(grid, materials.max_wave_speed())
}

pub fn cfl_max_dt_with_speed(grid: &GridSpec, c_max: f64) -> f64 {
    let s: f64 = grid.spacing.iter().map(|h| h.powi(-2)).sum();
    1.0 / (c_max * s.sqrt())
}

/// Tensor-product norm weight of every node of a layout.
pub fn node_weights(ops: &[SbpOperatorPair; 3], lay: &ComponentLayout) -> Vec<f64> {
    let px = ops[0].norm(lay.axis_kinds[0]);
    let py = ops[1].norm(lay.axis_kinds[1]);
    let pz = ops[2].norm(lay.axis_kinds[2]);
    let mut w = Vec::with_capacity(lay.len());
    for z in pz {
        for y in py {
            for x in px {
                w.push(x * y * z);
            }
        }
    }
    w
}

/// Two-point rows on every output node of an SBP-sized operator.
fn plain_rows(n: usize, h: f64, dest: NodeGridKind) -> Vec<StencilRow> {
    let inv = 1.0 / h;
    let row = |start| StencilRow { start, len: 2, coef: [-inv, inv, 0.0] };
    match dest {
        NodeGridKind::Plus => (0..=n).map(row).collect(),
        NodeGridKind::Minus => (0..n + 2).map(|i| row(i.saturating_sub(1).min(n - 1))).collect(),
    }
}

#[derive(Clone, Debug)]
struct ResolvedSource {
    spec: SourceSpec,
    indices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Solver<T: FieldScalar> {
    grid: GridSpec,
    ops: [SbpOperatorPair; 3],
    /// Per axis: `[dest Plus, dest Minus]`.
    line_ops: [[LineOperator; 2]; 3],
    sat: SatConfig,
    materials: MaterialGrid,
    mode: KernelMode,
    state: SimulationState<T>,
    e_ca: [Vec<f64>; 3],
    e_cb: [Vec<f64>; 3],
    h_cb: [Vec<f64>; 3],
    sources: Vec<ResolvedSource>,
}

impl<T: FieldScalar> Solver<T> {
    pub fn new(materials: MaterialGrid, sat: SatConfig, dt: f64) -> Result<Self> {
        sat.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("time step {dt} must be positive")));
        }
        if sat.has_phase() && !T::IS_COMPLEX {
            return Err(Error::Boundary("nonzero Bloch phase requires complex-valued fields".into()));
        }
        let grid = materials.grid;
        let ops = grid.operators()?;
        let line_ops = std::array::from_fn(|a| {
            [LineOperator::sbp(&ops[a], NodeGridKind::Plus), LineOperator::sbp(&ops[a], NodeGridKind::Minus)]
        });
        let mut e_ca: [Vec<f64>; 3] = Default::default();
        let mut e_cb: [Vec<f64>; 3] = Default::default();
        let mut h_cb: [Vec<f64>; 3] = Default::default();
        for axis in Axis::ALL {
            let a = axis.index();
            let lay = grid.layout(Component::electric(axis));
            let (ca, cb) = node_coefficients(&materials, &lay, dt, true)?;
            e_ca[a] = ca;
            e_cb[a] = cb;
            let lay = grid.layout(Component::magnetic(axis));
            h_cb[a] = node_coefficients(&materials, &lay, dt, false)?.1;
        }
        Ok(Solver {
            grid,
            ops,
            line_ops,
            sat,
            materials,
            mode: KernelMode::Sbp,
            state: SimulationState { fields: FieldSet::zeros(grid), step: 0, dt },
            e_ca,
            e_cb,
            h_cb,
            sources: Vec::new(),
        })
    }

    pub fn set_kernel_mode(&mut self, mode: KernelMode) {
        self.mode = mode;
        self.line_ops = std::array::from_fn(|a| {
            let (n, h) = (self.grid.cells[a], self.grid.spacing[a]);
            match mode {
                KernelMode::Sbp => [
                    LineOperator::sbp(&self.ops[a], NodeGridKind::Plus),
                    LineOperator::sbp(&self.ops[a], NodeGridKind::Minus),
                ],
                KernelMode::Plain => [
                    LineOperator::new(plain_rows(n, h, NodeGridKind::Plus), h),
                    LineOperator::new(plain_rows(n, h, NodeGridKind::Minus), h),
                ],
            }
        });
    }

    pub fn kernel_mode(&self) -> KernelMode {
        self.mode
    }

    pub fn add_source(&mut self, spec: SourceSpec) -> Result<()> {
        let indices = spec.resolve(&self.grid)?;
        self.sources.push(ResolvedSource { spec, indices });
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn operators(&self) -> &[SbpOperatorPair; 3] {
        &self.ops
    }

    pub fn sat(&self) -> &SatConfig {
        &self.sat
    }

    pub fn materials(&self) -> &MaterialGrid {
        &self.materials
    }

    pub fn dt(&self) -> f64 {
        self.state.dt
    }

    pub fn state(&self) -> &SimulationState<T> {
        &self.state
    }

    pub fn fields(&self) -> &FieldSet<T> {
        &self.state.fields
    }

    pub fn fields_mut(&mut self) -> &mut FieldSet<T> {
        &mut self.state.fields
    }

    pub fn step_count(&self) -> u64 {
        self.state.step
    }

    pub fn time(&self) -> f64 {
        self.state.time()
    }

    pub fn reset(&mut self) {
        self.state.fields = FieldSet::zeros(self.grid);
        self.state.step = 0;
    }

    /// `H^{n+1/2} = H^{n-1/2} - dt/mu (curl E^n) + dt/mu * SAT_sigma(E^n)`.
    pub fn update_h(&mut self) {
        let sat = (self.mode == KernelMode::Sbp).then_some((&self.sat, &self.ops));
        let (e, h) = self.state.fields.fields.split_at_mut(3);
        curl_h(&self.line_ops, e, h, &self.h_cb, sat);
        if self.mode == KernelMode::Sbp {
            sat_h(&self.sat, &self.ops, e, h, &self.h_cb);
        }
    }

    /// `E^{n+1} = ca E^n + cb (curl H^{n+1/2} + SAT_chi(H^{n+1/2}) + J)`.
    pub fn update_e(&mut self) {
        let sat = (self.mode == KernelMode::Sbp).then_some((&self.sat, &self.ops));
        let (e, h) = self.state.fields.fields.split_at_mut(3);
        curl_e(&self.line_ops, e, h, &self.e_ca, &self.e_cb, sat);
        if self.mode == KernelMode::Sbp {
            sat_e(&self.sat, &self.ops, e, h, &self.e_cb);
        }
        let t = (self.state.step as f64 + 0.5) * self.state.dt;
        for src in &self.sources {
            let a = src.spec.component().index();
            let v = src.spec.value(t);
            if v == 0.0 {
                continue;
            }
            let field = &mut e[a].data;
            for &i in &src.indices {
                field[i] += T::from_real(v * self.e_cb[a][i]);
            }
        }
    }

    fn sat_terms(&self) -> Option<(&SatConfig, &[SbpOperatorPair; 3])> {
        (self.mode == KernelMode::Sbp).then_some((&self.sat, &self.ops))
    }

    pub fn step(&mut self) {
        self.update_h();
        self.update_e();
        self.advance_counter();
    }

    /// Mark a step complete after calling `update_h` and `update_e` directly.
    pub fn advance_counter(&mut self) {
        self.state.step += 1;
    }

    pub fn advance(&mut self, n: u64) {
        for _ in 0..n {
            self.step();
        }
    }

    /// `H^{n+1/2}` computed from the current state without advancing it.
    pub fn peek_next_h(&self) -> [Field3<T>; 3] {
        let e = &self.state.fields.fields[..3];
        let mut h: [Field3<T>; 3] = std::array::from_fn(|a| self.state.fields.fields[3 + a].clone());
        curl_h(&self.line_ops, e, &mut h, &self.h_cb, self.sat_terms());
        if self.mode == KernelMode::Sbp {
            sat_h(&self.sat, &self.ops, e, &mut h, &self.h_cb);
        }
        h
    }

    pub fn is_finite(&self) -> bool {
        self.state.fields.is_finite()
    }

    pub fn max_abs_e(&self) -> f64 {
        self.state.fields.fields[..3].iter().map(|f| f.max_abs()).fold(0.0, f64::max)
    }
}

/// `(ca, cb)` per node: E nodes use the semi-implicit loss factors, H nodes
/// return `(1, dt / mu)`.
fn node_coefficients(
    materials: &MaterialGrid,
    lay: &ComponentLayout,
    dt: f64,
    electric: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut ca = Vec::with_capacity(lay.len());
    let mut cb = Vec::with_capacity(lay.len());
    for k in 0..lay.dims[2] {
        for j in 0..lay.dims[1] {
            for i in 0..lay.dims[0] {
                let m = materials.sample(lay.component, [i, j, k])?;
                if electric {
                    let loss = m.sigma * dt / (2.0 * m.eps);
                    ca.push((1.0 - loss) / (1.0 + loss));
                    cb.push(dt / m.eps / (1.0 + loss));
                } else {
                    ca.push(1.0);
                    cb.push(dt / m.mu);
                }
            }
        }
    }
    Ok((ca, cb))
}

fn kind_slot(kind: NodeGridKind) -> usize {
    match kind {
        NodeGridKind::Plus => 0,
        NodeGridKind::Minus => 1,
    }
}

fn curl_e<T: FieldScalar>(
    ops: &[[LineOperator; 2]; 3],
    e: &mut [Field3<T>],
    h: &[Field3<T>],
    ca: &[Vec<f64>; 3],
    cb: &[Vec<f64>; 3],
    sat: Option<(&SatConfig, &[SbpOperatorPair; 3])>,
) {
    let plus = kind_slot(NodeGridKind::Plus);
    for axis in Axis::ALL {
        let (b, c) = axis.cyclic();
        let term = CurlTerm {
            src_c: &h[c.index()],
            op_b: &ops[b.index()][plus],
            axis_b: b,
            src_b: &h[b.index()],
            op_c: &ops[c.index()][plus],
            axis_c: c,
            sign: 1.0,
            x_penalty: sat.and_then(|(sat, ops)| x_penalty(sat, ops, Coefficient::Chi, Component::electric(axis), h)),
        };
        let a = axis.index();
        apply_curl(&mut e[a], &term, Some(&ca[a]), &cb[a]);
    }
}

fn curl_h<T: FieldScalar>(
    ops: &[[LineOperator; 2]; 3],
    e: &[Field3<T>],
    h: &mut [Field3<T>],
    cb: &[Vec<f64>; 3],
    sat: Option<(&SatConfig, &[SbpOperatorPair; 3])>,
) {
    let minus = kind_slot(NodeGridKind::Minus);
    for axis in Axis::ALL {
        let (b, c) = axis.cyclic();
        let term = CurlTerm {
            src_c: &e[c.index()],
            op_b: &ops[b.index()][minus],
            axis_b: b,
            src_b: &e[b.index()],
            op_c: &ops[c.index()][minus],
            axis_c: c,
            sign: -1.0,
            x_penalty: sat.and_then(|(sat, ops)| x_penalty(sat, ops, Coefficient::Sigma, Component::magnetic(axis), e)),
        };
        let a = axis.index();
        apply_curl(&mut h[a], &term, None, &cb[a]);
    }
}

/// Add `coef / w_a * (u_face - phase * u_opposite)` times the node's
/// material factor onto the boundary layer of `dst`. `w_a` is the normal
/// boundary norm weight; the transverse weights of the face and node
/// norms cancel.
#[allow(clippy::too_many_arguments)]
fn penalty<T: FieldScalar>(
    sat: &SatConfig,
    face: Face,
    coef: f64,
    w_a: f64,
    src: &Field3<T>,
    dst: &mut Field3<T>,
    factor: &[f64],
) {
    let periodic = sat.face_kind(face) == BoundaryKind::Periodic;
    let phase = sat.bloch_factor(face);
    let scale = coef / w_a;
    let (d0, d1) = face.transverse_dims(src.dims);
    let (base, s0, s1) = face.strides(src.dims);
    let (opp, _, _) = face.opposite().strides(src.dims);
    let (dbase, t0, t1) = face.strides(dst.dims);
    for b in 0..d1 {
        let (r, o, d) = (base + b * s1, opp + b * s1, dbase + b * t1);
        if s0 == 1 && t0 == 1 {
            let out = &mut dst.data[d..d + d0];
            let f = &factor[d..d + d0];
            let u = &src.data[r..r + d0];
            if periodic {
                let w = &src.data[o..o + d0];
                for (((y, f), u), w) in out.iter_mut().zip(f).zip(u).zip(w) {
                    *y += (*u - w.mul_phase(phase)) * (scale * f);
                }
            } else {
                for ((y, f), u) in out.iter_mut().zip(f).zip(u) {
                    *y += *u * (scale * f);
                }
            }
        } else {
            for a in 0..d0 {
                let mut v = src.data[r + a * s0];
                if periodic {
                    v -= src.data[o + a * s0].mul_phase(phase);
                }
                let i = d + a * t0;
                dst.data[i] += v * (scale * factor[i]);
            }
        }
    }
}

/// The x-face penalties landing on `dst`, for fusing into its curl update.
/// `Sigma` penalises H from E, `Chi` penalises E from H.
fn x_penalty<'a, T: FieldScalar>(
    sat: &SatConfig,
    ops: &[SbpOperatorPair; 3],
    which: Coefficient,
    dst: Component,
    src: &'a [Field3<T>],
) -> Option<LinePenalty<'a, T>> {
    let w = ops[Axis::X.index()].boundary_weight();
    let mut from = None;
    let mut ends = [None, None];
    for (n, face) in [Face::XLow, Face::XHigh].into_iter().enumerate() {
        for pair in 0..2 {
            let (ec, hc) = sat_pair(face, pair);
            let (d, s) = match which {
                Coefficient::Sigma => (hc, ec),
                Coefficient::Chi => (ec, hc),
            };
            let coef = sat.coefficient(which, SatConfig::slot(face, pair));
            if d != dst || coef == 0.0 {
                continue;
            }
            from = Some(s.direction().index());
            let periodic = sat.face_kind(face) == BoundaryKind::Periodic;
            ends[n] = Some(EndPenalty { scale: coef / w, phase: periodic.then(|| sat.bloch_factor(face)) });
        }
    }
    from.map(|i| LinePenalty { src: &src[i], low: ends[0], high: ends[1] })
}

/// Penalties on the y and z faces; the x faces are fused into the curl.
fn sat_h<T: FieldScalar>(
    sat: &SatConfig,
    ops: &[SbpOperatorPair; 3],
    e: &[Field3<T>],
    h: &mut [Field3<T>],
    cb: &[Vec<f64>; 3],
) {
    for face in Face::ALL.into_iter().filter(|f| f.axis() != Axis::X) {
        let w_a = ops[face.axis().index()].boundary_weight();
        for pair in 0..2 {
            let coef = sat.sigma[SatConfig::slot(face, pair)];
            if coef == 0.0 {
                continue;
            }
            let (ec, hc) = sat_pair(face, pair);
            let a = hc.direction().index();
            penalty(sat, face, coef, w_a, &e[ec.direction().index()], &mut h[a], &cb[a]);
        }
    }
}

fn sat_e<T: FieldScalar>(
    sat: &SatConfig,
    ops: &[SbpOperatorPair; 3],
    e: &mut [Field3<T>],
    h: &[Field3<T>],
    cb: &[Vec<f64>; 3],
) {
    for face in Face::ALL.into_iter().filter(|f| f.axis() != Axis::X) {
        let w_a = ops[face.axis().index()].boundary_weight();
        for pair in 0..2 {
            let coef = sat.chi[SatConfig::slot(face, pair)];
            if coef == 0.0 {
                continue;
            }
            let (ec, hc) = sat_pair(face, pair);
            let a = ec.direction().index();
            penalty(sat, face, coef, w_a, &h[hc.direction().index()], &mut e[a], &cb[a]);
        }
    }
}
