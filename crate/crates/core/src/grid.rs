//! Staggered component layouts, field storage and matrix-free directional
//! derivatives.
//!
//! Each of the six field components lives on a tensor product of 1D Plus
//! and Minus grids. All arrays are flattened with `x` fastest, then `y`,
//! then `z`.

use crate::error::{Error, Result};
use crate::sbp::{build_sbp_pair, NodeGridKind, SbpOperatorPair, StencilRow, MIN_CELLS};
use crate::scalar::FieldScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    /// The other two axes in cyclic order `(a+1, a+2)`.
    pub fn cyclic(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Ex,
    Ey,
    Ez,
    Hx,
    Hy,
    Hz,
}

impl Component {
    pub const ALL: [Component; 6] =
        [Component::Ex, Component::Ey, Component::Ez, Component::Hx, Component::Hy, Component::Hz];
    pub const E: [Component; 3] = [Component::Ex, Component::Ey, Component::Ez];
    pub const H: [Component; 3] = [Component::Hx, Component::Hy, Component::Hz];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_electric(self) -> bool {
        self.index() < 3
    }

    pub fn direction(self) -> Axis {
        Axis::from_index(self.index() % 3)
    }

    pub fn electric(axis: Axis) -> Component {
        Component::E[axis.index()]
    }

    pub fn magnetic(axis: Axis) -> Component {
        Component::H[axis.index()]
    }

    /// Per-axis node grids. An E component is on the Minus grid along its
    /// own direction and on Plus grids transversally; H is the opposite.
    pub fn axis_kinds(self) -> [NodeGridKind; 3] {
        let dir = self.direction().index();
        let (along, across) = if self.is_electric() {
            (NodeGridKind::Minus, NodeGridKind::Plus)
        } else {
            (NodeGridKind::Plus, NodeGridKind::Minus)
        };
        let mut kinds = [across; 3];
        kinds[dir] = along;
        kinds
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Ex => "Ex",
            Component::Ey => "Ey",
            Component::Ez => "Ez",
            Component::Hx => "Hx",
            Component::Hy => "Hy",
            Component::Hz => "Hz",
        }
    }

    pub fn parse(s: &str) -> Option<Component> {
        Component::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Uniform Cartesian block of `nx * ny * nz` cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub cells: [usize; 3],
    pub spacing: [f64; 3],
}

impl GridSpec {
    pub fn new(cells: [usize; 3], spacing: [f64; 3]) -> Result<Self> {
        for &n in &cells {
            if n < MIN_CELLS {
                return Err(Error::GridTooSmall(n));
            }
        }
        for &h in &spacing {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidSpacing(h));
            }
        }
        Ok(GridSpec { cells, spacing })
    }

    pub fn cubic(n: usize, h: f64) -> Result<Self> {
        GridSpec::new([n; 3], [h; 3])
    }

    pub fn extent(&self) -> [f64; 3] {
        [
            self.cells[0] as f64 * self.spacing[0],
            self.cells[1] as f64 * self.spacing[1],
            self.cells[2] as f64 * self.spacing[2],
        ]
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn layout(&self, component: Component) -> ComponentLayout {
        layout_for(self, component)
    }

    pub fn operators(&self) -> Result<[SbpOperatorPair; 3]> {
        Ok([
            build_sbp_pair(self.cells[0], self.spacing[0])?,
            build_sbp_pair(self.cells[1], self.spacing[1])?,
            build_sbp_pair(self.cells[2], self.spacing[2])?,
        ])
    }

    /// Total number of field nodes over all six SBP layouts.
    pub fn sbp_node_count(&self) -> usize {
        Component::ALL.iter().map(|c| self.layout(*c).len()).sum()
    }

    /// Dimensions of the same component on a standard Yee grid (no extra
    /// boundary nodes): `n` cells-centred samples along a Minus axis.
    pub fn yee_dims(&self, component: Component) -> [usize; 3] {
        let kinds = component.axis_kinds();
        let mut d = [0; 3];
        for a in 0..3 {
            d[a] = match kinds[a] {
                NodeGridKind::Plus => self.cells[a] + 1,
                NodeGridKind::Minus => self.cells[a],
            };
        }
        d
    }

    pub fn yee_node_count(&self) -> usize {
        Component::ALL.iter().map(|c| self.yee_dims(*c).iter().product::<usize>()).sum()
    }

    /// Closed-form count of extra nodes a component needs compared with its
    /// Yee array, e.g. `2 (Ny+1)(Nz+1)` for `Ex` and
    /// `2 (Nx+1)(Ny+Nz+2)` for `Hx`.
    pub fn closed_form_overhead(&self, component: Component) -> usize {
        let a = component.direction().index();
        let (b, c) = component.direction().cyclic();
        let (nb, nc) = (self.cells[b.index()], self.cells[c.index()]);
        let na = self.cells[a];
        if component.is_electric() {
            2 * (nb + 1) * (nc + 1)
        } else {
            2 * (na + 1) * (nb + nc + 2)
        }
    }
}

/// Node layout of one component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentLayout {
    pub component: Component,
    pub axis_kinds: [NodeGridKind; 3],
    pub dims: [usize; 3],
    pub grid: GridSpec,
}

pub fn layout_for(grid: &GridSpec, component: Component) -> ComponentLayout {
    let axis_kinds = component.axis_kinds();
    let mut dims = [0; 3];
    for a in 0..3 {
        dims[a] = axis_kinds[a].node_count(grid.cells[a]);
    }
    ComponentLayout { component, axis_kinds, dims, grid: *grid }
}

impl ComponentLayout {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn position(&self, node: [usize; 3]) -> [f64; 3] {
        let mut p = [0.0; 3];
        for a in 0..3 {
            p[a] = self.axis_kinds[a].coordinate(node[a], self.grid.cells[a], self.grid.spacing[a]);
        }
        p
    }

    /// Node closest to a physical position (ties resolve to the lower index).
    pub fn nearest_node(&self, pos: [f64; 3]) -> [usize; 3] {
        let mut node = [0; 3];
        for a in 0..3 {
            let (n, h) = (self.grid.cells[a], self.grid.spacing[a]);
            let mut best = (f64::INFINITY, 0);
            for i in 0..self.dims[a] {
                let d = (self.axis_kinds[a].coordinate(i, n, h) - pos[a]).abs();
                if d < best.0 - 1e-12 * h {
                    best = (d, i);
                }
            }
            node[a] = best.1;
        }
        node
    }

    pub fn contains(&self, node: [usize; 3]) -> bool {
        (0..3).all(|a| node[a] < self.dims[a])
    }
}

/// Dense 3D array with `x` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Field3<T> {
    pub dims: [usize; 3],
    pub data: Vec<T>,
}

impl<T: FieldScalar> Field3<T> {
    pub fn zeros(dims: [usize; 3]) -> Self {
        Field3 { dims, data: vec![T::zero(); dims.iter().product()] }
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dims.iter().product());
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    data.push(f(i, j, k));
                }
            }
        }
        Field3 { dims, data }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.data[self.index(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        let idx = self.index(i, j, k);
        self.data[idx] = v;
    }

    /// Contiguous x-line at `(j, k)`.
    #[inline]
    pub fn line(&self, j: usize, k: usize) -> &[T] {
        let start = self.dims[0] * (j + self.dims[1] * k);
        &self.data[start..start + self.dims[0]]
    }

    #[inline]
    pub fn line_mut(&mut self, j: usize, k: usize) -> &mut [T] {
        let start = self.dims[0] * (j + self.dims[1] * k);
        &mut self.data[start..start + self.dims[0]]
    }

    pub fn fill(&mut self, v: T) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |a, v| a.max(v.norm_sqr())).sqrt()
    }
}

/// Accumulate `scale * (D_axis src)` onto one x-line `(j, k)` of the
/// destination. `rows` are the operator rows producing the destination
/// grid along `axis`; the destination shares every other dimension with
/// `src`.
#[inline]
pub fn add_derivative_line<T: FieldScalar>(
    out: &mut [T],
    src: &Field3<T>,
    axis: Axis,
    j: usize,
    k: usize,
    rows: &[StencilRow],
    scale: f64,
) {
    match axis {
        Axis::X => {
            let line = src.line(j, k);
            for (o, r) in out.iter_mut().zip(rows) {
                let c = &r.coef;
                let s = &line[r.start..];
                let v = if r.len == 2 { s[0] * c[0] + s[1] * c[1] } else { s[0] * c[0] + s[1] * c[1] + s[2] * c[2] };
                *o += v * scale;
            }
        }
        Axis::Y => {
            let r = &rows[j];
            for m in 0..r.len {
                let c = r.coef[m] * scale;
                let line = src.line(r.start + m, k);
                for (o, s) in out.iter_mut().zip(line) {
                    *o += *s * c;
                }
            }
        }
        Axis::Z => {
            let r = &rows[k];
            for m in 0..r.len {
                let c = r.coef[m] * scale;
                let line = src.line(j, r.start + m);
                for (o, s) in out.iter_mut().zip(line) {
                    *o += *s * c;
                }
            }
        }
    }
}

/// Matrix-free `(I ⊗ I ⊗ D)`-type derivative of `src` along `axis`.
///
/// `source_kind` is the grid of `src` along `axis`; the result lives on the
/// dual grid along `axis` and on the same grids elsewhere.
pub fn derivative<T: FieldScalar>(
    src: &Field3<T>,
    axis: Axis,
    source_kind: NodeGridKind,
    pair: &SbpOperatorPair,
) -> Result<Field3<T>> {
    let a = axis.index();
    let expected = source_kind.node_count(pair.n_cells());
    if src.dims[a] != expected {
        return Err(Error::Layout(format!(
            "source has {} nodes along {}, operator expects {}",
            src.dims[a],
            axis.name(),
            expected
        )));
    }
    let rows = pair.rows(source_kind.dual());
    let mut dims = src.dims;
    dims[a] = rows.len();
    let mut out = Field3::zeros(dims);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            let line = out.line_mut(j, k);
            add_derivative_line(line, src, axis, j, k, rows, 1.0);
        }
    }
    Ok(out)
}

/// The six staggered components on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSet<T> {
    pub grid: GridSpec,
    pub fields: [Field3<T>; 6],
}

impl<T: FieldScalar> FieldSet<T> {
    pub fn zeros(grid: GridSpec) -> Self {
        let fields = Component::ALL.map(|c| Field3::zeros(grid.layout(c).dims));
        FieldSet { grid, fields }
    }

    pub fn get(&self, c: Component) -> &Field3<T> {
        &self.fields[c.index()]
    }

    pub fn get_mut(&mut self, c: Component) -> &mut Field3<T> {
        &mut self.fields[c.index()]
    }

    pub fn layout(&self, c: Component) -> ComponentLayout {
        self.grid.layout(c)
    }

    /// Total number of stored scalars.
    pub fn storage_len(&self) -> usize {
        self.fields.iter().map(|f| f.data.len()).sum()
    }

    /// Concatenate all components in the order Ex, Ey, Ez, Hx, Hy, Hz.
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.storage_len());
        for f in &self.fields {
            v.extend_from_slice(&f.data);
        }
        v
    }

    pub fn from_slice(grid: GridSpec, values: &[T]) -> Result<Self> {
        let mut out = FieldSet::zeros(grid);
        let total = out.storage_len();
        if values.len() != total {
            return Err(Error::Dimension { expected: total, actual: values.len() });
        }
        let mut off = 0;
        for f in out.fields.iter_mut() {
            let n = f.data.len();
            f.data.copy_from_slice(&values[off..off + n]);
            off += n;
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.fields.iter().all(|f| f.data.iter().all(|v| v.is_finite()))
    }

    /// Matrix-free derivative of component `src` along `axis`.
    pub fn directional_derivative(&self, src: Component, axis: Axis, pair: &SbpOperatorPair) -> Result<Field3<T>> {
        let kind = src.axis_kinds()[axis.index()];
        derivative(self.get(src), axis, kind, pair)
    }

    pub fn extract_face(&self, sel: FaceSelector) -> Result<Face2<T>> {
        sel.validate()?;
        let f = self.get(sel.component);
        let (d0, d1) = sel.face.transverse_dims(f.dims);
        let mut out = Vec::with_capacity(d0 * d1);
        for b in 0..d1 {
            for a in 0..d0 {
                out.push(f.data[sel.face.node_index(f.dims, a, b)]);
            }
        }
        Ok(Face2 { dims: [d0, d1], data: out })
    }

    /// Add `scale * values` onto the selected boundary slice (the `R^T` action).
    pub fn scatter_face_add(&mut self, sel: FaceSelector, values: &Face2<T>, scale: f64) -> Result<()> {
        sel.validate()?;
        let f = self.get_mut(sel.component);
        let (d0, d1) = sel.face.transverse_dims(f.dims);
        if values.dims != [d0, d1] {
            return Err(Error::Dimension { expected: d0 * d1, actual: values.data.len() });
        }
        for b in 0..d1 {
            for a in 0..d0 {
                let idx = sel.face.node_index(f.dims, a, b);
                f.data[idx] += values.data[a + d0 * b] * scale;
            }
        }
        Ok(())
    }
}

/// A 2D boundary slice, first transverse index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Face2<T> {
    pub dims: [usize; 2],
    pub data: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    XLow,
    XHigh,
    YLow,
    YHigh,
    ZLow,
    ZHigh,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::XLow, Face::XHigh, Face::YLow, Face::YHigh, Face::ZLow, Face::ZHigh];

    pub fn new(axis: Axis, high: bool) -> Face {
        Face::ALL[2 * axis.index() + high as usize]
    }

    pub fn axis(self) -> Axis {
        Axis::from_index(self as usize / 2)
    }

    pub fn is_high(self) -> bool {
        self as usize % 2 == 1
    }

    pub fn opposite(self) -> Face {
        Face::new(self.axis(), !self.is_high())
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Outward normal sign.
    pub fn normal_sign(self) -> f64 {
        if self.is_high() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::XLow => "x_low",
            Face::XHigh => "x_high",
            Face::YLow => "y_low",
            Face::YHigh => "y_high",
            Face::ZLow => "z_low",
            Face::ZHigh => "z_high",
        }
    }

    /// The two transverse dimensions of an array with `dims`, in
    /// (faster, slower) storage order.
    pub fn transverse_dims(self, dims: [usize; 3]) -> (usize, usize) {
        match self.axis() {
            Axis::X => (dims[1], dims[2]),
            Axis::Y => (dims[0], dims[2]),
            Axis::Z => (dims[0], dims[1]),
        }
    }

    /// `(base, fast stride, slow stride)` of the face layer in an array with
    /// `dims`: node `(a, b)` sits at `base + a * fast + b * slow`.
    pub fn strides(self, dims: [usize; 3]) -> (usize, usize, usize) {
        let n = dims[self.axis().index()];
        let layer = if self.is_high() { n - 1 } else { 0 };
        let plane = dims[0] * dims[1];
        match self.axis() {
            Axis::X => (layer, dims[0], plane),
            Axis::Y => (layer * dims[0], 1, plane),
            Axis::Z => (layer * plane, 1, dims[0]),
        }
    }

    /// Flat index of face node `(a, b)` inside an array with `dims`.
    #[inline]
    pub fn node_index(self, dims: [usize; 3], a: usize, b: usize) -> usize {
        let n = dims[self.axis().index()];
        let layer = if self.is_high() { n - 1 } else { 0 };
        let (i, j, k) = match self.axis() {
            Axis::X => (layer, a, b),
            Axis::Y => (a, layer, b),
            Axis::Z => (a, b, layer),
        };
        i + dims[0] * (j + dims[1] * k)
    }
}

/// A tangential component on one boundary face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceSelector {
    pub face: Face,
    pub component: Component,
}

impl FaceSelector {
    pub fn new(face: Face, component: Component) -> Result<Self> {
        let sel = FaceSelector { face, component };
        sel.validate()?;
        Ok(sel)
    }

    /// Boundary corrections only ever touch components tangential to a
    /// face; a normal component has no boundary slice in that sense.
    pub fn validate(&self) -> Result<()> {
        if self.component.direction() == self.face.axis() {
            return Err(Error::Layout(format!("{} is normal to face {}", self.component, self.face.name())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn grid(n: usize) -> GridSpec {
        GridSpec::cubic(n, 1.0 / n as f64).unwrap()
    }

    #[test]
    fn layouts_follow_table() {
        let g = grid(7);
        assert_eq!(g.layout(Component::Ex).dims, [9, 8, 8]);
        assert_eq!(g.layout(Component::Hx).dims, [8, 9, 9]);
        use NodeGridKind::*;
        assert_eq!(Component::Ex.axis_kinds(), [Minus, Plus, Plus]);
        assert_eq!(Component::Ey.axis_kinds(), [Plus, Minus, Plus]);
        assert_eq!(Component::Ez.axis_kinds(), [Plus, Plus, Minus]);
        assert_eq!(Component::Hx.axis_kinds(), [Plus, Minus, Minus]);
        assert_eq!(Component::Hy.axis_kinds(), [Minus, Plus, Minus]);
        assert_eq!(Component::Hz.axis_kinds(), [Minus, Minus, Plus]);
    }

    #[test]
    fn overhead_matches_closed_form() {
        let g = GridSpec::new([5, 7, 9], [0.1, 0.2, 0.3]).unwrap();
        for c in Component::ALL {
            let sbp = g.layout(c).len();
            let yee: usize = g.yee_dims(c).iter().product();
            assert_eq!(sbp - yee, g.closed_form_overhead(c), "{c}");
        }
        assert_eq!(g.closed_form_overhead(Component::Ex), 2 * 8 * 10);
        assert_eq!(g.closed_form_overhead(Component::Hx), 2 * 6 * (7 + 9 + 2));
    }

    #[test]
    fn derivative_of_constant_and_ramp() {
        let g = grid(5);
        let ops = g.operators().unwrap();
        let mut fs = FieldSet::<f64>::zeros(g);
        let lay = g.layout(Component::Hy);
        *fs.get_mut(Component::Hy) = Field3::from_fn(lay.dims, |_, _, _| 3.0);
        for axis in Axis::ALL {
            let d = fs.directional_derivative(Component::Hy, axis, &ops[axis.index()]).unwrap();
            assert!(d.max_abs() < 1e-12);
        }
        *fs.get_mut(Component::Hy) = Field3::from_fn(lay.dims, |i, j, k| lay.position([i, j, k])[2]);
        let d = fs.directional_derivative(Component::Hy, Axis::Z, &ops[2]).unwrap();
        assert_eq!(d.dims, [7, 6, 6]);
        for v in &d.data {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_rejects_wrong_operator() {
        let g = grid(5);
        let fs = FieldSet::<f64>::zeros(g);
        let other = build_sbp_pair(6, 0.2).unwrap();
        assert!(matches!(fs.directional_derivative(Component::Ex, Axis::X, &other), Err(Error::Layout(_))));
    }

    #[test]
    fn face_slice_dims_and_roundtrip() {
        let g = grid(4);
        let mut fs = FieldSet::<Complex64>::zeros(g);
        for (n, v) in fs.get_mut(Component::Ey).data.iter_mut().enumerate() {
            *v = Complex64::new(n as f64, -(n as f64));
        }
        let before = fs.clone();
        let sel = FaceSelector::new(Face::ZHigh, Component::Ey).unwrap();
        let face = fs.extract_face(sel).unwrap();
        assert_eq!(face.dims, [5, 6]);
        fs.scatter_face_add(sel, &face, 1.0).unwrap();
        assert_ne!(fs, before);
        fs.scatter_face_add(sel, &face, -2.0).unwrap();
        fs.scatter_face_add(sel, &face, 1.0).unwrap();
        assert_eq!(fs, before);
    }

    #[test]
    fn scatter_touches_only_selected_face() {
        let g = grid(4);
        let mut fs = FieldSet::<f64>::zeros(g);
        let sel = FaceSelector::new(Face::XLow, Component::Hz).unwrap();
        let face = fs.extract_face(sel).unwrap();
        let ones = Face2 { dims: face.dims, data: vec![1.0; face.data.len()] };
        fs.scatter_face_add(sel, &ones, 2.5).unwrap();
        let hz = fs.get(Component::Hz);
        for k in 0..hz.dims[2] {
            for j in 0..hz.dims[1] {
                for i in 0..hz.dims[0] {
                    let expect = if i == 0 { 2.5 } else { 0.0 };
                    assert_eq!(hz.get(i, j, k), expect);
                }
            }
        }
        for c in Component::ALL.into_iter().filter(|c| *c != Component::Hz) {
            assert!(fs.get(c).data.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn normal_component_face_is_rejected() {
        assert!(FaceSelector::new(Face::ZLow, Component::Ez).is_err());
        assert!(FaceSelector::new(Face::XHigh, Component::Hx).is_err());
    }

    #[test]
    fn nearest_node_lookup() {
        let g = GridSpec::cubic(25, 0.04).unwrap();
        let ez = g.layout(Component::Ez);
        assert_eq!(ez.nearest_node([0.4, 0.4, 0.5]), [10, 10, 13]);
        let p = ez.position([10, 10, 13]);
        assert!((p[2] - 0.5).abs() < 1e-12);
    }
}
