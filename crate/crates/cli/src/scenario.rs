//! Scenario files.
//!
//! A scenario is plain text. The first non-blank, non-comment line must be
//! the header `sbpsat-scenario 1`. The rest is `[section]` headers followed
//! by `key = value` lines; `#` starts a comment. `material`, `source` and
//! `probe` sections may repeat. Vectors are whitespace separated. See the
//! README for the full key list.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use sbpsat_core::solver::BoundaryKind;
use sbpsat_core::{
    cfl_max_dt, Axis, CellMaterial, Component, Face, GridSpec, MaterialGrid, ProbeKind, ProbeSpec, Region, SatConfig,
    SourceSpec, SourceTarget, Waveform,
};

pub const HEADER: &str = "sbpsat-scenario";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioError {
    Syntax { line: usize, message: String },
    Semantic { path: String, message: String },
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            ScenarioError::Semantic { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

/// All problems found in a scenario file.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioErrors(pub Vec<ScenarioError>);

impl fmt::Display for ScenarioErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, e) in self.0.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ScenarioErrors {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep {
    /// Multiple of the CFL limit.
    Factor(f64),
    Explicit(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialRegion {
    pub region: Region,
    pub material: CellMaterial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SnapshotFormat {
    #[default]
    Vtk,
    Csv,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub energy_stride: Option<u64>,
    pub snapshot_steps: Vec<u64>,
    pub snapshot_components: Vec<Component>,
    pub snapshot_format: SnapshotFormat,
    pub spectrum: bool,
    pub window: sbpsat_core::diagnostics::Window,
    pub remove_mean: bool,
    /// Zero-pad probe records to at least this many samples.
    pub pad_to: Option<usize>,
    pub sar: bool,
    pub progress: u64,
    pub finite_check: u64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            energy_stride: None,
            snapshot_steps: Vec::new(),
            snapshot_components: Vec::new(),
            snapshot_format: SnapshotFormat::Vtk,
            spectrum: false,
            window: sbpsat_core::diagnostics::Window::None,
            remove_mean: false,
            pad_to: None,
            sar: false,
            progress: 0,
            finite_check: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub grid: GridSpec,
    pub boundary: [BoundaryKind; 6],
    pub phases: [f64; 3],
    pub materials: Vec<MaterialRegion>,
    /// Voxel CSV, resolved against the scenario's directory.
    pub voxels: Option<PathBuf>,
    pub sources: Vec<SourceSpec>,
    pub probes: Vec<ProbeSpec>,
    pub steps: u64,
    pub time_step: TimeStep,
    pub allow_unstable: bool,
    pub output: OutputSpec,
    pub seed: u64,
    /// Fill every field with uniform noise of this amplitude before running.
    pub random_init: Option<f64>,
}

impl Scenario {
    pub fn sat_config(&self) -> sbpsat_core::Result<SatConfig> {
        SatConfig::new(self.boundary, self.phases)
    }

    pub fn material_grid(&self) -> anyhow::Result<MaterialGrid> {
        let mut m = MaterialGrid::vacuum(self.grid);
        for r in &self.materials {
            m.paint(&r.region, r.material)?;
        }
        if let Some(p) = &self.voxels {
            let text = std::fs::read_to_string(p).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?;
            m.apply_voxel_csv(&text)?;
        }
        Ok(m)
    }

    /// Time step implied by the policy and the materials.
    pub fn dt(&self, materials: &MaterialGrid) -> f64 {
        match self.time_step {
            TimeStep::Factor(f) => f * cfl_max_dt(&self.grid, materials),
            TimeStep::Explicit(dt) => dt,
        }
    }

    pub fn needs_complex(&self) -> bool {
        self.phases.iter().any(|p| *p != 0.0)
    }
}

#[derive(Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug)]
struct Section {
    name: String,
    entries: Vec<Entry>,
}

pub fn parse_scenario_file(path: impl AsRef<Path>) -> Result<Scenario, ScenarioErrors> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| {
        ScenarioErrors(vec![ScenarioError::Semantic { path: path.display().to_string(), message: e.to_string() }])
    })?;
    parse_scenario(&text, path.parent())
}

/// Parse and validate; `base` resolves relative file references.
pub fn parse_scenario(text: &str, base: Option<&Path>) -> Result<Scenario, ScenarioErrors> {
    let mut errors = Vec::new();
    let sections = lex(text, &mut errors);
    if !errors.is_empty() {
        return Err(ScenarioErrors(errors));
    }
    let mut b = Builder { errors: Vec::new(), counts: BTreeMap::new() };
    let sc = b.build(&sections, base);
    if b.errors.is_empty() {
        Ok(sc.expect("scenario built without errors"))
    } else {
        Err(ScenarioErrors(b.errors))
    }
}

fn lex(text: &str, errors: &mut Vec<ScenarioError>) -> Vec<Section> {
    let mut sections: Vec<Section> = Vec::new();
    let mut header = false;
    let mut last_line = 0;
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !header {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(HEADER), Some(v), None) => match v.parse::<u32>() {
                    Ok(VERSION) => {}
                    _ => errors.push(ScenarioError::Syntax {
                        line: line_no,
                        message: format!("unsupported scenario version {v:?} (expected {VERSION})"),
                    }),
                },
                _ => errors.push(ScenarioError::Syntax {
                    line: line_no,
                    message: format!("expected header `{HEADER} {VERSION}`"),
                }),
            }
            header = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            match rest.strip_suffix(']') {
                Some(name) if !name.trim().is_empty() => {
                    sections.push(Section { name: name.trim().to_ascii_lowercase(), entries: Vec::new() })
                }
                _ => errors.push(ScenarioError::Syntax {
                    line: line_no,
                    message: format!("malformed section header {line:?}"),
                }),
            }
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(ScenarioError::Syntax {
                line: line_no,
                message: format!("expected `key = value`, got {line:?}"),
            });
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            errors.push(ScenarioError::Syntax { line: line_no, message: "empty key".into() });
            continue;
        }
        match sections.last_mut() {
            Some(s) => s.entries.push(Entry { key: k.to_ascii_lowercase(), value: v.to_string(), line: line_no }),
            None => errors.push(ScenarioError::Syntax { line: line_no, message: "key outside of any section".into() }),
        }
    }
    if !header {
        errors.push(ScenarioError::Syntax {
            line: last_line.max(1),
            message: format!("empty scenario: expected header `{HEADER} {VERSION}`"),
        });
    }
    sections
}

struct Builder {
    errors: Vec<ScenarioError>,
    counts: BTreeMap<String, usize>,
}

/// Keys of one section, consumed as they are read so leftovers can be
/// reported as unknown.
struct Fields<'a> {
    path: String,
    entries: BTreeMap<&'a str, &'a Entry>,
}

impl Builder {
    fn err(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ScenarioError::Semantic { path: path.into(), message: message.into() });
    }

    fn fields<'a>(&mut self, s: &'a Section) -> Fields<'a> {
        let idx = self.counts.entry(s.name.clone()).or_insert(0);
        let path = if matches!(s.name.as_str(), "material" | "source" | "probe") {
            format!("{}[{}]", s.name, idx)
        } else {
            s.name.clone()
        };
        *idx += 1;
        let mut entries = BTreeMap::new();
        for e in &s.entries {
            if entries.insert(e.key.as_str(), e).is_some() {
                self.errors.push(ScenarioError::Syntax {
                    line: e.line,
                    message: format!("duplicate key `{}` in {path}", e.key),
                });
            }
        }
        Fields { path, entries }
    }

    fn finish(&mut self, f: Fields<'_>) {
        for (k, e) in f.entries {
            self.errors
                .push(ScenarioError::Syntax { line: e.line, message: format!("unknown key `{k}` in {}", f.path) });
        }
    }

    fn take<T>(&mut self, f: &mut Fields<'_>, key: &str, parse: impl Fn(&str) -> Option<T>, what: &str) -> Option<T> {
        let e = f.entries.remove(key)?;
        match parse(&e.value) {
            Some(v) => Some(v),
            None => {
                self.errors.push(ScenarioError::Syntax {
                    line: e.line,
                    message: format!("{}.{key}: expected {what}, got {:?}", f.path, e.value),
                });
                None
            }
        }
    }

    fn required<T>(
        &mut self,
        f: &mut Fields<'_>,
        key: &str,
        parse: impl Fn(&str) -> Option<T>,
        what: &str,
    ) -> Option<T> {
        let present = f.entries.contains_key(key);
        let v = self.take(f, key, parse, what);
        if !present {
            self.err(format!("{}.{key}", f.path), "missing");
        }
        v
    }

    fn build(&mut self, sections: &[Section], base: Option<&Path>) -> Option<Scenario> {
        let mut grid = None;
        let mut boundary = [BoundaryKind::Pec; 6];
        let mut phases = [0.0; 3];
        let mut steps = None;
        let mut time_step = TimeStep::Factor(0.99);
        let mut allow_unstable = false;
        let mut materials = Vec::new();
        let mut voxels = None;
        let mut sources = Vec::new();
        let mut probes = Vec::new();
        let mut output = OutputSpec::default();
        let mut seed = 0;
        let mut random_init = None;
        let mut pending_sources = Vec::new();
        let mut pending_probes = Vec::new();

        for s in sections {
            let mut f = self.fields(s);
            match s.name.as_str() {
                "grid" => {
                    let cells = self.required(&mut f, "cells", parse_usize3, "three cell counts");
                    let spacing = self.required(&mut f, "spacing", parse_f3, "three spacings");
                    if let (Some(c), Some(h)) = (cells, spacing) {
                        match GridSpec::new(c, h) {
                            Ok(g) => grid = Some(g),
                            Err(e) => self.err("grid", e.to_string()),
                        }
                    }
                }
                "boundary" => {
                    if let Some(k) = self.take(&mut f, "all", BoundaryKind::parse, "pec|pmc|periodic") {
                        boundary = [k; 6];
                    }
                    for face in Face::ALL {
                        if let Some(k) = self.take(&mut f, face.name(), BoundaryKind::parse, "pec|pmc|periodic") {
                            boundary[face.index()] = k;
                        }
                    }
                    if let Some(p) = self.take(&mut f, "phase", parse_f3, "three phases in radians") {
                        phases = p;
                    }
                }
                "time" => {
                    steps = self.required(&mut f, "steps", |v| v.parse().ok(), "a step count");
                    let factor = self.take(&mut f, "dt_factor", parse_f64, "a number");
                    let dt = self.take(&mut f, "dt", parse_f64, "a time step in seconds");
                    match (factor, dt) {
                        (Some(_), Some(_)) => self.err("time", "give either dt_factor or dt, not both"),
                        (Some(x), None) => time_step = TimeStep::Factor(x),
                        (None, Some(x)) => time_step = TimeStep::Explicit(x),
                        (None, None) => {}
                    }
                    if let Some(a) = self.take(&mut f, "allow_unstable", parse_bool, "true|false") {
                        allow_unstable = a;
                    }
                }
                "material" => {
                    let path = f.path.clone();
                    let shape = self.required(&mut f, "shape", |v| Some(v.to_ascii_lowercase()), "box|cylinder");
                    let region = match shape.as_deref() {
                        Some("box") => {
                            let min = self.required(&mut f, "min", parse_f3, "a point");
                            let max = self.required(&mut f, "max", parse_f3, "a point");
                            min.zip(max).map(|(min, max)| Region::Box { min, max })
                        }
                        Some("cylinder") => {
                            let center = self.required(&mut f, "center", parse_f3, "a point");
                            let radius = self.required(&mut f, "radius", parse_f64, "a radius");
                            let height = self.required(&mut f, "height", parse_f64, "a height");
                            match (center, radius, height) {
                                (Some(center), Some(radius), Some(height)) => {
                                    Some(Region::Cylinder { center, radius, height })
                                }
                                _ => None,
                            }
                        }
                        Some(other) => {
                            self.err(format!("{path}.shape"), format!("unknown shape {other:?}"));
                            None
                        }
                        None => None,
                    };
                    let mut m = CellMaterial::VACUUM;
                    if let Some(v) = self.take(&mut f, "eps_r", parse_f64, "a number") {
                        m.eps_r = v;
                    }
                    if let Some(v) = self.take(&mut f, "mu_r", parse_f64, "a number") {
                        m.mu_r = v;
                    }
                    if let Some(v) = self.take(&mut f, "sigma", parse_f64, "a number") {
                        m.sigma = v;
                    }
                    if let Some(v) = self.take(&mut f, "rho", parse_f64, "a number") {
                        m.rho = v;
                    }
                    if let Err(e) = m.validate() {
                        self.err(path.clone(), e.to_string());
                    }
                    if let Some(region) = region {
                        materials.push(MaterialRegion { region, material: m });
                    }
                }
                "voxels" => {
                    if let Some(p) = self.required(&mut f, "file", |v| Some(PathBuf::from(v)), "a path") {
                        voxels = Some(match base {
                            Some(b) if p.is_relative() => b.join(p),
                            _ => p,
                        });
                    }
                }
                "source" => {
                    let path = f.path.clone();
                    let wave = self.waveform(&mut f);
                    let component = self.required(&mut f, "component", Component::parse, "a component name");
                    let amplitude = self.take(&mut f, "amplitude", parse_f64, "a number").unwrap_or(1.0);
                    let loc = self.location(&mut f, true);
                    if let (Some(w), Some(c), Some(l)) = (wave, component, loc) {
                        pending_sources.push((path, w, c, l, amplitude));
                    }
                }
                "probe" => {
                    let path = f.path.clone();
                    let name = self.take(&mut f, "name", |v| Some(v.to_string()), "a name");
                    let stride = self.take(&mut f, "stride", |v| v.parse().ok(), "a positive integer").unwrap_or(1);
                    let kind = self.take(&mut f, "kind", |v| Some(v.to_ascii_lowercase()), "point|plane");
                    match kind.as_deref().unwrap_or("point") {
                        "point" => {
                            let component = self.required(&mut f, "component", Component::parse, "a component name");
                            let loc = self.location(&mut f, false);
                            if let (Some(c), Some(l)) = (component, loc) {
                                pending_probes.push((path, name, stride, PendingProbe::Point(c, l)));
                            }
                        }
                        "plane" => {
                            let axis = self.required(&mut f, "axis", parse_axis, "x|y|z");
                            let index = self.required(&mut f, "index", |v| v.parse().ok(), "a node index");
                            let extent = self.take(&mut f, "extent", parse_usize4, "four node bounds");
                            if let (Some(a), Some(i)) = (axis, index) {
                                pending_probes.push((path, name, stride, PendingProbe::Plane(a, i, extent)));
                            }
                        }
                        other => self.err(format!("{path}.kind"), format!("unknown probe kind {other:?}")),
                    }
                }
                "output" => {
                    output.energy_stride = self.take(&mut f, "energy_stride", |v| v.parse().ok(), "a positive integer");
                    if let Some(v) = self.take(&mut f, "snapshots", parse_u64_list, "step numbers") {
                        output.snapshot_steps = v;
                    }
                    if let Some(v) = self.take(&mut f, "snapshot_components", parse_components, "component names") {
                        output.snapshot_components = v;
                    }
                    if let Some(v) = self.take(&mut f, "snapshot_format", parse_format, "vtk|csv|both") {
                        output.snapshot_format = v;
                    }
                    if let Some(v) = self.take(&mut f, "spectrum", parse_bool, "true|false") {
                        output.spectrum = v;
                    }
                    if let Some(v) = self.take(&mut f, "window", sbpsat_core::diagnostics::Window::parse, "none|hann") {
                        output.window = v;
                    }
                    if let Some(v) = self.take(&mut f, "remove_mean", parse_bool, "true|false") {
                        output.remove_mean = v;
                    }
                    output.pad_to = self.take(&mut f, "pad_to", |v| v.parse().ok(), "a sample count");
                    if let Some(v) = self.take(&mut f, "sar", parse_bool, "true|false") {
                        output.sar = v;
                    }
                    if let Some(v) = self.take(&mut f, "progress", |v| v.parse().ok(), "a step count") {
                        output.progress = v;
                    }
                    if let Some(v) = self.take(&mut f, "finite_check", |v| v.parse().ok(), "a step count") {
                        output.finite_check = v;
                    }
                }
                "run" => {
                    if let Some(v) = self.take(&mut f, "seed", |v| v.parse().ok(), "an integer") {
                        seed = v;
                    }
                    random_init = self.take(&mut f, "random_init", parse_f64, "an amplitude");
                }
                "manifest" => {
                    // written by `simulate`; informational only
                    f.entries.clear();
                }
                other => {
                    let line = s.entries.first().map_or(0, |e| e.line);
                    self.err(format!("[{other}]"), format!("unknown section (first key on line {line})"));
                    f.entries.clear();
                }
            }
            self.finish(f);
        }

        let Some(grid) = grid else {
            self.err("grid", "missing [grid] section");
            return None;
        };
        if steps.is_none() && !sections.iter().any(|s| s.name == "time") {
            self.err("time.steps", "missing [time] section");
        }

        if let Err(e) = SatConfig::new(boundary, phases) {
            self.err("boundary", e.to_string());
        }
        match time_step {
            TimeStep::Factor(x) if !(x > 0.0 && x.is_finite()) => self.err("time.dt_factor", "must be positive"),
            TimeStep::Factor(x) if x > 1.0 && !allow_unstable => self
                .err("time.dt_factor", format!("{x} exceeds the CFL limit; set allow_unstable = true to run anyway")),
            TimeStep::Explicit(x) if !(x > 0.0 && x.is_finite()) => self.err("time.dt", "must be positive"),
            _ => {}
        }
        if let TimeStep::Explicit(dt) = time_step {
            let mut mats = MaterialGrid::vacuum(grid);
            for r in &materials {
                let _ = mats.paint(&r.region, r.material);
            }
            let limit = cfl_max_dt(&grid, &mats);
            if dt > limit && !allow_unstable {
                self.err("time.dt", format!("{dt:e} s exceeds the CFL limit {limit:e} s; set allow_unstable = true"));
            }
        }
        if output.energy_stride == Some(0) {
            self.err("output.energy_stride", "must be >= 1");
        }
        if let Some(p) = &voxels {
            if !p.exists() {
                self.err("voxels.file", format!("{} not found", p.display()));
            }
        }

        for (path, waveform, component, loc, amplitude) in pending_sources {
            let target = match loc {
                Location::Node(node) => SourceTarget::Point { component, node },
                Location::Position(p) => {
                    SourceTarget::Point { component, node: grid.layout(component).nearest_node(p) }
                }
                Location::Volume(min, max) => SourceTarget::Volume { component, min, max },
            };
            let spec = SourceSpec { waveform, target, amplitude };
            match spec.resolve(&grid) {
                Ok(_) => sources.push(spec),
                Err(e) => self.err(path, e.to_string()),
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for (n, (path, name, stride, p)) in pending_probes.into_iter().enumerate() {
            let name = name.unwrap_or_else(|| format!("probe{n}"));
            if !names.insert(name.clone()) {
                self.err(format!("{path}.name"), format!("duplicate probe name {name:?}"));
            }
            let kind = match p {
                PendingProbe::Point(component, loc) => {
                    let node = match loc {
                        Location::Node(n) => n,
                        Location::Position(p) => grid.layout(component).nearest_node(p),
                        Location::Volume(..) => unreachable!("probes take a single location"),
                    };
                    ProbeKind::PointField { component, node }
                }
                PendingProbe::Plane(axis, index, extent) => {
                    let (b, c) = axis.cyclic();
                    let extent = match extent {
                        Some([b0, b1, c0, c1]) => [b0..b1, c0..c1],
                        None => [0..grid.cells[b.index()] + 1, 0..grid.cells[c.index()] + 1],
                    };
                    ProbeKind::PlaneFlux { axis, index, extent }
                }
            };
            let spec = ProbeSpec { name, kind, stride };
            match spec.validate(&grid) {
                Ok(()) => probes.push(spec),
                Err(e) => self.err(path, e.to_string()),
            }
        }

        Some(Scenario {
            grid,
            boundary,
            phases,
            materials,
            voxels,
            sources,
            probes,
            steps: steps.unwrap_or(0),
            time_step,
            allow_unstable,
            output,
            seed,
            random_init,
        })
    }

    fn waveform(&mut self, f: &mut Fields<'_>) -> Option<Waveform> {
        let kind = self.required(f, "waveform", |v| Some(v.to_ascii_lowercase()), "a waveform")?;
        let path = f.path.clone();
        let w = match kind.as_str() {
            "gaussian" => {
                let tw = self.required(f, "tw", parse_f64, "seconds");
                let t0 = self.required(f, "t0", parse_f64, "seconds");
                Waveform::Gaussian { tw: tw?, t0: t0? }
            }
            "modulated_gaussian" => {
                let fr = self.required(f, "f", parse_f64, "hertz");
                let tw = self.required(f, "tw", parse_f64, "seconds");
                let t0 = self.required(f, "t0", parse_f64, "seconds");
                Waveform::ModulatedGaussian { f: fr?, tw: tw?, t0: t0? }
            }
            "sinusoid" => Waveform::Sinusoid { f: self.required(f, "f", parse_f64, "hertz")? },
            other => {
                self.err(format!("{path}.waveform"), format!("unknown waveform {other:?}"));
                return None;
            }
        };
        if let Err(e) = w.validate() {
            self.err(path, e.to_string());
            return None;
        }
        Some(w)
    }

    fn location(&mut self, f: &mut Fields<'_>, allow_volume: bool) -> Option<Location> {
        let node = self.take(f, "node", parse_usize3, "three node indices");
        let pos = self.take(f, "position", parse_f3, "a point in metres");
        let (min, max) = if allow_volume {
            (self.take(f, "min", parse_f3, "a point"), self.take(f, "max", parse_f3, "a point"))
        } else {
            (None, None)
        };
        let path = f.path.clone();
        match (node, pos, min, max) {
            (Some(n), None, None, None) => Some(Location::Node(n)),
            (None, Some(p), None, None) => Some(Location::Position(p)),
            (None, None, Some(a), Some(b)) => Some(Location::Volume(a, b)),
            (None, None, None, None) => {
                self.err(
                    path,
                    if allow_volume { "needs node, position, or min/max" } else { "needs node or position" },
                );
                None
            }
            _ => {
                self.err(path, "conflicting location keys");
                None
            }
        }
    }
}

enum Location {
    Node([usize; 3]),
    Position([f64; 3]),
    Volume([f64; 3], [f64; 3]),
}

enum PendingProbe {
    Point(Component, Location),
    Plane(Axis, usize, Option<[usize; 4]>),
}

fn parse_f64(v: &str) -> Option<f64> {
    v.parse().ok().filter(|x: &f64| x.is_finite())
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_n<T: std::str::FromStr, const N: usize>(v: &str) -> Option<[T; N]> {
    let items: Vec<T> = v.split_whitespace().map(|s| s.parse().ok()).collect::<Option<_>>()?;
    items.try_into().ok()
}

fn parse_f3(v: &str) -> Option<[f64; 3]> {
    parse_n::<f64, 3>(v).filter(|a| a.iter().all(|x| x.is_finite()))
}

fn parse_usize3(v: &str) -> Option<[usize; 3]> {
    parse_n(v)
}

fn parse_usize4(v: &str) -> Option<[usize; 4]> {
    parse_n(v)
}

fn parse_u64_list(v: &str) -> Option<Vec<u64>> {
    v.split_whitespace().map(|s| s.parse().ok()).collect()
}

fn parse_components(v: &str) -> Option<Vec<Component>> {
    v.split_whitespace().map(Component::parse).collect()
}

fn parse_axis(v: &str) -> Option<Axis> {
    match v.to_ascii_lowercase().as_str() {
        "x" => Some(Axis::X),
        "y" => Some(Axis::Y),
        "z" => Some(Axis::Z),
        _ => None,
    }
}

fn parse_format(v: &str) -> Option<SnapshotFormat> {
    match v.to_ascii_lowercase().as_str() {
        "vtk" => Some(SnapshotFormat::Vtk),
        "csv" => Some(SnapshotFormat::Csv),
        "both" => Some(SnapshotFormat::Both),
        _ => None,
    }
}

fn fmt3<T: fmt::Display>(v: &[T; 3]) -> String {
    format!("{} {} {}", v[0], v[1], v[2])
}

fn fmt_f3(v: &[f64; 3]) -> String {
    format!("{:e} {:e} {:e}", v[0], v[1], v[2])
}

/// Canonical text of a scenario with the time step pinned to `dt`. Parsing
/// the result yields the same run.
pub fn to_text(sc: &Scenario, dt: f64) -> String {
    let mut s = format!(
        "{HEADER} {VERSION}\n\n[grid]\ncells = {}\nspacing = {}\n",
        fmt3(&sc.grid.cells),
        fmt_f3(&sc.grid.spacing)
    );
    s.push_str("\n[boundary]\n");
    for face in Face::ALL {
        let _ = writeln!(s, "{} = {}", face.name(), sc.boundary[face.index()].name());
    }
    let _ = writeln!(s, "phase = {}", fmt_f3(&sc.phases));
    let _ = writeln!(s, "\n[time]\nsteps = {}\ndt = {dt:e}\nallow_unstable = {}", sc.steps, sc.allow_unstable);
    for r in &sc.materials {
        s.push_str("\n[material]\n");
        match &r.region {
            Region::Box { min, max } => {
                let _ = writeln!(s, "shape = box\nmin = {}\nmax = {}", fmt_f3(min), fmt_f3(max));
            }
            Region::Cylinder { center, radius, height } => {
                let _ = writeln!(
                    s,
                    "shape = cylinder\ncenter = {}\nradius = {radius:e}\nheight = {height:e}",
                    fmt_f3(center)
                );
            }
        }
        let m = r.material;
        let _ = writeln!(s, "eps_r = {:e}\nmu_r = {:e}\nsigma = {:e}\nrho = {:e}", m.eps_r, m.mu_r, m.sigma, m.rho);
    }
    if let Some(p) = &sc.voxels {
        let _ = writeln!(s, "\n[voxels]\nfile = {}", p.display());
    }
    for src in &sc.sources {
        s.push_str("\n[source]\n");
        match src.waveform {
            Waveform::Gaussian { tw, t0 } => {
                let _ = writeln!(s, "waveform = gaussian\ntw = {tw:e}\nt0 = {t0:e}");
            }
            Waveform::ModulatedGaussian { f, tw, t0 } => {
                let _ = writeln!(s, "waveform = modulated_gaussian\nf = {f:e}\ntw = {tw:e}\nt0 = {t0:e}");
            }
            Waveform::Sinusoid { f } => {
                let _ = writeln!(s, "waveform = sinusoid\nf = {f:e}");
            }
        }
        let _ = writeln!(s, "amplitude = {:e}\ncomponent = {}", src.amplitude, src.component());
        match &src.target {
            SourceTarget::Point { node, .. } => {
                let _ = writeln!(s, "node = {}", fmt3(node));
            }
            SourceTarget::Volume { min, max, .. } => {
                let _ = writeln!(s, "min = {}\nmax = {}", fmt_f3(min), fmt_f3(max));
            }
        }
    }
    for p in &sc.probes {
        let _ = writeln!(s, "\n[probe]\nname = {}\nstride = {}", p.name, p.stride);
        match &p.kind {
            ProbeKind::PointField { component, node } => {
                let _ = writeln!(s, "kind = point\ncomponent = {component}\nnode = {}", fmt3(node));
            }
            ProbeKind::PlaneFlux { axis, index, extent } => {
                let _ = writeln!(
                    s,
                    "kind = plane\naxis = {}\nindex = {index}\nextent = {} {} {} {}",
                    axis.name(),
                    extent[0].start,
                    extent[0].end,
                    extent[1].start,
                    extent[1].end
                );
            }
        }
    }
    let o = &sc.output;
    s.push_str("\n[output]\n");
    if let Some(e) = o.energy_stride {
        let _ = writeln!(s, "energy_stride = {e}");
    }
    if !o.snapshot_steps.is_empty() {
        let steps: Vec<String> = o.snapshot_steps.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "snapshots = {}", steps.join(" "));
    }
    if !o.snapshot_components.is_empty() {
        let comps: Vec<&str> = o.snapshot_components.iter().map(|c| c.name()).collect();
        let _ = writeln!(s, "snapshot_components = {}", comps.join(" "));
    }
    let fmt = match o.snapshot_format {
        SnapshotFormat::Vtk => "vtk",
        SnapshotFormat::Csv => "csv",
        SnapshotFormat::Both => "both",
    };
    let window = match o.window {
        sbpsat_core::diagnostics::Window::None => "none",
        sbpsat_core::diagnostics::Window::Hann => "hann",
    };
    let _ = writeln!(
        s,
        "snapshot_format = {fmt}\nspectrum = {}\nwindow = {window}\nremove_mean = {}\nsar = {}\nprogress = {}\nfinite_check = {}",
        o.spectrum, o.remove_mean, o.sar, o.progress, o.finite_check
    );
    if let Some(p) = o.pad_to {
        let _ = writeln!(s, "pad_to = {p}");
    }
    let _ = writeln!(s, "\n[run]\nseed = {}", sc.seed);
    if let Some(a) = sc.random_init {
        let _ = writeln!(s, "random_init = {a:e}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "sbpsat-scenario 1\n[grid]\ncells = 4 4 4\nspacing = 0.1 0.1 0.1\n[time]\nsteps = 10\n";

    fn errors(text: &str) -> Vec<ScenarioError> {
        parse_scenario(text, None).unwrap_err().0
    }

    #[test]
    fn minimal_defaults() {
        let sc = parse_scenario(MINIMAL, None).unwrap();
        assert_eq!(sc.grid.cells, [4, 4, 4]);
        assert_eq!(sc.boundary, [BoundaryKind::Pec; 6]);
        assert_eq!(sc.time_step, TimeStep::Factor(0.99));
        assert_eq!(sc.steps, 10);
    }

    #[test]
    fn empty_file_is_line_one() {
        assert_eq!(
            errors(""),
            vec![ScenarioError::Syntax {
                line: 1,
                message: "empty scenario: expected header `sbpsat-scenario 1`".into()
            }]
        );
        assert!(matches!(errors("# just a comment\n")[0], ScenarioError::Syntax { line: 1, .. }));
    }

    #[test]
    fn bad_header_and_version() {
        assert!(matches!(errors("hello\n")[0], ScenarioError::Syntax { line: 1, .. }));
        assert!(matches!(errors("\n\nsbpsat-scenario 9\n")[0], ScenarioError::Syntax { line: 3, .. }));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = errors("sbpsat-scenario 1\n[grid]\ncells 4 4 4\n[oops\n");
        assert!(matches!(e[0], ScenarioError::Syntax { line: 3, .. }));
        assert!(matches!(e[1], ScenarioError::Syntax { line: 4, .. }));
    }

    #[test]
    fn cfl_violation_needs_override() {
        let text = format!("{MINIMAL}dt_factor = 1.5\n");
        let e = errors(&text);
        assert!(e.iter().any(|e| matches!(e, ScenarioError::Semantic { path, .. } if path == "time.dt_factor")));
        let ok = parse_scenario(&format!("{text}allow_unstable = true\n"), None).unwrap();
        assert_eq!(ok.time_step, TimeStep::Factor(1.5));
        let e = errors(&format!("{MINIMAL}dt = 1.0\n"));
        assert!(e.iter().any(|e| matches!(e, ScenarioError::Semantic { path, .. } if path == "time.dt")));
    }

    #[test]
    fn collects_all_semantic_errors() {
        let text = format!(
            "{MINIMAL}[boundary]\nx_low = periodic\n[source]\nwaveform = gaussian\ntw = -1\nt0 = 0\ncomponent = Ez\nnode = 1 1 1\n\
             [probe]\ncomponent = Hx\nnode = 40 0 0\n[material]\nshape = box\nmin = 0 0 0\nmax = 1 1 1\neps_r = -2\n"
        );
        let e = errors(&text);
        let paths: Vec<String> = e
            .iter()
            .filter_map(|e| match e {
                ScenarioError::Semantic { path, .. } => Some(path.clone()),
                _ => None,
            })
            .collect();
        assert!(paths.contains(&"boundary".to_string()), "{paths:?}");
        assert!(paths.contains(&"source[0]".to_string()), "{paths:?}");
        assert!(paths.contains(&"probe[0]".to_string()), "{paths:?}");
        assert!(paths.contains(&"material[0]".to_string()), "{paths:?}");
    }

    #[test]
    fn unknown_keys_and_sections() {
        let e = errors(&format!("{MINIMAL}colour = red\n[extras]\na = 1\n"));
        assert!(matches!(&e[0], ScenarioError::Syntax { line: 7, message } if message.contains("colour")));
        assert!(matches!(&e[1], ScenarioError::Semantic { path, .. } if path == "[extras]"));
    }

    #[test]
    fn positions_map_to_nearest_nodes() {
        let text = "sbpsat-scenario 1\n[grid]\ncells = 25 25 25\nspacing = 0.04 0.04 0.04\n[time]\nsteps = 1\n\
                    [probe]\nname = p\ncomponent = Ez\nposition = 0.4 0.4 0.4\n";
        let sc = parse_scenario(text, None).unwrap();
        assert_eq!(sc.probes[0].kind, ProbeKind::PointField { component: Component::Ez, node: [10, 10, 10] });
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = "sbpsat-scenario 1\n[grid]\ncells = 6 5 4\nspacing = 0.1 0.2 0.3\n[boundary]\nall = periodic\nphase = 0.5 0 0\n\
                    [time]\nsteps = 7\n[material]\nshape = cylinder\ncenter = 0.3 0.5 0.6\nradius = 0.2\nheight = 0.4\neps_r = 4\n\
                    [source]\nwaveform = modulated_gaussian\nf = 1e9\ntw = 1e-9\nt0 = 2e-9\ncomponent = Ey\nmin = 0 0 0\nmax = 0.3 0.3 0.3\n\
                    [probe]\nname = flux\nkind = plane\naxis = y\nindex = 2\nstride = 3\n\
                    [output]\nenergy_stride = 2\nsnapshots = 0 7\nsnapshot_components = Ez Hx\nwindow = hann\npad_to = 64\n[run]\nseed = 4\nrandom_init = 0.5\n";
        let sc = parse_scenario(text, None).unwrap();
        assert!(sc.needs_complex());
        let dt = sc.dt(&sc.material_grid().unwrap());
        let again = parse_scenario(&to_text(&sc, dt), None).unwrap();
        assert_eq!(again.time_step, TimeStep::Explicit(dt));
        assert_eq!(Scenario { time_step: sc.time_step, ..again }, sc);
    }
}
