//! Excitation waveforms, soft sources and probes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Axis, Component, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Waveform {
    /// `exp(-4 pi (t - t0)^2 / tw^2)`
    Gaussian { tw: f64, t0: f64 },
    /// `sin(2 pi f t) exp(-4 pi (t - t0)^2 / tw^2)`
    ModulatedGaussian { f: f64, tw: f64, t0: f64 },
    /// `sin(2 pi f t)`
    Sinusoid { f: f64 },
}

impl Waveform {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Waveform::Gaussian { tw, t0 } => tw > 0.0 && t0.is_finite(),
            Waveform::ModulatedGaussian { f, tw, t0 } => f > 0.0 && tw > 0.0 && t0.is_finite(),
            Waveform::Sinusoid { f } => f > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid waveform parameters {self:?}")))
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let gauss = |tw: f64, t0: f64| (-4.0 * PI * (t - t0).powi(2) / (tw * tw)).exp();
        match *self {
            Waveform::Gaussian { tw, t0 } => gauss(tw, t0),
            Waveform::ModulatedGaussian { f, tw, t0 } => (2.0 * PI * f * t).sin() * gauss(tw, t0),
            Waveform::Sinusoid { f } => (2.0 * PI * f * t).sin(),
        }
    }

    /// Time after which the envelope stays below `1e-12` of its peak, if the
    /// waveform is transient.
    pub fn extinction_time(&self) -> Option<f64> {
        // exp(-4 pi x^2) = 1e-12  =>  x = sqrt(12 ln 10 / (4 pi))
        let x = (12.0 * std::f64::consts::LN_10 / (4.0 * PI)).sqrt();
        match *self {
            Waveform::Gaussian { tw, t0 } | Waveform::ModulatedGaussian { tw, t0, .. } => Some(t0 + x * tw),
            Waveform::Sinusoid { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SourceTarget {
    /// A single component node.
    Point { component: Component, node: [usize; 3] },
    /// Every node of `component` whose position lies in the box.
    Volume { component: Component, min: [f64; 3], max: [f64; 3] },
}

/// Soft current source `J = amplitude * f(t)` added to the E update as
/// `dt / eps * J`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSpec {
    pub waveform: Waveform,
    pub target: SourceTarget,
    pub amplitude: f64,
}

impl SourceSpec {
    pub fn point(waveform: Waveform, component: Component, node: [usize; 3], amplitude: f64) -> Self {
        SourceSpec { waveform, target: SourceTarget::Point { component, node }, amplitude }
    }

    pub fn component(&self) -> Component {
        match self.target {
            SourceTarget::Point { component, .. } | SourceTarget::Volume { component, .. } => component,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * self.waveform.value(t)
    }

    /// Resolve the target to flat indices into the component array.
    pub fn resolve(&self, grid: &GridSpec) -> Result<Vec<usize>> {
        self.waveform.validate()?;
        let comp = self.component();
        if !comp.is_electric() {
            return Err(Error::Config(format!("sources drive E components, got {comp}")));
        }
        let lay = grid.layout(comp);
        match &self.target {
            SourceTarget::Point { node, .. } => {
                if !lay.contains(*node) {
                    return Err(Error::OutOfRange(format!("source node {node:?} for {comp}")));
                }
                Ok(vec![lay.index(node[0], node[1], node[2])])
            }
            SourceTarget::Volume { min, max, .. } => {
                let mut out = Vec::new();
                for k in 0..lay.dims[2] {
                    for j in 0..lay.dims[1] {
                        for i in 0..lay.dims[0] {
                            let p = lay.position([i, j, k]);
                            if (0..3).all(|a| p[a] >= min[a] && p[a] <= max[a]) {
                                out.push(lay.index(i, j, k));
                            }
                        }
                    }
                }
                if out.is_empty() {
                    return Err(Error::Config(format!("source volume contains no {comp} nodes")));
                }
                Ok(out)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeKind {
    PointField {
        component: Component,
        node: [usize; 3],
    },
    /// Tangential E and H on the plane `index` (Plus-grid node index) normal
    /// to `axis`, over the transverse node ranges `extent`.
    PlaneFlux {
        axis: Axis,
        index: usize,
        extent: [std::ops::Range<usize>; 2],
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSpec {
    pub name: String,
    pub kind: ProbeKind,
    pub stride: usize,
}

impl ProbeSpec {
    pub fn point(name: impl Into<String>, component: Component, node: [usize; 3], stride: usize) -> Self {
        ProbeSpec { name: name.into(), kind: ProbeKind::PointField { component, node }, stride }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.stride == 0 {
            return Err(Error::Config(format!("probe {}: stride must be >= 1", self.name)));
        }
        match &self.kind {
            ProbeKind::PointField { component, node } => {
                if !grid.layout(*component).contains(*node) {
                    return Err(Error::OutOfRange(format!(
                        "probe {}: node {node:?} outside {component} layout",
                        self.name
                    )));
                }
            }
            ProbeKind::PlaneFlux { axis, index, extent } => {
                let a = axis.index();
                if *index > grid.cells[a] {
                    return Err(Error::OutOfRange(format!("probe {}: plane index {index}", self.name)));
                }
                let (b, c) = axis.cyclic();
                for (r, t) in extent.iter().zip([b, c]) {
                    if r.start >= r.end || r.end > grid.cells[t.index()] + 1 {
                        return Err(Error::OutOfRange(format!("probe {}: plane extent {r:?}", self.name)));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_peak_and_tail() {
        let w = Waveform::Gaussian { tw: 0.35e-9, t0: 0.28e-9 };
        assert_eq!(w.value(0.28e-9), 1.0);
        let expect = (-4.0 * PI * (0.28f64 / 0.35).powi(2)).exp();
        assert!((w.value(0.0) - expect).abs() < 1e-15);
        assert!((expect.ln() + 8.042).abs() < 1e-3);
    }

    #[test]
    fn modulated_zero_crossing() {
        let w = Waveform::ModulatedGaussian { f: 1e9, tw: 1e-9, t0: 3e-9 };
        assert!(w.value(3e-9).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let tw = 1e-9;
        let w = Waveform::Gaussian { tw, t0: 2e-9 };
        let dt = 1e-12;
        let sum: f64 = (0..4000).map(|n| w.value(n as f64 * dt) * dt).sum();
        assert!((sum - tw / 2.0).abs() / (tw / 2.0) < 0.01);
    }

    #[test]
    fn extinction() {
        let w = Waveform::Gaussian { tw: 1.0, t0: 2.0 };
        let te = w.extinction_time().unwrap();
        assert!((w.value(te) - 1e-12).abs() < 1e-20);
        assert!(Waveform::Sinusoid { f: 1.0 }.extinction_time().is_none());
    }

    #[test]
    fn invalid_waveforms() {
        assert!(Waveform::Gaussian { tw: 0.0, t0: 0.0 }.validate().is_err());
        assert!(Waveform::Sinusoid { f: -1.0 }.validate().is_err());
    }

    #[test]
    fn resolve_targets() {
        let g = GridSpec::cubic(4, 0.25).unwrap();
        let w = Waveform::Sinusoid { f: 1.0 };
        let s = SourceSpec::point(w, Component::Ez, [2, 2, 2], 1.0);
        assert_eq!(s.resolve(&g).unwrap(), vec![g.layout(Component::Ez).index(2, 2, 2)]);
        let s = SourceSpec::point(w, Component::Hz, [2, 2, 2], 1.0);
        assert!(s.resolve(&g).is_err());
        let s = SourceSpec::point(w, Component::Ez, [9, 2, 2], 1.0);
        assert!(s.resolve(&g).is_err());
        let v = SourceSpec {
            waveform: w,
            target: SourceTarget::Volume { component: Component::Ez, min: [0.4, 0.4, 0.0], max: [0.6, 0.6, 1.0] },
            amplitude: 1.0,
        };
        // one x node, one y node, all 6 Minus nodes along z
        assert_eq!(v.resolve(&g).unwrap().len(), 6);
    }

    #[test]
    fn probe_validation() {
        let g = GridSpec::cubic(4, 0.25).unwrap();
        assert!(ProbeSpec::point("p", Component::Ez, [4, 4, 5], 1).validate(&g).is_ok());
        assert!(ProbeSpec::point("p", Component::Ez, [5, 4, 5], 1).validate(&g).is_err());
        assert!(ProbeSpec::point("p", Component::Ez, [0, 0, 0], 0).validate(&g).is_err());
    }
}
