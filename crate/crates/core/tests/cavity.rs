use sbpsat_core::diagnostics::{spectrum_with, SpectrumOptions, Window};
use sbpsat_core::run::{run, RunPlan};
use sbpsat_core::{
    cfl_max_dt, Component, GridSpec, MaterialGrid, ProbeSpec, SatConfig, Solver, SourceSpec, Waveform, EPS0, MU0,
};

#[test]
fn coarse_pec_cube_rings_at_the_lowest_mode() {
    let n = 12;
    let g = GridSpec::cubic(n, 1.0 / n as f64).unwrap();
    let m = MaterialGrid::vacuum(g);
    let dt = 0.99 * cfl_max_dt(&g, &m);
    let mut s = Solver::<f64>::new(m, SatConfig::pec(), dt).unwrap();
    let ez = g.layout(Component::Ez);
    s.add_source(SourceSpec::point(
        Waveform::Gaussian { tw: 1e-9, t0: 1e-9 },
        Component::Ez,
        ez.nearest_node([0.5; 3]),
        1.0,
    ))
    .unwrap();
    let plan = RunPlan {
        steps: 8000,
        probes: vec![ProbeSpec::point("ez", Component::Ez, ez.nearest_node([0.4; 3]), 2)],
        energy_stride: Some(500),
        snapshot_steps: Vec::new(),
        track_peak_field: false,
        finite_check_stride: 100,
    };
    let art = run(&mut s, &plan, &mut ()).unwrap();
    assert_eq!(art.steps_run, 8000);
    assert!(art.diverged_at.is_none());

    // the source is off long before the first energy sample past 1000 steps
    let late: Vec<f64> = art.energy.iter().filter(|e| e.step >= 1000).map(|e| e.report.total).collect();
    let spread = late.iter().fold(0.0f64, |m, e| m.max((e - late[0]).abs())) / late[0];
    assert!(spread < 1e-10, "energy drift {spread:e}");

    let rec = &art.probes[0];
    let opts = SpectrumOptions { window: Window::Hann, remove_mean: true, ..SpectrumOptions::default() };
    let sp = spectrum_with(&rec.values, dt, rec.stride, &opts).unwrap();
    let f = sp.lowest().unwrap().frequency;
    let c = 1.0 / (EPS0 * MU0).sqrt();
    let exact = c / 2f64.sqrt();
    assert!(((f - exact) / exact).abs() < 0.015, "{f} vs {exact}");
}
