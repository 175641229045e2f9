use isochain::helmholtz::{spectrum_below_threshold, two_corner_geometry, two_corner_splitting, Bend};
use isochain::inverse::{newton_solve, sample_surface, InverseProblem};
use isochain::models::{model_couplings, ModelKind};
use isochain::spectral::{eig_jacobi, SymmetricSpectrum};
use isochain::waveguide::{
    design_guide, geometry_from_json, geometry_to_json, outline_from_svg, outline_to_svg, GuideParams, Pattern,
};
use std::collections::BTreeMap;

#[test]
fn whole_guide_solver_matches_two_corner_splitting() {
    let h = 0.1;
    let p = two_corner_splitting(3.0, Bend::U, h, 1.0).unwrap();
    let g = two_corner_geometry(3.0, Bend::U, 1.0).unwrap();
    let cmp = spectrum_below_threshold(&g, &GuideParams::default(), h).unwrap();
    assert_eq!(cmp.levels.len(), 2);
    assert!((cmp.levels[0] - p.e_sym).abs() < 1e-8);
    assert!((cmp.levels[1] - p.e_antisym).abs() < 1e-8);
    // the pair straddles the single-corner level
    assert!(cmp.levels[0] < cmp.bound && cmp.bound < cmp.levels[1]);
}

#[test]
fn inverse_then_design_round_trips_through_files() {
    let target = SymmetricSpectrum::new(vec![-1.0, -0.5, 0.0, 0.5, 1.0]).unwrap();
    let pins = BTreeMap::from([(1, 0.5), (4, 0.5)]);
    let sol = newton_solve(&InverseProblem::new(target.clone(), pins).unwrap()).unwrap();
    let e = eig_jacobi(&sol.couplings).spectrum;
    for (a, b) in e.values().iter().zip(target.values()) {
        assert!((a - b).abs() < 1e-10);
    }
    let params = GuideParams::default();
    let design = design_guide(&sol.couplings, &params, &Pattern::Meander, None).unwrap();
    let back = geometry_from_json(&geometry_to_json(&design.geometry)).unwrap();
    assert_eq!(back, design.geometry);
    assert_eq!(outline_from_svg(&outline_to_svg(&back)).unwrap(), back.outline());
    for (lvl, e) in design.predicted.iter().zip(target.values()) {
        assert!((lvl - params.bound - design.scale * e).abs() < 1e-12);
    }
}

#[test]
fn isospectral_samples_share_design_predictions() {
    let target = eig_jacobi(&model_couplings(&ModelKind::FiniteOscillator { sites: 5 }).unwrap()).spectrum;
    let samples = sample_surface(&target, 4, 9).unwrap();
    let params = GuideParams::default();
    let scale = 0.05;
    let first = design_guide(&samples[0], &params, &Pattern::Zigzag, Some(scale)).unwrap();
    for s in &samples[1..] {
        let d = design_guide(s, &params, &Pattern::Zigzag, Some(scale)).unwrap();
        d.geometry.validate().unwrap();
        for (a, b) in d.predicted.iter().zip(&first.predicted) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn oscillator_guide_binds_its_levels_on_a_coarse_grid() {
    let c = model_couplings(&ModelKind::FiniteOscillator { sites: 4 }).unwrap();
    let params = GuideParams::default();
    let design = design_guide(&c, &params, &Pattern::Zigzag, None).unwrap();
    let cmp = spectrum_below_threshold(&design.geometry, &params, 0.1).unwrap();
    assert_eq!(cmp.levels.len(), 4);
    assert!(cmp.modes.residuals.iter().all(|r| *r < 1e-8));
    // ascending and ordered around the corner level
    assert!(cmp.levels.windows(2).all(|w| w[0] < w[1]));
    assert!(cmp.levels[0] < cmp.bound && cmp.bound < cmp.levels[3]);
}
