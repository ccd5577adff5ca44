use spinmodes::hp::{dicke, heralded_cat, measurement_pdf, squeezed_db, variance_sbeta};
use spinmodes::metrology::{gain, gain_bound, squeezed_variance};
use spinmodes::wigner::{wigner_grid, wigner_point};
use spinmodes::*;

#[test]
fn geometry_to_wigner() {
    let cloud = AtomCloud::new(50_000, CloudDistribution::UniformLine { extent: AxialExtent::Wavelengths(500) }, 11);
    let prep = sample_couplings(&ModeProfile::StandingWave { wavelength: 1.0 }, &cloud).unwrap().set_spin(1.0).unwrap();
    let read = sample_couplings(&ModeProfile::Uniform, &cloud).unwrap().set_spin(1.0).unwrap();
    let params = effective_params(&prep).unwrap();
    let j = overlap_j(&prep, &read).unwrap();
    assert!((j - (2.0f64 / 3.0).sqrt()).abs() < 5e-3);
    // J^2 = N_e / N for a uniform readout
    assert!((j * j - params.n_eff / 50_000.0).abs() < 1e-12);

    let ladder = SpinLadder::new(params.s_eff, 4).unwrap();
    let rho = apply_mismatch(&dicke(ladder, 1).unwrap(), j).unwrap();
    assert!((wigner_point(&rho, 0.0, 0.0).unwrap() - (1.0 - 2.0 * j * j)).abs() < 1e-12);
    let grid = wigner_grid(&rho, &GridSpec::square(5.0, 81)).unwrap();
    assert!((grid.normalization() - 1.0).abs() < 1e-6);
}

#[test]
fn single_and_double_precision_agree() {
    let l64 = SpinLadder::<f64>::new(800.0, 8).unwrap();
    let l32 = SpinLadder::<f32>::new(800.0, 8).unwrap();
    let r64 = apply_mismatch(&heralded_cat(l64, 5).unwrap(), 0.9).unwrap();
    let r32 = apply_mismatch(&heralded_cat(l32, 5).unwrap(), 0.9f32).unwrap();
    for &(x, p) in &[(0.0, 0.0), (0.7, -0.4), (1.5, 2.0)] {
        let a = wigner_point(&r64, x, p).unwrap();
        let b = wigner_point(&r32, x as f32, p as f32).unwrap();
        assert!((a - b as f64).abs() < 1e-5, "{a} {b}");
    }
    assert!((r32.trace() - 1.0).abs() < 1e-6);
    let g32 = gain(1.0f32, 0.99, 1000.0).unwrap();
    let g64 = gain(1.0f64, 0.99, 1000.0).unwrap();
    assert!(((g32 as f64) - g64).abs() / g64 < 1e-5);
    assert!(gain_bound(0.99f32, 1000.0).unwrap() >= g32);
}

#[test]
fn squeezed_state_variance_and_pdf() {
    let s = 2000.0f64;
    let ladder = SpinLadder::new(s, 160).unwrap();
    let st = squeezed_db(ladder, 10.0).unwrap();
    let var = variance_sbeta(&st, 0.0);
    assert!((var - squeezed_variance(10.0, s)).abs() / var < 1e-6);
    // antisqueezed quadrature
    assert!((variance_sbeta(&st, std::f64::consts::FRAC_PI_2) - s / 2.0 * 10.0).abs() / (5.0 * s) < 1e-6);
    let grid: Vec<f64> = (-400..=400).map(|i| i as f64 * 0.5).collect();
    let pdf = measurement_pdf(&st, 0.0, &grid).unwrap();
    let total: f64 = pdf.iter().sum::<f64>() * 0.5;
    assert!((total - 1.0).abs() < 1e-6);
    // after the mode change the variance follows the loss map
    let out = mismatched_variance(var, 0.9, s).unwrap();
    assert!(out > var && out < s / 2.0);
}
