use ringsim_core::add_drop::{noise_commutators, transfer_matrix};
use ringsim_core::hom::{analyze, p11_closed, p11_from_state};
use ringsim_core::single_bus::{commutator_sum_identity, ovpa_transfer};
use ringsim_core::{AddDropParamsF32, CouplerParamsF32, RingParamsF32};

#[test]
fn single_bus_in_f32() {
    let c = CouplerParamsF32::real(0.8).unwrap();
    let r = RingParamsF32::from_alpha(0.9, 0.3).unwrap();
    let resp = ovpa_transfer(&c, &r).unwrap();
    assert!(resp.power_residual().abs() < 1e-5);
    let s = commutator_sum_identity(&c, &r).unwrap();
    assert!((s.analytic - s.closed).abs() < 1e-5);
}

#[test]
fn add_drop_and_two_photon_in_f32() {
    let p = AddDropParamsF32::real(0.6, 0.7, 0.9, 0.4).unwrap();
    let tm = transfer_matrix(&p).unwrap();
    assert!(noise_commutators(&tm).unwrap().eigenvalues()[0] > -1e-5);
    let a = analyze(&p).unwrap();
    assert!((a.density.p0 + a.density.p1 + a.density.p2 - 1.0).abs() < 1e-4);
    let lossless =
        AddDropParamsF32::real(std::f32::consts::FRAC_1_SQRT_2, std::f32::consts::FRAC_1_SQRT_2, 1.0, 0.0).unwrap();
    assert!((p11_closed(&lossless).unwrap() - 1.0).abs() < 1e-4);
    assert!((p11_from_state(&lossless).unwrap() - 1.0).abs() < 1e-4);
}
