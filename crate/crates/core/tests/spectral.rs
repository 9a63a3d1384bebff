use num_complex::Complex64;
use ymblow::spectral::{EigenProbe, ProbeConfig, SpectralBox};
use ymblow::{Error, ModelParams, PotentialForm};

fn probe(d: u32, form: PotentialForm) -> EigenProbe {
    EigenProbe::new(ModelParams::new(d).unwrap(), form, ProbeConfig::default())
}

#[test]
fn only_the_gauge_eigenvalue_in_the_right_half_plane_box() {
    let p = probe(5, PotentialForm::Linearized);
    let b = SpectralBox::new(0.5, 1.5, -0.5, 0.5).unwrap();
    assert_eq!(p.count_in_box(&b).unwrap(), 1);
    let zeros = p.zeros_in_box(&b).unwrap();
    assert_eq!(zeros.len(), 1);
    assert!((zeros[0].re - 1.0).abs() < 1e-8 && zeros[0].im.abs() < 1e-8, "{zeros:?}");
}

#[test]
fn wronskian_vanishes_at_one() {
    let p = probe(5, PotentialForm::Linearized);
    let w1 = p.wronskian_regular(Complex64::new(1.0, 0.0)).unwrap().norm();
    let w2 = p.wronskian_regular(Complex64::new(1.2, 0.0)).unwrap().norm();
    assert!(w1 < 1e-8 * w2, "W(1) = {w1}, W(1.2) = {w2}");
}

#[test]
fn raw_wronskian_refuses_resonant_points() {
    let p = probe(5, PotentialForm::Linearized);
    assert!(matches!(p.wronskian(Complex64::new(1.0, 0.0)), Err(Error::ResonantIndex { .. })));
    assert!(p.wronskian(Complex64::new(1.0, 0.3)).is_ok());
}

#[test]
fn printed_bracket_loses_the_gauge_eigenvalue() {
    let p = probe(5, PotentialForm::Printed);
    let w1 = p.wronskian_regular(Complex64::new(1.0, 0.0)).unwrap().norm();
    let w2 = p.wronskian_regular(Complex64::new(1.2, 0.0)).unwrap().norm();
    assert!(w1 > 1e-6 * w2, "W(1) = {w1}, W(1.2) = {w2}");
}

#[test]
fn leading_stable_eigenvalue_in_five_dimensions() {
    let p = probe(5, PotentialForm::Linearized);
    let zeros = p.zeros_in_box(&SpectralBox::new(-0.9, -0.1, -0.5, 0.5).unwrap()).unwrap();
    let lead = zeros.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    assert!((lead + 0.58890).abs() < 1e-4, "{zeros:?}");
}

#[test]
fn empty_box_is_rejected() {
    assert!(SpectralBox::new(1.0, 0.5, -0.5, 0.5).is_err());
}
