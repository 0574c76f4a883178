use fracmaster::plotdata::{emit_plotdata, PlotReport, BOUNDARY_HEADER, EXPONENT_HEADER};
use fracmaster_core::campanato::{
    dyadic_radii, exponent_estimate, fit_boundary_samples, BoundaryModel, Center, FitClass, SampledField,
    MIN_CYLINDER_SAMPLES,
};
use fracmaster_core::spectral::SpaceGrid;

fn rows(bytes: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8(bytes.to_vec())
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn empty_report_is_header_only() {
    let r = rows(&emit_plotdata(PlotReport::Empty));
    assert_eq!(r, vec![EXPONENT_HEADER.iter().map(|s| s.to_string()).collect::<Vec<_>>()]);
}

#[test]
fn exponent_report_carries_the_fitted_line() {
    let times: Vec<f64> = (0..65).map(|i| i as f64 / 64.0).collect();
    let f = SampledField::from_fn(times, SpaceGrid::uniform(-1.0, 2.0, 2049).unwrap(), |_, x| x[0].abs().powf(0.5)).unwrap();
    let c = Center::new(0.5, [0.0, 0.0]);
    let est = exponent_estimate(&f, c, &dyadic_radii(&f, c, MIN_CYLINDER_SAMPLES), FitClass::Constant).unwrap();
    let bytes = emit_plotdata(PlotReport::Exponent(&est));
    assert!(String::from_utf8_lossy(&bytes).starts_with("# model: log_rms = "));
    let r = rows(&bytes);
    assert_eq!(r[0], EXPONENT_HEADER);
    assert_eq!(r.len(), est.radii.len() + 1);
    let line = est.line.unwrap();
    for row in &r[1..] {
        let v: Vec<f64> = row.iter().map(|c| c.parse().unwrap()).collect();
        assert_eq!(v[2], v[0].ln());
        assert_eq!(v[3], v[1].ln());
        assert_eq!(v[4], line.intercept + line.slope * v[2]);
    }
}

#[test]
fn boundary_report_has_both_models() {
    let d: Vec<f64> = (1..=8).map(|k| k as f64 * 1e-3).collect();
    let u: Vec<f64> = d.iter().map(|x| 2.0 * x.powf(0.6)).collect();
    let fit = fit_boundary_samples(d.clone(), u.clone(), BoundaryModel::PurePower).unwrap();
    let r = rows(&emit_plotdata(PlotReport::Boundary(&fit)));
    assert_eq!(r[0], BOUNDARY_HEADER);
    for (row, (&di, &ui)) in r[1..].iter().zip(d.iter().zip(&u)) {
        let v: Vec<f64> = row.iter().map(|c| c.parse().unwrap()).collect();
        assert_eq!((v[0], v[1]), (di, ui));
        assert!((v[2] - ui).abs() < 1e-10 * ui);
        assert_eq!(v[3], fit.xlog_model(di));
    }
}
