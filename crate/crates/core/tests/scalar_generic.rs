//! The kernels are generic over the scalar type; exercise the f32 lane
//! against the f64 reference values at f32-appropriate tolerances.

use contperc::cluster::{c3_closed_form_2d, c3_quadrature, c3_series_3d, estimate_ct_monte_carlo};
use contperc::geometry::{torus_distance, unit_ball_volume, Point, TorusBox};
use contperc::percolation::percolation_sweep;

#[test]
fn f32_special_functions_match_f64() {
    for d in 1..=8 {
        let v32 = unit_ball_volume::<f32>(d).unwrap() as f64;
        let v64 = unit_ball_volume::<f64>(d).unwrap();
        assert!(
            ((v32 - v64) / v64).abs() < 1e-5,
            "d={d}: f32 volume {v32} vs {v64}"
        );
    }
    assert!((c3_closed_form_2d::<f32>() as f64 - 0.5865033).abs() < 1e-5);
    assert!((c3_series_3d::<f32>() as f64 - 0.46875).abs() < 1e-5);
    let q32 = c3_quadrature::<f32>(2).unwrap() as f64;
    assert!((q32 - 0.5865033).abs() < 1e-4, "f32 quadrature {q32}");
}

#[test]
fn f32_torus_metric() {
    let bbox = TorusBox::new(2, 10.0f32).unwrap();
    let p = Point::new(vec![1.0f32, 0.0]);
    let q = Point::new(vec![9.0f32, 0.0]);
    assert_eq!(torus_distance(&p, &q, &bbox).unwrap(), 2.0f32);
}

#[test]
fn f32_monte_carlo_and_sweep_run() {
    let est = estimate_ct_monte_carlo::<f32>(2, 3, 20_000, 1).unwrap();
    assert!((est.value as f64 - 0.5865).abs() < 0.02);
    assert!(est.value > 0.0 && est.value < 1.0);

    let curve = percolation_sweep::<f32>(2, &[0.5f32, 1.5], 12.0, 1.0, 5, 2).unwrap();
    assert_eq!(curve.rows.len(), 2);
    for row in &curve.rows {
        assert!(row.mean_fraction.is_finite());
        assert!(row.mean_fraction > 0.0 && row.mean_fraction <= 1.0);
    }
    assert!(curve.rows[0].mean_fraction < curve.rows[1].mean_fraction);
}
