use cogsimplex::geometry::{
    coefficients_to_distances, distances_to_point, point_to_distances, prism_offset, saturation_factor, simplex_frame,
    CoefficientVector, TimeAxis,
};
use cogsimplex::{Coefficients32, Frame32};
use proptest::prelude::*;

fn coeffs(arity: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..100.0, arity).prop_filter("non-zero", |v| v.iter().any(|&x| x > 1e-3))
}

fn case() -> impl Strategy<Value = (usize, f64, Vec<f64>)> {
    (2usize..=3, 0.1f64..1000.0).prop_flat_map(|(n, edge)| (Just(n), Just(edge), coeffs(n + 1)))
}

proptest! {
    #[test]
    fn distances_sum_to_height((n, edge, a) in case()) {
        let frame = simplex_frame(n, edge).unwrap();
        let h = coefficients_to_distances(&CoefficientVector::new(a).unwrap(), &frame).unwrap();
        let sum: f64 = h.values().iter().sum();
        prop_assert!((sum - frame.height()).abs() <= 1e-9 * frame.height().max(1.0));
    }

    #[test]
    fn distances_keep_coefficient_ratios((n, edge, a) in case()) {
        let frame = simplex_frame(n, edge).unwrap();
        let h = coefficients_to_distances(&CoefficientVector::new(a.clone()).unwrap(), &frame).unwrap();
        let sum: f64 = a.iter().sum();
        for (hi, ai) in h.values().iter().zip(&a) {
            prop_assert!((hi / frame.height() - ai / sum).abs() <= 1e-9);
        }
    }

    #[test]
    fn placement_ignores_coefficient_scale((n, edge, a) in case(), k in 1e-3f64..1e3) {
        let frame = simplex_frame(n, edge).unwrap();
        let p = frame.place(&CoefficientVector::new(a.clone()).unwrap()).unwrap();
        let q = frame.place(&CoefficientVector::new(a.iter().map(|x| x * k).collect()).unwrap()).unwrap();
        prop_assert!(p.distance(&q) <= 1e-9 * edge);
    }

    #[test]
    fn point_and_distances_round_trip((n, edge, a) in case()) {
        let frame = simplex_frame(n, edge).unwrap();
        let h = coefficients_to_distances(&CoefficientVector::new(a).unwrap(), &frame).unwrap();
        let p = distances_to_point(&h, &frame).unwrap();
        let back = point_to_distances(&p, &frame).unwrap();
        for (x, y) in h.values().iter().zip(back.values()) {
            prop_assert!((x - y).abs() <= 1e-9 * edge.max(1.0));
        }
        for (face, hi) in frame.faces().iter().zip(h.values()) {
            prop_assert!((face.signed_distance(&p) - hi).abs() <= 1e-9 * edge.max(1.0));
        }
    }

    #[test]
    fn f32_frame_agrees_with_f64((n, edge, a) in case()) {
        let frame = simplex_frame(n, edge).unwrap();
        let p = frame.place(&CoefficientVector::new(a.clone()).unwrap()).unwrap();
        let frame32: Frame32 = simplex_frame(n, edge as f32).unwrap();
        let a32 = Coefficients32::new(a.iter().map(|&x| x as f32).collect()).unwrap();
        let q = frame32.place(&a32).unwrap();
        for (x, y) in p.coords().iter().zip(q.coords()) {
            prop_assert!((x - f64::from(*y)).abs() <= 1e-4 * edge.max(1.0));
        }
    }

    #[test]
    fn prism_offset_is_affine_in_time(t0 in -1e6f64..1e6, span in 1e-3f64..1e6, len in 1e-3f64..1e4, u in 0.0f64..=1.0) {
        let axis = TimeAxis::new(t0, t0 + span, len).unwrap();
        let t = (t0 + u * span).min(t0 + span);
        let off = prism_offset(t, &axis).unwrap();
        prop_assert!(off >= -1e-9 * len && off <= len * (1.0 + 1e-9));
        prop_assert!((off - u * len).abs() <= 1e-6 * len);
    }

    #[test]
    fn saturation_stays_in_unit_interval(s in 0.0f64..1e6, r in 1e-6f64..1e6) {
        let f = saturation_factor(s, r).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        if s >= r {
            prop_assert_eq!(f, 1.0);
        }
    }
}

#[test]
fn rejects_malformed_input() {
    let frame = simplex_frame(2, 1.0).unwrap();
    assert!(CoefficientVector::new(vec![1.0, -1.0, 2.0]).is_err());
    assert!(CoefficientVector::new(vec![0.0, 0.0, 0.0]).is_err());
    assert!(CoefficientVector::new(vec![1.0, f64::NAN, 2.0]).is_err());
    let four = CoefficientVector::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
    assert!(coefficients_to_distances(&four, &frame).is_err());
    assert!(simplex_frame(4, 1.0).is_err());
    assert!(simplex_frame(2, 0.0).is_err());
    assert!(TimeAxis::new(2.0, 1.0, 1.0).is_err());
    let axis = TimeAxis::new(0.0, 1.0, 1.0).unwrap();
    assert!(prism_offset(2.0, &axis).is_err());
    assert!(saturation_factor(1.0, 0.0).is_err());
}
