//! Property tests for the pointwise algebra layer: linearity of contraction
//! and index movement, metric roundtrips, frame orthonormality for random
//! SPD metrics, and antisymmetry of the exterior derivative.

use contactgeo::calculus::{exterior_derivative_1form, TensorField};
use contactgeo::models::euclidean_chart;
use contactgeo::tensor::{
    coordinate_frame, gram_schmidt, raise_lower, MetricAtPoint, RaiseLower, TensorValue,
};
use contactgeo::DerivativeConfig;
use proptest::prelude::*;

const DIM: usize = 3;

// Charts, structures, and fields are immutable and shareable across threads.
#[test]
fn engine_types_are_send_and_sync() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<contactgeo::ChartManifold>();
    assert_send_sync::<contactgeo::ContactStructure>();
    assert_send_sync::<contactgeo::TensorField>();
    assert_send_sync::<contactgeo::TensorValue>();
    assert_send_sync::<contactgeo::SamplePlan>();
}

fn component(max: f64) -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL.prop_map(move |x| (x % max).clamp(-max, max))
}

fn tensor(con: usize, cov: usize) -> impl Strategy<Value = TensorValue> {
    prop::collection::vec(component(10.0), DIM.pow((con + cov) as u32))
        .prop_map(move |c| TensorValue::from_components(DIM, con, cov, c).unwrap())
}

/// Random SPD metric: A·Aᵀ + I keeps the spectrum safely positive.
fn spd_metric() -> impl Strategy<Value = MetricAtPoint> {
    prop::collection::vec(component(1.0), DIM * DIM).prop_map(|a| {
        let g = TensorValue::from_fn(DIM, 0, 2, |ix| {
            let (i, j) = (ix[0], ix[1]);
            let mut s = if i == j { 1.0 } else { 0.0 };
            for k in 0..DIM {
                s += a[i * DIM + k] * a[j * DIM + k];
            }
            s
        });
        MetricAtPoint::new(g).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_is_linear(t in tensor(1, 2), s in tensor(1, 2), a in component(5.0), b in component(5.0)) {
        let combo = t.scale(a).add(&s.scale(b)).unwrap();
        let lhs = combo.contract(0, 1).unwrap();
        let rhs = t.contract(0, 1).unwrap().scale(a)
            .add(&s.contract(0, 1).unwrap().scale(b)).unwrap();
        let scale = 1.0 + lhs.max_abs();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn raise_lower_is_linear(t in tensor(0, 2), s in tensor(0, 2), a in component(5.0), metric in spd_metric()) {
        let combo = t.scale(a).add(&s).unwrap();
        let lhs = raise_lower(&combo, 0, &metric, RaiseLower::Up).unwrap();
        let rhs = raise_lower(&t, 0, &metric, RaiseLower::Up).unwrap().scale(a)
            .add(&raise_lower(&s, 0, &metric, RaiseLower::Up).unwrap()).unwrap();
        let scale = 1.0 + lhs.max_abs();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn raise_undoes_lower(v in tensor(1, 0), metric in spd_metric()) {
        let low = raise_lower(&v, 0, &metric, RaiseLower::Down).unwrap();
        let back = raise_lower(&low, 0, &metric, RaiseLower::Up).unwrap();
        let scale = 1.0 + v.max_abs();
        prop_assert!(back.sub(&v).unwrap().max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn frames_are_orthonormal_for_random_spd_metrics(metric in spd_metric()) {
        let frame = coordinate_frame(&metric, None).unwrap();
        for i in 0..DIM {
            for j in 0..DIM {
                let expect = if i == j { 1.0 } else { 0.0 };
                let inner = metric.inner(&frame.vectors[i], &frame.vectors[j]);
                prop_assert!((inner - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gram_schmidt_preserves_span_membership(metric in spd_metric(), coeffs in prop::collection::vec(component(3.0), DIM)) {
        // A vector expressed in the input basis stays expressible in the
        // orthonormal output basis with matching norm.
        let basis: Vec<TensorValue> = (0..DIM)
            .map(|i| TensorValue::from_fn(DIM, 1, 0, |ix| if ix[0] == i { 1.0 } else { 0.0 }))
            .collect();
        let frame = gram_schmidt(&basis, &metric).unwrap();
        let mut v = TensorValue::zeros(DIM, 1, 0);
        for (i, c) in coeffs.iter().enumerate() {
            v = v.add(&basis[i].scale(*c)).unwrap();
        }
        let norm2: f64 = frame.vectors.iter().map(|e| metric.inner(&v, e).powi(2)).sum();
        prop_assert!((norm2 - metric.inner(&v, &v)).abs() < 1e-8 * (1.0 + norm2));
    }

    #[test]
    fn exterior_derivative_is_antisymmetric(coeffs in prop::collection::vec(component(2.0), 9)) {
        let chart = euclidean_chart(DIM);
        let c = coeffs.clone();
        let omega = TensorField::new(0, 1, move |p: &[f64]| {
            TensorValue::from_fn(DIM, 0, 1, |ix| {
                let a = ix[0];
                c[3 * a] * p[0] * p[1] + c[3 * a + 1] * p[2] * p[2] + c[3 * a + 2] * p[a]
            })
        });
        let cfg = DerivativeConfig::default();
        let p = [0.2, -0.1, 0.3];
        let d = exterior_derivative_1form(&chart, &omega, &p, &cfg).unwrap();
        for i in 0..DIM {
            prop_assert!(d.get(&[i, i]).abs() < 1e-9);
            for j in 0..DIM {
                prop_assert!((d.get(&[i, j]) + d.get(&[j, i])).abs() < 1e-9);
            }
        }
    }
}
