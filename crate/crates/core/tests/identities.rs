//! Cross-module pointwise identities on the catalogue models that are not
//! already pinned by a suite row: Ricci-operator derivatives along the Reeb
//! field, the Lie/covariant characterization of L_V g, the two computations
//! of the lowered-potential exterior derivative, the derivative form of the
//! transverse ⋆-Ricci coefficient, and curvature-action special cases.

use contactgeo::calculus::{
    covariant_derivative, covariant_derivative_curvature, curvature_action, lie_derivative,
    ricci_operator, scalar_curvature, TensorField,
};
use contactgeo::contact::ContactStructure;
use contactgeo::models::{standard_sasakian, unit_sphere};
use contactgeo::probe::collect_samples;
use contactgeo::sample::SampleRng;
use contactgeo::star_ricci::{eval_02, g_phi, star_ricci_frame_sum};
use contactgeo::tensor::{frame_norm, TensorValue};
use contactgeo::SamplePlan;

fn plan(points: usize) -> SamplePlan {
    SamplePlan::new(points, 42)
}

#[test]
fn ricci_operator_reeb_derivatives() {
    // ∇_ξ Q = 0 and (∇_X Q)ξ = QφX − 2nφX on Sasakian structures.
    for s in [standard_sasakian(1), standard_sasakian(2), unit_sphere(1)] {
        let pl = plan(4);
        let dim = s.dim();
        let two_n = (dim - 1) as f64;
        let chart = s.chart().clone();
        let fd = pl.fd;
        let q_field = TensorField::new(1, 1, move |p: &[f64]| {
            ricci_operator(&chart, p, &fd).expect("Ricci operator field")
        });
        let samples = collect_samples(s.chart(), &pl).unwrap();
        for smp in &samples {
            let p = &smp.point;
            // (∇Q) layout: [a; k, b].
            let dq = covariant_derivative_curvature(s.chart(), &q_field, p, &pl.fd).unwrap();
            let xi = s.xi_at(p);
            let phi = s.phi_at(p);
            let q = ricci_operator(s.chart(), p, &pl.fd).unwrap();
            // ∇_ξ Q contracts the derivative slot with ξ.
            let along_reeb = TensorValue::from_fn(dim, 1, 1, |ix| {
                (0..dim).map(|k| dq.get(&[ix[0], k, ix[1]]) * xi.get(&[k])).sum()
            });
            assert!(
                frame_norm(&along_reeb, &smp.frame, &smp.metric) < 1e-5,
                "∇_ξQ should vanish"
            );
            // (∇_X Q)ξ = QφX − 2nφX for coordinate X.
            for x in &smp.vectors {
                let lhs = TensorValue::from_fn(dim, 1, 0, |ix| {
                    let mut v = 0.0;
                    for k in 0..dim {
                        for b in 0..dim {
                            v += dq.get(&[ix[0], k, b]) * x.get(&[k]) * xi.get(&[b]);
                        }
                    }
                    v
                });
                let phix = ContactStructure::apply_phi(&phi, x);
                let qphix = ContactStructure::apply_phi(&q, &phix);
                let rhs = TensorValue::from_fn(dim, 1, 0, |ix| {
                    qphix.get(ix) - two_n * phix.get(ix)
                });
                let gap = frame_norm(&lhs.sub(&rhs).unwrap(), &smp.frame, &smp.metric);
                assert!(gap < 1e-5, "(∇_XQ)ξ identity gap {gap:.2e} (n={})", s.n());
            }
        }
    }
}

#[test]
fn lie_metric_matches_symmetrized_gradient() {
    // (L_V g)(X,Y) = g(∇_X V, Y) + g(∇_Y V, X).
    let s = standard_sasakian(1);
    let pl = plan(4);
    let mut rng = SampleRng::new(77);
    let coef: Vec<f64> = (0..9).map(|_| rng.normal() * 0.4).collect();
    let v = TensorField::new(1, 0, move |p: &[f64]| {
        TensorValue::from_fn(3, 1, 0, |ix| {
            let a = ix[0];
            coef[3 * a] * p[0] * p[1] + coef[3 * a + 1] * p[2] + coef[3 * a + 2]
        })
    });
    let samples = collect_samples(s.chart(), &pl).unwrap();
    for smp in &samples {
        let p = &smp.point;
        let lg = lie_derivative(s.chart(), &v, &s.chart().metric_field(), p, &pl.fd).unwrap();
        let grad = covariant_derivative(s.chart(), &v, p, &pl.fd).unwrap();
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let dx = TensorValue::from_fn(3, 1, 0, |ix| {
                (0..3).map(|k| grad.get(&[ix[0], k]) * x.get(&[k])).sum()
            });
            let dy = TensorValue::from_fn(3, 1, 0, |ix| {
                (0..3).map(|k| grad.get(&[ix[0], k]) * y.get(&[k])).sum()
            });
            let lhs = eval_02(&lg, x, y);
            let rhs = smp.metric.inner(&dx, y) + smp.metric.inner(&dy, x);
            assert!((lhs - rhs).abs() < 1e-7, "L_Vg characterization gap {}", lhs - rhs);
        }
    }
}

#[test]
fn exterior_derivative_matches_antisymmetrized_gradient() {
    // 2(dv)(X,Y) = g(∇_X V, Y) − g(∇_Y V, X) for the lowered potential.
    use contactgeo::soliton::{potential_two_form, SolitonInstance};
    let s = unit_sphere(1);
    let pl = plan(3);
    let mut rng = SampleRng::new(55);
    let coef: Vec<f64> = (0..9).map(|_| rng.normal() * 0.3).collect();
    let v = TensorField::new(1, 0, move |p: &[f64]| {
        TensorValue::from_fn(3, 1, 0, |ix| {
            let a = ix[0];
            coef[3 * a] * p[1] + coef[3 * a + 1] * p[0] * p[2] + coef[3 * a + 2]
        })
    });
    let inst = SolitonInstance::new(s.clone(), v.clone(), 0.0);
    let samples = collect_samples(s.chart(), &pl).unwrap();
    for smp in &samples {
        let p = &smp.point;
        let (dv, _) = potential_two_form(&inst, p, &pl).unwrap();
        let grad = covariant_derivative(s.chart(), &v, p, &pl.fd).unwrap();
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let dx = TensorValue::from_fn(3, 1, 0, |ix| {
                (0..3).map(|k| grad.get(&[ix[0], k]) * x.get(&[k])).sum()
            });
            let dy = TensorValue::from_fn(3, 1, 0, |ix| {
                (0..3).map(|k| grad.get(&[ix[0], k]) * y.get(&[k])).sum()
            });
            let lhs = 2.0 * eval_02(&dv, x, y);
            let rhs = smp.metric.inner(&dx, y) - smp.metric.inner(&dy, x);
            assert!((lhs - rhs).abs() < 1e-7, "dv characterization gap {}", lhs - rhs);
        }
    }
}

#[test]
fn fundamental_form_special_values() {
    // Φ(ξ, X) = 0 and Φ(X, φX) = −g(φX, φX) < 0 for unit X ⊥ ξ.
    for s in [standard_sasakian(1), unit_sphere(2)] {
        let pl = plan(3);
        let samples = collect_samples(s.chart(), &pl).unwrap();
        for smp in &samples {
            let p = &smp.point;
            let big_phi = s.fundamental_two_form(p).unwrap();
            let xi = s.xi_at(p);
            let phi = s.phi_at(p);
            let eta = s.eta_at(p);
            for x in &smp.vectors {
                assert!(eval_02(&big_phi, &xi, x).abs() < 1e-12, "Φ(ξ, X) = 0");
                // Project X transverse to ξ and normalize.
                let transverse = x
                    .sub(&xi.scale(ContactStructure::pair(&eta, x)))
                    .unwrap();
                let norm = smp.metric.norm(&transverse);
                if norm < 1e-6 {
                    continue;
                }
                let unit = transverse.scale(1.0 / norm);
                let phix = ContactStructure::apply_phi(&phi, &unit);
                let value = eval_02(&big_phi, &unit, &phix);
                let expect = -smp.metric.inner(&phix, &phix);
                assert!((value - expect).abs() < 1e-12);
                assert!(value < 0.0, "Φ(X, φX) must be negative for transverse X");
            }
        }
    }
}

#[test]
fn transverse_star_ricci_derivative_tracks_scalar_curvature() {
    // (∇_W Ric⋆)(φX, φY) = (dr(W) / (2n(2n−1))) · g(φX, φY): on the
    // constant-scalar-curvature models both sides vanish, and the scalar
    // gradient itself is verified to vanish so the factor is exercised
    // rather than assumed away.
    for s in [unit_sphere(2), standard_sasakian(2)] {
        let pl = plan(3);
        let dim = s.dim();
        let two_n = (dim - 1) as f64;
        let denom = two_n * (two_n - 1.0);
        let chart = s.chart().clone();
        let fd = pl.fd;
        let star_s = s.clone();
        let star_pl = pl.clone();
        let star_field = TensorField::new(0, 2, move |q: &[f64]| {
            star_ricci_frame_sum(&star_s, q, &star_pl).expect("star field")
        });
        let r_field = TensorField::new(0, 0, move |q: &[f64]| {
            TensorValue::scalar(dim, scalar_curvature(&chart, q, &fd).expect("scalar"))
        });
        let samples = collect_samples(s.chart(), &pl).unwrap();
        for smp in &samples {
            let p = &smp.point;
            let d_star = covariant_derivative_curvature(s.chart(), &star_field, p, &pl.fd).unwrap();
            let dr = covariant_derivative_curvature(s.chart(), &r_field, p, &pl.fd).unwrap();
            let gphi = g_phi(&s, p).unwrap();
            let phi = s.phi_at(p);
            for (i, w) in smp.vectors.iter().enumerate() {
                let x = smp.vec(i + 1);
                let y = smp.vec(i + 2);
                let phix = ContactStructure::apply_phi(&phi, x);
                let phiy = ContactStructure::apply_phi(&phi, y);
                let mut lhs = 0.0;
                let mut dr_w = 0.0;
                for k in 0..dim {
                    dr_w += dr.get(&[k]) * w.get(&[k]);
                    for a in 0..dim {
                        for b in 0..dim {
                            lhs +=
                                d_star.get(&[k, a, b]) * w.get(&[k]) * phix.get(&[a]) * phiy.get(&[b]);
                        }
                    }
                }
                let rhs = dr_w / denom * eval_02(&gphi, x, y);
                assert!(dr_w.abs() < 1e-6, "scalar curvature should be constant");
                assert!((lhs - rhs).abs() < 1e-4, "transverse derivative gap {}", lhs - rhs);
            }
        }
    }
}

#[test]
fn curvature_action_annihilates_multiples_of_the_metric() {
    // Ric = 2g on the unit 3-sphere, so R(X,Y)·Ric = 0 even though the
    // sphere is not ⋆-Ricci semi-symmetric.
    let s = unit_sphere(1);
    let pl = plan(3);
    let samples = collect_samples(s.chart(), &pl).unwrap();
    for smp in &samples {
        let p = &smp.point;
        let ric = contactgeo::calculus::ricci(s.chart(), p, &pl.fd).unwrap();
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let action = curvature_action(s.chart(), p, x, y, &ric, &pl.fd).unwrap();
            assert!(
                frame_norm(&action, &smp.frame, &smp.metric) < 1e-6,
                "R·Ric should vanish on an Einstein sphere"
            );
        }
    }
}
