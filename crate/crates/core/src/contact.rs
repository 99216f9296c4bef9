//! Almost contact metric structures: axiom verification, the Sasakian
//! condition, normality, Reeb curvature identities, and D-homothetic
//! deformation.

use std::sync::Arc;

use crate::calculus::{
    covariant_derivative, exterior_derivative_1form, lie_derivative, ricci, riemann,
    riemann_covariant, ChartManifold, JetFieldFn, TensorField,
};
use crate::error::{GeoError, Result};
use crate::jet::Jet;
use crate::probe::collect_samples;
use crate::report::{ResidualAccumulator, ResidualReport};
use crate::sample::SamplePlan;
use crate::tensor::{frame_norm, TensorValue};

/// The tensor triple (φ, ξ, η) attached to a chart with compatible metric.
#[derive(Clone)]
pub struct ContactStructure {
    chart: ChartManifold,
    phi: TensorField,
    xi: TensorField,
    eta: TensorField,
    eta_jets: Option<JetFieldFn>,
}

impl std::fmt::Debug for ContactStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ContactStructure(n={})", self.n())
    }
}

impl ContactStructure {
    pub fn new(chart: ChartManifold, phi: TensorField, xi: TensorField, eta: TensorField) -> Self {
        debug_assert_eq!(phi.valence(), (1, 1));
        debug_assert_eq!(xi.valence(), (1, 0));
        debug_assert_eq!(eta.valence(), (0, 1));
        ContactStructure { chart, phi, xi, eta, eta_jets: None }
    }

    pub fn with_eta_jets(
        mut self,
        jets: impl Fn(&[f64]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        self.eta_jets = Some(Arc::new(jets));
        self
    }

    pub fn chart(&self) -> &ChartManifold {
        &self.chart
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn phi(&self) -> &TensorField {
        &self.phi
    }

    pub fn xi(&self) -> &TensorField {
        &self.xi
    }

    pub fn eta(&self) -> &TensorField {
        &self.eta
    }

    pub fn eta_jets(&self) -> Option<&JetFieldFn> {
        self.eta_jets.as_ref()
    }

    /// Drop all exact derivative callbacks (pure finite-difference mode).
    pub fn without_jets(&self) -> Self {
        let mut s = self.clone();
        s.chart = s.chart.without_jets();
        s.eta_jets = None;
        s
    }

    pub fn phi_at(&self, p: &[f64]) -> TensorValue {
        self.phi.eval(p)
    }

    pub fn xi_at(&self, p: &[f64]) -> TensorValue {
        self.xi.eval(p)
    }

    pub fn eta_at(&self, p: &[f64]) -> TensorValue {
        self.eta.eval(p)
    }

    /// φX as components.
    pub fn apply_phi(phi: &TensorValue, x: &TensorValue) -> TensorValue {
        let dim = x.dim();
        TensorValue::from_fn(dim, 1, 0, |ix| {
            (0..dim).map(|b| phi.get(&[ix[0], b]) * x.get(&[b])).sum()
        })
    }

    /// η(X).
    pub fn pair(eta: &TensorValue, x: &TensorValue) -> f64 {
        (0..x.dim()).map(|a| eta.get(&[a]) * x.get(&[a])).sum()
    }

    /// Fundamental 2-form Φ(X,Y) = g(X, φY) as a (0,2) value.
    pub fn fundamental_two_form(&self, p: &[f64]) -> Result<TensorValue> {
        let g = self.chart.metric_value(p);
        let phi = self.phi_at(p);
        let dim = self.dim();
        Ok(TensorValue::from_fn(dim, 0, 2, |ix| {
            let (a, b) = (ix[0], ix[1]);
            (0..dim).map(|c| g.get(&[a, c]) * phi.get(&[c, b])).sum()
        }))
    }
}

fn report_rows(
    suite: &str,
    rows: Vec<(&str, &str, ResidualAccumulator, f64)>,
) -> Vec<ResidualReport> {
    rows.into_iter()
        .map(|(id, anchor, acc, tol)| ResidualReport::new(suite, id, anchor, &acc, tol))
        .collect()
}

pub(crate) fn transpose02(t: &TensorValue) -> TensorValue {
    let dim = t.dim();
    TensorValue::from_fn(dim, 0, 2, |ix| t.get(&[ix[1], ix[0]]))
}

/// Algebraic almost-contact axioms over sampled points and vectors.
pub fn verify_almost_contact(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let samples = collect_samples(s.chart(), plan)?;
    let mut phi_sq = ResidualAccumulator::new();
    let mut eta_xi = ResidualAccumulator::new();
    let mut phi_xi = ResidualAccumulator::new();
    let mut eta_phi = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let phi = s.phi_at(p);
        let xi = s.xi_at(p);
        let eta = s.eta_at(p);
        eta_xi.update((ContactStructure::pair(&eta, &xi) - 1.0).abs(), p);
        phi_xi.update(
            frame_norm(&ContactStructure::apply_phi(&phi, &xi), &smp.frame, &smp.metric),
            p,
        );
        for x in &smp.vectors {
            let phix = ContactStructure::apply_phi(&phi, x);
            let phi2x = ContactStructure::apply_phi(&phi, &phix);
            let target = x.scale(-1.0).add(&xi.scale(ContactStructure::pair(&eta, x)))?;
            let resid = phi2x.sub(&target)?;
            phi_sq.update(frame_norm(&resid, &smp.frame, &smp.metric), p);
            eta_phi.update(ContactStructure::pair(&eta, &phix).abs(), p);
        }
    }
    Ok(report_rows(
        "axioms",
        vec![
            ("phi-squared", "φ²X = −X + η(X)ξ", phi_sq, tol),
            ("reeb-pairing", "η(ξ) = 1", eta_xi, tol),
            ("phi-reeb", "φξ = 0", phi_xi, tol),
            ("eta-phi", "η∘φ = 0", eta_phi, tol),
        ],
    ))
}

/// Metric compatibility g(φX, φY) = g(X,Y) − η(X)η(Y), plus the duality
/// η = g(ξ,·) and the contact condition dη = Φ.
pub fn verify_compatibility(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let samples = collect_samples(s.chart(), plan)?;
    let mut compat = ResidualAccumulator::new();
    let mut duality = ResidualAccumulator::new();
    let mut d_eta = ResidualAccumulator::new();
    let mut antisym = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let phi = s.phi_at(p);
        let xi = s.xi_at(p);
        let eta = s.eta_at(p);
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let phix = ContactStructure::apply_phi(&phi, x);
            let phiy = ContactStructure::apply_phi(&phi, y);
            let lhs = smp.metric.inner(&phix, &phiy);
            let rhs = smp.metric.inner(x, y)
                - ContactStructure::pair(&eta, x) * ContactStructure::pair(&eta, y);
            compat.update((lhs - rhs).abs(), p);
            let dual = smp.metric.inner(&xi, x) - ContactStructure::pair(&eta, x);
            duality.update(dual.abs(), p);
        }
        let big_phi = s.fundamental_two_form(p)?;
        let deta = exterior_derivative_1form(s.chart(), s.eta(), p, &plan.fd)?;
        d_eta.update(frame_norm(&deta.sub(&big_phi)?, &smp.frame, &smp.metric), p);
        let asym = big_phi.add(&transpose02(&big_phi))?;
        antisym.update(frame_norm(&asym, &smp.frame, &smp.metric), p);
    }
    Ok(report_rows(
        "axioms",
        vec![
            ("metric-compatibility", "g(φX,φY) = g(X,Y) − η(X)η(Y)", compat, tol),
            ("reeb-duality", "η = g(ξ,·)", duality, tol),
            ("fundamental-form-antisymmetry", "Φ(X,Y) = −Φ(Y,X)", antisym, tol),
            ("contact-condition", "dη(X,Y) = Φ(X,Y)", d_eta, tol),
        ],
    ))
}

/// The defining Sasakian condition (∇_Xφ)Y = g(X,Y)ξ − η(Y)X together with
/// ∇_Xξ = −φX, and the Killing/invariance properties of the Reeb field.
pub fn verify_sasakian(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let samples = collect_samples(s.chart(), plan)?;
    let mut nabla_phi = ResidualAccumulator::new();
    let mut nabla_xi = ResidualAccumulator::new();
    let mut killing = ResidualAccumulator::new();
    let mut phi_invariant = ResidualAccumulator::new();
    let dim = s.dim();
    for smp in &samples {
        let p = &smp.point;
        let xi = s.xi_at(p);
        let eta = s.eta_at(p);
        let phi = s.phi_at(p);
        // (∇φ) has layout [a; k, b]: derivative slot first.
        let dphi = covariant_derivative(s.chart(), s.phi(), p, &plan.fd)?;
        let dxi = covariant_derivative(s.chart(), s.xi(), p, &plan.fd)?;
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let gxy = smp.metric.inner(x, y);
            let eta_y = ContactStructure::pair(&eta, y);
            let resid = TensorValue::from_fn(dim, 1, 0, |ix| {
                let mut v = 0.0;
                for k in 0..dim {
                    for b in 0..dim {
                        v += dphi.get(&[ix[0], k, b]) * x.get(&[k]) * y.get(&[b]);
                    }
                }
                v - gxy * xi.get(&[ix[0]]) + eta_y * x.get(&[ix[0]])
            });
            nabla_phi.update(frame_norm(&resid, &smp.frame, &smp.metric), p);

            let dxv = TensorValue::from_fn(dim, 1, 0, |ix| {
                (0..dim).map(|k| dxi.get(&[ix[0], k]) * x.get(&[k])).sum()
            });
            let resid_xi = dxv.add(&ContactStructure::apply_phi(&phi, x))?;
            nabla_xi.update(frame_norm(&resid_xi, &smp.frame, &smp.metric), p);
        }
        let lg = lie_derivative(s.chart(), s.xi(), &s.chart().metric_field(), p, &plan.fd)?;
        killing.update(frame_norm(&lg, &smp.frame, &smp.metric), p);
        let lphi = lie_derivative(s.chart(), s.xi(), s.phi(), p, &plan.fd)?;
        phi_invariant.update(frame_norm(&lphi, &smp.frame, &smp.metric), p);
    }
    Ok(report_rows(
        "sasakian",
        vec![
            ("covariant-phi", "(∇_Xφ)Y = g(X,Y)ξ − η(Y)X", nabla_phi, tol),
            ("reeb-derivative", "∇_Xξ = −φX", nabla_xi, tol),
            ("reeb-killing", "L_ξ g = 0", killing, tol),
            ("phi-lie-invariance", "L_ξ φ = 0", phi_invariant, tol),
        ],
    ))
}

/// Normality: the Nijenhuis tensor of φ balances the contact form,
/// N_φ(X,Y) + 2 dη(X,Y) ξ = 0.
pub fn nijenhuis_normality(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let samples = collect_samples(s.chart(), plan)?;
    let dim = s.dim();
    let mut acc = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let phi = s.phi_at(p);
        let xi = s.xi_at(p);
        let deta = exterior_derivative_1form(s.chart(), s.eta(), p, &plan.fd)?;
        // ∂_k φ^c_b by central differences.
        let h = plan.fd.h1;
        let mut dphi = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut a = p.clone();
            a[k] += h;
            let mut b = p.clone();
            b[k] -= h;
            dphi.push(s.phi_at(&a).sub(&s.phi_at(&b))?.scale(1.0 / (2.0 * h)));
        }
        // N^c_{ab} = φ^k_a ∂_k φ^c_b − φ^k_b ∂_k φ^c_a
        //          + φ^c_k (∂_b φ^k_a − ∂_a φ^k_b)
        let nijenhuis = TensorValue::from_fn(dim, 1, 2, |ix| {
            let (c, a, b) = (ix[0], ix[1], ix[2]);
            let mut v = 0.0;
            for k in 0..dim {
                v += phi.get(&[k, a]) * dphi[k].get(&[c, b])
                    - phi.get(&[k, b]) * dphi[k].get(&[c, a])
                    + phi.get(&[c, k]) * (dphi[b].get(&[k, a]) - dphi[a].get(&[k, b]));
            }
            v
        });
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let mut n_xy = vec![0.0; dim];
            let mut deta_xy = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    let w = x.get(&[a]) * y.get(&[b]);
                    deta_xy += deta.get(&[a, b]) * w;
                    for c in 0..dim {
                        n_xy[c] += nijenhuis.get(&[c, a, b]) * w;
                    }
                }
            }
            let resid = TensorValue::from_fn(dim, 1, 0, |ix| {
                n_xy[ix[0]] + 2.0 * deta_xy * xi.get(&[ix[0]])
            });
            acc.update(frame_norm(&resid, &smp.frame, &smp.metric), p);
        }
    }
    Ok(report_rows(
        "sasakian",
        vec![("normality", "[φ,φ] + 2dη⊗ξ = 0", acc, tol)],
    ))
}

/// Curvature identities of the Reeb field:
/// R(X,Y)ξ = η(Y)X − η(X)Y, R(ξ,X)Y = g(X,Y)ξ − η(Y)X, Ric(X,ξ) = 2n η(X).
pub fn verify_curvature_identities(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let samples = collect_samples(s.chart(), plan)?;
    let dim = s.dim();
    let two_n = (dim - 1) as f64;
    let mut reeb_curv = ResidualAccumulator::new();
    let mut curv_reeb = ResidualAccumulator::new();
    let mut ricci_reeb = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let riem = riemann(s.chart(), p, &plan.fd)?;
        let ric = ricci(s.chart(), p, &plan.fd)?;
        let xi = s.xi_at(p);
        let eta = s.eta_at(p);
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let eta_x = ContactStructure::pair(&eta, x);
            let eta_y = ContactStructure::pair(&eta, y);
            let r1 = apply_curvature(&riem, x, y, &xi)
                .sub(&x.scale(eta_y))
                .and_then(|t| t.add(&y.scale(eta_x)))?;
            reeb_curv.update(frame_norm(&r1, &smp.frame, &smp.metric), p);
            let gxy = smp.metric.inner(x, y);
            let r2 = apply_curvature(&riem, &xi, x, y)
                .sub(&xi.scale(gxy))
                .and_then(|t| t.add(&x.scale(eta_y)))?;
            curv_reeb.update(frame_norm(&r2, &smp.frame, &smp.metric), p);
            let mut rxxi = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    rxxi += ric.get(&[a, b]) * x.get(&[a]) * xi.get(&[b]);
                }
            }
            ricci_reeb.update((rxxi - two_n * eta_x).abs(), p);
        }
    }
    Ok(report_rows(
        "curvature-identities",
        vec![
            ("curvature-reeb", "R(X,Y)ξ = η(Y)X − η(X)Y", reeb_curv, tol),
            ("reeb-curvature", "R(ξ,X)Y = g(X,Y)ξ − η(Y)X", curv_reeb, tol),
            ("ricci-reeb", "Ric(X,ξ) = 2n·η(X)", ricci_reeb, tol),
        ],
    ))
}

/// R(X,Y)Z from a (1,3) curvature value.
pub fn apply_curvature(
    riem: &TensorValue,
    x: &TensorValue,
    y: &TensorValue,
    z: &TensorValue,
) -> TensorValue {
    let dim = x.dim();
    TensorValue::from_fn(dim, 1, 0, |ix| {
        let mut v = 0.0;
        for b in 0..dim {
            let xb = x.get(&[b]);
            if xb == 0.0 {
                continue;
            }
            for c in 0..dim {
                let yc = y.get(&[c]);
                if yc == 0.0 {
                    continue;
                }
                for d in 0..dim {
                    v += riem.get(&[ix[0], b, c, d]) * xb * yc * z.get(&[d]);
                }
            }
        }
        v
    })
}

/// The sign-convention lock: R(X,Y)ξ = η(Y)X − η(X)Y checked in the fully
/// covariant ordering g(R(X,Y)ξ, W). Run first; flipping the curvature sign
/// or the (0,4) slot order fails here.
pub fn convention_lock(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let samples = collect_samples(s.chart(), plan)?;
    let dim = s.dim();
    let mut acc = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let r4 = riemann_covariant(s.chart(), p, &plan.fd)?;
        let xi = s.xi_at(p);
        let eta = s.eta_at(p);
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let w = smp.vec(i + 2);
            let mut lhs = 0.0;
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        for e in 0..dim {
                            lhs += r4.get(&[b, c, d, e])
                                * x.get(&[b])
                                * y.get(&[c])
                                * xi.get(&[d])
                                * w.get(&[e]);
                        }
                    }
                }
            }
            let rhs = ContactStructure::pair(&eta, y) * smp.metric.inner(x, w)
                - ContactStructure::pair(&eta, x) * smp.metric.inner(y, w);
            acc.update((lhs - rhs).abs(), p);
        }
    }
    Ok(report_rows(
        "convention",
        vec![(
            "curvature-sign-convention",
            "g(R(X,Y)ξ, W) = η(Y)g(X,W) − η(X)g(Y,W)",
            acc,
            tol,
        )],
    ))
}

/// D-homothetic deformation (φ, ξ/a, aη, a·g + a(a−1)·η⊗η).
pub fn d_homothetic_deform(s: &ContactStructure, a: f64) -> Result<ContactStructure> {
    if a <= 0.0 {
        return Err(GeoError::InvalidParameter(format!(
            "deformation constant must be positive, got {a}"
        )));
    }
    let dim = s.dim();
    let base_metric = s.chart().metric_field();
    let eta = s.eta().clone();
    let coef = a * (a - 1.0);
    let metric = move |p: &[f64]| -> TensorValue {
        let g = base_metric.eval(p);
        let e = eta.eval(p);
        TensorValue::from_fn(dim, 0, 2, |ix| {
            a * g.get(ix) + coef * e.get(&[ix[0]]) * e.get(&[ix[1]])
        })
    };
    let mut chart = ChartManifold::new(s.n(), s.chart().domain().clone(), metric);
    // Deformed exact derivatives by jet arithmetic when both base callbacks
    // are available.
    if let (Some(g_jets), Some(e_jets)) = (s.chart().metric_jets(), s.eta_jets().cloned()) {
        let g_jets = g_jets.clone();
        chart = chart.with_metric_jets(move |p: &[f64]| {
            let g_cells = g_jets(p);
            let e_cells = e_jets(p);
            let mut out = Vec::with_capacity(dim * dim);
            for i in 0..dim {
                for j in 0..dim {
                    let gij = g_cells[i * dim + j].scale(a);
                    let ee = (e_cells[i].clone() * e_cells[j].clone()).scale(coef);
                    out.push(gij + ee);
                }
            }
            out
        });
    }
    let xi = s.xi().clone();
    let inv_a = 1.0 / a;
    let new_xi = TensorField::new(1, 0, move |p: &[f64]| xi.eval(p).scale(inv_a));
    let eta2 = s.eta().clone();
    let new_eta = TensorField::new(0, 1, move |p: &[f64]| eta2.eval(p).scale(a));
    let mut out = ContactStructure::new(chart, s.phi().clone(), new_xi, new_eta);
    if let Some(eta_jets) = s.eta_jets().cloned() {
        out = out.with_eta_jets(move |p: &[f64]| {
            eta_jets(p).into_iter().map(|j| j.scale(a)).collect()
        });
    }
    Ok(out)
}

/// Transformation law of η-Einstein constants under a D-homothetic
/// deformation with constant `a`: α' = (α + 2 − 2a)/a, γ' = 2n − α'.
pub fn eta_einstein_transform(alpha: f64, n: usize, a: f64) -> (f64, f64) {
    let alpha_p = (alpha + 2.0 - 2.0 * a) / a;
    (alpha_p, 2.0 * n as f64 - alpha_p)
}
