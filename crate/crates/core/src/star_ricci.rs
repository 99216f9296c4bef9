//! The ⋆-Ricci tensor and its verification machinery.
//!
//! Three independent routes compute the same object:
//!
//! * frame sum        Ric⋆(X,Y) = Σᵢ R(X, eᵢ, φeᵢ, φY)
//! * half trace       Ric⋆(X,Y) = ½ Σᵢ g(φ R(X,φY) eᵢ, eᵢ)   (via first Bianchi)
//! * Ricci shift      Ric⋆(X,Y) = Ric(X,Y) − (2n−1) g(X,Y) − η(X)η(Y)
//!
//! Pairwise agreement of the routes on a Sasakian model is the numerical
//! content of the Ricci-shift formula there. The module also provides the
//! ⋆-scalar curvature, φ-Ricci tensor, Einstein-form fits, η-parallelism of
//! Ric⋆, and the ⋆-semi-symmetry residual.

use crate::calculus::{
    covariant_derivative_curvature, curvature_action_with, ricci, riemann, riemann_covariant,
    TensorField,
};
use crate::contact::{transpose02, ContactStructure};
use crate::error::Result;
use crate::probe::collect_samples;
use crate::report::{PremiseStatus, ResidualAccumulator, ResidualReport};
use crate::sample::SamplePlan;
use crate::tensor::{
    coordinate_frame, frame_norm, raise_lower, OrthonormalFrame, RaiseLower, TensorValue,
};

/// Einstein-type forms the engine can fit a symmetric 2-tensor against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EinsteinKind {
    /// t = α g + γ η⊗η with independent constants.
    EtaEinstein,
    /// t = β (g − η⊗η), the ξ-degenerate variant.
    StarEtaEinstein,
    /// t = β g^φ with β a function.
    WeaklyPhiEinstein,
    /// t = β g^φ with β constant across points.
    PhiEinstein,
    /// t = α g.
    Einstein,
    /// Fit residual exceeded tolerance.
    None,
}

/// Result of a pointwise least-squares fit against an Einstein form.
/// `alpha` and `gamma` are the coefficients of g and η⊗η respectively; the
/// φ-forms report β g^φ = β g − β η⊗η as alpha = β, gamma = −β.
#[derive(Debug, Clone, Copy)]
pub struct EinsteinFit {
    pub alpha: f64,
    pub gamma: f64,
    pub residual: f64,
    pub kind: EinsteinKind,
}

/// Ric⋆ by the frame sum, using the chart's coordinate frame.
pub fn star_ricci_frame_sum(
    s: &ContactStructure,
    p: &[f64],
    plan: &SamplePlan,
) -> Result<TensorValue> {
    let metric = s.chart().metric_at(p)?;
    let frame = coordinate_frame(&metric, None)?;
    star_ricci_frame_sum_with(s, p, plan, &frame)
}

/// Ric⋆ by the frame sum with a caller-supplied orthonormal frame. The trace
/// is frame-independent; injecting frames exists to test exactly that.
pub fn star_ricci_frame_sum_with(
    s: &ContactStructure,
    p: &[f64],
    plan: &SamplePlan,
    frame: &OrthonormalFrame,
) -> Result<TensorValue> {
    let dim = s.dim();
    let r4 = riemann_covariant(s.chart(), p, &plan.fd)?;
    let phi = s.phi_at(p);
    // m[c][d] = Σᵢ eᵢ^c (φeᵢ)^d
    let mut m = vec![0.0; dim * dim];
    for e in &frame.vectors {
        let phie = ContactStructure::apply_phi(&phi, e);
        for c in 0..dim {
            for d in 0..dim {
                m[c * dim + d] += e.get(&[c]) * phie.get(&[d]);
            }
        }
    }
    Ok(TensorValue::from_fn(dim, 0, 2, |ix| {
        let (a, b) = (ix[0], ix[1]);
        let mut v = 0.0;
        for c in 0..dim {
            for d in 0..dim {
                let w = m[c * dim + d];
                if w == 0.0 {
                    continue;
                }
                for e in 0..dim {
                    v += r4.get(&[a, c, d, e]) * w * phi.get(&[e, b]);
                }
            }
        }
        v
    }))
}

/// Ric⋆ by the Bianchi half-trace ½ Σᵢ g(φ R(X,φY) eᵢ, eᵢ).
pub fn star_ricci_bianchi(
    s: &ContactStructure,
    p: &[f64],
    plan: &SamplePlan,
) -> Result<TensorValue> {
    let dim = s.dim();
    let riem = riemann(s.chart(), p, &plan.fd)?;
    let metric = s.chart().metric_at(p)?;
    let frame = coordinate_frame(&metric, None)?;
    let phi = s.phi_at(p);
    let g = metric.g().clone();
    Ok(TensorValue::from_fn(dim, 0, 2, |ix| {
        let (a, b) = (ix[0], ix[1]);
        let mut total = 0.0;
        for e_i in &frame.vectors {
            // w = R(∂_a, φ∂_b) eᵢ
            let mut w = vec![0.0; dim];
            for (out, wv) in w.iter_mut().enumerate() {
                let mut v = 0.0;
                for c in 0..dim {
                    let phicb = phi.get(&[c, b]);
                    if phicb == 0.0 {
                        continue;
                    }
                    for d in 0..dim {
                        v += riem.get(&[out, a, c, d]) * phicb * e_i.get(&[d]);
                    }
                }
                *wv = v;
            }
            // g(φw, eᵢ)
            for c in 0..dim {
                let mut phw = 0.0;
                for d in 0..dim {
                    phw += phi.get(&[c, d]) * w[d];
                }
                for d in 0..dim {
                    total += g.get(&[c, d]) * phw * e_i.get(&[d]);
                }
            }
        }
        0.5 * total
    }))
}

/// Ric⋆ from the Ricci tensor: Ric − (2n−1) g − η⊗η.
pub fn star_ricci_from_ricci(
    s: &ContactStructure,
    p: &[f64],
    plan: &SamplePlan,
) -> Result<TensorValue> {
    let dim = s.dim();
    let shift = (dim - 2) as f64; // 2n − 1
    let ric = ricci(s.chart(), p, &plan.fd)?;
    let g = s.chart().metric_value(p);
    let eta = s.eta_at(p);
    Ok(TensorValue::from_fn(dim, 0, 2, |ix| {
        ric.get(ix) - shift * g.get(ix) - eta.get(&[ix[0]]) * eta.get(&[ix[1]])
    }))
}

/// ⋆-scalar curvature r⋆, the metric trace of Ric⋆.
pub fn star_scalar(s: &ContactStructure, p: &[f64], plan: &SamplePlan) -> Result<f64> {
    let ric_star = star_ricci_frame_sum(s, p, plan)?;
    let metric = s.chart().metric_at(p)?;
    let raised = raise_lower(&ric_star, 0, &metric, RaiseLower::Up)?;
    Ok(raised.contract(0, 0)?.as_scalar())
}

/// ⋆-Ricci operator Q⋆ with Ric⋆(X,Y) = g(Q⋆X, Y): raise the second slot.
pub fn star_ricci_operator(
    s: &ContactStructure,
    p: &[f64],
    plan: &SamplePlan,
) -> Result<TensorValue> {
    let ric_star = star_ricci_frame_sum(s, p, plan)?;
    let metric = s.chart().metric_at(p)?;
    raise_lower(&ric_star, 1, &metric, RaiseLower::Up)
}

/// φ-Ricci tensor: the symmetric part of Ric⋆.
pub fn phi_ricci(s: &ContactStructure, p: &[f64], plan: &SamplePlan) -> Result<TensorValue> {
    let rs = star_ricci_frame_sum(s, p, plan)?;
    Ok(rs.add(&transpose02(&rs))?.scale(0.5))
}

/// g^φ(X,Y) = g(φX, φY).
pub fn g_phi(s: &ContactStructure, p: &[f64]) -> Result<TensorValue> {
    let dim = s.dim();
    let g = s.chart().metric_value(p);
    let phi = s.phi_at(p);
    Ok(TensorValue::from_fn(dim, 0, 2, |ix| {
        let mut v = 0.0;
        for c in 0..dim {
            let pca = phi.get(&[c, ix[0]]);
            if pca == 0.0 {
                continue;
            }
            for d in 0..dim {
                v += g.get(&[c, d]) * pca * phi.get(&[d, ix[1]]);
            }
        }
        v
    }))
}

/// Least-squares fit of the symmetric part of `t` against the requested
/// Einstein form, computed in the orthonormal frame at `p` so the misfit is
/// scale-invariant. The returned kind degrades to `None` when the misfit
/// exceeds `tol`. The normal equations are deterministic, so the fit is
/// independent of sample ordering.
pub fn fit_einstein_form(
    t: &TensorValue,
    s: &ContactStructure,
    p: &[f64],
    kind: EinsteinKind,
    tol: f64,
) -> Result<EinsteinFit> {
    let metric = s.chart().metric_at(p)?;
    let frame = coordinate_frame(&metric, None)?;
    let dim = s.dim();
    let sym = t.add(&transpose02(t))?.scale(0.5);
    let t_f = crate::tensor::frame_components(&sym, &frame, &metric)?;
    let eta = s.eta_at(p);
    let g_f = TensorValue::from_fn(dim, 0, 2, |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 });
    let eta_f: Vec<f64> = frame
        .vectors
        .iter()
        .map(|e| ContactStructure::pair(&eta, e))
        .collect();
    let ee_f = TensorValue::from_fn(dim, 0, 2, |ix| eta_f[ix[0]] * eta_f[ix[1]]);
    let dot = |a: &TensorValue, b: &TensorValue| -> f64 {
        a.components()
            .iter()
            .zip(b.components().iter())
            .map(|(x, y)| x * y)
            .sum()
    };
    let misfit_against = |alpha: f64, basis_a: &TensorValue, gamma: f64, basis_b: &TensorValue| {
        let mut m = 0.0f64;
        for i in 0..t_f.components().len() {
            let model = alpha * basis_a.components()[i] + gamma * basis_b.components()[i];
            m = m.max((t_f.components()[i] - model).abs());
        }
        m
    };
    let (alpha, gamma, residual) = match kind {
        EinsteinKind::EtaEinstein => {
            let (aa, ab, bb) = (dot(&g_f, &g_f), dot(&g_f, &ee_f), dot(&ee_f, &ee_f));
            let (ta, tb) = (dot(&t_f, &g_f), dot(&t_f, &ee_f));
            let det = aa * bb - ab * ab;
            let alpha = (ta * bb - tb * ab) / det;
            let gamma = (aa * tb - ab * ta) / det;
            (alpha, gamma, misfit_against(alpha, &g_f, gamma, &ee_f))
        }
        EinsteinKind::StarEtaEinstein => {
            let basis = g_f.sub(&ee_f)?;
            let beta = dot(&t_f, &basis) / dot(&basis, &basis);
            (beta, -beta, misfit_against(beta, &g_f, -beta, &ee_f))
        }
        EinsteinKind::WeaklyPhiEinstein | EinsteinKind::PhiEinstein => {
            let gphi = g_phi(s, p)?;
            let gphi_f = crate::tensor::frame_components(&gphi, &frame, &metric)?;
            let beta = dot(&t_f, &gphi_f) / dot(&gphi_f, &gphi_f);
            let zero = TensorValue::zeros(dim, 0, 2);
            (beta, -beta, misfit_against(beta, &gphi_f, 0.0, &zero))
        }
        EinsteinKind::Einstein => {
            let alpha = dot(&t_f, &g_f) / dot(&g_f, &g_f);
            let zero = TensorValue::zeros(dim, 0, 2);
            (alpha, 0.0, misfit_against(alpha, &g_f, 0.0, &zero))
        }
        EinsteinKind::None => (0.0, 0.0, t_f.max_abs()),
    };
    Ok(EinsteinFit {
        alpha,
        gamma,
        residual,
        kind: if residual <= tol { kind } else { EinsteinKind::None },
    })
}

/// Aggregate Einstein classification of the Ricci tensor over a plan:
/// pointwise fits must stay within `tol` and the fitted constants must agree
/// across points within `const_tol`.
#[derive(Debug, Clone, Copy)]
pub struct GlobalFit {
    pub alpha: f64,
    pub gamma: f64,
    pub max_residual: f64,
    pub const_spread: f64,
    pub holds: bool,
}

pub fn classify_ricci_einstein(
    s: &ContactStructure,
    plan: &SamplePlan,
    kind: EinsteinKind,
    tol: f64,
    const_tol: f64,
) -> Result<GlobalFit> {
    let samples = collect_samples(s.chart(), plan)?;
    let mut fits = Vec::with_capacity(samples.len());
    for smp in &samples {
        let ric = ricci(s.chart(), &smp.point, &plan.fd)?;
        fits.push(fit_einstein_form(&ric, s, &smp.point, kind, tol)?);
    }
    let m = fits.len() as f64;
    let alpha = fits.iter().map(|f| f.alpha).sum::<f64>() / m;
    let gamma = fits.iter().map(|f| f.gamma).sum::<f64>() / m;
    let max_residual = fits.iter().fold(0.0f64, |acc, f| acc.max(f.residual));
    let const_spread = fits.iter().fold(0.0f64, |acc, f| {
        acc.max((f.alpha - alpha).abs()).max((f.gamma - gamma).abs())
    });
    Ok(GlobalFit {
        alpha,
        gamma,
        max_residual,
        const_spread,
        holds: max_residual <= tol && const_spread <= const_tol,
    })
}

/// η-parallelism of Ric⋆: (∇_Z Ric⋆)(φX, φY) = 0, with ∇Ric⋆ the covariant
/// derivative of the pointwise frame-sum field. A second row cross-checks
/// that derivative against its Ricci-shift decomposition
/// (∇_Z Ric⋆)(X,Y) = (∇_Z Ric)(X,Y) − g(Z,φX)η(Y) − g(Z,φY)η(X).
pub fn eta_parallel_star_residual(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let samples = collect_samples(s.chart(), plan)?;
    let dim = s.dim();
    let s2 = s.clone();
    let plan2 = plan.clone();
    let star_field = TensorField::new(0, 2, move |q: &[f64]| {
        star_ricci_frame_sum(&s2, q, &plan2).expect("star-Ricci field")
    });
    let s3 = s.clone();
    let fd3 = plan.fd;
    let ricci_field = TensorField::new(0, 2, move |q: &[f64]| {
        ricci(s3.chart(), q, &fd3).expect("Ricci field")
    });
    let mut parallel = ResidualAccumulator::new();
    let mut split = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let d_star = covariant_derivative_curvature(s.chart(), &star_field, p, &plan.fd)?;
        let d_ric = covariant_derivative_curvature(s.chart(), &ricci_field, p, &plan.fd)?;
        let phi = s.phi_at(p);
        let eta = s.eta_at(p);
        let g = smp.metric.g();
        for (i, z) in smp.vectors.iter().enumerate() {
            let x = smp.vec(i + 1);
            let y = smp.vec(i + 2);
            let phix = ContactStructure::apply_phi(&phi, x);
            let phiy = ContactStructure::apply_phi(&phi, y);
            let eta_x = ContactStructure::pair(&eta, x);
            let eta_y = ContactStructure::pair(&eta, y);
            let mut v = 0.0;
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            for zk in 0..dim {
                let zz = z.get(&[zk]);
                if zz == 0.0 {
                    continue;
                }
                for a in 0..dim {
                    for b in 0..dim {
                        v += d_star.get(&[zk, a, b]) * zz * phix.get(&[a]) * phiy.get(&[b]);
                        lhs += d_star.get(&[zk, a, b]) * zz * x.get(&[a]) * y.get(&[b]);
                        rhs += d_ric.get(&[zk, a, b]) * zz * x.get(&[a]) * y.get(&[b]);
                    }
                }
                for a in 0..dim {
                    rhs -= g.get(&[zk, a]) * zz * (phix.get(&[a]) * eta_y + phiy.get(&[a]) * eta_x);
                }
            }
            parallel.update(v.abs(), p);
            split.update((lhs - rhs).abs(), p);
        }
    }
    Ok(vec![
        ResidualReport::new(
            "star-ricci",
            "eta-parallel-star-ricci",
            "(∇_Z Ric⋆)(φX, φY) = 0",
            &parallel,
            tol,
        ),
        ResidualReport::new(
            "star-ricci",
            "star-ricci-derivative-split",
            "(∇_Z Ric⋆)(X,Y) = (∇_Z Ric)(X,Y) − g(Z,φX)η(Y) − g(Z,φY)η(X)",
            &split,
            tol,
        ),
    ])
}

/// ⋆-semi-symmetry residual: the frame norm of R(X,Y)·Ric⋆ over samples.
/// `star_override` substitutes another (0,2) field for Ric⋆; passing the zero
/// field confirms the residual collapses identically.
pub fn star_semi_symmetry_residual(
    s: &ContactStructure,
    plan: &SamplePlan,
    star_override: Option<&TensorField>,
) -> Result<ResidualAccumulator> {
    let samples = collect_samples(s.chart(), plan)?;
    let mut acc = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let riem = riemann(s.chart(), p, &plan.fd)?;
        let star = match star_override {
            Some(f) => f.eval(p),
            None => star_ricci_frame_sum(s, p, plan)?,
        };
        for (i, x) in smp.vectors.iter().enumerate() {
            let y = smp.vec(i + 1);
            let action = curvature_action_with(&riem, x, y, &star)?;
            acc.update(frame_norm(&action, &smp.frame, &smp.metric), p);
        }
    }
    Ok(acc)
}

/// The semi-symmetry ⟹ ⋆-flatness implication, premise-gated: only when the
/// ⋆-semi-symmetry residual is below tolerance must Ric⋆ vanish.
pub fn semi_symmetry_implication(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let premise = star_semi_symmetry_residual(s, plan, None)?;
    let samples = collect_samples(s.chart(), plan)?;
    let mut flat = ResidualAccumulator::new();
    for smp in &samples {
        let star = star_ricci_frame_sum(s, &smp.point, plan)?;
        flat.update(frame_norm(&star, &smp.frame, &smp.metric), &smp.point);
    }
    let status = if premise.max <= tol {
        PremiseStatus::Passed
    } else {
        PremiseStatus::Violated
    };
    Ok(vec![ResidualReport::new(
        "semi-symmetry",
        "semi-symmetry-implies-star-flat",
        "R(X,Y)·Ric⋆ = 0 ⟹ Ric⋆ = 0",
        &flat,
        tol,
    )
    .with_premise(status)])
}

/// Suite rows: three-route agreement, Ric⋆(·,ξ) = 0, symmetry measurement,
/// the Ricci half-trace relation, g^φ and φ-Ricci identities, ⋆-scalar trace
/// consistency, and η-parallelism with its derivative split.
pub fn star_ricci_suite(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
    tol_parallel: f64,
) -> Result<Vec<ResidualReport>> {
    let samples = collect_samples(s.chart(), plan)?;
    let dim = s.dim();
    let two_n_minus_1 = (dim - 2) as f64;
    let mut frame_vs_bianchi = ResidualAccumulator::new();
    let mut frame_vs_shift = ResidualAccumulator::new();
    let mut reeb_kernel = ResidualAccumulator::new();
    let mut symmetry = ResidualAccumulator::new();
    let mut trace_relation = ResidualAccumulator::new();
    let mut gphi_identity = ResidualAccumulator::new();
    let mut phi_ricci_match = ResidualAccumulator::new();
    let mut scalar_consistency = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let by_frame = star_ricci_frame_sum(s, p, plan)?;
        let by_bianchi = star_ricci_bianchi(s, p, plan)?;
        let by_shift = star_ricci_from_ricci(s, p, plan)?;
        frame_vs_bianchi.update(
            frame_norm(&by_frame.sub(&by_bianchi)?, &smp.frame, &smp.metric),
            p,
        );
        frame_vs_shift.update(
            frame_norm(&by_frame.sub(&by_shift)?, &smp.frame, &smp.metric),
            p,
        );
        let xi = s.xi_at(p);
        let kernel = TensorValue::from_fn(dim, 0, 1, |ix| {
            (0..dim).map(|b| by_frame.get(&[ix[0], b]) * xi.get(&[b])).sum()
        });
        reeb_kernel.update(frame_norm(&kernel, &smp.frame, &smp.metric), p);
        symmetry.update(
            frame_norm(&by_frame.sub(&transpose02(&by_frame))?, &smp.frame, &smp.metric),
            p,
        );
        let ric = ricci(s.chart(), p, &plan.fd)?;
        let g = s.chart().metric_value(p);
        let eta = s.eta_at(p);
        let relation = TensorValue::from_fn(dim, 0, 2, |ix| {
            ric.get(ix)
                - by_bianchi.get(ix)
                - two_n_minus_1 * g.get(ix)
                - eta.get(&[ix[0]]) * eta.get(&[ix[1]])
        });
        trace_relation.update(frame_norm(&relation, &smp.frame, &smp.metric), p);
        let gphi = g_phi(s, p)?;
        let gphi_target = TensorValue::from_fn(dim, 0, 2, |ix| {
            g.get(ix) - eta.get(&[ix[0]]) * eta.get(&[ix[1]])
        });
        gphi_identity.update(
            frame_norm(&gphi.sub(&gphi_target)?, &smp.frame, &smp.metric),
            p,
        );
        let rphi = phi_ricci(s, p, plan)?;
        phi_ricci_match.update(frame_norm(&rphi.sub(&by_frame)?, &smp.frame, &smp.metric), p);
        // r⋆ as a metric trace versus the frame diagonal sum.
        let r_star = star_scalar(s, p, plan)?;
        let frame_trace: f64 = smp
            .frame
            .vectors
            .iter()
            .map(|e| eval_02(&by_frame, e, e))
            .sum();
        scalar_consistency.update((r_star - frame_trace).abs(), p);
    }
    let mut rows = vec![
        ResidualReport::new(
            "star-ricci",
            "routes-frame-vs-half-trace",
            "Σᵢ R(X,eᵢ,φeᵢ,φY) = ½ Σᵢ g(φR(X,φY)eᵢ,eᵢ)",
            &frame_vs_bianchi,
            tol,
        ),
        ResidualReport::new(
            "star-ricci",
            "routes-frame-vs-ricci-shift",
            "Ric⋆ = Ric − (2n−1)g − η⊗η",
            &frame_vs_shift,
            tol,
        ),
        ResidualReport::new("star-ricci", "star-ricci-reeb", "Ric⋆(X, ξ) = 0", &reeb_kernel, tol),
        ResidualReport::new(
            "star-ricci",
            "star-ricci-symmetry",
            "Ric⋆(X,Y) = Ric⋆(Y,X) on these models",
            &symmetry,
            tol,
        ),
        ResidualReport::new(
            "star-ricci",
            "ricci-half-trace-relation",
            "Ric = ½Σᵢ g(φR(X,φY)eᵢ,eᵢ) + (2n−1)g + η⊗η",
            &trace_relation,
            tol,
        ),
        ResidualReport::new("star-ricci", "g-phi-form", "g^φ = g − η⊗η", &gphi_identity, tol),
        ResidualReport::new(
            "star-ricci",
            "phi-ricci-matches-star",
            "Ric^φ = ½(Ric⋆ + Ric⋆ᵀ) = Ric⋆ on these models",
            &phi_ricci_match,
            tol,
        ),
        ResidualReport::new(
            "star-ricci",
            "star-scalar-trace",
            "r⋆ = Σᵢ Ric⋆(eᵢ,eᵢ)",
            &scalar_consistency,
            tol,
        ),
    ];
    rows.extend(eta_parallel_star_residual(s, plan, tol_parallel)?);
    Ok(rows)
}

/// t(X,Y) for a (0,2) value.
pub fn eval_02(t: &TensorValue, x: &TensorValue, y: &TensorValue) -> f64 {
    let dim = t.dim();
    let mut v = 0.0;
    for a in 0..dim {
        let xa = x.get(&[a]);
        if xa == 0.0 {
            continue;
        }
        for b in 0..dim {
            v += t.get(&[a, b]) * xa * y.get(&[b]);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{standard_sasakian, unit_sphere};
    use crate::sample::SampleRng;
    use crate::tensor::gram_schmidt;

    fn plan(points: usize) -> SamplePlan {
        SamplePlan::new(points, 42)
    }

    fn probe_point(s: &ContactStructure, seed: u64) -> Vec<f64> {
        let mut rng = SampleRng::new(seed);
        rng.point_in(s.chart().domain(), 2e-3)
    }

    #[test]
    fn sphere_star_ricci_is_g_minus_eta_eta() {
        for n in [1usize, 2] {
            let s = unit_sphere(n);
            let plan = plan(1);
            let p = probe_point(&s, 5);
            let star = star_ricci_frame_sum(&s, &p, &plan).unwrap();
            let g = s.chart().metric_value(&p);
            let eta = s.eta_at(&p);
            let target = TensorValue::from_fn(s.dim(), 0, 2, |ix| {
                g.get(ix) - eta.get(&[ix[0]]) * eta.get(&[ix[1]])
            });
            assert!(star.sub(&target).unwrap().max_abs() < 1e-6);
        }
    }

    #[test]
    fn r2n1_star_ricci_scales_g_phi() {
        // Ric⋆ = −(2n+1)(g − η⊗η) on the standard structure.
        for n in [1usize, 2] {
            let s = standard_sasakian(n);
            let plan = plan(1);
            let p = probe_point(&s, 7);
            let star = star_ricci_frame_sum(&s, &p, &plan).unwrap();
            let g = s.chart().metric_value(&p);
            let eta = s.eta_at(&p);
            let c = -(2.0 * n as f64 + 1.0);
            let target = TensorValue::from_fn(s.dim(), 0, 2, |ix| {
                c * (g.get(ix) - eta.get(&[ix[0]]) * eta.get(&[ix[1]]))
            });
            assert!(star.sub(&target).unwrap().max_abs() < 1e-5, "n = {n}");
        }
    }

    #[test]
    fn star_scalar_values() {
        let plan = plan(1);
        let s3 = unit_sphere(1);
        let p = probe_point(&s3, 3);
        assert!((star_scalar(&s3, &p, &plan).unwrap() - 2.0).abs() < 1e-6);
        let s5 = unit_sphere(2);
        let p = probe_point(&s5, 3);
        assert!((star_scalar(&s5, &p, &plan).unwrap() - 4.0).abs() < 1e-6);
        let r5 = standard_sasakian(2);
        let p = probe_point(&r5, 3);
        assert!((star_scalar(&r5, &p, &plan).unwrap() + 20.0).abs() < 1e-5);
    }

    #[test]
    fn frame_sum_is_frame_independent() {
        let s = standard_sasakian(1);
        let plan = plan(1);
        let p = probe_point(&s, 11);
        let metric = s.chart().metric_at(&p).unwrap();
        let frame_a = coordinate_frame(&metric, None).unwrap();
        // A second frame from randomized input vectors.
        let mut rng = SampleRng::new(999);
        let vecs: Vec<TensorValue> = (0..8).map(|_| rng.vector(3)).collect();
        let frame_b = gram_schmidt(&vecs, &metric).unwrap();
        let a = star_ricci_frame_sum_with(&s, &p, &plan, &frame_a).unwrap();
        let b = star_ricci_frame_sum_with(&s, &p, &plan, &frame_b).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn einstein_fit_recovers_sphere_constants() {
        let s = unit_sphere(1);
        let pl = plan(1);
        let p = probe_point(&s, 13);
        let ric = crate::calculus::ricci(s.chart(), &p, &pl.fd).unwrap();
        let fit = fit_einstein_form(&ric, &s, &p, EinsteinKind::EtaEinstein, 1e-6).unwrap();
        assert!((fit.alpha - 2.0).abs() < 1e-6, "alpha {}", fit.alpha);
        assert!(fit.gamma.abs() < 1e-6, "gamma {}", fit.gamma);
        assert_eq!(fit.kind, EinsteinKind::EtaEinstein);
    }

    #[test]
    fn einstein_fit_recovers_r2n1_constants() {
        let s = standard_sasakian(2);
        let pl = plan(1);
        let p = probe_point(&s, 17);
        let ric = crate::calculus::ricci(s.chart(), &p, &pl.fd).unwrap();
        let fit = fit_einstein_form(&ric, &s, &p, EinsteinKind::EtaEinstein, 1e-5).unwrap();
        assert!((fit.alpha + 2.0).abs() < 1e-6, "alpha {}", fit.alpha);
        assert!((fit.gamma - 6.0).abs() < 1e-6, "gamma {}", fit.gamma);
        // Ric⋆ against β g^φ: β = −5.
        let star = star_ricci_frame_sum(&s, &p, &pl).unwrap();
        let fit =
            fit_einstein_form(&star, &s, &p, EinsteinKind::WeaklyPhiEinstein, 1e-5).unwrap();
        assert!((fit.alpha + 5.0).abs() < 1e-5, "beta {}", fit.alpha);
        assert_eq!(fit.kind, EinsteinKind::WeaklyPhiEinstein);
    }

    #[test]
    fn einstein_fit_degrades_to_none() {
        // S³ Ricci is 2g, not a pure multiple of g − η⊗η.
        let s = unit_sphere(1);
        let pl = plan(1);
        let p = probe_point(&s, 19);
        let ric = crate::calculus::ricci(s.chart(), &p, &pl.fd).unwrap();
        let fit = fit_einstein_form(&ric, &s, &p, EinsteinKind::StarEtaEinstein, 1e-6).unwrap();
        assert_eq!(fit.kind, EinsteinKind::None);
        assert!(fit.residual > 0.1);
    }

    #[test]
    fn fit_is_independent_of_sample_order() {
        let s = standard_sasakian(1);
        let mut plan_a = SamplePlan::new(6, 42);
        plan_a.vectors_per_point = 3;
        let fit_a =
            classify_ricci_einstein(&s, &plan_a, EinsteinKind::EtaEinstein, 1e-5, 1e-5).unwrap();
        let fit_b =
            classify_ricci_einstein(&s, &plan_a, EinsteinKind::EtaEinstein, 1e-5, 1e-5).unwrap();
        assert_eq!(fit_a.alpha.to_bits(), fit_b.alpha.to_bits());
        assert_eq!(fit_a.gamma.to_bits(), fit_b.gamma.to_bits());
        assert!(fit_a.holds);
        assert!((fit_a.alpha + 2.0).abs() < 1e-6);
        assert!((fit_a.gamma - 4.0).abs() < 1e-6);
    }

    #[test]
    fn semi_symmetry_negative_control_on_sphere() {
        let s = unit_sphere(1);
        let mut pl = plan(6);
        pl.vectors_per_point = 4;
        let acc = star_semi_symmetry_residual(&s, &pl, None).unwrap();
        assert!(acc.max > 0.1, "expected generic residual, got {}", acc.max);
        // Substituting a flat ⋆-Ricci drives the residual to exactly zero.
        let zero = TensorField::new(0, 2, |_p: &[f64]| TensorValue::zeros(3, 0, 2));
        let acc0 = star_semi_symmetry_residual(&s, &pl, Some(&zero)).unwrap();
        assert_eq!(acc0.max, 0.0);
        // The implication row is premise-violated, hence skipped, not failed.
        let rows = semi_symmetry_implication(&s, &pl, 1e-6).unwrap();
        assert!(rows[0].skipped());
        assert!(!rows[0].failed());
    }

    #[test]
    fn suite_rows_pass_on_models() {
        for s in [unit_sphere(1), standard_sasakian(1)] {
            let mut pl = plan(4);
            pl.vectors_per_point = 3;
            let rows = star_ricci_suite(&s, &pl, 1e-6, 1e-4).unwrap();
            for row in &rows {
                assert!(
                    row.pass,
                    "row {} failed with residual {}",
                    row.identity, row.max_residual
                );
            }
        }
    }
}
