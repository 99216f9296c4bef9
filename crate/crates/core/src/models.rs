//! Catalogue of exactly-constructed Sasakian model spaces.
//!
//! Two families are provided, each with closed-form metric and contact data
//! evaluated through jet arithmetic so that exact derivatives up to third
//! order are available:
//!
//! * `r2n1` — the standard Sasakian structure on ℝ^{2n+1} with coordinates
//!   (x¹..xⁿ, y¹..yⁿ, z), η = ½(dz − Σ yⁱdxⁱ), ξ = 2∂_z and
//!   g = η⊗η + ¼Σ((dxⁱ)² + (dyⁱ)²). Its φ-sectional curvature is −3.
//! * `sphere` — the unit sphere S^{2n+1} ⊂ ℝ^{2n+2} with the structure induced
//!   by the ambient complex multiplication, on a graph chart over a
//!   coordinate hemisphere. Constant curvature +1.
//!
//! A closed-form space-form curvature serves as an independent oracle for
//! both models.

use crate::calculus::{ChartManifold, DomainBox, TensorField};
use crate::contact::ContactStructure;
use crate::error::{GeoError, Result};
use crate::jet::{jet_vars, Scalar};
use crate::tensor::TensorValue;

/// Catalogue entry descriptor.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    StandardR2n1,
    UnitSphere,
    DHomothetic { base: Box<ModelKind>, a: f64 },
}

impl ModelKind {
    /// φ-sectional curvature of the undeformed space forms.
    pub fn phi_sectional_constant(&self) -> Option<f64> {
        match self {
            ModelKind::StandardR2n1 => Some(-3.0),
            ModelKind::UnitSphere => Some(1.0),
            ModelKind::DHomothetic { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub n: usize,
    pub kind: ModelKind,
}

/// A registered model: its descriptor plus the evaluable structure.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ModelSpec,
    pub structure: ContactStructure,
}

// ---------------------------------------------------------------------------
// Standard Sasakian structure on ℝ^{2n+1}
// ---------------------------------------------------------------------------

// Coordinate blocks: x = 0..n, y = n..2n, z = 2n.
fn r2n1_metric_entries<T: Scalar>(n: usize, p: &[T]) -> Vec<T> {
    let dim = 2 * n + 1;
    let quarter = p[0].lift(0.25);
    let zero = p[0].lift(0.0);
    let mut g = vec![zero.clone(); dim * dim];
    for i in 0..n {
        let yi = p[n + i].clone();
        for j in 0..n {
            let yj = p[n + j].clone();
            let delta = if i == j { 1.0 } else { 0.0 };
            g[i * dim + j] = (yi.clone() * yj + p[0].lift(delta)) * quarter.clone();
        }
        // g(∂_{xⁱ}, ∂_z) = −yⁱ/4
        let gxz = -yi * quarter.clone();
        g[i * dim + 2 * n] = gxz.clone();
        g[2 * n * dim + i] = gxz;
        // g(∂_{yⁱ}, ∂_{yⁱ}) = 1/4
        g[(n + i) * dim + (n + i)] = quarter.clone();
    }
    g[2 * n * dim + 2 * n] = quarter;
    g
}

fn r2n1_eta_entries<T: Scalar>(n: usize, p: &[T]) -> Vec<T> {
    let dim = 2 * n + 1;
    let zero = p[0].lift(0.0);
    let mut eta = vec![zero; dim];
    for i in 0..n {
        eta[i] = p[n + i].scale_s(-0.5);
    }
    eta[2 * n] = p[0].lift(0.5);
    eta
}

/// The standard Sasakian structure on ℝ^{2n+1}.
pub fn standard_sasakian(n: usize) -> ContactStructure {
    assert!(n >= 1);
    let dim = 2 * n + 1;
    let domain = DomainBox::centered(dim, 0.8);
    let chart = ChartManifold::new(n, domain, move |p: &[f64]| {
        let entries = r2n1_metric_entries(n, p);
        TensorValue::from_fn(dim, 0, 2, |ix| entries[ix[0] * dim + ix[1]])
    })
    .with_metric_jets(move |p: &[f64]| r2n1_metric_entries(n, &jet_vars(p)));

    // φ(∂_{xⁱ}) = −∂_{yⁱ},  φ(∂_{yⁱ}) = ∂_{xⁱ} + yⁱ∂_z,  φ(∂_z) = 0.
    let phi = TensorField::new(1, 1, move |p: &[f64]| {
        let mut m = TensorValue::zeros(dim, 1, 1);
        for i in 0..n {
            m.set(&[n + i, i], -1.0);
            m.set(&[i, n + i], 1.0);
            m.set(&[2 * n, n + i], p[n + i]);
        }
        m
    });
    let xi = TensorField::new(1, 0, move |_p: &[f64]| {
        let mut v = TensorValue::zeros(dim, 1, 0);
        v.set(&[2 * n], 2.0);
        v
    });
    let eta = TensorField::new(0, 1, move |p: &[f64]| {
        let entries = r2n1_eta_entries(n, p);
        TensorValue::from_fn(dim, 0, 1, |ix| entries[ix[0]])
    });
    ContactStructure::new(chart, phi, xi, eta)
        .with_eta_jets(move |p: &[f64]| r2n1_eta_entries(n, &jet_vars(p)))
}

// ---------------------------------------------------------------------------
// Unit sphere S^{2n+1}
// ---------------------------------------------------------------------------

// Graph chart u ↦ (u, w), w = √(1 − |u|²), over the hemisphere where the
// last ambient coordinate is positive. The ambient complex structure pairs
// coordinates (2k, 2k+1): J e_{2k} = e_{2k+1}, J e_{2k+1} = −e_{2k}.

fn sphere_metric_entries<T: Scalar>(dim: usize, u: &[T]) -> Vec<T> {
    let one = u[0].lift(1.0);
    let mut s = u[0].lift(0.0);
    for x in u {
        s = s + x.clone() * x.clone();
    }
    let f = one.clone() / (one - s);
    let mut g = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let delta = if i == j { 1.0 } else { 0.0 };
            g.push(u[i].clone() * u[j].clone() * f.clone() + u[0].lift(delta));
        }
    }
    g
}

// Ambient J applied to the embedding point, component k.
fn sphere_jp_at<T: Scalar>(u: &[T], w: &T, k: usize) -> T {
    let dim = u.len();
    let p_at = |m: usize| -> T {
        if m < dim {
            u[m].clone()
        } else {
            w.clone()
        }
    };
    if k.is_multiple_of(2) {
        -p_at(k + 1)
    } else {
        p_at(k - 1)
    }
}

fn sphere_eta_entries<T: Scalar>(dim: usize, u: &[T]) -> Vec<T> {
    let one = u[0].lift(1.0);
    let mut s = u[0].lift(0.0);
    for x in u {
        s = s + x.clone() * x.clone();
    }
    let w = (one - s).sqrt_s();
    let jp_last = sphere_jp_at(u, &w, dim);
    (0..dim)
        .map(|a| sphere_jp_at(u, &w, a) - u[a].clone() * jp_last.clone() / w.clone())
        .collect()
}

/// The unit sphere S^{2n+1} with its standard Sasakian structure.
pub fn unit_sphere(n: usize) -> ContactStructure {
    assert!(n >= 1);
    let dim = 2 * n + 1;
    let ambient = dim + 1;
    // Non-polar base point with the box kept well inside the chart's
    // singular locus |u| = 1.
    let half_width = 0.4 / (dim as f64).sqrt();
    let center = 0.05;
    let domain = DomainBox::new(
        vec![center - half_width; dim],
        vec![center + half_width; dim],
    );
    // NaN from the square root past the singular locus |u| = 1 flows into
    // the tensor value and is rejected by the pointwise metric factorization
    // rather than panicking here.
    let chart = ChartManifold::new(n, domain, move |u: &[f64]| {
        let entries = sphere_metric_entries(dim, u);
        TensorValue::from_fn(dim, 0, 2, |ix| entries[ix[0] * dim + ix[1]])
    })
    .with_metric_jets(move |u: &[f64]| sphere_metric_entries(dim, &jet_vars(u)));

    let xi = TensorField::new(1, 0, move |u: &[f64]| {
        let w = chart_w(u);
        TensorValue::from_fn(dim, 1, 0, |ix| sphere_jp_at(u, &w, ix[0]))
    });
    let eta = TensorField::new(0, 1, move |u: &[f64]| {
        let entries = sphere_eta_entries(dim, u);
        TensorValue::from_fn(dim, 0, 1, |ix| entries[ix[0]])
    });
    // φX = −(JX − ⟨JX,p⟩p), pulled back to chart components. The sign makes
    // ∇_Xξ = −φX hold with ξ the pullback of p ↦ J·p.
    let phi = TensorField::new(1, 1, move |u: &[f64]| {
        let w = chart_w(u);
        let mut p_amb = u.to_vec();
        p_amb.push(w);
        let mut out = TensorValue::zeros(dim, 1, 1);
        for j in 0..dim {
            // Ambient basis vector ∂_j = e_j − (u_j/w) e_{last}.
            let mut t = vec![0.0; ambient];
            for (k, tv) in t.iter_mut().enumerate() {
                let ej = if k == j { 1.0 } else { 0.0 };
                let elast = if k == ambient - 1 { 1.0 } else { 0.0 };
                *tv = ej - (u[j] / w) * elast;
            }
            let jt = jmul(&t);
            let dot: f64 = jt.iter().zip(p_amb.iter()).map(|(a, b)| a * b).sum();
            for i in 0..dim {
                out.set(&[i, j], -jt[i] + dot * p_amb[i]);
            }
        }
        out
    });
    ContactStructure::new(chart, phi, xi, eta)
        .with_eta_jets(move |u: &[f64]| sphere_eta_entries(dim, &jet_vars(u)))
}

fn chart_w(u: &[f64]) -> f64 {
    let s: f64 = u.iter().map(|x| x * x).sum();
    (1.0 - s).sqrt()
}

fn jmul(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for k in (0..v.len()).step_by(2) {
        out[k] = -v[k + 1];
        out[k + 1] = v[k];
    }
    out
}

/// Flat chart, used as a reference geometry in tests.
pub fn euclidean_chart(dim: usize) -> ChartManifold {
    assert!(dim % 2 == 1);
    let n = (dim - 1) / 2;
    ChartManifold::new(n, DomainBox::centered(dim, 1.0), move |_p: &[f64]| {
        TensorValue::from_fn(dim, 0, 2, |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 })
    })
    .with_metric_jets(move |p: &[f64]| {
        let vars = jet_vars(p);
        let mut out = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                out.push(vars[0].lift(if i == j { 1.0 } else { 0.0 }));
            }
        }
        out
    })
}

// ---------------------------------------------------------------------------
// Space-form curvature oracle
// ---------------------------------------------------------------------------

/// Closed-form curvature R(X,Y)Z of a Sasakian space form with φ-sectional
/// curvature `c`, evaluated with the structure's pointwise data.
pub fn space_form_curvature(
    c: f64,
    s: &ContactStructure,
    p: &[f64],
    x: &TensorValue,
    y: &TensorValue,
    z: &TensorValue,
) -> Result<TensorValue> {
    let dim = s.dim();
    let metric = s.chart().metric_at(p)?;
    let phi = s.phi_at(p);
    let xi = s.xi_at(p);
    let eta = s.eta_at(p);
    let g = |a: &TensorValue, b: &TensorValue| metric.inner(a, b);
    let phix = ContactStructure::apply_phi(&phi, x);
    let phiy = ContactStructure::apply_phi(&phi, y);
    let phiz = ContactStructure::apply_phi(&phi, z);
    let ex = ContactStructure::pair(&eta, x);
    let ey = ContactStructure::pair(&eta, y);
    let ez = ContactStructure::pair(&eta, z);
    let a1 = (c + 3.0) / 4.0;
    let a2 = (c - 1.0) / 4.0;
    let gyz = g(y, z);
    let gxz = g(x, z);
    let g_z_phiy = g(z, &phiy);
    let g_z_phix = g(z, &phix);
    let g_x_phiy = g(x, &phiy);
    Ok(TensorValue::from_fn(dim, 1, 0, |ix| {
        let i = ix[0];
        let first = gyz * x.get(&[i]) - gxz * y.get(&[i]);
        let second = ex * ez * y.get(&[i]) - ey * ez * x.get(&[i])
            + gxz * ey * xi.get(&[i])
            - gyz * ex * xi.get(&[i])
            + g_z_phiy * phix.get(&[i])
            - g_z_phix * phiy.get(&[i])
            + 2.0 * g_x_phiy * phiz.get(&[i]);
        a1 * first + a2 * second
    }))
}

/// Space-form oracle bound to a catalogue model: the constant must match the
/// model's φ-sectional curvature and the requested `n` must match its chart.
pub fn space_form_oracle(
    c: f64,
    n: usize,
    model: &Model,
    p: &[f64],
    x: &TensorValue,
    y: &TensorValue,
    z: &TensorValue,
) -> Result<TensorValue> {
    let expected = model.spec.kind.phi_sectional_constant().ok_or_else(|| {
        GeoError::InvalidParameter("space-form oracle needs an undeformed catalogue model".into())
    })?;
    if (expected - c).abs() > 1e-12 {
        return Err(GeoError::InvalidParameter(format!(
            "model `{}` has φ-sectional curvature {expected}, not {c}",
            model.spec.name
        )));
    }
    if model.spec.n != n {
        return Err(GeoError::InvalidParameter(format!(
            "model `{}` was built with n = {}, not {n}",
            model.spec.name, model.spec.n
        )));
    }
    space_form_curvature(c, &model.structure, p, x, y, z)
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

/// Look up a model by registry name: `r2n1`, `sphere`, or
/// `<base>-deformed:a=<val>` for the D-homothetic deformation of either.
pub fn model_by_name(name: &str, n: usize) -> Result<Model> {
    if n < 1 {
        return Err(GeoError::InvalidParameter("n must be at least 1".into()));
    }
    if let Some((base, rest)) = name.split_once("-deformed:a=") {
        let a: f64 = rest
            .parse()
            .map_err(|_| GeoError::UnknownModel(name.to_string()))?;
        let base_model = model_by_name(base, n)?;
        let structure = crate::contact::d_homothetic_deform(&base_model.structure, a)?;
        return Ok(Model {
            spec: ModelSpec {
                name: name.to_string(),
                n,
                kind: ModelKind::DHomothetic {
                    base: Box::new(base_model.spec.kind),
                    a,
                },
            },
            structure,
        });
    }
    match name {
        "r2n1" => Ok(Model {
            spec: ModelSpec {
                name: name.to_string(),
                n,
                kind: ModelKind::StandardR2n1,
            },
            structure: standard_sasakian(n),
        }),
        "sphere" => Ok(Model {
            spec: ModelSpec {
                name: name.to_string(),
                n,
                kind: ModelKind::UnitSphere,
            },
            structure: unit_sphere(n),
        }),
        _ => Err(GeoError::UnknownModel(name.to_string())),
    }
}
