//! Differentiation engine over coordinate charts.
//!
//! Everything is evaluated pointwise from the chart metric: Christoffel
//! symbols, Riemann/Ricci/scalar curvature, covariant and Lie derivatives of
//! arbitrary tensor fields, the exterior derivative of 1-forms, and the
//! curvature derivation acting on bilinear forms.
//!
//! Sign conventions, locked by tests on the constant-curvature sphere:
//!
//! ```text
//! R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z
//! R(X,Y,Z,W) = g(R(X,Y)Z, W)
//! Ric(Y,Z) = trace(X ↦ R(X,Y)Z)          (unit sphere: Ric = 2n·g)
//! dω(X,Y) = ½(X ω(Y) − Y ω(X) − ω([X,Y]))
//! ```
//!
//! Component layouts: `christoffel` is (1,2) as `[a; j, k] = Γ^a_{jk}`;
//! `riemann` is (1,3) as `[a; b, c, d]` = the ∂_a component of R(∂_b, ∂_c)∂_d;
//! covariant derivatives prepend the derivative index to the covariant block.
//!
//! Metric derivatives come from the chart's exact jet callback when present,
//! otherwise from central finite differences. Derivatives of non-metric
//! fields are always central differences of the field evaluator.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::jet::Jet;
use crate::tensor::{raise_lower, MetricAtPoint, RaiseLower, TensorValue};

/// Axis-aligned chart domain.
#[derive(Debug, Clone)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        DomainBox { lo, hi }
    }

    pub fn centered(dim: usize, radius: f64) -> Self {
        DomainBox {
            lo: vec![-radius; dim],
            hi: vec![radius; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self, i: usize) -> f64 {
        self.lo[i]
    }

    pub fn hi(&self, i: usize) -> f64 {
        self.hi[i]
    }

    pub fn contains_with_margin(&self, p: &[f64], margin: f64) -> bool {
        p.len() == self.dim()
            && p.iter()
                .enumerate()
                .all(|(i, &x)| x >= self.lo[i] + margin && x <= self.hi[i] - margin)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(self.hi.iter())
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }
}

/// Finite-difference step sizes in chart units.
///
/// `richardson` enables Richardson extrapolation on the outer `h3` stencils
/// used for derivatives of curvature-valued fields.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeConfig {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub richardson: bool,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        DerivativeConfig {
            h1: 1e-6,
            h2: 1e-4,
            h3: 5e-4,
            richardson: true,
        }
    }
}

pub type FieldFn = Arc<dyn Fn(&[f64]) -> TensorValue + Send + Sync>;
pub type JetFieldFn = Arc<dyn Fn(&[f64]) -> Vec<Jet> + Send + Sync>;

/// A tensor field given by a pointwise evaluator.
#[derive(Clone)]
pub struct TensorField {
    con: usize,
    cov: usize,
    eval: FieldFn,
}

impl TensorField {
    pub fn new(
        con: usize,
        cov: usize,
        eval: impl Fn(&[f64]) -> TensorValue + Send + Sync + 'static,
    ) -> Self {
        TensorField { con, cov, eval: Arc::new(eval) }
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.con, self.cov)
    }

    pub fn eval(&self, p: &[f64]) -> TensorValue {
        (self.eval)(p)
    }
}

impl std::fmt::Debug for TensorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TensorField({},{})", self.con, self.cov)
    }
}

/// A coordinate chart of an odd-dimensional manifold with its metric.
#[derive(Clone)]
pub struct ChartManifold {
    n: usize,
    domain: DomainBox,
    metric: FieldFn,
    metric_jets: Option<JetFieldFn>,
}

impl ChartManifold {
    pub fn new(
        n: usize,
        domain: DomainBox,
        metric: impl Fn(&[f64]) -> TensorValue + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(domain.dim(), 2 * n + 1);
        ChartManifold {
            n,
            domain,
            metric: Arc::new(metric),
            metric_jets: None,
        }
    }

    pub fn with_metric_jets(
        mut self,
        jets: impl Fn(&[f64]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        self.metric_jets = Some(Arc::new(jets));
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn has_exact_derivatives(&self) -> bool {
        self.metric_jets.is_some()
    }

    pub fn metric_jets(&self) -> Option<&JetFieldFn> {
        self.metric_jets.as_ref()
    }

    /// Drop the exact derivative callback (pure finite-difference mode).
    pub fn without_jets(mut self) -> Self {
        self.metric_jets = None;
        self
    }

    pub fn metric_value(&self, p: &[f64]) -> TensorValue {
        (self.metric)(p)
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<MetricAtPoint> {
        MetricAtPoint::new(self.metric_value(p))
    }

    pub fn metric_field(&self) -> TensorField {
        let m = self.metric.clone();
        TensorField { con: 0, cov: 2, eval: m }
    }

    fn require_margin(&self, p: &[f64], margin: f64) -> Result<()> {
        if self.domain.contains_with_margin(p, margin) {
            Ok(())
        } else {
            Err(GeoError::StencilMargin { margin })
        }
    }
}

impl std::fmt::Debug for ChartManifold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ChartManifold(n={}, exact_derivatives={})",
            self.n,
            self.has_exact_derivatives()
        )
    }
}

/// Metric with first and second coordinate derivatives at a point.
pub struct MetricDerivs {
    pub dim: usize,
    /// g_{ij}, row-major.
    pub g: Vec<f64>,
    /// g^{ij}, row-major.
    pub ginv: Vec<f64>,
    /// dg[(k*dim + i)*dim + j] = ∂_k g_{ij}
    pub dg: Vec<f64>,
    /// d2g[((k*dim + l)*dim + i)*dim + j] = ∂_k ∂_l g_{ij}
    pub d2g: Vec<f64>,
}

impl MetricDerivs {
    #[inline]
    pub fn g_at(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.dim + j]
    }
    #[inline]
    pub fn ginv_at(&self, i: usize, j: usize) -> f64 {
        self.ginv[i * self.dim + j]
    }
    #[inline]
    pub fn dg_at(&self, k: usize, i: usize, j: usize) -> f64 {
        self.dg[(k * self.dim + i) * self.dim + j]
    }
    #[inline]
    pub fn d2g_at(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.d2g[((k * self.dim + l) * self.dim + i) * self.dim + j]
    }
}

/// Metric plus derivatives, from jets when available, otherwise central
/// differences (first order at `h1`, second order at `h2`).
pub fn metric_derivs(m: &ChartManifold, p: &[f64], cfg: &DerivativeConfig) -> Result<MetricDerivs> {
    let dim = m.dim();
    if let Some(jets) = &m.metric_jets {
        let cells = jets(p);
        if cells.len() != dim * dim {
            return Err(GeoError::ShapeMismatch("metric jet callback size".into()));
        }
        let mut g = vec![0.0; dim * dim];
        let mut dg = vec![0.0; dim * dim * dim];
        let mut d2g = vec![0.0; dim * dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let cell = &cells[i * dim + j];
                g[i * dim + j] = cell.v;
                for k in 0..dim {
                    dg[(k * dim + i) * dim + j] = cell.d1[k];
                    for l in 0..dim {
                        d2g[((k * dim + l) * dim + i) * dim + j] = cell.d2_at(k, l);
                    }
                }
            }
        }
        let ginv = invert_spd(dim, &g)?;
        return Ok(MetricDerivs { dim, g, ginv, dg, d2g });
    }
    m.require_margin(p, 2.0 * cfg.h2)?;
    let g_t = m.metric_value(p);
    let g = g_t.components().to_vec();
    let ginv = invert_spd(dim, &g)?;
    let mut dg = vec![0.0; dim * dim * dim];
    let h1 = cfg.h1;
    for k in 0..dim {
        let gp = shifted_metric(m, p, &[(k, h1)]);
        let gm = shifted_metric(m, p, &[(k, -h1)]);
        for ij in 0..dim * dim {
            dg[k * dim * dim + ij] = (gp[ij] - gm[ij]) / (2.0 * h1);
        }
    }
    let h2 = cfg.h2;
    let mut d2g = vec![0.0; dim * dim * dim * dim];
    for k in 0..dim {
        // Diagonal second derivative.
        let gp = shifted_metric(m, p, &[(k, h2)]);
        let gm = shifted_metric(m, p, &[(k, -h2)]);
        for ij in 0..dim * dim {
            d2g[(k * dim + k) * dim * dim + ij] = (gp[ij] - 2.0 * g[ij] + gm[ij]) / (h2 * h2);
        }
        for l in (k + 1)..dim {
            let gpp = shifted_metric(m, p, &[(k, h2), (l, h2)]);
            let gpm = shifted_metric(m, p, &[(k, h2), (l, -h2)]);
            let gmp = shifted_metric(m, p, &[(k, -h2), (l, h2)]);
            let gmm = shifted_metric(m, p, &[(k, -h2), (l, -h2)]);
            for ij in 0..dim * dim {
                let v = (gpp[ij] - gpm[ij] - gmp[ij] + gmm[ij]) / (4.0 * h2 * h2);
                d2g[(k * dim + l) * dim * dim + ij] = v;
                d2g[(l * dim + k) * dim * dim + ij] = v;
            }
        }
    }
    Ok(MetricDerivs { dim, g, ginv, dg, d2g })
}

/// Third coordinate derivatives of the metric, ∂_k ∂_l ∂_m g_{ij}, from the
/// jet callback or by differencing the second-derivative stencil at `h3`.
/// Exposed for validating exact callbacks against finite differences.
pub fn metric_d3(
    m: &ChartManifold,
    p: &[f64],
    cfg: &DerivativeConfig,
) -> Result<Vec<f64>> {
    let dim = m.dim();
    if let Some(jets) = &m.metric_jets {
        let cells = jets(p);
        let mut d3 = vec![0.0; dim * dim * dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let cell = &cells[i * dim + j];
                for k in 0..dim {
                    for l in 0..dim {
                        for q in 0..dim {
                            d3[(((k * dim + l) * dim + q) * dim + i) * dim + j] =
                                cell.d3_at(k, l, q);
                        }
                    }
                }
            }
        }
        return Ok(d3);
    }
    m.require_margin(p, cfg.h3 + 2.0 * cfg.h2)?;
    let probe = |q: &[f64]| -> Result<Vec<f64>> {
        Ok(metric_derivs(m, q, cfg)?.d2g)
    };
    let mut d3 = vec![0.0; dim * dim * dim * dim * dim];
    let block = dim * dim * dim * dim;
    for q in 0..dim {
        let step = |h: f64| -> Result<Vec<f64>> {
            let mut a = p.to_vec();
            a[q] += h;
            let mut b = p.to_vec();
            b[q] -= h;
            let (da, db) = (probe(&a)?, probe(&b)?);
            Ok(da
                .iter()
                .zip(db.iter())
                .map(|(x, y)| (x - y) / (2.0 * h))
                .collect())
        };
        let col = if cfg.richardson {
            let d_h = step(cfg.h3)?;
            let d_h2 = step(cfg.h3 / 2.0)?;
            d_h2
                .iter()
                .zip(d_h.iter())
                .map(|(a, b)| (4.0 * a - b) / 3.0)
                .collect::<Vec<f64>>()
        } else {
            step(cfg.h3)?
        };
        // col holds ∂_q ∂_k ∂_l g_{ij}; scatter into the q-major layout.
        for kl_ij in 0..block {
            let k = kl_ij / (dim * dim * dim);
            let rest = kl_ij % (dim * dim * dim);
            d3[((q * dim + k) * dim * dim * dim) + rest] = col[kl_ij];
        }
    }
    Ok(d3)
}

fn shifted_metric(m: &ChartManifold, p: &[f64], shifts: &[(usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(k, h) in shifts {
        q[k] += h;
    }
    m.metric_value(&q).components().to_vec()
}

fn invert_spd(dim: usize, g: &[f64]) -> Result<Vec<f64>> {
    let gt = TensorValue::from_components(dim, 0, 2, g.to_vec())?;
    let mp = MetricAtPoint::new(gt)?;
    Ok(mp.ginv().components().to_vec())
}

/// Christoffel symbols Γ^a_{jk} of the Levi-Civita connection.
pub fn christoffel(m: &ChartManifold, p: &[f64], cfg: &DerivativeConfig) -> Result<TensorValue> {
    let md = metric_derivs(m, p, cfg)?;
    Ok(christoffel_from(&md))
}

/// Christoffel symbols together with their coordinate derivatives
/// ∂_m Γ^a_{jk}, flattened `[m][a][j][k]`.
pub fn christoffel_with_derivative(
    m: &ChartManifold,
    p: &[f64],
    cfg: &DerivativeConfig,
) -> Result<(TensorValue, Vec<f64>)> {
    let md = metric_derivs(m, p, cfg)?;
    Ok((christoffel_from(&md), christoffel_d1_from(&md)))
}

fn christoffel_from(md: &MetricDerivs) -> TensorValue {
    let dim = md.dim;
    TensorValue::from_fn(dim, 1, 2, |ix| {
        let (a, j, k) = (ix[0], ix[1], ix[2]);
        let mut s = 0.0;
        for l in 0..dim {
            s += md.ginv_at(a, l)
                * (md.dg_at(j, l, k) + md.dg_at(k, l, j) - md.dg_at(l, j, k));
        }
        0.5 * s
    })
}

/// ∂_m Γ^a_{jk}, assembled from first and second metric derivatives.
/// Layout: `[m][a][j][k]` flattened.
fn christoffel_d1_from(md: &MetricDerivs) -> Vec<f64> {
    let dim = md.dim;
    // ∂_m g^{al} = −g^{ab} (∂_m g_{bc}) g^{cl}
    let mut dginv = vec![0.0; dim * dim * dim];
    for m_ix in 0..dim {
        for a in 0..dim {
            for l in 0..dim {
                let mut s = 0.0;
                for b in 0..dim {
                    for c in 0..dim {
                        s += md.ginv_at(a, b) * md.dg_at(m_ix, b, c) * md.ginv_at(c, l);
                    }
                }
                dginv[(m_ix * dim + a) * dim + l] = -s;
            }
        }
    }
    let mut out = vec![0.0; dim * dim * dim * dim];
    for m_ix in 0..dim {
        for a in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let mut s = 0.0;
                    for l in 0..dim {
                        let sym =
                            md.dg_at(j, l, k) + md.dg_at(k, l, j) - md.dg_at(l, j, k);
                        let dsym = md.d2g_at(m_ix, j, l, k) + md.d2g_at(m_ix, k, l, j)
                            - md.d2g_at(m_ix, l, j, k);
                        s += dginv[(m_ix * dim + a) * dim + l] * sym
                            + md.ginv_at(a, l) * dsym;
                    }
                    out[((m_ix * dim + a) * dim + j) * dim + k] = 0.5 * s;
                }
            }
        }
    }
    out
}

/// Riemann curvature, (1,3), `[a; b, c, d]` = ∂_a component of R(∂_b,∂_c)∂_d.
pub fn riemann(m: &ChartManifold, p: &[f64], cfg: &DerivativeConfig) -> Result<TensorValue> {
    let md = metric_derivs(m, p, cfg)?;
    let gamma = christoffel_from(&md);
    let dgamma = christoffel_d1_from(&md);
    let dim = md.dim;
    let dg_at = |m_ix: usize, a: usize, j: usize, k: usize| {
        dgamma[((m_ix * dim + a) * dim + j) * dim + k]
    };
    Ok(TensorValue::from_fn(dim, 1, 3, |ix| {
        let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
        let mut s = dg_at(b, a, c, d) - dg_at(c, a, b, d);
        for e in 0..dim {
            s += gamma.get(&[a, b, e]) * gamma.get(&[e, c, d])
                - gamma.get(&[a, c, e]) * gamma.get(&[e, b, d]);
        }
        s
    }))
}

/// Riemann in fully covariant form, `[b, c, d, w]` = g(R(∂_b,∂_c)∂_d, ∂_w).
pub fn riemann_covariant(
    m: &ChartManifold,
    p: &[f64],
    cfg: &DerivativeConfig,
) -> Result<TensorValue> {
    let r = riemann(m, p, cfg)?;
    let metric = m.metric_at(p)?;
    raise_lower(&r, 0, &metric, RaiseLower::Down)
}

/// Ricci tensor Ric(Y,Z) = trace(X ↦ R(X,Y)Z).
pub fn ricci(m: &ChartManifold, p: &[f64], cfg: &DerivativeConfig) -> Result<TensorValue> {
    riemann(m, p, cfg)?.contract(0, 0)
}

/// Ricci operator Q, the metric raise of Ric.
pub fn ricci_operator(m: &ChartManifold, p: &[f64], cfg: &DerivativeConfig) -> Result<TensorValue> {
    let ric = ricci(m, p, cfg)?;
    let metric = m.metric_at(p)?;
    raise_lower(&ric, 0, &metric, RaiseLower::Up)
}

/// Scalar curvature r = trace Q.
pub fn scalar_curvature(m: &ChartManifold, p: &[f64], cfg: &DerivativeConfig) -> Result<f64> {
    Ok(ricci_operator(m, p, cfg)?.contract(0, 0)?.as_scalar())
}

/// Coordinate partial derivatives of a tensor field by central differences:
/// `[k] -> ∂_k T`, flattened with k outermost.
fn field_partials(
    field: &TensorField,
    p: &[f64],
    h: f64,
    richardson: bool,
) -> Vec<TensorValue> {
    let dim = p.len();
    let central = |k: usize, h: f64| -> TensorValue {
        let mut a = p.to_vec();
        a[k] += h;
        let mut b = p.to_vec();
        b[k] -= h;
        let (ta, tb) = (field.eval(&a), field.eval(&b));
        ta.sub(&tb).expect("field valence stable").scale(1.0 / (2.0 * h))
    };
    (0..dim)
        .map(|k| {
            if richardson {
                let d_h = central(k, h);
                let d_h2 = central(k, h / 2.0);
                d_h2.scale(4.0 / 3.0).sub(&d_h.scale(1.0 / 3.0)).unwrap()
            } else {
                central(k, h)
            }
        })
        .collect()
}

/// Covariant derivative of a tensor field at `p`, using the field's own
/// partials (step `h`) and the chart connection. The derivative index is the
/// first covariant slot of the result.
pub fn covariant_derivative_h(
    m: &ChartManifold,
    field: &TensorField,
    p: &[f64],
    cfg: &DerivativeConfig,
    h: f64,
    richardson: bool,
) -> Result<TensorValue> {
    m.require_margin(p, h + 2.0 * cfg.h2)?;
    let (con, cov) = field.valence();
    let dim = m.dim();
    let gamma = christoffel(m, p, cfg)?;
    let partials = field_partials(field, p, h, richardson);
    let t = field.eval(p);
    let mut full = vec![0usize; con + cov];
    Ok(TensorValue::from_fn(dim, con, cov + 1, |ix| {
        // ix layout: [contra..., k, cov...]
        let k = ix[con];
        let outer: Vec<usize> = ix[..con]
            .iter()
            .chain(ix[con + 1..].iter())
            .copied()
            .collect();
        let mut s = partials[k].get(&outer);
        // + Γ^a_{k e} T^{...e...} over contravariant slots
        for slot in 0..con {
            let a = outer[slot];
            for e in 0..dim {
                full.copy_from_slice(&outer);
                full[slot] = e;
                s += gamma.get(&[a, k, e]) * t.get(&full);
            }
        }
        // − Γ^e_{k b} T_{...e...} over covariant slots
        for slot in con..con + cov {
            let b = outer[slot];
            for e in 0..dim {
                full.copy_from_slice(&outer);
                full[slot] = e;
                s -= gamma.get(&[e, k, b]) * t.get(&full);
            }
        }
        s
    }))
}

/// Covariant derivative with the default first-order step.
pub fn covariant_derivative(
    m: &ChartManifold,
    field: &TensorField,
    p: &[f64],
    cfg: &DerivativeConfig,
) -> Result<TensorValue> {
    covariant_derivative_h(m, field, p, cfg, cfg.h1, false)
}

/// Covariant derivative of a curvature-valued field: wider stencil (`h3`)
/// with optional Richardson extrapolation, as those fields are themselves
/// assembled from second metric derivatives.
pub fn covariant_derivative_curvature(
    m: &ChartManifold,
    field: &TensorField,
    p: &[f64],
    cfg: &DerivativeConfig,
) -> Result<TensorValue> {
    covariant_derivative_h(m, field, p, cfg, cfg.h3, cfg.richardson)
}

/// Second coordinate partials of a tensor field, `[x*dim + y] -> ∂_x ∂_y T`,
/// by the standard central second-difference stencils at step `h`.
fn field_second_partials(field: &TensorField, p: &[f64], h: f64) -> Vec<TensorValue> {
    let dim = p.len();
    let at = |shifts: &[(usize, f64)]| -> TensorValue {
        let mut q = p.to_vec();
        for &(k, dh) in shifts {
            q[k] += dh;
        }
        field.eval(&q)
    };
    let t0 = field.eval(p);
    let mut out: Vec<Option<TensorValue>> = vec![None; dim * dim];
    for x in 0..dim {
        let d = at(&[(x, h)])
            .add(&at(&[(x, -h)]))
            .and_then(|s| s.sub(&t0.scale(2.0)))
            .map(|s| s.scale(1.0 / (h * h)))
            .expect("field valence stable");
        out[x * dim + x] = Some(d);
        for y in (x + 1)..dim {
            let d = at(&[(x, h), (y, h)])
                .sub(&at(&[(x, h), (y, -h)]))
                .and_then(|s| s.sub(&at(&[(x, -h), (y, h)])))
                .and_then(|s| s.add(&at(&[(x, -h), (y, -h)])))
                .map(|s| s.scale(1.0 / (4.0 * h * h)))
                .expect("field valence stable");
            out[x * dim + y] = Some(d.clone());
            out[y * dim + x] = Some(d);
        }
    }
    out.into_iter().map(|t| t.unwrap()).collect()
}

/// Second covariant derivative of a vector field,
/// `(∇²V)(X,Y) = ∇_X ∇_Y V − ∇_{∇_X Y} V`, layout (1,2) `[a; x, y]`.
/// Assembled from direct second-difference partials of V and exact (or
/// finite-difference) connection derivatives, avoiding nested one-sided
/// stencils and their noise amplification.
pub fn second_covariant_derivative(
    m: &ChartManifold,
    v: &TensorField,
    p: &[f64],
    cfg: &DerivativeConfig,
) -> Result<TensorValue> {
    m.require_margin(p, 2.0 * cfg.h2)?;
    let dim = m.dim();
    let (gamma, dgamma) = christoffel_with_derivative(m, p, cfg)?;
    let dg_at =
        |mm: usize, a: usize, j: usize, k: usize| dgamma[((mm * dim + a) * dim + j) * dim + k];
    let vv = v.eval(p);
    let dv = field_partials(v, p, cfg.h1, false);
    let d2v = field_second_partials(v, p, cfg.h2);
    Ok(TensorValue::from_fn(dim, 1, 2, |ix| {
        let (a, x, y) = (ix[0], ix[1], ix[2]);
        let mut s = d2v[x * dim + y].get(&[a]);
        for c in 0..dim {
            s += dg_at(x, a, y, c) * vv.get(&[c]);
            s += gamma.get(&[a, y, c]) * dv[x].get(&[c]);
            s += gamma.get(&[a, x, c]) * dv[y].get(&[c]);
            s -= gamma.get(&[c, x, y]) * dv[c].get(&[a]);
            for d in 0..dim {
                s += gamma.get(&[a, x, c]) * gamma.get(&[c, y, d]) * vv.get(&[d]);
                s -= gamma.get(&[c, x, y]) * gamma.get(&[a, c, d]) * vv.get(&[d]);
            }
        }
        s
    }))
}

/// Lie derivative of a tensor field along a flow, by the coordinate formula
/// `L_V T = V^k ∂_k T − (∂ V)·T  (contravariant) + (∂ V)·T (covariant)`.
pub fn lie_derivative(
    m: &ChartManifold,
    flow: &TensorField,
    field: &TensorField,
    p: &[f64],
    cfg: &DerivativeConfig,
) -> Result<TensorValue> {
    lie_derivative_with_field_h(m, flow, field, p, cfg, cfg.h1, false)
}

/// Lie derivative with a caller-chosen step for the field's partials.
/// Curvature-valued fields are differentiated at the wider `h3` step.
pub fn lie_derivative_with_field_h(
    m: &ChartManifold,
    flow: &TensorField,
    field: &TensorField,
    p: &[f64],
    cfg: &DerivativeConfig,
    h_field: f64,
    richardson: bool,
) -> Result<TensorValue> {
    m.require_margin(p, 2.0 * h_field.max(cfg.h1))?;
    let (con, cov) = field.valence();
    let dim = m.dim();
    let t = field.eval(p);
    let v = flow.eval(p);
    let dt = field_partials(field, p, h_field, richardson);
    let dv = field_partials(flow, p, cfg.h1, false);
    let mut full = vec![0usize; con + cov];
    Ok(TensorValue::from_fn(dim, con, cov, |ix| {
        let mut s = 0.0;
        for k in 0..dim {
            s += v.get(&[k]) * dt[k].get(ix);
        }
        for slot in 0..con {
            let a = ix[slot];
            for e in 0..dim {
                full.copy_from_slice(ix);
                full[slot] = e;
                s -= dv[e].get(&[a]) * t.get(&full);
            }
        }
        for slot in con..con + cov {
            let b = ix[slot];
            for e in 0..dim {
                full.copy_from_slice(ix);
                full[slot] = e;
                s += dv[b].get(&[e]) * t.get(&full);
            }
        }
        s
    }))
}

/// Lie derivative by first-order flow transport: pull the field back along
/// `p ± t·V(p)` with Jacobian `I ± t ∂V` and difference centrally in `t`.
/// Independent discretization used to cross-check [`lie_derivative`].
pub fn lie_derivative_flow(
    m: &ChartManifold,
    flow: &TensorField,
    field: &TensorField,
    p: &[f64],
    cfg: &DerivativeConfig,
    t: f64,
) -> Result<TensorValue> {
    m.require_margin(p, 2.0 * (t + cfg.h1))?;
    let dim = m.dim();
    let v = flow.eval(p);
    let dv = field_partials(flow, p, cfg.h1, false);
    let pullback = |t: f64| -> Result<TensorValue> {
        let q: Vec<f64> = (0..dim).map(|i| p[i] + t * v.get(&[i])).collect();
        // Jacobian J^a_b = δ + t ∂_b V^a and its inverse.
        let mut jac = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                jac[a * dim + b] = if a == b { 1.0 } else { 0.0 } + t * dv[b].get(&[a]);
            }
        }
        let jinv = invert_general(dim, &jac)?;
        let tq = field.eval(&q);
        let (con, cov) = field.valence();
        let mut full = vec![0usize; con + cov];
        Ok(TensorValue::from_fn(dim, con, cov, |ix| {
            // Contract every slot: contravariant with J⁻¹, covariant with J.
            transform_slots(&tq, ix, con, &mut full, &jinv, &jac, dim, 0)
        }))
    };
    let fwd = pullback(t)?;
    let bwd = pullback(-t)?;
    Ok(fwd.sub(&bwd)?.scale(1.0 / (2.0 * t)))
}

#[allow(clippy::too_many_arguments)]
fn transform_slots(
    t: &TensorValue,
    out_ix: &[usize],
    con: usize,
    full: &mut Vec<usize>,
    jinv: &[f64],
    jac: &[f64],
    dim: usize,
    slot: usize,
) -> f64 {
    if slot == out_ix.len() {
        return t.get(full);
    }
    let mut s = 0.0;
    for e in 0..dim {
        let w = if slot < con {
            jinv[out_ix[slot] * dim + e]
        } else {
            jac[e * dim + out_ix[slot]]
        };
        if w == 0.0 {
            continue;
        }
        full[slot] = e;
        s += w * transform_slots(t, out_ix, con, full, jinv, jac, dim, slot + 1);
    }
    s
}

fn invert_general(dim: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; dim * dim];
    for i in 0..dim {
        inv[i * dim + i] = 1.0;
    }
    for col in 0..dim {
        let mut pivot = col;
        for r in (col + 1)..dim {
            if m[r * dim + col].abs() > m[pivot * dim + col].abs() {
                pivot = r;
            }
        }
        if m[pivot * dim + col].abs() < 1e-14 {
            return Err(GeoError::DegenerateInput("singular Jacobian".into()));
        }
        if pivot != col {
            for c in 0..dim {
                m.swap(col * dim + c, pivot * dim + c);
                inv.swap(col * dim + c, pivot * dim + c);
            }
        }
        let d = m[col * dim + col];
        for c in 0..dim {
            m[col * dim + c] /= d;
            inv[col * dim + c] /= d;
        }
        for r in 0..dim {
            if r == col {
                continue;
            }
            let f = m[r * dim + col];
            if f == 0.0 {
                continue;
            }
            for c in 0..dim {
                m[r * dim + c] -= f * m[col * dim + c];
                inv[r * dim + c] -= f * inv[col * dim + c];
            }
        }
    }
    Ok(inv)
}

/// Exterior derivative of a 1-form, with the ½ normalization:
/// `dω(X,Y) = ½(∂_X ω(Y) − ∂_Y ω(X))` in coordinates.
pub fn exterior_derivative_1form(
    m: &ChartManifold,
    omega: &TensorField,
    p: &[f64],
    cfg: &DerivativeConfig,
) -> Result<TensorValue> {
    if omega.valence() != (0, 1) {
        return Err(GeoError::ShapeMismatch("exterior derivative needs a 1-form".into()));
    }
    m.require_margin(p, 2.0 * cfg.h1)?;
    let dim = m.dim();
    let d = field_partials(omega, p, cfg.h1, false);
    Ok(TensorValue::from_fn(dim, 0, 2, |ix| {
        0.5 * (d[ix[0]].get(&[ix[1]]) - d[ix[1]].get(&[ix[0]]))
    }))
}

/// Curvature acting as a derivation on a bilinear form:
/// `(R(X,Y)·T)(Z,W) = −T(R(X,Y)Z, W) − T(Z, R(X,Y)W)`.
pub fn curvature_action(
    m: &ChartManifold,
    p: &[f64],
    x: &TensorValue,
    y: &TensorValue,
    t: &TensorValue,
    cfg: &DerivativeConfig,
) -> Result<TensorValue> {
    curvature_action_with(&riemann(m, p, cfg)?, x, y, t)
}

/// Same derivation with a caller-supplied curvature value.
pub fn curvature_action_with(
    riem: &TensorValue,
    x: &TensorValue,
    y: &TensorValue,
    t: &TensorValue,
) -> Result<TensorValue> {
    if t.valence() != (0, 2) {
        return Err(GeoError::ShapeMismatch("curvature action needs a (0,2) tensor".into()));
    }
    let dim = t.dim();
    // rxy[c][z] = components of R(X,Y)∂_z
    let mut rxy = vec![0.0; dim * dim];
    for c in 0..dim {
        for z in 0..dim {
            let mut s = 0.0;
            for b in 0..dim {
                for cc in 0..dim {
                    s += riem.get(&[c, b, cc, z]) * x.get(&[b]) * y.get(&[cc]);
                }
            }
            rxy[c * dim + z] = s;
        }
    }
    Ok(TensorValue::from_fn(dim, 0, 2, |ix| {
        let (z, w) = (ix[0], ix[1]);
        let mut s = 0.0;
        for c in 0..dim {
            s -= t.get(&[c, w]) * rxy[c * dim + z];
            s -= t.get(&[z, c]) * rxy[c * dim + w];
        }
        s
    }))
}
