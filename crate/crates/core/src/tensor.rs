//! Pointwise multilinear algebra: dense tensor components, contraction,
//! index raising/lowering, and orthonormal frames.
//!
//! Dimensions are small (3, 5, 7), so components are stored densely in
//! row-major order with contravariant slots first, covariant slots after.

use crate::error::{GeoError, Result};

/// Components of a type-(con, cov) tensor at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    dim: usize,
    con: usize,
    cov: usize,
    components: Vec<f64>,
}

impl TensorValue {
    pub fn zeros(dim: usize, con: usize, cov: usize) -> Self {
        TensorValue {
            dim,
            con,
            cov,
            components: vec![0.0; dim.pow((con + cov) as u32)],
        }
    }

    pub fn from_components(dim: usize, con: usize, cov: usize, components: Vec<f64>) -> Result<Self> {
        if components.len() != dim.pow((con + cov) as u32) {
            return Err(GeoError::ShapeMismatch(format!(
                "expected {} components for valence ({con},{cov}) in dim {dim}, got {}",
                dim.pow((con + cov) as u32),
                components.len()
            )));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(GeoError::ShapeMismatch(
                "non-finite tensor component".into(),
            ));
        }
        Ok(TensorValue { dim, con, cov, components })
    }

    /// Build by evaluating `f` on every multi-index.
    pub fn from_fn(dim: usize, con: usize, cov: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let rank = con + cov;
        let mut t = TensorValue::zeros(dim, con, cov);
        let mut idx = vec![0usize; rank];
        for flat in 0..t.components.len() {
            t.components[flat] = f(&idx);
            for pos in (0..rank).rev() {
                idx[pos] += 1;
                if idx[pos] < dim {
                    break;
                }
                idx[pos] = 0;
            }
        }
        t
    }

    pub fn scalar(dim: usize, v: f64) -> Self {
        TensorValue { dim, con: 0, cov: 0, components: vec![v] }
    }

    pub fn identity(dim: usize) -> Self {
        TensorValue::from_fn(dim, 1, 1, |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.con, self.cov)
    }

    pub fn rank(&self) -> usize {
        self.con + self.cov
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [f64] {
        &mut self.components
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut f = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            f = f * self.dim + i;
        }
        f
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.components[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let f = self.flat(idx);
        self.components[f] = v;
    }

    pub fn as_scalar(&self) -> f64 {
        debug_assert_eq!(self.rank(), 0);
        self.components[0]
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.components {
            *v *= c;
        }
        out
    }

    pub fn add(&self, other: &TensorValue) -> Result<TensorValue> {
        if self.dim != other.dim || self.con != other.con || self.cov != other.cov {
            return Err(GeoError::ShapeMismatch("tensor addition".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.components.iter_mut().zip(other.components.iter()) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorValue) -> Result<TensorValue> {
        self.add(&other.scale(-1.0))
    }

    /// Largest absolute coordinate component. Prefer the frame norm from
    /// [`frame_components`] when a scale-invariant measure is needed.
    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Contract contravariant slot `upper` (index within the contravariant
    /// block) against covariant slot `lower` (index within the covariant
    /// block). Pairing a slot with one of matching variance is rejected by
    /// construction: the blocks are addressed separately.
    pub fn contract(&self, upper: usize, lower: usize) -> Result<TensorValue> {
        if upper >= self.con {
            return Err(GeoError::InvalidSlot(format!(
                "contravariant slot {upper} out of range (valence ({},{}))",
                self.con, self.cov
            )));
        }
        if lower >= self.cov {
            return Err(GeoError::InvalidSlot(format!(
                "covariant slot {lower} out of range (valence ({},{}))",
                self.con, self.cov
            )));
        }
        let dim = self.dim;
        let rank = self.rank();
        let upper_abs = upper;
        let lower_abs = self.con + lower;
        let mut out = TensorValue::zeros(dim, self.con - 1, self.cov - 1);
        let out_rank = rank - 2;
        let mut out_idx = vec![0usize; out_rank];
        let mut full = vec![0usize; rank];
        for flat in 0..out.components.len() {
            // Scatter the output multi-index around the two contracted slots.
            let mut pos = 0;
            for (slot, f) in full.iter_mut().enumerate() {
                if slot == upper_abs || slot == lower_abs {
                    continue;
                }
                *f = out_idx[pos];
                pos += 1;
            }
            let mut sum = 0.0;
            for a in 0..dim {
                full[upper_abs] = a;
                full[lower_abs] = a;
                sum += self.get(&full);
            }
            out.components[flat] = sum;
            for p in (0..out_rank).rev() {
                out_idx[p] += 1;
                if out_idx[p] < dim {
                    break;
                }
                out_idx[p] = 0;
            }
        }
        Ok(out)
    }
}

/// Metric and its inverse at a point.
///
/// Positive definiteness is established by Cholesky factorization rather than
/// an eigenvalue solve, keeping the check deterministic.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    g: TensorValue,
    ginv: TensorValue,
}

impl MetricAtPoint {
    pub fn new(g: TensorValue) -> Result<Self> {
        let (con, cov) = g.valence();
        if (con, cov) != (0, 2) {
            return Err(GeoError::ShapeMismatch("metric must be (0,2)".into()));
        }
        if g.components().iter().any(|c| !c.is_finite()) {
            // Chart evaluated outside its domain (e.g. past a parametrization
            // singularity).
            return Err(GeoError::NotPositiveDefinite);
        }
        let dim = g.dim();
        for i in 0..dim {
            for j in 0..dim {
                if (g.get(&[i, j]) - g.get(&[j, i])).abs()
                    > 1e-12 * (1.0 + g.get(&[i, j]).abs())
                {
                    return Err(GeoError::ShapeMismatch("metric not symmetric".into()));
                }
            }
        }
        let chol = cholesky(dim, g.components())?;
        let inv = spd_inverse(dim, &chol);
        let ginv = TensorValue::from_components(dim, 2, 0, inv)?;
        Ok(MetricAtPoint { g, ginv })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn g(&self) -> &TensorValue {
        &self.g
    }

    pub fn ginv(&self) -> &TensorValue {
        &self.ginv
    }

    pub fn inner(&self, x: &TensorValue, y: &TensorValue) -> f64 {
        let dim = self.dim();
        let mut s = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                s += self.g.get(&[a, b]) * x.get(&[a]) * y.get(&[b]);
            }
        }
        s
    }

    pub fn norm(&self, x: &TensorValue) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }
}

/// Raise (`Up`) or lower (`Down`) a tensor slot with the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaiseLower {
    Up,
    Down,
}

/// Move a slot between variances. `slot` is an absolute position in the full
/// slot list (contravariant block first). A lowered slot is appended at the
/// end of the covariant block, a raised slot at the end of the contravariant
/// block, so lowering the output slot of a (1,3) curvature value yields the
/// (0,4) form with the metric-paired argument last.
pub fn raise_lower(
    t: &TensorValue,
    slot: usize,
    metric: &MetricAtPoint,
    dir: RaiseLower,
) -> Result<TensorValue> {
    let (con, cov) = t.valence();
    let rank = con + cov;
    if slot >= rank {
        return Err(GeoError::InvalidSlot(format!("slot {slot} out of range")));
    }
    let dim = t.dim();
    match dir {
        RaiseLower::Down => {
            if slot >= con {
                return Err(GeoError::InvalidSlot(
                    "lowering requires a contravariant slot".into(),
                ));
            }
            let g = metric.g();
            let mut out = TensorValue::zeros(dim, con - 1, cov + 1);
            let mut out_idx = vec![0usize; rank];
            let mut full = vec![0usize; rank];
            for flat in 0..out.components().len() {
                // Output order: contravariant slots except `slot`, original
                // covariant slots, then the newly lowered slot.
                let mut pos = 0;
                for (s, f) in full.iter_mut().enumerate() {
                    if s == slot {
                        continue;
                    }
                    *f = out_idx[pos];
                    pos += 1;
                }
                let new_ix = out_idx[rank - 1];
                let mut sum = 0.0;
                for a in 0..dim {
                    full[slot] = a;
                    sum += g.get(&[a, new_ix]) * t.get(&full);
                }
                out.components_mut()[flat] = sum;
                for p in (0..rank).rev() {
                    out_idx[p] += 1;
                    if out_idx[p] < dim {
                        break;
                    }
                    out_idx[p] = 0;
                }
            }
            Ok(out)
        }
        RaiseLower::Up => {
            if slot < con {
                return Err(GeoError::InvalidSlot(
                    "raising requires a covariant slot".into(),
                ));
            }
            let ginv = metric.ginv();
            let mut out = TensorValue::zeros(dim, con + 1, cov - 1);
            let mut out_idx = vec![0usize; rank];
            let mut full = vec![0usize; rank];
            for flat in 0..out.components().len() {
                // Output order: original contravariant slots, the raised slot,
                // then covariant slots except `slot`.
                let new_ix = out_idx[con];
                let mut pos = 0;
                for (s, f) in full.iter_mut().enumerate() {
                    if s == slot {
                        continue;
                    }
                    // Skip the inserted slot position in the output index list.
                    let out_pos = if pos >= con { pos + 1 } else { pos };
                    *f = out_idx[out_pos];
                    pos += 1;
                }
                let mut sum = 0.0;
                for a in 0..dim {
                    full[slot] = a;
                    sum += ginv.get(&[new_ix, a]) * t.get(&full);
                }
                out.components_mut()[flat] = sum;
                for p in (0..rank).rev() {
                    out_idx[p] += 1;
                    if out_idx[p] < dim {
                        break;
                    }
                    out_idx[p] = 0;
                }
            }
            Ok(out)
        }
    }
}

/// A g-orthonormal basis of the tangent space at a point.
#[derive(Debug, Clone)]
pub struct OrthonormalFrame {
    pub vectors: Vec<TensorValue>,
}

/// Gram–Schmidt with the metric inner product. Inputs must span: the run
/// fails if a residual collapses below tolerance before `dim` vectors are
/// produced, or if the input Gram determinant is degenerate.
pub fn gram_schmidt(vectors: &[TensorValue], metric: &MetricAtPoint) -> Result<OrthonormalFrame> {
    let dim = metric.dim();
    if vectors.len() < dim {
        return Err(GeoError::DegenerateInput(format!(
            "need at least {dim} vectors, got {}",
            vectors.len()
        )));
    }
    let mut frame: Vec<TensorValue> = Vec::with_capacity(dim);
    for v in vectors {
        if frame.len() == dim {
            break;
        }
        let mut w = v.clone();
        for e in &frame {
            let c = metric.inner(&w, e);
            w = w.sub(&e.scale(c))?;
        }
        let norm2 = metric.inner(&w, &w);
        if norm2 < 1e-10 {
            // Dependent on the span collected so far; skip. Callers that pin
            // the Reeb field first rely on this to drop the shadowed
            // coordinate direction.
            continue;
        }
        frame.push(w.scale(1.0 / norm2.sqrt()));
    }
    if frame.len() < dim {
        return Err(GeoError::DegenerateInput(
            "vectors do not span the tangent space".into(),
        ));
    }
    Ok(OrthonormalFrame { vectors: frame })
}

/// Orthonormal frame from the coordinate basis, optionally with a unit first
/// vector pinned (used to place the Reeb field first).
pub fn coordinate_frame(
    metric: &MetricAtPoint,
    pin_first: Option<&TensorValue>,
) -> Result<OrthonormalFrame> {
    let dim = metric.dim();
    let mut basis: Vec<TensorValue> = Vec::with_capacity(dim + 1);
    if let Some(v) = pin_first {
        basis.push(v.clone());
    }
    for i in 0..dim {
        basis.push(TensorValue::from_fn(dim, 1, 0, |ix| {
            if ix[0] == i {
                1.0
            } else {
                0.0
            }
        }));
    }
    gram_schmidt(&basis, metric)
}

/// Components of a tensor in an orthonormal frame: covariant slots are fed
/// frame vectors, contravariant slots are paired with the lowered frame
/// (coframe). The max-abs of the result is the scale-invariant residual norm
/// used throughout the verification suites.
pub fn frame_components(
    t: &TensorValue,
    frame: &OrthonormalFrame,
    metric: &MetricAtPoint,
) -> Result<TensorValue> {
    let dim = t.dim();
    let (con, cov) = t.valence();
    let rank = con + cov;
    if rank == 0 {
        return Ok(t.clone());
    }
    // coframe[i][a] = g_{ab} e_i^b
    let mut coframe = vec![vec![0.0; dim]; dim];
    let mut framev = vec![vec![0.0; dim]; dim];
    for (i, e) in frame.vectors.iter().enumerate() {
        for a in 0..dim {
            framev[i][a] = e.get(&[a]);
            let mut s = 0.0;
            for b in 0..dim {
                s += metric.g().get(&[a, b]) * e.get(&[b]);
            }
            coframe[i][a] = s;
        }
    }
    let mut full = vec![0usize; rank];
    let out = TensorValue::from_fn(dim, con, cov, |frame_idx| {
        contract_frame(t, frame_idx, con, &mut full, &coframe, &framev, 0)
    });
    Ok(out)
}

fn contract_frame(
    t: &TensorValue,
    frame_idx: &[usize],
    con: usize,
    full: &mut Vec<usize>,
    coframe: &[Vec<f64>],
    framev: &[Vec<f64>],
    slot: usize,
) -> f64 {
    if slot == frame_idx.len() {
        return t.get(full);
    }
    let dim = t.dim();
    let weights = if slot < con {
        &coframe[frame_idx[slot]]
    } else {
        &framev[frame_idx[slot]]
    };
    let mut sum = 0.0;
    for a in 0..dim {
        if weights[a] == 0.0 {
            continue;
        }
        full[slot] = a;
        sum += weights[a] * contract_frame(t, frame_idx, con, full, coframe, framev, slot + 1);
    }
    sum
}

/// Max-abs frame norm of a tensor, the engine's scale-invariant residual.
pub fn frame_norm(t: &TensorValue, frame: &OrthonormalFrame, metric: &MetricAtPoint) -> f64 {
    frame_components(t, frame, metric)
        .map(|c| c.max_abs())
        .unwrap_or(f64::INFINITY)
}

fn cholesky(dim: usize, g: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut s = g[i * dim + j];
            for k in 0..j {
                s -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(GeoError::NotPositiveDefinite);
                }
                l[i * dim + j] = s.sqrt();
            } else {
                l[i * dim + j] = s / l[j * dim + j];
            }
        }
    }
    Ok(l)
}

/// Inverse of an SPD matrix from its Cholesky factor: solve L Lᵀ X = I.
fn spd_inverse(dim: usize, l: &[f64]) -> Vec<f64> {
    let mut inv = vec![0.0; dim * dim];
    for col in 0..dim {
        // Forward solve L y = e_col.
        let mut y = vec![0.0; dim];
        for i in 0..dim {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i * dim + k] * y[k];
            }
            y[i] = s / l[i * dim + i];
        }
        // Back solve Lᵀ x = y.
        let mut x = vec![0.0; dim];
        for i in (0..dim).rev() {
            let mut s = y[i];
            for k in (i + 1)..dim {
                s -= l[k * dim + i] * x[k];
            }
            x[i] = s / l[i * dim + i];
        }
        for i in 0..dim {
            inv[i * dim + col] = x[i];
        }
    }
    // Symmetrize against roundoff.
    for i in 0..dim {
        for j in 0..i {
            let m = 0.5 * (inv[i * dim + j] + inv[j * dim + i]);
            inv[i * dim + j] = m;
            inv[j * dim + i] = m;
        }
    }
    inv
}
