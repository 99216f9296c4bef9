//! Seeded sampling of evaluation points and tangent vectors.
//!
//! Reproducibility contract: the generator is ChaCha8 keyed by the 64-bit
//! plan seed; uniforms are `(next_u64() >> 11) / 2^53` and normals come from
//! the Box–Muller transform on consecutive uniform pairs. Identical plans
//! therefore produce identical samples on every platform.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::calculus::{DerivativeConfig, DomainBox};
use crate::tensor::{MetricAtPoint, TensorValue};

/// Sampling plan for a verification run.
#[derive(Debug, Clone)]
pub struct SamplePlan {
    pub point_count: usize,
    pub seed: u64,
    pub vectors_per_point: usize,
    /// Per-suite tolerance overrides keyed by suite name.
    pub tolerances: BTreeMap<String, f64>,
    pub fd: DerivativeConfig,
}

impl SamplePlan {
    pub fn new(point_count: usize, seed: u64) -> Self {
        SamplePlan {
            point_count,
            seed,
            vectors_per_point: 4,
            tolerances: BTreeMap::new(),
            fd: DerivativeConfig::default(),
        }
    }

    pub fn with_vectors(mut self, vectors_per_point: usize) -> Self {
        self.vectors_per_point = vectors_per_point;
        self
    }

    pub fn with_fd(mut self, fd: DerivativeConfig) -> Self {
        self.fd = fd;
        self
    }

    pub fn tolerance_for(&self, suite: &str, default: f64) -> f64 {
        self.tolerances.get(suite).copied().unwrap_or(default)
    }

    /// Margin to keep between samples and the chart boundary so that nested
    /// stencils stay inside the domain. The widest consumer differentiates a
    /// stencil-assembled field at 8·h3 with curvature stencils underneath.
    pub fn stencil_margin(&self) -> f64 {
        2.0 * (self.fd.h1 + self.fd.h2 + 10.0 * self.fd.h3)
    }

    pub fn rng(&self) -> SampleRng {
        SampleRng::new(self.seed)
    }
}

/// Deterministic sample stream.
pub struct SampleRng {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        SampleRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // Box–Muller; 1 - u keeps the log argument strictly positive.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Uniform point in the box shrunk by `margin` on every side.
    pub fn point_in(&mut self, domain: &DomainBox, margin: f64) -> Vec<f64> {
        (0..domain.dim())
            .map(|i| {
                let lo = domain.lo(i) + margin;
                let hi = domain.hi(i) - margin;
                lo + self.uniform() * (hi - lo)
            })
            .collect()
    }

    /// Standard-normal coordinate components.
    pub fn vector(&mut self, dim: usize) -> TensorValue {
        TensorValue::from_fn(dim, 1, 0, |_| self.normal())
    }

    /// Standard-normal components, normalized to unit metric length.
    pub fn unit_vector(&mut self, metric: &MetricAtPoint) -> TensorValue {
        loop {
            let v = self.vector(metric.dim());
            let n = metric.norm(&v);
            if n > 1e-6 {
                return v.scale(1.0 / n);
            }
        }
    }
}
