//! Shared sampling plumbing: seeded points with per-point metric data,
//! orthonormal frames, and random unit tangent vectors.

use crate::calculus::ChartManifold;
use crate::error::Result;
use crate::sample::SamplePlan;
use crate::tensor::{coordinate_frame, MetricAtPoint, OrthonormalFrame, TensorValue};

pub struct PointSample {
    pub point: Vec<f64>,
    pub metric: MetricAtPoint,
    pub frame: OrthonormalFrame,
    pub vectors: Vec<TensorValue>,
}

impl PointSample {
    /// Unit vector `i`, cycling when the plan has fewer vectors than asked.
    pub fn vec(&self, i: usize) -> &TensorValue {
        &self.vectors[i % self.vectors.len()]
    }
}

pub fn collect_samples(
    chart: &ChartManifold,
    plan: &SamplePlan,
) -> Result<Vec<PointSample>> {
    let mut rng = plan.rng();
    let margin = plan.stencil_margin();
    if !chart.domain().contains_with_margin(&chart.domain().center(), margin) {
        return Err(crate::error::GeoError::StencilMargin { margin });
    }
    let mut out = Vec::with_capacity(plan.point_count);
    for _ in 0..plan.point_count {
        let point = rng.point_in(chart.domain(), margin);
        let metric = chart.metric_at(&point)?;
        let frame = coordinate_frame(&metric, None)?;
        let vectors = (0..plan.vectors_per_point.max(2))
            .map(|_| rng.unit_vector(&metric))
            .collect();
        out.push(PointSample { point, metric, frame, vectors });
    }
    Ok(out)
}
