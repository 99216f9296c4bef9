//! Suite runner: maps suite names onto the verification machinery, applies
//! per-suite tolerances, and renders reports as JSON or markdown.
//!
//! The sign-convention lock always runs first, regardless of the requested
//! suite list: every other identity is meaningless if the curvature sign or
//! slot order is flipped.

use serde::{Deserialize, Serialize};

use crate::contact::{self, ContactStructure};
use crate::error::{GeoError, Result};
use crate::models::model_by_name;
use crate::report::{PremiseStatus, ResidualReport};
use crate::sample::SamplePlan;
use crate::star_ricci::{classify_ricci_einstein, EinsteinKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    Convention,
    Axioms,
    Sasakian,
    CurvatureIdentities,
    StarRicci,
    Conformal,
    Section4,
    SemiSymmetry,
    Soliton,
    Deformation,
}

impl SuiteKind {
    pub fn parse(name: &str) -> Result<SuiteKind> {
        match name {
            "convention" => Ok(SuiteKind::Convention),
            "axioms" => Ok(SuiteKind::Axioms),
            "sasakian" => Ok(SuiteKind::Sasakian),
            "curvature-identities" => Ok(SuiteKind::CurvatureIdentities),
            "star-ricci" => Ok(SuiteKind::StarRicci),
            "conformal" => Ok(SuiteKind::Conformal),
            "section4" => Ok(SuiteKind::Section4),
            "semi-symmetry" => Ok(SuiteKind::SemiSymmetry),
            "soliton" => Ok(SuiteKind::Soliton),
            "deformation" => Ok(SuiteKind::Deformation),
            other => Err(GeoError::UnknownSuite(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Convention => "convention",
            SuiteKind::Axioms => "axioms",
            SuiteKind::Sasakian => "sasakian",
            SuiteKind::CurvatureIdentities => "curvature-identities",
            SuiteKind::StarRicci => "star-ricci",
            SuiteKind::Conformal => "conformal",
            SuiteKind::Section4 => "section4",
            SuiteKind::SemiSymmetry => "semi-symmetry",
            SuiteKind::Soliton => "soliton",
            SuiteKind::Deformation => "deformation",
        }
    }

    /// Every user-selectable suite, in the default execution order.
    pub fn all() -> Vec<SuiteKind> {
        vec![
            SuiteKind::Axioms,
            SuiteKind::Sasakian,
            SuiteKind::CurvatureIdentities,
            SuiteKind::StarRicci,
            SuiteKind::Conformal,
            SuiteKind::Section4,
            SuiteKind::SemiSymmetry,
            SuiteKind::Soliton,
            SuiteKind::Deformation,
        ]
    }

    /// Base tolerance in exact-derivative mode.
    pub fn default_tolerance(&self) -> f64 {
        match self {
            SuiteKind::Convention
            | SuiteKind::Axioms
            | SuiteKind::Sasakian
            | SuiteKind::CurvatureIdentities
            | SuiteKind::StarRicci
            | SuiteKind::SemiSymmetry => 1e-6,
            SuiteKind::Conformal | SuiteKind::Section4 | SuiteKind::Deformation => 1e-5,
            SuiteKind::Soliton => 1e-5,
        }
    }
}

/// Run the requested suites on a registry model. The convention lock is
/// prepended; duplicate suite names collapse to their first occurrence.
pub fn run_suites(
    model_name: &str,
    n: usize,
    deform_a: f64,
    suites: &[SuiteKind],
    plan: &SamplePlan,
) -> Result<Vec<ResidualReport>> {
    let model = model_by_name(model_name, n)?;
    let s = &model.structure;
    let mut rows = Vec::new();
    let conv_tol = plan.tolerance_for("convention", SuiteKind::Convention.default_tolerance());
    rows.extend(contact::convention_lock(s, plan, conv_tol)?);
    let mut seen = vec![SuiteKind::Convention];
    for suite in suites {
        if seen.contains(suite) {
            continue;
        }
        seen.push(*suite);
        let tol = plan.tolerance_for(suite.name(), suite.default_tolerance());
        match suite {
            SuiteKind::Convention => {}
            SuiteKind::Axioms => {
                rows.extend(contact::verify_almost_contact(s, plan, tol)?);
                rows.extend(contact::verify_compatibility(s, plan, tol)?);
            }
            SuiteKind::Sasakian => {
                rows.extend(contact::verify_sasakian(s, plan, tol)?);
                rows.extend(contact::nijenhuis_normality(s, plan, tol)?);
            }
            SuiteKind::CurvatureIdentities => {
                rows.extend(contact::verify_curvature_identities(s, plan, tol)?);
                rows.extend(curvature_structure_rows(s, plan, tol)?);
            }
            SuiteKind::StarRicci => {
                let tol_parallel = plan.tolerance_for(suite.name(), 1e-4);
                rows.extend(crate::star_ricci::star_ricci_suite(s, plan, tol, tol_parallel)?);
            }
            SuiteKind::Conformal => {
                rows.extend(crate::conformal::conformal_suite(s, plan, tol)?);
            }
            SuiteKind::Section4 => {
                let tol_sym = plan.tolerance_for(suite.name(), 1e-4);
                rows.extend(crate::conformal::section4_suite(s, plan, tol, tol_sym)?);
            }
            SuiteKind::SemiSymmetry => {
                rows.extend(crate::star_ricci::semi_symmetry_implication(s, plan, tol)?);
            }
            SuiteKind::Soliton => {
                let tol_comm = plan.tolerance_for(suite.name(), 1e-3);
                rows.extend(crate::soliton::soliton_suite(s, plan, tol, tol, tol_comm)?);
            }
            SuiteKind::Deformation => {
                rows.extend(deformation_suite(s, plan, deform_a, tol)?);
            }
        }
    }
    Ok(rows)
}

/// Structural curvature rows shared by every metric: the first Bianchi
/// identity, the (0,4) symmetries, and metric parallelism.
fn curvature_structure_rows(
    s: &ContactStructure,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    use crate::calculus::{covariant_derivative, riemann, riemann_covariant};
    use crate::probe::collect_samples;
    use crate::report::ResidualAccumulator;
    use crate::tensor::frame_norm;
    use crate::tensor::TensorValue;

    let samples = collect_samples(s.chart(), plan)?;
    let dim = s.dim();
    let mut bianchi = ResidualAccumulator::new();
    let mut antisym = ResidualAccumulator::new();
    let mut pair_sym = ResidualAccumulator::new();
    let mut parallel = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let riem = riemann(s.chart(), p, &plan.fd)?;
        let cyclic = TensorValue::from_fn(dim, 1, 3, |ix| {
            let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
            riem.get(&[a, b, c, d]) + riem.get(&[a, c, d, b]) + riem.get(&[a, d, b, c])
        });
        bianchi.update(frame_norm(&cyclic, &smp.frame, &smp.metric), p);
        let r4 = riemann_covariant(s.chart(), p, &plan.fd)?;
        let mut worst_anti = 0.0f64;
        let mut worst_pair = 0.0f64;
        let rf = crate::tensor::frame_components(&r4, &smp.frame, &smp.metric)?;
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    for e in 0..dim {
                        let v = rf.get(&[b, c, d, e]);
                        worst_anti = worst_anti
                            .max((v + rf.get(&[c, b, d, e])).abs())
                            .max((v + rf.get(&[b, c, e, d])).abs());
                        worst_pair = worst_pair.max((v - rf.get(&[d, e, b, c])).abs());
                    }
                }
            }
        }
        antisym.update(worst_anti, p);
        pair_sym.update(worst_pair, p);
        let nabla_g = covariant_derivative(s.chart(), &s.chart().metric_field(), p, &plan.fd)?;
        parallel.update(frame_norm(&nabla_g, &smp.frame, &smp.metric), p);
    }
    Ok(vec![
        ResidualReport::new(
            "curvature-identities",
            "first-bianchi",
            "R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0",
            &bianchi,
            tol,
        ),
        ResidualReport::new(
            "curvature-identities",
            "antisymmetry",
            "R(X,Y,Z,W) = −R(Y,X,Z,W) = −R(X,Y,W,Z)",
            &antisym,
            tol,
        ),
        ResidualReport::new(
            "curvature-identities",
            "pair-symmetry",
            "R(X,Y,Z,W) = R(Z,W,X,Y)",
            &pair_sym,
            tol,
        ),
        ResidualReport::new("curvature-identities", "metric-parallel", "∇g = 0", &parallel, tol),
    ])
}

/// D-homothetic deformation suite: the deformed structure re-passes the
/// axioms and the Sasakian condition, the η-Einstein constants obey the
/// transformation law, and deforming by a then 1/a restores the metric.
fn deformation_suite(
    s: &ContactStructure,
    plan: &SamplePlan,
    a: f64,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    use crate::probe::collect_samples;
    use crate::report::ResidualAccumulator;

    let deformed = contact::d_homothetic_deform(s, a)?;
    let mut rows: Vec<ResidualReport> = Vec::new();
    let relabel = |mut r: ResidualReport| {
        r.suite = "deformation".to_string();
        r.identity = format!("deformed-{}", r.identity);
        r
    };
    rows.extend(
        contact::verify_almost_contact(&deformed, plan, tol)?
            .into_iter()
            .map(relabel),
    );
    rows.extend(
        contact::verify_compatibility(&deformed, plan, tol)?
            .into_iter()
            .map(relabel),
    );
    rows.extend(contact::verify_sasakian(&deformed, plan, tol)?.into_iter().map(relabel));

    // η-Einstein transformation law α' = (α + 2 − 2a)/a, γ' = 2n − α'.
    let base_fit = classify_ricci_einstein(s, plan, EinsteinKind::EtaEinstein, tol, tol)?;
    let deformed_fit =
        classify_ricci_einstein(&deformed, plan, EinsteinKind::EtaEinstein, tol, tol)?;
    let (alpha_law, gamma_law) = contact::eta_einstein_transform(base_fit.alpha, s.n(), a);
    let mut alpha_acc = ResidualAccumulator::new();
    alpha_acc.update(
        (deformed_fit.alpha - alpha_law)
            .abs()
            .max(base_fit.max_residual)
            .max(deformed_fit.max_residual),
        &[],
    );
    rows.push(ResidualReport::new(
        "deformation",
        "alpha-transform",
        "α' = (α + 2 − 2a)/a",
        &alpha_acc,
        tol,
    ));
    let mut gamma_acc = ResidualAccumulator::new();
    gamma_acc.update((deformed_fit.gamma - gamma_law).abs(), &[]);
    rows.push(ResidualReport::new(
        "deformation",
        "gamma-complement",
        "γ' = 2n − α'",
        &gamma_acc,
        tol,
    ));

    // Round trip a then 1/a.
    let back = contact::d_homothetic_deform(&deformed, 1.0 / a)?;
    let samples = collect_samples(s.chart(), plan)?;
    let mut roundtrip = ResidualAccumulator::new();
    for smp in &samples {
        let p = &smp.point;
        let diff = back
            .chart()
            .metric_value(p)
            .sub(&s.chart().metric_value(p))?;
        roundtrip.update(
            crate::tensor::frame_norm(&diff, &smp.frame, &smp.metric),
            p,
        );
    }
    rows.push(ResidualReport::new(
        "deformation",
        "deformation-roundtrip",
        "deform(a) ∘ deform(1/a) = id",
        &roundtrip,
        1e-9_f64.max(plan.tolerance_for("deformation", 1e-9)),
    ));
    Ok(rows)
}

/// Flat JSON row: the schema is an array of these objects.
#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JsonRow {
    pub schema_version: u32,
    pub model: String,
    pub n: usize,
    pub seed: u64,
    pub suite: String,
    pub identity: String,
    pub anchor: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub premise_status: PremiseStatus,
    pub worst_point: Vec<f64>,
}

pub const SCHEMA_VERSION: u32 = 1;

/// Render reports as a JSON array (empty list → `[]`).
pub fn emit_json(rows: &[ResidualReport], model: &str, n: usize, seed: u64) -> String {
    let flat: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            schema_version: SCHEMA_VERSION,
            model: model.to_string(),
            n,
            seed,
            suite: r.suite.clone(),
            identity: r.identity.clone(),
            anchor: r.anchor.clone(),
            max_residual: r.max_residual,
            tolerance: r.tolerance,
            pass: r.pass,
            premise_status: r.premise_status,
            worst_point: r.worst_point.clone(),
        })
        .collect();
    serde_json::to_string_pretty(&flat).expect("report serialization")
}

/// Render reports as markdown, one table per suite.
pub fn emit_markdown(rows: &[ResidualReport], model: &str, n: usize, seed: u64) -> String {
    let mut out = format!("# Verification report — model `{model}`, n = {n}, seed = {seed}\n");
    let mut current_suite = String::new();
    let mut passed = 0usize;
    let mut failed = 0usize;
    let mut skipped = 0usize;
    for r in rows {
        if r.suite != current_suite {
            current_suite = r.suite.clone();
            out.push_str(&format!(
                "\n## {current_suite}\n\n| identity | checks | max residual | tolerance | status |\n|---|---|---:|---:|---|\n"
            ));
        }
        let status = if r.skipped() {
            skipped += 1;
            "skip"
        } else if r.pass {
            passed += 1;
            "pass"
        } else {
            failed += 1;
            "FAIL"
        };
        out.push_str(&format!(
            "| {} | {} | {:.3e} | {:.1e} | {} |\n",
            r.identity, r.anchor, r.max_residual, r.tolerance, status
        ));
    }
    out.push_str(&format!(
        "\n**{passed} passed, {failed} failed, {skipped} skipped (premise violated)**\n"
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_plan(points: usize) -> SamplePlan {
        let mut plan = SamplePlan::new(points, 42);
        plan.vectors_per_point = 3;
        plan
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(SuiteKind::parse("bogus"), Err(GeoError::UnknownSuite(_))));
        assert!(matches!(
            run_suites("nonexistent", 1, 2.0, &[SuiteKind::Axioms], &quick_plan(2)),
            Err(GeoError::UnknownModel(_))
        ));
    }

    #[test]
    fn suite_names_round_trip() {
        for kind in SuiteKind::all() {
            assert_eq!(SuiteKind::parse(kind.name()).unwrap(), kind);
        }
        assert_eq!(SuiteKind::parse("convention").unwrap(), SuiteKind::Convention);
    }

    #[test]
    fn convention_row_always_comes_first() {
        let rows = run_suites("sphere", 1, 2.0, &[SuiteKind::Axioms], &quick_plan(2)).unwrap();
        assert_eq!(rows[0].suite, "convention");
        assert!(rows[0].pass);
    }

    #[test]
    fn sasakian_suite_passes_on_sphere() {
        let rows = run_suites("sphere", 1, 2.0, &[SuiteKind::Sasakian], &quick_plan(3)).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
    }

    #[test]
    fn section4_premise_gates_on_r2n1() {
        let rows = run_suites("r2n1", 2, 2.0, &[SuiteKind::Section4], &quick_plan(2)).unwrap();
        let gated: Vec<_> = rows.iter().filter(|r| r.suite == "section4").collect();
        assert!(!gated.is_empty());
        assert!(gated.iter().all(|r| r.skipped()));
        assert!(rows.iter().all(|r| !r.failed()));
    }

    #[test]
    fn deformation_suite_passes_on_both_models() {
        for model in ["sphere", "r2n1"] {
            let rows =
                run_suites(model, 1, 2.0, &[SuiteKind::Deformation], &quick_plan(3)).unwrap();
            for r in &rows {
                assert!(r.pass, "{model}: {} residual {}", r.identity, r.max_residual);
            }
        }
    }

    #[test]
    fn duplicate_suites_collapse() {
        let rows = run_suites(
            "sphere",
            1,
            2.0,
            &[SuiteKind::Axioms, SuiteKind::Axioms],
            &quick_plan(2),
        )
        .unwrap();
        let count = rows.iter().filter(|r| r.identity == "phi-squared").count();
        assert_eq!(count, 1);
    }

    #[test]
    fn tolerance_overrides_apply() {
        let mut plan = quick_plan(2);
        plan.tolerances.insert("axioms".into(), 1e-20);
        let rows = run_suites("sphere", 1, 2.0, &[SuiteKind::Axioms], &plan).unwrap();
        // With an absurd tolerance the finite-difference rows must fail.
        let deta = rows.iter().find(|r| r.identity == "contact-condition").unwrap();
        assert!(!deta.pass);
        assert_eq!(deta.tolerance, 1e-20);
    }

    #[test]
    fn json_emission_round_trips() {
        let rows = run_suites("sphere", 1, 2.0, &[SuiteKind::Axioms], &quick_plan(2)).unwrap();
        let json = emit_json(&rows, "sphere", 1, 42);
        let parsed: Vec<JsonRow> = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.len(), rows.len());
        assert_eq!(parsed[0].schema_version, SCHEMA_VERSION);
        assert_eq!(parsed[0].model, "sphere");
        assert_eq!(emit_json(&[], "sphere", 1, 42), "[]");
    }

    #[test]
    fn markdown_has_one_table_per_suite() {
        let rows = run_suites(
            "sphere",
            1,
            2.0,
            &[SuiteKind::Axioms, SuiteKind::Sasakian],
            &quick_plan(2),
        )
        .unwrap();
        let md = emit_markdown(&rows, "sphere", 1, 42);
        assert!(md.contains("## convention"));
        assert!(md.contains("## axioms"));
        assert!(md.contains("## sasakian"));
        assert!(md.contains("| identity |"));
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let plan = quick_plan(2);
        let a = emit_json(
            &run_suites("sphere", 1, 2.0, &[SuiteKind::StarRicci], &plan).unwrap(),
            "sphere",
            1,
            plan.seed,
        );
        let b = emit_json(
            &run_suites("sphere", 1, 2.0, &[SuiteKind::StarRicci], &plan).unwrap(),
            "sphere",
            1,
            plan.seed,
        );
        assert_eq!(a, b);
    }
}
