use std::sync::Arc;

use qqlab::field::{builtin_catalog, QuaternionField};
use qqlab::harness::cases::stokes_pair_residuals;
use qqlab::harness::{convergence_sweep, run_suite, Config, Context, RunOptions, Verdict};
use qqlab::quad::calibrate_sigma;
use qqlab::Error;

#[test]
fn empty_case_list_gives_empty_report() {
    let c = Config::from_json(r#"{"cases": []}"#).unwrap();
    let r = run_suite(&c, RunOptions::default()).unwrap();
    assert!(r.rows.is_empty());
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn unknown_case_is_a_config_error() {
    let c = Config::from_json(r#"{"cases": ["stokes-classical", "bogus"]}"#).unwrap();
    assert!(matches!(run_suite(&c, RunOptions::default()), Err(Error::Config(_))));
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(Config::from_json(r#"{"tolerances": {"stokes": 1e-9, "oops": 1}}"#).is_err());
    assert!(Config::from_json(r#"{"box": {"lo": [0,0,0,0], "hi": [1,1,1,1], "mid": 0}}"#).is_err());
}

#[test]
fn square_candidate_is_skipped_not_failed() {
    let c = Config::from_json(r#"{"cases": ["pro15-square-candidate"]}"#).unwrap();
    let r = run_suite(&c, RunOptions::default()).unwrap();
    assert_eq!(r.count(Verdict::SkippedHypothesis), 1);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn loose_tolerance_cannot_hide_a_tight_failure() {
    // tightening a tolerance below the attained residual flips the verdict
    let c = Config::from_json(r#"{"cases": ["bp-classical-constants"], "tolerances": {"bp_constants": 1e-30}}"#).unwrap();
    let r = run_suite(&c, RunOptions::default()).unwrap();
    assert!(r.any_fail());
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let c = Config::from_json(r#"{"cases": ["conjugation", "pro2-differential", "s4-stokes-comp", "kernel-regularity"]}"#).unwrap();
    let a = run_suite(&c, RunOptions { threads: Some(1), no_timing: true }).unwrap();
    let b = run_suite(&c, RunOptions { threads: Some(3), no_timing: true }).unwrap();
    assert_eq!(a.csv_string(), b.csv_string());
}

#[test]
fn classical_stokes_is_frame_invariant() {
    let ctx = Context::new(&Config::default()).unwrap();
    let rot = ctx.rotated_unit_frame();
    let sigma_rot = calibrate_sigma(&rot, &ctx.domain, &ctx.spec).unwrap();
    let pick = |psi| -> Vec<(String, Arc<dyn QuaternionField>)> {
        builtin_catalog(psi, &ctx.domain)
            .into_iter()
            .filter(|e| matches!(e.id, "square" | "cube" | "identity"))
            .map(|e| (e.id.to_string(), e.field))
            .collect()
    };
    let a = stokes_pair_residuals(&pick(&ctx.psi), &ctx.psi, &ctx.sigma, &ctx.domain, &ctx.spec).unwrap();
    let b = stokes_pair_residuals(&pick(&rot), &rot, &sigma_rot, &ctx.domain, &ctx.spec).unwrap();
    for ((_, _, l0, r0), (_, _, l1, r1)) in a.iter().zip(&b) {
        let ra = (*l0 - *r0).norm() / r0.norm().max(1.0);
        let rb = (*l1 - *r1).norm() / r1.norm().max(1.0);
        assert!((ra - rb).abs() <= 1e-10, "{ra} vs {rb}");
    }
}

#[test]
fn stokes_order_sweep_decays() {
    let ctx = Context::new(&Config::default()).unwrap();
    let t = convergence_sweep(&ctx, "stokes-classical", 3).unwrap();
    assert_eq!(t.levels.iter().map(|l| l.parameter).collect::<Vec<_>>(), vec![4.0, 6.0, 8.0]);
    assert!(t.levels.windows(2).all(|w| w[1].residual < w[0].residual));
}

#[test]
fn csv_and_summary_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let c = Config::from_json(r#"{"cases": ["conjugation"]}"#).unwrap();
    let r = run_suite(&c, RunOptions { threads: Some(1), no_timing: true }).unwrap();
    let (csv, json) = r.write_to(dir.path()).unwrap();
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), r.rows.len() + 1);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["fail"], 0);
    assert_eq!(v["sigma_sign"], -1);
}
