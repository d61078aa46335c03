//! Divergence, inner-ball values and load of the lifting over a `λ` sweep.

use super::config::ExperimentConfig;
use super::output::Table;
use super::{Check, ExperimentReport};
use crate::error::Result;
use crate::fields::ops;
use crate::lifting::{build_lifting, inner_ball_defect, lifting_load};
use crate::norms::l2_norm_plancherel;

const COLUMNS: [&str; 7] = ["lambda", "div_l2", "inner_defect", "lq", "negative", "ratio", "load_per_lambda"];

pub fn run_lifting_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let spec = cfg.lifting.spec()?;
    let (q, r) = (cfg.exponents.q, cfg.exponents.r);
    let mut report = ExperimentReport::new(cfg.experiment);
    let mut table = Table::new("lifting", &COLUMNS);
    let (mut div, mut defect) = (0.0f64, 0.0f64);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let (mut lo1, mut hi1) = (f64::INFINITY, 0.0f64);
    for &lambda in &cfg.lifting.lambdas() {
        let v = build_lifting(lambda, &spec, &cfg.grid)?;
        let d = l2_norm_plancherel(&ops::divergence(&v.spectral)?);
        let e = inner_ball_defect(&v);
        let load = lifting_load(&v, q, r)?;
        div = div.max(d);
        defect = defect.max(e);
        lo = lo.min(load.ratio);
        hi = hi.max(load.ratio);
        let per = (load.lq + load.negative) / lambda;
        lo1 = lo1.min(per);
        hi1 = hi1.max(per);
        table.push(vec![lambda, d, e, load.lq, load.negative, load.ratio, per]);
    }
    let tol = &cfg.tolerances;
    report.checks.push(Check::at_most("lifting_divergence", div, tol.lifting_divergence));
    report.checks.push(Check::at_most("lifting_inner_ball", defect, tol.lifting_pointwise));
    report.checks.push(Check::at_most("lifting_ratio_spread", hi / lo - 1.0, tol.lifting_ratio));
    // V is linear in λ, so load/λ is flat up to the small λ∂₁V term; load/(λ(1+λ)) drifts like 1/(1+λ).
    report.notes.push(format!("spread of load/lambda: {:.3e}", hi1 / lo1 - 1.0));
    report.tables.push(table);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridSpec;
    use crate::harness::Experiment;

    #[test]
    fn one_row_per_lambda_with_exact_divergence() {
        let mut cfg = ExperimentConfig::new(Experiment::LiftingCheck, GridSpec::new(2, 1.0, 64).unwrap());
        cfg.lifting.lambdas = Some(vec![1e-3, 1e-2]);
        let report = run_lifting_check(&cfg).unwrap();
        let t = report.table("lifting").unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(report.check("lifting_divergence").unwrap().passed);
        let per = t.column("load_per_lambda").unwrap();
        assert!((per[1] / per[0] - 1.0).abs() < 1e-3);
    }
}
