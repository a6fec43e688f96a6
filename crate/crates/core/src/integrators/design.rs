use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::integrators::coefficients::{error_metric_e, error_metric_eg, stage_coefficients, ShadowCoefficients};
use crate::integrators::rho::{rho_max, RhoTarget};
use crate::integrators::scheme::Family;

/// Objective minimized by the design tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignObjective {
    E,
    EG,
    Rho(RhoTarget),
}

/// Minimizer of a design objective.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub family: Family,
    pub params: Vec<f64>,
    pub value: f64,
    pub coefficients: ShadowCoefficients,
}

const PHI_INV: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - PHI_INV * (hi - lo);
    let mut x2 = lo + PHI_INV * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol * (1.0 + lo.abs() + hi.abs()) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - PHI_INV * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + PHI_INV * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Nelder–Mead simplex search. Returns `(x, f(x), converged)`.
pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let size = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if size < tol {
            return (simplex[0].clone(), values[0], true);
        }

        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let x = along(-0.5);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = f(&x);
            (x, v)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            simplex[i] = (0..n).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
            values[i] = f(&simplex[i]);
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best].clone(), values[best], false)
}

fn objective_value(objective: DesignObjective, family: Family, params: &[f64], hbar: f64) -> f64 {
    let Ok(c) = stage_coefficients(family, params) else {
        return f64::INFINITY;
    };
    match objective {
        DesignObjective::E => error_metric_e(&c),
        DesignObjective::EG => error_metric_eg(&c),
        DesignObjective::Rho(target) => rho_max(params[0], hbar, target),
    }
}

/// Minimizes a design objective over the family's parameter domain `(0, ½)^k`.
///
/// One-parameter families use a grid scan refined by golden-section search; larger
/// families use Nelder–Mead restarted from ten seeded starting points.
pub fn minimize_design_metric(objective: DesignObjective, family: Family, hbar: Option<f64>) -> Result<DesignResult> {
    let n = family.n_params();
    if n == 0 {
        return Err(Error::InvalidArgument("the Verlet family has no free coefficients".into()));
    }
    if matches!(objective, DesignObjective::Rho(_)) && family != Family::TwoStage {
        return Err(Error::InvalidArgument("the rho bound is defined for the two-stage family only".into()));
    }
    let hbar = hbar.unwrap_or(family.n_stages() as f64);
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let f = |x: &[f64]| objective_value(objective, family, x, hbar);

    let (params, value) = if n == 1 {
        const GRID: usize = 500;
        let mut best = (0.25, f64::INFINITY);
        for i in 1..GRID {
            let b = 0.5 * i as f64 / GRID as f64;
            let v = f(&[b]);
            if v < best.1 {
                best = (b, v);
            }
        }
        let d = 0.5 / GRID as f64;
        let (x, v) = golden_section(|b| f(&[b]), (best.0 - d).max(1e-12), (best.0 + d).min(0.5 - 1e-12), 1e-12);
        (vec![x], v)
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
        let mut best: Option<(Vec<f64>, f64, bool)> = None;
        for _ in 0..10 {
            let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..0.45)).collect();
            let mut run = nelder_mead(&f, &x0, 0.04, 1e-11, 20_000);
            // Restart from the result to escape premature collapse.
            let again = nelder_mead(&f, &run.0, 0.01, 1e-12, 20_000);
            if again.1 <= run.1 {
                run = again;
            }
            if best.as_ref().is_none_or(|b| run.1 < b.1) {
                best = Some(run);
            }
        }
        let (x, v, converged) = best.expect("ten restarts");
        if !converged || !v.is_finite() {
            return Err(Error::NoConvergence { best: x, value: v });
        }
        (x, v)
    };
    let coefficients = stage_coefficients(family, &params)?;
    Ok(DesignResult { family, params, value, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_quadratic() {
        let (x, v) = golden_section(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && (v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let (x, _, ok) = nelder_mead(&f, &[-1.0, 1.0], 0.5, 1e-10, 10_000);
        assert!(ok && (x[0] - 1.0).abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_stage_minimum_error() {
        let r = minimize_design_metric(DesignObjective::E, Family::TwoStage, None).unwrap();
        assert!((r.params[0] - 0.23061).abs() < 1e-4, "{:?}", r.params);
        assert!((r.value / 2.720e-4 - 1.0).abs() < 0.01);
    }

    #[test]
    fn two_stage_gaussian_minimum() {
        let r = minimize_design_metric(DesignObjective::EG, Family::TwoStage, None).unwrap();
        assert!((r.params[0] - 0.230907).abs() < 1e-4, "{:?}", r.params);
    }

    #[test]
    fn rho_minimizers() {
        let r = minimize_design_metric(DesignObjective::Rho(RhoTarget::Modified), Family::TwoStage, Some(2.0)).unwrap();
        assert!((r.params[0] - 0.238016).abs() < 1e-4, "{:?}", r.params);
        let r = minimize_design_metric(DesignObjective::Rho(RhoTarget::True), Family::TwoStage, Some(2.0)).unwrap();
        assert!((r.params[0] - 0.21178).abs() < 1e-4, "{:?}", r.params);
    }

    #[test]
    fn rejected_requests() {
        assert!(minimize_design_metric(DesignObjective::E, Family::Verlet, None).is_err());
        assert!(minimize_design_metric(DesignObjective::Rho(RhoTarget::True), Family::ThreeStage, None).is_err());
    }
}
