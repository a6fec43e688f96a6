use crate::error::{Error, Result};
use crate::integrators::scheme::Family;

/// Coefficients of the 4th and 6th order modified Hamiltonians of a splitting scheme.
///
/// `c` multiplies the analytic-derivative form, `k` the time-derivative form, and `gamma`
/// holds the Poisson-bracket weights used by the error metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowCoefficients {
    /// `(c₂₁, c₂₂, c₄₁, c₄₂, c₄₃, c₄₄)`.
    pub c: [f64; 6],
    /// `(k₂₁, k₂₂, k₄₁, k₄₂, k₄₃, k₄₄)`.
    pub k: [f64; 6],
    /// `(γ₁, γ₂, γ₃, γ₄)`.
    pub gamma: [f64; 4],
}

impl ShadowCoefficients {
    pub fn from_c(c: [f64; 6]) -> Self {
        let [c21, c22, c41, c42, c43, c44] = c;
        let k = [c21, c22, c41, 3.0 * c41 + c42, c41 + c44, 3.0 * c41 + c42 + c43];
        let gamma = [c41, (c44 - c42) / 3.0, c43 / 2.0, c44 / 2.0];
        Self { c, k, gamma }
    }

    pub fn zero() -> Self {
        Self::from_c([0.0; 6])
    }

    /// `α = c₂₁`.
    pub fn alpha(&self) -> f64 {
        self.c[0]
    }

    /// `β = c₂₂`.
    pub fn beta(&self) -> f64 {
        self.c[1]
    }
}

fn check_domain(family: Family, params: &[f64]) -> Result<()> {
    if params.len() != family.n_params() {
        return Err(Error::InvalidArgument(format!(
            "{family} takes {} parameter(s), got {}",
            family.n_params(),
            params.len()
        )));
    }
    if let Some(v) = params.iter().find(|v| !(**v > 0.0 && **v < 0.5)) {
        return Err(Error::InvalidArgument(format!("{family} parameter {v} outside (0, 1/2)")));
    }
    Ok(())
}

/// Evaluates the closed-form coefficient polynomials of a family.
pub fn stage_coefficients(family: Family, params: &[f64]) -> Result<ShadowCoefficients> {
    check_domain(family, params)?;
    let c = match family {
        Family::Verlet => [1.0 / 12.0, -1.0 / 24.0, -1.0 / 720.0, 1.0 / 120.0, -1.0 / 240.0, 1.0 / 60.0],
        Family::TwoStage => {
            let b = params[0];
            [
                (6.0 * b - 1.0) / 24.0,
                (6.0 * b * b - 6.0 * b + 1.0) / 12.0,
                (7.0 - 30.0 * b) / 5760.0,
                (-10.0 * b * b + 15.0 * b - 3.0) / 240.0,
                (-30.0 * b.powi(3) + 35.0 * b * b - 15.0 * b + 2.0) / 120.0,
                (20.0 * b * b - 1.0) / 240.0,
            ]
        }
        Family::ThreeStage => {
            let (a, b) = (params[0], params[1]);
            let m = 1.0 - 2.0 * b;
            [
                (1.0 - 6.0 * a * (1.0 - a) * m) / 12.0,
                (6.0 * a * m * m - 1.0) / 24.0,
                (1.0 + 2.0 * (a - 1.0) * a * (8.0 + 31.0 * (a - 1.0) * a) * m - 4.0 * b) / 720.0,
                (6.0 * a.powi(3) * m * m - a * a * (19.0 - 116.0 * b + 36.0 * b * b + 240.0 * b.powi(3))
                    + a * (27.0 - 208.0 * b + 308.0 * b * b)
                    - 48.0 * b * b
                    + 48.0 * b
                    - 7.0)
                    / 240.0,
                (1.0 + 15.0 * a * m * (-1.0 + 2.0 * a * (2.0 - 3.0 * b + a * (4.0 * b - 2.0)))) / 180.0,
                (-1.0 + 20.0 * a * m * (b + a * (1.0 + 6.0 * (b - 1.0) * b))) / 240.0,
            ]
        }
        Family::FourStage => {
            let (a, b1, b2) = (params[0], params[1], params[2]);
            let m = 1.0 - 2.0 * a;
            [
                (6.0 * b1 * b1 - 6.0 * b1 + 1.0 + 6.0 * b2 * m * (2.0 * b1 + b2 - 1.0)) / 12.0,
                (6.0 * (b1 + b2 * m * m) - 1.0) / 24.0,
                (7.0 + 60.0 * (8.0 * (a - 1.0).powi(2) * a * a - 1.0) * b1) / 5760.0,
                (1.0 - 12.0 * b1 + 40.0 * b1 * b1 - 24.0 * b1.powi(3)
                    + 4.0 * m * (a - 3.0 + (20.0 - 6.0 * a) * b1 + 6.0 * (3.0 + 2.0 * a) * b1 * b1) * b2
                    + 8.0 * m * (5.0 + 9.0 * a * a + 6.0 * a * (b1 - 2.0) - 9.0 * b1) * b2 * b2
                    - 24.0 * m * m * b2.powi(3))
                    / 96.0,
                (2.0 - 15.0 * b1 + 30.0 * b1 * b1
                    + 15.0 * m * m * (4.0 * (1.0 + a) * b1 - 1.0 - 2.0 * a) * b2
                    + 30.0 * m.powi(3) * b2 * b2)
                    / 360.0,
                (2.0 - 30.0 * b1.powi(3)
                    + 5.0 * b1 * b1 * (7.0 - 6.0 * (4.0 * a * (1.0 + a) - 3.0) * b2)
                    + 5.0 * m * b2 * ((7.0 - 6.0 * b2) * b2 - 3.0 + 2.0 * a * (6.0 * b2 * b2 - 1.0 - 3.0 * b2))
                    + 5.0 * b1 * (2.0 * m * b2 * (7.0 - 9.0 * b2 + 6.0 * a * (1.0 + b2)) - 3.0))
                    / 120.0,
            ]
        }
    };
    Ok(ShadowCoefficients::from_c(c))
}

/// `E = √(γ₁² + γ₂² + γ₃² + γ₄²)`.
pub fn error_metric_e(coeffs: &ShadowCoefficients) -> f64 {
    coeffs.gamma.iter().map(|g| g * g).sum::<f64>().sqrt()
}

/// Gaussian error metric `E^G = |γ₃ − γ₄|`.
///
/// For a quadratic potential the fourth-order error of the modified Hamiltonian reduces
/// to the brackets weighted by `γ₃` and `γ₄`, which enter with opposite signs.
pub fn error_metric_eg(coeffs: &ShadowCoefficients) -> f64 {
    (coeffs.gamma[2] - coeffs.gamma[3]).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn verlet_values() {
        let c = stage_coefficients(Family::Verlet, &[]).unwrap();
        assert_eq!(c.c, [1.0 / 12.0, -1.0 / 24.0, -1.0 / 720.0, 1.0 / 120.0, -1.0 / 240.0, 1.0 / 60.0]);
        assert!((c.k[4] - 11.0 / 720.0).abs() < 1e-17);
        assert!(c.k[5].abs() < 1e-17);
    }

    #[test]
    fn two_stage_quarter() {
        let c = stage_coefficients(Family::TwoStage, &[0.25]).unwrap();
        assert!((c.c[0] - 1.0 / 48.0).abs() < 1e-16);
        assert!((c.c[1] - (-1.0 / 96.0)).abs() < 1e-16);
        // Step-size convention: scaled by 4 (order h²) and 16 (order h⁴), these are the Verlet values.
        let v = stage_coefficients(Family::Verlet, &[]).unwrap();
        for i in 0..2 {
            assert!((4.0 * c.c[i] - v.c[i]).abs() < 1e-15);
        }
        for i in 2..6 {
            assert!((16.0 * c.c[i] - v.c[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn printed_error_metrics() {
        let e2 = error_metric_e(&stage_coefficients(Family::TwoStage, &[0.23061]).unwrap());
        assert!((e2 - 2.720e-4).abs() < 0.5e-7);
        let e3 = error_metric_e(&stage_coefficients(Family::ThreeStage, &[0.355423, 0.184569]).unwrap());
        assert!((e3 - 7.391e-5).abs() < 0.5e-8);
        let e4 = error_metric_e(&stage_coefficients(Family::FourStage, &[0.0840641, 0.0602952, 0.216673]).unwrap());
        assert!((e4 - 7.782e-4).abs() < 0.5e-7, "{e4}");
    }

    #[test]
    fn gaussian_metric_vanishes_at_printed_optimum() {
        let c = stage_coefficients(Family::TwoStage, &[0.230907]).unwrap();
        // Zero up to the rounding of the printed six digits.
        assert!(error_metric_eg(&c) < 1e-8);
        let c = ShadowCoefficients { gamma: [0.3, 0.1, 0.2, 0.2], ..ShadowCoefficients::zero() };
        assert_eq!(error_metric_eg(&c), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(stage_coefficients(Family::TwoStage, &[0.6]).is_err());
        assert!(stage_coefficients(Family::TwoStage, &[0.0]).is_err());
        assert!(stage_coefficients(Family::ThreeStage, &[0.2]).is_err());
    }

    proptest! {
        #[test]
        fn k_and_gamma_relations(a in 0.001f64..0.499, b1 in 0.001f64..0.499, b2 in 0.001f64..0.499) {
            for (fam, p) in [(Family::TwoStage, vec![a]), (Family::ThreeStage, vec![a, b1]), (Family::FourStage, vec![a, b1, b2])] {
                let s = stage_coefficients(fam, &p).unwrap();
                let [c21, c22, c41, c42, c43, c44] = s.c;
                prop_assert_eq!(s.k, [c21, c22, c41, 3.0 * c41 + c42, c41 + c44, 3.0 * c41 + c42 + c43]);
                prop_assert_eq!(s.gamma, [c41, (c44 - c42) / 3.0, c43 / 2.0, c44 / 2.0]);
                prop_assert!((s.c[3] - (2.0 * s.gamma[3] - 3.0 * s.gamma[1])).abs() < 1e-15);
            }
        }
    }
}
