use crate::error::{Error, Result};

/// Which energy error the bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoTarget {
    /// Expected error in the modified Hamiltonian (two-stage family).
    Modified,
    /// Expected error in the true Hamiltonian, as used by HMC.
    True,
}

fn parts(h: f64, b: f64, target: RhoTarget) -> (f64, [f64; 5]) {
    let h2 = h * h;
    match target {
        RhoTarget::Modified => {
            let inner = b * (12.0 + 4.0 * b * (6.0 * b - 5.0) + b * (1.0 + 4.0 * b * (3.0 * b - 2.0)) * h2) - 2.0;
            let num = h2.powi(4) * inner * inner;
            let f = [
                2.0 - b * h2,
                4.0 + (2.0 * b - 1.0) * h2,
                2.0 + b * (2.0 * b - 1.0) * h2,
                12.0 + (6.0 * b - 1.0) * h2,
                6.0 + (1.0 + 6.0 * (b - 1.0) * b) * h2,
            ];
            (num / 4.0, f)
        }
        RhoTarget::True => {
            let inner = b * b * (1.0 - 2.0 * b) * h2 + 4.0 * b * b - 6.0 * b + 1.0;
            let num = h2 * h2 * inner * inner;
            let f = [2.0 - b * h2, 4.0 - (1.0 - 2.0 * b) * h2, 2.0 - b * (1.0 - 2.0 * b) * h2, 1.0, 1.0];
            (num / 2.0, f)
        }
    }
}

/// Upper bound `ρ(h, b)` on the expected energy error of the two-stage family.
///
/// Errors when any denominator factor is not positive (the step is past stability).
pub fn rho_bound(h: f64, b: f64, target: RhoTarget) -> Result<f64> {
    if !(b > 0.0 && b < 0.5) {
        return Err(Error::InvalidArgument(format!("b = {b} outside (0, 1/2)")));
    }
    let (num, factors) = parts(h, b, target);
    if factors.iter().any(|f| !(*f > 0.0)) {
        return Err(Error::Domain(format!("h = {h} is beyond the stability limit for b = {b}")));
    }
    Ok(num / factors.iter().product::<f64>())
}

/// As [`rho_bound`] but `+∞` outside the domain, so maxima stay well defined.
pub fn rho_guarded(h: f64, b: f64, target: RhoTarget) -> f64 {
    rho_bound(h, b, target).unwrap_or(f64::INFINITY)
}

/// `max_{0<h<h̄} ρ(h, b)`: a dense grid followed by golden-section refinement of the best cell.
pub fn rho_max(b: f64, hbar: f64, target: RhoTarget) -> f64 {
    const N: usize = 400;
    let step = hbar / N as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 1..=N {
        let h = i as f64 * step;
        let v = rho_guarded(h, b, target);
        if v == f64::INFINITY {
            return v;
        }
        if v > best.1 {
            best = (h, v);
        }
    }
    let lo = (best.0 - step).max(1e-12);
    let hi = (best.0 + step).min(hbar);
    let (_, v) = super::design::golden_section(|h| -rho_guarded(h, b, target), lo, hi, 1e-12);
    best.1.max(-v)
}
