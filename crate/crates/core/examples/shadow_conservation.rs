//! Energy drift of the true and modified Hamiltonians along Verlet trajectories of a
//! harmonic oscillator. The fitted log-log slopes show the order of each quantity.
//!
//! ```text
//! cargo run --release --example shadow_conservation
//! ```

use mmhmc::integrators::{integrate, SplittingScheme};
use mmhmc::model::{true_hamiltonian, MassSpec, PhasePoint};
use mmhmc::models::GaussianTarget;
use mmhmc::shadow::{shadow_value, ShadowMode, ShadowOrder};

/// Largest deviation from the starting value over one unit of time.
fn drift(f: impl Fn(&PhasePoint) -> f64, scheme: &SplittingScheme, model: &GaussianTarget, h: f64) -> f64 {
    let mass = MassSpec::Identity;
    let mut x = PhasePoint::new(vec![1.0], vec![0.3]).unwrap();
    let h0 = f(&x);
    let mut worst: f64 = 0.0;
    for _ in 0..(1.0 / h).round() as usize {
        x = integrate(scheme, model, &mass, &x, h, 1, None).unwrap();
        worst = worst.max((f(&x) - h0).abs());
    }
    worst
}

fn slope(hs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / lx.len() as f64, ly.iter().sum::<f64>() / ly.len() as f64);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn main() -> mmhmc::Result<()> {
    let model = GaussianTarget::standard(1);
    let scheme = SplittingScheme::verlet();
    let mass = MassSpec::Identity;
    let hs = [0.01, 0.02, 0.05, 0.1, 0.2];
    let columns: [(&str, Option<ShadowOrder>); 4] = [
        ("H", None),
        ("H4", Some(ShadowOrder::new(4, ShadowMode::Analytic)?)),
        ("H6", Some(ShadowOrder::new(6, ShadowMode::Analytic)?)),
        ("H6 numeric", Some(ShadowOrder::new(6, ShadowMode::Numeric)?)),
    ];
    println!("{:<12}{}", "h", hs.map(|h| format!("{h:>12}")).concat());
    for (name, order) in columns {
        let ys: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let f = |x: &PhasePoint| match order {
                    None => true_hamiltonian(x, &model, &mass).unwrap(),
                    Some(o) => shadow_value(x, &scheme, o, &model, &mass, h).unwrap().shadow(),
                };
                drift(f, &scheme, &model, h)
            })
            .collect();
        let row: String = ys.iter().map(|y| format!("{y:>12.3e}")).collect();
        println!("{name:<12}{row}   slope {:.2}", slope(&hs, &ys));
    }
    Ok(())
}
