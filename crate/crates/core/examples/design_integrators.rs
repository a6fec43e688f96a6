//! Minimizes the integrator design objectives for each multi-stage family and prints the
//! named coefficient catalog.
//!
//! ```text
//! cargo run --release --example design_integrators
//! ```

use mmhmc::integrators::{catalog_csv, minimize_design_metric, DesignObjective, Family, RhoTarget};

fn main() -> mmhmc::Result<()> {
    println!("{:<10} {:<8} {:<32} {:>12}", "objective", "stages", "coefficients", "value");
    let objectives = [("E", DesignObjective::E), ("EG", DesignObjective::EG)];
    for family in [Family::TwoStage, Family::ThreeStage, Family::FourStage] {
        for (name, obj) in objectives {
            let r = minimize_design_metric(obj, family, None)?;
            let params: Vec<String> = r.params.iter().map(|p| format!("{p:.6}")).collect();
            println!("{name:<10} {:<8} {:<32} {:>12.4e}", family.n_stages(), params.join(", "), r.value);
        }
    }
    for (name, target) in [("rho", RhoTarget::Modified), ("rho_true", RhoTarget::True)] {
        let r = minimize_design_metric(DesignObjective::Rho(target), Family::TwoStage, Some(2.0))?;
        println!("{name:<10} {:<8} {:<32} {:>12.4e}", 2, format!("{:.6}", r.params[0]), r.value);
    }
    println!("\n{}", catalog_csv());
    Ok(())
}
