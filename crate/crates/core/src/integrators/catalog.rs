use crate::error::{Error, Result};
use crate::integrators::scheme::{Family, SplittingScheme};

/// A catalogued coefficient set.
#[derive(Debug, Clone)]
pub struct NamedScheme {
    pub name: &'static str,
    pub scheme: SplittingScheme,
}

const ENTRIES: &[(&str, Family, &[f64])] = &[
    ("verlet", Family::Verlet, &[]),
    ("bcss", Family::TwoStage, &[0.21178]),
    ("me", Family::TwoStage, &[0.193183]),
    ("m_bcss", Family::TwoStage, &[0.238016]),
    ("m_me", Family::TwoStage, &[0.23061]),
    ("m_me3", Family::ThreeStage, &[0.355423, 0.184569]),
    ("m_me4", Family::FourStage, &[0.0840641, 0.0602952, 0.216673]),
    ("m_me_g", Family::TwoStage, &[0.230907]),
    ("m_me3_g", Family::ThreeStage, &[0.39263, 0.199778]),
    ("m_me4_g", Family::FourStage, &[0.441252, 0.266011, 0.181055]),
];

/// All named schemes.
pub fn catalog() -> Vec<NamedScheme> {
    ENTRIES
        .iter()
        .map(|(name, family, params)| NamedScheme {
            name,
            scheme: SplittingScheme::new(*family, params).expect("catalog entries are valid"),
        })
        .collect()
}

/// Resolves a catalog name (case-insensitive, `-` or `_`) or an explicit
/// `family:p1,p2,...` specification such as `three_stage:0.3,0.2`.
pub fn lookup(spec: &str) -> Result<SplittingScheme> {
    let norm = spec.trim().to_ascii_lowercase().replace('-', "_");
    if let Some((fam, params)) = norm.split_once(':') {
        let family = match fam {
            "verlet" => Family::Verlet,
            "two_stage" | "2" => Family::TwoStage,
            "three_stage" | "3" => Family::ThreeStage,
            "four_stage" | "4" => Family::FourStage,
            other => return Err(Error::InvalidArgument(format!("unknown integrator family `{other}`"))),
        };
        let values = params
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad coefficient `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        return SplittingScheme::new(family, &values);
    }
    catalog()
        .into_iter()
        .find(|e| e.name == norm)
        .map(|e| e.scheme)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown integrator `{spec}`")))
}

/// The catalog as CSV: name, family, parameters, `c`-vector and `k`-vector.
pub fn catalog_csv() -> String {
    let mut out = String::from("name,family,params,c21,c22,c41,c42,c43,c44,k21,k22,k41,k42,k43,k44\n");
    for e in catalog() {
        let params: Vec<String> = e.scheme.params().iter().map(|p| p.to_string()).collect();
        let co = e.scheme.coefficients();
        let nums: Vec<String> = co.c.iter().chain(co.k.iter()).map(|v| format!("{v:.17e}")).collect();
        out.push_str(&format!("{},{},{},{}\n", e.name, e.scheme.family(), params.join(";"), nums.join(",")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_specs_resolve() {
        assert_eq!(lookup("M-BCSS").unwrap().params(), &[0.238016]);
        assert_eq!(lookup("three_stage:0.3,0.2").unwrap().params(), &[0.3, 0.2]);
        assert_eq!(lookup("verlet").unwrap().family(), Family::Verlet);
        assert!(lookup("nope").is_err());
        assert!(lookup("two_stage:0.7").is_err());
    }

    #[test]
    fn csv_has_one_row_per_entry() {
        let csv = catalog_csv();
        assert_eq!(csv.lines().count(), catalog().len() + 1);
        assert!(csv.lines().all(|l| l.split(',').count() == 15));
    }
}
