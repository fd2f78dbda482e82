//! Machine-readable report shapes shared by the CLI and the demo.
//!
//! Exact scalars render as `p/q` in lowest terms (integers without the
//! denominator); float scalars use Rust's shortest round-trip decimal form.
//! Re-parsing a rendered value reproduces it exactly in either mode.

use serde::{Deserialize, Serialize};

use crate::hahn::HahnBasis;
use crate::mat::Mat;
use crate::oracle::OracleReport;
use crate::scalar::Scalar;

/// Row-major CSV of a square matrix.
pub fn matrix_csv<S: Scalar>(m: &Mat<S>) -> String {
    let mut out = String::new();
    for i in 1..=m.n() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Hahn value table as CSV: header, then one row per j with q_r(j) in
/// column r, and a final row of the squared norms π_r².
pub fn hahn_csv<S: Scalar>(basis: &HahnBasis<S>) -> String {
    let n = basis.n();
    let mut out = String::from("j");
    for r in 0..n {
        out.push_str(&format!(",q{r}"));
    }
    out.push('\n');
    for j in 1..=n {
        out.push_str(&j.to_string());
        for r in 0..n {
            out.push_str(&format!(",{}", basis.q_value(r, j)));
        }
        out.push('\n');
    }
    out.push_str("pi_sq");
    for r in 0..n {
        out.push_str(&format!(",{}", basis.pi_sq(r)));
    }
    out.push('\n');
    out
}

/// One spectrum line: closed form versus numeric eigenvalue.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub n: usize,
    pub theta: String,
    pub r: usize,
    pub mu_closed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_numeric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_err: Option<f64>,
}

/// One identity-suite line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub identity: String,
    pub params: String,
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
}

/// Serializable form of an exhaustive-oracle comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleRecord {
    pub n: usize,
    pub theta: String,
    pub a: Vec<String>,
    pub mean_exact: String,
    pub var_exact: String,
    pub mean_formula: String,
    pub var_formula: String,
    pub agree: bool,
}

impl<S: Scalar> OracleReport<S> {
    pub fn to_record(&self) -> OracleRecord {
        OracleRecord {
            n: self.n,
            theta: self.theta.to_string(),
            a: self.a.values().iter().map(|v| v.to_string()).collect(),
            mean_exact: self.mean_exact.to_string(),
            var_exact: self.var_exact.to_string(),
            mean_formula: self.mean_formula.to_string(),
            var_formula: self.var_formula.to_string(),
            agree: self.agree,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ThetaParam, ThetaTable};
    use crate::spectral::build_kernel;
    use num_rational::BigRational;

    #[test]
    fn kernel_csv_renders_rationals() {
        let theta = ThetaParam::<BigRational>::parse("2").unwrap();
        let t = ThetaTable::new(theta, 2);
        let k = build_kernel(&t, 2).unwrap();
        assert_eq!(matrix_csv(k.mat()), "-1/3,-2/3\n-2/3,-1/3\n");
    }

    #[test]
    fn spectrum_record_round_trips() {
        let rec = SpectrumRecord {
            n: 5,
            theta: "7/3".into(),
            r: 2,
            mu_closed: "3/70".into(),
            mu_numeric: Some(0.04285714285714286),
            abs_err: Some(1.4e-17),
        };
        let line = serde_json::to_string(&rec).unwrap();
        let back: SpectrumRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back.mu_closed, rec.mu_closed);
        assert_eq!(back.mu_numeric, rec.mu_numeric);
    }
}
