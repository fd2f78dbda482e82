//! Browser demo for the Ewens variance bound.
//!
//! Three interactive operations are exported to JavaScript, each returning a
//! JSON payload for the static page in `www/`:
//!
//! - [`spectrum_json`]: closed-form spectrum μᵣ, the sharp constant
//!   (θ+2)/(θ+1), and the extremal weight vector, with the exact Rayleigh
//!   verdict when θ is rational;
//! - [`tau_curve_json`]: the curve θ ↦ (θ+2)/(θ+1);
//! - [`crp_histogram_json`]: seeded Chinese-restaurant draws versus the
//!   exact cycle-count distribution and the exact means E kⱼ.
//!
//! The payload builders are ordinary Rust functions (`demo` module), so they
//! are testable off-wasm; the `#[wasm_bindgen]` exports are thin wrappers.

use wasm_bindgen::prelude::*;

pub mod demo {
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde::Serialize;

    use ewens_core::error::Error;
    use ewens_core::esf::{esf_probability, mean_a, WeightVector};
    use ewens_core::oracle::{crp_sample, enumerate_cycle_types};
    use ewens_core::scalar::{Scalar, ThetaParam, ThetaTable};
    use ewens_core::spectral::{extremal_a, mu_closed, rayleigh_ratio, tau_closed};

    #[derive(Serialize)]
    struct MuEntry {
        r: usize,
        value: f64,
        text: String,
    }

    #[derive(Serialize)]
    struct SpectrumPayload {
        n: usize,
        theta: String,
        mode: &'static str,
        tau: f64,
        tau_text: String,
        mu: Vec<MuEntry>,
        extremal: Vec<f64>,
        rayleigh: f64,
        /// exact equality of the Rayleigh quotient with (θ+2)/(θ+1);
        /// in float mode a 1e-12 relative comparison
        sharp: bool,
    }

    fn spectrum_payload<S: Scalar>(n: usize, theta: ThetaParam<S>) -> Result<String, Error> {
        let t = ThetaTable::new(theta.clone(), n);
        let tau = tau_closed(&theta);
        let a = extremal_a(&theta, n);
        let ratio = rayleigh_ratio(&t, n, &a)?;
        let sharp = if S::EXACT {
            ratio == tau
        } else {
            (ratio.to_f64() - tau.to_f64()).abs() <= 1e-12 * tau.to_f64()
        };
        let payload = SpectrumPayload {
            n,
            theta: theta.to_string(),
            mode: S::MODE,
            tau: tau.to_f64(),
            tau_text: tau.to_string(),
            mu: (1..=n)
                .map(|r| {
                    let v = mu_closed(r, &theta);
                    MuEntry {
                        r,
                        value: v.to_f64(),
                        text: v.to_string(),
                    }
                })
                .collect(),
            extremal: a.to_f64(),
            rayleigh: ratio.to_f64(),
            sharp,
        };
        Ok(serde_json::to_string(&payload).expect("serialize"))
    }

    /// Spectrum, sharp constant and extremal vector at one (n, θ).
    /// θ given as `p/q` or an integer runs exactly; a decimal runs in f64.
    pub fn spectrum(n: usize, theta_text: &str) -> Result<String, Error> {
        if n < 2 {
            return Err(Error::NTooSmall { n });
        }
        if theta_text.contains('.') || theta_text.contains('e') || theta_text.contains('E') {
            spectrum_payload(n, ThetaParam::<f64>::parse(theta_text)?)
        } else {
            spectrum_payload(n, ThetaParam::<BigRational>::parse(theta_text)?)
        }
    }

    #[derive(Serialize)]
    struct TauPoint {
        theta: f64,
        tau: f64,
    }

    /// Sample the curve θ ↦ (θ+2)/(θ+1) on a log-friendly linear grid.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn tau_curve(theta_min: f64, theta_max: f64, points: usize) -> Result<String, Error> {
        if !(theta_min > 0.0) || !(theta_max > theta_min) || points < 2 {
            return Err(Error::ThetaNotPositive {
                text: format!("curve range [{theta_min}, {theta_max}]"),
            });
        }
        let step = (theta_max - theta_min) / (points - 1) as f64;
        let pts: Vec<TauPoint> = (0..points)
            .map(|i| {
                let theta = theta_min + step * i as f64;
                TauPoint {
                    theta,
                    tau: (theta + 2.0) / (theta + 1.0),
                }
            })
            .collect();
        Ok(serde_json::to_string(&pts).expect("serialize"))
    }

    #[derive(Serialize)]
    struct HistogramPayload {
        n: usize,
        theta: f64,
        count: usize,
        seed: u64,
        /// empirical frequency of w(σ) = k cycles, index k−1
        observed_w: Vec<f64>,
        /// exact P(w = k) from the Ewens formula, index k−1
        exact_w: Vec<f64>,
        /// empirical mean of k_j, index j−1
        observed_kj: Vec<f64>,
        /// exact E k_j, index j−1
        exact_kj: Vec<f64>,
    }

    /// Seeded CRP draws against the exact cycle-count distribution.
    pub fn crp_histogram(n: usize, theta: f64, count: usize, seed: u64) -> Result<String, Error> {
        if count == 0 {
            return Err(Error::CountTooSmall { count, min: 1 });
        }
        let theta_param = ThetaParam::<f64>::new(theta)?;
        let t = ThetaTable::new(theta_param, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut observed_w = vec![0usize; n];
        let mut kj_sums = vec![0f64; n];
        for _ in 0..count {
            let draw = crp_sample(n, theta, &mut rng);
            observed_w[draw.cycle_count() - 1] += 1;
            for (j, &s) in draw.counts().iter().enumerate() {
                kj_sums[j] += s as f64;
            }
        }
        let mut exact_w = vec![0f64; n];
        for s in enumerate_cycle_types(n)? {
            exact_w[s.cycle_count() - 1] += esf_probability(&t, n, &s);
        }
        let exact_kj: Vec<f64> = (1..=n)
            .map(|j| mean_a(&t, n, &WeightVector::unit(n, j)))
            .collect::<Result<_, _>>()?;
        let payload = HistogramPayload {
            n,
            theta,
            count,
            seed,
            observed_w: observed_w
                .iter()
                .map(|&c| c as f64 / count as f64)
                .collect(),
            exact_w,
            observed_kj: kj_sums.iter().map(|s| s / count as f64).collect(),
            exact_kj,
        };
        Ok(serde_json::to_string(&payload).expect("serialize"))
    }
}

fn to_js<T>(result: Result<T, ewens_core::error::Error>) -> Result<T, JsValue> {
    result.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn spectrum_json(n: usize, theta_text: &str) -> Result<String, JsValue> {
    to_js(demo::spectrum(n, theta_text))
}

#[wasm_bindgen]
pub fn tau_curve_json(theta_min: f64, theta_max: f64, points: usize) -> Result<String, JsValue> {
    to_js(demo::tau_curve(theta_min, theta_max, points))
}

#[wasm_bindgen]
pub fn crp_histogram_json(
    n: usize,
    theta: f64,
    count: usize,
    seed: u64,
) -> Result<String, JsValue> {
    to_js(demo::crp_histogram(n, theta, count, seed))
}

#[cfg(test)]
mod tests {
    use super::demo;
    use serde_json::Value;

    #[test]
    fn spectrum_payload_exact_mode() {
        let text = demo::spectrum(6, "1").unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["mode"], "exact");
        assert_eq!(v["tau_text"], "3/2");
        assert_eq!(v["sharp"], true);
        assert_eq!(v["mu"].as_array().unwrap().len(), 6);
        assert_eq!(v["mu"][1]["text"], "1/2");
        // extremal a_j = (θ+2)j² − (2n+θ)j at n=6, θ=1: a_1 = 3 − 13
        assert_eq!(v["extremal"][0], -10.0);
    }

    #[test]
    fn spectrum_payload_float_mode() {
        let text = demo::spectrum(5, "0.7").unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["mode"], "float");
        assert!(v["sharp"].as_bool().unwrap());
        assert!(demo::spectrum(1, "1").is_err());
    }

    #[test]
    fn tau_curve_endpoints() {
        let text = demo::tau_curve(1.0, 2.0, 3).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 3);
        assert!((pts[0]["tau"].as_f64().unwrap() - 1.5).abs() < 1e-15);
        assert!((pts[2]["tau"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(demo::tau_curve(0.0, 2.0, 3).is_err());
    }

    #[test]
    fn histogram_is_seed_stable_and_normalized() {
        let a = demo::crp_histogram(6, 1.5, 4000, 9).unwrap();
        let b = demo::crp_histogram(6, 1.5, 4000, 9).unwrap();
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        let exact: f64 = v["exact_w"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .sum();
        assert!((exact - 1.0).abs() < 1e-12);
        let observed: f64 = v["observed_w"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .sum();
        assert!((observed - 1.0).abs() < 1e-12);
    }
}
