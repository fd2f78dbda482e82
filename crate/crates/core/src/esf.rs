//! The Ewens measure on cycle types and closed-form moments of additive
//! statistics.
//!
//! A permutation's cycle vector s̄ = (s₁,…,sₙ) has probability
//!
//! ν(s̄) = 1{ℓ(s̄)=n} Θ(n)⁻¹ ∏ⱼ (θ/j)^{sⱼ}/sⱼ!,   ℓ(s̄) = 1s₁+⋯+nsₙ,
//!
//! and an additive statistic h = Σ aⱼ kⱼ has mean
//! A = θ Σ (aⱼ/j)Θ(n−j)/Θ(n) and variance D = θB + θ²Δ with
//! B = Σ (aⱼ²/j)Θ(n−j)/Θ(n) and
//! Δ = Σ_{i+j≤n} (aᵢaⱼ/ij)Θ(n−i−j)/Θ(n) − (A/θ)².

use crate::error::Error;
use crate::scalar::{factorial, pow_usize, Scalar, ThetaTable};

/// Cycle-count vector s̄ = (s₁,…,sₙ).
///
/// The constraint ℓ(s̄) = n holds exactly when the vector is a permutation's
/// cycle type; off-surface vectors are representable and carry probability 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleType {
    counts: Vec<usize>,
}

impl CycleType {
    pub fn new(counts: Vec<usize>) -> Self {
        CycleType { counts }
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// w(σ) = Σ sⱼ, the total number of cycles.
    pub fn cycle_count(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Weighted length ℓ(s̄) = 1s₁ + 2s₂ + ⋯ + nsₙ.
pub fn ell(s: &CycleType) -> usize {
    s.counts
        .iter()
        .enumerate()
        .map(|(idx, &c)| (idx + 1) * c)
        .sum()
}

/// Coefficient vector ā of an additive statistic h(σ) = Σ aⱼ kⱼ(σ).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<S> {
    a: Vec<S>,
}

impl<S: Scalar> WeightVector<S> {
    pub fn new(a: Vec<S>) -> Self {
        WeightVector { a }
    }

    /// The j-th unit vector (1-based).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut a = vec![S::zero(); n];
        a[j - 1] = S::one();
        WeightVector { a }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn values(&self) -> &[S] {
        &self.a
    }

    /// aⱼ, 1-based.
    pub fn get(&self, j: usize) -> &S {
        &self.a[j - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|v| v.is_zero())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.a.iter().map(|v| v.to_f64()).collect()
    }

    /// Parse one value per line; blank lines and `#` comments are skipped.
    pub fn parse_lines(text: &str) -> Result<Self, Error> {
        let mut a = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            a.push(S::parse_text(line)?);
        }
        Ok(WeightVector { a })
    }
}

fn check_dim(n: usize, got: usize) -> Result<(), Error> {
    if n == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: n, got })
    }
}

fn check_n2(n: usize) -> Result<(), Error> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::NTooSmall { n })
    }
}

/// Ewens Sampling Formula: the probability of the cycle type s̄ under ν.
/// Returns exactly 0 off the constraint surface ℓ(s̄) = n.
pub fn esf_probability<S: Scalar>(t: &ThetaTable<S>, n: usize, s: &CycleType) -> S {
    if s.n() != n || ell(s) != n {
        return S::zero();
    }
    let mut acc = S::one();
    for (idx, &sj) in s.counts().iter().enumerate() {
        if sj == 0 {
            continue;
        }
        let j = idx as i64 + 1;
        let ratio = t.theta().clone() / S::from_int(j);
        acc = acc * pow_usize(&ratio, sj) / factorial::<S>(sj);
    }
    acc / t.get(n as i64)
}

/// h(s̄) = Σ aⱼ sⱼ.
pub fn additive_value<S: Scalar>(a: &WeightVector<S>, s: &CycleType) -> Result<S, Error> {
    check_dim(a.n(), s.n())?;
    let mut acc = S::zero();
    for (aj, &sj) in a.values().iter().zip(s.counts()) {
        if sj != 0 {
            acc = acc + aj.clone() * S::from_int(sj as i64);
        }
    }
    Ok(acc)
}

/// Mean A = θ Σ_{j≤n} (aⱼ/j) Θ(n−j)/Θ(n).
pub fn mean_a<S: Scalar>(t: &ThetaTable<S>, n: usize, a: &WeightVector<S>) -> Result<S, Error> {
    check_dim(n, a.n())?;
    let mut sum = S::zero();
    for j in 1..=n {
        sum = sum + a.get(j).clone() / S::from_int(j as i64) * t.get((n - j) as i64);
    }
    Ok(t.theta().clone() * sum / t.get(n as i64))
}

/// B = Σ_{j≤n} (aⱼ²/j) Θ(n−j)/Θ(n); strictly positive for ā ≠ 0.
pub fn b_form<S: Scalar>(t: &ThetaTable<S>, n: usize, a: &WeightVector<S>) -> Result<S, Error> {
    check_n2(n)?;
    check_dim(n, a.n())?;
    let mut sum = S::zero();
    for j in 1..=n {
        let aj = a.get(j).clone();
        sum = sum + aj.clone() * aj / S::from_int(j as i64) * t.get((n - j) as i64);
    }
    Ok(sum / t.get(n as i64))
}

/// Δ = Σ_{i+j≤n} (aᵢaⱼ/ij) Θ(n−i−j)/Θ(n) − (Σ (aⱼ/j) Θ(n−j)/Θ(n))².
pub fn delta_form<S: Scalar>(t: &ThetaTable<S>, n: usize, a: &WeightVector<S>) -> Result<S, Error> {
    check_n2(n)?;
    check_dim(n, a.n())?;
    let theta_n = t.get(n as i64);
    let mut cross = S::zero();
    for i in 1..=n {
        for j in 1..=(n - i) {
            cross = cross
                + a.get(i).clone() * a.get(j).clone() / S::from_int((i * j) as i64)
                    * t.get((n - i - j) as i64);
        }
    }
    let mut first = S::zero();
    for j in 1..=n {
        first = first + a.get(j).clone() / S::from_int(j as i64) * t.get((n - j) as i64);
    }
    let mean_over_theta = first / theta_n.clone();
    Ok(cross / theta_n - mean_over_theta.clone() * mean_over_theta)
}

/// Variance D = θB + θ²Δ.
pub fn variance_d<S: Scalar>(t: &ThetaTable<S>, n: usize, a: &WeightVector<S>) -> Result<S, Error> {
    let theta = t.theta().clone();
    let b = b_form(t, n, a)?;
    let delta = delta_form(t, n, a)?;
    Ok(theta.clone() * b + theta.clone() * theta * delta)
}

/// Var kⱼ under ν, realized as the variance of the j-th unit weight vector.
pub fn var_kj<S: Scalar>(t: &ThetaTable<S>, n: usize, j: usize) -> Result<S, Error> {
    if j < 1 || j > n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    variance_d(t, n, &WeightVector::unit(n, j))
}

/// Diagnostic pair (Σ aⱼ² Var kⱼ − θB, n^{−(1∧θ)} B).
///
/// Reported, not asserted: the cited bound has an unspecified absolute
/// constant. For θ < 1 in exact mode the scale n^{−θ} is irrational and is
/// carried as the exact image of its f64 approximation.
pub fn sum_var_gap<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    a: &WeightVector<S>,
) -> Result<(S, S), Error> {
    check_n2(n)?;
    check_dim(n, a.n())?;
    let mut lhs = S::zero();
    for j in 1..=n {
        let aj = a.get(j).clone();
        lhs = lhs + aj.clone() * aj * var_kj(t, n, j)?;
    }
    let b = b_form(t, n, a)?;
    let gap = lhs - t.theta().clone() * b.clone();
    let scale = if *t.theta() >= S::one() {
        b / S::from_int(n as i64)
    } else {
        b * S::from_f64((n as f64).powf(-t.theta().to_f64()))
    };
    Ok((gap, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ThetaParam;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn table(p: i64, d: i64, cap: usize) -> ThetaTable<Q> {
        ThetaTable::new(ThetaParam::new(q(p, d)).unwrap(), cap)
    }

    fn wv(vals: &[(i64, i64)]) -> WeightVector<Q> {
        WeightVector::new(vals.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn ell_examples() {
        assert_eq!(ell(&CycleType::new(vec![4, 0, 0, 0])), 4);
        assert_eq!(ell(&CycleType::new(vec![0, 0, 0, 1])), 4);
        assert_eq!(ell(&CycleType::new(vec![1, 0, 1, 0])), 4);
    }

    #[test]
    fn esf_probability_uniform_s2() {
        let t = table(1, 1, 2);
        let id = CycleType::new(vec![2, 0]);
        let swap = CycleType::new(vec![0, 1]);
        assert_eq!(esf_probability(&t, 2, &id), q(1, 2));
        assert_eq!(esf_probability(&t, 2, &swap), q(1, 2));
        // off the constraint surface
        assert_eq!(esf_probability(&t, 2, &CycleType::new(vec![1, 1])), q(0, 1));
    }

    #[test]
    fn additive_value_examples() {
        let s = CycleType::new(vec![2, 0]);
        assert_eq!(additive_value(&wv(&[(1, 1), (1, 1)]), &s).unwrap(), q(2, 1));
        let single = CycleType::new(vec![0, 1]);
        assert_eq!(
            additive_value(&wv(&[(5, 1), (7, 2)]), &single).unwrap(),
            q(7, 2)
        );
        assert_eq!(
            additive_value(&wv(&[(-2, 1), (2, 1)]), &s).unwrap(),
            q(-4, 1)
        );
        assert!(additive_value(&wv(&[(1, 1)]), &s).is_err());
    }

    #[test]
    fn mean_examples() {
        let t = table(1, 1, 2);
        assert_eq!(mean_a(&t, 2, &wv(&[(0, 1), (0, 1)])).unwrap(), q(0, 1));
        assert_eq!(mean_a(&t, 2, &wv(&[(1, 1), (0, 1)])).unwrap(), q(1, 1));
        assert_eq!(mean_a(&t, 2, &wv(&[(-2, 1), (2, 1)])).unwrap(), q(-1, 1));
    }

    #[test]
    fn b_form_examples() {
        let t = table(1, 1, 2);
        assert_eq!(b_form(&t, 2, &wv(&[(0, 1), (0, 1)])).unwrap(), q(0, 1));
        assert_eq!(b_form(&t, 2, &wv(&[(-2, 1), (2, 1)])).unwrap(), q(6, 1));
        let t2 = table(2, 1, 2);
        assert_eq!(b_form(&t2, 2, &wv(&[(1, 1), (1, 1)])).unwrap(), q(5, 6));
    }

    #[test]
    fn delta_form_examples() {
        let t = table(1, 1, 2);
        assert_eq!(delta_form(&t, 2, &wv(&[(0, 1), (0, 1)])).unwrap(), q(0, 1));
        assert_eq!(delta_form(&t, 2, &wv(&[(1, 1), (0, 1)])).unwrap(), q(0, 1));
        assert_eq!(delta_form(&t, 2, &wv(&[(-2, 1), (2, 1)])).unwrap(), q(3, 1));
    }

    #[test]
    fn variance_examples() {
        let t = table(1, 1, 2);
        assert_eq!(variance_d(&t, 2, &wv(&[(0, 1), (0, 1)])).unwrap(), q(0, 1));
        // exhaustive S_2: h = (a₁k₁ + a₂k₂) takes −4 and 2 with probability 1/2 each
        assert_eq!(variance_d(&t, 2, &wv(&[(-2, 1), (2, 1)])).unwrap(), q(9, 1));
        assert!(variance_d(&t, 1, &wv(&[(1, 1)])).is_err());
    }

    #[test]
    fn var_kj_examples() {
        let t = table(1, 1, 2);
        assert_eq!(var_kj(&t, 2, 1).unwrap(), q(1, 1));
        assert_eq!(var_kj(&t, 2, 2).unwrap(), q(1, 4));
        assert!(var_kj(&t, 2, 3).is_err());
        // k_n is an indicator with p = θ/(nΘ(n))
        for (p, d, n) in [(1i64, 1i64, 5usize), (2, 1, 6), (1, 2, 4)] {
            let t = table(p, d, n);
            let prob = t.theta().clone() / (Q::from_int(n as i64) * t.get(n as i64));
            let expect = prob.clone() * (Q::from_int(1) - prob);
            assert_eq!(var_kj(&t, n, n).unwrap(), expect);
        }
    }

    #[test]
    fn sum_var_gap_examples() {
        let t = table(1, 1, 2);
        let z = wv(&[(0, 1), (0, 1)]);
        assert_eq!(sum_var_gap(&t, 2, &z).unwrap(), (q(0, 1), q(0, 1)));
        assert_eq!(
            sum_var_gap(&t, 2, &wv(&[(1, 1), (0, 1)])).unwrap(),
            (q(0, 1), q(1, 2))
        );
        assert_eq!(
            sum_var_gap(&t, 2, &wv(&[(0, 1), (1, 1)])).unwrap(),
            (q(-1, 4), q(1, 4))
        );
    }

    #[test]
    fn sum_var_gap_small_theta_scale() {
        // θ < 1: the reported scale is B·n^{−θ}, carried via its f64 image
        let t = table(1, 2, 6);
        let a = wv(&[(1, 1), (0, 1), (2, 1), (0, 1), (0, 1), (1, 3)]);
        let (_, scale) = sum_var_gap(&t, 6, &a).unwrap();
        let b = b_form(&t, 6, &a).unwrap();
        let expect = b.to_f64() * 6f64.powf(-0.5);
        assert!((scale.to_f64() - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn weight_vector_parse_lines() {
        let parsed = WeightVector::<Q>::parse_lines("1/2\n\n# comment\n-3\n").unwrap();
        assert_eq!(parsed, wv(&[(1, 2), (-3, 1)]));
        assert!(WeightVector::<Q>::parse_lines("0.25\n").is_err());
    }
}
