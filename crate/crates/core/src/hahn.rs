//! Terminating generalized hypergeometric series, discrete Hahn polynomials,
//! and exact verification of the supporting identities.
//!
//! The series evaluated here are the polynomial cases
//!
//!   ₚ₊₂F_q(−m, −x, (a_p); (b_q); z) = Σ_{k=0}^m (−m)ₖ(−x)ₖ(a₁)ₖ⋯(a_p)ₖ /
//!                                      ((b₁)ₖ⋯(b_q)ₖ k!) · zᵏ,
//!
//! from which the Hahn polynomials Qᵣ(x; α, β, n) = ₃F₂(−r, −x, r+α+β+1;
//! α+1, −n+1; 1) are built. Specializing α = 1, β = θ−1 gives
//! qᵣ(x) = Qᵣ(x−1; 1, θ−1, n), orthogonal under
//! ⟨q_l, q_r⟩ = Σ_{j=1}^n j q_l(j) q_r(j) Θ(n−j) = δ_lr πᵣ².
//!
//! Values are produced by direct exact summation at integer abscissae rather
//! than a three-term recurrence; at the sizes involved this is O(n·r) per
//! value and keeps the definitional ₃F₂ form in view.

use crate::error::Error;
use crate::mat::Mat;
use crate::scalar::{factorial, gen_binomial, rising_factorial, Scalar, ThetaParam, ThetaTable};
use crate::spectral::{build_m_float, GaugeDiag};

/// A terminating series Σ_{k=0}^m (−m)ₖ ∏(upper)ₖ / (∏(lower)ₖ k!) zᵏ.
///
/// The termination order `m` contributes the (−m)ₖ factor; any further
/// nonpositive-integer upper parameters simply truncate the sum earlier.
/// No lower parameter may be a nonpositive integer ≥ −(m−1), else a zero
/// denominator occurs inside the truncated sum.
#[derive(Clone, Debug, PartialEq)]
pub struct PfqSpec<S> {
    pub m: usize,
    pub upper: Vec<S>,
    pub lower: Vec<S>,
    pub z: S,
}

impl<S: Scalar> PfqSpec<S> {
    pub fn new(m: usize, upper: Vec<S>, lower: Vec<S>, z: S) -> Self {
        PfqSpec { m, upper, lower, z }
    }

    /// ₂F₁(−m, b; c; z).
    pub fn f21(m: usize, b: S, c: S, z: S) -> Self {
        PfqSpec::new(m, vec![b], vec![c], z)
    }

    /// ₃F₂(−m, b₁, b₂; c₁, c₂; 1).
    pub fn f32(m: usize, b1: S, b2: S, c1: S, c2: S) -> Self {
        PfqSpec::new(m, vec![b1, b2], vec![c1, c2], S::one())
    }
}

/// Evaluate the finite sum; errors on a zero denominator inside the range.
pub fn pfq<S: Scalar>(spec: &PfqSpec<S>) -> Result<S, Error> {
    let mut total = S::one();
    let mut term = S::one();
    let neg_m = -S::from_int(spec.m as i64);
    for k in 0..spec.m {
        let kf = S::from_int(k as i64);
        let mut step = (neg_m.clone() + kf.clone()) * spec.z.clone();
        for u in &spec.upper {
            step = step * (u.clone() + kf.clone());
        }
        for l in &spec.lower {
            let factor = l.clone() + kf.clone();
            if factor.is_zero() {
                return Err(Error::PfqPole {
                    lower: l.to_string(),
                    term: k + 1,
                });
            }
            step = step / factor;
        }
        term = term * step / S::from_int(k as i64 + 1);
        if term.is_zero() {
            // an upper parameter truncated the series early
            break;
        }
        total = total + term.clone();
    }
    Ok(total)
}

/// Hahn polynomial Qᵣ(x; α, β, n) = ₃F₂(−r, −x, r+α+β+1; α+1, −n+1; 1).
pub fn hahn_q<S: Scalar>(r: usize, x: &S, alpha: &S, beta: &S, n: usize) -> Result<S, Error> {
    let top = S::from_int(r as i64) + alpha.clone() + beta.clone() + S::one();
    let spec = PfqSpec::f32(
        r,
        -x.clone(),
        top,
        alpha.clone() + S::one(),
        S::one() - S::from_int(n as i64),
    );
    pfq(&spec)
}

/// qᵣ(j) = Qᵣ(j−1; 1, θ−1, n) for 1 ≤ j ≤ n, 0 ≤ r ≤ n−1.
pub fn q_poly<S: Scalar>(r: usize, j: usize, theta: &ThetaParam<S>, n: usize) -> Result<S, Error> {
    if j < 1 || j > n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    if r > n - 1 {
        return Err(Error::IndexOutOfRange { index: r, n: n - 1 });
    }
    let x = S::from_int(j as i64 - 1);
    hahn_q(r, &x, &S::one(), &(theta.get().clone() - S::one()), n)
}

/// ⟨q_l, q_r⟩ = Σ_{j=1}^n j q_l(j) q_r(j) Θ(n−j); δ_lr πᵣ² by orthogonality.
pub fn inner_product<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    l: usize,
    r: usize,
) -> Result<S, Error> {
    let mut acc = S::zero();
    for j in 1..=n {
        let ql = q_poly(l, j, t.theta_param(), n)?;
        let qr = q_poly(r, j, t.theta_param(), n)?;
        acc = acc + S::from_int(j as i64) * ql * qr * t.get((n - j) as i64);
    }
    Ok(acc)
}

/// πᵣ² = ⟨qᵣ, qᵣ⟩ > 0.
pub fn pi_norm_sq<S: Scalar>(t: &ThetaTable<S>, n: usize, r: usize) -> Result<S, Error> {
    inner_product(t, n, r, r)
}

/// Value table of q₀,…,q_{n−1} on {1,…,n} together with the norms πᵣ².
#[derive(Clone, Debug)]
pub struct HahnBasis<S> {
    n: usize,
    q: Vec<Vec<S>>,
    pi_sq: Vec<S>,
}

impl<S: Scalar> HahnBasis<S> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn build(t: &ThetaTable<S>, n: usize) -> Result<Self, Error> {
        let mut q = Vec::with_capacity(n);
        for r in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 1..=n {
                row.push(q_poly(r, j, t.theta_param(), n)?);
            }
            q.push(row);
        }
        let mut pi_sq = Vec::with_capacity(n);
        for (r, row) in q.iter().enumerate() {
            let mut acc = S::zero();
            for (j, value) in row.iter().enumerate() {
                acc = acc
                    + S::from_int(j as i64 + 1)
                        * value.clone()
                        * value.clone()
                        * t.get((n - j - 1) as i64);
            }
            // NaN-proof comparison: demand a definite positive
            if !(acc > S::zero()) {
                return Err(Error::IdentityViolation {
                    identity: "pi_norm_positive",
                    detail: format!("pi_{r}^2 = {acc}"),
                });
            }
            pi_sq.push(acc);
        }
        Ok(HahnBasis { n, q, pi_sq })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// qᵣ(j), with 0 ≤ r ≤ n−1 and 1 ≤ j ≤ n.
    pub fn q_value(&self, r: usize, j: usize) -> &S {
        &self.q[r][j - 1]
    }

    pub fn pi_sq(&self, r: usize) -> &S {
        &self.pi_sq[r]
    }

    /// Gram matrix entry ⟨q_l, q_r⟩ from the cached values.
    pub fn gram(&self, t: &ThetaTable<S>, l: usize, r: usize) -> S {
        let n = self.n;
        let mut acc = S::zero();
        for j in 1..=n {
            acc = acc
                + S::from_int(j as i64)
                    * self.q[l][j - 1].clone()
                    * self.q[r][j - 1].clone()
                    * t.get((n - j) as i64);
        }
        acc
    }

    /// True iff the Gram matrix is exactly diagonal.
    pub fn gram_is_diagonal(&self, t: &ThetaTable<S>) -> bool {
        for l in 0..self.n {
            for r in 0..l {
                if !self.gram(t, l, r).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Orthonormal eigenvector ēᵣ of Mₙ (float mode):
/// e_rj = π_{r−1}⁻¹ q_{r−1}(j) √(jΘ(n−j)), 1 ≤ r ≤ n.
///
/// Values are computed in the scalar mode of the table and converted at the
/// end, so exact tables give correctly rounded coordinates.
pub fn eigenbasis_vector<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    r: usize,
) -> Result<Vec<f64>, Error> {
    if r < 1 || r > n {
        return Err(Error::IndexOutOfRange { index: r, n });
    }
    let pi_sq = pi_norm_sq(t, n, r - 1)?;
    let pi = pi_sq.to_f64().sqrt();
    let mut v = Vec::with_capacity(n);
    for j in 1..=n {
        let qv = q_poly(r - 1, j, t.theta_param(), n)?;
        let w = (j as f64 * t.get((n - j) as i64).to_f64()).sqrt();
        v.push(qv.to_f64() * w / pi);
    }
    Ok(v)
}

/// Generalized binomial extended by binom(a, k) = 0 for k < 0, the
/// convention that makes alternating binomial sums collapse to zero when
/// the remaining degree goes negative.
pub fn binom_or_zero<S: Scalar>(a: &S, k: i64) -> S {
    if k < 0 {
        S::zero()
    } else {
        gen_binomial(a, k as usize)
    }
}

/// Both sides of the binomial convolution identity
/// Σ_{k=0}^M C(a+k, k) C(b−k, M−k) = Σ_{k=0}^M C(a+b−k, M−k).
pub fn binomial_convolution_sides<S: Scalar>(a: &S, b: &S, k_max: usize) -> (S, S) {
    let mut lhs = S::zero();
    let mut rhs = S::zero();
    for k in 0..=k_max {
        let kf = S::from_int(k as i64);
        lhs = lhs
            + gen_binomial(&(a.clone() + kf.clone()), k)
                * gen_binomial(&(b.clone() - kf.clone()), k_max - k);
        rhs = rhs + gen_binomial(&(a.clone() + b.clone() - kf), k_max - k);
    }
    (lhs, rhs)
}

/// The convolution identity as an exact-equality check.
pub fn binomial_convolution_check<S: Scalar>(a: &S, b: &S, k_max: usize) -> bool {
    let (lhs, rhs) = binomial_convolution_sides(a, b, k_max);
    lhs == rhs
}

/// Both sides of the alternating binomial identity
/// Σ_{k=0}^M (−1)ᵏ C(M, k) C(a−k, m) = C(a−M, m−M).
pub fn alternating_binomial_sides<S: Scalar>(a: &S, m: usize, k_max: usize) -> (S, S) {
    let mut lhs = S::zero();
    for k in 0..=k_max {
        let term = gen_binomial(&S::from_int(k_max as i64), k)
            * gen_binomial(&(a.clone() - S::from_int(k as i64)), m);
        lhs = if k % 2 == 0 { lhs + term } else { lhs - term };
    }
    let rhs = binom_or_zero(
        &(a.clone() - S::from_int(k_max as i64)),
        m as i64 - k_max as i64,
    );
    (lhs, rhs)
}

/// The alternating identity as an exact-equality check.
pub fn alternating_binomial_check<S: Scalar>(a: &S, m: usize, k_max: usize) -> bool {
    let (lhs, rhs) = alternating_binomial_sides(a, m, k_max);
    lhs == rhs
}

/// The series rearrangement behind the Σᵣ(M) evaluation:
/// Σ_{k=0}^M C(M,k)(α)_{M−k}(β)ₖ · ₚ₊₁F_q(−k, (a_p); (b_q); 1)
///   = (α+β)_M · ₚ₊₂F_{q+1}(−M, β, (a_p); α+β, (b_q); 1).
pub fn series_rearrangement_sides<S: Scalar>(
    k_max: usize,
    alpha: &S,
    beta: &S,
    upper: &[S],
    lower: &[S],
) -> Result<(S, S), Error> {
    let mut lhs = S::zero();
    for k in 0..=k_max {
        let spec = PfqSpec::new(k, upper.to_vec(), lower.to_vec(), S::one());
        let f = pfq(&spec)?;
        lhs = lhs
            + gen_binomial(&S::from_int(k_max as i64), k)
                * rising_factorial(alpha, k_max - k)
                * rising_factorial(beta, k)
                * f;
    }
    let mut aug_upper = vec![beta.clone()];
    aug_upper.extend_from_slice(upper);
    let mut aug_lower = vec![alpha.clone() + beta.clone()];
    aug_lower.extend_from_slice(lower);
    let rhs = rising_factorial(&(alpha.clone() + beta.clone()), k_max)
        * pfq(&PfqSpec::new(k_max, aug_upper, aug_lower, S::one()))?;
    Ok((lhs, rhs))
}

pub fn series_rearrangement_check<S: Scalar>(
    k_max: usize,
    alpha: &S,
    beta: &S,
    upper: &[S],
    lower: &[S],
) -> Result<bool, Error> {
    let (lhs, rhs) = series_rearrangement_sides(k_max, alpha, beta, upper, lower)?;
    Ok(lhs == rhs)
}

/// Σᵣ(M) = Σ_{k=0}^M Qᵣ(k; 1, θ−1, n) Θ(M−k), evaluated directly and
/// cross-asserted against ((θ+1)_M/M!)·₄F₃(−M, 1, −r, r+θ+1; θ+1, 2, 1−n; 1).
/// A mismatch surfaces as an identity-violation error.
pub fn hahn_theta_convolution<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    r: usize,
    m: usize,
) -> Result<S, Error> {
    let (direct, hyper) = hahn_theta_convolution_sides(t, n, r, m)?;
    if direct != hyper {
        return Err(Error::IdentityViolation {
            identity: "hahn_theta_convolution",
            detail: format!("r={r} M={m}: direct {direct} vs series {hyper}"),
        });
    }
    Ok(direct)
}

/// The two routes to Σᵣ(M) without the equality assertion: (direct sum,
/// ₄F₃ evaluation).
pub fn hahn_theta_convolution_sides<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    r: usize,
    m: usize,
) -> Result<(S, S), Error> {
    if r > n - 1 {
        return Err(Error::IndexOutOfRange { index: r, n: n - 1 });
    }
    if m > n - 1 {
        return Err(Error::IndexOutOfRange { index: m, n: n - 1 });
    }
    let theta = t.theta().clone();
    let beta = theta.clone() - S::one();
    let mut direct = S::zero();
    for k in 0..=m {
        let qv = hahn_q(r, &S::from_int(k as i64), &S::one(), &beta, n)?;
        direct = direct + qv * t.get(m as i64 - k as i64);
    }
    let hyper = rising_factorial(&(theta.clone() + S::one()), m) / factorial::<S>(m)
        * pfq(&PfqSpec::new(
            m,
            vec![
                S::one(),
                -S::from_int(r as i64),
                S::from_int(r as i64) + theta.clone() + S::one(),
            ],
            vec![
                theta.clone() + S::one(),
                S::from_int(2),
                S::one() - S::from_int(n as i64),
            ],
            S::one(),
        ))?;
    Ok((direct, hyper))
}

/// Φᵣ(x) = ₃F₂(−r, −n+x, r+θ−1; θ, −n; 1); vanishes at x = 0.
pub fn eigen_image_poly<S: Scalar>(
    theta: &ThetaParam<S>,
    n: usize,
    r: usize,
    x: &S,
) -> Result<S, Error> {
    let th = theta.get().clone();
    pfq(&PfqSpec::f32(
        r,
        x.clone() - S::from_int(n as i64),
        S::from_int(r as i64) + th.clone() - S::one(),
        th,
        -S::from_int(n as i64),
    ))
}

/// Closed form of the image coordinates ȳᵣ = π_{r−1} ēᵣ Mₙ:
/// y_ri = −√(Θ(n−i)/i) · n/(r(r+θ−1)) · Φᵣ(i)  (float mode).
pub fn eigen_image_closed<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    r: usize,
    i: usize,
) -> Result<f64, Error> {
    if r < 1 || r > n {
        return Err(Error::IndexOutOfRange { index: r, n });
    }
    if i < 1 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let th = t.theta().clone();
    let f = eigen_image_poly(t.theta_param(), n, r, &S::from_int(i as i64))?;
    let scale =
        S::from_int(n as i64) / (S::from_int(r as i64) * (S::from_int(r as i64) + th - S::one()));
    let weight = (t.get((n - i) as i64).to_f64() / i as f64).sqrt();
    Ok(-weight * scale.to_f64() * f.to_f64())
}

/// Cross-relation between the two ₃F₂ forms of the eigen-image polynomial:
/// for 1 ≤ i, r ≤ n and θ > 0,
/// (−1)^{r−1} r! i ₃F₂(−r+1, −i+1, r+θ; 2, −n+1; 1)
///   = (θ)_{r−1} n ₃F₂(−r, −n+i, r+θ−1; θ, −n; 1), exactly.
pub fn hyp3f2_relation_sides<S: Scalar>(
    theta: &ThetaParam<S>,
    n: usize,
    i: usize,
    r: usize,
) -> Result<(S, S), Error> {
    let th = theta.get().clone();
    let left_f = pfq(&PfqSpec::f32(
        r - 1,
        S::from_int(1 - i as i64),
        S::from_int(r as i64) + th.clone(),
        S::from_int(2),
        S::from_int(1 - n as i64),
    ))?;
    let sign = if (r - 1).is_multiple_of(2) {
        S::one()
    } else {
        -S::one()
    };
    let lhs = sign * factorial::<S>(r) * S::from_int(i as i64) * left_f;
    let right_f = eigen_image_poly(theta, n, r, &S::from_int(i as i64))?;
    let rhs = rising_factorial(&th, r - 1) * S::from_int(n as i64) * right_f;
    Ok((lhs, rhs))
}

pub fn hyp3f2_relation_check<S: Scalar>(
    theta: &ThetaParam<S>,
    n: usize,
    i: usize,
    r: usize,
) -> Result<bool, Error> {
    let (lhs, rhs) = hyp3f2_relation_sides(theta, n, i, r)?;
    Ok(lhs == rhs)
}

/// Exact r-th forward difference divided by r!, i.e. the leading coefficient
/// of a degree-r polynomial given r+1 consecutive integer samples.
fn leading_from_samples<S: Scalar>(mut samples: Vec<S>) -> S {
    let degree = samples.len() - 1;
    for _ in 0..degree {
        for i in 0..samples.len() - 1 {
            samples[i] = samples[i + 1].clone() - samples[i].clone();
        }
        samples.pop();
    }
    samples.pop().unwrap() / factorial::<S>(degree)
}

/// Verify the leading coefficients used in the eigenbasis argument, by exact
/// finite differencing of the evaluated polynomials:
/// Φᵣ has leading coefficient (−1)ʳ(r+θ−1)ᵣ/((θ)ᵣ(−n)ᵣ), the expansion
/// partner q_{r−1} has (r+θ)_{r−1}/(r!(−n+1)_{r−1}), and their quotient is
/// c_{r−1} = (−1)^{r−1} r!(r+θ−1)/((θ)ᵣ n).
pub fn leading_coeff_sides<S: Scalar>(
    theta: &ThetaParam<S>,
    n: usize,
    r: usize,
) -> Result<[(S, S); 3], Error> {
    if r < 1 || r > n - 1 {
        return Err(Error::IndexOutOfRange { index: r, n: n - 1 });
    }
    let th = theta.get().clone();

    let image_samples = (0..=r)
        .map(|x| eigen_image_poly(theta, n, r, &S::from_int(x as i64)))
        .collect::<Result<Vec<_>, _>>()?;
    let image_lead = leading_from_samples(image_samples);
    let sign = if r.is_multiple_of(2) {
        S::one()
    } else {
        -S::one()
    };
    let image_expect = sign.clone()
        * rising_factorial(&(S::from_int(r as i64) + th.clone() - S::one()), r)
        / (rising_factorial(&th, r) * rising_factorial(&(-S::from_int(n as i64)), r));

    let q_samples = (1..=r)
        .map(|j| q_poly(r - 1, j, theta, n))
        .collect::<Result<Vec<_>, _>>()?;
    let q_lead = leading_from_samples(q_samples);
    let q_expect = rising_factorial(&(S::from_int(r as i64) + th.clone()), r - 1)
        / (factorial::<S>(r) * rising_factorial(&(S::one() - S::from_int(n as i64)), r - 1));

    let c_expect = -sign * factorial::<S>(r) * (S::from_int(r as i64) + th.clone() - S::one())
        / (rising_factorial(&th, r) * S::from_int(n as i64));

    let quotient_check = (image_lead.clone(), c_expect * q_expect.clone());
    Ok([
        (image_lead, image_expect),
        (q_lead, q_expect),
        quotient_check,
    ])
}

pub fn leading_coeff_check<S: Scalar>(
    theta: &ThetaParam<S>,
    n: usize,
    r: usize,
) -> Result<bool, Error> {
    let sides = leading_coeff_sides(theta, n, r)?;
    Ok(sides.iter().all(|(got, expect)| got == expect))
}

/// The last Hahn row in closed form via Chu–Vandermonde:
/// q_{n−1}(j) = (−1)^{j−1}(θ+n−j)_{j−1}/j!.
pub fn q_last_row_closed<S: Scalar>(theta: &ThetaParam<S>, n: usize, j: usize) -> S {
    let mag = rising_factorial(&(theta.get().clone() + S::from_int((n - j) as i64)), j - 1)
        / factorial::<S>(j);
    if (j - 1).is_multiple_of(2) {
        mag
    } else {
        -mag
    }
}

/// Float reconstruction Σᵣ μᵣ ēᵣēᵣᵀ of Mₙ from the eigenbasis; the largest
/// entrywise deviation from the direct build is returned.
pub fn spectral_reconstruction_error<S: Scalar>(t: &ThetaTable<S>, n: usize) -> Result<f64, Error> {
    let m = build_m_float(n, t.theta().to_f64())?;
    let mut recon = Mat::<f64>::zeros(n);
    for r in 1..=n {
        let mu = crate::spectral::mu_closed(r, t.theta_param()).to_f64();
        let e = eigenbasis_vector(t, n, r)?;
        for i in 1..=n {
            for j in 1..=n {
                recon[(i, j)] += mu * e[i - 1] * e[j - 1];
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 1..=n {
        for j in 1..=n {
            worst = worst.max((recon[(i, j)] - m[(i, j)]).abs());
        }
    }
    Ok(worst)
}

/// Direct float product π_{r−1} ēᵣ Mₙ, for cross-checking `eigen_image_closed`.
pub fn eigen_image_direct<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    r: usize,
) -> Result<Vec<f64>, Error> {
    let m = build_m_float(n, t.theta().to_f64())?;
    let gauge = GaugeDiag::new(t, n);
    let v: Vec<f64> = (1..=n)
        .map(|j| {
            q_poly(r - 1, j, t.theta_param(), n)
                .map(|qv| qv.to_f64() * gauge.dsq(j).to_f64().sqrt())
        })
        .collect::<Result<_, _>>()?;
    Ok((1..=n)
        .map(|i| (1..=n).map(|j| v[j - 1] * m[(j, i)]).sum())
        .collect())
}
