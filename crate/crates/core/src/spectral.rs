//! The quadratic-form matrix Mₙ, its closed-form spectrum, the sharp
//! constant (θ+2)/(θ+1), and the exponential-matrix triangularization.
//!
//! The entries of Mₙ contain square roots, so nothing there is exactly
//! representable. Everything is therefore conjugated by the diagonal gauge
//! D = diag(√(jΘ(n−j))):
//!
//!   Mₙ = D⁻¹ C D⁻¹,   C_ij = Θ(n−i−j) − Θ(n−i)Θ(n−j)/Θ(n)
//!   V = e^L = D⁻¹ U D,  U_ij = (−1)^{i−j} C(i,j) Θ(n−i)/Θ(n−j)  (i ≥ j)
//!   W = e^L Mₙ e^{−L} = D⁻¹ R D,  R = U · C · D⁻² · |U|
//!
//! C, U, R and D² are rational, and triangularity, diagonal entries and
//! eigen-equations are gauge-invariant, so every spectral assertion is
//! checked in exact arithmetic. Float builders reproduce the literal
//! square-root forms for numeric cross-checks.

use crate::error::Error;
use crate::esf::{b_form, variance_d, WeightVector};
use crate::mat::Mat;
use crate::scalar::{factorial, gen_binomial, rising_factorial, Scalar, ThetaParam, ThetaTable};

fn check_n2(n: usize) -> Result<(), Error> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::NTooSmall { n })
    }
}

/// Square-root-free rational kernel C of Mₙ (Mₙ = D⁻¹ C D⁻¹).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix<S> {
    n: usize,
    mat: Mat<S>,
}

impl<S: Scalar> KernelMatrix<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &Mat<S> {
        &self.mat
    }
}

/// C_ij = Θ(n−i−j) − Θ(n−i)Θ(n−j)/Θ(n); symmetric.
pub fn build_kernel<S: Scalar>(t: &ThetaTable<S>, n: usize) -> Result<KernelMatrix<S>, Error> {
    check_n2(n)?;
    let theta_n = t.get(n as i64);
    let mat = Mat::from_fn(n, |i, j| {
        t.get(n as i64 - i as i64 - j as i64)
            - t.get((n - i) as i64) * t.get((n - j) as i64) / theta_n.clone()
    });
    Ok(KernelMatrix { n, mat })
}

/// Squares of the gauge diagonal, dⱼ² = j·Θ(n−j); all strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeDiag<S> {
    n: usize,
    dsq: Vec<S>,
}

impl<S: Scalar> GaugeDiag<S> {
    pub fn new(t: &ThetaTable<S>, n: usize) -> Self {
        let dsq: Vec<S> = (1..=n)
            .map(|j| S::from_int(j as i64) * t.get((n - j) as i64))
            .collect();
        debug_assert!(dsq.iter().all(|v| *v > S::zero()));
        GaugeDiag { n, dsq }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// dⱼ², 1-based.
    pub fn dsq(&self, j: usize) -> &S {
        &self.dsq[j - 1]
    }
}

/// Mₙ with entries exactly as defined (float mode; contains square roots).
pub fn build_m_float(n: usize, theta: f64) -> Result<Mat<f64>, Error> {
    check_n2(n)?;
    let t = ThetaTable::new(ThetaParam::new(theta)?, n);
    Ok(Mat::from_fn(n, |i, j| {
        let first = t.get(n as i64 - i as i64 - j as i64)
            / ((i * j) as f64 * t.get((n - i) as i64) * t.get((n - j) as i64)).sqrt();
        let second = (t.get((n - i) as i64) / (i as f64 * t.get(n as i64))).sqrt()
            * (t.get((n - j) as i64) / (j as f64 * t.get(n as i64))).sqrt();
        first - second
    }))
}

/// Closed-form eigenvalue μᵣ = (−1)ʳ (r−1)!/(θ)ᵣ.
pub fn mu_closed<S: Scalar>(r: usize, theta: &ThetaParam<S>) -> S {
    assert!(r >= 1);
    let mag = factorial::<S>(r - 1) / rising_factorial(theta.get(), r);
    if r.is_multiple_of(2) {
        mag
    } else {
        -mag
    }
}

/// The full spectrum {μ₁,…,μₙ} of Mₙ.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<S> {
    n: usize,
    mu: Vec<S>,
}

impl<S: Scalar> Spectrum<S> {
    pub fn closed(theta: &ThetaParam<S>, n: usize) -> Result<Self, Error> {
        check_n2(n)?;
        Ok(Spectrum {
            n,
            mu: (1..=n).map(|r| mu_closed(r, theta)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// μᵣ, 1-based.
    pub fn mu(&self, r: usize) -> &S {
        &self.mu[r - 1]
    }

    pub fn values(&self) -> &[S] {
        &self.mu
    }

    /// The maximal eigenvalue is always μ₂.
    pub fn max(&self) -> &S {
        self.mu(2)
    }
}

/// Sharp constant τ(θ) = (θ+2)/(θ+1) = 1 + θμ₂.
pub fn tau_closed<S: Scalar>(theta: &ThetaParam<S>) -> S {
    let th = theta.get().clone();
    (th.clone() + S::from_int(2)) / (th + S::one())
}

/// Extremal weights aⱼ = (θ+2)j² − (2n+θ)j realizing the supremum.
pub fn extremal_a<S: Scalar>(theta: &ThetaParam<S>, n: usize) -> WeightVector<S> {
    let th = theta.get().clone();
    let a = (1..=n)
        .map(|j| {
            let j = S::from_int(j as i64);
            (th.clone() + S::from_int(2)) * j.clone() * j.clone()
                - (S::from_int(2 * n as i64) + th.clone()) * j
        })
        .collect();
    WeightVector::new(a)
}

/// Rayleigh quotient D(ā)/(θB(ā)).
pub fn rayleigh_ratio<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    a: &WeightVector<S>,
) -> Result<S, Error> {
    if a.is_zero() {
        return Err(Error::ZeroWeightVector);
    }
    let d = variance_d(t, n, a)?;
    let b = b_form(t, n, a)?;
    Ok(d / (t.theta().clone() * b))
}

/// Exact eigen-equation in ā-coordinates: Σⱼ C_ij aⱼ/j = μᵣ Θ(n−i) aᵢ for
/// every i. This is M x = μᵣ x transported through the gauge, so the
/// eigenvectors are the rational vectors aⱼ = j·q_{r−1}(j) (any scale).
pub fn rational_eigencheck<S: Scalar>(
    kernel: &KernelMatrix<S>,
    t: &ThetaTable<S>,
    r: usize,
    a: &WeightVector<S>,
) -> Result<bool, Error> {
    let n = kernel.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.n(),
        });
    }
    if a.is_zero() {
        return Err(Error::ZeroWeightVector);
    }
    let mu = mu_closed(r, t.theta_param());
    for i in 1..=n {
        let mut lhs = S::zero();
        for j in 1..=n {
            lhs = lhs + kernel.mat()[(i, j)].clone() * a.get(j).clone() / S::from_int(j as i64);
        }
        let rhs = mu.clone() * t.get((n - i) as i64) * a.get(i).clone();
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lₙ with the single nonzero subdiagonal
/// l_{j+1,j} = −√((j+1)j Θ(n−j−1)/Θ(n−j)) (float mode).
pub fn build_l_float(n: usize, theta: f64) -> Result<Mat<f64>, Error> {
    check_n2(n)?;
    let t = ThetaTable::new(ThetaParam::new(theta)?, n);
    let mut l = Mat::zeros(n);
    for j in 1..n {
        l[(j + 1, j)] =
            -(((j + 1) * j) as f64 * t.get((n - j - 1) as i64) / t.get((n - j) as i64)).sqrt();
    }
    Ok(l)
}

/// Rational gauge image Λ = D Lₙ D⁻¹: Λ_{j+1,j} = −(j+1)Θ(n−j−1)/Θ(n−j).
pub fn l_gauge<S: Scalar>(t: &ThetaTable<S>, n: usize) -> Result<Mat<S>, Error> {
    check_n2(n)?;
    let mut l = Mat::zeros(n);
    for j in 1..n {
        l[(j + 1, j)] =
            -(S::from_int(j as i64 + 1) * t.get((n - j - 1) as i64) / t.get((n - j) as i64));
    }
    Ok(l)
}

/// U = e^Λ in closed form: U_ij = (−1)^{i−j} C(i,j) Θ(n−i)/Θ(n−j) for i ≥ j.
/// The inverse is the entrywise absolute value |U| = e^{−Λ}.
pub fn exp_l_gauge<S: Scalar>(t: &ThetaTable<S>, n: usize) -> Result<Mat<S>, Error> {
    check_n2(n)?;
    Ok(Mat::from_fn(n, |i, j| {
        if i < j {
            return S::zero();
        }
        let binom = gen_binomial(&S::from_int(i as i64), j);
        let v = binom * t.get((n - i) as i64) / t.get((n - j) as i64);
        if (i - j).is_multiple_of(2) {
            v
        } else {
            -v
        }
    }))
}

/// R = U · C · D⁻² · |U|, the rational gauge image of W = e^L Mₙ e^{−L}.
/// Exactly upper triangular with R_jj = μⱼ.
pub fn triangularize<S: Scalar>(t: &ThetaTable<S>, n: usize) -> Result<Mat<S>, Error> {
    let kernel = build_kernel(t, n)?;
    let u = exp_l_gauge(t, n)?;
    let u_abs = u.map(|v| v.abs());
    let gauge = GaugeDiag::new(t, n);
    // (U·C) · D⁻²: scale column j by 1/dⱼ²
    let uc = u.mul(kernel.mat());
    let scaled = Mat::from_fn(n, |i, j| uc[(i, j)].clone() / gauge.dsq(j).clone());
    Ok(scaled.mul(&u_abs))
}

/// Numeric spectrum of Mₙ (ascending), via a symmetric eigensolver.
#[cfg(feature = "eigen")]
pub fn float_spectrum(n: usize, theta: f64) -> Result<Vec<f64>, Error> {
    let m = build_m_float(n, theta)?;
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i + 1, j + 1)]);
    let eigen = nalgebra::SymmetricEigen::try_new(dm, f64::EPSILON, 100_000).ok_or(
        Error::SolverFailure {
            detail: format!("symmetric eigensolver did not converge for n = {n}"),
        },
    )?;
    let mut vals: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}
