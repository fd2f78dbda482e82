//! Independent ground truth for the closed-form moments: exhaustive
//! enumeration of the Ewens measure at small n, a seeded Chinese-restaurant
//! sampler, and the conditioned-Poisson representation.
//!
//! All sampling uses ChaCha8 seeded from a 64-bit value; batches are split
//! into independently seeded streams (seed, stream-index), so parallel and
//! serial runs aggregate to identical results. Changing the generator is a
//! breaking change to golden outputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::esf::{
    additive_value, ell, esf_probability, mean_a, variance_d, CycleType, WeightVector,
};
use crate::scalar::{rising_factorial, Scalar, ThetaParam, ThetaTable};

/// Partition-count guard for exhaustive cycle-type enumeration.
pub const ENUMERATION_GUARD: usize = 40;
/// Factorial guard for permutation-level enumeration.
pub const PERMUTATION_GUARD: usize = 8;
/// Rejection-rate guard for the conditioned-Poisson check.
pub const POISSON_GUARD: usize = 8;

/// Z-score threshold for every statistical acceptance test. 4σ keeps the
/// false-failure rate negligible across a suite of hundreds of checks.
pub const SIGMA_LIMIT: f64 = 4.0;

/// All s̄ with ℓ(s̄) = n, each exactly once (p(n) of them), in lexicographic
/// order of the count vectors. The ordering is part of the output contract.
pub fn enumerate_cycle_types(n: usize) -> Result<Vec<CycleType>, Error> {
    if n == 0 || n > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard {
            n,
            max: ENUMERATION_GUARD,
        });
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; n];
    fn rec(remaining: usize, max_part: usize, counts: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if remaining == 0 {
            out.push(CycleType::new(counts.clone()));
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            counts[part - 1] += 1;
            rec(remaining - part, part, counts, out);
            counts[part - 1] -= 1;
        }
    }
    rec(n, n, &mut counts, &mut out);
    out.sort();
    Ok(out)
}

/// Sum of the type probabilities over the full support; exactly 1.
pub fn esf_normalization_total<S: Scalar>(t: &ThetaTable<S>, n: usize) -> Result<S, Error> {
    let mut total = S::zero();
    for s in enumerate_cycle_types(n)? {
        total = total + esf_probability(t, n, &s);
    }
    Ok(total)
}

/// Exhaustive mean/variance of h against the closed forms.
#[derive(Clone, Debug)]
pub struct OracleReport<S> {
    pub n: usize,
    pub theta: S,
    pub a: WeightVector<S>,
    pub mean_exact: S,
    pub var_exact: S,
    pub mean_formula: S,
    pub var_formula: S,
    pub agree: bool,
}

/// First-principles mean and variance of h over the full cycle-type support,
/// compared with the closed forms.
pub fn oracle_mean_var<S: Scalar>(
    t: &ThetaTable<S>,
    n: usize,
    a: &WeightVector<S>,
) -> Result<OracleReport<S>, Error> {
    let types = enumerate_cycle_types(n)?;
    let mut mean = S::zero();
    let mut second = S::zero();
    let mut total = S::zero();
    for s in &types {
        let p = esf_probability(t, n, s);
        let h = additive_value(a, s)?;
        mean = mean + p.clone() * h.clone();
        second = second + p.clone() * h.clone() * h;
        total = total + p;
    }
    if !(total.clone() - S::one()).is_zero() && S::EXACT {
        return Err(Error::IdentityViolation {
            identity: "esf_normalization",
            detail: format!("probabilities sum to {total}"),
        });
    }
    let var_exact = second - mean.clone() * mean.clone();
    let mean_formula = mean_a(t, n, a)?;
    let var_formula = variance_d(t, n, a)?;
    let agree = mean == mean_formula && var_exact == var_formula;
    Ok(OracleReport {
        n,
        theta: t.theta().clone(),
        a: a.clone(),
        mean_exact: mean,
        var_exact,
        mean_formula,
        var_formula,
        agree,
    })
}

/// Cycle type of a permutation given in one-line notation (1-based images).
pub fn cycle_type_of_permutation(perm: &[usize]) -> CycleType {
    let n = perm.len();
    let mut counts = vec![0usize; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            len += 1;
            cur = perm[cur] - 1;
        }
        counts[len - 1] += 1;
    }
    CycleType::new(counts)
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    // Heap's algorithm
    let mut arr: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    f(&arr);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                arr.swap(0, i);
            } else {
                arr.swap(c[i], i);
            }
            f(&arr);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Aggregate ν({σ}) = θ^w(σ)/(θ)ₙ over all n! permutations by cycle type and
/// confirm the totals equal the Ewens Sampling Formula for every type
/// (equivalently, the multiplicity n!/∏ j^{sⱼ} sⱼ! is confirmed).
pub fn enumerate_permutations_check<S: Scalar>(t: &ThetaTable<S>, n: usize) -> Result<bool, Error> {
    if n == 0 || n > PERMUTATION_GUARD {
        return Err(Error::EnumerationGuard {
            n,
            max: PERMUTATION_GUARD,
        });
    }
    let denom = rising_factorial(t.theta(), n);
    let mut powers = Vec::with_capacity(n + 1);
    powers.push(S::one());
    for w in 1..=n {
        powers.push(powers[w - 1].clone() * t.theta().clone());
    }
    let mut by_type: BTreeMap<CycleType, S> = BTreeMap::new();
    for_each_permutation(n, |perm| {
        let ct = cycle_type_of_permutation(perm);
        let w = ct.cycle_count();
        let weight = powers[w].clone() / denom.clone();
        by_type
            .entry(ct)
            .and_modify(|v| *v = v.clone() + weight.clone())
            .or_insert(weight);
    });
    let types = enumerate_cycle_types(n)?;
    if types.len() != by_type.len() {
        return Ok(false);
    }
    let mut total = S::zero();
    for s in &types {
        let Some(aggregated) = by_type.get(s) else {
            return Ok(false);
        };
        if *aggregated != esf_probability(t, n, s) {
            return Ok(false);
        }
        total = total + aggregated.clone();
    }
    Ok(total == S::one())
}

/// One sequential-insertion step: with k elements already placed, open a new
/// cycle with probability θ/(θ+k), otherwise grow a cycle chosen by a
/// uniform position among the k occupied ones.
fn crp_step<R: Rng + ?Sized>(sizes: &mut Vec<usize>, k: usize, theta: f64, rng: &mut R) -> bool {
    if k == 0 || rng.random::<f64>() < theta / (theta + k as f64) {
        sizes.push(1);
        true
    } else {
        let mut pos = rng.random_range(0..k);
        for s in sizes.iter_mut() {
            if pos < *s {
                *s += 1;
                return false;
            }
            pos -= *s;
        }
        unreachable!("position within occupied total");
    }
}

/// Draw one cycle type from the Ewens measure by the Chinese restaurant
/// construction; deterministic given the generator state.
pub fn crp_sample<R: Rng + ?Sized>(n: usize, theta: f64, rng: &mut R) -> CycleType {
    let mut sizes: Vec<usize> = Vec::new();
    for k in 0..n {
        crp_step(&mut sizes, k, theta, rng);
    }
    let mut counts = vec![0usize; n];
    for s in sizes {
        counts[s - 1] += 1;
    }
    CycleType::new(counts)
}

/// A reproducible batch of CRP draws.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub n: usize,
    pub theta: f64,
    pub seed: u64,
    pub streams: u64,
    pub count: usize,
    pub draws: Vec<CycleType>,
}

fn stream_counts(count: usize, streams: u64) -> Vec<usize> {
    let s = streams.max(1) as usize;
    let base = count / s;
    let extra = count % s;
    (0..s).map(|i| base + usize::from(i < extra)).collect()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw `count` cycle types split over independently seeded streams; the
/// draw order is by stream index, so thread scheduling cannot reorder it.
pub fn sample_batch(n: usize, theta: f64, count: usize, seed: u64, streams: u64) -> SampleBatch {
    let per_stream = stream_counts(count, streams);
    let mut draws = Vec::with_capacity(count);
    std::thread::scope(|scope| {
        let handles: Vec<_> = per_stream
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                scope.spawn(move || {
                    let mut rng = stream_rng(seed, idx as u64);
                    (0..c)
                        .map(|_| crp_sample(n, theta, &mut rng))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            draws.extend(h.join().expect("sampler thread"));
        }
    });
    SampleBatch {
        n,
        theta,
        seed,
        streams: streams.max(1),
        count,
        draws,
    }
}

/// Outcome of a 4σ frequency comparison against the exact type probabilities.
/// Classes with expected count below 10 are pooled into one residual bucket
/// before the z-test, keeping the normal approximation honest.
#[derive(Clone, Debug)]
pub struct FrequencyCheck {
    pub draws: usize,
    pub classes: usize,
    pub pooled: usize,
    pub worst_z: f64,
    pub pass: bool,
}

/// Compare empirical type frequencies of a batch with the Ewens formula.
pub fn frequency_check(batch: &SampleBatch) -> Result<FrequencyCheck, Error> {
    let n = batch.n;
    let t = ThetaTable::new(ThetaParam::new(batch.theta)?, n);
    let types = enumerate_cycle_types(n)?;
    let mut observed: BTreeMap<&CycleType, usize> = BTreeMap::new();
    for d in &batch.draws {
        debug_assert_eq!(ell(d), n);
        *observed.entry(d).or_insert(0) += 1;
    }
    let total = batch.draws.len() as f64;
    let mut worst_z: f64 = 0.0;
    let mut pooled_p = 0.0;
    let mut pooled_obs = 0usize;
    let mut pooled = 0usize;
    let mut classes = 0usize;
    let mut check = |p: f64, obs: f64| {
        let sd = (total * p * (1.0 - p)).sqrt();
        let z = if sd > 0.0 {
            (obs - total * p).abs() / sd
        } else {
            0.0
        };
        if z > worst_z {
            worst_z = z;
        }
    };
    for s in &types {
        let p = esf_probability(&t, n, s);
        let obs = observed.get(s).copied().unwrap_or(0);
        if total * p < 10.0 {
            pooled += 1;
            pooled_p += p;
            pooled_obs += obs;
        } else {
            classes += 1;
            check(p, obs as f64);
        }
    }
    if pooled > 0 && pooled_p > 0.0 {
        check(pooled_p, pooled_obs as f64);
    }
    Ok(FrequencyCheck {
        draws: batch.draws.len(),
        classes,
        pooled,
        worst_z,
        pass: worst_z <= SIGMA_LIMIT,
    })
}

/// Sample variance with the standard error of the variance estimate
/// (fourth-moment formula).
fn variance_with_se(values: &[f64]) -> (f64, f64) {
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let s2 = m2 / (count as f64 - 1.0);
    m4 /= count as f64;
    let var_of_s2 = (m4 - s2 * s2 * (count as f64 - 3.0) / (count as f64 - 1.0)) / count as f64;
    (s2, var_of_s2.max(0.0).sqrt())
}

/// Monte Carlo moments of h with standard errors.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub count: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub var: f64,
    pub var_se: f64,
}

/// Estimate mean and variance of h over `count` CRP draws.
pub fn mc_estimate(
    n: usize,
    theta: f64,
    a: &[f64],
    count: usize,
    seed: u64,
    streams: u64,
) -> Result<McEstimate, Error> {
    if count < 2 {
        return Err(Error::CountTooSmall { count, min: 2 });
    }
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    let per_stream = stream_counts(count, streams);
    let mut values = Vec::with_capacity(count);
    std::thread::scope(|scope| {
        let handles: Vec<_> = per_stream
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                scope.spawn(move || {
                    let mut rng = stream_rng(seed, idx as u64);
                    (0..c)
                        .map(|_| {
                            let draw = crp_sample(n, theta, &mut rng);
                            draw.counts()
                                .iter()
                                .zip(a)
                                .map(|(&s, aj)| s as f64 * aj)
                                .sum::<f64>()
                        })
                        .collect::<Vec<f64>>()
                })
            })
            .collect();
        for h in handles {
            values.extend(h.join().expect("sampler thread"));
        }
    });
    let mean = values.iter().sum::<f64>() / count as f64;
    let (var, var_se) = variance_with_se(&values);
    Ok(McEstimate {
        count,
        mean,
        mean_se: (var / count as f64).sqrt(),
        var,
        var_se,
    })
}

/// Monte Carlo estimate of Var h: (sample variance, standard error).
pub fn mc_variance_estimate(
    n: usize,
    theta: f64,
    a: &[f64],
    count: usize,
    seed: u64,
    streams: u64,
) -> Result<(f64, f64), Error> {
    let est = mc_estimate(n, theta, a, count, seed, streams)?;
    Ok((est.var, est.var_se))
}

fn poisson_knuth<R: Rng + ?Sized>(exp_neg_lambda: f64, rng: &mut R) -> usize {
    let mut k = 0usize;
    let mut p = 1.0;
    loop {
        p *= rng.random::<f64>();
        if p <= exp_neg_lambda {
            return k;
        }
        k += 1;
    }
}

/// Result of the conditioned-Poisson cross-check.
#[derive(Clone, Debug)]
pub struct PoissonCheck {
    pub n: usize,
    pub proposals: usize,
    pub accepted: usize,
    /// Too few acceptances to test; reported, not fatal.
    pub low_acceptance: bool,
    pub freq: Option<FrequencyCheck>,
    pub var_sample: f64,
    pub var_formula: f64,
    pub var_se: f64,
    pub var_pass: bool,
    pub pass: bool,
}

const POISSON_ACCEPT_FLOOR: usize = 50;

/// Draw independent Poisson ξⱼ with mean θ/j, condition on ℓ(ξ̄) = n, and
/// test that accepted-type frequencies match the Ewens formula and that the
/// conditional variance of Yₙ = Σ aⱼξⱼ matches the closed form, both at 4σ.
pub fn conditioned_poisson_check(
    n: usize,
    theta: f64,
    a: &[f64],
    proposals: usize,
    seed: u64,
) -> Result<PoissonCheck, Error> {
    if n == 0 || n > POISSON_GUARD {
        return Err(Error::EnumerationGuard {
            n,
            max: POISSON_GUARD,
        });
    }
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    let mut rng = stream_rng(seed, 0);
    let exp_neg: Vec<f64> = (1..=n).map(|j| (-theta / j as f64).exp()).collect();
    let mut draws = Vec::new();
    let mut h_values = Vec::new();
    for _ in 0..proposals {
        let xi: Vec<usize> = (0..n)
            .map(|j| poisson_knuth(exp_neg[j], &mut rng))
            .collect();
        let weighted: usize = xi.iter().enumerate().map(|(j, &x)| (j + 1) * x).sum();
        if weighted != n {
            continue;
        }
        h_values.push(xi.iter().zip(a).map(|(&x, aj)| x as f64 * aj).sum::<f64>());
        draws.push(CycleType::new(xi));
    }
    let accepted = draws.len();
    if accepted < POISSON_ACCEPT_FLOOR {
        return Ok(PoissonCheck {
            n,
            proposals,
            accepted,
            low_acceptance: true,
            freq: None,
            var_sample: f64::NAN,
            var_formula: f64::NAN,
            var_se: f64::NAN,
            var_pass: false,
            pass: false,
        });
    }
    let batch = SampleBatch {
        n,
        theta,
        seed,
        streams: 1,
        count: accepted,
        draws,
    };
    let freq = frequency_check(&batch)?;
    let (var_sample, var_se) = variance_with_se(&h_values);
    let var_formula = if n >= 2 {
        let t = ThetaTable::new(ThetaParam::new(theta)?, n);
        variance_d(&t, n, &WeightVector::new(a.to_vec()))?
    } else {
        // single conditioned outcome ξ₁ = 1: point mass
        0.0
    };
    let diff = (var_sample - var_formula).abs();
    let var_pass = diff <= SIGMA_LIMIT * var_se || diff <= 1e-12;
    let pass = freq.pass && var_pass;
    Ok(PoissonCheck {
        n,
        proposals,
        accepted,
        low_acceptance: false,
        freq: Some(freq),
        var_sample,
        var_formula,
        var_se,
        var_pass,
        pass,
    })
}

/// Random rational weight vector with small entries, never identically zero.
pub fn random_weights<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> WeightVector<S> {
    loop {
        let a: Vec<S> = (0..n)
            .map(|_| S::from_ratio(rng.random_range(-20..=20), rng.random_range(1..=6)))
            .collect();
        let w = WeightVector::new(a);
        if !w.is_zero() {
            return w;
        }
    }
}
