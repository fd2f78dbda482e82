//! Acceptance suite: every release-gating claim, one test per criterion.
//!
//! Run with `cargo test -p ewens-core --test acceptance -- --nocapture` to
//! see one PASS line per criterion with its grid size and timing.

use std::time::Instant;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ewens_core::esf::{b_form, variance_d, WeightVector};
use ewens_core::hahn::{
    alternating_binomial_check, binomial_convolution_check, eigen_image_closed, eigen_image_direct,
    eigenbasis_vector, hahn_theta_convolution, hyp3f2_relation_check, leading_coeff_check, pfq,
    q_poly, series_rearrangement_check, spectral_reconstruction_error, HahnBasis, PfqSpec,
};
use ewens_core::oracle::{
    conditioned_poisson_check, enumerate_permutations_check, frequency_check, mc_variance_estimate,
    oracle_mean_var, random_weights, sample_batch, SIGMA_LIMIT,
};
use ewens_core::scalar::{rising_factorial, Scalar, ThetaParam, ThetaTable};
use ewens_core::spectral::{
    extremal_a, float_spectrum, mu_closed, rayleigh_ratio, tau_closed, triangularize,
};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

const THETA_GRID: [(i64, i64); 6] = [(1, 3), (1, 2), (1, 1), (2, 1), (7, 3), (5, 1)];

fn table(p: i64, d: i64, cap: usize) -> ThetaTable<Q> {
    ThetaTable::new(ThetaParam::new(q(p, d)).unwrap(), cap)
}

#[test]
fn criterion_1_sharp_constant() {
    let start = Instant::now();
    let mut cells = 0usize;
    for &(p, d) in &THETA_GRID {
        for n in 2..=30usize {
            let t = table(p, d, n);
            let a = extremal_a(t.theta_param(), n);
            let ratio = rayleigh_ratio(&t, n, &a).unwrap();
            let tau = tau_closed(t.theta_param());
            assert_eq!(ratio, tau, "theta={p}/{d} n={n}");
            let expect = (q(p, d) + q(2, 1)) / (q(p, d) + q(1, 1));
            assert_eq!(tau, expect);
            cells += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "grid took {elapsed:?}, budget 10 s"
    );
    println!(
        "acceptance 1 (sharp constant, exact on {} cells): PASS in {:.2?}",
        cells, elapsed
    );
}

#[test]
fn criterion_2_spectrum() {
    let start = Instant::now();
    let mut cells = 0usize;
    for &(p, d) in &THETA_GRID {
        for n in 2..=30usize {
            let t = table(p, d, n);
            let r = triangularize(&t, n).unwrap();
            assert!(r.is_upper_triangular(), "theta={p}/{d} n={n}");
            for j in 1..=n {
                assert_eq!(
                    r[(j, j)],
                    mu_closed(j, t.theta_param()),
                    "theta={p}/{d} n={n} j={j}"
                );
            }
            cells += 1;
        }
    }
    let mut float_checks = 0usize;
    for &(p, d) in &THETA_GRID {
        let th = ThetaParam::new(q(p, d)).unwrap();
        for n in [2usize, 5, 10, 20, 35, 50] {
            let numeric = float_spectrum(n, q(p, d).to_f64()).unwrap();
            let mut closed: Vec<f64> = (1..=n).map(|r| mu_closed(r, &th).to_f64()).collect();
            closed.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (num, cl) in numeric.iter().zip(&closed) {
                assert!(
                    (num - cl).abs() < 1e-8,
                    "theta={p}/{d} n={n}: {num} vs {cl}"
                );
                float_checks += 1;
            }
        }
    }
    println!(
        "acceptance 2 (spectrum: exact triangularization on {} cells, {} eigenvalues within 1e-8): PASS in {:.2?}",
        cells,
        float_checks,
        start.elapsed()
    );
}

#[test]
fn criterion_3_known_specializations() {
    let start = Instant::now();
    for n in 2..=30usize {
        let t1 = table(1, 1, n);
        let a1 = extremal_a(t1.theta_param(), n);
        assert_eq!(rayleigh_ratio(&t1, n, &a1).unwrap(), q(3, 2), "n={n}");
        assert_eq!(tau_closed(t1.theta_param()), q(3, 2));

        let t2 = table(2, 1, n);
        let a2 = extremal_a(t2.theta_param(), n);
        assert_eq!(rayleigh_ratio(&t2, n, &a2).unwrap(), q(4, 3), "n={n}");
        assert_eq!(tau_closed(t2.theta_param()), q(4, 3));
    }
    println!(
        "acceptance 3 (tau(1) = 3/2 and tau(2) = 4/3 exactly for n = 2..=30, no O(1/n) residue): PASS in {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_4_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240);
    let mut runs = 0usize;
    for (p, d) in [(1i64, 2i64), (1, 1), (2, 1)] {
        for n in 2..=10usize {
            let t = table(p, d, n);
            for _ in 0..200 {
                let a = random_weights::<Q, _>(n, &mut rng);
                let rep = oracle_mean_var(&t, n, &a).unwrap();
                assert!(rep.agree, "theta={p}/{d} n={n} a={:?}", a.values());
                runs += 1;
            }
        }
        for n in 1..=8usize {
            let t = table(p, d, n);
            assert!(
                enumerate_permutations_check(&t, n).unwrap(),
                "permutation check theta={p}/{d} n={n}"
            );
        }
    }
    println!(
        "acceptance 4 (exhaustive oracle agreement on {} runs + permutation-level measure for n <= 8): PASS in {:.2?}",
        runs,
        start.elapsed()
    );
}

#[test]
fn criterion_5_universal_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(55_501);
    let mut vectors = 0usize;
    for &(p, d) in &THETA_GRID {
        for n in 2..=30usize {
            let t = table(p, d, n);
            let tau = tau_closed(t.theta_param());
            let theta = t.theta().clone();
            for _ in 0..58 {
                let a = random_weights::<Q, _>(n, &mut rng);
                let dn = variance_d(&t, n, &a).unwrap();
                let bound = tau.clone() * theta.clone() * b_form(&t, n, &a).unwrap();
                assert!(dn <= bound, "violation at theta={p}/{d} n={n}");
                vectors += 1;
            }
        }
    }
    assert!(vectors >= 10_000, "only {vectors} vectors");
    println!(
        "acceptance 5 (universal bound D <= tau*theta*B on {} random vectors, zero violations): PASS in {:.2?}",
        vectors,
        start.elapsed()
    );
}

#[test]
fn criterion_6_orthogonality() {
    let start = Instant::now();
    let theta_grid = [(1i64, 3i64), (1, 2), (1, 1), (2, 1), (7, 3)];
    let mut gram_cells = 0usize;
    for &(p, d) in &theta_grid {
        for n in 2..=25usize {
            let t = table(p, d, n);
            let basis = HahnBasis::build(&t, n).unwrap();
            assert!(basis.gram_is_diagonal(&t), "theta={p}/{d} n={n}");
            gram_cells += 1;
        }
    }
    for &(p, d) in &theta_grid {
        for n in 2..=25usize {
            let t = table(p, d, n);
            let vecs: Vec<Vec<f64>> = (1..=n)
                .map(|r| eigenbasis_vector(&t, n, r).unwrap())
                .collect();
            for a in 0..n {
                for b in 0..=a {
                    let dot: f64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x * y).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (dot - expect).abs() < 1e-12,
                        "theta={p}/{d} n={n} pair ({a},{b})"
                    );
                }
            }
        }
        for n in 2..=20usize {
            let t = table(p, d, n);
            let err = spectral_reconstruction_error(&t, n).unwrap();
            assert!(
                err < 1e-8,
                "theta={p}/{d} n={n}: reconstruction error {err}"
            );
        }
    }
    println!(
        "acceptance 6 (Gram exactly diagonal on {} cells; eigenbasis orthonormal to 1e-12; reconstruction to 1e-8): PASS in {:.2?}",
        gram_cells,
        start.elapsed()
    );
}

#[test]
fn criterion_7_identity_suite() {
    let start = Instant::now();
    let theta_grid = [(1i64, 2i64), (1, 1), (2, 1)];
    let rationals = [q(7, 3), q(-5, 2), q(13, 4), q(0, 1), q(9, 1), q(-11, 6)];
    let mut checks = 0usize;

    // binomial convolution and alternating identities, M and m up to 20
    for k_max in 0..=20usize {
        for a in &rationals {
            for b in &rationals {
                assert!(binomial_convolution_check(a, b, k_max));
                checks += 1;
            }
            for m in [0usize, 1, 7, 13, 20] {
                assert!(alternating_binomial_check(a, m, k_max));
                checks += 1;
            }
        }
    }

    // Chu-Vandermonde with random rational parameters, m up to 25
    for m in 0..=25usize {
        for (b, c) in [(q(1, 2), q(2, 1)), (q(-3, 2), q(7, 3)), (q(5, 1), q(1, 5))] {
            let lhs = pfq(&PfqSpec::f21(m, b.clone(), c.clone(), q(1, 1))).unwrap();
            let rhs = rising_factorial(&(c.clone() - b.clone()), m) / rising_factorial(&c, m);
            assert_eq!(lhs, rhs);
            checks += 1;
        }
    }

    // series rearrangement on random parameter blocks
    let upper = [q(1, 2), q(-3, 1)];
    let lower = [q(5, 2), q(7, 3)];
    for k_max in 0..=10usize {
        assert!(series_rearrangement_check(k_max, &q(2, 3), &q(3, 4), &upper, &lower).unwrap());
        checks += 1;
    }

    for &(p, d) in &theta_grid {
        let th = ThetaParam::new(q(p, d)).unwrap();
        for n in 2..=12usize {
            let t = table(p, d, n);
            // Hahn-Θ convolution (internally asserted) on the full (r, M) grid
            for r in 0..n {
                for m in 0..n {
                    hahn_theta_convolution(&t, n, r, m).unwrap();
                    checks += 1;
                }
            }
            // the last Hahn row via Chu-Vandermonde
            for j in 1..=n {
                let mag = rising_factorial(&(q(p, d) + q((n - j) as i64, 1)), j - 1)
                    / ewens_core::scalar::factorial::<Q>(j);
                let expect = if (j - 1) % 2 == 0 { mag } else { -mag };
                assert_eq!(q_poly(n - 1, j, &th, n).unwrap(), expect);
                checks += 1;
            }
            // the 3F2 cross-relation on the full grid, exactly
            for i in 1..=n {
                for r in 1..=n {
                    assert!(
                        hyp3f2_relation_check(&th, n, i, r).unwrap(),
                        "theta={p}/{d} n={n} i={i} r={r}"
                    );
                    checks += 1;
                }
            }
            // leading coefficients of the image polynomial and its partner
            for r in 1..n {
                assert!(leading_coeff_check(&th, n, r).unwrap());
                checks += 1;
            }
        }
        // eigen-image closed form vs direct matrix product
        for n in 2..=15usize {
            let t = table(p, d, n);
            for r in 1..=n {
                let direct = eigen_image_direct(&t, n, r).unwrap();
                for i in 1..=n {
                    let closed = eigen_image_closed(&t, n, r, i).unwrap();
                    assert!((closed - direct[i - 1]).abs() < 1e-10);
                    checks += 1;
                }
            }
        }
    }
    println!(
        "acceptance 7 (identity suite, {} checks, zero failures): PASS in {:.2?}",
        checks,
        start.elapsed()
    );
}

#[test]
fn criterion_8_statistical_checks() {
    // CRP type frequencies at n = 4 over 1e6 draws
    let start = Instant::now();
    let batch = sample_batch(4, 1.0, 1_000_000, 74, 4);
    let freq = frequency_check(&batch).unwrap();
    assert!(freq.pass, "worst z = {}", freq.worst_z);
    let crp_elapsed = start.elapsed();
    assert!(crp_elapsed.as_secs_f64() < 60.0);

    // Monte Carlo variance at n = 50 with a_j = log j
    let start = Instant::now();
    let n = 50usize;
    let a: Vec<f64> = (1..=n).map(|j| (j as f64).ln()).collect();
    let t = ThetaTable::new(ThetaParam::new(1.0f64).unwrap(), n);
    let formula = variance_d(&t, n, &WeightVector::new(a.clone())).unwrap();
    let (est, se) = mc_variance_estimate(n, 1.0, &a, 100_000, 75, 4).unwrap();
    assert!(
        (est - formula).abs() <= SIGMA_LIMIT * se,
        "estimate {est} vs formula {formula} (se {se})"
    );
    let mc_elapsed = start.elapsed();
    assert!(mc_elapsed.as_secs_f64() < 60.0);

    // conditioned-Poisson representation for every n <= 8
    let start = Instant::now();
    for n in 1..=8usize {
        let a: Vec<f64> = (1..=n).map(|j| if j == 1 { 1.0 } else { 0.0 }).collect();
        let proposals = if n <= 4 { 120_000 } else { 360_000 };
        let check = conditioned_poisson_check(n, 0.5, &a, proposals, 76).unwrap();
        assert!(
            check.pass && !check.low_acceptance,
            "n={n}: accepted {}, freq {:?}, var {} vs {} (se {})",
            check.accepted,
            check.freq,
            check.var_sample,
            check.var_formula,
            check.var_se
        );
    }
    let poisson_elapsed = start.elapsed();
    assert!(poisson_elapsed.as_secs_f64() < 60.0);

    println!(
        "acceptance 8 (statistical: CRP frequencies {:.2?}, MC variance {:.2?}, conditioned Poisson {:.2?}, all within 4 sigma): PASS",
        crp_elapsed, mc_elapsed, poisson_elapsed
    );
}
