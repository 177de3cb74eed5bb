//! Acceptance suite. Each test exercises one release criterion at its
//! stated tolerance and prints a `acceptance N: PASS` line on success.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use cvbell::gaussian::StandardForm;
use cvbell::{bell, channel, criteria, homodyne, wigner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_symmetric(rng: &mut impl Rng) -> (f64, f64) {
    let n: f64 = rng.gen_range(0.5..5.0);
    let c = rng.gen_range(0.0..0.999) * (n * n - 0.25).sqrt();
    (n, c)
}

#[test]
fn acceptance_1_local_bound_and_vacuum_saturation() {
    let b = bell::bell_max(0.5, 0.0).unwrap();
    assert!((b - 2.0).abs() <= 1e-12, "bell_max(vacuum) = {b}");
    let phs = criteria::phs_check(&StandardForm::new(0.5, 0.5, 0.0, 0.0));
    assert!((phs.witness - 0.25).abs() <= 1e-12, "PHS witness = {}", phs.witness);
    println!(
        "acceptance 1: PASS - vacuum saturates the local bound (B = {b}) and the PHS \
         boundary (witness = {})",
        phs.witness
    );
}

#[test]
fn acceptance_2_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut max_dev: f64 = 0.0;
    for _ in 0..1000 {
        let (n, c) = random_symmetric(&mut rng);
        let cm = StandardForm::new(n, n, c, -c).to_covariance_matrix();
        for _ in 0..10 {
            let i: f64 = rng.gen_range(0.0..2.0);
            let closed = bell::bell_function(i, n, c).unwrap();
            let oracle = wigner::bell_combination(&cm, i).unwrap();
            max_dev = max_dev.max((closed - oracle).abs() / closed.abs().max(1.0));
        }
    }
    assert!(max_dev <= 1e-12, "max relative deviation {max_dev}");
    println!(
        "acceptance 2: PASS - closed form vs four-point Wigner combination, 1000 states x 10 \
         intensities, max relative deviation {max_dev:.3e} <= 1e-12"
    );
}

#[test]
fn acceptance_3_maximization_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut max_opt_dev: f64 = 0.0;
    let mut max_form_dev: f64 = 0.0;
    for _ in 0..1000 {
        let (n, c) = random_symmetric(&mut rng);
        if n - c < 1e-6 {
            continue;
        }
        let analytic_i = bell::optimal_displacement(n, c).unwrap();
        let analytic_b = bell::bell_max(n, c).unwrap();
        let (num_i, num_b) = bell::bell_max_golden(n, c).unwrap();
        max_opt_dev = max_opt_dev.max((analytic_b - num_b).abs());
        // Argmax comparison is looser: the objective is flat at the top and
        // the search location is only meaningful to ~sqrt(machine eps).
        assert!(
            (analytic_i - num_i).abs() <= 1e-4 * analytic_i.max(1.0),
            "argmax mismatch at n={n} c={c}: {analytic_i} vs {num_i}"
        );
        // The analytic displacement is a stationary point of the objective.
        // Central differences need the optimum away from the boundary.
        let h = 1e-6 * analytic_i.max(1.0);
        if analytic_i > h {
            let grad = (bell::bell_function(analytic_i + h, n, c).unwrap()
                - bell::bell_function(analytic_i - h, n, c).unwrap())
                / (2.0 * h);
            assert!(grad.abs() <= 1e-6, "non-stationary at n={n} c={c}: {grad}");
        }
        let purity_form = bell::bell_max_from_purity(1.0 / (2.0 * n), c / n).unwrap();
        max_form_dev =
            max_form_dev.max((analytic_b - purity_form).abs() / analytic_b.abs().max(1.0));
    }
    assert!(max_opt_dev <= 1e-9, "analytic vs numeric max deviation {max_opt_dev}");
    assert!(max_form_dev <= 1e-12, "state-form vs purity-form deviation {max_form_dev}");
    println!(
        "acceptance 3: PASS - corrected maximized form matches golden-section search \
         ({max_opt_dev:.3e} <= 1e-9) and the purity-correlation form ({max_form_dev:.3e} \
         <= 1e-12); the printed middle exponent would fail both"
    );
}

#[test]
fn acceptance_4_pure_state_witness_equivalence() {
    let mut min_margin = f64::INFINITY;
    for k in 0..50 {
        let n = 0.5001 + (5.0 - 0.5001) * k as f64 / 49.0;
        let sf = StandardForm::pure_symmetric(n).unwrap();
        let c_ab = sf.correlation_coefficient(1e-9).unwrap();
        let b = bell::bell_max(sf.n, sf.c1).unwrap();
        if c_ab > 0.0 {
            assert!(b > 2.0, "pure n={n} entangled but B = {b} <= 2");
            min_margin = min_margin.min(b - 2.0);
        } else {
            assert!(b <= 2.0, "pure n={n} uncorrelated but B = {b} > 2");
        }
    }
    assert!(min_margin > 0.0);
    println!(
        "acceptance 4: PASS - pure symmetric states violate iff correlated on a 50-point \
         n-grid in [0.5001, 5]; smallest violation margin {min_margin:.3e}"
    );
}

#[test]
fn acceptance_5_region_structure() {
    let grid = bell::region_grid(200).unwrap();
    assert_eq!(grid.len(), 200 * 200);

    use bell::Region;
    let mut seen = [false; 4];
    for v in &grid {
        seen[match v.region {
            Region::I => 0,
            Region::II => 1,
            Region::III => 2,
            Region::Unphysical => 3,
        }] = true;
        // No separable point may report Bell violation.
        if v.mu_s <= v.boundaries.mu_d {
            assert_ne!(v.region, Region::III, "separable violation at {v:?}");
            if let Ok(b) = bell::bell_max_from_purity(v.mu_s, v.c_ab) {
                assert!(b <= 2.0 + 1e-12, "separable point with B = {b}");
            }
        }
    }
    assert!(seen.iter().all(|&s| s), "not all four labels present: {seen:?}");

    for j in 0..200 {
        let c_ab = j as f64 / 200.0;
        let b = bell::region_boundaries(c_ab).unwrap();
        assert!(b.mu_d <= b.mu_b + 1e-12 && b.mu_b <= b.mu_p + 1e-12, "ordering at C={c_ab}");
    }
    println!(
        "acceptance 5: PASS - 200x200 grid shows exactly regions I/II/III/unphysical with \
         ordered boundaries and no separable violation"
    );
}

#[test]
fn acceptance_6_decoherence_headline() {
    for n in [0.6, 0.8, 1.0, 2.0, 5.0] {
        let sf = StandardForm::pure_symmetric(n).unwrap();
        for k in 1..=100 {
            let t = k as f64 / 100.0;
            let ev = channel::apply_loss(&sf, t).unwrap();
            assert_eq!(
                criteria::duan_check(&ev).verdict,
                criteria::Verdict::Entangled,
                "Duan verdict lost at n={n}, T={t}"
            );
        }
        let threshold = channel::bell_threshold(&sf, 1e-9)
            .unwrap()
            .unwrap_or_else(|| panic!("no Bell threshold for n={n}"));
        // The high-transmission claim holds from n = 0.8 up; the weakly
        // correlated n = 0.6 ancestor crosses slightly earlier (~0.875).
        if n >= 0.8 {
            assert!(threshold > 0.9, "threshold {threshold} at n={n} not above 0.9");
        } else {
            assert!(
                threshold > 0.85 && threshold < 0.9,
                "threshold {threshold} at n={n} outside (0.85, 0.9)"
            );
        }
    }
    println!(
        "acceptance 6: PASS - entanglement survives all T in (0,1] while the Bell violation \
         needs high transmission (T > 0.9 for n >= 0.8, ~0.875 at n = 0.6)"
    );
}

#[test]
fn acceptance_7_experimental_ceiling() {
    let sf = StandardForm::pure_symmetric(1.0).unwrap();
    let ev = channel::apply_loss(&sf, 0.63).unwrap();
    let phs = criteria::phs_check(&ev);
    let duan = criteria::duan_check(&ev);
    let b = bell::bell_max(ev.n, ev.c1).unwrap();
    assert_eq!(phs.verdict, criteria::Verdict::Entangled);
    assert_eq!(duan.verdict, criteria::Verdict::Entangled);
    assert!(b <= 2.0, "unexpected violation at T = 0.63: B = {b}");
    println!(
        "acceptance 7: PASS - pure n=1 at T = 0.63 stays entangled (PHS {:.4}, Duan {:.4}) \
         without Bell violation (B = {b:.4})",
        phs.witness, duan.witness
    );
}

#[test]
fn acceptance_8_homodyne_pipeline() {
    let sf = StandardForm::pure_symmetric(1.0).unwrap();
    let truth = bell::bell_max(sf.n, sf.c1).unwrap();

    let report = homodyne::end_to_end(&sf, 1_000_000, 9, 20).unwrap();
    let est = report.estimated_bell_max.expect("estimate must be analyzable");
    assert!(
        (est - truth).abs() <= 0.02,
        "estimated Bell {est} not within 0.02 of {truth}"
    );
    assert!(report.verdicts_match, "criterion verdicts not reproduced");

    // 1/sqrt(N) error scaling: mean absolute entry error over 50 seeds.
    let true_cm = sf.to_covariance_matrix();
    let settings = homodyne::default_settings();
    let sizes = [1_000usize, 10_000, 100_000];
    let mut log_err = Vec::new();
    for &n in &sizes {
        let mut total = 0.0;
        for seed in 0..50u64 {
            let ds = homodyne::sample_quadratures(&true_cm, &settings, n, 3000 + seed).unwrap();
            let est = homodyne::estimate_cm(&ds).unwrap();
            let mut err = 0.0;
            let mut count = 0;
            for h in 0..4 {
                for k in h..4 {
                    err += (est.matrix[h][k] - true_cm.entry(h, k)).abs();
                    count += 1;
                }
            }
            total += err / count as f64;
        }
        log_err.push((n as f64).ln());
        log_err.push((total / 50.0).ln());
    }
    // Least-squares slope over the three (ln N, ln err) points.
    let xs: Vec<f64> = log_err.iter().step_by(2).copied().collect();
    let ys: Vec<f64> = log_err.iter().skip(1).step_by(2).copied().collect();
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xm) * (y - ym))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xm) * (x - xm)).sum::<f64>();
    assert!(
        (slope + 0.5).abs() <= 0.1,
        "error-scaling slope {slope} outside -0.5 +- 0.1"
    );
    println!(
        "acceptance 8: PASS - N=1e6 pipeline recovers Bell {est:.4} (truth {truth:.4}, \
         bootstrap s.e. {:.4}), verdicts reproduced, error-scaling slope {slope:.3}",
        report.bell_std_error.unwrap_or(f64::NAN)
    );
}

#[test]
fn acceptance_9_physicality_edge_case() {
    let cm = StandardForm::new(0.5, 0.5, 0.3, -0.3).to_covariance_matrix();
    let rep = cm.physicality(1e-9);
    assert!(!rep.physical, "state must be rejected");
    assert!((rep.d_minus - 0.4).abs() <= 1e-12);
    assert!(
        rep.invariant_inequality_holds,
        "the squared-invariant inequality holds for this state; rejection must come from \
         the symplectic eigenvalue"
    );
    println!(
        "acceptance 9: PASS - (n=m=1/2, c=0.3) rejected by d_minus = {} < 1/2 although the \
         invariant inequality reads {} <= {}",
        rep.d_minus, rep.invariant_lhs, rep.invariant_rhs
    );
}
