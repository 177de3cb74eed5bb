//! Closed-form displaced-parity CHSH function for the symmetric Gaussian
//! family `(n, n, c, -c)`, its analytic maximization, the equivalent
//! purity-correlation form, and classification of the `(mu_s, C_ab)` plane.
//!
//! The maximized value uses the exponent `-n/(n+2c)` on the middle term,
//! which is what substituting the optimal displacement into the four-point
//! combination actually yields (and the only choice consistent with the
//! purity-correlation form).

use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::golden_section_max;

/// One evaluation of the Bell function at a given displacement intensity.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BellEvaluation {
    pub displacement_intensity: f64,
    pub value: f64,
    /// Local hidden-variable bound exceeded (`value > 2`).
    pub violates: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III")]
    III,
    #[serde(rename = "unphysical")]
    Unphysical,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::Unphysical => "unphysical",
        })
    }
}

/// Boundaries of the three regions at fixed correlation coefficient.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegionBoundaries {
    pub mu_d: f64,
    pub mu_b: f64,
    pub mu_p: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegionVerdict {
    pub mu_s: f64,
    pub c_ab: f64,
    pub region: Region,
    pub boundaries: RegionBoundaries,
}

fn check_state(n: f64, c: f64) -> Result<()> {
    if n < 0.5 {
        return Err(Error::Domain(format!("n must be >= 1/2, got {n}")));
    }
    if c.abs() >= n {
        return Err(Error::SingularState(format!(
            "|c| = {} must be below n = {n}",
            c.abs()
        )));
    }
    Ok(())
}

/// Bell function of the symmetric family at displacement intensity `i`:
///
/// `B(i, n, c) = [1 + 2 e^{-n i / (n^2-c^2)} - e^{-2 (n+c) i / (n^2-c^2)}]
///              / (4 (n^2 - c^2))`.
pub fn bell_function(intensity: f64, n: f64, c: f64) -> Result<f64> {
    check_state(n, c)?;
    if intensity < 0.0 {
        return Err(Error::Domain(format!(
            "displacement intensity must be non-negative, got {intensity}"
        )));
    }
    let q = n * n - c * c;
    let bracket = 1.0 + 2.0 * (-n * intensity / q).exp() - (-2.0 * (n + c) * intensity / q).exp();
    Ok(bracket / (4.0 * q))
}

/// Stationary displacement intensity of `bell_function` in `i`:
/// `(n^2 - c^2) / (n + 2c) * ln((n + c) / n)`.
pub fn optimal_displacement(n: f64, c: f64) -> Result<f64> {
    check_state(n, c)?;
    if c < 0.0 {
        return Err(Error::Domain(
            "optimal displacement requires c >= 0; flip displacement signs for c < 0".into(),
        ));
    }
    Ok((n * n - c * c) / (n + 2.0 * c) * ((n + c) / n).ln())
}

/// Maximum of the Bell function over the displacement intensity:
///
/// `B~(n, c) = [1 + 2 r^{-n/(n+2c)} - r^{-2(n+c)/(n+2c)}] / (4 (n^2-c^2))`
/// with `r = (n + c)/n`.
pub fn bell_max(n: f64, c: f64) -> Result<f64> {
    check_state(n, c)?;
    if c < 0.0 {
        return Err(Error::Domain(
            "bell_max requires c >= 0; flip displacement signs for c < 0".into(),
        ));
    }
    let q = n * n - c * c;
    let r = (n + c) / n;
    let bracket =
        1.0 + 2.0 * r.powf(-n / (n + 2.0 * c)) - r.powf(-2.0 * (n + c) / (n + 2.0 * c));
    Ok(bracket / (4.0 * q))
}

/// Maximized Bell value and the displacement realizing it.
pub fn evaluate_max(n: f64, c: f64) -> Result<BellEvaluation> {
    let intensity = optimal_displacement(n, c)?;
    let value = bell_max(n, c)?;
    Ok(BellEvaluation {
        displacement_intensity: intensity,
        value,
        violates: value > 2.0,
    })
}

/// Maximized Bell value in terms of single-subsystem purity and correlation
/// coefficient:
///
/// `B~(mu_s, C) = mu_s^2 / (1 - C^2) * [1 + (1+2C)(1+C)^{-2(1+C)/(1+2C)}]`.
pub fn bell_max_from_purity(mu_s: f64, c_ab: f64) -> Result<f64> {
    if !(mu_s > 0.0 && mu_s <= 1.0) {
        return Err(Error::Domain(format!("mu_s must be in (0, 1], got {mu_s}")));
    }
    if !(0.0..1.0).contains(&c_ab) {
        return Err(Error::Domain(format!("C_ab must be in [0, 1), got {c_ab}")));
    }
    if mu_s * mu_s > 1.0 - c_ab * c_ab + 1e-12 {
        return Err(Error::UnphysicalPoint { mu_s, c_ab });
    }
    let bracket = 1.0
        + (1.0 + 2.0 * c_ab) * (1.0 + c_ab).powf(-2.0 * (1.0 + c_ab) / (1.0 + 2.0 * c_ab));
    Ok(mu_s * mu_s / (1.0 - c_ab * c_ab) * bracket)
}

/// Region boundaries `(mu_D, mu_B, mu_P)` at fixed `C_ab in [0, 1)`.
pub fn region_boundaries(c_ab: f64) -> Result<RegionBoundaries> {
    if !(0.0..1.0).contains(&c_ab) {
        return Err(Error::Domain(format!("C_ab must be in [0, 1), got {c_ab}")));
    }
    let bracket = 1.0
        + (1.0 + 2.0 * c_ab) * (1.0 + c_ab).powf(-2.0 * (1.0 + c_ab) / (1.0 + 2.0 * c_ab));
    Ok(RegionBoundaries {
        mu_d: 1.0 - c_ab,
        mu_b: (2.0 * (1.0 - c_ab * c_ab) / bracket).sqrt(),
        mu_p: (1.0 - c_ab * c_ab).sqrt(),
    })
}

/// Classifies a point of the purity-correlation plane.
///
/// Boundary points are assigned to the lower region (the region list uses
/// strict inequalities).
pub fn classify_region(mu_s: f64, c_ab: f64) -> Result<RegionVerdict> {
    if mu_s <= 0.0 {
        return Err(Error::Domain(format!("mu_s must be positive, got {mu_s}")));
    }
    let boundaries = region_boundaries(c_ab)?;
    let region = if mu_s > boundaries.mu_p {
        Region::Unphysical
    } else if mu_s > boundaries.mu_b {
        Region::III
    } else if mu_s > boundaries.mu_d {
        Region::II
    } else {
        Region::I
    };
    Ok(RegionVerdict {
        mu_s,
        c_ab,
        region,
        boundaries,
    })
}

/// Row-major verdict grid over `(mu_s, C_ab) in (0, 1] x [0, 1)`.
pub fn region_grid(resolution: usize) -> Result<Vec<RegionVerdict>> {
    if resolution < 2 {
        return Err(Error::Domain(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let mut grid = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let mu_s = (i + 1) as f64 / resolution as f64;
        for j in 0..resolution {
            let c_ab = j as f64 / resolution as f64;
            grid.push(classify_region(mu_s, c_ab)?);
        }
    }
    Ok(grid)
}

/// Numeric maximization of the closed-form Bell function, used as an
/// independent cross-check of `bell_max`. Bracket `[0, 10 (n^2 - c^2)]`
/// contains the maximum: the exponentials decay on scale `(n^2 - c^2)/n`.
pub fn bell_max_golden(n: f64, c: f64) -> Result<(f64, f64)> {
    check_state(n, c)?;
    let q = n * n - c * c;
    Ok(golden_section_max(
        |i| bell_function(i, n, c).unwrap(),
        0.0,
        10.0 * q,
        1e-12,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::test_support::random_symmetric_state;
    use crate::gaussian::StandardForm;
    use crate::wigner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT3_2: f64 = 0.8660254037844386;

    #[test]
    fn bell_function_examples() {
        assert!((bell_function(0.0, 0.5, 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((bell_function(0.0, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        let v = bell_function(0.057085, 1.0, SQRT3_2).unwrap();
        assert!((v - 2.1652).abs() < 1e-3);
        assert!(bell_function(0.1, 1.0, 1.0).is_err());
        assert!(bell_function(-0.1, 1.0, 0.5).is_err());
    }

    #[test]
    fn optimal_displacement_examples() {
        assert_eq!(optimal_displacement(0.7, 0.0).unwrap(), 0.0);
        let i = optimal_displacement(1.0, SQRT3_2).unwrap();
        assert!((i - 0.057085).abs() < 1e-5);

        // Stationarity by central finite differences.
        let h = 1e-6 * i.max(1.0);
        let d = (bell_function(i + h, 1.0, SQRT3_2).unwrap()
            - bell_function(i - h, 1.0, SQRT3_2).unwrap())
            / (2.0 * h);
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn bell_max_examples() {
        assert!((bell_max(0.5, 0.0).unwrap() - 2.0).abs() < 1e-15);

        let v = bell_max(1.0, SQRT3_2).unwrap();
        assert!((v - 2.1652).abs() < 1e-3);
        assert!(v > 2.0);

        // Frozen from the golden-section oracle over the closed form.
        let (_, oracle) = bell_max_golden(1.0, 0.6).unwrap();
        let v = bell_max(1.0, 0.6).unwrap();
        assert!((v - oracle).abs() < 1e-9);
        assert!(v < 2.0);
        assert!((v - 0.8244).abs() < 1e-3);
    }

    #[test]
    fn bell_max_from_purity_examples() {
        assert!((bell_max_from_purity(1.0, 0.0).unwrap() - 2.0).abs() < 1e-15);

        let v = bell_max_from_purity(0.5, SQRT3_2).unwrap();
        assert!((v - bell_max(1.0, SQRT3_2).unwrap()).abs() < 1e-12);

        // T = 0.9 image of the pure n = 1 state.
        let v = bell_max_from_purity(1.0 / 1.9, 0.779422863405995 / 0.95).unwrap();
        assert!((v - 1.8273).abs() < 1e-3);
        assert!(v < 2.0);

        assert!(matches!(
            bell_max_from_purity(0.9, 0.8),
            Err(Error::UnphysicalPoint { .. })
        ));
    }

    #[test]
    fn region_boundary_examples() {
        let b = region_boundaries(0.0).unwrap();
        assert!(eq_close(b.mu_d, 1.0));
        assert!(eq_close(b.mu_b, 1.0));
        assert!(eq_close(b.mu_p, 1.0));

        let b = region_boundaries(0.8).unwrap();
        assert!((b.mu_d - 0.2).abs() < 1e-12);
        assert!((b.mu_p - 0.6).abs() < 1e-12);
        assert!((b.mu_b - 0.5784).abs() < 1e-4);
        // mu_B solves B~ = 2 at this column.
        assert!((bell_max_from_purity(b.mu_b, 0.8).unwrap() - 2.0).abs() < 1e-12);

        let b = region_boundaries(1.0 - 1e-9).unwrap();
        assert!(b.mu_d < 1e-8 && b.mu_b < 1e-4 && b.mu_p < 1e-4);
    }

    fn eq_close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn classify_region_examples() {
        assert_eq!(classify_region(0.5, SQRT3_2).unwrap().region, Region::III);
        assert_eq!(classify_region(0.1, 0.5).unwrap().region, Region::I);
        assert_eq!(classify_region(0.9, 0.8).unwrap().region, Region::Unphysical);
    }

    #[test]
    fn region_grid_examples() {
        let g = region_grid(2).unwrap();
        assert_eq!(g.len(), 4);
        assert!(region_grid(1).is_err());

        let g = region_grid(100).unwrap();
        for r in [Region::I, Region::II, Region::III, Region::Unphysical] {
            assert!(g.iter().any(|v| v.region == r), "missing region {r}");
        }
        // No violation without correlation.
        assert!(g
            .iter()
            .filter(|v| v.c_ab == 0.0)
            .all(|v| v.region != Region::III));
    }

    #[test]
    fn closed_form_matches_wigner_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let sf = random_symmetric_state(&mut rng);
            let (n, c) = (sf.n, sf.c1);
            if n - c.abs() < 1e-6 {
                continue;
            }
            let cm = sf.to_covariance_matrix();
            let i: f64 = rng.gen_range(0.0..2.0);
            let closed = bell_function(i, n, c).unwrap();
            let oracle = wigner::bell_combination(&cm, i).unwrap();
            assert!(
                (closed - oracle).abs() <= 1e-12 * closed.abs().max(1.0),
                "mismatch at n={n} c={c} i={i}: {closed} vs {oracle}"
            );
        }
    }

    #[test]
    fn stationarity_and_concavity_at_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..1000 {
            let sf = random_symmetric_state(&mut rng);
            let (n, c) = (sf.n, sf.c1);
            if c < 1e-5 || n - c < 1e-6 {
                continue;
            }
            let i = optimal_displacement(n, c).unwrap();
            let h = 1e-6 * i.max(1.0);
            if i <= h {
                continue;
            }
            let f = |x: f64| bell_function(x.max(0.0), n, c).unwrap();
            let d1 = (f(i + h) - f(i - h)) / (2.0 * h);
            let d2 = (f(i + h) - 2.0 * f(i) + f(i - h)) / (h * h);
            assert!(d1.abs() <= 1e-6, "gradient {d1} at n={n} c={c}");
            assert!(d2 < 0.0, "not a maximum at n={n} c={c}");
        }
    }

    #[test]
    fn analytic_max_matches_golden_section() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..1000 {
            let sf = random_symmetric_state(&mut rng);
            let (n, c) = (sf.n, sf.c1);
            if n - c < 1e-6 {
                continue;
            }
            let analytic = bell_max(n, c).unwrap();
            let (_, numeric) = bell_max_golden(n, c).unwrap();
            assert!(
                (analytic - numeric).abs() <= 1e-9,
                "n={n} c={c}: {analytic} vs {numeric}"
            );
        }
    }

    #[test]
    fn purity_form_equals_state_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..1000 {
            let sf = random_symmetric_state(&mut rng);
            let (n, c) = (sf.n, sf.c1);
            let a = bell_max(n, c).unwrap();
            let b = bell_max_from_purity(1.0 / (2.0 * n), c / n).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "n={n} c={c}");
        }
    }

    #[test]
    fn pure_states_violate_iff_correlated() {
        for n in [0.5001, 0.6, 1.0, 2.0, 5.0] {
            let sf = StandardForm::pure_symmetric(n).unwrap();
            let v = bell_max(sf.n, sf.c1).unwrap();
            if sf.c1 > 0.0 {
                assert!(v > 2.0, "pure n={n} should violate, got {v}");
            } else {
                assert!(v <= 2.0);
            }
        }
        assert!((bell_max(0.5, 0.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn no_separable_point_in_region_iii() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..2000 {
            let c_ab: f64 = rng.gen_range(0.0..1.0);
            let mu_s: f64 = rng.gen_range(1e-6..1.0);
            let v = classify_region(mu_s, c_ab).unwrap();
            if mu_s <= v.boundaries.mu_d {
                assert_ne!(v.region, Region::III);
            }
        }
    }

    #[test]
    fn boundary_ordering() {
        for k in 0..1000 {
            let c_ab = k as f64 / 1000.0;
            let b = region_boundaries(c_ab).unwrap();
            assert!(b.mu_d <= b.mu_b + 1e-12, "C={c_ab}");
            assert!(b.mu_b <= b.mu_p + 1e-12, "C={c_ab}");
        }
    }
}
