//! Lossy beam-splitter channel acting on the symmetric family, criteria and
//! Bell sweeps versus transmittivity, and threshold root-finding.
//!
//! The channel law is `n_T = (1 - T)/2 + T n` and `c_T = T c`: each arm is
//! mixed with vacuum on a beam splitter of transmittivity `T`.

use serde::Serialize;

use crate::bell::{self, Region};
use crate::criteria::{self, ReidDirection};
use crate::error::{Error, Result};
use crate::gaussian::StandardForm;
use crate::numeric::bisect;

/// Per-transmittivity record of the evolved state and its analyses.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChannelSweepRow {
    pub t: f64,
    pub n_t: f64,
    pub c_t: f64,
    pub mu_s: f64,
    pub c_ab: f64,
    pub phs_witness: f64,
    pub duan_witness: f64,
    pub reid_witness: f64,
    pub bell_max: f64,
    pub region: Region,
}

/// Loss channel of transmittivity `T in [0, 1]` on a symmetric-family state.
pub fn apply_loss(sf: &StandardForm, t: f64) -> Result<StandardForm> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "transmittivity must be in [0, 1], got {t}"
        )));
    }
    if !sf.is_symmetric(1e-9) {
        return Err(Error::UnsupportedShape(
            "loss channel law is stated for the symmetric family only".into(),
        ));
    }
    let n_t = 0.5 * (1.0 - t) + t * sf.n;
    let c_t = t * sf.c1;
    Ok(StandardForm::new(n_t, n_t, c_t, -c_t))
}

fn require_pure_symmetric(sf: &StandardForm, tol: f64) -> Result<()> {
    if !sf.is_symmetric(tol) {
        return Err(Error::UnsupportedShape(
            "ancestor must be in the symmetric family".into(),
        ));
    }
    let purity = sf.to_covariance_matrix().purity(tol)?;
    if (purity - 1.0).abs() > tol.max(1e-12) * 1.0_f64.max(purity) {
        return Err(Error::Domain(format!(
            "ancestor must be pure (purity 1), got purity {purity}"
        )));
    }
    Ok(())
}

/// Evolves a pure symmetric ancestor over a grid of transmittivities and
/// analyzes each evolved state. Grid values must lie in `(0, 1]`.
pub fn sweep(sf0: &StandardForm, t_grid: &[f64], tol: f64) -> Result<Vec<ChannelSweepRow>> {
    require_pure_symmetric(sf0, tol)?;
    t_grid
        .iter()
        .map(|&t| {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Domain(format!(
                    "sweep grid values must be in (0, 1], got {t}"
                )));
            }
            let ev = apply_loss(sf0, t)?;
            let mu_s = ev.single_mode_purity(tol)?;
            let c_ab = ev.correlation_coefficient(tol)?;
            let verdict = bell::classify_region(mu_s, c_ab)?;
            Ok(ChannelSweepRow {
                t,
                n_t: ev.n,
                c_t: ev.c1,
                mu_s,
                c_ab,
                phs_witness: criteria::phs_check(&ev).witness,
                duan_witness: criteria::duan_check(&ev).witness,
                reid_witness: criteria::reid_check(&ev, ReidDirection::AInfersB).witness,
                bell_max: bell::bell_max(ev.n, ev.c1)?,
                region: verdict.region,
            })
        })
        .collect()
}

fn bell_max_at(sf0: &StandardForm, t: f64) -> f64 {
    let ev = apply_loss(sf0, t).unwrap();
    bell::bell_max(ev.n, ev.c1).unwrap()
}

/// Transmittivity below which the evolved state stops violating the Bell
/// bound, found by bisection to 1e-9. `None` if the ancestor itself does
/// not violate (e.g. vacuum).
///
/// The bracket `[T_lo, 1]` is located by grid descent in steps of 0.01 and
/// monotonicity on it is verified by a 50-point scan before bisecting.
pub fn bell_threshold(sf0: &StandardForm, tol: f64) -> Result<Option<f64>> {
    require_pure_symmetric(sf0, tol)?;
    if bell_max_at(sf0, 1.0) <= 2.0 {
        return Ok(None);
    }
    let mut t_lo = 1.0;
    while t_lo > 0.01 && bell_max_at(sf0, t_lo) >= 2.0 {
        t_lo -= 0.01;
    }
    if bell_max_at(sf0, t_lo) >= 2.0 {
        // Never drops below the bound on the grid; no crossing to find.
        return Ok(None);
    }
    let mut prev = bell_max_at(sf0, t_lo);
    for k in 1..=50 {
        let t = t_lo + (1.0 - t_lo) * k as f64 / 50.0;
        let v = bell_max_at(sf0, t);
        if v < prev - 1e-12 {
            return Err(Error::Domain(format!(
                "Bell value not monotone on the bisection bracket near T = {t}"
            )));
        }
        prev = v;
    }
    let root = bisect(|t| bell_max_at(sf0, t) - 2.0, t_lo, 1.0, 1e-9);
    Ok(Some(root))
}

/// Transmittivity threshold for the Duan verdict. Always `None` for a valid
/// (pure symmetric) ancestor: the Duan witness scales linearly with `T`, so
/// its sign is preserved for all `T in (0, 1]`. The function exists to
/// assert that persistence programmatically.
pub fn duan_threshold(sf0: &StandardForm, tol: f64) -> Result<Option<f64>> {
    require_pure_symmetric(sf0, tol)?;
    let w1 = criteria::duan_check(sf0).witness;
    for k in 1..=100 {
        let t = k as f64 / 100.0;
        let w = criteria::duan_check(&apply_loss(sf0, t)?).witness;
        debug_assert!(
            (w - t * w1).abs() <= 1e-12 * w1.abs().max(1.0),
            "Duan witness not linear in T"
        );
        if w1 < 0.0 && w >= 0.0 {
            return Err(Error::Domain(format!(
                "Duan sign unexpectedly flipped at T = {t}"
            )));
        }
    }
    Ok(None)
}
