//! PHS, Duan and Reid entanglement criteria as scalar witnesses.
//!
//! Boundary values (witness exactly at threshold) map to the non-entangled
//! verdict: the inequalities certifying entanglement are strict. The raw
//! witness is exposed so callers can apply their own tolerance.

use serde::Serialize;

use crate::gaussian::StandardForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CriterionName {
    #[serde(rename = "PHS")]
    Phs,
    #[serde(rename = "Duan")]
    Duan,
    #[serde(rename = "Reid-AB")]
    ReidAb,
    #[serde(rename = "Reid-BA")]
    ReidBa,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "separable-consistent")]
    SeparableConsistent,
    #[serde(rename = "entangled")]
    Entangled,
    #[serde(rename = "epr-steerable")]
    EprSteerable,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriterionReport {
    pub name: CriterionName,
    pub witness: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

/// Which mode infers the other in the Reid criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReidDirection {
    AInfersB,
    BInfersA,
}

/// PHS (positivity under partial transposition) check. Necessary and
/// sufficient for two-mode Gaussian states: separable iff
/// `n^2 + m^2 + 2|c1 c2| - 4 (nm - c1^2)(nm - c2^2) <= 1/4`.
pub fn phs_check(sf: &StandardForm) -> CriterionReport {
    let StandardForm { n, m, c1, c2 } = *sf;
    let nm = n * m;
    let witness =
        n * n + m * m + 2.0 * (c1 * c2).abs() - 4.0 * (nm - c1 * c1) * (nm - c2 * c2);
    CriterionReport {
        name: CriterionName::Phs,
        witness,
        threshold: 0.25,
        verdict: if witness > 0.25 {
            Verdict::Entangled
        } else {
            Verdict::SeparableConsistent
        },
    }
}

/// Duan check in the standard-form specialization:
/// entangled if `sqrt((2n-1)(2m-1)) - (c1 - c2) < 0`; non-violation is
/// inconclusive.
pub fn duan_check(sf: &StandardForm) -> CriterionReport {
    let StandardForm { n, m, c1, c2 } = *sf;
    let product = ((2.0 * n - 1.0) * (2.0 * m - 1.0)).max(0.0);
    let witness = product.sqrt() - (c1 - c2);
    CriterionReport {
        name: CriterionName::Duan,
        witness,
        threshold: 0.0,
        verdict: if witness < 0.0 {
            Verdict::Entangled
        } else {
            Verdict::Inconclusive
        },
    }
}

/// Reid inference-variance check: steerable (in the given direction) if
/// `n^2 (1 - c1^2/nm)(1 - c2^2/nm) < 1/4` (leading `n^2` becomes `m^2`
/// when b infers a). Asymmetric for n != m; non-violation is inconclusive.
pub fn reid_check(sf: &StandardForm, direction: ReidDirection) -> CriterionReport {
    let StandardForm { n, m, c1, c2 } = *sf;
    let nm = n * m;
    let leading = match direction {
        ReidDirection::AInfersB => n * n,
        ReidDirection::BInfersA => m * m,
    };
    let witness = leading * (1.0 - c1 * c1 / nm) * (1.0 - c2 * c2 / nm);
    CriterionReport {
        name: match direction {
            ReidDirection::AInfersB => CriterionName::ReidAb,
            ReidDirection::BInfersA => CriterionName::ReidBa,
        },
        witness,
        threshold: 0.25,
        verdict: if witness < 0.25 {
            Verdict::EprSteerable
        } else {
            Verdict::Inconclusive
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub reports: Vec<CriterionReport>,
    /// Reid-steerable (either direction) must imply PHS-entangled.
    pub hierarchy_consistent: bool,
}

/// Runs all criteria in order (PHS, Duan, Reid a->b, Reid b->a).
pub fn classify(sf: &StandardForm) -> Classification {
    let phs = phs_check(sf);
    let duan = duan_check(sf);
    let reid_ab = reid_check(sf, ReidDirection::AInfersB);
    let reid_ba = reid_check(sf, ReidDirection::BInfersA);
    let steerable = reid_ab.verdict == Verdict::EprSteerable
        || reid_ba.verdict == Verdict::EprSteerable;
    let hierarchy_consistent = !steerable || phs.verdict == Verdict::Entangled;
    Classification {
        reports: vec![phs, duan, reid_ab, reid_ba],
        hierarchy_consistent,
    }
}
