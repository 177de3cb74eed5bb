//! Covariance-matrix data model for two-mode Gaussian states: symplectic
//! invariants, physicality, purity, and standard-form extraction.
//!
//! Quadrature ordering is `(X_a, Y_a, X_b, Y_b)` with vacuum variance 1/2
//! and `[X, Y] = i`.

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for saturated comparisons (purity 1,
/// uncertainty-bound equality).
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Variance of each vacuum quadrature in the adopted convention.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Symmetric 4x4 covariance matrix of the quadrature second moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceMatrix {
    entries: Matrix4<f64>,
}

/// The four parameters of the standard form: diagonal blocks `n I`, `m I`
/// and off-diagonal block `diag(c1, c2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardForm {
    pub n: f64,
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Local symplectic invariants and the derived symplectic spectrum.
///
/// `d_minus`/`d_plus` are NaN when the invariants admit no real symplectic
/// spectrum (possible only for unphysical inputs).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SymplecticInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub delta: f64,
    pub d_minus: f64,
    pub d_plus: f64,
}

/// Outcome of the physicality test, exposing both the symplectic-eigenvalue
/// verdict and the squared-invariant inequality for comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhysicalityReport {
    pub physical: bool,
    pub positive_definite: bool,
    pub d_minus: f64,
    /// Left side of the invariant inequality, `I1 + I2 + 2 I3`.
    pub invariant_lhs: f64,
    /// Right side of the invariant inequality, `4 I4 + 1/4`.
    pub invariant_rhs: f64,
    /// Whether the invariant inequality holds. Can disagree with `physical`:
    /// the squared form admits false positives when `d_minus < 1/2`.
    pub invariant_inequality_holds: bool,
}

impl CovarianceMatrix {
    /// Builds a covariance matrix from row-major entries.
    ///
    /// The entries must be symmetric exactly as stored.
    pub fn from_rows(rows: [[f64; 4]; 4]) -> Result<Self> {
        for h in 0..4 {
            for k in 0..h {
                if rows[h][k] != rows[k][h] {
                    return Err(Error::MalformedMatrix(format!(
                        "entry ({h},{k}) = {} differs from ({k},{h}) = {}",
                        rows[h][k], rows[k][h]
                    )));
                }
            }
        }
        Ok(Self {
            entries: Matrix4::from_fn(|r, c| rows[r][c]),
        })
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.entries
    }

    pub fn entry(&self, h: usize, k: usize) -> f64 {
        self.entries[(h, k)]
    }

    /// Self-correlation block of mode a.
    pub fn block_alpha(&self) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(0, 0).into()
    }

    /// Self-correlation block of mode b.
    pub fn block_beta(&self) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(2, 2).into()
    }

    /// Cross-correlation block.
    pub fn block_gamma(&self) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(0, 2).into()
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }

    /// Local symplectic invariants `I1..I4` and the symplectic spectrum.
    pub fn symplectic_invariants(&self) -> SymplecticInvariants {
        let i1 = self.block_alpha().determinant();
        let i2 = self.block_beta().determinant();
        let i3 = self.block_gamma().determinant();
        let i4 = self.determinant();
        let delta = i1 + i2 + 2.0 * i3;

        let mut disc = delta * delta - 4.0 * i4;
        // Near-degenerate spectra land within rounding of disc = 0 on either
        // side; snap them to zero so the sqrt does not amplify the noise.
        let disc_floor = 1e-12 * (delta * delta).max(1.0);
        if disc.abs() <= disc_floor {
            disc = 0.0;
        }
        let (d_minus, d_plus) = if disc >= 0.0 && delta >= 0.0 {
            let s = disc.sqrt();
            let lo = 0.5 * (delta - s);
            let hi = 0.5 * (delta + s);
            (lo.max(0.0).sqrt(), hi.max(0.0).sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };

        SymplecticInvariants {
            i1,
            i2,
            i3,
            i4,
            delta,
            d_minus,
            d_plus,
        }
    }

    fn is_positive_definite(&self) -> bool {
        self.entries.symmetric_eigen().eigenvalues.iter().all(|&e| e > 0.0)
    }

    /// Physicality test: positive-definite and smallest symplectic
    /// eigenvalue at least 1/2.
    ///
    /// The invariant inequality `I1 + I2 + 2 I3 <= 4 I4 + 1/4` is reported
    /// alongside; it is necessary but not sufficient (it is the squared form
    /// of the eigenvalue condition).
    pub fn physicality(&self, tol: f64) -> PhysicalityReport {
        let inv = self.symplectic_invariants();
        let positive_definite = self.is_positive_definite();
        let lhs = inv.delta;
        let rhs = 4.0 * inv.i4 + 0.25;
        // d_minus >= 1/2 is tested through its algebraic equivalent
        // (delta >= 1/2 together with the invariant inequality), which
        // avoids the half-precision loss of sqrt near a degenerate spectrum.
        let slack = tol * rhs.abs().max(1.0);
        let spectrum_ok = inv.d_minus.is_finite()
            && inv.delta >= 0.5 - slack
            && lhs <= rhs + slack;
        PhysicalityReport {
            physical: positive_definite && spectrum_ok,
            positive_definite,
            d_minus: inv.d_minus,
            invariant_lhs: lhs,
            invariant_rhs: rhs,
            invariant_inequality_holds: lhs <= rhs + tol * rhs.abs().max(1.0),
        }
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.physicality(tol).physical
    }

    /// Purity `1 / (4 sqrt(det sigma))`; equals 1 iff `det sigma = 1/16`.
    pub fn purity(&self, tol: f64) -> Result<f64> {
        if !self.is_physical(tol) {
            return Err(Error::Unphysical(
                "purity is defined for physical states only".into(),
            ));
        }
        Ok(1.0 / (4.0 * self.determinant().sqrt()))
    }

    /// Recovers the standard-form parameters `(n, m, c1, c2)` from the
    /// symplectic invariants.
    ///
    /// Sign convention: `c1 >= 0` and `|c1| >= |c2|`.
    pub fn standard_form(&self, tol: f64) -> Result<StandardForm> {
        if !self.is_physical(tol) {
            return Err(Error::Unphysical(
                "standard form is defined for physical states only".into(),
            ));
        }
        let inv = self.symplectic_invariants();
        let n = inv.i1.max(0.0).sqrt();
        let m = inv.i2.max(0.0).sqrt();
        let nm = n * m;

        // c1^2 and c2^2 are the roots of t^2 - s t + I3^2 = 0 with
        // s = (nm^2 + I3^2 - I4) / nm, from c1 c2 = I3 and
        // (nm - c1^2)(nm - c2^2) = I4.
        let s = (nm * nm + inv.i3 * inv.i3 - inv.i4) / nm;
        let mut disc = s * s - 4.0 * inv.i3 * inv.i3;
        if s < -tol || disc < -tol * s.abs().max(1.0) {
            return Err(Error::InconsistentInvariants);
        }
        // |c1| = |c2| makes this a double root; snap rounding noise to zero
        // so the sqrt cannot split the pair.
        if disc.abs() <= 1e-12 * (s * s).max(1.0) {
            disc = 0.0;
        }
        let u = 0.5 * (s.max(0.0) + disc.max(0.0).sqrt());
        let c1 = u.max(0.0).sqrt();
        let c2 = if c1 > 1e-300 {
            inv.i3 / c1
        } else {
            // Degenerate c1 = 0 forces c2 = 0; break ties toward c2 <= 0.
            0.0
        };
        Ok(StandardForm { n, m, c1, c2 })
    }
}

impl StandardForm {
    pub fn new(n: f64, m: f64, c1: f64, c2: f64) -> Self {
        Self { n, m, c1, c2 }
    }

    /// Pure symmetric state `(n, n, c, -c)` with `c = sqrt(n^2 - 1/4)`.
    pub fn pure_symmetric(n: f64) -> Result<Self> {
        if n < 0.5 {
            return Err(Error::Domain(format!(
                "pure symmetric state requires n >= 1/2, got {n}"
            )));
        }
        let c = (n * n - 0.25).sqrt();
        Ok(Self::new(n, n, c, -c))
    }

    /// Symmetric family shape: `n == m` and `c1 == -c2`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.n.abs().max(1.0);
        (self.n - self.m).abs() <= tol * scale && (self.c1 + self.c2).abs() <= tol * scale
    }

    /// Single-subsystem purity `mu_s = 1 / (2n)`, symmetric family only.
    pub fn single_mode_purity(&self, tol: f64) -> Result<f64> {
        self.require_symmetric(tol)?;
        Ok(1.0 / (2.0 * self.n))
    }

    /// Correlation coefficient `C_ab = c1 / n`, symmetric family only.
    pub fn correlation_coefficient(&self, tol: f64) -> Result<f64> {
        self.require_symmetric(tol)?;
        Ok(self.c1 / self.n)
    }

    fn require_symmetric(&self, tol: f64) -> Result<()> {
        if !self.is_symmetric(tol) {
            return Err(Error::UnsupportedShape(
                "operation is defined on the symmetric family (n = m, c1 = -c2) only".into(),
            ));
        }
        Ok(())
    }

    /// Assembles the explicit 4x4 covariance matrix.
    pub fn to_covariance_matrix(&self) -> CovarianceMatrix {
        let Self { n, m, c1, c2 } = *self;
        CovarianceMatrix::from_rows([
            [n, 0.0, c1, 0.0],
            [0.0, n, 0.0, c2],
            [c1, 0.0, m, 0.0],
            [0.0, c2, 0.0, m],
        ])
        .expect("standard-form matrix is symmetric by construction")
    }
}

/// JSON document accepted on the CLI: exactly one of `matrix` (4x4 rows)
/// or `standard_form`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmDocument {
    #[serde(default)]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub standard_form: Option<StandardForm>,
}

/// Parses a covariance-matrix JSON document.
pub fn parse_cm_json(text: &str) -> Result<CovarianceMatrix> {
    let doc: CmDocument =
        serde_json::from_str(text).map_err(|e| Error::MalformedMatrix(e.to_string()))?;
    match (doc.matrix, doc.standard_form) {
        (Some(rows), None) => {
            if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
                return Err(Error::MalformedMatrix("matrix must be 4x4".into()));
            }
            let mut entries = [[0.0; 4]; 4];
            for (h, row) in rows.iter().enumerate() {
                entries[h].copy_from_slice(row);
            }
            CovarianceMatrix::from_rows(entries)
        }
        (None, Some(sf)) => Ok(sf.to_covariance_matrix()),
        _ => Err(Error::MalformedMatrix(
            "exactly one of \"matrix\" or \"standard_form\" is required".into(),
        )),
    }
}
