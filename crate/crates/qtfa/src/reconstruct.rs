//! Exact recovery of operators from Gabor-matrix diagonals.
//!
//! The mechanism is the finite sampling-periodization identity: for any
//! phase-space function `F` and lattice `Lambda`,
//!
//! ```text
//! sum_{lambda} F(lambda) e^{-2 pi i Omega(z, lambda)/N}
//!     = (|Lambda|/N) sum_{lambda-adj} (F_Omega F)(lambda-adj - z),
//! ```
//!
//! so diagonal samples of the polarised Cohen's class determine
//! `conj(F_W(S)) . F_W(T)` on a fundamental domain `Q` of the adjoint
//! lattice. When `F_W(T)` is supported in `Q` ("underspread") and the window
//! transform does not vanish there, division is exact and
//!
//! ```text
//! T = sum_lambda Q_S T(lambda, lambda) alpha_lambda(R),
//! F_W(R) = N . 1_Q / (|Lambda| . conj(F_W(S)))
//! ```
//!
//! recovers `T` to machine precision. Side diagonals reduce to the main
//! diagonal with window `rho(eta) S` and an explicit phase; upper
//! block-triangular symplectic matrices transport the theorem to A-Weyl
//! symbols; and lattice-periodic spreading functions (modulation-invariant
//! operators) are recovered from adjoint-lattice samples instead.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metaplectic::{mu_from, translation_intertwine_residual, MetaplecticOp};
use crate::phasespace::{FundamentalDomain, Grid, LatticeSpec, PhaseFn};
use crate::qha::{cohens_class_at, fourier_wigner, fourier_wigner_inverse, op_translate_at, parity_op};
use crate::quantize::{weyl_quantize, weyl_symbol, OperatorMat};
use crate::symplectic::{covariance_form, SympMat};
use crate::tfa::{rho_matrix, TFPoint};
use crate::util::{cis_pi, Prng};
use crate::C64;

/// Default floor below which a window transform counts as vanishing.
pub const WINDOW_FLOOR: f64 = 1e-8;

/// Window data for diagonal reconstruction on a lattice.
#[derive(Clone, Debug)]
pub struct UnderspreadSpec {
    lattice: LatticeSpec,
    domain: FundamentalDomain,
    window: OperatorMat,
    correction: OperatorMat,
}

impl UnderspreadSpec {
    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn domain(&self) -> &FundamentalDomain {
        &self.domain
    }

    pub fn window(&self) -> &OperatorMat {
        &self.window
    }

    /// The correction operator `R`.
    pub fn correction(&self) -> &OperatorMat {
        &self.correction
    }
}

/// Draw an operator with `F_W(T)` equal to seeded uniform values on `Q` and
/// zero elsewhere.
pub fn synth_underspread(grid: Grid, domain: &FundamentalDomain, seed: u64) -> OperatorMat {
    let mut rng = Prng::new(seed);
    let mut spread = PhaseFn::zero(grid);
    for &(x, w) in domain.points() {
        spread.set(x, w, rng.c64());
    }
    fourier_wigner_inverse(grid, &spread)
}

/// Build the correction operator for window `S` on `Lambda`; fails with the
/// offending point if `|F_W(S)|` dips below [`WINDOW_FLOOR`] on `Q`.
pub fn build_correction(s: &OperatorMat, lattice: &LatticeSpec) -> Result<UnderspreadSpec> {
    build_correction_with_floor(s, lattice, WINDOW_FLOOR)
}

pub fn build_correction_with_floor(
    s: &OperatorMat,
    lattice: &LatticeSpec,
    floor: f64,
) -> Result<UnderspreadSpec> {
    let grid = s.grid();
    grid.check_same(&lattice.grid())?;
    let domain = lattice.fundamental_domain();
    let spread = fourier_wigner(s);
    let n = grid.size() as f64;
    let count = lattice.len() as f64;
    let mut corr = PhaseFn::zero(grid);
    for &(x, w) in domain.points() {
        let v = spread.get(x, w);
        if v.norm() < floor {
            return Err(Error::WindowVanishes(x, w, v.norm()));
        }
        corr.set(x, w, C64::new(n / count, 0.0) / v.conj());
    }
    let correction = fourier_wigner_inverse(grid, &corr);
    Ok(UnderspreadSpec { lattice: lattice.clone(), domain, window: s.clone(), correction })
}

/// `T = sum_lambda samples(lambda) alpha_lambda(R)`; exact whenever the true
/// operator has `F_W(T)` supported in `Q`.
pub fn reconstruct_diagonal(samples: &[C64], spec: &UnderspreadSpec) -> Result<OperatorMat> {
    if samples.len() != spec.lattice.len() {
        return Err(Error::LengthMismatch { expected: spec.lattice.len(), got: samples.len() });
    }
    let grid = spec.window.grid();
    let mut acc = OperatorMat::zero(grid);
    for (&l, &c) in spec.lattice.points().iter().zip(samples) {
        if c != C64::default() {
            acc = acc.add(&op_translate_at(grid, l, &spec.correction).scale(c));
        }
    }
    Ok(acc)
}

/// Reconstruct from the side diagonal `Q_S T(lambda, lambda + eta)`.
///
/// `spec` must be built from the shifted window `rho(eta) S`; the samples are
/// rotated onto the main diagonal of that window by the exact phase
/// `e^{-i pi (2 eta_1 lambda_2 + eta_1 eta_2)/N}`.
pub fn reconstruct_side_diagonal(
    samples: &[C64],
    spec: &UnderspreadSpec,
    eta: TFPoint,
) -> Result<OperatorMat> {
    let (e1, e2) = eta.coords();
    if !spec.lattice.contains(e1, e2) {
        return Err(Error::EtaNotInLattice(e1, e2));
    }
    if samples.len() != spec.lattice.len() {
        return Err(Error::LengthMismatch { expected: spec.lattice.len(), got: samples.len() });
    }
    let n = spec.window.grid().size() as f64;
    let rotated: Vec<C64> = spec
        .lattice
        .points()
        .iter()
        .zip(samples)
        .map(|(&(_, l2), &s)| s * cis_pi(-((2 * e1 * l2 + e1 * e2) as f64) / n))
        .collect();
    reconstruct_diagonal(&rotated, spec)
}

/// Shift a window for side-diagonal use: `rho(eta) S`.
pub fn shifted_window(s: &OperatorMat, eta: TFPoint) -> OperatorMat {
    let (e1, e2) = eta.coords();
    rho_matrix(s.grid(), e1, e2).mul(s)
}

/// Reconstruction of `T` from diagonal samples of `Q_{S'} T` where
/// `S' = mu(A)^* S`, for an upper block-triangular symplectic `A`.
///
/// The provider is called once with the sample lattice
/// `Lambda' = A1^{-1} Lambda` and must return `Q_{S'} T(lambda', lambda')` in
/// order. Internally the samples coincide with the diagonal of
/// `Q_S(mu(A) T)` on `Lambda`, so the plain reconstruction runs there and the
/// result is pulled back through `mu(A)^{-1}` at symbol level.
pub fn reconstruct_metaplectic(
    samples_provider: impl FnOnce(&[(i64, i64)]) -> Result<Vec<C64>>,
    a: &SympMat,
    s: &OperatorMat,
    lattice: &LatticeSpec,
) -> Result<OperatorMat> {
    let grid = s.grid();
    let b = covariance_form(a).ok_or(Error::NotCovarianceForm)?;
    let mu = mu_from(grid, a)?;
    let b_inv = b.clone().try_inverse().ok_or(Error::Singular)?;

    // grid compatibility: the pipeline only needs exact translation transport
    let resid = translation_intertwine_residual(&mu, &b_inv, lattice.points())?;
    if resid > 1e-6 {
        return Err(Error::GridIncompatible(resid));
    }

    // sample lattice Lambda' = A1^{-1} Lambda, must be integral
    let mut lam_prime = Vec::with_capacity(lattice.len());
    for &(l1, l2) in lattice.points() {
        let img = &b_inv * DMatrix::from_row_slice(2, 1, &[l1 as f64, l2 as f64]);
        let p1 = img[(0, 0)];
        let p2 = img[(1, 0)];
        if (p1 - p1.round()).abs() > 1e-9 || (p2 - p2.round()).abs() > 1e-9 {
            return Err(Error::LatticeImageNotIntegral);
        }
        lam_prime.push((p1.round() as i64, p2.round() as i64));
    }

    let samples = samples_provider(&lam_prime)?;
    let spec = build_correction(s, lattice)?;
    let transported = reconstruct_diagonal(&samples, &spec)?; // = mu(A) T
    let sigma = mu.adjoint_apply_phasefn(&weyl_symbol(&transported));
    Ok(weyl_quantize(&sigma))
}

/// The window operator `S' = mu(A)^* S` used by the metaplectic pipeline.
pub fn pullback_window(s: &OperatorMat, mu: &MetaplecticOp) -> OperatorMat {
    weyl_quantize(&mu.adjoint_apply_phasefn(&weyl_symbol(s)))
}

/// Reconstruct a lattice-modulation-invariant operator from adjoint-lattice
/// diagonal samples:
///
/// ```text
/// T = (2 / (k . conj(sigma_S(0)))) . sum_{mu in Lambda-adj, reps}
///         Q_S T(mu, mu) rho(2 mu) P
/// ```
///
/// where `k` counts `{0, N/2}^2 /\ Lambda-adj` (4 for even lattice steps).
/// The window symbol must be supported off `Lambda-adj + (N/2)Z^2` except at
/// the origin, where it must not vanish.
pub fn reconstruct_mod_invariant(
    t: &OperatorMat,
    s: &OperatorMat,
    lattice: &LatticeSpec,
) -> Result<OperatorMat> {
    let grid = t.grid();
    grid.check_same(&s.grid())?;
    grid.check_same(&lattice.grid())?;
    let n = grid.size() as i64;
    let sigma_s = weyl_symbol(s);
    let origin = sigma_s.get(0, 0);
    if origin.norm() < WINDOW_FLOOR {
        return Err(Error::SymbolVanishesAtZero(origin.norm()));
    }

    let adj = lattice.adjoint();
    let half_pts = [(0i64, 0i64), (n / 2, 0), (0, n / 2), (n / 2, n / 2)];
    let k = half_pts.iter().filter(|&&(x, w)| adj.contains(x, w)).count() as f64;

    // support condition: sigma_S vanishes on (adjoint + (N/2)Z^2) \ {0}
    let tol = 1e-10 * sigma_s.values().iter().map(|c| c.norm()).fold(0.0, f64::max);
    for (x, w) in grid.points() {
        if (x, w) == (0, 0) || sigma_s.get(x, w).norm() <= tol {
            continue;
        }
        let aliased = half_pts.iter().any(|&(px, pw)| adj.contains(x - px, w - pw));
        if aliased {
            return Err(Error::SupportViolation(x, w));
        }
    }

    let p = parity_op(grid);
    let mut acc = OperatorMat::zero(grid);
    for &(m1, m2) in adj.points() {
        let sample = cohens_class_at(t, s, (m1, m2), (m1, m2))?;
        let term = rho_matrix(grid, 2 * m1, 2 * m2).mul(&p).scale(sample);
        acc = acc.add(&term);
    }
    Ok(acc.scale(C64::new(2.0, 0.0) / (origin.conj() * k)))
}

/// Left side of the finite sampling-periodization identity, for tests and
/// demos: `sum_lambda F(lambda) e^{-2 pi i Omega(z, lambda)/N}`.
pub fn lattice_character_sum(f: &PhaseFn, lattice: &LatticeSpec, z: (i64, i64)) -> C64 {
    let n = f.grid().size() as f64;
    lattice
        .points()
        .iter()
        .map(|&(l1, l2)| {
            f.get(l1, l2) * cis_pi(-2.0 * ((z.0 * l2 - z.1 * l1) as f64) / n)
        })
        .sum()
}
