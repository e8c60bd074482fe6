//! Time-frequency analysis of operators.
//!
//! Operator translations conjugate by symmetric shifts, modulations conjugate
//! one-sidedly by half-shifts, and the two combine into the operator
//! time-frequency shift `gamma_{w,z}`. The matrix coefficients of an operator
//! against the `gamma`-orbit of a window are the polarised Cohen's class
//! `Q_S T`, whose lattice restriction is the Gabor (channel) matrix.
//!
//! Pinned finite-model identities (all exact, see tests):
//!
//! ```text
//! F_W(S)(z)              = tr(rho(-z) S),   F_W(f (x) g) = A(f, g)
//! F_W(alpha_z S)(zeta)   = e^{-2 pi i Omega(z, zeta)/N} F_W(S)(zeta)
//! F_W(beta_w S)(zeta)    = F_W(S)(zeta - w)        (2N-periodic evaluation)
//! F_Omega(S * T)         = F_W(S) . F_W(T)
//! F_W(f * S)             = F_Omega(f) . F_W(S),    f * S = (1/N) sum f(z) alpha_z(S)
//! (g(x)g) * (f(x)f)      = |V_{Pg} f|^2            (P the parity operator)
//! Q_S T(w, w)            = (1/N) <sigma_T, T_w sigma_S>
//! F_Omega(diag Q_S T)    = conj(F_W(S)) . F_W(T)
//! sum_{w,z} |Q_S T|^2    = N^2 ||T||^2 ||S||^2
//! ```

use crate::error::{Error, Result};
use crate::phasespace::{Grid, LatticeSpec, PhaseFn};
use crate::quantize::{accumulate_rho, hs_inner, OperatorMat};
use crate::tfa::{rho_matrix, TFPoint};
use crate::util::cis_pi;
use crate::C64;

/// A point of operator phase space: `w` indexes the analysis side, `z` the
/// synthesis side of `gamma_{w,z}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OpTFPoint {
    pub w: TFPoint,
    pub z: TFPoint,
}

impl OpTFPoint {
    pub fn new(grid: Grid, w: (i64, i64), z: (i64, i64)) -> OpTFPoint {
        OpTFPoint { w: TFPoint::new(grid, w.0, w.1), z: TFPoint::new(grid, z.0, z.1) }
    }

    pub fn diagonal(grid: Grid, w: (i64, i64)) -> OpTFPoint {
        OpTFPoint::new(grid, w, w)
    }
}

/// Operator translation `alpha_z(S) = rho(z) S rho(z)^*`.
pub fn op_translate(z: TFPoint, s: &OperatorMat) -> Result<OperatorMat> {
    Ok(op_translate_at(s.grid(), z.coords(), s))
}

pub(crate) fn op_translate_at(grid: Grid, z: (i64, i64), s: &OperatorMat) -> OperatorMat {
    let r = rho_matrix(grid, z.0, z.1);
    r.mul(s).mul(&r.adjoint())
}

/// Parity conjugation `S-check = P S P` with `(Pf)(t) = f(-t)`.
pub fn parity(s: &OperatorMat) -> OperatorMat {
    let grid = s.grid();
    OperatorMat::from_fn(grid, |a, b| s.get(-a, -b))
}

/// The parity operator itself.
pub fn parity_op(grid: Grid) -> OperatorMat {
    OperatorMat::from_fn(grid, |s, t| {
        if grid.reduce(s + t) == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::default()
        }
    })
}

/// Operator modulation `beta_w(S) = rho(w/2) S rho(w/2)`; needs both
/// coordinates of `w` even so the half-shift lands on the grid.
pub fn op_modulate(w: TFPoint, s: &OperatorMat) -> Result<OperatorMat> {
    let (wx, ww) = w.coords();
    if wx % 2 != 0 || ww % 2 != 0 {
        return Err(Error::OddModulation(wx, ww));
    }
    let half = rho_matrix(s.grid(), wx / 2, ww / 2);
    Ok(half.mul(s).mul(&half))
}

/// Operator time-frequency shift
/// `gamma_{w,z}(S) = e^{-pi i (z1 z2 - w1 w2)/N} rho(z) S rho(w)^*`.
pub fn op_tf_shift(p: OpTFPoint, s: &OperatorMat) -> Result<OperatorMat> {
    Ok(gamma_at(s.grid(), p.w.coords(), p.z.coords(), s))
}

/// `gamma_{w,z}(S)` at raw integer coordinates (2N-periodic in each).
pub(crate) fn gamma_at(grid: Grid, w: (i64, i64), z: (i64, i64), s: &OperatorMat) -> OperatorMat {
    let n = grid.size() as f64;
    let phase = cis_pi(-((z.0 * z.1 - w.0 * w.1) as f64) / n);
    rho_matrix(grid, z.0, z.1).mul(s).mul(&rho_matrix(grid, w.0, w.1).adjoint()).scale(phase)
}

/// Fourier-Wigner transform `F_W(S)(z) = tr(rho(-z) S)`.
pub fn fourier_wigner(s: &OperatorMat) -> PhaseFn {
    let grid = s.grid();
    let n = grid.size() as f64;
    // tr(rho(-z) S) = e^{-pi i x w/N} sum_t e^{-2 pi i w t/N} S(t + x, t)
    PhaseFn::from_fn(grid, |x, w| {
        let mut acc = C64::default();
        for t in grid.values() {
            acc += cis_pi(-2.0 * (w * t) as f64 / n) * s.get(t + x, t);
        }
        acc * cis_pi(-((x * w) as f64) / n)
    })
}

/// Inverse of the Fourier-Wigner transform: `S = (1/N) sum_z G(z) rho(z)`.
pub fn fourier_wigner_inverse(grid: Grid, spread: &PhaseFn) -> OperatorMat {
    accumulate_rho(grid, spread)
}

/// Operator-operator convolution `(S * T)(z) = tr(S alpha_z(T-check))`,
/// a phase-space function.
pub fn op_conv_oo(s: &OperatorMat, t: &OperatorMat) -> Result<PhaseFn> {
    s.grid().check_same(&t.grid())?;
    let grid = s.grid();
    let tc = parity(t);
    Ok(PhaseFn::from_fn(grid, |x, w| {
        let shifted = op_translate_at(grid, (x, w), &tc);
        // tr(S . shifted)
        grid.values()
            .map(|a| {
                grid.values()
                    .map(|b| s.get(a, b) * shifted.get(b, a))
                    .sum::<C64>()
            })
            .sum()
    }))
}

/// Function-operator convolution `f * S = (1/N) sum_z f(z) alpha_z(S)`,
/// an operator. The `1/N` makes `F_W(f * S) = F_Omega(f) . F_W(S)` exact.
pub fn op_conv_fo(f: &PhaseFn, s: &OperatorMat) -> Result<OperatorMat> {
    f.grid().check_same(&s.grid())?;
    let grid = s.grid();
    let mut acc = OperatorMat::zero(grid);
    for (x, w) in grid.points() {
        let c = f.get(x, w);
        if c != C64::default() {
            acc = acc.add(&op_translate_at(grid, (x, w), s).scale(c));
        }
    }
    Ok(acc.scale(C64::new(1.0 / grid.size() as f64, 0.0)))
}

/// Polarised Cohen's class `Q_S T(w, z) = <T, gamma_{w,z}(S)>_HS`.
pub fn cohens_class(t: &OperatorMat, s: &OperatorMat, p: OpTFPoint) -> Result<C64> {
    cohens_class_at(t, s, p.w.coords(), p.z.coords())
}

/// `Q_S T` at raw integer coordinates (2N-periodic in each slot).
pub fn cohens_class_at(t: &OperatorMat, s: &OperatorMat, w: (i64, i64), z: (i64, i64)) -> Result<C64> {
    t.grid().check_same(&s.grid())?;
    hs_inner(t, &gamma_at(t.grid(), w, z, s))
}

/// The Gabor (channel) matrix: `Q_S T` sampled on `Lambda x M`.
#[derive(Clone, Debug)]
pub struct GaborMatrix {
    pub lattice_row: LatticeSpec,
    pub lattice_col: LatticeSpec,
    /// entries\[i\]\[j\] = Q_S T(lambda_i, mu_j)
    pub entries: Vec<Vec<C64>>,
}

pub fn gabor_matrix(
    t: &OperatorMat,
    s: &OperatorMat,
    lam: &LatticeSpec,
    mu: &LatticeSpec,
) -> Result<GaborMatrix> {
    t.grid().check_same(&s.grid())?;
    let mut entries = Vec::with_capacity(lam.len());
    for &l in lam.points() {
        let mut row = Vec::with_capacity(mu.len());
        for &m in mu.points() {
            row.push(cohens_class_at(t, s, l, m)?);
        }
        entries.push(row);
    }
    Ok(GaborMatrix { lattice_row: lam.clone(), lattice_col: mu.clone(), entries })
}

impl GaborMatrix {
    /// CSV rows `(lambda1, lambda2, mu1, mu2, re, im)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda1,lambda2,mu1,mu2,re,im\n");
        for (i, &(l1, l2)) in self.lattice_row.points().iter().enumerate() {
            for (j, &(m1, m2)) in self.lattice_col.points().iter().enumerate() {
                let v = self.entries[i][j];
                out.push_str(&format!("{},{},{},{},{:.17e},{:.17e}\n", l1, l2, m1, m2, v.re, v.im));
            }
        }
        out
    }
}

/// Main diagonal `Q_S T(lambda, lambda)` over the lattice.
pub fn diagonal(t: &OperatorMat, s: &OperatorMat, lam: &LatticeSpec) -> Result<Vec<C64>> {
    lam.points().iter().map(|&l| cohens_class_at(t, s, l, l)).collect()
}

/// Side diagonal `Q_S T(lambda, lambda + eta)` for `eta` in the lattice.
/// The second slot is evaluated at the raw integer sum.
pub fn side_diagonal(
    t: &OperatorMat,
    s: &OperatorMat,
    lam: &LatticeSpec,
    eta: TFPoint,
) -> Result<Vec<C64>> {
    let (e1, e2) = eta.coords();
    if !lam.contains(e1, e2) {
        return Err(Error::EtaNotInLattice(e1, e2));
    }
    lam.points()
        .iter()
        .map(|&(l1, l2)| cohens_class_at(t, s, (l1, l2), (l1 + e1, l2 + e2)))
        .collect()
}

/// Frame operator `E T = sum_{lambda, mu} Q_S T(lambda, mu) gamma_{lambda, mu}(S)`.
pub fn frame_operator(
    s: &OperatorMat,
    lam: &LatticeSpec,
    mu: &LatticeSpec,
    t: &OperatorMat,
) -> Result<OperatorMat> {
    s.grid().check_same(&t.grid())?;
    let grid = s.grid();
    let mut acc = OperatorMat::zero(grid);
    for &l in lam.points() {
        for &m in mu.points() {
            let g = gamma_at(grid, l, m, s);
            let c = hs_inner(t, &g)?;
            acc = acc.add(&g.scale(c));
        }
    }
    Ok(acc)
}

/// Extreme eigenvalues (A, B) of the frame operator on the N^2-dimensional
/// Hilbert-Schmidt space.
pub fn frame_bounds(s: &OperatorMat, lam: &LatticeSpec, mu: &LatticeSpec) -> Result<(f64, f64)> {
    let grid = s.grid();
    let n = grid.size();
    let dim = n * n;
    // E = sum v v^* with v = vec(gamma_{l,m}(S)); Hermitian PSD
    let mut e = nalgebra::DMatrix::<C64>::zeros(dim, dim);
    for &l in lam.points() {
        for &m in mu.points() {
            let g = gamma_at(grid, l, m, s);
            let v: Vec<C64> = g.matrix().iter().copied().collect();
            for (i, vi) in v.iter().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    e[(i, j)] += vi * vj.conj();
                }
            }
        }
    }
    let eig = e.symmetric_eigenvalues();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eig.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    // clamp tiny negatives from roundoff
    Ok((lo.max(0.0), hi))
}

/// The STFT on phase-space functions, evaluated at a single operator
/// phase-space point: `V_G F(u, nu) = <F, pi2(u, nu) G>` with
/// `pi2(u, nu) G(zeta) = e^{2 pi i nu . zeta / N} G(zeta - u)`.
pub fn stft2_at(f: &PhaseFn, g: &PhaseFn, u: (i64, i64), nu: (i64, i64)) -> C64 {
    let grid = f.grid();
    let n = grid.size() as f64;
    let mut acc = C64::default();
    for (x, w) in grid.points() {
        let shifted = cis_pi(2.0 * (nu.0 * x + nu.1 * w) as f64 / n) * g.get(x - u.0, w - u.1);
        acc += f.get(x, w) * shifted.conj();
    }
    acc
}

/// The phase factor and change of variables linking `Q_S T(w, z)` to the
/// symbol-level STFT on even-sum pairs:
/// `Q_S T(w, z) = (1/N) c_{w,z} V_{sigma_S} sigma_T(u, nu)`.
/// See [`crate::symplectic::phase_and_change_of_vars`].
pub fn cohens_stft_change_of_vars(grid: Grid, w: (i64, i64), z: (i64, i64)) -> (C64, [f64; 4]) {
    crate::symplectic::phase_and_change_of_vars(grid, w, z)
}
