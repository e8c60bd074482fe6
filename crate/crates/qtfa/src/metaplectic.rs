//! Metaplectic operators on the grid.
//!
//! A symplectic matrix acts projectively through a unitary that intertwines
//! the symmetric shifts: `mu(A) rho(xi) mu(A)^* = rho(A xi)`. On the grid the
//! generators are realized as
//!
//! * `mu(J)` - the unitary DFT (exact intertwiner);
//! * `mu(V_C)` - multiplication by `e^{i pi zeta . C zeta / N}` (exact for
//!   integer `C`; half-integer chirps are only 2N-periodic, so their
//!   intertwining residual is reported rather than asserted);
//! * `mu(D_L)` - `F -> F(L zeta)` for integer `L` invertible mod N (exact
//!   when `L^{-1}` is integral);
//! * `mu(V_B^T)` - realized as `F_Omega . chirp(R^T B R^T) . F_Omega` on the
//!   symbol grid (`R` the top-right block of the symplectic-Fourier matrix).
//!   This is the lift consistent with the Weyl/Kohn-Nirenberg relation:
//!   `mu([[I, -C0], [0, I]])` applied to a Weyl symbol is exactly the
//!   Kohn-Nirenberg symbol.
//!
//! [`mu_from`] assembles the action of an arbitrary symplectic matrix from
//! its four-factor decomposition and records intertwining residuals on a
//! standard set of even test vectors (`validity`). Construction only fails on
//! representability errors; large residuals are reported, never hidden.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::phasespace::{Grid, PhaseFn, Signal};
use crate::quantize::{weyl_quantize, weyl_symbol, OperatorMat};
use crate::symplectic::{general_decompose, Factor, GeneratorWord, SympMat};
use crate::tfa::TFPoint;
use crate::util::cis_pi;
use crate::C64;

/// One primitive unitary on `l^2(Z_N^m)`.
#[derive(Clone, Debug)]
pub enum GridFactor {
    /// Full unitary DFT.
    Fourier,
    FourierInv,
    /// Symplectic Fourier transform (m = 2 only); involutive and self-adjoint.
    SympFourier,
    /// `e^{i pi zeta . C zeta / N}`, `C` symmetric with half-integer entries.
    Chirp(DMatrix<f64>),
    /// `F -> F(L zeta mod N)`; `linv` is the inverse of `l` mod N.
    Dilation { l: DMatrix<i64>, linv: DMatrix<i64> },
    /// Weyl symbol to integral kernel, `sigma -> sqrt(N) K(L_sigma)` (m = 2).
    KernelMap,
    KernelMapInv,
}

/// Intertwining residuals on a test set.
#[derive(Clone, Debug, Default)]
pub struct ValidityReport {
    pub residuals: Vec<(Vec<i64>, f64)>,
    pub max_residual: f64,
}

/// A composed unitary on `l^2(Z_N^m)`: `m = 1` acts on signals, `m = 2` on
/// phase-space functions.
#[derive(Clone, Debug)]
pub struct MetaplecticOp {
    grid: Grid,
    m: usize,
    /// Factors in matrix-product order; application is right to left.
    factors: Vec<GridFactor>,
    word: Option<GeneratorWord>,
    validity: Option<ValidityReport>,
}

fn dims(grid: Grid, m: usize) -> usize {
    grid.size().pow(m as u32)
}

/// Decode a flat index into centered coordinates.
fn coords_of(grid: Grid, m: usize, mut idx: usize) -> Vec<i64> {
    let n = grid.size();
    let mut out = vec![0i64; m];
    for k in (0..m).rev() {
        out[k] = (idx % n) as i64 - grid.half();
        idx /= n;
    }
    out
}

fn index_of(grid: Grid, pt: &[i64]) -> usize {
    let n = grid.size();
    let mut idx = 0usize;
    for &c in pt {
        idx = idx * n + grid.index_of(c);
    }
    idx
}

fn apply_factor(grid: Grid, m: usize, f: &GridFactor, v: &[C64]) -> Vec<C64> {
    let n = grid.size();
    let nf = n as f64;
    let dim = dims(grid, m);
    match f {
        GridFactor::Fourier | GridFactor::FourierInv => {
            let sign = if matches!(f, GridFactor::Fourier) { -1.0 } else { 1.0 };
            let scale = 1.0 / nf.sqrt().powi(m as i32);
            let mut out = vec![C64::default(); dim];
            for (i, o) in out.iter_mut().enumerate() {
                let w = coords_of(grid, m, i);
                let mut acc = C64::default();
                for (j, &vj) in v.iter().enumerate() {
                    let t = coords_of(grid, m, j);
                    let dot: i64 = w.iter().zip(&t).map(|(a, b)| a * b).sum();
                    acc += vj * cis_pi(sign * 2.0 * dot as f64 / nf);
                }
                *o = acc * scale;
            }
            out
        }
        GridFactor::SympFourier => {
            debug_assert_eq!(m, 2);
            let mut out = vec![C64::default(); dim];
            let scale = 1.0 / nf;
            for (i, o) in out.iter_mut().enumerate() {
                let z = coords_of(grid, m, i);
                let mut acc = C64::default();
                for (j, &vj) in v.iter().enumerate() {
                    let zp = coords_of(grid, m, j);
                    let om = (z[0] * zp[1] - z[1] * zp[0]) as f64;
                    acc += vj * cis_pi(2.0 * om / nf);
                }
                *o = acc * scale;
            }
            out
        }
        GridFactor::Chirp(c) => {
            let mut out = vec![C64::default(); dim];
            for (i, o) in out.iter_mut().enumerate() {
                let z = coords_of(grid, m, i);
                let mut q = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        q += c[(a, b)] * (z[a] * z[b]) as f64;
                    }
                }
                *o = v[i] * cis_pi(q / nf);
            }
            out
        }
        GridFactor::Dilation { l, .. } => {
            let mut out = vec![C64::default(); dim];
            for (i, o) in out.iter_mut().enumerate() {
                let z = coords_of(grid, m, i);
                let mut img = vec![0i64; m];
                for a in 0..m {
                    img[a] = (0..m).map(|b| l[(a, b)] * z[b]).sum();
                }
                *o = v[index_of(grid, &img)];
            }
            out
        }
        GridFactor::KernelMap => {
            debug_assert_eq!(m, 2);
            let sigma = phasefn_from_slice(grid, v);
            let op = weyl_quantize(&sigma);
            let mut out = vec![C64::default(); dim];
            let scale = nf.sqrt();
            for (i, o) in out.iter_mut().enumerate() {
                let st = coords_of(grid, m, i);
                *o = op.get(st[0], st[1]) * scale;
            }
            out
        }
        GridFactor::KernelMapInv => {
            debug_assert_eq!(m, 2);
            let scale = 1.0 / nf.sqrt();
            let op = OperatorMat::from_fn(grid, |s, t| v[index_of(grid, &[s, t])] * scale);
            weyl_symbol(&op).values().to_vec()
        }
    }
}

fn invert_factor(f: &GridFactor) -> GridFactor {
    match f {
        GridFactor::Fourier => GridFactor::FourierInv,
        GridFactor::FourierInv => GridFactor::Fourier,
        GridFactor::SympFourier => GridFactor::SympFourier,
        GridFactor::Chirp(c) => GridFactor::Chirp(-c.clone()),
        GridFactor::Dilation { l, linv } => {
            GridFactor::Dilation { l: linv.clone(), linv: l.clone() }
        }
        GridFactor::KernelMap => GridFactor::KernelMapInv,
        GridFactor::KernelMapInv => GridFactor::KernelMap,
    }
}

fn phasefn_from_slice(grid: Grid, v: &[C64]) -> PhaseFn {
    let n = grid.size();
    PhaseFn::from_fn(grid, |x, w| v[grid.index_of(x) * n + grid.index_of(w)])
}

fn round_check(x: f64, tol: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() <= tol {
        Some(r as i64)
    } else {
        None
    }
}

/// Validate a chirp parameter: symmetric, entries in (1/2)Z.
fn check_chirp(c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if c.nrows() != c.ncols() || (c - c.transpose()).abs().max() > 1e-9 {
        return Err(Error::ChirpNotRepresentable);
    }
    let mut out = DMatrix::zeros(c.nrows(), c.ncols());
    for i in 0..c.nrows() {
        for j in 0..c.ncols() {
            let two = round_check(2.0 * c[(i, j)], 1e-9).ok_or(Error::ChirpNotRepresentable)?;
            out[(i, j)] = two as f64 / 2.0;
        }
    }
    Ok(out)
}

/// Integer inverse of an integer matrix mod N; `m` must be 1 or 2.
fn invert_mod_n(l: &DMatrix<i64>, n: i64) -> Option<DMatrix<i64>> {
    let modn = |x: i64| x.rem_euclid(n);
    let inv_scalar = |x: i64| -> Option<i64> {
        let x = modn(x);
        (1..n).find(|&y| modn(x * y) == 1)
    };
    match l.nrows() {
        1 => {
            let inv = inv_scalar(l[(0, 0)])?;
            Some(DMatrix::from_row_slice(1, 1, &[inv]))
        }
        2 => {
            let det = l[(0, 0)] * l[(1, 1)] - l[(0, 1)] * l[(1, 0)];
            let dinv = inv_scalar(det)?;
            let adj = [l[(1, 1)], -l[(0, 1)], -l[(1, 0)], l[(0, 0)]];
            let vals: Vec<i64> = adj.iter().map(|&a| modn(a * dinv)).collect();
            Some(DMatrix::from_row_slice(2, 2, &vals))
        }
        _ => None,
    }
}

impl MetaplecticOp {
    /// `mu(J)`: the unitary DFT on `Z_N^m`.
    pub fn fourier(grid: Grid, m: usize) -> MetaplecticOp {
        MetaplecticOp { grid, m, factors: vec![GridFactor::Fourier], word: None, validity: None }
    }

    /// `mu(V_C)`: chirp multiplication. `C` symmetric, entries in `(1/2)Z`.
    pub fn chirp(grid: Grid, c: &DMatrix<f64>) -> Result<MetaplecticOp> {
        let c = check_chirp(c)?;
        let m = c.nrows();
        Ok(MetaplecticOp { grid, m, factors: vec![GridFactor::Chirp(c)], word: None, validity: None })
    }

    /// `mu(D_L)`: coordinate dilation by an integer matrix invertible mod N.
    pub fn dilation(grid: Grid, l: &DMatrix<f64>) -> Result<MetaplecticOp> {
        let m = l.nrows();
        if l.ncols() != m || !(1..=2).contains(&m) {
            return Err(Error::DilationNotUnit);
        }
        let mut li = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                li[(i, j)] = round_check(l[(i, j)], 1e-9).ok_or(Error::DilationNotUnit)?;
            }
        }
        let linv = invert_mod_n(&li, grid.size() as i64).ok_or(Error::DilationNotUnit)?;
        Ok(MetaplecticOp {
            grid,
            m,
            factors: vec![GridFactor::Dilation { l: li, linv }],
            word: None,
            validity: None,
        })
    }

    /// The exact symbol-to-kernel unitary `sigma -> sqrt(N) K(L_sigma)`.
    pub fn kernel_map(grid: Grid) -> MetaplecticOp {
        MetaplecticOp { grid, m: 2, factors: vec![GridFactor::KernelMap], word: None, validity: None }
    }

    /// The symplectic Fourier transform as a metaplectic action (m = 2).
    pub fn symplectic_fourier(grid: Grid) -> MetaplecticOp {
        MetaplecticOp { grid, m: 2, factors: vec![GridFactor::SympFourier], word: None, validity: None }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Torus dimension: 1 for signal-level, 2 for symbol-level actions.
    pub fn torus_dim(&self) -> usize {
        self.m
    }

    pub fn factors(&self) -> &[GridFactor] {
        &self.factors
    }

    pub fn word(&self) -> Option<&GeneratorWord> {
        self.word.as_ref()
    }

    /// Residuals recorded at construction time by [`mu_from`].
    pub fn validity(&self) -> Option<&ValidityReport> {
        self.validity.as_ref()
    }

    /// Compose with another action (self applied after `other`).
    pub fn then(&self, other: &MetaplecticOp) -> MetaplecticOp {
        let mut factors = other.factors.clone();
        let mut mine = self.factors.clone();
        mine.append(&mut factors);
        MetaplecticOp { grid: self.grid, m: self.m, factors: mine, word: None, validity: None }
    }

    pub fn apply_raw(&self, v: &[C64]) -> Vec<C64> {
        let mut cur = v.to_vec();
        for f in self.factors.iter().rev() {
            cur = apply_factor(self.grid, self.m, f, &cur);
        }
        cur
    }

    pub fn adjoint_apply_raw(&self, v: &[C64]) -> Vec<C64> {
        let mut cur = v.to_vec();
        for f in self.factors.iter() {
            cur = apply_factor(self.grid, self.m, &invert_factor(f), &cur);
        }
        cur
    }

    pub fn apply_phasefn(&self, f: &PhaseFn) -> PhaseFn {
        assert_eq!(self.m, 2, "symbol-level action expected");
        phasefn_from_slice(self.grid, &self.apply_raw(f.values()))
    }

    pub fn adjoint_apply_phasefn(&self, f: &PhaseFn) -> PhaseFn {
        assert_eq!(self.m, 2, "symbol-level action expected");
        phasefn_from_slice(self.grid, &self.adjoint_apply_raw(f.values()))
    }

    pub fn apply_signal(&self, f: &Signal) -> Signal {
        assert_eq!(self.m, 1, "signal-level action expected");
        Signal::from_values(self.grid, self.apply_raw(f.values())).expect("length preserved")
    }

    /// Dense matrix of the action (dimension `N^m`).
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let dim = dims(self.grid, self.m);
        let mut out = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut e = vec![C64::default(); dim];
            e[j] = C64::new(1.0, 0.0);
            let col = self.apply_raw(&e);
            for (i, v) in col.iter().enumerate() {
                out[(i, j)] = *v;
            }
        }
        out
    }
}

/// Build the grid action of a symplectic matrix from its four-factor
/// decomposition `M = D_L V_A~ V_B~^T V_A`.
///
/// Fails only on representability (non-half-integer chirps, non-integer or
/// non-unit dilations). Intertwining residuals on the standard even test set
/// are recorded in the returned operator's `validity` report.
pub fn mu_from(grid: Grid, m: &SympMat) -> Result<MetaplecticOp> {
    let half = m.half_dim();
    if !(1..=2).contains(&half) {
        return Err(Error::BadShape(2 * half, 2 * half));
    }
    let word = general_decompose(m)?;
    let mut factors = Vec::new();
    for f in &word.0 {
        match f {
            Factor::Dilation(l) => {
                let is_id = (l - DMatrix::<f64>::identity(half, half)).abs().max() < 1e-12;
                if !is_id {
                    factors.extend(MetaplecticOp::dilation(grid, l)?.factors.into_iter());
                }
            }
            Factor::ChirpLower(c) => {
                if c.abs().max() > 1e-12 {
                    factors.extend(MetaplecticOp::chirp(grid, c)?.factors.into_iter());
                }
            }
            Factor::ChirpUpper(b) => {
                if b.abs().max() > 1e-12 {
                    if half == 2 {
                        // V_B^T = A_FOmega V_{R^T B R^T} A_FOmega
                        let r_t = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
                        let c = &r_t * b * &r_t;
                        let c = check_chirp(&c)?;
                        factors.push(GridFactor::SympFourier);
                        factors.push(GridFactor::Chirp(c));
                        factors.push(GridFactor::SympFourier);
                    } else {
                        // V_b^T = J V_{-b} J^{-1}
                        let c = check_chirp(&(-b.clone()))?;
                        factors.push(GridFactor::Fourier);
                        factors.push(GridFactor::Chirp(c));
                        factors.push(GridFactor::FourierInv);
                    }
                }
            }
            Factor::J { .. } => factors.push(GridFactor::Fourier),
        }
    }
    let mut op = MetaplecticOp { grid, m: half, factors, word: Some(word), validity: None };
    let zs = standard_test_vectors(half);
    let report = intertwine_report(&op, m, &zs)?;
    op.validity = Some(report);
    Ok(op)
}

/// Even test vectors used for validity reporting.
fn standard_test_vectors(m: usize) -> Vec<Vec<i64>> {
    let dim = 2 * m;
    let mut out = Vec::new();
    for i in 0..dim {
        let mut v = vec![0i64; dim];
        v[i] = 2;
        out.push(v);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut v = vec![0i64; dim];
            v[i] = 2;
            v[j] = -2;
            out.push(v);
        }
    }
    out
}

/// Matrix of the symmetric shift `rho(u, nu)` on `l^2(Z_N^m)`.
pub fn rho_m_matrix(grid: Grid, m: usize, xi: &[i64]) -> DMatrix<C64> {
    assert_eq!(xi.len(), 2 * m);
    let n = grid.size() as f64;
    let dim = dims(grid, m);
    let (u, nu) = xi.split_at(m);
    let udotnu: i64 = u.iter().zip(nu).map(|(a, b)| a * b).sum();
    let base = cis_pi(-(udotnu as f64) / n);
    let mut out = DMatrix::zeros(dim, dim);
    for row in 0..dim {
        let t = coords_of(grid, m, row);
        let src: Vec<i64> = t.iter().zip(u).map(|(a, b)| a - b).collect();
        let col = index_of(grid, &src);
        let dot: i64 = nu.iter().zip(&t).map(|(a, b)| a * b).sum();
        out[(row, col)] = base * cis_pi(2.0 * dot as f64 / n);
    }
    out
}

/// Max intertwining residual `|| mu rho(z) mu^* - phase . rho(Mz) ||_max`
/// over the test vectors, with the global phase aligned per vector.
pub fn intertwine_check(op: &MetaplecticOp, m: &SympMat, zs: &[Vec<i64>]) -> Result<f64> {
    Ok(intertwine_report(op, m, zs)?.max_residual)
}

fn intertwine_report(op: &MetaplecticOp, m: &SympMat, zs: &[Vec<i64>]) -> Result<ValidityReport> {
    let u = op.to_matrix();
    let uh = u.adjoint();
    let mut report = ValidityReport::default();
    for z in zs {
        let img = m.apply_integer(z)?;
        let lhs = &u * rho_m_matrix(op.grid, op.m, z) * &uh;
        let rhs = rho_m_matrix(op.grid, op.m, &img);
        // align the global phase on the largest entry of rhs
        let mut best = (0usize, 0usize);
        let mut mag = 0.0;
        for i in 0..rhs.nrows() {
            for j in 0..rhs.ncols() {
                let a = rhs[(i, j)].norm();
                if a > mag {
                    mag = a;
                    best = (i, j);
                }
            }
        }
        let phase = {
            let p = lhs[best] / rhs[best];
            let nm = p.norm();
            if nm < 1e-12 {
                C64::new(1.0, 0.0)
            } else {
                p / nm
            }
        };
        let resid = (&lhs - rhs.map(|v| v * phase)).map(|v| v.norm()).max();
        report.residuals.push((z.clone(), resid));
        report.max_residual = report.max_residual.max(resid);
    }
    Ok(report)
}

/// Translation-only intertwining residual: `|| U T_lambda U^* F - T_{lambda'} F ||`
/// over the lattice points, with `lambda' = A1^{-1} lambda`. This is the
/// property diagonal-sampling pipelines rely on, and it is exact for
/// upper-block-triangular words even when the full intertwining is not.
pub fn translation_intertwine_residual(
    op: &MetaplecticOp,
    a1_inv: &DMatrix<f64>,
    lattice_points: &[(i64, i64)],
) -> Result<f64> {
    assert_eq!(op.m, 2);
    let grid = op.grid;
    let mut rng = crate::util::Prng::new(0x7ea5);
    let probe = PhaseFn::from_fn(grid, |_, _| rng.c64());
    let up = op.apply_phasefn(&probe);
    let mut worst: f64 = 0.0;
    for &(l1, l2) in lattice_points {
        let img = a1_inv * nalgebra::DVector::from_row_slice(&[l1 as f64, l2 as f64]);
        let p1 = round_check(img[0], 1e-9).ok_or(Error::LatticeImageNotIntegral)?;
        let p2 = round_check(img[1], 1e-9).ok_or(Error::LatticeImageNotIntegral)?;
        let lhs = op.apply_phasefn(&probe.translate(p1, p2));
        let rhs = up.translate(l1, l2);
        worst = worst.max(lhs.sub(&rhs).norm() / probe.norm());
    }
    Ok(worst)
}

/// The transformed symbol `sigma_T^A = mu(A) sigma_T`.
pub fn a_weyl_symbol(t: &OperatorMat, a: &MetaplecticOp) -> PhaseFn {
    a.apply_phasefn(&weyl_symbol(t))
}

/// The A-quantization `L^A_sigma = L_{mu(A)^* sigma}`, inverse of
/// [`a_weyl_symbol`].
pub fn a_quantize(sigma: &PhaseFn, a: &MetaplecticOp) -> OperatorMat {
    weyl_quantize(&a.adjoint_apply_phasefn(sigma))
}

/// The metaplectic transform of an operator: `mu(A) T = L_{mu(A) sigma_T}`.
pub fn meta_transform_op(t: &OperatorMat, a: &MetaplecticOp) -> OperatorMat {
    weyl_quantize(&a_weyl_symbol(t, a))
}

/// Residual of the covariance identity
/// `sigma^A_{alpha_z(S)} = T_{Bz} sigma^A_S`, global phase aligned;
/// `Bz` must be integral.
pub fn b_covariance_check(
    a: &MetaplecticOp,
    b: &DMatrix<f64>,
    s: &OperatorMat,
    z: TFPoint,
) -> Result<f64> {
    let (z1, z2) = z.coords();
    let img = b * nalgebra::DVector::from_row_slice(&[z1 as f64, z2 as f64]);
    let b1 = round_check(img[0], 1e-9)
        .ok_or_else(|| Error::NonIntegerImage(img.iter().copied().collect()))?;
    let b2 = round_check(img[1], 1e-9)
        .ok_or_else(|| Error::NonIntegerImage(img.iter().copied().collect()))?;
    let shifted = crate::qha::op_translate(z, s)?;
    let lhs = a_weyl_symbol(&shifted, a);
    let rhs = a_weyl_symbol(s, a).translate(b1, b2);
    // global phase alignment
    let ip = rhs.inner(&lhs);
    let phase = if ip.norm() < 1e-14 { C64::new(1.0, 0.0) } else { ip / ip.norm() };
    Ok(lhs.sub(&rhs.scale(phase.conj())).norm() / rhs.norm().max(1e-300))
}
