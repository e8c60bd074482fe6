//! Real symplectic matrix algebra.
//!
//! `Sp(2m, R)` is the group of real `2m x 2m` matrices with `M^T J M = J`,
//! `J = [[0, I], [-I, 0]]`. It is generated by `J`, lower chirp blocks
//! `V_C = [[I, 0], [C, I]]` (C symmetric) and dilations
//! `D_L = [[L^{-1}, 0], [0, L^T]]` (L invertible); the upper chirp
//! `V_B^T = [[I, B], [0, I]]` is `J V_{-B} J^{-1}`. Relations:
//! `V_{C1} V_{C2} = V_{C1 + C2}`, `D_{L1} D_{L2} = D_{L2 L1}`.
//!
//! Two constructive decompositions are provided:
//!
//! * [`free_decompose`]: `M = V_P D_L J V_Q` for free `M` (top-right block
//!   invertible), with `P = M22 M12^{-1}`, `L = M12^{-1}`, `Q = M12^{-1} M11`.
//! * [`general_decompose`]: `M = D_L V_A~ V_B~^T V_A` for any symplectic `M`.
//!   The free parameter is the trailing chirp `A`; candidates are searched in
//!   a fixed order (signed 0/1 diagonals by popcount then lexicographic, then
//!   `-kI`, `kI` for k = 2..8) until `M11 - M12 A` is invertible. With
//!   `L = (M11 - M12 A)^{-1}`, the product `G = D_L^{-1} M V_{-A}` then has
//!   unit top-left block, and `B~ = G12`, `A~ = G21` are automatically
//!   symmetric, so no further solving is needed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::phasespace::Grid;
use crate::util::cis_pi;
use crate::C64;

const SYMP_TOL: f64 = 1e-10;
const DET_TOL: f64 = 1e-8;

/// A validated real symplectic matrix.
#[derive(Clone, Debug)]
pub struct SympMat {
    m: usize,
    mat: DMatrix<f64>,
}

/// The standard skew form `J` on `R^{2m}`.
pub fn j_form(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        j[(i, m + i)] = 1.0;
        j[(m + i, i)] = -1.0;
    }
    j
}

/// `|M^T J M - J|_max`; `Err(BadShape)` for non-square or odd dimension.
pub fn symplectic_defect(mat: &DMatrix<f64>) -> Result<f64> {
    if mat.nrows() != mat.ncols() || mat.nrows() % 2 != 0 || mat.nrows() == 0 {
        return Err(Error::BadShape(mat.nrows(), mat.ncols()));
    }
    let j = j_form(mat.nrows() / 2);
    Ok((mat.transpose() * &j * mat - &j).abs().max())
}

/// Check the defining relation (threshold 1e-10 max-norm).
pub fn is_symplectic(mat: &DMatrix<f64>) -> Result<bool> {
    Ok(symplectic_defect(mat)? <= SYMP_TOL)
}

impl SympMat {
    /// Validates both the defining relation and `det = 1`.
    pub fn new(mat: DMatrix<f64>) -> Result<SympMat> {
        let defect = symplectic_defect(&mat)?;
        if defect > SYMP_TOL {
            return Err(Error::NotSymplectic(defect));
        }
        let det = mat.clone().lu().determinant();
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::NotSymplectic((det - 1.0).abs()));
        }
        Ok(SympMat { m: mat.nrows() / 2, mat })
    }

    /// Half-dimension `m` (the matrix is `2m x 2m`).
    pub fn half_dim(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Blocks `(A, B, C, D)` of `[[A, B], [C, D]]`.
    pub fn block_parts(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let m = self.m;
        (
            self.mat.view((0, 0), (m, m)).clone_owned(),
            self.mat.view((0, m), (m, m)).clone_owned(),
            self.mat.view((m, 0), (m, m)).clone_owned(),
            self.mat.view((m, m), (m, m)).clone_owned(),
        )
    }

    /// Closed-form inverse `[[D^T, -B^T], [-C^T, A^T]]`.
    pub fn inverse(&self) -> SympMat {
        let (a, b, c, d) = self.block_parts();
        let m = self.m;
        let mut out = DMatrix::zeros(2 * m, 2 * m);
        out.view_mut((0, 0), (m, m)).copy_from(&d.transpose());
        out.view_mut((0, m), (m, m)).copy_from(&(-b.transpose()));
        out.view_mut((m, 0), (m, m)).copy_from(&(-c.transpose()));
        out.view_mut((m, m), (m, m)).copy_from(&a.transpose());
        SympMat { m, mat: out }
    }

    pub fn mul(&self, other: &SympMat) -> SympMat {
        SympMat { m: self.m, mat: &self.mat * &other.mat }
    }

    /// Apply to an integer phase-space vector; errors if the image is not
    /// integral (tolerance 1e-9).
    pub fn apply_integer(&self, z: &[i64]) -> Result<Vec<i64>> {
        let v = DMatrix::from_iterator(2 * self.m, 1, z.iter().map(|&x| x as f64));
        let img = &self.mat * v;
        let mut out = Vec::with_capacity(2 * self.m);
        for x in img.iter() {
            if (x - x.round()).abs() > 1e-9 {
                return Err(Error::NonIntegerImage(img.iter().copied().collect()));
            }
            out.push(x.round() as i64);
        }
        Ok(out)
    }
}

/// Closed-form symplectic inverse (module-level name per the public surface).
pub fn symp_inverse(m: &SympMat) -> SympMat {
    m.inverse()
}

/// One generator factor.
#[derive(Clone, Debug)]
pub enum Factor {
    /// The standard form `J`.
    J { m: usize },
    /// Lower chirp `V_C`, `C` symmetric.
    ChirpLower(DMatrix<f64>),
    /// Upper chirp `V_B^T`, `B` symmetric.
    ChirpUpper(DMatrix<f64>),
    /// Dilation `D_L`, `L` invertible.
    Dilation(DMatrix<f64>),
}

impl Factor {
    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            Factor::J { m } => j_form(*m),
            Factor::ChirpLower(c) => {
                let m = c.nrows();
                let mut out = DMatrix::identity(2 * m, 2 * m);
                out.view_mut((m, 0), (m, m)).copy_from(c);
                out
            }
            Factor::ChirpUpper(b) => {
                let m = b.nrows();
                let mut out = DMatrix::identity(2 * m, 2 * m);
                out.view_mut((0, m), (m, m)).copy_from(b);
                out
            }
            Factor::Dilation(l) => {
                let m = l.nrows();
                let inv = l.clone().try_inverse().expect("validated invertible");
                let mut out = DMatrix::zeros(2 * m, 2 * m);
                out.view_mut((0, 0), (m, m)).copy_from(&inv);
                out.view_mut((m, m), (m, m)).copy_from(&l.transpose());
                out
            }
        }
    }
}

/// An ordered product of generator factors.
#[derive(Clone, Debug, Default)]
pub struct GeneratorWord(pub Vec<Factor>);

pub fn make_j(m: usize) -> SympMat {
    SympMat::new(j_form(m)).expect("J is symplectic")
}

fn check_symmetric(c: &DMatrix<f64>) -> Result<()> {
    if c.nrows() != c.ncols() || (c - c.transpose()).abs().max() > 1e-12 {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

pub fn make_vc(c: &DMatrix<f64>) -> Result<SympMat> {
    check_symmetric(c)?;
    SympMat::new(Factor::ChirpLower(c.clone()).matrix())
}

pub fn make_vtb(b: &DMatrix<f64>) -> Result<SympMat> {
    check_symmetric(b)?;
    SympMat::new(Factor::ChirpUpper(b.clone()).matrix())
}

pub fn make_dl(l: &DMatrix<f64>) -> Result<SympMat> {
    if l.nrows() != l.ncols() || l.clone().lu().determinant().abs() < 1e-12 {
        return Err(Error::Singular);
    }
    SympMat::new(Factor::Dilation(l.clone()).matrix())
}

/// Multiply out a word; the product is validated symplectic.
pub fn compose(word: &GeneratorWord) -> Result<SympMat> {
    let mut it = word.0.iter();
    let first = it.next().ok_or(Error::NotDecomposable)?;
    let mut acc = first.matrix();
    for f in it {
        acc = acc * f.matrix();
    }
    SympMat::new(acc)
}

/// Generating-function decomposition of a free matrix:
/// `M = V_P D_L J V_Q`. Requires the top-right block invertible.
pub fn free_decompose(m: &SympMat) -> Result<GeneratorWord> {
    let (a, b, _, d) = m.block_parts();
    let det = b.clone().lu().determinant();
    let scale = m.mat.abs().max().max(1.0);
    if det.abs() < 1e-10 * scale.powi(m.m as i32) {
        return Err(Error::NotFree(det.abs()));
    }
    let binv = b.clone().try_inverse().ok_or(Error::NotFree(det.abs()))?;
    let p = &d * &binv;
    let q = &binv * &a;
    // symmetrize away roundoff; symmetry is guaranteed by the symplectic
    // relations B D^T = D B^T and A B^T = B A^T
    let p = (&p + &p.transpose()) * 0.5;
    let q = (&q + &q.transpose()) * 0.5;
    let word = GeneratorWord(vec![
        Factor::ChirpLower(p),
        Factor::Dilation(binv),
        Factor::J { m: m.m },
        Factor::ChirpLower(q),
    ]);
    debug_assert!((compose(&word)?.matrix() - m.matrix()).abs().max() < 1e-8);
    Ok(word)
}

/// Deterministic candidate order for the trailing chirp of
/// [`general_decompose`].
fn trailing_chirp_candidates(m: usize) -> Vec<DMatrix<f64>> {
    let mut sets: Vec<Vec<usize>> = (0..1u32 << m)
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    sets.sort_by_key(|s| (s.len(), s.clone()));
    let mut out: Vec<DMatrix<f64>> = sets
        .into_iter()
        .map(|s| {
            let mut d = DMatrix::zeros(m, m);
            for i in s {
                d[(i, i)] = -1.0;
            }
            d
        })
        .collect();
    for k in 2..=8 {
        out.push(DMatrix::identity(m, m) * -(k as f64));
        out.push(DMatrix::identity(m, m) * k as f64);
    }
    out
}

/// Four-factor decomposition `M = D_L V_A~ V_B~^T V_A` of any symplectic
/// matrix; deterministic (see module docs) and validated by reassembly.
pub fn general_decompose(m: &SympMat) -> Result<GeneratorWord> {
    let (m11, m12, _, _) = m.block_parts();
    let dim = m.m;
    let scale = m.mat.abs().max().max(1.0);
    for a in trailing_chirp_candidates(dim) {
        let x = &m11 - &m12 * &a;
        let det = x.clone().lu().determinant();
        if det.abs() <= 1e-8 * scale.powi(dim as i32) {
            continue;
        }
        let l = x.clone().try_inverse().ok_or(Error::Singular)?;
        // G = D_L^{-1} M V_{-A} has unit top-left block by construction
        let dl_inv = {
            let mut out = DMatrix::zeros(2 * dim, 2 * dim);
            out.view_mut((0, 0), (dim, dim)).copy_from(&l);
            out.view_mut((dim, dim), (dim, dim))
                .copy_from(&l.clone().try_inverse().ok_or(Error::Singular)?.transpose());
            out
        };
        let v_neg_a = Factor::ChirpLower(-a.clone()).matrix();
        let g = &dl_inv * m.matrix() * v_neg_a;
        let b_t: DMatrix<f64> = g.view((0, dim), (dim, dim)).clone_owned();
        let a_t: DMatrix<f64> = g.view((dim, 0), (dim, dim)).clone_owned();
        let b_t = (&b_t + &b_t.transpose()) * 0.5;
        let a_t = (&a_t + &a_t.transpose()) * 0.5;
        let word = GeneratorWord(vec![
            Factor::Dilation(l),
            Factor::ChirpLower(a_t),
            Factor::ChirpUpper(b_t),
            Factor::ChirpLower(a),
        ]);
        return Ok(word);
    }
    Err(Error::NotDecomposable)
}

/// The symplectic matrices that come up repeatedly: the symplectic Fourier
/// transform, the partial Fourier transform in the second variable, the
/// STFT- and Rihaczek-type chirped variants, the symbol-to-kernel map, the
/// second-variable-flip Fourier, and the Weyl-to-Kohn-Nirenberg shear.
pub const NAMED_MATRICES: [&str; 7] = [
    "fourier_omega",
    "fourier_second",
    "stft",
    "rihaczek",
    "kernel_map",
    "fourier_t2",
    "weyl_to_kn",
];

/// Look up a named 4 x 4 matrix. All are symplectic.
pub fn named_matrix(name: &str) -> Result<SympMat> {
    #[rustfmt::skip]
    let rows: [[f64; 4]; 4] = match name {
        "fourier_omega" => [
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
        ],
        "fourier_second" => [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ],
        "stft" => [
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, -0.5, 0.0],
            [-1.0, 0.0, 0.0, 0.5],
        ],
        "rihaczek" => [
            [1.0, 0.0, 0.0, -0.5],
            [0.0, 1.0, -0.5, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        "kernel_map" => [
            [0.5, 0.5, 0.0, 0.0],
            [0.0, 0.0, 0.5, -0.5],
            [0.0, 0.0, 1.0, 1.0],
            [-1.0, 1.0, 0.0, 0.0],
        ],
        "fourier_t2" => [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ],
        // J^T V_C J with C = [[0, 1/2], [1/2, 0]]: the shear taking Weyl
        // symbols to Kohn-Nirenberg symbols
        "weyl_to_kn" => [
            [1.0, 0.0, 0.0, -0.5],
            [0.0, 1.0, -0.5, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        other => return Err(Error::UnknownName(other.to_string())),
    };
    SympMat::new(DMatrix::from_fn(4, 4, |i, j| rows[i][j]))
}

/// If `M = [[B, A2], [0, B^{-T}]]`, return `B`; otherwise `None`.
///
/// This block shape characterizes the maps giving B-covariant quantizations:
/// operator translation by `z` moves the transformed symbol by `Bz`.
pub fn covariance_form(m: &SympMat) -> Option<DMatrix<f64>> {
    let (a, _, c, d) = m.block_parts();
    if c.abs().max() > SYMP_TOL {
        return None;
    }
    let binv_t = a.clone().try_inverse()?.transpose();
    if (&d - &binv_t).abs().max() > SYMP_TOL {
        return None;
    }
    Some(a)
}

/// Finite-model phase factor and change of variables tying the polarised
/// Cohen's class to the STFT of Weyl symbols:
/// `c = e^{-i pi (w1+z1)(w2-z2)/N}` and
/// `u = ((w1+z1)/2, (w2+z2)/2, z2-w2, w1-z1)`.
pub fn phase_and_change_of_vars(grid: Grid, w: (i64, i64), z: (i64, i64)) -> (C64, [f64; 4]) {
    let n = grid.size() as f64;
    let c = cis_pi(-(((w.0 + z.0) * (w.1 - z.1)) as f64) / n);
    let u = [
        (w.0 + z.0) as f64 / 2.0,
        (w.1 + z.1) as f64 / 2.0,
        (z.1 - w.1) as f64,
        (w.0 - z.0) as f64,
    ];
    (c, u)
}

/// Deterministic random words for tests and the self-test suite: entries are
/// small so products stay O(1)-scaled.
pub fn random_word(m: usize, factors: usize, rng: &mut crate::util::Prng) -> GeneratorWord {
    let mut word = Vec::with_capacity(factors);
    for _ in 0..factors {
        match rng.next_u64() % 4 {
            0 => word.push(Factor::J { m }),
            1 => {
                let mut c = DMatrix::zeros(m, m);
                for i in 0..m {
                    for j in 0..=i {
                        let v = rng.sym();
                        c[(i, j)] = v;
                        c[(j, i)] = v;
                    }
                }
                word.push(Factor::ChirpLower(c));
            }
            2 => {
                let mut b = DMatrix::zeros(m, m);
                for i in 0..m {
                    for j in 0..=i {
                        let v = rng.sym();
                        b[(i, j)] = v;
                        b[(j, i)] = v;
                    }
                }
                word.push(Factor::ChirpUpper(b));
            }
            _ => {
                // well-conditioned: identity plus a small perturbation
                let mut l = DMatrix::identity(m, m);
                for i in 0..m {
                    for j in 0..m {
                        l[(i, j)] += 0.3 * rng.sym();
                    }
                }
                word.push(Factor::Dilation(l));
            }
        }
    }
    GeneratorWord(word)
}
