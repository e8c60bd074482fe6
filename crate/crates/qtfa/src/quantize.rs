//! Operators on the grid and their quantization schemes.
//!
//! In the finite model an operator is its integral kernel: an `N x N`
//! complex matrix acting on [`Signal`]s. The symmetric shifts
//! `{rho(z)/sqrt(N)}` over centered `z` form an orthogonal basis of the
//! Hilbert-Schmidt space, which makes the Weyl calculus exactly invertible:
//!
//! ```text
//! sigma_S   = F_Omega(F_W(S))              (Weyl symbol)
//! S         = (1/N) sum_z (F_Omega sigma)(z) rho(z)
//! <S, T>_HS = (1/N) <sigma_S, sigma_T>     (quantization unitarity)
//! ```
//!
//! The Kohn-Nirenberg pair divides out the half-phase first:
//! `kappa_S = F_Omega(e^{-i pi x w / N} F_W(S))`, so that
//! `kappa_{f (x) g} = R(f, g)` exactly, mirroring
//! `sigma_{f (x) g} = W(f, g)`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::phasespace::{Grid, PhaseFn, Signal};
use crate::tfa::{rho_matrix, sympft};
use crate::util::cis_pi;
use crate::C64;

/// An operator on signals; entry `(s, t)` is the kernel value `K(s, t)` at
/// centered times.
#[derive(Clone, PartialEq, Debug)]
pub struct OperatorMat {
    grid: Grid,
    mat: DMatrix<C64>,
}

impl OperatorMat {
    pub fn zero(grid: Grid) -> OperatorMat {
        OperatorMat { grid, mat: DMatrix::zeros(grid.size(), grid.size()) }
    }

    pub fn identity(grid: Grid) -> OperatorMat {
        OperatorMat { grid, mat: DMatrix::identity(grid.size(), grid.size()) }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(i64, i64) -> C64) -> OperatorMat {
        let h = grid.half();
        let mat = DMatrix::from_fn(grid.size(), grid.size(), |i, j| {
            f(i as i64 - h, j as i64 - h)
        });
        OperatorMat { grid, mat }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Kernel entry at centered times `(s, t)`; cyclic in both.
    pub fn get(&self, s: i64, t: i64) -> C64 {
        self.mat[(self.grid.index_of(s), self.grid.index_of(t))]
    }

    pub fn set(&mut self, s: i64, t: i64, v: C64) {
        let i = self.grid.index_of(s);
        let j = self.grid.index_of(t);
        self.mat[(i, j)] = v;
    }

    pub(crate) fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub(crate) fn from_matrix(grid: Grid, mat: DMatrix<C64>) -> OperatorMat {
        debug_assert_eq!(mat.nrows(), grid.size());
        debug_assert_eq!(mat.ncols(), grid.size());
        OperatorMat { grid, mat }
    }

    /// Apply to a signal.
    pub fn apply(&self, f: &Signal) -> Signal {
        let v = nalgebra::DVector::from_iterator(self.grid.size(), f.values().iter().copied());
        let out = &self.mat * v;
        Signal::from_values(self.grid, out.iter().copied().collect()).expect("length preserved")
    }

    pub fn mul(&self, other: &OperatorMat) -> OperatorMat {
        OperatorMat { grid: self.grid, mat: &self.mat * &other.mat }
    }

    pub fn add(&self, other: &OperatorMat) -> OperatorMat {
        OperatorMat { grid: self.grid, mat: &self.mat + &other.mat }
    }

    pub fn sub(&self, other: &OperatorMat) -> OperatorMat {
        OperatorMat { grid: self.grid, mat: &self.mat - &other.mat }
    }

    pub fn scale(&self, c: C64) -> OperatorMat {
        OperatorMat { grid: self.grid, mat: self.mat.map(|v| v * c) }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> OperatorMat {
        OperatorMat { grid: self.grid, mat: self.mat.adjoint() }
    }

    pub fn hs_norm(&self) -> f64 {
        self.mat.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Rank-one operator `f (x) g : h -> <h, g> f`, kernel `f(s) conj(g(t))`.
pub fn rank_one(f: &Signal, g: &Signal) -> Result<OperatorMat> {
    f.grid().check_same(&g.grid())?;
    Ok(OperatorMat::from_fn(f.grid(), |s, t| f.get(s) * g.get(t).conj()))
}

/// Trace (diagonal sum).
pub fn trace(s: &OperatorMat) -> C64 {
    s.grid().values().map(|t| s.get(t, t)).sum()
}

/// Hilbert-Schmidt inner product `<S, T> = tr(S T^*)`.
pub fn hs_inner(s: &OperatorMat, t: &OperatorMat) -> Result<C64> {
    s.grid().check_same(&t.grid())?;
    Ok(s
        .matrix()
        .iter()
        .zip(t.matrix().iter())
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// Singular value decomposition `S = sum_n lambda_n psi_n (x) phi_n`.
#[derive(Clone, Debug)]
pub struct SpectralDecomp {
    pub singular_values: Vec<f64>,
    pub left: Vec<Signal>,
    pub right: Vec<Signal>,
}

/// SVD with singular values above `1e-10 * sigma_max` kept, in descending
/// order. The zero operator yields an empty decomposition.
pub fn spectral_decomp(s: &OperatorMat) -> SpectralDecomp {
    let svd = s.matrix().clone().svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let smax = idx.first().map(|&i| svd.singular_values[i]).unwrap_or(0.0);
    let cutoff = 1e-10 * smax;
    let mut out = SpectralDecomp { singular_values: Vec::new(), left: Vec::new(), right: Vec::new() };
    for &i in &idx {
        let sv = svd.singular_values[i];
        if sv <= cutoff || sv == 0.0 {
            break;
        }
        out.singular_values.push(sv);
        out.left
            .push(Signal::from_values(s.grid(), u.column(i).iter().copied().collect()).unwrap());
        // rows of v_t are conjugated right singular vectors
        out.right
            .push(Signal::from_values(s.grid(), vt.row(i).iter().map(|c| c.conj()).collect()).unwrap());
    }
    out
}

impl SpectralDecomp {
    /// Reassemble `sum lambda_n psi_n (x) phi_n`.
    pub fn reassemble(&self, grid: Grid) -> OperatorMat {
        let mut acc = OperatorMat::zero(grid);
        for ((sv, l), r) in self.singular_values.iter().zip(&self.left).zip(&self.right) {
            let term = rank_one(l, r).expect("same grid").scale(C64::new(*sv, 0.0));
            acc = acc.add(&term);
        }
        acc
    }

    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }
}

/// Weyl symbol `sigma_S = F_Omega(F_W(S))`.
pub fn weyl_symbol(s: &OperatorMat) -> PhaseFn {
    sympft(&crate::qha::fourier_wigner(s))
}

/// Weyl quantization, the exact inverse of [`weyl_symbol`]:
/// `S = (1/N) sum_z (F_Omega sigma)(z) rho(z)`.
pub fn weyl_quantize(sigma: &PhaseFn) -> OperatorMat {
    let grid = sigma.grid();
    let spread = sympft(sigma); // = F_W(S) by involutivity
    accumulate_rho(grid, &spread)
}

/// `(1/N) sum_z G(z) rho(z)`: inverse of the Fourier-Wigner transform.
pub(crate) fn accumulate_rho(grid: Grid, spread: &PhaseFn) -> OperatorMat {
    let n = grid.size();
    let mut mat = DMatrix::<C64>::zeros(n, n);
    for (x, w) in grid.points() {
        let c = spread.get(x, w);
        if c == C64::default() {
            continue;
        }
        let r = rho_matrix(grid, x, w);
        mat += r.matrix().map(|v| v * c);
    }
    OperatorMat::from_matrix(grid, mat.map(|v| v / n as f64))
}

/// Kohn-Nirenberg symbol `kappa_S = F_Omega(e^{-i pi x w / N} F_W(S))`.
pub fn kn_symbol(s: &OperatorMat) -> PhaseFn {
    let grid = s.grid();
    let n = grid.size() as f64;
    let spread = crate::qha::fourier_wigner(s);
    let twisted = PhaseFn::from_fn(grid, |x, w| spread.get(x, w) * cis_pi(-((x * w) as f64) / n));
    sympft(&twisted)
}

/// Inverse of [`kn_symbol`].
pub fn kn_quantize(kappa: &PhaseFn) -> OperatorMat {
    let grid = kappa.grid();
    let n = grid.size() as f64;
    let twisted = sympft(kappa);
    let spread = PhaseFn::from_fn(grid, |x, w| twisted.get(x, w) * cis_pi(((x * w) as f64) / n));
    accumulate_rho(grid, &spread)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::make_grid;
    use crate::tfa::{rihaczek, wigner};
    use crate::util::Prng;

    fn rand_signal(grid: Grid, rng: &mut Prng) -> Signal {
        Signal::from_fn(grid, |_| rng.c64())
    }

    fn rand_op(grid: Grid, rng: &mut Prng) -> OperatorMat {
        OperatorMat::from_fn(grid, |_, _| rng.c64())
    }

    #[test]
    fn rank_one_basics() {
        let g = make_grid(8).unwrap();
        let mut rng = Prng::new(11);
        let d0 = Signal::delta(g, 0);
        let e00 = rank_one(&d0, &d0).unwrap();
        for (s, t) in g.points() {
            let expect = if s == 0 && t == 0 { 1.0 } else { 0.0 };
            assert!((e00.get(s, t) - C64::new(expect, 0.0)).norm() < 1e-15);
        }

        let f = rand_signal(g, &mut rng);
        let w = rand_signal(g, &mut rng);
        let h = rand_signal(g, &mut rng);
        // (f (x) g) h = <h, g> f
        let applied = rank_one(&f, &w).unwrap().apply(&h);
        let expect = f.scale(h.inner(&w));
        assert!(applied.sub(&expect).norm() < 1e-12);

        // trace(f (x) g) = <f, g>
        let tr = trace(&rank_one(&f, &w).unwrap());
        assert!((tr - f.inner(&w)).norm() < 1e-12);
    }

    #[test]
    fn trace_and_hs() {
        let g = make_grid(8).unwrap();
        let mut rng = Prng::new(12);
        assert!((trace(&OperatorMat::identity(g)) - C64::new(8.0, 0.0)).norm() < 1e-15);

        let d0 = Signal::delta(g, 0);
        let e00 = rank_one(&d0, &d0).unwrap();
        assert!((hs_inner(&e00, &e00).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);

        // hs(f (x) g, u (x) v) = <f, u> conj(<g, v>)
        let (f, w, u, v) = (
            rand_signal(g, &mut rng),
            rand_signal(g, &mut rng),
            rand_signal(g, &mut rng),
            rand_signal(g, &mut rng),
        );
        let lhs = hs_inner(&rank_one(&f, &w).unwrap(), &rank_one(&u, &v).unwrap()).unwrap();
        let rhs = f.inner(&u) * w.inner(&v).conj();
        assert!((lhs - rhs).norm() / rhs.norm() < 1e-12);
    }

    #[test]
    fn spectral_decomposition() {
        let g = make_grid(8).unwrap();
        let mut rng = Prng::new(13);

        assert_eq!(spectral_decomp(&OperatorMat::zero(g)).rank(), 0);

        // normalized rank one: single singular value 1
        let mut f = rand_signal(g, &mut rng);
        let mut h = rand_signal(g, &mut rng);
        f = f.scale(C64::new(1.0 / f.norm(), 0.0));
        h = h.scale(C64::new(1.0 / h.norm(), 0.0));
        let dec = spectral_decomp(&rank_one(&f, &h).unwrap());
        assert_eq!(dec.rank(), 1);
        assert!((dec.singular_values[0] - 1.0).abs() < 1e-12);

        // random operator: orthonormal families and reassembly
        let s = rand_op(g, &mut rng);
        let dec = spectral_decomp(&s);
        for i in 0..dec.rank() {
            for j in 0..dec.rank() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dec.left[i].inner(&dec.left[j]) - C64::new(expect, 0.0)).norm() < 1e-10);
                assert!((dec.right[i].inner(&dec.right[j]) - C64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
        let back = dec.reassemble(g);
        assert!(back.sub(&s).hs_norm() / s.hs_norm() < 1e-10);
    }

    #[test]
    fn weyl_symbol_of_identity_and_translates() {
        let g = make_grid(8).unwrap();
        let sig = weyl_symbol(&OperatorMat::identity(g));
        for (x, w) in g.points() {
            assert!((sig.get(x, w) - C64::new(1.0, 0.0)).norm() < 1e-12);
        }

        // sigma_{alpha_z S} = T_z sigma_S (cyclic, exact)
        let mut rng = Prng::new(14);
        let s = rand_op(g, &mut rng);
        let z = (3, -2);
        let shifted = crate::qha::op_translate(crate::tfa::TFPoint::new(g, z.0, z.1), &s).unwrap();
        let lhs = weyl_symbol(&shifted);
        let rhs = weyl_symbol(&s).translate(z.0, z.1);
        assert!(lhs.sub(&rhs).norm() < 1e-10);
    }

    #[test]
    fn weyl_rank_one_is_wigner_and_roundtrip() {
        let g = make_grid(8).unwrap();
        let mut rng = Prng::new(15);
        let f = rand_signal(g, &mut rng);
        let h = rand_signal(g, &mut rng);
        let lhs = weyl_symbol(&rank_one(&f, &h).unwrap());
        let rhs = wigner(&f, &h).unwrap();
        assert!(lhs.sub(&rhs).norm() < 1e-10);

        // roundtrips both ways
        let s = rand_op(g, &mut rng);
        assert!(weyl_quantize(&weyl_symbol(&s)).sub(&s).hs_norm() < 1e-10);
        let sigma = PhaseFn::from_fn(g, |_, _| rng.c64());
        assert!(weyl_symbol(&weyl_quantize(&sigma)).sub(&sigma).norm() < 1e-10);

        // constant symbol quantizes to the identity
        let one = PhaseFn::from_fn(g, |_, _| C64::new(1.0, 0.0));
        assert!(weyl_quantize(&one).sub(&OperatorMat::identity(g)).max_abs() < 1e-12);

        // linearity
        let s2 = rand_op(g, &mut rng);
        let sum = weyl_quantize(&weyl_symbol(&s).add(&weyl_symbol(&s2)));
        assert!(sum.sub(&s.add(&s2)).hs_norm() < 1e-10);
    }

    #[test]
    fn quantization_unitarity_constant() {
        let g = make_grid(8).unwrap();
        let mut rng = Prng::new(16);
        let s = rand_op(g, &mut rng);
        let t = rand_op(g, &mut rng);
        // <S,T>_HS = (1/N) <sigma_S, sigma_T>
        let lhs = hs_inner(&s, &t).unwrap();
        let rhs = weyl_symbol(&s).inner(&weyl_symbol(&t)) / 8.0;
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-11);
        // norm proportionality
        assert!((weyl_symbol(&s).norm() - 8f64.sqrt() * s.hs_norm()).abs() < 1e-9);
    }

    #[test]
    fn kohn_nirenberg() {
        let g = make_grid(8).unwrap();
        let mut rng = Prng::new(17);
        let f = rand_signal(g, &mut rng);
        let h = rand_signal(g, &mut rng);

        // kappa_{f (x) g} = R(f, g)
        let lhs = kn_symbol(&rank_one(&f, &h).unwrap());
        let rhs = rihaczek(&f, &h).unwrap();
        assert!(lhs.sub(&rhs).norm() < 1e-10);

        // roundtrip on random operators
        let s = rand_op(g, &mut rng);
        assert!(kn_quantize(&kn_symbol(&s)).sub(&s).hs_norm() < 1e-10);

        // zero <-> zero
        assert!(kn_symbol(&OperatorMat::zero(g)).norm() < 1e-15);
        assert!(kn_quantize(&PhaseFn::zero(g)).hs_norm() < 1e-15);

        // delta kernel matches the closed-form Rihaczek of deltas
        let d = Signal::delta(g, 0);
        let k = kn_symbol(&rank_one(&d, &d).unwrap());
        let r = rihaczek(&d, &d).unwrap();
        assert!(k.sub(&r).norm() < 1e-12);
    }
}
