//! Identifiability of operator classes from Gabor-matrix diagonals.
//!
//! Diagonal sampling factors through a Gram matrix: with
//! `G(lambda, k) = conj(sigma_S(k - lambda))`,
//!
//! ```text
//! Q_S T(lambda, lambda) = (1/N) (G . vec(sigma_T |_K))(lambda)
//! ```
//!
//! for every operator whose Weyl symbol is supported in `K`. Injectivity of
//! diagonal sampling on that class is exactly full column rank of `G`, which
//! is what [`identifiability_test`] reports via the singular values. The
//! finite model imposes the dimension count `|Lambda| >= |K|`; lattices
//! failing it are refused as undersampled rather than reported as
//! counterexamples.
//!
//! A caveat the sweep makes visible: for a separable window symbol (any
//! rank-one Gaussian window) the Gram is a Kronecker product of two 1-D
//! translate Grams, so its rank is `min(N/a, Kx) . min(N/b, Kw)`. A lattice
//! with fewer sample values on one axis than the support width on that axis
//! is singular no matter how large `|Lambda|` is.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metaplectic::mu_from;
use crate::phasespace::{Grid, LatticeSpec, PhaseFn, Signal};
use crate::qha::op_translate_at;
use crate::quantize::{rank_one, spectral_decomp, weyl_quantize, weyl_symbol, OperatorMat};
use crate::symplectic::{general_decompose, Factor, SympMat};
use crate::util::cis_pi;
use crate::C64;

/// Relative singular-value threshold for rank and identifiability decisions.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// An index subset of phase space carrying the unknown symbol values.
#[derive(Clone, Debug)]
pub struct SupportRegion {
    grid: Grid,
    points: Vec<(i64, i64)>,
}

impl SupportRegion {
    pub fn from_points(grid: Grid, mut points: Vec<(i64, i64)>) -> SupportRegion {
        for p in points.iter_mut() {
            *p = (grid.reduce(p.0), grid.reduce(p.1));
        }
        points.sort_unstable();
        points.dedup();
        SupportRegion { grid, points }
    }

    /// Centered `wx x ww` block.
    pub fn centered_block(grid: Grid, wx: i64, ww: i64) -> SupportRegion {
        let x0 = -(wx / 2);
        let w0 = -(ww / 2);
        let mut points = Vec::new();
        for x in x0..x0 + wx {
            for w in w0..w0 + ww {
                points.push((x, w));
            }
        }
        SupportRegion::from_points(grid, points)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: i64, w: i64) -> bool {
        let p = (self.grid.reduce(x), self.grid.reduce(w));
        self.points.binary_search(&p).is_ok()
    }
}

/// Singular-value summary of a sampling Gram matrix.
#[derive(Clone, Debug)]
pub struct IdentReport {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rank: usize,
    pub identifiable: bool,
    pub sample_count: usize,
    pub unknown_count: usize,
}

/// Periodized generalized Gaussian `phi_a(t) = 2^{1/4} sum_j e^{-pi a (t + jN)^2 / N}`.
///
/// For `a = 1` this is exactly DFT-invariant on every grid.
pub fn gaussian_window(a: f64, grid: Grid) -> Result<Signal> {
    if a <= 0.0 {
        return Err(Error::NotPositive(a));
    }
    let n = grid.size() as f64;
    let amp = 2f64.powf(0.25);
    let pi = std::f64::consts::PI;
    Ok(Signal::from_fn(grid, |t| {
        // symmetric periodization, truncated once the tails are negligible
        let mut acc = 0.0;
        for j in 0..=2048i64 {
            let up = (-pi * a * (t as f64 + j as f64 * n).powi(2) / n).exp();
            let dn = if j == 0 { 0.0 } else { (-pi * a * (t as f64 - j as f64 * n).powi(2) / n).exp() };
            acc += up + dn;
            if j > 0 && up + dn < 1e-18 * acc.max(1e-300) {
                break;
            }
        }
        C64::new(amp * acc, 0.0)
    }))
}

/// Experimental oscillatory window `2^{1/4} e^{i pi a t^2 / N}` used by the
/// indefinite-width probes; unit modulus, no decay, no guarantees.
pub fn chirp_gaussian_window(a: f64, grid: Grid) -> Signal {
    let n = grid.size() as f64;
    let amp = 2f64.powf(0.25);
    Signal::from_fn(grid, |t| cis_pi(a * (t * t) as f64 / n) * amp)
}

/// Gram matrix of translated window symbols restricted to `K`:
/// entry `(lambda, k) = conj(sigma_S(k - lambda))`.
pub fn build_gram(s: &OperatorMat, lattice: &LatticeSpec, k: &SupportRegion) -> Result<DMatrix<C64>> {
    s.grid().check_same(&lattice.grid())?;
    s.grid().check_same(&k.grid())?;
    let sigma = weyl_symbol(s);
    Ok(build_gram_from_symbol(&sigma, lattice, k))
}

pub(crate) fn build_gram_from_symbol(
    sigma: &PhaseFn,
    lattice: &LatticeSpec,
    k: &SupportRegion,
) -> DMatrix<C64> {
    DMatrix::from_fn(lattice.len(), k.len(), |i, j| {
        let (l1, l2) = lattice.points()[i];
        let (k1, k2) = k.points()[j];
        sigma.get(k1 - l1, k2 - l2).conj()
    })
}

fn singular_values(g: &DMatrix<C64>) -> Vec<f64> {
    let svd = g.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

fn report_from_gram(g: &DMatrix<C64>) -> IdentReport {
    let sv = singular_values(g);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    let threshold = RANK_THRESHOLD * smax;
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    IdentReport {
        sigma_min: smin,
        sigma_max: smax,
        rank,
        identifiable: smax > 0.0 && smin > threshold,
        sample_count: g.nrows(),
        unknown_count: g.ncols(),
    }
}

/// Injectivity of diagonal sampling on `{T : supp sigma_T in K}`.
///
/// Refuses lattices with `|Lambda| < |K|` (injectivity is impossible by
/// dimension count, so this is never a statement about the window).
pub fn identifiability_test(
    s: &OperatorMat,
    lattice: &LatticeSpec,
    k: &SupportRegion,
) -> Result<IdentReport> {
    if lattice.len() < k.len() {
        return Err(Error::UnderSampled { samples: lattice.len(), unknowns: k.len() });
    }
    let g = build_gram(s, lattice, k)?;
    Ok(report_from_gram(&g))
}

/// Least-squares identification: recover the operator with symbol supported
/// in `K` from its diagonal samples.
pub fn ls_identify(
    samples: &[C64],
    s: &OperatorMat,
    lattice: &LatticeSpec,
    k: &SupportRegion,
) -> Result<OperatorMat> {
    if lattice.len() < k.len() {
        return Err(Error::UnderSampled { samples: lattice.len(), unknowns: k.len() });
    }
    if samples.len() != lattice.len() {
        return Err(Error::LengthMismatch { expected: lattice.len(), got: samples.len() });
    }
    let grid = s.grid();
    let g = build_gram(s, lattice, k)?.map(|v| v / grid.size() as f64);
    let x = solve_least_squares(&g, samples)?;
    let mut sigma = PhaseFn::zero(grid);
    for (&(k1, k2), &v) in k.points().iter().zip(x.iter()) {
        sigma.set(k1, k2, v);
    }
    Ok(weyl_quantize(&sigma))
}

/// Minimum-norm least squares via the SVD pseudo-inverse; refuses matrices
/// that are numerically rank deficient.
pub fn solve_least_squares(g: &DMatrix<C64>, rhs: &[C64]) -> Result<Vec<C64>> {
    let svd = g.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested");
    let vt = svd.v_t.as_ref().expect("requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smax <= 0.0 || smin <= RANK_THRESHOLD * smax {
        return Err(Error::IllConditioned(if smax > 0.0 { smin / smax } else { 0.0 }));
    }
    let b = nalgebra::DVector::from_iterator(rhs.len(), rhs.iter().copied());
    let utb = u.adjoint() * b;
    let mut scaled = nalgebra::DVector::zeros(svd.singular_values.len());
    for i in 0..svd.singular_values.len() {
        scaled[i] = utb[i] / svd.singular_values[i];
    }
    let x = vt.adjoint() * scaled;
    Ok(x.iter().copied().collect())
}

/// Outcome of the lattice search for a transformed symbol class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetaIdentStatus {
    /// The two chirp blocks of the decomposition commute; the search is
    /// backed by the identification theorem.
    TheoremSupported,
    /// Non-commuting blocks: the sweep still runs, results are empirical.
    Exploratory,
}

#[derive(Clone, Debug)]
pub struct MetaIdentReport {
    pub status: MetaIdentStatus,
    /// First passing lattice steps, if any.
    pub lattice: Option<(i64, i64)>,
    pub report: Option<IdentReport>,
    /// Every trial in sweep order: steps, |Lambda|, passed.
    pub trials: Vec<((i64, i64), usize, bool)>,
}

/// Sweep separable lattices (densest first) for identifiability of the class
/// `{T : supp(mu(A) sigma_T) in K}` with the transported Gaussian window
/// `S = mu(A)^* (phi (x) phi)`.
pub fn meta_identifiability(
    a: &SympMat,
    k: &SupportRegion,
    grid: Grid,
) -> Result<MetaIdentReport> {
    let word = general_decompose(a)?;
    let mut chirp_upper: Option<DMatrix<f64>> = None;
    let mut chirp_last: Option<DMatrix<f64>> = None;
    for f in &word.0 {
        match f {
            Factor::ChirpUpper(b) => chirp_upper = Some(b.clone()),
            Factor::ChirpLower(c) => chirp_last = Some(c.clone()), // last one wins
            _ => {}
        }
    }
    let commute = match (&chirp_upper, &chirp_last) {
        (Some(b), Some(c)) => (b * c - c * b).abs().max() <= 1e-10,
        _ => true, // a missing factor is the zero matrix, which commutes
    };
    let status = if commute { MetaIdentStatus::TheoremSupported } else { MetaIdentStatus::Exploratory };

    let mu = mu_from(grid, a)?;
    let phi = gaussian_window(1.0, grid)?;
    let s0 = rank_one(&phi, &phi)?;
    let sigma_prime = mu.adjoint_apply_phasefn(&weyl_symbol(&s0));
    let s_prime = weyl_quantize(&sigma_prime);

    // divisor pairs, densest first, lexicographic tie-break
    let n = grid.size() as i64;
    let mut pairs: Vec<(i64, i64)> = Vec::new();
    for a_step in 1..=n {
        if n % a_step != 0 {
            continue;
        }
        for b_step in 1..=n {
            if n % b_step == 0 {
                pairs.push((a_step, b_step));
            }
        }
    }
    pairs.sort_by_key(|&(a, b)| (a * b, a, b)); // |Lambda| = N^2/(ab): descending density

    let mut trials = Vec::new();
    let mut found: Option<((i64, i64), IdentReport)> = None;
    for (a_step, b_step) in pairs {
        let lam = crate::phasespace::make_lattice(grid, a_step, b_step)?;
        if lam.len() < k.len() {
            continue; // undersampled: refused, not a failure
        }
        let rep = identifiability_test(&s_prime, &lam, k)?;
        let pass = rep.identifiable;
        trials.push(((a_step, b_step), lam.len(), pass));
        if pass && found.is_none() {
            found = Some(((a_step, b_step), rep));
            break;
        }
    }
    let (lattice, report) = match found {
        Some((steps, rep)) => (Some(steps), Some(rep)),
        None => (None, None),
    };
    Ok(MetaIdentReport { status, lattice, report, trials })
}

/// Result of the phase-retrieval pipeline.
#[derive(Clone, Debug)]
pub struct PhaseRetrieval {
    /// Recovered signal, up to a global phase.
    pub signal: Signal,
    /// Relative least-squares residual of the sample fit.
    pub residual: f64,
    /// Second-to-first singular value ratio of the recovered operator.
    pub rank_ratio: f64,
}

/// Recover a signal supported on `k1` from the spectrogram samples
/// `|V_g f(lambda)|^2 = Q_{g(x)g}(f(x)f)(lambda, lambda)`.
///
/// The rank-one unknown is identified on its kernel support `k1 x k1` by
/// least squares, then the leading eigenvector of the Hermitian part is
/// extracted. Recovery is exact up to a global phase when the declared
/// support holds and the kernel Gram is injective.
pub fn phase_retrieval_demo(
    f: &Signal,
    k1: &[i64],
    g: &Signal,
    lattice: &LatticeSpec,
) -> Result<PhaseRetrieval> {
    let grid = f.grid();
    grid.check_same(&g.grid())?;
    grid.check_same(&lattice.grid())?;
    let window = rank_one(g, g)?;

    let kpairs: Vec<(i64, i64)> = k1
        .iter()
        .flat_map(|&s| k1.iter().map(move |&t| (grid.reduce(s), grid.reduce(t))))
        .collect();
    if lattice.len() < kpairs.len() {
        return Err(Error::UnderSampled { samples: lattice.len(), unknowns: kpairs.len() });
    }

    // Gram in the kernel picture: row(lambda) = conj(entries of alpha_lambda(g (x) g))
    let gram = DMatrix::from_fn(lattice.len(), kpairs.len(), |i, j| {
        let l = lattice.points()[i];
        let shifted = op_translate_at(grid, l, &window);
        let (s, t) = kpairs[j];
        shifted.get(s, t).conj()
    });

    // measurements from the true signal (demo input)
    let t_true = rank_one(f, f)?;
    let samples: Vec<C64> = lattice
        .points()
        .iter()
        .map(|&l| crate::qha::cohens_class_at(&t_true, &window, l, l))
        .collect::<Result<_>>()?;

    let x = solve_least_squares(&gram, &samples)?;
    // residual of the fit
    let fit = &gram * nalgebra::DVector::from_iterator(x.len(), x.iter().copied());
    let b = nalgebra::DVector::from_iterator(samples.len(), samples.iter().copied());
    let residual = (&fit - &b).norm() / b.norm().max(1e-300);

    let mut recovered = OperatorMat::zero(grid);
    for (&(s, t), &v) in kpairs.iter().zip(x.iter()) {
        recovered.set(s, t, v);
    }
    let dec = spectral_decomp(&recovered);
    let rank_ratio = if dec.rank() >= 2 {
        dec.singular_values[1] / dec.singular_values[0]
    } else {
        0.0
    };
    if rank_ratio > 1e-4 {
        return Err(Error::RankDeficient(rank_ratio));
    }
    // leading eigenvector of the Hermitian part carries the signal
    let herm = recovered.add(&recovered.adjoint()).scale(C64::new(0.5, 0.0));
    let hdec = spectral_decomp(&herm);
    let lead = &hdec.left[0];
    let scale = hdec.singular_values[0].sqrt();
    let signal = lead.scale(C64::new(scale, 0.0));
    Ok(PhaseRetrieval { signal, residual, rank_ratio })
}

/// Align the global phase of `candidate` against `reference` and return the
/// relative distance after alignment.
pub fn phase_aligned_distance(reference: &Signal, candidate: &Signal) -> f64 {
    let ip = reference.inner(candidate);
    let phase = if ip.norm() < 1e-14 { C64::new(1.0, 0.0) } else { ip / ip.norm() };
    reference.sub(&candidate.scale(phase)).norm() / reference.norm().max(1e-300)
}

/// Conditioning probe for lattice families of real exponentials
/// `e^{(E lambda) . t / N}` restricted to `K`; report only, no verdict.
pub fn muntz_gram_probe(
    lattice: &LatticeSpec,
    k: &SupportRegion,
    exponent: &DMatrix<f64>,
) -> IdentReport {
    let n = lattice.grid().size() as f64;
    let g = DMatrix::from_fn(lattice.len(), k.len(), |i, j| {
        let (l1, l2) = lattice.points()[i];
        let (k1, k2) = k.points()[j];
        let e1 = exponent[(0, 0)] * l1 as f64 + exponent[(0, 1)] * l2 as f64;
        let e2 = exponent[(1, 0)] * l1 as f64 + exponent[(1, 1)] * l2 as f64;
        C64::new(((e1 * k1 as f64 + e2 * k2 as f64) / n).exp(), 0.0)
    });
    report_from_gram(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::Prng;
    use crate::phasespace::{make_grid, make_lattice};
    use crate::qha::diagonal;
    use crate::tfa::dft;

    #[test]
    fn gaussian_properties() {
        assert!(matches!(gaussian_window(-1.0, make_grid(8).unwrap()), Err(Error::NotPositive(_))));

        let g = make_grid(16).unwrap();
        let phi = gaussian_window(1.0, g).unwrap();
        // exact DFT self-duality of the theta function
        let res = dft(&phi).sub(&phi).norm() / phi.norm();
        assert!(res < 1e-12, "self-duality residual {res}");
        // even symmetry
        for t in g.values() {
            assert!((phi.get(t) - phi.get(-t)).norm() < 1e-15);
        }
        // faster decay for larger width
        let wide = gaussian_window(4.0, g).unwrap();
        let t = 4i64; // N/4
        assert!(wide.get(t).norm() / wide.get(0).norm() < phi.get(t).norm() / phi.get(0).norm());
    }

    #[test]
    fn gram_consistency_with_diagonal() {
        let g = make_grid(8).unwrap();
        let lam = make_lattice(g, 2, 2).unwrap();
        let k = SupportRegion::centered_block(g, 3, 3);
        let mut rng = Prng::new(61);
        let phi = gaussian_window(1.0, g).unwrap();
        let s = rank_one(&phi, &phi).unwrap();

        // random T supported on K
        let mut sigma = PhaseFn::zero(g);
        let mut xs = Vec::new();
        for &(k1, k2) in k.points() {
            let v = rng.c64();
            sigma.set(k1, k2, v);
            xs.push(v);
        }
        let t = weyl_quantize(&sigma);

        let d = diagonal(&t, &s, &lam).unwrap();
        let gram = build_gram(&s, &lam, &k).unwrap();
        for (i, &l) in lam.points().iter().enumerate() {
            let mut acc = C64::default();
            for (j, &x) in xs.iter().enumerate() {
                acc += gram[(i, j)] * x;
            }
            acc /= 8.0;
            assert!((acc - d[i]).norm() < 1e-10, "lattice point {l:?}");
        }

        // zero window gives a zero matrix
        let z = build_gram(&OperatorMat::zero(g), &lam, &k).unwrap();
        assert!(z.iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn identifiability_basics() {
        let g = make_grid(16).unwrap();
        let phi = gaussian_window(1.0, g).unwrap();
        let s = rank_one(&phi, &phi).unwrap();
        let k = SupportRegion::centered_block(g, 4, 4);

        // the spec'd configuration: critical sampling on (4,4)
        let lam = make_lattice(g, 4, 4).unwrap();
        let rep = identifiability_test(&s, &lam, &k).unwrap();
        assert!(rep.identifiable, "sigma_min/sigma_max = {:e}", rep.sigma_min / rep.sigma_max);
        assert_eq!(rep.rank, k.len());

        // single point: identifiable whenever the symbol reaches it
        let k1 = SupportRegion::from_points(g, vec![(0, 0)]);
        let rep = identifiability_test(&s, &lam, &k1).unwrap();
        assert!(rep.identifiable);

        // undersampled is refused
        let coarse = make_lattice(g, 8, 8).unwrap();
        assert!(matches!(
            identifiability_test(&s, &coarse, &k),
            Err(Error::UnderSampled { samples: 4, unknowns: 16 })
        ));

        // separable-window axis degeneracy: |Lambda| large enough but only
        // two omega samples: exactly singular
        let aniso = make_lattice(g, 1, 8).unwrap();
        assert!(aniso.len() >= k.len());
        let rep = identifiability_test(&s, &aniso, &k).unwrap();
        assert!(!rep.identifiable);
        assert!(rep.sigma_min / rep.sigma_max < 1e-14);
        // Kronecker rank law: min(N/a, 4) * min(N/b, 4)
        assert_eq!(rep.rank, 4 * 2);
    }

    #[test]
    fn ls_identification_pipeline() {
        let g = make_grid(16).unwrap();
        let phi = gaussian_window(1.0, g).unwrap();
        let s = rank_one(&phi, &phi).unwrap();
        let k = SupportRegion::centered_block(g, 4, 4);
        let lam = make_lattice(g, 4, 4).unwrap();
        let mut rng = Prng::new(62);

        for _ in 0..3 {
            let mut sigma = PhaseFn::zero(g);
            for &(k1, k2) in k.points() {
                sigma.set(k1, k2, rng.c64());
            }
            let t = weyl_quantize(&sigma);
            let d = diagonal(&t, &s, &lam).unwrap();
            let rec = ls_identify(&d, &s, &lam, &k).unwrap();
            let rel = rec.sub(&t).hs_norm() / t.hs_norm();
            assert!(rel < 1e-6, "rel err {rel}");
        }

        // zero samples give the zero operator
        let zeros = vec![C64::default(); lam.len()];
        assert!(ls_identify(&zeros, &s, &lam, &k).unwrap().hs_norm() < 1e-12);

        // inconsistent samples: least squares still returns the projection
        let mut noisy = vec![C64::default(); lam.len()];
        noisy[0] = C64::new(1.0, 0.0);
        let rec = ls_identify(&noisy, &s, &lam, &k).unwrap();
        let refit = diagonal(&rec, &s, &lam).unwrap();
        let resid: f64 = refit
            .iter()
            .zip(&noisy)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(resid > 1e-3, "projection residual should be visible");
    }

    #[test]
    fn meta_identifiability_reports() {
        let g = make_grid(16).unwrap();
        let k = SupportRegion::centered_block(g, 4, 4);

        // A = I: theorem-supported; densest lattice passes immediately
        let id = SympMat::new(DMatrix::identity(4, 4)).unwrap();
        let rep = meta_identifiability(&id, &k, g).unwrap();
        assert_eq!(rep.status, MetaIdentStatus::TheoremSupported);
        assert_eq!(rep.lattice, Some((1, 1)));
        assert!(rep.report.as_ref().unwrap().identifiable);

        // fourier_t2: the extracted blocks are diagonal, hence commute
        let ft2 = crate::symplectic::named_matrix("fourier_t2").unwrap();
        let rep = meta_identifiability(&ft2, &k, g).unwrap();
        assert_eq!(rep.status, MetaIdentStatus::TheoremSupported);
        assert!(rep.lattice.is_some());

        // constructed non-commuting pair: status exploratory, report still
        // produced
        let c1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let b1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let m = crate::symplectic::make_vtb(&b1)
            .unwrap()
            .mul(&crate::symplectic::make_vc(&c1).unwrap());
        let rep = meta_identifiability(&m, &k, g).unwrap();
        assert_eq!(rep.status, MetaIdentStatus::Exploratory);
        assert!(!rep.trials.is_empty());
    }

    #[test]
    fn phase_retrieval_pipeline() {
        let g = make_grid(16).unwrap();
        let phi = gaussian_window(1.0, g).unwrap();
        let lam = make_lattice(g, 2, 2).unwrap();
        let k1 = [-2i64, -1, 0, 1];
        let mut rng = Prng::new(63);

        // delta: single unknown modulus
        let d0 = Signal::delta(g, 0).scale(C64::new(0.0, 2.0));
        let out = phase_retrieval_demo(&d0, &[0], &phi, &lam).unwrap();
        assert!(phase_aligned_distance(&d0, &out.signal) < 1e-10);

        let mut f = Signal::zero(g);
        for &t in &k1 {
            f.set(t, rng.c64());
        }
        let out = phase_retrieval_demo(&f, &k1, &phi, &lam).unwrap();
        assert!(phase_aligned_distance(&f, &out.signal) < 1e-8, "err {}", phase_aligned_distance(&f, &out.signal));
        assert!(out.residual < 1e-10);

        // global-phase invariance of the pipeline
        let rotated = f.scale(C64::from_polar(1.0, 1.234));
        let out2 = phase_retrieval_demo(&rotated, &k1, &phi, &lam).unwrap();
        assert!(phase_aligned_distance(&out.signal, &out2.signal) < 1e-8);

        // support wider than declared: the fit residual reports it
        let mut wide = f.clone();
        wide.set(5, C64::new(1.0, 0.0));
        match phase_retrieval_demo(&wide, &k1, &phi, &lam) {
            Ok(out) => assert!(out.residual > 1e-3, "must not silently succeed"),
            Err(Error::RankDeficient(_)) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn muntz_probe_cases() {
        let g = make_grid(8).unwrap();
        let lam = make_lattice(g, 4, 4).unwrap(); // 4 points
        let k = SupportRegion::centered_block(g, 2, 2); // 4 unknowns

        // identity exponent map on a small configuration: full rank
        let rep = muntz_gram_probe(&lam, &k, &DMatrix::identity(2, 2));
        assert_eq!(rep.rank, 4.min(lam.len()));

        // zero map: all rows constant, rank 1
        let rep = muntz_gram_probe(&lam, &k, &DMatrix::zeros(2, 2));
        assert_eq!(rep.rank, 1);

        // rank-one exponent map: rank collapses toward the number of
        // distinct projected lattice values
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let rep = muntz_gram_probe(&lam, &k, &e);
        let distinct: std::collections::BTreeSet<i64> =
            lam.points().iter().map(|&(x, _)| x).collect();
        assert!(rep.rank <= distinct.len());
    }
}
