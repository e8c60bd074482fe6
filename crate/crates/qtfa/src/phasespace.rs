//! The finite cyclic phase space.
//!
//! A [`Grid`] is `Z_N` for even `N >= 4` with the centered representatives
//! `{-N/2, ..., N/2 - 1}`. Phase space is `Z_N x Z_N`. Separable lattices
//! `aZ_N x bZ_N` come with their adjoint lattice (the annihilator of the
//! symplectic character `e^{2 pi i Omega(lambda, mu)/N}`) and a centered
//! fundamental domain `Q` whose indicator is the reconstruction window.

use crate::error::{Error, Result};
use crate::util::{inner, norm2};
use crate::C64;

/// The cyclic grid `Z_N`, `N` even, with centered indexing.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Grid {
    n: usize,
}

/// Build a grid, checking the finite-model preconditions.
pub fn make_grid(n: usize) -> Result<Grid> {
    Grid::new(n)
}

impl Grid {
    pub fn new(n: usize) -> Result<Grid> {
        if n % 2 != 0 {
            return Err(Error::OddSize(n));
        }
        if n < 4 {
            return Err(Error::TooSmall(n));
        }
        Ok(Grid { n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `N/2`, the magnitude of the most negative representative.
    pub fn half(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Reduce an arbitrary integer to its centered representative.
    pub fn reduce(&self, v: i64) -> i64 {
        let n = self.n as i64;
        (v + n / 2).rem_euclid(n) - n / 2
    }

    /// Storage index of a value (reduces first, so any integer is accepted).
    pub fn index_of(&self, v: i64) -> usize {
        (self.reduce(v) + self.half()) as usize
    }

    /// Centered representatives in increasing order.
    pub fn values(&self) -> impl Iterator<Item = i64> {
        let h = self.half();
        -h..h
    }

    /// All phase-space points `(x, omega)` in row-major order.
    pub fn points(&self) -> impl Iterator<Item = (i64, i64)> {
        let h = self.half();
        (-h..h).flat_map(move |x| (-h..h).map(move |w| (x, w)))
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// A complex vector on the grid, indexed by centered time values.
#[derive(Clone, PartialEq, Debug)]
pub struct Signal {
    grid: Grid,
    values: Vec<C64>,
}

impl Signal {
    pub fn zero(grid: Grid) -> Signal {
        Signal { grid, values: vec![C64::default(); grid.size()] }
    }

    /// Kronecker delta at time `t`.
    pub fn delta(grid: Grid, t: i64) -> Signal {
        let mut s = Signal::zero(grid);
        s.set(t, C64::new(1.0, 0.0));
        s
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(i64) -> C64) -> Signal {
        let values = grid.values().map(|t| f(t)).collect();
        Signal { grid, values }
    }

    pub fn from_values(grid: Grid, values: Vec<C64>) -> Result<Signal> {
        if values.len() != grid.size() {
            return Err(Error::LengthMismatch { expected: grid.size(), got: values.len() });
        }
        Ok(Signal { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Value at time `t` (cyclic).
    pub fn get(&self, t: i64) -> C64 {
        self.values[self.grid.index_of(t)]
    }

    pub fn set(&mut self, t: i64, v: C64) {
        let i = self.grid.index_of(t);
        self.values[i] = v;
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }

    /// `<f, g>`, conjugate-linear in `g`.
    pub fn inner(&self, other: &Signal) -> C64 {
        inner(&self.values, &other.values)
    }

    pub fn scale(&self, c: C64) -> Signal {
        Signal { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &Signal) -> Signal {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Signal { grid: self.grid, values }
    }

    pub fn sub(&self, other: &Signal) -> Signal {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Signal { grid: self.grid, values }
    }
}

/// A complex array on phase space `Z_N x Z_N`, indexed by `(x, omega)`.
#[derive(Clone, PartialEq, Debug)]
pub struct PhaseFn {
    grid: Grid,
    values: Vec<C64>, // row-major: index = ix * N + iw
}

impl PhaseFn {
    pub fn zero(grid: Grid) -> PhaseFn {
        PhaseFn { grid, values: vec![C64::default(); grid.size() * grid.size()] }
    }

    /// Point mass at `(x, omega)`.
    pub fn delta(grid: Grid, x: i64, w: i64) -> PhaseFn {
        let mut f = PhaseFn::zero(grid);
        f.set(x, w, C64::new(1.0, 0.0));
        f
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(i64, i64) -> C64) -> PhaseFn {
        let h = grid.half();
        let mut values = Vec::with_capacity(grid.size() * grid.size());
        for x in -h..h {
            for w in -h..h {
                values.push(f(x, w));
            }
        }
        PhaseFn { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Value at `(x, omega)`, both coordinates cyclic.
    pub fn get(&self, x: i64, w: i64) -> C64 {
        self.values[self.grid.index_of(x) * self.grid.size() + self.grid.index_of(w)]
    }

    pub fn set(&mut self, x: i64, w: i64, v: C64) {
        let i = self.grid.index_of(x) * self.grid.size() + self.grid.index_of(w);
        self.values[i] = v;
    }

    /// Evaluate the canonical `2N`-periodic extension at an arbitrary integer
    /// point.
    ///
    /// Ambiguity-type functions (STFT ambiguity, Fourier-Wigner transforms)
    /// carry the half-phase `e^{+- i pi x omega / N}` and therefore satisfy
    /// `F(z + N e) = (-1)^{<e, flip(z)>} F(z)` rather than plain periodicity.
    /// This accessor applies that sign rule to the stored centered window.
    pub fn eval_2n_periodic(&self, x: i64, w: i64) -> C64 {
        let xr = self.grid.reduce(x);
        let wr = self.grid.reduce(w);
        let n = self.grid.size() as i64;
        let a = (x - xr) / n; // x = xr + a N
        let b = (w - wr) / n;
        let sign = if (a * wr + b * xr) % 2 == 0 { 1.0 } else { -1.0 };
        self.get(xr, wr) * sign
    }

    /// Cyclic translation: `(T_z F)(zeta) = F(zeta - z)`.
    pub fn translate(&self, x: i64, w: i64) -> PhaseFn {
        PhaseFn::from_fn(self.grid, |a, b| self.get(a - x, b - w))
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }

    pub fn inner(&self, other: &PhaseFn) -> C64 {
        inner(&self.values, &other.values)
    }

    pub fn scale(&self, c: C64) -> PhaseFn {
        PhaseFn { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &PhaseFn) -> PhaseFn {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        PhaseFn { grid: self.grid, values }
    }

    pub fn sub(&self, other: &PhaseFn) -> PhaseFn {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        PhaseFn { grid: self.grid, values }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &PhaseFn) -> PhaseFn {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        PhaseFn { grid: self.grid, values }
    }

    pub fn conj(&self) -> PhaseFn {
        PhaseFn { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect() }
    }
}

/// A separable sampling lattice `aZ_N x bZ_N`.
#[derive(Clone, Debug)]
pub struct LatticeSpec {
    grid: Grid,
    a: i64,
    b: i64,
    points: Vec<(i64, i64)>,
}

/// Build `aZ_N x bZ_N`; `a` and `b` must divide `N`.
pub fn make_lattice(grid: Grid, a: i64, b: i64) -> Result<LatticeSpec> {
    let n = grid.size() as i64;
    if a <= 0 || n % a != 0 {
        return Err(Error::NotDivisor(a, grid.size()));
    }
    if b <= 0 || n % b != 0 {
        return Err(Error::NotDivisor(b, grid.size()));
    }
    let mut points = Vec::with_capacity(((n / a) * (n / b)) as usize);
    for x in grid.values() {
        if x.rem_euclid(a) != 0 {
            continue;
        }
        for w in grid.values() {
            if w.rem_euclid(b) == 0 {
                points.push((x, w));
            }
        }
    }
    Ok(LatticeSpec { grid, a, b, points })
}

impl LatticeSpec {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn steps(&self) -> (i64, i64) {
        (self.a, self.b)
    }

    /// Lattice points as centered representatives, lexicographic order.
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
        self.grid.reduce(x).rem_euclid(self.a) == 0 && self.grid.reduce(w).rem_euclid(self.b) == 0
    }

    /// The adjoint (annihilator) lattice `(N/b)Z_N x (N/a)Z_N`.
    pub fn adjoint(&self) -> LatticeSpec {
        let n = self.grid.size() as i64;
        make_lattice(self.grid, n / self.b, n / self.a).expect("adjoint steps divide N")
    }

    /// Centered fundamental domain of the adjoint lattice.
    pub fn fundamental_domain(&self) -> FundamentalDomain {
        let n = self.grid.size() as i64;
        // the adjoint is (N/b)Z x (N/a)Z; a transversal per axis is a run of
        // N/b (resp. N/a) consecutive integers, so |Q| = (N/a)(N/b) = |Lambda|
        let lx = n / self.b;
        let lw = n / self.a;
        let x0 = -(lx / 2);
        let w0 = -(lw / 2);
        let mut points = Vec::with_capacity((lx * lw) as usize);
        for x in x0..x0 + lx {
            for w in w0..w0 + lw {
                points.push((x, w));
            }
        }
        FundamentalDomain { lattice: self.clone(), points }
    }
}

/// A transversal `Q` of the adjoint lattice: `|Q| = |Lambda|` centered points
/// tiling phase space under adjoint translation.
#[derive(Clone, Debug)]
pub struct FundamentalDomain {
    lattice: LatticeSpec,
    points: Vec<(i64, i64)>,
}

impl FundamentalDomain {
    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn grid(&self) -> Grid {
        self.lattice.grid
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
        let x = self.grid().reduce(x);
        let w = self.grid().reduce(w);
        self.points.iter().any(|&(a, b)| a == x && b == w)
    }
}

/// Indicator `h = 1_Q` of a fundamental domain, as a phase-space function.
pub fn indicator_window(domain: &FundamentalDomain) -> PhaseFn {
    let mut h = PhaseFn::zero(domain.grid());
    for &(x, w) in domain.points() {
        h.set(x, w, C64::new(1.0, 0.0));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_preconditions() {
        assert!(matches!(make_grid(3), Err(Error::OddSize(3))));
        assert!(matches!(make_grid(2), Err(Error::TooSmall(2))));
        let g = make_grid(4).unwrap();
        assert_eq!(g.values().collect::<Vec<_>>(), vec![-2, -1, 0, 1]);
        assert_eq!(make_grid(32).unwrap().size(), 32);
    }

    #[test]
    fn lattice_enumeration_n4() {
        let g = make_grid(4).unwrap();
        let l = make_lattice(g, 2, 2).unwrap();
        assert_eq!(l.len(), 4);
        assert_eq!(l.points(), &[(-2, -2), (-2, 0), (0, -2), (0, 0)]);
        // 2Z_4 = {0, 2} with centered representatives {-2, 0}
        assert!(l.contains(0, 2) && l.contains(2, 0) && !l.contains(1, 0));
    }

    #[test]
    fn adjoint_by_brute_force_annihilator() {
        // N=4, a=b=2: the annihilator of Lambda under e^{2 pi i Omega/N} is 2Z x 2Z
        let g = make_grid(4).unwrap();
        let l = make_lattice(g, 2, 2).unwrap();
        let adj = l.adjoint();
        for (x, w) in g.points() {
            let annihilates = l.points().iter().all(|&(lx, lw)| {
                let om = lx * w - lw * x;
                om.rem_euclid(4) == 0
            });
            assert_eq!(annihilates, adj.contains(x, w), "point ({x},{w})");
        }
    }

    #[test]
    fn lattice_counts_n32() {
        let g = make_grid(32).unwrap();
        let l = make_lattice(g, 4, 4).unwrap();
        assert_eq!(l.len(), 64);
        assert_eq!(l.adjoint().len(), 16);
        assert_eq!(l.fundamental_domain().len(), 64);
        assert_eq!(l.len() * l.adjoint().len(), 32 * 32);
    }

    #[test]
    fn divisor_precondition() {
        let g = make_grid(8).unwrap();
        assert!(matches!(make_lattice(g, 3, 2), Err(Error::NotDivisor(3, 8))));
    }

    #[test]
    fn indicator_counts_and_tiling() {
        let g = make_grid(4).unwrap();
        let l = make_lattice(g, 2, 2).unwrap();
        let q = l.fundamental_domain();
        let h = indicator_window(&q);
        let total: C64 = g.points().map(|(x, w)| h.get(x, w)).sum();
        assert_eq!(q.len(), 4);
        assert!((total.re - q.len() as f64).abs() < 1e-15);

        // tiling: sum over adjoint translates of h is identically 1
        for n in [4usize, 8, 16, 64] {
            let g = make_grid(n).unwrap();
            for (a, b) in [(1, 1), (2, 2), (2, 4), (n as i64 / 2, 2)] {
                if (n as i64) % a != 0 || (n as i64) % b != 0 {
                    continue;
                }
                let l = make_lattice(g, a, b).unwrap();
                let h = indicator_window(&l.fundamental_domain());
                let adj = l.adjoint();
                for (x, w) in g.points() {
                    let s: C64 = adj.points().iter().map(|&(ax, aw)| h.get(x - ax, w - aw)).sum();
                    assert!((s.re - 1.0).abs() < 1e-15 && s.im.abs() < 1e-15, "N={n} a={a} b={b} z=({x},{w})");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn reduce_is_a_retraction(v in -10_000i64..10_000, k in -50i64..50) {
            let g = make_grid(16).unwrap();
            let r = g.reduce(v);
            prop_assert!((-8..8).contains(&r));
            prop_assert_eq!(g.reduce(r), r);
            prop_assert_eq!(g.reduce(v + 16 * k), r);
        }

        #[test]
        fn adjoint_cardinality_identity(ai in 0usize..5, bi in 0usize..5) {
            let n = 16usize;
            let divs = [1i64, 2, 4, 8, 16];
            let g = make_grid(n).unwrap();
            let l = make_lattice(g, divs[ai], divs[bi]).unwrap();
            prop_assert_eq!(l.len() * l.adjoint().len(), n * n);
            prop_assert_eq!(l.fundamental_domain().len(), l.len());
        }
    }
}
