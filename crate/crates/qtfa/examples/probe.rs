use nalgebra::DMatrix;
use qtfa::identify::gaussian_window;
use qtfa::phasespace::{make_grid, make_lattice, Signal};
use qtfa::quantize::rank_one;
use qtfa::util::Prng;
use qtfa::C64;

fn main() {
    let grid = make_grid(16).unwrap();
    let _phi = gaussian_window(1.0, grid).unwrap();
    let _lattice = make_lattice(grid, 2, 2).unwrap();
    let k1 = [-2i64, -1, 0, 1];
    let mut rng = Prng::new(63);
    let mut f0 = Signal::zero(grid);
    for &t in &k1 { f0.set(t, rng.c64()); }
    let rotated = f0.scale(C64::from_polar(1.0, 1.234));
    let t2 = rank_one(&rotated, &rotated).unwrap();
    // herm ~ t2 + 1e-16 noise, mimic the pipeline matrix
    let n = grid.size();
    let m = DMatrix::<C64>::from_fn(n, n, |i, j| {
        t2.get(i as i64 - 8, j as i64 - 8)
    });
    let svd = m.clone().svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let mut sig = DMatrix::<C64>::zeros(n, n);
    for i in 0..n { sig[(i, i)] = C64::new(svd.singular_values[i], 0.0); }
    let recon = &u * &sig * &vt;
    let resid = (&m - &recon).map(|c| c.norm()).max();
    let mut svs: Vec<f64> = svd.singular_values.iter().copied().collect();
    svs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    println!("nalgebra svd: sigma1 = {:.12}, reassembly residual = {:.3e}", svs[0], resid);
    println!("true sigma1 = ||f||^2 = {:.12}", rotated.norm() * rotated.norm());
    // unitarity of u
    let uu = (u.adjoint() * &u).map(|c| c.norm());
    let mut dev: f64 = 0.0;
    for i in 0..n { for j in 0..n {
        let e = if i == j { 1.0 } else { 0.0 };
        dev = dev.max((uu[(i, j)] - e).abs());
    }}
    println!("U^H U deviation from I: {:.3e}", dev);
}
