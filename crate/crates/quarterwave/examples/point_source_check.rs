//! Sanity-check the manufactured reference solution: a radiating point-source
//! field evaluated in the quarter-plane. Verifies the 5-point Helmholtz
//! stencil converges at second order and that analytic gradients match finite
//! differences.

use quarterwave::oracle::{helmholtz_residual, HankelSource};
use quarterwave::Wavenumber;

fn main() {
    let wn = Wavenumber::new(1.0, 0.2).unwrap();
    let src = HankelSource::new(1.0, 1.0, wn);
    let u = |x: f64, z: f64| src.oracle_u(x, z);

    println!("u(1,1)   = {}", u(1.0, 1.0));
    println!("u(0,0)   = {}", src.u00());

    println!("\n5-point stencil residual under delta-halving:");
    let mut prev = None;
    for k in 0..4 {
        let d = 4e-2 / (1 << k) as f64;
        let r = helmholtz_residual(&u, wn.h(), 1.3, 0.9, d).unwrap().norm();
        let order = prev.map(|p: f64| (p / r).log2());
        prev = Some(r);
        match order {
            Some(o) => println!("  delta = {d:.1e}  residual = {r:.3e}  order = {o:.2}"),
            None => println!("  delta = {d:.1e}  residual = {r:.3e}"),
        }
    }

    let (gx, gz) = src.oracle_grad(1.3, 0.9);
    let d = 1e-4;
    let fx = (u(1.3 + d, 0.9) - u(1.3 - d, 0.9)) / (2.0 * d);
    let fz = (u(1.3, 0.9 + d) - u(1.3, 0.9 - d)) / (2.0 * d);
    println!("\ngradient vs central differences:");
    println!("  |u_x - fd| = {:.3e}", (gx - fx).norm());
    println!("  |u_z - fd| = {:.3e}", (gz - fz).norm());
}
