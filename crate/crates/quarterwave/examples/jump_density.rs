//! Build the jump density on the real line and the unit circle from boundary
//! data alone, then check the Sokhotski-Plemelj identity: the two boundary
//! values of the Cauchy integral must differ by exactly the density.

use quarterwave::oracle::HankelSource;
use quarterwave::relation::ConventionTable;
use quarterwave::solver::Solver;
use quarterwave::Wavenumber;

fn main() {
    let wn = Wavenumber::new(1.0, 0.2).unwrap();
    let src = HankelSource::new(1.0, 1.0, wn);
    let data = src.boundary_data(60.0);
    let solver = Solver::new(&data, wn, ConventionTable::default()).unwrap();

    println!("density on the real line (regularized at the poles s = +-1):");
    for &s in &[-3.0, -1.5, -0.6, -0.1, 0.1, 0.6, 1.5, 3.0] {
        println!("  r({s:5.2}) = {:.6}", solver.density_line_reg(s));
    }

    println!("\ndensity on the unit circle:");
    for k in 0..8 {
        let th = (2.0 * k as f64 + 1.0) * std::f64::consts::PI / 8.0;
        println!("  r(e^(i {th:.3})) = {:.6}", solver.density_circ(th));
    }

    let jump = solver.plemelj_check(10);
    println!("\nmax Plemelj jump defect over the line: {jump:.3e}");
    println!("corner value u(0,0) = {:.8} (reference {:.8})", solver.u00, src.u00());
}
