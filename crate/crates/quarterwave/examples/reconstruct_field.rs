//! End-to-end solve: boundary data -> spectral transforms -> jump density ->
//! oriented-contour representation of u(x, z), compared against the known
//! point-source field that generated the data.

use std::sync::Arc;

use quarterwave::oracle::HankelSource;
use quarterwave::relation::ConventionTable;
use quarterwave::solver::{u_field, KSet, Solver, SolverRho};
use quarterwave::Wavenumber;

fn main() {
    let wn = Wavenumber::new(1.0, 0.2).unwrap();
    let src = HankelSource::new(1.0, 1.0, wn);
    let data = src.boundary_data(60.0);
    let table = ConventionTable::default();

    let solver = Arc::new(Solver::new(&data, wn, table.clone()).unwrap());
    let rho = SolverRho { solver, hard_zero_c2: true };
    let ks = KSet::build(&rho, wn).unwrap();

    println!("{:>6} {:>6} {:>24} {:>24} {:>10}", "x", "z", "u (solve)", "u (reference)", "rel err");
    for &(x, z) in &[(1.0, 1.0), (2.0, 0.5), (0.5, 2.0), (3.0, 3.0), (1.0, 4.0)] {
        let u = u_field(&ks, &table, x, z).unwrap();
        let ur = src.oracle_u(x, z);
        println!(
            "{x:6.2} {z:6.2} {:>24} {:>24} {:10.2e}",
            format!("{u:.6}"),
            format!("{ur:.6}"),
            (u - ur).norm() / ur.norm()
        );
    }
}
