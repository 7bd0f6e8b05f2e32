//! Far-field check: direct oscillatory quadrature over the arc C4 against the
//! one-term stationary-phase estimate, at increasing radii. The ratio tends
//! to 1 like 1/sqrt(hR); the C2 arc contributes nothing for outgoing data.

use std::sync::Arc;

use quarterwave::farfield::farfield_verify;
use quarterwave::oracle::HankelSource;
use quarterwave::relation::OracleRho;
use quarterwave::transforms::{DataTransforms, TraceTransforms};
use quarterwave::Wavenumber;

fn main() {
    // decay-free densities (eps = 0) so amplitudes survive to large radius
    let wn = Wavenumber::new(1.0, 0.0).unwrap();
    let src = HankelSource::new(1.0, 1.0, wn);
    let data = src.boundary_data(60.0);
    let dt = Arc::new(DataTransforms::new(&data, wn, 1.0));
    let tt = Arc::new(TraceTransforms::new(
        Arc::new(move |z| src.gamma_z(z)),
        Arc::new(move |x| src.gamma_x(x)),
        wn,
        60.0,
    ));
    let rho = OracleRho { dt, tt, u00: src.u00(), phi3_sign: 1.0 };

    let theta = std::f64::consts::FRAC_PI_4;
    let rep = farfield_verify(&rho, wn, theta, &[50.0, 100.0, 200.0, 400.0]);
    println!("{:>8} {:>24} {:>12}", "hR", "direct / estimate", "abs err");
    for row in &rep.rows {
        println!("{:8.0} {:>24} {:12.3e}", row.hr, format!("{:.5}", row.ratio), row.abs_err);
    }
    println!("\n|C2 arc| / |C4 arc| = {:.3e}", rep.c2_over_c4);
}
