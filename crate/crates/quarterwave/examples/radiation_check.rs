//! Outgoing-wave selection: the jump function rho31 must vanish on the arc C2
//! for radiating data. The conjugated (incoming) field has the same boundary
//! moduli but fails the same check by orders of magnitude.

use std::sync::Arc;

use quarterwave::oracle::HankelSource;
use quarterwave::relation::{radiation_closure, OracleRho};
use quarterwave::transforms::{DataTransforms, TraceTransforms};
use quarterwave::Wavenumber;

fn closure(src: HankelSource, conjugated: bool) -> f64 {
    let data = if conjugated { src.conjugated_data(60.0) } else { src.boundary_data(60.0) };
    let dt = Arc::new(DataTransforms::new(&data, src.wn, 1.0));
    let tt = if conjugated {
        TraceTransforms::new(
            Arc::new(move |z| src.gamma_z(z).conj()),
            Arc::new(move |x| src.gamma_x(x).conj()),
            src.wn,
            60.0,
        )
    } else {
        TraceTransforms::new(
            Arc::new(move |z| src.gamma_z(z)),
            Arc::new(move |x| src.gamma_x(x)),
            src.wn,
            60.0,
        )
    };
    let u00 = if conjugated { src.u00().conj() } else { src.u00() };
    let rho = OracleRho { dt, tt: Arc::new(tt), u00, phi3_sign: 1.0 };
    let (cl, scale) = radiation_closure(&rho, 12);
    cl / scale
}

fn main() {
    let wn = Wavenumber::new(1.0, 0.2).unwrap();
    let src = HankelSource::new(1.0, 1.0, wn);
    println!("max |rho31| / max |rho21| on the arc C2:");
    println!("  outgoing data:  {:.3e}", closure(src, false));
    println!("  conjugated data: {:.3e}", closure(src, true));
}
