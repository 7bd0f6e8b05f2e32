//! Spectral transforms of the boundary data and the identity that couples
//! them: with U1, U2 the half-line transforms of the two Neumann traces and
//! Phi1, Phi3 the trace transforms, the combination
//!   (ih/4)(zeta - 1/zeta) Phi1 + (h/4)(zeta + 1/zeta) Phi3 - F
//! vanishes wherever both trace transforms converge.

use std::sync::Arc;

use quarterwave::model::C;
use quarterwave::relation::{relation_residual, ConventionTable, Relation};
use quarterwave::transforms::{DataTransforms, TraceTransforms};
use quarterwave::oracle::HankelSource;
use quarterwave::Wavenumber;

fn main() {
    let wn = Wavenumber::new(1.0, 0.2).unwrap();
    let src = HankelSource::new(1.0, 1.0, wn);
    let data = src.boundary_data(60.0);
    let dt = DataTransforms::new(&data, wn, 1.0);
    let tt = TraceTransforms::new(
        Arc::new(move |z| src.gamma_z(z)),
        Arc::new(move |x| src.gamma_x(x)),
        wn,
        60.0,
    );
    let table = ConventionTable::default();

    println!("transforms at a few spectral points:");
    for &zeta in &[C::new(0.6, 0.4), C::new(-0.5, -0.45), C::new(1.4, -1.1)] {
        println!(
            "  zeta = {zeta:.3}:  U1 = {:.6}  U2 = {:.6}  F = {:.6}",
            dt.eval_u1(zeta),
            dt.eval_u2(zeta),
            dt.eval_f(zeta)
        );
    }

    println!("\nresiduals of the coupling identity and its symmetry images:");
    for (name, rel, zeta) in [
        ("direct   ", Relation::Direct, C::new(0.5, 0.35)),
        ("zeta->-1/zeta", Relation::NegInv, C::new(0.55, -0.4)),
        ("zeta->1/zeta ", Relation::Inv, C::new(-0.5, -0.5)),
        ("zeta->-zeta  ", Relation::Neg, C::new(-0.55, -0.4)),
    ] {
        let r = relation_residual(&dt, &tt, &table, rel, zeta).norm();
        println!("  {name} at zeta = {zeta:.2}: |residual| = {r:.3e}");
    }
}
