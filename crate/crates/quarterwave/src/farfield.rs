//! Far-field asymptotics of the contour representation.
//!
//! At large hR only the two circle arcs contribute (the ray and segment
//! phases decay); stationary phase on the circle, where the exponent is
//! i h R sin(theta - phi), localizes the field at phi = theta -+ pi/2. The
//! outgoing wave comes from the lower-right arc C4, the incoming one from the
//! upper-left arc C2 -- which the radiation closure empties.

use crate::model::{Wavenumber, C, I, PI};
use crate::quad::gl16;
use crate::relation::RhoEval;

/// Stationary points of the circle phase at observation angle theta:
/// (zeta1, zeta2) = (e^{i(theta - pi/2)}, e^{i(theta + pi/2)}).
pub fn stationary_points(theta: f64) -> (C, C) {
    (C::from_polar(1.0, theta - 0.5 * PI), C::from_polar(1.0, theta + 0.5 * PI))
}

/// Outgoing stationary-phase contribution of the lower-right arc:
/// rho31(zeta1) sqrt(2 pi / (h R)) e^{i (h R - pi/4)} / (2 pi).
pub fn farfield_c4(rho31_at_zeta1: C, hr: f64) -> C {
    rho31_at_zeta1 * (2.0 * PI / hr).sqrt() * (I * (hr - 0.25 * PI)).exp() / (2.0 * PI)
}

/// Incoming counterpart from the upper-left arc:
/// rho13(zeta2) sqrt(2 pi / (h R)) e^{-i (h R - pi/4)} / (2 pi).
pub fn farfield_c2(rho13_at_zeta2: C, hr: f64) -> C {
    rho13_at_zeta2 * (2.0 * PI / hr).sqrt() * (-I * (hr - 0.25 * PI)).exp() / (2.0 * PI)
}

/// Direct arc integral (1 / 2 pi) int e^{i h R sin(theta - phi)} rho(phi) dphi
/// with the density interpolated from Chebyshev anchors so the oscillatory
/// quadrature does not re-evaluate it.
fn direct_arc(rho_anchor: &dyn Fn(f64) -> C, lo: f64, hi: f64, hr: f64, theta: f64) -> C {
    let n = 40;
    let phis: Vec<f64> = (0..n)
        .map(|j| 0.5 * (lo + hi) + 0.5 * (hi - lo) * (PI * (j as f64 + 0.5) / n as f64).cos())
        .collect();
    let vals: Vec<C> = phis.iter().map(|&p| rho_anchor(p)).collect();
    let interp = |phi: f64| -> C {
        let mut num = C::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..n {
            let d = phi - phis[j];
            if d.abs() < 1e-14 {
                return vals[j];
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * (PI * (j as f64 + 0.5) / n as f64).sin() / d;
            num += w * vals[j];
            den += w;
        }
        num / den
    };
    let npan = ((hr * (hi - lo)).ceil() as usize / 4).max(24);
    let mut tot = C::new(0.0, 0.0);
    for k in 0..npan {
        let a = lo + (hi - lo) * k as f64 / npan as f64;
        let b = lo + (hi - lo) * (k + 1) as f64 / npan as f64;
        tot += gl16(
            &|phi: f64| (I * hr * (theta - phi).sin()).exp() * interp(phi),
            a,
            b,
        );
    }
    tot / (2.0 * PI)
}

#[derive(Debug, Clone)]
pub struct FarfieldRow {
    pub hr: f64,
    pub theta: f64,
    pub ratio: C,
    pub abs_err: f64,
}

#[derive(Debug, Clone)]
pub struct FarfieldReport {
    pub rows: Vec<FarfieldRow>,
    /// |direct C2| / |direct C4| at the largest hR (small for outgoing data).
    pub c2_over_c4: f64,
}

/// Compare the direct oscillatory arc integrals against the stationary-phase
/// formulas at the given hR values. Meant for the decay-free case eps = 0,
/// where the arc densities can be evaluated directly.
pub fn farfield_verify(rho: &dyn RhoEval, _wn: Wavenumber, theta: f64, hrs: &[f64]) -> FarfieldReport {
    let (z1, z2) = stationary_points(theta);
    let c4_lo = 1.5 * PI;
    let c4_hi = 2.0 * PI - 0.002;
    let c2_lo = 0.5 * PI;
    let c2_hi = PI - 0.002;
    let r31 = |phi: f64| rho.rho31(C::from_polar(1.0, phi));
    let r13 = |phi: f64| -rho.rho31(C::from_polar(1.0, phi));

    let mut rows = Vec::with_capacity(hrs.len());
    let mut last_c4 = 0.0f64;
    for &hr in hrs {
        let direct = direct_arc(&r31, c4_lo, c4_hi, hr, theta);
        let formula = farfield_c4(rho.rho31(z1), hr);
        rows.push(FarfieldRow {
            hr,
            theta,
            ratio: direct / formula,
            abs_err: (direct - formula).norm(),
        });
        last_c4 = direct.norm();
    }
    let hr_max = hrs.iter().cloned().fold(0.0, f64::max);
    let c2_direct = direct_arc(&r13, c2_lo, c2_hi, hr_max, theta);
    let _ = farfield_c2(-rho.rho31(z2), hr_max);
    FarfieldReport {
        rows,
        c2_over_c4: if last_c4 > 0.0 { c2_direct.norm() / last_c4 } else { f64::INFINITY },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_points_sit_on_their_arcs() {
        let (z1, z2) = stationary_points(0.25 * PI);
        let t1 = z1.arg().rem_euclid(2.0 * PI);
        let t2 = z2.arg().rem_euclid(2.0 * PI);
        assert!(t1 > 1.5 * PI && t1 < 2.0 * PI);
        assert!(t2 > 0.5 * PI && t2 < PI);
    }

    #[test]
    fn direct_arc_stationary_phase_benchmark() {
        // rho = 1: the integral tends to the stationary-phase value
        // sqrt(2 pi / hr) e^{i(hr - pi/4)} / (2 pi) when the stationary point
        // is interior to the arc.
        // endpoint contributions decay like 1/hr against the 1/sqrt(hr)
        // stationary term, so the relative error shrinks as hr grows
        let theta = 0.25 * PI;
        let err = |hr: f64| {
            let val = direct_arc(&|_| C::new(1.0, 0.0), 1.5 * PI, 2.0 * PI - 0.002, hr, theta);
            let pred = farfield_c4(C::new(1.0, 0.0), hr);
            (val - pred).norm() / pred.norm()
        };
        let (e4, e16) = (err(400.0), err(6400.0));
        assert!(e4 < 0.08, "rel err {e4:.3e} at hr=400");
        assert!(e16 < 0.5 * e4, "no decay: {e4:.3e} -> {e16:.3e}");
    }
}
