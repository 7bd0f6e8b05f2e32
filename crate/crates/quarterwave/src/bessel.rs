//! Cylinder functions J0, Y0, J1, Y1 and the outgoing Hankel functions H0, H1
//! for complex argument on the principal branch (|arg w| < pi).
//!
//! Ascending series for |w| <= 14 with terms accumulated in descending
//! magnitude order; Hankel-type asymptotic expansions beyond. At the
//! switchover radius the series roundoff (max term ~ e^{|w|} * eps) and the
//! optimally truncated asymptotic error are both ~1e-11, so integrands built
//! on these stay smooth at the 1e-9 quadrature tolerance.

use crate::model::{C, I};
use thiserror::Error;

const EULER_GAMMA: f64 = 0.577215664901532860606512090082;
const SWITCH_RADIUS: f64 = 14.0;
const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;

#[derive(Debug, Error)]
pub enum BesselError {
    #[error("argument {0} too close to the negative real axis (branch cut)")]
    BranchCut(C),
}

fn check_branch(w: C) -> Result<(), BesselError> {
    if w.re < 0.0 && w.im.abs() < 1e-12 * w.re.abs() {
        return Err(BesselError::BranchCut(w));
    }
    Ok(())
}

/// Sum terms largest-magnitude-first to limit rounding in cancellative series.
fn sum_descending(mut terms: Vec<C>) -> C {
    terms.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    let mut s = C::new(0.0, 0.0);
    for t in terms {
        s += t;
    }
    s
}

fn series_terms_j0(w: C) -> Vec<C> {
    let q = (w / 2.0) * (w / 2.0);
    let mut terms = Vec::with_capacity(80);
    let mut t = C::new(1.0, 0.0);
    terms.push(t);
    for k in 1..80usize {
        t *= -q / ((k * k) as f64);
        terms.push(t);
        if t.norm() < 1e-18 && k as f64 > w.norm() {
            break;
        }
    }
    terms
}

fn j0_series(w: C) -> C {
    sum_descending(series_terms_j0(w))
}

fn j1_series(w: C) -> C {
    let q = (w / 2.0) * (w / 2.0);
    let mut terms = Vec::with_capacity(80);
    let mut t = C::new(1.0, 0.0); // q^k / (k!(k+1)!) with alternating sign
    terms.push(t);
    for k in 1..80usize {
        t *= -q / ((k * (k + 1)) as f64);
        terms.push(t);
        if t.norm() < 1e-18 && k as f64 > w.norm() {
            break;
        }
    }
    (w / 2.0) * sum_descending(terms)
}

fn y0_series(w: C) -> C {
    let q = (w / 2.0) * (w / 2.0);
    let lg = (w / 2.0).ln() + EULER_GAMMA;
    let mut terms = Vec::with_capacity(80);
    let mut t = C::new(1.0, 0.0); // q^k/(k!)^2 with sign (-1)^{k+1} folded below
    let mut hk = 0.0; // harmonic number H_k
    for k in 1..80usize {
        t *= q / ((k * k) as f64);
        hk += 1.0 / k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * hk * t;
        terms.push(term);
        if term.norm() < 1e-18 && k as f64 > w.norm() {
            break;
        }
    }
    FRAC_2_PI * (lg * j0_series(w) + sum_descending(terms))
}

fn y1_series(w: C) -> C {
    let q = (w / 2.0) * (w / 2.0);
    let lg = (w / 2.0).ln() + EULER_GAMMA;
    let mut terms = Vec::with_capacity(80);
    let mut t = w / 2.0; // (w/2)^{2k+1}/(k!(k+1)!) with sign (-1)^k
    let mut hk = 0.0;
    let mut hk1 = 1.0;
    terms.push(t * (hk + hk1));
    for k in 1..80usize {
        t *= -q / ((k * (k + 1)) as f64);
        hk += 1.0 / k as f64;
        hk1 += 1.0 / (k + 1) as f64;
        let term = t * (hk + hk1);
        terms.push(term);
        if term.norm() < 1e-18 && k as f64 > w.norm() {
            break;
        }
    }
    FRAC_2_PI * lg * j1_series(w) - FRAC_2_PI / w - sum_descending(terms) / std::f64::consts::PI
}

/// Asymptotic factor sum_k (±i)^k a_k(nu) / w^k; truncated at the smallest term.
fn asym_factor(nu: f64, w: C, sign_i: f64) -> C {
    let mut s = C::new(1.0, 0.0);
    let mut a = 1.0f64;
    let mut pw = C::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..40usize {
        let m = (2 * k - 1) as f64;
        a *= (4.0 * nu * nu - m * m) / (8.0 * k as f64);
        pw /= w;
        let term = (I * sign_i).powu(k as u32) * a * pw;
        let tn = term.norm();
        if tn > prev {
            break;
        }
        s += term;
        prev = tn;
    }
    s
}

fn hankel1_asym(nu: f64, w: C) -> C {
    let chi = w - (nu * 0.5 + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * w)).sqrt() * (I * chi).exp() * asym_factor(nu, w, 1.0)
}

fn hankel2_asym(nu: f64, w: C) -> C {
    let chi = w - (nu * 0.5 + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * w)).sqrt() * (-I * chi).exp() * asym_factor(nu, w, -1.0)
}

/// Bessel function of the first kind, order 0.
pub fn bessel_j0(w: C) -> Result<C, BesselError> {
    check_branch(w)?;
    if w.norm() <= SWITCH_RADIUS {
        Ok(j0_series(w))
    } else {
        Ok(0.5 * (hankel1_asym(0.0, w) + hankel2_asym(0.0, w)))
    }
}

/// Bessel function of the first kind, order 1.
pub fn bessel_j1(w: C) -> Result<C, BesselError> {
    check_branch(w)?;
    if w.norm() <= SWITCH_RADIUS {
        Ok(j1_series(w))
    } else {
        Ok(0.5 * (hankel1_asym(1.0, w) + hankel2_asym(1.0, w)))
    }
}

/// Bessel function of the second kind, order 0.
pub fn bessel_y0(w: C) -> Result<C, BesselError> {
    check_branch(w)?;
    if w.norm() <= SWITCH_RADIUS {
        Ok(y0_series(w))
    } else {
        Ok((hankel1_asym(0.0, w) - hankel2_asym(0.0, w)) / (2.0 * I))
    }
}

/// Bessel function of the second kind, order 1.
pub fn bessel_y1(w: C) -> Result<C, BesselError> {
    check_branch(w)?;
    if w.norm() <= SWITCH_RADIUS {
        Ok(y1_series(w))
    } else {
        Ok((hankel1_asym(1.0, w) - hankel2_asym(1.0, w)) / (2.0 * I))
    }
}

/// Outgoing Hankel function H0^(1).
pub fn hankel_h0_1(w: C) -> Result<C, BesselError> {
    check_branch(w)?;
    if w.norm() <= SWITCH_RADIUS {
        Ok(j0_series(w) + I * y0_series(w))
    } else {
        Ok(hankel1_asym(0.0, w))
    }
}

/// Outgoing Hankel function H1^(1).
pub fn hankel_h1_1(w: C) -> Result<C, BesselError> {
    check_branch(w)?;
    if w.norm() <= SWITCH_RADIUS {
        Ok(j1_series(w) + I * y1_series(w))
    } else {
        Ok(hankel1_asym(1.0, w))
    }
}
