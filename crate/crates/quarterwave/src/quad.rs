//! Panel quadrature and Cauchy transforms.
//!
//! Everything integrates on 16-point Legendre panels. Finite integrals are
//! adaptive by bisection; half-line integrals march fixed-rate chunks until the
//! exponential tail bound is below tolerance. The Cauchy transform of a sampled
//! density uses near-field panel subdivision with barycentric re-interpolation,
//! and boundary values use principal-value closed forms per piece geometry plus
//! the Plemelj half-density term.

use crate::model::{PieceGeometry, C};
use std::sync::Arc;
use std::sync::OnceLock;
use thiserror::Error;

/// 16-point Gauss-Legendre abscissae on (-1, 1).
pub const GL_NODES: [f64; 16] = [
    -9.89400934991649939e-01,
    -9.44575023073232600e-01,
    -8.65631202387831755e-01,
    -7.55404408355002999e-01,
    -6.17876244402643771e-01,
    -4.58016777657227370e-01,
    -2.81603550779258915e-01,
    -9.50125098376374544e-02,
    9.50125098376374544e-02,
    2.81603550779258915e-01,
    4.58016777657227370e-01,
    6.17876244402643771e-01,
    7.55404408355002999e-01,
    8.65631202387831755e-01,
    9.44575023073232600e-01,
    9.89400934991649939e-01,
];

/// Matching Gauss-Legendre weights.
pub const GL_WEIGHTS: [f64; 16] = [
    2.71524594117540374e-02,
    6.22535239386477063e-02,
    9.51585116824925914e-02,
    1.24628971255534030e-01,
    1.49595988816576764e-01,
    1.69156519395002619e-01,
    1.82603415044923612e-01,
    1.89450610455068585e-01,
    1.89450610455068585e-01,
    1.82603415044923612e-01,
    1.69156519395002619e-01,
    1.49595988816576764e-01,
    1.24628971255534030e-01,
    9.51585116824925914e-02,
    6.22535239386477063e-02,
    2.71524594117540374e-02,
];

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge within the panel budget; best estimate {best}")]
    Accuracy { best: C },
    #[error("configuration error: {0}")]
    Config(String),
}

/// One quadrature panel [lo, hi] in the piece parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
}

impl Panel {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
    pub fn rad(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
    pub fn node(&self, j: usize) -> f64 {
        self.mid() + self.rad() * GL_NODES[j]
    }
    pub fn weight(&self, j: usize) -> f64 {
        self.rad() * GL_WEIGHTS[j]
    }
}

/// Panel grading over [a, b]: uniform, or geometric with the stated ratio.
/// `TowardA`/`TowardB` name the endpoint the *first* (largest) panel touches;
/// panel widths then shrink geometrically toward the opposite end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    TowardA(f64),
    TowardB(f64),
}

/// Split [a, b] into n graded panels.
pub fn panels(a: f64, b: f64, n: usize, grade: Grading) -> Vec<Panel> {
    let mut edges = Vec::with_capacity(n + 1);
    match grade {
        Grading::Uniform => {
            for k in 0..=n {
                edges.push(a + (b - a) * k as f64 / n as f64);
            }
        }
        Grading::TowardA(ra) | Grading::TowardB(ra) => {
            let denom = 1.0 - ra.powi(n as i32);
            let ts: Vec<f64> = (0..=n).map(|k| (1.0 - ra.powi(k as i32)) / denom).collect();
            match grade {
                Grading::TowardA(_) => {
                    for t in &ts {
                        edges.push(a + (b - a) * t);
                    }
                }
                _ => {
                    for t in &ts {
                        edges.push(b - (b - a) * t);
                    }
                    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
                }
            }
        }
    }
    (0..n).map(|k| Panel { lo: edges[k], hi: edges[k + 1] }).collect()
}

/// Single 16-point panel estimate.
pub fn gl16<F: Fn(f64) -> C + ?Sized>(f: &F, lo: f64, hi: f64) -> C {
    let m = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    let mut s = C::new(0.0, 0.0);
    for j in 0..16 {
        s += r * GL_WEIGHTS[j] * f(m + r * GL_NODES[j]);
    }
    s
}

fn adapt<F: Fn(f64) -> C + ?Sized>(
    f: &F,
    lo: f64,
    hi: f64,
    whole: C,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> (C, bool) {
    let m = 0.5 * (lo + hi);
    let left = gl16(f, lo, m);
    let right = gl16(f, m, hi);
    *evals += 32;
    let two = left + right;
    let diff = (two - whole).norm();
    if diff <= tol {
        return (two, true);
    }
    if depth >= 42 || *evals > 600_000 {
        // out of budget: accept if at least roughly converged
        return (two, diff <= 1e3 * tol);
    }
    let (l, okl) = adapt(f, lo, m, left, 0.5 * tol, depth + 1, evals);
    let (r, okr) = adapt(f, m, hi, right, 0.5 * tol, depth + 1, evals);
    (l + r, okl && okr)
}

/// Adaptive finite integral with estimated error <= tol * (1 + |result|).
pub fn integrate_finite<F: Fn(f64) -> C + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> Result<C, QuadError> {
    if !(a < b) {
        if a == b {
            return Ok(C::new(0.0, 0.0));
        }
        return Err(QuadError::Config(format!("need a < b, got a={a}, b={b}")));
    }
    let whole = gl16(f, a, b);
    let mut evals = 48usize;
    let (v, ok) = adapt(f, a, b, whole, tol * (1.0 + whole.norm()), 0, &mut evals);
    if ok {
        Ok(v)
    } else {
        Err(QuadError::Accuracy { best: v })
    }
}

/// Convenience wrapper that keeps the best estimate on accuracy failure.
pub fn integ<F: Fn(f64) -> C + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> C {
    match integrate_finite(f, a, b, tol) {
        Ok(v) => v,
        Err(QuadError::Accuracy { best }) => best,
        Err(_) => C::new(0.0, 0.0),
    }
}

/// Half-line integral of `g(start + t * direction) * direction` for t >= 0,
/// assuming |g| decays like e^{-decay * t}. Marches fixed-length chunks
/// (adaptively integrated) and stops once the chunk contribution falls under
/// tolerance or the e^{-120} point is passed.
pub fn integrate_decaying_ray<F: Fn(C) -> C>(
    g: F,
    start: C,
    direction: C,
    decay: f64,
    tol: f64,
) -> Result<C, QuadError> {
    if !(decay > 0.0) {
        return Err(QuadError::Config(format!("decay rate must be > 0, got {decay}")));
    }
    let t_cap = (120.0 / decay).min(3e6);
    let chunk = (12.0 / decay).min(t_cap);
    let f = |t: f64| g(start + direction * t) * direction;
    let mut acc = C::new(0.0, 0.0);
    let mut t = 0.0;
    while t < t_cap {
        let hi = (t + chunk).min(t_cap);
        let piece = integ(&f, t, hi, tol);
        acc += piece;
        t = hi;
        if piece.norm() < tol * (1.0 + acc.norm()) && t >= chunk {
            break;
        }
    }
    Ok(acc)
}

static BARY_W: OnceLock<[f64; 16]> = OnceLock::new();

/// Barycentric weights for the Gauss-Legendre abscissae.
pub fn bary_weights() -> &'static [f64; 16] {
    BARY_W.get_or_init(|| {
        let mut w = [1.0f64; 16];
        for j in 0..16 {
            for k in 0..16 {
                if k != j {
                    w[j] /= GL_NODES[j] - GL_NODES[k];
                }
            }
        }
        w
    })
}

/// Barycentric interpolation of values at a panel's GL nodes.
pub fn bary_eval(panel: Panel, vals: &[C; 16], t: f64) -> C {
    let w = bary_weights();
    let x = (t - panel.mid()) / panel.rad();
    let mut num = C::new(0.0, 0.0);
    let mut den = C::new(0.0, 0.0);
    for j in 0..16 {
        let d = x - GL_NODES[j];
        if d.abs() < 1e-14 {
            return vals[j];
        }
        let ww = w[j] / d;
        num += ww * vals[j];
        den += C::new(ww, 0.0);
    }
    num / den
}

/// One sampled contour piece: geometry, orientation multiplier, panels with
/// density values at the GL nodes, and an optional direct density fallback.
pub struct SampledPiece {
    pub geometry: PieceGeometry,
    pub orientation: f64,
    pub panels: Vec<Panel>,
    pub vals: Vec<[C; 16]>,
    pub dens: Option<Arc<dyn Fn(f64) -> C + Send + Sync>>,
    pub t0: f64,
    pub t1: f64,
}

impl SampledPiece {
    pub fn from_density(
        geometry: PieceGeometry,
        orientation: f64,
        pans: Vec<Panel>,
        dens: Arc<dyn Fn(f64) -> C + Send + Sync>,
    ) -> Self {
        let vals: Vec<[C; 16]> = pans
            .iter()
            .map(|p| {
                let mut v = [C::new(0.0, 0.0); 16];
                for j in 0..16 {
                    v[j] = dens(p.node(j));
                }
                v
            })
            .collect();
        let t0 = pans.first().map(|p| p.lo).unwrap_or(0.0);
        let t1 = pans.last().map(|p| p.hi).unwrap_or(0.0);
        SampledPiece { geometry, orientation, panels: pans, vals, dens: Some(dens), t0, t1 }
    }

    /// Density at an arbitrary parameter: barycentric within the containing
    /// panel, direct evaluation as fallback outside all panels.
    pub fn interp(&self, t: f64) -> C {
        for (p, v) in self.panels.iter().zip(&self.vals) {
            if p.lo - 1e-12 <= t && t <= p.hi + 1e-12 {
                return bary_eval(*p, v, t);
            }
        }
        match &self.dens {
            Some(d) => d(t),
            None => {
                // nearest panel extrapolation
                let p = if t < self.t0 { 0 } else { self.panels.len() - 1 };
                bary_eval(self.panels[p], &self.vals[p], t)
            }
        }
    }

    pub fn map(&self, t: f64) -> C {
        self.geometry.map(t)
    }
    pub fn jac(&self, t: f64) -> C {
        self.geometry.jac(t)
    }

    /// Cauchy panel sum over this piece with near-field subdivision.
    /// With `excl = Some((t_on, rt))` integrates the subtracted density
    /// (r - rt) against the Cauchy kernel (principal-value regularization).
    pub fn panel_sum(&self, z: C, excl: Option<(f64, C)>) -> C {
        let mut tot = C::new(0.0, 0.0);
        for (p, v) in self.panels.iter().zip(&self.vals) {
            let mut dmin = f64::INFINITY;
            for j in 0..16 {
                let d = (self.map(p.node(j)) - z).norm();
                if d < dmin {
                    dmin = d;
                }
            }
            let plen = (self.map(p.node(15)) - self.map(p.node(0))).norm();
            let contains = match excl {
                Some((t_on, _)) => p.lo - 1e-12 <= t_on && t_on <= p.hi + 1e-12,
                None => false,
            };
            let near = dmin <= plen || contains;
            if !near {
                for j in 0..16 {
                    let t = p.node(j);
                    let dv = match excl {
                        Some((_, rt)) => v[j] - rt,
                        None => v[j],
                    };
                    tot += p.weight(j) * dv * self.jac(t) / (self.map(t) - z);
                }
                continue;
            }
            // subdivide the panel
            let mut edges: Vec<f64> = Vec::new();
            if contains {
                let (t_on, _) = excl.unwrap();
                let w = p.hi - p.lo;
                for k in 0..5 {
                    edges.push(p.lo + w * k as f64 / 4.0);
                }
                for d in [-0.4, -0.15, -0.05, -0.015, -0.005, 0.0, 0.005, 0.015, 0.05, 0.15, 0.4] {
                    edges.push((t_on + d * w).clamp(p.lo, p.hi));
                }
                edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
                edges.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
            } else {
                let ne = ((plen / dmin.max(1e-3)).ceil() as usize + 2).clamp(2, 40);
                for k in 0..=ne {
                    edges.push(p.lo + (p.hi - p.lo) * k as f64 / ne as f64);
                }
            }
            for k in 0..edges.len() - 1 {
                let (lo, hi) = (edges[k], edges[k + 1]);
                let rr = 0.5 * (hi - lo);
                if rr < 1e-13 {
                    continue;
                }
                let mm = 0.5 * (lo + hi);
                for j in 0..16 {
                    let t = mm + rr * GL_NODES[j];
                    let val = self.interp(t);
                    let dv = match excl {
                        Some((_, rt)) => val - rt,
                        None => val,
                    };
                    tot += rr * GL_WEIGHTS[j] * dv * self.jac(t) / (self.map(t) - z);
                }
            }
        }
        tot
    }

    /// Closed-form principal value of the Cauchy kernel alone (constant density 1)
    /// for a target on this piece at parameter t_on.
    pub fn pv_kernel(&self, t_on: f64) -> C {
        match self.geometry {
            PieceGeometry::Axis { .. } => {
                // PV int_A^B dt/(t - t_on), real logarithm
                C::new(((self.t1 - t_on) / (t_on - self.t0)).ln(), 0.0)
            }
            PieceGeometry::Circle => {
                let z = self.map(t_on);
                let za = self.map(self.t0);
                let zb = self.map(self.t1);
                C::new(((zb - z).norm() / ((za - z).norm())).ln(), 0.5 * (self.t1 - self.t0))
            }
        }
    }
}

/// Sampled density over a full contour.
pub struct DensitySamples {
    pub pieces: Vec<SampledPiece>,
}

impl DensitySamples {
    /// Cauchy transform (1/2 pi i) sum over pieces of int r / (zeta' - z) d zeta'
    /// for z off the contour.
    pub fn cauchy_offcontour(&self, z: C) -> C {
        let mut tot = C::new(0.0, 0.0);
        for pc in &self.pieces {
            tot += pc.orientation * pc.panel_sum(z, None);
        }
        tot / (2.0 * std::f64::consts::PI * crate::model::I)
    }

    /// Principal value of the same transform for a target on piece `on_idx`
    /// at parameter t_on.
    pub fn cauchy_pv(&self, on_idx: usize, t_on: f64) -> C {
        let mut tot = C::new(0.0, 0.0);
        for (i, pc) in self.pieces.iter().enumerate() {
            if i == on_idx {
                let rt = pc.interp(t_on);
                let z = pc.map(t_on);
                tot += pc.orientation * (rt * pc.pv_kernel(t_on) + pc.panel_sum(z, Some((t_on, rt))));
            } else {
                let z = self.pieces[on_idx].map(t_on);
                tot += pc.orientation * pc.panel_sum(z, None);
            }
        }
        tot / (2.0 * std::f64::consts::PI * crate::model::I)
    }

    /// Boundary value per the Sokhotski-Plemelj formula. `side = +1` is the
    /// left side of the traversal direction (above a left-to-right line,
    /// inside a counterclockwise circle), `side = -1` the right side.
    pub fn cauchy_boundary(&self, on_idx: usize, t_on: f64, side: f64) -> C {
        let pc = &self.pieces[on_idx];
        self.cauchy_pv(on_idx, t_on) + side * pc.orientation * 0.5 * pc.interp(t_on)
    }
}
