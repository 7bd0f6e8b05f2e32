//! The inverse path from boundary data alone.
//!
//! Pipeline: data transforms -> corner-pole strength and inner/outer density
//! models -> sampled jump density r on Gamma (real line + unit circle) ->
//! Omega as a Cauchy integral with the pole and far-tail parts in closed form
//! -> Phi1 boundary values by Plemelj sides -> Phi3 products through the
//! relation and its zeta -> -1/zeta image -> jump functions rho on the contour
//! K -> u(x,z) by oscillatory panel sums with small-parameter zones and fitted
//! ray tails. The sign audit that pins every flagged convention lives here
//! because it needs the whole pipeline.

use crate::model::{in_d1, BoundaryData, PieceGeometry, Wavenumber, C, I, PI};
use crate::quad::{panels, Grading, Panel, SampledPiece, GL_NODES, GL_WEIGHTS};
use crate::relation::{ConventionTable, OracleRho, RhoEval};
use crate::smallalg::{lstsq, solve};
use crate::transforms::{DataTransforms, TraceTransforms};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Half-width of the inner (quadratic-model) zone of the line density.
pub const S_LO: f64 = 0.2;
/// Truncation radius of the line part of Gamma.
pub const LAMBDA: f64 = 6.0;
/// Inner breakpoints of the K segments: below these parameters the densities
/// come from the anchored small-t models instead of direct assembly.
pub const T_BR_SEG_N: f64 = 0.08;
pub const T_BR_SEG_NI: f64 = 0.17;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("({0}, {1}) is outside the representation wedge: need x > eps*z and z > eps*x, both positive")]
    OutsideWedge(f64, f64),
    #[error("zeta = {0} is outside the analyticity set of Phi1")]
    OutsideD1(C),
    #[error("zeta = {0} is inside the excluded neighborhood of +-i")]
    NearPole(C),
    #[error("density not finite at parameter {0} on piece {1}")]
    BadDensity(f64, String),
    #[error("sign audit ambiguous: best {0:.3e}, runner-up {1:.3e} (margin below 10x)")]
    AuditAmbiguous(f64, f64),
}

/// The regularized jump density on Gamma: pole part removed on the line,
/// quadratic model inside |s| <= S_LO, combination A or B by interval pairing.
struct GammaDensity {
    dt: Arc<DataTransforms>,
    h: C,
    ca: C,
    q: C,
    cin: C,
    swapped: bool,
}

impl GammaDensity {
    fn pfac(&self, z: C) -> C {
        4.0 * z / (I * self.h * (z * z - 1.0))
    }

    fn psi_line(&self, s: f64) -> C {
        self.q * (1.0 / (s - 1.0) - 1.0 / (s + 1.0))
    }

    fn inner_combo(&self, z: C) -> C {
        if self.swapped { self.dt.combo_b(z) } else { self.dt.combo_a(z) }
    }

    fn outer_combo(&self, z: C) -> C {
        if self.swapped { self.dt.combo_a(z) } else { self.dt.combo_b(z) }
    }

    fn line(&self, s: f64) -> C {
        let zs = C::new(s, 0.0);
        if s.abs() <= S_LO {
            self.cin * s * s - self.psi_line(s)
        } else if s >= 1.0 {
            self.pfac(zs) * (self.outer_combo(zs) - self.ca / s)
        } else if s > 0.0 {
            self.pfac(zs) * (self.inner_combo(zs) - self.ca / s)
        } else if s <= -1.0 {
            -self.pfac(zs) * (self.inner_combo(zs) + self.ca / s)
        } else {
            -self.pfac(zs) * (self.outer_combo(zs) + self.ca / s)
        }
    }

    fn circ(&self, th: f64) -> C {
        let w = C::from_polar(1.0, th);
        let comb = if th.sin() >= 0.0 { self.dt.combo_a(w) } else { self.dt.combo_b(w) };
        self.pfac(w) * (comb - self.ca)
    }
}

/// The sectional field built from boundary data: sampled Gamma density, the
/// Cauchy-integral Omega with closed-form pole and tail parts, and the jump
/// assembly on K.
pub struct Solver {
    pub wn: Wavenumber,
    pub dt: Arc<DataTransforms>,
    pub table: ConventionTable,
    /// Pole strength F(1) + F(-1) (the corner anomaly).
    pub ca: C,
    /// Residue parameter 2 ca / (i h) of the removed simple poles at +-1.
    pub q: C,
    /// Inner quadratic model coefficient of the line density.
    pub cin: C,
    /// Far-tail coefficients: r ~ g2/s^2 + g3/s^3 beyond Lambda.
    pub g2: C,
    pub g3: C,
    /// Corner value u(0,0) extracted by Richardson extrapolation on Omega.
    pub u00: C,
    gd: Arc<GammaDensity>,
    /// Pieces 0..=4: line intervals of Gamma in order
    /// (-L,-1), (-1,-s_lo), (-s_lo,s_lo), (s_lo,1), (1,L); pieces 5..=8: arcs C1..C4.
    pieces: Vec<SampledPiece>,
    om_cache: Mutex<HashMap<(u64, u64), C>>,
    bv_cache: Mutex<HashMap<(u64, usize, i8), C>>,
}

impl Solver {
    pub fn new(data: &BoundaryData, wn: Wavenumber, table: ConventionTable) -> Result<Self, SolverError> {
        let dt = Arc::new(DataTransforms::new(data, wn, table.f_u1_sign));
        let h = wn.h();
        let ca = dt.combo_a(C::new(1.0, 0.0));
        let q = 2.0 * ca / (I * h);
        let swapped = table.interval_pairing < 0.0;

        // inner model coefficient from a short fit just outside s_lo
        let mut gd = GammaDensity { dt: dt.clone(), h, ca, q, cin: C::new(0.0, 0.0), swapped };
        let mut cin = C::new(0.0, 0.0);
        let fit_s: Vec<f64> = (0..5).map(|i| 0.21 + 0.09 * i as f64 / 4.0).collect();
        for &s in &fit_s {
            let zs = C::new(s, 0.0);
            cin += (gd.pfac(zs) * (gd.inner_combo(zs) - ca / s) + gd.psi_line(s)) / (s * s);
        }
        cin /= fit_s.len() as f64;
        gd.cin = cin;
        let gd = Arc::new(gd);

        // far-tail coefficients of the regularized density
        let sso: Vec<f64> = (0..8).map(|i| 4.2 + 1.7 * i as f64 / 7.0).collect();
        let rows: Vec<Vec<C>> = sso
            .iter()
            .map(|&s| vec![C::new(1.0 / (s * s), 0.0), C::new(1.0 / (s * s * s), 0.0)])
            .collect();
        let rhs: Vec<C> = sso.iter().map(|&s| gd.line(s)).collect();
        let g = lstsq(&rows, &rhs);
        let (g2, g3) = (g[0], g[1]);

        // sampled density tables on Gamma
        let line_specs: [(f64, f64, usize, Grading); 5] = [
            (-LAMBDA, -1.0, 10, Grading::TowardB(0.75)),
            (-1.0, -S_LO, 8, Grading::TowardA(0.75)),
            (-S_LO, S_LO, 4, Grading::Uniform),
            (S_LO, 1.0, 8, Grading::TowardB(0.75)),
            (1.0, LAMBDA, 10, Grading::TowardA(0.75)),
        ];
        let mut pieces = Vec::with_capacity(9);
        for (a, b, n, gr) in line_specs {
            let gdl = gd.clone();
            pieces.push(SampledPiece::from_density(
                PieceGeometry::Axis { scale: C::new(1.0, 0.0) },
                1.0,
                panels(a, b, n, gr),
                Arc::new(move |s| gdl.line(s)),
            ));
        }
        for k in 0..4 {
            let gdc = gd.clone();
            pieces.push(SampledPiece::from_density(
                PieceGeometry::Circle,
                1.0,
                panels(0.5 * PI * k as f64, 0.5 * PI * (k + 1) as f64, 6, Grading::Uniform),
                Arc::new(move |t| gdc.circ(t)),
            ));
        }
        for (i, pc) in pieces.iter().enumerate() {
            for (p, v) in pc.panels.iter().zip(&pc.vals) {
                for j in 0..16 {
                    if !v[j].re.is_finite() || !v[j].im.is_finite() {
                        return Err(SolverError::BadDensity(p.node(j), format!("Gamma piece {i}")));
                    }
                }
            }
        }

        let mut sv = Solver {
            wn,
            dt,
            table,
            ca,
            q,
            cin,
            g2,
            g3,
            u00: C::new(0.0, 0.0),
            gd,
            pieces,
            om_cache: Mutex::new(HashMap::new()),
            bv_cache: Mutex::new(HashMap::new()),
        };

        // corner value: (h/2)(s - 1/s) Omega(-is) -> u00 + c1/s + c2/s^2
        let svals = [10.0, 20.0, 40.0];
        let gv: Vec<C> = svals
            .iter()
            .map(|&s| 0.5 * h * (s - 1.0 / s) * sv.omega(C::new(0.0, -s)))
            .collect();
        let vrows: Vec<Vec<C>> = svals
            .iter()
            .map(|&s| vec![C::new(1.0, 0.0), C::new(1.0 / s, 0.0), C::new(1.0 / (s * s), 0.0)])
            .collect();
        sv.u00 = solve(&vrows, &gv)[0];
        Ok(sv)
    }

    /// Regularized line density (the quantity sampled on the line pieces).
    pub fn density_line_reg(&self, s: f64) -> C {
        self.gd.line(s)
    }

    /// Regularized circle density.
    pub fn density_circ(&self, th: f64) -> C {
        self.gd.circ(th)
    }

    /// Full line density r = r_reg + psi. Within `delta` of the poles at +-1
    /// the value is a one-sided quadratic limit through three nearby samples.
    pub fn density_line(&self, s: f64, delta: f64) -> C {
        let full = |t: f64| self.gd.line(t) + self.gd.psi_line(t);
        let p = if (s - 1.0).abs() < (s + 1.0).abs() { 1.0 } else { -1.0 };
        let d = s.abs() - 1.0; // signed distance through the pole, by radius
        if d.abs() >= delta {
            return full(s);
        }
        // one-sided quadratic extrapolation from the same radial side
        let sgn_r = if d >= 0.0 { 1.0 } else { -1.0 };
        let base = p * (1.0 + sgn_r * delta);
        let step = p * sgn_r * delta;
        let ts = [base, base + step, base + 2.0 * step];
        let rows: Vec<Vec<C>> = ts
            .iter()
            .map(|&t| vec![C::new(1.0, 0.0), C::new(t - p, 0.0), C::new((t - p) * (t - p), 0.0)])
            .collect();
        let vals: Vec<C> = ts.iter().map(|&t| full(t)).collect();
        let c = solve(&rows, &vals);
        c[0] + c[1] * (s - p) + c[2] * (s - p) * (s - p)
    }

    fn tail_i2(&self, z: C) -> C {
        -((LAMBDA - z) / LAMBDA).ln() / (z * z) - 1.0 / (z * LAMBDA)
    }

    fn tail_i3(&self, z: C) -> C {
        -((LAMBDA - z) / LAMBDA).ln() / (z * z * z) - 1.0 / (z * z * LAMBDA)
            - 1.0 / (2.0 * z * LAMBDA * LAMBDA)
    }

    /// Closed-form parts of Omega: the removed pole density, its circle
    /// counterpart, and the truncated far tail of the line.
    fn psi_parts(&self, z: C, sigma: f64, inside: bool) -> C {
        let psi_l = -(sigma * 0.5) * self.q * (1.0 / (1.0 - z) + 1.0 / (1.0 + z));
        let psi_c = self.q * z / (1.0 - z * z) * if inside { -1.0 } else { 1.0 };
        let tails = (self.g2 * (self.tail_i2(z) - self.tail_i2(-z))
            + self.g3 * (self.tail_i3(z) - self.tail_i3(-z)))
            / (2.0 * PI * I);
        psi_l + psi_c + tails
    }

    fn cauchy_sum(&self, z: C, on: Option<(usize, f64)>) -> C {
        let mut tot = C::new(0.0, 0.0);
        for (i, pc) in self.pieces.iter().enumerate() {
            match on {
                Some((idx, t_on)) if idx == i => {
                    let rt = pc.interp(t_on);
                    tot += rt * pc.pv_kernel(t_on) + pc.panel_sum(z, Some((t_on, rt)));
                }
                _ => tot += pc.panel_sum(z, None),
            }
        }
        tot / (2.0 * PI * I)
    }

    /// Omega off the contour.
    pub fn omega(&self, z: C) -> C {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.om_cache.lock().unwrap().get(&key) {
            return *v;
        }
        let v = self.cauchy_sum(z, None) + self.psi_parts(z, z.im.signum(), z.norm() < 1.0);
        self.om_cache.lock().unwrap().insert(key, v);
        v
    }

    /// Plemelj boundary value of Omega on piece `which` at parameter `t_on`.
    /// For line pieces `side` +1/-1 means above/below; for arcs inside/outside.
    pub fn omega_bv(&self, t_on: f64, which: usize, side: f64) -> C {
        let key = (t_on.to_bits(), which, side as i8);
        if let Some(v) = self.bv_cache.lock().unwrap().get(&key) {
            return *v;
        }
        let pc = &self.pieces[which];
        let z = pc.map(t_on);
        let pv = self.cauchy_sum(z, Some((which, t_on)));
        let rreg = pc.interp(t_on);
        let (sigma, inside) = if which < 5 {
            (side, z.norm() < 1.0)
        } else {
            (z.im.signum(), side > 0.0)
        };
        let v = pv + side * 0.5 * rreg + self.psi_parts(z, sigma, inside);
        self.bv_cache.lock().unwrap().insert(key, v);
        v
    }

    /// Phi1 boundary value on the real line from the analyticity (D1) side.
    fn phi1_line(&self, s: f64) -> C {
        if s > 1.0 {
            self.omega_bv(s, 4, -1.0)
        } else if s < -1.0 {
            self.omega_bv(s, 0, -1.0)
        } else if s > S_LO {
            self.omega_bv(s, 3, 1.0)
        } else if s > -S_LO {
            self.omega_bv(s, 2, 1.0)
        } else {
            self.omega_bv(s, 1, 1.0)
        }
    }

    /// Phi1 everywhere: Omega on D1, the reflection -Omega(-zeta) on the
    /// complement, boundary values by the declared D1 side on Gamma.
    pub fn phi1(&self, z: C) -> C {
        if z.im.abs() < 1e-15 {
            self.phi1_line(z.re)
        } else if (z.norm() - 1.0).abs() < 1e-12 {
            let th = z.arg().rem_euclid(2.0 * PI);
            let pidx = 5 + ((th / (0.5 * PI)) as usize).min(3);
            let side = if z.im > 0.0 { 1.0 } else { -1.0 };
            self.omega_bv(th, pidx, side)
        } else if (z.norm() < 1.0) == (z.im > 0.0) {
            self.omega(z)
        } else {
            -self.omega(-z)
        }
    }

    /// Domain-checked Phi1 via Omega (off-contour use).
    pub fn phi1_from_omega(&self, z: C) -> Result<C, SolverError> {
        if !in_d1(z) {
            return Err(SolverError::OutsideD1(z));
        }
        Ok(self.omega(z))
    }

    /// The product s (h/4)(zeta + 1/zeta) Phi3(zeta) by the direct relation.
    fn prod3_direct(&self, z: C, ph1: C) -> C {
        self.dt.eval_f(z) - (0.25 * I * self.wn.h()) * (z - 1.0 / z) * ph1
    }

    /// Same product via the zeta -> -1/zeta image of the relation.
    fn prod3_neginv(&self, z: C, ph1m: C) -> C {
        (0.25 * I * self.wn.h()) * (z - 1.0 / z) * ph1m - self.dt.eval_f(-1.0 / z)
    }

    fn prod3(&self, z: C) -> C {
        if z.re.abs() < 1e-15 {
            // imaginary axis, both signs: -z lies in D1
            self.prod3_neginv(z, self.omega(-z))
        } else if z.im.abs() < 1e-15 {
            if z.re > 0.0 {
                self.prod3_direct(z, self.phi1_line(z.re))
            } else {
                self.prod3_neginv(z, self.phi1_line(-z.re))
            }
        } else {
            let th = z.arg().rem_euclid(2.0 * PI);
            if th < 0.5 * PI {
                self.prod3_direct(z, self.omega_bv(th, 5, 1.0))
            } else if th < PI {
                self.prod3_neginv(z, self.omega_bv(th + PI, 8, -1.0))
            } else if th < 1.5 * PI {
                self.prod3_direct(z, self.omega_bv(th, 7, -1.0))
            } else {
                self.prod3_neginv(z, self.omega_bv(th - PI, 6, 1.0))
            }
        }
    }

    /// Phi3 reconstructed from the relation; excluded near the kernel zeros +-i.
    pub fn phi3_reconstruct(&self, z: C, delta: f64) -> Result<C, SolverError> {
        if (z - I).norm() < delta || (z + I).norm() < delta {
            return Err(SolverError::NearPole(z));
        }
        let denom = self.table.gr_phi3_sign * 0.25 * self.wn.h() * (z + 1.0 / z);
        Ok(self.prod3(z) / denom)
    }

    /// Jump function rho21 anywhere on or off the contour K.
    pub fn rho21(&self, z: C) -> C {
        (0.25 * I * self.wn.h()) * (z - 1.0 / z) * self.phi1(z)
            - 0.5 * I * self.dt.eval_u1(z)
            - 0.5 * self.u00
    }

    /// Jump function rho32.
    pub fn rho32(&self, z: C) -> C {
        self.prod3(z) - 0.5 * I * self.dt.eval_u2(z) + 0.5 * self.u00
    }

    /// Sampled regularized density on every Gamma piece: (label, nodes) with
    /// nodes (t, zeta, value).
    pub fn gamma_samples(&self) -> Vec<(String, Vec<(f64, C, C)>)> {
        let names = [
            "gamma_line_0",
            "gamma_line_1",
            "gamma_line_2",
            "gamma_line_3",
            "gamma_line_4",
            "gamma_C1",
            "gamma_C2",
            "gamma_C3",
            "gamma_C4",
        ];
        self.pieces
            .iter()
            .zip(names)
            .map(|(pc, name)| {
                let mut nodes = Vec::new();
                for (p, v) in pc.panels.iter().zip(&pc.vals) {
                    for j in 0..16 {
                        let t = p.node(j);
                        nodes.push((t, pc.map(t), v[j]));
                    }
                }
                (name.to_string(), nodes)
            })
            .collect()
    }

    /// Max deviation of the Plemelj jump of Omega across the line pieces from
    /// the full density, at `n` deterministic off-node points.
    pub fn plemelj_check(&self, n: usize) -> f64 {
        let mut worst = 0.0f64;
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            // keep away from the pole exclusions and the truncation edge
            let s = -5.5 + 11.0 * u;
            if (s.abs() - 1.0).abs() < 0.05 || s.abs() > 5.5 {
                continue;
            }
            let which = if s < -1.0 {
                0
            } else if s < -S_LO {
                1
            } else if s < S_LO {
                2
            } else if s < 1.0 {
                3
            } else {
                4
            };
            let jump = self.omega_bv(s, which, 1.0) - self.omega_bv(s, which, -1.0);
            let expect = self.gd.line(s) + self.gd.psi_line(s);
            worst = worst.max((jump - expect).norm());
        }
        worst
    }
}

/// Jump evaluator backed by a solver, with the upper-left arc closed by the
/// radiation condition.
pub struct SolverRho {
    pub solver: Arc<Solver>,
    pub hard_zero_c2: bool,
}

impl RhoEval for SolverRho {
    fn rho21(&self, z: C) -> C {
        self.solver.rho21(z)
    }
    fn rho32(&self, z: C) -> C {
        self.solver.rho32(z)
    }
    fn rho31(&self, z: C) -> C {
        if self.hard_zero_c2 && (z.norm() - 1.0).abs() < 1e-12 {
            let th = z.arg().rem_euclid(2.0 * PI);
            if (0.5 * PI..PI).contains(&th) {
                return C::new(0.0, 0.0);
            }
        }
        self.solver.rho21(z) + self.solver.rho32(z)
    }
    fn corner(&self) -> C {
        self.solver.u00
    }
}

// ---------------------------------------------------------------------------
// the contour K: fixed node sets, cached densities, and the field evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KMap {
    Real,
    NegReal,
    Imag,
    NegImag,
    Circle,
}

impl KMap {
    fn map(self, t: f64) -> C {
        match self {
            KMap::Real => C::new(t, 0.0),
            KMap::NegReal => C::new(-t, 0.0),
            KMap::Imag => C::new(0.0, t),
            KMap::NegImag => C::new(0.0, -t),
            KMap::Circle => C::from_polar(1.0, t),
        }
    }
    fn jac(self, t: f64) -> C {
        match self {
            KMap::Real => C::new(1.0, 0.0),
            KMap::NegReal => C::new(-1.0, 0.0),
            KMap::Imag => I,
            KMap::NegImag => -I,
            KMap::Circle => I * C::from_polar(1.0, t),
        }
    }
}

struct KPiece {
    label: &'static str,
    kind: KMap,
    nodes: Vec<(f64, f64)>,
    vals: Vec<C>,
}

/// Densities cached on the fixed K nodes, with the small-parameter anchors and
/// ray tail fits that complete the representation.
pub struct KSet {
    pieces: Vec<KPiece>,
    tn_segn: Vec<f64>,
    vn_segn: Vec<C>,
    tn_segni: Vec<f64>,
    vn_segni: Vec<C>,
    tail_rayr: Vec<C>,
    tail_rayi: Vec<C>,
    pub u00: C,
    wn: Wavenumber,
}

const RAYR_LIM: f64 = 5.5;
const RAYI_LIM: f64 = 40.0;

fn flat(pans: Vec<Panel>) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(pans.len() * 16);
    for p in pans {
        for j in 0..16 {
            out.push((p.node(j), p.weight(j)));
        }
    }
    out
}

/// Chebyshev nodes in sqrt(t) over [lo, hi].
fn chebnodes_sqrt(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (rl, rh) = (lo.sqrt(), hi.sqrt());
    (0..n)
        .map(|j| {
            let x = (PI * (j as f64 + 0.5) / n as f64).cos();
            let r = 0.5 * (rl + rh) + 0.5 * (rh - rl) * x;
            r * r
        })
        .collect()
}

impl KSet {
    pub fn build(rho: &dyn RhoEval, wn: Wavenumber) -> Result<Self, SolverError> {
        let specs: Vec<(&'static str, KMap, Vec<Panel>)> = vec![
            ("ray_r", KMap::Real, panels(1.0, RAYR_LIM, 12, Grading::TowardA(0.6))),
            ("seg_n", KMap::NegReal, {
                let mut p = panels(T_BR_SEG_N, 0.5, 6, Grading::TowardA(0.7));
                p.extend(panels(0.5, 0.99975, 10, Grading::TowardB(0.5)));
                p
            }),
            ("ray_i", KMap::Imag, panels(1.0, RAYI_LIM, 16, Grading::TowardA(0.6))),
            ("seg_ni", KMap::NegImag, {
                let mut p = panels(T_BR_SEG_NI, 0.5, 5, Grading::TowardA(0.7));
                p.extend(panels(0.5, 0.99975, 10, Grading::TowardB(0.5)));
                p
            }),
            ("C1", KMap::Circle, panels(0.002, 0.5 * PI, 9, Grading::TowardA(0.5))),
            ("C3", KMap::Circle, panels(PI + 0.002, 1.5 * PI, 9, Grading::TowardA(0.5))),
            ("C4", KMap::Circle, panels(1.5 * PI, 2.0 * PI - 0.002, 8, Grading::TowardB(0.5))),
            ("C2", KMap::Circle, panels(0.5 * PI, PI - 0.002, 8, Grading::TowardB(0.5))),
        ];
        let mut pieces = Vec::with_capacity(specs.len());
        for (label, kind, pans) in specs {
            let nodes = flat(pans);
            let mut vals = Vec::with_capacity(nodes.len());
            for &(t, _) in &nodes {
                let z = kind.map(t);
                let v = match label {
                    "ray_r" | "seg_n" => rho.rho21(z),
                    "ray_i" | "seg_ni" | "C1" | "C3" => rho.rho32(z),
                    _ => rho.rho31(z),
                };
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(SolverError::BadDensity(t, label.to_string()));
                }
                vals.push(v);
            }
            pieces.push(KPiece { label, kind, nodes, vals });
        }

        // small-t anchors on the negative real segment (direct assembly holds
        // all the way down)
        let tn_segn = chebnodes_sqrt(4e-4, T_BR_SEG_N, 14);
        let vn_segn: Vec<C> = tn_segn.iter().map(|&t| rho.rho21(C::new(-t, 0.0))).collect();

        // the negative imaginary segment needs a model below ~0.055: anchor at
        // the known t->0 limit (the corner value) and fit the quadratic part
        let tn_segni = chebnodes_sqrt(4e-4, T_BR_SEG_NI, 14);
        let v0 = rho.corner();
        let tf = [0.06, 0.08, 0.10, 0.12, 0.14, 0.16];
        let rows: Vec<Vec<C>> = tf.iter().map(|&t| vec![C::new(t, 0.0), C::new(t * t, 0.0)]).collect();
        let rhs: Vec<C> = tf.iter().map(|&t| rho.rho32(C::new(0.0, -t)) - v0).collect();
        let cseg = lstsq(&rows, &rhs);
        let vn_segni: Vec<C> = tn_segni
            .iter()
            .map(|&t| {
                if t >= 0.055 {
                    rho.rho32(C::new(0.0, -t))
                } else {
                    v0 + cseg[0] * t + cseg[1] * t * t
                }
            })
            .collect();

        // outer ray tails: rho * t ~ d0 + d1/t + d2/t^2
        let mut tails = Vec::new();
        for (pidx, lim) in [(0usize, RAYR_LIM), (2usize, RAYI_LIM)] {
            let pc = &pieces[pidx];
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for (k, &(t, _)) in pc.nodes.iter().enumerate() {
                if t > 0.62 * lim && t < 0.96 * lim {
                    rows.push(vec![C::new(1.0, 0.0), C::new(1.0 / t, 0.0), C::new(1.0 / (t * t), 0.0)]);
                    rhs.push(pc.vals[k] * t);
                }
            }
            tails.push(lstsq(&rows, &rhs));
        }
        let tail_rayi = tails.pop().unwrap();
        let tail_rayr = tails.pop().unwrap();

        Ok(KSet {
            pieces,
            tn_segn,
            vn_segn,
            tn_segni,
            vn_segni,
            tail_rayr,
            tail_rayi,
            u00: rho.corner(),
            wn,
        })
    }

    /// Barycentric interpolation (in sqrt t) of the small-parameter anchors.
    fn interp_small(&self, segn: bool, t: f64) -> C {
        let (tn, vn) = if segn { (&self.tn_segn, &self.vn_segn) } else { (&self.tn_segni, &self.vn_segni) };
        let n = tn.len();
        let x = t.sqrt();
        let mut num = C::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..n {
            let d = x - tn[j].sqrt();
            if d.abs() < 1e-14 {
                return vn[j];
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * (PI * (j as f64 + 0.5) / n as f64).sin() / d;
            num += w * vn[j];
            den += w;
        }
        num / den
    }

    /// Sampled jump densities on every K piece: (label, nodes) with nodes
    /// (t, zeta, value).
    pub fn k_samples(&self) -> Vec<(String, Vec<(f64, C, C)>)> {
        self.pieces
            .iter()
            .map(|pc| {
                let nodes = pc
                    .nodes
                    .iter()
                    .zip(&pc.vals)
                    .map(|(&(t, _), &v)| (t, pc.kind.map(t), v))
                    .collect();
                (pc.label.to_string(), nodes)
            })
            .collect()
    }

    /// Cached density value at a fixed node (by piece label and node index).
    pub fn node_value(&self, label: &str, idx: usize) -> Option<(f64, C)> {
        let pc = self.pieces.iter().find(|p| p.label == label)?;
        Some((pc.nodes.get(idx)?.0, *pc.vals.get(idx)?))
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.pieces.iter().map(|p| p.label).collect()
    }
}

/// Phase exponent of the representation: E = (ih/2)(z + 1/z) * height - (h/2)(z - 1/z) * width.
pub fn phase_e(wn: Wavenumber, zeta: C, x: f64, z: f64) -> C {
    let h = wn.h();
    (0.5 * I * h) * (zeta + 1.0 / zeta) * z - (0.5 * h) * (zeta - 1.0 / zeta) * x
}

/// Per-piece contributions (without orientation signs, before the 1/(2 pi i)
/// normalization is applied they are summed with the table's signs) of the
/// K-contour integral with an arbitrary Cauchy-type kernel.
fn contour_pieces(ks: &KSet, x: f64, z: f64, kern: &dyn Fn(C) -> C) -> Vec<(&'static str, C)> {
    let ef = |zeta: C| phase_e(ks.wn, zeta, x, z).exp();
    contour_nodes(ks, x, z, kern)
        .into_iter()
        .map(|(label, nodes)| (label, nodes.into_iter().map(|(zeta, c)| c * ef(zeta)).sum()))
        .collect()
}

/// The quadrature nodes and phase-free coefficients of the K-contour integral,
/// with the adaptive layout (tau zones, tail panels) anchored at (x, z). Each
/// entry contributes `coef * exp(E(zeta, x', z'))` to the integral at (x', z').
fn contour_nodes(ks: &KSet, x: f64, z: f64, kern: &dyn Fn(C) -> C) -> Vec<(&'static str, Vec<(C, C)>)> {
    let wn = ks.wn;
    let (h0, eps) = (wn.h0, wn.eps);
    let norm = 2.0 * PI * I;
    let mut out = Vec::with_capacity(ks.pieces.len());
    for pc in &ks.pieces {
        let mut nodes: Vec<(C, C)> = Vec::new();
        for (k, &(t, w)) in pc.nodes.iter().enumerate() {
            let zeta = pc.kind.map(t);
            nodes.push((zeta, w * pc.vals[k] * pc.kind.jac(t) * kern(zeta)));
        }
        // small-parameter zone of the segments, integrated in tau = 1/t
        if pc.label == "seg_n" || pc.label == "seg_ni" {
            let segn = pc.label == "seg_n";
            let (t_hi, delta, prate) = if segn {
                (T_BR_SEG_N, 0.5 * h0 * (x - eps * z), 0.5 * h0 * C::new(x, z).norm())
            } else {
                (T_BR_SEG_NI, 0.5 * h0 * (z - eps * x), 0.5 * h0 * C::new(z, x).norm())
            };
            let tau0 = 1.0 / t_hi;
            let tau_max = tau0 + 80.0 / delta.max(0.02);
            let dtau = (12.0 / prate.max(0.1)).max(1.0);
            let ntau = ((tau_max - tau0) / dtau).ceil() as usize;
            for i in 0..ntau {
                let e0 = tau0 + i as f64 * dtau;
                let e1 = (tau0 + (i + 1) as f64 * dtau).min(tau_max);
                let mm = 0.5 * (e0 + e1);
                let rr = 0.5 * (e1 - e0);
                for j in 0..16 {
                    let tau = mm + rr * GL_NODES[j];
                    let t = 1.0 / tau;
                    let rho = ks.interp_small(segn, t);
                    let zeta = pc.kind.map(t);
                    nodes.push((
                        zeta,
                        rr * GL_WEIGHTS[j] / (tau * tau) * rho * pc.kind.jac(t) * kern(zeta),
                    ));
                }
            }
        }
        // fitted outer tail of the rays
        if pc.label == "ray_r" || pc.label == "ray_i" {
            let rayr = pc.label == "ray_r";
            let (lim, delta, d) = if rayr {
                (RAYR_LIM, 0.5 * h0 * (x + eps * z), &ks.tail_rayr)
            } else {
                (RAYI_LIM, 0.5 * h0 * (z - eps * x), &ks.tail_rayi)
            };
            let smax = lim + 80.0 / delta.max(1e-6);
            for p in panels(lim, smax, 24, Grading::TowardA(0.8)) {
                for j in 0..16 {
                    let t = p.node(j);
                    let zeta = pc.kind.map(t);
                    let mv = (d[0] + d[1] / t + d[2] / (t * t)) / t;
                    nodes.push((zeta, p.weight(j) * mv * pc.kind.jac(t) * kern(zeta)));
                }
            }
        }
        for n in nodes.iter_mut() {
            n.1 /= norm;
        }
        out.push((pc.label, nodes));
    }
    out
}

fn wedge_check(wn: Wavenumber, x: f64, z: f64) -> Result<(), SolverError> {
    if !(x > 0.0 && z > 0.0 && x > wn.eps * z && z > wn.eps * x) {
        return Err(SolverError::OutsideWedge(x, z));
    }
    Ok(())
}

/// Per-piece contributions to u(x, z), without orientation signs applied.
pub fn u_field_pieces(ks: &KSet, x: f64, z: f64) -> Result<Vec<(&'static str, C)>, SolverError> {
    wedge_check(ks.wn, x, z)?;
    Ok(contour_pieces(ks, x, z, &|zeta| 1.0 / zeta))
}

/// u(x, z) with the quadrature layout frozen at an anchor point. The result
/// is a finite superposition of exact plane-wave modes exp(E(zeta, x, z)), so
/// finite-difference stencils applied to it see only their own truncation
/// error, not layout jitter from the adaptive zones following (x, z).
pub struct FrozenField {
    wn: Wavenumber,
    terms: Vec<(C, C)>,
}

impl FrozenField {
    pub fn new(ks: &KSet, table: &ConventionTable, x: f64, z: f64) -> Result<Self, SolverError> {
        wedge_check(ks.wn, x, z)?;
        let mut terms = Vec::new();
        for (label, nodes) in contour_nodes(ks, x, z, &|zeta| 1.0 / zeta) {
            let sgn = table.piece_sign(label);
            terms.extend(nodes.into_iter().map(|(zeta, c)| (zeta, sgn * c)));
        }
        Ok(FrozenField { wn: ks.wn, terms })
    }

    pub fn eval(&self, x: f64, z: f64) -> C {
        self.terms
            .iter()
            .map(|&(zeta, c)| c * phase_e(self.wn, zeta, x, z).exp())
            .sum()
    }
}

/// The solution u(x, z) from the cached contour densities.
pub fn u_field(ks: &KSet, table: &ConventionTable, x: f64, z: f64) -> Result<C, SolverError> {
    let parts = u_field_pieces(ks, x, z)?;
    Ok(parts.iter().map(|(label, v)| table.piece_sign(label) * v).sum())
}

/// The sectional eigenfunction at spectral point `zeta` (off K) via the same
/// contour integral with the shifted Cauchy kernel. As zeta -> 0 this tends
/// to u(x, z); in each sector of the zeta-plane cut by K it reproduces the
/// eigenfunction analytic there.
pub fn phi_representation(
    ks: &KSet,
    table: &ConventionTable,
    zeta: C,
    x: f64,
    z: f64,
) -> Result<C, SolverError> {
    wedge_check(ks.wn, x, z)?;
    let parts = contour_pieces(ks, x, z, &|zp| 1.0 / (zp - zeta));
    Ok(parts.iter().map(|(label, v)| table.piece_sign(label) * v).sum())
}

// ---------------------------------------------------------------------------
// sign audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AuditOutcome {
    pub table: ConventionTable,
    pub best: f64,
    pub runner_up: f64,
}

/// Exhaustive audit of the six flagged conventions (the F sign, the Phi3-term
/// sign, the interval pairing, and the seg_n / C3 / C4 orientations; the
/// remaining orientations are pinned by the printed parameterizations).
/// Inputs are an oracle: boundary data, the two solution traces, and the
/// reference field for the reconstruction probes.
pub fn sign_audit(
    data: &BoundaryData,
    gamma_z: Arc<dyn Fn(f64) -> C + Send + Sync>,
    gamma_x: Arc<dyn Fn(f64) -> C + Send + Sync>,
    u_ref: &dyn Fn(f64, f64) -> C,
    u00: C,
    wn: Wavenumber,
) -> Result<AuditOutcome, SolverError> {
    let h = wn.h();
    let tt = Arc::new(TraceTransforms::new(gamma_z, gamma_x, wn, data.support));
    let dt = Arc::new(DataTransforms::new(data, wn, 1.0));

    // --- component 1: relation residuals, per (f_u1, phi3 sign) -------------
    let direct_pts = [C::from_polar(0.5, 0.6), C::new(0.25, 0.55), C::new(-1.8, -1.2)];
    let neginv_pts = [C::from_polar(0.5, -0.8), C::new(-1.5, 1.9)];
    let mut scale_f = 0.0f64;
    for &zt in direct_pts.iter().chain(&neginv_pts) {
        scale_f = scale_f.max(dt.eval_u1(zt).norm()).max(dt.eval_u2(zt).norm());
    }
    scale_f *= 0.5;
    let fsig = |s1: f64, zt: C| 0.5 * I * (dt.eval_u2(zt) + s1 * dt.eval_u1(zt));
    let mut r1 = HashMap::new();
    for s1 in [1.0, -1.0] {
        for s3 in [1.0, -1.0] {
            let mut acc = 0.0;
            for &zt in &direct_pts {
                let res = (0.25 * I * h) * (zt - 1.0 / zt) * tt.phi1.eval(zt)
                    + s3 * (0.25 * h) * (zt + 1.0 / zt) * tt.phi3.eval(zt)
                    - fsig(s1, zt);
                acc += res.norm();
            }
            for &zt in &neginv_pts {
                let res = (0.25 * I * h) * (zt - 1.0 / zt) * tt.phi1.eval(-zt)
                    - s3 * (0.25 * h) * (zt + 1.0 / zt) * tt.phi3.eval(zt)
                    - fsig(s1, -1.0 / zt);
                acc += res.norm();
            }
            r1.insert((s1 as i8, s3 as i8), if scale_f > 0.0 { acc / scale_f } else { acc });
        }
    }

    // --- component 2: Omega vs the trace transform, per (f_u1, pairing) -----
    let d1_pts = [C::new(0.3, 0.5), C::new(-0.2, 0.6), C::new(1.5, -1.2)];
    let mut scale_p = 0.0f64;
    for &zt in &d1_pts {
        scale_p = scale_p.max(tt.phi1.eval(zt).norm());
    }
    let mut r2 = HashMap::new();
    for s1 in [1.0, -1.0] {
        for pair in [1.0, -1.0] {
            let mut cand = ConventionTable::default();
            cand.f_u1_sign = s1;
            cand.interval_pairing = pair;
            let sv = Solver::new(data, wn, cand)?;
            let mut acc = 0.0;
            for &zt in &d1_pts {
                acc += (sv.omega(zt) - tt.phi1.eval(zt)).norm();
            }
            r2.insert((s1 as i8, pair as i8), if scale_p > 0.0 { acc / scale_p } else { acc });
        }
    }

    // --- component 3: reconstruction from oracle densities, per phi3 sign
    //     and orientation bits ------------------------------------------------
    let probes = [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)];
    let mut parts3 = HashMap::new();
    for s3 in [1.0, -1.0] {
        let orho = OracleRho { dt: dt.clone(), tt: tt.clone(), u00, phi3_sign: s3 };
        let ks = KSet::build(&orho, wn)?;
        let per_probe: Vec<Vec<(&'static str, C)>> = probes
            .iter()
            .map(|&(x, z)| u_field_pieces(&ks, x, z))
            .collect::<Result<_, _>>()?;
        parts3.insert(s3 as i8, per_probe);
    }

    // --- combine over the 64 candidates -------------------------------------
    let mut scored: Vec<(f64, [i8; 6])> = Vec::with_capacity(64);
    for s1 in [1i8, -1] {
        for s3 in [1i8, -1] {
            for pair in [1i8, -1] {
                for ksegn in [1i8, -1] {
                    for kc3 in [1i8, -1] {
                        for kc4 in [1i8, -1] {
                            let mut obj = r1[&(s1, s3)] + r2[&(s1, pair)];
                            let per_probe = &parts3[&s3];
                            for (pi, &(x, z)) in probes.iter().enumerate() {
                                let mut u = C::new(0.0, 0.0);
                                for &(label, v) in &per_probe[pi] {
                                    let sg = match label {
                                        "seg_n" => ksegn as f64,
                                        "C3" => kc3 as f64,
                                        "C4" => kc4 as f64,
                                        _ => 1.0,
                                    };
                                    u += sg * v;
                                }
                                let uo = u_ref(x, z);
                                let sc = uo.norm();
                                obj += if sc > 0.0 { (u - uo).norm() / sc } else { (u - uo).norm() };
                            }
                            scored.push((obj, [s1, s3, pair, ksegn, kc3, kc4]));
                        }
                    }
                }
            }
        }
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (best, bits) = scored[0];
    let runner_up = scored[1].0;
    if !(runner_up > 10.0 * best) {
        return Err(SolverError::AuditAmbiguous(best, runner_up));
    }
    let mut table = ConventionTable::default();
    table.f_u1_sign = bits[0] as f64;
    table.gr_phi3_sign = bits[1] as f64;
    table.interval_pairing = bits[2] as f64;
    table.k_seg_n = bits[3] as f64;
    table.k_c3 = bits[4] as f64;
    table.k_c4 = bits[5] as f64;
    Ok(AuditOutcome { table, best, runner_up })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_degenerates() {
        let wn = Wavenumber::new(1.0, 0.2).unwrap();
        let zero = BoundaryData {
            u1: Arc::new(|_| C::new(0.0, 0.0)),
            u2: Arc::new(|_| C::new(0.0, 0.0)),
            support: 60.0,
        };
        let sv = Solver::new(&zero, wn, ConventionTable::default()).unwrap();
        assert_eq!(sv.ca, C::new(0.0, 0.0));
        for &z in &[C::new(0.3, 0.4), C::new(-2.0, 1.0), C::new(0.0, -15.0)] {
            assert!(sv.omega(z).norm() < 1e-12);
        }
        assert!(sv.u00.norm() < 1e-12);
        // audit on zero data must report ambiguity
        let out = sign_audit(
            &zero,
            Arc::new(|_| C::new(0.0, 0.0)),
            Arc::new(|_| C::new(0.0, 0.0)),
            &|_, _| C::new(0.0, 0.0),
            C::new(0.0, 0.0),
            wn,
        );
        assert!(matches!(out, Err(SolverError::AuditAmbiguous(_, _))));
    }

    #[test]
    fn wedge_guard() {
        let wn = Wavenumber::new(1.0, 0.2).unwrap();
        assert!(wedge_check(wn, 1.0, 1.0).is_ok());
        assert!(wedge_check(wn, 0.1, 1.0).is_err());
        assert!(wedge_check(wn, 1.0, -0.5).is_err());
    }

    #[test]
    fn kset_node_layout() {
        struct Zero;
        impl RhoEval for Zero {
            fn rho21(&self, _: C) -> C {
                C::new(0.0, 0.0)
            }
            fn rho32(&self, _: C) -> C {
                C::new(0.0, 0.0)
            }
            fn corner(&self) -> C {
                C::new(0.0, 0.0)
            }
        }
        let wn = Wavenumber::new(1.0, 0.2).unwrap();
        let ks = KSet::build(&Zero, wn).unwrap();
        assert_eq!(
            ks.labels(),
            vec!["ray_r", "seg_n", "ray_i", "seg_ni", "C1", "C3", "C4", "C2"]
        );
        let (t0, v0) = ks.node_value("ray_r", 0).unwrap();
        assert!(t0 > 1.0 && t0 < 1.5 && v0.norm() == 0.0);
        let u = u_field(&ks, &ConventionTable::default(), 1.0, 1.0).unwrap();
        assert_eq!(u, C::new(0.0, 0.0));
    }
}
