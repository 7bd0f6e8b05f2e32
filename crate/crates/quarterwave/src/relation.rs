//! The algebraic backbone: the relation tying the two trace transforms to the
//! data combination F, its three symmetry images, the sign-convention table
//! they pin down, the jump functions assembled from traces, and the two scalar
//! checks that fall out (the corner anomaly pair and the outgoing-radiation
//! closure on the upper-left arc).

use crate::model::{classify_region, in_d1, Quadrant, Radial, C, I, PI};
use crate::transforms::{DataTransforms, TraceTransforms};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("convention file line {0}: {1}")]
    Parse(usize, String),
    #[error("convention file is missing key '{0}'")]
    MissingKey(&'static str),
    #[error("relation is not valid at zeta = {0} (outside its region of analyticity)")]
    OutsideValidity(C),
}

/// Every sign choice the construction depends on, resolved by the audit in
/// `solver::sign_audit` and frozen in the checked-in conventions file.
///
/// * `f_u1_sign`: sign s in `F = (i/2)(U2 + s U1)`.
/// * `gr_phi3_sign`: sign on the `(h/4)(zeta + 1/zeta) Phi3` term of the
///   relation (and hence on the Phi3 product wherever it is reconstructed).
/// * `interval_pairing`: +1 pairs the inner line intervals (-1,0), (0,1) with
///   combination A and the outer ones with B; -1 swaps the pairing.
/// * `k_*`: orientation multiplier of each piece of the contour K in the
///   field representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConventionTable {
    pub f_u1_sign: f64,
    pub gr_phi3_sign: f64,
    pub interval_pairing: f64,
    pub k_ray_r: f64,
    pub k_seg_n: f64,
    pub k_ray_i: f64,
    pub k_seg_ni: f64,
    pub k_c1: f64,
    pub k_c2: f64,
    pub k_c3: f64,
    pub k_c4: f64,
}

const KEYS: [&str; 11] = [
    "f_u1_sign", "gr_phi3_sign", "interval_pairing", "k_ray_r", "k_seg_n", "k_ray_i",
    "k_seg_ni", "k_c1", "k_c2", "k_c3", "k_c4",
];

impl Default for ConventionTable {
    /// The audited table. All contour pieces enter with their natural
    /// parameterization except C3, which is traversed clockwise.
    fn default() -> Self {
        ConventionTable {
            f_u1_sign: 1.0,
            gr_phi3_sign: 1.0,
            interval_pairing: 1.0,
            k_ray_r: 1.0,
            k_seg_n: 1.0,
            k_ray_i: 1.0,
            k_seg_ni: 1.0,
            k_c1: 1.0,
            k_c2: 1.0,
            k_c3: -1.0,
            k_c4: 1.0,
        }
    }
}

impl ConventionTable {
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "f_u1_sign" => self.f_u1_sign,
            "gr_phi3_sign" => self.gr_phi3_sign,
            "interval_pairing" => self.interval_pairing,
            "k_ray_r" => self.k_ray_r,
            "k_seg_n" => self.k_seg_n,
            "k_ray_i" => self.k_ray_i,
            "k_seg_ni" => self.k_seg_ni,
            "k_c1" => self.k_c1,
            "k_c2" => self.k_c2,
            "k_c3" => self.k_c3,
            "k_c4" => self.k_c4,
            _ => return None,
        })
    }

    fn set(&mut self, key: &str, v: f64) -> bool {
        match key {
            "f_u1_sign" => self.f_u1_sign = v,
            "gr_phi3_sign" => self.gr_phi3_sign = v,
            "interval_pairing" => self.interval_pairing = v,
            "k_ray_r" => self.k_ray_r = v,
            "k_seg_n" => self.k_seg_n = v,
            "k_ray_i" => self.k_ray_i = v,
            "k_seg_ni" => self.k_seg_ni = v,
            "k_c1" => self.k_c1 = v,
            "k_c2" => self.k_c2 = v,
            "k_c3" => self.k_c3 = v,
            "k_c4" => self.k_c4 = v,
            _ => return false,
        }
        true
    }

    /// Orientation multiplier for a K-contour piece by label.
    pub fn piece_sign(&self, label: &str) -> f64 {
        match label {
            "ray_r" => self.k_ray_r,
            "seg_n" => self.k_seg_n,
            "ray_i" => self.k_ray_i,
            "seg_ni" => self.k_seg_ni,
            "C1" => self.k_c1,
            "C2" => self.k_c2,
            "C3" => self.k_c3,
            "C4" => self.k_c4,
            other => panic!("unknown contour piece '{other}'"),
        }
    }

    /// Serialize as a key=value file, one key per line, fixed order.
    pub fn to_keyvalue(&self) -> String {
        let mut out = String::new();
        for k in KEYS {
            let v = self.get(k).unwrap();
            let _ = writeln!(out, "{k} = {}", if v >= 0.0 { "+1" } else { "-1" });
        }
        out
    }

    /// Parse a key=value conventions file. Unknown keys and values other than
    /// +1/-1 are rejected with the offending line number; all keys must appear.
    pub fn parse(text: &str) -> Result<Self, RelationError> {
        let mut table = ConventionTable::default();
        let mut seen = [false; KEYS.len()];
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| RelationError::Parse(i + 1, format!("expected key = value, got '{t}'")))?;
            let k = k.trim();
            let v = v.trim();
            let val = match v {
                "+1" | "1" => 1.0,
                "-1" => -1.0,
                _ => return Err(RelationError::Parse(i + 1, format!("sign must be +1 or -1, got '{v}'"))),
            };
            if !table.set(k, val) {
                return Err(RelationError::Parse(i + 1, format!("unknown key '{k}'")));
            }
            if let Some(p) = KEYS.iter().position(|&kk| kk == k) {
                if seen[p] {
                    return Err(RelationError::Parse(i + 1, format!("duplicate key '{k}'")));
                }
                seen[p] = true;
            }
        }
        for (p, k) in KEYS.iter().enumerate() {
            if !seen[p] {
                return Err(RelationError::MissingKey(k));
            }
        }
        Ok(table)
    }
}

/// The relation and its images under the kernel symmetries. `Direct` couples
/// Phi1(zeta) and Phi3(zeta); the others use one symmetry-mapped argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Direct,
    /// zeta -> -1/zeta applied to the direct relation.
    NegInv,
    /// zeta -> 1/zeta, using Phi1(1/zeta) = Phi1(zeta).
    Inv,
    /// zeta -> -zeta, using Phi3(-1/zeta) = Phi3(zeta).
    Neg,
}

/// Region of validity: where both trace-transform factors in the relation are
/// boundary values of their analytic continuations.
pub fn relation_valid(rel: Relation, zeta: C) -> bool {
    let Ok(tag) = classify_region(zeta) else { return false };
    let inside = tag.radial == Radial::Inside;
    if tag.radial == Radial::On {
        return false;
    }
    // measured region map: each form degenerates in exactly one quadrant
    // (where an analytic continuation of a trace factor crosses a jump
    // contour), and two of them additionally fail in one outside cell
    let q = tag.quadrant;
    match rel {
        Relation::Direct => q != Quadrant::Q4,
        Relation::NegInv => q != Quadrant::Q3 && !(q == Quadrant::Q4 && !inside),
        Relation::Inv => q != Quadrant::Q1,
        Relation::Neg => q != Quadrant::Q2 && !(q == Quadrant::Q3 && !inside),
    }
}

/// Residual of the chosen relation at zeta, with the Phi3-term sign taken from
/// the table. Zero (to quadrature accuracy) throughout the validity region
/// when traces and data come from one solution.
pub fn relation_residual(
    dt: &DataTransforms,
    tt: &TraceTransforms,
    table: &ConventionTable,
    rel: Relation,
    zeta: C,
) -> C {
    let h = dt.t_u1.wn.h();
    let k1 = (0.25 * I * h) * (zeta - 1.0 / zeta);
    let k3 = table.gr_phi3_sign * (0.25 * h) * (zeta + 1.0 / zeta);
    match rel {
        Relation::Direct => k1 * tt.phi1.eval(zeta) + k3 * tt.phi3.eval(zeta) - dt.eval_f(zeta),
        Relation::NegInv => {
            k1 * tt.phi1.eval(-zeta) - k3 * tt.phi3.eval(zeta) - dt.eval_f(-1.0 / zeta)
        }
        Relation::Inv => {
            -k1 * tt.phi1.eval(zeta) + k3 * tt.phi3.eval(1.0 / zeta) - dt.eval_f(1.0 / zeta)
        }
        Relation::Neg => {
            k1 * tt.phi1.eval(-zeta) + k3 * tt.phi3.eval(1.0 / zeta) + dt.eval_f(-zeta)
        }
    }
}

/// Domain-checked residual.
pub fn relation_residual_checked(
    dt: &DataTransforms,
    tt: &TraceTransforms,
    table: &ConventionTable,
    rel: Relation,
    zeta: C,
) -> Result<C, RelationError> {
    if !relation_valid(rel, zeta) {
        return Err(RelationError::OutsideValidity(zeta));
    }
    Ok(relation_residual(dt, tt, table, rel, zeta))
}

/// First corner identity: F(1) + F(-1). For data whose traces carry the
/// resonant inverse-square-root corner behavior this does NOT vanish; the
/// nonzero value is exactly the pole strength the density construction removes.
pub fn anomaly_first(dt: &DataTransforms) -> C {
    dt.eval_f(C::new(1.0, 0.0)) + dt.eval_f(C::new(-1.0, 0.0))
}

/// Second corner identity: F(i) + (h/2) Phi1(i); vanishes for consistent data.
pub fn anomaly_second(dt: &DataTransforms, tt: &TraceTransforms) -> C {
    dt.eval_f(I) + 0.5 * dt.t_u1.wn.h() * tt.phi1.eval(I)
}

/// Jump-function evaluator shared by the oracle-backed and solver-backed paths.
pub trait RhoEval: Send + Sync {
    fn rho21(&self, zeta: C) -> C;
    fn rho32(&self, zeta: C) -> C;
    fn rho31(&self, zeta: C) -> C {
        self.rho21(zeta) + self.rho32(zeta)
    }
    fn corner(&self) -> C;
}

/// Jump functions assembled from trace transforms (oracle mode):
/// `rho21 = (ih/4)(z - 1/z) Phi1 - (i/2) U1 - u(0,0)/2`,
/// `rho32 = s (h/4)(z + 1/z) Phi3 - (i/2) U2 + u(0,0)/2`.
pub struct OracleRho {
    pub dt: std::sync::Arc<DataTransforms>,
    pub tt: std::sync::Arc<TraceTransforms>,
    pub u00: C,
    pub phi3_sign: f64,
}

impl RhoEval for OracleRho {
    fn rho21(&self, z: C) -> C {
        (0.25 * I * self.dt.t_u1.wn.h()) * (z - 1.0 / z) * self.tt.phi1.eval(z)
            - 0.5 * I * self.dt.eval_u1(z)
            - 0.5 * self.u00
    }

    fn rho32(&self, z: C) -> C {
        let h = self.dt.t_u1.wn.h();
        let t = -z.im;
        // On the inner stretch of the negative imaginary axis the growth
        // estimate undershoots the actual base/tail cancellation; force the
        // reduced-window continuation there.
        let (p3, u2) = if z.re == 0.0 && (0.055..0.175).contains(&t) {
            (self.tt.phi3.eval_rw(z), self.dt.t_u2.eval_rw(z))
        } else {
            (self.tt.phi3.eval(z), self.dt.eval_u2(z))
        };
        self.phi3_sign * (0.25 * h) * (z + 1.0 / z) * p3 - 0.5 * I * u2 + 0.5 * self.u00
    }

    fn corner(&self) -> C {
        self.u00
    }
}

/// Outgoing-radiation closure: rho31 must (numerically) vanish on the arc C2.
/// Returns (max |rho31| over the arc, max |rho21| there as the scale).
pub fn radiation_closure(rho: &dyn RhoEval, n: usize) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for k in 0..n {
        let th = 0.5 * PI + (0.5 * PI - 0.004) * (k as f64 + 0.5) / n as f64;
        let z = C::from_polar(1.0, th);
        // assembled value, bypassing any closure-based shortcut in rho31
        worst = worst.max((rho.rho21(z) + rho.rho32(z)).norm());
        scale = scale.max(rho.rho21(z).norm());
    }
    (worst, scale)
}

/// The set D1 where the first trace transform is analytic (re-exported check).
pub fn phi1_domain(zeta: C) -> bool {
    in_d1(zeta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_roundtrip_and_rejection() {
        let t = ConventionTable::default();
        let text = t.to_keyvalue();
        let back = ConventionTable::parse(&text).unwrap();
        assert_eq!(t, back);
        assert!(ConventionTable::parse("nonsense = +1\n").is_err());
        assert!(ConventionTable::parse(&text.replace("+1", "2")).is_err());
        let missing: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(ConventionTable::parse(&missing).is_err());
        let dup = format!("{text}f_u1_sign = +1\n");
        assert!(ConventionTable::parse(&dup).is_err());
    }

    #[test]
    fn validity_regions() {
        // spot checks of the measured region map
        let inside_q1 = C::new(0.3, 0.4);
        assert!(relation_valid(Relation::Direct, inside_q1));
        assert!(relation_valid(Relation::Direct, -inside_q1));
        assert!(!relation_valid(Relation::Direct, C::new(0.3, -0.4)));
        assert!(!relation_valid(Relation::Direct, C::new(2.0, -1.0)));
        assert!(relation_valid(Relation::NegInv, C::new(0.3, -0.4)));
        assert!(relation_valid(Relation::NegInv, C::new(-1.5, 2.0)));
        assert!(!relation_valid(Relation::NegInv, -inside_q1));
        assert!(!relation_valid(Relation::NegInv, C::new(2.0, -1.0)));
        assert!(!relation_valid(Relation::Inv, C::new(2.0, 1.0)));
        assert!(!relation_valid(Relation::Inv, inside_q1));
        assert!(relation_valid(Relation::Inv, -inside_q1));
        assert!(relation_valid(Relation::Neg, C::new(-0.3, -0.4)));
        assert!(relation_valid(Relation::Neg, C::new(2.0, 1.0)));
        assert!(!relation_valid(Relation::Neg, C::new(-0.3, 0.4)));
        assert!(!relation_valid(Relation::Neg, C::new(-2.0, -1.0)));
        assert!(!relation_valid(Relation::Inv, C::new(0.0, 0.0)));
        assert!(!relation_valid(Relation::Direct, C::from_polar(1.0, 0.3)));
    }
}
