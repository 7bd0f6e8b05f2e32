//! Domain vocabulary shared by every other module: wavenumber with limiting
//! absorption, spectral points and their region algebra, the symmetry maps of
//! the transform kernels, and the oriented contours K and Gamma.

use num_complex::Complex64;
use thiserror::Error;

pub type C = Complex64;

pub const I: C = C::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("spectral parameter must be nonzero (essential singularity at 0)")]
    ZeroSpectralPoint,
    #[error("configuration error: {0}")]
    Config(String),
}

/// Wavenumber with limiting absorption: the effective value `h = h0 (1 + i eps)`
/// is used everywhere the equation's `h` appears. `eps > 0` gives every
/// half-line integrand exponential decay; `eps = 0` is conditionally convergent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    pub h0: f64,
    pub eps: f64,
}

impl Wavenumber {
    pub fn new(h0: f64, eps: f64) -> Result<Self, ModelError> {
        if !(h0 > 0.0) {
            return Err(ModelError::Config(format!("h0 must be > 0, got {h0}")));
        }
        if !(eps >= 0.0) {
            return Err(ModelError::Config(format!("eps must be >= 0, got {eps}")));
        }
        Ok(Wavenumber { h0, eps })
    }

    /// Effective complex wavenumber `h0 (1 + i eps)`.
    pub fn h(&self) -> C {
        C::new(self.h0, self.h0 * self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Radial {
    Inside,
    On,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionTag {
    pub quadrant: Quadrant,
    pub radial: Radial,
}

const ON_CIRCLE_TOL: f64 = 1e-12;

/// Quadrant (by signs of Re/Im) and radial position relative to the unit circle.
/// Points on an axis are assigned to the quadrant their half-axis bounds
/// counterclockwise-first (positive real axis -> Q1, positive imaginary -> Q2, ...).
pub fn classify_region(zeta: C) -> Result<RegionTag, ModelError> {
    if zeta == C::new(0.0, 0.0) {
        return Err(ModelError::ZeroSpectralPoint);
    }
    let quadrant = if zeta.re > 0.0 && zeta.im >= 0.0 {
        Quadrant::Q1
    } else if zeta.re <= 0.0 && zeta.im > 0.0 {
        Quadrant::Q2
    } else if zeta.re < 0.0 {
        Quadrant::Q3
    } else {
        Quadrant::Q4
    };
    let r = zeta.norm();
    let radial = if (r - 1.0).abs() < ON_CIRCLE_TOL {
        Radial::On
    } else if r < 1.0 {
        Radial::Inside
    } else {
        Radial::Outside
    };
    Ok(RegionTag { quadrant, radial })
}

/// `zeta -> -zeta` (involution).
pub fn sym_neg(zeta: C) -> C {
    -zeta
}

/// `zeta -> 1/zeta` (involution away from 0).
pub fn sym_inv(zeta: C) -> Result<C, ModelError> {
    if zeta == C::new(0.0, 0.0) {
        return Err(ModelError::ZeroSpectralPoint);
    }
    Ok(1.0 / zeta)
}

/// `zeta -> -1/zeta` (involution away from 0; fixes +-i).
pub fn sym_neginv(zeta: C) -> Result<C, ModelError> {
    Ok(-sym_inv(zeta)?)
}

/// Membership in D1, the analyticity region of the first trace transform:
/// inside the unit circle with Im > 0, or outside with Im < 0.
pub fn in_d1(zeta: C) -> bool {
    (zeta.norm() < 1.0) == (zeta.im > 0.0) && zeta.im != 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    Ray,
    Segment,
    Arc,
    Interval,
}

/// How a piece's real parameter maps to the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PieceGeometry {
    /// t -> scale * t with scale in {1, -1, i, -i}.
    Axis { scale: C },
    /// t -> e^{it}.
    Circle,
}

impl PieceGeometry {
    pub fn map(&self, t: f64) -> C {
        match self {
            PieceGeometry::Axis { scale } => scale * t,
            PieceGeometry::Circle => C::new(0.0, t).exp(),
        }
    }
    /// d(zeta)/dt along the piece.
    pub fn jac(&self, t: f64) -> C {
        match self {
            PieceGeometry::Axis { scale } => *scale,
            PieceGeometry::Circle => I * C::new(0.0, t).exp(),
        }
    }
}

/// One oriented smooth piece of a contour, parameterized by t in (t0, t1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPiece {
    pub kind: PieceKind,
    pub label: &'static str,
    pub geometry: PieceGeometry,
    pub t0: f64,
    pub t1: f64,
    /// Traversal direction relative to increasing t: +1 forward, -1 reversed.
    pub orientation: i8,
}

impl ContourPiece {
    pub fn map(&self, t: f64) -> C {
        self.geometry.map(t)
    }
    pub fn jac(&self, t: f64) -> C {
        self.geometry.jac(t)
    }
}

#[derive(Debug, Clone)]
pub struct ContourSpec {
    pub pieces: Vec<ContourPiece>,
    pub lambda: f64,
}

/// Quadrature configuration: tolerances, panel budget, pole-exclusion radius
/// around {0, +-1, +-i}, and the truncation radius for unbounded pieces.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub tol: f64,
    pub max_panels: usize,
    pub nodes_per_panel: usize,
    pub delta: f64,
    pub lambda: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            tol: 1e-9,
            max_panels: 4096,
            nodes_per_panel: 16,
            delta: 2e-3,
            lambda: 6.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.delta > 0.0) || !(self.lambda > 1.0) || !(self.tol > 0.0) {
            return Err(ModelError::Config(format!(
                "need delta > 0, lambda > 1, tol > 0; got delta={}, lambda={}, tol={}",
                self.delta, self.lambda, self.tol
            )));
        }
        Ok(())
    }
}

pub const PI: f64 = std::f64::consts::PI;

/// The eight pieces of the oriented contour K carrying the field representation:
/// rays (1,inf) and (i, i*inf), segments (0,-1) and (0,-i), and the four
/// quarter-circle arcs C1..C4 (quadrants 1..4).
pub fn build_contour_k(spec: &QuadratureSpec) -> Result<ContourSpec, ModelError> {
    spec.validate()?;
    let one = PieceGeometry::Axis { scale: C::new(1.0, 0.0) };
    let neg = PieceGeometry::Axis { scale: C::new(-1.0, 0.0) };
    let im = PieceGeometry::Axis { scale: C::new(0.0, 1.0) };
    let negim = PieceGeometry::Axis { scale: C::new(0.0, -1.0) };
    let circ = PieceGeometry::Circle;
    let pieces = vec![
        ContourPiece { kind: PieceKind::Ray, label: "ray_r", geometry: one, t0: 1.0, t1: f64::INFINITY, orientation: 1 },
        ContourPiece { kind: PieceKind::Ray, label: "ray_i", geometry: im, t0: 1.0, t1: f64::INFINITY, orientation: 1 },
        ContourPiece { kind: PieceKind::Segment, label: "seg_n", geometry: neg, t0: 0.0, t1: 1.0, orientation: 1 },
        ContourPiece { kind: PieceKind::Segment, label: "seg_ni", geometry: negim, t0: 0.0, t1: 1.0, orientation: 1 },
        ContourPiece { kind: PieceKind::Arc, label: "C1", geometry: circ, t0: 0.0, t1: PI / 2.0, orientation: 1 },
        ContourPiece { kind: PieceKind::Arc, label: "C2", geometry: circ, t0: PI / 2.0, t1: PI, orientation: 1 },
        ContourPiece { kind: PieceKind::Arc, label: "C3", geometry: circ, t0: PI, t1: 1.5 * PI, orientation: 1 },
        ContourPiece { kind: PieceKind::Arc, label: "C4", geometry: circ, t0: 1.5 * PI, t1: 2.0 * PI, orientation: 1 },
    ];
    Ok(ContourSpec { pieces, lambda: spec.lambda })
}

/// The density contour Gamma: four real intervals I-IV covering
/// (-Lambda, Lambda) minus the pole exclusions at +-1, plus the arcs C1..C4.
/// Interval pairing: {I, III} = (0,1), (-1,0) carry combination A;
/// {II, IV} = (-inf,-1), (1,inf) carry combination B.
pub fn build_contour_gamma(spec: &QuadratureSpec) -> Result<ContourSpec, ModelError> {
    spec.validate()?;
    let one = PieceGeometry::Axis { scale: C::new(1.0, 0.0) };
    let circ = PieceGeometry::Circle;
    let d = spec.delta;
    let lam = spec.lambda;
    let pieces = vec![
        ContourPiece { kind: PieceKind::Interval, label: "IV", geometry: one, t0: -lam, t1: -1.0 - d, orientation: 1 },
        ContourPiece { kind: PieceKind::Interval, label: "III", geometry: one, t0: -1.0 + d, t1: -d, orientation: 1 },
        ContourPiece { kind: PieceKind::Interval, label: "I", geometry: one, t0: d, t1: 1.0 - d, orientation: 1 },
        ContourPiece { kind: PieceKind::Interval, label: "II", geometry: one, t0: 1.0 + d, t1: lam, orientation: 1 },
        ContourPiece { kind: PieceKind::Arc, label: "C1", geometry: circ, t0: 0.0, t1: PI / 2.0, orientation: 1 },
        ContourPiece { kind: PieceKind::Arc, label: "C2", geometry: circ, t0: PI / 2.0, t1: PI, orientation: 1 },
        ContourPiece { kind: PieceKind::Arc, label: "C3", geometry: circ, t0: PI, t1: 1.5 * PI, orientation: 1 },
        ContourPiece { kind: PieceKind::Arc, label: "C4", geometry: circ, t0: 1.5 * PI, t1: 2.0 * PI, orientation: 1 },
    ];
    Ok(ContourSpec { pieces, lambda: lam })
}

/// Boundary data for the Neumann problem: u1(z) = u_x on the edge x = 0,
/// u2(x) = u_z on the edge z = 0, treated as zero beyond the support bound L.
pub struct BoundaryData {
    pub u1: std::sync::Arc<dyn Fn(f64) -> C + Send + Sync>,
    pub u2: std::sync::Arc<dyn Fn(f64) -> C + Send + Sync>,
    pub support: f64,
}

pub struct ProblemSpec {
    pub wavenumber: Wavenumber,
    pub data: BoundaryData,
    pub grid: Vec<(f64, f64)>,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        for &(x, z) in &self.grid {
            if !(x > 0.0 && z > 0.0) {
                return Err(ModelError::Config(format!(
                    "evaluation points must be strictly interior, got ({x}, {z})"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_examples() {
        let t = classify_region(C::new(0.5, 0.5)).unwrap();
        assert_eq!(t, RegionTag { quadrant: Quadrant::Q1, radial: Radial::Inside });
        let t = classify_region(C::new(-2.0, -2.0)).unwrap();
        assert_eq!(t, RegionTag { quadrant: Quadrant::Q3, radial: Radial::Outside });
        let t = classify_region(C::from_polar(1.0, -PI / 4.0)).unwrap();
        assert_eq!(t, RegionTag { quadrant: Quadrant::Q4, radial: Radial::On });
        assert!(classify_region(C::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(sym_neginv(C::new(2.0, 0.0)).unwrap(), C::new(-0.5, 0.0));
        let fp = sym_neginv(I).unwrap();
        assert!((fp - I).norm() < 1e-15);
        assert_eq!(sym_inv(C::new(1.0, 0.0)).unwrap(), C::new(1.0, 0.0));
        assert!(sym_inv(C::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn symmetry_involutions() {
        let mut s = 1234u64;
        for _ in 0..100 {
            // small deterministic LCG sample
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((s >> 32) as f64 / 2f64.powi(32) - 0.5) * 4.0;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let im = ((s >> 32) as f64 / 2f64.powi(32) - 0.5) * 4.0;
            let z = C::new(re, im);
            if z.norm() < 1e-3 {
                continue;
            }
            assert!((sym_neg(sym_neg(z)) - z).norm() < 1e-15);
            assert!((sym_inv(sym_inv(z).unwrap()).unwrap() - z).norm() < 1e-12 * z.norm().max(1.0));
            assert!((sym_neginv(sym_neginv(z).unwrap()).unwrap() - z).norm() < 1e-12 * z.norm().max(1.0));
        }
    }

    #[test]
    fn contours_shape() {
        let spec = QuadratureSpec::default();
        let k = build_contour_k(&spec).unwrap();
        assert_eq!(k.pieces.len(), 8);
        let g = build_contour_gamma(&spec).unwrap();
        assert_eq!(g.pieces.len(), 8);
        // pole exclusions around +-1 on the line
        for p in &g.pieces {
            if p.kind == PieceKind::Interval {
                assert!((p.t0 - 1.0).abs() > spec.delta / 2.0 && (p.t1 - 1.0).abs() > spec.delta / 2.0);
            }
        }
        // arcs cover the full circle
        let total: f64 = g.pieces.iter().filter(|p| p.kind == PieceKind::Arc).map(|p| p.t1 - p.t0).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);
        // C4 parameterization: e^{i theta}, theta in (3pi/2, 2pi) == (-pi/2, 0)
        let c4 = g.pieces.iter().find(|p| p.label == "C4").unwrap();
        let mid = c4.map(0.5 * (c4.t0 + c4.t1));
        assert!(mid.re > 0.0 && mid.im < 0.0 && (mid.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wavenumber_absorption() {
        let w = Wavenumber::new(1.0, 0.2).unwrap();
        assert!((w.h() - C::new(1.0, 0.2)).norm() < 1e-15);
        assert!(Wavenumber::new(-1.0, 0.2).is_err());
        assert!(Wavenumber::new(1.0, -0.1).is_err());
    }
}
