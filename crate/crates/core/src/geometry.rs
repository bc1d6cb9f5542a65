//! The fat handle `D^{n,m} = {(u,v) : ||u|| >= 1 - phi(2 - ||u|| - ||v||)}`
//! and its distinguished subsets: membership, region classification, and
//! boundary solving.
//!
//! Region names follow the handle decomposition: the *flange* is the gluing
//! locus `{||u|| >= 1}`, its compact wall `{||u|| = 1, ||v|| <= 3/2}` is the
//! flange core, and the handle boundary is the zero set of the defect
//! `||u|| - 1 + phi(2 - ||u|| - ||v||)`.

use crate::kernels::KernelContext;
use thiserror::Error;

/// Absolute tolerance on the defect used for boundary detection.
pub const DEFECT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("handle spec requires n + m >= 1")]
    EmptySpec,
    #[error("point has dims ({pu}, {pv}) but spec is ({n}, {m})")]
    DimensionMismatch {
        pu: usize,
        pv: usize,
        n: usize,
        m: usize,
    },
    #[error("direction of dim {dim} is not a unit vector (norm {norm})")]
    NotAUnitDirection { dim: usize, norm: f64 },
    #[error("D^(n,0) has empty boundary; no boundary point exists for m = 0")]
    EmptyBoundary,
}

/// The pair (n, m) selecting the handle `D^{n,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HandleSpec {
    n: usize,
    m: usize,
}

impl HandleSpec {
    pub fn new(n: usize, m: usize) -> Result<Self, GeometryError> {
        if n + m == 0 {
            return Err(GeometryError::EmptySpec);
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// A point split as (u, v) with cached radii.
#[derive(Debug, Clone, PartialEq)]
pub struct HandlePoint {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    ru: f64,
    rv: f64,
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

impl HandlePoint {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        let ru = norm(&u);
        let rv = norm(&v);
        Self { u, v, ru, rv }
    }

    pub fn ru(&self) -> f64 {
        self.ru
    }

    pub fn rv(&self) -> f64 {
        self.rv
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.u.len(), self.v.len())
    }

    pub fn matches(&self, spec: &HandleSpec) -> bool {
        self.u.len() == spec.n && self.v.len() == spec.m
    }
}

/// Classification of a point relative to the handle decomposition.
///
/// `Flange` is the open part `||u|| > 1` of the gluing region, `FlangeCore`
/// the compact wall `||u|| = 1, ||v|| <= 3/2`, `BoundaryS` the rest of the
/// wall `||u|| = 1`, and `BoundaryD` the handle boundary. Wall tags take
/// precedence over `BoundaryD` where both apply (the two sets meet along
/// `||u|| = 1, ||v|| >= 3/2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionClass {
    InteriorOfHandle,
    Flange,
    FlangeCore,
    BoundaryD,
    BoundaryS,
    Outside,
}

fn check_dims(spec: &HandleSpec, p: &HandlePoint) -> Result<(), GeometryError> {
    if !p.matches(spec) {
        return Err(GeometryError::DimensionMismatch {
            pu: p.u.len(),
            pv: p.v.len(),
            n: spec.n,
            m: spec.m,
        });
    }
    Ok(())
}

/// Signed membership defect `||u|| - 1 + phi(2 - ||u|| - ||v||)`.
/// Nonnegative exactly on the handle; zero (within tolerance) on its
/// boundary. The degenerate factors get explicit branches: for `m = 0` the
/// handle is all of R^n (defect strictly positive), for `n = 0` it is the
/// unit disk `||v|| <= 1`.
pub fn defect(ctx: &KernelContext, spec: &HandleSpec, p: &HandlePoint) -> Result<f64, GeometryError> {
    check_dims(spec, p)?;
    if spec.m == 0 {
        // D^{n,0} = R^n; the formula below is still the correct defect and
        // is strictly positive for every u.
        return Ok(p.ru - 1.0 + ctx.phi(2.0 - p.ru));
    }
    if spec.n == 0 {
        // ||u|| over R^0 is 0: membership reduces to phi(2 - ||v||) >= 1,
        // i.e. ||v|| <= 1.
        return Ok(ctx.phi(2.0 - p.rv) - 1.0);
    }
    Ok(p.ru - 1.0 + ctx.phi(2.0 - p.ru - p.rv))
}

/// Membership in the closed handle at the standard tolerance.
pub fn is_member(ctx: &KernelContext, spec: &HandleSpec, p: &HandlePoint) -> Result<bool, GeometryError> {
    Ok(defect(ctx, spec, p)? >= -DEFECT_TOL)
}

/// Classify a point; exactly one tag applies. Boundary tags win at
/// equalities within `tol`, and the flange wall wins over the handle
/// boundary where the two coincide.
pub fn classify(
    ctx: &KernelContext,
    spec: &HandleSpec,
    p: &HandlePoint,
    tol: f64,
) -> Result<RegionClass, GeometryError> {
    let d = defect(ctx, spec, p)?;
    if d < -tol {
        return Ok(RegionClass::Outside);
    }
    // the flange requires a u-factor; S^{-1} is empty
    if spec.n > 0 {
        if (p.ru - 1.0).abs() <= tol {
            if p.rv <= 1.5 + tol {
                return Ok(RegionClass::FlangeCore);
            }
            return Ok(RegionClass::BoundaryS);
        }
        if p.ru > 1.0 + tol {
            return Ok(RegionClass::Flange);
        }
    }
    if d.abs() <= tol {
        return Ok(RegionClass::BoundaryD);
    }
    Ok(RegionClass::InteriorOfHandle)
}

/// Solve the boundary equation along fixed directions: the boundary point at
/// parameter `t = ||u|| + ||v|| - 2` has radii `(1 - phi(-t), 1 + phi(t))`.
///
/// The radius formula only describes points for `t >= -1` (at `t = -1` the
/// curve meets the v-axis at radii (0, 1)); smaller `t` is clamped there, so
/// images satisfy the defining equation for any finite input.
pub fn boundary_point(
    ctx: &KernelContext,
    spec: &HandleSpec,
    t: f64,
    du: &[f64],
    dv: &[f64],
) -> Result<HandlePoint, GeometryError> {
    if spec.m == 0 {
        return Err(GeometryError::EmptyBoundary);
    }
    if du.len() != spec.n || dv.len() != spec.m {
        return Err(GeometryError::DimensionMismatch {
            pu: du.len(),
            pv: dv.len(),
            n: spec.n,
            m: spec.m,
        });
    }
    for (dir, dim) in [(du, spec.n), (dv, spec.m)] {
        if dim > 0 {
            let nn = norm(dir);
            if (nn - 1.0).abs() > 1e-9 {
                return Err(GeometryError::NotAUnitDirection { dim, norm: nn });
            }
        }
    }
    let t = t.max(-1.0);
    let ru = 1.0 - ctx.phi(-t);
    let rv = 1.0 + ctx.phi(t);
    let u = du.iter().map(|c| c * ru).collect();
    let v = dv.iter().map(|c| c * rv).collect();
    Ok(HandlePoint::new(u, v))
}

/// Which half of `S^{n-1} x R^m  ⊂  D^{n,m}  ⊃  R^n x D^m` certifies
/// membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InclusionSide {
    /// `||u|| >= 1`
    FlangeCylinder,
    /// `||v|| <= 1`
    DiskCylinder,
}

#[derive(Debug, Clone)]
pub struct InclusionReport {
    pub side: Option<InclusionSide>,
    pub defect: f64,
    pub member: bool,
}

/// Report which of the two standard inclusions applies to `p`, if any, and
/// the measured defect. When a side applies the defect is asserted
/// nonnegative within tolerance.
pub fn inclusion_witness(
    ctx: &KernelContext,
    spec: &HandleSpec,
    p: &HandlePoint,
) -> Result<InclusionReport, GeometryError> {
    let d = defect(ctx, spec, p)?;
    let side = if spec.n > 0 && p.ru >= 1.0 {
        Some(InclusionSide::FlangeCylinder)
    } else if p.rv <= 1.0 {
        Some(InclusionSide::DiskCylinder)
    } else {
        None
    };
    if side.is_some() {
        debug_assert!(d >= -DEFECT_TOL, "inclusion witness violated: defect {d}");
    }
    Ok(InclusionReport {
        side,
        defect: d,
        member: d >= -DEFECT_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> KernelContext {
        KernelContext::new().unwrap()
    }

    #[test]
    fn defect_examples() {
        let c = ctx();
        let s11 = HandleSpec::new(1, 1).unwrap();
        // (2, 0): 2 - 1 + phi(0) > 0
        let p = HandlePoint::new(vec![2.0], vec![0.0]);
        let d = defect(&c, &s11, &p).unwrap();
        assert!((d - (1.0 + c.phi(0.0))).abs() < 1e-12 && d > 0.0);
        // (0, 0): -1 + phi(2) = 1
        let p = HandlePoint::new(vec![0.0], vec![0.0]);
        assert!((defect(&c, &s11, &p).unwrap() - 1.0).abs() < 1e-12);
        // m = 0: membership for any u
        let s10 = HandleSpec::new(1, 0).unwrap();
        for &x in &[-7.0, 0.0, 0.3, 100.0] {
            let p = HandlePoint::new(vec![x], vec![]);
            assert!(is_member(&c, &s10, &p).unwrap());
        }
        // n = 0: membership iff ||v|| <= 1
        let s02 = HandleSpec::new(0, 2).unwrap();
        let inside = HandlePoint::new(vec![], vec![0.6, 0.0]);
        let outside = HandlePoint::new(vec![], vec![0.9, 0.9]);
        assert!(is_member(&c, &s02, &inside).unwrap());
        assert!(!is_member(&c, &s02, &outside).unwrap());
        let on = HandlePoint::new(vec![], vec![1.0, 0.0]);
        assert!(defect(&c, &s02, &on).unwrap().abs() <= DEFECT_TOL);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let c = ctx();
        let s = HandleSpec::new(2, 1).unwrap();
        let p = HandlePoint::new(vec![1.0], vec![0.0]);
        assert!(defect(&c, &s, &p).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = ctx();
        let s = HandleSpec::new(2, 1).unwrap();
        let tol = DEFECT_TOL;
        let wall_core = HandlePoint::new(vec![1.0, 0.0], vec![1.0]);
        assert_eq!(classify(&c, &s, &wall_core, tol).unwrap(), RegionClass::FlangeCore);
        let wall_far = HandlePoint::new(vec![1.0, 0.0], vec![2.0]);
        assert_eq!(classify(&c, &s, &wall_far, tol).unwrap(), RegionClass::BoundaryS);
        // (0.2, 0): defect = 0.2 - 1 + phi(1.8) = 1 > 0, an interior member
        // (the flange/disk inclusion forces membership whenever ||v|| <= 1)
        let p = HandlePoint::new(vec![0.2, 0.0], vec![0.0]);
        assert_eq!(classify(&c, &s, &p, tol).unwrap(), RegionClass::InteriorOfHandle);
        let deep_flange = HandlePoint::new(vec![3.0, 0.0], vec![5.0]);
        assert_eq!(classify(&c, &s, &deep_flange, tol).unwrap(), RegionClass::Flange);
        // a genuine boundary point off the wall
        let b = boundary_point(&c, &s, -0.5, &[1.0, 0.0], &[1.0]).unwrap();
        assert_eq!(classify(&c, &s, &b, tol).unwrap(), RegionClass::BoundaryD);
        // outside: n = 0 handle beyond the disk
        let s02 = HandleSpec::new(0, 2).unwrap();
        let p = HandlePoint::new(vec![], vec![1.2, 0.0]);
        assert_eq!(classify(&c, &s02, &p, tol).unwrap(), RegionClass::Outside);
    }

    #[test]
    fn boundary_point_radii() {
        let c = ctx();
        let s = HandleSpec::new(1, 1).unwrap();
        let b = boundary_point(&c, &s, 0.0, &[1.0], &[1.0]).unwrap();
        assert!((b.ru() - (1.0 - c.phi(0.0))).abs() < 1e-12);
        assert!((b.rv() - (1.0 + c.phi(0.0))).abs() < 1e-12);
        let b = boundary_point(&c, &s, 1.0, &[1.0], &[1.0]).unwrap();
        assert!((b.ru() - 1.0).abs() < 1e-12 && (b.rv() - 2.0).abs() < 1e-12);
        let b = boundary_point(&c, &s, -1.0, &[1.0], &[1.0]).unwrap();
        assert!(b.ru().abs() < 1e-12 && (b.rv() - 1.0).abs() < 1e-12);
        // clamped below t = -1 but still on the boundary
        let b = boundary_point(&c, &s, -3.0, &[1.0], &[1.0]).unwrap();
        assert!(defect(&c, &s, &b).unwrap().abs() <= DEFECT_TOL);
        // the defining equation holds along a t-grid
        for k in 0..=600 {
            let t = -3.0 + 6.0 * k as f64 / 600.0;
            let b = boundary_point(&c, &s, t, &[1.0], &[1.0]).unwrap();
            assert!(defect(&c, &s, &b).unwrap().abs() <= DEFECT_TOL, "t={t}");
            if t >= -1.0 {
                assert!((b.ru() + b.rv() - 2.0 - t).abs() < 1e-9);
            }
        }
        assert!(matches!(
            boundary_point(&c, &HandleSpec::new(2, 0).unwrap(), 0.0, &[1.0, 0.0], &[]),
            Err(GeometryError::EmptyBoundary)
        ));
    }

    #[test]
    fn inclusion_witness_examples() {
        let c = ctx();
        let s = HandleSpec::new(2, 2).unwrap();
        let p = HandlePoint::new(vec![1.5, 0.0], vec![7.0, 0.0]);
        let r = inclusion_witness(&c, &s, &p).unwrap();
        assert_eq!(r.side, Some(InclusionSide::FlangeCylinder));
        assert!(r.member);
        let p = HandlePoint::new(vec![0.0, 0.0], vec![1.0, 0.0]);
        let r = inclusion_witness(&c, &s, &p).unwrap();
        assert_eq!(r.side, Some(InclusionSide::DiskCylinder));
        let p = HandlePoint::new(vec![0.9, 0.0], vec![0.5, 0.0]);
        let r = inclusion_witness(&c, &s, &p).unwrap();
        assert_eq!(r.side, Some(InclusionSide::DiskCylinder));
        // neither inclusion applies but the point may still be a member
        let p = HandlePoint::new(vec![0.98, 0.0], vec![1.05, 0.0]);
        let r = inclusion_witness(&c, &s, &p).unwrap();
        assert_eq!(r.side, None);
        assert!(r.member);
    }
}
