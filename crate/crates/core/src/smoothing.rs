//! Collar smoothing: the radial deformation `Psi` of the corner
//! neighbourhood of a classical handle attachment, the height function
//! `kappa` driven by `phi`, and the smoothed boundary profile
//! `{Psi(x, kappa(x))}` that replaces the right-angle corner with the fat
//! handle's smooth boundary.
//!
//! Everything is computed in radial coordinates `(r, w, t)` -- the formulas
//! are radially equivariant, so the construction is dimension independent.
//! `r` tracks the handle factor (`||u||`), `w` the co-factor (`||v||`), and
//! `t` in [-1/4, 1/4] the collar parameter. The deformation has three pieces
//! per side whose domains overlap; on overlaps the branch values agree
//! because the plateaus of `lambda_eps` engage exactly there.

use crate::kernels::{KernelContext, SmoothingParams};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmoothingError {
    #[error("point outside the collar model: {0}")]
    OutOfDomain(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Which chart of the boundary collar the point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollarSide {
    /// boundary far from the attachment region; `Psi` is the identity there
    FarField,
    /// the flange chart: `r = 1`, co-radius `w` in [1, 2]
    Flange,
    /// the handle boundary chart: `w = 1`, radius `r` in [0, 1]
    Handle,
}

/// A collar point in radial coordinates with its unit directions carried
/// along (either may be empty when only the radial picture matters).
#[derive(Debug, Clone)]
pub struct CollarPoint {
    pub side: CollarSide,
    pub r: f64,
    pub w: f64,
    pub t: f64,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
}

const T_TOL: f64 = 1e-12;

impl CollarPoint {
    /// Validates the side invariants. Piece domains are treated as closed
    /// where the limits exist, so the flange accepts `w` in [1, 2] and the
    /// handle `r` in [0, 1].
    pub fn new(side: CollarSide, r: f64, w: f64, t: f64) -> Result<Self, SmoothingError> {
        if t.abs() > 0.25 + T_TOL {
            return Err(SmoothingError::OutOfDomain(format!(
                "collar parameter t = {t} outside [-1/4, 1/4]"
            )));
        }
        match side {
            CollarSide::Flange => {
                if !(1.0 - T_TOL..=2.0 + T_TOL).contains(&w) || r <= 0.0 {
                    return Err(SmoothingError::OutOfDomain(format!(
                        "flange point needs w in [1, 2] and r > 0, got (r, w) = ({r}, {w})"
                    )));
                }
            }
            CollarSide::Handle => {
                if !(0.0..=1.0 + T_TOL).contains(&r) || (w - 1.0).abs() > 1e-9 {
                    return Err(SmoothingError::OutOfDomain(format!(
                        "handle point needs r in [0, 1] and w = 1, got (r, w) = ({r}, {w})"
                    )));
                }
            }
            CollarSide::FarField => {}
        }
        Ok(Self {
            side,
            r,
            w,
            t,
            du: Vec::new(),
            dv: Vec::new(),
        })
    }

    pub fn with_directions(mut self, du: Vec<f64>, dv: Vec<f64>) -> Self {
        self.du = du;
        self.dv = dv;
        self
    }
}

/// Image of a collar point in radial model coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollarImage {
    pub r: f64,
    pub w: f64,
}

impl CollarImage {
    /// Rebuild the full point from stored unit directions.
    pub fn lift(&self, du: &[f64], dv: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (
            du.iter().map(|c| c * self.r).collect(),
            dv.iter().map(|c| c * self.w).collect(),
        )
    }
}

/// Flange-side piece `k` of `Psi` at collar parameter `t`, base radius `r`
/// and co-radius `w`; `None` when `w` is outside the piece domain.
pub fn psi_flange_piece(
    ctx: &KernelContext,
    params: &SmoothingParams,
    k: u8,
    t: f64,
    r: f64,
    w: f64,
) -> Option<CollarImage> {
    let e = params.epsilon();
    let rr = (1.0 - t) * r;
    match k {
        1 if ((4.0 - e) / 2.0..=2.0).contains(&w) => Some(CollarImage { r: rr, w }),
        2 if (1.5..=2.0).contains(&w) => Some(CollarImage {
            r: rr,
            w: ctx.f_profile(params, t, w),
        }),
        3 if (1.0..=(3.0 + e) / 2.0).contains(&w) => Some(CollarImage { r: rr, w: w + t }),
        _ => None,
    }
}

/// Handle-side piece `k` of `Psi`; `None` when `r` is outside the piece
/// domain.
pub fn psi_handle_piece(
    ctx: &KernelContext,
    params: &SmoothingParams,
    k: u8,
    t: f64,
    r: f64,
    w: f64,
) -> Option<CollarImage> {
    let e = params.epsilon();
    let ww = (1.0 + t) * w;
    match k {
        1 if ((1.0 - e) / 2.0..=1.0).contains(&r) => Some(CollarImage { r: r - t, w: ww }),
        2 if (0.0..=0.5).contains(&r) => Some(CollarImage {
            r: ctx.g_profile(params, t, r),
            w: ww,
        }),
        3 if (0.0..=e / 2.0).contains(&r) => Some(CollarImage { r, w: ww }),
        _ => None,
    }
}

/// The collar deformation in radial form. Far-field points are fixed;
/// flange points map to `((1-t) r, F(t, w))`, handle points to
/// `(G(t, r), (1+t) w)`, where `F` and `G` are the piecewise radial
/// actions. Points in no piece are out of domain.
pub fn psi_map(
    ctx: &KernelContext,
    params: &SmoothingParams,
    p: &CollarPoint,
) -> Result<CollarImage, SmoothingError> {
    if p.t.abs() > 0.25 + T_TOL {
        return Err(SmoothingError::OutOfDomain(format!("t = {}", p.t)));
    }
    match p.side {
        CollarSide::FarField => Ok(CollarImage { r: p.r, w: p.w }),
        CollarSide::Flange => (1..=3)
            .find_map(|k| psi_flange_piece(ctx, params, k, p.t, p.r, p.w))
            .ok_or_else(|| {
                SmoothingError::OutOfDomain(format!("flange co-radius w = {}", p.w))
            }),
        CollarSide::Handle => (1..=3)
            .find_map(|k| psi_handle_piece(ctx, params, k, p.t, p.r, p.w))
            .ok_or_else(|| SmoothingError::OutOfDomain(format!("handle radius r = {}", p.r))),
    }
}

/// The corner height function on the model boundary: 0 on the far field,
/// `phi(1 - w)` on the flange side, `phi(r - 1)` on the handle side. Takes
/// the value `phi(0)` exactly at the corner `r = w = 1` and vanishes for
/// `w >= 3/2` and `r <= 1/2`.
pub fn kappa(ctx: &KernelContext, p: &CollarPoint) -> Result<f64, SmoothingError> {
    match p.side {
        CollarSide::FarField => Ok(0.0),
        CollarSide::Flange => {
            if p.w < 1.0 - 1e-9 {
                return Err(SmoothingError::OutOfDomain(format!(
                    "kappa needs w >= 1 on the flange side, got {}",
                    p.w
                )));
            }
            Ok(ctx.phi(1.0 - p.w))
        }
        CollarSide::Handle => {
            if p.r > 1.0 + 1e-9 {
                return Err(SmoothingError::OutOfDomain(format!(
                    "kappa needs r <= 1 on the handle side, got {}",
                    p.r
                )));
            }
            Ok(ctx.phi(p.r - 1.0))
        }
    }
}

/// Piece tags along the smoothed boundary profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfilePiece {
    FarFlange,
    FlangeCurve,
    HandleCurve,
    HandleAxis,
}

impl ProfilePiece {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfilePiece::FarFlange => "far-flange",
            ProfilePiece::FlangeCurve => "flange-curve",
            ProfilePiece::HandleCurve => "handle-curve",
            ProfilePiece::HandleAxis => "handle-axis",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileSample {
    pub piece: ProfilePiece,
    pub r: f64,
    pub w: f64,
}

/// Ordered samples of the smoothed boundary with piece tags.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    pub samples: Vec<ProfileSample>,
}

/// Flange-side profile point `Psi(x, kappa(x))` at co-radius `w` in [1, 2].
pub fn profile_flange(ctx: &KernelContext, params: &SmoothingParams, w: f64) -> CollarImage {
    let t = ctx.phi(1.0 - w);
    // kappa <= phi(0) < 1/4, so the collar parameter is always in range
    let p = CollarPoint::new(CollarSide::Flange, 1.0, w, t).expect("flange profile point");
    psi_map(ctx, params, &p).expect("flange profile image")
}

/// Handle-side profile point at radius `r` in [0, 1].
pub fn profile_handle(ctx: &KernelContext, params: &SmoothingParams, r: f64) -> CollarImage {
    let t = ctx.phi(r - 1.0);
    let p = CollarPoint::new(CollarSide::Handle, r, 1.0, t).expect("handle profile point");
    psi_map(ctx, params, &p).expect("handle profile image")
}

/// Sample the curve `{Psi(x, kappa(x))}` along the model boundary, from the
/// far flange (w = 2) through the corner to the handle axis (r = 0). The
/// corner is replaced by the fat handle's boundary arc; the straight legs
/// rejoin the unsmoothed boundary where `kappa` vanishes.
pub fn smoothed_boundary_profile(
    ctx: &KernelContext,
    params: &SmoothingParams,
    samples: usize,
) -> Result<ProfileCurve, SmoothingError> {
    if samples < 16 {
        return Err(SmoothingError::InvalidParams(format!(
            "need at least 16 samples, got {samples}"
        )));
    }
    let per_leg = samples / 4;
    let mut out = Vec::with_capacity(samples + 4);
    // far flange: w from 2 down to 3/2, kappa = 0
    for k in 0..=per_leg {
        let w = 2.0 - 0.5 * k as f64 / per_leg as f64;
        let img = profile_flange(ctx, params, w);
        out.push(ProfileSample {
            piece: ProfilePiece::FarFlange,
            r: img.r,
            w: img.w,
        });
    }
    // curved flange leg: w from 3/2 down to 1
    for k in 1..=per_leg {
        let w = 1.5 - 0.5 * k as f64 / per_leg as f64;
        let img = profile_flange(ctx, params, w);
        out.push(ProfileSample {
            piece: ProfilePiece::FlangeCurve,
            r: img.r,
            w: img.w,
        });
    }
    // curved handle leg: r from 1 down to 1/2 (r = 1 duplicates the corner)
    for k in 1..=per_leg {
        let r = 1.0 - 0.5 * k as f64 / per_leg as f64;
        let img = profile_handle(ctx, params, r);
        out.push(ProfileSample {
            piece: ProfilePiece::HandleCurve,
            r: img.r,
            w: img.w,
        });
    }
    // handle axis: r from 1/2 down to 0, kappa = 0
    for k in 1..=per_leg {
        let r = 0.5 - 0.5 * k as f64 / per_leg as f64;
        let img = profile_handle(ctx, params, r);
        out.push(ProfileSample {
            piece: ProfilePiece::HandleAxis,
            r: img.r,
            w: img.w,
        });
    }
    Ok(ProfileCurve { samples: out })
}

/// First-derivative jumps of the profile at its three junctions
/// (w = 3/2, the corner, r = 1/2), measured with second-order one-sided
/// stencils of step `h` in the leg parameter.
pub fn junction_defects(ctx: &KernelContext, params: &SmoothingParams, h: f64) -> [f64; 3] {
    let sided = |p0: CollarImage, p1: CollarImage, p2: CollarImage, h: f64| {
        // (-3 P0 + 4 P1 - P2) / (2h)
        (
            (-3.0 * p0.r + 4.0 * p1.r - p2.r) / (2.0 * h),
            (-3.0 * p0.w + 4.0 * p1.w - p2.w) / (2.0 * h),
        )
    };
    let gap = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs().max((a.1 - b.1).abs());

    // junction at w = 3/2 along the flange leg
    let f = |w: f64| profile_flange(ctx, params, w);
    let plus = sided(f(1.5), f(1.5 + h), f(1.5 + 2.0 * h), h);
    let minus = sided(f(1.5), f(1.5 - h), f(1.5 - 2.0 * h), -h);
    let d_flange = gap(plus, minus);

    // corner: flange leg parameterized by s = w - 1 >= 0, handle leg by
    // s = r - 1 <= 0; both trace the same boundary arc
    let a = |s: f64| profile_flange(ctx, params, 1.0 + s);
    let b = |s: f64| profile_handle(ctx, params, 1.0 + s);
    let plus = sided(a(0.0), a(h), a(2.0 * h), h);
    let minus = sided(b(0.0), b(-h), b(-2.0 * h), -h);
    let d_corner = gap(plus, minus);

    // junction at r = 1/2 along the handle leg
    let g = |r: f64| profile_handle(ctx, params, r);
    let plus = sided(g(0.5), g(0.5 + h), g(0.5 + 2.0 * h), h);
    let minus = sided(g(0.5), g(0.5 - h), g(0.5 - 2.0 * h), -h);
    let d_handle = gap(plus, minus);

    [d_flange, d_corner, d_handle]
}

#[derive(Debug, Clone)]
pub struct MonotonicityRow {
    pub t: f64,
    pub min_slope_f: f64,
    pub min_slope_g: f64,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub rows: Vec<MonotonicityRow>,
    pub pass: bool,
}

/// Minimum finite-difference slope of `f(t, .)` and `g(t, .)` over an
/// x-grid, against the bound `1 - 4|t| - 1e-6`.
pub fn monotonicity_audit(
    ctx: &KernelContext,
    params: &SmoothingParams,
    t_grid: &[f64],
    x_lo: f64,
    x_hi: f64,
    nx: usize,
) -> MonotonicityReport {
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut pass = true;
    let dx = (x_hi - x_lo) / nx as f64;
    for &t in t_grid {
        let mut min_f = f64::INFINITY;
        let mut min_g = f64::INFINITY;
        let mut prev_f = ctx.f_profile(params, t, x_lo);
        let mut prev_g = ctx.g_profile(params, t, x_lo);
        for k in 1..=nx {
            let x = x_lo + k as f64 * dx;
            let cf = ctx.f_profile(params, t, x);
            let cg = ctx.g_profile(params, t, x);
            min_f = min_f.min((cf - prev_f) / dx);
            min_g = min_g.min((cg - prev_g) / dx);
            prev_f = cf;
            prev_g = cg;
        }
        let bound = 1.0 - 4.0 * t.abs() - 1e-6;
        pass &= min_f >= bound && min_g >= bound;
        rows.push(MonotonicityRow {
            t,
            min_slope_f: min_f,
            min_slope_g: min_g,
            bound,
        });
    }
    MonotonicityReport { rows, pass }
}

#[derive(Debug, Clone)]
pub struct OverlapReport {
    pub per_overlap: Vec<(&'static str, f64)>,
    pub max_defect: f64,
}

/// Branch agreement on the pairwise overlaps of the piece domains, over a
/// w/r-grid per overlap and a t-grid. The plateaus of `lambda_eps` make the
/// branches literally equal there; this measures how literally.
pub fn overlap_audit(
    ctx: &KernelContext,
    params: &SmoothingParams,
    grid: usize,
    t_count: usize,
) -> OverlapReport {
    let e = params.epsilon();
    let ts: Vec<f64> = (0..t_count)
        .map(|k| -0.25 + 0.5 * k as f64 / (t_count - 1) as f64)
        .collect();
    let mut per: Vec<(&'static str, f64)> = Vec::new();
    let mut overall: f64 = 0.0;

    let mut run = |name: &'static str,
                   lo: f64,
                   hi: f64,
                   pieces: (u8, u8),
                   flange: bool,
                   per: &mut Vec<(&'static str, f64)>| {
        let mut worst: f64 = 0.0;
        for &t in &ts {
            for k in 0..=grid {
                let x = lo + (hi - lo) * k as f64 / grid as f64;
                let (a, b) = if flange {
                    (
                        psi_flange_piece(ctx, params, pieces.0, t, 1.0, x),
                        psi_flange_piece(ctx, params, pieces.1, t, 1.0, x),
                    )
                } else {
                    (
                        psi_handle_piece(ctx, params, pieces.0, t, x, 1.0),
                        psi_handle_piece(ctx, params, pieces.1, t, x, 1.0),
                    )
                };
                if let (Some(a), Some(b)) = (a, b) {
                    worst = worst.max((a.r - b.r).abs().max((a.w - b.w).abs()));
                }
            }
        }
        per.push((name, worst));
        overall = overall.max(worst);
    };

    run("flange 1/2", (4.0 - e) / 2.0, 2.0, (1, 2), true, &mut per);
    run("flange 2/3", 1.5, (3.0 + e) / 2.0, (2, 3), true, &mut per);
    run("handle 1/2", (1.0 - e) / 2.0, 0.5, (1, 2), false, &mut per);
    run("handle 2/3", 0.0, e / 2.0, (2, 3), false, &mut per);

    OverlapReport {
        per_overlap: per,
        max_defect: overall,
    }
}

#[derive(Debug, Clone)]
pub struct InjectivityReport {
    pub samples: usize,
    /// smallest image distance among pairs at domain distance >= 1e-4
    pub min_image_distance: f64,
}

/// Pairwise separation of `Psi(., t)` images over seeded flange and handle
/// samples at a fixed collar parameter.
pub fn injectivity_audit(
    ctx: &KernelContext,
    params: &SmoothingParams,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<InjectivityReport, SmoothingError> {
    use rand::Rng;
    let mut rng = crate::sampling::rng(seed);
    let mut pts = Vec::with_capacity(n);
    let mut imgs = Vec::with_capacity(n);
    for k in 0..n {
        let p = if k % 2 == 0 {
            CollarPoint::new(CollarSide::Flange, 1.0, 1.0 + rng.gen_range(1e-6..1.0), t)?
        } else {
            CollarPoint::new(CollarSide::Handle, rng.gen_range(0.0..1.0), 1.0, t)?
        };
        let img = psi_map(ctx, params, &p)?;
        pts.push((p.r, p.w));
        imgs.push(img);
    }
    let mut min_img = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let dd = (pts[i].0 - pts[j].0)
                .abs()
                .max((pts[i].1 - pts[j].1).abs());
            if dd < 1e-4 {
                continue;
            }
            let di = (imgs[i].r - imgs[j].r)
                .abs()
                .max((imgs[i].w - imgs[j].w).abs());
            min_img = min_img.min(di);
        }
    }
    Ok(InjectivityReport {
        samples: n,
        min_image_distance: min_img,
    })
}
