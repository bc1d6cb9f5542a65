//! Verification suites. Each suite runs one module's invariant battery and
//! reports one row per check; `all` is their union. Runs are deterministic
//! for a fixed seed.

use crate::report::{Check, CheckSet, SuiteOptions, SuiteReport};
use fatcw::cw::{self, fixtures, ComplexPoint};
use fatcw::geometry::{self, HandlePoint, HandleSpec, RegionClass};
use fatcw::kernels::{KernelContext, SmoothingParams};
use fatcw::maps;
use fatcw::sampling;
use fatcw::smoothing::{self, CollarPoint, CollarSide};
use rand::Rng;
use std::sync::Arc;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown suite {0} (expected kernels|geometry|maps|cw|smoothing|all)")]
    UnknownSuite(String),
    #[error("kernel context: {0}")]
    Kernel(#[from] fatcw::kernels::KernelError),
    #[error("{0}")]
    Internal(String),
}

impl From<cw::CwError> for HarnessError {
    fn from(e: cw::CwError) -> Self {
        HarnessError::Internal(e.to_string())
    }
}

impl From<maps::MapError> for HarnessError {
    fn from(e: maps::MapError) -> Self {
        HarnessError::Internal(e.to_string())
    }
}

impl From<geometry::GeometryError> for HarnessError {
    fn from(e: geometry::GeometryError) -> Self {
        HarnessError::Internal(e.to_string())
    }
}

impl From<smoothing::SmoothingError> for HarnessError {
    fn from(e: smoothing::SmoothingError) -> Self {
        HarnessError::Internal(e.to_string())
    }
}

pub const SUITES: [&str; 6] = ["kernels", "geometry", "maps", "cw", "smoothing", "all"];

/// Golden constants shared with the core fixtures file.
pub mod golden {
    pub const E43_ALPHA: f64 = 0.557314934976923;
    pub const PHI_ZERO: f64 = 0.0783190805507909;
    pub const E43_ALPHA_8DIGIT: f64 = 0.55731493;
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport, HarnessError> {
    let start = Instant::now();
    let ctx = Arc::new(KernelContext::new()?);
    let checks = match name {
        "kernels" => kernels_checks(&ctx, opts)?,
        "geometry" => geometry_checks(&ctx, opts)?,
        "maps" => maps_checks(&ctx, opts)?,
        "cw" => cw_checks(&ctx, opts)?,
        "smoothing" => smoothing_checks(&ctx, opts)?,
        "all" => {
            let mut all = kernels_checks(&ctx, opts)?;
            all.extend(geometry_checks(&ctx, opts)?);
            all.extend(maps_checks(&ctx, opts)?);
            all.extend(cw_checks(&ctx, opts)?);
            all.extend(smoothing_checks(&ctx, opts)?);
            all
        }
        other => return Err(HarnessError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport::new(
        name,
        opts.seed,
        opts.strict,
        checks,
        start.elapsed(),
    ))
}

// --- kernels -----------------------------------------------------------------

fn kernels_checks(ctx: &KernelContext, opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let mut cs = CheckSet::new(opts);
    let e43 = (4.0f64 / 3.0).exp();

    cs.at_most(
        "kernels.alpha_golden",
        (e43 * ctx.alpha() - golden::E43_ALPHA_8DIGIT).abs(),
        5e-8,
    );
    cs.at_least("kernels.alpha_above_11_20", e43 * ctx.alpha(), 11.0 / 20.0);

    // cache against direct quadrature
    let mut worst_l: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for k in 0..=64 {
        let t = k as f64 / 64.0;
        worst_l = worst_l.max((ctx.lambda(t) - ctx.lambda_quadrature(t)).abs());
        worst_p = worst_p.max((ctx.phi(t - 0.5) - ctx.phi_quadrature(t - 0.5)).abs());
    }
    cs.at_most("kernels.cache_lambda_vs_quadrature", worst_l, 1e-10);
    cs.at_most("kernels.cache_phi_vs_quadrature", worst_p, 1e-10);

    // identities on a 1e4 grid over [-2, 3]
    let n = 10_000;
    let mut id_l: f64 = 0.0;
    let mut range_l: f64 = 0.0;
    let mut id_p: f64 = 0.0;
    let mut tail_p: f64 = 0.0;
    for k in 0..=n {
        let t = -2.0 + 5.0 * k as f64 / n as f64;
        let l = ctx.lambda(t);
        id_l = id_l.max((l + ctx.lambda(1.0 - t) - 1.0).abs());
        range_l = range_l.max((-l).max(l - 1.0));
        if t <= 0.0 {
            range_l = range_l.max(l.abs());
        }
        if t >= 1.0 {
            range_l = range_l.max((l - 1.0).abs());
        }
        id_p = id_p.max((ctx.phi(t) - ctx.phi(-t) - t).abs());
        if t.abs() >= 0.5 {
            tail_p = tail_p.max((ctx.phi(t) + ctx.phi(-t) - t.abs()).abs());
        }
    }
    cs.at_most("kernels.lambda_identity", id_l, 1e-9);
    cs.at_most("kernels.lambda_range", range_l, 0.0);
    cs.at_most("kernels.phi_identity", id_p, 1e-9);
    cs.at_most("kernels.phi_tail_identity", tail_p, 1e-9);
    cs.at_most("kernels.lambda_half", (ctx.lambda(0.5) - 0.5).abs(), 1e-10);

    cs.at_least("kernels.phi_zero_positive", ctx.phi(0.0), 1e-6);
    cs.at_most("kernels.phi_zero_below_eighth", ctx.phi(0.0), 0.125);
    cs.at_most(
        "kernels.phi_zero_golden",
        (ctx.phi(0.0) - golden::PHI_ZERO).abs(),
        1e-10,
    );

    // derivative bound: grid max of lambda' on a 1e-3 grid
    let mut max_lp: f64 = 0.0;
    let mut argmax = 0.0;
    for k in 0..=1000 {
        let t = k as f64 / 1000.0;
        let lp = ctx.lambda_prime(t);
        if lp > max_lp {
            max_lp = lp;
            argmax = t;
        }
    }
    cs.at_most(
        "kernels.lambda_prime_max_value",
        (max_lp - 1.0 / (e43 * ctx.alpha())).abs(),
        1e-6,
    );
    cs.at_most("kernels.lambda_prime_argmax", (argmax - 0.5).abs(), 1e-3);
    cs.at_most("kernels.lambda_prime_bound", max_lp, 20.0 / 11.0);
    // closed form against a central difference of the cached lambda
    let h = 1e-5;
    let fd = (ctx.lambda(0.25 + h) - ctx.lambda(0.25 - h)) / (2.0 * h);
    cs.at_most(
        "kernels.lambda_prime_vs_difference",
        (ctx.lambda_prime(0.25) - fd).abs(),
        1e-6,
    );

    // second-derivative sign on quadrature values (the cubic cache is C^1
    // only, so the reference route carries this check)
    let h = 1e-4;
    let mut sign_violation: f64 = 0.0;
    for k in 1..200 {
        let t = k as f64 / 200.0;
        if (t - 0.5).abs() < 1e-3 {
            continue;
        }
        let dd = (ctx.lambda_quadrature(t + h) - 2.0 * ctx.lambda_quadrature(t)
            + ctx.lambda_quadrature(t - h))
            / (h * h);
        if t < 0.5 {
            sign_violation = sign_violation.max(-dd);
        } else {
            sign_violation = sign_violation.max(dd);
        }
    }
    cs.at_most("kernels.lambda_second_derivative_sign", sign_violation, 1e-4);

    // rescaled ramp slope stays below 2
    let params = SmoothingParams::default();
    let mut max_slope: f64 = 0.0;
    let h = 1e-5;
    for k in 0..=4000 {
        let t = k as f64 / 4000.0;
        let s = (ctx.lambda_eps(&params, t + h) - ctx.lambda_eps(&params, t - h)) / (2.0 * h);
        max_slope = max_slope.max(s);
    }
    cs.at_most("kernels.lambda_eps_slope", max_slope, 2.0);

    // p_a bound and coefficient positivity at sampled arguments
    let mut max_pa: f64 = 0.0;
    let mut min_alpha = f64::INFINITY;
    for a in [0.6, 1.0, 1.7, 2.0] {
        for k in 0..=400 {
            let u = 5.0 * k as f64 / 400.0;
            max_pa = max_pa.max(ctx.p_a(a, 1.5 * u));
        }
    }
    for i in 0..=100 {
        let u = 5.0 * i as f64 / 100.0;
        for j in 0..=40 {
            let v = -1.0 + 2.0 * j as f64 / 40.0;
            min_alpha = min_alpha.min(maps::alpha_coef(ctx, u, v));
        }
    }
    cs.at_most("kernels.p_a_bound", max_pa, 1.5);
    cs.at_least("kernels.alpha_coef_positive", min_alpha, 1e-9);

    // s near zero against its Taylor value
    let half_pi = std::f64::consts::FRAC_PI_2;
    cs.at_most(
        "kernels.s_taylor_window",
        (fatcw::s_func(1e-6) - half_pi).abs(),
        1e-12,
    );
    Ok(cs.into_checks())
}

// --- geometry ----------------------------------------------------------------

fn geometry_checks(ctx: &KernelContext, opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let mut cs = CheckSet::new(opts);
    let mut rng = sampling::rng(opts.seed ^ 0x9E0);
    let combos = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 0), (0, 2)];

    let mut flange_defect = f64::INFINITY;
    let mut disk_defect = f64::INFINITY;
    let mut class_mismatch = 0.0f64;
    let mut m0_defect = f64::INFINITY;
    let mut n0_mismatch = 0.0f64;
    for &(n, m) in &combos {
        let spec = HandleSpec::new(n, m)?;
        for _ in 0..100_000 {
            let u = sampling::scaled_vector(&mut rng, n, 1.2);
            let v = sampling::scaled_vector(&mut rng, m, 1.2);
            let p = HandlePoint::new(u, v);
            let d = geometry::defect(ctx, &spec, &p)?;
            let class = geometry::classify(ctx, &spec, &p, geometry::DEFECT_TOL)?;
            // tag consistency with the defect sign
            let consistent = match class {
                RegionClass::Outside => d < -geometry::DEFECT_TOL,
                RegionClass::BoundaryD => d.abs() <= geometry::DEFECT_TOL,
                RegionClass::InteriorOfHandle => d > geometry::DEFECT_TOL && p.ru() < 1.0,
                RegionClass::Flange | RegionClass::FlangeCore | RegionClass::BoundaryS => {
                    n >= 1 && p.ru() >= 1.0 - geometry::DEFECT_TOL && d >= -geometry::DEFECT_TOL
                }
            };
            if !consistent {
                class_mismatch += 1.0;
            }
            if n >= 1 && p.ru() >= 1.0 {
                flange_defect = flange_defect.min(d);
            }
            if p.rv() <= 1.0 {
                disk_defect = disk_defect.min(d);
            }
            if m == 0 {
                m0_defect = m0_defect.min(d);
            }
            if n == 0 {
                let member = d >= -geometry::DEFECT_TOL;
                if member != (p.rv() <= 1.0 + geometry::DEFECT_TOL) {
                    n0_mismatch += 1.0;
                }
            }
        }
    }
    cs.at_most("geometry.classification_consistency", class_mismatch, 0.0);
    cs.at_least("geometry.flange_inclusion_defect", flange_defect, -1e-9);
    cs.at_least("geometry.disk_inclusion_defect", disk_defect, -1e-9);
    cs.at_least("geometry.m0_membership_defect", m0_defect, 1e-12);
    cs.at_most("geometry.n0_membership_rule", n0_mismatch, 0.0);

    // boundary characterization across a t-grid and random directions
    let mut worst: f64 = 0.0;
    let mut param_worst: f64 = 0.0;
    for &(n, m) in &[(1, 1), (2, 1), (1, 2), (2, 2)] {
        let spec = HandleSpec::new(n, m)?;
        for k in 0..1000 {
            let t = -3.0 + 6.0 * k as f64 / 999.0;
            let du = sampling::unit_vector(&mut rng, n);
            let dv = sampling::unit_vector(&mut rng, m);
            let b = geometry::boundary_point(ctx, &spec, t, &du, &dv)?;
            worst = worst.max(geometry::defect(ctx, &spec, &b)?.abs());
            if t >= -1.0 {
                param_worst = param_worst.max((b.ru() + b.rv() - 2.0 - t).abs());
            }
        }
    }
    cs.at_most("geometry.boundary_equation", worst, 1e-9);
    cs.at_most("geometry.boundary_parameter", param_worst, 1e-9);
    Ok(cs.into_checks())
}

// --- maps --------------------------------------------------------------------

fn maps_checks(ctx: &KernelContext, opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let mut cs = CheckSet::new(opts);
    let mut rng = sampling::rng(opts.seed ^ 0xA11);

    // parameter round trip Theta . Phi on random domain points
    let mut rt_param: f64 = 0.0;
    // image round trip Phi . Theta on independently generated handle points
    let mut rt_image: f64 = 0.0;
    for n in 1..=3usize {
        for m in 1..=3usize {
            let spec = HandleSpec::new(n, m)?;
            for k in 0..10_000 {
                let u = sampling::scaled_vector(&mut rng, n, 1.8);
                let v = sampling::ball_point(&mut rng, m, 1.0);
                let q = maps::phi_map(ctx, &spec, &u, &v)?;
                let (u2, v2, _) = maps::theta_map(ctx, &spec, &q)?;
                let err = u
                    .iter()
                    .zip(&u2)
                    .chain(v.iter().zip(&v2))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                rt_param = rt_param.max(err);

                // independent handle point: disk cylinder, flange, or
                // boundary sample
                let q = match k % 3 {
                    0 => {
                        let u = sampling::scaled_vector(&mut rng, n, 2.0);
                        let v = sampling::ball_point(&mut rng, m, 1.0);
                        HandlePoint::new(u, v)
                    }
                    1 => {
                        let dir = sampling::unit_vector(&mut rng, n);
                        let r = 1.0 + rng.gen_range(0.0..2.0);
                        HandlePoint::new(
                            dir.iter().map(|c| c * r).collect(),
                            sampling::scaled_vector(&mut rng, m, 1.5),
                        )
                    }
                    _ => {
                        let t = rng.gen_range(-1.0..2.0);
                        let du = sampling::unit_vector(&mut rng, n);
                        let dv = sampling::unit_vector(&mut rng, m);
                        geometry::boundary_point(ctx, &spec, t, &du, &dv)?
                    }
                };
                let (u3, v3, _) = maps::theta_map(ctx, &spec, &q)?;
                let back = maps::phi_map(ctx, &spec, &u3, &v3)?;
                let err = q
                    .u
                    .iter()
                    .zip(&back.u)
                    .chain(q.v.iter().zip(&back.v))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                rt_image = rt_image.max(err);
            }
        }
    }
    cs.at_most("maps.round_trip_parameter", rt_param, 1e-8);
    cs.at_most("maps.round_trip_image", rt_image, 1e-8);

    // Jacobian positivity on a grid of 1e5 points
    let mut min_jac = f64::INFINITY;
    for i in 0..500 {
        let u = -3.0 + 6.0 * i as f64 / 499.0;
        for j in 0..200 {
            let v = -1.0 + 2.0 * j as f64 / 199.0;
            min_jac = min_jac.min(maps::phi11_jacobian(ctx, u, v));
        }
    }
    cs.at_least("maps.phi11_jacobian_positive", min_jac, 1e-9);

    // dual derivatives against central differences
    let mut dual_fd: f64 = 0.0;
    let h = 1e-6;
    for _ in 0..10_000 {
        let u = rng.gen_range(-3.0..3.0);
        let v = rng.gen_range(-0.999..0.999);
        let (x1, y1) = maps::phi11(ctx, u + h, v);
        let (x0, y0) = maps::phi11(ctx, u - h, v);
        let (x3, y3) = maps::phi11(ctx, u, v + h);
        let (x2, y2) = maps::phi11(ctx, u, v - h);
        let fd = ((x1 - x0) / (2.0 * h)) * ((y3 - y2) / (2.0 * h))
            - ((x3 - x2) / (2.0 * h)) * ((y1 - y0) / (2.0 * h));
        dual_fd = dual_fd.max((maps::phi11_jacobian(ctx, u, v) - fd).abs());
    }
    cs.at_most("maps.jacobian_dual_vs_difference", dual_fd, 1e-6);

    // |x| + |y| >= 3/2 |u| + |v|
    let mut norm_margin = f64::INFINITY;
    for _ in 0..20_000 {
        let u = rng.gen_range(-3.0..3.0);
        let v = rng.gen_range(-1.0..1.0);
        let (x, y) = maps::phi11(ctx, u, v);
        norm_margin = norm_margin.min(x.abs() + y.abs() - 1.5 * u.abs() - v.abs());
    }
    cs.at_least("maps.image_norm_lower_bound", norm_margin, -1e-12);

    // PhiHat: trichotomy by ||u|| vs 1
    let spec21 = HandleSpec::new(2, 1)?;
    let mut tri_mismatch = 0.0f64;
    for _ in 0..100_000 {
        let ru: f64 = rng.gen_range(0.0..2.5);
        if (ru - 1.0).abs() < 1e-9 {
            continue;
        }
        let dir = sampling::unit_vector(&mut rng, 2);
        let u: Vec<f64> = dir.iter().map(|c| c * ru).collect();
        let v = vec![rng.gen_range(-1.0f64..1.0)];
        let img = maps::phi_hat_map(ctx, &spec21, &u, &v)?;
        let in_flange = img.ru() >= 1.0;
        if (ru > 1.0) != in_flange && (img.ru() - 1.0).abs() > 1e-12 {
            tri_mismatch += 1.0;
        }
    }
    cs.at_most("maps.phi_hat_trichotomy", tri_mismatch, 0.0);

    // vanishing radial Jacobian on the wall
    let mut wall_jac: f64 = 0.0;
    for k in 0..100 {
        let v = k as f64 / 99.0;
        wall_jac = wall_jac.max(maps::phi_hat_jacobian_defect(ctx, v));
    }
    cs.at_most("maps.phi_hat_wall_jacobian", wall_jac, 1e-6);

    // wall image profile endpoints: 0 and 3/2
    let p0 = maps::phi_hat_boundary_profile(0.0);
    let p1 = maps::phi_hat_boundary_profile(1.0);
    cs.at_most(
        "maps.phi_hat_profile_endpoints",
        p0.abs().max((p1 - 1.5).abs()),
        1e-10,
    );

    // PhiHat inversion: image round trip off a 1e-2 collar of the wall,
    // parameter recovery off a 0.1 collar, degraded image round trip inside
    let mut img_off: f64 = 0.0;
    let mut param_far: f64 = 0.0;
    let mut img_in: f64 = 0.0;
    for k in 0..3000 {
        let band = k % 3;
        let ru: f64 = match band {
            0 => {
                // off the 1e-2 collar
                let r: f64 = rng.gen_range(0.0..2.0);
                if (r - 1.0).abs() < 1.2e-2 {
                    if r < 1.0 {
                        0.98
                    } else {
                        1.02
                    }
                } else {
                    r
                }
            }
            1 => {
                // far from the wall
                let r: f64 = rng.gen_range(0.0..2.0);
                if (r - 1.0).abs() < 0.1 {
                    if r < 1.0 {
                        0.85
                    } else {
                        1.15
                    }
                } else {
                    r
                }
            }
            _ => 1.0 + rng.gen_range(-9e-3..9e-3),
        };
        let dir = sampling::unit_vector(&mut rng, 2);
        let u: Vec<f64> = dir.iter().map(|c| c * ru).collect();
        let v = vec![rng.gen_range(-1.0f64..1.0)];
        let q = maps::phi_hat_map(ctx, &spec21, &u, &v)?;
        let (u2, v2, _) = maps::phi_hat_inverse(ctx, &spec21, &q)?;
        let back = maps::phi_hat_map(ctx, &spec21, &u2, &v2)?;
        let img_err = q
            .u
            .iter()
            .zip(&back.u)
            .chain(q.v.iter().zip(&back.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        match band {
            0 => img_off = img_off.max(img_err),
            1 => {
                let perr = u
                    .iter()
                    .zip(&u2)
                    .chain(v.iter().zip(&v2))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                param_far = param_far.max(perr);
                img_off = img_off.max(img_err);
            }
            _ => img_in = img_in.max(img_err),
        }
    }
    cs.at_most("maps.phi_hat_round_trip_off_collar", img_off, 1e-6);
    cs.at_most("maps.phi_hat_param_recovery_far", param_far, 1e-6);
    cs.at_most("maps.phi_hat_round_trip_in_collar", img_in, 1e-3);
    Ok(cs.into_checks())
}

// --- cw ----------------------------------------------------------------------

fn cw_checks(ctx: &Arc<KernelContext>, opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let mut cs = CheckSet::new(opts);
    let mut rng = sampling::rng(opts.seed ^ 0xC3);

    // normal forms idempotent on 1e5 points per example
    let iota = fixtures::iota();
    let mut mismatches = 0.0f64;
    for _ in 0..100_000 {
        let u = rng.gen_range(-4.0..4.0);
        let p = ComplexPoint::Cell {
            level: 1,
            cell: 0,
            point: HandlePoint::new(vec![u], vec![]),
        };
        let once = cw::normalize(&iota, &p)?;
        if cw::normalize(&iota, &once)? != once {
            mismatches += 1.0;
        }
    }
    cs.at_most("cw.normalize_idempotent_iota", mismatches, 0.0);

    let tdn = fixtures::tdn(3);
    let mut mismatches = 0.0f64;
    for _ in 0..100_000 {
        let u = sampling::scaled_vector(&mut rng, 3, 1.0);
        let p = ComplexPoint::Cell {
            level: 3,
            cell: 0,
            point: HandlePoint::new(u, vec![]),
        };
        let once = cw::normalize(&tdn, &p)?;
        if cw::normalize(&tdn, &once)? != once {
            mismatches += 1.0;
        }
    }
    cs.at_most("cw.normalize_idempotent_tdn", mismatches, 0.0);

    // w-dim bound against a per-cell brute-force oracle on random tables
    let mut wdim_mismatch = 0.0f64;
    for _ in 0..10 {
        let count = rng.gen_range(1..8usize);
        let table: Vec<(usize, usize)> = (0..count)
            .map(|_| (rng.gen_range(0..5usize), rng.gen_range(0..4usize)))
            .collect();
        let spec = fixtures::table_for_wdim(&table);
        let oracle = table.iter().map(|&(l, m)| l + m).max().unwrap_or(0);
        if cw::wdim_bound(&spec) != oracle {
            wdim_mismatch += 1.0;
        }
    }
    let thin = fixtures::table_for_wdim(&[(0, 0), (1, 0), (2, 0), (3, 0)]);
    if cw::wdim_bound(&thin) != 3 {
        wdim_mismatch += 1.0;
    }
    let mixed = fixtures::table_for_wdim(&[(0, 2), (1, 1), (2, 1)]);
    if cw::wdim_bound(&mixed) != 3 {
        wdim_mismatch += 1.0;
    }
    cs.at_most("cw.wdim_bound_vs_oracle", wdim_mismatch, 0.0);

    // witness slope exponent on a log-log fit
    let spec = fixtures::tdn(2);
    let ts = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| {
            let (_, s) = cw::nonreflexivity_witness(&spec, t).unwrap();
            (t.ln(), s.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    cs.at_most("cw.witness_slope_exponent", (slope + 0.5).abs(), 0.05);

    // the clamp projections
    let clamp_dev = (cw::pi_set(-3.0) - 0.0)
        .abs()
        .max((cw::pi_set(7.0) - 1.0).abs())
        .max((cw::pi_set(0.25) - 0.25).abs());
    let p = cw::pi_n_set(&[3.0, 4.0]);
    let proj_dev = (p[0] - 0.6).abs().max((p[1] - 0.8).abs());
    cs.at_most("cw.clamp_projections", clamp_dev.max(proj_dev), 1e-15);

    // fat sphere partition audit
    let s2 = fixtures::fat_s2();
    let cover = fixtures::fat_s2_cover(ctx);
    let pou = cw::build_partition(ctx, &s2, cover, 0.25)?;
    let audit = cw::audit_partition(&pou, 10_000, opts.seed ^ 0x5E)?;
    cs.at_most("cw.partition_sum", audit.max_sum_defect, 1e-9);
    cs.at_least("cw.partition_nonnegative", audit.min_value, 0.0);
    cs.at_most("cw.partition_subordination", audit.subordination_violation, 0.0);
    cs.at_most(
        "cw.partition_flange_restriction",
        audit.max_flange_mismatch,
        1e-9,
    );

    // the other example complexes carry partitions too; the chain exercises
    // the blend through two levels of descent
    let iota_pou = cw::build_partition(ctx, &iota, fixtures::iota_cover(ctx), 0.25)?;
    let audit = cw::audit_partition(&iota_pou, 2_000, opts.seed ^ 0x5F)?;
    cs.at_most("cw.partition_iota_sum", audit.max_sum_defect, 1e-9);
    cs.at_most(
        "cw.partition_iota_flange_restriction",
        audit.max_flange_mismatch,
        1e-9,
    );
    cs.at_most("cw.partition_iota_subordination", audit.subordination_violation, 0.0);
    let chain = fixtures::double_flange_chain();
    let chain_pou =
        cw::build_partition(ctx, &chain, fixtures::double_flange_chain_cover(ctx), 0.25)?;
    let audit = cw::audit_partition(&chain_pou, 2_000, opts.seed ^ 0x60)?;
    cs.at_most("cw.partition_chain_sum", audit.max_sum_defect, 1e-9);
    cs.at_most(
        "cw.partition_chain_flange_restriction",
        audit.max_flange_mismatch,
        1e-9,
    );
    cs.at_most("cw.partition_chain_subordination", audit.subordination_violation, 0.0);

    // fat sphere attach hits the open annulus 1/2 < ||w|| <= 1: for target
    // radii at 1e-2 resolution, the profile inverse yields a flange point
    // whose normal form lands at that radius
    let mut annulus_gap: f64 = 0.0;
    for k in 1..=50 {
        let target = 0.5 + 0.5 * k as f64 / 50.0;
        let r = fixtures::fat_s2_profile_inv(target);
        if r < 1.0 {
            annulus_gap = annulus_gap.max(1.0);
            continue;
        }
        let dir = sampling::unit_vector(&mut rng, 2);
        let p = ComplexPoint::Cell {
            level: 2,
            cell: 0,
            point: HandlePoint::new(dir.iter().map(|c| c * r).collect(), vec![]),
        };
        match cw::normalize(&s2, &p)? {
            ComplexPoint::Cell { level: 0, point, .. } => {
                annulus_gap = annulus_gap.max((point.rv() - target).abs());
            }
            _ => annulus_gap = annulus_gap.max(1.0),
        }
    }
    cs.at_most("cw.fat_s2_annulus_coverage", annulus_gap, 1e-9);

    // separating function on the interval
    let iota_spec = fixtures::iota();
    let a = ComplexPoint::Cell {
        level: 1,
        cell: 0,
        point: HandlePoint::new(vec![0.0], vec![]),
    };
    let cm = ctx.clone();
    let interior: Arc<cw::MarginFn> = Arc::new(move |p: &ComplexPoint| match p {
        ComplexPoint::Cell { point, .. } => cm.lambda(2.0 - 2.0 * point.u[0] * point.u[0]),
        ComplexPoint::Base(_) => 0.0,
    });
    let f = cw::separating_function(ctx, &iota_spec, &a, interior.clone())?;
    let fa = f.eval(&a)?;
    let fe0 = f.eval(&ComplexPoint::Base(0))?;
    let fe1 = f.eval(&ComplexPoint::Base(1))?;
    cs.at_least("cw.separating_value_at_point", fa, 1e-6);
    cs.at_most("cw.separating_value_at_endpoints", fe0.max(fe1), 0.0);
    let mut leak = 0.0f64;
    for k in 0..=1000 {
        let u = -1.5 + 3.0 * k as f64 / 1000.0;
        let p = ComplexPoint::Cell {
            level: 1,
            cell: 0,
            point: HandlePoint::new(vec![u], vec![]),
        };
        let v = f.eval(&p)?;
        if v > 1e-12 {
            let nf = cw::normalize(&iota_spec, &p)?;
            if interior(&nf) <= 0.0 {
                leak = leak.max(v);
            }
        }
    }
    cs.at_most("cw.separating_support", leak, 0.0);

    // regularity probes: injective fat-sphere attach vs constant thin attach
    let rep = cw::regularity_probe(ctx, &s2, 2, 0, 10_000, opts.seed ^ 0x7A)?;
    cs.at_most("cw.regularity_fat_s2_collisions", rep.collisions as f64, 0.0);
    cs.at_least(
        "cw.regularity_fat_s2_interior_tags",
        rep.interior_samples as f64,
        1.0,
    );
    let circle = fixtures::thin_circle();
    let rep = cw::regularity_probe(ctx, &circle, 1, 0, 2_000, opts.seed ^ 0x7B)?;
    cs.at_least("cw.regularity_thin_circle_collisions", rep.collisions as f64, 1.0);
    Ok(cs.into_checks())
}

// --- smoothing -----------------------------------------------------------------

fn smoothing_checks(ctx: &KernelContext, opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let mut cs = CheckSet::new(opts);
    let params = SmoothingParams::default();

    let overlaps = smoothing::overlap_audit(ctx, &params, 1000, 9);
    cs.at_most("smoothing.overlap_consistency", overlaps.max_defect, 1e-10);

    let mono = smoothing::monotonicity_audit(
        ctx,
        &params,
        &[-0.25, -0.125, 0.0, 0.125, 0.25],
        -1.0,
        3.0,
        4000,
    );
    let mut worst_margin = f64::INFINITY;
    for row in &mono.rows {
        worst_margin = worst_margin
            .min(row.min_slope_f - row.bound)
            .min(row.min_slope_g - row.bound);
    }
    cs.at_least("smoothing.monotonicity_margin", worst_margin, 0.0);

    // corner height: exactly phi(0), checked against the frozen golden value
    let corner = CollarPoint::new(CollarSide::Handle, 1.0, 1.0, 0.0)?;
    let kc = smoothing::kappa(ctx, &corner)?;
    cs.at_most(
        "smoothing.kappa_corner_value",
        (kc - golden::PHI_ZERO).abs(),
        1e-10,
    );
    // kappa range and zero regions
    let mut max_kappa: f64 = 0.0;
    let mut zero_violation: f64 = 0.0;
    for k in 0..=400 {
        let w = 1.0 + k as f64 / 400.0;
        let p = CollarPoint::new(CollarSide::Flange, 1.0, w, 0.0)?;
        let kv = smoothing::kappa(ctx, &p)?;
        max_kappa = max_kappa.max(kv);
        if w >= 1.5 {
            zero_violation = zero_violation.max(kv.abs());
        }
        let r = k as f64 / 400.0;
        let p = CollarPoint::new(CollarSide::Handle, r, 1.0, 0.0)?;
        let kv = smoothing::kappa(ctx, &p)?;
        max_kappa = max_kappa.max(kv);
        if r <= 0.5 {
            zero_violation = zero_violation.max(kv.abs());
        }
    }
    cs.at_most("smoothing.kappa_max", max_kappa, golden::PHI_ZERO + 1e-12);
    cs.at_most("smoothing.kappa_zero_regions", zero_violation, 0.0);
    cs.at_most("smoothing.kappa_below_quarter", max_kappa, 0.25);

    // profile: C1 junctions, no sample-scale corner, bounded curvature
    let defects = smoothing::junction_defects(ctx, &params, 1e-4);
    cs.at_most(
        "smoothing.profile_junction_c1",
        defects.iter().fold(0.0f64, |a, d| a.max(*d)),
        1e-6,
    );
    let curve = smoothing::smoothed_boundary_profile(ctx, &params, 1024)?;
    let pts: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .map(|s| (s.r, s.w))
        .collect();
    let mut max_angle: f64 = 0.0;
    for k in 1..pts.len() - 1 {
        let a = (pts[k].0 - pts[k - 1].0, pts[k].1 - pts[k - 1].1);
        let b = (pts[k + 1].0 - pts[k].0, pts[k + 1].1 - pts[k].1);
        let (na, nb) = ((a.0 * a.0 + a.1 * a.1).sqrt(), (b.0 * b.0 + b.1 * b.1).sqrt());
        if na < 1e-14 || nb < 1e-14 {
            continue;
        }
        let dot = ((a.0 * b.0 + a.1 * b.1) / (na * nb)).clamp(-1.0, 1.0);
        max_angle = max_angle.max(dot.acos());
    }
    cs.at_most("smoothing.profile_turn_angle", max_angle, 0.05);
    // corner strictly rounded
    let corner_img = smoothing::profile_handle(ctx, &params, 1.0);
    let dist = (corner_img.r - 1.0).abs().max((corner_img.w - 1.0).abs());
    cs.at_least(
        "smoothing.profile_corner_rounded",
        dist,
        golden::PHI_ZERO / 2.0,
    );

    // injectivity of the deformation at fixed t
    let inj = smoothing::injectivity_audit(ctx, &params, 0.2, 10_000, opts.seed ^ 0x51)?;
    cs.at_least("smoothing.psi_injectivity_margin", inj.min_image_distance, 1e-9);
    Ok(cs.into_checks())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        let opts = SuiteOptions::default();
        assert!(matches!(
            run_suite("nope", &opts),
            Err(HarnessError::UnknownSuite(_))
        ));
    }

    #[test]
    fn kernels_suite_passes() {
        let opts = SuiteOptions::default();
        let rep = run_suite("kernels", &opts).unwrap();
        assert!(rep.pass(), "{}", rep.render_text());
    }

    #[test]
    fn reports_are_deterministic_for_fixed_seed() {
        let opts = SuiteOptions {
            seed: 42,
            ..Default::default()
        };
        let a = run_suite("kernels", &opts).unwrap().to_csv();
        let b = run_suite("kernels", &opts).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn all_suite_passes() {
        let opts = SuiteOptions::default();
        let rep = run_suite("all", &opts).unwrap();
        assert!(rep.pass(), "{}", rep.render_text());
        assert!(rep.checks.len() > 60);
    }
}
