//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured numbers. Tolerances are pinned here, not configurable.
//!
//! Run with `cargo test -p fatcw-cli --test acceptance -- --nocapture` to
//! see the per-criterion lines.

use fatcw::cw::{self, fixtures, ComplexPoint};
use fatcw::geometry::{self, HandlePoint, HandleSpec};
use fatcw::kernels::{KernelContext, SmoothingParams};
use fatcw::maps;
use fatcw::sampling;
use fatcw::smoothing::{self, CollarPoint, CollarSide};
use rand::Rng;
use std::sync::Arc;
use std::time::Instant;

const E43_ALPHA_8DIGIT: f64 = 0.55731493;
const GOLDEN_PHI_ZERO: f64 = 0.0783190805507909;

fn ctx() -> KernelContext {
    KernelContext::new().expect("kernel context")
}

struct Criterion {
    name: &'static str,
    budget_s: f64,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, budget_s: f64) -> Self {
        Self {
            name,
            budget_s,
            start: Instant::now(),
        }
    }

    fn finish(self, pass: bool, detail: String) {
        let elapsed = self.start.elapsed().as_secs_f64();
        println!(
            "{} {} [{elapsed:.2}s / {}s] {detail}",
            if pass { "PASS" } else { "FAIL" },
            self.name,
            self.budget_s
        );
        assert!(pass, "{} failed: {detail}", self.name);
        assert!(
            elapsed < self.budget_s,
            "{} exceeded its time budget: {elapsed:.2}s",
            self.name
        );
    }
}

#[test]
fn criterion_1_golden_constant() {
    let c = Criterion::new("criterion 1 (golden constant alpha)", 5.0);
    let k = ctx();
    let e43 = (4.0f64 / 3.0).exp() * k.alpha();
    let dev = (e43 - E43_ALPHA_8DIGIT).abs();
    c.finish(
        dev <= 5e-8 && e43 > 11.0 / 20.0,
        format!("e^(4/3) alpha = {e43:.10}, |dev| = {dev:.3e} <= 5e-8"),
    );
}

#[test]
fn criterion_2_kernel_identities() {
    let c = Criterion::new("criterion 2 (kernel identities)", 10.0);
    let k = ctx();
    let n = 10_000;
    let mut id_l: f64 = 0.0;
    let mut id_p: f64 = 0.0;
    let mut tail_p: f64 = 0.0;
    for i in 0..=n {
        let t = -2.0 + 5.0 * i as f64 / n as f64;
        id_l = id_l.max((k.lambda(t) + k.lambda(1.0 - t) - 1.0).abs());
        id_p = id_p.max((k.phi(t) - k.phi(-t) - t).abs());
        if t.abs() >= 0.5 {
            tail_p = tail_p.max((k.phi(t) + k.phi(-t) - t.abs()).abs());
        }
    }
    let half_dev = (k.lambda(0.5) - 0.5).abs();
    let phi0 = k.phi(0.0);
    let pass = id_l <= 1e-9
        && id_p <= 1e-9
        && tail_p <= 1e-9
        && half_dev <= 1e-10
        && phi0 > 0.0
        && phi0 < 0.125;
    c.finish(
        pass,
        format!(
            "lambda identity {id_l:.2e}, phi identity {id_p:.2e}, tail {tail_p:.2e}, \
             |lambda(1/2)-1/2| {half_dev:.2e}, phi(0) = {phi0:.6}"
        ),
    );
}

#[test]
fn criterion_3_derivative_bound() {
    let c = Criterion::new("criterion 3 (derivative bound)", 5.0);
    let k = ctx();
    let e43 = (4.0f64 / 3.0).exp() * k.alpha();
    let mut max_lp: f64 = 0.0;
    let mut argmax = 0.0;
    for i in 0..=1000 {
        let t = i as f64 / 1000.0;
        let lp = k.lambda_prime(t);
        if lp > max_lp {
            max_lp = lp;
            argmax = t;
        }
    }
    let dev = (max_lp - 1.0 / e43).abs();
    let params = SmoothingParams::default();
    let mut eps_slope: f64 = 0.0;
    let h = 1e-5;
    for i in 0..=4000 {
        let t = i as f64 / 4000.0;
        eps_slope =
            eps_slope.max((k.lambda_eps(&params, t + h) - k.lambda_eps(&params, t - h)) / (2.0 * h));
    }
    let pass = dev <= 1e-6
        && (argmax - 0.5).abs() <= 1e-3
        && max_lp < 20.0 / 11.0
        && eps_slope < 2.0;
    c.finish(
        pass,
        format!(
            "max lambda' = {max_lp:.8} at t = {argmax} (dev {dev:.2e}), \
             < 20/11 = {:.8}; lambda_eps slope {eps_slope:.6} < 2",
            20.0 / 11.0
        ),
    );
}

#[test]
fn criterion_4_boundary_characterization() {
    let c = Criterion::new("criterion 4 (boundary characterization)", 5.0);
    let k = ctx();
    let mut rng = sampling::rng(4);
    let mut worst: f64 = 0.0;
    for (n, m) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let spec = HandleSpec::new(n, m).unwrap();
        for i in 0..1000 {
            let t = -3.0 + 6.0 * i as f64 / 999.0;
            let du = sampling::unit_vector(&mut rng, n);
            let dv = sampling::unit_vector(&mut rng, m);
            let b = geometry::boundary_point(&k, &spec, t, &du, &dv).unwrap();
            worst = worst.max(geometry::defect(&k, &spec, &b).unwrap().abs());
        }
    }
    c.finish(
        worst <= 1e-9,
        format!("max boundary defect over 4 x 1000 samples = {worst:.3e} <= 1e-9"),
    );
}

#[test]
fn criterion_5_diffeomorphism_round_trip() {
    let c = Criterion::new("criterion 5 (diffeomorphism round trip)", 60.0);
    let k = ctx();
    let mut rng = sampling::rng(5);
    let mut rt: f64 = 0.0;
    for n in 1..=3usize {
        for m in 1..=3usize {
            let spec = HandleSpec::new(n, m).unwrap();
            for i in 0..10_000 {
                // Theta . Phi on domain points
                let u = sampling::scaled_vector(&mut rng, n, 1.8);
                let v = sampling::ball_point(&mut rng, m, 1.0);
                let q = maps::phi_map(&k, &spec, &u, &v).unwrap();
                let (u2, v2, _) = maps::theta_map(&k, &spec, &q).unwrap();
                for (a, b) in u.iter().zip(&u2).chain(v.iter().zip(&v2)) {
                    rt = rt.max((a - b).abs());
                }
                // Phi . Theta on independently generated handle points
                let q = if i % 2 == 0 {
                    let dir = sampling::unit_vector(&mut rng, n);
                    let r = 1.0 + rng.gen_range(0.0..2.0);
                    HandlePoint::new(
                        dir.iter().map(|c| c * r).collect(),
                        sampling::scaled_vector(&mut rng, m, 1.5),
                    )
                } else {
                    let u = sampling::scaled_vector(&mut rng, n, 2.0);
                    let v = sampling::ball_point(&mut rng, m, 1.0);
                    HandlePoint::new(u, v)
                };
                let (u3, v3, _) = maps::theta_map(&k, &spec, &q).unwrap();
                let back = maps::phi_map(&k, &spec, &u3, &v3).unwrap();
                for (a, b) in q.u.iter().zip(&back.u).chain(q.v.iter().zip(&back.v)) {
                    rt = rt.max((a - b).abs());
                }
            }
        }
    }
    let mut min_jac = f64::INFINITY;
    for i in 0..500 {
        let u = -3.0 + 6.0 * i as f64 / 499.0;
        for j in 0..200 {
            let v = -1.0 + 2.0 * j as f64 / 199.0;
            min_jac = min_jac.min(maps::phi11_jacobian(&k, u, v));
        }
    }
    let mut dual_fd: f64 = 0.0;
    let h = 1e-6;
    for _ in 0..10_000 {
        let u = rng.gen_range(-3.0..3.0);
        let v = rng.gen_range(-0.999..0.999);
        let (x1, y1) = maps::phi11(&k, u + h, v);
        let (x0, y0) = maps::phi11(&k, u - h, v);
        let (x3, y3) = maps::phi11(&k, u, v + h);
        let (x2, y2) = maps::phi11(&k, u, v - h);
        let fd = ((x1 - x0) / (2.0 * h)) * ((y3 - y2) / (2.0 * h))
            - ((x3 - x2) / (2.0 * h)) * ((y1 - y0) / (2.0 * h));
        dual_fd = dual_fd.max((maps::phi11_jacobian(&k, u, v) - fd).abs());
    }
    let pass = rt <= 1e-8 && min_jac > 0.0 && dual_fd <= 1e-6;
    c.finish(
        pass,
        format!(
            "round trip max {rt:.3e} <= 1e-8 (9 specs x 1e4), min Jacobian {min_jac:.4} > 0 \
             (1e5 grid), dual vs difference {dual_fd:.3e} <= 1e-6"
        ),
    );
}

#[test]
fn criterion_6_singular_homeomorphism() {
    let c = Criterion::new("criterion 6 (singular homeomorphism)", 30.0);
    let k = ctx();
    let mut wall_jac: f64 = 0.0;
    for i in 0..100 {
        let v = i as f64 / 99.0;
        wall_jac = wall_jac.max(maps::phi_hat_jacobian_defect(&k, v));
    }
    let p0 = maps::phi_hat_boundary_profile(0.0).abs();
    let p1 = (maps::phi_hat_boundary_profile(1.0) - 1.5).abs();
    // inversion round trip off a 1e-2 collar of the singular wall:
    // invert, re-apply, compare in the handle
    let spec = HandleSpec::new(2, 1).unwrap();
    let mut rng = sampling::rng(6);
    let mut rt: f64 = 0.0;
    for _ in 0..4000 {
        let mut ru: f64 = rng.gen_range(0.0..2.0);
        if (ru - 1.0).abs() < 1.01e-2 {
            ru = if ru < 1.0 { 1.0 - 1.2e-2 } else { 1.0 + 1.2e-2 };
        }
        let dir = sampling::unit_vector(&mut rng, 2);
        let u: Vec<f64> = dir.iter().map(|c| c * ru).collect();
        let v = vec![rng.gen_range(-1.0f64..1.0)];
        let q = maps::phi_hat_map(&k, &spec, &u, &v).unwrap();
        let (u2, v2, _) = maps::phi_hat_inverse(&k, &spec, &q).unwrap();
        let back = maps::phi_hat_map(&k, &spec, &u2, &v2).unwrap();
        for (a, b) in q.u.iter().zip(&back.u).chain(q.v.iter().zip(&back.v)) {
            rt = rt.max((a - b).abs());
        }
    }
    let pass = wall_jac <= 1e-6 && p0 <= 1e-10 && p1 <= 1e-10 && rt <= 1e-6;
    c.finish(
        pass,
        format!(
            "wall |Jacobian| max {wall_jac:.3e} <= 1e-6 (100 samples), profile endpoints \
             dev ({p0:.1e}, {p1:.1e}) <= 1e-10, inversion round trip {rt:.3e} <= 1e-6"
        ),
    );
}

#[test]
fn criterion_7_partition_of_unity() {
    let c = Criterion::new("criterion 7 (partition of unity)", 60.0);
    let k = Arc::new(ctx());
    let spec = fixtures::fat_s2();
    let cover = fixtures::fat_s2_cover(&k);
    let pou = cw::build_partition(&k, &spec, cover, 0.25).unwrap();
    let audit = cw::audit_partition(&pou, 10_000, 7).unwrap();
    let pass = audit.max_sum_defect <= 1e-9
        && audit.min_value >= 0.0
        && audit.subordination_violation <= 0.0
        && audit.max_flange_mismatch <= 1e-9;
    c.finish(
        pass,
        format!(
            "10^4 samples: sum defect {:.3e} <= 1e-9, min value {:.1e} >= 0, subordination \
             violation {:.1e}, flange restriction {:.3e} <= 1e-9",
            audit.max_sum_defect,
            audit.min_value,
            audit.subordination_violation,
            audit.max_flange_mismatch
        ),
    );
}

#[test]
fn criterion_8_collar_smoothing() {
    let c = Criterion::new("criterion 8 (collar smoothing)", 30.0);
    let k = ctx();
    let params = SmoothingParams::default();
    let overlaps = smoothing::overlap_audit(&k, &params, 1000, 9);
    let mono = smoothing::monotonicity_audit(
        &k,
        &params,
        &[-0.25, -0.125, 0.0, 0.125, 0.25],
        -1.0,
        3.0,
        4000,
    );
    let mut margin = f64::INFINITY;
    for row in &mono.rows {
        margin = margin
            .min(row.min_slope_f - row.bound)
            .min(row.min_slope_g - row.bound);
    }
    let corner = CollarPoint::new(CollarSide::Handle, 1.0, 1.0, 0.0).unwrap();
    let kappa_dev = (smoothing::kappa(&k, &corner).unwrap() - GOLDEN_PHI_ZERO).abs();
    let junctions = smoothing::junction_defects(&k, &params, 1e-4);
    let worst_junction = junctions.iter().fold(0.0f64, |a, d| a.max(*d));
    let curve = smoothing::smoothed_boundary_profile(&k, &params, 1024).unwrap();
    let mut max_angle: f64 = 0.0;
    for i in 1..curve.samples.len() - 1 {
        let p = &curve.samples;
        let a = (p[i].r - p[i - 1].r, p[i].w - p[i - 1].w);
        let b = (p[i + 1].r - p[i].r, p[i + 1].w - p[i].w);
        let (na, nb) = ((a.0 * a.0 + a.1 * a.1).sqrt(), (b.0 * b.0 + b.1 * b.1).sqrt());
        if na < 1e-14 || nb < 1e-14 {
            continue;
        }
        max_angle = max_angle.max((((a.0 * b.0 + a.1 * b.1) / (na * nb)).clamp(-1.0, 1.0)).acos());
    }
    let pass = overlaps.max_defect <= 1e-10
        && margin >= 0.0
        && kappa_dev <= 1e-10
        && worst_junction <= 1e-6
        && max_angle <= 0.05;
    c.finish(
        pass,
        format!(
            "overlap agreement {:.2e} <= 1e-10, slope margin {margin:.2e} >= 0, kappa corner \
             dev {kappa_dev:.2e} <= 1e-10, junction C1 defect {worst_junction:.2e} <= 1e-6, \
             max turn angle {max_angle:.4} rad (no sample-scale corner)",
            overlaps.max_defect
        ),
    );
}

#[test]
fn criterion_9_wdim_and_examples() {
    let c = Criterion::new("criterion 9 (w-dim bound and examples)", 20.0);
    let mut rng = sampling::rng(9);
    // randomized cell tables against the per-cell brute-force oracle
    let mut wdim_ok = true;
    for _ in 0..10 {
        let count = rng.gen_range(1..8usize);
        let table: Vec<(usize, usize)> = (0..count)
            .map(|_| (rng.gen_range(0..5usize), rng.gen_range(0..4usize)))
            .collect();
        let spec = fixtures::table_for_wdim(&table);
        let oracle = table.iter().map(|&(l, m)| l + m).max().unwrap();
        wdim_ok &= cw::wdim_bound(&spec) == oracle;
    }
    // normal forms idempotent on 1e5 points for the interval and the thin
    // disk quotient
    let iota = fixtures::iota();
    let tdn = fixtures::tdn(2);
    let mut idempotent = true;
    for _ in 0..100_000 {
        let p = ComplexPoint::Cell {
            level: 1,
            cell: 0,
            point: HandlePoint::new(vec![rng.gen_range(-4.0..4.0)], vec![]),
        };
        let once = cw::normalize(&iota, &p).unwrap();
        idempotent &= cw::normalize(&iota, &once).unwrap() == once;
    }
    for _ in 0..100_000 {
        let p = ComplexPoint::Cell {
            level: 2,
            cell: 0,
            point: HandlePoint::new(sampling::scaled_vector(&mut rng, 2, 1.0), vec![]),
        };
        let once = cw::normalize(&tdn, &p).unwrap();
        idempotent &= cw::normalize(&tdn, &once).unwrap() == once;
    }
    // witness slope exponent from a log-log fit over five decades
    let ts = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| {
            let (_, s) = cw::nonreflexivity_witness(&tdn, t).unwrap();
            (t.ln(), s.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let pass = wdim_ok && idempotent && (slope + 0.5).abs() <= 0.05;
    c.finish(
        pass,
        format!(
            "w-dim oracle agreement on 10 tables: {wdim_ok}; normal forms idempotent on \
             2 x 1e5 points: {idempotent}; witness slope {slope:.4} within -0.5 +/- 0.05"
        ),
    );
}
