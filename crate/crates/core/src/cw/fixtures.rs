//! Worked example complexes: the clamped interval, the thin n-disk quotient,
//! a fat 2-sphere, thin imports of classical complexes, and small synthetic
//! tables for bound checks.

use super::{
    import_smooth_cw, AttachFn, BasePoints, CellSpec, ClassicalCell, ComplexPoint, ComplexSpec,
    CwError, FlangeSampler, MarginCover, MarginFn,
};
use crate::geometry::HandlePoint;
use crate::kernels::KernelContext;
use rand::Rng;
use std::sync::Arc;

/// The interval as a thin complex: two base vertices and one 1-cell whose
/// flange `|u| >= 1` attaches by sign. Realizes the clamp quotient of the
/// line onto [0, 1].
pub fn iota() -> Arc<ComplexSpec> {
    let attach: Arc<AttachFn> = Arc::new(|hp: &HandlePoint| {
        Ok(ComplexPoint::Base(if hp.u[0] >= 0.0 { 1 } else { 0 }))
    });
    let sampler: Arc<FlangeSampler> = Arc::new(|rng| {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let r: f64 = 1.0 + rng.gen_range(0.0..2.0);
        HandlePoint::new(vec![sign * r], vec![])
    });
    Arc::new(
        ComplexSpec::new(
            Some(BasePoints {
                ids: vec!["vertex0".into(), "vertex1".into()],
            }),
            vec![CellSpec {
                level: 1,
                id: "arc".into(),
                m: 0,
                attach: Some(attach),
                flange_sampler: Some(sampler),
            }],
        )
        .expect("iota fixture"),
    )
}

/// The thin disk quotient: one 0-cell and one n-cell with constant
/// attaching map. Topologically a sphere; the non-smooth witness curve
/// lives here.
pub fn tdn(n: usize) -> Arc<ComplexSpec> {
    assert!(n >= 1);
    let attach: Arc<AttachFn> = Arc::new(|_hp: &HandlePoint| {
        Ok(ComplexPoint::Cell {
            level: 0,
            cell: 0,
            point: HandlePoint::new(vec![], vec![]),
        })
    });
    Arc::new(
        ComplexSpec::new(
            None,
            vec![
                CellSpec {
                    level: 0,
                    id: "pole".into(),
                    m: 0,
                    attach: None,
                    flange_sampler: None,
                },
                CellSpec {
                    level: n,
                    id: "cell".into(),
                    m: 0,
                    attach: Some(attach),
                    flange_sampler: None,
                },
            ],
        )
        .expect("tdn fixture"),
    )
}

/// Radius profile of the fat 2-sphere attaching map: smooth, strictly
/// decreasing, g(1) = 1, g -> 1/2. The flange of the 2-cell wraps onto the
/// open annulus 1/2 < ||w|| <= 1 of the 0-cell disk.
pub fn fat_s2_profile(r: f64) -> f64 {
    0.5 + 0.5 / r
}

/// Inverse of [`fat_s2_profile`] on (1/2, 1].
pub fn fat_s2_profile_inv(w: f64) -> f64 {
    1.0 / (2.0 * w - 1.0)
}

/// A fat 2-sphere: a 0-cell `D^2` and a 2-cell `R^2` glued along
/// `u -> g(||u||) u/||u||`.
pub fn fat_s2() -> Arc<ComplexSpec> {
    let attach: Arc<AttachFn> = Arc::new(|hp: &HandlePoint| {
        let r = hp.ru();
        if r <= 0.0 {
            return Err(CwError::InvalidPoint("flange point with ||u|| = 0".into()));
        }
        let w = fat_s2_profile(r);
        Ok(ComplexPoint::Cell {
            level: 0,
            cell: 0,
            point: HandlePoint::new(vec![], hp.u.iter().map(|c| c * w / r).collect()),
        })
    });
    Arc::new(
        ComplexSpec::new(
            None,
            vec![
                CellSpec {
                    level: 0,
                    id: "cap".into(),
                    m: 2,
                    attach: None,
                    flange_sampler: None,
                },
                CellSpec {
                    level: 2,
                    id: "dome".into(),
                    m: 0,
                    attach: Some(attach),
                    flange_sampler: None,
                },
            ],
        )
        .expect("fat_s2 fixture"),
    )
}

/// Two-set margin cover of the fat 2-sphere. The lower margin is supported
/// strictly inside the cap (`||w|| < 0.9`), so near the seam the pulled-back
/// lower partition is constant; that makes the blend restrict to it exactly
/// on the flange.
pub fn fat_s2_cover(ctx: &Arc<KernelContext>) -> MarginCover {
    let c_up = ctx.clone();
    let upper: Arc<MarginFn> = Arc::new(move |p: &ComplexPoint| match p {
        ComplexPoint::Cell { level: 2, point, .. } => c_up.lambda(1.5 - point.ru()),
        ComplexPoint::Cell { level: 0, point, .. } => {
            let w = point.rv();
            if w <= 5.0 / 6.0 {
                0.0
            } else {
                c_up.lambda(1.5 - fat_s2_profile_inv(w))
            }
        }
        _ => 0.0,
    });
    let c_lo = ctx.clone();
    let lower: Arc<MarginFn> = Arc::new(move |p: &ComplexPoint| match p {
        ComplexPoint::Cell { level: 0, point, .. } => c_lo.lambda(5.0 * (0.9 - point.rv())),
        _ => 0.0,
    });
    MarginCover::new(vec![("upper".into(), upper), ("lower".into(), lower)])
}

/// Two-set margin cover of the interval: the open interior of the 1-cell
/// and the whole complex.
pub fn iota_cover(ctx: &Arc<KernelContext>) -> MarginCover {
    let c = ctx.clone();
    let interior: Arc<MarginFn> = Arc::new(move |p: &ComplexPoint| match p {
        ComplexPoint::Cell { point, .. } => c.lambda(2.0 - 2.0 * point.u[0] * point.u[0]),
        ComplexPoint::Base(_) => 0.0,
    });
    let whole: Arc<MarginFn> = Arc::new(|_| 1.0);
    MarginCover::new(vec![("interior".into(), interior), ("whole".into(), whole)])
}

/// Two-set margin cover of the chain complex. The core margin rides the
/// collar zones of the higher cells, so the pulled-back partition component
/// stays subordinate to it; the attach images all land on the radius-0.3
/// circle of the disk, where the lower partition is constant, which keeps
/// the flange restriction exact.
pub fn double_flange_chain_cover(ctx: &Arc<KernelContext>) -> MarginCover {
    let c1 = ctx.clone();
    let core: Arc<MarginFn> = Arc::new(move |p: &ComplexPoint| match p {
        ComplexPoint::Cell { level: 0, point, .. } => {
            c1.lambda(2.0 - 6.0 * point.rv() * point.rv())
        }
        ComplexPoint::Cell { point, .. } => c1.lambda(4.0 * point.ru() - 2.0),
        _ => 0.0,
    });
    let c2 = ctx.clone();
    let sheet: Arc<MarginFn> = Arc::new(move |p: &ComplexPoint| match p {
        ComplexPoint::Cell { level: 0, point, .. } => {
            c2.lambda(6.0 * point.rv() * point.rv() - 1.0)
        }
        _ => 1.0,
    });
    MarginCover::new(vec![("core".into(), core), ("sheet".into(), sheet)])
}

/// A three-level chain whose 2-cell attaches into the 1-cell's flange, which
/// in turn attaches into the 0-cell's disk interior: normalization has to
/// descend twice.
pub fn double_flange_chain() -> Arc<ComplexSpec> {
    let attach1: Arc<AttachFn> = Arc::new(|hp: &HandlePoint| {
        let w = hp.v[0];
        Ok(ComplexPoint::Cell {
            level: 0,
            cell: 0,
            point: HandlePoint::new(vec![], vec![0.3 * w.sin(), 0.3 * w.cos()]),
        })
    });
    let attach2: Arc<AttachFn> = Arc::new(|hp: &HandlePoint| {
        let r = hp.ru();
        // lands on the 1-cell's flange (|u| > 1), forcing another descent
        Ok(ComplexPoint::Cell {
            level: 1,
            cell: 0,
            point: HandlePoint::new(vec![1.0 + 1.0 / (1.0 + r)], vec![0.5 * hp.u[0] / r]),
        })
    });
    Arc::new(
        ComplexSpec::new(
            None,
            vec![
                CellSpec {
                    level: 0,
                    id: "disk".into(),
                    m: 2,
                    attach: None,
                    flange_sampler: None,
                },
                CellSpec {
                    level: 1,
                    id: "strip".into(),
                    m: 1,
                    attach: Some(attach1),
                    flange_sampler: None,
                },
                CellSpec {
                    level: 2,
                    id: "sheet".into(),
                    m: 0,
                    attach: Some(attach2),
                    flange_sampler: None,
                },
            ],
        )
        .expect("chain fixture"),
    )
}

/// Classical circle (one 0-cell, one 1-cell) imported as a thin complex;
/// the attaching map is constant, so the import's ray projection is easy to
/// observe.
pub fn thin_circle() -> Arc<ComplexSpec> {
    let zero_cell = ComplexPoint::Cell {
        level: 0,
        cell: 0,
        point: HandlePoint::new(vec![], vec![]),
    };
    Arc::new(
        import_smooth_cw(
            None,
            vec![
                ClassicalCell {
                    level: 0,
                    id: "pt".into(),
                    attach: None,
                },
                ClassicalCell {
                    level: 1,
                    id: "loop".into(),
                    attach: Some(Arc::new(move |_dir: &[f64]| Ok(zero_cell.clone()))),
                },
            ],
        )
        .expect("thin circle"),
    )
}

/// Classical 2-sphere (one 0-cell, one 2-cell) imported as a thin complex.
pub fn thin_s2() -> Arc<ComplexSpec> {
    let zero_cell = ComplexPoint::Cell {
        level: 0,
        cell: 0,
        point: HandlePoint::new(vec![], vec![]),
    };
    Arc::new(
        import_smooth_cw(
            None,
            vec![
                ClassicalCell {
                    level: 0,
                    id: "pt".into(),
                    attach: None,
                },
                ClassicalCell {
                    level: 2,
                    id: "shell".into(),
                    attach: Some(Arc::new(move |_dir: &[f64]| Ok(zero_cell.clone()))),
                },
            ],
        )
        .expect("thin s2"),
    )
}

/// Synthetic cell table from (level, multiplicity) pairs, with dummy
/// attaching maps into a single base point. Used for bound checks only.
pub fn table_for_wdim(cells: &[(usize, usize)]) -> Arc<ComplexSpec> {
    let specs = cells
        .iter()
        .enumerate()
        .map(|(i, &(level, m))| {
            let attach: Option<Arc<AttachFn>> = if level > 0 {
                Some(Arc::new(|_hp: &HandlePoint| Ok(ComplexPoint::Base(0))))
            } else {
                None
            };
            CellSpec {
                level,
                id: format!("cell{i}"),
                m,
                attach,
                flange_sampler: None,
            }
        })
        .collect();
    Arc::new(
        ComplexSpec::new(
            Some(BasePoints {
                ids: vec!["anchor".into()],
            }),
            specs,
        )
        .expect("wdim table"),
    )
}
