//! Finite fat CW complexes as data: cell tables with attaching-map
//! evaluators, point normal forms for the pushout identifications, the weak
//! dimension bound, partition-of-unity construction over margin covers, and
//! separating functions.
//!
//! A complex is a base space (an optional finite point set here) plus cells
//! grouped by level; the level-`n` cell with multiplicity `m` carries the
//! handle `D^{n,m}`, whose flange `||u|| >= 1` is glued by the attaching
//! evaluator into strictly lower levels. A point is either a base point or
//! `(level, cell, handle point)`; the canonical representative pushes flange
//! points down until the handle point is interior.

pub mod fixtures;

use crate::geometry::{self, HandlePoint};
use crate::kernels::KernelContext;
use crate::sampling;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

/// Points with `||u|| >= 1 - FLANGE_TOL` count as flange points and are
/// pushed down by normalization.
pub const FLANGE_TOL: f64 = 1e-12;
/// Euclidean tolerance for point equality within one cell.
pub const POINT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CwError {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid complex spec: {0}")]
    InvalidSpec(String),
    #[error("margins do not cover the complex: sum of margins vanishes at {at}")]
    NotACover { at: String },
    #[error("blend degenerate at {at}: sum of blended weights vanishes (shrink collar_delta)")]
    BlendDegenerate { at: String },
    #[error("attaching map failed: {0}")]
    AttachFailed(String),
}

pub type AttachFn = dyn Fn(&HandlePoint) -> Result<ComplexPoint, CwError> + Send + Sync;
pub type FlangeSampler = dyn Fn(&mut ChaCha8Rng) -> HandlePoint + Send + Sync;
/// Margin evaluators receive points in normal form and must be total.
pub type MarginFn = dyn Fn(&ComplexPoint) -> f64 + Send + Sync;

/// One cell: level `n`, thickening multiplicity `m`, and the attaching
/// evaluator on the flange (absent exactly when `n = 0`, where the flange is
/// empty). An optional sampler generates flange points for audits.
#[derive(Clone)]
pub struct CellSpec {
    pub level: usize,
    pub id: String,
    pub m: usize,
    pub attach: Option<Arc<AttachFn>>,
    pub flange_sampler: Option<Arc<FlangeSampler>>,
}

impl std::fmt::Debug for CellSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CellSpec")
            .field("level", &self.level)
            .field("id", &self.id)
            .field("m", &self.m)
            .field("attach", &self.attach.is_some())
            .finish()
    }
}

/// Finite base space: labeled points.
#[derive(Debug, Clone)]
pub struct BasePoints {
    pub ids: Vec<String>,
}

/// Cell table of a finite fat CW complex.
pub struct ComplexSpec {
    base: Option<BasePoints>,
    cells: Vec<CellSpec>,
    by_level: Vec<Vec<usize>>,
    max_level: usize,
}

impl std::fmt::Debug for ComplexSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexSpec")
            .field("base", &self.base)
            .field("cells", &self.cells)
            .field("max_level", &self.max_level)
            .finish()
    }
}

impl ComplexSpec {
    pub fn new(base: Option<BasePoints>, cells: Vec<CellSpec>) -> Result<Self, CwError> {
        if base.is_none() && cells.is_empty() {
            return Err(CwError::InvalidSpec("empty complex".into()));
        }
        let max_level = cells.iter().map(|c| c.level).max().unwrap_or(0);
        let mut by_level = vec![Vec::new(); max_level + 1];
        for (i, c) in cells.iter().enumerate() {
            if c.level == 0 && c.attach.is_some() {
                return Err(CwError::InvalidSpec(format!(
                    "cell {} has level 0 but an attaching map (the flange is empty)",
                    c.id
                )));
            }
            if c.level > 0 && c.attach.is_none() {
                return Err(CwError::InvalidSpec(format!(
                    "cell {} at level {} needs an attaching map",
                    c.id, c.level
                )));
            }
            by_level[c.level].push(i);
        }
        Ok(Self {
            base,
            cells,
            by_level,
            max_level,
        })
    }

    pub fn base(&self) -> Option<&BasePoints> {
        self.base.as_ref()
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn cells(&self) -> &[CellSpec] {
        &self.cells
    }

    /// Indices (into `cells`) of the cells at a level.
    pub fn level_cells(&self, level: usize) -> &[usize] {
        self.by_level.get(level).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn cell(&self, level: usize, cell: usize) -> Result<&CellSpec, CwError> {
        self.by_level
            .get(level)
            .and_then(|v| v.get(cell))
            .map(|&i| &self.cells[i])
            .ok_or_else(|| CwError::InvalidPoint(format!("no cell ({level}, {cell})")))
    }
}

/// A tagged point of the complex.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexPoint {
    Base(usize),
    Cell {
        level: usize,
        cell: usize,
        point: HandlePoint,
    },
}

impl ComplexPoint {
    /// Level of the skeleton the point lives in; the base counts as -1.
    pub fn rank(&self) -> i64 {
        match self {
            ComplexPoint::Base(_) => -1,
            ComplexPoint::Cell { level, .. } => *level as i64,
        }
    }
}

fn check_point(spec: &ComplexSpec, p: &ComplexPoint) -> Result<(), CwError> {
    match p {
        ComplexPoint::Base(i) => {
            let n = spec.base().map(|b| b.ids.len()).unwrap_or(0);
            if *i >= n {
                return Err(CwError::InvalidPoint(format!("base index {i} out of range")));
            }
        }
        ComplexPoint::Cell { level, cell, point } => {
            let cs = spec.cell(*level, *cell)?;
            let (du, dv) = point.dims();
            if du != *level || dv != cs.m {
                return Err(CwError::InvalidPoint(format!(
                    "cell ({level}, {cell}) expects dims ({level}, {}), got ({du}, {dv})",
                    cs.m
                )));
            }
        }
    }
    Ok(())
}

/// Canonical representative under the pushout identifications: flange points
/// (`||u|| >= 1 - FLANGE_TOL`) are replaced by their attach image,
/// recursively. Idempotent; terminates because levels strictly descend.
pub fn normalize(spec: &ComplexSpec, p: &ComplexPoint) -> Result<ComplexPoint, CwError> {
    let mut cur = p.clone();
    for _ in 0..=spec.max_level() + 1 {
        check_point(spec, &cur)?;
        match &cur {
            ComplexPoint::Base(_) => return Ok(cur),
            ComplexPoint::Cell { level, cell, point } => {
                if *level == 0 || point.ru() < 1.0 - FLANGE_TOL {
                    return Ok(cur);
                }
                let cs = spec.cell(*level, *cell)?;
                let attach = cs
                    .attach
                    .as_ref()
                    .ok_or_else(|| CwError::InvalidSpec(format!("cell {} lacks attach", cs.id)))?;
                let next = attach(point)?;
                if next.rank() >= cur.rank() {
                    return Err(CwError::InvalidSpec(format!(
                        "attach of cell {} does not descend levels",
                        cs.id
                    )));
                }
                cur = next;
            }
        }
    }
    Err(CwError::InvalidSpec("normalization did not terminate".into()))
}

/// Distance between normal forms when comparable: same cell compares
/// euclidean in (u, v); base points compare by identity. Incomparable pairs
/// (different cells or levels) yield `None`.
pub fn point_distance(
    spec: &ComplexSpec,
    a: &ComplexPoint,
    b: &ComplexPoint,
) -> Result<Option<f64>, CwError> {
    let na = normalize(spec, a)?;
    let nb = normalize(spec, b)?;
    Ok(match (&na, &nb) {
        (ComplexPoint::Base(i), ComplexPoint::Base(j)) => {
            if i == j {
                Some(0.0)
            } else {
                None
            }
        }
        (
            ComplexPoint::Cell { level: la, cell: ca, point: pa },
            ComplexPoint::Cell { level: lb, cell: cb, point: pb },
        ) if la == lb && ca == cb => {
            let du: f64 = pa
                .u
                .iter()
                .zip(&pb.u)
                .chain(pa.v.iter().zip(&pb.v))
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            Some(du.sqrt())
        }
        _ => None,
    })
}

pub fn points_equal(
    spec: &ComplexSpec,
    a: &ComplexPoint,
    b: &ComplexPoint,
    tol: f64,
) -> Result<bool, CwError> {
    Ok(matches!(point_distance(spec, a, b)?, Some(d) if d <= tol))
}

/// Weak-dimension bound `max over levels k of (max_j m_k(j) + k)`.
/// For a thin complex (all m = 0) this is the top nonempty level.
pub fn wdim_bound(spec: &ComplexSpec) -> usize {
    spec.cells().iter().map(|c| c.m + c.level).max().unwrap_or(0)
}

/// `pi_set(t) = max(0, min(t, 1))`: the idempotent clamp onto [0, 1].
pub fn pi_set(t: f64) -> f64 {
    t.clamp(0.0, 1.0)
}

/// `pi^n_set(v)`: identity on the unit disk, radial projection outside.
pub fn pi_n_set(v: &[f64]) -> Vec<f64> {
    let n = geometry::norm(v);
    if n <= 1.0 {
        v.to_vec()
    } else {
        v.iter().map(|c| c / n).collect()
    }
}

/// Attaching map of a classical smooth-CW cell, evaluated on the unit
/// sphere `S^{n-1}`.
pub type SphereAttachFn = dyn Fn(&[f64]) -> Result<ComplexPoint, CwError> + Send + Sync;

/// A classical smooth-CW cell.
#[derive(Clone)]
pub struct ClassicalCell {
    pub level: usize,
    pub id: String,
    pub attach: Option<Arc<SphereAttachFn>>,
}

/// Import a smooth CW complex as a thin fat complex (`m = 0` throughout):
/// the fat attaching maps precompose the classical ones with the radial
/// projection `u -> u/||u||`, so they are constant along rays.
pub fn import_smooth_cw(
    base: Option<BasePoints>,
    classical: Vec<ClassicalCell>,
) -> Result<ComplexSpec, CwError> {
    let cells = classical
        .into_iter()
        .map(|c| {
            let attach = c.attach.map(|f| {
                let wrapped: Arc<AttachFn> = Arc::new(move |hp: &HandlePoint| {
                    let r = hp.ru();
                    if r <= 0.0 {
                        return Err(CwError::InvalidPoint("flange point with ||u|| = 0".into()));
                    }
                    let dir: Vec<f64> = hp.u.iter().map(|c| c / r).collect();
                    f(&dir)
                });
                wrapped
            });
            CellSpec {
                level: c.level,
                id: c.id,
                m: 0,
                attach,
                flange_sampler: None,
            }
        })
        .collect();
    ComplexSpec::new(base, cells)
}

/// The lift of the non-smooth witness curve into R^n:
/// `psi_0(phi_0(t)) = (1 - sqrt(max(0, t))) e`.
fn witness_lift(n: usize, t: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = 1.0 - t.max(0.0).sqrt();
    v
}

/// Evaluate the witness curve `f = pi_n . psi_0 . phi_0` in a thin
/// one-0-cell/one-n-cell complex, together with a finite-difference estimate
/// of the lift's speed at `t`. The speed blows up like `t^{-1/2}` as
/// `t -> 0+`, which is the failure of smoothness the curve exhibits.
pub fn nonreflexivity_witness(
    spec: &ComplexSpec,
    t: f64,
) -> Result<(ComplexPoint, f64), CwError> {
    let n = spec.max_level();
    if n == 0 || spec.level_cells(n).is_empty() {
        return Err(CwError::InvalidSpec("witness needs a top cell of level >= 1".into()));
    }
    if !(-1.0..1.0).contains(&t) {
        return Err(CwError::InvalidPoint(format!("witness parameter {t} outside (-1, 1)")));
    }
    let value = normalize(
        spec,
        &ComplexPoint::Cell {
            level: n,
            cell: 0,
            point: HandlePoint::new(witness_lift(n, t), Vec::new()),
        },
    )?;
    let h = if t > 0.0 { t * 1e-2 } else { 1e-8 };
    let fwd = witness_lift(n, t + h);
    let bwd = witness_lift(n, t - h);
    let slope = fwd
        .iter()
        .zip(&bwd)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
        / (2.0 * h);
    Ok((value, slope))
}

// --- regularity diagnostics ---------------------------------------------------

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub cell_id: String,
    pub pairs_checked: usize,
    /// pairs at domain distance >= 1e-3 whose attach images coincide within
    /// POINT_TOL
    pub collisions: usize,
    /// smallest image distance among well-separated domain pairs
    /// (infinite when all images were incomparable)
    pub min_image_distance: f64,
    pub interior_samples: usize,
    pub boundary_samples: usize,
    /// sampling evidence only; regularity has no finite certificate
    pub heuristic: &'static str,
}

fn default_flange_sampler(n: usize, m: usize) -> Arc<FlangeSampler> {
    Arc::new(move |rng: &mut ChaCha8Rng| {
        let dir = sampling::unit_vector(rng, n);
        let r = 1.0 + rng.gen_range(0.0..2.0);
        let u = dir.into_iter().map(|c| c * r).collect();
        let v = sampling::scaled_vector(rng, m, 0.7);
        HandlePoint::new(u, v)
    })
}

/// Sample-based diagnostics for the regularity of one cell's attaching map:
/// pairwise injectivity of the attach on flange samples, plus
/// interior/boundary tagging of the cell's own points against the interior
/// recursion (a point whose handle defect is positive is covered by its own
/// characteristic map). Explicitly a heuristic, not a proof.
pub fn regularity_probe(
    ctx: &KernelContext,
    spec: &ComplexSpec,
    level: usize,
    cell: usize,
    sample_pairs: usize,
    seed: u64,
) -> Result<RegularityReport, CwError> {
    let cs = spec.cell(level, cell)?;
    if level == 0 {
        return Err(CwError::InvalidSpec("level-0 cells have no attaching map".into()));
    }
    let sampler = cs
        .flange_sampler
        .clone()
        .unwrap_or_else(|| default_flange_sampler(level, cs.m));
    let attach = cs.attach.as_ref().unwrap();
    let mut rng = sampling::rng(seed);
    let count = ((2.0 * sample_pairs as f64).sqrt().ceil() as usize).max(8);
    let mut domain = Vec::with_capacity(count);
    let mut image = Vec::with_capacity(count);
    for _ in 0..count {
        let hp = sampler(&mut rng);
        image.push(attach(&hp)?);
        domain.push(hp);
    }
    let mut pairs = 0;
    let mut collisions = 0;
    let mut min_image = f64::INFINITY;
    for i in 0..count {
        for j in (i + 1)..count {
            pairs += 1;
            let dd: f64 = domain[i]
                .u
                .iter()
                .zip(&domain[j].u)
                .chain(domain[i].v.iter().zip(&domain[j].v))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dd < 1e-3 {
                continue;
            }
            if let Some(di) = point_distance(spec, &image[i], &image[j])? {
                min_image = min_image.min(di);
                if di <= POINT_TOL {
                    collisions += 1;
                }
            }
        }
    }
    // interior/boundary tagging of the cell's own sample points
    let hspec = geometry::HandleSpec::new(level, cs.m)
        .map_err(|e| CwError::InvalidSpec(e.to_string()))?;
    let mut interior = 0;
    let mut boundary = 0;
    for _ in 0..64 {
        let u = sampling::ball_point(&mut rng, level, 0.999);
        let v = sampling::ball_point(&mut rng, cs.m, 1.0);
        let hp = HandlePoint::new(u, v);
        let d = geometry::defect(ctx, &hspec, &hp)
            .map_err(|e| CwError::InvalidPoint(e.to_string()))?;
        if d > geometry::DEFECT_TOL {
            interior += 1;
        } else if d.abs() <= geometry::DEFECT_TOL {
            boundary += 1;
        }
    }
    Ok(RegularityReport {
        cell_id: cs.id.clone(),
        pairs_checked: pairs,
        collisions,
        min_image_distance: min_image,
        interior_samples: interior,
        boundary_samples: boundary,
        heuristic: "sampling evidence only; not a proof of regularity",
    })
}

// --- partition of unity --------------------------------------------------------

/// A finite open cover given by smooth nonnegative margin functions; the
/// open set is where its margin is positive.
pub struct MarginCover {
    entries: Vec<(String, Arc<MarginFn>)>,
}

impl MarginCover {
    pub fn new(entries: Vec<(String, Arc<MarginFn>)>) -> Self {
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|(id, _)| id.as_str()).collect()
    }

    fn values(&self, p: &ComplexPoint) -> Vec<f64> {
        self.entries.iter().map(|(_, f)| f(p)).collect()
    }
}

/// Per-cell blend pieces, retained for audit.
#[derive(Debug, Clone)]
pub struct BlendComponents {
    pub chi1: f64,
    pub chi2: f64,
    pub sigma_hat: Vec<f64>,
    pub rho_hat: Vec<f64>,
    pub sigma_check: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Smooth partition of unity subordinate to a margin cover, built
/// inductively over levels: level 0 is Shepard normalization of the
/// margins; each higher cell blends the pulled-back lower partition
/// (extended through the flange retraction) with the intrinsic Shepard
/// weights, through the collar bump pair (chi1, chi2).
pub struct PartitionOfUnity {
    ctx: Arc<KernelContext>,
    spec: Arc<ComplexSpec>,
    cover: Arc<MarginCover>,
    collar_delta: f64,
}

impl PartitionOfUnity {
    pub fn set_ids(&self) -> Vec<&str> {
        self.cover.ids()
    }

    pub fn cover(&self) -> &MarginCover {
        &self.cover
    }

    pub fn spec(&self) -> &Arc<ComplexSpec> {
        &self.spec
    }

    fn margins_at(&self, p: &ComplexPoint) -> Result<Vec<f64>, CwError> {
        let nf = normalize(&self.spec, p)?;
        Ok(self.cover.values(&nf))
    }

    fn shepard(&self, vals: &[f64], at: &str) -> Result<Vec<f64>, CwError> {
        let sum: f64 = vals.iter().sum();
        if sum.is_nan() || sum <= 1e-100 {
            return Err(CwError::NotACover { at: at.to_string() });
        }
        Ok(vals.iter().map(|v| v / sum).collect())
    }

    /// `m_delta(r) = 1 + delta phi((r - 1)/delta)`: the phi-smoothed
    /// max(1, r), equal to r for `r >= 1 + delta/2` and to 1 below
    /// `1 - delta/2`.
    fn retraction_radius(&self, r: f64) -> f64 {
        let d = self.collar_delta;
        1.0 + d * self.ctx.phi((r - 1.0) / d)
    }

    /// Evaluate the blend pieces of one cell at explicit handle coordinates
    /// (no top-level normalization, so flange coordinates are legal input;
    /// margins and the pulled-back partition still evaluate on normal
    /// forms).
    pub fn components_at(
        &self,
        level: usize,
        cell: usize,
        hp: &HandlePoint,
    ) -> Result<BlendComponents, CwError> {
        let cs = self.spec.cell(level, cell)?;
        let here = ComplexPoint::Cell {
            level,
            cell,
            point: hp.clone(),
        };
        check_point(&self.spec, &here)?;
        let margins = self.margins_at(&here)?;
        let sigma_hat = self.shepard(&margins, &format!("cell {} margins", cs.id))?;
        let r = hp.ru();
        let chi2 = if level == 0 {
            0.0
        } else {
            self.ctx.lambda(4.0 * (r - 0.75))
        };
        let chi1 = 1.0 - chi2;
        let k = self.cover.len();
        let mut rho_hat = vec![0.0; k];
        if chi2 > 0.0 {
            let gate = self.ctx.lambda(2.0 * r - 1.0);
            if gate > 0.0 {
                let attach = cs
                    .attach
                    .as_ref()
                    .ok_or_else(|| CwError::InvalidSpec(format!("cell {} lacks attach", cs.id)))?;
                let scale = self.retraction_radius(r) / r;
                let retracted = HandlePoint::new(
                    hp.u.iter().map(|c| c * scale).collect(),
                    hp.v.clone(),
                );
                let target = attach(&retracted)?;
                let rho = self.eval_all(&target)?;
                for (out, r_u) in rho_hat.iter_mut().zip(rho) {
                    *out = gate * r_u;
                }
            }
        }
        let sigma_check: Vec<f64> = sigma_hat
            .iter()
            .zip(&rho_hat)
            .map(|(s, r_)| chi1 * s + chi2 * r_)
            .collect();
        let total: f64 = sigma_check.iter().sum();
        if total.is_nan() || total <= 1e-100 {
            return Err(CwError::BlendDegenerate {
                at: format!("cell {} at r = {r}", cs.id),
            });
        }
        let sigma = sigma_check.iter().map(|s| s / total).collect();
        Ok(BlendComponents {
            chi1,
            chi2,
            sigma_hat,
            rho_hat,
            sigma_check,
            sigma,
        })
    }

    /// All partition values at a point (normal form taken first). The
    /// values are nonnegative and sum to 1.
    pub fn eval_all(&self, p: &ComplexPoint) -> Result<Vec<f64>, CwError> {
        let nf = normalize(&self.spec, p)?;
        match &nf {
            ComplexPoint::Base(_) => {
                let margins = self.cover.values(&nf);
                self.shepard(&margins, "base point margins")
            }
            ComplexPoint::Cell { level, cell, point } => {
                Ok(self.components_at(*level, *cell, point)?.sigma)
            }
        }
    }

    pub fn eval(&self, set: usize, p: &ComplexPoint) -> Result<f64, CwError> {
        Ok(self.eval_all(p)?[set])
    }
}

/// Construct the partition and validate covering/nondegeneracy on a seeded
/// sample sweep of every base point and cell.
pub fn build_partition(
    ctx: &Arc<KernelContext>,
    spec: &Arc<ComplexSpec>,
    cover: MarginCover,
    collar_delta: f64,
) -> Result<PartitionOfUnity, CwError> {
    if !(collar_delta > 0.0 && collar_delta <= 0.5) {
        return Err(CwError::InvalidSpec(format!(
            "collar_delta {collar_delta} outside (0, 1/2]"
        )));
    }
    if cover.is_empty() {
        return Err(CwError::InvalidSpec("empty margin cover".into()));
    }
    let pou = PartitionOfUnity {
        ctx: ctx.clone(),
        spec: spec.clone(),
        cover: Arc::new(cover),
        collar_delta,
    };
    // construction-time sweep: raises NotACover / BlendDegenerate early
    let mut rng = sampling::rng(0xC0FF_EE00);
    if let Some(b) = pou.spec.base() {
        for i in 0..b.ids.len() {
            pou.eval_all(&ComplexPoint::Base(i))?;
        }
    }
    let spec_ref = pou.spec.clone();
    for level in 0..=spec_ref.max_level() {
        for cell in 0..spec_ref.level_cells(level).len() {
            let m = spec_ref.cell(level, cell)?.m;
            for _ in 0..24 {
                let u = sampling::ball_point(&mut rng, level, 0.999);
                let v = sampling::ball_point(&mut rng, m, 1.0);
                pou.components_at(level, cell, &HandlePoint::new(u, v))?;
            }
            if level > 0 {
                for _ in 0..24 {
                    let dir = sampling::unit_vector(&mut rng, level);
                    let r = 1.0 + rng.gen_range(0.0..2.0);
                    let u: Vec<f64> = dir.into_iter().map(|c| c * r).collect();
                    let v = sampling::ball_point(&mut rng, m, 1.0);
                    pou.components_at(level, cell, &HandlePoint::new(u, v))?;
                }
            }
        }
    }
    Ok(pou)
}

/// Audit numbers for a partition over a seeded sample sweep.
#[derive(Debug, Clone)]
pub struct PartitionAudit {
    pub samples: usize,
    /// max |sum - 1|
    pub max_sum_defect: f64,
    /// most negative value seen (>= 0 means all nonnegative)
    pub min_value: f64,
    /// largest partition value seen at a point where its margin vanishes
    pub subordination_violation: f64,
    /// max |blend at flange coordinates - pulled-back lower value|
    pub max_flange_mismatch: f64,
}

/// Sample the complex (interior and flange points of every cell, plus base
/// points) and measure the partition invariants.
pub fn audit_partition(
    pou: &PartitionOfUnity,
    samples: usize,
    seed: u64,
) -> Result<PartitionAudit, CwError> {
    let spec = pou.spec.clone();
    let mut rng = sampling::rng(seed);
    let mut audit = PartitionAudit {
        samples: 0,
        max_sum_defect: 0.0,
        min_value: 0.0,
        subordination_violation: 0.0,
        max_flange_mismatch: 0.0,
    };
    let record = |pou: &PartitionOfUnity, audit: &mut PartitionAudit, p: &ComplexPoint| -> Result<(), CwError> {
        let vals = pou.eval_all(p)?;
        let sum: f64 = vals.iter().sum();
        audit.max_sum_defect = audit.max_sum_defect.max((sum - 1.0).abs());
        let margins = pou.margins_at(p)?;
        for (v, m) in vals.iter().zip(&margins) {
            audit.min_value = audit.min_value.min(*v);
            if *v > 1e-12 && *m <= 0.0 {
                audit.subordination_violation = audit.subordination_violation.max(*v);
            }
        }
        audit.samples += 1;
        Ok(())
    };

    if let Some(b) = spec.base() {
        for i in 0..b.ids.len() {
            record(pou, &mut audit, &ComplexPoint::Base(i))?;
        }
    }
    let cell_list: Vec<(usize, usize, usize)> = (0..=spec.max_level())
        .flat_map(|l| {
            (0..spec.level_cells(l).len()).map(move |c| (l, c, 0))
        })
        .map(|(l, c, _)| (l, c, spec.cell(l, c).map(|cs| cs.m).unwrap_or(0)))
        .collect();
    if cell_list.is_empty() {
        return Ok(audit);
    }
    let mut k = 0;
    while audit.samples < samples {
        let (level, cell, m) = cell_list[k % cell_list.len()];
        k += 1;
        let flange = level > 0 && k % 2 == 0;
        if flange {
            let dir = sampling::unit_vector(&mut rng, level);
            let r = 1.0 + rng.gen_range(0.0..2.0);
            let u: Vec<f64> = dir.into_iter().map(|c| c * r).collect();
            let v = sampling::ball_point(&mut rng, m, 1.0);
            let hp = HandlePoint::new(u, v);
            let p = ComplexPoint::Cell { level, cell, point: hp.clone() };
            record(pou, &mut audit, &p)?;
            // seam agreement: blend evaluated at flange coordinates vs the
            // lower-level partition at the identified point
            let direct = pou.components_at(level, cell, &hp)?.sigma;
            let lower = pou.eval_all(&p)?;
            for (a, b) in direct.iter().zip(&lower) {
                audit.max_flange_mismatch = audit.max_flange_mismatch.max((a - b).abs());
            }
        } else {
            let u = sampling::ball_point(&mut rng, level, 0.999);
            let v = sampling::ball_point(&mut rng, m, 1.0);
            let p = ComplexPoint::Cell { level, cell, point: HandlePoint::new(u, v) };
            record(pou, &mut audit, &p)?;
        }
    }
    Ok(audit)
}

/// A smooth function positive at `a`, supported inside the margin set `U`:
/// the `U`-component of the partition for the two-set cover
/// `{U, complement of a}`.
pub struct SeparatingFunction {
    pou: PartitionOfUnity,
}

impl SeparatingFunction {
    pub fn eval(&self, p: &ComplexPoint) -> Result<f64, CwError> {
        self.pou.eval(0, p)
    }

    pub fn partition(&self) -> &PartitionOfUnity {
        &self.pou
    }
}

/// Build the separating function for a point `a` with `margin_u(a) > 0`.
/// The complement margin is the lambda-shaped squared distance to `a`
/// (incomparable points count as distance 1), which vanishes flat at `a`.
pub fn separating_function(
    ctx: &Arc<KernelContext>,
    spec: &Arc<ComplexSpec>,
    a: &ComplexPoint,
    margin_u: Arc<MarginFn>,
) -> Result<SeparatingFunction, CwError> {
    let a_nf = normalize(spec, a)?;
    if margin_u(&a_nf) <= 0.0 {
        return Err(CwError::InvalidSpec(
            "margin of the target set must be positive at the separated point".into(),
        ));
    }
    let ctx2 = ctx.clone();
    let spec2 = spec.clone();
    let a2 = a_nf.clone();
    let complement: Arc<MarginFn> = Arc::new(move |p: &ComplexPoint| {
        let d = point_distance(&spec2, p, &a2).ok().flatten().unwrap_or(1.0);
        ctx2.lambda(2.0 * d * d)
    });
    let cover = MarginCover::new(vec![
        ("target".to_string(), margin_u),
        ("complement".to_string(), complement),
    ]);
    let pou = build_partition(ctx, spec, cover, 0.25)?;
    Ok(SeparatingFunction { pou })
}
