//! Geometry emitters: CSV polylines of the handle boundary and the smoothed
//! collar profile, kernel-grid CSV, and watertight OBJ meshes of revolution
//! for the low-dimensional handle boundaries.

use crate::report::fmt_f64;
use fatcw::geometry::{self, HandleSpec};
use fatcw::kernels::{KernelContext, SmoothingParams};
use fatcw::smoothing;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Obj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitObject {
    /// radial polyline of the fat handle boundary (columns piece_tag,r,w)
    DBoundary,
    /// kernel grid (columns t,lambda,lambda_prime,phi)
    PhiGrid,
    /// the smoothed collar profile (columns piece_tag,r,w)
    SmoothedProfile,
    /// watertight OBJ surface of revolution of the handle boundary
    MeshOfRevolution,
}

impl EmitObject {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "d-boundary" => Some(Self::DBoundary),
            "phi-grid" => Some(Self::PhiGrid),
            "smoothed-profile" => Some(Self::SmoothedProfile),
            "mesh-of-revolution" => Some(Self::MeshOfRevolution),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmitRequest {
    pub object: EmitObject,
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub format: EmitFormat,
}

/// Boundary polyline of `D^{n,m}` in the radial (r, w) quadrant: the curve
/// `(1 - phi(-t), 1 + phi(t))` for `t` in [-1, t_max].
pub fn d_boundary_samples(
    ctx: &KernelContext,
    spec: &HandleSpec,
    samples: usize,
) -> Result<Vec<(String, f64, f64)>, EmitError> {
    if spec.m() == 0 || spec.n() == 0 {
        return Err(EmitError::InvalidParams(
            "boundary polyline needs n >= 1 and m >= 1".into(),
        ));
    }
    if samples < 2 {
        return Err(EmitError::InvalidParams("need at least 2 samples".into()));
    }
    let t_max = 3.0;
    let mut rows = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = -1.0 + (t_max + 1.0) * k as f64 / (samples - 1) as f64;
        let r = 1.0 - ctx.phi(-t);
        let w = 1.0 + ctx.phi(t);
        rows.push(("boundary".to_string(), r, w));
    }
    Ok(rows)
}

fn csv_rows(header: &str, rows: &[(String, f64, f64)]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (tag, a, b) in rows {
        out.push_str(&format!("{tag},{},{}\n", fmt_f64(*a), fmt_f64(*b)));
    }
    out
}

/// Triangle mesh with positions only.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Closed and edge-manifold: every undirected edge is shared by exactly
    /// two triangles, and orientations are consistent (each directed edge
    /// appears exactly once).
    pub fn is_watertight(&self) -> bool {
        use std::collections::HashMap;
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return false;
            }
            for e in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        directed.iter().all(|(&(a, b), &cnt)| {
            cnt == 1 && directed.get(&(b, a)).copied().unwrap_or(0) == 1
        })
    }

    pub fn write_obj<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]))?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

/// Revolve a profile around the z-axis. The profile runs in the (radius, z)
/// half-plane; an entry with radius 0 becomes a single apex vertex, and open
/// non-axis ends are capped with a fan to their rim center so the result is
/// closed.
fn revolve(profile: &[(f64, f64)], rings: usize) -> Result<Mesh, EmitError> {
    if profile.len() < 2 || rings < 3 {
        return Err(EmitError::InvalidParams(
            "revolution needs >= 2 profile points and >= 3 rings".into(),
        ));
    }
    let mut mesh = Mesh {
        vertices: Vec::new(),
        faces: Vec::new(),
    };
    // vertex layout: per profile row either one apex vertex or a ring
    let mut row_start = Vec::with_capacity(profile.len());
    let mut row_is_apex = Vec::with_capacity(profile.len());
    for &(r, z) in profile {
        row_start.push(mesh.vertices.len());
        if r.abs() < 1e-12 {
            row_is_apex.push(true);
            mesh.vertices.push([0.0, 0.0, z]);
        } else {
            row_is_apex.push(false);
            for k in 0..rings {
                let th = TAU * k as f64 / rings as f64;
                mesh.vertices.push([r * th.cos(), r * th.sin(), z]);
            }
        }
    }
    for i in 0..profile.len() - 1 {
        let (s0, s1) = (row_start[i], row_start[i + 1]);
        match (row_is_apex[i], row_is_apex[i + 1]) {
            (false, false) => {
                for k in 0..rings {
                    let k1 = (k + 1) % rings;
                    mesh.faces.push([s0 + k, s1 + k, s1 + k1]);
                    mesh.faces.push([s0 + k, s1 + k1, s0 + k1]);
                }
            }
            (true, false) => {
                for k in 0..rings {
                    let k1 = (k + 1) % rings;
                    mesh.faces.push([s0, s1 + k, s1 + k1]);
                }
            }
            (false, true) => {
                for k in 0..rings {
                    let k1 = (k + 1) % rings;
                    mesh.faces.push([s0 + k, s1, s0 + k1]);
                }
            }
            (true, true) => {
                return Err(EmitError::InvalidParams(
                    "profile degenerates to the axis twice in a row".into(),
                ));
            }
        }
    }
    // cap any open non-axis end with a fan to its rim center
    for (end, reverse) in [(0usize, true), (profile.len() - 1, false)] {
        if row_is_apex[end] {
            continue;
        }
        let (r, z) = profile[end];
        let _ = r;
        let center = mesh.vertices.len();
        mesh.vertices.push([0.0, 0.0, z]);
        let s = row_start[end];
        for k in 0..rings {
            let k1 = (k + 1) % rings;
            if reverse {
                mesh.faces.push([center, s + k, s + k1]);
            } else {
                mesh.faces.push([center, s + k1, s + k]);
            }
        }
    }
    Ok(mesh)
}

/// Mesh of the boundary of `D^{n,m}` for `n + m <= 3`:
///
/// * (2, 1): the upper boundary cup revolved around the v-axis, truncated
///   and capped at the far rim;
/// * (1, 2): the tube `|x| = 1 - phi(-t)`, `||v|| = 1 + phi(t)` revolved
///   around the u-axis, truncated and capped on both rims;
/// * (0, 3): the unit sphere (the boundary of the disk handle).
pub fn mesh_of_revolution(
    ctx: &KernelContext,
    n: usize,
    m: usize,
    samples: usize,
) -> Result<Mesh, EmitError> {
    let rows = samples.max(8);
    let rings = (2 * rows).max(16);
    match (n, m) {
        (2, 1) => {
            // profile in (||u||, v): apex at t = -1, rim at t = t_max
            let t_max = 2.0;
            let profile: Vec<(f64, f64)> = (0..=rows)
                .map(|k| {
                    let t = -1.0 + (t_max + 1.0) * k as f64 / rows as f64;
                    (1.0 - ctx.phi(-t), 1.0 + ctx.phi(t))
                })
                .collect();
            revolve(&profile, rings)
        }
        (1, 2) => {
            // profile in (||v||, x): two mirrored branches joined at x = 0
            let t_max = 2.0;
            let mut profile = Vec::with_capacity(2 * rows + 1);
            for k in 0..=(2 * rows) {
                let s = -t_max + 2.0 * t_max * k as f64 / (2 * rows) as f64;
                let x = s.signum() * (1.0 - ctx.phi(-s.abs()));
                let w = 1.0 + ctx.phi(s.abs());
                profile.push((w, x));
            }
            revolve(&profile, rings)
        }
        (0, 3) => {
            // boundary of D^{0,3} = D^3 is the unit sphere
            let profile: Vec<(f64, f64)> = (0..=rows)
                .map(|k| {
                    let th = std::f64::consts::PI * k as f64 / rows as f64;
                    (th.sin(), th.cos())
                })
                .collect();
            revolve(&profile, rings)
        }
        _ => Err(EmitError::InvalidParams(format!(
            "mesh-of-revolution supports (n, m) in {{(2,1), (1,2), (0,3)}}, got ({n}, {m})"
        ))),
    }
}

/// Render the requested object to a string (CSV) or byte buffer (OBJ) and
/// write it at `out`.
pub fn emit(ctx: &KernelContext, req: &EmitRequest, out: &Path) -> Result<(), EmitError> {
    let bytes: Vec<u8> = match (req.object, req.format) {
        (EmitObject::DBoundary, EmitFormat::Csv) => {
            let spec = HandleSpec::new(req.n, req.m)
                .map_err(|e| EmitError::InvalidParams(e.to_string()))?;
            let rows = d_boundary_samples(ctx, &spec, req.samples)?;
            // emitted points satisfy the boundary equation; double-check
            for (_, r, w) in &rows {
                let mut u = vec![0.0; req.n];
                u[0] = *r;
                let mut v = vec![0.0; req.m];
                v[0] = *w;
                let p = geometry::HandlePoint::new(u, v);
                let d = geometry::defect(ctx, &spec, &p)
                    .map_err(|e| EmitError::Internal(e.to_string()))?;
                if d.abs() > 1e-9 {
                    return Err(EmitError::Internal(format!(
                        "boundary sample off the boundary: defect {d}"
                    )));
                }
            }
            csv_rows("piece_tag,r,w", &rows).into_bytes()
        }
        (EmitObject::SmoothedProfile, EmitFormat::Csv) => {
            let params = SmoothingParams::default();
            let curve = smoothing::smoothed_boundary_profile(ctx, &params, req.samples.max(16))
                .map_err(|e| EmitError::InvalidParams(e.to_string()))?;
            let rows: Vec<(String, f64, f64)> = curve
                .samples
                .iter()
                .map(|s| (s.piece.as_str().to_string(), s.r, s.w))
                .collect();
            csv_rows("piece_tag,r,w", &rows).into_bytes()
        }
        (EmitObject::PhiGrid, EmitFormat::Csv) => {
            let mut out = String::from("t,lambda,lambda_prime,phi\n");
            let n = req.samples.max(2);
            for k in 0..n {
                let t = -2.0 + 5.0 * k as f64 / (n - 1) as f64;
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f64(t),
                    fmt_f64(ctx.lambda(t)),
                    fmt_f64(ctx.lambda_prime(t)),
                    fmt_f64(ctx.phi(t))
                ));
            }
            out.into_bytes()
        }
        (EmitObject::MeshOfRevolution, EmitFormat::Obj) => {
            let mesh = mesh_of_revolution(ctx, req.n, req.m, req.samples)?;
            if !mesh.is_watertight() {
                return Err(EmitError::Internal("generated mesh is not watertight".into()));
            }
            let mut buf = Vec::new();
            mesh.write_obj(&mut buf)?;
            buf
        }
        (EmitObject::MeshOfRevolution, EmitFormat::Csv) => {
            return Err(EmitError::InvalidParams(
                "mesh-of-revolution emits OBJ, pass --format obj".into(),
            ))
        }
        (_, EmitFormat::Obj) => {
            return Err(EmitError::InvalidParams(
                "only mesh-of-revolution emits OBJ".into(),
            ))
        }
    };
    std::fs::write(out, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> KernelContext {
        KernelContext::new().unwrap()
    }

    #[test]
    fn boundary_rows_satisfy_equation() {
        let c = ctx();
        let spec = HandleSpec::new(1, 1).unwrap();
        let rows = d_boundary_samples(&c, &spec, 512).unwrap();
        assert_eq!(rows.len(), 512);
        for (_, r, w) in rows {
            let d = r - 1.0 + c.phi(2.0 - r - w);
            assert!(d.abs() <= 1e-9);
        }
    }

    #[test]
    fn meshes_are_watertight() {
        let c = ctx();
        for (n, m) in [(2, 1), (1, 2), (0, 3)] {
            let mesh = mesh_of_revolution(&c, n, m, 24).unwrap();
            assert!(mesh.is_watertight(), "({n},{m})");
            assert!(mesh.faces.len() > 100);
        }
        assert!(mesh_of_revolution(&c, 3, 0, 24).is_err());
    }

    #[test]
    fn revolve_rejects_degenerate_input() {
        assert!(revolve(&[(1.0, 0.0)], 8).is_err());
        assert!(revolve(&[(0.0, 0.0), (0.0, 1.0)], 8).is_err());
    }
}
