//! Command-line front end: verification suites, geometry emitters, handle
//! inversion, and example-complex audits.
//!
//! Exit codes: 0 on pass, 1 on a failed check or inversion, 2 on usage or
//! I/O errors.

use clap::{Parser, Subcommand, ValueEnum};
use fatcw::cw::{self, fixtures, ComplexPoint};
use fatcw::geometry::{HandlePoint, HandleSpec};
use fatcw::kernels::KernelContext;
use fatcw::maps;
use fatcw_cli::config::parse_config;
use fatcw_cli::emit::{emit, EmitFormat, EmitObject, EmitRequest};
use fatcw_cli::report::{fmt_f64, SuiteOptions};
use fatcw_cli::suites::run_suite;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "fatcw", version, about = "fat handle / fat CW complex verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Obj,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleArg {
    Iota,
    Tdn,
    #[value(name = "fat-s2")]
    FatS2,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite (kernels|geometry|maps|cw|smoothing|all)
    Verify {
        suite: String,
        /// Per-check tolerance override, repeatable: --tol check.id=1e-9
        #[arg(long = "tol", value_name = "ID=VALUE")]
        tol: Vec<String>,
        /// Seed for all sampled audits
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fix evaluation order for byte-identical reports
        #[arg(long)]
        strict: bool,
        /// Plain key-value config file with default tolerances
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the report as CSV to this path (in addition to stdout text)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write a geometry object (d-boundary|phi-grid|smoothed-profile|mesh-of-revolution)
    Emit {
        object: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long, default_value = "out.csv")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Invert the handle map at a point: u and v blocks separated by ';',
    /// components by ','
    Invert {
        #[arg(long, value_name = "N,M")]
        nm: String,
        #[arg(long, value_name = "x;y")]
        point: String,
    },
    /// Build a worked example complex and optionally run its audit
    Example {
        which: ExampleArg,
        #[arg(long)]
        audit: bool,
        /// Dimension of the thin disk quotient (tdn only)
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of audit samples
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the audit metrics as CSV to this path
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_tol(items: &[String]) -> Result<Vec<(String, f64)>, String> {
    items
        .iter()
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("--tol expects ID=VALUE, got {item}"))?;
            let val: f64 = v.parse().map_err(|_| format!("bad tolerance value {v}"))?;
            Ok((k.trim().to_string(), val))
        })
        .collect()
}

fn parse_point(nm: &str, point: &str) -> Result<(HandleSpec, HandlePoint), String> {
    let (n, m) = nm
        .split_once(',')
        .ok_or_else(|| format!("--nm expects N,M, got {nm}"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad n {n}"))?;
    let m: usize = m.trim().parse().map_err(|_| format!("bad m {m}"))?;
    let spec = HandleSpec::new(n, m).map_err(|e| e.to_string())?;
    let (us, vs) = match point.split_once(';') {
        Some(parts) => parts,
        None => (point, ""),
    };
    let parse_block = |s: &str| -> Result<Vec<f64>, String> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| format!("bad coordinate {c}")))
            .collect()
    };
    let u = parse_block(us)?;
    let v = parse_block(vs)?;
    if u.len() != n || v.len() != m {
        return Err(format!(
            "point blocks have dims ({}, {}), spec needs ({n}, {m})",
            u.len(),
            v.len()
        ));
    }
    Ok((spec, HandlePoint::new(u, v)))
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            suite,
            tol,
            seed,
            strict,
            config,
            csv,
        } => {
            let mut opts = SuiteOptions {
                seed,
                strict,
                ..Default::default()
            };
            if let Some(path) = config {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("reading {}: {e}", path.display()))?;
                let cfg = parse_config(&text)?;
                if let Some(s) = cfg.seed {
                    opts.seed = s;
                }
                opts.tol.extend(cfg.tol);
            }
            // command-line overrides win over the config file
            for (k, v) in parse_tol(&tol)? {
                opts.tol.insert(k, v);
            }
            let report = run_suite(&suite, &opts).map_err(|e| e.to_string())?;
            print!("{}", report.render_text());
            if let Some(path) = csv {
                std::fs::write(&path, report.to_csv())
                    .map_err(|e| format!("writing {}: {e}", path.display()))?;
            }
            Ok(if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Emit {
            object,
            n,
            m,
            samples,
            out,
            format,
        } => {
            let object = EmitObject::parse(&object)
                .ok_or_else(|| format!("unknown emit object {object}"))?;
            let ctx = KernelContext::new().map_err(|e| e.to_string())?;
            let req = EmitRequest {
                object,
                n,
                m,
                samples,
                format: match format {
                    FormatArg::Csv => EmitFormat::Csv,
                    FormatArg::Obj => EmitFormat::Obj,
                },
            };
            emit(&ctx, &req, &out).map_err(|e| e.to_string())?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Invert { nm, point } => {
            let (spec, q) = parse_point(&nm, &point)?;
            let ctx = KernelContext::new().map_err(|e| e.to_string())?;
            match maps::theta_map(&ctx, &spec, &q) {
                Ok((u, v, diag)) => {
                    let join =
                        |x: &[f64]| x.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(",");
                    println!("u = [{}]", join(&u));
                    println!("v = [{}]", join(&v));
                    println!(
                        "residual = {}  jacobian = {}  iterations = {}",
                        fmt_f64(diag.residual),
                        fmt_f64(diag.jacobian_det),
                        diag.newton_iters
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("inversion failed: {e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Example {
            which,
            audit,
            n,
            samples,
            seed,
            csv,
        } => {
            let ctx = Arc::new(KernelContext::new().map_err(|e| e.to_string())?);
            let (name, spec) = match which {
                ExampleArg::Iota => ("iota", fixtures::iota()),
                ExampleArg::Tdn => ("tdn", fixtures::tdn(n.max(1))),
                ExampleArg::FatS2 => ("fat-s2", fixtures::fat_s2()),
            };
            println!(
                "{name}: {} cells, max level {}, w-dim bound {}",
                spec.cells().len(),
                spec.max_level(),
                cw::wdim_bound(&spec)
            );
            if audit {
                let (ok, rows) = run_example_audit(&ctx, which, &spec, samples, seed)?;
                if let Some(path) = csv {
                    let mut text = String::from("metric,value\n");
                    for (metric, value) in rows {
                        text.push_str(&format!("{metric},{}\n", fmt_f64(value)));
                    }
                    std::fs::write(&path, text)
                        .map_err(|e| format!("writing {}: {e}", path.display()))?;
                }
                return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

type AuditRows = Vec<(&'static str, f64)>;

fn run_example_audit(
    ctx: &Arc<KernelContext>,
    which: ExampleArg,
    spec: &Arc<cw::ComplexSpec>,
    samples: usize,
    seed: u64,
) -> Result<(bool, AuditRows), String> {
    let mut ok = true;
    let mut rows: AuditRows = Vec::new();
    // normal-form idempotency over random points of the top cell
    let mut rng = fatcw::sampling::rng(seed);
    let top = spec.max_level();
    let m_top = spec.cell(top, 0).map_err(|e| e.to_string())?.m;
    let mut mismatch = 0usize;
    for _ in 0..samples {
        let u = fatcw::sampling::scaled_vector(&mut rng, top, 1.5);
        let v = fatcw::sampling::ball_point(&mut rng, m_top, 1.0);
        let p = ComplexPoint::Cell {
            level: top,
            cell: 0,
            point: HandlePoint::new(u, v),
        };
        let once = cw::normalize(spec, &p).map_err(|e| e.to_string())?;
        if cw::normalize(spec, &once).map_err(|e| e.to_string())? != once {
            mismatch += 1;
        }
    }
    println!(
        "normal-form idempotency: {} ({} mismatches in {samples} samples)",
        if mismatch == 0 { "pass" } else { "FAIL" },
        mismatch
    );
    ok &= mismatch == 0;
    rows.push(("normalize_mismatches", mismatch as f64));

    if matches!(which, ExampleArg::FatS2) {
        let cover = fixtures::fat_s2_cover(ctx);
        let pou = cw::build_partition(ctx, spec, cover, 0.25).map_err(|e| e.to_string())?;
        let audit = cw::audit_partition(&pou, samples, seed ^ 0x5E).map_err(|e| e.to_string())?;
        let pass = audit.max_sum_defect <= 1e-9
            && audit.min_value >= 0.0
            && audit.subordination_violation == 0.0
            && audit.max_flange_mismatch <= 1e-9;
        println!(
            "partition audit: {} (sum defect {}, min value {}, subordination {}, flange mismatch {})",
            if pass { "pass" } else { "FAIL" },
            fmt_f64(audit.max_sum_defect),
            fmt_f64(audit.min_value),
            fmt_f64(audit.subordination_violation),
            fmt_f64(audit.max_flange_mismatch)
        );
        ok &= pass;
        rows.push(("partition_sum_defect", audit.max_sum_defect));
        rows.push(("partition_min_value", audit.min_value));
        rows.push(("partition_subordination_violation", audit.subordination_violation));
        rows.push(("partition_flange_mismatch", audit.max_flange_mismatch));
        let rep = cw::regularity_probe(ctx, spec, 2, 0, samples, seed ^ 0x7A)
            .map_err(|e| e.to_string())?;
        println!(
            "regularity probe: {} collisions in {} pairs ({})",
            rep.collisions, rep.pairs_checked, rep.heuristic
        );
        ok &= rep.collisions == 0;
        rows.push(("regularity_collisions", rep.collisions as f64));
    }
    if matches!(which, ExampleArg::Tdn) {
        let (_, s) = cw::nonreflexivity_witness(spec, 1e-4).map_err(|e| e.to_string())?;
        println!("witness slope at t=1e-4: {} (expect ~ t^(-1/2) = 50)", fmt_f64(s));
        ok &= (s - 50.0).abs() / 50.0 < 0.1;
        rows.push(("witness_slope_1e-4", s));
    }
    Ok((ok, rows))
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
