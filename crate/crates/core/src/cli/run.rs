//! Pipeline commands behind the CLI subcommands. Every command returns a
//! serializable fragment; `cmd_all` stitches them into one report.json.
//! Wall-clock goes to a separate timings file so consecutive runs on the
//! same input produce byte-identical reports.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::cli::config::RunConfig;
use crate::cli::report::{ensure_dir, write_json, write_table};
use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::jets::{scan_spoints, ScanBox, ScanOptions, ScanReport};
use crate::lse::{assemble_kernel, build_grid, KernelOperator, VolumeGrid};
use crate::potentials::{PotentialField, ProfileShape};
use crate::radial::{
    critical_coupling, find_s_spheres, integrate_regular, radial_phi, solve_psi_radial,
    ChannelCounts, RadialChannels, SphereRadius, SumRuleReport,
};
use crate::scattering::{levinson_check_with_curves, LevinsonReport};

pub const SCHEMA_VERSION: &str = "1";

/// A numeric result carried with the tolerance it was tested against.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Toleranced {
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Toleranced {
    pub fn le(value: f64, tol: f64) -> Self {
        Toleranced {
            value,
            tol,
            pass: value <= tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentSummary {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub coupling: f64,
    pub support_radius: f64,
    pub center: Point3,
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialSummary {
    pub radial: bool,
    pub components: Vec<ComponentSummary>,
}

fn summarize_potential(p: &PotentialField) -> PotentialSummary {
    let components = p
        .components()
        .iter()
        .map(|(profile, center)| {
            let (kind, depth, width, radius) = match &profile.shape {
                ProfileShape::Gaussian { depth, width } => {
                    ("gaussian", Some(*depth), Some(*width), None)
                }
                ProfileShape::Bump { depth, radius } => ("bump", Some(*depth), None, Some(*radius)),
                ProfileShape::Table(_) => ("table", None, None, None),
            };
            ComponentSummary {
                kind,
                depth,
                width,
                radius,
                coupling: profile.coupling,
                support_radius: profile.support_radius(),
                center: *center,
            }
        })
        .collect();
    PotentialSummary {
        radial: p.is_radial(),
        components,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub n: usize,
    pub nodes: usize,
    pub spacing: f64,
    pub ball_radius: f64,
}

pub fn build_operator(cfg: &RunConfig) -> Result<Arc<KernelOperator>> {
    let ball = cfg.potential.support_ball();
    let grid = Arc::new(build_grid(ball, cfg.n)?);
    let mut op = assemble_kernel(grid, Arc::new(cfg.potential.clone()))?;
    op.set_tau_conv(cfg.tau_conv);
    Ok(Arc::new(op))
}

fn grid_summary(grid: &VolumeGrid, n: usize) -> GridSummary {
    GridSummary {
        n,
        nodes: grid.len(),
        spacing: grid.spacing(),
        ball_radius: grid.ball().radius,
    }
}

// ---------------------------------------------------------------- convention

#[derive(Debug, Clone, Serialize)]
pub struct ConventionFragment {
    pub grid: GridSummary,
    pub sigma_min: f64,
    pub tau_conv: f64,
    pub ok: bool,
    /// asymptotic s-wave slope, the radial convention proxy (radial
    /// potentials only); changes sign exactly at the critical coupling
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial_slope: Option<f64>,
}

/// Invertibility check plus the radial slope proxy.
pub fn cmd_convention(cfg: &RunConfig) -> Result<ConventionFragment> {
    let op = build_operator(cfg)?;
    let check = op.check_convention();
    let radial_slope = if cfg.potential.is_radial() {
        let support = cfg.potential.support_ball().radius;
        let sol = integrate_regular(&cfg.potential, 0, 3.0 * support)?;
        Some(sol.tail_unscaled().0)
    } else {
        None
    };
    Ok(ConventionFragment {
        grid: grid_summary(op.grid(), cfg.n),
        sigma_min: check.sigma_min,
        tau_conv: check.tau,
        ok: check.ok,
        radial_slope,
    })
}

// ---------------------------------------------------------------------- scan

#[derive(Debug, Clone, Serialize)]
pub struct ScanFragment {
    pub order: usize,
    pub resolution: usize,
    pub half_width: f64,
    pub cell: f64,
    pub tau_rel: f64,
    pub conditional: bool,
    pub candidate_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_median: Option<f64>,
    pub csv: String,
    pub candidates: Vec<crate::jets::Candidate>,
}

fn scan_fragment(report: &ScanReport, csv: String) -> ScanFragment {
    let radii = report.candidate_radii();
    let radius_median = if radii.is_empty() {
        None
    } else {
        Some(radii[radii.len() / 2])
    };
    ScanFragment {
        order: report.order,
        resolution: report.resolution,
        half_width: report.scan_box.half_width,
        cell: report.lattice_spacing(),
        tau_rel: report.tau_rel,
        conditional: report.conditional,
        candidate_count: report.candidates.len(),
        radius_median,
        csv,
        candidates: report.candidates.clone(),
    }
}

fn write_scan_csv(report: &ScanReport, path: &Path) -> Result<()> {
    let res = report.resolution;
    let mut rows = Vec::with_capacity(res * res * res);
    for ix in 0..res {
        for iy in 0..res {
            for iz in 0..res {
                let p = report.lattice_point(ix, iy, iz);
                let d = report.diagnostic[(ix * res + iy) * res + iz];
                rows.push(vec![p[0], p[1], p[2], d]);
            }
        }
    }
    write_table(
        path,
        &format!("s-point scan, order {}", report.order),
        &["x", "y", "z", "diagnostic"],
        rows,
    )
}

/// Run the configured scans; writes scan_m{m}.csv per order.
pub fn cmd_scan(cfg: &RunConfig) -> Result<Vec<ScanFragment>> {
    let op = build_operator(cfg)?;
    cmd_scan_with(cfg, &op)
}

fn cmd_scan_with(cfg: &RunConfig, op: &Arc<KernelOperator>) -> Result<Vec<ScanFragment>> {
    ensure_dir(&cfg.out_dir)?;
    let scan_box = ScanBox::centered(cfg.scan_half_width_or_default());
    let opts = ScanOptions {
        tau_rel: cfg.tau_rel,
        ..Default::default()
    };
    let mut fragments = Vec::new();
    for &m in &cfg.orders {
        let report = scan_spoints(op, m, scan_box, cfg.scan_res, opts)?;
        let csv_name = format!("scan_m{m}.csv");
        write_scan_csv(&report, &cfg.out_dir.join(&csv_name))?;
        fragments.push(scan_fragment(&report, csv_name));
    }
    Ok(fragments)
}

// -------------------------------------------------------------------- radial

#[derive(Debug, Clone, Serialize)]
pub struct SphereFragment {
    pub order: usize,
    pub radii: Vec<SphereRadius>,
    pub csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiFragment {
    /// residual of Phi + (1/6)(-Lap + q) Psi, the sign fixed by the free
    /// case
    pub corrected_residual: Toleranced,
    /// residual of the opposite-Laplacian-sign form, for the record
    pub printed_form_residual: f64,
    pub tail_linear_coefficient: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialFragment {
    pub counts: ChannelCounts,
    pub spheres: Vec<SphereFragment>,
    pub sum_rules: Vec<SumRuleReport>,
    pub psi: PsiFragment,
}

/// Radial pipeline: counts, s-spheres per configured order, the sum-rule
/// table for 0 <= m <= l <= min(l_max, 2), and the Psi identity residual.
pub fn cmd_radial(cfg: &RunConfig) -> Result<RadialFragment> {
    cfg.potential.require_radial()?;
    ensure_dir(&cfg.out_dir)?;
    let p = &cfg.potential;

    let counts = ChannelCounts::compute(p, cfg.l_max)?;

    let mut spheres = Vec::new();
    for &m in &cfg.orders {
        let report = find_s_spheres(p, m)?;
        let csv_name = format!("radial_diag_m{m}.csv");
        write_table(
            &cfg.out_dir.join(&csv_name),
            &format!(
                "radial diagnostic for order {m} ({})",
                if m == 1 { "Phi" } else { "determinant product" }
            ),
            &["r", "diagnostic"],
            report.diagnostic.iter().map(|&(r, v)| vec![r, v]),
        )?;
        spheres.push(SphereFragment {
            order: m,
            radii: report.radii,
            csv: csv_name,
        });
    }

    let l_sum = cfg.l_max.min(2);
    let channels = RadialChannels::new(p, l_sum)?;
    let mut sum_rules = Vec::new();
    for l in 0..=l_sum {
        for m in 0..=l {
            sum_rules.push(crate::radial::kram::verify_sum_rule_with(&channels, m, l)?);
            let table = channels.kram_table(m, l, 400)?;
            write_table(
                &cfg.out_dir.join(format!("kram_m{m}_l{l}.csv")),
                &format!("Kram determinant m={m} l={l}"),
                &["r", "value"],
                table.r.iter().zip(&table.value).map(|(&r, &v)| vec![r, v]),
            )?;
        }
    }

    let psi = solve_psi_radial(p)?;
    let resid = psi.residual_report(p);
    let phi = radial_phi(p)?;
    write_table(
        &cfg.out_dir.join("radial_phi_psi.csv"),
        "radial fields",
        &["r", "phi", "psi"],
        (1..=800).map(|i| {
            let r = psi.r_max() * i as f64 / 800.0;
            vec![r, phi.eval(r), psi.eval(r)]
        }),
    )?;

    Ok(RadialFragment {
        counts,
        spheres,
        sum_rules,
        psi: PsiFragment {
            corrected_residual: Toleranced::le(resid.corrected_form, 1e-6),
            printed_form_residual: resid.printed_form,
            tail_linear_coefficient: psi.tail_linear_coefficient(),
        },
    })
}

// ------------------------------------------------------------------ levinson

/// Levinson checks; writes one (k, delta) table per channel.
pub fn cmd_levinson(cfg: &RunConfig) -> Result<LevinsonReport> {
    cfg.potential.require_radial()?;
    ensure_dir(&cfg.out_dir)?;
    let l_max = cfg.l_max.min(4);
    let (report, curves) =
        levinson_check_with_curves(&cfg.potential, l_max, cfg.k_max, cfg.n_k)?;
    for curve in &curves {
        write_table(
            &cfg.out_dir.join(format!("phase_l{}.csv", curve.l)),
            &format!("phase shift, channel l = {}", curve.l),
            &["k", "delta"],
            curve.k.iter().zip(&curve.delta).map(|(&k, &d)| vec![k, d]),
        )?;
    }
    Ok(report)
}

// --------------------------------------------------------------------- sweep

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
    pub sphere_radii_m1: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFragment {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_critical: Option<f64>,
    pub crosses_critical: bool,
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

/// Coupling sweep: bound-state counts and first-order sphere radii per
/// alpha. Ranges crossing the critical coupling are refused unless
/// allow_critical is set.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepFragment> {
    cfg.potential.require_radial()?;
    ensure_dir(&cfg.out_dir)?;
    let (a, b, step) = cfg.alpha_range.ok_or_else(|| {
        Error::MalformedInput("sweep needs alpha_range = A:B:STEP (or --alpha-range)".into())
    })?;

    let slope_at = |alpha: f64| -> Result<f64> {
        let scaled = cfg.potential.with_coupling(alpha)?;
        let support = scaled.support_ball().radius;
        Ok(integrate_regular(&scaled, 0, 3.0 * support)?
            .tail_unscaled()
            .0)
    };
    let crosses_critical = slope_at(a)? * slope_at(b)? < 0.0;
    if crosses_critical && !cfg.allow_critical {
        return Err(Error::MalformedInput(format!(
            "alpha range {a}:{b} crosses the critical coupling; pass --allow-critical to sweep \
             through it"
        )));
    }
    let alpha_critical = if crosses_critical {
        Some(critical_coupling(&cfg.potential, a, b)?)
    } else {
        None
    };

    let mut alphas = Vec::new();
    let mut alpha = a;
    while alpha <= b + 1e-12 * step {
        alphas.push(alpha);
        alpha += step;
    }

    let l_sum = cfg.l_max.min(2);
    let mut rows = Vec::new();
    for &alpha in &alphas {
        let scaled = cfg.potential.with_coupling(alpha)?;
        let counts = ChannelCounts::compute(&scaled, l_sum);
        let spheres = find_s_spheres(&scaled, 1);
        match (counts, spheres) {
            (Ok(counts), Ok(spheres)) => rows.push(SweepRow {
                alpha,
                ok: true,
                counts: Some(counts.n_l),
                sphere_radii_m1: spheres.radii.iter().map(|s| s.radius).collect(),
            }),
            (Err(Error::ConventionViolated(_)), _) | (_, Err(Error::ConventionViolated(_)))
                if cfg.allow_critical =>
            {
                rows.push(SweepRow {
                    alpha,
                    ok: false,
                    counts: None,
                    sphere_radii_m1: Vec::new(),
                })
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }

    let csv_name = "sweep.csv".to_string();
    let max_radii = rows.iter().map(|r| r.sphere_radii_m1.len()).max().unwrap_or(0);
    let mut columns: Vec<String> = vec!["alpha".into(), "ok".into()];
    for l in 0..=l_sum {
        columns.push(format!("N{l}"));
    }
    for i in 0..max_radii {
        columns.push(format!("r{}", i + 1));
    }
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    write_table(
        &cfg.out_dir.join(&csv_name),
        "coupling sweep",
        &column_refs,
        rows.iter().map(|row| {
            let mut out = vec![row.alpha, if row.ok { 1.0 } else { 0.0 }];
            match &row.counts {
                Some(counts) => out.extend(counts.iter().map(|&c| c as f64)),
                None => out.extend(std::iter::repeat_n(f64::NAN, l_sum + 1)),
            }
            for i in 0..max_radii {
                out.push(row.sphere_radii_m1.get(i).copied().unwrap_or(f64::NAN));
            }
            out
        }),
    )?;

    Ok(SweepFragment {
        alpha_critical,
        crosses_critical,
        rows,
        csv: csv_name,
    })
}

// ------------------------------------------------------------- cross checks

#[derive(Debug, Clone, Serialize)]
pub struct PhiAgreement {
    pub n_samples: usize,
    /// max |Phi_3d - Phi_radial| over the samples, relative to the sup of
    /// |Phi_radial| there
    pub max_rel_error: Toleranced,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderMatch {
    pub order: usize,
    pub radial_radii: Vec<f64>,
    pub scan_candidates: usize,
    /// per radial radius: (radial, nearest scan radius, |delta|)
    pub matches: Vec<(f64, f64, f64)>,
    pub tol_cells: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossChecks {
    pub available: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_agreement: Option<PhiAgreement>,
    pub order_matches: Vec<OrderMatch>,
}

fn cross_checks(
    cfg: &RunConfig,
    op: &Arc<KernelOperator>,
    scans: &[ScanFragment],
) -> Result<CrossChecks> {
    if !cfg.potential.is_radial() {
        return Ok(CrossChecks {
            available: false,
            reason: Some("no oracle: potential is not radially symmetric".into()),
            phi_agreement: None,
            order_matches: Vec::new(),
        });
    }

    // Phi route agreement at 20 radii along an incommensurate direction
    let phi3 = crate::lse::solve_field(op, crate::lse::Incident::Constant(1.0))?;
    let phir = radial_phi(&cfg.potential)?;
    let support = cfg.potential.support_ball().radius;
    let dir = {
        let v = [1.0, 0.618_033_988_749, 0.381_966_011_25];
        let n = crate::geom::norm(v);
        [v[0] / n, v[1] / n, v[2] / n]
    };
    let n_samples = 20;
    let mut max_abs = 0.0f64;
    let mut sup_phi = 0.0f64;
    for i in 1..=n_samples {
        let r = support * (0.12 + 1.1 * (i as f64 - 1.0) / (n_samples as f64 - 1.0));
        let x = crate::geom::scale(dir, r);
        let v3 = phi3.eval_lenient(x);
        let vr = phir.eval(r);
        max_abs = max_abs.max((v3 - vr).abs());
        sup_phi = sup_phi.max(vr.abs());
    }
    let phi_agreement = PhiAgreement {
        n_samples,
        max_rel_error: Toleranced::le(max_abs / sup_phi, 0.01),
    };

    let mut order_matches = Vec::new();
    for frag in scans {
        let radial_radii: Vec<f64> = find_s_spheres(&cfg.potential, frag.order)?
            .radii
            .iter()
            .map(|s| s.radius)
            .collect();
        let scan_radii: Vec<f64> = frag
            .candidates
            .iter()
            .map(|c| crate::geom::norm(c.refined.unwrap_or(c.point)))
            .collect();
        let tol = 2.0 * frag.cell;
        let mut matches = Vec::new();
        let mut pass = true;
        for &rr in &radial_radii {
            let nearest = scan_radii
                .iter()
                .copied()
                .min_by(|x, y| ((x - rr).abs()).partial_cmp(&(y - rr).abs()).unwrap());
            match nearest {
                Some(sr) => {
                    let delta = (sr - rr).abs();
                    pass &= delta <= tol;
                    matches.push((rr, sr, delta));
                }
                None => pass = false,
            }
        }
        // spurious scan detections away from every radial sphere also fail
        if radial_radii.is_empty() && !scan_radii.is_empty() {
            pass = false;
        }
        order_matches.push(OrderMatch {
            order: frag.order,
            radial_radii,
            scan_candidates: scan_radii.len(),
            matches,
            tol_cells: tol,
            pass,
        });
    }

    Ok(CrossChecks {
        available: true,
        reason: None,
        phi_agreement: Some(phi_agreement),
        order_matches,
    })
}

// ----------------------------------------------------------------------- all

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub potential: PotentialSummary,
    pub convention: ConventionFragment,
    pub scans: Vec<ScanFragment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial: Option<RadialFragment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levinson: Option<LevinsonReport>,
    pub cross_checks: CrossChecks,
}

/// The full pipeline. Writes report.json (deterministic) and timings.txt
/// (wall-clock per stage, kept out of the report).
pub fn cmd_all(cfg: &RunConfig) -> Result<RunReport> {
    ensure_dir(&cfg.out_dir)?;
    let mut stages: Vec<(&str, f64)> = Vec::new();
    let clock = Instant::now();

    let convention = cmd_convention(cfg)?;
    stages.push(("convention", clock.elapsed().as_secs_f64()));
    if !convention.ok {
        return Err(Error::ConventionViolated(format!(
            "sigma_min = {:.3e} at tau = {:.3e}",
            convention.sigma_min, convention.tau_conv
        )));
    }

    let t = Instant::now();
    let op = build_operator(cfg)?;
    let scans = cmd_scan_with(cfg, &op)?;
    stages.push(("scan", t.elapsed().as_secs_f64()));

    let radial_available = cfg.potential.is_radial();
    let t = Instant::now();
    let radial = if radial_available {
        Some(cmd_radial(cfg)?)
    } else {
        None
    };
    stages.push(("radial", t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let levinson = if radial_available {
        Some(cmd_levinson(cfg)?)
    } else {
        None
    };
    stages.push(("levinson", t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let cross = cross_checks(cfg, &op, &scans)?;
    stages.push(("cross_checks", t.elapsed().as_secs_f64()));

    let report = RunReport {
        schema: SCHEMA_VERSION,
        potential: summarize_potential(&cfg.potential),
        convention,
        scans,
        radial,
        levinson,
        cross_checks: cross,
    };
    write_json(&cfg.out_dir.join("report.json"), &report)?;

    let mut timing_text = String::from("# stage seconds\n");
    for (name, secs) in &stages {
        timing_text.push_str(&format!("{name} {secs:.3}\n"));
    }
    std::fs::write(cfg.out_dir.join("timings.txt"), timing_text)?;

    Ok(report)
}
