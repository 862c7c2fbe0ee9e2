//! Evaluation pipeline: runs catalog entries (or declarative files) over a
//! point selection, emits deterministic per-point reports in table or record
//! form, compares computed invariants against the entry's expected closed
//! forms, and cross-checks automatic differentiation against central finite
//! differences.
//!
//! Record lines are "example<TAB>h_label<TAB>point_idx<TAB>key<TAB>value",
//! sorted by example id, then declared structure-triple order, then point
//! index, with a fixed key order inside each block. The same numeric strings
//! appear in the human table.

use crate::catalog::{self, ExampleSpec};
use crate::chart::{ChartMetric, FrameSnapshot};
use crate::classify::{classify, theorem_crosschecks, ClassVerdict, TheoremInput};
use crate::error::{GeomError, Result};
use crate::hstructure::HTriple;
use crate::invariants::{
    constant_curvature_check, invariant_report, signed_norms, structural_tensors, InvariantReport,
    StructuralTensors,
};
use crate::jet::DIM;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What to run: a built-in entry or a declarative manifold file.
#[derive(Clone, Debug)]
pub enum RunSource {
    Catalog(String),
    File(String),
}

/// Point selection. Grid and Random are centered on the entry's first
/// default point with half-width 0.5 per axis; points violating the domain
/// guard are dropped (Random resamples, deterministically from the seed).
#[derive(Clone, Debug)]
pub enum PointSelection {
    Defaults,
    Explicit(Vec<[f64; DIM]>),
    Grid { per_axis: usize },
    Random { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Records,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub source: RunSource,
    pub points: PointSelection,
    /// Overrides the entry's zero-test tolerance when set.
    pub tol_zero: Option<f64>,
    /// Overrides the entry's relative matching tolerance when set.
    pub tol_match: Option<f64>,
    pub compare: bool,
    pub fd_check: bool,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn for_example(id: &str) -> RunConfig {
        RunConfig {
            source: RunSource::Catalog(id.to_string()),
            points: PointSelection::Defaults,
            tol_zero: None,
            tol_match: None,
            compare: false,
            fd_check: false,
            format: OutputFormat::Records,
        }
    }
}

/// Result of one run: the assembled output in the requested format plus the
/// comparison failures (empty when compare is off or everything matched).
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output: String,
    pub failures: Vec<String>,
    pub fd_max_deviation: Option<f64>,
}

struct EvalRow {
    example: String,
    h_label: String,
    point_idx: usize,
    point: [f64; DIM],
    records: Vec<(String, String)>,
    report: InvariantReport,
    verdict: ClassVerdict,
    max_n: [f64; 3],
    failures: Vec<String>,
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

fn max_abs4(t: &[[[[f64; DIM]; DIM]; DIM]; DIM]) -> f64 {
    let mut m = 0.0f64;
    for a in t {
        for b in a {
            for c in b {
                for d in c {
                    m = m.max(d.abs());
                }
            }
        }
    }
    m
}

fn einstein_residual(report: &InvariantReport, eps: [f64; DIM]) -> f64 {
    let mut r = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            let gm = if a == b { eps[a] } else { 0.0 };
            r = r.max((report.ricci[a][b] - report.tau / 4.0 * gm).abs());
        }
    }
    r
}

/// Resolves a dotted invariant key against computed data. Keys mirror the
/// record keys; curvature components use 1-based frame indices.
pub fn lookup_invariant(
    key: &str,
    snap: &FrameSnapshot,
    report: &InvariantReport,
    tensors: &StructuralTensors,
) -> Result<f64> {
    let unknown = || GeomError::ValidationError(format!("unknown invariant key {key:?}"));
    let undefined = |what: &str| {
        GeomError::ValidationError(format!("{what} undefined at point {:?}", snap.point))
    };
    match key {
        "tau" => return Ok(report.tau),
        "max_abs_R" => return Ok(max_abs4(&snap.riemann)),
        "einstein_resid" => return Ok(einstein_residual(report, snap.eps)),
        "nu" => return report.nu.ok_or_else(|| undefined("nu")),
        "nu_star2" => return report.nu_star2.ok_or_else(|| undefined("nu_star2")),
        "const_curv_k" => {
            return constant_curvature_check(snap).ok_or_else(|| undefined("const_curv_k"))
        }
        _ => {}
    }
    let (head, tail) = key.split_once('.').ok_or_else(unknown)?;
    match head {
        "norm_nablaJ" | "norm_F" | "norm_N" | "norm_theta" | "tau_star" | "tau_star_alt"
        | "max_abs_N" => {
            let alpha: usize = tail.parse().map_err(|_| unknown())?;
            if !(1..=3).contains(&alpha) {
                return Err(unknown());
            }
            Ok(match head {
                "norm_nablaJ" => report.norm_nabla_j[alpha - 1],
                "norm_F" => report.norm_f[alpha - 1],
                "norm_N" => report.norm_n[alpha - 1],
                "norm_theta" => report.norm_theta[alpha - 1],
                "tau_star" => report.tau_star[alpha - 1],
                "tau_star_alt" => report.tau_star_alt[alpha - 1],
                _ => tensors.max_abs_n(alpha),
            })
        }
        "R" | "rho" | "sectional" => {
            let idx: Vec<usize> = tail
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(unknown)?;
            if idx.iter().any(|&i| !(1..=DIM).contains(&i)) {
                return Err(unknown());
            }
            match (head, idx.as_slice()) {
                ("R", [a, b, c, d]) => Ok(snap.riemann[a - 1][b - 1][c - 1][d - 1]),
                ("rho", [a, b]) => Ok(report.ricci[a - 1][b - 1]),
                ("sectional", [a, b]) => Ok(report.sectional[a - 1][b - 1]),
                _ => Err(unknown()),
            }
        }
        _ => Err(unknown()),
    }
}

/// Central-difference check of the metric first derivatives produced by
/// automatic differentiation; returns the largest componentwise deviation.
pub fn fd_metric_deviation(g: &ChartMetric, p: [f64; DIM]) -> Result<f64> {
    const H: f64 = 1e-5;
    let jets = g.eval(p)?;
    let mut dev = 0.0f64;
    for l in 0..DIM {
        let mut pp = p;
        pp[l] += H;
        let mut pm = p;
        pm[l] -= H;
        let gp = g.eval(pp)?;
        let gm = g.eval(pm)?;
        for i in 0..DIM {
            for j in 0..DIM {
                let fd = (gp[i][j].value - gm[i][j].value) / (2.0 * H);
                dev = dev.max((jets[i][j].grad[l] - fd).abs());
            }
        }
    }
    Ok(dev)
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn evaluate(
    spec: &ExampleSpec,
    label: &str,
    triple: &HTriple,
    point_idx: usize,
    point: [f64; DIM],
    compare: bool,
    tols: crate::classify::ClassTolerances,
) -> Result<EvalRow> {
    let (tol_zero, tol_match) = (tols.zero, tols.matching);
    let snap = spec.snapshot_at(point)?;
    let (tol_curv, tol_conn) = if spec.is_embedded() {
        (1e-6, 1e-6)
    } else {
        (1e-9, 1e-10)
    };
    snap.validate(tol_curv, tol_conn)?;

    let report = invariant_report(&snap, triple, tol_zero)?;
    let tensors = structural_tensors(&snap, triple)?;
    let norms = signed_norms(&tensors, snap.eps);
    let verdict = classify(&tensors, &norms, triple, snap.eps, tols);

    let mut records: Vec<(String, String)> = Vec::with_capacity(96);
    let mut put = |k: String, v: String| records.push((k, v));
    for i in 0..DIM {
        put(format!("point.{}", i + 1), fmt_f(point[i]));
    }
    for alpha in 1..=3 {
        put(format!("norm_nablaJ.{alpha}"), fmt_f(report.norm_nabla_j[alpha - 1]));
    }
    for alpha in 1..=3 {
        put(format!("norm_F.{alpha}"), fmt_f(report.norm_f[alpha - 1]));
    }
    for alpha in 1..=3 {
        put(format!("norm_N.{alpha}"), fmt_f(report.norm_n[alpha - 1]));
    }
    for alpha in 1..=3 {
        put(format!("norm_theta.{alpha}"), fmt_f(report.norm_theta[alpha - 1]));
    }
    for alpha in 1..=3 {
        put(format!("max_abs_N.{alpha}"), fmt_f(tensors.max_abs_n(alpha)));
    }
    put("tau".into(), fmt_f(report.tau));
    for alpha in 1..=3 {
        put(format!("tau_star.{alpha}"), fmt_f(report.tau_star[alpha - 1]));
    }
    for alpha in 1..=3 {
        put(
            format!("tau_star_alt.{alpha}"),
            fmt_f(report.tau_star_alt[alpha - 1]),
        );
    }
    for a in 0..DIM {
        for b in 0..DIM {
            put(format!("rho.{}{}", a + 1, b + 1), fmt_f(report.ricci[a][b]));
        }
    }
    for &(a, b) in &PAIRS {
        put(
            format!("sectional.{}{}", a + 1, b + 1),
            fmt_f(report.sectional[a][b]),
        );
    }
    for (pi, &(a, b)) in PAIRS.iter().enumerate() {
        for &(c, d) in &PAIRS[pi..] {
            put(
                format!("R.{}{}{}{}", a + 1, b + 1, c + 1, d + 1),
                fmt_f(snap.riemann[a][b][c][d]),
            );
        }
    }
    put("max_abs_R".into(), fmt_f(max_abs4(&snap.riemann)));
    put("flat".into(), report.flat.to_string());
    put("einstein".into(), report.einstein.to_string());
    put(
        "einstein_resid".into(),
        fmt_f(einstein_residual(&report, snap.eps)),
    );
    if let Some(k) = constant_curvature_check(&snap) {
        put("const_curv_k".into(), fmt_f(k));
    }
    if let Some(nu) = report.nu {
        put("nu".into(), fmt_f(nu));
    }
    if let Some(ns) = report.nu_star2 {
        put("nu_star2".into(), fmt_f(ns));
    }
    for alpha in 1..=3 {
        let v = &verdict.per_alpha[alpha - 1];
        put(format!("class.kaehler.{alpha}"), v.kaehler.to_string());
        put(format!("class.integrable.{alpha}"), v.integrable.to_string());
        put(
            format!("class.isotropic_kaehler.{alpha}"),
            v.isotropic_kaehler.to_string(),
        );
        put(format!("class.main_w.{alpha}"), v.main_class_w.to_string());
        if let Some(ak) = v.almost_kaehler {
            put(format!("class.almost_kaehler.{alpha}"), ak.to_string());
        }
        if let Some(w2) = v.norden_w2 {
            put(format!("class.norden_w2.{alpha}"), w2.to_string());
        }
        if let Some(w3) = v.norden_w3 {
            put(format!("class.norden_w3.{alpha}"), w3.to_string());
        }
    }
    put("class.in_w".into(), verdict.in_w.to_string());
    put(
        "class.pseudo_hyper_kaehler".into(),
        verdict.pseudo_hyper_kaehler.to_string(),
    );

    let mut failures = Vec::new();
    if compare {
        let at = format!(
            "{} [{label}] point {point_idx} {:?}",
            spec.id, point
        );
        for (key, want) in spec.expected_at(point)? {
            let got = lookup_invariant(&key, &snap, &report, &tensors)?;
            let ok = if want == 0.0 {
                got.abs() <= tol_zero
            } else {
                (got - want).abs() <= tol_match * want.abs().max(1.0)
            };
            if !ok {
                failures.push(format!("{at}: {key} = {got} vs expected {want}"));
            }
        }
        if verdict != spec.expected_classes {
            failures.push(format!("{at}: class verdict differs from expected"));
        }
    }

    Ok(EvalRow {
        example: spec.id.clone(),
        h_label: label.to_string(),
        point_idx,
        point,
        records,
        report,
        verdict,
        max_n: [
            tensors.max_abs_n(1),
            tensors.max_abs_n(2),
            tensors.max_abs_n(3),
        ],
        failures,
    })
}

fn select_points(spec: &ExampleSpec, sel: &PointSelection) -> Result<Vec<[f64; DIM]>> {
    let center = spec.default_points[0];
    match sel {
        PointSelection::Defaults => Ok(spec.default_points.clone()),
        PointSelection::Explicit(pts) => {
            if pts.is_empty() {
                return Err(GeomError::ValidationError("no points given".into()));
            }
            for &p in pts {
                spec.guard_check(p)?;
            }
            Ok(pts.clone())
        }
        PointSelection::Grid { per_axis } => {
            let n = *per_axis;
            if !(1..=6).contains(&n) {
                return Err(GeomError::ValidationError(
                    "grid size must be between 1 and 6 points per axis".into(),
                ));
            }
            let axis = |i: usize, k: usize| {
                if n == 1 {
                    center[i]
                } else {
                    center[i] - 0.5 + k as f64 / (n - 1) as f64
                }
            };
            let mut pts = Vec::new();
            for k1 in 0..n {
                for k2 in 0..n {
                    for k3 in 0..n {
                        for k4 in 0..n {
                            let p = [axis(0, k1), axis(1, k2), axis(2, k3), axis(3, k4)];
                            if spec.guard_check(p).is_ok() {
                                pts.push(p);
                            }
                        }
                    }
                }
            }
            if pts.is_empty() {
                return Err(GeomError::ValidationError(
                    "grid excluded by domain guard".into(),
                ));
            }
            Ok(pts)
        }
        PointSelection::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut pts = Vec::with_capacity(*count);
            let mut attempts = 0usize;
            while pts.len() < *count {
                attempts += 1;
                if attempts > 10_000 {
                    return Err(GeomError::ValidationError(
                        "random sampling kept hitting the domain guard".into(),
                    ));
                }
                let p: [f64; DIM] =
                    std::array::from_fn(|i| center[i] + rng.gen_range(-0.5..0.5));
                if spec.guard_check(p).is_ok() {
                    pts.push(p);
                }
            }
            Ok(pts)
        }
    }
}

fn load_spec(source: &RunSource) -> Result<ExampleSpec> {
    match source {
        RunSource::Catalog(id) => catalog::build(id),
        RunSource::File(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| GeomError::Io(format!("{path}: {e}")))?;
            catalog::from_declarative(&text)
        }
    }
}

fn render(rows: &[EvalRow], format: OutputFormat, fd: Option<f64>) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Records => {
            for row in rows {
                for (k, v) in &row.records {
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\n",
                        row.example, row.h_label, row.point_idx, k, v
                    ));
                }
            }
            if let Some(d) = fd {
                out.push_str(&format!("fd_check\t-\t-\tmax_deviation\t{}\n", fmt_f(d)));
            }
        }
        OutputFormat::Table => {
            for row in rows {
                out.push_str(&format!(
                    "== {} [{}] point {} at ({}, {}, {}, {}) ==\n",
                    row.example,
                    row.h_label,
                    row.point_idx,
                    fmt_f(row.point[0]),
                    fmt_f(row.point[1]),
                    fmt_f(row.point[2]),
                    fmt_f(row.point[3]),
                ));
                for (k, v) in &row.records {
                    if k.starts_with("point.") {
                        continue;
                    }
                    out.push_str(&format!("  {k:26} = {v}\n"));
                }
            }
            if let Some(d) = fd {
                out.push_str(&format!("fd max AD-vs-FD deviation = {}\n", fmt_f(d)));
            }
        }
    }
    out
}

/// Runs one example (or declarative file) per the config.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let spec = load_spec(&cfg.source)?;
    let tols = spec.tolerances();
    let tol_zero = cfg.tol_zero.unwrap_or(tols.zero);
    let tol_match = cfg.tol_match.unwrap_or(tols.matching);
    let points = select_points(&spec, &cfg.points)?;
    let triples = spec.h_triples()?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (label, triple) in &triples {
        for (idx, &p) in points.iter().enumerate() {
            let row = evaluate(
                &spec,
                label,
                triple,
                idx,
                p,
                cfg.compare,
                crate::classify::ClassTolerances {
                    zero: tol_zero,
                    matching: tol_match,
                },
            )?;
            failures.extend(row.failures.iter().cloned());
            rows.push(row);
        }
    }

    let fd = if cfg.fd_check && !spec.is_lie() {
        let g = spec.chart_metric()?;
        let mut dev = 0.0f64;
        for &p in &points {
            dev = dev.max(fd_metric_deviation(&g, p)?);
        }
        Some(dev)
    } else {
        None
    };

    Ok(RunOutcome {
        output: render(&rows, cfg.format, fd),
        failures,
        fd_max_deviation: fd,
    })
}

/// Result of the whole-catalog verification sweep.
#[derive(Clone, Debug)]
pub struct VerifySummary {
    /// Structured records for every entry at its default points, plus
    /// theorem cross-check lines; byte-identical across runs.
    pub records: String,
    /// Human pass/fail matrix with one line per entry.
    pub matrix: String,
    pub failures: Vec<String>,
    pub examples_passed: usize,
    pub examples_total: usize,
}

impl VerifySummary {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

const MATRIX_GROUPS: [(&str, &[&str]); 4] = [
    ("norms", &["norm_", "max_abs_N"]),
    ("curvature", &["R.", "max_abs_R", "sectional.", "const_curv"]),
    ("scalars", &["tau", "rho.", "nu", "einstein"]),
    ("classes", &["class"]),
];

/// Runs every catalog entry at its default points with comparison on, then
/// the cross-example theorem checks.
pub fn verify_all() -> Result<VerifySummary> {
    let mut ids = catalog::list();
    ids.sort_unstable();

    let mut records = String::new();
    let mut matrix = String::new();
    let mut failures = Vec::new();
    let mut theorem_inputs = Vec::new();
    let mut examples_passed = 0usize;

    matrix.push_str(&format!(
        "{:16} {:>8} {:>9} {:>8} {:>8}  overall\n",
        "example", "norms", "curvature", "scalars", "classes"
    ));

    for id in &ids {
        let spec = catalog::build(id)?;
        let tols = spec.tolerances();
        let points = spec.default_points.clone();
        let triples = spec.h_triples()?;
        let mut example_failures: Vec<String> = Vec::new();
        let mut rows = Vec::new();
        for (label, triple) in &triples {
            let mut flat_all = true;
            let mut max_n = [0.0f64; 3];
            let row_start = rows.len();
            for (idx, &p) in points.iter().enumerate() {
                let row = evaluate(&spec, label, triple, idx, p, true, tols)?;
                example_failures.extend(row.failures.iter().cloned());
                flat_all &= row.report.flat;
                for a in 0..3 {
                    max_n[a] = max_n[a].max(row.max_n[a]);
                }
                rows.push(row);
            }
            let head = &rows[row_start];
            theorem_inputs.push(TheoremInput {
                example: format!("{id}[{label}]"),
                verdict: head.verdict.clone(),
                flat: flat_all,
                norm_nabla_j: head.report.norm_nabla_j,
                max_n,
            });
        }
        records.push_str(&render(&rows, OutputFormat::Records, None));

        let cell = |group: &[&str]| {
            let hit = example_failures.iter().any(|f| {
                group.iter().any(|prefix| {
                    f.split(": ")
                        .nth(1)
                        .map(|tail| tail.starts_with(prefix))
                        .unwrap_or(true)
                })
            });
            if hit {
                "FAIL"
            } else {
                "ok"
            }
        };
        let overall = if example_failures.is_empty() {
            examples_passed += 1;
            "pass"
        } else {
            "FAIL"
        };
        matrix.push_str(&format!(
            "{:16} {:>8} {:>9} {:>8} {:>8}  {overall}\n",
            id,
            cell(MATRIX_GROUPS[0].1),
            cell(MATRIX_GROUPS[1].1),
            cell(MATRIX_GROUPS[2].1),
            cell(MATRIX_GROUPS[3].1),
        ));
        failures.extend(example_failures);
    }

    match theorem_crosschecks(&theorem_inputs) {
        Ok(report) => {
            for (example, theorem) in &report.checked {
                records.push_str(&format!("theorem\t{example}\t-\t{theorem}\tchecked\n"));
            }
        }
        Err(e) => failures.push(format!("theorem cross-check: {e}")),
    }

    let total = ids.len();
    matrix.push_str(&format!("{examples_passed}/{total} examples pass\n"));
    Ok(VerifySummary {
        records,
        matrix,
        failures,
        examples_passed,
        examples_total: total,
    })
}
