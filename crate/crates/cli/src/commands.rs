use std::fmt;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regulie_core::bundles::*;
use regulie_core::constructions::*;
use regulie_core::counterexamples::*;
use regulie_core::evolution::{evolve_with, tangent_evol};
use regulie_core::expr::Expr;
use regulie_core::lie::catalog;
use regulie_core::lie::config::load_group_config;
use regulie_core::lie::sampling::{random_algebra, random_element};
use regulie_core::lie_theory::{integrate, AlgebraHom};
use regulie_core::{AlgebraCurve, Group, GroupElement, PathInBase, Scheme, Side};
use serde_json::{json, Value};

use crate::config::*;
use crate::report::{self, CheckReport, Measurement, EXIT_FAIL, EXIT_USAGE};
use crate::suite;
use crate::table::{emit_table, Format, Table};

/// Bad input that is not a core error: malformed numbers, missing files.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Exit code for an error: rejected input is a usage error, numerical
/// breakdown and I/O are failures.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    use regulie_core::Error as E;
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<E>() {
        Some(E::Numeric(_) | E::Branch(_) | E::StepTooLarge { .. } | E::Integrity { .. }) => EXIT_FAIL,
        Some(_) => EXIT_USAGE,
        None => EXIT_FAIL,
    }
}

/// Runs one invocation and returns its exit code.
pub fn run(cfg: RunConfig) -> anyhow::Result<i32> {
    let scale = report::tolerance_scale().map_err(usage)?;
    match cfg.command {
        Command::Evolve(a) => evolve_cmd(a),
        Command::Transport(a) => transport_cmd(a, false),
        Command::Holonomy(a) => transport_cmd(a, true),
        Command::Develop(a) => develop_cmd(a),
        Command::IntegrateHom(a) => integrate_hom_cmd(a, scale),
        Command::Construct(c) => construct_cmd(c, scale),
        Command::Counterexample(c) => counterexample_cmd(c, scale),
        Command::Suite(a) => {
            let out = std::io::stdout();
            let reports = suite::run_suite_streaming(a.name, a.seed, scale, |r| {
                let mut lock = out.lock();
                let _ = writeln!(lock, "{}", r.to_json_line());
                let _ = lock.flush();
            });
            let failed = reports.iter().filter(|r| !r.pass).count();
            eprintln!("suite {}: {} checks, {} failed", a.name, reports.len(), failed);
            Ok(report::exit_code(&reports))
        }
    }
}

pub fn load_group(name: &str) -> anyhow::Result<Group> {
    let path = Path::new(name);
    if name.ends_with(".toml") || path.is_file() {
        return Ok(load_group_config(path)?);
    }
    Ok(catalog::lookup(name)?)
}

pub fn parse_point(s: &str) -> anyhow::Result<DVector<f64>> {
    let xs = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| usage(format!("bad number `{p}` in `{s}`"))))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    Ok(DVector::from_vec(xs))
}

pub fn parse_points(s: &str) -> anyhow::Result<Vec<DVector<f64>>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_point).collect()
}

fn parse_box(s: &str, dim: usize) -> anyhow::Result<BoxDomain> {
    let b = parse_point(s)?;
    if b.len() != 2 {
        bail!(usage(format!("box must be `lo,hi`, got `{s}`")));
    }
    Ok(BoxDomain::cube(dim, b[0], b[1])?)
}

/// Reads a matrix as JSON rows or as whitespace-separated text rows.
pub fn read_matrix(path: &Path) -> anyhow::Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let rows: Vec<Vec<f64>> = match serde_json::from_str(&text) {
        Ok(rows) => rows,
        Err(_) => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|v| v.parse::<f64>().map_err(|_| usage(format!("bad matrix entry `{v}`"))))
                    .collect()
            })
            .collect::<anyhow::Result<_>>()?,
    };
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        bail!(usage(format!("{}: matrix rows must be non-empty and of equal length", path.display())));
    }
    Ok(DMatrix::from_row_iterator(rows.len(), ncols, rows.into_iter().flatten()))
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// Writes the table if asked for; returns whether it went to stdout.
fn write_table(table: &Table, output: &Output) -> anyhow::Result<bool> {
    match (&output.out, output.emit) {
        (Some(path), fmt) => {
            emit_table(table, fmt.unwrap_or(Format::Csv), Some(path))
                .with_context(|| format!("cannot write {}", path.display()))?;
            Ok(false)
        }
        (None, Some(fmt)) => {
            emit_table(table, fmt, None)?;
            Ok(true)
        }
        (None, None) => Ok(false),
    }
}

/// Summary lines go to stdout unless a table already claimed it.
fn say(value: &Value, to_stderr: bool) {
    if to_stderr {
        eprintln!("{value}");
    } else {
        println!("{value}");
    }
}

fn say_reports(reports: &[CheckReport], to_stderr: bool) -> i32 {
    for r in reports {
        if to_stderr {
            eprintln!("{}", r.to_json_line());
        } else {
            println!("{}", r.to_json_line());
        }
    }
    report::exit_code(reports)
}

fn evolve_cmd(a: EvolveArgs) -> anyhow::Result<i32> {
    let g = load_group(&a.group)?;
    let x = AlgebraCurve::from_expr(g.clone(), &a.curve)?;
    let side = match a.side {
        SideArg::Right => Side::Right,
        SideArg::Left => Side::Left,
    };
    let scheme = match a.scheme {
        SchemeArg::Cf4 => Scheme::CommutatorFree4,
        SchemeArg::Midpoint => Scheme::ExponentialMidpoint,
    };
    let run = evolve_with(&x, side, a.steps, scheme)?;
    let on_stdout = write_table(&Table::from_evolution(&run), &a.output)?;
    let summary = json!({
        "group": g.name(),
        "side": side.as_str(),
        "scheme": scheme.as_str(),
        "steps": a.steps,
        "endpoint": matrix_json(run.endpoint.value()),
        "max_drift": run.stats.max_drift,
    });
    say(&summary, on_stdout);
    Ok(0)
}

fn fibre_point(g: &Group, coords: Option<&str>) -> anyhow::Result<GroupElement> {
    match coords {
        None => Ok(g.identity()),
        Some(s) => Ok(g.exp(&g.algebra(parse_point(s)?)?)?),
    }
}

fn transport_cmd(a: TransportArgs, closed: bool) -> anyhow::Result<i32> {
    let g = load_group(&a.group)?;
    let forms: Vec<&str> = a.forms.iter().map(String::as_str).collect();
    let conn = ConnectionChart::from_exprs(g.clone(), parse_box(&a.bounds, forms.len())?, &forms)?;
    let c = PathInBase::polygon(parse_points(&a.path)?)?;
    let g0 = fibre_point(&g, a.g0.as_deref())?;
    let tr = parallel_transport(&conn, &c, &g0, a.steps)?;
    let mut table = Table::new(&["t"]);
    let (r, k) = g.identity().value().shape();
    table.columns.extend((0..r).flat_map(|i| (0..k).map(move |j| format!("m{i}_{j}"))));
    for (t, m) in tr.path.times().iter().zip(tr.path.values()) {
        let mut row = vec![*t];
        row.extend((0..r).flat_map(|i| (0..k).map(move |j| m[(i, j)])));
        table.push(row);
    }
    let on_stdout = write_table(&table, &a.output)?;
    let summary = if closed {
        let rec = holonomy(&conn, &c, &g0, a.steps)?;
        let log = g.log(&rec.holonomy_element).ok().map(|x| x.into_coeffs().as_slice().to_vec());
        json!({
            "group": g.name(),
            "steps": a.steps,
            "holonomy": matrix_json(rec.holonomy_element.value()),
            "log_holonomy": log,
            "closure_gap": rec.closure_gap,
        })
    } else {
        json!({
            "group": g.name(),
            "steps": a.steps,
            "endpoint": matrix_json(tr.endpoint().value()),
            "horizontality_residual": horizontality_residual(&conn, &c, &tr, 40, 1e-5)?,
        })
    };
    say(&summary, on_stdout);
    Ok(0)
}

fn develop_cmd(a: DevelopArgs) -> anyhow::Result<i32> {
    let g = load_group(&a.group)?;
    let forms: Vec<&str> = a.forms.iter().map(String::as_str).collect();
    let phi = ConnectionChart::from_exprs(g.clone(), parse_box(&a.bounds, forms.len())?, &forms)?;
    let d = develop(&phi, &parse_point(&a.x0)?, a.steps)?;
    let pts = parse_points(&a.at)?;
    for x in &pts {
        let f = d.at(x)?;
        println!("{}", json!({"x": x.as_slice(), "value": matrix_json(f.value())}));
    }
    let r = d.path_independence_residual(&pts)?;
    println!("{}", json!({"group": g.name(), "steps": a.steps, "path_independence_residual": r}));
    Ok(0)
}

fn integrate_hom_cmd(a: IntegrateHomArgs, scale: f64) -> anyhow::Result<i32> {
    let (src, tgt) = (load_group(&a.source)?, load_group(&a.target)?);
    let m = match &a.matrix {
        Some(p) => read_matrix(p)?,
        None if src.alg_dim() == tgt.alg_dim() => DMatrix::identity(tgt.alg_dim(), src.alg_dim()),
        None => bail!(usage("--matrix is required when the algebra dimensions differ")),
    };
    let hom = AlgebraHom::new(src.clone(), tgt.clone(), m)?;
    let f = integrate(&hom, a.steps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let pairs: Vec<_> = (0..a.samples)
        .map(|_| (random_element(&src, &mut rng, 3.0), random_element(&src, &mut rng, 3.0)))
        .collect();
    let xs: Vec<_> = (0..a.samples).map(|_| random_algebra(&src, &mut rng, 3.0)).collect();
    let label = format!("{}->{}", src.name(), tgt.name());
    let params = json!({"samples": a.samples, "seed": a.seed, "steps": a.steps});
    let m = |r: regulie_core::Result<f64>, tol: f64| -> regulie_core::Result<Measurement> {
        Ok(Measurement::new(&label, params.clone(), r?, tol))
    };
    let reports = vec![
        CheckReport::measure("integrate-hom.bracket", scale, || m(hom.bracket_residual(), 1e-10)),
        CheckReport::measure("integrate-hom.homomorphism", scale, || m(f.homomorphism_residual(&pairs), 1e-7)),
        CheckReport::measure("integrate-hom.exp-naturality", scale, || m(f.exp_naturality_residual(&xs), 1e-8)),
        CheckReport::measure("integrate-hom.tangent", scale, || m(f.tangent_residual(1e-5), 1e-5)),
    ];
    Ok(say_reports(&reports, false))
}

fn construct_cmd(c: Construct, scale: f64) -> anyhow::Result<i32> {
    let start = Instant::now();
    match c {
        Construct::Semidirect { u, y, steps, output } => {
            let sd = semidirect_group(SemidirectSpec::euclidean())?;
            let u = AlgebraCurve::from_expr(sd.k_group().clone(), &u)?;
            let y = AlgebraCurve::from_expr(catalog::so3(), &y)?;
            let factors = evolve_semidirect(&sd, &u, &y, steps)?;
            let direct = regulie_core::evolve(&sd.join_curves(&u, &y)?, Side::Right, steps)?;
            let on_stdout = write_table(&Table::from_evolution(&factors), &output)?;
            let gap = factors
                .path
                .values()
                .iter()
                .zip(direct.path.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let rep = CheckReport::judged(
                "construct.semidirect",
                Measurement::new("se3", json!({"steps": steps}), gap, 1e-7),
                scale,
                start.elapsed().as_secs_f64(),
            );
            Ok(say_reports(&[rep], on_stdout))
        }
        Construct::Extension { u, y, steps, output } => {
            let spec = ExtensionSpec::heisenberg();
            let u = AlgebraCurve::from_expr(catalog::vector(1), &u)?;
            let y = AlgebraCurve::from_expr(catalog::vector(2), &y)?;
            let a = evolve_extension(&spec, &u, &y, steps)?;
            let b = evolve_extension_chart(&spec, &u, &y, steps)?;
            let mut table = Table::new(&["t", "k", "h0", "h1"]);
            for (t, e) in a.times.iter().zip(&a.nodes) {
                table.push(vec![*t, e.k[0], e.h[(0, 0)], e.h[(1, 0)]]);
            }
            let on_stdout = write_table(&table, &output)?;
            let rep = CheckReport::judged(
                "construct.extension",
                Measurement::new("heis3", json!({"steps": steps, "oracle": "chart-rk4"}), a.sup_distance(&b)?, 1e-7),
                scale,
                start.elapsed().as_secs_f64(),
            );
            Ok(say_reports(&[rep], on_stdout))
        }
        Construct::TangentGroup { group, x, y, steps } => {
            let g = load_group(&group)?;
            let tg = tangent_group(&g)?;
            let xc = AlgebraCurve::from_expr(g.clone(), &x)?;
            let yc = AlgebraCurve::from_expr(g.clone(), &y)?;
            let yk = AlgebraCurve::from_expr(tg.k_group().clone(), &y)?;
            let run = evolve_semidirect(&tg, &yk, &xc, steps)?;
            let (first, _) = tg.split(&run.endpoint)?;
            let te = tangent_evol(&xc, &yc, steps)?;
            let rep = CheckReport::judged(
                "construct.tangent-group",
                Measurement::new(g.name(), json!({"steps": steps}), (first - te.right.coeffs()).norm(), 1e-7),
                scale,
                start.elapsed().as_secs_f64(),
            );
            Ok(say_reports(&[rep], false))
        }
        Construct::Conv { group, x, y, field, steps } => {
            let g = load_group(&group)?;
            let xe = ConvolutionElement::new(AlgebraCurve::from_expr(g.clone(), &x)?, steps)?;
            let ye = ConvolutionElement::new(AlgebraCurve::from_expr(g.clone(), &y)?, steps)?;
            let xy = conv_mul(&xe, &ye)?;
            let mut worst = 0.0f64;
            for i in 0..=16 {
                let t = i as f64 / 16.0;
                let rhs = g.mul(&xe.evol.at(t)?, &ye.evol.at(t)?)?;
                worst = worst.max((xy.evol.at(t)?.value() - rhs.value()).norm());
            }
            let mut reports = vec![CheckReport::judged(
                "construct.conv-homomorphism",
                Measurement::new(g.name(), json!({"steps": steps}), worst, 1e-7),
                scale,
                start.elapsed().as_secs_f64(),
            )];
            if let Some(src) = field {
                let f = ConvField::from_expr(g.clone(), &src)?;
                reports.push(CheckReport::measure("construct.conv-evolve-ode", scale, || {
                    let r = conv_ode_residual(&f, 32, 1e-4, 64)?;
                    Ok(Measurement::new(g.name(), json!({"field": src, "grid": [32, 32]}), r, 1e-6))
                }));
            }
            Ok(say_reports(&reports, false))
        }
    }
}

fn counterexample_cmd(c: Counterexample, scale: f64) -> anyhow::Result<i32> {
    let start = Instant::now();
    match c {
        Counterexample::NoSolution { truncation, t, start: first, output } => {
            let x0 = TruncatedSeqState::unit(truncation, first)?;
            let sol = weighted_shift_solve(&x0, &[t])?;
            let mut table = Table::new(&["n", "closed_form", "ode"]);
            for n in 0..=truncation {
                table.push(vec![n as f64, sol.closed_form[0][n], sol.ode[0][n]]);
            }
            let on_stdout = write_table(&table, &output)?;
            let p0 = seminorm_blowup_report(first, t, 0, &[truncation])?[0].seminorm;
            let params = json!({"truncation": truncation, "t": t, "start": first, "seminorm_p0": p0});
            let rep = CheckReport::judged(
                "counterexample.no-solution",
                Measurement::new("s", params, sol.max_relative_gap, 1e-9),
                scale,
                start.elapsed().as_secs_f64(),
            );
            Ok(say_reports(&[rep], on_stdout))
        }
        Counterexample::NonUnique { k_max, output } => {
            let grid: Vec<f64> = (0..=16).map(|i| 0.2 + 0.05 * i as f64).collect();
            let rep = shift_nonuniqueness_demo(k_max, &grid)?;
            let mut cols = vec!["t".to_string()];
            cols.extend((0..=k_max).map(|k| format!("x{k}")));
            let mut table = Table::new(&cols);
            for &t in &grid {
                let mut row = vec![t];
                for k in 0..=k_max {
                    row.push(flat_derivative(k, t)?);
                }
                table.push(row);
            }
            let on_stdout = write_table(&table, &output)?;
            let r = rep.flat_residual.max(rep.zero_residual).max(rep.initial_value.abs());
            let params = json!({"k_max": k_max, "gap_at_half": rep.gap_at_half});
            let rep = CheckReport::judged("counterexample.non-unique", Measurement::new("R^N", params, r, 1e-10), scale, start.elapsed().as_secs_f64());
            Ok(say_reports(&[rep], on_stdout))
        }
        Counterexample::Transport { profile, t, output } => {
            let grid: Vec<f64> = (0..=50).map(|i| -2.0 + 0.08 * i as f64).collect();
            let rep = transport_flow_demo(&profile, t, &grid, 1e-3)?;
            let e = Expr::parse(&profile)?;
            let mut table = Table::new(&["s", "x0", "x_t"]);
            for &s in &grid {
                table.push(vec![s, e.eval_scalar(&[("s", s)])?, e.eval_scalar(&[("s", s + t)])?]);
            }
            let on_stdout = write_table(&table, &output)?;
            let params = json!({"profile": profile, "t": t, "flow_law": rep.flow_law_residual});
            let r = rep.ode_residual.max(rep.flow_law_residual);
            let rep = CheckReport::judged("counterexample.transport", Measurement::new("C(R)", params, r, 1e-6), scale, start.elapsed().as_secs_f64());
            Ok(say_reports(&[rep], on_stdout))
        }
    }
}
