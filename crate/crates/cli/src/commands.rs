use std::path::Path;

use asym_mms::finsler::{lattice_space, sample_space, FinslerModel, Lattice};
use asym_mms::flow::{heat_flow, q_laplacian, DEFAULT_TAUS};
use asym_mms::hopflax::{hj_residual, hopf_lax};
use asym_mms::io::{
    curve_family_from_json, fmt_real, read_field_csv, read_measure_csv, trajectory_sidecar_json, write_coupling_csv, write_field_csv,
    write_profiles_csv, write_trajectory_csv,
};
use asym_mms::slope::{
    ascending_slope, cheeger_energy, descending_slope, generate_curves, local_lip, minimal_weak_upper_gradient, CurveFamily,
    CurvePolicy, Direction, DEFAULT_CURVE_CAP,
};
use asym_mms::space::SpaceFile;
use asym_mms::transport::{kantorovich_dual, kr_w1, kuwada_check, optimal_transport, KuwadaSlack, Measure};
use asym_mms::{Field, Model, Space};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::Run;
use crate::svg::Series;
use crate::{Failure, Opts};

pub type Command = fn(&mut Run, &Opts) -> Result<(), Failure>;

type Cmd = Result<(), Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

pub fn check_common(o: &Opts) -> Cmd {
    if !(o.tol > 0.0 && o.tol < 1.0) {
        return Err(input(format!("--tol must lie in (0, 1), got {}", o.tol)));
    }
    if o.steps == 0 {
        return Err(input("--steps must be positive"));
    }
    Ok(())
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| input(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| input(e.to_string()))?;
    }
    w.into_inner().map_err(|e| input(e.to_string()))
}

fn list(s: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| input(format!("--{}: not a number: {:?}", flag, v))))
        .collect()
}

fn load_space(run: &mut Run, o: &Opts) -> Result<Space, Failure> {
    let path = o.space.as_deref().ok_or_else(|| input("--space is required"))?;
    let space = Space::from_json_str(&run.read(path)?)?;
    let report = space.validate();
    if !report.ok {
        return Err(input(format!("{} is not a valid space ({} violations; run validate)", path.display(), report.violations.len())));
    }
    Ok(space)
}

fn load_field(run: &mut Run, space: &Space, o: &Opts) -> Result<Field, Failure> {
    let path = o.f.as_deref().ok_or_else(|| input("--f is required"))?;
    if builtin(path).is_some() {
        return Err(input(format!("built-in field {:?} needs model coordinates; pass a field CSV", path)));
    }
    Ok(read_field_csv(space, run.read(Path::new(path))?.as_bytes())?)
}

fn load_measure(run: &mut Run, space: &Space, path: Option<&Path>, flag: &str) -> Result<Measure<f64>, Failure> {
    let path = path.ok_or_else(|| input(format!("--{} is required", flag)))?;
    Ok(read_measure_csv(space, run.read(path)?.as_bytes())?)
}

fn model(o: &Opts, default: Option<&str>) -> Result<Model, Failure> {
    let name = o.model.as_deref().or(default).ok_or_else(|| input("--model is required"))?;
    let m = match name {
        "funk" => FinslerModel::Funk { dim: o.dim },
        "randers" => FinslerModel::Randers { dim: o.dim },
        "interp" => FinslerModel::Interp { dim: o.dim, alpha: o.alpha },
        _ => return Err(input(format!("unknown model {:?} (funk, randers, interp)", name))),
    };
    m.check()?;
    Ok(m)
}

fn builtin(name: &str) -> Option<fn(&[f64]) -> f64> {
    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
    Some(match name {
        "neg-sqrt" => |x| -(1.0 - norm(x)).max(0.0).sqrt(),
        "sqrt" => |x| (1.0 - norm(x)).max(0.0).sqrt(),
        "smooth" => |x| (2.0 * x[0]).sin() + x.get(1).map_or(0.0, |y| y * y),
        "x1" => |x| x[0],
        _ => return None,
    })
}

fn builtin_field(o: &Opts, default: &str) -> Result<fn(&[f64]) -> f64, Failure> {
    let name = o.f.as_deref().unwrap_or(default);
    builtin(name).ok_or_else(|| input(format!("unknown built-in field {:?} (neg-sqrt, sqrt, smooth, x1)", name)))
}

/// Lattice over `[-1, 1]^dim` cut to the given radius.
fn model_lattice(m: &Model, h: f64, radius: f64) -> Result<Lattice<f64>, Failure> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(input(format!("mesh spacing {} outside (0, 1]", h)));
    }
    let count = (2.0 / h).round() as usize + 1;
    Ok(lattice_space(m, &vec![-1.0; m.dim()], h, &vec![count; m.dim()], Some(radius))?)
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

pub fn validate(run: &mut Run, o: &Opts) -> Cmd {
    let path = o.space.as_deref().ok_or_else(|| input("--space is required"))?;
    let text = run.read(path)?;
    let file: SpaceFile = serde_json::from_str(&text).map_err(|e| input(format!("{}: {}", path.display(), e)))?;
    let space: Space = file.into_space()?;
    let report = space.validate();
    run.json("report.json", &report)?;
    if report.ok {
        println!("{}: ok ({} points)", path.display(), space.len());
        return Ok(());
    }
    for v in &report.violations {
        let labels: Vec<&str> = v.indices.iter().map(|&i| space.points()[i].as_str()).collect();
        println!("{:?} at ({}) magnitude {}", v.kind, labels.join(", "), fmt_real(v.magnitude));
    }
    Err(Failure::Violation(format!("{} violations", report.violations.len())))
}

pub fn sample(run: &mut Run, o: &Opts) -> Cmd {
    let m = model(o, None)?;
    let (space, coords) = if let Some(path) = &o.points {
        let text = run.read(path)?;
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut pts = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| input(e.to_string()))?;
            pts.push(rec.iter().map(|v| v.parse::<f64>().map_err(|_| input(format!("bad coordinate {:?}", v)))).collect::<Result<Vec<_>, _>>()?);
        }
        (sample_space(&m, &pts, o.k, None)?, pts)
    } else if let Some(n) = o.count {
        let r = o.radius.unwrap_or(0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
        let mut pts = Vec::with_capacity(n);
        while pts.len() < n {
            let x: Vec<f64> = (0..m.dim()).map(|_| rng.gen_range(-r..r)).collect();
            if x.iter().map(|v| v * v).sum::<f64>() <= r * r {
                pts.push(x);
            }
        }
        (sample_space(&m, &pts, o.k, None)?, pts)
    } else if let Some(mesh) = &o.mesh {
        let h = list(mesh, "mesh")?[0];
        let lat = model_lattice(&m, h, o.radius.unwrap_or(1.0 - h / 2.0))?;
        (lat.space, lat.coords)
    } else {
        return Err(input("sample needs --points, --count or --mesh"));
    };
    run.write("space.json", space.to_json_string() + "\n")?;
    let header: Vec<String> = std::iter::once("point".to_string()).chain((0..m.dim()).map(|i| format!("x{}", i + 1))).collect();
    let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let rows = space.points().iter().zip(&coords).map(|(l, c)| std::iter::once(l.clone()).chain(c.iter().map(|&v| fmt_real(v))).collect());
    run.write("coords.csv", csv_table(&header, rows)?)?;
    if let Some(name) = &o.f {
        let f = builtin_field(o, name)?;
        let field = Field::new(coords.iter().map(|c| f(c)).collect())?;
        run.write_with("field.csv", |w| write_field_csv(&space, &field, w))?;
    }
    println!("{} points, mesh size {}", space.len(), space.mesh_size());
    Ok(())
}

pub fn slope(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let f = load_field(run, &space, o)?;
    let (up, down, lip) = (ascending_slope(&space, &f)?, descending_slope(&space, &f)?, local_lip(&space, &f)?);
    let rows = (0..space.len()).map(|i| vec![space.points()[i].clone(), fmt_real(up[i]), fmt_real(down[i]), fmt_real(lip[i])]);
    run.write("slopes.csv", csv_table(&["point", "ascending", "descending", "local_lip"], rows)?)
}

pub fn cheeger(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let f = load_field(run, &space, o)?;
    let q = o.q.unwrap_or(2.0);
    let fwd = cheeger_energy(&space, &f, q, Direction::Forward)?;
    let bwd = cheeger_energy(&space, &f, q, Direction::Backward)?;
    println!("forward {} backward {}", fmt_real(fwd), fmt_real(bwd));
    run.json("cheeger.json", &json!({ "q": q, "forward": fwd, "backward": bwd }))
}

fn curve_family(run: &mut Run, space: &Space, o: &Opts) -> Result<CurveFamily, Failure> {
    if let Some(path) = &o.curves {
        return Ok(curve_family_from_json(space, &run.read(path)?)?);
    }
    let policy = match o.policy.as_str() {
        "edges" => CurvePolicy::Edges,
        "geodesics" => CurvePolicy::Geodesics,
        s => match s.strip_prefix("paths:").and_then(|n| n.parse().ok()) {
            Some(n) => CurvePolicy::PathsUpToLength(n),
            None => return Err(input(format!("unknown policy {:?} (edges, paths:N, geodesics)", s))),
        },
    };
    Ok(generate_curves(space, policy, DEFAULT_CURVE_CAP)?)
}

pub fn mwug(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let f = load_field(run, &space, o)?;
    let q = o.q.unwrap_or(2.0);
    let family = curve_family(run, &space, o)?;
    let g = minimal_weak_upper_gradient(&space, &f, &family, q, o.tol)?;
    run.write_with("gradient.csv", |w| write_field_csv(&space, &g.field, w))?;
    let slope_energy = cheeger_energy(&space, &f, q, Direction::Forward)?;
    println!("energy {} (slope energy {})", fmt_real(g.energy), fmt_real(slope_energy));
    run.json(
        "mwug.json",
        &json!({
            "q": q,
            "curves": family.paths.len(),
            "active_constraints": g.active_constraints,
            "energy": g.energy,
            "slope_energy": slope_energy,
            "kkt_residual": g.kkt_residual,
            "iterations": g.iterations,
        }),
    )
}

fn trajectory_plot(run: &mut Run, space: &Space, times: &[f64], states: &[Field]) -> Cmd {
    let series: Vec<Series> = (0..space.len().min(8))
        .map(|i| Series { label: space.points()[i].clone(), points: times.iter().zip(states).map(|(&t, f)| (t, f[i])).collect() })
        .collect();
    run.plot("trajectory.svg", "heat flow", "time", "value", &series)
}

pub fn heatflow(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let f = load_field(run, &space, o)?;
    let q = o.q.unwrap_or(2.0);
    let tr = heat_flow(&space, &f, q, o.horizon, o.steps, o.tol)?;
    run.write_with("trajectory.csv", |w| write_trajectory_csv(&space, &tr, w))?;
    run.write("diagnostics.json", trajectory_sidecar_json(&tr) + "\n")?;
    trajectory_plot(run, &space, &tr.times, &tr.states)?;
    let worst = tr.diagnostics.iter().map(|d| d.kkt_residual).fold(0.0f64, f64::max);
    println!("{} steps of {}, worst KKT residual {:e}", o.steps, fmt_real(tr.tau), worst);
    Ok(())
}

pub fn laplacian(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let f = load_field(run, &space, o)?;
    let q = o.q.unwrap_or(2.0);
    let est = q_laplacian(&space, &f, q, &DEFAULT_TAUS, o.tol)?;
    run.write_with("laplacian.csv", |w| write_field_csv(&space, &est.field, w))?;
    run.json("laplacian.json", &json!({ "q": q, "method": est.method, "taus": est.taus, "residual": est.residual }))
}

pub fn hopflax(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let f = load_field(run, &space, o)?;
    let p = o.p.unwrap_or(2.0);
    let times = list(o.t.as_deref().unwrap_or("1"), "t")?;
    let profiles = times.iter().map(|&t| hopf_lax(&space, &f, t, p)).collect::<Result<Vec<_>, _>>()?;
    run.write_with("profiles.csv", |w| write_profiles_csv(&space, &profiles, w))?;
    let states: Vec<&Field> = profiles.iter().map(|pr| &pr.q_values).collect();
    let series: Vec<Series> = (0..space.len().min(8))
        .map(|i| Series { label: space.points()[i].clone(), points: times.iter().zip(&states).map(|(&t, s)| (t, s[i])).collect() })
        .collect();
    run.plot("profiles.svg", "Hopf-Lax values", "t", "Q_t f", &series)
}

#[derive(Serialize)]
struct MeshRow {
    spacing: f64,
    mesh_size: f64,
    points: usize,
    values: Vec<f64>,
}

fn mesh_table(run: &mut Run, name: &str, columns: &[&str], rows: &[MeshRow]) -> Cmd {
    let mut header = vec!["spacing", "mesh_size", "points"];
    header.extend_from_slice(columns);
    let body = rows.iter().map(|r| {
        let mut v = vec![fmt_real(r.spacing), fmt_real(r.mesh_size), r.points.to_string()];
        v.extend(r.values.iter().map(|&x| fmt_real(x)));
        v
    });
    run.write(name, csv_table(&header, body)?)
}

pub fn hjcheck(run: &mut Run, o: &Opts) -> Cmd {
    let p = o.p.unwrap_or(2.0);
    let t = list(o.t.as_deref().unwrap_or("0.5"), "t")?[0];
    let h = 1e-5 * t;
    if o.space.is_some() {
        let space = load_space(run, o)?;
        let f = load_field(run, &space, o)?;
        let r = hj_residual(&space, &f, p, t, h)?;
        run.write_with("hj_residual.csv", |w| write_field_csv(&space, &r, w))?;
        println!("max residual {}", fmt_real(r.max()));
        return Ok(());
    }
    let m = model(o, Some("funk"))?;
    let f = builtin_field(o, "smooth")?;
    let spacings = list(o.mesh.as_deref().unwrap_or("0.2,0.1,0.05"), "mesh")?;
    let radius = o.radius.unwrap_or(0.8);
    let rows = spacings
        .par_iter()
        .map(|&s| -> Result<MeshRow, Failure> {
            let lat = model_lattice(&m, s, radius)?;
            let field = Field::new(lat.coords.iter().map(|c| f(c)).collect())?;
            let r = hj_residual(&lat.space, &field, p, t, h)?;
            Ok(MeshRow { spacing: s, mesh_size: lat.space.mesh_size(), points: lat.space.len(), values: vec![r.max().max(0.0)] })
        })
        .collect::<Result<Vec<_>, _>>()?;
    mesh_table(run, "hjcheck.csv", &["max_residual"], &rows)?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.mesh_size, r.values[0])).collect();
    run.plot("hjcheck.svg", "HJ subsolution residual", "mesh size", "max positive residual", &[Series { label: "residual".into(), points: pts }])?;
    for r in &rows {
        println!("spacing {}: max residual {}", r.spacing, fmt_real(r.values[0]));
    }
    if rows.windows(2).all(|w| w[1].values[0] < w[0].values[0]) {
        Ok(())
    } else {
        Err(Failure::Violation("residual does not decrease under refinement".into()))
    }
}

pub fn wasserstein(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let mu = load_measure(run, &space, o.mu.as_deref(), "mu")?;
    let nu = load_measure(run, &space, o.nu.as_deref(), "nu")?;
    let p = o.p.unwrap_or(2.0);
    let s = optimal_transport(&space, &mu, &nu, p)?;
    run.write_with("coupling.csv", |w| write_coupling_csv(&space, &s.coupling, w))?;
    println!("W_{} = {}", p, fmt_real(s.value));
    run.json("wasserstein.json", &json!({ "p": p, "value": s.value, "cost": s.cost, "pivots": s.pivots }))
}

fn potentials_csv(space: &Space, columns: &[(&str, &Field)]) -> Result<Vec<u8>, Failure> {
    let header: Vec<&str> = std::iter::once("point").chain(columns.iter().map(|c| c.0)).collect();
    let rows = (0..space.len()).map(|i| std::iter::once(space.points()[i].clone()).chain(columns.iter().map(|c| fmt_real(c.1[i]))).collect());
    csv_table(&header, rows)
}

pub fn dual(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let mu = load_measure(run, &space, o.mu.as_deref(), "mu")?;
    let nu = load_measure(run, &space, o.nu.as_deref(), "nu")?;
    let p = o.p.unwrap_or(2.0);
    let c = kantorovich_dual(&space, &mu, &nu, p, o.tol)?;
    run.write("potentials.csv", potentials_csv(&space, &[("psi", &c.psi), ("phi", &c.phi)])?)?;
    run.json("dual.json", &c)?;
    println!("primal {} dual {} gap {:e}", fmt_real(c.primal), fmt_real(c.dual), c.gap);
    if c.holds {
        Ok(())
    } else {
        Err(Failure::Violation(format!("certificate fails at tolerance {:e}", o.tol)))
    }
}

pub fn krw1(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let mu = load_measure(run, &space, o.mu.as_deref(), "mu")?;
    let nu = load_measure(run, &space, o.nu.as_deref(), "nu")?;
    let (value, psi) = kr_w1(&space, &mu, &nu)?;
    let w1 = optimal_transport(&space, &mu, &nu, 1.0)?.value;
    run.write("potential.csv", potentials_csv(&space, &[("psi", &psi)])?)?;
    run.json("krw1.json", &json!({ "value": value, "w1_primal": w1, "difference": (value - w1).abs() }))?;
    println!("sup over potentials {} primal W_1 {}", fmt_real(value), fmt_real(w1));
    if (value - w1).abs() <= o.tol.max(1e-10) * (1.0 + w1) {
        Ok(())
    } else {
        Err(Failure::Violation("dual and primal W_1 disagree".into()))
    }
}

pub fn kuwada(run: &mut Run, o: &Opts) -> Cmd {
    let space = load_space(run, o)?;
    let f = load_field(run, &space, o)?;
    let p = o.p.unwrap_or(2.0);
    if p <= 1.0 {
        return Err(input("--p must exceed 1"));
    }
    let q = conjugate(p);
    if let Some(given) = o.q {
        if (given - q).abs() > 1e-12 {
            return Err(input(format!("--q {} is not conjugate to --p {} (expected {})", given, p, q)));
        }
    }
    let tr = heat_flow(&space, &f, q, o.horizon, o.steps, o.tol)?;
    let rep = kuwada_check(&space, &tr, p, o.lag, KuwadaSlack::default())?;
    let rows = rep.steps.iter().map(|s| {
        vec![
            s.step.to_string(),
            fmt_real(s.time),
            fmt_real(s.speed),
            fmt_real(s.bound),
            fmt_real(s.allowed),
            s.flagged.to_string(),
            s.holds.to_string(),
        ]
    });
    run.write("kuwada.csv", csv_table(&["step", "time", "speed", "bound", "allowed", "flagged", "holds"], rows)?)?;
    let series = [
        Series { label: "speed".into(), points: rep.steps.iter().map(|s| (s.time, s.speed)).collect() },
        Series { label: "allowed".into(), points: rep.steps.iter().map(|s| (s.time, s.allowed)).collect() },
    ];
    run.plot("kuwada.svg", "backward speed against the bound", "time", "W_p speed", &series)?;
    let failing = rep.steps.iter().filter(|s| !s.holds).count();
    println!("{} steps checked, slack {}, {} failing", rep.steps.len(), fmt_real(rep.slack), failing);
    if rep.holds {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{} steps exceed the bound", failing)))
    }
}

pub fn sobolev_asymmetry(run: &mut Run, o: &Opts) -> Cmd {
    let m = model(o, Some("funk"))?;
    let f = builtin_field(o, "neg-sqrt")?;
    let q = o.q.unwrap_or(2.0);
    let spacings = list(o.mesh.as_deref().unwrap_or("0.2,0.1,0.05"), "mesh")?;
    let rows = spacings
        .par_iter()
        .map(|&s| -> Result<MeshRow, Failure> {
            let lat = model_lattice(&m, s, o.radius.unwrap_or(1.0 - s / 2.0))?;
            let field = Field::new(lat.coords.iter().map(|c| f(c)).collect())?;
            let a = cheeger_energy(&lat.space, &field, q, Direction::Forward)?;
            let b = cheeger_energy(&lat.space, &field.neg(), q, Direction::Forward)?;
            Ok(MeshRow { spacing: s, mesh_size: lat.space.mesh_size(), points: lat.space.len(), values: vec![a, b, b / a] })
        })
        .collect::<Result<Vec<_>, _>>()?;
    mesh_table(run, "sobolev.csv", &["ch_f", "ch_neg_f", "ratio"], &rows)?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.mesh_size, r.values[2])).collect();
    run.plot("sobolev.svg", "Ch(-f) / Ch(f)", "mesh size", "ratio", &[Series { label: "ratio".into(), points: pts }])?;
    for r in &rows {
        println!("spacing {}: Ch(f) {} Ch(-f) {} ratio {}", r.spacing, fmt_real(r.values[0]), fmt_real(r.values[1]), fmt_real(r.values[2]));
    }
    if rows.iter().all(|r| r.values[2] > 1.0) && rows.windows(2).all(|w| w[1].values[2] > w[0].values[2]) {
        Ok(())
    } else {
        Err(Failure::Violation("ratio is not above 1 and increasing under refinement".into()))
    }
}
