//! CSV and JSON import/export for fields, measures, curve families,
//! trajectories and Hopf–Lax profiles.
//!
//! Point columns hold either a label of the space or a 0-based index.
//! Reals are written with 17 significant digits so they round-trip.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{FlowTrajectory, StepDiagnostics};
use crate::hopflax::HopfLaxProfile;
use crate::scalar::Scalar;
use crate::slope::{CurveFamily, DiscretePath, ScalarField};
use crate::space::FiniteAsymmSpace;
use crate::transport::{Coupling, Measure};

/// 17 significant digits.
pub fn fmt_real<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.to_f64().unwrap_or(f64::NAN))
}

fn parse_real<T: Scalar>(s: &str) -> Result<T> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse(format!("not a number: {:?}", s)))?;
    T::from_f64(v).ok_or_else(|| Error::Parse(format!("not representable: {:?}", s)))
}

fn point_index(labels: &HashMap<&str, usize>, n: usize, s: &str) -> Result<usize> {
    let s = s.trim();
    if let Some(&i) = labels.get(s) {
        return Ok(i);
    }
    match s.parse::<usize>() {
        Ok(i) if i < n => Ok(i),
        _ => Err(Error::Parse(format!("unknown point {:?}", s))),
    }
}

/// Reads `(point, value)` rows with a header line; every point exactly once.
pub fn read_field_csv<T: Scalar, R: Read>(space: &FiniteAsymmSpace<T>, reader: R) -> Result<ScalarField<T>> {
    let n = space.len();
    let labels: HashMap<&str, usize> = space.points().iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut values: Vec<Option<T>> = vec![None; n];
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::Parse(format!("expected point,value but got {:?}", rec)));
        }
        let i = point_index(&labels, n, &rec[0])?;
        if values[i].is_some() {
            return Err(Error::Parse(format!("point {:?} listed twice", &rec[0])));
        }
        values[i] = Some(parse_real(&rec[1])?);
    }
    let values: Vec<T> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("no value for point {}", space.points()[i]))))
        .collect::<Result<_>>()?;
    ScalarField::new(values)
}

pub fn write_field_csv<T: Scalar, W: Write>(space: &FiniteAsymmSpace<T>, field: &ScalarField<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["point", "value"])?;
    for (label, &v) in space.points().iter().zip(field.values()) {
        w.write_record([label.as_str(), &fmt_real(v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_measure_csv<T: Scalar, R: Read>(space: &FiniteAsymmSpace<T>, reader: R) -> Result<Measure<T>> {
    Measure::new(read_field_csv(space, reader)?.into_vec())
}

pub fn write_measure_csv<T: Scalar, W: Write>(space: &FiniteAsymmSpace<T>, mu: &Measure<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["point", "weight"])?;
    for (label, &v) in space.points().iter().zip(mu.weights()) {
        w.write_record([label.as_str(), &fmt_real(v)])?;
    }
    w.flush()?;
    Ok(())
}

/// Dense matrix with point labels in the header row and first column.
pub fn write_coupling_csv<T: Scalar, W: Write>(space: &FiniteAsymmSpace<T>, coupling: &Coupling<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![String::new()];
    header.extend(space.points().iter().cloned());
    w.write_record(&header)?;
    for (label, row) in space.points().iter().zip(&coupling.plan) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|&v| fmt_real(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn curve_family_to_json(family: &CurveFamily) -> String {
    serde_json::to_string_pretty(family).expect("curve families serialize")
}

/// Accepts either a full family object or a bare array of index sequences;
/// every path is validated against the neighbor relation.
pub fn curve_family_from_json<T: Scalar>(space: &FiniteAsymmSpace<T>, s: &str) -> Result<CurveFamily> {
    let value: serde_json::Value = serde_json::from_str(s)?;
    let (policy, raw) = match value {
        serde_json::Value::Array(_) => (None, serde_json::from_value::<Vec<Vec<usize>>>(value)?),
        _ => {
            let fam: CurveFamily = serde_json::from_value(value)?;
            (Some(fam.policy), fam.paths.iter().map(|p| p.vertices().to_vec()).collect())
        }
    };
    let paths: Vec<DiscretePath> = raw.into_iter().map(|v| DiscretePath::new(space, v)).collect::<Result<_>>()?;
    if paths.is_empty() {
        return Err(Error::InvalidPath("empty curve family".into()));
    }
    Ok(CurveFamily { policy: policy.unwrap_or(crate::slope::CurvePolicy::Edges), paths })
}

/// Long format: `step, time, point, value`.
pub fn write_trajectory_csv<T: Scalar, W: Write>(space: &FiniteAsymmSpace<T>, traj: &FlowTrajectory<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["step", "time", "point", "value"])?;
    for (k, (t, f)) in traj.times.iter().zip(&traj.states).enumerate() {
        let (step, time) = (k.to_string(), fmt_real(*t));
        for (label, &v) in space.points().iter().zip(f.values()) {
            w.write_record([step.as_str(), time.as_str(), label.as_str(), &fmt_real(v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TrajectorySidecar<'a, T> {
    tau: f64,
    q: f64,
    steps: usize,
    diagnostics: &'a [StepDiagnostics<T>],
}

pub fn trajectory_sidecar_json<T: Scalar + Serialize>(traj: &FlowTrajectory<T>) -> String {
    let side = TrajectorySidecar {
        tau: traj.tau.to_f64().unwrap_or(f64::NAN),
        q: traj.q.to_f64().unwrap_or(f64::NAN),
        steps: traj.diagnostics.len(),
        diagnostics: &traj.diagnostics,
    };
    serde_json::to_string_pretty(&side).expect("diagnostics serialize")
}

/// `t, point, Q, d_minus, d_plus, argmin_count`
pub fn write_profiles_csv<T: Scalar, W: Write>(space: &FiniteAsymmSpace<T>, profiles: &[HopfLaxProfile<T>], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "point", "Q", "d_minus", "d_plus", "argmin_count"])?;
    for prof in profiles {
        let t = fmt_real(prof.t);
        for (y, label) in space.points().iter().enumerate() {
            w.write_record([
                t.as_str(),
                label.as_str(),
                &fmt_real(prof.q_values[y]),
                &fmt_real(prof.d_minus[y]),
                &fmt_real(prof.d_plus[y]),
                &prof.argmins[y].len().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slope::{generate_curves, CurvePolicy};

    fn two_point() -> FiniteAsymmSpace<f64> {
        FiniteAsymmSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap()
    }

    #[test]
    fn field_round_trip() {
        let s = two_point();
        let f = ScalarField::new(vec![0.1, -1.0 / 3.0]).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&s, &f, &mut buf).unwrap();
        assert_eq!(read_field_csv(&s, buf.as_slice()).unwrap(), f);
        let by_index = "point,value\n1,2.5\n0,1\n";
        assert_eq!(read_field_csv(&s, by_index.as_bytes()).unwrap().values(), &[1.0, 2.5]);
        assert!(read_field_csv(&s, "point,value\n0,1\n".as_bytes()).is_err());
        assert!(read_field_csv(&s, "point,value\n0,1\n0,2\n1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn curve_family_round_trip() {
        let s = two_point();
        let fam = generate_curves(&s, CurvePolicy::PathsUpToLength(1), 10).unwrap();
        let back = curve_family_from_json(&s, &curve_family_to_json(&fam)).unwrap();
        assert_eq!(back, fam);
        let bare = curve_family_from_json(&s, "[[0, 1]]").unwrap();
        assert_eq!(bare.paths.len(), 1);
        assert!(curve_family_from_json(&s, "[[0, 0]]").is_err());
    }
}
