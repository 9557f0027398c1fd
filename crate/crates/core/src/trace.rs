//! Orbit trace CSV.
//!
//! Header `t,re,im,F,k,theta,C_k,step_size,delta_bound,branch`, one row per
//! iterate. The step columns describe the move that leaves the row's
//! iterate, so they are empty on the final row; Newton moves leave the
//! robust-step columns empty and only fill `branch`. Floats carry 17
//! significant digits.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::poly::Complex;
use crate::rnm::{Branch, Orbit};

pub const HEADER: [&str; 10] = [
    "t",
    "re",
    "im",
    "F",
    "k",
    "theta",
    "C_k",
    "step_size",
    "delta_bound",
    "branch",
];

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub point: Complex,
    pub f: f64,
    pub k: Option<usize>,
    pub theta: Option<f64>,
    pub step_constant: Option<f64>,
    pub step_size: Option<f64>,
    pub delta_bound: Option<f64>,
    pub branch: Option<Branch>,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rows(orbit: &Orbit) -> Vec<TraceRow> {
    orbit
        .points
        .iter()
        .zip(&orbit.f_values)
        .enumerate()
        .map(|(t, (&point, &f))| {
            let transition = orbit.transitions.get(t);
            let info = transition.and_then(|tr| tr.info);
            TraceRow {
                t,
                point,
                f,
                k: info.map(|i| i.k),
                theta: info.map(|i| i.theta),
                step_constant: info.map(|i| i.step_constant),
                step_size: info.map(|i| i.step_size),
                delta_bound: info.map(|i| i.decrement_bound),
                branch: transition.map(|tr| tr.branch),
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(orbit: &Orbit, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(HEADER)?;
    for row in rows(orbit) {
        let opt = |x: Option<f64>| x.map(float).unwrap_or_default();
        writer.write_record([
            row.t.to_string(),
            float(row.point.re),
            float(row.point.im),
            float(row.f),
            row.k.map(|k| k.to_string()).unwrap_or_default(),
            opt(row.theta),
            opt(row.step_constant),
            opt(row.step_size),
            opt(row.delta_bound),
            row.branch
                .map(|b| b.as_str().to_string())
                .unwrap_or_default(),
        ])?;
    }
    writer.flush().map_err(|source| Error::Io {
        context: "writing trace".into(),
        source,
    })?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut reader = csv::Reader::from_reader(input);
    if reader.headers()?.iter().ne(HEADER) {
        return Err(Error::Parse("unexpected trace header".into()));
    }
    let parse_f = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Parse(format!("bad number `{s}` in trace")))
    };
    let opt_f = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            parse_f(s).map(Some)
        }
    };
    let mut out = Vec::new();
    for record in reader.records() {
        let r = record?;
        let field = |i: usize| r.get(i).unwrap_or("");
        let int = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad integer `{s}` in trace")))
        };
        out.push(TraceRow {
            t: int(field(0))?,
            point: Complex::new(parse_f(field(1))?, parse_f(field(2))?),
            f: parse_f(field(3))?,
            k: if field(4).is_empty() {
                None
            } else {
                Some(int(field(4))?)
            },
            theta: opt_f(field(5))?,
            step_constant: opt_f(field(6))?,
            step_size: opt_f(field(7))?,
            delta_bound: opt_f(field(8))?,
            branch: if field(9).is_empty() {
                None
            } else {
                Some(field(9).parse()?)
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::rnm::{run_modified_rnm, StoppingCriteria};

    #[test]
    fn golden_first_row_and_round_trip() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let orbit = run_modified_rnm(
            &p,
            Complex::new(0.0, 0.0),
            &StoppingCriteria::modified(1e-6, 1000).unwrap(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&orbit, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,re,im,F,k,theta,C_k,step_size,delta_bound,branch"
        );
        assert!(lines
            .next()
            .unwrap()
            .starts_with("0,0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0,2,"));

        let parsed = read_csv(buf.as_slice()).unwrap();
        assert_eq!(parsed, rows(&orbit));
        assert!((parsed[1].point.re + 1.0 / 9.0).abs() < 1e-17);
        assert_eq!(parsed[0].branch, Some(Branch::NearCriticalAccepted));
        let last = parsed.last().unwrap();
        assert_eq!((last.k, last.branch), (None, None));
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
