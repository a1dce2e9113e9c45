use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::ThreePhaseFrame;
use crate::error::{Error, Result};

const HEADER: [&str; 4] = ["t", "va", "vb", "vc"];

/// Frames read from a recording, with the sampling rate inferred from the
/// median sampling interval (`None` for fewer than two rows).
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub fs: Option<f64>,
    pub frames: Vec<ThreePhaseFrame>,
}

/// Writes `t,va,vb,vc` rows. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_frames<W: Write>(out: W, frames: &[ThreePhaseFrame]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for f in frames {
        w.write_record([f.t, f.va, f.vb, f.vc].map(|v| v.to_string()))?;
    }
    w.flush()
}

fn malformed(line: u64, reason: impl Into<String>) -> Error {
    Error::MalformedRow {
        line,
        reason: reason.into(),
    }
}

/// Parses a `t,va,vb,vc` recording.
pub fn read_frames<R: Read>(input: R) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(malformed(1, format!("expected header t,va,vb,vc, got {:?}", header)));
    }
    let mut frames: Vec<ThreePhaseFrame> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(malformed(line, format!("expected 4 fields, got {}", record.len())));
        }
        let mut values = [0.0; 4];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| malformed(line, format!("not a finite number: {field:?}")))?;
        }
        let [t, va, vb, vc] = values;
        if frames.last().is_some_and(|prev| t <= prev.t) {
            return Err(Error::NonMonotoneTime { line });
        }
        frames.push(ThreePhaseFrame {
            n: frames.len() as u64,
            t,
            va,
            vb,
            vc,
        });
    }

    let mut steps: Vec<f64> = frames.windows(2).map(|w| w[1].t - w[0].t).collect();
    if steps.is_empty() {
        return Ok(Ingested { fs: None, frames });
    }
    steps.sort_by(f64::total_cmp);
    let median = if steps.len() % 2 == 1 {
        steps[steps.len() / 2]
    } else {
        0.5 * (steps[steps.len() / 2 - 1] + steps[steps.len() / 2])
    };
    let worst = steps
        .iter()
        .map(|s| (s - median).abs() / median)
        .fold(0.0, f64::max);
    if worst > 0.01 {
        return Err(Error::JitterExcess {
            jitter: 100.0 * worst,
        });
    }
    Ok(Ingested {
        fs: Some(1.0 / median),
        frames,
    })
}

/// Reads a recording from disk; see [`read_frames`].
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<Ingested> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_frames(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{generate, preset};

    fn parse(text: &str) -> Result<Ingested> {
        read_frames(text.as_bytes())
    }

    #[test]
    fn generated_stream_round_trips_exactly() {
        let frames = generate(&preset("sag").unwrap()).unwrap();
        let mut buf = Vec::new();
        write_frames(&mut buf, &frames).unwrap();
        let back = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.frames, frames);
        assert!((back.fs.unwrap() - 1000.0).abs() < 1e-6);
    }

    #[test]
    fn decreasing_time_is_rejected() {
        let err = parse("t,va,vb,vc\n0.0,1,2,3\n0.002,1,2,3\n0.001,1,2,3\n").unwrap_err();
        assert!(matches!(err, Error::NonMonotoneTime { line: 4 }), "{err}");
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(matches!(parse("t,va,vb\n0,1,2\n"), Err(Error::MalformedRow { line: 1, .. })));
        assert!(matches!(
            parse("t,va,vb,vc\n0,1,2,x\n"),
            Err(Error::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(parse("t,va,vb,vc\n0,1,2\n"), Err(Error::MalformedRow { .. })));
    }

    #[test]
    fn jitter_is_rejected() {
        let err = parse("t,va,vb,vc\n0,0,0,0\n0.001,0,0,0\n0.002,0,0,0\n0.00305,0,0,0\n").unwrap_err();
        assert!(matches!(err, Error::JitterExcess { .. }));
    }

    #[test]
    fn header_only_is_empty() {
        let got = parse("t,va,vb,vc\n").unwrap();
        assert!(got.frames.is_empty());
        assert_eq!(got.fs, None);
    }

    #[test]
    fn missing_file_reports_path() {
        let err = ingest_csv("/nonexistent/rec.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/rec.csv"));
    }
}
