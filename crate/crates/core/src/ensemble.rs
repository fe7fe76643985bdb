//! Seeded collections of grid samples and their text format.

use serde::{Deserialize, Serialize};

use crate::grid::GridField;
use crate::{CoreError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleHeader {
    pub sampler: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub cells: usize,
}

/// Samples of a field on a common grid at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleEnsemble {
    pub header: EnsembleHeader,
    pub time: f64,
    pub samples: Vec<Vec<f64>>,
}

impl SampleEnsemble {
    pub fn new(header: EnsembleHeader, time: f64, samples: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(i) = samples.iter().position(|s| s.len() != header.cells + 1) {
            return Err(CoreError::Domain(format!("sample {i} does not match the grid")));
        }
        Ok(SampleEnsemble { header, time, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn index_of(&self, x: f64) -> usize {
        ((x * self.header.cells as f64).round() as usize).min(self.header.cells)
    }

    /// Values at the node nearest `x`.
    pub fn marginal(&self, x: f64) -> Vec<f64> {
        let j = self.index_of(x);
        self.samples.iter().map(|s| s[j]).collect()
    }

    pub fn fields(&self) -> impl Iterator<Item = GridField> + '_ {
        self.samples.iter().map(|s| GridField {
            values: s.clone(),
            time: self.time,
        })
    }
}

/// Write ensembles sharing one header: a `#` line with the header as JSON,
/// then rows `time,path,v_0,..,v_N`.
pub fn write_snapshot(ensembles: &[SampleEnsemble]) -> Result<String> {
    let first = ensembles
        .first()
        .ok_or_else(|| CoreError::Domain("no ensembles to write".into()))?;
    let header = serde_json::to_string(&first.header).map_err(|e| CoreError::Domain(e.to_string()))?;
    let mut out = format!("# {header}\n");
    let cols: Vec<String> = (0..=first.header.cells).map(|j| format!("h{j}")).collect();
    out.push_str(&format!("time,path,{}\n", cols.join(",")));
    for e in ensembles {
        if e.header != first.header {
            return Err(CoreError::Domain("ensembles have different headers".into()));
        }
        for (p, s) in e.samples.iter().enumerate() {
            let vals: Vec<String> = s.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&format!("{:e},{p},{}\n", e.time, vals.join(",")));
        }
    }
    Ok(out)
}

pub fn read_snapshot(text: &str) -> Result<Vec<SampleEnsemble>> {
    let bad = |m: String| CoreError::Domain(format!("snapshot: {m}"));
    let mut lines = text.lines();
    let header_line = lines.next().ok_or_else(|| bad("empty".into()))?;
    let header: EnsembleHeader = serde_json::from_str(header_line.trim_start_matches('#').trim())
        .map_err(|e| bad(e.to_string()))?;
    lines.next();
    let mut out: Vec<SampleEnsemble> = Vec::new();
    for line in lines {
        let mut parts = line.split(',');
        let time: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(format!("bad time in {line:?}")))?;
        parts.next();
        let vals: std::result::Result<Vec<f64>, _> = parts.map(str::parse).collect();
        let vals = vals.map_err(|e| bad(format!("{e}")))?;
        match out.last_mut() {
            Some(e) if e.time == time => e.samples.push(vals),
            _ => out.push(SampleEnsemble {
                header: header.clone(),
                time,
                samples: vec![vals],
            }),
        }
    }
    for e in &out {
        SampleEnsemble::new(e.header.clone(), e.time, Vec::new())?;
        if e.samples.iter().any(|s| s.len() != header.cells + 1) {
            return Err(bad("row length does not match the grid".into()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip() {
        let header = EnsembleHeader {
            sampler: "test".into(),
            parameters: serde_json::json!({"u": 0.5}),
            seed: 3,
            cells: 2,
        };
        let a = SampleEnsemble::new(header.clone(), 0.0, vec![vec![0.0, 0.1, -0.25], vec![0.0, 1e-17, 3.0]]).unwrap();
        let b = SampleEnsemble::new(header, 1.0, vec![vec![0.0, 2.0, 1.0 / 3.0]]).unwrap();
        let text = write_snapshot(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(read_snapshot(&text).unwrap(), vec![a, b]);
    }
}
