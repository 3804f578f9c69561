//! Hypnogram container and its CSV exchange format.
//!
//! On disk a hypnogram is `epoch,stage` with an optional header and stage
//! tokens W/N1/N2/N3/R; extra columns (provenance and the like) are
//! ignored, so the scorer's own output files read back directly.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use noctua_core::stage::StageLabel;
use serde::{Deserialize, Serialize};

use crate::EvalError;

/// One stage per epoch, in temporal order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hypnogram {
    pub stages: Vec<StageLabel>,
}

impl Hypnogram {
    pub fn new(stages: Vec<StageLabel>) -> Self {
        Self { stages }
    }

    pub fn epoch_count(&self) -> usize {
        self.stages.len()
    }

    /// Inclusive epoch crop.
    pub fn slice(&self, first: usize, last: usize) -> Hypnogram {
        Hypnogram::new(self.stages[first..=last].to_vec())
    }
}

impl From<Vec<StageLabel>> for Hypnogram {
    fn from(stages: Vec<StageLabel>) -> Self {
        Self::new(stages)
    }
}

pub fn write_hypnogram<W: Write>(mut out: W, hyp: &Hypnogram) -> std::io::Result<()> {
    writeln!(out, "epoch,stage")?;
    for (i, stage) in hyp.stages.iter().enumerate() {
        writeln!(out, "{i},{stage}")?;
    }
    Ok(())
}

/// Parse a hypnogram CSV. `path` is used only for error messages.
pub fn read_hypnogram<R: Read>(input: R, path: &str) -> Result<Hypnogram, EvalError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let parse_err = |line: usize, message: String| EvalError::Parse {
        path: path.to_owned(),
        line,
        message,
    };

    let mut stages = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 1;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let index_field = record.get(0).unwrap_or("");
        if row == 0 && index_field.parse::<usize>().is_err() {
            continue; // header row
        }
        let index: usize = index_field
            .parse()
            .map_err(|_| parse_err(line, format!("bad epoch index {index_field:?}")))?;
        if index != stages.len() {
            return Err(parse_err(
                line,
                format!("epoch index {index} out of order (expected {})", stages.len()),
            ));
        }
        let token = record
            .get(1)
            .ok_or_else(|| parse_err(line, "missing stage column".to_owned()))?;
        let stage = StageLabel::parse(token)
            .ok_or_else(|| parse_err(line, format!("unknown stage token {token:?}")))?;
        stages.push(stage);
    }
    if stages.is_empty() {
        return Err(EvalError::Empty("hypnogram file"));
    }
    Ok(Hypnogram::new(stages))
}

/// Load every `.csv` in a directory as one scorer each, sorted by file name
/// so panel order is stable across platforms.
pub fn read_panel_dir(dir: &Path) -> Result<Vec<(String, Hypnogram)>, EvalError> {
    let io_err = |source: std::io::Error| EvalError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io_err)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err)?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("csv")))
        .collect();
    paths.sort();

    let mut panel = Vec::with_capacity(paths.len());
    for p in paths {
        let display = p.display().to_string();
        let file = fs::File::open(&p).map_err(|source| EvalError::Io {
            path: display.clone(),
            source,
        })?;
        let name = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| display.clone());
        panel.push((name, read_hypnogram(file, &display)?));
    }
    if panel.is_empty() {
        return Err(EvalError::Empty("panel directory has no .csv files"));
    }
    Ok(panel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use StageLabel::*;

    #[test]
    fn csv_round_trip() {
        let hyp = Hypnogram::new(vec![Wake, N1, N2, N3, R, N2]);
        let mut buf = Vec::new();
        write_hypnogram(&mut buf, &hyp).unwrap();
        let back = read_hypnogram(buf.as_slice(), "mem").unwrap();
        assert_eq!(back, hyp);
    }

    #[test]
    fn extra_columns_and_missing_header_are_fine() {
        let with_provenance = "epoch,stage,provenance\n0,N2,definite\n1,N2,inherited\n";
        let hyp = read_hypnogram(with_provenance.as_bytes(), "mem").unwrap();
        assert_eq!(hyp.stages, vec![N2, N2]);

        let headerless = "0,W\n1,R\n";
        let hyp = read_hypnogram(headerless.as_bytes(), "mem").unwrap();
        assert_eq!(hyp.stages, vec![Wake, R]);
    }

    #[test]
    fn bad_rows_are_reported_with_line_numbers() {
        let err = read_hypnogram("epoch,stage\n0,N2\n1,N9\n".as_bytes(), "mem").unwrap_err();
        match err {
            EvalError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("N9"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }

        let err = read_hypnogram("0,W\n5,N1\n".as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, EvalError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn panel_directory_loads_in_name_order() {
        let dir = tempfile::tempdir().unwrap();
        for (name, stage) in [("b_scorer", "N2"), ("a_scorer", "N1"), ("notes.txt", "x")] {
            let path = if name.contains('.') {
                dir.path().join(name)
            } else {
                dir.path().join(format!("{name}.csv"))
            };
            fs::write(path, format!("epoch,stage\n0,{stage}\n")).unwrap();
        }
        let panel = read_panel_dir(dir.path()).unwrap();
        let names: Vec<&str> = panel.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["a_scorer", "b_scorer"]);
        assert_eq!(panel[0].1.stages, vec![N1]);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(
            read_hypnogram("epoch,stage\n".as_bytes(), "mem"),
            Err(EvalError::Empty(_))
        ));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_panel_dir(dir.path()), Err(EvalError::Empty(_))));
    }
}
