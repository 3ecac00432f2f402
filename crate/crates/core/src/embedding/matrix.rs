use std::fmt;
use std::io::Write;
use std::path::Path;

use super::compose::{CodeVector, Composer};
use super::model::{parse_header, EmbeddingModel};
use crate::artifact;
use crate::corpus::ParsedCorpus;
use crate::error::{Error, Result};
use crate::tokenizer::{normalize, streams_of, Level, Mode, TokenStream};

pub const MATRIX_FORMAT: &str = "SMMAT v1";

/// Identifies one row of a matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementRef {
    pub contract_id: String,
    pub line_start: u32,
    pub line_end: u32,
    /// Free-form label; bug matrices store the category here.
    pub tag: Option<String>,
}

impl ElementRef {
    pub fn new(contract_id: impl Into<String>, line_start: u32, line_end: u32) -> Self {
        ElementRef { contract_id: contract_id.into(), line_start, line_end, tag: None }
    }

    pub fn key(&self) -> String {
        format!("{}_{}", self.line_start, self.line_end)
    }

    pub fn lines(&self) -> String {
        format!("{}-{}", self.line_start, self.line_end)
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.contract_id, self.key())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub level: Level,
    pub mode: Mode,
    pub dim: usize,
    pub model_version: String,
    pub index: Vec<ElementRef>,
    rows: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(level: Level, mode: Mode, dim: usize, model_version: impl Into<String>) -> Self {
        EmbeddingMatrix { level, mode, dim, model_version: model_version.into(), index: Vec::new(), rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn push(&mut self, element: ElementRef, v: &CodeVector) {
        let row = v.to_f32();
        self.push_row(element, &row);
    }

    pub fn push_row(&mut self, element: ElementRef, row: &[f32]) {
        assert_eq!(row.len(), self.dim, "row dimension mismatch");
        assert!(row.iter().all(|x| x.is_finite()), "non-finite component in row for {element}");
        self.index.push(element);
        self.rows.extend_from_slice(row);
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    /// Row widened to f64.
    pub fn row_f64(&self, i: usize) -> Vec<f64> {
        self.row(i).iter().map(|x| *x as f64).collect()
    }

    pub fn rows_f64(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row_f64(i)).collect()
    }

    /// Keeps the rows whose index entry satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&ElementRef) -> bool) -> EmbeddingMatrix {
        let mut out = EmbeddingMatrix::new(self.level, self.mode, self.dim, self.model_version.clone());
        for i in 0..self.len() {
            if keep(&self.index[i]) {
                out.push_row(self.index[i].clone(), self.row(i));
            }
        }
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "{MATRIX_FORMAT} level={} rows={} dim={} mode={} model={}",
            self.level,
            self.len(),
            self.dim,
            self.mode,
            self.model_version
        )?;
        for e in &self.index {
            match &e.tag {
                Some(t) => writeln!(w, "{}\t{}\t{}", e.contract_id, e.key(), t)?,
                None => writeln!(w, "{}\t{}", e.contract_id, e.key())?,
            }
        }
        for x in &self.rows {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory cannot fail");
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        for e in &self.index {
            let clean = |s: &str| !s.contains(['\t', '\n']);
            if !clean(&e.contract_id) || !e.tag.as_deref().map_or(true, clean) {
                return Err(Error::format(path, format!("element `{e}` contains a tab or newline")));
            }
        }
        artifact::write_locked(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&artifact::read(path)?).map_err(|m| Error::format(path, m))
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut rest = bytes;
        let mut next_line = || -> std::result::Result<&str, String> {
            let nl = rest.iter().position(|b| *b == b'\n').ok_or("truncated index section")?;
            let line = std::str::from_utf8(&rest[..nl]).map_err(|_| "index section is not UTF-8")?;
            rest = &rest[nl + 1..];
            Ok(line)
        };
        let fields = parse_header(next_line()?, MATRIX_FORMAT)?;
        let get = |k: &str| fields.get(k).ok_or_else(|| format!("header lacks `{k}`"));
        let num = |k: &str| -> std::result::Result<usize, String> {
            get(k)?.parse().map_err(|_| format!("bad `{k}` value"))
        };
        let level: Level = get("level")?.parse()?;
        let mode: Mode = fields.get("mode").map(|m| m.parse()).transpose()?.unwrap_or_default();
        let model_version = fields.get("model").cloned().unwrap_or_default();
        let (n, dim) = (num("rows")?, num("dim")?);
        let mut index = Vec::with_capacity(n);
        for i in 0..n {
            let line = next_line()?;
            let mut parts = line.split('\t');
            let id = parts.next().ok_or(format!("bad index line {i}"))?;
            let key = parts.next().ok_or(format!("index line {i} lacks a line range"))?;
            let (a, b) = key
                .split_once('_')
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                .ok_or(format!("bad line range `{key}`"))?;
            let tag = parts.next().map(str::to_string);
            index.push(ElementRef { contract_id: id.to_string(), line_start: a, line_end: b, tag });
        }
        if rest.len() != n * dim * 4 {
            return Err(format!("row section has {} bytes, expected {}", rest.len(), n * dim * 4));
        }
        let rows: Vec<f32> = rest.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
        if !rows.iter().all(|x| x.is_finite()) {
            return Err("non-finite row component".into());
        }
        Ok(EmbeddingMatrix { level, mode, dim, model_version, index, rows })
    }
}

/// Normalized streams of every parsed record at `level`, records ordered
/// by contract_id and elements in source order.
pub fn corpus_streams(parsed: &ParsedCorpus<'_>, level: Level, mode: Mode) -> Vec<TokenStream> {
    let mut recs: Vec<_> = parsed.parsed().collect();
    recs.sort_by(|a, b| a.0.contract_id.cmp(&b.0.contract_id));
    recs.into_iter()
        .flat_map(|(r, t)| streams_of(t, &r.contract_id, level, mode))
        .map(|s| normalize(&s))
        .collect()
}

pub fn matrix_from_streams(model: &EmbeddingModel, streams: &[TokenStream], level: Level, mode: Mode) -> EmbeddingMatrix {
    let mut m = EmbeddingMatrix::new(level, mode, model.dim(), model.version());
    let mut composer = Composer::new(model);
    for s in streams {
        let v = composer.compose(&s.words());
        m.push(ElementRef::new(s.contract_id.clone(), s.line_start, s.line_end), &v);
    }
    m
}

/// One row per element of the corpus at `level`. Records that failed to
/// parse contribute nothing.
pub fn build_matrix(model: &EmbeddingModel, parsed: &ParsedCorpus<'_>, level: Level, mode: Mode) -> EmbeddingMatrix {
    matrix_from_streams(model, &corpus_streams(parsed, level, mode), level, mode)
}
