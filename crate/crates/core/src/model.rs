//! Trained models and their text serialization.
//!
//! Floats are written in shortest round-trip scientific notation, so a
//! save/load cycle reproduces every weight bit for bit.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::elm::{Activation, ElmModel, HiddenLayer};
use crate::ensemble::{EnsembleModel, Variant};
use crate::error::{Error, Result};
use crate::eval::Classifier;

pub const MODEL_VERSION: &str = "aewelm-model 1";

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Single(ElmModel),
    Ensemble(EnsembleModel),
}

impl Model {
    pub fn classes(&self) -> &[String] {
        match self {
            Model::Single(m) => &m.classes,
            Model::Ensemble(e) => &e.classes,
        }
    }

    /// Input dimension the model expects.
    pub fn inputs(&self) -> usize {
        match self {
            Model::Single(m) => m.hidden.inputs(),
            Model::Ensemble(e) => e.members[0].0.hidden.inputs(),
        }
    }

    pub fn predict_labels(&self, x: &DMatrix<f64>) -> Result<Vec<usize>> {
        if x.ncols() != self.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                got: x.ncols(),
            });
        }
        match self {
            Model::Single(m) => m.predict_labels(x),
            Model::Ensemble(e) => e.predict_labels(x),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MODEL_VERSION}\n");
        let members: Vec<(&ElmModel, f64)> = match self {
            Model::Single(m) => {
                out.push_str("kind single\n");
                vec![(m, 1.0)]
            }
            Model::Ensemble(e) => {
                let _ = writeln!(out, "kind ensemble {} {}", e.variant.tag(), e.rounds_used);
                e.members.iter().map(|(m, a)| (m, *a)).collect()
            }
        };
        let classes = self.classes();
        let _ = writeln!(out, "classes {}", classes.len());
        for c in classes {
            let _ = writeln!(out, "class {c}");
        }
        let _ = writeln!(out, "members {}", members.len());
        for (m, alpha) in members {
            let _ = writeln!(out, "member {alpha:e}");
            write_elm(&mut out, m);
        }
        out
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let mut r = Reader::new(text, path);
        let header = r.line()?;
        if header != MODEL_VERSION {
            return Err(Error::Version {
                expected: MODEL_VERSION.to_string(),
                found: header.to_string(),
            });
        }
        let kind = r.field("kind")?;
        let mut kind_parts = kind.split(' ');
        let ensemble = match kind_parts.next() {
            Some("single") => None,
            Some("ensemble") => {
                let variant: Variant = r.parse_token(kind_parts.next())?;
                let rounds_used: usize = r.parse_token(kind_parts.next())?;
                Some((variant, rounds_used))
            }
            _ => return Err(r.error(format!("unknown model kind `{kind}`"))),
        };
        let m: usize = r.value("classes")?;
        let classes = (0..m)
            .map(|_| r.field("class").map(str::to_string))
            .collect::<Result<Vec<_>>>()?;
        let count: usize = r.value("members")?;
        if count == 0 {
            return Err(r.error("model has no members".into()));
        }
        let mut members = Vec::with_capacity(count);
        for _ in 0..count {
            let alpha: f64 = r.value("member")?;
            members.push((read_elm(&mut r, &classes)?, alpha));
        }
        match ensemble {
            None => {
                if members.len() != 1 {
                    return Err(r.error("single model with several members".into()));
                }
                Ok(Model::Single(members.pop().unwrap().0))
            }
            Some((variant, rounds_used)) => {
                let mut e = EnsembleModel::new(members, classes, variant)?;
                e.rounds_used = rounds_used;
                Ok(Model::Ensemble(e))
            }
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, path)
    }
}

impl Classifier for Model {
    fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<usize>> {
        self.predict_labels(x)
    }
}

fn write_row<'a>(out: &mut String, values: impl Iterator<Item = &'a f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v:e}");
    }
    out.push('\n');
}

fn write_matrix(out: &mut String, name: &str, m: &DMatrix<f64>) {
    let _ = writeln!(out, "{name}");
    for row in m.row_iter() {
        write_row(out, row.iter());
    }
}

fn write_elm(out: &mut String, m: &ElmModel) {
    let h = &m.hidden;
    let _ = writeln!(out, "activation {}", h.activation().tag());
    let _ = writeln!(out, "seed {}", h.seed());
    match m.c {
        Some(c) => {
            let _ = writeln!(out, "c {c:e}");
        }
        None => out.push_str("c none\n"),
    }
    let _ = writeln!(out, "weighted {}", u8::from(m.weighted));
    let _ = writeln!(out, "dims {} {} {}", h.hidden(), h.inputs(), m.beta.ncols());
    write_matrix(out, "weights", h.weights());
    out.push_str("biases\n");
    write_row(out, h.biases().iter());
    write_matrix(out, "beta", &m.beta);
}

fn read_elm(r: &mut Reader<'_>, classes: &[String]) -> Result<ElmModel> {
    let activation = r.field("activation")?;
    if Activation::from_tag(activation) != Some(Activation::Tanh) {
        return Err(r.error(format!("unsupported activation `{activation}`")));
    }
    let seed: u64 = r.value("seed")?;
    let c = match r.field("c")? {
        "none" => None,
        s => Some(r.parse_token(Some(s))?),
    };
    let weighted = match r.field("weighted")? {
        "0" => false,
        "1" => true,
        other => return Err(r.error(format!("bad weighted flag `{other}`"))),
    };
    let dims = r.field("dims")?;
    let mut parts = dims.split(' ');
    let l: usize = r.parse_token(parts.next())?;
    let d: usize = r.parse_token(parts.next())?;
    let m: usize = r.parse_token(parts.next())?;
    if m != classes.len() {
        return Err(Error::DimensionMismatch {
            expected: classes.len(),
            got: m,
        });
    }
    r.expect("weights")?;
    let weights = r.matrix(l, d)?;
    r.expect("biases")?;
    let biases = DVector::from_vec(r.row(l)?);
    r.expect("beta")?;
    let beta = r.matrix(l, m)?;
    Ok(ElmModel {
        hidden: HiddenLayer::from_parts(weights, biases, seed)?,
        beta,
        classes: classes.to_vec(),
        c,
        weighted,
    })
}

struct Reader<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, path: &'a Path) -> Self {
        Self {
            lines: text.lines(),
            line_no: 0,
            path,
        }
    }

    fn error(&self, message: String) -> Error {
        Error::parse(self.path, self.line_no, message)
    }

    fn line(&mut self) -> Result<&'a str> {
        self.line_no += 1;
        self.lines
            .next()
            .ok_or_else(|| self.error("unexpected end of file".into()))
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.line()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.error(format!("expected `{key} ...`, found `{line}`")))
    }

    fn value<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        self.parse_token(Some(v))
    }

    fn expect(&mut self, key: &str) -> Result<()> {
        let line = self.line()?;
        if line == key {
            Ok(())
        } else {
            Err(self.error(format!("expected `{key}`, found `{line}`")))
        }
    }

    fn parse_token<T: FromStr>(&self, token: Option<&str>) -> Result<T> {
        let token = token.ok_or_else(|| self.error("missing value".into()))?;
        token.parse().map_err(|_| self.error(format!("cannot parse `{token}`")))
    }

    fn row(&mut self, len: usize) -> Result<Vec<f64>> {
        let line = self.line()?;
        let values = line
            .split(' ')
            .filter(|s| !s.is_empty())
            .map(|s| self.parse_token::<f64>(Some(s)))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != len {
            return Err(self.error(format!("expected {len} values, found {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(self.error("non-finite value".into()));
        }
        Ok(values)
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.row(cols)?);
        }
        Ok(DMatrix::from_row_slice(rows, cols, &data))
    }
}
