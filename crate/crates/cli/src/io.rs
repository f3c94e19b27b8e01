//! CSV and JSON file formats.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! file read back through these parsers reproduces the values exactly.
//! Missing abilities are written as `NA`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use pco_core::audit::{DominancePair, Population};
use pco_core::scoring::{AbilityRow, AbilityTable};
use pco_core::{Item, ItemBank, ModelKind, ResponseMatrix};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const NA: &str = "NA";

fn reader(path: &Path) -> CliResult<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        CliError::validation(format!("{}: {e}", path.display()))
    }
}

fn bad(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::validation(format!("{}:{line}: {msg}", path.display()))
}

fn parse_f64(path: &Path, line: usize, field: &str, what: &str) -> CliResult<f64> {
    field.parse::<f64>().map_err(|_| bad(path, line, format!("{what} `{field}` is not a number")))
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field.eq_ignore_ascii_case("na") || field == "." || field.eq_ignore_ascii_case("nan")
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    Ok(())
}

/// Buffered CSV writer that reports failures against `path`.
pub struct CsvOut<'p> {
    path: &'p Path,
    inner: csv::Writer<BufWriter<File>>,
}

impl<'p> CsvOut<'p> {
    pub fn create(path: &'p Path) -> CliResult<Self> {
        ensure_parent(path)?;
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        Ok(CsvOut { path, inner: csv::Writer::from_writer(BufWriter::new(file)) })
    }

    pub fn row<I, T>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(|e| csv_error(self.path, e))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.inner.flush().map_err(|e| CliError::io(self.path, e))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::validation(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), fmt_f64)
}

/// Responses: header `id,<item names...>`, cells `0`/`1`. Empty, `NA`, `.`
/// and `NaN` cells are read as 0 and counted.
pub fn read_responses(path: &Path) -> CliResult<ResponseMatrix> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 2 {
        return Err(bad(path, 1, "expected an id column followed by item columns"));
    }
    let item_names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut data = Vec::new();
    let mut missing = 0;
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = r + 2;
        ids.push(rec[0].to_string());
        for (c, field) in rec.iter().skip(1).enumerate() {
            let v = match field {
                "0" => 0,
                "1" => 1,
                f if is_missing(f) => {
                    missing += 1;
                    0
                }
                f => return Err(bad(path, line, format!("item `{}` has response `{f}`", item_names[c]))),
            };
            data.push(v);
        }
    }
    Ok(ResponseMatrix::new(ids, item_names, data)?.with_missing_resolved(missing))
}

pub fn write_responses(path: &Path, data: &ResponseMatrix) -> CliResult<()> {
    let mut out = CsvOut::create(path)?;
    out.row(std::iter::once("id").chain(data.item_names().iter().map(String::as_str)))?;
    for (id, u) in data.ids().iter().zip(data.rows()) {
        out.row(std::iter::once(id.clone()).chain(u.iter().map(|x| x.to_string())))?;
    }
    out.finish()
}

/// The model a bank file describes when none is given: 3PL if any `c` is
/// positive, 1PL or Rasch if all slopes agree, otherwise 2PL.
pub fn infer_model(items: &[Item]) -> ModelKind {
    if items.iter().any(|it| it.c > 0.0) {
        return ModelKind::ThreePL;
    }
    match items.first() {
        Some(first) if items.iter().all(|it| it.a == first.a) => {
            if first.a == 1.0 {
                ModelKind::OnePL
            } else {
                ModelKind::Rasch { discrimination: first.a }
            }
        }
        _ => ModelKind::TwoPL,
    }
}

/// Item bank: header `item,a,b` with an optional `c` column.
pub fn read_bank(path: &Path, model: Option<ModelKind>) -> CliResult<ItemBank> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let has_c = match cols.as_slice() {
        ["item", "a", "b"] => false,
        ["item", "a", "b", "c"] => true,
        _ => return Err(bad(path, 1, "expected header item,a,b[,c]")),
    };
    let mut names = Vec::new();
    let mut items = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = r + 2;
        names.push(rec[0].to_string());
        let a = parse_f64(path, line, &rec[1], "a")?;
        let b = parse_f64(path, line, &rec[2], "b")?;
        let c = if has_c { parse_f64(path, line, &rec[3], "c")? } else { 0.0 };
        items.push(Item::new(a, b, c));
    }
    let model = model.unwrap_or_else(|| infer_model(&items));
    ItemBank::with_names(model, items, names).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

pub fn write_bank(path: &Path, bank: &ItemBank) -> CliResult<()> {
    let mut out = CsvOut::create(path)?;
    out.row(["item", "a", "b", "c"])?;
    for (name, it) in bank.names().iter().zip(bank.items()) {
        out.row([name.clone(), fmt_f64(it.a), fmt_f64(it.b), fmt_f64(it.c)])?;
    }
    out.finish()
}

/// Abilities: header `id,n_correct,T,theta`; `theta` may be `NA`.
pub fn read_abilities(path: &Path) -> CliResult<Vec<AbilityRow>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != ["id", "n_correct", "T", "theta"] {
        return Err(bad(path, 1, "expected header id,n_correct,T,theta"));
    }
    let mut rows = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = r + 2;
        let n_correct = rec[1].parse().map_err(|_| bad(path, line, format!("n_correct `{}` is not a count", &rec[1])))?;
        let statistic = parse_f64(path, line, &rec[2], "T")?;
        let theta = if is_missing(&rec[3]) { None } else { Some(parse_f64(path, line, &rec[3], "theta")?) };
        rows.push(AbilityRow { id: rec[0].to_string(), n_correct, statistic, theta });
    }
    Ok(rows)
}

pub fn write_abilities(path: &Path, table: &AbilityTable) -> CliResult<()> {
    let mut out = CsvOut::create(path)?;
    out.row(["id", "n_correct", "T", "theta"])?;
    for r in &table.rows {
        out.row([r.id.clone(), r.n_correct.to_string(), fmt_f64(r.statistic), fmt_opt(r.theta)])?;
    }
    out.finish()
}

/// True abilities: header `id,theta`.
pub fn write_thetas(path: &Path, ids: &[String], thetas: &[f64]) -> CliResult<()> {
    let mut out = CsvOut::create(path)?;
    out.row(["id", "theta"])?;
    for (id, t) in ids.iter().zip(thetas) {
        out.row([id.clone(), fmt_f64(*t)])?;
    }
    out.finish()
}

pub fn read_thetas(path: &Path) -> CliResult<Vec<(String, f64)>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        out.push((rec[0].to_string(), parse_f64(path, r + 2, &rec[1], "theta")?));
    }
    Ok(out)
}

/// Violations: header `k,j,item_diff,ability_diff` with examinee ids.
pub fn write_pairs(path: &Path, pairs: &[DominancePair], population: &Population) -> CliResult<()> {
    let ex = &population.examinees;
    let mut out = CsvOut::create(path)?;
    out.row(["k", "j", "item_diff", "ability_diff"])?;
    for p in pairs {
        out.row([
            ex[p.dominator].id.clone(),
            ex[p.dominated].id.clone(),
            p.item_difference.to_string(),
            fmt_f64(p.ability_difference),
        ])?;
    }
    out.finish()
}

pub fn read_pairs(path: &Path) -> CliResult<Vec<(String, String, usize, f64)>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = r + 2;
        let d = rec[2].parse().map_err(|_| bad(path, line, "item_diff is not a count"))?;
        out.push((rec[0].to_string(), rec[1].to_string(), d, parse_f64(path, line, &rec[3], "ability_diff")?));
    }
    Ok(out)
}
