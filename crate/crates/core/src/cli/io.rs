//! File handling and argument parsing shared by the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use super::CliError;
use crate::imaging::TripleImageRecord;

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory receiving the result files (created if missing).
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Replace result files that already exist.
    #[arg(long)]
    pub force: bool,
    /// Also write plot-ready CSV tables into DIR.
    #[arg(long, value_name = "DIR")]
    pub emit_plotdata: Option<PathBuf>,
}

impl OutputArgs {
    fn write_in(&self, dir: &Path, name: &str, contents: &str) -> Result<String, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        if path.exists() && !self.force {
            return Err(CliError(format!("{} exists; pass --force to overwrite", path.display())));
        }
        fs::write(&path, contents).map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?;
        Ok(path.display().to_string())
    }

    /// Writes a result file and returns its path for the summary.
    pub fn write(&self, name: &str, contents: &str) -> Result<String, CliError> {
        self.write_in(&self.out_dir, name, contents)
    }

    /// Writes a plot table when `--emit-plotdata` was given.
    pub fn plot(&self, name: &str, contents: impl FnOnce() -> String) -> Result<Option<String>, CliError> {
        match &self.emit_plotdata {
            Some(dir) => self.write_in(dir, name, &contents()).map(Some),
            None => Ok(None),
        }
    }

    /// As [`plot`](Self::plot) for tables whose computation can fail.
    pub fn plot_result(
        &self,
        name: &str,
        contents: impl FnOnce() -> Result<String, CliError>,
    ) -> Result<Option<String>, CliError> {
        match &self.emit_plotdata {
            Some(dir) => self.write_in(dir, name, &contents()?).map(Some),
            None => Ok(None),
        }
    }

    /// Fails early if any of `names` would be overwritten.
    pub fn check_free(&self, names: &[&str]) -> Result<(), CliError> {
        if self.force {
            return Ok(());
        }
        for name in names {
            let path = self.out_dir.join(name);
            if path.exists() {
                return Err(CliError(format!("{} exists; pass --force to overwrite", path.display())));
            }
        }
        Ok(())
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

/// A number or a fraction such as `3/2`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            n / d
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Numbers given as one comma-separated argument.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberList(pub Vec<f64>);

/// Comma-separated numbers or fractions.
pub fn parse_number_list(s: &str) -> Result<NumberList, String> {
    s.split(',').map(parse_number).collect::<Result<_, _>>().map(NumberList)
}

/// `lo,hi` with lo < hi.
pub fn parse_window(s: &str) -> Result<(f64, f64), String> {
    match parse_number_list(s)?.0.as_slice() {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(format!("`{s}` is not an increasing pair `lo,hi`")),
    }
}

/// Target sizes given on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeList(pub Vec<usize>);

/// Inclusive range `a..b` or a comma-separated list of positive integers.
pub fn parse_sizes(s: &str) -> Result<SizeList, String> {
    let bad = || format!("`{s}` is not a size range `a..b` or list `a,b,c`");
    let v: Vec<usize> = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            (a..=b).collect()
        }
        None => s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?,
    };
    if v.is_empty() || v.contains(&0) {
        return Err(bad());
    }
    Ok(SizeList(v))
}

/// Photon counts from a JSON array or a one-column CSV (an optional header
/// line is skipped).
pub fn parse_counts(text: &str) -> Result<Vec<f64>, CliError> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| CliError(format!("counts JSON: {e}")));
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(CliError(format!("counts line {}: `{field}` is not a number", i + 1))),
        }
    }
    Ok(out)
}

fn parse_bit(s: &str, line: usize) -> Result<bool, CliError> {
    match s.trim() {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        other => Err(CliError(format!("triples line {line}: `{other}` is not a 0/1 detection"))),
    }
}

/// Records from CSV with header `site,shot,b1,b2,b3`.
pub fn parse_triples(text: &str) -> Result<Vec<TripleImageRecord>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| CliError(format!("triples CSV lacks column `{name}`")))
    };
    let idx = [col("site")?, col("shot")?, col("b1")?, col("b2")?, col("b3")?];
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |k: usize| rec.get(idx[k]).unwrap_or("");
        let int = |k: usize| {
            field(k).parse::<usize>().map_err(|_| CliError(format!("triples line {line}: bad integer `{}`", field(k))))
        };
        out.push(TripleImageRecord {
            site: int(0)?,
            shot: int(1)?,
            b1: parse_bit(field(2), line)?,
            b2: parse_bit(field(3), line)?,
            b3: parse_bit(field(4), line)?,
        });
    }
    Ok(out)
}

pub fn write_triples_csv(records: &[TripleImageRecord]) -> String {
    let mut s = String::from("site,shot,b1,b2,b3\n");
    for r in records {
        s.push_str(&format!("{},{},{},{},{}\n", r.site, r.shot, r.b1 as u8, r.b2 as u8, r.b3 as u8));
    }
    s
}

/// CSV with a header row from rows of already formatted fields.
pub fn csv_table(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

pub fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_ranges() {
        assert_eq!(parse_number_list("1/2,3/2").unwrap().0, vec![0.5, 1.5]);
        assert_eq!(parse_window("-1000,0").unwrap(), (-1000.0, 0.0));
        assert!(parse_window("0,-1").is_err());
        assert_eq!(parse_sizes("2..5").unwrap().0, vec![2, 3, 4, 5]);
        assert_eq!(parse_sizes("3,7").unwrap().0, vec![3, 7]);
        assert!(parse_sizes("0..2").is_err());
    }

    #[test]
    fn counts_formats() {
        assert_eq!(parse_counts("[1, 2.5]").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_counts("counts\n3\n\n4\n").unwrap(), vec![3.0, 4.0]);
        assert!(parse_counts("3\nx\n").is_err());
    }

    #[test]
    fn triples_round_trip() {
        let recs = vec![
            TripleImageRecord { site: 0, shot: 1, b1: true, b2: false, b3: true },
            TripleImageRecord { site: 4, shot: 2, b1: false, b2: false, b3: true },
        ];
        assert_eq!(parse_triples(&write_triples_csv(&recs)).unwrap(), recs);
        assert!(parse_triples("site,shot,b1,b2\n0,0,1,1\n").is_err());
    }
}
