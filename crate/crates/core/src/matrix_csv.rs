//! Row-major CSV storage for dense matrices with a metadata comment line.
//!
//! ```text
//! # m=3;dictionary=real_fourier;nodes=2048
//! re_0,re_1,re_2
//! 1,0,0
//! ...
//! ```
//!
//! Complex matrices carry `im_*` columns after the `re_*` block. Values are
//! written in shortest round-trip form, so reloading is bit-exact.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use faer::Mat;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Metadata = BTreeMap<String, String>;

pub fn write_matrix<T: Scalar, W: Write>(mat: &Mat<T>, meta: &Metadata, mut writer: W) -> Result<()> {
    let line: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(writer, "# {}", line.join(";"))?;
    let cols = mat.ncols();
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..cols).map(|j| format!("re_{j}")).collect();
    if !T::IS_REAL_FIELD {
        header.extend((0..cols).map(|j| format!("im_{j}")));
    }
    w.write_record(&header)?;
    for i in 0..mat.nrows() {
        let mut row: Vec<String> = (0..cols).map(|j| mat[(i, j)].re().to_string()).collect();
        if !T::IS_REAL_FIELD {
            row.extend((0..cols).map(|j| mat[(i, j)].im().to_string()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_meta(line: &str) -> Result<Metadata> {
    let body = line
        .trim_end()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("matrix file must start with a '#' metadata line".into()))?;
    let mut meta = Metadata::new();
    for pair in body.trim().split(';').filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("malformed metadata entry {pair:?}")))?;
        meta.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(meta)
}

pub fn read_matrix<T: Scalar, R: Read>(reader: R) -> Result<(Mat<T>, Metadata)> {
    let mut reader = BufReader::new(reader);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let meta = parse_meta(&first)?;
    let mut r = csv::Reader::from_reader(reader);
    let width = r.headers()?.len();
    let imag = r.headers()?.iter().any(|h| h.starts_with("im_"));
    if imag && T::IS_REAL_FIELD {
        return Err(Error::Parse("complex matrix cannot be read as real".into()));
    }
    let cols = if imag { width / 2 } else { width };
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("matrix row {i}: {e}")))?;
        if vals.len() != width {
            return Err(Error::Parse(format!("matrix row {i} has {} fields, expected {width}", vals.len())));
        }
        let row = (0..cols)
            .map(|j| {
                let im = if imag { vals[cols + j] } else { 0.0 };
                T::from_c64(num_complex::Complex64::new(vals[j], im))
            })
            .collect();
        rows.push(row);
    }
    let mat = Mat::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    Ok((mat, meta))
}
