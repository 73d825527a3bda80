//! File formats. CSV files have a header row, comma separators and `\n`
//! line endings; every float is written as `{:.16e}` (17 significant
//! digits) so identical inputs give byte-identical files. JSON summaries are
//! pretty-printed with keys in declaration order.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use spinloop::{BlochVector, Spinor};

pub const TRAJECTORY_HEADER: &str = "t,n1,n2,n3,p_flip,re_psi1,im_psi1,re_psi2,im_psi2";

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One trajectory sample as written to the CSV files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub n: BlochVector,
    pub p_flip: f64,
    pub psi: Spinor,
}

impl Row {
    fn values(&self) -> [f64; 9] {
        [
            self.t,
            self.n.n1,
            self.n.n2,
            self.n.n3,
            self.p_flip,
            self.psi.c_plus.re,
            self.psi.c_plus.im,
            self.psi.c_minus.re,
            self.psi.c_minus.im,
        ]
    }
}

pub fn scenario_dir(out_dir: &Path, name: &str) -> Result<PathBuf> {
    let dir = out_dir.join(name);
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(dir)
}

pub fn write_trajectory(path: &Path, rows: &[Row]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        for row in rows {
            let line: Vec<String> = row.values().iter().map(|v| float(*v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()
    };
    emit().with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
