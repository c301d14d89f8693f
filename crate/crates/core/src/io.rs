//! CSV encodings of quantum states.
//!
//! * statevector: one line per amplitude, `re,im`
//! * density matrix: one line per row, entries interleaved `re,im,re,im,…`
//!
//! Numbers are written with 17 significant digits so files round-trip exactly.
//! For dimension `d > 1` the two layouts are told apart by the field count
//! (2 vs `2d`).

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fmt::format_sig;
use crate::linalg::{ComplexMatrix, RealMatrix, C64};
use crate::quantum::{DensityMatrix, Statevector};

/// A state read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFile {
    Pure(Statevector),
    Mixed(DensityMatrix),
}

impl StateFile {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            StateFile::Pure(s) => s.to_density(),
            StateFile::Mixed(r) => r.clone(),
        }
    }
}

fn complex_pair(re: f64, im: f64) -> String {
    format!("{},{}", format_sig(re, 17), format_sig(im, 17))
}

pub fn statevector_to_csv(s: &Statevector) -> String {
    s.amplitudes()
        .iter()
        .map(|z| complex_pair(z.re, z.im) + "\n")
        .collect()
}

pub fn density_to_csv(rho: &DensityMatrix) -> String {
    let m = rho.matrix();
    (0..m.rows())
        .map(|i| {
            let row: Vec<String> = m.row(i).iter().map(|z| complex_pair(z.re, z.im)).collect();
            row.join(",") + "\n"
        })
        .collect()
}

pub fn real_matrix_to_csv(m: &RealMatrix) -> String {
    (0..m.rows())
        .map(|i| {
            let row: Vec<String> = m.row(i).iter().map(|&v| format_sig(v, 17)).collect();
            row.join(",") + "\n"
        })
        .collect()
}

fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|_| {
                        Error::Parse(format!("line {}: bad number `{}`", i + 1, f.trim()))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn real_matrix_from_csv(text: &str) -> Result<RealMatrix> {
    Ok(RealMatrix::from_rows(&parse_rows(text)?)?)
}

fn pairs(row: &[f64]) -> Vec<C64> {
    row.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// Parses either layout; a row of two fields in a `d`-line file with `d > 1`
/// is a statevector.
pub fn state_from_csv(text: &str) -> Result<StateFile> {
    let rows = parse_rows(text)?;
    let d = rows.len();
    if d == 0 {
        return Err(Error::Parse("empty state file".into()));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Parse("ragged state file".into()));
    }
    if width == 2 && d > 1 {
        let amps = rows.iter().map(|r| C64::new(r[0], r[1])).collect();
        Ok(StateFile::Pure(Statevector::new(amps)?))
    } else if width == 2 * d {
        let data: Vec<C64> = rows.iter().flat_map(|r| pairs(r)).collect();
        Ok(StateFile::Mixed(DensityMatrix::new(ComplexMatrix::new(
            d, d, data,
        )?)?))
    } else {
        Err(Error::Parse(format!(
            "{d} lines of {width} fields is neither a statevector nor a density matrix"
        )))
    }
}

pub fn read_state(path: &Path) -> Result<StateFile> {
    state_from_csv(&fs::read_to_string(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// All `*.csv` files of a directory, sorted by file name.
pub fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    Ok(files)
}

/// Reads every state in a directory (see [`csv_files`]).
pub fn read_state_dir(dir: &Path) -> Result<Vec<StateFile>> {
    csv_files(dir)?.iter().map(|p| read_state(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn layouts_round_trip() {
        let psi = Statevector::normalized(vec![ONE, C64::new(0.1, -0.7), C64::new(0.0, 0.3), ONE])
            .unwrap();
        assert_eq!(
            state_from_csv(&statevector_to_csv(&psi)).unwrap(),
            StateFile::Pure(psi.clone())
        );
        let rho = crate::quantum::depolarize_global(&psi.to_density(), 0.3).unwrap();
        assert_eq!(
            state_from_csv(&density_to_csv(&rho)).unwrap(),
            StateFile::Mixed(rho)
        );
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(state_from_csv("").is_err());
        assert!(state_from_csv("1,0\n0\n").is_err());
        assert!(state_from_csv("1,0,0\n0,0,0\n").is_err());
        assert!(state_from_csv("2,0\n0,0\n").is_err());
        assert!(state_from_csv("a,b\n").is_err());
    }
}
