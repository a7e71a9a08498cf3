//! File formats: domain descriptors, masks, node/edge CSV, atoms, output sink.

use std::fs;
use std::path::{Path, PathBuf};

use divflow_core::measures::AtomicMeasure;
use divflow_core::{Cell, Connectivity, EdgeField, GridDomain, NodeFunction, Point};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// JSON descriptor of a grid domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    /// Inferred from the cell coordinates when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub cells: Vec<Vec<i32>>,
    pub h: f64,
    /// Neighbor count: 4 or 8 in 2D, 6 or 26 in 3D.
    pub connectivity: u32,
    /// First cell in lexicographic order when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Vec<i32>>,
}

impl DomainFile {
    pub fn from_domain(d: &GridDomain) -> Self {
        let dim = d.dim();
        DomainFile {
            dim: Some(dim),
            cells: d.cells().iter().map(|c| c[..dim].to_vec()).collect(),
            h: d.h(),
            connectivity: d.connectivity().neighbors(dim),
            basepoint: Some(d.cell(d.basepoint())[..dim].to_vec()),
        }
    }

    pub fn build(&self) -> Result<GridDomain, CliError> {
        let dim = match self.dim {
            Some(m) => m,
            None => self.cells.first().map_or(2, Vec::len),
        };
        let cells = self.cells.iter().map(|c| to_cell(c, dim)).collect::<Result<Vec<Cell>, _>>()?;
        let connectivity = Connectivity::from_neighbors(self.connectivity)
            .filter(|c| c.neighbors(dim) == self.connectivity)
            .ok_or_else(|| CliError::Usage(format!("connectivity {} is not valid in {dim}D", self.connectivity)))?;
        let base = match &self.basepoint {
            Some(b) => to_cell(b, dim)?,
            None => cells.iter().min().copied().unwrap_or([0; 3]),
        };
        Ok(GridDomain::new(dim, cells, self.h, connectivity, base)?)
    }
}

fn to_cell(c: &[i32], dim: usize) -> Result<Cell, CliError> {
    if c.len() != dim {
        return Err(CliError::Usage(format!("cell {c:?} does not have {dim} coordinates")));
    }
    let mut out = [0; 3];
    out[..dim].copy_from_slice(c);
    Ok(out)
}

/// Parses `i,j` or `i,j,k`.
pub fn parse_cell(s: &str) -> Result<Cell, CliError> {
    let parts = parse_list::<i32>(s)?;
    if !(1..=3).contains(&parts.len()) {
        return Err(CliError::Usage(format!("expected a cell like 3,4, got {s:?}")));
    }
    let mut c = [0; 3];
    c[..parts.len()].copy_from_slice(&parts);
    Ok(c)
}

pub fn parse_point(s: &str) -> Result<Point, CliError> {
    let parts = parse_list::<f64>(s)?;
    if !(1..=3).contains(&parts.len()) {
        return Err(CliError::Usage(format!("expected a point like 0.5,0.25, got {s:?}")));
    }
    let mut p = [0.0; 3];
    p[..parts.len()].copy_from_slice(&parts);
    Ok(p)
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| CliError::Usage(format!("cannot parse {t:?} in {s:?}"))))
        .collect()
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Reads a JSON descriptor, or a PGM/PBM mask whose nonzero samples are the
/// inside cells. Pixel `(column, row)` becomes cell `[column, row]`.
pub fn read_domain_file(path: &Path) -> Result<DomainFile, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(b"P") {
        let cells = read_mask(&bytes).map_err(|m| CliError::Usage(format!("{}: {m}", path.display())))?;
        return Ok(DomainFile { dim: Some(2), cells, h: 1.0, connectivity: 8, basepoint: None });
    }
    serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_mask(bytes: &[u8]) -> Result<Vec<Vec<i32>>, String> {
    let bitmap = matches!(bytes.get(1), Some(b'1') | Some(b'4'));
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Pnm).map_err(|e| e.to_string())?;
    let luma = img.to_luma16();
    let mut cells = Vec::new();
    for (x, y, p) in luma.enumerate_pixels() {
        // Bitmaps decode with set bits as black.
        let inside = if bitmap { p.0[0] == 0 } else { p.0[0] != 0 };
        if inside {
            cells.push(vec![x as i32, y as i32]);
        }
    }
    Ok(cells)
}

/// Plain PGM (`P2`, maxval 1) of a 2D domain over its bounding box.
pub fn mask_pgm(d: &GridDomain) -> String {
    let (lo, extent) = d.bounds();
    let mut out = format!("P2\n{} {}\n1\n", extent[0], extent[1]);
    for j in 0..extent[1] {
        let row: Vec<&str> = (0..extent[0])
            .map(|i| if d.contains(&[lo[0] + i as i32, lo[1] + j as i32, 0]) { "1" } else { "0" })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Deserialize)]
struct ValueRow {
    index: usize,
    value: f64,
}

/// Node function from CSV with `index` and `value` columns; missing cells are 0.
pub fn read_node_function(path: &Path, n: usize) -> Result<NodeFunction, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let mut f = NodeFunction::zeros(n);
    for row in reader.deserialize::<ValueRow>() {
        let row = row.map_err(|e| CliError::csv(path, e))?;
        if row.index >= n {
            return Err(CliError::Usage(format!("{}: cell index {} out of range 0..{n}", path.display(), row.index)));
        }
        f[row.index] += row.value;
    }
    Ok(f)
}

/// Atoms from CSV (`x,y[,z],weight` with a header) or JSON
/// (`{"dim": 2, "atoms": [[x, y, w], ...]}`).
pub fn read_atoms(path: &Path) -> Result<AtomicMeasure, CliError> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let (dim, rows) = if is_json {
        let file: AtomsFile =
            serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        (file.dim, file.atoms)
    } else {
        let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
        let headers = reader.headers().map_err(|e| CliError::csv(path, e))?.clone();
        let dim = headers.len().saturating_sub(1);
        let mut rows = Vec::new();
        for rec in reader.deserialize::<Vec<f64>>() {
            rows.push(rec.map_err(|e| CliError::csv(path, e))?);
        }
        (dim, rows)
    };
    let mut atoms = Vec::with_capacity(rows.len());
    for row in rows {
        if row.len() != dim + 1 {
            return Err(CliError::Usage(format!(
                "{}: atom {row:?} needs {dim} coordinates and a weight",
                path.display()
            )));
        }
        let mut p = [0.0; 3];
        p[..dim].copy_from_slice(&row[..dim]);
        atoms.push((p, row[dim]));
    }
    Ok(AtomicMeasure::new(dim, atoms)?)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtomsFile {
    pub dim: usize,
    pub atoms: Vec<Vec<f64>>,
}

/// Writes the artifacts of one run into a directory.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Output { dir })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn text(&self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<String, CliError> {
        let mut body = serde_json::to_string_pretty(value).expect("summaries serialize");
        body.push('\n');
        self.text(name, &body)?;
        Ok(body)
    }

    pub fn csv<S: Serialize>(&self, name: &str, rows: impl IntoIterator<Item = S>) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::csv(&path, e))?;
        for row in rows {
            w.serialize(row).map_err(|e| CliError::csv(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))
    }

    /// `index,i,j[,k],value` per cell.
    pub fn node_function(&self, name: &str, d: &GridDomain, f: &NodeFunction) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::csv(&path, e))?;
        let mut header = vec!["index".to_string()];
        header.extend(["i", "j", "k"][..d.dim()].iter().map(|s| s.to_string()));
        header.push("value".into());
        w.write_record(&header).map_err(|e| CliError::csv(&path, e))?;
        for (idx, v) in f.iter().enumerate() {
            let c = d.cell(idx);
            let mut rec = vec![idx.to_string()];
            rec.extend(c[..d.dim()].iter().map(|x| x.to_string()));
            rec.push(fmt_f64(*v));
            w.write_record(&rec).map_err(|e| CliError::csv(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))
    }

    /// `index,tail,head,value` per canonical edge.
    pub fn edge_field(&self, name: &str, d: &GridDomain, v: &EdgeField) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Row {
            index: usize,
            tail: usize,
            head: usize,
            value: f64,
        }
        self.csv(
            name,
            d.edges().iter().zip(v.iter()).enumerate().map(|(index, (e, &value))| Row {
                index,
                tail: e.tail,
                head: e.head,
                value,
            }),
        )
    }

    /// `index,i,j[,k],inside` for a cell subset.
    pub fn cell_set(&self, name: &str, d: &GridDomain, set: &[bool]) -> Result<(), CliError> {
        let f = NodeFunction(set.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect());
        self.node_function(name, d, &f)
    }
}

/// Shortest round-trip form; `-0` prints as `0`, non-finite values as Rust does.
fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    serde_json::Number::from_f64(v).map_or_else(|| v.to_string(), |n| n.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trip() {
        let file = DomainFile {
            dim: None,
            cells: vec![vec![0, 0], vec![1, 0], vec![1, 1]],
            h: 0.5,
            connectivity: 4,
            basepoint: Some(vec![1, 0]),
        };
        let d = file.build().unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.edges().len(), 2);
        let again = DomainFile::from_domain(&d).build().unwrap();
        assert_eq!(again.edges(), d.edges());
        assert_eq!(again.basepoint(), d.basepoint());
    }

    #[test]
    fn bad_connectivity() {
        let file = DomainFile { dim: None, cells: vec![vec![0, 0]], h: 1.0, connectivity: 6, basepoint: None };
        assert!(matches!(file.build(), Err(CliError::Usage(_))));
    }

    #[test]
    fn masks() {
        assert_eq!(read_mask(b"P1\n3 2\n1 0 1\n0 1 0\n").unwrap(), vec![vec![0, 0], vec![2, 0], vec![1, 1]]);
        assert_eq!(read_mask(b"P2\n2 2\n65535\n1 0\n0 7\n").unwrap(), vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(read_mask(b"P5\n2 1\n255\n\x00\x09").unwrap(), vec![vec![1, 0]]);
    }

    #[test]
    fn pgm_export_reads_back() {
        let d = GridDomain::from_rows(&[&[true, false, true], &[true, true, true]], 1.0, Connectivity::Axis).unwrap();
        let cells = read_mask(mask_pgm(&d).as_bytes()).unwrap();
        assert_eq!(cells.len(), 5);
        assert!(cells.iter().all(|c| d.contains(&[c[0], c[1], 0])));
    }

    #[test]
    fn cell_and_list_parsing() {
        assert_eq!(parse_cell("3,4").unwrap(), [3, 4, 0]);
        assert!(parse_cell("a").is_err());
        assert_eq!(parse_point("0.5, 0.25").unwrap(), [0.5, 0.25, 0.0]);
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(0.1), "0.1");
    }
}
