//! Field snapshot files.
//!
//! A snapshot is a short text header followed by raw little-endian `f64`
//! values in `(component, k, j, i)` order:
//!
//! ```text
//! slabflow-field v1
//! nx 64
//! ny 64
//! nz 8
//! ncomp 4
//! length 6.283185307179586
//! time 0.5
//! eps 0.2 3 1
//! end
//! <nx*ny*nz*ncomp little-endian f64>
//! ```
//!
//! The `eps` line is optional.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{SlabGrid, State};
use crate::{Error, Result};

const MAGIC: &str = "slabflow-field v1";

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub ncomp: usize,
    pub length: f64,
    pub time: f64,
    /// `(eps, m, n)` of the run that produced the data.
    pub eps_record: Option<[f64; 3]>,
}

impl SnapshotHeader {
    pub fn values(&self) -> usize {
        self.nx * self.ny * self.nz * self.ncomp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub data: Vec<f64>,
}

impl Snapshot {
    /// Packs `(rho, m1, m2, m3)`.
    pub fn from_state(state: &State, eps_record: Option<[f64; 3]>) -> Self {
        let g = state.grid;
        let mut data = Vec::with_capacity(4 * g.len());
        data.extend_from_slice(&state.rho);
        for m in &state.mom {
            data.extend_from_slice(m);
        }
        Snapshot {
            header: SnapshotHeader {
                nx: g.nh,
                ny: g.nh,
                nz: g.nv,
                ncomp: 4,
                length: g.length,
                time: state.time,
                eps_record,
            },
            data,
        }
    }

    pub fn to_state(&self) -> Result<State> {
        let h = &self.header;
        if h.ncomp != 4 || h.nx != h.ny {
            return Err(Error::Format(format!(
                "expected a square 4-component state, got {}x{}x{} with {} components",
                h.nx, h.ny, h.nz, h.ncomp
            )));
        }
        let grid = SlabGrid::new(h.length, h.nx, h.nz)?;
        let n = grid.len();
        let part = |c: usize| self.data[c * n..(c + 1) * n].to_vec();
        State::new(grid, part(0), [part(1), part(2), part(3)], h.time)
    }

    /// Planar fields (`nz = 1`) such as target-solver output.
    pub fn planar(length: f64, nh: usize, time: f64, components: &[&[f64]]) -> Result<Self> {
        let mut data = Vec::with_capacity(components.len() * nh * nh);
        for c in components {
            if c.len() != nh * nh {
                return Err(Error::Shape {
                    expected: nh * nh,
                    found: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Ok(Snapshot {
            header: SnapshotHeader {
                nx: nh,
                ny: nh,
                nz: 1,
                ncomp: components.len(),
                length,
                time,
                eps_record: None,
            },
            data,
        })
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.header.nx * self.header.ny * self.header.nz;
        &self.data[c * n..(c + 1) * n]
    }
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let h = &snap.header;
    if snap.data.len() != h.values() {
        return Err(Error::Shape {
            expected: h.values(),
            found: snap.data.len(),
        });
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut text = format!(
        "{MAGIC}\nnx {}\nny {}\nnz {}\nncomp {}\nlength {:?}\ntime {:?}\n",
        h.nx, h.ny, h.nz, h.ncomp, h.length, h.time
    );
    if let Some([e, m, n]) = h.eps_record {
        text.push_str(&format!("eps {e:?} {m:?} {n:?}\n"));
    }
    text.push_str("end\n");
    w.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
    for v in &snap.data {
        w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut line = String::new();
    let mut next = |r: &mut BufReader<fs::File>| -> Result<String> {
        line.clear();
        let n = r.read_line(&mut line).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            return Err(Error::Format("unexpected end of header".into()));
        }
        Ok(line.trim_end().to_string())
    };
    if next(&mut r)? != MAGIC {
        return Err(Error::Format(format!("missing `{MAGIC}` magic line")));
    }
    let (mut nx, mut ny, mut nz, mut ncomp) = (None, None, None, None);
    let (mut length, mut time, mut eps_record) = (None, None, None);
    loop {
        let l = next(&mut r)?;
        if l == "end" {
            break;
        }
        let mut parts = l.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let vals: Vec<&str> = parts.collect();
        let one = || -> Result<&str> {
            match vals.as_slice() {
                [v] => Ok(v),
                _ => Err(Error::Format(format!("`{key}` expects one value"))),
            }
        };
        let int = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad integer `{s}` for `{key}`")));
        let float = |s: &str| s.parse::<f64>().map_err(|_| Error::Format(format!("bad number `{s}` for `{key}`")));
        match key {
            "nx" => nx = Some(int(one()?)?),
            "ny" => ny = Some(int(one()?)?),
            "nz" => nz = Some(int(one()?)?),
            "ncomp" => ncomp = Some(int(one()?)?),
            "length" => length = Some(float(one()?)?),
            "time" => time = Some(float(one()?)?),
            "eps" => {
                if vals.len() != 3 {
                    return Err(Error::Format("`eps` expects eps, m, n".into()));
                }
                eps_record = Some([float(vals[0])?, float(vals[1])?, float(vals[2])?]);
            }
            other => return Err(Error::Format(format!("unknown header key `{other}`"))),
        }
    }
    let missing = |k: &str| Error::Format(format!("header lacks `{k}`"));
    let header = SnapshotHeader {
        nx: nx.ok_or_else(|| missing("nx"))?,
        ny: ny.ok_or_else(|| missing("ny"))?,
        nz: nz.ok_or_else(|| missing("nz"))?,
        ncomp: ncomp.ok_or_else(|| missing("ncomp"))?,
        length: length.ok_or_else(|| missing("length"))?,
        time: time.ok_or_else(|| missing("time"))?,
        eps_record,
    };
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    if bytes.len() != 8 * header.values() {
        return Err(Error::Format(format!(
            "payload has {} bytes, header promises {}",
            bytes.len(),
            8 * header.values()
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(Snapshot { header, data })
}

/// CSV with columns `x1,x2,x3,<names...>`, one row per cell.
pub fn write_field_csv(path: &Path, grid: &SlabGrid, names: &[&str], fields: &[&[f64]]) -> Result<()> {
    if names.len() != fields.len() {
        return Err(Error::Shape {
            expected: names.len(),
            found: fields.len(),
        });
    }
    for f in fields {
        grid.check_len(f)?;
    }
    let mut out = String::from("x1,x2,x3");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for k in 0..grid.nv {
        for j in 0..grid.nh {
            for i in 0..grid.nh {
                let c = grid.idx(i, j, k);
                out.push_str(&format!("{},{},{}", grid.x(i), grid.x(j), grid.z(k)));
                for f in fields {
                    out.push_str(&format!(",{:e}", f[c]));
                }
                out.push('\n');
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.bin");
        fs::write(&p, "slabflow-field v1\nnx 2\nwhat 3\nend\n").unwrap();
        assert!(matches!(read_snapshot(&p), Err(Error::Format(_))));
        fs::write(&p, "nope\n").unwrap();
        assert!(matches!(read_snapshot(&p), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_payload_is_an_error() {
        let g = SlabGrid::new(1.0, 4, 2).unwrap();
        let s = State::uniform(g, 1.0, [0.1, 0.0, 0.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        write_snapshot(&p, &Snapshot::from_state(&s, None)).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        bytes.truncate(bytes.len() - 8);
        fs::write(&p, bytes).unwrap();
        assert!(read_snapshot(&p).is_err());
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let g = SlabGrid::new(1.0, 4, 2).unwrap();
        let f = vec![1.0; g.len()];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_field_csv(&p, &g, &["rho"], &[&f]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), g.len() + 1);
        assert!(text.starts_with("x1,x2,x3,rho\n"));
    }
}
