//! Plain-text mesh serialization.
//!
//! Format: a header line `vertices N triangles M`, then N vertex lines
//! `x y boundary_flag` (flag 0 or 1), then M triangle lines `i j k` with
//! 0-based vertex indices.  Coordinates are printed with Rust's shortest
//! round-trip `f64` formatting, so write → read reproduces the mesh bit
//! for bit.  The domain description is not stored; a mesh read back from
//! disk validates against its own boundary edges instead of an analytic
//! boundary.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::geometry::Point;

use super::{Mesh, MeshError};

/// Serialize `mesh` into the plain-text format.
pub fn mesh_to_string(mesh: &Mesh) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "vertices {} triangles {}",
        mesh.n_vertices(),
        mesh.n_triangles()
    )
    .unwrap();
    for (v, p) in mesh.vertices().iter().enumerate() {
        writeln!(out, "{} {} {}", p.x, p.y, u8::from(mesh.boundary()[v])).unwrap();
    }
    for tri in mesh.triangles() {
        writeln!(out, "{} {} {}", tri[0], tri[1], tri[2]).unwrap();
    }
    out
}

/// Write `mesh` to `path` in the plain-text format.
pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<(), MeshError> {
    let text = mesh_to_string(mesh);
    let mut file = std::fs::File::create(path).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(text.as_bytes()).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read a mesh from `path`.  The result carries no domain description.
pub fn read_mesh(path: &Path) -> Result<Mesh, MeshError> {
    let file = std::fs::File::open(path).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    mesh_from_reader(file).map_err(|e| match e {
        MeshError::Parse { line, message } => MeshError::ParseIn {
            path: path.to_path_buf(),
            line,
            message,
        },
        other => other,
    })
}

/// Parse a mesh from any reader (used by `read_mesh` and tests).
pub fn mesh_from_reader<R: Read>(reader: R) -> Result<Mesh, MeshError> {
    let mut lines = BufReader::new(reader).lines().enumerate();

    let parse_err = |line: usize, message: String| MeshError::Parse {
        line: line + 1,
        message,
    };

    let mut next_line = |expect: &str| -> Result<(usize, String), MeshError> {
        loop {
            match lines.next() {
                None => {
                    return Err(MeshError::Parse {
                        line: 0,
                        message: format!("unexpected end of file, expected {expect}"),
                    })
                }
                Some((n, Err(e))) => return Err(parse_err(n, e.to_string())),
                Some((n, Ok(s))) => {
                    if !s.trim().is_empty() {
                        return Ok((n, s));
                    }
                }
            }
        }
    };

    let (hline, header) = next_line("header")?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (n_vertices, n_triangles) = match tokens.as_slice() {
        ["vertices", n, "triangles", m] => {
            let n: usize = n
                .parse()
                .map_err(|e| parse_err(hline, format!("bad vertex count {n:?}: {e}")))?;
            let m: usize = m
                .parse()
                .map_err(|e| parse_err(hline, format!("bad triangle count {m:?}: {e}")))?;
            (n, m)
        }
        _ => {
            return Err(parse_err(
                hline,
                format!("expected header `vertices N triangles M`, got {header:?}"),
            ))
        }
    };

    let mut vertices = Vec::with_capacity(n_vertices);
    let mut boundary = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (n, line) = next_line("vertex line `x y flag`")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [x, y, flag] = toks.as_slice() else {
            return Err(parse_err(
                n,
                format!("expected vertex line `x y flag`, got {line:?}"),
            ));
        };
        let x: f64 = x
            .parse()
            .map_err(|e| parse_err(n, format!("bad coordinate {x:?}: {e}")))?;
        let y: f64 = y
            .parse()
            .map_err(|e| parse_err(n, format!("bad coordinate {y:?}: {e}")))?;
        let flag = match *flag {
            "0" => false,
            "1" => true,
            other => {
                return Err(parse_err(
                    n,
                    format!("boundary flag must be 0 or 1, got {other:?}"),
                ))
            }
        };
        vertices.push(Point::new(x, y));
        boundary.push(flag);
    }

    let mut triangles = Vec::with_capacity(n_triangles);
    for _ in 0..n_triangles {
        let (n, line) = next_line("triangle line `i j k`")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [i, j, k] = toks.as_slice() else {
            return Err(parse_err(
                n,
                format!("expected triangle line `i j k`, got {line:?}"),
            ));
        };
        let mut tri = [0usize; 3];
        for (slot, tok) in tri.iter_mut().zip([i, j, k]) {
            *slot = tok
                .parse()
                .map_err(|e| parse_err(n, format!("bad vertex index {tok:?}: {e}")))?;
        }
        triangles.push(tri);
    }

    Mesh::new(vertices, triangles, boundary, None)
}
