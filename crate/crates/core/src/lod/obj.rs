//! ASCII OBJ mesh I/O, `v` and `f` records only.
//!
//! Faces with more than three vertices are fan-triangulated. Vertex indices
//! may use the `i`, `i/t`, `i/t/n`, or `i//n` forms; texture and normal
//! references are ignored.

use crate::geometry::Vec3;
use crate::{Error, Result};

use super::TriMesh;

pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coord = |name: &str| -> Result<f64> {
                    fields
                        .next()
                        .ok_or_else(|| Error::ObjParse {
                            line: lineno + 1,
                            message: format!("missing {name} coordinate"),
                        })?
                        .parse()
                        .map_err(|e| Error::ObjParse {
                            line: lineno + 1,
                            message: format!("bad {name} coordinate: {e}"),
                        })
                };
                let (x, y, z) = (coord("x")?, coord("y")?, coord("z")?);
                vertices.push(Vec3::new(x, y, z));
            }
            Some("f") => {
                let mut indices = Vec::new();
                for field in fields {
                    let first = field.split('/').next().unwrap_or("");
                    let idx: i64 = first.parse().map_err(|e| Error::ObjParse {
                        line: lineno + 1,
                        message: format!("bad face index {field:?}: {e}"),
                    })?;
                    let resolved = if idx > 0 {
                        idx - 1
                    } else if idx < 0 {
                        vertices.len() as i64 + idx
                    } else {
                        return Err(Error::ObjParse {
                            line: lineno + 1,
                            message: "face index 0 is invalid".into(),
                        });
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(Error::ObjParse {
                            line: lineno + 1,
                            message: format!("face index {idx} out of range"),
                        });
                    }
                    indices.push(resolved as u32);
                }
                if indices.len() < 3 {
                    return Err(Error::ObjParse {
                        line: lineno + 1,
                        message: "face needs at least 3 vertices".into(),
                    });
                }
                for k in 1..indices.len() - 1 {
                    triangles.push([indices[0], indices[k], indices[k + 1]]);
                }
            }
            _ => {} // comments, groups, normals, materials: ignored
        }
    }
    if triangles.is_empty() {
        return Err(Error::EmptyMesh);
    }
    Ok(TriMesh {
        vertices,
        triangles,
    })
}

/// Canonical ASCII OBJ: `v` records with 17-significant-digit floats, then
/// `f` records with 1-based indices.
pub fn write_obj(mesh: &TriMesh) -> Result<String> {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!(
            "v {} {} {}\n",
            crate::canonical::format_f64(v.x)?,
            crate::canonical::format_f64(v.y)?,
            crate::canonical::format_f64(v.z)?
        ));
    }
    for t in &mesh.triangles {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    Ok(out)
}
