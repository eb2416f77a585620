//! Wavefront OBJ, mesh metadata sidecars and CSV exports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ShapeDiagnostics;
use crate::mesh::{MeshMeta, Orientation, SurfaceMesh, Vec3};

pub const DIAGNOSTICS_HEADER: &str = "vertex,x1,x2,x3,nu1,nu2,nu3,H,K,A2,residual,boundary_flag";

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// OBJ text with faces wound so that the right-hand-rule normal is ν.
pub fn to_obj(mesh: &SurfaceMesh) -> String {
    let mut s = String::with_capacity(mesh.vertices.len() * 48 + mesh.triangles.len() * 24);
    let _ = writeln!(s, "# generator {}", mesh.meta.generator);
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    let flip = mesh.orientation == Orientation::Reversed;
    for &[a, b, c] in &mesh.triangles {
        let (b, c) = if flip { (c, b) } else { (b, c) };
        let _ = writeln!(s, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    s
}

/// Parses vertices and faces; polygons are fan-triangulated.
pub fn parse_obj(text: &str) -> Result<SurfaceMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|p| p.parse::<f64>().map_err(|e| parse_err(e.to_string())))
                    .collect::<Result<_>>()?;
                if coords.len() != 3 {
                    return Err(parse_err("vertex needs three coordinates".into()));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|p| {
                        let head = p.split('/').next().unwrap_or("");
                        let i: i64 = head.parse().map_err(|_| parse_err(format!("bad face index {p:?}")))?;
                        let resolved = if i < 0 { vertices.len() as i64 + i } else { i - 1 };
                        if resolved < 0 {
                            return Err(parse_err(format!("face index {i} out of range")));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(parse_err("face needs at least three vertices".into()));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(SurfaceMesh::new(vertices, triangles))
}

#[derive(Serialize, Deserialize)]
struct MetaFile {
    schema: u32,
    #[serde(flatten)]
    meta: MeshMeta,
}

pub fn meta_path(obj: &Path) -> PathBuf {
    obj.with_extension("meta.json")
}

/// Writes `<path>` (OBJ) and its `.meta.json` sidecar.
pub fn save_mesh(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    write_atomic(path, to_obj(mesh).as_bytes())?;
    let meta = MetaFile {
        schema: 1,
        meta: mesh.meta.clone(),
    };
    write_atomic(&meta_path(path), serde_json::to_string_pretty(&meta)?.as_bytes())?;
    Ok(())
}

/// Reads an OBJ file and, when present, its metadata sidecar.
pub fn load_mesh(path: &Path) -> Result<SurfaceMesh> {
    let mut mesh = parse_obj(&fs::read_to_string(path)?)?;
    let mp = meta_path(path);
    if mp.exists() {
        let mf: MetaFile = serde_json::from_str(&fs::read_to_string(mp)?)?;
        if mf.schema != 1 {
            return Err(Error::SchemaMismatch(format!("metadata schema {}", mf.schema)));
        }
        mesh.meta = mf.meta;
    }
    Ok(mesh)
}

pub fn diagnostics_csv(mesh: &SurfaceMesh, d: &ShapeDiagnostics) -> String {
    let mut s = String::with_capacity(mesh.vertices.len() * 160);
    s.push_str(DIAGNOSTICS_HEADER);
    s.push('\n');
    for (v, p) in mesh.vertices.iter().enumerate() {
        let n = d.normal[v];
        let _ = writeln!(
            s,
            "{v},{},{},{},{},{},{},{},{},{},{},{}",
            p.x,
            p.y,
            p.z,
            n.x,
            n.y,
            n.z,
            d.mean[v],
            d.gauss[v],
            d.a_norm_sq[v],
            d.residual[v],
            u8::from(d.boundary[v])
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_grim_reaper, StripSpec};
    use proptest::prelude::*;

    #[test]
    fn obj_preserves_normal_direction() {
        let spec = StripSpec::grim_reaper(0.3, 0.1, 2.0).unwrap();
        let m = make_grim_reaper(&spec, 0.0).unwrap();
        let back = parse_obj(&to_obj(&m)).unwrap();
        assert_eq!(back.vertices, m.vertices);
        let (n0, n1) = (m.vertex_normals(), back.vertex_normals());
        for (a, b) in n0.iter().zip(&n1) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn parses_polygons_and_slash_indices() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3 4/4/4\n").unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 2], [0, 2, 3]]);
        assert!(matches!(parse_obj("v 0 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_obj("f 0 1 2\n").is_err());
    }

    #[test]
    fn sidecar_roundtrip() {
        let dir = std::env::temp_dir().join(format!("soliton-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("gr.obj");
        let spec = StripSpec::grim_reaper(0.3, 0.1, 2.0).unwrap();
        let m = make_grim_reaper(&spec, 0.0).unwrap();
        save_mesh(&m, &path).unwrap();
        let back = load_mesh(&path).unwrap();
        assert_eq!(back.meta, m.meta);
        fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #[test]
        fn vertex_coordinates_roundtrip_exactly(xs in proptest::collection::vec(-1e6f64..1e6, 9)) {
            let verts: Vec<Vec3> = xs.chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
            let m = SurfaceMesh::new(verts.clone(), vec![[0, 1, 2]]);
            let back = parse_obj(&to_obj(&m)).unwrap();
            prop_assert_eq!(back.vertices, verts);
        }
    }
}
