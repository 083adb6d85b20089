//! CSV and OBJ writers and the CSV grid loader.
//!
//! CSV: header `u,v,x,y,z`, one node per line in grid order (u outer, v
//! inner), every number in `{:.16e}` (17 significant digits), `\n` line ends.
//! OBJ: one `v` line per node in the same order, each grid cell split into
//! two triangles with 1-based indices. Periodic parameters are not welded:
//! a closed tube keeps a duplicated seam.

use crate::error::{CliError, Result};
use casurf_core::{AmbientParams, AmbientPoint, GridSpec, GridSurface};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Obj,
}

pub fn to_csv(surface: &GridSurface) -> String {
    let spec = surface.spec();
    let mut out = String::with_capacity(96 * spec.len() + 16);
    out.push_str("u,v,x,y,z\n");
    for ((_, _, u, v), p) in spec.nodes().zip(surface.points()) {
        let _ = writeln!(out, "{u:.16e},{v:.16e},{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z);
    }
    out
}

pub fn to_obj(surface: &GridSurface) -> String {
    let spec = surface.spec();
    let mut out = String::with_capacity(64 * spec.len() + 64);
    let _ = writeln!(out, "# grid {}x{}", spec.nu, spec.nv);
    for p in surface.points() {
        let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    for i in 0..spec.nu - 1 {
        for j in 0..spec.nv - 1 {
            let a = spec.index(i, j) + 1;
            let b = spec.index(i + 1, j) + 1;
            let (c, d) = (b + 1, a + 1);
            let _ = writeln!(out, "f {a} {b} {c}");
            let _ = writeln!(out, "f {a} {c} {d}");
        }
    }
    out
}

pub fn render(surface: &GridSurface, format: Format) -> String {
    match format {
        Format::Csv => to_csv(surface),
        Format::Obj => to_obj(surface),
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Reads a CSV written by [`to_csv`] (or any file with the same layout).
/// The grid shape is recovered from the distinct `u` and `v` values, which
/// must be uniformly spaced.
pub fn read_csv_grid(path: &Path, params: AmbientParams) -> Result<GridSurface> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_csv_grid(&text, params).map_err(|(line, message)| CliError::GridFile {
        path: path.to_path_buf(),
        line,
        message,
    })
}

fn parse_csv_grid(text: &str, params: AmbientParams) -> std::result::Result<GridSurface, (usize, String)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or((1, "empty file".to_string()))?;
    let cols: Vec<_> = header.split(',').map(str::trim).collect();
    if cols != ["u", "v", "x", "y", "z"] {
        return Err((1, format!("expected header u,v,x,y,z, got `{header}`")));
    }
    let mut rows = Vec::new();
    for (k, line) in lines {
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| (k + 1, e.to_string()))?;
        if vals.len() != 5 {
            return Err((k + 1, format!("expected 5 columns, got {}", vals.len())));
        }
        rows.push((k + 1, vals));
    }
    let first = rows.first().ok_or((2, "no data rows".to_string()))?.1[0];
    let nv = rows.iter().take_while(|(_, r)| r[0] == first).count();
    if nv < 2 || rows.len() % nv != 0 || rows.len() / nv < 2 {
        return Err((
            2,
            format!("{} rows do not form a grid with {} nodes per u-line", rows.len(), nv),
        ));
    }
    let nu = rows.len() / nv;
    let u = (rows[0].1[0], rows[rows.len() - 1].1[0]);
    let v = (rows[0].1[1], rows[nv - 1].1[1]);
    let spec = GridSpec::new(u, v, nu, nv).map_err(|e| (2, e.to_string()))?;
    let tol = 1e-9;
    for ((i, j, gu, gv), (line, r)) in spec.nodes().zip(&rows) {
        let scale_u = (u.1 - u.0).abs().max(1.0);
        let scale_v = (v.1 - v.0).abs().max(1.0);
        if (r[0] - gu).abs() > tol * scale_u || (r[1] - gv).abs() > tol * scale_v {
            return Err((
                *line,
                format!("node ({i}, {j}) expected at ({gu}, {gv}), found ({}, {})", r[0], r[1]),
            ));
        }
    }
    let points = rows.iter().map(|(_, r)| AmbientPoint::new(r[2], r[3], r[4])).collect();
    GridSurface::new(params, spec, points).map_err(|e| (2, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> GridSurface {
        let spec = GridSpec::new((0.0, 1.0), (0.0, 2.0), 2, 3).unwrap();
        let pts = spec
            .nodes()
            .map(|(_, _, u, v)| AmbientPoint::new(u, v, u * v))
            .collect();
        GridSurface::new(AmbientParams::nil3(0.5), spec, pts).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let g = tiny();
        let text = to_csv(&g);
        assert!(text.starts_with("u,v,x,y,z\n0.0000000000000000e0,0.0000000000000000e0,"));
        let back = parse_csv_grid(&text, AmbientParams::nil3(0.5)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn obj_layout() {
        let text = to_obj(&tiny());
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 6);
        let faces: Vec<_> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(faces, ["f 1 4 5", "f 1 5 2", "f 2 5 6", "f 2 6 3"]);
    }

    #[test]
    fn rejects_irregular_grids() {
        let bad = "u,v,x,y,z\n0,0,0,0,0\n0,1,0,0,0\n1,0,0,0,0\n1,1.5,0,0,0\n";
        assert!(parse_csv_grid(bad, AmbientParams::euclidean()).is_err());
        assert!(parse_csv_grid("a,b\n", AmbientParams::euclidean()).is_err());
    }
}
