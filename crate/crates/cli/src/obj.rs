//! Wavefront OBJ export of a point grid.

use crate::csv::PointGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub text: String,
    pub vertices: usize,
    pub faces: usize,
    /// Faces left out because they touch a dropped sample.
    pub omitted: usize,
}

/// Vertices in row-major order (holes skipped), then two triangles per cell
/// split along the `(i, j) -> (i+1, j+1)` diagonal. Indices are 1-based.
pub fn mesh(grid: &PointGrid) -> Result<Mesh, String> {
    let mut index = vec![0usize; grid.points.len()];
    let mut text = String::new();
    let mut vertices = 0;
    for (k, p) in grid.points.iter().enumerate() {
        if let Some([x, y, z]) = p {
            vertices += 1;
            index[k] = vertices;
            text += &format!("v {x:.16e} {y:.16e} {z:.16e}\n");
        }
    }
    if vertices == 0 {
        return Err("empty grid".into());
    }
    let (mut faces, mut omitted) = (0, 0);
    let at = |i: usize, j: usize| index[j * grid.nu + i];
    for j in 0..grid.nv.saturating_sub(1) {
        for i in 0..grid.nu.saturating_sub(1) {
            let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            for tri in [[a, b, c], [a, c, d]] {
                if tri.contains(&0) {
                    omitted += 1;
                } else {
                    faces += 1;
                    text += &format!("f {} {} {}\n", tri[0], tri[1], tri[2]);
                }
            }
        }
    }
    Ok(Mesh { text, vertices, faces, omitted })
}
