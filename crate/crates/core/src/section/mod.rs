//! The 2D Dirichlet eigenproblem on the cross-section `S`: ground state
//! `(lambda_0, u_0)`, the spectral gap to `lambda_1`, and the twist-coupling
//! constant `C(S) = int_S |<grad u_0, R y>|^2 dy`.
//!
//! Shapes are rasterized onto a uniform lattice anchored at the section
//! origin (the point `y = 0` the reference curve passes through; `C(S)`
//! depends on it). The Laplacian uses the 5-point stencil with cut-edge
//! boundary weights: an edge that crosses the boundary at distance `a h`
//! from its interior node contributes `1/a` instead of `1`, which restores
//! second-order eigenvalue convergence on curved boundaries while keeping
//! the matrix symmetric. Lattice-aligned boundaries (`a = 1`) reduce to the
//! plain dropped-node scheme.

mod shape;
mod solve;

pub use shape::SectionShape;
pub use solve::{
    section_stiffness, solve_section, twist_coupling_constant, SectionSolveOptions,
    SectionSpectrum,
};

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Smallest admitted boundary-crossing fraction; caps the cut-edge weight.
const MIN_CUT_FRACTION: f64 = 1e-6;

/// Rasterized cross-section: interior lattice nodes at `y = (i h, j h)`
/// relative to the section origin.
#[derive(Debug, Clone)]
pub struct SectionMask {
    shape: SectionShape,
    origin: [f64; 2],
    h: f64,
    nodes: Vec<(i32, i32)>,
    index: HashMap<(i32, i32), u32>,
}

/// Rasterizes a shape with spacing `h`. The origin (where `y = 0` sits)
/// defaults to the shape's centroid; `C(S)` depends on this choice.
pub fn rasterize_section(
    shape: SectionShape,
    h: f64,
    origin: Option<[f64; 2]>,
) -> Result<SectionMask> {
    shape.validate()?;
    if !(h > 0.0) {
        return Err(Error::Section(format!("spacing h must be positive, got {h}")));
    }
    let origin = origin.unwrap_or_else(|| shape.centroid());
    let (lo, hi) = shape.bounding_box();
    let i_lo = ((lo[0] - origin[0]) / h).floor() as i32 - 1;
    let i_hi = ((hi[0] - origin[0]) / h).ceil() as i32 + 1;
    let j_lo = ((lo[1] - origin[1]) / h).floor() as i32 - 1;
    let j_hi = ((hi[1] - origin[1]) / h).ceil() as i32 + 1;
    let mut nodes = Vec::new();
    let mut index = HashMap::new();
    for i in i_lo..=i_hi {
        for j in j_lo..=j_hi {
            let p = [origin[0] + i as f64 * h, origin[1] + j as f64 * h];
            if shape.contains(p) {
                index.insert((i, j), nodes.len() as u32);
                nodes.push((i, j));
            }
        }
    }
    if nodes.len() < 200 {
        return Err(Error::Section(format!(
            "grid too coarse: {} interior nodes (need at least 200); decrease h",
            nodes.len()
        )));
    }
    let mask = SectionMask {
        shape,
        origin,
        h,
        nodes,
        index,
    };
    if !mask.is_connected() {
        return Err(Error::Section(
            "rasterized interior is disconnected; decrease h or fix the shape".into(),
        ));
    }
    Ok(mask)
}

impl SectionMask {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> &SectionShape {
        &self.shape
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[(i32, i32)] {
        &self.nodes
    }

    /// Index of the lattice node `(i, j)`, if interior.
    pub fn node_index(&self, i: i32, j: i32) -> Option<usize> {
        self.index.get(&(i, j)).map(|&m| m as usize)
    }

    /// Coordinates of node `m` relative to the section origin.
    pub fn coords(&self, m: usize) -> [f64; 2] {
        let (i, j) = self.nodes[m];
        [i as f64 * self.h, j as f64 * self.h]
    }

    /// Max |y| over the interior nodes plus a one-cell allowance — the
    /// `section_radius` that enters the thickness guard.
    pub fn radius(&self) -> f64 {
        self.shape.max_distance_from(self.origin)
    }

    /// Fraction `a` of the step `h` from node `(i, j)` to the boundary along
    /// the axis direction `dir` (one of the four unit steps). Only meaningful
    /// when the neighbor in that direction is exterior.
    pub fn cut_fraction(&self, i: i32, j: i32, dir: (i32, i32)) -> f64 {
        let p = [
            self.origin[0] + i as f64 * self.h,
            self.origin[1] + j as f64 * self.h,
        ];
        let d = [dir.0 as f64, dir.1 as f64];
        let a = self.shape.boundary_crossing(p, d, self.h);
        a.clamp(MIN_CUT_FRACTION, 1.0)
    }

    fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        let mut count = 1;
        while let Some(m) = queue.pop_front() {
            let (i, j) = self.nodes[m];
            for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                if let Some(q) = self.node_index(i + d.0, j + d.1) {
                    if !seen[q] {
                        seen[q] = true;
                        count += 1;
                        queue.push_back(q);
                    }
                }
            }
        }
        count == n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_node_count_near_area_over_h_squared() {
        let h = 1.0 / 32.0;
        let mask = rasterize_section(SectionShape::disk(1.0), h, None).unwrap();
        let expect = std::f64::consts::PI / (h * h);
        let got = mask.node_count() as f64;
        assert!(
            (got - expect).abs() / expect < 0.02,
            "disk nodes {got} vs pi/h^2 = {expect}"
        );
    }

    #[test]
    fn unit_square_node_count_is_exact() {
        let mask =
            rasterize_section(SectionShape::rectangle(1.0, 1.0), 1.0 / 32.0, None).unwrap();
        assert_eq!(mask.node_count(), 31 * 31);
    }

    #[test]
    fn degenerate_polygon_is_rejected() {
        let err = rasterize_section(
            SectionShape::polygon(vec![[0.0, 0.0], [1.0, 0.0]]),
            0.01,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Section(_)));
    }

    #[test]
    fn too_coarse_grid_is_rejected() {
        let err = rasterize_section(SectionShape::disk(1.0), 0.2, None).unwrap_err();
        assert!(matches!(err, Error::Section(_)));
    }

    #[test]
    fn polygon_square_matches_rectangle() {
        let poly = rasterize_section(
            SectionShape::polygon(vec![
                [-0.5, -0.5],
                [0.5, -0.5],
                [0.5, 0.5],
                [-0.5, 0.5],
            ]),
            1.0 / 32.0,
            None,
        )
        .unwrap();
        assert_eq!(poly.node_count(), 31 * 31);
        // centroid origin puts (0,0) at the square center
        assert!(poly.node_index(0, 0).is_some());
    }

    #[test]
    fn cut_fractions_are_exact_for_the_disk() {
        let h = 1.0 / 32.0;
        let mask = rasterize_section(SectionShape::disk(1.0), h, None).unwrap();
        // node (31, 0): boundary at x = 1, i.e. t = (1 - 31/32) / h = 1
        let a = mask.cut_fraction(31, 0, (1, 0));
        assert!((a - 1.0).abs() < 1e-12);
        // node (0, 31) upward likewise
        let a = mask.cut_fraction(0, 31, (0, 1));
        assert!((a - 1.0).abs() < 1e-12);
    }
}
