use crate::error::{Error, Result};

/// Cross-section shapes. Coordinates are the shape's own; the section origin
/// (where `y = 0` sits) is chosen at rasterization time.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionShape {
    Disk { radius: f64 },
    Rectangle { width: f64, height: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl SectionShape {
    pub fn disk(radius: f64) -> Self {
        SectionShape::Disk { radius }
    }

    pub fn rectangle(width: f64, height: f64) -> Self {
        SectionShape::Rectangle { width, height }
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Self {
        SectionShape::Polygon { vertices }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SectionShape::Disk { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Section(format!(
                        "disk radius must be positive, got {radius}"
                    )));
                }
            }
            SectionShape::Rectangle { width, height } => {
                if !(*width > 0.0 && *height > 0.0) {
                    return Err(Error::Section(format!(
                        "rectangle sides must be positive, got {width} x {height}"
                    )));
                }
            }
            SectionShape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::Section(format!(
                        "polygon needs at least 3 vertices, got {}",
                        vertices.len()
                    )));
                }
                if self.polygon_area().abs() < 1e-14 {
                    return Err(Error::Section("polygon has zero area".into()));
                }
            }
        }
        Ok(())
    }

    /// Strict interior test.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            SectionShape::Disk { radius } => p[0] * p[0] + p[1] * p[1] < radius * radius,
            SectionShape::Rectangle { width, height } => {
                p[0].abs() < width / 2.0 && p[1].abs() < height / 2.0
            }
            SectionShape::Polygon { vertices } => {
                let n = vertices.len();
                // points on an edge are boundary, not interior
                for e in 0..n {
                    let a = vertices[e];
                    let b = vertices[(e + 1) % n];
                    let ex = b[0] - a[0];
                    let ey = b[1] - a[1];
                    let len2 = ex * ex + ey * ey;
                    let t = (((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2).clamp(0.0, 1.0);
                    let dx = p[0] - (a[0] + t * ex);
                    let dy = p[1] - (a[1] + t * ey);
                    if dx * dx + dy * dy < 1e-24 {
                        return false;
                    }
                }
                // even-odd crossing rule on the ray x -> +inf
                let mut inside = false;
                for e in 0..n {
                    let a = vertices[e];
                    let b = vertices[(e + 1) % n];
                    if (a[1] > p[1]) != (b[1] > p[1]) {
                        let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                        if p[0] < x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Fraction `t` such that `p + t * h * d` lies on the boundary, for an
    /// interior `p` and an axis direction `d` whose step leaves the shape.
    /// Falls back to 1 when no crossing is found within the step.
    pub fn boundary_crossing(&self, p: [f64; 2], d: [f64; 2], h: f64) -> f64 {
        match self {
            SectionShape::Disk { radius } => {
                // |p + t h d|^2 = r^2, take the positive root
                let b = (p[0] * d[0] + p[1] * d[1]) * h;
                let c = p[0] * p[0] + p[1] * p[1] - radius * radius;
                let disc = b * b - h * h * c;
                if disc <= 0.0 {
                    return 1.0;
                }
                (-b + disc.sqrt()) / (h * h)
            }
            SectionShape::Rectangle { width, height } => {
                if d[0] != 0.0 {
                    let wall = if d[0] > 0.0 { width / 2.0 } else { -width / 2.0 };
                    (wall - p[0]) / (d[0] * h)
                } else {
                    let wall = if d[1] > 0.0 { height / 2.0 } else { -height / 2.0 };
                    (wall - p[1]) / (d[1] * h)
                }
            }
            SectionShape::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = 1.0f64;
                for e in 0..n {
                    let a = vertices[e];
                    let b = vertices[(e + 1) % n];
                    // p + t h d = a + u (b - a), 0 <= u <= 1
                    let ex = b[0] - a[0];
                    let ey = b[1] - a[1];
                    let det = d[0] * h * (-ey) - d[1] * h * (-ex);
                    if det.abs() < 1e-300 {
                        continue;
                    }
                    let rx = a[0] - p[0];
                    let ry = a[1] - p[1];
                    let t = (rx * (-ey) + ry * ex) / det;
                    let u = (d[0] * h * ry - d[1] * h * rx) / det;
                    if t > 0.0 && t <= best && (-1e-12..=1.0 + 1e-12).contains(&u) {
                        best = t;
                    }
                }
                best
            }
        }
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            SectionShape::Disk { radius } => ([-radius, -radius], [*radius, *radius]),
            SectionShape::Rectangle { width, height } => {
                ([-width / 2.0, -height / 2.0], [width / 2.0, height / 2.0])
            }
            SectionShape::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for a in 0..2 {
                        lo[a] = lo[a].min(v[a]);
                        hi[a] = hi[a].max(v[a]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Area centroid — the default section origin.
    pub fn centroid(&self) -> [f64; 2] {
        match self {
            SectionShape::Disk { .. } | SectionShape::Rectangle { .. } => [0.0, 0.0],
            SectionShape::Polygon { vertices } => {
                let n = vertices.len();
                let mut a2 = 0.0;
                let mut cx = 0.0;
                let mut cy = 0.0;
                for e in 0..n {
                    let p = vertices[e];
                    let q = vertices[(e + 1) % n];
                    let w = p[0] * q[1] - q[0] * p[1];
                    a2 += w;
                    cx += (p[0] + q[0]) * w;
                    cy += (p[1] + q[1]) * w;
                }
                [cx / (3.0 * a2), cy / (3.0 * a2)]
            }
        }
    }

    /// Max distance from `origin` to the closure of the shape.
    pub fn max_distance_from(&self, origin: [f64; 2]) -> f64 {
        match self {
            SectionShape::Disk { radius } => {
                radius + (origin[0] * origin[0] + origin[1] * origin[1]).sqrt()
            }
            SectionShape::Rectangle { width, height } => {
                let mut worst: f64 = 0.0;
                for sx in [-0.5, 0.5] {
                    for sy in [-0.5, 0.5] {
                        let dx = sx * width - origin[0];
                        let dy = sy * height - origin[1];
                        worst = worst.max((dx * dx + dy * dy).sqrt());
                    }
                }
                worst
            }
            SectionShape::Polygon { vertices } => vertices
                .iter()
                .map(|v| {
                    let dx = v[0] - origin[0];
                    let dy = v[1] - origin[1];
                    (dx * dx + dy * dy).sqrt()
                })
                .fold(0.0, f64::max),
        }
    }

    fn polygon_area(&self) -> f64 {
        match self {
            SectionShape::Polygon { vertices } => {
                let n = vertices.len();
                let mut a2 = 0.0;
                for e in 0..n {
                    let p = vertices[e];
                    let q = vertices[(e + 1) % n];
                    a2 += p[0] * q[1] - q[0] * p[1];
                }
                a2 / 2.0
            }
            _ => 0.0,
        }
    }
}
