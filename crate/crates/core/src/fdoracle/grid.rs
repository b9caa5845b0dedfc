//! Tensor grids aligned with the material interfaces.

use crate::params::{region_of, Geometry, Material, RegionId};

/// Node-centred tensor grid in (r, z).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    /// Material of each radial segment `[r[i], r[i+1]]`.
    pub seg_material: Vec<Material>,
    pub geo: Geometry,
}

/// Equispaced nodes on `[a, b]`.
pub fn uniform_axis(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "an axis needs at least two nodes");
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Nodes on `[a, b]` clustered geometrically toward `a`; `k = 0` is uniform.
pub fn graded_axis(a: f64, b: f64, n: usize, k: f64) -> Vec<f64> {
    if k.abs() < 1e-12 {
        return uniform_axis(a, b, n);
    }
    let denom = k.exp_m1();
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                let s = i as f64 / (n - 1) as f64;
                a + (b - a) * (k * s).exp_m1() / denom
            }
        })
        .collect()
}

/// Regions in radial order with their bounds.
fn layers(geo: &Geometry) -> [(f64, f64); 5] {
    RegionId::ALL.map(|id| geo.bounds(id))
}

impl Grid2D {
    fn from_counts(geo: &Geometry, counts: [usize; 5], z: Vec<f64>) -> Grid2D {
        let mut r = vec![0.0];
        for ((a, b), n) in layers(geo).into_iter().zip(counts) {
            let n = n.max(1);
            for k in 1..=n {
                r.push(if k == n { b } else { a + (b - a) * k as f64 / n as f64 });
            }
        }
        let seg_material = r
            .windows(2)
            .map(|w| {
                region_of(0.5 * (w[0] + w[1]), geo)
                    .expect("segment inside the domain")
                    .material()
            })
            .collect();
        Grid2D {
            r,
            z,
            seg_material,
            geo: *geo,
        }
    }

    /// Radial spacing at most `hr` in every region.
    pub fn with_spacing(geo: &Geometry, hr: f64, z: Vec<f64>) -> Grid2D {
        let counts = layers(geo).map(|(a, b)| ((b - a) / hr).ceil() as usize);
        Grid2D::from_counts(geo, counts, z)
    }

    /// About `nr` radial nodes, split by layer thickness, at least two
    /// segments per layer.
    pub fn with_count(geo: &Geometry, nr: usize, z: Vec<f64>) -> Grid2D {
        let h = geo.r_s / (nr.max(11) - 1) as f64;
        let counts = layers(geo).map(|(a, b)| (((b - a) / h).round() as usize).max(2));
        Grid2D::from_counts(geo, counts, z)
    }

    pub fn nr(&self) -> usize {
        self.r.len()
    }

    pub fn nz(&self) -> usize {
        self.z.len()
    }

    pub fn len(&self) -> usize {
        self.nr() * self.nz()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index, z-major.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nr() + i
    }

    /// Refines every segment of both axes into two.
    pub fn refined(&self) -> Grid2D {
        let split = |v: &[f64]| {
            let mut out = Vec::with_capacity(2 * v.len() - 1);
            for w in v.windows(2) {
                out.push(w[0]);
                out.push(0.5 * (w[0] + w[1]));
            }
            out.push(*v.last().unwrap());
            out
        };
        let r = split(&self.r);
        let seg_material = self
            .seg_material
            .iter()
            .flat_map(|m| [*m, *m])
            .collect();
        Grid2D {
            r,
            z: split(&self.z),
            seg_material,
            geo: self.geo,
        }
    }

    /// Radial control-volume halves of node `i`: (left material, ∫r dr on the
    /// left half, right material, ∫r dr on the right half).
    pub fn radial_halves(&self, i: usize) -> (Option<Material>, f64, Option<Material>, f64) {
        let r = &self.r;
        let ri = r[i];
        let left = if i > 0 {
            let f = 0.5 * (r[i - 1] + ri);
            (Some(self.seg_material[i - 1]), 0.5 * (ri * ri - f * f))
        } else {
            (None, 0.0)
        };
        let right = if i + 1 < r.len() {
            let f = 0.5 * (ri + r[i + 1]);
            (Some(self.seg_material[i]), 0.5 * (f * f - ri * ri))
        } else {
            (None, 0.0)
        };
        (left.0, left.1, right.0, right.1)
    }

    /// Radial extent `[lo, hi]` of node `i`'s control volume.
    pub fn r_cell(&self, i: usize) -> (f64, f64) {
        let r = &self.r;
        let lo = if i > 0 { 0.5 * (r[i - 1] + r[i]) } else { r[0] };
        let hi = if i + 1 < r.len() { 0.5 * (r[i] + r[i + 1]) } else { r[i] };
        (lo, hi)
    }

    /// Axial extent `[lo, hi]` of node `j`'s control volume.
    pub fn z_cell(&self, j: usize) -> (f64, f64) {
        let z = &self.z;
        let lo = if j > 0 { 0.5 * (z[j - 1] + z[j]) } else { z[0] };
        let hi = if j + 1 < z.len() { 0.5 * (z[j] + z[j + 1]) } else { z[j] };
        (lo, hi)
    }

    /// Weighted sum `Σ w_ij f_ij` with the control-volume measure r dr dz.
    pub fn volume_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        for j in 0..self.nz() {
            let (za, zb) = self.z_cell(j);
            for i in 0..self.nr() {
                let (_, vl, _, vr) = self.radial_halves(i);
                w[self.idx(i, j)] = (vl + vr) * (zb - za);
            }
        }
        w
    }
}
