//! First and second moments of a degree `-n` kernel over a set of grid cells
//! around the origin.

use crate::kernels::gauss_legendre;

const FACE_NODES: usize = 16;
const CELL_NODES: usize = 12;

/// Tensor Gauss–Legendre points and weights over a box.
fn box_rule<const M: usize>(lo: &[f64], hi: &[f64], m: usize) -> Vec<([f64; M], f64)> {
    let (x, w) = gauss_legendre(m);
    let count = m.pow(M as u32);
    let mut out = Vec::with_capacity(count);
    for mut k in 0..count {
        let mut p = [0.0; M];
        let mut wt = 1.0;
        for a in (0..M).rev() {
            let i = k % m;
            k /= m;
            let half = 0.5 * (hi[a] - lo[a]);
            p[a] = lo[a] + half * (x[i] + 1.0);
            wt *= half * w[i];
        }
        out.push((p, wt));
    }
    out
}

/// `(int y k, int y y^T k)` over the listed cells, where `k` is homogeneous
/// of degree `-n`. The cell containing the origin is split into pyramids
/// with apex at the origin so the radial integral is done exactly.
pub(crate) fn cell_moments<const D: usize>(
    k: &impl Fn(&[f64; D]) -> f64,
    spacing: &[f64; D],
    cells: &[[isize; D]],
) -> ([f64; D], [[f64; D]; D]) {
    let mut m1 = [0.0; D];
    let mut m2 = [[0.0; D]; D];
    let mut add = |p: &[f64; D], w1: f64, w2: f64| {
        let kv = k(p);
        for a in 0..D {
            m1[a] += w1 * p[a] * kv;
            for b in 0..D {
                m2[a][b] += w2 * p[a] * p[b] * kv;
            }
        }
    };
    for cell in cells {
        if cell.iter().all(|&c| c == 0) {
            for a in 0..D {
                let d = 0.5 * spacing[a];
                let tangential: Vec<usize> = (0..D).filter(|&b| b != a).collect();
                let lo: Vec<f64> = tangential.iter().map(|&b| -0.5 * spacing[b]).collect();
                let hi: Vec<f64> = tangential.iter().map(|&b| 0.5 * spacing[b]).collect();
                for s in [-1.0, 1.0] {
                    let mut emit = |u: &[f64], w: f64| {
                        let mut p = [0.0; D];
                        p[a] = s * d;
                        for (t, &b) in tangential.iter().enumerate() {
                            p[b] = u[t];
                        }
                        add(&p, d * w, 0.5 * d * w);
                    };
                    if D == 2 {
                        for (u, w) in box_rule::<1>(&lo, &hi, FACE_NODES) {
                            emit(&u, w);
                        }
                    } else {
                        for (u, w) in box_rule::<2>(&lo, &hi, FACE_NODES) {
                            emit(&u, w);
                        }
                    }
                }
            }
        } else {
            let lo: Vec<f64> = (0..D).map(|a| (cell[a] as f64 - 0.5) * spacing[a]).collect();
            let hi: Vec<f64> = (0..D).map(|a| (cell[a] as f64 + 0.5) * spacing[a]).collect();
            for (p, w) in box_rule::<D>(&lo, &hi, CELL_NODES) {
                add(&p, w, w);
            }
        }
    }
    (m1, m2)
}
