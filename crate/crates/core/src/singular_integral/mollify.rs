use crate::error::Result;
use crate::grid::GridField;
use crate::kernels::Mollifier;
use rayon::prelude::*;

/// Discrete convolution `f * rho_eps` on every node, with `f` extended by
/// zero outside the grid. Vector and tensor fields are mollified componentwise.
pub fn mollify_field<const D: usize, F: GridField<D> + Sync>(f: &F, mollifier: &Mollifier<D>) -> Result<F> {
    let spec = f.spec();
    let shape = spec.shape();
    let stencil = mollifier.stencil(&spec.spacing());
    let c = F::components_per_node();
    let data: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .flat_map_iter(|k| {
            let idx = spec.multi(k);
            let mut acc = vec![0.0; c];
            'offsets: for (o, w) in &stencil {
                let mut j = [0usize; D];
                for a in 0..D {
                    let v = idx[a] as isize + o[a];
                    if v < 0 || v >= shape[a] as isize {
                        continue 'offsets;
                    }
                    j[a] = v as usize;
                }
                for (s, v) in acc.iter_mut().zip(f.node(spec.linear(&j))) {
                    *s += w * v;
                }
            }
            acc
        })
        .collect();
    F::from_raw(spec.clone(), data)
}
