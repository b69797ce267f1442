use crate::grid::{GridSpec, ScalarField, Window};

/// Discrete correlation `x -> sum_y sum_k W_k(x - y) g_k(y)` restricted to the
/// bounding box of the nonzero samples of the `g_k`.
pub(crate) struct Correlator<const D: usize> {
    omin: [isize; D],
    tstride: [usize; D],
    table: Vec<f64>,
    nk: usize,
    supp: Window<D>,
    gpack: Vec<f64>,
}

pub(crate) fn support_box<const D: usize>(gs: &[&ScalarField<D>]) -> Option<Window<D>> {
    let spec = gs[0].spec();
    let mut lo = spec.shape();
    let mut hi = [0usize; D];
    let mut any = false;
    for g in gs {
        for (k, v) in g.values().iter().enumerate() {
            if *v != 0.0 {
                any = true;
                let idx = spec.multi(k);
                for a in 0..D {
                    lo[a] = lo[a].min(idx[a]);
                    hi[a] = hi[a].max(idx[a] + 1);
                }
            }
        }
    }
    any.then_some(Window { lo, hi })
}

impl<const D: usize> Correlator<D> {
    /// `weight(offset, out)` writes the `nk` kernel weights for one lattice
    /// offset. Returns `None` when every `g_k` vanishes.
    pub(crate) fn new(
        spec: &GridSpec<D>,
        eval: &Window<D>,
        gs: &[&ScalarField<D>],
        weight: impl Fn(&[isize; D], &mut [f64]),
    ) -> Option<Self> {
        let supp = support_box(gs)?;
        let nk = gs.len();
        let omin: [isize; D] = std::array::from_fn(|a| eval.lo[a] as isize - supp.hi[a] as isize + 1);
        let tshape: [usize; D] =
            std::array::from_fn(|a| (eval.hi[a] as isize - 1 - supp.lo[a] as isize - omin[a] + 1) as usize);
        let tstride: [usize; D] = std::array::from_fn(|a| tshape[a + 1..].iter().product());
        let tlen: usize = tshape.iter().product();
        let mut table = vec![0.0; tlen * nk];
        for (t, chunk) in table.chunks_exact_mut(nk).enumerate() {
            let mut rem = t;
            let mut o = [0isize; D];
            for a in 0..D {
                o[a] = omin[a] + (rem / tstride[a]) as isize;
                rem %= tstride[a];
            }
            weight(&o, chunk);
        }
        let mut gpack = vec![0.0; supp.len() * nk];
        for (n, idx) in supp.indices().enumerate() {
            let lin = spec.linear(&idx);
            for (k, g) in gs.iter().enumerate() {
                gpack[n * nk + k] = g.values()[lin];
            }
        }
        Some(Self { omin, tstride, table, nk, supp, gpack })
    }

    pub(crate) fn at(&self, x: &[usize; D]) -> f64 {
        let sshape = self.supp.shape();
        let nk = self.nk;
        let inner = sshape[D - 1];
        let rows = self.supp.len() / inner;
        let last = D - 1;
        let t0 = (x[last] as isize - self.supp.lo[last] as isize - self.omin[last]) as usize;
        let mut total = 0.0;
        for row in 0..rows {
            let mut rem = row;
            let mut base = 0usize;
            for a in (0..D - 1).rev() {
                let ya = self.supp.lo[a] + rem % sshape[a];
                rem /= sshape[a];
                base += (x[a] as isize - ya as isize - self.omin[a]) as usize * self.tstride[a];
            }
            let gy = &self.gpack[row * inner * nk..(row + 1) * inner * nk];
            // Offsets along the last axis decrease as y advances.
            let first = base + t0 + 1 - inner;
            let trow = &self.table[first * nk..(base + t0 + 1) * nk];
            if nk == 1 {
                total += trow.iter().rev().zip(gy).map(|(t, g)| t * g).sum::<f64>();
            } else {
                for (tv, gv) in trow.chunks_exact(nk).rev().zip(gy.chunks_exact(nk)) {
                    total += tv.iter().zip(gv).map(|(t, g)| t * g).sum::<f64>();
                }
            }
        }
        total
    }
}
