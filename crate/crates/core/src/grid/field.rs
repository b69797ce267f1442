use super::{GridSpec, Window};
use crate::error::{Error, Result};

/// Raw access shared by scalar, vector and tensor fields.
pub trait GridField<const D: usize>: Sized {
    /// Components stored per node.
    fn components_per_node() -> usize;

    fn spec(&self) -> &GridSpec<D>;

    fn data(&self) -> &[f64];

    /// Builds a field from raw samples, validating length and finiteness.
    fn from_raw(spec: GridSpec<D>, data: Vec<f64>) -> Result<Self>;

    /// Components at node `k`.
    fn node(&self, k: usize) -> &[f64] {
        let c = Self::components_per_node();
        &self.data()[k * c..(k + 1) * c]
    }

    /// Restriction to the nodes of a window, on the window's own subgrid.
    fn restrict(&self, w: &Window<D>) -> Result<Self> {
        let sub = self.spec().subgrid(w)?;
        let c = Self::components_per_node();
        let mut out = Vec::with_capacity(w.len() * c);
        for idx in w.indices() {
            out.extend_from_slice(self.node(self.spec().linear(&idx)));
        }
        Self::from_raw(sub, out)
    }
}

fn validate<const D: usize>(spec: &GridSpec<D>, data: &[f64], comps: usize) -> Result<()> {
    let expected = spec.len() * comps;
    if data.len() != expected {
        return Err(Error::LengthMismatch { expected, got: data.len() });
    }
    if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: spec.multi(pos / comps).to_vec(), component: pos % comps });
    }
    Ok(())
}

macro_rules! field_common {
    ($name:ident, $comps:expr) => {
        impl<const D: usize> GridField<D> for $name<D> {
            fn components_per_node() -> usize {
                $comps
            }

            fn spec(&self) -> &GridSpec<D> {
                &self.spec
            }

            fn data(&self) -> &[f64] {
                &self.data
            }

            fn from_raw(spec: GridSpec<D>, data: Vec<f64>) -> Result<Self> {
                validate(&spec, &data, $comps)?;
                Ok(Self { spec, data })
            }
        }

        impl<const D: usize> $name<D> {
            pub fn zeros(spec: GridSpec<D>) -> Self {
                let n = spec.len() * $comps;
                Self { spec, data: vec![0.0; n] }
            }

            pub fn spec(&self) -> &GridSpec<D> {
                &self.spec
            }

            pub fn data(&self) -> &[f64] {
                &self.data
            }

            /// Linear combination `alpha * self + beta * other` on a shared grid.
            pub fn axpby(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
                self.spec.same_as(&other.spec)?;
                let data = self.data.iter().zip(&other.data).map(|(a, b)| alpha * a + beta * b).collect();
                Self::from_raw(self.spec.clone(), data)
            }

            pub fn scale(&self, alpha: f64) -> Self {
                Self { spec: self.spec.clone(), data: self.data.iter().map(|v| alpha * v).collect() }
            }

            pub fn max_abs(&self) -> f64 {
                self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<const D: usize> {
    spec: GridSpec<D>,
    data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<const D: usize> {
    spec: GridSpec<D>,
    data: Vec<f64>,
}

/// Tensor samples `f^i_j`, stored `i * D + j` within each node.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField<const D: usize> {
    spec: GridSpec<D>,
    data: Vec<f64>,
}

field_common!(ScalarField, 1);
field_common!(VectorField, D);
field_common!(TensorField, D * D);

impl<const D: usize> ScalarField<D> {
    pub fn from_fn(spec: GridSpec<D>, f: impl Fn(&[f64; D]) -> f64) -> Result<Self> {
        let data = (0..spec.len()).map(|k| f(&spec.point_linear(k))).collect();
        Self::from_raw(spec, data)
    }

    pub fn constant(spec: GridSpec<D>, c: f64) -> Result<Self> {
        let n = spec.len();
        Self::from_raw(spec, vec![c; n])
    }

    pub fn at(&self, idx: &[usize; D]) -> f64 {
        self.data[self.spec.linear(idx)]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_raw(self.spec.clone(), self.data.iter().map(|&v| f(v)).collect())
    }

    /// Adds a constant, e.g. to change the pressure gauge.
    pub fn shift(&self, c: f64) -> Self {
        Self { spec: self.spec.clone(), data: self.data.iter().map(|v| v + c).collect() }
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

impl<const D: usize> VectorField<D> {
    pub fn from_fn(spec: GridSpec<D>, f: impl Fn(&[f64; D]) -> [f64; D]) -> Result<Self> {
        let mut data = Vec::with_capacity(spec.len() * D);
        for k in 0..spec.len() {
            data.extend_from_slice(&f(&spec.point_linear(k)));
        }
        Self::from_raw(spec, data)
    }

    pub fn at(&self, idx: &[usize; D]) -> [f64; D] {
        let k = self.spec.linear(idx);
        std::array::from_fn(|a| self.data[k * D + a])
    }

    pub fn at_linear(&self, k: usize) -> [f64; D] {
        std::array::from_fn(|a| self.data[k * D + a])
    }

    pub fn component(&self, a: usize) -> ScalarField<D> {
        let data = self.data.iter().skip(a).step_by(D).copied().collect();
        ScalarField { spec: self.spec.clone(), data }
    }

    pub fn from_components(parts: &[ScalarField<D>]) -> Result<Self> {
        if parts.len() != D {
            return Err(Error::InvalidArgument(format!("need {D} components, got {}", parts.len())));
        }
        let spec = parts[0].spec.clone();
        for p in parts {
            spec.same_as(&p.spec)?;
        }
        let mut data = Vec::with_capacity(spec.len() * D);
        for k in 0..spec.len() {
            for p in parts {
                data.push(p.data[k]);
            }
        }
        Self::from_raw(spec, data)
    }

    /// Pointwise Euclidean norm.
    pub fn magnitude(&self) -> ScalarField<D> {
        let data = self.data.chunks_exact(D).map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        ScalarField { spec: self.spec.clone(), data }
    }
}

impl<const D: usize> TensorField<D> {
    pub fn from_fn(spec: GridSpec<D>, f: impl Fn(&[f64; D]) -> [[f64; D]; D]) -> Result<Self> {
        let mut data = Vec::with_capacity(spec.len() * D * D);
        for k in 0..spec.len() {
            let t = f(&spec.point_linear(k));
            for row in &t {
                data.extend_from_slice(row);
            }
        }
        Self::from_raw(spec, data)
    }

    /// `q * Id` for a scalar field `q`.
    pub fn isotropic(q: &ScalarField<D>) -> Self {
        let mut data = vec![0.0; q.data.len() * D * D];
        for (k, &v) in q.data.iter().enumerate() {
            for i in 0..D {
                data[k * D * D + i * D + i] = v;
            }
        }
        Self { spec: q.spec.clone(), data }
    }

    pub fn at(&self, idx: &[usize; D]) -> [[f64; D]; D] {
        self.at_linear(self.spec.linear(idx))
    }

    pub fn at_linear(&self, k: usize) -> [[f64; D]; D] {
        let base = k * D * D;
        std::array::from_fn(|i| std::array::from_fn(|j| self.data[base + i * D + j]))
    }

    /// Component `f^i_j` as a scalar field.
    pub fn component(&self, i: usize, j: usize) -> ScalarField<D> {
        let data = self.data.iter().skip(i * D + j).step_by(D * D).copied().collect();
        ScalarField { spec: self.spec.clone(), data }
    }

    /// Row `i` as a vector field.
    pub fn row(&self, i: usize) -> VectorField<D> {
        let mut data = Vec::with_capacity(self.spec.len() * D);
        for node in self.data.chunks_exact(D * D) {
            data.extend_from_slice(&node[i * D..(i + 1) * D]);
        }
        VectorField { spec: self.spec.clone(), data }
    }

    /// Pointwise Frobenius norm.
    pub fn frobenius(&self) -> ScalarField<D> {
        let data = self.data.chunks_exact(D * D).map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        ScalarField { spec: self.spec.clone(), data }
    }

    pub fn multiply_scalar(&self, s: &ScalarField<D>) -> Result<Self> {
        self.spec.same_as(&s.spec)?;
        let mut data = self.data.clone();
        for (k, chunk) in data.chunks_exact_mut(D * D).enumerate() {
            for v in chunk {
                *v *= s.data[k];
            }
        }
        Self::from_raw(self.spec.clone(), data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_with_location() {
        let spec = GridSpec::<2>::new([4, 4], [1.0; 2], [0.0; 2]).unwrap();
        let mut data = vec![0.0; 16 * 2];
        data[2 * 5 + 1] = f64::INFINITY;
        match VectorField::from_raw(spec, data) {
            Err(Error::NonFinite { index, component }) => {
                assert_eq!(index, vec![1, 1]);
                assert_eq!(component, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tensor_layout_is_row_major() {
        let spec = GridSpec::<2>::new([4, 4], [1.0; 2], [0.0; 2]).unwrap();
        let t = TensorField::from_fn(spec, |_| [[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(&t.data()[..4], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(t.component(1, 0).values()[7], 3.0);
        assert_eq!(t.row(0).at_linear(3), [1.0, 2.0]);
    }

    #[test]
    fn restriction_keeps_coordinates() {
        let spec = GridSpec::<2>::cell_centered(16, 0.0, 1.0).unwrap();
        let f = ScalarField::from_fn(spec.clone(), |x| x[0] + 10.0 * x[1]).unwrap();
        let w = Window::new([3, 5], [9, 12]).unwrap();
        let r = f.restrict(&w).unwrap();
        let x = r.spec().point(&[0, 0]);
        assert!((r.at(&[0, 0]) - (x[0] + 10.0 * x[1])).abs() < 1e-14);
        assert_eq!(x, spec.point(&[3, 5]));
    }
}
