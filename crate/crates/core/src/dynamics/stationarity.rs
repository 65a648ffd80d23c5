use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};

/// Step of the central differences in [`stationarity_residual`].
pub const STATIONARITY_STEP: f64 = 1e-4;

/// Tensor grid of nodes on a box in dimension 1 or 2.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub nodes_per_axis: usize,
}

impl NodeGrid {
    pub fn square(lo: f64, hi: f64, dim: usize, nodes_per_axis: usize) -> Self {
        Self { lo: vec![lo; dim], hi: vec![hi; dim], nodes_per_axis }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn nodes(&self) -> Vec<Vec<f64>> {
        let n = self.nodes_per_axis;
        let axis = |k: usize| -> Vec<f64> {
            (0..n).map(|i| self.lo[k] + (self.hi[k] - self.lo[k]) * i as f64 / (n - 1) as f64).collect()
        };
        match self.dim() {
            1 => axis(0).into_iter().map(|x| vec![x]).collect(),
            _ => {
                let (ax, ay) = (axis(0), axis(1));
                ax.iter().flat_map(|x| ay.iter().map(move |y| vec![*x, *y])).collect()
            }
        }
    }
}

/// `sup |∇·(e^{-V} F)| / sup e^{-V}` over the grid nodes, with the divergence
/// taken by central differences of step [`STATIONARITY_STEP`].
pub fn stationarity_residual(v: &ScalarField, f: &VectorField, grid: &NodeGrid) -> Result<f64> {
    let dim = grid.dim();
    if !(1..=2).contains(&dim) || v.dim() != dim || f.dim() != dim {
        return Err(Error::InvalidParameter("stationarity is checked in dimension 1 or 2".into()));
    }
    if grid.nodes_per_axis < 2 {
        return Err(Error::InvalidParameter("need at least 2 nodes per axis".into()));
    }
    let h = STATIONARITY_STEP;
    let flux = |x: &[f64], k: usize| -> f64 {
        let mut out = [0.0; 2];
        f.eval(x, &mut out[..dim]);
        (-v.eval(x)).exp() * out[k]
    };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in grid.nodes() {
        scale = scale.max((-v.eval(&x)).exp());
        let mut div = 0.0;
        for k in 0..dim {
            let (mut p, mut m) = (x.clone(), x.clone());
            p[k] += h;
            m[k] -= h;
            div += (flux(&p, k) - flux(&m, k)) / (2.0 * h);
        }
        worst = worst.max(div.abs());
    }
    if !(scale > 0.0) {
        return Err(Error::NumericalFailure("e^{-V} vanishes on the whole grid".into()));
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::make_rotational_F;
    use crate::measures::{catalog, CatalogParams};

    #[test]
    fn zero_and_rotational_fields_are_stationary() {
        let g = catalog("gaussian_2d", &CatalogParams::default()).unwrap();
        let grid = NodeGrid::square(-4.0, 4.0, 2, 81);
        let zero = VectorField::zero(2);
        assert_eq!(stationarity_residual(&g.potential, &zero, &grid).unwrap(), 0.0);
        let f = make_rotational_F(&g.gradient, [[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert!(stationarity_residual(&g.potential, &f, &grid).unwrap() < 1e-6);
    }

    #[test]
    fn gradient_field_is_flagged() {
        // ∇·(e^{-V} x) = e^{-V}(2 − |x|²), whose normalised sup is 2 at the origin
        let g = catalog("gaussian_2d", &CatalogParams::default()).unwrap();
        let grid = NodeGrid::square(-4.0, 4.0, 2, 81);
        let r = stationarity_residual(&g.potential, &g.gradient, &grid).unwrap();
        assert!((r - 2.0).abs() < 1e-6, "{r}");
    }
}
