//! Validated algebra elements and conjugation recipes.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    c64, ensure_finite, fro_norm, is_skew_hermitian, is_traceless, mat_exp, stack_rows, vectorize,
    CMatrix, RMatrix, VectorizedElement,
};

/// Tolerance for the skew-Hermitian and traceless checks, relative to the
/// Frobenius norm (or absolute below norm 1).
pub const ELEMENT_TOL: f64 = 1e-10;

/// A traceless skew-Hermitian matrix with its coordinates and a label.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    matrix: CMatrix,
    coords: VectorizedElement,
    label: String,
}

impl AlgebraElement {
    pub fn new(matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        ensure_finite(&matrix)?;
        if !is_skew_hermitian(&matrix, ELEMENT_TOL) {
            return Err(Error::Validation("element is not skew-Hermitian".into()));
        }
        if !is_traceless(&matrix, ELEMENT_TOL) {
            return Err(Error::Validation("element is not traceless".into()));
        }
        let coords = vectorize(&matrix)?;
        Ok(Self {
            matrix,
            coords,
            label: label.into(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn coords(&self) -> &VectorizedElement {
        &self.coords
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn norm(&self) -> f64 {
        fro_norm(&self.matrix)
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * c64(s, 0.0),
            coords: VectorizedElement::new(self.coords.as_slice().iter().map(|x| x * s).collect()),
            label: self.label.clone(),
        }
    }
}

/// A directly available one-parameter subgroup `t ↦ exp(t·matrix)`.
///
/// `field` is the applied field in hardware units (zero for pure coupling
/// evolution); generators built from arbitrary matrices carry zeros.
#[derive(Debug, Clone)]
pub struct Generator {
    pub label: String,
    pub field: [f64; 3],
    pub matrix: CMatrix,
}

impl Generator {
    pub fn is_idle(&self) -> bool {
        self.field == [0.0; 3]
    }
}

/// One pulse: generator `generator` of the catalog applied for `duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub generator: usize,
    pub duration: f64,
}

/// `Ad(e^{c₁})···Ad(e^{cₘ})(core)` with conjugators listed outermost first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub conjugators: Vec<Step>,
    pub core: Step,
}

impl Recipe {
    pub fn core(generator: usize, duration: f64) -> Self {
        Self {
            conjugators: Vec::new(),
            core: Step {
                generator,
                duration,
            },
        }
    }

    /// Prepend an outer conjugation.
    pub fn conjugated(&self, outer: Step) -> Self {
        let mut conjugators = Vec::with_capacity(self.conjugators.len() + 1);
        conjugators.push(outer);
        conjugators.extend_from_slice(&self.conjugators);
        Self {
            conjugators,
            core: self.core,
        }
    }

    pub fn evaluate(&self, catalog: &[Generator]) -> Result<CMatrix> {
        let gen = |s: &Step| -> Result<CMatrix> {
            catalog
                .get(s.generator)
                .map(|g| &g.matrix * c64(s.duration, 0.0))
                .ok_or_else(|| Error::Validation(format!("unknown generator {}", s.generator)))
        };
        let mut m = gen(&self.core)?;
        for step in self.conjugators.iter().rev() {
            let g = mat_exp(&gen(step)?)?;
            m = &g * m * g.adjoint();
        }
        Ok(m)
    }
}

/// An element together with a recipe that reaches it from the catalog.
#[derive(Debug, Clone)]
pub struct RealizableElement {
    pub element: AlgebraElement,
    pub recipe: Recipe,
    pub provenance: String,
}

impl RealizableElement {
    pub fn from_recipe(
        recipe: Recipe,
        catalog: &[Generator],
        label: impl Into<String>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let matrix = recipe.evaluate(catalog)?;
        Ok(Self {
            element: AlgebraElement::new(matrix, label)?,
            recipe,
            provenance: provenance.into(),
        })
    }

    /// Frobenius distance between the recipe's evaluation and the element.
    pub fn soundness_residual(&self, catalog: &[Generator]) -> Result<f64> {
        Ok(fro_norm(
            &(self.recipe.evaluate(catalog)? - self.element.matrix()),
        ))
    }
}

/// Least-squares coordinates over a fixed list of elements.
#[derive(Debug, Clone)]
pub struct SpanProjector {
    /// Columns are the entry-layout coordinates of the basis.
    columns: RMatrix,
    pinv: RMatrix,
}

impl SpanProjector {
    pub fn new(basis: &[CMatrix]) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Validation("empty basis".into()));
        }
        let rows: Vec<VectorizedElement> = basis.iter().map(vectorize).collect::<Result<_>>()?;
        let columns = stack_rows(&rows)?.transpose();
        let pinv = columns
            .clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::Numeric(format!("pseudo-inverse: {e}")))?;
        Ok(Self { columns, pinv })
    }

    pub fn len(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.ncols() == 0
    }

    /// Coordinates of the skew-Hermitian part of `x` and the Euclidean
    /// residual of the fit in the entry layout.
    pub fn coords(&self, x: &CMatrix) -> Result<(DVector<f64>, f64)> {
        let v = vectorize(x)?.to_dvector();
        if v.len() != self.columns.nrows() {
            return Err(Error::Dimension(format!(
                "element has {} coordinates, basis has {}",
                v.len(),
                self.columns.nrows()
            )));
        }
        let c = &self.pinv * &v;
        let residual = (&self.columns * &c - v).norm();
        Ok((c, residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{identity, kron, quaternion_units};

    fn catalog() -> Vec<Generator> {
        let [one, qi, qj, _] = quaternion_units();
        vec![
            Generator {
                label: "a".into(),
                field: [1.0, 0.0, 0.0],
                matrix: kron(&qi, &one),
            },
            Generator {
                label: "b".into(),
                field: [0.0; 3],
                matrix: kron(&qj, &qj) * c64(0.0, 1.0),
            },
        ]
    }

    #[test]
    fn rejects_hermitian_and_traced() {
        assert!(AlgebraElement::new(identity(4), "h").is_err());
        assert!(AlgebraElement::new(identity(4) * c64(0.0, 1.0), "t").is_err());
    }

    #[test]
    fn recipe_evaluates_nested_conjugation() {
        let cat = catalog();
        let r = Recipe::core(1, 0.7)
            .conjugated(Step {
                generator: 0,
                duration: 0.3,
            })
            .conjugated(Step {
                generator: 1,
                duration: -0.2,
            });
        let m = r.evaluate(&cat).unwrap();
        // Independent evaluation, outermost first.
        let g1 = mat_exp(&(&cat[1].matrix * c64(-0.2, 0.0))).unwrap();
        let g0 = mat_exp(&(&cat[0].matrix * c64(0.3, 0.0))).unwrap();
        let core = &cat[1].matrix * c64(0.7, 0.0);
        let want = &g1 * &g0 * core * g0.adjoint() * g1.adjoint();
        assert!(fro_norm(&(m - want)) < 1e-13);
        let re = RealizableElement::from_recipe(r, &cat, "x", "test").unwrap();
        assert!(re.soundness_residual(&cat).unwrap() < 1e-13);
    }

    #[test]
    fn unknown_generator_is_rejected() {
        assert!(Recipe::core(5, 1.0).evaluate(&catalog()).is_err());
    }
}
