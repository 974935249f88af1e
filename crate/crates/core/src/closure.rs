//! Smallest Lie algebra containing a set of generators.
//!
//! Two engines share the same culling logic. The abstract engine appends
//! ad-orbits `{Y, ad(X)Y, ad(X)²Y, …}` for every ordered pair of the current
//! set. The realizable engine only ever conjugates by the available
//! one-parameter subgroups, appending `e^{s ad(G)}Y` at sampled `s`, so every
//! basis element carries a recipe of physical pulses.

use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Generator, RealizableElement, Recipe, Step};
use crate::error::{Error, Result};
use crate::matrix::{
    c64, commutator, fro_norm, is_traceless, mat_exp, singular_values, stack_rows, vectorize,
    VectorizedElement, DEFAULT_INDEPENDENCE_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Abstract,
    Realizable,
}

#[derive(Debug, Clone)]
pub struct ClosureOptions {
    pub engine: Engine,
    /// Relative residual below which a new element counts as dependent.
    pub tol: f64,
    pub seed: u64,
    /// Sample-point search restarts per pair.
    pub max_restarts: usize,
    /// Smallest acceptable `σmin / ‖Y‖` of a sample stack.
    pub sample_tol: f64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self {
            engine: Engine::Realizable,
            tol: DEFAULT_INDEPENDENCE_TOL,
            seed: 0,
            max_restarts: 8,
            sample_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub basis: Vec<AlgebraElement>,
    pub dim: usize,
    /// Outer passes, including the final pass that added nothing.
    pub iterations: usize,
    pub engine: Engine,
    pub catalog: Vec<Generator>,
    pub realizable: Option<Vec<RealizableElement>>,
}

/// Incrementally maintained orthonormal basis of accepted coordinates.
#[derive(Debug, Clone, Default)]
pub struct SpanTracker {
    q: Vec<DVector<f64>>,
    tol: f64,
    /// Unit direction kept out of the span (the trace direction for su(n)).
    excluded: Option<DVector<f64>>,
    /// Estimated rounding tilt of the stored directions. Accepting a direction
    /// with residual `r` scales its rounding error by `1/r`.
    noise: f64,
}

/// Rounding of one normalised 16-entry vector after two Gram-Schmidt passes,
/// with a safety factor.
const ROUNDING: f64 = 64.0 * f64::EPSILON;

impl SpanTracker {
    pub fn new(tol: f64) -> Self {
        Self {
            q: Vec::new(),
            tol,
            excluded: None,
            noise: 0.0,
        }
    }

    /// Tracker for traceless `n×n` elements. Accepted directions are kept
    /// exactly orthogonal to `i·1`, otherwise rounding in a barely
    /// independent element gets amplified by normalisation and tilts the
    /// span out of su(n).
    pub fn traceless(tol: f64, n: usize) -> Self {
        let mut e = DVector::zeros(n * n);
        for k in 0..n {
            e[k] = 1.0 / (n as f64).sqrt();
        }
        Self {
            q: Vec::new(),
            tol,
            excluded: Some(e),
            noise: 0.0,
        }
    }

    fn project_out(&self, r: &mut DVector<f64>) {
        if let Some(e) = &self.excluded {
            let c = e.dot(r);
            r.axpy(-c, e, 1.0);
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Normalised residual of `v` against the span, in `[0, 1]`.
    pub fn residual(&self, v: &VectorizedElement) -> Option<DVector<f64>> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        let mut r = v.to_dvector() / norm;
        for _ in 0..2 {
            self.project_out(&mut r);
            for b in &self.q {
                let c = b.dot(&r);
                r.axpy(-c, b, 1.0);
            }
        }
        Some(r)
    }

    /// Residual a new direction has to exceed: the caller's tolerance or the
    /// accumulated rounding tilt, whichever is larger.
    pub fn threshold(&self) -> f64 {
        self.tol.max(4.0 * self.noise)
    }

    pub fn is_dependent(&self, v: &VectorizedElement) -> bool {
        self.residual(v)
            .is_none_or(|r| r.norm() <= self.threshold())
    }

    /// Adds `v` when independent; returns whether it was added.
    pub fn try_add(&mut self, v: &VectorizedElement) -> bool {
        match self.residual(v) {
            Some(r) if r.norm() > self.threshold() => {
                self.noise = self.noise.max(ROUNDING / r.norm());
                let mut q = &r / r.norm();
                self.project_out(&mut q);
                let n = q.norm();
                self.q.push(q / n);
                true
            }
            _ => false,
        }
    }
}

/// Maximal independent prefix of `Y, ad(X)Y, ad(X)²Y, …`.
///
/// Elements after the first are rescaled to unit Frobenius norm; only their
/// span is meaningful.
pub fn ad_orbit(x: &AlgebraElement, y: &AlgebraElement, tol: f64) -> Result<Vec<AlgebraElement>> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!("{} vs {}", x.dim(), y.dim())));
    }
    let mut tracker = tracker_for(std::slice::from_ref(y), tol);
    let mut out = Vec::new();
    if !tracker.try_add(y.coords()) {
        return Ok(out);
    }
    out.push(y.clone());
    let limit = x.dim() * x.dim() - 1;
    let mut cur = y.matrix().clone();
    while out.len() < limit {
        let next = commutator(x.matrix(), &cur);
        let n = fro_norm(&next);
        if n == 0.0 {
            break;
        }
        let next = next * c64(1.0 / n, 0.0);
        if !tracker.try_add(&vectorize(&next)?) {
            break;
        }
        out.push(AlgebraElement::new(
            next.clone(),
            format!("ad^{} {}", out.len(), y.label()),
        )?);
        cur = next;
    }
    Ok(out)
}

fn conjugate_samples(
    x: &AlgebraElement,
    y: &AlgebraElement,
    points: &[f64],
) -> Result<Vec<VectorizedElement>> {
    points
        .iter()
        .map(|&s| {
            let g = mat_exp(&(x.matrix() * c64(s, 0.0)))?;
            vectorize(&(&g * y.matrix() * g.adjoint()))
        })
        .collect()
}

fn relative_sigma_min(x: &AlgebraElement, y: &AlgebraElement, points: &[f64]) -> Result<f64> {
    let rows = conjugate_samples(x, y, points)?;
    let sv = singular_values(&stack_rows(&rows)?);
    let min = if rows.len() > rows[0].len() {
        0.0
    } else {
        sv.last().copied().unwrap_or(0.0)
    };
    Ok(min / y.coords().norm().max(f64::MIN_POSITIVE))
}

/// `n` distinct points making `{e^{sᵢ ad X} Y}` independent.
///
/// Random start followed by coordinate ascent on the smallest singular value
/// of the stacked samples; deterministic for a given seed.
pub fn select_sample_points(
    x: &AlgebraElement,
    y: &AlgebraElement,
    n: usize,
    seed: u64,
    max_restarts: usize,
    sample_tol: f64,
) -> Result<Vec<f64>> {
    let (pts, best) = search_sample_points(x, y, n, seed, max_restarts, sample_tol)?;
    if n > 1 && best <= sample_tol {
        return Err(Error::SamplePoints {
            best_sigma_min: best,
            restarts: max_restarts,
        });
    }
    Ok(pts)
}

/// Best points found and their relative `σmin`; stops early once
/// `sample_tol` is exceeded.
fn search_sample_points(
    x: &AlgebraElement,
    y: &AlgebraElement,
    n: usize,
    seed: u64,
    max_restarts: usize,
    sample_tol: f64,
) -> Result<(Vec<f64>, f64)> {
    if n == 0 {
        return Ok((Vec::new(), f64::INFINITY));
    }
    if n == 1 {
        return Ok((vec![0.0], f64::INFINITY));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_overall = (Vec::new(), f64::NEG_INFINITY);
    for attempt in 0..=max_restarts {
        // Weakly excited orbit directions need longer conjugation times to
        // separate, so each restart widens the interval.
        let span = 1.0 + attempt as f64;
        let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(-span..=span)).collect();
        let mut best = relative_sigma_min(x, y, &pts)?;
        let mut step = 0.25 * span;
        while step > 1e-3 {
            let mut improved = false;
            for i in 0..n {
                for dir in [1.0, -1.0] {
                    let old = pts[i];
                    let cand = (old + dir * step).clamp(-span, span);
                    if cand == old {
                        continue;
                    }
                    pts[i] = cand;
                    let val = relative_sigma_min(x, y, &pts)?;
                    if val > best {
                        best = val;
                        improved = true;
                        break;
                    }
                    pts[i] = old;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best > sample_tol {
            return Ok((pts, best));
        }
        if best > best_overall.1 {
            best_overall = (pts, best);
        }
    }
    Ok(best_overall)
}

/// Excludes the trace direction when every element is traceless.
fn tracker_for(elements: &[AlgebraElement], tol: f64) -> SpanTracker {
    let n = elements.first().map_or(0, |e| e.dim());
    if n > 0 && elements.iter().all(|e| is_traceless(e.matrix(), 1e-12)) {
        SpanTracker::traceless(tol, n)
    } else {
        SpanTracker::new(tol)
    }
}

fn validate_generators(generators: &[Generator]) -> Result<Vec<AlgebraElement>> {
    let first = generators
        .first()
        .ok_or_else(|| Error::Validation("no generators".into()))?;
    let dim = first.matrix.nrows();
    generators
        .iter()
        .map(|g| {
            if g.matrix.shape() != (dim, dim) {
                return Err(Error::Dimension(format!(
                    "generator {} is {:?}, expected {dim}x{dim}",
                    g.label,
                    g.matrix.shape()
                )));
            }
            AlgebraElement::new(g.matrix.clone(), g.label.clone())
        })
        .collect()
}

pub fn closure(generators: &[Generator], opts: &ClosureOptions) -> Result<ClosureResult> {
    let gens = validate_generators(generators)?;
    match opts.engine {
        Engine::Abstract => abstract_closure(generators, gens, opts),
        Engine::Realizable => realizable_closure(generators, gens, opts),
    }
}

fn abstract_closure(
    catalog: &[Generator],
    gens: Vec<AlgebraElement>,
    opts: &ClosureOptions,
) -> Result<ClosureResult> {
    let mut tracker = tracker_for(&gens, opts.tol);
    let mut basis: Vec<AlgebraElement> = Vec::new();
    for g in gens {
        if tracker.try_add(g.coords()) {
            basis.push(g);
        }
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let snapshot = basis.len();
        let mut added = false;
        for j in 0..snapshot {
            for k in 0..snapshot {
                if j == k {
                    continue;
                }
                for e in ad_orbit(&basis[j], &basis[k], opts.tol)?
                    .into_iter()
                    .skip(1)
                {
                    if tracker.try_add(e.coords()) {
                        let label = format!("b{}", basis.len());
                        basis.push(e.relabel(label));
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(ClosureResult {
        dim: basis.len(),
        basis,
        iterations,
        engine: Engine::Abstract,
        catalog: catalog.to_vec(),
        realizable: None,
    })
}

fn realizable_closure(
    catalog: &[Generator],
    gens: Vec<AlgebraElement>,
    opts: &ClosureOptions,
) -> Result<ClosureResult> {
    let mut tracker = tracker_for(&gens, opts.tol);
    let mut set: Vec<RealizableElement> = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        if tracker.try_add(g.coords()) {
            set.push(RealizableElement {
                element: g.clone(),
                recipe: Recipe::core(j, 1.0),
                provenance: format!("generator {}", g.label()),
            });
        }
    }
    let mut iterations = 0;
    let mut pair_seed = opts.seed;
    loop {
        iterations += 1;
        let snapshot = set.len();
        let mut added = false;
        for (j, x) in gens.iter().enumerate() {
            for k in 0..snapshot {
                let y = set[k].element.clone();
                let orbit = ad_orbit(x, &y, opts.tol)?;
                if orbit.iter().all(|e| tracker.is_dependent(e.coords())) {
                    continue;
                }
                pair_seed = pair_seed.wrapping_add(1);
                // An ill-conditioned stack still yields exact algebra
                // elements; the tracker decides which of them are new.
                let (pts, _) = search_sample_points(
                    x,
                    &y,
                    orbit.len(),
                    pair_seed,
                    opts.max_restarts,
                    opts.sample_tol,
                )?;
                for s in pts {
                    let recipe = set[k].recipe.conjugated(Step {
                        generator: j,
                        duration: s,
                    });
                    let g = mat_exp(&(x.matrix() * c64(s, 0.0)))?;
                    let m = &g * y.matrix() * g.adjoint();
                    let v = vectorize(&m)?;
                    if tracker.try_add(&v) {
                        let label = format!("b{}", set.len());
                        set.push(RealizableElement {
                            element: AlgebraElement::new(m, label)?,
                            recipe,
                            provenance: format!("Ad(exp({s:.6}·{})) {}", x.label(), y.label()),
                        });
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(ClosureResult {
        dim: set.len(),
        basis: set.iter().map(|r| r.element.clone()).collect(),
        iterations,
        engine: Engine::Realizable,
        catalog: catalog.to_vec(),
        realizable: Some(set),
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BasisFile {
    pub dim: usize,
    pub iterations: usize,
    pub engine: Engine,
    pub generators: Vec<GeneratorRecord>,
    pub elements: Vec<ElementRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub label: String,
    pub field: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ElementRecord {
    pub label: String,
    pub coords: VectorizedElement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe: Option<Recipe>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl ClosureResult {
    pub fn to_basis_file(&self) -> BasisFile {
        let elements = match &self.realizable {
            Some(set) => set
                .iter()
                .map(|r| ElementRecord {
                    label: r.element.label().to_string(),
                    coords: r.element.coords().clone(),
                    recipe: Some(r.recipe.clone()),
                    provenance: Some(r.provenance.clone()),
                })
                .collect(),
            None => self
                .basis
                .iter()
                .map(|e| ElementRecord {
                    label: e.label().to_string(),
                    coords: e.coords().clone(),
                    recipe: None,
                    provenance: None,
                })
                .collect(),
        };
        BasisFile {
            dim: self.dim,
            iterations: self.iterations,
            engine: self.engine,
            generators: self
                .catalog
                .iter()
                .map(|g| GeneratorRecord {
                    label: g.label.clone(),
                    field: g.field,
                })
                .collect(),
            elements,
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_basis_file())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    /// Largest residual of `[bᵢ, bⱼ]` against the span, relative to
    /// `‖bᵢ‖‖bⱼ‖`.
    pub fn bracket_closure_residual(&self) -> Result<f64> {
        let mut tracker = SpanTracker::new(0.0);
        for b in &self.basis {
            tracker.try_add(b.coords());
        }
        let mut worst = 0.0f64;
        for a in &self.basis {
            for b in &self.basis {
                let c = commutator(a.matrix(), b.matrix());
                let v = vectorize(&c)?;
                let scale = a.norm() * b.norm();
                if let Some(r) = tracker.residual(&v) {
                    worst = worst.max(r.norm() * v.norm() / scale);
                }
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{kron, quaternion_units, CMatrix};

    fn gen(label: &str, m: CMatrix) -> Generator {
        Generator {
            label: label.into(),
            field: [0.0; 3],
            matrix: m,
        }
    }

    fn su2_pair() -> Vec<Generator> {
        let [one, qi, qj, _] = quaternion_units();
        vec![gen("i1", kron(&qi, &one)), gen("j1", kron(&qj, &one))]
    }

    #[test]
    fn commuting_pair_orbit_is_trivial() {
        let [one, qi, _, _] = quaternion_units();
        let a = AlgebraElement::new(kron(&qi, &one), "a").unwrap();
        let b = AlgebraElement::new(kron(&one, &qi), "b").unwrap();
        assert_eq!(ad_orbit(&a, &b, 1e-9).unwrap().len(), 1);
    }

    #[test]
    fn su2_closes_to_three_in_both_engines() {
        for engine in [Engine::Abstract, Engine::Realizable] {
            let opts = ClosureOptions {
                engine,
                ..Default::default()
            };
            let r = closure(&su2_pair(), &opts).unwrap();
            assert_eq!(r.dim, 3, "{engine:?}");
            assert!(r.bracket_closure_residual().unwrap() < 1e-9);
        }
    }

    #[test]
    fn recipes_are_sound() {
        let gens = su2_pair();
        let r = closure(&gens, &ClosureOptions::default()).unwrap();
        for e in r.realizable.as_ref().unwrap() {
            assert!(e.soundness_residual(&gens).unwrap() < 1e-10);
        }
    }

    #[test]
    fn single_point_is_zero() {
        let [one, qi, _, _] = quaternion_units();
        let a = AlgebraElement::new(kron(&qi, &one), "a").unwrap();
        assert_eq!(
            select_sample_points(&a, &a, 1, 0, 0, 1e-7).unwrap(),
            vec![0.0]
        );
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(closure(&[], &ClosureOptions::default()).is_err());
        let bad = vec![gen("h", CMatrix::identity(4, 4))];
        assert!(closure(&bad, &ClosureOptions::default()).is_err());
        let [one, qi, _, _] = quaternion_units();
        let mixed = vec![gen("a", kron(&qi, &one)), gen("b", qi.clone())];
        assert!(matches!(
            closure(&mixed, &ClosureOptions::default()),
            Err(Error::Dimension(_))
        ));
    }
}
