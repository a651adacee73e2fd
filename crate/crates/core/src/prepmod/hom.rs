use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;

use super::module::{ModuleMap, PModule};

/// Samples drawn by randomized searches in the morphism space.
pub const RETRY_BUDGET: usize = 8;

/// Offsets of the per-vertex unknown blocks `f_v : M_v -> N_v`.
fn unknown_layout<F: Field>(m: &PModule<F>, n: &PModule<F>) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(m.dims().len());
    let mut total = 0;
    for v in 0..m.dims().len() {
        offsets.push(total);
        total += n.dim(v) * m.dim(v);
    }
    (offsets, total)
}

/// A basis of `Hom(M, N)`.
pub fn hom_space<F: Field>(m: &PModule<F>, n: &PModule<F>) -> Result<Vec<ModuleMap<F>>> {
    m.same_graph(n)?;
    let f = m.field();
    let (offsets, unknowns) = unknown_layout(m, n);
    if unknowns == 0 {
        return Ok(Vec::new());
    }
    let g = m.graph();
    let rows: usize = g.arrows().map(|a| n.dim(a.target) * m.dim(a.source)).sum();
    let mut sys = Matrix::zeros(f, rows, unknowns);
    let mut row = 0;
    // N_a f_s - f_t M_a = 0
    for a in g.arrows() {
        let (s, t) = (a.source, a.target);
        let (na, ma) = (n.map(a.id), m.map(a.id));
        for r in 0..n.dim(t) {
            for c in 0..m.dim(s) {
                for k in 0..n.dim(s) {
                    let coeff = na.get(r, k);
                    if !f.is_zero(coeff) {
                        let col = offsets[s] + k * m.dim(s) + c;
                        let cur = sys.get(row, col).clone();
                        sys.set(row, col, f.add(&cur, coeff));
                    }
                }
                for k in 0..m.dim(t) {
                    let coeff = ma.get(k, c);
                    if !f.is_zero(coeff) {
                        let col = offsets[t] + r * m.dim(t) + k;
                        let cur = sys.get(row, col).clone();
                        sys.set(row, col, f.sub(&cur, coeff));
                    }
                }
                row += 1;
            }
        }
    }
    let kernel = sys.kernel();
    let basis = (0..kernel.cols())
        .map(|col| {
            let comps = (0..m.dims().len())
                .map(|v| {
                    Matrix::from_fn(f, n.dim(v), m.dim(v), |r, c| {
                        kernel.get(offsets[v] + r * m.dim(v) + c, col).clone()
                    })
                })
                .collect();
            ModuleMap { source: m.clone(), target: n.clone(), comps }
        })
        .collect();
    Ok(basis)
}

/// A random linear combination of a basis of morphisms.
pub fn random_combination<F: Field, R: Rng + ?Sized>(
    m: &PModule<F>,
    n: &PModule<F>,
    basis: &[ModuleMap<F>],
    rng: &mut R,
) -> ModuleMap<F> {
    let f = m.field();
    let mut comps: Vec<Matrix<F>> = (0..m.dims().len()).map(|v| Matrix::zeros(f, n.dim(v), m.dim(v))).collect();
    for b in basis {
        let c = f.random(rng);
        for (acc, part) in comps.iter_mut().zip(&b.comps) {
            acc.add_scaled(part, &c);
        }
    }
    ModuleMap { source: m.clone(), target: n.clone(), comps }
}

/// Result of a randomized isomorphism test.
#[derive(Debug, Clone)]
pub enum IsoOutcome<F: Field> {
    /// An explicit isomorphism.
    Iso(ModuleMap<F>),
    /// Proven non-isomorphic (dimension vectors differ or no morphism can be
    /// invertible).
    Distinct,
    /// No invertible sample was found. The false-negative probability is at
    /// most `2^log2_bound`.
    ProbablyDistinct { log2_bound: f64, samples: usize },
}

impl<F: Field> IsoOutcome<F> {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoOutcome::Iso(_))
    }

    pub fn witness(&self) -> Option<&ModuleMap<F>> {
        match self {
            IsoOutcome::Iso(w) => Some(w),
            _ => None,
        }
    }
}

/// `log2` of the Schwartz–Zippel bound `(d / q)^t` for `t` failed samples.
pub fn iso_false_negative_log2<F: Field>(field: &F, total_dim: usize, samples: usize) -> f64 {
    if total_dim == 0 {
        return f64::NEG_INFINITY;
    }
    samples as f64 * ((total_dim as f64).log2() - field.sample_bits())
}

/// Isomorphism test with the default retry budget.
pub fn is_iso<F: Field, R: Rng + ?Sized>(m: &PModule<F>, n: &PModule<F>, rng: &mut R) -> Result<IsoOutcome<F>> {
    is_iso_with(m, n, RETRY_BUDGET, rng)
}

pub fn is_iso_with<F: Field, R: Rng + ?Sized>(
    m: &PModule<F>,
    n: &PModule<F>,
    samples: usize,
    rng: &mut R,
) -> Result<IsoOutcome<F>> {
    m.same_graph(n)?;
    if m.dims() != n.dims() {
        return Ok(IsoOutcome::Distinct);
    }
    if m.is_zero() {
        return Ok(IsoOutcome::Iso(ModuleMap::identity(m)));
    }
    if m == n {
        return Ok(IsoOutcome::Iso(ModuleMap::identity(m)));
    }
    let basis = hom_space(m, n)?;
    if basis.is_empty() {
        return Ok(IsoOutcome::Distinct);
    }
    for _ in 0..samples {
        let cand = random_combination(m, n, &basis, rng);
        if cand.is_iso() {
            return Ok(IsoOutcome::Iso(cand));
        }
    }
    Ok(IsoOutcome::ProbablyDistinct {
        log2_bound: iso_false_negative_log2(m.field(), m.total_dim(), samples),
        samples,
    })
}

/// Smallest retry count for which `(d / q)^t ≤ 2^target_log2`.
pub fn samples_for_bound<F: Field>(field: &F, total_dim: usize, target_log2: f64) -> usize {
    let per = (total_dim.max(1) as f64).log2() - field.sample_bits();
    if per >= 0.0 {
        return usize::MAX;
    }
    (target_log2 / per).ceil().max(1.0) as usize
}

/// Searches `Hom(M, N)` for an injective morphism.
pub fn random_injection<F: Field, R: Rng + ?Sized>(
    m: &PModule<F>,
    n: &PModule<F>,
    rng: &mut R,
) -> Result<ModuleMap<F>> {
    if m.is_zero() {
        let comps = (0..m.dims().len()).map(|v| Matrix::zeros(m.field(), n.dim(v), 0)).collect();
        return ModuleMap::new(m.clone(), n.clone(), comps);
    }
    let basis = hom_space(m, n)?;
    for _ in 0..RETRY_BUDGET {
        let cand = random_combination(m, n, &basis, rng);
        if cand.is_injective() {
            return Ok(cand);
        }
    }
    Err(Error::NoEmbeddingFound { attempts: RETRY_BUDGET })
}

/// A short exact sequence `0 -> A -> E -> Q -> 0`.
#[derive(Debug, Clone)]
pub struct Extension<F: Field> {
    pub middle: PModule<F>,
    pub inclusion: ModuleMap<F>,
    pub projection: ModuleMap<F>,
}

/// A uniformly random element of the space of extensions of `quot` by `sub`
/// written in block upper-triangular form `[[A_a, C_a], [0, Q_a]]`.
pub fn random_extension<F: Field, R: Rng + ?Sized>(
    sub: &PModule<F>,
    quot: &PModule<F>,
    rng: &mut R,
) -> Result<Extension<F>> {
    sub.same_graph(quot)?;
    let f = sub.field();
    let g = sub.graph();
    let (da, dq) = (sub.dims(), quot.dims());

    // unknown block C_a : Q_source -> A_target
    let mut offsets = Vec::with_capacity(g.arrow_count());
    let mut unknowns = 0;
    for a in g.arrows() {
        offsets.push(unknowns);
        unknowns += da[a.target] * dq[a.source];
    }
    let rows: usize = (0..g.vertex_count()).map(|i| da[i] * dq[i]).sum();

    let blocks: Vec<Matrix<F>> = if unknowns == 0 {
        g.arrows().map(|a| Matrix::zeros(f, da[a.target], dq[a.source])).collect()
    } else {
        // Σ_{h -> i} sign(h) (A_h C_{h̄} + C_h Q_{h̄}) = 0
        let mut sys = Matrix::zeros(f, rows, unknowns);
        let mut row0 = 0;
        for i in 0..g.vertex_count() {
            for h in g.arrows_into(i) {
                let j = h.source;
                let sign = f.from_i64(h.sign);
                let ah = sub.map(h.id); // A_j -> A_i
                let qhb = quot.map(h.reverse_id()); // Q_i -> Q_j
                let hb = h.reverse_id();
                for r in 0..da[i] {
                    for c in 0..dq[i] {
                        let row = row0 + r * dq[i] + c;
                        // A_h C_{h̄}: C_{h̄} is da[j] x dq[i]
                        for k in 0..da[j] {
                            let coeff = f.mul(&sign, ah.get(r, k));
                            if !f.is_zero(&coeff) {
                                let col = offsets[hb] + k * dq[i] + c;
                                let cur = sys.get(row, col).clone();
                                sys.set(row, col, f.add(&cur, &coeff));
                            }
                        }
                        // C_h Q_{h̄}: C_h is da[i] x dq[j]
                        for k in 0..dq[j] {
                            let coeff = f.mul(&sign, qhb.get(k, c));
                            if !f.is_zero(&coeff) {
                                let col = offsets[h.id] + r * dq[j] + k;
                                let cur = sys.get(row, col).clone();
                                sys.set(row, col, f.add(&cur, &coeff));
                            }
                        }
                    }
                }
            }
            row0 += da[i] * dq[i];
        }
        let kernel = sys.kernel();
        let mut sol = Matrix::zeros(f, unknowns, 1);
        for col in 0..kernel.cols() {
            let c = f.random(rng);
            sol.add_scaled(&kernel.block(0, col, unknowns, 1), &c);
        }
        g.arrows()
            .map(|a| {
                let (r, c) = (da[a.target], dq[a.source]);
                Matrix::from_fn(f, r, c, |x, y| sol.get(offsets[a.id] + x * c + y, 0).clone())
            })
            .collect()
    };

    let dims: Vec<usize> = da.iter().zip(dq).map(|(a, q)| a + q).collect();
    let maps = g
        .arrows()
        .map(|a| {
            let (s, t) = (a.source, a.target);
            let mut e = Matrix::zeros(f, dims[t], dims[s]);
            e.set_block(0, 0, sub.map(a.id));
            e.set_block(0, da[s], &blocks[a.id]);
            e.set_block(da[t], da[s], quot.map(a.id));
            e
        })
        .collect();
    let middle = PModule::assemble(sub.graph_arc().clone(), f.clone(), dims.clone(), maps, "random_extension")?;
    let inc = (0..g.vertex_count())
        .map(|v| {
            let mut m = Matrix::zeros(f, dims[v], da[v]);
            m.set_block(0, 0, &Matrix::identity(f, da[v]));
            m
        })
        .collect();
    let proj = (0..g.vertex_count())
        .map(|v| {
            let mut m = Matrix::zeros(f, dq[v], dims[v]);
            m.set_block(0, da[v], &Matrix::identity(f, dq[v]));
            m
        })
        .collect();
    Ok(Extension {
        inclusion: ModuleMap { source: sub.clone(), target: middle.clone(), comps: inc },
        projection: ModuleMap { source: middle.clone(), target: quot.clone(), comps: proj },
        middle,
    })
}

/// Summary of an isomorphism outcome for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum IsoSummary {
    Iso,
    Distinct,
    ProbablyDistinct { log2_bound: f64, samples: usize },
}

impl<F: Field> From<&IsoOutcome<F>> for IsoSummary {
    fn from(o: &IsoOutcome<F>) -> Self {
        match o {
            IsoOutcome::Iso(_) => IsoSummary::Iso,
            IsoOutcome::Distinct => IsoSummary::Distinct,
            IsoOutcome::ProbablyDistinct { log2_bound, samples } => {
                IsoSummary::ProbablyDistinct { log2_bound: *log2_bound, samples: *samples }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::prepmod::reflection::{sigma, sigma_star};
    use crate::rootsys::CartanGraph;

    fn setup() -> (Arc<CartanGraph>, Rationals, ChaCha8Rng) {
        (Arc::new(CartanGraph::type_a(2)), Rationals, ChaCha8Rng::seed_from_u64(3))
    }

    #[test]
    fn hom_dimensions() {
        let (g, q, _) = setup();
        let s1 = PModule::simple(Arc::clone(&g), q, 0).unwrap();
        let s2 = PModule::simple(Arc::clone(&g), q, 1).unwrap();
        assert!(hom_space(&s1, &s2).unwrap().is_empty());
        assert_eq!(hom_space(&s1, &s1).unwrap().len(), 1);
        // Σ_1 S_2 has top S_1 and socle S_2
        let m = sigma(0, &s2).unwrap();
        assert_eq!(hom_space(&m, &s1).unwrap().len(), 1);
        assert_eq!(hom_space(&m, &s2).unwrap().len(), 0);
        assert_eq!(hom_space(&s2, &m).unwrap().len(), 1);
        for b in hom_space(&m, &m).unwrap() {
            assert!(b.commutes());
        }
    }

    #[test]
    fn iso_examples() {
        let (g, q, mut rng) = setup();
        let s1 = PModule::simple(Arc::clone(&g), q, 0).unwrap();
        let s2 = PModule::simple(Arc::clone(&g), q, 1).unwrap();
        assert!(is_iso(&s1, &s1, &mut rng).unwrap().is_iso());
        assert!(matches!(is_iso(&s1, &s2, &mut rng).unwrap(), IsoOutcome::Distinct));
        let a = sigma(0, &s2).unwrap();
        let b = sigma_star(0, &s2).unwrap();
        assert_eq!(a.dims(), b.dims());
        assert!(!is_iso(&a, &b, &mut rng).unwrap().is_iso());
        // Σ_1* S_2 and Σ_2 S_1 are the same module up to a change of basis
        let c = sigma(1, &s1).unwrap();
        let out = is_iso(&b, &c, &mut rng).unwrap();
        assert!(out.witness().unwrap().is_iso());
    }

    #[test]
    fn extensions_of_simples() {
        let (g, q, mut rng) = setup();
        let s1 = PModule::simple(Arc::clone(&g), q, 0).unwrap();
        let s2 = PModule::simple(Arc::clone(&g), q, 1).unwrap();
        let split = random_extension(&s1, &s1, &mut rng).unwrap();
        assert_eq!(split.middle, s1.power(2));
        // S_1 as a submodule with S_2 on top is Σ_1* S_2
        let e = random_extension(&s1, &s2, &mut rng).unwrap();
        assert_eq!(e.middle.socle_dims(), vec![1, 0]);
        assert!(is_iso(&e.middle, &sigma_star(0, &s2).unwrap(), &mut rng).unwrap().is_iso());
        assert!(e.inclusion.commutes() && e.projection.commutes());
        let z = PModule::zero(Arc::clone(&g), q);
        let same = random_extension(&e.middle, &z, &mut rng).unwrap();
        assert_eq!(same.middle, e.middle);
    }

    #[test]
    fn schwartz_zippel_budget() {
        let p = PrimeField::mersenne61();
        assert_eq!(samples_for_bound(&p, 12, -40.0), 1);
        assert!(samples_for_bound(&Rationals, 12, -40.0) <= RETRY_BUDGET);
        assert!(iso_false_negative_log2(&p, 12, 1) < -40.0);
    }

    #[test]
    fn injection_search() {
        let (g, q, mut rng) = setup();
        let s2 = PModule::simple(Arc::clone(&g), q, 1).unwrap();
        let m = sigma(0, &s2).unwrap();
        let inj = random_injection(&s2, &m, &mut rng).unwrap();
        assert!(inj.is_injective());
        assert_eq!(inj.cokernel().unwrap().dims(), &[1, 0]);
        let s1 = PModule::simple(Arc::clone(&g), q, 0).unwrap();
        assert_eq!(random_injection(&s1, &s2, &mut rng).unwrap_err(), Error::NoEmbeddingFound { attempts: 8 });
    }
}
