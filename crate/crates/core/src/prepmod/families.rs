//! The module families attached to a reduced word: `N̂(wλ)`, `N(wλ)`, the
//! modules `V_k` and the layers `M_k`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::rootsys::{beta_sequence, CartanGraph, Weight, WeylWord};

use super::hom::random_injection;
use super::module::PModule;
use super::reflection::sigma_word;

/// The graph with one extra vertex `i'` (index `n + i`) per vertex `i` and an
/// edge `i -> i'`. Original edges keep their ids, so arrows of the base graph
/// keep theirs too.
pub fn hat_graph(g: &CartanGraph) -> CartanGraph {
    let n = g.vertex_count();
    let mut edges = g.edges().to_vec();
    edges.extend((0..n).map(|i| (i, n + i)));
    CartanGraph::with_orientation(2 * n, edges).expect("hat graph of a valid graph is valid")
}

/// `N̂(λ)`: multiplicity `λ_i` at `i'`, zero elsewhere, all maps zero.
pub fn semisimple_primed<F: Field>(g: &CartanGraph, field: &F, lambda: &Weight) -> Result<PModule<F>> {
    let n = g.vertex_count();
    if lambda.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: lambda.len() });
    }
    let mut dims = vec![0usize; 2 * n];
    for (i, &c) in lambda.coeffs().iter().enumerate() {
        if c < 0 {
            return Err(Error::NegativeWeight { vertex: i });
        }
        dims[n + i] = c as usize;
    }
    PModule::semisimple(Arc::new(hat_graph(g)), field.clone(), dims)
}

fn require_reduced(g: &CartanGraph, w: &WeylWord) -> Result<()> {
    beta_sequence(g, w).map(|_| ())
}

/// `N̂(wλ)`: reflect `N̂(λ)` along `w`, first letter first.
pub fn n_hat<F: Field>(g: &CartanGraph, field: &F, w: &WeylWord, lambda: &Weight) -> Result<PModule<F>> {
    require_reduced(g, w)?;
    let base = semisimple_primed(g, field, lambda)?;
    sigma_word(w.letters(), &base)
}

/// `N(wλ) = N̂(wλ) / N̂(λ)`, as a module over the base graph.
pub fn n_module<F: Field>(g: &CartanGraph, field: &F, w: &WeylWord, lambda: &Weight) -> Result<PModule<F>> {
    let hat = n_hat(g, field, w, lambda)?;
    restrict_to_base(Arc::new(g.clone()), &hat)
}

/// Drops the primed vertices. The primed part of `N̂(wλ)` is killed by every
/// arrow leaving it, so it is a submodule and this is the quotient.
fn restrict_to_base<F: Field>(g: Arc<CartanGraph>, hat: &PModule<F>) -> Result<PModule<F>> {
    let n = g.vertex_count();
    for a in hat.graph().arrows() {
        if a.source >= n && !hat.map(a.id).is_zero() {
            return Err(Error::InternalRelationFailure { op: "n_module", vertex: a.source });
        }
    }
    let dims = hat.dims()[..n].to_vec();
    let maps = (0..g.arrow_count()).map(|id| hat.map(id).clone()).collect();
    PModule::assemble(g, hat.field().clone(), dims, maps, "n_module")
}

fn check_index(w: &WeylWord, k: usize) -> Result<()> {
    if k > w.len() {
        return Err(Error::IndexOutOfRange { index: k, len: w.len() });
    }
    Ok(())
}

/// Largest `s < k` with `i_s = i_k`, or 0.
pub fn kminus(w: &WeylWord, k: usize) -> usize {
    if k == 0 {
        return 0;
    }
    let l = w.letters();
    (1..k).rev().find(|&s| l[s - 1] == l[k - 1]).unwrap_or(0)
}

/// `V_k ≅ N(s_{i_1} ... s_{i_k} ϖ_{i_k})`; `V_0 = 0`.
pub fn v_module<F: Field>(g: &Arc<CartanGraph>, field: &F, w: &WeylWord, k: usize) -> Result<PModule<F>> {
    require_reduced(g, w)?;
    check_index(w, k)?;
    if k == 0 {
        return Ok(PModule::zero(Arc::clone(g), field.clone()));
    }
    let ik = w.letters()[k - 1];
    let inner = WeylWord::new(w.letters()[..k].iter().rev().copied().collect());
    let lambda = Weight::basis(g.vertex_count(), ik);
    let hat = n_hat(g, field, &inner, &lambda)?;
    restrict_to_base(Arc::clone(g), &hat)
}

/// How to construct `M_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Cokernel of an injective morphism `V_{k^-} -> V_k`.
    Cokernel,
    /// `Σ_{i_1} ... Σ_{i_{k-1}} S_{i_k}`.
    Reflection,
}

/// The layer module `M_k` for `1 <= k <= r`.
pub fn m_module<F: Field, R: Rng + ?Sized>(
    g: &Arc<CartanGraph>,
    field: &F,
    w: &WeylWord,
    k: usize,
    route: Route,
    rng: &mut R,
) -> Result<PModule<F>> {
    require_reduced(g, w)?;
    if k == 0 || k > w.len() {
        return Err(Error::IndexOutOfRange { index: k, len: w.len() });
    }
    match route {
        Route::Reflection => m_reflection(g, field, w, k),
        Route::Cokernel => {
            let vk = v_module(g, field, w, k)?;
            let km = kminus(w, k);
            if km == 0 {
                return Ok(vk);
            }
            let vkm = v_module(g, field, w, km)?;
            random_injection(&vkm, &vk, rng)?.cokernel()
        }
    }
}

/// `M_k` by the reflection route, which needs no randomness.
pub fn m_reflection<F: Field>(g: &Arc<CartanGraph>, field: &F, w: &WeylWord, k: usize) -> Result<PModule<F>> {
    require_reduced(g, w)?;
    if k == 0 || k > w.len() {
        return Err(Error::IndexOutOfRange { index: k, len: w.len() });
    }
    let simple = PModule::simple(Arc::clone(g), field.clone(), w.letters()[k - 1])?;
    let letters: Vec<usize> = w.letters()[..k - 1].iter().rev().copied().collect();
    sigma_word(&letters, &simple)
}

/// `Σ_{i_{l+1}} ... Σ_{i_{k-1}} S_{i_k}` for `l = k-1, k-2, ..., 0`; the last
/// entry is `M_k`.
pub fn m_partial_products<F: Field>(g: &Arc<CartanGraph>, field: &F, w: &WeylWord, k: usize) -> Result<Vec<PModule<F>>> {
    require_reduced(g, w)?;
    if k == 0 || k > w.len() {
        return Err(Error::IndexOutOfRange { index: k, len: w.len() });
    }
    let l = w.letters();
    let mut cur = PModule::simple(Arc::clone(g), field.clone(), l[k - 1])?;
    let mut out = vec![cur.clone()];
    for &i in l[..k - 1].iter().rev() {
        cur = super::reflection::sigma(i, &cur)?;
        out.push(cur.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::prepmod::hom::is_iso;
    use crate::rootsys::{weight_drop, RootVec};

    fn a2() -> Arc<CartanGraph> {
        Arc::new(CartanGraph::type_a(2))
    }

    fn word(l: &[usize]) -> WeylWord {
        WeylWord::from_one_based(l).unwrap()
    }

    #[test]
    fn hat_graph_shapes() {
        let h = hat_graph(&CartanGraph::type_a(2));
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edges(), &[(0, 1), (0, 2), (1, 3)]);
        assert_eq!(hat_graph(&CartanGraph::type_a(1)).edges().len(), 1);
        let k = hat_graph(&CartanGraph::affine_a1());
        assert_eq!((k.vertex_count(), k.edges().len()), (4, 4));
    }

    #[test]
    fn primed_semisimples() {
        let g = CartanGraph::type_a(2);
        let m = semisimple_primed(&g, &Rationals, &Weight(vec![1, 0])).unwrap();
        assert_eq!(m.dims(), &[0, 0, 1, 0]);
        let z = semisimple_primed(&g, &Rationals, &Weight(vec![0, 0])).unwrap();
        assert!(z.is_zero());
        let both = semisimple_primed(&g, &Rationals, &Weight(vec![1, 1])).unwrap();
        assert_eq!(both.dims(), &[0, 0, 1, 1]);
        assert_eq!(
            semisimple_primed(&g, &Rationals, &Weight(vec![-1, 0])).unwrap_err(),
            Error::NegativeWeight { vertex: 0 }
        );
    }

    #[test]
    fn n_hat_and_n_examples() {
        let g = CartanGraph::type_a(2);
        let q = Rationals;
        let w1 = Weight(vec![1, 0]);
        assert_eq!(n_hat(&g, &q, &WeylWord::empty(), &w1).unwrap().dims(), &[0, 0, 1, 0]);
        assert_eq!(n_hat(&g, &q, &word(&[1]), &w1).unwrap().dims(), &[1, 0, 1, 0]);
        assert_eq!(n_module(&g, &q, &word(&[1]), &w1).unwrap().dims(), &[1, 0]);
        // s_1 s_2 ϖ_2: apply s_2 first
        let w2 = Weight(vec![0, 1]);
        assert_eq!(n_module(&g, &q, &word(&[2, 1]), &w2).unwrap().dims(), &[1, 1]);
        let n = n_module(&g, &q, &word(&[1, 2, 1]), &w1).unwrap();
        assert_eq!(n.socle_dims(), vec![1, 0]);
        assert_eq!(n.dimv(), weight_drop(&g, &word(&[1, 2, 1]), &w1).unwrap());
        assert!(n_hat(&g, &q, &word(&[1, 1]), &w1).is_err());
    }

    #[test]
    fn n_hat_is_word_independent() {
        let g = CartanGraph::type_a(2);
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w1 = Weight(vec![1, 0]);
        let a = n_hat(&g, &f, &word(&[1, 2, 1]), &w1).unwrap();
        let b = n_hat(&g, &f, &word(&[2, 1, 2]), &w1).unwrap();
        assert!(is_iso(&a, &b, &mut rng).unwrap().is_iso());
    }

    #[test]
    fn v_modules_of_a2() {
        let g = a2();
        let w = word(&[1, 2, 1]);
        let dims: Vec<Vec<usize>> =
            (1..=3).map(|k| v_module(&g, &Rationals, &w, k).unwrap().dims().to_vec()).collect();
        assert_eq!(dims, vec![vec![1, 0], vec![1, 1], vec![1, 1]]);
        assert!(v_module(&g, &Rationals, &w, 0).unwrap().is_zero());
        assert!(v_module(&g, &Rationals, &w, 4).is_err());
        // V_3 has socle S_1
        assert_eq!(v_module(&g, &Rationals, &w, 3).unwrap().socle_dims(), vec![1, 0]);
    }

    #[test]
    fn m_modules_of_a2() {
        let g = a2();
        let q = Rationals;
        let w = word(&[1, 2, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let betas = beta_sequence(&g, &w).unwrap();
        for k in 1..=3 {
            let a = m_module(&g, &q, &w, k, Route::Reflection, &mut rng).unwrap();
            let b = m_module(&g, &q, &w, k, Route::Cokernel, &mut rng).unwrap();
            assert_eq!(a.dimv(), betas[k - 1]);
            assert!(is_iso(&a, &b, &mut rng).unwrap().is_iso(), "k = {k}");
        }
        let m3 = m_module(&g, &q, &w, 3, Route::Cokernel, &mut rng).unwrap();
        assert_eq!(m3.dimv(), RootVec(vec![0, 1]));
        assert_eq!((kminus(&w, 1), kminus(&w, 2), kminus(&w, 3)), (0, 0, 1));
    }
}
