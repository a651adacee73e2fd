//! Sampling filtered modules with prescribed layers and reading a datum back
//! off a module by alternating socle reads and `Σ*` steps.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::rootsys::{beta_sequence, CartanGraph, WeylWord};

use super::families::m_reflection;
use super::hom::random_extension;
use super::module::PModule;
use super::reflection::sigma_star;

/// Samples modules with a filtration whose `k`-th layer is `M_k^{a_k}`.
/// The layers are computed once per word.
#[derive(Debug, Clone)]
pub struct StratumSampler<F: Field> {
    graph: Arc<CartanGraph>,
    field: F,
    word: WeylWord,
    layers: Vec<PModule<F>>,
}

impl<F: Field> StratumSampler<F> {
    pub fn new(graph: Arc<CartanGraph>, field: F, word: WeylWord) -> Result<Self> {
        beta_sequence(&graph, &word)?;
        let layers = (1..=word.len())
            .map(|k| m_reflection(&graph, &field, &word, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(StratumSampler { graph, field, word, layers })
    }

    pub fn word(&self) -> &WeylWord {
        &self.word
    }

    pub fn layers(&self) -> &[PModule<F>] {
        &self.layers
    }

    /// Folds random extensions: `X_k` is a random extension of
    /// `M_k^{a_k}` by `X_{k-1}`.
    pub fn sample<R: Rng + ?Sized>(&self, a: &[u64], rng: &mut R) -> Result<PModule<F>> {
        if a.len() != self.word.len() {
            return Err(Error::LengthMismatch { expected: self.word.len(), found: a.len() });
        }
        let mut x = PModule::zero(Arc::clone(&self.graph), self.field.clone());
        for (layer, &ak) in self.layers.iter().zip(a) {
            if ak == 0 {
                continue;
            }
            x = random_extension(&x, &layer.power(ak as usize), rng)?.middle;
        }
        Ok(x)
    }
}

/// One sample of the stratum for `(w, a)`.
pub fn build_filtered<F: Field, R: Rng + ?Sized>(
    g: &Arc<CartanGraph>,
    field: &F,
    w: &WeylWord,
    a: &[u64],
    rng: &mut R,
) -> Result<PModule<F>> {
    if a.len() != w.len() {
        return Err(Error::LengthMismatch { expected: w.len(), found: a.len() });
    }
    StratumSampler::new(Arc::clone(g), field.clone(), w.clone())?.sample(a, rng)
}

/// One step of [`extract_datum_traced`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractStep {
    /// 1-based vertex.
    pub vertex: usize,
    pub socle_dim: u64,
    /// Dimension vector after applying `Σ*` at `vertex`.
    pub dims_after: Vec<usize>,
}

/// Reads `a_k = dim soc_{i_k} X`, then replaces `X` by `Σ*_{i_k} X`; the
/// residual after all `r` steps must vanish.
pub fn extract_datum<F: Field>(g: &CartanGraph, w: &WeylWord, x: &PModule<F>) -> Result<Vec<u64>> {
    let steps = extract_datum_traced(g, w, x)?;
    Ok(steps.iter().map(|s| s.socle_dim).collect())
}

pub fn extract_datum_traced<F: Field>(g: &CartanGraph, w: &WeylWord, x: &PModule<F>) -> Result<Vec<ExtractStep>> {
    beta_sequence(g, w)?;
    if x.graph() != g {
        return Err(Error::GraphMismatch);
    }
    let mut cur = x.clone();
    let mut steps = Vec::with_capacity(w.len());
    for &i in w.letters() {
        let socle_dim = cur.soc_dim(i)? as u64;
        cur = sigma_star(i, &cur)?;
        steps.push(ExtractStep { vertex: i + 1, socle_dim, dims_after: cur.dims().to_vec() });
    }
    if !cur.is_zero() {
        return Err(Error::NotInGenericStratum { residual: cur.dims().to_vec() });
    }
    Ok(steps)
}

/// `dim top_i X`.
pub fn eps_mod<F: Field>(i: usize, x: &PModule<F>) -> Result<usize> {
    x.top_dim(i)
}

/// `dim soc_i X`.
pub fn eps_star_mod<F: Field>(i: usize, x: &PModule<F>) -> Result<usize> {
    x.soc_dim(i)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::prepmod::hom::is_iso;
    use crate::prepmod::reflection::sigma;
    use crate::rootsys::{mu, RootVec};

    fn a2() -> Arc<CartanGraph> {
        Arc::new(CartanGraph::type_a(2))
    }

    fn w121() -> WeylWord {
        WeylWord::from_one_based(&[1, 2, 1]).unwrap()
    }

    #[test]
    fn build_filtered_examples() {
        let g = a2();
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = w121();
        assert!(build_filtered(&g, &f, &w, &[0, 0, 0], &mut rng).unwrap().is_zero());
        let x = build_filtered(&g, &f, &w, &[1, 1, 0], &mut rng).unwrap();
        assert_eq!(x.dimv(), RootVec(vec![2, 1]));
        assert_eq!(x.soc_dim(0).unwrap(), 1);
        let y = build_filtered(&g, &f, &w, &[0, 0, 1], &mut rng).unwrap();
        let s2 = PModule::simple(Arc::clone(&g), f, 1).unwrap();
        assert!(is_iso(&y, &s2, &mut rng).unwrap().is_iso());
        assert!(build_filtered(&g, &f, &w, &[1, 0], &mut rng).is_err());
    }

    #[test]
    fn s2_trace() {
        let g = a2();
        let s2 = PModule::simple(Arc::clone(&g), Rationals, 1).unwrap();
        let steps = extract_datum_traced(&g, &w121(), &s2).unwrap();
        let a: Vec<u64> = steps.iter().map(|s| s.socle_dim).collect();
        assert_eq!(a, vec![0, 0, 1]);
        let dims: Vec<Vec<usize>> = steps.iter().map(|s| s.dims_after.clone()).collect();
        assert_eq!(dims, vec![vec![1, 1], vec![1, 0], vec![0, 0]]);
    }

    #[test]
    fn zero_module_extracts_zero() {
        let g = a2();
        let z = PModule::zero(Arc::clone(&g), Rationals);
        assert_eq!(extract_datum(&g, &w121(), &z).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn residual_is_reported() {
        let g = a2();
        let s2 = PModule::simple(Arc::clone(&g), Rationals, 1).unwrap();
        let w = WeylWord::from_one_based(&[1]).unwrap();
        assert_eq!(extract_datum(&g, &w, &s2).unwrap_err(), Error::NotInGenericStratum { residual: vec![1, 1] });
    }

    #[test]
    fn statistics_of_sigma_s2() {
        let g = a2();
        let m = sigma(0, &PModule::simple(Arc::clone(&g), Rationals, 1).unwrap()).unwrap();
        assert_eq!(eps_star_mod(0, &m).unwrap(), 0);
        assert_eq!(eps_mod(0, &m).unwrap(), 1);
        let s1 = PModule::simple(Arc::clone(&g), Rationals, 0).unwrap();
        assert_eq!(eps_star_mod(0, &s1).unwrap(), 1);
    }

    #[test]
    fn round_trip_a2_grid() {
        let g = a2();
        let f = PrimeField::mersenne61();
        let w = w121();
        let sampler = StratumSampler::new(Arc::clone(&g), f, w.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for a1 in 0..3 {
            for a2 in 0..3 {
                for a3 in 0..3 {
                    let a = [a1, a2, a3];
                    let x = sampler.sample(&a, &mut rng).unwrap();
                    assert_eq!(x.dimv(), mu(&g, &w, &a).unwrap());
                    assert_eq!(x.soc_dim(0).unwrap() as u64, a1);
                    assert_eq!(extract_datum(&g, &w, &x).unwrap(), a.to_vec());
                }
            }
        }
    }
}
