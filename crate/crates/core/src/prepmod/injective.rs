//! Injective hulls of simples in finite type, by path-space truncation.
//!
//! `B_L(u)` is the space of paths of length `L` from `u` to the socle vertex
//! modulo the relations. Prepending an arrow `a : u -> t` gives
//! `P_a : B_L(t) -> B_{L+1}(u)`, and `B_{L+1}(u)` is the quotient of
//! `⊕_{a : u -> t} B_L(t)` by the relation placed at `u`. The hull is
//! `⊕_L B_L(u)^*` with arrows acting by transposes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::rootsys::{CartanGraph, WeylWord};

use super::module::{PModule, Submodule};

/// Bound on the hull's total dimension.
pub const HULL_DIM_CAP: usize = 4096;

/// The injective hull of `S_i`. Fails with [`Error::TooLarge`] when the path
/// spaces do not die out, which happens exactly outside finite type.
pub fn injective_hull<F: Field>(g: &Arc<CartanGraph>, field: &F, i: usize) -> Result<PModule<F>> {
    g.check_vertex(i)?;
    if !g.is_finite_type() {
        return Err(Error::TooLarge { cap: HULL_DIM_CAP });
    }
    let n = g.vertex_count();
    let arrows: Vec<_> = g.arrows().collect();

    // dims[L][u], prepend[L][a] : B_L(target a) -> B_{L+1}(source a)
    let mut dims: Vec<Vec<usize>> = vec![(0..n).map(|u| usize::from(u == i)).collect()];
    let mut prepend: Vec<Vec<Matrix<F>>> = Vec::new();
    let mut total: usize = 1;
    loop {
        let l = dims.len() - 1;
        let mut next_dims = vec![0usize; n];
        let mut next_prepend: Vec<Option<Matrix<F>>> = vec![None; arrows.len()];
        for u in 0..n {
            let out: Vec<_> = arrows.iter().filter(|a| a.source == u).collect();
            let mut offsets = Vec::with_capacity(out.len());
            let mut size = 0;
            for a in &out {
                offsets.push(size);
                size += dims[l][a.target];
            }
            // relation image of B_{L-1}(u): summand h̄ gets sign(h) P_h
            let rel = if l == 0 {
                Matrix::zeros(field, size, 0)
            } else {
                let prev = dims[l - 1][u];
                let mut rel = Matrix::zeros(field, size, prev);
                for h in g.arrows_into(u) {
                    let hb = h.reverse_id();
                    let pos = out.iter().position(|a| a.id == hb).expect("reverse arrow leaves u");
                    let block = prepend[l - 1][h.id].scale_i64(h.sign);
                    rel.set_block(offsets[pos], 0, &block);
                }
                rel
            };
            let proj = rel.cokernel_projection();
            next_dims[u] = proj.rows();
            for (a, &off) in out.iter().zip(&offsets) {
                next_prepend[a.id] = Some(proj.block(0, off, proj.rows(), dims[l][a.target]));
            }
        }
        prepend.push(next_prepend.into_iter().map(|m| m.expect("every arrow has a source")).collect());
        let added: usize = next_dims.iter().sum();
        if added == 0 {
            break;
        }
        total += added;
        if total > HULL_DIM_CAP {
            return Err(Error::TooLarge { cap: HULL_DIM_CAP });
        }
        dims.push(next_dims);
    }

    // block offsets of degree L inside the hull at u
    let levels = dims.len();
    let mut offset = vec![vec![0usize; n]; levels];
    let mut hull_dims = vec![0usize; n];
    for l in 0..levels {
        offset[l].copy_from_slice(&hull_dims);
        for u in 0..n {
            hull_dims[u] += dims[l][u];
        }
    }
    let maps = arrows
        .iter()
        .map(|a| {
            let (u, t) = (a.source, a.target);
            let mut m = Matrix::zeros(field, hull_dims[t], hull_dims[u]);
            for l in 0..levels.saturating_sub(1) {
                m.set_block(offset[l][t], offset[l + 1][u], &prepend[l][a.id].transpose());
            }
            m
        })
        .collect();
    PModule::new(Arc::clone(g), field.clone(), hull_dims, maps)
}

/// `soc_{(i_k, ..., i_1)}` of the hull of `S_{i_k}`, as a module.
pub fn v_module_by_socle_chain<F: Field>(
    g: &Arc<CartanGraph>,
    field: &F,
    w: &WeylWord,
    k: usize,
) -> Result<PModule<F>> {
    if k > w.len() {
        return Err(Error::IndexOutOfRange { index: k, len: w.len() });
    }
    if k == 0 {
        return Ok(PModule::zero(Arc::clone(g), field.clone()));
    }
    let hull = injective_hull(g, field, w.letters()[k - 1])?;
    let seq: Vec<usize> = w.letters()[..k].iter().rev().copied().collect();
    let sub: Submodule<F> = hull.soc_chain(&seq)?;
    hull.restrict(&sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    #[test]
    fn hulls_in_type_a() {
        // I_1 in A2 is uniserial 2 -> 1
        let g = Arc::new(CartanGraph::type_a(2));
        let h = injective_hull(&g, &Rationals, 0).unwrap();
        assert_eq!(h.dims(), &[1, 1]);
        assert_eq!(h.socle_dims(), vec![1, 0]);
        // the preprojective algebra of A3 has dimension 10
        let g3 = Arc::new(CartanGraph::type_a(3));
        let dims: Vec<Vec<usize>> =
            (0..3).map(|i| injective_hull(&g3, &Rationals, i).unwrap().dims().to_vec()).collect();
        assert_eq!(dims, vec![vec![1, 1, 1], vec![1, 2, 1], vec![1, 1, 1]]);
        for i in 0..3 {
            let h = injective_hull(&g3, &Rationals, i).unwrap();
            let mut expected = vec![0; 3];
            expected[i] = 1;
            assert_eq!(h.socle_dims(), expected);
        }
    }

    #[test]
    fn socle_chain_route_in_a2() {
        let g = Arc::new(CartanGraph::type_a(2));
        let w = WeylWord::from_one_based(&[1, 2, 1]).unwrap();
        let dims: Vec<Vec<usize>> = (0..=3)
            .map(|k| v_module_by_socle_chain(&g, &Rationals, &w, k).unwrap().dims().to_vec())
            .collect();
        assert_eq!(dims, vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn affine_hull_is_rejected() {
        let g = Arc::new(CartanGraph::affine_a1());
        assert!(matches!(injective_hull(&g, &Rationals, 0), Err(Error::TooLarge { .. })));
    }
}
