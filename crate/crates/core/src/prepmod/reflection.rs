//! Reflection functors at a vertex.
//!
//! Both functors rebuild only the space at the reflected vertex `i`. With
//! `in_i` the signed incoming assembly and `out_i` the outgoing one:
//!
//! * `Σ_i M` puts `ker(in_i)` at `i`. Arrows leaving `i` become the
//!   coordinate projections of the kernel inclusion; arrows entering `i`
//!   become the corestriction of `out_i ∘ in_i` to the kernel.
//! * `Σ_i* M` puts `coker(out_i)` at `i`. Arrows entering `i` become the
//!   cokernel projection; arrows leaving `i` factor `out_i ∘ in_i` through it.
//!
//! With the sign carried inside `in_i`, the twist has coefficient `+1`.
//! [`ReflectionSign::Flipped`] uses `-1` and exists only so the verification
//! harness can show that a wrong sign is caught.

use crate::error::Result;
use crate::field::Field;
use crate::linalg::Matrix;

use super::module::{ModuleMap, PModule};

/// Coefficient of the twisted structure map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReflectionSign {
    #[default]
    Standard,
    Flipped,
}

impl ReflectionSign {
    fn coefficient(self) -> i64 {
        match self {
            ReflectionSign::Standard => 1,
            ReflectionSign::Flipped => -1,
        }
    }
}

/// Data shared by `Σ_i` on a module and on maps out of it.
struct KernelSide<F: Field> {
    /// Columns spanning `ker(in_i)` inside `⊕_{h → i} M_{source(h)}`.
    basis: Matrix<F>,
}

struct CokernelSide<F: Field> {
    /// `⊕_{h → i} M_{source(h)} ↠ coker(out_i)`.
    projection: Matrix<F>,
    /// Right inverse of `projection`.
    section: Matrix<F>,
}

fn kernel_side<F: Field>(m: &PModule<F>, i: usize) -> KernelSide<F> {
    KernelSide { basis: m.in_map(i).kernel() }
}

fn cokernel_side<F: Field>(m: &PModule<F>, i: usize) -> CokernelSide<F> {
    let projection = m.out_map(i).cokernel_projection();
    let section = projection
        .solve(&Matrix::identity(m.field(), projection.rows()))
        .expect("cokernel projection has full row rank");
    CokernelSide { projection, section }
}

/// `Σ_i M`.
pub fn sigma<F: Field>(i: usize, m: &PModule<F>) -> Result<PModule<F>> {
    sigma_signed(i, m, ReflectionSign::Standard)
}

/// `Σ_i* M`.
pub fn sigma_star<F: Field>(i: usize, m: &PModule<F>) -> Result<PModule<F>> {
    sigma_star_signed(i, m, ReflectionSign::Standard)
}

pub fn sigma_signed<F: Field>(i: usize, m: &PModule<F>, sign: ReflectionSign) -> Result<PModule<F>> {
    m.graph().check_vertex(i)?;
    let f = m.field();
    let (arrows, offsets, _) = m.incoming_layout(i);
    let k = kernel_side(m, i).basis;
    let twist = m.out_map(i).mul(&m.in_map(i)).scale_i64(sign.coefficient());
    let t = k.solve(&twist).expect("image of out∘in lies in ker(in)");

    let mut maps = m.maps().to_vec();
    let mut dims = m.dims().to_vec();
    dims[i] = k.cols();
    for (h, &off) in arrows.iter().zip(&offsets) {
        let d = m.dim(h.source);
        maps[h.reverse_id()] = k.block(off, 0, d, k.cols());
        maps[h.id] = t.block(0, off, k.cols(), d).scale_i64(h.sign);
    }
    PModule::assemble(m.graph_arc().clone(), f.clone(), dims, maps, "sigma")
}

pub fn sigma_star_signed<F: Field>(i: usize, m: &PModule<F>, sign: ReflectionSign) -> Result<PModule<F>> {
    m.graph().check_vertex(i)?;
    let f = m.field();
    let (arrows, offsets, _) = m.incoming_layout(i);
    let CokernelSide { projection: p, section: s } = cokernel_side(m, i);
    let twist = m.out_map(i).mul(&m.in_map(i)).mul(&s).scale_i64(sign.coefficient());

    let mut maps = m.maps().to_vec();
    let mut dims = m.dims().to_vec();
    dims[i] = p.rows();
    for (h, &off) in arrows.iter().zip(&offsets) {
        let d = m.dim(h.source);
        maps[h.id] = p.block(0, off, p.rows(), d).scale_i64(h.sign);
        maps[h.reverse_id()] = twist.block(off, 0, d, p.rows());
    }
    PModule::assemble(m.graph_arc().clone(), f.clone(), dims, maps, "sigma_star")
}

/// `f̃ = ⊕_{h → i} f_{source(h)}`.
fn spread<F: Field>(i: usize, map: &ModuleMap<F>) -> Matrix<F> {
    let parts: Vec<Matrix<F>> = map
        .source
        .graph()
        .arrows_into(i)
        .iter()
        .map(|h| map.comps[h.source].clone())
        .collect();
    Matrix::block_diag(map.source.field(), &parts)
}

/// `Σ_i` applied to a morphism.
pub fn sigma_map<F: Field>(i: usize, map: &ModuleMap<F>) -> Result<ModuleMap<F>> {
    let source = sigma(i, &map.source)?;
    let target = sigma(i, &map.target)?;
    let ks = kernel_side(&map.source, i).basis;
    let kt = kernel_side(&map.target, i).basis;
    let mut comps = map.comps.clone();
    comps[i] = kt.solve(&spread(i, map).mul(&ks)).expect("morphisms preserve ker(in)");
    ModuleMap::new(source, target, comps)
}

/// `Σ_i*` applied to a morphism.
pub fn sigma_star_map<F: Field>(i: usize, map: &ModuleMap<F>) -> Result<ModuleMap<F>> {
    let source = sigma_star(i, &map.source)?;
    let target = sigma_star(i, &map.target)?;
    let cs = cokernel_side(&map.source, i);
    let ct = cokernel_side(&map.target, i);
    let mut comps = map.comps.clone();
    comps[i] = ct.projection.mul(&spread(i, map)).mul(&cs.section);
    ModuleMap::new(source, target, comps)
}

/// The natural surjection `M ↠ Σ_i Σ_i* M`, whose kernel is `soc_i M`.
pub fn unit_to_sigma_sigma_star<F: Field>(i: usize, m: &PModule<F>) -> Result<ModuleMap<F>> {
    let target = sigma(i, &sigma_star(i, m)?)?;
    let k = kernel_side(&sigma_star(i, m)?, i).basis;
    let mut comps: Vec<Matrix<F>> = m.dims().iter().map(|&d| Matrix::identity(m.field(), d)).collect();
    comps[i] = k.solve(&m.out_map(i)).expect("image of out_i is ker of the projection");
    ModuleMap::new(m.clone(), target, comps)
}

/// The natural injection `Σ_i* Σ_i M ↪ M`, whose cokernel is `top_i M`.
pub fn counit_from_sigma_star_sigma<F: Field>(i: usize, m: &PModule<F>) -> Result<ModuleMap<F>> {
    let inner = sigma(i, m)?;
    let source = sigma_star(i, &inner)?;
    let s = cokernel_side(&inner, i).section;
    let mut comps: Vec<Matrix<F>> = m.dims().iter().map(|&d| Matrix::identity(m.field(), d)).collect();
    comps[i] = m.in_map(i).mul(&s);
    ModuleMap::new(source, m.clone(), comps)
}

/// Applies `Σ` along `letters` in order (`letters[0]` first).
pub fn sigma_word<F: Field>(letters: &[usize], m: &PModule<F>) -> Result<PModule<F>> {
    letters.iter().try_fold(m.clone(), |acc, &i| sigma(i, &acc))
}

/// Applies `Σ*` along `letters` in order (`letters[0]` first).
pub fn sigma_star_word<F: Field>(letters: &[usize], m: &PModule<F>) -> Result<PModule<F>> {
    letters.iter().try_fold(m.clone(), |acc, &i| sigma_star(i, &acc))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::rootsys::{reflect_root, CartanGraph};

    fn a2() -> Arc<CartanGraph> {
        Arc::new(CartanGraph::type_a(2))
    }

    fn s(g: &Arc<CartanGraph>, i: usize) -> PModule<Rationals> {
        PModule::simple(Arc::clone(g), Rationals, i).unwrap()
    }

    #[test]
    fn sigma_kills_its_own_simple() {
        let g = a2();
        assert!(sigma(0, &s(&g, 0)).unwrap().is_zero());
        assert!(sigma_star(0, &s(&g, 0)).unwrap().is_zero());
    }

    #[test]
    fn sigma_of_neighbour_simple() {
        let g = a2();
        let m = sigma(0, &s(&g, 1)).unwrap();
        assert_eq!(m.dims(), &[1, 1]);
        // vertex 1 maps onto vertex 2: socle S_2, top S_1
        assert_eq!(m.socle_dims(), vec![0, 1]);
        assert_eq!(m.top_dims(), vec![1, 0]);
        assert_eq!(m.soc_dim(0).unwrap(), 0);
        assert_eq!(m.top_dim(0).unwrap(), 1);

        let back = sigma(1, &m).unwrap();
        assert_eq!(back.dims(), &[1, 0]);
    }

    #[test]
    fn sigma_star_of_neighbour_simple() {
        let g = a2();
        let m = sigma_star(0, &s(&g, 1)).unwrap();
        assert_eq!(m.dims(), &[1, 1]);
        assert_eq!(m.socle_dims(), vec![1, 0]);
        assert_eq!(m.top_dims(), vec![0, 1]);
        // Σ_1* S_2 is Σ_2 S_1 up to isomorphism: same socle and top
        let other = sigma(1, &s(&g, 0)).unwrap();
        assert_eq!(other.socle_dims(), m.socle_dims());
    }

    #[test]
    fn sigma_star_inverts_sigma_on_trivial_top() {
        let g = a2();
        let m = sigma(0, &s(&g, 1)).unwrap();
        // top_1(S_2) = 0, so Σ_1* Σ_1 S_2 recovers S_2
        let back = sigma_star(0, &m).unwrap();
        assert_eq!(back.dims(), &[0, 1]);
    }

    #[test]
    fn dims_reflect_when_top_or_socle_vanish() {
        let g = Arc::new(CartanGraph::type_a(3));
        let q = Rationals;
        let mut m = PModule::simple(Arc::clone(&g), q, 1).unwrap();
        for &i in &[0usize, 2, 1] {
            let before = m.dimv();
            if m.top_dim(i).unwrap() == 0 {
                let next = sigma(i, &m).unwrap();
                assert_eq!(next.dimv(), reflect_root(&g, i, &before).unwrap());
                m = next;
            }
        }
        assert_eq!(m.dims(), &[1, 1, 1]);
    }

    #[test]
    fn natural_maps_are_exact() {
        let g = a2();
        let f = PrimeField::mersenne61();
        let m = sigma(0, &PModule::simple(Arc::clone(&g), f, 1).unwrap()).unwrap();
        let m = m.direct_sum(&PModule::simple(Arc::clone(&g), f, 0).unwrap()).unwrap();
        for i in 0..2 {
            let unit = unit_to_sigma_sigma_star(i, &m).unwrap();
            assert!(unit.is_surjective());
            assert_eq!(unit.kernel_dims()[i], m.soc_dim(i).unwrap());
            let counit = counit_from_sigma_star_sigma(i, &m).unwrap();
            assert!(counit.is_injective());
            assert_eq!(counit.cokernel_dims()[i], m.top_dim(i).unwrap());
        }
    }

    #[test]
    fn flipped_sign_breaks_relations() {
        // projective cover of S_2 in A3: u -> x, u -> y, x -> v, y -> v
        let g = Arc::new(CartanGraph::type_a(3));
        let q = Rationals;
        let maps = vec![
            Matrix::from_i64(&q, 2, 1, &[0, 1]),
            Matrix::from_i64(&q, 1, 2, &[1, 0]),
            Matrix::from_i64(&q, 1, 2, &[1, 0]),
            Matrix::from_i64(&q, 2, 1, &[0, 1]),
        ];
        let m = PModule::new(Arc::clone(&g), q, vec![1, 2, 1], maps).unwrap();
        assert!(sigma_signed(0, &m, ReflectionSign::Standard).is_ok());
        let err = sigma_signed(0, &m, ReflectionSign::Flipped).unwrap_err();
        assert!(matches!(err, crate::error::Error::InternalRelationFailure { op: "sigma", .. }));
        let err = sigma_star_signed(0, &m, ReflectionSign::Flipped).unwrap_err();
        assert!(matches!(err, crate::error::Error::InternalRelationFailure { op: "sigma_star", .. }));
    }
}
