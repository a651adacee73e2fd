use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::rootsys::{Arrow, CartanGraph, RootVec};

/// A finite-dimensional nilpotent module over the preprojective algebra of
/// a [`CartanGraph`]: one space per vertex and one matrix per arrow of the
/// double quiver, subject to
///
/// ```text
/// Σ_{h : target(h) = i} sign(h) · M_h · M_{h̄} = 0    for every vertex i.
/// ```
///
/// Every public constructor checks the relations and nilpotency, so a value
/// of this type always satisfies both.
#[derive(Debug, Clone, PartialEq)]
pub struct PModule<F: Field> {
    graph: Arc<CartanGraph>,
    field: F,
    dims: Vec<usize>,
    maps: Vec<Matrix<F>>,
}

impl<F: Field> PModule<F> {
    pub fn new(graph: Arc<CartanGraph>, field: F, dims: Vec<usize>, maps: Vec<Matrix<F>>) -> Result<Self> {
        if dims.len() != graph.vertex_count() {
            return Err(Error::LengthMismatch { expected: graph.vertex_count(), found: dims.len() });
        }
        if maps.len() != graph.arrow_count() {
            return Err(Error::LengthMismatch { expected: graph.arrow_count(), found: maps.len() });
        }
        for a in graph.arrows() {
            let m = &maps[a.id];
            if m.shape() != (dims[a.target], dims[a.source]) {
                return Err(Error::DimensionMismatch(format!(
                    "arrow {}->{} has a {}x{} matrix, expected {}x{}",
                    a.source + 1,
                    a.target + 1,
                    m.rows(),
                    m.cols(),
                    dims[a.target],
                    dims[a.source]
                )));
            }
        }
        let m = PModule { graph, field, dims, maps };
        if let Some(vertex) = m.relation_defect() {
            return Err(Error::RelationFailure { vertex });
        }
        if !m.is_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        Ok(m)
    }

    /// Assembles a module from parts produced by an internal construction and
    /// checks it; a failure is reported as a bug in `op`.
    pub(crate) fn assemble(
        graph: Arc<CartanGraph>,
        field: F,
        dims: Vec<usize>,
        maps: Vec<Matrix<F>>,
        op: &'static str,
    ) -> Result<Self> {
        let m = PModule { graph, field, dims, maps };
        if let Some(vertex) = m.relation_defect() {
            return Err(Error::InternalRelationFailure { op, vertex });
        }
        debug_assert!(m.is_nilpotent(), "{op} produced a non-nilpotent module");
        Ok(m)
    }

    pub fn zero(graph: Arc<CartanGraph>, field: F) -> Self {
        Self::with_zero_maps(graph, field, None)
    }

    /// The one-dimensional simple module at vertex `i`.
    pub fn simple(graph: Arc<CartanGraph>, field: F, i: usize) -> Result<Self> {
        graph.check_vertex(i)?;
        Ok(Self::with_zero_maps(graph, field, Some(i)))
    }

    /// Semisimple module with the given dimension vector.
    pub fn semisimple(graph: Arc<CartanGraph>, field: F, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != graph.vertex_count() {
            return Err(Error::LengthMismatch { expected: graph.vertex_count(), found: dims.len() });
        }
        let maps = graph
            .arrows()
            .map(|a| Matrix::zeros(&field, dims[a.target], dims[a.source]))
            .collect();
        Ok(PModule { graph, field, dims, maps })
    }

    fn with_zero_maps(graph: Arc<CartanGraph>, field: F, at: Option<usize>) -> Self {
        let mut dims = vec![0; graph.vertex_count()];
        if let Some(i) = at {
            dims[i] = 1;
        }
        Self::semisimple(graph, field, dims).expect("dims sized to graph")
    }

    pub fn graph(&self) -> &CartanGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<CartanGraph> {
        &self.graph
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Dimension vector in the root lattice.
    pub fn dimv(&self) -> RootVec {
        RootVec(self.dims.iter().map(|&d| d as i64).collect())
    }

    pub fn map(&self, arrow: usize) -> &Matrix<F> {
        &self.maps[arrow]
    }

    pub fn maps(&self) -> &[Matrix<F>] {
        &self.maps
    }

    pub(crate) fn same_graph(&self, other: &PModule<F>) -> Result<()> {
        if Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    /// First vertex where the preprojective relation fails, if any.
    pub fn relation_defect(&self) -> Option<usize> {
        (0..self.graph.vertex_count()).find(|&i| !self.relation_at(i).is_zero())
    }

    pub(crate) fn relation_at(&self, i: usize) -> Matrix<F> {
        let f = &self.field;
        let mut acc = Matrix::zeros(f, self.dims[i], self.dims[i]);
        for h in self.graph.arrows_into(i) {
            let term = self.maps[h.id].mul(&self.maps[h.reverse_id()]);
            acc.add_scaled(&term, &f.from_i64(h.sign));
        }
        acc
    }

    /// Radical-series descent: `M ⊇ rad M ⊇ rad² M ⊇ ...` must reach zero.
    pub fn is_nilpotent(&self) -> bool {
        let f = &self.field;
        let mut layer: Vec<Matrix<F>> = self.dims.iter().map(|&d| Matrix::identity(f, d)).collect();
        for _ in 0..=self.total_dim() {
            if layer.iter().all(|b| b.cols() == 0) {
                return true;
            }
            let next = self.radical_of(&layer);
            let shrank = next.iter().zip(&layer).any(|(n, l)| n.cols() < l.cols());
            if !shrank {
                return false;
            }
            layer = next;
        }
        layer.iter().all(|b| b.cols() == 0)
    }

    /// Image of a per-vertex family of subspaces under all arrows.
    fn radical_of(&self, spaces: &[Matrix<F>]) -> Vec<Matrix<F>> {
        let f = &self.field;
        (0..self.graph.vertex_count())
            .map(|t| {
                let parts: Vec<Matrix<F>> = self
                    .graph
                    .arrows_into(t)
                    .iter()
                    .map(|a| self.maps[a.id].mul(&spaces[a.source]))
                    .collect();
                Matrix::hstack(f, self.dims[t], &parts).column_basis()
            })
            .collect()
    }

    /// Arrows into `i` together with the offsets of their source spaces in
    /// `⊕_{h → i} M_{source(h)}`.
    pub(crate) fn incoming_layout(&self, i: usize) -> (Vec<Arrow>, Vec<usize>, usize) {
        let arrows = self.graph.arrows_into(i);
        let mut offsets = Vec::with_capacity(arrows.len());
        let mut total = 0;
        for a in &arrows {
            offsets.push(total);
            total += self.dims[a.source];
        }
        (arrows, offsets, total)
    }

    /// `M_i -> ⊕_{h → i} M_{source(h)}`, stacking the maps `M_{h̄}`.
    pub fn out_map(&self, i: usize) -> Matrix<F> {
        let (arrows, _, total) = self.incoming_layout(i);
        let parts: Vec<_> = arrows.iter().map(|h| self.maps[h.reverse_id()].clone()).collect();
        let m = Matrix::vstack(&self.field, self.dims[i], &parts);
        debug_assert_eq!(m.rows(), total);
        m
    }

    /// `⊕_{h → i} M_{source(h)} -> M_i`, with blocks `sign(h) · M_h`.
    pub fn in_map(&self, i: usize) -> Matrix<F> {
        let (arrows, _, _) = self.incoming_layout(i);
        let parts: Vec<_> = arrows.iter().map(|h| self.maps[h.id].scale_i64(h.sign)).collect();
        Matrix::hstack(&self.field, self.dims[i], &parts)
    }

    /// `soc_i M`: the vectors at `i` killed by every outgoing arrow.
    pub fn soc(&self, i: usize) -> Result<Submodule<F>> {
        self.graph.check_vertex(i)?;
        let mut basis: Vec<Matrix<F>> =
            self.dims.iter().map(|&d| Matrix::zeros(&self.field, d, 0)).collect();
        basis[i] = self.out_map(i).kernel();
        Ok(Submodule { basis })
    }

    pub fn soc_dim(&self, i: usize) -> Result<usize> {
        self.graph.check_vertex(i)?;
        Ok(self.dims[i] - self.out_map(i).rank())
    }

    /// `dim top_i M = dim M_i - rank(in_i)`.
    pub fn top_dim(&self, i: usize) -> Result<usize> {
        self.graph.check_vertex(i)?;
        Ok(self.dims[i] - self.in_map(i).rank())
    }

    /// Dimension vector of the whole socle.
    pub fn socle_dims(&self) -> Vec<usize> {
        (0..self.dims.len()).map(|i| self.soc_dim(i).expect("valid vertex")).collect()
    }

    /// Dimension vector of the whole top.
    pub fn top_dims(&self) -> Vec<usize> {
        (0..self.dims.len()).map(|i| self.top_dim(i).expect("valid vertex")).collect()
    }

    pub fn direct_sum(&self, other: &PModule<F>) -> Result<PModule<F>> {
        self.same_graph(other)?;
        let f = &self.field;
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| Matrix::block_diag(f, &[a.clone(), b.clone()]))
            .collect();
        Ok(PModule { graph: Arc::clone(&self.graph), field: f.clone(), dims, maps })
    }

    /// `M^{⊕k}`.
    pub fn power(&self, k: usize) -> PModule<F> {
        let f = &self.field;
        let dims = self.dims.iter().map(|d| d * k).collect();
        let maps = self
            .maps
            .iter()
            .map(|m| Matrix::block_diag(f, &vec![m.clone(); k]))
            .collect();
        PModule { graph: Arc::clone(&self.graph), field: f.clone(), dims, maps }
    }

    /// Change of basis `g_v` at every vertex (each must be invertible).
    pub fn conjugate(&self, change: &[Matrix<F>]) -> Result<PModule<F>> {
        let inverses = change
            .iter()
            .map(|g| g.inverse().ok_or_else(|| Error::PreconditionViolated("basis change is singular".into())))
            .collect::<Result<Vec<_>>>()?;
        let maps = self
            .graph
            .arrows()
            .map(|a| change[a.target].mul(&self.maps[a.id]).mul(&inverses[a.source]))
            .collect();
        Ok(PModule {
            graph: Arc::clone(&self.graph),
            field: self.field.clone(),
            dims: self.dims.clone(),
            maps,
        })
    }

    /// The quotient `M / U` and the projection `M ↠ M / U`.
    pub fn quotient(&self, sub: &Submodule<F>) -> Result<(PModule<F>, ModuleMap<F>)> {
        sub.check_in(self)?;
        let f = &self.field;
        let proj: Vec<Matrix<F>> = sub.basis.iter().map(|b| b.cokernel_projection()).collect();
        let sections: Vec<Matrix<F>> = proj
            .iter()
            .map(|p| p.solve(&Matrix::identity(f, p.rows())).expect("projection has full row rank"))
            .collect();
        let dims: Vec<usize> = proj.iter().map(|p| p.rows()).collect();
        let maps = self
            .graph
            .arrows()
            .map(|a| proj[a.target].mul(&self.maps[a.id]).mul(&sections[a.source]))
            .collect();
        let q = PModule::assemble(Arc::clone(&self.graph), f.clone(), dims, maps, "quotient")?;
        let pi = ModuleMap { source: self.clone(), target: q.clone(), comps: proj };
        Ok((q, pi))
    }

    /// `soc_{(j_1, ..., j_t)} M`: the top term of the chain
    /// `0 = X_0 ⊆ ... ⊆ X_t` with `X_p / X_{p-1} = soc_{j_p}(M / X_{p-1})`.
    pub fn soc_chain(&self, seq: &[usize]) -> Result<Submodule<F>> {
        let mut current = Submodule::zero(self);
        for &j in seq {
            self.graph.check_vertex(j)?;
            let (q, pi) = self.quotient(&current)?;
            let s = q.soc(j)?;
            let section = pi.comps[j]
                .solve(&Matrix::identity(&self.field, q.dims[j]))
                .expect("projection has full row rank");
            let lifted = section.mul(&s.basis[j]);
            let mut basis = current.basis.clone();
            basis[j] = Matrix::hstack(&self.field, self.dims[j], &[basis[j].clone(), lifted]).column_basis();
            current = Submodule { basis };
        }
        Ok(current)
    }

    /// A submodule realized as a module in its own right.
    pub fn restrict(&self, sub: &Submodule<F>) -> Result<PModule<F>> {
        sub.check_in(self)?;
        let maps = self
            .graph
            .arrows()
            .map(|a| {
                let image = self.maps[a.id].mul(&sub.basis[a.source]);
                sub.basis[a.target].solve(&image).expect("checked closed")
            })
            .collect();
        PModule::assemble(Arc::clone(&self.graph), self.field.clone(), sub.dims(), maps, "restrict")
    }
}

/// Per-vertex column bases of an arrow-closed family of subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Submodule<F: Field> {
    pub basis: Vec<Matrix<F>>,
}

impl<F: Field> Submodule<F> {
    pub fn zero(parent: &PModule<F>) -> Self {
        Submodule { basis: parent.dims.iter().map(|&d| Matrix::zeros(&parent.field, d, 0)).collect() }
    }

    pub fn whole(parent: &PModule<F>) -> Self {
        Submodule { basis: parent.dims.iter().map(|&d| Matrix::identity(&parent.field, d)).collect() }
    }

    /// Builds a submodule from spanning columns, reducing to a basis and
    /// checking arrow-closure.
    pub fn spanned_by(parent: &PModule<F>, spanning: Vec<Matrix<F>>) -> Result<Self> {
        let basis = spanning.iter().map(|s| s.column_basis()).collect();
        let sub = Submodule { basis };
        sub.check_in(parent)?;
        Ok(sub)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.cols()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.basis.iter().map(|b| b.cols()).sum()
    }

    pub fn check_in(&self, parent: &PModule<F>) -> Result<()> {
        if self.basis.len() != parent.dims.len() {
            return Err(Error::LengthMismatch { expected: parent.dims.len(), found: self.basis.len() });
        }
        for (b, &d) in self.basis.iter().zip(&parent.dims) {
            if b.rows() != d || !b.is_injective() {
                return Err(Error::DimensionMismatch("submodule basis is not a basis of a subspace".into()));
            }
        }
        for a in parent.graph.arrows() {
            let image = parent.maps[a.id].mul(&self.basis[a.source]);
            if !self.basis[a.target].spans(&image) {
                return Err(Error::NotASubmodule);
            }
        }
        Ok(())
    }
}

/// A morphism of modules: one matrix per vertex commuting with every arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleMap<F: Field> {
    pub source: PModule<F>,
    pub target: PModule<F>,
    pub comps: Vec<Matrix<F>>,
}

impl<F: Field> ModuleMap<F> {
    pub fn new(source: PModule<F>, target: PModule<F>, comps: Vec<Matrix<F>>) -> Result<Self> {
        source.same_graph(&target)?;
        if comps.len() != source.dims.len() {
            return Err(Error::LengthMismatch { expected: source.dims.len(), found: comps.len() });
        }
        for (v, c) in comps.iter().enumerate() {
            if c.shape() != (target.dims[v], source.dims[v]) {
                return Err(Error::DimensionMismatch(format!("component at vertex {}", v + 1)));
            }
        }
        let m = ModuleMap { source, target, comps };
        if !m.commutes() {
            return Err(Error::NotAMorphism);
        }
        Ok(m)
    }

    pub fn identity(m: &PModule<F>) -> Self {
        let comps = m.dims.iter().map(|&d| Matrix::identity(&m.field, d)).collect();
        ModuleMap { source: m.clone(), target: m.clone(), comps }
    }

    pub fn commutes(&self) -> bool {
        self.source.graph.arrows().all(|a| {
            let lhs = self.target.maps[a.id].mul(&self.comps[a.source]);
            let rhs = self.comps[a.target].mul(&self.source.maps[a.id]);
            lhs == rhs
        })
    }

    pub fn compose(&self, after: &ModuleMap<F>) -> Result<ModuleMap<F>> {
        if self.target.dims != after.source.dims {
            return Err(Error::DimensionMismatch("maps are not composable".into()));
        }
        let comps = self.comps.iter().zip(&after.comps).map(|(f, g)| g.mul(f)).collect();
        Ok(ModuleMap { source: self.source.clone(), target: after.target.clone(), comps })
    }

    pub fn is_injective(&self) -> bool {
        self.comps.iter().all(|c| c.is_injective())
    }

    pub fn is_surjective(&self) -> bool {
        self.comps.iter().all(|c| c.is_surjective())
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(|c| c.is_invertible())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn kernel_dims(&self) -> Vec<usize> {
        self.comps.iter().map(|c| c.cols() - c.rank()).collect()
    }

    pub fn cokernel_dims(&self) -> Vec<usize> {
        self.comps.iter().map(|c| c.rows() - c.rank()).collect()
    }

    pub fn image(&self) -> Submodule<F> {
        Submodule { basis: self.comps.iter().map(|c| c.column_basis()).collect() }
    }

    pub fn kernel(&self) -> Submodule<F> {
        Submodule { basis: self.comps.iter().map(|c| c.kernel()).collect() }
    }

    /// The cokernel module `target / image`.
    pub fn cokernel(&self) -> Result<PModule<F>> {
        Ok(self.target.quotient(&self.image())?.0)
    }
}

/// Vertex-wise exactness of `A --f--> B --g--> C` at `B`.
pub fn exact_at_middle<F: Field>(f: &ModuleMap<F>, g: &ModuleMap<F>) -> bool {
    f.comps.iter().zip(&g.comps).all(|(fv, gv)| {
        gv.mul(fv).is_zero() && fv.rank() + gv.rank() == fv.rows()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn a2() -> Arc<CartanGraph> {
        Arc::new(CartanGraph::type_a(2))
    }

    /// Dims (1,1), arrow 2->1 nonzero: socle S_1, top S_2.
    fn uniserial_12(g: &Arc<CartanGraph>) -> PModule<Rationals> {
        let q = Rationals;
        let maps = vec![Matrix::zeros(&q, 1, 1), Matrix::identity(&q, 1)];
        PModule::new(Arc::clone(g), q, vec![1, 1], maps).unwrap()
    }

    #[test]
    fn simple_modules() {
        let g = a2();
        let s1 = PModule::simple(Arc::clone(&g), Rationals, 0).unwrap();
        assert_eq!(s1.dims(), &[1, 0]);
        assert_eq!(s1.soc(0).unwrap().dims(), vec![1, 0]);
        assert_eq!(s1.relation_defect(), None);
        let s2 = PModule::simple(Arc::clone(&g), Rationals, 1).unwrap();
        assert_eq!(s2.soc(0).unwrap().total_dim(), 0);
        assert!(PModule::simple(g, Rationals, 2).is_err());
    }

    #[test]
    fn relation_violation_is_rejected() {
        // A2 with both arrows nonzero: relation at vertex 1 is M_{2->1} M_{1->2} = 1 != 0
        let g = a2();
        let q = Rationals;
        let maps = vec![Matrix::identity(&q, 1), Matrix::identity(&q, 1)];
        assert_eq!(PModule::new(g, q, vec![1, 1], maps), Err(Error::RelationFailure { vertex: 0 }));
    }

    #[test]
    fn non_nilpotent_is_rejected() {
        // affine A1 with dims (1,1): one edge forward identity, the other
        // edge backward identity, remaining arrows zero. The relation holds
        // (each product has a zero factor) but the cycle never dies.
        let g = Arc::new(CartanGraph::affine_a1());
        let q = Rationals;
        let one = Matrix::identity(&q, 1);
        let zero = Matrix::zeros(&q, 1, 1);
        let maps = vec![one.clone(), zero.clone(), zero, one];
        assert_eq!(PModule::new(g, q, vec![1, 1], maps), Err(Error::NotNilpotent));
    }

    #[test]
    fn socle_top_and_quotient() {
        let g = a2();
        let m = uniserial_12(&g);
        assert_eq!(m.socle_dims(), vec![1, 0]);
        assert_eq!(m.top_dims(), vec![0, 1]);
        let (q, pi) = m.quotient(&m.soc(0).unwrap()).unwrap();
        assert_eq!(q.dims(), &[0, 1]);
        assert!(pi.is_surjective());
        assert_eq!(pi.kernel_dims(), vec![1, 0]);
        let (z, _) = m.quotient(&Submodule::whole(&m)).unwrap();
        assert!(z.is_zero());
        let (same, _) = m.quotient(&Submodule::zero(&m)).unwrap();
        assert_eq!(same, m);
    }

    #[test]
    fn quotient_rejects_non_submodule() {
        let g = a2();
        let m = uniserial_12(&g);
        let q = Rationals;
        // the vertex-2 line is not closed: the arrow 2->1 moves it
        let bad = Submodule { basis: vec![Matrix::zeros(&q, 1, 0), Matrix::identity(&q, 1)] };
        assert_eq!(m.quotient(&bad).unwrap_err(), Error::NotASubmodule);
    }

    #[test]
    fn socle_chain() {
        let g = a2();
        let m = uniserial_12(&g);
        assert_eq!(m.soc_chain(&[]).unwrap().total_dim(), 0);
        assert_eq!(m.soc_chain(&[0]).unwrap().dims(), vec![1, 0]);
        assert_eq!(m.soc_chain(&[0, 1]).unwrap().dims(), vec![1, 1]);
        // starting at the wrong vertex picks up nothing
        assert_eq!(m.soc_chain(&[1]).unwrap().dims(), vec![0, 0]);
    }

    #[test]
    fn restrict_and_power() {
        let g = a2();
        let f = PrimeField::mersenne61();
        let maps = vec![Matrix::zeros(&f, 1, 1), Matrix::identity(&f, 1)];
        let m = PModule::new(Arc::clone(&g), f, vec![1, 1], maps).unwrap();
        let s = m.restrict(&m.soc(0).unwrap()).unwrap();
        assert_eq!(s, PModule::simple(g, f, 0).unwrap());
        let m3 = m.power(3);
        assert_eq!(m3.dims(), &[3, 3]);
        assert_eq!(m3.socle_dims(), vec![3, 0]);
        assert!(m3.is_nilpotent());
    }
}
