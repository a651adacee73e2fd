//! JSON serialization of modules.
//!
//! ```json
//! {
//!   "field": {"kind": "prime", "p": "2305843009213693951"},
//!   "graph": {"vertices": 2, "edges": [[1, 2]]},
//!   "dims": [1, 1],
//!   "arrows": [{"source": 1, "target": 2, "matrix": [["1"]]}, ...]
//! }
//! ```
//!
//! Arrows are listed in id order: for edge `k` oriented `a -> b`, first
//! `a -> b` then `b -> a`. Matrices are row-major with `target` rows.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldDescriptor, PrimeField, Rationals};
use crate::linalg::Matrix;
use crate::rootsys::{CartanGraph, GraphFile};

use super::module::PModule;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowDump {
    pub source: usize,
    pub target: usize,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDump {
    pub field: FieldDescriptor,
    pub graph: GraphFile,
    pub dims: Vec<usize>,
    pub arrows: Vec<ArrowDump>,
}

impl ModuleDump {
    pub fn from_module<F: Field>(m: &PModule<F>) -> Self {
        let f = m.field();
        let arrows = m
            .graph()
            .arrows()
            .map(|a| {
                let mat = m.map(a.id);
                ArrowDump {
                    source: a.source + 1,
                    target: a.target + 1,
                    matrix: (0..mat.rows()).map(|r| mat.row(r).iter().map(|x| f.encode(x)).collect()).collect(),
                }
            })
            .collect();
        ModuleDump {
            field: f.descriptor(),
            graph: GraphFile::from_graph(m.graph()),
            dims: m.dims().to_vec(),
            arrows,
        }
    }

    /// Rebuilds and validates the module over `field`, which must match the
    /// recorded field.
    pub fn to_module<F: Field>(&self, field: &F) -> Result<PModule<F>> {
        if field.descriptor() != self.field {
            return Err(Error::InvalidField(format!("dump is over {}, requested {}", self.field, field.descriptor())));
        }
        let graph = Arc::new(self.graph.to_graph()?);
        if self.arrows.len() != graph.arrow_count() {
            return Err(Error::LengthMismatch { expected: graph.arrow_count(), found: self.arrows.len() });
        }
        if self.dims.len() != graph.vertex_count() {
            return Err(Error::LengthMismatch { expected: graph.vertex_count(), found: self.dims.len() });
        }
        let mut maps = Vec::with_capacity(self.arrows.len());
        for (a, d) in graph.arrows().zip(&self.arrows) {
            if (d.source, d.target) != (a.source + 1, a.target + 1) {
                return Err(Error::Parse(format!(
                    "arrow {} should run {} -> {}",
                    a.id + 1,
                    a.source + 1,
                    a.target + 1
                )));
            }
            let (rows, cols) = (self.dims[a.target], self.dims[a.source]);
            if d.matrix.len() != rows || d.matrix.iter().any(|r| r.len() != cols) {
                return Err(Error::DimensionMismatch(format!(
                    "arrow {} -> {} needs a {rows}x{cols} matrix",
                    a.source + 1,
                    a.target + 1
                )));
            }
            let mut m = Matrix::zeros(field, rows, cols);
            for (r, row) in d.matrix.iter().enumerate() {
                for (c, s) in row.iter().enumerate() {
                    m.set(r, c, field.decode(s)?);
                }
            }
            maps.push(m);
        }
        PModule::new(graph, field.clone(), self.dims.clone(), maps)
    }

    pub fn graph(&self) -> Result<CartanGraph> {
        self.graph.to_graph()
    }
}

/// A module over whichever field a dump names.
#[derive(Debug, Clone)]
pub enum AnyModule {
    Rational(PModule<Rationals>),
    Prime(PModule<PrimeField>),
}

impl AnyModule {
    pub fn from_dump(d: &ModuleDump) -> Result<Self> {
        match &d.field {
            FieldDescriptor::Rational => d.to_module(&Rationals).map(AnyModule::Rational),
            FieldDescriptor::Prime { p } => {
                let p: u64 = p.parse().map_err(|e| Error::InvalidField(format!("bad prime {p:?}: {e}")))?;
                d.to_module(&PrimeField::new(p)?).map(AnyModule::Prime)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prepmod::reflection::sigma;

    #[test]
    fn round_trip() {
        let g = Arc::new(CartanGraph::type_a(2));
        let m = sigma(0, &PModule::simple(Arc::clone(&g), Rationals, 1).unwrap()).unwrap();
        let d = ModuleDump::from_module(&m);
        let text = serde_json::to_string(&d).unwrap();
        let back: ModuleDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_module(&Rationals).unwrap(), m);
        assert!(back.to_module(&PrimeField::mersenne61()).is_err());

        let f = PrimeField::mersenne61();
        let mp = sigma(0, &PModule::simple(Arc::clone(&g), f, 1).unwrap()).unwrap();
        let dp = ModuleDump::from_module(&mp);
        assert!(matches!(AnyModule::from_dump(&dp).unwrap(), AnyModule::Prime(x) if x == mp));
    }

    #[test]
    fn corrupted_relations_are_rejected() {
        let g = Arc::new(CartanGraph::type_a(2));
        let q = Rationals;
        let maps = vec![Matrix::zeros(&q, 1, 1), Matrix::identity(&q, 1)];
        let m = PModule::new(Arc::clone(&g), q, vec![1, 1], maps).unwrap();
        let mut d = ModuleDump::from_module(&m);
        d.arrows[0].matrix[0][0] = "1".into();
        assert_eq!(d.to_module(&q).unwrap_err(), Error::RelationFailure { vertex: 0 });
    }
}
