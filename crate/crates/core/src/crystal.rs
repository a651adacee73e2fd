//! Lusztig data: elements of `B(w)` named by a reduced word and a tuple of
//! exponents, together with the first-letter operations `ẽ*max` and `T`,
//! rank-two transition maps and the extraction chain.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootsys::{beta_sequence, braid_moves, mu, same_element, CartanGraph, MoveKind, ReducedWordCache, RootVec, WeylWord};

/// Convention string recorded in every serialized datum.
pub const DATUM_CONVENTION: &str = "application-order; display order (i_r,…,i_1) reversed";

/// A reduced word with one exponent per letter, both in application order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LusztigDatum {
    word: WeylWord,
    a: Vec<u64>,
}

impl LusztigDatum {
    pub fn new(g: &CartanGraph, word: WeylWord, a: Vec<u64>) -> Result<Self> {
        if a.len() != word.len() {
            return Err(Error::LengthMismatch { expected: word.len(), found: a.len() });
        }
        beta_sequence(g, &word)?;
        Ok(LusztigDatum { word, a })
    }

    /// The highest-weight element `b_0` relative to `word`.
    pub fn zero(g: &CartanGraph, word: WeylWord) -> Result<Self> {
        let r = word.len();
        Self::new(g, word, vec![0; r])
    }

    pub fn word(&self) -> &WeylWord {
        &self.word
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn is_highest_weight(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    /// `ε*_{i_1} = a_1`.
    pub fn eps_star(&self) -> Result<u64> {
        self.a.first().copied().ok_or(Error::EmptyWord)
    }

    /// Sets `a_1` to zero.
    pub fn e_star_max(&self) -> Result<LusztigDatum> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let mut a = self.a.clone();
        a[0] = 0;
        Ok(LusztigDatum { word: self.word.clone(), a })
    }

    /// Drops the first letter and exponent; needs `a_1 = 0`.
    pub fn saito_t(&self) -> Result<LusztigDatum> {
        match self.a.first() {
            None => Err(Error::EmptyWord),
            Some(&x) if x != 0 => Err(Error::PreconditionViolated(format!("first exponent is {x}, not 0"))),
            Some(_) => Ok(LusztigDatum { word: self.word.suffix(1), a: self.a[1..].to_vec() }),
        }
    }

    /// Prepends letter `i` with exponent 0.
    pub fn saito_t_inv(&self, g: &CartanGraph, i: usize) -> Result<LusztigDatum> {
        g.check_vertex(i)?;
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(i);
        letters.extend_from_slice(self.word.letters());
        let mut a = Vec::with_capacity(self.len() + 1);
        a.push(0);
        a.extend_from_slice(&self.a);
        LusztigDatum::new(g, WeylWord::new(letters), a)
    }

    /// `Σ_k a_k β_k`.
    pub fn weight(&self, g: &CartanGraph) -> Result<RootVec> {
        mu(g, &self.word, &self.a)
    }

    fn check_move(&self, g: &CartanGraph, pos: usize, kind: MoveKind) -> Result<WeylWord> {
        braid_moves(g, &self.word)?
            .into_iter()
            .find(|m| m.position == pos && m.kind == kind)
            .map(|m| m.word)
            .ok_or(Error::InvalidMovePosition(pos))
    }

    /// Commutation at 0-based `pos`: swaps the two exponents.
    pub fn transition_2move(&self, g: &CartanGraph, pos: usize) -> Result<LusztigDatum> {
        let word = self.check_move(g, pos, MoveKind::Commute)?;
        let mut a = self.a.clone();
        a.swap(pos, pos + 1);
        Ok(LusztigDatum { word, a })
    }

    /// Braid move at 0-based `pos`:
    /// `(x, y, z) -> (y + z - p, p, x + y - p)` with `p = min(x, z)`.
    pub fn transition_3move(&self, g: &CartanGraph, pos: usize) -> Result<LusztigDatum> {
        let word = self.check_move(g, pos, MoveKind::Braid)?;
        let mut a = self.a.clone();
        let (x, y, z) = (a[pos], a[pos + 1], a[pos + 2]);
        let p = x.min(z);
        a[pos] = y + z - p;
        a[pos + 1] = p;
        a[pos + 2] = x + y - p;
        Ok(LusztigDatum { word, a })
    }

    /// Applies whichever move is valid at `pos` with the given kind.
    pub fn transition(&self, g: &CartanGraph, pos: usize, kind: MoveKind) -> Result<LusztigDatum> {
        match kind {
            MoveKind::Commute => self.transition_2move(g, pos),
            MoveKind::Braid => self.transition_3move(g, pos),
        }
    }

    /// All data reachable by one transition move.
    pub fn neighbours(&self, g: &CartanGraph) -> Result<Vec<LusztigDatum>> {
        braid_moves(g, &self.word)?
            .into_iter()
            .map(|m| self.transition(g, m.position, m.kind))
            .collect()
    }

    pub fn to_file(&self) -> DatumFile {
        DatumFile {
            convention: DATUM_CONVENTION.to_string(),
            word: self.word.to_one_based(),
            a: self.a.clone(),
        }
    }
}

/// Rewrites `d` relative to the reduced word `target` along a braid path.
/// Words are explored breadth-first; each is visited once.
pub fn transport(g: &CartanGraph, d: &LusztigDatum, target: &WeylWord, cap: usize) -> Result<LusztigDatum> {
    if !same_element(g, &d.word, target)? {
        return Err(Error::DifferentWeylElement);
    }
    beta_sequence(g, target)?;
    let mut seen: HashMap<WeylWord, LusztigDatum> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(d.word.clone(), d.clone());
    queue.push_back(d.clone());
    while let Some(cur) = queue.pop_front() {
        if &cur.word == target {
            return Ok(cur);
        }
        for next in cur.neighbours(g)? {
            if !seen.contains_key(&next.word) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded { cap });
                }
                seen.insert(next.word.clone(), next.clone());
                queue.push_back(next);
            }
        }
    }
    // words of one element are braid-connected, so this is unreachable for
    // valid input
    Err(Error::DifferentWeylElement)
}

/// Whether two data name the same crystal element.
pub fn equal(g: &CartanGraph, d1: &LusztigDatum, d2: &LusztigDatum, cap: usize) -> Result<bool> {
    Ok(transport(g, d1, &d2.word, cap)? == *d2)
}

/// Rewrites a datum on the lexicographically least reduced word of its
/// element.
pub fn canonical(cache: &ReducedWordCache, d: &LusztigDatum) -> Result<LusztigDatum> {
    let target = cache.canonical(&d.word)?;
    transport(cache.graph(), d, &target, usize::MAX)
}

/// One step of an extraction chain; vertices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum ChainStep {
    EStarMax { vertex: usize, exponent: u64 },
    SaitoT { vertex: usize },
}

/// `ẽ*max` and `T` applied alternately until the empty datum is reached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionCertificate {
    pub steps: Vec<ChainStep>,
}

impl ExtractionCertificate {
    pub fn exponents(&self) -> Vec<u64> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                ChainStep::EStarMax { exponent, .. } => Some(*exponent),
                ChainStep::SaitoT { .. } => None,
            })
            .collect()
    }

    pub fn t_steps(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, ChainStep::SaitoT { .. })).count()
    }
}

pub fn extraction_chain(d: &LusztigDatum) -> ExtractionCertificate {
    let mut cur = d.clone();
    let mut steps = Vec::with_capacity(2 * d.len());
    while !cur.is_empty() {
        let vertex = cur.word.letters()[0] + 1;
        let exponent = cur.eps_star().expect("nonempty");
        cur = cur.e_star_max().expect("nonempty");
        steps.push(ChainStep::EStarMax { vertex, exponent });
        cur = cur.saito_t().expect("first exponent cleared");
        steps.push(ChainStep::SaitoT { vertex });
    }
    ExtractionCertificate { steps }
}

/// Serialized datum; `word` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumFile {
    #[serde(default = "default_convention")]
    pub convention: String,
    pub word: Vec<usize>,
    pub a: Vec<u64>,
}

fn default_convention() -> String {
    DATUM_CONVENTION.to_string()
}

impl DatumFile {
    pub fn to_datum(&self, g: &CartanGraph) -> Result<LusztigDatum> {
        if self.convention != DATUM_CONVENTION {
            return Err(Error::Parse(format!("unknown datum convention {:?}", self.convention)));
        }
        LusztigDatum::new(g, WeylWord::from_one_based(&self.word)?, self.a.clone())
    }
}

/// Checks on the two fixed A2 transitions that pin the orientation of the
/// 3-move formula; run before any harness suite.
pub fn transition_self_test() -> Result<()> {
    let g = CartanGraph::type_a(2);
    let w = WeylWord::from_one_based(&[1, 2, 1])?;
    for (from, to) in [([1, 0, 0], [0, 0, 1]), ([1, 0, 1], [0, 1, 0]), ([0, 0, 0], [0, 0, 0])] {
        let d = LusztigDatum::new(&g, w.clone(), from.to_vec())?;
        let moved = d.transition_3move(&g, 0)?;
        if moved.a != to || moved.weight(&g)? != d.weight(&g)? || moved.transition_3move(&g, 0)? != d {
            return Err(Error::PreconditionViolated(format!("3-move self-test failed on {from:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a2() -> CartanGraph {
        CartanGraph::type_a(2)
    }

    fn w(l: &[usize]) -> WeylWord {
        WeylWord::from_one_based(l).unwrap()
    }

    fn d(g: &CartanGraph, l: &[usize], a: &[u64]) -> LusztigDatum {
        LusztigDatum::new(g, w(l), a.to_vec()).unwrap()
    }

    #[test]
    fn construction() {
        let g = a2();
        assert!(d(&g, &[1, 2, 1], &[0, 0, 0]).is_highest_weight());
        assert_eq!(d(&g, &[1, 2, 1], &[0, 0, 1]).weight(&g).unwrap(), RootVec(vec![0, 1]));
        assert!(matches!(
            LusztigDatum::new(&g, w(&[1, 1]), vec![0, 0]),
            Err(Error::NonReducedWord { .. })
        ));
        assert!(matches!(LusztigDatum::new(&g, w(&[1]), vec![0, 0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn first_letter_operations() {
        let g = a2();
        let x = d(&g, &[1, 2, 1], &[1, 0, 0]);
        assert_eq!(x.eps_star().unwrap(), 1);
        assert_eq!(d(&g, &[1, 2, 1], &[0, 4, 2]).eps_star().unwrap(), 0);
        let y = x.e_star_max().unwrap();
        assert_eq!(y.a(), &[0, 0, 0]);
        assert_eq!(y.e_star_max().unwrap(), y);
        let drop = &x.weight(&g).unwrap() - &y.weight(&g).unwrap();
        assert_eq!(drop, RootVec(vec![1, 0]));

        let z = d(&g, &[1, 2, 1], &[0, 0, 1]);
        let t = z.saito_t().unwrap();
        assert_eq!((t.word().to_one_based(), t.a().to_vec()), (vec![2, 1], vec![0, 1]));
        assert_eq!(t.saito_t_inv(&g, 0).unwrap(), z);
        assert!(matches!(x.saito_t(), Err(Error::PreconditionViolated(_))));
        assert!(matches!(t.saito_t_inv(&g, 1), Err(Error::NonReducedWord { .. })));
        let empty = LusztigDatum::zero(&g, WeylWord::empty()).unwrap();
        assert_eq!(empty.eps_star(), Err(Error::EmptyWord));
    }

    #[test]
    fn three_move_examples() {
        let g = a2();
        let m = d(&g, &[1, 2, 1], &[1, 0, 0]).transition_3move(&g, 0).unwrap();
        assert_eq!((m.word().to_one_based(), m.a().to_vec()), (vec![2, 1, 2], vec![0, 0, 1]));
        assert_eq!(d(&g, &[1, 2, 1], &[1, 0, 1]).transition_3move(&g, 0).unwrap().a(), &[0, 1, 0]);
        assert_eq!(d(&g, &[1, 2, 1], &[0, 0, 0]).transition_3move(&g, 0).unwrap().a(), &[0, 0, 0]);
        assert_eq!(
            d(&g, &[1, 2, 1], &[0, 0, 0]).transition_3move(&g, 1),
            Err(Error::InvalidMovePosition(1))
        );
        assert!(transition_self_test().is_ok());
    }

    #[test]
    fn two_move() {
        let g = CartanGraph::new(2, &[]).unwrap();
        let m = d(&g, &[1, 2], &[3, 5]).transition_2move(&g, 0).unwrap();
        assert_eq!((m.word().to_one_based(), m.a().to_vec()), (vec![2, 1], vec![5, 3]));
    }

    #[test]
    fn equality() {
        let g = a2();
        let x = d(&g, &[1, 2, 1], &[1, 0, 0]);
        assert!(equal(&g, &x, &x, 100).unwrap());
        assert!(equal(&g, &x, &d(&g, &[2, 1, 2], &[0, 0, 1]), 100).unwrap());
        // same weight α_1 + α_2, different elements
        assert!(!equal(&g, &d(&g, &[1, 2, 1], &[0, 1, 0]), &d(&g, &[1, 2, 1], &[1, 0, 1]), 100).unwrap());
        assert_eq!(
            equal(&g, &x, &d(&g, &[1, 2], &[0, 0]), 100),
            Err(Error::DifferentWeylElement)
        );
        let cache = ReducedWordCache::new(g.clone(), 100);
        let c = canonical(&cache, &d(&g, &[2, 1, 2], &[0, 0, 1])).unwrap();
        assert_eq!(c, x);
    }

    #[test]
    fn chain() {
        let g = a2();
        let z = extraction_chain(&d(&g, &[1, 2, 1], &[0, 0, 0]));
        assert_eq!(z.exponents(), vec![0, 0, 0]);
        let c = extraction_chain(&d(&g, &[1, 2, 1], &[1, 1, 1]));
        assert_eq!(c.exponents(), vec![1, 1, 1]);
        assert_eq!(c.t_steps(), 3);
        assert_eq!(c.steps[0], ChainStep::EStarMax { vertex: 1, exponent: 1 });
        assert_eq!(c.steps[3], ChainStep::SaitoT { vertex: 2 });
    }

    #[test]
    fn datum_file_round_trip() {
        let g = a2();
        let x = d(&g, &[1, 2, 1], &[2, 0, 1]);
        let json = serde_json::to_string(&x.to_file()).unwrap();
        assert!(json.contains("application-order"));
        let back: DatumFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_datum(&g).unwrap(), x);
    }

    fn a3_long() -> WeylWord {
        w(&[1, 2, 1, 3, 2, 1])
    }

    proptest! {
        #[test]
        fn moves_preserve_weight_and_are_involutions(a in proptest::collection::vec(0u64..5, 6)) {
            let g = CartanGraph::type_a(3);
            let x = LusztigDatum::new(&g, a3_long(), a).unwrap();
            for m in braid_moves(&g, x.word()).unwrap() {
                let y = x.transition(&g, m.position, m.kind).unwrap();
                prop_assert_eq!(y.weight(&g).unwrap(), x.weight(&g).unwrap());
                let back = y.transition(&g, m.position, m.kind).unwrap();
                prop_assert_eq!(back, x.clone());
            }
        }

        #[test]
        fn star_operations(a in proptest::collection::vec(0u64..5, 6)) {
            let g = CartanGraph::type_a(3);
            let x = LusztigDatum::new(&g, a3_long(), a.clone()).unwrap();
            let e = x.e_star_max().unwrap();
            prop_assert_eq!(e.eps_star().unwrap(), 0);
            prop_assert_eq!(e.e_star_max().unwrap(), e.clone());
            let t = e.saito_t().unwrap();
            prop_assert_eq!(t.saito_t_inv(&g, x.word().letters()[0]).unwrap(), e);
            let c = extraction_chain(&x);
            prop_assert_eq!(c.exponents(), a);
            prop_assert_eq!(c.t_steps(), 6);
            // moves away from the first letter commute with the star statistics
            for m in braid_moves(&g, x.word()).unwrap().into_iter().filter(|m| m.position >= 1) {
                let y = x.transition(&g, m.position, m.kind).unwrap();
                prop_assert_eq!(y.eps_star().unwrap(), x.eps_star().unwrap());
                let ey = x.e_star_max().unwrap().transition(&g, m.position, m.kind).unwrap();
                prop_assert_eq!(y.e_star_max().unwrap(), ey);
            }
        }

        #[test]
        fn equality_is_transport_invariant(a in proptest::collection::vec(0u64..3, 6)) {
            let g = CartanGraph::type_a(3);
            let x = LusztigDatum::new(&g, a3_long(), a).unwrap();
            let cache = ReducedWordCache::new(g.clone(), 64);
            let words = cache.words(x.word()).unwrap();
            prop_assert_eq!(words.len(), 16);
            for target in words.iter() {
                let y = transport(&g, &x, target, 64).unwrap();
                prop_assert!(equal(&g, &y, &x, 64).unwrap());
                prop_assert_eq!(canonical(&cache, &y).unwrap(), canonical(&cache, &x).unwrap());
            }
        }
    }
}
