//! Cartan data of a loop-free multigraph: roots, weights, Weyl words,
//! positive-root sequences and braid moves.
//!
//! Vertices are 0-based in the API and 1-based in every serialized form.
//!
//! Words are stored in *application order*: `letters[0]` is the first simple
//! reflection applied, so the word `(i_1, ..., i_r)` stands for the element
//! `s_{i_r} ... s_{i_1}`. Display order that lists the last-applied
//! reflection first is obtained with [`WeylWord::display_order`].

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite loop-free multigraph with a chosen orientation per edge.
///
/// The orientation only fixes the signs of the preprojective relations; the
/// Cartan matrix does not depend on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CartanGraph {
    n: usize,
    /// Oriented edges `(tail, head)`.
    edges: Vec<(usize, usize)>,
    cartan: Vec<Vec<i64>>,
}

/// One arrow of the double quiver. Arrow `2e` follows edge `e`'s orientation
/// and has sign `+1`; arrow `2e + 1` is its reverse with sign `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: usize,
    pub edge: usize,
    pub source: usize,
    pub target: usize,
    pub sign: i64,
}

impl Arrow {
    /// Id of the opposite arrow.
    pub fn reverse_id(&self) -> usize {
        self.id ^ 1
    }
}

impl CartanGraph {
    /// Builds a graph from unordered edges, orienting each from the smaller to
    /// the larger vertex index.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let oriented = edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect::<Vec<_>>();
        Self::with_orientation(n, oriented)
    }

    /// Builds a graph whose edge `k` is oriented `edges[k].0 -> edges[k].1`.
    pub fn with_orientation(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut cartan = vec![vec![0i64; n]; n];
        for (i, row) in cartan.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(a, b) in &edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::InvalidVertex { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::Loop(a));
            }
            cartan[a][b] -= 1;
            cartan[b][a] -= 1;
        }
        Ok(CartanGraph { n, edges, cartan })
    }

    /// Path `1 - 2 - ... - n`.
    pub fn type_a(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path graph is valid")
    }

    /// `D_n` (n >= 4) with the branch at vertex 2 for `D_4`: edges
    /// `{1,2}, {2,3}, {2,4}`. For larger `n` the tail continues from vertex 4.
    pub fn type_d(n: usize) -> Self {
        assert!(n >= 4, "D_n needs n >= 4");
        let mut edges = vec![(0, 1), (1, 2), (1, 3)];
        edges.extend((4..n).map(|i| (i - 1, i)));
        Self::new(n, &edges).expect("D graph is valid")
    }

    /// Two vertices joined by two edges (the Kronecker graph).
    pub fn affine_a1() -> Self {
        Self::new(2, &[(0, 1), (0, 1)]).expect("Kronecker graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Number of edges joining `i` and `j`.
    pub fn multiplicity(&self, i: usize, j: usize) -> usize {
        if i == j {
            0
        } else {
            (-self.cartan[i][j]) as usize
        }
    }

    pub fn check_vertex(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: i, n: self.n })
        }
    }

    pub fn arrow_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn arrow(&self, id: usize) -> Arrow {
        let edge = id / 2;
        let (tail, head) = self.edges[edge];
        if id.is_multiple_of(2) {
            Arrow { id, edge, source: tail, target: head, sign: 1 }
        } else {
            Arrow { id, edge, source: head, target: tail, sign: -1 }
        }
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arrow> + '_ {
        (0..self.arrow_count()).map(move |id| self.arrow(id))
    }

    /// Arrows ending at `i`, in id order.
    pub fn arrows_into(&self, i: usize) -> Vec<Arrow> {
        self.arrows().filter(|a| a.target == i).collect()
    }

    /// True when the graph is a disjoint union of simply-laced Dynkin
    /// diagrams, i.e. the Cartan matrix is positive definite.
    pub fn is_finite_type(&self) -> bool {
        // Sylvester's criterion on leading principal minors, computed exactly
        // by fraction-free elimination.
        let n = self.n;
        let mut m: Vec<Vec<i128>> = self
            .cartan
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut prev = 1i128;
        for k in 0..n {
            if m[k][k] <= 0 {
                return false;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
            }
            prev = m[k][k];
        }
        true
    }
}

/// An integer vector in the simple-root basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootVec(pub Vec<i64>);

/// An integer vector in the fundamental-weight basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

macro_rules! lattice_vec {
    ($t:ident) => {
        impl $t {
            pub fn zero(n: usize) -> Self {
                $t(vec![0; n])
            }
            pub fn basis(n: usize, i: usize) -> Self {
                let mut v = vec![0; n];
                v[i] = 1;
                $t(v)
            }
            pub fn coeffs(&self) -> &[i64] {
                &self.0
            }
            pub fn len(&self) -> usize {
                self.0.len()
            }
            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&c| c == 0)
            }
            pub fn scale(&self, k: i64) -> Self {
                $t(self.0.iter().map(|c| c * k).collect())
            }
        }

        impl Add for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                $t(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
            }
        }

        impl Sub for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                $t(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
            }
        }

        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                $t(self.0.iter().map(|a| -a).collect())
            }
        }
    };
}

lattice_vec!(RootVec);
lattice_vec!(Weight);

impl RootVec {
    /// All coefficients nonnegative and at least one positive.
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 0) && self.0.iter().any(|&c| c > 0)
    }
}

impl fmt::Display for RootVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match c {
                1 => format!("a{}", i + 1),
                -1 => format!("-a{}", i + 1),
                _ => format!("{c}a{}", i + 1),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
        }
    }
}

/// A word in the simple reflections, stored in application order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeylWord(pub Vec<usize>);

impl WeylWord {
    pub fn new(letters: Vec<usize>) -> Self {
        WeylWord(letters)
    }

    pub fn empty() -> Self {
        WeylWord(Vec::new())
    }

    /// Parses 1-based letters given in application order.
    pub fn from_one_based(letters: &[usize]) -> Result<Self> {
        letters
            .iter()
            .map(|&l| {
                l.checked_sub(1)
                    .ok_or_else(|| Error::Parse("vertex labels are 1-based".into()))
            })
            .collect::<Result<Vec<_>>>()
            .map(WeylWord)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|l| l + 1).collect()
    }

    /// 1-based letters with the last applied reflection first.
    pub fn display_order(&self) -> Vec<usize> {
        self.0.iter().rev().map(|l| l + 1).collect()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word applying `self` and then `letter`.
    pub fn then(&self, letter: usize) -> WeylWord {
        let mut v = self.0.clone();
        v.push(letter);
        WeylWord(v)
    }

    /// Word of the inverse element.
    pub fn reversed(&self) -> WeylWord {
        WeylWord(self.0.iter().rev().copied().collect())
    }

    /// Drops the first `k` applied letters.
    pub fn suffix(&self, k: usize) -> WeylWord {
        WeylWord(self.0[k..].to_vec())
    }

    pub fn validate(&self, g: &CartanGraph) -> Result<()> {
        self.0.iter().try_for_each(|&i| g.check_vertex(i))
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.to_one_based().iter().map(|l| l.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

fn check_len(g: &CartanGraph, len: usize) -> Result<()> {
    if len == g.vertex_count() {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected: g.vertex_count(), found: len })
    }
}

/// `s_i(v) = v - <v, α_i^∨> α_i`.
pub fn reflect_root(g: &CartanGraph, i: usize, v: &RootVec) -> Result<RootVec> {
    g.check_vertex(i)?;
    check_len(g, v.len())?;
    let mut out = v.clone();
    reflect_root_in_place(g, i, &mut out.0);
    Ok(out)
}

fn reflect_root_in_place(g: &CartanGraph, i: usize, v: &mut [i64]) {
    let pairing: i64 = (0..g.n).map(|j| g.cartan[i][j] * v[j]).sum();
    v[i] -= pairing;
}

/// `s_i(λ) = λ - λ_i α_i`, expressed in the fundamental-weight basis.
pub fn reflect_weight(g: &CartanGraph, i: usize, w: &Weight) -> Result<Weight> {
    g.check_vertex(i)?;
    check_len(g, w.len())?;
    let li = w.0[i];
    Ok(Weight(
        w.0.iter().enumerate().map(|(j, &x)| x - li * g.cartan[i][j]).collect(),
    ))
}

/// Applies the whole word to a root.
pub fn act_on_root(g: &CartanGraph, w: &WeylWord, v: &RootVec) -> Result<RootVec> {
    w.validate(g)?;
    check_len(g, v.len())?;
    let mut out = v.clone();
    for &i in w.letters() {
        reflect_root_in_place(g, i, &mut out.0);
    }
    Ok(out)
}

/// Applies the whole word to a weight.
pub fn act_on_weight(g: &CartanGraph, w: &WeylWord, lambda: &Weight) -> Result<Weight> {
    w.validate(g)?;
    let mut out = lambda.clone();
    for &i in w.letters() {
        out = reflect_weight(g, i, &out)?;
    }
    Ok(out)
}

/// Expresses a root-lattice vector in the weight basis: `α_j = Σ_i A_ij ϖ_i`.
pub fn root_to_weight(g: &CartanGraph, v: &RootVec) -> Weight {
    Weight(
        (0..g.n)
            .map(|i| (0..g.n).map(|j| g.cartan[i][j] * v.0[j]).sum())
            .collect(),
    )
}

/// `λ - wλ` in the root basis.
///
/// Tracks `wλ = λ - μ` step by step, so no inverse Cartan matrix is needed and
/// the computation is valid for singular (affine) Cartan matrices.
pub fn weight_drop(g: &CartanGraph, w: &WeylWord, lambda: &Weight) -> Result<RootVec> {
    w.validate(g)?;
    check_len(g, lambda.len())?;
    let mut mu = vec![0i64; g.n];
    for &i in w.letters() {
        let pairing: i64 = (0..g.n).map(|j| g.cartan[i][j] * mu[j]).sum();
        mu[i] += lambda.0[i] - pairing;
    }
    Ok(RootVec(mu))
}

/// `β_k = s_{i_1} ... s_{i_{k-1}}(α_{i_k})` for `k = 1..r`.
pub fn beta_sequence(g: &CartanGraph, w: &WeylWord) -> Result<Vec<RootVec>> {
    w.validate(g)?;
    let letters = w.letters();
    let mut out = Vec::with_capacity(letters.len());
    for (k, &ik) in letters.iter().enumerate() {
        let mut v = vec![0i64; g.n];
        v[ik] = 1;
        for &m in letters[..k].iter().rev() {
            reflect_root_in_place(g, m, &mut v);
        }
        let beta = RootVec(v);
        if !beta.is_positive() {
            return Err(Error::NonReducedWord { position: k + 1 });
        }
        out.push(beta);
    }
    Ok(out)
}

pub fn is_reduced(g: &CartanGraph, w: &WeylWord) -> bool {
    beta_sequence(g, w).is_ok()
}

/// `μ(a) = Σ_k a_k β_k`.
pub fn mu(g: &CartanGraph, w: &WeylWord, a: &[u64]) -> Result<RootVec> {
    if a.len() != w.len() {
        return Err(Error::LengthMismatch { expected: w.len(), found: a.len() });
    }
    let betas = beta_sequence(g, w)?;
    let mut acc = RootVec::zero(g.n);
    for (beta, &ak) in betas.iter().zip(a) {
        acc = &acc + &beta.scale(ak as i64);
    }
    Ok(acc)
}

/// Key identifying a Weyl group element: its action on the weight
/// `ρ = Σ ϖ_i`, whose stabilizer is trivial.
pub fn weyl_key(g: &CartanGraph, w: &WeylWord) -> Result<Vec<i64>> {
    let rho = Weight(vec![1; g.n]);
    Ok(act_on_weight(g, w, &rho)?.0)
}

pub fn same_element(g: &CartanGraph, a: &WeylWord, b: &WeylWord) -> Result<bool> {
    Ok(weyl_key(g, a)? == weyl_key(g, b)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    /// `(i, j) -> (j, i)` for non-adjacent `i, j`.
    Commute,
    /// `(i, j, i) -> (j, i, j)` for `i, j` joined by exactly one edge.
    Braid,
}

/// A braid move applicable to a word. `position` is the 0-based index of
/// the first affected letter in application order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidMove {
    pub position: usize,
    pub kind: MoveKind,
    pub word: WeylWord,
}

fn raw_moves(g: &CartanGraph, w: &WeylWord) -> Vec<BraidMove> {
    let l = w.letters();
    let mut out = Vec::new();
    for p in 0..l.len() {
        if p + 1 < l.len() && l[p] != l[p + 1] && g.cartan(l[p], l[p + 1]) == 0 {
            let mut v = l.to_vec();
            v.swap(p, p + 1);
            out.push(BraidMove { position: p, kind: MoveKind::Commute, word: WeylWord(v) });
        }
        if p + 2 < l.len() && l[p] == l[p + 2] && l[p] != l[p + 1] && g.cartan(l[p], l[p + 1]) == -1
        {
            let mut v = l.to_vec();
            let (i, j) = (l[p], l[p + 1]);
            v[p] = j;
            v[p + 1] = i;
            v[p + 2] = j;
            out.push(BraidMove { position: p, kind: MoveKind::Braid, word: WeylWord(v) });
        }
    }
    out
}

/// All commutation and braid moves applicable to a reduced word.
pub fn braid_moves(g: &CartanGraph, w: &WeylWord) -> Result<Vec<BraidMove>> {
    beta_sequence(g, w)?;
    Ok(raw_moves(g, w))
}

/// Closure of `{w}` under braid moves, sorted. Errors if more than `cap`
/// words are found.
pub fn reduced_words(g: &CartanGraph, w: &WeylWord, cap: usize) -> Result<Vec<WeylWord>> {
    beta_sequence(g, w)?;
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(w.clone());
    queue.push_back(w.clone());
    while let Some(cur) = queue.pop_front() {
        for mv in raw_moves(g, &cur) {
            if seen.insert(mv.word.clone()) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
                queue.push_back(mv.word);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Every Weyl group element of length at most `max_len`, each represented by
/// its lexicographically least reduced word, in order of length.
pub fn elements_up_to(g: &CartanGraph, max_len: usize) -> Vec<WeylWord> {
    let mut by_key: HashMap<Vec<i64>, WeylWord> = HashMap::new();
    let id = WeylWord::empty();
    by_key.insert(weyl_key(g, &id).expect("empty word"), id.clone());
    let mut out = vec![id.clone()];
    let mut layer = vec![id];
    for _ in 0..max_len {
        let mut next: HashMap<Vec<i64>, WeylWord> = HashMap::new();
        for w in &layer {
            for i in 0..g.n {
                let cand = w.then(i);
                if !is_reduced(g, &cand) {
                    continue;
                }
                let key = weyl_key(g, &cand).expect("valid word");
                if by_key.contains_key(&key) {
                    continue;
                }
                next.entry(key)
                    .and_modify(|cur| {
                        if cand < *cur {
                            *cur = cand.clone();
                        }
                    })
                    .or_insert(cand);
            }
        }
        if next.is_empty() {
            break;
        }
        let mut fresh: Vec<_> = next.into_iter().collect();
        fresh.sort_by(|a, b| a.1.cmp(&b.1));
        layer = fresh.iter().map(|(_, w)| w.clone()).collect();
        for (k, w) in fresh {
            by_key.insert(k, w.clone());
            out.push(w);
        }
    }
    out
}

/// Greedy reduced word: repeatedly appends the smallest letter that keeps
/// the word reduced, up to `max_len` letters. In finite type with a large
/// enough bound this reaches a word of the longest element.
pub fn greedy_long_word(g: &CartanGraph, max_len: usize) -> WeylWord {
    let mut w = WeylWord::empty();
    while w.len() < max_len {
        match (0..g.n).map(|i| w.then(i)).find(|c| is_reduced(g, c)) {
            Some(next) => w = next,
            None => break,
        }
    }
    w
}

/// Memoized reduced-word sets, one entry per Weyl group element.
///
/// Safe for concurrent readers; each set is built at most once per element
/// (a racing builder's result is discarded in favour of the stored one).
#[derive(Debug)]
pub struct ReducedWordCache {
    graph: CartanGraph,
    cap: usize,
    sets: RwLock<HashMap<Vec<i64>, Arc<Vec<WeylWord>>>>,
}

impl ReducedWordCache {
    pub fn new(graph: CartanGraph, cap: usize) -> Self {
        ReducedWordCache { graph, cap, sets: RwLock::new(HashMap::new()) }
    }

    pub fn graph(&self) -> &CartanGraph {
        &self.graph
    }

    pub fn words(&self, w: &WeylWord) -> Result<Arc<Vec<WeylWord>>> {
        let key = weyl_key(&self.graph, w)?;
        if let Some(set) = self.sets.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(set));
        }
        let set = Arc::new(reduced_words(&self.graph, w, self.cap)?);
        let mut guard = self.sets.write().expect("cache lock");
        Ok(Arc::clone(guard.entry(key).or_insert(set)))
    }

    /// Lexicographically least reduced word of the element.
    pub fn canonical(&self, w: &WeylWord) -> Result<WeylWord> {
        Ok(self.words(w)?[0].clone())
    }
}

/// JSON graph file: `{"vertices": n, "edges": [[i,j],...], "orientation": [[i,j],...]}`
/// with 1-based vertices. When present, `orientation[k]` must be edge `k`
/// in some direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Vec<[usize; 2]>>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<CartanGraph> {
        let zero_based = |[a, b]: [usize; 2]| -> Result<(usize, usize)> {
            if a == 0 || b == 0 {
                return Err(Error::InvalidGraph("vertices are 1-based".into()));
            }
            Ok((a - 1, b - 1))
        };
        let edges = self.edges.iter().map(|&e| zero_based(e)).collect::<Result<Vec<_>>>()?;
        match &self.orientation {
            None => CartanGraph::new(self.vertices, &edges),
            Some(orient) => {
                if orient.len() != edges.len() {
                    return Err(Error::InvalidGraph(format!(
                        "{} orientations for {} edges",
                        orient.len(),
                        edges.len()
                    )));
                }
                let mut oriented = Vec::with_capacity(edges.len());
                for (k, (&e, &o)) in edges.iter().zip(orient).enumerate() {
                    let o = zero_based(o)?;
                    if (o.0, o.1) != e && (o.1, o.0) != e {
                        return Err(Error::InvalidGraph(format!(
                            "orientation {} does not match edge {}",
                            k + 1,
                            k + 1
                        )));
                    }
                    oriented.push(o);
                }
                CartanGraph::with_orientation(self.vertices, oriented)
            }
        }
    }

    pub fn from_graph(g: &CartanGraph) -> Self {
        let edges = g.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect::<Vec<_>>();
        let default = g.edges().iter().all(|&(a, b)| a < b);
        GraphFile {
            vertices: g.vertex_count(),
            orientation: if default { None } else { Some(edges.clone()) },
            edges,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[usize]) -> WeylWord {
        WeylWord::from_one_based(letters).unwrap()
    }

    fn r(v: &[i64]) -> RootVec {
        RootVec(v.to_vec())
    }

    #[test]
    fn reflect_root_examples() {
        let a2 = CartanGraph::type_a(2);
        assert_eq!(reflect_root(&a2, 0, &r(&[1, 0])).unwrap(), r(&[-1, 0]));
        assert_eq!(reflect_root(&a2, 0, &r(&[0, 1])).unwrap(), r(&[1, 1]));
        let aff = CartanGraph::affine_a1();
        assert_eq!(reflect_root(&aff, 0, &r(&[0, 1])).unwrap(), r(&[2, 1]));
        assert!(matches!(
            reflect_root(&a2, 2, &r(&[1, 0])),
            Err(Error::InvalidVertex { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn reflect_weight_examples() {
        let a2 = CartanGraph::type_a(2);
        let w1 = Weight(vec![1, 0]);
        let w2 = Weight(vec![0, 1]);
        assert_eq!(reflect_weight(&a2, 0, &w2).unwrap(), w2);
        // ϖ_1 - α_1 with α_1 = 2ϖ_1 - ϖ_2
        assert_eq!(reflect_weight(&a2, 0, &w1).unwrap(), Weight(vec![-1, 1]));
        // s_1 s_2 ϖ_2 = ϖ_2 - α_1 - α_2: applied letters (2, 1)
        let got = act_on_weight(&a2, &w(&[2, 1]), &w2).unwrap();
        let expected = &w2 - &root_to_weight(&a2, &r(&[1, 1]));
        assert_eq!(got, expected);
        assert_eq!(weight_drop(&a2, &w(&[2, 1]), &w2).unwrap(), r(&[1, 1]));
        // s_2 s_1 ϖ_2 = s_2 ϖ_2 = ϖ_2 - α_2
        assert_eq!(weight_drop(&a2, &w(&[1, 2]), &w2).unwrap(), r(&[0, 1]));
    }

    #[test]
    fn beta_sequence_examples() {
        let a2 = CartanGraph::type_a(2);
        assert_eq!(
            beta_sequence(&a2, &w(&[1, 2, 1])).unwrap(),
            vec![r(&[1, 0]), r(&[1, 1]), r(&[0, 1])]
        );
        assert_eq!(beta_sequence(&a2, &w(&[2])).unwrap(), vec![r(&[0, 1])]);
        assert_eq!(
            beta_sequence(&a2, &w(&[1, 2, 1, 2])),
            Err(Error::NonReducedWord { position: 4 })
        );
    }

    #[test]
    fn reducedness_examples() {
        let a2 = CartanGraph::type_a(2);
        assert!(is_reduced(&a2, &w(&[1, 2, 1])));
        assert!(!is_reduced(&a2, &w(&[1, 1])));
        assert!(is_reduced(&CartanGraph::affine_a1(), &w(&[1, 2, 1, 2, 1, 2])));
        assert!(is_reduced(&a2, &WeylWord::empty()));
    }

    #[test]
    fn mu_examples() {
        let a2 = CartanGraph::type_a(2);
        let word = w(&[1, 2, 1]);
        assert_eq!(mu(&a2, &word, &[1, 1, 1]).unwrap(), r(&[2, 2]));
        assert_eq!(mu(&a2, &word, &[0, 0, 0]).unwrap(), r(&[0, 0]));
        assert_eq!(mu(&a2, &word, &[0, 0, 1]).unwrap(), r(&[0, 1]));
        assert!(matches!(mu(&a2, &word, &[1]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn braid_move_examples() {
        let a2 = CartanGraph::type_a(2);
        let moves = braid_moves(&a2, &w(&[1, 2, 1])).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].kind, MoveKind::Braid);
        assert_eq!(moves[0].word, w(&[2, 1, 2]));

        let a1a1 = CartanGraph::new(2, &[]).unwrap();
        let moves = braid_moves(&a1a1, &w(&[1, 2])).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].kind, MoveKind::Commute);
        assert_eq!(moves[0].word, w(&[2, 1]));

        assert!(braid_moves(&CartanGraph::affine_a1(), &w(&[1, 2, 1])).unwrap().is_empty());
    }

    #[test]
    fn reduced_word_examples() {
        let a2 = CartanGraph::type_a(2);
        assert_eq!(
            reduced_words(&a2, &w(&[1, 2, 1]), 10).unwrap(),
            vec![w(&[1, 2, 1]), w(&[2, 1, 2])]
        );
        assert_eq!(reduced_words(&a2, &w(&[2]), 10).unwrap(), vec![w(&[2])]);
        let a3 = CartanGraph::type_a(3);
        let long = greedy_long_word(&a3, 100);
        assert_eq!(long.len(), 6);
        assert_eq!(reduced_words(&a3, &long, 100).unwrap().len(), 16);
        assert_eq!(reduced_words(&a3, &long, 10), Err(Error::CapExceeded { cap: 10 }));
    }

    #[test]
    fn element_enumeration_counts() {
        assert_eq!(elements_up_to(&CartanGraph::type_a(2), 10).len(), 6);
        assert_eq!(elements_up_to(&CartanGraph::type_a(3), 10).len(), 24);
        assert_eq!(elements_up_to(&CartanGraph::type_d(4), 20).len(), 192);
        // affine A1: two elements of each positive length
        assert_eq!(elements_up_to(&CartanGraph::affine_a1(), 6).len(), 13);
    }

    #[test]
    fn finite_type_detection() {
        assert!(CartanGraph::type_a(3).is_finite_type());
        assert!(CartanGraph::type_d(4).is_finite_type());
        assert!(!CartanGraph::affine_a1().is_finite_type());
        // affine D4: star with four leaves
        let d4_aff = CartanGraph::new(5, &[(0, 1), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert!(!d4_aff.is_finite_type());
    }

    #[test]
    fn graph_file_round_trip_and_errors() {
        let f: GraphFile =
            serde_json::from_str(r#"{"vertices": 3, "edges": [[1,2],[3,2]]}"#).unwrap();
        let g = f.to_graph().unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        let f: GraphFile = serde_json::from_str(
            r#"{"vertices": 2, "edges": [[1,2]], "orientation": [[2,1]]}"#,
        )
        .unwrap();
        let g = f.to_graph().unwrap();
        assert_eq!(g.edges(), &[(1, 0)]);
        assert_eq!(GraphFile::from_graph(&g).to_graph().unwrap(), g);
        let bad: GraphFile = serde_json::from_str(r#"{"vertices": 2, "edges": [[1,1]]}"#).unwrap();
        assert_eq!(bad.to_graph(), Err(Error::Loop(0)));
    }

    #[test]
    fn cache_is_shared() {
        let cache = ReducedWordCache::new(CartanGraph::type_a(2), 16);
        let a = cache.words(&w(&[1, 2, 1])).unwrap();
        let b = cache.words(&w(&[2, 1, 2])).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.canonical(&w(&[2, 1, 2])).unwrap(), w(&[1, 2, 1]));
    }
}
