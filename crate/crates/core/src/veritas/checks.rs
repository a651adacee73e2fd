use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::crystal::{extraction_chain, LusztigDatum};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::prepmod::{
    counit_from_sigma_star_sigma, exact_at_middle, is_iso_with, m_module, m_partial_products, n_hat, n_module,
    random_extension, samples_for_bound, sigma_map, sigma_signed, sigma_star, sigma_star_map,
    sigma_star_signed, unit_to_sigma_sigma_star, v_module, v_module_by_socle_chain, Extension, IsoOutcome,
    ModuleDump, PModule, ReflectionSign, Route, StratumSampler, RETRY_BUDGET,
};
use crate::rootsys::{
    beta_sequence, braid_moves, elements_up_to, is_reduced, mu, reduced_words, reflect_root, weight_drop, weyl_key,
    CartanGraph, GraphFile, Weight, WeylWord,
};

use super::report::{CheckParams, CheckReport, Outcome, Witness, MAX_FAILURE_MESSAGES};

/// Target for the per-instance false-negative probability of `is_iso`.
pub const ISO_LOG2_TARGET: f64 = -40.0;

/// Cap on reduced-word closures enumerated by the harness.
pub const WORD_CAP: usize = 100_000;

/// First-try success rate required of sampling-based oracles.
pub const MIN_SUCCESS_RATE: f64 = 0.99;

/// Seed for item `index` of a job seeded with `seed` (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shared inputs of one check job.
#[derive(Debug, Clone)]
pub struct CheckContext<F: Field> {
    pub graph: Arc<CartanGraph>,
    pub field: F,
    pub master_seed: u64,
    pub job_seed: u64,
}

impl<F: Field> CheckContext<F> {
    pub fn new(graph: CartanGraph, field: F, master_seed: u64, job_seed: u64) -> Self {
        CheckContext { graph: Arc::new(graph), field, master_seed, job_seed }
    }

    fn params(&self) -> CheckParams {
        CheckParams {
            graph: GraphFile::from_graph(&self.graph),
            field: self.field.descriptor(),
            master_seed: self.master_seed,
            job_seed: self.job_seed,
            word: None,
            bound: None,
            samples: None,
            corpus: None,
            max_dim: None,
            maxlen: None,
            mutation: None,
        }
    }

    fn item_rng(&self, index: usize) -> (u64, ChaCha8Rng) {
        let seed = derive_seed(self.job_seed, index as u64);
        (seed, ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Result of one independent item of a check.
#[derive(Debug, Default)]
struct Item {
    failures: Vec<String>,
    witness: Option<Witness>,
    counts: BTreeMap<&'static str, u64>,
}

impl Item {
    fn bump(&mut self, key: &'static str, by: u64) {
        *self.counts.entry(key).or_default() += by;
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records `e` as a failure unless it is `Ok`.
    fn guard<T>(&mut self, what: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{what}: {e}"));
                None
            }
        }
    }
}

fn empty_report(id: &str, statement: &str, params: CheckParams) -> CheckReport {
    CheckReport {
        id: id.to_string(),
        statement: statement.to_string(),
        params,
        outcome: Outcome::Pass,
        stats: BTreeMap::new(),
        failures: Vec::new(),
        witness: None,
        elapsed_ms: None,
    }
}

/// Merges items in order; the first failing item supplies the witness.
fn finish(mut report: CheckReport, items: Vec<Item>) -> CheckReport {
    let mut counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    let mut failed_items = 0u64;
    for item in items {
        for (k, v) in &item.counts {
            *counts.entry(k).or_default() += *v;
        }
        if !item.ok() {
            failed_items += 1;
            if report.witness.is_none() {
                report.witness = item.witness;
            }
            for f in item.failures {
                if report.failures.len() < MAX_FAILURE_MESSAGES {
                    report.failures.push(f);
                }
            }
        }
    }
    for (k, v) in counts {
        report.stat(k, v);
    }
    report.stat("failed_items", failed_items);
    if failed_items > 0 {
        report.outcome = Outcome::Fail;
    }
    report
}

fn unit_vec(n: usize, i: usize) -> Vec<usize> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn iso_samples<F: Field>(m: &PModule<F>) -> usize {
    samples_for_bound(m.field(), m.total_dim(), ISO_LOG2_TARGET).min(1 << 16)
}

fn iso_check<F: Field, R: Rng + ?Sized>(
    item: &mut Item,
    what: &str,
    a: &PModule<F>,
    b: &PModule<F>,
    rng: &mut R,
) -> bool {
    match is_iso_with(a, b, iso_samples(a), rng) {
        Ok(IsoOutcome::Iso(_)) => {
            item.bump("iso_witnessed", 1);
            true
        }
        Ok(IsoOutcome::Distinct) => {
            item.fail(format!("{what}: not isomorphic (dims {:?} vs {:?})", a.dims(), b.dims()));
            false
        }
        Ok(IsoOutcome::ProbablyDistinct { log2_bound, samples }) => {
            item.fail(format!("{what}: no isomorphism in {samples} samples (false-negative ≤ 2^{log2_bound:.1})"));
            false
        }
        Err(e) => {
            item.fail(format!("{what}: {e}"));
            false
        }
    }
}

fn word_json(w: &WeylWord) -> Value {
    json!(w.to_one_based())
}

// ---------------------------------------------------------------- roots

fn reflection_matrix(g: &CartanGraph, i: usize) -> Vec<Vec<i64>> {
    let n = g.vertex_count();
    let mut m: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| i64::from(r == c)).collect()).collect();
    for (c, entry) in m[i].iter_mut().enumerate() {
        *entry -= g.cartan(i, c);
    }
    m
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|r| (0..n).map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum()).collect())
        .collect()
}

/// β-sequence and reducedness against matrix-product and breadth-first
/// length oracles, over every word of length at most `maxlen`.
pub fn check_roots<F: Field>(ctx: &CheckContext<F>, maxlen: usize) -> CheckReport {
    let g = &*ctx.graph;
    let n = g.vertex_count();
    let mut params = ctx.params();
    params.maxlen = Some(maxlen);
    let report = empty_report(
        "roots",
        "β-sequence equals products of reflection matrices applied to simple roots; a word is reduced iff its β-sequence is positive",
        params,
    );

    // element lengths by breadth-first search on the Cayley graph
    let mut length: HashMap<Vec<i64>, usize> = HashMap::new();
    let id = WeylWord::empty();
    length.insert(weyl_key(g, &id).expect("empty word"), 0);
    let mut frontier = vec![id];
    for l in 1..=maxlen {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..n {
                let cand = w.then(i);
                let key = weyl_key(g, &cand).expect("valid letters");
                if let std::collections::hash_map::Entry::Vacant(e) = length.entry(key) {
                    e.insert(l);
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }
    let refl: Vec<_> = (0..n).map(|i| reflection_matrix(g, i)).collect();

    let mut items = Vec::new();
    let mut words = vec![WeylWord::empty()];
    let mut total = 1u64;
    for _ in 0..maxlen {
        let mut next = Vec::with_capacity(words.len() * n);
        for w in &words {
            for i in 0..n {
                next.push(w.then(i));
            }
        }
        total += next.len() as u64;
        let chunk: Vec<Item> = next
            .par_iter()
            .map(|w| {
                let mut item = Item::default();
                let key = weyl_key(g, w).expect("valid letters");
                let reduced_by_length = length.get(&key) == Some(&w.len());
                if reduced_by_length != is_reduced(g, w) {
                    item.fail(format!("word {:?}: reducedness disagrees with length oracle", w.to_one_based()));
                }
                if reduced_by_length {
                    item.bump("reduced_words", 1);
                    let betas = beta_sequence(g, w).unwrap_or_default();
                    let mut prod: Vec<Vec<i64>> =
                        (0..n).map(|r| (0..n).map(|c| i64::from(r == c)).collect()).collect();
                    for (k, &ik) in w.letters().iter().enumerate() {
                        let col: Vec<i64> = (0..n).map(|r| prod[r][ik]).collect();
                        if betas.get(k).map(|b| &b.0) != Some(&col) {
                            item.fail(format!("word {:?}: β_{} differs from oracle {col:?}", w.to_one_based(), k + 1));
                        }
                        prod = mat_mul(&prod, &refl[ik]);
                    }
                }
                if !item.ok() {
                    item.witness = Some(Witness {
                        seed: ctx.job_seed,
                        inputs: json!({ "word": w.to_one_based() }),
                        modules: vec![],
                        data: vec![],
                    });
                }
                item
            })
            .collect();
        items.extend(chunk);
        words = next;
    }
    let mut report = finish(report, items);
    report.stat("words_checked", total);
    report.stat("elements", length.len() as u64);
    report
}

// ---------------------------------------------------------------- reflection contracts

/// Random iterated extension of random simples, total dimension at most
/// `max_dim`; the last extension step is returned alongside.
pub fn random_corpus_module<F: Field, R: Rng + ?Sized>(
    g: &Arc<CartanGraph>,
    field: &F,
    max_dim: usize,
    rng: &mut R,
) -> Result<(PModule<F>, Option<Extension<F>>)> {
    let n = g.vertex_count();
    let target = rng.random_range(1..=max_dim.max(1));
    let mut x = PModule::simple(Arc::clone(g), field.clone(), rng.random_range(0..n))?;
    let mut last = None;
    while x.total_dim() < target {
        let s = PModule::simple(Arc::clone(g), field.clone(), rng.random_range(0..n))?;
        let ext = if rng.random_bool(0.5) { random_extension(&x, &s, rng)? } else { random_extension(&s, &x, rng)? };
        x = ext.middle.clone();
        last = Some(ext);
    }
    Ok((x, last))
}

fn lemma32_item<F: Field, R: Rng + ?Sized>(
    item: &mut Item,
    m: &PModule<F>,
    ext: Option<&Extension<F>>,
    sign: ReflectionSign,
    rng: &mut R,
) {
    let g = m.graph();
    let n = g.vertex_count();
    let dimv = m.dimv();
    let sig = |i: usize, x: &PModule<F>| sigma_signed(i, x, sign);
    let sig_star = |i: usize, x: &PModule<F>| sigma_star_signed(i, x, sign);

    for i in 0..n {
        let Some(s) = item.guard(&format!("Σ_{}", i + 1), sig(i, m)) else { continue };
        let Some(ss) = item.guard(&format!("Σ*_{}", i + 1), sig_star(i, m)) else { continue };
        let soc = m.soc_dim(i).unwrap_or(0);
        let top = m.top_dim(i).unwrap_or(0);
        let reflected = reflect_root(g, i, &dimv).expect("valid vertex");

        // (iv)
        item.bump("dim_law", 1);
        if top == 0 && s.dimv() != reflected {
            item.fail(format!("vertex {}: trivial top but dimv Σ M = {:?} ≠ s_i dimv M", i + 1, s.dims()));
        }
        if soc == 0 && ss.dimv() != reflected {
            item.fail(format!("vertex {}: trivial socle but dimv Σ* M = {:?} ≠ s_i dimv M", i + 1, ss.dims()));
        }
        if sign != ReflectionSign::Standard {
            continue;
        }

        // (ii)
        item.bump("natural_maps", 1);
        match unit_to_sigma_sigma_star(i, m) {
            Ok(u) => {
                if !u.is_surjective() || u.kernel_dims() != unit_vec(n, i).iter().map(|x| x * soc).collect::<Vec<_>>() {
                    item.fail(format!("vertex {}: M → ΣΣ*M is not onto with kernel soc_i", i + 1));
                }
            }
            Err(e) => item.fail(format!("unit at {}: {e}", i + 1)),
        }
        match counit_from_sigma_star_sigma(i, m) {
            Ok(c) => {
                if !c.is_injective() || c.cokernel_dims() != unit_vec(n, i).iter().map(|x| x * top).collect::<Vec<_>>() {
                    item.fail(format!("vertex {}: Σ*ΣM → M is not into with cokernel top_i", i + 1));
                }
            }
            Err(e) => item.fail(format!("counit at {}: {e}", i + 1)),
        }

        // (i)
        if let Some(ext) = ext {
            item.bump("exactness", 1);
            let si = item.guard("Σ on inclusion", sigma_map(i, &ext.inclusion));
            let sp = item.guard("Σ on projection", sigma_map(i, &ext.projection));
            if let (Some(si), Some(sp)) = (si, sp) {
                if !si.is_injective() || !exact_at_middle(&si, &sp) {
                    item.fail(format!("vertex {}: Σ is not left exact on the extension", i + 1));
                }
                let tops = [&ext.inclusion.source, &ext.middle, &ext.projection.target]
                    .iter()
                    .all(|x| x.top_dim(i).unwrap_or(1) == 0);
                if tops && !sp.is_surjective() {
                    item.fail(format!("vertex {}: trivial tops but Σ does not preserve exactness", i + 1));
                }
            }
            let ti = item.guard("Σ* on inclusion", sigma_star_map(i, &ext.inclusion));
            let tp = item.guard("Σ* on projection", sigma_star_map(i, &ext.projection));
            if let (Some(ti), Some(tp)) = (ti, tp) {
                if !tp.is_surjective() || !exact_at_middle(&ti, &tp) {
                    item.fail(format!("vertex {}: Σ* is not right exact on the extension", i + 1));
                }
                let socs = [&ext.inclusion.source, &ext.middle, &ext.projection.target]
                    .iter()
                    .all(|x| x.soc_dim(i).unwrap_or(1) == 0);
                if socs && !ti.is_injective() {
                    item.fail(format!("vertex {}: trivial socles but Σ* does not preserve exactness", i + 1));
                }
            }
        }
    }

    // (iii)
    for i in 0..n {
        for j in i + 1..n {
            let (lhs, rhs): (Vec<usize>, Vec<usize>) = match g.cartan(i, j) {
                0 => (vec![j, i], vec![i, j]),
                -1 => (vec![i, j, i], vec![j, i, j]),
                _ => continue,
            };
            let apply = |item: &mut Item, letters: &[usize]| -> Option<PModule<F>> {
                let mut cur = m.clone();
                for &l in letters {
                    cur = item.guard(&format!("Σ_{}", l + 1), sig(l, &cur))?;
                }
                Some(cur)
            };
            let (Some(a), Some(b)) = (apply(item, &lhs), apply(item, &rhs)) else { continue };
            item.bump("braid_iso", 1);
            iso_check(item, &format!("braid relation at ({}, {})", i + 1, j + 1), &a, &b, rng);
        }
    }
}

fn lemma32_run<F: Field>(ctx: &CheckContext<F>, corpus: usize, max_dim: usize, sign: ReflectionSign) -> Vec<Item> {
    (0..corpus)
        .into_par_iter()
        .map(|k| {
            let (seed, mut rng) = ctx.item_rng(k);
            let mut item = Item::default();
            let Some((m, ext)) = item.guard("corpus", random_corpus_module(&ctx.graph, &ctx.field, max_dim, &mut rng))
            else {
                return item;
            };
            item.bump("modules", 1);
            item.bump("total_dim", m.total_dim() as u64);
            lemma32_item(&mut item, &m, ext.as_ref(), sign, &mut rng);
            if !item.ok() {
                let mut modules = vec![ModuleDump::from_module(&m)];
                if let Some(e) = &ext {
                    modules.push(ModuleDump::from_module(&e.inclusion.source));
                    modules.push(ModuleDump::from_module(&e.projection.target));
                }
                item.witness = Some(Witness { seed, inputs: json!({ "corpus_index": k, "max_dim": max_dim }), modules, data: vec![] });
            }
            item
        })
        .collect()
}

/// Reflection-functor contracts on a random corpus: left/right exactness,
/// the natural maps with kernel `soc_i` and cokernel `top_i`, braid
/// relations up to isomorphism, and the dimension law.
pub fn check_lemma32<F: Field>(ctx: &CheckContext<F>, corpus: usize, max_dim: usize) -> CheckReport {
    let mut params = ctx.params();
    params.corpus = Some(corpus);
    params.max_dim = Some(max_dim);
    let report = empty_report(
        "lemma32",
        "Σ_i is left exact and Σ*_i right exact; M ↠ ΣΣ*M has kernel soc_i and Σ*ΣM ↪ M has cokernel top_i; braid relations hold up to isomorphism; dimv Σ_iM = s_i dimv M when top_i M = 0",
        params,
    );
    if corpus == 0 {
        let mut r = report;
        r.outcome = Outcome::Vacuous { warning: "empty corpus".into() };
        return r;
    }
    let mut r = finish(report, lemma32_run(ctx, corpus, max_dim, ReflectionSign::Standard));
    r.stat("iso_log2_bound", ISO_LOG2_TARGET);
    r
}

/// A flipped twist changes the relation at a neighbour `j` of `i` only
/// through paths leaving `j` towards some other neighbour, so it is
/// detectable iff some vertex has two distinct neighbours.
pub fn sign_mutation_detectable(g: &CartanGraph) -> bool {
    (0..g.vertex_count()).any(|j| (0..g.vertex_count()).filter(|&k| k != j && g.cartan(j, k) != 0).count() >= 2)
}

/// Runs the reflection contracts with the flipped twist; passes iff they fail.
pub fn check_lemma32_mutation<F: Field>(ctx: &CheckContext<F>, corpus: usize, max_dim: usize) -> CheckReport {
    let mut params = ctx.params();
    params.corpus = Some(corpus);
    params.max_dim = Some(max_dim);
    params.mutation = Some(true);
    let base = empty_report(
        "lemma32-mutation",
        "with the twist sign flipped, the reflection contracts must fail",
        params,
    );
    let inner = finish(base.clone(), lemma32_run(ctx, corpus, max_dim, ReflectionSign::Flipped));
    let mut r = base;
    r.stats = inner.stats;
    let detectable = sign_mutation_detectable(&ctx.graph);
    r.stat("detectable", detectable);
    if inner.outcome == Outcome::Fail {
        r.outcome = Outcome::Pass;
        r.stat("mutant_failures", inner.failures.len() as u64);
        r.witness = inner.witness;
        if let Some(f) = inner.failures.first() {
            r.stat("first_mutant_failure", f.clone());
        }
    } else if detectable {
        r.outcome = Outcome::Fail;
        r.failures.push("flipped sign survived the whole corpus".into());
        r.witness = Some(Witness { seed: ctx.job_seed, inputs: json!({ "corpus": corpus }), modules: vec![], data: vec![] });
    } else {
        r.outcome = Outcome::Vacuous {
            warning: "no vertex has two distinct neighbours, so the flipped sign leaves every relation intact".into(),
        };
    }
    r
}

// ---------------------------------------------------------------- families

fn modules_item<F: Field, R: Rng + ?Sized>(item: &mut Item, g: &Arc<CartanGraph>, field: &F, w: &WeylWord, rng: &mut R) {
    let n = g.vertex_count();
    let r = w.len();
    let l = w.letters();

    for j in 0..n {
        let lambda = Weight::basis(n, j);
        let what = format!("N(wϖ_{})", j + 1);
        let Some(nm) = item.guard(&what, n_module(g, field, w, &lambda)) else { continue };
        let expected = weight_drop(g, w, &lambda).expect("reduced word");
        item.bump("n_modules", 1);
        if nm.dimv() != expected {
            item.fail(format!("{what}: dimv {:?}, expected {:?}", nm.dims(), expected.0));
        }
        if !nm.is_zero() && nm.socle_dims() != unit_vec(n, j) {
            item.fail(format!("{what}: socle {:?} is not S_{}", nm.socle_dims(), j + 1));
        }
        let Some(hat) = item.guard(&what, n_hat(g, field, w, &lambda)) else { continue };
        for i in 0..n {
            if is_reduced(g, &w.then(i)) {
                item.bump("hat_tops", 1);
                if hat.top_dim(i).unwrap_or(1) != 0 {
                    item.fail(format!("N̂(wϖ_{}): nontrivial top at {} although ℓ(s_i w) > ℓ(w)", j + 1, i + 1));
                }
            }
        }
    }

    let betas = beta_sequence(g, w).expect("reduced word");
    let finite = g.is_finite_type();
    for k in 1..=r {
        let ik = l[k - 1];
        let what = format!("k = {k}");
        if let Some(v) = item.guard("V", v_module(g, field, w, k)) {
            let inner = WeylWord::new(l[..k].iter().rev().copied().collect());
            let expected = weight_drop(g, &inner, &Weight::basis(n, ik)).expect("reduced prefix");
            item.bump("v_modules", 1);
            if v.dimv() != expected {
                item.fail(format!("{what}: dimv V = {:?}, expected {:?}", v.dims(), expected.0));
            }
            if v.socle_dims() != unit_vec(n, ik) {
                item.fail(format!("{what}: socle of V is {:?}", v.socle_dims()));
            }
            if finite {
                if let Some(chain) = item.guard("socle-chain V", v_module_by_socle_chain(g, field, w, k)) {
                    item.bump("socle_chain", 1);
                    iso_check(item, &format!("{what}: socle-chain V"), &v, &chain, rng);
                }
            }
        }
        let Some(partials) = item.guard("partial products", m_partial_products(g, field, w, k)) else { continue };
        let m = partials.last().expect("at least S_{i_k}").clone();
        item.bump("m_modules", 1);
        if m.dimv() != betas[k - 1] {
            item.fail(format!("{what}: dimv M = {:?}, expected β = {:?}", m.dims(), betas[k - 1].0));
        }
        // partials[t] = Σ_{i_{k-t}} ... Σ_{i_{k-1}} S_{i_k}; top at i_{k-1-t} vanishes
        for (t, p) in partials.iter().enumerate().take(k.saturating_sub(1)) {
            let il = l[k - 2 - t];
            item.bump("partial_tops", 1);
            if p.top_dim(il).unwrap_or(1) != 0 {
                item.fail(format!("{what}: partial product with {t} reflections has top at {}", il + 1));
            }
        }
        if let Some(c) = item.guard("cokernel route", m_module(g, field, w, k, Route::Cokernel, rng)) {
            item.bump("route_iso", 1);
            iso_check(item, &format!("{what}: routes"), &m, &c, rng);
        }
    }
}

/// Every reduced word of every element of length at most `maxlen`.
pub fn all_reduced_words(g: &CartanGraph, maxlen: usize) -> Result<Vec<WeylWord>> {
    let mut out = Vec::new();
    for e in elements_up_to(g, maxlen) {
        out.extend(reduced_words(g, &e, WORD_CAP)?);
    }
    Ok(out)
}

/// Socles and dimension vectors of `N(wϖ_j)`, trivial tops of `N̂`, the two
/// routes to `M_k`, `dimv M_k = β_k`, vanishing partial-product tops, and in
/// finite type the socle-chain description of `V_k`.
pub fn check_modules<F: Field>(ctx: &CheckContext<F>, maxlen: usize) -> Result<CheckReport> {
    let mut params = ctx.params();
    params.maxlen = Some(maxlen);
    let report = empty_report(
        "modules",
        "soc N(wϖ_i) = S_i with dimv ϖ_i − wϖ_i; N̂(wλ) has trivial i-top when ℓ(s_i w) > ℓ(w); both constructions of M_k agree with dimv β_k; partial reflection products have trivial tops; V_k equals the socle-chain submodule of the injective hull",
        params,
    );
    let words = all_reduced_words(&ctx.graph, maxlen)?;
    let items: Vec<Item> = words
        .par_iter()
        .enumerate()
        .map(|(idx, w)| {
            let (seed, mut rng) = ctx.item_rng(idx);
            let mut item = Item::default();
            modules_item(&mut item, &ctx.graph, &ctx.field, w, &mut rng);
            if !item.ok() {
                item.witness = Some(Witness { seed, inputs: json!({ "word": w.to_one_based() }), modules: vec![], data: vec![] });
            }
            item
        })
        .collect();
    let mut r = finish(report, items);
    r.stat("words_checked", words.len() as u64);
    r.stat("elements", elements_up_to(&ctx.graph, maxlen).len() as u64);
    r.stat("iso_log2_bound", ISO_LOG2_TARGET);
    Ok(r)
}

// ---------------------------------------------------------------- strata

/// All tuples in `{0, ..., bound}^r`, lexicographic.
pub fn grid(r: usize, bound: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=bound).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Outcome of sampling `X` in the stratum of `(sampler.word, a)` and reading
/// it under `read_word`; non-generic draws are redrawn up to the budget.
struct Draw<F: Field> {
    sample: PModule<F>,
    read: Vec<u64>,
    misses: u64,
}

/// Last non-generic draw, attempts used, and why it was rejected.
type Miss<F> = (PModule<F>, u64, String);

fn draw_and_read<F: Field, R: Rng + ?Sized>(
    sampler: &StratumSampler<F>,
    a: &[u64],
    g: &CartanGraph,
    read_word: &WeylWord,
    expected: &[u64],
    rng: &mut R,
) -> Result<std::result::Result<Draw<F>, Miss<F>>> {
    let mut last = None;
    for attempt in 0..=RETRY_BUDGET {
        let x = sampler.sample(a, rng)?;
        let outcome = match crate::prepmod::extract_datum(g, read_word, &x) {
            Ok(read) if read == expected => return Ok(Ok(Draw { sample: x, read, misses: attempt as u64 })),
            Ok(read) => format!("read {read:?}"),
            Err(e @ Error::NotInGenericStratum { .. }) => e.to_string(),
            Err(e) => return Err(e),
        };
        last = Some((x, attempt as u64 + 1, outcome));
    }
    Ok(Err(last.expect("at least one attempt")))
}

/// Weight and socle laws on samples of each stratum, the round trip through
/// module extraction, agreement with the crystal extraction chain, and the
/// stepwise statement that `Σ*` lands in the stratum of the shortened word.
pub fn check_theorem51<F: Field>(ctx: &CheckContext<F>, word: &WeylWord, bound: u64, samples: usize) -> Result<CheckReport> {
    let g = &*ctx.graph;
    beta_sequence(g, word)?;
    let mut params = ctx.params();
    params.word = Some(word.to_one_based());
    params.bound = Some(bound);
    params.samples = Some(samples);
    let report = empty_report(
        "thm51",
        "operational consequences only (the crystal isomorphism itself is not computed): dimv X = μ(a); dim soc_{i_1} X = a_1; module extraction equals the crystal extraction chain; Σ*_{i_1} X lies in the stratum of the shortened word",
        params,
    );
    let sampler = StratumSampler::new(Arc::clone(&ctx.graph), ctx.field.clone(), word.clone())?;
    let points = grid(word.len(), bound);
    let items: Vec<Item> = points
        .par_iter()
        .enumerate()
        .map(|(idx, a)| {
            let (seed, mut rng) = ctx.item_rng(idx);
            let mut item = Item::default();
            theorem51_item(&mut item, g, &sampler, word, a, samples, &mut rng);
            if !item.ok() && item.witness.is_none() {
                item.witness = Some(Witness { seed, inputs: json!({ "word": word.to_one_based(), "a": a }), modules: vec![], data: vec![] });
            } else if let Some(wit) = item.witness.as_mut() {
                wit.seed = seed;
            }
            item
        })
        .collect();
    let mut r = finish(report, items);
    r.stat("grid_points", points.len() as u64);
    rate_outcome(&mut r);
    Ok(r)
}

fn theorem51_item<F: Field, R: Rng + ?Sized>(
    item: &mut Item,
    g: &CartanGraph,
    sampler: &StratumSampler<F>,
    word: &WeylWord,
    a: &[u64],
    samples: usize,
    rng: &mut R,
) {
    let datum = LusztigDatum::new(g, word.clone(), a.to_vec()).expect("reduced word");
    let chain = extraction_chain(&datum).exponents();
    let weight = datum.weight(g).expect("valid datum");
    let expected_mu = mu(g, word, a).expect("valid datum");
    if weight != expected_mu {
        item.fail(format!("a = {a:?}: crystal weight {:?} ≠ μ(a) {:?}", weight.0, expected_mu.0));
    }
    for s in 0..samples {
        item.bump("samples", 1);
        let drawn = match draw_and_read(sampler, a, g, word, a, rng) {
            Ok(d) => d,
            Err(e) => {
                item.fail(format!("a = {a:?}, sample {s}: {e}"));
                continue;
            }
        };
        let draw = match drawn {
            Ok(d) => d,
            Err((x, tries, msg)) => {
                item.bump("misses", tries);
                item.bump("unresolved", 1);
                item.fail(format!("a = {a:?}, sample {s}: no generic draw in {tries} tries ({msg})"));
                item.witness = Some(Witness {
                    seed: 0,
                    inputs: json!({ "word": word.to_one_based(), "a": a, "sample": s }),
                    modules: vec![ModuleDump::from_module(&x)],
                    data: vec![datum.to_file()],
                });
                continue;
            }
        };
        item.bump("misses", draw.misses);
        item.bump("retries", draw.misses);
        if draw.misses == 0 {
            item.bump("first_try", 1);
        }
        let x = &draw.sample;
        let mut bad = Vec::new();
        if x.dimv() != weight {
            bad.push(format!("dimv {:?} ≠ weight {:?}", x.dims(), weight.0));
        }
        if let Some(&i1) = word.letters().first() {
            if x.soc_dim(i1).ok() != Some(a[0] as usize) {
                bad.push(format!("dim soc_{} = {:?} ≠ a_1", i1 + 1, x.soc_dim(i1).ok()));
            }
        }
        if draw.read != chain {
            bad.push(format!("module extraction {:?} ≠ crystal chain {chain:?}", draw.read));
        }
        // stepwise
        let mut cur = x.clone();
        for (k, &ik) in word.letters().iter().enumerate() {
            match sigma_star(ik, &cur) {
                Ok(next) => cur = next,
                Err(e) => {
                    bad.push(format!("Σ* step {}: {e}", k + 1));
                    break;
                }
            }
            let tail = word.suffix(k + 1);
            item.bump("stepwise", 1);
            match crate::prepmod::extract_datum(g, &tail, &cur) {
                Ok(t) if t == a[k + 1..] => {}
                Ok(t) => bad.push(format!("after {} steps residual reads {t:?}, expected {:?}", k + 1, &a[k + 1..])),
                Err(e) => bad.push(format!("after {} steps: {e}", k + 1)),
            }
        }
        if !bad.is_empty() {
            for b in &bad {
                item.fail(format!("a = {a:?}, sample {s}: {b}"));
            }
            if item.witness.is_none() {
                item.witness = Some(Witness {
                    seed: 0,
                    inputs: json!({ "word": word.to_one_based(), "a": a, "sample": s }),
                    modules: vec![ModuleDump::from_module(x)],
                    data: vec![datum.to_file()],
                });
            }
        }
    }
}

/// Fails the report when fewer than 99% of samples succeeded at the first
/// draw; records the rate either way.
fn rate_outcome(r: &mut CheckReport) {
    let get = |r: &CheckReport, k: &str| r.stats.get(k).and_then(Value::as_u64).unwrap_or(0);
    let samples = get(r, "samples");
    let first = get(r, "first_try");
    if samples == 0 {
        return;
    }
    let rate = first as f64 / samples as f64;
    r.stat("first_try_rate", rate);
    if rate < MIN_SUCCESS_RATE {
        r.outcome = Outcome::Fail;
        if r.failures.len() < MAX_FAILURE_MESSAGES {
            r.failures.push(format!("first-try success rate {rate:.4} below {MIN_SUCCESS_RATE}"));
        }
    }
}

// ---------------------------------------------------------------- transitions

/// For every word of the element of `word`, every braid move and every
/// grid point: the transition preserves weight, is an involution, and
/// reading a sample built under the old word along the new word yields the
/// moved tuple.
pub fn check_transitions<F: Field>(ctx: &CheckContext<F>, word: &WeylWord, bound: u64) -> Result<CheckReport> {
    let g = &*ctx.graph;
    beta_sequence(g, word)?;
    let mut params = ctx.params();
    params.word = Some(word.to_one_based());
    params.bound = Some(bound);
    let mut report = empty_report(
        "transitions",
        "rank-two transition maps preserve weight, are involutions, and agree with re-reading a stratum sample along the moved word",
        params,
    );
    let words = reduced_words(g, word, WORD_CAP)?;
    let mut jobs: Vec<(usize, usize, Vec<u64>)> = Vec::new();
    let mut moves = Vec::with_capacity(words.len());
    for (wi, w) in words.iter().enumerate() {
        let ms = braid_moves(g, w)?;
        for mi in 0..ms.len() {
            for a in grid(w.len(), bound) {
                jobs.push((wi, mi, a));
            }
        }
        moves.push(ms);
    }
    report.stat("words", words.len() as u64);
    report.stat("moves", moves.iter().map(Vec::len).sum::<usize>() as u64);
    if jobs.is_empty() {
        report.outcome = Outcome::Vacuous { warning: "no braid moves apply".into() };
        return Ok(report);
    }
    let samplers: Vec<StratumSampler<F>> = words
        .iter()
        .map(|w| StratumSampler::new(Arc::clone(&ctx.graph), ctx.field.clone(), w.clone()))
        .collect::<Result<_>>()?;

    let items: Vec<Item> = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, (wi, mi, a))| {
            let (seed, mut rng) = ctx.item_rng(idx);
            let mut item = Item::default();
            let w = &words[*wi];
            let mv = &moves[*wi][*mi];
            let d = LusztigDatum::new(g, w.clone(), a.clone()).expect("reduced word");
            let witness = |x: Option<&PModule<F>>, d2: Option<&LusztigDatum>| Witness {
                seed,
                inputs: json!({ "word": word_json(w), "move_position": mv.position + 1, "a": a }),
                modules: x.map(ModuleDump::from_module).into_iter().collect(),
                data: std::iter::once(d.to_file()).chain(d2.map(LusztigDatum::to_file)).collect(),
            };
            let Some(d2) = item.guard("transition", d.transition(g, mv.position, mv.kind)) else {
                item.witness = Some(witness(None, None));
                return item;
            };
            if d2.word() != &mv.word {
                item.fail(format!("transition lands on {:?}, move gives {:?}", d2.word().to_one_based(), mv.word.to_one_based()));
            }
            if d2.weight(g).ok() != d.weight(g).ok() {
                item.fail(format!("a = {a:?}: weight not preserved"));
            }
            if d2.transition(g, mv.position, mv.kind).ok().as_ref() != Some(&d) {
                item.fail(format!("a = {a:?}: transition is not an involution"));
            }
            item.bump("samples", 1);
            match draw_and_read(&samplers[*wi], a, g, d2.word(), d2.a(), &mut rng) {
                Ok(Ok(draw)) => {
                    item.bump("misses", draw.misses);
                    item.bump("retries", draw.misses);
                    if draw.misses == 0 {
                        item.bump("first_try", 1);
                    }
                }
                Ok(Err((x, tries, msg))) => {
                    item.bump("misses", tries);
                    item.bump("unresolved", 1);
                    item.fail(format!("a = {a:?} under {:?}: moved tuple not read in {tries} tries ({msg})", w.to_one_based()));
                    item.witness = Some(witness(Some(&x), Some(&d2)));
                }
                Err(e) => item.fail(format!("a = {a:?}: {e}")),
            }
            if !item.ok() && item.witness.is_none() {
                item.witness = Some(witness(None, Some(&d2)));
            }
            item
        })
        .collect();
    let mut r = finish(report, items);
    r.stat("pairs_times_points", jobs.len() as u64);
    rate_outcome(&mut r);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn ctx<F: Field>(g: CartanGraph, f: F) -> CheckContext<F> {
        CheckContext::new(g, f, 7, derive_seed(7, 0))
    }

    fn w(l: &[usize]) -> WeylWord {
        WeylWord::from_one_based(l).unwrap()
    }

    #[test]
    fn seeds_differ_per_item() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }

    #[test]
    fn grid_counts() {
        assert_eq!(grid(3, 2).len(), 27);
        assert_eq!(grid(0, 5), vec![Vec::<u64>::new()]);
        assert_eq!(grid(2, 1), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn roots_pass_on_small_graphs() {
        for g in [CartanGraph::type_a(2), CartanGraph::affine_a1()] {
            let r = check_roots(&ctx(g, PrimeField::mersenne61()), 4);
            assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.failures);
        }
    }

    #[test]
    fn lemma32_a2_and_empty_corpus() {
        let c = ctx(CartanGraph::type_a(2), Rationals);
        let r = check_lemma32(&c, 10, 8);
        assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.failures);
        assert!(matches!(check_lemma32(&c, 0, 8).outcome, Outcome::Vacuous { .. }));
    }

    #[test]
    fn mutation_detectability() {
        assert!(!sign_mutation_detectable(&CartanGraph::type_a(2)));
        assert!(!sign_mutation_detectable(&CartanGraph::affine_a1()));
        assert!(sign_mutation_detectable(&CartanGraph::type_a(3)));
        let r = check_lemma32_mutation(&ctx(CartanGraph::type_a(3), Rationals), 30, 12);
        assert_eq!(r.outcome, Outcome::Pass);
        assert!(r.witness.is_some());
        let r = check_lemma32_mutation(&ctx(CartanGraph::type_a(2), Rationals), 5, 8);
        assert!(matches!(r.outcome, Outcome::Vacuous { .. }));
    }

    #[test]
    fn modules_a2_counts_words() {
        let r = check_modules(&ctx(CartanGraph::type_a(2), PrimeField::mersenne61()), 3).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.failures);
        assert_eq!(r.stats["words_checked"], json!(7));
    }

    #[test]
    fn theorem51_a2() {
        let c = ctx(CartanGraph::type_a(2), PrimeField::mersenne61());
        let r = check_theorem51(&c, &w(&[1, 2, 1]), 1, 2).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.failures);
        assert_eq!(r.stats["grid_points"], json!(8));
        let r = check_theorem51(&c, &w(&[1, 2, 1]), 0, 1).unwrap();
        assert_eq!(r.stats["grid_points"], json!(1));
        assert!(check_theorem51(&c, &w(&[1, 1]), 1, 1).is_err());
    }

    #[test]
    fn transitions_a2_and_affine() {
        let c = ctx(CartanGraph::type_a(2), PrimeField::mersenne61());
        let r = check_transitions(&c, &w(&[1, 2, 1]), 1).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.failures);
        let c = ctx(CartanGraph::affine_a1(), PrimeField::mersenne61());
        let r = check_transitions(&c, &w(&[1, 2, 1]), 1).unwrap();
        assert!(matches!(r.outcome, Outcome::Vacuous { .. }));
    }
}
