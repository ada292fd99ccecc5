//! Reference implementations used to check the library. They favour
//! directness over speed and share no code with the crate under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use graph_instruct_core::description::DescriptionRenderer;
use graph_instruct_core::graph::{AttributedGraph, GraphBuilder, Node, NodeIx, Traversal};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lower and upper rational bounds on `e^k` from the first `terms` Taylor
/// terms. Valid once `terms > k`.
fn exp_bounds(k: u64, terms: u64) -> (BigRational, BigRational) {
    let kk = BigRational::from_integer(BigInt::from(k));
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for j in 0..terms {
        sum += &term;
        term = term * &kk / BigRational::from_integer(BigInt::from(j + 1));
    }
    // tail after `terms` terms is at most term * 1 / (1 - k / (terms + 1))
    let m = BigRational::from_integer(BigInt::from(terms + 1));
    let tail = term * &m / (&m - &kk);
    let upper = &sum + tail;
    (sum, upper)
}

/// `floor(e^k)`, refined until both rational bounds share one floor.
fn floor_exp(k: u64) -> BigInt {
    let mut terms = 2 * k + 8;
    loop {
        let (lo, hi) = exp_bounds(k, terms);
        if lo.floor() == hi.floor() {
            return lo.floor().to_integer();
        }
        terms *= 2;
    }
}

fn floor_exp_table() -> &'static [BigInt] {
    static TABLE: std::sync::OnceLock<Vec<BigInt>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| (0..=46).map(floor_exp).collect())
}

/// Smallest integer `k >= 0` with `e^k >= n`. For integer `n` and `k >= 1`,
/// `e^k` is irrational, so `e^k >= n` iff `floor(e^k) >= n`.
pub fn ceil_ln(n: u64) -> u64 {
    let n = BigInt::from(n);
    floor_exp_table()
        .iter()
        .position(|f| *f >= n)
        .expect("n fits in u64") as u64
}

/// `floor(e^k)` as computed by the oracle.
pub fn floor_exp_u128(k: u64) -> u128 {
    use num_traits::ToPrimitive;
    floor_exp_table()[k as usize].to_u128().unwrap()
}

/// Smallest `k` with `b^k >= n` by repeated multiplication in big integers.
pub fn ceil_log_int(b: u64, n: u64) -> u64 {
    let mut p = BigInt::one();
    let mut k = 0;
    while p < BigInt::from(n) {
        p *= b;
        k += 1;
    }
    k
}

pub fn energy_e(t: u64, d: u64) -> u64 {
    t * ceil_ln(d + 1)
}

/// Lowercased words: alphanumeric runs, plus every other non-space char on
/// its own.
pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.to_lowercase().chars() {
        if ch.is_alphanumeric() {
            cur.push(ch);
            continue;
        }
        if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
        if !ch.is_whitespace() {
            out.push(ch.to_string());
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// LCS length by trying every subsequence of the shorter sequence, longest
/// first.
pub fn lcs_brute(a: &[String], b: &[String]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let n = short.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let len = mask.count_ones() as usize;
        if len <= best {
            continue;
        }
        let sub: Vec<&String> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &short[i])
            .collect();
        let mut it = long.iter();
        if sub.iter().all(|s| it.any(|x| x == *s)) {
            best = len;
        }
    }
    best
}

pub fn rouge_l_brute(pairs: &[(String, Vec<String>)]) -> f64 {
    let mut total = 0.0;
    for (c, refs) in pairs {
        let c = words(c);
        let mut best: f64 = 0.0;
        for r in refs {
            let r = words(r);
            let l = lcs_brute(&c, &r) as f64;
            if l > 0.0 {
                let p = l / c.len() as f64;
                let rc = l / r.len() as f64;
                best = best.max(2.0 * p * rc / (p + rc));
            }
        }
        total += best;
    }
    total / pairs.len() as f64
}

/// (macro, micro, weighted) F1 from an explicit confusion matrix. Predictions
/// outside the known labels share one extra row.
#[allow(clippy::needless_range_loop)]
pub fn f1_confusion(pairs: &[(String, String)], label_set: &[String]) -> (f64, f64, f64) {
    let mut labels: Vec<String> = label_set.to_vec();
    for (g, _) in pairs {
        if !labels.contains(g) {
            labels.push(g.clone());
        }
    }
    labels.sort();
    labels.dedup();
    let other = labels.len();
    let idx = |s: &String| labels.iter().position(|l| l == s).unwrap_or(other);
    let k = labels.len() + 1;
    let mut m = vec![vec![0u64; k]; k];
    for (g, p) in pairs {
        m[idx(g)][idx(p)] += 1;
    }
    let n = pairs.len() as f64;
    let mut macro_sum = 0.0;
    let mut classes = 0;
    let mut weighted = 0.0;
    let mut diag = 0;
    for c in 0..k {
        let tp = m[c][c];
        diag += tp;
        let support: u64 = m[c].iter().sum();
        let predicted: u64 = (0..k).map(|r| m[r][c]).sum();
        if support == 0 {
            continue;
        }
        let p = if predicted == 0 {
            0.0
        } else {
            tp as f64 / predicted as f64
        };
        let r = tp as f64 / support as f64;
        let f = if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        };
        macro_sum += f;
        classes += 1;
        weighted += f * support as f64;
    }
    (macro_sum / classes as f64, diag as f64 / n, weighted / n)
}

fn ngram_table<T: std::hash::Hash + Eq + Clone>(seq: &[T], n: usize) -> HashMap<Vec<T>, usize> {
    let mut m = HashMap::new();
    for i in 0..seq.len().saturating_sub(n - 1) {
        if i + n <= seq.len() {
            *m.entry(seq[i..i + n].to_vec()).or_insert(0) += 1;
        }
    }
    m
}

fn clipped<T: std::hash::Hash + Eq>(h: &HashMap<T, usize>, r: &HashMap<T, usize>) -> usize {
    h.iter()
        .map(|(g, c)| (*c).min(*r.get(g).unwrap_or(&0)))
        .sum()
}

fn chrf_stats(hyp: &str, reference: &str) -> Vec<(usize, usize, usize)> {
    let hc: Vec<char> = hyp
        .to_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let rc: Vec<char> = reference
        .to_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let hw = words(hyp);
    let rw = words(reference);
    let mut v = Vec::new();
    for n in 1..=6 {
        let (h, r) = (ngram_table(&hc, n), ngram_table(&rc, n));
        v.push((h.values().sum(), r.values().sum(), clipped(&h, &r)));
    }
    for n in 1..=2 {
        let (h, r) = (ngram_table(&hw, n), ngram_table(&rw, n));
        v.push((h.values().sum(), r.values().sum(), clipped(&h, &r)));
    }
    v
}

fn chrf_f(stats: &[(usize, usize, usize)]) -> f64 {
    let eff: Vec<_> = stats.iter().filter(|s| s.0 > 0 && s.1 > 0).collect();
    if eff.is_empty() {
        return 0.0;
    }
    let p = eff.iter().map(|s| s.2 as f64 / s.0 as f64).sum::<f64>() / eff.len() as f64;
    let r = eff.iter().map(|s| s.2 as f64 / s.1 as f64).sum::<f64>() / eff.len() as f64;
    if p + r == 0.0 {
        0.0
    } else {
        5.0 * p * r / (4.0 * p + r)
    }
}

type Counts = (usize, usize, usize);

pub fn chrf_reference(pairs: &[(String, Vec<String>)]) -> f64 {
    let mut total = vec![(0, 0, 0); 8];
    for (c, refs) in pairs {
        let mut best: Option<(f64, Vec<Counts>)> = None;
        for r in refs {
            let s = chrf_stats(c, r);
            let f = chrf_f(&s);
            if best.as_ref().is_none_or(|b| f > b.0) {
                best = Some((f, s));
            }
        }
        for (t, s) in total.iter_mut().zip(best.unwrap().1) {
            t.0 += s.0;
            t.1 += s.1;
            t.2 += s.2;
        }
    }
    chrf_f(&total)
}

/// Integer vector summing to `total` closest to the exact quotas in squared
/// distance, found by enumerating every composition.
pub fn min_square_apportion(total: u64, weights: &[f64]) -> Vec<Vec<u64>> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut best: Vec<Vec<u64>> = Vec::new();
    let mut best_d = f64::INFINITY;
    let mut cur = vec![0u64; weights.len()];
    fn rec(
        i: usize,
        left: u64,
        cur: &mut Vec<u64>,
        q: &[f64],
        best: &mut Vec<Vec<u64>>,
        best_d: &mut f64,
    ) {
        if i + 1 == cur.len() {
            cur[i] = left;
            let d: f64 = cur
                .iter()
                .zip(q)
                .map(|(a, q)| (*a as f64 - q).powi(2))
                .sum();
            if d < *best_d - 1e-9 {
                *best_d = d;
                best.clear();
                best.push(cur.clone());
            } else if (d - *best_d).abs() <= 1e-9 {
                best.push(cur.clone());
            }
            return;
        }
        for a in 0..=left {
            cur[i] = a;
            rec(i + 1, left - a, cur, q, best, best_d);
        }
    }
    rec(0, total, &mut cur, &quotas, &mut best, &mut best_d);
    best
}

const VOCAB: &[&str] = &[
    "graph",
    "neural",
    "learning",
    "model",
    "fuzzy",
    "system",
    "data",
    "network",
    "deep",
    "sparse",
    "kernel",
    "random",
    "walk",
    "token",
    "budget",
    "energy",
    "instruction",
    "tuning",
    "language",
    "vision",
    "query",
];
const TYPES: &[&str] = &["PAPER", "METHOD", "TASK"];
const RELATIONS: &[&str] = &["CITES", "USED-FOR", "PART-OF"];

fn phrase(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let n = rng.random_range(min..=max);
    (0..n)
        .map(|_| VOCAB[rng.random_range(0..VOCAB.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

/// Random attributed graph with up to `max_nodes` nodes. Titles are unique
/// (`node<i> ...`) and free of description delimiters.
pub fn random_graph(seed: u64, max_nodes: usize) -> AttributedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_nodes);
    let mut b = GraphBuilder::new(format!("rand{seed}"));
    for i in 0..n {
        let title = format!("node{i} {}", phrase(&mut rng, 0, 5));
        let abs = phrase(&mut rng, 0, 25);
        let ty = TYPES[rng.random_range(0..TYPES.len())];
        b.add_node(
            Node::new(format!("v{i:03}"), ty)
                .with_attribute("title", title)
                .with_attribute("abstract", abs),
        )
        .unwrap();
    }
    let m = rng.random_range(0..=n * 3);
    for _ in 0..m {
        let s = rng.random_range(0..n);
        let d = rng.random_range(0..n);
        let rel = RELATIONS[rng.random_range(0..RELATIONS.len())];
        b.add_edge(&format!("v{s:03}"), &format!("v{d:03}"), rel, false)
            .unwrap();
    }
    b.build(Traversal::Undirected)
}

/// Distinct other endpoints of edges touching `target`, by scanning the edge
/// list.
pub fn neighbors_by_scan(g: &AttributedGraph, target: NodeIx) -> BTreeMap<NodeIx, ()> {
    let mut out = BTreeMap::new();
    for e in g.edges() {
        if e.src == target && e.dst != target {
            out.insert(e.dst, ());
        }
        if e.dst == target && e.src != target {
            out.insert(e.src, ());
        }
    }
    out
}

fn attribute_tokens(g: &AttributedGraph, ix: NodeIx) -> u64 {
    let text = g
        .node(ix)
        .attributes
        .iter()
        .map(|(_, v)| v.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    words(&text).len() as u64
}

/// Node energy from the raw attribute text and an edge-list degree count.
pub fn energy_by_formula(g: &AttributedGraph, ix: NodeIx) -> u64 {
    let d = g
        .edges()
        .iter()
        .filter(|e| (e.src == ix) != (e.dst == ix))
        .count() as u64;
    energy_e(attribute_tokens(g, ix), d)
}

/// Largest descending-H prefix of the eligible neighbors that is feasible,
/// found by enumerating every subset. Costs are measured on the rendered
/// text.
pub fn exhaustive_neighbors(
    r: &DescriptionRenderer<'_>,
    target: NodeIx,
    budget: usize,
) -> Vec<NodeIx> {
    let g = r.graph;
    let h = energy_by_formula(g, target);
    let mut eligible: Vec<(u64, String, NodeIx)> = neighbors_by_scan(g, target)
        .into_keys()
        .map(|n| (energy_by_formula(g, n), g.node(n).id.clone(), n))
        .filter(|(hn, _, _)| *hn >= h)
        .collect();
    eligible.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let order: Vec<NodeIx> = eligible.iter().map(|x| x.2).collect();
    let rel = |n: NodeIx| {
        g.neighbors(target)
            .iter()
            .find(|a| a.node == n)
            .unwrap()
            .relation
    };
    let base = r.boilerplate_cost(target).unwrap();
    let mut best: Vec<NodeIx> = Vec::new();
    for mask in 0u32..(1 << order.len()) {
        let subset: Vec<NodeIx> = (0..order.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| order[i])
            .collect();
        if subset[..] != order[..subset.len()] || subset.len() <= best.len() {
            continue;
        }
        let tokens_ok = subset
            .iter()
            .all(|&n| attribute_tokens(g, n) as usize <= budget);
        let with_rel: Vec<_> = subset.iter().map(|&n| (n, rel(n))).collect();
        let cost = r.measure(target, &with_rel, &[]).unwrap() - base;
        if tokens_ok && cost <= budget {
            best = subset;
        }
    }
    best
}

/// Four papers: T = 3, 5, 6, 2 with degrees 3, 2, 2, 1 give H = 6, 10, 12, 2.
pub fn four_node_fixture() -> AttributedGraph {
    let mut b = GraphBuilder::new("four");
    for (id, title) in [
        ("v1", "alpha beta gamma"),
        ("v2", "delta epsilon zeta eta theta"),
        ("v3", "iota kappa lambda mu nu xi"),
        ("v4", "omicron pi"),
    ] {
        b.add_node(Node::new(id, "PAPER").with_attribute("title", title))
            .unwrap();
    }
    for (s, d) in [("v1", "v2"), ("v1", "v3"), ("v2", "v3"), ("v1", "v4")] {
        b.add_edge(s, d, "CITES", false).unwrap();
    }
    b.build(Traversal::Undirected)
}

/// Budget, with the title-only template, at which v1 keeps two neighbors
/// and v2 one.
pub const FOUR_NODE_BUDGET: usize = 110;
