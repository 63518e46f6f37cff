//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use discourse_core::Network;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

// ---- corpora ----

const WORD_POOL: [&str; 12] = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet",
    "kilo", "lima",
];
const FILLER: [&str; 6] = ["the", "so", "we", "think", "and", "maybe"];
const AGENT_POOL: [&str; 4] = ["Aki", "Bo", "Cyd", "Dee"];

/// A generated transcript together with the incidence it was built from.
#[derive(Debug, Clone)]
pub struct GenCorpus {
    pub words: Vec<String>,
    /// `(unit id, agent, words used)` in order.
    pub units: Vec<(u64, String, BTreeSet<usize>)>,
    pub csv: String,
    pub wordlist: String,
}

pub fn random_corpus<R: Rng>(
    rng: &mut R,
    max_units: usize,
    max_words: usize,
    max_agents: usize,
) -> GenCorpus {
    let n_words = rng.gen_range(1..=max_words);
    let n_units = rng.gen_range(1..=max_units);
    let n_agents = rng.gen_range(1..=max_agents);
    let mut pool = WORD_POOL.to_vec();
    pool.shuffle(rng);
    let words: Vec<String> = pool[..n_words].iter().map(|w| w.to_string()).collect();

    let mut units = Vec::new();
    let mut csv = String::from("id,agent,text\n");
    let mut id = 0u64;
    for _ in 0..n_units {
        id += rng.gen_range(1..=3);
        let agent = AGENT_POOL[rng.gen_range(0..n_agents)].to_string();
        let used: BTreeSet<usize> = (0..n_words).filter(|_| rng.gen_bool(0.35)).collect();
        let mut tokens: Vec<String> = used
            .iter()
            .map(|&w| {
                let w = &words[w];
                // vary case so matching has to fold
                if rng.gen_bool(0.3) {
                    w.to_uppercase()
                } else {
                    w.clone()
                }
            })
            .collect();
        for _ in 0..rng.gen_range(0..4) {
            tokens.push(FILLER.choose(rng).unwrap().to_string());
        }
        tokens.shuffle(rng);
        csv.push_str(&format!("{id},{agent},\"{}.\"\n", tokens.join(" ")));
        units.push((id, agent, used));
    }
    let wordlist = words.join("\n") + "\n";
    GenCorpus {
        words,
        units,
        csv,
        wordlist,
    }
}

/// Canonical form of a network: node labels in order and label-sorted edges.
pub type Canon = (Vec<String>, BTreeSet<(String, String, u32)>);

pub fn canon(net: &Network) -> Canon {
    (
        net.nodes().to_vec(),
        net.labelled_edges()
            .into_iter()
            .map(|(a, b, w)| (a.to_owned(), b.to_owned(), w))
            .collect(),
    )
}

fn pair_edges(
    labels: &[String],
    weight: impl Fn(usize, usize) -> u32,
) -> BTreeSet<(String, String, u32)> {
    let mut out = BTreeSet::new();
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if i == j {
                continue;
            }
            let w = weight(i, j);
            let (a, b) = (&labels[i], &labels[j]);
            if w > 0 && a < b {
                out.insert((a.clone(), b.clone(), w));
            }
        }
    }
    out
}

/// Word network on the first `k` units by pair enumeration.
pub fn oracle_words(g: &GenCorpus, k: usize) -> Canon {
    let prefix = &g.units[..k];
    let edges = pair_edges(&g.words, |i, j| {
        prefix
            .iter()
            .filter(|(_, _, u)| u.contains(&i) && u.contains(&j))
            .count() as u32
    });
    (g.words.clone(), edges)
}

pub fn oracle_units(g: &GenCorpus, k: usize) -> Canon {
    let prefix = &g.units[..k];
    let labels: Vec<String> = prefix.iter().map(|(id, _, _)| id.to_string()).collect();
    let edges = pair_edges(&labels, |i, j| {
        (0..g.words.len())
            .filter(|w| prefix[i].2.contains(w) && prefix[j].2.contains(w))
            .count() as u32
    });
    (labels, edges)
}

pub fn oracle_agents(g: &GenCorpus, k: usize) -> Canon {
    let prefix = &g.units[..k];
    let mut labels: Vec<String> = Vec::new();
    for (_, a, _) in prefix {
        if !labels.contains(a) {
            labels.push(a.clone());
        }
    }
    let uses = |agent: &str, w: usize| prefix.iter().any(|(_, a, u)| a == agent && u.contains(&w));
    let edges = pair_edges(&labels, |i, j| {
        (0..g.words.len())
            .filter(|&w| uses(&labels[i], w) && uses(&labels[j], w))
            .count() as u32
    });
    (labels, edges)
}

// ---- graph metrics ----

/// Dense symmetric adjacency.
pub type Adj = Vec<Vec<bool>>;

#[allow(clippy::needless_range_loop)]
pub fn adj_from_mask(n: usize, mask: u64) -> Adj {
    let mut adj = vec![vec![false; n]; n];
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                adj[i][j] = true;
                adj[j][i] = true;
            }
            bit += 1;
        }
    }
    adj
}

pub fn is_connected(adj: &Adj) -> bool {
    let n = adj.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if adj[v][w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn to_network(adj: &Adj) -> Network {
    let n = adj.len();
    let nodes = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| adj[i][j])
        .collect();
    Network::from_edges(discourse_core::NetworkKind::Words, nodes, edges).unwrap()
}

pub fn oracle_degree(adj: &Adj) -> Vec<f64> {
    let n = adj.len();
    adj.iter()
        .map(|row| {
            if n < 2 {
                0.0
            } else {
                row.iter().filter(|&&b| b).count() as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn simple_paths(
    adj: &Adj,
    at: usize,
    target: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if at == target {
        out.push(path.clone());
        return;
    }
    for next in 0..adj.len() {
        if adj[at][next] && !path.contains(&next) {
            path.push(next);
            simple_paths(adj, next, target, path, out);
            path.pop();
        }
    }
}

/// Betweenness from every simple path between each unordered pair, keeping
/// the shortest ones.
pub fn oracle_betweenness(adj: &Adj) -> Vec<f64> {
    let n = adj.len();
    let mut c = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let mut paths = Vec::new();
            simple_paths(adj, s, t, &mut vec![s], &mut paths);
            let Some(shortest) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let geodesics: Vec<&Vec<usize>> =
                paths.iter().filter(|p| p.len() == shortest).collect();
            for (v, cv) in c.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let through = geodesics.iter().filter(|p| p.contains(&v)).count();
                *cv += through as f64 / geodesics.len() as f64;
            }
        }
    }
    c
}

pub fn oracle_clustering(adj: &Adj) -> Vec<f64> {
    let n = adj.len();
    (0..n)
        .map(|v| {
            let nb: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut linked = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if adj[nb[a]][nb[b]] {
                        linked += 1;
                    }
                }
            }
            linked as f64 / (k * (k - 1) / 2) as f64
        })
        .collect()
}

pub fn oracle_density(adj: &Adj) -> f64 {
    let n = adj.len();
    if n < 2 {
        return 0.0;
    }
    let e = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| adj[i][j])
        .count();
    e as f64 / (n * (n - 1) / 2) as f64
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

// ---- statistics ----

const PREC: usize = 512;
const RM: RoundingMode = RoundingMode::ToEven;

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn mean_q(xs: &[BigRational]) -> BigRational {
    xs.iter().fold(BigRational::zero(), |a, b| a + b) / BigInt::from(xs.len())
}

fn ss_q(xs: &[BigRational], m: &BigRational) -> BigRational {
    xs.iter().fold(BigRational::zero(), |a, x| {
        let d = x - m;
        a + &d * &d
    })
}

/// Exact `t²`, the sign of `t`, and df. `None` when the variance is zero.
#[derive(Debug, Clone)]
pub struct ExactT {
    pub t_squared: BigRational,
    pub negative: bool,
    pub df: u64,
}

pub fn exact_unpaired(a: &[f64], b: &[f64]) -> Option<ExactT> {
    let a: Vec<BigRational> = a.iter().map(|&x| rational(x)).collect();
    let b: Vec<BigRational> = b.iter().map(|&x| rational(x)).collect();
    let (ma, mb) = (mean_q(&a), mean_q(&b));
    let df = a.len() + b.len() - 2;
    let pooled = (ss_q(&a, &ma) + ss_q(&b, &mb)) / BigInt::from(df);
    if pooled.is_zero() {
        return None;
    }
    let scale = BigRational::new(1.into(), BigInt::from(a.len()))
        + BigRational::new(1.into(), BigInt::from(b.len()));
    let diff = &ma - &mb;
    Some(ExactT {
        t_squared: &diff * &diff / (pooled * scale),
        negative: diff.is_negative(),
        df: df as u64,
    })
}

pub fn exact_paired(pre: &[f64], post: &[f64]) -> Option<ExactT> {
    let d: Vec<BigRational> = pre
        .iter()
        .zip(post)
        .map(|(&a, &b)| rational(b) - rational(a))
        .collect();
    let n = d.len();
    let md = mean_q(&d);
    let var = ss_q(&d, &md) / BigInt::from(n - 1);
    if var.is_zero() {
        return None;
    }
    Some(ExactT {
        t_squared: &md * &md * BigInt::from(n) / var,
        negative: md.is_negative(),
        df: (n - 1) as u64,
    })
}

struct Big {
    cc: Consts,
}

impl Big {
    fn new() -> Self {
        Big {
            cc: Consts::new().expect("constants"),
        }
    }

    fn int(&mut self, i: &BigInt) -> BigFloat {
        BigFloat::parse(&i.to_string(), Radix::Dec, PREC, RM, &mut self.cc)
    }

    fn q(&mut self, q: &BigRational) -> BigFloat {
        let (n, d) = (self.int(q.numer()), self.int(q.denom()));
        n.div(&d, PREC, RM)
    }

    fn n(&self, x: u64) -> BigFloat {
        BigFloat::from_u64(x, PREC)
    }
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().expect("decimal float")
}

/// Two-tailed Student p for integral df from the finite trigonometric
/// series of the t CDF, evaluated at 512 bits. Takes `t²` exactly.
pub fn oracle_p(t_squared: &BigRational, df: u64) -> f64 {
    if t_squared.is_zero() {
        return 1.0;
    }
    let mut b = Big::new();
    let nu = BigRational::from_integer(BigInt::from(df));
    let total = &nu + t_squared;
    let cos2 = b.q(&(&nu / &total));
    let sin2 = b.q(&(t_squared / &total));
    let sin = sin2.sqrt(PREC, RM);
    let cos = cos2.sqrt(PREC, RM);
    let one = b.n(1);

    // sum of the series in powers of cos²
    let series = |first_num: u64, first_den: u64, terms: u64| {
        let mut term = one.clone();
        let mut sum = one.clone();
        let (mut num, mut den) = (first_num, first_den);
        for _ in 0..terms {
            term = term
                .mul(&cos2, PREC, RM)
                .mul(&BigFloat::from_u64(num, PREC), PREC, RM)
                .div(&BigFloat::from_u64(den, PREC), PREC, RM);
            sum = sum.add(&term, PREC, RM);
            num += 2;
            den += 2;
        }
        sum
    };

    let a = if df.is_multiple_of(2) {
        // sinθ (1 + 1/2 cos² + 1·3/(2·4) cos⁴ + ...), last power ν-2
        sin.mul(&series(1, 2, df / 2 - 1), PREC, RM)
    } else {
        // 2/π (θ + sinθ cosθ (1 + 2/3 cos² + ...)), last power ν-3
        let theta = sin.div(&cos, PREC, RM).atan(PREC, RM, &mut b.cc);
        let mut inner = theta;
        if df > 1 {
            let s = series(2, 3, (df - 3) / 2);
            inner = inner.add(&sin.mul(&cos, PREC, RM).mul(&s, PREC, RM), PREC, RM);
        }
        let pi = b.cc.pi(PREC, RM);
        inner.mul(&b.n(2), PREC, RM).div(&pi, PREC, RM)
    };
    to_f64(&one.sub(&a, PREC, RM))
}

/// `t` rounded from its exact square.
pub fn oracle_t(e: &ExactT) -> f64 {
    let mut b = Big::new();
    let t = to_f64(&b.q(&e.t_squared).sqrt(PREC, RM));
    if e.negative {
        -t
    } else {
        t
    }
}

pub fn rel_close(x: f64, oracle: f64, tol: f64) -> bool {
    if oracle == 0.0 {
        x.abs() <= 1e-12
    } else {
        ((x - oracle) / oracle).abs() <= tol
    }
}

/// Random score vectors: continuous values or Likert-like integers.
pub fn random_sample<R: Rng>(rng: &mut R, len: usize, integral: bool) -> Vec<f64> {
    let shift: f64 = rng.gen_range(-5.0..5.0);
    let spread: f64 = rng.gen_range(0.1..10.0);
    (0..len)
        .map(|_| {
            if integral {
                rng.gen_range(1..=5) as f64
            } else {
                shift + spread * rng.gen_range(-1.0..1.0)
            }
        })
        .collect()
}

/// Per class and code index, from a coded-report fixture, independently of
/// the library's loader.
pub fn naive_counts(csv: &str) -> BTreeMap<String, (usize, BTreeMap<String, usize>)> {
    let mut out: BTreeMap<String, (usize, BTreeMap<String, usize>)> = BTreeMap::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let entry = out.entry(cols[1].to_string()).or_default();
        entry.0 += 1;
        for code in cols[2].split('|').filter(|c| !c.is_empty()) {
            *entry.1.entry(code.to_string()).or_default() += 1;
        }
    }
    out
}
