//! Brute-force reference implementations of the evaluation and analysis
//! statistics, written without reference to the library code paths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use curiosity::corpus::Fact;

/// `None` when no id in `relevant` appears.
pub fn reciprocal_rank(ranking: &[String], relevant: &BTreeSet<String>) -> Option<f64> {
    let mut best: Option<usize> = None;
    for r in relevant {
        for (k, id) in ranking.iter().enumerate() {
            if id == r {
                best = Some(best.map_or(k + 1, |b: usize| b.min(k + 1)));
            }
        }
    }
    best.map(|b| 1.0 / b as f64)
}

pub fn mrr(rankings: &[Vec<String>], relevant: &[BTreeSet<String>]) -> Option<f64> {
    let rr: Vec<f64> = rankings.iter().zip(relevant).filter_map(|(r, s)| reciprocal_rank(r, s)).collect();
    (!rr.is_empty()).then(|| rr.iter().sum::<f64>() / rr.len() as f64)
}

pub fn micro_f1(pred: &[Vec<f64>], gold: &[Vec<bool>]) -> f64 {
    let decisions: Vec<(bool, bool)> =
        pred.iter().flatten().zip(gold.iter().flatten()).map(|(&p, &g)| (p >= 0.5, g)).collect();
    let tp = decisions.iter().filter(|d| **d == (true, true)).count();
    let fp = decisions.iter().filter(|d| **d == (true, false)).count();
    let fn_ = decisions.iter().filter(|d| **d == (false, true)).count();
    if tp + fp + fn_ == 0 {
        0.0
    } else {
        (2 * tp) as f64 / (2 * tp + fp + fn_) as f64
    }
}

pub fn accuracy(pred: &[f64], gold: &[bool]) -> f64 {
    let hits = pred.iter().zip(gold).filter(|(p, g)| (**p >= 0.5) == **g).count();
    hits as f64 / pred.len() as f64
}

/// Standard normal upper two-sided tail by composite Simpson integration.
fn two_sided_tail(z: f64) -> f64 {
    let z = z.abs();
    if z > 38.0 {
        return 0.0;
    }
    let steps = 20_000;
    let h = z / steps as f64;
    let density = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = density(0.0) + density(z);
    for i in 1..steps {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * density(i as f64 * h);
    }
    (1.0 - 2.0 * acc * h / 3.0).max(0.0)
}

/// `(z, p)` of the pooled two-proportion test.
pub fn z_test(s1: usize, n1: usize, s2: usize, n2: usize) -> (f64, f64) {
    let p1 = s1 as f64 / n1 as f64;
    let p2 = s2 as f64 / n2 as f64;
    let p = (s1 + s2) as f64 / (n1 + n2) as f64;
    let se = (p * (1.0 - p) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return if s1 * n2 == s2 * n1 { (0.0, 1.0) } else { (f64::INFINITY.copysign(p1 - p2), 0.0) };
    }
    let z = (p1 - p2) / se;
    (z, two_sided_tail(z))
}

/// Nominal alpha from value counts: `1 - (n-1) * sum_u D_u/(m_u-1) / sum_{c!=k} n_c n_k`,
/// where `D_u` is the number of ordered disagreeing pairs in unit `u`.
pub fn alpha(units: &[Vec<Option<i32>>]) -> Option<f64> {
    let pairable: Vec<Vec<i32>> =
        units.iter().map(|u| u.iter().flatten().copied().collect::<Vec<_>>()).filter(|v| v.len() >= 2).collect();
    let all: Vec<i32> = pairable.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let classes: BTreeSet<i32> = all.iter().copied().collect();
    let count = |c: i32| all.iter().filter(|&&v| v == c).count() as f64;
    let mut expected = 0.0;
    for &c in &classes {
        for &k in &classes {
            if c != k {
                expected += count(c) * count(k);
            }
        }
    }
    if expected == 0.0 {
        return None;
    }
    let mut observed = 0.0;
    for v in &pairable {
        let mut disagree = 0.0;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j && v[i] != v[j] {
                    disagree += 1.0;
                }
            }
        }
        observed += disagree / (v.len() - 1) as f64;
    }
    Some(1.0 - (n - 1.0) * observed / expected)
}

fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(|w| w.to_lowercase()).collect()
}

/// Direct-summation tf-idf cosine, independent of the index structures.
pub fn tfidf_scores(facts: &[Fact], query: &str) -> Vec<(String, f64)> {
    let docs: Vec<Vec<String>> = facts.iter().map(|f| words(&f.text)).collect();
    let n = docs.len() as f64;
    let mut df: HashMap<&str, f64> = HashMap::new();
    for d in &docs {
        let uniq: BTreeSet<&str> = d.iter().map(String::as_str).collect();
        for w in uniq {
            *df.entry(w).or_default() += 1.0;
        }
    }
    let idf = |w: &str| df.get(w).map(|&d| ((1.0 + n) / (1.0 + d)).ln() + 1.0);
    let weigh = |toks: &[String]| {
        let mut v: BTreeMap<String, f64> = BTreeMap::new();
        for t in toks {
            if let Some(i) = idf(t) {
                *v.entry(t.clone()).or_default() += i;
            }
        }
        v
    };
    let q = weigh(&words(query));
    let qn: f64 = q.values().map(|x| x * x).sum::<f64>().sqrt();
    facts
        .iter()
        .zip(&docs)
        .map(|(f, d)| {
            let v = weigh(d);
            let dn: f64 = v.values().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = q.iter().map(|(k, a)| a * v.get(k).copied().unwrap_or(0.0)).sum();
            let s = if qn == 0.0 || dn == 0.0 { 0.0 } else { dot / (qn * dn) };
            (f.id.clone(), s)
        })
        .collect()
}
