//! Shared fixtures and independent oracles for the integration tests.
//! Everything here is deliberately separate from the library's own
//! implementation paths.
#![allow(dead_code)] // each test target uses a different subset

use pepcurate::seqcore::{validate_sequence, PeptideSequence, ValidationPolicy};

pub const CANONICAL: &[u8; 20] = b"ACDEFGHIKLMNPQRSTVWY";

/// Deterministic 64-bit generator (splitmix64).
pub struct Stream(pub u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(seed.wrapping_mul(0x5851F42D4C957F2D) ^ 0xDA3E39CB94B95BDB)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn seq(text: &str, id: &str) -> PeptideSequence {
    validate_sequence(text, id, ValidationPolicy::AllowAmbiguity)
        .unwrap()
        .accepted()
        .unwrap()
}

/// Uniform random canonical peptide of length in `[lo, hi]`.
pub fn random_peptide(stream: &mut Stream, lo: usize, hi: usize) -> String {
    let len = lo + stream.below((hi - lo + 1) as u64) as usize;
    (0..len).map(|_| CANONICAL[stream.below(20) as usize] as char).collect()
}

pub fn random_peptides(stream: &mut Stream, n: usize, lo: usize, hi: usize, tag: &str)
    -> Vec<PeptideSequence>
{
    (0..n).map(|i| seq(&random_peptide(stream, lo, hi), &format!("{tag}{i:05}"))).collect()
}

/// Pascal-triangle binomial coefficients in exact integer arithmetic.
pub struct Binomials(Vec<Vec<u128>>);

impl Binomials {
    pub fn up_to(n: usize) -> Self {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = vec![1u128; i + 1];
            for j in 1..i {
                row[j] = rows[i - 1][j - 1] + rows[i - 1][j];
            }
            rows.push(row);
        }
        Binomials(rows)
    }

    pub fn choose(&self, n: u64, k: u64) -> u128 {
        if k > n {
            0
        } else {
            self.0[n as usize][k as usize]
        }
    }
}

/// Exact-rational enumeration oracle for the one-sided (greater) Fisher
/// test: sums hypergeometric numerators in u128 and divides once.
pub fn fisher_greater_oracle(a: u64, b: u64, c: u64, d: u64, bin: &Binomials) -> f64 {
    let total = a + b + c + d;
    let positives = a + b;
    let containing = a + c;
    if positives == 0 || c + d == 0 || containing == 0 || b + d == 0 {
        return 1.0;
    }
    let x_max = positives.min(containing);
    let mut numerator: u128 = 0;
    for x in a..=x_max {
        numerator += bin.choose(containing, x) * bin.choose(total - containing, positives - x);
    }
    let denominator = bin.choose(total, positives);
    numerator as f64 / denominator as f64
}

/// Step-up oracle: rejects all p-values at or below p_(i*) where i* is the
/// largest rank with p_(i) <= i * alpha / m.
pub fn bh_reject_oracle(pvals: &[f64], alpha: f64) -> Vec<bool> {
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pvals[i].partial_cmp(&pvals[j]).unwrap().then(i.cmp(&j)));
    let mut cutoff = None;
    for rank in (1..=m).rev() {
        if pvals[order[rank - 1]] <= rank as f64 * alpha / m as f64 {
            cutoff = Some(rank);
            break;
        }
    }
    let mut reject = vec![false; m];
    if let Some(rank) = cutoff {
        for &idx in order.iter().take(rank) {
            reject[idx] = true;
        }
    }
    reject
}

/// Connected components by breadth-first search over an explicit edge list;
/// returns the component id per vertex.
pub fn bfs_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in edges {
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    let mut component = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        component[start] = next;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if component[v] == usize::MAX {
                    component[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    component
}

/// True when two component labelings induce the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    assert_eq!(a.len(), b.len());
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if (a[i] == a[j]) != (b[i] == b[j]) {
                return false;
            }
        }
    }
    true
}
