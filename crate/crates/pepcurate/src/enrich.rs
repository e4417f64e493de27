//! k-mer enrichment analysis: one-sided Fisher exact test on per-sequence
//! presence tables, Benjamini–Hochberg FDR, odds-ratio and support gates,
//! and single-linkage motif merging on support-set Jaccard.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seqcore::PeptideSequence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnrichError {
    #[error("positive and negative classes must both be non-empty")]
    EmptyClass,
}

/// Per-sequence presence counts: `a` positives containing the k-mer, `b`
/// positives lacking it, `c`/`d` the same for negatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl ContingencyTable {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    /// A zero row or column makes the greater-tail test trivial (p = 1).
    pub fn is_degenerate(&self) -> bool {
        self.a + self.b == 0
            || self.c + self.d == 0
            || self.a + self.c == 0
            || self.b + self.d == 0
    }
}

/// Natural-log factorial table, built once per dataset size.
pub struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(0.0);
        for i in 1..=n {
            table.push(table[i - 1] + (i as f64).ln());
        }
        LogFactorials(table)
    }

    fn ln_choose(&self, n: u64, k: u64) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.0[n as usize] - self.0[k as usize] - self.0[(n - k) as usize]
    }
}

/// One-sided (greater) Fisher exact p-value: P(X >= a) under the
/// hypergeometric null with the table's margins fixed. Degenerate margins
/// yield 1.0 by convention.
pub fn fisher_exact_greater(t: &ContingencyTable) -> f64 {
    fisher_exact_greater_with(t, &LogFactorials::up_to(t.total() as usize))
}

/// Same test against a prebuilt factorial table (batch use).
pub fn fisher_exact_greater_with(t: &ContingencyTable, lf: &LogFactorials) -> f64 {
    if t.is_degenerate() {
        return 1.0;
    }
    let total = t.total();
    let containing = t.a + t.c;
    let positives = t.a + t.b;
    let denom = lf.ln_choose(total, positives);
    let x_max = positives.min(containing);
    let mut p = 0.0f64;
    for x in t.a..=x_max {
        let ln_term = lf.ln_choose(containing, x)
            + lf.ln_choose(total - containing, positives - x)
            - denom;
        p += ln_term.exp();
    }
    p.clamp(0.0, 1.0)
}

/// (a*d)/(b*c) with the Haldane–Anscombe +0.5 correction applied to every
/// cell whenever any cell is zero.
pub fn odds_ratio(t: &ContingencyTable) -> f64 {
    let (a, b, c, d) = (t.a as f64, t.b as f64, t.c as f64, t.d as f64);
    if t.a == 0 || t.b == 0 || t.c == 0 || t.d == 0 {
        ((a + 0.5) * (d + 0.5)) / ((b + 0.5) * (c + 0.5))
    } else {
        (a * d) / (b * c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BhOutcome {
    /// Rejection mask in input order.
    pub reject: Vec<bool>,
    /// Monotone-adjusted q-values in input order.
    pub qvalues: Vec<f64>,
}

/// Benjamini–Hochberg step-up: rejects every p at or below p_(i*) where i*
/// is the largest rank with p_(i) <= i * alpha / m.
pub fn bh_fdr(pvals: &[f64], alpha: f64) -> BhOutcome {
    let m = pvals.len();
    if m == 0 {
        return BhOutcome { reject: vec![], qvalues: vec![] };
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pvals[i].partial_cmp(&pvals[j]).unwrap().then(i.cmp(&j)));

    let mut qvalues = vec![0.0; m];
    let mut running = f64::INFINITY;
    for rank in (1..=m).rev() {
        let idx = order[rank - 1];
        let raw = pvals[idx] * m as f64 / rank as f64;
        running = running.min(raw).min(1.0);
        qvalues[idx] = running;
    }

    let mut cutoff_rank = 0usize;
    for rank in 1..=m {
        if pvals[order[rank - 1]] <= rank as f64 * alpha / m as f64 {
            cutoff_rank = rank;
        }
    }
    let mut reject = vec![false; m];
    for rank in 1..=cutoff_rank {
        reject[order[rank - 1]] = true;
    }
    BhOutcome { reject, qvalues }
}

/// k = 5 for datasets with mean sequence length strictly above 15, else 3.
pub fn choose_k(mean_length: f64) -> usize {
    assert!(mean_length > 0.0);
    if mean_length > 15.0 {
        5
    } else {
        3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentParams {
    /// Window length; None selects by mean sequence length via [`choose_k`].
    pub k: Option<usize>,
    pub alpha: f64,
    /// Minimum Haldane-corrected odds ratio (the enrichment score gate).
    pub min_score: f64,
    /// Minimum number of distinct positive sequences containing the k-mer.
    pub min_support: usize,
    /// Minimum total occurrences within positive sequences.
    pub min_pos: usize,
    pub min_jaccard: f64,
    /// Gate on BH-adjusted q-values instead of raw p-values.
    pub fdr: bool,
}

impl Default for EnrichmentParams {
    fn default() -> Self {
        EnrichmentParams {
            k: None,
            alpha: 0.05,
            min_score: 4.0,
            min_support: 5,
            min_pos: 3,
            min_jaccard: 0.6,
            fdr: true,
        }
    }
}

/// An enriched k-mer surviving all gates. `support` holds indices into the
/// positive slice passed to [`find_enriched_kmers`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotifHit {
    pub kmer: String,
    pub table: ContingencyTable,
    pub p: f64,
    pub q: f64,
    pub odds: f64,
    pub support: BTreeSet<usize>,
    /// Total occurrences across positive sequences (with multiplicity).
    pub occurrences: usize,
}

/// Scans every k-mer present in at least one positive sequence, tests
/// per-sequence presence against the class label, BH-corrects across all
/// candidates, and keeps hits clearing the support / occurrence / p / odds
/// gates. Output is sorted by ascending q, then descending odds, then k-mer.
pub fn find_enriched_kmers(
    pos: &[PeptideSequence],
    neg: &[PeptideSequence],
    params: &EnrichmentParams,
) -> Result<Vec<MotifHit>, EnrichError> {
    if pos.is_empty() || neg.is_empty() {
        return Err(EnrichError::EmptyClass);
    }
    let k = params.k.unwrap_or_else(|| {
        let total: usize = pos.iter().chain(neg).map(PeptideSequence::len).sum();
        choose_k(total as f64 / (pos.len() + neg.len()) as f64)
    });

    // kmer -> (supporting positive indices, total positive occurrences)
    let mut candidates: BTreeMap<&[u8], (BTreeSet<usize>, usize)> = BTreeMap::new();
    for (i, seq) in pos.iter().enumerate() {
        if seq.len() < k {
            continue;
        }
        for w in seq.bytes().windows(k) {
            let entry = candidates.entry(w).or_default();
            entry.0.insert(i);
            entry.1 += 1;
        }
    }
    // Negative presence per candidate.
    let neg_presence: Vec<BTreeSet<&[u8]>> = neg
        .par_iter()
        .map(|seq| {
            if seq.len() < k {
                BTreeSet::new()
            } else {
                seq.bytes().windows(k).collect()
            }
        })
        .collect();
    let mut neg_count: BTreeMap<&[u8], u64> = BTreeMap::new();
    for present in &neg_presence {
        for w in present {
            if candidates.contains_key(w) {
                *neg_count.entry(w).or_insert(0) += 1;
            }
        }
    }

    let lf = LogFactorials::up_to(pos.len() + neg.len());
    let rows: Vec<(&[u8], &(BTreeSet<usize>, usize))> = candidates.iter().map(|(k, v)| (*k, v)).collect();
    let tested: Vec<(ContingencyTable, f64)> = rows
        .par_iter()
        .map(|(kmer, (support, _))| {
            let a = support.len() as u64;
            let c = neg_count.get(kmer).copied().unwrap_or(0);
            let table = ContingencyTable {
                a,
                b: pos.len() as u64 - a,
                c,
                d: neg.len() as u64 - c,
            };
            let p = fisher_exact_greater_with(&table, &lf);
            (table, p)
        })
        .collect();

    let pvals: Vec<f64> = tested.iter().map(|&(_, p)| p).collect();
    let bh = bh_fdr(&pvals, params.alpha);

    let mut hits: Vec<MotifHit> = rows
        .iter()
        .zip(tested.iter())
        .zip(bh.qvalues.iter())
        .filter_map(|(((kmer, (support, occurrences)), (table, p)), &q)| {
            let odds = odds_ratio(table);
            let significance = if params.fdr { q } else { *p };
            let keep = support.len() >= params.min_support
                && *occurrences >= params.min_pos
                && significance <= params.alpha
                && odds >= params.min_score;
            keep.then(|| MotifHit {
                kmer: String::from_utf8(kmer.to_vec()).expect("ascii"),
                table: *table,
                p: *p,
                q,
                odds,
                support: support.clone(),
                occurrences: *occurrences,
            })
        })
        .collect();
    hits.sort_by(|x, y| {
        x.q.partial_cmp(&y.q)
            .unwrap()
            .then(y.odds.partial_cmp(&x.odds).unwrap())
            .then(x.kmer.cmp(&y.kmer))
    });
    Ok(hits)
}

/// Motifs merged by support-set similarity; the cluster's support is the
/// union of its members' supports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotifCluster {
    pub kmers: Vec<String>,
    pub support: BTreeSet<usize>,
}

fn jaccard(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Single-linkage merge of hits whose supports overlap at Jaccard >=
/// `min_jaccard`. Clusters are ordered by their first member hit.
pub fn merge_motifs(hits: &[MotifHit], min_jaccard: f64) -> Vec<MotifCluster> {
    let n = hits.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            parent[x] = find(parent, parent[x]);
        }
        parent[x]
    }
    for i in 0..n {
        for j in i + 1..n {
            if jaccard(&hits[i].support, &hits[j].support) >= min_jaccard {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = (ri.min(rj), ri.max(rj));
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut clusters: Vec<MotifCluster> = Vec::new();
    let mut cluster_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let cid = *cluster_of_root.entry(root).or_insert_with(|| {
            clusters.push(MotifCluster { kmers: Vec::new(), support: BTreeSet::new() });
            clusters.len() - 1
        });
        clusters[cid].kmers.push(hits[i].kmer.clone());
        clusters[cid].support.extend(hits[i].support.iter().copied());
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{validate_sequence, ValidationPolicy};
    use proptest::prelude::*;

    fn seqs(list: &[&str]) -> Vec<PeptideSequence> {
        list.iter()
            .enumerate()
            .map(|(i, s)| {
                validate_sequence(s, format!("s{i}"), ValidationPolicy::AllowAmbiguity)
                    .unwrap()
                    .accepted()
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn fisher_worked_examples() {
        // All containing positives vs none: 1 / C(10,5)
        let p = fisher_exact_greater(&ContingencyTable { a: 5, b: 0, c: 0, d: 5 });
        assert!((p - 1.0 / 252.0).abs() < 1e-12);
        // Greater tail from a = 0 covers everything.
        let p = fisher_exact_greater(&ContingencyTable { a: 0, b: 4, c: 3, d: 2 });
        assert!((p - 1.0).abs() < 1e-12);
        // (3,1,1,3): (C(4,3)C(4,1) + C(4,4)C(4,0)) / C(8,4) = 17/70
        let p = fisher_exact_greater(&ContingencyTable { a: 3, b: 1, c: 1, d: 3 });
        assert!((p - 17.0 / 70.0).abs() < 1e-12);
    }

    #[test]
    fn fisher_degenerate_margins() {
        assert_eq!(fisher_exact_greater(&ContingencyTable { a: 0, b: 0, c: 2, d: 2 }), 1.0);
        assert_eq!(fisher_exact_greater(&ContingencyTable { a: 2, b: 2, c: 0, d: 0 }), 1.0);
        assert_eq!(fisher_exact_greater(&ContingencyTable { a: 0, b: 2, c: 0, d: 2 }), 1.0);
    }

    #[test]
    fn odds_ratio_cases() {
        assert_eq!(odds_ratio(&ContingencyTable { a: 2, b: 2, c: 2, d: 2 }), 1.0);
        assert_eq!(odds_ratio(&ContingencyTable { a: 3, b: 1, c: 1, d: 3 }), 9.0);
        assert_eq!(odds_ratio(&ContingencyTable { a: 5, b: 0, c: 0, d: 5 }), 121.0);
    }

    #[test]
    fn bh_worked_examples() {
        let out = bh_fdr(&[0.01, 0.02, 0.03, 0.04], 0.05);
        assert_eq!(out.reject, vec![true; 4]);
        let out = bh_fdr(&[1.0, 1.0], 0.05);
        assert_eq!(out.reject, vec![false, false]);
        let out = bh_fdr(&[0.001, 0.9], 0.05);
        assert_eq!(out.reject, vec![true, false]);
    }

    #[test]
    fn bh_qvalues_monotone() {
        let out = bh_fdr(&[0.04, 0.01, 0.03, 0.005], 0.05);
        // q = p * m / rank, adjusted to be monotone in rank order.
        assert!((out.qvalues[3] - 0.02).abs() < 1e-12);
        for q in &out.qvalues {
            assert!((0.0..=1.0).contains(q));
        }
    }

    #[test]
    fn choose_k_boundary() {
        assert_eq!(choose_k(16.0), 5);
        assert_eq!(choose_k(15.0), 3);
        assert_eq!(choose_k(4.1), 3);
    }

    #[test]
    fn enrichment_simple_motif() {
        let pos = seqs(&vec!["KKKKK"; 10]);
        let neg = seqs(&vec!["ADDDA"; 10]);
        let hits =
            find_enriched_kmers(&pos, &neg, &EnrichmentParams { k: Some(5), ..Default::default() })
                .unwrap();
        assert_eq!(hits.len(), 1);
        let hit = &hits[0];
        assert_eq!(hit.kmer, "KKKKK");
        assert!((hit.p - 1.0 / 184_756.0).abs() < 1e-12);
        assert_eq!(hit.support.len(), 10);
        assert!(hit.odds >= 4.0);
    }

    #[test]
    fn low_support_motif_filtered() {
        let mut raw = vec!["KKKKKWWWWW"; 2];
        raw.extend(vec!["ACDEACDEAC"; 8]);
        let pos = seqs(&raw);
        let neg = seqs(&vec!["GGGGGGGGGG"; 10]);
        let hits =
            find_enriched_kmers(&pos, &neg, &EnrichmentParams { k: Some(5), ..Default::default() })
                .unwrap();
        assert!(hits.iter().all(|h| h.kmer != "KKKKK"), "support 2 < 5 must be gated");
    }

    #[test]
    fn ubiquitous_motif_not_enriched() {
        let pos = seqs(&vec!["KKKKKAAAAA"; 10]);
        let neg = seqs(&vec!["KKKKKCCCCC"; 10]);
        let hits =
            find_enriched_kmers(&pos, &neg, &EnrichmentParams { k: Some(5), ..Default::default() })
                .unwrap();
        assert!(hits.iter().all(|h| h.kmer != "KKKKK"));
    }

    #[test]
    fn enrichment_empty_class() {
        let pos = seqs(&["AAAAA"]);
        assert_eq!(
            find_enriched_kmers(&pos, &[], &EnrichmentParams::default()),
            Err(EnrichError::EmptyClass)
        );
    }

    #[test]
    fn enrichment_invariant_to_record_order() {
        let mut raw = vec!["MMKKKKKMM", "KKKKKAAAA", "AAKKKKKWW", "WWKKKKKDD", "DDKKKKKEE"];
        raw.extend(["ACDEFGHIW", "WHGFEDCAY", "YACDEFGHC", "CHGFEDCAM", "MACDEFGHP"]);
        let neg_raw = vec!["GGGGGGGGG"; 10];
        let params = EnrichmentParams { k: Some(5), ..Default::default() };
        let hits1 = find_enriched_kmers(&seqs(&raw), &seqs(&neg_raw), &params).unwrap();
        let mut rev = raw.clone();
        rev.reverse();
        let hits2 = find_enriched_kmers(&seqs(&rev), &seqs(&neg_raw), &params).unwrap();
        let kmers1: Vec<&str> = hits1.iter().map(|h| h.kmer.as_str()).collect();
        let kmers2: Vec<&str> = hits2.iter().map(|h| h.kmer.as_str()).collect();
        assert_eq!(kmers1, kmers2);
    }

    fn hit_with_support(kmer: &str, ids: &[usize]) -> MotifHit {
        MotifHit {
            kmer: kmer.into(),
            table: ContingencyTable { a: ids.len() as u64, b: 0, c: 0, d: 1 },
            p: 0.01,
            q: 0.01,
            odds: 10.0,
            support: ids.iter().copied().collect(),
            occurrences: ids.len(),
        }
    }

    #[test]
    fn merge_identical_supports() {
        let hits = [hit_with_support("AAAAA", &[1, 2, 3]), hit_with_support("CCCCC", &[1, 2, 3])];
        let clusters = merge_motifs(&hits, 0.6);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].kmers, vec!["AAAAA", "CCCCC"]);
    }

    #[test]
    fn merge_disjoint_supports() {
        let hits = [hit_with_support("AAAAA", &[1, 2]), hit_with_support("CCCCC", &[3, 4])];
        assert_eq!(merge_motifs(&hits, 0.6).len(), 2);
    }

    #[test]
    fn merge_overlapping_supports() {
        // {1..6} and {2..7}: Jaccard 5/7 >= 0.6.
        let hits = [
            hit_with_support("AAAAA", &[1, 2, 3, 4, 5, 6]),
            hit_with_support("CCCCC", &[2, 3, 4, 5, 6, 7]),
        ];
        let clusters = merge_motifs(&hits, 0.6);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].support.len(), 7);
    }

    #[test]
    fn motif_hits_satisfy_their_own_gates() {
        let mut raw = Vec::new();
        for i in 0..12 {
            raw.push(format!("KKKKKAC{}DE", ['A', 'C', 'D', 'E'][i % 4]));
        }
        let pos = seqs(&raw.iter().map(String::as_str).collect::<Vec<_>>());
        let neg = seqs(&vec!["GGGGGGGGGG"; 12]);
        let params = EnrichmentParams { k: Some(5), ..Default::default() };
        let hits = find_enriched_kmers(&pos, &neg, &params).unwrap();
        assert!(!hits.is_empty());
        for h in &hits {
            assert!(h.support.len() >= params.min_support);
            assert!(h.occurrences >= params.min_pos);
            assert!(h.q <= params.alpha);
            assert!(h.odds >= params.min_score);
            assert_eq!(h.support.len() as u64, h.table.a);
        }
    }

    proptest! {
        #[test]
        fn bh_rejections_monotone_in_alpha(
            pvals in prop::collection::vec(0.0f64..=1.0, 1..40),
            alpha_lo in 0.01f64..0.2,
            bump in 0.01f64..0.5,
        ) {
            let lo = bh_fdr(&pvals, alpha_lo);
            let hi = bh_fdr(&pvals, alpha_lo + bump);
            for (l, h) in lo.reject.iter().zip(hi.reject.iter()) {
                prop_assert!(!l || *h, "raising alpha un-rejected a p-value");
            }
        }

        #[test]
        fn fisher_p_in_unit_interval(a in 0u64..12, b in 0u64..12, c in 0u64..12, d in 0u64..12) {
            let p = fisher_exact_greater(&ContingencyTable { a, b, c, d });
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn fisher_matches_rational_enumeration_up_to_margin_30(
            a in 0u64..=30, b in 0u64..=30, c in 0u64..=30, d in 0u64..=30,
        ) {
            prop_assume!(a + b <= 30 && c + d <= 30);
            // Exact enumeration with integer binomials; fits u128 comfortably.
            let mut rows: Vec<Vec<u128>> = vec![vec![1]];
            for i in 1..=60usize {
                let prev = &rows[i - 1];
                let mut row = vec![1u128; i + 1];
                for j in 1..i {
                    row[j] = prev[j - 1] + prev[j];
                }
                rows.push(row);
            }
            let choose = |n: u64, k: u64| -> u128 {
                if k > n { 0 } else { rows[n as usize][k as usize] }
            };
            let t = ContingencyTable { a, b, c, d };
            let expected = if t.is_degenerate() {
                1.0
            } else {
                let (total, positives, containing) = (t.total(), a + b, a + c);
                let mut num = 0u128;
                for x in a..=positives.min(containing) {
                    num += choose(containing, x) * choose(total - containing, positives - x);
                }
                num as f64 / choose(total, positives) as f64
            };
            prop_assert!((fisher_exact_greater(&t) - expected).abs() <= 1e-12);
        }
    }
}
