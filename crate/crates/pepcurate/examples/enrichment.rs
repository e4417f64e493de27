//! k-mer enrichment: Fisher exact tests per k-mer, BH correction, gate
//! filters, and motif merging.
//!
//! ```bash
//! cargo run -p pepcurate --example enrichment
//! ```

use pepcurate::enrich::{
    bh_fdr, choose_k, find_enriched_kmers, fisher_exact_greater, merge_motifs, odds_ratio,
    ContingencyTable, EnrichmentParams,
};
use pepcurate::seqcore::{validate_sequence, PeptideSequence, ValidationPolicy};

fn seqs(raw: &[String]) -> Vec<PeptideSequence> {
    raw.iter()
        .enumerate()
        .map(|(i, s)| {
            validate_sequence(s, format!("s{i}"), ValidationPolicy::StrictCanonical)
                .unwrap()
                .accepted()
                .unwrap()
        })
        .collect()
}

fn main() {
    // A single 2x2 table: 9 of 10 positives contain the k-mer, 1 of 10
    // negatives does.
    let table = ContingencyTable { a: 9, b: 1, c: 1, d: 9 };
    println!("fisher p  {:.3e}", fisher_exact_greater(&table));
    println!("odds      {:.1}", odds_ratio(&table));
    println!("bh        {:?}", bh_fdr(&[0.001, 0.02, 0.9], 0.05).reject);
    println!("k choice  mean 20 -> {}, mean 8 -> {}", choose_k(20.0), choose_k(8.0));

    // Synthetic dataset: a planted motif in most positives.
    let mut pos_raw: Vec<String> = (0..12)
        .map(|i| format!("{}KWWKF{}", "ADGSTN".chars().nth(i % 6).unwrap(), "LIVMFY".chars().nth(i % 6).unwrap()))
        .collect();
    pos_raw.extend((0..4).map(|i| format!("QQQNNN{}EEE", "ADGS".chars().nth(i).unwrap())));
    let neg_raw: Vec<String> = (0..16).map(|i| format!("HHHSSS{}TTT", "ADGSTNLI".chars().nth(i % 8).unwrap())).collect();

    let params = EnrichmentParams { k: Some(5), ..Default::default() };
    let hits = find_enriched_kmers(&seqs(&pos_raw), &seqs(&neg_raw), &params).unwrap();
    println!("\n{} enriched 5-mers:", hits.len());
    for h in &hits {
        println!(
            "  {}  a={} c={} p={:.2e} q={:.2e} odds={:.1} support={}",
            h.kmer, h.table.a, h.table.c, h.p, h.q, h.odds, h.support.len()
        );
    }

    let clusters = merge_motifs(&hits, params.min_jaccard);
    println!("merged into {} motif clusters", clusters.len());
    for (i, c) in clusters.iter().enumerate() {
        println!("  cluster {i}: kmers {:?} covering {} positives", c.kmers, c.support.len());
    }
}
