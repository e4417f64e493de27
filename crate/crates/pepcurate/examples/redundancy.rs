//! Identity clustering, redundancy removal, similarity filtering, and IQR
//! label aggregation.
//!
//! ```bash
//! cargo run -p pepcurate --example redundancy
//! ```

use pepcurate::cleanse::{
    aggregate_duplicates, align_pair, cluster_by_identity, filter_similar_to, isolation_sweep,
    remove_redundancy, AlignmentParams, Measurement,
};
use pepcurate::seqcore::{validate_sequence, PeptideSequence, ValidationPolicy};

fn seq(s: &str, id: &str) -> PeptideSequence {
    validate_sequence(s, id, ValidationPolicy::StrictCanonical)
        .unwrap()
        .accepted()
        .unwrap()
}

fn main() {
    // A mutation fan around one lead peptide plus two unrelated sequences.
    let lead = "GIGKFLHSAKKFGKAFVGEIMNS";
    let mut seqs: Vec<PeptideSequence> = (0..4)
        .map(|i| {
            let mut v = lead.as_bytes().to_vec();
            v[2 + i] = b'A';
            seq(std::str::from_utf8(&v).unwrap(), &format!("variant{i}"))
        })
        .collect();
    seqs.push(seq(lead, "lead"));
    seqs.push(seq("QQWWEEQQWWEEQQWWEE", "unrelated1"));
    seqs.push(seq("TTTTTPPPPPTTTTTPPPPP", "unrelated2"));

    let params = AlignmentParams::default();
    let r = align_pair(&seqs[0], &seqs[4]);
    println!("variant0 vs lead: identity {:.3}, coverage {:.2}/{:.2}", r.identity, r.cov_query, r.cov_target);

    let clusters = cluster_by_identity(&seqs, &params);
    println!("{} clusters over {} sequences", clusters.n_clusters(), seqs.len());
    for (cid, members) in clusters.members.iter().enumerate() {
        let rep = clusters.representatives[cid];
        let ids: Vec<&str> = members.iter().map(|&i| seqs[i].id()).collect();
        println!("  cluster {cid} (rep {}): {ids:?}", seqs[rep].id());
    }

    let kept = remove_redundancy(&seqs, &params);
    println!("representatives kept: {:?}", kept.iter().map(|&i| seqs[i].id()).collect::<Vec<_>>());

    // Pool filtering at the lowered 0.6 identity threshold.
    let positives = vec![seqs[4].clone()];
    let retained = filter_similar_to(&seqs, &positives, &params.with_identity(0.6));
    println!("pool kept after 0.6 filter: {:?}", retained.iter().map(|&i| seqs[i].id()).collect::<Vec<_>>());

    // Singleton ratio rises with the identity threshold.
    for (t, ratio) in isolation_sweep(&seqs, &[0.3, 0.6, 0.9], &params) {
        println!("threshold {t:.1}: isolated ratio {ratio:.2}");
    }

    // Repeated measurements of one sequence: the IQR fence drops the outlier.
    let rows: Vec<Measurement> = [0.778, 0.602, 0.778, 1.792, 0.602]
        .iter()
        .map(|&v| Measurement {
            sequence: "GILSSIKGVAKGVAKNVAAQLLDTLKCKITGC".into(),
            value: v,
            unit: Some("lg_uM".into()),
        })
        .collect();
    let report = aggregate_duplicates(&rows).unwrap();
    let rec = &report.records[0];
    println!(
        "IQR aggregation: {} measurements, {} removed, final label {:.3}",
        rec.n_measurements, rec.n_removed, rec.final_label
    );
}
