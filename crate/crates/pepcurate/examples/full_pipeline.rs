//! The complete curation pipeline on a synthetic dataset:
//! clean -> negative sampling -> hybrid split -> audit -> stats,
//! writing every artifact to `pepcurate_demo_out/`.
//!
//! ```bash
//! cargo run --release -p pepcurate --example full_pipeline
//! ```

use pepcurate::io::RawRecord;
use pepcurate::negsamp::SourceDataset;
use pepcurate::pipeline::{run_classification_pipeline, PipelineConfig};
use pepcurate::seqcore::{validate_sequence, PeptideSequence, ValidationPolicy};

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn synthetic(n: usize, stream: u64, motif: Option<&str>) -> Vec<String> {
    let letters = b"ACDEFGHIKLMNPQRSTVWY";
    let mut state = stream.wrapping_mul(0x5851F42D4C957F2D) ^ 0xDA3E39CB94B95BDB;
    (0..n)
        .map(|i| {
            let len = 10 + (splitmix(&mut state) % 14) as usize;
            let mut s: String =
                (0..len).map(|_| letters[(splitmix(&mut state) % 20) as usize] as char).collect();
            if let Some(m) = motif {
                if i % 3 != 0 {
                    s.insert_str(2, m);
                }
            }
            s
        })
        .collect()
}

fn main() {
    // Raw positives, some carrying a planted motif and some near-duplicates.
    let mut raw = synthetic(150, 1, Some("KWWKF"));
    let dupes: Vec<String> = raw[..20].to_vec();
    raw.extend(dupes);
    let positive_rows: Vec<RawRecord> = raw
        .into_iter()
        .map(|sequence| RawRecord {
            sequence,
            label: "1".into(),
            source: Some("demo".into()),
            protein: None,
        })
        .collect();

    // Two bioactive source datasets serve as the negative pool.
    let to_seqs = |texts: Vec<String>, tag: &str| -> Vec<PeptideSequence> {
        texts
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                validate_sequence(&s, format!("{tag}{i:04}"), ValidationPolicy::DropRecord)
                    .unwrap()
                    .accepted()
                    .unwrap()
            })
            .collect()
    };
    let datasets = vec![
        SourceDataset { name: "activity_a".into(), seqs: to_seqs(synthetic(300, 2, None), "a") },
        SourceDataset { name: "activity_b".into(), seqs: to_seqs(synthetic(300, 3, None), "b") },
    ];

    let config = PipelineConfig { seed: 42, ..Default::default() };
    let out_dir = std::path::Path::new("pepcurate_demo_out");
    let summary =
        run_classification_pipeline(&positive_rows, &datasets, None, &config, out_dir).unwrap();

    println!("cleaned positives : {}", summary.cleaned);
    println!("negatives sampled : {} via {}", summary.negatives, summary.negative_strategy);
    println!("js thresholds pass: {}", summary.js_pass);
    println!("split counts      : {:?}", summary.split_counts);
    println!("audit violations  : {}", summary.audit_violations);
    println!("\nartifacts in {}:", out_dir.display());
    let mut names: Vec<String> = std::fs::read_dir(out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for name in names {
        println!("  {name}");
    }
}
