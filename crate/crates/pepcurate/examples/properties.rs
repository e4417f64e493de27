//! Sequence validation, k-mer profiles, and physicochemical properties.
//!
//! ```bash
//! cargo run -p pepcurate --example properties
//! ```

use pepcurate::seqcore::{
    composition, gravy, isoelectric_point, kmers, net_charge, validate_sequence,
    ValidationPolicy,
};

fn main() {
    // Validation normalizes case and applies the ambiguity policy.
    let seq = validate_sequence("gigavlkvlTTGLPALIS", "magainin_fragment", ValidationPolicy::StrictCanonical)
        .expect("canonical sequence")
        .accepted()
        .expect("accepted");
    println!("sequence  {seq} (length {})", seq.len());

    // The strict policy rejects ambiguity codes like U (selenocysteine).
    let rejected = validate_sequence("GIVEQCUASVC", "u_demo", ValidationPolicy::StrictCanonical);
    println!("strict U  {rejected:?}");
    // The drop policy marks the record for discarding instead.
    let dropped = validate_sequence("GIVEQCUASVC", "u_demo", ValidationPolicy::DropRecord).unwrap();
    println!("dropped   {dropped:?}");

    // k-mer multiset: every window of length 3.
    let profile = kmers(&seq, 3);
    println!("3-mers    {} windows, {} distinct", profile.total(), profile.counts.len());

    // Amino-acid composition is a distribution over the 20-letter alphabet.
    let freq = composition(&seq, 1).unwrap();
    let top = freq.iter().cloned().fold(0.0f64, f64::max);
    println!("max 1-mer frequency {top:.3}");

    // Henderson-Hasselbalch net charge, Kyte-Doolittle GRAVY, and the
    // bisection isoelectric point.
    for ph in [3.0, 5.0, 7.0, 9.0, 11.0] {
        println!("net charge at pH {ph:>4}: {:+.3}", net_charge(&seq, ph).unwrap());
    }
    println!("gravy     {:+.3}", gravy(&seq).unwrap());
    println!("pI        {:.2}", isoelectric_point(&seq).unwrap());
}
