//! Morgan fingerprints, Tanimoto similarity, and molecule-set metrics.
//!
//! ```bash
//! cargo run -p pepcurate --example fingerprints
//! ```

use pepcurate::fingerprint::{
    internal_diversity, morgan_fingerprint, novelty, tanimoto, Fingerprint, DEFAULT_RADIUS,
    DEFAULT_WIDTH, ECFP6_RADIUS,
};
use pepcurate::notation::{assemble_molecule, parse_biln, MonomerLibrary};

fn fingerprint_of(biln: &str, library: &MonomerLibrary, radius: u32) -> Fingerprint {
    let graph = assemble_molecule(&parse_biln(biln).unwrap(), library).unwrap();
    morgan_fingerprint(&graph, radius, DEFAULT_WIDTH).unwrap()
}

fn main() {
    let library = MonomerLibrary::default_library();

    let peptides = ["K-W-K-W-K", "K-W-K-W-R", "A-G-S-T-N", "F-F-F-F-F"];
    let fps: Vec<Fingerprint> = peptides
        .iter()
        .map(|p| fingerprint_of(p, &library, DEFAULT_RADIUS))
        .collect();

    println!("pairwise Tanimoto (radius {DEFAULT_RADIUS}, {DEFAULT_WIDTH} bits):");
    for i in 0..peptides.len() {
        for j in i + 1..peptides.len() {
            let s = tanimoto(&fps[i], &fps[j]).unwrap();
            println!("  {:<10} vs {:<10} {s:.3}", peptides[i], peptides[j]);
        }
    }

    // ECFP6-style parity uses radius 3 over the same graphs.
    let ecfp6 = fingerprint_of(peptides[0], &library, ECFP6_RADIUS);
    println!("radius-3 bits set: {}", ecfp6.popcount());

    // Set metrics used to evaluate generated molecule collections.
    println!("internal diversity: {:.3}", internal_diversity(&fps).unwrap());
    let reference = &fps[..2];
    let generated = &fps[1..];
    println!("novelty vs first two: {:.3}", novelty(generated, reference).unwrap());
}
