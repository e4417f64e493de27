//! BILN and HELM parsing, molecule assembly, SMILES round trips, X-collapse,
//! and canonical homolog mapping.
//!
//! ```bash
//! cargo run -p pepcurate --example notation_roundtrip
//! ```

use pepcurate::notation::{
    are_isomorphic, assemble_molecule, biln_to_helm, collapse_noncanonical,
    nearest_canonical_homolog, parse_biln, parse_smiles, write_helm, write_smiles,
    MonomerLibrary,
};

fn main() {
    let library = MonomerLibrary::default_library();
    println!("library: {} monomers", library.len());

    // A cyclic peptide with a disulfide bridge and an N-methyl residue.
    let text = "C(1,3)-[meA]-K-G-C(1,3)";
    let doc = parse_biln(text).unwrap();
    println!("biln     {text}");
    println!("chains   {:?}", doc.chains);
    println!("links    {:?}", doc.crosslinks);

    // BILN -> HELM carries the cross-link as an explicit connection.
    let helm = biln_to_helm(&doc);
    println!("helm     {}", write_helm(&helm));

    // Assembly condenses the backbone and closes the disulfide.
    let graph = assemble_molecule(&doc, &library).unwrap();
    let smiles = write_smiles(&graph);
    println!("smiles   {smiles}");

    // The SMILES round trip preserves the molecular graph.
    let reparsed = parse_smiles(&smiles).unwrap();
    println!("round trip isomorphic: {}", are_isomorphic(&graph, &reparsed));

    // X-collapse maps every non-canonical monomer to the ambiguity token.
    let collapsed = collapse_noncanonical(&doc, "demo");
    println!("collapse {}", collapsed.residues());

    // Nearest canonical homolog replaces modified residues with their
    // stand-ins (N-methyl-alanine becomes alanine).
    let homolog = nearest_canonical_homolog(&doc, &library, "demo").unwrap();
    println!("homolog  {}", homolog.residues());

    // Worked check: glycine and diglycine.
    for (biln, expect) in [("G", "NCC(=O)O"), ("G-G", "NCC(=O)NCC(=O)O")] {
        let g = assemble_molecule(&parse_biln(biln).unwrap(), &library).unwrap();
        let ok = are_isomorphic(&g, &parse_smiles(expect).unwrap());
        println!("{biln:<5} matches {expect}: {ok}");
    }
}
