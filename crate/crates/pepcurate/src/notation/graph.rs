//! Molecular graph: atoms with element / charge / hydrogen count, bonds with
//! order, plus the isomorphism check used to compare structures.

use serde::{Deserialize, Serialize};

use super::NotationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn valence(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub element: String,
    pub charge: i8,
    /// Attached (implicit-made-explicit) hydrogen count.
    pub hcount: u8,
    pub aromatic: bool,
    /// Attachment-point number for `*` wildcard atoms (R1/R2/R3).
    pub rgroup: Option<u8>,
    /// Stereo annotation carried through from input (`@` / `@@`); informational.
    pub stereo: Option<String>,
}

impl Atom {
    pub fn new(element: impl Into<String>) -> Self {
        Atom {
            element: element.into(),
            charge: 0,
            hcount: 0,
            aromatic: false,
            rgroup: None,
            stereo: None,
        }
    }

    pub fn is_wildcard(&self) -> bool {
        self.element == "*"
    }

    /// Atomic number, with 0 for wildcards and unknown symbols.
    pub fn atomic_number(&self) -> u8 {
        match self.element.as_str() {
            "H" => 1,
            "B" => 5,
            "C" => 6,
            "N" => 7,
            "O" => 8,
            "F" => 9,
            "P" => 15,
            "S" => 16,
            "Cl" => 17,
            "Se" => 34,
            "Br" => 35,
            "I" => 53,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MolecularGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
}

impl MolecularGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn atom_mut(&mut self, i: usize) -> &mut Atom {
        &mut self.atoms[i]
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        self.atoms.push(atom);
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<(), NotationError> {
        if a >= self.atoms.len() || b >= self.atoms.len() || a == b {
            return Err(NotationError::InvalidBond { a, b });
        }
        if self.bond_between(a, b).is_some() {
            return Err(NotationError::InvalidBond { a, b });
        }
        self.bonds.push(Bond { a, b, order });
        Ok(())
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<BondOrder> {
        self.bonds
            .iter()
            .find(|bd| (bd.a == a && bd.b == b) || (bd.a == b && bd.b == a))
            .map(|bd| bd.order)
    }

    pub fn neighbors(&self, i: usize) -> Vec<(usize, BondOrder)> {
        let mut out = Vec::new();
        for bd in &self.bonds {
            if bd.a == i {
                out.push((bd.b, bd.order));
            } else if bd.b == i {
                out.push((bd.a, bd.order));
            }
        }
        out
    }

    pub fn degree(&self, i: usize) -> usize {
        self.bonds.iter().filter(|bd| bd.a == i || bd.b == i).count()
    }

    pub fn has_wildcards(&self) -> bool {
        self.atoms.iter().any(Atom::is_wildcard)
    }

    /// Connected components as sorted atom-index lists, ordered by their
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for (v, _) in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Copy of this graph without the atoms selected by `drop`, bonds
    /// reindexed. Any bond touching a dropped atom is removed.
    pub fn without_atoms(&self, drop: &[bool]) -> MolecularGraph {
        assert_eq!(drop.len(), self.atoms.len());
        let mut remap = vec![usize::MAX; self.atoms.len()];
        let mut g = MolecularGraph::new();
        for (i, atom) in self.atoms.iter().enumerate() {
            if !drop[i] {
                remap[i] = g.add_atom(atom.clone());
            }
        }
        for bd in &self.bonds {
            if !drop[bd.a] && !drop[bd.b] {
                g.bonds.push(Bond { a: remap[bd.a], b: remap[bd.b], order: bd.order });
            }
        }
        g
    }

    /// Relabels atoms by `perm`, where `perm[i]` is the new index of atom `i`.
    pub fn permuted(&self, perm: &[usize]) -> MolecularGraph {
        assert_eq!(perm.len(), self.atoms.len());
        let mut atoms = vec![Atom::new(""); self.atoms.len()];
        for (i, atom) in self.atoms.iter().enumerate() {
            atoms[perm[i]] = atom.clone();
        }
        let bonds = self
            .bonds
            .iter()
            .map(|bd| Bond { a: perm[bd.a], b: perm[bd.b], order: bd.order })
            .collect();
        MolecularGraph { atoms, bonds }
    }
}

/// Node label used for isomorphism pruning; stereo annotations and rgroup
/// numbers on non-wildcards are intentionally ignored.
fn invariant(g: &MolecularGraph, i: usize) -> (String, i8, u8, bool, usize, Option<u8>) {
    let a = g.atom(i);
    (
        a.element.clone(),
        a.charge,
        a.hcount,
        a.aromatic,
        g.degree(i),
        if a.is_wildcard() { a.rgroup } else { None },
    )
}

/// Backtracking graph-isomorphism test with invariant pruning. Compares
/// constitution only (element, charge, H count, aromatic flag, bonds).
pub fn are_isomorphic(g1: &MolecularGraph, g2: &MolecularGraph) -> bool {
    let n = g1.atoms().len();
    if n != g2.atoms().len() || g1.bonds().len() != g2.bonds().len() {
        return false;
    }
    if n == 0 {
        return true;
    }
    let inv1: Vec<_> = (0..n).map(|i| invariant(g1, i)).collect();
    let inv2: Vec<_> = (0..n).map(|i| invariant(g2, i)).collect();
    {
        let mut s1 = inv1.clone();
        let mut s2 = inv2.clone();
        s1.sort();
        s2.sort();
        if s1 != s2 {
            return false;
        }
    }
    let adj1: Vec<Vec<(usize, BondOrder)>> = (0..n).map(|i| g1.neighbors(i)).collect();
    let adj2: Vec<Vec<(usize, BondOrder)>> = (0..n).map(|i| g2.neighbors(i)).collect();

    // Match g1 atoms in order of rarest invariant first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| {
        let count = inv1.iter().filter(|x| **x == inv1[i]).count();
        (count, i)
    });
    // Prefer atoms adjacent to already-ordered ones to keep the partial map tight.
    let mut placed = vec![false; n];
    let mut search_order = Vec::with_capacity(n);
    for &seed in &order {
        if placed[seed] {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([seed]);
        placed[seed] = true;
        while let Some(u) = queue.pop_front() {
            search_order.push(u);
            let mut nbrs: Vec<usize> = adj1[u].iter().map(|&(v, _)| v).collect();
            nbrs.sort_unstable();
            for v in nbrs {
                if !placed[v] {
                    placed[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn backtrack(
        depth: usize,
        search_order: &[usize],
        inv1: &[(String, i8, u8, bool, usize, Option<u8>)],
        inv2: &[(String, i8, u8, bool, usize, Option<u8>)],
        adj1: &[Vec<(usize, BondOrder)>],
        adj2: &[Vec<(usize, BondOrder)>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == search_order.len() {
            return true;
        }
        let u = search_order[depth];
        'cand: for cand in 0..inv2.len() {
            if used[cand] || inv1[u] != inv2[cand] {
                continue;
            }
            // All already-mapped neighbors must be consistent in both directions.
            for &(v, order) in &adj1[u] {
                if map[v] != usize::MAX
                    && adj2[cand]
                        .iter()
                        .find(|&&(w, _)| w == map[v])
                        .map(|&(_, o)| o)
                        != Some(order)
                {
                    continue 'cand;
                }
            }
            for &(w, order) in &adj2[cand] {
                if let Some(v) = map.iter().position(|&m| m == w) {
                    if adj1[u].iter().find(|&&(x, _)| x == v).map(|&(_, o)| o) != Some(order) {
                        continue 'cand;
                    }
                }
            }
            map[u] = cand;
            used[cand] = true;
            if backtrack(depth + 1, search_order, inv1, inv2, adj1, adj2, map, used) {
                return true;
            }
            map[u] = usize::MAX;
            used[cand] = false;
        }
        false
    }

    backtrack(0, &search_order, &inv1, &inv2, &adj1, &adj2, &mut map, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(elements: &[&str]) -> MolecularGraph {
        let mut g = MolecularGraph::new();
        let idx: Vec<usize> = elements.iter().map(|e| g.add_atom(Atom::new(*e))).collect();
        for w in idx.windows(2) {
            g.add_bond(w[0], w[1], BondOrder::Single).unwrap();
        }
        g
    }

    #[test]
    fn isomorphic_under_relabeling() {
        let g = chain(&["C", "C", "O"]);
        let p = g.permuted(&[2, 0, 1]);
        assert!(are_isomorphic(&g, &p));
    }

    #[test]
    fn different_elements_not_isomorphic() {
        assert!(!are_isomorphic(&chain(&["C", "C", "O"]), &chain(&["C", "C", "N"])));
    }

    #[test]
    fn different_connectivity_not_isomorphic() {
        // Path C-C-C-C vs star C(C)(C)C
        let path = chain(&["C", "C", "C", "C"]);
        let mut star = MolecularGraph::new();
        let c = star.add_atom(Atom::new("C"));
        for _ in 0..3 {
            let x = star.add_atom(Atom::new("C"));
            star.add_bond(c, x, BondOrder::Single).unwrap();
        }
        assert!(!are_isomorphic(&path, &star));
    }

    #[test]
    fn bond_order_matters() {
        let mut single = chain(&["C", "O"]);
        let mut double = chain(&["C", "O"]);
        single.bonds[0].order = BondOrder::Single;
        double.bonds[0].order = BondOrder::Double;
        assert!(!are_isomorphic(&single, &double));
    }

    #[test]
    fn duplicate_bond_rejected() {
        let mut g = chain(&["C", "C"]);
        assert!(g.add_bond(0, 1, BondOrder::Double).is_err());
        assert!(g.add_bond(0, 0, BondOrder::Single).is_err());
    }

    #[test]
    fn components_split() {
        let mut g = chain(&["C", "C"]);
        g.add_atom(Atom::new("O"));
        assert_eq!(g.components().len(), 2);
        assert!(!g.is_connected());
    }
}
