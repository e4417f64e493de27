//! SMILES subset parser and deterministic writer.
//!
//! Supported input: organic-subset atoms (B, C, N, O, P, S, F, Cl, Br, I),
//! aromatic lowercase forms, `*` wildcards, bracket atoms with charge,
//! H-count, `@`/`@@` stereo annotations and `:n` attachment maps, branches,
//! ring closures (digits and `%nn`), bond symbols `- = # :` and the
//! directional `/` `\` (kept as plain single bonds). Isotopes and extended
//! chirality are rejected as unsupported.
//!
//! The writer emits a deterministic depth-first serialization starting from
//! the lowest-ranked atom under the ordering (element, degree, charge, input
//! index). It does not promise canonical SMILES; structural equality is
//! checked with [`super::graph::are_isomorphic`]. Stereo annotations are
//! retained on parsed atoms but not re-serialized.

use std::collections::BTreeMap;

use super::graph::{Atom, BondOrder, MolecularGraph};
use super::NotationError;

fn syntax(msg: impl Into<String>) -> NotationError {
    NotationError::SmilesSyntax(msg.into())
}

fn default_valence(element: &str) -> Option<f64> {
    Some(match element {
        "B" => 3.0,
        "C" => 4.0,
        "N" => 3.0,
        "O" => 2.0,
        "P" => 3.0,
        "S" => 2.0,
        "F" | "Cl" | "Br" | "I" => 1.0,
        "*" => 0.0,
        _ => return None,
    })
}

const AROMATIC_ORGANIC: [char; 6] = ['b', 'c', 'n', 'o', 'p', 's'];

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.bytes.get(self.pos).map(|&b| b as char)
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn take_digits(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.bytes[start..self.pos])
                .ok()
                .and_then(|s| s.parse().ok())
        }
    }
}

/// Parses a SMILES string into a molecular graph. `.`-separated fragments
/// become disconnected components of one graph.
pub fn parse_smiles(text: &str) -> Result<MolecularGraph, NotationError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(syntax("empty SMILES"));
    }
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    let mut g = MolecularGraph::new();
    // Atoms written bare get implicit hydrogens filled in at the end.
    let mut bare = Vec::new();
    let mut prev: Option<usize> = None;
    let mut stack: Vec<Option<usize>> = Vec::new();
    let mut pending: Option<BondOrder> = None;
    let mut rings: BTreeMap<u32, (usize, Option<BondOrder>)> = BTreeMap::new();

    while let Some(c) = p.peek() {
        match c {
            '(' => {
                p.next();
                if prev.is_none() {
                    return Err(syntax("branch before any atom"));
                }
                stack.push(prev);
            }
            ')' => {
                p.next();
                prev = stack.pop().ok_or_else(|| syntax("unmatched ')'"))?;
            }
            '.' => {
                p.next();
                if pending.is_some() {
                    return Err(syntax("bond before '.'"));
                }
                prev = None;
            }
            '-' | '/' | '\\' => {
                p.next();
                set_pending(&mut pending, BondOrder::Single)?;
            }
            '=' => {
                p.next();
                set_pending(&mut pending, BondOrder::Double)?;
            }
            '#' => {
                p.next();
                set_pending(&mut pending, BondOrder::Triple)?;
            }
            ':' => {
                p.next();
                set_pending(&mut pending, BondOrder::Aromatic)?;
            }
            '%' => {
                p.next();
                let d1 = p.next().filter(char::is_ascii_digit).ok_or_else(|| syntax("bad %nn"))?;
                let d2 = p.next().filter(char::is_ascii_digit).ok_or_else(|| syntax("bad %nn"))?;
                let num = (d1 as u32 - '0' as u32) * 10 + (d2 as u32 - '0' as u32);
                close_ring(&mut g, &mut rings, prev, &mut pending, num)?;
            }
            '0'..='9' => {
                p.next();
                close_ring(&mut g, &mut rings, prev, &mut pending, c as u32 - '0' as u32)?;
            }
            '[' => {
                p.next();
                let atom = parse_bracket_atom(&mut p)?;
                attach(&mut g, &mut prev, &mut pending, atom)?;
                bare.push(false);
            }
            '*' => {
                p.next();
                attach(&mut g, &mut prev, &mut pending, Atom::new("*"))?;
                bare.push(true);
            }
            c if c.is_ascii_uppercase() => {
                p.next();
                let element = match (c, p.peek()) {
                    ('C', Some('l')) => {
                        p.next();
                        "Cl".to_string()
                    }
                    ('B', Some('r')) => {
                        p.next();
                        "Br".to_string()
                    }
                    _ => c.to_string(),
                };
                if default_valence(&element).is_none() {
                    return Err(NotationError::UnsupportedSmilesFeature(format!(
                        "atom {element:?} outside the organic subset must be bracketed"
                    )));
                }
                attach(&mut g, &mut prev, &mut pending, Atom::new(element))?;
                bare.push(true);
            }
            c if AROMATIC_ORGANIC.contains(&c) => {
                p.next();
                let mut atom = Atom::new(c.to_ascii_uppercase().to_string());
                atom.aromatic = true;
                attach(&mut g, &mut prev, &mut pending, atom)?;
                bare.push(true);
            }
            other => {
                return Err(NotationError::UnsupportedSmilesFeature(format!(
                    "unexpected character {other:?}"
                )))
            }
        }
    }

    if let Some((num, _)) = rings.iter().next() {
        return Err(NotationError::RingClosureMismatch(format!(
            "ring bond {num} left open"
        )));
    }
    if !stack.is_empty() {
        return Err(syntax("unclosed '('"));
    }
    if pending.is_some() {
        return Err(syntax("dangling bond at end of input"));
    }

    for (i, was_bare) in bare.iter().enumerate() {
        if *was_bare {
            g.atom_mut(i).hcount = implied_hydrogens(&g, i);
        }
    }
    Ok(g)
}

fn set_pending(pending: &mut Option<BondOrder>, order: BondOrder) -> Result<(), NotationError> {
    if pending.replace(order).is_some() {
        return Err(syntax("two consecutive bond symbols"));
    }
    Ok(())
}

fn attach(
    g: &mut MolecularGraph,
    prev: &mut Option<usize>,
    pending: &mut Option<BondOrder>,
    atom: Atom,
) -> Result<(), NotationError> {
    let aromatic_new = atom.aromatic;
    let idx = g.add_atom(atom);
    if let Some(p) = *prev {
        let order = pending.take().unwrap_or({
            if aromatic_new && g.atom(p).aromatic {
                BondOrder::Aromatic
            } else {
                BondOrder::Single
            }
        });
        g.add_bond(p, idx, order)?;
    } else if pending.is_some() {
        return Err(syntax("bond with no preceding atom"));
    }
    *prev = Some(idx);
    Ok(())
}

fn close_ring(
    g: &mut MolecularGraph,
    rings: &mut BTreeMap<u32, (usize, Option<BondOrder>)>,
    prev: Option<usize>,
    pending: &mut Option<BondOrder>,
    num: u32,
) -> Result<(), NotationError> {
    let here = prev.ok_or_else(|| syntax("ring closure before any atom"))?;
    match rings.remove(&num) {
        None => {
            rings.insert(num, (here, pending.take()));
        }
        Some((other, opened_order)) => {
            if other == here {
                return Err(NotationError::RingClosureMismatch(format!(
                    "ring bond {num} closes onto its own atom"
                )));
            }
            let closing = pending.take();
            let order = match (opened_order, closing) {
                (Some(a), Some(b)) if a != b => {
                    return Err(NotationError::RingClosureMismatch(format!(
                        "ring bond {num} opened and closed with different orders"
                    )))
                }
                (Some(a), _) => a,
                (None, Some(b)) => b,
                (None, None) => {
                    if g.atom(here).aromatic && g.atom(other).aromatic {
                        BondOrder::Aromatic
                    } else {
                        BondOrder::Single
                    }
                }
            };
            g.add_bond(other, here, order)?;
        }
    }
    Ok(())
}

fn parse_bracket_atom(p: &mut Parser) -> Result<Atom, NotationError> {
    if p.peek().is_some_and(|c| c.is_ascii_digit()) {
        return Err(NotationError::UnsupportedSmilesFeature(
            "isotope specifications are not supported".into(),
        ));
    }
    let mut atom = match p.next() {
        Some('*') => Atom::new("*"),
        Some(c) if c.is_ascii_uppercase() => {
            // Inside brackets a lowercase letter can only be the second
            // letter of a two-letter symbol (Cl, Br, Se, ...).
            let mut element = c.to_string();
            if p.peek().is_some_and(|n| n.is_ascii_lowercase()) {
                element.push(p.next().unwrap());
            }
            Atom::new(element)
        }
        Some(c) if AROMATIC_ORGANIC.contains(&c) => {
            let mut a = Atom::new(c.to_ascii_uppercase().to_string());
            a.aromatic = true;
            a
        }
        other => return Err(syntax(format!("bad bracket atom start {other:?}"))),
    };
    loop {
        match p.next() {
            Some(']') => break,
            Some('@') => {
                let mut tag = String::from("@");
                if p.peek() == Some('@') {
                    p.next();
                    tag.push('@');
                }
                // @TH1 / @AL1 / @SP1 / @TB1 / @OH1 classes; a lone 'H' here
                // is the hydrogen count, not a class.
                let rest = &p.bytes[p.pos..];
                if ["TH", "AL", "SP", "TB", "OH"].iter().any(|cls| rest.starts_with(cls.as_bytes()))
                {
                    return Err(NotationError::UnsupportedSmilesFeature(
                        "extended chirality classes are not supported".into(),
                    ));
                }
                atom.stereo = Some(tag);
            }
            Some('H') => {
                atom.hcount = p.take_digits().unwrap_or(1) as u8;
            }
            Some('+') => {
                atom.charge = match p.take_digits() {
                    Some(n) => n as i8,
                    None => {
                        let mut q = 1i8;
                        while p.peek() == Some('+') {
                            p.next();
                            q += 1;
                        }
                        q
                    }
                };
            }
            Some('-') => {
                atom.charge = match p.take_digits() {
                    Some(n) => -(n as i8),
                    None => {
                        let mut q = -1i8;
                        while p.peek() == Some('-') {
                            p.next();
                            q -= 1;
                        }
                        q
                    }
                };
            }
            Some(':') => {
                let num = p.take_digits().ok_or_else(|| syntax("':' without map number"))?;
                if num == 0 || num > 99 {
                    return Err(syntax(format!("attachment map {num} out of range")));
                }
                atom.rgroup = Some(num as u8);
            }
            Some(other) => {
                return Err(NotationError::UnsupportedSmilesFeature(format!(
                    "bracket token {other:?}"
                )))
            }
            None => return Err(syntax("unterminated bracket atom")),
        }
    }
    Ok(atom)
}

/// Hydrogens a bare-written atom of this element would carry given its bonds.
fn implied_hydrogens(g: &MolecularGraph, i: usize) -> u8 {
    let Some(valence) = default_valence(&g.atom(i).element) else {
        return 0;
    };
    let bond_sum: f64 = g.neighbors(i).iter().map(|&(_, o)| o.valence()).sum();
    let used = bond_sum.ceil();
    if valence > used {
        (valence - used) as u8
    } else {
        0
    }
}

/// Serializes a graph to SMILES. Disconnected components are joined with `.`.
pub fn write_smiles(g: &MolecularGraph) -> String {
    g.components()
        .iter()
        .map(|comp| write_component(g, comp))
        .collect::<Vec<_>>()
        .join(".")
}

fn rank(g: &MolecularGraph, i: usize) -> (String, usize, i8, usize) {
    let a = g.atom(i);
    (a.element.clone(), g.degree(i), a.charge, i)
}

fn write_component(g: &MolecularGraph, comp: &[usize]) -> String {
    let start = comp
        .iter()
        .copied()
        .min_by(|&a, &b| rank(g, a).cmp(&rank(g, b)))
        .expect("non-empty component");

    // Spanning-tree DFS; edges back to visited atoms become ring closures.
    let mut visited: BTreeMap<usize, ()> = BTreeMap::new();
    let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut ring_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut emit_order = Vec::new();
    let mut stack = vec![(start, usize::MAX)];
    while let Some((u, parent)) = stack.pop() {
        if visited.contains_key(&u) {
            continue;
        }
        visited.insert(u, ());
        emit_order.push(u);
        let mut nbrs = g.neighbors(u);
        nbrs.sort_by(|&(a, _), &(b, _)| rank(g, a).cmp(&rank(g, b)));
        // Push in reverse so lower-ranked neighbors are visited first.
        for &(v, _) in nbrs.iter().rev() {
            if v == parent {
                continue;
            }
            if visited.contains_key(&v) {
                // Ring bond, recorded once per endpoint.
                if !ring_at.get(&u).is_some_and(|r| r.contains(&v)) {
                    ring_at.entry(u).or_default().push(v);
                    ring_at.entry(v).or_default().push(u);
                }
            } else {
                stack.push((v, u));
            }
        }
        if parent != usize::MAX {
            children.entry(parent).or_default().push(u);
        }
    }

    // Ring-closure digits assigned in emission order, reusing freed numbers.
    let order_of: BTreeMap<usize, usize> =
        emit_order.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut digit_of: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut in_use: Vec<bool> = vec![false; 100];
    let mut out = String::new();
    emit(
        g, start, None, &children, &ring_at, &order_of, &mut digit_of, &mut in_use, &mut out,
    );
    out
}

fn bond_symbol(g: &MolecularGraph, a: usize, b: usize, order: BondOrder) -> &'static str {
    let both_aromatic = g.atom(a).aromatic && g.atom(b).aromatic;
    match order {
        BondOrder::Single => {
            if both_aromatic {
                "-"
            } else {
                ""
            }
        }
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic => {
            if both_aromatic {
                ""
            } else {
                ":"
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn emit(
    g: &MolecularGraph,
    u: usize,
    parent: Option<usize>,
    children: &BTreeMap<usize, Vec<usize>>,
    ring_at: &BTreeMap<usize, Vec<usize>>,
    order_of: &BTreeMap<usize, usize>,
    digit_of: &mut BTreeMap<(usize, usize), u32>,
    in_use: &mut [bool],
    out: &mut String,
) {
    if let Some(p) = parent {
        out.push_str(bond_symbol(g, p, u, g.bond_between(p, u).expect("tree bond")));
    }
    out.push_str(&atom_token(g, u));
    if let Some(partners) = ring_at.get(&u) {
        let mut partners = partners.clone();
        partners.sort_by_key(|v| order_of[v]);
        for v in partners {
            let key = (u.min(v), u.max(v));
            match digit_of.get(&key) {
                None => {
                    let digit = (1..100).find(|&d| !in_use[d as usize]).expect("ring digits");
                    in_use[digit as usize] = true;
                    digit_of.insert(key, digit);
                    out.push_str(bond_symbol(g, u, v, g.bond_between(u, v).expect("ring bond")));
                    push_ring_digit(out, digit);
                }
                Some(&digit) => {
                    in_use[digit as usize] = false;
                    push_ring_digit(out, digit);
                }
            }
        }
    }
    if let Some(kids) = children.get(&u) {
        for (i, &v) in kids.iter().enumerate() {
            let last = i + 1 == kids.len();
            if !last {
                out.push('(');
            }
            emit(g, v, Some(u), children, ring_at, order_of, digit_of, in_use, out);
            if !last {
                out.push(')');
            }
        }
    }
}

fn push_ring_digit(out: &mut String, digit: u32) {
    if digit < 10 {
        out.push(char::from_digit(digit, 10).unwrap());
    } else {
        out.push('%');
        out.push_str(&format!("{digit:02}"));
    }
}

fn atom_token(g: &MolecularGraph, i: usize) -> String {
    let a = g.atom(i);
    let organic = default_valence(&a.element).is_some() && a.element != "*";
    let aromatic_ok = !a.aromatic
        || matches!(a.element.as_str(), "B" | "C" | "N" | "O" | "P" | "S");
    let plain_wildcard = a.element == "*" && a.rgroup.is_none() && a.charge == 0;
    let hydrogens_implied = organic && implied_hydrogens(g, i) == a.hcount;
    if a.charge == 0 && a.rgroup.is_none() && aromatic_ok && (plain_wildcard || hydrogens_implied)
    {
        let symbol = if a.aromatic {
            a.element.to_ascii_lowercase()
        } else {
            a.element.clone()
        };
        return symbol;
    }
    let mut t = String::from("[");
    let symbol = if a.aromatic && aromatic_ok {
        a.element.to_ascii_lowercase()
    } else {
        a.element.clone()
    };
    t.push_str(&symbol);
    match a.hcount {
        0 => {}
        1 => t.push('H'),
        n => t.push_str(&format!("H{n}")),
    }
    match a.charge {
        0 => {}
        1 => t.push('+'),
        -1 => t.push('-'),
        n if n > 0 => t.push_str(&format!("+{n}")),
        n => t.push_str(&format!("{n}")),
    }
    if let Some(r) = a.rgroup {
        t.push(':');
        t.push_str(&r.to_string());
    }
    t.push(']');
    t
}
