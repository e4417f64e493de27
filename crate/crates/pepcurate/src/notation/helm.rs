//! HELM subset: peptide polymers and pairwise connections only.
//!
//! ```text
//! helm       := polymers '$' connections '$' '$' '$'
//! polymers   := polymer ('|' polymer)*
//! polymer    := 'PEPTIDE' <number> '{' token ('.' token)* '}'
//! connection := id ',' id ',' pos ':' 'R'r '-' pos ':' 'R'r
//! ```
//!
//! Blob/CHEM/RNA polymers, polymer groups, and annotations are out of scope.

use serde::{Deserialize, Serialize};

use super::NotationError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelmConnectionEnd {
    pub polymer: String,
    /// 1-based monomer position, as written in HELM text.
    pub position: usize,
    pub rgroup: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelmConnection {
    pub from: HelmConnectionEnd,
    pub to: HelmConnectionEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelmDocument {
    /// Polymers in declaration order: (id, monomer symbols).
    pub polymers: Vec<(String, Vec<String>)>,
    pub connections: Vec<HelmConnection>,
}

impl HelmDocument {
    pub fn polymer(&self, id: &str) -> Option<&[String]> {
        self.polymers
            .iter()
            .find(|(pid, _)| pid == id)
            .map(|(_, m)| m.as_slice())
    }
}

fn parse_monomer_list(text: &str) -> Result<Vec<String>, NotationError> {
    let mut monomers = Vec::new();
    for token in text.split('.') {
        let token = token.trim();
        let symbol = if let Some(stripped) = token.strip_prefix('[') {
            stripped
                .strip_suffix(']')
                .ok_or(NotationError::UnbalancedBracket)?
                .to_string()
        } else if token.len() == 1 && !token.contains(['{', '}', '$', '|']) {
            token.to_string()
        } else {
            return Err(NotationError::MalformedSections);
        };
        if symbol.is_empty() {
            return Err(NotationError::MalformedSections);
        }
        monomers.push(symbol);
    }
    Ok(monomers)
}

fn parse_connection_end(poly: &str, site: &str) -> Result<HelmConnectionEnd, NotationError> {
    let (pos_str, r_str) = site.split_once(':').ok_or(NotationError::MalformedSections)?;
    let position: usize = pos_str.trim().parse().map_err(|_| NotationError::MalformedSections)?;
    let rgroup: u8 = r_str
        .trim()
        .strip_prefix('R')
        .and_then(|r| r.parse().ok())
        .ok_or(NotationError::MalformedSections)?;
    if position == 0 || !(1..=3).contains(&rgroup) {
        return Err(NotationError::MalformedSections);
    }
    Ok(HelmConnectionEnd { polymer: poly.trim().to_string(), position, rgroup })
}

pub fn parse_helm(text: &str) -> Result<HelmDocument, NotationError> {
    let text = text.trim();
    let sections: Vec<&str> = text.split('$').collect();
    if sections.len() != 5 || !sections[2].is_empty() || !sections[3].is_empty()
        || !sections[4].is_empty()
    {
        return Err(NotationError::MalformedSections);
    }

    let mut polymers = Vec::new();
    for polymer_text in sections[0].split('|') {
        let open = polymer_text.find('{').ok_or(NotationError::MalformedSections)?;
        let close = polymer_text.rfind('}').ok_or(NotationError::MalformedSections)?;
        if close < open {
            return Err(NotationError::MalformedSections);
        }
        let id = polymer_text[..open].trim().to_string();
        if !polymer_text[close + 1..].trim().is_empty() {
            return Err(NotationError::MalformedSections);
        }
        let numeric_suffix = id.strip_prefix("PEPTIDE").map(str::parse::<usize>);
        if !matches!(numeric_suffix, Some(Ok(_))) {
            return Err(NotationError::UnknownPolymerType(id));
        }
        let monomers = parse_monomer_list(&polymer_text[open + 1..close])?;
        if polymers.iter().any(|(pid, _): &(String, _)| *pid == id) {
            return Err(NotationError::MalformedSections);
        }
        polymers.push((id, monomers));
    }

    let mut connections = Vec::new();
    if !sections[1].is_empty() {
        for conn_text in sections[1].split('|') {
            let parts: Vec<&str> = conn_text.split(',').collect();
            if parts.len() != 3 {
                return Err(NotationError::MalformedSections);
            }
            let (site_a, site_b) =
                parts[2].split_once('-').ok_or(NotationError::MalformedSections)?;
            let from = parse_connection_end(parts[0], site_a)?;
            let to = parse_connection_end(parts[1], site_b)?;
            for end in [&from, &to] {
                let length = polymers
                    .iter()
                    .find(|(pid, _)| *pid == end.polymer)
                    .map(|(_, m)| m.len())
                    .ok_or(NotationError::MalformedSections)?;
                if end.position > length {
                    return Err(NotationError::MalformedSections);
                }
            }
            connections.push(HelmConnection { from, to });
        }
    }

    Ok(HelmDocument { polymers, connections })
}

/// Serializes back to the canonical subset form (`...$...$$$`).
pub fn write_helm(doc: &HelmDocument) -> String {
    let polymers = doc
        .polymers
        .iter()
        .map(|(id, monomers)| {
            let body = monomers
                .iter()
                .map(|m| {
                    if m.len() == 1 {
                        m.clone()
                    } else {
                        format!("[{m}]")
                    }
                })
                .collect::<Vec<_>>()
                .join(".");
            format!("{id}{{{body}}}")
        })
        .collect::<Vec<_>>()
        .join("|");
    let connections = doc
        .connections
        .iter()
        .map(|c| {
            format!(
                "{},{},{}:R{}-{}:R{}",
                c.from.polymer, c.to.polymer, c.from.position, c.from.rgroup, c.to.position,
                c.to.rgroup
            )
        })
        .collect::<Vec<_>>()
        .join("|");
    format!("{polymers}${connections}$$$")
}
