//! Domain ontology: concepts with a taxonomy, plus a thesaurus of derived terms.
//!
//! A term listed under two distinct concepts is a homonym; two terms listed under
//! the same concept are synonyms.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Canonical form of a term.
///
/// Composed Unicode, lowercase, trimmed, internal whitespace runs collapsed. A trailing
/// `()` marker is kept and glued to the stem, so `"Lire ()"` becomes `"lire()"`.
pub fn normalize_term(raw: &str) -> String {
    let folded: String = raw.nfc().collect::<String>().to_lowercase().nfc().collect();
    let collapsed = folded.split_whitespace().collect::<Vec<_>>().join(" ");
    match collapsed.strip_suffix("()") {
        Some(stem) => format!("{}()", stem.trim_end()),
        None => collapsed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConcept {
    pub id: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub definitions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThesaurusEntry {
    pub concept: String,
    pub terms: Vec<String>,
}

/// Entries hold normalized terms, one entry per concept, in concept declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Thesaurus {
    pub entries: Vec<ThesaurusEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AnchorResult {
    Unique(String),
    /// Homonymous term; always two or more concept ids.
    Ambiguous(Vec<String>),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Same,
    HomonymSharedTerm,
    Unrelated,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOntology {
    concepts: Vec<DomainConcept>,
    #[serde(default)]
    thesaurus: Vec<ThesaurusEntry>,
}

#[derive(Debug, Clone, Default)]
pub struct DomainOntology {
    concepts: Vec<DomainConcept>,
    thesaurus: Thesaurus,
    by_id: HashMap<String, usize>,
    // term -> concept ids listing it, in concept order
    by_term: BTreeMap<String, Vec<String>>,
}

impl DomainOntology {
    pub fn new(concepts: Vec<DomainConcept>, entries: Vec<ThesaurusEntry>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(concepts.len());
        for (idx, c) in concepts.iter().enumerate() {
            if by_id.insert(c.id.clone(), idx).is_some() {
                return Err(Error::DuplicateConcept(c.id.clone()));
            }
        }
        for c in &concepts {
            if let Some(parent) = &c.parent {
                if !by_id.contains_key(parent) {
                    return Err(Error::DanglingParent {
                        concept: c.id.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        check_acyclic(&concepts, &by_id)?;

        let mut terms_of: Vec<Vec<String>> = vec![Vec::new(); concepts.len()];
        for entry in entries {
            let idx = *by_id
                .get(&entry.concept)
                .ok_or_else(|| Error::DanglingThesaurusConcept(entry.concept.clone()))?;
            let mut in_entry = HashSet::new();
            for raw in &entry.terms {
                let term = normalize_term(raw);
                if !in_entry.insert(term.clone()) {
                    return Err(Error::DuplicateThesaurusTerm {
                        concept: entry.concept.clone(),
                        term,
                    });
                }
                if !terms_of[idx].contains(&term) {
                    terms_of[idx].push(term);
                }
            }
        }

        let mut thesaurus = Thesaurus::default();
        let mut by_term: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (c, mut terms) in concepts.iter().zip(terms_of) {
            let label = normalize_term(&c.label);
            if !label.is_empty() && !terms.contains(&label) {
                terms.insert(0, label);
            }
            for t in &terms {
                by_term.entry(t.clone()).or_default().push(c.id.clone());
            }
            thesaurus.entries.push(ThesaurusEntry {
                concept: c.id.clone(),
                terms,
            });
        }

        Ok(DomainOntology {
            concepts,
            thesaurus,
            by_id,
            by_term,
        })
    }

    pub fn concepts(&self) -> &[DomainConcept] {
        &self.concepts
    }

    pub fn thesaurus(&self) -> &Thesaurus {
        &self.thesaurus
    }

    pub fn concept(&self, id: &str) -> Option<&DomainConcept> {
        self.by_id.get(id).map(|&i| &self.concepts[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// Normalized thesaurus terms of a concept.
    pub fn terms(&self, id: &str) -> Option<&[String]> {
        self.by_id
            .get(id)
            .map(|&i| self.thesaurus.entries[i].terms.as_slice())
    }

    /// Whether the normalized term is listed anywhere in the thesaurus.
    pub fn knows_term(&self, term: &str) -> bool {
        self.by_term.contains_key(term)
    }

    pub fn anchor(&self, term: &str) -> AnchorResult {
        match self.by_term.get(term).map(Vec::as_slice) {
            None | Some([]) => AnchorResult::None,
            Some([only]) => AnchorResult::Unique(only.clone()),
            Some(many) => AnchorResult::Ambiguous(many.to_vec()),
        }
    }

    pub fn relation(&self, a: &str, b: &str) -> Result<Relation> {
        let ta = self.terms(a).ok_or_else(|| Error::UnknownConcept(a.to_string()))?;
        let tb = self.terms(b).ok_or_else(|| Error::UnknownConcept(b.to_string()))?;
        if a == b {
            Ok(Relation::Same)
        } else if ta.iter().any(|t| tb.contains(t)) {
            Ok(Relation::HomonymSharedTerm)
        } else {
            Ok(Relation::Unrelated)
        }
    }
}

fn check_acyclic(concepts: &[DomainConcept], by_id: &HashMap<String, usize>) -> Result<()> {
    // 0 = unvisited, 1 = on current chain, 2 = known to reach a root
    let mut state = vec![0u8; concepts.len()];
    for start in 0..concepts.len() {
        let mut chain = Vec::new();
        let mut cur = Some(start);
        while let Some(idx) = cur {
            match state[idx] {
                2 => break,
                1 => return Err(Error::TaxonomyCycle(concepts[idx].id.clone())),
                _ => {}
            }
            state[idx] = 1;
            chain.push(idx);
            cur = concepts[idx].parent.as_ref().map(|p| by_id[p]);
        }
        for idx in chain {
            state[idx] = 2;
        }
    }
    Ok(())
}

pub fn load_domain_ontology(document: &str) -> Result<DomainOntology> {
    let raw: RawOntology = serde_json::from_str(document).map_err(Error::from_json)?;
    DomainOntology::new(raw.concepts, raw.thesaurus)
}
