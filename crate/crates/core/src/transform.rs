//! Component <-> concept-graph transformation.
//!
//! A component maps onto a two-level graph: the root concept designates the component,
//! and each attribute or operation becomes an atomic member concept.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cm::{operation_term, strip_marker, Attribute, BusinessComponent, Kind, Operation};
use crate::error::{Error, Result};
use crate::onto::{normalize_term, AnchorResult, DomainOntology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConceptKind {
    Component,
    Attribute,
    Operation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Concept {
    pub term: String,
    pub raw_label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub definitions: Vec<String>,
    #[serde(rename = "kind")]
    pub kind_tag: ConceptKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
    #[serde(default)]
    pub members: Vec<Concept>,
}

impl Concept {
    pub fn atomic(raw_label: &str, kind_tag: ConceptKind) -> Self {
        let term = match kind_tag {
            ConceptKind::Operation => operation_term(raw_label),
            _ => normalize_term(raw_label),
        };
        Concept {
            term,
            raw_label: raw_label.to_string(),
            definitions: Vec::new(),
            kind_tag,
            anchor: None,
            members: Vec::new(),
        }
    }

    pub fn with_members(mut self, members: Vec<Concept>) -> Self {
        self.members = members;
        self
    }

    pub fn with_anchor(mut self, anchor: impl Into<String>) -> Self {
        self.anchor = Some(anchor.into());
        self
    }

    pub fn is_atomic(&self) -> bool {
        self.members.is_empty()
    }

    fn check(&self, is_root: bool) -> Result<()> {
        if self.term.is_empty() {
            return Err(Error::InvalidConcept(format!(
                "empty term (label `{}`)",
                self.raw_label
            )));
        }
        if (self.kind_tag == ConceptKind::Component) != is_root {
            return Err(Error::InvalidConcept(format!(
                "`{}`: component concepts may only appear at the root",
                self.term
            )));
        }
        let mut seen = HashSet::new();
        for m in &self.members {
            if !seen.insert((m.kind_tag, m.term.as_str())) {
                return Err(Error::DuplicateTerm {
                    component: self.term.clone(),
                    term: m.term.clone(),
                });
            }
            m.check(false)?;
        }
        Ok(())
    }
}

/// The concept graph produced from one business component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentOntology {
    pub source: String,
    pub origin: String,
    /// Component kind carried through for emission back to a component.
    #[serde(default = "default_kind", rename = "cm_kind")]
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provides: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub requires: Vec<String>,
    pub root: Concept,
}

fn default_kind() -> Kind {
    Kind::Entity
}

impl ComponentOntology {
    pub fn validate(&self) -> Result<()> {
        self.root.check(true)
    }

    pub fn members(&self) -> &[Concept] {
        &self.root.members
    }

    /// `source/origin`, the path prefix used in alignment and merge reports.
    pub fn path(&self) -> String {
        format!("{}/{}", self.source, self.origin)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("ocm serializes");
        out.push('\n');
        out
    }
}

pub fn parse_ocm(document: &str) -> Result<ComponentOntology> {
    let ocm: ComponentOntology = serde_json::from_str(document).map_err(Error::from_json)?;
    ocm.validate()?;
    Ok(ocm)
}

/// Anchoring problems found while transforming a component. None of them is fatal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnchorDiagnostic {
    /// The term is listed under several concepts and no hint picked one.
    Ambiguous {
        context: String,
        term: String,
        candidates: Vec<String>,
    },
    /// A hint pins the term to a concept whose thesaurus entry does not list it.
    HintNotListed {
        context: String,
        term: String,
        concept: String,
    },
    /// A hint names a concept the ontology does not define; it was ignored.
    HintUnknown {
        context: String,
        term: String,
        concept: String,
    },
}

impl fmt::Display for AnchorDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnchorDiagnostic::Ambiguous {
                context,
                term,
                candidates,
            } => write!(
                f,
                "{context}: term `{term}` is ambiguous ({}); left unanchored, syntactic fallback applies",
                candidates.join(", ")
            ),
            AnchorDiagnostic::HintNotListed {
                context,
                term,
                concept,
            } => write!(
                f,
                "{context}: anchor hint pins `{term}` to `{concept}`, whose thesaurus entry does not list it"
            ),
            AnchorDiagnostic::HintUnknown {
                context,
                term,
                concept,
            } => write!(
                f,
                "{context}: anchor hint for `{term}` names unknown concept `{concept}`; ignored"
            ),
        }
    }
}

fn resolve_anchor(
    term: &str,
    hint: Option<&str>,
    od: &DomainOntology,
    context: &str,
    diagnostics: &mut Vec<AnchorDiagnostic>,
) -> Option<String> {
    if let Some(id) = hint {
        if od.contains(id) {
            let listed = od.terms(id).is_some_and(|ts| ts.iter().any(|t| t == term));
            if !listed {
                diagnostics.push(AnchorDiagnostic::HintNotListed {
                    context: context.to_string(),
                    term: term.to_string(),
                    concept: id.to_string(),
                });
            }
            return Some(id.to_string());
        }
        diagnostics.push(AnchorDiagnostic::HintUnknown {
            context: context.to_string(),
            term: term.to_string(),
            concept: id.to_string(),
        });
    }
    match od.anchor(term) {
        AnchorResult::Unique(id) => Some(id),
        AnchorResult::Ambiguous(candidates) => {
            diagnostics.push(AnchorDiagnostic::Ambiguous {
                context: context.to_string(),
                term: term.to_string(),
                candidates,
            });
            None
        }
        AnchorResult::None => None,
    }
}

/// Transforms a component, also returning anchoring diagnostics.
pub fn transform_component(
    cm: &BusinessComponent,
    od: &DomainOntology,
) -> (ComponentOntology, Vec<AnchorDiagnostic>) {
    let mut diagnostics = Vec::new();
    let context = format!("{}.{}", cm.source, cm.name);

    let mut member = |raw: &str, kind_tag: ConceptKind| {
        let mut c = Concept::atomic(raw, kind_tag);
        c.anchor = resolve_anchor(&c.term, cm.anchor_hint(&c.term), od, &context, &mut diagnostics);
        c.definitions = definitions_of(c.anchor.as_deref(), od);
        c
    };
    let mut members: Vec<Concept> = cm
        .attributes
        .iter()
        .map(|a| member(&a.name, ConceptKind::Attribute))
        .collect();
    members.extend(
        cm.operations
            .iter()
            .map(|o| member(&o.name, ConceptKind::Operation)),
    );

    let mut root = Concept::atomic(&cm.name, ConceptKind::Component);
    root.anchor = resolve_anchor(&root.term, cm.anchor_hint(&root.term), od, &context, &mut diagnostics);
    root.definitions = cm.doc.iter().cloned().collect();
    root.definitions.extend(definitions_of(root.anchor.as_deref(), od));
    root.members = members;

    let ocm = ComponentOntology {
        source: cm.source.clone(),
        origin: cm.name.clone(),
        kind: cm.kind,
        provides: cm.provides.clone(),
        requires: cm.requires.clone(),
        root,
    };
    (ocm, diagnostics)
}

fn definitions_of(anchor: Option<&str>, od: &DomainOntology) -> Vec<String> {
    anchor
        .and_then(|id| od.concept(id))
        .map(|c| c.definitions.clone())
        .unwrap_or_default()
}

pub fn to_ontology(cm: &BusinessComponent, od: &DomainOntology) -> ComponentOntology {
    transform_component(cm, od).0
}

/// Emits a component from a concept graph. Resolved anchors become anchor hints.
pub fn to_component(ocm: &ComponentOntology) -> BusinessComponent {
    let root = &ocm.root;
    let name = if root.raw_label.trim().is_empty() {
        root.term.clone()
    } else {
        root.raw_label.clone()
    };
    let mut cm = BusinessComponent::new(name, ocm.kind, ocm.source.clone());
    cm.provides = ocm.provides.clone();
    cm.requires = ocm.requires.clone();

    let mut anchors = BTreeMap::new();
    if let Some(a) = &root.anchor {
        anchors.insert(root.term.clone(), a.clone());
    }
    for m in &root.members {
        let label = if m.raw_label.trim().is_empty() {
            &m.term
        } else {
            &m.raw_label
        };
        match m.kind_tag {
            ConceptKind::Operation => cm
                .operations
                .push(Operation::named(strip_marker(label).to_string())),
            _ => cm.attributes.push(Attribute::named(label.clone())),
        }
        if let Some(a) = &m.anchor {
            anchors.insert(m.term.clone(), a.clone());
        }
    }
    cm.anchors = anchors;
    cm
}
