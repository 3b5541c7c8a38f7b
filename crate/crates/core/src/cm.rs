//! Business-component sets: the candidate components of each source system.
//!
//! Components are parsed from a strict JSON document, validated against the
//! member-naming invariants and kept immutable afterwards.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::onto::normalize_term;

/// Operation terms carry this marker so they never collide with attribute terms.
pub const OPERATION_MARKER: &str = "()";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Entity,
    Process,
    Utility,
    Data,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::Entity, Kind::Process, Kind::Utility, Kind::Data];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Entity => "entity",
            Kind::Process => "process",
            Kind::Utility => "utility",
            Kind::Data => "data",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Layer rank: process > entity > utility > data.
    pub fn layer(self) -> u8 {
        match self {
            Kind::Process => 3,
            Kind::Entity => 2,
            Kind::Utility => 1,
            Kind::Data => 0,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attribute {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl Attribute {
    pub fn named(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            datatype: None,
            unit: None,
        }
    }

    pub fn term(&self) -> String {
        normalize_term(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Operation {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub returns: Option<String>,
}

impl Operation {
    pub fn named(name: impl Into<String>) -> Self {
        Operation {
            name: name.into(),
            params: None,
            returns: None,
        }
    }

    /// Normalized term, always ending in the `()` marker.
    pub fn term(&self) -> String {
        operation_term(&self.name)
    }
}

/// Normalized operation term: `"Lire"`, `"Lire()"` and `"Lire ()"` all map to `"lire()"`.
pub fn operation_term(name: &str) -> String {
    let mut term = normalize_term(name);
    if !term.ends_with(OPERATION_MARKER) {
        term.push_str(OPERATION_MARKER);
    }
    term
}

/// Drops a trailing `()` marker (and the whitespace before it) from a name.
pub fn strip_marker(name: &str) -> &str {
    let trimmed = name.trim_end();
    match trimmed.strip_suffix(OPERATION_MARKER) {
        Some(stem) => stem.trim_end(),
        None => trimmed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BusinessComponent {
    pub name: String,
    pub kind: Kind,
    pub doc: Option<String>,
    pub attributes: Vec<Attribute>,
    pub operations: Vec<Operation>,
    pub provides: Vec<String>,
    pub requires: Vec<String>,
    /// System the component was declared in.
    pub source: String,
    /// Member term -> domain concept id, used to pin ambiguous terms.
    pub anchors: BTreeMap<String, String>,
}

impl BusinessComponent {
    pub fn new(name: impl Into<String>, kind: Kind, source: impl Into<String>) -> Self {
        BusinessComponent {
            name: name.into(),
            kind,
            doc: None,
            attributes: Vec::new(),
            operations: Vec::new(),
            provides: Vec::new(),
            requires: Vec::new(),
            source: source.into(),
            anchors: BTreeMap::new(),
        }
    }

    pub fn term(&self) -> String {
        normalize_term(&self.name)
    }

    /// Anchor hint for a normalized member or component term, if one was declared.
    ///
    /// Operations may be keyed without their `()` marker, unless that bare key is the
    /// component's own name.
    pub fn anchor_hint(&self, term: &str) -> Option<&str> {
        let exact = self
            .anchors
            .iter()
            .find(|(k, _)| normalize_term(k) == term);
        if let Some((_, v)) = exact {
            return Some(v);
        }
        if !term.ends_with(OPERATION_MARKER) {
            return None;
        }
        let own = self.term();
        self.anchors
            .iter()
            .find(|(k, _)| normalize_term(k) != own && operation_term(k) == term)
            .map(|(_, v)| v.as_str())
    }

    /// Checks every invariant and returns all violations found.
    pub fn violations(&self) -> Vec<Error> {
        let mut errors = Vec::new();
        let component = self.name.clone();
        if self.term().is_empty() {
            errors.push(Error::EmptyName {
                what: "component",
                context: Some(self.source.clone()),
            });
        }

        let mut attr_terms = HashSet::new();
        for attr in &self.attributes {
            let term = attr.term();
            if term.is_empty() {
                errors.push(Error::EmptyName {
                    what: "attribute",
                    context: Some(component.clone()),
                });
            } else if !attr_terms.insert(term.clone()) {
                errors.push(Error::DuplicateTerm {
                    component: component.clone(),
                    term,
                });
            }
        }

        let mut op_terms = HashSet::new();
        for op in &self.operations {
            let term = op.term();
            let stem = strip_marker(&term).to_string();
            if stem.is_empty() {
                errors.push(Error::EmptyName {
                    what: "operation",
                    context: Some(component.clone()),
                });
            } else if !op_terms.insert(term.clone()) || attr_terms.contains(&stem) {
                errors.push(Error::DuplicateTerm {
                    component: component.clone(),
                    term,
                });
            }
        }

        for iface in self.provides.iter().chain(&self.requires) {
            if normalize_term(iface).is_empty() {
                errors.push(Error::EmptyName {
                    what: "interface",
                    context: Some(component.clone()),
                });
            }
        }

        let own = self.term();
        for key in self.anchors.keys() {
            let term = normalize_term(key);
            let known = term == own
                || attr_terms.contains(&term)
                || op_terms.contains(&term)
                || op_terms.contains(&operation_term(key));
            if !known {
                errors.push(Error::UnknownAnchorTerm {
                    component: component.clone(),
                    term: key.clone(),
                });
            }
        }
        errors
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentSet {
    pub system: String,
    pub components: Vec<BusinessComponent>,
}

impl ComponentSet {
    /// Builds a set, validating all component and set-level invariants.
    pub fn new(system: impl Into<String>, components: Vec<BusinessComponent>) -> Result<Self> {
        let set = ComponentSet {
            system: system.into(),
            components,
        };
        match set.violations().into_iter().next() {
            Some(err) => Err(err),
            None => Ok(set),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn violations(&self) -> Vec<Error> {
        let mut errors: Vec<Error> = self
            .components
            .iter()
            .flat_map(BusinessComponent::violations)
            .collect();
        let mut seen = HashSet::new();
        for c in &self.components {
            if !seen.insert((c.source.clone(), c.term())) {
                errors.push(Error::DuplicateComponent {
                    source_system: c.source.clone(),
                    name: c.name.clone(),
                });
            }
        }
        errors
    }

    /// Canonical pretty-printed JSON, newline-terminated.
    pub fn to_json(&self) -> String {
        let raw = RawSet {
            system: self.system.clone(),
            components: self.components.iter().map(RawComponent::from).collect(),
        };
        let mut out = serde_json::to_string_pretty(&raw).expect("component set serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    system: String,
    components: Vec<RawComponent>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    doc: Option<String>,
    attributes: Vec<Attribute>,
    operations: Vec<Operation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provides: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    requires: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    anchors: BTreeMap<String, String>,
}

impl From<&BusinessComponent> for RawComponent {
    fn from(c: &BusinessComponent) -> Self {
        RawComponent {
            name: c.name.clone(),
            kind: c.kind.as_str().to_string(),
            doc: c.doc.clone(),
            attributes: c.attributes.clone(),
            operations: c.operations.clone(),
            provides: c.provides.clone(),
            requires: c.requires.clone(),
            anchors: c.anchors.clone(),
        }
    }
}

/// Parses and validates every invariant, collecting all violations.
///
/// A syntax error stops parsing and is the only error returned.
pub fn check_component_set(document: &str) -> std::result::Result<ComponentSet, Vec<Error>> {
    let raw: RawSet = serde_json::from_str(document).map_err(|e| vec![Error::from_json(e)])?;
    let mut errors = Vec::new();
    let mut components = Vec::with_capacity(raw.components.len());
    for rc in raw.components {
        let Some(kind) = Kind::parse(&rc.kind) else {
            errors.push(Error::UnknownKind {
                component: rc.name,
                kind: rc.kind,
            });
            continue;
        };
        components.push(BusinessComponent {
            name: rc.name,
            kind,
            doc: rc.doc,
            attributes: rc.attributes,
            operations: rc.operations,
            provides: rc.provides,
            requires: rc.requires,
            source: raw.system.clone(),
            anchors: rc.anchors,
        });
    }
    let set = ComponentSet {
        system: raw.system,
        components,
    };
    errors.extend(set.violations());
    if errors.is_empty() {
        Ok(set)
    } else {
        Err(errors)
    }
}

pub fn parse_component_set(document: &str) -> Result<ComponentSet> {
    check_component_set(document).map_err(|mut errs| errs.swap_remove(0))
}

/// Concatenates two sets, keeping each component's source label.
pub fn union(a: &ComponentSet, b: &ComponentSet) -> Result<ComponentSet> {
    let components: Vec<BusinessComponent> = a
        .components
        .iter()
        .chain(&b.components)
        .cloned()
        .collect();

    let mut seen = HashSet::new();
    for c in &components {
        if !seen.insert((c.source.clone(), c.term())) {
            return Err(Error::DuplicateComponent {
                source_system: c.source.clone(),
                name: c.name.clone(),
            });
        }
    }

    let mut systems: Vec<&str> = Vec::new();
    for c in &components {
        if !systems.contains(&c.source.as_str()) {
            systems.push(&c.source);
        }
    }
    let system = if systems.is_empty() {
        if a.system.is_empty() {
            b.system.clone()
        } else {
            a.system.clone()
        }
    } else {
        systems.join("+")
    };
    Ok(ComponentSet { system, components })
}

/// A `requires` edge that points from a lower-layer component up to a higher-layer provider.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeringWarning {
    pub source: String,
    pub component: String,
    pub kind: Kind,
    pub interface: String,
    pub provider: String,
    pub provider_kind: Kind,
}

impl fmt::Display for LayeringWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "warning: {}.{} ({}) requires `{}` provided by higher-layer {} ({})",
            self.source, self.component, self.kind, self.interface, self.provider, self.provider_kind
        )
    }
}

/// Flags each `requires` edge whose provider sits on a higher layer than the requirer.
///
/// Layer order is process > entity > utility > data. One warning per edge, naming the
/// first offending provider in declaration order.
pub fn check_layering(set: &ComponentSet) -> Vec<LayeringWarning> {
    let mut warnings = Vec::new();
    for requirer in &set.components {
        for iface in &requirer.requires {
            let wanted = normalize_term(iface);
            let provider = set.components.iter().find(|p| {
                p.kind.layer() > requirer.kind.layer()
                    && p.provides.iter().any(|name| normalize_term(name) == wanted)
            });
            if let Some(p) = provider {
                warnings.push(LayeringWarning {
                    source: requirer.source.clone(),
                    component: requirer.name.clone(),
                    kind: requirer.kind,
                    interface: iface.clone(),
                    provider: p.name.clone(),
                    provider_kind: p.kind,
                });
            }
        }
    }
    warnings
}
