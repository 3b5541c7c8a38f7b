//! Alignment of component ontologies across source systems and merging into a
//! result component set.
//!
//! Every cross-source root pair gets one correspondence, classified from two facts:
//! whether the roots carry the same designating term, and whether their member
//! matrix aggregates to exactly one. Synonymous roots merge; same-named roots that
//! are not synonymous are homonyms and stay apart under source-qualified names.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::cm::{operation_term, strip_marker, ComponentSet};
use crate::error::{Error, Result};
use crate::onto::{normalize_term, AnchorResult, DomainOntology};
use crate::score::Score;
use crate::simatch::{similarity_matrix_with, SimConfig, Verdict};
use crate::transform::{to_component, ComponentOntology, Concept, ConceptKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Equivalent,
    SynonymPair,
    HomonymConflict,
    Distinct,
}

impl Classification {
    pub fn classify(same_name: bool, verdict: Verdict) -> Self {
        match (same_name, verdict) {
            (true, Verdict::Synonym) => Classification::Equivalent,
            (false, Verdict::Synonym) => Classification::SynonymPair,
            (true, Verdict::NotSynonym) => Classification::HomonymConflict,
            (false, Verdict::NotSynonym) => Classification::Distinct,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Equivalent => "equivalent",
            Classification::SynonymPair => "synonym_pair",
            Classification::HomonymConflict => "homonym_conflict",
            Classification::Distinct => "distinct",
        }
    }

    /// Whether the pair is merged into one concept.
    pub fn unifies(self) -> bool {
        matches!(self, Classification::Equivalent | Classification::SynonymPair)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A root concept, or one member of it when `member` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoint {
    pub source: String,
    pub origin: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member: Option<String>,
}

impl Endpoint {
    fn root(ocm: &ComponentOntology) -> Self {
        Endpoint {
            source: ocm.source.clone(),
            origin: ocm.origin.clone(),
            member: None,
        }
    }

    fn member(ocm: &ComponentOntology, term: &str) -> Self {
        Endpoint {
            member: Some(term.to_string()),
            ..Endpoint::root(ocm)
        }
    }

    pub fn path(&self) -> String {
        match &self.member {
            Some(m) => format!("{}/{}/{}", self.source, self.origin, m),
            None => format!("{}/{}", self.source, self.origin),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Correspondence {
    pub left: Endpoint,
    pub right: Endpoint,
    pub score: Score,
    #[serde(rename = "class")]
    pub classification: Classification,
}

impl Correspondence {
    pub fn is_root(&self) -> bool {
        self.left.member.is_none() && self.right.member.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alignment {
    /// Root correspondences, each followed by the member correspondences of its matrix.
    pub correspondences: Vec<Correspondence>,
    pub conflicts: Vec<Correspondence>,
    pub diagnostics: Vec<String>,
    /// Preferred domain label of every concept id anchored in the aligned ontologies.
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    /// The aligned ontologies, so the alignment file is self-contained for merging.
    #[serde(default)]
    pub ontologies: Vec<ComponentOntology>,
}

impl Alignment {
    pub fn roots(&self) -> impl Iterator<Item = &Correspondence> {
        self.correspondences.iter().filter(|c| c.is_root())
    }

    pub fn members(&self) -> impl Iterator<Item = &Correspondence> {
        self.correspondences.iter().filter(|c| !c.is_root())
    }

    pub fn count(&self, class: Classification) -> usize {
        self.roots().filter(|c| c.classification == class).count()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("alignment serializes");
        out.push('\n');
        out
    }

    pub fn from_json(document: &str) -> Result<Self> {
        let al: Alignment = serde_json::from_str(document).map_err(Error::from_json)?;
        for ocm in &al.ontologies {
            ocm.validate()?;
        }
        Ok(al)
    }
}

fn ambiguity_diagnostics(ocm: &ComponentOntology, od: &DomainOntology, out: &mut Vec<String>) {
    let concepts = std::iter::once(&ocm.root).chain(ocm.members());
    for c in concepts {
        if c.anchor.is_some() {
            continue;
        }
        if let AnchorResult::Ambiguous(ids) = od.anchor(&c.term) {
            let line = format!(
                "{}: term `{}` is ambiguous ({}); syntactic fallback applies",
                ocm.path(),
                c.term,
                ids.join(", ")
            );
            if !out.contains(&line) {
                out.push(line);
            }
        }
    }
}

fn collect_labels(ocm: &ComponentOntology, od: &DomainOntology, labels: &mut BTreeMap<String, String>) {
    let concepts = std::iter::once(&ocm.root).chain(ocm.members());
    for id in concepts.filter_map(|c| c.anchor.as_ref()) {
        if let Some(dc) = od.concept(id) {
            labels.insert(id.clone(), dc.label.clone());
        }
    }
}

pub fn align(set: &[ComponentOntology], od: &DomainOntology) -> Alignment {
    align_with(set, od, SimConfig::default())
}

/// Compares every cross-source pair of roots, in input order.
pub fn align_with(set: &[ComponentOntology], od: &DomainOntology, cfg: SimConfig) -> Alignment {
    let mut al = Alignment {
        ontologies: set.to_vec(),
        ..Alignment::default()
    };
    for ocm in set {
        ambiguity_diagnostics(ocm, od, &mut al.diagnostics);
        collect_labels(ocm, od, &mut al.labels);
    }

    for (i, a) in set.iter().enumerate() {
        for b in set[i + 1..].iter().filter(|b| b.source != a.source) {
            let m = similarity_matrix_with(a, b, od, cfg);
            let root = Correspondence {
                left: Endpoint::root(a),
                right: Endpoint::root(b),
                score: m.aggregate,
                classification: Classification::classify(m.same_name(), m.verdict),
            };
            if root.classification == Classification::HomonymConflict {
                al.conflicts.push(root.clone());
            }
            al.correspondences.push(root);

            for (li, row) in m.cells.iter().enumerate() {
                for (ri, cell) in row.iter().enumerate().filter(|(_, c)| c.is_one()) {
                    let (lt, rt) = (&m.left.members[li], &m.right.members[ri]);
                    al.correspondences.push(Correspondence {
                        left: Endpoint::member(a, lt),
                        right: Endpoint::member(b, rt),
                        score: *cell,
                        classification: Classification::classify(lt == rt, Verdict::Synonym),
                    });
                }
            }
        }
    }
    al
}

/// Root-level naming conflicts: homonyms to qualify and synonyms to unify.
pub fn detect_naming_conflicts(al: &Alignment) -> Vec<Correspondence> {
    let mut found: Vec<Correspondence> = al
        .roots()
        .filter(|c| {
            matches!(
                c.classification,
                Classification::HomonymConflict | Classification::SynonymPair
            )
        })
        .cloned()
        .collect();
    found.sort_by(|x, y| {
        (&x.left.source, &x.left.origin).cmp(&(&y.left.source, &y.left.origin))
    });
    found
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationOntology {
    pub concepts: Vec<ComponentOntology>,
    /// Pairs of concept paths collapsed into one concept.
    pub equivalences: Vec<[String; 2]>,
}

impl RepresentationOntology {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("representation serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedComponent {
    pub representation: RepresentationOntology,
    pub result: ComponentSet,
    /// For each result component, the `source/origin` paths of the roots merged into it.
    pub provenance: Vec<Vec<String>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    // smaller index wins so class representatives follow input order
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Classes in order of their smallest element, each listed in ascending order.
    fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut by_rep: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.parent.len() {
            let r = self.find(x);
            by_rep.entry(r).or_default().push(x);
        }
        by_rep.into_values().collect()
    }
}

/// Picks the designating term for a class of concepts. A class whose concepts already
/// agree keeps that term; otherwise the smallest domain label among anchored concepts
/// wins, else the smallest term. Returns (term, raw label, anchor).
fn canonical_name(
    concepts: &[&Concept],
    labels: &BTreeMap<String, String>,
) -> (String, String, Option<String>) {
    let first = concepts[0];
    if concepts.iter().all(|c| c.term == first.term) {
        let anchor = concepts.iter().find_map(|c| c.anchor.clone());
        return (first.term.clone(), first.raw_label.clone(), anchor);
    }
    let kind = first.kind_tag;
    let from_label = concepts
        .iter()
        .filter_map(|c| {
            let id = c.anchor.as_ref()?;
            let label = labels.get(id)?;
            let term = match kind {
                ConceptKind::Operation => operation_term(label),
                _ => normalize_term(label),
            };
            Some((term, label.clone(), id.clone()))
        })
        .min();
    let (term, fallback_raw, anchor) = match from_label {
        Some((term, raw, id)) => (term, raw, Some(id)),
        None => {
            let c = concepts.iter().min_by(|a, b| a.term.cmp(&b.term)).unwrap();
            (c.term.clone(), c.raw_label.clone(), c.anchor.clone())
        }
    };
    let raw = concepts
        .iter()
        .find(|c| c.term == term)
        .map(|c| c.raw_label.clone())
        .unwrap_or(fallback_raw);
    (term, raw, anchor)
}

fn push_unique(list: &mut Vec<String>, item: String) {
    if !list.iter().any(|x| x == &item) {
        list.push(item);
    }
}

struct MergedRoot {
    roots: Vec<usize>,
    concept: Concept,
    // root providing the designating name, used for qualification
    namer: usize,
}

/// Collapses synonymous roots and members into a representation ontology and result set.
pub fn merge(al: &Alignment, set: &[ComponentOntology]) -> Result<MergedComponent> {
    let root_index: HashMap<(&str, &str), usize> = set
        .iter()
        .enumerate()
        .map(|(i, o)| ((o.source.as_str(), o.origin.as_str()), i))
        .collect();
    let locate = |e: &Endpoint| -> Result<(usize, Option<usize>)> {
        let missing = || Error::InconsistentAlignment(e.path());
        let idx = *root_index
            .get(&(e.source.as_str(), e.origin.as_str()))
            .ok_or_else(missing)?;
        let member = match &e.member {
            Some(t) => Some(
                set[idx]
                    .members()
                    .iter()
                    .position(|m| &m.term == t)
                    .ok_or_else(missing)?,
            ),
            None => None,
        };
        Ok((idx, member))
    };

    let mut roots_uf = UnionFind::new(set.len());
    let mut conflicted = HashSet::new();
    let mut root_links = Vec::new();
    let mut member_edges = Vec::new();
    for c in &al.correspondences {
        let (l, lm) = locate(&c.left)?;
        let (r, rm) = locate(&c.right)?;
        match (lm, rm) {
            (None, None) => {
                if c.classification.unifies() {
                    roots_uf.union(l, r);
                    root_links.push((l, r, [c.left.path(), c.right.path()]));
                } else if c.classification == Classification::HomonymConflict {
                    conflicted.insert(l);
                    conflicted.insert(r);
                }
            }
            (Some(lm), Some(rm)) if c.score.is_one() => {
                member_edges.push(((l, lm), (r, rm), [c.left.path(), c.right.path()]));
            }
            _ => {}
        }
    }

    let mut equivalences: Vec<[String; 2]> = root_links.iter().map(|(_, _, p)| p.clone()).collect();
    let mut merged: Vec<MergedRoot> = Vec::new();
    let mut member_renames: Vec<(String, String, String)> = Vec::new();

    for class in roots_uf.classes() {
        let in_class: HashSet<usize> = class.iter().copied().collect();

        // member slots across the class, in root order then declaration order
        let mut slots = Vec::new();
        let mut slot_of = HashMap::new();
        for &r in &class {
            for mi in 0..set[r].members().len() {
                slot_of.insert((r, mi), slots.len());
                slots.push((r, mi));
            }
        }
        let mut members_uf = UnionFind::new(slots.len());
        for (a, b, paths) in &member_edges {
            if in_class.contains(&a.0) && in_class.contains(&b.0) {
                let (sa, sb) = (slot_of[a], slot_of[b]);
                let kind_a = set[a.0].members()[a.1].kind_tag;
                let kind_b = set[b.0].members()[b.1].kind_tag;
                if class.len() > 1 && kind_a == kind_b {
                    members_uf.union(sa, sb);
                    equivalences.push(paths.clone());
                }
            }
        }

        let mut members: Vec<Concept> = Vec::new();
        for group in members_uf.classes() {
            let concepts: Vec<&Concept> = group
                .iter()
                .map(|&s| {
                    let (r, mi) = slots[s];
                    &set[r].members()[mi]
                })
                .collect();
            let (term, raw_label, anchor) = canonical_name(&concepts, &al.labels);
            let mut definitions = Vec::new();
            for (&s, c) in group.iter().zip(&concepts) {
                for d in &c.definitions {
                    push_unique(&mut definitions, d.clone());
                }
                if c.kind_tag == ConceptKind::Operation {
                    member_renames.push((
                        set[slots[s].0].source.clone(),
                        strip_marker(&c.term).to_string(),
                        strip_marker(&raw_label).to_string(),
                    ));
                }
            }
            let mut concept = Concept {
                term,
                raw_label,
                definitions,
                kind_tag: concepts[0].kind_tag,
                anchor,
                members: Vec::new(),
            };
            // two uncollapsed members may still share a term; qualify the later one
            if members
                .iter()
                .any(|m| m.term == concept.term && m.kind_tag == concept.kind_tag)
            {
                let source = &set[slots[group[0]].0].source;
                concept.raw_label = format!("{source}.{}", concept.raw_label);
                concept.term = match concept.kind_tag {
                    ConceptKind::Operation => operation_term(&concept.raw_label),
                    _ => normalize_term(&concept.raw_label),
                };
            }
            members.push(concept);
        }

        let roots: Vec<&Concept> = class.iter().map(|&r| &set[r].root).collect();
        let (term, raw_label, anchor) = canonical_name(&roots, &al.labels);
        let namer = class
            .iter()
            .copied()
            .find(|&r| set[r].root.term == term)
            .unwrap_or(class[0]);
        let mut definitions = Vec::new();
        for c in &roots {
            for d in &c.definitions {
                push_unique(&mut definitions, d.clone());
            }
        }
        merged.push(MergedRoot {
            roots: class,
            concept: Concept {
                term,
                raw_label,
                definitions,
                kind_tag: ConceptKind::Component,
                anchor,
                members,
            },
            namer,
        });
    }

    // qualify homonyms and any other clash of designating terms
    let mut term_count: HashMap<String, usize> = HashMap::new();
    for m in &merged {
        *term_count.entry(m.concept.term.clone()).or_default() += 1;
    }
    for m in &mut merged {
        let clash = term_count[&m.concept.term] > 1;
        let homonym = m.roots.len() == 1 && conflicted.contains(&m.roots[0]);
        if clash || homonym {
            let namer = &set[m.namer];
            m.concept.raw_label = format!("{}.{}", namer.source, namer.origin);
            m.concept.term = normalize_term(&m.concept.raw_label);
            m.concept.anchor = None;
        }
    }

    // interface names follow the renamed components and operations
    let mut scoped: HashMap<(String, String), String> = HashMap::new();
    let mut global: HashMap<String, String> = HashMap::new();
    for (source, stem, new) in member_renames {
        global.entry(stem.clone()).or_insert_with(|| new.clone());
        scoped.entry((source, stem)).or_insert(new);
    }
    for m in &merged {
        for &r in &m.roots {
            let key = (set[r].source.clone(), set[r].root.term.clone());
            scoped.insert(key, m.concept.raw_label.clone());
        }
    }
    let rename = |source: &str, name: &str| -> String {
        let stem = strip_marker(&normalize_term(name)).to_string();
        scoped
            .get(&(source.to_string(), stem.clone()))
            .or_else(|| global.get(&stem))
            .cloned()
            .unwrap_or_else(|| name.to_string())
    };

    let mut sources: Vec<&str> = Vec::new();
    for o in set {
        if !sources.contains(&o.source.as_str()) {
            sources.push(&o.source);
        }
    }
    let system = sources.join("+");

    let mut concepts = Vec::with_capacity(merged.len());
    let mut provenance = Vec::with_capacity(merged.len());
    for m in merged {
        provenance.push(m.roots.iter().map(|&r| set[r].path()).collect());
        let mut provides: Vec<String> = Vec::new();
        let mut requires: Vec<String> = Vec::new();
        for &r in &m.roots {
            for p in &set[r].provides {
                let name = rename(&set[r].source, p);
                if !provides.iter().any(|x| normalize_term(x) == normalize_term(&name)) {
                    provides.push(name);
                }
            }
            for q in &set[r].requires {
                let name = rename(&set[r].source, q);
                if !requires.iter().any(|x| normalize_term(x) == normalize_term(&name)) {
                    requires.push(name);
                }
            }
        }
        concepts.push(ComponentOntology {
            source: system.clone(),
            origin: m.concept.raw_label.clone(),
            kind: set[m.roots[0]].kind,
            provides,
            requires,
            root: m.concept,
        });
    }

    let components = concepts.iter().map(to_component).collect();
    let result = ComponentSet::new(system, components)?;
    Ok(MergedComponent {
        representation: RepresentationOntology {
            concepts,
            equivalences,
        },
        result,
        provenance,
    })
}

/// Human-readable summary of an alignment, optionally with ANSI colour.
pub fn render_alignment(al: &Alignment, color: bool) -> String {
    let paint = |class: Classification| -> String {
        if !color {
            return class.to_string();
        }
        let code = match class {
            Classification::Equivalent | Classification::SynonymPair => "32",
            Classification::HomonymConflict => "31",
            Classification::Distinct => "2",
        };
        format!("\x1b[{code}m{class}\x1b[0m")
    };

    let mut out = String::new();
    let roots: Vec<_> = al.roots().collect();
    let _ = writeln!(out, "root correspondences: {}", roots.len());
    for c in &roots {
        let _ = writeln!(
            out,
            "  {} <-> {}  score {}  {}",
            c.left.path(),
            c.right.path(),
            c.score,
            paint(c.classification)
        );
    }
    let members: Vec<_> = al.members().collect();
    let _ = writeln!(out, "member correspondences: {}", members.len());
    for c in &members {
        let _ = writeln!(
            out,
            "  {} <-> {}  {}",
            c.left.path(),
            c.right.path(),
            paint(c.classification)
        );
    }
    let naming = detect_naming_conflicts(al);
    let _ = writeln!(out, "naming conflicts: {}", naming.len());
    for c in &naming {
        let action = match c.classification {
            Classification::HomonymConflict => "qualify",
            _ => "unify",
        };
        let _ = writeln!(
            out,
            "  {}: {} / {} ({action})",
            paint(c.classification),
            c.left.path(),
            c.right.path()
        );
    }
    let _ = writeln!(out, "diagnostics: {}", al.diagnostics.len());
    for d in &al.diagnostics {
        let _ = writeln!(out, "  {d}");
    }
    out
}
