//! Generators and independent oracles shared by the property and acceptance suites.
#![allow(dead_code)]

use std::collections::HashSet;

use cmfuse::{
    align, merge, normalize_term, sigma, sigma_prime, sigma_with, to_component, to_ontology,
    AnchorResult, BusinessComponent, ComponentOntology, ComponentSet, Concept, ConceptKind,
    DomainConcept, DomainOntology, Kind, Mode, Relation, Score, SimConfig, ThesaurusEntry,
};
use num_rational::Ratio;
use proptest::prelude::*;
use proptest::sample::{select, subsequence, Index};
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

pub const WORDS: &[&str] = &[
    "nom", "prénom", "âge", "titre", "éditeur", "lire", "consulter", "client", "adresse", "date",
    "code", "numéro", "auteur", "isbn", "rue", "ville",
];

/// Vocabulary that never meets `WORDS`, for ontologies that anchor nothing.
pub const OTHER_WORDS: &[&str] = &["alpha", "beta", "gamma", "delta", "epsilon", "zeta"];

pub const ROOT_NAMES: &[&str] = &["Client", "Personne", "Lecteur", "Commande", "Produit", "Facture"];

pub const IDS: &[&str] = &["C0", "C1", "C2", "C3", "C4", "C5"];

pub const INTERFACES: &[&str] = &["Lire", "Consulter", "Gestion", "Stock"];

pub const KINDS: &[Kind] = &[Kind::Entity, Kind::Process, Kind::Utility, Kind::Data];

pub const ALL_CONFIGS: [SimConfig; 4] = [
    SimConfig { mode: Mode::Literal, recursive: true },
    SimConfig { mode: Mode::Literal, recursive: false },
    SimConfig { mode: Mode::Bipartite, recursive: true },
    SimConfig { mode: Mode::Bipartite, recursive: false },
];

fn term_pool(words: &[&str]) -> Vec<String> {
    words
        .iter()
        .flat_map(|w| [w.to_string(), format!("{w}()")])
        .collect()
}

/// Random domain ontology over `words`. Entries pick overlapping term subsets, so
/// homonyms are common.
pub fn ontology_over(words: &'static [&'static str]) -> impl Strategy<Value = DomainOntology> {
    let pool = term_pool(words);
    prop::collection::vec(
        (any::<Option<Index>>(), subsequence(pool, 1..=3)),
        1..=IDS.len(),
    )
    .prop_map(|specs| {
        let mut concepts = Vec::new();
        let mut entries = Vec::new();
        for (i, (parent, terms)) in specs.into_iter().enumerate() {
            concepts.push(DomainConcept {
                id: IDS[i].to_string(),
                label: format!("k{i}"),
                parent: parent.filter(|_| i > 0).map(|p| IDS[p.index(i)].to_string()),
                definitions: vec![format!("definition {i}")],
            });
            entries.push(ThesaurusEntry {
                concept: IDS[i].to_string(),
                terms,
            });
        }
        DomainOntology::new(concepts, entries).expect("generated ontology is valid")
    })
}

pub fn ontology() -> impl Strategy<Value = DomainOntology> {
    ontology_over(WORDS)
}

fn leaf(anchored: bool) -> impl Strategy<Value = Concept> {
    let anchor = if anchored {
        prop::option::of(select(IDS)).boxed()
    } else {
        Just(None).boxed()
    };
    (select(WORDS), any::<bool>(), anchor).prop_map(|(w, op, anchor)| {
        let kind = if op { ConceptKind::Operation } else { ConceptKind::Attribute };
        let mut c = Concept::atomic(w, kind);
        c.anchor = anchor.map(str::to_string);
        c
    })
}

fn dedup_siblings(mut members: Vec<Concept>) -> Vec<Concept> {
    let mut seen = HashSet::new();
    members.retain(|m| seen.insert((m.kind_tag, m.term.clone())));
    members
}

/// Member list with up to `max` entries. With `nested`, some members are themselves
/// composites of atomic concepts.
pub fn members(max: usize, nested: bool, anchored: bool) -> BoxedStrategy<Vec<Concept>> {
    let item = if nested {
        prop_oneof![
            3 => leaf(anchored),
            1 => (leaf(anchored), prop::collection::vec(leaf(anchored), 1..=3))
                .prop_map(|(head, inner)| {
                    let mut head = head;
                    head.kind_tag = ConceptKind::Attribute;
                    head.term = normalize_term(&head.raw_label);
                    head.with_members(dedup_siblings(inner))
                }),
        ]
        .boxed()
    } else {
        leaf(anchored).boxed()
    };
    prop::collection::vec(item, 0..=max)
        .prop_map(dedup_siblings)
        .boxed()
}

/// Root concept with up to `max` members.
pub fn composite(max: usize, nested: bool, anchored: bool) -> impl Strategy<Value = Concept> {
    let anchor = if anchored {
        prop::option::of(select(IDS)).boxed()
    } else {
        Just(None).boxed()
    };
    (select(ROOT_NAMES), anchor, members(max, nested, anchored)).prop_map(|(name, anchor, ms)| {
        let mut c = Concept::atomic(name, ConceptKind::Component).with_members(ms);
        c.anchor = anchor.map(str::to_string);
        c
    })
}

/// Either a leaf or a (possibly nested) composite.
pub fn any_concept(anchored: bool) -> impl Strategy<Value = Concept> {
    prop_oneof![leaf(anchored), composite(4, true, anchored)]
}

pub fn component(source: String) -> impl Strategy<Value = BusinessComponent> {
    (
        select(ROOT_NAMES),
        select(KINDS),
        subsequence(WORDS.to_vec(), 0..=7),
        any::<Index>(),
        subsequence(INTERFACES.to_vec(), 0..=2),
        subsequence(INTERFACES.to_vec(), 0..=2),
        prop::option::of("[a-z ]{1,12}"),
    )
        .prop_map(move |(name, kind, words, split, provides, requires, doc)| {
            let cut = split.index(words.len() + 1);
            let mut c = BusinessComponent::new(name, kind, source.clone());
            c.doc = doc;
            c.attributes = words[..cut].iter().map(|w| cmfuse::Attribute::named(*w)).collect();
            c.operations = words[cut..].iter().map(|w| cmfuse::Operation::named(*w)).collect();
            c.provides = provides.into_iter().map(str::to_string).collect();
            c.requires = requires.into_iter().map(str::to_string).collect();
            c
        })
}

/// A valid component set of 0 to `max` components with distinct names.
pub fn component_set(source: &str, max: usize) -> impl Strategy<Value = ComponentSet> {
    let source = source.to_string();
    prop::collection::vec(component(source.clone()), 0..=max).prop_map(move |mut comps| {
        let mut seen = HashSet::new();
        comps.retain(|c| seen.insert(c.term()));
        ComponentSet::new(source.clone(), comps).expect("generated set is valid")
    })
}

// ---------------------------------------------------------------------------
// Oracles

/// Largest total weight of a one-to-one assignment, by exhaustive enumeration.
pub fn best_assignment(cells: &[Vec<Ratio<u64>>]) -> Ratio<u64> {
    let rows = cells.len();
    let cols = cells.first().map_or(0, Vec::len);
    if rows > cols {
        let transposed: Vec<Vec<Ratio<u64>>> =
            (0..cols).map(|j| (0..rows).map(|i| cells[i][j]).collect()).collect();
        return best_assignment(&transposed);
    }
    fn go(cells: &[Vec<Ratio<u64>>], row: usize, used: &mut Vec<bool>) -> Ratio<u64> {
        if row == cells.len() {
            return Ratio::from_integer(0);
        }
        let mut best = Ratio::from_integer(0);
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                best = best.max(cells[row][j] + go(cells, row + 1, used));
                used[j] = false;
            }
        }
        best
    }
    go(cells, 0, &mut vec![false; cols])
}

fn oracle_anchor(c: &Concept, od: &DomainOntology) -> Option<String> {
    if let Some(id) = c.anchor.as_ref().filter(|id| od.contains(id)) {
        return Some(id.clone());
    }
    match od.anchor(&c.term) {
        AnchorResult::Unique(id) => Some(id),
        _ => None,
    }
}

/// Bipartite-mode semantic similarity with aggregation by brute force.
pub fn oracle_sigma(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Score {
    if c1.is_atomic() && c2.is_atomic() {
        // leaves never aggregate, so the library value is the reference here
        return sigma(c1, c2, od);
    }
    if let (Some(a), Some(b)) = (oracle_anchor(c1, od), oracle_anchor(c2, od)) {
        match od.relation(&a, &b).unwrap() {
            Relation::Same => return Score::ONE,
            Relation::HomonymSharedTerm => return Score::ZERO,
            Relation::Unrelated => {}
        }
    }
    if c1.is_atomic() || c2.is_atomic() {
        return sigma_prime(c1, c2);
    }
    assignment_score(&c1.members, &c2.members, od)
}

fn assignment_score(left: &[Concept], right: &[Concept], od: &DomainOntology) -> Score {
    let cells: Vec<Vec<Ratio<u64>>> = left
        .iter()
        .map(|l| right.iter().map(|r| oracle_sigma(l, r, od).ratio()).collect())
        .collect();
    Score::mean_clamped(best_assignment(&cells), left.len().max(right.len()))
}

pub fn oracle_bipartite(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Score {
    let side = |c: &Concept| if c.is_atomic() { vec![c.clone()] } else { c.members.clone() };
    assignment_score(&side(c1), &side(c2), od)
}

// ---------------------------------------------------------------------------
// Checks, shared by the proptest suite and the acceptance harness

fn every_score(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Vec<(String, Score)> {
    let mut out = vec![("sigma_prime".to_string(), sigma_prime(c1, c2))];
    for cfg in ALL_CONFIGS {
        out.push((format!("sigma {cfg:?}"), sigma_with(c1, c2, od, cfg)));
    }
    out.push(("bipartite".to_string(), cmfuse::bipartite_score(c1, c2, od)));
    out
}

pub fn check_symmetry(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Check {
    let forward = every_score(c1, c2, od);
    let backward = every_score(c2, c1, od);
    for ((name, f), (_, b)) in forward.iter().zip(&backward) {
        prop_assert_eq!(f, b, "{} is not symmetric", name);
    }
    Ok(())
}

pub fn check_range(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Check {
    for (name, s) in every_score(c1, c2, od) {
        prop_assert!(s.den() > 0 && s.num() <= s.den(), "{} out of range: {}", name, s);
    }
    Ok(())
}

/// Without any anchored term, semantic similarity reduces to the syntactic one.
pub fn check_fallback(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Check {
    let expected = sigma_prime(c1, c2);
    for cfg in [ALL_CONFIGS[0], ALL_CONFIGS[1]] {
        prop_assert_eq!(sigma_with(c1, c2, od, cfg), expected, "{:?}", cfg);
    }
    Ok(())
}

fn siblings_distinct(c: &Concept, od: &DomainOntology) -> bool {
    let ms = &c.members;
    (0..ms.len()).all(|i| {
        siblings_distinct(&ms[i], od) && (i + 1..ms.len()).all(|j| !sigma(&ms[i], &ms[j], od).is_one())
    })
}

pub fn check_reflexive(c: &Concept, od: &DomainOntology) -> Check {
    if !siblings_distinct(c, od) {
        return Err(TestCaseError::reject("synonymous siblings"));
    }
    for cfg in ALL_CONFIGS {
        prop_assert!(sigma_with(c, c, od, cfg).is_one(), "{:?}", cfg);
    }
    prop_assert!(sigma_prime(c, c).is_one());
    Ok(())
}

pub fn check_bipartite(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Check {
    prop_assert_eq!(cmfuse::bipartite_score(c1, c2, od), oracle_bipartite(c1, c2, od));
    let cfg = SimConfig { mode: Mode::Bipartite, recursive: true };
    prop_assert_eq!(sigma_with(c1, c2, od, cfg), oracle_sigma(c1, c2, od));
    Ok(())
}

pub fn transform_all(sets: &[&ComponentSet], od: &DomainOntology) -> Vec<ComponentOntology> {
    sets.iter()
        .flat_map(|s| s.components.iter().map(|c| to_ontology(c, od)))
        .collect()
}

/// Every input root lands in exactly one result component, which keeps its members
/// unless they were collapsed with a synonym or qualified.
pub fn check_merge_conservation(a: &ComponentSet, b: &ComponentSet, od: &DomainOntology) -> Check {
    let ocms = transform_all(&[a, b], od);
    let al = align(&ocms, od);
    let merged = merge(&al, &ocms).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let result = &merged.representation.concepts;
    prop_assert_eq!(result.len(), merged.result.components.len());
    prop_assert_eq!(result.len(), merged.provenance.len());

    let collapsed: HashSet<String> = al
        .members()
        .filter(|c| c.score.is_one())
        .flat_map(|c| [c.left.path(), c.right.path()])
        .collect();

    let mut placed = 0;
    for ocm in &ocms {
        let homes: Vec<usize> = (0..result.len())
            .filter(|&k| merged.provenance[k].contains(&ocm.path()))
            .collect();
        prop_assert_eq!(homes.len(), 1, "{} placed {} times", ocm.path(), homes.len());
        placed += 1;
        let home = &result[homes[0]];
        let unified = merged.provenance[homes[0]].len() > 1;
        let qualified = normalize_term(&format!("{}.{}", ocm.source, ocm.origin));
        prop_assert!(
            home.root.term == ocm.root.term || unified || home.root.term == qualified,
            "root {} renamed to {}",
            ocm.path(),
            home.root.term
        );
        for m in ocm.members() {
            let path = format!("{}/{}", ocm.path(), m.term);
            let kept = home
                .members()
                .iter()
                .any(|r| r.kind_tag == m.kind_tag && r.term == m.term);
            let prefixed = home.members().iter().any(|r| {
                r.kind_tag == m.kind_tag && r.raw_label.ends_with(&format!(".{}", m.raw_label))
            });
            prop_assert!(
                kept || prefixed || collapsed.contains(&path),
                "member {} lost",
                path
            );
        }
        let sizes = merged.provenance[homes[0]]
            .iter()
            .map(|p| ocms.iter().find(|o| &o.path() == p).unwrap().members().len());
        prop_assert!(home.members().len() >= sizes.clone().max().unwrap_or(0));
        prop_assert!(home.members().len() <= sizes.sum::<usize>());
    }
    prop_assert_eq!(placed, merged.provenance.iter().map(Vec::len).sum::<usize>());

    // result component names are unique
    let mut names = HashSet::new();
    for c in &merged.result.components {
        prop_assert!(names.insert(c.term()), "duplicate result name {}", c.name);
    }
    Ok(())
}

fn shape(set: &[ComponentOntology]) -> Vec<(String, Vec<(ConceptKind, String)>)> {
    let mut out: Vec<_> = set
        .iter()
        .map(|o| {
            let mut ms: Vec<_> = o.members().iter().map(|m| (m.kind_tag, m.term.clone())).collect();
            ms.sort();
            (o.root.term.clone(), ms)
        })
        .collect();
    out.sort();
    out
}

/// Merging an already merged result changes nothing, provided no two result components
/// and no two siblings are synonymous.
pub fn check_merge_idempotent(a: &ComponentSet, b: &ComponentSet, od: &DomainOntology) -> Check {
    let ocms = transform_all(&[a, b], od);
    let first = merge(&align(&ocms, od), &ocms).map_err(|e| TestCaseError::fail(e.to_string()))?;

    // feed the result back in, spread over two sources so every pair is compared
    let again: Vec<ComponentOntology> = first
        .result
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut c = c.clone();
            c.source = if i % 2 == 0 { "R1" } else { "R2" }.to_string();
            to_ontology(&c, od)
        })
        .collect();
    for (i, x) in again.iter().enumerate() {
        if !siblings_distinct(&x.root, od) {
            return Err(TestCaseError::reject("synonymous siblings in result"));
        }
        for y in &again[i + 1..] {
            if cmfuse::similarity_matrix(x, y, od).aggregate.is_one() {
                return Err(TestCaseError::reject("synonymous result components"));
            }
        }
    }
    let second = merge(&align(&again, od), &again).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(shape(&second.representation.concepts), shape(&first.representation.concepts));
    Ok(())
}

pub fn check_json_round_trip(set: &ComponentSet) -> Check {
    let text = set.to_json();
    let back = cmfuse::parse_component_set(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, set);
    prop_assert_eq!(back.to_json(), text);
    Ok(())
}

pub fn check_ontology_round_trip(set: &ComponentSet, od: &DomainOntology) -> Check {
    for c in &set.components {
        let ocm = to_ontology(c, od);
        let back = to_component(&ocm);
        prop_assert_eq!(&back.name, &c.name);
        prop_assert_eq!(back.kind, c.kind);
        prop_assert_eq!(&back.source, &c.source);
        prop_assert_eq!(&back.provides, &c.provides);
        prop_assert_eq!(&back.requires, &c.requires);
        let names = |xs: &[cmfuse::Attribute]| xs.iter().map(|x| x.name.clone()).collect::<Vec<_>>();
        prop_assert_eq!(names(&back.attributes), names(&c.attributes));
        let ops = |xs: &[cmfuse::Operation]| xs.iter().map(|x| x.name.clone()).collect::<Vec<_>>();
        prop_assert_eq!(ops(&back.operations), ops(&c.operations));
        // and the emitted component transforms back to the same graph
        let again = to_ontology(&back, od);
        prop_assert_eq!(&again.root.term, &ocm.root.term);
        prop_assert_eq!(&again.root.anchor, &ocm.root.anchor);
        prop_assert_eq!(again.members(), ocm.members());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Synonymous pairs under a generated thesaurus

/// Ontology in which word `i` and `syn_i` name concept `S{i}`, plus the list of
/// (word, synonym) pairs.
pub fn synonym_ontology(n: usize) -> (DomainOntology, Vec<(String, String)>) {
    let mut concepts = Vec::new();
    let mut entries = Vec::new();
    let mut pairs = Vec::new();
    for (i, w) in WORDS.iter().take(n).enumerate() {
        let syn = format!("syn{i}");
        concepts.push(DomainConcept {
            id: format!("S{i}"),
            label: w.to_string(),
            parent: None,
            definitions: Vec::new(),
        });
        entries.push(ThesaurusEntry {
            concept: format!("S{i}"),
            terms: vec![w.to_string(), syn.clone(), format!("{w}()"), format!("{syn}()")],
        });
        pairs.push((w.to_string(), syn));
    }
    (DomainOntology::new(concepts, entries).unwrap(), pairs)
}

/// A pair of components whose members correspond one to one through the thesaurus,
/// presented in shuffled order on the right.
pub fn synonymous_pair() -> impl Strategy<Value = (Vec<(usize, bool, bool)>, Vec<usize>)> {
    // (word index, is operation, use synonym on the right)
    subsequence((0..WORDS.len()).collect::<Vec<_>>(), 1..=6)
        .prop_flat_map(|idx| {
            let n = idx.len();
            (
                Just(idx),
                prop::collection::vec((any::<bool>(), any::<bool>()), n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_map(|(idx, flags, order)| {
            let layout = idx.into_iter().zip(flags).map(|(i, (op, syn))| (i, op, syn)).collect();
            (layout, order)
        })
}

pub fn build_pair(
    layout: &[(usize, bool, bool)],
    order: &[usize],
    pairs: &[(String, String)],
) -> (ComponentOntology, ComponentOntology) {
    let mk = |source: &str, name: &str, members: Vec<Concept>| ComponentOntology {
        source: source.into(),
        origin: name.into(),
        kind: Kind::Entity,
        provides: vec![],
        requires: vec![],
        root: Concept::atomic(name, ConceptKind::Component).with_members(members),
    };
    let kind = |op: bool| if op { ConceptKind::Operation } else { ConceptKind::Attribute };
    let left = layout
        .iter()
        .map(|&(i, op, _)| Concept::atomic(&pairs[i].0, kind(op)))
        .collect();
    let right = order
        .iter()
        .map(|&k| {
            let (i, op, syn) = layout[k];
            let word = if syn { &pairs[i].1 } else { &pairs[i].0 };
            Concept::atomic(word, kind(op))
        })
        .collect();
    (mk("S1", "Gauche", left), mk("S2", "Droite", right))
}
