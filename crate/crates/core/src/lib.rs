//! Semantic integration of business-component models.
//!
//! Components from several source systems are turned into concept graphs, compared
//! member by member against a domain ontology and its thesaurus, classified for
//! synonym/homonym naming conflicts and merged into one result component set.

pub mod cli;
pub mod cm;
pub mod error;
pub mod integrate;
pub mod onto;
pub mod score;
pub mod simatch;
pub mod transform;

pub use cm::{
    check_component_set, check_layering, parse_component_set, union, Attribute, BusinessComponent,
    ComponentSet, Kind, LayeringWarning, Operation,
};
pub use error::{Error, Result};
pub use onto::{
    load_domain_ontology, normalize_term, AnchorResult, DomainConcept, DomainOntology, Relation,
    Thesaurus, ThesaurusEntry,
};
pub use score::Score;
pub use simatch::{
    bipartite_score, sigma, sigma_prime, sigma_with, similarity_matrix, similarity_matrix_with,
    Mode, SimConfig, SimilarityMatrix, Verdict,
};
pub use transform::{
    parse_ocm, to_component, to_ontology, transform_component, AnchorDiagnostic, ComponentOntology,
    Concept, ConceptKind,
};
pub use integrate::{
    align, align_with, detect_naming_conflicts, merge, render_alignment, Alignment,
    Classification, Correspondence, Endpoint, MergedComponent, RepresentationOntology,
};
