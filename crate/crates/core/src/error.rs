use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed JSON or a schema mismatch, with the 1-based position reported by the parser.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("component `{component}`: unknown kind `{kind}` (expected entity, process, utility or data)")]
    UnknownKind { component: String, kind: String },

    #[error("empty {what} name{}", context.as_deref().map(|c| format!(" in `{c}`")).unwrap_or_default())]
    EmptyName {
        what: &'static str,
        context: Option<String>,
    },

    #[error("component `{component}`: duplicate member term `{term}`")]
    DuplicateTerm { component: String, term: String },

    #[error("component `{component}`: anchor hint for `{term}` matches no member")]
    UnknownAnchorTerm { component: String, term: String },

    #[error("duplicate component `{name}` in system `{source_system}`")]
    DuplicateComponent { source_system: String, name: String },

    #[error("duplicate concept id `{0}`")]
    DuplicateConcept(String),

    #[error("concept `{concept}` has unknown parent `{parent}`")]
    DanglingParent { concept: String, parent: String },

    #[error("thesaurus entry refers to unknown concept `{0}`")]
    DanglingThesaurusConcept(String),

    #[error("thesaurus entry for `{concept}` lists `{term}` twice")]
    DuplicateThesaurusTerm { concept: String, term: String },

    #[error("taxonomy cycle through concept `{0}`")]
    TaxonomyCycle(String),

    #[error("unknown concept id `{0}`")]
    UnknownConcept(String),

    #[error("alignment references `{0}`, which is not in the ontology set")]
    InconsistentAlignment(String),

    #[error("invalid concept graph: {0}")]
    InvalidConcept(String),

    #[error("invalid score `{0}`")]
    InvalidScore(String),
}

impl Error {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: strip_position(&err.to_string()),
        }
    }
}

// serde_json appends " at line X column Y" to its messages; the position is kept separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(idx) => msg[..idx].to_string(),
        None => msg.to_string(),
    }
}
