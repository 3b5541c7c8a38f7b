//! Syntactic (`sigma_prime`) and thesaurus-aware semantic (`sigma`) similarity.
//!
//! Atomic concepts compare by exact term; composites average the member-pair matrix
//! over the larger arity. `sigma` first consults the domain ontology when both
//! concepts anchor to a concept, then descends into members, and otherwise falls
//! back to `sigma_prime`.

use std::borrow::Cow;
use std::fmt::{self, Write as _};

use num_integer::Integer;
use num_rational::Ratio;
use pathfinding::matrix::Matrix;
use serde::Serialize;

use crate::onto::{AnchorResult, DomainOntology, Relation};
use crate::score::Score;
use crate::transform::{ComponentOntology, Concept};

/// How a member matrix is collapsed into one score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Sum of every cell divided by the larger arity, clamped to one.
    #[default]
    Literal,
    /// Maximum-weight one-to-one matching divided by the larger arity.
    Bipartite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub mode: Mode,
    /// Consult the thesaurus on member pairs of composites. When off, composites
    /// that the ontology does not decide fall straight back to `sigma_prime`.
    pub recursive: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: Mode::Literal,
            recursive: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Synonym,
    NotSynonym,
}

impl Verdict {
    pub fn of(score: Score) -> Verdict {
        if score.is_one() {
            Verdict::Synonym
        } else {
            Verdict::NotSynonym
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Synonym => "synonym",
            Verdict::NotSynonym => "not_synonym",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

// An atomic concept compared against a composite acts as its own singleton member list.
fn members_or_self(c: &Concept) -> &[Concept] {
    if c.is_atomic() {
        std::slice::from_ref(c)
    } else {
        &c.members
    }
}

fn cell_matrix<F>(left: &[Concept], right: &[Concept], mut cell: F) -> Vec<Vec<Score>>
where
    F: FnMut(&Concept, &Concept) -> Score,
{
    left.iter()
        .map(|l| right.iter().map(|r| cell(l, r)).collect())
        .collect()
}

fn aggregate(cells: &[Vec<Score>], rows: usize, cols: usize, mode: Mode) -> Score {
    let arity = rows.max(cols);
    match mode {
        Mode::Literal => {
            let sum = cells
                .iter()
                .flatten()
                .fold(Ratio::from_integer(0), |acc, s| acc + s.ratio());
            Score::mean_clamped(sum, arity)
        }
        Mode::Bipartite => Score::mean_clamped(max_matching_weight(cells, rows, cols), arity),
    }
}

/// Weight of a maximum-weight one-to-one assignment over the cell matrix.
///
/// Cells are scaled by the lcm of their denominators so the matching runs on integers.
fn max_matching_weight(cells: &[Vec<Score>], rows: usize, cols: usize) -> Ratio<u64> {
    if rows == 0 || cols == 0 {
        return Ratio::from_integer(0);
    }
    let scale = cells.iter().flatten().fold(1u64, |acc, s| acc.lcm(&s.den()));
    let weight = |i: usize, j: usize| -> i64 {
        let s = cells[i][j];
        (s.num() * (scale / s.den())) as i64
    };
    // the solver needs rows <= columns
    let matrix = if rows <= cols {
        Matrix::from_fn(rows, cols, |(i, j)| weight(i, j))
    } else {
        Matrix::from_fn(cols, rows, |(j, i)| weight(i, j))
    };
    let (total, _) = pathfinding::kuhn_munkres::kuhn_munkres(&matrix);
    Ratio::new(total as u64, scale)
}

/// Syntactic similarity: term equality on atomics, averaged member matrix on composites.
pub fn sigma_prime(c1: &Concept, c2: &Concept) -> Score {
    if c1.is_atomic() && c2.is_atomic() {
        return Score::from_bool(c1.term == c2.term && c1.kind_tag == c2.kind_tag);
    }
    let (left, right) = (members_or_self(c1), members_or_self(c2));
    let cells = cell_matrix(left, right, sigma_prime);
    aggregate(&cells, left.len(), right.len(), Mode::Literal)
}

fn effective_anchor<'a>(c: &'a Concept, od: &DomainOntology) -> Option<Cow<'a, str>> {
    match &c.anchor {
        Some(id) if od.contains(id) => Some(Cow::Borrowed(id)),
        _ => match od.anchor(&c.term) {
            AnchorResult::Unique(id) => Some(Cow::Owned(id)),
            _ => None,
        },
    }
}

/// Semantic similarity with the default configuration (literal, recursive).
pub fn sigma(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Score {
    sigma_with(c1, c2, od, SimConfig::default())
}

pub fn sigma_with(c1: &Concept, c2: &Concept, od: &DomainOntology, cfg: SimConfig) -> Score {
    let both_atomic = c1.is_atomic() && c2.is_atomic();
    if both_atomic && c1.kind_tag != c2.kind_tag {
        return Score::ZERO;
    }
    if let (Some(a), Some(b)) = (effective_anchor(c1, od), effective_anchor(c2, od)) {
        match od.relation(&a, &b) {
            Ok(Relation::Same) => return Score::ONE,
            Ok(Relation::HomonymSharedTerm) => return Score::ZERO,
            Ok(Relation::Unrelated) if both_atomic => return Score::ZERO,
            _ => {}
        }
    }
    if cfg.recursive && !c1.is_atomic() && !c2.is_atomic() {
        let cells = cell_matrix(&c1.members, &c2.members, |l, r| sigma_with(l, r, od, cfg));
        return aggregate(&cells, c1.members.len(), c2.members.len(), cfg.mode);
    }
    sigma_prime(c1, c2)
}

/// Matching-based score between two composites: the best one-to-one pairing of members
/// under `sigma` weights, divided by the larger arity.
pub fn bipartite_score(c1: &Concept, c2: &Concept, od: &DomainOntology) -> Score {
    let cfg = SimConfig {
        mode: Mode::Bipartite,
        recursive: true,
    };
    let (left, right) = (members_or_self(c1), members_or_self(c2));
    let cells = cell_matrix(left, right, |l, r| sigma_with(l, r, od, cfg));
    aggregate(&cells, left.len(), right.len(), Mode::Bipartite)
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixSide {
    pub source: String,
    pub origin: String,
    pub term: String,
    pub members: Vec<String>,
}

impl MatrixSide {
    fn of(ocm: &ComponentOntology) -> Self {
        MatrixSide {
            source: ocm.source.clone(),
            origin: ocm.origin.clone(),
            term: ocm.root.term.clone(),
            members: ocm.members().iter().map(|m| m.term.clone()).collect(),
        }
    }
}

/// Member-by-member similarity between two component ontologies.
#[derive(Debug, Clone, Serialize)]
pub struct SimilarityMatrix {
    pub left: MatrixSide,
    pub right: MatrixSide,
    pub cells: Vec<Vec<Score>>,
    pub aggregate: Score,
    pub verdict: Verdict,
    pub mode: Mode,
    pub recursive: bool,
}

impl SimilarityMatrix {
    pub fn left_members(&self) -> &[String] {
        &self.left.members
    }

    pub fn right_members(&self) -> &[String] {
        &self.right.members
    }

    /// Whether both roots carry the same designating term.
    pub fn same_name(&self) -> bool {
        self.left.term == self.right.term
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("matrix serializes");
        out.push('\n');
        out
    }

    /// Plain-text grid: left members down the side, right members across the top.
    pub fn render_text(&self, color: bool) -> String {
        let corner = format!("{} \\ {}", self.left.origin, self.right.origin);
        let first_width = self
            .left
            .members
            .iter()
            .map(|m| m.chars().count())
            .chain([corner.chars().count()])
            .max()
            .unwrap_or(0);
        let widths: Vec<usize> = self
            .right
            .members
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let cell_w = self.cells.iter().map(|row| row[j].to_string().len()).max().unwrap_or(1);
                m.chars().count().max(cell_w)
            })
            .collect();

        let mut out = String::new();
        let _ = write!(out, "{}", pad(&corner, first_width));
        for (m, w) in self.right.members.iter().zip(&widths) {
            let _ = write!(out, " | {}", pad(m, *w));
        }
        out.push('\n');
        let _ = write!(out, "{}", "-".repeat(first_width));
        for w in &widths {
            let _ = write!(out, "-+-{}", "-".repeat(*w));
        }
        out.push('\n');
        for (m, row) in self.left.members.iter().zip(&self.cells) {
            let _ = write!(out, "{}", pad(m, first_width));
            for (cell, w) in row.iter().zip(&widths) {
                let _ = write!(out, " | {}", pad(&cell.to_string(), *w));
            }
            out.push('\n');
        }
        let verdict = match (color, self.verdict) {
            (false, v) => v.to_string(),
            (true, Verdict::Synonym) => format!("\x1b[32m{}\x1b[0m", self.verdict),
            (true, Verdict::NotSynonym) => format!("\x1b[31m{}\x1b[0m", self.verdict),
        };
        let _ = writeln!(out, "aggregate: {}", self.aggregate);
        let _ = writeln!(out, "verdict: {verdict}");
        out
    }
}

fn pad(s: &str, width: usize) -> String {
    let n = s.chars().count();
    format!("{s}{}", " ".repeat(width.saturating_sub(n)))
}

pub fn similarity_matrix(
    a: &ComponentOntology,
    b: &ComponentOntology,
    od: &DomainOntology,
) -> SimilarityMatrix {
    similarity_matrix_with(a, b, od, SimConfig::default())
}

/// Member matrix of two component ontologies; root names are not part of the grid.
///
/// Two memberless roots have nothing to compare but their own terms, so their
/// aggregate is `sigma` of the roots.
pub fn similarity_matrix_with(
    a: &ComponentOntology,
    b: &ComponentOntology,
    od: &DomainOntology,
    cfg: SimConfig,
) -> SimilarityMatrix {
    let (left, right) = (a.members(), b.members());
    let cells = cell_matrix(left, right, |l, r| sigma_with(l, r, od, cfg));
    let aggregate = if left.is_empty() && right.is_empty() {
        sigma_with(&a.root, &b.root, od, cfg)
    } else {
        aggregate(&cells, left.len(), right.len(), cfg.mode)
    };
    SimilarityMatrix {
        left: MatrixSide::of(a),
        right: MatrixSide::of(b),
        cells,
        aggregate,
        verdict: Verdict::of(aggregate),
        mode: cfg.mode,
        recursive: cfg.recursive,
    }
}
