//! Python bindings. Documents cross the boundary as JSON text; scores come back as
//! `fractions.Fraction` so they stay exact.

use cmfuse::{Classification, Mode, SimConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyList;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, s: cmfuse::Score) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((s.num(), s.den()))
}

fn config(mode: &str, recursive: bool) -> PyResult<SimConfig> {
    let mode = match mode {
        "literal" => Mode::Literal,
        "bipartite" => Mode::Bipartite,
        other => return Err(value_error(format!("unknown mode `{other}`"))),
    };
    Ok(SimConfig { mode, recursive })
}

#[pyfunction]
fn normalize_term(raw: &str) -> String {
    cmfuse::normalize_term(raw)
}

#[pyclass(module = "cmfuse", frozen)]
struct DomainOntology(cmfuse::DomainOntology);

#[pymethods]
impl DomainOntology {
    #[new]
    fn new(document: &str) -> PyResult<Self> {
        cmfuse::load_domain_ontology(document)
            .map(DomainOntology)
            .map_err(value_error)
    }

    #[getter]
    fn concept_ids(&self) -> Vec<String> {
        self.0.concepts().iter().map(|c| c.id.clone()).collect()
    }

    /// `None`, a concept id, or the list of candidate ids of a homonym.
    fn anchor<'py>(&self, py: Python<'py>, term: &str) -> PyResult<Bound<'py, PyAny>> {
        let term = cmfuse::normalize_term(term);
        Ok(match self.0.anchor(&term) {
            cmfuse::AnchorResult::None => py.None().into_bound(py),
            cmfuse::AnchorResult::Unique(id) => id.into_pyobject(py)?.into_any(),
            cmfuse::AnchorResult::Ambiguous(ids) => PyList::new(py, ids)?.into_any(),
        })
    }

    fn relation(&self, a: &str, b: &str) -> PyResult<&'static str> {
        Ok(match self.0.relation(a, b).map_err(value_error)? {
            cmfuse::Relation::Same => "same",
            cmfuse::Relation::HomonymSharedTerm => "homonym_shared_term",
            cmfuse::Relation::Unrelated => "unrelated",
        })
    }
}

#[pyclass(module = "cmfuse", frozen)]
struct ComponentSet(cmfuse::ComponentSet);

#[pymethods]
impl ComponentSet {
    #[new]
    fn new(document: &str) -> PyResult<Self> {
        cmfuse::parse_component_set(document)
            .map(ComponentSet)
            .map_err(value_error)
    }

    #[getter]
    fn system(&self) -> String {
        self.0.system.clone()
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.0.components.iter().map(|c| c.name.clone()).collect()
    }

    fn layering_warnings(&self) -> Vec<String> {
        cmfuse::check_layering(&self.0)
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn union(&self, other: &ComponentSet) -> PyResult<ComponentSet> {
        cmfuse::union(&self.0, &other.0)
            .map(ComponentSet)
            .map_err(value_error)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("ComponentSet({:?}, {} components)", self.0.system, self.0.len())
    }
}

#[pyclass(module = "cmfuse", frozen, from_py_object)]
#[derive(Clone)]
struct ComponentOntology(cmfuse::ComponentOntology);

#[pymethods]
impl ComponentOntology {
    #[new]
    fn new(document: &str) -> PyResult<Self> {
        cmfuse::parse_ocm(document)
            .map(ComponentOntology)
            .map_err(value_error)
    }

    #[getter]
    fn source(&self) -> String {
        self.0.source.clone()
    }

    #[getter]
    fn origin(&self) -> String {
        self.0.origin.clone()
    }

    #[getter]
    fn term(&self) -> String {
        self.0.root.term.clone()
    }

    #[getter]
    fn members(&self) -> Vec<String> {
        self.0.members().iter().map(|m| m.term.clone()).collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __repr__(&self) -> String {
        format!("ComponentOntology({:?})", self.0.path())
    }
}

#[pyclass(module = "cmfuse", frozen)]
struct SimilarityMatrix(cmfuse::SimilarityMatrix);

#[pymethods]
impl SimilarityMatrix {
    #[getter]
    fn aggregate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.0.aggregate)
    }

    #[getter]
    fn verdict(&self) -> &'static str {
        self.0.verdict.as_str()
    }

    #[getter]
    fn left_members(&self) -> Vec<String> {
        self.0.left_members().to_vec()
    }

    #[getter]
    fn right_members(&self) -> Vec<String> {
        self.0.right_members().to_vec()
    }

    #[getter]
    fn cells<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        self.0
            .cells
            .iter()
            .map(|row| row.iter().map(|&s| fraction(py, s)).collect())
            .collect()
    }

    #[pyo3(signature = (color = false))]
    fn render(&self, color: bool) -> String {
        self.0.render_text(color)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

type RootPair<'py> = (String, String, Bound<'py, PyAny>, &'static str);

#[pyclass(module = "cmfuse", frozen)]
struct Alignment(cmfuse::Alignment);

#[pymethods]
impl Alignment {
    #[new]
    fn new(document: &str) -> PyResult<Self> {
        cmfuse::Alignment::from_json(document)
            .map(Alignment)
            .map_err(value_error)
    }

    /// Root-level pairs as `(left, right, score, class)` tuples.
    fn root_pairs<'py>(
        &self,
        py: Python<'py>,
    ) -> PyResult<Vec<RootPair<'py>>> {
        self.0
            .roots()
            .map(|c| {
                Ok((
                    c.left.path(),
                    c.right.path(),
                    fraction(py, c.score)?,
                    c.classification.as_str(),
                ))
            })
            .collect()
    }

    fn count(&self, class: &str) -> PyResult<usize> {
        let class = match class {
            "equivalent" => Classification::Equivalent,
            "synonym_pair" => Classification::SynonymPair,
            "homonym_conflict" => Classification::HomonymConflict,
            "distinct" => Classification::Distinct,
            other => return Err(value_error(format!("unknown class `{other}`"))),
        };
        Ok(self.0.count(class))
    }

    #[getter]
    fn diagnostics(&self) -> Vec<String> {
        self.0.diagnostics.clone()
    }

    #[pyo3(signature = (color = false))]
    fn render(&self, color: bool) -> String {
        cmfuse::render_alignment(&self.0, color)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

#[pyclass(module = "cmfuse", frozen)]
struct MergedComponent(cmfuse::MergedComponent);

#[pymethods]
impl MergedComponent {
    #[getter]
    fn result(&self) -> ComponentSet {
        ComponentSet(self.0.result.clone())
    }

    #[getter]
    fn provenance(&self) -> Vec<Vec<String>> {
        self.0.provenance.clone()
    }

    #[getter]
    fn equivalences(&self) -> Vec<(String, String)> {
        self.0
            .representation
            .equivalences
            .iter()
            .map(|[a, b]| (a.clone(), b.clone()))
            .collect()
    }

    fn cm_r_json(&self) -> String {
        self.0.result.to_json()
    }

    fn ocm_r_json(&self) -> String {
        self.0.representation.to_json()
    }
}

fn to_ocms(set: &ComponentSet, od: &DomainOntology) -> Vec<cmfuse::ComponentOntology> {
    set.0
        .components
        .iter()
        .map(|c| cmfuse::to_ontology(c, &od.0))
        .collect()
}

/// Component ontologies of every component in the set, in declaration order.
#[pyfunction]
fn transform(set: &ComponentSet, od: &DomainOntology) -> Vec<ComponentOntology> {
    to_ocms(set, od).into_iter().map(ComponentOntology).collect()
}

#[pyfunction]
fn sigma_prime<'py>(
    py: Python<'py>,
    a: &ComponentOntology,
    b: &ComponentOntology,
) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, cmfuse::sigma_prime(&a.0.root, &b.0.root))
}

#[pyfunction]
#[pyo3(signature = (a, b, od, mode = "literal", recursive = true))]
fn sigma<'py>(
    py: Python<'py>,
    a: &ComponentOntology,
    b: &ComponentOntology,
    od: &DomainOntology,
    mode: &str,
    recursive: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config(mode, recursive)?;
    fraction(py, cmfuse::sigma_with(&a.0.root, &b.0.root, &od.0, cfg))
}

#[pyfunction]
fn bipartite_score<'py>(
    py: Python<'py>,
    a: &ComponentOntology,
    b: &ComponentOntology,
    od: &DomainOntology,
) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, cmfuse::bipartite_score(&a.0.root, &b.0.root, &od.0))
}

#[pyfunction]
#[pyo3(signature = (a, b, od, mode = "literal", recursive = true))]
fn similarity_matrix(
    a: &ComponentOntology,
    b: &ComponentOntology,
    od: &DomainOntology,
    mode: &str,
    recursive: bool,
) -> PyResult<SimilarityMatrix> {
    let cfg = config(mode, recursive)?;
    Ok(SimilarityMatrix(cmfuse::similarity_matrix_with(
        &a.0, &b.0, &od.0, cfg,
    )))
}

#[pyfunction]
#[pyo3(signature = (ocms, od, mode = "literal", recursive = true))]
fn align(
    ocms: Vec<ComponentOntology>,
    od: &DomainOntology,
    mode: &str,
    recursive: bool,
) -> PyResult<Alignment> {
    let set: Vec<_> = ocms.into_iter().map(|o| o.0).collect();
    Ok(Alignment(cmfuse::align_with(&set, &od.0, config(mode, recursive)?)))
}

#[pyfunction]
fn merge(alignment: &Alignment) -> PyResult<MergedComponent> {
    cmfuse::merge(&alignment.0, &alignment.0.ontologies)
        .map(MergedComponent)
        .map_err(value_error)
}

/// Union, transform, align and merge two component sets.
#[pyfunction]
#[pyo3(signature = (a, b, od, mode = "literal", recursive = true))]
fn pipeline(
    a: &ComponentSet,
    b: &ComponentSet,
    od: &DomainOntology,
    mode: &str,
    recursive: bool,
) -> PyResult<(Alignment, MergedComponent)> {
    let all = ComponentSet(cmfuse::union(&a.0, &b.0).map_err(value_error)?);
    let al = cmfuse::align_with(&to_ocms(&all, od), &od.0, config(mode, recursive)?);
    let merged = cmfuse::merge(&al, &al.ontologies).map_err(value_error)?;
    Ok((Alignment(al), MergedComponent(merged)))
}

#[pymodule]
#[pyo3(name = "cmfuse")]
fn cmfuse_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DomainOntology>()?;
    m.add_class::<ComponentSet>()?;
    m.add_class::<ComponentOntology>()?;
    m.add_class::<SimilarityMatrix>()?;
    m.add_class::<Alignment>()?;
    m.add_class::<MergedComponent>()?;
    m.add_function(wrap_pyfunction!(normalize_term, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_prime, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(bipartite_score, m)?)?;
    m.add_function(wrap_pyfunction!(similarity_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(align, m)?)?;
    m.add_function(wrap_pyfunction!(merge, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    Ok(())
}
