//! JSON complex files: `{"vertices": [...], "facets": [[...]], "coloring": {"v": c}}`
//! with an optional `"trace"` recording a Walkup construction.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::complex::{Complex, VertexId};
use crate::constructions::WalkupTrace;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<VertexId>>,
    pub facets: Vec<Vec<VertexId>>,
    /// Vertex label (as a string key) to 0-based color.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<WalkupTrace>,
}

/// A complex read from disk, with the optional data validated.
#[derive(Clone, Debug)]
pub struct LoadedComplex {
    pub complex: Complex,
    pub coloring: Option<Coloring>,
    pub trace: Option<WalkupTrace>,
}

impl ComplexFile {
    pub fn new(c: &Complex, coloring: Option<&Coloring>, trace: Option<&WalkupTrace>) -> ComplexFile {
        ComplexFile {
            vertices: Some(c.vertices().to_vec()),
            facets: c.facets().iter().map(|f| f.vertices().to_vec()).collect(),
            coloring: coloring.map(|col| col.colors.iter().map(|(v, &k)| (v.to_string(), k)).collect()),
            trace: trace.cloned(),
        }
    }

    pub fn load(&self) -> Result<LoadedComplex> {
        let complex = match &self.vertices {
            Some(vs) => Complex::from_vertices_and_facets(vs, self.facets.clone())?,
            None => Complex::from_facets(self.facets.clone())?,
        };
        let coloring = match &self.coloring {
            None => None,
            Some(map) => {
                let mut colors = BTreeMap::new();
                for (k, &c) in map {
                    let v: VertexId = k
                        .parse()
                        .map_err(|_| crate::Error::InvalidArgument(format!("coloring key {k:?} is not a vertex label")))?;
                    colors.insert(v, c);
                }
                let d = usize::try_from(complex.dim() + 1).unwrap_or(0);
                let col = Coloring::new(d, colors);
                col.validate(&complex)?;
                Some(col)
            }
        };
        Ok(LoadedComplex { complex, coloring, trace: self.trace.clone() })
    }
}

pub fn to_json(c: &Complex, coloring: Option<&Coloring>, trace: Option<&WalkupTrace>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ComplexFile::new(c, coloring, trace))?)
}

pub fn from_json(s: &str) -> Result<LoadedComplex> {
    serde_json::from_str::<ComplexFile>(s)?.load()
}

pub fn read_complex(path: &Path) -> Result<LoadedComplex> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_complex(path: &Path, c: &Complex, coloring: Option<&Coloring>, trace: Option<&WalkupTrace>) -> Result<()> {
    std::fs::write(path, to_json(c, coloring, trace)? + "\n")?;
    Ok(())
}
