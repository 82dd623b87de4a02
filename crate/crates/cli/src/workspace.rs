use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fclone_core::formula::{CspInstance, Env, PpsFormula};
use fclone_core::gadgets::GadgetPlan;
use fclone_core::FnTable;

use crate::dsl::{self, Document, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: `{name}` was already defined in {}", path.display(), first.display())]
    Conflict {
        path: PathBuf,
        name: String,
        first: PathBuf,
    },
    #[error("{}: no function files found", .0.display())]
    EmptyDirectory(PathBuf),
}

/// A loaded item together with the file it came from.
#[derive(Debug, Clone)]
pub struct Item<T> {
    pub name: String,
    pub source: PathBuf,
    pub value: T,
}

#[derive(Debug, Clone)]
pub enum Target {
    Formula(PpsFormula),
    Instance(CspInstance),
    Plan(GadgetPlan),
}

/// Definitions gathered from several files. A name may be defined twice
/// only with an identical table.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    functions: Vec<Item<FnTable>>,
    index: BTreeMap<String, usize>,
    pub targets: Vec<Item<Target>>,
}

impl Workspace {
    pub fn load(paths: &[PathBuf]) -> Result<Self, LoadError> {
        let mut ws = Workspace::default();
        for p in paths {
            ws.add_file(p)?;
        }
        Ok(ws)
    }

    /// Loads every regular file in `dir`, sorted by file name.
    pub fn load_dir(dir: &Path) -> Result<Self, LoadError> {
        let io = |source| LoadError::Io {
            path: dir.to_path_buf(),
            source,
        };
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()
            .map_err(io)?;
        files.retain(|p| p.is_file());
        files.sort();
        let ws = Self::load(&files)?;
        if ws.functions.is_empty() {
            return Err(LoadError::EmptyDirectory(dir.to_path_buf()));
        }
        Ok(ws)
    }

    pub fn add_file(&mut self, path: &Path) -> Result<(), LoadError> {
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.into(),
            source,
        })?;
        let doc = dsl::parse(&text).map_err(|source| LoadError::Parse {
            path: path.into(),
            source,
        })?;
        self.add_document(doc, path)
    }

    pub fn add_document(&mut self, doc: Document, path: &Path) -> Result<(), LoadError> {
        for (name, table) in doc.functions {
            if let Some(&i) = self.index.get(&name) {
                if self.functions[i].value != table {
                    return Err(LoadError::Conflict {
                        path: path.into(),
                        name,
                        first: self.functions[i].source.clone(),
                    });
                }
                continue;
            }
            self.index.insert(name.clone(), self.functions.len());
            self.functions.push(Item {
                name,
                source: path.into(),
                value: table,
            });
        }
        let targets = doc
            .formulas
            .into_iter()
            .map(|(n, f)| (n, Target::Formula(f)))
            .chain(
                doc.instances
                    .into_iter()
                    .map(|(n, i)| (n, Target::Instance(i))),
            )
            .chain(doc.plans.into_iter().map(|(n, p)| (n, Target::Plan(p))));
        for (name, value) in targets {
            if let Some(first) = self.targets.iter().find(|t| t.name == name) {
                return Err(LoadError::Conflict {
                    path: path.into(),
                    name,
                    first: first.source.clone(),
                });
            }
            self.targets.push(Item {
                name,
                source: path.into(),
                value,
            });
        }
        Ok(())
    }

    /// Functions in load order.
    pub fn functions(&self) -> &[Item<FnTable>] {
        &self.functions
    }

    pub fn function(&self, name: &str) -> Option<&FnTable> {
        self.index.get(name).map(|&i| &self.functions[i].value)
    }

    pub fn env(&self) -> Env {
        self.functions
            .iter()
            .map(|f| (f.name.clone(), f.value.clone()))
            .collect()
    }

    pub fn target(&self, name: &str) -> Option<&Item<Target>> {
        self.targets.iter().find(|t| t.name == name)
    }
}
