//! Annotated corpora: tables plus hand labels for their columns.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::categorical::ColumnAnalysis;
use crate::error::{Error, Result};
use crate::inference::InferenceConfig;
use crate::ingest::{read_table, DataColumn, DataTable};
use crate::machines::MachineSet;
use crate::types::DataType;

/// On-disk annotation document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationFile {
    pub datasets: Vec<DatasetAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetAnnotation {
    /// Path of the data file, relative to the corpus directory.
    pub file: String,
    pub columns: Vec<ColumnAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnAnnotation {
    pub name: String,
    #[serde(rename = "type")]
    pub data_type: DataType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
}

impl AnnotationFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Annotation(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedColumn {
    /// Position of the column in its table.
    pub index: usize,
    pub data_type: DataType,
    pub values: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedDataset {
    pub file: String,
    pub table: DataTable,
    pub columns: Vec<AnnotatedColumn>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotatedCorpus {
    pub datasets: Vec<AnnotatedDataset>,
}

impl AnnotatedDataset {
    pub fn new(file: impl Into<String>, table: DataTable, annotations: &[ColumnAnnotation]) -> Result<Self> {
        let file = file.into();
        let mut columns = Vec::with_capacity(annotations.len());
        for a in annotations {
            let index = table
                .columns()
                .iter()
                .position(|c| c.name() == a.name)
                .ok_or_else(|| Error::Annotation(format!("{file}: no column named `{}`", a.name)))?;
            let values = a.values.as_ref().map(|v| v.iter().cloned().collect::<BTreeSet<_>>());
            if a.data_type == DataType::Categorical && values.as_ref().is_none_or(BTreeSet::is_empty) {
                return Err(Error::Annotation(format!(
                    "{file}: categorical column `{}` needs a non-empty value list",
                    a.name
                )));
            }
            columns.push(AnnotatedColumn {
                index,
                data_type: a.data_type,
                values,
            });
        }
        Ok(Self { file, table, columns })
    }
}

impl AnnotatedCorpus {
    pub fn load(dir: impl AsRef<Path>, annotations: &AnnotationFile, delimiter: u8) -> Result<Self> {
        let dir = dir.as_ref();
        let datasets = annotations
            .datasets
            .iter()
            .map(|d| {
                let table = read_table(dir.join(&d.file), delimiter, true)?;
                AnnotatedDataset::new(d.file.clone(), table, &d.columns)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { datasets })
    }

    pub fn column_count(&self) -> usize {
        self.datasets.iter().map(|d| d.columns.len()).sum()
    }

    pub fn annotation_file(&self) -> AnnotationFile {
        AnnotationFile {
            datasets: self
                .datasets
                .iter()
                .map(|d| DatasetAnnotation {
                    file: d.file.clone(),
                    columns: d
                        .columns
                        .iter()
                        .map(|c| ColumnAnnotation {
                            name: d.table.columns()[c.index].name().to_string(),
                            data_type: c.data_type,
                            values: c.values.as_ref().map(|v| v.iter().cloned().collect()),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Writes every table as CSV under `dir` plus `annotations.json`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for d in &self.datasets {
            let path = dir.join(&d.file);
            let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            d.table.write_csv(std::io::BufWriter::new(file), b',')?;
        }
        self.annotation_file().save(dir.join("annotations.json"))
    }
}

/// One annotated column with its classifier-independent analysis.
#[derive(Debug, Clone)]
pub struct PreparedColumn {
    pub dataset: usize,
    pub file: String,
    pub index: usize,
    pub data: DataColumn,
    pub truth: DataType,
    pub truth_values: Option<BTreeSet<String>>,
    pub analysis: ColumnAnalysis,
}

/// Annotated columns in canonical order: by data file name, then column index.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub files: Vec<String>,
    pub columns: Vec<PreparedColumn>,
    dataset_columns: Vec<Vec<usize>>,
    pub machines: MachineSet,
    pub config: InferenceConfig,
}

impl PreparedCorpus {
    pub fn new(corpus: &AnnotatedCorpus, machines: MachineSet, config: InferenceConfig) -> Result<Self> {
        let mut order: Vec<usize> = (0..corpus.datasets.len()).collect();
        order.sort_by(|&a, &b| corpus.datasets[a].file.cmp(&corpus.datasets[b].file));

        let mut jobs = Vec::new();
        for (dataset, &source) in order.iter().enumerate() {
            let d = &corpus.datasets[source];
            let mut annotated: Vec<&AnnotatedColumn> = d.columns.iter().collect();
            annotated.sort_by_key(|c| c.index);
            for c in annotated {
                jobs.push((dataset, d, c));
            }
        }
        let columns = jobs
            .into_par_iter()
            .map(|(dataset, d, c)| {
                let data = d.table.columns()[c.index].clone();
                let analysis = ColumnAnalysis::new(&data, &machines, &config)?;
                Ok(PreparedColumn {
                    dataset,
                    file: d.file.clone(),
                    index: c.index,
                    data,
                    truth: c.data_type,
                    truth_values: c.values.clone(),
                    analysis,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut dataset_columns = vec![Vec::new(); order.len()];
        for (i, c) in columns.iter().enumerate() {
            dataset_columns[c.dataset].push(i);
        }
        Ok(Self {
            files: order.iter().map(|&i| corpus.datasets[i].file.clone()).collect(),
            columns,
            dataset_columns,
            machines,
            config,
        })
    }

    pub fn dataset_count(&self) -> usize {
        self.files.len()
    }

    /// Column indices belonging to the given datasets, in canonical order.
    pub fn columns_of(&self, datasets: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = datasets
            .iter()
            .flat_map(|&d| self.dataset_columns[d].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}
