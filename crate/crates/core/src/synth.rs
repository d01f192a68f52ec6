//! Seeded generator for annotated corpora.
//!
//! The corpus mixes unambiguous numeric, date and free-text columns with
//! integer- and string-coded categoricals, and contaminates a share of the
//! columns with missing-value sentinels. It also plants the column shapes
//! that cardinality thresholds get wrong: categoricals with 11 to 13 levels,
//! sentinel-bearing integer codes, and short integer columns with a few dozen
//! distinct values.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{AnnotatedCorpus, AnnotatedDataset, ColumnAnnotation};
use crate::error::Result;
use crate::ingest::{DataColumn, DataTable};
use crate::types::DataType;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub datasets: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            datasets: 60,
            seed: 2021,
        }
    }
}

const SENTINELS: [&str; 9] = ["NULL", "NA", "N/A", "?", "-", "", "nan", "missing", "null"];

const LEVEL_POOLS: [&[&str]; 8] = [
    &["A", "B", "AB", "O"],
    &["yes", "no"],
    &["male", "female"],
    &["low", "medium", "high", "very high"],
    &["single", "married", "divorced", "widowed", "separated"],
    &[
        "red", "green", "blue", "yellow", "black", "white", "orange", "purple", "grey", "brown",
        "pink", "cyan", "magenta",
    ],
    &[
        "London", "Paris", "Berlin", "Madrid", "Rome", "Vienna", "Prague", "Warsaw", "Lisbon",
        "Dublin", "Oslo", "Athens", "Helsinki",
    ],
    &[
        "Electrical", "Gas", "Oil", "Solar", "Wind", "Hydro", "Nuclear", "Coal", "Biomass",
        "Geothermal", "Tidal", "Peat", "Diesel",
    ],
];

const SYLLABLES: [&str; 16] = [
    "ka", "lo", "mi", "ren", "sa", "tor", "vel", "an", "el", "dre", "qui", "ba", "nor", "ith", "ul",
    "zen",
];

const STREET_KINDS: [&str; 5] = ["Street", "Road", "Lane", "Avenue", "Close"];

const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September",
    "October", "November", "December",
];

#[derive(Debug, Clone, Copy)]
enum Kind {
    Identifier,
    Measurement,
    ShortCount,
    Float,
    IsoDate,
    IsoDateTime,
    TextDate,
    Year,
    Name,
    Address,
    StringCategory,
    IntegerCategory,
}

struct Generated {
    cells: Vec<String>,
    data_type: DataType,
    values: Option<Vec<String>>,
}

fn word(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(2..=3);
    let mut w: String = (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
    if let Some(first) = w.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    w
}

fn zipf_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let s: f64 = rng.random_range(0.0..1.2);
    (1..=k).map(|r| 1.0 / (r as f64).powf(s)).collect()
}

fn draw(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.random_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

/// Every level appears at least twice; the rest follow skewed frequencies.
fn categorical_cells(rng: &mut ChaCha8Rng, levels: &[String], n: usize) -> Vec<String> {
    let weights = zipf_weights(rng, levels.len());
    let mut cells: Vec<String> = levels.iter().flat_map(|l| [l.clone(), l.clone()]).collect();
    while cells.len() < n {
        cells.push(levels[draw(rng, &weights)].clone());
    }
    cells.truncate(n.max(levels.len()));
    cells
}

fn generate_column(rng: &mut ChaCha8Rng, kind: Kind, n: usize) -> Generated {
    let basic = |cells: Vec<String>, data_type| Generated {
        cells,
        data_type,
        values: None,
    };
    match kind {
        Kind::Identifier => {
            let start = rng.random_range(3000..90_000);
            let mut ids: Vec<String> = (0..n).map(|i| (start + 3 * i).to_string()).collect();
            ids.shuffle(rng);
            basic(ids, DataType::Integer)
        }
        Kind::Measurement => {
            let (lo, hi) = if rng.random_bool(0.3) {
                (-5000_i64, 5000)
            } else {
                (2200, 250_000)
            };
            basic(
                (0..n).map(|_| rng.random_range(lo..hi).to_string()).collect(),
                DataType::Integer,
            )
        }
        Kind::ShortCount => {
            // A short column whose distinct values sit just above the usual
            // cardinality cut-offs.
            let lo = rng.random_range(18..40);
            let span = (n as f64 * rng.random_range(1.5..2.5)) as i64;
            basic(
                (0..n).map(|_| rng.random_range(lo..lo + span).to_string()).collect(),
                DataType::Integer,
            )
        }
        Kind::Float => {
            let scale: f64 = [1.0, 10.0, 1000.0].choose(rng).copied().unwrap();
            let decimals = rng.random_range(1..=4);
            let signed = rng.random_bool(0.3);
            let cells = (0..n)
                .map(|_| {
                    let mut x: f64 = rng.random_range(0.0..1.0) * scale;
                    if signed && rng.random_bool(0.5) {
                        x = -x;
                    }
                    format!("{x:.decimals$}")
                })
                .collect();
            basic(cells, DataType::Float)
        }
        Kind::IsoDate | Kind::IsoDateTime | Kind::TextDate => {
            let base_year = rng.random_range(1950..2015);
            let cells = (0..n)
                .map(|_| {
                    let y = base_year + rng.random_range(0..8);
                    let m = rng.random_range(1..=12);
                    let d = rng.random_range(1..=28);
                    match kind {
                        Kind::IsoDate => format!("{y:04}-{m:02}-{d:02}"),
                        Kind::IsoDateTime => format!(
                            "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}",
                            rng.random_range(0..24),
                            rng.random_range(0..60),
                            rng.random_range(0..60)
                        ),
                        _ => format!("{d} {} {y}", MONTHS[m - 1]),
                    }
                })
                .collect();
            basic(cells, DataType::Date)
        }
        Kind::Year => {
            let lo = rng.random_range(1900..1990);
            basic(
                (0..n).map(|_| rng.random_range(lo..lo + 30).to_string()).collect(),
                DataType::Date,
            )
        }
        Kind::Name => basic(
            (0..n).map(|_| format!("{} {}", word(rng), word(rng))).collect(),
            DataType::String,
        ),
        Kind::Address => basic(
            (0..n)
                .map(|_| {
                    format!(
                        "{} {} {}",
                        rng.random_range(1..400),
                        word(rng),
                        STREET_KINDS.choose(rng).unwrap()
                    )
                })
                .collect(),
            DataType::String,
        ),
        Kind::StringCategory | Kind::IntegerCategory => {
            let max_levels = if n < 60 { 3 } else if n < 150 { 8 } else { 13 };
            let levels: Vec<String> = match kind {
                Kind::StringCategory => {
                    let pool = LEVEL_POOLS.choose(rng).unwrap();
                    let k = rng.random_range(2..=pool.len().min(max_levels));
                    pool[..k].iter().map(|s| s.to_string()).collect()
                }
                _ => {
                    let k = rng.random_range(2..=max_levels);
                    let (start, step) = *[(0, 1), (1, 1), (10, 10), (100, 1)].choose(rng).unwrap();
                    (0..k).map(|i| (start + step * i).to_string()).collect()
                }
            };
            let cells = categorical_cells(rng, &levels, n);
            Generated {
                cells,
                data_type: DataType::Categorical,
                values: Some(levels),
            }
        }
    }
}

/// Replaces 5 to 10% of the cells with one or two sentinels.
fn contaminate(rng: &mut ChaCha8Rng, cells: &mut [String]) {
    let kinds = rng.random_range(1..=2);
    let picks: Vec<&str> = SENTINELS.choose_multiple(rng, kinds).copied().collect();
    let rate = rng.random_range(0.05..0.10);
    let count = ((cells.len() as f64 * rate).round() as usize).max(1);
    let mut positions: Vec<usize> = (0..cells.len()).collect();
    positions.shuffle(rng);
    for (j, &p) in positions[..count].iter().enumerate() {
        cells[p] = picks[j % picks.len()].to_string();
    }
}

fn pick_kind(rng: &mut ChaCha8Rng, n: usize) -> Kind {
    use Kind::*;
    let table: &[(Kind, f64)] = &[
        (Identifier, 1.0),
        (Measurement, 1.5),
        (ShortCount, if n <= 60 { 2.0 } else { 0.0 }),
        (Float, 2.5),
        (IsoDate, 0.5),
        (IsoDateTime, 0.4),
        (TextDate, 0.4),
        (Year, 0.3),
        (Name, 0.8),
        (Address, 0.4),
        (StringCategory, 2.4),
        (IntegerCategory, 2.4),
    ];
    let weights: Vec<f64> = table.iter().map(|t| t.1).collect();
    table[draw(rng, &weights)].0
}

fn generate_dataset(rng: &mut ChaCha8Rng, d: usize) -> Result<AnnotatedDataset> {
    let n = match rng.random_range(0..10) {
        0..=2 => rng.random_range(25..=60),
        3..=6 => rng.random_range(100..=250),
        _ => rng.random_range(251..=400),
    };
    let width = rng.random_range(6..=9);
    let mut columns = Vec::with_capacity(width);
    let mut annotations = Vec::with_capacity(width);
    for i in 0..width {
        let kind = pick_kind(rng, n);
        let mut g = generate_column(rng, kind, n);
        if rng.random_bool(0.4) {
            contaminate(rng, &mut g.cells);
            if let Some(values) = &mut g.values {
                values.retain(|v| g.cells.contains(v));
            }
        }
        g.cells.shuffle(rng);
        let name = format!("{}_{i}", format!("{kind:?}").to_lowercase());
        columns.push(DataColumn::new(name.clone(), g.cells));
        annotations.push(ColumnAnnotation {
            name,
            data_type: g.data_type,
            values: g.values,
        });
    }
    let file = format!("synthetic_{d:03}.csv");
    let table = DataTable::new(format!("synthetic_{d:03}"), columns)?;
    AnnotatedDataset::new(file, table, &annotations)
}

/// Generates `config.datasets` tables with full annotations. The same
/// configuration always yields the same corpus.
pub fn generate(config: &SynthConfig) -> Result<AnnotatedCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let datasets = (0..config.datasets)
        .map(|d| generate_dataset(&mut rng, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnnotatedCorpus { datasets })
}
