//! Dataset ingestion, standardization and simulation generators.
//!
//! The on-disk format is long-form CSV with a header: one row per
//! (patient, response) holding the patient id, its population label, the
//! response label and the numeric value. Population order comes from a
//! declared severity ordering, never from file order; patients are sorted by
//! id within population so shuffled files load identically.

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sample sizes of the motivating four-population study.
pub const DEFAULT_SIZES: [usize; 4] = [50, 19, 9, 22];

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column '{0}' in header")]
    MissingColumn(String),
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error("patient '{patient}' is missing response '{response}'")]
    Incomplete { patient: String, response: String },
    #[error("file contains no data rows")]
    Empty,
    #[error("response '{response}' has zero pooled standard deviation")]
    ZeroSd { response: String },
    #[error("unknown data generating process '{0}'")]
    UnknownDgp(String),
    #[error("{0}")]
    Invalid(String),
}

/// Column names of the long-form CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSchema {
    pub id_col: String,
    pub population_col: String,
    pub response_col: String,
    pub value_col: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            id_col: "id".into(),
            population_col: "population".into(),
            response_col: "response".into(),
            value_col: "value".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub population_labels: Vec<String>,
    pub response_labels: Vec<String>,
    pub sizes: Vec<usize>,
    /// Patient ids, `[population][patient]`, sorted within population.
    pub patient_ids: Vec<Vec<String>>,
    /// Values indexed `[response][population][patient]`.
    pub values: Vec<Vec<Vec<f64>>>,
    /// Per-response `(mean, sd)` subtracted/divided out, when standardized.
    pub standardization: Option<Vec<(f64, f64)>>,
}

impl Dataset {
    pub fn n_populations(&self) -> usize {
        self.population_labels.len()
    }

    pub fn n_responses(&self) -> usize {
        self.response_labels.len()
    }

    pub fn total_patients(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Cheap content fingerprint for checkpoint validation.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.population_labels.hash(&mut h);
        self.response_labels.hash(&mut h);
        self.sizes.hash(&mut h);
        for m in &self.values {
            for j in m {
                for v in j {
                    v.to_bits().hash(&mut h);
                }
            }
        }
        h.finish()
    }
}

/// Orders patient ids numerically when possible, lexicographically otherwise.
fn id_key(id: &str) -> (u8, u64, String) {
    match id.parse::<f64>() {
        Ok(v) if v.is_finite() => {
            // Order-preserving bit mapping of finite floats.
            let bits = v.to_bits();
            let key = if bits & (1 << 63) != 0 {
                !bits
            } else {
                bits | (1 << 63)
            };
            (0, key, String::new())
        }
        _ => (1, 0, id.to_string()),
    }
}

/// Loads a long-form CSV. `severity_order` fixes the population order and the
/// admissible labels; `response_order`, when given, fixes the response order
/// (otherwise responses sort lexicographically).
pub fn load_csv(
    path: &Path,
    schema: &CsvSchema,
    severity_order: &[String],
    response_order: Option<&[String]>,
) -> Result<Dataset, DataError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &String| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.clone()))
    };
    let (ci, cp, cr, cv) = (
        col(&schema.id_col)?,
        col(&schema.population_col)?,
        col(&schema.response_col)?,
        col(&schema.value_col)?,
    );

    // patient id -> (population index, response -> value)
    let mut per_patient: BTreeMap<String, (usize, BTreeMap<String, f64>)> = BTreeMap::new();
    let mut responses_seen: Vec<String> = Vec::new();
    let mut n_rows = 0usize;
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // header is row 1
        let record = record?;
        let get = |c: usize| -> Result<&str, DataError> {
            record.get(c).map(str::trim).ok_or(DataError::Row {
                row,
                msg: "short record".into(),
            })
        };
        let id = get(ci)?.to_string();
        let pop = get(cp)?.to_string();
        let resp = get(cr)?.to_string();
        let raw = get(cv)?;
        if id.is_empty() || pop.is_empty() || resp.is_empty() || raw.is_empty() {
            return Err(DataError::Row {
                row,
                msg: "empty cell".into(),
            });
        }
        let value: f64 = raw.parse().map_err(|_| DataError::Row {
            row,
            msg: format!("non-numeric value '{raw}'"),
        })?;
        let j = severity_order
            .iter()
            .position(|p| *p == pop)
            .ok_or(DataError::Row {
                row,
                msg: format!("unknown population label '{pop}'"),
            })?;
        if !responses_seen.contains(&resp) {
            responses_seen.push(resp.clone());
        }
        let entry = per_patient.entry(id.clone()).or_insert((j, BTreeMap::new()));
        if entry.0 != j {
            return Err(DataError::Row {
                row,
                msg: format!("patient '{id}' appears in two populations"),
            });
        }
        if entry.1.insert(resp.clone(), value).is_some() {
            return Err(DataError::Row {
                row,
                msg: format!("duplicate value for patient '{id}' response '{resp}'"),
            });
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(DataError::Empty);
    }

    let response_labels: Vec<String> = match response_order {
        Some(order) => order.to_vec(),
        None => {
            let mut r = responses_seen.clone();
            r.sort();
            r
        }
    };

    // Stable patient order within each population.
    let mut patient_ids: Vec<Vec<String>> = vec![Vec::new(); severity_order.len()];
    for (id, (j, _)) in &per_patient {
        patient_ids[*j].push(id.clone());
    }
    for ids in patient_ids.iter_mut() {
        ids.sort_by_key(|id| id_key(id));
    }
    let sizes: Vec<usize> = patient_ids.iter().map(Vec::len).collect();
    if sizes.iter().any(|&n| n == 0) {
        return Err(DataError::Invalid(
            "every population needs at least one patient".into(),
        ));
    }

    let mut values = vec![vec![Vec::new(); severity_order.len()]; response_labels.len()];
    for (m, resp) in response_labels.iter().enumerate() {
        for (j, ids) in patient_ids.iter().enumerate() {
            for id in ids {
                let (_, map) = &per_patient[id];
                let v = map.get(resp).ok_or(DataError::Incomplete {
                    patient: id.clone(),
                    response: resp.clone(),
                })?;
                values[m][j].push(*v);
            }
        }
    }

    Ok(Dataset {
        population_labels: severity_order.to_vec(),
        response_labels,
        sizes,
        patient_ids,
        values,
        standardization: None,
    })
}

/// Writes the long-form CSV (atomic: temp file then rename).
pub fn write_csv(ds: &Dataset, path: &Path, schema: &CsvSchema) -> Result<(), DataError> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record([
            schema.id_col.as_str(),
            schema.population_col.as_str(),
            schema.response_col.as_str(),
            schema.value_col.as_str(),
        ])?;
        for (m, resp) in ds.response_labels.iter().enumerate() {
            for (j, pop) in ds.population_labels.iter().enumerate() {
                for (i, id) in ds.patient_ids[j].iter().enumerate() {
                    w.write_record([
                        id.as_str(),
                        pop.as_str(),
                        resp.as_str(),
                        &format!("{}", ds.values[m][j][i]),
                    ])?;
                }
            }
        }
        w.flush()?;
    }
    atomic_write(path, &buf)?;
    Ok(())
}

/// Writes bytes through a temp file in the same directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "out".into())
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// Subtracts the pooled (all-population) mean and divides by the pooled
/// standard deviation, per response; records the transform so summaries can
/// map back to the original scale. Pooling across populations is essential:
/// per-population standardization would erase the location differences under
/// study.
pub fn standardize(ds: &Dataset) -> Result<Dataset, DataError> {
    let mut out = ds.clone();
    let mut record = Vec::with_capacity(ds.n_responses());
    for (m, resp) in ds.response_labels.iter().enumerate() {
        let all: Vec<f64> = ds.values[m].iter().flatten().cloned().collect();
        let n = all.len() as f64;
        let mean = all.iter().sum::<f64>() / n;
        let var = all.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        if !(var > 0.0) {
            return Err(DataError::ZeroSd {
                response: resp.clone(),
            });
        }
        let sd = var.sqrt();
        for jv in out.values[m].iter_mut() {
            for v in jv.iter_mut() {
                *v = (*v - mean) / sd;
            }
        }
        record.push((mean, sd));
    }
    out.standardization = Some(record);
    Ok(out)
}

/// Inverse of [`standardize`].
pub fn destandardize(ds: &Dataset) -> Dataset {
    let mut out = ds.clone();
    if let Some(record) = ds.standardization.clone() {
        for (m, (mean, sd)) in record.iter().enumerate() {
            for jv in out.values[m].iter_mut() {
                for v in jv.iter_mut() {
                    *v = *v * sd + mean;
                }
            }
        }
        out.standardization = None;
    }
    out
}

/// Simulation generators: the two-component staircase design plus five
/// alternative mechanisms (outlier, non-location effect, three asymmetric
/// designs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dgp {
    Main,
    Dgp1,
    Dgp2,
    Dgp3,
    Dgp4,
    Dgp5,
}

impl std::str::FromStr for Dgp {
    type Err = DataError;
    fn from_str(s: &str) -> Result<Self, DataError> {
        match s {
            "main" => Ok(Dgp::Main),
            "dgp1" => Ok(Dgp::Dgp1),
            "dgp2" => Ok(Dgp::Dgp2),
            "dgp3" => Ok(Dgp::Dgp3),
            "dgp4" => Ok(Dgp::Dgp4),
            "dgp5" => Ok(Dgp::Dgp5),
            other => Err(DataError::UnknownDgp(other.into())),
        }
    }
}

impl std::fmt::Display for Dgp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Dgp::Main => "main",
            Dgp::Dgp1 => "dgp1",
            Dgp::Dgp2 => "dgp2",
            Dgp::Dgp3 => "dgp3",
            Dgp::Dgp4 => "dgp4",
            Dgp::Dgp5 => "dgp5",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy)]
enum Component {
    /// `(mean, variance)`.
    Norm(f64, f64),
    /// `(shape, rate)`.
    Gam(f64, f64),
}

#[derive(Clone)]
struct Mixture {
    comps: Vec<(f64, Component)>,
}

impl Mixture {
    fn norm(mean: f64, var: f64) -> Self {
        Mixture {
            comps: vec![(1.0, Component::Norm(mean, var))],
        }
    }
    fn two(m1: f64, m2: f64, var: f64, w1: f64) -> Self {
        Mixture {
            comps: vec![
                (w1, Component::Norm(m1, var)),
                (1.0 - w1, Component::Norm(m2, var)),
            ],
        }
    }
    fn gamma(shape: f64, rate: f64) -> Self {
        Mixture {
            comps: vec![(1.0, Component::Gam(shape, rate))],
        }
    }

    /// Component indicator first, then the draw, so fixtures can replay the
    /// provenance of each point.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = self.comps[0].1;
        for (w, c) in &self.comps {
            acc += w;
            if u < acc {
                chosen = *c;
                break;
            }
        }
        match chosen {
            Component::Norm(mean, var) => Normal::new(mean, var.sqrt()).unwrap().sample(rng),
            Component::Gam(shape, rate) => Gamma::new(shape, 1.0 / rate).unwrap().sample(rng),
        }
    }

    fn mean(&self) -> f64 {
        self.comps
            .iter()
            .map(|(w, c)| {
                w * match c {
                    Component::Norm(m, _) => *m,
                    Component::Gam(a, b) => a / b,
                }
            })
            .sum()
    }
}

fn dgp_mixtures(dgp: Dgp) -> [Mixture; 4] {
    match dgp {
        Dgp::Main => [
            Mixture::two(0.0, 2.0, 0.5, 0.5),
            Mixture::two(2.0, 4.0, 0.5, 0.5),
            Mixture::two(4.0, 6.0, 0.5, 0.5),
            Mixture::two(6.0, 8.0, 0.5, 0.5),
        ],
        Dgp::Dgp1 => [
            Mixture::norm(0.0, 0.5), // last patient overridden below
            Mixture::norm(1.0, 0.5),
            Mixture::norm(1.0, 0.5),
            Mixture::norm(2.0, 0.5),
        ],
        Dgp::Dgp2 => [
            Mixture::two(-1.0, 1.0, 0.5, 0.5),
            Mixture::norm(1.0, 0.5),
            Mixture::norm(1.0, 0.5),
            Mixture::norm(2.0, 0.5),
        ],
        Dgp::Dgp3 => [
            Mixture::norm(0.0, 0.5),
            Mixture::gamma(3.0, 3.0),
            Mixture::norm(1.0, 0.5),
            Mixture::norm(2.0, 0.5),
        ],
        Dgp::Dgp4 => [
            Mixture::two(-1.0, 1.0, 0.5, 0.7),
            Mixture::norm(1.0, 0.5),
            Mixture::norm(1.0, 0.5),
            Mixture::norm(2.0, 0.5),
        ],
        Dgp::Dgp5 => [
            Mixture::gamma(10.0, 10.0),
            Mixture::gamma(10.0, 10.0),
            Mixture::gamma(10.0, 10.0),
            Mixture::two(0.0, 2.0, 0.5, 0.5),
        ],
    }
}

/// Analytic per-patient means of a generator (the outlier patient of `dgp1`
/// is handled separately in tests).
pub fn dgp_population_means(dgp: Dgp) -> [f64; 4] {
    let m = dgp_mixtures(dgp);
    [m[0].mean(), m[1].mean(), m[2].mean(), m[3].mean()]
}

/// Draws a single-response dataset from the chosen generator. Population
/// labels are `"1".."4"`; `dgp1` plants one outlier as the last patient of
/// population 1.
pub fn simulate(dgp: Dgp, sizes: &[usize], seed: u64) -> Result<Dataset, DataError> {
    if sizes.len() != 4 || sizes.iter().any(|&n| n == 0) {
        return Err(DataError::Invalid(
            "simulation requires four non-empty populations".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mixtures = dgp_mixtures(dgp);
    let outlier = Mixture::norm(4.0, 0.5);
    let mut values = vec![Vec::with_capacity(4)];
    let mut patient_ids = Vec::with_capacity(4);
    let mut counter = 0usize;
    for (j, &nj) in sizes.iter().enumerate() {
        let mut col = Vec::with_capacity(nj);
        let mut ids = Vec::with_capacity(nj);
        for i in 0..nj {
            let mix = if dgp == Dgp::Dgp1 && j == 0 && i == nj - 1 {
                &outlier
            } else {
                &mixtures[j]
            };
            col.push(mix.sample(&mut rng));
            counter += 1;
            ids.push(format!("p{counter:04}"));
        }
        values[0].push(col);
        patient_ids.push(ids);
    }
    Ok(Dataset {
        population_labels: (1..=4).map(|j| j.to_string()).collect(),
        response_labels: vec!["y".into()],
        sizes: sizes.to_vec(),
        patient_ids,
        values,
        standardization: None,
    })
}
