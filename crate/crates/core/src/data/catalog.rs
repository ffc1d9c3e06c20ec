use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, Matrix, Provenance};
use crate::canon::mix64;

/// The embedded benchmark catalog.
pub const CATALOG_TOML: &str = include_str!("catalog.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    Uniform,
    Grid,
}

/// Sampling design for one partition. Uniform ranges are `[lo, hi]`, grid
/// ranges are `[lo, hi, step]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub design: DesignKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    pub ranges: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub id: String,
    pub name: String,
    pub formula: String,
    pub variables: Vec<String>,
    pub in_search_space: bool,
    pub source: String,
    pub train: Design,
    pub test: Design,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    #[serde(rename = "benchmark")]
    pub benchmarks: Vec<Benchmark>,
}

impl Catalog {
    pub fn get(&self, id: &str) -> Option<&Benchmark> {
        self.benchmarks.iter().find(|b| b.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.benchmarks.iter().map(|b| b.id.as_str())
    }
}

/// Parsed, validated catalog. Panics only if the embedded file is broken,
/// which the unit tests rule out.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let c: Catalog = toml::from_str(CATALOG_TOML).expect("embedded catalog parses");
        for b in &c.benchmarks {
            if let Err(e) = validate(b) {
                panic!("embedded catalog: {e}");
            }
        }
        c
    })
}

fn validate(b: &Benchmark) -> Result<(), DataError> {
    let bad = |msg: String| Err(DataError::Catalog(format!("{}: {msg}", b.id)));
    if formula(&b.id).is_none() {
        return bad("no formula implementation".into());
    }
    for (what, d) in [("train", &b.train), ("test", &b.test)] {
        if d.ranges.len() != b.variables.len() {
            return bad(format!(
                "{what} has {} ranges for {} variables",
                d.ranges.len(),
                b.variables.len()
            ));
        }
        let width = match d.design {
            DesignKind::Uniform => 2,
            DesignKind::Grid => 3,
        };
        for r in &d.ranges {
            if r.len() != width || r[0] > r[1] || (width == 3 && r[2] <= 0.0) {
                return bad(format!("{what} range {r:?} is malformed"));
            }
        }
        if d.design == DesignKind::Uniform && d.rows.unwrap_or(0) == 0 {
            return bad(format!("{what} uniform design needs rows"));
        }
    }
    Ok(())
}

/// Generates the train/test partitions of a catalog benchmark. The same
/// `(id, seed)` always yields identical data.
pub fn generate(id: &str, seed: u64) -> Result<Dataset, DataError> {
    let cat = catalog();
    let b = cat.get(id).ok_or_else(|| DataError::UnknownBenchmark(id.to_string()))?;
    let f = formula(id).ok_or_else(|| DataError::UnknownBenchmark(id.to_string()))?;
    let seed_train = mix64(seed ^ 0x7472_6169_6e00_0000);
    let seed_test = mix64(seed ^ 0x7465_7374_0000_0000);
    let (train, ytrain) = sample(&b.train, seed_train, f);
    let (test, ytest) = sample(&b.test, seed_test, f);
    Dataset::new(
        b.variables.clone(),
        train,
        ytrain,
        test,
        ytest,
        Provenance::Benchmark {
            id: id.to_string(),
            seed,
            catalog_version: cat.version,
        },
    )
}

fn sample(d: &Design, seed: u64, f: fn(&[f64]) -> f64) -> (Matrix, Vec<f64>) {
    let rows: Vec<Vec<f64>> = match d.design {
        DesignKind::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..d.rows.unwrap_or(0))
                .map(|_| d.ranges.iter().map(|r| rng.gen_range(r[0]..=r[1])).collect())
                .collect()
        }
        DesignKind::Grid => {
            let axes: Vec<Vec<f64>> = d.ranges.iter().map(|r| grid_axis(r[0], r[1], r[2])).collect();
            let mut rows = vec![Vec::new()];
            for axis in &axes {
                rows = rows
                    .into_iter()
                    .flat_map(|prefix| {
                        axis.iter().map(move |&v| {
                            let mut row = prefix.clone();
                            row.push(v);
                            row
                        })
                    })
                    .collect();
            }
            rows
        }
    };
    let y = rows.iter().map(|r| f(r)).collect();
    (Matrix::from_rows(&rows, d.ranges.len()), y)
}

pub(crate) fn grid_axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

fn formula(id: &str) -> Option<fn(&[f64]) -> f64> {
    let f: fn(&[f64]) -> f64 = match id {
        "keijzer-1" | "keijzer-2" | "keijzer-3" => |v| 0.3 * v[0] * (2.0 * PI * v[0]).sin(),
        "keijzer-4" | "vladislavleva-2" => |v| salustowicz(v[0]),
        "keijzer-5" => |v| 30.0 * v[0] * v[2] / ((v[0] - 10.0) * v[1] * v[1]),
        "keijzer-6" => |v| (1..=v[0].floor() as u64).map(|i| 1.0 / i as f64).sum(),
        "keijzer-7" => |v| v[0].ln(),
        "keijzer-8" | "nguyen-8" => |v| v[0].sqrt(),
        "keijzer-9" => |v| v[0].asinh(),
        "keijzer-10" | "nguyen-11" => |v| v[0].powf(v[1]),
        "keijzer-11" => |v| v[0] * v[1] + ((v[0] - 1.0) * (v[1] - 1.0)).sin(),
        "keijzer-12" | "nguyen-12" => |v| v[0].powi(4) - v[0].powi(3) + v[1] * v[1] / 2.0 - v[1],
        "keijzer-13" | "vladislavleva-6" => |v| 6.0 * v[0].sin() * v[1].cos(),
        "keijzer-14" => |v| 8.0 / (2.0 + v[0] * v[0] + v[1] * v[1]),
        "keijzer-15" => |v| v[0].powi(3) / 5.0 + v[1].powi(3) / 2.0 - v[1] - v[0],
        "nguyen-1" => |v| poly(v[0], 3),
        "nguyen-2" => |v| poly(v[0], 4),
        "nguyen-3" => |v| poly(v[0], 5),
        "nguyen-4" => |v| poly(v[0], 6),
        "nguyen-5" => |v| (v[0] * v[0]).sin() * v[0].cos() - 1.0,
        "nguyen-6" => |v| v[0].sin() + (v[0] + v[0] * v[0]).sin(),
        "nguyen-7" => |v| (v[0] + 1.0).ln() + (v[0] * v[0] + 1.0).ln(),
        "nguyen-9" => |v| v[0].sin() + (v[1] * v[1]).sin(),
        "nguyen-10" => |v| 2.0 * v[0].sin() * v[1].cos(),
        "vladislavleva-1" => |v| (-(v[0] - 1.0).powi(2)).exp() / (1.2 + (v[1] - 2.5).powi(2)),
        "vladislavleva-3" => |v| salustowicz(v[0]) * (v[1] - 5.0),
        "vladislavleva-4" => |v| 10.0 / (5.0 + v.iter().map(|x| (x - 3.0).powi(2)).sum::<f64>()),
        "vladislavleva-5" => |v| 30.0 * (v[0] - 1.0) * (v[2] - 1.0) / (v[1] * v[1] * (v[0] - 10.0)),
        "vladislavleva-7" => |v| (v[0] - 3.0) * (v[1] - 3.0) + 2.0 * ((v[0] - 4.0) * (v[1] - 4.0)).sin(),
        "vladislavleva-8" => {
            |v| ((v[0] - 3.0).powi(4) + (v[1] - 3.0).powi(3) - (v[1] - 3.0)) / ((v[1] - 2.0).powi(4) + 10.0)
        }
        "poly-10" => |v| v[0] * v[1] + v[2] * v[3] + v[4] * v[5] + v[0] * v[6] * v[8] + v[2] * v[5] * v[9],
        "pagie-1" => |v| 1.0 / (1.0 + v[0].powi(-4)) + 1.0 / (1.0 + v[1].powi(-4)),
        "aircraft-lift" => |v| v[0] * (v[1] - v[2]) + v[3] * v[4] * v[5] / v[6],
        "fluid-flow" => |v| {
            let (vinf, r, theta, big_r, gamma) = (v[0], v[1], v[2], v[3], v[4]);
            vinf * r * theta.sin() * (1.0 - big_r * big_r / (r * r)) + gamma / (2.0 * PI) * (r / big_r).ln()
        },
        "rocket-fuel-flow" => |v| {
            let (gamma, r) = (1.4_f64, 287.0_f64);
            let k = (gamma / r * (2.0 / (gamma + 1.0)).powf((gamma + 1.0) / (gamma - 1.0))).sqrt();
            v[0] * v[1] / v[2].sqrt() * k
        },
        _ => return None,
    };
    Some(f)
}

fn poly(x: f64, degree: i32) -> f64 {
    (1..=degree).map(|k| x.powi(k)).sum()
}

fn salustowicz(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    (-x).exp() * x.powi(3) * c * s * (c * s * s - 1.0)
}
