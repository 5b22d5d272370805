use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Radio {
    Gsm,
    Umts,
    Cdma,
    Lte,
    Nr,
}

impl FromStr for Radio {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_uppercase().as_str() {
            "GSM" => Ok(Radio::Gsm),
            "UMTS" => Ok(Radio::Umts),
            "CDMA" => Ok(Radio::Cdma),
            "LTE" => Ok(Radio::Lte),
            "NR" => Ok(Radio::Nr),
            _ => Err(()),
        }
    }
}

/// One row of an OpenCellID export:
/// `radio,mcc,net,area,cell,unit,lon,lat,range,samples,changeable,created,updated,averageSignal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerRecord {
    pub radio: Radio,
    pub mcc: String,
    pub net: String,
    pub area: String,
    pub cell: String,
    pub lon: f64,
    pub lat: f64,
    /// Estimated coverage range in meters, when the export has one.
    pub range: Option<f64>,
}

impl TowerRecord {
    pub fn id(&self) -> String {
        format!("{}-{}-{}-{}", self.mcc, self.net, self.area, self.cell)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerSet {
    pub records: Vec<TowerRecord>,
    /// Rows dropped as malformed or out of range.
    pub skipped: usize,
    /// Well-formed rows whose radio type was not requested.
    pub filtered: usize,
}

pub fn parse_towers(path: impl AsRef<Path>, radios: &[Radio]) -> Result<TowerSet, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    parse_towers_from_reader(file, radios)
}

/// Parses tower rows; an empty `radios` slice keeps every radio type. A
/// header row, if present, is recognised and skipped.
pub fn parse_towers_from_reader(reader: impl Read, radios: &[Radio]) -> Result<TowerSet, IngestError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut records = Vec::new();
    let mut skipped = 0;
    let mut filtered = 0;
    for (line, row) in csv.records().enumerate() {
        let row = match row {
            Ok(row) => row,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        if line == 0 && row.get(0).is_some_and(|f| f.eq_ignore_ascii_case("radio")) {
            continue;
        }
        match parse_row(&row) {
            Some(rec) if radios.is_empty() || radios.contains(&rec.radio) => records.push(rec),
            Some(_) => filtered += 1,
            None => skipped += 1,
        }
    }
    if records.is_empty() {
        return Err(IngestError::NoRecords { skipped });
    }
    Ok(TowerSet { records, skipped, filtered })
}

fn parse_row(row: &csv::StringRecord) -> Option<TowerRecord> {
    if row.len() < 8 {
        return None;
    }
    let radio = row.get(0)?.parse().ok()?;
    let lon: f64 = row.get(6)?.parse().ok()?;
    let lat: f64 = row.get(7)?.parse().ok()?;
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return None;
    }
    let range = row.get(8).and_then(|s| s.parse::<f64>().ok()).filter(|r| *r > 0.0 && r.is_finite());
    Some(TowerRecord {
        radio,
        mcc: row.get(1)?.to_string(),
        net: row.get(2)?.to_string(),
        area: row.get(3)?.to_string(),
        cell: row.get(4)?.to_string(),
        lon,
        lat,
        range,
    })
}
