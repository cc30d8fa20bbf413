//! Price ingestion: CSV loading in wide or long layout and calendar alignment
//! of several series onto a common set of dates.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// A single asset's price history.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    label: String,
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series from observations already sorted by date.
    pub fn new(label: impl Into<String>, dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if dates.len() != prices.len() {
            return Err(Error::DimensionMismatch {
                expected: dates.len(),
                found: prices.len(),
            });
        }
        if dates.is_empty() {
            return Err(Error::Empty(format!("series '{label}' has no observations")));
        }
        for w in dates.windows(2) {
            if w[1] == w[0] {
                return Err(Error::DuplicateDate {
                    asset: label,
                    date: w[0].to_string(),
                });
            }
            if w[1] < w[0] {
                return Err(Error::Invalid(format!(
                    "series '{label}' dates are not increasing at {}",
                    w[1]
                )));
            }
        }
        if let Some((d, &p)) = dates.iter().zip(&prices).find(|(_, p)| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::NonPositivePrice {
                line: 0,
                asset: label,
                date: d.to_string(),
                price: p,
            });
        }
        Ok(PriceSeries { label, dates, prices })
    }

    /// Builds a series from observations in any order; duplicate dates are an error.
    pub fn from_unsorted(label: impl Into<String>, mut obs: Vec<(NaiveDate, f64)>) -> Result<Self> {
        obs.sort_by_key(|&(d, _)| d);
        let (dates, prices) = obs.into_iter().unzip();
        PriceSeries::new(label, dates, prices)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    fn price_on(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.prices[i])
    }

    /// Keeps observations inside the inclusive `[from, to]` window.
    pub fn restrict(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> PriceSeries {
        let keep = |d: &NaiveDate| from.is_none_or(|f| *d >= f) && to.is_none_or(|t| *d <= t);
        let (dates, prices) = self
            .dates
            .iter()
            .zip(&self.prices)
            .filter(|(d, _)| keep(d))
            .map(|(d, p)| (*d, *p))
            .unzip();
        PriceSeries {
            label: self.label.clone(),
            dates,
            prices,
        }
    }
}

/// Prices of N assets on a shared calendar of T+1 dates.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    labels: Vec<String>,
    dates: Vec<NaiveDate>,
    prices: Matrix,
}

impl PricePanel {
    pub fn new(labels: Vec<String>, dates: Vec<NaiveDate>, prices: Matrix) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::Invalid(format!(
                "a panel needs at least 2 assets, found {}",
                labels.len()
            )));
        }
        if dates.len() < 3 {
            return Err(Error::InsufficientOverlap { found: dates.len() });
        }
        if prices.rows() != labels.len() || prices.cols() != dates.len() {
            return Err(Error::Invalid(format!(
                "price matrix is {}x{}, expected {}x{}",
                prices.rows(),
                prices.cols(),
                labels.len(),
                dates.len()
            )));
        }
        if dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("panel dates must be strictly increasing".into()));
        }
        for (i, label) in labels.iter().enumerate() {
            if let Some((t, &p)) = prices.row(i).iter().enumerate().find(|(_, p)| !(**p > 0.0 && p.is_finite())) {
                return Err(Error::NonPositivePrice {
                    line: 0,
                    asset: label.clone(),
                    date: dates[t].to_string(),
                    price: p,
                });
            }
        }
        Ok(PricePanel { labels, dates, prices })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &Matrix {
        &self.prices
    }

    pub fn n_assets(&self) -> usize {
        self.labels.len()
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    /// Splits the panel back into one series per asset.
    pub fn to_series(&self) -> Vec<PriceSeries> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| PriceSeries {
                label: l.clone(),
                dates: self.dates.clone(),
                prices: self.prices.row(i).to_vec(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// `date,LABEL1,LABEL2,...`
    Wide,
    /// `date,label,price`
    Long,
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wide" => Ok(Layout::Wide),
            "long" => Ok(Layout::Long),
            other => Err(Error::Invalid(format!("unknown layout '{other}' (expected wide or long)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum AlignPolicy {
    Intersection,
    ForwardFill { max_gap: usize },
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), DATE_FORMAT).ok()
}

pub fn load_csv(path: impl AsRef<Path>, layout: Layout) -> Result<Vec<PriceSeries>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, layout)
}

/// Parses price series from CSV text. In the wide layout an empty cell means
/// the asset has no observation on that date.
pub fn read_csv<R: Read>(reader: R, layout: Layout) -> Result<Vec<PriceSeries>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Empty("CSV file has no header".into()));
    }

    let mut columns: Vec<(String, Vec<(NaiveDate, f64)>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();

    match layout {
        Layout::Wide => {
            if header.len() < 2 {
                return Err(Error::Parse {
                    line: 1,
                    message: "wide layout needs a date column and at least one asset column".into(),
                });
            }
            for label in header.iter().skip(1) {
                if index.insert(label.to_string(), columns.len()).is_some() {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("duplicate asset column '{label}'"),
                    });
                }
                columns.push((label.to_string(), Vec::new()));
            }
        }
        Layout::Long => {
            if header.len() != 3 {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("long layout needs 3 columns (date,label,price), found {}", header.len()),
                });
            }
        }
    }

    let mut n_records = 0usize;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        n_records += 1;
        let date = parse_date(&record[0]).ok_or_else(|| Error::Parse {
            line,
            message: format!("unparsable date '{}'", &record[0]),
        })?;
        match layout {
            Layout::Wide => {
                for (j, cell) in record.iter().skip(1).enumerate() {
                    if cell.is_empty() {
                        continue;
                    }
                    let price = parse_price(cell, line, &columns[j].0, date)?;
                    columns[j].1.push((date, price));
                }
            }
            Layout::Long => {
                let label = &record[1];
                if label.is_empty() {
                    return Err(Error::Parse {
                        line,
                        message: "empty asset label".into(),
                    });
                }
                let price = parse_price(&record[2], line, label, date)?;
                let j = *index.entry(label.to_string()).or_insert_with(|| {
                    columns.push((label.to_string(), Vec::new()));
                    columns.len() - 1
                });
                columns[j].1.push((date, price));
            }
        }
    }
    if n_records == 0 {
        return Err(Error::Empty("CSV file has no data rows".into()));
    }

    columns
        .into_iter()
        .map(|(label, obs)| PriceSeries::from_unsorted(label, obs))
        .collect()
}

fn parse_price(cell: &str, line: usize, asset: &str, date: NaiveDate) -> Result<f64> {
    let price: f64 = cell.parse().map_err(|_| Error::Parse {
        line,
        message: format!("asset '{asset}': '{cell}' is not a number"),
    })?;
    if !price.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("asset '{asset}': price '{cell}' is not finite"),
        });
    }
    if price <= 0.0 {
        return Err(Error::NonPositivePrice {
            line,
            asset: asset.to_string(),
            date: date.to_string(),
            price,
        });
    }
    Ok(price)
}

/// Places every series on a common calendar.
///
/// `Intersection` keeps the dates every series observed. `ForwardFill`
/// starts from the union of all dates and carries an asset's last price
/// over at most `max_gap` consecutive missing dates; a date that cannot be
/// filled for some asset is dropped for all of them.
pub fn align(series: &[PriceSeries], policy: AlignPolicy) -> Result<PricePanel> {
    if series.len() < 2 {
        return Err(Error::Invalid(format!(
            "alignment needs at least 2 series, found {}",
            series.len()
        )));
    }
    let mut seen = HashSet::new();
    for s in series {
        if !seen.insert(s.label()) {
            return Err(Error::Invalid(format!("duplicate asset label '{}'", s.label())));
        }
    }

    let (dates, rows): (Vec<NaiveDate>, Vec<Vec<f64>>) = match policy {
        AlignPolicy::Intersection => {
            let sets: Vec<HashSet<NaiveDate>> = series[1..]
                .iter()
                .map(|s| s.dates().iter().copied().collect())
                .collect();
            let dates: Vec<NaiveDate> = series[0]
                .dates()
                .iter()
                .copied()
                .filter(|d| sets.iter().all(|set| set.contains(d)))
                .collect();
            let rows = series
                .iter()
                .map(|s| dates.iter().map(|&d| s.price_on(d).expect("date in intersection")).collect())
                .collect();
            (dates, rows)
        }
        AlignPolicy::ForwardFill { max_gap } => {
            let union: Vec<NaiveDate> = series
                .iter()
                .flat_map(|s| s.dates().iter().copied())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let mut valid = vec![true; union.len()];
            let filled: Vec<Vec<f64>> = series
                .iter()
                .map(|s| {
                    let mut row = vec![f64::NAN; union.len()];
                    let mut last: Option<f64> = None;
                    let mut gap = 0usize;
                    let mut k = 0usize;
                    for (t, &d) in union.iter().enumerate() {
                        if k < s.len() && s.dates()[k] == d {
                            last = Some(s.prices()[k]);
                            gap = 0;
                            k += 1;
                            row[t] = s.prices()[k - 1];
                        } else {
                            gap += 1;
                            match last {
                                Some(p) if gap <= max_gap => row[t] = p,
                                _ => valid[t] = false,
                            }
                        }
                    }
                    row
                })
                .collect();
            let dates = union
                .iter()
                .zip(&valid)
                .filter(|(_, &v)| v)
                .map(|(d, _)| *d)
                .collect();
            let rows = filled
                .into_iter()
                .map(|row| row.into_iter().zip(&valid).filter(|(_, &v)| v).map(|(p, _)| p).collect())
                .collect();
            (dates, rows)
        }
    };

    if dates.len() < 3 {
        return Err(Error::InsufficientOverlap { found: dates.len() });
    }
    let labels = series.iter().map(|s| s.label().to_string()).collect();
    PricePanel::new(labels, dates, Matrix::from_rows(&rows)?)
}
