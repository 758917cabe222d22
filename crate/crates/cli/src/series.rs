//! Two-column time-series CSV input.

use std::path::Path;

use chrono::{Datelike, NaiveDate};

use crate::error::{CliError, CliResult};

/// Smallest series accepted by `fit` and `compare`.
pub const MIN_LENGTH: usize = 10;

/// Spacing of the time column.
#[derive(Debug, Clone, PartialEq)]
pub enum Spacing {
    Numeric(f64),
    Days(i64),
    Months(i32),
}

impl Spacing {
    pub fn describe(&self) -> String {
        match self {
            Spacing::Numeric(s) => format!("{s}"),
            Spacing::Days(1) => "1 day".into(),
            Spacing::Days(d) => format!("{d} days"),
            Spacing::Months(1) => "1 month".into(),
            Spacing::Months(m) => format!("{m} months"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesFile {
    pub values: Vec<f64>,
    pub spacing: Spacing,
    /// First and last entries of the time column as written.
    pub span: (String, String),
}

#[derive(Clone, Copy)]
enum Stamp {
    Number(f64),
    Date(NaiveDate),
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d"))
        .ok()
}

fn month_index(d: NaiveDate) -> i32 {
    d.year() * 12 + d.month0() as i32
}

/// Location of data row `i` (0-based) for messages; line 1 is the header.
fn at(path: &Path, i: usize) -> String {
    format!("{}: row {} (line {})", path.display(), i + 1, i + 2)
}

impl TimeSeriesFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(path, &text)
    }

    /// Parses CSV text; `path` is only used in messages.
    pub fn parse(path: &Path, text: &str) -> CliResult<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?
            .clone();
        if header.len() != 2 {
            return Err(CliError::validation_hint(
                format!("{}: header has {} columns, expected 2", path.display(), header.len()),
                "the file needs a header line such as `time,value`",
            ));
        }
        if header.get(1).is_some_and(|h| h.parse::<f64>().is_ok()) {
            return Err(CliError::validation_hint(
                format!("{}: line 1 looks like data, a header is required", path.display()),
                "add a header line such as `time,value`",
            ));
        }

        let mut stamps = Vec::new();
        let mut values = Vec::new();
        let mut raw_times = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::validation(format!("{}: {e}", at(path, i))))?;
            let (t, v) = (record.get(0).unwrap_or(""), record.get(1).unwrap_or(""));
            if v.is_empty() {
                return Err(CliError::validation(format!("{}: missing value", at(path, i))));
            }
            let value: f64 = v
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| CliError::validation(format!("{}: value `{v}` is not a finite number", at(path, i))))?;
            let stamp = match (t.parse::<f64>(), stamps.first()) {
                (Ok(x), None | Some(Stamp::Number(_))) if x.is_finite() => Stamp::Number(x),
                _ => match (parse_date(t), stamps.first()) {
                    (Some(d), None | Some(Stamp::Date(_))) => Stamp::Date(d),
                    _ => {
                        return Err(CliError::validation(format!(
                            "{}: time `{t}` is not {}",
                            at(path, i),
                            match stamps.first() {
                                Some(Stamp::Date(_)) => "an ISO date like the rows above",
                                Some(Stamp::Number(_)) => "a number like the rows above",
                                None => "a number or an ISO date (YYYY-MM-DD or YYYY-MM)",
                            }
                        )))
                    }
                },
            };
            stamps.push(stamp);
            values.push(value);
            raw_times.push(t.to_string());
        }
        if stamps.len() < 2 {
            return Err(CliError::validation(format!(
                "{}: need at least 2 rows, found {}",
                path.display(),
                stamps.len()
            )));
        }
        let spacing = check_spacing(path, &stamps)?;
        Ok(Self {
            values,
            spacing,
            span: (raw_times[0].clone(), raw_times[raw_times.len() - 1].clone()),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn require_length(&self, path: &Path) -> CliResult<()> {
        if self.len() < MIN_LENGTH {
            return Err(CliError::validation(format!(
                "{}: series has {} rows, at least {MIN_LENGTH} are required",
                path.display(),
                self.len()
            )));
        }
        Ok(())
    }
}

fn check_spacing(path: &Path, stamps: &[Stamp]) -> CliResult<Spacing> {
    let irregular = |i: usize, expected: String| {
        CliError::validation_hint(
            format!("{}: time breaks the uniform spacing of {expected}", at(path, i)),
            "the time column must be strictly increasing and equally spaced with no gaps",
        )
    };
    match stamps[0] {
        Stamp::Number(_) => {
            let t: Vec<f64> = stamps
                .iter()
                .map(|s| match s {
                    Stamp::Number(x) => *x,
                    Stamp::Date(_) => unreachable!(),
                })
                .collect();
            let step = t[1] - t[0];
            if !(step > 0.0) {
                return Err(irregular(1, "a positive step".into()));
            }
            for i in 1..t.len() {
                if ((t[i] - t[i - 1]) - step).abs() > 1e-9 * step {
                    return Err(irregular(i, format!("{step}")));
                }
            }
            Ok(Spacing::Numeric(step))
        }
        Stamp::Date(_) => {
            let d: Vec<NaiveDate> = stamps
                .iter()
                .map(|s| match s {
                    Stamp::Date(x) => *x,
                    Stamp::Number(_) => unreachable!(),
                })
                .collect();
            let days = (d[1] - d[0]).num_days();
            if days > 0 && d.windows(2).all(|w| (w[1] - w[0]).num_days() == days) {
                return Ok(Spacing::Days(days));
            }
            // Calendar months have unequal lengths, so monthly data is
            // checked on the month index with a fixed day of month.
            let months = month_index(d[1]) - month_index(d[0]);
            let same_day = d[1].day() == d[0].day();
            if months > 0 && same_day {
                for i in 1..d.len() {
                    if month_index(d[i]) - month_index(d[i - 1]) != months || d[i].day() != d[0].day() {
                        return Err(irregular(i, Spacing::Months(months).describe()));
                    }
                }
                return Ok(Spacing::Months(months));
            }
            if days <= 0 {
                return Err(irregular(1, "a positive step".into()));
            }
            let bad = (1..d.len()).find(|&i| (d[i] - d[i - 1]).num_days() != days).unwrap_or(1);
            Err(irregular(bad, Spacing::Days(days).describe()))
        }
    }
}

/// Values minus their mean.
pub fn centered(values: &[f64]) -> Vec<f64> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| v - mean).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<TimeSeriesFile> {
        TimeSeriesFile::parse(Path::new("s.csv"), text)
    }

    #[test]
    fn numeric_and_dates() {
        let s = parse("year,temp\n1950,0.1\n1951,0.2\n1952,-0.3\n").unwrap();
        assert_eq!(s.values, vec![0.1, 0.2, -0.3]);
        assert_eq!(s.spacing, Spacing::Numeric(1.0));
        let s = parse("date,v\n2000-01-15,1\n2000-04-15,2\n2000-07-15,3\n2000-10-15,4\n2001-01-15,5\n").unwrap();
        assert_eq!(s.spacing, Spacing::Months(3));
        let s = parse("date,v\n2000-02,1\n2000-03,2\n2000-04,3\n").unwrap();
        assert_eq!(s.spacing, Spacing::Months(1));
        let s = parse("date,v\n2000-02-27,1\n2000-02-28,2\n2000-02-29,3\n2000-03-01,4\n").unwrap();
        assert_eq!(s.spacing, Spacing::Days(1));
    }

    #[test]
    fn fractional_steps_within_tolerance() {
        let mut text = String::from("t,v\n");
        for i in 0..40 {
            text.push_str(&format!("{},{}\n", 1950.0 + i as f64 * 0.25, i));
        }
        assert_eq!(parse(&text).unwrap().spacing, Spacing::Numeric(0.25));
    }

    #[test]
    fn irregular_spacing_names_row() {
        let err = parse("t,v\n1,0\n2,0\n3,0\n5,0\n6,0\n").unwrap_err();
        assert!(err.to_string().contains("row 4 (line 5)"), "{err}");
        let err = parse("t,v\n2000-01-01,0\n2000-02-01,0\n2000-04-01,0\n").unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
        let err = parse("t,v\n3,0\n2,0\n").unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn missing_and_malformed_rows() {
        assert!(parse("t,v\n1,0\n2,\n3,1\n").unwrap_err().to_string().contains("row 2"));
        assert!(parse("t,v\n1,0\n2,NA\n").unwrap_err().to_string().contains("row 2"));
        assert!(parse("t,v\n1,0\n2000-01-01,1\n").unwrap_err().to_string().contains("row 2"));
        assert!(parse("1,0\n2,1\n3,2\n").unwrap_err().to_string().contains("header"));
        assert!(parse("t,v,w\n1,0,0\n").is_err());
    }

    #[test]
    fn centering() {
        let c = centered(&[1.0, 2.0, 6.0]);
        assert!((c.iter().sum::<f64>()).abs() < 1e-15);
        assert_eq!(c[0], -2.0);
    }
}
