//! CSV serialization of loops.
//!
//! The first line is a comment recording the space, `# n=<n>,m=<m>,period=<T>`,
//! followed by a header `k,a1,…,a2n` and one row per mode.

use std::path::Path;

use crate::error::{Error, Result};

use super::FourierLoop;

impl FourierLoop {
    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = format!("# n={},m={},period={}\n", self.half_dim(), self.m(), self.period());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["k".to_string()];
        header.extend((1..=2 * self.half_dim()).map(|i| format!("a{i}")));
        w.write_record(&header)?;
        for (k, a) in self.modes() {
            let mut row = vec![k.to_string()];
            row.extend(a.iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
        Ok(out)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let meta = first.trim().strip_prefix('#').ok_or(Error::Parse {
            line: 1,
            message: "missing `# n=…,m=…,period=…` line".into(),
        })?;
        let (mut n, mut m, mut period) = (None, None, None);
        for field in meta.split(',') {
            let (key, value) = field.trim().split_once('=').ok_or(Error::Parse {
                line: 1,
                message: format!("malformed field `{field}`"),
            })?;
            let bad = || Error::Parse {
                line: 1,
                message: format!("cannot parse `{key}` from `{value}`"),
            };
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
                "m" => m = Some(value.parse::<usize>().map_err(|_| bad())?),
                "period" => period = Some(value.parse::<f64>().map_err(|_| bad())?),
                _ => {}
            }
        }
        let (n, m, period) = match (n, m, period) {
            (Some(n), Some(m), Some(p)) => (n, m, p),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: "header must give n, m and period".into(),
                })
            }
        };
        let mut z = FourierLoop::from_coeffs(n, m, period, vec![0.0; 2 * n * (2 * m + 1)])?;
        let mut reader = csv::Reader::from_reader(rest.as_bytes());
        for (idx, record) in reader.records().enumerate() {
            let line = idx + 3;
            let record = record?;
            let nums: Vec<f64> = record
                .iter()
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line,
                        message: format!("cannot parse number `{s}`"),
                    })
                })
                .collect::<Result<_>>()?;
            if nums.len() != 1 + 2 * n {
                return Err(Error::Parse {
                    line,
                    message: format!("row has {} fields, expected {}", nums.len(), 1 + 2 * n),
                });
            }
            let k = nums[0] as i64;
            if k.unsigned_abs() as usize > m || nums[0].fract() != 0.0 {
                return Err(Error::Parse {
                    line,
                    message: format!("mode {} outside |k| ≤ {m}", nums[0]),
                });
            }
            z.coeff_mut(k).copy_from_slice(&nums[1..]);
        }
        Ok(z)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let z = FourierLoop::from_modes(
            1,
            2,
            std::f64::consts::TAU,
            &[(-2, vec![0.1, 1e-17]), (1, vec![-3.25, 0.3333333333333333])],
        )
        .unwrap();
        let text = z.to_csv_string().unwrap();
        assert!(text.starts_with("# n=1,m=2,period="));
        assert_eq!(FourierLoop::parse_csv(&text).unwrap(), z);
    }

    #[test]
    fn bad_rows_are_located() {
        let text = "# n=1,m=1,period=1\nk,a1,a2\n0,1,2\n5,1,1\n";
        match FourierLoop::parse_csv(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
