//! Time-indexed output channels and their CSV rendering.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    channels: Vec<(String, Vec<f64>)>,
}

/// Inclusive linear grid of `count >= 2` points.
pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::parameter(format!("a time grid needs at least 2 points, got {count}")));
    }
    if !(start.is_finite() && stop.is_finite() && stop > start) {
        return Err(Error::parameter(format!("time grid needs start < stop, got {start}..{stop}")));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|k| if k + 1 == count { stop } else { start + step * k as f64 }).collect())
}

/// Shortest exact decimal representation with 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

impl TimeSeries {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::parameter("series times must be strictly increasing"));
        }
        Ok(Self { times, channels: Vec::new() })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn add_channel(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.times.len() {
            return Err(Error::Dimension { expected: self.times.len(), found: values.len() });
        }
        if self.channel(&name).is_some() || name == "time" {
            return Err(Error::parameter(format!("duplicate channel name {name:?}")));
        }
        self.channels.push((name, values));
        Ok(())
    }

    /// Adds `<name>_re` and `<name>_im`.
    pub fn add_complex_channel(&mut self, name: &str, values: &[Complex64]) -> Result<()> {
        self.add_channel(format!("{name}_re"), values.iter().map(|z| z.re).collect())?;
        self.add_channel(format!("{name}_im"), values.iter().map(|z| z.im).collect())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    /// Metadata lines (each prefixed with `# `), one header row, then data.
    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[String]) -> io::Result<()> {
        for line in metadata {
            writeln!(w, "# {line}")?;
        }
        let mut header = vec!["time"];
        header.extend(self.channel_names());
        writeln!(w, "{}", header.join(","))?;
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![format_number(*t)];
            row.extend(self.channels.iter().map(|(_, v)| format_number(v[k])));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}
