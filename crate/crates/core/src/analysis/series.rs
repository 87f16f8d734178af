use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// First line of a norm-series CSV file.
pub const SERIES_SCHEMA: &str = "# schema: chemodecay/norm-series/v1";

/// Run parameters needed to interpret a series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMeta {
    pub dim: usize,
    pub points_per_dim: usize,
    pub box_length: f64,
    pub epsilon: f64,
    pub u_bar: f64,
    pub k_max: u32,
    pub split_r: f64,
    pub t_final: f64,
    pub linear_only: bool,
}

/// One recorded time.
///
/// `n[k]`, `v[k]` are `||∇^k n||`, `||∇^k v||` over the nonzero modes,
/// i.e. of the deviation from the box mean (`k = 0..=k_max`). `n_inf` is
/// `sup |n - mean n|`. `log_c_inf` is `ln ||c||_inf` or NaN when `c` was
/// not reconstructed. `energy[k]` is
/// `n_k^2 + n_{k+1}^2 + u_bar (v_k^2 + v_{k+1}^2)` for `k < k_max`.
/// `split_low + split_high` is the full `||(n, v)||^2` including the mean.
#[derive(Clone, Debug, PartialEq)]
pub struct NormRow {
    pub t: f64,
    pub n: Vec<f64>,
    pub v: Vec<f64>,
    pub n_inf: f64,
    pub log_c_inf: f64,
    pub mass_n: f64,
    pub mass_v: Vec<f64>,
    pub energy: Vec<f64>,
    pub split_low: f64,
    pub split_high: f64,
    pub curl_v: f64,
}

impl NormRow {
    /// `(||∇^k n||^2 + ||∇^k v||^2)^(1/2)`.
    pub fn joint(&self, k: usize) -> f64 {
        self.n[k].hypot(self.v[k])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormSeries {
    pub meta: SeriesMeta,
    pub rows: Vec<NormRow>,
}

impl NormSeries {
    pub fn new(meta: SeriesMeta) -> Self {
        NormSeries {
            meta,
            rows: Vec::new(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn has_c(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.log_c_inf.is_finite())
    }

    /// `M_n(0) != 0` or some `M_v(0) != 0`, judged against the size of the data.
    pub fn has_mass(&self) -> bool {
        let Some(r) = self.rows.first() else {
            return false;
        };
        let scale = r.n[0].max(r.v[0]) * self.meta.box_length.powi(self.meta.dim as i32).sqrt();
        let m = r
            .mass_n
            .abs()
            .max(r.mass_v.iter().fold(0.0, |a, b| a.max(b.abs())));
        m > 1e-8 * scale.max(f64::MIN_POSITIVE)
    }

    pub fn header(&self) -> Vec<String> {
        let k = self.meta.k_max as usize;
        let mut h = vec!["t".to_string()];
        for i in 0..=k {
            h.push(format!("n_{i}"));
            h.push(format!("v_{i}"));
        }
        h.push("n_inf".into());
        h.push("log_c_inf".into());
        h.push("mass_n".into());
        for a in 0..self.meta.dim {
            h.push(format!("mass_v{}", a + 1));
        }
        for i in 0..k {
            h.push(format!("E_{i}"));
        }
        h.extend(["split_low", "split_high", "curl_v"].map(String::from));
        h
    }

    fn meta_line(&self) -> String {
        let m = &self.meta;
        format!(
            "# dim={} n={} length={:?} epsilon={:?} u_bar={:?} k_max={} split_r={:?} t_final={:?} linear_only={}",
            m.dim, m.points_per_dim, m.box_length, m.epsilon, m.u_bar, m.k_max, m.split_r, m.t_final, m.linear_only
        )
    }

    /// CSV with the schema line, a `# key=value` metadata line, the header
    /// and one row per time. Floats use the shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{SERIES_SCHEMA}")?;
        writeln!(w, "{}", self.meta_line())?;
        writeln!(w, "{}", self.header().join(","))?;
        for r in &self.rows {
            let mut cells = vec![r.t];
            for (a, b) in r.n.iter().zip(&r.v) {
                cells.push(*a);
                cells.push(*b);
            }
            cells.extend([r.n_inf, r.log_c_inf, r.mass_n]);
            cells.extend(&r.mass_v);
            cells.extend(&r.energy);
            cells.extend([r.split_low, r.split_high, r.curl_v]);
            let line: Vec<String> = cells.iter().map(|x| format!("{x:?}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<u64> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        std::fs::write(path, &buf).map_err(|e| Error::io(path, e))?;
        Ok(buf.len() as u64)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file), path)
    }

    pub fn read_csv<R: BufRead>(r: R, origin: &Path) -> Result<Self> {
        let err = |line: usize, detail: String| Error::Parse {
            path: origin.to_path_buf(),
            detail: format!("line {line}: {detail}"),
        };
        let mut lines = r.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i + 1, l)),
                Some((i, Err(e))) => Err(err(i + 1, e.to_string())),
                None => Err(err(0, format!("missing {what}"))),
            }
        };
        let (_, schema) = next("schema line")?;
        if schema.trim() != SERIES_SCHEMA {
            return Err(err(
                1,
                format!("expected `{SERIES_SCHEMA}`, found `{schema}`"),
            ));
        }
        let (ln, meta_line) = next("metadata line")?;
        let meta = parse_meta(&meta_line).map_err(|d| err(ln, d))?;
        let mut series = NormSeries::new(meta);
        let (ln, header) = next("header")?;
        let expected = series.header();
        let found: Vec<&str> = header.split(',').map(str::trim).collect();
        if found != expected {
            return Err(err(
                ln,
                format!("header does not match k_max/dim: `{header}`"),
            ));
        }
        let k = series.meta.k_max as usize;
        let dim = series.meta.dim;
        while let Ok((ln, line)) = next("row") {
            if line.trim().is_empty() {
                continue;
            }
            let cells = line
                .split(',')
                .enumerate()
                .map(|(c, s)| {
                    s.trim().parse::<f64>().map_err(|e| {
                        err(
                            ln,
                            format!(
                                "column {} (`{}`): {e}",
                                c + 1,
                                expected.get(c).map_or("?", |s| s)
                            ),
                        )
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if cells.len() != expected.len() {
                return Err(err(
                    ln,
                    format!("{} columns, expected {}", cells.len(), expected.len()),
                ));
            }
            let mut it = cells.into_iter();
            let mut take = |n: usize| -> Vec<f64> { it.by_ref().take(n).collect() };
            let t = take(1)[0];
            let nv = take(2 * (k + 1));
            let scalars = take(3);
            let mass_v = take(dim);
            let energy = take(k);
            let tail = take(3);
            series.rows.push(NormRow {
                t,
                n: nv.iter().step_by(2).copied().collect(),
                v: nv.iter().skip(1).step_by(2).copied().collect(),
                n_inf: scalars[0],
                log_c_inf: scalars[1],
                mass_n: scalars[2],
                mass_v,
                energy,
                split_low: tail[0],
                split_high: tail[1],
                curl_v: tail[2],
            });
        }
        if series.rows.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(err(0, "times are not strictly increasing".into()));
        }
        Ok(series)
    }
}

fn parse_meta(line: &str) -> std::result::Result<SeriesMeta, String> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| "metadata line must start with `#`".to_string())?;
    let map: BTreeMap<&str, &str> = body
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect();
    fn get<T: std::str::FromStr>(
        map: &BTreeMap<&str, &str>,
        key: &str,
    ) -> std::result::Result<T, String> {
        map.get(key)
            .ok_or_else(|| format!("missing `{key}`"))?
            .parse()
            .map_err(|_| format!("bad value for `{key}`"))
    }
    Ok(SeriesMeta {
        dim: get(&map, "dim")?,
        points_per_dim: get(&map, "n")?,
        box_length: get(&map, "length")?,
        epsilon: get(&map, "epsilon")?,
        u_bar: get(&map, "u_bar")?,
        k_max: get(&map, "k_max")?,
        split_r: get(&map, "split_r")?,
        t_final: get(&map, "t_final")?,
        linear_only: get(&map, "linear_only")?,
    })
}
