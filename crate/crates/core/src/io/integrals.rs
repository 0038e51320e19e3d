use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{format_complex, parse_complex, ManyBodyTensors, MAX_MODES};
use crate::error::{Error, Result};

/// Spatial integrals closer than this are treated as the same value when
/// one record repeats another's symmetry image.
const IMAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralFormat {
    Fcidump,
    TensorText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcidumpHeader {
    pub norb: usize,
    pub nelec: Option<usize>,
    pub ms2: i64,
}

/// Spin-orbital tensors plus whatever the file said about the system.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrals {
    pub tensors: ManyBodyTensors,
    pub header: Option<FcidumpHeader>,
}

pub fn load_integrals(path: &Path, format: IntegralFormat) -> Result<Integrals> {
    let text = std::fs::read_to_string(path)?;
    match format {
        IntegralFormat::Fcidump => parse_fcidump(&text),
        IntegralFormat::TensorText => Ok(Integrals {
            tensors: parse_tensor_text(&text)?,
            header: None,
        }),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads the `&FCI ... &END` namelist; returns the header and the number of
/// lines it spans.
fn parse_header(lines: &[&str]) -> Result<(FcidumpHeader, usize)> {
    let first = lines.first().map(|l| l.trim_start()).unwrap_or("");
    if !first.to_ascii_uppercase().starts_with("&FCI") {
        return Err(parse_err(1, "expected '&FCI' header"));
    }
    let mut body = String::new();
    let mut end = None;
    for (i, raw) in lines.iter().enumerate() {
        let up = raw.trim().to_ascii_uppercase();
        let stop = up.contains("&END") || up.contains("$END") || up == "/";
        let cleaned = up
            .replace("&FCI", " ")
            .replace("&END", " ")
            .replace("$END", " ");
        if up != "/" {
            body.push_str(&cleaned);
            body.push(',');
        }
        if stop {
            end = Some(i + 1);
            break;
        }
    }
    let end = end.ok_or_else(|| parse_err(lines.len(), "header not terminated by '&END' or '/'"))?;
    let mut values: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    for token in body.split([',', ' ', '\t']).filter(|t| !t.is_empty()) {
        if let Some((k, v)) = token.split_once('=') {
            let key = k.trim().to_string();
            let entry = values.entry(key.clone()).or_default();
            if !v.is_empty() {
                entry.push(v.to_string());
            }
            current = Some(key);
        } else if let Some(k) = &current {
            values.entry(k.clone()).or_default().push(token.to_string());
        } else {
            return Err(parse_err(1, format!("unexpected header token '{token}'")));
        }
    }
    let int = |key: &str| -> Result<Option<i64>> {
        match values.get(key).and_then(|v| v.first()) {
            None => Ok(None),
            Some(s) => s
                .parse::<i64>()
                .map(Some)
                .map_err(|_| parse_err(1, format!("bad {key} value '{s}'"))),
        }
    };
    let norb = int("NORB")?.ok_or_else(|| parse_err(1, "header lacks NORB"))?;
    if norb < 1 || 2 * norb as usize > MAX_MODES {
        return Err(parse_err(1, format!("NORB must be in 1..={}", MAX_MODES / 2)));
    }
    let nelec = int("NELEC")?;
    if nelec.is_some_and(|n| n < 0 || n > 2 * norb) {
        return Err(parse_err(1, "NELEC out of range"));
    }
    Ok((
        FcidumpHeader {
            norb: norb as usize,
            nelec: nelec.map(|n| n as usize),
            ms2: int("MS2")?.unwrap_or(0),
        },
        end,
    ))
}

/// Stores a value at every index in `images`, rejecting a record that
/// contradicts an earlier one.
fn store(
    table: &mut HashMap<Vec<usize>, (f64, usize)>,
    images: &[Vec<usize>],
    value: f64,
    line: usize,
) -> Result<()> {
    for ix in images {
        if let Some(&(old, old_line)) = table.get(ix) {
            if (old - value).abs() > IMAGE_TOL * old.abs().max(1.0) {
                return Err(Error::Validation(format!(
                    "symmetry violation: line {line} gives {value} but line {old_line} gave {old} for the same integral"
                )));
            }
        }
    }
    for ix in images {
        table.insert(ix.clone(), (value, line));
    }
    Ok(())
}

/// FCIDUMP with real orbitals: records `value i j k l` are `(ij|kl)` in
/// chemists' notation, `value i j 0 0` is `h_ij`, `value 0 0 0 0` the core
/// energy and `value i 0 0 0` an orbital energy (ignored). Spin-orbital
/// `2i + σ` holds orbital `i` with spin `σ`.
pub fn parse_fcidump(text: &str) -> Result<Integrals> {
    let lines: Vec<&str> = text.lines().collect();
    let (header, start) = parse_header(&lines)?;
    let n = header.norb;
    let mut one: HashMap<Vec<usize>, (f64, usize)> = HashMap::new();
    let mut two: HashMap<Vec<usize>, (f64, usize)> = HashMap::new();
    let mut core = 0.0;
    for (offset, raw) in lines[start..].iter().enumerate() {
        let line = start + offset + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(line, format!("expected 'value i j k l', got '{trimmed}'")));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| parse_err(line, format!("bad value '{}'", fields[0])))?;
        let mut ix = [0usize; 4];
        for (slot, f) in ix.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| parse_err(line, format!("bad index '{f}'")))?;
            if *slot > n {
                return Err(parse_err(line, format!("index {slot} exceeds NORB = {n}")));
            }
        }
        let [i, j, k, l] = ix;
        match (i, j, k, l) {
            (0, 0, 0, 0) => core += value,
            (_, 0, 0, 0) => {}
            (_, _, 0, 0) if i > 0 && j > 0 => {
                store(&mut one, &[vec![i - 1, j - 1], vec![j - 1, i - 1]], value, line)?;
            }
            _ if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
                let images = [
                    vec![i, j, k, l],
                    vec![j, i, k, l],
                    vec![i, j, l, k],
                    vec![j, i, l, k],
                    vec![k, l, i, j],
                    vec![l, k, i, j],
                    vec![k, l, j, i],
                    vec![l, k, j, i],
                ];
                store(&mut two, &images, value, line)?;
            }
            _ => return Err(parse_err(line, "index pattern is not a valid record")),
        }
    }
    let mut spatial = SpatialIntegrals::zeros(n);
    spatial.core = core;
    for (ix, (v, _)) in &one {
        spatial.h[ix[0] * n + ix[1]] = *v;
    }
    for (ix, (v, _)) in &two {
        let flat = ((ix[0] * n + ix[1]) * n + ix[2]) * n + ix[3];
        spatial.g[flat] = *v;
    }
    Ok(Integrals {
        tensors: spatial.to_tensors()?,
        header: Some(header),
    })
}

/// Real spatial-orbital integrals: `h_ij` and chemists' `(ij|kl)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialIntegrals {
    pub n: usize,
    pub core: f64,
    /// Row-major `n × n`.
    pub h: Vec<f64>,
    /// Row-major `n^4`, `(ij|kl)` at `((i n + j) n + k) n + l`.
    pub g: Vec<f64>,
}

impl SpatialIntegrals {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            core: 0.0,
            h: vec![0.0; n * n],
            g: vec![0.0; n.pow(4)],
        }
    }

    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.n + j]
    }

    pub fn g(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.g[((i * self.n + j) * self.n + k) * self.n + l]
    }

    /// Spin-orbital `2i + σ` holds orbital `i` with spin `σ`;
    /// `v^{PQ}_{RS} = <PQ|RS> - <PQ|SR>` with `<PQ|RS> = (PR|QS)`.
    pub fn to_tensors(&self) -> Result<ManyBodyTensors> {
        let n = self.n;
        let m = 2 * n;
        let mut t = ManyBodyTensors::zeros(m)?;
        t.constant = self.core;
        for i in 0..n {
            for j in 0..n {
                let v = self.h(i, j);
                if v != 0.0 {
                    for s in 0..2 {
                        t.set_h(2 * i + s, 2 * j + s, Complex64::new(v, 0.0))?;
                    }
                }
            }
        }
        let phys = |p: usize, q: usize, r: usize, s: usize| -> f64 {
            if p % 2 != r % 2 || q % 2 != s % 2 {
                0.0
            } else {
                self.g(p / 2, r / 2, q / 2, s / 2)
            }
        };
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        let v = phys(p, q, r, s) - phys(p, q, s, r);
                        if v != 0.0 {
                            t.set_v(p, q, r, s, Complex64::new(v, 0.0))?;
                        }
                    }
                }
            }
        }
        t.validate()?;
        Ok(t)
    }

    /// FCIDUMP text listing each symmetry-unique nonzero integral once.
    pub fn to_fcidump(&self, nelec: usize, ms2: i64) -> String {
        let n = self.n;
        let mut s = format!("&FCI NORB={n},NELEC={nelec},MS2={ms2},\n&END\n");
        let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if pair(i, j) < pair(k, l) {
                            continue;
                        }
                        let v = self.g(i, j, k, l);
                        if v != 0.0 {
                            s.push_str(&format!("{v:.16e} {} {} {} {}\n", i + 1, j + 1, k + 1, l + 1));
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let v = self.h(i, j);
                if v != 0.0 {
                    s.push_str(&format!("{v:.16e} {} {} 0 0\n", i + 1, j + 1));
                }
            }
        }
        s.push_str(&format!("{:.16e} 0 0 0 0\n", self.core));
        s
    }
}

/// Spin-orbital dump, one-based indices, entries set verbatim:
///
/// ```text
/// modes 4
/// constant 0.7
/// h 1 1 -1.25
/// v 1 2 1 2 0.3
/// w 1 2 3 1 2 3 0.01
/// ```
pub fn parse_tensor_text(text: &str) -> Result<ManyBodyTensors> {
    let mut t: Option<ManyBodyTensors> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.split('#').next().unwrap_or("").trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let arity = match fields[0] {
            "modes" => {
                if t.is_some() || fields.len() != 2 {
                    return Err(parse_err(line, "'modes N' must appear once, first"));
                }
                let n: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad mode count '{}'", fields[1])))?;
                t = Some(ManyBodyTensors::zeros(n).map_err(|e| parse_err(line, e.to_string()))?);
                continue;
            }
            "constant" => 0,
            "h" => 2,
            "v" => 4,
            "w" => 6,
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        };
        let tensors = t
            .as_mut()
            .ok_or_else(|| parse_err(line, "'modes N' must come first"))?;
        if fields.len() != arity + 2 {
            return Err(parse_err(line, format!("'{}' takes {arity} indices and a value", fields[0])));
        }
        let value = parse_complex(fields[arity + 1]).map_err(|m| parse_err(line, m))?;
        let mut ix = Vec::with_capacity(arity);
        for f in &fields[1..=arity] {
            match f.parse::<usize>() {
                Ok(p) if p >= 1 && p <= tensors.n_modes() => ix.push(p - 1),
                _ => return Err(parse_err(line, format!("bad index '{f}'"))),
            }
        }
        let result = match arity {
            0 => {
                if value.im != 0.0 {
                    return Err(parse_err(line, "constant must be real"));
                }
                tensors.constant = value.re;
                Ok(())
            }
            2 => tensors.set_h(ix[0], ix[1], value),
            4 => tensors.set_v(ix[0], ix[1], ix[2], ix[3], value),
            _ => tensors.set_w3([ix[0], ix[1], ix[2], ix[3], ix[4], ix[5]], value),
        };
        result.map_err(|e| parse_err(line, e.to_string()))?;
    }
    let t = t.ok_or_else(|| parse_err(1, "missing 'modes N' record"))?;
    t.validate()?;
    Ok(t)
}

pub fn write_tensor_text(t: &ManyBodyTensors) -> String {
    let n = t.n_modes();
    let mut s = format!("modes {n}\nconstant {:.16e}\n", t.constant);
    for p in 0..n {
        for q in 0..n {
            let h = t.h(p, q);
            if h != Complex64::default() {
                s.push_str(&format!("h {} {} {}\n", p + 1, q + 1, format_complex(h)));
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for u in 0..n {
                    let v = t.v(p, q, r, u);
                    if v != Complex64::default() {
                        s.push_str(&format!(
                            "v {} {} {} {} {}\n",
                            p + 1,
                            q + 1,
                            r + 1,
                            u + 1,
                            format_complex(v)
                        ));
                    }
                }
            }
        }
    }
    if t.has_three_body() {
        for flat in 0..n.pow(6) {
            let mut ix = [0usize; 6];
            let mut rest = flat;
            for slot in ix.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            let w = t.w3(ix);
            if w != Complex64::default() {
                let idx: Vec<String> = ix.iter().map(|p| (p + 1).to_string()).collect();
                s.push_str(&format!("w {} {}\n", idx.join(" "), format_complex(w)));
            }
        }
    }
    s
}
