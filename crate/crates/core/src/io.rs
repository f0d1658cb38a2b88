//! File formats: FCIDUMP integrals, matrix and CI-vector JSON, and the results report.
//!
//! Parsers reject malformed or inconsistent input instead of repairing it.
//! Two-electron integrals in FCIDUMP files are read in chemist notation,
//! `value i j k l` meaning `(ij|kl)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::civector::{BasisKind, CIVector};
use crate::determinant::{DeterminantSpace, OccupationString, MAX_ORBITALS};
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::linalg;
use crate::pipeline::{Measurement, Normalization};

// ---------------------------------------------------------------- FCIDUMP

/// Namelist header of an FCIDUMP file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FcidumpHeader {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    pub orbsym: Option<Vec<i64>>,
    pub isym: Option<i64>,
}

impl FcidumpHeader {
    /// `(n_alpha, n_beta)` implied by `NELEC` and `MS2`.
    pub fn electron_counts(&self) -> Result<(usize, usize)> {
        let nelec = self.nelec as i64;
        if (nelec + self.ms2) % 2 != 0 || self.ms2.abs() > nelec {
            return Err(Error::validation(format!(
                "NELEC={} and MS2={} do not give integral spin populations",
                self.nelec, self.ms2
            )));
        }
        let n_alpha = ((nelec + self.ms2) / 2) as usize;
        let n_beta = ((nelec - self.ms2) / 2) as usize;
        if n_alpha > self.norb || n_beta > self.norb {
            return Err(Error::validation(format!(
                "{n_alpha} alpha / {n_beta} beta electrons do not fit in NORB={}",
                self.norb
            )));
        }
        Ok((n_alpha, n_beta))
    }
}

#[derive(Clone, Debug)]
pub struct Fcidump {
    pub header: FcidumpHeader,
    pub integrals: IntegralSet,
    /// Non-fatal findings such as duplicated entries.
    pub warnings: Vec<String>,
}

fn parse_int(token: &str, line: usize, key: &str) -> Result<i64> {
    token
        .trim()
        .parse::<i64>()
        .map_err(|_| Error::parse(line, format!("{key} value `{token}` is not an integer")))
}

fn parse_header(chunks: &[(usize, String)]) -> Result<FcidumpHeader> {
    // key -> (line it appeared on, values)
    let mut fields: BTreeMap<String, (usize, Vec<String>)> = BTreeMap::new();
    let mut current: Option<String> = None;
    let line = chunks.first().map_or(0, |c| c.0);
    let tokens = chunks.iter().flat_map(|(no, text)| {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(move |t| (*no, t))
    });
    for (no, token) in tokens {
        if let Some((key, value)) = token.split_once('=') {
            let key = key.trim().to_ascii_uppercase();
            if fields.contains_key(&key) {
                return Err(Error::parse(no, format!("header key {key} repeated")));
            }
            if !matches!(key.as_str(), "NORB" | "NELEC" | "MS2" | "ORBSYM" | "ISYM") {
                return Err(Error::parse(no, format!("unsupported header key {key}")));
            }
            let mut values = Vec::new();
            if !value.is_empty() {
                values.push(value.to_string());
            }
            fields.insert(key.clone(), (no, values));
            current = Some(key);
        } else if let Some(key) = &current {
            fields
                .get_mut(key)
                .expect("current key present")
                .1
                .push(token.to_string());
        } else {
            return Err(Error::parse(no, format!("unexpected header token `{token}`")));
        }
    }
    let scalar = |key: &str| -> Result<Option<i64>> {
        match fields.get(key) {
            None => Ok(None),
            Some((no, v)) if v.len() == 1 => parse_int(&v[0], *no, key).map(Some),
            Some((no, v)) => Err(Error::parse(*no, format!("{key} expects one value, found {}", v.len()))),
        }
    };
    let line_of = |key: &str| fields.get(key).map_or(line, |f| f.0);
    let norb = scalar("NORB")?.ok_or_else(|| Error::parse(line, "header lacks NORB"))?;
    let nelec = scalar("NELEC")?.ok_or_else(|| Error::parse(line, "header lacks NELEC"))?;
    if norb < 1 || norb as usize > MAX_ORBITALS {
        return Err(Error::parse(
            line_of("NORB"),
            format!("NORB={norb} outside 1..={MAX_ORBITALS}"),
        ));
    }
    if nelec < 0 {
        return Err(Error::parse(line_of("NELEC"), format!("NELEC={nelec} is negative")));
    }
    let orbsym = match fields.get("ORBSYM") {
        None => None,
        Some((no, v)) => {
            let syms = v
                .iter()
                .map(|t| parse_int(t, *no, "ORBSYM"))
                .collect::<Result<Vec<_>>>()?;
            if syms.len() != norb as usize {
                return Err(Error::parse(
                    *no,
                    format!("ORBSYM lists {} entries for NORB={norb}", syms.len()),
                ));
            }
            Some(syms)
        }
    };
    Ok(FcidumpHeader {
        norb: norb as usize,
        nelec: nelec as usize,
        ms2: scalar("MS2")?.unwrap_or(0),
        orbsym,
        isym: scalar("ISYM")?,
    })
}

/// Locates `&END`, `$END` or `/` closing the namelist; returns (header text, rest offset).
fn header_terminator(line: &str) -> Option<(usize, usize)> {
    let upper = line.to_ascii_uppercase();
    for pat in ["&END", "$END"] {
        if let Some(p) = upper.find(pat) {
            return Some((p, p + pat.len()));
        }
    }
    line.find('/').map(|p| (p, p + 1))
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    // Fortran double-precision exponents
    let normalized = token.replace(['D', 'd'], "E");
    match normalized.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(line, format!("`{token}` is not a finite number"))),
    }
}

/// Parses an FCIDUMP file into chemist-notation integrals with 8-fold symmetry.
pub fn parse_fcidump(text: &str) -> Result<Fcidump> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header_text: Vec<(usize, String)> = Vec::new();
    let mut header_line = 0;
    let mut started = false;
    let mut header = None;
    for (no, raw) in lines.by_ref() {
        let line = raw.trim();
        if !started {
            if line.is_empty() {
                continue;
            }
            if !line.to_ascii_uppercase().starts_with("&FCI") {
                return Err(Error::parse(no, "expected `&FCI` header"));
            }
            started = true;
            header_line = no;
            let rest = &line[4..];
            if let Some((end, _)) = header_terminator(rest) {
                header_text.push((no, rest[..end].to_string()));
                header = Some(parse_header(&header_text)?);
                break;
            }
            header_text.push((no, rest.to_string()));
            continue;
        }
        if let Some((end, after)) = header_terminator(line) {
            header_text.push((no, line[..end].to_string()));
            if !line[after..].trim().is_empty() {
                return Err(Error::parse(no, "trailing text after header terminator"));
            }
            header = Some(parse_header(&header_text)?);
            break;
        }
        header_text.push((no, line.to_string()));
    }
    let header = match header {
        Some(h) => h,
        None if started => return Err(Error::parse(header_line, "header is not terminated by `&END` or `/`")),
        None => return Err(Error::parse(0, "empty FCIDUMP")),
    };

    let n = header.norb;
    let mut ints = IntegralSet::zeros(n);
    let mut warnings = Vec::new();
    let mut seen: HashSet<(u8, usize, usize, usize, usize)> = HashSet::new();
    let canonical_pair = |a: usize, b: usize| if a >= b { (a, b) } else { (b, a) };
    for (no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(Error::parse(
                no,
                format!("expected `value i j k l`, found {} fields", tokens.len()),
            ));
        }
        let value = parse_value(tokens[0], no)?;
        let mut idx = [0usize; 4];
        for (slot, t) in idx.iter_mut().zip(&tokens[1..]) {
            let v: i64 = t
                .parse()
                .map_err(|_| Error::parse(no, format!("index `{t}` is not an integer")))?;
            if v < 0 || v as usize > n {
                return Err(Error::parse(no, format!("index {v} out of range 0..={n}")));
            }
            *slot = v as usize;
        }
        let [i, j, k, l] = idx;
        let key = match (i, j, k, l) {
            (0, 0, 0, 0) => {
                ints.set_core_energy(value);
                (0u8, 0, 0, 0, 0)
            }
            (i, j, 0, 0) if i > 0 && j > 0 => {
                ints.set_h(i - 1, j - 1, value);
                let (a, b) = canonical_pair(i, j);
                (1, a, b, 0, 0)
            }
            (i, 0, 0, 0) if i > 0 => {
                warnings.push(format!("line {no}: orbital-energy entry ignored"));
                continue;
            }
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => {
                ints.set_eri(i - 1, j - 1, k - 1, l - 1, value);
                let p = canonical_pair(i, j);
                let q = canonical_pair(k, l);
                let (p, q) = if p >= q { (p, q) } else { (q, p) };
                (2, p.0, p.1, q.0, q.1)
            }
            _ => {
                return Err(Error::parse(
                    no,
                    format!("index pattern {i} {j} {k} {l} is not a valid integral label"),
                ))
            }
        };
        if !seen.insert(key) {
            let msg = format!("line {no}: duplicate integral {i} {j} {k} {l}, last occurrence wins");
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    Ok(Fcidump {
        header,
        integrals: ints,
        warnings,
    })
}

/// Serializes integrals as FCIDUMP; only nonzero entries are listed, canonical index order.
pub fn write_fcidump(ints: &IntegralSet, nelec: usize, ms2: i64) -> String {
    let n = ints.n_orbitals();
    let mut out = String::new();
    let _ = writeln!(out, "&FCI NORB={n},NELEC={nelec},MS2={ms2},");
    let _ = writeln!(out, "  ORBSYM={}", vec!["1"; n].join(",") + ",");
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, "&END");
    for ((i, j, k, l), v) in ints.nonzero_eri() {
        let _ = writeln!(out, "{v:>25.17e} {:>3} {:>3} {:>3} {:>3}", i + 1, j + 1, k + 1, l + 1);
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ints.h(i, j);
            if v != 0.0 {
                let _ = writeln!(out, "{v:>25.17e} {:>3} {:>3} {:>3} {:>3}", i + 1, j + 1, 0, 0);
            }
        }
    }
    let _ = writeln!(
        out,
        "{:>25.17e} {:>3} {:>3} {:>3} {:>3}",
        ints.core_energy(),
        0,
        0,
        0,
        0
    );
    out
}

// ---------------------------------------------------------------- matrices

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(e.line(), e.to_string())
}

/// Role of a matrix file, which decides its validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// AO overlap: symmetric, unit diagonal, positive definite.
    Overlap,
    /// MO coefficients: rows are AOs, columns MOs.
    MoCoefficients,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    n_orbitals: usize,
    matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub matrix: DMatrix<f64>,
    pub labels: Vec<String>,
    /// Set for overlaps equal to the identity within 1e-12.
    pub orthonormal: bool,
}

/// Symmetry and unit-diagonal tolerance for overlap files.
pub const OVERLAP_FILE_TOL: f64 = 1e-8;

pub fn parse_matrix_json(text: &str, kind: MatrixKind) -> Result<MatrixFile> {
    let raw: MatrixJson = serde_json::from_str(text).map_err(json_error)?;
    let n = raw.n_orbitals;
    if n == 0 || n > MAX_ORBITALS {
        return Err(Error::validation(format!("n_orbitals={n} outside 1..={MAX_ORBITALS}")));
    }
    if raw.matrix.len() != n || raw.matrix.iter().any(|row| row.len() != n) {
        return Err(Error::validation(format!("matrix is not {n}x{n}")));
    }
    let m = DMatrix::from_fn(n, n, |i, j| raw.matrix[i][j]);
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let labels = match raw.labels {
        Some(l) if l.len() == n => l,
        Some(l) => return Err(Error::validation(format!("{} labels for {n} orbitals", l.len()))),
        None => (0..n).map(|i| format!("AO{i}")).collect(),
    };
    let mut orthonormal = false;
    if kind == MatrixKind::Overlap {
        for i in 0..n {
            if (m[(i, i)] - 1.0).abs() > OVERLAP_FILE_TOL {
                return Err(Error::validation(format!(
                    "overlap diagonal entry {i} is {}, expected 1",
                    m[(i, i)]
                )));
            }
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > OVERLAP_FILE_TOL {
                    return Err(Error::validation(format!("overlap is not symmetric at ({i},{j})")));
                }
            }
        }
        let smallest = linalg::symmetric_eigenvalues(&m)[0];
        if smallest <= 0.0 {
            return Err(Error::validation(format!(
                "overlap is not positive definite: smallest eigenvalue {smallest:.6}"
            )));
        }
        orthonormal = (&m - DMatrix::identity(n, n)).amax() <= 1e-12;
    }
    Ok(MatrixFile {
        matrix: m,
        labels,
        orthonormal,
    })
}

pub fn write_matrix_json(matrix: &DMatrix<f64>, labels: Option<&[String]>) -> String {
    let doc = MatrixJson {
        n_orbitals: matrix.nrows(),
        matrix: (0..matrix.nrows())
            .map(|i| matrix.row(i).iter().copied().collect())
            .collect(),
        labels: labels.map(|l| l.to_vec()),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("matrix serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- CI vectors

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    alpha: Vec<usize>,
    beta: Vec<usize>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CIVectorJson {
    n_orbitals: usize,
    basis: BasisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_alpha: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_beta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    entries: Vec<EntryJson>,
}

#[derive(Clone, Debug)]
pub struct CIVectorFile {
    pub civector: CIVector,
    pub energy: Option<f64>,
}

/// Reads a CI vector, scattering entries into canonical order (absent determinants are zero).
///
/// MO-basis vectors must have unit norm within `mo_norm_tol`.
pub fn parse_civector_json(text: &str, mo_norm_tol: f64) -> Result<CIVectorFile> {
    let raw: CIVectorJson = serde_json::from_str(text).map_err(json_error)?;
    let n = raw.n_orbitals;
    if n == 0 || n > MAX_ORBITALS {
        return Err(Error::validation(format!("n_orbitals={n} outside 1..={MAX_ORBITALS}")));
    }
    let first = raw.entries.first();
    let n_alpha = raw
        .n_alpha
        .or(first.map(|e| e.alpha.len()))
        .ok_or_else(|| Error::validation("empty CI vector without n_alpha/n_beta"))?;
    let n_beta = raw
        .n_beta
        .or(first.map(|e| e.beta.len()))
        .ok_or_else(|| Error::validation("empty CI vector without n_alpha/n_beta"))?;
    let space = DeterminantSpace::enumerate(n, n_alpha, n_beta).map_err(|e| Error::validation(e.to_string()))?;
    let mut coeffs = DVector::zeros(space.len());
    let mut filled = vec![false; space.len()];
    for (k, e) in raw.entries.iter().enumerate() {
        let det = OccupationString::new(n, &e.alpha, &e.beta)
            .map_err(|err| Error::validation(format!("entry {k}: {err}")))?;
        let idx = space
            .rank(&det)
            .map_err(|_| Error::validation(format!("entry {k}: electron counts differ from {n_alpha}α/{n_beta}β")))?;
        if filled[idx] {
            return Err(Error::validation(format!("entry {k}: duplicate determinant {det:?}")));
        }
        if !e.coeff.is_finite() {
            return Err(Error::validation(format!("entry {k}: non-finite coefficient")));
        }
        filled[idx] = true;
        coeffs[idx] = e.coeff;
    }
    let civector = CIVector::new(space, raw.basis, coeffs)?;
    if raw.basis == BasisKind::Mo {
        civector.check_unit_norm(mo_norm_tol)?;
    }
    Ok(CIVectorFile {
        civector,
        energy: raw.energy,
    })
}

/// Writes every determinant of the space, in canonical order.
pub fn write_civector_json(civec: &CIVector, energy: Option<f64>) -> String {
    let space = civec.space();
    let doc = CIVectorJson {
        n_orbitals: space.n_orbitals(),
        basis: civec.basis(),
        n_alpha: Some(space.n_alpha()),
        n_beta: Some(space.n_beta()),
        energy,
        entries: space
            .iter()
            .zip(civec.coefficients().iter())
            .map(|(d, &c)| EntryJson {
                alpha: d.alpha_indices(),
                beta: d.beta_indices(),
                coeff: c,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("CI vector serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- report

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub idempotency_residual: Option<f64>,
    pub s_min_eigenvalue: Option<f64>,
    pub s_squared: Option<f64>,
    pub degenerate_ground_state: Option<bool>,
}

/// Results of one measurement run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub l1_nonorthogonal: f64,
    pub l1_biorthogonal: f64,
    pub trace: f64,
    pub n_determinants: usize,
    pub gram_condition_number: f64,
    pub normalization_mode: Normalization,
    pub ground_state_energy: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl ReportDocument {
    pub fn from_measurement(
        m: &Measurement,
        energy: Option<f64>,
        spin_squared: Option<f64>,
        degenerate: Option<bool>,
    ) -> Self {
        Self {
            l1_nonorthogonal: m.l1_nonorthogonal,
            l1_biorthogonal: m.l1_biorthogonal,
            trace: m.trace,
            n_determinants: m.n_determinants,
            gram_condition_number: m.gram_condition_number,
            normalization_mode: m.normalization,
            ground_state_energy: energy,
            diagnostics: Diagnostics {
                idempotency_residual: Some(m.idempotency_residual),
                s_min_eigenvalue: Some(m.gram_min_eigenvalue),
                s_squared: spin_squared,
                degenerate_ground_state: degenerate,
            },
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_numbers(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(round_numbers),
        serde_json::Value::Object(o) => o.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Key-sorted, pretty JSON with every float rounded to 12 significant digits.
pub fn write_report(doc: &ReportDocument) -> String {
    let mut value = serde_json::to_value(doc).expect("report serializes");
    round_numbers(&mut value);
    let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_report(text: &str) -> Result<ReportDocument> {
    serde_json::from_str(text).map_err(json_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const HEADER: &str = "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n";

    #[test]
    fn fcidump_line_kinds() {
        let text = format!("{HEADER}  1.5 1 1 0 0\n 0.75 0 0 0 0\n 0.2 1 2 1 2\n");
        let f = parse_fcidump(&text).unwrap();
        assert_eq!(f.integrals.h(0, 0), 1.5);
        assert_eq!(f.integrals.core_energy(), 0.75);
        for (i, j, k, l) in [(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)] {
            assert_eq!(f.integrals.eri(i, j, k, l), 0.2);
        }
        assert_eq!(f.header.electron_counts().unwrap(), (1, 1));
        assert_eq!(f.header.orbsym, Some(vec![1, 1]));
        assert!(f.warnings.is_empty());
    }

    #[test]
    fn fcidump_single_line_header_and_slash() {
        let f = parse_fcidump("&FCI NORB=1, NELEC=1, MS2=1 /\n-0.5 1 1 0 0\n").unwrap();
        assert_eq!(f.header.norb, 1);
        assert_eq!(f.header.electron_counts().unwrap(), (1, 0));
        assert_eq!(f.integrals.h(0, 0), -0.5);
    }

    #[test]
    fn fcidump_fortran_exponent() {
        let f = parse_fcidump(&format!("{HEADER}1.0D-01 2 2 0 0\n")).unwrap();
        assert_abs_diff_eq!(f.integrals.h(1, 1), 0.1, epsilon = 1e-17);
    }

    #[test]
    fn fcidump_duplicates_warn_and_last_wins() {
        let f = parse_fcidump(&format!("{HEADER}0.1 1 2 0 0\n0.3 2 1 0 0\n")).unwrap();
        assert_eq!(f.integrals.h(0, 1), 0.3);
        assert_eq!(f.warnings.len(), 1);
        assert!(f.warnings[0].contains("line 6"));
    }

    #[test]
    fn fcidump_errors_carry_line_numbers() {
        let cases = [
            ("NORB=2\n", 1),
            ("&FCI NORB=2,NELEC=2,MS2=0,\n", 1),
            ("&FCI NELEC=2 &END\n", 1),
            ("&FCI NORB=2,NELEC=2,FOO=3 &END\n", 1),
            ("&FCI NORB=2,\n NELEC=2,\n BOGUS=1\n&END\n", 3),
            ("&FCI NORB=2,\n NELEC=x\n&END\n", 2),
            ("&FCI NORB=2,NELEC=2,\n ORBSYM=1,\n&END\n", 2),
            ("&FCI NORB=2,NELEC=2 &END\n1.0 3 1 0 0\n", 2),
            ("&FCI NORB=2,NELEC=2 &END\n\nabc 1 1 0 0\n", 3),
            ("&FCI NORB=2,NELEC=2 &END\n1.0 1 1 0\n", 2),
            ("&FCI NORB=2,NELEC=2 &END\n1.0 0 1 0 0\n", 2),
            ("&FCI NORB=2,NELEC=2 &END\n1.0 1 1 1 0\n", 2),
        ];
        for (text, line) in cases {
            match parse_fcidump(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn fcidump_round_trip() {
        let mut ints = IntegralSet::zeros(3);
        ints.set_core_energy(1.25);
        ints.set_h(0, 0, -1.0);
        ints.set_h(2, 1, 0.1);
        ints.set_eri(0, 0, 0, 0, 0.7);
        ints.set_eri(2, 1, 1, 0, 1.0 / 3.0);
        let text = write_fcidump(&ints, 2, 0);
        let back = parse_fcidump(&text).unwrap();
        assert_eq!(back.integrals, ints);
        assert!(back.warnings.is_empty());
    }

    #[test]
    fn overlap_files() {
        let id = parse_matrix_json(r#"{"n_orbitals": 2, "matrix": [[1, 0], [0, 1]]}"#, MatrixKind::Overlap).unwrap();
        assert!(id.orthonormal);
        assert_eq!(id.labels, vec!["AO0", "AO1"]);
        let s = parse_matrix_json(
            r#"{"n_orbitals": 2, "matrix": [[1, 0.5], [0.5, 1]], "labels": ["C1", "C2"]}"#,
            MatrixKind::Overlap,
        )
        .unwrap();
        assert!(!s.orthonormal);
        let err = parse_matrix_json(
            r#"{"n_orbitals": 2, "matrix": [[1, 1.1], [1.1, 1]]}"#,
            MatrixKind::Overlap,
        )
        .unwrap_err();
        assert!(err.to_string().contains("not positive definite"), "{err}");
        assert!(err.to_string().contains("-0.1"), "{err}");
    }

    #[test]
    fn matrix_file_rejections() {
        let asym = r#"{"n_orbitals": 2, "matrix": [[1, 0.5], [0.4, 1]]}"#;
        assert!(matches!(
            parse_matrix_json(asym, MatrixKind::Overlap),
            Err(Error::Validation(_))
        ));
        assert!(parse_matrix_json(asym, MatrixKind::MoCoefficients).is_ok());
        let shape = r#"{"n_orbitals": 2, "matrix": [[1, 0]]}"#;
        assert!(matches!(
            parse_matrix_json(shape, MatrixKind::MoCoefficients),
            Err(Error::Validation(_))
        ));
        let labels = r#"{"n_orbitals": 1, "matrix": [[1]], "labels": []}"#;
        assert!(parse_matrix_json(labels, MatrixKind::Overlap).is_err());
        let diag = r#"{"n_orbitals": 1, "matrix": [[2]]}"#;
        assert!(parse_matrix_json(diag, MatrixKind::Overlap).is_err());
        match parse_matrix_json("{\n\"n_orbitals\": 1,\n\"matrix\": [[1,]]}", MatrixKind::Overlap) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn civector_files() {
        let hf = parse_civector_json(
            r#"{"n_orbitals": 1, "basis": "MO", "entries": [{"alpha": [0], "beta": [0], "coeff": 1.0}]}"#,
            1e-10,
        )
        .unwrap();
        assert_eq!(hf.civector.len(), 1);
        let two = r#"{"n_orbitals": 2, "basis": "MO", "entries": [
            {"alpha": [1], "beta": [1], "coeff": 0.6},
            {"alpha": [0], "beta": [0], "coeff": 0.8}]}"#;
        let v = parse_civector_json(two, 1e-10).unwrap().civector;
        assert_eq!(v.coefficients().as_slice(), &[0.8, 0.0, 0.0, 0.6]);
        let short = r#"{"n_orbitals": 1, "basis": "MO", "entries": [{"alpha": [0], "beta": [], "coeff": 0.5}]}"#;
        let err = parse_civector_json(short, 1e-10).unwrap_err().to_string();
        assert!(err.contains("0.5"), "{err}");
        let ao = r#"{"n_orbitals": 1, "basis": "AO", "entries": [{"alpha": [0], "beta": [], "coeff": 0.5}]}"#;
        assert!(parse_civector_json(ao, 1e-10).is_ok());
    }

    #[test]
    fn civector_rejections() {
        let dup = r#"{"n_orbitals": 2, "basis": "AO", "entries": [
            {"alpha": [0], "beta": [], "coeff": 0.6}, {"alpha": [0], "beta": [], "coeff": 0.8}]}"#;
        assert!(parse_civector_json(dup, 1e-10)
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        let range = r#"{"n_orbitals": 2, "basis": "AO", "entries": [{"alpha": [2], "beta": [], "coeff": 1}]}"#;
        assert!(parse_civector_json(range, 1e-10).is_err());
        let mixed = r#"{"n_orbitals": 2, "basis": "AO", "entries": [
            {"alpha": [0], "beta": [], "coeff": 0.6}, {"alpha": [0, 1], "beta": [], "coeff": 0.8}]}"#;
        assert!(parse_civector_json(mixed, 1e-10).is_err());
        let basis = r#"{"n_orbitals": 1, "basis": "XO", "entries": []}"#;
        assert!(matches!(parse_civector_json(basis, 1e-10), Err(Error::Parse { .. })));
    }

    #[test]
    fn civector_round_trip() {
        let space = DeterminantSpace::enumerate(3, 2, 1).unwrap();
        let coeffs = DVector::from_fn(space.len(), |i, _| (i as f64 + 1.0).sin());
        let civ = CIVector::new(space, BasisKind::Mo, coeffs.normalize()).unwrap();
        let back = parse_civector_json(&write_civector_json(&civ, Some(-1.5)), 1e-10).unwrap();
        assert_eq!(back.civector, civ);
        assert_eq!(back.energy, Some(-1.5));
    }

    fn sample_report() -> ReportDocument {
        ReportDocument {
            l1_nonorthogonal: 2.0 / 3.0,
            l1_biorthogonal: 1.0,
            trace: 1.0,
            n_determinants: 2,
            gram_condition_number: 3.0,
            normalization_mode: Normalization::UnitDiagonal,
            ground_state_energy: None,
            diagnostics: Diagnostics::default(),
        }
    }

    #[test]
    fn report_format() {
        let text = write_report(&sample_report());
        assert!(text.contains("\"l1_biorthogonal\": 1.0"), "{text}");
        assert!(text.contains("\"l1_nonorthogonal\": 0.666666666667"), "{text}");
        assert!(text.contains("\"ground_state_energy\": null"));
        assert!(text.contains("\"s_squared\": null"));
        assert!(text.contains("\"normalization_mode\": \"unit_diagonal\""));
        // keys sorted
        let pos = |k: &str| text.find(k).unwrap();
        assert!(pos("\"diagnostics\"") < pos("\"gram_condition_number\""));
        assert!(pos("\"l1_biorthogonal\"") < pos("\"l1_nonorthogonal\""));
        assert!(pos("\"n_determinants\"") < pos("\"trace\""));
        assert_eq!(text, write_report(&sample_report()));
    }

    #[test]
    fn report_round_trip() {
        let mut doc = sample_report();
        doc.l1_nonorthogonal = 0.25;
        doc.diagnostics.s_squared = Some(0.75);
        doc.diagnostics.degenerate_ground_state = Some(false);
        assert_eq!(parse_report(&write_report(&doc)).unwrap(), doc);
    }

    proptest! {
        #[test]
        fn report_rewrite_is_stable(a in -1e6f64..1e6, b in 0.0f64..500.0, c in 1e-12f64..1.0) {
            let mut doc = sample_report();
            doc.l1_nonorthogonal = a;
            doc.l1_biorthogonal = b;
            doc.diagnostics.idempotency_residual = Some(c);
            let text = write_report(&doc);
            let back = parse_report(&text).unwrap();
            prop_assert_eq!(write_report(&back), text);
            prop_assert!((back.l1_nonorthogonal - a).abs() <= 1e-11 * a.abs().max(1e-300));
        }
    }
}
