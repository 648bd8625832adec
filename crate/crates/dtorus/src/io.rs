//! JSON and CSV serialisation of operators, states and reports, and parsers
//! for the command-line specifiers.
//!
//! Floats are written with 17 significant digits in lowercase scientific
//! notation, which round-trips every `f64` bit-exactly.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::{json, Map, Number, Value};

use crate::canonical::{MetaplecticOperator, SymplecticMap};
use crate::deformed::QOscillator;
use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};
use crate::limits::{ConvergenceReport, EvenOddDecomposition, SpectrumProfile};
use crate::linalg::ComplexMatrix;
use crate::operators::{fourier_operator, BasisTag, OperatorMatrix, Provenance, StateVector};
use crate::random::random_state;
use crate::schwinger::SchwingerEigensystem;
use crate::wigner::{Normalization, WignerGrid};

/// Largest lattice component accepted from text; keeps products of two
/// components well inside `i64`.
pub const MAX_LATTICE_COMPONENT: i64 = 1 << 20;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(msg: impl Into<String>) -> TorusError {
    TorusError::Parse(msg.into())
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        Number::from_str(&format_float(x)).map(Value::Number).unwrap_or(Value::Null)
    } else {
        Value::Null
    }
}

fn complex_value(z: Complex64) -> Value {
    Value::Array(vec![number(z.re), number(z.im)])
}

fn complex_list(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex_value(z)).collect())
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are always serialisable");
    s.push('\n');
    s
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| parse_err(format!("{what}: expected a finite number")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| parse_err(format!("{what}: expected an integer")))
}

fn complex_from_value(v: &Value, what: &str) -> Result<Complex64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex64::new(as_f64(re, what)?, as_f64(im, what)?)),
        _ => Err(parse_err(format!("{what}: expected [re, im]"))),
    }
}

fn complex_list_from_value(v: &Value, what: &str) -> Result<Vec<Complex64>> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("{what}: expected an array")))?
        .iter()
        .map(|z| complex_from_value(z, what))
        .collect()
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(format!("missing field \"{key}\"")))
}

fn object(s: &str) -> Result<Map<String, Value>> {
    match serde_json::from_str::<Value>(s).map_err(|e| parse_err(e.to_string()))? {
        Value::Object(o) => Ok(o),
        _ => Err(parse_err("expected a JSON object")),
    }
}

fn dimension_field(obj: &Map<String, Value>) -> Result<Dimension> {
    Dimension::new(as_i64(field(obj, "dim")?, "dim")?)
}

fn lattice_value(m: LatticeVector) -> Value {
    json!([m.m1, m.m2])
}

fn lattice_from_value(v: &Value, what: &str) -> Result<LatticeVector> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok(LatticeVector::new(as_i64(a, what)?, as_i64(b, what)?)),
        _ => Err(parse_err(format!("{what}: expected [m1, m2]"))),
    }
}

pub fn operator_value(op: &OperatorMatrix) -> Value {
    let rows: Vec<Value> = op.matrix().rows().map(complex_list).collect();
    json!({ "dim": op.dim().d(), "rows": rows })
}

/// `{"dim": D, "rows": [[[re, im], …], …]}`, row-major.
pub fn operator_to_json(op: &OperatorMatrix) -> String {
    to_pretty(&operator_value(op))
}

pub fn parse_operator_json(s: &str) -> Result<OperatorMatrix> {
    let obj = object(s)?;
    let dim = dimension_field(&obj)?;
    let rows = field(&obj, "rows")?.as_array().ok_or_else(|| parse_err("rows: expected an array"))?;
    if rows.len() != dim.d() {
        return Err(TorusError::DimensionMismatch { expected: dim.d(), found: rows.len() });
    }
    let rows = rows.iter().map(|r| complex_list_from_value(r, "rows")).collect::<Result<Vec<_>>>()?;
    if let Some(bad) = rows.iter().find(|r| r.len() != dim.d()) {
        return Err(TorusError::DimensionMismatch { expected: dim.d(), found: bad.len() });
    }
    let matrix = ComplexMatrix::from_rows(rows).ok_or_else(|| parse_err("rows do not form a square matrix"))?;
    OperatorMatrix::new(dim, matrix, Provenance::Imported)
}

pub fn state_value(state: &StateVector) -> Value {
    json!({ "dim": state.dim().d(), "basis": state.basis().to_string(), "amplitudes": complex_list(state.amplitudes()) })
}

/// `{"dim": D, "basis": "u", "amplitudes": [[re, im], …]}`.
pub fn state_to_json(state: &StateVector) -> String {
    to_pretty(&state_value(state))
}

fn state_from_object(obj: &Map<String, Value>) -> Result<StateVector> {
    let dim = dimension_field(obj)?;
    let basis = match obj.get("basis") {
        None => BasisTag::U,
        Some(b) => b.as_str().ok_or_else(|| parse_err("basis: expected a string"))?.parse()?,
    };
    let amplitudes = complex_list_from_value(field(obj, "amplitudes")?, "amplitudes")?;
    StateVector::new(dim, amplitudes, basis)
}

pub fn parse_state_json(s: &str) -> Result<StateVector> {
    state_from_object(&object(s)?)
}

/// `{"m": [m1, m2], "eigenvalues": [[re, im], …], "eigenvectors": [state, …]}`.
pub fn eigensystem_to_json(eig: &SchwingerEigensystem) -> String {
    let vectors: Vec<Value> = eig.eigenvectors.iter().map(state_value).collect();
    to_pretty(&json!({
        "dim": eig.dim().d(),
        "m": lattice_value(eig.m),
        "eigenvalues": complex_list(&eig.eigenvalues),
        "eigenvectors": vectors,
    }))
}

/// An eigensystem read back from JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct EigensystemRecord {
    pub m: LatticeVector,
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<StateVector>,
}

pub fn parse_eigensystem_json(s: &str) -> Result<EigensystemRecord> {
    let obj = object(s)?;
    let m = lattice_from_value(field(&obj, "m")?, "m")?;
    let eigenvalues = complex_list_from_value(field(&obj, "eigenvalues")?, "eigenvalues")?;
    let eigenvectors = field(&obj, "eigenvectors")?
        .as_array()
        .ok_or_else(|| parse_err("eigenvectors: expected an array"))?
        .iter()
        .map(|v| v.as_object().ok_or_else(|| parse_err("eigenvector: expected an object")).and_then(state_from_object))
        .collect::<Result<Vec<_>>>()?;
    if eigenvalues.len() != eigenvectors.len() {
        return Err(TorusError::DimensionMismatch { expected: eigenvalues.len(), found: eigenvectors.len() });
    }
    if let Some(first) = eigenvectors.first() {
        let d = first.dim();
        if let Some(bad) = eigenvectors.iter().find(|v| v.dim() != d) {
            return Err(TorusError::DimensionMismatch { expected: d.d(), found: bad.dim().d() });
        }
    }
    Ok(EigensystemRecord { m, eigenvalues, eigenvectors })
}

/// Distance of `G` from the Fourier operator after aligning the global phase.
pub fn fourier_distance(op: &MetaplecticOperator) -> f64 {
    op.distance_up_to_phase(fourier_operator(op.dim).matrix())
}

/// `{"R": [[..]], "unitary_residual": x, "per_m": [{"m", "phase", "residual"}, …]}`.
pub fn transform_report_json(op: &MetaplecticOperator) -> String {
    let per_m: Vec<Value> = op
        .per_m
        .iter()
        .map(|p| json!({ "m": lattice_value(p.m), "phase": complex_value(p.phase), "residual": number(p.residual) }))
        .collect();
    to_pretty(&json!({
        "dim": op.dim.d(),
        "R": op.map.rows(),
        "unitary_residual": number(op.unitary_residual),
        "max_conjugation_residual": number(op.max_conjugation_residual()),
        "fourier_distance": number(fourier_distance(op)),
        "per_m": per_m,
    }))
}

pub fn transform_report_table(op: &MetaplecticOperator) -> Table {
    let mut t = Table::new(&["m1", "m2", "phase_re", "phase_im", "residual"]);
    t.comment(format!("R={}", op.map));
    t.comment(format!("unitary_residual={}", format_float(op.unitary_residual)));
    t.comment(format!("fourier_distance={}", format_float(fourier_distance(op))));
    for p in &op.per_m {
        t.push(vec![Cell::Int(p.m.m1), Cell::Int(p.m.m2), Cell::Float(p.phase.re), Cell::Float(p.phase.im), Cell::Float(p.residual)]);
    }
    t
}

/// Index of a limiting spectrum profile.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexReport {
    pub dim: usize,
    pub case: String,
    pub index: f64,
    pub f0: f64,
    pub f_dim: f64,
}

impl IndexReport {
    pub fn new(profile: &SpectrumProfile, case: impl Into<String>, index: f64) -> Self {
        Self { dim: profile.dim.d(), case: case.into(), index, f0: profile.f0(), f_dim: profile.f_dim() }
    }

    /// `{"D": …, "case": …, "I": …, "f0": …, "fD": …}`.
    pub fn to_json(&self) -> String {
        to_pretty(&json!({
            "D": self.dim,
            "case": self.case,
            "I": number(self.index),
            "f0": number(self.f0),
            "fD": number(self.f_dim),
        }))
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["D", "case", "I", "f0", "fD"]);
        t.push(vec![Cell::Int(self.dim as i64), Cell::Text(self.case.clone()), Cell::Float(self.index), Cell::Float(self.f0), Cell::Float(self.f_dim)]);
        t
    }
}

/// One CSV field.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn parse(s: &str) -> Self {
        if let Ok(i) = s.parse::<i64>() {
            Self::Int(i)
        } else if let Ok(x) = s.parse::<f64>() {
            Self::Float(x)
        } else {
            Self::Text(s.to_string())
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Int(i) => Some(*i as f64),
            Self::Float(x) => Some(*x),
            Self::Text(_) => None,
        }
    }

    fn to_value(&self) -> Value {
        match self {
            Self::Int(i) => json!(i),
            Self::Float(x) => number(*x),
            Self::Text(s) => json!(s),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Int(i) => write!(f, "{i}"),
            Self::Float(x) => write!(f, "{}", format_float(*x)),
            Self::Text(s) => write!(f, "{s}"),
        }
    }
}

/// Column-ordered table with leading `# key=value` comment lines.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { comments: Vec::new(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string)).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8"));
        out
    }

    /// `{"comments": […], "columns": […], "rows": [[…], …]}`.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_value).collect())).collect();
        to_pretty(&json!({ "comments": self.comments, "columns": self.header, "rows": rows }))
    }
}

/// Reads a table written by [`Table::to_csv`].
pub fn parse_table_csv(s: &str) -> Result<Table> {
    let mut comments = Vec::new();
    let mut body = s;
    while let Some(rest) = body.strip_prefix('#') {
        let (line, tail) = rest.split_once('\n').unwrap_or((rest, ""));
        comments.push(line.trim().to_string());
        body = tail;
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers().map_err(|e| parse_err(e.to_string()))?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(parse_err("missing CSV header"));
    }
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(Cell::parse).collect()).map_err(|e| parse_err(e.to_string())))
        .collect::<Result<Vec<Vec<Cell>>>>()?;
    Ok(Table { comments, header, rows })
}

/// Columns `n, f_n, C, q_re, q_im, m1, m2, mp1, mp2`.
pub fn spectrum_table(osc: &QOscillator) -> Table {
    let mut t = Table::new(&["n", "f_n", "C", "q_re", "q_im", "m1", "m2", "mp1", "mp2"]);
    t.comment(format!("D={}", osc.dim));
    t.comment(format!("branch={:?}", osc.branch));
    for (n, &f) in osc.spectrum.iter().enumerate() {
        t.push(vec![
            Cell::Int(n as i64),
            Cell::Float(f),
            Cell::Float(osc.shift),
            Cell::Float(osc.q.re),
            Cell::Float(osc.q.im),
            Cell::Int(osc.m.m1),
            Cell::Int(osc.m.m2),
            Cell::Int(osc.mp.m1),
            Cell::Int(osc.mp.m2),
        ]);
    }
    t
}

/// Spectrum rows read back from [`spectrum_table`] CSV: `(n, f_n)`.
pub fn parse_spectrum_csv(s: &str) -> Result<Vec<(i64, f64)>> {
    let t = parse_table_csv(s)?;
    let (n, f) = match (t.column("n"), t.column("f_n")) {
        (Some(n), Some(f)) => (n, f),
        _ => return Err(parse_err("spectrum CSV needs columns n and f_n")),
    };
    n.iter()
        .zip(f)
        .map(|(n, f)| match (n, f.as_f64()) {
            (Cell::Int(n), Some(f)) => Ok((*n, f)),
            _ => Err(parse_err("spectrum row: expected integer n and numeric f_n")),
        })
        .collect()
}

/// `V1,V2,W` for torus grids, `J,theta,W` for action-angle grids.
pub fn wigner_table(grid: &WignerGrid) -> Table {
    let d = grid.dim.di();
    let g0 = grid.dim.gamma0();
    let mut t = match grid.normalization {
        Normalization::Torus => Table::new(&["V1", "V2", "W"]),
        Normalization::ActionAngle => Table::new(&["J", "theta", "W"]),
    };
    t.comment(format!("D={d}"));
    t.comment(format!("max_imag={}", format_float(grid.max_imag)));
    for a in 0..d {
        for b in 0..d {
            let second = match grid.normalization {
                Normalization::Torus => Cell::Int(b),
                Normalization::ActionAngle => Cell::Float(g0 * b as f64),
            };
            t.push(vec![Cell::Int(a), second, Cell::Float(grid.at(a, b))]);
        }
    }
    t
}

/// `J,theta,W_even,W_odd` on the half-integer action grid.
pub fn decomposition_table(dec: &EvenOddDecomposition) -> Table {
    let mut t = Table::new(&["J", "theta", "W_even", "W_odd"]);
    t.comment(format!("D={}", dec.dim));
    t.comment(format!("reconstruction_residual={}", format_float(dec.reconstruction_residual)));
    let n = dec.angles.len();
    for (a, &j) in dec.actions.iter().enumerate() {
        for (b, &th) in dec.angles.iter().enumerate() {
            let k = a * n + b;
            t.push(vec![Cell::Float(j), Cell::Float(th), Cell::Float(dec.even[k]), Cell::Float(dec.odd[k])]);
        }
    }
    t
}

/// `D,residual`.
pub fn convergence_table(report: &ConvergenceReport) -> Table {
    let mut t = Table::new(&["D", "residual"]);
    t.comment(format!("observable={}", report.observable));
    if let Some(g) = report.gamma {
        t.comment(format!("gamma={}", format_float(g)));
    }
    t.comment(format!("monotone_decreasing={}", report.monotone_decreasing));
    for (&p, &r) in report.primes.iter().zip(&report.residuals) {
        t.push(vec![Cell::Int(p), Cell::Float(r)]);
    }
    t
}

/// `row,col,re,im` for every matrix entry.
pub fn operator_table(op: &OperatorMatrix) -> Table {
    let mut t = Table::new(&["row", "col", "re", "im"]);
    t.comment(format!("D={}", op.dim()));
    t.comment(format!("provenance={}", op.provenance()));
    for (i, row) in op.matrix().rows().enumerate() {
        for (j, z) in row.iter().enumerate() {
            t.push(vec![Cell::Int(i as i64), Cell::Int(j as i64), Cell::Float(z.re), Cell::Float(z.im)]);
        }
    }
    t
}

fn parse_int(s: &str, what: &str) -> Result<i64> {
    s.trim().parse::<i64>().map_err(|_| parse_err(format!("{what}: \"{s}\" is not an integer")))
}

fn parse_int_list<const N: usize>(s: &str, what: &str) -> Result<[i64; N]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(parse_err(format!("{what}: expected {N} comma-separated integers, got \"{s}\"")));
    }
    let mut out = [0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        let x = parse_int(p, what)?;
        if x.abs() > MAX_LATTICE_COMPONENT {
            return Err(TorusError::OutOfRange(format!("{what}: |{x}| exceeds {MAX_LATTICE_COMPONENT}")));
        }
        *o = x;
    }
    Ok(out)
}

impl FromStr for LatticeVector {
    type Err = TorusError;

    /// `"m1,m2"`.
    fn from_str(s: &str) -> Result<Self> {
        let [a, b] = parse_int_list::<2>(s, "lattice vector")?;
        Ok(Self::new(a, b))
    }
}

impl FromStr for SymplecticMap {
    type Err = TorusError;

    /// `"a,b,c,d"` for the rows `[[a, b], [c, d]]`.
    fn from_str(s: &str) -> Result<Self> {
        let [a, b, c, d] = parse_int_list::<4>(s, "symplectic map")?;
        Ok(Self::from_rows([[a, b], [c, d]]))
    }
}

/// `"11,23,47"`.
pub fn parse_prime_list(s: &str) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Err(TorusError::EmptyPrimeList);
    }
    s.split(',').map(|p| parse_int(p, "prime list")).collect()
}

/// How a command-line state is produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSpec {
    /// Number state `|n⟩`.
    Fock(i64),
    /// Phase state `|φ⟩_ℓ`.
    Phase(i64),
    U(i64),
    V(i64),
    /// Seeded complex-normal state.
    Random(u64),
    /// State JSON on disk.
    File(PathBuf),
}

impl FromStr for StateSpec {
    type Err = TorusError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').ok_or_else(|| parse_err(format!("state spec \"{s}\" has no ':'")))?;
        match kind {
            "fock" => Ok(Self::Fock(parse_int(arg, "fock index")?)),
            "phase" => Ok(Self::Phase(parse_int(arg, "phase index")?)),
            "u" => Ok(Self::U(parse_int(arg, "u index")?)),
            "v" => Ok(Self::V(parse_int(arg, "v index")?)),
            "random" => arg.trim().parse::<u64>().map(Self::Random).map_err(|_| parse_err(format!("random seed \"{arg}\" is not a u64"))),
            "file" if !arg.is_empty() => Ok(Self::File(PathBuf::from(arg))),
            _ => Err(parse_err(format!("unknown state spec \"{s}\""))),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fock(n) => write!(f, "fock:{n}"),
            Self::Phase(l) => write!(f, "phase:{l}"),
            Self::U(k) => write!(f, "u:{k}"),
            Self::V(l) => write!(f, "v:{l}"),
            Self::Random(s) => write!(f, "random:{s}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl StateSpec {
    /// The seed, for specs that draw random amplitudes.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Random(s) => Some(*s),
            _ => None,
        }
    }

    /// Builds the state at dimension `dim`. File states must match `dim`.
    pub fn resolve(&self, dim: Dimension) -> Result<StateVector> {
        match self {
            Self::Fock(n) => Ok(StateVector::basis_state(dim, BasisTag::Number, *n)),
            Self::Phase(l) => Ok(StateVector::basis_state(dim, BasisTag::Phase, *l)),
            Self::U(k) => Ok(StateVector::basis_state(dim, BasisTag::U, *k)),
            Self::V(l) => Ok(StateVector::basis_state(dim, BasisTag::V, *l)),
            Self::Random(seed) => Ok(random_state(dim, *seed)),
            Self::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| TorusError::Io(format!("{}: {e}", path.display())))?;
                let state = parse_state_json(&text)?;
                if state.dim() != dim {
                    return Err(TorusError::DimensionMismatch { expected: dim.d(), found: state.dim().d() });
                }
                state.normalized()
            }
        }
    }
}
