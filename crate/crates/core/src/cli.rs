//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 theorem precondition not
//! met, 4 numerical failure. CSV numbers are printed with 17 significant
//! digits, LF line endings, one header row.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{orbit_norm_kernel_closed, orbit_norms, KernelElement, DEFAULT_ORBIT_CAP};
use crate::laguerre::{
    build_matrix, norm_estimate, spectrum_estimate, LaguerreBasis, DEFAULT_BASIS_SIZE,
    DEFAULT_SCALE,
};
use crate::symbol::AffineSymbol;
use crate::verdicts::{report, DynamicsReport, SpectrumDescriptor, Verdict};
use crate::witness::{non_shadowing_witness, random_pseudo_orbit, shadow_construct};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hardy-dynamics", version, about = "Dynamics of affine composition operators on H²(C₊)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full dynamical report for one symbol.
    Classify {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kernel orbit norms, Gram computation against the closed form.
    Orbit {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        pole: PoleArgs,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pseudo-orbit experiments: random δ-pseudo-orbits (with the shadowing
    /// bound when a > 1) or, with --witness, the fixed-point construction.
    Pseudo {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        pole: PoleArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Shadowing tolerance; defaults to the smallest one admitting delta.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncation eigenvalues next to the closed-form spectrum.
    Spectrum {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long, default_value_t = DEFAULT_BASIS_SIZE)]
        basis_size: usize,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        laguerre_scale: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reports over a mesh of comma-separated parameter lists.
    Grid {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
        b_re: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
        b_im: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SymbolArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    b_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    b_im: f64,
}

impl SymbolArgs {
    fn symbol(&self) -> Result<AffineSymbol> {
        AffineSymbol::from_parts(self.a, self.b_re, self.b_im)
    }
}

#[derive(Debug, Args)]
struct PoleArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    w_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    w_im: f64,
}

impl PoleArgs {
    fn pole(&self) -> Complex64 {
        Complex64::new(self.w_re, self.w_im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// `(a, Re b, Im b)` as entered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolParams {
    pub a: f64,
    pub b_re: f64,
    pub b_im: f64,
}

impl From<&AffineSymbol> for SymbolParams {
    fn from(phi: &AffineSymbol) -> Self {
        Self { a: phi.a(), b_re: phi.b().re, b_im: phi.b().im }
    }
}

/// Versioned, serializable [`DynamicsReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub symbol: SymbolParams,
    pub report: DynamicsReport,
}

impl ReportDocument {
    pub fn new(phi: &AffineSymbol) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_owned(),
            symbol: phi.into(),
            report: report(phi),
        }
    }
}

#[derive(Debug, Serialize)]
struct OrbitRow {
    n: usize,
    norm_gram: f64,
    norm_closed: f64,
    abs_diff: f64,
}

#[derive(Debug, Serialize)]
struct OrbitDocument {
    schema_version: &'static str,
    symbol: SymbolParams,
    w_re: f64,
    w_im: f64,
    rows: Vec<OrbitRow>,
}

#[derive(Debug, Serialize)]
struct PseudoRow {
    n: usize,
    deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_point_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_point_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shadow_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PseudoDocument {
    schema_version: &'static str,
    symbol: SymbolParams,
    mode: &'static str,
    delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_point: Option<[f64; 2]>,
    rows: Vec<PseudoRow>,
}

#[derive(Debug, Serialize)]
struct EigenRow {
    index: usize,
    re: f64,
    im: f64,
    modulus: f64,
}

#[derive(Debug, Serialize)]
struct SpectrumDocument {
    schema_version: &'static str,
    symbol: SymbolParams,
    descriptor: SpectrumDescriptor,
    basis_size: usize,
    laguerre_scale: f64,
    norm_estimate: f64,
    label: &'static str,
    eigenvalues: Vec<EigenRow>,
}

const EIGEN_LABEL: &str = "truncation eigenvalues";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn classify_csv(doc: &ReportDocument) -> String {
    let r = &doc.report;
    let mut s = String::from("field,value,provenance,note\n");
    let mut plain = |k: &str, v: String| {
        let _ = writeln!(s, "{k},{},,", csv_field(&v));
    };
    plain("schema_version", doc.schema_version.clone());
    plain("a", num(doc.symbol.a));
    plain("b_re", num(doc.symbol.b_re));
    plain("b_im", num(doc.symbol.b_im));
    plain("class", r.class.name().to_owned());
    plain("operator_norm", num(r.operator_norm));
    plain("invertible", r.invertible.to_string());
    plain("normal", r.normal.to_string());
    plain("self_adjoint", r.self_adjoint.to_string());
    plain("unitary", r.unitary.to_string());
    let verdicts: [(&str, &Verdict); 6] = [
        ("positively_expansive", &r.positively_expansive),
        ("uniformly_positively_expansive", &r.uniformly_positively_expansive),
        ("expansive", &r.expansive),
        ("uniformly_expansive", &r.uniformly_expansive),
        ("positive_shadowing", &r.positive_shadowing),
        ("li_yorke", &r.li_yorke),
    ];
    for (k, v) in verdicts {
        let _ = writeln!(
            s,
            "{k},{},{},{}",
            v.value,
            csv_field(&v.provenance),
            csv_field(&v.note)
        );
    }
    let _ = writeln!(s, "spectrum,{},,", csv_field(&r.spectrum.to_string()));
    s
}

fn cmd_classify(symbol: &SymbolArgs, format: Format) -> Result<String> {
    let doc = ReportDocument::new(&symbol.symbol()?);
    match format {
        Format::Json => json(&doc),
        Format::Csv => Ok(classify_csv(&doc)),
    }
}

fn cmd_orbit(symbol: &SymbolArgs, pole: &PoleArgs, n: usize, format: Format) -> Result<String> {
    let phi = symbol.symbol()?;
    let w = pole.pole();
    if n > DEFAULT_ORBIT_CAP {
        return Err(Error::InvalidInput(format!("n = {n} exceeds cap {DEFAULT_ORBIT_CAP}")));
    }
    let k = KernelElement::kernel(w)?;
    let gram = orbit_norms(&phi, &k, n)?;
    let mut rows = Vec::with_capacity(n + 1);
    for (i, g) in gram.into_iter().enumerate() {
        let closed = orbit_norm_kernel_closed(&phi, w, i as u32)?;
        if !g.is_finite() || !closed.is_finite() {
            return Err(Error::Numerical(format!("orbit norm overflowed at n = {i}")));
        }
        rows.push(OrbitRow { n: i, norm_gram: g, norm_closed: closed, abs_diff: (g - closed).abs() });
    }
    match format {
        Format::Json => json(&OrbitDocument {
            schema_version: SCHEMA_VERSION,
            symbol: (&phi).into(),
            w_re: w.re,
            w_im: w.im,
            rows,
        }),
        Format::Csv => {
            let mut s = String::from("n,norm_gram,norm_closed,abs_diff\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{},{}", r.n, num(r.norm_gram), num(r.norm_closed), num(r.abs_diff));
            }
            Ok(s)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_pseudo(
    symbol: &SymbolArgs,
    pole: &PoleArgs,
    delta: f64,
    n: usize,
    seed: u64,
    epsilon: Option<f64>,
    witness: bool,
    format: Format,
) -> Result<String> {
    let phi = symbol.symbol()?;
    let (mode, fixed_point, rows) = if witness {
        let w = non_shadowing_witness(&phi, None, delta, n)?;
        let deviations = w.orbit.deviations(&phi)?;
        let values = w.fixed_point_values()?;
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, v)| PseudoRow {
                n: i,
                deviation: if i == 0 { 0.0 } else { deviations[i - 1] },
                fixed_point_re: Some(v.re),
                fixed_point_im: Some(v.im),
                shadow_error: None,
                bound: None,
            })
            .collect::<Vec<_>>();
        ("witness", Some([w.fixed_point.re, w.fixed_point.im]), rows)
    } else {
        let f0 = KernelElement::kernel(pole.pole())?;
        let orbit = random_pseudo_orbit(&phi, &f0, delta, n, seed)?;
        let deviations = orbit.deviations(&phi)?;
        let shadow = if phi.a() > 1.0 {
            let p = phi.a().sqrt().recip();
            let eps = epsilon.unwrap_or(2.0 * delta / (1.0 - p));
            let eps = if eps > 0.0 { eps } else { f64::MIN_POSITIVE };
            let construction = shadow_construct(&phi, &orbit, eps)?;
            let errors = orbit.distances_to_orbit(&phi, &construction.seed)?;
            Some((errors, construction.bound))
        } else {
            None
        };
        let rows = (0..=n)
            .map(|i| PseudoRow {
                n: i,
                deviation: if i == 0 { 0.0 } else { deviations[i - 1] },
                fixed_point_re: None,
                fixed_point_im: None,
                shadow_error: shadow.as_ref().map(|(e, _)| e[i]),
                bound: shadow.as_ref().map(|(_, b)| *b),
            })
            .collect::<Vec<_>>();
        (if shadow.is_some() { "shadow" } else { "random" }, None, rows)
    };
    match format {
        Format::Json => json(&PseudoDocument {
            schema_version: SCHEMA_VERSION,
            symbol: (&phi).into(),
            mode,
            delta,
            fixed_point,
            rows,
        }),
        Format::Csv => {
            let mut s = String::from("n,deviation");
            if fixed_point.is_some() {
                s.push_str(",fixed_point_re,fixed_point_im");
            }
            if mode == "shadow" {
                s.push_str(",shadow_error,bound");
            }
            s.push('\n');
            for r in rows {
                let _ = write!(s, "{},{}", r.n, num(r.deviation));
                for x in [r.fixed_point_re, r.fixed_point_im, r.shadow_error, r.bound].into_iter().flatten() {
                    let _ = write!(s, ",{}", num(x));
                }
                s.push('\n');
            }
            Ok(s)
        }
    }
}

fn cmd_spectrum(symbol: &SymbolArgs, size: usize, scale: f64, format: Format) -> Result<String> {
    let phi = symbol.symbol()?;
    let basis = LaguerreBasis::new(scale, size)?;
    let op = build_matrix(&phi, &basis)?;
    let norm = norm_estimate(&op);
    if !norm.converged {
        return Err(Error::Numerical("norm estimate did not converge".into()));
    }
    let ev = spectrum_estimate(&op)?;
    let descriptor = report(&phi).spectrum;
    let rows: Vec<EigenRow> = ev
        .iter()
        .enumerate()
        .map(|(index, z)| EigenRow { index, re: z.re, im: z.im, modulus: z.norm() })
        .collect();
    match format {
        Format::Json => json(&SpectrumDocument {
            schema_version: SCHEMA_VERSION,
            symbol: (&phi).into(),
            descriptor,
            basis_size: size,
            laguerre_scale: scale,
            norm_estimate: norm.value,
            label: EIGEN_LABEL,
            eigenvalues: rows,
        }),
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# descriptor: {descriptor}");
            let _ = writeln!(s, "# norm_estimate: {}", num(norm.value));
            let _ = writeln!(s, "# {EIGEN_LABEL}: basis_size={size} laguerre_scale={}", num(scale));
            s.push_str("index,re,im,modulus\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{},{}", r.index, num(r.re), num(r.im), num(r.modulus));
            }
            Ok(s)
        }
    }
}

fn cmd_grid(a: &[f64], b_re: &[f64], b_im: &[f64], format: Format) -> Result<String> {
    let mut symbols = Vec::with_capacity(a.len() * b_re.len() * b_im.len());
    for &x in a {
        for &y in b_re {
            for &z in b_im {
                symbols.push(AffineSymbol::from_parts(x, y, z)?);
            }
        }
    }
    let docs: Vec<ReportDocument> = symbols.par_iter().map(ReportDocument::new).collect();
    match format {
        Format::Json => json(&docs),
        Format::Csv => {
            let mut s = String::from(
                "a,b_re,b_im,class,operator_norm,invertible,normal,self_adjoint,unitary,\
                 positively_expansive,uniformly_positively_expansive,expansive,\
                 uniformly_expansive,positive_shadowing,li_yorke,spectrum\n",
            );
            for d in docs {
                let r = &d.report;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    num(d.symbol.a),
                    num(d.symbol.b_re),
                    num(d.symbol.b_im),
                    r.class,
                    num(r.operator_norm),
                    r.invertible,
                    r.normal,
                    r.self_adjoint,
                    r.unitary,
                    r.positively_expansive.value,
                    r.uniformly_positively_expansive.value,
                    r.expansive.value,
                    r.uniformly_expansive.value,
                    r.positive_shadowing.value,
                    r.li_yorke.value,
                    csv_field(&r.spectrum.to_string()),
                );
            }
            Ok(s)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::TooManyTerms { .. } => EXIT_INVALID,
        Error::Precondition { .. } => EXIT_PRECONDITION,
        Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

fn execute(command: &Command) -> (Result<String>, Option<&PathBuf>) {
    match command {
        Command::Classify { symbol, format, out } => (cmd_classify(symbol, *format), out.as_ref()),
        Command::Orbit { symbol, pole, n, format, out } => {
            (cmd_orbit(symbol, pole, *n, *format), out.as_ref())
        }
        Command::Pseudo { symbol, pole, delta, n, seed, epsilon, witness, format, out } => (
            cmd_pseudo(symbol, pole, *delta, *n, *seed, *epsilon, *witness, *format),
            out.as_ref(),
        ),
        Command::Spectrum { symbol, basis_size, laguerre_scale, format, out } => {
            (cmd_spectrum(symbol, *basis_size, *laguerre_scale, *format), out.as_ref())
        }
        Command::Grid { a, b_re, b_im, format, out } => {
            (cmd_grid(a, b_re, b_im, *format), out.as_ref())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_INVALID
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let (result, out) = execute(&cli.command);
    match result {
        Ok(text) => {
            let written = match out {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => stdout.write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "error: cannot write output: {e}");
                    EXIT_INVALID
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("hardy-dynamics").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_json_has_expected_verdicts() {
        let (code, out, _) = call(&["classify", "--a", "0.5", "--b-re", "1", "--b-im", "1"]);
        assert_eq!(code, 0);
        let doc: ReportDocument = serde_json::from_str(&out).unwrap();
        assert_eq!(doc.schema_version, "1");
        assert_eq!(doc.report.positively_expansive.value, crate::VerdictValue::Yes);
        assert_eq!(doc.report.positive_shadowing.value, crate::VerdictValue::No);
        assert_eq!(doc.report.positive_shadowing.provenance, "S.2");
    }

    #[test]
    fn classify_csv_lists_every_field() {
        let (code, out, _) = call(&["classify", "--a", "1", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.contains("class,Identity,,\n"));
        assert!(out.contains("spectrum,Singleton1,,\n"));
        assert_eq!(out.lines().count(), 18);
    }

    #[test]
    fn orbit_last_row() {
        let (code, out, _) = call(&["orbit", "--a", "1", "--b-re", "1", "--w-re", "0.5", "--n", "4"]);
        assert_eq!(code, 0);
        let last: Vec<f64> = out.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(last[0], 4.0);
        assert!((last[1] - 1.0 / 3.0).abs() < 1e-15 && (last[2] - 1.0 / 3.0).abs() < 1e-15);

        let (_, out, _) = call(&["orbit", "--a", "2", "--w-re", "0.5", "--n", "0"]);
        assert_eq!(out.lines().count(), 2);
    }

    #[test]
    fn pseudo_modes() {
        let (code, out, _) = call(&["pseudo", "--a", "0.5", "--b-re", "1", "--delta", "1", "--n", "10", "--witness"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("n,deviation,fixed_point_re,fixed_point_im\n"));

        let (code, out, _) = call(&["pseudo", "--a", "4", "--b-re", "1", "--delta", "0", "--n", "5"]);
        assert_eq!(code, 0);
        for line in out.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(cols[2], 0.0);
        }

        let (code, _, err) = call(&["pseudo", "--a", "1", "--b-re", "1", "--delta", "1", "--witness"]);
        assert_eq!(code, 3);
        assert!(err.contains("Prop 4.1 precondition"), "{err}");
    }

    #[test]
    fn spectrum_identity() {
        let (code, out, _) = call(&["spectrum", "--a", "1", "--basis-size", "8"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# descriptor: Singleton1\n"));
        for line in out.lines().skip(4) {
            let cols: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert!((cols[1] - 1.0).abs() < 1e-8 && cols[2].abs() < 1e-8);
        }
    }

    #[test]
    fn grid_rows() {
        let (code, out, _) = call(&["grid", "--a", "0.5,1,2", "--b-re", "0,1", "--b-im", "0"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 7);
        let (code, _, _) = call(&["grid", "--a", "0.5,-1"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn invalid_inputs_exit_two() {
        assert_eq!(call(&["classify", "--a", "0", "--b-re", "1"]).0, 2);
        assert_eq!(call(&["classify", "--a", "1", "--b-re", "-1"]).0, 2);
        assert_eq!(call(&["classify", "--a", "abc"]).0, 2);
        assert_eq!(call(&["orbit", "--a", "1", "--w-re", "0"]).0, 2);
        assert_eq!(call(&["spectrum", "--a", "1", "--basis-size", "257"]).0, 2);
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }
}
