//! Command-line driver: parses a request, dispatches to the library, and
//! renders a deterministic JSON report.

use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::azumaya::azumaya_report;
use crate::cohomology::{group_cohomology, koszul_cochain_complex, ZrModule};
use crate::elliptic::{verdict_ba, CurveField, CurveHandle};
use crate::gln::{parse_det_element, recognize_phi_image, GlnError, MAX_SIZE};
use crate::group_ring::parse_base_ring;
use crate::linalg::{smith_normal_form, FgAbGroup, IntMatrix, Presentation};
use crate::torus::{bottom_row_cohomology, gln_bottom_row, BottomRowReport, UnitsComplexSpec};
use crate::verdict::{evaluate, replay, Conclusion, VerdictRequest};

pub const REPORT_SCHEMA: &str = "brauer-report/1";
pub const INPUT_SCHEMA: &str = "brauer-input/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_PARSE_ERROR: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(name = "brauer", version, about = "Exact Brauer-group computations for classifying stacks")]
pub struct RunRequest {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Smith normal form of an integer matrix.
    Snf(SnfArgs),
    /// Cohomology of Z^r with coefficients in a module, via the Koszul complex.
    GroupCohomology(InputArgs),
    /// Bottom row of the descent spectral sequence for the units of a split torus.
    TorusComplex(TorusArgs),
    /// Bottom row for BGL_n, pulled back along the determinant.
    GlnBottomRow(GlnRowArgs),
    /// Gluing identity and cocycle class for the cyclic Azumaya construction.
    Azumaya(AzumayaArgs),
    /// Recognize a unit of the determinant ring as a * det^m.
    GlnUnits(GlnUnitsArgs),
    /// Torsion of an elliptic curve and the Brauer verdict for its classifying stack.
    Elliptic(EllipticArgs),
    /// Run the verdict engine on a stack descriptor and base invariants.
    Verdict(InputArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// JSON input file, or `-` for standard input.
    #[arg(long)]
    pub input: String,
}

#[derive(Args, Debug, Clone)]
pub struct SnfArgs {
    /// Matrix as JSON, e.g. `[[2,4],[6,8]]`.
    #[arg(long, conflicts_with = "input")]
    pub matrix: Option<String>,
    /// JSON file holding the matrix, or `-` for standard input.
    #[arg(long)]
    pub input: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct TorusArgs {
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = 4)]
    pub max_degree: usize,
    /// Units of the base, e.g. `Z/2`.
    #[arg(long, default_value = "0")]
    pub units: String,
    /// Include the full differential matrices.
    #[arg(long)]
    pub audit: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GlnRowArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub max_degree: usize,
    #[arg(long, default_value = "0")]
    pub units: String,
    #[arg(long)]
    pub audit: bool,
}

#[derive(Args, Debug, Clone)]
pub struct AzumayaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub charts: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GlnUnitsArgs {
    /// Base ring: `Z`, `Z/6`, `F5`, `Z[a]/(a^2)`, ...
    #[arg(long)]
    pub base: String,
    #[arg(long)]
    pub n: usize,
    /// The unit, as `NUMERATOR / det^k` in the variables X11..Xnn.
    #[arg(long)]
    pub w: String,
    /// Its claimed inverse.
    #[arg(long = "w-inv")]
    pub w_inv: String,
}

#[derive(Args, Debug, Clone)]
pub struct EllipticArgs {
    /// A prime `p`, or `Q` for the rationals.
    #[arg(long)]
    pub field: String,
    #[arg(long, allow_hyphen_values = true)]
    pub a: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: i64,
}

struct Failure {
    code: i32,
    message: String,
}

fn parse_error(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_PARSE_ERROR,
        message: message.to_string(),
    }
}

/// A subcommand result: exit code, anchors of what was exercised, report body.
struct Outcome {
    code: i32,
    anchors: Vec<&'static str>,
    body: Value,
}

fn ok(anchors: Vec<&'static str>, body: Value) -> Outcome {
    Outcome {
        code: EXIT_OK,
        anchors,
        body,
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| parse_error(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| parse_error(format!("reading {path}: {e}")))
    }
}

/// Parses a JSON object, checking and removing an optional `schema` field.
fn parse_document<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Failure> {
    let mut v: Value = serde_json::from_str(text).map_err(parse_error)?;
    if let Some(obj) = v.as_object_mut() {
        if let Some(schema) = obj.remove("schema") {
            if schema != INPUT_SCHEMA {
                return Err(parse_error(format!("unsupported input schema {schema}")));
            }
        }
    }
    serde_json::from_value(v).map_err(parse_error)
}

fn snf(args: &SnfArgs) -> Result<Outcome, Failure> {
    let text = match (&args.matrix, &args.input) {
        (Some(m), _) => m.clone(),
        (None, Some(path)) => read_input(path)?,
        (None, None) => return Err(parse_error("snf needs --matrix or --input")),
    };
    let m: IntMatrix = serde_json::from_str(&text).map_err(parse_error)?;
    let f = smith_normal_form(&m);
    let group = crate::linalg::group_invariants(m.cols(), &m);
    let check = f.u.mul(&m).and_then(|um| um.mul(&f.v)).map(|x| x == f.s).unwrap_or(false);
    let unimodular = |x: &IntMatrix| x.determinant().map(|d| d == BigInt::from(1) || d == BigInt::from(-1)).unwrap_or(false);
    let verified = check && unimodular(&f.u) && unimodular(&f.v);
    Ok(Outcome {
        code: if verified { EXIT_OK } else { EXIT_VERIFICATION_FAILED },
        anchors: vec!["Smith normal form", "invariant factors of a finitely generated abelian group"],
        body: json!({
            "input": m,
            "smith_form": f,
            "diagonal": f.diagonal().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "cokernel": group,
            "u_m_v_equals_s": check,
            "unimodular": unimodular(&f.u) && unimodular(&f.v),
        }),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleInput {
    group: Option<FgAbGroup>,
    generators: Option<usize>,
    #[serde(default)]
    relations: Option<IntMatrix>,
    actions: Vec<IntMatrix>,
}

fn group_cohomology_cmd(args: &InputArgs) -> Result<Outcome, Failure> {
    let input: ModuleInput = parse_document(&read_input(&args.input)?)?;
    let underlying = match (input.group, input.generators) {
        (Some(g), None) => g.presentation(),
        (None, Some(n)) => {
            let rel = input.relations.unwrap_or_else(|| IntMatrix::zeros(0, n));
            let rel = if rel.rows() == 0 { IntMatrix::zeros(0, n) } else { rel };
            Presentation::new(n, rel).map_err(parse_error)?
        }
        _ => return Err(parse_error("give exactly one of `group` or `generators`")),
    };
    let module = ZrModule::new(underlying, input.actions).map_err(parse_error)?;
    let complex = koszul_cochain_complex(&module).map_err(parse_error)?;
    let h = group_cohomology(&module).map_err(parse_error)?;
    let d_squared_zero = complex
        .differentials()
        .windows(2)
        .all(|w| w[0].then(&w[1]).map(|c| c.is_zero()).unwrap_or(false));
    Ok(Outcome {
        code: if d_squared_zero { EXIT_OK } else { EXIT_VERIFICATION_FAILED },
        anchors: vec!["Koszul resolution of Z over the group ring of Z^r"],
        body: json!({
            "lattice_rank": module.lattice_rank(),
            "module": module.underlying().invariants(),
            "differentials": complex.differentials().iter().map(|d| d.matrix().clone()).collect::<Vec<_>>(),
            "d_squared_zero": d_squared_zero,
            "cohomology": h,
        }),
    })
}

fn parse_group(s: &str) -> Result<FgAbGroup, Failure> {
    s.parse().map_err(parse_error)
}

fn bottom_row_outcome(report: BottomRowReport, audit: bool) -> Outcome {
    let verified = report.compositions_vanish && report.blocks_separate && report.closed_form_checks.iter().all(|c| c.matches);
    let mut body = to_value(&report);
    if !audit {
        if let Some(degrees) = body.get_mut("degrees").and_then(Value::as_array_mut) {
            for d in degrees {
                if let Some(obj) = d.as_object_mut() {
                    obj.remove("differential");
                }
            }
        }
    }
    Outcome {
        code: if verified { EXIT_OK } else { EXIT_VERIFICATION_FAILED },
        anchors: vec![
            "Cech nerve of the trivial torsor",
            "units on X x T^p",
            "alternating sum of coface maps",
        ],
        body,
    }
}

fn torus_complex(args: &TorusArgs) -> Result<Outcome, Failure> {
    let spec = UnitsComplexSpec::new(parse_group(&args.units)?, FgAbGroup::free(args.rank), args.max_degree)
        .map_err(parse_error)?;
    let report = bottom_row_cohomology(&spec).map_err(parse_error)?;
    Ok(bottom_row_outcome(report, args.audit))
}

fn gln_row(args: &GlnRowArgs) -> Result<Outcome, Failure> {
    let report = gln_bottom_row(args.n, args.max_degree, parse_group(&args.units)?).map_err(parse_error)?;
    let mut out = bottom_row_outcome(report, args.audit);
    out.anchors.push("characters of GL_n are powers of det");
    Ok(out)
}

fn azumaya(args: &AzumayaArgs) -> Result<Outcome, Failure> {
    let report = azumaya_report(args.n, args.charts).map_err(parse_error)?;
    let verified = report.identity.valid_orientation.is_some()
        && report.coboundary.iter().all(|c| c.equals_transition)
        && report.torsion.iter().all(|t| t.n_torsion)
        && report.triple_overlaps.iter().all(|t| t.consistent);
    Ok(Outcome {
        code: if verified { EXIT_OK } else { EXIT_VERIFICATION_FAILED },
        anchors: vec!["cyclic algebra gluing from an n-torsion line bundle", "coboundary of the gluing matrices"],
        body: to_value(&report),
    })
}

fn gln_units(args: &GlnUnitsArgs) -> Result<Outcome, Failure> {
    if args.n == 0 || args.n > MAX_SIZE {
        return Err(parse_error(GlnError::SizeBound(args.n)));
    }
    let base = parse_base_ring(&args.base).map_err(parse_error)?;
    let w = parse_det_element(&base, args.n, &args.w).map_err(parse_error)?;
    let w_inv = parse_det_element(&base, args.n, &args.w_inv).map_err(parse_error)?;
    let anchors = vec!["units of the determinant ring", "phi: A^x x Z -> units, (a, m) -> a det^m"];
    match recognize_phi_image(&w, &w_inv) {
        Ok(r) => Ok(ok(
            anchors,
            json!({
                "base": base.to_string(),
                "n": args.n,
                "w": w.to_string(),
                "w_inv": w_inv.to_string(),
                "recognition": r,
            }),
        )),
        Err(GlnError::NotAUnit(prod)) => Ok(Outcome {
            code: EXIT_VERIFICATION_FAILED,
            anchors,
            body: json!({
                "base": base.to_string(),
                "n": args.n,
                "w": w.to_string(),
                "w_inv": w_inv.to_string(),
                "product": prod,
                "error": "w * w_inv is not 1",
            }),
        }),
        Err(e) => Err(parse_error(e)),
    }
}

fn elliptic(args: &EllipticArgs) -> Result<Outcome, Failure> {
    let field = match args.field.trim() {
        "Q" | "q" => CurveField::Rationals,
        p => CurveField::Prime(p.parse().map_err(|_| parse_error(format!("field must be a prime or Q, got {p:?}")))?),
    };
    let handle = CurveHandle {
        field,
        a: args.a,
        b: args.b,
    };
    let v = verdict_ba(&handle).map_err(parse_error)?;
    let certified = v.torsion.structure.certified && v.torsion.hasse_bound_holds != Some(false);
    Ok(Outcome {
        code: if certified { EXIT_OK } else { EXIT_VERIFICATION_FAILED },
        anchors: vec!["abelian varieties over a field", "Pic0(E)(k) = E(k)"],
        body: json!({ "curve": handle, "verdict": v }),
    })
}

fn verdict(args: &InputArgs) -> Result<Outcome, Failure> {
    let req: VerdictRequest = parse_document(&read_input(&args.input)?)?;
    let v = evaluate(&req.stack, &req.base).map_err(parse_error)?;
    let replayed = replay(&req.stack, &req.base, &v).is_ok();
    let mut anchors: Vec<&'static str> = Vec::new();
    for step in &v.trace {
        let a = crate::verdict::rule_info(step.rule).anchor;
        if !anchors.contains(&a) {
            anchors.push(a);
        }
    }
    let code = if !replayed {
        EXIT_VERIFICATION_FAILED
    } else if v.conclusion == Conclusion::Unknown {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        code,
        anchors,
        body: json!({ "request": req, "verdict": v, "replay_matches": replayed }),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Snf(_) => "snf",
        Command::GroupCohomology(_) => "group-cohomology",
        Command::TorusComplex(_) => "torus-complex",
        Command::GlnBottomRow(_) => "gln-bottom-row",
        Command::Azumaya(_) => "azumaya",
        Command::GlnUnits(_) => "gln-units",
        Command::Elliptic(_) => "elliptic",
        Command::Verdict(_) => "verdict",
    }
}

fn status(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_VERIFICATION_FAILED => "verification_failed",
        EXIT_PARSE_ERROR => "parse_error",
        _ => "unknown",
    }
}

/// Runs one request, returning the exit code and the rendered report.
pub fn run(request: &RunRequest) -> (i32, String) {
    let result = match &request.command {
        Command::Snf(a) => snf(a),
        Command::GroupCohomology(a) => group_cohomology_cmd(a),
        Command::TorusComplex(a) => torus_complex(a),
        Command::GlnBottomRow(a) => gln_row(a),
        Command::Azumaya(a) => azumaya(a),
        Command::GlnUnits(a) => gln_units(a),
        Command::Elliptic(a) => elliptic(a),
        Command::Verdict(a) => verdict(a),
    };
    let name = command_name(&request.command);
    let (code, doc) = match result {
        Ok(o) => (
            o.code,
            json!({
                "schema": REPORT_SCHEMA,
                "subcommand": name,
                "status": status(o.code),
                "anchors": o.anchors,
                "report": o.body,
            }),
        ),
        Err(f) => (
            f.code,
            json!({
                "schema": REPORT_SCHEMA,
                "subcommand": name,
                "status": status(f.code),
                "error": f.message,
            }),
        ),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    (code, text)
}

/// Parses `args` (program name first) and runs; argument errors exit with 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let request = match RunRequest::try_parse_from(args) {
        Ok(r) => r,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (code, text) = run(&request);
    match &request.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_PARSE_ERROR;
            }
        }
        None => print!("{text}"),
    }
    code
}
