//! Command-line front end: bounds, verification, constructions, tensor
//! products and the worked-example demos.

mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use kbiframe::measure::DEFAULT_QUAD_NODES;
use kbiframe::opcalc::{
    apply_operator, canonical_k_dual, combine_product_chain, combine_sum, commuting_construct,
    perturb_positive, sandwich,
};
use kbiframe::{
    fixture_with, load, optimal_bounds, save, tensor_system, verify_bounds, BiframeSystem,
    BoundsReport, ConstructionResult, Error, Field, FixtureOptions, Manifest, Operator, SumTerm,
    C64, DEFAULT_TOL, FIXTURE_NAMES,
};
use serde_json::{json, Value};

use format::{json_num, num, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Demo name for the tensor product of the two factor fixtures.
const TENSOR_DEMO: &str = "example-5-3";

#[derive(Debug, Parser)]
#[command(
    name = "kbiframe",
    version,
    about = "Bounds and constructions for K-biframes"
)]
struct Cli {
    /// Numerical tolerance for PSD and rank decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Gauss–Legendre nodes used by interval fixtures.
    #[arg(long, global = true, default_value_t = DEFAULT_QUAD_NODES)]
    quad_nodes: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal bounds of a system.
    Bounds { file: PathBuf },
    /// Check a pair of bounds, by default the one claimed in the manifest.
    Verify {
        file: PathBuf,
        #[arg(long)]
        lower: Option<f64>,
        #[arg(long)]
        upper: Option<f64>,
    },
    /// Build a new system from an existing one and certify its bounds.
    Construct {
        file: PathBuf,
        #[arg(long, value_enum)]
        op: Op,
        /// Operator operand: `identity`, `target`, a JSON matrix literal or a
        /// path to a JSON matrix. Repeat for `sum` and `product`.
        #[arg(long = "operator", value_name = "OPERAND")]
        operators: Vec<String>,
        /// Coefficients of the `sum` terms, one per operator (default 1).
        #[arg(long = "coeff", allow_negative_numbers = true)]
        coeffs: Vec<f64>,
        /// Power `n` in `I + Tⁿ` for `perturb`.
        #[arg(long, default_value_t = 1)]
        power: u32,
        /// Output manifest; the certificate goes next to it.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Tensor product of two systems.
    Tensor {
        left: PathBuf,
        right: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a worked example against its claimed bounds.
    Demo { fixture: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Op {
    Apply,
    Dual,
    Sandwich,
    Perturb,
    Sum,
    Product,
    Commute,
}

/// Failure that ends a command with a given exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let mut ctx = Context { cli: &cli, out };
    match ctx.dispatch() {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

struct Context<'a> {
    cli: &'a Cli,
    out: &'a mut dyn Write,
}

impl Context<'_> {
    fn dispatch(&mut self) -> Outcome {
        if !(self.cli.tol > 0.0 && self.cli.tol.is_finite()) {
            return Err(usage("--tol must be positive and finite"));
        }
        if self.cli.quad_nodes == 0 {
            return Err(usage("--quad-nodes must be at least 1"));
        }
        match &self.cli.command {
            Command::Bounds { file } => self.bounds(file),
            Command::Verify { file, lower, upper } => self.verify(file, *lower, *upper),
            Command::Construct {
                file,
                op,
                operators,
                coeffs,
                power,
                output,
            } => self.construct(file, *op, operators, coeffs, *power, output),
            Command::Tensor {
                left,
                right,
                output,
            } => self.tensor(left, right, output),
            Command::Demo { fixture } => self.demo(fixture),
        }
    }

    fn emit_text(&mut self, text: &str) {
        let _ = writeln!(self.out, "{text}");
    }

    fn emit_json(&mut self, value: &Value) {
        let _ = writeln!(
            self.out,
            "{}",
            serde_json::to_string_pretty(value).expect("report serializes")
        );
    }

    fn json(&self) -> bool {
        self.cli.format == Format::Json
    }

    fn bounds(&mut self, file: &Path) -> Outcome {
        let m = read(file)?;
        let report = optimal_bounds(&m.system, self.cli.tol)?;
        let (text, value) = bounds_report(&m.system, &report, self.cli.tol);
        if self.json() {
            self.emit_json(&value);
        } else {
            self.emit_text(&text);
        }
        Ok(if report.valid { EXIT_OK } else { EXIT_FAILED })
    }

    fn verify(&mut self, file: &Path, lower: Option<f64>, upper: Option<f64>) -> Outcome {
        let m = read(file)?;
        let claim = m.claimed_bounds;
        let (a, b) = match (lower.or(claim.map(|c| c.0)), upper.or(claim.map(|c| c.1))) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(usage(
                    "no bounds to verify: pass --lower and --upper or add claimed_bounds",
                ))
            }
        };
        let (holds, text, value) = self.check_claim(&m.system, a, b)?;
        if self.json() {
            self.emit_json(&value);
        } else {
            self.emit_text(&text);
        }
        Ok(if holds { EXIT_OK } else { EXIT_FAILED })
    }

    fn check_claim(
        &self,
        sys: &BiframeSystem,
        a: f64,
        b: f64,
    ) -> Result<(bool, String, Value), Failure> {
        let tol = self.cli.tol;
        let verdict = verify_bounds(sys, a, b, tol)?;
        let field = sys.field();
        let witness = verdict
            .witness
            .as_deref()
            .and_then(|w| Witness::new(sys, w, tol));
        let mut text = format!(
            "{}: lower {} upper {}",
            if verdict.holds { "holds" } else { "fails" },
            num(a),
            num(b)
        );
        if let Some(side) = verdict.failed_side {
            text.push_str(&format!("\n{} bound violated", side.as_str()));
        }
        if let Some(w) = &witness {
            text.push('\n');
            text.push_str(&w.text(field));
        }
        let value = json!({
            "lower": a,
            "upper": b,
            "valid": verdict.holds,
            "failed_side": verdict.failed_side.map(|s| s.as_str()),
            "lower_margin": verdict.lower_margin,
            "upper_margin": verdict.upper_margin,
            "witness": witness.as_ref().map(|w| w.json(field)),
        });
        Ok((verdict.holds, text, value))
    }

    #[allow(clippy::too_many_arguments)]
    fn construct(
        &mut self,
        file: &Path,
        op: Op,
        operands: &[String],
        coeffs: &[f64],
        power: u32,
        output: &Path,
    ) -> Outcome {
        let tol = self.cli.tol;
        let m = read(file)?;
        let sys = &m.system;
        let ops = operands
            .iter()
            .map(|s| operand(s, sys))
            .collect::<Result<Vec<_>, _>>()?;
        let single = || match ops.as_slice() {
            [u] => Ok(u),
            _ => Err(usage(
                format!("--op {op:?} takes exactly one --operator").to_lowercase(),
            )),
        };
        let built = match op {
            Op::Apply => apply_operator(sys, single()?, tol),
            Op::Dual => canonical_k_dual(sys, single()?, tol),
            Op::Sandwich => sandwich(sys, single()?, tol),
            Op::Commute => commuting_construct(sys, single()?, tol),
            Op::Perturb => perturb_positive(sys, single()?, power, tol),
            Op::Product => {
                if ops.len() < 2 {
                    return Err(usage("--op product takes at least two --operator values"));
                }
                combine_product_chain(sys, &ops, tol)
            }
            Op::Sum => {
                if ops.is_empty() {
                    return Err(usage("--op sum takes at least one --operator"));
                }
                if !coeffs.is_empty() && coeffs.len() != ops.len() {
                    return Err(usage("give one --coeff per --operator, or none"));
                }
                let terms: Vec<SumTerm> = ops
                    .iter()
                    .enumerate()
                    .map(|(j, u)| SumTerm::new(coeffs.get(j).copied().unwrap_or(1.0), u.clone()))
                    .collect();
                combine_sum(sys, &terms, tol)
            }
        };
        let res = match built {
            Ok(res) => res,
            Err(e @ (Error::NotAKBiframe { .. } | Error::NotABiframe)) => {
                return Err(Failure {
                    code: EXIT_FAILED,
                    message: format!("input does not meet the construction's hypothesis: {e}"),
                })
            }
            Err(e) => return Err(e.into()),
        };
        let (dominates, text, value) = self.certificate(&res)?;
        let source = m.label.clone().unwrap_or_else(|| file_stem(file));
        let mut manifest =
            Manifest::new(res.system.clone()).with_label(format!("{} of {source}", res.rule));
        if let Some(a) = res.guaranteed_lower.filter(|a| *a > 0.0 && a.is_finite()) {
            if a <= res.guaranteed_upper && res.guaranteed_upper.is_finite() {
                manifest = manifest.with_claim(a, res.guaranteed_upper);
            }
        }
        save(&manifest, output)?;
        let cert_path = certificate_path(output);
        let cert_text =
            serde_json::to_string_pretty(&value).expect("certificate serializes") + "\n";
        std::fs::write(&cert_path, cert_text).map_err(Error::from)?;
        if self.json() {
            self.emit_json(&value);
        } else {
            self.emit_text(&format!(
                "{text}\nwrote {}\nwrote {}",
                output.display(),
                cert_path.display()
            ));
        }
        Ok(if dominates { EXIT_OK } else { EXIT_FAILED })
    }

    fn certificate(&self, res: &ConstructionResult) -> Result<(bool, String, Value), Failure> {
        let cert = res.certify(self.cli.tol)?;
        let r = &cert.report;
        let lower_text = |x: Option<f64>| x.map(num).unwrap_or_else(|| "none".into());
        let text = format!(
            "{}: {}\nrule {} ({:?} lower bound)\nguaranteed lower {} upper {}\ncertified  lower {} upper {}",
            if cert.dominates() { "PASS" } else { "FAIL" },
            if cert.dominates() {
                "certified bounds dominate the guarantee"
            } else {
                "guarantee not met"
            },
            res.rule,
            res.lower_strength,
            lower_text(res.guaranteed_lower),
            num(res.guaranteed_upper),
            lower_text(r.lower),
            num(r.upper),
        );
        let value = json!({
            "rule": res.rule.as_str(),
            "lower_strength": format!("{:?}", res.lower_strength).to_lowercase(),
            "guaranteed_lower": res.guaranteed_lower.map(json_num),
            "guaranteed_upper": json_num(res.guaranteed_upper),
            "lower": r.lower.map(json_num),
            "upper": r.upper,
            "valid": r.valid,
            "degenerate": r.degenerate,
            "lower_ok": cert.lower_ok,
            "upper_ok": cert.upper_ok,
            "dominates": cert.dominates(),
        });
        Ok((cert.dominates(), text, value))
    }

    fn tensor(&mut self, left: &Path, right: &Path, output: &Path) -> Outcome {
        let (l, r) = (read(left)?, read(right)?);
        let ts = tensor_system(&l.system, &r.system)?;
        let name = |m: &Manifest, p: &Path| m.label.clone().unwrap_or_else(|| file_stem(p));
        let label = format!("{} ⊗ {}", name(&l, left), name(&r, right));
        save(
            &Manifest::new(ts.combined.clone()).with_label(label),
            output,
        )?;
        let report = optimal_bounds(&ts.combined, self.cli.tol)?;
        let (text, mut value) = bounds_report(&ts.combined, &report, self.cli.tol);
        if self.json() {
            value["output"] = json!(output.display().to_string());
            value["dim"] = json!(ts.combined.dim());
            self.emit_json(&value);
        } else {
            self.emit_text(&format!(
                "dim {} with {} nodes\n{text}\nwrote {}",
                ts.combined.dim(),
                ts.combined.measure().len(),
                output.display()
            ));
        }
        Ok(EXIT_OK)
    }

    fn demo(&mut self, name: &str) -> Outcome {
        let opts = FixtureOptions {
            quad_nodes: self.cli.quad_nodes,
            ..Default::default()
        };
        let (system, claimed) = if name == TENSOR_DEMO {
            let left = fixture_with("example-5-3-left", &opts)?;
            let right = fixture_with("example-5-3-right", &opts)?;
            (
                tensor_system(&left.system, &right.system)?.combined,
                (1.0, 6.0),
            )
        } else {
            let fx = fixture_with(name, &opts).map_err(|e| match e {
                Error::UnknownFixture(_) => usage(format!(
                    "{e}; known: {}, {TENSOR_DEMO}",
                    FIXTURE_NAMES.join(", ")
                )),
                other => other.into(),
            })?;
            (fx.system, fx.claimed)
        };
        let (holds, claim_text, mut value) = self.check_claim(&system, claimed.0, claimed.1)?;
        let report = optimal_bounds(&system, self.cli.tol)?;
        if self.json() {
            value["fixture"] = json!(name);
            value["pass"] = json!(holds);
            value["optimal"] = json!({
                "lower": report.lower.map(json_num),
                "upper": report.upper,
                "valid": report.valid,
            });
            self.emit_json(&value);
        } else {
            let lower = report.lower.map(num).unwrap_or_else(|| "none".into());
            self.emit_text(&format!(
                "{}: {name}\nclaim {claim_text}\noptimal lower {lower} upper {}",
                if holds { "PASS" } else { "FAIL" },
                num(report.upper)
            ));
        }
        Ok(if holds { EXIT_OK } else { EXIT_FAILED })
    }
}

fn bounds_report(sys: &BiframeSystem, r: &BoundsReport, tol: f64) -> (String, Value) {
    let field = sys.field();
    let witness = r
        .witness_lower
        .as_deref()
        .or(r.witness_negative_form.as_deref())
        .and_then(|w| Witness::new(sys, w, tol));
    let lower = match r.lower {
        Some(a) if a.is_infinite() => "inf (K = 0)".to_string(),
        Some(a) => num(a),
        None => "none".to_string(),
    };
    let mut text = format!(
        "{}\nlower {lower}\nupper {}",
        if r.valid { "valid" } else { "not a K-biframe" },
        num(r.upper)
    );
    if let Some(w) = &witness {
        text.push('\n');
        text.push_str(&w.text(field));
    }
    let value = json!({
        "lower": r.lower.map(json_num),
        "upper": r.upper,
        "valid": r.valid,
        "degenerate": r.degenerate,
        "min_form_eigenvalue": r.min_form_eigenvalue,
        "asymmetry": r.asymmetry,
        "witness": witness.as_ref().map(|w| w.json(field)),
    });
    (text, value)
}

fn read(path: &Path) -> Result<Manifest, Failure> {
    load(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn file_stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}

/// `out.json` → `out.certificate.json`.
fn certificate_path(output: &Path) -> PathBuf {
    output.with_file_name(format!("{}.certificate.json", file_stem(output)))
}

/// Resolves an operator operand against the system it acts on.
fn operand(given: &str, sys: &BiframeSystem) -> Result<Operator, Failure> {
    let n = sys.dim();
    match given {
        "identity" => return Ok(Operator::identity(n, sys.field())),
        "target" => return Ok(sys.k().clone()),
        _ => {}
    }
    let text = if given.trim_start().starts_with('[') {
        given.to_string()
    } else {
        std::fs::read_to_string(given).map_err(|e| usage(format!("operand {given}: {e}")))?
    };
    let value: Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("operand {given}: {e}")))?;
    let bad = || {
        usage(format!(
            "operand {given}: expected {n} rows of {n} numbers or [re, im] pairs"
        ))
    };
    let rows = value.as_array().ok_or_else(bad)?;
    if rows.len() != n {
        return Err(bad());
    }
    let mut complex = false;
    let mut parsed = Vec::with_capacity(n);
    for row in rows {
        let row = row.as_array().filter(|r| r.len() == n).ok_or_else(bad)?;
        let mut out = Vec::with_capacity(n);
        for entry in row {
            let z = match entry {
                Value::Number(x) => C64::new(x.as_f64().ok_or_else(bad)?, 0.0),
                Value::Array(pair) if pair.len() == 2 => {
                    complex = true;
                    let re = pair[0].as_f64().ok_or_else(bad)?;
                    let im = pair[1].as_f64().ok_or_else(bad)?;
                    C64::new(re, im)
                }
                _ => return Err(bad()),
            };
            out.push(z);
        }
        parsed.push(out);
    }
    if complex && sys.field() == Field::Real {
        return Err(usage(format!(
            "operand {given}: complex entries for a real system"
        )));
    }
    Ok(Operator::from_rows(sys.field(), &parsed))
}
