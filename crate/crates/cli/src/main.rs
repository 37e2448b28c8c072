//! `evenlat`: command-line front end. Exit codes: 0 success, 1 verification mismatch,
//! 2 usage error or unreadable input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use evenlat::genus::genus_symbol;
use evenlat::lattice::{int_matrix_from_json, int_matrix_to_json, Sublattice};
use evenlat::moduli::{
    discriminant_images, double_coset_count, isometry_group, oq_group, strong_component_count, ISOMETRY_BUDGET,
    OQ_BUDGET,
};
use evenlat::niemeier::{
    build_niemeier, golay_involution, marking_on, marking_orbits, niemeier_spec, verify_niemeier, MarkingInput,
    MarkingResult,
};
use evenlat::rootsys::{root_system, vectors_of_norm_budget, ENUMERATION_BUDGET};
use evenlat::tables::{run_suite, Status, SUITES};
use evenlat::{Error, IntMatrix, Lattice, Matrix};

#[derive(Parser)]
#[command(name = "evenlat", version, about = "Exact computations with even lattices")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Ceiling for vector and group enumerations.
    #[arg(long, global = true, value_name = "N")]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus symbol of a lattice.
    Genus { lattice: PathBuf },
    /// Discriminant group and quadratic form.
    Discform { lattice: PathBuf },
    /// Root system of a definite lattice.
    Roots { lattice: PathBuf },
    /// Number of vectors of a given norm in a definite lattice.
    Count {
        lattice: PathBuf,
        #[arg(allow_negative_numbers = true)]
        norm: i64,
        /// Also print the vectors.
        #[arg(long)]
        list: bool,
    },
    /// Orthogonal complement of a sublattice `{"basis": [[..], ..]}`.
    Complement { lattice: PathBuf, sublattice: PathBuf },
    /// Primitive closure of a sublattice.
    Saturate { lattice: PathBuf, sublattice: PathBuf },
    /// Niemeier lattices with roots.
    Niemeier {
        #[command(subcommand)]
        action: NiemeierAction,
    },
    /// Marking pipeline on a file `{"j": .., "orbits": [[..]], "alpha": ..}`.
    Marking { input: PathBuf },
    /// Isometry group of a definite lattice.
    Aut { lattice: PathBuf },
    /// Orthogonal group of the discriminant form.
    Oq {
        lattice: PathBuf,
        /// List every element rather than a generating set.
        #[arg(long)]
        elements: bool,
    },
    /// Strong moduli component count of a definite lattice of rank below 8.
    Ms { lattice: PathBuf },
    /// Double cosets `A \ O(q_L) / B`.
    Dcosets {
        lattice: PathBuf,
        /// Generators of `A` as image matrices; defaults to the trivial group.
        #[arg(long, value_name = "FILE")]
        left: Option<PathBuf>,
        /// Generators of `B` as image matrices; defaults to the trivial group.
        #[arg(long, value_name = "FILE")]
        right: Option<PathBuf>,
        /// Use the image of `O(L)` as `A`.
        #[arg(long, conflicts_with = "left")]
        left_image: bool,
    },
    /// Compare computations against the embedded reference tables.
    TableCheck {
        /// One of the suites, or `all`.
        suite: String,
    },
}

#[derive(Subcommand)]
enum NiemeierAction {
    /// Gram matrix and simple roots of `N_j`.
    Build { j: usize },
    /// Checks `N_j`, or a lattice file.
    Verify { target: String },
    /// A code-preserving involution of `N_23` of type 1^8 2^8, as a marking input.
    Involution,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<(String, bool), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_json(path: &Path) -> Result<Value, Failure> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: malformed JSON: {e}", path.display())))
}

fn read_lattice(path: &Path) -> Result<Lattice, Failure> {
    let v = parse_json(path)?;
    Lattice::from_json_value(&v).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Vectors from `{"basis": [[..], ..]}` or a bare array, as matrix columns.
fn read_vectors(path: &Path, dim: usize) -> Result<IntMatrix, Failure> {
    let v = parse_json(path)?;
    let arr = v.get("basis").unwrap_or(&v);
    let rows = int_matrix_from_json(arr).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if rows.cols() != dim {
        return Err(usage(format!("{}: vectors have length {}, lattice rank is {dim}", path.display(), rows.cols())));
    }
    Ok(rows.transpose())
}

fn vectors_json(m: &IntMatrix) -> Value {
    int_matrix_to_json(&m.transpose())
}

/// Pretty JSON with arrays of scalars kept on one line, so matrices stay readable.
fn pretty(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push_str(&serde_json::to_string(v).expect("JSON values serialize"));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        _ => out.push_str(&serde_json::to_string(v).expect("JSON values serialize")),
    }
}

fn matrix_lines(m: &IntMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((out, ok)) => {
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let budget = cli.budget;
    let json = cli.json;
    match &cli.command {
        Command::Genus { lattice } => genus(&read_lattice(lattice)?, json),
        Command::Discform { lattice } => discform(&read_lattice(lattice)?, json),
        Command::Roots { lattice } => roots(&read_lattice(lattice)?, json),
        Command::Count { lattice, norm, list } => {
            count(&read_lattice(lattice)?, *norm, *list, budget.unwrap_or(ENUMERATION_BUDGET), json)
        }
        Command::Complement { lattice, sublattice } => {
            let l = read_lattice(lattice)?;
            let s = Sublattice::spanned_by(l.clone(), &read_vectors(sublattice, l.rank())?)?;
            sublattice_out(&s.orthogonal_complement(), json)
        }
        Command::Saturate { lattice, sublattice } => {
            let l = read_lattice(lattice)?;
            let s = Sublattice::spanned_by(l.clone(), &read_vectors(sublattice, l.rank())?)?;
            let sat = s.saturate();
            let index = evenlat::linalg::determinant(&s.gram())? / evenlat::linalg::determinant(&sat.gram())?;
            let (text, ok) = sublattice_out(&sat, json)?;
            if json {
                let mut v: Value = serde_json::from_str(&text).expect("own output");
                v["index_squared"] = json!(index.to_string());
                Ok((pretty(&v), ok))
            } else {
                Ok((format!("{text}\nindex^2: {index}"), ok))
            }
        }
        Command::Niemeier { action } => niemeier(action, json),
        Command::Marking { input } => {
            let text = read(input)?;
            let m: MarkingInput = serde_json::from_str(&text)
                .map_err(|e| usage(format!("{}: malformed marking JSON: {e}", input.display())))?;
            let n = build_niemeier(m.j)?;
            let r = marking_on(&n, &m.orbits, m.alpha, budget.unwrap_or(ENUMERATION_BUDGET))?;
            marking_out(&m, &r, json)
        }
        Command::Aut { lattice } => aut(&read_lattice(lattice)?, budget.unwrap_or(ISOMETRY_BUDGET), json),
        Command::Oq { lattice, elements } => oq(&read_lattice(lattice)?, *elements, budget.unwrap_or(OQ_BUDGET), json),
        Command::Ms { lattice } => {
            let c = strong_component_count(&read_lattice(lattice)?, budget.unwrap_or(ISOMETRY_BUDGET))?;
            if json {
                Ok((pretty(&serde_json::to_value(&c).expect("serializable")), c.kernel_is_weyl))
            } else {
                Ok((
                    format!(
                        "|O(q_T)| = {}\n|O(T)| = {}\n|O+(T)| = {}\n|W(T)| = {}\n|W+(T)| = {}\nkernel = W: {}\nM_s = {}",
                        c.oq_order,
                        c.o_order,
                        c.o_plus_order,
                        c.weyl_order,
                        c.weyl_plus_order,
                        if c.kernel_is_weyl { "yes" } else { "no" },
                        c.ms
                    ),
                    c.kernel_is_weyl,
                ))
            }
        }
        Command::Dcosets { lattice, left, right, left_image } => {
            let l = read_lattice(lattice)?;
            let b = budget.unwrap_or(OQ_BUDGET);
            let q = l.discriminant_form()?;
            let group = oq_group(&q, b)?;
            let load = |p: &Option<PathBuf>| -> Result<Vec<Vec<usize>>, Failure> {
                let Some(p) = p else { return Ok(vec![]) };
                let v = parse_json(p)?;
                let list = v.get("generators").unwrap_or(&v);
                let arr = list.as_array().ok_or_else(|| usage(format!("{}: expected a list of matrices", p.display())))?;
                arr.iter()
                    .map(|m| {
                        let m = int_matrix_from_json(m).map_err(|e| usage(format!("{}: {e}", p.display())))?;
                        Ok(group.images_from_matrix(&m)?)
                    })
                    .collect()
            };
            let a = if *left_image {
                let iso = isometry_group(&l, budget.unwrap_or(ISOMETRY_BUDGET))?;
                discriminant_images(&l, &iso.generators)?
            } else {
                load(left)?
            };
            let bgens = load(right)?;
            let count = double_coset_count(&q, &a, &bgens, b)?;
            if json {
                Ok((pretty(&json!({"oq_order": group.order(), "double_cosets": count})), true))
            } else {
                Ok((format!("|O(q)| = {}\ndouble cosets: {count}", group.order()), true))
            }
        }
        Command::TableCheck { suite } => table_check(suite, budget.unwrap_or(ENUMERATION_BUDGET), json),
    }
}

fn genus(l: &Lattice, json: bool) -> Outcome {
    let g = genus_symbol(l)?;
    let canonical = g.form.normalize();
    let (p, m) = g.signature;
    if json {
        let v = json!({
            "signature": [p, m],
            "q": canonical.to_string(),
            "signed": canonical.to_signed_string(),
            "determinant": l.det().to_string(),
        });
        Ok((pretty(&v), true))
    } else {
        Ok((
            format!("signature ({p},{m})\nq {canonical}\nsigned {}\ndeterminant {}", canonical.to_signed_string(), l.det()),
            true,
        ))
    }
}

fn discform(l: &Lattice, json: bool) -> Outcome {
    let q = l.discriminant_form()?;
    let sym = evenlat::genus::fqf_symbol(&q).normalize();
    let orders: Vec<String> = q.orders().iter().map(ToString::to_string).collect();
    let values: Vec<String> = q.q_values().iter().map(ToString::to_string).collect();
    let b: Vec<Vec<String>> = q.b_matrix().to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    if json {
        let v = json!({"orders": orders, "q": values, "b": b, "symbol": sym.to_string()});
        Ok((pretty(&v), true))
    } else {
        let group = if orders.is_empty() {
            "0".to_string()
        } else {
            orders.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ")
        };
        let brows = b.iter().map(|r| r.join(" ")).collect::<Vec<_>>().join("\n");
        Ok((format!("group {group}\nq {}\nb\n{brows}\nsymbol {sym}", values.join(" ")), true))
    }
}

fn roots(l: &Lattice, json: bool) -> Outcome {
    let rs = root_system(l)?;
    if json {
        let simple: Vec<Vec<String>> = rs.simple.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        let v = json!({"type": rs.kind.to_string(), "count": rs.roots.len(), "simple": simple});
        Ok((pretty(&v), true))
    } else {
        let simple = rs
            .simple
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n");
        Ok((format!("type {}\ncount {}\nsimple roots\n{simple}", rs.kind, rs.roots.len()), true))
    }
}

fn count(l: &Lattice, norm: i64, list: bool, budget: usize, json: bool) -> Outcome {
    let vs = vectors_of_norm_budget(l, norm, budget)?;
    if json {
        let mut v = json!({"norm": norm, "count": vs.len()});
        if list {
            v["vectors"] = int_matrix_to_json(&Matrix::from_rows(vs.clone()));
        }
        Ok((pretty(&v), true))
    } else {
        let mut out = format!("{}", vs.len());
        for x in vs.iter().filter(|_| list) {
            out.push('\n');
            out.push_str(&x.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
        }
        Ok((out, true))
    }
}

fn sublattice_value(s: &Sublattice) -> Result<Value, Failure> {
    let mut v = json!({"rank": s.rank(), "basis": vectors_json(s.basis()), "gram": int_matrix_to_json(&s.gram())});
    if s.rank() > 0 {
        if let Ok(l) = s.lattice() {
            if l.is_even() {
                v["genus"] = json!(genus_symbol(&l)?.form.normalize().to_string());
            }
        }
    }
    Ok(v)
}

fn sublattice_out(s: &Sublattice, json: bool) -> Outcome {
    let v = sublattice_value(s)?;
    if json {
        return Ok((pretty(&v), true));
    }
    let mut out = format!("rank {}\nbasis\n{}\ngram\n{}", s.rank(), matrix_lines(&s.basis().transpose()), matrix_lines(&s.gram()));
    if let Some(g) = v.get("genus").and_then(Value::as_str) {
        out.push_str(&format!("\ngenus {g}"));
    }
    Ok((out, true))
}

fn niemeier(action: &NiemeierAction, json: bool) -> Outcome {
    match action {
        NiemeierAction::Build { j } => {
            let n = build_niemeier(*j)?;
            let v = json!({
                "j": j,
                "type": n.kind.to_string(),
                "gram": int_matrix_to_json(n.lattice.gram()),
                "simple_roots": vectors_json(&n.simple_roots),
            });
            if json {
                Ok((pretty(&v), true))
            } else {
                Ok((format!("N_{j}: {}, rank {}\n{}", n.kind, n.lattice.rank(), serde_json::to_string(&v).expect("JSON")), true))
            }
        }
        NiemeierAction::Verify { target } => {
            let (lattice, expected) = match target.parse::<usize>() {
                Ok(j) => {
                    let spec = niemeier_spec(j)?;
                    (build_niemeier(j)?.lattice, Some(spec.kind))
                }
                Err(_) => (read_lattice(Path::new(target))?, None),
            };
            let rep = verify_niemeier(&lattice)?;
            let type_ok = expected.as_ref().is_none_or(|k| rep.root_type.as_deref() == Some(&k.to_string()));
            let ok = rep.passes() && type_ok;
            if json {
                let mut v = serde_json::to_value(&rep).expect("serializable");
                v["passes"] = json!(ok);
                if let Some(k) = expected {
                    v["expected_type"] = json!(k.to_string());
                }
                return Ok((pretty(&v), ok));
            }
            let yn = |b: bool| if b { "yes" } else { "no" };
            let mut out = format!(
                "even: {}\nunimodular: {}\nrank: {}\nnegative definite: {}",
                yn(rep.even),
                yn(rep.unimodular),
                rep.rank,
                yn(rep.negative_definite)
            );
            if let (Some(c), Some(t)) = (rep.root_count, &rep.root_type) {
                out.push_str(&format!("\nroots: {c}\nroot type: {t}"));
            }
            if let Some(k) = expected {
                out.push_str(&format!("\nexpected type: {k}"));
            }
            out.push_str(if ok { "\nall checks pass" } else { "\nchecks FAILED" });
            Ok((out, ok))
        }
        NiemeierAction::Involution => {
            let inv = golay_involution().ok_or_else(|| Failure { code: 1, message: "no involution found".into() })?;
            let orbits = marking_orbits(std::slice::from_ref(&inv));
            let alpha = (0..24).find(|&i| inv[i] == i).map_or(1, |i| i + 1);
            let m = MarkingInput { j: 23, orbits, alpha };
            let images: Vec<usize> = inv.iter().map(|i| i + 1).collect();
            if json {
                let mut v = serde_json::to_value(&m).expect("serializable");
                v["permutation"] = json!(images);
                Ok((pretty(&v), true))
            } else {
                Ok((serde_json::to_string(&m).expect("JSON"), true))
            }
        }
    }
}

fn marking_out(m: &MarkingInput, r: &MarkingResult, json: bool) -> Outcome {
    let ok = r.all_checks_pass();
    if json {
        let checks: Vec<Value> = r.checks.iter().map(|(n, b)| json!({"name": n, "ok": b})).collect();
        let v = json!({
            "j": m.j,
            "alpha": m.alpha,
            "coinvariant": {"rank": r.coinvariant.rank(), "genus": r.coinvariant_genus.form.normalize().to_string(), "basis": vectors_json(r.coinvariant.basis())},
            "s": {"rank": r.s.rank(), "genus": r.s_genus.form.normalize().to_string(), "basis": vectors_json(r.s.basis())},
            "complement": {"rank": r.complement.rank(), "genus": r.complement_genus.form.normalize().to_string(), "basis": vectors_json(r.complement.basis())},
            "complement_roots": r.complement_roots.to_string(),
            "minus4_count": r.minus4_count,
            "checks": checks,
        });
        return Ok((pretty(&v), ok));
    }
    let mut out = format!(
        "coinvariant: rank {}, {}\nS: rank {}, {}\ncomplement: rank {}, {}\ncomplement roots: {}\nnorm -4 vectors in complement: {}",
        r.coinvariant.rank(),
        r.coinvariant_genus.form.normalize(),
        r.s.rank(),
        r.s_genus.form.normalize(),
        r.complement.rank(),
        r.complement_genus.form.normalize(),
        r.complement_roots,
        r.minus4_count
    );
    for (name, b) in &r.checks {
        out.push_str(&format!("\n[{}] {name}", if *b { "ok" } else { "FAIL" }));
    }
    Ok((out, ok))
}

fn aut(l: &Lattice, budget: usize, json: bool) -> Outcome {
    let g = isometry_group(l, budget)?;
    if json {
        let gens: Vec<Value> = g.generators.iter().map(int_matrix_to_json).collect();
        let v = json!({
            "order": g.order(),
            "proper_order": g.proper_order,
            "weyl_order": g.weyl_order.to_string(),
            "generators": gens,
        });
        return Ok((pretty(&v), true));
    }
    let mut out = format!("order {}\nproper order {}\nWeyl order {}\ngenerators", g.order(), g.proper_order, g.weyl_order);
    for m in &g.generators {
        out.push('\n');
        out.push_str(&matrix_lines(m));
        out.push('\n');
    }
    Ok((out.trim_end().to_string(), true))
}

fn oq(l: &Lattice, elements: bool, budget: usize, json: bool) -> Outcome {
    let group = oq_group(&l.discriminant_form()?, budget)?;
    let listed: Vec<IntMatrix> = if elements {
        group.matrices()
    } else {
        group.generators().iter().map(|e| evenlat::fqf::images_to_matrix(&group.form, e)).collect()
    };
    let orders: Vec<u64> = group.form.orders().to_vec();
    if json {
        let key = if elements { "elements" } else { "generators" };
        let v = json!({
            "orders": orders,
            "order": group.order(),
            key: listed.iter().map(int_matrix_to_json).collect::<Vec<_>>(),
        });
        return Ok((pretty(&v), true));
    }
    let mut out = format!(
        "group orders {:?}\n|O(q)| = {}\n{}",
        orders,
        group.order(),
        if elements { "elements" } else { "generators" }
    );
    for m in &listed {
        out.push('\n');
        out.push_str(&matrix_lines(m));
        out.push('\n');
    }
    Ok((out.trim_end().to_string(), true))
}

fn table_check(suite: &str, budget: usize, json: bool) -> Outcome {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(usage(format!("unknown suite {suite:?}; expected one of {} or all", SUITES.join(", "))));
    };
    let mut reports = Vec::new();
    for name in names {
        reports.push(run_suite(name, budget)?);
    }
    let ok = reports.iter().all(|r| r.passed());
    if json {
        let v = serde_json::to_value(&reports).expect("serializable");
        return Ok((pretty(&v), ok));
    }
    let mut out = String::new();
    for r in &reports {
        for row in &r.rows {
            out.push_str(&format!("{:<9} {}", row.status.as_str(), row.key));
            match row.status {
                Status::Match => out.push_str(&format!(": {}", row.computed)),
                Status::Mismatch => {
                    out.push_str(&format!(": expected {}, computed {}", row.expected, row.computed))
                }
                Status::External | Status::Skipped => {}
            }
            if let Some(n) = &row.note {
                let sep = if row.status == Status::Match || row.status == Status::Mismatch { " | " } else { ": " };
                out.push_str(&format!("{sep}{n}"));
            }
            out.push('\n');
        }
        out.push_str(&r.summary());
        out.push('\n');
    }
    Ok((out.trim_end().to_string(), ok))
}
