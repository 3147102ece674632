use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fermat_core::data_io::{Cache, FixtureStore, LmfdbClient, NewformTable, DEFAULT_BASE_URL};
use fermat_core::frey::{fs_witness_check, frey_invariants, frey_invariants_formal, normalize_powers, normalize_solution};
use fermat_core::newform::{condition_c_scan, records_from_table, survivor_primes, SurvivorVerdict};
use fermat_core::numfield::{FieldElement, NumberField};
use fermat_core::par::Execution;
use fermat_core::report::fermat_report;
use fermat_core::units::{fixture_units, narrow_class_number, ray_class_number, rk_multiple, Modulus};
use fermat_core::{Error, Result};

#[derive(Parser)]
#[command(name = "fermat", version, about = "Exact checks for the Fermat equation over totally real fields")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Never touch the network.
    #[arg(long, global = true)]
    offline: bool,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    /// Fixture root (fields/ and newforms/).
    #[arg(long, global = true, env = "FERMAT_FIXTURES")]
    fixtures: Option<PathBuf>,
    /// Cache root for downloaded data.
    #[arg(long, global = true, env = "FERMAT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, env = "FERMAT_LMFDB_URL", default_value = DEFAULT_BASE_URL)]
    lmfdb_url: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor pO_K by Dedekind's criterion.
    NfFactor {
        #[arg(long)]
        field: String,
        #[arg(long)]
        prime: u64,
    },
    /// Multiple of R_K from the tower polynomials of totally positive units.
    Rk {
        #[arg(long)]
        field: String,
        /// Use the units recorded in the field fixture.
        #[arg(long, required = true)]
        units_from_fixture: bool,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Scan rational newforms of level L for a_q ≢ N(q) + 1 mod 4.
    ConditionC {
        #[arg(long)]
        field: String,
    },
    /// Primes p for which some newform survives every q above the listed primes.
    Survivors {
        #[arg(long)]
        field: String,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// h_K^+ from the signs of the units.
    NarrowClass {
        #[arg(long)]
        field: String,
    },
    /// Ray class number of m (times the infinite places when asked).
    Rayclass {
        #[arg(long)]
        field: String,
        /// `1`, `4`, or `p:i` for the i-th Dedekind factor above p.
        #[arg(long)]
        modulus: String,
        #[arg(long, value_enum, default_value = "none")]
        infinite: Infinite,
    },
    /// Frey curve invariants and normalization of a triple read from a JSON file.
    Frey {
        #[arg(long)]
        field: String,
        /// {"a": coords, "b": coords, "c": coords}; without "c" the third
        /// term is defined by c^p = −a^p − b^p.
        #[arg(long)]
        triple: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// S-unit witness check against the bound 4d.
    FsCheck {
        #[arg(long)]
        field: String,
        /// Comma-separated coordinates on the integral basis.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        elem: Vec<String>,
    },
    /// Full checklist and exceptional exponents for one field.
    FermatReport {
        #[arg(long)]
        field: String,
        #[arg(long)]
        pmin: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Infinite {
    All,
    None,
}

struct Outcome {
    inputs: Value,
    verdict: String,
    certificates: Vec<Value>,
    /// Human-readable lines.
    lines: Vec<String>,
}

struct Ctx {
    store: FixtureStore,
    offline: bool,
    exec: Execution,
    cache_dir: Option<PathBuf>,
    lmfdb_url: String,
}

impl Ctx {
    fn field(&self, label: &str) -> Result<NumberField> {
        self.store.load_field(label)
    }

    /// Bundled newforms, else the LMFDB through the cache.
    fn newforms(&self, k: &NumberField) -> Result<(NewformTable, &'static str)> {
        match self.store.newform_table(k.label(), 2) {
            Ok(t) => Ok((t, "fixture")),
            Err(Error::DataGap(_)) => {
                let cache = self.cache_dir.clone().map_or_else(Cache::from_env, Cache::new);
                let client = LmfdbClient::new(&self.lmfdb_url, cache).offline(self.offline);
                Ok((client.newforms(k, 2)?, "lmfdb"))
            }
            Err(e) => Err(e),
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn element(k: &NumberField, coords: &[String], what: &str) -> Result<FieldElement> {
    if coords.len() != k.degree() {
        return Err(Error::Domain(format!("{what} has {} coordinates, {} has degree {}", coords.len(), k.label(), k.degree())));
    }
    FieldElement::parse(coords)
}

fn json_coords(v: &Value, what: &str) -> Result<Vec<String>> {
    let arr = v.as_array().ok_or_else(|| Error::Invalid(format!("{what} must be an array of coordinates")))?;
    arr.iter()
        .map(|c| match c {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
            _ => Err(Error::Invalid(format!("{what}: coordinate {c} is not an integer or a rational string"))),
        })
        .collect()
}

fn parse_modulus(k: &NumberField, s: &str) -> Result<Modulus> {
    match s {
        "1" => Ok(Modulus::Trivial),
        "4" => Ok(Modulus::FourOk),
        _ => {
            let (p, i) = s
                .split_once(':')
                .and_then(|(p, i)| Some((p.parse::<u64>().ok()?, i.parse::<usize>().ok()?)))
                .ok_or_else(|| Error::Domain(format!("modulus {s:?}: expected 1, 4 or p:i")))?;
            Ok(Modulus::Prime(k.prime_by_index(p, i)?))
        }
    }
}

fn run(ctx: &Ctx, cmd: &Command) -> Result<(&'static str, Outcome)> {
    Ok(match cmd {
        Command::NfFactor { field, prime } => {
            let k = ctx.field(field)?;
            let primes = k.dedekind_factor(*prime)?;
            let list: Vec<Value> = primes
                .iter()
                .map(|q| json!({"p": q.p, "e": q.e, "f": q.f, "factor_index": q.factor_index, "gen_poly": q.gen_poly.to_string()}))
                .collect();
            let shape = primes.iter().map(|q| format!("(e={},f={})", q.e, q.f)).collect::<Vec<_>>().join(" ");
            let lines = primes.iter().map(|q| format!("#{} e={} f={} {}", q.factor_index, q.e, q.f, q.gen_poly)).collect();
            ("nf-factor", Outcome {
                inputs: json!({"field": field, "prime": prime}),
                verdict: shape,
                certificates: vec![json!({"primes": list})],
                lines,
            })
        }
        Command::Rk { field, depth, .. } => {
            let k = ctx.field(field)?;
            let units = fixture_units(&k)?;
            let cert = rk_multiple(&k, &units, *depth, ctx.exec)?;
            let mut lines: Vec<String> = cert.levels.iter().map(|l| format!("A_{} = {}", l.n, l.factored)).collect();
            lines.push(format!("R_multiple = {}", cert.r_factored));
            ("rk", Outcome {
                inputs: json!({"field": field, "depth": depth, "units": "fixture"}),
                verdict: if cert.conclusive { "conclusive" } else { "inconclusive" }.into(),
                certificates: vec![to_value(&cert)?],
                lines,
            })
        }
        Command::ConditionC { field } => {
            let k = ctx.field(field)?;
            let (table, source) = ctx.newforms(&k)?;
            let report = condition_c_scan(field, &records_from_table(&table)?)?;
            let verdict = to_value(&report.verdict)?.as_str().unwrap_or_default().to_string();
            let lines = vec![
                format!("|H| = {} in {} orbits, {} rational", report.forms, report.orbits, report.rational_forms),
                format!("source: {source}"),
            ];
            ("condition-c", Outcome {
                inputs: json!({"field": field, "offline": ctx.offline}),
                verdict,
                certificates: vec![to_value(&report)?],
                lines,
            })
        }
        Command::Survivors { field, primes } => {
            let k = ctx.field(field)?;
            let (table, _) = ctx.newforms(&k)?;
            let forms = records_from_table(&table)?;
            if forms.is_empty() {
                return Err(Error::DataGap(format!("no newforms of level L over {field}")));
            }
            let mut certs = Vec::new();
            let mut lines = Vec::new();
            let mut all_finite = true;
            for f in &forms {
                let keys: Vec<_> = f.eigenvalues.iter().map(|(q, _)| *q).filter(|q| primes.contains(&q.p)).collect();
                if keys.is_empty() {
                    return Err(Error::DataGap(format!("{}: no eigenvalue above {primes:?}", f.label)));
                }
                let s = survivor_primes(f, &keys)?;
                all_finite &= s.verdict == SurvivorVerdict::Finite;
                lines.push(format!("{}: {:?}", s.form, s.survivors));
                certs.push(to_value(&s)?);
            }
            ("survivors", Outcome {
                inputs: json!({"field": field, "primes": primes}),
                verdict: if all_finite { "finite" } else { "method_fails" }.into(),
                certificates: certs,
                lines,
            })
        }
        Command::NarrowClass { field } => {
            let k = ctx.field(field)?;
            let r = narrow_class_number(&k)?;
            ("narrow-class", Outcome {
                inputs: json!({"field": field}),
                verdict: format!("h_plus = {}", r.h_plus),
                lines: vec![format!("h_K = {}, sign rank = {}", r.h_k, r.rank)],
                certificates: vec![to_value(&r)?],
            })
        }
        Command::Rayclass { field, modulus, infinite } => {
            let k = ctx.field(field)?;
            let all = matches!(infinite, Infinite::All);
            let r = ray_class_number(&k, &parse_modulus(&k, modulus)?, all)?;
            ("rayclass", Outcome {
                inputs: json!({"field": field, "modulus": modulus, "infinite": if all { "all" } else { "none" }}),
                verdict: format!("ray_class_number = {}", r.ray_class_number),
                lines: vec![format!("{} of order {} with unit image {}", r.modulus, r.group_order, r.image_order)],
                certificates: vec![to_value(&r)?],
            })
        }
        Command::Frey { field, triple, p } => {
            let k = ctx.field(field)?;
            let text = std::fs::read_to_string(triple)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", triple.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", triple.display())))?;
            let get = |name: &str| -> Result<Option<FieldElement>> {
                v.get(name).map(|x| element(&k, &json_coords(x, name)?, name)).transpose()
            };
            let (a, b) = match (get("a")?, get("b")?) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Invalid("triple file needs \"a\" and \"b\"".into())),
            };
            let (inv, norm) = match get("c")? {
                Some(c) => (frey_invariants(&k, &a, &b, &c, *p)?, normalize_solution(&k, &a, &b, &c, *p)),
                None => (frey_invariants_formal(&k, &k.pow(&a, *p), &k.pow(&b, *p))?, normalize_powers(&k, &a, &b, *p)),
            };
            let mut lines = vec![format!("c4 = {}", inv.c4), format!("c6 = {}", inv.c6), format!("delta = {}", inv.delta)];
            if let Some(t) = &inv.valuations {
                lines.push(format!("v_L(c4, c6, delta) = {:?}", t.as_tuple()));
            }
            let (verdict, normalized) = match norm {
                Ok(n) => {
                    lines.push(format!("normalized by ε = {} ({})", n.epsilon, n.permutation));
                    ("normalized".to_string(), to_value(&n)?)
                }
                Err(e @ (Error::Domain(_) | Error::Unsupported(_))) => {
                    lines.push(format!("not normalized: {e}"));
                    ("invariants_only".to_string(), json!({"error": e.to_string()}))
                }
                Err(e) => return Err(e),
            };
            ("frey", Outcome {
                inputs: json!({"field": field, "triple": v, "p": p}),
                verdict,
                certificates: vec![to_value(&inv)?, normalized],
                lines,
            })
        }
        Command::FsCheck { field, elem } => {
            let k = ctx.field(field)?;
            let a = element(&k, elem, "--elem")?;
            let w = fs_witness_check(&k, &a)?;
            let verdict = to_value(&w.verdict)?.as_str().unwrap_or_default().to_string();
            ("fs-check", Outcome {
                inputs: json!({"field": field, "elem": elem}),
                verdict,
                lines: vec![format!("v_L(a) = {}, bound 4d = {}, a ∈ S: {}, 1 − a ∈ S: {}", w.v_a, w.threshold, w.a_in_s, w.b_in_s)],
                certificates: vec![to_value(&w)?],
            })
        }
        Command::FermatReport { field, pmin } => {
            let r = fermat_report(&ctx.store, field, *pmin, ctx.exec)?;
            let verdict = to_value(&r.verdict)?.as_str().unwrap_or_default().to_string();
            let mut lines: Vec<String> = r
                .items
                .iter()
                .map(|i| {
                    let tag = to_value(&i.provenance).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
                    let status = to_value(&i.status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
                    format!("[{tag}] {}: {status}{}", i.claim, if i.detail.is_empty() { String::new() } else { format!(" ({})", i.detail) })
                })
                .collect();
            lines.push(match &r.exceptional {
                Some(e) => format!("exceptional exponents p ≥ {pmin}: {e:?}"),
                None => "exceptional exponents: unresolved".into(),
            });
            ("fermat-report", Outcome {
                inputs: json!({"field": field, "pmin": pmin}),
                verdict,
                certificates: vec![to_value(&r)?],
                lines,
            })
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        store: cli.fixtures.clone().map_or_else(FixtureStore::bundled, FixtureStore::new),
        offline: cli.offline,
        exec: if cli.sequential { Execution::Sequential } else { Execution::default() },
        cache_dir: cli.cache_dir.clone(),
        lmfdb_url: cli.lmfdb_url.clone(),
    };
    let start = Instant::now();
    // Write errors (a closed pipe) are ignored.
    let mut stdout = std::io::stdout().lock();
    match run(&ctx, &cli.command) {
        Ok((command, out)) => {
            if cli.json {
                let report = json!({
                    "command": command,
                    "inputs": out.inputs,
                    "verdict": out.verdict,
                    "certificates": out.certificates,
                    "wall_time_ms": start.elapsed().as_millis() as u64,
                });
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("values serialize"));
            } else {
                let _ = writeln!(stdout, "{command}: {}", out.verdict);
                for l in &out.lines {
                    let _ = writeln!(stdout, "  {l}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(stdout, "{}", json!({"error": e.to_string(), "exit_code": e.exit_code()}));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
