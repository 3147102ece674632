//! Client for the LMFDB REST API (Hilbert modular forms).
//!
//! Requests are rate limited to one per second, retried with exponential
//! backoff, paginated through the `next` link, and parsed into the same
//! [`NewformTable`] layout as the bundled fixtures. Parsed tables are cached
//! under `lmfdb/<field>/<level>.json`.

use std::sync::Mutex;
use std::thread::sleep;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::algebra::poly::RatPoly;
use crate::arith::{parse_rational, prime_divisors, Q};
use crate::data_io::{to_fixture_json, Cache, EigenvalueEntry, NewformEntry, NewformTable};
use crate::error::{Error, Result};
use crate::numfield::NumberField;

/// Tag recorded with every table parsed from LMFDB responses.
pub const LMFDB_SCHEMA: &str = "lmfdb-hmf-v1";
pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org";
const MIN_INTERVAL: Duration = Duration::from_secs(1);
const CACHE_SOURCE: &str = "lmfdb";

/// A collection query, e.g. `hmf_forms` with `field_label=...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LmfdbQuery {
    pub collection: String,
    pub params: Vec<(String, String)>,
}

impl LmfdbQuery {
    pub fn new(collection: &str) -> Self {
        LmfdbQuery { collection: collection.into(), params: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    /// Path and query string, relative to the base URL.
    pub fn path(&self) -> String {
        let mut s = format!("/api/{}/?_format=json", self.collection);
        for (k, v) in &self.params {
            s.push('&');
            s.push_str(&encode(k));
            s.push('=');
            s.push_str(&encode(v));
        }
        s
    }
}

fn encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || b"-_.~".contains(&b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

pub struct LmfdbClient {
    base_url: String,
    offline: bool,
    retries: u32,
    backoff: Duration,
    cache: Cache,
    agent: ureq::Agent,
    last_request: Mutex<Option<Instant>>,
}

impl LmfdbClient {
    pub fn new(base_url: &str, cache: Cache) -> Self {
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(60))).build().into();
        LmfdbClient {
            base_url: base_url.trim_end_matches('/').to_string(),
            offline: false,
            retries: 3,
            backoff: Duration::from_secs(1),
            cache,
            agent,
            last_request: Mutex::new(None),
        }
    }

    /// Never touch the network; cold cache entries become data gaps.
    pub fn offline(mut self, offline: bool) -> Self {
        self.offline = offline;
        self
    }

    pub fn retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    /// GET one page, waiting out the rate limit and retrying on failure.
    /// The lock is held across the request so only one fetch is in flight.
    pub fn get_json(&self, path: &str) -> Result<Value> {
        if self.offline {
            return Err(Error::DataGap(format!("offline: not fetching {path}")));
        }
        let url = format!("{}{}", self.base_url, path);
        let mut last = self.last_request.lock().unwrap_or_else(|e| e.into_inner());
        let mut delay = self.backoff;
        let mut attempt = 0;
        loop {
            if let Some(t) = *last {
                let since = t.elapsed();
                if since < MIN_INTERVAL {
                    sleep(MIN_INTERVAL - since);
                }
            }
            *last = Some(Instant::now());
            let res = self.agent.get(&url).call().and_then(|mut r| r.body_mut().read_to_string());
            match res {
                Ok(body) => {
                    return serde_json::from_str(&body)
                        .map_err(|e| Error::Network(format!("{url}: malformed JSON: {e}")));
                }
                Err(_) if attempt < self.retries => {
                    attempt += 1;
                    sleep(delay);
                    delay *= 2;
                }
                Err(e) => return Err(Error::Network(format!("{url}: {e}"))),
            }
        }
    }

    /// All records of a query, following `next` links.
    pub fn fetch_all(&self, query: &LmfdbQuery) -> Result<Vec<Value>> {
        let mut out = Vec::new();
        let mut path = query.path();
        loop {
            let page = self.get_json(&path)?;
            let data = page
                .get("data")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Network(format!("{path}: response has no data array")))?;
            out.extend(data.iter().cloned());
            match page.get("next").and_then(Value::as_str) {
                Some(next) if !next.is_empty() && !data.is_empty() => {
                    path = match next.strip_prefix(&self.base_url) {
                        Some(rest) => rest.to_string(),
                        None => next.to_string(),
                    };
                    if !path.starts_with('/') {
                        path.insert(0, '/');
                    }
                }
                _ => break,
            }
        }
        Ok(out)
    }

    /// Newforms of level norm `level_norm` over `k`, from cache when present.
    pub fn newforms(&self, k: &NumberField, level_norm: u64) -> Result<NewformTable> {
        if let Some((text, _)) = self.cache.get(CACHE_SOURCE, k.label(), level_norm)? {
            return serde_json::from_str(&text)
                .map_err(|e| Error::Inconsistency(format!("cached table for {}: {e}", k.label())));
        }
        if self.offline {
            return Err(Error::DataGap(format!(
                "offline and no cached newforms for {} at level norm {level_norm}",
                k.label()
            )));
        }
        let fields = self.fetch_all(&LmfdbQuery::new("hmf_fields").with("label", k.label()))?;
        let primes: Vec<String> = fields
            .first()
            .and_then(|f| f.get("primes"))
            .and_then(Value::as_array)
            .ok_or_else(|| Error::DataGap(format!("LMFDB has no prime list for {}", k.label())))?
            .iter()
            .filter_map(|v| v.as_str().map(str::to_string))
            .collect();
        let forms = self.fetch_all(
            &LmfdbQuery::new("hmf_forms").with("field_label", k.label()).with("level_norm", level_norm),
        )?;
        let mut hecke = Vec::with_capacity(forms.len());
        for f in &forms {
            let label = f
                .get("label")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Network("newform record without label".into()))?;
            let rec = self.fetch_all(&LmfdbQuery::new("hmf_hecke").with("label", label))?;
            hecke.push(rec.into_iter().next().unwrap_or(Value::Null));
        }
        let table = parse_lmfdb_forms(k, level_norm, &primes, &forms, &hecke)?;
        self.cache.put(CACHE_SOURCE, k.label(), level_norm, &to_fixture_json(&table)?, LMFDB_SCHEMA)?;
        Ok(table)
    }
}

/// Converts LMFDB records into a [`NewformTable`].
///
/// `primes` is the field's prime list (`"[N, p, gen]"` with `gen` a
/// polynomial in `w`, the root of the defining polynomial); `hecke[i]` holds
/// `hecke_polynomial` and `hecke_eigenvalues` for `forms[i]`, the latter
/// indexed like `primes`. Each LMFDB prime is matched to the unique
/// Dedekind factor whose residue field kills `gen`; primes dividing the
/// index or the level, or matching no factor or several, are dropped.
pub fn parse_lmfdb_forms(
    k: &NumberField,
    level_norm: u64,
    primes: &[String],
    forms: &[Value],
    hecke: &[Value],
) -> Result<NewformTable> {
    if forms.len() != hecke.len() {
        return Err(Error::Invalid("one Hecke record per form expected".into()));
    }
    let located: Vec<Option<(u64, usize, usize)>> =
        primes.iter().map(|s| locate_prime(k, s)).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(forms.len());
    for (form, h) in forms.iter().zip(hecke) {
        let label = str_field(form, "label")?;
        if form.get("level_norm").and_then(Value::as_u64).is_some_and(|n| n != level_norm) {
            return Err(Error::Inconsistency(format!("{label} is not of level norm {level_norm}")));
        }
        let poly_text = str_field(h, "hecke_polynomial")?;
        let var = if poly_text.contains('e') && !poly_text.contains('x') { 'e' } else { 'x' };
        let hp = parse_poly_expr(poly_text, var)?;
        if hp.is_zero() || hp.lc() != Q::one() {
            return Err(Error::Invalid(format!("{label}: Hecke polynomial {poly_text} is not monic")));
        }
        let deg = hp.deg();
        let values = h
            .get("hecke_eigenvalues")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid(format!("{label}: no hecke_eigenvalues")))?;
        let mut eig = Vec::new();
        for (v, loc) in values.iter().zip(&located) {
            let Some((p, f, factor_index)) = *loc else { continue };
            // a at primes dividing the level is an Atkin-Lehner sign, not a Hecke eigenvalue.
            if level_norm % p == 0 {
                continue;
            }
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(Error::Invalid(format!("{label}: eigenvalue {v} is not a string"))),
            };
            let a = parse_poly_expr(&text, 'e')?.rem(&hp);
            let aq = (0..deg).map(|i| crate::arith::format_rational(&a.coeff(i))).collect();
            eig.push(EigenvalueEntry { p, f, factor_index, aq });
        }
        entries.push(NewformEntry {
            field_label: k.label().to_string(),
            level_norm,
            label: label.to_string(),
            hecke_poly: Some(hp.coeffs().iter().map(crate::arith::format_rational).collect()),
            hecke_degree: deg,
            eigenvalues: eig,
        });
    }
    Ok(NewformTable {
        field_label: k.label().to_string(),
        level_norm,
        schema: LMFDB_SCHEMA.to_string(),
        provenance: "LMFDB hmf_forms/hmf_hecke".to_string(),
        forms: entries,
    })
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v.get(key).and_then(Value::as_str).ok_or_else(|| Error::Invalid(format!("record lacks string field {key}")))
}

/// (p, f, factor_index) for an LMFDB prime string, or None when it cannot
/// be matched unambiguously.
fn locate_prime(k: &NumberField, s: &str) -> Result<Option<(u64, usize, usize)>> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = inner.splitn(3, ',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Invalid(format!("malformed LMFDB prime {s:?}")));
    }
    let norm: u64 = parts[0].parse().map_err(|_| Error::Invalid(format!("malformed prime norm in {s:?}")))?;
    let ps = prime_divisors(&BigInt::from(norm))?;
    if ps.len() != 1 {
        return Err(Error::Invalid(format!("prime norm {norm} is not a prime power")));
    }
    let p: u64 = (&ps[0]).try_into().map_err(|_| Error::Invalid(format!("prime {} too large", ps[0])))?;
    let mut f = 0;
    let mut n = norm;
    while n > 1 {
        n /= p;
        f += 1;
    }
    let gen = k.from_power_basis(&parse_poly_expr(parts[2], 'w')?);
    let candidates = match k.dedekind_factor(p) {
        Ok(c) => c,
        Err(Error::IndexObstruction { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut hit = None;
    for q in candidates.iter().filter(|q| q.f == f) {
        let r = match k.reduce_mod_prime(&gen, q) {
            Ok(r) => r,
            Err(_) => return Ok(None),
        };
        if r.0.iter().all(|&c| c == 0) {
            if hit.is_some() {
                return Ok(None);
            }
            hit = Some((p, f, q.factor_index));
        }
    }
    Ok(hit)
}

/// Parses sums of terms like `-3/2*e^2`, `e`, `7` in a single variable.
pub fn parse_poly_expr(s: &str, var: char) -> Result<RatPoly> {
    let bad = || Error::Invalid(format!("cannot parse polynomial {s:?} in {var}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut coeffs: Vec<Q> = Vec::new();
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (i, c) in compact.chars().enumerate() {
        if (c == '+' || c == '-') && i > 0 && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    terms.push(cur);
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(b) => (-Q::one(), b),
            None => (Q::one(), t.strip_prefix('+').unwrap_or(&t)),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let (coef, exp) = match body.find(var) {
            None => (parse_rational(body).map_err(|_| bad())?, 0usize),
            Some(pos) => {
                let c = body[..pos].trim_end_matches('*');
                let c = if c.is_empty() { Q::one() } else { parse_rational(c).map_err(|_| bad())? };
                let rest = &body[pos + var.len_utf8()..];
                let e = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').and_then(|r| r.parse().ok()).ok_or_else(bad)?
                };
                (c, e)
            }
        };
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, Q::zero());
        }
        coeffs[exp] += sign * coef;
    }
    Ok(RatPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_expressions() {
        let p = parse_poly_expr("x^2 + 3*x - 1", 'x').unwrap();
        assert_eq!(p, RatPoly::new(vec![Q::from_integer((-1).into()), Q::from_integer(3.into()), Q::one()]));
        let q = parse_poly_expr("-1/2*e^3+e-4", 'e').unwrap();
        assert_eq!(q.deg(), 3);
        assert_eq!(q.coeff(3), Q::new((-1).into(), 2.into()));
        assert_eq!(q.coeff(1), Q::one());
        assert!(parse_poly_expr("x^", 'x').is_err());
        assert!(parse_poly_expr("", 'x').is_err());
    }

    #[test]
    fn query_paths_are_encoded() {
        let q = LmfdbQuery::new("hmf_forms").with("field_label", "3.3.148.1").with("x", "a b");
        assert_eq!(q.path(), "/api/hmf_forms/?_format=json&field_label=3.3.148.1&x=a%20b");
    }
}
