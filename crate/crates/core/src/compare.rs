//! Baseline formulas, comparison tables and the asymptotic sweep.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::bounds::{bound_cited_pda, bound_cutset_an, bound_theorem2, SystemTriple};
use crate::error::{Error, Result};
use crate::linegraph::ConstructionParams;
use crate::scheme::{params_from, SchemeParams};

/// K, U = 1 - M/N, F, γ = K U / R and R for one scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub label: String,
    pub users: BigUint,
    pub uncached: BigRational,
    pub subpacketization: BigUint,
    pub gain: BigRational,
    pub rate: BigRational,
}

fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn scheme_row(cp: &ConstructionParams) -> Result<ComparisonRow> {
    let p = params_from(cp)?;
    Ok(ComparisonRow {
        label: format!("({},{},{},{})", cp.k, cp.m, cp.t, cp.q),
        uncached: p.uncached_fraction(),
        gain: p.gain(),
        rate: p.rate.clone(),
        users: p.users,
        subpacketization: p.subpacketization,
    })
}

/// PDA baseline with parameters (m', q'): K = q'(m'+1), U = 1 - 1/q',
/// F = q'^{m'}, R = q' - 1, γ = m' + 1.
pub fn yan_pda_params(m: u32, q: u64) -> Result<ComparisonRow> {
    if q < 2 || m < 1 {
        return Err(Error::InvalidParams(format!("baseline needs q' >= 2 and m' >= 1, got ({m}, {q})")));
    }
    let users = BigUint::from(q) * (m as u64 + 1);
    let uncached = BigRational::one() - rat(1, q);
    let rate = int(q - 1);
    Ok(ComparisonRow {
        label: format!("({m},{q})"),
        gain: int(users.clone()) * &uncached / &rate,
        subpacketization: BigUint::from(q).pow(m),
        users,
        uncached,
        rate,
    })
}

/// Uncoded-placement baseline: t = K M/N, γ = 1 + t, R = K (1 - M/N) / γ,
/// F = binom(K, t).
pub fn ali_niesen_params(k: u64, mn: &BigRational) -> Result<ComparisonRow> {
    let t = mn * int(k);
    if !t.is_integer() || t < BigRational::zero() || t > int(k) {
        return Err(Error::InvalidParams(format!("K M/N = {t} is not an integer in [0, K]")));
    }
    let t = t.to_integer().to_u64().expect("0 <= t <= K");
    let uncached = BigRational::one() - mn;
    let gamma = int(1 + t);
    let rate = int(k) * &uncached / &gamma;
    let f = (0..t).fold(BigUint::one(), |acc, i| acc * (k - i) / (i + 1));
    Ok(ComparisonRow {
        label: format!("K={k}, M/N={mn}"),
        users: BigUint::from(k),
        uncached,
        subpacketization: f,
        gain: gamma,
        rate,
    })
}

/// Two decimals, truncated toward zero.
pub fn two_decimals(r: &BigRational) -> String {
    let hundredths = (r * int(100)).floor().to_integer();
    let h = BigInt::from(100);
    let (w, f) = (&hundredths / &h, &hundredths % &h);
    format!("{w}.{:02}", f.to_u32().unwrap_or(0))
}

/// Decimal with `digits` places, rounded half up; for display only.
pub fn decimal(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let v = (r * BigRational::from_integer(scale.clone()) + rat(1, 2)).floor().to_integer();
    let (w, f) = (&v / &scale, &v % &scale);
    format!("{w}.{:0width$}", f, width = digits as usize)
}

/// floor(log10 x) for x >= 1.
pub fn decimal_exponent(x: &BigUint) -> u32 {
    x.to_string().len() as u32 - 1
}

/// A rendered table: header names and string cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.headers).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("cells are strings"))
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = format!("{}\n{}\n", self.title, line(&self.headers));
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

/// One row of the bounds table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsRow {
    pub triple: SystemTriple,
    pub theorem2: BigUint,
    pub cited_pda: BigUint,
    pub cutset: BigUint,
    pub cutset_exact: BigRational,
    /// Construction with the same K whose formula F and D are half the listed ones.
    pub scheme: Option<(ConstructionParams, SchemeParams)>,
    /// Transmission count listed alongside the triple in the reference table.
    pub reference_rf: Option<u64>,
}

impl BoundsRow {
    pub fn scheme_rf(&self) -> Option<BigUint> {
        self.scheme.as_ref().map(|(_, p)| p.transmissions())
    }
}

/// (K, F, D), matching construction if any, and the reference RF.
pub type Table1Spec = ((u64, u64, u64), Option<(usize, usize, usize, u64)>, Option<u64>);

pub const TABLE1_ROWS: [Table1Spec; 6] = [
    ((15, 50, 30), None, None),
    ((24, 54, 36), None, None),
    ((15, 20, 12), None, None),
    ((7, 42, 24), Some((3, 1, 1, 2)), Some(56)),
    ((15, 210, 168), Some((4, 1, 1, 2)), Some(840)),
    ((13, 156, 108), Some((3, 1, 1, 3)), Some(468)),
];

pub fn table1_rows() -> Result<Vec<BoundsRow>> {
    TABLE1_ROWS
        .iter()
        .map(|&((k, f, d), cp, reference_rf)| {
            let st = SystemTriple::new(k, f, d)?;
            let scheme = cp
                .map(|(k, m, t, q)| {
                    let cp = ConstructionParams::new(k, m, t, q)?;
                    Ok::<_, Error>((cp, params_from(&cp)?))
                })
                .transpose()?;
            let cut = bound_cutset_an(&st);
            Ok(BoundsRow {
                triple: st,
                theorem2: bound_theorem2(&st)?,
                cited_pda: bound_cited_pda(&st),
                cutset: cut.ceil,
                cutset_exact: cut.exact,
                scheme,
                reference_rf,
            })
        })
        .collect()
}

pub fn table1() -> Result<Table> {
    let headers = [
        "K", "F", "D", "theorem2", "pda", "cutset", "cutset_exact", "scheme", "scheme_F", "scheme_D", "scheme_RF",
        "reference_RF", "note",
    ];
    let rows = table1_rows()?
        .into_iter()
        .map(|r| {
            let st = r.triple;
            let (label, sf, sd, rf, note) = match (&r.scheme, r.reference_rf) {
                (Some((cp, p)), Some(reference)) => {
                    let rf = p.transmissions();
                    let note = if BigUint::from(reference) == &rf * 2u32 {
                        "reference F, D, RF are twice the formula values".to_string()
                    } else {
                        String::new()
                    };
                    (
                        format!("({},{},{},{})", cp.k, cp.m, cp.t, cp.q),
                        p.subpacketization.to_string(),
                        p.uncached_per_user.to_string(),
                        rf.to_string(),
                        note,
                    )
                }
                _ => ("NA".into(), String::new(), String::new(), "NA".into(), String::new()),
            };
            vec![
                st.k.to_string(),
                st.f.to_string(),
                st.d.to_string(),
                r.theorem2.to_string(),
                r.cited_pda.to_string(),
                r.cutset.to_string(),
                format!("{} ({})", r.cutset_exact, decimal(&r.cutset_exact, 2)),
                label,
                sf,
                sd,
                rf,
                r.reference_rf.map_or("NA".into(), |x| x.to_string()),
                note,
            ]
        })
        .collect();
    Ok(Table {
        title: "Lower bounds on R*F".into(),
        headers: headers.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

/// (k, m, t, q) paired with the baseline (m', q').
pub type Table3Spec = ((usize, usize, usize, u64), (u32, u64));

pub const TABLE3_PAIRS: [Table3Spec; 7] = [
    ((10, 2, 2, 2), (6, 73)),
    ((9, 3, 2, 2), (14, 17)),
    ((8, 3, 2, 2), (13, 9)),
    ((9, 4, 3, 2), (31, 4)),
    ((7, 3, 2, 2), (15, 4)),
    ((7, 3, 3, 3), (39, 3)),
    ((6, 3, 2, 2), (14, 2)),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonPair {
    pub this: ComparisonRow,
    pub baseline: ComparisonRow,
}

pub fn table3_pairs() -> Result<Vec<ComparisonPair>> {
    TABLE3_PAIRS
        .iter()
        .map(|&((k, m, t, q), (mp, qp))| {
            Ok(ComparisonPair {
                this: scheme_row(&ConstructionParams::new(k, m, t, q)?)?,
                baseline: yan_pda_params(mp, qp)?,
            })
        })
        .collect()
}

pub fn table3() -> Result<Table> {
    let headers = [
        "kmtq", "mq_prime", "K1", "K2", "U1", "U2", "U1_exact", "U2_exact", "F1", "F2", "F1_exp", "F2_exp", "gamma1",
        "gamma2", "R1", "R2",
    ];
    let rows = table3_pairs()?
        .into_iter()
        .map(|p| {
            let (a, b) = (&p.this, &p.baseline);
            vec![
                a.label.clone(),
                b.label.clone(),
                a.users.to_string(),
                b.users.to_string(),
                two_decimals(&a.uncached),
                two_decimals(&b.uncached),
                a.uncached.to_string(),
                b.uncached.to_string(),
                a.subpacketization.to_string(),
                b.subpacketization.to_string(),
                decimal_exponent(&a.subpacketization).to_string(),
                decimal_exponent(&b.subpacketization).to_string(),
                a.gain.to_string(),
                b.gain.to_string(),
                a.rate.to_string(),
                b.rate.to_string(),
            ]
        })
        .collect();
    Ok(Table {
        title: "Scheme versus PDA baseline".into(),
        headers: headers.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

/// log_q of a big integer, accurate to f64 precision.
pub fn log_q(x: &BigUint, q: u64) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    (top.ln() + shift as f64 * std::f64::consts::LN_2) / (q as f64).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub k_minus_t: usize,
    pub m: usize,
    #[serde(serialize_with = "as_string")]
    pub users: BigUint,
    #[serde(serialize_with = "as_string")]
    pub subpacketization: BigUint,
    #[serde(serialize_with = "as_string")]
    pub rate: BigRational,
    #[serde(serialize_with = "as_string")]
    pub uncached: BigRational,
    /// q^{k-t} <= K <= q^{k-t+1}
    pub k_sandwich: bool,
    /// R (m+2) = K (1 - M/N)
    pub rate_identity: bool,
    /// F (m+1)! <= K q^{αm + (m+1)^2}
    pub f_bound: bool,
    /// log_q F / (log_q K)^2
    pub log_ratio: f64,
    /// R / (K / log_q K) divided by U
    pub rate_scaling: f64,
}

fn as_string<T: std::fmt::Display, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

impl SweepRow {
    pub fn checks_hold(&self) -> bool {
        self.k_sandwich && self.rate_identity && self.f_bound
    }
}

/// Formula-only sweep over k - t in `range` with q and α = k - m - t fixed.
/// Parameters depend on k - t alone, so t = 1 is used.
pub fn asymptotic_sweep(q: u64, alpha: usize, range: std::ops::RangeInclusive<usize>) -> Result<Vec<SweepRow>> {
    if alpha == 0 {
        return Err(Error::Degenerate("α = 0 gives c = 0: every subfile is cached everywhere".into()));
    }
    range
        .map(|s| {
            if s < alpha {
                return Err(Error::InvalidParams(format!("k - t = {s} is smaller than α = {alpha}")));
            }
            let m = s - alpha;
            let cp = ConstructionParams::new(s + 1, m, 1, q)?;
            let p = params_from(&cp)?;
            let qb = BigUint::from(q);
            let k_sandwich = qb.pow(s as u32) <= p.users && p.users <= qb.pow(s as u32 + 1);
            let rate_identity = &p.rate * int(m as u64 + 2) == int(p.users.clone()) * p.uncached_fraction();
            let fact: BigUint = (1..=m as u64 + 1).product();
            let f_bound = &p.subpacketization * fact <= &p.users * qb.pow((alpha * m + (m + 1) * (m + 1)) as u32);
            let lk = log_q(&p.users, q);
            let log_ratio = log_q(&p.subpacketization, q) / (lk * lk);
            let u = p.uncached_fraction();
            let rate_scaling = (p.rate.clone() / int(p.users.clone()) / &u).to_f64().unwrap_or(f64::NAN) * lk;
            Ok(SweepRow {
                k_minus_t: s,
                m,
                users: p.users.clone(),
                subpacketization: p.subpacketization.clone(),
                rate: p.rate.clone(),
                uncached: u,
                k_sandwich,
                rate_identity,
                f_bound,
                log_ratio,
                rate_scaling,
            })
        })
        .collect()
}

pub fn sweep_table(q: u64, alpha: usize, rows: &[SweepRow]) -> Table {
    let headers = [
        "k_minus_t", "m", "K", "F", "R", "U", "k_sandwich", "rate_identity", "f_bound", "log_ratio", "rate_scaling",
    ];
    Table {
        title: format!("Sweep q = {q}, α = {alpha}"),
        headers: headers.iter().map(|s| s.to_string()).collect(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.k_minus_t.to_string(),
                    r.m.to_string(),
                    r.users.to_string(),
                    r.subpacketization.to_string(),
                    r.rate.to_string(),
                    r.uncached.to_string(),
                    r.k_sandwich.to_string(),
                    r.rate_identity.to_string(),
                    r.f_bound.to_string(),
                    format!("{:.4}", r.log_ratio),
                    format!("{:.4}", r.rate_scaling),
                ]
            })
            .collect(),
    }
}
