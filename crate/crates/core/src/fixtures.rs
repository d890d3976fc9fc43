//! The published operation tables, built from their compact row form.
//!
//! Rows list only triples whose value is not forced by the majority rule.
//! A "set" row assigns one value to every ordering of a three-element set.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::op::TernaryOp;
use crate::star;
use crate::universe::Universe;

/// Which published table a fixture comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    /// Three-element majority generators of minimal clones.
    Table1,
    /// Non-conservative four-element generators.
    Table2,
    /// The 26 majority operations of the five-element clone.
    Table3,
    /// Computed from other fixtures.
    Derived,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Table1 => "Table 1",
            Source::Table2 => "Table 2",
            Source::Table3 => "Table 3",
            Source::Derived => "derived",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub source: Source,
    pub op: TernaryOp,
}

enum Row {
    Ordered(Vec<[&'static str; 3]>, &'static str),
    Set([&'static str; 3], &'static str),
}

type RowSpec = ((&'static [[&'static str; 3]], bool), &'static str);

fn expand(rows: &[RowSpec], cols: usize) -> Vec<Vec<Row>> {
    // one Vec<Row> per column
    let mut out: Vec<Vec<Row>> = (0..cols).map(|_| Vec::new()).collect();
    for ((triples, is_set), values) in rows {
        let values: Vec<&'static str> = values.split_whitespace().collect();
        assert_eq!(values.len(), cols, "row width");
        for (col, v) in values.into_iter().enumerate() {
            if *is_set {
                out[col].push(Row::Set(triples[0], v));
            } else {
                out[col].push(Row::Ordered(triples.to_vec(), v));
            }
        }
    }
    out
}

fn build(universe: &Arc<Universe>, rows: &[Row], subst: &[(&str, &str)]) -> Result<TernaryOp> {
    let n = universe.size();
    let mut table: Vec<Option<u8>> = vec![None; n * n * n];
    let resolve = |label: &str| -> Result<u8> {
        let label = subst.iter().find(|(k, _)| *k == label).map_or(label, |(_, v)| v);
        universe.parse_element(label)
    };
    let mut assign = |t: [u8; 3], v: u8| -> Result<()> {
        let i = crate::op::index(n, t[0], t[1], t[2]);
        match table[i] {
            Some(old) if old != v => Err(Error::InvalidTable(format!("conflicting values at {t:?}"))),
            _ => {
                table[i] = Some(v);
                Ok(())
            }
        }
    };
    for row in rows {
        match row {
            Row::Ordered(ts, v) => {
                let v = resolve(v)?;
                for t in ts {
                    assign([resolve(t[0])?, resolve(t[1])?, resolve(t[2])?], v)?;
                }
            }
            Row::Set(s, v) => {
                let v = resolve(v)?;
                let [a, b, c] = [resolve(s[0])?, resolve(s[1])?, resolve(s[2])?];
                for t in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    assign(t, v)?;
                }
            }
        }
    }
    TernaryOp::majority_from_fn(universe.clone(), |t| {
        table[crate::op::index(n, t[0], t[1], t[2])].unwrap_or(u8::MAX)
    })
    .map_err(|_| Error::InvalidTable("incomplete fixture rows".into()))
}

const T1_NAMES: [&str; 12] =
    ["m1", "m2", "d2", "d3", "m3", "m3_2", "m3_3", "m3_4", "m3_5", "m3_6", "m3_7", "m3_8"];

#[rustfmt::skip]
const T1_ROWS: &[RowSpec] = &[
    ((&[["1", "2", "3"]], false), "1  1 2 3  3 3 1 3 1 1 3 1"),
    ((&[["2", "3", "1"]], false), "1  2 3 1  3 1 3 3 1 3 1 1"),
    ((&[["3", "1", "2"]], false), "1  3 1 2  3 3 3 1 1 1 1 3"),
    ((&[["2", "1", "3"]], false), "1  2 1 3  1 3 1 1 3 1 3 3"),
    ((&[["1", "3", "2"]], false), "1  1 3 2  1 1 1 3 3 3 3 1"),
    ((&[["3", "2", "1"]], false), "1  3 2 1  1 1 3 1 3 3 1 3"),
];

const T2_NAMES: [&str; 12] =
    ["M1", "M2", "M2_2", "M2_3", "M3", "M3_2", "M3_3", "M3_4", "M3_5", "M3_6", "M3_7", "M3_8"];

#[rustfmt::skip]
const T2_ROWS: &[RowSpec] = &[
    ((&[["1", "2", "3"]], false), "4  4 2 3  3 3 4 3 4 4 3 4"),
    ((&[["2", "3", "1"]], false), "4  2 3 4  3 4 3 3 4 3 4 4"),
    ((&[["3", "1", "2"]], false), "4  3 4 2  3 3 3 4 4 4 4 3"),
    ((&[["2", "1", "3"]], false), "4  2 4 3  4 3 4 4 3 4 3 3"),
    ((&[["1", "3", "2"]], false), "4  4 3 2  4 4 4 3 3 3 3 4"),
    ((&[["3", "2", "1"]], false), "4  3 2 4  4 4 3 4 3 3 4 3"),
    ((&[["1", "2", "4"]], true),  "4  4 4 4  4 4 4 4 4 4 4 4"),
    ((&[["1", "3", "4"]], true),  "4  4 4 4  4 4 4 4 4 4 4 4"),
    ((&[["4", "2", "3"]], false), "4  4 2 3  3 3 4 3 4 4 3 4"),
    ((&[["2", "3", "4"]], false), "4  2 3 4  3 4 3 3 4 3 4 4"),
    ((&[["3", "4", "2"]], false), "4  3 4 2  3 3 3 4 4 4 4 3"),
    ((&[["2", "4", "3"]], false), "4  2 4 3  4 3 4 4 3 4 3 3"),
    ((&[["4", "3", "2"]], false), "4  4 3 2  4 4 4 3 3 3 3 4"),
    ((&[["3", "2", "4"]], false), "4  3 2 4  4 4 3 4 3 3 4 3"),
];

/// Column order: f1 f2 g1 .. g6; `u`/`v` are substituted per variant.
#[rustfmt::skip]
const T3_ROWS: &[RowSpec] = &[
    ((&[["0", "1", "1b"]], true),  "1 1 1 1 1 1 1 1"),
    ((&[["2", "1", "1b"]], true),  "1 1 1 1 1 1 1 1"),
    ((&[["0", "2", "2b"]], true),  "2 2 2 2 2 2 2 2"),
    ((&[["1", "2", "2b"]], true),  "2 2 2 2 2 2 2 2"),
    ((&[["1b", "2", "2b"]], true), "2 2 2 2 2 2 2 2"),
    ((&[["0", "1b", "2"], ["0", "1", "2b"], ["0", "1", "2"]], false), "1 2 1 2 2 2 1 1"),
    ((&[["1b", "2", "0"], ["1", "2b", "0"], ["1", "2", "0"]], false), "1 2 2 1 2 1 2 1"),
    ((&[["2", "0", "1b"], ["2b", "0", "1"], ["2", "0", "1"]], false), "1 2 2 2 1 1 1 2"),
    ((&[["2", "1b", "0"], ["2b", "1", "0"], ["2", "1", "0"]], false), "2 1 1 2 1 2 1 2"),
    ((&[["1b", "0", "2"], ["1", "0", "2b"], ["1", "0", "2"]], false), "2 1 1 1 2 2 2 1"),
    ((&[["0", "2", "1b"], ["0", "2b", "1"], ["0", "2", "1"]], false), "2 1 2 1 1 1 2 2"),
    ((&[["0", "1b", "2b"]], false), "1 2 u 2 2 2 v 1"),
    ((&[["1b", "2b", "0"]], false), "1 2 2 u 2 1 2 v"),
    ((&[["2b", "0", "1b"]], false), "1 2 2 2 u v 1 2"),
    ((&[["2b", "1b", "0"]], false), "2 1 v 2 1 2 u 2"),
    ((&[["1b", "0", "2b"]], false), "2 1 1 v 2 2 2 u"),
    ((&[["0", "2b", "1b"]], false), "2 1 2 1 v u 2 2"),
    ((&[["2b", "1", "1b"]], false), "1 1b 1 1b 1b 1b 1 1"),
    ((&[["1", "1b", "2b"]], false), "1 1b 1b 1 1b 1 1b 1"),
    ((&[["1b", "2b", "1"]], false), "1 1b 1b 1b 1 1 1 1b"),
    ((&[["1b", "1", "2b"]], false), "1b 1 1 1b 1 1b 1 1b"),
    ((&[["1", "2b", "1b"]], false), "1b 1 1 1 1b 1b 1b 1"),
    ((&[["2b", "1b", "1"]], false), "1b 1 1b 1 1 1 1b 1b"),
];

/// Element order of the five-element base set.
pub const FIVE_LABELS: [&str; 5] = ["0", "1", "2", "1b", "2b"];

/// The two values `u` and `v` range over.
pub const UV_VALUES: [&str; 2] = ["1", "1b"];

pub fn three_universe() -> Arc<Universe> {
    static U: OnceLock<Arc<Universe>> = OnceLock::new();
    U.get_or_init(|| Universe::one_based(3).unwrap().shared()).clone()
}

pub fn four_universe() -> Arc<Universe> {
    static U: OnceLock<Arc<Universe>> = OnceLock::new();
    U.get_or_init(|| Universe::one_based(4).unwrap().shared()).clone()
}

pub fn five_universe() -> Arc<Universe> {
    static U: OnceLock<Arc<Universe>> = OnceLock::new();
    U.get_or_init(|| Universe::new(FIVE_LABELS).unwrap().shared()).clone()
}

/// Name of the `g_i^{u,v}` fixture, e.g. `g1_1_1b`.
pub fn g_name(i: usize, u: &str, v: &str) -> String {
    format!("g{i}_{u}_{v}")
}

fn build_catalog() -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    let t1 = three_universe();
    for (name, rows) in T1_NAMES.iter().zip(expand(T1_ROWS, 12)) {
        out.push(Fixture { name: name.to_string(), source: Source::Table1, op: build(&t1, &rows, &[])? });
    }
    let t2 = four_universe();
    for (name, rows) in T2_NAMES.iter().zip(expand(T2_ROWS, 12)) {
        out.push(Fixture { name: name.to_string(), source: Source::Table2, op: build(&t2, &rows, &[])? });
    }
    let t3 = five_universe();
    let cols = expand(T3_ROWS, 8);
    for (name, rows) in ["f1", "f2"].iter().zip(&cols) {
        out.push(Fixture { name: name.to_string(), source: Source::Table3, op: build(&t3, rows, &[])? });
    }
    for (i, rows) in cols[2..].iter().enumerate() {
        for u in UV_VALUES {
            for v in UV_VALUES {
                let op = build(&t3, rows, &[("u", u), ("v", v)])?;
                out.push(Fixture { name: g_name(i + 1, u, v), source: Source::Table3, op });
            }
        }
    }
    let f1 = out.iter().find(|f| f.name == "f1").unwrap().op.clone();
    out.push(Fixture {
        name: "f1_star".into(),
        source: Source::Derived,
        op: star::star_extend(&f1, 1)?,
    });
    Ok(out)
}

/// All bundled fixtures in a fixed order.
pub fn all() -> &'static [Fixture] {
    static CATALOG: OnceLock<Vec<Fixture>> = OnceLock::new();
    CATALOG.get_or_init(|| build_catalog().expect("bundled fixtures are well formed"))
}

/// Looks a fixture up by name; `d1` is accepted for `m2`.
pub fn get(name: &str) -> Result<&'static TernaryOp> {
    let name = if name == "d1" { "m2" } else { name };
    all()
        .iter()
        .find(|f| f.name == name)
        .map(|f| &f.op)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

pub fn names() -> Vec<&'static str> {
    all().iter().map(|f| f.name.as_str()).collect()
}

pub fn by_source(source: Source) -> Vec<&'static Fixture> {
    all().iter().filter(|f| f.source == source).collect()
}

/// The 26 published majority operations of `[f1]`, keyed by name.
pub fn table3_members() -> BTreeMap<&'static str, &'static TernaryOp> {
    by_source(Source::Table3).into_iter().map(|f| (f.name.as_str(), &f.op)).collect()
}
