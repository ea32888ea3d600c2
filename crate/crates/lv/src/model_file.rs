//! Versioned text serialization of [`ModelParams`].
//!
//! ```text
//! lv-model	1	tagset=<fnv64 hex>	prefix_len=2	lambda_max=4.0000000000000000e0	alpha=…	log_floor=…
//! table_id	context	target	probability
//! …
//! end	<record count>	-	-
//! ```
//!
//! Probabilities are written with 17 significant digits, which round-trips
//! every `f64` exactly. Records that carry no probability (the tagset,
//! vocabulary and prefix inventories) put `-` in the last column. Every
//! sparse row has a `<table>.rest` record holding the probability shared by
//! inventory members without an entry of their own.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use lv_core::corpus::{NUM_STATES, NUM_TAGS};
use lv_core::model::{
    InitialDist, LexVariant, LexicalTable, PosTagger, SparseRow, TransFirst, TransPosCond, TransSecond,
    UnknownTable,
};
use lv_core::{ModelParams, SmoothingConfig, TagSet};

use crate::error::{LvError, Result};

pub const MAGIC: &str = "lv-model";
pub const VERSION: u32 = 1;
const NONE: &str = "-";

const LEX_IDS: [&str; 3] = ["lex1", "lex2", "lexpos"];
const UNK_IDS: [&str; 3] = ["unk1", "unk2", "unkpos"];

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Writer {
    out: String,
    records: usize,
}

impl Writer {
    fn rec(&mut self, table: &str, context: &str, target: &str, prob: Option<f64>) {
        let p = prob.map(num).unwrap_or_else(|| NONE.to_string());
        let _ = writeln!(self.out, "{table}\t{context}\t{target}\t{p}");
        self.records += 1;
    }

    fn sparse(&mut self, table: &str, rows: &[SparseRow]) {
        for (r, row) in rows.iter().enumerate() {
            let ctx = r.to_string();
            for (item, &p) in &row.entries {
                self.rec(table, &ctx, item, Some(p));
            }
            self.rec(&format!("{table}.rest"), &ctx, NONE, Some(row.rest));
        }
    }
}

pub fn serialize(params: &ModelParams) -> String {
    let mut w = Writer { out: String::new(), records: 0 };
    let _ = writeln!(
        w.out,
        "{MAGIC}\t{VERSION}\ttagset={:016x}\tprefix_len={}\tlambda_max={}\talpha={}\tlog_floor={}",
        params.tagset.fingerprint(),
        params.prefix_len,
        num(params.lambda_max),
        num(params.smoothing.alpha),
        num(params.smoothing.log_floor),
    );
    for (i, name) in params.tagset.names().iter().enumerate() {
        w.rec("tag", &i.to_string(), name, None);
    }
    for v in &params.vocabulary {
        w.rec("vocab", NONE, v, None);
    }
    for p in &params.prefixes {
        w.rec("prefix", NONE, p, None);
    }
    for (k, &p) in params.pi.probs.iter().enumerate() {
        w.rec("pi", NONE, &k.to_string(), Some(p));
    }
    for (j, row) in params.trans_first.table.iter().enumerate() {
        for (k, &p) in row.iter().enumerate() {
            w.rec("trans1", &j.to_string(), &k.to_string(), Some(p));
        }
    }
    for (i, block) in params.trans_second.table.iter().enumerate() {
        for (j, row) in block.iter().enumerate() {
            for (k, &p) in row.iter().enumerate() {
                w.rec("trans2", &format!("{i},{j}"), &k.to_string(), Some(p));
            }
        }
    }
    for (t, block) in params.trans_pos.table.iter().enumerate() {
        for (j, row) in block.iter().enumerate() {
            for (k, &p) in row.iter().enumerate() {
                w.rec("transpos", &format!("{t},{j}"), &k.to_string(), Some(p));
            }
        }
    }
    for (id, table) in LEX_IDS.iter().zip(&params.lexical) {
        w.sparse(id, &table.rows);
    }
    for (id, table) in UNK_IDS.iter().zip(&params.unknown) {
        w.sparse(id, &table.rows);
    }
    if let Some(tagger) = &params.pos_tagger {
        for (t, &p) in tagger.initial.iter().enumerate() {
            w.rec("postag.init", NONE, &t.to_string(), Some(p));
        }
        for (t, row) in tagger.trans.iter().enumerate() {
            for (u, &p) in row.iter().enumerate() {
                w.rec("postag.trans", &t.to_string(), &u.to_string(), Some(p));
            }
        }
        w.sparse("postag.lex", &tagger.lexical);
        w.sparse("postag.unk", &tagger.unknown);
    }
    let n = w.records;
    let _ = writeln!(w.out, "end\t{n}\t{NONE}\t{NONE}");
    w.out
}

fn bad(line: usize, msg: impl std::fmt::Display) -> LvError {
    LvError::Model(format!("line {line}: {msg}"))
}

struct Header {
    fingerprint: u64,
    prefix_len: usize,
    lambda_max: f64,
    alpha: f64,
    log_floor: f64,
}

fn parse_header(line: &str) -> Result<Header> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.first() != Some(&MAGIC) {
        return Err(bad(1, "not an lv model file"));
    }
    match fields.get(1).and_then(|v| v.parse::<u32>().ok()) {
        Some(VERSION) => {}
        Some(v) => return Err(bad(1, format!("unsupported format version {v}, expected {VERSION}"))),
        None => return Err(bad(1, "missing format version")),
    }
    let mut kv = BTreeMap::new();
    for f in &fields[2..] {
        let (k, v) = f.split_once('=').ok_or_else(|| bad(1, format!("malformed header field `{f}`")))?;
        kv.insert(k, v);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| bad(1, format!("header lacks `{k}`")));
    let float = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(1, format!("invalid `{k}`"))) };
    Ok(Header {
        fingerprint: u64::from_str_radix(get("tagset")?, 16).map_err(|_| bad(1, "invalid tagset hash"))?,
        prefix_len: get("prefix_len")?.parse().map_err(|_| bad(1, "invalid prefix_len"))?,
        lambda_max: float("lambda_max")?,
        alpha: float("alpha")?,
        log_floor: float("log_floor")?,
    })
}

fn index(s: &str, bound: usize, line: usize) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(i) if i < bound => Ok(i),
        _ => Err(bad(line, format!("index `{s}` out of range"))),
    }
}

fn pair(s: &str, a: usize, b: usize, line: usize) -> Result<(usize, usize)> {
    let (x, y) = s.split_once(',').ok_or_else(|| bad(line, format!("expected a pair, got `{s}`")))?;
    Ok((index(x, a, line)?, index(y, b, line)?))
}

#[derive(Clone)]
struct RowBuilder {
    entries: BTreeMap<String, f64>,
    rest: Option<f64>,
}

fn rows(n: usize) -> Vec<RowBuilder> {
    vec![RowBuilder { entries: BTreeMap::new(), rest: None }; n]
}

fn finish_rows(table: &str, rows: Vec<RowBuilder>) -> Result<Vec<SparseRow>> {
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| {
            let rest = r.rest.ok_or_else(|| LvError::Model(format!("{table} row {i} lacks its rest record")))?;
            Ok(SparseRow { entries: r.entries, rest })
        })
        .collect()
}

fn filled<const N: usize>(table: &str, xs: &[f64; N]) -> Result<[f64; N]> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(LvError::Model(format!("table {table} is incomplete")));
    }
    Ok(*xs)
}

pub fn deserialize(text: &str) -> Result<ModelParams> {
    let mut lines = text.lines();
    let header = parse_header(lines.next().ok_or_else(|| bad(1, "empty model file"))?)?;
    let mut names: Vec<Option<String>> = vec![None; NUM_TAGS];
    let mut vocabulary = BTreeSet::new();
    let mut prefixes = BTreeSet::new();
    let nan = f64::NAN;
    let mut pi = [nan; NUM_STATES];
    let mut first = [[nan; NUM_STATES]; NUM_STATES];
    let mut second = [[[nan; NUM_STATES]; NUM_STATES]; NUM_STATES];
    let mut pos = [[[nan; NUM_STATES]; NUM_STATES]; NUM_TAGS];
    let mut lex: Vec<Vec<RowBuilder>> = LexVariant::ALL.iter().map(|v| rows(v.contexts())).collect();
    let mut unk: Vec<Vec<RowBuilder>> = LexVariant::ALL.iter().map(|v| rows(v.contexts())).collect();
    let mut tag_init = [nan; NUM_TAGS];
    let mut tag_trans = [[nan; NUM_TAGS]; NUM_TAGS];
    let mut tag_lex = rows(NUM_TAGS);
    let mut tag_unk = rows(NUM_TAGS);
    let mut has_tagger = false;
    let mut records = 0usize;
    let mut ended = false;

    for (i, line) in lines.enumerate() {
        let n = i + 2;
        if ended {
            if line.trim().is_empty() {
                continue;
            }
            return Err(bad(n, "content after the end trailer"));
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(bad(n, format!("expected 4 columns, found {}", f.len())));
        }
        let (table, ctx, target, prob) = (f[0], f[1], f[2], f[3]);
        if table == "end" {
            let count: usize = ctx.parse().map_err(|_| bad(n, "invalid record count"))?;
            if count != records {
                return Err(bad(n, format!("trailer announces {count} records, found {records}")));
            }
            ended = true;
            continue;
        }
        records += 1;
        let p = || -> Result<f64> {
            let v: f64 = prob.parse().map_err(|_| bad(n, format!("invalid probability `{prob}`")))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(n, format!("probability {v} outside [0, 1]")));
            }
            Ok(v)
        };
        let (base, is_rest) = match table.strip_suffix(".rest") {
            Some(b) => (b, true),
            None => (table, false),
        };
        let sparse_target = |rows: &mut Vec<RowBuilder>, bound: usize| -> Result<()> {
            let r = index(ctx, bound, n)?;
            if is_rest {
                rows[r].rest = Some(p()?);
            } else {
                rows[r].entries.insert(target.to_string(), p()?);
            }
            Ok(())
        };
        match base {
            "tag" if !is_rest => names[index(ctx, NUM_TAGS, n)?] = Some(target.to_string()),
            "vocab" if !is_rest => {
                vocabulary.insert(target.to_string());
            }
            "prefix" if !is_rest => {
                prefixes.insert(target.to_string());
            }
            "pi" if !is_rest => pi[index(target, NUM_STATES, n)?] = p()?,
            "trans1" if !is_rest => {
                first[index(ctx, NUM_STATES, n)?][index(target, NUM_STATES, n)?] = p()?;
            }
            "trans2" if !is_rest => {
                let (a, b) = pair(ctx, NUM_STATES, NUM_STATES, n)?;
                second[a][b][index(target, NUM_STATES, n)?] = p()?;
            }
            "transpos" if !is_rest => {
                let (a, b) = pair(ctx, NUM_TAGS, NUM_STATES, n)?;
                pos[a][b][index(target, NUM_STATES, n)?] = p()?;
            }
            "postag.init" if !is_rest => {
                has_tagger = true;
                tag_init[index(target, NUM_TAGS, n)?] = p()?;
            }
            "postag.trans" if !is_rest => {
                has_tagger = true;
                tag_trans[index(ctx, NUM_TAGS, n)?][index(target, NUM_TAGS, n)?] = p()?;
            }
            "postag.lex" => {
                has_tagger = true;
                sparse_target(&mut tag_lex, NUM_TAGS)?;
            }
            "postag.unk" => {
                has_tagger = true;
                sparse_target(&mut tag_unk, NUM_TAGS)?;
            }
            other => {
                if let Some(v) = LEX_IDS.iter().position(|id| *id == other) {
                    sparse_target(&mut lex[v], LexVariant::ALL[v].contexts())?;
                } else if let Some(v) = UNK_IDS.iter().position(|id| *id == other) {
                    sparse_target(&mut unk[v], LexVariant::ALL[v].contexts())?;
                } else {
                    return Err(bad(n, format!("unknown table `{table}`")));
                }
            }
        }
    }
    if !ended {
        return Err(LvError::Model("truncated: missing end trailer".to_string()));
    }

    let names: Vec<String> = names
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| LvError::Model("tagset records incomplete".to_string()))?;
    let tagset = TagSet::new(names.iter().map(String::as_str)).map_err(|e| LvError::Model(e.to_string()))?;
    if tagset.fingerprint() != header.fingerprint {
        return Err(LvError::Model("tagset hash does not match the tag records".to_string()));
    }

    let mut lex_tables = Vec::new();
    let mut unk_tables = Vec::new();
    for (v, (l, u)) in lex.into_iter().zip(unk).enumerate() {
        lex_tables.push(LexicalTable { variant: LexVariant::ALL[v], rows: finish_rows(LEX_IDS[v], l)? });
        unk_tables.push(UnknownTable {
            variant: LexVariant::ALL[v],
            prefix_len: header.prefix_len,
            rows: finish_rows(UNK_IDS[v], u)?,
        });
    }
    let pos_tagger = if has_tagger {
        Some(PosTagger {
            initial: filled("postag.init", &tag_init)?,
            trans: tag_trans.iter().map(|r| filled("postag.trans", r)).collect::<Result<Vec<_>>>()?
                .try_into()
                .expect("fixed row count"),
            lexical: finish_rows("postag.lex", tag_lex)?,
            unknown: finish_rows("postag.unk", tag_unk)?,
        })
    } else {
        None
    };
    let dense2 = |t: &str, m: &[[f64; NUM_STATES]]| -> Result<Vec<[f64; NUM_STATES]>> {
        m.iter().map(|r| filled(t, r)).collect()
    };
    let second: Vec<[[f64; NUM_STATES]; NUM_STATES]> = second
        .iter()
        .map(|b| dense2("trans2", b).map(|v| v.try_into().expect("fixed row count")))
        .collect::<Result<_>>()?;
    let pos: Vec<[[f64; NUM_STATES]; NUM_STATES]> = pos
        .iter()
        .map(|b| dense2("transpos", b).map(|v| v.try_into().expect("fixed row count")))
        .collect::<Result<_>>()?;

    let params = ModelParams {
        tagset,
        smoothing: SmoothingConfig { alpha: header.alpha, log_floor: header.log_floor },
        prefix_len: header.prefix_len,
        lambda_max: header.lambda_max,
        vocabulary,
        prefixes,
        pi: InitialDist { probs: filled("pi", &pi)? },
        trans_first: TransFirst { table: dense2("trans1", &first)?.try_into().expect("fixed row count") },
        trans_second: TransSecond { table: second.try_into().expect("fixed row count") },
        trans_pos: TransPosCond { table: pos.try_into().expect("fixed row count") },
        lexical: lex_tables.try_into().expect("three variants"),
        unknown: unk_tables.try_into().expect("three variants"),
        pos_tagger,
    };
    Ok(params)
}

/// Fails when the model was trained under a different tagset.
pub fn check_tagset(params: &ModelParams, tagset: &TagSet) -> Result<()> {
    let (expected, found) = (params.tagset.fingerprint(), tagset.fingerprint());
    if expected != found {
        return Err(LvError::TagsetMismatch { expected, found });
    }
    Ok(())
}
