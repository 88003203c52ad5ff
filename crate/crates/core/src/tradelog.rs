//! Trade-log CSV: the replay interchange format.
//!
//! One row per fixed leg, batch rows grouped by step:
//!
//! ```csv
//! step,kind,token,signed_amount,unknown_token
//! 1,swap,A,100,B
//! 2,batch,A,25,T4
//! 2,batch,B,-10,T4
//! ```
//!
//! `POOL_TOKEN` names the pool token in either column. Rows of one step
//! must agree on kind and unknown token and steps must strictly increase.

use std::io;

use crate::doc::{format_decimal, parse_decimal};
use crate::error::{Error, Result};
use crate::settle::{Leg, TokenRef, TradeKind, TradeSpec};

const HEADER: [&str; 5] = ["step", "kind", "token", "signed_amount", "unknown_token"];

/// Reads a trade log, returning `(step, spec)` pairs in file order.
pub fn read_trade_log<R: io::Read>(reader: R) -> Result<Vec<(u64, TradeSpec)>> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| Error::MalformedDocument(e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::MalformedDocument(format!(
            "expected header {}, got {}",
            HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut entries: Vec<(u64, TradeSpec)> = Vec::new();
    for (line, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedDocument(e.to_string()))?;
        if record.len() != HEADER.len() {
            return Err(Error::MalformedDocument(format!(
                "row {} has {} fields",
                line + 2,
                record.len()
            )));
        }
        let step: u64 = record[0]
            .trim()
            .parse()
            .map_err(|_| Error::MalformedDocument(format!("bad step {:?}", &record[0])))?;
        let kind = TradeKind::parse(record[1].trim())
            .map_err(|e| Error::MalformedDocument(e.to_string()))?;
        let token = TokenRef::from_symbol(record[2].trim());
        let amount = parse_decimal(&record[3])?;
        let unknown = TokenRef::from_symbol(record[4].trim());
        let leg = Leg { token, amount };

        match entries.last_mut() {
            Some((last_step, spec)) if *last_step == step => {
                if spec.kind != kind || spec.unknown != unknown {
                    return Err(Error::MalformedDocument(format!(
                        "step {step} rows disagree on kind or unknown token"
                    )));
                }
                spec.legs.push(leg);
            }
            Some((last_step, _)) if *last_step > step => {
                return Err(Error::MalformedDocument(format!(
                    "step {step} appears after step {last_step}"
                )));
            }
            _ => entries.push((
                step,
                TradeSpec {
                    kind,
                    legs: vec![leg],
                    unknown,
                },
            )),
        }
    }
    Ok(entries)
}

/// Writes a trade log. Every trade needs at least one fixed leg to carry
/// its row (an identity trade is a zero-amount leg).
pub fn write_trade_log<W: io::Write>(writer: W, entries: &[(u64, TradeSpec)]) -> Result<()> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer
        .write_record(HEADER)
        .map_err(|e| Error::MalformedDocument(e.to_string()))?;
    for (step, spec) in entries {
        if spec.legs.is_empty() {
            return Err(Error::InvalidTrade(format!(
                "step {step} trade has no fixed legs to serialize"
            )));
        }
        for leg in &spec.legs {
            csv_writer
                .write_record([
                    step.to_string().as_str(),
                    spec.kind.as_str(),
                    leg.token.symbol(),
                    &format_decimal(leg.amount),
                    spec.unknown.symbol(),
                ])
                .map_err(|e| Error::MalformedDocument(e.to_string()))?;
        }
    }
    csv_writer
        .flush()
        .map_err(|e| Error::MalformedDocument(e.to_string()))?;
    Ok(())
}
