//! Plain-text bundle format for fitted ensemble models.
//!
//! Line-oriented; `#` comments and blank lines are ignored. Shape:
//!
//! ```text
//! cpxr-bundle v1
//! output log10_ksat_cm_per_day
//! features sand silt clay dg sigma_g bulk_density diameter height
//! weighting arr
//!
//! baseline
//! intercept -1180
//! sand 11.89
//! end
//!
//! pattern 1 arr 1.5 support 16.0
//! dg 0.495 0.74
//! clay -inf 15.8
//! local
//! intercept -1355.1
//! sand 14.07
//! end
//! ```
//!
//! Criteria lines are `feature lower upper` with `-inf`/`+inf` for one-sided
//! intervals; coefficient lines are `feature value`. Every feature mentioned
//! anywhere must appear in the `features` declaration.

use std::collections::HashSet;

use thiserror::Error;

use super::{CpxrModel, Interval, LinearModel, Pattern, Weighting};
use crate::features::Feature;
use crate::{real, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BundleError {
    #[error("bundle parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bundle schema error at line {line}: {msg}")]
    Schema { line: usize, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> BundleError {
    BundleError::Parse {
        line,
        msg: msg.into(),
    }
}

fn schema_err(line: usize, msg: impl Into<String>) -> BundleError {
    BundleError::Schema {
        line,
        msg: msg.into(),
    }
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Cursor { lines, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.pos).copied();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |(n, _)| *n)
    }
}

fn parse_number<F: Scalar>(token: &str, line: usize, what: &str) -> Result<F, BundleError> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("{what} `{token}` is not a number")))?;
    if !value.is_finite() {
        return Err(parse_err(line, format!("{what} `{token}` is not finite")));
    }
    Ok(real(value))
}

fn resolve_feature(
    token: &str,
    declared: &[Feature],
    line: usize,
) -> Result<Feature, BundleError> {
    let feature = Feature::parse(token)
        .ok_or_else(|| schema_err(line, format!("unknown feature `{token}`")))?;
    if !declared.contains(&feature) {
        return Err(schema_err(
            line,
            format!("feature `{token}` is not in the features declaration"),
        ));
    }
    Ok(feature)
}

/// Reads `intercept <num>` plus `<feature> <num>` lines until `end`.
fn parse_linear_block<F: Scalar>(
    cursor: &mut Cursor,
    declared: &[Feature],
    context: &str,
) -> Result<LinearModel<F>, BundleError> {
    let mut intercept: Option<F> = None;
    let mut coefficients: Vec<(Feature, F)> = Vec::new();
    loop {
        let (line, text) = cursor
            .next()
            .ok_or_else(|| parse_err(cursor.last_line(), format!("{context} not closed by `end`")))?;
        if text == "end" {
            let intercept = intercept
                .ok_or_else(|| schema_err(line, format!("{context} has no intercept")))?;
            return Ok(LinearModel {
                intercept,
                coefficients,
            });
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_err(
                line,
                format!("expected `intercept <value>` or `<feature> <value>`, got `{text}`"),
            ));
        }
        if tokens[0] == "intercept" {
            if intercept.is_some() {
                return Err(schema_err(line, format!("{context} has two intercepts")));
            }
            intercept = Some(parse_number(tokens[1], line, "intercept")?);
        } else {
            let feature = resolve_feature(tokens[0], declared, line)?;
            if coefficients.iter().any(|(f, _)| *f == feature) {
                return Err(schema_err(
                    line,
                    format!("{context} repeats coefficient `{}`", tokens[0]),
                ));
            }
            coefficients.push((feature, parse_number(tokens[1], line, "coefficient")?));
        }
    }
}

pub(super) fn parse<F: Scalar>(text: &str) -> Result<CpxrModel<F>, BundleError> {
    let mut cursor = Cursor::new(text);

    let (line, magic) = cursor
        .next()
        .ok_or_else(|| parse_err(0, "empty bundle"))?;
    if magic != "cpxr-bundle v1" {
        return Err(parse_err(
            line,
            format!("expected `cpxr-bundle v1` header, got `{magic}`"),
        ));
    }

    let mut output: Option<String> = None;
    let mut features: Option<Vec<Feature>> = None;
    let mut weighting: Option<Weighting> = None;
    for _ in 0..3 {
        let (line, text) = cursor
            .next()
            .ok_or_else(|| parse_err(cursor.last_line(), "truncated header"))?;
        let (key, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        match key {
            "output" if output.is_none() && !rest.is_empty() => {
                output = Some(rest.trim().to_string());
            }
            "features" if features.is_none() => {
                let mut list = Vec::new();
                for token in rest.split_whitespace() {
                    let feature = Feature::parse(token)
                        .ok_or_else(|| schema_err(line, format!("unknown feature `{token}`")))?;
                    if list.contains(&feature) {
                        return Err(schema_err(line, format!("duplicate feature `{token}`")));
                    }
                    list.push(feature);
                }
                if list.is_empty() {
                    return Err(schema_err(line, "features declaration is empty"));
                }
                features = Some(list);
            }
            "weighting" if weighting.is_none() => {
                weighting = Some(match rest.trim() {
                    "arr" => Weighting::ArrProportional,
                    "uniform" => Weighting::Uniform,
                    other => {
                        return Err(parse_err(
                            line,
                            format!("weighting must be `arr` or `uniform`, got `{other}`"),
                        ))
                    }
                });
            }
            _ => {
                return Err(parse_err(
                    line,
                    format!("expected output/features/weighting header, got `{text}`"),
                ))
            }
        }
    }
    let output = output.unwrap();
    let features = features.unwrap();
    let weighting = weighting.unwrap();

    let (line, keyword) = cursor
        .next()
        .ok_or_else(|| parse_err(cursor.last_line(), "missing baseline block"))?;
    if keyword != "baseline" {
        return Err(parse_err(line, format!("expected `baseline`, got `{keyword}`")));
    }
    let baseline = parse_linear_block(&mut cursor, &features, "baseline block")?;

    let mut entries: Vec<(Pattern<F>, LinearModel<F>)> = Vec::new();
    let mut seen_ids: HashSet<u32> = HashSet::new();
    while let Some((line, text)) = cursor.next() {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 6 || tokens[0] != "pattern" || tokens[2] != "arr" || tokens[4] != "support"
        {
            return Err(parse_err(
                line,
                format!("expected `pattern <id> arr <value> support <value>`, got `{text}`"),
            ));
        }
        let id: u32 = tokens[1]
            .parse()
            .map_err(|_| parse_err(line, format!("pattern id `{}` is not an integer", tokens[1])))?;
        if !seen_ids.insert(id) {
            return Err(schema_err(line, format!("duplicate pattern id {id}")));
        }
        let arr: F = parse_number(tokens[3], line, "arr")?;
        if arr < F::zero() {
            return Err(schema_err(line, format!("arr must be >= 0, got {}", tokens[3])));
        }
        let support_pct: F = parse_number(tokens[5], line, "support")?;
        if support_pct < F::zero() || support_pct > real(100.0) {
            return Err(schema_err(
                line,
                format!("support must be a percentage, got {}", tokens[5]),
            ));
        }

        let mut criteria: Vec<(Feature, Interval<F>)> = Vec::new();
        let local = loop {
            let (line, text) = cursor.next().ok_or_else(|| {
                parse_err(cursor.last_line(), format!("pattern {id} has no local block"))
            })?;
            if text == "local" {
                if criteria.is_empty() {
                    return Err(schema_err(line, format!("pattern {id} has no criteria")));
                }
                break parse_linear_block(
                    &mut cursor,
                    &features,
                    &format!("local block of pattern {id}"),
                )?;
            }
            let tokens: Vec<&str> = text.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(parse_err(
                    line,
                    format!("expected `<feature> <lower> <upper>` criterion, got `{text}`"),
                ));
            }
            let feature = resolve_feature(tokens[0], &features, line)?;
            if criteria.iter().any(|(f, _)| *f == feature) {
                return Err(schema_err(
                    line,
                    format!("pattern {id} repeats criterion `{}`", tokens[0]),
                ));
            }
            let lower = match tokens[1] {
                "-inf" => None,
                t => Some(parse_number(t, line, "lower bound")?),
            };
            let upper = match tokens[2] {
                "+inf" => None,
                t => Some(parse_number(t, line, "upper bound")?),
            };
            let interval = Interval::new(lower, upper)
                .map_err(|e| schema_err(line, format!("bad interval for `{}`: {e}", tokens[0])))?;
            criteria.push((feature, interval));
        };

        entries.push((
            Pattern {
                id,
                criteria,
                arr,
                support_pct,
            },
            local,
        ));
    }

    Ok(CpxrModel {
        features,
        output,
        weighting,
        baseline,
        entries,
    })
}

fn push_linear<F: Scalar>(out: &mut String, model: &LinearModel<F>) {
    out.push_str(&format!("intercept {}\n", model.intercept));
    for (feature, coef) in &model.coefficients {
        out.push_str(&format!("{} {}\n", feature.name(), coef));
    }
    out.push_str("end\n");
}

pub(super) fn serialize<F: Scalar>(model: &CpxrModel<F>) -> String {
    let mut out = String::from("cpxr-bundle v1\n");
    out.push_str(&format!("output {}\n", model.output));
    out.push_str("features");
    for feature in &model.features {
        out.push(' ');
        out.push_str(feature.name());
    }
    out.push('\n');
    out.push_str(match model.weighting {
        Weighting::ArrProportional => "weighting arr\n",
        Weighting::Uniform => "weighting uniform\n",
    });
    out.push_str("\nbaseline\n");
    push_linear(&mut out, &model.baseline);
    for (pattern, local) in &model.entries {
        out.push_str(&format!(
            "\npattern {} arr {} support {}\n",
            pattern.id, pattern.arr, pattern.support_pct
        ));
        for (feature, interval) in &pattern.criteria {
            let lower = interval
                .lower()
                .map_or_else(|| "-inf".to_string(), |b| b.to_string());
            let upper = interval
                .upper()
                .map_or_else(|| "+inf".to_string(), |b| b.to_string());
            out.push_str(&format!("{} {} {}\n", feature.name(), lower, upper));
        }
        out.push_str("local\n");
        push_linear(&mut out, local);
    }
    out
}
