//! Group and field specifications: `Z`, `Z^2`, `C4`, `D3`, `S3`, `Q8`, `F2`, `F(g,h)`,
//! `csv:PATH`; `Q`, `GF(4)`, `GF(3^2)`.

use nearca::{Field, Group};

use crate::error::{CliError, CliResult};

fn bad(what: &str, src: &str) -> CliError {
    CliError::Usage(format!("cannot read {what} {src:?}"))
}

fn number<T: std::str::FromStr>(s: &str, what: &str, src: &str) -> CliResult<T> {
    s.trim().parse().map_err(|_| bad(what, src))
}

/// Strips `<...>` from `C<4>` style sizes.
fn size_arg(rest: &str) -> &str {
    rest.strip_prefix('<').and_then(|r| r.strip_suffix('>')).unwrap_or(rest)
}

pub fn parse_group(src: &str) -> CliResult<Group> {
    let s = src.trim();
    if let Some(path) = s.strip_prefix("csv:") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        let name = std::path::Path::new(path).file_stem().and_then(|n| n.to_str()).unwrap_or("G");
        return Ok(Group::from_cayley_csv(name, &text)?);
    }
    if s == "Z" {
        return Ok(Group::integers());
    }
    if let Some(d) = s.strip_prefix("Z^") {
        let d: usize = number(d, "group", src)?;
        if d == 0 || d > 8 {
            return Err(bad("group", src));
        }
        return Ok(Group::free_abelian(d));
    }
    if s == "Q8" {
        return Ok(Group::quaternion());
    }
    if let Some(rest) = s.strip_prefix("F(") {
        let inner = rest.strip_suffix(')').ok_or_else(|| bad("group", src))?;
        let gens: Vec<String> = inner.split(',').map(|g| g.trim().to_string()).collect();
        return Ok(Group::free_named(s, gens)?);
    }
    let (head, rest) = s.split_at(s.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(s.len()));
    let n: usize = number(size_arg(rest), "group", src)?;
    match head {
        "C" if (1..=4096).contains(&n) => Ok(Group::cyclic(n)),
        "D" if (1..=2048).contains(&n) => Ok(Group::dihedral(n)),
        "S" if (1..=6).contains(&n) => Ok(Group::symmetric(n)),
        "F" if (1..=26).contains(&n) => Ok(Group::free(n)),
        _ => Err(bad("group", src)),
    }
}

pub fn parse_field(src: &str) -> CliResult<Field> {
    let s = src.trim();
    if s == "Q" {
        return Ok(Field::Rational);
    }
    let inner = s
        .strip_prefix("GF(")
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| s.strip_prefix('F').filter(|r| r.chars().all(|c| c.is_ascii_digit())))
        .ok_or_else(|| bad("field", src))?;
    let field = match inner.split_once('^') {
        Some((p, r)) => Field::gf(number(p, "field", src)?, number(r, "field", src)?)?,
        None => Field::gf_order(number(inner, "field", src)?)?,
    };
    Ok(field)
}

/// `2..8`, `2..=8`, or a comma list `2,3,5`.
pub fn parse_range(src: &str) -> CliResult<Vec<usize>> {
    let s = src.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let lo: usize = number(a, "range", src)?;
        let hi: usize = number(b.trim_start_matches('='), "range", src)?;
        if lo == 0 || hi < lo || hi > 4096 {
            return Err(bad("range", src));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|t| number::<usize>(t, "range", src).and_then(|n| if n == 0 { Err(bad("range", src)) } else { Ok(n) })).collect()
}
