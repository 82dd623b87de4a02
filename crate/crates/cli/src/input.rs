//! Parsing of inline command-line values.

use anyhow::{anyhow, bail, Context, Result};
use fclone_core::gadgets::Gf2Matrix;
use fclone_core::{FnTable, Rational};

/// A rational, or `2^k` / `2^-k`.
pub fn rational(s: &str) -> Result<Rational> {
    if let Some(e) = s.trim().strip_prefix("2^") {
        let e: i64 = e
            .parse()
            .with_context(|| format!("invalid exponent in `{s}`"))?;
        return Ok(Rational::pow2(e));
    }
    s.parse().map_err(|e| anyhow!("{e}"))
}

/// Whitespace- or comma-separated values; the arity follows from the count.
pub fn table(s: &str) -> Result<FnTable> {
    let values: Vec<Rational> = s
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(rational)
        .collect::<Result<_>>()?;
    let n = values.len();
    if !n.is_power_of_two() {
        bail!("a table needs a power-of-two number of values, got {n}");
    }
    Ok(FnTable::new(n.trailing_zeros() as usize, values)?)
}

/// Bits `x1 x2 …` written as a string such as `101`.
pub fn bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(anyhow!("`{s}` is not a bit string")),
        })
        .collect()
}

/// Rows separated by `;` or `/`, each a bit string.
pub fn matrix(s: &str) -> Result<Gf2Matrix> {
    let rows = s
        .split([';', '/'])
        .map(|r| r.trim())
        .filter(|r| !r.is_empty())
        .map(|r| bits(r).map(|b| b.into_iter().map(|x| x == 1).collect()))
        .collect::<Result<Vec<Vec<bool>>>>()?;
    Ok(Gf2Matrix::new(rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fclone_core::q;

    #[test]
    fn values() {
        assert_eq!(rational("2^-3").unwrap(), q(1, 8));
        assert_eq!(rational("3/6").unwrap(), q(1, 2));
        assert_eq!(
            table("0, 1 2 4").unwrap(),
            FnTable::from_ints(2, &[0, 1, 2, 4]).unwrap()
        );
        assert!(table("1 2 3").is_err());
        assert_eq!(bits("101").unwrap(), vec![1, 0, 1]);
        assert_eq!(matrix("11;11").unwrap().n_cols(), 2);
    }
}
