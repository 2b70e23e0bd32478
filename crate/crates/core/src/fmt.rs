//! Number formatting and file helpers shared by every exporter.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats `x` with 8 significant digits, `%.8g` style.
///
/// Trailing zeros are trimmed. The output always parses back with
/// `str::parse::<f64>`.
pub fn g8(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.7e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..8).contains(&exp) {
        let decimals = (7 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses a float field, naming the context on failure.
pub fn parse_f64(field: &str, context: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::parse(context, format!("bad number {field:?}: {e}")))
}

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file_name = path.file_name().ok_or_else(|| Error::Invalid(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        file.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g8_examples() {
        assert_eq!(g8(0.0), "0");
        assert_eq!(g8(1.0), "1");
        assert_eq!(g8(0.5), "0.5");
        assert_eq!(g8(0.92150000001), "0.9215");
        assert_eq!(g8(1.0 / 3.0), "0.33333333");
        assert_eq!(g8(-2.0 / 3.0), "-0.66666667");
        assert_eq!(g8(123456789.0), "1.2345679e8");
        assert_eq!(g8(1.0e-4), "0.0001");
        assert_eq!(g8(1.25e-7), "1.25e-7");
    }

    proptest! {
        #[test]
        fn g8_round_trips_to_eight_digits(x in -1.0e12f64..1.0e12) {
            let back: f64 = g8(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5.0e-8 * x.abs());
        }
    }
}
