//! Heckman-Opdam hypergeometric functions and the small K-type bridge.
//!
//! Modules, bottom up: exact root systems ([`rootsys`]), the Harish-Chandra
//! series ([`series`]), Gamma-product c-functions ([`cfunc`]), the
//! hypergeometric function itself ([`hyperfun`]), Dunkl/Cherednik operators
//! ([`dunkl`]), the small K-type catalog and matching solver ([`ktypes`]),
//! and hypergeometric Fourier transforms ([`transform`]).

pub mod error;
pub mod linalg;
pub mod rootsys;

pub use error::{Error, Result};
pub mod cfunc;
pub mod series;
pub mod hyperfun;
pub mod ktypes;
pub mod dunkl;
pub mod transform;
pub mod cli;

use num_complex::Complex64;

/// Format a complex number as "a+bi".
pub fn fmt_complex(z: &Complex64) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parse "a+bi", "a-bi", "bi", "a".
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent and not leading
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
                split = Some(i);
                break;
            }
        }
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse().ok()?,
        };
        Some(Complex64::new(re.parse().ok()?, im))
    } else {
        Some(Complex64::new(t.parse().ok()?, 0.0))
    }
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_complex(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_roundtrip() {
        for z in [Complex64::new(0.3, 1.2), Complex64::new(-1.0, -2.5), Complex64::new(1e-20, 3e5)] {
            assert_eq!(parse_complex(&fmt_complex(&z)).unwrap(), z);
        }
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.7").unwrap(), Complex64::new(0.7, 0.0));
        assert_eq!(parse_complex("1.3+0.9i").unwrap(), Complex64::new(1.3, 0.9));
    }
}
