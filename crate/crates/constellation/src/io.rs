//! Text serialization of constellations.
//!
//! Format: a header line `#4dshape v1 N=<int> m=<int> Es=<float>`, then
//! `2^m` rows of `<N floats> | <m bits>`, everything single-space separated.
//! Extra `#` comment lines after the header are skipped on load. Coordinates
//! are written with 17 significant digits so a save/load round trip is exact.

use crate::error::ConstellationError;
use crate::labeled::LabeledConstellation;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

const MAGIC: &str = "#4dshape v1";

/// Serializes a constellation to its text form.
pub fn to_string(c: &LabeledConstellation) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} N={} m={} Es={:.15e}",
        MAGIC,
        c.n_dims(),
        c.bits_per_symbol(),
        c.es()
    )
    .unwrap();
    for i in 0..c.num_points() {
        let coords: Vec<String> = c.point(i).iter().map(|x| format!("{:.16e}", x)).collect();
        let bits: Vec<String> = c.label(i).iter().map(|b| b.to_string()).collect();
        writeln!(out, "{} | {}", coords.join(" "), bits.join(" ")).unwrap();
    }
    out
}

/// Writes a constellation file atomically (temp file + rename).
pub fn save(c: &LabeledConstellation, path: &Path) -> Result<(), ConstellationError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = dir.to_path_buf();
    tmp.push(format!(
        ".{}.tmp{}",
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "constellation".into()),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(to_string(c).as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Parses a constellation from its text form.
pub fn from_str(text: &str) -> Result<LabeledConstellation, ConstellationError> {
    let parse_err = |line: usize, message: String| ConstellationError::Parse { line, message };

    let mut lines = text.lines().enumerate();
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| parse_err(hline + 1, format!("expected header '{} ...'", MAGIC)))?;

    let mut n_dims = None;
    let mut bits = None;
    let mut es_declared = None;
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(hline + 1, format!("malformed header field '{}'", field)))?;
        match key {
            "N" => n_dims = Some(value.parse::<usize>().map_err(|e| {
                parse_err(hline + 1, format!("bad N: {}", e))
            })?),
            "m" => bits = Some(value.parse::<usize>().map_err(|e| {
                parse_err(hline + 1, format!("bad m: {}", e))
            })?),
            "Es" => es_declared = Some(value.parse::<f64>().map_err(|e| {
                parse_err(hline + 1, format!("bad Es: {}", e))
            })?),
            other => return Err(parse_err(hline + 1, format!("unknown header key '{}'", other))),
        }
    }
    let n_dims = n_dims.ok_or_else(|| parse_err(hline + 1, "header missing N".into()))?;
    let bits = bits.ok_or_else(|| parse_err(hline + 1, "header missing m".into()))?;
    let es_declared = es_declared.ok_or_else(|| parse_err(hline + 1, "header missing Es".into()))?;
    if bits >= usize::BITS as usize {
        return Err(parse_err(hline + 1, format!("m={} too large", bits)));
    }
    let m_total = 1usize << bits;

    let mut points = Vec::with_capacity(m_total * n_dims);
    let mut labels = Vec::with_capacity(m_total * bits);
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (coord_part, bit_part) = trimmed
            .split_once('|')
            .ok_or_else(|| parse_err(line_no, "row missing '|' delimiter".into()))?;
        let coords: Vec<f64> = coord_part
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| parse_err(line_no, format!("bad coordinate '{}': {}", t, e)))
            })
            .collect::<Result<_, _>>()?;
        if coords.len() != n_dims {
            return Err(parse_err(
                line_no,
                format!("expected {} coordinates, found {}", n_dims, coords.len()),
            ));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(line_no, "non-finite coordinate".into()));
        }
        let row_bits: Vec<u8> = bit_part
            .split_whitespace()
            .map(|t| match t {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(parse_err(line_no, format!("bad label bit '{}'", other))),
            })
            .collect::<Result<_, _>>()?;
        if row_bits.len() != bits {
            return Err(parse_err(
                line_no,
                format!("expected {} label bits, found {}", bits, row_bits.len()),
            ));
        }
        points.extend_from_slice(&coords);
        labels.extend_from_slice(&row_bits);
        rows += 1;
    }
    if rows != m_total {
        return Err(parse_err(0, format!("expected {} rows, found {}", m_total, rows)));
    }

    let c = LabeledConstellation::new(n_dims, bits, points, labels)?;
    if es_declared <= 0.0 || ((c.es() - es_declared) / es_declared).abs() > 1e-6 {
        return Err(parse_err(
            0,
            format!(
                "declared Es={} disagrees with measured mean energy {}",
                es_declared,
                c.es()
            ),
        ));
    }
    Ok(c)
}

/// Loads a constellation file.
pub fn load(path: &Path) -> Result<LabeledConstellation, ConstellationError> {
    from_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::os128_4d;

    #[test]
    fn round_trip_is_exact() {
        let c = os128_4d().unwrap();
        let text = to_string(&c);
        let back = from_str(&text).unwrap();
        assert_eq!(c.points_flat(), back.points_flat());
        assert_eq!(c.labels_flat(), back.labels_flat());
    }

    #[test]
    fn header_and_row_grammar() {
        let c = crate::builtins::pm_qpsk().unwrap();
        let text = to_string(&c);
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("#4dshape v1 N=4 m=4 Es="));
        let row = lines.next().unwrap();
        let (coords, bits) = row.split_once(" | ").unwrap();
        assert_eq!(coords.split(' ').count(), 4);
        assert_eq!(bits.split(' ').count(), 4);
        // at least 9 significant digits per coordinate
        for tok in coords.split(' ') {
            let digits = tok.chars().filter(|c| c.is_ascii_digit()).count();
            assert!(digits >= 9, "token {} too short", tok);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "#4dshape v1 N=1 m=1 Es=1.0\n1.0 | 0\nbroken-line\n";
        match from_str(text) {
            Err(ConstellationError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn energy_mismatch_is_rejected() {
        let text = "#4dshape v1 N=1 m=1 Es=5.0\n1.0 | 0\n-1.0 | 1\n";
        assert!(matches!(
            from_str(text),
            Err(ConstellationError::Parse { .. })
        ));
    }

    #[test]
    fn save_then_load(){
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fmt.4ds");
        let c = crate::builtins::gray_16qam_2d().unwrap();
        save(&c, &path).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(c.points_flat(), back.points_flat());
        // no stray temp files left behind
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
