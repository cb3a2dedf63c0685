//! Number formatting and the line-oriented input grammars.

use rinr_core::codec::BoundingBox;
use rinr_core::comm::DeviceProfile;
use rinr_core::sched::{ArchKey, PlanJob};

use crate::CliError;

/// Six significant digits, trailing zeros kept; `inf`, `-inf` and `nan`
/// spelled out. Plain notation for exponents -5..=5, scientific otherwise.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_owned();
    }
    if x == 0.0 {
        return "0.00000".to_owned();
    }
    // Let the formatter round first so 999999.5 lands on exponent 6.
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').expect("scientific format") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..=5).contains(&exp) {
        format!("{x:.prec$}", prec = (5 - exp) as usize)
    } else {
        sci
    }
}

/// `x,y,w,h`.
pub fn parse_bbox(s: &str) -> Result<BoundingBox, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected x,y,w,h, got `{s}`"));
    }
    let mut v = [0usize; 4];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| format!("`{p}` is not a non-negative integer in `{s}`"))?;
    }
    Ok(BoundingBox::new(v[0], v[1], v[2], v[3]))
}

/// Non-empty, non-comment lines with their 1-based line numbers, split on whitespace.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let content = line.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then(|| (i + 1, content.split_whitespace().collect()))
    })
}

fn parse_u64(field: &str, what: &str, line: usize, source: &str) -> Result<u64, CliError> {
    field.parse().map_err(|_| {
        CliError::Usage(format!(
            "{source}:{line}: {what} `{field}` is not a non-negative integer"
        ))
    })
}

/// Device file: one `id payload_bytes receiver_count` record per line.
pub fn parse_devices(text: &str, source: &str) -> Result<Vec<DeviceProfile>, CliError> {
    records(text)
        .map(|(line, f)| {
            if f.len() != 3 {
                return Err(CliError::Usage(format!(
                    "{source}:{line}: expected `id payload_bytes receiver_count`, got {} fields",
                    f.len()
                )));
            }
            Ok(DeviceProfile::new(
                f[0],
                parse_u64(f[1], "payload_bytes", line, source)?,
                parse_u64(f[2], "receiver_count", line, source)?,
            ))
        })
        .collect()
}

/// Grouping manifest: one `id arch_key [cost]` record per line, where
/// `arch_key` is `BGLxH+OBJLxH` and cost defaults to the parameter count.
pub fn parse_manifest(text: &str, source: &str) -> Result<Vec<PlanJob>, CliError> {
    records(text)
        .map(|(line, f)| {
            if !(2..=3).contains(&f.len()) {
                return Err(CliError::Usage(format!(
                    "{source}:{line}: expected `id arch_key [cost]`, got {} fields",
                    f.len()
                )));
            }
            let key: ArchKey = f[1]
                .parse()
                .map_err(|e| CliError::Usage(format!("{source}:{line}: {e}")))?;
            let job = PlanJob::new(f[0], key);
            match f.get(2) {
                Some(c) => job
                    .with_cost(parse_u64(c, "cost", line, source)?)
                    .map_err(|e| CliError::Usage(format!("{source}:{line}: {e}"))),
                None => Ok(job),
            }
        })
        .collect()
}

/// Batch decode list: one container path per line.
pub fn parse_path_list(text: &str) -> Vec<String> {
    records(text).map(|(_, f)| f.join(" ")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_real(20.0), "20.0000");
        assert_eq!(fmt_real(5.151688), "5.15169");
        assert_eq!(fmt_real(3.4351145), "3.43511");
        assert_eq!(fmt_real(0.5), "0.500000");
        assert_eq!(fmt_real(123456.7), "123457");
        assert_eq!(fmt_real(999999.6), "1.00000e6");
        assert_eq!(fmt_real(1.5e-7), "1.50000e-7");
        assert_eq!(fmt_real(-2.5), "-2.50000");
        assert_eq!(fmt_real(0.0), "0.00000");
        assert_eq!(fmt_real(f64::INFINITY), "inf");
        assert_eq!(fmt_real(f64::NAN), "nan");
    }

    #[test]
    fn bbox_text() {
        assert_eq!(
            parse_bbox("8, 8,24,24").unwrap(),
            BoundingBox::new(8, 8, 24, 24)
        );
        assert!(parse_bbox("1,2,3").is_err());
        assert!(parse_bbox("1,2,3,-4").is_err());
    }

    #[test]
    fn device_grammar() {
        let d = parse_devices("# fleet\ncam0 1000 9\n\ncam1 20 0 # idle\n", "f").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!((d[1].payload_bytes, d[1].receiver_count), (20, 0));
        let err = parse_devices("a 1 2\nb x 3\n", "devs.txt").unwrap_err();
        assert!(err.to_string().contains("devs.txt:2"), "{err}");
        assert_eq!(err.exit_code(), 2);
        assert!(parse_devices("a 1\n", "f").is_err());
    }

    #[test]
    fn manifest_grammar() {
        let j = parse_manifest("a 10x30+3x10\nb 10x30+5x24 7\n", "m").unwrap();
        assert_eq!(j[0].cost, 7623 + 173);
        assert_eq!(j[1].cost, 7);
        assert!(parse_manifest("a 10x30\n", "m").is_err());
        assert!(parse_manifest("a 10x30+3x10 0\n", "m").is_err());
    }
}
