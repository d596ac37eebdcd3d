//! Parsing and printing of the value syntax used in scenario files.

use mau_core::routing::Ttl;
use mau_core::time::{MS_PER_DAY, MS_PER_HOUR, MS_PER_MIN, MS_PER_SEC, MS_PER_WEEK};

const DURATION_UNITS: [(&str, u64); 6] = [
    ("w", MS_PER_WEEK),
    ("d", MS_PER_DAY),
    ("h", MS_PER_HOUR),
    ("min", MS_PER_MIN),
    ("s", MS_PER_SEC),
    ("ms", 1),
];

const SIZE_UNITS: [(&str, u64); 6] = [
    ("GB", 1_000_000_000),
    ("MB", 1_000_000),
    ("kB", 1_000),
    ("MiB", 1 << 20),
    ("KiB", 1 << 10),
    ("B", 1),
];

const RATE_UNITS: [(&str, u64); 4] = [("Gbps", 1_000_000_000), ("Mbps", 1_000_000), ("kbps", 1_000), ("bps", 1)];

fn split_number(s: &str) -> (&str, &str) {
    let end = s
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+'))
        .unwrap_or(s.len());
    (s[..end].trim(), s[end..].trim())
}

fn scaled(s: &str, units: &[(&str, u64)], bare: u64, what: &str) -> Result<u64, String> {
    let s = s.trim();
    let (num, unit) = split_number(s);
    if num.starts_with('-') {
        return Err(format!("{what} must not be negative: `{s}`"));
    }
    let value: f64 = num.parse().map_err(|_| format!("expected a {what}, got `{s}`"))?;
    let factor = if unit.is_empty() {
        bare
    } else {
        units
            .iter()
            .find(|(u, _)| *u == unit)
            .map(|&(_, f)| f)
            .ok_or_else(|| format!("unknown {what} unit `{unit}` in `{s}`"))?
    };
    let v = value * factor as f64;
    if !v.is_finite() || v > u64::MAX as f64 {
        return Err(format!("{what} out of range: `{s}`"));
    }
    Ok(v.round() as u64)
}

/// `90s`, `1.5h`, `3d`, `2w`, `100ms`; a bare number is seconds.
pub fn parse_duration(s: &str) -> Result<u64, String> {
    scaled(s, &DURATION_UNITS, MS_PER_SEC, "duration")
}

/// Decimal sizes (`2MB` is 2,000,000 bytes); a bare number is bytes.
pub fn parse_size(s: &str) -> Result<u64, String> {
    scaled(s, &SIZE_UNITS, 1, "size")
}

/// `11Mbps`; a bare number is bits per second.
pub fn parse_bitrate(s: &str) -> Result<u64, String> {
    scaled(s, &RATE_UNITS, 1, "bitrate")
}

pub fn parse_ttl(s: &str) -> Result<Ttl, String> {
    let s = s.trim();
    if let Some(h) = s.strip_suffix("hops") {
        let n: u32 = h.trim().parse().map_err(|_| format!("expected a hop count, got `{s}`"))?;
        if n == 0 {
            return Err("hop limit must be at least 1".into());
        }
        return Ok(Ttl::Hops(n));
    }
    let ms = parse_duration(s)?;
    if ms == 0 {
        return Err("TTL must be positive".into());
    }
    Ok(Ttl::Time(ms))
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a number, got `{}`", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("expected a finite number, got `{}`", s.trim()));
    }
    if v < 0.0 {
        return Err(format!("must not be negative: `{}`", s.trim()));
    }
    Ok(v)
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if s.starts_with('-') {
        return Err(format!("must not be negative: `{s}`"));
    }
    s.parse().map_err(|_| format!("expected a whole number, got `{s}`"))
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => Err(format!("expected true or false, got `{other}`")),
    }
}

/// `lo..hi` with the same parser on both ends; a single value means
/// `lo == hi`.
pub fn parse_range<T: PartialOrd + Copy>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<(T, T), String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (item(a)?, item(b)?),
        None => {
            let v = item(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("range `{}` is empty", s.trim()));
    }
    Ok((lo, hi))
}

/// Comma separated list.
pub fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(item)
        .collect()
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse_u64(a)?, parse_u64(b)?);
                if a > b {
                    return Err(format!("seed span `{part}` is empty"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_u64(part)?),
        }
    }
    Ok(out)
}

fn largest_unit(v: u64, units: &[(&str, u64)], skip_binary: bool) -> String {
    for &(u, f) in units {
        if skip_binary && u.contains('i') {
            continue;
        }
        if v != 0 && v % f == 0 {
            return format!("{}{u}", v / f);
        }
    }
    format!("{v}{}", units.last().map(|u| u.0).unwrap_or(""))
}

pub fn format_duration(ms: u64) -> String {
    if ms == 0 {
        return "0s".into();
    }
    largest_unit(ms, &DURATION_UNITS, false)
}

pub fn format_size(bytes: u64) -> String {
    largest_unit(bytes, &SIZE_UNITS, true)
}

pub fn format_bitrate(bps: u64) -> String {
    largest_unit(bps, &RATE_UNITS, false)
}

pub fn format_ttl(ttl: Ttl) -> String {
    match ttl {
        Ttl::Time(ms) => format_duration(ms),
        Ttl::Hops(h) => format!("{h}hops"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(parse_duration("100ms"), Ok(100));
        assert_eq!(parse_duration("1.5h"), Ok(90 * MS_PER_MIN));
        assert_eq!(parse_duration("12d"), Ok(12 * MS_PER_DAY));
        assert_eq!(parse_duration("30"), Ok(30_000));
        assert_eq!(parse_duration("1 min"), Ok(60_000));
        assert!(parse_duration("-1s").is_err());
        assert!(parse_duration("5 parsecs").is_err());
        assert_eq!(format_duration(3 * MS_PER_WEEK), "3w");
        assert_eq!(format_duration(90 * MS_PER_MIN), "90min");
        assert_eq!(format_duration(1500), "1500ms");
    }

    #[test]
    fn sizes_are_decimal() {
        assert_eq!(parse_size("2MB"), Ok(2_000_000));
        assert_eq!(parse_size("1kB"), Ok(1000));
        assert_eq!(parse_size("1KiB"), Ok(1024));
        assert_eq!(format_size(2_000_000), "2MB");
        assert_eq!(format_size(1024), "1024B");
        assert_eq!(parse_bitrate("11Mbps"), Ok(11_000_000));
        assert_eq!(format_bitrate(11_000_000), "11Mbps");
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("0.8..1.4", parse_f64), Ok((0.8, 1.4)));
        assert_eq!(parse_range("10s..30s", parse_duration), Ok((10_000, 30_000)));
        assert!(parse_range("3..1", parse_f64).is_err());
        assert_eq!(parse_seeds("1..3, 7"), Ok(vec![1, 2, 3, 7]));
        assert_eq!(parse_list("1h, 3hops", parse_ttl), Ok(vec![Ttl::Time(MS_PER_HOUR), Ttl::Hops(3)]));
    }
}
