//! Grid syntax: `4,8,16`, `start:end:step`, or `2^8..2^14` (powers of two).

use crate::CliError;

fn bad(spec: &str) -> CliError {
    CliError::Usage(format!(
        "cannot parse grid `{spec}`; use a comma list, start:end:step or 2^a..2^b"
    ))
}

pub fn parse_f64(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let exp = |s: &str| s.trim().strip_prefix("2^").and_then(|e| e.parse::<i32>().ok());
        let (lo, hi) = (exp(a).ok_or_else(|| bad(spec))?, exp(b).ok_or_else(|| bad(spec))?);
        if lo > hi {
            return Err(bad(spec));
        }
        return Ok((lo..=hi).map(|k| 2f64.powi(k)).collect());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad(spec)))
            .collect::<Result<_, _>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || end < start {
            return Err(bad(spec));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|k| start + k as f64 * step).collect());
    }
    spec.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad(spec)))
        .collect()
}

pub fn parse_counts(spec: &str) -> Result<Vec<u64>, CliError> {
    parse_f64(spec)?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 && x < 9.0e15 {
                Ok(x as u64)
            } else {
                Err(CliError::Usage(format!("grid value {x} is not a nonnegative integer")))
            }
        })
        .collect()
}
