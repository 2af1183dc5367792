use anyhow::{bail, Context, Result};

/// Parses `a,b,c` where each item is an integer or an inclusive range
/// `lo..hi`. The result is sorted and deduplicated.
pub fn parse_grid(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = item.split_once("..") {
            let lo: usize = lo.trim().parse().with_context(|| format!("bad grid item {item:?}"))?;
            let hi: usize = hi.trim().parse().with_context(|| format!("bad grid item {item:?}"))?;
            if hi < lo {
                bail!("empty range {item:?}");
            }
            out.extend(lo..=hi);
        } else {
            out.push(item.parse().with_context(|| format!("bad grid item {item:?}"))?);
        }
    }
    if out.is_empty() {
        bail!("empty grid");
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
