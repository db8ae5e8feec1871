//! Command-line list arguments.

use crate::error::{Error, Result};

/// Longest list accepted by [`parse_beta_list`].
pub const MAX_BETAS: usize = 256;

/// Parses `"0.06,0.04,0.02"`. Entries must be finite, positive and distinct; whitespace
/// around entries is ignored. Input order is preserved.
pub fn parse_beta_list(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Config("beta list is empty".into()));
    }
    let mut out = Vec::new();
    for (i, item) in text.split(',').enumerate() {
        if i >= MAX_BETAS {
            return Err(Error::Config(format!("beta list longer than {MAX_BETAS}")));
        }
        let item = item.trim();
        let v: f64 = item
            .parse()
            .map_err(|_| Error::Config(format!("beta entry {} ({item:?}) is not a number", i + 1)))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(format!("beta entry {} ({item}) must be finite and positive", i + 1)));
        }
        if out.contains(&v) {
            return Err(Error::Config(format!("beta {v} listed twice")));
        }
        out.push(v);
    }
    Ok(out)
}
