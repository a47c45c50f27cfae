//! Flag value parsers and the sample / probability file readers.

use std::fs;
use std::path::Path;

use cde_core::simulation::linear_grid;
use cde_core::{Distribution, Sample};

use crate::commands::Failure;

/// A strictly increasing list of sample sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct NGrid(pub Vec<u64>);

/// `start:stop:count` (inclusive, evenly spaced) or `a,b,c`.
pub fn parse_n_grid(s: &str) -> Result<NGrid, String> {
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("expected start:stop:count, got `{s}`"));
        };
        let num = |v: &str| v.trim().parse::<u64>().map_err(|_| format!("`{v}` is not a nonnegative integer"));
        linear_grid(num(start)?, num(stop)?, num(count)? as usize).map_err(|e| e.to_string())?
    } else {
        s.split(',')
            .map(|v| v.trim().parse::<u64>().map_err(|_| format!("`{v}` is not a nonnegative integer")))
            .collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("grid must be strictly increasing: {grid:?}"));
    }
    Ok(NGrid(grid))
}

pub fn split_names(s: &str) -> Vec<String> {
    s.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect()
}

fn read_lines(path: &Path) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

/// One 1-indexed symbol per line.
pub fn read_sample(path: &Path, k: usize) -> Result<Sample, Failure> {
    let symbols = read_lines(path)?
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.parse::<usize>()
                .map_err(|_| Failure::invalid(format!("{}:{}: `{l}` is not a symbol index", path.display(), i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sample::new(symbols, k)?)
}

/// One probability per line.
pub fn read_distribution(path: &Path) -> Result<Distribution, Failure> {
    let probs = read_lines(path)?
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|_| Failure::invalid(format!("{}:{}: `{l}` is not a probability", path.display(), i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Distribution::new(probs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_n_grid("10,20, 40").unwrap().0, vec![10, 20, 40]);
        assert_eq!(parse_n_grid("1000:50000:10").unwrap().0.len(), 10);
        assert!(parse_n_grid("10,5").is_err());
        assert!(parse_n_grid("1:2").is_err());
        assert!(parse_n_grid("a,b").is_err());
    }

    #[test]
    fn names() {
        assert_eq!(split_names("kt, laplace,,"), vec!["kt", "laplace"]);
    }
}
