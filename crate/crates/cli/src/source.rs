use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::str::FromStr;

use mbi_core::graph::{generate_er, generate_pa, load_edge_list};
use mbi_core::{Error, Graph, Result};

/// Synthetic graph description, `pa:N:D` or `er:N:P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenSpec {
    Pa { n: usize, d: usize },
    Er { n: usize, p: f64 },
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("expected pa:N:D or er:N:P, got {s:?}");
        if parts.len() != 3 {
            return Err(bad());
        }
        let n: usize = parts[1].parse().map_err(|_| bad())?;
        match parts[0] {
            "pa" => Ok(GenSpec::Pa {
                n,
                d: parts[2].parse().map_err(|_| bad())?,
            }),
            "er" => {
                let p: f64 = parts[2].parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("probability {p} outside [0, 1]"));
                }
                Ok(GenSpec::Er { n, p })
            }
            _ => Err(bad()),
        }
    }
}

impl GenSpec {
    /// PA graphs are generated directed and symmetrized when `directed` is off.
    pub fn build(self, seed: u64, directed: bool) -> Result<Graph> {
        match self {
            GenSpec::Pa { n, d } => {
                let g = generate_pa(n, d, seed)?;
                Ok(if directed { g } else { g.to_undirected() })
            }
            GenSpec::Er { n, p } => generate_er(n, p, seed, directed),
        }
    }
}

pub fn load(path: &Path, directed: bool, weighted: bool) -> Result<Graph> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let loaded = load_edge_list(BufReader::new(file), directed, weighted)?;
    if loaded.dropped > 0 {
        eprintln!(
            "note: dropped {} self-loop or duplicate lines",
            loaded.dropped
        );
    }
    Ok(loaded.graph)
}

pub fn node_by_label(g: &Graph, label: &str) -> Result<usize> {
    g.find_label(label)
        .ok_or_else(|| Error::Argument(format!("no node labelled {label:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        assert_eq!("pa:10:1".parse(), Ok(GenSpec::Pa { n: 10, d: 1 }));
        assert_eq!("er:4:1".parse(), Ok(GenSpec::Er { n: 4, p: 1.0 }));
        assert!("er:4:1.5".parse::<GenSpec>().is_err());
        assert!("ba:4:1".parse::<GenSpec>().is_err());
        assert!("pa:10".parse::<GenSpec>().is_err());
    }
}
