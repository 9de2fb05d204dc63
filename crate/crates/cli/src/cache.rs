//! Prime table cache in the directory named by `EDGEZETA_CACHE`.
//!
//! File `primes.txt`: a header line `limit count`, then one prime per line.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use edgezeta::arith::{sieve, PrimeTable};

pub const ENV_VAR: &str = "EDGEZETA_CACHE";
const FILE_NAME: &str = "primes.txt";
/// Smallest table worth writing.
const MIN_LIMIT: u64 = 1 << 16;

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn read_table(path: &Path) -> io::Result<PrimeTable> {
    let mut lines = BufReader::new(fs::File::open(path)?).lines();
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let header = lines.next().ok_or_else(|| bad("empty cache file"))??;
    let mut it = header.split_whitespace().map(str::parse::<u64>);
    let (limit, count) = match (it.next(), it.next()) {
        (Some(Ok(l)), Some(Ok(c))) => (l, c as usize),
        _ => return Err(bad("bad cache header")),
    };
    let mut primes = Vec::with_capacity(count);
    for line in lines {
        primes.push(line?.trim().parse::<u64>().map_err(|_| bad("bad cache entry"))?);
    }
    if primes.len() != count {
        return Err(bad("cache entry count does not match header"));
    }
    PrimeTable::from_trusted(limit, primes).map_err(|e| bad(&e.to_string()))
}

fn write_table(dir: &Path, table: &PrimeTable) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!("{FILE_NAME}.{}.tmp", std::process::id()));
    {
        let mut w = io::BufWriter::new(fs::File::create(&tmp)?);
        writeln!(w, "{} {}", table.limit(), table.len())?;
        for p in table.primes() {
            writeln!(w, "{p}")?;
        }
        w.flush()?;
    }
    fs::rename(tmp, dir.join(FILE_NAME))
}

/// Makes a table covering `limit` available to the library, reading it from the cache
/// when possible and refreshing the cache otherwise. Cache problems are only logged.
pub fn prepare(limit: u64) {
    let Some(dir) = cache_dir() else { return };
    let path = dir.join(FILE_NAME);
    match read_table(&path) {
        Ok(t) if t.limit() >= limit => {
            log::debug!("prime cache hit: {} primes up to {}", t.len(), t.limit());
            PrimeTable::install(t);
            return;
        }
        Ok(_) => log::debug!("prime cache too small for {limit}"),
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => log::warn!("ignoring prime cache {}: {e}", path.display()),
    }
    let Ok(table) = sieve(limit.max(MIN_LIMIT)) else { return };
    if let Err(e) = write_table(&dir, &table) {
        log::warn!("could not write prime cache in {}: {e}", dir.display());
    }
    PrimeTable::install(table);
}
