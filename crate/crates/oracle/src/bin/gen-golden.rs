//! Regenerates the golden prox file used by the ogl-core test suites.
//!
//! Usage: gen-golden <out.jsonl> [count] [first_seed]

use std::path::PathBuf;
use std::time::Instant;

use ogl_oracle::golden::{golden_record, write_jsonl};
use ogl_oracle::OracleConfig;

fn main() {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(
        args.next()
            .expect("usage: gen-golden <out.jsonl> [count] [first_seed]"),
    );
    let count: u64 = args.next().map_or(200, |s| s.parse().expect("count"));
    let first: u64 = args.next().map_or(0, |s| s.parse().expect("first_seed"));
    let config = OracleConfig::default();
    let mut records = Vec::new();
    let start = Instant::now();
    for seed in first..first + count {
        let t = Instant::now();
        match golden_record(seed, 30, 10, &config) {
            Ok(r) => {
                eprintln!(
                    "seed {seed:4} p={:2} g={:2} iters={:9} gap={:.2e} ({:.2?})",
                    r.instance.p,
                    r.instance.groups.len(),
                    r.oracle_iterations,
                    r.gap,
                    t.elapsed()
                );
                records.push(r);
            }
            Err(e) => {
                eprintln!("seed {seed}: {e}");
                std::process::exit(1);
            }
        }
    }
    write_jsonl(&out, &records).expect("write golden file");
    eprintln!("wrote {} records in {:.2?}", records.len(), start.elapsed());
}
