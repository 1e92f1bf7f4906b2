//! Batch driver for the depth-zero matching engine: class enumeration,
//! character tables, virtual characters, the facet-matching suite, the
//! Frobenius-structure checks, and facet sums on the GL(2) tree.
//!
//! Exit codes: 0 verified, 1 mismatch, 2 usage or precondition error.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use depthzero_core::char_table::{character_table, install_table, CharacterTable};
use depthzero_core::finite_field::fq_of_order;
use depthzero_core::gl_classes::{class_set, group_data, ClassFunction};
use depthzero_core::harish_chandra::dl_virtual;
use depthzero_core::laurent::{LMat, Laurent};
use depthzero_core::matcher::{
    check_frobenius_structure, theta0, verify_matching, BlockDatum, MatchingDatum,
};

const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "depthzero", version, about = "exact depth-zero character identities on GL(N)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// worker threads for pre-computing tables (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// directory for the on-disk character table cache
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand)]
enum Cmd {
    /// Conjugacy classes of GL(n, F_q) with centralizer orders
    Classes { n: u32, q: u64 },
    /// Full irreducible character table of GL(n, F_q)
    Chartable { n: u32, q: u64 },
    /// The virtual character attached to a residue-character exponent
    Dl {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long)]
        q: u64,
        /// single block "n:a"
        #[arg(long)]
        blocks: String,
    },
    /// Verify the facet-matching identity for a depth-zero datum
    Match {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long)]
        q: u64,
        /// blocks "n:a[,n:a…]"
        #[arg(long)]
        blocks: String,
    },
    /// Check the Frobenius-structure conditions (a) and (b) for a datum
    Frobcheck {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        blocks: String,
    },
    /// Alternating facet sum over the GL(2) tree at a regular element
    Theta0 {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        blocks: String,
        /// residue entries "a,b;c,d" (an element of GL(2, F_q) ⊂ GL(2, o))
        #[arg(long)]
        element: Option<String>,
        /// path to a JSON 2×2 matrix of Laurent series {"val","coeffs","prec"}
        #[arg(long)]
        element_json: Option<PathBuf>,
        /// truncation radius for unbounded fixed-point sets
        #[arg(long)]
        radius: Option<u32>,
    },
}

fn main() {
    // die quietly when the consumer closes the pipe (e.g. `… | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    });
}

fn run(cli: Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Classes { n, q } => cmd_classes(&cli, *n, *q),
        Cmd::Chartable { n, q } => cmd_chartable(&cli, *n, *q),
        Cmd::Dl { big_n, q, blocks } => cmd_dl(&cli, *big_n, *q, blocks),
        Cmd::Match { big_n, q, blocks } => cmd_match(&cli, *big_n, *q, blocks),
        Cmd::Frobcheck { big_n, q, blocks } => cmd_frobcheck(&cli, *big_n, *q, blocks),
        Cmd::Theta0 { big_n, q, blocks, element, element_json, radius } => {
            cmd_theta0(&cli, *big_n, *q, blocks, element.as_deref(), element_json.as_deref(), *radius)
        }
    }
}

fn parse_blocks(big_n: u32, q: u64, s: &str) -> Result<MatchingDatum> {
    let mut blocks = Vec::new();
    for part in s.split(',') {
        let (n, a) = part
            .split_once(':')
            .ok_or_else(|| anyhow!("block '{part}' is not of the form n:a"))?;
        blocks.push(BlockDatum {
            n: n.trim().parse().context("block size")?,
            a: a.trim().parse().context("block exponent")?,
        });
    }
    Ok(MatchingDatum::new(big_n, q, blocks)?)
}

fn emit_json<T: serde::Serialize>(value: &T) -> Result<i32> {
    println!("{}", serde_json::to_string(value)?);
    Ok(0)
}

// ---------------------------------------------------------------------------
// classes
// ---------------------------------------------------------------------------

fn cmd_classes(cli: &Cli, n: u32, q: u64) -> Result<i32> {
    let set = class_set(n, q)?;
    match cli.format {
        Format::Json => {
            #[derive(serde::Serialize)]
            struct Row<'a> {
                class: &'a Vec<(Vec<u8>, Vec<u32>)>,
                centralizer: i64,
                size: i64,
            }
            let rows: Vec<Row> = (0..set.len())
                .map(|i| Row {
                    class: &set.classes[i].data,
                    centralizer: set.centralizers[i],
                    size: set.sizes[i],
                })
                .collect();
            emit_json(&rows)
        }
        Format::Csv => {
            println!("class,centralizer,size");
            for i in 0..set.len() {
                println!("{},{},{}", set.classes[i].label(), set.centralizers[i], set.sizes[i]);
            }
            Ok(0)
        }
        Format::Pretty => {
            println!("conjugacy classes of GL({n},{q}),  |G| = {}", depthzero_core::gl_classes::group_order(n, q));
            println!("{:<30} {:>12} {:>12}", "class", "centralizer", "size");
            for i in 0..set.len() {
                println!("{:<30} {:>12} {:>12}", set.classes[i].label(), set.centralizers[i], set.sizes[i]);
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// chartable (with the on-disk cache)
// ---------------------------------------------------------------------------

#[derive(serde::Serialize, serde::Deserialize)]
struct TableFile {
    version: u32,
    n: u32,
    q: u64,
    exponent: u64,
    irreducibles: Vec<ClassFunction>,
}

fn cached_table(cli: &Cli, n: u32, q: u64) -> Result<Arc<CharacterTable>> {
    if let Some(dir) = &cli.cache_dir {
        let path = dir.join(format!("chartable-v{CACHE_FORMAT_VERSION}-{n}-{q}.json"));
        if path.exists() {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let file: TableFile = serde_json::from_str(&text)?;
            if file.version == CACHE_FORMAT_VERSION && file.n == n && file.q == q {
                // install re-verifies orthogonality before trusting the file
                return Ok(install_table(n, q, file.exponent, file.irreducibles)?);
            }
        }
        let table = character_table(n, q)?;
        let file = TableFile {
            version: CACHE_FORMAT_VERSION,
            n,
            q,
            exponent: table.exponent,
            irreducibles: table.irreducibles.clone(),
        };
        std::fs::create_dir_all(dir)?;
        std::fs::write(&path, serde_json::to_string(&file)?)
            .with_context(|| format!("writing {}", path.display()))?;
        return Ok(table);
    }
    Ok(character_table(n, q)?)
}

fn cmd_chartable(cli: &Cli, n: u32, q: u64) -> Result<i32> {
    let table = cached_table(cli, n, q)?;
    let set = &table.group.classes;
    match cli.format {
        Format::Json => {
            #[derive(serde::Serialize)]
            struct Out<'a> {
                n: u32,
                q: u64,
                exponent: u64,
                degrees: &'a [i64],
                orthogonality: &'static str,
                irreducibles: &'a [ClassFunction],
            }
            emit_json(&Out {
                n,
                q,
                exponent: table.exponent,
                degrees: &table.degrees,
                // tables are only released after exact verification
                orthogonality: "pass",
                irreducibles: &table.irreducibles,
            })
        }
        Format::Csv => {
            let labels: Vec<String> = set.classes.iter().map(|c| c.label()).collect();
            println!("degree,{}", labels.join(","));
            for (t, chi) in table.irreducibles.iter().enumerate() {
                let row: Vec<String> = chi.values.iter().map(|v| format!("\"{v}\"")).collect();
                println!("{},{}", table.degrees[t], row.join(","));
            }
            Ok(0)
        }
        Format::Pretty => {
            println!(
                "character table of GL({n},{q}): {} irreducibles, exponent {}, orthogonality pass",
                table.irreducibles.len(),
                table.exponent
            );
            println!("degrees: {:?}", table.degrees);
            println!("sum of degree squares: {}", table.degrees.iter().map(|d| d * d).sum::<i64>());
            println!("{:<8} values by class", "degree");
            for (t, chi) in table.irreducibles.iter().enumerate() {
                let row: Vec<String> = chi.values.iter().map(|v| v.to_string()).collect();
                println!("{:<8} {}", table.degrees[t], row.join("  "));
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// dl
// ---------------------------------------------------------------------------

fn cmd_dl(cli: &Cli, big_n: u32, q: u64, blocks: &str) -> Result<i32> {
    let datum = parse_blocks(big_n, q, blocks)?;
    if datum.blocks.len() != 1 {
        bail!("dl takes a single block n:a");
    }
    let f = dl_virtual(datum.blocks[0].n, q, datum.blocks[0].a)?;
    emit_class_function(cli, &f)
}

fn emit_class_function(cli: &Cli, f: &ClassFunction) -> Result<i32> {
    match cli.format {
        Format::Json => emit_json(f),
        Format::Csv => {
            let sets = f.shape.class_sets()?;
            println!("class,value");
            let mut tuple = vec![0usize; sets.len()];
            for (flat, v) in f.values.iter().enumerate() {
                let mut rest = flat;
                for i in (0..sets.len()).rev() {
                    tuple[i] = rest % sets[i].len();
                    rest /= sets[i].len();
                }
                let label: Vec<String> = tuple
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| sets[i].classes[t].label())
                    .collect();
                println!("{},\"{v}\"", label.join("|"));
            }
            Ok(0)
        }
        Format::Pretty => {
            println!("class function on GL blocks {:?} over F_{}", f.shape.blocks, f.shape.q);
            let sets = f.shape.class_sets()?;
            let mut tuple = vec![0usize; sets.len()];
            for (flat, v) in f.values.iter().enumerate() {
                let mut rest = flat;
                for i in (0..sets.len()).rev() {
                    tuple[i] = rest % sets[i].len();
                    rest /= sets[i].len();
                }
                let label: Vec<String> = tuple
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| sets[i].classes[t].label())
                    .collect();
                println!("{:<36} {}", label.join(" | "), v);
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// match / frobcheck
// ---------------------------------------------------------------------------

/// Pre-warm the per-block character tables and the ambient group tables in
/// parallel; the library itself never spawns threads.
fn prewarm(cli: &Cli, datum: &MatchingDatum) -> Result<()> {
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1);
    let mut tasks: Vec<(u32, u64)> = datum.blocks.iter().map(|b| (b.n, datum.q)).collect();
    tasks.push((datum.big_n, datum.q));
    tasks.sort_unstable();
    tasks.dedup();
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for chunk in tasks.chunks(tasks.len().div_ceil(jobs)) {
            let chunk = chunk.to_vec();
            handles.push(scope.spawn(move || -> Result<()> {
                for (n, q) in chunk {
                    group_data(n, q)?;
                    character_table(n, q)?;
                }
                Ok(())
            }));
        }
        for h in handles {
            h.join().map_err(|_| anyhow!("worker panicked"))??;
        }
        Ok(())
    })
}

fn cmd_match(cli: &Cli, big_n: u32, q: u64, blocks: &str) -> Result<i32> {
    let datum = parse_blocks(big_n, q, blocks)?;
    datum.check_regular()?; // precondition: usage error, exit 2
    prewarm(cli, &datum)?;
    let report = verify_matching(&datum)?;
    let code = if report.verdict { 0 } else { 1 };
    match cli.format {
        Format::Json => {
            emit_json(&report)?;
        }
        Format::Csv => {
            println!("facet,role,equal,max_modulus");
            for f in &report.faces {
                println!(
                    "\"{:?}\",{:?},{},{}",
                    f.facet.vertices, f.role, f.equal, f.max_modulus
                );
            }
        }
        Format::Pretty => {
            println!(
                "matching suite for N={big_n} q={q} blocks {}",
                datum
                    .blocks
                    .iter()
                    .map(|b| format!("{}:{}", b.n, b.a))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            for f in &report.faces {
                println!(
                    "  facet S={:?}  [{}]  sheaf == (-1)^N rep: {}  (modulus {})",
                    f.facet.vertices,
                    match f.role {
                        depthzero_core::matcher::FaceRole::BaseVertex => "base vertex",
                        depthzero_core::matcher::FaceRole::OtherVertex => "vertex",
                        depthzero_core::matcher::FaceRole::Face => "face",
                    },
                    if f.equal { "ok" } else { "MISMATCH" },
                    f.max_modulus
                );
            }
            println!(
                "  frobenius (a): {}   (b): {}",
                if report.frobenius_a { "ok" } else { "FAIL" },
                if report.frobenius_b { "ok" } else { "FAIL" }
            );
            println!(
                "verdict: {}   ({:.3}s)",
                if report.verdict { "true" } else { "false" },
                report.elapsed.as_secs_f64()
            );
        }
    }
    Ok(code)
}

fn cmd_frobcheck(cli: &Cli, big_n: u32, q: u64, blocks: &str) -> Result<i32> {
    let datum = parse_blocks(big_n, q, blocks)?;
    datum.check_regular()?;
    prewarm(cli, &datum)?;
    let report = check_frobenius_structure(&datum)?;
    let ok = report.condition_a && report.condition_b;
    match cli.format {
        Format::Json => {
            emit_json(&report)?;
        }
        Format::Csv => {
            println!("condition,checks,pass");
            println!("a,{},{}", report.checks_a, report.condition_a);
            println!("b,{},{}", report.checks_b, report.condition_b);
        }
        Format::Pretty => {
            println!(
                "frobenius structure for N={big_n} q={q}: (a) {} over {} routes, (b) {} over {} rotations",
                if report.condition_a { "ok" } else { "FAIL" },
                report.checks_a,
                if report.condition_b { "ok" } else { "FAIL" },
                report.checks_b
            );
        }
    }
    Ok(if ok { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// theta0
// ---------------------------------------------------------------------------

fn parse_residue_matrix(q: u64, s: &str) -> Result<LMat> {
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 2 {
        bail!("element must have two rows separated by ';'");
    }
    let mut m = [[0u8; 2]; 2];
    for (i, row) in rows.iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 2 {
            bail!("row '{row}' must have two entries");
        }
        for (j, c) in cols.iter().enumerate() {
            let v: u64 = c.trim().parse().context("matrix entry")?;
            if v >= q {
                bail!("entry {v} is not an element index of F_{q}");
            }
            m[i][j] = v as u8;
        }
    }
    Ok(LMat::from_residues(m))
}

fn parse_laurent_matrix(path: &std::path::Path) -> Result<LMat> {
    let text = std::fs::read_to_string(path)?;
    let rows: Vec<Vec<Laurent>> = serde_json::from_str(&text)?;
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        bail!("element file must contain a 2×2 matrix");
    }
    Ok(LMat::new(
        rows[0][0].clone(),
        rows[0][1].clone(),
        rows[1][0].clone(),
        rows[1][1].clone(),
    ))
}

fn cmd_theta0(
    cli: &Cli,
    big_n: u32,
    q: u64,
    blocks: &str,
    element: Option<&str>,
    element_json: Option<&std::path::Path>,
    radius: Option<u32>,
) -> Result<i32> {
    let datum = parse_blocks(big_n, q, blocks)?;
    datum.check_regular()?;
    fq_of_order(q)?;
    let g = match (element, element_json) {
        (Some(s), None) => parse_residue_matrix(q, s)?,
        (None, Some(p)) => parse_laurent_matrix(p)?,
        _ => bail!("pass exactly one of --element or --element-json"),
    };
    prewarm(cli, &datum)?;
    let report = theta0(&datum, &g, radius)?;
    match cli.format {
        Format::Json => {
            emit_json(&report)?;
        }
        Format::Csv => {
            println!("value,fixed_vertices,fixed_edges,truncated");
            println!(
                "\"{}\",{},{},{}",
                report.value, report.fixed_vertices, report.fixed_edges, report.truncated
            );
        }
        Format::Pretty => {
            println!("warning: {}", report.warning);
            println!(
                "facet sum over {} fixed vertices and {} fixed edges{}",
                report.fixed_vertices,
                report.fixed_edges,
                if report.truncated { " (truncated at the radius hint)" } else { "" }
            );
            println!("value: {}", report.value);
        }
    }
    Ok(0)
}
