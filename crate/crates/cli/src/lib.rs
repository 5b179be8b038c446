//! The `mv3` command-line tool: cipher operations plus the analysis lab.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mv3::keyschedule::parse_hex_words;
use mv3::{initialize_with, KeyMaterial, MultiplierUpdate, StreamSession};
use mv3_lab::bounds::{
    distinguisher_bound, guess_and_determine_cost, related_key_complexity, tmdto_margin, KeyScheduleLoops,
};
use mv3_lab::graph::{build_cayley_graph, build_nonlinear_graph, build_squaring_graph, random_generators, WalkGraph};
use mv3_lab::perf::measure_throughput;
use mv3_lab::sequencing::{min_pair_weight, SearchConfig, SequencingScheme};
use mv3_lab::spectrum::{explicit_census, spectrum};
use mv3_lab::stats::{stat_tests, StatTest};
use mv3_lab::walk::{hitting_walk_length, mixing_time, visit_count_experiment, MixingOptions, Start, WalkExperiment};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(name = "mv3", version, about = "MV3 stream cipher and random-walk analysis lab")]
pub struct Cli {
    /// Emit CSV instead of aligned text (columns are listed in each command's help).
    #[arg(long, global = true)]
    pub csv: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write raw keystream bytes.
    Keystream {
        #[command(flatten)]
        key: KeyArgs,
        /// Number of bytes.
        #[arg(long, default_value_t = 128)]
        bytes: usize,
        /// Print lowercase hex instead of raw bytes.
        #[arg(long)]
        hex: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Encrypt a file or stdin.
    Encrypt(CryptArgs),
    /// Decrypt a file or stdin (same operation as encrypt).
    Decrypt(CryptArgs),
    /// Spectrum of the nonlinear graph x ~ r(x±1), r⁻¹x±1 on Z/nZ.
    ///
    /// CSV columns: n,r,explicit,missing,lambda2,max_nonexplicit_abs,epsilon,admissible_c
    AnalyzeGraph {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 3)]
        r: u64,
        /// Use the square-and-or permutation graph on Z/2^b instead (n must be a power of two).
        #[arg(long)]
        squaring: bool,
        /// Also print every eigenvalue.
        #[arg(long)]
        eigenvalues: bool,
    },
    /// Spectrum of the Cayley graph x ~ x±s on Z/nZ.
    ///
    /// CSV columns: n,generators,degree,lambda2,normalized_lambda2,delta
    AnalyzeCayley {
        #[arg(long)]
        n: u64,
        /// Comma-separated generators.
        #[arg(long, value_delimiter = ',', conflicts_with = "random")]
        generators: Vec<u64>,
        /// Draw this many random generators instead.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact mixing time of the walk on the nonlinear graph.
    ///
    /// CSV columns: n,r,start,eps,lazy,steps,tv,sigma,hitting_bound
    Mixing {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 3)]
        r: u64,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Total-variation threshold; defaults to 1/n.
        #[arg(long)]
        eps: Option<f64>,
        /// Walk without the stay-put half step.
        #[arg(long)]
        no_lazy: bool,
        #[arg(long, default_value_t = 200_000)]
        max_steps: usize,
        /// Target-set size for the hitting-length bound.
        #[arg(long)]
        set_size: Option<usize>,
    },
    /// Monte-Carlo visit counts against the Chernoff-type tail bound.
    ///
    /// CSV columns: x,empirical,bound,holds
    Visits {
        #[arg(long, default_value_t = 512)]
        n: u64,
        #[arg(long, default_value_t = 3)]
        r: u64,
        /// Target set is {0, …, set_size−1}.
        #[arg(long, default_value_t = 128)]
        set_size: usize,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = 5000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [50.0, 100.0, 200.0])]
        x: Vec<f64>,
    },
    /// Minimum pair weight of relations in an output-sequencing scheme.
    ///
    /// CSV columns: scheme,max_b,horizon,a_min,b,exhaustive,nodes,y_indices
    Sequencing {
        /// `cipher`, `family`, or a path to a scheme file (one line of offsets per residue).
        #[arg(long, default_value = "cipher")]
        scheme: String,
        /// Window for scheme files.
        #[arg(long, default_value_t = 64)]
        window: u32,
        /// Accept windows outside 64..=256.
        #[arg(long)]
        relaxed: bool,
        #[arg(long, default_value_t = 6)]
        max_b: usize,
        /// Defaults to 4P + C.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Related-key attack complexity.
    ///
    /// CSV columns: t,key_bits,loops,insertion,log2_m,log2_total,beats_exhaustive
    Relkey {
        /// Table words touched per key word (key length 8192/t bits); omit for all of 1..=63.
        #[arg(long)]
        t: Option<u32>,
        #[arg(long, default_value_t = 8)]
        loops: u32,
        /// Keystream inserted into the table instead of XORed.
        #[arg(long)]
        insertion: bool,
    },
    /// Distinguisher advantage sqrt(Σ A(a)·eps^(2a)).
    Bound {
        #[arg(long)]
        eps: f64,
        /// Comma-separated `a:count` pairs.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<String>,
    },
    /// Monobit, 2-bit serial and per-bit-lane tests on a byte stream.
    ///
    /// CSV columns: test,statistic,z,pass
    Stats {
        /// Input file (default stdin).
        #[arg(short, long)]
        input: Option<PathBuf>,
    },
    /// State size against the time-memory-data tradeoff margin, and the
    /// guess-and-determine cost figures.
    Tmdto {
        #[arg(long, default_value_t = 256)]
        key_bits: usize,
    },
    /// Steady-state keystream throughput.
    Bench {
        /// Bytes to time after a 1 MiB warm-up.
        #[arg(long, default_value_t = 64 << 20)]
        bytes: usize,
        #[arg(long)]
        cube: bool,
    },
}

#[derive(Args, Debug)]
pub struct KeyArgs {
    /// Key as hex bytes; every 4 bytes form one little-endian word.
    #[arg(long, group = "key_src", required_unless_present_any = ["key_file", "key_env"])]
    pub key: Option<String>,
    /// File holding the key as hex text.
    #[arg(long, group = "key_src")]
    pub key_file: Option<PathBuf>,
    /// Environment variable holding the key as hex.
    #[arg(long, group = "key_src")]
    pub key_env: Option<String>,
    /// IV as hex; must have as many words as the key.
    #[arg(long, group = "iv_src", required_unless_present_any = ["iv_file", "iv_env"])]
    pub iv: Option<String>,
    #[arg(long, group = "iv_src")]
    pub iv_file: Option<PathBuf>,
    #[arg(long, group = "iv_src")]
    pub iv_env: Option<String>,
    /// Cube the multiplier instead of squaring it.
    #[arg(long)]
    pub cube: bool,
}

#[derive(Args, Debug)]
pub struct CryptArgs {
    #[command(flatten)]
    pub key: KeyArgs,
    /// Input file (default stdin).
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) if is_broken_pipe(&e) => 0,
        Err(e) => {
            eprintln!("mv3: error: {}", one_line(&e));
            1
        }
    }
}

fn one_line(e: &anyhow::Error) -> String {
    e.chain().map(|c| c.to_string()).collect::<Vec<_>>().join(": ").replace('\n', " ")
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn execute(cli: &Cli) -> Result<()> {
    let csv = cli.csv;
    match &cli.command {
        Command::Keystream { key, bytes, hex, output } => {
            let mut session = session(key)?;
            let ks = session.keystream_bytes(*bytes);
            let mut out = open_output(output.as_deref())?;
            if *hex {
                writeln!(out, "{}", to_hex(&ks))?;
            } else {
                out.write_all(&ks)?;
            }
            out.flush()?;
        }
        Command::Encrypt(a) | Command::Decrypt(a) => {
            let mut session = session(&a.key)?;
            let mut input = open_input(a.input.as_deref())?;
            let mut out = open_output(a.output.as_deref())?;
            let mut buf = vec![0u8; 1 << 16];
            loop {
                let n = match input.read(&mut buf) {
                    Ok(0) => break,
                    Ok(n) => n,
                    Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                    Err(e) => return Err(e).context("reading input"),
                };
                session.apply_keystream(&mut buf[..n]);
                out.write_all(&buf[..n])?;
            }
            out.flush()?;
        }
        Command::AnalyzeGraph { n, r, squaring, eigenvalues } => analyze_graph(*n, *r, *squaring, *eigenvalues, csv)?,
        Command::AnalyzeCayley { n, generators, random, seed } => {
            let gens = match random {
                Some(k) => random_generators(*n, *k, &mut ChaCha8Rng::seed_from_u64(*seed)),
                None if generators.is_empty() => bail!("give --generators or --random"),
                None => generators.clone(),
            };
            let g = build_cayley_graph(*n, &gens)?;
            let s = spectrum(&g)?;
            let norm = s.normalized_second();
            let list = gens.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            if csv {
                println!("n,generators,degree,lambda2,normalized_lambda2,delta");
                println!("{n},{list},{},{},{norm},{}", g.degree(), s.second_largest(), 1.0 - norm);
            } else {
                println!("n                   {n}");
                println!("generators          {list}");
                println!("degree              {}", g.degree());
                println!("lambda2             {:.9}", s.second_largest());
                println!("lambda2 / k         {norm:.9}");
                println!("gap delta           {:.9}", 1.0 - norm);
            }
        }
        Command::Mixing { n, r, start, eps, no_lazy, max_steps, set_size } => {
            let g = build_nonlinear_graph(*n, *r)?;
            let eps = eps.unwrap_or(1.0 / *n as f64);
            let lazy = !no_lazy;
            let rep = mixing_time(&g, *start, eps, MixingOptions { lazy, max_steps: *max_steps })?;
            let s = spectrum(&g)?;
            let k = g.degree() as f64;
            // The lazy operator (I + A/k)/2 has top eigenvalue 1 and no negative part.
            let (top, sigma) = if lazy {
                (1.0, (1.0 + s.second_largest() / k) / 2.0)
            } else {
                (k, s.max_nontrivial_abs())
            };
            let set = set_size.unwrap_or((*n as usize / 4).max(1));
            let hit = hitting_walk_length(g.n(), set, top, sigma);
            if csv {
                println!("n,r,start,eps,lazy,steps,tv,sigma,hitting_bound");
                println!("{n},{r},{start},{eps},{lazy},{},{},{sigma},{hit}", rep.steps, rep.tv);
            } else {
                println!("graph               nonlinear n={n} r={r}");
                println!("walk                {}", if lazy { "lazy" } else { "simple" });
                println!("eps                 {eps:e}");
                println!("mixing steps        {}", rep.steps);
                println!("tv at that step     {:e}", rep.tv);
                println!("sigma               {sigma:.9}");
                println!("hitting bound |S|={set:<4} {hit:.3}");
            }
        }
        Command::Visits { n, r, set_size, steps, trials, seed, x } => {
            let g = build_nonlinear_graph(*n, *r)?;
            if *set_size == 0 || *set_size > g.n() {
                bail!("set size must lie in 1..={}", g.n());
            }
            let eps = spectrum(&g)?.epsilon();
            let exp = WalkExperiment {
                graph: &g,
                start: Start::Uniform,
                steps: *steps,
                target: (0..*set_size).collect(),
                trials: *trials,
                seed: *seed,
            };
            let rep = visit_count_experiment(&exp, eps, x)?;
            if csv {
                println!("x,empirical,bound,holds");
                for row in &rep.rows {
                    println!("{},{},{},{}", row.x, row.empirical, row.bound, row.holds());
                }
            } else {
                println!("expected visits {:.3}, mean {:.3}, epsilon {:.6}", rep.expected, rep.mean(), rep.epsilon);
                println!("{:>8} {:>12} {:>12} {:>6}", "x", "empirical", "bound", "holds");
                for row in &rep.rows {
                    println!("{:>8} {:>12.6} {:>12.6} {:>6}", row.x, row.empirical, row.bound, row.holds());
                }
            }
            if !rep.all_hold() {
                bail!("empirical tail exceeded the bound");
            }
        }
        Command::Sequencing { scheme, window, relaxed, max_b, horizon } => {
            let s = match scheme.as_str() {
                "cipher" => SequencingScheme::mv3(),
                "family" => SequencingScheme::modular_family(),
                path => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading scheme {path}"))?;
                    SequencingScheme::parse(&text, *window, *relaxed)?
                }
            };
            let mut cfg = SearchConfig::default_for(&s);
            cfg.max_b = *max_b;
            if let Some(h) = horizon {
                cfg.horizon = *h;
            }
            let rep = min_pair_weight(&s, cfg)?;
            let a = rep.a_min.map_or("none".to_string(), |a| a.to_string());
            let ys = rep
                .witness
                .as_ref()
                .map(|w| w.y_indices.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
                .unwrap_or_default();
            let b = rep.witness.as_ref().map_or(0, |w| w.b);
            if csv {
                println!("scheme,max_b,horizon,a_min,b,exhaustive,nodes,y_indices");
                println!("{scheme},{},{},{a},{b},{},{},{ys}", cfg.max_b, cfg.horizon, rep.exhaustive, rep.nodes);
            } else {
                let kind = if rep.exhaustive { "exact" } else { "upper bound" };
                println!("scheme              {scheme} (period {})", s.period());
                println!("search              max_b={} horizon={} nodes={}", cfg.max_b, cfg.horizon, rep.nodes);
                println!("a_min               {a} ({kind})");
                if let Some(w) = &rep.witness {
                    println!("outputs (b={})       {ys}", w.b);
                    println!("pairs               {:?}", w.pair_indices);
                    println!("verified            {}", w.verify(&s));
                }
            }
        }
        Command::Relkey { t, loops, insertion } => {
            let loops = KeyScheduleLoops::from_count(*loops)?;
            let ts: Vec<u32> = match t {
                Some(t) => vec![*t],
                None => (1..=63).collect(),
            };
            if csv {
                println!("t,key_bits,loops,insertion,log2_m,log2_total,beats_exhaustive");
            } else {
                println!("{:>3} {:>9} {:>10} {:>11} {:>7}", "t", "key bits", "log2 M", "log2 total", "faster");
            }
            for t in ts {
                let c = related_key_complexity(t, loops, *insertion)?;
                if csv {
                    println!(
                        "{t},{},{},{},{},{},{}",
                        c.key_bits(),
                        loops.count(),
                        insertion,
                        c.log2_m,
                        c.log2_total,
                        c.beats_exhaustive_search()
                    );
                } else {
                    println!(
                        "{t:>3} {:>9.1} {:>10.3} {:>11.3} {:>7}",
                        c.key_bits(),
                        c.log2_m,
                        c.log2_total,
                        c.beats_exhaustive_search()
                    );
                }
            }
        }
        Command::Bound { eps, counts } => {
            let parsed = counts.iter().map(|c| parse_count(c)).collect::<Result<Vec<_>>>()?;
            let v = distinguisher_bound(*eps, &parsed)?;
            if csv {
                println!("eps,bound,log2_bound");
                println!("{eps},{v},{}", v.log2());
            } else {
                println!("bound {v:e} (log2 {:.3})", v.log2());
            }
        }
        Command::Stats { input } => {
            let mut data = Vec::new();
            open_input(input.as_deref())?.read_to_end(&mut data).context("reading input")?;
            let r = stat_tests(&data, &StatTest::ALL)?;
            let mut rows: Vec<(String, f64, f64)> = vec![
                ("monobit".into(), r.monobit_z.unwrap_or(0.0), r.monobit_z.unwrap_or(0.0)),
                ("serial-2bit".into(), r.serial_chi2.unwrap_or(0.0), r.serial_z.unwrap_or(0.0)),
            ];
            if let Some(lanes) = r.lane_z {
                rows.extend(lanes.iter().enumerate().map(|(i, z)| (format!("lane-{i}"), *z, *z)));
            }
            if csv {
                println!("test,statistic,z,pass");
            }
            for (name, stat, z) in &rows {
                let pass = z.abs() <= r.sigma;
                if csv {
                    println!("{name},{stat},{z},{pass}");
                } else {
                    println!("{name:<12} {stat:>12.4} z={z:>8.4} {}", if pass { "pass" } else { "FAIL" });
                }
            }
            if !csv {
                println!("{} bytes, worst |z| {:.3}, {}", r.bytes, r.worst_z(), if r.pass() { "pass" } else { "FAIL" });
            }
        }
        Command::Tmdto { key_bits } => {
            let m = tmdto_margin(*key_bits)?;
            let g = guess_and_determine_cost(10);
            if csv {
                println!("state_bits,key_bits,margin_holds,gd_guessed_bits,gd_collisions_needed,gd_expected_collisions_10_loops,gd_keystream_bits");
                println!(
                    "{},{},{},{},{},{},{}",
                    m.state_bits, m.key_bits, m.holds, g.guessed_bits, g.collisions_needed, g.expected_collisions, g.keystream_bits
                );
            } else {
                println!("state bits          {}", m.state_bits);
                println!("key bits            {}", m.key_bits);
                println!("state >= 2*key      {}", m.holds);
                println!("guess-and-determine {} bits guessed, {} collisions needed,", g.guessed_bits, g.collisions_needed);
                println!("                    {:.1} expected in {} loops ({} keystream bits)", g.expected_collisions, g.loops, g.keystream_bits);
            }
        }
        Command::Bench { bytes, cube } => {
            let km = KeyMaterial::new((0..5).collect(), (5..10).collect())?;
            let (mut state, _) = initialize_with(&km, update(*cube));
            let t = measure_throughput(&mut state, *bytes)?;
            let cpb = t.cycles_per_byte();
            if csv {
                println!("bytes,seconds,mb_per_sec,cycles_per_byte");
                println!("{},{},{},{}", t.bytes, t.elapsed.as_secs_f64(), t.mb_per_sec(), cpb.map_or(String::new(), |c| c.to_string()));
            } else {
                println!("{} bytes in {:.3} s: {:.1} MB/s", t.bytes, t.elapsed.as_secs_f64(), t.mb_per_sec());
                match cpb {
                    Some(c) => println!("~{c:.2} cycles/byte at the nominal clock"),
                    None => println!("cycles/byte unavailable (no clock reading)"),
                }
            }
        }
    }
    Ok(())
}

fn analyze_graph(n: u64, r: u64, squaring: bool, list: bool, csv: bool) -> Result<()> {
    let g: WalkGraph = if squaring {
        if !n.is_power_of_two() {
            bail!("--squaring needs n to be a power of two");
        }
        build_squaring_graph(n.trailing_zeros())?
    } else {
        build_nonlinear_graph(n, r)?
    };
    let s = spectrum(&g)?;
    let census = (!squaring).then(|| explicit_census(&s, n, r, 1e-9));
    if csv {
        println!("n,r,explicit,missing,lambda2,max_nonexplicit_abs,epsilon,admissible_c");
        let (e, m, mx, c) = census.as_ref().map_or((0, 0, s.max_nontrivial_abs(), f64::NAN), |c| {
            (c.explicit.len(), c.missing.len(), c.max_remaining_abs(), c.admissible_c())
        });
        println!("{n},{r},{e},{m},{},{mx},{},{c}", s.second_largest(), s.epsilon());
    } else {
        println!("graph               {} n={n}{}", if squaring { "squaring" } else { "nonlinear" }, if squaring { String::new() } else { format!(" r={r}") });
        println!("lambda2             {:.12}", s.second_largest());
        println!("max |λ| nontrivial  {:.12}", s.max_nontrivial_abs());
        println!("epsilon             {:.12}", s.epsilon());
        if let Some(c) = &census {
            let mut ex = c.explicit.clone();
            ex.sort_by(|a, b| b.total_cmp(a));
            println!("explicit            {} values, {} missing: {:?}", ex.len(), c.missing.len(), ex);
            println!("max |λ| non-explicit {:.12}", c.max_remaining_abs());
            println!("admissible c        {:.6}", c.admissible_c());
        }
    }
    if list {
        for (i, l) in s.eigenvalues().iter().enumerate() {
            if csv {
                println!("eig,{i},{l}");
            } else {
                println!("{i:>6} {l:>20.12}");
            }
        }
    }
    Ok(())
}

fn parse_count(s: &str) -> Result<(u32, f64)> {
    let (a, c) = s.split_once(':').ok_or_else(|| anyhow!("count {s:?} is not of the form a:count"))?;
    Ok((a.trim().parse().with_context(|| format!("bad a in {s:?}"))?, c.trim().parse().with_context(|| format!("bad count in {s:?}"))?))
}

fn update(cube: bool) -> MultiplierUpdate {
    if cube {
        MultiplierUpdate::Cube
    } else {
        MultiplierUpdate::Square
    }
}

fn session(k: &KeyArgs) -> Result<StreamSession> {
    let key = read_words("key", &k.key, &k.key_file, &k.key_env)?;
    let iv = read_words("IV", &k.iv, &k.iv_file, &k.iv_env)?;
    let km = KeyMaterial::new(key, iv)?;
    Ok(StreamSession::with_update(&km, update(k.cube)))
}

fn read_words(what: &str, hex: &Option<String>, file: &Option<PathBuf>, env: &Option<String>) -> Result<Vec<u32>> {
    let text = match (hex, file, env) {
        (Some(h), _, _) => h.clone(),
        (_, Some(p), _) => std::fs::read_to_string(p).with_context(|| format!("reading {what} file {}", p.display()))?,
        (_, _, Some(v)) => std::env::var(v).with_context(|| format!("{what} variable {v}"))?,
        _ => bail!("no {what} given"),
    };
    parse_hex_words(&text).with_context(|| format!("parsing {what}"))
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn Read>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(File::open(p).with_context(|| format!("opening {}", p.display()))?),
        _ => Box::new(io::stdin().lock()),
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => {
            Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
