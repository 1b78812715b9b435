use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use snp_workbench::cm::Program;
use snp_workbench::dsl::{self, Document};
use snp_workbench::engine::{self, HaltReason, InputSchedule, OutputConvention, Policy};
use snp_workbench::snp2cm;
use snp_workbench::turing::{encode_config, TmConfig, TuringMachine};
use snp_workbench::universal;

#[derive(Parser)]
#[command(name = "snpw", version, about = "Spiking neural P system workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = PolicyArg::First, global = true)]
    policy: PolicyArg,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, default_value_t = 10_000, global = true)]
    max_steps: u64,
    /// Write one JSON record per timestep to this file.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    /// Include neuron contents in trace records.
    #[arg(long, global = true)]
    snapshots: bool,
    #[arg(short = 'o', long = "output", global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    First,
    Seeded,
    Strict,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a system.
    Run {
        file: PathBuf,
        /// Input schedule (`t count` per line).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Turing machine used to decode an emission-events result.
        #[arg(long)]
        tm: Option<PathBuf>,
    },
    /// Emit the 10-neuron universal system for a Turing machine.
    BuildUniversal { tm: PathBuf },
    /// Emit the 6-neuron encoder of left-tape numbers.
    BuildInputEncoder { tm: PathBuf },
    /// Emit the loading schedule for a tape, or the encoder word with --word.
    Encode {
        tm: PathBuf,
        #[command(flatten)]
        tape: TapeArgs,
        /// Print the encoder spike train for the cells left of the head.
        #[arg(long)]
        word: bool,
    },
    /// Compile a standard system to a counter machine and check it.
    TranslateCm {
        file: PathBuf,
        /// Binary input word fed to the input neuron.
        #[arg(long, default_value = "")]
        bits: String,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Run the universal system against direct Turing machine simulation.
    Verify {
        tm: PathBuf,
        #[arg(long, default_value_t = 20)]
        steps: u64,
        #[command(flatten)]
        tape: TapeArgs,
    },
    /// Parse and check any document.
    Validate { file: PathBuf },
}

#[derive(Args)]
struct TapeArgs {
    /// Comma-separated symbol numbers, e.g. `1,2,2,1`.
    #[arg(long, default_value = "1")]
    tape: String,
    /// 1-based position of the head on the tape.
    #[arg(long, default_value_t = 1)]
    head: usize,
    #[arg(long, default_value_t = 1)]
    state: u32,
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn parse(path: &Path) -> Result<Document, Failure> {
    dsl::parse_document(&read(path)?).map_err(|e| Failure::Usage(format!("{}:{}", path.display(), e)))
}

fn load_tm(path: &Path) -> Result<TuringMachine, Failure> {
    match parse(path)? {
        Document::Tm(tm) => Ok(tm),
        _ => Err(Failure::Usage(format!("{}: expected a `tm` document", path.display()))),
    }
}

fn load_snp(path: &Path) -> Result<engine::SnpSystem, Failure> {
    match parse(path)? {
        Document::Snp(s) => {
            let problems = engine::validate(&s);
            if problems.is_empty() {
                Ok(s)
            } else {
                Err(Failure::Usage(format!("{}: {}", path.display(), problems.join("; "))))
            }
        }
        _ => Err(Failure::Usage(format!("{}: expected a `system` document", path.display()))),
    }
}

fn emit(common: &Common, text: &str) -> Outcome {
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn policy(common: &Common) -> Policy {
    match common.policy {
        PolicyArg::First => Policy::First,
        PolicyArg::Seeded => Policy::Seeded(common.seed),
        PolicyArg::Strict => Policy::Strict,
    }
}

fn tape_config(tm: &TuringMachine, args: &TapeArgs) -> Result<TmConfig, Failure> {
    let cells: Vec<u32> = args
        .tape
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("bad --tape `{}`", args.tape)))?;
    if cells.iter().any(|&a| a == 0 || a > tm.symbols) {
        return Err(Failure::Usage(format!("--tape uses symbols outside 1..={}", tm.symbols)));
    }
    if args.head == 0 || args.head > cells.len() {
        return Err(Failure::Usage(format!("--head must be within 1..={}", cells.len())));
    }
    if args.state == 0 || args.state > tm.states {
        return Err(Failure::Usage(format!("--state must be within 1..={}", tm.states)));
    }
    let left = cells[..args.head - 1].iter().rev().copied().collect();
    let right = cells[args.head..].to_vec();
    Ok(TmConfig::new(args.state, left, cells[args.head - 1], right))
}

fn cmd_run(common: &Common, file: &Path, input: Option<&Path>, tm: Option<&Path>) -> Outcome {
    let sys = load_snp(file)?;
    let schedule = match input {
        Some(p) => InputSchedule::parse(&read(p)?).map_err(|e| Failure::Usage(format!("{}: {}", p.display(), e)))?,
        None => InputSchedule::new(),
    };
    let trace = match &common.trace {
        Some(path) => {
            let mut w = BufWriter::new(fs::File::create(path)?);
            let mut sink = TraceSink { inner: &mut w, snapshots: common.snapshots, line: Vec::new() };
            let t = engine::run_with_sink(&sys, &schedule, policy(common), common.max_steps, Some(&mut sink))?;
            w.flush()?;
            t
        }
        None => engine::run(&sys, &schedule, policy(common), common.max_steps),
    };
    let reason = match &trace.halt_reason {
        HaltReason::Quiescent => "quiescent".to_string(),
        HaltReason::MaxSteps => "max-steps".to_string(),
        HaltReason::StrictViolation { time, neuron, candidates } => {
            let rules: Vec<String> = candidates.iter().map(|r| (r + 1).to_string()).collect();
            return Err(Failure::Mismatch(format!(
                "strict policy violation at t={}: neuron {} has rules {} applicable",
                time,
                neuron + 1,
                rules.join(",")
            )));
        }
    };
    println!("stopped: {} at t={}", reason, trace.final_time);
    println!("space: {}", trace.space_used());
    for (t, n) in &trace.output_events {
        println!("emission t={} spikes={}", t, n);
    }
    match engine::output_value(&trace, sys.convention) {
        Ok(v) => {
            println!("output: {}", v);
            if let (Some(path), OutputConvention::EmissionEvents) = (tm, sys.convention) {
                let tm = load_tm(path)?;
                let cells = universal::decode_output(&tm, &v).map_err(|e| Failure::Mismatch(e.to_string()))?;
                let tape: Vec<String> = cells.iter().map(|a| format!("a{}", a)).collect();
                println!("tape: {}", tape.join(" "));
            }
        }
        Err(e) => println!("output: none ({})", e),
    }
    Ok(())
}

/// Writes step records, dropping contents unless snapshots were requested.
struct TraceSink<'a, W: Write> {
    inner: &'a mut W,
    snapshots: bool,
    line: Vec<u8>,
}

impl<W: Write> Write for TraceSink<'_, W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        if self.snapshots {
            return self.inner.write(buf);
        }
        for &b in buf {
            if b != b'\n' {
                self.line.push(b);
                continue;
            }
            let mut value: serde_json::Value = serde_json::from_slice(&self.line).map_err(io::Error::other)?;
            if let Some(obj) = value.as_object_mut() {
                obj.remove("contents");
            }
            serde_json::to_writer(&mut *self.inner, &value).map_err(io::Error::other)?;
            self.inner.write_all(b"\n")?;
            self.line.clear();
        }
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn cmd_translate(common: &Common, file: &Path, bits: &str, cap: usize) -> Outcome {
    let sys = load_snp(file)?;
    let tr = snp2cm::translate(&sys).map_err(|e| Failure::Usage(e.to_string()))?;
    let word: Vec<char> = bits.chars().collect();
    let cm = tr.materialize(cap).map_err(|e| Failure::Usage(e.to_string()))?;
    emit(common, &dsl::print_cm(&cm))?;
    let cmp = snp2cm::compare(&tr, &word, common.max_steps, policy(common), cap)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    eprintln!("counters: {}", tr.counters());
    eprintln!("x_r: {}", cmp.x_r);
    eprintln!("control states: {}", cm.states);
    eprintln!("timesteps compared: {}", cmp.timesteps);
    eprintln!("max CM steps per timestep: {}", cmp.max_steps_per_timestep());
    let show = |v: &Option<num_bigint::BigUint>| v.as_ref().map_or("none".to_string(), |n| n.to_string());
    eprintln!("output: system {} machine {}", show(&cmp.snp_output), show(&cmp.cm_output));
    if let Some(d) = &cmp.divergence {
        return Err(Failure::Mismatch(format!(
            "FAIL: counters {:?} differ from contents {:?} at t={}",
            d.counters.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            d.contents.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            d.t
        )));
    }
    if !cmp.ok() {
        return Err(Failure::Mismatch("FAIL: outputs or space bound differ".into()));
    }
    eprintln!("PASS");
    Ok(())
}

fn cmd_verify(common: &Common, tm_path: &Path, steps: u64, tape: &TapeArgs) -> Outcome {
    let tm = load_tm(tm_path)?;
    let cfg = tape_config(&tm, tape)?;
    for o in universal::conflicts(&tm) {
        eprintln!(
            "warning: neuron {} rules {} and {} both apply to {} spikes",
            o.neuron + 1,
            o.rules.0 + 1,
            o.rules.1 + 1,
            o.witness
        );
    }
    let v = universal::verify_against_oracle(&tm, &cfg, steps, policy(common));
    for n in 0..v.moves_checked {
        let t = universal::boundary_time(&tm, n);
        let bad = v.mismatches.iter().any(|m| m.moves == n);
        println!("move {:>4} t={:>6} {}", n, t, if bad { "FAIL" } else { "PASS" });
    }
    if let (Some(n), Some(y)) = (v.halted_at, &v.expected_output) {
        let got = v.output_events.first().map(|(t, s)| format!("{} at t={}", s, t));
        println!("halted after {} moves: expected Y={}, emitted {}", n, y, got.unwrap_or_else(|| "nothing".into()));
    }
    if let HaltReason::StrictViolation { time, neuron, .. } = &v.halt_reason {
        println!("strict policy violation at t={} in neuron {}", time, neuron + 1);
    }
    if v.ok() {
        Ok(())
    } else {
        Err(Failure::Mismatch("FAIL".into()))
    }
}

fn cmd_validate(file: &Path) -> Outcome {
    let problems = match parse(file)? {
        Document::Snp(sys) => {
            for o in engine::overlap_report(&sys) {
                println!(
                    "note: neuron {} rules {} and {} both apply to {} spikes",
                    o.neuron + 1,
                    o.rules.0 + 1,
                    o.rules.1 + 1,
                    o.witness
                );
            }
            engine::validate(&sys)
        }
        Document::Cm(cm) => cm.validate(),
        Document::Tm(tm) => tm.missing().iter().map(|(q, a)| format!("no transition for (q{}, a{})", q, a)).collect(),
    };
    for p in &problems {
        println!("error: {}", p);
    }
    if problems.is_empty() {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{} problem(s)", problems.len())))
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let common = &cli.common;
    match &cli.command {
        Command::Run { file, input, tm } => cmd_run(common, file, input.as_deref(), tm.as_deref()),
        Command::BuildUniversal { tm } => emit(common, &dsl::print_snp(&universal::build_pi_m(&load_tm(tm)?))),
        Command::BuildInputEncoder { tm } => emit(common, &dsl::print_snp(&universal::build_pi_input(&load_tm(tm)?))),
        Command::Encode { tm, tape, word } => {
            let tm = load_tm(tm)?;
            let cfg = tape_config(&tm, tape)?;
            let schedule = if *word {
                InputSchedule::from_train(&universal::build_input_word(&tm, &cfg.left))
            } else {
                universal::build_schedule(&tm, &encode_config(&tm, &cfg))
            };
            emit(common, &schedule.to_text())
        }
        Command::TranslateCm { file, bits, cap } => cmd_translate(common, file, bits, *cap),
        Command::Verify { tm, steps, tape } => cmd_verify(common, tm, *steps, tape),
        Command::Validate { file } => cmd_validate(file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
