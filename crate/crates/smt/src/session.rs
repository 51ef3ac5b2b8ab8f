//! A live solver process spoken to in SMT-LIB2 over its standard streams.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use log::{debug, warn};

use crate::formula::{Sort, Term, Value, VarId, VarPool};
use crate::lower::{self, QuantifierLowering};
use crate::sexpr::{self, SExpr};

/// Environment variable that overrides the solver executable.
pub const SOLVER_ENV: &str = "GLYCANSYNTH_SOLVER";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub executable: PathBuf,
    pub extra_args: Vec<String>,
    pub timeout: Duration,
    pub logic: Option<String>,
    pub dump_dir: Option<PathBuf>,
    pub quantifiers: QuantifierLowering,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            executable: PathBuf::from("z3"),
            extra_args: vec!["-in".into(), "-smt2".into()],
            timeout: Duration::from_secs(60),
            logic: Some("ALL".into()),
            dump_dir: None,
            quantifiers: QuantifierLowering::default(),
        }
    }
}

impl SolverConfig {
    /// Defaults, with the executable taken from [`SOLVER_ENV`] when set.
    pub fn from_env() -> Self {
        let mut cfg = SolverConfig::default();
        if let Some(p) = std::env::var_os(SOLVER_ENV).filter(|p| !p.is_empty()) {
            cfg.executable = PathBuf::from(p);
        }
        cfg
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SmtError {
    #[error("cannot launch solver `{path}`")]
    Launch {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("solver i/o failed")]
    Io(#[from] std::io::Error),
    #[error("solver protocol error: {message}\n--- transcript tail ---\n{transcript}")]
    Protocol { message: String, transcript: String },
    #[error("solver did not answer within {0:?}")]
    Timeout(Duration),
    #[error("solver session is no longer usable")]
    Dead,
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
    Unknown(String),
}

/// Values of the queried variables from the last `sat` answer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    values: HashMap<VarId, Value>,
}

impl Model {
    pub fn from_values(values: HashMap<VarId, Value>) -> Self {
        Model { values }
    }

    pub fn get(&self, v: VarId) -> Option<Value> {
        self.values.get(&v).copied()
    }

    pub fn bool(&self, v: VarId) -> Option<bool> {
        self.get(v)?.as_bool()
    }

    pub fn int(&self, v: VarId) -> Option<i64> {
        self.get(v)?.as_int()
    }

    /// Value of a term that is either a constant or a queried variable.
    pub fn term(&self, t: &Term) -> Option<Value> {
        if let Some(b) = t.as_bool() {
            return Some(Value::Bool(b));
        }
        if let Some(i) = t.as_int() {
            return Some(Value::Int(i));
        }
        self.get(t.as_var()?)
    }

    pub fn values(&self) -> &HashMap<VarId, Value> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Default)]
struct Frame {
    commands: Vec<String>,
    declared: Vec<VarId>,
}

pub struct Session {
    cfg: SolverConfig,
    child: Child,
    stdin: BufWriter<ChildStdin>,
    lines: Receiver<String>,
    header: Vec<String>,
    frames: Vec<Frame>,
    declared: HashSet<VarId>,
    dead: bool,
    /// Answers to every `check-sat`, in order.
    answers: Vec<SatResult>,
}

impl Session {
    pub fn open(cfg: SolverConfig) -> Result<Session, SmtError> {
        if cfg.timeout.is_zero() {
            return Err(SmtError::Config("timeout must be positive".into()));
        }
        let mut child = Command::new(&cfg.executable)
            .args(&cfg.extra_args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SmtError::Launch {
                path: cfg.executable.clone(),
                source,
            })?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut s = Session {
            cfg,
            child,
            stdin,
            lines: rx,
            header: Vec::new(),
            frames: vec![Frame::default()],
            declared: HashSet::new(),
            dead: false,
            answers: Vec::new(),
        };
        s.raw("(set-option :print-success true)")?;
        s.expect_success()?;
        if let Some(logic) = s.cfg.logic.clone() {
            let cmd = format!("(set-logic {logic})");
            s.send(&cmd)?;
            s.header.push(cmd);
        }
        Ok(s)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn answers(&self) -> &[SatResult] {
        &self.answers
    }

    fn raw(&mut self, cmd: &str) -> Result<(), SmtError> {
        if self.dead {
            return Err(SmtError::Dead);
        }
        self.stdin.write_all(cmd.as_bytes())?;
        self.stdin.write_all(b"\n")?;
        self.stdin.flush()?;
        Ok(())
    }

    fn read_line(&mut self, wait: Duration) -> Result<String, SmtError> {
        match self.lines.recv_timeout(wait) {
            Ok(l) => Ok(l),
            Err(RecvTimeoutError::Timeout) => {
                self.kill();
                Err(SmtError::Timeout(wait))
            }
            Err(RecvTimeoutError::Disconnected) => {
                self.dead = true;
                Err(self.protocol("solver closed its output"))
            }
        }
    }

    fn read_sexpr(&mut self, wait: Duration) -> Result<String, SmtError> {
        let deadline = Instant::now() + wait;
        let mut text = String::new();
        let mut depth = 0;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            let line = self.read_line(left.max(Duration::from_millis(1)))?;
            depth += sexpr::paren_balance(&line);
            text.push_str(&line);
            text.push('\n');
            if depth <= 0 && !text.trim().is_empty() {
                return Ok(text);
            }
        }
    }

    fn protocol(&self, message: impl Into<String>) -> SmtError {
        let commands = self.flat_commands();
        let tail = commands[commands.len().saturating_sub(5)..]
            .iter()
            .map(|c| {
                if c.len() > 400 {
                    format!("{}...", &c[..400])
                } else {
                    c.clone()
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        SmtError::Protocol {
            message: message.into(),
            transcript: tail,
        }
    }

    fn expect_success(&mut self) -> Result<(), SmtError> {
        let line = self.read_sexpr(self.cfg.timeout)?;
        if line.trim() == "success" {
            Ok(())
        } else {
            Err(self.protocol(format!("expected `success`, got `{}`", line.trim())))
        }
    }

    /// Sends a command and records it in the current frame of the transcript.
    fn send(&mut self, cmd: &str) -> Result<(), SmtError> {
        self.raw(cmd)?;
        self.expect_success()
    }

    fn record(&mut self, cmd: String) -> Result<(), SmtError> {
        self.send(&cmd)?;
        self.frames
            .last_mut()
            .expect("base frame")
            .commands
            .push(cmd);
        Ok(())
    }

    /// Declares `v` at the current scope unless already visible.
    pub fn declare(&mut self, pool: &VarPool, v: VarId) -> Result<(), SmtError> {
        if self.declared.contains(&v) {
            return Ok(());
        }
        for cmd in lower::declare(pool, v) {
            self.record(cmd)?;
        }
        self.declared.insert(v);
        self.frames.last_mut().expect("base frame").declared.push(v);
        Ok(())
    }

    /// Asserts `t`, declaring its free variables first.
    pub fn assert(&mut self, pool: &VarPool, t: &Term) -> Result<(), SmtError> {
        if t.is_true() {
            return Ok(());
        }
        for v in t.free_vars() {
            self.declare(pool, v)?;
        }
        let cmd = lower::assertion(pool, t, self.cfg.quantifiers);
        self.record(cmd)
    }

    pub fn push(&mut self) -> Result<(), SmtError> {
        self.send("(push 1)")?;
        self.frames.push(Frame::default());
        Ok(())
    }

    pub fn pop(&mut self) -> Result<(), SmtError> {
        if self.frames.len() == 1 {
            return Err(SmtError::Config("pop without matching push".into()));
        }
        self.send("(pop 1)")?;
        let f = self.frames.pop().expect("checked depth");
        for v in f.declared {
            self.declared.remove(&v);
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.frames.len() - 1
    }

    fn flat_commands(&self) -> Vec<String> {
        let mut out = self.header.clone();
        for (i, f) in self.frames.iter().enumerate() {
            if i > 0 {
                out.push("(push 1)".into());
            }
            out.extend(f.commands.iter().cloned());
        }
        out
    }

    /// Standalone script reproducing the current assertion stack followed by `check-sat`.
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for c in self.flat_commands() {
            out.push_str(&c);
            out.push('\n');
        }
        out.push_str("(check-sat)\n");
        out
    }

    pub fn check(&mut self) -> Result<SatResult, SmtError> {
        let started = Instant::now();
        self.raw("(check-sat)")?;
        let answer = match self.read_line(self.cfg.timeout) {
            Ok(line) => match line.trim() {
                "sat" => SatResult::Sat,
                "unsat" => SatResult::Unsat,
                "unknown" => SatResult::Unknown("solver answered unknown".into()),
                other => {
                    return Err(self.protocol(format!("unexpected check-sat answer `{other}`")))
                }
            },
            Err(SmtError::Timeout(d)) => {
                warn!("solver timed out after {:?}", d);
                SatResult::Unknown(format!("timeout after {} ms", d.as_millis()))
            }
            Err(e) => return Err(e),
        };
        debug!("check-sat: {:?} in {:?}", answer, started.elapsed());
        self.answers.push(answer.clone());
        Ok(answer)
    }

    /// `check` that first writes the transcript to `query_<iter>_<kind>.smt2` in the dump
    /// directory, when one is configured.
    pub fn check_labeled(&mut self, iter: usize, kind: &str) -> Result<SatResult, SmtError> {
        if let Some(dir) = self.cfg.dump_dir.clone() {
            write_dump(&dir, iter, kind, &self.transcript())?;
        }
        self.check()
    }

    /// Values for `vars` after a `sat` answer.
    pub fn get_values(&mut self, pool: &VarPool, vars: &[VarId]) -> Result<Model, SmtError> {
        let mut values = HashMap::new();
        let wanted: BTreeSet<VarId> = vars.iter().copied().collect();
        let wanted: Vec<VarId> = wanted
            .into_iter()
            .filter(|v| self.declared.contains(v))
            .collect();
        for chunk in wanted.chunks(256) {
            let names: Vec<&str> = chunk.iter().map(|v| pool.name(*v)).collect();
            self.raw(&format!("(get-value ({}))", names.join(" ")))?;
            let text = self.read_sexpr(self.cfg.timeout)?;
            let parsed = sexpr::parse(&text).map_err(|e| self.protocol(e.to_string()))?;
            let SExpr::List(pairs) = parsed else {
                return Err(self.protocol(format!("unexpected get-value answer `{}`", text.trim())));
            };
            if pairs.len() != chunk.len() {
                return Err(self.protocol(format!("unexpected get-value answer `{}`", text.trim())));
            }
            for (v, pair) in chunk.iter().zip(pairs) {
                let val = match &pair {
                    SExpr::List(kv) if kv.len() == 2 => sexpr::value(&kv[1]),
                    _ => None,
                };
                let sort = pool.sort(*v);
                match val {
                    Some(val)
                        if sort.contains(val)
                            || matches!(sort, Sort::Int { .. }) && val.as_int().is_some() =>
                    {
                        values.insert(*v, val);
                    }
                    _ => {
                        return Err(self.protocol(format!(
                            "bad value for {}: {:?}",
                            pool.name(*v),
                            pair
                        )))
                    }
                }
            }
        }
        // Variables the solver never saw are unconstrained; report the sort's least value.
        for &v in vars {
            values.entry(v).or_insert(match pool.sort(v) {
                Sort::Bool => Value::Bool(false),
                Sort::Int { lo, .. } => Value::Int(lo),
            });
        }
        Ok(Model { values })
    }

    fn kill(&mut self) {
        self.dead = true;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    pub fn is_alive(&self) -> bool {
        !self.dead
    }

    pub fn close(mut self) {
        if !self.dead {
            let _ = self.raw("(exit)");
            let deadline = Instant::now() + Duration::from_millis(500);
            while Instant::now() < deadline {
                if let Ok(Some(_)) = self.child.try_wait() {
                    self.dead = true;
                    return;
                }
                std::thread::sleep(Duration::from_millis(5));
            }
        }
        self.kill();
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if !self.dead {
            self.kill();
        }
    }
}

fn write_dump(dir: &Path, iter: usize, kind: &str, text: &str) -> Result<(), SmtError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("query_{iter}_{kind}.smt2"));
    let tmp = dir.join(format!(".query_{iter}_{kind}.smt2.tmp"));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, &path)?;
    Ok(())
}

/// Runs a standalone script through a fresh solver process and returns the `check-sat` answers.
pub fn replay(cfg: &SolverConfig, script: &str) -> Result<Vec<SatResult>, SmtError> {
    let mut child = Command::new(&cfg.executable)
        .args(&cfg.extra_args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|source| SmtError::Launch {
            path: cfg.executable.clone(),
            source,
        })?;
    {
        let mut stdin = child.stdin.take().expect("piped stdin");
        stdin.write_all(script.as_bytes())?;
        stdin.write_all(b"(exit)\n")?;
    }
    let out = child.wait_with_output()?;
    let text = String::from_utf8_lossy(&out.stdout);
    Ok(text
        .lines()
        .filter_map(|l| match l.trim() {
            "sat" => Some(SatResult::Sat),
            "unsat" => Some(SatResult::Unsat),
            "unknown" => Some(SatResult::Unknown("solver answered unknown".into())),
            _ => None,
        })
        .collect())
}
