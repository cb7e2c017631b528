use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::atoms::split_model_line;
use super::{AnswerSet, Backend, ModelLimit, SolveRequest, SolveResult, SolveStatus, SolverError};

/// Extra wall time granted after the solver's own time limit before the
/// process is killed.
const KILL_GRACE: Duration = Duration::from_secs(1);

/// Runs a clingo-compatible executable and parses its text output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClingoBackend {
    command: Vec<String>,
}

impl ClingoBackend {
    /// `command` is the executable followed by fixed leading arguments,
    /// e.g. `["python3", "-m", "clingo"]`.
    pub fn new(command: Vec<String>) -> Result<Self, SolverError> {
        if command.is_empty() {
            return Err(SolverError::Unavailable("empty solver command".into()));
        }
        Ok(ClingoBackend { command })
    }

    /// Whitespace-separated command line.
    pub fn from_command_line(line: &str) -> Result<Self, SolverError> {
        Self::new(line.split_whitespace().map(str::to_owned).collect())
    }

    /// First working solver among: `$ASPHINT_SOLVER`, `configured`, `clingo`
    /// on the path, `python3 -m clingo`.
    pub fn discover(configured: Option<&str>) -> Result<Self, SolverError> {
        let env = std::env::var("ASPHINT_SOLVER").ok().filter(|s| !s.trim().is_empty());
        let mut tried = Vec::new();
        for line in env.as_deref().into_iter().chain(configured).chain(["clingo", "python3 -m clingo"]) {
            let backend = Self::from_command_line(line)?;
            if backend.probe() {
                return Ok(backend);
            }
            tried.push(line.to_owned());
        }
        Err(SolverError::Unavailable(format!("no working clingo among {tried:?}")))
    }

    pub fn command(&self) -> &[String] {
        &self.command
    }

    fn probe(&self) -> bool {
        Command::new(&self.command[0])
            .args(&self.command[1..])
            .arg("--version")
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .output()
            .is_ok_and(|o| String::from_utf8_lossy(&o.stdout).contains("clingo"))
    }

    fn arguments(&self, request: &SolveRequest) -> Vec<String> {
        let mut args: Vec<String> = self.command[1..].to_vec();
        args.push(match request.max_models {
            ModelLimit::All => "-n0".into(),
            ModelLimit::Count(n) => format!("-n{n}"),
        });
        let secs = request.timeout.as_secs_f64().ceil().max(1.0) as u64;
        args.push(format!("--time-limit={secs}"));
        args.push("--warn=none".into());
        if request.projection.is_some() {
            args.push("--project".into());
        }
        args
    }

    fn program_text(request: &SolveRequest) -> String {
        let mut text = request.program.clone();
        if let Some(sigs) = &request.projection {
            text.push('\n');
            if sigs.is_empty() {
                text.push_str("#show.\n");
            }
            for s in sigs {
                text.push_str(&format!("#show {s}.\n#show -{s}.\n"));
            }
        }
        text
    }
}

impl Backend for ClingoBackend {
    fn solve(&self, request: &SolveRequest) -> Result<SolveResult, SolverError> {
        let mut child = Command::new(&self.command[0])
            .args(self.arguments(request))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| SolverError::Unavailable(format!("{}: {e}", self.command[0])))?;

        let program = Self::program_text(request);
        let mut stdin = child.stdin.take().expect("stdin piped");
        let writer = std::thread::spawn(move || stdin.write_all(program.as_bytes()));
        let mut stdout = child.stdout.take().expect("stdout piped");
        let out_reader = std::thread::spawn(move || {
            let mut buf = String::new();
            stdout.read_to_string(&mut buf).map(|_| buf)
        });
        let mut stderr = child.stderr.take().expect("stderr piped");
        let err_reader = std::thread::spawn(move || {
            let mut buf = String::new();
            stderr.read_to_string(&mut buf).map(|_| buf)
        });

        let deadline = Instant::now() + Duration::from_secs(request.timeout.as_secs_f64().ceil().max(1.0) as u64) + KILL_GRACE;
        let mut killed = false;
        let status = loop {
            if let Some(status) = child.try_wait()? {
                break Some(status);
            }
            if Instant::now() >= deadline {
                let _ = child.kill();
                let _ = child.wait();
                killed = true;
                break None;
            }
            std::thread::sleep(Duration::from_millis(1));
        };
        // A broken pipe only means the solver stopped reading early.
        let _ = writer.join();
        let stdout = out_reader.join().map_err(|_| SolverError::Backend("stdout reader panicked".into()))??;
        let stderr = err_reader.join().map_err(|_| SolverError::Backend("stderr reader panicked".into()))??;

        let mut result = parse_output(&stdout, &stderr);
        if let Some(code) = status.and_then(|s| s.code()) {
            if code == 65 && result.status != SolveStatus::SolverError {
                result.status = SolveStatus::SolverError;
                result.stderr = Some(stderr.clone());
            }
        }
        if killed && result.status != SolveStatus::SolverError {
            result.status = SolveStatus::Timeout;
            result.exhausted = false;
        }
        Ok(result)
    }
}

fn is_error_output(stderr: &str) -> bool {
    stderr.lines().any(|l| l.contains("error:") || l.contains("*** ERROR") || l.starts_with("Traceback"))
}

/// Parses clingo's default text output.
pub(crate) fn parse_output(stdout: &str, stderr: &str) -> SolveResult {
    let mut answer_sets = Vec::new();
    let mut status = None;
    let mut interrupted = false;
    let mut more = false;
    let mut malformed = None;
    let mut lines = stdout.lines();
    while let Some(line) = lines.next() {
        let line = line.trim_end();
        if line.starts_with("Answer:") {
            let model = lines.next().unwrap_or("");
            match split_model_line(model) {
                Some(atoms) => answer_sets.push(AnswerSet::new(atoms)),
                None => malformed = Some(model.to_owned()),
            }
        } else if line == "SATISFIABLE" {
            status = Some(SolveStatus::Sat);
        } else if line == "UNSATISFIABLE" {
            status = Some(SolveStatus::Unsat);
        } else if line == "UNKNOWN" {
            status = Some(SolveStatus::Timeout);
        } else if line.starts_with("INTERRUPTED") || line.starts_with("TIME LIMIT") {
            interrupted = true;
        } else if let Some(rest) = line.strip_prefix("Models") {
            more = rest.trim_end().ends_with('+');
        }
    }

    if is_error_output(stderr) || malformed.is_some() {
        let mut message = stderr.trim().to_owned();
        if let Some(m) = malformed {
            message.push_str(&format!("\nunparseable model line: {m}"));
        }
        return SolveResult { status: SolveStatus::SolverError, answer_sets, exhausted: false, stderr: Some(message) };
    }
    let status = match status {
        _ if interrupted => SolveStatus::Timeout,
        Some(s) => s,
        None if answer_sets.is_empty() => {
            return SolveResult {
                status: SolveStatus::SolverError,
                answer_sets,
                exhausted: false,
                stderr: Some(format!("no result line in solver output\n{}", stderr.trim())),
            }
        }
        None => SolveStatus::Timeout,
    };
    let exhausted = match status {
        SolveStatus::Unsat => true,
        SolveStatus::Sat => !more,
        _ => false,
    };
    SolveResult { status, answer_sets, exhausted, stderr: None }
}
