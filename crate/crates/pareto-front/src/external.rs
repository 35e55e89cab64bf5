//! Feasibility oracle backed by a child process.
//!
//! For every query the parent writes the coordinates as base-10 integers
//! separated by single spaces and terminated by `\n`; the child answers with
//! a line containing exactly `1` (feasible) or `0` (infeasible). One child
//! serves the whole run and sees end-of-file on its stdin when the oracle is
//! dropped.

use std::io::{self, BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, ExitStatus, Stdio};

use pareto_front_core::{FeasibilityOracle, OracleError, Point, SearchSpace};

#[derive(Debug)]
pub struct ExternalProcessOracle {
    space: SearchSpace,
    command: Vec<String>,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    line: String,
    broken: bool,
}

impl ExternalProcessOracle {
    /// Starts `command[0]` with the remaining elements as arguments. The
    /// child's stderr is inherited.
    pub fn spawn(space: SearchSpace, command: &[String]) -> io::Result<Self> {
        let (program, args) =
            command.split_first().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "empty command"))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take();
        let stdout = BufReader::new(child.stdout.take().expect("stdout is piped"));
        Ok(ExternalProcessOracle {
            space,
            command: command.to_vec(),
            child,
            stdin,
            stdout,
            line: String::new(),
            broken: false,
        })
    }

    pub fn command(&self) -> &[String] {
        &self.command
    }

    /// Closes the child's stdin and waits for it to exit.
    pub fn finish(mut self) -> io::Result<ExitStatus> {
        self.shutdown()
    }

    fn shutdown(&mut self) -> io::Result<ExitStatus> {
        self.stdin = None;
        if self.broken {
            let _ = self.child.kill();
        }
        self.child.wait()
    }

    fn query(&mut self, point: &Point) -> Result<bool, String> {
        let stdin = self.stdin.as_mut().ok_or("oracle process already shut down")?;
        let mut request = String::new();
        for (i, c) in point.coords().iter().enumerate() {
            if i > 0 {
                request.push(' ');
            }
            request.push_str(&c.to_string());
        }
        request.push('\n');
        stdin
            .write_all(request.as_bytes())
            .and_then(|()| stdin.flush())
            .map_err(|e| format!("cannot write query: {e}"))?;

        self.line.clear();
        let n = self.stdout.read_line(&mut self.line).map_err(|e| format!("cannot read reply: {e}"))?;
        if n == 0 {
            let status = match self.child.try_wait() {
                Ok(Some(status)) => format!(" ({status})"),
                _ => String::new(),
            };
            return Err(format!("process closed its output before replying{status}"));
        }
        match self.line.strip_suffix('\n').unwrap_or(&self.line) {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(format!("expected `1` or `0`, got {other:?}")),
        }
    }
}

impl FeasibilityOracle for ExternalProcessOracle {
    fn evaluate(&mut self, point: &Point) -> Result<bool, OracleError> {
        self.space.check(point)?;
        if self.broken {
            return Err(OracleError::Failure { point: point.clone(), message: "oracle process failed earlier".into() });
        }
        self.query(point).map_err(|message| {
            self.broken = true;
            OracleError::Failure { point: point.clone(), message }
        })
    }
}

impl Drop for ExternalProcessOracle {
    fn drop(&mut self) {
        let _ = self.shutdown();
    }
}
