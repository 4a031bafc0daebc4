use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdout, Command, Stdio};
use std::thread;

use anyhow::Context;
use rulesynth::synthesis::{ExternalProposer, Proposer};

use crate::SpawnError;

/// Grammar texts read from a child process's stdout. The child receives
/// the support set on stdin and is killed when the proposer is dropped.
pub struct ChildProposer {
    child: Child,
    inner: ExternalProposer<BufReader<ChildStdout>>,
}

impl ChildProposer {
    pub fn spawn(command_line: &str, stdin_text: String) -> Result<Self, SpawnError> {
        let spawn_error = |source| SpawnError {
            command: command_line.to_owned(),
            source,
        };
        let mut parts = command_line.split_whitespace();
        let program = parts.next().ok_or_else(|| {
            spawn_error(io::Error::new(io::ErrorKind::InvalidInput, "empty command"))
        })?;
        let mut child = Command::new(program)
            .args(parts)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(spawn_error)?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        // Written from a thread so a child that does not read cannot block us.
        thread::spawn(move || {
            let _ = stdin.write_all(stdin_text.as_bytes());
        });
        let stdout = child.stdout.take().expect("stdout is piped");
        Ok(ChildProposer {
            child,
            inner: ExternalProposer::new(BufReader::new(stdout)),
        })
    }
}

impl Proposer for ChildProposer {
    fn next_text(&mut self) -> Option<String> {
        self.inner.next_text()
    }
}

impl Drop for ChildProposer {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Grammar texts read from a file, or stdin for `-`.
pub fn file_proposer(path: &Path) -> anyhow::Result<Box<dyn Proposer>> {
    let reader: Box<dyn BufRead> = if path == Path::new("-") {
        Box::new(BufReader::new(io::stdin()))
    } else {
        let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        Box::new(BufReader::new(f))
    };
    Ok(Box::new(ExternalProposer::new(reader)))
}
