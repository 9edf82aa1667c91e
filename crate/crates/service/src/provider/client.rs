use std::io::{BufRead, BufReader, Write};
use std::os::unix::net::UnixStream;
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use thiserror::Error;

use super::protocol::{ProviderReply, ProviderRequest, ReplyEnvelope, RequestEnvelope};
use crate::config::ProviderEndpoint;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("cannot start provider: {0}")]
    Spawn(String),
    #[error("provider i/o failed: {0}")]
    Io(String),
    #[error("provider closed the connection")]
    Closed,
    #[error("malformed provider reply: {0}")]
    Protocol(String),
    #[error("provider reported: {0}")]
    Remote(String),
}

enum Transport {
    Process {
        child: Child,
        stdin: ChildStdin,
        stdout: BufReader<ChildStdout>,
    },
    Socket {
        writer: UnixStream,
        reader: BufReader<UnixStream>,
    },
}

struct Connection {
    transport: Transport,
    next_id: u64,
}

/// Blocking client for one provider connection. Calls are serialized.
pub struct ProviderClient {
    name: String,
    conn: Mutex<Connection>,
}

impl ProviderClient {
    pub fn connect(name: &str, endpoint: &ProviderEndpoint) -> Result<Self, ProviderError> {
        let transport = match endpoint {
            ProviderEndpoint::Command(argv) => {
                let (program, args) = argv
                    .split_first()
                    .ok_or_else(|| ProviderError::Spawn("empty command".into()))?;
                let mut child = Command::new(program)
                    .args(args)
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()
                    .map_err(|e| ProviderError::Spawn(format!("{program}: {e}")))?;
                let stdin = child.stdin.take().ok_or(ProviderError::Closed)?;
                let stdout = BufReader::new(child.stdout.take().ok_or(ProviderError::Closed)?);
                Transport::Process { child, stdin, stdout }
            }
            ProviderEndpoint::Socket(path) => Self::socket_transport(path)?,
        };
        Ok(Self {
            name: name.to_owned(),
            conn: Mutex::new(Connection { transport, next_id: 1 }),
        })
    }

    fn socket_transport(path: &Path) -> Result<Transport, ProviderError> {
        let writer = UnixStream::connect(path).map_err(|e| ProviderError::Spawn(format!("{}: {e}", path.display())))?;
        let reader = BufReader::new(writer.try_clone().map_err(|e| ProviderError::Io(e.to_string()))?);
        Ok(Transport::Socket { writer, reader })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Sends `request` and collects its data replies. A remote `error`
    /// reply becomes [`ProviderError::Remote`].
    pub fn call(&self, request: ProviderRequest) -> Result<Vec<ProviderReply>, ProviderError> {
        let mut conn = self.conn.lock().map_err(|_| ProviderError::Closed)?;
        let id = conn.next_id;
        conn.next_id += 1;
        let mut line = serde_json::to_string(&RequestEnvelope { id, request })
            .map_err(|e| ProviderError::Protocol(e.to_string()))?;
        line.push('\n');
        let (writer, reader): (&mut dyn Write, &mut dyn BufRead) = match &mut conn.transport {
            Transport::Process { stdin, stdout, .. } => (stdin, stdout),
            Transport::Socket { writer, reader } => (writer, reader),
        };
        writer
            .write_all(line.as_bytes())
            .and_then(|()| writer.flush())
            .map_err(|e| ProviderError::Io(e.to_string()))?;
        let mut replies = Vec::new();
        let mut buf = String::new();
        loop {
            buf.clear();
            let n = reader.read_line(&mut buf).map_err(|e| ProviderError::Io(e.to_string()))?;
            if n == 0 {
                return Err(ProviderError::Closed);
            }
            if buf.trim().is_empty() {
                continue;
            }
            let env: ReplyEnvelope =
                serde_json::from_str(buf.trim_end()).map_err(|e| ProviderError::Protocol(format!("{e}: {}", buf.trim_end())))?;
            if env.id != id {
                return Err(ProviderError::Protocol(format!("reply id {} for request {id}", env.id)));
            }
            match env.reply {
                ProviderReply::End => return Ok(replies),
                ProviderReply::Error { message } => return Err(ProviderError::Remote(message)),
                other => replies.push(other),
            }
        }
    }
}

impl Drop for ProviderClient {
    fn drop(&mut self) {
        if let Ok(conn) = self.conn.get_mut() {
            if let Transport::Process { child, .. } = &mut conn.transport {
                let _ = child.kill();
                let _ = child.wait();
            }
        }
    }
}
