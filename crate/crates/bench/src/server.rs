use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::thread;

use socnav_core::env::EnvConfig;

use crate::protocol::Session;

/// Serves one session over a line stream until `close` or end of input.
pub fn serve_stream<R: BufRead, W: Write>(config: EnvConfig, reader: R, mut writer: W) -> io::Result<()> {
    let mut session = Session::new(config);
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = session.handle_line(&line);
        writer.write_all(response.to_line().as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        if session.is_closed() {
            break;
        }
    }
    Ok(())
}

pub fn serve_stdio(config: EnvConfig) -> io::Result<()> {
    let stdin = io::stdin();
    serve_stream(config, stdin.lock(), io::stdout().lock())
}

fn handle_connection(config: EnvConfig, stream: TcpStream) {
    let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
    log::info!("session opened: {peer}");
    let result = stream
        .try_clone()
        .and_then(|read_half| serve_stream(config, BufReader::new(read_half), BufWriter::new(stream)));
    match result {
        Ok(()) => log::info!("session closed: {peer}"),
        Err(e) => log::warn!("session {peer} ended with error: {e}"),
    }
}

/// Accepts connections forever, one thread and one session per connection.
pub fn serve_listener(listener: TcpListener, config: EnvConfig) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let config = config.clone();
        thread::spawn(move || handle_connection(config, stream));
    }
    Ok(())
}

pub fn serve_tcp(addr: impl ToSocketAddrs, config: EnvConfig) -> io::Result<()> {
    let listener = TcpListener::bind(addr)?;
    log::info!("listening on {}", listener.local_addr()?);
    serve_listener(listener, config)
}
