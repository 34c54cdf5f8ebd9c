use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdbg_server::cli::{run_file, RunOptions, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "qdbg", version, about = "Debugger for QDL quantum programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the WebSocket and real-time endpoints.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
    /// Run a program headlessly, reporting each breakpoint pause.
    Run {
        file: PathBuf,
        #[arg(long = "break", value_delimiter = ',')]
        breakpoints: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also print the circuit of this frame from the final snapshot.
        #[arg(long)]
        frame: Option<usize>,
        /// One JSON document per line instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match cli.command {
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
            match rt.block_on(qdbg_server::http::serve(SocketAddr::new(host, port))) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Run {
            file,
            breakpoints,
            seed,
            frame,
            json,
        } => {
            let out = run_file(
                &file,
                &RunOptions {
                    breakpoints,
                    seed,
                    frame,
                    json,
                },
            );
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            ExitCode::from(out.code as u8)
        }
    }
}
