use std::io::{self, BufWriter};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = BufWriter::new(io::stdout().lock());
    let code =
        window_sketch::cli::run(std::env::args_os(), &mut input, &mut out, &mut io::stderr());
    drop(out);
    ExitCode::from(code as u8)
}
