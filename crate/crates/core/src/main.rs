use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    match anticritical::cli::run_args(std::env::args_os()) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err((code, msg)) => {
            if code == 0 {
                print!("{msg}");
            } else {
                eprintln!("{}", msg.trim_end());
            }
            ExitCode::from(code as u8)
        }
    }
}
