use std::io::Write;
use std::process::ExitCode;

use algdyn::cli::{run, EXIT_INPUT};

fn main() -> ExitCode {
    let r = run(std::env::args_os());
    let mut code = r.exit_code;
    if r.exit_code == 0 || r.exit_code == 1 || r.exit_code == 2 {
        print!("{}", r.report);
    } else {
        eprint!("{}", r.report);
    }
    if let Some(csv) = &r.csv {
        match &r.csv_path {
            Some(p) if p.as_os_str() != "-" => {
                if let Err(e) = std::fs::write(p, csv) {
                    eprintln!("error: {}: {e}", p.display());
                    code = EXIT_INPUT;
                }
            }
            _ => {
                let _ = std::io::stdout().write_all(csv.as_bytes());
            }
        }
    }
    ExitCode::from(code as u8)
}
