use clap::Parser;
use tst_decide::cli::{exit, normalize_args, run, Cli};

fn main() {
    let cli = Cli::parse_from(normalize_args(std::env::args()));
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit::ERROR);
        }
    }
}
