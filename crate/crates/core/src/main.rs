use clap::Parser;
use cyclespec_core::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(f) = run(cli) {
        eprintln!("{}", f.message);
        std::process::exit(f.code);
    }
}
