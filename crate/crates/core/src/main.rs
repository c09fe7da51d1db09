use clap::Parser;

use gabor_cube::cli::{configure_threads, error_code, error_report, run, Cli};

fn main() {
    if let Err(e) = configure_threads() {
        print!("{}", error_report(&e));
        std::process::exit(error_code(&e));
    }
    let cli = Cli::parse();
    let out = run(&cli);
    print!("{}", out.stdout);
    std::process::exit(out.code);
}
