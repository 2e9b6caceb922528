use clap::Parser;

use frobres::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
