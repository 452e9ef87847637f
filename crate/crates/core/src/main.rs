use clap::Parser;

use radial_gauge::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
