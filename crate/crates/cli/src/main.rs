use clap::Parser;

use rainshape_cli::{run, Cli, Failure};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => {}
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            std::process::exit(2);
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}
