use clap::Parser;

fn main() {
    let cli = slowbond_cli::args::Cli::parse();
    std::process::exit(slowbond_cli::run(&cli));
}
