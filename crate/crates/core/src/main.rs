use clap::Parser;

fn main() {
    let cli = odometer::cli::Cli::parse();
    std::process::exit(odometer::cli::run(cli));
}
