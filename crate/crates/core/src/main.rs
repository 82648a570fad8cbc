use clap::Parser;

fn main() {
    let cli = dzfuzzy::cli::Cli::parse();
    std::process::exit(dzfuzzy::cli::run(cli));
}
