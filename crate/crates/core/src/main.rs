use clap::Parser;

fn main() {
    let cli = billfate::cli::Cli::parse();
    if let Err(err) = billfate::cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
