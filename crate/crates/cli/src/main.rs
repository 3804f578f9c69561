use clap::Parser;

fn main() {
    let cli = noctua_cli::Cli::parse();
    if let Err(e) = noctua_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
