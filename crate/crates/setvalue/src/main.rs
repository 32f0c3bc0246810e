use clap::Parser;

fn main() {
    let args = setvalue::cli::Cli::parse();
    if let Err(e) = setvalue::cli::run(&args) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
