use clap::Parser;

fn main() {
    let cli = hkernel::cli::Cli::parse();
    std::process::exit(hkernel::cli::run(cli));
}
