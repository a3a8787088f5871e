use clap::Parser;

fn main() {
    let cli = seqcd::cli::Cli::parse();
    let mut stdout = std::io::stdout().lock();
    std::process::exit(seqcd::cli::run(cli, &mut stdout));
}
