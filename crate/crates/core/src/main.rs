use clap::Parser;

fn main() {
    let config = bvks::cli::RunConfig::parse();
    std::process::exit(bvks::cli::run(config));
}
