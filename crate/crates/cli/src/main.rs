use clap::Parser;

use hclip_dgd::args::Cli;
use hclip_dgd::commands;

fn main() {
    let cli = Cli::parse();
    std::process::exit(commands::dispatch(cli));
}
