use clap::Parser;

fn main() {
    let out = ocnsep::cli::run(&ocnsep::cli::Cli::parse());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
