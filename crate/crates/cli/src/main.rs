fn main() {
    std::process::exit(betagraph_cli::run(std::env::args_os()));
}
