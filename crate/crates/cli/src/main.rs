fn main() {
    std::process::exit(fastmorph_cli::run(std::env::args_os()));
}
