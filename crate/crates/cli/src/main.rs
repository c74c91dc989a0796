fn main() {
    std::process::exit(skein_cli::run(std::env::args_os()));
}
