fn main() {
    std::process::exit(dpquiver::cli::run(std::env::args_os()));
}
