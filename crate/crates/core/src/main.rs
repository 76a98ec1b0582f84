fn main() {
    std::process::exit(robust_vqc::cli::run(std::env::args_os()));
}
