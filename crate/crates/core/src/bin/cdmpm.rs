fn main() {
    std::process::exit(cdmpm_core::cli::run(std::env::args_os()));
}
