fn main() {
    std::process::exit(lrs_pfsrc::cli::run(std::env::args_os()));
}
