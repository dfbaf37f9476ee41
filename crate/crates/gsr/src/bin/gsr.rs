fn main() {
    std::process::exit(gsr::cli::run_cli());
}
