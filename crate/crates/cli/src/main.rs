fn main() {
    std::process::exit(smwp_cli::run());
}
