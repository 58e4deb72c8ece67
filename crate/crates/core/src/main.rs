fn main() {
    std::process::exit(adcv::cli::main());
}
